//! Argument definitions and the subcommand drivers.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use branched_core::approx::{convergence_study, default_epsilon, GammaPlan};
use branched_core::basis::PrimitiveBasis;
use branched_core::bundle::{flat_distance, truncated_ns_distance, BundlePoint, TubeSpec};
use branched_core::controlled::ControlledPath;
use branched_core::fit::{Ratio, RateFit};
use branched_core::growth::{iterated_growth, primitive_projector};
use branched_core::holder::Pairs;
use branched_core::hopf::{antipode, convolution, coproduct, reduced_coproduct, Strategy};
use branched_core::grafting::grafting;
use branched_core::literal::{parse_forest, parse_series, parse_tagged_series, series_to_string};
use branched_core::rde::{ito_lyons_stability, solve_rde};
use branched_core::rough_path::{lift_piecewise_linear, BranchedRoughPath, GridPath};
use branched_core::{Alphabet, Basis, ForestSeries};

use crate::error::CliError;
use crate::formats::{
    read_json, write_csv, write_json, ControlledPathFile, FieldFile, GridPathFile, RoughPathFile,
    TubeFile,
};
use crate::golden;

#[derive(Debug, Parser)]
#[command(name = "branched", version, about = "Branched rough paths on the command line")]
pub struct Cli {
    /// Hölder exponent for lifted paths
    #[arg(long, global = true, default_value_t = 0.3)]
    pub alpha: f64,
    /// Weaker exponent for approximation errors; defaults to alpha/2
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Smoothness of the control data; defaults to (1 - N alpha)/2
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Worker threads for sweeps
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the main output here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact computations in the forest algebra
    Algebra {
        #[command(subcommand)]
        op: AlgebraOp,
    },
    /// Lift a piecewise-linear path to a branched rough path (JSON)
    Lift(LiftArgs),
    /// Convergence of dyadic approximations of a controlled path (CSV)
    Approx(ApproxArgs),
    /// Solve a rough differential equation with a polynomial field (CSV)
    Rde(RdeArgs),
    /// Distances between bundle points (CSV)
    Metric(MetricArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BasisArg {
    Delta,
    Zeta,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Delta => Basis::Delta,
            BasisArg::Zeta => Basis::Zeta,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum StrategyArg {
    Grafting,
    Coproduct,
}

#[derive(Debug, Subcommand)]
pub enum AlgebraOp {
    Coproduct { forest: String },
    /// Reduced coproduct of a nonempty forest
    Reduced { forest: String },
    Antipode { forest: String },
    /// Convolution product of two series
    Star {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = BasisArg::Delta)]
        basis: BasisArg,
        #[arg(long, value_enum, default_value_t = StrategyArg::Grafting)]
        strategy: StrategyArg,
    },
    /// Grafting of the left series onto the right one
    Graft { left: String, right: String },
    /// Left-nested natural growth of the given series
    Grow {
        #[arg(required = true, num_args = 2..)]
        items: Vec<String>,
    },
    /// Projection onto primitive elements
    Pi1 { forest: String },
    /// Primitive basis up to a degree
    Primitives {
        #[arg(long = "N", default_value_t = 4)]
        degree: usize,
        /// Number of labels; 1 means unlabelled forests
        #[arg(long, default_value_t = 1)]
        labels: usize,
        /// Compare against the shipped projection table
        #[arg(long)]
        golden: bool,
    },
    /// Grown words of primitives up to a degree
    Ptop {
        #[arg(long = "N", default_value_t = 4)]
        degree: usize,
    },
    /// Check every shipped reference table
    Golden,
}

#[derive(Debug, Args)]
pub struct LiftArgs {
    /// JSON file with `times` and `values`
    pub path: Option<PathBuf>,
    /// Generate a random walk with this many steps instead
    #[arg(long, conflicts_with = "path")]
    pub synthetic: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Rough path JSON
    pub rough: PathBuf,
    /// Controlled path JSON; defaults to the path itself
    pub controlled: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub mesh_levels: Vec<u32>,
}

#[derive(Debug, Args)]
pub struct RdeArgs {
    /// Rough path JSON
    pub rough: PathBuf,
    /// Polynomial field JSON
    pub field: PathBuf,
    /// Initial value, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub xi: Vec<f64>,
    /// Print Itô-Lyons ratios under perturbation instead of the solution
    #[arg(long)]
    pub stability: bool,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Controlled path JSON files
    #[arg(required = true, num_args = 2..)]
    pub points: Vec<PathBuf>,
    /// Tube JSON files for the truncated weighted sum
    #[arg(long, num_args = 1..)]
    pub tubes: Vec<PathBuf>,
}

/// Runs a parsed command; results go to `out`, diagnostics to `log`.
pub fn run(cli: &Cli, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    match &cli.command {
        Command::Algebra { op } => algebra(op, out),
        Command::Lift(a) => lift(cli, a, out, log),
        Command::Approx(a) => approx(cli, a, out, log),
        Command::Rde(a) => rde(cli, a, out),
        Command::Metric(a) => metric(a, out),
    }
}

fn say(out: &mut dyn Write, line: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{line}").map_err(|e| CliError::Output(e.to_string()))
}

/// Untagged input is read in `basis`; `z(...)` terms are always ζ-coefficients.
fn series_in(src: &str, basis: Basis) -> Result<ForestSeries, CliError> {
    if src.contains("z(") {
        let (s, b) = parse_tagged_series(src)?;
        Ok(s.convert(b, basis))
    } else {
        Ok(parse_series(src)?)
    }
}

fn algebra(op: &AlgebraOp, out: &mut dyn Write) -> Result<(), CliError> {
    match op {
        AlgebraOp::Coproduct { forest } => say(out, coproduct(&parse_forest(forest)?)),
        AlgebraOp::Reduced { forest } => say(out, reduced_coproduct(&parse_forest(forest)?)?),
        AlgebraOp::Antipode { forest } => say(out, antipode(&parse_forest(forest)?)),
        AlgebraOp::Star {
            left,
            right,
            basis,
            strategy,
        } => {
            let basis = Basis::from(*basis);
            let (x, y) = (series_in(left, basis)?, series_in(right, basis)?);
            let strategy = match strategy {
                StrategyArg::Grafting => Strategy::Grafting,
                StrategyArg::Coproduct => Strategy::Coproduct,
            };
            let p = convolution(&x, &y, x.max_degree() + y.max_degree(), basis, strategy)?;
            say(out, series_to_string(&p, basis))
        }
        AlgebraOp::Graft { left, right } => {
            say(out, grafting(&parse_series(left)?, &parse_series(right)?))
        }
        AlgebraOp::Grow { items } => {
            let items = items
                .iter()
                .map(|s| Ok(parse_series(s)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            say(out, iterated_growth(&items)?)
        }
        AlgebraOp::Pi1 { forest } => say(out, primitive_projector(&parse_forest(forest)?)?),
        AlgebraOp::Primitives {
            degree,
            labels,
            golden: check,
        } => {
            if !(1..=9).contains(labels) {
                return Err(CliError::Usage("--labels must lie in 1..=9".into()));
            }
            let basis = PrimitiveBasis::build(&Alphabet::standard(*labels), *degree)?;
            if *check {
                if *labels != 1 {
                    return Err(CliError::Usage("the reference table covers unlabelled forests only".into()));
                }
                return match golden::check_primitives(&basis)? {
                    Ok(n) => say(out, format!("OK: {n} basis vectors match")),
                    Err(bad) => Err(CliError::Threshold(format!(
                        "{} basis vectors differ:\n{}",
                        bad.len(),
                        bad.join("\n")
                    ))),
                };
            }
            for p in basis.primitives() {
                say(out, format!("{} | {}", p.source, p.value))?;
            }
            Ok(())
        }
        AlgebraOp::Ptop { degree } => {
            let basis = PrimitiveBasis::build(&Alphabet::plain(), *degree)?;
            for e in basis.ptop_elements() {
                let word: Vec<String> = e
                    .word
                    .iter()
                    .map(|&i| basis.primitives()[i].source.to_string())
                    .collect();
                say(out, format!("{} | {}", word.join(" ; "), e.value))?;
            }
            Ok(())
        }
        AlgebraOp::Golden => {
            let checks = golden::check_all()?;
            let mut failed = 0;
            for c in &checks {
                let ok = c.checked - c.mismatches.len();
                say(out, format!("{}: {ok}/{} match", c.name, c.checked))?;
                for m in &c.mismatches {
                    say(out, format!("  {m}"))?;
                }
                failed += c.mismatches.len();
            }
            if failed > 0 {
                return Err(CliError::Threshold(format!("{failed} golden entries differ")));
            }
            Ok(())
        }
    }
}

/// Random walk on `[0,1]` with uniform increments of variance `1/n`.
pub fn random_walk(n: usize, dim: usize, seed: u64) -> Result<GridPath, CliError> {
    if n == 0 || dim == 0 || dim > 9 {
        return Err(CliError::Usage("need at least one step and 1..=9 dimensions".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (3.0 / n as f64).sqrt();
    let mut current = vec![0.0; dim];
    let mut values = vec![current.clone()];
    for _ in 0..n {
        for c in &mut current {
            *c += scale * rng.gen_range(-1.0..1.0);
        }
        values.push(current.clone());
    }
    let times = (0..=n).map(|i| i as f64 / n as f64).collect();
    Ok(GridPath::new(times, values)?)
}

const CHEN_TOLERANCE: f64 = 1e-8;

fn lift(cli: &Cli, a: &LiftArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let path = match (&a.path, a.synthetic) {
        (Some(p), _) => read_json::<GridPathFile>(p)?.to_path()?,
        (None, Some(n)) => random_walk(n, a.dim, cli.seed)?,
        (None, None) => return Err(CliError::Usage("give a path file or --synthetic N".into())),
    };
    let x = lift_piecewise_linear(&path, cli.alpha)?;
    let defect = x.chen_defect(1);
    write_json(out, &RoughPathFile::from_path(&x))?;
    say(log, format!("degree = {}, forests = {}, chen_defect = {defect:e}", x.degree(), x.table().len()))?;
    if defect.is_nan() || defect > CHEN_TOLERANCE {
        return Err(CliError::Threshold(format!("Chen defect {defect:e} above {CHEN_TOLERANCE:e}")));
    }
    Ok(())
}

fn epsilon_for(cli: &Cli, alpha: f64) -> Result<f64, CliError> {
    match cli.epsilon {
        Some(e) => Ok(e),
        None => Ok(default_epsilon(alpha)?),
    }
}

/// `X^{[a]}` seen as a path controlled by `X`, for the first label `a`.
pub fn tautological(x: Arc<BranchedRoughPath>) -> Result<ControlledPath, CliError> {
    let label = x.alphabet().labels()[0];
    Ok(ControlledPath::composition(x, label, |v, k| match k {
        0 => v,
        1 => 1.0,
        _ => 0.0,
    })?)
}

fn approx(cli: &Cli, a: &ApproxArgs, out: &mut dyn Write, log: &mut dyn Write) -> Result<(), CliError> {
    let x = Arc::new(read_json::<RoughPathFile>(&a.rough)?.to_path()?);
    let alpha = x.alpha();
    let beta = cli.beta.unwrap_or(alpha / 2.0);
    if !(beta > 0.0 && beta < alpha) {
        return Err(CliError::Usage(format!("beta = {beta} must satisfy 0 < beta < alpha = {alpha}")));
    }
    let z = match &a.controlled {
        Some(p) => {
            let z = read_json::<ControlledPathFile>(p)?.to_path()?;
            if !z.reference().same_grid(&x) {
                return Err(CliError::Input("controlled path lives on a different grid".into()));
            }
            z.with_reference(x.clone())?
        }
        None => tautological(x.clone())?,
    };
    let plan = GammaPlan::for_path(&x)?;
    let eps = epsilon_for(cli, alpha)?;
    let table = convergence_study(&z, beta, &a.mesh_levels, &plan, eps, Pairs::All)?;
    // errors at rounding level carry no rate
    let size = z.components().iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    let fit = if table.rows.iter().all(|r| r.1 <= ROUNDING * size) {
        RateFit::Exact
    } else {
        table.fit
    };
    let slope = match fit {
        RateFit::Slope(s) => format!("{s}"),
        RateFit::Exact => "exact".to_string(),
    };
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|(theta, err)| vec![theta.to_string(), err.to_string(), slope.clone()])
        .collect();
    write_csv(out, &["theta".into(), "error_beta".into(), "slope".into()], &rows)?;
    let floor = alpha - beta - 0.1;
    say(log, format!("slope = {slope}, required >= {floor}"))?;
    if !fit.at_least(floor) {
        return Err(CliError::Threshold(format!("convergence slope {slope} below {floor}")));
    }
    Ok(())
}

const ROUNDING: f64 = 1e-12;

const SWEEP: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

fn rde(cli: &Cli, a: &RdeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let x = Arc::new(read_json::<RoughPathFile>(&a.rough)?.to_path()?);
    let field = read_json::<FieldFile>(&a.field)?.to_field()?;
    if field.count() != x.alphabet().len() {
        return Err(CliError::Input(format!(
            "{} fields for a {}-dimensional driver",
            field.count(),
            x.alphabet().len()
        )));
    }
    if a.stability {
        return stability(cli, &x, &field, &a.xi, out);
    }
    let sol = solve_rde(&x, &field, &a.xi)?;
    let mut header = vec!["t".to_string()];
    header.extend((0..field.dim()).map(|c| format!("y{c}")));
    let k = sol.lifted[0].component_count();
    for c in 0..field.dim() {
        header.extend(sol.lifted[c].forests()[1..k].iter().map(|h| format!("y{c}:{h}")));
    }
    let rows: Vec<Vec<String>> = (0..x.len())
        .map(|i| {
            let mut row = vec![sol.times[i].to_string()];
            row.extend(sol.values[i].iter().map(f64::to_string));
            for z in &sol.lifted {
                row.extend((1..k).map(|h| z.component_idx(h)[i].to_string()));
            }
            row
        })
        .collect();
    write_csv(out, &header, &rows)
}

fn ratio_text(r: Ratio) -> String {
    match r {
        Ratio::Value(v) => v.to_string(),
        Ratio::Degenerate => "degenerate".into(),
        Ratio::Unbounded => "inf".into(),
    }
}

/// Ratios under shifts of the start point and dilations of the driver,
/// spread over `--jobs` threads.
fn stability(
    cli: &Cli,
    x: &Arc<BranchedRoughPath>,
    field: &branched_core::poly::PolyVectorField,
    xi: &[f64],
    out: &mut dyn Write,
) -> Result<(), CliError> {
    solve_rde(x, field, xi)?;
    let tasks: Vec<(&str, f64)> = SWEEP
        .iter()
        .map(|&h| ("start", h))
        .chain(SWEEP.iter().map(|&h| ("driver", h)))
        .collect();
    let run_one = |&(kind, h): &(&str, f64)| -> Result<Ratio, CliError> {
        if kind == "start" {
            let shifted: Vec<f64> = xi.iter().map(|v| v + h).collect();
            Ok(ito_lyons_stability(xi, x, &shifted, x, field, Pairs::All)?)
        } else {
            let dilated = Arc::new(x.dilate(1.0 + h));
            Ok(ito_lyons_stability(xi, x, xi, &dilated, field, Pairs::All)?)
        }
    };
    let chunk = tasks.len().div_ceil(cli.jobs.min(tasks.len()));
    let results: Vec<Result<Ratio, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = tasks
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(run_one).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(tasks.len());
    for ((kind, h), r) in tasks.iter().zip(results) {
        rows.push(vec![kind.to_string(), h.to_string(), ratio_text(r?)]);
    }
    write_csv(out, &["kind".into(), "scale".into(), "ratio".into()], &rows)
}

fn tube(t: &TubeFile) -> Result<TubeSpec, CliError> {
    let center = Arc::new(t.center.to_path()?);
    let section = t.section.to_data(&center)?;
    let plan = Arc::new(GammaPlan::for_path(&center)?);
    Ok(TubeSpec::new(section, plan, center, t.radius, t.epsilon)?)
}

fn metric(a: &MetricArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let points = a
        .points
        .iter()
        .map(|p| Ok(BundlePoint::new(read_json::<ControlledPathFile>(p)?.to_path()?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let specs = a
        .tubes
        .iter()
        .map(|p| tube(&read_json::<TubeFile>(p)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = flat_distance(&points[i], &points[j], Pairs::All)?;
            let ns = truncated_ns_distance(&specs, &points[i], &points[j], Pairs::All)?;
            rows.push(vec![format!("{i}-{j}"), d.to_string(), ns.to_string()]);
        }
    }
    write_csv(out, &["pair".into(), "d_flat".into(), "partial_ns".into()], &rows)
}
