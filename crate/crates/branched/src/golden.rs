//! Reference tables shipped with the binary, checked by `algebra golden`.

use branched_core::basis::PrimitiveBasis;
use branched_core::growth::{iterated_growth, primitive_projector};
use branched_core::hopf::{convolution, Strategy};
use branched_core::literal::{parse_forest, parse_series};
use branched_core::{Alphabet, Basis, ForestSeries};

use crate::error::CliError;

pub const STAR: &str = include_str!("../goldens/star.txt");
pub const PI1: &str = include_str!("../goldens/pi1.txt");
pub const PTOP: &str = include_str!("../goldens/ptop.txt");

/// Non-comment lines split on `|`, trimmed.
pub fn records(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('|').map(str::trim).collect())
}

fn series(src: &str) -> Result<ForestSeries, CliError> {
    Ok(parse_series(src)?)
}

fn basis_of(name: &str) -> Result<Basis, CliError> {
    match name {
        "zeta" => Ok(Basis::Zeta),
        "delta" => Ok(Basis::Delta),
        other => Err(CliError::Input(format!("unknown basis {other:?} in golden file"))),
    }
}

/// Result of one table: rows checked and descriptions of the mismatches.
#[derive(Debug, Default)]
pub struct Check {
    pub name: &'static str,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

impl Check {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.mismatches.push(what());
        }
    }
}

pub fn check_star() -> Result<Check, CliError> {
    let mut c = Check {
        name: "star",
        ..Default::default()
    };
    for r in records(STAR) {
        let [basis, left, right, expected] = r[..] else {
            return Err(CliError::Input(format!("malformed star record {r:?}")));
        };
        let basis = basis_of(basis)?;
        let (x, y) = (series(left)?, series(right)?);
        let cutoff = x.max_degree() + y.max_degree();
        let got = convolution(&x, &y, cutoff, basis, Strategy::Grafting)?;
        let other = convolution(&x, &y, cutoff, basis, Strategy::Coproduct)?;
        let want = series(expected)?;
        c.record(got == want && other == want, || format!("{left} * {right}: got {got}"));
    }
    Ok(c)
}

pub fn check_pi1() -> Result<Check, CliError> {
    let mut c = Check {
        name: "pi1",
        ..Default::default()
    };
    for r in records(PI1) {
        let [h, expected] = r[..] else {
            return Err(CliError::Input(format!("malformed pi1 record {r:?}")));
        };
        let got = primitive_projector(&parse_forest(h)?)?;
        c.record(got == series(expected)?, || format!("pi1({h}): got {got}"));
    }
    Ok(c)
}

pub fn check_ptop() -> Result<Check, CliError> {
    let mut c = Check {
        name: "ptop",
        ..Default::default()
    };
    let basis = PrimitiveBasis::build(&Alphabet::plain(), 4)?;
    for r in records(PTOP) {
        let [sources, expected] = r[..] else {
            return Err(CliError::Input(format!("malformed ptop record {r:?}")));
        };
        let items = sources
            .split(';')
            .map(|s| Ok(primitive_projector(&parse_forest(s.trim())?)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        let got = iterated_growth(&items)?;
        let listed = basis.ptop_elements().iter().any(|e| e.value == got);
        c.record(got == series(expected)? && listed, || format!("top({sources}): got {got}"));
    }
    Ok(c)
}

pub fn check_all() -> Result<Vec<Check>, CliError> {
    Ok(vec![check_star()?, check_pi1()?, check_ptop()?])
}

/// Compares each primitive of the plain basis against the `π₁` table,
/// matched by source forest. Returns how many matched, or the mismatches.
pub fn check_primitives(basis: &PrimitiveBasis) -> Result<Result<usize, Vec<String>>, CliError> {
    let table = records(PI1)
        .filter_map(|r| match r[..] {
            [h, p] => Some((h.to_string(), p.to_string())),
            _ => None,
        })
        .collect::<Vec<_>>();
    let mut bad = Vec::new();
    for p in basis.primitives() {
        let key = p.source.to_string();
        match table.iter().find(|(h, _)| *h == key) {
            Some((_, expected)) if series(expected)? == p.value => {}
            Some(_) => bad.push(format!("{key}: got {}", p.value)),
            None => bad.push(format!("{key}: no reference entry")),
        }
    }
    Ok(if bad.is_empty() {
        Ok(basis.primitives().len())
    } else {
        Err(bad)
    })
}
