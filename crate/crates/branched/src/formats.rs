//! JSON and CSV file formats. Every per-forest map is keyed by the forest
//! literal, so files stay readable and diffable.

use std::collections::BTreeMap;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use branched_core::approx::SmoothControlData;
use branched_core::controlled::ControlledPath;
use branched_core::literal::parse_forest;
use branched_core::poly::{Poly, PolyVectorField};
use branched_core::rough_path::{degree_for, BranchedRoughPath, GridPath};
use branched_core::tables::ForestTable;
use branched_core::{Alphabet, Q};

use crate::error::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GridPathFile {
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl GridPathFile {
    pub fn to_path(&self) -> Result<GridPath, CliError> {
        Ok(GridPath::new(self.times.clone(), self.values.clone())?)
    }

    pub fn from_path(path: &GridPath) -> Self {
        Self {
            times: path.times().to_vec(),
            values: path.values().to_vec(),
        }
    }
}

/// `X_{0,t}` per forest of degree `1..=N`; the alphabet is the standard one
/// for `dimension` labels.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RoughPathFile {
    pub alpha: f64,
    pub dimension: usize,
    pub times: Vec<f64>,
    pub values: BTreeMap<String, Vec<f64>>,
}

fn lookup(table: &ForestTable, key: &str) -> Result<usize, CliError> {
    let h = parse_forest(key).map_err(|e| CliError::Input(format!("forest key {key:?}: {e}")))?;
    table
        .index_of(&h)
        .ok_or_else(|| CliError::Input(format!("forest {key} is outside the truncation")))
}

impl RoughPathFile {
    pub fn from_path(x: &BranchedRoughPath) -> Self {
        let table = x.table();
        let values = (1..table.len())
            .map(|k| {
                let column = x.values().iter().map(|row| row[k]).collect();
                (table.forest(k).to_string(), column)
            })
            .collect();
        Self {
            alpha: x.alpha(),
            dimension: x.alphabet().len(),
            times: x.times().to_vec(),
            values,
        }
    }

    pub fn to_path(&self) -> Result<BranchedRoughPath, CliError> {
        let n = degree_for(self.alpha)?;
        if !(1..=9).contains(&self.dimension) {
            return Err(CliError::Input(format!("dimension {} outside 1..=9", self.dimension)));
        }
        let table = Arc::new(ForestTable::new(&Alphabet::standard(self.dimension), n)?);
        let mut rows = vec![vec![0.0; table.len()]; self.times.len()];
        for row in &mut rows {
            row[0] = 1.0;
        }
        let mut seen = vec![false; table.len()];
        seen[0] = true;
        for (key, column) in &self.values {
            let k = lookup(&table, key)?;
            if column.len() != self.times.len() {
                return Err(CliError::Input(format!("forest {key}: wrong number of samples")));
            }
            seen[k] = true;
            for (row, v) in rows.iter_mut().zip(column) {
                row[k] = *v;
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(CliError::Input(format!("missing forest {}", table.forest(k))));
        }
        Ok(BranchedRoughPath::from_values(self.alpha, table, self.times.clone(), rows)?)
    }
}

/// A controlled path together with its reference, keyed by forest literal
/// (the empty forest is `"1"`).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ControlledPathFile {
    pub reference: RoughPathFile,
    pub components: BTreeMap<String, Vec<f64>>,
}

impl ControlledPathFile {
    pub fn from_path(z: &ControlledPath) -> Self {
        Self {
            reference: RoughPathFile::from_path(z.reference()),
            components: z
                .forests()
                .iter()
                .zip(z.components())
                .map(|(h, c)| (h.to_string(), c.clone()))
                .collect(),
        }
    }

    pub fn to_path(&self) -> Result<ControlledPath, CliError> {
        let x = Arc::new(self.reference.to_path()?);
        components_over(&x, &self.components).and_then(|c| Ok(ControlledPath::new(x, c)?))
    }
}

/// Rows for `𝓕_(N−1)` in table order; absent forests are zero.
fn components_over(
    x: &BranchedRoughPath,
    map: &BTreeMap<String, Vec<f64>>,
) -> Result<Vec<Vec<f64>>, CliError> {
    let k = x.table().count_up_to(x.degree() - 1);
    let mut rows = vec![vec![0.0; x.len()]; k];
    for (key, column) in map {
        let i = lookup(x.table(), key)?;
        if i >= k {
            return Err(CliError::Input(format!("forest {key} has degree ≥ N")));
        }
        if column.len() != x.len() {
            return Err(CliError::Input(format!("forest {key}: wrong number of samples")));
        }
        rows[i] = column.clone();
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SmoothControlFile {
    pub epsilon: f64,
    pub components: BTreeMap<String, Vec<f64>>,
}

impl SmoothControlFile {
    pub fn from_data(f: &SmoothControlData) -> Self {
        Self {
            epsilon: f.epsilon(),
            components: f
                .forests()
                .iter()
                .zip(f.values())
                .map(|(h, v)| (h.to_string(), v.clone()))
                .collect(),
        }
    }

    /// Data on the grid of `x`, in the forest order Γ expects.
    pub fn to_data(&self, x: &BranchedRoughPath) -> Result<SmoothControlData, CliError> {
        let rows = components_over(x, &self.components)?;
        let k = rows.len();
        Ok(SmoothControlData::new(
            x.times().to_vec(),
            x.table().forests()[..k].to_vec(),
            rows,
            self.epsilon,
        )?)
    }
}

/// One monomial `c·y^e` of a field component.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonomialTerm {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

/// `fields[i][c]` lists the monomials of the `c`-th coordinate of `f_i`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldFile {
    pub dim: usize,
    pub fields: Vec<Vec<Vec<MonomialTerm>>>,
}

impl FieldFile {
    pub fn to_field(&self) -> Result<PolyVectorField, CliError> {
        let mut fields = Vec::with_capacity(self.fields.len());
        for f in &self.fields {
            let mut comps = Vec::with_capacity(f.len());
            for terms in f {
                let mut p = Poly::zero(self.dim);
                for t in terms {
                    if t.exponents.len() != self.dim {
                        return Err(CliError::Input(format!(
                            "exponent vector {:?} needs {} entries",
                            t.exponents, self.dim
                        )));
                    }
                    let c = Q::from_str(t.coefficient.trim())
                        .map_err(|_| CliError::Input(format!("bad rational {:?}", t.coefficient)))?;
                    p.add_term(t.exponents.clone(), c);
                }
                comps.push(p);
            }
            fields.push(comps);
        }
        PolyVectorField::new(fields)
            .map_err(|_| CliError::Input("each field needs one polynomial per coordinate".into()))
    }

    pub fn from_field(field: &PolyVectorField) -> Self {
        let fields = (0..field.count())
            .map(|i| {
                field
                    .field(i)
                    .iter()
                    .map(|p| {
                        p.terms()
                            .map(|(e, c)| MonomialTerm {
                                exponents: e.clone(),
                                coefficient: c.to_string(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            dim: field.dim(),
            fields,
        }
    }
}

/// A tube around the section `X ↦ Γ_X(f)` over the `ρ_α`-ball of `radius`
/// around `center`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TubeFile {
    pub radius: f64,
    pub epsilon: f64,
    pub center: RoughPathFile,
    pub section: SmoothControlFile,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &std::path::Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Output(e.to_string()))?;
    writeln!(out).map_err(|e| CliError::Output(e.to_string()))
}

/// Writes a header and rows as CSV.
pub fn write_csv(out: &mut dyn Write, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Output(e.to_string()))
}
