//! Problem files: a transition matrix with an optional potential, given
//! either as log-values per edge or as exact rational `Q` entries.

use std::fmt;
use std::path::Path;

use gibbs_rigidity::exact::parse_rational;
use gibbs_rigidity::{
    normalize, GibbsChain, PerronData, Potential, RationalChain, TransitionMatrix, Word,
};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    matrix: MatrixSpec,
    #[serde(default)]
    potential: Option<PotentialSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSpec {
    n: usize,
    rows: Vec<Vec<u8>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialSpec {
    #[serde(default)]
    log_values: Option<Vec<Vec<Option<f64>>>>,
    #[serde(default)]
    q_matrix: Option<Vec<Vec<Option<RationalEntry>>>>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RationalEntry {
    Integer(i64),
    Text(String),
}

impl fmt::Display for RationalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalEntry::Integer(v) => write!(f, "{v}"),
            RationalEntry::Text(s) => f.write_str(s),
        }
    }
}

/// A validated problem file.
#[derive(Debug, Clone)]
pub struct Problem {
    pub base: TransitionMatrix,
    pub potential: Potential,
    /// Present when the potential was given as rational `Q` entries.
    pub exact: Option<RationalChain>,
    /// Lowercase hex SHA-256 of the file bytes.
    pub digest: String,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        let bytes =
            std::fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Problem::parse(&bytes).map_err(|e| match e {
            CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(bytes: &[u8]) -> Result<Problem, CliError> {
        let digest = hex::encode(Sha256::digest(bytes));
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let file: ProblemFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." || path.ends_with('?') {
                CliError::Input(inner.to_string())
            } else {
                CliError::Input(format!("{path}: {inner}"))
            }
        })?;
        let base = matrix(&file.matrix)?;
        let (potential, exact) = match file.potential {
            None => (Potential::zero(base.clone()), None),
            Some(PotentialSpec {
                log_values: Some(values),
                q_matrix: None,
            }) => (log_values(&base, values)?, None),
            Some(PotentialSpec {
                log_values: None,
                q_matrix: Some(q),
            }) => {
                let chain = q_matrix(&base, q)?;
                (chain.potential().map_err(CliError::Core)?, Some(chain))
            }
            Some(_) => {
                return Err(field(
                    "potential",
                    "exactly one of log_values and q_matrix is required",
                ))
            }
        };
        Ok(Problem {
            base,
            potential,
            exact,
            digest,
        })
    }

    pub fn mode(&self) -> &'static str {
        if self.exact.is_some() {
            "exact"
        } else {
            "numerical"
        }
    }

    /// The Gibbs chain with the Perron data of the weight matrix.
    pub fn chain(&self) -> Result<(GibbsChain, PerronData), CliError> {
        let (normalized, perron) = normalize(&self.potential)?;
        let chain = match &self.exact {
            Some(exact) => exact.to_chain()?,
            None => normalized,
        };
        Ok((chain, perron))
    }
}

fn field(path: &str, msg: impl fmt::Display) -> CliError {
    CliError::Input(format!("{path}: {msg}"))
}

fn matrix(spec: &MatrixSpec) -> Result<TransitionMatrix, CliError> {
    let n = spec.n;
    if spec.rows.len() != n {
        return Err(field(
            "matrix.rows",
            format!("expected {n} rows, found {}", spec.rows.len()),
        ));
    }
    for (i, row) in spec.rows.iter().enumerate() {
        if row.len() != n {
            return Err(field(
                &format!("matrix.rows[{i}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        if let Some(j) = row.iter().position(|&x| x > 1) {
            return Err(field(
                &format!("matrix.rows[{i}][{j}]"),
                "entries must be 0 or 1",
            ));
        }
    }
    TransitionMatrix::primitive(&spec.rows).map_err(|e| field("matrix", e))
}

/// Checks that `values` has the shape of the matrix and that entries are
/// present exactly on the edges.
fn check_alignment<T>(
    base: &TransitionMatrix,
    name: &str,
    values: &[Vec<Option<T>>],
) -> Result<(), CliError> {
    let n = base.size();
    if values.len() != n {
        return Err(field(
            name,
            format!("expected {n} rows, found {}", values.len()),
        ));
    }
    for (i, row) in values.iter().enumerate() {
        if row.len() != n {
            return Err(field(
                &format!("{name}[{i}]"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        for (j, v) in row.iter().enumerate() {
            let edge = Word(vec![i, j]);
            match (v.is_some(), base.edge(i, j)) {
                (false, true) => {
                    return Err(field(
                        &format!("{name}[{i}][{j}]"),
                        format!("missing value on edge {edge}"),
                    ))
                }
                (true, false) => {
                    return Err(field(
                        &format!("{name}[{i}][{j}]"),
                        format!("value on forbidden transition {edge} (use null)"),
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn log_values(
    base: &TransitionMatrix,
    values: Vec<Vec<Option<f64>>>,
) -> Result<Potential, CliError> {
    let name = "potential.log_values";
    check_alignment(base, name, &values)?;
    Potential::new(base.clone(), values).map_err(|e| field(name, e))
}

fn q_matrix(
    base: &TransitionMatrix,
    q: Vec<Vec<Option<RationalEntry>>>,
) -> Result<RationalChain, CliError> {
    let name = "potential.q_matrix";
    check_alignment(base, name, &q)?;
    let mut parsed = Vec::with_capacity(q.len());
    for (i, row) in q.into_iter().enumerate() {
        let mut out = Vec::with_capacity(row.len());
        for (j, v) in row.into_iter().enumerate() {
            out.push(match v {
                None => None,
                Some(v) => Some(parse_rational(&v.to_string()).map_err(|_| {
                    field(
                        &format!("{name}[{i}][{j}]"),
                        format!("{v:?} is not a rational like \"3/10\""),
                    )
                })?),
            });
        }
        parsed.push(out);
    }
    RationalChain::new(base.clone(), parsed).map_err(|e| field(name, e))
}
