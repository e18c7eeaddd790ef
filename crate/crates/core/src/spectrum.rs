//! Pressure function and entropy spectrum of a Gibbs chain.
//!
//! For a chain with matrix `Q`, the family `(Q_q)_ij = A_ij Q_ij^q` has
//! Perron root `lambda(q)` and `beta(q) = log lambda(q)` is convex with
//! `beta(1) = 0` and `beta(0) = log lambda_A`. The entropy spectrum is the
//! Legendre transform of `beta`:
//!
//! ```text
//! alpha(q) = -beta'(q),   E(alpha(q)) = beta(q) + q * alpha(q)
//! ```

use crate::charpoly::trace_powers;
use crate::error::{Error, Result};
use crate::gibbs::{perron, GibbsChain};
use crate::matrix::Matrix;

/// Slack allowed on the curve invariants (entropy range, monotone alpha).
pub const CURVE_TOLERANCE: f64 = 1e-9;
/// Relative tolerance for characteristic polynomial comparisons.
pub const CHAR_POLY_TOLERANCE: f64 = 1e-10;

/// `(Q_q)_ij = A_ij Q_ij^q`; in particular `Q_0 = A`.
pub fn q_power(chain: &GibbsChain, q: f64) -> Matrix {
    let a = chain.base();
    Matrix::from_fn(chain.size(), |i, j| {
        if a.edge(i, j) {
            chain.q()[(i, j)].powf(q)
        } else {
            0.0
        }
    })
}

/// `beta(q) = log` of the Perron root of `Q_q`.
pub fn pressure(chain: &GibbsChain, q: f64) -> Result<f64> {
    Ok(perron(&q_power(chain, q))?.lambda.ln())
}

/// `beta'(q)` by first-order eigenvalue perturbation:
/// `lambda'(q) = p (Q_q o log Q) v / (p . v)`.
pub fn pressure_derivative(chain: &GibbsChain, q: f64) -> Result<f64> {
    Ok(pressure_and_derivative(chain, q)?.1)
}

fn pressure_and_derivative(chain: &GibbsChain, q: f64) -> Result<(f64, f64)> {
    let mq = q_power(chain, q);
    let pd = perron(&mq)?;
    let n = chain.size();
    let dm = Matrix::from_fn(n, |i, j| {
        if chain.base().edge(i, j) {
            mq[(i, j)] * chain.q()[(i, j)].ln()
        } else {
            0.0
        }
    });
    let num: f64 = dm
        .mul_vec(&pd.v)
        .iter()
        .zip(&pd.p)
        .map(|(a, b)| a * b)
        .sum();
    let den: f64 = pd.p.iter().zip(&pd.v).map(|(a, b)| a * b).sum();
    Ok((pd.lambda.ln(), num / (pd.lambda * den)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumPoint {
    pub q: f64,
    /// Local decay rate, nats per symbol.
    pub alpha: f64,
    /// Entropy of the level set, nats.
    pub entropy: f64,
}

pub fn spectrum_point(chain: &GibbsChain, q: f64) -> Result<SpectrumPoint> {
    let (beta, dbeta) = pressure_and_derivative(chain, q)?;
    let alpha = -dbeta;
    Ok(SpectrumPoint {
        q,
        alpha,
        entropy: beta + q * alpha,
    })
}

/// Entropy spectrum sampled at `steps` equally spaced values of `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCurve {
    pub samples: Vec<SpectrumPoint>,
}

impl SpectrumCurve {
    /// Sample whose `q` is nearest to `target`.
    pub fn nearest(&self, target: f64) -> &SpectrumPoint {
        self.samples
            .iter()
            .min_by(|a, b| (a.q - target).abs().total_cmp(&(b.q - target).abs()))
            .expect("curve has at least two samples")
    }

    /// `q,alpha,entropy` table with a header line; reals in 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,alpha,entropy\n");
        for s in &self.samples {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e}\n",
                s.q, s.alpha, s.entropy
            ));
        }
        out
    }
}

pub fn uniform_grid(q_min: f64, q_max: f64, steps: usize) -> Vec<f64> {
    let h = (q_max - q_min) / (steps - 1) as f64;
    (0..steps)
        .map(|k| {
            if k + 1 == steps {
                q_max
            } else {
                q_min + k as f64 * h
            }
        })
        .collect()
}

/// The default comparison grid `-3, -2.75, ..., 3`.
pub fn default_q_grid() -> Vec<f64> {
    uniform_grid(-3.0, 3.0, 25)
}

pub fn spectrum_curve(
    chain: &GibbsChain,
    q_min: f64,
    q_max: f64,
    steps: usize,
) -> Result<SpectrumCurve> {
    if !(q_min < q_max) || steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need q_min < q_max and steps >= 2 (got {q_min}, {q_max}, {steps})"
        )));
    }
    let samples = uniform_grid(q_min, q_max, steps)
        .into_iter()
        .map(|q| spectrum_point(chain, q))
        .collect::<Result<Vec<_>>>()?;
    let top = perron(&q_power(chain, 0.0))?.lambda.ln();
    for s in &samples {
        if s.entropy < -CURVE_TOLERANCE || s.entropy > top + CURVE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "entropy {} at q = {} outside [0, {top}]",
                s.entropy, s.q
            )));
        }
    }
    for w in samples.windows(2) {
        if w[1].alpha > w[0].alpha + CURVE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "alpha increases between q = {} and q = {}",
                w[0].q, w[1].q
            )));
        }
    }
    Ok(SpectrumCurve { samples })
}

/// Result of comparing two characteristic-polynomial families on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyComparison {
    pub equal: bool,
    /// Largest relative trace deviation seen.
    pub max_deviation: f64,
    /// Grid point where `max_deviation` occurred.
    pub worst_q: f64,
}

/// Compares `det(zI - Q1_q)` and `det(zI - Q2_q)` at every `q` in the grid
/// through the traces `Tr(Q_q^k)`, `k = 1..n`, which determine the
/// coefficients by Newton's identities. The traces are sums of nonnegative
/// closed-walk weights, so a relative comparison suffers no cancellation.
pub fn char_poly_family_equal(
    chain1: &GibbsChain,
    chain2: &GibbsChain,
    q_grid: &[f64],
    tol: f64,
) -> Result<FamilyComparison> {
    if chain1.size() != chain2.size() {
        return Err(Error::InvalidArgument(format!(
            "alphabet sizes differ ({} vs {})",
            chain1.size(),
            chain2.size()
        )));
    }
    let mut max_deviation: f64 = 0.0;
    let mut worst_q = q_grid.first().copied().unwrap_or(0.0);
    for &q in q_grid {
        let t1 = trace_powers(&q_power(chain1, q));
        let t2 = trace_powers(&q_power(chain2, q));
        for (a, b) in t1.iter().zip(&t2) {
            let scale = a.abs().max(b.abs());
            let dev = if scale > 0.0 {
                (a - b).abs() / scale
            } else {
                0.0
            };
            if dev > max_deviation {
                max_deviation = dev;
                worst_q = q;
            }
        }
    }
    Ok(FamilyComparison {
        equal: max_deviation <= tol,
        max_deviation,
        worst_q,
    })
}
