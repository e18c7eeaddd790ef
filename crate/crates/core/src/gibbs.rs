//! Perron eigendata, stochasticization of 2-locally constant potentials and
//! exact cylinder measures of the resulting Gibbs measures.
//!
//! A potential `f` depending on the first two symbols is a real value per
//! edge `ij` of `A`. Its weight matrix is `A(f)_ij = exp(f_ij)` on edges.
//! With Perron root `lambda` and left eigenvector `p` of `A(f)`, the
//! normalized potential is
//!
//! ```text
//! fhat_ij = f_ij + log(p_i / (lambda * p_j))
//! ```
//!
//! and `Q(f)_ij = exp(fhat_ij)` is column stochastic. The Gibbs measure of
//! `f` is the Markov measure with stationary vector `pi` (`Q pi = pi`), and
//! a cylinder `[w_0 ... w_{n-1}]` has mass `pi_{w_{n-1}} * prod_k Q_{w_k w_{k+1}}`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::shift::{TransitionMatrix, Word};

/// Relative change between successive iterates at which power iteration stops.
pub const PERRON_TOLERANCE: f64 = 1e-14;
pub const PERRON_MAX_ITERATIONS: usize = 1_000_000;
/// Power-iteration tolerance before switching to inverse iteration.
const COARSE_TOLERANCE: f64 = 1e-9;
/// Inverse iteration stops here; rounding in the near-singular solves sets a
/// floor near this level, and the final power steps take it the rest of the way.
const REFINE_TOLERANCE: f64 = 1e-12;
const REFINE_STEPS: usize = 100;
const WARMUP_STEPS: usize = 64;
const STALL_STEPS: usize = 200;
const STALL_LIMIT: f64 = 1e-12;
/// Column sums of a stochastic matrix must be within this of 1.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-12;
/// Relative tolerance for comparing cycle sums of normalized potentials.
pub const COHOMOLOGY_TOLERANCE: f64 = 1e-10;

/// A 2-locally constant potential: one real value per edge of the base matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    base: TransitionMatrix,
    values: Vec<Option<f64>>,
}

impl Potential {
    /// `values[i][j]` must be `Some` exactly on the edges of `base` and finite.
    pub fn new(base: TransitionMatrix, values: Vec<Vec<Option<f64>>>) -> Result<Self> {
        let n = base.size();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPotential(format!("values must be {n} x {n}")));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in values.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                match (base.edge(i, j), v) {
                    (true, Some(x)) if x.is_finite() => flat.push(Some(x)),
                    (true, Some(x)) => {
                        return Err(Error::InvalidPotential(format!(
                            "value {x} on edge {} is not finite",
                            Word(vec![i, j])
                        )))
                    }
                    (true, None) => {
                        return Err(Error::InvalidPotential(format!(
                            "missing value on edge {}",
                            Word(vec![i, j])
                        )))
                    }
                    (false, Some(_)) => {
                        return Err(Error::InvalidPotential(format!(
                            "value given on forbidden transition {}",
                            Word(vec![i, j])
                        )))
                    }
                    (false, None) => flat.push(None),
                }
            }
        }
        Ok(Potential { base, values: flat })
    }

    /// Evaluates `f` on every edge of `base`.
    pub fn from_fn(base: TransitionMatrix, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = base.size();
        let values = (0..n)
            .map(|i| (0..n).map(|j| base.edge(i, j).then(|| f(i, j))).collect())
            .collect();
        Potential::new(base, values)
    }

    pub fn zero(base: TransitionMatrix) -> Self {
        Potential::from_fn(base, |_, _| 0.0).expect("zero potential is valid")
    }

    /// The potential `log Q_ij` of a stochastic matrix on the edges of `base`.
    pub fn from_stochastic(base: TransitionMatrix, q: &Matrix) -> Result<Self> {
        if q.size() != base.size() {
            return Err(Error::InvalidPotential("size mismatch".into()));
        }
        Potential::from_fn(base, |i, j| q[(i, j)].ln())
    }

    pub fn base(&self) -> &TransitionMatrix {
        &self.base
    }

    pub fn value(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i * self.base.size() + j]
    }

    pub fn values(&self) -> Vec<Vec<Option<f64>>> {
        self.values
            .chunks(self.base.size())
            .map(<[Option<f64>]>::to_vec)
            .collect()
    }

    /// `A(f)`: `exp(f_ij)` on edges, zero elsewhere.
    pub fn weight_matrix(&self) -> Matrix {
        Matrix::from_fn(self.base.size(), |i, j| {
            self.value(i, j).map_or(0.0, f64::exp)
        })
    }

    /// Adds `phi(j) - phi(i) + c` on every edge `ij`: the 2-locally constant
    /// form of `phi o sigma - phi + c` for a 1-locally constant `phi`.
    pub fn add_coboundary(&self, phi: &[f64], c: f64) -> Potential {
        assert_eq!(phi.len(), self.base.size());
        Potential::from_fn(self.base.clone(), |i, j| {
            self.value(i, j).expect("edge") + phi[j] - phi[i] + c
        })
        .expect("finite shift of a valid potential")
    }

    /// Relabels symbols: the result has value `f_ij` on edge `perm[i] perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Potential> {
        let n = self.base.size();
        let mut rows = vec![vec![0u8; n]; n];
        let mut values = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if self.base.edge(i, j) {
                    rows[perm[i]][perm[j]] = 1;
                    values[perm[i]][perm[j]] = self.value(i, j);
                }
            }
        }
        Potential::new(TransitionMatrix::from_rows(&rows)?, values)
    }
}

/// Perron root with positive left and right eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronData {
    pub lambda: f64,
    /// Left eigenvector, `sum p_i = 1`.
    pub p: Vec<f64>,
    /// Right eigenvector, scaled so that `p . v = 1`.
    pub v: Vec<f64>,
}

impl PerronData {
    /// `(||pM - lambda p||_inf, ||Mv - lambda v||_inf)`.
    pub fn residuals(&self, m: &Matrix) -> (f64, f64) {
        let left = m
            .vec_mul(&self.p)
            .iter()
            .zip(&self.p)
            .map(|(x, p)| (x - self.lambda * p).abs())
            .fold(0.0, f64::max);
        let right = m
            .mul_vec(&self.v)
            .iter()
            .zip(&self.v)
            .map(|(x, v)| (x - self.lambda * v).abs())
            .fold(0.0, f64::max);
        (left, right)
    }
}

/// One step of power iteration on `M + shift I`, normalized to sum one.
/// Returns the eigenvalue estimate for `M` and the new iterate.
fn power_step(m: &Matrix, x: &[f64], shift: f64) -> Result<(f64, Vec<f64>)> {
    let y: Vec<f64> = m
        .mul_vec(x)
        .iter()
        .zip(x)
        .map(|(a, b)| a + shift * b)
        .collect();
    let sum: f64 = y.iter().sum();
    if !(sum > 0.0 && sum.is_finite()) {
        return Err(Error::Numerical(format!(
            "iterate sum {sum} is not positive"
        )));
    }
    Ok((sum - shift, y.into_iter().map(|v| v / sum).collect()))
}

fn relative_change(x: &[f64], y: &[f64]) -> f64 {
    let scale = y.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    let diff = x
        .iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    diff / scale
}

/// Inverse iteration with the fixed shift `sigma` near `lambda`. When power
/// iteration alone would stall above the tolerance (small spectral gap,
/// rounding noise), a few solves reach it.
fn refine(m: &Matrix, sigma: f64, mut x: Vec<f64>) -> Result<Vec<f64>> {
    let n = m.size();
    let mut sigma = sigma;
    let mut shifted = Matrix::from_fn(n, |i, j| m[(i, j)] - if i == j { sigma } else { 0.0 });
    let mut previous = f64::INFINITY;
    for _ in 0..REFINE_STEPS {
        let y = match shifted.solve(&x) {
            Some(y) => y,
            None => {
                // sigma is an exact eigenvalue in floating point; nudge it.
                sigma *= 1.0 + 1e-12;
                shifted = Matrix::from_fn(n, |i, j| m[(i, j)] - if i == j { sigma } else { 0.0 });
                continue;
            }
        };
        let sum: f64 = y.iter().sum();
        if !(sum != 0.0 && sum.is_finite()) {
            return Err(Error::Numerical("inverse iteration broke down".into()));
        }
        let y: Vec<f64> = y.into_iter().map(|v| v / sum).collect();
        let change = relative_change(&x, &y);
        x = y;
        // Stop once converged or once rounding noise stops the progress.
        if change <= REFINE_TOLERANCE || change > 0.5 * previous {
            break;
        }
        previous = change;
    }
    Ok(x)
}

fn perron_vector(m: &Matrix) -> Result<(f64, Vec<f64>)> {
    let n = m.size();
    let mut x = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..WARMUP_STEPS {
        (lambda, x) = power_step(m, &x, 0.0)?;
    }
    // Shifting by roughly lambda damps eigenvalues of modulus near lambda
    // (other than lambda itself) while leaving the Perron vector unchanged.
    let shift = lambda;
    let mut converged = false;
    for _ in 0..PERRON_MAX_ITERATIONS {
        let (l, y) = power_step(m, &x, shift)?;
        let change = relative_change(&x, &y);
        (lambda, x) = (l, y);
        if change <= COARSE_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: PERRON_MAX_ITERATIONS,
        });
    }
    x = refine(m, lambda, x)?;
    // Inverse iteration is accurate relative to the largest entry only, so
    // entries many orders of magnitude smaller may carry the wrong sign.
    // Power steps on nonnegative input restore them componentwise.
    x.iter_mut().for_each(|v| *v = v.abs());
    let shift = lambda;
    let mut best = f64::INFINITY;
    let mut best_step = 0;
    for step in 0..PERRON_MAX_ITERATIONS {
        let (_, y) = power_step(m, &x, shift)?;
        let change = relative_change(&x, &y);
        x = y;
        if change < best {
            best = change;
            best_step = step;
        }
        // With a small spectral gap, rounding noise can keep the change just
        // above the tolerance; a long stall at that level means the iterate
        // is as accurate as double precision allows.
        let stalled = step - best_step >= STALL_STEPS && best <= STALL_LIMIT;
        if step + 1 >= n && (change <= PERRON_TOLERANCE || stalled) {
            // x sums to one.
            let lambda = m.mul_vec(&x).iter().sum();
            return Ok((lambda, x));
        }
    }
    Err(Error::NonConvergence {
        iterations: PERRON_MAX_ITERATIONS,
    })
}

/// Perron eigendata of a nonnegative matrix whose pattern is primitive.
///
/// Deterministic power iteration from the uniform vector, finished
/// by inverse iteration, separately for `M` and its transpose.
pub fn perron(m: &Matrix) -> Result<PerronData> {
    let n = m.size();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if m.rows()
        .iter()
        .flatten()
        .any(|&x| !(x >= 0.0 && x.is_finite()))
    {
        return Err(Error::InvalidArgument(
            "matrix entries must be finite and nonnegative".into(),
        ));
    }
    let (lambda, p) = perron_vector(&m.transpose())?;
    let (_, v) = perron_vector(m)?;
    if p.iter().chain(&v).any(|&x| x <= 0.0) {
        return Err(Error::Numerical("Perron vector is not positive".into()));
    }
    let dot: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
    let v = v.into_iter().map(|x| x / dot).collect();
    Ok(PerronData { lambda, p, v })
}

/// A Gibbs measure for a 2-locally constant potential, represented by the
/// column-stochastic matrix `Q` and its stationary vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsChain {
    base: TransitionMatrix,
    q: Matrix,
    pi: Vec<f64>,
}

impl GibbsChain {
    /// Wraps a column-stochastic matrix supported exactly on the edges of a
    /// primitive `base`.
    pub fn from_stochastic(base: TransitionMatrix, q: Matrix) -> Result<Self> {
        let n = base.size();
        if q.size() != n {
            return Err(Error::NotStochastic(format!("expected a {n} x {n} matrix")));
        }
        if !base.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        for i in 0..n {
            for j in 0..n {
                let x = q[(i, j)];
                let ok = if base.edge(i, j) {
                    x > 0.0 && x <= 1.0
                } else {
                    x == 0.0
                };
                if !ok {
                    return Err(Error::NotStochastic(format!(
                        "entry {} = {x} does not match the transition pattern",
                        Word(vec![i, j])
                    )));
                }
            }
        }
        for (j, s) in q.column_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(Error::NotStochastic(format!(
                    "column {} sums to {s}",
                    j + 1
                )));
            }
        }
        let pd = perron(&q)?;
        let pi = stationary_from(&pd);
        Ok(GibbsChain { base, q, pi })
    }

    pub fn base(&self) -> &TransitionMatrix {
        &self.base
    }

    pub fn size(&self) -> usize {
        self.base.size()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// `fhat_ij = log Q_ij` on edges.
    pub fn fhat(&self, i: usize, j: usize) -> Option<f64> {
        self.base.edge(i, j).then(|| self.q[(i, j)].ln())
    }

    /// The normalized potential as a [`Potential`].
    pub fn normalized_potential(&self) -> Potential {
        Potential::from_stochastic(self.base.clone(), &self.q).expect("Q is positive on edges")
    }

    /// `Q` entries on `E0`, in the order of [`crate::shift::ShiftStructure::e0`].
    pub fn e0_values(&self) -> Vec<((usize, usize), f64)> {
        self.base
            .structure()
            .e0
            .into_iter()
            .map(|(i, j)| ((i, j), self.q[(i, j)]))
            .collect()
    }

    /// `mu([w]) = pi_{last} * prod Q_{w_k w_{k+1}}`; 1 for the empty word and
    /// 0 for a non-admissible word.
    pub fn cylinder_measure(&self, w: &Word) -> f64 {
        let Some(last) = w.last() else {
            return 1.0;
        };
        if !self.base.is_admissible(w) {
            return 0.0;
        }
        w.edges()
            .fold(self.pi[last], |acc, (i, j)| acc * self.q[(i, j)])
    }

    /// Kolmogorov-Sinai entropy `-sum_{ij} pi_j Q_ij log Q_ij`.
    pub fn ks_entropy(&self) -> f64 {
        -self
            .base
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let q = self.q[(i, j)];
                self.pi[j] * q * q.ln()
            })
            .sum::<f64>()
    }

    /// Sum of `fhat` over the edges of an admissible cycle.
    pub fn cycle_sum(&self, c: &Word) -> Result<f64> {
        if !c.is_cycle() {
            return Err(Error::NotACycle(c.clone()));
        }
        if !self.base.is_admissible(c) {
            return Err(Error::NotAdmissible(c.clone()));
        }
        Ok(c.edges().map(|(i, j)| self.q[(i, j)].ln()).sum())
    }

    /// Extrema of `mu([w]) / exp(-|w| P + S f(w))` over admissible words with
    /// `1 <= |w| <= max_len`.
    ///
    /// Computed by a min/max dynamic program over the last symbol rather than
    /// by enumerating words; the logarithm of the ratio is
    /// `log pi_last + |w| P + sum_edges (log Q - f)` minus the continuation
    /// term when [`Continuation::Extremal`] is used.
    pub fn gibbs_ratio(
        &self,
        f: &Potential,
        pressure: f64,
        max_len: usize,
        continuation: Continuation,
    ) -> Result<GibbsRatio> {
        if f.base() != &self.base {
            return Err(Error::BaseMismatch);
        }
        if max_len == 0 {
            return Err(Error::InvalidArgument("max_len must be positive".into()));
        }
        let n = self.size();
        // Extra log factor contributed by the continuation edge out of `last`.
        let tail: Vec<(f64, f64)> = (0..n)
            .map(|i| match continuation {
                Continuation::OwnEdges => (0.0, 0.0),
                Continuation::Extremal => {
                    let vals = self
                        .base
                        .successors(i)
                        .map(|j| f.value(i, j).expect("edge"));
                    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                        (lo.min(x), hi.max(x))
                    });
                    (-hi, -lo)
                }
            })
            .collect();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        for len in 1..=max_len {
            if len > 1 {
                let mut nlo = vec![f64::INFINITY; n];
                let mut nhi = vec![f64::NEG_INFINITY; n];
                for (i, j) in self.base.edges() {
                    let step = self.q[(i, j)].ln() - f.value(i, j).expect("edge");
                    nlo[j] = nlo[j].min(lo[i] + step);
                    nhi[j] = nhi[j].max(hi[i] + step);
                }
                lo = nlo;
                hi = nhi;
            }
            for last in 0..n {
                let base = self.pi[last].ln() + len as f64 * pressure;
                inf = inf.min(base + lo[last] + tail[last].0);
                sup = sup.max(base + hi[last] + tail[last].1);
            }
        }
        Ok(GibbsRatio {
            inf: inf.exp(),
            sup: sup.exp(),
        })
    }
}

fn stationary_from(pd: &PerronData) -> Vec<f64> {
    // For a column-stochastic Q the left vector is uniform, so pi is the
    // right vector renormalized to a probability vector.
    let sum: f64 = pd.v.iter().sum();
    pd.v.iter().map(|x| x / sum).collect()
}

/// How the last symbol of a word contributes to the Birkhoff sum in
/// [`GibbsChain::gibbs_ratio`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Continuation {
    /// Only the `|w| - 1` edges inside the word are summed.
    #[default]
    OwnEdges,
    /// The edge to the next symbol is included, taking its minimal and
    /// maximal value over admissible continuations.
    Extremal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsRatio {
    pub inf: f64,
    pub sup: f64,
}

/// Stochasticization of `f`: returns the Gibbs chain with
/// `Q_ij = A(f)_ij p_i / (lambda p_j)` and the Perron data of `A(f)`.
pub fn normalize(f: &Potential) -> Result<(GibbsChain, PerronData)> {
    let base = f.base().clone();
    if !base.is_primitive() {
        return Err(Error::NotPrimitive);
    }
    let m = f.weight_matrix();
    if let Some((i, j)) = base
        .edges()
        .into_iter()
        .find(|&(i, j)| !(m[(i, j)] > 0.0 && m[(i, j)].is_finite()))
    {
        return Err(Error::Numerical(format!(
            "exp(f) is out of range on edge {}",
            Word(vec![i, j])
        )));
    }
    let pd = perron(&m)?;
    let n = base.size();
    let mut q = Matrix::from_fn(n, |i, j| m[(i, j)] * pd.p[i] / (pd.lambda * pd.p[j]));
    // Project away the solver residual; exact Q has unit column sums.
    for (j, s) in q.column_sums().into_iter().enumerate() {
        for i in 0..n {
            q[(i, j)] /= s;
        }
    }
    // pi is proportional to p o v, the right Perron vector of Q.
    let pi_raw: Vec<f64> = pd.p.iter().zip(&pd.v).map(|(a, b)| a * b).collect();
    let sum: f64 = pi_raw.iter().sum();
    let pi = pi_raw.into_iter().map(|x| x / sum).collect();
    Ok((GibbsChain { base, q, pi }, pd))
}

/// Outcome of [`cohomologous_with_constant`].
#[derive(Debug, Clone, PartialEq)]
pub struct CohomologyCheck {
    pub cohomologous: bool,
    /// First simple cycle (in canonical order) whose sums differ.
    pub witness: Option<Word>,
    pub max_deviation: f64,
}

/// Decides whether `f - g` is a coboundary plus a constant by comparing the
/// normalized potentials on every simple cycle.
pub fn cohomologous_with_constant(f: &Potential, g: &Potential) -> Result<CohomologyCheck> {
    if f.base() != g.base() {
        return Err(Error::BaseMismatch);
    }
    let (cf, _) = normalize(f)?;
    let (cg, _) = normalize(g)?;
    compare_cycle_sums(&cf, &cg)
}

/// Cycle-sum comparison of two chains over the same base.
pub fn compare_cycle_sums(cf: &GibbsChain, cg: &GibbsChain) -> Result<CohomologyCheck> {
    if cf.base() != cg.base() {
        return Err(Error::BaseMismatch);
    }
    let mut witness = None;
    let mut max_deviation: f64 = 0.0;
    for c in cf.base().simple_cycles().iter() {
        let (a, b) = (cf.cycle_sum(c)?, cg.cycle_sum(c)?);
        let dev = (a - b).abs();
        max_deviation = max_deviation.max(dev);
        if dev > COHOMOLOGY_TOLERANCE * a.abs().max(b.abs()).max(1.0) && witness.is_none() {
            witness = Some(c.clone());
        }
    }
    Ok(CohomologyCheck {
        cohomologous: witness.is_none(),
        witness,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Q(f) over the four-symbol example with column 2 = (a1, a2, a3) at rows
    /// (1, 3, 4) and column 4 = (b1, b2) at rows (1, 2).
    fn example_q() -> Matrix {
        Matrix::from_rows(&[
            vec![0.0, 0.2, 1.0, 0.4],
            vec![1.0, 0.0, 0.0, 0.6],
            vec![0.0, 0.3, 0.0, 0.0],
            vec![0.0, 0.5, 0.0, 0.0],
        ])
    }

    fn example_chain() -> GibbsChain {
        let a = TransitionMatrix::snr_example();
        normalize(&Potential::from_stochastic(a, &example_q()).unwrap())
            .unwrap()
            .0
    }

    #[test]
    fn weight_matrix_cases() {
        let a = TransitionMatrix::snr_example();
        let m = Potential::zero(a.clone()).weight_matrix();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m[(i, j)], f64::from(u8::from(a.edge(i, j))));
            }
        }
        let f = Potential::from_stochastic(a, &example_q()).unwrap();
        assert!(f.weight_matrix().max_abs_diff(&example_q()) < 1e-15);
        let half = Potential::from_fn(TransitionMatrix::full_shift(2), |_, _| 0.5f64.ln()).unwrap();
        assert!(half
            .weight_matrix()
            .rows()
            .iter()
            .flatten()
            .all(|&x| close(x, 0.5, 1e-15)));
    }

    #[test]
    fn potential_validation() {
        let a = TransitionMatrix::golden_mean();
        assert!(Potential::new(
            a.clone(),
            vec![vec![Some(0.0), Some(0.0)], vec![Some(0.0), Some(0.0)]]
        )
        .is_err());
        assert!(Potential::new(
            a.clone(),
            vec![vec![None, None], vec![Some(0.0), Some(0.0)]]
        )
        .is_err());
        assert!(Potential::new(
            a.clone(),
            vec![vec![None, Some(f64::NAN)], vec![Some(0.0), Some(0.0)]]
        )
        .is_err());
        assert!(Potential::new(a, vec![vec![None, Some(1.0)], vec![Some(0.0), Some(0.0)]]).is_ok());
    }

    #[test]
    fn perron_full_shift() {
        let pd = perron(&Potential::zero(TransitionMatrix::full_shift(2)).weight_matrix()).unwrap();
        assert!(close(pd.lambda, 2.0, 1e-14));
        assert!(close(pd.p[0], 0.5, 1e-15) && close(pd.p[1], 0.5, 1e-15));
        let dot: f64 = pd.p.iter().zip(&pd.v).map(|(a, b)| a * b).sum();
        assert!(close(dot, 1.0, 1e-15));
    }

    #[test]
    fn perron_of_stochastic_is_one() {
        let pd = perron(&example_q()).unwrap();
        assert!(close(pd.lambda, 1.0, 1e-12));
        let (l, r) = pd.residuals(&example_q());
        assert!(l <= 1e-12 && r <= 1e-12);
    }

    #[test]
    fn perron_rejects_negative_entries() {
        let m = Matrix::from_rows(&[vec![1.0, -1.0], vec![1.0, 1.0]]);
        assert!(matches!(perron(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn normalize_uniform_full_shift() {
        let (chain, pd) = normalize(&Potential::zero(TransitionMatrix::full_shift(2))).unwrap();
        assert!(close(pd.lambda, 2.0, 1e-14));
        assert!(chain
            .q()
            .rows()
            .iter()
            .flatten()
            .all(|&x| close(x, 0.5, 1e-15)));
        assert!(close(chain.pi()[0], 0.5, 1e-15));
    }

    #[test]
    fn normalize_stochastic_example() {
        let chain = example_chain();
        assert!(chain.q().max_abs_diff(&example_q()) < 1e-12);
        let expected = [0.28, 0.4, 0.12, 0.2];
        for (p, e) in chain.pi().iter().zip(expected) {
            assert!(close(*p, e, 1e-12), "{p} vs {e}");
        }
    }

    #[test]
    fn normalize_ignores_constants() {
        let a = TransitionMatrix::snr_example();
        let f = Potential::from_fn(a, |i, j| (i as f64 * 0.7 - j as f64 * 0.3).sin()).unwrap();
        let g = f.add_coboundary(&[0.0; 4], 2.5);
        let (cf, pf) = normalize(&f).unwrap();
        let (cg, pg) = normalize(&g).unwrap();
        assert!(cf.q().max_abs_diff(cg.q()) < 1e-12);
        assert!(close(
            pg.lambda,
            pf.lambda * 2.5f64.exp(),
            1e-10 * pg.lambda
        ));
    }

    #[test]
    fn normalize_is_idempotent() {
        let a = TransitionMatrix::snr_example();
        let f = Potential::from_fn(a, |i, j| (i + 2 * j) as f64 * 0.1).unwrap();
        let (c1, _) = normalize(&f).unwrap();
        let (c2, pd) = normalize(&c1.normalized_potential()).unwrap();
        assert!(c1.q().max_abs_diff(c2.q()) < 1e-12);
        assert!(close(pd.lambda, 1.0, 1e-12));
        assert!(pd.p.iter().all(|&x| close(x, 0.25, 1e-12)));
    }

    #[test]
    fn normalize_rejects_non_primitive() {
        let swap = TransitionMatrix::from_rows(&[[0u8, 1], [1, 0]]).unwrap();
        assert_eq!(
            normalize(&Potential::zero(swap)).unwrap_err(),
            Error::NotPrimitive
        );
    }

    #[test]
    fn normalize_reports_weight_overflow() {
        let a = TransitionMatrix::full_shift(2);
        for big in [800.0, -800.0] {
            let f = Potential::from_fn(a.clone(), |i, j| if i == j { big } else { 0.0 }).unwrap();
            let err = normalize(&f).unwrap_err();
            assert_eq!(err.kind(), crate::ErrorKind::Numerical, "{err}");
        }
    }

    #[test]
    fn stochastic_constructor_rejects_deterministic_chain() {
        let swap = TransitionMatrix::from_rows(&[[0u8, 1], [1, 0]]).unwrap();
        let q = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(
            GibbsChain::from_stochastic(swap, q),
            Err(Error::NotPrimitive)
        );
        let a = TransitionMatrix::full_shift(2);
        let q = Matrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.6]]);
        assert!(matches!(
            GibbsChain::from_stochastic(a, q),
            Err(Error::NotStochastic(_))
        ));
    }

    #[test]
    fn cylinder_measures() {
        let (uniform, _) = normalize(&Potential::zero(TransitionMatrix::full_shift(2))).unwrap();
        assert!(close(
            uniform.cylinder_measure(&"12".parse().unwrap()),
            0.25,
            1e-15
        ));
        assert_eq!(uniform.cylinder_measure(&Word::empty()), 1.0);

        let chain = example_chain();
        assert!(close(
            chain.cylinder_measure(&"132".parse().unwrap()),
            0.12,
            1e-12
        ));
        assert_eq!(chain.cylinder_measure(&"11".parse().unwrap()), 0.0);
        assert_eq!(chain.cylinder_measure(&Word::empty()), 1.0);
    }

    #[test]
    fn entropy_values() {
        let (uniform, _) = normalize(&Potential::zero(TransitionMatrix::full_shift(2))).unwrap();
        assert!(close(uniform.ks_entropy(), LN2, 1e-14));

        let chain = example_chain();
        let l = |x: f64| x * x.ln();
        let expected = -0.4 * (l(0.2) + l(0.3) + l(0.5)) - 0.2 * (l(0.4) + l(0.6));
        assert!(close(chain.ks_entropy(), expected, 1e-12));
    }

    #[test]
    fn cycle_sums() {
        let chain = example_chain();
        let s = chain.cycle_sum(&"1321".parse().unwrap()).unwrap();
        assert!(close(s, 0.3f64.ln(), 1e-12));
        assert!(matches!(
            chain.cycle_sum(&"132".parse().unwrap()),
            Err(Error::NotACycle(_))
        ));
        assert!(matches!(
            chain.cycle_sum(&"1331".parse().unwrap()),
            Err(Error::NotAdmissible(_))
        ));
        // Golden mean: 121 uses the edge 21 with Q = 1 and 12 with Q = 1.
        let (gm, _) = normalize(
            &Potential::from_fn(TransitionMatrix::golden_mean(), |i, j| (i + j) as f64).unwrap(),
        )
        .unwrap();
        assert!(close(
            gm.cycle_sum(&"1.2.1".parse().unwrap()).unwrap(),
            gm.q()[(0, 1)].ln(),
            1e-15
        ));
        assert!(close(gm.q()[(1, 0)], 1.0, 1e-15));
    }

    #[test]
    fn gibbs_ratio_uniform_is_one() {
        let a = TransitionMatrix::full_shift(2);
        let f = Potential::zero(a);
        let (chain, pd) = normalize(&f).unwrap();
        for max_len in [1, 4, 9] {
            for cont in [Continuation::OwnEdges, Continuation::Extremal] {
                let r = chain
                    .gibbs_ratio(&f, pd.lambda.ln(), max_len, cont)
                    .unwrap();
                assert!(close(r.inf, 1.0, 1e-12) && close(r.sup, 1.0, 1e-12));
            }
        }
    }

    #[test]
    fn gibbs_ratio_normalized_example() {
        let chain = example_chain();
        let f = chain.normalized_potential();
        let r = chain
            .gibbs_ratio(&f, 0.0, 10, Continuation::OwnEdges)
            .unwrap();
        assert!(close(r.inf, 0.12, 1e-12) && close(r.sup, 0.4, 1e-12));
        let r = chain
            .gibbs_ratio(&f, 0.0, 10, Continuation::Extremal)
            .unwrap();
        let pi = chain.pi();
        let min_pi = pi.iter().copied().fold(f64::INFINITY, f64::min);
        let max_pi = pi.iter().copied().fold(0.0, f64::max);
        assert!(r.inf >= min_pi * 0.2 - 1e-12 && r.sup <= max_pi / 0.2 + 1e-12);
    }

    #[test]
    fn cohomology_basic() {
        let a = TransitionMatrix::snr_example();
        let f = Potential::from_fn(a.clone(), |i, j| (i * 3 + j) as f64 * 0.17).unwrap();
        let check = cohomologous_with_constant(&f, &f).unwrap();
        assert!(check.cohomologous && check.witness.is_none());
        let g = f.add_coboundary(&[0.3, -1.2, 0.8, 2.0], -0.4);
        assert!(cohomologous_with_constant(&f, &g).unwrap().cohomologous);
        let other = Potential::zero(TransitionMatrix::full_shift(4));
        assert_eq!(
            cohomologous_with_constant(&f, &other),
            Err(Error::BaseMismatch)
        );
    }
}
