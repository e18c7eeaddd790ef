//! Characteristic polynomials, in floating point and in exact rational
//! arithmetic, plus the exact one-parameter family `q -> det(zI - Q_q)`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

use crate::matrix::Matrix;
use crate::shift::{TransitionMatrix, Word};

/// Coefficients of `det(zI - M)` by Faddeev-LeVerrier, highest degree first
/// (`out[0] = 1`, `out[k]` multiplies `z^(n-k)`).
pub fn faddeev_leverrier<T>(m: &[Vec<T>]) -> Vec<T>
where
    T: Num + Clone + FromPrimitive,
{
    let n = m.len();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(T::one());
    // acc = M_k, with M_0 = 0.
    let mut acc: Vec<Vec<T>> = vec![vec![T::zero(); n]; n];
    for k in 1..=n {
        let c_prev = coeffs[k - 1].clone();
        let mut next = matmul(m, &acc);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] = row[i].clone() + c_prev.clone();
        }
        let am = matmul(m, &next);
        let trace = (0..n).fold(T::zero(), |t, i| t + am[i][i].clone());
        let k_t = T::from_usize(k).expect("small integer");
        coeffs.push(T::zero() - trace / k_t);
        acc = next;
    }
    coeffs
}

fn matmul<T: Num + Clone>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(T::zero(), |s, k| s + a[i][k].clone() * b[k][j].clone()))
                .collect()
        })
        .collect()
}

/// Floating-point characteristic polynomial, highest degree first.
pub fn char_poly(m: &Matrix) -> Vec<f64> {
    faddeev_leverrier(&m.rows())
}

/// `[Tr(M), Tr(M^2), ..., Tr(M^n)]`.
pub fn trace_powers(m: &Matrix) -> Vec<f64> {
    let rows = m.rows();
    let mut power = rows.clone();
    let mut out = Vec::with_capacity(rows.len());
    for k in 0..rows.len() {
        if k > 0 {
            power = matmul(&power, &rows);
        }
        out.push((0..rows.len()).map(|i| power[i][i]).sum());
    }
    out
}

/// Exact characteristic polynomial of a rational matrix.
pub fn char_poly_exact(m: &[Vec<BigRational>]) -> Vec<BigRational> {
    faddeev_leverrier(m)
}

/// Evaluates a polynomial given highest-degree-first.
pub fn eval_poly(coeffs: &[f64], z: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * z + c)
}

/// Largest real root of a monic polynomial, found by bisection above the
/// Cauchy bound. Returns `None` when there is no real root.
pub fn largest_real_root(coeffs: &[f64]) -> Option<f64> {
    let bound = 1.0 + coeffs[1..].iter().fold(0.0, |m: f64, c| m.max(c.abs()));
    // Scan downwards for a sign change, then bisect.
    let steps = 20_000;
    let h = 2.0 * bound / steps as f64;
    let mut hi = bound;
    let mut f_hi = eval_poly(coeffs, hi);
    for s in 1..=steps {
        let lo = bound - s as f64 * h;
        let f_lo = eval_poly(coeffs, lo);
        if f_lo == 0.0 {
            return Some(lo);
        }
        if f_lo.signum() != f_hi.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = eval_poly(coeffs, mid);
                if fm == 0.0 {
                    return Some(mid);
                }
                if fm.signum() == f_lo.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Some(0.5 * (a + b));
        }
        hi = lo;
        f_hi = f_lo;
    }
    None
}

/// A finite sum `sum_r c_r * r^q` over distinct positive rational bases `r`
/// with nonzero integer coefficients `c_r`.
///
/// Functions `q -> r^q` for distinct positive `r` are linearly independent,
/// so two such sums agree for every real `q` iff their maps are equal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpSum {
    terms: BTreeMap<BigRational, BigInt>,
}

impl ExpSum {
    pub fn add_term(&mut self, base: BigRational, coeff: BigInt) {
        let entry = self.terms.entry(base.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&base);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact value at an integer exponent.
    pub fn eval_int(&self, q: i32) -> BigRational {
        self.terms.iter().fold(BigRational::zero(), |acc, (r, c)| {
            let p = if q >= 0 {
                num_traits::pow(r.clone(), q as usize)
            } else {
                num_traits::pow(r.recip(), q.unsigned_abs() as usize)
            };
            acc + p * BigRational::from_integer(c.clone())
        })
    }

    pub fn eval(&self, q: f64) -> f64 {
        self.terms
            .iter()
            .map(|(r, c)| to_f64(c) * ratio_to_f64(r).powf(q))
            .sum()
    }
}

fn to_f64(x: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
}

pub(crate) fn ratio_to_f64(x: &BigRational) -> f64 {
    let (n, d) = (to_f64(x.numer()), to_f64(x.denom()));
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN)
    }
}

/// The family `q -> det(zI - Q_q)` with `(Q_q)_ij = A_ij Q_ij^q`, as one
/// [`ExpSum`] per coefficient, highest degree first (the leading entry is
/// the constant 1).
///
/// Expanding the determinant over cycle covers, the coefficient of
/// `z^(n-k)` is `sum (-1)^{#cycles} prod_c w(c)^q` over collections of
/// vertex-disjoint simple cycles of total length `k`, where `w(c)` is the
/// product of `Q` over the edges of `c`.
pub fn char_poly_family_exact(
    base: &TransitionMatrix,
    q: &[Vec<Option<BigRational>>],
) -> Vec<ExpSum> {
    let n = base.size();
    let cycles = weighted_cycles(
        base,
        |i, j| q[i][j].clone().expect("Q defined on edges"),
        |a, b| a * b,
    );
    let mut family = vec![ExpSum::default(); n + 1];
    family[0].add_term(BigRational::one(), BigInt::one());
    let mut used = vec![false; n];
    let mut emit = |k: usize, negative: bool, w: &BigRational| {
        let sign = if negative {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        family[k].add_term(w.clone(), sign);
    };
    collect_covers(
        &cycles,
        &|a, b| a * b,
        0,
        &mut used,
        0,
        BigRational::one(),
        0,
        &mut emit,
    );
    family
}

/// Coefficients of `det(zI - M)` for a matrix supported on the edges of
/// `base`, highest degree first, by the same cycle-cover expansion.
///
/// Structurally zero coefficients come out as exact zeros, and when the
/// covers of each size share a sign there is no cancellation at all, which
/// Faddeev-LeVerrier cannot offer for badly scaled entries.
pub fn char_poly_cycle_covers(base: &TransitionMatrix, m: &Matrix) -> Vec<f64> {
    let n = base.size();
    let cycles = weighted_cycles(base, |i, j| m[(i, j)], |a, b| a * b);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut used = vec![false; n];
    let mut emit = |k: usize, negative: bool, w: &f64| {
        coeffs[k] += if negative { -w } else { *w };
    };
    collect_covers(&cycles, &|a, b| a * b, 0, &mut used, 0, 1.0, 0, &mut emit);
    coeffs
}

/// Simple cycles as (vertex list, product of edge weights).
fn weighted_cycles<W>(
    base: &TransitionMatrix,
    weight: impl Fn(usize, usize) -> W,
    mul: impl Fn(&W, &W) -> W,
) -> Vec<(Vec<usize>, W)> {
    base.simple_cycles()
        .iter()
        .map(|c: &Word| {
            let mut edges = c.edges();
            let (i, j) = edges.next().expect("cycle has an edge");
            let w = edges.fold(weight(i, j), |acc, (i, j)| mul(&acc, &weight(i, j)));
            (c.symbols()[..c.len() - 1].to_vec(), w)
        })
        .collect()
}

/// Walks every collection of vertex-disjoint cycles, reporting its total
/// length, whether it has an odd number of cycles, and its weight.
#[allow(clippy::too_many_arguments)]
fn collect_covers<W: Clone>(
    cycles: &[(Vec<usize>, W)],
    mul: &impl Fn(&W, &W) -> W,
    from: usize,
    used: &mut [bool],
    covered: usize,
    weight: W,
    count: usize,
    emit: &mut impl FnMut(usize, bool, &W),
) {
    for idx in from..cycles.len() {
        let (verts, w) = &cycles[idx];
        if verts.iter().any(|&v| used[v]) {
            continue;
        }
        for &v in verts {
            used[v] = true;
        }
        let weight = mul(&weight, w);
        let k = covered + verts.len();
        emit(k, count.is_multiple_of(2), &weight);
        collect_covers(cycles, mul, idx + 1, used, k, weight, count + 1, emit);
        for &v in verts {
            used[v] = false;
        }
    }
}

/// Renders an [`ExpSum`] like `1 - (1/5)^q - (3/10)^q`.
pub fn format_exp_sum(s: &ExpSum) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (r, c)) in s.terms().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let base = if r.is_one() {
            None
        } else {
            Some(format!("({r})^q"))
        };
        match (mag.is_one(), base) {
            (true, Some(b)) => out.push_str(&b),
            (true, None) => out.push('1'),
            (false, Some(b)) => out.push_str(&format!("{mag}*{b}")),
            (false, None) => out.push_str(&mag.to_string()),
        }
    }
    out
}
