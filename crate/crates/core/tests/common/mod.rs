#![allow(dead_code)]

use gibbs_rigidity::{GibbsChain, Matrix, Potential, TransitionMatrix, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random primitive matrix with `n` symbols and edge density `density`.
pub fn random_primitive(rng: &mut ChaCha8Rng, n: usize, density: f64) -> TransitionMatrix {
    loop {
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|_| (0..n).map(|_| u8::from(rng.random_bool(density))).collect())
            .collect();
        if let Ok(a) = TransitionMatrix::primitive(&rows) {
            return a;
        }
    }
}

pub fn random_potential(rng: &mut ChaCha8Rng, a: &TransitionMatrix, spread: f64) -> Potential {
    Potential::from_fn(a.clone(), |_, _| rng.random_range(-spread..=spread)).unwrap()
}

/// Random interior parameters (a1, a2, a3, b1, b2) with a2 != a3 b1.
pub fn random_params(rng: &mut ChaCha8Rng) -> [f64; 5] {
    loop {
        let x: f64 = rng.random_range(0.05..0.9);
        let y: f64 = rng.random_range(0.05..0.9);
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        let (a1, a2, a3) = (lo, hi - lo, 1.0 - hi);
        let b1: f64 = rng.random_range(0.05..0.95);
        let b2 = 1.0 - b1;
        let ok = [a1, a2, a3].iter().all(|&v| v > 0.02) && (a2 - a3 * b1).abs() > 1e-3;
        if ok {
            return [a1, a2, a3, b1, b2];
        }
    }
}

pub fn example_q(p: [f64; 5]) -> Matrix {
    let [a1, a2, a3, b1, b2] = p;
    Matrix::from_rows(&[
        vec![0.0, a1, 1.0, b1],
        vec![1.0, 0.0, 0.0, b2],
        vec![0.0, a2, 0.0, 0.0],
        vec![0.0, a3, 0.0, 0.0],
    ])
}

pub fn example_chain(p: [f64; 5]) -> GibbsChain {
    GibbsChain::from_stochastic(TransitionMatrix::snr_example(), example_q(p)).unwrap()
}

pub const EXAMPLE: [f64; 5] = [0.2, 0.3, 0.5, 0.4, 0.6];

pub fn w(s: &str) -> Word {
    s.parse().unwrap()
}

/// All admissible words of lengths `1..=max_len`.
pub fn words_up_to(a: &TransitionMatrix, max_len: usize) -> Vec<Word> {
    (1..=max_len).flat_map(|l| a.admissible_words(l)).collect()
}

/// Solves `Q pi = pi`, `sum pi = 1` by Gaussian elimination with partial
/// pivoting, replacing the last equation with the normalization.
pub fn stationary_by_linear_solve(q: &Matrix) -> Vec<f64> {
    let n = q.size();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n)
                .map(|j| q[(i, j)] - if i == j { 1.0 } else { 0.0 })
                .collect();
            row.push(0.0);
            row
        })
        .collect();
    m[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = m[r][col] / m[col][col];
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    (0..n).map(|i| m[i][n] / m[i][i]).collect()
}

/// Every permutation of `0..n`, lexicographic.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for s in 0..n {
            if !prefix.contains(&s) {
                prefix.push(s);
                rec(prefix, n, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), n, &mut out);
    out
}
