//! Rigidity tests for Gibbs chains: the distinctness class `G_A`, word
//! reconstruction from `Q`-value streams, conjugacies induced by matching
//! value streams, and the four-symbol equal-spectrum counterexample.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gibbs::{compare_cycle_sums, normalize, GibbsChain, Potential};
use crate::matrix::Matrix;
use crate::shift::{AutomorphismResult, TransitionMatrix, Word};
use crate::spectrum::{char_poly_family_equal, default_q_grid, CHAR_POLY_TOLERANCE};

/// Relative tolerance under which two `Q` entries count as equal.
pub const VALUE_TOLERANCE: f64 = 1e-9;

pub fn values_match(x: f64, y: f64) -> bool {
    (x - y).abs() <= VALUE_TOLERANCE * x.abs().max(y.abs())
}

pub type Edge = (usize, usize);

/// Membership of `Q` in `G_A` (pairwise distinct values on `E0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GMembership {
    pub member: bool,
    /// First pair of distinct `E0` edges carrying equal values.
    pub collision: Option<(Edge, Edge)>,
}

pub fn in_g(chain: &GibbsChain) -> GMembership {
    let values = chain.e0_values();
    for (l, &(e2, y)) in values.iter().enumerate() {
        for &(e, x) in &values[..l] {
            if values_match(x, y) {
                return GMembership {
                    member: false,
                    collision: Some((e, e2)),
                };
            }
        }
    }
    GMembership {
        member: true,
        collision: None,
    }
}

/// Fraction of potentials with i.i.d. uniform `[-1, 1]` edge values whose
/// stochasticization lies in `G_A`.
///
/// Sample `k` draws from the ChaCha8 stream `k` under `seed`, so the result
/// does not depend on evaluation order.
pub fn sample_g(a: &TransitionMatrix, n_samples: usize, seed: u64) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "n_samples must be at least 1".into(),
        ));
    }
    let mut hits = 0usize;
    for k in 0..n_samples {
        let f = random_potential(a, seed, k as u64)?;
        let (chain, _) = normalize(&f)?;
        if in_g(&chain).member {
            hits += 1;
        }
    }
    Ok(hits as f64 / n_samples as f64)
}

/// The `index`-th uniform `[-1, 1]` potential drawn by [`sample_g`].
pub fn random_potential(a: &TransitionMatrix, seed: u64, index: u64) -> Result<Potential> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    Potential::from_fn(a.clone(), |_, _| rng.random_range(-1.0..=1.0))
}

/// Recovers the unique admissible word whose `Q`-value stream is `values`.
///
/// The last edge is found by value among `E0`; earlier edges are resolved
/// backwards, by value among the `E0` edges into the current symbol when it
/// lies in `V0`, and as the unique predecessor otherwise.
pub fn reconstruct_word(chain: &GibbsChain, values: &[f64]) -> Result<Word> {
    let Some((&last, rest)) = values.split_last() else {
        return Err(Error::InvalidArgument("empty value sequence".into()));
    };
    let base = chain.base();
    let structure = base.structure();
    let q = chain.q();
    if values_match(last, 1.0) {
        return Err(Error::BadTerminal);
    }
    let position = rest.len();
    let (i, j) = unique_match(
        structure
            .e0
            .iter()
            .copied()
            .filter(|&(i, j)| values_match(q[(i, j)], last)),
        position,
        last,
    )?;
    let mut word = vec![j, i];
    for (position, &value) in rest.iter().enumerate().rev() {
        let current = *word.last().expect("nonempty");
        let prev = if structure.in_v0(current) {
            unique_match(
                base.predecessors(current)
                    .filter(|&p| values_match(q[(p, current)], value)),
                position,
                value,
            )?
        } else {
            let p = base.predecessors(current).next().expect("in-degree one");
            if !values_match(q[(p, current)], value) {
                return Err(Error::NoMatch { position, value });
            }
            p
        };
        word.push(prev);
    }
    word.reverse();
    Ok(Word(word))
}

fn unique_match<T>(
    mut candidates: impl Iterator<Item = T>,
    position: usize,
    value: f64,
) -> Result<T> {
    let first = candidates
        .next()
        .ok_or(Error::NoMatch { position, value })?;
    if candidates.next().is_some() {
        return Err(Error::NotInG { position, value });
    }
    Ok(first)
}

/// A sliding block code: each admissible `window`-word over the source
/// alphabet determines one target symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCode {
    window: usize,
    table: BTreeMap<Word, usize>,
}

impl BlockCode {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn table(&self) -> &BTreeMap<Word, usize> {
        &self.table
    }

    pub fn image_symbol(&self, block: &Word) -> Option<usize> {
        self.table.get(block).copied()
    }

    /// Applies the code to a finite word; the image has `|w| - window + 1`
    /// symbols. `None` if some block is not in the table.
    pub fn apply(&self, w: &Word) -> Option<Word> {
        if w.len() < self.window {
            return Some(Word::empty());
        }
        w.symbols()
            .windows(self.window)
            .map(|block| self.table.get(&Word(block.to_vec())).copied())
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    /// True iff every block maps to its own first symbol.
    pub fn is_identity(&self) -> bool {
        self.table
            .iter()
            .all(|(block, &s)| block.first() == Some(s))
    }

    /// True iff every block maps to `perm` of its first symbol.
    pub fn is_relabeling(&self, perm: &[usize]) -> bool {
        self.table
            .iter()
            .all(|(block, &s)| block.first().map(|b| perm[b]) == Some(s))
    }
}

/// `E0` value sets of two chains compared as sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueSetDiff {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub only_first: Vec<f64>,
    pub only_second: Vec<f64>,
}

impl ValueSetDiff {
    pub fn differ(&self) -> bool {
        !(self.only_first.is_empty() && self.only_second.is_empty())
    }
}

fn value_set(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for x in values {
        if !out.iter().any(|&y| values_match(x, y)) {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

pub fn compare_value_sets(first: &GibbsChain, second: &GibbsChain) -> ValueSetDiff {
    let a = value_set(first.e0_values().into_iter().map(|(_, x)| x));
    let b = value_set(second.e0_values().into_iter().map(|(_, x)| x));
    let only = |xs: &[f64], ys: &[f64]| -> Vec<f64> {
        xs.iter()
            .copied()
            .filter(|&x| !ys.iter().any(|&y| values_match(x, y)))
            .collect()
    };
    ValueSetDiff {
        only_first: only(&a, &b),
        only_second: only(&b, &a),
        first: a,
        second: b,
    }
}

/// The block code from `source` to `target` forced by matching value
/// streams, with window `N + 1` for a source alphabet of size `N`.
fn forced_code(source: &GibbsChain, target: &GibbsChain) -> Result<BlockCode> {
    let n = source.size();
    let window = n + 1;
    let structure = source.base().structure();
    let q = source.q();
    let mut table = BTreeMap::new();
    for block in source.base().admissible_words(window) {
        let s = block.symbols();
        // A block of N + 1 symbols repeats a symbol, so it contains a cycle
        // and hence a V0 symbol at some position k0 >= 1.
        let k0 = (1..window)
            .find(|&k| structure.in_v0(s[k]))
            .expect("every cycle meets V0");
        let values: Vec<f64> = s[..=k0].windows(2).map(|e| q[(e[0], e[1])]).collect();
        let image = reconstruct_word(target, &values)
            .map_err(|e| Error::NotInvertible(format!("block {block} has no image: {e}")))?;
        table.insert(block, image.symbols()[0]);
    }
    Ok(BlockCode { window, table })
}

/// Checks that `code` maps admissible words to admissible words and
/// preserves `Q`-values edge by edge.
fn verify_value_preserving(
    code: &BlockCode,
    source: &GibbsChain,
    target: &GibbsChain,
) -> Result<()> {
    for w in source.base().admissible_words(code.window + 1) {
        let image = code.apply(&w).expect("total on admissible blocks");
        let (a, b) = (image.symbols()[0], image.symbols()[1]);
        if !target.base().edge(a, b) {
            return Err(Error::NotInvertible(format!(
                "image {image} of {w} is not admissible"
            )));
        }
        let (i, j) = (w.symbols()[0], w.symbols()[1]);
        if !values_match(source.q()[(i, j)], target.q()[(a, b)]) {
            return Err(Error::NotInvertible(format!(
                "edge {} and its image {image} carry different values",
                Word(vec![i, j])
            )));
        }
    }
    Ok(())
}

fn verify_round_trip(there: &BlockCode, back: &BlockCode, source: &TransitionMatrix) -> Result<()> {
    let len = there.window + back.window;
    for w in source.admissible_words(len) {
        let image = there.apply(&w).expect("total on admissible blocks");
        let round = back
            .apply(&image)
            .ok_or_else(|| Error::NotInvertible(format!("image of {w} leaves the target shift")))?;
        if round.symbols() != &w.symbols()[..2] {
            return Err(Error::NotInvertible(format!(
                "round trip sends {w} to {round}"
            )));
        }
    }
    Ok(())
}

/// Builds the conjugacy from `Sigma_A` to `Sigma_B` induced by matching the
/// `Q`-value streams of the two chains, or reports why none exists.
///
/// Requires `#E0(A) = #E0(B)` and `Q_f` in `G_A`.
pub fn induce_conjugacy(chain_f: &GibbsChain, chain_g: &GibbsChain) -> Result<BlockCode> {
    let (ea, eb) = (
        chain_f.base().structure().e0.len(),
        chain_g.base().structure().e0.len(),
    );
    if ea != eb {
        return Err(Error::E0CountMismatch { a: ea, b: eb });
    }
    if !in_g(chain_f).member {
        return Err(Error::InvalidArgument("Q(f) is not in G_A".into()));
    }
    let diff = compare_value_sets(chain_f, chain_g);
    if diff.differ() {
        return Err(Error::ValueSetMismatch {
            only_first: diff.only_first,
            only_second: diff.only_second,
        });
    }
    let forward = forced_code(chain_f, chain_g)?;
    let backward = forced_code(chain_g, chain_f)?;
    verify_value_preserving(&forward, chain_f, chain_g)?;
    verify_value_preserving(&backward, chain_g, chain_f)?;
    verify_round_trip(&forward, &backward, chain_f.base())?;
    verify_round_trip(&backward, &forward, chain_g.base())?;
    Ok(forward)
}

/// Entries of `Q(f)` over the four-symbol example matrix:
///
/// ```text
/// Q(f) = | 0  a1 1 b1 |
///        | 1  0  0 b2 |
///        | 0  a2 0 0  |
///        | 0  a3 0 0  |
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrParams {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
}

impl SnrParams {
    pub fn from_chain(chain: &GibbsChain) -> Result<Self> {
        if chain.base() != &TransitionMatrix::snr_example() {
            return Err(Error::WrongBase);
        }
        let q = chain.q();
        Ok(SnrParams {
            a1: q[(0, 1)],
            a2: q[(2, 1)],
            a3: q[(3, 1)],
            b1: q[(0, 3)],
            b2: q[(1, 3)],
        })
    }

    /// `a2 = a3 * b1`, where the construction collapses.
    pub fn is_degenerate(&self) -> bool {
        values_match(self.a2, self.a3 * self.b1)
    }

    pub fn q_f(&self) -> Matrix {
        let SnrParams { a1, a2, a3, b1, b2 } = *self;
        Matrix::from_rows(&[
            vec![0.0, a1, 1.0, b1],
            vec![1.0, 0.0, 0.0, b2],
            vec![0.0, a2, 0.0, 0.0],
            vec![0.0, a3, 0.0, 0.0],
        ])
    }

    /// The partner matrix, with `c = 1 - a1 - a3 b1`:
    ///
    /// ```text
    /// Q(g) = | 0  a1    1 a2/c    |
    ///        | 1  0     0 a3 b2/c |
    ///        | 0  a3 b1 0 0       |
    ///        | 0  c     0 0       |
    /// ```
    pub fn q_g(&self) -> Result<Matrix> {
        if self.is_degenerate() {
            return Err(Error::Degenerate);
        }
        let SnrParams { a1, a2, a3, b1, b2 } = *self;
        let c = 1.0 - a1 - a3 * b1;
        Ok(Matrix::from_rows(&[
            vec![0.0, a1, 1.0, a2 / c],
            vec![1.0, 0.0, 0.0, a3 * b2 / c],
            vec![0.0, a3 * b1, 0.0, 0.0],
            vec![0.0, c, 0.0, 0.0],
        ]))
    }
}

/// The potential `g = log Q(g)` paired with `f` by the counterexample
/// construction. `f` must live on [`TransitionMatrix::snr_example`].
pub fn counterexample_pair(f: &Potential) -> Result<Potential> {
    if f.base() != &TransitionMatrix::snr_example() {
        return Err(Error::WrongBase);
    }
    let (chain, _) = normalize(f)?;
    let params = SnrParams::from_chain(&chain)?;
    Potential::from_stochastic(f.base().clone(), &params.q_g()?)
}

/// The five component checks of a strong non-rigidity witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SnrChecks {
    pub f_in_g: bool,
    pub spectra_equal: bool,
    pub not_cohomologous: bool,
    pub aut_trivial: bool,
    pub e0_value_sets_differ: bool,
}

impl SnrChecks {
    pub fn verdict(&self) -> bool {
        self.f_in_g
            && self.spectra_equal
            && self.not_cohomologous
            && self.aut_trivial
            && self.e0_value_sets_differ
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Floating point with the stated tolerances.
    Numerical,
    /// Exact rational arithmetic for `G_A`, spectra and cycle comparisons.
    Exact,
}

/// A witness that `f` and `g` have equal entropy spectra while their Gibbs
/// systems are neither isomorphic nor equivalent.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrCertificate {
    pub mode: Mode,
    pub f: Potential,
    pub g: Potential,
    pub q_f: Matrix,
    pub q_g: Matrix,
    pub checks: SnrChecks,
    pub verdict: bool,
    pub collision: Option<(Edge, Edge)>,
    pub spectra_max_deviation: f64,
    pub witness_cycle: Option<Word>,
    pub cycle_sum_f: Option<f64>,
    pub cycle_sum_g: Option<f64>,
    pub automorphisms: AutomorphismResult,
    pub amalgamation_is_identity: bool,
    pub value_sets: ValueSetDiff,
}

/// Runs the full counterexample pipeline on `f` in floating point.
pub fn snr_certificate(f: &Potential) -> Result<SnrCertificate> {
    let g = counterexample_pair(f)?;
    let (chain_f, _) = normalize(f)?;
    let (chain_g, _) = normalize(&g)?;

    let membership = in_g(&chain_f);
    let spectra =
        char_poly_family_equal(&chain_f, &chain_g, &default_q_grid(), CHAR_POLY_TOLERANCE)?;
    let cohomology = compare_cycle_sums(&chain_f, &chain_g)?;
    let a = f.base();
    let automorphisms = a.automorphisms()?;
    let value_sets = compare_value_sets(&chain_f, &chain_g);

    let checks = SnrChecks {
        f_in_g: membership.member,
        spectra_equal: spectra.equal,
        not_cohomologous: !cohomology.cohomologous,
        aut_trivial: automorphisms == AutomorphismResult::Trivial,
        e0_value_sets_differ: value_sets.differ(),
    };
    let (cycle_sum_f, cycle_sum_g) = match &cohomology.witness {
        Some(c) => (Some(chain_f.cycle_sum(c)?), Some(chain_g.cycle_sum(c)?)),
        None => (None, None),
    };
    Ok(SnrCertificate {
        mode: Mode::Numerical,
        q_f: chain_f.q().clone(),
        q_g: chain_g.q().clone(),
        f: f.clone(),
        g,
        verdict: checks.verdict(),
        checks,
        collision: membership.collision,
        spectra_max_deviation: spectra.max_deviation,
        witness_cycle: cohomology.witness,
        cycle_sum_f,
        cycle_sum_g,
        automorphisms,
        amalgamation_is_identity: a.total_amalgamation().is_identity(),
        value_sets,
    })
}
