//! Combinatorics of zero-one transition matrices: admissible words, in-degree
//! structure, simple cycles, column amalgamation and graph automorphisms.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest alphabet accepted by the factorial-time automorphism search.
pub const MAX_AUTOMORPHISM_SIZE: usize = 10;

/// A zero-one `n x n` matrix defining the one-sided shift space `Sigma_A`.
///
/// Symbols are `0..n` internally and printed as `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransitionMatrix {
    n: usize,
    entries: Vec<bool>,
}

impl TransitionMatrix {
    /// Builds a matrix from rows of 0/1 entries.
    ///
    /// Requires `n >= 2`, a square shape, binary entries and no zero row or
    /// column. Primitivity is *not* required here; see [`Self::is_primitive`].
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::InvalidMatrix(format!("alphabet size {n} < 2")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                match x {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    _ => {
                        return Err(Error::InvalidMatrix(format!(
                            "entry ({}, {}) is {x}, expected 0 or 1",
                            i + 1,
                            j + 1
                        )))
                    }
                }
            }
        }
        let a = TransitionMatrix { n, entries };
        for k in 0..n {
            if !(0..n).any(|j| a.edge(k, j)) {
                return Err(Error::InvalidMatrix(format!("row {} is zero", k + 1)));
            }
            if !(0..n).any(|i| a.edge(i, k)) {
                return Err(Error::InvalidMatrix(format!("column {} is zero", k + 1)));
            }
        }
        Ok(a)
    }

    /// Like [`Self::from_rows`] but additionally rejects non-primitive input.
    pub fn primitive<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let a = Self::from_rows(rows)?;
        if !a.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        Ok(a)
    }

    /// Amalgamation may shrink the alphabet to a single symbol, which the
    /// public constructor refuses.
    fn from_entries_unchecked(n: usize, entries: Vec<bool>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        TransitionMatrix { n, entries }
    }

    /// The full shift on `n` symbols.
    pub fn full_shift(n: usize) -> Self {
        Self::from_entries_unchecked(n, vec![true; n * n])
    }

    /// The golden mean shift `[[0,1],[1,1]]`.
    pub fn golden_mean() -> Self {
        Self::from_rows(&[[0u8, 1], [1, 1]]).expect("valid matrix")
    }

    /// The four-symbol matrix
    ///
    /// ```text
    /// 0 1 1 1
    /// 1 0 0 1
    /// 0 1 0 0
    /// 0 1 0 0
    /// ```
    ///
    /// whose one-sided shift has only the identity automorphism and whose
    /// potentials admit equal-spectrum, non-isomorphic Gibbs pairs.
    pub fn snr_example() -> Self {
        Self::from_rows(&[[0u8, 1, 1, 1], [1, 0, 0, 1], [0, 1, 0, 0], [0, 1, 0, 0]])
            .expect("valid matrix")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(|&b| u8::from(b)).collect())
            .collect()
    }

    /// All edges `ij` in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.edge(i, j))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().filter(|&&b| b).count()
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.n).filter(|&i| self.edge(i, j)).count()
    }

    pub fn out_degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.edge(i, j)).count()
    }

    pub fn predecessors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.edge(i, j))
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.edge(i, j))
    }

    fn bool_mul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.n;
        let mut entries = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if self.edge(i, k) {
                    for j in 0..n {
                        entries[i * n + j] |= other.edge(k, j);
                    }
                }
            }
        }
        TransitionMatrix { n, entries }
    }

    /// True iff some boolean power `A^k` with `k <= n^2 - 2n + 2` is all-positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.n;
        let bound = n * n + 2 - 2 * n;
        let mut power = self.clone();
        for _ in 0..bound {
            if power.entries.iter().all(|&b| b) {
                return true;
            }
            power = power.bool_mul(self);
        }
        false
    }

    pub fn is_admissible(&self, w: &Word) -> bool {
        w.0.iter().all(|&s| s < self.n) && w.0.windows(2).all(|e| self.edge(e[0], e[1]))
    }

    /// In-degrees, `V0`, `E0` and the full edge list.
    pub fn structure(&self) -> ShiftStructure {
        let delta: Vec<usize> = (0..self.n).map(|j| self.in_degree(j)).collect();
        let v0: Vec<usize> = (0..self.n).filter(|&j| delta[j] >= 2).collect();
        let e0 = v0
            .iter()
            .flat_map(|&j| self.predecessors(j).map(move |i| (i, j)))
            .collect();
        ShiftStructure {
            delta,
            v0,
            e0,
            edges: self.edges(),
        }
    }

    /// Admissible words of exactly `length` symbols in lexicographic order.
    pub fn admissible_words(&self, length: usize) -> Vec<Word> {
        if length == 0 {
            return vec![Word::empty()];
        }
        let mut words: Vec<Vec<usize>> = (0..self.n).map(|s| vec![s]).collect();
        for _ in 1..length {
            words = words
                .iter()
                .flat_map(|w| {
                    let last = *w.last().expect("nonempty");
                    self.successors(last).map(move |j| {
                        let mut next = w.clone();
                        next.push(j);
                        next
                    })
                })
                .collect();
        }
        words.into_iter().map(Word).collect()
    }

    /// All simple cycles, each in canonical form (see [`CycleSet`]).
    ///
    /// Depth-first search from each start vertex `s` through vertices
    /// greater than `s` only, so every cycle is found exactly once, starting
    /// at its least symbol.
    pub fn simple_cycles(&self) -> CycleSet {
        let mut cycles = BTreeSet::new();
        let mut path = Vec::with_capacity(self.n + 1);
        let mut on_path = vec![false; self.n];
        for start in 0..self.n {
            path.push(start);
            on_path[start] = true;
            self.extend_cycles(start, &mut path, &mut on_path, &mut cycles);
            on_path[start] = false;
            path.pop();
        }
        CycleSet { cycles }
    }

    fn extend_cycles(
        &self,
        start: usize,
        path: &mut Vec<usize>,
        on_path: &mut [bool],
        out: &mut BTreeSet<Word>,
    ) {
        let last = *path.last().expect("nonempty path");
        for next in self.successors(last) {
            if next == start {
                let mut cycle = path.clone();
                cycle.push(start);
                out.insert(Word(cycle));
            } else if next > start && !on_path[next] {
                path.push(next);
                on_path[next] = true;
                self.extend_cycles(start, path, on_path, out);
                on_path[next] = false;
                path.pop();
            }
        }
    }

    /// Checks that every ordered pair of simple cycles `(w, w')` shares a
    /// symbol and satisfies `(|w| - 1) / (|w'| - 1) < 2`.
    pub fn check_cycle_condition(&self) -> CycleCondition {
        let set = self.simple_cycles();
        let cycles: Vec<&Word> = set.iter().collect();
        let mut violations = Vec::new();
        for w in &cycles {
            for v in &cycles {
                let meet = w.symbols().iter().any(|s| v.symbols().contains(s));
                // (|w|-1)/(|v|-1) < 2, cross-multiplied.
                let ratio_ok = w.len() - 1 < 2 * (v.len() - 1);
                if !meet || !ratio_ok {
                    violations.push(CycleViolation {
                        first: (*w).clone(),
                        second: (*v).clone(),
                        disjoint: !meet,
                        ratio_too_large: !ratio_ok,
                    });
                }
            }
        }
        CycleCondition {
            holds: violations.is_empty(),
            violations,
        }
    }

    /// Iterated column amalgamation to a fixed point.
    ///
    /// While two symbols have identical columns they are merged: the merged
    /// symbol keeps the common column and its row is the entrywise OR of the
    /// two rows.
    pub fn total_amalgamation(&self) -> Amalgamation {
        let mut n = self.n;
        let mut entries = self.entries.clone();
        let mut classes: Vec<Vec<usize>> = (0..n).map(|s| vec![s]).collect();
        'merge: loop {
            for a in 0..n {
                for b in (a + 1)..n {
                    if (0..n).all(|k| entries[k * n + a] == entries[k * n + b]) {
                        let mut merged = Vec::with_capacity((n - 1) * (n - 1));
                        let keep: Vec<usize> = (0..n).filter(|&k| k != b).collect();
                        for &i in &keep {
                            for &j in &keep {
                                let mut e = entries[i * n + j];
                                if i == a {
                                    e |= entries[b * n + j];
                                }
                                merged.push(e);
                            }
                        }
                        let absorbed = classes.remove(b);
                        classes[a].extend(absorbed);
                        classes[a].sort_unstable();
                        entries = merged;
                        n -= 1;
                        continue 'merge;
                    }
                }
            }
            break;
        }
        let mut symbol_map = vec![0; self.n];
        for (new, class) in classes.iter().enumerate() {
            for &old in class {
                symbol_map[old] = new;
            }
        }
        Amalgamation {
            matrix: TransitionMatrix::from_entries_unchecked(n, entries),
            classes,
            symbol_map,
        }
    }

    /// Symbol permutations `sigma` with `A[sigma(i)][sigma(j)] = A[i][j]`.
    ///
    /// Permutations are returned in lexicographic order, so the identity
    /// comes first.
    pub fn graph_automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        if self.n > MAX_AUTOMORPHISM_SIZE {
            return Err(Error::TooLarge {
                n: self.n,
                max: MAX_AUTOMORPHISM_SIZE,
            });
        }
        let mut out = Vec::new();
        let mut perm = Vec::with_capacity(self.n);
        let mut used = vec![false; self.n];
        self.extend_automorphism(&mut perm, &mut used, &mut out);
        Ok(out)
    }

    fn extend_automorphism(
        &self,
        perm: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = perm.len();
        if k == self.n {
            out.push(perm.clone());
            return;
        }
        for image in 0..self.n {
            if used[image] {
                continue;
            }
            // Only pairs involving the newly assigned symbol need checking.
            let consistent = self.edge(k, k) == self.edge(image, image)
                && (0..k).all(|i| {
                    self.edge(i, k) == self.edge(perm[i], image)
                        && self.edge(k, i) == self.edge(image, perm[i])
                });
            if consistent {
                perm.push(image);
                used[image] = true;
                self.extend_automorphism(perm, used, out);
                used[image] = false;
                perm.pop();
            }
        }
    }

    /// Decides whether the one-sided shift has only the identity automorphism.
    ///
    /// The answer is `Trivial` when the total amalgamation is `A` itself and
    /// the graph has no nontrivial symmetry; otherwise the graph group is
    /// returned without a verdict on the shift.
    pub fn automorphisms(&self) -> Result<AutomorphismResult> {
        let group = self.graph_automorphisms()?;
        let amalgamation_proper = self.total_amalgamation().matrix.n != self.n;
        if !amalgamation_proper && group.len() == 1 {
            Ok(AutomorphismResult::Trivial)
        } else {
            Ok(AutomorphismResult::Inconclusive {
                graph_group: group,
                amalgamation_proper,
            })
        }
    }
}

impl fmt::Debug for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// A finite word over `0..n`, printed 1-based (`132`, or `1.10.3` once a
/// symbol needs two digits).
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word from 1-based symbols. Panics on a zero symbol.
    pub fn from_one_based(symbols: &[usize]) -> Self {
        Word(
            symbols
                .iter()
                .map(|&s| s.checked_sub(1).expect("symbols are 1-based"))
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|e| (e[0], e[1]))
    }

    pub fn is_cycle(&self) -> bool {
        self.len() >= 2 && self.first() == self.last()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s < 9) {
            for s in &self.0 {
                write!(f, "{}", s + 1)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| (s + 1).to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse word {s:?}"));
        let parse = |t: &str| -> Result<usize> {
            let v: usize = t.parse().map_err(|_| bad())?;
            v.checked_sub(1).ok_or_else(bad)
        };
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let symbols = if s.contains('.') {
            s.split('.').map(parse).collect::<Result<Vec<_>>>()?
        } else {
            s.chars()
                .map(|c| parse(c.encode_utf8(&mut [0; 4])))
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word(symbols))
    }
}

/// In-degree data of a transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftStructure {
    /// `delta[j]` is the number of nonzero entries of column `j`.
    pub delta: Vec<usize>,
    /// Symbols with in-degree at least two, ascending.
    pub v0: Vec<usize>,
    /// Edges `ij` with `j` in `V0`, ordered by `j` then `i`.
    pub e0: Vec<(usize, usize)>,
    /// All edges, row-major.
    pub edges: Vec<(usize, usize)>,
}

impl ShiftStructure {
    pub fn in_v0(&self, j: usize) -> bool {
        self.delta[j] >= 2
    }
}

/// Simple cycles identified up to rotation.
///
/// Each cycle is stored as the lexicographically least rotation of its
/// first `|w| - 1` symbols followed by a repeat of the first symbol; for a
/// simple cycle this is the rotation starting at its least symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleSet {
    cycles: BTreeSet<Word>,
}

impl CycleSet {
    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.cycles.iter()
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.cycles.contains(w)
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.cycles.iter().map(Word::to_string).collect()
    }
}

/// Rotates a cycle to canonical form. `w` must satisfy [`Word::is_cycle`].
pub fn canonical_cycle(w: &Word) -> Word {
    debug_assert!(w.is_cycle());
    let body = &w.0[..w.len() - 1];
    let best = (0..body.len())
        .map(|r| {
            body[r..]
                .iter()
                .chain(&body[..r])
                .copied()
                .collect::<Vec<_>>()
        })
        .min()
        .expect("nonempty cycle");
    let mut out = best;
    out.push(out[0]);
    Word(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleViolation {
    pub first: Word,
    pub second: Word,
    pub disjoint: bool,
    pub ratio_too_large: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCondition {
    pub holds: bool,
    pub violations: Vec<CycleViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgamation {
    pub matrix: TransitionMatrix,
    /// Original symbols merged into each new symbol, ascending.
    pub classes: Vec<Vec<usize>>,
    /// `symbol_map[old] = new`.
    pub symbol_map: Vec<usize>,
}

impl Amalgamation {
    pub fn is_identity(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutomorphismResult {
    /// The shift has only the identity automorphism.
    Trivial,
    /// No verdict on the shift; the graph automorphism group is reported.
    Inconclusive {
        graph_group: Vec<Vec<usize>>,
        amalgamation_proper: bool,
    },
}
