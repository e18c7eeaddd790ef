//! Exact rational mode: chains given directly by a rational column-stochastic
//! `Q`, with `G_A` membership, cycle comparisons and characteristic
//! polynomial families decided without rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::charpoly::{char_poly_family_exact, ratio_to_f64, ExpSum};
use crate::error::{Error, Result};
use crate::gibbs::{GibbsChain, Potential};
use crate::matrix::Matrix;
use crate::rigidity::{Edge, GMembership, Mode, SnrCertificate, SnrChecks, ValueSetDiff};
use crate::shift::{AutomorphismResult, TransitionMatrix, Word};

/// A rational column-stochastic matrix supported on the edges of a
/// primitive transition matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalChain {
    base: TransitionMatrix,
    q: Vec<Vec<Option<BigRational>>>,
}

impl RationalChain {
    pub fn new(base: TransitionMatrix, q: Vec<Vec<Option<BigRational>>>) -> Result<Self> {
        let n = base.size();
        if q.len() != n || q.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidPotential(format!("Q must be {n} x {n}")));
        }
        if !base.is_primitive() {
            return Err(Error::NotPrimitive);
        }
        for i in 0..n {
            for j in 0..n {
                let e = Word(vec![i, j]);
                match (&q[i][j], base.edge(i, j)) {
                    (Some(x), true) if x.is_positive() && *x <= BigRational::one() => {}
                    (Some(x), true) => {
                        return Err(Error::NotStochastic(format!(
                            "entry {e} = {x} is not in (0, 1]"
                        )))
                    }
                    (None, true) => {
                        return Err(Error::InvalidPotential(format!(
                            "missing value on edge {e}"
                        )))
                    }
                    (Some(_), false) => {
                        return Err(Error::InvalidPotential(format!(
                            "value given on forbidden transition {e}"
                        )))
                    }
                    (None, false) => {}
                }
            }
        }
        for j in 0..n {
            let sum = (0..n)
                .filter_map(|i| q[i][j].clone())
                .fold(BigRational::zero(), |a, b| a + b);
            if !sum.is_one() {
                return Err(Error::NotStochastic(format!(
                    "column {} sums to {sum}",
                    j + 1
                )));
            }
        }
        Ok(RationalChain { base, q })
    }

    pub fn base(&self) -> &TransitionMatrix {
        &self.base
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&BigRational> {
        self.q[i][j].as_ref()
    }

    pub fn entries(&self) -> &[Vec<Option<BigRational>>] {
        &self.q
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.base.size(), |i, j| {
            self.q[i][j].as_ref().map_or(0.0, ratio_to_f64)
        })
    }

    /// The floating-point chain with the same `Q`.
    pub fn to_chain(&self) -> Result<GibbsChain> {
        GibbsChain::from_stochastic(self.base.clone(), self.to_matrix())
    }

    /// The potential `log Q`, whose stochasticization is `Q` itself.
    pub fn potential(&self) -> Result<Potential> {
        Potential::from_stochastic(self.base.clone(), &self.to_matrix())
    }

    fn e0_values(&self) -> Vec<(Edge, BigRational)> {
        self.base
            .structure()
            .e0
            .into_iter()
            .map(|(i, j)| ((i, j), self.q[i][j].clone().expect("edge")))
            .collect()
    }

    /// Exact distinctness of the `E0` entries.
    pub fn in_g(&self) -> GMembership {
        let values = self.e0_values();
        for (l, (e2, y)) in values.iter().enumerate() {
            for (e, x) in &values[..l] {
                if x == y {
                    return GMembership {
                        member: false,
                        collision: Some((*e, *e2)),
                    };
                }
            }
        }
        GMembership {
            member: true,
            collision: None,
        }
    }

    /// Product of `Q` over the edges of an admissible cycle; equal products
    /// mean equal cycle sums of the normalized potential.
    pub fn cycle_product(&self, c: &Word) -> Result<BigRational> {
        if !c.is_cycle() {
            return Err(Error::NotACycle(c.clone()));
        }
        if !self.base.is_admissible(c) {
            return Err(Error::NotAdmissible(c.clone()));
        }
        Ok(c.edges().fold(BigRational::one(), |acc, (i, j)| {
            acc * self.q[i][j].clone().expect("edge")
        }))
    }

    /// First simple cycle on which the two chains' cycle products differ.
    pub fn cohomology_witness(&self, other: &RationalChain) -> Result<Option<Word>> {
        if self.base != other.base {
            return Err(Error::BaseMismatch);
        }
        for c in self.base.simple_cycles().iter() {
            if self.cycle_product(c)? != other.cycle_product(c)? {
                return Ok(Some(c.clone()));
            }
        }
        Ok(None)
    }

    /// `q -> det(zI - Q_q)` as exponential sums, one per coefficient.
    pub fn char_poly_family(&self) -> Vec<ExpSum> {
        char_poly_family_exact(&self.base, &self.q)
    }

    /// True iff `det(zI - Q_q) = det(zI - Q'_q)` for every real `q`.
    pub fn family_equal(&self, other: &RationalChain) -> bool {
        self.base.size() == other.base.size() && self.char_poly_family() == other.char_poly_family()
    }

    /// Exact `E0` value sets, as sorted rationals.
    pub fn value_sets(&self, other: &RationalChain) -> ExactValueSets {
        let set = |c: &RationalChain| {
            let mut v: Vec<BigRational> = c.e0_values().into_iter().map(|(_, x)| x).collect();
            v.sort();
            v.dedup();
            v
        };
        let (a, b) = (set(self), set(other));
        ExactValueSets {
            only_first: a.iter().filter(|x| !b.contains(x)).cloned().collect(),
            only_second: b.iter().filter(|x| !a.contains(x)).cloned().collect(),
            first: a,
            second: b,
        }
    }

    /// The counterexample partner of a chain over the four-symbol example
    /// matrix, computed exactly.
    pub fn counterexample_pair(&self) -> Result<RationalChain> {
        if self.base != TransitionMatrix::snr_example() {
            return Err(Error::WrongBase);
        }
        let get = |i: usize, j: usize| self.q[i][j].clone().expect("edge");
        let (a1, a2, a3) = (get(0, 1), get(2, 1), get(3, 1));
        let (b1, b2) = (get(0, 3), get(1, 3));
        if a2 == a3.clone() * b1.clone() {
            return Err(Error::Degenerate);
        }
        let one = BigRational::one();
        let c = one.clone() - a1.clone() - a3.clone() * b1.clone();
        let q = vec![
            vec![None, Some(a1), Some(one.clone()), Some(a2 / c.clone())],
            vec![Some(one), None, None, Some(a3.clone() * b2 / c.clone())],
            vec![None, Some(a3 * b1), None, None],
            vec![None, Some(c), None, None],
        ];
        RationalChain::new(self.base.clone(), q)
    }

    /// The counterexample certificate with every comparison done exactly.
    pub fn snr_certificate(&self) -> Result<SnrCertificate> {
        let g = self.counterexample_pair()?;
        let membership = self.in_g();
        let spectra_equal = self.family_equal(&g);
        let witness = self.cohomology_witness(&g)?;
        let automorphisms = self.base.automorphisms()?;
        let exact_sets = self.value_sets(&g);
        let checks = SnrChecks {
            f_in_g: membership.member,
            spectra_equal,
            not_cohomologous: witness.is_some(),
            aut_trivial: automorphisms == AutomorphismResult::Trivial,
            e0_value_sets_differ: exact_sets.differ(),
        };
        let (chain_f, chain_g) = (self.to_chain()?, g.to_chain()?);
        let (cycle_sum_f, cycle_sum_g) = match &witness {
            Some(c) => (Some(chain_f.cycle_sum(c)?), Some(chain_g.cycle_sum(c)?)),
            None => (None, None),
        };
        Ok(SnrCertificate {
            mode: Mode::Exact,
            f: self.potential()?,
            g: g.potential()?,
            q_f: self.to_matrix(),
            q_g: g.to_matrix(),
            verdict: checks.verdict(),
            checks,
            collision: membership.collision,
            spectra_max_deviation: 0.0,
            witness_cycle: witness,
            cycle_sum_f,
            cycle_sum_g,
            automorphisms,
            amalgamation_is_identity: self.base.total_amalgamation().is_identity(),
            value_sets: exact_sets.to_f64(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValueSets {
    pub first: Vec<BigRational>,
    pub second: Vec<BigRational>,
    pub only_first: Vec<BigRational>,
    pub only_second: Vec<BigRational>,
}

impl ExactValueSets {
    pub fn differ(&self) -> bool {
        !(self.only_first.is_empty() && self.only_second.is_empty())
    }

    pub fn to_f64(&self) -> ValueSetDiff {
        let conv = |v: &[BigRational]| v.iter().map(ratio_to_f64).collect();
        ValueSetDiff {
            first: conv(&self.first),
            second: conv(&self.second),
            only_first: conv(&self.only_first),
            only_second: conv(&self.only_second),
        }
    }
}

/// Parses `"3/10"`, `"1"` or `"-2/4"` into a reduced rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("cannot parse rational {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}
