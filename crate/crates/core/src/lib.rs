//! Gibbs measures for 2-locally constant potentials on one-sided
//! topological Markov shifts.
//!
//! A potential is a real value per edge of a primitive zero-one matrix `A`.
//! Its Gibbs measure is the Markov measure of the column-stochastic matrix
//! `Q(f)` obtained from the Perron data of the weight matrix `A(f)`. This
//! crate computes `Q(f)`, exact cylinder masses, the entropy spectrum via
//! the pressure `q -> log lambda(Q_q)`, and tests that separate Gibbs
//! systems up to isomorphism: distinct `E0` values (`G_A`), word
//! reconstruction, induced block-code conjugacies and a certificate for an
//! equal-spectrum, non-isomorphic pair on a four-symbol shift.
//!
//! ```
//! use gibbs_rigidity::{normalize, Potential, TransitionMatrix};
//!
//! let a = TransitionMatrix::golden_mean();
//! let (chain, perron) = normalize(&Potential::zero(a)).unwrap();
//! let golden = (1.0 + 5f64.sqrt()) / 2.0;
//! assert!((perron.lambda - golden).abs() < 1e-12);
//! assert!((chain.ks_entropy() - golden.ln()).abs() < 1e-12);
//! ```

pub mod charpoly;
pub mod error;
pub mod exact;
pub mod gibbs;
pub mod matrix;
pub mod rigidity;
pub mod shift;
pub mod spectrum;

pub use error::{Error, ErrorKind, Result};
pub use exact::RationalChain;
pub use gibbs::{
    cohomologous_with_constant, normalize, perron, CohomologyCheck, Continuation, GibbsChain,
    GibbsRatio, PerronData, Potential,
};
pub use matrix::Matrix;
pub use rigidity::{
    counterexample_pair, in_g, induce_conjugacy, reconstruct_word, sample_g, snr_certificate,
    BlockCode, GMembership, Mode, SnrCertificate, SnrChecks, SnrParams,
};
pub use shift::{AutomorphismResult, CycleSet, ShiftStructure, TransitionMatrix, Word};
pub use spectrum::{
    char_poly_family_equal, pressure, pressure_derivative, q_power, spectrum_curve, spectrum_point,
    SpectrumCurve, SpectrumPoint,
};
