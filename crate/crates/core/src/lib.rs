//! Computational toolkit around ramification in p-adic Galois representations:
//! exact arithmetic in Z/p^n, division-free characteristic polynomials and
//! resultants, tame lift criteria, exact counts of the ramification locus in
//! matrix groups mod p^n, and a Chebotarev-style density simulator.

pub mod density;
pub mod error;
pub mod json;
mod linalg;
pub mod locus;
pub mod matrix;
pub mod padic;
pub mod poly;
pub mod primes;
pub mod tame;

pub use density::{
    exact_conditional_ratio, sample_frobenius, simulate_density, ConditionalRatio, DensityTrace, PrimeOutcome,
    SimConfig,
};
pub use error::{Error, Result};
pub use locus::{
    count_locus, count_slice, decay_fit, enumerate_group, group_size_formula, locus_series, CountConfig,
    GroupElement, LocusCriterion, LocusReport, SeriesRecord, SubgroupSpec, DEFAULT_BUDGET,
};
pub use matrix::{MatrixJson, ResidueMatrix};
pub use padic::{is_prime, Residue, RingSpec};
pub use poly::{resultant, resultant_invariant, substitute_bx, CharPoly, Poly};
pub use primes::prime_stream;
pub use tame::{
    construct_gl2_ramified_pair, general_ramified_criterion, gl2_ramified_criterion, is_detectably_ramified,
    semistability_threshold, BetaSign, PairJson, SemistabilityThreshold, TamePair,
};
