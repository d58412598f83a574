//! Chebotarev-style Monte Carlo over real primes.
//!
//! For every streamed prime q a Frobenius element is drawn uniformly from the
//! slice of the subgroup spec whose cyclotomic coordinate is q. The draw is
//! made once at the finest precision and reduced to every coarser level, the
//! way rho_n(Frob_q) is the reduction of rho(Frob_q). Each prime owns a ChaCha
//! stream keyed by (seed, q), so traces do not depend on scheduling.

use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::locus::{count_slice, ratio_to_f64, slice_table, GroupElement, SliceCount, SubgroupSpec};
use crate::matrix::ResidueMatrix;
use crate::padic::{Arith, Repr, Residue, RingSpec, SmallRing};
use crate::primes::PrimeStream;

/// Raw uniform sampler on the slice {b == q} of a spec.
struct SliceSampler {
    ring: SmallRing,
    p: u64,
    m: usize,
    step: u64,
    radix: u64,
    diagonal_offset: u64,
    det_coupled: bool,
}

impl SliceSampler {
    fn new(spec: &SubgroupSpec, ring: &RingSpec) -> Result<Self> {
        spec.validate(ring)?;
        let small = ring
            .small_ring()
            .ok_or_else(|| Error::BadParam("modulus too large for sampling".into()))?;
        let (base, level) = match spec {
            SubgroupSpec::Congruence { base, level } => (base.as_ref(), *level),
            other => (other, 0),
        };
        let step = ring.p().pow(level);
        Ok(SliceSampler {
            ring: small,
            p: ring.p(),
            m: spec.m(),
            step,
            radix: small.modulus / step,
            diagonal_offset: u64::from(level > 0),
            det_coupled: matches!(base, SubgroupSpec::DetCoupled { .. }),
        })
    }

    fn check_slice(&self, q: u64) -> Result<u64> {
        let b = q % self.ring.modulus;
        if b % self.p == 0 {
            return Err(Error::BadParam(format!("q = {q} is not a unit mod p")));
        }
        if b % self.step != 1 % self.step {
            return Err(Error::EmptySlice);
        }
        Ok(b)
    }

    /// Rejection sampling from uniform entries: accept when the determinant
    /// is a unit and, for determinant-coupled specs, equals b.
    fn sample<R: Rng>(&self, b: u64, rng: &mut R) -> Vec<u64> {
        let size = self.m * self.m;
        let mut entries = vec![0u64; size];
        loop {
            for (idx, e) in entries.iter_mut().enumerate() {
                let base = if idx / self.m == idx % self.m { self.diagonal_offset } else { 0 };
                *e = (base + self.step * rng.gen_range(0..self.radix)) % self.ring.modulus;
            }
            let det = linalg::det_cofactor(&self.ring, &entries, self.m);
            if det % self.p == 0 {
                continue;
            }
            if self.det_coupled && det != b {
                continue;
            }
            return entries;
        }
    }
}

/// Draws a Frobenius element for the prime `q`: uniform on the part of `spec`
/// whose cyclotomic coordinate is q mod p^n.
pub fn sample_frobenius<R: Rng>(
    spec: &SubgroupSpec,
    ring: &Arc<RingSpec>,
    q: u64,
    rng: &mut R,
) -> Result<GroupElement> {
    if q == ring.p() {
        return Err(Error::BadParam("q must differ from p".into()));
    }
    let sampler = SliceSampler::new(spec, ring)?;
    let b = sampler.check_slice(q)?;
    let entries = sampler.sample(b, rng);
    let matrix = ResidueMatrix::from_reprs(ring, sampler.m, entries.into_iter().map(Repr::Small).collect());
    Ok(GroupElement {
        matrix,
        b: Some(ring.residue(b as i64)),
    })
}

/// The RNG used for prime `q` under `seed`.
pub fn prime_rng(seed: u64, q: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(q);
    rng
}

/// Exact share of the slice {b == q} lying on the locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalRatio {
    pub ratio: Ratio<BigUint>,
    /// q == 1 mod p: the invariant vanishes for the trivial reason at level 1.
    pub degenerate: bool,
}

pub fn exact_conditional_ratio(
    spec: &SubgroupSpec,
    ring: &Arc<RingSpec>,
    q_residue: &Residue,
    budget: u64,
) -> Result<ConditionalRatio> {
    let count = count_slice(spec, ring, q_residue, budget)?;
    Ok(ConditionalRatio {
        ratio: Ratio::new(count.locus_size, count.slice_size),
        degenerate: crate::tame::is_degenerate_cyclotomic(q_residue),
    })
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub spec: SubgroupSpec,
    pub p: u64,
    pub levels: Vec<u32>,
    pub prime_count: usize,
    pub seed: u64,
    /// Extra primes to leave out; p is always skipped.
    pub skip: Vec<u64>,
    pub start: u64,
    /// Exact references are computed for levels whose group fits this budget.
    pub reference_budget: u64,
}

impl SimConfig {
    pub fn new(spec: SubgroupSpec, p: u64, levels: Vec<u32>, prime_count: usize, seed: u64) -> Self {
        SimConfig {
            spec,
            p,
            levels,
            prime_count,
            seed,
            skip: Vec::new(),
            start: 2,
            reference_budget: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeOutcome {
    pub q: u64,
    pub flagged: bool,
    pub degenerate: bool,
}

/// Running record for one precision level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTrace {
    pub n: u32,
    pub outcomes: Vec<PrimeOutcome>,
    pub primes_streamed: usize,
    pub flagged: usize,
    pub degenerate: usize,
    /// flagged / streamed; `None` when nothing was streamed.
    pub final_estimate: Option<f64>,
    pub ci95: Option<f64>,
    /// Mean over the streamed primes of the exact slice ratio (zero for
    /// degenerate primes): the expectation of `final_estimate`.
    #[serde(serialize_with = "serialize_ratio")]
    pub exact_reference: Option<Ratio<BigUint>>,
    /// Per-prime exact slice ratios in stream order, when references exist.
    #[serde(skip)]
    pub reference_terms: Option<Vec<f64>>,
}

fn serialize_ratio<S: serde::Serializer>(r: &Option<Ratio<BigUint>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        None => s.serialize_none(),
        Some(r) => s.serialize_some(&format!("{}/{}", r.numer(), r.denom())),
    }
}

impl DensityTrace {
    /// flagged-so-far / streamed-so-far after each prime.
    pub fn running_density(&self) -> Vec<Ratio<u64>> {
        let mut flagged = 0u64;
        self.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| {
                flagged += u64::from(o.flagged);
                Ratio::new(flagged, i as u64 + 1)
            })
            .collect()
    }

    pub fn exact_reference_f64(&self) -> Option<f64> {
        self.exact_reference.as_ref().map(ratio_to_f64)
    }
}

/// 1.96 sqrt(p(1 - p) / N).
pub fn ci95(estimate: f64, count: usize) -> f64 {
    1.96 * (estimate * (1.0 - estimate) / count as f64).sqrt()
}

/// Runs the simulation and returns one trace per requested level, in the
/// order given.
pub fn simulate_density(config: &SimConfig) -> Result<Vec<DensityTrace>> {
    if config.levels.is_empty() {
        return Err(Error::BadParam("at least one precision level is required".into()));
    }
    let top = *config.levels.iter().max().expect("nonempty");
    let top_ring = RingSpec::new(config.p, top)?;
    let rings: Vec<Arc<RingSpec>> = config
        .levels
        .iter()
        .map(|&n| top_ring.with_precision(n))
        .collect::<Result<_>>()?;
    for ring in &rings {
        config.spec.validate(ring)?;
    }
    let sampler = SliceSampler::new(&config.spec, &top_ring)?;
    let mut skip = config.skip.clone();
    skip.push(config.p);
    // primes whose slice is empty (congruence specs) cannot occur as Frobenius
    // coordinates of the modelled image and are passed over
    let primes: Vec<u64> = PrimeStream::new(config.start)
        .filter(|q| !skip.contains(q) && sampler.check_slice(*q).is_ok())
        .take(config.prime_count)
        .collect();

    // exact per-residue tables where affordable
    let tables: Vec<Option<Vec<SliceCount>>> = rings
        .iter()
        .map(|ring| match slice_table(&config.spec, ring, config.reference_budget) {
            Ok(table) => Ok(Some(table)),
            Err(Error::TooLarge { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let per_prime: Vec<Vec<PrimeOutcome>> = primes
        .par_iter()
        .map(|&q| {
            let b_top = sampler.check_slice(q)?;
            let mut rng = prime_rng(config.seed, q);
            let top_entries = sampler.sample(b_top, &mut rng);
            let degenerate = q % config.p == 1 % config.p;
            Ok(rings
                .iter()
                .map(|ring| {
                    let modulus = ring.small_modulus().expect("sampler checked the top level");
                    let r = SmallRing { modulus };
                    let entries: Vec<u64> = top_entries.iter().map(|e| e % modulus).collect();
                    let b = q % modulus;
                    let flagged =
                        !degenerate && linalg::resultant_invariant(&r, &entries, sampler.m, &b) == r.zero();
                    PrimeOutcome { q, flagged, degenerate }
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let traces = rings
        .iter()
        .zip(&tables)
        .enumerate()
        .map(|(level_idx, (ring, table))| {
            let outcomes: Vec<PrimeOutcome> = per_prime.iter().map(|row| row[level_idx]).collect();
            let streamed = outcomes.len();
            let flagged = outcomes.iter().filter(|o| o.flagged).count();
            let degenerate = outcomes.iter().filter(|o| o.degenerate).count();
            let (final_estimate, ci) = if streamed == 0 {
                (None, None)
            } else {
                let est = flagged as f64 / streamed as f64;
                (Some(est), Some(ci95(est, streamed)))
            };
            let (exact_reference, reference_terms) = match table {
                Some(table) if streamed > 0 => {
                    let modulus = ring.small_modulus().expect("small") as usize;
                    let mut sum = Ratio::new(BigUint::zero(), BigUint::from(1u32));
                    let mut terms = Vec::with_capacity(streamed);
                    for o in &outcomes {
                        let slice = &table[o.q as usize % modulus];
                        if o.degenerate || slice.slice_size.is_zero() {
                            terms.push(0.0);
                            continue;
                        }
                        let term = Ratio::new(slice.locus_size.clone(), slice.slice_size.clone());
                        terms.push(ratio_to_f64(&term));
                        sum += term;
                    }
                    (Some(sum / Ratio::from_integer(BigUint::from(streamed))), Some(terms))
                }
                _ => (None, None),
            };
            DensityTrace {
                n: ring.n(),
                outcomes,
                primes_streamed: streamed,
                flagged,
                degenerate,
                final_estimate,
                ci95: ci,
                exact_reference,
                reference_terms,
            }
        })
        .collect();
    Ok(traces)
}
