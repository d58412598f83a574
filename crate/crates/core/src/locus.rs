//! Exact enumeration of matrix groups mod p^n and counting of the
//! ramification locus {F(A, b) = 0} inside them.
//!
//! Elements are visited by a row-major odometer over the matrix entries (the
//! (0, 0) entry is the most significant digit), followed by the cyclotomic
//! coordinate when it varies independently. Work is split on the leading
//! digit and merged by addition, so counts do not depend on the worker count.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ResidueMatrix;
use crate::padic::{Arith, Residue, RingSpec, SmallRing};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// The finite groups standing in for the image of rho' = rho (+) cyclotomic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupSpec {
    /// All of GL_m; the cyclotomic coordinate is supplied by the caller.
    FullGl { m: usize },
    /// Pairs (A, det A): the determinant is the cyclotomic character.
    DetCoupled { m: usize },
    /// Pairs (A, b) with b an arbitrary unit.
    ProductGl1 { m: usize },
    /// Elements of `base` congruent to the identity mod p^level.
    Congruence { base: Box<SubgroupSpec>, level: u32 },
}

impl SubgroupSpec {
    pub fn m(&self) -> usize {
        match self {
            SubgroupSpec::FullGl { m } | SubgroupSpec::DetCoupled { m } | SubgroupSpec::ProductGl1 { m } => *m,
            SubgroupSpec::Congruence { base, .. } => base.m(),
        }
    }

    /// Dimension d of the ambient group: m^2, or m^2 + 1 with an independent
    /// cyclotomic factor.
    pub fn dimension(&self) -> usize {
        match self {
            SubgroupSpec::ProductGl1 { m } => m * m + 1,
            SubgroupSpec::FullGl { m } | SubgroupSpec::DetCoupled { m } => m * m,
            SubgroupSpec::Congruence { base, .. } => base.dimension(),
        }
    }

    fn base(&self) -> &SubgroupSpec {
        match self {
            SubgroupSpec::Congruence { base, .. } => base,
            other => other,
        }
    }

    fn level(&self) -> u32 {
        match self {
            SubgroupSpec::Congruence { level, .. } => *level,
            _ => 0,
        }
    }

    pub fn validate(&self, ring: &RingSpec) -> Result<()> {
        if self.m() == 0 {
            return Err(Error::BadParam("dimension must be at least 1".into()));
        }
        if let SubgroupSpec::Congruence { base, level } = self {
            if matches!(**base, SubgroupSpec::Congruence { .. }) {
                return Err(Error::BadParam("nested congruence specs are not supported".into()));
            }
            if *level >= ring.n() {
                return Err(Error::BadParam(format!(
                    "congruence level {level} must be below the precision {}",
                    ring.n()
                )));
            }
        }
        Ok(())
    }

    /// Exact number of elements over Z/p^n.
    pub fn predicted_size(&self, ring: &RingSpec) -> Result<BigUint> {
        self.validate(ring)?;
        let (p, n, m) = (ring.p(), ring.n(), self.m());
        let level = self.level();
        let independent_b = matches!(self.base(), SubgroupSpec::ProductGl1 { .. });
        if level == 0 {
            let gl = group_size_formula(m, p, n);
            return Ok(if independent_b { gl * ring.unit_group_order() } else { gl });
        }
        let pb = BigUint::from(p);
        let kernel = pb.pow((m * m) as u32 * (n - level));
        Ok(if independent_b { kernel * pb.pow(n - level) } else { kernel })
    }

    /// The criterion used when the caller asks for [`LocusCriterion::Auto`].
    pub fn default_criterion(&self) -> LocusCriterion {
        match self.base() {
            SubgroupSpec::DetCoupled { m: 2 } => LocusCriterion::TraceDet,
            _ => LocusCriterion::Resultant,
        }
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupSpec::FullGl { m } => write!(f, "fullgl{m}"),
            SubgroupSpec::DetCoupled { m } => write!(f, "detcoupled{m}"),
            SubgroupSpec::ProductGl1 { m } => write!(f, "productgl1-{m}"),
            SubgroupSpec::Congruence { base, level } => write!(f, "cong{level}-{base}"),
        }
    }
}

impl FromStr for SubgroupSpec {
    type Err = Error;

    /// Accepts `fullgl2`, `detcoupled2`, `productgl1-2` and `cong1-detcoupled2`
    /// (a `:` may replace the `-`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::BadParam(format!("unrecognised subgroup spec {s:?}"));
        let dim = |rest: &str| -> Result<usize> {
            rest.trim_start_matches(['-', ':', '_']).parse::<usize>().map_err(|_| bad())
        };
        if let Some(rest) = s.strip_prefix("cong") {
            let rest = rest.strip_prefix("ruence").unwrap_or(rest);
            let rest = rest.trim_start_matches([':', '-', '_']);
            let split = rest.find(['-', ':']).ok_or_else(bad)?;
            let level = rest[..split].parse::<u32>().map_err(|_| bad())?;
            let base = SubgroupSpec::from_str(&rest[split + 1..])?;
            return Ok(SubgroupSpec::Congruence {
                base: Box::new(base),
                level,
            });
        }
        if let Some(rest) = s.strip_prefix("productgl1") {
            return Ok(SubgroupSpec::ProductGl1 { m: dim(rest)? });
        }
        if let Some(rest) = s.strip_prefix("detcoupled") {
            return Ok(SubgroupSpec::DetCoupled { m: dim(rest)? });
        }
        if let Some(rest) = s.strip_prefix("fullgl") {
            return Ok(SubgroupSpec::FullGl { m: dim(rest)? });
        }
        Err(bad())
    }
}

/// Which vanishing condition defines the counted locus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocusCriterion {
    /// Resultant for everything except DetCoupled in dimension 2.
    Auto,
    /// F(A, b) = Res(f_A(x), f_A(bx)) == 0.
    Resultant,
    /// det A == b and tr(A)^2 == (1 + b)^2; dimension 2 only.
    TraceDet,
}

impl FromStr for LocusCriterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(LocusCriterion::Auto),
            "resultant" => Ok(LocusCriterion::Resultant),
            "trace-det" | "tracedet" => Ok(LocusCriterion::TraceDet),
            other => Err(Error::BadParam(format!("unknown criterion {other:?}"))),
        }
    }
}

/// |GL_m(Z/p^n)| = p^(m^2 (n-1)) * prod_{i<m} (p^m - p^i).
pub fn group_size_formula(m: usize, p: u64, n: u32) -> BigUint {
    let pb = BigUint::from(p);
    let pm = pb.pow(m as u32);
    let mut size = pb.pow((m * m) as u32 * (n - 1));
    for i in 0..m {
        size *= &pm - pb.pow(i as u32);
    }
    size
}

/// One element of a spec: the matrix and, where the spec has one, its
/// cyclotomic coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub matrix: ResidueMatrix,
    pub b: Option<Residue>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BMode {
    Det,
    Free,
    Fixed(u64),
    None,
}

/// Enumeration kernel on raw residues.
#[derive(Clone, Debug)]
struct Kernel {
    ring: SmallRing,
    p: u64,
    m: usize,
    step: u64,
    radix: u64,
    diagonal_offset: u64,
    b_mode: BMode,
    b_values: Vec<u64>,
    det_filter: Option<u64>,
}

impl Kernel {
    fn new(spec: &SubgroupSpec, ring: &RingSpec, b_mode: BMode, det_filter: Option<u64>) -> Result<Self> {
        spec.validate(ring)?;
        let small = ring
            .small_ring()
            .ok_or_else(|| Error::BadParam("modulus too large for enumeration".into()))?;
        let modulus = small.modulus;
        let step = ring.p().pow(spec.level());
        let diagonal_offset = if spec.level() > 0 { 1 } else { 0 };
        let b_values = match b_mode {
            BMode::Free if spec.level() > 0 => (0..modulus / step).map(|u| (1 + step * u) % modulus).collect(),
            BMode::Free => (0..modulus).filter(|b| b % ring.p() != 0).collect(),
            BMode::Fixed(b) => vec![b],
            BMode::Det | BMode::None => Vec::new(),
        };
        Ok(Kernel {
            ring: small,
            p: ring.p(),
            m: spec.m(),
            step,
            radix: modulus / step,
            diagonal_offset,
            b_mode,
            b_values,
            det_filter,
        })
    }

    fn entry(&self, idx: usize, digit: u64) -> u64 {
        let base = if idx / self.m == idx % self.m { self.diagonal_offset } else { 0 };
        (base + self.step * digit) % self.ring.modulus
    }

    /// Calls `f(entries, b)` for every element whose leading digit is `lead`.
    fn visit_partition<F: FnMut(&[u64], u64)>(&self, lead: u64, mut f: F) {
        let size = self.m * self.m;
        let mut digits = vec![0u64; size];
        digits[0] = lead;
        let mut entries: Vec<u64> = (0..size).map(|i| self.entry(i, digits[i])).collect();
        loop {
            let det = linalg::det_cofactor(&self.ring, &entries, self.m);
            if det % self.p != 0 && self.det_filter.is_none_or(|d| d == det) {
                match self.b_mode {
                    BMode::Det => f(&entries, det),
                    BMode::None => f(&entries, 0),
                    BMode::Free | BMode::Fixed(_) => {
                        for &b in &self.b_values {
                            f(&entries, b);
                        }
                    }
                }
            }
            // advance the odometer, least significant digit last
            let mut idx = size;
            loop {
                if idx == 1 {
                    return;
                }
                idx -= 1;
                digits[idx] += 1;
                if digits[idx] < self.radix {
                    entries[idx] = self.entry(idx, digits[idx]);
                    break;
                }
                digits[idx] = 0;
                entries[idx] = self.entry(idx, 0);
            }
        }
    }

    fn in_locus(&self, criterion: LocusCriterion, a: &[u64], b: u64) -> bool {
        let r = &self.ring;
        match criterion {
            LocusCriterion::TraceDet => {
                let det = linalg::det_cofactor(r, a, self.m);
                let tr = r.add(&a[0], &a[3]);
                let s = r.add(&1, &b);
                det == b && r.mul(&tr, &tr) == r.mul(&s, &s)
            }
            _ => linalg::resultant_invariant(r, a, self.m, &b) == 0,
        }
    }

    fn is_degenerate(&self, b: u64) -> bool {
        b % self.p == 1 % self.p
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    group: u64,
    locus: u64,
    excluded: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            group: self.group + o.group,
            locus: self.locus + o.locus,
            excluded: self.excluded + o.excluded,
        }
    }
}

fn check_budget(predicted: &BigUint, budget: u64) -> Result<()> {
    if *predicted > BigUint::from(budget) {
        Err(Error::TooLarge {
            predicted: predicted.clone(),
            budget,
        })
    } else {
        Ok(())
    }
}

fn b_mode_for(spec: &SubgroupSpec, ring: &RingSpec, fixed_b: Option<&Residue>) -> Result<BMode> {
    Ok(match spec.base() {
        SubgroupSpec::DetCoupled { .. } => BMode::Det,
        SubgroupSpec::ProductGl1 { .. } => BMode::Free,
        SubgroupSpec::FullGl { .. } => {
            let b = fixed_b.ok_or_else(|| {
                Error::BadParam("FullGl needs a caller-supplied cyclotomic value b".into())
            })?;
            ring.check_same(b.ring())?;
            BMode::Fixed(b.to_u64().expect("small ring"))
        }
        SubgroupSpec::Congruence { .. } => unreachable!("validated"),
    })
}

/// Streams every element of `spec` over `ring` exactly once, in odometer order.
pub fn enumerate_group(
    spec: &SubgroupSpec,
    ring: &Arc<RingSpec>,
    budget: u64,
) -> Result<impl Iterator<Item = GroupElement>> {
    let predicted = spec.predicted_size(ring)?;
    check_budget(&predicted, budget)?;
    let b_mode = match spec.base() {
        SubgroupSpec::FullGl { .. } => BMode::None,
        _ => b_mode_for(spec, ring, None)?,
    };
    let kernel = Kernel::new(spec, ring, b_mode, None)?;
    let ring = Arc::clone(ring);
    let m = kernel.m;
    Ok((0..kernel.radix).flat_map(move |lead| {
        let mut batch = Vec::new();
        kernel.visit_partition(lead, |a, b| {
            let matrix = ResidueMatrix::from_reprs(
                &ring,
                m,
                a.iter().map(|&v| crate::padic::Repr::Small(v)).collect(),
            );
            let b = match kernel.b_mode {
                BMode::None => None,
                _ => Some(ring.residue(b as i64)),
            };
            batch.push(GroupElement { matrix, b });
        });
        batch
    }))
}

/// Options shared by the counting entry points.
#[derive(Clone, Debug)]
pub struct CountConfig {
    pub criterion: LocusCriterion,
    /// Cyclotomic value for [`SubgroupSpec::FullGl`], reduced at each level.
    pub fixed_b: Option<i64>,
    pub budget: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig {
            criterion: LocusCriterion::Auto,
            fixed_b: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Counts at one precision level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRecord {
    pub n: u32,
    pub group_size: BigUint,
    pub locus_size: BigUint,
    pub excluded_b1_size: BigUint,
}

impl SeriesRecord {
    /// locus_size / group_size, exactly.
    pub fn ratio(&self) -> Ratio<BigUint> {
        Ratio::new(self.locus_size.clone(), self.group_size.clone())
    }

    pub fn ratio_f64(&self) -> f64 {
        ratio_to_f64(&self.ratio())
    }
}

pub(crate) fn ratio_to_f64(r: &Ratio<BigUint>) -> f64 {
    let num = r.numer().to_f64().unwrap_or(f64::INFINITY);
    let den = r.denom().to_f64().unwrap_or(f64::INFINITY);
    num / den
}

impl Serialize for SeriesRecord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let ratio = self.ratio();
        let mut st = s.serialize_struct("SeriesRecord", 7)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("group_size", &self.group_size.to_string())?;
        st.serialize_field("locus_size", &self.locus_size.to_string())?;
        st.serialize_field("excluded_b1_size", &self.excluded_b1_size.to_string())?;
        st.serialize_field("ratio_num", &ratio.numer().to_string())?;
        st.serialize_field("ratio_den", &ratio.denom().to_string())?;
        st.serialize_field("ratio_float", &ratio_to_f64(&ratio))?;
        st.end()
    }
}

fn resolve(criterion: LocusCriterion, spec: &SubgroupSpec) -> Result<LocusCriterion> {
    let resolved = match criterion {
        LocusCriterion::Auto => spec.default_criterion(),
        other => other,
    };
    if resolved == LocusCriterion::TraceDet && spec.m() != 2 {
        return Err(Error::BadParam("the trace-determinant criterion needs m = 2".into()));
    }
    Ok(resolved)
}

/// Counts the elements of `spec` lying on the locus. Elements whose
/// cyclotomic coordinate is 1 mod p go to `excluded_b1_size` instead of
/// `locus_size`.
pub fn count_locus(spec: &SubgroupSpec, ring: &Arc<RingSpec>, config: &CountConfig) -> Result<SeriesRecord> {
    let criterion = resolve(config.criterion, spec)?;
    let predicted = spec.predicted_size(ring)?;
    check_budget(&predicted, config.budget)?;
    let fixed = config.fixed_b.map(|b| ring.residue(b));
    let kernel = Kernel::new(spec, ring, b_mode_for(spec, ring, fixed.as_ref())?, None)?;
    let tally = (0..kernel.radix)
        .into_par_iter()
        .map(|lead| {
            let mut t = Tally::default();
            kernel.visit_partition(lead, |a, b| {
                t.group += 1;
                if kernel.in_locus(criterion, a, b) {
                    if kernel.is_degenerate(b) {
                        t.excluded += 1;
                    } else {
                        t.locus += 1;
                    }
                }
            });
            t
        })
        .reduce(Tally::default, |x, y| x + y);
    debug_assert_eq!(BigUint::from(tally.group), predicted);
    Ok(SeriesRecord {
        n: ring.n(),
        group_size: BigUint::from(tally.group),
        locus_size: BigUint::from(tally.locus),
        excluded_b1_size: BigUint::from(tally.excluded),
    })
}

/// Exact fraction of the slice {b == b_value} lying on the resultant locus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceCount {
    pub slice_size: BigUint,
    pub locus_size: BigUint,
}

/// Counts the slice of `spec` whose cyclotomic coordinate equals `b`, using
/// the resultant criterion.
pub fn count_slice(spec: &SubgroupSpec, ring: &Arc<RingSpec>, b: &Residue, budget: u64) -> Result<SliceCount> {
    ring.check_same(b.ring())?;
    spec.validate(ring)?;
    let bv = b.to_u64().ok_or_else(|| Error::BadParam("modulus too large for enumeration".into()))?;
    let level_ok = {
        let step = ring.p().pow(spec.level());
        spec.level() == 0 || bv % step == 1 % step
    };
    if !b.is_unit() || !level_ok {
        return Err(Error::EmptySlice);
    }
    let (mode, det_filter) = match spec.base() {
        SubgroupSpec::DetCoupled { .. } => (BMode::Det, Some(bv)),
        _ => (BMode::Fixed(bv), None),
    };
    // the slice lives inside the group (DetCoupled) or is a copy of GL (otherwise)
    let bound = match spec.base() {
        SubgroupSpec::ProductGl1 { .. } => {
            let mut inner = spec.clone();
            if let SubgroupSpec::Congruence { base, .. } = &mut inner {
                **base = SubgroupSpec::FullGl { m: spec.m() };
            } else {
                inner = SubgroupSpec::FullGl { m: spec.m() };
            }
            inner.predicted_size(ring)?
        }
        _ => spec.predicted_size(ring)?,
    };
    check_budget(&bound, budget)?;
    let kernel = Kernel::new(spec, ring, mode, det_filter)?;
    let (size, locus) = (0..kernel.radix)
        .into_par_iter()
        .map(|lead| {
            let mut acc = (0u64, 0u64);
            kernel.visit_partition(lead, |a, b| {
                acc.0 += 1;
                if kernel.in_locus(LocusCriterion::Resultant, a, b) {
                    acc.1 += 1;
                }
            });
            acc
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    if size == 0 {
        return Err(Error::EmptySlice);
    }
    Ok(SliceCount {
        slice_size: BigUint::from(size),
        locus_size: BigUint::from(locus),
    })
}

/// Per-residue slice counts for every cyclotomic value at once, indexed by
/// the residue of b. Slices that are empty have size zero.
pub fn slice_table(spec: &SubgroupSpec, ring: &Arc<RingSpec>, budget: u64) -> Result<Vec<SliceCount>> {
    spec.validate(ring)?;
    let predicted = spec.predicted_size(ring)?;
    check_budget(&predicted, budget)?;
    let small = ring
        .small_modulus()
        .ok_or_else(|| Error::BadParam("modulus too large for enumeration".into()))?;
    let modulus = usize::try_from(small).map_err(|_| Error::BadParam("modulus too large".into()))?;
    let mode = match spec.base() {
        SubgroupSpec::DetCoupled { .. } => BMode::Det,
        SubgroupSpec::ProductGl1 { .. } => BMode::Free,
        // every unit b pairs with all of GL; count GL once and replicate below
        _ => BMode::Fixed(0),
    };
    if let BMode::Fixed(_) = mode {
        let mut table = vec![
            SliceCount {
                slice_size: BigUint::zero(),
                locus_size: BigUint::zero(),
            };
            modulus
        ];
        for b in 0..small {
            let residue = ring.residue(b as i64);
            match count_slice(spec, ring, &residue, budget) {
                Ok(count) => table[b as usize] = count,
                Err(Error::EmptySlice) => {}
                Err(e) => return Err(e),
            }
        }
        return Ok(table);
    }
    let kernel = Kernel::new(spec, ring, mode, None)?;
    let counts = (0..kernel.radix)
        .into_par_iter()
        .map(|lead| {
            let mut local = vec![(0u64, 0u64); modulus];
            kernel.visit_partition(lead, |a, b| {
                let slot = &mut local[b as usize];
                slot.0 += 1;
                if kernel.in_locus(LocusCriterion::Resultant, a, b) {
                    slot.1 += 1;
                }
            });
            local
        })
        .reduce(
            || vec![(0u64, 0u64); modulus],
            |mut x, y| {
                for (a, b) in x.iter_mut().zip(y) {
                    a.0 += b.0;
                    a.1 += b.1;
                }
                x
            },
        );
    Ok(counts
        .into_iter()
        .map(|(s, l)| SliceCount {
            slice_size: BigUint::from(s),
            locus_size: BigUint::from(l),
        })
        .collect())
}

/// Counts across a range of precisions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusReport {
    pub spec: String,
    pub p: u64,
    pub m: usize,
    pub dimension: usize,
    pub criterion: LocusCriterion,
    pub series: Vec<SeriesRecord>,
    pub fitted_delta: Option<f64>,
    /// Level at which the budget ran out, if any; `series` stops before it.
    pub truncated_at: Option<u32>,
}

impl LocusReport {
    /// Exact check that the ratios never increase with n.
    pub fn is_non_increasing(&self) -> bool {
        self.series.windows(2).all(|w| w[1].ratio() <= w[0].ratio())
    }
}

pub fn locus_series(
    spec: &SubgroupSpec,
    p: u64,
    levels: RangeInclusive<u32>,
    config: &CountConfig,
) -> Result<LocusReport> {
    let criterion = resolve(config.criterion, spec)?;
    let mut report = LocusReport {
        spec: spec.to_string(),
        p,
        m: spec.m(),
        dimension: spec.dimension(),
        criterion,
        series: Vec::new(),
        fitted_delta: None,
        truncated_at: None,
    };
    let config = CountConfig {
        criterion,
        ..config.clone()
    };
    for n in levels {
        let ring = RingSpec::new(p, n)?;
        match count_locus(spec, &ring, &config) {
            Ok(record) => report.series.push(record),
            Err(Error::TooLarge { .. }) => {
                report.truncated_at = Some(n);
                break;
            }
            Err(e) => return Err(e),
        }
    }
    report.fitted_delta = decay_fit(&report.series, p).ok();
    Ok(report)
}

/// Least-squares slope of log_p(ratio_n) against n over the levels with a
/// nonempty locus, negated: ratio_n ~ p^(-delta n).
pub fn decay_fit(series: &[SeriesRecord], p: u64) -> Result<f64> {
    let ln_p = (p as f64).ln();
    let points: Vec<(f64, f64)> = series
        .iter()
        .filter(|r| !r.locus_size.is_zero())
        .map(|r| {
            let ratio = r.ratio();
            let log_num = big_ln(ratio.numer());
            let log_den = big_ln(ratio.denom());
            (r.n as f64, (log_num - log_den) / ln_p)
        })
        .collect();
    if points.len() < 2 {
        return Err(Error::Degenerate(format!(
            "decay fit needs two levels with a nonempty locus, found {}",
            points.len()
        )));
    }
    let count = points.len() as f64;
    let mean_x = points.iter().map(|(x, _)| x).sum::<f64>() / count;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / count;
    let sxx: f64 = points.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all levels share the same precision".into()));
    }
    let sxy: f64 = points.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let delta = -(sxy / sxx);
    // avoid reporting -0 for a flat series
    Ok(if delta == 0.0 { 0.0 } else { delta })
}

fn big_ln(v: &BigUint) -> f64 {
    // keep 52 significant bits and account for the rest as a power of two
    let bits = v.bits();
    if bits <= 1000 {
        v.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (v >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}
