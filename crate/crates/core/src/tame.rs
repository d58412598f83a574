//! Tame local model: the two-generator relation sigma tau sigma^-1 = tau^q,
//! the semistability threshold, and the ramified-lift criteria.
//!
//! Every verifier here is conjugation invariant, so none of them assume the
//! triangular or diagonal normal forms that [`construct_gl2_ramified_pair`]
//! emits.

use std::sync::Arc;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::JsonInt;
use crate::matrix::{matrix_from_rows_json, ResidueMatrix};
use crate::padic::{is_prime, Residue, RingSpec};
use crate::poly::{resultant_invariant, CharPoly};

/// Images of Frobenius (`sigma`) and a tame inertia generator (`tau`) at a
/// prime `q != p`, over Z/p^n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TamePair {
    sigma: ResidueMatrix,
    tau: ResidueMatrix,
    q: u64,
}

impl TamePair {
    pub fn new(sigma: ResidueMatrix, tau: ResidueMatrix, q: u64) -> Result<Self> {
        sigma.ring().check_same(tau.ring())?;
        if sigma.dim() != tau.dim() {
            return Err(Error::DimMismatch {
                expected: sigma.dim(),
                found: tau.dim(),
            });
        }
        check_q(sigma.ring(), q)?;
        for mat in [&sigma, &tau] {
            let det = mat.det();
            if !det.is_unit() {
                return Err(Error::NonInvertible { det: det.value() });
            }
        }
        Ok(TamePair { sigma, tau, q })
    }

    pub fn sigma(&self) -> &ResidueMatrix {
        &self.sigma
    }

    pub fn tau(&self) -> &ResidueMatrix {
        &self.tau
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        self.sigma.ring()
    }

    /// sigma tau sigma^-1 == tau^q mod p^n.
    pub fn verify_relation(&self) -> Result<bool> {
        let lhs = self.tau.conjugate_by(&self.sigma)?;
        let rhs = self.tau.pow(&BigUint::from(self.q));
        Ok(lhs == rhs)
    }

    /// char_poly(tau) == char_poly(tau^q), a consequence of the relation.
    pub fn charpoly_qtwist_check(&self) -> bool {
        self.tau.char_poly() == self.tau.pow(&BigUint::from(self.q)).char_poly()
    }

    pub fn to_json(&self) -> PairJson {
        PairJson {
            p: self.ring().p(),
            n: self.ring().n(),
            q: self.q,
            sigma: self.sigma.rows_json(),
            tau: self.tau.rows_json(),
        }
    }
}

fn check_q(ring: &RingSpec, q: u64) -> Result<()> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q == ring.p() {
        return Err(Error::BadParam(format!("q must differ from the residue characteristic p = {q}")));
    }
    Ok(())
}

/// Wire form `{p, n, q, sigma: [[..]], tau: [[..]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairJson {
    pub p: u64,
    pub n: u32,
    pub q: u64,
    pub sigma: Vec<Vec<JsonInt>>,
    pub tau: Vec<Vec<JsonInt>>,
}

impl PairJson {
    pub fn to_pair(&self) -> Result<TamePair> {
        let ring = RingSpec::new(self.p, self.n)?;
        let sigma = matrix_from_rows_json(&ring, &self.sigma)?;
        let tau = matrix_from_rows_json(&ring, &self.tau)?;
        TamePair::new(sigma, tau, self.q)
    }
}

/// The precision N(m, Q_p) past which a non-unipotent tame inertia image can
/// no longer reduce to the unipotent pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemistabilityThreshold {
    pub m: usize,
    pub p: u64,
    #[serde(rename = "N")]
    pub value: u32,
}

/// N = 1 when p - 1 > m, otherwise floor(m / (p - 1)) + 1.
///
/// Roots of unity of order prime to p have zeta - 1 a unit. A p-power root
/// zeta_{p^k} generates an extension of degree phi(p^k), and v(zeta_{p^k} - 1)
/// = 1/phi(p^k) is largest at k = 1, where it equals 1/(p - 1). Such a root
/// is available in degree <= m exactly when p - 1 <= m; then (zeta - 1)^m
/// has valuation m/(p - 1), and N is the least integer strictly above it.
pub fn semistability_threshold(m: usize, p: u64) -> Result<SemistabilityThreshold> {
    if m == 0 {
        return Err(Error::BadParam("dimension must be at least 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let value = if p - 1 > m as u64 {
        1
    } else {
        (m as u64 / (p - 1) + 1) as u32
    };
    Ok(SemistabilityThreshold { m, p, value })
}

/// True iff char_poly(tau) differs from (x - 1)^m modulo p^N, N the
/// semistability threshold. When true, every tame representation reducing to
/// `tau` is ramified.
pub fn is_detectably_ramified(tau: &ResidueMatrix) -> Result<bool> {
    let ring = tau.ring();
    let threshold = semistability_threshold(tau.dim(), ring.p())?.value;
    if ring.n() < threshold {
        return Err(Error::PrecisionTooLow {
            n: ring.n(),
            needed: threshold,
        });
    }
    let coarse = ring.with_precision(threshold)?;
    let cp = tau.char_poly().reduce(&coarse)?;
    Ok(cp != CharPoly::unipotent(&coarse, tau.dim()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BetaSign {
    Plus,
    Minus,
}

impl BetaSign {
    pub fn value(self) -> i64 {
        match self {
            BetaSign::Plus => 1,
            BetaSign::Minus => -1,
        }
    }
}

/// sigma = diag(q beta, beta) with beta = +-1 and tau = [[1, t], [0, 1]], the
/// normal form of a ramified semistable GL_2 lift at q.
pub fn construct_gl2_ramified_pair(q: u64, sign: BetaSign, t: &Residue) -> Result<TamePair> {
    let ring = t.ring();
    if t.is_zero() {
        return Err(Error::BadParam("t must be nonzero, otherwise tau is trivial".into()));
    }
    if q == ring.p() {
        return Err(Error::BadParam(format!("q must differ from p = {q}")));
    }
    check_q(ring, q)?;
    let beta = sign.value();
    let q_res = ring.residue_from_biguint(&BigUint::from(q));
    let qb = if beta == 1 { q_res } else { q_res.neg() };
    let beta_res = ring.residue(beta);
    let zero = ring.residue(0);
    let one = ring.residue(1);
    let sigma = ResidueMatrix::from_residues(2, &[qb, zero.clone(), zero.clone(), beta_res])?;
    let tau = ResidueMatrix::from_residues(2, &[one.clone(), t.clone(), zero, one])?;
    TamePair::new(sigma, tau, q)
}

/// det(A) == q and trace(A)^2 == (1 + q)^2 mod p^n.
pub fn gl2_ramified_criterion(a: &ResidueMatrix, q: u64) -> Result<bool> {
    if a.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    let ring = a.ring();
    let q_res = ring.residue_from_biguint(&BigUint::from(q));
    if a.det() != q_res {
        return Ok(false);
    }
    let tr = a.trace();
    let one_plus_q = q_res.add(&ring.residue(1))?;
    Ok(tr.mul(&tr)? == one_plus_q.mul(&one_plus_q)?)
}

/// F(A, b) == 0 mod p^n, the necessary condition for A to be the Frobenius of
/// a point with a ramified semistable lift, b being the cyclotomic coordinate.
pub fn general_ramified_criterion(a: &ResidueMatrix, b: &Residue) -> Result<bool> {
    Ok(resultant_invariant(a, b)?.is_zero())
}

/// b == 1 mod p: the slice where F vanishes for the trivial reason f(x) = f(1x)
/// at the bottom level, excluded from density statistics.
pub fn is_degenerate_cyclotomic(b: &Residue) -> bool {
    let p = BigUint::from(b.ring().p());
    b.value() % &p == BigUint::from(1u32) % &p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64, n: u32) -> Arc<RingSpec> {
        RingSpec::new(p, n).unwrap()
    }

    fn pair(r: &Arc<RingSpec>, sigma: &[i64], tau: &[i64], q: u64) -> TamePair {
        TamePair::new(
            ResidueMatrix::from_entries(r, 2, sigma).unwrap(),
            ResidueMatrix::from_entries(r, 2, tau).unwrap(),
            q,
        )
        .unwrap()
    }

    #[test]
    fn relation_examples() {
        let r = ring(3, 3);
        assert!(pair(&r, &[2, 0, 0, 1], &[1, 1, 0, 1], 2).verify_relation().unwrap());
        for q in [2, 5, 7, 97] {
            assert!(pair(&r, &[1, 0, 0, 1], &[1, 0, 0, 1], q).verify_relation().unwrap());
        }
        let r9 = ring(3, 2);
        assert!(!pair(&r9, &[1, 0, 0, 1], &[1, 1, 0, 1], 2).verify_relation().unwrap());
    }

    #[test]
    fn pair_validation() {
        let r = ring(3, 2);
        let i = ResidueMatrix::identity(&r, 2);
        assert_eq!(TamePair::new(i.clone(), i.clone(), 3).unwrap_err(), Error::BadParam(
            "q must differ from the residue characteristic p = 3".into()
        ));
        assert_eq!(TamePair::new(i.clone(), i.clone(), 4).unwrap_err(), Error::NotPrime(4));
        let singular = ResidueMatrix::diag(&r, &[3, 1]);
        assert!(matches!(TamePair::new(singular, i, 2), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn qtwist_examples() {
        let r = ring(3, 3);
        assert!(pair(&r, &[2, 0, 0, 1], &[1, 1, 0, 1], 2).charpoly_qtwist_check());
        let r9 = ring(3, 2);
        assert!(!pair(&r9, &[1, 0, 0, 1], &[1, 0, 0, 2], 5).charpoly_qtwist_check());
        // unipotent tau, relation false, twist check still true
        let p = pair(&r9, &[1, 0, 0, 1], &[1, 4, 0, 1], 7);
        assert!(!p.verify_relation().unwrap());
        assert!(p.charpoly_qtwist_check());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(semistability_threshold(2, 5).unwrap().value, 1);
        assert_eq!(semistability_threshold(2, 3).unwrap().value, 2);
        assert_eq!(semistability_threshold(2, 2).unwrap().value, 3);
        assert_eq!(semistability_threshold(6, 7).unwrap().value, 2);
        assert_eq!(semistability_threshold(5, 7).unwrap().value, 1);
        assert!(semistability_threshold(0, 3).is_err());
        assert_eq!(semistability_threshold(2, 6).unwrap_err(), Error::NotPrime(6));
    }

    #[test]
    fn detection_examples() {
        let r = ring(5, 2);
        assert!(!is_detectably_ramified(&ResidueMatrix::identity(&r, 2)).unwrap());
        assert!(is_detectably_ramified(&ResidueMatrix::diag(&r, &[1, 2])).unwrap());
        let r9 = ring(3, 2);
        let t = ResidueMatrix::from_rows(&r9, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert!(!is_detectably_ramified(&t).unwrap());
        let low = ring(3, 1);
        assert_eq!(
            is_detectably_ramified(&ResidueMatrix::identity(&low, 2)).unwrap_err(),
            Error::PrecisionTooLow { n: 1, needed: 2 }
        );
    }

    #[test]
    fn threshold_one_is_too_coarse_at_three() {
        // diag(1, 4) looks unipotent mod 3 but not mod 9
        let r9 = ring(3, 2);
        let tau = ResidueMatrix::diag(&r9, &[1, 4]);
        let mod3 = ring(3, 1);
        assert_eq!(tau.char_poly().reduce(&mod3).unwrap(), CharPoly::unipotent(&mod3, 2));
        assert!(is_detectably_ramified(&tau).unwrap());
    }

    #[test]
    fn construction_examples() {
        let r = ring(3, 3);
        let pr = construct_gl2_ramified_pair(2, BetaSign::Plus, &r.residue(1)).unwrap();
        assert_eq!(pr.sigma(), &ResidueMatrix::diag(&r, &[2, 1]));
        assert_eq!(pr.tau(), &ResidueMatrix::from_rows(&r, &[vec![1, 1], vec![0, 1]]).unwrap());
        assert!(pr.verify_relation().unwrap());

        let r9 = ring(3, 2);
        let pm = construct_gl2_ramified_pair(2, BetaSign::Minus, &r9.residue(1)).unwrap();
        assert_eq!(pm.sigma(), &ResidueMatrix::diag(&r9, &[7, 8]));
        assert_eq!(pm.sigma().trace(), r9.residue(6));
        let tr = pm.sigma().trace();
        assert!(tr.mul(&tr).unwrap().is_zero());

        assert!(matches!(
            construct_gl2_ramified_pair(3, BetaSign::Plus, &r9.residue(1)),
            Err(Error::BadParam(_))
        ));
        assert!(matches!(
            construct_gl2_ramified_pair(2, BetaSign::Plus, &r9.residue(9)),
            Err(Error::BadParam(_))
        ));
    }

    #[test]
    fn gl2_criterion_examples() {
        let r = ring(3, 2);
        for q in [2i64, 5, 7] {
            assert!(gl2_ramified_criterion(&ResidueMatrix::diag(&r, &[q, 1]), q as u64).unwrap());
        }
        assert!(!gl2_ramified_criterion(&ResidueMatrix::identity(&r, 2), 2).unwrap());
        assert!(gl2_ramified_criterion(&ResidueMatrix::diag(&r, &[7, 8]), 2).unwrap());
        assert!(gl2_ramified_criterion(&ResidueMatrix::identity(&r, 3), 2).is_err());
    }

    #[test]
    fn general_criterion_examples() {
        let r = ring(5, 3);
        for q in [2i64, 3, 7] {
            for beta in [1, -1] {
                let s = ResidueMatrix::diag(&r, &[q * beta, beta]);
                assert!(general_ramified_criterion(&s, &r.residue(q)).unwrap());
            }
        }
        let a = ResidueMatrix::from_rows(&r, &[vec![3, 1], vec![4, 2]]).unwrap();
        assert!(general_ramified_criterion(&a, &r.residue(1)).unwrap());
        assert!(!general_ramified_criterion(&ResidueMatrix::diag(&r, &[1, 3]), &r.residue(2)).unwrap());
    }

    #[test]
    fn degenerate_slices() {
        let r = ring(3, 2);
        assert!(is_degenerate_cyclotomic(&r.residue(1)));
        assert!(is_degenerate_cyclotomic(&r.residue(7)));
        assert!(!is_degenerate_cyclotomic(&r.residue(2)));
        let r2 = ring(2, 3);
        // every unit is 1 mod 2
        assert!(is_degenerate_cyclotomic(&r2.residue(3)));
    }

    #[test]
    fn pair_json_round_trip() {
        let r = ring(5, 2);
        let pr = construct_gl2_ramified_pair(7, BetaSign::Minus, &r.residue(5)).unwrap();
        let text = serde_json::to_string(&pr.to_json()).unwrap();
        let back: PairJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_pair().unwrap(), pr);
    }
}
