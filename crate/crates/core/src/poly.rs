//! Polynomials over Z/p^n, Sylvester resultants and the ramification
//! invariant F(A, b) = Res(f_A(x), f_A(bx)).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::ResidueMatrix;
use crate::padic::{Arith, Repr, Residue, RingSpec};

/// A polynomial with a nominal degree: coefficients low-to-high, and the
/// degree is `len - 1` even when the top coefficient is a zero divisor.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    ring: Arc<RingSpec>,
    coeffs: Vec<Repr>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.coeffs.iter().map(|c| c.to_biguint().to_string()).collect();
        write!(f, "[{}] mod {}", terms.join(", "), self.ring.modulus())
    }
}

impl Poly {
    pub fn new(ring: &Arc<RingSpec>, coeffs_low_to_high: &[i64]) -> Result<Self> {
        if coeffs_low_to_high.is_empty() {
            return Err(Error::BadParam("a polynomial needs at least one coefficient".into()));
        }
        Ok(Poly {
            ring: Arc::clone(ring),
            coeffs: coeffs_low_to_high.iter().map(|&c| ring.repr_from_i64(c)).collect(),
        })
    }

    pub fn from_residues(coeffs: &[Residue]) -> Result<Self> {
        let first = coeffs
            .first()
            .ok_or_else(|| Error::BadParam("a polynomial needs at least one coefficient".into()))?;
        for c in coeffs {
            first.ring().check_same(c.ring())?;
        }
        Ok(Poly {
            ring: Arc::clone(first.ring()),
            coeffs: coeffs.iter().map(|c| c.value.clone()).collect(),
        })
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> Vec<Residue> {
        self.coeffs.iter().map(|c| self.ring.wrap(c.clone())).collect()
    }

    pub fn leading_coefficient(&self) -> Residue {
        self.ring.wrap(self.coeffs[self.degree()].clone())
    }

    pub fn eval(&self, x: &Residue) -> Result<Residue> {
        self.ring.check_same(x.ring())?;
        let r = self.ring.as_ref();
        let acc = self.coeffs.iter().rev().fold(r.zero(), |acc, c| r.add(&r.mul(&acc, &x.value), c));
        Ok(self.ring.wrap(acc))
    }

    pub fn reduce(&self, target: &Arc<RingSpec>) -> Result<Poly> {
        if target.p() != self.ring.p() || target.n() > self.ring.n() {
            return Err(Error::BadParam(format!("cannot reduce {} to {}", self.ring, target)));
        }
        Ok(Poly {
            ring: Arc::clone(target),
            coeffs: self.coeffs.iter().map(|c| target.repr_from_biguint(&c.to_biguint())).collect(),
        })
    }
}

/// Monic characteristic polynomial of a square matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharPoly(Poly);

impl CharPoly {
    pub(crate) fn from_coeffs(ring: &Arc<RingSpec>, coeffs: Vec<Repr>) -> Self {
        debug_assert!(coeffs.last() == Some(&ring.one()));
        CharPoly(Poly {
            ring: Arc::clone(ring),
            coeffs,
        })
    }

    /// (x - 1)^m over the given ring.
    pub fn unipotent(ring: &Arc<RingSpec>, m: usize) -> Self {
        let r = ring.as_ref();
        let mut coeffs = vec![r.one()];
        for _ in 0..m {
            let mut next = vec![r.zero(); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = r.add(&next[k + 1], c);
                next[k] = r.sub(&next[k], c);
            }
            coeffs = next;
        }
        Self::from_coeffs(ring, coeffs)
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        self.0.ring()
    }

    pub fn coefficients(&self) -> Vec<Residue> {
        self.0.coefficients()
    }

    pub fn reduce(&self, target: &Arc<RingSpec>) -> Result<CharPoly> {
        self.0.reduce(target).map(CharPoly)
    }
}

/// f(bx), keeping the nominal degree even when b^m is a zero divisor.
pub fn substitute_bx(f: &CharPoly, b: &Residue) -> Result<Poly> {
    let ring = f.ring();
    ring.check_same(b.ring())?;
    Ok(Poly {
        ring: Arc::clone(ring),
        coeffs: linalg::substitute_bx(ring.as_ref(), &f.0.coeffs, &b.value),
    })
}

/// Determinant of the Sylvester matrix at the nominal degrees.
pub fn resultant(f: &Poly, g: &Poly) -> Result<Residue> {
    f.ring.check_same(&g.ring)?;
    Ok(f.ring.wrap(linalg::resultant(f.ring.as_ref(), &f.coeffs, &g.coeffs)))
}

/// The ramification invariant F(A, b) = Res(f_A(x), f_A(bx)).
pub fn resultant_invariant(a: &ResidueMatrix, b: &Residue) -> Result<Residue> {
    let f = a.char_poly();
    let g = substitute_bx(&f, b)?;
    resultant(f.as_poly(), &g)
}
