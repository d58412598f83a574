//! Square matrices over Z/p^n.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::JsonInt;
use crate::linalg;
use crate::padic::{Arith, Repr, Residue, RingSpec};
use crate::poly::CharPoly;

/// An m x m matrix whose entries share one coefficient ring.
#[derive(Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    ring: Arc<RingSpec>,
    m: usize,
    entries: Vec<Repr>,
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.m)
            .map(|i| (0..self.m).map(|j| self.entries[i * self.m + j].to_biguint().to_string()).collect())
            .collect();
        write!(f, "{:?} mod {}", rows, self.ring.modulus())
    }
}

impl ResidueMatrix {
    pub(crate) fn from_reprs(ring: &Arc<RingSpec>, m: usize, entries: Vec<Repr>) -> Self {
        debug_assert_eq!(entries.len(), m * m);
        ResidueMatrix {
            ring: Arc::clone(ring),
            m,
            entries,
        }
    }

    /// Builds a matrix from row-major integers, reducing each into the ring.
    pub fn from_entries(ring: &Arc<RingSpec>, m: usize, entries: &[i64]) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadParam("matrix dimension must be at least 1".into()));
        }
        if entries.len() != m * m {
            return Err(Error::DimMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        Ok(Self::from_reprs(ring, m, entries.iter().map(|&v| ring.repr_from_i64(v)).collect()))
    }

    pub fn from_rows(ring: &Arc<RingSpec>, rows: &[Vec<i64>]) -> Result<Self> {
        let m = rows.len();
        let mut flat = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_entries(ring, m, &flat)
    }

    pub fn from_bigints(ring: &Arc<RingSpec>, m: usize, entries: &[BigInt]) -> Result<Self> {
        if m == 0 || entries.len() != m * m {
            return Err(Error::DimMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        Ok(Self::from_reprs(ring, m, entries.iter().map(|v| ring.repr_from_bigint(v)).collect()))
    }

    pub fn from_residues(m: usize, entries: &[Residue]) -> Result<Self> {
        let first = entries.first().ok_or(Error::DimMismatch { expected: m * m, found: 0 })?;
        if entries.len() != m * m {
            return Err(Error::DimMismatch {
                expected: m * m,
                found: entries.len(),
            });
        }
        for e in entries {
            first.ring().check_same(e.ring())?;
        }
        Ok(Self::from_reprs(first.ring(), m, entries.iter().map(|e| e.value.clone()).collect()))
    }

    pub fn identity(ring: &Arc<RingSpec>, m: usize) -> Self {
        Self::from_reprs(ring, m, linalg::identity(ring.as_ref(), m))
    }

    pub fn diag(ring: &Arc<RingSpec>, diagonal: &[i64]) -> Self {
        let m = diagonal.len();
        let mut entries = vec![ring.zero(); m * m];
        for (i, &d) in diagonal.iter().enumerate() {
            entries[i * m + i] = ring.repr_from_i64(d);
        }
        Self::from_reprs(ring, m, entries)
    }

    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Residue {
        self.ring.wrap(self.entries[i * self.m + j].clone())
    }

    /// Row-major canonical representatives.
    pub fn values(&self) -> Vec<BigUint> {
        self.entries.iter().map(Repr::to_biguint).collect()
    }

    fn check_compatible(&self, other: &ResidueMatrix) -> Result<()> {
        self.ring.check_same(&other.ring)?;
        if self.m != other.m {
            return Err(Error::DimMismatch {
                expected: self.m,
                found: other.m,
            });
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &ResidueMatrix) -> Result<ResidueMatrix> {
        self.check_compatible(other)?;
        let out = linalg::mat_mul(self.ring.as_ref(), &self.entries, &other.entries, self.m);
        Ok(Self::from_reprs(&self.ring, self.m, out))
    }

    pub fn sub(&self, other: &ResidueMatrix) -> Result<ResidueMatrix> {
        self.check_compatible(other)?;
        let r = self.ring.as_ref();
        let out = self.entries.iter().zip(&other.entries).map(|(a, b)| r.sub(a, b)).collect();
        Ok(Self::from_reprs(&self.ring, self.m, out))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ring.repr_is_zero(e))
    }

    pub fn is_identity(&self) -> bool {
        self.entries == linalg::identity(self.ring.as_ref(), self.m)
    }

    pub fn trace(&self) -> Residue {
        let r = self.ring.as_ref();
        let t = (0..self.m).fold(r.zero(), |acc, i| r.add(&acc, &self.entries[i * self.m + i]));
        self.ring.wrap(t)
    }

    /// Division-free determinant: cofactor expansion for m <= 4, Berkowitz beyond.
    pub fn det(&self) -> Residue {
        self.ring.wrap(linalg::det(self.ring.as_ref(), &self.entries, self.m))
    }

    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    /// Inverse as adjugate times the inverse determinant.
    pub fn mat_inv(&self) -> Result<ResidueMatrix> {
        let det = self.det();
        if !det.is_unit() {
            return Err(Error::NonInvertible { det: det.value() });
        }
        let r = self.ring.as_ref();
        let det_inv = det.inv()?.value;
        let m = self.m;
        let mut out = vec![r.zero(); m * m];
        if m == 1 {
            out[0] = det_inv;
            return Ok(Self::from_reprs(&self.ring, m, out));
        }
        let mut minor = Vec::with_capacity((m - 1) * (m - 1));
        for i in 0..m {
            for j in 0..m {
                minor.clear();
                for (row, chunk) in self.entries.chunks(m).enumerate() {
                    if row == i {
                        continue;
                    }
                    for (col, e) in chunk.iter().enumerate() {
                        if col != j {
                            minor.push(e.clone());
                        }
                    }
                }
                let cof = linalg::det(r, &minor, m - 1);
                let cof = if (i + j) % 2 == 0 { cof } else { r.neg(&cof) };
                // adjugate is the transposed cofactor matrix
                out[j * m + i] = r.mul(&cof, &det_inv);
            }
        }
        Ok(Self::from_reprs(&self.ring, m, out))
    }

    pub fn pow(&self, exp: &BigUint) -> ResidueMatrix {
        let r = self.ring.as_ref();
        match exp.to_u64() {
            Some(e) => Self::from_reprs(&self.ring, self.m, linalg::mat_pow(r, &self.entries, self.m, e)),
            None => {
                let mut acc = linalg::identity(r, self.m);
                for bit in (0..exp.bits()).rev() {
                    acc = linalg::mat_mul(r, &acc, &acc, self.m);
                    if exp.bit(bit) {
                        acc = linalg::mat_mul(r, &acc, &self.entries, self.m);
                    }
                }
                Self::from_reprs(&self.ring, self.m, acc)
            }
        }
    }

    /// P A P^-1.
    pub fn conjugate_by(&self, p: &ResidueMatrix) -> Result<ResidueMatrix> {
        p.mat_mul(self)?.mat_mul(&p.mat_inv()?)
    }

    /// Characteristic polynomial det(xI - A) via Berkowitz; never divides.
    pub fn char_poly(&self) -> CharPoly {
        CharPoly::from_coeffs(&self.ring, linalg::berkowitz(self.ring.as_ref(), &self.entries, self.m))
    }

    /// True iff (A - I)^m vanishes mod p^n.
    pub fn is_unipotent(&self) -> bool {
        let r = self.ring.as_ref();
        let shifted = self.sub(&Self::identity(&self.ring, self.m)).expect("same shape");
        let power = linalg::mat_pow(r, &shifted.entries, self.m, self.m as u64);
        power.iter().all(|e| r.repr_is_zero(e))
    }

    /// Entry-wise image in Z/p^k for k <= n.
    pub fn reduce(&self, target: &Arc<RingSpec>) -> Result<ResidueMatrix> {
        if target.p() != self.ring.p() || target.n() > self.ring.n() {
            return Err(Error::BadParam(format!("cannot reduce {} to {}", self.ring, target)));
        }
        let entries = self.entries.iter().map(|e| target.repr_from_biguint(&e.to_biguint())).collect();
        Ok(Self::from_reprs(target, self.m, entries))
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            p: self.ring.p(),
            n: self.ring.n(),
            m: self.m,
            entries: self.values().into_iter().map(JsonInt::from).collect(),
        }
    }

    pub fn rows_json(&self) -> Vec<Vec<JsonInt>> {
        self.values().chunks(self.m).map(|row| row.iter().map(JsonInt::from).collect()).collect()
    }
}

/// Wire form of a matrix: `{p, n, m}` header plus row-major entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u64,
    pub n: u32,
    pub m: usize,
    pub entries: Vec<JsonInt>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ResidueMatrix> {
        let ring = RingSpec::new(self.p, self.n)?;
        let entries: Vec<BigInt> = self.entries.iter().map(|e| e.0.clone()).collect();
        ResidueMatrix::from_bigints(&ring, self.m, &entries)
    }
}

/// Builds a matrix from nested JSON rows over a given ring.
pub fn matrix_from_rows_json(ring: &Arc<RingSpec>, rows: &[Vec<JsonInt>]) -> Result<ResidueMatrix> {
    let m = rows.len();
    let mut flat = Vec::with_capacity(m * m);
    for row in rows {
        if row.len() != m {
            return Err(Error::DimMismatch {
                expected: m,
                found: row.len(),
            });
        }
        flat.extend(row.iter().map(|e| e.0.clone()));
    }
    ResidueMatrix::from_bigints(ring, m, &flat)
}
