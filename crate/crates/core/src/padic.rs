//! Arithmetic in the truncated ring Z/p^n.
//!
//! Residues are stored as canonical least nonnegative representatives. When
//! p^n fits comfortably in a machine word (below 2^63) every operation runs on
//! `u64` with `u128` products; larger moduli fall back to `BigUint`.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const SMALL_LIMIT: u64 = 1 << 63;

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Distinct prime factors by trial division.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Internal representation of a residue value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum Repr {
    Small(u64),
    Big(BigUint),
}

impl Repr {
    pub(crate) fn to_biguint(&self) -> BigUint {
        match self {
            Repr::Small(v) => BigUint::from(*v),
            Repr::Big(v) => v.clone(),
        }
    }
}

/// Minimal commutative-ring interface shared by the linear-algebra kernels.
///
/// Implemented by [`RingSpec`] (general residues) and [`SmallRing`] (raw
/// `u64` residues used by the enumeration and sampling kernels), so the same
/// Berkowitz and determinant code serves both.
pub(crate) trait Arith {
    type Elem: Clone + PartialEq;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.sub(&self.zero(), a)
    }
}

/// Z/m for m < 2^63 on bare `u64` values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SmallRing {
    pub modulus: u64,
}

impl Arith for SmallRing {
    type Elem = u64;
    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod_u64(*a, *b, self.modulus)
    }
}

/// The coefficient ring Z/p^n.
#[derive(Clone, Debug)]
pub struct RingSpec {
    p: u64,
    n: u32,
    modulus: BigUint,
    small: Option<u64>,
}

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n
    }
}

impl Eq for RingSpec {}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.p, self.n)
    }
}

impl RingSpec {
    pub fn new(p: u64, n: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::InvalidPrecision);
        }
        Ok(Arc::new(Self::build(p, n)))
    }

    fn build(p: u64, n: u32) -> Self {
        let modulus = BigUint::from(p).pow(n);
        let small = modulus.to_u64().filter(|&m| m < SMALL_LIMIT);
        RingSpec {
            p,
            n,
            modulus,
            small,
        }
    }

    /// Same prime at a different precision.
    pub fn with_precision(&self, n: u32) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidPrecision);
        }
        Ok(Arc::new(Self::build(self.p, n)))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// p^n as a `u64` when the fast path is active.
    pub fn small_modulus(&self) -> Option<u64> {
        self.small
    }

    pub(crate) fn small_ring(&self) -> Option<SmallRing> {
        self.small.map(|modulus| SmallRing { modulus })
    }

    /// Order of the unit group, p^(n-1)(p-1).
    pub fn unit_group_order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.n - 1) * BigUint::from(self.p - 1)
    }

    pub(crate) fn check_same(&self, other: &RingSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::RingMismatch {
                left: self.modulus.clone(),
                right: other.modulus.clone(),
            })
        }
    }

    pub(crate) fn repr_from_biguint(&self, v: &BigUint) -> Repr {
        match self.small {
            Some(m) => Repr::Small((v % m).to_u64().expect("reduced below modulus")),
            None => Repr::Big(v % &self.modulus),
        }
    }

    pub(crate) fn repr_from_bigint(&self, v: &BigInt) -> Repr {
        let modulus = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        let r = v.mod_floor(&modulus);
        self.repr_from_biguint(r.magnitude())
    }

    pub(crate) fn repr_from_i64(&self, v: i64) -> Repr {
        match self.small {
            Some(m) => Repr::Small((v as i128).rem_euclid(m as i128) as u64),
            None => self.repr_from_bigint(&BigInt::from(v)),
        }
    }

    /// Residue class of an arbitrary integer.
    pub fn residue(self: &Arc<Self>, v: i64) -> Residue {
        Residue {
            value: self.repr_from_i64(v),
            ring: Arc::clone(self),
        }
    }

    pub fn residue_from_bigint(self: &Arc<Self>, v: &BigInt) -> Residue {
        Residue {
            value: self.repr_from_bigint(v),
            ring: Arc::clone(self),
        }
    }

    pub fn residue_from_biguint(self: &Arc<Self>, v: &BigUint) -> Residue {
        Residue {
            value: self.repr_from_biguint(v),
            ring: Arc::clone(self),
        }
    }

    pub(crate) fn wrap(self: &Arc<Self>, value: Repr) -> Residue {
        Residue {
            value,
            ring: Arc::clone(self),
        }
    }

    pub(crate) fn repr_is_zero(&self, a: &Repr) -> bool {
        match a {
            Repr::Small(v) => *v == 0,
            Repr::Big(v) => v.is_zero(),
        }
    }

    pub(crate) fn repr_is_unit(&self, a: &Repr) -> bool {
        match a {
            Repr::Small(v) => v % self.p != 0,
            Repr::Big(v) => !(v % self.p).is_zero(),
        }
    }

    pub(crate) fn repr_valuation(&self, a: &Repr) -> u32 {
        let mut v = a.to_biguint();
        if v.is_zero() {
            return self.n;
        }
        let p = BigUint::from(self.p);
        let mut val = 0;
        while val < self.n && (&v % &p).is_zero() {
            v /= &p;
            val += 1;
        }
        val
    }

    pub(crate) fn repr_pow(&self, base: &Repr, exp: &BigUint) -> Repr {
        match (base, self.small) {
            (Repr::Small(b), Some(m)) => match exp.to_u64() {
                Some(e) => Repr::Small(pow_mod_u64(*b, e, m)),
                None => Repr::Small(
                    BigUint::from(*b)
                        .modpow(exp, &self.modulus)
                        .to_u64()
                        .expect("reduced"),
                ),
            },
            _ => Repr::Big(base.to_biguint().modpow(exp, &self.modulus)),
        }
    }

    pub(crate) fn repr_inv(&self, a: &Repr) -> Result<Repr> {
        if !self.repr_is_unit(a) {
            return Err(Error::NonUnit(a.to_biguint()));
        }
        let modulus = BigInt::from_biguint(Sign::Plus, self.modulus.clone());
        let value = BigInt::from_biguint(Sign::Plus, a.to_biguint());
        let egcd = value.extended_gcd(&modulus);
        debug_assert!(egcd.gcd.is_one());
        Ok(self.repr_from_bigint(&egcd.x))
    }
}

impl Arith for RingSpec {
    type Elem = Repr;

    fn zero(&self) -> Repr {
        match self.small {
            Some(_) => Repr::Small(0),
            None => Repr::Big(BigUint::zero()),
        }
    }

    fn one(&self) -> Repr {
        match self.small {
            Some(m) => Repr::Small(1 % m),
            None => Repr::Big(BigUint::one()),
        }
    }

    fn add(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b, self.small) {
            (Repr::Small(x), Repr::Small(y), Some(m)) => Repr::Small(SmallRing { modulus: m }.add(x, y)),
            _ => Repr::Big((a.to_biguint() + b.to_biguint()) % &self.modulus),
        }
    }

    fn sub(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b, self.small) {
            (Repr::Small(x), Repr::Small(y), Some(m)) => Repr::Small(SmallRing { modulus: m }.sub(x, y)),
            _ => Repr::Big((a.to_biguint() + &self.modulus - b.to_biguint()) % &self.modulus),
        }
    }

    fn mul(&self, a: &Repr, b: &Repr) -> Repr {
        match (a, b, self.small) {
            (Repr::Small(x), Repr::Small(y), Some(m)) => Repr::Small(mul_mod_u64(*x, *y, m)),
            _ => Repr::Big((a.to_biguint() * b.to_biguint()) % &self.modulus),
        }
    }
}

/// An element of Z/p^n.
#[derive(Clone, PartialEq, Eq)]
pub struct Residue {
    pub(crate) value: Repr,
    pub(crate) ring: Arc<RingSpec>,
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value(), self.ring.modulus)
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl Residue {
    pub fn ring(&self) -> &Arc<RingSpec> {
        &self.ring
    }

    /// Canonical representative in `[0, p^n)`.
    pub fn value(&self) -> BigUint {
        self.value.to_biguint()
    }

    pub fn to_u64(&self) -> Option<u64> {
        match &self.value {
            Repr::Small(v) => Some(*v),
            Repr::Big(v) => v.to_u64(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ring.repr_is_zero(&self.value)
    }

    pub fn is_one(&self) -> bool {
        self.value == self.ring.one()
    }

    pub fn is_unit(&self) -> bool {
        self.ring.repr_is_unit(&self.value)
    }

    pub fn add(&self, other: &Residue) -> Result<Residue> {
        self.ring.check_same(&other.ring)?;
        Ok(self.ring.wrap(self.ring.add(&self.value, &other.value)))
    }

    pub fn sub(&self, other: &Residue) -> Result<Residue> {
        self.ring.check_same(&other.ring)?;
        Ok(self.ring.wrap(self.ring.sub(&self.value, &other.value)))
    }

    pub fn mul(&self, other: &Residue) -> Result<Residue> {
        self.ring.check_same(&other.ring)?;
        Ok(self.ring.wrap(self.ring.mul(&self.value, &other.value)))
    }

    pub fn neg(&self) -> Residue {
        self.ring.wrap(self.ring.neg(&self.value))
    }

    pub fn pow(&self, exp: &BigUint) -> Residue {
        self.ring.wrap(self.ring.repr_pow(&self.value, exp))
    }

    pub fn inv(&self) -> Result<Residue> {
        Ok(self.ring.wrap(self.ring.repr_inv(&self.value)?))
    }

    /// Largest `v <= n` with `p^v` dividing the representative; `n` for zero.
    pub fn valuation(&self) -> u32 {
        self.ring.repr_valuation(&self.value)
    }

    /// Multiplicative order in the unit group of Z/p^n.
    pub fn unit_order(&self) -> Result<BigUint> {
        if !self.is_unit() {
            return Err(Error::NonUnit(self.value()));
        }
        let ring = &self.ring;
        let mut order = ring.unit_group_order();
        let mut primes = prime_factors(ring.p - 1);
        if ring.n > 1 && !primes.contains(&ring.p) {
            primes.push(ring.p);
        }
        let one = ring.one();
        for l in primes {
            let l = BigUint::from(l);
            while (&order % &l).is_zero() {
                let candidate = &order / &l;
                if ring.repr_pow(&self.value, &candidate) == one {
                    order = candidate;
                } else {
                    break;
                }
            }
        }
        Ok(order)
    }

    /// Image under the reduction map Z/p^n -> Z/p^k for `k <= n`.
    pub fn reduce(&self, target: &Arc<RingSpec>) -> Result<Residue> {
        if target.p != self.ring.p || target.n > self.ring.n {
            return Err(Error::BadParam(format!(
                "cannot reduce {} to {}",
                self.ring, target
            )));
        }
        Ok(target.residue_from_biguint(&self.value()))
    }
}
