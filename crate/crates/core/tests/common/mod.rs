//! Reference implementations that share no code with the library: exact
//! rational linear algebra over Q, plain i64 loops over Z/p^n, trial division.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Determinant by fraction-exact Gaussian elimination.
pub fn det_rational(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let pv = a[col][col].clone();
        det *= &pv;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &pv;
            for c in col..n {
                let sub = &factor * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

fn mat_mul_q(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(BigRational::zero(), |acc, k| acc + &a[i][k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Characteristic polynomial det(xI - A) over Z by Faddeev-LeVerrier,
/// coefficients low-to-high.
pub fn charpoly_faddeev(a: &[Vec<i64>]) -> Vec<BigInt> {
    let n = a.len();
    let aq: Vec<Vec<BigRational>> = a
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect())
        .collect();
    let ident = |c: &BigRational| -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { c.clone() } else { BigRational::zero() }).collect())
            .collect()
    };
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = ident(&BigRational::zero());
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let prev = mat_mul_q(&aq, &m);
        let cprev = coeffs[n - k + 1].clone();
        m = prev;
        for i in 0..n {
            m[i][i] += &cprev;
        }
        let am = mat_mul_q(&aq, &m);
        let tr = (0..n).fold(BigRational::zero(), |acc, i| acc + &am[i][i]);
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    coeffs
        .into_iter()
        .map(|c| {
            assert!(c.is_integer());
            c.to_integer()
        })
        .collect()
}

/// Sylvester determinant of f and g at their nominal degrees, over Z.
pub fn resultant_exact(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let df = f.len() - 1;
    let dg = g.len() - 1;
    let size = df + dg;
    if size == 0 {
        return BigInt::one();
    }
    let mut rows = vec![vec![BigInt::zero(); size]; size];
    for i in 0..dg {
        for (k, c) in f.iter().rev().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..df {
        for (k, c) in g.iter().rev().enumerate() {
            rows[dg + i][i + k] = c.clone();
        }
    }
    det_rational(&rows)
}

/// Res(f_A(x), f_A(bx)) over Z.
pub fn invariant_exact(a: &[Vec<i64>], b: i64) -> BigInt {
    let f = charpoly_faddeev(a);
    let bb = BigInt::from(b);
    let mut power = BigInt::one();
    let g: Vec<BigInt> = f
        .iter()
        .map(|c| {
            let v = c * &power;
            power *= &bb;
            v
        })
        .collect();
    resultant_exact(&f, &g)
}

pub fn reduce(v: &BigInt, modulus: u64) -> u64 {
    v.mod_floor(&BigInt::from(modulus)).to_u64().unwrap()
}

/// F for 2x2 matrices in closed form: (b-1)^2 d (d(1+b)^2 - b t^2).
pub fn invariant_2x2(t: i64, d: i64, b: i64, modulus: i64) -> i64 {
    let r = |v: i128| v.rem_euclid(modulus as i128);
    let (t, d, b) = (t as i128, d as i128, b as i128);
    let inner = r(d * r((1 + b) * (1 + b)) - b * r(t * t));
    r(r(r((b - 1) * (b - 1)) * d) * inner) as i64
}

/// All 2x2 matrices over Z/modulus as (a, b, c, d), row-major.
pub fn all_2x2(modulus: i64) -> impl Iterator<Item = [i64; 4]> {
    (0..modulus).flat_map(move |a| {
        (0..modulus).flat_map(move |b| (0..modulus).flat_map(move |c| (0..modulus).map(move |d| [a, b, c, d])))
    })
}

pub fn det2(m: &[i64; 4], modulus: i64) -> i64 {
    (m[0] * m[3] - m[1] * m[2]).rem_euclid(modulus)
}

pub fn tr2(m: &[i64; 4], modulus: i64) -> i64 {
    (m[0] + m[3]).rem_euclid(modulus)
}

pub fn mul2(x: &[i64; 4], y: &[i64; 4], modulus: i64) -> [i64; 4] {
    [
        (x[0] * y[0] + x[1] * y[2]).rem_euclid(modulus),
        (x[0] * y[1] + x[1] * y[3]).rem_euclid(modulus),
        (x[2] * y[0] + x[3] * y[2]).rem_euclid(modulus),
        (x[2] * y[1] + x[3] * y[3]).rem_euclid(modulus),
    ]
}

/// Naive count of (locus with det != 1 mod p, excluded with det == 1 mod p)
/// for the trace-determinant locus tr^2 = (1 + det)^2 inside GL_2(Z/p^n).
pub fn naive_detcoupled_counts(p: i64, n: u32) -> (u64, u64, u64) {
    let modulus = p.pow(n);
    let (mut group, mut locus, mut excluded) = (0u64, 0u64, 0u64);
    for m in all_2x2(modulus) {
        let d = det2(&m, modulus);
        if d % p == 0 {
            continue;
        }
        group += 1;
        let t = tr2(&m, modulus);
        if (t * t - (1 + d) * (1 + d)).rem_euclid(modulus) == 0 {
            if d % p == 1 % p {
                excluded += 1;
            } else {
                locus += 1;
            }
        }
    }
    (group, locus, excluded)
}

pub fn is_prime_trial(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn primes_trial(count: usize) -> Vec<u64> {
    (2u64..).filter(|&n| is_prime_trial(n)).take(count).collect()
}

/// Semistability threshold from the valuations of cyclotomic units.
///
/// Lists every k with phi(p^k) <= m, takes the largest valuation
/// m / phi(p^k) of (zeta_{p^k} - 1)^m, and returns the least integer strictly
/// above it. Roots of unity of order prime to p contribute valuation 0.
pub fn threshold_by_valuation(m: u64, p: u64) -> u64 {
    let mut best = BigRational::zero();
    let mut k = 1u32;
    loop {
        let phi = p.pow(k - 1) * (p - 1);
        if phi > m {
            break;
        }
        let v = BigRational::new(BigInt::from(m), BigInt::from(phi));
        if v > best {
            best = v;
        }
        k += 1;
    }
    let floor: BigInt = best.floor().to_integer();
    (floor + BigInt::one()).abs().to_u64().unwrap()
}
