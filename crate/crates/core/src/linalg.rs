//! Division-free kernels over any [`Arith`] ring: products, cofactor and
//! Berkowitz determinants, characteristic polynomials and Sylvester matrices.
//!
//! Matrices are row-major slices of length `m * m`. Nothing here divides, so
//! every routine is valid over Z/p^n despite its zero divisors.

use crate::padic::Arith;

pub(crate) fn mat_mul<R: Arith>(r: &R, a: &[R::Elem], b: &[R::Elem], m: usize) -> Vec<R::Elem> {
    let mut out = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let mut acc = r.zero();
            for k in 0..m {
                acc = r.add(&acc, &r.mul(&a[i * m + k], &b[k * m + j]));
            }
            out.push(acc);
        }
    }
    out
}

pub(crate) fn identity<R: Arith>(r: &R, m: usize) -> Vec<R::Elem> {
    (0..m * m)
        .map(|idx| if idx / m == idx % m { r.one() } else { r.zero() })
        .collect()
}

pub(crate) fn mat_pow<R: Arith>(r: &R, a: &[R::Elem], m: usize, mut exp: u64) -> Vec<R::Elem> {
    let mut acc = identity(r, m);
    let mut base = a.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mat_mul(r, &acc, &base, m);
        }
        exp >>= 1;
        if exp > 0 {
            base = mat_mul(r, &base, &base, m);
        }
    }
    acc
}

/// Laplace expansion along successive rows; columns still in play are kept
/// in a bitmask so no minors are materialized.
fn cofactor_rec<R: Arith>(r: &R, a: &[R::Elem], m: usize, row: usize, cols: u32) -> R::Elem {
    if row == m {
        return r.one();
    }
    let mut acc = r.zero();
    let mut sign_positive = true;
    for j in 0..m {
        if cols & (1 << j) == 0 {
            continue;
        }
        let entry = &a[row * m + j];
        let term = r.mul(entry, &cofactor_rec(r, a, m, row + 1, cols & !(1 << j)));
        acc = if sign_positive {
            r.add(&acc, &term)
        } else {
            r.sub(&acc, &term)
        };
        sign_positive = !sign_positive;
    }
    acc
}

pub(crate) fn det_cofactor<R: Arith>(r: &R, a: &[R::Elem], m: usize) -> R::Elem {
    debug_assert!(m < 32);
    cofactor_rec(r, a, m, 0, (1u32 << m) - 1)
}

/// Characteristic polynomial det(xI - A) by Berkowitz's algorithm.
/// Coefficients are returned low-to-high; the last one is 1.
pub(crate) fn berkowitz<R: Arith>(r: &R, a: &[R::Elem], m: usize) -> Vec<R::Elem> {
    // high-to-low while iterating
    let mut poly = vec![r.one()];
    for k in 0..m {
        let mut col = Vec::with_capacity(k + 2);
        col.push(r.one());
        col.push(r.neg(&a[k * m + k]));
        // v runs through M^i C, M the leading k x k block, C column k above the diagonal
        let mut v: Vec<R::Elem> = (0..k).map(|i| a[i * m + k].clone()).collect();
        for step in 0..k {
            let mut dot = r.zero();
            for (j, vj) in v.iter().enumerate() {
                dot = r.add(&dot, &r.mul(&a[k * m + j], vj));
            }
            col.push(r.neg(&dot));
            if step + 1 < k {
                v = (0..k)
                    .map(|i| {
                        let mut acc = r.zero();
                        for (j, vj) in v.iter().enumerate() {
                            acc = r.add(&acc, &r.mul(&a[i * m + j], vj));
                        }
                        acc
                    })
                    .collect();
            }
        }
        let next: Vec<R::Elem> = (0..k + 2)
            .map(|i| {
                let mut acc = r.zero();
                for (j, pj) in poly.iter().enumerate().take(i + 1) {
                    acc = r.add(&acc, &r.mul(&col[i - j], pj));
                }
                acc
            })
            .collect();
        poly = next;
    }
    poly.reverse();
    poly
}

/// Cofactor expansion up to 4x4, Berkowitz beyond.
pub(crate) fn det<R: Arith>(r: &R, a: &[R::Elem], m: usize) -> R::Elem {
    if m <= 4 {
        det_cofactor(r, a, m)
    } else {
        let cp = berkowitz(r, a, m);
        if m % 2 == 0 {
            cp[0].clone()
        } else {
            r.neg(&cp[0])
        }
    }
}

/// Sylvester matrix of `f` and `g` at their nominal degrees (coefficients
/// low-to-high, degree = len - 1). Leading coefficients may be zero divisors.
pub(crate) fn sylvester<R: Arith>(r: &R, f: &[R::Elem], g: &[R::Elem]) -> (Vec<R::Elem>, usize) {
    let df = f.len() - 1;
    let dg = g.len() - 1;
    let size = df + dg;
    let mut s = vec![r.zero(); size * size];
    for i in 0..dg {
        for t in 0..=df {
            s[i * size + i + t] = f[df - t].clone();
        }
    }
    for i in 0..df {
        for t in 0..=dg {
            s[(dg + i) * size + i + t] = g[dg - t].clone();
        }
    }
    (s, size)
}

pub(crate) fn resultant<R: Arith>(r: &R, f: &[R::Elem], g: &[R::Elem]) -> R::Elem {
    let (s, size) = sylvester(r, f, g);
    det(r, &s, size)
}

/// Coefficients of f(bx): the x^k coefficient scaled by b^k.
pub(crate) fn substitute_bx<R: Arith>(r: &R, f: &[R::Elem], b: &R::Elem) -> Vec<R::Elem> {
    let mut scale = r.one();
    f.iter()
        .map(|c| {
            let out = r.mul(c, &scale);
            scale = r.mul(&scale, b);
            out
        })
        .collect()
}

/// F(A, b) = Res(f_A(x), f_A(bx)).
pub(crate) fn resultant_invariant<R: Arith>(r: &R, a: &[R::Elem], m: usize, b: &R::Elem) -> R::Elem {
    let f = berkowitz(r, a, m);
    let g = substitute_bx(r, &f, b);
    resultant(r, &f, &g)
}
