//! Manin symbols `[X^i Y^(k-2-i), (u, v)]` and the right action of integer
//! matrices on them: `[P, (u,v)] g = [P(aX + bY, cX + dY), (ua + vc, ub + vd)]`.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

/// Coefficients (indexed by the exponent of `X`) of
/// `(aX + bY)^i (cX + dY)^(w - i)`.
pub fn monomial_action(i: usize, w: usize, a: i64, b: i64, c: i64, d: i64) -> Vec<BigInt> {
    if let Some(small) = monomial_action_i128(i, w, a, b, c, d) {
        return small.into_iter().map(BigInt::from).collect();
    }
    let left = binomial_expand_big(i, &BigInt::from(a), &BigInt::from(b));
    let right = binomial_expand_big(w - i, &BigInt::from(c), &BigInt::from(d));
    let mut out = vec![BigInt::zero(); w + 1];
    for (s, x) in left.iter().enumerate() {
        for (t, y) in right.iter().enumerate() {
            out[s + t] += x * y;
        }
    }
    out
}

/// Same as [`monomial_action`] in `i128`, `None` on overflow.
pub fn monomial_action_i128(i: usize, w: usize, a: i64, b: i64, c: i64, d: i64) -> Option<Vec<i128>> {
    let left = binomial_expand(i, a as i128, b as i128)?;
    let right = binomial_expand(w - i, c as i128, d as i128)?;
    let mut out = vec![0i128; w + 1];
    for (s, x) in left.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (t, y) in right.iter().enumerate() {
            out[s + t] = out[s + t].checked_add(x.checked_mul(*y)?)?;
        }
    }
    Some(out)
}

/// Coefficients of `(xX + yY)^n` by exponent of `X`.
fn binomial_expand(n: usize, x: i128, y: i128) -> Option<Vec<i128>> {
    let mut out = vec![0i128; n + 1];
    let mut binom: i128 = 1;
    for s in 0..=n {
        if s > 0 {
            binom = binom * (n - s + 1) as i128 / s as i128;
        }
        let xs = x.checked_pow(s as u32)?;
        let ys = y.checked_pow((n - s) as u32)?;
        out[s] = binom.checked_mul(xs)?.checked_mul(ys)?;
    }
    Some(out)
}

fn binomial_expand_big(n: usize, x: &BigInt, y: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(n + 1);
    let mut binom = BigInt::from(1);
    for s in 0..=n {
        if s > 0 {
            binom = binom * BigInt::from(n - s + 1) / BigInt::from(s);
        }
        out.push(&binom * x.pow(s as u32) * y.pow((n - s) as u32));
    }
    out
}

/// Applies `(aX + bY, cX + dY)` to a general homogeneous polynomial of
/// degree `w` given by its coefficients on `X^j Y^(w-j)`.
pub fn polynomial_action(poly: &[BigInt], a: i64, b: i64, c: i64, d: i64) -> Vec<BigInt> {
    let w = poly.len() - 1;
    let mut out = vec![BigInt::zero(); w + 1];
    for (i, coef) in poly.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        for (j, x) in monomial_action(i, w, a, b, c, d).into_iter().enumerate() {
            out[j] += coef * x;
        }
    }
    out
}

/// Like [`polynomial_action`] with arbitrary-precision matrix entries.
pub fn polynomial_action_big(poly: &[BigInt], a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> Vec<BigInt> {
    let small = [a, b, c, d].map(|x| x.to_i64());
    if let [Some(a), Some(b), Some(c), Some(d)] = small {
        return polynomial_action(poly, a, b, c, d);
    }
    let w = poly.len() - 1;
    let mut out = vec![BigInt::zero(); w + 1];
    for (i, coef) in poly.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        let left = binomial_expand_big(i, a, b);
        let right = binomial_expand_big(w - i, c, d);
        for (s, x) in left.iter().enumerate() {
            for (t, y) in right.iter().enumerate() {
                out[s + t] += coef * x * y;
            }
        }
    }
    out
}
