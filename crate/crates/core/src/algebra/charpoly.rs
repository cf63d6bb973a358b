//! Characteristic polynomials: clear denominators, run the Hessenberg
//! reduction modulo word-sized primes, recombine by CRT against a Hadamard
//! bound, then rescale back to the original matrix.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::BigRationalMatrix;
use super::poly::{IntPolynomial, RatPolynomial};
use super::AlgebraError;
use crate::arith::{is_prime, mul_mod, pow_mod};

/// Monic `det(X I - m)` over `Q`.
pub fn charpoly(m: &BigRationalMatrix) -> Result<RatPolynomial, AlgebraError> {
    if !m.is_square() {
        return Err(AlgebraError::Dimension(format!(
            "charpoly of a non-square {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    let rows = m.to_rows();
    let den = rows
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect())
        .collect();
    let chi = integer_charpoly(&int_rows);
    // chi_m(X) = den^{-n} chi_M(den X)
    let mut coeffs = Vec::with_capacity(n + 1);
    for (i, c) in chi.coeffs().iter().enumerate() {
        let scale = den.pow((n - i) as u32);
        coeffs.push(BigRational::new(c.clone(), scale));
    }
    Ok(RatPolynomial::new(coeffs))
}

/// Monic characteristic polynomial of an integer matrix.
pub fn integer_charpoly(a: &[Vec<BigInt>]) -> IntPolynomial {
    let n = a.len();
    if n == 0 {
        return IntPolynomial::one();
    }
    // |c_{n-i}| <= C(n,i) * beta^i with beta bounding the row Euclidean norms.
    let beta = a
        .iter()
        .map(|r| r.iter().map(|x| x * x).sum::<BigInt>())
        .max()
        .unwrap_or_default()
        .sqrt()
        + 1;
    let mut bound = BigInt::one();
    let mut binom = BigInt::one();
    let mut power = BigInt::one();
    for i in 1..=n {
        binom = binom * BigInt::from(n - i + 1) / BigInt::from(i);
        power *= &beta;
        let b = &binom * &power;
        if b > bound {
            bound = b;
        }
    }
    let needed = bound * 2 + 1;

    let mut modulus = BigInt::one();
    let mut residues: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    let mut p: u64 = (1u64 << 62) - 1;
    while modulus < needed {
        p -= 2;
        while !is_prime(p) {
            p -= 2;
        }
        let reduced: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|x| reduce(x, p)).collect()).collect();
        let chi = hessenberg_charpoly(reduced, p);
        // CRT: x = r + modulus * ((c - r) * modulus^{-1} mod p)
        let m_mod = reduce(&modulus, p);
        let m_inv = pow_mod(m_mod, p - 2, p);
        for (r, &c) in residues.iter_mut().zip(&chi) {
            let r_mod = reduce(r, p);
            let t = mul_mod((c + p - r_mod) % p, m_inv, p);
            *r += &modulus * BigInt::from(t);
        }
        modulus *= BigInt::from(p);
    }
    let half = &modulus >> 1;
    IntPolynomial::new(
        residues
            .into_iter()
            .map(|r| if r > half { r - &modulus } else { r })
            .collect(),
    )
}

fn reduce(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    match r.sign() {
        Sign::NoSign => 0,
        _ => r.to_u64().expect("residue fits in u64"),
    }
}

/// Characteristic polynomial over `F_p` by reduction to upper Hessenberg
/// form followed by the standard leading-minor recurrence. Ascending
/// coefficients, length `n + 1`.
pub fn hessenberg_charpoly(mut h: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = h.len();
    let sub = |a: u64, b: u64| if a >= b { a - b } else { a + p - b };
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m + 1..=n).find(|&i| h[i - 1][m - 1] != 0) else {
            continue;
        };
        let i = i - 1;
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let inv = pow_mod(h[m][m - 1], p - 2, p);
        for i in m + 1..n {
            let u = mul_mod(h[i][m - 1], inv, p);
            if u == 0 {
                continue;
            }
            for j in 0..n {
                let t = mul_mod(u, h[m][j], p);
                h[i][j] = sub(h[i][j], t);
            }
            for row in h.iter_mut() {
                let t = mul_mod(u, row[i], p);
                row[m] = (row[m] + t) % p;
            }
        }
    }
    // chars[k] = charpoly of the leading k x k block.
    let mut chars: Vec<Vec<u64>> = vec![vec![1]];
    for k in 0..n {
        let mut next = vec![0u64; k + 2];
        let prev = &chars[k];
        for (i, &c) in prev.iter().enumerate() {
            next[i + 1] = (next[i + 1] + c) % p;
            next[i] = sub(next[i], mul_mod(h[k][k], c, p));
        }
        let mut t = 1u64;
        for i in (0..k).rev() {
            t = mul_mod(t, h[i + 1][i], p);
            let coef = mul_mod(t, h[i][k], p);
            if coef == 0 {
                continue;
            }
            for (j, &c) in chars[i].iter().enumerate() {
                next[j] = sub(next[j], mul_mod(coef, c, p));
            }
        }
        chars.push(next);
    }
    chars.pop().unwrap()
}

/// Checks `|c_i| <= C(d, i) * r^i` for the coefficient of `X^(d-i)`, the
/// necessary condition for all complex roots to lie in `|z| <= r` where
/// `r^2 = r_sq` (an integer).
pub fn roots_bounded_by(poly: &IntPolynomial, r_sq: &BigInt) -> bool {
    let d = poly.degree();
    let mut binom = BigInt::one();
    for i in 0..=d {
        if i > 0 {
            binom = binom * BigInt::from(d - i + 1) / BigInt::from(i);
        }
        let c = poly.coeff(d - i).abs();
        // c <= binom * r^i  <=>  c^2 <= binom^2 * r_sq^i
        if &c * &c > &binom * &binom * r_sq.pow(i as u32) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::matrix::rat;

    #[test]
    fn small_examples() {
        let id = BigRationalMatrix::identity(2);
        assert_eq!(charpoly(&id).unwrap().to_integral().unwrap(), IntPolynomial::from_i64(&[1, -2, 1]));
        let z = BigRationalMatrix::zeros(3, 3);
        assert_eq!(charpoly(&z).unwrap().to_integral().unwrap(), IntPolynomial::from_i64(&[0, 0, 0, 1]));
        let fib = BigRationalMatrix::from_i64(&[vec![0, 1], vec![1, 1]]);
        assert_eq!(charpoly(&fib).unwrap().to_integral().unwrap(), IntPolynomial::from_i64(&[-1, -1, 1]));
        assert!(charpoly(&BigRationalMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn rational_entries() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let m = BigRationalMatrix::from_rows(2, vec![vec![half.clone(), rat(0)], vec![rat(3), half]]);
        let chi = charpoly(&m).unwrap();
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(chi.coeffs(), &[quarter, rat(-1), rat(1)]);
    }

    #[test]
    fn needs_pivoting() {
        // zero subdiagonal entry forces a row swap in the reduction
        let m = BigRationalMatrix::from_i64(&[vec![1, 2, 3], vec![0, 4, 5], vec![6, 0, 7]]);
        let chi = charpoly(&m).unwrap().to_integral().unwrap();
        // trace 12, det = 1*(28) - 2*(-30) + 3*(-24) = 16
        assert_eq!(chi.coeff(2), BigInt::from(-12));
        assert_eq!(chi.coeff(0), BigInt::from(-16));
    }
}
