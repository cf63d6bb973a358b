use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Univariate polynomial with arbitrary-precision integer coefficients,
/// stored in ascending order with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `X`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `X - a`.
    pub fn linear(a: BigInt) -> Self {
        Self::new(vec![-a, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Gcd of the coefficients, signed like the leading coefficient.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        if self.leading().is_negative() {
            -g
        } else {
            g
        }
    }

    /// `self / content`, so the result has positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content();
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * k).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `f(-X)`.
    pub fn negate_variable(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Exact division in `Z[X]`; `None` if `d` does not divide `self`.
    pub fn checked_div(&self, d: &IntPolynomial) -> Option<IntPolynomial> {
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let lc = d.leading();
        let dd = d.degree();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(&lc);
            if !r.is_zero() {
                return None;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| Self::new(quot))
    }

    /// Pseudo-remainder of `self` by `d`: `lc(d)^(deg - deg d + 1) * self mod d`.
    fn pseudo_rem(&self, d: &IntPolynomial) -> IntPolynomial {
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lc = d.leading();
        while r.len() > dd && !r.is_empty() {
            let top = r.last().unwrap().clone();
            let shift = r.len() - 1 - dd;
            for c in r.iter_mut() {
                *c *= &lc;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                r[shift + j] -= &top * c;
            }
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        Self::new(r)
    }

    /// Gcd in `Z[X]`, primitive with positive leading coefficient
    /// (times the gcd of contents).
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content().abs());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content().abs());
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.primitive_part(), other.primitive_part())
        } else {
            (other.primitive_part(), self.primitive_part())
        };
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part() };
        }
        a.primitive_part().scale(&c)
    }

    /// Square-free decomposition of a primitive polynomial (Yun):
    /// `self = prod a_i^i` with pairwise coprime square-free `a_i`.
    /// Returns the nonconstant `(a_i, i)`.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, u32)> {
        let f = self.primitive_part();
        let mut out = Vec::new();
        if f.degree() == 0 {
            return out;
        }
        let df = f.derivative();
        let a0 = f.gcd(&df);
        let mut b = f.checked_div(&a0).expect("gcd divides f");
        let mut c = df.checked_div(&a0).expect("gcd divides f'");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            b = b.checked_div(&a).expect("gcd divides b");
            c = d.checked_div(&a).expect("gcd divides d");
            d = &c - &b.derivative();
            if a.degree() > 0 {
                out.push((a.primitive_part(), i));
            }
            i += 1;
        }
        out
    }

    pub fn to_rational(&self) -> RatPolynomial {
        RatPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }
}

fn add_coeffs(a: &[BigInt], b: &[BigInt], sign: i8) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_default();
            match b.get(i) {
                Some(y) if sign > 0 => x + y,
                Some(y) => x - y,
                None => x,
            }
        })
        .collect()
}

impl Add for &IntPolynomial {
    type Output = IntPolynomial;
    fn add(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::new(add_coeffs(&self.coeffs, &rhs.coeffs, 1))
    }
}

impl Sub for &IntPolynomial {
    type Output = IntPolynomial;
    fn sub(self, rhs: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::new(add_coeffs(&self.coeffs, &rhs.coeffs, -1))
    }
}

impl Mul for &IntPolynomial {
    type Output = IntPolynomial;
    fn mul(self, rhs: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }
}

impl Neg for &IntPolynomial {
    type Output = IntPolynomial;
    fn neg(self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

fn write_terms<T: fmt::Display + Signed + Zero + One + Clone>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[T],
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else if c.is_negative() {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        first = false;
        let show_coeff = i == 0 || !mag.is_one();
        if show_coeff {
            write!(f, "{mag}")?;
            if i > 0 {
                write!(f, "*")?;
            }
        }
        match i {
            0 => {}
            1 => write!(f, "x")?,
            _ => write!(f, "x^{i}")?,
        }
    }
    Ok(())
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs)
    }
}

/// Polynomial over the rationals, ascending coefficients, trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    /// The integer polynomial with the same coefficients, if all are integral.
    pub fn to_integral(&self) -> Option<IntPolynomial> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPolynomial::new)
    }

    /// Primitive integer polynomial with positive leading coefficient
    /// proportional to `self`.
    pub fn primitive_integral(&self) -> IntPolynomial {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        IntPolynomial::new(
            self.coeffs
                .iter()
                .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
                .collect(),
        )
        .primitive_part()
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn display_and_degree() {
        assert_eq!(p(&[-1, -1, 1]).to_string(), "x^2 - x - 1");
        assert_eq!(p(&[0, 0, 0]).to_string(), "0");
        assert_eq!(p(&[3, 0, -2]).to_string(), "-2*x^2 + 3");
        assert_eq!(p(&[1, 2, 0]).degree(), 1);
    }

    #[test]
    fn exact_division() {
        let f = &p(&[-1, 1]) * &p(&[1, 1]);
        assert_eq!(f.checked_div(&p(&[1, 1])), Some(p(&[-1, 1])));
        assert_eq!(f.checked_div(&p(&[2, 1])), None);
        assert_eq!(p(&[2, 2]).checked_div(&p(&[1, 2])), None);
    }

    #[test]
    fn gcd_and_squarefree() {
        let a = p(&[-1, 1]);
        let b = p(&[2, 0, 1]);
        let f = &(&a.pow(3) * &b) * &p(&[5, 1]).pow(2);
        let g = f.gcd(&f.derivative());
        assert_eq!(g, &a.pow(2) * &p(&[5, 1]));
        let sqf = f.squarefree_decomposition();
        assert_eq!(sqf, vec![(b, 1), (p(&[5, 1]), 2), (a, 3)]);
    }

    #[test]
    fn content_has_sign_of_leading() {
        assert_eq!(p(&[4, -6]).content(), BigInt::from(-2));
        assert_eq!(p(&[4, -6]).primitive_part(), p(&[-2, 3]));
    }
}
