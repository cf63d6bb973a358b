//! Factorization over `Z[X]`: square-free decomposition, factorization
//! modulo a small prime, quadratic Hensel lifting and subset recombination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::modp::PolyMod;
use super::poly::IntPolynomial;
use super::AlgebraError;
use crate::arith::is_prime;

/// `content * prod f_i^{e_i}` with primitive irreducible `f_i` of positive
/// leading coefficient, sorted by degree then coefficient list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub content: BigInt,
    pub factors: Vec<(IntPolynomial, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back out.
    pub fn expand(&self) -> IntPolynomial {
        let mut acc = IntPolynomial::constant(self.content.clone());
        for (f, e) in &self.factors {
            acc = &acc * &f.pow(*e);
        }
        acc
    }

    pub fn is_irreducible(&self) -> bool {
        self.content.abs().is_one() && self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn factor(f: &IntPolynomial) -> Result<Factorization, AlgebraError> {
    if f.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let content = f.content();
    let g = f.primitive_part();
    let mut factors = Vec::new();
    if g.degree() > 0 {
        let squarefree = if is_squarefree_fast(&g) {
            vec![(g.clone(), 1)]
        } else {
            g.squarefree_decomposition()
        };
        for (a, e) in squarefree {
            for h in factor_squarefree(&a) {
                factors.push((h, e));
            }
        }
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs().cmp(b.coeffs()))
    });
    Ok(Factorization { content, factors })
}

/// Irreducibility over `Q` with trivial content. Uses degree-pattern sieving
/// modulo several primes before falling back to [`factor`].
pub fn is_irreducible(f: &IntPolynomial) -> Result<bool, AlgebraError> {
    if f.is_zero() || f.degree() == 0 {
        return Err(AlgebraError::ConstantPolynomial);
    }
    if !f.content().abs().is_one() {
        return Ok(false);
    }
    let n = f.degree();
    if n == 1 {
        return Ok(true);
    }
    if n == 2 {
        let (a, b, c) = (f.coeff(2), f.coeff(1), f.coeff(0));
        let disc = &b * &b - BigInt::from(4) * a * c;
        return Ok(!is_square(&disc));
    }
    // Possible proper factor degrees still consistent with every prime seen.
    let mut possible = vec![true; n];
    possible[0] = false;
    let lc = f.leading();
    let mut good = 0;
    let mut q = 3u64;
    let mut tried = 0;
    while good < 6 && tried < 40 {
        tried += 1;
        if !is_prime(q) || (&lc % q).is_zero() {
            q += 2;
            continue;
        }
        let fq = PolyMod::from_bigint(q, f.coeffs());
        q += 2;
        if !fq.is_squarefree() {
            continue;
        }
        good += 1;
        let degrees = fq.factor_degrees();
        if degrees.len() == 1 {
            return Ok(true);
        }
        let sums = subset_sums(&degrees, n);
        for (d, ok) in possible.iter_mut().enumerate() {
            *ok = *ok && sums[d];
        }
        if !possible.iter().any(|&b| b) {
            return Ok(true);
        }
    }
    Ok(factor(f)?.is_irreducible())
}

fn subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach
}

fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

/// Square-free certificate: some small good prime keeps `f` square-free.
fn is_squarefree_fast(f: &IntPolynomial) -> bool {
    let lc = f.leading();
    let mut q = 3u64;
    let mut tried = 0;
    while tried < 5 {
        if is_prime(q) && !(&lc % q).is_zero() {
            tried += 1;
            if PolyMod::from_bigint(q, f.coeffs()).is_squarefree() {
                return true;
            }
        }
        q += 2;
    }
    false
}

/// Irreducible factors of a primitive square-free polynomial with positive
/// leading coefficient.
fn factor_squarefree(f: &IntPolynomial) -> Vec<IntPolynomial> {
    let f = f.primitive_part();
    if f.degree() <= 1 {
        return vec![f];
    }
    let lc = f.leading();
    let mut q = 3u64;
    let fq = loop {
        if is_prime(q) && !(&lc % q).is_zero() {
            let fq = PolyMod::from_bigint(q, f.coeffs());
            if fq.degree() == f.degree() && fq.is_squarefree() {
                break fq;
            }
        }
        q += 2;
    };
    let modular = fq.factor_squarefree();
    if modular.len() == 1 {
        return vec![f];
    }
    let n = f.degree() as u32;
    // Mignotte-style bound on coefficients of lc * g for any factor g of f.
    let norm2 = BigInt::from(n as u64 + 1).sqrt() + 1;
    let bound = lc.abs() * (BigInt::one() << n) * norm2 * f.max_abs_coeff();
    let target = bound * 2 + 1;
    let qb = BigInt::from(q);
    let mut modulus = qb.clone();
    while modulus < target {
        modulus = &modulus * &modulus;
    }
    let lifted = hensel_lift(&f, &modular, &qb, &modulus);
    recombine(f, lifted, &modulus)
}

fn sym_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a.mod_floor(m);
    if &r * 2 > *m {
        r - m
    } else {
        r
    }
}

/// Polynomial arithmetic modulo an integer `m`, coefficients kept in `[0, m)`.
struct ZnPoly;

impl ZnPoly {
    fn reduce(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    }

    fn mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        Self::reduce(&out, m)
    }

    fn add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let n = a.len().max(b.len());
        let v: Vec<BigInt> = (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
            .collect();
        Self::reduce(&v, m)
    }

    fn sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
        let n = a.len().max(b.len());
        let v: Vec<BigInt> = (0..n)
            .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
            .collect();
        Self::reduce(&v, m)
    }

    /// Division by a monic polynomial.
    fn div_rem_monic(a: &[BigInt], h: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
        let dh = h.len() - 1;
        if a.len() <= dh {
            return (Vec::new(), Self::reduce(a, m));
        }
        let mut r = a.to_vec();
        let mut q = vec![BigInt::zero(); a.len() - dh];
        for i in (0..q.len()).rev() {
            let t = r[i + dh].mod_floor(m);
            if t.is_zero() {
                continue;
            }
            for (j, c) in h.iter().enumerate() {
                r[i + j] -= &t * c;
            }
            q[i] = t;
        }
        (Self::reduce(&q, m), Self::reduce(&r, m))
    }
}

fn to_big(p: &PolyMod) -> Vec<BigInt> {
    p.c.iter().map(|&c| BigInt::from(c)).collect()
}

/// Bezout coefficients `s, t` over `F_q` with `s g + t h = 1`.
fn bezout(g: &PolyMod, h: &PolyMod) -> (PolyMod, PolyMod) {
    let q = g.p;
    let (mut r0, mut r1) = (g.clone(), h.clone());
    let (mut s0, mut s1) = (PolyMod::one(q), PolyMod::new(q, vec![]));
    let (mut t0, mut t1) = (PolyMod::new(q, vec![]), PolyMod::one(q));
    while !r1.is_zero() {
        let (quot, rem) = r0.div_rem(&r1);
        r0 = r1;
        r1 = rem;
        let s2 = s0.sub(&quot.mul(&s1));
        s0 = s1;
        s1 = s2;
        let t2 = t0.sub(&quot.mul(&t1));
        t0 = t1;
        t1 = t2;
    }
    let inv = crate::arith::pow_mod(r0.leading(), q - 2, q);
    (s0.scale(inv), t0.scale(inv))
}

/// Lifts `f = lc * prod(factors)` (mod `q`) to monic factors modulo `modulus`
/// using a balanced factor tree of quadratic Hensel steps.
fn hensel_lift(f: &IntPolynomial, factors: &[PolyMod], q: &BigInt, modulus: &BigInt) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(factors.len());
    lift_node(&ZnPoly::reduce(f.coeffs(), modulus), factors, q, modulus, &mut out);
    out
}

fn lift_node(f: &[BigInt], factors: &[PolyMod], q: &BigInt, modulus: &BigInt, out: &mut Vec<Vec<BigInt>>) {
    if factors.len() == 1 {
        let lc = f.last().expect("nonzero").clone();
        let inv = lc.modinv(modulus).expect("leading coefficient is a unit");
        let monic: Vec<BigInt> = f.iter().map(|c| c * &inv).collect();
        out.push(ZnPoly::reduce(&monic, modulus));
        return;
    }
    let qs = factors[0].p;
    let mid = factors.len() / 2;
    let (left, right) = factors.split_at(mid);
    let lc_mod = PolyMod::from_bigint(qs, &[f.last().unwrap().clone()]);
    let g0 = left.iter().fold(lc_mod, |a, b| a.mul(b));
    let h0 = right.iter().fold(PolyMod::one(qs), |a, b| a.mul(b));
    let (s0, t0) = bezout(&g0, &h0);
    let (mut g, mut h, mut s, mut t) = (to_big(&g0), to_big(&h0), to_big(&s0), to_big(&t0));
    let mut m = q.clone();
    while &m < modulus {
        let m2 = &m * &m;
        let e = ZnPoly::sub(f, &ZnPoly::mul(&g, &h, &m2), &m2);
        let (qq, r) = ZnPoly::div_rem_monic(&ZnPoly::mul(&s, &e, &m2), &h, &m2);
        let g_new = ZnPoly::add(&ZnPoly::add(&g, &ZnPoly::mul(&t, &e, &m2), &m2), &ZnPoly::mul(&qq, &g, &m2), &m2);
        let h_new = ZnPoly::add(&h, &r, &m2);
        let b = ZnPoly::sub(
            &ZnPoly::add(&ZnPoly::mul(&s, &g_new, &m2), &ZnPoly::mul(&t, &h_new, &m2), &m2),
            &[BigInt::one()],
            &m2,
        );
        let (c, d) = ZnPoly::div_rem_monic(&ZnPoly::mul(&s, &b, &m2), &h_new, &m2);
        s = ZnPoly::sub(&s, &d, &m2);
        t = ZnPoly::sub(&ZnPoly::sub(&t, &ZnPoly::mul(&t, &b, &m2), &m2), &ZnPoly::mul(&c, &g_new, &m2), &m2);
        g = g_new;
        h = h_new;
        m = m2;
    }
    let g = ZnPoly::reduce(&g, modulus);
    let h = ZnPoly::reduce(&h, modulus);
    lift_node(&g, left, q, modulus, out);
    lift_node(&h, right, q, modulus, out);
}

fn recombine(f: IntPolynomial, lifted: Vec<Vec<BigInt>>, modulus: &BigInt) -> Vec<IntPolynomial> {
    let mut remaining = lifted;
    let mut f = f;
    let mut found = Vec::new();
    let mut size = 1;
    while 2 * size <= remaining.len() {
        let lc = f.leading();
        let mut hit = None;
        for subset in Subsets::new(remaining.len(), size) {
            let mut prod = vec![lc.clone()];
            for &i in &subset {
                prod = ZnPoly::mul(&prod, &remaining[i], modulus);
            }
            let cand = IntPolynomial::new(prod.iter().map(|c| sym_mod(c, modulus)).collect());
            let cand = cand.primitive_part();
            let c0 = f.coeff(0);
            let d0 = cand.coeff(0);
            if !c0.is_zero() && (d0.is_zero() || !(&c0 % &d0).is_zero()) {
                continue;
            }
            if let Some(quot) = f.checked_div(&cand) {
                hit = Some((subset, cand, quot));
                break;
            }
        }
        match hit {
            Some((subset, cand, quot)) => {
                found.push(cand);
                f = quot.primitive_part();
                remaining = remaining
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| !subset.contains(i))
                    .map(|(_, g)| g)
                    .collect();
            }
            None => size += 1,
        }
    }
    if f.degree() > 0 {
        found.push(f);
    }
    found
}

/// Lexicographic `k`-subsets of `0..n`.
struct Subsets {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets { n, idx: (0..k).collect(), done: k > n }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let cur = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    #[test]
    fn difference_of_squares() {
        let fac = factor(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
        assert_eq!(fac.content, BigInt::one());
    }

    #[test]
    fn swinnerton_dyer_like_recombination() {
        // x^4 - 10x^2 + 1 is irreducible but splits into quadratics mod every prime.
        let f = p(&[1, 0, -10, 0, 1]);
        let fac = factor(&f).unwrap();
        assert!(fac.is_irreducible());
        assert!(is_irreducible(&f).unwrap());
    }

    #[test]
    fn non_monic_and_repeated() {
        let a = p(&[3, 2]);
        let b = p(&[-1, 0, 5]);
        let f = &(&a.pow(2) * &b).scale(&BigInt::from(-6)) * &p(&[1, 1, 1]);
        let fac = factor(&f).unwrap();
        assert_eq!(fac.expand(), f);
        assert_eq!(fac.content, BigInt::from(-6));
        assert_eq!(fac.factors.len(), 3);
        assert!(fac.factors.contains(&(a, 2)));
    }

    #[test]
    fn x4_minus_4() {
        assert!(!is_irreducible(&p(&[-4, 0, 0, 0, 1])).unwrap());
        assert!(is_irreducible(&p(&[-2, 0, 1])).unwrap());
        assert!(!is_irreducible(&p(&[2, 2])).unwrap());
        assert!(matches!(is_irreducible(&p(&[5])), Err(AlgebraError::ConstantPolynomial)));
        assert!(matches!(factor(&IntPolynomial::zero()), Err(AlgebraError::ZeroPolynomial)));
    }

    #[test]
    fn subsets_enumerate_in_order() {
        let all: Vec<_> = Subsets::new(4, 2).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1]);
        assert_eq!(all[5], vec![2, 3]);
    }
}
