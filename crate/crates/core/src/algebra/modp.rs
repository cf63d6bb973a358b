//! Dense polynomials over a prime field `F_p` with `p < 2^31`, with
//! distinct-degree and Cantor-Zassenhaus equal-degree factorization.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::pow_mod;

/// Polynomial over `F_p`, ascending coefficients, trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMod {
    pub p: u64,
    pub c: Vec<u64>,
}

impl PolyMod {
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        debug_assert!(p < (1 << 31));
        for x in c.iter_mut() {
            *x %= p;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        PolyMod { p, c }
    }

    pub fn from_bigint(p: u64, coeffs: &[BigInt]) -> Self {
        let pb = BigInt::from(p);
        let c = coeffs
            .iter()
            .map(|a| {
                let r = ((a % &pb) + &pb) % &pb;
                r.to_u64().expect("reduced residue fits")
            })
            .collect();
        Self::new(p, c)
    }

    pub fn one(p: u64) -> Self {
        Self::new(p, vec![1])
    }

    pub fn x(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn leading(&self) -> u64 {
        *self.c.last().unwrap_or(&0)
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let li = self.inv(self.leading());
        self.scale(li)
    }

    pub fn scale(&self, k: u64) -> Self {
        let p = self.p;
        Self::new(p, self.c.iter().map(|&a| a * k % p).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&0) + o.c.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let p = self.p;
        Self::new(
            p,
            (0..n)
                .map(|i| self.c.get(i).unwrap_or(&0) + p - o.c.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(self.p, Vec::new());
        }
        let p = self.p;
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % p;
            }
        }
        Self::new(p, out)
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (Self::new(p, Vec::new()), self.clone());
        }
        let li = self.inv(d.leading());
        let dd = d.degree();
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = r[i + dd] * li % p;
            if t == 0 {
                continue;
            }
            q[i] = t;
            for (j, &b) in d.c.iter().enumerate() {
                r[i + j] = (r[i + j] + p - t * b % p) % p;
            }
        }
        (Self::new(p, q), Self::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        Self::new(
            p,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * (i as u64 % p) % p)
                .collect(),
        )
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() == 0 || self.gcd(&self.derivative()).degree() == 0
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Self) -> Self {
        let mut base = self.rem(m);
        let mut acc = Self::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        acc
    }

    /// Distinct-degree factorization of a monic square-free polynomial:
    /// pairs `(g, e)` where `g` is the product of all irreducible factors
    /// of degree `e`.
    pub fn distinct_degree(&self) -> Vec<(PolyMod, usize)> {
        let p = self.p;
        let mut f = self.monic();
        let mut out = Vec::new();
        let x = Self::x(p);
        let mut h = x.clone();
        let mut e = 0;
        while f.degree() >= 2 * (e + 1) {
            e += 1;
            h = h.pow_mod(p as u128, &f);
            let g = h.sub(&x).gcd(&f);
            if g.degree() > 0 {
                f = f.div_rem(&g).0;
                h = h.rem(&f);
                out.push((g, e));
            }
        }
        if f.degree() > 0 {
            let d = f.degree();
            out.push((f, d));
        }
        out
    }

    /// Degrees of the irreducible factors of a square-free polynomial.
    pub fn factor_degrees(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (g, e) in self.distinct_degree() {
            out.extend(std::iter::repeat_n(e, g.degree() / e));
        }
        out
    }

    /// Splits a monic square-free `f` whose irreducible factors all have
    /// degree `e` (odd `p`).
    fn equal_degree(f: &Self, e: usize, rng: &mut ChaCha8Rng, out: &mut Vec<PolyMod>) {
        let p = f.p;
        if f.degree() == e {
            out.push(f.clone());
            return;
        }
        loop {
            let a: Vec<u64> = (0..f.degree()).map(|_| rng.gen_range(0..p)).collect();
            let a = Self::new(p, a);
            if a.degree() == 0 {
                continue;
            }
            // a^((p^e - 1)/2) = (a^(1 + p + ... + p^(e-1)))^((p - 1)/2)
            let mut frob = a.clone();
            let mut norm = a.clone();
            for _ in 1..e {
                frob = frob.pow_mod(p as u128, f);
                norm = norm.mul(&frob).rem(f);
            }
            let b = norm.pow_mod(((p - 1) / 2) as u128, f).sub(&Self::one(p));
            let g = b.gcd(f);
            if g.degree() > 0 && g.degree() < f.degree() {
                let h = f.div_rem(&g).0.monic();
                Self::equal_degree(&g, e, rng, out);
                Self::equal_degree(&h, e, rng, out);
                return;
            }
        }
    }

    /// Monic irreducible factors of a square-free polynomial over `F_p`
    /// (`p` odd), sorted by degree then coefficients.
    pub fn factor_squarefree(&self) -> Vec<PolyMod> {
        assert!(self.p > 2, "equal-degree splitting needs odd p");
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ self.p);
        let mut out = Vec::new();
        for (g, e) in self.distinct_degree() {
            Self::equal_degree(&g.monic(), e, &mut rng, &mut out);
        }
        out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.c.cmp(&b.c)));
        out
    }
}
