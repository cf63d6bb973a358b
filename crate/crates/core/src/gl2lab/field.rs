//! Small finite fields `F_Q`, `Q <= 16`, with full operation tables.

use super::Gl2Error;
use crate::arith::factorize;

/// Largest field size the lab will enumerate.
pub const MAX_FIELD: u64 = 16;

/// `F_Q` with elements `0..Q` encoding `sum c_i alpha^i` as `sum c_i p^i`,
/// where `alpha` is a root of the stored modulus.
#[derive(Clone, Debug)]
pub struct Fq {
    p: u8,
    e: u32,
    q: u8,
    /// Monic modulus, ascending coefficients (length `e + 1`).
    modulus: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    generator: u8,
}

fn digits(x: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    let mut x = x;
    for _ in 0..e {
        out.push(x % p);
        x /= p;
    }
    out
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo a monic `m` over `F_p` (ascending coefficients).
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let c = a.pop().expect("nonempty") % p;
        if c == 0 {
            continue;
        }
        let shift = a.len() - dm;
        for (i, &mi) in m[..dm].iter().enumerate() {
            a[shift + i] = (a[shift + i] + p - c * mi % p) % p;
        }
    }
    a
}

fn is_irreducible_small(m: &[u32], p: u32) -> bool {
    let n = (m.len() - 1) as u32;
    for d in 1..=n / 2 {
        for code in 0..p.pow(d) {
            let mut f = digits(code, p, d);
            f.push(1);
            if poly_rem(m.to_vec(), &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Fq {
    /// Builds `F_q` using the monic irreducible modulus of degree `e` whose
    /// coefficients `(c_0, ..., c_(e-1))`, read as base-`p` digits of an
    /// integer, are smallest.
    pub fn new(q: u64) -> Result<Self, Gl2Error> {
        if q > MAX_FIELD {
            return Err(Gl2Error::Budget(q));
        }
        let f = factorize(q);
        if f.len() != 1 {
            return Err(Gl2Error::NotPrimePower(q));
        }
        let (p, e) = (f[0].0 as u32, f[0].1);
        let qq = q as u32;
        let modulus: Vec<u32> = (0..qq)
            .map(|code| {
                let mut m = digits(code, p, e);
                m.push(1);
                m
            })
            .find(|m| e == 1 || is_irreducible_small(m, p))
            .expect("irreducible polynomials exist in every degree");
        let mut add = vec![0u8; (qq * qq) as usize];
        let mut mul = vec![0u8; (qq * qq) as usize];
        for a in 0..qq {
            let da = digits(a, p, e);
            for b in 0..qq {
                let db = digits(b, p, e);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * qq + b) as usize] = from_digits(&s, p) as u8;
                let mut prod = vec![0u32; 2 * e as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let r = if e == 1 { vec![prod[0] % p] } else { poly_rem(prod, &modulus, p) };
                let mut r = r;
                r.resize(e as usize, 0);
                mul[(a * qq + b) as usize] = from_digits(&r, p) as u8;
            }
        }
        let mut field = Fq {
            p: p as u8,
            e,
            q: qq as u8,
            modulus: modulus.iter().map(|&c| c as u8).collect(),
            add,
            mul,
            neg: vec![0; qq as usize],
            inv: vec![0; qq as usize],
            generator: 0,
        };
        for a in 0..field.q {
            field.neg[a as usize] = (0..field.q).find(|&b| field.add(a, b) == 0).expect("additive inverse");
            if a != 0 {
                field.inv[a as usize] = (1..field.q).find(|&b| field.mul(a, b) == 1).expect("field inverse");
            }
        }
        field.generator = (1..field.q)
            .find(|&g| field.mult_order(g) == (qq - 1) as u64)
            .expect("the multiplicative group is cyclic");
        Ok(field)
    }

    pub fn order(&self) -> u64 {
        self.q as u64
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    /// A fixed generator of the multiplicative group.
    pub fn generator(&self) -> u8 {
        self.generator
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q as usize + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse (`0` maps to `0`).
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u8, mut e: u64) -> u8 {
        let (mut base, mut acc) = (a, 1u8);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn mult_order(&self, a: u8) -> u64 {
        assert_ne!(a, 0);
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Elements of the subfield of order `s` (`s` a power of `p` whose
    /// degree divides `e`).
    pub fn subfield(&self, s: u64) -> Vec<u8> {
        (0..self.q).filter(|&x| self.pow(x, s) == x).collect()
    }

    /// The cyclic subgroup of `F_Q^x` of the given order, ascending.
    pub fn cyclic_subgroup(&self, order: u64) -> Vec<u8> {
        let n = self.q as u64 - 1;
        assert!(n.is_multiple_of(order), "{order} does not divide {n}");
        let g = self.pow(self.generator, n / order);
        let mut out: Vec<u8> = (0..order).map(|k| self.pow(g, k)).collect();
        out.sort_unstable();
        out
    }

    pub fn is_square(&self, a: u8) -> bool {
        (0..self.q).any(|x| self.mul(x, x) == a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            let f = Fq::new(q).unwrap();
            assert_eq!(f.mult_order(f.generator()), q - 1);
            for a in 0..q as u8 {
                for b in 0..q as u8 {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q as u8 {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
        assert_eq!(Fq::new(4).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(Fq::new(8).unwrap().modulus(), &[1, 1, 0, 1]);
        assert_eq!(Fq::new(9).unwrap().modulus(), &[1, 0, 1]);
        assert!(matches!(Fq::new(6), Err(Gl2Error::NotPrimePower(6))));
        assert!(matches!(Fq::new(17), Err(Gl2Error::Budget(17))));
    }
}
