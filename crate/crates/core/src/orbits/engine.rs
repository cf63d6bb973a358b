//! Per-prime characteristic polynomials on one orbit without building the
//! full Hecke matrix.
//!
//! Let `Phi` be the `d x D` matrix of functionals cutting out the orbit's
//! isotypic piece of the dual space, and `B` the action of the witness
//! operator on it (`Phi W = B Phi`). Every `T_p` acts on the dual piece by an
//! element of `Q[B]`, so `Phi T_p x = g(B) Phi x` for a single Manin symbol
//! `x`; the left side only needs the Heilbronn images of `x`. The
//! characteristic polynomial of `g(B)` is then computed modulo word-sized
//! primes and recombined against the Ramanujan coefficient bound, with one
//! extra prime as a consistency check.

use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::OrbitError;
use crate::algebra::{hessenberg_charpoly, BigRationalMatrix, Coordinates, IntPolynomial};
use crate::arith::{is_prime, mul_mod, pow_mod};
use crate::modsym::heilbronn::for_each_cremona;
use crate::modsym::manin::{monomial_action, monomial_action_i128};
use crate::modsym::ModSymSpace;

/// Primes just below `2^62`, descending.
fn crt_moduli() -> &'static [u64] {
    static MODULI: OnceLock<Vec<u64>> = OnceLock::new();
    MODULI.get_or_init(|| {
        let mut out = Vec::with_capacity(48);
        let mut p: u64 = (1 << 62) - 1;
        while out.len() < 48 {
            if is_prime(p) {
                out.push(p);
            }
            p -= 2;
        }
        out
    })
}

struct Residues {
    ell: u64,
    /// `psi[s * d + j]`
    psi: Vec<u64>,
    /// `B^i` for `i < d`.
    b_pows: Vec<Vec<Vec<u64>>>,
    /// Inverse of the Krylov matrix `[phi, B phi, ..., B^(d-1) phi]`.
    kinv: Vec<Vec<u64>>,
}

enum Counts {
    Small(Vec<(usize, i128)>),
    Big(Vec<(usize, BigInt)>),
}

pub(crate) struct CensusEngine {
    space: Arc<ModSymSpace>,
    d: usize,
    /// Manin symbol `x` as `(i, u, v)`.
    x: (usize, i64, i64),
    psi: Vec<Option<Vec<BigRational>>>,
    b: Vec<Vec<BigRational>>,
    phi_x: Vec<BigRational>,
    residues: Vec<OnceLock<Option<Arc<Residues>>>>,
}

fn reduce_rat(x: &BigRational, ell: u64) -> Option<u64> {
    let m = BigInt::from(ell);
    let den = x.denom().mod_floor(&m).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = x.numer().mod_floor(&m).to_u64()?;
    Some(mul_mod(num, pow_mod(den, ell - 2, ell), ell))
}

fn reduce_int(x: &BigInt, ell: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(ell));
    match r.sign() {
        Sign::NoSign => 0,
        _ => r.to_u64().expect("residue fits"),
    }
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>], ell: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![0u64; m]; n];
    for i in 0..n {
        for (k, &aik) in a[i].iter().enumerate() {
            if aik == 0 {
                continue;
            }
            for j in 0..m {
                out[i][j] = (out[i][j] + mul_mod(aik, b[k][j], ell)) % ell;
            }
        }
    }
    out
}

/// Inverse modulo a prime, `None` if singular.
fn mat_inv(a: &[Vec<u64>], ell: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut aug: Vec<Vec<u64>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| aug[i][c] != 0)?;
        aug.swap(c, p);
        let inv = pow_mod(aug[c][c], ell - 2, ell);
        for x in aug[c].iter_mut() {
            *x = mul_mod(*x, inv, ell);
        }
        let pivot = aug[c].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == c || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot) {
                *x = (*x + ell - mul_mod(f, y, ell)) % ell;
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl CensusEngine {
    /// `phi`: rows of the dual projection; `b`: witness action on it.
    pub(crate) fn new(
        space: Arc<ModSymSpace>,
        phi: &[Vec<BigRational>],
        b: Vec<Vec<BigRational>>,
    ) -> Result<Self, OrbitError> {
        let d = phi.len();
        let psi: Vec<Option<Vec<BigRational>>> = (0..space.num_symbols())
            .map(|s| {
                let red = space.reduce_symbol(s);
                if red.is_empty() {
                    return None;
                }
                let v: Vec<BigRational> = phi
                    .iter()
                    .map(|row| red.iter().fold(BigRational::zero(), |acc, (t, c)| acc + &row[*t] * c))
                    .collect();
                v.iter().any(|x| !x.is_zero()).then_some(v)
            })
            .collect();
        let Some(s) = psi.iter().position(Option::is_some) else {
            return Err(OrbitError::Dual("projection vanishes on every Manin symbol".into()));
        };
        let (i, (u, v)) = space.symbol(s);
        let phi_x = psi[s].clone().expect("chosen symbol");
        Ok(CensusEngine {
            space,
            d,
            x: (i, u as i64, v as i64),
            psi,
            b,
            phi_x,
            residues: (0..crt_moduli().len()).map(|_| OnceLock::new()).collect(),
        })
    }

    fn build_residues(&self, ell: u64) -> Option<Residues> {
        let d = self.d;
        let mut psi = vec![0u64; self.psi.len() * d];
        for (s, row) in self.psi.iter().enumerate() {
            if let Some(row) = row {
                for (j, x) in row.iter().enumerate() {
                    psi[s * d + j] = reduce_rat(x, ell)?;
                }
            }
        }
        let b: Vec<Vec<u64>> = self
            .b
            .iter()
            .map(|r| r.iter().map(|x| reduce_rat(x, ell)).collect::<Option<_>>())
            .collect::<Option<_>>()?;
        let phi: Vec<u64> = self.phi_x.iter().map(|x| reduce_rat(x, ell)).collect::<Option<_>>()?;
        let mut b_pows = Vec::with_capacity(d);
        let mut cur: Vec<Vec<u64>> = (0..d).map(|i| (0..d).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..d {
            let next = mat_mul(&cur, &b, ell);
            b_pows.push(std::mem::replace(&mut cur, next));
        }
        // Krylov columns B^i phi.
        let mut krylov = vec![vec![0u64; d]; d];
        for (i, pw) in b_pows.iter().enumerate() {
            for r in 0..d {
                krylov[r][i] = pw[r].iter().zip(&phi).fold(0, |acc, (&a, &x)| (acc + mul_mod(a, x, ell)) % ell);
            }
        }
        let kinv = mat_inv(&krylov, ell)?;
        Some(Residues { ell, psi, b_pows, kinv })
    }

    fn residues(&self, idx: usize) -> Option<Arc<Residues>> {
        self.residues[idx]
            .get_or_init(|| self.build_residues(crt_moduli()[idx]).map(Arc::new))
            .clone()
    }

    /// Coefficients of `T_p x` on Manin symbols.
    fn heilbronn_counts(&self, p: u64) -> Counts {
        let space = &self.space;
        let w = (space.weight() - 2) as usize;
        let n1 = space.p1().len();
        let (i, u, v) = self.x;
        let mut acc = vec![0i128; space.num_symbols()];
        let mut overflow = false;
        for_each_cremona(p as i64, |a, b, c, d| {
            let Some(j) = space.p1().index(u * a + v * c, u * b + v * d) else {
                return;
            };
            if w == 0 {
                acc[j] += 1;
                return;
            }
            if overflow {
                return;
            }
            match monomial_action_i128(i, w, a, b, c, d) {
                Some(coeffs) => {
                    for (m, x) in coeffs.into_iter().enumerate() {
                        let e = &mut acc[m * n1 + j];
                        match e.checked_add(x) {
                            Some(y) => *e = y,
                            None => overflow = true,
                        }
                    }
                }
                None => overflow = true,
            }
        });
        if !overflow {
            return Counts::Small(acc.into_iter().enumerate().filter(|(_, c)| *c != 0).collect());
        }
        let mut big = vec![BigInt::zero(); space.num_symbols()];
        for_each_cremona(p as i64, |a, b, c, d| {
            let Some(j) = space.p1().index(u * a + v * c, u * b + v * d) else {
                return;
            };
            for (m, x) in monomial_action(i, w, a, b, c, d).into_iter().enumerate() {
                big[m * n1 + j] += x;
            }
        });
        Counts::Big(big.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect())
    }

    fn charpoly_mod(&self, counts: &Counts, r: &Residues) -> Vec<u64> {
        let (d, ell) = (self.d, r.ell);
        let mut y = vec![0u64; d];
        let mut add = |s: usize, c: u64| {
            if c == 0 {
                return;
            }
            for j in 0..d {
                y[j] = (y[j] + mul_mod(c, r.psi[s * d + j], ell)) % ell;
            }
        };
        match counts {
            Counts::Small(entries) => {
                for &(s, c) in entries {
                    add(s, c.rem_euclid(ell as i128) as u64);
                }
            }
            Counts::Big(entries) => {
                for (s, c) in entries {
                    add(*s, reduce_int(c, ell));
                }
            }
        }
        let g: Vec<u64> = r
            .kinv
            .iter()
            .map(|row| row.iter().zip(&y).fold(0, |acc, (&a, &b)| (acc + mul_mod(a, b, ell)) % ell))
            .collect();
        let mut m = vec![vec![0u64; d]; d];
        for (gi, pw) in g.iter().zip(&r.b_pows) {
            if *gi == 0 {
                continue;
            }
            for (row, prow) in m.iter_mut().zip(pw) {
                for (x, &y) in row.iter_mut().zip(prow) {
                    *x = (*x + mul_mod(*gi, y, ell)) % ell;
                }
            }
        }
        hessenberg_charpoly(m, ell)
    }

    /// Bound on `|c_i|` for every coefficient of the charpoly of `T_p` on a
    /// degree-`d` orbit: `C(d, i) R^i` with `R >= 2 p^((k-1)/2)`.
    fn coefficient_bound(&self, p: u64) -> BigInt {
        let k = self.space.weight();
        let root = BigInt::from(p).sqrt() + 1;
        let r = BigInt::from(2) * BigInt::from(p).pow((k - 2) / 2) * root;
        let mut best = BigInt::one();
        let mut binom = BigInt::one();
        let mut power = BigInt::one();
        for i in 1..=self.d {
            binom = binom * BigInt::from(self.d - i + 1) / BigInt::from(i);
            power *= &r;
            best = best.max(&binom * &power);
        }
        best
    }

    pub(crate) fn charpoly(&self, p: u64) -> Result<IntPolynomial, OrbitError> {
        let counts = self.heilbronn_counts(p);
        let needed = self.coefficient_bound(p) * 2 + 1;
        let mut modulus = BigInt::one();
        let mut acc = vec![BigInt::zero(); self.d + 1];
        for idx in 0..crt_moduli().len() {
            let Some(r) = self.residues(idx) else { continue };
            let cp = self.charpoly_mod(&counts, &r);
            let ell = BigInt::from(r.ell);
            if modulus >= needed {
                let half = &modulus >> 1;
                let lifted: Vec<BigInt> =
                    acc.iter().map(|x| if x > &half { x - &modulus } else { x.clone() }).collect();
                let agrees = lifted.iter().zip(&cp).all(|(x, &c)| reduce_int(x, r.ell) == c);
                if !agrees {
                    return Err(OrbitError::Inconsistent(p));
                }
                return Ok(IntPolynomial::new(lifted));
            }
            let m_inv = pow_mod(reduce_int(&modulus, r.ell), r.ell - 2, r.ell);
            for (x, &c) in acc.iter_mut().zip(&cp) {
                let t = mul_mod((c + r.ell - reduce_int(x, r.ell)) % r.ell, m_inv, r.ell);
                *x += &modulus * BigInt::from(t);
            }
            modulus *= ell;
        }
        Err(OrbitError::Inconsistent(p))
    }
}

/// Functionals `Phi` (rows) spanning the dual of the orbit's isotypic piece,
/// and the witness action `B` with `Phi W = B Phi`.
pub(crate) fn dual_projection(
    space: &ModSymSpace,
    basis: &[Vec<BigRational>],
    witness_full: &BigRationalMatrix,
    witness_poly: &IntPolynomial,
    extra: &mut dyn Iterator<Item = Result<(Arc<BigRationalMatrix>, IntPolynomial), OrbitError>>,
) -> Result<(Vec<Vec<BigRational>>, Vec<Vec<BigRational>>), OrbitError> {
    let d = basis.len();
    let coeffs: Vec<BigRational> = witness_poly.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
    let mut phi = witness_full.transpose().eval_poly(&coeffs)?.kernel_basis();
    while phi.len() > d {
        let Some(next) = extra.next() else {
            return Err(OrbitError::Dual(format!(
                "dual piece has dimension {} > {d} after all operators",
                phi.len()
            )));
        };
        let (t, g) = next?;
        let gc: Vec<BigRational> = g.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let m = t.transpose().eval_poly(&gc)?;
        let images: Vec<Vec<BigRational>> = phi.iter().map(|v| m.mul_vec(v)).collect();
        let rel = BigRationalMatrix::from_columns(space.dimension(), &images).kernel_basis();
        let mut narrowed: Vec<Vec<BigRational>> = rel
            .iter()
            .map(|a| {
                let mut v = vec![BigRational::zero(); space.dimension()];
                for (c, row) in a.iter().zip(&phi) {
                    if c.is_zero() {
                        continue;
                    }
                    for (x, y) in v.iter_mut().zip(row) {
                        *x += c * y;
                    }
                }
                v
            })
            .collect();
        crate::algebra::echelonize(&mut narrowed);
        phi = narrowed;
    }
    if phi.len() < d {
        return Err(OrbitError::Dual(format!("dual piece has dimension {} < {d}", phi.len())));
    }
    let coords = Coordinates::new(&phi)?;
    let wt = witness_full.transpose();
    let b: Vec<Vec<BigRational>> = phi
        .iter()
        .map(|row| coords.solve(&wt.mul_vec(row)).ok_or(OrbitError::Dual("dual piece not stable".into())))
        .collect::<Result<_, _>>()?;
    // Pairing with the orbit subspace must be perfect.
    let pairing = BigRationalMatrix::from_rows(
        d,
        phi.iter()
            .map(|row| {
                basis
                    .iter()
                    .map(|v| row.iter().zip(v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b))
                    .collect()
            })
            .collect(),
    );
    if pairing.rank() != d {
        return Err(OrbitError::Dual("dual piece pairs degenerately with the orbit".into()));
    }
    Ok((phi, b))
}
