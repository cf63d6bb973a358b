use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::boundary::{lift_to_sl2, CuspList};
use super::heilbronn::for_each_cremona;
use super::manin::{monomial_action, monomial_action_i128, polynomial_action_big};
use super::p1::P1List;
use super::presentation::{present, Presentation, SparseVec};
use super::ModSymError;
use crate::algebra::{echelonize, BigRationalMatrix};
use crate::arith::{is_prime, prime_divisors};

/// Weight-`k` modular symbols for `Gamma_0(N)`, sign +1 quotient.
pub struct ModSymSpace {
    level: u64,
    weight: u32,
    p1: P1List,
    pres: Presentation,
    boundary: BigRationalMatrix,
    cuspidal: Vec<Vec<BigRational>>,
    new: OnceLock<Vec<Vec<BigRational>>>,
    hecke_cache: Mutex<HashMap<u64, Arc<BigRationalMatrix>>>,
}

impl std::fmt::Debug for ModSymSpace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModSymSpace")
            .field("level", &self.level)
            .field("weight", &self.weight)
            .field("dimension", &self.dimension())
            .field("cuspidal_dimension", &self.cuspidal.len())
            .finish()
    }
}

/// `T_p` restricted to a subspace, in that subspace's basis.
#[derive(Clone, Debug)]
pub struct HeckeOperator {
    pub p: u64,
    pub matrix: BigRationalMatrix,
}

pub fn build_space(level: u64, weight: u32) -> Result<ModSymSpace, ModSymError> {
    ModSymSpace::build(level, weight)
}

impl ModSymSpace {
    pub fn build(level: u64, weight: u32) -> Result<Self, ModSymError> {
        if level == 0 {
            return Err(ModSymError::Level(level));
        }
        if weight < 2 {
            return Err(ModSymError::WeightTooSmall(weight));
        }
        if weight % 2 == 1 {
            return Err(ModSymError::OddWeight(weight));
        }
        let p1 = P1List::new(level);
        let pres = present(&p1, weight);
        let mut space = ModSymSpace {
            level,
            weight,
            p1,
            pres,
            boundary: BigRationalMatrix::zeros(0, 0),
            cuspidal: Vec::new(),
            new: OnceLock::new(),
            hecke_cache: Mutex::new(HashMap::new()),
        };
        space.boundary = space.compute_boundary();
        space.cuspidal = space.boundary.kernel_basis();
        Ok(space)
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn sign(&self) -> i32 {
        1
    }

    /// Dimension of the sign +1 quotient.
    pub fn dimension(&self) -> usize {
        self.pres.basis.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.pres.reduction.len()
    }

    pub fn p1(&self) -> &P1List {
        &self.p1
    }

    /// `(i, (u, v))` for the symbol `[X^i Y^(k-2-i), (u, v)]`.
    pub fn symbol(&self, s: usize) -> (usize, (u64, u64)) {
        let n1 = self.p1.len();
        (s / n1, self.p1.rep(s % n1))
    }

    pub fn symbol_index(&self, i: usize, u: i64, v: i64) -> Option<usize> {
        self.p1.index(u, v).map(|j| i * self.p1.len() + j)
    }

    /// Basis coordinates of a Manin symbol.
    pub fn reduce_symbol(&self, s: usize) -> &SparseVec {
        &self.pres.reduction[s]
    }

    /// Two-term representative: `symbol = sign * rep`, sign 0 if zero.
    pub fn two_term(&self, s: usize) -> (usize, i8) {
        self.pres.two_term[s]
    }

    /// Symbol indices of the basis elements.
    pub fn basis_symbols(&self) -> &[usize] {
        &self.pres.basis
    }

    pub fn boundary_matrix(&self) -> &BigRationalMatrix {
        &self.boundary
    }

    pub fn cuspidal_basis(&self) -> &[Vec<BigRational>] {
        &self.cuspidal
    }

    pub fn cuspidal_dimension(&self) -> usize {
        self.cuspidal.len()
    }

    fn compute_boundary(&self) -> BigRationalMatrix {
        let w = (self.weight - 2) as usize;
        let n = self.level as i64;
        let mut cusps = CuspList::new(self.level, true);
        let mut columns: Vec<Vec<(usize, i64)>> = Vec::new();
        for &s in &self.pres.basis {
            let (i, (u, v)) = self.symbol(s);
            let [a, b, c, d] = lift_to_sl2(u as i64, v as i64, n);
            let mut col = Vec::new();
            if i == w {
                col.push((cusps.index(a, c), 1));
            }
            if i == 0 {
                col.push((cusps.index(b, d), -1));
            }
            columns.push(col);
        }
        let mut rows = vec![vec![BigRational::zero(); columns.len()]; cusps.len()];
        for (j, col) in columns.iter().enumerate() {
            for &(r, x) in col {
                rows[r][j] += BigRational::from_integer(BigInt::from(x));
            }
        }
        BigRationalMatrix::from_rows(columns.len(), rows)
    }

    /// Image of a single Manin symbol under `T_p` as integer coefficients on
    /// Manin symbols (Heilbronn action).
    pub fn hecke_on_symbol(&self, s: usize, p: u64) -> BTreeMap<usize, BigInt> {
        let w = (self.weight - 2) as usize;
        let n1 = self.p1.len();
        let (i, (u, v)) = self.symbol(s);
        let (u, v) = (u as i64, v as i64);
        let mut out: BTreeMap<usize, BigInt> = BTreeMap::new();
        let mut small: HashMap<usize, i128> = HashMap::new();
        let mut overflowed = false;
        for_each_cremona(p as i64, |a, b, c, d| {
            let Some(j) = self.p1.index(u * a + v * c, u * b + v * d) else {
                return;
            };
            if w == 0 {
                *small.entry(j).or_insert(0) += 1;
                return;
            }
            match monomial_action_i128(i, w, a, b, c, d) {
                Some(coeffs) if !overflowed => {
                    for (m, x) in coeffs.into_iter().enumerate() {
                        if x != 0 {
                            let e = small.entry(m * n1 + j).or_insert(0);
                            match e.checked_add(x) {
                                Some(y) => *e = y,
                                None => overflowed = true,
                            }
                        }
                    }
                }
                _ => {
                    overflowed = true;
                    for (m, x) in monomial_action(i, w, a, b, c, d).into_iter().enumerate() {
                        if !x.is_zero() {
                            *out.entry(m * n1 + j).or_insert_with(BigInt::zero) += x;
                        }
                    }
                }
            }
        });
        if overflowed {
            // Recompute entirely in arbitrary precision.
            let mut big: BTreeMap<usize, BigInt> = BTreeMap::new();
            for_each_cremona(p as i64, |a, b, c, d| {
                let Some(j) = self.p1.index(u * a + v * c, u * b + v * d) else {
                    return;
                };
                for (m, x) in monomial_action(i, w, a, b, c, d).into_iter().enumerate() {
                    if !x.is_zero() {
                        *big.entry(m * n1 + j).or_insert_with(BigInt::zero) += x;
                    }
                }
            });
            big.retain(|_, x| !x.is_zero());
            return big;
        }
        for (k, x) in small {
            if x != 0 {
                out.insert(k, BigInt::from(x));
            }
        }
        out
    }

    /// Reduces an integer combination of Manin symbols to basis coordinates.
    pub fn reduce_combination(&self, combo: &BTreeMap<usize, BigInt>) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.dimension()];
        for (&s, c) in combo {
            let c = BigRational::from_integer(c.clone());
            for (t, x) in &self.pres.reduction[s] {
                v[*t] += &c * x;
            }
        }
        v
    }

    /// `T_p` on the whole sign +1 space (columns are images of basis elements).
    pub fn full_hecke_matrix(&self, p: u64) -> Result<Arc<BigRationalMatrix>, ModSymError> {
        if !is_prime(p) {
            return Err(ModSymError::CompositeIndex(p));
        }
        if let Some(m) = self.hecke_cache.lock().expect("cache lock").get(&p) {
            return Ok(m.clone());
        }
        let columns: Vec<Vec<BigRational>> = self
            .pres
            .basis
            .iter()
            .map(|&s| self.reduce_combination(&self.hecke_on_symbol(s, p)))
            .collect();
        let m = Arc::new(BigRationalMatrix::from_columns(self.dimension(), &columns));
        self.hecke_cache.lock().expect("cache lock").insert(p, m.clone());
        Ok(m)
    }

    /// `T_p` restricted to a Hecke-invariant subspace (basis vectors in
    /// ambient coordinates).
    pub fn hecke_matrix(&self, subspace: &[Vec<BigRational>], p: u64) -> Result<HeckeOperator, ModSymError> {
        let full = self.full_hecke_matrix(p)?;
        let matrix = full.restrict(subspace)?;
        Ok(HeckeOperator { p, matrix })
    }

    /// Manin-symbol expansion of the modular symbol `Q {0, r}` at this level,
    /// `Q` homogeneous of degree `k - 2` given by coefficients on `X^j Y^(k-2-j)`.
    fn zero_to_cusp(&self, q: &[BigInt], num: i64, den: i64, out: &mut BTreeMap<usize, BigInt>) {
        let n1 = self.p1.len();
        let mut push = |a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt| {
            let poly = polynomial_action_big(q, a, b, c, d);
            let n = BigInt::from(self.level);
            let cu = c.mod_floor(&n).to_i64().unwrap();
            let du = d.mod_floor(&n).to_i64().unwrap();
            let j = self.p1.index(cu, du).expect("convergent matrices have coprime rows");
            for (m, x) in poly.into_iter().enumerate() {
                if !x.is_zero() {
                    *out.entry(m * n1 + j).or_insert_with(BigInt::zero) += x;
                }
            }
        };
        // {0, oo}
        let one = BigInt::one();
        let zero = BigInt::zero();
        push(&one, &zero, &zero, &one);
        if den == 0 {
            return;
        }
        let (mut pm2, mut qm2) = (BigInt::zero(), BigInt::one());
        let (mut pm1, mut qm1) = (BigInt::one(), BigInt::zero());
        let (mut a, mut b) = (BigInt::from(num), BigInt::from(den));
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        let mut j: i64 = 0;
        while !b.is_zero() {
            let (t, r) = a.div_mod_floor(&b);
            let pj = &t * &pm1 + &pm2;
            let qj = &t * &qm1 + &qm2;
            // g_j = [[(-1)^(j-1) p_j, p_(j-1)], [(-1)^(j-1) q_j, q_(j-1)]]
            let sign = if (j - 1).rem_euclid(2) == 0 { one.clone() } else { -one.clone() };
            push(&(&sign * &pj), &pm1, &(&sign * &qj), &qm1);
            pm2 = std::mem::replace(&mut pm1, pj);
            qm2 = std::mem::replace(&mut qm1, qj);
            a = b;
            b = r;
            j += 1;
        }
    }

    /// Image under the degeneracy map attached to `[[t, 0], [0, 1]]` from
    /// this level to `lower` (level `N / t` or any divisor of `N` that `t`
    /// times it divides), as basis coordinates of `lower`.
    pub fn degeneracy_image(&self, s: usize, t: u64, lower: &ModSymSpace) -> Vec<BigRational> {
        let w = (self.weight - 2) as usize;
        let (i, (u, v)) = self.symbol(s);
        if t == 1 {
            let m = lower.level as i64;
            let j = lower.p1.index(u as i64 % m, v as i64 % m).expect("unit pair stays a unit pair");
            let combo = BTreeMap::from([(i * lower.p1.len() + j, BigInt::one())]);
            return lower.reduce_combination(&combo);
        }
        let t = t as i64;
        let [a, b, c, d] = lift_to_sl2(u as i64, v as i64, self.level as i64);
        let mut p = vec![BigInt::zero(); w + 1];
        p[i] = BigInt::one();
        // Q = h . P with h = [[t a, t b], [c, d]]: Q(X, Y) = P(dX - tbY, -cX + taY)
        let q = polynomial_action_big(
            &p,
            &BigInt::from(d),
            &BigInt::from(-t * b),
            &BigInt::from(-c),
            &BigInt::from(t * a),
        );
        // Q {t b / d, t a / c} = Q {0, t a / c} - Q {0, t b / d}
        let mut plus = BTreeMap::new();
        lower.zero_to_cusp(&q, t * a, c, &mut plus);
        let mut minus = BTreeMap::new();
        lower.zero_to_cusp(&q, t * b, d, &mut minus);
        for (k, x) in minus {
            *plus.entry(k).or_insert_with(BigInt::zero) -= x;
        }
        lower.reduce_combination(&plus)
    }

    /// The new cuspidal subspace: the common kernel, inside the cuspidal
    /// subspace, of both degeneracy maps to level `N / l` for each prime
    /// `l | N`. Rows of a reduced echelon basis in ambient coordinates.
    pub fn new_subspace(&self) -> &[Vec<BigRational>] {
        self.new.get_or_init(|| self.compute_new_subspace())
    }

    fn compute_new_subspace(&self) -> Vec<Vec<BigRational>> {
        let cusp = &self.cuspidal;
        if cusp.is_empty() {
            return Vec::new();
        }
        let mut image_rows: Vec<Vec<BigRational>> = Vec::new();
        for l in prime_divisors(self.level) {
            let m = self.level / l;
            let lower = ModSymSpace::build(m, self.weight).expect("valid lower level");
            if lower.cuspidal_dimension() == 0 {
                continue;
            }
            for t in [1, l] {
                // Image of each basis element, then of each cuspidal vector.
                let images: Vec<Vec<BigRational>> = self
                    .pres
                    .basis
                    .iter()
                    .map(|&s| self.degeneracy_image(s, t, &lower))
                    .collect();
                for r in 0..lower.dimension() {
                    let row: Vec<BigRational> = cusp
                        .iter()
                        .map(|v| {
                            v.iter()
                                .zip(&images)
                                .filter(|(x, _)| !x.is_zero())
                                .fold(BigRational::zero(), |acc, (x, img)| acc + x * &img[r])
                        })
                        .collect();
                    image_rows.push(row);
                }
            }
        }
        if image_rows.is_empty() {
            return cusp.clone();
        }
        let stacked = BigRationalMatrix::from_rows(cusp.len(), image_rows);
        let mut out: Vec<Vec<BigRational>> = stacked
            .kernel_basis()
            .into_iter()
            .map(|coef| {
                let mut v = vec![BigRational::zero(); self.dimension()];
                for (c, row) in coef.iter().zip(cusp) {
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
        echelonize(&mut out);
        out
    }
}
