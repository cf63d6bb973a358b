//! Newform Galois orbits: decomposition of the new subspace, per-prime
//! characteristic polynomials, and the reducible-prime census.

mod engine;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{factor, is_irreducible, AlgebraError, BigRationalMatrix, IntPolynomial};
use crate::arith::primes_up_to;
use crate::modsym::{ModSymError, ModSymSpace};
use crate::par::{self, Execution};
use engine::{dual_projection, CensusEngine};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error(transparent)]
    ModSym(#[from] ModSymError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(
        "could not split a {dimension}-dimensional piece of the new subspace at level {level}, weight {weight} \
         using operators built from primes up to {prime_limit}; raise the prime limit"
    )]
    Stuck { level: u64, weight: u32, dimension: usize, prime_limit: u64 },
    #[error("dual projection failed: {0}")]
    Dual(String),
    #[error("multimodular characteristic polynomial of T_{0} failed its consistency check")]
    Inconsistent(u64),
    #[error("no orbit matches {0}")]
    UnknownOrbit(String),
}

/// An operator `sum c_i T_{q_i}` whose characteristic polynomial on the orbit
/// is irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub terms: Vec<(u64, i64)>,
    pub charpoly: IntPolynomial,
}

impl Witness {
    /// The prime of a single-operator witness.
    pub fn prime(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [(q, 1)] => Some(*q),
            _ => None,
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (q, c)) in self.terms.iter().enumerate() {
            match (i, *c) {
                (0, 1) => write!(f, "T{q}")?,
                (0, -1) => write!(f, "-T{q}")?,
                (0, c) => write!(f, "{c}T{q}")?,
                (_, 1) => write!(f, "+T{q}")?,
                (_, -1) => write!(f, "-T{q}")?,
                (_, c) if c > 0 => write!(f, "+{c}T{q}")?,
                (_, c) => write!(f, "{c}T{q}")?,
            }
        }
        Ok(())
    }
}

pub struct NewformOrbit {
    space: Arc<ModSymSpace>,
    index: usize,
    label: String,
    basis: Vec<Vec<BigRational>>,
    witness: Witness,
    charpolys: Mutex<BTreeMap<u64, IntPolynomial>>,
    engine: OnceLock<Result<CensusEngine, OrbitError>>,
}

impl fmt::Debug for NewformOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NewformOrbit")
            .field("label", &self.label)
            .field("degree", &self.degree())
            .field("witness", &self.witness.to_string())
            .finish()
    }
}

/// Knobs for [`decompose_with`].
#[derive(Clone, Debug, Default)]
pub struct DecomposeOptions {
    /// Largest prime used for splitting; default `max(100, 4 * dim)`.
    pub prime_limit: Option<u64>,
    /// Explicit order of splitting primes (all must be coprime to `N`).
    pub splitting_primes: Option<Vec<u64>>,
}

/// Which orbit a command refers to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrbitSelector {
    Label(String),
    /// First orbit of the given degree in canonical order.
    Degree(usize),
}

pub fn decompose(space: &Arc<ModSymSpace>) -> Result<Vec<NewformOrbit>, OrbitError> {
    decompose_with(space, &DecomposeOptions::default())
}

fn integral_charpoly(m: &BigRationalMatrix) -> Result<IntPolynomial, OrbitError> {
    let cp = m.charpoly()?;
    cp.to_integral()
        .ok_or_else(|| OrbitError::Dual(format!("non-integral characteristic polynomial {cp}")))
}

fn to_rational_coeffs(f: &IntPolynomial) -> Vec<BigRational> {
    f.coeffs().iter().map(|c| BigRational::from_integer(c.clone())).collect()
}

fn combine(rows: &[Vec<BigRational>], coef: &[BigRational], dim: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::zero(); dim];
    for (c, row) in coef.iter().zip(rows) {
        if c.is_zero() {
            continue;
        }
        for (x, y) in v.iter_mut().zip(row) {
            *x += c * y;
        }
    }
    v
}

enum Step {
    Orbit(Witness),
    Split(Vec<Vec<Vec<BigRational>>>),
    Stuck,
}

/// Tries one operator `a` (already restricted to `piece`).
fn try_operator(
    a: &BigRationalMatrix,
    piece: &[Vec<BigRational>],
    terms: &[(u64, i64)],
    ambient: usize,
) -> Result<Step, OrbitError> {
    let cp = integral_charpoly(a)?;
    let fac = factor(&cp)?;
    if fac.factors.len() == 1 {
        if fac.factors[0].1 == 1 {
            return Ok(Step::Orbit(Witness { terms: terms.to_vec(), charpoly: cp }));
        }
        return Ok(Step::Stuck);
    }
    let mut parts = Vec::new();
    for (f, e) in &fac.factors {
        let mut m = a.eval_poly(&to_rational_coeffs(f))?;
        let base = m.clone();
        for _ in 1..*e {
            m = m.mul(&base)?;
        }
        let kernel = m.kernel_basis();
        let mut part: Vec<Vec<BigRational>> = kernel.iter().map(|c| combine(piece, c, ambient)).collect();
        crate::algebra::echelonize(&mut part);
        parts.push(part);
    }
    Ok(Step::Split(parts))
}

pub fn decompose_with(space: &Arc<ModSymSpace>, opts: &DecomposeOptions) -> Result<Vec<NewformOrbit>, OrbitError> {
    let new = space.new_subspace().to_vec();
    if new.is_empty() {
        return Ok(Vec::new());
    }
    let n = space.level();
    let limit = opts.prime_limit.unwrap_or_else(|| 100.max(4 * new.len() as u64));
    let primes: Vec<u64> = match &opts.splitting_primes {
        Some(ps) => ps.iter().copied().filter(|q| !n.is_multiple_of(*q) && *q <= limit).collect(),
        None => primes_up_to(limit).into_iter().filter(|q| !n.is_multiple_of(*q)).collect(),
    };
    let ambient = space.dimension();
    let mut pending = vec![new];
    let mut found: Vec<(Vec<Vec<BigRational>>, Witness)> = Vec::new();
    'pieces: while let Some(piece) = pending.pop() {
        let mut tried: Vec<(u64, BigRationalMatrix)> = Vec::new();
        for &q in &primes {
            let a = space.full_hecke_matrix(q)?.restrict(&piece)?;
            match try_operator(&a, &piece, &[(q, 1)], ambient)? {
                Step::Orbit(w) => {
                    found.push((piece, w));
                    continue 'pieces;
                }
                Step::Split(parts) => {
                    pending.extend(parts);
                    continue 'pieces;
                }
                Step::Stuck => tried.push((q, a)),
            }
        }
        // Every single T_q acts through a power of one irreducible polynomial
        // (inner twists make this typical); try small integer combinations.
        let pool: Vec<&(u64, BigRationalMatrix)> = tried.iter().take(6).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x0b17 ^ n);
        for attempt in 0..200usize {
            let width = 2 + (attempt / 20).min(pool.len().saturating_sub(2));
            if pool.len() < 2 {
                break;
            }
            let mut terms = Vec::new();
            let mut a = BigRationalMatrix::zeros(piece.len(), piece.len());
            for (q, m) in pool.iter().take(width).map(|x| (x.0, &x.1)) {
                let c: i64 = if terms.is_empty() { 1 } else { rng.gen_range(-3..=3) };
                if c == 0 {
                    continue;
                }
                terms.push((q, c));
                a = a.add(&m.scale(&BigRational::from_integer(BigInt::from(c))))?;
            }
            if terms.len() < 2 {
                continue;
            }
            match try_operator(&a, &piece, &terms, ambient)? {
                Step::Orbit(w) => {
                    found.push((piece, w));
                    continue 'pieces;
                }
                Step::Split(parts) => {
                    pending.extend(parts);
                    continue 'pieces;
                }
                Step::Stuck => {}
            }
        }
        return Err(OrbitError::Stuck {
            level: n,
            weight: space.weight(),
            dimension: piece.len(),
            prime_limit: limit,
        });
    }
    order_and_label(space, found, &primes_up_to(limit))
}

/// Sorts by degree, then by the sequence of traces of `T_p` for
/// `p = 2, 3, 5, ...`, and assigns labels `N.k.i` (1-based).
fn order_and_label(
    space: &Arc<ModSymSpace>,
    found: Vec<(Vec<Vec<BigRational>>, Witness)>,
    primes: &[u64],
) -> Result<Vec<NewformOrbit>, OrbitError> {
    let mut traces: Vec<Vec<BigRational>> = vec![Vec::new(); found.len()];
    let trace_of = |basis: &[Vec<BigRational>], p: u64| -> Result<BigRational, OrbitError> {
        let m = space.hecke_matrix(basis, p)?.matrix;
        Ok((0..m.nrows()).fold(BigRational::zero(), |acc, i| acc + m.get(i, i)))
    };
    let mut computed = 0usize;
    loop {
        let upto = (computed + 8).min(primes.len());
        for (t, (basis, _)) in traces.iter_mut().zip(&found) {
            for &p in &primes[computed..upto] {
                t.push(trace_of(basis, p)?);
            }
        }
        computed = upto;
        let mut tie = false;
        for i in 0..found.len() {
            for j in i + 1..found.len() {
                if found[i].0.len() == found[j].0.len() && traces[i] == traces[j] {
                    tie = true;
                }
            }
        }
        if !tie || computed == primes.len() {
            break;
        }
    }
    let mut order: Vec<usize> = (0..found.len()).collect();
    order.sort_by(|&i, &j| found[i].0.len().cmp(&found[j].0.len()).then_with(|| traces[i].cmp(&traces[j])));
    let mut slots: Vec<Option<(Vec<Vec<BigRational>>, Witness)>> = found.into_iter().map(Some).collect();
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(rank, i)| {
            let (basis, witness) = slots[i].take().expect("each orbit placed once");
            NewformOrbit {
                space: space.clone(),
                index: rank + 1,
                label: format!("{}.{}.{}", space.level(), space.weight(), rank + 1),
                basis,
                witness,
                charpolys: Mutex::new(BTreeMap::new()),
                engine: OnceLock::new(),
            }
        })
        .collect())
}

pub fn select_orbit<'a>(orbits: &'a [NewformOrbit], sel: &OrbitSelector) -> Result<&'a NewformOrbit, OrbitError> {
    let hit = match sel {
        OrbitSelector::Label(l) => orbits.iter().find(|o| &o.label == l),
        OrbitSelector::Degree(d) => orbits.iter().find(|o| o.degree() == *d),
    };
    hit.ok_or_else(|| {
        OrbitError::UnknownOrbit(match sel {
            OrbitSelector::Label(l) => format!("label {l}"),
            OrbitSelector::Degree(d) => format!("degree {d}"),
        })
    })
}

/// Result of a reducible-prime census.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusReport {
    pub label: String,
    pub level: u64,
    pub weight: u32,
    pub degree: usize,
    pub bound: u64,
    /// Reducible primes `p <= bound`, ascending.
    pub primes: Vec<u64>,
    /// Listed primes with `p^2 | N`, reported separately for comparison.
    pub square_level_primes: Vec<u64>,
    pub elapsed: Duration,
}

impl CensusReport {
    pub fn count(&self) -> usize {
        self.primes.len()
    }
}

impl NewformOrbit {
    pub fn space(&self) -> &Arc<ModSymSpace> {
        &self.space
    }

    pub fn level(&self) -> u64 {
        self.space.level()
    }

    pub fn weight(&self) -> u32 {
        self.space.weight()
    }

    pub fn degree(&self) -> usize {
        self.basis.len()
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Basis of the orbit subspace in ambient coordinates.
    pub fn basis(&self) -> &[Vec<BigRational>] {
        &self.basis
    }

    pub fn witness(&self) -> &Witness {
        &self.witness
    }

    fn witness_matrix(&self) -> Result<BigRationalMatrix, OrbitError> {
        let dim = self.space.dimension();
        let mut w = BigRationalMatrix::zeros(dim, dim);
        for &(q, c) in &self.witness.terms {
            let t = self.space.full_hecke_matrix(q)?;
            w = w.add(&t.scale(&BigRational::from_integer(BigInt::from(c))))?;
        }
        Ok(w)
    }

    fn engine(&self) -> Result<&CensusEngine, OrbitError> {
        self.engine
            .get_or_init(|| {
                let w = self.witness_matrix()?;
                let n = self.level();
                let mut extra = primes_up_to(100.max(4 * self.space.dimension() as u64))
                    .into_iter()
                    .filter(move |q| !n.is_multiple_of(*q))
                    .map(|q| -> Result<_, OrbitError> {
                        let t = self.space.full_hecke_matrix(q)?;
                        Ok((t, self.exact_charpoly(q)?))
                    });
                let (phi, b) = dual_projection(&self.space, &self.basis, &w, &self.witness.charpoly, &mut extra)?;
                let b_matrix = BigRationalMatrix::from_rows(phi.len(), b.clone());
                if integral_charpoly(&b_matrix)? != self.witness.charpoly {
                    return Err(OrbitError::Dual("witness action on the dual piece has the wrong charpoly".into()));
                }
                CensusEngine::new(self.space.clone(), &phi, b)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Characteristic polynomial of `T_p` from the restricted rational
    /// matrix (slow for large `p`; used for splitting and cross-checks).
    pub fn exact_charpoly(&self, p: u64) -> Result<IntPolynomial, OrbitError> {
        let t = self.space.hecke_matrix(&self.basis, p)?;
        integral_charpoly(&t.matrix)
    }

    /// Characteristic polynomial of `T_p` on the orbit (monic, integral,
    /// degree `d`), cached.
    pub fn charpoly(&self, p: u64) -> Result<IntPolynomial, OrbitError> {
        if let Some(f) = self.charpolys.lock().expect("charpoly cache").get(&p) {
            return Ok(f.clone());
        }
        if !crate::arith::is_prime(p) {
            return Err(ModSymError::CompositeIndex(p).into());
        }
        let f = self.engine()?.charpoly(p)?;
        self.charpolys.lock().expect("charpoly cache").insert(p, f.clone());
        Ok(f)
    }

    /// Charpolys for many primes, computed independently per prime.
    pub fn charpolys(&self, primes: &[u64], exec: Execution) -> Result<Vec<IntPolynomial>, OrbitError> {
        self.engine()?;
        par::try_map(exec, primes, |&p| self.charpoly(p))
    }

    /// Seeds the in-memory cache (e.g. from a persisted census).
    pub fn insert_charpoly(&self, p: u64, f: IntPolynomial) {
        self.charpolys.lock().expect("charpoly cache").insert(p, f);
    }

    pub fn cached_primes(&self) -> Vec<u64> {
        self.charpolys.lock().expect("charpoly cache").keys().copied().collect()
    }

    /// Whether `a_p` generates the coefficient field.
    pub fn generates_field(&self, p: u64) -> Result<bool, OrbitError> {
        if self.degree() == 1 {
            return Ok(true);
        }
        Ok(is_irreducible(&self.charpoly(p)?)?)
    }

    /// All reducible primes `p <= bound`, including primes dividing `N`.
    pub fn reducible_primes(&self, bound: u64, exec: Execution) -> Result<CensusReport, OrbitError> {
        let start = Instant::now();
        let primes = primes_up_to(bound);
        let polys = self.charpolys(&primes, exec)?;
        let verdicts = par::try_map(exec, &polys, |f| -> Result<bool, OrbitError> {
            Ok(self.degree() > 1 && !is_irreducible(f)?)
        })?;
        let reducible: Vec<u64> = primes.iter().zip(verdicts).filter(|(_, r)| *r).map(|(p, _)| *p).collect();
        Ok(self.report(bound, reducible, start.elapsed()))
    }

    /// Builds a report from a precomputed reducible list.
    pub fn report(&self, bound: u64, primes: Vec<u64>, elapsed: Duration) -> CensusReport {
        let n = self.level();
        let square_level_primes = primes.iter().copied().filter(|p| n.is_multiple_of(p * p)).collect();
        CensusReport {
            label: self.label.clone(),
            level: n,
            weight: self.weight(),
            degree: self.degree(),
            bound,
            primes,
            square_level_primes,
            elapsed,
        }
    }

    /// `N(x) = #{p < x reducible}` for each `x` of an ascending grid.
    pub fn count_function(&self, grid: &[u64], exec: Execution) -> Result<Vec<usize>, OrbitError> {
        let Some(&top) = grid.last() else {
            return Ok(Vec::new());
        };
        let report = self.reducible_primes(top.saturating_sub(1), exec)?;
        Ok(count_below(&report.primes, grid))
    }
}

/// Counts of entries of the ascending list `primes` strictly below each `x`.
pub fn count_below(primes: &[u64], grid: &[u64]) -> Vec<usize> {
    grid.iter().map(|&x| primes.partition_point(|&p| p < x)).collect()
}
