//! CM and quadratic inner-twist detection from Hecke charpolys, the group
//! `Gamma` of twist automorphisms, and the prime densities it predicts for
//! each subfield `E_f^H`.
//!
//! All detections are heuristic certificates: a character is accepted when
//! every tested prime is consistent with it.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::algebra::factor;
use crate::arith::{divisors, is_fundamental_discriminant, kronecker, primes_up_to};
use crate::dirichlet::{
    condition_density, joint_kernel_degree, kronecker_character, CharacterConditionSet, DirichletCharacter,
};
use crate::orbits::{NewformOrbit, OrbitError};
use crate::par::Execution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwistError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("orbit has complex multiplication by discriminant {0}")]
    Cm(i64),
    #[error("detected twists do not form a group: {0}")]
    NotClosed(String),
    #[error("twist group of order {gamma} is incompatible with degree {degree}")]
    DegreeMismatch { degree: usize, gamma: usize },
}

#[derive(Clone, Debug)]
pub struct TwistOptions {
    /// Starting prime bound.
    pub bound: u64,
    /// Minimum number of primes with `eps(p) = -1` tested per candidate;
    /// the bound is doubled until this is met.
    pub min_tests: usize,
    /// Search quadratic characters of conductor dividing this instead of `N`.
    pub modulus: Option<u64>,
}

impl Default for TwistOptions {
    fn default() -> Self {
        TwistOptions { bound: 1000, min_tests: 50, modulus: None }
    }
}

/// Fundamental discriminants `D != 1` with `|D|` dividing `m`, ordered by
/// `|D|` then sign (negative first).
fn discriminants_dividing(m: u64, negative_only: bool) -> Vec<i64> {
    let mut out = Vec::new();
    for d in divisors(m) {
        let d = d as i64;
        if is_fundamental_discriminant(-d) {
            out.push(-d);
        }
        if !negative_only && d > 1 && is_fundamental_discriminant(d) {
            out.push(d);
        }
    }
    out
}

/// Applies `test` to the charpoly coefficients at every prime `p` with `(D/p) = -1`, `p` not
/// dividing `N`, raising the bound until `min_tests` primes were seen.
/// Returns the bound used, or `None` as soon as a test fails.
fn survives(
    orbit: &NewformOrbit,
    disc: i64,
    opts: &TwistOptions,
    exec: Execution,
    test: impl Fn(&[num_bigint::BigInt]) -> bool,
) -> Result<Option<u64>, OrbitError> {
    let n = orbit.level();
    let start = opts.bound.max(2);
    let (mut lo, mut bound, mut tested) = (0u64, start, 0usize);
    loop {
        let primes: Vec<u64> = primes_up_to(bound)
            .into_iter()
            .filter(|&p| p > lo && !n.is_multiple_of(p) && kronecker(disc, p) == -1)
            .collect();
        for f in orbit.charpolys(&primes, exec)? {
            if !test(f.coeffs()) {
                return Ok(None);
            }
        }
        tested += primes.len();
        if tested >= opts.min_tests || bound >= start * 64 {
            return Ok(Some(bound));
        }
        lo = bound;
        bound *= 2;
    }
}

/// Odd quadratic characters of conductor dividing `4 N^2` under which every
/// tested charpoly is `X^d`; returns the first discriminant found.
pub fn detect_cm(orbit: &NewformOrbit, opts: &TwistOptions, exec: Execution) -> Result<Option<i64>, OrbitError> {
    let n = orbit.level();
    for disc in discriminants_dividing(4 * n * n, true) {
        let all_zero = |c: &[num_bigint::BigInt]| c[..c.len() - 1].iter().all(Zero::is_zero);
        if survives(orbit, disc, opts, exec, all_zero)?.is_some() {
            return Ok(Some(disc));
        }
    }
    Ok(None)
}

/// Nontrivial quadratic characters (primitive, conductor dividing `N` or the
/// override) under which every tested charpoly satisfies
/// `P(-X) = (-1)^d P(X)` at primes with `eps(p) = -1`.
pub fn detect_inner_twists(
    orbit: &NewformOrbit,
    opts: &TwistOptions,
    exec: Execution,
) -> Result<Vec<DirichletCharacter>, TwistError> {
    if let Some(d) = detect_cm(orbit, opts, exec)? {
        return Err(TwistError::Cm(d));
    }
    let m = opts.modulus.unwrap_or(orbit.level());
    let degree = orbit.degree();
    let parity_symmetric = |c: &[num_bigint::BigInt]| c.iter().enumerate().all(|(i, x)| (degree - i).is_multiple_of(2) || x.is_zero());
    let mut accepted = Vec::new();
    for disc in discriminants_dividing(m, false) {
        if survives(orbit, disc, opts, exec, parity_symmetric)?.is_some() {
            accepted.push(kronecker_character(disc));
        }
    }
    check_closed(&accepted)?;
    Ok(accepted)
}

fn check_closed(chars: &[DirichletCharacter]) -> Result<(), TwistError> {
    for a in chars {
        for b in chars {
            let c = a.lift(a.modulus() * b.modulus()).mul(&b.lift(a.modulus() * b.modulus())).primitive();
            if !c.is_trivial() && !chars.iter().any(|x| x.same_primitive(&c)) {
                return Err(TwistError::NotClosed(format!("{a} * {b} = {c} is not among the detected twists")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistAnalysis {
    pub label: String,
    pub degree: usize,
    pub cm_discriminant: Option<i64>,
    /// Nontrivial primitive quadratic characters; with the trivial one they
    /// form a group isomorphic to `Gamma`.
    pub inner_twists: Vec<DirichletCharacter>,
    pub gamma_order: usize,
    /// `[F_f : Q] = d / |Gamma|`.
    pub ff_degree: usize,
}

impl TwistAnalysis {
    pub fn discriminants(&self) -> Vec<i64> {
        self.inner_twists.iter().filter_map(DirichletCharacter::quadratic_discriminant).collect()
    }
}

/// CM detection followed, for non-CM orbits, by inner-twist detection.
pub fn analyze(orbit: &NewformOrbit, opts: &TwistOptions, exec: Execution) -> Result<TwistAnalysis, TwistError> {
    let degree = orbit.degree();
    let (cm, twists) = match detect_inner_twists(orbit, opts, exec) {
        Ok(t) => (None, t),
        Err(TwistError::Cm(d)) => (Some(d), Vec::new()),
        Err(e) => return Err(e),
    };
    let gamma = twists.len() + 1;
    if !gamma.is_power_of_two() || !degree.is_multiple_of(gamma) {
        return Err(TwistError::DegreeMismatch { degree, gamma });
    }
    Ok(TwistAnalysis {
        label: orbit.label().to_string(),
        degree,
        cm_discriminant: cm,
        inner_twists: twists,
        gamma_order: gamma,
        ff_degree: degree / gamma,
    })
}

/// Density data for one subgroup `H` of `Gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityEntry {
    /// Nontrivial characters whose automorphisms make up `H`.
    pub subgroup: Vec<DirichletCharacter>,
    /// `[E_f^H : Q] = d / |H|`.
    pub field_degree: usize,
    /// Density of `{p : Q(a_p) = E_f^H}`.
    pub generation: Rational64,
    /// Density of `{p : a_p in E_f^H}` (`1 / [K_H : Q]`).
    pub containment: Rational64,
}

fn subgroups(chars: &[DirichletCharacter]) -> Vec<Vec<usize>> {
    let s = chars.len();
    assert!(s <= 15, "twist group too large to enumerate");
    let product_index = |i: usize, j: usize| -> Option<usize> {
        let m = chars[i].modulus() * chars[j].modulus();
        let c = chars[i].lift(m).mul(&chars[j].lift(m)).primitive();
        chars.iter().position(|x| x.same_primitive(&c))
    };
    let mut out = Vec::new();
    for mask in 0u32..1 << s {
        let members: Vec<usize> = (0..s).filter(|&i| mask >> i & 1 == 1).collect();
        let closed = members.iter().all(|&i| {
            members.iter().all(|&j| i == j || product_index(i, j).is_some_and(|k| mask >> k & 1 == 1))
        });
        if closed {
            out.push(members);
        }
    }
    out
}

/// Predicted densities for every subgroup of `Gamma`, smallest subgroup first.
pub fn predict_densities(analysis: &TwistAnalysis) -> Vec<DensityEntry> {
    let chars = &analysis.inner_twists;
    let mut out: Vec<DensityEntry> = subgroups(chars)
        .into_iter()
        .map(|members| {
            let equal_one: Vec<DirichletCharacter> = members.iter().map(|&i| chars[i].clone()).collect();
            let not_equal_one: Vec<DirichletCharacter> =
                (0..chars.len()).filter(|i| !members.contains(i)).map(|i| chars[i].clone()).collect();
            let generation = condition_density(&CharacterConditionSet { equal_one: equal_one.clone(), not_equal_one });
            let containment = Rational64::new(1, joint_kernel_degree(&equal_one) as i64);
            DensityEntry {
                field_degree: analysis.degree / (members.len() + 1),
                subgroup: equal_one,
                generation,
                containment,
            }
        })
        .collect();
    out.sort_by_key(|e| (e.subgroup.len(), e.subgroup.clone()));
    out
}

/// Predicted vs observed frequency for one class of subfields (grouped by
/// degree, since charpolys alone do not tell isomorphic-degree subfields of
/// `E_f` apart).
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub field_degree: usize,
    pub predicted: Rational64,
    pub observed_count: usize,
    pub total: usize,
    pub observed: f64,
    pub gap: f64,
}

/// Compares predicted generation densities with the degree of `Q(a_p)` read
/// off the charpoly for every prime `p <= bound`.
pub fn empirical_vs_predicted(
    orbit: &NewformOrbit,
    analysis: &TwistAnalysis,
    bound: u64,
    exec: Execution,
) -> Result<Vec<ComparisonRow>, OrbitError> {
    let primes = primes_up_to(bound);
    let polys = orbit.charpolys(&primes, exec)?;
    let mut observed: BTreeMap<usize, usize> = BTreeMap::new();
    for f in &polys {
        // The charpoly is a power of the minimal polynomial of a_p.
        let fac = factor(f)?;
        let m = fac.factors.first().map_or(1, |(g, _)| g.degree());
        *observed.entry(m).or_insert(0) += 1;
    }
    let mut predicted: BTreeMap<usize, Rational64> = BTreeMap::new();
    for e in predict_densities(analysis) {
        *predicted.entry(e.field_degree).or_insert_with(Rational64::zero) += e.generation;
    }
    let degrees: Vec<usize> = predicted.keys().chain(observed.keys()).copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let total = primes.len();
    Ok(degrees
        .into_iter()
        .rev()
        .map(|m| {
            let pred = predicted.get(&m).copied().unwrap_or_else(Rational64::zero);
            let count = observed.get(&m).copied().unwrap_or(0);
            let obs = if total == 0 { 0.0 } else { count as f64 / total as f64 };
            let p = pred.to_f64().unwrap_or(0.0);
            ComparisonRow { field_degree: m, predicted: pred, observed_count: count, total, observed: obs, gap: (obs - p).abs() }
        })
        .collect())
}
