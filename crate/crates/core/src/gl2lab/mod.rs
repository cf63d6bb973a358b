//! Exhaustive checks on conjugacy classes of `GL_2` over small finite fields
//! and of determinant-constrained subgroups `H <| G`.
//!
//! Notation: `q` is the base field size, `Q = q^r` the ambient one. `R` and
//! `R~` are the cyclic subgroups of `F_Q^x` of orders `m_R | m_R~`; `H` is
//! `{g in GL_2(F_q) : det g in R}` and `G` one of the [`GVariant`]s.

mod field;
mod group;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

pub use field::{Fq, MAX_FIELD};
pub use group::{Group, Mat};

use num_integer::gcd;

use crate::arith::{divisors, factorize};
use crate::par::{self, Execution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gl2Error {
    #[error("field of size {0} exceeds the enumeration budget of {MAX_FIELD}")]
    Budget(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid subgroup data: {0}")]
    NotSubgroup(String),
    #[error("H is not normal in G")]
    NotNormal,
    #[error("generator {0} has determinant outside R~")]
    DetOutside(String),
}

/// Conjugacy class type in `GL_2` of the ambient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    /// Scalar.
    S,
    /// Repeated eigenvalue, not scalar.
    T,
    /// Two distinct eigenvalues in the field.
    U,
    /// Irreducible charpoly.
    V,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `X^2 - trace X + det`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quadratic {
    pub trace: u8,
    pub det: u8,
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X^2-{}X+{}", self.trace, self.det)
    }
}

impl Fq {
    pub fn charpoly(&self, x: Mat) -> Quadratic {
        Quadratic { trace: self.trace(x), det: self.det(x) }
    }

    pub fn kind(&self, x: Mat) -> Kind {
        if x.is_scalar() {
            return Kind::S;
        }
        let Quadratic { trace, det } = self.charpoly(x);
        let roots: Vec<u8> = (0..self.order() as u8)
            .filter(|&a| self.add(self.sub(self.mul(a, a), self.mul(trace, a)), det) == 0)
            .collect();
        match roots.as_slice() {
            [] => Kind::V,
            [a] if self.add(*a, *a) == trace => Kind::T,
            [_] => unreachable!("a quadratic with one simple root has another"),
            _ => Kind::U,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjugacyClass {
    pub representative: Mat,
    pub size: usize,
    pub kind: Kind,
    pub charpoly: Quadratic,
}

/// Conjugacy classes of a finite matrix group.
#[derive(Clone, Debug)]
pub struct Gl2Census {
    pub field: Arc<Fq>,
    pub order: usize,
    pub classes: Vec<ConjugacyClass>,
}

impl Gl2Census {
    /// Classes with the smallest element as representative.
    pub fn of_group(group: &Group) -> Gl2Census {
        let f = group.field().clone();
        let classes = group
            .conjugacy_classes()
            .into_iter()
            .map(|c| ConjugacyClass { representative: c[0], size: c.len(), kind: f.kind(c[0]), charpoly: f.charpoly(c[0]) })
            .collect();
        Gl2Census { field: f, order: group.order(), classes }
    }

    pub fn class_equation_holds(&self) -> bool {
        self.classes.iter().map(|c| c.size).sum::<usize>() == self.order
    }

    /// Total size of the classes with charpoly `p`.
    pub fn class_sum(&self, p: Quadratic) -> usize {
        self.classes.iter().filter(|c| c.charpoly == p).map(|c| c.size).sum()
    }
}

/// The canonical `S_a`, `T_a`, `U_(a,b)`, `V_(x,y)` matrix with the given
/// kind and charpoly. In characteristic 2 every element is a square, so
/// `[[x, eps y], [y, x]]` is never irreducible there; the companion matrix
/// stands in for `V`.
pub fn canonical_representative(f: &Fq, kind: Kind, p: Quadratic) -> Mat {
    let q = f.order() as u8;
    let root = |t: u8, d: u8| (0..q).find(|&a| f.add(f.sub(f.mul(a, a), f.mul(t, a)), d) == 0);
    match kind {
        Kind::S => Mat::scalar(root(p.trace, p.det).expect("scalar class has a root")),
        Kind::T => {
            let a = root(p.trace, p.det).expect("repeated root");
            Mat([a, 0, 1, a])
        }
        Kind::U => {
            let a = root(p.trace, p.det).expect("split");
            let b = f.sub(p.trace, a);
            Mat([a.min(b), 0, 0, a.max(b)])
        }
        Kind::V if f.characteristic() == 2 => Mat([0, f.neg(p.det), 1, p.trace]),
        Kind::V => {
            // trace = 2x, det = x^2 - eps y^2
            let x = f.mul(p.trace, f.inv(2));
            let eps = f.generator();
            (1..q)
                .map(|y| Mat([x, f.mul(eps, y), y, x]))
                .find(|&m| f.det(m) == p.det)
                .expect("V class meets the standard form")
        }
    }
}

/// Conjugacy classes of `GL_2(F_q)` with canonical representatives.
pub fn conjugacy_classes(q: u64) -> Result<Gl2Census, Gl2Error> {
    let f = Arc::new(Fq::new(q)?);
    let all: Vec<u8> = (0..q as u8).collect();
    let units: Vec<u8> = (1..q as u8).collect();
    let g = Group::from_predicate(f.clone(), &all, &units);
    let mut census = Gl2Census::of_group(&g);
    let qk = q as usize;
    let mut class_of = vec![usize::MAX; qk.pow(4)];
    for (i, c) in g.conjugacy_classes().iter().enumerate() {
        for x in c {
            class_of[x.key(qk)] = i;
        }
    }
    for (i, c) in census.classes.iter_mut().enumerate() {
        let rep = canonical_representative(&f, c.kind, c.charpoly);
        assert_eq!(class_of[rep.key(qk)], i, "canonical representative outside its class");
        c.representative = rep;
    }
    Ok(census)
}

/// Class counts and sizes per kind against the closed forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KindReport {
    pub q: u64,
    pub order: usize,
    pub class_count: usize,
    /// Indexed S, T, U, V.
    pub kind_counts: [usize; 4],
    /// The common class size of each kind, `None` if absent or not constant.
    pub kind_sizes: [Option<usize>; 4],
    pub expected_counts: [usize; 4],
    pub expected_sizes: [usize; 4],
}

impl KindReport {
    pub fn holds(&self) -> bool {
        let q = self.q as usize;
        let sizes_ok = (0..4).all(|i| self.kind_counts[i] == 0 || self.kind_sizes[i] == Some(self.expected_sizes[i]));
        self.kind_counts == self.expected_counts
            && sizes_ok
            && self.class_count == q * q - 1
            && self.order == (q * q - 1) * (q * q - q)
    }
}

pub fn kind_report(census: &Gl2Census) -> KindReport {
    let q = census.field.order() as usize;
    let mut counts = [0usize; 4];
    let mut sizes: [Option<Option<usize>>; 4] = [None; 4];
    for c in &census.classes {
        let i = c.kind as usize;
        counts[i] += 1;
        sizes[i] = match sizes[i] {
            None => Some(Some(c.size)),
            Some(Some(s)) if s == c.size => Some(Some(s)),
            _ => Some(None),
        };
    }
    KindReport {
        q: q as u64,
        order: census.order,
        class_count: census.classes.len(),
        kind_counts: counts,
        kind_sizes: sizes.map(Option::flatten),
        expected_counts: [q - 1, q - 1, (q - 1) * (q - 2) / 2, q * (q - 1) / 2],
        expected_sizes: [1, q * q - 1, q * q + q, q * q - q],
    }
}

/// Which `G` between `H` and the `R~`-determinant group to build.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GVariant {
    /// `G = H`.
    Base,
    /// `G = H` times the scalars `sqrt(R~)`.
    Scalar,
    /// `G = {g in GL_2(F_Q) : det g in R~}`.
    Full,
    /// `G = <H, extra generators>`.
    Custom(Vec<Mat>),
}

impl fmt::Display for GVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GVariant::Base => write!(f, "base"),
            GVariant::Scalar => write!(f, "scalar"),
            GVariant::Full => write!(f, "full"),
            GVariant::Custom(g) => write!(f, "custom({})", g.iter().map(Mat::to_string).collect::<Vec<_>>().join(";")),
        }
    }
}

/// `H <| G` together with the groups `R`, `R~`, `sqrt(R~)` and coset
/// representatives `s_i` of `sqrt(R~)/R`.
#[derive(Clone, Debug)]
pub struct DeterminantSetup {
    pub q: u64,
    pub r: u32,
    pub field: Arc<Fq>,
    pub variant: GVariant,
    pub r_group: Vec<u8>,
    pub rt_group: Vec<u8>,
    pub sqrt_rt: Vec<u8>,
    pub coset_reps: Vec<u8>,
    pub h: Group,
    pub g: Group,
}

fn prime_power(q: u64) -> Result<(), Gl2Error> {
    if q < 2 || factorize(q).len() != 1 {
        return Err(Gl2Error::NotPrimePower(q));
    }
    Ok(())
}

/// Builds `H` and `G`. `R` and `R~` are given by their orders; `R` must lie in
/// `F_q^x` so that `|H| = |R| |SL_2(F_q)|`.
pub fn build_subgroups(q: u64, r: u32, r_order: u64, rt_order: u64, variant: GVariant) -> Result<DeterminantSetup, Gl2Error> {
    prime_power(q)?;
    let big = q.checked_pow(r).filter(|&v| v <= MAX_FIELD).ok_or(Gl2Error::Budget(q.saturating_pow(r)))?;
    let n = big - 1;
    if r_order == 0 || !(q - 1).is_multiple_of(r_order) {
        return Err(Gl2Error::NotSubgroup(format!("|R| = {r_order} does not divide |F_{q}^x| = {}", q - 1)));
    }
    if rt_order == 0 || !rt_order.is_multiple_of(r_order) || n % rt_order != 0 {
        return Err(Gl2Error::NotSubgroup(format!("need |R| = {r_order} | |R~| = {rt_order} | {n}")));
    }
    let f = Arc::new(Fq::new(big)?);
    let r_group = f.cyclic_subgroup(r_order);
    let rt_group = f.cyclic_subgroup(rt_order);
    let sqrt_rt = f.cyclic_subgroup(gcd(2 * rt_order, n));
    debug_assert!(sqrt_rt.iter().all(|&s| rt_group.contains(&f.mul(s, s))));
    let mut coset_reps = Vec::new();
    let mut covered = vec![false; big as usize];
    for &s in &sqrt_rt {
        if !covered[s as usize] {
            coset_reps.push(s);
            for &x in &r_group {
                covered[f.mul(s, x) as usize] = true;
            }
        }
    }
    let sub = f.subfield(q);
    let h = Group::from_predicate(f.clone(), &sub, &r_group);
    let g = match &variant {
        GVariant::Base => h.clone(),
        GVariant::Scalar => {
            let s = f.pow(f.generator(), n / sqrt_rt.len() as u64);
            let mut gens = h.gens().to_vec();
            gens.push(Mat::scalar(s));
            Group::generate(f.clone(), gens)
        }
        GVariant::Full => {
            let all: Vec<u8> = (0..big as u8).collect();
            Group::from_predicate(f.clone(), &all, &rt_group)
        }
        GVariant::Custom(extra) => {
            for &m in extra {
                if !rt_group.contains(&f.det(m)) {
                    return Err(Gl2Error::DetOutside(m.to_string()));
                }
            }
            let mut gens = h.gens().to_vec();
            gens.extend(extra);
            Group::generate(f.clone(), gens)
        }
    };
    if !h.normalized_by(&g) {
        return Err(Gl2Error::NotNormal);
    }
    debug_assert!(h.is_subgroup_of(&g));
    Ok(DeterminantSetup { q, r, field: f, variant, r_group, rt_group, sqrt_rt, coset_reps, h, g })
}

impl DeterminantSetup {
    pub fn census(&self) -> Gl2Census {
        Gl2Census::of_group(&self.g)
    }

    /// `G ∩ GL_2(F_q)`.
    pub fn base_part(&self) -> Group {
        let sub = self.field.subfield(self.q);
        let mut in_sub = vec![false; self.field.order() as usize];
        for &x in &sub {
            in_sub[x as usize] = true;
        }
        let elems = self.g.elements().iter().copied().filter(|m| m.0.iter().all(|&e| in_sub[e as usize])).collect();
        Group::from_elements(self.field.clone(), elems)
    }

    /// `|R~ / R|`.
    pub fn index(&self) -> usize {
        self.rt_group.len() / self.r_group.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuotientVerdict {
    Psl,
    Pgl,
    /// `q = 2`, where the two orders coincide.
    Both,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuotientReport {
    /// `|G / (G ∩ scalars)|`.
    pub order: usize,
    pub psl_order: usize,
    pub pgl_order: usize,
    pub verdict: QuotientVerdict,
}

pub fn quotient_type(setup: &DeterminantSetup) -> QuotientReport {
    let scalars = setup.g.elements().iter().filter(|m| m.is_scalar()).count();
    let order = setup.g.order() / scalars;
    let q = setup.q as usize;
    let pgl = q * (q * q - 1);
    let psl = pgl / gcd(2, setup.q - 1) as usize;
    let verdict = match (order == psl, order == pgl) {
        (true, true) => QuotientVerdict::Both,
        (true, false) => QuotientVerdict::Psl,
        (false, true) => QuotientVerdict::Pgl,
        (false, false) => QuotientVerdict::Neither,
    };
    QuotientReport { order, psl_order: psl, pgl_order: pgl, verdict }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub charpoly: Quadratic,
    pub classes: usize,
    pub class_sum: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    /// `2 |R~/R| (q^2 + q)`.
    pub bound: usize,
    /// One row per monic quadratic over `F_Q`, including empty ones.
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn max_row(&self) -> &BoundRow {
        self.rows.iter().max_by_key(|r| (r.class_sum, std::cmp::Reverse(r.charpoly))).expect("at least one polynomial")
    }

    pub fn max_ratio(&self) -> f64 {
        self.max_row().class_sum as f64 / self.bound as f64
    }

    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.class_sum <= self.bound)
    }
}

pub fn verify_charpoly_bound(setup: &DeterminantSetup, census: &Gl2Census) -> BoundReport {
    let q = setup.q as usize;
    let big = setup.field.order() as u8;
    let mut by_poly: HashMap<Quadratic, (usize, usize)> = HashMap::new();
    for c in &census.classes {
        let e = by_poly.entry(c.charpoly).or_default();
        e.0 += 1;
        e.1 += c.size;
    }
    let mut rows = Vec::with_capacity(big as usize * big as usize);
    for trace in 0..big {
        for det in 0..big {
            let charpoly = Quadratic { trace, det };
            let (classes, class_sum) = by_poly.get(&charpoly).copied().unwrap_or_default();
            rows.push(BoundRow { charpoly, classes, class_sum });
        }
    }
    BoundReport { bound: 2 * setup.index() * (q * q + q), rows }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetReport {
    pub reps: Vec<u8>,
    /// Every `g` has some `s_i` with `s_i I in G` and `g s_i^-1 in G ∩ GL_2(F_q)`.
    pub part_a: bool,
    /// `[g]_G = [g s_i^-1]_K s_i` for every `g` covered by (a).
    pub part_b: bool,
    /// First element witnessing a failure.
    pub counterexample: Option<Mat>,
}

impl CosetReport {
    pub fn holds(&self) -> bool {
        self.part_a && self.part_b
    }
}

pub fn coset_decomposition_check(setup: &DeterminantSetup) -> CosetReport {
    let f = &setup.field;
    let qk = f.order() as usize;
    let k = setup.base_part();
    let class_ids = |group: &Group| {
        let mut ids = vec![usize::MAX; qk.pow(4)];
        let classes = group.conjugacy_classes();
        for (i, c) in classes.iter().enumerate() {
            for x in c {
                ids[x.key(qk)] = i;
            }
        }
        (ids, classes)
    };
    let (g_ids, g_classes) = class_ids(&setup.g);
    let (k_ids, k_classes) = class_ids(&k);
    let usable: Vec<u8> = setup.coset_reps.iter().copied().filter(|&s| setup.g.contains(Mat::scalar(s))).collect();
    let mut report = CosetReport { reps: setup.coset_reps.clone(), part_a: true, part_b: true, counterexample: None };
    let mut checked: HashMap<(usize, u8), bool> = HashMap::new();
    for &g in setup.g.elements() {
        let found = usable.iter().find_map(|&s| {
            let h = f.scale(g, f.inv(s));
            k.contains(h).then_some((s, h))
        });
        let Some((s, h)) = found else {
            report.part_a = false;
            report.counterexample.get_or_insert(g);
            continue;
        };
        let kc = k_ids[h.key(qk)];
        let target = g_ids[g.key(qk)];
        let ok = *checked.entry((kc, s)).or_insert_with(|| {
            let class = &k_classes[kc];
            class.len() == g_classes[target].len() && class.iter().all(|&x| g_ids[f.scale(x, s).key(qk)] == target)
        });
        if !ok {
            report.part_b = false;
            report.counterexample.get_or_insert(g);
        }
    }
    report
}

/// One `(q, r, R, R~, G)` parameter point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub q: u64,
    pub r: u32,
    pub r_order: u64,
    pub rt_order: u64,
    pub variant: GVariant,
}

#[derive(Clone, Debug)]
pub enum GridOutcome {
    Checked { quotient: QuotientReport, bound: BoundReport, coset: CosetReport, class_equation: bool, g_order: usize, h_order: usize },
    /// `H` is not normal in the requested `G`; outside the hypotheses.
    NotNormal,
}

impl GridOutcome {
    /// Not normal counts as vacuous success.
    pub fn passes(&self) -> bool {
        match self {
            GridOutcome::Checked { quotient, bound, coset, class_equation, .. } => {
                *class_equation && bound.holds() && coset.holds() && quotient.verdict != QuotientVerdict::Neither
            }
            GridOutcome::NotNormal => true,
        }
    }
}

/// `(q, r)` with `q^r <= max_field`, ordered by `q^r` then `q`.
pub fn field_pairs(max_field: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for q in 2..=max_field {
        if factorize(q).len() != 1 {
            continue;
        }
        let mut r = 1u32;
        while q.pow(r) <= max_field {
            out.push((q, r));
            r += 1;
        }
    }
    out.sort_by_key(|&(q, r)| (q.pow(r), q));
    out
}

/// Every `(q, r)` with `q^r <= max_field`, every `R <= F_q^x`,
/// `R <= R~ <= F_Q^x`, and the three standard variants.
pub fn grid_points(max_field: u64) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for (q, r) in field_pairs(max_field.min(MAX_FIELD)) {
        let n = q.pow(r) - 1;
        for r_order in divisors(q - 1) {
            for rt_order in divisors(n).into_iter().filter(|t| t % r_order == 0) {
                for variant in [GVariant::Base, GVariant::Scalar, GVariant::Full] {
                    out.push(GridPoint { q, r, r_order, rt_order, variant });
                }
            }
        }
    }
    out
}

pub fn check_point(p: &GridPoint) -> Result<GridOutcome, Gl2Error> {
    let setup = match build_subgroups(p.q, p.r, p.r_order, p.rt_order, p.variant.clone()) {
        Ok(s) => s,
        Err(Gl2Error::NotNormal) => return Ok(GridOutcome::NotNormal),
        Err(e) => return Err(e),
    };
    let census = setup.census();
    Ok(GridOutcome::Checked {
        quotient: quotient_type(&setup),
        bound: verify_charpoly_bound(&setup, &census),
        coset: coset_decomposition_check(&setup),
        class_equation: census.class_equation_holds(),
        g_order: setup.g.order(),
        h_order: setup.h.order(),
    })
}

pub fn run_grid(max_field: u64, exec: Execution) -> Result<Vec<(GridPoint, GridOutcome)>, Gl2Error> {
    if max_field > MAX_FIELD {
        return Err(Gl2Error::Budget(max_field));
    }
    let points = grid_points(max_field);
    let outcomes = par::try_map(exec, &points, check_point)?;
    Ok(points.into_iter().zip(outcomes).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_at_three() {
        let c = conjugacy_classes(3).unwrap();
        let r = kind_report(&c);
        assert!(r.holds(), "{r:?}");
        assert_eq!(r.expected_sizes, [1, 8, 12, 6]);
    }

    #[test]
    fn h_order() {
        let s = build_subgroups(3, 1, 2, 2, GVariant::Base).unwrap();
        assert_eq!(s.h.order(), 48);
        let s = build_subgroups(3, 1, 1, 1, GVariant::Base).unwrap();
        assert_eq!(s.h.order(), 24);
    }
}
