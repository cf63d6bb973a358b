//! One function per subcommand; each returns plain result rows that
//! [`crate::report`] renders.

use std::collections::BTreeSet;
use std::sync::Arc;

use apgen_core::algebra::is_irreducible;
use apgen_core::arith::{factorize, primes_up_to};
use apgen_core::gl2lab::{self, GridOutcome, GridPoint, MAX_FIELD};
use apgen_core::modsym::ModSymSpace;
use apgen_core::orbits::{count_below, decompose, select_orbit, NewformOrbit, OrbitError, OrbitSelector};
use apgen_core::par::{self, Execution};
use apgen_core::twists::{self, TwistAnalysis, TwistOptions};
use serde::Serialize;

use crate::cache::{Cache, CacheRecord};
use crate::config::RunConfig;
use crate::error::AppError;

/// Primes computed between two cache appends.
pub const BATCH: usize = 64;

pub struct Context {
    pub config: RunConfig,
    cache: Option<Cache>,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Context, AppError> {
        let cache = config.cache_dir.as_deref().map(Cache::open).transpose()?;
        Ok(Context { config, cache })
    }

    fn exec(&self) -> Execution {
        self.config.exec
    }

    /// Loads persisted charpolys of `orbit` into its in-memory cache and
    /// returns the primes already on disk.
    fn seed(&self, orbit: &NewformOrbit) -> Result<BTreeSet<u64>, AppError> {
        let Some(cache) = &self.cache else {
            return Ok(BTreeSet::new());
        };
        let loaded = cache.load(orbit.level(), orbit.weight())?;
        let mut on_disk = BTreeSet::new();
        for ((label, p), r) in loaded.records {
            if label == orbit.label() && r.degree == orbit.degree() {
                orbit.insert_charpoly(p, r.polynomial());
                on_disk.insert(p);
            }
        }
        Ok(on_disk)
    }

    /// Computes the charpolys at `primes` not yet known, appending them to
    /// the cache every [`BATCH`] primes so an interrupted run can resume.
    fn ensure(&self, orbit: &NewformOrbit, primes: &[u64], on_disk: &mut BTreeSet<u64>) -> Result<(), AppError> {
        let known: BTreeSet<u64> = orbit.cached_primes().into_iter().collect();
        let missing: Vec<u64> = primes.iter().copied().filter(|p| !known.contains(p)).collect();
        for chunk in missing.chunks(BATCH) {
            let polys = orbit.charpolys(chunk, self.exec())?;
            if let Some(cache) = &self.cache {
                let records: Vec<CacheRecord> = chunk
                    .iter()
                    .zip(&polys)
                    .map(|(&p, f)| CacheRecord::new(orbit.level(), orbit.weight(), orbit.label(), p, f))
                    .collect();
                cache.append(&records)?;
                on_disk.extend(chunk);
            }
        }
        Ok(())
    }

    /// Writes out whatever was computed outside [`Context::ensure`].
    fn persist_rest(&self, orbit: &NewformOrbit, on_disk: &mut BTreeSet<u64>) -> Result<(), AppError> {
        let Some(cache) = &self.cache else {
            return Ok(());
        };
        let fresh: Vec<u64> = orbit.cached_primes().into_iter().filter(|p| !on_disk.contains(p)).collect();
        let mut records = Vec::with_capacity(fresh.len());
        for &p in &fresh {
            records.push(CacheRecord::new(orbit.level(), orbit.weight(), orbit.label(), p, &orbit.charpoly(p)?));
        }
        cache.append(&records)?;
        on_disk.extend(fresh);
        Ok(())
    }
}

pub fn load_orbits(level: u64, weight: u32) -> Result<Vec<NewformOrbit>, AppError> {
    let space = ModSymSpace::build(level, weight).map_err(OrbitError::from)?;
    Ok(decompose(&Arc::new(space))?)
}

fn selected<'a>(orbits: &'a [NewformOrbit], sel: &Option<OrbitSelector>) -> Result<Vec<&'a NewformOrbit>, AppError> {
    match sel {
        Some(s) => Ok(vec![select_orbit(orbits, s)?]),
        None => Ok(orbits.iter().collect()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitRow {
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "k")]
    pub weight: u32,
    pub orbit: String,
    pub degree: usize,
    pub witness: String,
    pub witness_charpoly: String,
}

pub fn orbits(level: u64, weight: u32) -> Result<Vec<OrbitRow>, AppError> {
    Ok(load_orbits(level, weight)?
        .iter()
        .map(|o| OrbitRow {
            level,
            weight,
            orbit: o.label().to_string(),
            degree: o.degree(),
            witness: o.witness().to_string(),
            witness_charpoly: o.witness().charpoly.to_string(),
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusResult {
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "k")]
    pub weight: u32,
    pub orbit: String,
    pub degree: usize,
    pub bound: u64,
    pub primes_tested: usize,
    pub count: usize,
    pub reducible: Vec<u64>,
    /// Reducible primes with `p^2 | N`.
    pub square_level_primes: Vec<u64>,
    #[serde(skip)]
    pub verdicts: Vec<(u64, bool)>,
}

fn census_one(ctx: &Context, orbit: &NewformOrbit, bound: u64) -> Result<CensusResult, AppError> {
    let primes = primes_up_to(bound);
    let mut on_disk = ctx.seed(orbit)?;
    ctx.ensure(orbit, &primes, &mut on_disk)?;
    let flags = par::try_map(ctx.exec(), &primes, |&p| -> Result<bool, OrbitError> {
        Ok(orbit.degree() > 1 && !is_irreducible(&orbit.charpoly(p)?)?)
    })?;
    let verdicts: Vec<(u64, bool)> = primes.iter().copied().zip(flags).collect();
    let reducible: Vec<u64> = verdicts.iter().filter(|v| v.1).map(|v| v.0).collect();
    let report = orbit.report(bound, reducible, Default::default());
    Ok(CensusResult {
        level: report.level,
        weight: report.weight,
        orbit: report.label,
        degree: report.degree,
        bound,
        primes_tested: primes.len(),
        count: report.primes.len(),
        reducible: report.primes,
        square_level_primes: report.square_level_primes,
        verdicts,
    })
}

pub fn census(ctx: &Context, level: u64, weight: u32, sel: &Option<OrbitSelector>, bound: u64) -> Result<Vec<CensusResult>, AppError> {
    let orbits = load_orbits(level, weight)?;
    selected(&orbits, sel)?.into_iter().map(|o| census_one(ctx, o, bound)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityRow {
    /// Discriminants of the characters in the subgroup `H`.
    pub subgroup: Vec<i64>,
    pub field_degree: usize,
    pub generation: String,
    pub containment: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistReport {
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "k")]
    pub weight: u32,
    pub orbit: String,
    pub degree: usize,
    pub cm_discriminant: Option<i64>,
    pub inner_twists: Vec<i64>,
    pub gamma_order: usize,
    pub ff_degree: usize,
    pub densities: Vec<DensityRow>,
}

fn twist_report(orbit: &NewformOrbit, a: &TwistAnalysis) -> TwistReport {
    let densities = if a.cm_discriminant.is_some() {
        Vec::new()
    } else {
        twists::predict_densities(a)
            .into_iter()
            .map(|e| DensityRow {
                subgroup: e.subgroup.iter().filter_map(|c| c.quadratic_discriminant()).collect(),
                field_degree: e.field_degree,
                generation: e.generation.to_string(),
                containment: e.containment.to_string(),
            })
            .collect()
    };
    TwistReport {
        level: orbit.level(),
        weight: orbit.weight(),
        orbit: a.label.clone(),
        degree: a.degree,
        cm_discriminant: a.cm_discriminant,
        inner_twists: a.discriminants(),
        gamma_order: a.gamma_order,
        ff_degree: a.ff_degree,
        densities,
    }
}

fn analyze(ctx: &Context, orbit: &NewformOrbit, bound: u64, on_disk: &mut BTreeSet<u64>) -> Result<TwistAnalysis, AppError> {
    let opts = TwistOptions { bound, ..TwistOptions::default() };
    let analysis = twists::analyze(orbit, &opts, ctx.exec());
    ctx.persist_rest(orbit, on_disk)?;
    Ok(analysis?)
}

pub fn twists(ctx: &Context, level: u64, weight: u32, sel: &Option<OrbitSelector>, bound: u64) -> Result<Vec<TwistReport>, AppError> {
    let orbits = load_orbits(level, weight)?;
    selected(&orbits, sel)?
        .into_iter()
        .map(|o| {
            let mut on_disk = ctx.seed(o)?;
            Ok(twist_report(o, &analyze(ctx, o, bound, &mut on_disk)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonOut {
    pub field_degree: usize,
    pub predicted: String,
    pub observed_count: usize,
    pub total: usize,
    pub observed: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityReport {
    #[serde(flatten)]
    pub twists: TwistReport,
    pub bound: u64,
    /// Empty for CM orbits, where the predictions do not apply.
    pub comparison: Vec<ComparisonOut>,
}

pub fn density(ctx: &Context, level: u64, weight: u32, sel: &Option<OrbitSelector>, bound: u64) -> Result<Vec<DensityReport>, AppError> {
    let orbits = load_orbits(level, weight)?;
    selected(&orbits, sel)?
        .into_iter()
        .map(|o| {
            let mut on_disk = ctx.seed(o)?;
            ctx.ensure(o, &primes_up_to(bound), &mut on_disk)?;
            let a = analyze(ctx, o, twists::TwistOptions::default().bound, &mut on_disk)?;
            let comparison = if a.cm_discriminant.is_some() {
                Vec::new()
            } else {
                twists::empirical_vs_predicted(o, &a, bound, ctx.exec())?
                    .into_iter()
                    .map(|r| ComparisonOut {
                        field_degree: r.field_degree,
                        predicted: r.predicted.to_string(),
                        observed_count: r.observed_count,
                        total: r.total,
                        observed: r.observed,
                        gap: r.gap,
                    })
                    .collect()
            };
            Ok(DensityReport { twists: twist_report(o, &a), bound, comparison })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRow {
    #[serde(rename = "N")]
    pub level: u64,
    #[serde(rename = "k")]
    pub weight: u32,
    pub orbit: String,
    pub degree: usize,
    pub x: u64,
    /// Reducible primes `p < x`.
    pub count: usize,
}

pub fn count(ctx: &Context, level: u64, weight: u32, sel: &Option<OrbitSelector>, grid: &[u64]) -> Result<Vec<CountRow>, AppError> {
    let Some(&top) = grid.last() else {
        return Ok(Vec::new());
    };
    let mut rows = Vec::new();
    for r in census(ctx, level, weight, sel, top - 1)? {
        for (x, count) in grid.iter().zip(count_below(&r.reducible, grid)) {
            rows.push(CountRow { level, weight, orbit: r.orbit.clone(), degree: r.degree, x: *x, count });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KindOut {
    pub q: u64,
    pub order: usize,
    pub class_count: usize,
    /// S, T, U, V.
    pub kind_counts: [usize; 4],
    pub kind_sizes: [Option<usize>; 4],
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundLine {
    pub charpoly: String,
    pub classes: usize,
    pub class_sum: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gl2PointOut {
    pub q: u64,
    pub r: u32,
    pub r_order: u64,
    pub rt_order: u64,
    pub variant: String,
    /// `checked` or `not-normal` (outside the hypotheses, skipped).
    pub status: String,
    pub h_order: usize,
    pub g_order: usize,
    pub quotient_order: usize,
    pub quotient: String,
    pub bound: usize,
    pub max_class_sum: usize,
    pub max_ratio: f64,
    pub coset_a: bool,
    pub coset_b: bool,
    pub class_equation: bool,
    pub passes: bool,
    #[serde(skip)]
    pub rows: Vec<BoundLine>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gl2Out {
    pub kinds: Vec<KindOut>,
    pub points: Vec<Gl2PointOut>,
}

impl Gl2Out {
    pub fn passes(&self) -> bool {
        self.kinds.iter().all(|l| l.holds) && self.points.iter().all(|p| p.passes)
    }
}

fn point_out(p: &GridPoint, o: &GridOutcome) -> Gl2PointOut {
    let mut out = Gl2PointOut {
        q: p.q,
        r: p.r,
        r_order: p.r_order,
        rt_order: p.rt_order,
        variant: p.variant.to_string(),
        status: "not-normal".into(),
        h_order: 0,
        g_order: 0,
        quotient_order: 0,
        quotient: String::new(),
        bound: 0,
        max_class_sum: 0,
        max_ratio: 0.0,
        coset_a: true,
        coset_b: true,
        class_equation: true,
        passes: o.passes(),
        rows: Vec::new(),
    };
    if let GridOutcome::Checked { quotient, bound, coset, class_equation, g_order, h_order } = o {
        out.status = "checked".into();
        out.h_order = *h_order;
        out.g_order = *g_order;
        out.quotient_order = quotient.order;
        out.quotient = format!("{:?}", quotient.verdict).to_uppercase();
        out.bound = bound.bound;
        out.max_class_sum = bound.max_row().class_sum;
        out.max_ratio = bound.max_ratio();
        out.coset_a = coset.part_a;
        out.coset_b = coset.part_b;
        out.class_equation = *class_equation;
        out.rows = bound
            .rows
            .iter()
            .filter(|r| r.class_sum > 0)
            .map(|r| BoundLine { charpoly: r.charpoly.to_string(), classes: r.classes, class_sum: r.class_sum })
            .collect();
    }
    out
}

/// Kind checks and the subgroup grid, either for one base field `q` or for
/// every `q^r <= grid_max`.
pub fn gl2(ctx: &Context, q: Option<u64>, grid_max: Option<u64>) -> Result<Gl2Out, AppError> {
    let max = grid_max.unwrap_or(MAX_FIELD);
    for v in [q, grid_max].into_iter().flatten() {
        if v > MAX_FIELD {
            return Err(gl2lab::Gl2Error::Budget(v).into());
        }
    }
    let fields: Vec<u64> = match q {
        Some(q) => {
            if q < 2 || factorize(q).len() != 1 {
                return Err(gl2lab::Gl2Error::NotPrimePower(q).into());
            }
            vec![q]
        }
        None => (2..=max).filter(|&n| factorize(n).len() == 1).collect(),
    };
    let kinds = par::try_map(ctx.exec(), &fields, |&f| -> Result<KindOut, gl2lab::Gl2Error> {
        let r = gl2lab::kind_report(&gl2lab::conjugacy_classes(f)?);
        Ok(KindOut {
            q: f,
            order: r.order,
            class_count: r.class_count,
            kind_counts: r.kind_counts,
            kind_sizes: r.kind_sizes,
            holds: r.holds(),
        })
    })?;
    let points: Vec<GridPoint> = gl2lab::grid_points(max).into_iter().filter(|p| q.is_none_or(|q| p.q == q)).collect();
    let outcomes = par::try_map(ctx.exec(), &points, gl2lab::check_point)?;
    let points = points.iter().zip(&outcomes).map(|(p, o)| point_out(p, o)).collect();
    Ok(Gl2Out { kinds, points })
}
