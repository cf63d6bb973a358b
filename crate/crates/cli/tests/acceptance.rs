//! Runs every acceptance criterion and prints one PASS/FAIL line each,
//! followed by indented details. Exits nonzero if any criterion fails.

#[path = "../../core/tests/support/oracles.rs"]
mod oracles;

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::sync::Arc;
use std::time::Instant;

use apgen_cli::commands::{self, Context};
use apgen_cli::config::RunConfig;
use apgen_cli::report;
use apgen_core::algebra::{factor, IntPolynomial};
use apgen_core::arith::primes_up_to;
use apgen_core::gl2lab::{self, GridOutcome};
use apgen_core::modsym::ModSymSpace;
use apgen_core::orbits::{decompose, NewformOrbit};
use apgen_core::par::Execution;
use apgen_core::twists::{self, TwistOptions};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tolerance on `|observed - predicted|` for the empirical density.
const DENSITY_TOLERANCE: f64 = 0.01;

struct Harness {
    spaces: HashMap<(u64, u32), Arc<Vec<NewformOrbit>>>,
    exec: Execution,
    failed: Vec<String>,
}

type Lines = Vec<String>;

impl Harness {
    fn orbits(&mut self, n: u64, k: u32) -> Arc<Vec<NewformOrbit>> {
        self.spaces
            .entry((n, k))
            .or_insert_with(|| Arc::new(decompose(&Arc::new(ModSymSpace::build(n, k).unwrap())).unwrap()))
            .clone()
    }

    /// Positions of the degree `d` orbits at `(n, k)` in canonical order.
    fn of_degree(&mut self, n: u64, k: u32, d: usize) -> (Arc<Vec<NewformOrbit>>, Vec<usize>) {
        let all = self.orbits(n, k);
        let idx = (0..all.len()).filter(|&i| all[i].degree() == d).collect();
        (all, idx)
    }

    fn reducible(&self, o: &NewformOrbit, bound: u64) -> Vec<u64> {
        o.reducible_primes(bound, self.exec).unwrap().primes
    }

    fn criterion(&mut self, id: &str, title: &str, f: impl FnOnce(&mut Self, &mut Lines) -> bool) {
        let start = Instant::now();
        let mut lines = Vec::new();
        let ok = f(self, &mut lines);
        println!("{} {id}. {title} [{:.1?}]", if ok { "PASS" } else { "FAIL" }, start.elapsed());
        for l in lines {
            println!("    {l}");
        }
        if !ok {
            self.failed.push(id.to_string());
        }
    }
}

/// Exact list match for the first orbit(s) of degree `d`; when several
/// orbits of that degree are listed for one level, as a multiset.
fn list_rows(h: &mut Harness, rows: &[(u32, usize, u64, &[u64])], bound: u64, out: &mut Lines) -> bool {
    let mut grouped: BTreeMap<(u32, usize, u64), Vec<Vec<u64>>> = BTreeMap::new();
    for &(k, d, n, list) in rows {
        grouped.entry((k, d, n)).or_default().push(list.to_vec());
    }
    let mut ok = true;
    for ((k, d, n), mut expected) in grouped {
        let (all, idx) = h.of_degree(n, k, d);
        let orbits: Vec<(String, Vec<u64>)> =
            idx.iter().take(expected.len()).map(|&i| (all[i].label().to_string(), h.reducible(&all[i], bound))).collect();
        let mut got: Vec<Vec<u64>> = orbits.iter().map(|o| o.1.clone()).collect();
        got.sort();
        expected.sort();
        let row_ok = got == expected;
        ok &= row_ok;
        for (label, list) in &orbits {
            out.push(format!("{} k={k} d={d} N={n} {label}: {} primes {}", if row_ok { "ok " } else { "BAD" }, list.len(), short(list)));
        }
        if !row_ok {
            out.push(format!("    expected {expected:?}"));
        }
    }
    ok
}

fn short(list: &[u64]) -> String {
    if list.len() <= 12 {
        format!("{list:?}")
    } else {
        format!("{:?}...{:?}", &list[..6], &list[list.len() - 3..])
    }
}

fn count_rows(h: &mut Harness, rows: &[(u64, usize)], bound: u64, out: &mut Lines) -> bool {
    let mut grouped: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for &(n, c) in rows {
        grouped.entry(n).or_default().push(c);
    }
    let mut ok = true;
    for (n, mut expected) in grouped {
        let (all, idx) = h.of_degree(n, 2, 2);
        let mut got = Vec::new();
        let mut parts = Vec::new();
        for &i in idx.iter().take(expected.len()) {
            let c = h.reducible(&all[i], bound).len();
            got.push(c);
            parts.push(format!("{}={c}", all[i].label()));
        }
        got.sort();
        expected.sort();
        let row_ok = got == expected;
        ok &= row_ok;
        out.push(format!("{} N={n}: {} (expected {expected:?})", if row_ok { "ok " } else { "BAD" }, parts.join(" ")));
    }
    ok
}

const SMALL_DEGREE_LISTS: &[(u32, usize, u64, &[u64])] = &[
    (2, 2, 23, &[13, 19, 23, 29, 43, 109, 223, 229, 271, 463, 673, 677, 883, 991]),
    (2, 3, 41, &[17, 41]),
    (2, 4, 47, &[47]),
    (4, 2, 11, &[11]),
    (4, 3, 17, &[17]),
    (4, 4, 23, &[23]),
    (6, 2, 7, &[7]),
    (6, 3, 11, &[11]),
    (6, 4, 17, &[17]),
    (8, 2, 5, &[5]),
    (8, 3, 17, &[17]),
    (8, 4, 11, &[11]),
    (10, 2, 5, &[5]),
    (10, 3, 7, &[7]),
    (10, 4, 13, &[13]),
    (12, 2, 5, &[5]),
    (12, 3, 7, &[7]),
    (12, 4, 21, &[3, 7]),
];

const QUADRATIC_COUNTS: &[(u64, usize)] = &[
    (23, 47),
    (29, 42),
    (31, 78),
    (35, 48),
    (39, 71),
    (43, 43),
    (51, 64),
    (55, 95),
    (62, 77),
    (63, 622),
    (65, 43),
    (65, 90),
    (67, 51),
    (67, 19),
    (68, 53),
    (69, 47),
    (73, 43),
    (73, 55),
    (74, 52),
    (74, 21),
];

const CUBIC_QUARTIC_LISTS: &[(u32, usize, u64, &[u64])] = &[
    (2, 3, 41, &[17, 41]),
    (2, 3, 53, &[13, 53]),
    (2, 3, 61, &[61, 2087]),
    (2, 3, 71, &[23, 31, 71, 479, 647, 1013, 3181]),
    (2, 3, 71, &[13, 71, 509, 3613]),
    (2, 4, 47, &[47]),
    (2, 4, 95, &[5, 19]),
    (2, 4, 97, &[97]),
    (2, 4, 109, &[109, 4513]),
    (2, 4, 111, &[3, 37]),
];

const WEIGHT4_LEVEL27: &[u64] = &[
    3, 7, 13, 19, 31, 37, 43, 61, 67, 73, 79, 97, 103, 109, 127, 139, 151, 157, 163, 181, 193, 199, 211, 223, 229, 241,
    271, 277, 283, 307, 313, 331, 337, 349, 367, 373, 379, 397, 409, 421, 433, 439, 457, 463, 487, 499, 523, 541, 547,
    571, 577, 601, 607, 613, 619, 631, 643, 661, 673, 691, 709, 727, 733, 739, 751, 757, 769, 787, 811, 823, 829, 853,
    859, 877, 883, 907, 919, 937, 967, 991, 997,
];

const WEIGHT4_LISTS: &[(u32, usize, u64, &[u64])] = &[
    (4, 2, 11, &[11]),
    (4, 2, 13, &[13]),
    (4, 2, 21, &[3, 7]),
    (4, 2, 27, WEIGHT4_LEVEL27),
    (4, 2, 29, &[29]),
    (4, 3, 17, &[17]),
    (4, 3, 19, &[19]),
    (4, 3, 35, &[5, 7]),
    (4, 3, 39, &[3, 13]),
    (4, 3, 41, &[41]),
];

const LEVEL389_D2: &[u64] = &[
    5, 11, 59, 97, 157, 173, 223, 389, 653, 739, 859, 947, 1033, 1283, 1549, 1667, 2207, 2417, 2909, 3121, 4337, 5431,
    5647, 5689, 5879, 6151, 6323, 6373, 6607, 6763, 7583, 7589, 8363, 9013, 9371, 9767,
];

fn small_degree_lists(h: &mut Harness, out: &mut Lines) -> bool {
    list_rows(h, SMALL_DEGREE_LISTS, 1000, out)
}

fn quadratic_counts(h: &mut Harness, out: &mut Lines) -> bool {
    let mut ok = count_rows(h, QUADRATIC_COUNTS, 10_000, out);
    let (all, idx) = h.of_degree(63, 2, 2);
    let o = &all[idx[0]];
    let a = twists::analyze(o, &TwistOptions::default(), h.exec).unwrap();
    let twist_ok = a.discriminants() == vec![-3] && a.cm_discriminant.is_none();
    out.push(format!("{} N=63 inner twists {:?}", if twist_ok { "ok " } else { "BAD" }, a.discriminants()));
    ok &= twist_ok;
    ok
}

fn weight4_lists(h: &mut Harness, out: &mut Lines) -> bool {
    let mut ok = list_rows(h, WEIGHT4_LISTS, 1000, out);
    let (all, idx) = h.of_degree(27, 4, 2);
    let o = &all[idx[0]];
    let a = twists::analyze(o, &TwistOptions::default(), h.exec).unwrap();
    let twist_ok = !a.inner_twists.is_empty();
    out.push(format!(
        "{} N=27 k=4: cm {:?}, inner twists {:?}",
        if twist_ok { "ok " } else { "BAD" },
        a.cm_discriminant,
        a.discriminants()
    ));
    ok &= twist_ok;
    ok
}

fn level389(h: &mut Harness, out: &mut Lines) -> bool {
    let degrees: Vec<usize> = h.orbits(389, 2).iter().map(NewformOrbit::degree).collect();
    let mut ok = degrees == [1, 2, 3, 6, 20];
    out.push(format!("{} degrees {degrees:?}", if ok { "ok " } else { "BAD" }));
    ok &= list_rows(
        h,
        &[
            (2, 1, 389, &[]),
            (2, 2, 389, LEVEL389_D2),
            (2, 3, 389, &[7, 13, 389, 503, 1303, 1429, 1877, 5443]),
            (2, 6, 389, &[19, 389]),
            (2, 20, 389, &[389]),
        ],
        10_000,
        out,
    );
    ok
}

/// `x^2 + 2x + 1`, i.e. `a_67 = -1`.
fn is_67b(o: &NewformOrbit) -> bool {
    o.charpoly(67).unwrap() == IntPolynomial::from_i64(&[1, 2, 1])
}

fn long_counts(h: &mut Harness, out: &mut Lines) -> bool {
    let bound = 100_000;
    let s23 = h.orbits(23, 2);
    let a_count = h.reducible(&s23[0], bound).len();
    let (s67, idx) = h.of_degree(67, 2, 2);
    let Some(&b) = idx.iter().find(|&&i| is_67b(&s67[i])) else {
        out.push("no degree-2 orbit at 67 with a_67 = -1".into());
        return false;
    };
    let b_count = h.reducible(&s67[b], bound).len();
    out.push(format!("23a = {}: {a_count} reducible p < 10^5 (expected 127)", s23[0].label()));
    out.push(format!("67b = {}: {b_count} reducible p < 10^5 (expected 111)", s67[b].label()));
    out.push("the 10^6 column is not run here".into());
    a_count == 127 && b_count == 111
}

fn densities(h: &mut Harness, out: &mut Lines) -> bool {
    let opts = TwistOptions::default();
    let exec = h.exec;
    let half = Rational64::new(1, 2);
    let quarter = Rational64::new(1, 4);

    let (s63, idx) = h.of_degree(63, 2, 2);
    let o63 = &s63[idx[0]];
    let a63 = twists::analyze(o63, &opts, exec).unwrap();
    let d63 = twists::predict_densities(&a63);
    let rational = d63.iter().find(|e| e.field_degree == 1).map(|e| e.generation);
    let ok63 = rational == Some(half);
    let shown = rational.map_or("none".to_string(), |r| r.to_string());
    out.push(format!("{} N=63: density of a_p in Q = {shown}", if ok63 { "ok " } else { "BAD" }));

    let rows = twists::empirical_vs_predicted(o63, &a63, 10_000, exec).unwrap();
    let q_row = rows.iter().find(|r| r.field_degree == 1).unwrap();
    let gap_ok = q_row.observed_count == 622 && q_row.total == 1229 && q_row.gap < DENSITY_TOLERANCE;
    out.push(format!(
        "{} N=63 at 10^4: {}/{} = {:.4}, gap {:.4} < {DENSITY_TOLERANCE}",
        if gap_ok { "ok " } else { "BAD" },
        q_row.observed_count,
        q_row.total,
        q_row.observed,
        q_row.gap
    ));

    let (s512, idx) = h.of_degree(512, 2, 4);
    let o512 = &s512[idx[0]];
    let a512 = twists::analyze(o512, &opts, exec).unwrap();
    let d512 = twists::predict_densities(&a512);
    let gens: Vec<Rational64> = d512.iter().map(|e| e.generation).collect();
    let ok512 = a512.gamma_order == 4 && gens[0].is_zero() && gens[1..].iter().all(|g| *g == quarter);
    out.push(format!(
        "{} N=512 degree 4: Gamma order {}, generation densities {}",
        if ok512 { "ok " } else { "BAD" },
        a512.gamma_order,
        gens.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(", ")
    ));

    let s23 = h.orbits(23, 2);
    let o23 = &s23[0];
    let a23 = twists::analyze(o23, &opts, exec).unwrap();
    let d23 = twists::predict_densities(&a23);
    let ok23 = d23.len() == 1 && d23[0].generation == Rational64::from_integer(1);
    out.push(format!("{} N=23: no twists, generation density {}", if ok23 { "ok " } else { "BAD" }, d23[0].generation));
    ok63 && gap_ok && ok512 && ok23
}

fn gl2(h: &mut Harness, out: &mut Lines) -> bool {
    let mut ok = true;
    for q in [2u64, 3, 4, 5, 7, 8, 9] {
        let r = gl2lab::kind_report(&gl2lab::conjugacy_classes(q).unwrap());
        ok &= r.holds();
        out.push(format!(
            "{} q={q}: counts {:?} sizes {:?}",
            if r.holds() { "ok " } else { "BAD" },
            r.kind_counts,
            r.kind_sizes.map(|s| s.unwrap_or(0))
        ));
    }
    let grid = gl2lab::run_grid(16, h.exec).unwrap();
    let checked = grid.iter().filter(|(_, o)| matches!(o, GridOutcome::Checked { .. })).count();
    let failures: Vec<_> = grid.iter().filter(|(_, o)| !o.passes()).collect();
    let worst = grid
        .iter()
        .filter_map(|(_, o)| match o {
            GridOutcome::Checked { bound, .. } => Some(bound.max_ratio()),
            GridOutcome::NotNormal => None,
        })
        .fold(0.0, f64::max);
    out.push(format!(
        "{} grid q^r <= 16: {} points, {checked} checked, {} outside the normality hypothesis, max ratio {worst:.4}, coset checks {}",
        if failures.is_empty() { "ok " } else { "BAD" },
        grid.len(),
        grid.len() - checked,
        if failures.is_empty() { "pass" } else { "FAIL" }
    ));
    for (p, _) in failures.iter().take(5) {
        out.push(format!("    failed at {p:?}"));
    }
    ok && failures.is_empty()
}

fn factorization_products(out: &mut Lines) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let mut bad = 0;
    for _ in 0..500 {
        let mut expected: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
        let content: i64 = rng.gen_range(1..=6);
        let mut product = IntPolynomial::from_i64(&[content]);
        for _ in 0..rng.gen_range(1..=5) {
            let block = match rng.gen_range(0..3) {
                0 => vec![-rng.gen_range(-20i64..=20), 1],
                1 => vec![rng.gen_range(1i64..=30), 0, 1],
                _ => loop {
                    let c: i64 = rng.gen_range(2..=40);
                    if ![8, 27].contains(&c) {
                        break vec![-c, 0, 0, 1];
                    }
                },
            };
            product = &product * &IntPolynomial::from_i64(&block);
            *expected.entry(block).or_insert(0) += 1;
        }
        let f = factor(&product).unwrap();
        let got: BTreeMap<Vec<i64>, u32> = f
            .factors
            .iter()
            .map(|(g, e)| (g.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect(), *e))
            .collect();
        if f.expand() != product || got != expected || f.content != BigInt::from(content) {
            bad += 1;
        }
    }
    out.push(format!("{} factorization round trip: {bad}/500 mismatches", if bad == 0 { "ok " } else { "BAD" }));
    bad == 0
}

fn properties(h: &mut Harness, out: &mut Lines) -> bool {
    let mut ok = factorization_products(out);

    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let primes = primes_up_to(50);
    let mut commuting = 0;
    for i in 0..20 {
        let (n, k) = [(37u64, 2u32), (44, 2), (45, 2), (13, 4)][i % 4];
        let (p, q) = (primes[rng.gen_range(0..primes.len())], primes[rng.gen_range(0..primes.len())]);
        let s = ModSymSpace::build(n, k).unwrap();
        let a = s.hecke_matrix(s.cuspidal_basis(), p).unwrap().matrix;
        let b = s.hecke_matrix(s.cuspidal_basis(), q).unwrap().matrix;
        commuting += usize::from(a.mul(&b).unwrap() == b.mul(&a).unwrap());
    }
    out.push(format!("{} Hecke commutativity: {commuting}/20 random prime pairs", if commuting == 20 { "ok " } else { "BAD" }));
    ok &= commuting == 20;

    let mut dim_bad = Vec::new();
    for k in [2u32, 4, 6] {
        for n in 1..=100u64 {
            let s = ModSymSpace::build(n, k).unwrap();
            if s.cuspidal_dimension() as i64 != oracles::cusp_dimension(n, k as u64) {
                dim_bad.push((n, k));
            }
        }
    }
    out.push(format!("{} dimension formula N <= 100, k in 2,4,6: mismatches {dim_bad:?}", if dim_bad.is_empty() { "ok " } else { "BAD" }));
    ok &= dim_bad.is_empty();

    let mut trace_bad = Vec::new();
    for (n, k) in [(23u64, 2u32), (11, 2), (11, 4)] {
        let s = ModSymSpace::build(n, k).unwrap();
        for p in primes_up_to(30).into_iter().filter(|p| n % p != 0) {
            let t = s.hecke_matrix(s.cuspidal_basis(), p).unwrap().matrix;
            let tr = (0..t.nrows()).fold(BigRational::zero(), |acc, i| acc + t.get(i, i));
            if tr != BigRational::from_integer(oracles::hecke_trace(p, n, k as u64)) {
                trace_bad.push((n, k, p));
            }
        }
    }
    out.push(format!("{} trace formula at (23,2), (11,2), (11,4), p < 30: mismatches {trace_bad:?}", if trace_bad.is_empty() { "ok " } else { "BAD" }));
    ok &= trace_bad.is_empty();

    let resume_ok = resume_determinism(h, out);
    ok && resume_ok
}

fn resume_determinism(h: &Harness, out: &mut Lines) -> bool {
    let dir = tempfile::tempdir().unwrap();
    let ctx = |d: &std::path::Path| {
        Context::new(RunConfig { cache_dir: Some(d.to_path_buf()), exec: h.exec, ..RunConfig::default() }).unwrap()
    };
    let run = |d: &std::path::Path| {
        let r = commands::census(&ctx(d), 35, 2, &None, 3000).unwrap();
        report::census(&r, Default::default())
    };
    let reference = run(dir.path());
    let text = fs::read_to_string(dir.path().join("35-2.jsonl")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut same = 0;
    let cuts = [0, 1, 63, 64, 129, lines.len() / 2, lines.len()];
    for cut in cuts {
        let d = tempfile::tempdir().unwrap();
        let prefix: String = lines[..cut].iter().map(|l| format!("{l}\n")).collect();
        fs::write(d.path().join("35-2.jsonl"), prefix).unwrap();
        same += usize::from(run(d.path()) == reference);
    }
    let ok = same == cuts.len();
    out.push(format!("{} cache resume: {same}/{} interruption points reproduce the report", if ok { "ok " } else { "BAD" }, cuts.len()));
    ok
}

fn main() {
    let start = Instant::now();
    let mut h = Harness { spaces: HashMap::new(), exec: Execution::available(), failed: Vec::new() };
    h.criterion("1", "degree 2-4 orbits, weights 2-12: reducible p <= 1000", small_degree_lists);
    h.criterion("2", "weight 2 quadratic orbits: counts p <= 10^4, twist at 63", quadratic_counts);
    h.criterion("3", "degree 3 and 4 lists at 10^4", |h, out| list_rows(h, CUBIC_QUARTIC_LISTS, 10_000, out));
    h.criterion("4", "weight 4 lists at 1000, twist report at 27", weight4_lists);
    h.criterion("5", "level 389: degrees and lists at 10^4", level389);
    h.criterion("6", "(stretch) 23a and 67b counts at 10^5", long_counts);
    h.criterion("7", "density predictions and N=63 empirical gap", densities);
    h.criterion("8", "GL2: kinds, bound ratio, coset checks", gl2);
    h.criterion("9", "property suites", properties);
    println!("{} of 9 criteria passed in {:.1?}", 9 - h.failed.len(), start.elapsed());
    if !h.failed.is_empty() {
        println!("failed: {}", h.failed.join(", "));
        std::process::exit(1);
    }
}
