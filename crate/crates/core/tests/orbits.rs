use std::sync::Arc;

use apgen_core::algebra::IntPolynomial;
use apgen_core::arith::primes_up_to;
use apgen_core::modsym::ModSymSpace;
use apgen_core::orbits::{decompose, NewformOrbit};
use apgen_core::par::Execution;

fn orbits(n: u64, k: u32) -> Vec<NewformOrbit> {
    decompose(&Arc::new(ModSymSpace::build(n, k).unwrap())).unwrap()
}

#[test]
fn level_23() {
    let o = orbits(23, 2);
    assert_eq!(o.len(), 1);
    assert_eq!(o[0].degree(), 2);
    assert_eq!(o[0].label(), "23.2.1");
    assert_eq!(o[0].charpoly(2).unwrap(), IntPolynomial::from_i64(&[-1, 1, 1]));
    let r = o[0].reducible_primes(1000, Execution::Parallel).unwrap();
    assert_eq!(r.primes, vec![13, 19, 23, 29, 43, 109, 223, 229, 271, 463, 673, 677, 883, 991]);
}

#[test]
fn engine_matches_exact_restriction() {
    for (n, k) in [(23u64, 2u32), (63, 2), (41, 2), (11, 4), (27, 4), (21, 12), (512, 2)] {
        let t = std::time::Instant::now();
        for o in orbits(n, k) {
            for p in primes_up_to(60) {
                assert_eq!(o.charpoly(p).unwrap(), o.exact_charpoly(p).unwrap(), "{} p = {p}", o.label());
            }
            eprintln!("{} degree {} witness {}", o.label(), o.degree(), o.witness());
        }
        eprintln!("({n},{k}) {:?}", t.elapsed());
    }
}

#[test]
fn level_389_degrees() {
    let t = std::time::Instant::now();
    let o = orbits(389, 2);
    let degrees: Vec<usize> = o.iter().map(|x| x.degree()).collect();
    assert_eq!(degrees, vec![1, 2, 3, 6, 20]);
    eprintln!("decompose 389 {:?}", t.elapsed());
    let r = o[4].reducible_primes(10000, Execution::Parallel).unwrap();
    eprintln!("389 deg 20 census {:?}", t.elapsed());
    assert_eq!(r.primes, vec![389]);
}
