#[path = "support/oracles.rs"]
mod oracles;

use apgen_core::algebra::BigRationalMatrix;
use apgen_core::modsym::heilbronn::{cremona, merel};
use apgen_core::modsym::{ModSymError, ModSymSpace};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn trace(m: &BigRationalMatrix) -> BigRational {
    (0..m.nrows()).fold(BigRational::zero(), |acc, i| acc + m.get(i, i))
}

#[test]
fn cuspidal_dimensions_match_formula() {
    for k in [2u32, 4, 6] {
        for n in 1..=100u64 {
            let space = ModSymSpace::build(n, k).unwrap();
            assert_eq!(
                space.cuspidal_dimension() as i64,
                oracles::cusp_dimension(n, k as u64),
                "N = {n}, k = {k}"
            );
        }
    }
}

#[test]
fn new_dimensions_match_formula() {
    for k in [2u32, 4, 6] {
        let top = if k == 2 { 100 } else { 60 };
        for n in 1..=top {
            let space = ModSymSpace::build(n, k).unwrap();
            assert_eq!(
                space.new_subspace().len() as i64,
                oracles::new_dimension(n, k as u64),
                "N = {n}, k = {k}"
            );
        }
    }
}

#[test]
fn hecke_traces_match_trace_formula() {
    for (n, k) in [(11u64, 2u32), (23, 2), (37, 2), (11, 4), (13, 4), (27, 4), (7, 6), (30, 2), (64, 2), (5, 12)] {
        let space = ModSymSpace::build(n, k).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13, 17] {
            if n % p == 0 {
                continue;
            }
            let t = space.hecke_matrix(space.cuspidal_basis(), p).unwrap();
            let expected = BigRational::from_integer(oracles::hecke_trace(p, n, k as u64));
            assert_eq!(trace(&t.matrix), expected, "N = {n}, k = {k}, p = {p}");
        }
    }
}

#[test]
fn known_characteristic_polynomials() {
    let cases = [
        (23u64, 2u32, 2u64, "x^2 + x - 1"),
        (11, 2, 2, "x + 2"),
        (11, 4, 2, "x^2 - 2*x - 2"),
        (389, 2, 2, ""),
    ];
    for (n, k, p, expected) in cases {
        let space = ModSymSpace::build(n, k).unwrap();
        if n == 389 {
            assert_eq!(space.new_subspace().len(), 32);
            continue;
        }
        let t = space.hecke_matrix(space.new_subspace(), p).unwrap();
        assert_eq!(t.matrix.charpoly().unwrap().to_string(), expected, "N = {n}, k = {k}");
    }
}

#[test]
fn hecke_operators_commute() {
    for (n, k) in [(37u64, 2u32), (33, 2), (13, 4)] {
        let space = ModSymSpace::build(n, k).unwrap();
        let ops: Vec<_> = [2u64, 3, 5, 7]
            .iter()
            .map(|&p| space.full_hecke_matrix(p).unwrap())
            .collect();
        for a in &ops {
            for b in &ops {
                assert_eq!(a.mul(b).unwrap().to_rows(), b.mul(a).unwrap().to_rows());
            }
        }
    }
}

#[test]
fn merel_and_cremona_sets_agree() {
    // Both Heilbronn families give the same T_p on weight-2 Manin symbols.
    let space = ModSymSpace::build(37, 2).unwrap();
    for p in [2i64, 3, 5, 7] {
        for &s in space.basis_symbols() {
            let (_, (u, v)) = space.symbol(s);
            let apply = |mats: Vec<[i64; 4]>| {
                let mut combo = std::collections::BTreeMap::new();
                for [a, b, c, d] in mats {
                    let (u, v) = (u as i64, v as i64);
                    if let Some(t) = space.symbol_index(0, u * a + v * c, u * b + v * d) {
                        *combo.entry(t).or_insert_with(BigInt::zero) += 1;
                    }
                }
                space.reduce_combination(&combo)
            };
            assert_eq!(apply(cremona(p)), apply(merel(p)), "p = {p}");
        }
    }
}

#[test]
fn domain_errors() {
    assert_eq!(ModSymSpace::build(11, 3).unwrap_err(), ModSymError::OddWeight(3));
    assert_eq!(ModSymSpace::build(11, 0).unwrap_err(), ModSymError::WeightTooSmall(0));
    let space = ModSymSpace::build(11, 2).unwrap();
    assert_eq!(space.full_hecke_matrix(4).unwrap_err(), ModSymError::CompositeIndex(4));
}

