use std::collections::BTreeMap;
use std::sync::Arc;

use apgen_core::algebra::{factor, integer_charpoly, roots_bounded_by, BigRationalMatrix, IntPolynomial};
use apgen_core::arith::{gcd_i64, is_fundamental_discriminant, kronecker, primes_up_to};
use apgen_core::dirichlet::{kronecker_character, quadratic_characters};
use apgen_core::modsym::ModSymSpace;
use apgen_core::orbits::{decompose, decompose_with, DecomposeOptions, NewformOrbit};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Irreducible building blocks with known factorizations:
/// `X - a`, `X^2 + b` (b > 0) and `X^3 - c` (c not a cube).
fn block() -> impl Strategy<Value = Vec<i64>> {
    prop_oneof![
        (-20i64..=20).prop_map(|a| vec![-a, 1]),
        (1i64..=30).prop_map(|b| vec![b, 0, 1]),
        (2i64..=40).prop_filter("cube", |c| (1..=4).all(|r| r * r * r != *c)).prop_map(|c| vec![-c, 0, 0, 1]),
    ]
}

fn mat(rows: &[Vec<i64>]) -> BigRationalMatrix {
    BigRationalMatrix::from_i64(rows)
}

fn square_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-9i64..=9, n), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn factorization_round_trip(blocks in prop::collection::vec(block(), 1..=5), content in 1i64..=6) {
        let mut expected: BTreeMap<Vec<i64>, u32> = BTreeMap::new();
        let mut product = IntPolynomial::from_i64(&[content]);
        for b in &blocks {
            *expected.entry(b.clone()).or_insert(0) += 1;
            product = &product * &IntPolynomial::from_i64(b);
        }
        let f = factor(&product).unwrap();
        prop_assert_eq!(f.expand(), product);
        prop_assert_eq!(f.content, BigInt::from(content));
        let got: BTreeMap<Vec<i64>, u32> = f
            .factors
            .iter()
            .map(|(g, e)| (g.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect(), *e))
            .collect();
        prop_assert_eq!(got, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cayley_hamilton(rows in square_matrix()) {
        let m = mat(&rows);
        let chi = m.charpoly().unwrap();
        prop_assert!(m.eval_poly(chi.coeffs()).unwrap().is_zero());
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        prop_assert_eq!(Some(integer_charpoly(&big)), chi.to_integral());
        // trace
        let n = rows.len();
        let tr: i64 = (0..n).map(|i| rows[i][i]).sum();
        prop_assert_eq!(chi.coeffs()[n - 1].clone(), BigRational::from_integer((-tr).into()));
    }

    #[test]
    fn kronecker_characters_agree(d in -200i64..=200, a in 1i64..=500, b in 1i64..=500) {
        prop_assume!(d != 1 && is_fundamental_discriminant(d));
        let chi = kronecker_character(d);
        prop_assert_eq!(chi.conductor(), d.unsigned_abs());
        prop_assert_eq!(chi.quadratic_discriminant(), Some(d));
        prop_assert_eq!(chi.is_odd(), d < 0);
        let expect = if gcd_i64(a, d) == 1 { kronecker(d, a as u64) } else { 0 };
        prop_assert_eq!(chi.eval_quadratic(a), expect);
        prop_assert_eq!(chi.eval_quadratic(a * b), chi.eval_quadratic(a) * chi.eval_quadratic(b));
    }

    #[test]
    fn quadratic_character_group(m in 1u64..=400) {
        let chars = quadratic_characters(m);
        prop_assert!(chars.len().is_power_of_two());
        prop_assert!(chars[0].is_trivial());
        for c in &chars {
            prop_assert_eq!(m % c.conductor(), 0);
            prop_assert_eq!(c.primitive().modulus(), c.conductor());
            for a in 1..m.min(60) as i64 {
                prop_assert_eq!(c.eval_quadratic(a), c.primitive().eval_quadratic(a) * i32::from(gcd_i64(a, m as i64) == 1));
            }
        }
    }
}

fn orbits(n: u64, k: u32) -> Vec<NewformOrbit> {
    decompose(&Arc::new(ModSymSpace::build(n, k).unwrap())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn hecke_commutes_on_random_primes(i in 0usize..15, j in 0usize..15, level in prop::sample::select(vec![(37u64, 2u32), (44, 2), (13, 4), (45, 2)])) {
        let primes = primes_up_to(50);
        let (p, q) = (primes[i], primes[j]);
        let space = ModSymSpace::build(level.0, level.1).unwrap();
        let a = space.hecke_matrix(space.cuspidal_basis(), p).unwrap().matrix;
        let b = space.hecke_matrix(space.cuspidal_basis(), q).unwrap().matrix;
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }
}

/// `b^2 - 4c` of a quadratic charpoly lies in `D * Z^2` for the field
/// discriminant `D`.
#[test]
fn quadratic_fields_from_discriminants() {
    for (n, d) in [(23u64, 5i64), (29, 2), (31, 5), (67, 5)] {
        let orbit = orbits(n, 2).into_iter().find(|o| o.degree() == 2).unwrap();
        for p in primes_up_to(300).into_iter().filter(|p| n % p != 0) {
            let f = orbit.charpoly(p).unwrap();
            let disc: BigInt = f.coeff(1).pow(2u32) - BigInt::from(4) * f.coeff(0);
            if disc.is_zero() {
                continue;
            }
            let (quo, rem) = (&disc / d, &disc % d);
            assert!(rem.is_zero() && !quo.is_negative(), "N={n} p={p} disc={disc}");
            let s = quo.sqrt();
            assert_eq!(&s * &s, quo, "N={n} p={p}");
        }
    }
}

#[test]
fn decomposition_independent_of_prime_order() {
    for (n, k) in [(67u64, 2u32), (88, 2), (125, 2), (23, 4)] {
        let space = Arc::new(ModSymSpace::build(n, k).unwrap());
        let a = decompose(&space).unwrap();
        let mut reversed: Vec<u64> = primes_up_to(100).into_iter().filter(|p| n % p != 0).collect();
        reversed.reverse();
        let b = decompose_with(&space, &DecomposeOptions { prime_limit: None, splitting_primes: Some(reversed) }).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.label(), y.label());
            for p in primes_up_to(40) {
                assert_eq!(x.charpoly(p).unwrap(), y.charpoly(p).unwrap(), "{} p={p}", x.label());
            }
        }
    }
}

/// Roots of the `T_p` charpoly lie in `|z| <= 2 p^((k-1)/2)`.
#[test]
fn ramanujan_bound() {
    for (n, k) in [(23u64, 2u32), (37, 2), (11, 4), (13, 6), (63, 2)] {
        for o in orbits(n, k) {
            for p in primes_up_to(200).into_iter().filter(|p| n % p != 0) {
                let r_sq = BigInt::from(4) * BigInt::from(p).pow(k - 1);
                assert!(roots_bounded_by(&o.charpoly(p).unwrap(), &r_sq), "{} p={p}", o.label());
            }
        }
    }
}
