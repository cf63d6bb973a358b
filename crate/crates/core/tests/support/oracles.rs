//! Independent closed formulas used to check the modular-symbol engine:
//! dimensions of `S_k(Gamma_0(N))`, new-subspace dimensions, and traces of
//! Hecke operators via the Eichler-Selberg trace formula.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn phi(n: u64) -> u64 {
    factor(n).iter().fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Index of `Gamma_0(N)` in `SL_2(Z)`.
pub fn psi(n: u64) -> u64 {
    factor(n).iter().fold(n, |acc, &(p, _)| acc / p * (p + 1))
}

fn legendre_like(d: i64, p: u64) -> i64 {
    // Number of solutions of x^2 = d mod p, minus one.
    let p = p as i64;
    let count = (0..p).filter(|x| (x * x - d).rem_euclid(p) == 0).count() as i64;
    count - 1
}

fn nu2(n: u64) -> u64 {
    if n.is_multiple_of(4) {
        return 0;
    }
    factor(n).iter().map(|&(p, _)| if p == 2 { 1 } else { (1 + legendre_like(-1, p)) as u64 }).product()
}

fn nu3(n: u64) -> u64 {
    if n.is_multiple_of(9) {
        return 0;
    }
    factor(n).iter().map(|&(p, _)| match p {
            2 => 0,
            3 => 1,
            _ => (1 + legendre_like(-3, p)) as u64,
        }).product()
}

fn cusp_count(n: u64) -> u64 {
    divisors(n).into_iter().map(|d| phi(gcd(d, n / d))).sum()
}

/// `dim S_k(Gamma_0(N))` for even `k >= 2`.
pub fn cusp_dimension(n: u64, k: u64) -> i64 {
    let mu = psi(n) as i64;
    let (e2, e3, c) = (nu2(n) as i64, nu3(n) as i64, cusp_count(n) as i64);
    // 12 (g - 1) = mu - 3 e2 - 4 e3 - 6 c
    let twelve_g_minus_1 = mu - 3 * e2 - 4 * e3 - 6 * c;
    let k = k as i64;
    if k == 2 {
        return twelve_g_minus_1 / 12 + 1;
    }
    (k - 1) * twelve_g_minus_1 / 12 + (k / 4) * e2 + (k / 3) * e3 + (k / 2 - 1) * c
}

/// `dim S_k^new(Gamma_0(N))` by Moebius-type inversion over divisors.
pub fn new_dimension(n: u64, k: u64) -> i64 {
    let beta = |m: u64| -> i64 {
        factor(m)
            .iter()
            .map(|&(_, e)| match e {
                1 => -2,
                2 => 1,
                _ => 0,
            })
            .product()
    };
    divisors(n).into_iter().map(|m| beta(n / m) * cusp_dimension(m, k)).sum()
}

/// Class number of primitive forms of discriminant `d < 0`, weighted by
/// `2 / |Aut|` (so `-3` counts `1/3` and `-4` counts `1/2`).
fn weighted_class_number(d: i64) -> BigRational {
    let mut count = BigRational::zero();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a as u64, b.unsigned_abs()), c as u64) != 1 {
                continue;
            }
            let w = if a == b && b == c {
                BigRational::new(1.into(), 3.into())
            } else if a == c && b == 0 {
                BigRational::new(1.into(), 2.into())
            } else {
                BigRational::one()
            };
            count += w;
        }
        a += 1;
    }
    count
}

/// Trace of `T_n` on `S_k(Gamma_0(N))` for `gcd(n, N) = 1`.
pub fn hecke_trace(n: u64, big_n: u64, k: u64) -> BigInt {
    assert_eq!(gcd(n, big_n), 1);
    let ni = n as i64;
    let mut total = BigRational::zero();
    let r = (n as f64).sqrt().round() as u64;
    if r * r == n {
        total += BigRational::new(
            BigInt::from(r).pow((k - 2) as u32) * BigInt::from(k - 1) * BigInt::from(psi(big_n)),
            BigInt::from(12),
        );
    }
    // Elliptic terms.
    let mut t = 0i64;
    while t * t < 4 * ni {
        for t in if t == 0 { vec![0] } else { vec![t, -t] } {
            let disc = t * t - 4 * ni;
            // (rho^(k-1) - rhobar^(k-1)) / (rho - rhobar)
            let (mut u0, mut u1) = (BigInt::zero(), BigInt::one());
            for _ in 1..(k - 1) {
                let next = BigInt::from(t) * &u1 - BigInt::from(ni) * &u0;
                u0 = u1;
                u1 = next;
            }
            let mut inner = BigRational::zero();
            let mut f = 1i64;
            while f * f <= -disc {
                if disc % (f * f) == 0 {
                    let d = disc / (f * f);
                    if d.rem_euclid(4) == 0 || d.rem_euclid(4) == 1 {
                        let nf = gcd(big_n, f as u64);
                        let modulus = (big_n * nf) as i64;
                        let sols = (0..big_n as i64)
                            .filter(|x| (x * x - t * x + ni).rem_euclid(modulus) == 0)
                            .count() as u64;
                        let mu = BigRational::new(
                            BigInt::from(psi(big_n) * sols),
                            BigInt::from(psi(big_n / nf)),
                        );
                        inner += weighted_class_number(d) * mu;
                    }
                }
                f += 1;
            }
            total -= BigRational::from_integer(u1) * inner / BigRational::from_integer(2.into());
        }
        t += 1;
    }
    // Hyperbolic terms.
    for d in divisors(n) {
        let m = d.min(n / d);
        let diff = (n / d) as i64 - d as i64;
        let mut s = 0u64;
        for tau in divisors(big_n) {
            let g = gcd(tau, big_n / tau);
            if diff.rem_euclid(g as i64) == 0 {
                s += phi(g);
            }
        }
        total -= BigRational::new(BigInt::from(m).pow((k - 1) as u32) * BigInt::from(s), BigInt::from(2));
    }
    if k == 2 {
        let sigma: u64 = divisors(n).into_iter().filter(|&t| gcd(big_n, n / t) == 1).sum();
        total += BigRational::from_integer(BigInt::from(sigma));
    }
    assert!(total.is_integer(), "trace formula produced {total}");
    total.to_integer()
}
