//! Cusps of `Gamma_0(N)` and the boundary map on Manin symbols.

use num_integer::Integer;

use crate::arith::{ext_gcd, inv_mod};

/// A cusp `a/c` in lowest terms with `c >= 0` (`1/0` is infinity).
pub type Cusp = (i64, i64);

pub fn normalize_cusp(a: i64, c: i64) -> Cusp {
    if c == 0 {
        return (1, 0);
    }
    let g = a.gcd(&c);
    let (a, c) = (a / g, c / g);
    if c < 0 {
        (-a, -c)
    } else {
        (a, c)
    }
}

/// Cremona's criterion: `a1/c1 ~ a2/c2` iff `s1 c2 = s2 c1 mod gcd(c1 c2, N)`
/// where `a_j s_j = 1 mod c_j`.
pub fn cusps_equivalent(x: Cusp, y: Cusp, n: i64) -> bool {
    let (a1, c1) = x;
    let (a2, c2) = y;
    let s = |a: i64, c: i64| if c <= 1 { 1 } else { inv_mod(a, c).expect("lowest terms") };
    let (s1, s2) = (s(a1, c1), s(a2, c2));
    let m = (c1 * c2).gcd(&n);
    (s1 * c2 - s2 * c1).rem_euclid(m) == 0
}

/// Cusp classes, optionally identifying `x` with `-x` (sign +1 quotient).
#[derive(Clone, Debug)]
pub struct CuspList {
    n: i64,
    plus: bool,
    reps: Vec<Cusp>,
}

impl CuspList {
    pub fn new(n: u64, plus: bool) -> Self {
        CuspList { n: n as i64, plus, reps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn reps(&self) -> &[Cusp] {
        &self.reps
    }

    /// Index of the class of `a/c`, registering a new class if needed.
    pub fn index(&mut self, a: i64, c: i64) -> usize {
        let x = normalize_cusp(a, c);
        let neg = normalize_cusp(-x.0, x.1);
        for (i, &r) in self.reps.iter().enumerate() {
            if cusps_equivalent(x, r, self.n) || (self.plus && cusps_equivalent(neg, r, self.n)) {
                return i;
            }
        }
        self.reps.push(x);
        self.reps.len() - 1
    }
}

/// An `SL_2(Z)` matrix `[[a, b], [c, d]]` whose bottom row reduces to `(u, v)`
/// modulo `N`.
pub fn lift_to_sl2(u: i64, v: i64, n: i64) -> [i64; 4] {
    let mut c = u.rem_euclid(n);
    let mut d = v.rem_euclid(n);
    if n == 1 {
        return [1, 0, 0, 1];
    }
    if c == 0 {
        c = n;
    }
    while c.gcd(&d) != 1 {
        d += n;
    }
    if d == 0 {
        d = n;
    }
    // a d - b c = 1
    let (g, x, y) = ext_gcd(d, c);
    debug_assert_eq!(g, 1);
    let (a, b) = (x, -y);
    debug_assert_eq!(a * d - b * c, 1);
    [a, b, c, d]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_counts() {
        // Number of cusps of X_0(N) is sum over d | N of phi(gcd(d, N/d)).
        for n in 1..80u64 {
            let expected: u64 = crate::arith::divisors(n)
                .into_iter()
                .map(|d| crate::arith::euler_phi(d.gcd(&(n / d))))
                .sum();
            let mut list = CuspList::new(n, false);
            for c in 0..=(n as i64) {
                for a in -(n as i64)..=(n as i64) {
                    if a.gcd(&c) == 1 {
                        list.index(a, c);
                    }
                }
            }
            assert_eq!(list.len() as u64, expected, "N = {n}");
        }
    }

    #[test]
    fn lifts_have_unit_determinant() {
        for n in [1i64, 2, 11, 12, 30] {
            for u in 0..n {
                for v in 0..n {
                    if u.gcd(&v).gcd(&n) != 1 {
                        continue;
                    }
                    let [a, b, c, d] = lift_to_sl2(u, v, n);
                    assert_eq!(a * d - b * c, 1);
                    assert_eq!((c - u).rem_euclid(n), 0);
                    assert_eq!((d - v).rem_euclid(n), 0);
                }
            }
        }
    }
}
