//! Heilbronn matrices of determinant `p`: Cremona's continued-fraction
//! family (used for Hecke operators) and Merel's family (used as an
//! independent cross-check).

use crate::arith::round_div;

/// Calls `f(a, b, c, d)` for each matrix in Cremona's Heilbronn set of
/// determinant `p` (prime).
pub fn for_each_cremona(p: i64, mut f: impl FnMut(i64, i64, i64, i64)) {
    if p == 2 {
        f(1, 0, 0, 2);
        f(2, 0, 0, 1);
        f(2, 1, 0, 1);
        f(1, 0, 1, 2);
        return;
    }
    f(1, 0, 0, p);
    let half = (p - 1) / 2;
    for r in -half..=half {
        let (mut x1, mut x2, mut y1, mut y2) = (p, -r, 0i64, 1i64);
        let (mut a, mut b) = (-p, r);
        f(x1, x2, y1, y2);
        while b != 0 {
            let q = round_div(a, b);
            let c = a - b * q;
            a = -b;
            b = c;
            let x3 = q * x2 - x1;
            x1 = x2;
            x2 = x3;
            let y3 = q * y2 - y1;
            y1 = y2;
            y2 = y3;
            f(x1, x2, y1, y2);
        }
    }
}

pub fn cremona(p: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for_each_cremona(p, |a, b, c, d| out.push([a, b, c, d]));
    out
}

/// Merel's set: `ad - bc = n`, `a > b >= 0`, `d > c >= 0`.
pub fn merel(n: i64) -> Vec<[i64; 4]> {
    let mut out = Vec::new();
    for a in 1..=n {
        for d in 1..=n {
            if a * d < n {
                continue;
            }
            // bc = ad - n with 0 <= b < a, 0 <= c < d
            let bc = a * d - n;
            if bc == 0 {
                for b in 0..a {
                    if b == 0 {
                        for c in 0..d {
                            out.push([a, b, c, d]);
                        }
                    } else {
                        out.push([a, b, 0, d]);
                    }
                }
                continue;
            }
            for b in 1..a {
                if bc % b == 0 {
                    let c = bc / b;
                    if c < d {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        for p in [2, 3, 5, 7, 11, 101] {
            for [a, b, c, d] in cremona(p) {
                assert_eq!(a * d - b * c, p, "p = {p}");
            }
            for [a, b, c, d] in merel(p) {
                assert_eq!(a * d - b * c, p);
            }
        }
    }

    #[test]
    fn merel_set_for_two() {
        let mut m = merel(2);
        m.sort();
        assert_eq!(m, vec![[1, 0, 0, 2], [1, 0, 1, 2], [2, 0, 0, 1], [2, 1, 0, 1]]);
    }
}
