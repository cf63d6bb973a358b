//! The projective line over `Z/NZ`, indexing right cosets of `Gamma_0(N)`.

use num_integer::Integer;

const NONE: u32 = u32::MAX;

/// Points `(c : d)` of `P^1(Z/NZ)`, each represented by the lexicographically
/// smallest pair in its orbit under `(Z/NZ)^x` scaling.
#[derive(Clone, Debug)]
pub struct P1List {
    n: u64,
    reps: Vec<(u64, u64)>,
    /// `table[c * n + d]` is the class of `(c, d)`, or `NONE` when
    /// `gcd(c, d, N) > 1`.
    table: Vec<u32>,
}

impl P1List {
    pub fn new(n: u64) -> Self {
        assert!(n >= 1);
        if n == 1 {
            return P1List { n, reps: vec![(0, 0)], table: vec![0] };
        }
        let units: Vec<u64> = (1..n).filter(|&l| l.gcd(&n) == 1).collect();
        let size = (n * n) as usize;
        let mut table = vec![NONE; size];
        let mut reps = Vec::new();
        for c in 0..n {
            for d in 0..n {
                let idx = (c * n + d) as usize;
                if table[idx] != NONE || c.gcd(&d).gcd(&n) != 1 {
                    continue;
                }
                let class = reps.len() as u32;
                reps.push((c, d));
                for &l in &units {
                    table[((l * c % n) * n + l * d % n) as usize] = class;
                }
            }
        }
        P1List { n, reps, table }
    }

    pub fn level(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn rep(&self, i: usize) -> (u64, u64) {
        self.reps[i]
    }

    /// Class of `(c : d)` for arbitrary integers, `None` if not a point.
    #[inline]
    pub fn index(&self, c: i64, d: i64) -> Option<usize> {
        let n = self.n as i64;
        let c = c.rem_euclid(n) as usize;
        let d = d.rem_euclid(n) as usize;
        let v = self.table[c * self.n as usize + d];
        (v != NONE).then_some(v as usize)
    }

    /// Like [`index`](Self::index) for already reduced residues.
    #[inline]
    pub fn index_reduced(&self, c: u64, d: u64) -> Option<usize> {
        let v = self.table[(c * self.n + d) as usize];
        (v != NONE).then_some(v as usize)
    }
}

/// `|P^1(Z/NZ)| = N prod_{p | N} (1 + 1/p)`.
pub fn p1_size(n: u64) -> u64 {
    crate::arith::prime_divisors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p + 1))
}
