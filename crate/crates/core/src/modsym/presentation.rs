//! Quotient of the free module on Manin symbols by the two-term relations
//! (`x + xS = 0`, and `x = xI` for sign +1) and three-term relations
//! (`x + xT + xT^2 = 0`).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::manin::monomial_action;
use super::p1::P1List;

pub type SparseVec = Vec<(usize, BigRational)>;

#[derive(Clone, Debug)]
pub struct Presentation {
    /// Symbol index of each basis element.
    pub basis: Vec<usize>,
    /// Coordinates of every Manin symbol in the basis.
    pub reduction: Vec<SparseVec>,
    /// Two-term reduction: `symbol = sign * rep` (`sign = 0` if the symbol is zero).
    pub two_term: Vec<(usize, i8)>,
}

/// Signed union-find: `parent` relation `x = sign * parent`.
struct SignedUnionFind {
    parent: Vec<usize>,
    sign: Vec<i8>,
    zero: Vec<bool>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind { parent: (0..n).collect(), sign: vec![1; n], zero: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, i8) {
        let p = self.parent[x];
        if p == x {
            return (x, 1);
        }
        let (root, s) = self.find(p);
        self.parent[x] = root;
        self.sign[x] *= s;
        (root, self.sign[x])
    }

    /// Imposes `x = s * y`.
    fn union(&mut self, x: usize, y: usize, s: i8) {
        let (rx, sx) = self.find(x);
        let (ry, sy) = self.find(y);
        if rx == ry {
            if sx != s * sy {
                self.zero[rx] = true;
            }
            return;
        }
        // x = sx rx, y = sy ry, x = s y  =>  rx = sx * s * sy * ry
        let (child, root) = if rx < ry { (ry, rx) } else { (rx, ry) };
        self.parent[child] = root;
        self.sign[child] = sx * s * sy;
        if self.zero[child] {
            self.zero[root] = true;
        }
    }
}

pub fn present(p1: &P1List, weight: u32) -> Presentation {
    let w = (weight - 2) as usize;
    let n1 = p1.len();
    let count = (w + 1) * n1;
    let idx = |i: usize, c: i64, d: i64| -> usize { i * n1 + p1.index(c, d).expect("coprime pair") };

    let mut uf = SignedUnionFind::new(count);
    for s in 0..count {
        let (i, j) = (s / n1, s % n1);
        let (u, v) = p1.rep(j);
        let (u, v) = (u as i64, v as i64);
        let parity: i8 = if i % 2 == 0 { 1 } else { -1 };
        // x S = (-1)^i [X^(w-i) Y^i, (v, -u)] and x + xS = 0
        uf.union(s, idx(w - i, v, -u), -parity);
        // x I = (-1)^i [X^i Y^(w-i), (-u, v)] and x = xI
        uf.union(s, idx(i, -u, v), parity);
    }
    let mut two_term = Vec::with_capacity(count);
    for s in 0..count {
        let (r, sg) = uf.find(s);
        two_term.push(if uf.zero[r] { (r, 0) } else { (r, sg) });
    }
    let reps: Vec<usize> = (0..count).filter(|&s| uf.find(s).0 == s && !uf.zero[s]).collect();

    // Three-term relations expressed on representatives.
    let mut relations: Vec<BTreeMap<usize, BigInt>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let add_term = |rel: &mut BTreeMap<usize, BigInt>, sym: usize, coef: BigInt| {
        let (r, sg) = two_term[sym];
        if sg == 0 || coef.is_zero() {
            return;
        }
        let e = rel.entry(r).or_insert_with(BigInt::zero);
        *e += if sg > 0 { coef } else { -coef };
    };
    for s in 0..count {
        let (i, j) = (s / n1, s % n1);
        let (u, v) = p1.rep(j);
        let (u, v) = (u as i64, v as i64);
        let mut rel = BTreeMap::new();
        add_term(&mut rel, s, BigInt::one());
        // x T = [P(-Y, X - Y), (v, -u - v)]
        for (m, c) in monomial_action(i, w, 0, -1, 1, -1).into_iter().enumerate() {
            add_term(&mut rel, idx(m, v, -u - v), c);
        }
        // x T^2 = [P(-X + Y, -X), (-u - v, u)]
        for (m, c) in monomial_action(i, w, -1, 1, -1, 0).into_iter().enumerate() {
            add_term(&mut rel, idx(m, -u - v, u), c);
        }
        rel.retain(|_, c| !c.is_zero());
        if rel.is_empty() {
            continue;
        }
        let g = rel.values().fold(BigInt::zero(), |acc, c| num_integer::Integer::gcd(&acc, c));
        let lead_neg = rel.values().next_back().is_some_and(|c| c.is_negative());
        let normalized: Vec<(usize, BigInt)> = rel
            .into_iter()
            .map(|(k, c)| (k, if lead_neg { -(c / &g) } else { c / &g }))
            .collect();
        if seen.insert(normalized.clone()) {
            relations.push(normalized.into_iter().collect());
        }
    }

    // Fully reduced elimination; the pivot of each relation is its largest
    // representative so that small indices tend to survive as the basis.
    let mut pivots: HashMap<usize, BTreeMap<usize, BigRational>> = HashMap::new();
    let mut occurs: HashMap<usize, Vec<usize>> = HashMap::new();
    for rel in relations {
        let mut row: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (k, c) in rel {
            let c = BigRational::from_integer(c);
            match pivots.get(&k) {
                Some(expr) => {
                    for (t, x) in expr {
                        *row.entry(*t).or_insert_with(BigRational::zero) += &c * x;
                    }
                }
                None => *row.entry(k).or_insert_with(BigRational::zero) += c,
            }
        }
        row.retain(|_, c| !c.is_zero());
        let Some((&pv, cv)) = row.iter().next_back() else {
            continue;
        };
        let inv = -cv.recip();
        let expr: BTreeMap<usize, BigRational> =
            row.iter().filter(|(&t, _)| t != pv).map(|(&t, x)| (t, x * &inv)).collect();
        // Substitute pv in existing pivot expressions.
        if let Some(users) = occurs.remove(&pv) {
            for user in users {
                let Some(e) = pivots.get_mut(&user) else { continue };
                let Some(c) = e.remove(&pv) else { continue };
                for (t, x) in &expr {
                    let entry = e.entry(*t).or_insert_with(BigRational::zero);
                    *entry += &c * x;
                    if entry.is_zero() {
                        e.remove(t);
                    } else {
                        occurs.entry(*t).or_default().push(user);
                    }
                }
            }
        }
        for t in expr.keys() {
            occurs.entry(*t).or_default().push(pv);
        }
        pivots.insert(pv, expr);
    }

    let basis: Vec<usize> = reps.iter().copied().filter(|r| !pivots.contains_key(r)).collect();
    let position: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let rep_coords = |r: usize| -> SparseVec {
        match pivots.get(&r) {
            Some(expr) => expr.iter().map(|(t, x)| (position[t], x.clone())).collect(),
            None => vec![(position[&r], BigRational::one())],
        }
    };
    let mut cache: HashMap<usize, SparseVec> = HashMap::new();
    let reduction = (0..count)
        .map(|s| {
            let (r, sg) = two_term[s];
            if sg == 0 {
                return Vec::new();
            }
            let v = cache.entry(r).or_insert_with(|| rep_coords(r)).clone();
            if sg > 0 {
                v
            } else {
                v.into_iter().map(|(t, x)| (t, -x)).collect()
            }
        })
        .collect();
    Presentation { basis, reduction, two_term }
}
