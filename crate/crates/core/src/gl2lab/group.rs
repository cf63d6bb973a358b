//! 2x2 matrices over a small `F_Q` and finite matrix groups stored as
//! explicit element sets.

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

use super::field::Fq;

/// Row-major `[[a, b], [c, d]]` with entries encoded as in [`Fq`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mat(pub [u8; 4]);

impl Mat {
    pub fn scalar(s: u8) -> Mat {
        Mat([s, 0, 0, s])
    }

    pub fn identity() -> Mat {
        Mat::scalar(1)
    }

    /// Index into a table of size `Q^4`.
    #[inline]
    pub fn key(self, q: usize) -> usize {
        let [a, b, c, d] = self.0;
        a as usize + q * (b as usize + q * (c as usize + q * d as usize))
    }

    pub fn from_key(key: usize, q: usize) -> Mat {
        let (a, r) = (key % q, key / q);
        let (b, r) = (r % q, r / q);
        let (c, d) = (r % q, r / q);
        Mat([a as u8, b as u8, c as u8, d as u8])
    }

    pub fn is_scalar(self) -> bool {
        let [a, b, c, d] = self.0;
        b == 0 && c == 0 && a == d
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl Fq {
    pub fn mat_mul(&self, x: Mat, y: Mat) -> Mat {
        let [a, b, c, d] = x.0;
        let [e, f, g, h] = y.0;
        Mat([
            self.add(self.mul(a, e), self.mul(b, g)),
            self.add(self.mul(a, f), self.mul(b, h)),
            self.add(self.mul(c, e), self.mul(d, g)),
            self.add(self.mul(c, f), self.mul(d, h)),
        ])
    }

    pub fn det(&self, x: Mat) -> u8 {
        let [a, b, c, d] = x.0;
        self.sub(self.mul(a, d), self.mul(b, c))
    }

    pub fn trace(&self, x: Mat) -> u8 {
        self.add(x.0[0], x.0[3])
    }

    /// Inverse of an invertible matrix.
    pub fn mat_inv(&self, x: Mat) -> Mat {
        let [a, b, c, d] = x.0;
        let t = self.inv(self.det(x));
        Mat([self.mul(d, t), self.neg(self.mul(b, t)), self.neg(self.mul(c, t)), self.mul(a, t)])
    }

    pub fn scale(&self, x: Mat, s: u8) -> Mat {
        Mat(x.0.map(|e| self.mul(e, s)))
    }
}

/// A finite subgroup of `GL_2(F_Q)` with its generators and a membership table.
#[derive(Clone)]
pub struct Group {
    field: Arc<Fq>,
    gens: Vec<Mat>,
    elements: Vec<Mat>,
    member: Vec<bool>,
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Group").field("order", &self.elements.len()).field("gens", &self.gens).finish()
    }
}

impl Group {
    /// The group generated by `gens` (all invertible).
    pub fn generate(field: Arc<Fq>, gens: Vec<Mat>) -> Group {
        let q = field.order() as usize;
        let mut member = vec![false; q.pow(4)];
        let id = Mat::identity();
        member[id.key(q)] = true;
        let mut elements = vec![id];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for &g in &gens {
                let y = field.mat_mul(x, g);
                let k = y.key(q);
                if !member[k] {
                    member[k] = true;
                    elements.push(y);
                    queue.push_back(y);
                }
            }
        }
        elements.sort_unstable();
        Group { field, gens, elements, member }
    }

    /// Wraps a set already known to be a group and picks generators greedily
    /// (smallest element outside the current span).
    pub fn from_elements(field: Arc<Fq>, mut elements: Vec<Mat>) -> Group {
        elements.sort_unstable();
        elements.dedup();
        let mut span = Group::generate(field.clone(), Vec::new());
        for &x in &elements {
            if span.elements.len() == elements.len() {
                break;
            }
            if !span.contains(x) {
                let mut gens = span.gens.clone();
                gens.push(x);
                span = Group::generate(field.clone(), gens);
            }
        }
        assert_eq!(span.elements, elements, "element set is not a group");
        span
    }

    /// `{ g : entries in F_sub, det(g) in dets }`.
    pub fn from_predicate(field: Arc<Fq>, sub: &[u8], dets: &[u8]) -> Group {
        let mut ok = vec![false; field.order() as usize];
        for &d in dets {
            ok[d as usize] = true;
        }
        let mut elements = Vec::new();
        for &a in sub {
            for &b in sub {
                for &c in sub {
                    for &d in sub {
                        let m = Mat([a, b, c, d]);
                        if ok[field.det(m) as usize] {
                            elements.push(m);
                        }
                    }
                }
            }
        }
        Group::from_elements(field, elements)
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn gens(&self) -> &[Mat] {
        &self.gens
    }

    pub fn elements(&self) -> &[Mat] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: Mat) -> bool {
        self.member[x.key(self.field.order() as usize)]
    }

    /// True when every generator of `other` normalizes `self`.
    pub fn normalized_by(&self, other: &Group) -> bool {
        other.gens.iter().all(|&g| {
            let gi = self.field.mat_inv(g);
            self.gens.iter().all(|&h| self.contains(self.field.mat_mul(self.field.mat_mul(g, h), gi)))
        })
    }

    pub fn is_subgroup_of(&self, other: &Group) -> bool {
        self.gens.iter().all(|&g| other.contains(g))
    }

    /// Conjugacy classes as sorted element lists, ordered by smallest element.
    pub fn conjugacy_classes(&self) -> Vec<Vec<Mat>> {
        let f = &self.field;
        let q = f.order() as usize;
        let conj: Vec<(Mat, Mat)> = self.gens.iter().map(|&g| (g, f.mat_inv(g))).collect();
        let mut seen = vec![false; q.pow(4)];
        let mut classes = Vec::new();
        for &x in &self.elements {
            if seen[x.key(q)] {
                continue;
            }
            seen[x.key(q)] = true;
            let mut class = vec![x];
            let mut queue = VecDeque::from([x]);
            while let Some(y) = queue.pop_front() {
                for &(g, gi) in &conj {
                    let z = f.mat_mul(f.mat_mul(g, y), gi);
                    if !seen[z.key(q)] {
                        seen[z.key(q)] = true;
                        class.push(z);
                        queue.push_back(z);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_orders() {
        for q in [2u64, 3, 4, 5] {
            let f = Arc::new(Fq::new(q).unwrap());
            let all: Vec<u8> = (0..q as u8).collect();
            let units: Vec<u8> = (1..q as u8).collect();
            let g = Group::from_predicate(f.clone(), &all, &units);
            assert_eq!(g.order() as u64, (q * q - 1) * (q * q - q));
            let sl = Group::from_predicate(f, &all, &[1]);
            assert_eq!(sl.order() as u64, q * (q * q - 1));
            assert!(sl.normalized_by(&g));
        }
    }
}
