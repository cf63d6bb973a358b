//! Dirichlet characters with values stored as exponents of a primitive
//! root of unity, plus exact Chebotarev-style densities for conditions of
//! the form "these characters are 1 at p, those are not".

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;

use crate::arith::{euler_phi, factorize, inv_mod, legendre, primitive_root_prime_power};

/// Canonical generators of `(Z/MZ)^x`: for each prime power `p^e || M`
/// (ascending `p`), a primitive root for odd `p`, and `-1, 5` for `2^e`,
/// `e >= 3` (just `-1` for `e = 2`). Each generator is lifted by CRT to be
/// `1` modulo the other prime powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    pub modulus: u64,
    pub generators: Vec<Generator>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub p: u64,
    /// `p^e`, the prime-power component this generator lives in.
    pub component: u64,
    /// Generator as a residue modulo the component.
    pub local: u64,
    /// Generator lifted to a residue modulo the full modulus.
    pub global: u64,
    pub order: u64,
}

impl UnitGroup {
    pub fn new(modulus: u64) -> Self {
        assert!(modulus >= 1, "modulus must be positive");
        let mut generators = Vec::new();
        for (p, e) in factorize(modulus) {
            let q = p.pow(e);
            let lift = |g: u64| crt_lift(g, q, modulus);
            if p == 2 {
                if e >= 2 {
                    generators.push(Generator { p, component: q, local: q - 1, global: lift(q - 1), order: 2 });
                }
                if e >= 3 {
                    generators.push(Generator { p, component: q, local: 5, global: lift(5), order: q / 4 });
                }
            } else {
                let g = primitive_root_prime_power(p, e);
                generators.push(Generator { p, component: q, local: g, global: lift(g), order: euler_phi(q) });
            }
        }
        UnitGroup { modulus, generators }
    }

    pub fn order(&self) -> u64 {
        self.generators.iter().map(|g| g.order).product()
    }

    /// Exponent vector of `a` on the generators, or `None` if `gcd(a, M) > 1`.
    pub fn log(&self, a: i64) -> Option<Vec<u64>> {
        let m = self.modulus as i64;
        let a = a.rem_euclid(m) as u64;
        if a.gcd(&self.modulus) != 1 {
            return None;
        }
        let mut out = Vec::with_capacity(self.generators.len());
        let mut i = 0;
        while i < self.generators.len() {
            let g = &self.generators[i];
            let q = g.component;
            let r = a % q;
            if g.p == 2 {
                let sign = if r % 4 == 1 { 0 } else { 1 };
                out.push(sign);
                if q >= 8 {
                    let b = if sign == 1 { q - r } else { r };
                    out.push(discrete_log(b, 5, q, self.generators[i + 1].order));
                    i += 1;
                }
            } else {
                out.push(discrete_log(r, g.local, q, g.order));
            }
            i += 1;
        }
        Some(out)
    }
}

fn crt_lift(g: u64, q: u64, m: u64) -> u64 {
    let rest = m / q;
    if rest == 1 {
        return g % q;
    }
    let inv = inv_mod((rest % q) as i64, q as i64).expect("coprime components") as u64;
    let t = ((g + q - 1) % q) * inv % q;
    (1 + rest * t) % m
}

/// Brute-force logarithm of `a` to base `g` modulo `m`, `g` of order `order`.
fn discrete_log(a: u64, g: u64, m: u64, order: u64) -> u64 {
    let a = a % m;
    let mut x = 1 % m;
    for t in 0..order {
        if x == a {
            return t;
        }
        x = x * g % m;
    }
    panic!("{a} is not a power of {g} modulo {m}");
}

/// A Dirichlet character modulo `M` taking the value `zeta_n^{e_j}` on the
/// `j`-th canonical generator. `n` is the exact order of the character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DirichletCharacter {
    modulus: u64,
    order: u64,
    exponents: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CharacterError {
    #[error("exponents do not define a homomorphism on (Z/{0}Z)^x")]
    NotHomomorphism(u64),
    #[error("expected {expected} exponents for modulus {modulus}, got {got}")]
    Arity { modulus: u64, expected: usize, got: usize },
    #[error("malformed character encoding: {0}")]
    Parse(String),
}

impl DirichletCharacter {
    /// Character with `chi(g_j) = zeta_n^{e_j}`; normalized to its exact order.
    pub fn new(modulus: u64, n: u64, exponents: Vec<u64>) -> Result<Self, CharacterError> {
        let group = UnitGroup::new(modulus);
        if exponents.len() != group.generators.len() {
            return Err(CharacterError::Arity { modulus, expected: group.generators.len(), got: exponents.len() });
        }
        let n = n.max(1);
        for (e, g) in exponents.iter().zip(&group.generators) {
            if !((e % n) * g.order).is_multiple_of(n) {
                return Err(CharacterError::NotHomomorphism(modulus));
            }
        }
        Ok(Self::normalized(modulus, n, exponents.into_iter().map(|e| e % n).collect()))
    }

    fn normalized(modulus: u64, n: u64, exponents: Vec<u64>) -> Self {
        let g = exponents.iter().fold(n, |acc, &e| acc.gcd(&e));
        DirichletCharacter { modulus, order: n / g, exponents: exponents.into_iter().map(|e| e / g).collect() }
    }

    pub fn trivial(modulus: u64) -> Self {
        let k = UnitGroup::new(modulus).generators.len();
        DirichletCharacter { modulus, order: 1, exponents: vec![0; k] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    /// `chi(a) = zeta_n^k`; returns `k`, or `None` when `gcd(a, M) > 1`.
    pub fn exponent_at(&self, a: i64) -> Option<u64> {
        if self.is_trivial() {
            return (a.rem_euclid(self.modulus as i64) as u64).gcd(&self.modulus).eq(&1).then_some(0);
        }
        let logs = UnitGroup::new(self.modulus).log(a)?;
        Some(self.exponent_from_logs(&logs))
    }

    fn exponent_from_logs(&self, logs: &[u64]) -> u64 {
        logs.iter()
            .zip(&self.exponents)
            .fold(0u64, |acc, (t, e)| (acc + (t % self.order) * e) % self.order)
    }

    /// Value of a character of order at most 2 as `-1, 0, 1`.
    pub fn eval_quadratic(&self, a: i64) -> i32 {
        assert!(self.order <= 2, "eval_quadratic on a character of order {}", self.order);
        let m = self.modulus as i64;
        let r = a.rem_euclid(m);
        if (r as u64).gcd(&self.modulus) != 1 {
            return 0;
        }
        let group_gens = UnitGroup::generator_shape(self.modulus);
        let mut value = 1;
        for ((p, is_five), e) in group_gens.iter().zip(&self.exponents) {
            if *e == 0 {
                continue;
            }
            let s = if *p != 2 {
                legendre(r, *p)
            } else if !is_five {
                if r.rem_euclid(4) == 1 { 1 } else { -1 }
            } else if matches!(r.rem_euclid(8), 1 | 7) {
                1
            } else {
                -1
            };
            value *= s;
        }
        value
    }

    /// Whether `chi(a) = 1`.
    pub fn is_one_at(&self, a: i64) -> bool {
        if self.order <= 2 {
            self.eval_quadratic(a) == 1
        } else {
            self.exponent_at(a) == Some(0)
        }
    }

    /// Parity: `true` when `chi(-1) = -1`.
    pub fn is_odd(&self) -> bool {
        self.exponent_at(-1).is_some_and(|e| e != 0)
    }

    /// The same character viewed modulo a multiple of its modulus.
    pub fn lift(&self, modulus: u64) -> Self {
        assert!(modulus.is_multiple_of(self.modulus), "lift target must be a multiple of the modulus");
        let group = UnitGroup::new(modulus);
        let own = UnitGroup::new(self.modulus);
        let exponents = group
            .generators
            .iter()
            .map(|g| {
                let logs = own.log((g.global % self.modulus) as i64).expect("unit");
                self.exponent_from_logs(&logs)
            })
            .collect();
        Self::normalized(modulus, self.order, exponents)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let a = self.lift(m);
        let b = other.lift(m);
        let n = a.order.lcm(&b.order);
        let exponents = a
            .exponents
            .iter()
            .zip(&b.exponents)
            .map(|(x, y)| (x * (n / a.order) + y * (n / b.order)) % n)
            .collect();
        Self::normalized(m, n, exponents)
    }

    /// Conductor: the modulus of the associated primitive character.
    pub fn conductor(&self) -> u64 {
        let group = UnitGroup::new(self.modulus);
        let mut cond = 1;
        let mut i = 0;
        while i < group.generators.len() {
            let g = &group.generators[i];
            let order_of = |e: u64| self.order / self.order.gcd(&e);
            if g.p == 2 {
                let sign_order = order_of(self.exponents[i]);
                let five_order = if g.component >= 8 { order_of(self.exponents[i + 1]) } else { 1 };
                if five_order > 1 {
                    cond *= 4 * five_order;
                } else if sign_order > 1 {
                    cond *= 4;
                }
                if g.component >= 8 {
                    i += 1;
                }
            } else {
                let o = order_of(self.exponents[i]);
                if o > 1 {
                    let mut f = g.p;
                    let mut rest = o;
                    while rest % g.p == 0 {
                        rest /= g.p;
                        f *= g.p;
                    }
                    cond *= f;
                }
            }
            i += 1;
        }
        cond
    }

    /// The primitive character inducing `self`.
    pub fn primitive(&self) -> Self {
        let f = self.conductor();
        let group = UnitGroup::new(f);
        let exponents = group
            .generators
            .iter()
            .map(|g| {
                // Any integer congruent to the generator mod f and coprime to M works.
                let mut x = g.global;
                while x.gcd(&self.modulus) != 1 {
                    x += f;
                }
                self.exponent_at(x as i64).expect("unit")
            })
            .collect();
        Self::normalized(f, self.order, exponents)
    }

    /// Equality of the underlying primitive characters.
    pub fn same_primitive(&self, other: &Self) -> bool {
        self.primitive() == other.primitive()
    }

    /// For a primitive quadratic character, the fundamental discriminant `D`
    /// with `chi = (D / .)`.
    pub fn quadratic_discriminant(&self) -> Option<i64> {
        if self.order != 2 {
            return None;
        }
        let prim = self.primitive();
        let mut d: i64 = 1;
        let shape = UnitGroup::generator_shape(prim.modulus);
        let mut two_sign = false;
        let mut two_five = false;
        for ((p, is_five), e) in shape.iter().zip(&prim.exponents) {
            if *e == 0 {
                continue;
            }
            if *p == 2 {
                if *is_five {
                    two_five = true;
                } else {
                    two_sign = true;
                }
            } else {
                let p = *p as i64;
                d *= if p % 4 == 1 { p } else { -p };
            }
        }
        d *= match (two_sign, two_five) {
            (false, false) => 1,
            (true, false) => -4,
            (false, true) => 8,
            (true, true) => -8,
        };
        Some(d)
    }

    pub fn encode(&self) -> String {
        self.to_string()
    }
}

impl UnitGroup {
    /// `(p, is_the_5_generator)` per canonical generator.
    fn generator_shape(modulus: u64) -> Vec<(u64, bool)> {
        let mut out = Vec::new();
        for (p, e) in factorize(modulus) {
            if p == 2 {
                if e >= 2 {
                    out.push((2, false));
                }
                if e >= 3 {
                    out.push((2, true));
                }
            } else {
                out.push((p, false));
            }
        }
        out
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "{}.{}.[{}]", self.modulus, self.order, exps.join(","))
    }
}

impl FromStr for DirichletCharacter {
    type Err = CharacterError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CharacterError::Parse(s.to_string());
        let (m, rest) = s.split_once('.').ok_or_else(bad)?;
        let (n, exps) = rest.split_once('.').ok_or_else(bad)?;
        let exps = exps.strip_prefix('[').and_then(|e| e.strip_suffix(']')).ok_or_else(bad)?;
        let exponents = if exps.trim().is_empty() {
            Vec::new()
        } else {
            exps.split(',').map(|e| e.trim().parse::<u64>().map_err(|_| bad())).collect::<Result<_, _>>()?
        };
        let m = m.parse().map_err(|_| bad())?;
        let n = n.parse().map_err(|_| bad())?;
        DirichletCharacter::new(m, n, exponents)
    }
}

/// All characters of order dividing 2 modulo `m`, trivial first, then by
/// bitmask over the canonical generators.
pub fn quadratic_characters(m: u64) -> Vec<DirichletCharacter> {
    let group = UnitGroup::new(m);
    let even: Vec<usize> = (0..group.generators.len()).filter(|&i| group.generators[i].order.is_multiple_of(2)).collect();
    (0u64..1 << even.len())
        .map(|mask| {
            let mut exps = vec![0u64; group.generators.len()];
            for (bit, &i) in even.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    exps[i] = 1;
                }
            }
            DirichletCharacter::normalized(m, 2, exps)
        })
        .collect()
}

/// Primes `p` with `chi_i(p) = 1` for every `i` in `equal_one` and
/// `chi_j(p) != 1` for every `j` in `not_equal_one`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacterConditionSet {
    pub equal_one: Vec<DirichletCharacter>,
    pub not_equal_one: Vec<DirichletCharacter>,
}

/// Counts exponent tuples of `(Z/MZ)^x` (one per residue class) satisfying a
/// predicate on the values of `chars`, all lifted to the common modulus `M`.
fn count_units(chars: &[DirichletCharacter], accept: impl Fn(&[u64]) -> bool) -> (u64, u64) {
    let m = chars.iter().fold(1u64, |acc, c| acc.lcm(&c.modulus));
    let group = UnitGroup::new(m);
    let lifted: Vec<DirichletCharacter> = chars.iter().map(|c| c.lift(m)).collect();
    let orders: Vec<u64> = group.generators.iter().map(|g| g.order).collect();
    let total: u64 = orders.iter().product();
    let mut t = vec![0u64; orders.len()];
    let mut values = vec![0u64; lifted.len()];
    let mut count = 0;
    loop {
        for (v, c) in values.iter_mut().zip(&lifted) {
            *v = c.exponent_from_logs(&t);
        }
        if accept(&values) {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == t.len() {
                return (count, total);
            }
            t[k] += 1;
            if t[k] < orders[k] {
                break;
            }
            t[k] = 0;
            k += 1;
        }
    }
}

/// `[K_H : Q]` for the field cut out by the given characters.
pub fn joint_kernel_degree(chars: &[DirichletCharacter]) -> u64 {
    if chars.iter().all(DirichletCharacter::is_trivial) {
        return 1;
    }
    let (count, total) = count_units(chars, |v| v.iter().all(|&e| e == 0));
    total / count
}

/// Exact density of primes satisfying the condition set.
pub fn condition_density(cond: &CharacterConditionSet) -> Rational64 {
    let r = cond.equal_one.len();
    let all: Vec<DirichletCharacter> = cond.equal_one.iter().chain(&cond.not_equal_one).cloned().collect();
    if all.is_empty() {
        return Rational64::from_integer(1);
    }
    let (count, total) = count_units(&all, |v| v[..r].iter().all(|&e| e == 0) && v[r..].iter().all(|&e| e != 0));
    Rational64::new(count as i64, total as i64)
}

/// The primitive quadratic character `(d / .)` of a fundamental discriminant.
pub fn kronecker_character(d: i64) -> DirichletCharacter {
    let m = d.unsigned_abs();
    quadratic_characters(m)
        .into_iter()
        .find(|c| c.order == 2 && c.conductor() == m && c.quadratic_discriminant() == Some(d))
        .unwrap_or_else(|| panic!("{d} is not a fundamental discriminant"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_counts() {
        assert_eq!(quadratic_characters(1).len(), 1);
        assert_eq!(quadratic_characters(3).len(), 2);
        assert_eq!(quadratic_characters(8).len(), 4);
        assert_eq!(quadratic_characters(4 * 9 * 5).len(), 8);
    }

    #[test]
    fn legendre_mod_3() {
        let chi = &quadratic_characters(3)[1];
        assert_eq!(chi.eval_quadratic(2), -1);
        assert_eq!(chi.eval_quadratic(7), 1);
        assert_eq!(chi.quadratic_discriminant(), Some(-3));
        assert!(chi.is_odd());
        assert_eq!(chi.to_string(), "3.2.[1]");
        assert_eq!("3.2.[1]".parse::<DirichletCharacter>().unwrap(), *chi);
    }

    #[test]
    fn kernel_degrees() {
        assert_eq!(joint_kernel_degree(&[]), 1);
        assert_eq!(joint_kernel_degree(&[quadratic_characters(3)[1].clone()]), 2);
        let q12 = quadratic_characters(12);
        assert_eq!(joint_kernel_degree(&[q12[1].clone(), q12[2].clone()]), 4);
    }

    #[test]
    fn lifting_and_conductor() {
        let chi3 = quadratic_characters(3)[1].clone();
        let lifted = chi3.lift(63);
        assert_eq!(lifted.conductor(), 3);
        assert!(lifted.same_primitive(&chi3));
        for a in 1..200i64 {
            assert_eq!(lifted.eval_quadratic(a), if a % 7 == 0 { 0 } else { chi3.eval_quadratic(a) });
        }
        let minus4 = kronecker_character(-4);
        let eight = kronecker_character(8);
        assert_eq!(minus4.mul(&eight).quadratic_discriminant(), Some(-8));
    }

    #[test]
    fn densities() {
        let chi3 = quadratic_characters(3)[1].clone();
        let half = condition_density(&CharacterConditionSet { equal_one: vec![chi3], not_equal_one: vec![] });
        assert_eq!(half, Rational64::new(1, 2));
        let e1 = kronecker_character(-4);
        let e2 = kronecker_character(8);
        let e3 = e1.mul(&e2);
        let zero = condition_density(&CharacterConditionSet {
            equal_one: vec![],
            not_equal_one: vec![e1.clone(), e2.clone(), e3],
        });
        assert_eq!(zero, Rational64::from_integer(0));
        let quarter = condition_density(&CharacterConditionSet { equal_one: vec![e1], not_equal_one: vec![e2] });
        assert_eq!(quarter, Rational64::new(1, 4));
    }
}
