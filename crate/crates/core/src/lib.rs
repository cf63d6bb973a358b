//! Newform Galois orbits on `Gamma_0(N)` via modular symbols, with a census
//! of primes whose Hecke eigenvalue fails to generate the coefficient field.

pub mod algebra;
pub mod arith;
pub mod dirichlet;
pub mod gl2lab;
pub mod modsym;
pub mod orbits;
pub mod par;
pub mod twists;
