//! Exact arithmetic over `Z` and `Q`: matrices, characteristic polynomials,
//! kernels, and factorization of integer polynomials.

mod charpoly;
mod factor;
mod matrix;
pub mod modp;
mod poly;

pub use charpoly::{charpoly, hessenberg_charpoly, integer_charpoly, roots_bounded_by};
pub use factor::{factor, is_irreducible, Factorization};
pub use matrix::{echelonize, intersect, rat, rref, BigRationalMatrix, Coordinates};
pub use poly::{IntPolynomial, RatPolynomial};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("subspace is not invariant under the operator")]
    NotInvariant,
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantPolynomial,
}

/// `restrict` as a free function, mirroring [`BigRationalMatrix::restrict`].
pub fn restrict(
    m: &BigRationalMatrix,
    basis: &[Vec<num_rational::BigRational>],
) -> Result<BigRationalMatrix, AlgebraError> {
    m.restrict(basis)
}

/// `kernel_basis` as a free function.
pub fn kernel_basis(m: &BigRationalMatrix) -> Vec<Vec<num_rational::BigRational>> {
    m.kernel_basis()
}
