use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::AlgebraError;

/// Matrices with fewer nonzero entries than this fraction are stored sparsely.
const SPARSE_DENSITY: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    Dense(Vec<BigRational>),
    /// Per-row coordinate lists sorted by column.
    Sparse(Vec<Vec<(usize, BigRational)>>),
}

/// Exact matrix over `Q`. Vectors act as columns: `m * v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRationalMatrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl BigRationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BigRationalMatrix { rows, cols, storage: Storage::Sparse(vec![Vec::new(); rows]) }
    }

    pub fn identity(n: usize) -> Self {
        let mut rows = vec![vec![BigRational::zero(); n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = BigRational::one();
        }
        Self::from_rows(n, rows)
    }

    /// Builds from dense rows, choosing the storage by density.
    pub fn from_rows(cols: usize, rows: Vec<Vec<BigRational>>) -> Self {
        let nrows = rows.len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let nnz = rows.iter().flatten().filter(|x| !x.is_zero()).count();
        let total = nrows * cols;
        if total > 0 && (nnz as f64) < SPARSE_DENSITY * total as f64 {
            let sparse = rows
                .into_iter()
                .map(|r| r.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
                .collect();
            BigRationalMatrix { rows: nrows, cols, storage: Storage::Sparse(sparse) }
        } else {
            BigRationalMatrix { rows: nrows, cols, storage: Storage::Dense(rows.into_iter().flatten().collect()) }
        }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigRational>]) -> Self {
        let mut data = vec![vec![BigRational::zero(); columns.len()]; rows];
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                data[i][j] = x.clone();
            }
        }
        Self::from_rows(columns.len(), data)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> BigRational {
        assert!(i < self.rows && j < self.cols);
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols + j].clone(),
            Storage::Sparse(s) => s[i]
                .binary_search_by_key(&j, |(c, _)| *c)
                .map(|k| s[i][k].1.clone())
                .unwrap_or_default(),
        }
    }

    pub fn row(&self, i: usize) -> Vec<BigRational> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols..(i + 1) * self.cols].to_vec(),
            Storage::Sparse(s) => {
                let mut r = vec![BigRational::zero(); self.cols];
                for (j, x) in &s[i] {
                    r[*j] = x.clone();
                }
                r
            }
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Nonzero entries of row `i` as `(column, value)`.
    pub fn row_entries(&self, i: usize) -> Vec<(usize, BigRational)> {
        match &self.storage {
            Storage::Dense(d) => d[i * self.cols..(i + 1) * self.cols]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j, x.clone()))
                .collect(),
            Storage::Sparse(s) => s[i].clone(),
        }
    }

    pub fn nnz(&self) -> usize {
        (0..self.rows).map(|i| self.row_entries(i).len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![vec![BigRational::zero(); self.rows]; self.cols];
        for i in 0..self.rows {
            for (j, x) in self.row_entries(i) {
                data[j][i] = x;
            }
        }
        Self::from_rows(self.rows, data)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.cols != other.rows {
            return Err(AlgebraError::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let other_rows: Vec<Vec<(usize, BigRational)>> =
            (0..other.rows).map(|i| other.row_entries(i)).collect();
        let mut data = vec![vec![BigRational::zero(); other.cols]; self.rows];
        for (i, out) in data.iter_mut().enumerate() {
            for (k, a) in self.row_entries(i) {
                for (j, b) in &other_rows[k] {
                    out[*j] += &a * b;
                }
            }
        }
        Ok(Self::from_rows(other.cols, data))
    }

    /// `self * v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row_entries(i)
                    .iter()
                    .fold(BigRational::zero(), |acc, (j, x)| acc + x * &v[*j])
            })
            .collect()
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Result<Self, AlgebraError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::Dimension("shape mismatch".into()));
        }
        let data = (0..self.rows)
            .map(|i| self.row(i).iter().zip(other.row(i).iter()).map(|(a, b)| f(a, b)).collect())
            .collect();
        Ok(Self::from_rows(self.cols, data))
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let data = self.to_rows().into_iter().map(|r| r.into_iter().map(|x| x * k).collect()).collect();
        Self::from_rows(self.cols, data)
    }

    /// Evaluates a polynomial (ascending coefficients) at a square matrix.
    pub fn eval_poly(&self, coeffs: &[BigRational]) -> Result<Self, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("polynomial evaluation needs a square matrix".into()));
        }
        let n = self.rows;
        let mut acc = Self::zeros(n, n);
        for c in coeffs.iter().rev() {
            acc = acc.mul(self)?.add(&Self::identity(n).scale(c))?;
        }
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        rref(self.to_rows()).1.len()
    }

    /// Reduced row echelon form: nonzero rows and their pivot columns.
    pub fn rref(&self) -> (Vec<Vec<BigRational>>, Vec<usize>) {
        rref(self.to_rows())
    }

    /// Kernel `{v : m v = 0}` as the rows of a reduced echelon basis.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let (rows, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        let mut basis: Vec<Vec<BigRational>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (r, &p) in rows.iter().zip(&pivots) {
                    v[p] = -r[f].clone();
                }
                v
            })
            .collect();
        echelonize(&mut basis);
        basis
    }

    /// Matrix of `self` on the invariant subspace spanned by `basis`:
    /// column `j` holds the coordinates of `self * basis[j]`.
    pub fn restrict(&self, basis: &[Vec<BigRational>]) -> Result<Self, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::Dimension("restriction needs a square matrix".into()));
        }
        let coords = Coordinates::new(basis)?;
        let images: Vec<Vec<BigRational>> = basis
            .iter()
            .map(|b| {
                let w = self.mul_vec(b);
                coords.solve(&w).ok_or(AlgebraError::NotInvariant)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self::from_columns(basis.len(), &images))
    }

    pub fn charpoly(&self) -> Result<super::RatPolynomial, AlgebraError> {
        super::charpoly::charpoly(self)
    }
}

impl fmt::Display for BigRationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// In-place reduced row echelon form; drops zero rows and returns pivots.
pub fn echelonize(rows: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        if !inv.is_one() {
            for x in rows[r][c..].iter_mut() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (x, y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rref(mut rows: Vec<Vec<BigRational>>) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let pivots = echelonize(&mut rows);
    (rows, pivots)
}

/// Solves for coordinates with respect to a fixed (not necessarily
/// echelonized) basis.
pub struct Coordinates {
    echelon: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
    /// `transform[i]` expresses echelon row `i` in the original basis.
    transform: Vec<Vec<BigRational>>,
}

impl Coordinates {
    pub fn new(basis: &[Vec<BigRational>]) -> Result<Self, AlgebraError> {
        let k = basis.len();
        let n = basis.first().map_or(0, Vec::len);
        let mut aug: Vec<Vec<BigRational>> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let mut row = b.clone();
                row.extend((0..k).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        let pivots = echelonize(&mut aug);
        let pivots: Vec<usize> = pivots.into_iter().filter(|&p| p < n).collect();
        if pivots.len() != k {
            return Err(AlgebraError::Dimension("basis vectors are linearly dependent".into()));
        }
        let echelon = aug.iter().map(|r| r[..n].to_vec()).collect();
        let transform = aug.iter().map(|r| r[n..].to_vec()).collect();
        Ok(Coordinates { echelon, pivots, transform })
    }

    /// Coordinates of `w`, or `None` if `w` is outside the span.
    pub fn solve(&self, w: &[BigRational]) -> Option<Vec<BigRational>> {
        let k = self.transform.len();
        let mut residual = w.to_vec();
        let mut coords = vec![BigRational::zero(); k];
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = residual[p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, y) in residual.iter_mut().zip(&self.echelon[i]) {
                if !y.is_zero() {
                    *x -= &c * y;
                }
            }
            for (x, y) in coords.iter_mut().zip(&self.transform[i]) {
                if !y.is_zero() {
                    *x += &c * y;
                }
            }
        }
        residual.iter().all(Zero::is_zero).then_some(coords)
    }
}

/// Reduced echelon basis of the intersection of two subspaces given by
/// spanning rows.
pub fn intersect(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a[0].len();
    // Solve x a - y b = 0 via the kernel of the stacked transpose.
    let mut columns: Vec<Vec<BigRational>> = a.to_vec();
    columns.extend(b.iter().map(|v| v.iter().map(|x| -x.clone()).collect()));
    let m = BigRationalMatrix::from_columns(n, &columns);
    let mut out: Vec<Vec<BigRational>> = m
        .kernel_basis()
        .into_iter()
        .map(|coef| {
            let mut v = vec![BigRational::zero(); n];
            for (c, row) in coef.iter().zip(a) {
                if c.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(row) {
                    *x += c * y;
                }
            }
            v
        })
        .collect();
    echelonize(&mut out);
    out
}
