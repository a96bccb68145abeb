//! Exact rational scalars, vectors and dense matrices.
//!
//! Every elimination in this crate uses the same pivot rule: columns are
//! processed left to right and the pivot of a column is the first nonzero
//! entry found scanning rows top-down. Outputs are therefore reproducible
//! bit for bit.

mod sparse;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use sparse::SparseMatrix;

/// Arbitrary precision rational, always kept in lowest terms with a
/// positive denominator. Displays as `p/q`, or `p` when `q = 1`.
pub type Rational = num_rational::BigRational;

pub type Vector = Vec<Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) outside a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vector(len: usize) -> Vector {
    vec![Rational::zero(); len]
}

pub fn unit_vector(len: usize, at: usize) -> Vector {
    let mut v = zero_vector(len);
    v[at] = Rational::one();
    v
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// `a + s * b`, in place on `a`.
pub fn axpy(a: &mut [Rational], s: &Rational, b: &[Rational]) {
    if s.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += s * y;
        }
    }
}

/// Dense row-major matrix of rationals. Dimensions are fixed at
/// construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{} ", self[(r, c)])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix from rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinError> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(LinError::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: nrows, cols, data })
    }

    /// Convenience constructor from small integers.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged integer matrix");
            for (c, v) in row.iter().enumerate() {
                m[(r, c)] = rat(*v);
            }
        }
        m
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given
    /// vectors.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Result<Self, LinError> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LinError::DimensionMismatch { expected: rows, found: col.len() });
            }
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> Result<&Rational, LinError> {
        if row >= self.rows || col >= self.cols {
            return Err(LinError::OutOfBounds { row, col, rows: self.rows, cols: self.cols });
        }
        Ok(&self.data[row * self.cols + col])
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vector {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.cols != other.rows {
            return Err(LinError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vector, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        let mut out = zero_vector(self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            for (a, b) in self.row(r).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, LinError> {
        if self.rows != other.rows {
            return Err(LinError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..other.cols {
                out[(r, self.cols + c)] = other[(r, c)].clone();
            }
        }
        Ok(out)
    }

    /// Copies `block` into `self` with its top-left corner at `(row, col)`.
    pub fn set_block(&mut self, row: usize, col: usize, block: &Matrix) {
        for r in 0..block.rows {
            for c in 0..block.cols {
                self[(row + r, col + c)] = block[(r, c)].clone();
            }
        }
    }

    pub fn block(&self, row: usize, col: usize, rows: usize, cols: usize) -> Matrix {
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                out[(r, c)] = self[(row + r, col + c)].clone();
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                out[(r, j)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for c in 0..self.cols {
                out[(i, c)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn inverse(&self) -> Result<Option<Matrix>, LinError> {
        if !self.is_square() {
            return Err(LinError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n))?;
        let red = aug.rref();
        if red.pivots.len() < n || red.pivots[n - 1] >= n {
            return Ok(None);
        }
        Ok(Some(red.matrix.block(0, n, n, n)))
    }

    /// Reduced row echelon form under the fixed pivot rule.
    pub(crate) fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(r) = (prow..m.rows).find(|&r| !m[(r, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, prow);
            let inv = m[(prow, c)].recip();
            let support: Vec<usize> = (c..m.cols).filter(|&cc| !m[(prow, cc)].is_zero()).collect();
            if !inv.is_one() {
                for &cc in &support {
                    let v = &m[(prow, cc)] * &inv;
                    m[(prow, cc)] = v;
                }
            }
            let row: Vec<Rational> = support.iter().map(|&cc| m[(prow, cc)].clone()).collect();
            for r2 in 0..m.rows {
                if r2 == prow || m[(r2, c)].is_zero() {
                    continue;
                }
                let f = m[(r2, c)].clone();
                for (&cc, p) in support.iter().zip(&row) {
                    let v = &f * p;
                    m[(r2, cc)] -= v;
                }
            }
            pivots.push(c);
            prow += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

pub(crate) struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

/// Result of [`column_space_analysis`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpace {
    pub rank: usize,
    pub kernel_basis: Vec<Vector>,
    /// Original columns at the pivot positions.
    pub image_basis: Vec<Vector>,
    pub pivot_columns: Vec<usize>,
}

pub fn column_space_analysis(m: &Matrix) -> ColumnSpace {
    let red = m.rref();
    let pivots = red.pivots;
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut kernel_basis = Vec::new();
    for f in (0..m.cols).filter(|&c| !is_pivot[c]) {
        let mut v = zero_vector(m.cols);
        v[f] = Rational::one();
        for (i, &p) in pivots.iter().enumerate() {
            let e = &red.matrix[(i, f)];
            if !e.is_zero() {
                v[p] = -e;
            }
        }
        kernel_basis.push(v);
    }
    let image_basis = pivots.iter().map(|&p| m.column(p)).collect();
    ColumnSpace { rank: pivots.len(), kernel_basis, image_basis, pivot_columns: pivots }
}

pub fn determinant(m: &Matrix) -> Result<Rational, LinError> {
    if !m.is_square() {
        return Err(LinError::NotSquare { rows: m.rows, cols: m.cols });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if r != c {
            a.swap_rows(r, c);
            det = -det;
        }
        let p = a[(c, c)].clone();
        det *= &p;
        let inv = p.recip();
        for r2 in c + 1..n {
            if a[(r2, c)].is_zero() {
                continue;
            }
            let f = &a[(r2, c)] * &inv;
            for cc in c..n {
                let v = &f * &a[(c, cc)];
                if !v.is_zero() {
                    a[(r2, cc)] -= v;
                }
            }
        }
    }
    Ok(det)
}

/// One exact solution of `m x = b`, free coordinates set to zero, or
/// `None` when the system is inconsistent.
pub fn solve(m: &Matrix, b: &[Rational]) -> Result<Option<Vector>, LinError> {
    if b.len() != m.rows {
        return Err(LinError::DimensionMismatch { expected: m.rows, found: b.len() });
    }
    let rhs = Matrix::from_columns(m.rows, &[b.to_vec()])?;
    let red = m.hstack(&rhs)?.rref();
    if red.pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    let mut x = zero_vector(m.cols);
    for (i, &p) in red.pivots.iter().enumerate() {
        x[p] = red.matrix[(i, m.cols)].clone();
    }
    Ok(Some(x))
}

/// Solves `m X = B` column by column in a single elimination. Returns
/// `None` if any column is inconsistent.
pub fn solve_many(m: &Matrix, rhs: &Matrix) -> Result<Option<Matrix>, LinError> {
    if rhs.rows != m.rows {
        return Err(LinError::DimensionMismatch { expected: m.rows, found: rhs.rows });
    }
    let red = m.hstack(rhs)?.rref();
    if red.pivots.iter().any(|&p| p >= m.cols) {
        return Ok(None);
    }
    let mut x = Matrix::zeros(m.cols, rhs.cols);
    for (i, &p) in red.pivots.iter().enumerate() {
        for c in 0..rhs.cols {
            x[(p, c)] = red.matrix[(i, m.cols + c)].clone();
        }
    }
    Ok(Some(x))
}

/// Picks, in order, the vectors of `candidates` that are independent of
/// `base` and of the previously picked candidates. Returns their indices.
pub fn extend_independent(dim: usize, base: &[Vector], candidates: &[Vector]) -> Vec<usize> {
    let mut all: Vec<Vector> = base.to_vec();
    all.extend(candidates.iter().cloned());
    if all.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(dim, &all).expect("vector length mismatch");
    let red = m.rref();
    red.pivots.iter().filter(|&&p| p >= base.len()).map(|&p| p - base.len()).collect()
}

/// Basis of the span of `vectors` (a subset of them, fixed pivot rule).
pub fn span_basis(dim: usize, vectors: &[Vector]) -> Vec<Vector> {
    extend_independent(dim, &[], vectors).into_iter().map(|i| vectors[i].clone()).collect()
}

/// Basis of the intersection of the spans of two lists of vectors in
/// `Q^dim`.
pub fn intersect_spans(dim: usize, a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut cols = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect::<Vector>()));
    let m = Matrix::from_columns(dim, &cols).expect("vector length mismatch");
    let ker = column_space_analysis(&m).kernel_basis;
    let vecs: Vec<Vector> = ker
        .iter()
        .map(|k| {
            let mut v = zero_vector(dim);
            for (coef, col) in k[..a.len()].iter().zip(a) {
                axpy(&mut v, coef, col);
            }
            v
        })
        .collect();
    span_basis(dim, &vecs)
}

/// Multiplies every entry by the least common multiple of the
/// denominators so the result is integral. Rank and span are unchanged.
pub fn clear_denominators(v: &[Rational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        if !x.is_integer() {
            l = num_integer::Integer::lcm(&l, x.denom());
        }
    }
    v.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect()
}

pub fn abs(x: &Rational) -> Rational {
    x.abs()
}
