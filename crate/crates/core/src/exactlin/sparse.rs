//! Column-sparse rational matrices and an exact rank routine for the large
//! windows built by the Dupont module. Semantics are those of the dense
//! [`Matrix`](super::Matrix); only the storage differs.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{clear_denominators, LinError, Matrix, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    /// Per column: strictly increasing row indices with nonzero values.
    columns: Vec<Vec<(usize, Rational)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are
    /// summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut buckets: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet outside matrix");
            buckets[c].push((r, v));
        }
        let columns = buckets.into_iter().map(normalize_column).collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn from_dense(m: &Matrix) -> Self {
        let mut columns = vec![Vec::new(); m.cols()];
        for (c, col) in columns.iter_mut().enumerate() {
            for r in 0..m.rows() {
                let v = &m[(r, c)];
                if !v.is_zero() {
                    col.push((r, v.clone()));
                }
            }
        }
        SparseMatrix { rows: m.rows(), cols: m.cols(), columns }
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows, self.cols);
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                m[(*r, c)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(usize, Rational)] {
        &self.columns[c]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.columns[c]
            .binary_search_by_key(&r, |(row, _)| *row)
            .map(|i| self.columns[c][i].1.clone())
            .unwrap_or_else(|_| Rational::zero())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut trip = Vec::with_capacity(self.nnz());
        for (c, col) in self.columns.iter().enumerate() {
            for (r, v) in col {
                trip.push((c, *r, v.clone()));
            }
        }
        SparseMatrix::from_triplets(self.cols, self.rows, trip)
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinError> {
        if self.cols != other.rows {
            return Err(LinError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut columns = Vec::with_capacity(other.cols);
        for col in &other.columns {
            let mut acc: Vec<(usize, Rational)> = Vec::new();
            for (k, b) in col {
                for (r, a) in &self.columns[*k] {
                    acc.push((*r, a * b));
                }
            }
            columns.push(normalize_column(acc));
        }
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, columns })
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinError::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut all = a.clone();
                all.extend(b.iter().cloned());
                normalize_column(all)
            })
            .collect();
        Ok(SparseMatrix { rows: self.rows, cols: self.cols, columns })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinError> {
        if v.len() != self.cols {
            return Err(LinError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        let mut out = vec![Rational::zero(); self.rows];
        for (col, x) in self.columns.iter().zip(v) {
            if x.is_zero() {
                continue;
            }
            for (r, a) in col {
                out[*r] += a * x;
            }
        }
        Ok(out)
    }

    /// Restriction to the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: cols.len(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
        }
    }

    /// Restriction to the rows with `keep[row] == true`, renumbered in
    /// increasing order.
    pub fn select_rows(&self, keep: &[bool]) -> SparseMatrix {
        assert_eq!(keep.len(), self.rows);
        let mut new_index = vec![usize::MAX; self.rows];
        let mut n = 0;
        for (r, k) in keep.iter().enumerate() {
            if *k {
                new_index[r] = n;
                n += 1;
            }
        }
        let columns = self
            .columns
            .iter()
            .map(|col| col.iter().filter(|(r, _)| keep[*r]).map(|(r, v)| (new_index[*r], v.clone())).collect())
            .collect();
        SparseMatrix { rows: n, cols: self.cols, columns }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinError> {
        if self.rows != other.rows {
            return Err(LinError::DimensionMismatch { expected: self.rows, found: other.rows });
        }
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        Ok(SparseMatrix { rows: self.rows, cols: self.cols + other.cols, columns })
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut red = ColumnReducer::new(self.rows);
        for col in &self.columns {
            red.push(col);
        }
        red.rank()
    }
}

fn normalize_column(mut col: Vec<(usize, Rational)>) -> Vec<(usize, Rational)> {
    col.sort_by_key(|(r, _)| *r);
    let mut out: Vec<(usize, Rational)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

/// Integer with an inline fast path; promotes to a big integer on
/// overflow.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Int {
    Small(i64),
    Big(BigInt),
}

impl Int {
    fn from_big(b: BigInt) -> Int {
        match b.to_i64() {
            Some(s) => Int::Small(s),
            None => Int::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Int::Small(s) => BigInt::from(*s),
            Int::Big(b) => b.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Int::Small(s) => *s == 0,
            Int::Big(b) => b.is_zero(),
        }
    }

    fn mul(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(v) = a.checked_mul(*b) {
                return Int::Small(v);
            }
        }
        Int::from_big(self.to_big() * o.to_big())
    }

    fn sub(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(v) = a.checked_sub(*b) {
                return Int::Small(v);
            }
        }
        Int::from_big(self.to_big() - o.to_big())
    }

    fn neg(&self) -> Int {
        match self {
            Int::Small(a) => match a.checked_neg() {
                Some(v) => Int::Small(v),
                None => Int::Big(-BigInt::from(*a)),
            },
            Int::Big(b) => Int::from_big(-b),
        }
    }

    fn gcd(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if *a != i64::MIN && *b != i64::MIN {
                return Int::Small(a.gcd(b));
            }
        }
        Int::from_big(self.to_big().gcd(&o.to_big()))
    }

    fn div_exact(&self, o: &Int) -> Int {
        if let (Int::Small(a), Int::Small(b)) = (self, o) {
            if let Some(v) = a.checked_div(*b) {
                return Int::Small(v);
            }
        }
        Int::from_big(self.to_big() / o.to_big())
    }

    fn is_one_abs(&self) -> bool {
        match self {
            Int::Small(a) => *a == 1 || *a == -1,
            Int::Big(b) => b.abs().is_one(),
        }
    }
}

type IntColumn = Vec<(usize, Int)>;

/// Incremental fraction-free column reduction. Each pushed column is
/// reduced against stored columns keyed by their lowest (largest-index)
/// row until it vanishes or acquires a fresh lowest row.
pub(crate) struct ColumnReducer {
    low_owner: Vec<Option<usize>>,
    stored: Vec<IntColumn>,
}

impl ColumnReducer {
    pub(crate) fn new(rows: usize) -> Self {
        ColumnReducer { low_owner: vec![None; rows], stored: Vec::new() }
    }

    pub(crate) fn rank(&self) -> usize {
        self.stored.len()
    }

    /// Returns `true` when the column is independent of those pushed so far.
    pub(crate) fn push(&mut self, col: &[(usize, Rational)]) -> bool {
        if col.is_empty() {
            return false;
        }
        let vals: Vec<Rational> = col.iter().map(|(_, v)| v.clone()).collect();
        let ints = clear_denominators(&vals);
        let mut c: IntColumn = col.iter().zip(ints).map(|((r, _), v)| (*r, Int::from_big(v))).collect();
        make_primitive(&mut c);
        loop {
            let Some((low, lv)) = c.last().cloned() else {
                return false;
            };
            match self.low_owner[low] {
                None => {
                    self.low_owner[low] = Some(self.stored.len());
                    self.stored.push(c);
                    return true;
                }
                Some(j) => {
                    let p = &self.stored[j];
                    let pv = &p.last().expect("stored column is nonempty").1;
                    let g = pv.gcd(&lv);
                    let a = pv.div_exact(&g);
                    let b = lv.div_exact(&g);
                    c = combine(&a, &c, &b, p);
                    make_primitive(&mut c);
                }
            }
        }
    }
}

/// `a * x - b * y`, dropping zeros.
fn combine(a: &Int, x: &IntColumn, b: &Int, y: &IntColumn) -> IntColumn {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    let a_one = matches!(a, Int::Small(1));
    while i < x.len() || j < y.len() {
        let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
        let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
        if take_x {
            let v = if a_one { x[i].1.clone() } else { a.mul(&x[i].1) };
            out.push((x[i].0, v));
            i += 1;
        } else if take_y {
            out.push((y[j].0, b.mul(&y[j].1).neg()));
            j += 1;
        } else {
            let l = if a_one { x[i].1.clone() } else { a.mul(&x[i].1) };
            let v = l.sub(&b.mul(&y[j].1));
            if !v.is_zero() {
                out.push((x[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn make_primitive(c: &mut IntColumn) {
    let Some(first) = c.first() else {
        return;
    };
    let mut g = first.1.clone();
    for (_, v) in c.iter().skip(1) {
        if g.is_one_abs() {
            return;
        }
        g = g.gcd(v);
    }
    if g.is_one_abs() || g.is_zero() {
        return;
    }
    for (_, v) in c.iter_mut() {
        *v = v.div_exact(&g);
    }
}
