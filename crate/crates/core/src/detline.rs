//! Graded determinant lines, based complexes, and the scalars realizing the
//! Knudsen–Mumford isomorphism `det C = det H(C)` and its Z/2-graded
//! analogue.
//!
//! Lines are never materialized as exterior powers. A [`DetElement`] is a
//! nonzero coordinate against the wedge of a declared, ordered reference
//! basis; the scalars computed here are ratios of such coordinates.
//!
//! Torsion convention: for a cochain complex with reference bases `e_i` and
//! cohomology representatives `h_i`, pick `b_i` in `C^i` whose images form
//! a basis of `im d_i`. The square matrix `M_i = [d b_{i-1} | h_i | b_i]`
//! expressed in `e_i` is invertible, and
//!
//! ```text
//! km_scalar = prod_i det(M_i) ^ ((-1)^(i+1))
//! ```
//!
//! so that the reference element `(x)_i det(e_i)^((-1)^i)` maps to
//! `km_scalar * (x)_i det(h_i)^((-1)^i)`. The value does not depend on the
//! `b_i`. Signs coming from reordering factors are not tracked: torsion over
//! the rationals is only meaningful up to `+-1`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{
    column_space_analysis, determinant, extend_independent, is_zero_vector, solve_many, unit_vector, LinError, Matrix,
    Rational, Vector,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DetError {
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error("differentials in degrees {degree} and {next} do not compose to zero")]
    NotAComplex { degree: i64, next: i64 },
    #[error("representative {index} in degree {degree} is not a cocycle")]
    NotCocycle { degree: i64, index: usize },
    #[error("degree {degree}: expected {expected} representatives, got {found}")]
    WrongCount { degree: i64, expected: usize, found: usize },
    #[error("representatives in degree {degree} do not project to a basis of cohomology")]
    NotABasis { degree: i64 },
    #[error("lift choice in degree {degree} does not map onto a basis of the image")]
    BadLift { degree: i64 },
    #[error("vector of length {found} where {expected} was expected")]
    BadLength { expected: usize, found: usize },
    #[error("a determinant-line element must have a nonzero coordinate")]
    ZeroCoordinate,
}

/// One factor of a reference ordering: a named line and its grade.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LineFactor {
    pub basis_id: String,
    pub grade: i64,
    pub inverted: bool,
}

/// A graded line identified by the ordered factors of its reference
/// basis. The grade is the sum of factor grades.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedLine {
    pub factors: Vec<LineFactor>,
}

impl GradedLine {
    pub fn unit() -> Self {
        GradedLine { factors: Vec::new() }
    }

    pub fn named(basis_id: &str, grade: i64) -> Self {
        GradedLine { factors: alloc::vec![LineFactor { basis_id: basis_id.into(), grade, inverted: false }] }
    }

    pub fn grade(&self) -> i64 {
        self.factors.iter().map(|f| f.grade).sum()
    }

    /// Identifier of the composite reference basis, e.g. `a*b^-1`.
    pub fn basis_id(&self) -> String {
        if self.factors.is_empty() {
            return "k".into();
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|f| if f.inverted { format!("{}^-1", f.basis_id) } else { f.basis_id.clone() })
            .collect();
        parts.join("*")
    }
}

/// A nonzero element of a graded line, as a coordinate against the line's
/// reference basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DetElement {
    pub line: GradedLine,
    pub coordinate: Rational,
}

impl DetElement {
    pub fn new(line: GradedLine, coordinate: Rational) -> Result<Self, DetError> {
        if coordinate.is_zero() {
            return Err(DetError::ZeroCoordinate);
        }
        Ok(DetElement { line, coordinate })
    }

    pub fn unit() -> Self {
        DetElement { line: GradedLine::unit(), coordinate: Rational::one() }
    }

    pub fn grade(&self) -> i64 {
        self.line.grade()
    }

    /// Re-expresses the element against a permutation of its factors,
    /// applying the Koszul sign of each transposition. Returns `None` if
    /// `order` is not a permutation of the current factors.
    pub fn reorder(&self, order: &[LineFactor]) -> Option<DetElement> {
        if order.len() != self.line.factors.len() {
            return None;
        }
        let mut current = self.line.factors.clone();
        let mut sign_odd = false;
        for (pos, want) in order.iter().enumerate() {
            let found = (pos..current.len()).find(|&i| current[i] == *want)?;
            for i in (pos..found).rev() {
                if (current[i].grade * current[i + 1].grade) % 2 != 0 {
                    sign_odd = !sign_odd;
                }
                current.swap(i, i + 1);
            }
        }
        let coordinate = if sign_odd { -self.coordinate.clone() } else { self.coordinate.clone() };
        Some(DetElement { line: GradedLine { factors: current }, coordinate })
    }

    /// Cancels every factor against a matching inverse factor, moving them
    /// adjacent with Koszul signs first.
    pub fn contract(&self) -> DetElement {
        let mut el = self.clone();
        loop {
            let f = &el.line.factors;
            let pair = (0..f.len()).find_map(|i| {
                (i + 1..f.len())
                    .find(|&j| {
                        f[j].basis_id == f[i].basis_id && f[j].inverted != f[i].inverted && f[j].grade == -f[i].grade
                    })
                    .map(|j| (i, j))
            });
            let Some((i, j)) = pair else {
                return el;
            };
            let mut order = el.line.factors.clone();
            let moved = order.remove(j);
            order.insert(i + 1, moved);
            el = el.reorder(&order).expect("permutation of own factors");
            el.line.factors.drain(i..i + 2);
        }
    }
}

pub fn tensor(a: &DetElement, b: &DetElement) -> DetElement {
    let mut factors = a.line.factors.clone();
    factors.extend(b.line.factors.iter().cloned());
    DetElement { line: GradedLine { factors }, coordinate: &a.coordinate * &b.coordinate }
}

pub fn invert(a: &DetElement) -> DetElement {
    let factors = a
        .line
        .factors
        .iter()
        .rev()
        .map(|f| LineFactor { basis_id: f.basis_id.clone(), grade: -f.grade, inverted: !f.inverted })
        .collect();
    DetElement { line: GradedLine { factors }, coordinate: a.coordinate.recip() }
}

/// Bounded cochain complex `C^r -> ... -> C^s` with standard reference
/// bases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasedComplex {
    start: i64,
    dims: Vec<usize>,
    diffs: Vec<Matrix>,
    basis_ids: Vec<String>,
}

impl BasedComplex {
    /// `diffs[i]` maps degree `start + i` to `start + i + 1`.
    pub fn new(start: i64, dims: Vec<usize>, diffs: Vec<Matrix>) -> Result<Self, DetError> {
        let expected = dims.len().saturating_sub(1);
        if diffs.len() != expected {
            return Err(LinError::DimensionMismatch { expected, found: diffs.len() }.into());
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.cols() != dims[i] {
                return Err(LinError::DimensionMismatch { expected: dims[i], found: d.cols() }.into());
            }
            if d.rows() != dims[i + 1] {
                return Err(LinError::DimensionMismatch { expected: dims[i + 1], found: d.rows() }.into());
            }
        }
        for i in 1..diffs.len() {
            if !diffs[i].mul(&diffs[i - 1])?.is_zero() {
                let degree = start + i as i64 - 1;
                return Err(DetError::NotAComplex { degree, next: degree + 1 });
            }
        }
        let basis_ids = (0..dims.len()).map(|i| format!("C{}", start + i as i64)).collect();
        Ok(BasedComplex { start, dims, diffs, basis_ids })
    }

    pub fn with_basis_ids(mut self, ids: Vec<String>) -> Self {
        assert_eq!(ids.len(), self.dims.len());
        self.basis_ids = ids;
        self
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last degree; equals `start - 1` for the empty complex.
    pub fn end(&self) -> i64 {
        self.start + self.dims.len() as i64 - 1
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.start..=self.end()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.index(degree).map_or(0, |i| self.dims[i])
    }

    pub fn basis_id(&self, degree: i64) -> Option<&str> {
        self.index(degree).map(|i| self.basis_ids[i].as_str())
    }

    fn index(&self, degree: i64) -> Option<usize> {
        if degree < self.start || degree > self.end() {
            None
        } else {
            Some((degree - self.start) as usize)
        }
    }

    /// The differential leaving `degree`, as a `dim(degree+1) x dim(degree)`
    /// matrix (zero-sized outside the range).
    pub fn differential(&self, degree: i64) -> Matrix {
        match self.index(degree) {
            Some(i) if i < self.diffs.len() => self.diffs[i].clone(),
            _ => Matrix::zeros(self.dim(degree + 1), self.dim(degree)),
        }
    }

    pub fn differentials(&self) -> &[Matrix] {
        &self.diffs
    }

    pub fn cohomology_dims(&self) -> Vec<usize> {
        self.degrees()
            .map(|d| {
                let n = self.dim(d);
                let out_rank = self.differential(d).rank();
                let in_rank = self.differential(d - 1).rank();
                n - out_rank - in_rank
            })
            .collect()
    }

    /// Deterministic cohomology representatives: kernel vectors of the
    /// outgoing differential (fixed pivot rule) that are independent of the
    /// image of the incoming one, in order.
    pub fn default_cohomology_basis(&self) -> Vec<Vec<Vector>> {
        self.degrees()
            .map(|d| cohomology_representatives(self.dim(d), &self.differential(d - 1), &self.differential(d)))
            .collect()
    }

    /// Default lifts: unit vectors at the pivot columns of each
    /// differential, whose images are the image basis.
    pub fn default_lifts(&self) -> Vec<Vec<Vector>> {
        self.degrees()
            .map(|d| {
                let n = self.dim(d);
                column_space_analysis(&self.differential(d))
                    .pivot_columns
                    .into_iter()
                    .map(|p| unit_vector(n, p))
                    .collect()
            })
            .collect()
    }

    /// The reference element `(x)_i det(C^i)^((-1)^i)` with coordinate 1.
    pub fn reference_element(&self) -> DetElement {
        let factors = self
            .degrees()
            .map(|d| {
                let i = self.index(d).expect("degree in range");
                let g = self.dims[i] as i64;
                let inverted = d.rem_euclid(2) == 1;
                LineFactor { basis_id: self.basis_ids[i].clone(), grade: if inverted { -g } else { g }, inverted }
            })
            .collect();
        DetElement { line: GradedLine { factors }, coordinate: Rational::one() }
    }
}

pub(crate) fn cohomology_representatives(n: usize, incoming: &Matrix, outgoing: &Matrix) -> Vec<Vector> {
    let image = column_space_analysis(incoming).image_basis;
    let kernel = if outgoing.rows() == 0 {
        (0..n).map(|i| unit_vector(n, i)).collect()
    } else {
        column_space_analysis(outgoing).kernel_basis
    };
    extend_independent(n, &image, &kernel).into_iter().map(|i| kernel[i].clone()).collect()
}

/// The torsion scalar of `c` against the given cohomology representatives,
/// with default lifts.
pub fn km_scalar(c: &BasedComplex, cohomology_bases: &[Vec<Vector>]) -> Result<Rational, DetError> {
    km_scalar_with_lifts(c, cohomology_bases, &c.default_lifts())
}

/// As [`km_scalar`] with caller-chosen lifts: `lifts[i]` are vectors of
/// degree `start + i` whose images form a basis of the image of the
/// differential.
pub fn km_scalar_with_lifts(
    c: &BasedComplex,
    cohomology_bases: &[Vec<Vector>],
    lifts: &[Vec<Vector>],
) -> Result<Rational, DetError> {
    let count = c.dims.len();
    if cohomology_bases.len() != count {
        return Err(DetError::WrongCount { degree: c.start, expected: count, found: cohomology_bases.len() });
    }
    if lifts.len() != count {
        return Err(DetError::WrongCount { degree: c.start, expected: count, found: lifts.len() });
    }
    let coh_dims = c.cohomology_dims();
    let mut tau = Rational::one();
    let mut incoming: Vec<Vector> = Vec::new();
    for (i, degree) in c.degrees().enumerate() {
        let n = c.dims[i];
        let d_out = c.differential(degree);
        let h = &cohomology_bases[i];
        if h.len() != coh_dims[i] {
            return Err(DetError::WrongCount { degree, expected: coh_dims[i], found: h.len() });
        }
        for (k, v) in h.iter().enumerate() {
            if v.len() != n {
                return Err(DetError::BadLength { expected: n, found: v.len() });
            }
            if !is_zero_vector(&d_out.mul_vec(v)?) {
                return Err(DetError::NotCocycle { degree, index: k });
            }
        }
        let b = &lifts[i];
        let rank = d_out.rank();
        if b.len() != rank {
            return Err(DetError::BadLift { degree });
        }
        for v in b {
            if v.len() != n {
                return Err(DetError::BadLength { expected: n, found: v.len() });
            }
        }
        let mut cols = incoming.clone();
        cols.extend(h.iter().cloned());
        cols.extend(b.iter().cloned());
        if cols.len() != n {
            // lifts from the previous degree were not independent mod kernel
            return Err(DetError::BadLift { degree: degree - 1 });
        }
        let det = if n == 0 { Rational::one() } else { determinant(&Matrix::from_columns(n, &cols)?)? };
        if det.is_zero() {
            let lifts_ok = Matrix::from_columns(n, &incoming)?.rank() == incoming.len();
            return Err(if lifts_ok {
                DetError::NotABasis { degree }
            } else {
                DetError::BadLift { degree: degree - 1 }
            });
        }
        if degree.rem_euclid(2) == 1 {
            tau *= det;
        } else {
            tau /= det;
        }
        incoming = b.iter().map(|v| d_out.mul_vec(v)).collect::<Result<_, _>>()?;
    }
    Ok(tau)
}

/// Finite dimensional Z/2-graded complex `C^ev <-> C^od`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Z2Complex {
    even_dim: usize,
    odd_dim: usize,
    d_eo: Matrix,
    d_oe: Matrix,
}

impl Z2Complex {
    pub fn new(d_eo: Matrix, d_oe: Matrix) -> Result<Self, DetError> {
        let even_dim = d_eo.cols();
        let odd_dim = d_eo.rows();
        if d_oe.rows() != even_dim {
            return Err(LinError::DimensionMismatch { expected: even_dim, found: d_oe.rows() }.into());
        }
        if d_oe.cols() != odd_dim {
            return Err(LinError::DimensionMismatch { expected: odd_dim, found: d_oe.cols() }.into());
        }
        if !d_eo.mul(&d_oe)?.is_zero() {
            return Err(DetError::NotAComplex { degree: 1, next: 0 });
        }
        if !d_oe.mul(&d_eo)?.is_zero() {
            return Err(DetError::NotAComplex { degree: 0, next: 1 });
        }
        Ok(Z2Complex { even_dim, odd_dim, d_eo, d_oe })
    }

    pub fn even_dim(&self) -> usize {
        self.even_dim
    }

    pub fn odd_dim(&self) -> usize {
        self.odd_dim
    }

    pub fn d_eo(&self) -> &Matrix {
        &self.d_eo
    }

    pub fn d_oe(&self) -> &Matrix {
        &self.d_oe
    }

    /// `(dim H^ev, dim H^od)`.
    pub fn cohomology_dims(&self) -> (usize, usize) {
        let r_eo = self.d_eo.rank();
        let r_oe = self.d_oe.rank();
        (self.even_dim - r_eo - r_oe, self.odd_dim - r_eo - r_oe)
    }

    /// Deterministic representatives `(even, odd)`.
    pub fn default_cohomology_basis(&self) -> (Vec<Vector>, Vec<Vector>) {
        (
            cohomology_representatives(self.even_dim, &self.d_oe, &self.d_eo),
            cohomology_representatives(self.odd_dim, &self.d_eo, &self.d_oe),
        )
    }

    pub fn reference_element(&self) -> DetElement {
        DetElement {
            line: GradedLine {
                factors: alloc::vec![
                    LineFactor { basis_id: "Cev".into(), grade: self.even_dim as i64, inverted: false },
                    LineFactor { basis_id: "Cod".into(), grade: -(self.odd_dim as i64), inverted: true },
                ],
            },
            coordinate: Rational::one(),
        }
    }

    /// The four-term complex `0 -> A -> C^ev -> C^od -> C^od/B -> 0` in
    /// degrees 1..=4, with `A = im(d: C^od -> C^ev)` given the basis
    /// `a_basis` and `C^od/B` identified with `A` through `d`.
    pub fn four_term_complex(&self, a_basis: &[Vector]) -> Result<BasedComplex, DetError> {
        let k = a_basis.len();
        let a_mat = Matrix::from_columns(self.even_dim, a_basis)?;
        let proj = if k == 0 {
            Matrix::zeros(0, self.odd_dim)
        } else {
            solve_many(&a_mat, &self.d_oe)?.ok_or(DetError::BadLift { degree: 1 })?
        };
        BasedComplex::new(
            1,
            alloc::vec![k, self.even_dim, self.odd_dim, k],
            alloc::vec![a_mat, self.d_eo.clone(), proj],
        )
        .map(|c| c.with_basis_ids(alloc::vec!["A".into(), "Cev".into(), "Cod".into(), "Cod/B".into()]))
    }

    /// Default basis of `A`: the pivot columns of `d: C^od -> C^ev`.
    pub fn default_image_basis(&self) -> Vec<Vector> {
        column_space_analysis(&self.d_oe).image_basis
    }
}

/// Scalar of `det C -> det H(C)` for a Z/2-graded complex, relative to the
/// standard bases of `C^ev`, `C^od` and the supplied cohomology
/// representatives.
pub fn lemma1_scalar(z: &Z2Complex, even: &[Vector], odd: &[Vector]) -> Result<Rational, DetError> {
    lemma1_scalar_with(z, even, odd, &z.default_image_basis(), None)
}

/// As [`lemma1_scalar`], with an explicit basis of `A = im(C^od -> C^ev)`
/// and optionally explicit lifts for the four-term complex.
pub fn lemma1_scalar_with(
    z: &Z2Complex,
    even: &[Vector],
    odd: &[Vector],
    a_basis: &[Vector],
    lifts: Option<&[Vec<Vector>]>,
) -> Result<Rational, DetError> {
    let rank = z.d_oe.rank();
    if a_basis.len() != rank || Matrix::from_columns(z.even_dim, a_basis)?.rank() != rank {
        return Err(DetError::BadLift { degree: 1 });
    }
    let four = z.four_term_complex(a_basis)?;
    let bases = alloc::vec![Vec::new(), even.to_vec(), odd.to_vec(), Vec::new()];
    match lifts {
        Some(l) => km_scalar_with_lifts(&four, &bases, l),
        None => km_scalar(&four, &bases),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, ratio};
    use alloc::vec;

    fn el(coord: i64, grade: i64, id: &str) -> DetElement {
        DetElement::new(GradedLine::named(id, grade), rat(coord)).unwrap()
    }

    #[test]
    fn tensor_commutativity_sign() {
        let a = el(2, 1, "a");
        let b = el(3, 1, "b");
        let ab = tensor(&a, &b);
        assert_eq!(ab.coordinate, rat(6));
        assert_eq!(ab.grade(), 2);
        let ba = tensor(&b, &a).reorder(&ab.line.factors).unwrap();
        assert_eq!(ba.coordinate, rat(-6));
        let c = el(5, 2, "c");
        let ac = tensor(&c, &a).reorder(&tensor(&a, &c).line.factors).unwrap();
        assert_eq!(ac.coordinate, rat(10));
    }

    #[test]
    fn tensor_with_unit_and_inverse() {
        let a = el(5, 2, "a");
        let u = tensor(&a, &DetElement::unit());
        assert_eq!(u, a);
        let inv = DetElement::new(
            GradedLine { factors: vec![LineFactor { basis_id: "a".into(), grade: -2, inverted: true }] },
            ratio(1, 5),
        )
        .unwrap();
        let t = tensor(&a, &inv).contract();
        assert_eq!(t.coordinate, rat(1));
        assert_eq!(t.grade(), 0);
        assert!(t.line.factors.is_empty());
    }

    #[test]
    fn inversion() {
        let a = el(2, 3, "a");
        let i = invert(&a);
        assert_eq!(i.coordinate, ratio(1, 2));
        assert_eq!(i.grade(), -3);
        assert_eq!(invert(&i), a);
        assert_eq!(invert(&DetElement::unit()), DetElement::unit());
        let t = tensor(&a, &i).contract();
        assert_eq!((t.coordinate.clone(), t.grade()), (rat(1), 0));
    }

    #[test]
    fn zero_coordinate_rejected() {
        assert_eq!(DetElement::new(GradedLine::unit(), rat(0)), Err(DetError::ZeroCoordinate));
    }

    #[test]
    fn km_acyclic_diagonal() {
        let c = BasedComplex::new(0, vec![2, 2], vec![Matrix::diagonal(&[rat(2), rat(3)])]).unwrap();
        let tau = km_scalar(&c, &[vec![], vec![]]).unwrap();
        assert_eq!(tau, rat(6));
    }

    #[test]
    fn km_zero_differentials() {
        let c = BasedComplex::new(0, vec![2, 1, 3], vec![Matrix::zeros(1, 2), Matrix::zeros(3, 1)]).unwrap();
        let bases = c.default_cohomology_basis();
        assert_eq!(km_scalar(&c, &bases).unwrap(), rat(1));
    }

    #[test]
    fn km_odd_degree_rescaled_basis() {
        let c = BasedComplex::new(1, vec![1], vec![]).unwrap();
        assert_eq!(km_scalar(&c, &[vec![vec![rat(2)]]]).unwrap(), rat(2));
        let c0 = BasedComplex::new(0, vec![1], vec![]).unwrap();
        assert_eq!(km_scalar(&c0, &[vec![vec![rat(2)]]]).unwrap(), ratio(1, 2));
    }

    #[test]
    fn km_errors() {
        let c = BasedComplex::new(0, vec![1, 1], vec![Matrix::identity(1)]).unwrap();
        assert!(matches!(km_scalar(&c, &[vec![vec![rat(1)]], vec![]]), Err(DetError::WrongCount { .. })));
        let c = BasedComplex::new(0, vec![2, 1], vec![Matrix::from_i64(&[&[1, 0]])]).unwrap();
        assert!(matches!(
            km_scalar(&c, &[vec![vec![rat(1), rat(0)]], vec![]]),
            Err(DetError::NotCocycle { degree: 0, index: 0 })
        ));
        let c = BasedComplex::new(0, vec![2, 0], vec![Matrix::zeros(0, 2)]).unwrap();
        assert!(matches!(
            km_scalar(&c, &[vec![vec![rat(1), rat(1)], vec![rat(2), rat(2)]], vec![]]),
            Err(DetError::NotABasis { degree: 0 })
        ));
    }

    #[test]
    fn not_a_complex() {
        let one = Matrix::identity(1);
        assert!(matches!(
            BasedComplex::new(0, vec![1, 1, 1], vec![one.clone(), one]),
            Err(DetError::NotAComplex { degree: 0, next: 1 })
        ));
    }

    #[test]
    fn lemma1_trivial_and_acyclic() {
        let z = Z2Complex::new(Matrix::zeros(1, 2), Matrix::zeros(2, 1)).unwrap();
        let (e, o) = z.default_cohomology_basis();
        assert_eq!(lemma1_scalar(&z, &e, &o).unwrap(), rat(1));
        let z = Z2Complex::new(Matrix::from_i64(&[&[2]]), Matrix::zeros(1, 1)).unwrap();
        assert_eq!(lemma1_scalar(&z, &[], &[]).unwrap(), rat(2));
    }

    #[test]
    fn lemma1_independent_of_image_basis() {
        // C^ev = Q^2, C^od = Q^2, d_oe = [[0,1],[0,0]], d_eo = [[0,1],[0,0]]
        let d = Matrix::from_i64(&[&[0, 1], &[0, 0]]);
        let z = Z2Complex::new(d.clone(), d).unwrap();
        let (e, o) = z.default_cohomology_basis();
        assert_eq!((e.len(), o.len()), (0, 0));
        let base = lemma1_scalar(&z, &e, &o).unwrap();
        let scaled = vec![vec![rat(7), rat(0)]];
        assert_eq!(lemma1_scalar_with(&z, &e, &o, &scaled, None).unwrap(), base);
    }
}
