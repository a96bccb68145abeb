//! Polynomial differential forms on standard simplexes.
//!
//! A form on `Δ^q` is written in reduced coordinates `x1..xq`, with
//! `λ0 = 1 - Σ xi`. Terms are keyed by the increasing tuple of `dx`
//! indices (0-based) and the exponent vector of the monomial.
//!
//! Text grammar, used by [`PolyForm::parse`] and `Display`:
//!
//! ```text
//! form  := "0" | term (" + " term)*
//! term  := coef ("*" factor)*
//! coef  := integer | integer "/" integer
//! factor:= "x" i ("^" e)? | "dx" i ("^dx" j)*
//! ```

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactlin::{rat, Rational, Vector};
use crate::simplicial::{Cochain, OrderedComplex, Subdivision};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("forms live on simplexes of different dimension ({0} and {1})")]
    DimensionMismatch(usize, usize),
    #[error("degree {degree} form on a {dim}-simplex")]
    DegreeTooLarge { degree: usize, dim: usize },
    #[error("coefficient degree {found} exceeds the bound {bound}")]
    BoundExceeded { found: u32, bound: u32 },
    #[error("only top-degree forms can be integrated (degree {degree}, dimension {dim})")]
    NotTopDegree { degree: usize, dim: usize },
    #[error("affine map data: {0}")]
    BadAffineMap(String),
    #[error("cochain is not closed")]
    NotClosed,
    #[error("pieces are not compatible on a face of {0:?}")]
    Incompatible(Vec<usize>),
    #[error("wrong number of pieces for the complex")]
    PieceCount,
    #[error("cannot parse form: {0}")]
    Parse(String),
}

type Key = (Vec<usize>, Vec<u32>);

/// Polynomial differential form on `Δ^q`.
#[derive(Debug, Clone)]
pub struct PolyForm {
    dim: usize,
    degree: usize,
    bound: u32,
    terms: BTreeMap<Key, Rational>,
}

impl PartialEq for PolyForm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.degree == other.degree && self.terms == other.terms
    }
}

impl Eq for PolyForm {}

/// Sign of sorting `a ++ b` into increasing order, or `None` on a repeat.
fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut odd = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            if (a.len() - i) % 2 == 1 {
                odd = !odd;
            }
            out.push(b[j]);
            j += 1;
        } else {
            return None;
        }
    }
    Some((out, !odd))
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

impl PolyForm {
    pub fn zero(dim: usize, degree: usize, bound: u32) -> Self {
        PolyForm { dim, degree, bound, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut f = Self::zero(dim, 0, 0);
        f.push(Vec::new(), vec![0; dim], c);
        f
    }

    /// `c x^a dx_I` with `I` 0-based; returns zero when `I` repeats.
    pub fn monomial(dim: usize, c: Rational, exponents: &[u32], dx: &[usize]) -> Result<Self, FormError> {
        if exponents.len() != dim || dx.iter().any(|&i| i >= dim) {
            return Err(FormError::DimensionMismatch(dim, exponents.len()));
        }
        let deg: u32 = exponents.iter().sum();
        let mut f = Self::zero(dim, dx.len(), deg);
        let (sorted, even) = match sort_sign(dx) {
            Some(s) => s,
            None => return Ok(f),
        };
        f.push(sorted, exponents.to_vec(), if even { c } else { -c });
        Ok(f)
    }

    /// Coordinate function `x_i`, 1-based as in the text grammar.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut a = vec![0; dim];
        a[i - 1] = 1;
        Self::monomial(dim, rat(1), &a, &[]).expect("valid coordinate")
    }

    /// Barycentric coordinate `λ_i`, `0 <= i <= dim`.
    pub fn lambda(dim: usize, i: usize) -> Self {
        if i == 0 {
            let mut f = Self::constant(dim, rat(1));
            for k in 1..=dim {
                f = f.sub(&Self::coordinate(dim, k));
            }
            f
        } else {
            Self::coordinate(dim, i)
        }
    }

    /// Accepts a form written in barycentric coordinates: each term is a
    /// coefficient, exponents of `λ0..λq` and a list of `dλ` indices.
    pub fn from_barycentric(dim: usize, terms: &[(Rational, Vec<u32>, Vec<usize>)]) -> Result<Self, FormError> {
        let degree = terms.first().map_or(0, |t| t.2.len());
        let mut out = Self::zero(dim, degree, 0);
        for (c, exps, dl) in terms {
            if exps.len() != dim + 1 || dl.len() != degree || dl.iter().any(|&i| i > dim) {
                return Err(FormError::DimensionMismatch(dim, exps.len().saturating_sub(1)));
            }
            let mut f = Self::constant(dim, c.clone());
            for (i, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    f = f.wedge(&Self::lambda(dim, i))?;
                }
            }
            for &i in dl {
                f = f.wedge(&Self::lambda(dim, i).exterior_derivative())?;
            }
            out = out.add(&f);
        }
        Ok(out)
    }

    fn push(&mut self, dx: Vec<usize>, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (dx, exps);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The declared coefficient-degree bound.
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn with_bound(mut self, bound: u32) -> Result<Self, FormError> {
        let found = self.coefficient_degree();
        if found > bound {
            return Err(FormError::BoundExceeded { found, bound });
        }
        self.bound = bound;
        Ok(self)
    }

    /// Largest total degree of a monomial coefficient.
    pub fn coefficient_degree(&self) -> u32 {
        self.terms.keys().map(|(_, a)| a.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &[u32], &Rational)> {
        self.terms.iter().map(|((i, a), c)| (i.as_slice(), a.as_slice(), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PolyForm) -> PolyForm {
        assert_eq!((self.dim, self.degree), (other.dim, other.degree), "adding incompatible forms");
        let mut out = self.clone();
        out.bound = self.bound.max(other.bound);
        for ((i, a), c) in &other.terms {
            out.push(i.clone(), a.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyForm) -> PolyForm {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> PolyForm {
        let mut out = Self::zero(self.dim, self.degree, self.bound);
        if !s.is_zero() {
            out.terms = self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect();
        }
        out
    }

    pub fn wedge(&self, other: &PolyForm) -> Result<PolyForm, FormError> {
        if self.dim != other.dim {
            return Err(FormError::DimensionMismatch(self.dim, other.dim));
        }
        if self.degree + other.degree > self.dim {
            return Ok(Self::zero(self.dim, self.degree + other.degree, self.bound + other.bound));
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree, self.bound + other.bound);
        for ((i, a), c) in &self.terms {
            for ((j, b), e) in &other.terms {
                if let Some((k, even)) = merge_sign(i, j) {
                    let exps = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    let v = c * e;
                    out.push(k, exps, if even { v } else { -v });
                }
            }
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> PolyForm {
        let mut out = Self::zero(self.dim, self.degree + 1, self.bound);
        for ((i, a), c) in &self.terms {
            for k in 0..self.dim {
                if a[k] == 0 {
                    continue;
                }
                if let Some((dx, even)) = merge_sign(&[k], i) {
                    let mut exps = a.clone();
                    exps[k] -= 1;
                    let v = c * Rational::from_integer(a[k].into());
                    out.push(dx, exps, if even { v } else { -v });
                }
            }
        }
        out
    }

    /// Pullback along an affine map.
    pub fn pullback(&self, f: &AffineMap) -> Result<PolyForm, FormError> {
        if f.target_dim() != self.dim {
            return Err(FormError::DimensionMismatch(f.target_dim(), self.dim));
        }
        let p = f.source_dim();
        let coords: Vec<PolyForm> = (1..=self.dim).map(|i| f.coordinate_image(i)).collect();
        let diffs: Vec<PolyForm> = coords.iter().map(PolyForm::exterior_derivative).collect();
        let mut out = Self::zero(p, self.degree, self.bound);
        if self.degree > p {
            return Ok(out);
        }
        for ((i, a), c) in &self.terms {
            let mut term = Self::constant(p, c.clone());
            for (k, &e) in a.iter().enumerate() {
                for _ in 0..e {
                    term = term.wedge(&coords[k])?;
                }
            }
            for &k in i {
                term = term.wedge(&diffs[k])?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// Pullback along the face inclusion `ε^i: Δ^{q-1} -> Δ^q` omitting
    /// vertex `i`.
    pub fn face(&self, i: usize) -> PolyForm {
        let q = self.dim;
        assert!(q >= 1 && i <= q, "face index out of range");
        let mut out = Self::zero(q - 1, self.degree, self.bound);
        if self.degree > q - 1 {
            return out;
        }
        if i >= 1 {
            let k = i - 1;
            for ((dx, a), c) in &self.terms {
                if a[k] > 0 || dx.contains(&k) {
                    continue;
                }
                let mut exps = a.clone();
                exps.remove(k);
                let idx = dx.iter().map(|&j| if j > k { j - 1 } else { j }).collect();
                out.push(idx, exps, c.clone());
            }
            return out;
        }
        // x1 = 1 - Σ y, dx1 = -Σ dy, x_{k+1} = y_k
        let one_minus = {
            let mut f = Self::constant(q - 1, rat(1));
            for k in 1..q {
                f = f.sub(&Self::coordinate(q - 1, k));
            }
            f
        };
        let d_one_minus = one_minus.exterior_derivative();
        let mut powers = vec![Self::constant(q - 1, rat(1))];
        for ((dx, a), c) in &self.terms {
            while powers.len() <= a[0] as usize {
                let next = powers.last().expect("nonempty").wedge(&one_minus).expect("same dim");
                powers.push(next);
            }
            let rest: Vec<u32> = a[1..].to_vec();
            let shifted: Vec<usize> = dx.iter().filter(|&&j| j > 0).map(|&j| j - 1).collect();
            let base = Self::monomial(q - 1, c.clone(), &rest, &[]).expect("valid");
            let mut term = base.wedge(&powers[a[0] as usize]).expect("same dim");
            if dx.first() == Some(&0) {
                term = term.wedge(&d_one_minus).expect("same dim");
            }
            let tail = Self::monomial(q - 1, rat(1), &vec![0; q - 1], &shifted).expect("valid");
            out = out.add(&term.wedge(&tail).expect("same dim"));
        }
        out
    }

    /// Exact integral of a top-degree form over `Δ^q` with
    /// `dx1 ∧ … ∧ dxq` positive.
    pub fn integrate(&self) -> Result<Rational, FormError> {
        if self.degree != self.dim {
            return Err(FormError::NotTopDegree { degree: self.degree, dim: self.dim });
        }
        let q = self.dim as u32;
        let mut total = Rational::zero();
        for ((_, a), c) in &self.terms {
            let num = a.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e));
            let den = factorial(q + a.iter().sum::<u32>());
            total += c * Rational::new(num, den);
        }
        Ok(total)
    }

    /// Whitney elementary form of the face spanned by the local vertices
    /// `tau` (increasing, `0..=dim`), normalized to integrate to 1 on it.
    pub fn whitney(dim: usize, tau: &[usize]) -> PolyForm {
        let k = tau.len() - 1;
        let scale = Rational::from_integer(factorial(k as u32));
        let mut out = Self::zero(dim, k, 1);
        let dl: Vec<PolyForm> = tau.iter().map(|&i| Self::lambda(dim, i).exterior_derivative()).collect();
        for m in 0..=k {
            let mut term = Self::lambda(dim, tau[m]);
            for (n, d) in dl.iter().enumerate() {
                if n != m {
                    term = term.wedge(d).expect("same dim");
                }
            }
            let s = if m % 2 == 0 { scale.clone() } else { -scale.clone() };
            out = out.add(&term.scale(&s));
        }
        out.bound = 1;
        out
    }

    pub fn parse(dim: usize, text: &str) -> Result<PolyForm, FormError> {
        let text = text.trim();
        let bad = |s: &str| FormError::Parse(s.to_string());
        let mut out: Option<PolyForm> = None;
        if text == "0" {
            return Err(bad("bare 0 has no degree; use PolyForm::zero"));
        }
        for term in text.split(" + ") {
            let mut parts = term.trim().split('*');
            let coef = parse_rational(parts.next().ok_or_else(|| bad(term))?).ok_or_else(|| bad(term))?;
            let mut exps = vec![0u32; dim];
            let mut dx: Vec<usize> = Vec::new();
            for f in parts {
                if let Some(rest) = f.strip_prefix("dx") {
                    for g in rest.split("^dx") {
                        let i: usize = g.parse().map_err(|_| bad(f))?;
                        if i == 0 || i > dim {
                            return Err(bad(f));
                        }
                        dx.push(i - 1);
                    }
                } else if let Some(rest) = f.strip_prefix('x') {
                    let (i, e) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad(f))?),
                        None => (rest, 1),
                    };
                    let i: usize = i.parse().map_err(|_| bad(f))?;
                    if i == 0 || i > dim {
                        return Err(bad(f));
                    }
                    exps[i - 1] += e;
                } else {
                    return Err(bad(f));
                }
            }
            let m = PolyForm::monomial(dim, coef, &exps, &dx)?;
            out = Some(match out {
                None => m,
                Some(acc) if acc.degree == m.degree => acc.add(&m),
                Some(_) => return Err(bad("mixed degrees")),
            });
        }
        out.ok_or_else(|| bad(text))
    }
}

fn sort_sign(v: &[usize]) -> Option<(Vec<usize>, bool)> {
    let mut out: Vec<usize> = Vec::new();
    let mut even = true;
    for &x in v {
        let (m, e) = merge_sign(&out, &[x])?;
        out = m;
        even ^= !e;
    }
    Some((out, even))
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n.parse().ok()?, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for PolyForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((dx, a), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (k, &e) in a.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", k + 1)?,
                    _ => write!(f, "*x{}^{}", k + 1, e)?,
                }
            }
            if !dx.is_empty() {
                let names: Vec<String> = dx.iter().map(|i| format!("dx{}", i + 1)).collect();
                write!(f, "*{}", names.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Affine map `Δ^p -> Δ^q` given by the barycentric coordinates of the
/// images of the `p + 1` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineMap {
    target: usize,
    images: Vec<Vector>,
}

impl AffineMap {
    pub fn new(target: usize, images: Vec<Vector>) -> Result<Self, FormError> {
        if images.is_empty() {
            return Err(FormError::BadAffineMap("no vertices".into()));
        }
        for v in &images {
            if v.len() != target + 1 {
                return Err(FormError::BadAffineMap(format!("point has {} coordinates", v.len())));
            }
            if v.iter().sum::<Rational>() != Rational::one() {
                return Err(FormError::BadAffineMap("coordinates do not sum to 1".into()));
            }
        }
        Ok(AffineMap { target, images })
    }

    /// The simplicial map sending vertex `k` to vertex `vertices[k]`.
    pub fn vertex_map(target: usize, vertices: &[usize]) -> Result<Self, FormError> {
        let images = vertices
            .iter()
            .map(|&v| {
                if v > target {
                    return Err(FormError::BadAffineMap(format!("vertex {v}")));
                }
                Ok(crate::exactlin::unit_vector(target + 1, v))
            })
            .collect::<Result<_, _>>()?;
        Self::new(target, images)
    }

    /// The face inclusion `ε^i`.
    pub fn face(q: usize, i: usize) -> Self {
        let verts: Vec<usize> = (0..=q).filter(|&v| v != i).collect();
        Self::vertex_map(q, &verts).expect("valid face")
    }

    pub fn source_dim(&self) -> usize {
        self.images.len() - 1
    }

    pub fn target_dim(&self) -> usize {
        self.target
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &AffineMap) -> Result<AffineMap, FormError> {
        if first.target != self.source_dim() {
            return Err(FormError::DimensionMismatch(first.target, self.source_dim()));
        }
        let images = first
            .images
            .iter()
            .map(|w| (0..=self.target).map(|i| w.iter().zip(&self.images).map(|(a, v)| a * &v[i]).sum()).collect())
            .collect();
        Ok(AffineMap { target: self.target, images })
    }

    /// Pullback of the coordinate `x_i` (1-based): an affine function.
    fn coordinate_image(&self, i: usize) -> PolyForm {
        let p = self.source_dim();
        let base = self.images[0][i].clone();
        let mut f = PolyForm::constant(p, base.clone());
        for k in 1..=p {
            let slope = &self.images[k][i] - &base;
            f = f.add(&PolyForm::coordinate(p, k).scale(&slope));
        }
        f.bound = 1;
        f
    }
}

/// Compatible family of forms, one per simplex of every dimension at least
/// the degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseForm {
    degree: usize,
    pieces: Vec<Vec<PolyForm>>,
}

impl PiecewiseForm {
    /// `pieces[q][n]` is the form on the `n`-th `q`-simplex; entries below
    /// the degree are ignored.
    pub fn new(k: &OrderedComplex, degree: usize, pieces: Vec<Vec<PolyForm>>) -> Result<Self, FormError> {
        if pieces.len() != k.dimension() + 1 {
            return Err(FormError::PieceCount);
        }
        let mut pieces = pieces;
        for q in 0..pieces.len() {
            if q < degree {
                pieces[q] = Vec::new();
                continue;
            }
            if pieces[q].len() != k.count(q) {
                return Err(FormError::PieceCount);
            }
            if pieces[q].iter().any(|f| f.dim() != q || f.degree() != degree) {
                return Err(FormError::PieceCount);
            }
        }
        let out = PiecewiseForm { degree, pieces };
        out.check_compatible(k)?;
        Ok(out)
    }

    pub fn zero(k: &OrderedComplex, degree: usize) -> Self {
        let pieces = (0..=k.dimension())
            .map(|q| if q < degree { Vec::new() } else { vec![PolyForm::zero(q, degree, 0); k.count(q)] })
            .collect();
        PiecewiseForm { degree, pieces }
    }

    pub fn constant(k: &OrderedComplex, c: Rational) -> Self {
        let pieces = (0..=k.dimension()).map(|q| vec![PolyForm::constant(q, c.clone()); k.count(q)]).collect();
        PiecewiseForm { degree: 0, pieces }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Form on the `index`-th simplex of dimension `q`.
    pub fn piece(&self, q: usize, index: usize) -> Option<&PolyForm> {
        self.pieces.get(q)?.get(index)
    }

    pub fn piece_on(&self, k: &OrderedComplex, s: &[usize]) -> Option<&PolyForm> {
        self.piece(s.len() - 1, k.index_of(s)?)
    }

    pub fn pieces(&self) -> &[Vec<PolyForm>] {
        &self.pieces
    }

    pub fn coefficient_degree(&self) -> u32 {
        self.pieces.iter().flatten().map(PolyForm::coefficient_degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().flatten().all(PolyForm::is_zero)
    }

    /// `φ_{ε_i σ} = (ε^i)* φ_σ` on every face.
    pub fn check_compatible(&self, k: &OrderedComplex) -> Result<(), FormError> {
        for q in (self.degree + 1)..self.pieces.len() {
            for (n, s) in k.simplices(q).iter().enumerate() {
                for i in 0..=q {
                    let f = crate::simplicial::face(s, i);
                    let j = k.index_of(&f).expect("closed under faces");
                    if self.pieces[q][n].face(i) != self.pieces[q - 1][j] {
                        return Err(FormError::Incompatible(s.clone()));
                    }
                }
            }
        }
        Ok(())
    }

    fn map_pieces(&self, degree: usize, f: impl Fn(usize, usize, &PolyForm) -> PolyForm) -> PiecewiseForm {
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(
                |(q, list)| {
                    if q < degree {
                        Vec::new()
                    } else {
                        list.iter().enumerate().map(|(n, p)| f(q, n, p)).collect()
                    }
                },
            )
            .collect();
        PiecewiseForm { degree, pieces }
    }

    pub fn add(&self, other: &PiecewiseForm) -> PiecewiseForm {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        self.map_pieces(self.degree, |q, n, p| p.add(&other.pieces[q][n]))
    }

    pub fn scale(&self, s: &Rational) -> PiecewiseForm {
        self.map_pieces(self.degree, |_, _, p| p.scale(s))
    }

    pub fn exterior_derivative(&self) -> PiecewiseForm {
        self.map_pieces(self.degree + 1, |_, _, p| p.exterior_derivative())
    }

    pub fn wedge(&self, other: &PiecewiseForm) -> PiecewiseForm {
        let degree = self.degree + other.degree;
        self.map_pieces(degree, |q, n, p| p.wedge(&other.pieces[q][n]).expect("same simplex"))
    }

    /// `σ ↦ ∫_σ φ_σ` on simplexes of dimension equal to the degree.
    pub fn integration_map(&self, k: &OrderedComplex) -> Cochain {
        let q = self.degree;
        let values = match self.pieces.get(q) {
            Some(list) => list.iter().map(|p| p.integrate().expect("top degree")).collect(),
            None => Vec::new(),
        };
        let values = if values.is_empty() { crate::exactlin::zero_vector(k.count(q)) } else { values };
        Cochain { degree: q, values }
    }

    /// `Σ_τ ϑ(τ) ω_τ` for a closed cochain `ϑ`.
    pub fn whitney_lift(k: &OrderedComplex, theta: &Cochain) -> Result<PiecewiseForm, FormError> {
        theta.check(k).map_err(|_| FormError::PieceCount)?;
        if !theta.is_closed(k) {
            return Err(FormError::NotClosed);
        }
        let out = Self::whitney_map(k, theta);
        debug_assert!(out.exterior_derivative().is_zero());
        Ok(out)
    }

    /// The Whitney map on an arbitrary cochain.
    pub fn whitney_map(k: &OrderedComplex, theta: &Cochain) -> PiecewiseForm {
        let r = theta.degree;
        let mut out = Self::zero(k, r);
        for q in r..=k.dimension() {
            for (n, s) in k.simplices(q).iter().enumerate() {
                let mut form = PolyForm::zero(q, r, 1);
                for_each_subset(q + 1, r + 1, &mut |local: &[usize]| {
                    let tau: Vec<usize> = local.iter().map(|&i| s[i]).collect();
                    let c = theta.value(k, &tau);
                    if !c.is_zero() {
                        form = form.add(&PolyForm::whitney(q, local).scale(&c));
                    }
                });
                out.pieces[q][n] = form;
            }
        }
        out
    }

    /// Pullback along each new simplex's affine inclusion into its carrier.
    pub fn restrict_subdivision(&self, k: &OrderedComplex, sub: &Subdivision) -> Result<PiecewiseForm, FormError> {
        let kp = &sub.complex;
        let mut out = Self::zero(kp, self.degree);
        for q in self.degree..=kp.dimension() {
            for (n, s) in kp.simplices(q).iter().enumerate() {
                let carrier = sub.carrier(s);
                let phi = self.piece_on(k, &carrier).ok_or(FormError::Incompatible(carrier.clone()))?;
                let map = AffineMap::new(carrier.len() - 1, sub.affine_data(s))?;
                out.pieces[q][n] = phi.pullback(&map)?;
            }
        }
        Ok(out)
    }
}

/// Calls `f` on every increasing `size`-subset of `0..n`.
pub fn for_each_subset(n: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < size - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, size, cur, f);
            cur.pop();
        }
    }
    go(0, n, size, &mut Vec::new(), f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;
    use crate::simplicial::{barycentric_subdivision, chain_complex};

    fn p(dim: usize, s: &str) -> PolyForm {
        PolyForm::parse(dim, s).unwrap()
    }

    #[test]
    fn wedge_signs() {
        let dx1 = p(2, "1*dx1");
        let dx2 = p(2, "1*dx2");
        assert_eq!(dx1.wedge(&dx2).unwrap(), dx2.wedge(&dx1).unwrap().scale(&rat(-1)));
        let a = p(2, "1*x1*dx2");
        let b = p(2, "1*x2*dx1");
        assert_eq!(a.wedge(&b).unwrap(), p(2, "-1*x1*x2*dx1^dx2"));
        assert_eq!(PolyForm::constant(2, rat(1)).wedge(&a).unwrap(), a);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(PolyForm::coordinate(2, 1).exterior_derivative(), p(2, "1*dx1"));
        assert!(p(2, "1*x1*dx2 + 1*x2*dx1").exterior_derivative().is_zero());
        // λ0 dλ1 - λ1 dλ0 on Δ^2 is (1 - x2) dx1 + x1 dx2, with d = -2 dx1^dx2
        let w = PolyForm::whitney(2, &[0, 1]);
        assert_eq!(w, p(2, "1*dx1 + -1*x2*dx1 + 1*x1*dx2"));
        assert_eq!(w.exterior_derivative(), p(2, "2*dx1^dx2"));
    }

    #[test]
    fn integrals() {
        assert_eq!(p(1, "1*dx1").integrate().unwrap(), rat(1));
        assert_eq!(p(2, "1*dx1^dx2").integrate().unwrap(), ratio(1, 2));
        assert_eq!(p(2, "1*x1*dx1^dx2").integrate().unwrap(), ratio(1, 6));
        assert!(p(2, "1*dx1").integrate().is_err());
    }

    #[test]
    fn face_pullbacks() {
        // ε^0: Δ^1 -> Δ^2 sends y to (1 - y, y), so dx2 pulls back to dy
        let f = p(2, "1*dx2");
        assert_eq!(f.face(0), p(1, "1*dx1"));
        assert_eq!(p(2, "1*dx1").face(0), p(1, "-1*dx1"));
        for i in 0..=2 {
            let g = p(2, "3*x1^2*x2*dx1 + -1*x2*dx2");
            assert_eq!(g.face(i), g.pullback(&AffineMap::face(2, i)).unwrap(), "face {i}");
        }
        let c = AffineMap::vertex_map(2, &[1, 1]).unwrap();
        assert!(p(2, "1*dx1 + 5*x2*dx2").pullback(&c).unwrap().is_zero());
    }

    #[test]
    fn top_whitney_form_is_constant() {
        assert_eq!(PolyForm::whitney(3, &[0, 1, 2, 3]), p(3, "6*dx1^dx2^dx3"));
        for q in 1..=3 {
            let all: Vec<usize> = (0..=q).collect();
            assert_eq!(PolyForm::whitney(q, &all).integrate().unwrap(), rat(1));
        }
    }

    #[test]
    fn barycentric_input_normalized() {
        let f =
            PolyForm::from_barycentric(1, &[(rat(1), vec![1, 0], vec![1]), (rat(-1), vec![0, 1], vec![0])]).unwrap();
        assert_eq!(f, p(1, "1*dx1"));
    }

    #[test]
    fn display_round_trip() {
        let f = p(3, "-3/2*x1^2*x3*dx1^dx2 + 1*dx2^dx3");
        assert_eq!(PolyForm::parse(3, &f.to_string()).unwrap(), f);
    }

    #[test]
    fn whitney_round_trip_on_sphere() {
        let k = OrderedComplex::simplex_boundary(4);
        let theta = k.orientation_cocycle().unwrap();
        let t = PiecewiseForm::whitney_lift(&k, &theta).unwrap();
        assert!(t.exterior_derivative().is_zero());
        assert_eq!(t.integration_map(&k), theta);
        t.check_compatible(&k).unwrap();
    }

    #[test]
    fn subdivided_edge() {
        let k = OrderedComplex::simplex(1);
        let sd = barycentric_subdivision(&k);
        let theta = Cochain { degree: 1, values: vec![rat(1)] };
        let t = PiecewiseForm::whitney_lift(&k, &theta).unwrap();
        let r = t.restrict_subdivision(&k, &sd).unwrap();
        let c = r.integration_map(&sd.complex);
        assert_eq!(c.values.iter().map(crate::exactlin::abs).collect::<Vec<_>>(), vec![ratio(1, 2); 2]);
        let total: Rational = sd.chain_map(&k, 1).column(0).iter().zip(&c.values).map(|(a, b)| a * b).sum();
        assert_eq!(total, rat(1));
        let _ = chain_complex(&sd.complex);
    }
}
