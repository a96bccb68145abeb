//! Truncated windows of the Dupont current complex.
//!
//! `Du_n(K)` is spanned by `ω ⊗ σ` with `σ` a simplex of dimension `n + j`
//! and `ω` a `j`-form on `Δ^{n+j}`. A window keeps the monomial forms
//! `x^a dx_I` of weight `|a| + |I|` at most a per-degree level; weight is
//! not increased by `∂`, so each truncation is a subcomplex.
//!
//! Windows are chain-side: twisted coefficients enter through `ρ^T` on the
//! zeroth face, which makes the linear dual the cochain convention used by
//! [`crate::simplicial::twisted_coboundary`]. Twisted cohomology dimensions
//! are read off from ladder homology of `∂_t = ∂ + t·`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::exactlin::{column_space_analysis, LinError, Rational, SparseMatrix};
use crate::forms::{FormError, PiecewiseForm, PolyForm};
use crate::simplicial::{
    face, twisted_coboundary, OrderedComplex, Pi1Presentation, Representation, Simplex, SimplicialError, SimplicialMap,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DupontError {
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error("twisting form is not closed")]
    NotClosed,
    #[error("twisting form has a component of even degree {0}")]
    EvenComponent(usize),
    #[error("twisting form has a component of degree {0} < 3")]
    LowDegree(usize),
    #[error("boundary does not square to zero in degree {0}")]
    NotSquareZero(usize),
    #[error("t-action does not anticommute with the boundary in degree {0}")]
    NotAnticommuting(usize),
    #[error("map is not injective and order preserving on simplexes")]
    NotInjective,
    #[error("element parts have inconsistent degrees")]
    BadElement,
    #[error("no two consecutive levels up to {max_level} agree")]
    NotStabilized { max_level: u32 },
}

/// Finite sum of `ω ⊗ σ` in a fixed degree `n`, untwisted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DupontElement {
    degree: usize,
    parts: BTreeMap<Simplex, PolyForm>,
}

impl DupontElement {
    pub fn zero(degree: usize) -> Self {
        DupontElement { degree, parts: BTreeMap::new() }
    }

    /// `ω ⊗ σ`; `ω` must have degree `dim σ - n`.
    pub fn single(degree: usize, sigma: Simplex, omega: PolyForm) -> Result<Self, DupontError> {
        let mut x = Self::zero(degree);
        x.insert(sigma, omega)?;
        Ok(x)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn parts(&self) -> impl Iterator<Item = (&Simplex, &PolyForm)> {
        self.parts.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn insert(&mut self, sigma: Simplex, omega: PolyForm) -> Result<(), DupontError> {
        let q = sigma.len() - 1;
        if omega.dim() != q || omega.degree() + self.degree != q {
            return Err(DupontError::BadElement);
        }
        if omega.is_zero() {
            return Ok(());
        }
        let sum = match self.parts.remove(&sigma) {
            Some(old) => old.add(&omega),
            None => omega,
        };
        if !sum.is_zero() {
            self.parts.insert(sigma, sum);
        }
        Ok(())
    }

    pub fn add(&self, other: &DupontElement) -> DupontElement {
        assert_eq!(self.degree, other.degree, "adding currents of different degree");
        let mut out = self.clone();
        for (s, w) in &other.parts {
            out.insert(s.clone(), w.clone()).expect("same degree");
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> DupontElement {
        let mut out = Self::zero(self.degree);
        if !c.is_zero() {
            out.parts = self.parts.iter().map(|(s, w)| (s.clone(), w.scale(c))).collect();
        }
        out
    }

    /// Largest weight `coefficient degree + form degree` of a term.
    pub fn weight(&self) -> u32 {
        self.parts
            .values()
            .flat_map(|w| w.terms().map(|(i, a, _)| i.len() as u32 + a.iter().sum::<u32>()))
            .max()
            .unwrap_or(0)
    }
}

/// Terms of `∂_n(ω ⊗ σ) = (-1)^n dω ⊗ σ + Σ_i (-1)^i (ε^i)*ω ⊗ ε_i σ`,
/// tagged with the face index (`None` for the `dω` term).
fn boundary_terms(sigma: &[usize], omega: &PolyForm, n: usize) -> Vec<(Option<usize>, Simplex, PolyForm)> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let q = sigma.len() - 1;
    let dw = omega.exterior_derivative();
    if !dw.is_zero() {
        let s =
            if n.is_multiple_of(2) { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        out.push((None, sigma.to_vec(), dw.scale(&s)));
    }
    for i in 0..=q {
        let f = omega.face(i);
        if f.is_zero() {
            continue;
        }
        let f = if i % 2 == 0 { f } else { f.scale(&Rational::from_integer((-1).into())) };
        out.push((Some(i), face(sigma, i), f));
    }
    out
}

pub fn dupont_boundary(x: &DupontElement) -> DupontElement {
    let n = x.degree;
    let mut out = DupontElement::zero(n.saturating_sub(1));
    for (sigma, omega) in &x.parts {
        for (_, s, w) in boundary_terms(sigma, omega, n) {
            out.insert(s, w).expect("boundary degree");
        }
    }
    out
}

/// Sign making `φ·(ω⊗σ) = ±(φ_σ ∧ ω)⊗σ` a dg-module action.
pub fn action_sign(form_degree: usize, n: usize) -> bool {
    let k = form_degree;
    (k * n + k * k.saturating_sub(1) / 2).is_multiple_of(2)
}

/// `φ·(ω⊗σ) = (-1)^{kn + k(k-1)/2} (φ_σ ∧ ω) ⊗ σ`.
pub fn module_action(k: &OrderedComplex, phi: &PiecewiseForm, x: &DupontElement) -> Result<DupontElement, DupontError> {
    let deg = phi.degree();
    let n = x.degree;
    if deg > n {
        return Ok(DupontElement::zero(0));
    }
    let mut out = DupontElement::zero(n - deg);
    let sign = if action_sign(deg, n) { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
    for (sigma, omega) in &x.parts {
        let p = phi.piece_on(k, sigma).ok_or(DupontError::BadElement)?;
        out.insert(sigma.clone(), p.wedge(omega)?.scale(&sign))?;
    }
    Ok(out)
}

/// `σ ↦ 1 ⊗ σ` on a chain of dimension `n`.
pub fn psi(k: &OrderedComplex, n: usize, chain: &[Rational]) -> DupontElement {
    let mut out = DupontElement::zero(n);
    for (s, c) in k.simplices(n).iter().zip(chain) {
        out.insert(s.clone(), PolyForm::constant(n, c.clone())).expect("degree 0 form");
    }
    out
}

/// Basis element `x^a dx_I ⊗ σ` of a window.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct BasisElement {
    pub simplex: Simplex,
    pub dx: Vec<usize>,
    pub exponents: Vec<u32>,
}

impl BasisElement {
    pub fn weight(&self) -> u32 {
        self.dx.len() as u32 + self.exponents.iter().sum::<u32>()
    }

    pub fn form_degree(&self) -> usize {
        self.dx.len()
    }
}

fn exponent_vectors(vars: usize, max_total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; vars];
    fn go(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            go(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    go(0, max_total, &mut cur, &mut out);
    out.sort();
    out
}

/// Monomial basis of `Du_n` up to weight `level`, ordered by simplex
/// (lexicographic on vertex tuples), then `dx` tuple, then exponents.
pub fn window_basis(k: &OrderedComplex, n: usize, level: u32) -> Vec<BasisElement> {
    let mut out = Vec::new();
    for q in n..=k.dimension() {
        let j = q - n;
        if (j as u32) > level {
            continue;
        }
        let exps = exponent_vectors(q, level - j as u32);
        let mut dxs = Vec::new();
        crate::forms::for_each_subset(q, j, &mut |s: &[usize]| dxs.push(s.to_vec()));
        for s in k.simplices(q) {
            for i in &dxs {
                for a in &exps {
                    out.push(BasisElement { simplex: s.clone(), dx: i.clone(), exponents: a.clone() });
                }
            }
        }
    }
    out.sort();
    out
}

/// One homogeneous component of the acting form and its matrices.
#[derive(Debug, Clone)]
pub struct TwistAction {
    pub form_degree: usize,
    /// Largest weight of a term of the form.
    pub shift: u32,
    /// `maps[n]`: `Du_n -> Du_{n - form_degree}`, empty below the degree.
    pub maps: Vec<Option<SparseMatrix>>,
}

/// Chain-side window `Du^{≤L(n)}_n(K) ⊗ Q^d` with its boundary and
/// t-action matrices.
#[derive(Debug, Clone)]
pub struct DupontWindow {
    top: usize,
    rep_dim: usize,
    levels: Vec<u32>,
    bases: Vec<Vec<BasisElement>>,
    lookup: Vec<BTreeMap<BasisElement, usize>>,
    /// `boundary[n]`: `Du_n -> Du_{n-1}`; `boundary[0]` has no rows.
    boundary: Vec<SparseMatrix>,
    actions: Vec<TwistAction>,
}

/// Checks that every component is closed, odd and of degree at least 3.
pub fn check_twist(k: &OrderedComplex, t: &[PiecewiseForm]) -> Result<(), DupontError> {
    for c in t {
        if c.degree() % 2 == 0 {
            return Err(DupontError::EvenComponent(c.degree()));
        }
        if c.degree() < 3 {
            return Err(DupontError::LowDegree(c.degree()));
        }
        c.check_compatible(k)?;
        if !c.exterior_derivative().is_zero() {
            return Err(DupontError::NotClosed);
        }
    }
    Ok(())
}

fn shift_of(c: &PiecewiseForm) -> u32 {
    c.degree() as u32 + c.coefficient_degree()
}

/// `(degree, offset)` of each block of an assembled parity matrix.
type Offsets = Vec<(usize, usize)>;

impl DupontWindow {
    /// Builds a window with at least the requested level in each degree,
    /// raised so that boundary and t-action images stay inside.
    pub fn build(
        k: &OrderedComplex,
        p: &Pi1Presentation,
        rho: &Representation,
        t: &[PiecewiseForm],
        requested: &[u32],
    ) -> Result<Self, DupontError> {
        check_twist(k, t)?;
        let top = k.dimension();
        let mut levels: Vec<u32> = (0..=top).map(|n| requested.get(n).copied().unwrap_or(0)).collect();
        for n in (1..=top).rev() {
            levels[n - 1] = levels[n - 1].max(levels[n]);
            for c in t {
                let kd = c.degree();
                if n >= kd {
                    levels[n - kd] = levels[n - kd].max(levels[n] + shift_of(c));
                }
            }
        }
        let bases: Vec<Vec<BasisElement>> = (0..=top).map(|n| window_basis(k, n, levels[n])).collect();
        let lookup = bases.iter().map(|b| b.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()).collect();
        let mut w =
            DupontWindow { top, rep_dim: rho.dim(), levels, bases, lookup, boundary: Vec::new(), actions: Vec::new() };
        w.boundary = (0..=top).map(|n| w.boundary_matrix(p, rho, n)).collect();
        w.actions = t
            .iter()
            .map(|c| TwistAction {
                form_degree: c.degree(),
                shift: shift_of(c),
                maps: (0..=top).map(|n| (n >= c.degree()).then(|| w.action_matrix(k, c, n))).collect(),
            })
            .collect();
        w.validate()?;
        Ok(w)
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn rep_dim(&self) -> usize {
        self.rep_dim
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn basis(&self, n: usize) -> &[BasisElement] {
        &self.bases[n]
    }

    /// Dimension of the degree-`n` space including coefficients.
    pub fn dim(&self, n: usize) -> usize {
        self.bases[n].len() * self.rep_dim
    }

    pub fn boundary(&self, n: usize) -> &SparseMatrix {
        &self.boundary[n]
    }

    pub fn actions(&self) -> &[TwistAction] {
        &self.actions
    }

    /// Weight of every coordinate of degree `n`.
    pub fn weights(&self, n: usize) -> Vec<u32> {
        self.bases[n].iter().flat_map(|b| core::iter::repeat_n(b.weight(), self.rep_dim)).collect()
    }

    pub fn index_of(&self, n: usize, e: &BasisElement) -> Option<usize> {
        self.lookup[n].get(e).copied()
    }

    fn form_coordinates(&self, n: usize, sigma: &Simplex, w: &PolyForm, out: &mut Vec<(usize, Rational)>) {
        for (i, a, c) in w.terms() {
            let e = BasisElement { simplex: sigma.clone(), dx: i.to_vec(), exponents: a.to_vec() };
            let idx = self.lookup[n].get(&e).copied().expect("window is closed under the differential");
            out.push((idx, c.clone()));
        }
    }

    fn basis_form(e: &BasisElement) -> PolyForm {
        let q = e.simplex.len() - 1;
        PolyForm::monomial(q, Rational::from_integer(1.into()), &e.exponents, &e.dx).expect("valid basis element")
    }

    fn boundary_matrix(&self, p: &Pi1Presentation, rho: &Representation, n: usize) -> SparseMatrix {
        let d = self.rep_dim;
        if n == 0 {
            return SparseMatrix::zeros(0, self.dim(0));
        }
        let mut trip = Vec::new();
        for (col, e) in self.bases[n].iter().enumerate() {
            let omega = Self::basis_form(e);
            let h = (e.simplex.len() > 1).then(|| rho.holonomy_matrix(p, e.simplex[0], e.simplex[1]));
            for (tag, s, w) in boundary_terms(&e.simplex, &omega, n) {
                let mut coords = Vec::new();
                self.form_coordinates(n - 1, &s, &w, &mut coords);
                for (row, c) in coords {
                    for a in 0..d {
                        if tag == Some(0) {
                            let h = h.as_ref().expect("positive dimension");
                            for b in 0..d {
                                let x = &h[(a, b)];
                                if !x.is_zero() {
                                    trip.push((row * d + b, col * d + a, &c * x));
                                }
                            }
                        } else {
                            trip.push((row * d + a, col * d + a, c.clone()));
                        }
                    }
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(n - 1), self.dim(n), trip)
    }

    fn action_matrix(&self, k: &OrderedComplex, t: &PiecewiseForm, n: usize) -> SparseMatrix {
        let d = self.rep_dim;
        let kd = t.degree();
        let sign =
            if action_sign(kd, n) { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
        let mut trip = Vec::new();
        for (col, e) in self.bases[n].iter().enumerate() {
            let piece = t.piece_on(k, &e.simplex).expect("simplex of the complex");
            if piece.is_zero() {
                continue;
            }
            let w = piece.wedge(&Self::basis_form(e)).expect("same simplex").scale(&sign);
            let mut coords = Vec::new();
            self.form_coordinates(n - kd, &e.simplex, &w, &mut coords);
            for (row, c) in coords {
                for a in 0..d {
                    trip.push((row * d + a, col * d + a, c.clone()));
                }
            }
        }
        SparseMatrix::from_triplets(self.dim(n - kd), self.dim(n), trip)
    }

    fn validate(&self) -> Result<(), DupontError> {
        for n in 2..=self.top {
            if !self.boundary[n - 1].mul(&self.boundary[n])?.is_zero() {
                return Err(DupontError::NotSquareZero(n));
            }
        }
        for a in &self.actions {
            let kd = a.form_degree;
            for n in kd..=self.top {
                let t = a.maps[n].as_ref().expect("defined above the degree");
                let mut sum =
                    if n - kd >= 1 { self.boundary[n - kd].mul(t)? } else { SparseMatrix::zeros(0, self.dim(n)) };
                if n > kd {
                    let t_low = a.maps[n - 1].as_ref().expect("defined above the degree");
                    sum = sum.add(&t_low.mul(&self.boundary[n])?)?;
                }
                if !sum.is_zero() {
                    return Err(DupontError::NotAnticommuting(n));
                }
            }
        }
        Ok(())
    }

    /// Coordinates of a scalar current in degree `n` (first coefficient
    /// slot).
    pub fn coordinates(&self, x: &DupontElement) -> Vec<(usize, Rational)> {
        let mut out = Vec::new();
        for (s, w) in &x.parts {
            self.form_coordinates(x.degree, s, w, &mut out);
        }
        out.into_iter().map(|(i, c)| (i * self.rep_dim, c)).collect()
    }

    /// Matrix of `ψ: C_n(K) ⊗ Q^d -> Du_n`.
    pub fn psi_matrix(&self, k: &OrderedComplex, n: usize) -> SparseMatrix {
        let d = self.rep_dim;
        let mut trip = Vec::new();
        for (j, s) in k.simplices(n).iter().enumerate() {
            let e = BasisElement { simplex: s.clone(), dx: Vec::new(), exponents: vec![0; n] };
            let row = self.lookup[n][&e];
            for a in 0..d {
                trip.push((row * d + a, j * d + a, Rational::from_integer(1.into())));
            }
        }
        SparseMatrix::from_triplets(self.dim(n), k.count(n) * d, trip)
    }

    /// Evaluation of a dual element of degree `n` on the `1 ⊗ σ`
    /// sub-basis: the twisted cochain `σ ↦ f(1 ⊗ σ)`.
    pub fn psi_star(&self, k: &OrderedComplex, n: usize, f: &[Rational]) -> Vec<Rational> {
        let d = self.rep_dim;
        let mut out = Vec::with_capacity(k.count(n) * d);
        for s in k.simplices(n) {
            let e = BasisElement { simplex: s.clone(), dx: Vec::new(), exponents: vec![0; n] };
            let row = self.lookup[n][&e];
            out.extend_from_slice(&f[row * d..row * d + d]);
        }
        out
    }

    /// Transpose of the boundary: the cochain-side differential
    /// `Hom(Du_n) -> Hom(Du_{n+1})`.
    pub fn dual_differential(&self, n: usize) -> SparseMatrix {
        self.boundary[n + 1].transpose()
    }

    fn columns_up_to(&self, n: usize, level: u32) -> Vec<usize> {
        self.weights(n).iter().enumerate().filter(|&(_, &w)| w <= level).map(|(i, _)| i).collect()
    }

    /// Untwisted homology dims of the level-`level` truncation.
    pub fn homology_dims(&self, level: u32) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.top)
            .map(|n| if n == 0 { 0 } else { self.boundary[n].select_columns(&self.columns_up_to(n, level)).rank() })
            .collect();
        (0..=self.top)
            .map(|n| {
                let up = if n < self.top { ranks[n + 1] } else { 0 };
                self.columns_up_to(n, level).len() - ranks[n] - up
            })
            .collect()
    }

    /// `ψ` induces an isomorphism `H_n(C(K;E)) -> H_n(Du^{≤level})` in
    /// every degree.
    pub fn psi_is_quasi_isomorphism(
        &self,
        k: &OrderedComplex,
        p: &Pi1Presentation,
        rho: &Representation,
        level: u32,
    ) -> bool {
        let dims = self.homology_dims(level);
        for n in 0..=self.top {
            let d_in = if n == 0 {
                crate::exactlin::Matrix::zeros(0, k.count(0) * self.rep_dim)
            } else {
                twisted_coboundary(k, p, rho, n - 1).transpose()
            };
            let cycles = column_space_analysis(&d_in).kernel_basis;
            let bounds = if n < self.top {
                column_space_analysis(&twisted_coboundary(k, p, rho, n).transpose()).image_basis
            } else {
                Vec::new()
            };
            let pick = crate::exactlin::extend_independent(k.count(n) * self.rep_dim, &bounds, &cycles);
            if pick.len() != dims[n] {
                return false;
            }
            let psi = self.psi_matrix(k, n);
            let reps: Vec<Vec<(usize, Rational)>> = pick
                .iter()
                .map(|&i| {
                    let v = psi.mul_vec(&cycles[i]).expect("shape");
                    v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
                })
                .collect();
            let b = if n < self.top {
                self.boundary[n + 1].select_columns(&self.columns_up_to(n + 1, level))
            } else {
                SparseMatrix::zeros(self.dim(n), 0)
            };
            let rb = b.rank();
            let extra = SparseMatrix::from_triplets(
                self.dim(n),
                reps.len(),
                reps.iter().enumerate().flat_map(|(j, col)| col.iter().map(move |(r, c)| (*r, j, c.clone()))),
            );
            if b.hstack(&extra).expect("same rows").rank() - rb != reps.len() {
                return false;
            }
        }
        true
    }

    /// Assembled `∂_t` from the degrees of one parity to the other.
    fn parity_matrix(&self, source_even: bool) -> (SparseMatrix, Offsets, Offsets) {
        let src: Vec<usize> = (0..=self.top).filter(|n| (n % 2 == 0) == source_even).collect();
        let dst: Vec<usize> = (0..=self.top).filter(|n| (n % 2 == 0) != source_even).collect();
        let mut col_off = BTreeMap::new();
        let mut row_off = BTreeMap::new();
        let (mut c, mut r) = (0, 0);
        let mut cols = Vec::new();
        let mut rows = Vec::new();
        for &n in &src {
            col_off.insert(n, c);
            cols.push((n, c));
            c += self.dim(n);
        }
        for &n in &dst {
            row_off.insert(n, r);
            rows.push((n, r));
            r += self.dim(n);
        }
        let mut trip = Vec::new();
        let mut add = |m: &SparseMatrix, from: usize, to: usize| {
            let (co, ro) = (col_off[&from], row_off[&to]);
            for j in 0..m.cols() {
                for (i, v) in m.column(j) {
                    trip.push((ro + i, co + j, v.clone()));
                }
            }
        };
        for &n in &src {
            if n >= 1 {
                add(&self.boundary[n], n, n - 1);
            }
            for a in &self.actions {
                if let Some(Some(m)) = a.maps.get(n) {
                    add(m, n, n - a.form_degree);
                }
            }
        }
        (SparseMatrix::from_triplets(r, c, trip), cols, rows)
    }

    /// Source levels that provably saturate the boundaries meeting level
    /// `target`: `L(n) = max(target, L(n - 1 + k) + s_k)`.
    pub fn source_levels(top: usize, shifts: &[(usize, u32)], target: u32) -> Vec<u32> {
        let mut l = vec![target; top + 1];
        for n in (1..=top).rev() {
            for &(kd, s) in shifts {
                if n - 1 + kd <= top {
                    l[n] = l[n].max(l[n - 1 + kd] + s);
                }
            }
        }
        l
    }

    fn shifts(&self) -> Vec<(usize, u32)> {
        self.actions
            .iter()
            .filter(|a| a.maps.iter().flatten().any(|m| !m.is_zero()))
            .map(|a| (a.form_degree, a.shift))
            .collect()
    }

    /// Ladder homology `ker ∂_t|F_D / (im ∂_t ∩ F_D)` in each parity.
    pub fn ladder_dims(&self, target: u32) -> LadderLevel {
        let src_levels = Self::source_levels(self.top, &self.shifts(), target);
        let mut out = [0usize; 2];
        let mut saturated = true;
        for (slot, even) in [(0usize, true), (1, false)] {
            let (m, cols, _) = self.parity_matrix(even);
            let mut zc = Vec::new();
            for &(n, off) in &cols {
                zc.extend(self.columns_up_to(n, target).into_iter().map(|i| i + off));
            }
            let dim_z = zc.len() - m.select_columns(&zc).rank();
            let (mo, ocols, orows) = self.parity_matrix(!even);
            let mut sc = Vec::new();
            for &(n, off) in &ocols {
                if n == 0 {
                    continue;
                }
                if src_levels[n] > self.levels[n] {
                    saturated = false;
                }
                sc.extend(self.columns_up_to(n, src_levels[n]).into_iter().map(|i| i + off));
            }
            let restricted = mo.select_columns(&sc);
            let mut outside = vec![false; mo.rows()];
            for &(n, off) in &orows {
                for (i, w) in self.weights(n).into_iter().enumerate() {
                    outside[off + i] = w > target;
                }
            }
            let r1 = restricted.rank();
            let r2 = restricted.select_rows(&outside).rank();
            out[slot] = dim_z - (r1 - r2);
        }
        LadderLevel { level: target, even: out[0], odd: out[1], source_levels: src_levels, saturated }
    }

    /// Chain map `ω⊗σ ↦ ω⊗f(σ)` into `target` for a map injective and
    /// order preserving on every simplex; untwisted windows only.
    pub fn pushforward(
        &self,
        target: &DupontWindow,
        f: &SimplicialMap,
        source: &OrderedComplex,
    ) -> Result<Vec<SparseMatrix>, DupontError> {
        if !f.is_order_preserving(source) || source.simplices(1).iter().any(|e| f.is_degenerate_on(e)) {
            return Err(DupontError::NotInjective);
        }
        let mut out = Vec::new();
        for n in 0..=self.top {
            let mut trip = Vec::new();
            for (j, e) in self.bases[n].iter().enumerate() {
                let img =
                    BasisElement { simplex: f.image_set(&e.simplex), dx: e.dx.clone(), exponents: e.exponents.clone() };
                let row = target.index_of(n, &img).ok_or(DupontError::NotInjective)?;
                trip.push((row, j, Rational::from_integer(1.into())));
            }
            let rows = if n <= target.top { target.dim(n) } else { 0 };
            out.push(SparseMatrix::from_triplets(rows, self.dim(n), trip));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderLevel {
    pub level: u32,
    pub even: usize,
    pub odd: usize,
    pub source_levels: Vec<u32>,
    /// Every source level was inside the window.
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizationReport {
    pub rows: Vec<LadderLevel>,
    /// First level agreeing with the next one.
    pub stabilized_at: Option<u32>,
    pub max_level: u32,
}

impl StabilizationReport {
    pub fn dims(&self) -> Result<(usize, usize), DupontError> {
        let at = self.stabilized_at.ok_or(DupontError::NotStabilized { max_level: self.max_level })?;
        let row = self.rows.iter().find(|r| r.level == at).expect("reported level");
        Ok((row.even, row.odd))
    }

    /// Whether the comparison map from `level` to the next is an
    /// isomorphism: both saturated and of equal dimension.
    pub fn comparison_iso(&self, level: u32) -> Option<bool> {
        let a = self.rows.iter().find(|r| r.level == level)?;
        let b = self.rows.iter().find(|r| r.level == level + 1)?;
        Some(a.saturated && b.saturated && a.even == b.even && a.odd == b.odd)
    }
}

/// Ladder homology at levels `0, 1, …` until two consecutive levels agree
/// (or every level up to `max_level` when `sweep` is set).
pub fn stabilized_twisted_cohomology(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    t: &[PiecewiseForm],
    max_level: u32,
    sweep: bool,
) -> Result<StabilizationReport, DupontError> {
    check_twist(k, t)?;
    let shifts: Vec<(usize, u32)> = t.iter().filter(|c| !c.is_zero()).map(|c| (c.degree(), shift_of(c))).collect();
    let top = k.dimension();
    let mut rows: Vec<LadderLevel> = Vec::new();
    let mut stabilized_at = None;
    for level in 0..=max_level {
        let need = DupontWindow::source_levels(top, &shifts, level);
        let w = DupontWindow::build(k, p, rho, t, &need)?;
        rows.push(w.ladder_dims(level));
        let n = rows.len();
        if stabilized_at.is_none() && n >= 2 {
            let (a, b) = (&rows[n - 2], &rows[n - 1]);
            if a.saturated && b.saturated && a.even == b.even && a.odd == b.odd {
                stabilized_at = Some(a.level);
                if !sweep {
                    break;
                }
            }
        }
    }
    Ok(StabilizationReport { rows, stabilized_at, max_level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, Matrix};
    use crate::simplicial::{fundamental_group, twisted_cochain_complex, Cochain};

    fn trivial(k: &OrderedComplex) -> (Pi1Presentation, Representation) {
        let p = fundamental_group(k, 0).unwrap();
        let r = Representation::trivial(&p, 1);
        (p, r)
    }

    #[test]
    fn boundary_of_vertex_and_edge() {
        let x = DupontElement::single(0, vec![3], PolyForm::constant(0, rat(1))).unwrap();
        assert!(dupont_boundary(&x).is_zero());
        let e = DupontElement::single(1, vec![0, 1], PolyForm::constant(1, rat(1))).unwrap();
        let mut expect = DupontElement::single(0, vec![1], PolyForm::constant(0, rat(1))).unwrap();
        expect = expect.add(&DupontElement::single(0, vec![0], PolyForm::constant(0, rat(-1))).unwrap());
        assert_eq!(dupont_boundary(&e), expect);
    }

    #[test]
    fn one_form_on_triangle() {
        // ∂_1(x1 dx1 ⊗ [0,1,2]) = -dx1∧dx1... = 0 from d, plus faces:
        // ε^0: x1 -> 1 - y, dx1 -> -dy; ε^1: x1 -> 0; ε^2: x1 -> y, dx1 -> dy
        let w = PolyForm::parse(2, "1*x1*dx1").unwrap();
        let x = DupontElement::single(1, vec![0, 1, 2], w).unwrap();
        let b = dupont_boundary(&x);
        let mut expect = DupontElement::zero(0);
        expect.insert(vec![1, 2], PolyForm::parse(1, "-1*dx1 + 1*x1*dx1").unwrap()).unwrap();
        expect.insert(vec![0, 1], PolyForm::parse(1, "1*x1*dx1").unwrap()).unwrap();
        assert_eq!(b, expect);
    }

    #[test]
    fn window_squares_to_zero_and_psi() {
        for k in [OrderedComplex::simplex_boundary(2), OrderedComplex::simplex_boundary(3)] {
            let (p, r) = trivial(&k);
            let w = DupontWindow::build(&k, &p, &r, &[], &[1; 4]).unwrap();
            let mut betti = crate::simplicial::betti_numbers(&k);
            betti.resize(k.dimension() + 1, 0);
            assert_eq!(w.homology_dims(1), betti);
            assert!(w.psi_is_quasi_isomorphism(&k, &p, &r, 1));
        }
    }

    #[test]
    fn untwisted_ladder_matches_simplicial() {
        let k = OrderedComplex::simplex_boundary(2);
        let p = fundamental_group(&k, 0).unwrap();
        for x in [1, -1] {
            let rho = Representation::new(&p, 1, vec![Matrix::from_i64(&[&[x]])]).unwrap();
            let c = twisted_cochain_complex(&k, &p, &rho).unwrap().cohomology_dims();
            let rep = stabilized_twisted_cohomology(&k, &p, &rho, &[], 3, true).unwrap();
            for row in &rep.rows {
                assert_eq!((row.even, row.odd), (c[0], c[1]));
            }
        }
    }

    #[test]
    fn sphere_with_unit_cocycle_is_acyclic() {
        let k = OrderedComplex::simplex_boundary(4);
        let (p, r) = trivial(&k);
        let theta = k.orientation_cocycle().unwrap();
        let t = PiecewiseForm::whitney_lift(&k, &theta).unwrap();
        let rep = stabilized_twisted_cohomology(&k, &p, &r, &[t], 3, false).unwrap();
        assert_eq!(rep.dims().unwrap(), (0, 0));
        let zero = PiecewiseForm::whitney_lift(&k, &Cochain::zero(&k, 3)).unwrap();
        let rep = stabilized_twisted_cohomology(&k, &p, &r, &[zero], 3, false).unwrap();
        assert_eq!(rep.dims().unwrap(), (1, 1));
    }

    #[test]
    fn action_signs_give_module() {
        let k = OrderedComplex::simplex_boundary(4);
        let theta = k.orientation_cocycle().unwrap();
        let t = PiecewiseForm::whitney_lift(&k, &theta).unwrap();
        let x = DupontElement::single(3, vec![0, 1, 2, 3], PolyForm::constant(3, rat(1))).unwrap();
        let tx = module_action(&k, &t, &x).unwrap();
        assert!(!tx.is_zero());
        let lhs = dupont_boundary(&module_action(&k, &t, &x).unwrap());
        let rhs = module_action(&k, &t, &dupont_boundary(&x)).unwrap().scale(&rat(-1));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rejects_even_twist() {
        let k = OrderedComplex::simplex_boundary(4);
        let (p, r) = trivial(&k);
        let b = PiecewiseForm::zero(&k, 2);
        assert_eq!(DupontWindow::build(&k, &p, &r, &[b], &[0; 4]).unwrap_err(), DupontError::EvenComponent(2));
    }
}
