//! Spectral sequence of a filtered Z/2-graded complex.
//!
//! Pages are presented inside the original spaces, classically:
//!
//! ```text
//! Z_r^p = F_p ∩ d^-1(F_{p+r})
//! D_r^p = Z_{r-1}^{p+1} + d(Z_{r-1}^{p-r+1})
//! E_r^p = Z_r^p / D_r^p,   d_r [x] = [d x]
//! ```
//!
//! with `Z_r^p = F_p` for `r <= 0`. A cell is indexed by the filtration
//! step `p` and the parity of the total degree `p + q`; the complex is
//! 2-periodic, so `E_r^{p,q}` and `E_r^{p,q+2}` are literally the same cell.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::detline::{lemma1_scalar, BasedComplex, DetError, Z2Complex};
use crate::exactlin::{
    column_space_analysis, determinant, extend_independent, is_zero_vector, solve, solve_many, span_basis, unit_vector,
    zero_vector, LinError, Matrix, Rational, Vector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Parity {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error("filtration step 0 of the {0:?} space is not the whole space")]
    NotExhaustive(Parity),
    #[error("filtration of the {parity:?} space is not decreasing at step {step}")]
    NotDecreasing { parity: Parity, step: usize },
    #[error("the differential does not preserve filtration step {step} of the {parity:?} space")]
    NotFiltered { parity: Parity, step: usize },
    #[error("twist component of degree {0} is not odd and at least 3")]
    BadTwistDegree(usize),
    #[error("the twisted differential does not square to zero")]
    NotSquareZero,
    #[error("dg-module degrees must be nonnegative, got start {0}")]
    NegativeDegree(i64),
    #[error("at least one page must be requested")]
    NoPages,
    #[error("page {r} cell ({p}, {parity:?}): representatives are not a basis")]
    BadRepresentatives { r: usize, p: usize, parity: Parity },
    #[error("page {r} cell ({p}, {parity:?}): homology of the previous page has the wrong dimension")]
    PageMismatch { r: usize, p: usize, parity: Parity },
    #[error("page {r} differential does not square to zero")]
    DifferentialNotSquareZero { r: usize },
    #[error("{parity:?} twisted cohomology basis is invalid")]
    BadTwistedBasis { parity: Parity },
}

/// Z/2-graded complex with decreasing exhaustive filtrations
/// `F_0 ⊇ F_1 ⊇ ... ⊇ F_{N-1} ⊇ F_N = 0` of both spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilteredZ2Complex {
    complex: Z2Complex,
    steps: [Vec<Vec<Vector>>; 2],
}

impl FilteredZ2Complex {
    /// `even_steps[p]` and `odd_steps[p]` span `F_p` for `p < N`; both
    /// lists must have the same length `N`.
    pub fn new(
        complex: Z2Complex,
        even_steps: Vec<Vec<Vector>>,
        odd_steps: Vec<Vec<Vector>>,
    ) -> Result<Self, SpectralError> {
        let n = even_steps.len().max(odd_steps.len());
        let mut steps = [even_steps, odd_steps];
        for s in steps.iter_mut() {
            s.resize(n, Vec::new());
        }
        let f = FilteredZ2Complex { complex, steps };
        for parity in [Parity::Even, Parity::Odd] {
            let dim = f.dim(parity);
            let s = &f.steps[parity.index()];
            let whole = if n == 0 { 0 } else { rank_of(dim, &s[0]) };
            if whole != dim {
                return Err(SpectralError::NotExhaustive(parity));
            }
            for p in 0..n {
                for v in &s[p] {
                    if v.len() != dim {
                        return Err(LinError::DimensionMismatch { expected: dim, found: v.len() }.into());
                    }
                }
                if p + 1 < n && !contains_all(dim, &s[p], &s[p + 1]) {
                    return Err(SpectralError::NotDecreasing { parity, step: p + 1 });
                }
                let d = f.differential(parity);
                let images: Vec<Vector> = s[p].iter().map(|v| d.mul_vec(v)).collect::<Result<_, _>>()?;
                if !contains_all(f.dim(parity.flip()), &f.steps[parity.flip().index()][p], &images) {
                    return Err(SpectralError::NotFiltered { parity, step: p });
                }
            }
        }
        Ok(f)
    }

    pub fn complex(&self) -> &Z2Complex {
        &self.complex
    }

    /// Number of nonzero filtration steps `N`.
    pub fn step_count(&self) -> usize {
        self.steps[0].len()
    }

    pub fn dim(&self, parity: Parity) -> usize {
        match parity {
            Parity::Even => self.complex.even_dim(),
            Parity::Odd => self.complex.odd_dim(),
        }
    }

    /// The differential leaving the given parity.
    pub fn differential(&self, parity: Parity) -> &Matrix {
        match parity {
            Parity::Even => self.complex.d_eo(),
            Parity::Odd => self.complex.d_oe(),
        }
    }

    /// Basis of `F_p`; the whole space for negative `p`, zero from `N` on.
    pub fn step(&self, p: i64, parity: Parity) -> Vec<Vector> {
        let dim = self.dim(parity);
        if p <= 0 {
            return (0..dim).map(|i| unit_vector(dim, i)).collect();
        }
        self.steps[parity.index()].get(p as usize).cloned().unwrap_or_default()
    }
}

fn rank_of(dim: usize, vs: &[Vector]) -> usize {
    if vs.is_empty() {
        0
    } else {
        Matrix::from_columns(dim, vs).expect("vector length").rank()
    }
}

fn contains_all(dim: usize, space: &[Vector], vs: &[Vector]) -> bool {
    let base = rank_of(dim, space);
    let mut all = space.to_vec();
    all.extend(vs.iter().cloned());
    rank_of(dim, &all) == base
}

/// Twist component `t_k` of odd degree `k >= 3`: `maps[j]` sends degree
/// `start + j` to `start + j + k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistComponent {
    pub degree: usize,
    pub maps: Vec<Matrix>,
}

/// A based cochain complex `(m, d)` with odd multiplication operators
/// `t_3, t_5, ...` such that `d + t` squares to zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DGModuleInput {
    complex: BasedComplex,
    twists: Vec<TwistComponent>,
    total: Z2Complex,
}

impl DGModuleInput {
    pub fn new(complex: BasedComplex, twists: Vec<TwistComponent>) -> Result<Self, SpectralError> {
        if complex.start() < 0 {
            return Err(SpectralError::NegativeDegree(complex.start()));
        }
        for t in &twists {
            if t.degree < 3 || t.degree % 2 == 0 {
                return Err(SpectralError::BadTwistDegree(t.degree));
            }
            if t.maps.len() != complex.dims().len() {
                return Err(LinError::DimensionMismatch { expected: complex.dims().len(), found: t.maps.len() }.into());
            }
            for (j, m) in t.maps.iter().enumerate() {
                let src = complex.start() + j as i64;
                let (r, c) = (complex.dim(src + t.degree as i64), complex.dim(src));
                if m.rows() != r || m.cols() != c {
                    return Err(LinError::DimensionMismatch { expected: r * c, found: m.rows() * m.cols() }.into());
                }
            }
        }
        let total = assemble(&complex, &twists)?;
        Ok(DGModuleInput { complex, twists, total })
    }

    pub fn complex(&self) -> &BasedComplex {
        &self.complex
    }

    pub fn twists(&self) -> &[TwistComponent] {
        &self.twists
    }

    /// The Z/2-graded complex `(m^ev ⊕ m^od, d + t)`.
    pub fn total(&self) -> &Z2Complex {
        &self.total
    }

    /// Offset of degree `degree` inside its parity space.
    pub fn offset(&self, degree: i64) -> usize {
        let parity = Parity::of(degree);
        self.complex.degrees().filter(|&j| j < degree && Parity::of(j) == parity).map(|j| self.complex.dim(j)).sum()
    }

    /// Places a vector of `m^degree` into its parity space.
    pub fn embed(&self, degree: i64, v: &[Rational]) -> (Parity, Vector) {
        let parity = Parity::of(degree);
        let dim = match parity {
            Parity::Even => self.total.even_dim(),
            Parity::Odd => self.total.odd_dim(),
        };
        let mut out = zero_vector(dim);
        let off = self.offset(degree);
        for (i, x) in v.iter().enumerate() {
            out[off + i] = x.clone();
        }
        (parity, out)
    }

    /// The degree-`degree` component of a vector of its parity space.
    pub fn component(&self, degree: i64, v: &[Rational]) -> Vector {
        let off = self.offset(degree);
        v[off..off + self.complex.dim(degree)].to_vec()
    }
}

fn assemble(c: &BasedComplex, twists: &[TwistComponent]) -> Result<Z2Complex, SpectralError> {
    let mut offsets = Vec::new();
    let mut sizes = [0usize; 2];
    for j in c.degrees() {
        let p = Parity::of(j).index();
        offsets.push(sizes[p]);
        sizes[p] += c.dim(j);
    }
    let mut d = [Matrix::zeros(sizes[1], sizes[0]), Matrix::zeros(sizes[0], sizes[1])];
    let start = c.start();
    let place = |d: &mut [Matrix; 2], src: i64, dst: i64, m: &Matrix| {
        if dst > c.end() || m.rows() == 0 || m.cols() == 0 {
            return;
        }
        let pi = Parity::of(src).index();
        let (ro, co) = (offsets[(dst - start) as usize], offsets[(src - start) as usize]);
        for r in 0..m.rows() {
            for col in 0..m.cols() {
                let e = &m[(r, col)];
                if !e.is_zero() {
                    d[pi][(ro + r, co + col)] += e;
                }
            }
        }
    };
    for j in c.degrees() {
        place(&mut d, j, j + 1, &c.differential(j));
        for t in twists {
            place(&mut d, j, j + t.degree as i64, &t.maps[(j - start) as usize]);
        }
    }
    let [d_eo, d_oe] = d;
    Z2Complex::new(d_eo, d_oe).map_err(|e| match e {
        DetError::NotAComplex { .. } => SpectralError::NotSquareZero,
        other => other.into(),
    })
}

/// The filtration `F_p = ⊕_{j >= p} m^j` (by parity) of `(m, d + t)`,
/// with `top degree + 1` steps.
pub fn parity_filtration(m: &DGModuleInput) -> Result<FilteredZ2Complex, SpectralError> {
    let c = &m.complex;
    let steps_count = (c.end() + 1).max(0) as usize;
    let mut steps: [Vec<Vec<Vector>>; 2] = [Vec::new(), Vec::new()];
    let dims = [m.total.even_dim(), m.total.odd_dim()];
    for p in 0..steps_count as i64 {
        for parity in [Parity::Even, Parity::Odd] {
            let dim = dims[parity.index()];
            let mut basis = Vec::new();
            for j in c.degrees().filter(|&j| j >= p && Parity::of(j) == parity) {
                let off = m.offset(j);
                basis.extend((0..c.dim(j)).map(|i| unit_vector(dim, off + i)));
            }
            steps[parity.index()].push(basis);
        }
    }
    let [even, odd] = steps;
    FilteredZ2Complex::new(m.total.clone(), even, odd)
}

/// One cell `E_r^{p, parity}` presented as cycles modulo denominators, with
/// chosen representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageCell {
    pub p: usize,
    pub parity: Parity,
    pub cycles: Vec<Vector>,
    pub denominators: Vec<Vector>,
    pub representatives: Vec<Vector>,
}

impl PageCell {
    pub fn dim(&self) -> usize {
        self.representatives.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralPage {
    pub r: usize,
    cells: Vec<[PageCell; 2]>,
}

impl SpectralPage {
    pub fn cell(&self, p: usize, parity: Parity) -> Option<&PageCell> {
        self.cells.get(p).map(|c| &c[parity.index()])
    }

    /// `E_r^{p,q}`; depends on `q` only through the parity of `p + q`.
    pub fn cell_pq(&self, p: usize, q: i64) -> Option<&PageCell> {
        self.cell(p, Parity::of(p as i64 + q))
    }

    pub fn cells(&self) -> impl Iterator<Item = &PageCell> {
        self.cells.iter().flat_map(|c| c.iter())
    }

    pub fn step_count(&self) -> usize {
        self.cells.len()
    }

    /// `dims[p][parity]`.
    pub fn dims(&self) -> Vec<[usize; 2]> {
        self.cells.iter().map(|c| [c[0].dim(), c[1].dim()]).collect()
    }
}

/// All pages `E_1, ..., E_{r_max}` of a filtered complex, with the
/// representatives of every cell open to re-choice.
#[derive(Debug, Clone)]
pub struct SpectralSequence {
    filtered: FilteredZ2Complex,
    pages: Vec<SpectralPage>,
}

impl SpectralSequence {
    pub fn new(f: &FilteredZ2Complex, r_max: usize) -> Result<Self, SpectralError> {
        if r_max < 1 {
            return Err(SpectralError::NoPages);
        }
        let n = f.step_count();
        let mut pages = Vec::new();
        // prev_z[p][parity] = Z_{r-1}^p, starting from Z_0 = F_p
        let mut prev_z: Vec<[Vec<Vector>; 2]> =
            (0..n as i64).map(|p| [f.step(p, Parity::Even), f.step(p, Parity::Odd)]).collect();
        for r in 1..=r_max {
            let mut z_r: Vec<[Vec<Vector>; 2]> = Vec::with_capacity(n);
            for p in 0..n as i64 {
                let mut pair: [Vec<Vector>; 2] = [Vec::new(), Vec::new()];
                for parity in [Parity::Even, Parity::Odd] {
                    pair[parity.index()] = preimage(
                        f.differential(parity),
                        f.dim(parity),
                        &f.step(p, parity),
                        &f.step(p + r as i64, parity.flip()),
                        f.dim(parity.flip()),
                    )?;
                }
                z_r.push(pair);
            }
            let mut cells = Vec::with_capacity(n);
            for p in 0..n {
                let mut pair = Vec::with_capacity(2);
                for parity in [Parity::Even, Parity::Odd] {
                    let dim = f.dim(parity);
                    let mut gens: Vec<Vector> = Vec::new();
                    if p + 1 < n {
                        gens.extend(prev_z[p + 1][parity.index()].iter().cloned());
                    }
                    let src = p as i64 - r as i64 + 1;
                    let src_z: Vec<Vector> = if src < 0 {
                        preimage(
                            f.differential(parity.flip()),
                            f.dim(parity.flip()),
                            &f.step(src, parity.flip()),
                            &f.step(src + r as i64 - 1, parity),
                            dim,
                        )?
                    } else {
                        prev_z[src as usize][parity.flip().index()].clone()
                    };
                    let d = f.differential(parity.flip());
                    for v in &src_z {
                        gens.push(d.mul_vec(v)?);
                    }
                    let denominators = span_basis(dim, &gens);
                    let cycles = z_r[p][parity.index()].clone();
                    let representatives = extend_independent(dim, &denominators, &cycles)
                        .into_iter()
                        .map(|i| cycles[i].clone())
                        .collect();
                    pair.push(PageCell { p, parity, cycles, denominators, representatives });
                }
                let odd = pair.pop().expect("two cells");
                let even = pair.pop().expect("two cells");
                cells.push([even, odd]);
            }
            pages.push(SpectralPage { r, cells });
            prev_z = z_r;
        }
        let ss = SpectralSequence { filtered: f.clone(), pages };
        ss.check()?;
        Ok(ss)
    }

    pub fn filtered(&self) -> &FilteredZ2Complex {
        &self.filtered
    }

    pub fn pages(&self) -> &[SpectralPage] {
        &self.pages
    }

    pub fn page(&self, r: usize) -> Option<&SpectralPage> {
        r.checked_sub(1).and_then(|i| self.pages.get(i))
    }

    /// Replaces the representatives of one cell; they must be cycles of
    /// that page projecting to a basis of the cell.
    pub fn set_representatives(
        &mut self,
        r: usize,
        p: usize,
        parity: Parity,
        reps: Vec<Vector>,
    ) -> Result<(), SpectralError> {
        let bad = SpectralError::BadRepresentatives { r, p, parity };
        let dim = self.filtered.dim(parity);
        let cell = self.page(r).and_then(|pg| pg.cell(p, parity)).ok_or(bad.clone())?;
        if reps.len() != cell.dim() || reps.iter().any(|v| v.len() != dim) {
            return Err(bad);
        }
        if !contains_all(dim, &cell.cycles, &reps) {
            return Err(bad);
        }
        if extend_independent(dim, &cell.denominators, &reps).len() != reps.len() {
            return Err(bad);
        }
        self.pages[r - 1].cells[p][parity.index()].representatives = reps;
        Ok(())
    }

    /// Coordinates of a cycle of cell `(p, parity)` of page `r` against its
    /// representatives, modulo denominators.
    pub fn coordinates(&self, r: usize, p: usize, parity: Parity, v: &[Rational]) -> Option<Vector> {
        let cell = self.page(r)?.cell(p, parity)?;
        let dim = self.filtered.dim(parity);
        let k = cell.representatives.len();
        if k == 0 && cell.denominators.is_empty() {
            return if is_zero_vector(v) { Some(Vec::new()) } else { None };
        }
        let mut cols = cell.representatives.clone();
        cols.extend(cell.denominators.iter().cloned());
        let m = Matrix::from_columns(dim, &cols).ok()?;
        let x = solve(&m, v).ok()??;
        Some(x[..k].to_vec())
    }

    /// [`SpectralSequence::coordinates`] for several cycles in one
    /// elimination.
    pub fn coordinates_many(&self, r: usize, p: usize, parity: Parity, vs: &[Vector]) -> Option<Vec<Vector>> {
        let cell = self.page(r)?.cell(p, parity)?;
        let dim = self.filtered.dim(parity);
        let k = cell.representatives.len();
        if vs.is_empty() {
            return Some(Vec::new());
        }
        if k == 0 && cell.denominators.is_empty() {
            return if vs.iter().all(|v| is_zero_vector(v)) { Some(vec![Vec::new(); vs.len()]) } else { None };
        }
        let mut cols = cell.representatives.clone();
        cols.extend(cell.denominators.iter().cloned());
        let m = Matrix::from_columns(dim, &cols).ok()?;
        let rhs = Matrix::from_columns(dim, vs).ok()?;
        let x = solve_many(&m, &rhs).ok()??;
        Some((0..vs.len()).map(|j| (0..k).map(|i| x[(i, j)].clone()).collect()).collect())
    }

    /// Matrix of `d_r` from cell `(p, parity)` to `(p + r, parity flipped)`
    /// in the chosen representatives.
    pub fn differential(&self, r: usize, p: usize, parity: Parity) -> Result<Matrix, SpectralError> {
        let page = self.page(r).ok_or(SpectralError::NoPages)?;
        let src = page.cell(p, parity).ok_or(SpectralError::NoPages)?;
        let target_dim = page.cell(p + r, parity.flip()).map_or(0, |c| c.dim());
        let d = self.filtered.differential(parity);
        let mut m = Matrix::zeros(target_dim, src.dim());
        if target_dim == 0 {
            return Ok(m);
        }
        let ys: Vec<Vector> = src.representatives.iter().map(|x| d.mul_vec(x)).collect::<Result<_, _>>()?;
        let cs = self.coordinates_many(r, p + r, parity.flip(), &ys).ok_or(SpectralError::PageMismatch {
            r,
            p: p + r,
            parity: parity.flip(),
        })?;
        for (j, c) in cs.into_iter().enumerate() {
            for (i, v) in c.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    /// The Z/2-graded complex `(E_r^ev ⊕ E_r^od, d_r)`, cells stacked by
    /// increasing `p`.
    pub fn page_complex(&self, r: usize) -> Result<Z2Complex, SpectralError> {
        let page = self.page(r).ok_or(SpectralError::NoPages)?;
        let n = page.step_count();
        let offsets = |parity: Parity| -> Vec<usize> {
            let mut acc = 0;
            (0..n)
                .map(|p| {
                    let o = acc;
                    acc += page.cells[p][parity.index()].dim();
                    o
                })
                .collect()
        };
        let off = [offsets(Parity::Even), offsets(Parity::Odd)];
        let total = |parity: Parity| page.cells.iter().map(|c| c[parity.index()].dim()).sum::<usize>();
        let mut d = [
            Matrix::zeros(total(Parity::Odd), total(Parity::Even)),
            Matrix::zeros(total(Parity::Even), total(Parity::Odd)),
        ];
        for parity in [Parity::Even, Parity::Odd] {
            for p in 0..n {
                if p + r >= n {
                    continue;
                }
                let block = self.differential(r, p, parity)?;
                d[parity.index()].set_block(off[parity.flip().index()][p + r], off[parity.index()][p], &block);
            }
        }
        let [d_eo, d_oe] = d;
        Z2Complex::new(d_eo, d_oe).map_err(|_| SpectralError::DifferentialNotSquareZero { r })
    }

    fn check(&self) -> Result<(), SpectralError> {
        for w in self.pages.windows(2) {
            let (cur, next) = (&w[0], &w[1]);
            let r = cur.r;
            let z = self.page_complex(r)?;
            let n = cur.step_count();
            for p in 0..n {
                for parity in [Parity::Even, Parity::Odd] {
                    let dim = cur.cells[p][parity.index()].dim();
                    let out = if p + r < n { self.differential(r, p, parity)?.rank() } else { 0 };
                    let inc = if p >= r { self.differential(r, p - r, parity.flip())?.rank() } else { 0 };
                    if dim - out - inc != next.cells[p][parity.index()].dim() {
                        return Err(SpectralError::PageMismatch { r: r + 1, p, parity });
                    }
                }
            }
            drop(z);
        }
        Ok(())
    }

    /// First page from which every later computed page has the same
    /// dimensions and a zero differential.
    pub fn stable_page(&self) -> Option<usize> {
        let last = self.pages.last()?;
        let mut stable = last.r;
        for page in self.pages.iter().rev() {
            let zero = self.page_complex(page.r).map(|z| z.d_eo().is_zero() && z.d_oe().is_zero()).unwrap_or(false);
            if page.dims() == last.dims() && zero {
                stable = page.r;
            } else {
                break;
            }
        }
        Some(stable)
    }
}

/// `F ∩ d^-1(G)` for subspaces given by bases.
/// Positions of the ones when every vector is a standard unit vector.
fn unit_support(vs: &[Vector]) -> Option<Vec<usize>> {
    vs.iter()
        .map(|v| {
            let mut at = None;
            for (i, x) in v.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                if at.is_some() || !x.is_one() {
                    return None;
                }
                at = Some(i);
            }
            at
        })
        .collect()
}

fn preimage(
    d: &Matrix,
    src_dim: usize,
    f: &[Vector],
    g: &[Vector],
    dst_dim: usize,
) -> Result<Vec<Vector>, SpectralError> {
    if f.is_empty() {
        return Ok(Vec::new());
    }
    if let (Some(fi), Some(gi)) = (unit_support(f), unit_support(g)) {
        let mut keep = vec![true; dst_dim];
        for &i in &gi {
            keep[i] = false;
        }
        let rows: Vec<usize> = (0..dst_dim).filter(|&i| keep[i]).collect();
        let sub = d.select_rows(&rows).select_columns(&fi);
        let ker = if rows.is_empty() {
            (0..fi.len()).map(|j| unit_vector(fi.len(), j)).collect()
        } else {
            column_space_analysis(&sub).kernel_basis
        };
        return Ok(ker
            .into_iter()
            .map(|c| {
                let mut v = zero_vector(src_dim);
                for (x, &i) in c.into_iter().zip(&fi) {
                    v[i] = x;
                }
                v
            })
            .collect());
    }
    let mut cols: Vec<Vector> = f.iter().map(|v| d.mul_vec(v)).collect::<Result<_, _>>()?;
    cols.extend(g.iter().cloned());
    let m = Matrix::from_columns(dst_dim, &cols)?;
    let k = f.len();
    let ker = column_space_analysis(&m).kernel_basis;
    let vecs: Vec<Vector> = ker
        .iter()
        .map(|c| {
            let mut v = zero_vector(src_dim);
            for (coef, col) in c[..k].iter().zip(f) {
                if !coef.is_zero() {
                    crate::exactlin::axpy(&mut v, coef, col);
                }
            }
            v
        })
        .collect();
    Ok(span_basis(src_dim, &vecs))
}

/// Graded piece of the abutment at one filtration step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece {
    pub p: usize,
    pub parity: Parity,
    pub e_infinity_dim: usize,
    pub graded_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abutment {
    pub even_basis: Vec<Vector>,
    pub odd_basis: Vec<Vector>,
    /// `G_p` of the even and odd cohomology, as bases of representatives.
    pub even_filtration: Vec<Vec<Vector>>,
    pub odd_filtration: Vec<Vec<Vector>>,
    pub pieces: Vec<GradedPiece>,
    pub consistent: bool,
}

/// Twisted cohomology computed directly, its induced filtration, and the
/// comparison with `E_∞`.
pub fn abutment(f: &FilteredZ2Complex) -> Result<Abutment, SpectralError> {
    let n = f.step_count();
    let ss = SpectralSequence::new(f, n.max(1) + 1)?;
    let e_inf = ss.pages.last().expect("at least one page");
    let z = f.complex();
    let (even_basis, odd_basis) = z.default_cohomology_basis();
    let mut pieces = Vec::new();
    let mut filtrations: [Vec<Vec<Vector>>; 2] = [Vec::new(), Vec::new()];
    for parity in [Parity::Even, Parity::Odd] {
        let dim = f.dim(parity);
        let d_in = f.differential(parity.flip());
        let boundaries = column_space_analysis(d_in).image_basis;
        let mut g_dims = Vec::new();
        for p in 0..=n {
            let cyc = preimage(f.differential(parity), dim, &f.step(p as i64, parity), &[], f.dim(parity.flip()))?;
            let reps: Vec<Vector> =
                extend_independent(dim, &boundaries, &cyc).into_iter().map(|i| cyc[i].clone()).collect();
            g_dims.push(reps.len());
            filtrations[parity.index()].push(reps);
        }
        for p in 0..n {
            pieces.push(GradedPiece {
                p,
                parity,
                e_infinity_dim: e_inf.cells[p][parity.index()].dim(),
                graded_dim: g_dims[p] - g_dims[p + 1],
            });
        }
    }
    let consistent = pieces.iter().all(|g| g.e_infinity_dim == g.graded_dim);
    let [even_filtration, odd_filtration] = filtrations;
    Ok(Abutment { even_basis, odd_basis, even_filtration, odd_filtration, pieces, consistent })
}

/// Coordinate of the determinant element of `E_2` (with the given cell
/// bases) under `det E_2 = det E_3 = ... = det E_∞ = det H`, against the
/// supplied twisted cohomology bases. `e2_bases[p]` holds the even and odd
/// representatives of cell `p`.
pub fn twisted_det_chain(
    f: &FilteredZ2Complex,
    e2_bases: &[[Vec<Vector>; 2]],
    even: &[Vector],
    odd: &[Vector],
) -> Result<Rational, SpectralError> {
    let mut ss = SpectralSequence::new(f, f.step_count().max(2) + 1)?;
    for (p, pair) in e2_bases.iter().enumerate() {
        for parity in [Parity::Even, Parity::Odd] {
            ss.set_representatives(2, p, parity, pair[parity.index()].clone())?;
        }
    }
    if e2_bases.len() != f.step_count() {
        return Err(SpectralError::BadRepresentatives { r: 2, p: e2_bases.len(), parity: Parity::Even });
    }
    ss.det_chain(even, odd)
}

impl SpectralSequence {
    /// The determinant chain from page 2 (current representatives) to the
    /// abutment with the given twisted bases.
    pub fn det_chain(&self, even: &[Vector], odd: &[Vector]) -> Result<Rational, SpectralError> {
        let last = self.pages.last().ok_or(SpectralError::NoPages)?.r;
        let mut scalar = Rational::one();
        for r in 2..last {
            let z = self.page_complex(r)?;
            let next = self.page(r + 1).expect("page exists");
            let mut reps: [Vec<Vector>; 2] = [Vec::new(), Vec::new()];
            for parity in [Parity::Even, Parity::Odd] {
                let total = z_dim(&z, parity);
                let mut off = 0;
                for p in 0..next.step_count() {
                    let here = self.page(r).expect("page").cells[p][parity.index()].dim();
                    let cs = self
                        .coordinates_many(r, p, parity, &next.cells[p][parity.index()].representatives)
                        .ok_or(SpectralError::PageMismatch { r: r + 1, p, parity })?;
                    for c in cs {
                        let mut w = zero_vector(total);
                        for (i, x) in c.into_iter().enumerate() {
                            w[off + i] = x;
                        }
                        reps[parity.index()].push(w);
                    }
                    off += here;
                }
            }
            scalar *= lemma1_scalar(&z, &reps[0], &reps[1])?;
        }
        let page = self.page(last).expect("page");
        let mut t_det = [Rational::one(), Rational::one()];
        for (parity, basis) in [(Parity::Even, even), (Parity::Odd, odd)] {
            let dim = self.filtered.dim(parity);
            let reps: Vec<Vector> =
                page.cells.iter().flat_map(|c| c[parity.index()].representatives.iter().cloned()).collect();
            let bad = SpectralError::BadTwistedBasis { parity };
            if reps.len() != basis.len() || basis.iter().any(|v| v.len() != dim) {
                return Err(bad);
            }
            let d_out = self.filtered.differential(parity);
            for v in basis {
                if !is_zero_vector(&d_out.mul_vec(v)?) {
                    return Err(bad);
                }
            }
            if reps.is_empty() {
                continue;
            }
            let boundaries = column_space_analysis(self.filtered.differential(parity.flip())).image_basis;
            let mut cols = basis.to_vec();
            cols.extend(boundaries);
            let m = Matrix::from_columns(dim, &cols)?;
            if m.rank() != cols.len() {
                return Err(bad);
            }
            let k = basis.len();
            let mut t = Matrix::zeros(k, k);
            for (j, z) in reps.iter().enumerate() {
                let x = solve(&m, z)?.ok_or(bad.clone())?;
                for i in 0..k {
                    t[(i, j)] = x[i].clone();
                }
            }
            t_det[parity.index()] = determinant(&t)?;
        }
        if t_det[0].is_zero() || t_det[1].is_zero() {
            return Err(SpectralError::BadTwistedBasis {
                parity: if t_det[0].is_zero() { Parity::Even } else { Parity::Odd },
            });
        }
        Ok(scalar * &t_det[0] / &t_det[1])
    }
}

fn z_dim(z: &Z2Complex, parity: Parity) -> usize {
    match parity {
        Parity::Even => z.even_dim(),
        Parity::Odd => z.odd_dim(),
    }
}

/// Cell bases of `E_2` for a parity-filtration input, from cohomology
/// representatives of `(m, d)` given per degree.
pub fn untwisted_page_bases(m: &DGModuleInput, per_degree: &[Vec<Vector>]) -> Vec<[Vec<Vector>; 2]> {
    let c = m.complex();
    let steps = (c.end() + 1).max(0) as usize;
    let mut out: Vec<[Vec<Vector>; 2]> = vec![[Vec::new(), Vec::new()]; steps];
    for (i, reps) in per_degree.iter().enumerate() {
        let degree = c.start() + i as i64;
        for v in reps {
            let (parity, w) = m.embed(degree, v);
            out[degree as usize][parity.index()].push(w);
        }
    }
    out
}
