//! End-to-end computations: the Mathai–Wu complex `(C•(K, E), ∂ + ϑ∪)`,
//! Reidemeister torsion and its twisted versions, gauge maps, subdivision
//! and fundamental-domain checks.
//!
//! Torsion values are coordinates of determinant elements against explicit
//! cohomology bases, meaningful up to sign.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::detline::{km_scalar, lemma1_scalar, BasedComplex, DetElement, DetError, GradedLine, LineFactor, Z2Complex};
use crate::dupont::{
    dupont_boundary, module_action, stabilized_twisted_cohomology, DupontElement, DupontError, StabilizationReport,
};
use crate::exactlin::{abs, LinError, Matrix, Rational, Vector};
use crate::forms::{FormError, PiecewiseForm};
use crate::simplicial::{
    approx_identity, barycentric_subdivision, cup_matrix, fundamental_group, scalar_cup, twisted_cochain_complex,
    Cochain, OrderedComplex, Pi1Presentation, PulledBack, Representation, SimplicialError, SimplicialMap,
};
use crate::spectral::{
    parity_filtration, twisted_det_chain, untwisted_page_bases, DGModuleInput, Parity, SpectralError, SpectralSequence,
    TwistComponent,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Dupont(#[from] DupontError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error("representation is not unimodular: some generator has |det| != 1, so torsion is not defined up to sign")]
    NotUnimodular,
    #[error("twisting cochain of degree {0} is not closed")]
    NotClosed(usize),
    #[error("twisting cochain has degree {0}; components must have odd degree >= 3")]
    BadThetaDegree(usize),
    #[error("theta ∪ theta is nonzero in degree {}; only stabilized twisted cohomology dimensions are available", .0.degree)]
    Obstruction(Cochain),
    #[error("torsion routes disagree: direct {direct}, spectral {spectral}")]
    RouteMismatch { direct: Box<Rational>, spectral: Box<Rational> },
    #[error("gauge cochain has degree {0}; it must be even and positive")]
    BadGaugeDegree(usize),
    #[error("gauge map does not intertwine the twisted differentials")]
    NotIntertwining,
}

impl PipelineError {
    /// Refusals on mathematical grounds, as opposed to bad input.
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            PipelineError::NotUnimodular
                | PipelineError::Obstruction(_)
                | PipelineError::RouteMismatch { .. }
                | PipelineError::NotIntertwining
                | PipelineError::Dupont(DupontError::NotStabilized { .. })
        )
    }
}

/// Step of the isomorphism chain that produced a torsion value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Route {
    /// `det C = det H(C, ∂)` by the Knudsen–Mumford scalar.
    KnudsenMumford,
    /// `det C = det H(C, ∂_ϑ)` through the four-term complex.
    Lemma1,
    /// `det H(C, ∂) = det E_2 = ... = det E_∞ = det H(C, ∂_ϑ)`.
    SpectralChain,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::KnudsenMumford => "knudsen-mumford",
            Route::Lemma1 => "lemma1",
            Route::SpectralChain => "spectral-chain",
        })
    }
}

/// Cohomology bases a torsion coordinate is expressed against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CohomologyBases {
    /// Representatives per degree `0..=dim K`.
    Graded(Vec<Vec<Vector>>),
    /// Representatives of `H^ev` and `H^od` of a Z/2-graded complex.
    Twisted { even: Vec<Vector>, odd: Vec<Vector> },
}

impl CohomologyBases {
    fn line(&self) -> GradedLine {
        let factors = match self {
            CohomologyBases::Graded(per) => per
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let inverted = i % 2 == 1;
                    let g = b.len() as i64;
                    LineFactor { basis_id: alloc::format!("H{i}"), grade: if inverted { -g } else { g }, inverted }
                })
                .collect(),
            CohomologyBases::Twisted { even, odd } => vec![
                LineFactor { basis_id: "Hev".into(), grade: even.len() as i64, inverted: false },
                LineFactor { basis_id: "Hod".into(), grade: -(odd.len() as i64), inverted: true },
            ],
        };
        GradedLine { factors }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionResult {
    pub element: DetElement,
    pub bases: CohomologyBases,
    pub provenance: Vec<Route>,
    /// The coordinate is canonical only up to `±1`.
    pub up_to_sign: bool,
}

impl TorsionResult {
    fn new(coordinate: Rational, bases: CohomologyBases, provenance: Vec<Route>) -> Result<Self, PipelineError> {
        let element = DetElement::new(bases.line(), coordinate)?;
        Ok(TorsionResult { element, bases, provenance, up_to_sign: true })
    }

    pub fn coordinate(&self) -> &Rational {
        &self.element.coordinate
    }

    pub fn agrees_up_to_sign(&self, other: &TorsionResult) -> bool {
        abs(self.coordinate()) == abs(other.coordinate())
    }
}

/// The Mathai–Wu Z/2-graded complex with `∂_ϑ = ∂ + ϑ∪`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MwComplex {
    theta: Vec<Cochain>,
    module: DGModuleInput,
}

/// Sums components of equal degree and drops zero ones.
fn merge_theta(theta: &[Cochain]) -> Vec<Cochain> {
    let mut by_degree: BTreeMap<usize, Cochain> = BTreeMap::new();
    for c in theta {
        match by_degree.get_mut(&c.degree) {
            Some(acc) => *acc = acc.add(c),
            None => {
                by_degree.insert(c.degree, c.clone());
            }
        }
    }
    by_degree.into_values().filter(|c| !c.is_zero()).collect()
}

/// First nonzero degree of `Σ_{i,j} ϑ_i ∪ ϑ_j`, if any.
pub fn cup_square_obstruction(k: &OrderedComplex, theta: &[Cochain]) -> Option<Cochain> {
    let mut by_degree: BTreeMap<usize, Cochain> = BTreeMap::new();
    for a in theta {
        for b in theta {
            let c = scalar_cup(k, a, b);
            match by_degree.get_mut(&c.degree) {
                Some(acc) => *acc = acc.add(&c),
                None => {
                    by_degree.insert(c.degree, c);
                }
            }
        }
    }
    by_degree.into_values().find(|c| !c.is_zero())
}

pub fn mw_complex(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    theta: &[Cochain],
) -> Result<MwComplex, PipelineError> {
    for c in theta {
        c.check(k)?;
        if c.degree < 3 || c.degree % 2 == 0 {
            return Err(PipelineError::BadThetaDegree(c.degree));
        }
        if !c.is_closed(k) {
            return Err(PipelineError::NotClosed(c.degree));
        }
    }
    let theta = merge_theta(theta);
    if let Some(obstruction) = cup_square_obstruction(k, &theta) {
        return Err(PipelineError::Obstruction(obstruction));
    }
    let complex = twisted_cochain_complex(k, p, rho)?;
    let twists = theta
        .iter()
        .map(|c| TwistComponent {
            degree: c.degree,
            maps: (0..=k.dimension()).map(|s| cup_matrix(k, p, rho, c, s)).collect(),
        })
        .collect();
    let module = DGModuleInput::new(complex, twists)?;
    Ok(MwComplex { theta, module })
}

impl MwComplex {
    /// Nonzero components, one per degree.
    pub fn theta(&self) -> &[Cochain] {
        &self.theta
    }

    pub fn module(&self) -> &DGModuleInput {
        &self.module
    }

    /// The untwisted local-coefficient complex.
    pub fn complex(&self) -> &BasedComplex {
        self.module.complex()
    }

    pub fn z2(&self) -> &Z2Complex {
        self.module.total()
    }

    /// `(dim H^ev, dim H^od)` of `∂_ϑ`.
    pub fn cohomology_dims(&self) -> (usize, usize) {
        self.z2().cohomology_dims()
    }

    pub fn spectral_sequence(&self, r_max: usize) -> Result<SpectralSequence, PipelineError> {
        let f = parity_filtration(&self.module)?;
        Ok(SpectralSequence::new(&f, r_max)?)
    }
}

fn require_unimodular(rho: &Representation) -> Result<(), PipelineError> {
    if rho.is_unimodular() {
        Ok(())
    } else {
        Err(PipelineError::NotUnimodular)
    }
}

/// `τ(K, E)` against the given (or default) cohomology representatives of
/// the twisted cochain complex.
pub fn reidemeister_torsion(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    bases: Option<&[Vec<Vector>]>,
) -> Result<TorsionResult, PipelineError> {
    require_unimodular(rho)?;
    let c = twisted_cochain_complex(k, p, rho)?;
    torsion_of_complex(&c, bases)
}

fn torsion_of_complex(c: &BasedComplex, bases: Option<&[Vec<Vector>]>) -> Result<TorsionResult, PipelineError> {
    let bases = bases.map_or_else(|| c.default_cohomology_basis(), <[_]>::to_vec);
    let tau = km_scalar(c, &bases)?;
    TorsionResult::new(tau, CohomologyBases::Graded(bases), vec![Route::KnudsenMumford])
}

/// `τ_MW(K, E, ϑ)` against the given (or default) twisted representatives.
pub fn tau_mw(
    mw: &MwComplex,
    rho: &Representation,
    twisted: Option<(&[Vector], &[Vector])>,
) -> Result<TorsionResult, PipelineError> {
    require_unimodular(rho)?;
    let (even, odd) = twisted_bases(mw, twisted);
    let tau = lemma1_scalar(mw.z2(), &even, &odd)?;
    TorsionResult::new(tau, CohomologyBases::Twisted { even, odd }, vec![Route::Lemma1])
}

fn twisted_bases(mw: &MwComplex, twisted: Option<(&[Vector], &[Vector])>) -> (Vec<Vector>, Vec<Vector>) {
    match twisted {
        Some((e, o)) => (e.to_vec(), o.to_vec()),
        None => mw.z2().default_cohomology_basis(),
    }
}

/// `τ_twist`: `τ(K, E)` carried to `det H(C, ∂_ϑ)` along the spectral
/// chain, checked against the direct four-term route.
pub fn tau_twist(
    mw: &MwComplex,
    rho: &Representation,
    untwisted: Option<&[Vec<Vector>]>,
    twisted: Option<(&[Vector], &[Vector])>,
) -> Result<TorsionResult, PipelineError> {
    require_unimodular(rho)?;
    let tau = torsion_of_complex(mw.complex(), untwisted)?;
    let CohomologyBases::Graded(h) = &tau.bases else { unreachable!("graded bases") };
    let (even, odd) = twisted_bases(mw, twisted);
    let f = parity_filtration(mw.module())?;
    let chain = twisted_det_chain(&f, &untwisted_page_bases(mw.module(), h), &even, &odd)?;
    let spectral = tau.coordinate() * chain;
    let direct = lemma1_scalar(mw.z2(), &even, &odd)?;
    if abs(&spectral) != abs(&direct) {
        return Err(PipelineError::RouteMismatch { direct: Box::new(direct), spectral: Box::new(spectral) });
    }
    TorsionResult::new(
        spectral,
        CohomologyBases::Twisted { even, odd },
        vec![Route::KnudsenMumford, Route::SpectralChain, Route::Lemma1],
    )
}

/// The cochains `ϑ = ∫ t` of closed piecewise forms.
pub fn theta_from_forms(k: &OrderedComplex, t: &[PiecewiseForm]) -> Result<Vec<Cochain>, PipelineError> {
    t.iter()
        .map(|c| {
            c.check_compatible(k)?;
            if !c.exterior_derivative().is_zero() {
                return Err(PipelineError::NotClosed(c.degree()));
            }
            Ok(c.integration_map(k))
        })
        .collect()
}

/// Whitney lifts of the nonzero components.
pub fn whitney_twist(k: &OrderedComplex, theta: &[Cochain]) -> Result<Vec<PiecewiseForm>, PipelineError> {
    merge_theta(theta).iter().map(|c| Ok(PiecewiseForm::whitney_lift(k, c)?)).collect()
}

/// Twisted cohomology dimensions in both models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelComparison {
    pub mw: (usize, usize),
    pub dupont: StabilizationReport,
}

impl ModelComparison {
    pub fn agree(&self) -> bool {
        self.dupont.dims().is_ok_and(|d| d == self.mw)
    }
}

/// MW dimensions next to stabilized Dupont dimensions for `t` the Whitney
/// lift of `ϑ`.
pub fn compare_models(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    theta: &[Cochain],
    max_level: u32,
    sweep: bool,
) -> Result<ModelComparison, PipelineError> {
    let mw = mw_complex(k, p, rho, theta)?;
    let t = whitney_twist(k, theta)?;
    let dupont = stabilized_twisted_cohomology(k, p, rho, &t, max_level, sweep)?;
    Ok(ModelComparison { mw: mw.cohomology_dims(), dupont })
}

/// `e^{b∪}` on the parity spaces, from `(C, ∂_{ϑ+∂b})` to `(C, ∂_ϑ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeTransform {
    pub even: Matrix,
    pub odd: Matrix,
    pub source: MwComplex,
    pub target: MwComplex,
}

impl GaugeTransform {
    pub fn dims(&self) -> ((usize, usize), (usize, usize)) {
        (self.source.cohomology_dims(), self.target.cohomology_dims())
    }
}

fn exp_nilpotent(b: &Matrix) -> Result<Matrix, PipelineError> {
    let n = b.rows();
    let mut out = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    let mut m = 1i64;
    loop {
        term = term.mul(b)?.scale(&Rational::new(1.into(), m.into()));
        if term.is_zero() {
            return Ok(out);
        }
        out = out.add(&term)?;
        m += 1;
    }
}

/// The gauge map for an even cochain `b`; verifies
/// `∂_ϑ ∘ e^b = e^b ∘ ∂_{ϑ+∂b}` exactly.
pub fn gauge_transform(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    theta: &[Cochain],
    b: &Cochain,
) -> Result<GaugeTransform, PipelineError> {
    b.check(k)?;
    if b.degree == 0 || b.degree % 2 == 1 {
        return Err(PipelineError::BadGaugeDegree(b.degree));
    }
    let target = mw_complex(k, p, rho, theta)?;
    let mut shifted = theta.to_vec();
    shifted.push(b.coboundary(k));
    let source = mw_complex(k, p, rho, &shifted)?;
    let m = target.module();
    let z = target.z2();
    let mut blocks = [Matrix::zeros(z.even_dim(), z.even_dim()), Matrix::zeros(z.odd_dim(), z.odd_dim())];
    for s in 0..=k.dimension() {
        let block = cup_matrix(k, p, rho, b, s);
        if block.rows() == 0 || block.cols() == 0 {
            continue;
        }
        let (si, ti) = (s as i64, (s + b.degree) as i64);
        let dst = &mut blocks[Parity::of(si).index()];
        dst.set_block(m.offset(ti), m.offset(si), &block);
    }
    let [even, odd] = [exp_nilpotent(&blocks[0])?, exp_nilpotent(&blocks[1])?];
    let (zs, zt) = (source.z2(), target.z2());
    if zt.d_eo().mul(&even)? != odd.mul(zs.d_eo())? || zt.d_oe().mul(&odd)? != even.mul(zs.d_oe())? {
        return Err(PipelineError::NotIntertwining);
    }
    Ok(GaugeTransform { even, odd, source, target })
}

/// A Dupont current split by degree.
pub type MixedCurrent = BTreeMap<usize, DupontElement>;

fn mixed_add(acc: &mut MixedCurrent, x: DupontElement) {
    if x.is_zero() {
        return;
    }
    let n = x.degree();
    let sum = match acc.remove(&n) {
        Some(y) => y.add(&x),
        None => x,
    };
    if !sum.is_zero() {
        acc.insert(n, sum);
    }
}

/// `∂_t = ∂ + t·` on untwisted currents.
pub fn twisted_current_boundary(
    k: &OrderedComplex,
    t: &[PiecewiseForm],
    x: &MixedCurrent,
) -> Result<MixedCurrent, PipelineError> {
    let mut out = MixedCurrent::new();
    for y in x.values() {
        mixed_add(&mut out, dupont_boundary(y));
        for c in t {
            if c.degree() <= y.degree() {
                mixed_add(&mut out, module_action(k, c, y)?);
            }
        }
    }
    Ok(out)
}

/// `e^b · x = Σ_m (b·)^m x / m!` for an even form `b`.
pub fn gauge_current(k: &OrderedComplex, b: &PiecewiseForm, x: &MixedCurrent) -> Result<MixedCurrent, PipelineError> {
    if b.degree() == 0 || b.degree() % 2 == 1 {
        return Err(PipelineError::BadGaugeDegree(b.degree()));
    }
    let mut out = x.clone();
    let mut term = x.clone();
    let mut m = 1i64;
    while !term.is_empty() {
        let scale = Rational::new(1.into(), m.into());
        let mut next = MixedCurrent::new();
        for y in term.values() {
            if b.degree() <= y.degree() {
                mixed_add(&mut next, module_action(k, b, y)?.scale(&scale));
            }
        }
        for y in next.values() {
            mixed_add(&mut out, y.clone());
        }
        term = next;
        m += 1;
    }
    Ok(out)
}

/// Checks `∂_t(e^b x) = e^b ∂_{t+db} x` on one current.
pub fn gauge_intertwines_currents(
    k: &OrderedComplex,
    t: &[PiecewiseForm],
    b: &PiecewiseForm,
    x: &MixedCurrent,
) -> Result<bool, PipelineError> {
    let lhs = twisted_current_boundary(k, t, &gauge_current(k, b, x)?)?;
    let mut shifted = t.to_vec();
    shifted.push(b.exterior_derivative());
    let rhs = gauge_current(k, b, &twisted_current_boundary(k, &shifted, x)?)?;
    Ok(lhs == rhs)
}

/// A second presentation of the same complex with the representation and
/// the cochain isomorphisms carried over.
#[derive(Debug, Clone)]
pub struct Rebased {
    pub presentation: Pi1Presentation,
    pub representation: Representation,
    /// `maps[q]`: `C^q` under the old presentation to `C^q` under the new.
    pub maps: Vec<Matrix>,
}

pub fn rebase(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    presentation: Pi1Presentation,
) -> Result<Rebased, PipelineError> {
    let id = SimplicialMap::new(k, k, (0..k.vertex_count()).collect())?;
    let pb = PulledBack::with_presentation(&id, k, presentation, p, rho)?;
    let maps = (0..=k.dimension()).map(|q| pb.cochain_map(&id, k, k, q)).collect();
    Ok(Rebased { presentation: pb.presentation, representation: pb.representation, maps })
}

/// Applies degree-wise maps to representatives.
pub fn transport_bases(maps: &[Matrix], bases: &[Vec<Vector>]) -> Result<Vec<Vec<Vector>>, PipelineError> {
    bases.iter().zip(maps).map(|(b, m)| b.iter().map(|v| m.mul_vec(v).map_err(PipelineError::from)).collect()).collect()
}

/// One barycentric subdivision against the original.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionReport {
    pub betti: (Vec<usize>, Vec<usize>),
    pub mw_dims: ((usize, usize), (usize, usize)),
    /// `τ(K, E)` and `τ(K', E')` with bases carried over by the pullback.
    pub torsion: Option<(Rational, Rational)>,
    /// `τ_twist` on both sides, when both are acyclic.
    pub twisted_torsion: Option<(Rational, Rational)>,
}

impl SubdivisionReport {
    pub fn dims_agree(&self) -> bool {
        self.betti.0 == self.betti.1 && self.mw_dims.0 == self.mw_dims.1
    }

    fn ratio(pair: &Option<(Rational, Rational)>) -> Option<Rational> {
        pair.as_ref().map(|(a, b)| b / a)
    }

    pub fn torsion_ratio(&self) -> Option<Rational> {
        Self::ratio(&self.torsion)
    }

    pub fn twisted_torsion_ratio(&self) -> Option<Rational> {
        Self::ratio(&self.twisted_torsion)
    }

    /// Every available ratio is `±1`.
    pub fn ratios_are_units(&self) -> bool {
        [self.torsion_ratio(), self.twisted_torsion_ratio()].iter().flatten().all(|r| r.abs().is_one())
    }
}

/// Builds `K'`, `ρ∘g_*` for the simplicial approximation `g` of the
/// identity, and `ϑ' = ∫ ς(t)`; compares dimensions and torsions.
pub fn subdivision_compare(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    theta: &[Cochain],
) -> Result<SubdivisionReport, PipelineError> {
    let sub = barycentric_subdivision(k);
    let kp = &sub.complex;
    let g = approx_identity(&sub, k)?;
    let pb = PulledBack::new(&g, kp, p.base(), p, rho)?;
    let (pp, rp) = (&pb.presentation, &pb.representation);
    let t = whitney_twist(k, theta)?;
    let theta_p = t
        .iter()
        .map(|c| Ok(c.restrict_subdivision(k, &sub)?.integration_map(kp)))
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let mw = mw_complex(k, p, rho, theta)?;
    let mw_p = mw_complex(kp, pp, rp, &theta_p)?;
    let c = mw.complex();
    let c_p = mw_p.complex();
    let betti = (c.cohomology_dims(), c_p.cohomology_dims());
    let mw_dims = (mw.cohomology_dims(), mw_p.cohomology_dims());
    let (torsion, twisted_torsion) = if rho.is_unimodular() {
        let h = c.default_cohomology_basis();
        let maps: Vec<Matrix> = (0..=k.dimension()).map(|q| pb.cochain_map(&g, kp, k, q)).collect();
        let h_p = transport_bases(&maps, &h)?;
        let a = reidemeister_torsion(k, p, rho, Some(&h))?;
        let b = reidemeister_torsion(kp, pp, rp, Some(&h_p))?;
        let torsion = Some((a.coordinate().clone(), b.coordinate().clone()));
        let twisted = if mw_dims.0 == (0, 0) && mw_dims.1 == (0, 0) {
            let a = tau_twist(&mw, rho, None, None)?;
            let b = tau_twist(&mw_p, rp, None, None)?;
            Some((a.coordinate().clone(), b.coordinate().clone()))
        } else {
            None
        };
        (torsion, twisted)
    } else {
        (None, None)
    };
    Ok(SubdivisionReport { betti, mw_dims, torsion, twisted_torsion })
}

/// Presentation from the breadth-first tree at vertex 0 with the trivial
/// representation of rank `dim`.
pub fn trivial_coefficients(
    k: &OrderedComplex,
    dim: usize,
) -> Result<(Pi1Presentation, Representation), PipelineError> {
    let p = fundamental_group(k, 0)?;
    let rho = Representation::trivial(&p, dim);
    Ok((p, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::{rat, ratio};
    use crate::forms::PolyForm;

    fn circle(x: i64) -> (OrderedComplex, Pi1Presentation, Representation) {
        let k = OrderedComplex::simplex_boundary(2);
        let p = fundamental_group(&k, 0).unwrap();
        let r = Representation::new(&p, 1, vec![Matrix::from_i64(&[&[x]])]).unwrap();
        (k, p, r)
    }

    fn s3() -> (OrderedComplex, Pi1Presentation, Representation, Cochain) {
        let k = OrderedComplex::simplex_boundary(4);
        let (p, r) = trivial_coefficients(&k, 1).unwrap();
        let theta = k.orientation_cocycle().unwrap();
        (k, p, r, theta)
    }

    fn s1s2() -> (OrderedComplex, Pi1Presentation, Representation, Cochain) {
        let k = OrderedComplex::simplex_boundary(2).product(&OrderedComplex::simplex_boundary(3));
        let (p, r) = trivial_coefficients(&k, 1).unwrap();
        let theta = k.orientation_cocycle().unwrap();
        (k, p, r, theta)
    }

    #[test]
    fn circle_torsion() {
        let (k, p, r) = circle(-1);
        let t = reidemeister_torsion(&k, &p, &r, None).unwrap();
        assert_eq!(abs(t.coordinate()), rat(2));
        let (k, p, r) = circle(3);
        assert_eq!(reidemeister_torsion(&k, &p, &r, None).unwrap_err(), PipelineError::NotUnimodular);
        let mw = mw_complex(&k, &p, &r, &[]).unwrap();
        assert_eq!(mw.cohomology_dims(), (0, 0));
    }

    #[test]
    fn contractible_torsion_is_unit() {
        let k = OrderedComplex::simplex(2);
        let (p, r) = trivial_coefficients(&k, 1).unwrap();
        let t = reidemeister_torsion(&k, &p, &r, None).unwrap();
        assert_eq!(abs(t.coordinate()), rat(1));
    }

    #[test]
    fn mw_dims_on_spheres() {
        let (k, p, r, theta) = s3();
        let mw = mw_complex(&k, &p, &r, &[theta]).unwrap();
        assert_eq!(mw.cohomology_dims(), (0, 0));
        let (k, p, r, theta) = s1s2();
        let mw = mw_complex(&k, &p, &r, &[theta]).unwrap();
        assert_eq!(mw.cohomology_dims(), (1, 1));
    }

    #[test]
    fn routes_agree() {
        for (k, p, r, theta) in [s3(), s1s2()] {
            let mw = mw_complex(&k, &p, &r, &[theta]).unwrap();
            let a = tau_twist(&mw, &r, None, None).unwrap();
            let b = tau_mw(&mw, &r, None).unwrap();
            assert!(a.agrees_up_to_sign(&b));
        }
    }

    #[test]
    fn zero_theta_collapses() {
        let (k, p, r) = circle(-1);
        let mw = mw_complex(&k, &p, &r, &[]).unwrap();
        let a = tau_twist(&mw, &r, None, None).unwrap();
        let b = reidemeister_torsion(&k, &p, &r, None).unwrap();
        assert!(a.agrees_up_to_sign(&b));
    }

    #[test]
    fn obstruction_reported() {
        // a 3-cocycle on the join-like 6-dimensional simplex boundary cups
        // nontrivially with itself
        let k = OrderedComplex::simplex_boundary(7);
        let (p, r) = trivial_coefficients(&k, 1).unwrap();
        let b = Cochain { degree: 2, values: (0..k.count(2)).map(|i| rat(i as i64 % 3)).collect() };
        let theta = b.coboundary(&k);
        match mw_complex(&k, &p, &r, &[theta]) {
            Err(PipelineError::Obstruction(c)) => assert_eq!(c.degree, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_even_theta() {
        let (k, p, r, _) = s3();
        let c = Cochain::zero(&k, 2);
        assert_eq!(mw_complex(&k, &p, &r, &[c]).unwrap_err(), PipelineError::BadThetaDegree(2));
    }

    #[test]
    fn gauge_on_s3() {
        let (k, p, r, theta) = s3();
        let b = Cochain { degree: 2, values: (0..k.count(2)).map(|i| ratio(i as i64 - 3, 2)).collect() };
        let g = gauge_transform(&k, &p, &r, &[theta], &b).unwrap();
        let (a, c) = g.dims();
        assert_eq!(a, c);
        let zero = Cochain::zero(&k, 2);
        let (_, _, _, theta) = s3();
        let g = gauge_transform(&k, &p, &r, &[theta], &zero).unwrap();
        assert_eq!(g.even, Matrix::identity(g.even.rows()));
    }

    #[test]
    fn gauge_on_currents() {
        let (k, _, _, theta) = s3();
        let t = PiecewiseForm::whitney_lift(&k, &theta).unwrap();
        let b = Cochain { degree: 2, values: (0..k.count(2)).map(|i| rat(i as i64 % 4 - 1)).collect() };
        let bf = PiecewiseForm::whitney_map(&k, &b);
        let mut x = MixedCurrent::new();
        let w = PolyForm::parse(3, "2*x1*x2 + 1").unwrap();
        x.insert(3, DupontElement::single(3, vec![0, 1, 2, 3], w).unwrap());
        assert!(gauge_intertwines_currents(&k, &[t], &bf, &x).unwrap());
    }

    #[test]
    fn subdivision_of_circle() {
        let (k, p, r) = circle(-1);
        let rep = subdivision_compare(&k, &p, &r, &[]).unwrap();
        assert!(rep.dims_agree());
        let (a, b) = rep.torsion.clone().unwrap();
        assert_eq!((abs(&a), abs(&b)), (rat(2), rat(2)));
        assert!(rep.ratios_are_units());
    }

    #[test]
    fn rebasing_keeps_torsion() {
        let (k, p, r, _) = s1s2();
        let base = 5;
        let q = fundamental_group(&k, base).unwrap();
        let rb = rebase(&k, &p, &r, q).unwrap();
        let h = twisted_cochain_complex(&k, &p, &r).unwrap().default_cohomology_basis();
        let a = reidemeister_torsion(&k, &p, &r, Some(&h)).unwrap();
        let h2 = transport_bases(&rb.maps, &h).unwrap();
        let b = reidemeister_torsion(&k, &rb.presentation, &rb.representation, Some(&h2)).unwrap();
        assert!(a.agrees_up_to_sign(&b));
    }
}
