use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use twisted_torsion::detline::{
    km_scalar, km_scalar_with_lifts, lemma1_scalar, lemma1_scalar_with, BasedComplex, Z2Complex,
};
use twisted_torsion::dupont::DupontWindow;
use twisted_torsion::exactlin::{column_space_analysis, extend_independent, rat, unit_vector};
use twisted_torsion::forms::{for_each_subset, PiecewiseForm, PolyForm};
use twisted_torsion::pipeline::{mw_complex, trivial_coefficients, whitney_twist, MwComplex};
use twisted_torsion::simplicial::{scalar_cup, twisted_coboundary, twisted_cochain_complex, Cochain, OrderedComplex};
use twisted_torsion::spectral::{parity_filtration, Parity, SpectralSequence};
use twisted_torsion::{Matrix, Rational, SparseMatrix, Vector};

use super::{is_trivial, random_elementary, random_rational, seeded, Fixture};

pub const TRIALS: usize = 20;

pub fn simplicial_square_zero(f: &Fixture) -> bool {
    (1..f.k.dimension()).all(|q| f.k.boundary_matrix(q).mul(&f.k.boundary_matrix(q + 1)).unwrap().is_zero())
}

pub fn twisted_square_zero(f: &Fixture) -> bool {
    (0..f.k.dimension().saturating_sub(1)).all(|q| {
        let a = twisted_coboundary(&f.k, &f.p, &f.rho, q);
        let b = twisted_coboundary(&f.k, &f.p, &f.rho, q + 1);
        b.mul(&a).unwrap().is_zero()
    })
}

pub fn mw_square_zero(f: &Fixture) -> bool {
    let mw = mw_complex(&f.k, &f.p, &f.rho, &f.theta).unwrap();
    let z = mw.z2();
    z.d_oe().mul(z.d_eo()).unwrap().is_zero() && z.d_eo().mul(z.d_oe()).unwrap().is_zero()
}

/// Assembles `∂ + Σ t_k` on the whole window and squares it.
pub fn dupont_square_zero(f: &Fixture, level: u32) -> bool {
    let t = whitney_twist(&f.k, &f.theta).unwrap();
    let top = f.k.dimension();
    let w = DupontWindow::build(&f.k, &f.p, &f.rho, &t, &vec![level; top + 1]).unwrap();
    let mut offsets = vec![0usize];
    for n in 0..=top {
        offsets.push(offsets[n] + w.dim(n));
    }
    let total = offsets[top + 1];
    let mut trip = Vec::new();
    let mut push = |m: &SparseMatrix, from: usize, to: usize| {
        for c in 0..m.cols() {
            for (r, v) in m.column(c) {
                trip.push((offsets[to] + r, offsets[from] + c, v.clone()));
            }
        }
    };
    for n in 1..=top {
        push(w.boundary(n), n, n - 1);
    }
    for a in w.actions() {
        for n in a.form_degree..=top {
            push(a.maps[n].as_ref().unwrap(), n, n - a.form_degree);
        }
    }
    let d = SparseMatrix::from_triplets(total, total, trip);
    d.mul(&d).unwrap().is_zero()
}

/// A random `degree`-form on `Δ^dim` with coefficients of degree at most 2.
pub fn random_form(rng: &mut impl Rng, dim: usize, degree: usize) -> PolyForm {
    let mut out = PolyForm::zero(dim, degree, 2);
    let mut dxs = Vec::new();
    for_each_subset(dim, degree, &mut |s: &[usize]| dxs.push(s.to_vec()));
    for _ in 0..rng.gen_range(1..=4) {
        let mut exps = vec![0u32; dim];
        for _ in 0..rng.gen_range(0..=2) {
            exps[rng.gen_range(0..dim)] += 1;
        }
        let dx = dxs.choose(rng).unwrap();
        out = out.add(&PolyForm::monomial(dim, random_rational(rng), &exps, dx).unwrap());
    }
    out
}

/// `Σ_i (-1)^i ∫_{∂_i Δ} ω`.
pub fn boundary_integral(w: &PolyForm) -> Rational {
    let mut total = Rational::zero();
    for i in 0..=w.dim() {
        let v = w.face(i).integrate().unwrap();
        if i % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

pub fn random_cochain(rng: &mut impl Rng, k: &OrderedComplex, degree: usize) -> Cochain {
    Cochain { degree, values: (0..k.count(degree)).map(|_| rat(rng.gen_range(-3..=3))).collect() }
}

/// A random compatible piecewise form: sums of products of the piecewise
/// barycentric functions and their differentials.
pub fn random_piecewise(rng: &mut impl Rng, k: &OrderedComplex, degree: usize) -> PiecewiseForm {
    let n = k.vertex_count();
    let lambda = |v: usize| {
        let mut e = Cochain::zero(k, 0);
        e.values[v] = rat(1);
        PiecewiseForm::whitney_map(k, &e)
    };
    let mut out = PiecewiseForm::zero(k, degree);
    for _ in 0..rng.gen_range(1..=3) {
        let mut term = PiecewiseForm::constant(k, random_rational(rng));
        for _ in 0..rng.gen_range(0..=2) {
            term = term.wedge(&lambda(rng.gen_range(0..n)));
        }
        for _ in 0..degree {
            term = term.wedge(&lambda(rng.gen_range(0..n)).exterior_derivative());
        }
        out = out.add(&term);
    }
    out
}

pub fn small_complexes() -> Vec<OrderedComplex> {
    vec![
        OrderedComplex::simplex(2),
        OrderedComplex::simplex(3),
        OrderedComplex::simplex_boundary(3),
        OrderedComplex::simplex_boundary(4),
    ]
}

/// `Σ_j g_{ji} v_j` for each column `i` of `g`.
pub fn recombine(vs: &[Vector], g: &Matrix) -> Vec<Vector> {
    (0..g.cols())
        .map(|i| {
            let mut out = vec![rat(0); vs[0].len()];
            for (j, v) in vs.iter().enumerate() {
                for (o, x) in out.iter_mut().zip(v) {
                    *o += &g[(j, i)] * x;
                }
            }
            out
        })
        .collect()
}

/// Lifts `b G + K X` for a random invertible `G` and random kernel mix.
pub fn random_lifts(rng: &mut impl Rng, c: &BasedComplex) -> Vec<Vec<Vector>> {
    c.default_lifts()
        .into_iter()
        .zip(c.degrees())
        .map(|(b, d)| {
            if b.is_empty() {
                return b;
            }
            let mut out = recombine(&b, &random_elementary(rng, b.len()));
            let kernel = column_space_analysis(&c.differential(d)).kernel_basis;
            if kernel.is_empty() {
                return out;
            }
            for v in out.iter_mut() {
                if rng.gen_bool(0.5) {
                    let k = &kernel[rng.gen_range(0..kernel.len())];
                    let s = random_rational(rng);
                    for (x, y) in v.iter_mut().zip(k) {
                        *x += &s * y;
                    }
                }
            }
            out
        })
        .collect()
}

pub fn check_km(name: &str, c: &BasedComplex, seed: u64) {
    let h = c.default_cohomology_basis();
    let reference = km_scalar(c, &h).unwrap();
    let mut rng = seeded(seed);
    for _ in 0..TRIALS {
        let lifts = random_lifts(&mut rng, c);
        assert_eq!(km_scalar_with_lifts(c, &h, &lifts).unwrap(), reference, "{name}");
    }
}

pub fn check_lemma1(name: &str, z: &Z2Complex, seed: u64) {
    let (even, odd) = z.default_cohomology_basis();
    let reference = lemma1_scalar(z, &even, &odd).unwrap();
    let a = z.default_image_basis();
    let mut rng = seeded(seed);
    for _ in 0..TRIALS {
        let a2 = if a.is_empty() { a.clone() } else { recombine(&a, &random_elementary(&mut rng, a.len())) };
        let four = z.four_term_complex(&a2).unwrap();
        let lifts = random_lifts(&mut rng, &four);
        assert_eq!(lemma1_scalar_with(z, &even, &odd, &a2, Some(&lifts)).unwrap(), reference, "{name}");
        assert_eq!(lemma1_scalar_with(z, &even, &odd, &a2, None).unwrap(), reference, "{name}");
    }
}

/// Twisted cohomology dimensions from ranks of `δ + ϑ∪` assembled column
/// by column from the cochain-level coboundary and cup product.
pub fn rank_oracle(f: &Fixture) -> (usize, usize) {
    let k = &f.k;
    let top = k.dimension();
    let offsets: Vec<usize> = (0..=top).map(|q| (0..q).filter(|j| j % 2 == q % 2).map(|j| k.count(j)).sum()).collect();
    let size = |parity: usize| (0..=top).filter(|q| q % 2 == parity).map(|q| k.count(q)).sum::<usize>();
    let mut trip: [Vec<_>; 2] = [Vec::new(), Vec::new()];
    for q in 0..=top {
        for i in 0..k.count(q) {
            let e = Cochain { degree: q, values: unit_vector(k.count(q), i) };
            let mut images = Vec::new();
            if q < top {
                let d = if is_trivial(&f.rho) {
                    e.coboundary(k).values
                } else {
                    twisted_coboundary(k, &f.p, &f.rho, q).column(i)
                };
                images.push((q + 1, d));
            }
            for t in &f.theta {
                if q + t.degree <= top {
                    images.push((q + t.degree, scalar_cup(k, t, &e).values));
                }
            }
            for (target, v) in images {
                for (r, x) in v.into_iter().enumerate() {
                    trip[q % 2].push((offsets[target] + r, offsets[q] + i, x));
                }
            }
        }
    }
    let [even_trip, odd_trip] = trip;
    let d_eo = SparseMatrix::from_triplets(size(1), size(0), even_trip);
    let d_oe = SparseMatrix::from_triplets(size(0), size(1), odd_trip);
    let (re, ro) = (d_eo.rank(), d_oe.rank());
    (size(0) - re - ro, size(1) - ro - re)
}

pub type Mixed = Vec<Cochain>;

pub fn zero_mixed(k: &OrderedComplex) -> Mixed {
    (0..=k.dimension()).map(|q| Cochain::zero(k, q)).collect()
}

pub fn add_into(acc: &mut Mixed, c: &Cochain) {
    if c.degree < acc.len() {
        acc[c.degree] = acc[c.degree].add(c);
    }
}

/// `x ↦ δx + Σ ϑ_i ∪ x` on a mixed cochain.
pub fn twisted_d(k: &OrderedComplex, theta: &[Cochain], x: &Mixed) -> Mixed {
    let mut out = zero_mixed(k);
    for c in x {
        if c.degree < k.dimension() {
            add_into(&mut out, &c.coboundary(k));
        }
        for t in theta {
            if t.degree + c.degree <= k.dimension() {
                add_into(&mut out, &scalar_cup(k, t, c));
            }
        }
    }
    out
}

/// `e^b x = Σ_m (b∪)^m x / m!`.
pub fn exp_cup(k: &OrderedComplex, b: &Cochain, x: &Mixed) -> Mixed {
    let mut out = x.clone();
    let mut term = x.clone();
    let mut m = 1i64;
    loop {
        let mut next = zero_mixed(k);
        for c in &term {
            if b.degree + c.degree <= k.dimension() {
                let mut v = scalar_cup(k, b, c);
                v.values.iter_mut().for_each(|y| *y /= Rational::from_integer(m.into()));
                add_into(&mut next, &v);
            }
        }
        if next.iter().all(Cochain::is_zero) {
            return out;
        }
        for c in &next {
            add_into(&mut out, c);
        }
        term = next;
        m += 1;
    }
}

pub fn check_integration_classes(f: &Fixture, seed: u64) {
    let k = &f.k;
    let (p, rho) = trivial_coefficients(k, 1).unwrap();
    let c = twisted_cochain_complex(k, &p, &rho).unwrap();
    let reps = c.default_cohomology_basis();
    let mut rng = seeded(seed);
    for q in 0..=k.dimension() {
        let coboundaries: Vec<Vec<Rational>> = if q == 0 { Vec::new() } else { c.differential(q as i64 - 1).columns() };
        let mut images = Vec::new();
        for v in &reps[q] {
            let z = Cochain { degree: q, values: v.clone() };
            let mut phi = PiecewiseForm::whitney_lift(k, &z).unwrap();
            if q > 0 {
                phi = phi.add(&random_piecewise(&mut rng, k, q - 1).exterior_derivative());
            }
            assert!(phi.exterior_derivative().is_zero());
            let w = phi.integration_map(k).values;
            let diff: Vec<Rational> = w.iter().zip(v).map(|(a, b)| a - b).collect();
            assert!(extend_independent(k.count(q), &coboundaries, &[diff]).is_empty(), "{}", f.name);
            images.push(w);
        }
        assert_eq!(extend_independent(k.count(q), &coboundaries, &images).len(), reps[q].len(), "{}", f.name);
    }
}

pub fn mw(f: &Fixture) -> MwComplex {
    mw_complex(&f.k, &f.p, &f.rho, &f.theta).unwrap()
}

pub fn sequence(m: &MwComplex) -> SpectralSequence {
    let f = parity_filtration(m.module()).unwrap();
    SpectralSequence::new(&f, f.step_count() + 1).unwrap()
}

/// `E_1` has the cochains in degree `p` at `(p, p mod 2)` and `d_1 = ∂`.
pub fn check_first_page(f: &Fixture) {
    let m = mw(f);
    let mut ss = sequence(&m);
    let c = m.complex();
    for p in c.degrees() {
        let parity = Parity::of(p);
        let e1 = ss.page(1).unwrap();
        assert_eq!(e1.cell(p as usize, parity).unwrap().dim(), c.dim(p), "{}", f.name);
        assert_eq!(e1.cell(p as usize, parity.flip()).unwrap().dim(), 0, "{}", f.name);
        let units: Vec<Vector> = (0..c.dim(p)).map(|i| m.module().embed(p, &unit_vector(c.dim(p), i)).1).collect();
        ss.set_representatives(1, p as usize, parity, units).unwrap();
    }
    for p in c.degrees().filter(|&p| p < c.end()) {
        let d1 = ss.differential(1, p as usize, Parity::of(p)).unwrap();
        assert_eq!(d1, c.differential(p), "{}: d1 at {p}", f.name);
    }
}
