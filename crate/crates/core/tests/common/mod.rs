#![allow(dead_code, clippy::needless_range_loop)]

pub mod checks;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twisted_torsion::exactlin::rat;
use twisted_torsion::pipeline::trivial_coefficients;
use twisted_torsion::simplicial::{fundamental_group, Cochain, OrderedComplex, Pi1Presentation, Representation};
use twisted_torsion::{Matrix, Rational, Vector};

pub struct Fixture {
    pub name: String,
    pub k: OrderedComplex,
    pub p: Pi1Presentation,
    pub rho: Representation,
    pub theta: Vec<Cochain>,
}

fn trivial(name: &str, k: OrderedComplex, theta: Vec<Cochain>) -> Fixture {
    let (p, rho) = trivial_coefficients(&k, 1).unwrap();
    Fixture { name: name.into(), k, p, rho, theta }
}

pub fn simplex2() -> Fixture {
    trivial("simplex2", OrderedComplex::simplex(2), Vec::new())
}

pub fn circle(x: i64) -> Fixture {
    let k = OrderedComplex::simplex_boundary(2);
    let p = fundamental_group(&k, 0).unwrap();
    let rho = Representation::new(&p, 1, vec![Matrix::from_i64(&[&[x]])]).unwrap();
    Fixture { name: format!("circle({x})"), k, p, rho, theta: Vec::new() }
}

pub fn sphere2() -> Fixture {
    trivial("sphere2", OrderedComplex::simplex_boundary(3), Vec::new())
}

pub fn sphere3() -> Fixture {
    let k = OrderedComplex::simplex_boundary(4);
    let theta = vec![k.orientation_cocycle().unwrap()];
    trivial("sphere3", k, theta)
}

pub fn s1xs2() -> Fixture {
    let k = OrderedComplex::simplex_boundary(2).product(&OrderedComplex::simplex_boundary(3));
    let theta = vec![k.orientation_cocycle().unwrap()];
    trivial("s1xs2", k, theta)
}

/// A connected 3-complex on at most 8 vertices: a few random tetrahedra
/// and a path through all vertices, with a random integral 3-cochain.
pub fn random_complex(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(5..=8);
    let mut maximal: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    let tets = rng.gen_range(2..=4);
    let vertices: Vec<usize> = (0..n).collect();
    for _ in 0..tets {
        let mut t: Vec<usize> = vertices.choose_multiple(&mut rng, 4).copied().collect();
        t.sort_unstable();
        maximal.push(t);
    }
    let names = (0..n).map(|i| format!("v{i}")).collect();
    let k = OrderedComplex::new(names, &maximal).unwrap();
    let values = (0..k.count(3)).map(|_| rat(rng.gen_range(-2..=2))).collect();
    let theta = vec![Cochain { degree: 3, values }];
    trivial(&format!("random({seed})"), k, theta)
}

pub fn random_complexes() -> Vec<Fixture> {
    (0..10).map(random_complex).collect()
}

pub fn all_fixtures() -> Vec<Fixture> {
    let mut out = vec![simplex2(), circle(-1), sphere2(), sphere3(), s1xs2()];
    out.extend(random_complexes());
    out
}

pub fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into())
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> Vector {
    (0..len).map(|_| random_rational(rng)).collect()
}

pub fn random_invertible(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let rows = (0..n).map(|_| random_vector(rng, n)).collect();
        let m = Matrix::from_rows(rows).unwrap();
        if m.rank() == n {
            return m;
        }
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An invertible matrix built from a few random elementary column
/// operations, so that sparse inputs stay sparse.
pub fn random_elementary(rng: &mut impl Rng, n: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    for _ in 0..n.min(6) {
        let i = rng.gen_range(0..n);
        if n > 1 && rng.gen_bool(0.7) {
            let j = (i + rng.gen_range(1..n)) % n;
            let s = rat(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
            for r in 0..n {
                let v = &m[(r, j)] * &s;
                m[(r, i)] += v;
            }
        } else {
            let s = [rat(-1), rat(2), Rational::new(1.into(), 3.into())][rng.gen_range(0..3)].clone();
            for r in 0..n {
                let v = &m[(r, i)] * &s;
                m[(r, i)] = v;
            }
        }
    }
    m
}

/// The sign character `γ ↦ (-1)^{z(γ)}` of a mod-2 one-cocycle `z`, given
/// on ordered edges.
pub fn sign_character(p: &Pi1Presentation, z: impl Fn(usize, usize) -> bool) -> Representation {
    let path_parity = |v: usize| p.tree_path(v).windows(2).filter(|e| z(e[0], e[1])).count();
    let matrices = p
        .generators()
        .iter()
        .map(|&(a, b)| {
            let n = path_parity(a) + usize::from(z(a, b)) + path_parity(b);
            Matrix::from_i64(&[&[if n % 2 == 0 { 1 } else { -1 }]])
        })
        .collect();
    Representation::new(p, 1, matrices).unwrap()
}

/// `S^1 × S^2` with the sign representation around the circle factor and
/// the orientation twist; acyclic.
pub fn s1xs2_sign() -> Fixture {
    let mut f = s1xs2();
    let crosses = |a: usize, b: usize| {
        let (i, j) = (a / 4, b / 4);
        (i.min(j), i.max(j)) == (0, 2)
    };
    f.rho = sign_character(&f.p, crosses);
    f.name = "s1xs2-sign".into();
    f
}

pub fn is_trivial(rho: &Representation) -> bool {
    rho.matrices().iter().all(|m| *m == Matrix::identity(m.rows()))
}
