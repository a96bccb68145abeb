mod common;

use common::{all_fixtures, s1xs2_sign, seeded, Fixture};
use rand::seq::SliceRandom;
use rand::Rng;
use twisted_torsion::exactlin::rat;
use twisted_torsion::pipeline::{gauge_transform, rebase, reidemeister_torsion, subdivision_compare, transport_bases};
use twisted_torsion::simplicial::{twisted_cochain_complex, Cochain, OrderedComplex, Pi1Presentation};

fn random_tree(rng: &mut impl Rng, k: &OrderedComplex) -> Pi1Presentation {
    let n = k.vertex_count();
    let mut edges: Vec<(usize, usize)> = k.simplices(1).iter().map(|e| (e[0], e[1])).collect();
    edges.shuffle(rng);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], v: usize) -> usize {
        let mut r = v;
        while parent[r] != r {
            r = parent[r];
        }
        parent[v] = r;
        r
    }
    let mut tree = Vec::new();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            tree.push((a, b));
        }
    }
    Pi1Presentation::from_spanning_tree(k, rng.gen_range(0..n), &tree).unwrap()
}

fn fixtures() -> Vec<Fixture> {
    let mut out = all_fixtures();
    out.push(s1xs2_sign());
    out
}

#[test]
fn torsion_independent_of_fundamental_domain() {
    let mut rng = seeded(77);
    for f in fixtures() {
        let h = twisted_cochain_complex(&f.k, &f.p, &f.rho).unwrap().default_cohomology_basis();
        let base = reidemeister_torsion(&f.k, &f.p, &f.rho, Some(&h)).unwrap();
        for _ in 0..5 {
            let q = random_tree(&mut rng, &f.k);
            let rb = rebase(&f.k, &f.p, &f.rho, q).unwrap();
            let h2 = transport_bases(&rb.maps, &h).unwrap();
            let t = reidemeister_torsion(&f.k, &rb.presentation, &rb.representation, Some(&h2)).unwrap();
            assert!(t.agrees_up_to_sign(&base), "{}", f.name);
        }
    }
}

#[test]
fn gauge_intertwines_on_every_fixture() {
    let mut rng = seeded(78);
    for f in fixtures() {
        if f.k.dimension() < 2 {
            continue;
        }
        let b = Cochain { degree: 2, values: (0..f.k.count(2)).map(|_| rat(rng.gen_range(-2..=2))).collect() };
        let g = gauge_transform(&f.k, &f.p, &f.rho, &f.theta, &b).unwrap();
        let (source, target) = g.dims();
        assert_eq!(source, target, "{}", f.name);
    }
}

#[test]
fn torsion_ratio_across_subdivision_is_a_sign() {
    for f in fixtures().into_iter().filter(|f| f.name.starts_with("random")) {
        let rep = subdivision_compare(&f.k, &f.p, &f.rho, &f.theta).unwrap();
        assert!(rep.dims_agree(), "{}", f.name);
        assert!(rep.ratios_are_units(), "{}: {:?}", f.name, rep);
    }
}
