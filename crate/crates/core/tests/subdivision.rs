mod common;

use common::{circle, sphere2, sphere3, Fixture};
use twisted_torsion::exactlin::{abs, rat};
use twisted_torsion::pipeline::subdivision_compare;
use twisted_torsion::pipeline::SubdivisionReport;
use twisted_torsion::simplicial::{barycentric_subdivision, betti_numbers};

fn check(f: &Fixture, expect_twisted: bool) -> SubdivisionReport {
    let rep = subdivision_compare(&f.k, &f.p, &f.rho, &f.theta).unwrap();
    assert!(rep.dims_agree(), "{}: {:?}", f.name, rep);
    assert!(rep.torsion.is_some(), "{}", f.name);
    assert_eq!(rep.twisted_torsion.is_some(), expect_twisted, "{}", f.name);
    assert!(rep.ratios_are_units(), "{}: {:?}", f.name, rep);
    let sub = barycentric_subdivision(&f.k);
    assert_eq!(betti_numbers(&sub.complex), betti_numbers(&f.k), "{}", f.name);
    rep
}

#[test]
fn circle_with_sign_representation() {
    let rep = check(&circle(-1), true);
    let (a, b) = rep.torsion.unwrap();
    assert_eq!((abs(&a), abs(&b)), (rat(2), rat(2)));
}

#[test]
fn trivial_circle_and_sphere() {
    let _ = check(&circle(1), false);
    let _ = check(&sphere2(), false);
}

#[test]
fn three_sphere_with_orientation_twist() {
    let rep = check(&sphere3(), true);
    assert_eq!(rep.mw_dims, ((0, 0), (0, 0)));
}
