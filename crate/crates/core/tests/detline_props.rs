mod common;

use common::{random_invertible, random_vector, seeded};
use proptest::prelude::*;
use rand::Rng;
use twisted_torsion::detline::{km_scalar, lemma1_scalar, BasedComplex, Z2Complex};
use twisted_torsion::exactlin::{abs, determinant};
use twisted_torsion::{Matrix, Vector};

/// A random complex `0 -> Q^a -> Q^b -> Q^c -> 0`; the rows of `d2` are
/// random combinations of the left kernel of `d1`.
fn random_three_term(rng: &mut impl Rng) -> BasedComplex {
    let (a, b, c) = (rng.gen_range(1..=3), rng.gen_range(2..=4), rng.gen_range(1..=3));
    let d1 = Matrix::from_rows((0..b).map(|_| random_vector(rng, a)).collect()).unwrap();
    let cs = twisted_torsion::exactlin::column_space_analysis(&d1.transpose());
    let left: Vec<Vector> = cs.kernel_basis;
    let mut rows = Vec::new();
    for _ in 0..c {
        let mut r = vec![twisted_torsion::exactlin::rat(0); b];
        for v in &left {
            let s = common::random_rational(rng);
            for (x, y) in r.iter_mut().zip(v) {
                *x += &s * y;
            }
        }
        rows.push(r);
    }
    let d2 = Matrix::from_rows(rows).unwrap();
    BasedComplex::new(0, vec![a, b, c], vec![d1, d2]).unwrap()
}

fn apply(t: &Matrix, vs: &[Vector]) -> Vec<Vector> {
    vs.iter().map(|v| t.mul_vec(v).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// New reference basis `T e_j` in degree `i`: `τ' = τ det(T)^{(-1)^i}`.
    #[test]
    fn km_transforms_with_reference_basis(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = seeded(seed);
        let c = random_three_term(&mut rng);
        let h = c.default_cohomology_basis();
        let tau = km_scalar(&c, &h).unwrap();
        let n = c.dims()[which];
        let t = random_invertible(&mut rng, n);
        let ti = t.inverse().unwrap().unwrap();
        let mut diffs: Vec<Matrix> = c.differentials().to_vec();
        if which < 2 {
            diffs[which] = diffs[which].mul(&t).unwrap();
        }
        if which > 0 {
            diffs[which - 1] = ti.mul(&diffs[which - 1]).unwrap();
        }
        let c2 = BasedComplex::new(0, c.dims().to_vec(), diffs).unwrap();
        let mut h2 = h.clone();
        h2[which] = apply(&ti, &h[which]);
        let det = determinant(&t).unwrap();
        let expect = if which % 2 == 0 { &tau * &det } else { &tau / &det };
        prop_assert_eq!(km_scalar(&c2, &h2).unwrap(), expect);
    }

    /// The parity collapse of a two-term complex has the same torsion up
    /// to sign.
    #[test]
    fn lemma1_matches_km_on_two_term_complexes(seed in any::<u64>(), a in 1usize..=4, b in 1usize..=4) {
        let mut rng = seeded(seed);
        let d = Matrix::from_rows((0..b).map(|_| random_vector(&mut rng, a)).collect()).unwrap();
        let c = BasedComplex::new(0, vec![a, b], vec![d.clone()]).unwrap();
        let h = c.default_cohomology_basis();
        let z = Z2Complex::new(d, Matrix::zeros(a, b)).unwrap();
        let l = lemma1_scalar(&z, &h[0], &h[1]).unwrap();
        prop_assert_eq!(abs(&l), abs(&km_scalar(&c, &h).unwrap()));
    }
}

/// Frozen sign: the two routes agree on the nose for `diag(2, 3)`.
#[test]
fn lemma1_and_km_sign_on_golden_case() {
    let d = Matrix::diagonal(&[twisted_torsion::exactlin::rat(2), twisted_torsion::exactlin::rat(3)]);
    let c = BasedComplex::new(0, vec![2, 2], vec![d.clone()]).unwrap();
    let z = Z2Complex::new(d, Matrix::zeros(2, 2)).unwrap();
    let k = km_scalar(&c, &[vec![], vec![]]).unwrap();
    let l = lemma1_scalar(&z, &[], &[]).unwrap();
    assert_eq!(k, twisted_torsion::exactlin::rat(6));
    assert_eq!(l, k);
}
