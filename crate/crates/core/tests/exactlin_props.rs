mod common;

use common::{random_vector, seeded};
use proptest::prelude::*;
use rand::Rng;
use twisted_torsion::exactlin::{column_space_analysis, determinant, is_zero_vector, solve};
use twisted_torsion::{Matrix, SparseMatrix};

/// A random matrix whose rank is often deficient.
fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    let mut m = Matrix::from_rows((0..rows).map(|_| random_vector(rng, cols)).collect()).unwrap();
    if rows > 1 && rng.gen_bool(0.5) {
        let (a, b) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
        for c in 0..cols {
            let v = m[(a, c)].clone() * twisted_torsion::exactlin::rat(2);
            m[(b, c)] = v;
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_and_image_are_correct(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7) {
        let mut rng = seeded(seed);
        let m = random_matrix(&mut rng, rows, cols);
        let cs = column_space_analysis(&m);
        for v in &cs.kernel_basis {
            prop_assert!(is_zero_vector(&m.mul_vec(v).unwrap()));
        }
        for w in &cs.image_basis {
            let x = solve(&m, w).unwrap();
            prop_assert!(x.is_some());
            prop_assert_eq!(&m.mul_vec(&x.unwrap()).unwrap(), w);
        }
        prop_assert_eq!(cs.rank + cs.kernel_basis.len(), cols);
        prop_assert_eq!(cs.rank, m.rank());
        prop_assert_eq!(SparseMatrix::from_dense(&m).rank(), cs.rank);
    }

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = seeded(seed);
        let a = random_matrix(&mut rng, n, n);
        let b = random_matrix(&mut rng, n, n);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(determinant(&ab).unwrap(), determinant(&a).unwrap() * determinant(&b).unwrap());
    }

    #[test]
    fn repeated_runs_agree(seed in any::<u64>(), rows in 1usize..6, cols in 1usize..6) {
        let mut rng = seeded(seed);
        let m = random_matrix(&mut rng, rows, cols);
        prop_assert_eq!(column_space_analysis(&m), column_space_analysis(&m.clone()));
        let sq = random_matrix(&mut rng, rows, rows);
        prop_assert_eq!(sq.inverse().unwrap(), sq.inverse().unwrap());
    }
}
