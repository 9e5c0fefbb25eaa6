use gbem_core::solver::{cholesky_solve, lu_solve, Matrix, Method};
use gbem_core::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// `B B^T + n I` from a random square `B`.
fn spd(n: usize, entries: &[f64]) -> Matrix {
    let b = DMatrix::from_row_slice(n, n, &entries[..n * n]);
    let a = &b * b.transpose() + DMatrix::identity(n, n) * n as f64;
    Matrix::from_row_major(n, a.transpose().as_slice().to_vec()).unwrap()
}

proptest! {
    #[test]
    fn cholesky_and_lu_agree(n in 1usize..12, entries in prop::collection::vec(-1.0f64..1.0, 144), rhs in prop::collection::vec(-1.0f64..1.0, 12)) {
        let a = spd(n, &entries);
        let b = &rhs[..n];
        let c = cholesky_solve(&a, b).unwrap();
        let l = lu_solve(&a, b).unwrap();
        prop_assert_eq!(c.method, Method::Cholesky);
        prop_assert_eq!(l.method, Method::Lu);
        prop_assert!(c.residual_norm < 1e-12 && l.residual_norm < 1e-12);
        for (x, y) in c.x.iter().zip(&l.x) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn lu_matches_nalgebra(n in 1usize..10, entries in prop::collection::vec(-1.0f64..1.0, 100), rhs in prop::collection::vec(-1.0f64..1.0, 10)) {
        let mut m = DMatrix::from_row_slice(n, n, &entries[..n * n]);
        for i in 0..n {
            m[(i, i)] += 3.0;
        }
        let a = Matrix::from_row_major(n, m.transpose().as_slice().to_vec()).unwrap();
        let ours = lu_solve(&a, &rhs[..n]).unwrap();
        let theirs = m.lu().solve(&nalgebra::DVector::from_column_slice(&rhs[..n])).unwrap();
        for (x, y) in ours.x.iter().zip(theirs.iter()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }
}

#[test]
fn indefinite_matrix_fails_cholesky() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
    assert!(matches!(cholesky_solve(&a, &[1.0, 0.0]), Err(Error::NotPositiveDefinite { .. })));
    let x = lu_solve(&a, &[1.0, 0.0]).unwrap().x;
    assert!((x[0] + 1.0 / 3.0).abs() < 1e-14 && (x[1] - 2.0 / 3.0).abs() < 1e-14);
}

#[test]
fn singular_matrix_fails_lu() {
    let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
    assert!(matches!(lu_solve(&a, &[1.0, 0.0]), Err(Error::Singular { .. })));
}

#[test]
fn dimension_mismatch_is_reported() {
    assert!(matches!(cholesky_solve(&Matrix::identity(3), &[1.0]), Err(Error::Dimension(_))));
    assert!(matches!(lu_solve(&Matrix::identity(3), &[1.0]), Err(Error::Dimension(_))));
}
