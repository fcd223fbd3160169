//! Dense symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::max_asymmetry;

/// Entries of `A − Aᵀ` above this are rejected.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Runs every decomposition single-threaded, making results bitwise
/// reproducible regardless of the host's core count.
pub fn use_sequential_kernels() {
    faer::set_global_parallelism(faer::Par::Seq);
}

/// Full spectral decomposition, eigenvalues ascending, eigenvectors as the
/// matching unit-norm columns.
pub fn eigensolve_symmetric(matrix: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if !matrix.is_square() {
        return Err(Error::DimensionMismatch { expected: matrix.nrows(), got: matrix.ncols() });
    }
    let asym = max_asymmetry(matrix);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { max_asymmetry: asym });
    }
    let n = matrix.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| matrix[(i, j)]);
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|_| Error::EigenNonConvergence { dim: n })?;
    clear_upper_vector_state();
    let s = eig.S();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| s[i]));
    let vectors = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence { dim: n });
    }
    Ok((values, vectors))
}

/// faer's runtime-dispatched AVX kernels can return with the upper halves
/// of the vector registers dirty. Scalar SSE code run afterwards (the
/// double-double overlap sums) then pays a state-transition penalty on every
/// instruction, measured at ~30x.
#[cfg(target_arch = "x86_64")]
fn clear_upper_vector_state() {
    #[target_feature(enable = "avx")]
    unsafe fn zeroupper() {
        std::arch::x86_64::_mm256_zeroupper();
    }
    if std::arch::is_x86_feature_detected!("avx") {
        // SAFETY: AVX support was detected at runtime.
        unsafe { zeroupper() }
    }
}

#[cfg(not(target_arch = "x86_64"))]
fn clear_upper_vector_state() {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pauli_x() {
        let d = 0.8;
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -d / 2.0, -d / 2.0, 0.0]);
        let (e, _) = eigensolve_symmetric(&m).unwrap();
        assert!((e[0] + d / 2.0).abs() < 1e-15 && (e[1] - d / 2.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_is_fixed() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.0, 1.0]));
        let (e, v) = eigensolve_symmetric(&m).unwrap();
        assert_eq!(e.as_slice(), &[0.0, 1.0, 2.0]);
        assert!((v[(1, 0)].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.1, 0.0]);
        assert!(matches!(eigensolve_symmetric(&m), Err(Error::NotSymmetric { .. })));
    }

    fn symmetric(n: usize, seed: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let x = seed[k % seed.len()] * ((k * 7 + 3) as f64).sin();
                m[(i, j)] = x;
                m[(j, i)] = x;
                k += 1;
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn reconstructs_and_residual(seed in prop::collection::vec(-3.0f64..3.0, 5..20), n in 1usize..50) {
            let m = symmetric(n, &seed);
            let (e, v) = eigensolve_symmetric(&m).unwrap();
            let scale = m.norm().max(1.0);
            for k in 1..n {
                prop_assert!(e[k] >= e[k - 1]);
            }
            let rebuilt = &v * DMatrix::from_diagonal(&e) * v.transpose();
            prop_assert!((rebuilt - &m).amax() < 1e-9 * scale);
            for k in 0..n {
                let r = &m * v.column(k) - v.column(k) * e[k];
                prop_assert!(r.norm() < 1e-9 * scale);
            }
            let gram = v.transpose() * &v - DMatrix::identity(n, n);
            prop_assert!(gram.amax() < 1e-10);
        }
    }

    #[test]
    fn fifty_by_fifty_reconstruction() {
        let seed: Vec<f64> = (0..37).map(|i| (i as f64 * 0.37).cos()).collect();
        let m = symmetric(50, &seed);
        let (e, v) = eigensolve_symmetric(&m).unwrap();
        let rebuilt = &v * DMatrix::from_diagonal(&e) * v.transpose();
        assert!((rebuilt - &m).amax() < 1e-9);
    }
}
