//! Model parameters and truncated Hamiltonian matrices.
//!
//! Every matrix acts on spin ⊗ Fock with the interleaved layout
//! `index = 2 * n + s`, where `n` is the Fock level and `s = 0` (upper) or
//! `s = 1` (lower) is the qubit state of the frame the matrix is written in.
//! Energies are in units of the oscillator frequency, which is fixed to one.
//!
//! Three frames are available:
//!
//! * [`Frame::Lab`]: `H = (Δ/2)σz + a†a + σx[g1(a† + a) + g2(a†² + a²)] − (ε/2)σx`
//! * [`Frame::Rotated`]: the same operator after a π/2 rotation about the y
//!   axis, `H = a†a ± [g1(a† + a) + g2(a†² + a²)] ∓ ε/2` on the diagonal and
//!   `−Δ/2` between the two spin blocks.
//! * [`Frame::Rwa`]: counter-rotating terms dropped,
//!   `H = a†a + (Δ/2)σz + g1(a†σ− + aσ+) + g2(a†²σ− + a²σ+)`.
//!
//! The static bias ε enters as `−(ε/2)σz` in the rotated frame, which is the
//! convention under which the biased adiabatic levels take their closed form.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Oscillator frequency. All energies are measured in this unit.
pub const OMEGA: f64 = 1.0;

/// Two-photon coupling at which the spectrum collapses.
pub const COLLAPSE_G2: f64 = 0.5;

/// Smallest Fock truncation the builders accept.
pub const MIN_TRUNCATION: usize = 4;

/// Physical couplings of the generalized Rabi model.
///
/// A negative one-photon coupling is mapped to `|g1|`: the transformation
/// `σx → −σx` (a rotation of the qubit about z) flips its sign without
/// changing the spectrum or the σz dynamics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    delta: f64,
    g1: f64,
    g2: f64,
    epsilon: f64,
}

impl ModelParams {
    pub fn new(delta: f64, g1: f64, g2: f64) -> Result<Self> {
        Self::with_bias(delta, g1, g2, 0.0)
    }

    pub fn with_bias(delta: f64, g1: f64, g2: f64, epsilon: f64) -> Result<Self> {
        if !delta.is_finite() || delta < 0.0 {
            return Err(Error::InvalidParams(format!("delta must be finite and >= 0, got {delta}")));
        }
        if !g1.is_finite() {
            return Err(Error::InvalidParams(format!("g1 must be finite, got {g1}")));
        }
        if !g2.is_finite() || g2 < 0.0 {
            return Err(Error::InvalidParams(format!("g2 must be finite and >= 0, got {g2}")));
        }
        if g2 >= COLLAPSE_G2 {
            return Err(Error::SpectralCollapse { g2 });
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!("epsilon must be finite, got {epsilon}")));
        }
        Ok(Self { delta, g1: g1.abs(), g2, epsilon })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn omega(&self) -> f64 {
        OMEGA
    }

    pub fn set_delta(self, delta: f64) -> Result<Self> {
        Self::with_bias(delta, self.g1, self.g2, self.epsilon)
    }

    pub fn set_g1(self, g1: f64) -> Result<Self> {
        Self::with_bias(self.delta, g1, self.g2, self.epsilon)
    }

    pub fn set_g2(self, g2: f64) -> Result<Self> {
        Self::with_bias(self.delta, self.g1, g2, self.epsilon)
    }

    pub fn set_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::with_bias(self.delta, self.g1, self.g2, epsilon)
    }
}

/// Which representation a [`TruncatedOperator`] is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Frame {
    Lab,
    Rotated,
    Rwa,
}

/// Dense real symmetric matrix on the truncated spin ⊗ Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    frame: Frame,
    n_tr: usize,
    matrix: DMatrix<f64>,
}

impl TruncatedOperator {
    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Number of Fock levels kept.
    pub fn n_tr(&self) -> usize {
        self.n_tr
    }

    /// Matrix dimension, `2 * n_tr`.
    pub fn dim(&self) -> usize {
        2 * self.n_tr
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn max_asymmetry(&self) -> f64 {
        max_asymmetry(&self.matrix)
    }
}

pub(crate) fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

#[inline]
pub(crate) fn idx(n: usize, spin: usize) -> usize {
    2 * n + spin
}

fn check_truncation(n_tr: usize) -> Result<()> {
    if n_tr < MIN_TRUNCATION {
        return Err(Error::TruncationTooSmall { n_tr, min: MIN_TRUNCATION });
    }
    Ok(())
}

/// Sets a symmetric pair of off-diagonal entries.
fn set_pair(h: &mut DMatrix<f64>, i: usize, j: usize, value: f64) {
    h[(i, j)] += value;
    h[(j, i)] += value;
}

/// Adds `scale * [g1(a† + a) + g2(a†² + a²)]` between the given spin rows and
/// columns. With `row_spin == col_spin` this is a diagonal-block term.
fn add_coupling(h: &mut DMatrix<f64>, params: &ModelParams, n_tr: usize, row_spin: usize, col_spin: usize, scale: f64) {
    for n in 0..n_tr {
        if n + 1 < n_tr {
            let x = scale * params.g1 * ((n + 1) as f64).sqrt();
            if row_spin == col_spin {
                set_pair(h, idx(n, row_spin), idx(n + 1, row_spin), x);
            } else {
                set_pair(h, idx(n, row_spin), idx(n + 1, col_spin), x);
                set_pair(h, idx(n + 1, row_spin), idx(n, col_spin), x);
            }
        }
        if n + 2 < n_tr {
            let x = scale * params.g2 * (((n + 1) * (n + 2)) as f64).sqrt();
            if row_spin == col_spin {
                set_pair(h, idx(n, row_spin), idx(n + 2, row_spin), x);
            } else {
                set_pair(h, idx(n, row_spin), idx(n + 2, col_spin), x);
                set_pair(h, idx(n + 2, row_spin), idx(n, col_spin), x);
            }
        }
    }
}

/// Lab-frame Hamiltonian truncated at Fock level `n_tr − 1`.
pub fn build_lab_hamiltonian(params: &ModelParams, n_tr: usize) -> Result<TruncatedOperator> {
    check_truncation(n_tr)?;
    let dim = 2 * n_tr;
    let mut h = DMatrix::zeros(dim, dim);
    let half_delta = 0.5 * params.delta;
    for n in 0..n_tr {
        let nf = n as f64 * OMEGA;
        h[(idx(n, 0), idx(n, 0))] = nf + half_delta;
        h[(idx(n, 1), idx(n, 1))] = nf - half_delta;
        if params.epsilon != 0.0 {
            set_pair(&mut h, idx(n, 0), idx(n, 1), -0.5 * params.epsilon);
        }
    }
    add_coupling(&mut h, params, n_tr, 0, 1, 1.0);
    Ok(TruncatedOperator { frame: Frame::Lab, n_tr, matrix: h })
}

/// The lab Hamiltonian rotated by π/2 about the y axis: the coupling becomes
/// diagonal in spin and the qubit splitting becomes the off-diagonal `−Δ/2`.
pub fn build_rotated_hamiltonian(params: &ModelParams, n_tr: usize) -> Result<TruncatedOperator> {
    check_truncation(n_tr)?;
    let dim = 2 * n_tr;
    let mut h = DMatrix::zeros(dim, dim);
    let half_delta = 0.5 * params.delta;
    let half_eps = 0.5 * params.epsilon;
    for n in 0..n_tr {
        let nf = n as f64 * OMEGA;
        h[(idx(n, 0), idx(n, 0))] = nf - half_eps;
        h[(idx(n, 1), idx(n, 1))] = nf + half_eps;
        set_pair(&mut h, idx(n, 0), idx(n, 1), -half_delta);
    }
    add_coupling(&mut h, params, n_tr, 0, 0, 1.0);
    add_coupling(&mut h, params, n_tr, 1, 1, -1.0);
    Ok(TruncatedOperator { frame: Frame::Rotated, n_tr, matrix: h })
}

/// Rotating-wave Hamiltonian. The bias is not modelled in this sector.
pub fn build_rwa_hamiltonian(params: &ModelParams, n_tr: usize) -> Result<TruncatedOperator> {
    check_truncation(n_tr)?;
    if params.epsilon != 0.0 {
        return Err(Error::Unsupported("the RWA Hamiltonian requires epsilon = 0".into()));
    }
    let dim = 2 * n_tr;
    let mut h = DMatrix::zeros(dim, dim);
    let half_delta = 0.5 * params.delta;
    for n in 0..n_tr {
        let nf = n as f64 * OMEGA;
        h[(idx(n, 0), idx(n, 0))] = nf + half_delta;
        h[(idx(n, 1), idx(n, 1))] = nf - half_delta;
        // a σ+ : |n+1, ↓⟩ → |n, ↑⟩
        if n + 1 < n_tr {
            set_pair(&mut h, idx(n, 0), idx(n + 1, 1), params.g1 * ((n + 1) as f64).sqrt());
        }
        // a² σ+ : |n+2, ↓⟩ → |n, ↑⟩
        if n + 2 < n_tr {
            set_pair(&mut h, idx(n, 0), idx(n + 2, 1), params.g2 * (((n + 1) * (n + 2)) as f64).sqrt());
        }
    }
    Ok(TruncatedOperator { frame: Frame::Rwa, n_tr, matrix: h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_eigs(op: &TruncatedOperator) -> Vec<f64> {
        let mut e: Vec<f64> = op.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn rejects_collapse_and_bad_inputs() {
        assert!(matches!(ModelParams::new(1.0, 0.1, 0.5), Err(Error::SpectralCollapse { .. })));
        assert!(matches!(ModelParams::new(1.0, 0.1, 0.7), Err(Error::SpectralCollapse { .. })));
        assert!(ModelParams::new(-0.1, 0.1, 0.1).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.1).is_err());
        assert!(ModelParams::new(1.0, 0.1, -0.1).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.499).is_ok());
    }

    #[test]
    fn negative_g1_maps_to_magnitude() {
        let p = ModelParams::new(0.5, -0.3, 0.1).unwrap();
        assert_eq!(p.g1(), 0.3);
        assert_eq!(p.omega(), 1.0);
    }

    #[test]
    fn truncation_guard() {
        let p = ModelParams::new(1.0, 0.1, 0.1).unwrap();
        assert!(matches!(build_lab_hamiltonian(&p, 3), Err(Error::TruncationTooSmall { .. })));
        assert!(build_rotated_hamiltonian(&p, 3).is_err());
        assert!(build_rwa_hamiltonian(&p, 3).is_err());
    }

    #[test]
    fn decoupled_lab_spectrum() {
        let p = ModelParams::new(1.0, 0.0, 0.0).unwrap();
        let h = build_lab_hamiltonian(&p, 4).unwrap();
        let mut expected: Vec<f64> = (0..4).flat_map(|n| [n as f64 - 0.5, n as f64 + 0.5]).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in sorted_eigs(&h).iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        // the matrix is already diagonal
        let mut off = h.matrix().clone();
        off.fill_diagonal(0.0);
        assert_eq!(off.amax(), 0.0);
    }

    #[test]
    fn all_builders_symmetric() {
        let p = ModelParams::with_bias(0.7, 0.8, 0.3, 0.2).unwrap();
        assert!(build_lab_hamiltonian(&p, 30).unwrap().max_asymmetry() < 1e-14);
        assert!(build_rotated_hamiltonian(&p, 30).unwrap().max_asymmetry() < 1e-14);
        let q = ModelParams::new(0.7, 0.8, 0.3).unwrap();
        assert!(build_rwa_hamiltonian(&q, 30).unwrap().max_asymmetry() < 1e-14);
    }

    #[test]
    fn rotated_and_lab_isospectral() {
        for &(d, g1, g2, n) in &[(0.5, 0.3, 0.1, 40), (1.0, 0.1, 0.1, 60), (0.2, 1.2, 0.25, 50)] {
            let p = ModelParams::new(d, g1, g2).unwrap();
            let a = sorted_eigs(&build_lab_hamiltonian(&p, n).unwrap());
            let b = sorted_eigs(&build_rotated_hamiltonian(&p, n).unwrap());
            let worst = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(worst < 1e-10, "({d}, {g1}, {g2}): {worst:e}");
        }
    }

    #[test]
    fn biased_frames_isospectral() {
        let p = ModelParams::with_bias(0.5, 0.5, 0.1, 0.3).unwrap();
        let a = sorted_eigs(&build_lab_hamiltonian(&p, 50).unwrap());
        let b = sorted_eigs(&build_rotated_hamiltonian(&p, 50).unwrap());
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn rotated_at_zero_delta_is_block_diagonal() {
        let p = ModelParams::new(0.0, 0.0, 0.2).unwrap();
        let h = build_rotated_hamiltonian(&p, 20).unwrap();
        for i in 0..20 {
            for j in 0..20 {
                assert_eq!(h.matrix()[(idx(i, 0), idx(j, 1))], 0.0);
            }
        }
    }

    #[test]
    fn rwa_resonant_doublet_and_vacuum() {
        let p = ModelParams::new(1.0, 0.1, 0.0).unwrap();
        let e = sorted_eigs(&build_rwa_hamiltonian(&p, 30).unwrap());
        assert!((e[0] + 0.5).abs() < 1e-12);
        assert!(e.iter().any(|x| (x - 0.4).abs() < 1e-10));
        assert!(e.iter().any(|x| (x - 0.6).abs() < 1e-10));
    }

    #[test]
    fn rwa_lowest_is_minus_half_delta() {
        for &(d, g1, g2) in &[(1.0, 0.1, 0.1), (0.5, 0.3, 0.2), (2.0, 0.05, 0.1), (1.0, 0.0, 0.0)] {
            let p = ModelParams::new(d, g1, g2).unwrap();
            let e = sorted_eigs(&build_rwa_hamiltonian(&p, 40).unwrap());
            assert!((e[0] + 0.5 * d).abs() < 1e-12, "{d} {g1} {g2}: {}", e[0]);
        }
    }

    #[test]
    fn rwa_rejects_bias() {
        let p = ModelParams::with_bias(1.0, 0.1, 0.1, 0.1).unwrap();
        assert!(matches!(build_rwa_hamiltonian(&p, 10), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rwa_single_coupling_sectors_do_not_mix() {
        // with g2 = 0 only |n,↑⟩ ↔ |n+1,↓⟩ survives
        let p = ModelParams::new(1.0, 0.3, 0.0).unwrap();
        let h = build_rwa_hamiltonian(&p, 20).unwrap();
        for n in 0..18 {
            assert_eq!(h.matrix()[(idx(n, 0), idx(n + 2, 1))], 0.0);
        }
        // with g1 = 0 only |n,↑⟩ ↔ |n+2,↓⟩ survives
        let p = ModelParams::new(1.0, 0.0, 0.3).unwrap();
        let h = build_rwa_hamiltonian(&p, 20).unwrap();
        for n in 0..19 {
            assert_eq!(h.matrix()[(idx(n, 0), idx(n + 1, 1))], 0.0);
        }
    }
}
