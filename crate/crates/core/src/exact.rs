//! Numerically exact spectra by dense diagonalization, either in the Fock
//! basis or in the displaced-squeezed bases of [`crate::bogoliubov`].

use nalgebra::{DMatrix, DVector};

use crate::bogoliubov::{frame_from_params, overlap_matrix, MAX_OVERLAP_SIZE};
use crate::error::{Error, Result};
use crate::linalg::eigensolve_symmetric;
use crate::model::{build_lab_hamiltonian, build_rotated_hamiltonian, build_rwa_hamiltonian, idx, ModelParams, TruncatedOperator};

/// Relative change below which an eigenvalue counts as converged.
pub const DEFAULT_REL_TOL: f64 = 1e-6;

/// Extra Fock levels used for the convergence rerun.
pub const RERUN_MARGIN: usize = 20;

/// Truncations tried by [`converge`].
pub const SCHEDULE: [usize; 5] = [30, 60, 120, 240, 512];

/// Eigenvectors with more weight than this in the top tenth of the levels
/// are flagged as truncation-affected.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpectrumBasis {
    FockLab,
    FockRotated,
    BogoliubovScheme,
    FockRwa,
}

/// Which solver [`converge_with`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Fock,
    Bogoliubov,
}

/// The lowest eigenpairs of a truncated Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSpectrum {
    basis: SpectrumBasis,
    n_tr: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    converged_count: usize,
    tail_weight: f64,
}

impl TruncatedSpectrum {
    pub fn basis(&self) -> SpectrumBasis {
        self.basis
    }

    pub fn n_tr(&self) -> usize {
        self.n_tr
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// One unit-norm column per eigenvalue, in the `2 n + s` layout.
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// How many of the leading eigenvalues agree with a rerun at
    /// `n_tr + RERUN_MARGIN` to relative [`DEFAULT_REL_TOL`].
    pub fn converged_count(&self) -> usize {
        self.converged_count
    }

    /// Largest weight any returned eigenvector has in the top tenth of the
    /// basis levels.
    pub fn tail_weight(&self) -> f64 {
        self.tail_weight
    }

    pub fn tail_ok(&self) -> bool {
        self.tail_weight < TAIL_TOL
    }
}

/// Relative difference with denominator `max(|b|, 1)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn leading_agreement(a: &[f64], b: &[f64], tol: f64) -> usize {
    a.iter().zip(b).take_while(|(x, y)| rel_diff(**x, **y) < tol).count()
}

fn tail_weight(vectors: &DMatrix<f64>, n_tr: usize) -> f64 {
    let start = n_tr - n_tr.div_ceil(10);
    let mut worst = 0.0f64;
    for col in vectors.column_iter() {
        let mut w = 0.0;
        for n in start..n_tr {
            w += col[idx(n, 0)].powi(2) + col[idx(n, 1)].powi(2);
        }
        worst = worst.max(w);
    }
    worst
}

fn check_k(k: usize, n_tr: usize) -> Result<()> {
    if k == 0 || k > n_tr {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= n_tr, got k {k}, n_tr {n_tr}")));
    }
    Ok(())
}

fn lowest(matrix: &DMatrix<f64>, k: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let (values, vectors) = eigensolve_symmetric(matrix)?;
    Ok((values.iter().take(k).copied().collect(), vectors.columns(0, k).into_owned()))
}

fn solve_operator<F>(basis: SpectrumBasis, n_tr: usize, k: usize, build: F) -> Result<TruncatedSpectrum>
where
    F: Fn(usize) -> Result<DMatrix<f64>>,
{
    check_k(k, n_tr)?;
    let (eigenvalues, eigenvectors) = lowest(&build(n_tr)?, k)?;
    let (rerun, _) = eigensolve_symmetric(&build(n_tr + RERUN_MARGIN)?)?;
    let converged_count = leading_agreement(&eigenvalues, rerun.as_slice(), DEFAULT_REL_TOL);
    let tail_weight = tail_weight(&eigenvectors, n_tr);
    Ok(TruncatedSpectrum { basis, n_tr, eigenvalues, eigenvectors, converged_count, tail_weight })
}

fn op_matrix(op: Result<TruncatedOperator>) -> Result<DMatrix<f64>> {
    op.map(TruncatedOperator::into_matrix)
}

/// Lowest `k` eigenpairs of the lab-frame Hamiltonian.
pub fn solve_fock(params: &ModelParams, n_tr: usize, k: usize) -> Result<TruncatedSpectrum> {
    solve_operator(SpectrumBasis::FockLab, n_tr, k, |n| op_matrix(build_lab_hamiltonian(params, n)))
}

/// Lowest `k` eigenpairs of the rotated-frame Hamiltonian.
pub fn solve_rotated(params: &ModelParams, n_tr: usize, k: usize) -> Result<TruncatedSpectrum> {
    solve_operator(SpectrumBasis::FockRotated, n_tr, k, |n| op_matrix(build_rotated_hamiltonian(params, n)))
}

/// Lowest `k` eigenpairs of the rotating-wave Hamiltonian.
pub fn solve_rwa(params: &ModelParams, n_tr: usize, k: usize) -> Result<TruncatedSpectrum> {
    solve_operator(SpectrumBasis::FockRwa, n_tr, k, |n| op_matrix(build_rwa_hamiltonian(params, n)))
}

/// Rotated-frame Hamiltonian written in the `|m⟩_A ⊕ |m⟩_B` basis: diagonal
/// `β(m − v² − w²) − ε/2` and `β(m − v² − w′²) + ε/2`, coupled by
/// `−(Δ/2) D_mn`.
pub fn bogoliubov_matrix(params: &ModelParams, n_tr: usize) -> Result<DMatrix<f64>> {
    if n_tr > MAX_OVERLAP_SIZE {
        return Err(Error::InvalidArgument(format!(
            "Bogoliubov scheme supports n_tr <= {MAX_OVERLAP_SIZE}, got {n_tr}"
        )));
    }
    let frame = frame_from_params(params.g1(), params.g2())?;
    let half_eps = 0.5 * params.epsilon();
    let mut h = DMatrix::zeros(2 * n_tr, 2 * n_tr);
    for m in 0..n_tr {
        h[(idx(m, 0), idx(m, 0))] = frame.energy_a(m) - half_eps;
        h[(idx(m, 1), idx(m, 1))] = frame.energy_b(m) + half_eps;
    }
    if params.delta() != 0.0 {
        let d = overlap_matrix(&frame, n_tr)?;
        let c = -0.5 * params.delta();
        for m in 0..n_tr {
            for n in 0..n_tr {
                let x = c * d.get(m, n);
                h[(idx(m, 0), idx(n, 1))] = x;
                h[(idx(n, 1), idx(m, 0))] = x;
            }
        }
    }
    Ok(h)
}

/// Lowest `k` eigenpairs in the displaced-squeezed bases.
pub fn solve_bogoliubov(params: &ModelParams, n_tr: usize, k: usize) -> Result<TruncatedSpectrum> {
    if n_tr < crate::model::MIN_TRUNCATION {
        return Err(Error::TruncationTooSmall { n_tr, min: crate::model::MIN_TRUNCATION });
    }
    check_k(k, n_tr)?;
    let (eigenvalues, eigenvectors) = lowest(&bogoliubov_matrix(params, n_tr)?, k)?;
    let rerun_size = (n_tr + RERUN_MARGIN).min(MAX_OVERLAP_SIZE);
    let converged_count = if rerun_size > n_tr {
        let (rerun, _) = eigensolve_symmetric(&bogoliubov_matrix(params, rerun_size)?)?;
        leading_agreement(&eigenvalues, rerun.as_slice(), DEFAULT_REL_TOL)
    } else {
        0
    };
    let tail_weight = tail_weight(&eigenvectors, n_tr);
    Ok(TruncatedSpectrum { basis: SpectrumBasis::BogoliubovScheme, n_tr, eigenvalues, eigenvectors, converged_count, tail_weight })
}

/// [`converge_with`] using the Fock-basis solver.
pub fn converge(params: &ModelParams, k: usize, rel_tol: f64) -> Result<TruncatedSpectrum> {
    converge_with(params, k, rel_tol, Method::Fock)
}

/// Walks [`SCHEDULE`] until the lowest `k` eigenvalues change by less than
/// `rel_tol` between consecutive truncations, and returns the larger one.
pub fn converge_with(params: &ModelParams, k: usize, rel_tol: f64, method: Method) -> Result<TruncatedSpectrum> {
    if !(rel_tol >= 1e-12) {
        return Err(Error::InvalidArgument(format!("rel_tol must be >= 1e-12, got {rel_tol}")));
    }
    let solve = |n: usize| match method {
        Method::Fock => solve_fock(params, n, k),
        Method::Bogoliubov => solve_bogoliubov(params, n, k),
    };
    let limit = match method {
        Method::Fock => usize::MAX,
        Method::Bogoliubov => MAX_OVERLAP_SIZE,
    };
    let schedule: Vec<usize> = SCHEDULE.iter().copied().filter(|&n| n >= k && n <= limit).collect();
    let mut previous: Option<TruncatedSpectrum> = None;
    let mut last_delta = f64::INFINITY;
    for &n in &schedule {
        let current = solve(n)?;
        if let Some(prev) = &previous {
            last_delta = prev
                .eigenvalues()
                .iter()
                .zip(current.eigenvalues())
                .map(|(a, b)| rel_diff(*a, *b))
                .fold(0.0, f64::max);
            if last_delta < rel_tol {
                return Ok(current);
            }
        }
        previous = Some(current);
    }
    Err(Error::NonConvergence { n_tr: schedule.last().copied().unwrap_or(0), last_delta })
}

/// Ground-state-first eigenvalues of the full truncated lab Hamiltonian.
pub fn lab_spectrum(params: &ModelParams, n_tr: usize) -> Result<DVector<f64>> {
    let h = build_lab_hamiltonian(params, n_tr)?;
    Ok(eigensolve_symmetric(h.matrix())?.0)
}
