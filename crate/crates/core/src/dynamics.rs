//! Population dynamics `⟨σz(t)⟩`, Rabi frequencies, and Fourier spectra.
//!
//! `⟨σz⟩` is always the lab-frame qubit inversion, whichever frame the
//! Hamiltonian is written in.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::eigensolve_symmetric;
use crate::model::{idx, Frame, ModelParams, TruncatedOperator};
use crate::rwa::{rwa_energy, rwa_state, Branch};

/// Shortest series accepted by [`fourier_spectrum`].
pub const MIN_FOURIER_LEN: usize = 256;

/// Peaks below this fraction of the largest magnitude are dropped.
pub const PEAK_FRACTION: f64 = 0.05;

/// Largest accepted deviation of the initial state's norm from one.
pub const NORM_TOL: f64 = 1e-10;

/// Relative spacing tolerance for a grid to count as uniform.
const UNIFORM_TOL: f64 = 1e-9;

/// Sampled `⟨σz(t)⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    times: Vec<f64>,
    values: Vec<f64>,
    dt: Option<f64>,
}

impl TimeSeries {
    /// Checks the grid; `dt` is set when the grid is uniform with at least two
    /// points.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch { expected: times.len(), got: values.len() });
        }
        let dt = check_grid(&times)?;
        Ok(Self { times, values, dt })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Uniform spacing, or `None` for a single point or an irregular grid.
    pub fn dt(&self) -> Option<f64> {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `t_k = k·dt` for `k = 0..=round(t_max/dt)`.
pub fn uniform_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0) || !dt.is_finite() || !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::InvalidArgument(format!("need dt > 0 and t_max >= 0, got dt {dt}, t_max {t_max}")));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| k as f64 * dt).collect())
}

/// Verifies the grid is nonempty, finite and strictly ascending; returns the
/// spacing if it is uniform.
pub fn check_grid(times: &[f64]) -> Result<Option<f64>> {
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonAscendingGrid);
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonAscendingGrid);
    }
    if times.len() < 2 {
        return Ok(None);
    }
    let n = times.len() - 1;
    let dt = (times[n] - times[0]) / n as f64;
    let uniform = times
        .iter()
        .enumerate()
        .all(|(k, &t)| (t - (times[0] + k as f64 * dt)).abs() <= UNIFORM_TOL * t.abs().max(1.0));
    Ok(uniform.then_some(dt))
}

/// Lab-frame `σz` written in the given frame's basis.
pub fn sigma_z_operator(frame: Frame, n_tr: usize) -> DMatrix<f64> {
    let dim = 2 * n_tr;
    let mut s = DMatrix::zeros(dim, dim);
    for n in 0..n_tr {
        match frame {
            Frame::Lab | Frame::Rwa => {
                s[(idx(n, 0), idx(n, 0))] = 1.0;
                s[(idx(n, 1), idx(n, 1))] = -1.0;
            }
            Frame::Rotated => {
                s[(idx(n, 0), idx(n, 1))] = -1.0;
                s[(idx(n, 1), idx(n, 0))] = -1.0;
            }
        }
    }
    s
}

/// Lab state `|↑⟩|n⟩` in the given frame's basis.
pub fn upper_fock_state(frame: Frame, n: usize, n_tr: usize) -> Result<DVector<Complex64>> {
    if n >= n_tr {
        return Err(Error::InvalidArgument(format!("Fock index {n} outside truncation {n_tr}")));
    }
    let mut psi = DVector::zeros(2 * n_tr);
    match frame {
        Frame::Lab | Frame::Rwa => psi[idx(n, 0)] = Complex64::new(1.0, 0.0),
        Frame::Rotated => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            psi[idx(n, 0)] = Complex64::new(h, 0.0);
            psi[idx(n, 1)] = Complex64::new(-h, 0.0);
        }
    }
    Ok(psi)
}

/// Spectral propagation of `initial` under `hamiltonian`:
/// `⟨σz(t)⟩ = Σ_jk conj(α_j) α_k e^{−i(λ_k−λ_j)t} ⟨v_j|σz|v_k⟩`.
pub fn exact_dynamics(hamiltonian: &TruncatedOperator, initial: &DVector<Complex64>, t_grid: &[f64]) -> Result<TimeSeries> {
    let dim = hamiltonian.dim();
    if initial.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: initial.len() });
    }
    let norm = initial.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Unnormalized { norm });
    }
    check_grid(t_grid)?;
    let (energies, vectors) = eigensolve_symmetric(hamiltonian.matrix())?;
    let alpha: Vec<Complex64> = (0..dim)
        .map(|k| vectors.column(k).iter().zip(initial.iter()).map(|(v, c)| c * v).sum())
        .collect();
    // components that carry no weight do not contribute
    let active: Vec<usize> = (0..dim).filter(|&k| alpha[k].norm_sqr() > 1e-30).collect();
    let sz = sigma_z_operator(hamiltonian.frame(), hamiltonian.n_tr());
    let vs = DMatrix::from_fn(dim, active.len(), |i, j| vectors[(i, active[j])]);
    let m = vs.transpose() * &sz * &vs;
    let values = t_grid
        .iter()
        .map(|&t| {
            let phi: Vec<Complex64> = active
                .iter()
                .map(|&k| alpha[k] * Complex64::from_polar(1.0, -energies[k] * t))
                .collect();
            let mut acc = 0.0;
            for (j, pj) in phi.iter().enumerate() {
                let mut row = Complex64::new(0.0, 0.0);
                for (k, pk) in phi.iter().enumerate() {
                    row += m[(j, k)] * pk;
                }
                acc += (pj.conj() * row).re;
            }
            acc
        })
        .collect();
    TimeSeries::new(t_grid.to_vec(), values)
}

/// `⟨σz(t)⟩ = 1 − 2P↓(t)` from the three-state RWA expansion
/// `|n,↑⟩ = c_n|n⟩₁ + c′_n|n⟩₂ + f′_{n+1}|n+1⟩₂`.
pub fn rwa_population(n: usize, params: &ModelParams, t_grid: &[f64]) -> Result<TimeSeries> {
    check_grid(t_grid)?;
    let s1 = rwa_state(n, Branch::Type1, params)?;
    let s2 = rwa_state(n, Branch::Type2, params)?;
    let s3 = rwa_state(n + 1, Branch::Type2, params)?;
    let [c, e, f] = s1.coefficients;
    let [_, cp, ep] = s2.coefficients;
    let [fp1, _, ep1] = s3.coefficients;
    let w1 = s1.energy - s2.energy;
    let w2 = s1.energy - s3.energy;
    let values = t_grid
        .iter()
        .map(|&t| {
            let p_down = c * c * (1.0 - c * c)
                + cp * cp * ep * ep
                + fp1 * fp1 * ep1 * ep1
                + 2.0 * c * e * cp * ep * (w1 * t).cos()
                + 2.0 * c * f * fp1 * ep1 * (w2 * t).cos();
            1.0 - 2.0 * p_down
        })
        .collect();
    TimeSeries::new(t_grid.to_vec(), values)
}

/// `(|E_n^(1) − E_n^(2)|, |E_n^(1) − E_{n+1}^(2)|)`.
pub fn rabi_frequencies(n: usize, params: &ModelParams) -> Result<(f64, f64)> {
    let e1 = rwa_energy(n, Branch::Type1, params)?;
    let e2 = rwa_energy(n, Branch::Type2, params)?;
    let e3 = rwa_energy(n + 1, Branch::Type2, params)?;
    Ok(((e1 - e2).abs(), (e1 - e3).abs()))
}

/// One-sided magnitude spectrum on an angular-frequency axis.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSpectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Local maxima above [`PEAK_FRACTION`] of the largest magnitude,
    /// strongest first, as `(frequency, magnitude)`.
    pub peaks: Vec<(f64, f64)>,
    /// Angular bin width `2π/(N·dt)`.
    pub bin: f64,
}

/// Hann-tapered DFT magnitude of the mean-subtracted series.
pub fn fourier_spectrum(series: &TimeSeries) -> Result<FourierSpectrum> {
    let n = series.len();
    if n < MIN_FOURIER_LEN {
        return Err(Error::SeriesTooShort { len: n, min: MIN_FOURIER_LEN });
    }
    let dt = series.dt().ok_or(Error::NonUniformGrid)?;
    let mean = series.values().iter().sum::<f64>() / n as f64;
    let denom = (n - 1) as f64;
    let mut buf: Vec<Complex64> = series
        .values()
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let hann = 0.5 - 0.5 * (2.0 * std::f64::consts::PI * j as f64 / denom).cos();
            Complex64::new((x - mean) * hann, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = n / 2 + 1;
    let bin = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    let magnitudes: Vec<f64> = buf[..half].iter().map(|z| z.norm()).collect();
    let frequencies: Vec<f64> = (0..half).map(|k| k as f64 * bin).collect();
    let max = magnitudes.iter().copied().fold(0.0, f64::max);
    let mut peaks: Vec<(f64, f64)> = (1..half.saturating_sub(1))
        .filter(|&k| {
            let m = magnitudes[k];
            m > magnitudes[k - 1] && m >= magnitudes[k + 1] && m > PEAK_FRACTION * max
        })
        .map(|k| (frequencies[k], magnitudes[k]))
        .collect();
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.total_cmp(&b.0)));
    Ok(FourierSpectrum { frequencies, magnitudes, peaks, bin })
}
