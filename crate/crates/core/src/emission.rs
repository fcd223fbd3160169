//! Vacuum Rabi splitting: the emission spectrum of `|↑⟩|0⟩`.
//!
//! Peaks sit at `ν_R = E − E_GS` with weight equal to the initial state's
//! probability on that eigenstate. They are returned as weighted deltas.

use crate::adiabatic::vacuum_expansion;
use crate::error::Result;
use crate::model::ModelParams;
use crate::rwa::{rwa_state, Branch};

/// Peaks lighter than this are dropped from the full spectrum.
pub const PRUNE_WEIGHT: f64 = 1e-6;

/// Captured weight below which the full spectrum is flagged as cut off.
pub const CUTOFF_WEIGHT: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Peak {
    pub frequency: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmissionSpectrum {
    pub peaks: Vec<Peak>,
    /// Sum of all weights, before pruning.
    pub total_weight: f64,
    /// Set when `total_weight` falls short of [`CUTOFF_WEIGHT`].
    pub cutoff_warning: bool,
}

impl EmissionSpectrum {
    /// Peaks broadened into Lorentzians of half-width `gamma`, for display.
    pub fn lorentzian(&self, grid: &[f64], gamma: f64) -> Vec<f64> {
        grid.iter()
            .map(|&nu| {
                self.peaks
                    .iter()
                    .map(|p| p.weight * gamma / std::f64::consts::PI / ((nu - p.frequency).powi(2) + gamma * gamma))
                    .sum()
            })
            .collect()
    }

    /// Peaks with weight above `threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.peaks.iter().filter(|p| p.weight > threshold).count()
    }
}

/// Three-peak RWA spectrum from `|↑⟩|0⟩ = c₀|0⟩₁ + c′₀|0⟩₂ + f′₁|1⟩₂`, with
/// `E_GS = −Δ/2`. Peaks are in the order `(E_0^(1), c₀²)`, `(E_0^(2), c′₀²)`,
/// `(E_1^(2), f′₁²)`.
pub fn emission_spectrum_rwa(params: &ModelParams) -> Result<EmissionSpectrum> {
    let ground = -params.delta() / 2.0;
    let s1 = rwa_state(0, Branch::Type1, params)?;
    let s2 = rwa_state(0, Branch::Type2, params)?;
    let s3 = rwa_state(1, Branch::Type2, params)?;
    let peaks = vec![
        Peak { frequency: s1.energy - ground, weight: s1.coefficients[0].powi(2) },
        Peak { frequency: s2.energy - ground, weight: s2.coefficients[1].powi(2) },
        Peak { frequency: s3.energy - ground, weight: s3.coefficients[0].powi(2) },
    ];
    let total_weight = peaks.iter().map(|p| p.weight).sum();
    Ok(EmissionSpectrum { peaks, total_weight, cutoff_warning: false })
}

/// Adiabatic spectrum `{(E_m^± − E_0^−, P_m^±)}` for `m ≤ m_max`, with
/// `P_m^± = ½(c_m^± D_m^A − d_m^± D_m^B)²`, sorted by frequency.
pub fn emission_spectrum_full(params: &ModelParams, m_max: usize) -> Result<EmissionSpectrum> {
    let exp = vacuum_expansion(params, m_max)?;
    let ground = exp.levels[0].energy_minus;
    let mut peaks: Vec<Peak> = exp
        .levels
        .iter()
        .enumerate()
        .flat_map(|(k, l)| {
            [
                Peak { frequency: l.energy_minus - ground, weight: exp.amp_minus[k].powi(2) },
                Peak { frequency: l.energy_plus - ground, weight: exp.amp_plus[k].powi(2) },
            ]
        })
        .filter(|p| p.weight >= PRUNE_WEIGHT)
        .collect();
    peaks.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    Ok(EmissionSpectrum { peaks, total_weight: exp.cumulative, cutoff_warning: exp.cumulative < CUTOFF_WEIGHT })
}
