//! Rotating-wave solution through 3×3 blocks and their characteristic cubics.
//!
//! With both couplings present the RWA Hamiltonian keeps two families of
//! three-state ansätze:
//!
//! * Type 1, basis `{|n,↑⟩, |n+1,↓⟩, |n+2,↓⟩}`, coefficients `(c_n, e_n, f_n)`;
//!   the energy is the smallest root `λ₁` of its cubic.
//! * Type 2, basis `{|n−1,↑⟩, |n,↑⟩, |n+1,↓⟩}`, coefficients `(f′_n, c′_n, e′_n)`;
//!   the energy is the largest root `λ₃`.
//!
//! At `n = 0` the Type 2 slot `|−1,↑⟩` does not exist; that block is solved as
//! the 2×2 system on `{|0,↑⟩, |1,↓⟩}` and `f′_0 = 0`.
//!
//! The ansatz neglects the coupling between neighbouring blocks, so its
//! energies track the exact RWA spectrum only away from avoided crossings.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Largest accepted `|λ³ + bλ² + cλ + d|`.
pub const CUBIC_RESIDUAL_TOL: f64 = 1e-10;

/// Largest accepted residual of a normalized block eigenvector.
pub const STATE_RESIDUAL_TOL: f64 = 1e-9;

/// `Γ` at or above minus this is treated as coincident roots.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Type1,
    Type2,
    Ground,
}

/// Monic cubic `E³ + bE² + cE + d` with its discriminant data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicCoefficients {
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// `b² − 3c`
    pub a_disc: f64,
    /// `bc − 9d`
    pub b_disc: f64,
    /// `c² − 3bd`
    pub c_disc: f64,
    /// `B² − 4AC`; negative for three distinct real roots.
    pub gamma: f64,
    /// Block inputs `(x, y, z)` (primed for Type 2).
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CubicCoefficients {
    pub fn from_bcd(b: f64, c: f64, d: f64) -> Self {
        Self::with_inputs(b, c, d, f64::NAN, f64::NAN, f64::NAN)
    }

    fn with_inputs(b: f64, c: f64, d: f64, x: f64, y: f64, z: f64) -> Self {
        let a_disc = b * b - 3.0 * c;
        let b_disc = b * c - 9.0 * d;
        let c_disc = c * c - 3.0 * b * d;
        let gamma = b_disc * b_disc - 4.0 * a_disc * c_disc;
        Self { b, c, d, a_disc, b_disc, c_disc, gamma, x, y, z }
    }

    pub fn eval(&self, e: f64) -> f64 {
        ((e + self.b) * e + self.c) * e + self.d
    }
}

/// Cubic of the Type 1 block: `x = n + 1 − Δ/2`, `y = g1√(n+1)`,
/// `z = g2√((n+1)(n+2))`.
pub fn cubic_type1(n: usize, params: &ModelParams) -> CubicCoefficients {
    let nf = n as f64;
    let delta = params.delta();
    let x = nf + 1.0 - delta / 2.0;
    let y = params.g1() * (nf + 1.0).sqrt();
    let z = params.g2() * ((nf + 2.0) * (nf + 1.0)).sqrt();
    let (y2, z2) = (y * y, z * z);
    let b = -3.0 * x - delta;
    let c = 3.0 * x * x + 2.0 * delta * x - y2 - z2 + delta - 1.0;
    let d = x - x * delta + x * y2 + x * z2 - x * x * delta - x * x * x + y2;
    CubicCoefficients::with_inputs(b, c, d, x, y, z)
}

/// Cubic of the Type 2 block: `x′ = n + Δ/2`, `y′ = g1√(n+1)`,
/// `z′ = g2√(n(n+1))`.
pub fn cubic_type2(n: usize, params: &ModelParams) -> CubicCoefficients {
    let nf = n as f64;
    let delta = params.delta();
    let x = nf + delta / 2.0;
    let y = params.g1() * (nf + 1.0).sqrt();
    let z = params.g2() * ((nf + 1.0) * nf).sqrt();
    let (y2, z2) = (y * y, z * z);
    let b = delta - 3.0 * x;
    let c = -y2 - z2 - 1.0 + 3.0 * x * x + delta - 2.0 * x * delta;
    let d = -x * x * x - y2 + x * (1.0 + y2 + z2 - delta) + x * x * delta;
    CubicCoefficients::with_inputs(b, c, d, x, y, z)
}

/// The three real roots by the trigonometric formula, ascending.
pub fn solve_cubic_trig(coeffs: &CubicCoefficients) -> Result<[f64; 3]> {
    let CubicCoefficients { b, a_disc, b_disc, gamma, .. } = *coeffs;
    if !(gamma < -DEGENERACY_TOL) || !(a_disc > 0.0) {
        return Err(Error::DegenerateRoots { gamma });
    }
    let sa = a_disc.sqrt();
    let mut arg = (2.0 * a_disc * b - 3.0 * b_disc) / (2.0 * sa * sa * sa);
    if arg.abs() > 1.0 {
        if arg.abs() - 1.0 <= 1e-12 {
            arg = arg.signum();
        } else {
            return Err(Error::DegenerateRoots { gamma });
        }
    }
    let theta = arg.acos() / 3.0;
    let (s, c) = theta.sin_cos();
    let r3 = 3f64.sqrt();
    let l1 = (-b - 2.0 * sa * c) / 3.0;
    let l2 = (-b + sa * (c - r3 * s)) / 3.0;
    let l3 = (-b + sa * (c + r3 * s)) / 3.0;
    let mut roots = [l1, l2, l3];
    roots.sort_by(|a, b| a.total_cmp(b));
    for &r in &roots {
        let residual = coeffs.eval(r).abs();
        if residual >= CUBIC_RESIDUAL_TOL {
            return Err(Error::CubicResidual { residual });
        }
    }
    Ok(roots)
}

/// The 3×3 block the ansatz diagonalizes, in the basis order of the module
/// docs. At `n = 0` the Type 2 `|−1,↑⟩` row and column are zero apart from
/// the diagonal.
pub fn block_matrix(n: usize, branch: Branch, params: &ModelParams) -> Result<Matrix3<f64>> {
    let nf = n as f64;
    let half = params.delta() / 2.0;
    match branch {
        Branch::Type1 => {
            let y = params.g1() * (nf + 1.0).sqrt();
            let z = params.g2() * ((nf + 2.0) * (nf + 1.0)).sqrt();
            Ok(Matrix3::new(
                nf + half, y, z,
                y, nf + 1.0 - half, 0.0,
                z, 0.0, nf + 2.0 - half,
            ))
        }
        Branch::Type2 => {
            let y = params.g1() * (nf + 1.0).sqrt();
            let z = params.g2() * ((nf + 1.0) * nf).sqrt();
            Ok(Matrix3::new(
                nf - 1.0 + half, 0.0, z,
                0.0, nf + half, y,
                z, y, nf + 1.0 - half,
            ))
        }
        Branch::Ground => Err(Error::InvalidArgument("the ground state has no 3x3 block".into())),
    }
}

/// Upper level of the `n = 0` Type 2 doublet on `{|0,↑⟩, |1,↓⟩}`.
fn type2_vacuum_energy(params: &ModelParams) -> f64 {
    let d = params.delta();
    let g1 = params.g1();
    0.5 + 0.5 * ((d - 1.0).powi(2) + 4.0 * g1 * g1).sqrt()
}

/// `E_n^(1) = λ₁` of the Type 1 cubic, or `E_n^(2) = λ₃` of the Type 2 cubic.
/// The ground branch returns `−Δ/2`.
pub fn rwa_energy(n: usize, branch: Branch, params: &ModelParams) -> Result<f64> {
    check_rwa(params)?;
    match branch {
        Branch::Type1 => Ok(solve_cubic_trig(&cubic_type1(n, params))?[0]),
        Branch::Type2 if n == 0 => Ok(type2_vacuum_energy(params)),
        Branch::Type2 => Ok(solve_cubic_trig(&cubic_type2(n, params))?[2]),
        Branch::Ground => Ok(-params.delta() / 2.0),
    }
}

fn check_rwa(params: &ModelParams) -> Result<()> {
    if params.epsilon() != 0.0 {
        return Err(Error::Unsupported("the RWA solution requires epsilon = 0".into()));
    }
    Ok(())
}

/// Normalized ansatz state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RwaEigenstate {
    pub n: usize,
    pub branch: Branch,
    pub energy: f64,
    /// Type 1: `(c_n, e_n, f_n)`. Type 2: `(f′_n, c′_n, e′_n)`. Ground:
    /// `(1, 0, 0)` on `|0,↓⟩`.
    pub coefficients: [f64; 3],
    /// `‖(M − E) v‖` of the block system.
    pub residual: f64,
}

impl RwaEigenstate {
    /// Amplitude on `|n,↑⟩`: `c_n` or `c′_n`. Fixed nonnegative.
    pub fn upper(&self) -> f64 {
        match self.branch {
            Branch::Type2 => self.coefficients[1],
            _ => self.coefficients[0],
        }
    }
}

/// Null vector of `M − E` from the best-conditioned cross product of two
/// rows.
fn null_vector(m: &Matrix3<f64>, energy: f64) -> Option<Vector3<f64>> {
    let shifted = m - Matrix3::identity() * energy;
    let rows: Vec<Vector3<f64>> = (0..3).map(|i| shifted.row(i).transpose()).collect();
    let mut best = Vector3::zeros();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let c = rows[i].cross(&rows[j]);
        if c.norm() > best.norm() {
            best = c;
        }
    }
    let scale = shifted.norm().max(1.0);
    if best.norm() <= 1e-12 * scale * scale {
        None
    } else {
        Some(best.normalize())
    }
}

pub fn rwa_state(n: usize, branch: Branch, params: &ModelParams) -> Result<RwaEigenstate> {
    check_rwa(params)?;
    let energy = rwa_energy(n, branch, params)?;
    if branch == Branch::Ground {
        return Ok(RwaEigenstate { n: 0, branch, energy, coefficients: [1.0, 0.0, 0.0], residual: 0.0 });
    }
    let m = block_matrix(n, branch, params)?;
    let mut v = if branch == Branch::Type2 && n == 0 {
        let sub = m.fixed_view::<2, 2>(1, 1).into_owned();
        let a = sub[(0, 0)] - energy;
        let b = sub[(0, 1)];
        let c = sub[(1, 1)] - energy;
        // rows (a, b) and (b, c); take the better conditioned null direction
        let (p, q) = if a.abs() + b.abs() >= b.abs() + c.abs() { (-b, a) } else { (-c, b) };
        let norm = (p * p + q * q).sqrt();
        if norm <= 1e-14 {
            return Err(Error::DegenerateState { n, residual: f64::NAN });
        }
        Vector3::new(0.0, p / norm, q / norm)
    } else {
        null_vector(&m, energy).ok_or(Error::DegenerateState { n, residual: f64::NAN })?
    };
    let lead = if branch == Branch::Type2 { 1 } else { 0 };
    if v[lead] < 0.0 {
        v = -v;
    }
    let residual = ((m - Matrix3::identity() * energy) * v).norm();
    if residual >= STATE_RESIDUAL_TOL {
        return Err(Error::DegenerateState { n, residual });
    }
    Ok(RwaEigenstate { n, branch, energy, coefficients: [v[0], v[1], v[2]], residual })
}

/// Lowest level `−Δ/2` on `|0,↓⟩`.
pub fn rwa_ground_state(params: &ModelParams) -> Result<RwaEigenstate> {
    rwa_state(0, Branch::Ground, params)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhotonKind {
    OnePhoton,
    TwoPhoton,
}

/// Single-coupling RWA levels:
/// `E_{n,1p}^{(k)} = n + 1/2 + (−1)^k ½√((Δ−1)² + 4g1²(n+1))` and
/// `E_{n,2p}^{(k)} = n + 1 + (−1)^k ½√((Δ−2)² + 4g2²(n+1)(n+2))`.
pub fn reference_energy(n: usize, k: u8, kind: PhotonKind, params: &ModelParams) -> Result<f64> {
    let sign = match k {
        1 => -1.0,
        2 => 1.0,
        _ => return Err(Error::InvalidArgument(format!("reference level index must be 1 or 2, got {k}"))),
    };
    let nf = n as f64;
    let d = params.delta();
    Ok(match kind {
        PhotonKind::OnePhoton => {
            let g = params.g1();
            nf + 0.5 + sign * 0.5 * ((d - 1.0).powi(2) + 4.0 * g * g * (nf + 1.0)).sqrt()
        }
        PhotonKind::TwoPhoton => {
            let g = params.g2();
            nf + 1.0 + sign * 0.5 * ((d - 2.0).powi(2) + 4.0 * g * g * (nf + 1.0) * (nf + 2.0)).sqrt()
        }
    })
}

/// A case where the fixed root choice does not land on the single-coupling
/// level it should reduce to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionWarning {
    pub n: usize,
    pub branch: Branch,
    /// The coupling switched off for the comparison.
    pub limit: PhotonKind,
    /// Root the fixed rule picks in that limit.
    pub selected: f64,
    /// Single-coupling level the branch should reduce to.
    pub expected: f64,
}

/// Switches each coupling off in turn and checks that the fixed root choice
/// lands on the matching single-coupling level:
///
/// * Type 1, `g2 → 0`: `E_{n,1p}^{(1)}`; `g1 → 0`: `E_{n,2p}^{(1)}`.
/// * Type 2, `g2 → 0`: `E_{n,1p}^{(2)}`; `g1 → 0`: `E_{n−1,2p}^{(2)}` (`n ≥ 1`).
///
/// Returns every mismatch found. Limits whose cubic has coincident roots are
/// skipped.
pub fn check_root_selection(n: usize, branch: Branch, params: &ModelParams) -> Result<Vec<SelectionWarning>> {
    check_rwa(params)?;
    let mut out = Vec::new();
    if branch == Branch::Ground {
        return Ok(out);
    }
    for limit in [PhotonKind::TwoPhoton, PhotonKind::OnePhoton] {
        // `limit` names the surviving coupling
        let reduced = match limit {
            PhotonKind::OnePhoton => params.set_g2(0.0)?,
            PhotonKind::TwoPhoton => params.set_g1(0.0)?,
        };
        let expected = match (branch, limit) {
            (Branch::Type1, PhotonKind::OnePhoton) => reference_energy(n, 1, PhotonKind::OnePhoton, &reduced)?,
            (Branch::Type1, PhotonKind::TwoPhoton) => reference_energy(n, 1, PhotonKind::TwoPhoton, &reduced)?,
            (Branch::Type2, PhotonKind::OnePhoton) => reference_energy(n, 2, PhotonKind::OnePhoton, &reduced)?,
            (Branch::Type2, PhotonKind::TwoPhoton) => {
                if n == 0 {
                    continue;
                }
                reference_energy(n - 1, 2, PhotonKind::TwoPhoton, &reduced)?
            }
            (Branch::Ground, _) => unreachable!(),
        };
        let selected = match rwa_energy(n, branch, &reduced) {
            Ok(e) => e,
            Err(Error::DegenerateRoots { .. }) => continue,
            Err(e) => return Err(e),
        };
        if (selected - expected).abs() > 1e-9 {
            let switched_off = match limit {
                PhotonKind::OnePhoton => PhotonKind::TwoPhoton,
                PhotonKind::TwoPhoton => PhotonKind::OnePhoton,
            };
            out.push(SelectionWarning { n, branch, limit: switched_off, selected, expected });
        }
    }
    Ok(out)
}
