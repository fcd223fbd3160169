//! Bogoliubov frame of the two-photon term and the overlaps between the two
//! displaced-squeezed number-state bases.
//!
//! In the rotated frame each spin block is a quadratic form in `a, a†`. It is
//! diagonalized by
//!
//! ```text
//! |m⟩_A = S(r) D(−w)  |m⟩      (upper block, a†a + X)
//! |m⟩_B = S(−r) D(−w′) |m⟩     (lower block, a†a − X)
//! ```
//!
//! with `S(r) = exp((r/2)(a² − a†²))`, `D(x) = exp(x(a† − a))`, and the
//! constants of [`BogoliubovFrame`]. The block energies are `β(m − v² − w²)`
//! and `β(m − v² − w′²)`.
//!
//! The overlap `D_mn = A⟨m|n⟩_B` has a closed Hermite sum whose terms cancel
//! strongly once `g1` is large, so it is accumulated in double-double
//! arithmetic. The Fock-space construction ([`bogoliubov_basis_in_fock`]) is
//! an independent route to the same numbers.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::hermite::{hermite_normalized, refined_recip};
use crate::model::COLLAPSE_G2;

/// Below this two-photon coupling the squeeze is dropped and closed
/// displaced-oscillator forms are used.
pub const SMALL_G2: f64 = 1e-8;

/// Largest overlap matrix [`overlap_matrix`] builds.
pub const MAX_OVERLAP_SIZE: usize = 200;

/// Accepted imaginary residue of a finished overlap entry.
pub const IMAG_TOL: f64 = 1e-10;

/// Accepted rounding bound of a finished overlap entry.
pub const PRECISION_TOL: f64 = 1e-10;

/// Accepted norm deficit of a truncated Fock expansion.
pub const LEAKAGE_TOL: f64 = 1e-6;

/// Which of the two displaced-squeezed bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BogoliubovFrame {
    pub g1: f64,
    pub g2: f64,
    pub beta: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub w_prime: f64,
    /// Squeeze parameter, `arccosh u`.
    pub r: f64,
}

pub fn frame_from_params(g1: f64, g2: f64) -> Result<BogoliubovFrame> {
    if !g1.is_finite() || !g2.is_finite() || g2 < 0.0 {
        return Err(Error::InvalidParams(format!("need finite g1 and g2 >= 0, got ({g1}, {g2})")));
    }
    if g2 >= COLLAPSE_G2 {
        return Err(Error::SpectralCollapse { g2 });
    }
    let g1 = g1.abs();
    let beta = (1.0 - 4.0 * g2 * g2).sqrt();
    let u = ((1.0 + beta) / (2.0 * beta)).sqrt();
    // 1 − β = 4g2²/(1 + β) avoids cancellation at small g2
    let v = 2.0 * g2 / (2.0 * beta * (1.0 + beta)).sqrt();
    let s = u * u + v * v;
    let w = s * g1 / (u + v);
    let w_prime = s * g1 / (v - u);
    let r = (u + v).ln();
    Ok(BogoliubovFrame { g1, g2, beta, u, v, w, w_prime, r })
}

impl BogoliubovFrame {
    /// Energy of `|m⟩_A` in the upper block.
    pub fn energy_a(&self, m: usize) -> f64 {
        self.beta * (m as f64 - self.v * self.v - self.w * self.w)
    }

    /// Energy of `|m⟩_B` in the lower block.
    pub fn energy_b(&self, m: usize) -> f64 {
        self.beta * (m as f64 - self.v * self.v - self.w_prime * self.w_prime)
    }

    pub fn is_small_g2(&self) -> bool {
        self.g2 < SMALL_G2
    }
}

/// `D_mn = A⟨m|n⟩_B` on `0..size`.
#[derive(Clone, Debug, PartialEq)]
pub struct OverlapMatrix {
    entries: DMatrix<f64>,
    max_imag_residue: f64,
}

impl OverlapMatrix {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.entries[(m, n)]
    }

    pub fn max_imag_residue(&self) -> f64 {
        self.max_imag_residue
    }

    /// Copy with one entry replaced. Used to check that diagnostics notice a
    /// corrupted matrix.
    pub fn with_entry(&self, m: usize, n: usize, value: f64) -> Self {
        let mut out = self.clone();
        out.entries[(m, n)] = value;
        out
    }

    /// `max |(D Dᵀ − I)_{ij}|` over the lowest two thirds of the indices.
    pub fn orthogonality_defect(&self) -> f64 {
        self.orthogonality_defect_within((2 * self.size()) / 3)
    }

    /// `max |(D Dᵀ − I)_{ij}|` over `i, j < k`.
    pub fn orthogonality_defect_within(&self, k: usize) -> f64 {
        let k = k.min(self.size());
        let d = &self.entries;
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in 0..k {
                let dot: f64 = d.row(i).iter().zip(d.row(j).iter()).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

type Cdd = Complex<TwoFloat>;

fn dd(x: f64) -> TwoFloat {
    TwoFloat::from(x)
}

fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    a * refined_recip(b)
}

fn dd_to_f64(x: TwoFloat) -> f64 {
    x.hi() + x.lo()
}

/// Double-double ingredients of the Hermite sum shared by every entry.
struct HermiteSum {
    /// `Q_k(x_a)` with `x_a` on the negative imaginary axis.
    qa: Vec<Cdd>,
    /// `Q_k(x_b)` with `x_b` real.
    qb: Vec<Cdd>,
    /// Ratio `β / (2 g2)` between successive sum weights.
    kappa: TwoFloat,
    /// `ln[√β exp(−2g1²/β³)]`.
    ln_base: f64,
    ln_2g2: f64,
}

impl HermiteSum {
    fn new(g1: f64, g2: f64, size: usize) -> Self {
        let g1d = dd(g1);
        let g2d = dd(g2);
        let one = dd(1.0);
        let beta = (one - g2d * g2d * 4.0).sqrt();
        let u = dd_div(one + beta, beta * 2.0).sqrt();
        let v = dd_div(g2d * 2.0, (beta * (one + beta) * 2.0).sqrt());
        // β^{3/2} √(uv) = β √g2, and √(−uv) = i √(uv) on the principal branch
        let denom = beta * g2d.sqrt();
        let a = dd_div(g1d * (u - v), denom);
        let xa = Cdd::new(dd(0.0), -a);
        let xb = Cdd::new(-dd_div(g1d * (u + v), denom), dd(0.0));
        let kappa = dd_div(beta, g2d * 2.0);
        let bf = dd_to_f64(beta);
        let ln_base = 0.5 * bf.ln() - 2.0 * g1 * g1 / (bf * bf * bf);
        Self {
            qa: hermite_normalized(size, xa),
            qb: hermite_normalized(size, xb),
            kappa,
            ln_base,
            ln_2g2: (2.0 * g2).ln(),
        }
    }

    /// Entry `(m, n)` as (real part, imaginary residue, rounding bound).
    fn entry(&self, m: usize, n: usize) -> (f64, f64, f64) {
        // D_mn = F Σ_i i^{m−i} ρ_i Q_{m−i}(x_a) Q_{n−i}(x_b),
        // F = √β e^{−2g1²/β³} (2g2)^{(m+n)/2},
        // ρ_0 = 1, ρ_{i+1} = ρ_i κ √((m−i)(n−i)) / (i+1).
        // Weights carry a separate binary exponent so that neither F nor ρ_i
        // over- or underflows for large indices.
        let ln_f = self.ln_base + 0.5 * (m + n) as f64 * self.ln_2g2;
        let e_f = (ln_f / std::f64::consts::LN_2).floor();
        let mant_f = (ln_f - e_f * std::f64::consts::LN_2).exp();
        let mut rho = dd(mant_f);
        let mut rho_exp = e_f as i64;

        let top = m.min(n);
        let mut terms: Vec<(Cdd, i64)> = Vec::with_capacity(top + 1);
        for i in 0..=top {
            let q = self.qa[m - i] * self.qb[n - i];
            let phase = match (m - i) % 4 {
                0 => q,
                1 => Cdd::new(-q.im, q.re),
                2 => Cdd::new(-q.re, -q.im),
                _ => Cdd::new(q.im, -q.re),
            };
            terms.push((Cdd::new(phase.re * rho, phase.im * rho), rho_exp));
            if i < top {
                let step = (dd(((m - i) * (n - i)) as f64)).sqrt() * self.kappa / (i + 1) as f64;
                rho = rho * step;
                let hi = rho.hi();
                if hi != 0.0 && hi.is_finite() {
                    let k = hi.abs().log2().floor() as i64;
                    rho = rho * pow2(-k);
                    rho_exp += k;
                }
            }
        }

        let mag = |c: &Cdd| c.re.hi().abs().max(c.im.hi().abs());
        let mut top_exp = i64::MIN;
        for (c, e) in &terms {
            let x = mag(c);
            if x > 0.0 && x.is_finite() {
                top_exp = top_exp.max(e + x.log2().floor() as i64);
            }
        }
        if top_exp == i64::MIN {
            let bad = terms.iter().any(|(c, _)| !mag(c).is_finite());
            return if bad { (f64::NAN, f64::NAN, f64::INFINITY) } else { (0.0, 0.0, 0.0) };
        }
        let mut sum = Cdd::new(dd(0.0), dd(0.0));
        let mut max_term = 0.0f64;
        for (c, e) in &terms {
            let s = pow2(e - top_exp);
            let t = Cdd::new(c.re * s, c.im * s);
            max_term = max_term.max(mag(&t));
            sum = sum + t;
        }
        let re = ldexp(dd_to_f64(sum.re), top_exp);
        let im = ldexp(dd_to_f64(sum.im), top_exp);
        let bound = ldexp(max_term, top_exp) * 1e-31 * (m + n + 2) as f64;
        (re, im.abs(), bound)
    }
}

fn pow2(k: i64) -> TwoFloat {
    dd(ldexp(1.0, k))
}

fn ldexp(x: f64, k: i64) -> f64 {
    let k = k.clamp(-2200, 2200) as i32;
    let half = k / 2;
    x * 2f64.powi(half) * 2f64.powi(k - half)
}

/// `⟨m|D(α)|n⟩` for real `α`, via the associated Laguerre form.
fn displaced_overlap(m: usize, n: usize, alpha: f64) -> f64 {
    let (lo, hi, sign) = if m >= n { (n, m, 1.0) } else { (m, n, if (n - m) % 2 == 0 { 1.0 } else { -1.0 }) };
    let d = hi - lo;
    let x = alpha * alpha;
    let lag = laguerre(lo, d as f64, x);
    // α^d √(lo!/hi!)
    let mut pre = 1.0;
    for j in (lo + 1)..=hi {
        pre *= alpha / (j as f64).sqrt();
    }
    sign * pre * (-0.5 * x).exp() * lag
}

/// Generalized Laguerre polynomial `L_n^{(a)}(x)`.
fn laguerre(n: usize, a: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_entry(m: usize, n: usize, re: f64, im: f64, bound: f64) -> Result<f64> {
    if !re.is_finite() || !bound.is_finite() || bound > PRECISION_TOL {
        return Err(Error::PrecisionLoss { m, n, bound });
    }
    if im > IMAG_TOL {
        return Err(Error::FormulaInconsistency { m, n, residue: im });
    }
    Ok(re)
}

/// Single overlap entry `D_mn`.
pub fn overlap_entry(frame: &BogoliubovFrame, m: usize, n: usize) -> Result<f64> {
    if frame.is_small_g2() {
        return Ok(displaced_overlap(m, n, frame.w - frame.w_prime));
    }
    let sum = HermiteSum::new(frame.g1, frame.g2, m.max(n) + 1);
    let (re, im, bound) = sum.entry(m, n);
    check_entry(m, n, re, im, bound)
}

/// Overlap matrix `D_mn` for `m, n < size`.
pub fn overlap_matrix(frame: &BogoliubovFrame, size: usize) -> Result<OverlapMatrix> {
    if size == 0 || size > MAX_OVERLAP_SIZE {
        return Err(Error::InvalidArgument(format!("overlap size must be in 1..={MAX_OVERLAP_SIZE}, got {size}")));
    }
    let mut entries = DMatrix::zeros(size, size);
    if frame.is_small_g2() {
        let alpha = frame.w - frame.w_prime;
        for m in 0..size {
            for n in 0..size {
                entries[(m, n)] = displaced_overlap(m, n, alpha);
            }
        }
        return Ok(OverlapMatrix { entries, max_imag_residue: 0.0 });
    }
    let sum = HermiteSum::new(frame.g1, frame.g2, size);
    let mut max_imag_residue = 0.0f64;
    for m in 0..size {
        for n in 0..size {
            let (re, im, bound) = sum.entry(m, n);
            entries[(m, n)] = check_entry(m, n, re, im, bound)?;
            max_imag_residue = max_imag_residue.max(im);
        }
    }
    Ok(OverlapMatrix { entries, max_imag_residue })
}

/// Only the diagonal `D_mm` for `m < size`, without building the full matrix.
pub fn overlap_diagonal(frame: &BogoliubovFrame, size: usize) -> Result<Vec<f64>> {
    if size > MAX_OVERLAP_SIZE {
        return Err(Error::InvalidArgument(format!("overlap size must be at most {MAX_OVERLAP_SIZE}, got {size}")));
    }
    if frame.is_small_g2() {
        let alpha = frame.w - frame.w_prime;
        return Ok((0..size).map(|m| displaced_overlap(m, m, alpha)).collect());
    }
    let sum = HermiteSum::new(frame.g1, frame.g2, size);
    (0..size)
        .map(|m| {
            let (re, im, bound) = sum.entry(m, m);
            check_entry(m, m, re, im, bound)
        })
        .collect()
}

fn lowering(n: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = (k as f64).sqrt();
    }
    a
}

/// Internal Fock dimension used to build the basis states of an `n_tr`-level
/// expansion.
fn internal_dim(n_tr: usize) -> usize {
    2 * n_tr + 20
}

/// Fock amplitudes of `|m⟩_A` or `|m⟩_B` for `m < count`, as the columns of an
/// `n_tr × count` matrix.
///
/// The squeeze and displacement are exponentiated on a larger internal
/// truncation and the result is cut to `n_tr` rows; a column whose truncated
/// norm falls short of one by more than [`LEAKAGE_TOL`] is an error.
pub fn bogoliubov_basis_in_fock(frame: &BogoliubovFrame, which: Basis, count: usize, n_tr: usize) -> Result<DMatrix<f64>> {
    if n_tr == 0 || 2 * count > n_tr {
        return Err(Error::InvalidArgument(format!("need 2 * count <= n_tr, got count {count}, n_tr {n_tr}")));
    }
    let dim = internal_dim(n_tr);
    let a = lowering(dim);
    let ad = a.transpose();
    let (r, x) = match which {
        Basis::A => (frame.r, frame.w),
        Basis::B => (-frame.r, frame.w_prime),
    };
    let squeeze_gen = (&a * &a - &ad * &ad) * (0.5 * r);
    let displace_gen = (&ad - &a) * (-x);
    let squeeze = squeeze_gen.exp();
    let displace = displace_gen.exp();
    let cols = displace.columns(0, count).into_owned();
    let full = squeeze * cols;
    let out = full.rows(0, n_tr).into_owned();
    for c in 0..count {
        let norm2 = out.column(c).norm_squared();
        let deficit = 1.0 - norm2;
        if deficit > LEAKAGE_TOL {
            return Err(Error::TruncationLeakage { deficit });
        }
    }
    Ok(out)
}

/// Fock amplitudes of a single state `|m⟩_A` or `|m⟩_B`.
pub fn bogoliubov_state_in_fock(m: usize, frame: &BogoliubovFrame, which: Basis, n_tr: usize) -> Result<DVector<f64>> {
    if 2 * m >= n_tr {
        return Err(Error::InvalidArgument(format!("need m < n_tr / 2, got m {m}, n_tr {n_tr}")));
    }
    let basis = bogoliubov_basis_in_fock(frame, which, m + 1, n_tr)?;
    Ok(basis.column(m).into_owned())
}

/// Vacuum projections `D_m^A = ⟨0|m⟩_A` and `D_m^B = ⟨0|m⟩_B` for
/// `m = 0..=m_max`.
pub fn vacuum_projections(frame: &BogoliubovFrame, m_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if frame.is_small_g2() {
        let coherent = |x: f64| {
            let mut out = Vec::with_capacity(m_max + 1);
            let mut t = (-0.5 * x * x).exp();
            for m in 0..=m_max {
                if m > 0 {
                    t *= x / (m as f64).sqrt();
                }
                out.push(t);
            }
            out
        };
        return Ok((coherent(frame.w), coherent(frame.w_prime)));
    }
    let (u, v) = (frame.u, frame.v);
    let c = |x: f64| Complex64::new(x, 0.0);
    // A: z = √(−v/2u), ξ = w(u−v)/√(−2uv); B: z = √(v/2u), ξ = w′(u+v)/√(2uv)
    let za = c(-v / (2.0 * u)).sqrt();
    let xa = c(frame.w * (u - v)) / c(-2.0 * u * v).sqrt();
    let pre_a = (-frame.w * frame.w * (u - v) / (2.0 * u)).exp() / u.sqrt();
    let zb = c(v / (2.0 * u)).sqrt();
    let xb = c(frame.w_prime * (u + v)) / c(2.0 * u * v).sqrt();
    let pre_b = (-frame.w_prime * frame.w_prime * (u + v) / (2.0 * u)).exp() / u.sqrt();
    let da = projection_series(za, xa, pre_a, m_max, 0)?;
    let db = projection_series(zb, xb, pre_b, m_max, 1)?;
    Ok((da, db))
}

/// `pre · z^m H_m(ξ) / √m!` by the recurrence
/// `φ_{m+1} = (2ξz φ_m − 2√m z² φ_{m−1}) / √(m+1)`.
fn projection_series(z: Complex64, xi: Complex64, pre: f64, m_max: usize, tag: usize) -> Result<Vec<f64>> {
    let xz = xi * z;
    let z2 = z * z;
    let mut phi = Vec::with_capacity(m_max + 1);
    phi.push(Complex64::new(1.0, 0.0));
    if m_max >= 1 {
        phi.push(2.0 * xz);
    }
    for m in 1..m_max {
        let next = (2.0 * xz * phi[m] - 2.0 * (m as f64).sqrt() * z2 * phi[m - 1]) / ((m + 1) as f64).sqrt();
        phi.push(next);
    }
    phi.iter()
        .enumerate()
        .map(|(m, p)| {
            let val = p * pre;
            if !val.re.is_finite() {
                return Err(Error::PrecisionLoss { m, n: tag, bound: f64::INFINITY });
            }
            if val.im.abs() > IMAG_TOL {
                return Err(Error::FormulaInconsistency { m, n: tag, residue: val.im.abs() });
            }
            Ok(val.re)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frame_reference_values() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        assert!((f.beta - 0.979796).abs() < 1e-6);
        assert!((f.u - 1.005142).abs() < 1e-6);
        assert!((f.v - 0.1015400).abs() < 1e-6);
        assert!((f.w - 0.461117).abs() < 1e-6);
        assert!((f.w_prime + 0.5647513).abs() < 1e-6);
        assert!((f.r - f.u.acosh()).abs() < 1e-14);
    }

    #[test]
    fn frame_limits() {
        let f = frame_from_params(0.7, 0.0).unwrap();
        assert_eq!((f.beta, f.u, f.v), (1.0, 1.0, 0.0));
        assert!((f.w - 0.7).abs() < 1e-15 && (f.w_prime + 0.7).abs() < 1e-15);
        let f = frame_from_params(0.0, 0.2).unwrap();
        assert_eq!((f.w, f.w_prime), (0.0, 0.0));
        assert!((f.beta - 0.916515).abs() < 1e-6);
        assert!(matches!(frame_from_params(0.1, 0.5), Err(Error::SpectralCollapse { .. })));
    }

    proptest! {
        #[test]
        fn frame_identities(g1 in 0.0f64..2.0, g2 in 0.0f64..0.49) {
            let f = frame_from_params(g1, g2).unwrap();
            let b = f.beta;
            prop_assert!((f.u * f.u - f.v * f.v - 1.0).abs() < 1e-12);
            prop_assert!((b - (1.0 - 4.0 * g2 * g2).sqrt()).abs() < 1e-14);
            prop_assert!((0.5 * b * (f.w * f.w + f.w_prime * f.w_prime) - g1 * g1 / (b * b)).abs() < 1e-10);
            prop_assert!((b * (f.w_prime * f.w_prime - f.w * f.w) - 4.0 * g1 * g1 * g2 / (b * b)).abs() < 1e-10);
            prop_assert!((f.u * f.v * b - g2).abs() < 1e-12);
        }
    }

    #[test]
    fn squeezed_vacuum_overlap() {
        let f = frame_from_params(0.0, 0.1).unwrap();
        let d = overlap_entry(&f, 0, 0).unwrap();
        assert!((d - f.beta.sqrt()).abs() < 1e-12);
        assert!((d - 0.989846).abs() < 1e-6);
    }

    #[test]
    fn identity_at_zero_coupling() {
        let f = frame_from_params(0.0, 0.0).unwrap();
        let d = overlap_matrix(&f, 12).unwrap();
        assert!((d.entries() - DMatrix::<f64>::identity(12, 12)).amax() < 1e-15);
    }

    #[test]
    fn hermite_sum_matches_fock_oracle() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        let d = overlap_matrix(&f, 12).unwrap();
        let a = bogoliubov_basis_in_fock(&f, Basis::A, 12, 120).unwrap();
        let b = bogoliubov_basis_in_fock(&f, Basis::B, 12, 120).unwrap();
        let brute = a.transpose() * b;
        assert!((d.entries() - brute).amax() < 1e-10);
        assert!(d.max_imag_residue() < 1e-20);
    }

    #[test]
    fn displaced_branch_matches_fock_oracle() {
        let f = frame_from_params(0.8, 0.0).unwrap();
        let d = overlap_matrix(&f, 15).unwrap();
        let a = bogoliubov_basis_in_fock(&f, Basis::A, 15, 100).unwrap();
        let b = bogoliubov_basis_in_fock(&f, Basis::B, 15, 100).unwrap();
        assert!((d.entries() - a.transpose() * b).amax() < 1e-10);
    }

    #[test]
    fn strong_coupling_entries_stay_real() {
        let f = frame_from_params(1.5, 0.2).unwrap();
        let d = overlap_matrix(&f, 60).unwrap();
        assert!(d.max_imag_residue() < 1e-10);
        let a = bogoliubov_basis_in_fock(&f, Basis::A, 60, 200).unwrap();
        let b = bogoliubov_basis_in_fock(&f, Basis::B, 60, 200).unwrap();
        assert!((d.entries() - a.transpose() * b).amax() < 1e-8);
    }

    #[test]
    fn interior_orthogonality() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        let d = overlap_matrix(&f, 60).unwrap();
        assert!(d.orthogonality_defect_within(30) < 1e-6);
        // rows near the cut lose weight to columns beyond the matrix
        assert!(d.orthogonality_defect() > d.orthogonality_defect_within(30));
    }

    #[test]
    fn fault_is_visible_in_orthogonality() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        let d = overlap_matrix(&f, 60).unwrap();
        assert!(d.orthogonality_defect_within(30) < 1e-6);
        let bad = d.with_entry(3, 5, d.get(3, 5) + 1e-3);
        assert!(bad.orthogonality_defect_within(30) > 1e-4);
    }

    #[test]
    fn size_guard() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        assert!(overlap_matrix(&f, 201).is_err());
        assert!(overlap_matrix(&f, 0).is_err());
    }

    #[test]
    fn overlap_diagonal_matches_matrix() {
        let f = frame_from_params(1.0, 0.05).unwrap();
        let d = overlap_matrix(&f, 25).unwrap();
        let diag = overlap_diagonal(&f, 25).unwrap();
        for m in 0..25 {
            assert_eq!(diag[m], d.get(m, m));
        }
    }

    #[test]
    fn identity_state_is_fock_vacuum() {
        let f = frame_from_params(0.0, 0.0).unwrap();
        let s = bogoliubov_state_in_fock(0, &f, Basis::A, 10).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-15);
        assert!(s.iter().skip(1).all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn squeezed_vacuum_has_even_parity() {
        let f = frame_from_params(0.0, 0.1).unwrap();
        let s = bogoliubov_state_in_fock(0, &f, Basis::A, 40).unwrap();
        for k in (1..40).step_by(2) {
            assert!(s[k].abs() < 1e-15);
        }
        assert!(s[2].abs() > 1e-3);
    }

    #[test]
    fn state_guards() {
        let f = frame_from_params(0.5, 0.1).unwrap();
        assert!(matches!(bogoliubov_state_in_fock(5, &f, Basis::A, 10), Err(Error::InvalidArgument(_))));
        let strong = frame_from_params(3.0, 0.1).unwrap();
        assert!(matches!(bogoliubov_state_in_fock(1, &strong, Basis::B, 6), Err(Error::TruncationLeakage { .. })));
    }

    #[test]
    fn vacuum_projections_match_fock_oracle() {
        for &(g1, g2) in &[(0.5, 0.1), (1.0, 0.1), (0.3, 0.25), (1.0, 0.0)] {
            let f = frame_from_params(g1, g2).unwrap();
            let (da, db) = vacuum_projections(&f, 20).unwrap();
            let a = bogoliubov_basis_in_fock(&f, Basis::A, 21, 120).unwrap();
            let b = bogoliubov_basis_in_fock(&f, Basis::B, 21, 120).unwrap();
            for m in 0..=20 {
                assert!((da[m] - a[(0, m)]).abs() < 1e-10, "A {g1} {g2} m={m}");
                assert!((db[m] - b[(0, m)]).abs() < 1e-10, "B {g1} {g2} m={m}");
            }
        }
    }

    #[test]
    fn vacuum_projection_parity_and_completeness() {
        let f = frame_from_params(0.0, 0.3).unwrap();
        let (da, db) = vacuum_projections(&f, 30).unwrap();
        for m in (1..30).step_by(2) {
            assert_eq!(da[m], 0.0);
            assert_eq!(db[m], 0.0);
        }
        let f = frame_from_params(1.0, 0.1).unwrap();
        let (da, db) = vacuum_projections(&f, 60).unwrap();
        assert!((da.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-6);
        assert!((db.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coherent_limit() {
        let f = frame_from_params(1.0, 0.0).unwrap();
        let (da, _) = vacuum_projections(&f, 10).unwrap();
        let mut fact = 1.0;
        for m in 0..=10 {
            if m > 0 {
                fact *= m as f64;
            }
            let expect = (-0.5f64).exp() / fact.sqrt();
            assert!((da[m] - expect).abs() < 1e-14);
        }
        // the general branch approaches the coherent limit continuously
        let near = frame_from_params(1.0, 1e-6).unwrap();
        let (dn, _) = vacuum_projections(&near, 10).unwrap();
        for m in 0..=10 {
            assert!((dn[m] - da[m]).abs() < 1e-5);
        }
    }
}
