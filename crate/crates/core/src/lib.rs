//! Generalized quantum Rabi model with simultaneous one- and two-photon
//! couplings,
//!
//! ```text
//! H = (Δ/2)σz + a†a + σx[g1(a† + a) + g2(a†² + a²)],
//! ```
//!
//! in units of the oscillator frequency.
//!
//! * [`model`]: parameters and truncated Hamiltonians (lab, rotated, RWA).
//! * [`bogoliubov`]: displaced-squeezed bases and their overlaps.
//! * [`exact`]: Fock-basis and Bogoliubov-basis diagonalization.
//! * [`adiabatic`]: closed-form adiabatic levels, states, and dynamics.
//! * [`rwa`]: rotating-wave solution through 3×3 cubic equations.
//! * [`dynamics`]: ⟨σz(t)⟩, Rabi frequencies, Fourier spectra.
//! * [`emission`]: vacuum Rabi splitting emission spectra.

pub mod adiabatic;
pub mod bogoliubov;
pub mod dynamics;
pub mod emission;
pub mod error;
pub mod exact;
pub mod hermite;
pub mod linalg;
pub mod model;
pub mod rwa;

pub use error::{Error, Result};
pub use model::{Frame, ModelParams, TruncatedOperator};
