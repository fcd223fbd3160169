//! Figure presets: fixed parameter panels on top of the caller's numerical
//! settings (`n_tr`, time grid, levels, jobs).

use qrabi_core::ModelParams;

use crate::config::{Command, Method, Preset, RunConfig, Sweep, SweepParam};
use crate::error::{CliError, Result};
use crate::output::format_number;

pub const PRESET_HELP: &str = "\
Presets (qrabi reproduce --preset NAME):
  fig1  spectrum vs g1 in [0, 1.5] step 0.025 for delta in {0.5, 1} and
        g2 in {0.1, 0.2}; methods fock, adiabatic.
        The g2 values are those of the plotted panels. The accompanying
        discussion quotes g2 = 0.05 and 0.1 instead; run those by hand with
        `qrabi spectrum --sweep g1:0:1.5:0.025 --g2 0.05`.
  fig2  dynamics at delta in {0.1, 0.2, 0.5}, g1 = 0.5, g2 = 0.1; exact
        propagation vs the adiabatic approximation.
  fig3  RWA spectrum vs g1 in [0, 0.5] step 0.01 for delta in {0.5, 1} and
        g2 in {0.1, 0.2}; numerical RWA and both analytic branches.
  fig4  RWA dynamics and Fourier spectra at delta = 0.5 for
        (g1, g2) in {0.1, 0.5} x {0.05, 0.1}.
  fig5  RWA emission spectrum at delta = 1, g1 = 0.1, g2 in {0.05, 0.1}.
  fig6  emission spectrum without RWA at delta = 0.1, g1 = 1,
        g2 in {0, 0.05, 0.1}; methods fock, adiabatic.

Exit codes: 0 success, 1 usage error, 2 solver or I/O error,
3 validation failure.";

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub name: String,
    pub config: RunConfig,
    /// Also emit the Fourier table of the dynamics.
    pub fourier: bool,
}

fn panel(base: &RunConfig, name: String, command: Command, params: (f64, f64, f64), methods: &[Method]) -> Result<Panel> {
    let mut config = base.clone();
    config.command = command;
    config.preset = None;
    config.sweep = None;
    config.methods = methods.to_vec();
    config.params = ModelParams::new(params.0, params.1, params.2).map_err(CliError::Params)?;
    Ok(Panel { name, config, fourier: false })
}

fn tag(x: f64) -> String {
    format_number(x)
}

pub fn panels(preset: Preset, base: &RunConfig) -> Result<Vec<Panel>> {
    let mut out = Vec::new();
    match preset {
        Preset::Fig1 | Preset::Fig3 => {
            let (stop, step, methods, label) = match preset {
                Preset::Fig1 => (1.5, 0.025, &[Method::Fock, Method::Adiabatic][..], "fig1"),
                _ => (0.5, 0.01, &[Method::Rwa][..], "fig3"),
            };
            for delta in [0.5, 1.0] {
                for g2 in [0.1, 0.2] {
                    let name = format!("{label}_delta{}_g2-{}", tag(delta), tag(g2));
                    let mut p = panel(base, name, Command::Spectrum, (delta, 0.0, g2), methods)?;
                    p.config.sweep = Some(Sweep::new(SweepParam::G1, 0.0, stop, step)?);
                    out.push(p);
                }
            }
        }
        Preset::Fig2 => {
            for delta in [0.1, 0.2, 0.5] {
                let name = format!("fig2_delta{}", tag(delta));
                out.push(panel(base, name, Command::Dynamics, (delta, 0.5, 0.1), &[Method::Adiabatic])?);
            }
        }
        Preset::Fig4 => {
            for g1 in [0.1, 0.5] {
                for g2 in [0.05, 0.1] {
                    let name = format!("fig4_g1-{}_g2-{}", tag(g1), tag(g2));
                    let mut p = panel(base, name, Command::Dynamics, (0.5, g1, g2), &[Method::Rwa])?;
                    p.fourier = true;
                    out.push(p);
                }
            }
        }
        Preset::Fig5 => {
            for g2 in [0.05, 0.1] {
                let name = format!("fig5_g2-{}", tag(g2));
                out.push(panel(base, name, Command::Splitting, (1.0, 0.1, g2), &[Method::Rwa])?);
            }
        }
        Preset::Fig6 => {
            for g2 in [0.0, 0.05, 0.1] {
                let name = format!("fig6_g2-{}", tag(g2));
                out.push(panel(base, name, Command::Splitting, (0.1, 1.0, g2), &[Method::Fock, Method::Adiabatic])?);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_uses_plotted_panels() {
        let p = panels(Preset::Fig1, &RunConfig::new(Command::Reproduce)).unwrap();
        assert_eq!(p.len(), 4);
        let g2: Vec<f64> = p.iter().map(|x| x.config.params.g2()).collect();
        assert_eq!(g2, [0.1, 0.2, 0.1, 0.2]);
        assert_eq!(p[0].name, "fig1_delta0.5_g2-0.1");
        assert_eq!(p[0].config.sweep.unwrap().values().len(), 61);
    }

    #[test]
    fn panel_counts() {
        let base = RunConfig::new(Command::Reproduce);
        let counts: Vec<usize> = [Preset::Fig2, Preset::Fig3, Preset::Fig4, Preset::Fig5, Preset::Fig6]
            .iter()
            .map(|&p| panels(p, &base).unwrap().len())
            .collect();
        assert_eq!(counts, [3, 4, 4, 2, 3]);
        for p in panels(Preset::Fig4, &base).unwrap() {
            assert!(p.fourier);
            p.config.validate().unwrap();
        }
    }
}
