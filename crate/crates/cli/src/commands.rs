//! Sweep execution and the data-producing commands.

use qrabi_core::adiabatic::{adiabatic_dynamics, adiabatic_levels, biased_levels};
use qrabi_core::dynamics::{
    exact_dynamics, fourier_spectrum, rabi_frequencies, rwa_population, uniform_grid, upper_fock_state, TimeSeries,
};
use qrabi_core::emission::{emission_spectrum_full, emission_spectrum_rwa, PRUNE_WEIGHT};
use qrabi_core::exact::{solve_bogoliubov, solve_fock, solve_rwa};
use qrabi_core::model::{build_lab_hamiltonian, build_rwa_hamiltonian};
use qrabi_core::rwa::{check_root_selection, rwa_energy, Branch};
use qrabi_core::{Error, Frame, ModelParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{name_of, Command, Method, RunConfig, SweepParam};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

/// One sweep point that could not be computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointFailure {
    pub table: String,
    pub index: usize,
    pub parameter: String,
    pub value: f64,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub failures: Vec<PointFailure>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn merge(&mut self, other: Outcome) {
        self.tables.extend(other.tables);
        self.failures.extend(other.failures);
        self.warnings.extend(other.warnings);
    }
}

struct Point {
    index: usize,
    value: f64,
    params: ModelParams,
}

struct PointRows {
    rows: Vec<Vec<Cell>>,
    warnings: Vec<String>,
}

fn sweep_points(cfg: &RunConfig) -> Result<(SweepParam, Vec<Point>)> {
    match &cfg.sweep {
        Some(s) => {
            let pts = s
                .values()
                .into_iter()
                .enumerate()
                .map(|(index, value)| Ok(Point { index, value, params: s.apply(cfg.params, value)? }))
                .collect::<Result<_>>()?;
            Ok((s.param, pts))
        }
        None => Ok((SweepParam::G1, vec![Point { index: 0, value: cfg.params.g1(), params: cfg.params }])),
    }
}

/// Evaluates `f` at every sweep point on the worker pool. Rows keep sweep
/// order; the sweep value leads each row when `lead` is set.
fn run_sweep<F>(cfg: &RunConfig, name: &str, columns: &[&str], lead: bool, f: F) -> Result<Outcome>
where
    F: Fn(&Point) -> std::result::Result<PointRows, Error> + Sync,
{
    let (param, points) = sweep_points(cfg)?;
    let param_name = name_of(&param);
    let mut header: Vec<&str> = Vec::with_capacity(columns.len() + 1);
    if lead {
        header.push(&param_name);
    }
    header.extend_from_slice(columns);
    let results: Vec<_> = points.par_iter().map(|p| (p, f(p))).collect();

    let mut table = Table::new(name, &header, cfg.params, cfg.n_tr);
    let mut out = Outcome::default();
    for (p, r) in results {
        match r {
            Ok(pr) => {
                for row in pr.rows {
                    let mut full = Vec::with_capacity(header.len());
                    if lead {
                        full.push(Cell::Num(p.value));
                    }
                    full.extend(row);
                    table.push(full);
                }
                out.warnings.extend(pr.warnings.into_iter().map(|w| format!("{name}: {param_name}={}: {w}", p.value)));
            }
            Err(e) => out.failures.push(PointFailure {
                table: name.to_string(),
                index: p.index,
                parameter: param_name.clone(),
                value: p.value,
                error: e.to_string(),
            }),
        }
    }
    out.tables.push(table);
    Ok(out)
}

pub const SPECTRUM_DEFAULT: [Method; 2] = [Method::Fock, Method::Adiabatic];
pub const SPLITTING_DEFAULT: [Method; 1] = [Method::Adiabatic];

pub fn cmd_spectrum(cfg: &RunConfig, name: &str) -> Result<Outcome> {
    let methods = cfg.methods_or(&SPECTRUM_DEFAULT);
    run_sweep(cfg, name, &["level_index", "method", "energy"], true, |p| spectrum_rows(cfg, &methods, &p.params))
}

fn push_levels(rows: &mut Vec<Vec<Cell>>, method: &str, energies: impl IntoIterator<Item = (usize, f64)>) {
    for (i, e) in energies {
        rows.push(vec![Cell::Int(i), Cell::Text(method.into()), Cell::Num(e)]);
    }
}

fn spectrum_rows(cfg: &RunConfig, methods: &[Method], params: &ModelParams) -> std::result::Result<PointRows, Error> {
    let k = cfg.levels;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for m in methods {
        match m {
            Method::Fock => push_levels(&mut rows, "fock", solve_fock(params, cfg.n_tr, k)?.eigenvalues().iter().copied().enumerate()),
            Method::Bogoliubov => push_levels(
                &mut rows,
                "bogoliubov",
                solve_bogoliubov(params, cfg.n_tr, k)?.eigenvalues().iter().copied().enumerate(),
            ),
            Method::Adiabatic => push_levels(&mut rows, "adiabatic", adiabatic_spectrum(params, k)?.into_iter().enumerate()),
            Method::Rwa => {
                push_levels(&mut rows, "fock-rwa", solve_rwa(params, cfg.n_tr, k)?.eigenvalues().iter().copied().enumerate());
                for (label, branch) in [("rwa-analytic-1", Branch::Type1), ("rwa-analytic-2", Branch::Type2)] {
                    let mut levels = Vec::new();
                    for n in 0..k {
                        match rwa_energy(n, branch, params) {
                            Ok(e) => levels.push((n, e)),
                            Err(e @ (Error::DegenerateRoots { .. } | Error::DegenerateState { .. })) => {
                                warnings.push(format!("{label} n={n} skipped: {e}"))
                            }
                            Err(e) => return Err(e),
                        }
                        if let Ok(w) = check_root_selection(n, branch, params) {
                            if !w.is_empty() {
                                warnings.push(format!("{label} n={n}: fixed root choice misses a single-coupling limit"));
                            }
                        }
                    }
                    push_levels(&mut rows, label, levels);
                }
            }
        }
    }
    Ok(PointRows { rows, warnings })
}

/// Lowest `k` adiabatic energies, both branches merged.
pub fn adiabatic_spectrum(params: &ModelParams, k: usize) -> std::result::Result<Vec<f64>, Error> {
    let levels = if params.epsilon() == 0.0 { adiabatic_levels(params, k)? } else { biased_levels(params, k)? };
    let mut e: Vec<f64> = levels.iter().flat_map(|l| [l.energy_minus, l.energy_plus]).collect();
    e.sort_by(f64::total_cmp);
    e.truncate(k);
    Ok(e)
}

/// Exact and analytic ⟨σz(t)⟩ from `|↑⟩|0⟩`: the full model against the
/// adiabatic approximation, or the RWA model against its three-state
/// solution.
pub fn dynamics_pair(cfg: &RunConfig, method: Method, params: &ModelParams) -> std::result::Result<(TimeSeries, TimeSeries), Error> {
    let t = uniform_grid(cfg.t_max, cfg.dt)?;
    match method {
        Method::Rwa => {
            let h = build_rwa_hamiltonian(params, cfg.n_tr)?;
            let exact = exact_dynamics(&h, &upper_fock_state(Frame::Rwa, 0, cfg.n_tr)?, &t)?;
            Ok((exact, rwa_population(0, params, &t)?))
        }
        _ => {
            let h = build_lab_hamiltonian(params, cfg.n_tr)?;
            let exact = exact_dynamics(&h, &upper_fock_state(Frame::Lab, 0, cfg.n_tr)?, &t)?;
            Ok((exact, adiabatic_dynamics(params, &t)?))
        }
    }
}

pub fn cmd_dynamics(cfg: &RunConfig, name: &str) -> Result<Outcome> {
    let method = cfg.dynamics_method()?;
    run_sweep(cfg, name, &["t", "sigma_z_exact", "sigma_z_analytic"], cfg.sweep.is_some(), |p| {
        let (exact, analytic) = dynamics_pair(cfg, method, &p.params)?;
        let rows = exact
            .times()
            .iter()
            .zip(exact.values())
            .zip(analytic.values())
            .map(|((&t, &x), &a)| vec![Cell::Num(t), Cell::Num(x), Cell::Num(a)])
            .collect();
        Ok(PointRows { rows, warnings: Vec::new() })
    })
}

/// Fourier magnitudes of both dynamics curves on a shared frequency axis.
pub fn fourier_table(cfg: &RunConfig, method: Method, name: &str) -> Result<Table> {
    let (exact, analytic) = dynamics_pair(cfg, method, &cfg.params)?;
    let fx = fourier_spectrum(&exact)?;
    let fa = fourier_spectrum(&analytic)?;
    let mut t = Table::new(name, &["omega", "magnitude_exact", "magnitude_analytic"], cfg.params, cfg.n_tr);
    for i in 0..fx.frequencies.len() {
        t.push(vec![Cell::Num(fx.frequencies[i]), Cell::Num(fx.magnitudes[i]), Cell::Num(fa.magnitudes[i])]);
    }
    Ok(t)
}

pub fn cmd_rabi(cfg: &RunConfig, name: &str) -> Result<Outcome> {
    run_sweep(cfg, name, &["n", "omega_1", "omega_2"], cfg.sweep.is_some(), |p| {
        let mut rows = Vec::new();
        let mut warnings = Vec::new();
        for n in 0..cfg.levels {
            match rabi_frequencies(n, &p.params) {
                Ok((w1, w2)) => rows.push(vec![Cell::Int(n), Cell::Num(w1), Cell::Num(w2)]),
                Err(e @ (Error::DegenerateRoots { .. } | Error::DegenerateState { .. })) => {
                    warnings.push(format!("n={n} skipped: {e}"))
                }
                Err(e) => return Err(e),
            }
            for branch in [Branch::Type1, Branch::Type2] {
                if check_root_selection(n, branch, &p.params).is_ok_and(|w| !w.is_empty()) {
                    warnings.push(format!("n={n} {branch:?}: fixed root choice misses a single-coupling limit"));
                }
            }
        }
        Ok(PointRows { rows, warnings })
    })
}

pub fn cmd_splitting(cfg: &RunConfig, name: &str) -> Result<Outcome> {
    let methods = cfg.methods_or(&SPLITTING_DEFAULT);
    if methods.contains(&Method::Bogoliubov) {
        return Err(CliError::Usage("splitting supports the fock, adiabatic and rwa methods".into()));
    }
    run_sweep(cfg, name, &["nu_R", "weight", "method"], cfg.sweep.is_some(), |p| {
        let params = &p.params;
        let mut rows = Vec::new();
        let mut warnings = Vec::new();
        let mut push = |nu: f64, w: f64, method: &str| rows.push(vec![Cell::Num(nu), Cell::Num(w), Cell::Text(method.into())]);
        for m in &methods {
            match m {
                Method::Fock => {
                    let s = solve_fock(params, cfg.n_tr, cfg.n_tr)?;
                    numerical_peaks(s.eigenvalues(), s.eigenvectors(), s.eigenvalues()[0], &mut |nu, w| push(nu, w, "fock"));
                }
                Method::Adiabatic => {
                    let s = emission_spectrum_full(params, cfg.m_max)?;
                    if s.cutoff_warning {
                        warnings.push(format!("adiabatic peaks capture only {:.6} of the weight", s.total_weight));
                    }
                    s.peaks.iter().for_each(|pk| push(pk.frequency, pk.weight, "adiabatic"));
                }
                Method::Rwa => {
                    let s = emission_spectrum_rwa(params)?;
                    s.peaks.iter().for_each(|pk| push(pk.frequency, pk.weight, "rwa-analytic"));
                    let n = solve_rwa(params, cfg.n_tr, cfg.n_tr)?;
                    numerical_peaks(n.eigenvalues(), n.eigenvectors(), -params.delta() / 2.0, &mut |nu, w| {
                        push(nu, w, "fock-rwa")
                    });
                }
                Method::Bogoliubov => unreachable!("rejected above"),
            }
        }
        Ok(PointRows { rows, warnings })
    })
}

/// Peaks `(E_k − ground, |⟨↑,0|k⟩|²)` from eigenvectors in the `2n + s`
/// layout, where `|↑,0⟩` is index 0.
fn numerical_peaks<M>(energies: &[f64], vectors: &M, ground: f64, push: &mut dyn FnMut(f64, f64))
where
    M: std::ops::Index<(usize, usize), Output = f64>,
{
    for (k, &e) in energies.iter().enumerate() {
        let w = vectors[(0, k)].powi(2);
        if w >= PRUNE_WEIGHT {
            push(e - ground, w);
        }
    }
}

/// Runs a data-producing command on its own configuration.
pub fn execute(cfg: &RunConfig, name: &str) -> Result<Outcome> {
    match cfg.command {
        Command::Spectrum => cmd_spectrum(cfg, name),
        Command::Dynamics => cmd_dynamics(cfg, name),
        Command::Rabi => cmd_rabi(cfg, name),
        Command::Splitting => cmd_splitting(cfg, name),
        Command::Validate | Command::Reproduce => {
            Err(CliError::Usage(format!("{} does not produce a single table", name_of(&cfg.command))))
        }
    }
}

pub fn reproduce(cfg: &RunConfig) -> Result<Outcome> {
    let preset = cfg.preset.ok_or_else(|| CliError::Usage("reproduce needs --preset".into()))?;
    let mut out = Outcome::default();
    for panel in crate::presets::panels(preset, cfg)? {
        out.merge(execute(&panel.config, &panel.name)?);
        if panel.fourier {
            let method = panel.config.dynamics_method()?;
            out.tables.push(fourier_table(&panel.config, method, &format!("{}_fourier", panel.name))?);
        }
    }
    Ok(out)
}
