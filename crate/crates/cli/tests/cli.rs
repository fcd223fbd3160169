use std::path::Path;

use proptest::prelude::*;
use qrabi_cli::config::{Command, Format, Method, Preset, RunConfig, Sweep, SweepParam};
use qrabi_cli::main_with_args;
use qrabi_core::ModelParams;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn qrabi(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = main_with_args(std::iter::once("qrabi").chain(args.iter().copied()), &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn ok(args: &[&str]) -> String {
    let r = qrabi(args);
    assert_eq!(r.code, 0, "qrabi {args:?} failed: {}", r.stderr);
    r.stdout
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn header(csv: &str) -> &str {
    csv.lines().next().unwrap_or("")
}

#[test]
fn uncoupled_spectrum_is_half_integers() {
    let csv = ok(&["spectrum", "--delta", "1", "--g1", "0", "--g2", "0", "--methods", "fock", "--levels", "7"]);
    assert_eq!(header(&csv), "g1,level_index,method,energy");
    let energies: Vec<f64> = rows(&csv).iter().map(|r| r[3].parse().unwrap()).collect();
    let expected = [-0.5, 0.5, 0.5, 1.5, 1.5, 2.5, 2.5];
    assert_eq!(energies.len(), expected.len());
    for (e, x) in energies.iter().zip(expected) {
        assert!((e - x).abs() < 1e-10, "{e} vs {x}");
    }
}

#[test]
fn spectrum_sweep_has_one_row_per_point_level_method() {
    let csv = ok(&["spectrum", "--delta", "0.5", "--g2", "0.1", "--sweep", "g1:0:0.3:0.1", "--levels", "4"]);
    let r = rows(&csv);
    assert_eq!(r.len(), 4 * 4 * 2);
    for method in ["fock", "adiabatic"] {
        assert_eq!(r.iter().filter(|row| row[2] == method).count(), 16);
    }
}

#[test]
fn collapse_is_rejected_before_solving() {
    let r = qrabi(&["validate", "--g2", "0.6"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("collapse"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn sweep_crossing_collapse_is_rejected() {
    assert_eq!(qrabi(&["spectrum", "--sweep", "g2:0:0.6:0.1"]).code, 1);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qrabi(&["nonsense"]).code, 1);
    assert_eq!(qrabi(&["spectrum", "--sweep", "g1:0:1:0"]).code, 1);
    assert_eq!(qrabi(&["spectrum", "--sweep", "g1:1:0:0.1"]).code, 1);
    assert_eq!(qrabi(&["reproduce"]).code, 1);
    assert_eq!(qrabi(&["spectrum", "--ntr", "10", "--levels", "30"]).code, 1);
    assert_eq!(qrabi(&["dynamics", "--methods", "fock"]).code, 1);
    assert_eq!(qrabi(&["splitting", "--methods", "bogoliubov"]).code, 1);
    assert_eq!(qrabi(&["spectrum", "--jobs", "0"]).code, 1);
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("spectrum.csv");
    let r = qrabi(&["spectrum", "--levels", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 2, "{}", r.stderr);
}

#[test]
fn dynamics_at_t_zero_starts_excited() {
    let cases = [("adiabatic", "0.1", "0.05"), ("rwa", "0.1", "0"), ("rwa", "0", "0.05")];
    for (method, g1, g2) in cases {
        let csv = ok(&["dynamics", "--delta", "0.5", "--g1", g1, "--g2", g2, "--t-max", "0", "--methods", method]);
        assert_eq!(header(&csv), "t,sigma_z_exact,sigma_z_analytic");
        let r = rows(&csv);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0][..2], ["0", "1"]);
        let analytic: f64 = r[0][2].parse().unwrap();
        assert!((analytic - 1.0).abs() < 1e-9, "{method} {g1} {g2}: {analytic}");
    }
}

#[test]
fn dynamics_grid_length() {
    let csv = ok(&["dynamics", "--g1", "0.5", "--g2", "0.1", "--delta", "0.1", "--t-max", "2", "--dt", "0.5"]);
    let t: Vec<String> = rows(&csv).iter().map(|r| r[0].clone()).collect();
    assert_eq!(t, ["0", "0.5", "1", "1.5", "2"]);
}

#[test]
fn rabi_schema() {
    let csv = ok(&["rabi", "--delta", "0.5", "--g1", "0.1", "--g2", "0.05", "--levels", "3"]);
    assert_eq!(header(&csv), "n,omega_1,omega_2");
    assert_eq!(rows(&csv).len(), 3);
}

#[test]
fn resonant_jaynes_cummings_splitting_is_even() {
    let csv = ok(&["splitting", "--delta", "1", "--g1", "0.1", "--g2", "0", "--methods", "rwa"]);
    assert_eq!(header(&csv), "nu_R,weight,method");
    let analytic: Vec<(f64, f64)> = rows(&csv)
        .iter()
        .filter(|r| r[2] == "rwa-analytic")
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    assert_eq!(analytic.len(), 3);
    for ((nu, w), expected) in analytic.iter().zip([0.9, 1.1]) {
        assert!((nu - expected).abs() < 1e-10, "{nu}");
        assert!((w - 0.5).abs() < 1e-9, "{w}");
    }
    assert!(analytic[2].1.abs() < 1e-12);
}

#[test]
fn splitting_weights_sum_to_one() {
    let csv = ok(&["splitting", "--delta", "0.1", "--g1", "1", "--g2", "0.05", "--methods", "fock,adiabatic"]);
    for method in ["fock", "adiabatic"] {
        let total: f64 = rows(&csv).iter().filter(|r| r[2] == method).map(|r| r[1].parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-3, "{method}: {total}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_pool_sizes() {
    let args = ["spectrum", "--delta", "1", "--g2", "0.2", "--sweep", "g1:0:0.6:0.05", "--methods", "fock,bogoliubov,adiabatic"];
    let first = ok(&args);
    let mut one = args.to_vec();
    one.extend(["--jobs", "1"]);
    let mut three = args.to_vec();
    three.extend(["--jobs", "3"]);
    assert_eq!(first, ok(&args));
    assert_eq!(first, ok(&one));
    assert_eq!(first, ok(&three));
}

#[test]
fn json_mirrors_csv_with_metadata() {
    let args = ["spectrum", "--delta", "0.5", "--g1", "0.3", "--g2", "0.1", "--levels", "3", "--ntr", "40"];
    let csv = ok(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&ok(&json_args)).unwrap();
    let meta = &v["metadata"];
    assert_eq!(meta["params"]["delta"], 0.5);
    assert_eq!(meta["params"]["g1"], 0.3);
    assert_eq!(meta["params"]["g2"], 0.1);
    assert_eq!(meta["n_tr"], 40);
    assert_eq!(meta["version"], env!("CARGO_PKG_VERSION"));
    let columns: Vec<&str> = v["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(columns.join(","), header(&csv));
    let energies = v["data"]["energy"].as_array().unwrap();
    let csv_rows = rows(&csv);
    assert_eq!(energies.len(), csv_rows.len());
    for (e, r) in energies.iter().zip(&csv_rows) {
        assert_eq!(e.as_f64().unwrap(), r[3].parse::<f64>().unwrap());
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# rabi run\ncommand = spectrum\ndelta = 1\ng1 = 0.4 # coupling\ng2 = 0.1\nmethods = fock\nlevels = 2\n")
        .unwrap();
    let from_file = ok(&["spectrum", "--config", path.to_str().unwrap()]);
    let by_flags = ok(&["spectrum", "--delta", "1", "--g1", "0.4", "--g2", "0.1", "--methods", "fock", "--levels", "2"]);
    assert_eq!(from_file, by_flags);
    let overridden = ok(&["spectrum", "--config", path.to_str().unwrap(), "--g1", "0"]);
    let energies: Vec<f64> = rows(&overridden).iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(energies.iter().all(|e| e.fract().abs() != 0.0));
    assert_eq!(rows(&overridden)[0][0], "0");
}

#[test]
fn config_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "command = spectrum\ncolour = blue\n").unwrap();
    assert_eq!(qrabi(&["spectrum", "--config", path.to_str().unwrap()]).code, 1);
    let missing = dir.path().join("missing.conf");
    assert_eq!(qrabi(&["spectrum", "--config", missing.to_str().unwrap()]).code, 2);
}

#[test]
fn every_preset_emits_nonempty_data() {
    for preset in ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"] {
        let dir = tempfile::tempdir().unwrap();
        let listed = ok(&["reproduce", "--preset", preset, "--out", dir.path().to_str().unwrap()]);
        let files: Vec<&str> = listed.lines().collect();
        assert!(!files.is_empty(), "{preset}");
        for f in files {
            assert!(Path::new(f).starts_with(dir.path()));
            let text = std::fs::read_to_string(f).unwrap();
            assert!(text.lines().count() > 1, "{f} is empty");
            assert!(!text.contains("nan"), "{f} has nan");
        }
    }
}

#[test]
fn fig3_preset_carries_all_rwa_labels() {
    let dir = tempfile::tempdir().unwrap();
    let listed = ok(&["reproduce", "--preset", "fig3", "--out", dir.path().to_str().unwrap()]);
    let text = std::fs::read_to_string(listed.lines().next().unwrap()).unwrap();
    for label in ["fock-rwa", "rwa-analytic-1", "rwa-analytic-2"] {
        assert!(text.contains(&format!(",{label},")), "{label}");
    }
}

#[test]
fn help_documents_fig1_discrepancy_and_exit_codes() {
    let r = qrabi(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("fig1"));
    assert!(r.stdout.contains("g2 = 0.05 and 0.1"));
    assert!(r.stdout.contains("Exit codes"));
}

#[test]
fn validate_names_injected_fault() {
    let r = qrabi(&["validate", "--inject-fault"]);
    assert_eq!(r.code, 3);
    let report: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report["fault_injected"], true);
    assert_eq!(report["passed"], false);
    let check = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "bogoliubov.overlap_orthogonality")
        .expect("orthogonality check present");
    assert_eq!(check["passed"], false);
    assert!(check["observed"].as_f64().unwrap() > check["tolerance"].as_f64().unwrap());
    assert!(r.stderr.contains("bogoliubov.overlap_orthogonality"));
}

fn arb_command() -> impl Strategy<Value = Command> {
    prop_oneof![
        Just(Command::Spectrum),
        Just(Command::Dynamics),
        Just(Command::Rabi),
        Just(Command::Splitting),
        Just(Command::Validate),
        Just(Command::Reproduce),
    ]
}

fn arb_sweep() -> impl Strategy<Value = Option<Sweep>> {
    let param = prop_oneof![Just(SweepParam::Delta), Just(SweepParam::G1), Just(SweepParam::Epsilon)];
    proptest::option::of((param, 0.0..1.0f64, 0.0..1.0f64, 0.001..0.5f64).prop_map(|(p, a, len, step)| {
        Sweep::new(p, a, a + len, step).unwrap()
    }))
}

prop_compose! {
    fn arb_config()(
        command in arb_command(),
        delta in 0.0..2.0f64,
        g1 in -1.5..1.5f64,
        g2 in 0.0..0.45f64,
        epsilon in -1.0..1.0f64,
        sweep in arb_sweep(),
        n_tr in 4usize..200,
        methods in proptest::sample::subsequence(vec![Method::Fock, Method::Bogoliubov, Method::Adiabatic, Method::Rwa], 0..=4),
        out in proptest::option::of("[a-z0-9_/.]{1,20}"),
        json in any::<bool>(),
        jobs in proptest::option::of(1usize..64),
        preset in proptest::option::of(prop_oneof![
            Just(Preset::Fig1), Just(Preset::Fig2), Just(Preset::Fig3),
            Just(Preset::Fig4), Just(Preset::Fig5), Just(Preset::Fig6),
        ]),
        levels in 1usize..100,
        t_max in 0.0..1000.0f64,
        dt in 1e-4..1.0f64,
        m_max in 1usize..200,
        inject_fault in any::<bool>(),
    ) -> RunConfig {
        let mut c = RunConfig::new(command);
        c.params = ModelParams::with_bias(delta, g1, g2, epsilon).unwrap();
        c.sweep = sweep;
        c.n_tr = n_tr;
        c.methods = methods;
        c.out = out.map(Into::into);
        c.format = if json { Format::Json } else { Format::Csv };
        c.jobs = jobs;
        c.preset = preset;
        c.levels = levels;
        c.t_max = t_max;
        c.dt = dt;
        c.m_max = m_max;
        c.inject_fault = inject_fault;
        c
    }
}

proptest! {
    #[test]
    fn config_round_trips(cfg in arb_config()) {
        let text = cfg.to_config_string();
        prop_assert_eq!(RunConfig::from_config_str(&text).unwrap(), cfg);
    }
}
