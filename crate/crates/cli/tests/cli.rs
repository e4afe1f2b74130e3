//! Interface tests: config parsing and validation through the library,
//! scenario reports and CSV output contracts, file-level determinism, and
//! the binary's exit codes.

use std::process::Command;

use madelung_cli::config::{parse_config, KineticsConfig, Scenario, ScenarioConfig, Solver};
use madelung_cli::report::{
    emit_outputs, parse_report, render_fields_csv, render_report, render_timeseries_csv,
};
use madelung_cli::run::{compare_solvers, run_scenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_madelung"))
}

#[test]
fn free_gaussian_spreads_to_the_closed_form_width() {
    // σ²(t) = σ₀²(1 + (t/2)²) = 2 at t = 2, so Δx = √2; the product stays
    // above ħ/2 and the energy is conserved
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.length = vec![24.0];
    cfg.t_end = 2.0;
    cfg.dt = 1e-3;
    cfg.record_stride = 500;
    let report = run_scenario(&cfg).unwrap();
    let last = report.snapshots.last().unwrap();
    assert!((last.uncertainty.delta_x - (2.0f64).sqrt()).abs() < 1e-3, "Δx = {}", last.uncertainty.delta_x);
    assert!(last.uncertainty.product > 0.5);
    let h0 = report.snapshots[0].energy.h_total;
    for s in &report.snapshots {
        assert!((s.energy.h_total - h0).abs() < 1e-6 * h0.abs());
        assert!(s.bounds_pass);
    }
}

#[test]
fn harmonic_ground_density_is_stationary_over_one_period() {
    let mut cfg = ScenarioConfig::defaults(Scenario::HarmonicGround);
    cfg.solver = Solver::Madelung;
    cfg.record_stride = 50_000;
    // one full period at the defaults
    assert!((cfg.t_end - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    let prep = madelung_cli::scenario::prepare(&cfg).unwrap();
    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let traj =
        madelung_cli::run::evolve(&prep, cfg.solver, cfg.dt, steps, cfg.record_stride).unwrap();
    let rho0 = &traj.first().unwrap().hydro.rho;
    let rho_t = &traj.last().unwrap().hydro.rho;
    let drift = rho0.zip_map(rho_t, |a, b| a - b).linf_norm();
    assert!(drift < 1e-5, "max |rho(T) - rho(0)| = {drift}");
}

#[test]
fn vortex_circulation_is_reported_at_every_snapshot() {
    let mut cfg = ScenarioConfig::defaults(Scenario::Vortex2d);
    cfg.points = vec![128, 128];
    cfg.t_end = 0.05;
    cfg.record_stride = 25;
    let report = run_scenario(&cfg).unwrap();
    let two_pi_over_m = 2.0 * std::f64::consts::PI;
    for s in &report.snapshots {
        let (gamma, j) = s.circulation.expect("2-D runs report circulation");
        assert!((gamma - two_pi_over_m).abs() < 1e-6, "γ = {gamma} at t = {}", s.t);
        assert!((j - 1.0).abs() < 1e-6);
    }
}

#[test]
fn csv_header_and_shape_follow_the_contract() {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.02;
    cfg.record_stride = 100;
    let report = run_scenario(&cfg).unwrap();
    let csv = render_timeseries_csv(&report, cfg.dim);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,N_total,P_x,H,H_cl,H_int,dx,dp,dp_cl,product,bound_pass"
    );
    assert_eq!(lines.count(), report.snapshots.len());

    let mut cfg2 = ScenarioConfig::defaults(Scenario::Vortex2d);
    cfg2.points = vec![64, 64];
    cfg2.t_end = 0.01;
    cfg2.record_stride = 10;
    let report2 = run_scenario(&cfg2).unwrap();
    let csv2 = render_timeseries_csv(&report2, cfg2.dim);
    assert!(csv2.starts_with("t,N_total,P_x,P_y,H,H_cl,H_int,dx,dp,dp_cl,product,bound_pass\n"));
}

#[test]
fn field_dump_matches_the_quantum_potential_column() {
    use madelung_core::diagnostics::quantum_potential;
    use madelung_core::transform::hydro_from_psi;
    let cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    let prep = madelung_cli::scenario::prepare(&cfg).unwrap();
    let h = hydro_from_psi(&prep.psi0, &prep.params);
    let w = quantum_potential(&h, &prep.params);
    let csv = render_fields_csv(&h, &prep.params);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "x,rho,S,s_wrapped,u,W,sigma_xx,epsilon");
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let w_col: f64 = cols[5].parse().unwrap();
        // 12 significant digits in the file
        assert!(
            (w_col - w.data()[i]).abs() <= 1e-10 * w.data()[i].abs().max(1.0),
            "row {i}: {w_col} vs {}",
            w.data()[i]
        );
    }
}

#[test]
fn report_files_round_trip_and_repeat_byte_identically() {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.02;
    cfg.record_stride = 100;
    cfg.kinetics = Some(KineticsConfig { count: 5000, seed: 7, tau: 0.5, bins: 20 });
    let r1 = run_scenario(&cfg).unwrap();
    let r2 = run_scenario(&cfg).unwrap();
    let (t1, t2) = (render_report(&r1), render_report(&r2));
    assert_eq!(t1, t2, "repeated runs must render byte-identically");
    assert_eq!(render_timeseries_csv(&r1, 1), render_timeseries_csv(&r2, 1));

    let parsed = parse_report(&t1);
    let snap = &parsed["snapshot 0"];
    assert_eq!(
        snap["h_total"].parse::<f64>().unwrap(),
        r1.snapshots[0].energy.h_total
    );
    assert_eq!(
        parsed["kinetics"]["chi2"].parse::<f64>().unwrap(),
        r1.kinetics.as_ref().unwrap().chi2
    );
}

#[test]
fn emitted_files_land_in_the_output_directory() {
    let dir = std::env::temp_dir().join(format!("madelung-test-{}", std::process::id()));
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.01;
    let report = run_scenario(&cfg).unwrap();
    let params = cfg.params().unwrap();
    let emitted = emit_outputs(&report, &dir, cfg.dim, true, None, &params).unwrap();
    assert!(emitted.report.exists());
    assert!(emitted.timeseries.as_ref().unwrap().exists());
    let text = std::fs::read_to_string(&emitted.report).unwrap();
    assert!(!text.contains("wall"), "wall time must not reach output files");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn comparison_identical_solvers_vanish_to_round_off() {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.05;
    let rec = compare_solvers(&cfg, Solver::SchrodingerSplit, &[1e-4]).unwrap();
    assert!(rec.rows[0].l2_rho_final < 1e-14);
    assert!(rec.rows[0].l2_phase_final < 1e-12);
}

#[test]
fn config_file_errors_name_the_offender() {
    let err = parse_config("[scenario]\nname = free_gaussian\n[params]\nhbar_bar = 1\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("hbar_bar"));
    let err = parse_config("[scenario]\nname = vortex_2d\nsolver = madelung\n")
        .unwrap_err()
        .to_string();
    assert!(err.contains("vortex"), "{err}");
}

#[test]
fn binary_exit_codes() {
    // 2: configuration error
    let out = bin().args(["simulate", "--scenario", "no_such_scenario"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // 2: bad config file
    let dir = std::env::temp_dir().join(format!("madelung-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.conf");
    std::fs::write(&bad, "[scenario]\nname = free_gaussian\n[params]\nhbar_bar = 1\n").unwrap();
    let out = bin().args(["simulate", "--config", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hbar_bar"));
    // 0: a healthy short run
    let out = bin()
        .args([
            "simulate",
            "--scenario",
            "plane_wave",
            "--t-end",
            "0.01",
            "--out",
            dir.join("ok").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // 3: numerical blow-up is reported as such (an unstable hydrodynamic
    // step would be rejected by the CFL guard as config error instead, so
    // drive a blow-up through a tabulated-potential-free route: take an
    // oversized dt on the madelung solver -> config error 2 by the guard)
    let out = bin()
        .args(["simulate", "--scenario", "free_gaussian", "--solver", "madelung", "--dt", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn binary_emits_byte_identical_outputs_for_fixed_seeds() {
    let dir = std::env::temp_dir().join(format!("madelung-det-{}", std::process::id()));
    let run = || {
        let out = bin()
            .args([
                "simulate",
                "--scenario",
                "free_gaussian",
                "--t-end",
                "0.02",
                "--seed",
                "42",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (
            std::fs::read(dir.join("report.txt")).unwrap(),
            std::fs::read(dir.join("timeseries.csv")).unwrap(),
        )
    };
    let (r1, c1) = run();
    let (r2, c2) = run();
    assert_eq!(r1, r2);
    assert_eq!(c1, c2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn kinetics_verb_exports_the_ensemble_csv() {
    let dir = std::env::temp_dir().join(format!("madelung-kin-{}", std::process::id()));
    let out = bin()
        .args([
            "kinetics",
            "--scenario",
            "free_gaussian",
            "--t-end",
            "0.01",
            "--seed",
            "5",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.join("ensemble.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "id,x,vx");
    assert_eq!(lines.count(), 100_000);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn box_eigenstate_runs_under_crank_nicolson() {
    let cfg = ScenarioConfig::defaults(Scenario::BoxEigenstate);
    let report = run_scenario(&cfg).unwrap();
    // E₁ = π²/2: the phase advance shows up in a stationary density
    let first = &report.snapshots[0];
    let last = report.snapshots.last().unwrap();
    assert!((last.energy.h_total - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-3);
    assert!((last.uncertainty.delta_x - first.uncertainty.delta_x).abs() < 1e-9);
    assert!(report.norm_drift < 1e-8);
}

fn is_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() < tol
}

#[test]
fn n_monads_only_rescales_the_per_monad_constants() {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.01;
    let r1 = run_scenario(&cfg).unwrap();
    cfg.n_monads = 1000.0;
    let r1000 = run_scenario(&cfg).unwrap();
    for (a, b) in r1.snapshots.iter().zip(r1000.snapshots.iter()) {
        assert!(is_close(a.energy.h_total, b.energy.h_total, 1e-12));
        assert!(is_close(a.uncertainty.delta_p, b.uncertainty.delta_p, 1e-12));
    }
}
