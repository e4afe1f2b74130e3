//! Command-line front end.
//!
//! Verbs: simulate, compare, kinetics, identities, uncertainty, check-all.
//! Exit codes: 0 all checks pass, 1 a physics check failed,
//! 2 configuration error, 3 numerical blow-up.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use madelung_cli::checkall;
use madelung_cli::config::{parse_config, KineticsConfig, Scenario, ScenarioConfig, Solver};
use madelung_cli::report::{emit_outputs, render_comparison};
use madelung_cli::run::{compare_solvers, run_scenario, RunError};

const USAGE: &str = "\
madelung — one quantum particle as wavefunction, Madelung fluid, and monad ensemble

USAGE:
    madelung <VERB> [FLAGS]

VERBS:
    simulate      evolve one scenario and emit its report
    compare       run two solvers on the same scenario with a dt-refinement table
    kinetics      sampling / BGK / moment checks on a scenario's state
    identities    the moment/operator/Monte-Carlo identity on reference states
    uncertainty   the uncertainty chain on a scenario's evolution
    check-all     the full verification matrix

FLAGS:
    --config PATH      sectioned key=value config file
    --scenario NAME    free_gaussian | harmonic_ground | harmonic_coherent |
                       box_eigenstate | plane_wave | vortex_2d
    --solver NAME      schrodinger_split | schrodinger_cn | madelung | omega
    --solver-b NAME    second solver for `compare` (default schrodinger_split)
    --grid INT         points per axis
    --dt FLOAT         time step
    --t-end FLOAT      final time
    --seed INT         kinetics RNG seed override
    --out DIR          output directory (default from config)
    --csv | --no-csv   toggle the time-series CSV
    --fields           also dump per-snapshot field CSVs

EXIT CODES:
    0 all checks passed    1 physics check failed
    2 configuration error  3 numerical blow-up
";

struct Cli {
    verb: String,
    config: Option<PathBuf>,
    scenario: Option<String>,
    solver: Option<String>,
    solver_b: Option<String>,
    grid: Option<usize>,
    dt: Option<f64>,
    t_end: Option<f64>,
    seed: Option<u64>,
    out: Option<String>,
    csv: Option<bool>,
    fields: bool,
}

fn parse_args(mut args: std::env::Args) -> Result<Cli, String> {
    let _ = args.next();
    let verb = args.next().ok_or_else(|| USAGE.to_string())?;
    let mut cli = Cli {
        verb,
        config: None,
        scenario: None,
        solver: None,
        solver_b: None,
        grid: None,
        dt: None,
        t_end: None,
        seed: None,
        out: None,
        csv: None,
        fields: false,
    };
    while let Some(flag) = args.next() {
        let mut take = |name: &str| -> Result<String, String> {
            args.next().ok_or_else(|| format!("flag {name} needs a value"))
        };
        match flag.as_str() {
            "--config" => cli.config = Some(PathBuf::from(take("--config")?)),
            "--scenario" => cli.scenario = Some(take("--scenario")?),
            "--solver" => cli.solver = Some(take("--solver")?),
            "--solver-b" => cli.solver_b = Some(take("--solver-b")?),
            "--grid" => {
                cli.grid = Some(
                    take("--grid")?.parse().map_err(|_| "--grid expects an integer".to_string())?,
                )
            }
            "--dt" => {
                cli.dt =
                    Some(take("--dt")?.parse().map_err(|_| "--dt expects a number".to_string())?)
            }
            "--t-end" => {
                cli.t_end = Some(
                    take("--t-end")?.parse().map_err(|_| "--t-end expects a number".to_string())?,
                )
            }
            "--seed" => {
                cli.seed = Some(
                    take("--seed")?.parse().map_err(|_| "--seed expects an integer".to_string())?,
                )
            }
            "--out" => cli.out = Some(take("--out")?),
            "--csv" => cli.csv = Some(true),
            "--no-csv" => cli.csv = Some(false),
            "--fields" => cli.fields = true,
            "--help" | "-h" => return Err(USAGE.to_string()),
            other => return Err(format!("unknown flag {other}\n\n{USAGE}")),
        }
    }
    Ok(cli)
}

fn build_config(cli: &Cli) -> Result<ScenarioConfig, String> {
    let mut cfg = match (&cli.config, &cli.scenario) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            parse_config(&text).map_err(|e| e.to_string())?
        }
        (None, Some(name)) => {
            let scenario = Scenario::parse(name)
                .ok_or_else(|| format!("unknown scenario {name:?}"))?;
            ScenarioConfig::defaults(scenario)
        }
        (None, None) => {
            return Err(format!("need --config or --scenario\n\n{USAGE}"));
        }
    };
    if let Some(name) = &cli.solver {
        cfg.solver =
            Solver::parse(name).ok_or_else(|| format!("unknown solver {name:?}"))?;
    }
    if let Some(n) = cli.grid {
        cfg.points = vec![n; cfg.dim];
    }
    if let Some(dt) = cli.dt {
        cfg.dt = dt;
    }
    if let Some(t) = cli.t_end {
        cfg.t_end = t;
    }
    if let Some(seed) = cli.seed {
        match &mut cfg.kinetics {
            Some(k) => k.seed = seed,
            None => {
                cfg.kinetics =
                    Some(KineticsConfig { count: 100_000, seed, tau: 0.5, bins: 50 })
            }
        }
    }
    if let Some(dir) = &cli.out {
        cfg.out_dir = dir.clone();
    }
    if let Some(csv) = cli.csv {
        cfg.csv = csv;
    }
    if cli.fields {
        cfg.fields = true;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn exit_for_run_error(e: &RunError) -> ExitCode {
    match e {
        RunError::Config(_) => ExitCode::from(2),
        RunError::Numerical { .. } => ExitCode::from(3),
    }
}

fn simulate(cfg: &ScenarioConfig) -> ExitCode {
    let field_states = if cfg.fields {
        match madelung_cli::scenario::prepare(cfg) {
            Ok(prep) => {
                let steps = (cfg.t_end / cfg.dt).round() as usize;
                match madelung_cli::run::evolve(&prep, cfg.solver, cfg.dt, steps, cfg.record_stride)
                {
                    Ok(traj) => {
                        Some(traj.into_iter().map(|p| (p.step, p.hydro)).collect::<Vec<_>>())
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        return exit_for_run_error(&e);
                    }
                }
            }
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        }
    } else {
        None
    };
    match run_scenario(cfg) {
        Ok(report) => {
            let params = match cfg.params() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            };
            match emit_outputs(
                &report,
                Path::new(&cfg.out_dir),
                cfg.dim,
                cfg.csv,
                field_states.as_deref(),
                &params,
            ) {
                Ok(emitted) => {
                    println!(
                        "{} snapshots, norm drift {:.3e}, wall {:.2}s -> {}",
                        report.snapshots.len(),
                        report.norm_drift,
                        report.wall_seconds,
                        emitted.report.display()
                    );
                }
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            }
            if report.all_pass {
                println!("all checks passed");
                ExitCode::SUCCESS
            } else {
                println!("PHYSICS CHECK FAILED (see report)");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            exit_for_run_error(&e)
        }
    }
}

fn compare(cli: &Cli, cfg: &ScenarioConfig) -> ExitCode {
    let solver_b = match &cli.solver_b {
        Some(name) => match Solver::parse(name) {
            Some(s) => s,
            None => {
                eprintln!("unknown solver {name:?}");
                return ExitCode::from(2);
            }
        },
        None => Solver::SchrodingerSplit,
    };
    let dts = [cfg.dt, cfg.dt / 2.0, cfg.dt / 4.0];
    match compare_solvers(cfg, solver_b, &dts) {
        Ok(rec) => {
            print!("{}", render_comparison(&rec));
            let worst = rec.rows.iter().map(|r| r.l2_rho_final).fold(0.0f64, f64::max);
            if worst < 1e-4 {
                ExitCode::SUCCESS
            } else {
                println!("solvers disagree beyond 1e-4");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            exit_for_run_error(&e)
        }
    }
}

fn kinetics_verb(cfg: &mut ScenarioConfig, seed: Option<u64>) -> ExitCode {
    if cfg.kinetics.is_none() {
        cfg.kinetics = Some(KineticsConfig {
            count: 100_000,
            seed: seed.unwrap_or(1),
            tau: 0.5,
            bins: 50,
        });
    }
    match run_scenario(cfg) {
        Ok(report) => {
            let Some(k) = &report.kinetics else {
                eprintln!("kinetics checks need a 1-D scenario");
                return ExitCode::from(2);
            };
            println!("chi2 = {:.3} (p = {:.4})", k.chi2, k.chi2_p);
            println!("KS p = {:.4}", k.ks_p);
            println!(
                "BGK drift: momentum {:.2e}, energy {:.2e}",
                k.bgk_momentum_drift, k.bgk_energy_drift
            );
            println!(
                "identity l=1: moment {:.9}, operator {:.9}, mc {:.6} ± {:.6}",
                k.identity_l1[0], k.identity_l1[1], k.identity_l1[2], k.identity_l1[3]
            );
            println!(
                "identity l=2: moment {:.9}, operator {:.9}, mc {:.6} ± {:.6}",
                k.identity_l2[0], k.identity_l2[1], k.identity_l2[2], k.identity_l2[3]
            );
            println!("worst moment z-score {:.2}", k.moments_max_z);
            // export the sampled ensemble of the initial state
            if let (Ok(prep), Some(kin)) =
                (madelung_cli::scenario::prepare(cfg), cfg.kinetics.as_ref())
            {
                use madelung_core::kinetics::sample_ensemble;
                use madelung_core::transform::hydro_from_psi;
                let h0 = hydro_from_psi(&prep.psi0, &prep.params);
                if let Ok(ens) = sample_ensemble(&h0, &prep.params, kin.count, kin.seed) {
                    let path = Path::new(&cfg.out_dir).join("ensemble.csv");
                    if let Some(parent) = path.parent() {
                        let _ = std::fs::create_dir_all(parent);
                    }
                    match std::fs::write(&path, madelung_cli::report::render_ensemble_csv(&ens)) {
                        Ok(()) => println!("ensemble -> {}", path.display()),
                        Err(e) => {
                            eprintln!("{}: {e}", path.display());
                            return ExitCode::from(2);
                        }
                    }
                }
            }
            if k.pass {
                println!("all kinetics checks passed");
                ExitCode::SUCCESS
            } else {
                println!("KINETICS CHECK FAILED");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            exit_for_run_error(&e)
        }
    }
}

fn identities_verb(cfg: &ScenarioConfig) -> ExitCode {
    use madelung_core::kinetics::identity_check;
    use madelung_core::transform::hydro_from_psi;
    let prep = match madelung_cli::scenario::prepare(cfg) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let h = hydro_from_psi(&prep.psi0, &prep.params);
    let seed = cfg.kinetics.as_ref().map(|k| k.seed).unwrap_or(1);
    let count = cfg.kinetics.as_ref().map(|k| k.count).unwrap_or(100_000);
    let mut ok = true;
    for l in [1usize, 2] {
        match identity_check(&h, &prep.params, l, count, seed) {
            Ok(c) => {
                // relative at O(1) scales, absolute 1e-8 for zero-mean results
                let scale = c.operator_side.abs().max(1.0);
                let rel = (c.moment_side - c.operator_side).abs() / scale;
                let mc_ok = (c.mc_side - c.operator_side).abs() <= 3.0 * c.mc_stderr + 1e-12;
                ok &= rel <= 1e-8 && mc_ok;
                println!(
                    "l={l}: moment {:.12}, operator {:.12} (rel diff {rel:.2e}), mc {:.6} ± {:.6}",
                    c.moment_side, c.operator_side, c.mc_side, c.mc_stderr
                );
            }
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        println!("IDENTITY CHECK FAILED");
        ExitCode::from(1)
    }
}

fn uncertainty_verb(cfg: &ScenarioConfig) -> ExitCode {
    match run_scenario(cfg) {
        Ok(report) => {
            println!("t,dx,dp,dp_cl,product,bound,decomposition_residual,pass");
            let mut ok = true;
            for s in &report.snapshots {
                let u = &s.uncertainty;
                ok &= s.bounds_pass;
                println!(
                    "{:.6},{:.9},{:.9},{:.9},{:.9},{:.9},{:.2e},{}",
                    s.t,
                    u.delta_x,
                    u.delta_p,
                    u.delta_p_cl,
                    u.product,
                    u.bound,
                    u.decomposition_residual,
                    if s.bounds_pass { 1 } else { 0 }
                );
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                println!("UNCERTAINTY BOUND FAILED");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            exit_for_run_error(&e)
        }
    }
}

fn check_all(out_dir: Option<&str>) -> ExitCode {
    let outcomes = checkall::run_all();
    let summary = checkall::summary(&outcomes);
    print!("{summary}");
    if let Some(dir) = out_dir {
        let path = Path::new(dir).join("checkall.txt");
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        if let Err(e) = std::fs::write(&path, &summary) {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(2);
        }
        println!("summary -> {}", path.display());
    }
    if outcomes.iter().all(|c| c.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = match parse_args(std::env::args()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    match cli.verb.as_str() {
        "check-all" => check_all(cli.out.as_deref()),
        "simulate" | "compare" | "kinetics" | "identities" | "uncertainty" => {
            let mut cfg = match build_config(&cli) {
                Ok(c) => c,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(2);
                }
            };
            match cli.verb.as_str() {
                "simulate" => simulate(&cfg),
                "compare" => compare(&cli, &cfg),
                "kinetics" => kinetics_verb(&mut cfg, cli.seed),
                "identities" => identities_verb(&cfg),
                "uncertainty" => uncertainty_verb(&cfg),
                _ => unreachable!(),
            }
        }
        other => {
            eprintln!("unknown verb {other:?}\n\n{USAGE}");
            ExitCode::from(2)
        }
    }
}
