//! The full verification matrix behind the `check-all` verb. Each check
//! returns a pass/fail outcome with a detail string; the same functions
//! back the acceptance test suite so the CLI and the tests cannot drift
//! apart. Everything here is deterministic: repeated runs produce
//! byte-identical detail strings and output files.

use std::fmt::Write as _;

use madelung_core::diagnostics::{
    conserved_quantities, quantum_potential, stress_force, stress_tensor, uncertainty_report,
    uncertainty_report_psi, StressForm,
};
use madelung_core::kinetics::{
    bgk_collide, cell_of, estimate_moments, identity_check, sample_ensemble, scale_moments_by_mass,
};
use madelung_core::schrodinger::{ground_state, step_split, variational_residual, Potential};
use madelung_core::transform::hydro_from_psi;
use madelung_core::{Boundary, Grid, PhysicalParams, WaveField};

use crate::config::{KineticsConfig, Scenario, ScenarioConfig, Solver};
use crate::report::{render_report, render_timeseries_csv};
use crate::run::{compare_solvers, evolve, run_scenario, RunReport, COMPARISON_FLOOR};
use crate::scenario::{gaussian, prepare};

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:2} — {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.details
        )
    }
}

fn outcome(id: usize, name: &'static str, passed: bool, details: String) -> CheckOutcome {
    CheckOutcome { id, name, passed, details }
}

/// Run the whole matrix in order. The reports of the evolved scenarios are
/// shared with the inequality sweep (criterion 5).
pub fn run_all() -> Vec<CheckOutcome> {
    let mut evolved: Vec<(String, RunReport)> = Vec::new();
    let mut out = Vec::new();
    out.push(solver_equivalence(&mut evolved));
    out.push(conservation(&mut evolved));
    out.push(stress_closure());
    out.push(energy_partition());
    out.push(vortex_quantization(&mut evolved));
    out.push(uncertainty_chain(&evolved));
    out.push(operator_identity());
    out.push(kinetics_checks());
    out.push(variational_principle());
    out.push(n_invariance());
    out.push(determinism());
    out.sort_by_key(|c| c.id);
    out
}

fn free_gaussian_cfg(solver: Solver, dt: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.solver = solver;
    cfg.dt = dt;
    cfg.record_stride = 1000;
    cfg
}

/// Criterion 1: the hydrodynamic and Ω evolutions reproduce the
/// wavefunction evolution, and the comparison converges at second order or
/// better under dt refinement.
fn solver_equivalence(evolved: &mut Vec<(String, RunReport)>) -> CheckOutcome {
    let mut details = String::new();
    let mut pass = true;

    let cfg = free_gaussian_cfg(Solver::Madelung, 1e-4);
    let mad = match compare_solvers(&cfg, Solver::SchrodingerSplit, &[1e-4, 5e-5]) {
        Ok(r) => r,
        Err(e) => return outcome(1, "solver equivalence", false, e.to_string()),
    };
    let cfg_om = free_gaussian_cfg(Solver::Omega, 1e-4);
    let om = match compare_solvers(&cfg_om, Solver::SchrodingerSplit, &[1e-4, 5e-5]) {
        Ok(r) => r,
        Err(e) => return outcome(1, "solver equivalence", false, e.to_string()),
    };
    let d_mad = mad.rows[0].l2_rho_final;
    let d_om = om.rows[0].l2_rho_final;
    pass &= d_mad < 1e-4 && d_om < 1e-4;
    let _ = write!(details, "L2(rho) madelung vs split = {d_mad:.3e}, omega vs split = {d_om:.3e}");

    // order under dt halving, with the round-off floor rule
    for (rec, tag) in [(&mad, "madelung"), (&om, "omega")] {
        match rec.observed_orders.first().copied().flatten() {
            Some(order) => {
                pass &= order >= 1.9;
                let _ = write!(details, "; {tag} order {order:.2}");
            }
            None => {
                let both_under = rec.rows.iter().all(|r| r.l2_rho_final < COMPARISON_FLOOR);
                pass &= both_under;
                let _ = write!(details, "; {tag} at numerical floor (< {COMPARISON_FLOOR:.0e})");
            }
        }
    }

    // a measurable second-order signal: split-step self-refinement against
    // its own fine-dt run in a potential (Strang error dominates there)
    let mut cfg = ScenarioConfig::defaults(Scenario::HarmonicCoherent);
    cfg.solver = Solver::SchrodingerSplit;
    cfg.record_stride = 1_000_000;
    let prep = match prepare(&cfg) {
        Ok(p) => p,
        Err(e) => return outcome(1, "solver equivalence", false, e.to_string()),
    };
    let t_end = 0.5;
    let run = |dt: f64| {
        let steps = (t_end / dt).round() as usize;
        evolve(&prep, Solver::SchrodingerSplit, dt, steps, steps).map(|t| {
            t.last().unwrap().hydro.rho.clone()
        })
    };
    let fine = match run(5e-5) {
        Ok(r) => r,
        Err(e) => return outcome(1, "solver equivalence", false, e.to_string()),
    };
    let err = |dt: f64| run(dt).map(|r| r.zip_map(&fine, |a, b| a - b).l2_norm());
    match (err(2e-3), err(1e-3)) {
        (Ok(e1), Ok(e2)) => {
            let order = (e1 / e2).log2();
            pass &= order >= 1.9;
            let _ = write!(details, "; split self-refinement order {order:.2}");
        }
        _ => pass = false,
    }

    // keep the evolved runs for the inequality sweep
    if let Ok(rep) = run_scenario(&free_gaussian_cfg(Solver::Madelung, 1e-4)) {
        evolved.push(("free_gaussian/madelung".into(), rep));
    }
    if let Ok(rep) = run_scenario(&free_gaussian_cfg(Solver::SchrodingerSplit, 1e-4)) {
        evolved.push(("free_gaussian/split".into(), rep));
    }
    outcome(1, "solver equivalence", pass, details)
}

/// Criterion 2: particle number, energy, momentum conservation.
fn conservation(evolved: &mut Vec<(String, RunReport)>) -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(512, 12.0, Boundary::Periodic).unwrap();
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    // displaced packet in the trap, split-step over t = 1
    let mut psi = gaussian(&grid, (0.5f64).sqrt(), 0.5);
    let h0 = hydro_from_psi(&psi, &p);
    let e0 = conserved_quantities(&h0, &v, &p);
    let n0 = psi.check_normalization();
    let dt = 5e-4;
    for _ in 0..2000 {
        psi = match step_split(&psi, &v, &p, dt) {
            Ok(s) => s,
            Err(e) => return outcome(2, "conservation laws", false, e.to_string()),
        };
    }
    let h1 = hydro_from_psi(&psi, &p);
    let e1 = conserved_quantities(&h1, &v, &p);
    let dn = (psi.check_normalization() - n0).abs() / n0;
    let dh = (e1.h_total - e0.h_total).abs() / e0.h_total.abs();

    // free boosted packet: total momentum
    let gridf = Grid::line(512, 16.0, Boundary::Periodic).unwrap();
    let vfree = Potential::free().values(&gridf, &p);
    let mut psif = {
        let base = gaussian(&gridf, 1.0, 0.0);
        let mut f = base.field.clone();
        for (i, c) in f.data_mut().iter_mut().enumerate() {
            let x = gridf.coord(0, i);
            *c *= madelung_core::C64::from_polar(1.0, 0.7 * x);
        }
        WaveField::new(f, 1.0)
    };
    let p0 = conserved_quantities(&hydro_from_psi(&psif, &p), &vfree, &p).p_total[0];
    for _ in 0..1000 {
        psif = match step_split(&psif, &vfree, &p, 1e-3) {
            Ok(s) => s,
            Err(e) => return outcome(2, "conservation laws", false, e.to_string()),
        };
    }
    let p1 = conserved_quantities(&hydro_from_psi(&psif, &p), &vfree, &p).p_total[0];
    let dp = (p1 - p0).abs();

    let pass = dn < 1e-10 && dh < 1e-6 && dp < 1e-6;
    // keep the harmonic run's snapshots for the inequality sweep
    let mut cfg = ScenarioConfig::defaults(Scenario::HarmonicCoherent);
    cfg.solver = Solver::SchrodingerSplit;
    cfg.t_end = 1.0;
    cfg.dt = 5e-4;
    cfg.record_stride = 500;
    if let Ok(rep) = run_scenario(&cfg) {
        evolved.push(("harmonic_coherent/split".into(), rep));
    }
    outcome(
        2,
        "conservation laws",
        pass,
        format!("|dN|/N = {dn:.3e}, |dH|/H = {dh:.3e}, |dP| = {dp:.3e}"),
    )
}

/// Criterion 3: quantum potential, internal energy, and the two stress
/// closures generating one conservative force.
fn stress_closure() -> CheckOutcome {
    let p = PhysicalParams::natural();
    let mut pass = true;
    let mut details = String::new();

    // pointwise values on a grid holding x = 0, 1, 2 as nodes
    let grid = Grid::line(1024, 16.0, Boundary::Periodic).unwrap();
    let h = hydro_from_psi(&gaussian(&grid, 1.0, 0.0), &p);
    let node = |x: f64| ((x - grid.coord(0, 0)) / grid.spacing(0)).round() as usize;
    let w = quantum_potential(&h, &p);
    let k = stress_tensor(&h, &p, StressForm::LogDensityHessian);
    let w0 = w.data()[node(0.0)];
    let eps = k.epsilon.data()[node(0.0)];
    pass &= (w0 - 0.25).abs() < 1e-6 && (eps - 0.125).abs() < 1e-6;
    let _ = write!(details, "W(0) = {w0:.8}, eps = {eps:.8}");

    // force identity at 1024 nodes for both forms
    let gridf = Grid::line(1024, 10.0, Boundary::Periodic).unwrap();
    let hf = hydro_from_psi(&gaussian(&gridf, 1.0, 0.0), &p);
    for form in [StressForm::LogDensityHessian, StressForm::DensityLaplacian] {
        let s = stress_tensor(&hf, &p, form);
        let f = stress_force(&s, &hf);
        let gap = f.force[0].zip_map(&f.neg_grad_w[0], |a, b| a - b).linf_norm();
        pass &= gap < 1e-4;
        let tag = match form {
            StressForm::LogDensityHessian => "hessian",
            StressForm::DensityLaplacian => "laplacian",
        };
        let _ = write!(details, "; force gap {tag} = {gap:.3e}");
    }

    // the closures differ pointwise from 2-D up (in 1-D they coincide
    // identically); the two forms are told apart at (1, 0)
    let grid2 = Grid::square(128, 8.0, Boundary::Periodic).unwrap();
    let psi2 = two_dim_gaussian(&grid2);
    let h2 = hydro_from_psi(&psi2, &p);
    let k2 = stress_tensor(&h2, &p, StressForm::LogDensityHessian);
    let t2 = stress_tensor(&h2, &p, StressForm::DensityLaplacian);
    let at = grid2.index(node2(&grid2, 1.0), node2(&grid2, 0.0));
    let diff = (k2.sigma[0].data()[at] - t2.sigma[0].data()[at]).abs();
    pass &= diff > 1e-3;
    let _ = write!(details, "; |Sigma_hess - Sigma_lap|(1,0) = {diff:.4}");
    for form in [StressForm::LogDensityHessian, StressForm::DensityLaplacian] {
        let s = stress_tensor(&h2, &p, form);
        let f = stress_force(&s, &h2);
        for ax in 0..2 {
            pass &= f.force[ax].zip_map(&f.neg_grad_w[ax], |a, b| a - b).linf_norm() < 1e-4;
        }
    }
    outcome(3, "stress closure and quantum potential", pass, details)
}

fn two_dim_gaussian(grid: &Grid) -> WaveField {
    let (l0, l1) = (grid.length(0), grid.length(1));
    let mut rho = madelung_core::ScalarField::from_fn(grid.clone(), |x, y| {
        let mut v = 0.0;
        for sx in [-1.0, 0.0, 1.0] {
            for sy in [-1.0, 0.0, 1.0] {
                let dx = x - sx * l0;
                let dy = y - sy * l1;
                v += (-(dx * dx + dy * dy) / 2.0).exp();
            }
        }
        v
    });
    let norm = rho.integrate();
    for v in rho.data_mut() {
        *v /= norm;
    }
    let vals: Vec<madelung_core::C64> =
        rho.data().iter().map(|r| madelung_core::C64::new(r.sqrt(), 0.0)).collect();
    WaveField::new(madelung_core::ComplexField::new(grid.clone(), vals), 1.0)
}

fn node2(grid: &Grid, x: f64) -> usize {
    ((x - grid.coord(0, 0)) / grid.spacing(0)).round() as usize
}

/// Criterion 4: the classical/internal energy split of the trap ground
/// state, and agreement of the field-level and wavefunction-level totals.
fn energy_partition() -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(512, 12.0, Boundary::Periodic).unwrap();
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    // the analytic eigenstate carries the exact partition; the
    // imaginary-time-prepared state (the split operator's own eigenstate,
    // width-shifted at O(dt²)) must still land on the same total energy
    let psi = gaussian(&grid, (0.5f64).sqrt(), 0.0);
    let rep = conserved_quantities(&hydro_from_psi(&psi, &p), &v, &p);
    let prepared = match ground_state(&grid, &v, &p, 1.0, 1e-3, 1e-10, 200_000) {
        Ok(s) => s,
        Err(e) => return outcome(4, "energy partition", false, e.to_string()),
    };
    let rep_prep = conserved_quantities(&hydro_from_psi(&prepared, &p), &v, &p);
    let pass = (rep.h_total - 0.5).abs() < 1e-6
        && (rep.h_internal - 0.25).abs() < 1e-6
        && (rep.potential_part - 0.25).abs() < 1e-6
        && (rep.h_total - rep.h_from_psi).abs() <= 1e-8 * rep.h_total.abs()
        && (rep_prep.h_total - 0.5).abs() < 1e-6;
    outcome(
        4,
        "energy partition",
        pass,
        format!(
            "H = {:.9}, internal = {:.9}, potential = {:.9}, |H - H_psi| = {:.3e}, prepared H = {:.9}",
            rep.h_total,
            rep.h_internal,
            rep.potential_part,
            (rep.h_total - rep.h_from_psi).abs(),
            rep_prep.h_total
        ),
    )
}

/// Criterion 5: the uncertainty chain — exact equality case, exact
/// momentum decomposition, and the inequalities at every recorded snapshot
/// of every evolved scenario.
fn uncertainty_chain(evolved: &[(String, RunReport)]) -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(512, 16.0, Boundary::Periodic).unwrap();
    let mut pass = true;
    let mut details = String::new();

    let rep = uncertainty_report_psi(&gaussian(&grid, 1.0, 0.0), &p);
    pass &= (rep.product - 0.5).abs() < 1e-6;
    pass &= rep.decomposition_residual < 1e-8;
    let _ = write!(
        details,
        "dx*dp = {:.9} (bound {}), decomposition residual {:.2e}",
        rep.product, rep.bound, rep.decomposition_residual
    );

    // decomposition on the rest of the reference states
    let states: Vec<WaveField> = vec![
        crate::scenario::plane_wave(&Grid::line(256, 2.0 * std::f64::consts::PI, Boundary::Periodic).unwrap(), 2.0),
        gaussian(&Grid::line(512, 10.0, Boundary::Periodic).unwrap(), (0.5f64).sqrt(), 0.0),
        crate::scenario::vortex(&Grid::square(128, 12.0, Boundary::Periodic).unwrap(), 1, 1.0),
    ];
    for s in &states {
        let r = uncertainty_report_psi(s, &p);
        pass &= r.decomposition_residual < 1e-8;
    }

    // every snapshot of every evolved scenario honours the inequalities
    let mut snaps = 0usize;
    for (name, rep) in evolved {
        for s in &rep.snapshots {
            snaps += 1;
            if !s.bounds_pass {
                pass = false;
                let _ = write!(details, "; FAILED at {name} t = {}", s.t);
            }
        }
    }
    let _ = write!(details, "; {snaps} evolved snapshots checked");
    outcome(5, "uncertainty chain", pass, details)
}

/// Criterion 6: the moment, operator, and Monte-Carlo routes to ⟨v^l⟩.
fn operator_identity() -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(512, 16.0, Boundary::Periodic).unwrap();
    let mut pass = true;
    let mut details = String::new();
    let boosted = {
        let base = gaussian(&grid, 1.0, 0.0);
        let mut f = base.field.clone();
        for (i, c) in f.data_mut().iter_mut().enumerate() {
            *c *= madelung_core::C64::from_polar(1.0, 0.7 * grid.coord(0, i));
        }
        WaveField::new(f, 1.0)
    };
    let pw_grid = Grid::line(256, 2.0 * std::f64::consts::PI, Boundary::Periodic).unwrap();
    let cases: Vec<(&str, WaveField)> = vec![
        ("gaussian", gaussian(&grid, 1.0, 0.0)),
        ("boosted", boosted),
        ("plane_wave", crate::scenario::plane_wave(&pw_grid, 2.0)),
    ];
    for (name, psi) in &cases {
        let h = hydro_from_psi(psi, &p);
        for l in [1usize, 2] {
            let c = match identity_check(&h, &p, l, 100_000, 2024) {
                Ok(c) => c,
                Err(e) => return outcome(6, "operator identity", false, e.to_string()),
            };
            let scale = c.operator_side.abs().max(1.0);
            let rel = (c.moment_side - c.operator_side).abs() / scale;
            let mc_ok = (c.mc_side - c.operator_side).abs() <= 3.0 * c.mc_stderr + 1e-12;
            pass &= rel <= 1e-8 && mc_ok;
            if *name == "gaussian" && l == 2 {
                let _ = write!(
                    details,
                    "l=2 gaussian: moment {:.10}, operator {:.10}, mc {:.4} ± {:.4}",
                    c.moment_side, c.operator_side, c.mc_side, c.mc_stderr
                );
            }
        }
    }
    outcome(6, "operator identity", pass, details)
}

/// Criterion 7: 2-D vortex circulation is quantized and preserved.
fn vortex_quantization(evolved: &mut Vec<(String, RunReport)>) -> CheckOutcome {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut pass = true;
    let mut details = String::new();
    for j in [0i64, 1, 2] {
        let mut cfg = ScenarioConfig::defaults(Scenario::Vortex2d);
        cfg.winding = j;
        let rep = match run_scenario(&cfg) {
            Ok(r) => r,
            Err(e) => return outcome(7, "circulation quantization", false, e.to_string()),
        };
        let expect = j as f64 * two_pi;
        for s in &rep.snapshots {
            let (gamma, _) = s.circulation.unwrap_or((f64::NAN, f64::NAN));
            if (gamma - expect).abs() >= 1e-6 {
                pass = false;
                let _ = write!(details, "; j={j} drifted to {gamma} at t = {}", s.t);
            }
        }
        if let Some(last) = rep.snapshots.last() {
            let (gamma, jest) = last.circulation.unwrap_or((f64::NAN, f64::NAN));
            let _ = write!(
                details,
                "{}j={j}: gamma(T) = {gamma:.9} (want {expect:.9}), j_est = {jest:.9}",
                if details.is_empty() { "" } else { "; " }
            );
        }
        if j == 1 {
            evolved.push(("vortex_2d/split".into(), rep));
        }
    }
    outcome(7, "circulation quantization", pass, details)
}

/// Criterion 8: BGK invariants per cell, sampled moments inside their
/// Monte-Carlo bands, and the count^(-1/2) error rate.
fn kinetics_checks() -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(512, 16.0, Boundary::Periodic).unwrap();
    let h = hydro_from_psi(&gaussian(&grid, 1.0, 0.0), &p);
    let mut pass = true;
    let mut details = String::new();

    let ens = match sample_ensemble(&h, &p, 100_000, 31337) {
        Ok(e) => e,
        Err(e) => return outcome(8, "kinetics", false, e.to_string()),
    };
    let collided = match bgk_collide(&ens, &grid, 0.05, 0.1) {
        Ok(c) => c,
        Err(e) => return outcome(8, "kinetics", false, e.to_string()),
    };
    // per-cell invariants
    let mut cells: std::collections::BTreeMap<usize, Vec<usize>> = std::collections::BTreeMap::new();
    for (i, pos) in ens.positions.iter().enumerate() {
        cells.entry(cell_of(&grid, *pos)).or_default().push(i);
    }
    let mut worst_mom = 0.0f64;
    let mut worst_en = 0.0f64;
    for members in cells.values() {
        let (mut p0, mut e0, mut p1, mut e1) = (0.0, 0.0, 0.0, 0.0);
        for &i in members {
            p0 += ens.velocities[i][0];
            e0 += ens.velocities[i][0] * ens.velocities[i][0];
            p1 += collided.velocities[i][0];
            e1 += collided.velocities[i][0] * collided.velocities[i][0];
        }
        let scale_p = p0.abs().max(1.0);
        let scale_e = e0.abs().max(1e-30);
        worst_mom = worst_mom.max((p1 - p0).abs() / scale_p);
        worst_en = worst_en.max((e1 - e0).abs() / scale_e);
    }
    pass &= worst_mom <= 1e-12 && worst_en <= 1e-12;
    let _ = write!(details, "per-cell drift: momentum {worst_mom:.2e}, energy {worst_en:.2e}");

    // sampled moments inside 3σ bands
    let m = scale_moments_by_mass(estimate_moments(&ens, &grid, 32).unwrap(), &p);
    let mut worst_z = 0.0f64;
    for b in 0..32 {
        if m.count[b] < 1000 {
            continue;
        }
        let z = (m.eps_hat[b] - 0.125).abs() / m.eps_stderr[b].max(f64::MIN_POSITIVE);
        worst_z = worst_z.max(z);
        let x = 0.5 * (m.edges[b] + m.edges[b + 1]);
        let rho = (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let zr = (m.rho_hat[b] - rho).abs() / m.rho_stderr[b].max(f64::MIN_POSITIVE);
        worst_z = worst_z.max(zr);
        let zu = m.u_hat[b].abs() / m.u_stderr[b].max(f64::MIN_POSITIVE);
        worst_z = worst_z.max(zu);
    }
    pass &= worst_z <= 3.0;
    let _ = write!(details, "; worst moment z-score {worst_z:.2}");

    // L2 density error halves (±30%) when the count quadruples
    let err_of = |count: usize, seed: u64| {
        let e = sample_ensemble(&h, &p, count, seed).unwrap();
        let mm = estimate_moments(&e, &grid, 32).unwrap();
        let mut acc = 0.0;
        for b in 0..32 {
            let x = 0.5 * (mm.edges[b] + mm.edges[b + 1]);
            let rho = (-(x * x) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let d = mm.rho_hat[b] - rho;
            acc += d * d;
        }
        acc.sqrt()
    };
    let e_small: f64 = (0..4).map(|s| err_of(25_000, 7000 + s)).sum::<f64>() / 4.0;
    let e_big: f64 = (0..4).map(|s| err_of(100_000, 7100 + s)).sum::<f64>() / 4.0;
    let ratio = e_big / e_small;
    pass &= (0.35..=0.65).contains(&ratio);
    let _ = write!(details, "; quadrupled-count error ratio {ratio:.3}");
    outcome(8, "kinetics", pass, details)
}

/// Criterion 9: the discrete variational identity.
fn variational_principle() -> CheckOutcome {
    let p = PhysicalParams::natural();
    let grid = Grid::line(256, 12.0, Boundary::Periodic).unwrap();
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    let psi = match ground_state(&grid, &v, &p, 1.0, 1e-3, 1e-10, 200_000) {
        Ok(s) => s,
        Err(e) => return outcome(9, "variational principle", false, e.to_string()),
    };
    let rep = match variational_residual(&psi, &v, &p, 1e-3) {
        Ok(r) => r,
        Err(e) => return outcome(9, "variational principle", false, e.to_string()),
    };
    let pass = rep.residual < 1e-6 && rep.gradient_mismatch < 1e-6;
    outcome(
        9,
        "variational principle",
        pass,
        format!(
            "eigenstate residual {:.3e}, functional-gradient mismatch {:.3e}",
            rep.residual, rep.gradient_mismatch
        ),
    )
}

/// Criterion 10: diagnostics are invariant under the monad count at fixed
/// (ħ, m).
fn n_invariance() -> CheckOutcome {
    let grid = Grid::line(512, 16.0, Boundary::Periodic).unwrap();
    let psi = gaussian(&grid, 1.0, 0.0);
    let boosted = {
        let mut f = psi.field.clone();
        for (i, c) in f.data_mut().iter_mut().enumerate() {
            *c *= madelung_core::C64::from_polar(1.0, 0.3 * grid.coord(0, i));
        }
        WaveField::new(f, 1.0)
    };
    let v = Potential::free().values(&grid, &PhysicalParams::natural());
    let mut worst = 0.0f64;
    for state in [&psi, &boosted] {
        let mut base = None;
        for n in [1.0, 10.0, 1000.0] {
            let p = PhysicalParams::new(1.0, 1.0, n).unwrap();
            let h = hydro_from_psi(state, &p);
            let e = conserved_quantities(&h, &v, &p);
            let u = uncertainty_report(&h, &p);
            let fields = [
                e.h_total,
                e.h_classical,
                e.h_internal,
                e.p_total[0],
                e.n_total,
                u.delta_x,
                u.delta_p,
                u.delta_p_cl,
                u.internal_energy,
                u.product,
            ];
            match &base {
                None => base = Some(fields),
                Some(b) => {
                    for (a, bb) in fields.iter().zip(b.iter()) {
                        worst = worst.max((a - bb).abs() / bb.abs().max(1.0));
                    }
                }
            }
        }
    }
    outcome(
        10,
        "N-invariance",
        worst <= 1e-12,
        format!("largest relative deviation over N in {{1, 10, 1000}}: {worst:.2e}"),
    )
}

/// Criterion 11: repeated runs with fixed seeds produce byte-identical
/// outputs (kinetics included).
fn determinism() -> CheckOutcome {
    let mut cfg = ScenarioConfig::defaults(Scenario::FreeGaussian);
    cfg.t_end = 0.05;
    cfg.record_stride = 100;
    cfg.kinetics = Some(KineticsConfig { count: 20_000, seed: 99, tau: 0.5, bins: 25 });
    let render = || -> Result<(String, String), String> {
        let rep = run_scenario(&cfg).map_err(|e| e.to_string())?;
        Ok((render_report(&rep), render_timeseries_csv(&rep, cfg.dim)))
    };
    match (render(), render()) {
        (Ok((r1, c1)), Ok((r2, c2))) => {
            let pass = r1 == r2 && c1 == c2;
            outcome(
                11,
                "determinism",
                pass,
                format!(
                    "report bytes {} and {}, timeseries bytes {} and {}: {}",
                    r1.len(),
                    r2.len(),
                    c1.len(),
                    c2.len(),
                    if pass { "identical" } else { "DIFFER" }
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => outcome(11, "determinism", false, e),
    }
}

/// Parse-and-run entry for the `check-all` verb: returns the outcomes plus
/// a deterministic summary text.
pub fn summary(outcomes: &[CheckOutcome]) -> String {
    let mut s = String::new();
    for c in outcomes {
        let _ = writeln!(s, "{}", c.line());
    }
    let failed = outcomes.iter().filter(|c| !c.passed).count();
    let _ = writeln!(
        s,
        "{} of {} checks passed",
        outcomes.len() - failed,
        outcomes.len()
    );
    s
}
