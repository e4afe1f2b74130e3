//! Report and CSV emission. The structured report mirrors [`RunReport`]
//! with machine-readable keys and parses back to identical values (floats
//! are printed with Rust's shortest round-trip formatting). CSV columns
//! carry 12 significant digits so 1e-8-level assertions stay testable from
//! the files. Wall-clock time is deliberately left out of every file:
//! repeated runs of the same config must be byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use madelung_core::diagnostics::{quantum_potential, stress_tensor, StressForm};
use madelung_core::{Grid, HydroState, PhysicalParams};

use crate::run::{ComparisonRecord, RunReport};

#[derive(Debug)]
pub struct IoError {
    pub path: PathBuf,
    pub source: io::Error,
}

impl std::fmt::Display for IoError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.source)
    }
}

impl std::error::Error for IoError {}

fn write_file(path: &Path, contents: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| IoError { path: dir.to_path_buf(), source: e })?;
    }
    fs::write(path, contents).map_err(|e| IoError { path: path.to_path_buf(), source: e })
}

/// Render the structured report text.
pub fn render_report(report: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[meta]");
    let _ = writeln!(s, "version = {}", report.version);
    let _ = writeln!(s, "snapshots = {}", report.snapshots.len());
    let _ = writeln!(s, "norm_drift = {}", report.norm_drift);
    let _ = writeln!(s, "all_pass = {}", report.all_pass);
    let _ = writeln!(s);
    let _ = writeln!(s, "[config]");
    for line in report.config_echo.lines() {
        let _ = writeln!(s, "  {line}");
    }
    for (i, snap) in report.snapshots.iter().enumerate() {
        let _ = writeln!(s);
        let _ = writeln!(s, "[snapshot {i}]");
        let _ = writeln!(s, "step = {}", snap.step);
        let _ = writeln!(s, "t = {}", snap.t);
        let _ = writeln!(s, "norm = {}", snap.norm);
        let e = &snap.energy;
        let _ = writeln!(s, "h_total = {}", e.h_total);
        let _ = writeln!(s, "h_classical = {}", e.h_classical);
        let _ = writeln!(s, "h_internal = {}", e.h_internal);
        let _ = writeln!(s, "potential_part = {}", e.potential_part);
        let _ = writeln!(s, "kinetic_classical_part = {}", e.kinetic_classical_part);
        let _ = writeln!(s, "p_x = {}", e.p_total[0]);
        let _ = writeln!(s, "p_y = {}", e.p_total[1]);
        let _ = writeln!(s, "n_total = {}", e.n_total);
        let _ = writeln!(s, "h_from_psi = {}", e.h_from_psi);
        let _ = writeln!(s, "internal_from_xi = {}", e.internal_from_xi);
        let u = &snap.uncertainty;
        let _ = writeln!(s, "delta_x = {}", u.delta_x);
        let _ = writeln!(s, "delta_p = {}", u.delta_p);
        let _ = writeln!(s, "delta_p_cl = {}", u.delta_p_cl);
        let _ = writeln!(s, "internal_energy = {}", u.internal_energy);
        let _ = writeln!(s, "product = {}", u.product);
        let _ = writeln!(s, "bound = {}", u.bound);
        let _ = writeln!(s, "boundary_deficit = {}", u.boundary_deficit);
        let _ = writeln!(s, "decomposition_residual = {}", u.decomposition_residual);
        let _ = writeln!(s, "slack_position_internal = {}", u.slack_position_internal);
        let _ = writeln!(s, "slack_momentum_internal = {}", u.slack_momentum_internal);
        let _ = writeln!(s, "slack_product = {}", u.slack_product);
        if let Some((gamma, j)) = snap.circulation {
            let _ = writeln!(s, "circulation_gamma = {gamma}");
            let _ = writeln!(s, "circulation_j = {j}");
        }
        let _ = writeln!(s, "renorm = {}", snap.renorm);
        let _ = writeln!(s, "bounds_applicable = {}", snap.bounds_applicable);
        let _ = writeln!(s, "bounds_pass = {}", snap.bounds_pass);
    }
    if let Some(k) = &report.kinetics {
        let _ = writeln!(s);
        let _ = writeln!(s, "[kinetics]");
        let _ = writeln!(s, "count = {}", k.count);
        let _ = writeln!(s, "seed = {}", k.seed);
        let _ = writeln!(s, "chi2 = {}", k.chi2);
        let _ = writeln!(s, "chi2_p = {}", k.chi2_p);
        let _ = writeln!(s, "ks_p = {}", k.ks_p);
        let _ = writeln!(s, "bgk_momentum_drift = {}", k.bgk_momentum_drift);
        let _ = writeln!(s, "bgk_energy_drift = {}", k.bgk_energy_drift);
        let _ = writeln!(s, "identity_l1_moment = {}", k.identity_l1[0]);
        let _ = writeln!(s, "identity_l1_operator = {}", k.identity_l1[1]);
        let _ = writeln!(s, "identity_l1_mc = {}", k.identity_l1[2]);
        let _ = writeln!(s, "identity_l1_mc_stderr = {}", k.identity_l1[3]);
        let _ = writeln!(s, "identity_l2_moment = {}", k.identity_l2[0]);
        let _ = writeln!(s, "identity_l2_operator = {}", k.identity_l2[1]);
        let _ = writeln!(s, "identity_l2_mc = {}", k.identity_l2[2]);
        let _ = writeln!(s, "identity_l2_mc_stderr = {}", k.identity_l2[3]);
        let _ = writeln!(s, "moments_max_z = {}", k.moments_max_z);
        let _ = writeln!(s, "pass = {}", k.pass);
    }
    s
}

/// Parse a rendered report back into (section -> key -> value) maps.
/// Round-tripping a report yields identical float values.
pub fn parse_report(text: &str) -> BTreeMap<String, BTreeMap<String, String>> {
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    let mut section = String::new();
    for raw in text.lines() {
        // config-echo lines are indented and skipped by the parser
        if raw.starts_with("  ") {
            continue;
        }
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = name.to_string();
            continue;
        }
        if let Some((k, v)) = line.split_once('=') {
            out.entry(section.clone())
                .or_default()
                .insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    out
}

/// One row per snapshot, 12 significant digits.
pub fn render_timeseries_csv(report: &RunReport, dim: usize) -> String {
    let mut s = String::new();
    if dim == 2 {
        s.push_str("t,N_total,P_x,P_y,H,H_cl,H_int,dx,dp,dp_cl,product,bound_pass\n");
    } else {
        s.push_str("t,N_total,P_x,H,H_cl,H_int,dx,dp,dp_cl,product,bound_pass\n");
    }
    for snap in &report.snapshots {
        let e = &snap.energy;
        let u = &snap.uncertainty;
        let mut row = format!("{:.11e},{:.11e},{:.11e}", snap.t, e.n_total, e.p_total[0]);
        if dim == 2 {
            let _ = write!(row, ",{:.11e}", e.p_total[1]);
        }
        let _ = write!(
            row,
            ",{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{}",
            e.h_total,
            e.h_classical,
            e.h_internal,
            u.delta_x,
            u.delta_p,
            u.delta_p_cl,
            u.product,
            if snap.bounds_pass { 1 } else { 0 }
        );
        s.push_str(&row);
        s.push('\n');
    }
    s
}

/// Per-node field dump of one snapshot.
pub fn render_fields_csv(h: &HydroState, params: &PhysicalParams) -> String {
    let grid: &Grid = h.grid();
    let dim = grid.dim();
    let w = quantum_potential(h, params);
    let stress = stress_tensor(h, params, StressForm::LogDensityHessian);
    let mut s = String::new();
    if dim == 2 {
        s.push_str("x,y,rho,S,s_wrapped,u,uy,W,sigma_xx,sigma_xy,sigma_yy,epsilon\n");
    } else {
        s.push_str("x,rho,S,s_wrapped,u,W,sigma_xx,epsilon\n");
    }
    let wrapped = if h.s_is_wrapped { 1 } else { 0 };
    for i in 0..grid.node_count() {
        let (x, y) = grid.position(i);
        let mut row = format!("{x:.11e}");
        if dim == 2 {
            let _ = write!(row, ",{y:.11e}");
        }
        let _ = write!(
            row,
            ",{:.11e},{:.11e},{wrapped},{:.11e}",
            h.rho.data()[i],
            h.s.data()[i],
            h.u[0].data()[i]
        );
        if dim == 2 {
            let _ = write!(row, ",{:.11e}", h.u[1].data()[i]);
        }
        let _ = write!(row, ",{:.11e},{:.11e}", w.data()[i], stress.sigma[0].data()[i]);
        if dim == 2 {
            let _ = write!(
                row,
                ",{:.11e},{:.11e}",
                stress.sigma[1].data()[i],
                stress.sigma[2].data()[i]
            );
        }
        let _ = write!(row, ",{:.11e}", stress.epsilon.data()[i]);
        s.push_str(&row);
        s.push('\n');
    }
    s
}

/// Monad-ensemble snapshot export: one row per monad.
pub fn render_ensemble_csv(ens: &madelung_core::kinetics::MonadEnsemble) -> String {
    let mut s = String::new();
    if ens.dim == 2 {
        s.push_str("id,x,y,vx,vy\n");
    } else {
        s.push_str("id,x,vx\n");
    }
    for (i, (p, v)) in ens.positions.iter().zip(ens.velocities.iter()).enumerate() {
        if ens.dim == 2 {
            let _ = writeln!(s, "{i},{:.11e},{:.11e},{:.11e},{:.11e}", p[0], p[1], v[0], v[1]);
        } else {
            let _ = writeln!(s, "{i},{:.11e},{:.11e}", p[0], v[0]);
        }
    }
    s
}

pub fn render_comparison(rec: &ComparisonRecord) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[comparison]");
    let _ = writeln!(s, "solver_a = {}", rec.solver_a);
    let _ = writeln!(s, "solver_b = {}", rec.solver_b);
    for (i, row) in rec.rows.iter().enumerate() {
        let _ = writeln!(s, "dt_{i} = {}", row.dt);
        let _ = writeln!(s, "l2_rho_final_{i} = {}", row.l2_rho_final);
        let _ = writeln!(s, "l2_rho_max_{i} = {}", row.l2_rho_max);
        let _ = writeln!(s, "l2_phase_final_{i} = {}", row.l2_phase_final);
    }
    for (i, order) in rec.observed_orders.iter().enumerate() {
        match order {
            Some(o) => {
                let _ = writeln!(s, "observed_order_{i} = {o}");
            }
            None => {
                let _ = writeln!(s, "observed_order_{i} = at_numerical_floor");
            }
        }
    }
    s
}

/// Paths produced by [`emit_outputs`].
pub struct Emitted {
    pub report: PathBuf,
    pub timeseries: Option<PathBuf>,
    pub field_dumps: Vec<PathBuf>,
}

/// Write the report file, the CSV time series, and optional per-snapshot
/// field dumps under `dir`.
pub fn emit_outputs(
    report: &RunReport,
    dir: &Path,
    dim: usize,
    csv: bool,
    field_states: Option<&[(usize, HydroState)]>,
    params: &PhysicalParams,
) -> Result<Emitted, IoError> {
    let report_path = dir.join("report.txt");
    write_file(&report_path, &render_report(report))?;
    let timeseries = if csv {
        let p = dir.join("timeseries.csv");
        write_file(&p, &render_timeseries_csv(report, dim))?;
        Some(p)
    } else {
        None
    };
    let mut field_dumps = Vec::new();
    if let Some(states) = field_states {
        for (step, h) in states {
            let p = dir.join(format!("fields_{step:06}.csv"));
            write_file(&p, &render_fields_csv(h, params))?;
            field_dumps.push(p);
        }
    }
    Ok(Emitted { report: report_path, timeseries, field_dumps })
}
