//! Reference evolution of the wavefunction: Strang-split spectral stepping
//! on periodic grids, Crank–Nicolson (tridiagonal in 1-D, unitary
//! direction-split in 2-D) on box grids, the discrete energy functional and
//! its variational consistency checks, and imaginary-time preparation of
//! ground states.
//!
//! Everything is in the total convention: `iħ ∂ψ/∂t = -(ħ²/2m)∇²ψ + Vψ`
//! with `V` the full-system potential and ψ normalized to `norm_target`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::deriv::{derivative_complex, fft_axes};
use crate::error::CoreError;
use crate::fft::wavenumber;
use crate::field::{ComplexField, ScalarField, WaveField};
use crate::grid::{Boundary, Grid};
use crate::params::PhysicalParams;
use crate::C64;

/// External potential acting on the whole system (total convention,
/// `V = N·𝒱`). The per-monad potential is `V/N` on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    pub kind: PotentialKind,
    /// Carried so a time-dependent `∂V/∂t` term can be wired in later;
    /// every built-in potential is static.
    pub time_dependent: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    Free,
    Harmonic { omega: f64 },
    /// Zero inside the domain; the box-grid walls do the confining.
    Well,
    Tabulated(ScalarField),
}

impl Potential {
    pub fn free() -> Self {
        Self { kind: PotentialKind::Free, time_dependent: false }
    }

    pub fn harmonic(omega: f64) -> Result<Self, CoreError> {
        if !(omega > 0.0) {
            return Err(CoreError::Config(format!("harmonic omega must be > 0 (got {omega})")));
        }
        Ok(Self { kind: PotentialKind::Harmonic { omega }, time_dependent: false })
    }

    pub fn well() -> Self {
        Self { kind: PotentialKind::Well, time_dependent: false }
    }

    pub fn tabulated(values: ScalarField) -> Result<Self, CoreError> {
        if values.data().iter().any(|v| !v.is_finite()) {
            return Err(CoreError::Config("tabulated potential has non-finite values".into()));
        }
        Ok(Self { kind: PotentialKind::Tabulated(values), time_dependent: false })
    }

    /// Sample V on the grid.
    pub fn values(&self, grid: &Grid, params: &PhysicalParams) -> ScalarField {
        match &self.kind {
            PotentialKind::Free | PotentialKind::Well => ScalarField::zeros(grid.clone()),
            PotentialKind::Harmonic { omega } => {
                let m = params.mass;
                let w2 = omega * omega;
                ScalarField::from_fn(grid.clone(), |x, y| 0.5 * m * w2 * (x * x + y * y))
            }
            PotentialKind::Tabulated(f) => {
                assert_eq!(f.grid(), grid, "tabulated potential grid mismatch");
                f.clone()
            }
        }
    }

    /// Acceleration -∇V/m of a particle at `pos` (analytic where the form
    /// allows, interpolated for tabulated values).
    pub fn acceleration(&self, pos: [f64; 2], grid: &Grid, params: &PhysicalParams) -> [f64; 2] {
        match &self.kind {
            PotentialKind::Free | PotentialKind::Well => [0.0, 0.0],
            PotentialKind::Harmonic { omega } => {
                let w2 = omega * omega;
                [-w2 * pos[0], -w2 * pos[1]]
            }
            PotentialKind::Tabulated(f) => {
                // second-order central difference of the table, with linear
                // interpolation of the gradient between node positions
                let mut a = [0.0, 0.0];
                for axis in 0..grid.dim() {
                    a[axis] = -table_gradient(f, grid, pos, axis) / params.mass;
                }
                a
            }
        }
    }
}

fn table_gradient(f: &ScalarField, grid: &Grid, pos: [f64; 2], axis: usize) -> f64 {
    let n = grid.points(axis);
    let dx = grid.spacing(axis);
    let x0 = grid.coord(axis, 0);
    let t = (pos[axis] - x0) / dx;
    let i = (t.floor() as isize).clamp(0, n as isize - 1) as usize;
    let frac = (t - i as f64).clamp(0.0, 1.0);
    let grad_at = |i: usize| {
        let im = if i == 0 { if grid.boundary() == Boundary::Periodic { n - 1 } else { 0 } } else { i - 1 };
        let ip = if i + 1 >= n { if grid.boundary() == Boundary::Periodic { 0 } else { n - 1 } } else { i + 1 };
        let span = if ip == im { dx } else { (ip as isize - im as isize).unsigned_abs() as f64 * dx };
        let other = if grid.dim() == 2 {
            // gradient taken along `axis` at the nearest second index
            let oax = 1 - axis;
            let s = ((pos[oax] - grid.coord(oax, 0)) / grid.spacing(oax)).round() as isize;
            s.clamp(0, grid.points(oax) as isize - 1) as usize
        } else {
            0
        };
        let idx = |i: usize| if axis == 0 { grid.index(i, other) } else { grid.index(other, i) };
        (f.data()[idx(ip)] - f.data()[idx(im)]) / span
    };
    let ip = (i + 1).min(n - 1);
    (1.0 - frac) * grad_at(i) + frac * grad_at(ip)
}

/// Time-stepping configuration shared by the solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Steps between recorded diagnostic snapshots.
    pub record_stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    SplitStep,
    CrankNicolson,
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.dt > 0.0) {
            return Err(CoreError::Config(format!("dt must be > 0 (got {})", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(CoreError::Config(format!("t_end must be >= 0 (got {})", self.t_end)));
        }
        if self.record_stride == 0 {
            return Err(CoreError::Config("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// One Strang step: half potential phase, full kinetic phase in spectral
/// space, half potential phase. Unitary to round-off. Periodic grids only.
pub fn step_split(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
) -> Result<WaveField, CoreError> {
    if psi.grid().boundary() != Boundary::Periodic {
        return Err(CoreError::UnsupportedScheme(
            "split-step needs a periodic grid; use step_cn on box grids",
        ));
    }
    let mut field = psi.field.clone();
    apply_potential_phase(&mut field, potential, params, 0.5 * dt);
    apply_kinetic_phase(&mut field, params, dt);
    apply_potential_phase(&mut field, potential, params, 0.5 * dt);
    Ok(WaveField::new(field, psi.norm_target))
}

fn apply_potential_phase(field: &mut ComplexField, v: &ScalarField, params: &PhysicalParams, dt: f64) {
    let inv_hbar = 1.0 / params.hbar;
    for (p, vv) in field.data_mut().iter_mut().zip(v.data().iter()) {
        *p *= C64::from_polar(1.0, -vv * dt * inv_hbar);
    }
}

fn apply_kinetic_phase(field: &mut ComplexField, params: &PhysicalParams, dt: f64) {
    let grid = field.grid().clone();
    let coef = -params.hbar * dt / (2.0 * params.mass);
    fft_axes(field, false);
    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    let data = field.data_mut();
    for i0 in 0..n0 {
        let k0 = wavenumber(i0, n0, grid.length(0));
        for i1 in 0..n1 {
            let k1 = if grid.dim() == 2 { wavenumber(i1, n1, grid.length(1)) } else { 0.0 };
            data[i0 * n1 + i1] *= C64::from_polar(1.0, coef * (k0 * k0 + k1 * k1));
        }
    }
    fft_axes(field, true);
}

/// Crank–Nicolson step. 1-D: one Cayley solve with the full tridiagonal
/// Hamiltonian. 2-D: Strang-factored Cayley steps per direction (each factor
/// exactly unitary, so the norm is conserved to solver round-off).
/// Dirichlet walls on box grids enter through antisymmetric ghost nodes;
/// periodic grids use the cyclic tridiagonal solver.
pub fn step_cn(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
) -> Result<WaveField, CoreError> {
    let grid = psi.grid().clone();
    let mut field = psi.field.clone();
    match grid.dim() {
        1 => {
            cayley_axis(&mut field, potential, params, dt, 0, 1.0)?;
        }
        _ => {
            // A = T_x + V/2, B = T_y + V/2; step = C_B(dt/2) C_A(dt) C_B(dt/2)
            cayley_axis(&mut field, potential, params, 0.5 * dt, 1, 0.5)?;
            cayley_axis(&mut field, potential, params, dt, 0, 0.5)?;
            cayley_axis(&mut field, potential, params, 0.5 * dt, 1, 0.5)?;
        }
    }
    Ok(WaveField::new(field, psi.norm_target))
}

/// Apply the unitary Cayley factor (1 + iαH_axis)⁻¹(1 - iαH_axis) with
/// H_axis = -(ħ²/2m)∂²_axis + v_frac·V and α = dt/2ħ, line by line.
fn cayley_axis(
    field: &mut ComplexField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
    axis: usize,
    v_frac: f64,
) -> Result<(), CoreError> {
    let grid = field.grid().clone();
    let periodic = grid.boundary() == Boundary::Periodic;
    let n = grid.points(axis);
    let dx = grid.spacing(axis);
    let alpha = dt / (2.0 * params.hbar);
    let t_off = -params.hbar * params.hbar / (2.0 * params.mass * dx * dx);
    let t_diag = -2.0 * t_off;
    // box walls: ghost = -f_0, so the diagonal picks up one extra |t_off|
    let wall_diag = -3.0 * t_off;

    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    let n_lines = if axis == 0 { n1 } else { n0 };
    let mut line = vec![C64::new(0.0, 0.0); n];
    let mut hdiag = vec![0.0f64; n];
    let mut diag = vec![C64::new(0.0, 0.0); n];
    let mut rhs = vec![C64::new(0.0, 0.0); n];

    for li in 0..n_lines {
        let idx = |j: usize| if axis == 0 { grid.index(j, li) } else { grid.index(li, j) };
        for j in 0..n {
            line[j] = field.data()[idx(j)];
            let t = if !periodic && (j == 0 || j == n - 1) { wall_diag } else { t_diag };
            hdiag[j] = t + v_frac * potential.data()[idx(j)];
            diag[j] = C64::new(1.0, alpha * hdiag[j]);
        }
        // rhs = (1 - iαH) f
        for j in 0..n {
            let left = if j > 0 {
                line[j - 1]
            } else if periodic {
                line[n - 1]
            } else {
                C64::new(0.0, 0.0)
            };
            let right = if j + 1 < n {
                line[j + 1]
            } else if periodic {
                line[0]
            } else {
                C64::new(0.0, 0.0)
            };
            let hval = hdiag[j] * line[j] + t_off * (left + right);
            rhs[j] = line[j] - C64::new(0.0, alpha) * hval;
        }
        let off = C64::new(0.0, alpha * t_off);
        if periodic {
            solve_cyclic_tridiagonal(&diag, off, &mut rhs)?;
        } else {
            solve_tridiagonal(&diag, off, &mut rhs)?;
        }
        for j in 0..n {
            field.data_mut()[idx(j)] = rhs[j];
        }
    }
    Ok(())
}

/// Thomas algorithm for a constant-offdiagonal tridiagonal system.
fn solve_tridiagonal(diag: &[C64], off: C64, rhs: &mut [C64]) -> Result<(), CoreError> {
    let n = diag.len();
    let mut c = vec![C64::new(0.0, 0.0); n];
    let mut piv = diag[0];
    if piv.norm() < 1e-300 {
        return Err(CoreError::Numerical("singular tridiagonal pivot".into()));
    }
    c[0] = off / piv;
    rhs[0] /= piv;
    for j in 1..n {
        piv = diag[j] - off * c[j - 1];
        if piv.norm() < 1e-300 {
            return Err(CoreError::Numerical("singular tridiagonal pivot".into()));
        }
        c[j] = off / piv;
        rhs[j] = (rhs[j] - off * rhs[j - 1]) / piv;
    }
    for j in (0..n - 1).rev() {
        let next = rhs[j + 1];
        rhs[j] -= c[j] * next;
    }
    Ok(())
}

/// Sherman–Morrison wrap-around correction on top of the Thomas solve.
fn solve_cyclic_tridiagonal(diag: &[C64], off: C64, rhs: &mut [C64]) -> Result<(), CoreError> {
    let n = diag.len();
    let gamma = -diag[0];
    let mut d2: Vec<C64> = diag.to_vec();
    d2[0] -= gamma;
    d2[n - 1] -= off * off / gamma;
    let mut u = vec![C64::new(0.0, 0.0); n];
    u[0] = gamma;
    u[n - 1] = off;
    solve_tridiagonal(&d2, off, rhs)?;
    solve_tridiagonal(&d2, off, &mut u)?;
    // v = (1, 0, ..., 0, off/gamma)
    let vy = rhs[0] + off / gamma * rhs[n - 1];
    let vq = u[0] + off / gamma * u[n - 1];
    let factor = vy / (C64::new(1.0, 0.0) + vq);
    for j in 0..n {
        let uj = u[j];
        rhs[j] -= factor * uj;
    }
    Ok(())
}

/// Energy functional split into its kinetic and potential parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFunctional {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
}

/// H = ∫ [ (ħ²/2m)|∂ψ|² + V|ψ|² ] dx, evaluated as -(ħ²/2m)⟨ψ, D²ψ⟩ with
/// the grid's second-derivative operator so that δH/δψ* is exactly
/// -(ħ²/2m)D²ψ + Vψ.
pub fn energy_functional(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
) -> EnergyFunctional {
    let w = psi.grid().cell_volume();
    let mut kinetic = 0.0;
    for axis in 0..psi.grid().dim() {
        let d2 = derivative_complex(&psi.field, axis, 2).expect("second derivative");
        let s: f64 = psi
            .values()
            .iter()
            .zip(d2.data().iter())
            .map(|(p, d)| (p.conj() * d).re)
            .sum();
        kinetic += -params.hbar * params.hbar / (2.0 * params.mass) * s * w;
    }
    let potential_part: f64 = psi
        .values()
        .iter()
        .zip(potential.data().iter())
        .map(|(p, v)| v * p.norm_sqr())
        .sum::<f64>()
        * w;
    EnergyFunctional { total: kinetic + potential_part, kinetic, potential: potential_part }
}

/// δH/δψ* = -(ħ²/2m)D²ψ + Vψ.
pub fn functional_gradient(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
) -> ComplexField {
    let c = -params.hbar * params.hbar / (2.0 * params.mass);
    let mut out = ComplexField::zeros(psi.grid().clone());
    for axis in 0..psi.grid().dim() {
        let d2 = derivative_complex(&psi.field, axis, 2).expect("second derivative");
        out = out.zip_map(&d2, |a, d| a + c * d);
    }
    for ((o, p), v) in out
        .data_mut()
        .iter_mut()
        .zip(psi.values().iter())
        .zip(potential.data().iter())
    {
        *o += v * p;
    }
    out
}

/// Consistency of the canonical evolution with the energy functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalReport {
    /// ‖iħ ∂ψ/∂t − δH/δψ*‖₂ / ‖δH/δψ*‖₂, with ∂ψ/∂t from a centered pair
    /// of solver steps of size `dt_probe`.
    pub residual: f64,
    /// Max relative mismatch between δH/δψ* and a finite-difference
    /// gradient of the discrete H under node-wise perturbations of ψ*.
    pub gradient_mismatch: f64,
}

pub fn variational_residual(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt_probe: f64,
) -> Result<VariationalReport, CoreError> {
    let plus = step_split(psi, potential, params, dt_probe)?;
    let minus = step_split(psi, potential, params, -dt_probe)?;
    let grad = functional_gradient(psi, potential, params);
    let ih = C64::new(0.0, params.hbar);
    let scale = 1.0 / (2.0 * dt_probe);
    let mut num = 0.0;
    let mut den = 0.0;
    for ((p, m), g) in plus.values().iter().zip(minus.values().iter()).zip(grad.data().iter()) {
        let dpsi_dt = (p - m) * scale;
        num += (ih * dpsi_dt - g).norm_sqr();
        den += g.norm_sqr();
    }
    let residual = (num / den).sqrt();

    let gradient_mismatch = gradient_fd_check(psi, potential, params, &grad, 1e-6);
    Ok(VariationalReport { residual, gradient_mismatch })
}

/// Compare δH/δψ* against (∂H/∂Re ψ_i + i ∂H/∂Im ψ_i)/(2 w_i) from centered
/// finite differences of the discrete functional.
fn gradient_fd_check(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
    grad: &ComplexField,
    eps: f64,
) -> f64 {
    let w = psi.grid().cell_volume();
    let scale = grad.data().iter().fold(0.0f64, |m, g| m.max(g.norm()));
    let n = psi.grid().node_count();
    // probing every node costs 4n functional evaluations; stride keeps the
    // check dense enough without quadratic blow-up on big grids
    let stride = (n / 128).max(1);
    let mut worst = 0.0f64;
    let mut probe = psi.clone();
    let mut i = 0;
    while i < n {
        let mut fd = C64::new(0.0, 0.0);
        for (comp, unit) in [(0usize, C64::new(1.0, 0.0)), (1usize, C64::new(0.0, 1.0))] {
            let base = probe.values()[i];
            probe.field.data_mut()[i] = base + unit * eps;
            let hp = energy_functional(&probe, potential, params).total;
            probe.field.data_mut()[i] = base - unit * eps;
            let hm = energy_functional(&probe, potential, params).total;
            probe.field.data_mut()[i] = base;
            let d = (hp - hm) / (2.0 * eps);
            fd += if comp == 0 { C64::new(d, 0.0) } else { C64::new(0.0, d) };
        }
        let fd_grad = fd / (2.0 * w);
        worst = worst.max((fd_grad - grad.data()[i]).norm() / scale);
        i += stride;
    }
    worst
}

/// Imaginary-time propagation with per-step renormalization, stopping when
/// the Rayleigh quotient stagnates to `tol` (or erroring out after
/// `max_steps`). Returns the ground state normalized to `norm_target`.
pub fn ground_state(
    grid: &Grid,
    potential: &ScalarField,
    params: &PhysicalParams,
    norm_target: f64,
    dt_imag: f64,
    tol: f64,
    max_steps: usize,
) -> Result<WaveField, CoreError> {
    // broad positive seed overlaps the ground state of any confining V
    let l0 = grid.length(0);
    let seed = ComplexField::from_fn(grid.clone(), |x, y| {
        C64::new((-(x * x + y * y) / (l0 * l0 / 16.0)).exp(), 0.0)
    });
    let mut psi = WaveField::new(seed, norm_target);
    psi.normalize();
    let mut e_prev = f64::INFINITY;
    for _ in 0..max_steps {
        psi = match grid.boundary() {
            Boundary::Periodic => imaginary_split_step(&psi, potential, params, dt_imag),
            Boundary::Box => {
                // CN with imaginary time is an implicit diffusion solve
                let mut f = psi.field.clone();
                diffusion_cayley(&mut f, potential, params, dt_imag)?;
                WaveField::new(f, psi.norm_target)
            }
        };
        psi.normalize();
        let e = energy_functional(&psi, potential, params).total / psi.norm_target;
        if (e - e_prev).abs() <= tol * e.abs().max(1.0) {
            return Ok(psi);
        }
        e_prev = e;
    }
    Err(CoreError::Numerical(format!(
        "imaginary-time iteration did not stagnate to {tol} within {max_steps} steps"
    )))
}

fn imaginary_split_step(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
) -> WaveField {
    let mut field = psi.field.clone();
    let half = |field: &mut ComplexField| {
        for (p, v) in field.data_mut().iter_mut().zip(potential.data().iter()) {
            *p *= (-v * dt / (2.0 * params.hbar)).exp();
        }
    };
    half(&mut field);
    let grid = field.grid().clone();
    let coef = -params.hbar * dt / (2.0 * params.mass);
    fft_axes(&mut field, false);
    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    for i0 in 0..n0 {
        let k0 = wavenumber(i0, n0, grid.length(0));
        for i1 in 0..n1 {
            let k1 = if grid.dim() == 2 { wavenumber(i1, n1, grid.length(1)) } else { 0.0 };
            field.data_mut()[i0 * n1 + i1] *= (coef * (k0 * k0 + k1 * k1)).exp();
        }
    }
    fft_axes(&mut field, true);
    half(&mut field);
    WaveField::new(field, psi.norm_target)
}

fn diffusion_cayley(
    field: &mut ComplexField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
) -> Result<(), CoreError> {
    // (1 + (dt/2ħ)H) ψ' = (1 - (dt/2ħ)H) ψ, factored per direction in 2-D
    let grid = field.grid().clone();
    match grid.dim() {
        1 => imaginary_cayley_axis(field, potential, params, dt, 0, 1.0),
        _ => {
            imaginary_cayley_axis(field, potential, params, 0.5 * dt, 1, 0.5)?;
            imaginary_cayley_axis(field, potential, params, dt, 0, 0.5)?;
            imaginary_cayley_axis(field, potential, params, 0.5 * dt, 1, 0.5)
        }
    }
}

fn imaginary_cayley_axis(
    field: &mut ComplexField,
    potential: &ScalarField,
    params: &PhysicalParams,
    dt: f64,
    axis: usize,
    v_frac: f64,
) -> Result<(), CoreError> {
    let grid = field.grid().clone();
    let periodic = grid.boundary() == Boundary::Periodic;
    let n = grid.points(axis);
    let dx = grid.spacing(axis);
    let alpha = dt / (2.0 * params.hbar);
    let t_off = -params.hbar * params.hbar / (2.0 * params.mass * dx * dx);
    let t_diag = -2.0 * t_off;
    let wall_diag = -3.0 * t_off;

    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    let n_lines = if axis == 0 { n1 } else { n0 };
    let mut line = vec![C64::new(0.0, 0.0); n];
    let mut hdiag = vec![0.0f64; n];
    let mut diag = vec![C64::new(0.0, 0.0); n];
    let mut rhs = vec![C64::new(0.0, 0.0); n];
    for li in 0..n_lines {
        let idx = |j: usize| if axis == 0 { grid.index(j, li) } else { grid.index(li, j) };
        for j in 0..n {
            line[j] = field.data()[idx(j)];
            let t = if !periodic && (j == 0 || j == n - 1) { wall_diag } else { t_diag };
            hdiag[j] = t + v_frac * potential.data()[idx(j)];
            diag[j] = C64::new(1.0 + alpha * hdiag[j], 0.0);
        }
        for j in 0..n {
            let left = if j > 0 {
                line[j - 1]
            } else if periodic {
                line[n - 1]
            } else {
                C64::new(0.0, 0.0)
            };
            let right = if j + 1 < n {
                line[j + 1]
            } else if periodic {
                line[0]
            } else {
                C64::new(0.0, 0.0)
            };
            let hval = hdiag[j] * line[j] + t_off * (left + right);
            rhs[j] = line[j] - alpha * hval;
        }
        let off = C64::new(alpha * t_off, 0.0);
        if periodic {
            solve_cyclic_tridiagonal(&diag, off, &mut rhs)?;
        } else {
            solve_tridiagonal(&diag, off, &mut rhs)?;
        }
        for j in 0..n {
            field.data_mut()[idx(j)] = rhs[j];
        }
    }
    Ok(())
}
