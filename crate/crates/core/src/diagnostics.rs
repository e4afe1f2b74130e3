//! Derived fields and scalars: quantum potential, stress-tensor closures and
//! the force they generate, the electromagnetic analogy of the momentum
//! balance, conserved totals and the classical/internal energy split, the
//! uncertainty chain, and circulation quantization.
//!
//! Log-density derivatives are evaluated ρ-mediated (∇ξ = ∇ρ/ρ and so on):
//! differentiating ξ itself spectrally is hopeless because ξ of a localized
//! state is a near-parabola whose periodic image has an unresolvable corner,
//! while ρ is spectrally clean. Velocity moments are evaluated through the
//! wavefunction bilinears Re/Im(ψ̄ ∂ψ), which makes the energy split and the
//! Δp² = Δp_cl² + 2m𝓗 decomposition exact discrete identities rather than
//! approximations.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::deriv::derivative;
use crate::error::CoreError;
use crate::field::{ScalarField, WaveField};
use crate::grid::Grid;
use crate::params::PhysicalParams;
use crate::transform::{hydro_from_psi, psi_from_hydro, wave_bilinears, HydroState};
use crate::RHO_FLOOR;

/// ∇ξ per axis, evaluated as ∇ρ/ρ with flagged nodes interpolated.
pub fn grad_xi(h: &HydroState) -> Vec<ScalarField> {
    let mask: Vec<bool> = h.rho.data().iter().map(|r| *r < RHO_FLOOR).collect();
    let mut out = Vec::with_capacity(h.grid().dim());
    for axis in 0..h.grid().dim() {
        let drho = derivative(&h.rho, axis, 1).expect("density gradient");
        let mut g: Vec<f64> = drho
            .data()
            .iter()
            .zip(h.rho.data().iter())
            .map(|(d, r)| if *r < RHO_FLOOR { 0.0 } else { d / r })
            .collect();
        crate::transform::interpolate_masked(h.grid(), &mut g, &mask);
        out.push(ScalarField::new(h.grid().clone(), g));
    }
    out
}

/// ∇²ξ = ∇²ρ/ρ − |∇ξ|², flagged nodes interpolated.
pub fn laplacian_xi(h: &HydroState) -> ScalarField {
    let gx = grad_xi(h);
    let mask: Vec<bool> = h.rho.data().iter().map(|r| *r < RHO_FLOOR).collect();
    let mut acc = alloc::vec![0.0f64; h.grid().node_count()];
    for axis in 0..h.grid().dim() {
        let d2 = derivative(&h.rho, axis, 2).expect("density curvature");
        for i in 0..acc.len() {
            let r = h.rho.data()[i];
            if r >= RHO_FLOOR {
                let gi = gx[axis].data()[i];
                acc[i] += d2.data()[i] / r - gi * gi;
            }
        }
    }
    crate::transform::interpolate_masked(h.grid(), &mut acc, &mask);
    ScalarField::new(h.grid().clone(), acc)
}

/// Internal-energy density ε = -(ħ²/8m) ∇²ξ (total convention).
pub fn epsilon_field(h: &HydroState, params: &PhysicalParams) -> ScalarField {
    let c = -params.hbar * params.hbar / (8.0 * params.mass);
    laplacian_xi(h).map(|l| c * l)
}

/// Quantum potential W = -(ħ²/4m) [ ½|∇ξ|² + ∇²ξ ] (total convention;
/// the per-monad value is W/N).
pub fn quantum_potential(h: &HydroState, params: &PhysicalParams) -> ScalarField {
    let c = -params.hbar * params.hbar / (4.0 * params.mass);
    let gx = grad_xi(h);
    let lap = laplacian_xi(h);
    let mut out = lap.clone();
    for i in 0..out.data().len() {
        let g2: f64 = gx.iter().map(|g| g.data()[i] * g.data()[i]).sum();
        out.data_mut()[i] = c * (0.5 * g2 + lap.data()[i]);
    }
    out
}

/// Which closure generated a stress field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StressForm {
    /// Σ_jk = -(ħ²/4m) ∂²ξ/∂x_j∂x_k (the log-density Hessian closure).
    LogDensityHessian,
    /// Σ_jk = -(ħ²/4m) [ (∇²ρ/ρ) δ_jk − (∂_jρ)(∂_kρ)/ρ² ].
    DensityLaplacian,
}

/// Symmetric stress tensor density with its scalar companions.
///
/// Components are stored packed: `[xx]` in 1-D, `[xx, xy, yy]` in 2-D.
/// In 1-D the two closures coincide identically (∂²ξ = ρ''/ρ − (ρ'/ρ)²);
/// they differ pointwise only from two dimensions up, where the Hessian and
/// the Laplacian·δ part company. Their force fields agree in any dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct StressField {
    pub form: StressForm,
    pub sigma: Vec<ScalarField>,
    /// ε = -(ħ²/8m)∇²ξ, the closure's internal-energy density.
    pub epsilon: ScalarField,
    /// Equation of state π = 2ρε/n.
    pub pressure: ScalarField,
    /// ħ²/4m, kept so force evaluation needs no extra parameters.
    pub coeff: f64,
}

impl StressField {
    /// Packed index of component (j, k).
    pub fn component(&self, j: usize, k: usize) -> &ScalarField {
        let dim = if self.sigma.len() == 1 { 1 } else { 2 };
        let idx = match (dim, j.min(k), j.max(k)) {
            (1, 0, 0) => 0,
            (2, 0, 0) => 0,
            (2, 0, 1) => 1,
            (2, 1, 1) => 2,
            _ => panic!("stress component ({j},{k}) out of range"),
        };
        &self.sigma[idx]
    }
}

pub fn stress_tensor(
    h: &HydroState,
    params: &PhysicalParams,
    form: StressForm,
) -> StressField {
    let grid = h.grid().clone();
    let dim = grid.dim();
    let c = params.hbar * params.hbar / (4.0 * params.mass);
    let mask: Vec<bool> = h.rho.data().iter().map(|r| *r < RHO_FLOOR).collect();
    let gx = grad_xi(h);

    let mut comps: Vec<ScalarField> = Vec::new();
    match form {
        StressForm::LogDensityHessian => {
            // ∂_j∂_k ξ = (∂_j∂_k ρ)/ρ − (∂_jξ)(∂_kξ)
            for (j, k) in component_pairs(dim) {
                let djk = if j == k {
                    derivative(&h.rho, j, 2).expect("density curvature")
                } else {
                    let dj = derivative(&h.rho, j, 1).expect("density gradient");
                    derivative(&dj, k, 1).expect("mixed density curvature")
                };
                let mut vals: Vec<f64> = (0..grid.node_count())
                    .map(|i| {
                        let r = h.rho.data()[i];
                        if r < RHO_FLOOR {
                            0.0
                        } else {
                            let hess = djk.data()[i] / r - gx[j].data()[i] * gx[k].data()[i];
                            -c * hess
                        }
                    })
                    .collect();
                crate::transform::interpolate_masked(&grid, &mut vals, &mask);
                comps.push(ScalarField::new(grid.clone(), vals));
            }
        }
        StressForm::DensityLaplacian => {
            let mut lap_rho = ScalarField::zeros(grid.clone());
            for axis in 0..dim {
                let d2 = derivative(&h.rho, axis, 2).expect("density curvature");
                lap_rho = lap_rho.zip_map(&d2, |a, b| a + b);
            }
            let grads: Vec<ScalarField> = (0..dim)
                .map(|axis| derivative(&h.rho, axis, 1).expect("density gradient"))
                .collect();
            for (j, k) in component_pairs(dim) {
                let mut vals: Vec<f64> = (0..grid.node_count())
                    .map(|i| {
                        let r = h.rho.data()[i];
                        if r < RHO_FLOOR {
                            0.0
                        } else {
                            let iso = if j == k { lap_rho.data()[i] / r } else { 0.0 };
                            let aniso = grads[j].data()[i] * grads[k].data()[i] / (r * r);
                            -c * (iso - aniso)
                        }
                    })
                    .collect();
                crate::transform::interpolate_masked(&grid, &mut vals, &mask);
                comps.push(ScalarField::new(grid.clone(), vals));
            }
        }
    }

    let epsilon = epsilon_field(h, params);
    let n = dim as f64;
    let pressure = h.rho.zip_map(&epsilon, |r, e| 2.0 * r * e / n);
    StressField { form, sigma: comps, epsilon, pressure, coeff: c }
}

fn component_pairs(dim: usize) -> Vec<(usize, usize)> {
    if dim == 1 {
        alloc::vec![(0, 0)]
    } else {
        alloc::vec![(0, 0), (0, 1), (1, 1)]
    }
}

/// The stress force and the quantum-potential gradient it must equal.
#[derive(Debug, Clone, PartialEq)]
pub struct StressForce {
    /// 𝓕_j = -Σ_jk ∂ξ/∂x_k − ∂Σ_jk/∂x_k.
    pub force: Vec<ScalarField>,
    /// -∂W/∂x_j for comparison.
    pub neg_grad_w: Vec<ScalarField>,
}

pub fn stress_force(stress: &StressField, h: &HydroState) -> StressForce {
    let grid = h.grid().clone();
    let dim = grid.dim();
    let gx = grad_xi(h);
    let mut force = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut f = alloc::vec![0.0f64; grid.node_count()];
        for k in 0..dim {
            let sjk = stress.component(j, k);
            let div = derivative(sjk, k, 1).expect("stress divergence");
            for i in 0..f.len() {
                f[i] += -sjk.data()[i] * gx[k].data()[i] - div.data()[i];
            }
        }
        force.push(ScalarField::new(grid.clone(), f));
    }
    // rebuild W from the same ∇ξ pieces the force used
    let lap = laplacian_xi(h);
    let mut w = lap.clone();
    for i in 0..w.data().len() {
        let g2: f64 = gx.iter().map(|g| g.data()[i] * g.data()[i]).sum();
        w.data_mut()[i] = -stress.coeff * (0.5 * g2 + lap.data()[i]);
    }
    let neg_grad_w = (0..dim)
        .map(|j| derivative(&w, j, 1).expect("potential gradient").map(|v| -v))
        .collect();
    StressForce { force, neg_grad_w }
}

/// Electromagnetic-analogy fields of the momentum balance.
#[derive(Debug, Clone, PartialEq)]
pub struct EmAnalogy {
    /// 𝒜₀ = u²/2.
    pub a0: ScalarField,
    /// 𝒜 = u.
    pub a: Vec<ScalarField>,
    /// 𝓔 = -∇𝒜₀ - ∂𝒜/∂t.
    pub e_field: Vec<ScalarField>,
    /// 𝓑 = ∇×𝒜 (2-D only; the scalar out-of-plane component).
    pub b_field: Option<ScalarField>,
    /// -m Du/Dt at the midpoint of the pair.
    pub lorentz_lhs: Vec<ScalarField>,
    /// m𝓔 + m u×𝓑.
    pub lorentz_rhs: Vec<ScalarField>,
}

/// Build the analogy from two snapshots separated by `dt` (the time
/// derivative is the centered difference at the pair midpoint).
pub fn em_analogy(
    before: &HydroState,
    after: &HydroState,
    dt: f64,
    params: &PhysicalParams,
) -> Result<EmAnalogy, CoreError> {
    if before.grid() != after.grid() {
        return Err(CoreError::Config("snapshot grids differ".into()));
    }
    if !(dt > 0.0) {
        return Err(CoreError::Config(format!("snapshot separation must be positive (got {dt})")));
    }
    let grid = before.grid().clone();
    let dim = grid.dim();
    let m = params.mass;

    let u_mid: Vec<ScalarField> = (0..dim)
        .map(|ax| before.u[ax].zip_map(&after.u[ax], |a, b| 0.5 * (a + b)))
        .collect();
    let du_dt: Vec<ScalarField> = (0..dim)
        .map(|ax| before.u[ax].zip_map(&after.u[ax], |a, b| (b - a) / dt))
        .collect();

    let mut a0 = ScalarField::zeros(grid.clone());
    for uk in &u_mid {
        a0 = a0.zip_map(uk, |acc, u| acc + 0.5 * u * u);
    }

    let grad_a0: Vec<ScalarField> =
        (0..dim).map(|ax| derivative(&a0, ax, 1).expect("grad a0")).collect();
    let e_field: Vec<ScalarField> = (0..dim)
        .map(|ax| grad_a0[ax].zip_map(&du_dt[ax], |g, d| -g - d))
        .collect();

    let b_field = if dim == 2 {
        let duy_dx = derivative(&u_mid[1], 0, 1).expect("curl");
        let dux_dy = derivative(&u_mid[0], 1, 1).expect("curl");
        Some(duy_dx.zip_map(&dux_dy, |a, b| a - b))
    } else {
        None
    };

    // -m Du/Dt = -m[∂u/∂t + (u·∇)u]
    let mut lorentz_lhs = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut adv = ScalarField::zeros(grid.clone());
        for k in 0..dim {
            let dj = derivative(&u_mid[j], k, 1).expect("advective gradient");
            adv = adv.zip_map(&dj.zip_map(&u_mid[k], |g, u| g * u), |a, b| a + b);
        }
        lorentz_lhs.push(
            du_dt[j].zip_map(&adv, |d, a| -m * (d + a)),
        );
    }

    let mut lorentz_rhs = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut rhs = e_field[j].map(|e| m * e);
        if let Some(b) = &b_field {
            // u × B in 2-D: (u_y B, -u_x B)
            let other = &u_mid[1 - j];
            let sign = if j == 0 { 1.0 } else { -1.0 };
            rhs = rhs.zip_map(&other.zip_map(b, |u, bb| u * bb), |r, c| r + sign * m * c);
        }
        lorentz_rhs.push(rhs);
    }

    Ok(EmAnalogy { a0, a: u_mid, e_field, b_field, lorentz_lhs, lorentz_rhs })
}

/// Conserved totals and the classical/internal split of the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub h_total: f64,
    pub h_classical: f64,
    pub h_internal: f64,
    pub potential_part: f64,
    pub kinetic_classical_part: f64,
    pub p_total: [f64; 2],
    pub n_total: f64,
    /// H evaluated from the wavefunction functional, for cross-checking.
    pub h_from_psi: f64,
    /// 𝓗 evaluated independently from (ħ²/8m)∫(∇ξ)²ρ dx.
    pub internal_from_xi: f64,
}

/// Energies, momentum, and particle number of a hydrodynamic state.
pub fn conserved_quantities(
    h: &HydroState,
    potential: &ScalarField,
    params: &PhysicalParams,
) -> EnergyReport {
    let psi = psi_from_hydro(h, params);
    let grid = h.grid().clone();
    let w = grid.cell_volume();
    let hbar = params.hbar;
    let m = params.mass;
    let bilin = wave_bilinears(&psi);

    let mut kinetic_classical = 0.0;
    let mut internal = 0.0;
    let mut p_total = [0.0f64; 2];
    for axis in 0..grid.dim() {
        let (re, im) = &bilin[axis];
        for i in 0..grid.node_count() {
            let r = h.rho.data()[i];
            let a = 0.5 * re.data()[i]; // Re(ψ̄ ∂ψ)
            let b = 0.5 * im.data()[i]; // Im(ψ̄ ∂ψ)
            p_total[axis] += hbar * b * w;
            if r >= RHO_FLOOR {
                kinetic_classical += (hbar * b) * (hbar * b) / r / (2.0 * m) * w;
                internal += (hbar * a) * (hbar * a) / r / (2.0 * m) * w;
            } else {
                // a vortex-core node: all kinetic weight is internal
                let g2 = a * a + b * b;
                internal += hbar * hbar * g2 / r.max(RHO_FLOOR) / (2.0 * m) * w;
            }
        }
    }

    let potential_part: f64 = potential
        .data()
        .iter()
        .zip(h.rho.data().iter())
        .map(|(v, r)| v * r)
        .sum::<f64>()
        * w;
    let n_total = h.rho.integrate();

    // independent route to 𝓗 through ∇ξ = ∇ρ/ρ
    let gx = grad_xi(h);
    let mut internal_from_xi = 0.0;
    for g in &gx {
        for i in 0..grid.node_count() {
            let gi = g.data()[i];
            internal_from_xi += hbar * hbar / (8.0 * m) * gi * gi * h.rho.data()[i] * w;
        }
    }

    // H from the ψ functional (kinetic via |∂ψ|²)
    let mut h_from_psi = potential_part;
    for axis in 0..grid.dim() {
        let dpsi = crate::deriv::derivative_complex(&psi.field, axis, 1).expect("psi gradient");
        h_from_psi +=
            hbar * hbar / (2.0 * m) * dpsi.data().iter().map(|d| d.norm_sqr()).sum::<f64>() * w;
    }

    let h_classical = kinetic_classical + potential_part;
    EnergyReport {
        h_total: h_classical + internal,
        h_classical,
        h_internal: internal,
        potential_part,
        kinetic_classical_part: kinetic_classical,
        p_total,
        n_total,
        h_from_psi,
        internal_from_xi,
    }
}

/// The uncertainty chain: Δx, Δp, Δp_cl, the decomposition
/// Δp² = Δp_cl² + 2m𝓗, and the three inequality slacks.
///
/// The position–momentum bounds are theorems for states whose density
/// vanishes at the domain boundary; on a finite domain the derivation's
/// integration by parts leaves a boundary flux that weakens the bound to
/// (ħ/2)(1 − |B|/N). That deficit is computed from the edge density and
/// reported, and the slacks are measured against the weakened bound, so
/// they are honest for truncated states too (for localized states the
/// deficit is negligible).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    pub delta_x: f64,
    pub delta_p: f64,
    pub delta_p_cl: f64,
    pub internal_energy: f64,
    pub product: f64,
    /// ħ/2.
    pub bound: f64,
    /// (ħ/2)·|B|/N, the finite-domain weakening of the bound.
    pub boundary_deficit: f64,
    /// |Δp² − Δp_cl² − 2m𝓗| / Δp².
    pub decomposition_residual: f64,
    /// Δx·√(2m𝓗) − (ħ/2 − deficit) (position–internal-energy bound).
    pub slack_position_internal: f64,
    /// Δp − √(2m𝓗).
    pub slack_momentum_internal: f64,
    /// Δx·Δp − (ħ/2 − deficit).
    pub slack_product: f64,
}

pub fn uncertainty_report(h: &HydroState, params: &PhysicalParams) -> UncertaintyReport {
    uncertainty_report_psi(&psi_from_hydro(h, params), params)
}

pub fn uncertainty_report_psi(psi: &WaveField, params: &PhysicalParams) -> UncertaintyReport {
    let grid = psi.grid().clone();
    let w = grid.cell_volume();
    let hbar = params.hbar;
    let m = params.mass;
    let norm = psi.check_normalization();

    // position spread
    let mut delta_x_sq = 0.0;
    for axis in 0..grid.dim() {
        let mut mean = 0.0;
        let mut mean_sq = 0.0;
        for i in 0..grid.node_count() {
            let r = psi.values()[i].norm_sqr();
            let (x, y) = grid.position(i);
            let c = if axis == 0 { x } else { y };
            mean += c * r * w;
            mean_sq += c * c * r * w;
        }
        mean /= norm;
        mean_sq /= norm;
        delta_x_sq += mean_sq - mean * mean;
    }

    // momentum spread, classical part, internal energy — all through the
    // same bilinears so the decomposition closes exactly
    let bilin = wave_bilinears(psi);
    let mut p2 = 0.0;
    let mut p_mean_sq = 0.0;
    let mut p_cl_sq = 0.0;
    let mut two_m_h = 0.0;
    for axis in 0..grid.dim() {
        let (re, im) = &bilin[axis];
        let mut pk = 0.0;
        let mut pk2 = 0.0;
        let mut pcl = 0.0;
        let mut tmh = 0.0;
        for i in 0..grid.node_count() {
            let r = psi.values()[i].norm_sqr();
            let a = 0.5 * re.data()[i];
            let b = 0.5 * im.data()[i];
            pk += hbar * b * w;
            if r >= RHO_FLOOR {
                pk2 += hbar * hbar * (a * a + b * b) / r * w;
                pcl += (hbar * b) * (hbar * b) / r * w;
                tmh += (hbar * a) * (hbar * a) / r * w;
            } else {
                let g2 = (a * a + b * b) / r.max(RHO_FLOOR);
                pk2 += hbar * hbar * g2 * w;
                tmh += hbar * hbar * g2 * w;
            }
        }
        pk /= norm;
        p2 += pk2 / norm;
        p_mean_sq += pk * pk;
        p_cl_sq += pcl / norm - pk * pk;
        two_m_h += tmh / norm;
    }

    let delta_p_sq = p2 - p_mean_sq;
    let delta_x = delta_x_sq.max(0.0).sqrt();
    let delta_p = delta_p_sq.max(0.0).sqrt();
    let delta_p_cl = p_cl_sq.max(0.0).sqrt();
    let internal_energy = two_m_h / (2.0 * m);
    let bound = 0.5 * hbar;
    let product = delta_x * delta_p;
    let residual = (delta_p_sq - p_cl_sq - two_m_h).abs() / delta_p_sq.max(f64::MIN_POSITIVE);

    // boundary flux |B| = Σ_axes (L/2 + |x̄|)·(edge mass of ρ along the axis)
    let mut flux = 0.0;
    for axis in 0..grid.dim() {
        let mut x_mean = 0.0;
        let mut edge_mass = 0.0;
        let transverse = w / grid.spacing(axis);
        for i in 0..grid.node_count() {
            let r = psi.values()[i].norm_sqr();
            let (x, y) = grid.position(i);
            x_mean += (if axis == 0 { x } else { y }) * r * w;
            let (i0, i1) = grid.unindex(i);
            let on_edge = if axis == 0 { i0 == 0 } else { i1 == 0 };
            if on_edge {
                // on a periodic axis the seam stands for both domain ends
                edge_mass += 2.0 * r * transverse;
            }
        }
        x_mean /= norm;
        flux += (0.5 * grid.length(axis) + x_mean.abs()) * edge_mass;
    }
    let boundary_deficit = (bound * flux / norm).min(bound);
    let eff_bound = bound - boundary_deficit;

    UncertaintyReport {
        delta_x,
        delta_p,
        delta_p_cl,
        internal_energy,
        product,
        bound,
        boundary_deficit,
        decomposition_residual: residual,
        slack_position_internal: delta_x * two_m_h.max(0.0).sqrt() - eff_bound,
        slack_momentum_internal: delta_p - two_m_h.max(0.0).sqrt(),
        slack_product: product - eff_bound,
    }
}

/// Circulation of the velocity field around a closed grid path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circulation {
    /// ∮ u·dx, from wrapped phase increments (ħ/m per 2π of phase).
    pub gamma: f64,
    /// gamma · m / (2πħ); near-integer for single-valued ψ.
    pub j_estimate: f64,
}

/// `path` lists node indices of a closed loop (the closing edge from the
/// last node back to the first is implied).
pub fn circulation(
    h: &HydroState,
    path: &[usize],
    params: &PhysicalParams,
) -> Result<Circulation, CoreError> {
    if path.len() < 3 {
        return Err(CoreError::Precondition(format!(
            "a closed loop needs at least 3 nodes (got {})",
            path.len()
        )));
    }
    for &i in path {
        if h.rho.data()[i] < RHO_FLOOR {
            return Err(CoreError::PathThroughFlagged { node: i });
        }
    }
    let hbar = params.hbar;
    let mut total_phase = 0.0;
    for w in 0..path.len() {
        let a = path[w];
        let b = path[(w + 1) % path.len()];
        let d = (h.s.data()[b] - h.s.data()[a]) / hbar;
        total_phase += wrap_to_pi(d);
    }
    let gamma = total_phase * hbar / params.mass;
    let j_estimate = gamma * params.mass / (2.0 * PI * hbar);
    Ok(Circulation { gamma, j_estimate })
}

fn wrap_to_pi(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Axis-aligned square loop of half-width `radius` nodes around the node
/// with per-axis indices `center`, counterclockwise.
pub fn rectangle_loop(
    grid: &Grid,
    center: (usize, usize),
    radius: usize,
) -> Result<Vec<usize>, CoreError> {
    if grid.dim() != 2 {
        return Err(CoreError::Precondition("circulation loops need a 2-D grid".into()));
    }
    let (c0, c1) = center;
    if radius == 0
        || c0 < radius
        || c1 < radius
        || c0 + radius >= grid.points(0)
        || c1 + radius >= grid.points(1)
    {
        return Err(CoreError::Config(format!(
            "loop of radius {radius} around ({c0},{c1}) leaves the grid"
        )));
    }
    let (lo0, hi0) = (c0 - radius, c0 + radius);
    let (lo1, hi1) = (c1 - radius, c1 + radius);
    let mut path = Vec::with_capacity(8 * radius);
    for i0 in lo0..hi0 {
        path.push(grid.index(i0, lo1));
    }
    for i1 in lo1..hi1 {
        path.push(grid.index(hi0, i1));
    }
    for i0 in (lo0 + 1..=hi0).rev() {
        path.push(grid.index(i0, hi1));
    }
    for i1 in (lo1 + 1..=hi1).rev() {
        path.push(grid.index(lo0, i1));
    }
    Ok(path)
}

/// Convenience: the full report for a wavefunction snapshot.
pub fn conserved_quantities_psi(
    psi: &WaveField,
    potential: &ScalarField,
    params: &PhysicalParams,
) -> EnergyReport {
    conserved_quantities(&hydro_from_psi(psi, params), potential, params)
}
