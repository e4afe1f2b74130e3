//! Wavefunction-solver checks against closed-form and self-consistent
//! oracles: free-packet spreading, stationary states, well eigenvalues,
//! unitarity, conservation laws, and the variational identity.

mod common;

use common::*;
use madelung_core::schrodinger::{
    energy_functional, ground_state, step_cn, step_split,
    variational_residual, Potential,
};
use madelung_core::transform::wave_bilinears;
use madelung_core::{Boundary, ComplexField, Grid, WaveField, C64};

fn evolve_split(
    mut psi: WaveField,
    v: &madelung_core::ScalarField,
    p: &madelung_core::PhysicalParams,
    dt: f64,
    steps: usize,
) -> WaveField {
    for _ in 0..steps {
        psi = step_split(&psi, v, p, dt).unwrap();
    }
    psi
}

#[test]
fn free_packet_spreading_matches_closed_form() {
    // σ²(t) = σ₀²(1 + (ħt/2mσ₀²)²) — at t = 2 with σ₀ = 1 this is 2.
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let v = Potential::free().values(&grid, &p);
    let psi0 = gaussian_psi(&grid, 1.0, 0.0);
    let psi = evolve_split(psi0.clone(), &v, &p, 1e-3, 2000);
    let var = position_variance(&psi);
    assert!((var - 2.0).abs() < 1e-3, "σ²(2) = {var}");
    // cross-check against a finer-step run: free split stepping is exact in
    // dt, so the two runs agree far below the tolerance
    let fine = evolve_split(psi0, &v, &p, 2.5e-4, 8000);
    assert!(psi.field.l2_distance(&fine.field) < 1e-10);
}

#[test]
fn harmonic_ground_state_is_stationary_over_a_period() {
    let grid = periodic_line(256, 12.0);
    let p = natural();
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    let psi0 = ground_state(&grid, &v, &p, 1.0, 1e-3, 1e-10, 200_000).unwrap();
    let period = 2.0 * core::f64::consts::PI;
    let steps = 6283;
    let psi = evolve_split(psi0.clone(), &v, &p, period / steps as f64, steps);
    let fidelity = psi0.field.inner(&psi.field).norm();
    assert!((fidelity - 1.0).abs() < 1e-8, "fidelity {fidelity}");
}

#[test]
fn plane_wave_keeps_constant_modulus() {
    let grid = periodic_line(256, 2.0 * core::f64::consts::PI);
    let p = natural();
    let v = Potential::free().values(&grid, &p);
    let (psi0, k) = plane_wave_psi(&grid, 2.0);
    assert_eq!(k, 2.0);
    let psi = evolve_split(psi0.clone(), &v, &p, 1e-3, 1000);
    for (a, b) in psi.values().iter().zip(psi0.values().iter()) {
        assert!((a.norm() - b.norm()).abs() < 1e-12);
    }
}

#[test]
fn split_step_requires_periodic_grid() {
    let grid = Grid::line(64, 1.0, Boundary::Box).unwrap();
    let p = natural();
    let v = Potential::well().values(&grid, &p);
    let psi = WaveField::new(ComplexField::zeros(grid), 1.0);
    assert!(step_split(&psi, &v, &p, 1e-3).is_err());
}

fn well_eigenstate(grid: &Grid, level: u32) -> WaveField {
    let l = grid.length(0);
    let mut psi = ComplexField::from_fn(grid.clone(), |x, _| {
        C64::new(((x + 0.5 * l) * core::f64::consts::PI * level as f64 / l).sin(), 0.0)
    });
    let norm = psi.norm_sq_integral().sqrt();
    for v in psi.data_mut() {
        *v /= norm;
    }
    WaveField::new(psi, 1.0)
}

#[test]
fn well_ground_state_phase_advances_at_its_eigenvalue() {
    // E₁ = π²ħ²/2mL² = π²/2 for L = 1, ħ = m = 1
    let grid = Grid::line(512, 1.0, Boundary::Box).unwrap();
    let p = natural();
    let v = Potential::well().values(&grid, &p);
    let psi0 = well_eigenstate(&grid, 1);
    let t_end = 0.1;
    let steps = 1000;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = step_cn(&psi, &v, &p, t_end / steps as f64).unwrap();
    }
    let mid = grid.node_count() / 2;
    let phase = (psi.values()[mid] / psi0.values()[mid]).arg();
    let e_measured = -phase / t_end;
    let e_exact = core::f64::consts::PI.powi(2) / 2.0;
    assert!((e_measured - e_exact).abs() < 1e-3, "E = {e_measured} vs {e_exact}");

    // the solver's own estimate at doubled resolution agrees
    let grid2 = Grid::line(1024, 1.0, Boundary::Box).unwrap();
    let v2 = Potential::well().values(&grid2, &p);
    let psi2 = well_eigenstate(&grid2, 1);
    let e_rayleigh = energy_functional(&psi2, &v2, &p).total;
    assert!((e_measured - e_rayleigh).abs() < 1e-3);
}

#[test]
fn crank_nicolson_preserves_zero_and_norm() {
    let grid = Grid::line(256, 1.0, Boundary::Box).unwrap();
    let p = natural();
    let v = Potential::well().values(&grid, &p);
    let zero = WaveField::new(ComplexField::zeros(grid.clone()), 1.0);
    let stepped = step_cn(&zero, &v, &p, 1e-3).unwrap();
    assert!(stepped.field.norm_sq_integral() == 0.0);

    let mut psi = well_eigenstate(&grid, 1);
    let n0 = psi.check_normalization();
    for _ in 0..1000 {
        psi = step_cn(&psi, &v, &p, 1e-3).unwrap();
    }
    assert!((psi.check_normalization() - n0).abs() / n0 < 1e-8);
}

#[test]
fn crank_nicolson_two_dimensional_well() {
    let grid = Grid::square(64, 1.0, Boundary::Box).unwrap();
    let p = natural();
    let v = Potential::well().values(&grid, &p);
    let l = grid.length(0);
    let mut psi0 = ComplexField::from_fn(grid.clone(), |x, y| {
        let sx = ((x + 0.5 * l) * core::f64::consts::PI / l).sin();
        let sy = ((y + 0.5 * l) * core::f64::consts::PI / l).sin();
        C64::new(sx * sy, 0.0)
    });
    let norm = psi0.norm_sq_integral().sqrt();
    for v in psi0.data_mut() {
        *v /= norm;
    }
    let psi0 = WaveField::new(psi0, 1.0);
    let t_end = 0.05;
    let steps = 500;
    let mut psi = psi0.clone();
    for _ in 0..steps {
        psi = step_cn(&psi, &v, &p, t_end / steps as f64).unwrap();
    }
    // norm exactly preserved by the factored Cayley steps
    assert!((psi.check_normalization() - 1.0).abs() < 1e-10);
    // phase advances at E = 2·π²/2 (two axes)
    let mid = grid.index(32, 32);
    let e_measured = -(psi.values()[mid] / psi0.values()[mid]).arg() / t_end;
    assert!((e_measured - core::f64::consts::PI.powi(2)).abs() < 2e-3, "E = {e_measured}");
}

#[test]
fn energy_functional_known_values() {
    let p = natural();
    // harmonic ground state: H = ħω/2
    let grid = periodic_line(512, 12.0);
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    let psi = ho_ground_psi(&grid, 1.0);
    let e = energy_functional(&psi, &v, &p);
    assert!((e.total - 0.5).abs() < 1e-6, "H = {}", e.total);

    // free real Gaussian: H = ħ²/8mσ₀² = 0.125
    let vfree = Potential::free().values(&grid, &p);
    let g = gaussian_psi(&grid, 1.0, 0.0);
    let e = energy_functional(&g, &vfree, &p);
    assert!((e.total - 0.125).abs() < 1e-6, "H = {}", e.total);
    assert!(e.potential.abs() < 1e-12);

    // plane wave k = 2: H = ħ²k²/2m = 2
    let grid2 = periodic_line(256, 2.0 * core::f64::consts::PI);
    let v2 = Potential::free().values(&grid2, &p);
    let (pw, _) = plane_wave_psi(&grid2, 2.0);
    let e = energy_functional(&pw, &v2, &p);
    assert!((e.total - 2.0).abs() < 1e-9, "H = {}", e.total);
}

#[test]
fn variational_identity_on_eigenstate_and_random_state() {
    let grid = periodic_line(256, 12.0);
    let p = natural();
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    let psi = ground_state(&grid, &v, &p, 1.0, 1e-3, 1e-10, 200_000).unwrap();
    let rep = variational_residual(&psi, &v, &p, 1e-3).unwrap();
    assert!(rep.residual < 1e-6, "residual {}", rep.residual);
    assert!(rep.gradient_mismatch < 1e-6, "gradient mismatch {}", rep.gradient_mismatch);

    // smooth non-eigenstate built from a handful of modes
    let mut f = ComplexField::from_fn(grid.clone(), |x, _| {
        C64::new(
            (-(x * x) / 6.0).exp() * (1.0 + 0.3 * (0.52 * x).sin()),
            0.2 * (-(x * x) / 8.0).exp() * (1.05 * x).cos(),
        )
    });
    let n = f.norm_sq_integral().sqrt();
    for c in f.data_mut() {
        *c /= n;
    }
    let rep = variational_residual(&WaveField::new(f, 1.0), &v, &p, 1e-4).unwrap();
    assert!(rep.gradient_mismatch < 1e-6, "gradient mismatch {}", rep.gradient_mismatch);
}

#[test]
fn variational_residual_is_second_order_in_the_probe_step() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let v = Potential::free().values(&grid, &p);
    let psi = gaussian_psi(&grid, 1.0, 0.0);
    let r1 = variational_residual(&psi, &v, &p, 2e-3).unwrap().residual;
    let r2 = variational_residual(&psi, &v, &p, 1e-3).unwrap().residual;
    let order = (r1 / r2).log2();
    assert!(order > 1.8 && order < 2.2, "observed order {order}");
}

#[test]
fn unitarity_energy_and_momentum_are_conserved() {
    let p = natural();
    // norm under 1000 split steps
    let grid = periodic_line(256, 12.0);
    let v = Potential::harmonic(1.0).unwrap().values(&grid, &p);
    let psi0 = ho_ground_psi(&grid, 1.0);
    let mut psi = psi0.clone();
    for _ in 0..1000 {
        psi = step_split(&psi, &v, &p, 1e-3).unwrap();
    }
    assert!((psi.check_normalization() - 1.0).abs() < 1e-10);

    // energy over t = 1 of harmonic evolution (displaced packet)
    let coh = gaussian_psi(&grid, (0.5f64).sqrt(), 0.5);
    let e0 = energy_functional(&coh, &v, &p).total;
    let mut psi = coh;
    for _ in 0..2000 {
        psi = step_split(&psi, &v, &p, 5e-4).unwrap();
    }
    let e1 = energy_functional(&psi, &v, &p).total;
    assert!((e1 - e0).abs() / e0.abs() < 1e-6, "ΔH/H = {}", (e1 - e0) / e0);

    // momentum over free evolution of a boosted packet
    let grid = periodic_line(512, 16.0);
    let vfree = Potential::free().values(&grid, &p);
    let mut psi = boosted_gaussian_psi(&grid, 1.0, 0.7, 1.0);
    let ptot = |psi: &WaveField| {
        let b = wave_bilinears(psi);
        0.5 * p.hbar * b[0].1.data().iter().sum::<f64>() * psi.grid().cell_volume()
    };
    let p0 = ptot(&psi);
    for _ in 0..1000 {
        psi = step_split(&psi, &vfree, &p, 1e-3).unwrap();
    }
    let p1 = ptot(&psi);
    assert!((p0 - 0.7).abs() < 1e-6);
    assert!((p1 - p0).abs() < 1e-6, "ΔP = {}", p1 - p0);
}

#[test]
fn split_step_and_crank_nicolson_agree_on_a_resolved_problem() {
    let grid = periodic_line(1024, 10.0);
    let p = natural();
    let v = Potential::free().values(&grid, &p);
    let psi0 = gaussian_psi(&grid, 1.0, 0.0);
    let dt = 1e-4;
    let steps = 5000;
    let mut a = psi0.clone();
    let mut b = psi0;
    for _ in 0..steps {
        a = step_split(&a, &v, &p, dt).unwrap();
        b = step_cn(&b, &v, &p, dt).unwrap();
    }
    let d = a.field.l2_distance(&b.field);
    assert!(d < 1e-5, "L2 distance {d}");
}
