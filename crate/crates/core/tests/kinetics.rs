//! Monad-ensemble checks: sampling fidelity (moments and goodness of fit),
//! moment estimation, transport conservation, the BGK collision invariants
//! and its relaxation toward a Gaussian, the Monte-Carlo convergence rate,
//! and the three-way velocity-moment identity.

mod common;

use common::*;
use madelung_core::kinetics::{
    bgk_collide, estimate_moments, identity_check, position_observable_means, push_particles,
    sample_ensemble, scale_moments_by_mass, MonadEnsemble,
};
use madelung_core::schrodinger::Potential;
use madelung_core::stats::{chi_squared_test, ks_two_sample};
use madelung_core::transform::hydro_from_psi;
use madelung_core::{Boundary, Grid};

#[test]
fn sampled_velocity_spread_matches_the_internal_energy() {
    // ε = 0.125 for the unit Gaussian, so per-axis variance 2ε/m = 0.25
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 100_000, 7).unwrap();
    let n = ens.count() as f64;
    let mean = ens.velocities.iter().map(|v| v[0]).sum::<f64>() / n;
    let var = ens.velocities.iter().map(|v| (v[0] - mean) * (v[0] - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    assert!((std - 0.5).abs() < 0.005, "velocity stddev {std}");
    assert!(mean.abs() < 0.01);
}

#[test]
fn plane_wave_monads_move_at_exactly_the_phase_velocity() {
    let grid = periodic_line(256, 2.0 * core::f64::consts::PI);
    let p = natural();
    let (pw, _) = plane_wave_psi(&grid, 2.0);
    let h = hydro_from_psi(&pw, &p);
    let ens = sample_ensemble(&h, &p, 2000, 3).unwrap();
    for v in &ens.velocities {
        // no statistical spread at all: every monad carries u(x) = 2
        assert!((v[0] - 2.0).abs() < 1e-12, "v = {}", v[0]);
    }
}

#[test]
fn position_histogram_fits_the_generating_density() {
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let count = 100_000usize;
    let ens = sample_ensemble(&h, &p, count, 12345).unwrap();
    let bins = 50usize;
    let l = grid.length(0);
    let width = l / bins as f64;
    let mut observed = vec![0.0f64; bins];
    for pnt in &ens.positions {
        let b = (((pnt[0] + 0.5 * l) / width).floor() as usize).min(bins - 1);
        observed[b] += 1.0;
    }
    // expected counts from the sampler's own distribution: piecewise-uniform
    // mass ρ_i·w within each grid cell, integrated over the bin
    let dx = grid.cell_volume();
    let mass_in = |a: f64, b: f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..grid.node_count() {
            let lo = (grid.coord(0, i) - 0.5 * dx).max(a);
            let hi = (grid.coord(0, i) + 0.5 * dx).min(b);
            if hi > lo {
                acc += h.rho.data()[i] * (hi - lo);
            }
        }
        acc
    };
    let total = mass_in(-0.5 * l, 0.5 * l);
    let expected: Vec<f64> = (0..bins)
        .map(|b| {
            let a = -0.5 * l + b as f64 * width;
            mass_in(a, a + width) / total * count as f64
        })
        .collect();
    let (chi2, pval) = chi_squared_test(&observed, &expected, 5.0);
    assert!(pval > 0.001, "χ² = {chi2}, p = {pval}");
}

#[test]
fn moment_estimates_recover_the_generating_fields() {
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 100_000, 99).unwrap();
    let m = scale_moments_by_mass(estimate_moments(&ens, &grid, 32).unwrap(), &p);
    // central bins: ε̂ ≈ 0.125, ĥ ≈ 0 within noise
    for b in 12..20 {
        assert!(m.count[b] > 1000, "bin {b} has {} members", m.count[b]);
        let d = (m.eps_hat[b] - 0.125).abs();
        assert!(d < 3.0 * m.eps_stderr[b] + 1e-12, "ε̂[{b}] = {} ± {}", m.eps_hat[b], m.eps_stderr[b]);
        assert!(
            m.heat_hat[b].abs() < 3.0 * m.heat_stderr[b] + 1e-12,
            "ĥ[{b}] = {} ± {}",
            m.heat_hat[b],
            m.heat_stderr[b]
        );
    }
    // density profile against ρ at the bin centers
    for b in 8..24 {
        let x = 0.5 * (m.edges[b] + m.edges[b + 1]);
        let rho = (-(x * x) / 2.0).exp() / SQRT_2PI;
        let d = (m.rho_hat[b] - rho).abs();
        assert!(d < 4.0 * m.rho_stderr[b] + 1e-3, "ρ̂[{b}] = {} vs {rho}", m.rho_hat[b]);
    }
}

#[test]
fn zero_variance_ensemble_has_exactly_zero_stress_and_heat() {
    let grid = periodic_line(256, 2.0 * core::f64::consts::PI);
    let p = natural();
    let (pw, _) = plane_wave_psi(&grid, 2.0);
    let h = hydro_from_psi(&pw, &p);
    let ens = sample_ensemble(&h, &p, 5000, 5).unwrap();
    let m = estimate_moments(&ens, &grid, 16).unwrap();
    for b in 0..16 {
        if m.count[b] > 1 {
            assert!(m.sigma_hat[b].abs() < 1e-12, "σ̂ = {}", m.sigma_hat[b]);
            assert!(m.heat_hat[b].abs() < 1e-18, "ĥ = {}", m.heat_hat[b]);
        }
    }
}

#[test]
fn free_streaming_is_exact() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 2000, 8).unwrap();
    let dt = 0.125;
    let pushed = push_particles(&ens, &Potential::free(), &grid, &p, dt).unwrap();
    for i in 0..ens.count() {
        assert_eq!(pushed.velocities[i], ens.velocities[i]);
        let expect = ens.positions[i][0] + dt * ens.velocities[i][0];
        // up to the periodic wrap
        let d = (pushed.positions[i][0] - expect).abs();
        assert!(d < 1e-12 || (d - 16.0).abs() < 1e-12);
    }
}

#[test]
fn harmonic_orbit_closes_after_one_period() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let pot = Potential::harmonic(1.0).unwrap();
    let mut ens = MonadEnsemble {
        positions: vec![[1.0, 0.0]],
        velocities: vec![[0.0, 0.0]],
        dim: 1,
        seed: 0,
        weight: 1.0,
        rng_epoch: 0,
    };
    let steps = 6283usize;
    let dt = 2.0 * core::f64::consts::PI / steps as f64;
    for _ in 0..steps {
        ens = push_particles(&ens, &pot, &grid, &p, dt).unwrap();
    }
    let (x, v) = (ens.positions[0][0], ens.velocities[0][0]);
    assert!((x - 1.0).abs() < 1e-4, "x(T) = {x}");
    assert!(v.abs() < 1e-4, "v(T) = {v}");
}

#[test]
fn free_transport_conserves_momentum_and_energy_exactly() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 100_000, 21).unwrap();
    let sums = |e: &MonadEnsemble| {
        let mom: f64 = e.velocities.iter().map(|v| v[0]).sum();
        let ke: f64 = e.velocities.iter().map(|v| v[0] * v[0]).sum();
        (mom, ke)
    };
    let (p0, k0) = sums(&ens);
    let mut moved = ens;
    for _ in 0..100 {
        moved = push_particles(&moved, &Potential::free(), &grid, &p, 1e-2).unwrap();
    }
    let (p1, k1) = sums(&moved);
    assert!((p1 - p0).abs() <= 1e-12 * p0.abs().max(1.0));
    assert!((k1 - k0).abs() <= 1e-12 * k0);
}

#[test]
fn velocity_marginal_survives_free_transport() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 100_000, 31).unwrap();
    let mut moved = ens.clone();
    for _ in 0..10 {
        moved = push_particles(&moved, &Potential::free(), &grid, &p, 0.05).unwrap();
    }
    let before: Vec<f64> = ens.velocities.iter().map(|v| v[0]).collect();
    let after: Vec<f64> = moved.velocities.iter().map(|v| v[0]).collect();
    let (_, pval) = ks_two_sample(&before, &after);
    assert!(pval > 0.001, "KS p = {pval}");
}

#[test]
fn bgk_restores_cell_invariants_exactly() {
    let grid = periodic_line(256, 16.0);
    // two monads in one cell with velocities {1, 3}
    let ens = MonadEnsemble {
        positions: vec![[0.001, 0.0], [0.002, 0.0]],
        velocities: vec![[1.0, 0.0], [3.0, 0.0]],
        dim: 1,
        seed: 17,
        weight: 1.0,
        rng_epoch: 0,
    };
    let out = bgk_collide(&ens, &grid, 1.0, 0.5).unwrap();
    let sum: f64 = out.velocities.iter().map(|v| v[0]).sum();
    let sum_sq: f64 = out.velocities.iter().map(|v| v[0] * v[0]).sum();
    assert!((sum - 4.0).abs() < 1e-12, "Σv = {sum}");
    assert!((sum_sq - 10.0).abs() < 1e-12, "Σv² = {sum_sq}");
}

#[test]
fn infinite_relaxation_time_leaves_the_ensemble_unchanged() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 5000, 41).unwrap();
    let out = bgk_collide(&ens, &grid, 1e-2, 1e30).unwrap();
    assert_eq!(out.velocities, ens.velocities);
    assert_eq!(out.positions, ens.positions);
}

#[test]
fn bgk_relaxes_a_bimodal_cell_toward_a_gaussian() {
    // all monads in one cell with velocities ±2; after many collision
    // passes the kurtosis goes to the Gaussian value 3 while the mean and
    // energy stay pinned at 0 and 4
    let grid = periodic_line(256, 16.0);
    let count = 40_000usize;
    let mut ens = MonadEnsemble {
        positions: vec![[0.01, 0.0]; count],
        velocities: (0..count)
            .map(|i| [if i % 2 == 0 { 2.0 } else { -2.0 }, 0.0])
            .collect(),
        dim: 1,
        seed: 4242,
        weight: 1.0,
        rng_epoch: 0,
    };
    for _ in 0..40 {
        ens = bgk_collide(&ens, &grid, 1.0, 1.0).unwrap();
    }
    let n = count as f64;
    let mean: f64 = ens.velocities.iter().map(|v| v[0]).sum::<f64>() / n;
    let m2: f64 = ens.velocities.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / n;
    let m4: f64 = ens.velocities.iter().map(|v| (v[0] - mean).powi(4)).sum::<f64>() / n;
    let kurt = m4 / (m2 * m2);
    let energy: f64 = ens.velocities.iter().map(|v| v[0] * v[0]).sum::<f64>() / n;
    assert!(mean.abs() < 1e-12, "mean pinned by the invariant restoration");
    assert!((energy - 4.0).abs() < 1e-12 * 4.0, "⟨v²⟩ = {energy}");
    assert!((kurt - 3.0).abs() < 0.15, "kurtosis {kurt}");
}

#[test]
fn monte_carlo_error_halves_when_count_quadruples() {
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let bins = 32usize;
    let l2_err = |count: usize, seed: u64| {
        let ens = sample_ensemble(&h, &p, count, seed).unwrap();
        let m = estimate_moments(&ens, &grid, bins).unwrap();
        let mut acc = 0.0;
        for b in 0..bins {
            let x = 0.5 * (m.edges[b] + m.edges[b + 1]);
            let rho = (-(x * x) / 2.0).exp() / SQRT_2PI;
            let d = m.rho_hat[b] - rho;
            acc += d * d;
        }
        acc.sqrt()
    };
    // average a few independent replicates so the ratio is stable
    let avg = |count: usize| -> f64 {
        (0..4).map(|s| l2_err(count, 1000 + s)).sum::<f64>() / 4.0
    };
    let e1 = avg(25_000);
    let e2 = avg(100_000);
    let ratio = e2 / e1;
    assert!(
        (0.35..=0.65).contains(&ratio),
        "error ratio {ratio} (errors {e1:.3e} -> {e2:.3e})"
    );
}

#[test]
fn velocity_moment_identity_three_ways() {
    let p = natural();
    let grid = periodic_line(512, 16.0);

    // boosted Gaussian, l = 1: all sides 0.7
    let h = hydro_from_psi(&boosted_gaussian_psi(&grid, 1.0, 0.7, 1.0), &p);
    let c = identity_check(&h, &p, 1, 100_000, 11).unwrap();
    assert!((c.moment_side - 0.7).abs() < 1e-9, "moment {}", c.moment_side);
    assert!((c.operator_side - 0.7).abs() < 1e-9, "operator {}", c.operator_side);
    assert!((c.mc_side - 0.7).abs() < 3.0 * c.mc_stderr, "mc {} ± {}", c.mc_side, c.mc_stderr);

    // real Gaussian, l = 2: ⟨v²⟩ = 2ε/m = 0.25
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let c = identity_check(&h, &p, 2, 100_000, 13).unwrap();
    assert!((c.moment_side - 0.25).abs() < 1e-8, "moment {}", c.moment_side);
    assert!((c.operator_side - 0.25).abs() < 1e-8, "operator {}", c.operator_side);
    assert!((c.moment_side - c.operator_side).abs() < 1e-8 * 0.25);
    assert!((c.mc_side - 0.25).abs() < 3.0 * c.mc_stderr);

    // plane wave, l = 2: both sides k² = 4 to quadrature precision
    let grid = periodic_line(256, 2.0 * core::f64::consts::PI);
    let (pw, _) = plane_wave_psi(&grid, 2.0);
    let h = hydro_from_psi(&pw, &p);
    let c = identity_check(&h, &p, 2, 10_000, 17).unwrap();
    assert!((c.moment_side - 4.0).abs() < 1e-10);
    assert!((c.operator_side - 4.0).abs() < 1e-10);
}

#[test]
fn position_observable_means_agree_between_routes() {
    let grid = periodic_line(512, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    let ens = sample_ensemble(&h, &p, 100_000, 23).unwrap();
    let (mc, stderr, quad) = position_observable_means(&h, &ens, |x, _| x * x);
    assert!((quad - 1.0).abs() < 1e-6, "⟨x²⟩ by quadrature = {quad}");
    assert!((mc - quad).abs() < 3.0 * stderr, "mc {mc} ± {stderr} vs {quad}");
}

#[test]
fn sampling_preconditions() {
    let grid = periodic_line(256, 16.0);
    let p = natural();
    let h = hydro_from_psi(&gaussian_psi(&grid, 1.0, 0.0), &p);
    assert!(sample_ensemble(&h, &p, 100, 1).is_err());
    let ens = sample_ensemble(&h, &p, 2000, 1).unwrap();
    assert!(estimate_moments(&ens, &grid, 8).is_err());
}

#[test]
fn two_dimensional_rejection_sampling_matches_the_density() {
    let grid = Grid::square(64, 12.0, Boundary::Periodic).unwrap();
    let p = natural();
    let psi = gaussian_psi_2d(&grid, 1.0);
    let h = hydro_from_psi(&psi, &p);
    let ens = sample_ensemble(&h, &p, 50_000, 77).unwrap();
    // radial second moment of the positions: ⟨r²⟩ = 2σ² = 2
    let n = ens.count() as f64;
    let r2 = ens.positions.iter().map(|q| q[0] * q[0] + q[1] * q[1]).sum::<f64>() / n;
    assert!((r2 - 2.0).abs() < 0.05, "⟨r²⟩ = {r2}");
}
