//! State builders shared by the integration tests. Localized states are
//! periodized (wrap images summed) so every field is smooth on the torus.

// not every test binary uses every builder
#![allow(dead_code)]

use madelung_core::{Boundary, ComplexField, Grid, PhysicalParams, ScalarField, WaveField, C64};

pub const SQRT_2PI: f64 = 2.5066282746310002;

/// Normalized Gaussian density with the given σ, periodized.
pub fn gaussian_rho(grid: &Grid, sigma: f64, center: f64) -> ScalarField {
    let l = grid.length(0);
    let mut rho = ScalarField::from_fn(grid.clone(), |x, _| {
        let mut v = 0.0;
        for s in [-1.0, 0.0, 1.0] {
            let d = x - center - s * l;
            v += (-d * d / (2.0 * sigma * sigma)).exp();
        }
        v / (sigma * SQRT_2PI)
    });
    let norm = rho.integrate();
    for v in rho.data_mut() {
        *v /= norm;
    }
    rho
}

/// Real Gaussian wavefunction ψ = √ρ (σ in the density sense).
pub fn gaussian_psi(grid: &Grid, sigma: f64, center: f64) -> WaveField {
    let rho = gaussian_rho(grid, sigma, center);
    let values: Vec<C64> = rho.data().iter().map(|r| C64::new(r.sqrt(), 0.0)).collect();
    WaveField::new(ComplexField::new(grid.clone(), values), 1.0)
}

/// Gaussian with a linear phase boost S = p0·x.
pub fn boosted_gaussian_psi(grid: &Grid, sigma: f64, p0: f64, hbar: f64) -> WaveField {
    let rho = gaussian_rho(grid, sigma, 0.0);
    let values: Vec<C64> = rho
        .data()
        .iter()
        .enumerate()
        .map(|(i, r)| C64::from_polar(r.sqrt(), p0 * grid.coord(0, i) / hbar))
        .collect();
    WaveField::new(ComplexField::new(grid.clone(), values), 1.0)
}

/// Plane wave with integer mode number chosen so that its wavenumber is
/// nearest to `k_want`.
pub fn plane_wave_psi(grid: &Grid, k_want: f64) -> (WaveField, f64) {
    let l = grid.length(0);
    let mode = (k_want * l / (2.0 * core::f64::consts::PI)).round();
    let k = 2.0 * core::f64::consts::PI * mode / l;
    let amp = 1.0 / l.sqrt();
    let psi = ComplexField::from_fn(grid.clone(), |x, _| C64::from_polar(amp, k * x));
    (WaveField::new(psi, 1.0), k)
}

/// Analytic harmonic-oscillator ground state for ω (ħ = m = 1), periodized.
pub fn ho_ground_psi(grid: &Grid, omega: f64) -> WaveField {
    let sigma = (0.5 / omega).sqrt(); // density σ² = ħ/(2mω)
    gaussian_psi(grid, sigma, 0.0)
}

/// 2-D vortex ψ ∝ (x+iy)^j e^{-r²/(2σ²)} of winding j ≥ 0.
pub fn vortex_psi(grid: &Grid, j: u32, sigma: f64) -> WaveField {
    let mut psi = ComplexField::from_fn(grid.clone(), |x, y| {
        let w = C64::new(x, y);
        let mut amp = C64::new(1.0, 0.0);
        for _ in 0..j {
            amp *= w;
        }
        amp * (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
    });
    let norm = psi.norm_sq_integral().sqrt();
    for v in psi.data_mut() {
        *v /= norm;
    }
    WaveField::new(psi, 1.0)
}

/// Real isotropic 2-D Gaussian wavefunction with amplitude width √2·σ_ρ,
/// periodized over the 3×3 neighbouring images.
pub fn gaussian_psi_2d(grid: &Grid, sigma: f64) -> WaveField {
    let (l0, l1) = (grid.length(0), grid.length(1));
    let mut rho = ScalarField::from_fn(grid.clone(), |x, y| {
        let mut v = 0.0;
        for sx in [-1.0, 0.0, 1.0] {
            for sy in [-1.0, 0.0, 1.0] {
                let dx = x - sx * l0;
                let dy = y - sy * l1;
                v += (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
        }
        v
    });
    let norm = rho.integrate();
    for v in rho.data_mut() {
        *v /= norm;
    }
    let values: Vec<C64> = rho.data().iter().map(|r| C64::new(r.sqrt(), 0.0)).collect();
    WaveField::new(ComplexField::new(grid.clone(), values), 1.0)
}

pub fn natural() -> PhysicalParams {
    PhysicalParams::natural()
}

pub fn periodic_line(n: usize, l: f64) -> Grid {
    Grid::line(n, l, Boundary::Periodic).unwrap()
}

/// ⟨x²⟩ - ⟨x⟩² of |ψ|².
pub fn position_variance(psi: &WaveField) -> f64 {
    let grid = psi.grid();
    let w = grid.cell_volume();
    let norm = psi.check_normalization();
    let mut mean = 0.0;
    let mut mean_sq = 0.0;
    for (i, v) in psi.values().iter().enumerate() {
        let r = v.norm_sqr();
        let x = grid.coord(0, grid.unindex(i).0);
        mean += x * r * w;
        mean_sq += x * x * r * w;
    }
    mean /= norm;
    mean_sq /= norm;
    mean_sq - mean * mean
}
