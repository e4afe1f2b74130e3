//! Initial states and potentials of the built-in scenarios. Localized
//! states are periodized (wrap images summed) so that every field the
//! spectral solvers touch is smooth on the torus.

use madelung_core::schrodinger::{ground_state, Potential};
use madelung_core::{ComplexField, Grid, PhysicalParams, ScalarField, WaveField, C64};

use crate::config::{ConfigError, Scenario, ScenarioConfig};

pub struct Prepared {
    pub grid: Grid,
    pub params: PhysicalParams,
    pub potential: Potential,
    pub potential_values: ScalarField,
    pub psi0: WaveField,
}

pub fn prepare(cfg: &ScenarioConfig) -> Result<Prepared, ConfigError> {
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let potential = match cfg.scenario {
        Scenario::FreeGaussian | Scenario::PlaneWave | Scenario::Vortex2d => Potential::free(),
        Scenario::HarmonicGround | Scenario::HarmonicCoherent => {
            Potential::harmonic(cfg.omega).map_err(|e| ConfigError(e.to_string()))?
        }
        Scenario::BoxEigenstate => Potential::well(),
    };
    let potential_values = potential.values(&grid, &params);
    let psi0 = match cfg.scenario {
        Scenario::FreeGaussian => gaussian(&grid, cfg.sigma0, 0.0),
        Scenario::PlaneWave => plane_wave(&grid, cfg.k_wave),
        Scenario::HarmonicGround => {
            // imaginary-time preparation: the discrete stationary state
            ground_state(&grid, &potential_values, &params, 1.0, 1e-3, 1e-10, 200_000)
                .map_err(|e| ConfigError(e.to_string()))?
        }
        Scenario::HarmonicCoherent => {
            let sigma = (0.5 * params.hbar / (params.mass * cfg.omega)).sqrt();
            gaussian(&grid, sigma, cfg.x0)
        }
        Scenario::BoxEigenstate => well_eigenstate(&grid, cfg.level),
        Scenario::Vortex2d => vortex(&grid, cfg.winding, cfg.sigma0),
    };
    Ok(Prepared { grid, params, potential, potential_values, psi0 })
}

/// Real Gaussian of density width σ centered at `x0`, periodized.
pub fn gaussian(grid: &Grid, sigma: f64, x0: f64) -> WaveField {
    let l = grid.length(0);
    let mut rho = ScalarField::from_fn(grid.clone(), |x, _| {
        let mut v = 0.0;
        for s in [-1.0, 0.0, 1.0] {
            let d = x - x0 - s * l;
            v += (-d * d / (2.0 * sigma * sigma)).exp();
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

pub fn plane_wave(grid: &Grid, k: f64) -> WaveField {
    let l = grid.length(0);
    let amp = 1.0 / l.sqrt();
    let psi = ComplexField::from_fn(grid.clone(), |x, _| C64::from_polar(amp, k * x));
    WaveField::new(psi, 1.0)
}

pub fn well_eigenstate(grid: &Grid, level: u32) -> WaveField {
    let l = grid.length(0);
    let mut psi = ComplexField::from_fn(grid.clone(), |x, _| {
        C64::new(((x + 0.5 * l) * std::f64::consts::PI * level as f64 / l).sin(), 0.0)
    });
    let norm = psi.norm_sq_integral().sqrt();
    for v in psi.data_mut() {
        *v /= norm;
    }
    WaveField::new(psi, 1.0)
}

/// ψ ∝ (x+iy)^j e^{-r²/2σ²}: winding number j around the origin.
pub fn vortex(grid: &Grid, j: i64, sigma: f64) -> WaveField {
    let mut psi = ComplexField::from_fn(grid.clone(), |x, y| {
        let w = C64::new(x, y);
        let mut amp = C64::new(1.0, 0.0);
        for _ in 0..j.unsigned_abs() {
            amp *= if j >= 0 { w } else { w.conj() };
        }
        amp * (-(x * x + y * y) / (2.0 * sigma * sigma)).exp()
    });
    let norm = psi.norm_sq_integral().sqrt();
    for v in psi.data_mut() {
        *v /= norm;
    }
    WaveField::new(psi, 1.0)
}
