use alloc::format;

use crate::error::CoreError;

/// Physical constants of a run: the total-system pair (ħ, m), the monad
/// count N, and the derived per-monad constants η = ħ/N, μ = m/N.
///
/// All solver and diagnostic code works with (ħ, m); η and μ exist so that
/// per-monad quantities can be produced on demand. Totals are therefore
/// invariant under changes of N at fixed ħ, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub hbar: f64,
    pub mass: f64,
    pub n_monads: f64,
    /// Trap frequency, for harmonic scenarios.
    pub omega: Option<f64>,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, n_monads: f64) -> Result<Self, CoreError> {
        if !(hbar > 0.0) || !(mass > 0.0) {
            return Err(CoreError::Config(format!(
                "hbar and mass must be positive (got hbar={hbar}, mass={mass})"
            )));
        }
        if !(n_monads >= 1.0) {
            return Err(CoreError::Config(format!(
                "n_monads must be >= 1 (got {n_monads})"
            )));
        }
        Ok(Self { hbar, mass, n_monads, omega: None })
    }

    /// ħ = m = N = 1.
    pub fn natural() -> Self {
        Self { hbar: 1.0, mass: 1.0, n_monads: 1.0, omega: None }
    }

    pub fn with_omega(mut self, omega: f64) -> Result<Self, CoreError> {
        if !(omega > 0.0) {
            return Err(CoreError::Config(format!("omega must be positive (got {omega})")));
        }
        self.omega = Some(omega);
        Ok(self)
    }

    /// Per-monad action constant η = ħ/N.
    pub fn eta(&self) -> f64 {
        self.hbar / self.n_monads
    }

    /// Per-monad mass μ = m/N.
    pub fn mu(&self) -> f64 {
        self.mass / self.n_monads
    }
}
