//! Exact transformations between the three equivalent descriptions of the
//! state: the wavefunction ψ, the hydrodynamic pair (ρ, S) with ξ = ln ρ and
//! u = ∇S/m, and the complex log-field Ω = ξ/2 + iS/η.
//!
//! Phase is extracted by accumulating wrapped nearest-neighbour differences
//! along axis sweeps. In 2-D the sweeps also record the winding number of
//! every closed grid loop; states with nonzero winding keep S as wrapped
//! phase (a single-valued unwrapped S does not exist there).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::deriv::derivative_complex;
use crate::field::{ComplexField, ScalarField, WaveField};
use crate::grid::{Boundary, Grid};
use crate::params::PhysicalParams;
use crate::{C64, RHO_FLOOR};

/// Winding numbers of the non-contractible grid loops of a periodic 2-D
/// state: entry `i` of `along_axis0` is the phase winding of the loop that
/// sweeps axis 0 at fixed second index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Windings {
    pub along_axis0: Vec<i64>,
    pub along_axis1: Vec<i64>,
}

impl Windings {
    pub fn any_nonzero(&self) -> bool {
        self.along_axis0.iter().chain(self.along_axis1.iter()).any(|w| *w != 0)
    }
}

/// Hydrodynamic representation: density, action, log-density, velocity.
///
/// Everything is stored in the total convention (ħ, m): `u = ∇S/m`, the
/// density integrates to `norm_target`. Nodes with ρ below [`RHO_FLOOR`]
/// are flagged; ξ is clamped and phase/velocity are interpolated across
/// them from their neighbours.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroState {
    pub rho: ScalarField,
    pub s: ScalarField,
    pub xi: ScalarField,
    pub u: Vec<ScalarField>,
    /// Sorted indices of sub-floor (low-confidence) nodes.
    pub flagged: Vec<usize>,
    /// Loop winding numbers (periodic 2-D only).
    pub windings: Option<Windings>,
    /// Phase winding of the straight torus cycle along each axis. Nonzero
    /// for plane-wave-like tilts: S then carries a linear ramp of slope
    /// 2πħ·w/L on top of a periodic part, and differentiation must split
    /// the ramp off first.
    pub cycle_winding: [i64; 2],
    /// True when S holds wrapped phase × ħ because unwrapping is impossible.
    pub s_is_wrapped: bool,
    pub norm_target: f64,
}

impl HydroState {
    pub fn grid(&self) -> &Grid {
        self.rho.grid()
    }

    /// ∫ρ dx; the caller compares with `norm_target`.
    pub fn check_normalization(&self) -> f64 {
        self.rho.integrate()
    }
}

/// The complex scalar field Ω = ξ/2 + iS/η. `exp(Ω)` has |exp Ω|² = ρ, so
/// ∫|exp Ω|² dx = norm_target independently of the per-monad constant η.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaField {
    pub field: ComplexField,
    pub flagged: Vec<usize>,
    /// See [`HydroState::cycle_winding`]; Im Ω carries the same ramp.
    pub cycle_winding: [i64; 2],
    /// Im Ω is wrapped phase (vortex states); such fields can be
    /// represented and inverted but not evolved in this chart.
    pub s_is_wrapped: bool,
    pub norm_target: f64,
}

impl OmegaField {
    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    /// ∫|exp Ω|² dx.
    pub fn check_normalization(&self) -> f64 {
        self.field.map(|v| (2.0 * v.re).exp()).integrate()
    }
}

/// Wrap an angle difference into (-π, π].
fn wrap_angle(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

/// Current-style bilinears of ψ: per axis, the pair
/// `(2 Re(ψ̄ ∂ψ), 2 Im(ψ̄ ∂ψ))` — discretely exact stand-ins for ∇ρ and
/// 2ρ∇S/ħ, chosen so that ħ²|∂ψ|² = ħ²(∇ρ)²/(4ρ) + (ρ∇S)²/ρ holds
/// pointwise by construction. Every energy and uncertainty diagnostic is
/// built from these primitives, which is what makes the classical/internal
/// splits close as identities instead of approximations.
pub fn wave_bilinears(psi: &WaveField) -> Vec<(ScalarField, ScalarField)> {
    let dim = psi.grid().dim();
    let mut out = Vec::with_capacity(dim);
    for axis in 0..dim {
        let dpsi = derivative_complex(&psi.field, axis, 1).expect("first derivative");
        let re = psi.field.zip_map(&dpsi, |p, dp| 2.0 * (p.conj() * dp).re);
        let im = psi.field.zip_map(&dpsi, |p, dp| 2.0 * (p.conj() * dp).im);
        out.push((re, im));
    }
    out
}

/// Extracts (ρ, S, ξ, u) from ψ.
pub fn hydro_from_psi(psi: &WaveField, params: &PhysicalParams) -> HydroState {
    let grid = psi.grid().clone();
    let rho = ScalarField::new(grid.clone(), psi.values().iter().map(|v| v.norm_sqr()).collect());
    let flagged: Vec<usize> = rho
        .data()
        .iter()
        .enumerate()
        .filter(|(_, r)| **r < RHO_FLOOR)
        .map(|(i, _)| i)
        .collect();
    let mask: Vec<bool> = rho.data().iter().map(|r| *r < RHO_FLOOR).collect();

    let xi = ScalarField::new(
        grid.clone(),
        rho.data().iter().map(|r| r.max(RHO_FLOOR).ln()).collect(),
    );

    // wrapped phase, with flagged nodes filled from neighbours
    let mut theta: Vec<f64> = psi.values().iter().map(|v| v.arg()).collect();
    interpolate_masked(&grid, &mut theta, &mask);

    let (s_data, windings, s_is_wrapped) = unwrap_phase(&grid, &theta);
    let hbar = params.hbar;
    let s = ScalarField::new(grid.clone(), s_data.iter().map(|t| hbar * t).collect());
    let cycle_winding = cycle_windings(&grid, &theta, windings.as_ref());

    // velocity from the probability current: u_k = (ħ/m) Im(ψ̄ ∂_k ψ)/ρ,
    // well-defined independently of any winding
    let bilin = wave_bilinears(psi);
    let mut u = Vec::with_capacity(grid.dim());
    for (_, im) in &bilin {
        let mut uk: Vec<f64> = im
            .data()
            .iter()
            .zip(rho.data().iter())
            .map(|(b, r)| {
                if *r < RHO_FLOOR {
                    0.0
                } else {
                    0.5 * params.hbar / params.mass * b / r
                }
            })
            .collect();
        interpolate_masked(&grid, &mut uk, &mask);
        u.push(ScalarField::new(grid.clone(), uk));
    }

    HydroState {
        rho,
        s,
        xi,
        u,
        flagged,
        windings,
        cycle_winding,
        s_is_wrapped,
        norm_target: psi.norm_target,
    }
}

/// Winding of the straight cycle along each axis from wrapped phases.
fn cycle_windings(grid: &Grid, theta: &[f64], windings: Option<&Windings>) -> [i64; 2] {
    if grid.boundary() != Boundary::Periodic {
        return [0, 0];
    }
    match grid.dim() {
        1 => {
            let n = grid.points(0);
            let mut acc = 0.0;
            for i in 0..n {
                acc += wrap_angle(theta[(i + 1) % n] - theta[i]);
            }
            [(acc / (2.0 * PI)).round() as i64, 0]
        }
        _ => match windings {
            Some(w) => [
                w.along_axis0.first().copied().unwrap_or(0),
                w.along_axis1.first().copied().unwrap_or(0),
            ],
            None => [0, 0],
        },
    }
}

/// The ansatz ψ = ρ^{1/2} exp(iS/ħ).
pub fn psi_from_hydro(h: &HydroState, params: &PhysicalParams) -> WaveField {
    let values: Vec<C64> = h
        .rho
        .data()
        .iter()
        .zip(h.s.data().iter())
        .map(|(r, s)| C64::from_polar(r.sqrt(), s / params.hbar))
        .collect();
    WaveField::new(ComplexField::new(h.grid().clone(), values), h.norm_target)
}

/// Ω = ξ/2 + iS/η with the per-monad constant η = ħ/N.
pub fn omega_from_hydro(h: &HydroState, params: &PhysicalParams) -> OmegaField {
    let eta = params.eta();
    let values: Vec<C64> = h
        .xi
        .data()
        .iter()
        .zip(h.s.data().iter())
        .map(|(xi, s)| C64::new(0.5 * xi, s / eta))
        .collect();
    OmegaField {
        field: ComplexField::new(h.grid().clone(), values),
        flagged: h.flagged.clone(),
        cycle_winding: h.cycle_winding,
        s_is_wrapped: h.s_is_wrapped,
        norm_target: h.norm_target,
    }
}

/// Inverse of [`omega_from_hydro`]: ξ = 2 Re Ω, S = η Im Ω.
pub fn hydro_from_omega(om: &OmegaField, params: &PhysicalParams) -> HydroState {
    let grid = om.grid().clone();
    let eta = params.eta();
    let xi = om.field.map(|v| 2.0 * v.re);
    let s = om.field.map(|v| eta * v.im);
    let rho = xi.map(|x| x.exp());
    // velocity through the ansatz field built from (ρ, S)
    let psi_vals: Vec<C64> = rho
        .data()
        .iter()
        .zip(s.data().iter())
        .map(|(r, sv)| C64::from_polar(r.sqrt(), sv / params.hbar))
        .collect();
    let psi = WaveField::new(ComplexField::new(grid.clone(), psi_vals), om.norm_target);
    let mut h = hydro_from_psi(&psi, params);
    // keep the exact ξ and S instead of the re-extracted ones
    h.xi = xi;
    h.s = s;
    h.rho = rho;
    h.flagged = om.flagged.clone();
    h.cycle_winding = om.cycle_winding;
    h.norm_target = om.norm_target;
    h
}

/// Unwrap a wrapped-phase field along axis sweeps. Returns the unwrapped
/// values (or the wrapped input when unwrapping is impossible), the loop
/// windings for periodic 2-D grids, and whether the result stayed wrapped.
fn unwrap_phase(grid: &Grid, theta: &[f64]) -> (Vec<f64>, Option<Windings>, bool) {
    match grid.dim() {
        1 => {
            let n = grid.points(0);
            let mut out = vec![0.0; n];
            out[0] = theta[0];
            for i in 1..n {
                out[i] = out[i - 1] + wrap_angle(theta[i] - theta[i - 1]);
            }
            (out, None, false)
        }
        _ => {
            let (n0, n1) = (grid.points(0), grid.points(1));
            let periodic = grid.boundary() == Boundary::Periodic;
            let windings = if periodic {
                let mut w0 = Vec::with_capacity(n1);
                for i1 in 0..n1 {
                    let mut acc = 0.0;
                    for i0 in 0..n0 {
                        let a = theta[grid.index(i0, i1)];
                        let b = theta[grid.index((i0 + 1) % n0, i1)];
                        acc += wrap_angle(b - a);
                    }
                    w0.push((acc / (2.0 * PI)).round() as i64);
                }
                let mut w1 = Vec::with_capacity(n0);
                for i0 in 0..n0 {
                    let mut acc = 0.0;
                    for i1 in 0..n1 {
                        let a = theta[grid.index(i0, i1)];
                        let b = theta[grid.index(i0, (i1 + 1) % n1)];
                        acc += wrap_angle(b - a);
                    }
                    w1.push((acc / (2.0 * PI)).round() as i64);
                }
                Some(Windings { along_axis0: w0, along_axis1: w1 })
            } else {
                None
            };

            // A nonzero circulation around any elementary plaquette means a
            // vortex sits inside it and no single-valued unwrapped S exists.
            // Nonzero windings of the straight torus cycles (plane-wave
            // tilts) do not obstruct the sweep unwrap; they are recorded.
            if has_plaquette_vortex(grid, theta) {
                return (theta.to_vec(), windings, true);
            }

            // sweep: unwrap the first axis-0 line, then every axis-1 line
            let mut out = vec![0.0; n0 * n1];
            out[grid.index(0, 0)] = theta[grid.index(0, 0)];
            for i0 in 1..n0 {
                let prev = grid.index(i0 - 1, 0);
                let here = grid.index(i0, 0);
                out[here] = out[prev] + wrap_angle(theta[here] - theta[prev]);
            }
            for i0 in 0..n0 {
                for i1 in 1..n1 {
                    let prev = grid.index(i0, i1 - 1);
                    let here = grid.index(i0, i1);
                    out[here] = out[prev] + wrap_angle(theta[here] - theta[prev]);
                }
            }
            (out, windings, false)
        }
    }
}

/// True when the wrapped phase winds by ±2π around some elementary cell.
fn has_plaquette_vortex(grid: &Grid, theta: &[f64]) -> bool {
    let (n0, n1) = (grid.points(0), grid.points(1));
    let periodic = grid.boundary() == Boundary::Periodic;
    let (m0, m1) = if periodic { (n0, n1) } else { (n0 - 1, n1 - 1) };
    for i0 in 0..m0 {
        for i1 in 0..m1 {
            let j0 = (i0 + 1) % n0;
            let j1 = (i1 + 1) % n1;
            let a = theta[grid.index(i0, i1)];
            let b = theta[grid.index(j0, i1)];
            let c = theta[grid.index(j0, j1)];
            let d = theta[grid.index(i0, j1)];
            let circ = wrap_angle(b - a) + wrap_angle(c - b) + wrap_angle(d - c)
                + wrap_angle(a - d);
            if circ.abs() > PI {
                return true;
            }
        }
    }
    false
}

/// Replace masked entries by linear interpolation between the nearest
/// unmasked neighbours along axis-0 lines (wrapping on periodic grids).
/// Lines that are entirely masked are left untouched.
pub(crate) fn interpolate_masked(grid: &Grid, values: &mut [f64], mask: &[bool]) {
    if !mask.iter().any(|m| *m) {
        return;
    }
    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    let periodic = grid.boundary() == Boundary::Periodic;
    for i1 in 0..n1 {
        let idx = |i0: usize| i0 * n1 + i1;
        if (0..n0).all(|i0| mask[idx(i0)]) {
            continue;
        }
        for i0 in 0..n0 {
            if !mask[idx(i0)] {
                continue;
            }
            // nearest clear node on each side
            let mut lo = None;
            for step in 1..n0 {
                let j = if periodic {
                    (i0 + n0 - step % n0) % n0
                } else if step <= i0 {
                    i0 - step
                } else {
                    break;
                };
                if !mask[idx(j)] {
                    lo = Some((step, values[idx(j)]));
                    break;
                }
            }
            let mut hi = None;
            for step in 1..n0 {
                let j = if periodic {
                    (i0 + step) % n0
                } else if i0 + step < n0 {
                    i0 + step
                } else {
                    break;
                };
                if !mask[idx(j)] {
                    hi = Some((step, values[idx(j)]));
                    break;
                }
            }
            values[idx(i0)] = match (lo, hi) {
                (Some((dl, vl)), Some((dh, vh))) => {
                    let t = dl as f64 / (dl + dh) as f64;
                    vl + t * (vh - vl)
                }
                (Some((_, vl)), None) => vl,
                (None, Some((_, vh))) => vh,
                (None, None) => values[idx(i0)],
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    fn gaussian_psi(n: usize, len: f64) -> WaveField {
        let g = Grid::line(n, len, Boundary::Periodic).unwrap();
        let psi = ComplexField::from_fn(g, |x, _| {
            C64::new((-(x * x) / 4.0).exp() / (2.0 * PI).powf(0.25), 0.0)
        });
        WaveField::new(psi, 1.0)
    }

    #[test]
    fn real_gaussian_has_zero_phase_and_velocity() {
        let psi = gaussian_psi(512, 16.0);
        let h = hydro_from_psi(&psi, &PhysicalParams::natural());
        assert!(h.s.linf_norm() < 1e-12);
        // u = Im(ψ̄∂ψ)/ρ amplifies spectral round-off by 1/ρ in the far
        // tail; assert where the state carries any weight
        for (i, v) in h.u[0].data().iter().enumerate() {
            if h.rho.data()[i] > 1e-6 {
                assert!(v.abs() < 1e-9, "u={v} at node {i}");
            }
        }
        let sigma_sq: f64 = h
            .rho
            .data()
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let (x, _) = h.grid().position(i);
                x * x * r
            })
            .sum::<f64>()
            * h.grid().cell_volume();
        assert!((sigma_sq - 1.0).abs() < 1e-9, "variance {sigma_sq}");
    }

    #[test]
    fn plane_wave_velocity_and_density() {
        let len = 2.0 * PI;
        let g = Grid::line(128, len, Boundary::Periodic).unwrap();
        let norm = 1.0 / len.sqrt();
        let psi = WaveField::new(
            ComplexField::from_fn(g, |x, _| C64::from_polar(norm, 2.0 * x)),
            1.0,
        );
        let h = hydro_from_psi(&psi, &PhysicalParams::natural());
        for v in h.u[0].data() {
            assert!((v - 2.0).abs() < 1e-10, "{v}");
        }
        for r in h.rho.data() {
            assert!((r - 1.0 / len).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_phase_unwraps_across_branch_cuts() {
        let len = 16.0;
        let g = Grid::line(256, len, Boundary::Periodic).unwrap();
        let psi = WaveField::new(
            ComplexField::from_fn(g, |x, _| {
                C64::from_polar((-(x * x) / 4.0).exp() / (2.0 * PI).powf(0.25), 0.7 * x)
            }),
            1.0,
        );
        let h = hydro_from_psi(&psi, &PhysicalParams::natural());
        // S = 0.7 x + const
        let s0 = h.s.data()[0] - 0.7 * h.grid().coord(0, 0);
        for (i, s) in h.s.data().iter().enumerate() {
            let x = h.grid().coord(0, i);
            assert!((s - 0.7 * x - s0).abs() < 1e-10);
        }
        for (i, v) in h.u[0].data().iter().enumerate() {
            let x = h.grid().coord(0, i);
            if x.abs() <= 3.0 {
                assert!((v - 0.7).abs() < 1e-7, "u={v} at x={x}");
            }
        }
    }

    #[test]
    fn round_trip_psi_hydro_psi() {
        let psi = gaussian_psi(256, 16.0);
        let p = PhysicalParams::natural();
        let h = hydro_from_psi(&psi, &p);
        let back = psi_from_hydro(&h, &p);
        for (a, b) in psi.values().iter().zip(back.values().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn omega_gaussian_real_part() {
        let psi = gaussian_psi(512, 16.0);
        let p = PhysicalParams::natural();
        let h = hydro_from_psi(&psi, &p);
        let om = omega_from_hydro(&h, &p);
        for (i, v) in om.field.data().iter().enumerate() {
            let (x, _) = om.grid().position(i);
            let want = -x * x / 4.0 - 0.25 * (2.0 * PI).ln();
            if h.rho.data()[i] > 1e-12 {
                assert!((v.re - want).abs() < 1e-9, "x={x}: {} vs {want}", v.re);
                assert!(v.im.abs() < 1e-12);
            }
        }
        assert!((om.check_normalization() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn omega_round_trip_and_n_scaling() {
        let psi = gaussian_psi(256, 16.0);
        let p1 = PhysicalParams::natural();
        let mut h = hydro_from_psi(&psi, &p1);
        // give it some phase
        h.s = ScalarField::from_fn(h.grid().clone(), |x, _| 0.3 * x);
        let om1 = omega_from_hydro(&h, &p1);
        let back = hydro_from_omega(&om1, &p1);
        for (a, b) in h.xi.data().iter().zip(back.xi.data().iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        for (a, b) in h.s.data().iter().zip(back.s.data().iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        // Im(Ω) scales ×10 for N = 10 at equal total S
        let p10 = PhysicalParams::new(1.0, 1.0, 10.0).unwrap();
        let om10 = omega_from_hydro(&h, &p10);
        for (a, b) in om1.field.data().iter().zip(om10.field.data().iter()) {
            assert!((10.0 * a.im - b.im).abs() < 1e-10);
            assert!((a.re - b.re).abs() < 1e-15);
        }
    }

    #[test]
    fn vortex_windings_recorded() {
        let g = Grid::square(64, 12.0, Boundary::Periodic).unwrap();
        let psi = WaveField::new(
            ComplexField::from_fn(g, |x, y| {
                let w = C64::new(x, y);
                w * (-(x * x + y * y) / 2.0).exp()
            }),
            1.0,
        );
        let h = hydro_from_psi(&psi, &PhysicalParams::natural());
        assert!(h.s_is_wrapped, "a vortex state cannot be globally unwrapped");
        assert!(h.windings.is_some());
    }

    #[test]
    fn vortex_free_two_dimensional_state_unwraps() {
        let g = Grid::square(32, 12.0, Boundary::Periodic).unwrap();
        let psi = WaveField::new(
            ComplexField::from_fn(g, |x, y| {
                C64::from_polar((-(x * x + y * y) / 2.0).exp(), 0.3 * (x + y))
            }),
            1.0,
        );
        let h = hydro_from_psi(&psi, &PhysicalParams::natural());
        assert!(!h.s_is_wrapped);
    }
}
