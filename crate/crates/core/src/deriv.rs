//! Differentiation of grid fields: trigonometric (FFT) differentiation on
//! periodic axes, 4th-order centered finite differences with one-sided
//! closures on box axes, and the high-wavenumber smoothing filter used to
//! de-alias quadratic nonlinearities in the hydrodynamic solvers.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::CoreError;
use crate::fft::{fft, ifft, wavenumber};
use crate::field::{ComplexField, ScalarField};
use crate::grid::Boundary;
use crate::C64;

/// d^order/dx_axis^order of a real field.
pub fn derivative(f: &ScalarField, axis: usize, order: usize) -> Result<ScalarField, CoreError> {
    let c = f.map(|v| C64::new(*v, 0.0));
    let d = derivative_complex(&c, axis, order)?;
    Ok(d.map(|v| v.re))
}

/// d^order/dx_axis^order of a complex field.
pub fn derivative_complex(
    f: &ComplexField,
    axis: usize,
    order: usize,
) -> Result<ComplexField, CoreError> {
    if order != 1 && order != 2 {
        return Err(CoreError::Precondition(format!("derivative order must be 1 or 2, got {order}")));
    }
    if axis >= f.grid().dim() {
        return Err(CoreError::Precondition(format!(
            "axis {axis} out of range for a {}-D grid",
            f.grid().dim()
        )));
    }
    let mut out = f.clone();
    match f.grid().boundary() {
        Boundary::Periodic => {
            for_each_line(&mut out, axis, |line| {
                spectral_line(line, f.grid().length(axis), order)
            });
        }
        Boundary::Box => {
            let h = f.grid().spacing(axis);
            for_each_line(&mut out, axis, |line| fd4_line(line, h, order));
        }
    }
    Ok(out)
}

/// First and second derivative along `axis` from a single forward
/// transform per line (the hydrodynamic right-hand sides call this in
/// their inner loop).
pub fn derivative_pair(
    f: &ScalarField,
    axis: usize,
) -> Result<(ScalarField, ScalarField), CoreError> {
    let c = f.map(|v| C64::new(*v, 0.0));
    let (d1, d2) = derivative_pair_complex(&c, axis)?;
    Ok((d1.map(|v| v.re), d2.map(|v| v.re)))
}

/// Complex-field version of [`derivative_pair`].
pub fn derivative_pair_complex(
    f: &ComplexField,
    axis: usize,
) -> Result<(ComplexField, ComplexField), CoreError> {
    if axis >= f.grid().dim() {
        return Err(CoreError::Precondition(format!(
            "axis {axis} out of range for a {}-D grid",
            f.grid().dim()
        )));
    }
    if f.grid().boundary() != Boundary::Periodic {
        let d1 = derivative_complex(f, axis, 1)?;
        let d2 = derivative_complex(f, axis, 2)?;
        return Ok((d1, d2));
    }
    let len = f.grid().length(axis);
    let mut d1 = f.clone();
    let mut d2 = f.clone();
    {
        let grid = f.grid().clone();
        let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
        let n = grid.points(axis);
        let mut spec = vec![C64::new(0.0, 0.0); n];
        let mut work = vec![C64::new(0.0, 0.0); n];
        let n_lines = if axis == 0 { n1 } else { n0 };
        for li in 0..n_lines {
            let idx = |j: usize| if axis == 0 { j * n1 + li } else { li * n1 + j };
            for j in 0..n {
                spec[j] = f.data()[idx(j)];
            }
            fft(&mut spec);
            for j in 0..n {
                let k = wavenumber(j, n, len);
                work[j] = if n % 2 == 0 && j == n / 2 {
                    C64::new(0.0, 0.0)
                } else {
                    spec[j] * C64::new(0.0, k)
                };
            }
            ifft(&mut work);
            for j in 0..n {
                d1.data_mut()[idx(j)] = work[j];
            }
            for j in 0..n {
                let k = wavenumber(j, n, len);
                work[j] = spec[j] * (-k * k);
            }
            ifft(&mut work);
            for j in 0..n {
                d2.data_mut()[idx(j)] = work[j];
            }
        }
    }
    Ok((d1, d2))
}

/// Damp the top of the spectrum: multiplies mode k by
/// exp(-36 (|k|/k_max)^36) along every axis. Periodic grids only; it is a
/// no-op for well-resolved fields and removes the aliasing junk that
/// quadratic nonlinearities otherwise pile up at the grid scale.
pub fn dealias(f: &mut ComplexField) {
    assert_eq!(
        f.grid().boundary(),
        Boundary::Periodic,
        "dealias filter is defined for periodic grids"
    );
    for axis in 0..f.grid().dim() {
        let n = f.grid().points(axis);
        let len = f.grid().length(axis);
        let kmax = wavenumber(n / 2, n, len).abs();
        for_each_line_raw(f, axis, |line| {
            fft(line);
            for (i, v) in line.iter_mut().enumerate() {
                let k = wavenumber(i, n, len).abs();
                *v *= (-36.0 * (k / kmax).powi(36)).exp();
            }
            ifft(line);
        });
    }
}

/// Real-field version of [`dealias`].
pub fn dealias_real(f: &mut ScalarField) {
    let mut c = f.map(|v| C64::new(*v, 0.0));
    dealias(&mut c);
    for (dst, src) in f.data_mut().iter_mut().zip(c.data().iter()) {
        *dst = src.re;
    }
}

fn spectral_line(line: &mut [C64], len: f64, order: usize) {
    let n = line.len();
    fft(line);
    for (i, v) in line.iter_mut().enumerate() {
        let k = wavenumber(i, n, len);
        match order {
            1 => {
                // the Nyquist mode has no well-defined first derivative
                if n % 2 == 0 && i == n / 2 {
                    *v = C64::new(0.0, 0.0);
                } else {
                    *v *= C64::new(0.0, k);
                }
            }
            _ => *v *= -k * k,
        }
    }
    ifft(line);
}

fn fd4_line(line: &mut [C64], h: f64, order: usize) {
    let n = line.len();
    let src: Vec<C64> = line.to_vec();
    let f = |i: usize| src[i];
    match order {
        1 => {
            let d = 12.0 * h;
            line[0] = (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / d;
            line[1] = (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) / d;
            for i in 2..n - 2 {
                line[i] = (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / d;
            }
            line[n - 2] =
                (3.0 * f(n - 1) + 10.0 * f(n - 2) - 18.0 * f(n - 3) + 6.0 * f(n - 4) - f(n - 5)) / d;
            line[n - 1] = (25.0 * f(n - 1) - 48.0 * f(n - 2) + 36.0 * f(n - 3) - 16.0 * f(n - 4)
                + 3.0 * f(n - 5))
                / d;
        }
        _ => {
            let d = 12.0 * h * h;
            line[0] = (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4)
                - 10.0 * f(5))
                / d;
            line[1] =
                (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5)) / d;
            for i in 2..n - 2 {
                line[i] =
                    (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2)) / d;
            }
            line[n - 2] = (10.0 * f(n - 1) - 15.0 * f(n - 2) - 4.0 * f(n - 3) + 14.0 * f(n - 4)
                - 6.0 * f(n - 5)
                + f(n - 6))
                / d;
            line[n - 1] = (45.0 * f(n - 1) - 154.0 * f(n - 2) + 214.0 * f(n - 3)
                - 156.0 * f(n - 4)
                + 61.0 * f(n - 5)
                - 10.0 * f(n - 6))
                / d;
        }
    }
}

fn for_each_line(out: &mut ComplexField, axis: usize, f: impl FnMut(&mut [C64])) {
    for_each_line_raw(out, axis, f);
}

/// Forward (or inverse) FFT along every axis of the field.
pub(crate) fn fft_axes(f: &mut ComplexField, inverse: bool) {
    for axis in 0..f.grid().dim() {
        for_each_line_raw(f, axis, |line| {
            if inverse {
                ifft(line);
            } else {
                fft(line);
            }
        });
    }
}

/// Apply `f` to every grid line along `axis`. Lines along the last axis are
/// contiguous; lines along axis 0 of a 2-D field are gathered to a scratch
/// buffer and scattered back.
fn for_each_line_raw(out: &mut ComplexField, axis: usize, mut f: impl FnMut(&mut [C64])) {
    let grid = out.grid().clone();
    let (n0, n1) = (grid.points(0), if grid.dim() == 2 { grid.points(1) } else { 1 });
    let data = out.data_mut();
    if grid.dim() == 1 || axis == 1 {
        let len = if axis == 1 { n1 } else { n0 };
        for chunk in data.chunks_mut(len) {
            f(chunk);
        }
    } else {
        let mut scratch = vec![C64::new(0.0, 0.0); n0];
        for i1 in 0..n1 {
            for i0 in 0..n0 {
                scratch[i0] = data[i0 * n1 + i1];
            }
            f(&mut scratch);
            for i0 in 0..n0 {
                data[i0 * n1 + i1] = scratch[i0];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use core::f64::consts::PI;

    #[test]
    fn periodic_sine_first_derivative() {
        let g = Grid::line(64, 2.0 * PI, Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x, _| (3.0 * x).sin());
        let d = derivative(&f, 0, 1).unwrap();
        let want = ScalarField::from_fn(g, |x, _| 3.0 * (3.0 * x).cos());
        for (a, b) in d.data().iter().zip(want.data().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_constant_derivative_is_zero() {
        let g = Grid::line(32, 5.0, Boundary::Periodic).unwrap();
        let f = ScalarField::constant(g, 4.2);
        for order in [1, 2] {
            let d = derivative(&f, 0, order).unwrap();
            assert!(d.linf_norm() < 1e-13);
        }
    }

    #[test]
    fn box_quadratic_second_derivative() {
        let g = Grid::line(64, 4.0, Boundary::Box).unwrap();
        let f = ScalarField::from_fn(g, |x, _| x * x);
        let d = derivative(&f, 0, 2).unwrap();
        for v in d.data() {
            assert!((v - 2.0).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn box_quartic_first_derivative() {
        // 4th-order stencils are exact on quartics up to roundoff
        let g = Grid::line(64, 2.0, Boundary::Box).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x, _| x.powi(4));
        let d = derivative(&f, 0, 1).unwrap();
        let want = ScalarField::from_fn(g, |x, _| 4.0 * x.powi(3));
        for (a, b) in d.data().iter().zip(want.data().iter()) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn box_convergence_is_fourth_order() {
        let err = |n: usize| {
            let g = Grid::line(n, 2.0, Boundary::Box).unwrap();
            let f = ScalarField::from_fn(g.clone(), |x, _| (2.0 * x).sin());
            let d = derivative(&f, 0, 1).unwrap();
            let want = ScalarField::from_fn(g, |x, _| 2.0 * (2.0 * x).cos());
            d.zip_map(&want, |a, b| a - b).linf_norm()
        };
        let order = (err(64) / err(128)).log2();
        assert!(order > 3.7, "observed order {order}");
    }

    #[test]
    fn two_dimensional_axes_are_independent() {
        let g = Grid::square(32, 2.0 * PI, Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(g.clone(), |x, y| (2.0 * x).sin() * (3.0 * y).cos());
        let dx = derivative(&f, 0, 1).unwrap();
        let dy = derivative(&f, 1, 1).unwrap();
        let wx = ScalarField::from_fn(g.clone(), |x, y| 2.0 * (2.0 * x).cos() * (3.0 * y).cos());
        let wy = ScalarField::from_fn(g, |x, y| -3.0 * (2.0 * x).sin() * (3.0 * y).sin());
        assert!(dx.zip_map(&wx, |a, b| a - b).linf_norm() < 1e-11);
        assert!(dy.zip_map(&wy, |a, b| a - b).linf_norm() < 1e-11);
    }

    #[test]
    fn dealias_leaves_resolved_modes_alone() {
        let g = Grid::line(64, 2.0 * PI, Boundary::Periodic).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (5.0 * x).sin() + 0.3 * (9.0 * x).cos());
        let mut filtered = f.clone();
        dealias_real(&mut filtered);
        assert!(f.zip_map(&filtered, |a, b| a - b).linf_norm() < 1e-13);
    }

    #[test]
    fn bad_order_rejected() {
        let g = Grid::line(16, 1.0, Boundary::Periodic).unwrap();
        let f = ScalarField::zeros(g);
        assert!(derivative(&f, 0, 3).is_err());
        assert!(derivative(&f, 1, 1).is_err());
    }
}
