//! Goodness-of-fit statistics used by the kinetics checks: the regularized
//! incomplete gamma function (for χ² p-values) and the two-sample
//! Kolmogorov–Smirnov test.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Regularized lower incomplete gamma P(a, x), by series for x < a+1 and by
/// continued fraction otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Regularized upper incomplete gamma Q(a, x) = 1 − P(a, x).
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - libm::lgamma(a)).exp()
}

fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - libm::lgamma(a)).exp() * h
}

/// χ² statistic and p-value of observed counts against expected counts.
/// Bins with expected count below `min_expected` are pooled into their
/// neighbour to keep the χ² approximation honest.
pub fn chi_squared_test(observed: &[f64], expected: &[f64], min_expected: f64) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut chi2 = 0.0;
    let mut dof = 0usize;
    let mut obs_pool = 0.0;
    let mut exp_pool = 0.0;
    for (o, e) in observed.iter().zip(expected.iter()) {
        obs_pool += o;
        exp_pool += e;
        if exp_pool >= min_expected {
            let d = obs_pool - exp_pool;
            chi2 += d * d / exp_pool;
            dof += 1;
            obs_pool = 0.0;
            exp_pool = 0.0;
        }
    }
    if exp_pool > 0.0 {
        let d = obs_pool - exp_pool;
        chi2 += d * d / exp_pool;
        dof += 1;
    }
    // one constraint: total counts match by construction
    let dof = dof.saturating_sub(1).max(1);
    let p = gamma_q(dof as f64 / 2.0, chi2 / 2.0);
    (chi2, p)
}

/// Two-sample Kolmogorov–Smirnov statistic and approximate p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
    ys.sort_unstable_by(|p, q| p.partial_cmp(q).unwrap_or(core::cmp::Ordering::Equal));
    let (n1, n2) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n1 && j < n2 {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let f1 = i as f64 / n1 as f64;
        let f2 = j as f64 / n2 as f64;
        d = d.max((f1 - f2).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let sq = ne.sqrt();
    let lambda = (sq + 0.12 + 0.11 / sq) * d;
    (d, ks_q(lambda))
}

/// Kolmogorov survival function Q(λ) = 2 Σ (-1)^{j-1} exp(-2 j² λ²).
fn ks_q(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_p_against_known_values() {
        // P(1, x) = 1 - e^{-x}
        for x in [0.1, 1.0, 3.5] {
            assert!((gamma_p(1.0, x) - (1.0 - (-x as f64).exp())).abs() < 1e-12);
        }
        // χ²(k=2): P(1, x/2); median of χ²_2 is 2 ln 2
        assert!((gamma_p(1.0, (2.0 * 2.0f64.ln()) / 2.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn chi2_pvalue_uniformity() {
        // chi2 = dof has p around 0.4-0.5 for moderate dof
        let (chi2, p) = chi_squared_test(&[10.0, 12.0, 8.0, 10.0], &[10.0, 10.0, 10.0, 10.0], 5.0);
        assert!(chi2 > 0.0);
        assert!(p > 0.5 && p < 1.0, "p = {p}");
    }

    #[test]
    fn ks_identical_samples() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let (d, p) = ks_two_sample(&a, &a);
        assert!(d < 1e-12);
        assert!(p > 0.999);
    }

    #[test]
    fn ks_separated_samples() {
        let a: Vec<f64> = (0..500).map(|i| i as f64 / 500.0).collect();
        let b: Vec<f64> = (0..500).map(|i| 2.0 + i as f64 / 500.0).collect();
        let (d, p) = ks_two_sample(&a, &b);
        assert!((d - 1.0).abs() < 1e-12);
        assert!(p < 1e-10);
    }
}
