//! Minimal complex FFT: iterative radix-2 for power-of-two lengths and a
//! Bluestein chirp-z fallback for everything else. Forward transforms are
//! unnormalized; inverse transforms divide by the length.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// In-place forward DFT.
pub fn fft(buf: &mut [C64]) {
    transform(buf, false);
}

/// In-place inverse DFT (normalized by 1/n).
pub fn ifft(buf: &mut [C64]) {
    transform(buf, true);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

fn transform(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(buf, inverse);
    } else {
        bluestein(buf, inverse);
    }
}

fn radix2(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n {
        if i < j {
            buf.swap(i, j);
        }
        let mut m = n >> 1;
        while m >= 1 && j & m != 0 {
            j ^= m;
            m >>= 1;
        }
        j |= m;
    }
    // twiddles for the full size, reused by every stage with a stride
    let sign = if inverse { 1.0 } else { -1.0 };
    let half = n / 2;
    let mut tw = Vec::with_capacity(half);
    for k in 0..half {
        let ang = sign * 2.0 * PI * k as f64 / n as f64;
        tw.push(C64::new(ang.cos(), ang.sin()));
    }
    let mut len = 2usize;
    while len <= n {
        let stride = n / len;
        let half_len = len / 2;
        let mut base = 0;
        while base < n {
            for k in 0..half_len {
                let w = tw[k * stride];
                let a = buf[base + k];
                let b = buf[base + k + half_len] * w;
                buf[base + k] = a + b;
                buf[base + k + half_len] = a - b;
            }
            base += len;
        }
        len <<= 1;
    }
}

/// Bluestein's algorithm: expresses an arbitrary-length DFT as a cyclic
/// convolution of chirped sequences, evaluated with a padded radix-2 FFT.
fn bluestein(buf: &mut [C64], inverse: bool) {
    let n = buf.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    // chirp_j = exp(sign * i * pi * j^2 / n); j^2 taken mod 2n keeps the
    // phase argument small and exact
    let chirp: Vec<C64> = (0..n)
        .map(|j| {
            let q = (j * j) % (2 * n);
            let ang = sign * PI * q as f64 / n as f64;
            C64::new(ang.cos(), ang.sin())
        })
        .collect();

    let m = (2 * n - 1).next_power_of_two();
    let mut a = vec![C64::new(0.0, 0.0); m];
    let mut b = vec![C64::new(0.0, 0.0); m];
    for j in 0..n {
        a[j] = buf[j] * chirp[j];
        b[j] = chirp[j].conj();
    }
    for j in 1..n {
        b[m - j] = chirp[j].conj();
    }
    radix2(&mut a, false);
    radix2(&mut b, false);
    for (av, bv) in a.iter_mut().zip(b.iter()) {
        *av *= *bv;
    }
    // unnormalized inverse of the padded convolution
    radix2(&mut a, true);
    let scale = 1.0 / m as f64;
    for j in 0..n {
        buf[j] = a[j] * chirp[j] * scale;
    }
}

/// Angular wavenumber of DFT bin `i` for `n` samples on a domain of
/// length `len` (standard ordering: non-negative frequencies first).
pub fn wavenumber(i: usize, n: usize, len: f64) -> f64 {
    let m = if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
    2.0 * PI * m / len
}
