//! In-place radix-2 DFT used by the fast response path.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::math::{cos, sin, TAU};

/// Precomputed twiddles for a power-of-two forward transform
/// `X[y] = Σ_j x[j] e^{-2πi yj/N}`.
#[derive(Debug, Clone)]
pub(crate) struct Radix2 {
    size: usize,
    twiddles: Vec<Complex64>,
}

impl Radix2 {
    pub(crate) fn new(size: usize) -> Self {
        debug_assert!(size.is_power_of_two());
        // Each twiddle is evaluated directly; no recurrence drift.
        let twiddles = (0..size / 2)
            .map(|k| {
                let t = TAU * k as f64 / size as f64;
                Complex64::new(cos(t), -sin(t))
            })
            .collect();
        Radix2 { size, twiddles }
    }

    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        let n = self.size;
        debug_assert_eq!(buf.len(), n);
        if n <= 1 {
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let u = buf[start + k];
                    let v = buf[start + k + half] * w;
                    buf[start + k] = u + v;
                    buf[start + k + half] = u - v;
                }
            }
            len <<= 1;
        }
    }
}
