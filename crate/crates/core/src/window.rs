//! Ancilla input-state windows.
//!
//! All three windows are indexed `j = 0..N-1` and L2-normalised so that
//! `Σ_j a_j |j⟩` is a valid state:
//!
//! * rectangular: `a_j = 1/√N` (Hadamard layer),
//! * sine: `a_j = √(2/N) sin(πj/N)`,
//! * Kaiser: `a_j ∝ I₀(πα √(1 − (2j/N − 1)²))`, symmetric about `j = N/2`.

use alloc::vec::Vec;
use core::fmt;

use crate::bessel::bessel_i0;
use crate::error::{out_of_range, Result};
use crate::grid::QpeGrid;
use crate::math::{sin, sqrt, PI};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowKind {
    Rectangular,
    Sine,
    Kaiser { alpha: f64 },
}

impl WindowKind {
    pub fn name(&self) -> &'static str {
        match self {
            WindowKind::Rectangular => "rect",
            WindowKind::Sine => "sine",
            WindowKind::Kaiser { .. } => "kaiser",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            WindowKind::Kaiser { alpha } => Some(alpha),
            _ => None,
        }
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowKind::Kaiser { alpha } => write!(f, "kaiser(alpha={alpha})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Normalised window coefficients for one grid size.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    kind: WindowKind,
    coeffs: Vec<f64>,
}

impl Window {
    pub fn new(kind: WindowKind, grid: &QpeGrid) -> Result<Self> {
        let n = grid.size();
        let nf = n as f64;
        let coeffs = match kind {
            WindowKind::Rectangular => alloc::vec![1.0 / sqrt(nf); n],
            WindowKind::Sine => {
                let scale = sqrt(2.0 / nf);
                (0..n).map(|j| scale * sin(PI * j as f64 / nf)).collect()
            }
            WindowKind::Kaiser { alpha } => {
                if !(alpha.is_finite() && alpha > 0.0) {
                    return Err(out_of_range("alpha", alpha, "finite and > 0"));
                }
                let raw = (0..n)
                    .map(|j| {
                        let u = 2.0 * j as f64 / nf - 1.0;
                        bessel_i0(PI * alpha * sqrt((1.0 - u * u).max(0.0)))
                    })
                    .collect::<Result<Vec<f64>>>()?;
                normalized(raw)
            }
        };
        Ok(Window { kind, coeffs })
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = sqrt(v.iter().map(|x| x * x).sum::<f64>());
    for x in &mut v {
        *x /= norm;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: u32) -> QpeGrid {
        QpeGrid::new(n, 1.0).unwrap()
    }

    fn norm_sq(w: &Window) -> f64 {
        w.coeffs().iter().map(|a| a * a).sum()
    }

    #[test]
    fn rectangular_four() {
        let w = Window::new(WindowKind::Rectangular, &grid(2)).unwrap();
        assert_eq!(w.coeffs(), &[0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn sine_four() {
        let w = Window::new(WindowKind::Sine, &grid(2)).unwrap();
        let expect = [0.0, 0.5, core::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, e) in w.coeffs().iter().zip(expect) {
            assert!((a - e).abs() < 1e-15);
        }
    }

    #[test]
    fn kaiser_alpha3_shape() {
        let w = Window::new(WindowKind::Kaiser { alpha: 3.0 }, &grid(6)).unwrap();
        let a = w.coeffs();
        // oracle: unnormalised ratio edge/centre = I0(0)/I0(3π)
        let ratio = 1.0 / bessel_i0(3.0 * PI).unwrap();
        assert!((a[0] / a[32] - ratio).abs() < 1e-15);
        assert!(a[0] > 0.0 && a[0] < 1e-3);
        let peak = a
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, 32);
        assert!((norm_sq(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalisation_all_kinds() {
        for n in 2..=12 {
            for kind in [
                WindowKind::Rectangular,
                WindowKind::Sine,
                WindowKind::Kaiser { alpha: 3.0 },
                WindowKind::Kaiser { alpha: 0.5 },
            ] {
                let w = Window::new(kind, &grid(n)).unwrap();
                assert!((norm_sq(&w) - 1.0).abs() <= 1e-12, "{kind} n={n}");
            }
        }
    }

    #[test]
    fn sine_and_kaiser_symmetric_about_half() {
        for n in 2..=12 {
            for kind in [WindowKind::Sine, WindowKind::Kaiser { alpha: 2.5 }] {
                let w = Window::new(kind, &grid(n)).unwrap();
                let a = w.coeffs();
                let len = a.len();
                for j in 1..len {
                    assert!((a[j] - a[len - j]).abs() <= 1e-15, "{kind} n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn kaiser_positive_unimodal() {
        for n in 2..=10 {
            let w = Window::new(WindowKind::Kaiser { alpha: 4.0 }, &grid(n)).unwrap();
            let a = w.coeffs();
            let mid = a.len() / 2;
            assert!(a.iter().all(|&x| x > 0.0));
            for j in 1..=mid {
                assert!(a[j] > a[j - 1]);
            }
            for j in mid + 1..a.len() {
                assert!(a[j] < a[j - 1]);
            }
        }
    }

    #[test]
    fn rejects_bad_alpha() {
        assert!(Window::new(WindowKind::Kaiser { alpha: 0.0 }, &grid(3)).is_err());
        assert!(Window::new(WindowKind::Kaiser { alpha: -1.0 }, &grid(3)).is_err());
    }
}
