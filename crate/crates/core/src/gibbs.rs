//! Fourier view of the filter: the kept probability is a truncated Fourier
//! series of a discretized step, with coefficients damped by the window's
//! autocorrelation `σ_j`.
//!
//! `R(E) = Σ_{|j|<N} g̃(j) σ_j e^{-iETj}`

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{out_of_range, Error, Result};
use crate::fft::Radix2;
use crate::grid::QpeGrid;
use crate::math::{self, cos, sin, PI};
use crate::window::{Window, WindowKind};

/// Above this size the autocorrelation goes through a zero-padded FFT.
const DIRECT_LIMIT: usize = 1 << 12;

/// Autocorrelation of the window coefficients, stored for `j ≥ 0`;
/// `σ_{-j} = σ_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaFactor {
    grid: QpeGrid,
    kind: WindowKind,
    sigma: Vec<f64>,
}

impl SigmaFactor {
    pub fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    pub fn kind(&self) -> WindowKind {
        self.kind
    }

    /// `σ_j` for `j = 0..N`.
    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    /// `σ_j` for any `|j| < N`, zero outside.
    pub fn get(&self, j: isize) -> f64 {
        self.sigma.get(j.unsigned_abs()).copied().unwrap_or(0.0)
    }
}

/// `σ_j = Σ_{j'} a_{j+j'} a_{j'}`.
pub fn sigma_factor(window: &Window, grid: &QpeGrid) -> Result<SigmaFactor> {
    let n = grid.size();
    if window.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: window.len(),
        });
    }
    let a = window.coeffs();
    let sigma = if n <= DIRECT_LIMIT {
        (0..n)
            .map(|j| {
                math::pairwise_sum(&a[j..].iter().zip(a).map(|(x, y)| x * y).collect::<Vec<_>>())
            })
            .collect()
    } else {
        autocorrelation_fft(a)
    };
    Ok(SigmaFactor {
        grid: *grid,
        kind: window.kind(),
        sigma,
    })
}

fn autocorrelation_fft(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let fft = Radix2::new(2 * n);
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (b, &x) in buf.iter_mut().zip(a) {
        b.re = x;
    }
    fft.forward(&mut buf);
    for b in buf.iter_mut() {
        *b = Complex64::new(b.norm_sqr(), 0.0);
    }
    // the power spectrum is real and even, so a forward transform inverts it
    fft.forward(&mut buf);
    let scale = 1.0 / (2 * n) as f64;
    buf[..n].iter().map(|b| b.re * scale).collect()
}

/// Closed-form `σ_j` for the rectangular and sine windows.
pub fn sigma_closed_form(kind: WindowKind, grid: &QpeGrid, j: usize) -> Result<f64> {
    let n = grid.size();
    if j >= n {
        return Err(out_of_range("j", j as f64, "0 <= j < N"));
    }
    let nf = n as f64;
    let jf = j as f64;
    match kind {
        WindowKind::Rectangular => Ok((nf - jf) / nf),
        WindowKind::Sine => {
            let s = sin(PI / nf);
            let c = cos(PI / nf);
            let t = PI * jf / nf;
            Ok((sin(t) * c + (nf - jf) * cos(t) * s) / (nf * s))
        }
        WindowKind::Kaiser { .. } => Err(Error::NoClosedForm),
    }
}

/// Large-`N` limit of `σ` as a function of `x = j/N`.
pub fn sigma_limit(kind: WindowKind, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(out_of_range("x", x, "[-1, 1]"));
    }
    let ax = x.abs();
    match kind {
        WindowKind::Rectangular => Ok(1.0 - ax),
        WindowKind::Sine => Ok(sin(PI * ax) / PI + (1.0 - ax) * cos(PI * x)),
        WindowKind::Kaiser { .. } => Err(Error::NoClosedForm),
    }
}

/// DFT of the 0/1 sequence that is one on `0..=y_c`, stored for `j ≥ 0`;
/// `g̃(-j) = conj(g̃(j))`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDft {
    grid: QpeGrid,
    cutoff: usize,
    coeffs: Vec<Complex64>,
}

impl StepDft {
    pub fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `z_c = 2π y_c / N`.
    pub fn z_c(&self) -> f64 {
        2.0 * PI * self.cutoff as f64 / self.grid.size() as f64
    }

    /// `g̃(j)` for `j = 0..N`.
    pub fn values(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `g̃(j)` for any `|j| < N`, zero outside.
    pub fn get(&self, j: isize) -> Complex64 {
        match self.coeffs.get(j.unsigned_abs()) {
            Some(c) if j < 0 => c.conj(),
            Some(c) => *c,
            None => Complex64::new(0.0, 0.0),
        }
    }
}

/// `g̃(j) = (1/N) Σ_{y≤y_c} e^{2πi yj/N}` in closed form.
pub fn step_dft(grid: &QpeGrid, cutoff: usize) -> Result<StepDft> {
    let n = grid.size();
    if cutoff == 0 || cutoff >= n {
        return Err(out_of_range("y_c", cutoff as f64, "0 < y_c < N"));
    }
    let nf = n as f64;
    let ycf = cutoff as f64;
    let mut coeffs = Vec::with_capacity(n);
    coeffs.push(Complex64::new((ycf + 1.0) / nf, 0.0));
    for j in 1..n {
        let jf = j as f64;
        let mag = sin(PI * (ycf + 1.0) * jf / nf) / (nf * sin(PI * jf / nf));
        coeffs.push(math::cis(PI * ycf * jf / nf) * mag);
    }
    Ok(StepDft {
        grid: *grid,
        cutoff,
        coeffs,
    })
}

/// Fourier-series coefficient of the continuous step on `[0, z_c]`, the
/// `N ≫ j` limit of `g̃(j)`.
pub fn step_series_coefficient(z_c: f64, j: isize) -> Complex64 {
    if j == 0 {
        return Complex64::new(z_c / (2.0 * PI), 0.0);
    }
    let h = 0.5 * z_c * j as f64;
    math::cis(h) * (sin(h) / (PI * j as f64))
}

/// `Σ_{|j|<N} g̃(j) σ_j e^{-iETj}` before taking the real part.
pub fn reconstruct_filter_complex(
    sigma: &SigmaFactor,
    step: &StepDft,
    energy: f64,
) -> Result<Complex64> {
    if sigma.grid() != step.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = sigma.grid();
    let theta = grid.reduce(energy) * grid.time();
    let n = grid.size() as isize;
    let terms: Vec<Complex64> = (-(n - 1)..n)
        .map(|j| step.get(j) * sigma.get(j) * math::cis(-theta * j as f64))
        .collect();
    let re: Vec<f64> = terms.iter().map(|c| c.re).collect();
    let im: Vec<f64> = terms.iter().map(|c| c.im).collect();
    Ok(Complex64::new(
        math::pairwise_sum(&re),
        math::pairwise_sum(&im),
    ))
}

/// Kept probability rebuilt from its Fourier representation.
pub fn reconstruct_filter(sigma: &SigmaFactor, step: &StepDft, energy: f64) -> Result<f64> {
    reconstruct_filter_complex(sigma, step, energy).map(|c| c.re)
}

/// `Σ_j |σ_j|·|j|` over `|j| < N`, normalized by `N²`.
pub fn sigma_spread(sigma: &SigmaFactor) -> f64 {
    let n = sigma.grid().size() as f64;
    let terms: Vec<f64> = sigma
        .values()
        .iter()
        .enumerate()
        .map(|(j, s)| 2.0 * s.abs() * j as f64)
        .collect();
    math::pairwise_sum(&terms) / (n * n)
}
