//! Per-eigenstate QPE outcome distributions.
//!
//! For an eigenstate with energy `E` the amplitude of outcome `y` is
//! `A(y) = N^{-1/2} Σ_j a_j e^{iΘ(y) j}` with `Θ(y) = ET − 2πy/N`, and
//! `P(y) = |A(y)|²`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{out_of_range, Error, Result};
use crate::fft::Radix2;
use crate::grid::QpeGrid;
use crate::math::{self, cis, fit_line, golden_max, ln, sin, sqrt, wrap_angle, PI, TAU};
use crate::window::{Window, WindowKind};

/// Below this `|Θ|` (or `|Θ ∓ π/N|` for the sine window) the closed forms
/// switch to their series limit.
pub const SINGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    pub grid: QpeGrid,
    /// Energy reduced into `[0, 2π/T)`.
    pub energy: f64,
    pub amps: Vec<Complex64>,
    pub probs: Vec<f64>,
}

impl ResponseCurve {
    fn from_amps(grid: QpeGrid, energy: f64, amps: Vec<Complex64>) -> Self {
        let probs = amps.iter().map(|a| a.norm_sqr()).collect();
        ResponseCurve {
            grid,
            energy,
            amps,
            probs,
        }
    }

    pub fn total_probability(&self) -> f64 {
        math::pairwise_sum(&self.probs)
    }
}

fn check_len(window: &Window, grid: &QpeGrid) -> Result<()> {
    if window.len() != grid.size() {
        return Err(Error::LengthMismatch {
            expected: grid.size(),
            found: window.len(),
        });
    }
    Ok(())
}

/// Reusable evaluator for many energies on one (window, grid) pair. Uses a
/// radix-2 transform; agrees with [`amplitude_direct`] to ~1e-15.
#[derive(Debug, Clone)]
pub struct ResponseEvaluator<'a> {
    window: &'a Window,
    grid: QpeGrid,
    fft: Radix2,
    buf: Vec<Complex64>,
}

impl<'a> ResponseEvaluator<'a> {
    pub fn new(window: &'a Window, grid: QpeGrid) -> Result<Self> {
        check_len(window, &grid)?;
        let n = grid.size();
        Ok(ResponseEvaluator {
            window,
            grid,
            fft: Radix2::new(n),
            buf: vec![Complex64::new(0.0, 0.0); n],
        })
    }

    pub fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    pub fn window(&self) -> &Window {
        self.window
    }

    /// Amplitudes `A(y)` for `energy`; the slice is overwritten on the next call.
    pub fn amplitudes(&mut self, energy: f64) -> &[Complex64] {
        let phase = self.grid.reduce(energy) * self.grid.time();
        let scale = 1.0 / sqrt(self.grid.size() as f64);
        for (j, (slot, &a)) in self.buf.iter_mut().zip(self.window.coeffs()).enumerate() {
            *slot = cis(phase * j as f64) * (a * scale);
        }
        self.fft.forward(&mut self.buf);
        &self.buf
    }

    /// Writes `P(y)` for `energy` into `out`.
    pub fn probabilities_into(&mut self, energy: f64, out: &mut [f64]) {
        let amps = self.amplitudes(energy);
        for (p, a) in out.iter_mut().zip(amps) {
            *p = a.norm_sqr();
        }
    }

    pub fn probabilities(&mut self, energy: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.size()];
        self.probabilities_into(energy, &mut out);
        out
    }

    pub fn curve(&mut self, energy: f64) -> ResponseCurve {
        let e = self.grid.reduce(energy);
        let amps = self.amplitudes(e).to_vec();
        ResponseCurve::from_amps(self.grid, e, amps)
    }
}

/// Response curve for one eigenstate energy.
pub fn amplitude(window: &Window, grid: &QpeGrid, energy: f64) -> Result<ResponseCurve> {
    Ok(ResponseEvaluator::new(window, *grid)?.curve(energy))
}

/// The same curve by explicit `O(N²)` summation of the defining sum.
pub fn amplitude_direct(window: &Window, grid: &QpeGrid, energy: f64) -> Result<ResponseCurve> {
    check_len(window, grid)?;
    let n = grid.size();
    let e = grid.reduce(energy);
    let et = e * grid.time();
    let scale = 1.0 / sqrt(n as f64);
    let amps = (0..n)
        .map(|y| {
            let theta = et - TAU * y as f64 / n as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &a) in window.coeffs().iter().enumerate() {
                acc += cis(theta * j as f64) * a;
            }
            acc * scale
        })
        .collect();
    Ok(ResponseCurve::from_amps(*grid, e, amps))
}

/// `sin(m x/2) / sin(x/2)` for `x ∈ [-π-π/N, π+π/N]`, continuous through
/// `x = 0` where it tends to `m`.
fn dirichlet_ratio(m: f64, x: f64) -> f64 {
    if x.abs() < SINGULARITY_TOL {
        m * (1.0 - (m * m - 1.0) * x * x / 24.0)
    } else {
        sin(0.5 * m * x) / sin(0.5 * x)
    }
}

/// Closed-form amplitudes for the rectangular and sine windows.
///
/// Both are evaluated in half-angle form with `Θ` wrapped into `[-π, π)`,
/// which is exact because `N` is even; the removable singularities at
/// `Θ = 0` (rectangular) and `Θ = ±π/N` (sine) fall back to series limits.
pub fn amplitude_closed_form(
    kind: WindowKind,
    grid: &QpeGrid,
    energy: f64,
) -> Result<ResponseCurve> {
    let n = grid.size();
    let nf = n as f64;
    let e = grid.reduce(energy);
    let et = e * grid.time();
    let amps: Vec<Complex64> = match kind {
        WindowKind::Rectangular => (0..n)
            .map(|y| {
                let theta = wrap_angle(et - TAU * y as f64 / nf);
                cis(0.5 * (nf - 1.0) * theta) * (dirichlet_ratio(nf, theta) / nf)
            })
            .collect(),
        WindowKind::Sine => {
            let half_step = PI / nf;
            let pref = core::f64::consts::SQRT_2 * sin(half_step) / (2.0 * nf);
            (0..n)
                .map(|y| {
                    let theta = wrap_angle(et - TAU * y as f64 / nf);
                    let u = theta - half_step;
                    let v = theta + half_step;
                    // cos(NΘ/2) / sin(u/2) = -D_N(u),  cos(NΘ/2) / sin(v/2) = D_N(v)
                    let mag = if u.abs() <= v.abs() {
                        dirichlet_ratio(nf, u) / sin(0.5 * v)
                    } else {
                        -dirichlet_ratio(nf, v) / sin(0.5 * u)
                    };
                    cis(0.5 * nf * theta) * (pref * mag)
                })
                .collect()
        }
        WindowKind::Kaiser { .. } => return Err(Error::NoClosedForm),
    };
    Ok(ResponseCurve::from_amps(*grid, e, amps))
}

/// Slope of `log P` against `log(distance from the peak)` over distances
/// `[4, N/4]` on both sides of the peak.
///
/// Requires `N ≥ 256` and a fractional grid offset in `[0.2, 0.8]`. An
/// on-grid energy is rejected; a tail that vanishes to working precision
/// (the sine window at exactly half-grid offset) yields
/// [`Error::DegenerateTail`].
pub fn tail_decay_exponent(kind: WindowKind, grid: &QpeGrid, energy: f64) -> Result<f64> {
    let n = grid.size();
    if n < 256 {
        return Err(out_of_range("N", n as f64, ">= 256"));
    }
    let pos = grid.position(grid.reduce(energy));
    let offset = pos - math::floor(pos);
    if offset.abs() < 1e-12 || (1.0 - offset).abs() < 1e-12 {
        return Err(Error::OnGrid { energy });
    }
    if !(0.2..=0.8).contains(&offset) {
        return Err(out_of_range(
            "offset",
            offset,
            "fractional grid offset in [0.2, 0.8]",
        ));
    }
    let window = Window::new(kind, grid)?;
    let curve = amplitude(&window, grid, energy)?;
    let peak = curve.probs.iter().cloned().fold(0.0, f64::max);
    let nf = n as f64;
    let (lo, hi) = (4.0, nf / 4.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (y, &p) in curve.probs.iter().enumerate() {
        let raw = math::rem_period(y as f64 - pos, nf);
        let dist = raw.min(nf - raw);
        if dist < lo || dist > hi {
            continue;
        }
        if p <= peak * 1e-24 {
            return Err(Error::DegenerateTail);
        }
        xs.push(ln(dist));
        ys.push(ln(p));
    }
    fit_line(&xs, &ys)
        .map(|f| f.slope)
        .ok_or(Error::DegenerateTail)
}

/// Number of highest-probability points kept in the Kaiser leakage estimate,
/// `⌈2α + 1⌉`.
pub fn mainlobe_points(alpha: f64) -> usize {
    math::ceil(2.0 * alpha + 1.0) as usize
}

/// Leakage outside the `⌈2α+1⌉` most probable outcomes for an eigenstate at
/// `energy`. Ties are broken by distance to the peak position.
pub fn kaiser_leakage(eval: &mut ResponseEvaluator<'_>, alpha: f64, energy: f64) -> f64 {
    let grid = *eval.grid();
    let n = grid.size();
    let nf = n as f64;
    let pos = grid.position(grid.reduce(energy));
    let probs = eval.probabilities(energy);
    let dist = |y: usize| {
        let raw = math::rem_period(y as f64 - pos, nf);
        raw.min(nf - raw)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        probs[b]
            .partial_cmp(&probs[a])
            .unwrap_or(Ordering::Equal)
            .then_with(|| dist(a).partial_cmp(&dist(b)).unwrap_or(Ordering::Equal))
            .then(a.cmp(&b))
    });
    let keep = mainlobe_points(alpha).min(n);
    // Sum the discarded tail directly: `1 − Σ'` would cancel to ~1e-16.
    let mut tail: Vec<f64> = order[keep..].iter().map(|&y| probs[y]).collect();
    tail.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    math::pairwise_sum(&tail)
}

/// Number of fractional offsets scanned by [`kaiser_eps_max`].
pub const EPS_MAX_SCAN: usize = 64;

/// `max_E [1 − Σ' P(y)]` over one grid cell (the maximum is cell-periodic by
/// shift covariance): a 64-point scan followed by golden-section refinement
/// around the best offset.
pub fn kaiser_eps_max(alpha: f64, grid: &QpeGrid) -> Result<f64> {
    let kind = WindowKind::Kaiser { alpha };
    let window = Window::new(kind, grid)?;
    let mut eval = ResponseEvaluator::new(&window, *grid)?;
    // anchor the scan cell a quarter of the way round the circle
    let anchor = (grid.size() / 4) as f64;
    let mut at = |offset: f64| kaiser_leakage(&mut eval, alpha, grid.omega_at(anchor + offset));
    let mut best = (0.0, at(0.0));
    for k in 1..EPS_MAX_SCAN {
        let off = k as f64 / EPS_MAX_SCAN as f64;
        let v = at(off);
        if v > best.1 {
            best = (off, v);
        }
    }
    let step = 1.0 / EPS_MAX_SCAN as f64;
    let (_, refined) = golden_max(&mut at, best.0 - step, best.0 + step, 40);
    Ok(best.1.max(refined))
}
