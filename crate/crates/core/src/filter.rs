//! Low-pass filtering by discarding outcomes above a cutoff index.
//!
//! Each eigenstate's weight is multiplied by the kept probability
//! `R(E) = Σ_{y ≤ y_c} P_E(y)`. The ideal filter keeps `[0, ω_{y_c}]`
//! entirely and removes the rest; the deviation `ΔR` is the misplaced
//! probability on the wrong side of the cut.

use alloc::vec::Vec;

use crate::error::{out_of_range, Error, Result};
use crate::grid::QpeGrid;
use crate::math::{self, TAU};
use crate::response::ResponseEvaluator;
use crate::window::Window;

/// Default number of uniform energy samples for a filter curve.
pub const DEFAULT_CURVE_SAMPLES: usize = 10_000;

/// Energy scan size used when measuring the transition width.
pub const TRANSITION_SCAN: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    grid: QpeGrid,
    cutoff: usize,
    prefix_bits: Option<u32>,
}

impl FilterConfig {
    /// Keep outcomes `0..=cutoff`.
    pub fn new(grid: QpeGrid, cutoff: usize) -> Result<Self> {
        if cutoff == 0 || cutoff >= grid.size() {
            return Err(out_of_range("y_c", cutoff as f64, "0 < y_c < N"));
        }
        Ok(FilterConfig {
            grid,
            cutoff,
            prefix_bits: None,
        })
    }

    /// Keep outcomes whose leading `m` ancilla bits are zero, i.e.
    /// `y_c = 2^(n-m) - 1`.
    pub fn from_prefix_bits(grid: QpeGrid, m: u32) -> Result<Self> {
        if m == 0 || m >= grid.qubits() {
            return Err(out_of_range("m", m as f64, "0 < m < n"));
        }
        let cutoff = (1usize << (grid.qubits() - m)) - 1;
        Ok(FilterConfig {
            grid,
            cutoff,
            prefix_bits: Some(m),
        })
    }

    pub fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn prefix_bits(&self) -> Option<u32> {
        self.prefix_bits
    }

    /// `ω_{y_c}`.
    pub fn omega_c(&self) -> f64 {
        self.grid.omega(self.cutoff)
    }

    /// Whether a (reduced) energy lies on the kept side of the ideal filter.
    pub fn is_kept(&self, energy: f64) -> bool {
        self.grid.reduce(energy) <= self.omega_c()
    }
}

/// Kept probability and its deviation from the ideal step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Renormalization {
    /// `R = Σ_{y≤y_c} P(y)`.
    pub kept: f64,
    /// `ΔR`: probability on the wrong side of the cut.
    pub deviation: f64,
}

/// `R` and `ΔR` using an existing evaluator. Both sums are taken directly
/// so that small deviations are not lost to `1 − R` cancellation.
pub fn renormalization_with(
    eval: &mut ResponseEvaluator<'_>,
    config: &FilterConfig,
    energy: f64,
) -> Renormalization {
    let e = eval.grid().reduce(energy);
    let probs = eval.probabilities(e);
    let yc = config.cutoff();
    let kept = math::pairwise_sum(&probs[..=yc]);
    let deviation = if e <= config.omega_c() {
        math::pairwise_sum(&probs[yc + 1..])
    } else {
        kept
    };
    Renormalization { kept, deviation }
}

fn check_grid(grid: &QpeGrid, config: &FilterConfig) -> Result<()> {
    if config.grid() != grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

pub fn renormalization(
    window: &Window,
    grid: &QpeGrid,
    config: &FilterConfig,
    energy: f64,
) -> Result<Renormalization> {
    check_grid(grid, config)?;
    let mut eval = ResponseEvaluator::new(window, *grid)?;
    Ok(renormalization_with(&mut eval, config, energy))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterCurve {
    pub energies: Vec<f64>,
    pub kept: Vec<f64>,
    pub deviation: Vec<f64>,
}

/// `count` uniform samples of `[0, 2π/T)`.
pub fn uniform_samples(grid: &QpeGrid, count: usize) -> Vec<f64> {
    let step = grid.period() / count as f64;
    (0..count).map(|k| k as f64 * step).collect()
}

pub fn filter_curve(
    window: &Window,
    grid: &QpeGrid,
    config: &FilterConfig,
    samples: &[f64],
) -> Result<FilterCurve> {
    check_grid(grid, config)?;
    let period = grid.period();
    if let Some(&bad) = samples
        .iter()
        .find(|e| !(e.is_finite() && **e >= 0.0 && **e < period))
    {
        return Err(out_of_range("energy sample", bad, "[0, 2π/T)"));
    }
    let mut eval = ResponseEvaluator::new(window, *grid)?;
    let mut kept = Vec::with_capacity(samples.len());
    let mut deviation = Vec::with_capacity(samples.len());
    for &e in samples {
        let r = renormalization_with(&mut eval, config, e);
        kept.push(r.kept);
        deviation.push(r.deviation);
    }
    Ok(FilterCurve {
        energies: samples.to_vec(),
        kept,
        deviation,
    })
}

/// Measured transition of a filter at tolerance `ε`.
///
/// The two cuts sit between grid points, at `ω_{-1/2}` and `ω_{y_c+1/2}`.
/// `delta` is the smallest width such that `R ≥ 1−ε` on
/// `[ω_{-1/2}+δ/2, ω_{y_c+1/2}−δ/2]` and `R ≤ ε` on
/// `[ω_{y_c+1/2}+δ/2, 2π/T+ω_{-1/2}−δ/2]`; `e_targ` is the length of that
/// pass band, `ω_{y_c+1} − δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub delta: f64,
    pub e_targ: f64,
}

/// Scan `scan` uniform energies, find every sample violating the band
/// conditions, and bisect the threshold crossing on the outer edge of each
/// violating run. `delta` is twice the largest distance from a violation
/// to its nearest cut.
pub fn measure_transition(
    eval: &mut ResponseEvaluator<'_>,
    config: &FilterConfig,
    epsilon: f64,
    scan: usize,
) -> Transition {
    let grid = *eval.grid();
    let period = grid.period();
    let half = 0.5 * grid.spacing();
    let upper_cut = grid.omega_at(config.cutoff() as f64 + 0.5);
    let lower_cut = period - half;
    let in_pass = |e: f64| e < upper_cut || e > lower_cut;
    let cut_distance = |e: f64| {
        (e - upper_cut)
            .abs()
            .min(grid.cyclic_distance(e, lower_cut))
    };
    let violates = |eval: &mut ResponseEvaluator<'_>, e: f64| {
        let r = renormalization_with(eval, config, e).kept;
        if in_pass(e) {
            r < 1.0 - epsilon
        } else {
            r > epsilon
        }
    };

    let step = period / scan as f64;
    let bad: Vec<bool> = (0..scan).map(|k| violates(eval, k as f64 * step)).collect();
    let mut worst: f64 = 0.0;
    for k in 0..scan {
        if !bad[k] {
            continue;
        }
        let e = k as f64 * step;
        let d = cut_distance(e);
        // outward neighbour: one scan step further from the nearest cut
        let (kn, en) = if cut_distance(e + step) > d {
            ((k + 1) % scan, e + step)
        } else {
            ((k + scan - 1) % scan, e - step)
        };
        if bad[kn] || in_pass(grid.reduce(en)) != in_pass(e) {
            worst = worst.max(d);
            continue;
        }
        let (mut lo, mut hi) = (e, en);
        for _ in 0..50 {
            let mid = 0.5 * (lo + hi);
            if violates(eval, grid.reduce(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst = worst.max(cut_distance(grid.reduce(0.5 * (lo + hi))));
    }
    let delta = 2.0 * worst;
    Transition {
        delta,
        e_targ: grid.omega(config.cutoff() + 1) - delta,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaiserFilterParams {
    pub alpha: f64,
    pub epsilon: f64,
    /// Grid estimate `(2π/NT)⌈2α⌉`.
    pub delta: f64,
    /// Grid estimate `ω_{y_c} − δ`.
    pub e_targ: f64,
    /// `(2π/(δT))·2α`.
    pub n_estimate: f64,
    pub delta_measured: f64,
    pub e_targ_measured: f64,
}

pub fn kaiser_params(
    alpha: f64,
    grid: &QpeGrid,
    config: &FilterConfig,
    epsilon: f64,
) -> Result<KaiserFilterParams> {
    check_grid(grid, config)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(out_of_range("epsilon", epsilon, "0 < epsilon < 1"));
    }
    let window = Window::new(crate::WindowKind::Kaiser { alpha }, grid)?;
    let cells = math::ceil(2.0 * alpha);
    if (config.cutoff() as f64) <= cells {
        return Err(Error::EmptyTarget);
    }
    let delta = grid.spacing() * cells;
    let mut eval = ResponseEvaluator::new(&window, *grid)?;
    let measured = measure_transition(&mut eval, config, epsilon, TRANSITION_SCAN);
    Ok(KaiserFilterParams {
        alpha,
        epsilon,
        delta,
        e_targ: config.omega_c() - delta,
        n_estimate: TAU / (delta * grid.time()) * 2.0 * alpha,
        delta_measured: measured.delta,
        e_targ_measured: measured.e_targ,
    })
}
