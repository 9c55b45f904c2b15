//! Two-step spectral estimation: a coarse QPE filter reweights each
//! eigenvalue line, then a fine QPE grid resolves the surviving lines.
//!
//! The estimator on the fine grid is `S̃(y) = Σ_μ w_μ P′_μ(y)`; filtering
//! replaces `w_μ` by `w_μ R_μ`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{out_of_range, Error, Result};
use crate::filter::{renormalization_with, FilterConfig};
use crate::grid::QpeGrid;
use crate::math;
use crate::response::ResponseEvaluator;
use crate::window::{Window, WindowKind};

/// Prominence threshold of the alias detector, relative to total weight.
pub const PEAK_PROMINENCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub energy: f64,
    pub weight: f64,
}

/// Weighted eigenvalue lines, kept sorted by energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lines: Vec<Line>,
    label: String,
    units: String,
}

impl Spectrum {
    pub fn new(mut lines: Vec<Line>) -> Result<Self> {
        if lines.is_empty() {
            return Err(Error::Empty("spectrum"));
        }
        for l in &lines {
            if !l.energy.is_finite() {
                return Err(out_of_range("energy", l.energy, "finite"));
            }
            if !(l.weight >= 0.0 && l.weight.is_finite()) {
                return Err(out_of_range("weight", l.weight, "finite and >= 0"));
            }
        }
        lines.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Ok(Spectrum {
            lines,
            label: String::new(),
            units: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_units(mut self, units: impl Into<String>) -> Self {
        self.units = units.into();
        self
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn units(&self) -> &str {
        &self.units
    }

    pub fn total_weight(&self) -> f64 {
        let w: Vec<f64> = self.lines.iter().map(|l| l.weight).collect();
        math::pairwise_sum(&w)
    }

    /// Every energy moved by `-e0`.
    pub fn shifted(&self, e0: f64) -> Self {
        self.map_energies(|e| e - e0)
    }

    pub fn negated(&self) -> Self {
        self.map_energies(|e| -e)
    }

    fn map_energies(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut lines: Vec<Line> = self
            .lines
            .iter()
            .map(|l| Line {
                energy: f(l.energy),
                weight: l.weight,
            })
            .collect();
        lines.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        Spectrum {
            lines,
            label: self.label.clone(),
            units: self.units.clone(),
        }
    }
}

/// Sum of `count` weighted rows, combined pairwise so the result does not
/// depend on accumulation order drift.
fn pairwise_rows(count: usize, width: usize, row: &mut impl FnMut(usize, &mut [f64])) -> Vec<f64> {
    fn go(lo: usize, hi: usize, width: usize, row: &mut impl FnMut(usize, &mut [f64])) -> Vec<f64> {
        let mut out = vec![0.0; width];
        if hi - lo == 1 {
            row(lo, &mut out);
            return out;
        }
        let mid = lo + (hi - lo) / 2;
        let left = go(lo, mid, width, row);
        let right = go(mid, hi, width, row);
        for ((o, a), b) in out.iter_mut().zip(&left).zip(&right) {
            *o = a + b;
        }
        out
    }
    if count == 0 {
        return vec![0.0; width];
    }
    go(0, count, width, row)
}

/// `Σ_μ weights[μ] · P_μ(y)` for the given energies.
fn weighted_estimator(
    eval: &mut ResponseEvaluator<'_>,
    energies: &[f64],
    weights: &[f64],
) -> Vec<f64> {
    let n = eval.grid().size();
    let mut probs = vec![0.0; n];
    pairwise_rows(energies.len(), n, &mut |i, out| {
        eval.probabilities_into(energies[i], &mut probs);
        for (o, p) in out.iter_mut().zip(&probs) {
            *o = weights[i] * p;
        }
    })
}

/// `S̃(y) = Σ_μ w_μ P_μ(y)` on `grid`.
pub fn estimator(spectrum: &Spectrum, window: &Window, grid: &QpeGrid) -> Result<Vec<f64>> {
    let mut eval = ResponseEvaluator::new(window, *grid)?;
    let energies: Vec<f64> = spectrum.lines().iter().map(|l| l.energy).collect();
    let weights: Vec<f64> = spectrum.lines().iter().map(|l| l.weight).collect();
    Ok(weighted_estimator(&mut eval, &energies, &weights))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub kind: WindowKind,
    pub grid: QpeGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoStepConfig {
    pub stage1: Stage,
    pub filter: FilterConfig,
    pub stage2: Stage,
    /// Negate energies before filtering, turning the low-pass filter into a
    /// high-pass one; the output axis is negated back.
    pub negate_energies: bool,
}

impl TwoStepConfig {
    pub fn new(stage1: Stage, cutoff: usize, stage2: Stage) -> Result<Self> {
        Ok(TwoStepConfig {
            stage1,
            filter: FilterConfig::new(stage1.grid, cutoff)?,
            stage2,
            negate_energies: false,
        })
    }

    pub fn negate(mut self, on: bool) -> Self {
        self.negate_energies = on;
        self
    }

    /// `β = T′/T`.
    pub fn beta(&self) -> f64 {
        self.stage2.grid.time() / self.stage1.grid.time()
    }
}

/// Query counts with unit constants: `⌈p0^{-1/2} β N′⌉` without the
/// coarse filter, `⌈p0^{-1/2} N + β N′⌉` with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryEstimate {
    pub naive: u64,
    pub filtered: u64,
}

pub fn query_estimate(
    p0: f64,
    beta: f64,
    stage1_size: usize,
    stage2_size: usize,
) -> Result<QueryEstimate> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(out_of_range("p0", p0, "0 < p0 <= 1"));
    }
    let amp = 1.0 / math::sqrt(p0);
    let fine = beta * stage2_size as f64;
    Ok(QueryEstimate {
        naive: math::ceil(amp * fine) as u64,
        filtered: math::ceil(amp * stage1_size as f64 + fine) as u64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralResult {
    /// Stage-2 frequencies `ω′_y`, negated when the sign flip is on.
    pub omega: Vec<f64>,
    pub raw: Vec<f64>,
    pub filtered: Vec<f64>,
    /// `filtered / Σ w_μ R_μ`.
    pub filtered_normalized: Vec<f64>,
    /// Estimator using only kept-side lines with their full weight.
    pub kept_reference: Vec<f64>,
    /// `Σ_kept w_μ (R_μ − 1) P′_μ(y)`.
    pub error_kept: Vec<f64>,
    /// `Σ_cut w_μ R_μ P′_μ(y)`.
    pub error_cut: Vec<f64>,
    /// Stage-1 `R_μ` per line, in spectrum order.
    pub renormalization: Vec<f64>,
    /// Whether each line lies on the kept side of the ideal filter.
    pub kept: Vec<bool>,
    pub total_weight: f64,
    pub p0: f64,
    pub queries: QueryEstimate,
}

impl SpectralResult {
    /// `filtered − kept_reference`.
    pub fn total_error(&self) -> Vec<f64> {
        self.filtered
            .iter()
            .zip(&self.kept_reference)
            .map(|(f, d)| f - d)
            .collect()
    }
}

pub fn two_step(spectrum: &Spectrum, config: &TwoStepConfig) -> Result<SpectralResult> {
    let working = if config.negate_energies {
        spectrum.negated()
    } else {
        spectrum.clone()
    };
    let lines = working.lines();
    let energies: Vec<f64> = lines.iter().map(|l| l.energy).collect();
    let weights: Vec<f64> = lines.iter().map(|l| l.weight).collect();

    let w1 = Window::new(config.stage1.kind, &config.stage1.grid)?;
    let mut eval1 = ResponseEvaluator::new(&w1, config.stage1.grid)?;
    let renorm: Vec<f64> = energies
        .iter()
        .map(|e| renormalization_with(&mut eval1, &config.filter, *e).kept)
        .collect();
    let kept: Vec<bool> = energies.iter().map(|e| config.filter.is_kept(*e)).collect();

    let filtered_w: Vec<f64> = weights.iter().zip(&renorm).map(|(w, r)| w * r).collect();
    let kept_w: Vec<f64> = weights
        .iter()
        .zip(&kept)
        .map(|(w, k)| if *k { *w } else { 0.0 })
        .collect();
    let err_kept_w: Vec<f64> = (0..lines.len())
        .map(|i| {
            if kept[i] {
                weights[i] * (renorm[i] - 1.0)
            } else {
                0.0
            }
        })
        .collect();
    let err_cut_w: Vec<f64> = (0..lines.len())
        .map(|i| if kept[i] { 0.0 } else { filtered_w[i] })
        .collect();

    let w2 = Window::new(config.stage2.kind, &config.stage2.grid)?;
    let mut eval2 = ResponseEvaluator::new(&w2, config.stage2.grid)?;
    let raw = weighted_estimator(&mut eval2, &energies, &weights);
    let filtered = weighted_estimator(&mut eval2, &energies, &filtered_w);
    let kept_reference = weighted_estimator(&mut eval2, &energies, &kept_w);
    let error_kept = weighted_estimator(&mut eval2, &energies, &err_kept_w);
    let error_cut = weighted_estimator(&mut eval2, &energies, &err_cut_w);

    let total_weight = math::pairwise_sum(&weights);
    let surviving = math::pairwise_sum(&filtered_w);
    if !(surviving > 0.0) {
        return Err(Error::EmptyPostSelection);
    }
    let p0 = surviving / total_weight;
    let queries = query_estimate(
        p0,
        config.beta(),
        config.stage1.grid.size(),
        config.stage2.grid.size(),
    )?;
    let filtered_normalized = filtered.iter().map(|v| v / surviving).collect();
    let sign = if config.negate_energies { -1.0 } else { 1.0 };
    let omega = (0..config.stage2.grid.size())
        .map(|y| sign * config.stage2.grid.omega(y))
        .collect();

    Ok(SpectralResult {
        omega,
        raw,
        filtered,
        filtered_normalized,
        kept_reference,
        error_kept,
        error_cut,
        renormalization: renorm,
        kept,
        total_weight,
        p0,
        queries,
    })
}

/// The kept-side and cut-side error vectors of a finished run.
pub fn error_decomposition(result: &SpectralResult) -> (&[f64], &[f64]) {
    (&result.error_kept, &result.error_cut)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub height: f64,
    pub prominence: f64,
}

/// Local maxima of `signal` whose prominence is at least `min_prominence`.
/// The prominence is the height above the higher of the two lowest points
/// reached before meeting a taller sample (or the array end) on each side.
pub fn find_peaks(signal: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = signal.len();
    let mut peaks = Vec::new();
    for i in 0..n {
        let v = signal[i];
        let left_ok = i == 0 || signal[i - 1] < v;
        let right_ok = i + 1 == n || signal[i + 1] <= v;
        if !(left_ok && right_ok) {
            continue;
        }
        let mut left_min = v;
        for &s in signal[..i].iter().rev() {
            if s > v {
                break;
            }
            left_min = left_min.min(s);
        }
        let mut right_min = v;
        for &s in &signal[i + 1..] {
            if s > v {
                break;
            }
            right_min = right_min.min(s);
        }
        let prominence = v - left_min.max(right_min);
        if prominence >= min_prominence && prominence > 0.0 {
            peaks.push(Peak {
                index: i,
                height: v,
                prominence,
            });
        }
    }
    peaks
}

/// Where a line at `energy` appears on `grid`: the folded frequency and the
/// integer `r` with `folded = energy + (2π/T′) r`.
pub fn alias_position(grid: &QpeGrid, energy: f64) -> (f64, i64) {
    let folded = grid.reduce(energy);
    let r = math::round((folded - energy) / grid.period()) as i64;
    (folded, r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AliasMatch {
    pub energy: f64,
    pub expected: f64,
    pub r: i64,
    pub peak: Option<Peak>,
}

/// For each cut-side line, the nearest detected peak of `signal` within one
/// stage-2 cell of its folded position.
pub fn aliasing_peaks(
    result: &SpectralResult,
    spectrum: &Spectrum,
    config: &TwoStepConfig,
    signal: &[f64],
) -> Vec<AliasMatch> {
    let grid = &config.stage2.grid;
    let peaks = find_peaks(signal, PEAK_PROMINENCE * result.total_weight);
    let sign = if config.negate_energies { -1.0 } else { 1.0 };
    let working = if config.negate_energies {
        spectrum.negated()
    } else {
        spectrum.clone()
    };
    working
        .lines()
        .iter()
        .zip(&result.kept)
        .filter(|(_, k)| !**k)
        .map(|(line, _)| {
            let (folded, r) = alias_position(grid, line.energy);
            let peak = peaks
                .iter()
                .filter(|p| grid.cyclic_distance(grid.omega(p.index), folded) <= grid.spacing())
                .min_by(|a, b| {
                    let da = grid.cyclic_distance(grid.omega(a.index), folded);
                    let db = grid.cyclic_distance(grid.omega(b.index), folded);
                    da.total_cmp(&db)
                })
                .copied();
            AliasMatch {
                energy: sign * line.energy,
                expected: sign * folded,
                r,
                peak,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(energy: f64, weight: f64) -> Line {
        Line { energy, weight }
    }

    fn stage(kind: WindowKind, n: u32, t: f64) -> Stage {
        Stage {
            kind,
            grid: QpeGrid::new(n, t).unwrap(),
        }
    }

    fn three_band() -> Spectrum {
        let mut lines = Vec::new();
        for i in 0..16 {
            lines.push(line(0.70 + 0.01 * i as f64, 1.0));
            lines.push(line(-1.35 + 0.02 * i as f64, 2.0));
        }
        lines.push(line(-1.953, 5.0));
        Spectrum::new(lines).unwrap()
    }

    fn config(kind: WindowKind) -> TwoStepConfig {
        TwoStepConfig::new(stage(kind, 6, 1.0), 15, stage(WindowKind::Sine, 8, 4.0)).unwrap()
    }

    #[test]
    fn spectrum_validation() {
        assert_eq!(Spectrum::new(vec![]), Err(Error::Empty("spectrum")));
        assert!(Spectrum::new(vec![line(0.1, -1.0)]).is_err());
        assert!(Spectrum::new(vec![line(f64::NAN, 1.0)]).is_err());
        let s = Spectrum::new(vec![line(0.7, 2.0), line(0.5, 1.0), line(0.5, 1.5)]).unwrap();
        assert_eq!(s.lines()[0].energy, 0.5);
        assert_eq!(s.lines().len(), 3);
        assert_eq!(s.total_weight(), 4.5);
        assert_eq!(s.shifted(0.5).lines()[0].energy, 0.0);
    }

    #[test]
    fn on_grid_line_collapses() {
        let g = QpeGrid::new(6, 1.0).unwrap();
        let w = Window::new(WindowKind::Rectangular, &g).unwrap();
        let s = Spectrum::new(vec![line(g.omega(9), 2.5)]).unwrap();
        let est = estimator(&s, &w, &g).unwrap();
        for (y, v) in est.iter().enumerate() {
            let expect = if y == 9 { 2.5 } else { 0.0 };
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lines_add_and_alias() {
        let g = QpeGrid::new(6, 2.0).unwrap();
        let w = Window::new(WindowKind::Sine, &g).unwrap();
        let a = estimator(&Spectrum::new(vec![line(0.3, 1.0)]).unwrap(), &w, &g).unwrap();
        let b = estimator(
            &Spectrum::new(vec![line(0.3 + g.period(), 1.0)]).unwrap(),
            &w,
            &g,
        )
        .unwrap();
        let c = estimator(&Spectrum::new(vec![line(0.4, 1.0)]).unwrap(), &w, &g).unwrap();
        let ac = estimator(
            &Spectrum::new(vec![line(0.3, 1.0), line(0.4, 1.0)]).unwrap(),
            &w,
            &g,
        )
        .unwrap();
        for y in 0..64 {
            assert!((a[y] - b[y]).abs() < 1e-12);
            assert!((a[y] + c[y] - ac[y]).abs() < 1e-14);
        }
    }

    #[test]
    fn two_step_invariants() {
        let s = three_band();
        for kind in [WindowKind::Rectangular, WindowKind::Kaiser { alpha: 3.0 }] {
            let r = two_step(&s, &config(kind)).unwrap();
            assert!((r.raw.iter().sum::<f64>() - s.total_weight()).abs() < 1e-10);
            assert!(r.filtered.iter().zip(&r.raw).all(|(f, w)| *f <= w + 1e-12));
            let total = r.total_error();
            for y in 0..r.raw.len() {
                assert!((r.error_kept[y] + r.error_cut[y] - total[y]).abs() < 1e-12);
            }
            assert!((r.filtered_normalized.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert_eq!(r.kept.iter().filter(|k| **k).count(), 16);
        }
    }

    #[test]
    fn kaiser_suppresses_target_error() {
        let s = three_band();
        let rect = two_step(&s, &config(WindowKind::Rectangular)).unwrap();
        let kaiser = two_step(&s, &config(WindowKind::Kaiser { alpha: 3.0 })).unwrap();
        let g2 = config(WindowKind::Rectangular).stage2.grid;
        let worst = |r: &SpectralResult| {
            r.total_error()
                .iter()
                .enumerate()
                .filter(|(y, _)| (0.65..=0.90).contains(&g2.omega(*y)))
                .map(|(_, e)| e.abs())
                .fold(0.0, f64::max)
        };
        assert!(
            worst(&rect) > 1e4 * worst(&kaiser),
            "{} {}",
            worst(&rect),
            worst(&kaiser)
        );
    }

    #[test]
    fn plateau_lines_pass_unchanged() {
        let s = Spectrum::new((0..10).map(|i| line(0.6 + 0.03 * i as f64, 1.0)).collect()).unwrap();
        let r = two_step(&s, &config(WindowKind::Kaiser { alpha: 3.0 })).unwrap();
        for (f, w) in r.filtered.iter().zip(&r.raw) {
            assert!((f - w).abs() <= 1e-7 * s.total_weight());
        }
        assert!(r.error_cut.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rectangular_cut_side_aliases() {
        let s = three_band();
        let cfg = config(WindowKind::Rectangular);
        let r = two_step(&s, &cfg).unwrap();
        let matches = aliasing_peaks(&r, &s, &cfg, &r.error_cut);
        let deep = matches
            .iter()
            .find(|m| (m.energy + 1.953).abs() < 1e-12)
            .unwrap();
        assert_eq!(deep.r, 2);
        assert!(deep.peak.is_some());
    }

    #[test]
    fn sign_flip_duality() {
        let s = three_band();
        let cfg = config(WindowKind::Kaiser { alpha: 3.0 });
        let flipped = two_step(&s, &cfg.negate(true)).unwrap();
        let direct = two_step(&s.negated(), &cfg).unwrap();
        assert_eq!(flipped.filtered, direct.filtered);
        assert_eq!(flipped.raw, direct.raw);
        for (a, b) in flipped.omega.iter().zip(&direct.omega) {
            assert_eq!(*a, -b);
        }
    }

    #[test]
    fn query_accounting() {
        let q = query_estimate(0.25, 4.0, 64, 256).unwrap();
        assert_eq!(q.naive, 2048);
        assert_eq!(q.filtered, 128 + 1024);
        assert!(query_estimate(0.0, 4.0, 64, 256).is_err());
        let p0: f64 = 0.95;
        let q = query_estimate(p0, 1.0, 64, 64).unwrap();
        assert!(q.filtered >= q.naive);
    }

    #[test]
    fn peak_finder() {
        let sig = [0.0, 1.0, 0.5, 0.6, 0.2, 3.0, 0.0];
        let p = find_peaks(&sig, 0.05);
        let idx: Vec<usize> = p.iter().map(|p| p.index).collect();
        assert_eq!(idx, vec![1, 3, 5]);
        assert!((p[1].prominence - 0.1).abs() < 1e-12);
        assert_eq!(find_peaks(&sig, 0.5).len(), 2);
    }
}
