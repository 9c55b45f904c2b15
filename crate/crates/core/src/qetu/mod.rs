//! Step-like even polynomials for QETU-style filtering, fitted by discrete
//! minimax, certified on a dense energy grid, and searched for the minimal
//! degree.
//!
//! The filter is `F_d(E) = |f_d(cos(ET/4))|²` with
//! `f_d(w) = Σ_l c_{2l} T_{2l}(w)`. It must satisfy `F ≤ 1` everywhere,
//! `1 − F ≤ ε` on `[0, E_targ]` and `F ≤ ε` on `[E_targ + 2δ, 2π/T]`.

mod lp;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{out_of_range, Error, Result};
use crate::filter::{kaiser_params, FilterConfig};
use crate::grid::{QpeGrid, MAX_QUBITS};
use crate::math::{self, acos, cos, sqrt, TAU};
use crate::response::kaiser_eps_max;

use lp::Constraint;

/// Uniform certification points over `[0, 2π/T]`.
pub const CERTIFY_POINTS: usize = 100_000;
/// Largest degree tried by [`minimal_degree`].
pub const MAX_DEGREE: usize = 4096;
/// Absolute tolerance of the LP and of its constraint checks.
pub const SOLVER_TOL: f64 = 1e-9;
const MAX_CUT_ROUNDS: usize = 60;
const REFINE_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QetuSpec {
    e_targ: f64,
    two_delta: f64,
    epsilon: f64,
    time: f64,
}

impl QetuSpec {
    pub fn new(e_targ: f64, two_delta: f64, epsilon: f64, time: f64) -> Result<Self> {
        if !(time > 0.0 && time.is_finite()) {
            return Err(out_of_range("T", time, "T > 0"));
        }
        if !(e_targ > 0.0) {
            return Err(out_of_range("E_targ", e_targ, "E_targ > 0"));
        }
        if !(two_delta > 0.0 && e_targ + two_delta < TAU / time) {
            return Err(out_of_range(
                "2δ",
                two_delta,
                "2δ > 0 and E_targ + 2δ < 2π/T",
            ));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(out_of_range("epsilon", epsilon, "0 < epsilon < 1"));
        }
        Ok(QetuSpec {
            e_targ,
            two_delta,
            epsilon,
            time,
        })
    }

    pub fn e_targ(&self) -> f64 {
        self.e_targ
    }

    pub fn two_delta(&self) -> f64 {
        self.two_delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        QetuSpec::new(self.e_targ, self.two_delta, epsilon, self.time)
    }

    /// Plateau target `(1 + √(1−ε))/2`.
    pub fn c(&self) -> f64 {
        0.5 * (1.0 + sqrt(1.0 - self.epsilon))
    }

    /// `cos(E_targ T/4)`.
    pub fn w_plus(&self) -> f64 {
        cos(self.e_targ * self.time / 4.0)
    }

    /// `cos((E_targ + 2δ) T/4)`.
    pub fn w_minus(&self) -> f64 {
        cos((self.e_targ + self.two_delta) * self.time / 4.0)
    }

    pub fn period(&self) -> f64 {
        TAU / self.time
    }

    /// `w = cos(ET/4)`.
    pub fn w_of(&self, energy: f64) -> f64 {
        cos(energy * self.time / 4.0)
    }

    fn region_of_energy(&self, energy: f64) -> Region {
        if energy <= self.e_targ {
            Region::Pass
        } else if energy >= self.e_targ + self.two_delta {
            Region::Stop
        } else {
            Region::Transition
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    Pass,
    Stop,
    Transition,
}

/// `Σ_l c_{2l} T_{2l}(w)`, evaluated through `T_{2l}(w) = T_l(2w² − 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevEvenPoly {
    coeffs: Vec<f64>,
}

impl ChebyshevEvenPoly {
    /// `coeffs[l]` multiplies `T_{2l}`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty("coefficients"));
        }
        Ok(ChebyshevEvenPoly { coeffs })
    }

    pub fn degree(&self) -> usize {
        2 * (self.coeffs.len() - 1)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Clenshaw recurrence in `x = 2w² − 1`.
    pub fn eval(&self, w: f64) -> f64 {
        let x = 2.0 * w * w - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs[1..].iter().rev() {
            let b0 = c + 2.0 * x * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + x * b1 - b2
    }

    /// Term-by-term `Σ c_{2l} cos(2l·arccos w)`.
    pub fn eval_direct(&self, w: f64) -> f64 {
        let theta = acos(w.clamp(-1.0, 1.0));
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, c)| c * cos(2.0 * l as f64 * theta))
            .sum()
    }

    /// `F(E) = f(cos(ET/4))²`.
    pub fn filter_value(&self, spec: &QetuSpec, energy: f64) -> f64 {
        let f = self.eval(spec.w_of(energy));
        f * f
    }
}

/// Which filter condition a violation breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// `F ≤ 1`.
    Bounded,
    /// `1 − F ≤ ε` on the pass band.
    Pass,
    /// `F ≤ ε` on the stop band.
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub energy: f64,
    pub condition: Condition,
    /// The constrained quantity: `F`, `1 − F` or `F`.
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub degree: usize,
    /// Fitting grid size, when the polynomial came from a fit.
    pub samples: Option<usize>,
    /// Minimax residual `t*` of the fit.
    pub residual: Option<f64>,
    pub passed: bool,
    pub violations: Vec<Violation>,
    /// Largest `1 − F` on the pass band.
    pub max_pass_error: f64,
    /// Largest `F` on the stop band.
    pub max_stop_value: f64,
    /// Largest `F` overall.
    pub max_value: f64,
}

impl FitReport {
    /// One query per pair of polynomial degrees.
    pub fn queries(&self) -> usize {
        self.degree / 2
    }
}

/// Fitting grid: Chebyshev nodes `w_m = cos(π(2m+1)/(4M))`, i.e. `M`
/// points at the centres of a uniform partition of `[0, 2π/T]` in energy.
pub fn fitting_grid(samples: usize) -> Vec<f64> {
    (0..samples)
        .map(|m| cos(math::PI * (2 * m + 1) as f64 / (4 * samples) as f64))
        .collect()
}

fn region_of_w(spec: &QetuSpec, w: f64) -> Region {
    if w >= spec.w_plus() {
        Region::Pass
    } else if w <= spec.w_minus() {
        Region::Stop
    } else {
        Region::Transition
    }
}

/// Constraints attached to one sample point, in a fixed order.
fn point_constraints(spec: &QetuSpec, region: Region, point: usize) -> Vec<Constraint> {
    let c = spec.c();
    let mk = |sign: f64, bounded: bool, rhs: f64| Constraint {
        point,
        sign,
        bounded,
        rhs,
    };
    let mut out = vec![mk(1.0, false, 1.0), mk(-1.0, false, 1.0)];
    match region {
        Region::Pass => {
            out.push(mk(1.0, true, c));
            out.push(mk(-1.0, true, -c));
        }
        Region::Stop => {
            out.push(mk(1.0, true, 0.0));
            out.push(mk(-1.0, true, 0.0));
        }
        Region::Transition => {}
    }
    out
}

/// Discrete minimax fit of degree `d` on `samples` fitting points:
/// minimize `max(|f − c|` on the pass band, `|f|` on the stop band`)`
/// subject to `|f| ≤ 1` at every point. The result is certified with
/// [`certify`].
pub fn fit_polynomial(
    spec: &QetuSpec,
    degree: usize,
    samples: usize,
) -> Result<(ChebyshevEvenPoly, FitReport)> {
    if degree % 2 != 0 {
        return Err(out_of_range("degree", degree as f64, "even degree"));
    }
    if samples < degree.max(1) {
        return Err(Error::TooFewSamples { samples, degree });
    }
    let k = degree / 2 + 1;
    let ws = fitting_grid(samples);
    let regions: Vec<Region> = ws.iter().map(|w| region_of_w(spec, *w)).collect();
    if !regions.iter().any(|r| *r != Region::Transition) {
        return Err(Error::TooFewSamples { samples, degree });
    }
    let mut basis = vec![0.0; samples * k];
    for (p, w) in ws.iter().enumerate() {
        let theta = 2.0 * acos(*w);
        for l in 0..k {
            basis[p * k + l] = cos(l as f64 * theta);
        }
    }
    let all: Vec<Vec<Constraint>> = regions
        .iter()
        .enumerate()
        .map(|(p, r)| point_constraints(spec, *r, p))
        .collect();

    // initial working set: every constraint on an even subsample of the
    // grid, always keeping the band edges
    let stride = (samples / (4 * k)).max(1);
    let mut active: Vec<Vec<bool>> = all.iter().map(|c| vec![false; c.len()]).collect();
    for p in 0..samples {
        let edge = (p > 0 && regions[p] != regions[p - 1])
            || (p + 1 < samples && regions[p] != regions[p + 1]);
        if p % stride == 0 || edge || p + 1 == samples {
            active[p].iter_mut().for_each(|a| *a = true);
        }
    }

    let mut values = vec![0.0; samples];
    for _ in 0..MAX_CUT_ROUNDS {
        let working: Vec<Constraint> = all
            .iter()
            .zip(&active)
            .flat_map(|(cs, act)| cs.iter().zip(act).filter(|(_, a)| **a).map(|(c, _)| *c))
            .collect();
        let sol = lp::solve(&basis, k, &working, SOLVER_TOL * 1e-1)?;
        for (p, v) in values.iter_mut().enumerate() {
            *v = basis[p * k..(p + 1) * k]
                .iter()
                .zip(&sol.x)
                .map(|(a, b)| a * b)
                .sum();
        }
        let excess = |p: usize, i: usize| {
            let c = &all[p][i];
            let tau = if c.bounded { -1.0 } else { 0.0 };
            c.sign * values[p] + tau * sol.t - c.rhs
        };
        // add the local maxima of each violated constraint family
        let mut added = false;
        for p in 0..samples {
            for i in 0..all[p].len() {
                if active[p][i] {
                    continue;
                }
                let e = excess(p, i);
                if e <= SOLVER_TOL {
                    continue;
                }
                let same = |q: usize| regions[q] == regions[p] && all[q].len() > i;
                let left = p > 0 && same(p - 1) && excess(p - 1, i) > e;
                let right = p + 1 < samples && same(p + 1) && excess(p + 1, i) >= e;
                if !left && !right {
                    active[p][i] = true;
                    added = true;
                }
            }
        }
        if !added {
            let poly = ChebyshevEvenPoly::new(sol.x)?;
            let mut report = certify(&poly, spec);
            report.samples = Some(samples);
            report.residual = Some(sol.t);
            return Ok((poly, report));
        }
    }
    Err(Error::SolverFailure {
        iterations: MAX_CUT_ROUNDS,
    })
}

/// Checks the three filter conditions on [`CERTIFY_POINTS`] uniform
/// energies, then maximizes each near-violation (quantity at least a tenth
/// of its bound, and a local maximum on the grid) by golden-section search
/// within two grid cells.
pub fn certify(poly: &ChebyshevEvenPoly, spec: &QetuSpec) -> FitReport {
    let period = spec.period();
    let h = period / (CERTIFY_POINTS - 1) as f64;
    let energies: Vec<f64> = (0..CERTIFY_POINTS).map(|i| i as f64 * h).collect();
    let values: Vec<f64> = energies
        .iter()
        .map(|e| poly.filter_value(spec, *e))
        .collect();
    let eps = spec.epsilon();

    let mut max_pass_error: f64 = 0.0;
    let mut max_stop_value: f64 = 0.0;
    let mut max_value: f64 = 0.0;
    let mut violations = Vec::new();

    let checks: [(Condition, Option<Region>, f64); 3] = [
        (Condition::Bounded, None, 1.0),
        (Condition::Pass, Some(Region::Pass), eps),
        (Condition::Stop, Some(Region::Stop), eps),
    ];
    for (condition, region, bound) in checks {
        let inside = |e: f64| region.map_or(true, |r| spec.region_of_energy(e) == r);
        let quantity = |e: f64| {
            let f = poly.filter_value(spec, e);
            if condition == Condition::Pass {
                1.0 - f
            } else {
                f
            }
        };
        let q: Vec<f64> = values
            .iter()
            .map(|f| {
                if condition == Condition::Pass {
                    1.0 - f
                } else {
                    *f
                }
            })
            .collect();
        let idx: Vec<usize> = (0..CERTIFY_POINTS)
            .filter(|i| inside(energies[*i]))
            .collect();
        if idx.is_empty() {
            continue;
        }
        let (lo_e, hi_e) = (energies[idx[0]], energies[*idx.last().unwrap()]);
        let mut worst = f64::NEG_INFINITY;
        for (pos, &i) in idx.iter().enumerate() {
            worst = worst.max(q[i]);
            if q[i] < 0.1 * bound {
                continue;
            }
            let left = pos > 0 && q[idx[pos - 1]] > q[i];
            let right = pos + 1 < idx.len() && q[idx[pos + 1]] >= q[i];
            if left || right {
                continue;
            }
            let a = (energies[i] - 2.0 * h).max(lo_e);
            let b = (energies[i] + 2.0 * h).min(hi_e);
            let (mut e_best, mut q_best) = math::golden_max(quantity, a, b, REFINE_ITERS);
            if q[i] > q_best {
                e_best = energies[i];
                q_best = q[i];
            }
            worst = worst.max(q_best);
            if q_best > bound {
                violations.push(Violation {
                    energy: e_best,
                    condition,
                    value: q_best,
                    bound,
                });
            }
        }
        match condition {
            Condition::Bounded => max_value = worst,
            Condition::Pass => max_pass_error = worst,
            Condition::Stop => max_stop_value = worst,
        }
    }
    violations.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    FitReport {
        degree: poly.degree(),
        samples: None,
        residual: None,
        passed: violations.is_empty(),
        violations,
        max_pass_error,
        max_stop_value,
        max_value,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSearch {
    pub degree: usize,
    pub poly: ChebyshevEvenPoly,
    pub report: FitReport,
    /// Every degree probed, with its verdict, in probe order.
    pub probes: Vec<(usize, bool)>,
}

/// Smallest even degree whose fit passes certification: doubling from 8,
/// then bisection over even degrees.
pub fn minimal_degree(spec: &QetuSpec, samples: usize) -> Result<DegreeSearch> {
    let mut probes = Vec::new();
    let probe = |d: usize,
                 probes: &mut Vec<(usize, bool)>|
     -> Result<Option<(ChebyshevEvenPoly, FitReport)>> {
        let (poly, report) = fit_polynomial(spec, d, samples)?;
        probes.push((d, report.passed));
        Ok(if report.passed {
            Some((poly, report))
        } else {
            None
        })
    };

    let mut lo = 0;
    let mut d = 8;
    let mut best = loop {
        if d > MAX_DEGREE || d > samples {
            return Err(Error::NoFitFound { max_degree: lo });
        }
        if let Some(found) = probe(d, &mut probes)? {
            break found;
        }
        lo = d;
        d *= 2;
    };
    let mut hi = d;
    while hi - lo > 2 {
        let mid = (lo + hi) / 4 * 2;
        match probe(mid, &mut probes)? {
            Some(found) => {
                hi = mid;
                best = found;
            }
            None => lo = mid,
        }
    }
    Ok(DegreeSearch {
        degree: hi,
        poly: best.0,
        report: best.1,
        probes,
    })
}

/// QPE resources for a Kaiser filter meeting the same specification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaiserQueries {
    pub qubits: u32,
    /// `N = 2^n` controlled evolutions.
    pub size: usize,
    pub alpha: f64,
    pub delta_measured: f64,
    /// Smallest cutoff whose pass band covers `E_targ`.
    pub cutoff: usize,
}

/// Smallest `α` (to 1e−4) with `ε_max(α) ≤ ε` on the given grid.
pub fn kaiser_alpha_for(epsilon: f64, grid: &QpeGrid) -> Result<f64> {
    let (mut lo, mut hi) = (0.5, 16.0);
    if kaiser_eps_max(hi, grid)? > epsilon {
        return Err(out_of_range(
            "epsilon",
            epsilon,
            "reachable with alpha <= 16",
        ));
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if kaiser_eps_max(mid, grid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Range and step of the `α` scan above the smallest admissible `α`.
const ALPHA_SCAN_SPAN: f64 = 3.0;
const ALPHA_SCAN_STEP: f64 = 0.05;
/// Relative slack, in units of `2δ`, when matching a measured Kaiser
/// transition against the specification.
pub const KAISER_MATCH_TOL: f64 = 0.02;

/// Smallest `n` for which some Kaiser window with `ε_max ≤ ε` has a
/// measured transition `2δ` no wider than the specification and a cutoff
/// whose pass band reaches `E_targ`, both up to [`KAISER_MATCH_TOL`]. For
/// each `n` the `α` with the narrowest transition is used.
pub fn queries_qpe_kaiser(spec: &QetuSpec) -> Result<KaiserQueries> {
    for n in 3..=MAX_QUBITS {
        let grid = QpeGrid::new(n, spec.time())?;
        let size = grid.size();
        let Ok(alpha_min) = kaiser_alpha_for(spec.epsilon(), &grid) else {
            continue;
        };
        let config = FilterConfig::new(grid, size / 4 - 1)?;
        let steps = (ALPHA_SCAN_SPAN / ALPHA_SCAN_STEP) as usize;
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=steps {
            let alpha = alpha_min + i as f64 * ALPHA_SCAN_STEP;
            let params = match kaiser_params(alpha, &grid, &config, spec.epsilon()) {
                Ok(p) => p,
                Err(Error::EmptyTarget) => break,
                Err(e) => return Err(e),
            };
            match best {
                Some((_, d)) if params.delta_measured >= d => {
                    if params.delta_measured > 1.2 * d {
                        break;
                    }
                }
                _ => best = Some((alpha, params.delta_measured)),
            }
        }
        let Some((alpha, delta)) = best else {
            continue;
        };
        let slack = KAISER_MATCH_TOL * spec.two_delta();
        if 2.0 * delta > spec.two_delta() + slack {
            continue;
        }
        let cutoff = (1..size - 1).find(|y| grid.omega(y + 1) - delta >= spec.e_targ() - slack);
        if let Some(cutoff) = cutoff {
            return Ok(KaiserQueries {
                qubits: n,
                size,
                alpha,
                delta_measured: delta,
                cutoff,
            });
        }
    }
    Err(Error::ResourceCap {
        what: "QPE register size",
        limit: MAX_QUBITS as usize,
    })
}
