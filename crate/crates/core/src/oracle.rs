//! Brute-force statevector construction for diagonal Hamiltonians, kept
//! independent of the FFT response path.
//!
//! The inverse QFT is applied as the dense matrix
//! `Q⁻¹[y, j] = e^{-2πi yj/N}/√N`, which maps the prepared register
//! `a_j e^{iETj}` onto `A(y)` exactly.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{out_of_range, Error, Result};
use crate::grid::QpeGrid;
use crate::math::{self, sqrt, TAU};
use crate::window::Window;

pub const MAX_ORACLE_QUBITS: u32 = 12;
pub const MAX_ORACLE_STATES: usize = 4096;
/// Allowed deviation of `Σ|C_μ|²` from one.
pub const NORM_TOL: f64 = 1e-10;
/// Kept probability below which post-selection is reported as empty; the
/// dense transform leaves roughly `1e-32` of noise per entry.
pub const EMPTY_TOL: f64 = 1e-24;

/// `Σ_{y,μ} C_μ A_μ(y) |y⟩|φ_μ⟩` stored row-major in `(y, μ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    size: usize,
    states: usize,
    amps: Vec<Complex64>,
    weights: Vec<Complex64>,
}

impl JointState {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    pub fn amplitude(&self, y: usize, mu: usize) -> Complex64 {
        self.amps[y * self.states + mu]
    }

    /// `|amp(y, μ)|²`.
    pub fn probability(&self, y: usize, mu: usize) -> f64 {
        self.amplitude(y, mu).norm_sqr()
    }

    pub fn total_probability(&self) -> f64 {
        let p: Vec<f64> = self.amps.iter().map(|a| a.norm_sqr()).collect();
        math::pairwise_sum(&p)
    }
}

pub fn build_state(
    window: &Window,
    grid: &QpeGrid,
    energies: &[f64],
    weights: &[Complex64],
) -> Result<JointState> {
    if grid.qubits() > MAX_ORACLE_QUBITS {
        return Err(Error::ResourceCap {
            what: "oracle register size",
            limit: 1 << MAX_ORACLE_QUBITS,
        });
    }
    if energies.len() > MAX_ORACLE_STATES {
        return Err(Error::ResourceCap {
            what: "oracle state count",
            limit: MAX_ORACLE_STATES,
        });
    }
    if energies.len() != weights.len() {
        return Err(Error::LengthMismatch {
            expected: energies.len(),
            found: weights.len(),
        });
    }
    if energies.is_empty() {
        return Err(Error::Empty("states"));
    }
    let n = grid.size();
    if window.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: window.len(),
        });
    }
    let norm: Vec<f64> = weights.iter().map(|c| c.norm_sqr()).collect();
    let norm = math::pairwise_sum(&norm);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(out_of_range("Σ|C|²", norm, "1 within 1e-10"));
    }

    // Q⁻¹[y, j] depends on yj mod N only
    let scale = 1.0 / sqrt(n as f64);
    let roots: Vec<Complex64> = (0..n)
        .map(|k| math::cis(-TAU * k as f64 / n as f64) * scale)
        .collect();
    let s = energies.len();
    let mut amps = vec![Complex64::new(0.0, 0.0); n * s];
    let mut reg = vec![Complex64::new(0.0, 0.0); n];
    for (mu, (&e, &c)) in energies.iter().zip(weights).enumerate() {
        for (j, r) in reg.iter_mut().enumerate() {
            *r = math::cis(e * grid.time() * j as f64) * window.coeffs()[j];
        }
        for y in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, r) in reg.iter().enumerate() {
                acc += roots[(y * j) % n] * r;
            }
            amps[y * s + mu] = acc * c;
        }
    }
    Ok(JointState {
        size: n,
        states: s,
        amps,
        weights: weights.to_vec(),
    })
}

/// Weight of each `|φ_μ⟩` after keeping outcomes `y ≤ y_c`: for each kept
/// outcome, the post-measurement squared amplitude times the outcome
/// probability, summed and normalized over the kept outcomes.
pub fn postselect_expectation(state: &JointState, cutoff: usize) -> Result<Vec<f64>> {
    if cutoff >= state.size() {
        return Err(out_of_range("y_c", cutoff as f64, "y_c < N"));
    }
    let s = state.states();
    let mut per_state: Vec<Vec<f64>> = vec![Vec::with_capacity(cutoff + 1); s];
    for y in 0..=cutoff {
        let probs: Vec<f64> = (0..s).map(|mu| state.probability(y, mu)).collect();
        let outcome = math::pairwise_sum(&probs);
        if outcome <= 0.0 {
            continue;
        }
        for (mu, p) in probs.iter().enumerate() {
            per_state[mu].push(p / outcome * outcome);
        }
    }
    let kept: Vec<f64> = per_state.iter().map(|v| math::pairwise_sum(v)).collect();
    let total = math::pairwise_sum(&kept);
    if !(total > EMPTY_TOL) {
        return Err(Error::EmptyPostSelection);
    }
    Ok(kept.iter().map(|k| k / total).collect())
}
