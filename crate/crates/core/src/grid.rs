//! The QPE frequency grid.

use crate::error::{out_of_range, Result};
use crate::math::{rem_period, TAU};

/// Largest supported ancilla register.
pub const MAX_QUBITS: u32 = 20;

/// `N = 2^n` frequency points `ω_y = 2πy/(NT)` for an `n`-qubit ancilla
/// register and evolution time `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpeGrid {
    qubits: u32,
    time: f64,
}

impl QpeGrid {
    pub fn new(qubits: u32, time: f64) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&qubits) {
            return Err(out_of_range("n", qubits as f64, "1 <= n <= 20"));
        }
        if !(time.is_finite() && time > 0.0) {
            return Err(out_of_range("T", time, "finite and > 0"));
        }
        Ok(QpeGrid { qubits, time })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    /// `N = 2^n`.
    pub fn size(&self) -> usize {
        1usize << self.qubits
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Energy period `2π/T`.
    pub fn period(&self) -> f64 {
        TAU / self.time
    }

    /// Grid spacing `2π/(NT)`.
    pub fn spacing(&self) -> f64 {
        TAU / (self.size() as f64 * self.time)
    }

    /// `ω_y` for integer `y`.
    pub fn omega(&self, y: usize) -> f64 {
        TAU * y as f64 / (self.size() as f64 * self.time)
    }

    /// `ω` at a fractional grid position, e.g. `ω_{y+1/2}`.
    pub fn omega_at(&self, position: f64) -> f64 {
        TAU * position / (self.size() as f64 * self.time)
    }

    /// Energy in units of grid cells, `E·NT/2π`.
    pub fn position(&self, energy: f64) -> f64 {
        energy * self.size() as f64 * self.time / TAU
    }

    /// Reduce an energy into `[0, 2π/T)`; QPE phases are modular.
    pub fn reduce(&self, energy: f64) -> f64 {
        rem_period(energy, self.period())
    }

    /// Cyclic distance between two energies.
    pub fn cyclic_distance(&self, a: f64, b: f64) -> f64 {
        let d = self.reduce(a - b);
        d.min(self.period() - d)
    }
}
