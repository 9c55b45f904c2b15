//! Eigenvalue filtering with quantum phase estimation (QPE), evaluated
//! analytically per eigenstate.
//!
//! The crate models the ancilla register of a QPE circuit prepared in a
//! window state `Σ_j a_j |j⟩`, and works out what happens to each eigenstate
//! of the system register when outcomes above a cutoff index are discarded:
//!
//! * [`grid`] and [`window`]: the frequency grid `ω_y = 2πy/(NT)` and the
//!   rectangular, sine and Kaiser window coefficients ([`bessel`] supplies `I₀`).
//! * [`response`]: per-eigenstate outcome amplitudes and probabilities, closed
//!   forms, tail decay and the Kaiser leakage estimate.
//! * [`filter`]: the kept-weight factor `R` and its deviation from the ideal
//!   step filter, plus the measured transition width of the Kaiser filter.
//! * [`gibbs`]: the truncated-Fourier view of `R` with window autocorrelation
//!   (σ-factor) smoothing.
//! * [`qetu`]: even Chebyshev minimax fits for the single-ancilla polynomial
//!   filter and the search for its minimal degree.
//! * [`spectral`]: the two-step coarse-filter / fine-grid spectral estimator.
//! * [`oracle`]: a dense statevector construction used to cross-check all of
//!   the above.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, parallelism
//! and the command-line driver live in the companion `qpefl` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bessel;
mod error;
mod fft;
pub mod filter;
pub mod gibbs;
pub mod grid;
pub mod math;
pub mod oracle;
pub mod qetu;
pub mod response;
pub mod spectral;
pub mod window;

pub use error::{Error, Result};
pub use grid::QpeGrid;
pub use num_complex::Complex64;
pub use window::{Window, WindowKind};
