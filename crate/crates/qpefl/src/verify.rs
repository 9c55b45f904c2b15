//! Randomized cross-checks of the analytic response against the dense
//! statevector construction.

use qpefl_core::filter::{renormalization, FilterConfig};
use qpefl_core::oracle::{build_state, postselect_expectation};
use qpefl_core::response::amplitude;
use qpefl_core::{Complex64, QpeGrid, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;

pub const ORACLE_TOL: f64 = 1e-10;
pub const POSTSELECT_TOL: f64 = 1e-12;
pub const UNITARITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub cases: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy)]
struct CaseDeviation {
    oracle: f64,
    postselect: f64,
    unitarity: f64,
}

/// Random energies spread over three periods and random complex weights
/// normalized to one.
pub fn random_case(
    rng: &mut ChaCha8Rng,
    config: &FilterConfig,
    states: usize,
) -> (Vec<f64>, Vec<Complex64>) {
    let period = config.grid().period();
    let mut energies: Vec<f64> = (0..states)
        .map(|_| rng.random_range(-period..2.0 * period))
        .collect();
    // one line in the kept arc so the post-selected ensemble is not empty
    let wrap = rng.random_range(-1..=1) as f64 * period;
    energies[0] = rng.random_range(0.0..=config.omega_c()) + wrap;
    let raw: Vec<Complex64> = (0..states)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    (energies, raw.iter().map(|c| c / norm).collect())
}

fn run_case(
    window: &Window,
    grid: &QpeGrid,
    config: &FilterConfig,
    energies: &[f64],
    weights: &[Complex64],
) -> Result<CaseDeviation> {
    let state = build_state(window, grid, energies, weights)?;
    let mut oracle: f64 = 0.0;
    let mut kept = Vec::with_capacity(energies.len());
    for (mu, (&e, c)) in energies.iter().zip(weights).enumerate() {
        let curve = amplitude(window, grid, e)?;
        for (y, p) in curve.probs.iter().enumerate() {
            oracle = oracle.max((state.probability(y, mu) - c.norm_sqr() * p).abs());
        }
        kept.push(c.norm_sqr() * renormalization(window, grid, config, e)?.kept);
    }
    let total: f64 = kept.iter().sum();
    let postselect = match postselect_expectation(&state, config.cutoff()) {
        Ok(v) => v
            .iter()
            .zip(&kept)
            .map(|(a, b)| (a - b / total).abs())
            .fold(0.0, f64::max),
        Err(qpefl_core::Error::EmptyPostSelection) if total < 1e-20 => 0.0,
        Err(e) => return Err(e.into()),
    };
    Ok(CaseDeviation {
        oracle,
        postselect,
        unitarity: (state.total_probability() - 1.0).abs(),
    })
}

/// Runs `cases` random cases; case `i` draws from stream `i` of a ChaCha8
/// generator seeded with `seed`, so results do not depend on scheduling.
pub fn run_suites(
    window: &Window,
    grid: &QpeGrid,
    cutoff: usize,
    states: usize,
    cases: usize,
    seed: u64,
) -> Result<Vec<SuiteResult>> {
    let config = FilterConfig::new(*grid, cutoff)?;
    let deviations = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (energies, weights) = random_case(&mut rng, &config, states);
            run_case(window, grid, &config, &energies, &weights)
        })
        .collect::<Result<Vec<_>>>()?;
    let max = |f: fn(&CaseDeviation) -> f64| deviations.iter().map(f).fold(0.0, f64::max);
    let suite = |suite, dev: f64, tolerance: f64| SuiteResult {
        suite,
        cases,
        max_deviation: dev,
        tolerance,
        passed: dev <= tolerance,
    };
    Ok(vec![
        suite("oracle_equivalence", max(|d| d.oracle), ORACLE_TOL),
        suite(
            "postselection_identity",
            max(|d| d.postselect),
            POSTSELECT_TOL,
        ),
        suite("unitarity", max(|d| d.unitarity), UNITARITY_TOL),
    ])
}
