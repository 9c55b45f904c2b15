//! End-to-end acceptance checks, one report line per criterion.
//!
//! Runs without the libtest harness. Each check prints `PASS` or `FAIL`
//! with the measured quantities. Checks listed in `EXPECTED_FAIL` are known
//! to be unattainable and are reported as `FAIL (expected)`; an unexpected
//! pass of such a check is an error, as is any other failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use qpefl::qpefl_core::filter::{renormalization, FilterConfig};
use qpefl::qpefl_core::gibbs::{
    reconstruct_filter_complex, sigma_closed_form, sigma_factor, sigma_limit, step_dft,
};
use qpefl::qpefl_core::math::fit_line;
use qpefl::qpefl_core::qetu::{minimal_degree, queries_qpe_kaiser, QetuSpec};
use qpefl::qpefl_core::response::{
    amplitude, amplitude_closed_form, amplitude_direct, kaiser_eps_max, tail_decay_exponent,
};
use qpefl::qpefl_core::spectral::{
    aliasing_peaks, two_step, Line, SpectralResult, Spectrum, Stage, TwoStepConfig,
};
use qpefl::qpefl_core::{Error, QpeGrid, Window, WindowKind};
use qpefl::verify::run_suites;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXPECTED_FAIL: &[&str] = &["3b"];

const KAISER3: WindowKind = WindowKind::Kaiser { alpha: 3.0 };
const WINDOWS: [WindowKind; 3] = [WindowKind::Rectangular, WindowKind::Sine, KAISER3];
const QETU_SAMPLES: usize = 12800;
const EPSILONS: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn grid(n: u32, t: f64) -> QpeGrid {
    QpeGrid::new(n, t).unwrap()
}

fn window(kind: WindowKind, g: &QpeGrid) -> Window {
    Window::new(kind, g).unwrap()
}

fn within(limit: Duration, start: Instant) -> (bool, f64) {
    let secs = start.elapsed().as_secs_f64();
    (secs < limit.as_secs_f64(), secs)
}

fn normalization() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut coeff_dev, mut prob_dev): (f64, f64) = (0.0, 0.0);
    for kind in WINDOWS {
        for n in 2..=12 {
            let g = grid(n, 1.0);
            let w = window(kind, &g);
            let norm: f64 = w.coeffs().iter().map(|a| a * a).sum();
            coeff_dev = coeff_dev.max((norm - 1.0).abs());
            for _ in 0..100 {
                let e = rng.random_range(-50.0..50.0);
                let total = amplitude(&w, &g, e).unwrap().total_probability();
                prob_dev = prob_dev.max((total - 1.0).abs());
            }
        }
    }
    let (fast, secs) = within(Duration::from_secs(10), start);
    outcome(
        coeff_dev <= 1e-12 && prob_dev <= 1e-12 && fast,
        format!("max |Σa²-1| = {coeff_dev:.1e}, max |ΣP-1| = {prob_dev:.1e}, {secs:.2} s"),
    )
}

fn closed_forms() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut dev: f64 = 0.0;
    for i in 0..1000 {
        let kind = if i % 2 == 0 {
            WindowKind::Rectangular
        } else {
            WindowKind::Sine
        };
        let g = grid(rng.random_range(2..=10), 1.0);
        let e = rng.random_range(-20.0..20.0);
        let direct = amplitude_direct(&window(kind, &g), &g, e).unwrap();
        let closed = amplitude_closed_form(kind, &g, e).unwrap();
        for (a, b) in direct.amps.iter().zip(&closed.amps) {
            dev = dev.max((a - b).norm());
        }
    }
    let (fast, secs) = within(Duration::from_secs(10), start);
    outcome(
        dev <= 1e-10 && fast,
        format!("max |A_closed - A_direct| = {dev:.1e}, {secs:.2} s"),
    )
}

fn tail_decay(kind: WindowKind, target: f64) -> Outcome {
    let g = grid(10, 1.0);
    match tail_decay_exponent(kind, &g, g.omega_at(300.5)) {
        Ok(slope) => outcome(
            (slope - target).abs() <= 0.5,
            format!("slope {slope:.3}, expected {target} ± 0.5"),
        ),
        Err(Error::DegenerateTail) => {
            let aside = tail_decay_exponent(kind, &g, g.omega_at(300.25)).unwrap();
            outcome(
                false,
                format!("tail vanishes identically at half-cell offset; slope at offset 0.25 is {aside:.3}"),
            )
        }
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn exactness() -> Outcome {
    let g = grid(6, 1.0);
    let yc = 15;
    let config = FilterConfig::new(g, yc).unwrap();
    let n = g.size();
    let rect = window(WindowKind::Rectangular, &g);
    let sine = window(WindowKind::Sine, &g);
    let (mut rect_dev, mut sine_dev, mut straddle_dev): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for y in 0..n {
        let r = renormalization(&rect, &g, &config, g.omega(y)).unwrap();
        rect_dev = rect_dev.max(r.deviation.abs());
        let s = renormalization(&sine, &g, &config, g.omega_at(y as f64 + 0.5)).unwrap();
        if y == yc || y == n - 1 {
            straddle_dev = straddle_dev.max((s.kept - 0.5).abs());
        } else {
            sine_dev = sine_dev.max(s.deviation.abs());
        }
    }
    outcome(
        rect_dev <= 1e-12 && sine_dev <= 1e-12 && straddle_dev <= 1e-12,
        format!(
            "rect max |ΔR| = {rect_dev:.1e}; sine max |ΔR| = {sine_dev:.1e} \
             (y' = {yc}, {} straddle the cut: |R - 1/2| = {straddle_dev:.1e})",
            n - 1
        ),
    )
}

fn eps_max_law() -> Outcome {
    let at3 = kaiser_eps_max(3.0, &grid(6, 1.0)).unwrap();
    let alphas: Vec<f64> = (2..=8).map(f64::from).collect();
    let curve = |n| -> Vec<f64> {
        alphas
            .iter()
            .map(|a| kaiser_eps_max(*a, &grid(n, 1.0)).unwrap().log10())
            .collect()
    };
    let (c6, c10) = (curve(6), curve(10));
    let fit = fit_line(&alphas, &c6).unwrap();
    let spread = c6
        .iter()
        .zip(&c10)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let ratio = at3 / 1e-7;
    outcome(
        (0.1..=10.0).contains(&ratio) && fit.r_squared >= 0.95 && spread <= 1.0,
        format!(
            "eps_max(3, n=6) = {at3:.2e}; R² = {:.4} (slope {:.2} decades/α); max |Δlog10| n=6 vs 10 = {spread:.2}",
            fit.r_squared, fit.slope
        ),
    )
}

fn gibbs_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut dev, mut imag): (f64, f64) = (0.0, 0.0);
    for kind in WINDOWS {
        for n in 4..=8 {
            let g = grid(n, 1.0);
            let w = window(kind, &g);
            let yc = g.size() / 4 - 1;
            let config = FilterConfig::new(g, yc).unwrap();
            let sigma = sigma_factor(&w, &g).unwrap();
            let step = step_dft(&g, yc).unwrap();
            for _ in 0..200 {
                let e = rng.random_range(0.0..g.period());
                let z = reconstruct_filter_complex(&sigma, &step, e).unwrap();
                let r = renormalization(&w, &g, &config, e).unwrap().kept;
                dev = dev.max((z.re - r).abs());
                imag = imag.max(z.im.abs());
            }
        }
    }
    outcome(
        dev <= 1e-10 && imag <= 1e-10,
        format!("max |R_fourier - R| = {dev:.1e}, max |Im| = {imag:.1e}"),
    )
}

fn sigma_forms() -> Outcome {
    let mut dev: f64 = 0.0;
    for kind in [WindowKind::Rectangular, WindowKind::Sine] {
        for n in 2..=12 {
            let g = grid(n, 1.0);
            let sigma = sigma_factor(&window(kind, &g), &g).unwrap();
            for j in 0..g.size() {
                dev = dev
                    .max((sigma.get(j as isize) - sigma_closed_form(kind, &g, j).unwrap()).abs());
            }
        }
    }
    let mut monotone = true;
    let mut trail = Vec::new();
    for kind in [WindowKind::Rectangular, WindowKind::Sine] {
        let gaps: Vec<f64> = [6u32, 8, 10]
            .iter()
            .map(|&n| {
                let g = grid(n, 1.0);
                let sigma = sigma_factor(&window(kind, &g), &g).unwrap();
                (1..1000)
                    .map(|k| {
                        let x = k as f64 / 1000.0;
                        let j = (x * g.size() as f64).floor() as isize;
                        (sigma.get(j) - sigma_limit(kind, x).unwrap()).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        monotone &= gaps.windows(2).all(|w| w[1] < w[0]);
        trail.push(format!(
            "{}: {:.1e} > {:.1e} > {:.1e}",
            kind.name(),
            gaps[0],
            gaps[1],
            gaps[2]
        ));
    }
    outcome(
        dev <= 1e-12 && monotone,
        format!(
            "max |σ - closed form| = {dev:.1e}; sup distance to limit over N = 64/256/1024: {}",
            trail.join(", ")
        ),
    )
}

fn fig8b_spec(epsilon: f64) -> QetuSpec {
    QetuSpec::new(1.4430, 0.2556, epsilon, 1.0).unwrap()
}

fn qetu_degree() -> Outcome {
    let start = Instant::now();
    let search = minimal_degree(&fig8b_spec(1e-2), QETU_SAMPLES).unwrap();
    let (fast, secs) = within(Duration::from_secs(600), start);
    let d = search.degree;
    outcome(
        (124..=166).contains(&d)
            && search.report.queries() * 2 == d
            && search.report.passed
            && fast,
        format!(
            "d_min = {d}, queries = {}, {secs:.1} s",
            search.report.queries()
        ),
    )
}

struct Scaling {
    queries: Vec<usize>,
    fit: qpefl::qpefl_core::math::LineFit,
    by_samples: Vec<[usize; 3]>,
}

fn qetu_scaling() -> Scaling {
    let queries: Vec<usize> = EPSILONS
        .iter()
        .map(|&e| {
            minimal_degree(&fig8b_spec(e), QETU_SAMPLES)
                .unwrap()
                .report
                .queries()
        })
        .collect();
    let xs: Vec<f64> = EPSILONS.iter().map(|e| -e.log10()).collect();
    let ys: Vec<f64> = queries.iter().map(|&q| q as f64).collect();
    let fit = fit_line(&xs, &ys).unwrap();
    let by_samples = EPSILONS
        .iter()
        .map(|&e| {
            [800, 3200, QETU_SAMPLES].map(|m| minimal_degree(&fig8b_spec(e), m).unwrap().degree)
        })
        .collect();
    Scaling {
        queries,
        fit,
        by_samples,
    }
}

fn scaling_outcome(s: &Scaling) -> Outcome {
    let monotone = s.by_samples.iter().all(|d| d[0] >= d[1] && d[1] >= d[2]);
    outcome(
        s.fit.r_squared >= 0.95 && monotone,
        format!(
            "queries {:?} at ε = 1e-2..1e-5, R² = {:.4}; d_min at M = 800/3200/12800: {:?}",
            s.queries, s.fit.r_squared, s.by_samples
        ),
    )
}

fn kaiser_proximity(s: &Scaling) -> Outcome {
    let predicted = s.fit.eval(7.0);
    let kaiser = queries_qpe_kaiser(&fig8b_spec(1e-7)).unwrap();
    let ratio = predicted / kaiser.size as f64;
    outcome(
        (0.5..=2.0).contains(&ratio),
        format!(
            "QETU extrapolated to ε = 1e-7: {predicted:.1} queries; Kaiser QPE N = {} (α = {:.2}); ratio {ratio:.2}",
            kaiser.size, kaiser.alpha
        ),
    )
}

fn oracle_suites() -> (Outcome, Outcome) {
    let (mut oracle, mut post): (f64, f64) = (0.0, 0.0);
    let mut ok = (true, true);
    for (i, kind) in WINDOWS.into_iter().enumerate() {
        for n in [4u32, 6, 8] {
            let g = grid(n, 1.0);
            let suites = run_suites(
                &window(kind, &g),
                &g,
                g.size() / 4 - 1,
                8,
                50,
                100 + i as u64,
            )
            .unwrap();
            oracle = oracle.max(suites[0].max_deviation);
            post = post.max(suites[1].max_deviation);
            ok.0 &= suites[0].passed;
            ok.1 &= suites[1].passed;
        }
    }
    (
        outcome(
            ok.0,
            format!(
                "max |P_oracle - |C|²P| = {oracle:.1e} over 3 windows × n = 4/6/8 × 50 spectra"
            ),
        ),
        outcome(
            ok.1,
            format!("max |post-selected - |C|²R/Σ| = {post:.1e} over 450 cases"),
        ),
    )
}

fn three_band() -> Spectrum {
    let mut lines = Vec::new();
    for i in 0..16 {
        lines.push(Line {
            energy: 0.70 + 0.01 * i as f64,
            weight: 1.0,
        });
        lines.push(Line {
            energy: -1.35 + 0.02 * i as f64,
            weight: 2.0,
        });
    }
    lines.push(Line {
        energy: -1.953,
        weight: 5.0,
    });
    Spectrum::new(lines).unwrap()
}

fn two_step_config(kind: WindowKind) -> TwoStepConfig {
    let stage1 = Stage {
        kind,
        grid: grid(6, 1.0),
    };
    let stage2 = Stage {
        kind: WindowKind::Sine,
        grid: grid(8, 4.0),
    };
    TwoStepConfig::new(stage1, 15, stage2).unwrap()
}

fn pipeline() -> Outcome {
    let s = three_band();
    let rect_cfg = two_step_config(WindowKind::Rectangular);
    let kaiser_cfg = two_step_config(KAISER3);
    let rect = two_step(&s, &rect_cfg).unwrap();
    let kaiser = two_step(&s, &kaiser_cfg).unwrap();
    let g2 = rect_cfg.stage2.grid;

    let conservation = (rect.raw.iter().sum::<f64>() - s.total_weight()).abs();
    let target_error = |r: &SpectralResult| {
        r.total_error()
            .iter()
            .enumerate()
            .filter(|(y, _)| (0.65..=0.90).contains(&g2.omega(*y)))
            .map(|(_, e)| e.abs())
            .fold(0.0, f64::max)
    };
    let (er, ek) = (target_error(&rect), target_error(&kaiser));

    let mut alias_ok = true;
    let mut alias_note = Vec::new();
    for (name, cfg, r) in [("rect", &rect_cfg, &rect), ("kaiser", &kaiser_cfg, &kaiser)] {
        let matches = aliasing_peaks(r, &s, cfg, &r.error_cut);
        let deep = matches
            .iter()
            .find(|m| (m.energy + 1.953).abs() < 1e-12)
            .unwrap();
        let hit = deep
            .peak
            .map(|p| g2.cyclic_distance(g2.omega(p.index), deep.expected) <= g2.spacing())
            .unwrap_or(false);
        alias_ok &= hit && deep.r == 2;
        alias_note.push(format!(
            "{name}: E = -1.953 folds to {:.4} (r = {}), {}",
            deep.expected,
            deep.r,
            if hit { "detected" } else { "missed" }
        ));
    }

    let q = kaiser.queries;
    outcome(
        conservation <= 1e-10 && er >= 1e4 * ek && alias_ok && q.filtered < q.naive,
        format!(
            "(a) |ΣS_raw - Σw| = {conservation:.1e}; (b) target error rect {er:.1e} vs kaiser {ek:.1e} (ratio {:.1e}); \
             (c) {}; (d) queries filtered {} < naive {}",
            er / ek,
            alias_note.join("; "),
            q.filtered,
            q.naive
        ),
    )
}

fn run_cli(dir: &Path, spectrum: &Path) -> Vec<(String, Vec<u8>)> {
    let bin = env!("CARGO_BIN_EXE_qpefl");
    let out = |name: &str| dir.join(name).to_string_lossy().into_owned();
    let prefix = out("P");
    let spectrum = spectrum.to_string_lossy().into_owned();
    let commands: Vec<Vec<String>> = vec![
        vec![
            "window",
            "--kind",
            "kaiser",
            "--alpha",
            "3",
            "--n",
            "6",
            "--out",
            &out("window.csv"),
        ],
        vec![
            "response",
            "--kind",
            "sine",
            "--n",
            "8",
            "--energy",
            "1.2345",
            "--log",
            "--out",
            &out("response.csv"),
        ],
        vec![
            "filter",
            "--kind",
            "kaiser",
            "--alpha",
            "3",
            "--n",
            "6",
            "--m",
            "2",
            "--samples",
            "2000",
            "--out",
            &out("filter.csv"),
        ],
        vec![
            "sigma",
            "--kind",
            "sine",
            "--n",
            "7",
            "--out",
            &out("sigma.csv"),
        ],
        vec![
            "qetu",
            "--e-targ",
            "1.0589",
            "--two-delta",
            "1.0232",
            "--eps",
            "1e-2,1e-3",
            "--M",
            "800",
            "--out",
            &out("qetu.csv"),
        ],
        vec![
            "spectrum",
            "--in",
            &spectrum,
            "--stage1-kind",
            "kaiser",
            "--alpha",
            "3",
            "--n",
            "6",
            "--yc",
            "15",
            "--n2",
            "8",
            "--T2",
            "4",
            "--out-prefix",
            &prefix,
        ],
        vec![
            "verify",
            "--seed",
            "7",
            "--n",
            "6",
            "--kind",
            "sine",
            "--cases",
            "20",
            "--out",
            &out("verify.csv"),
        ],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    for (i, args) in commands.iter().enumerate() {
        let status = Command::new(bin)
            .args(args)
            .env("QPEFL_THREADS", if i % 2 == 0 { "1" } else { "4" })
            .status()
            .unwrap();
        assert!(status.success(), "qpefl {args:?} failed");
    }
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let input = tempfile::tempdir().unwrap();
    let spectrum = input.path().join("spectrum.csv");
    let body: String = three_band()
        .lines()
        .iter()
        .map(|l| format!("{},{}\n", l.energy, l.weight))
        .collect();
    std::fs::write(&spectrum, format!("energy,weight\n{body}")).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_cli(a.path(), &spectrum);
    let second = run_cli(b.path(), &spectrum);
    let differing: Vec<&str> = first
        .iter()
        .zip(&second)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| x.0.as_str())
        .collect();
    let same = first.len() == second.len() && differing.is_empty();
    outcome(
        same && !first.is_empty(),
        format!(
            "{} output files compared across two runs, {} differ {:?}",
            first.len(),
            differing.len(),
            differing
        ),
    )
}

fn main() {
    let mut unexpected = 0;
    let mut report = |id: &str, title: &str, o: Outcome| {
        let xfail = EXPECTED_FAIL.contains(&id);
        let status = match (o.passed, xfail) {
            (true, false) => "PASS",
            (false, true) => "FAIL (expected)",
            (true, true) => "PASS (unexpected)",
            (false, false) => "FAIL",
        };
        if o.passed == xfail {
            unexpected += 1;
        }
        println!("criterion {id:<3} {status:<16} {title}: {}", o.detail);
    };

    report("1", "normalization", normalization());
    report("2", "closed-form amplitudes", closed_forms());
    report(
        "3a",
        "tail decay, rectangular",
        tail_decay(WindowKind::Rectangular, -2.0),
    );
    report("3b", "tail decay, sine", tail_decay(WindowKind::Sine, -4.0));
    report("4", "exactness points", exactness());
    report("5", "Kaiser leakage floor", eps_max_law());
    report("6", "Fourier reconstruction", gibbs_reconstruction());
    report("7", "σ-factor closed forms", sigma_forms());
    report("8", "QETU minimal degree", qetu_degree());
    let scaling = qetu_scaling();
    report("9", "QETU scaling", scaling_outcome(&scaling));
    report("10", "Kaiser vs QETU", kaiser_proximity(&scaling));
    let (oracle, post) = oracle_suites();
    report("11", "statevector oracle", oracle);
    report("12", "post-selection identity", post);
    report("13", "two-step pipeline", pipeline());
    report("14", "determinism", determinism());

    if unexpected > 0 {
        println!("{unexpected} unexpected result(s)");
        std::process::exit(1);
    }
}
