//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use qpefl_core::filter::{filter_curve, uniform_samples, FilterConfig};
use qpefl_core::gibbs::sigma_factor;
use qpefl_core::qetu::{fit_polynomial, minimal_degree, queries_qpe_kaiser, QetuSpec};
use qpefl_core::response::amplitude;
use qpefl_core::spectral::{aliasing_peaks, two_step, Stage, TwoStepConfig};
use qpefl_core::{QpeGrid, Window, WindowKind};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{self, fmt_f64, write_csv};
use crate::verify::run_suites;

#[derive(Debug, Parser)]
#[command(
    name = "qpefl",
    version,
    about = "Window-based QPE eigenvalue filters and their analysis"
)]
pub struct Cli {
    /// Worker threads for per-sample and per-case maps.
    #[arg(long, global = true, env = "QPEFL_THREADS", default_value_t = 1,
          value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: u16,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Window coefficients a_j.
    Window(WindowArgs),
    /// Outcome distribution P(y) for one eigenvalue.
    Response(ResponseArgs),
    /// Kept probability R(E) and its deviation from the ideal filter.
    Filter(FilterArgs),
    /// Window autocorrelation σ_j.
    Sigma(SigmaArgs),
    /// Minimal degree of the QETU polynomial filter.
    Qetu(QetuArgs),
    /// Two-step filtered spectral estimate of a spectrum file.
    Spectrum(SpectrumArgs),
    /// Cross-check the analytic response against the statevector oracle.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Rect,
    Sine,
    Kaiser,
}

fn window_kind(kind: KindArg, alpha: Option<f64>, flag: &str) -> Result<WindowKind> {
    Ok(match kind {
        KindArg::Rect => WindowKind::Rectangular,
        KindArg::Sine => WindowKind::Sine,
        KindArg::Kaiser => WindowKind::Kaiser {
            alpha: alpha.ok_or_else(|| {
                Error::Invalid(format!("{flag} is required for the kaiser window"))
            })?,
        },
    })
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(_) => Err("must be a finite number > 0".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn finite(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err("must be finite".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn count(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn state_count(s: &str) -> std::result::Result<usize, String> {
    match count(s)? {
        v if v <= qpefl_core::oracle::MAX_ORACLE_STATES => Ok(v),
        _ => Err(format!(
            "must be at most {}",
            qpefl_core::oracle::MAX_ORACLE_STATES
        )),
    }
}

fn open_unit(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v < 1.0 => Ok(v),
        Ok(_) => Err("must lie in (0, 1)".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WindowOpts {
    /// Window function.
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Kaiser shape parameter.
    #[arg(long, value_parser = positive, required_if_eq("kind", "kaiser"))]
    pub alpha: Option<f64>,
    /// Ancilla qubits; N = 2^n.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n: u32,
}

impl WindowOpts {
    fn kind(&self) -> Result<WindowKind> {
        window_kind(self.kind, self.alpha, "--alpha")
    }
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    #[command(flatten)]
    pub window: WindowOpts,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub window: WindowOpts,
    /// Evolution time per controlled step.
    #[arg(long = "T", default_value_t = 1.0, value_parser = positive)]
    pub time: f64,
    /// Eigenvalue E.
    #[arg(long, value_parser = finite)]
    pub energy: f64,
    /// Add a log10(P) column.
    #[arg(long)]
    pub log: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("cut").required(true).args(["yc", "m"])))]
pub struct FilterArgs {
    #[command(flatten)]
    pub window: WindowOpts,
    #[arg(long = "T", default_value_t = 1.0, value_parser = positive)]
    pub time: f64,
    /// Keep outcomes y ≤ yc.
    #[arg(long, conflicts_with = "m")]
    pub yc: Option<usize>,
    /// Keep outcomes whose leading m bits are zero.
    #[arg(long)]
    pub m: Option<u32>,
    /// Uniform energy samples over one period.
    #[arg(long, default_value_t = qpefl_core::filter::DEFAULT_CURVE_SAMPLES,
          value_parser = count)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SigmaArgs {
    #[command(flatten)]
    pub window: WindowOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QetuArgs {
    /// Pass-band width E_targ.
    #[arg(long = "e-targ", value_parser = positive)]
    pub e_targ: f64,
    /// Transition width 2δ.
    #[arg(long = "two-delta", value_parser = positive)]
    pub two_delta: f64,
    /// Tolerances ε, comma separated.
    #[arg(long, value_parser = open_unit, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long = "T", default_value_t = 1.0, value_parser = positive)]
    pub time: f64,
    /// Fitting grid sizes, comma separated.
    #[arg(long = "M", value_delimiter = ',', required = true,
          value_parser = count)]
    pub samples: Vec<usize>,
    /// Fit this even degree instead of searching for the minimal one.
    #[arg(long)]
    pub degree: Option<usize>,
    /// Write the coefficients of the (single) fitted polynomial.
    #[arg(long = "dump-poly")]
    pub dump_poly: Option<PathBuf>,
    /// Also report the Kaiser QPE register size meeting this ε.
    #[arg(long = "kaiser-eps", value_parser = open_unit)]
    pub kaiser_eps: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Spectrum CSV with `energy,weight` rows.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long = "stage1-kind", value_enum)]
    pub stage1_kind: KindArg,
    /// Kaiser α of the first stage.
    #[arg(long, value_parser = positive, required_if_eq("stage1_kind", "kaiser"))]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n: u32,
    #[arg(long = "T", default_value_t = 1.0, value_parser = positive)]
    pub time: f64,
    #[arg(long)]
    pub yc: usize,
    #[arg(long = "stage2-kind", value_enum, default_value = "sine")]
    pub stage2_kind: KindArg,
    /// Kaiser α of the second stage.
    #[arg(long, value_parser = positive, required_if_eq("stage2_kind", "kaiser"))]
    pub alpha2: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    pub n2: u32,
    #[arg(long = "T2", value_parser = positive)]
    pub time2: f64,
    /// Flip energy signs so the low-pass filter keeps the top of the spectrum.
    #[arg(long)]
    pub negate: bool,
    /// Subtract E0 from every energy at load time.
    #[arg(long, default_value_t = 0.0, value_parser = finite)]
    pub shift: f64,
    /// Units tag carried into the report.
    #[arg(long, default_value = "")]
    pub units: String,
    #[arg(long, default_value = "")]
    pub label: String,
    #[arg(long = "out-prefix")]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=12))]
    pub n: u32,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_parser = positive, required_if_eq("kind", "kaiser"))]
    pub alpha: Option<f64>,
    #[arg(long = "T", default_value_t = 1.0, value_parser = positive)]
    pub time: f64,
    /// Eigenstates per case.
    #[arg(long, default_value_t = 8,
          value_parser = state_count)]
    pub states: usize,
    /// Random cases per suite.
    #[arg(long, default_value_t = 20,
          value_parser = count)]
    pub cases: usize,
    /// Cutoff for the post-selection suite; N/4 − 1 (at least 1) by default.
    #[arg(long)]
    pub yc: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv` and runs it; usage errors are returned as clap errors so
/// the caller can pick the exit code.
pub fn run_from<I, T>(
    argv: I,
    stdout: &mut dyn Write,
) -> std::result::Result<Result<()>, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(run(&cli, stdout))
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads as usize)
        .build()?;
    let mut buf = Vec::new();
    let status = pool.install(|| match &cli.command {
        Command::Window(a) => cmd_window(a, &mut buf),
        Command::Response(a) => cmd_response(a, &mut buf),
        Command::Filter(a) => cmd_filter(a, &mut buf),
        Command::Sigma(a) => cmd_sigma(a, &mut buf),
        Command::Qetu(a) => cmd_qetu(a, &mut buf),
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a, &mut buf),
    });
    stdout
        .write_all(&buf)
        .and_then(|()| stdout.flush())
        .map_err(|e| Error::io("<stdout>", e))?;
    status
}

fn emit(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    config: &impl Serialize,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    match out {
        Some(path) => {
            let file = io::create(path)?;
            write_csv(file, config, header, rows)
        }
        None => write_csv(stdout, config, header, rows),
    }
}

#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    command: &'a str,
    #[serde(flatten)]
    args: T,
}

fn cmd_window(a: &WindowArgs, stdout: &mut dyn Write) -> Result<()> {
    let grid = QpeGrid::new(a.window.n, 1.0)?;
    let window = Window::new(a.window.kind()?, &grid)?;
    let rows = window
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| vec![j.to_string(), fmt_f64(*c)]);
    let echo = Echo {
        command: "window",
        args: &a.window,
    };
    emit(a.out.as_deref(), stdout, &echo, &["j", "a_j"], rows)
}

fn cmd_response(a: &ResponseArgs, stdout: &mut dyn Write) -> Result<()> {
    let grid = QpeGrid::new(a.window.n, a.time)?;
    let window = Window::new(a.window.kind()?, &grid)?;
    let curve = amplitude(&window, &grid, a.energy)?;
    let rows = curve.probs.iter().enumerate().map(|(y, p)| {
        let mut row = vec![y.to_string(), fmt_f64(grid.omega(y)), fmt_f64(*p)];
        if a.log {
            row.push(fmt_f64(p.log10()));
        }
        row
    });
    #[derive(Serialize)]
    struct Args<'a> {
        #[serde(flatten)]
        window: &'a WindowOpts,
        #[serde(rename = "T")]
        time: f64,
        energy: f64,
        log: bool,
    }
    let echo = Echo {
        command: "response",
        args: Args {
            window: &a.window,
            time: a.time,
            energy: a.energy,
            log: a.log,
        },
    };
    let header: &[&str] = if a.log {
        &["y", "omega_y", "P_y", "log10_P_y"]
    } else {
        &["y", "omega_y", "P_y"]
    };
    emit(a.out.as_deref(), stdout, &echo, header, rows)
}

fn cmd_filter(a: &FilterArgs, stdout: &mut dyn Write) -> Result<()> {
    let grid = QpeGrid::new(a.window.n, a.time)?;
    let window = Window::new(a.window.kind()?, &grid)?;
    let config = match (a.yc, a.m) {
        (Some(yc), _) => FilterConfig::new(grid, yc)?,
        (None, Some(m)) => FilterConfig::from_prefix_bits(grid, m)?,
        (None, None) => unreachable!("clap requires one of --yc/--m"),
    };
    let samples = uniform_samples(&grid, a.samples);
    let chunk = samples
        .len()
        .div_ceil(rayon::current_num_threads() * 4)
        .max(1);
    let parts = samples
        .par_chunks(chunk)
        .map(|c| filter_curve(&window, &grid, &config, c))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let rows = parts.iter().flat_map(|p| {
        (0..p.energies.len()).map(|i| {
            vec![
                fmt_f64(p.energies[i]),
                fmt_f64(p.kept[i]),
                fmt_f64(p.deviation[i]),
            ]
        })
    });
    #[derive(Serialize)]
    struct Args<'a> {
        #[serde(flatten)]
        window: &'a WindowOpts,
        #[serde(rename = "T")]
        time: f64,
        yc: usize,
        m: Option<u32>,
        omega_c: f64,
        samples: usize,
    }
    let echo = Echo {
        command: "filter",
        args: Args {
            window: &a.window,
            time: a.time,
            yc: config.cutoff(),
            m: a.m,
            omega_c: config.omega_c(),
            samples: a.samples,
        },
    };
    emit(a.out.as_deref(), stdout, &echo, &["E", "R", "dR"], rows)
}

fn cmd_sigma(a: &SigmaArgs, stdout: &mut dyn Write) -> Result<()> {
    let grid = QpeGrid::new(a.window.n, 1.0)?;
    let window = Window::new(a.window.kind()?, &grid)?;
    let sigma = sigma_factor(&window, &grid)?;
    let n = grid.size() as isize;
    let rows = (-(n - 1)..n).map(|j| vec![fmt_f64(j as f64 / n as f64), fmt_f64(sigma.get(j))]);
    let echo = Echo {
        command: "sigma",
        args: &a.window,
    };
    emit(a.out.as_deref(), stdout, &echo, &["x", "sigma_j"], rows)
}

fn cmd_qetu(a: &QetuArgs, stdout: &mut dyn Write) -> Result<()> {
    let base = QetuSpec::new(a.e_targ, a.two_delta, a.eps[0], a.time)?;
    if a.dump_poly.is_some() && (a.eps.len() != 1 || a.samples.len() != 1) {
        return Err(Error::Invalid(
            "--dump-poly needs a single --eps and a single --M".into(),
        ));
    }
    if let Some(d) = a.degree {
        if d % 2 != 0 {
            return Err(Error::Invalid(format!("--degree {d} must be even")));
        }
    }
    let combos: Vec<(f64, usize)> = a
        .eps
        .iter()
        .flat_map(|e| a.samples.iter().map(move |m| (*e, *m)))
        .collect();
    let results = combos
        .par_iter()
        .map(|&(eps, m)| {
            let spec = base.with_epsilon(eps)?;
            match a.degree {
                Some(d) => fit_polynomial(&spec, d, m).map(|(p, r)| Some((p, r))),
                None => match minimal_degree(&spec, m) {
                    Ok(s) => Ok(Some((s.poly, s.report))),
                    Err(qpefl_core::Error::NoFitFound { .. }) => Ok(None),
                    Err(e) => Err(e),
                },
            }
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let header: &[&str] = if a.degree.is_some() {
        &["epsilon", "M", "degree", "queries", "residual", "passed"]
    } else {
        &["epsilon", "M", "d_min", "queries"]
    };
    let rows = combos.iter().zip(&results).map(|(&(eps, m), r)| {
        let mut row = vec![fmt_f64(eps), m.to_string()];
        match (r, a.degree) {
            (Some((_, rep)), Some(_)) => row.extend([
                rep.degree.to_string(),
                rep.queries().to_string(),
                rep.residual.map(fmt_f64).unwrap_or_default(),
                rep.passed.to_string(),
            ]),
            (Some((_, rep)), None) => {
                row.extend([rep.degree.to_string(), rep.queries().to_string()])
            }
            (None, _) => row.extend([String::new(), String::new()]),
        }
        row
    });
    let kaiser = match a.kaiser_eps {
        Some(eps) => Some(queries_qpe_kaiser(&base.with_epsilon(eps)?)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Args<'a> {
        e_targ: f64,
        two_delta: f64,
        eps: &'a [f64],
        #[serde(rename = "T")]
        time: f64,
        #[serde(rename = "M")]
        samples: &'a [usize],
        degree: Option<usize>,
        kaiser_eps: Option<f64>,
        kaiser_n: Option<usize>,
        kaiser_alpha: Option<f64>,
    }
    let echo = Echo {
        command: "qetu",
        args: Args {
            e_targ: a.e_targ,
            two_delta: a.two_delta,
            eps: &a.eps,
            time: a.time,
            samples: &a.samples,
            degree: a.degree,
            kaiser_eps: a.kaiser_eps,
            kaiser_n: kaiser.map(|k| k.size),
            kaiser_alpha: kaiser.map(|k| k.alpha),
        },
    };
    emit(a.out.as_deref(), stdout, &echo, header, rows)?;

    if let Some(path) = &a.dump_poly {
        let Some((poly, _)) = &results[0] else {
            return Err(Error::Invalid("no certified polynomial to dump".into()));
        };
        let rows = poly
            .coeffs()
            .iter()
            .enumerate()
            .map(|(l, c)| vec![l.to_string(), fmt_f64(*c)]);
        write_csv(io::create(path)?, &echo, &["l", "c_2l"], rows)?;
    }
    Ok(())
}

fn cmd_spectrum(a: &SpectrumArgs) -> Result<()> {
    let spectrum = io::load_spectrum(&a.input)?
        .shifted(a.shift)
        .with_units(a.units.clone())
        .with_label(a.label.clone());
    let stage1 = Stage {
        kind: window_kind(a.stage1_kind, a.alpha, "--alpha")?,
        grid: QpeGrid::new(a.n, a.time)?,
    };
    let stage2 = Stage {
        kind: window_kind(a.stage2_kind, a.alpha2, "--alpha2")?,
        grid: QpeGrid::new(a.n2, a.time2)?,
    };
    let config = TwoStepConfig::new(stage1, a.yc, stage2)?.negate(a.negate);
    let result = two_step(&spectrum, &config)?;
    let aliases = aliasing_peaks(&result, &spectrum, &config, &result.error_cut);

    #[derive(Serialize)]
    struct Args<'a> {
        input: &'a Path,
        stage1_kind: KindArg,
        alpha: Option<f64>,
        n: u32,
        #[serde(rename = "T")]
        time: f64,
        yc: usize,
        stage2_kind: KindArg,
        alpha2: Option<f64>,
        n2: u32,
        #[serde(rename = "T2")]
        time2: f64,
        negate: bool,
        shift: f64,
        units: &'a str,
        label: &'a str,
    }
    let echo = Echo {
        command: "spectrum",
        args: Args {
            input: &a.input,
            stage1_kind: a.stage1_kind,
            alpha: a.alpha,
            n: a.n,
            time: a.time,
            yc: a.yc,
            stage2_kind: a.stage2_kind,
            alpha2: a.alpha2,
            n2: a.n2,
            time2: a.time2,
            negate: a.negate,
            shift: a.shift,
            units: &a.units,
            label: &a.label,
        },
    };

    let path = |suffix: &str| {
        let mut name = a.out_prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    let indexed = |cols: &[&[f64]]| -> Vec<Vec<String>> {
        (0..result.omega.len())
            .map(|y| {
                let mut row = vec![y.to_string(), fmt_f64(result.omega[y])];
                row.extend(cols.iter().map(|c| fmt_f64(c[y])));
                row
            })
            .collect()
    };
    write_csv(
        io::create(&path("_raw.csv"))?,
        &echo,
        &["y", "omega", "S_raw"],
        indexed(&[&result.raw]),
    )?;
    write_csv(
        io::create(&path("_filtered.csv"))?,
        &echo,
        &[
            "y",
            "omega",
            "S_filtered",
            "S_filtered_normalized",
            "S_kept_reference",
        ],
        indexed(&[
            &result.filtered,
            &result.filtered_normalized,
            &result.kept_reference,
        ]),
    )?;
    write_csv(
        io::create(&path("_error_kept.csv"))?,
        &echo,
        &["y", "omega", "error_kept"],
        indexed(&[&result.error_kept]),
    )?;
    write_csv(
        io::create(&path("_error_cut.csv"))?,
        &echo,
        &["y", "omega", "error_cut"],
        indexed(&[&result.error_cut]),
    )?;

    #[derive(Serialize)]
    struct Queries {
        naive: u64,
        filtered: u64,
    }
    #[derive(Serialize)]
    struct Alias {
        energy: f64,
        expected_omega: f64,
        r: i64,
        detected_omega: Option<f64>,
    }
    #[derive(Serialize)]
    struct Report<'a, E: Serialize> {
        config: &'a E,
        lines: usize,
        kept_lines: usize,
        total_weight: f64,
        p0: f64,
        beta: f64,
        queries: Queries,
        aliasing: Vec<Alias>,
    }
    let sign = if a.negate { -1.0 } else { 1.0 };
    let report = Report {
        config: &echo,
        lines: spectrum.lines().len(),
        kept_lines: result.kept.iter().filter(|k| **k).count(),
        total_weight: result.total_weight,
        p0: result.p0,
        beta: config.beta(),
        queries: Queries {
            naive: result.queries.naive,
            filtered: result.queries.filtered,
        },
        aliasing: aliases
            .iter()
            .map(|m| Alias {
                energy: m.energy,
                expected_omega: m.expected,
                r: m.r,
                detected_omega: m.peak.map(|p| sign * stage2.grid.omega(p.index)),
            })
            .collect(),
    };
    io::write_json(&path("_report.json"), &report)
}

fn cmd_verify(a: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let grid = QpeGrid::new(a.n, a.time)?;
    let window = Window::new(window_kind(a.kind, a.alpha, "--alpha")?, &grid)?;
    let cutoff = a.yc.unwrap_or((grid.size() / 4).saturating_sub(1).max(1));
    let suites = run_suites(&window, &grid, cutoff, a.states, a.cases, a.seed)?;
    #[derive(Serialize)]
    struct Args {
        seed: u64,
        n: u32,
        kind: KindArg,
        alpha: Option<f64>,
        #[serde(rename = "T")]
        time: f64,
        states: usize,
        cases: usize,
        yc: usize,
    }
    let echo = Echo {
        command: "verify",
        args: Args {
            seed: a.seed,
            n: a.n,
            kind: a.kind,
            alpha: a.alpha,
            time: a.time,
            states: a.states,
            cases: a.cases,
            yc: cutoff,
        },
    };
    let rows = suites.iter().map(|s| {
        vec![
            s.suite.to_string(),
            s.cases.to_string(),
            fmt_f64(s.max_deviation),
            fmt_f64(s.tolerance),
            if s.passed { "pass" } else { "fail" }.to_string(),
        ]
    });
    emit(
        a.out.as_deref(),
        stdout,
        &echo,
        &["suite", "cases", "max_deviation", "tolerance", "status"],
        rows,
    )?;
    let failed: Vec<&str> = suites
        .iter()
        .filter(|s| !s.passed)
        .map(|s| s.suite)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Verification(failed.join(", ")))
    }
}
