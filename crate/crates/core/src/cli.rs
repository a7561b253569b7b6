//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` produces a failing or rejected
//! report, 2 on usage, input or domain errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{invalid, Error, Result};
use crate::fourier::{
    bochner_fejer_multipliers, bochner_fejer_sum, coefficient_table, mean_value, periodogram_candidates,
    reduce_rational_basis, FejerWidth, MeanConfig,
};
use crate::harness::{verify, write_atomic, write_reports, HarnessConfig, Target, Verdict};
use crate::metrics::{find_almost_periods, stepanov_seminorm, MetricConfig, PeriodMetric};
use crate::model::StripSpec;
use crate::model::{horizontal_shift, sample_grid, Complex, FunctionExpr, Rect};
use crate::potential::{
    green_potential, kernel_split, riesz_measure, strip_kernel, Atom, DiskSpec, MeasureSpec, StripKernelSpec,
};

#[derive(Parser, Debug)]
#[command(
    name = "apstrip",
    version,
    about = "Almost periodic subharmonic functions on a strip"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Function expression as JSON.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Lower edge of the substrip.
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Upper edge of the substrip.
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// x-window `X0,X1` for suprema over x.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Output directory; results go to stdout when absent (except `verify`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Also write an SVG plot where one is available.
    #[arg(long, global = true)]
    plot: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the function at one point.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Sample the function on a rectangle (CSV).
    Grid {
        /// `X0,X1,Y0,Y1`.
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 0.05)]
        hx: f64,
        #[arg(long, default_value_t = 0.05)]
        hy: f64,
    },
    /// Stepanov seminorm of `u(. + tau) - v` on `[alpha, beta]`.
    Stepanov {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau: f64,
        /// Second function; defaults to the first.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-3)]
        hx: f64,
    },
    /// Epsilon-almost periods in `(0, lmax]`.
    Periods {
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 20.0)]
        lmax: f64,
        #[arg(long, value_enum, default_value_t = MetricKind::Stepanov)]
        metric: MetricKind,
        #[arg(long, default_value_t = 1e-2)]
        hx: f64,
    },
    /// Mean value over the line `Im z = y`.
    Mean {
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[command(flatten)]
        mean: MeanArgs,
    },
    /// Fourier-Bohr coefficients (CSV `lambda,y,re,im`).
    Coeffs {
        /// Comma separated frequencies.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Comma separated heights.
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[command(flatten)]
        mean: MeanArgs,
    },
    /// Periodogram frequency candidates on one line.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long, default_value_t = 10.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 1e-6)]
        threshold: f64,
        #[command(flatten)]
        mean: MeanArgs,
    },
    /// Bochner-Fejer multipliers, or with `--spec` the sum `P_m` as JSON.
    Bf {
        /// Comma separated basis (multipliers only).
        #[arg(long, allow_hyphen_values = true)]
        basis: Option<String>,
        /// Comma separated spectrum (with `--spec`).
        #[arg(long, allow_hyphen_values = true)]
        freqs: Option<String>,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum, default_value_t = WidthKind::Linear)]
        width: WidthKind,
        #[command(flatten)]
        mean: MeanArgs,
    },
    /// Green potential of a measure on a disk.
    Green {
        /// Flat list `[x, y, mass, x, y, mass, ...]`.
        #[arg(long, allow_hyphen_values = true)]
        atoms: Option<String>,
        /// Measure as JSON.
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long = "R")]
        radius: f64,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Riesz measure of the function sampled on a rectangle (JSON).
    Riesz {
        #[arg(long, allow_hyphen_values = true)]
        rect: String,
        #[arg(long, default_value_t = 1e-2)]
        h: f64,
    },
    /// Strip kernel `K` and its split at level `N`.
    Kernel {
        #[arg(long)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value_t = 1e3)]
        n: f64,
    },
    /// Run harness experiments and write their reports.
    Verify {
        #[arg(value_parser = ["thm1", "thm2", "thm3", "thm4", "lem12", "lem4", "all"])]
        target: String,
    },
}

#[derive(Args, Debug)]
struct MeanArgs {
    #[arg(long, default_value_t = 200.0 * std::f64::consts::PI)]
    tmax: f64,
    #[arg(long, default_value_t = 1e-3)]
    hx: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MetricKind {
    Stepanov,
    Uniform,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WidthKind {
    Linear,
    Classical,
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("apstrip: {e}");
            2
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("APSTRIP_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("not a number: '{t}'")))
        })
        .collect()
}

fn pair(s: &str, what: &str) -> Result<(f64, f64)> {
    match list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => invalid(format!("{what} needs two comma separated numbers, got '{s}'")),
    }
}

fn point(s: &str) -> Result<Complex> {
    let (re, im) = pair(s, "point")?;
    Ok(Complex::new(re, im))
}

fn rect(s: &str) -> Result<Rect> {
    match list(s)?.as_slice() {
        [x0, x1, y0, y1] => Rect::new(*x0, *x1, *y0, *y1),
        _ => invalid(format!("rectangle needs X0,X1,Y0,Y1, got '{s}'")),
    }
}

fn read_spec(path: &Path) -> Result<FunctionExpr> {
    let text = fs::read_to_string(path)?;
    FunctionExpr::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::InvalidArgument(format!("{}: {j}", path.display())),
        other => other,
    })
}

impl Common {
    fn function(&self) -> Result<FunctionExpr> {
        match &self.spec {
            Some(p) => read_spec(p),
            None => invalid("this command needs --spec PATH"),
        }
    }

    fn band(&self) -> Result<(f64, f64)> {
        match (self.alpha, self.beta) {
            (Some(a), Some(b)) if a <= b => Ok((a, b)),
            (Some(a), Some(b)) => invalid(format!("need alpha <= beta, got {a} > {b}")),
            _ => invalid("this command needs --alpha and --beta"),
        }
    }

    fn metric(&self, hx: f64) -> Result<MetricConfig> {
        let mut cfg = MetricConfig {
            hx,
            ..MetricConfig::default()
        };
        if let Some(w) = &self.window {
            cfg.x_window = pair(w, "--window")?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn mean(&self, m: &MeanArgs) -> MeanConfig {
        let mut cfg = MeanConfig {
            t_max: m.tmax,
            hx: m.hx,
            ..MeanConfig::default()
        };
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }

    /// Writes to `--out/name` when an output directory is given, else stdout.
    fn emit(&self, name: &str, text: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                write_atomic(&dir.join(name), text.as_bytes())
            }
            None => {
                print!("{text}");
                if !text.ends_with('\n') {
                    println!();
                }
                Ok(())
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let c = &cli.common;
    if let Some(t) = c.tol {
        if !(t > 0.0) {
            return invalid("--tol must be positive");
        }
    }
    match &cli.command {
        Command::Eval { z } => {
            let u = c.function()?;
            c.emit("eval.txt", &format!("{}", u.evaluate(point(z)?)?))?;
        }
        Command::Grid { rect: r, hx, hy } => {
            let g = sample_grid(&c.function()?, &rect(r)?, *hx, *hy)?;
            c.emit("grid.csv", &g.to_csv())?;
        }
        Command::Stepanov { tau, against, hx } => {
            let u = c.function()?;
            let v = match against {
                Some(p) => read_spec(p)?,
                None => u.clone(),
            };
            let (a, b) = c.band()?;
            let s = stepanov_seminorm(&horizontal_shift(&u, *tau), &v, a, b, &c.metric(*hx)?)?;
            c.emit("stepanov.json", &serde_json::to_string_pretty(&s)?)?;
        }
        Command::Periods { eps, lmax, metric, hx } => {
            let u = c.function()?;
            let (a, b) = c.band()?;
            let cfg = c.metric(*hx)?;
            let m = match metric {
                MetricKind::Stepanov => PeriodMetric::Stepanov { alpha: a, beta: b },
                MetricKind::Uniform => PeriodMetric::Uniform { ys: cfg.y_grid(a, b) },
            };
            let scan = find_almost_periods(&u, *eps, &m, *lmax, &cfg)?;
            let mut text = String::from("tau\n");
            for t in &scan.periods {
                text.push_str(&format!("{t}\n"));
            }
            c.emit("periods.csv", &text)?;
            if c.out.is_some() {
                c.emit("period_scan.csv", &scan.scan_csv())?;
            }
        }
        Command::Mean { y, mean } => {
            let r = mean_value(&c.function()?, *y, &c.mean(mean))?;
            c.emit("mean.json", &serde_json::to_string_pretty(&r)?)?;
        }
        Command::Coeffs { lambda, y, mean } => {
            let (lambdas, ys) = (list(lambda)?, list(y)?);
            let table = coefficient_table(&c.function()?, &lambdas, &ys, &c.mean(mean))?;
            c.emit("coeffs.csv", &table.to_csv())?;
            if c.plot {
                let Some(dir) = &c.out else {
                    return invalid("--plot needs --out");
                };
                for (l, (lam, column)) in lambdas.iter().zip(&table.values).enumerate() {
                    let pts: Vec<(f64, f64)> = ys.iter().copied().zip(column.iter().map(|v| v.norm())).collect();
                    let svg = polyline_svg(&pts, &format!("|a_{lam}(y)|"));
                    write_atomic(&dir.join(format!("coeffs_{l}.svg")), svg.as_bytes())?;
                }
            }
        }
        Command::Spectrum {
            y,
            lambda_max,
            threshold,
            mean,
        } => {
            let f = periodogram_candidates(&c.function()?, *y, *lambda_max, *threshold, &c.mean(mean))?;
            let mut text = String::from("lambda\n");
            for l in f {
                text.push_str(&format!("{l}\n"));
            }
            c.emit("spectrum.csv", &text)?;
        }
        Command::Bf {
            basis,
            freqs,
            m,
            width,
            mean,
        } => {
            let width = match width {
                WidthKind::Linear => FejerWidth::Linear,
                WidthKind::Classical => FejerWidth::Classical,
            };
            match &c.spec {
                None => {
                    let Some(b) = basis else {
                        return invalid("bf needs --basis, or --spec with --freqs");
                    };
                    let spec = bochner_fejer_multipliers(&list(b)?, *m, width)?;
                    c.emit("bf.json", &spec.to_json())?;
                }
                Some(_) => {
                    let Some(fr) = freqs else {
                        return invalid("bf with --spec needs --freqs");
                    };
                    let u = c.function()?;
                    let (a, b) = c.band()?;
                    let fr = list(fr)?;
                    let reduced = reduce_rational_basis(&fr, 1e-9);
                    let spec = bochner_fejer_multipliers(&reduced.basis, *m, width)?;
                    let ys = MetricConfig::default().y_grid(a, b);
                    let p = bochner_fejer_sum(&u, &spec, &reduced.frequencies, &ys, &c.mean(mean))?;
                    c.emit("bf_sum.json", &FunctionExpr::ExpSum(p).to_json())?;
                }
            }
        }
        Command::Green {
            atoms,
            measure,
            radius,
            center,
            z,
        } => {
            let mu = match (atoms, measure) {
                (Some(a), None) => {
                    let flat: Vec<f64> =
                        serde_json::from_str(a).map_err(|e| Error::InvalidArgument(format!("--atoms: {e}")))?;
                    if flat.is_empty() || !flat.len().is_multiple_of(3) {
                        return invalid("--atoms needs triples x, y, mass");
                    }
                    let m = MeasureSpec {
                        atoms: flat
                            .chunks(3)
                            .map(|t| Atom {
                                z: Complex::new(t[0], t[1]),
                                mass: t[2],
                            })
                            .collect(),
                        density: None,
                    };
                    m.validate()?;
                    m
                }
                (None, Some(p)) => MeasureSpec::from_json(&fs::read_to_string(p)?)?,
                _ => return invalid("green needs exactly one of --atoms and --measure"),
            };
            let disk = DiskSpec::new(point(center)?, *radius)?;
            let g = green_potential(&mu, &disk, point(z)?)?;
            c.emit("green.txt", &format!("{}", g.value))?;
            if g.clipped {
                eprintln!("apstrip: point lies on an atom; value clipped");
            }
        }
        Command::Riesz { rect: r, h } => {
            let g = sample_grid(&c.function()?, &rect(r)?, *h, *h)?;
            let m = riesz_measure(&g)?;
            c.emit("riesz.json", &serde_json::to_string_pretty(&m)?)?;
        }
        Command::Kernel { gamma, w, n } => {
            let strip = match (c.alpha, c.beta) {
                (Some(a), Some(b)) => StripSpec::new(a, b)?,
                _ => StripSpec::WHOLE_PLANE,
            };
            let spec = StripKernelSpec::new(*gamma, strip)?;
            let w = point(w)?;
            let (k1, k2) = kernel_split(&spec, *n, w)?;
            let k = strip_kernel(&spec, w);
            c.emit(
                "kernel.json",
                &serde_json::to_string_pretty(&serde_json::json!({"k": k, "k1": k1, "k2": k2}))?,
            )?;
        }
        Command::Verify { target } => {
            let target: Target = target.parse()?;
            let reports = verify(target, &HarnessConfig::new(c.seed))?;
            let dir = c.out.clone().unwrap_or_else(|| PathBuf::from("reports"));
            write_reports(&dir, &reports)?;
            let mut failed = false;
            for r in &reports {
                println!("{:<10} {:<32} {:?}", r.id, r.corpus, r.verdict);
                failed |= r.verdict != Verdict::Pass;
            }
            return Ok(i32::from(failed));
        }
    }
    Ok(0)
}

/// Minimal line plot.
fn polyline_svg(pts: &[(f64, f64)], title: &str) -> String {
    let (w, h, pad) = (480.0, 320.0, 40.0);
    let fold = |f: fn(&(f64, f64)) -> f64| {
        pts.iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let (x0, x1) = fold(|p| p.0);
    let (y0, y1) = fold(|p| p.1);
    let sx = if x1 > x0 { (w - 2.0 * pad) / (x1 - x0) } else { 0.0 };
    let sy = if y1 > y0 { (h - 2.0 * pad) / (y1 - y0) } else { 0.0 };
    let coords: Vec<String> = pts
        .iter()
        .map(|(x, y)| format!("{:.2},{:.2}", pad + (x - x0) * sx, h - pad - (y - y0) * sy))
        .collect();
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n\
         <text x=\"{pad}\" y=\"20\" font-size=\"12\">{title}</text>\n\
         <polyline fill=\"none\" stroke=\"black\" points=\"{}\"/>\n</svg>\n",
        coords.join(" ")
    )
}
