//! Uniform and Stepanov distances between functions on a strip, and the
//! search for ε-almost periods against either metric.
//!
//! The supremum over `z in R` is replaced by a finite x-window; every result
//! carries the window it was computed on.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::model::{clip_floor, horizontal_shift, Complex, FunctionExpr, DEFAULT_CLIP_FLOOR};

/// Discretisation of the Stepanov and uniform metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricConfig {
    /// Proxy `[X0, X1]` for the supremum over the real axis.
    pub x_window: (f64, f64),
    /// Midpoint step for the unit-interval integral; `1 / hx` must be an integer.
    pub hx: f64,
    /// Maximal y-grid step on `[alpha, beta]`.
    pub hy: f64,
    /// Almost-period scan step.
    pub h_tau: f64,
    /// Floor substituted for `-inf` samples inside the Stepanov integral.
    pub clip_floor: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            x_window: (0.0, 100.0),
            hx: 1e-3,
            hy: 0.05,
            h_tau: 1e-2,
            clip_floor: DEFAULT_CLIP_FLOOR,
        }
    }
}

impl MetricConfig {
    pub fn validate(&self) -> Result<()> {
        let (x0, x1) = self.x_window;
        if !(x0.is_finite() && x1.is_finite() && x1 - x0 >= 1.0) {
            return invalid(format!("x-window [{x0}, {x1}] must be finite with length >= 1"));
        }
        if !(self.hx > 0.0 && self.hy > 0.0 && self.h_tau > 0.0) {
            return invalid("metric steps must be positive");
        }
        let n = 1.0 / self.hx;
        if (n - n.round()).abs() > 1e-9 * n {
            return invalid(format!("hx = {} does not divide 1", self.hx));
        }
        Ok(())
    }

    fn unit_steps(&self) -> usize {
        (1.0 / self.hx).round() as usize
    }

    /// Number of window positions `X0 + i hx`, `i = 0..P`.
    fn positions(&self) -> usize {
        ((self.x_window.1 - self.x_window.0) / self.hx + 1e-9).floor() as usize + 1
    }

    /// Uniform y-grid on `[alpha, beta]` with step at most `hy`.
    pub fn y_grid(&self, alpha: f64, beta: f64) -> Vec<f64> {
        if alpha == beta {
            return vec![alpha];
        }
        let n = ((beta - alpha) / self.hy - 1e-9).ceil().max(1.0) as usize;
        (0..=n)
            .map(|j| {
                if j == n {
                    beta
                } else {
                    alpha + (beta - alpha) * j as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Result of a Stepanov seminorm evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StepanovValue {
    pub value: f64,
    pub window: (f64, f64),
    pub steps: (f64, f64),
    pub clipped_samples: usize,
    /// Left end `z` of the maximising unit interval.
    pub argmax: (f64, f64),
}

fn check_band(u: &FunctionExpr, alpha: f64, beta: f64) -> Result<()> {
    if !(alpha <= beta) {
        return invalid(format!("need alpha <= beta, got [{alpha}, {beta}]"));
    }
    let r = u.y_range();
    if !r.contains_interval(alpha, beta) {
        return Err(Error::Domain(format!(
            "[{alpha}, {beta}] outside host strip [{}, {}]",
            r.lo, r.hi
        )));
    }
    Ok(())
}

fn clipped_line(u: &FunctionExpr, y: f64, start: f64, step: f64, n: usize, floor: f64) -> Result<(Vec<f64>, usize)> {
    let mut clipped = 0;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let (v, c) = clip_floor(u.evaluate(Complex::new(start + k as f64 * step, y))?, floor);
        clipped += c as usize;
        out.push(v);
    }
    Ok((out, clipped))
}

/// Maximum over window starts of the midpoint-rule unit integral of `g`.
/// `g[k]` is the integrand at the `k`-th midpoint; returns (value, start index).
fn max_unit_integral(g: &[f64], positions: usize, unit: usize, hx: f64) -> (f64, usize) {
    let mut prefix = Vec::with_capacity(g.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in g {
        acc += v;
        prefix.push(acc);
    }
    let mut best = (f64::NEG_INFINITY, 0);
    for i in 0..positions {
        let s = (prefix[i + unit] - prefix[i]) * hx;
        if s > best.0 {
            best = (s, i);
        }
    }
    best
}

/// Sampled `d_[alpha,beta](u, v) = sup_z int_0^1 |u(z+t) - v(z+t)| dt`.
pub fn stepanov_seminorm(
    u: &FunctionExpr,
    v: &FunctionExpr,
    alpha: f64,
    beta: f64,
    cfg: &MetricConfig,
) -> Result<StepanovValue> {
    cfg.validate()?;
    check_band(u, alpha, beta)?;
    check_band(v, alpha, beta)?;
    let unit = cfg.unit_steps();
    let positions = cfg.positions();
    let n = positions - 1 + unit;
    let start = cfg.x_window.0 + 0.5 * cfg.hx;
    let ys = cfg.y_grid(alpha, beta);
    let rows: Vec<(f64, usize, usize)> = ys
        .par_iter()
        .map(|&y| {
            let (a, ca) = clipped_line(u, y, start, cfg.hx, n, cfg.clip_floor)?;
            let (b, cb) = clipped_line(v, y, start, cfg.hx, n, cfg.clip_floor)?;
            let g: Vec<f64> = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).collect();
            let (m, i) = max_unit_integral(&g, positions, unit, cfg.hx);
            Ok((m, i, ca + cb))
        })
        .collect::<Result<_>>()?;
    let mut best = (f64::NEG_INFINITY, 0, 0usize);
    let mut clipped = 0;
    for (j, &(m, i, c)) in rows.iter().enumerate() {
        clipped += c;
        if m > best.0 {
            best = (m, i, j);
        }
    }
    Ok(StepanovValue {
        value: best.0.max(0.0),
        window: cfg.x_window,
        steps: (cfg.hx, cfg.hy),
        clipped_samples: clipped,
        argmax: (cfg.x_window.0 + best.1 as f64 * cfg.hx, ys[best.2]),
    })
}

/// `max |u - v|` over the sampled window `x in [X0, X1]` (step `hx`) times `ys`.
pub fn uniform_distance(u: &FunctionExpr, v: &FunctionExpr, ys: &[f64], cfg: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    if ys.is_empty() {
        return invalid("uniform distance needs at least one y value");
    }
    for &y in ys {
        check_band(u, y, y)?;
        check_band(v, y, y)?;
    }
    let positions = cfg.positions();
    let rows: Vec<f64> = ys
        .par_iter()
        .map(|&y| {
            let mut m: f64 = 0.0;
            for k in 0..positions {
                let z = Complex::new(cfg.x_window.0 + k as f64 * cfg.hx, y);
                let (a, b) = (u.evaluate(z)?, v.evaluate(z)?);
                if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
                    return Err(Error::Unbounded(format!("-inf sample at {z}")));
                }
                m = m.max((a - b).abs());
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Metric used to judge an almost period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodMetric {
    /// Uniform distance on `R + i K`, `K` a finite set of heights.
    Uniform {
        ys: Vec<f64>,
    },
    Stepanov {
        alpha: f64,
        beta: f64,
    },
}

/// `metric(u(. + tau), u)` by direct evaluation.
pub fn displacement(u: &FunctionExpr, tau: f64, metric: &PeriodMetric, cfg: &MetricConfig) -> Result<f64> {
    let shifted = horizontal_shift(u, tau);
    match metric {
        PeriodMetric::Uniform { ys } => uniform_distance(&shifted, u, ys, cfg),
        PeriodMetric::Stepanov { alpha, beta } => Ok(stepanov_seminorm(&shifted, u, *alpha, *beta, cfg)?.value),
    }
}

/// Outcome of an almost-period search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PeriodScan {
    /// Verified ε-almost periods, ascending.
    pub periods: Vec<f64>,
    /// `(tau, metric)` on the scan grid.
    pub scan: Vec<(f64, f64)>,
    /// Scan step actually used (a multiple of `hx`).
    pub h_tau: f64,
    /// Number of local minima refined by golden-section search.
    pub refined: usize,
}

impl PeriodScan {
    pub fn scan_csv(&self) -> String {
        let mut out = String::from("tau,metric_value\n");
        for (t, v) in &self.scan {
            let _ = writeln!(out, "{t},{v}");
        }
        out
    }
}

/// Scan `tau in (0, l_max]` for ε-almost periods of `u`.
///
/// The scan runs on a grid of step `h_tau` (rounded to a multiple of `hx` so
/// shifted samples align with unshifted ones). Local minima above `eps` that
/// could dip below it between grid points are refined by golden-section
/// search and re-checked by direct evaluation of the metric.
pub fn find_almost_periods(
    u: &FunctionExpr,
    eps: f64,
    metric: &PeriodMetric,
    l_max: f64,
    cfg: &MetricConfig,
) -> Result<PeriodScan> {
    cfg.validate()?;
    if !(eps > 0.0 && l_max > 0.0) {
        return invalid("need eps > 0 and l_max > 0");
    }
    let r = ((cfg.h_tau / cfg.hx).round() as usize).max(1);
    let h_tau = r as f64 * cfg.hx;
    let jmax = (l_max / h_tau + 1e-9).floor() as usize;
    let values = scan_aligned(u, metric, cfg, r, jmax)?;
    let scan: Vec<(f64, f64)> = (1..=jmax).map(|j| (j as f64 * h_tau, values[j - 1])).collect();

    let lipschitz = scan
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs() / h_tau)
        .fold(0.0, f64::max);
    let gate = eps + lipschitz * h_tau;

    let mut periods: Vec<f64> = scan.iter().filter(|(_, v)| *v < eps).map(|(t, _)| *t).collect();
    let minima: Vec<usize> = (1..scan.len().saturating_sub(1))
        .filter(|&k| scan[k].1 < scan[k - 1].1 && scan[k].1 <= scan[k + 1].1 && (eps..gate).contains(&scan[k].1))
        .collect();
    let refined: Vec<(f64, f64)> = minima
        .par_iter()
        .map(|&k| golden_section(|t| displacement(u, t, metric, cfg), scan[k - 1].0, scan[k + 1].0))
        .collect::<Result<_>>()?;
    let verified: Vec<Option<f64>> = refined
        .par_iter()
        .filter(|(t, v)| *v < eps && !periods.contains(t))
        .map(|&(t, _)| Ok((displacement(u, t, metric, cfg)? < eps).then_some(t)))
        .collect::<Result<_>>()?;
    periods.extend(verified.into_iter().flatten());
    periods.sort_by(f64::total_cmp);
    Ok(PeriodScan {
        periods,
        scan,
        h_tau,
        refined: minima.len(),
    })
}

/// Metric values at `tau_j = j r hx`, `j = 1..=jmax`, from shared samples.
fn scan_aligned(
    u: &FunctionExpr,
    metric: &PeriodMetric,
    cfg: &MetricConfig,
    r: usize,
    jmax: usize,
) -> Result<Vec<f64>> {
    let positions = cfg.positions();
    let shift_max = jmax * r;
    match metric {
        PeriodMetric::Uniform { ys } => {
            for &y in ys {
                check_band(u, y, y)?;
            }
            let rows: Vec<Vec<f64>> = ys
                .par_iter()
                .map(|&y| {
                    let (row, _) =
                        clipped_line(u, y, cfg.x_window.0, cfg.hx, positions + shift_max, f64::NEG_INFINITY)?;
                    if row.contains(&f64::NEG_INFINITY) {
                        return Err(Error::Unbounded(format!("-inf sample on line y = {y}")));
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            Ok((1..=jmax)
                .into_par_iter()
                .map(|j| {
                    let off = j * r;
                    rows.iter().fold(0.0, |m: f64, row| {
                        (0..positions).fold(m, |m, k| m.max((row[k + off] - row[k]).abs()))
                    })
                })
                .collect())
        }
        PeriodMetric::Stepanov { alpha, beta } => {
            check_band(u, *alpha, *beta)?;
            let unit = cfg.unit_steps();
            let n = positions - 1 + unit;
            let ys = cfg.y_grid(*alpha, *beta);
            let rows: Vec<Vec<f64>> = ys
                .par_iter()
                .map(|&y| {
                    Ok(clipped_line(
                        u,
                        y,
                        cfg.x_window.0 + 0.5 * cfg.hx,
                        cfg.hx,
                        n + shift_max,
                        cfg.clip_floor,
                    )?
                    .0)
                })
                .collect::<Result<_>>()?;
            Ok((1..=jmax)
                .into_par_iter()
                .map(|j| {
                    let off = j * r;
                    rows.iter().fold(0.0, |m: f64, row| {
                        let g: Vec<f64> = (0..n).map(|k| (row[k + off] - row[k]).abs()).collect();
                        m.max(max_unit_integral(&g, positions, unit, cfg.hx).0)
                    })
                })
                .collect())
        }
    }
}

/// Golden-section minimisation on `[a, b]`; returns the best `(t, f(t))` seen.
fn golden_section(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for _ in 0..120 {
        if (b - a) <= 1e-12 * b.abs().max(1.0) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Largest gap between consecutive points of `{0} ∪ periods ∪ {l_max}`.
pub fn relative_density_gap(periods: &[f64], l_max: f64) -> f64 {
    let mut prev = 0.0;
    let mut gap: f64 = 0.0;
    for &t in periods.iter().filter(|t| **t >= 0.0 && **t <= l_max) {
        gap = gap.max(t - prev);
        prev = t;
    }
    gap.max(l_max - prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{HoloPoly, StripSpec};
    use std::f64::consts::PI;

    fn small_cfg() -> MetricConfig {
        MetricConfig {
            x_window: (0.0, 20.0),
            hx: 1e-2,
            hy: 0.1,
            h_tau: 1e-2,
            ..MetricConfig::default()
        }
    }

    #[test]
    fn distance_to_self_is_zero() {
        let u = FunctionExpr::cosine(1.0, 1.0);
        let d = stepanov_seminorm(&u, &u, 0.0, 1.0, &small_cfg()).unwrap();
        assert_eq!(d.value, 0.0);
        assert_eq!(d.clipped_samples, 0);
    }

    #[test]
    fn constant_offset_gives_its_modulus() {
        let u = FunctionExpr::affine_y(0.0, -1.0);
        let v = FunctionExpr::affine_y(-0.75, -1.0);
        let d = stepanov_seminorm(&u, &v, -0.3, 0.8, &small_cfg()).unwrap();
        assert!((d.value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn cosine_against_zero_matches_brute_force_phase_search() {
        // Oracle: sup_a int_a^{a+1} |cos t| dt over a dense phase grid with
        // the antiderivative of |cos|, independent of the midpoint path.
        let abs_cos_primitive = |t: f64| {
            let k = (t / PI + 0.5).floor();
            let r = t - k * PI;
            2.0 * k + r.sin()
        };
        let oracle = (0..200_000)
            .map(|i| {
                let a = i as f64 * (2.0 * PI / 200_000.0);
                abs_cos_primitive(a + 1.0) - abs_cos_primitive(a)
            })
            .fold(0.0, f64::max);
        let cfg = MetricConfig {
            x_window: (0.0, 10.0),
            ..MetricConfig::default()
        };
        let d = stepanov_seminorm(
            &FunctionExpr::cosine(1.0, 1.0),
            &FunctionExpr::constant(0.0),
            0.0,
            0.0,
            &cfg,
        )
        .unwrap();
        assert!((d.value - oracle).abs() < 1e-5, "{} vs {}", d.value, oracle);
        assert!((oracle - 2.0 * 0.5f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn band_outside_strip_is_domain_error() {
        let profile = crate::model::CoefficientProfile::Linear {
            ys: vec![0.0, 1.0],
            values: vec![Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)],
        };
        let u = FunctionExpr::ExpSum(
            crate::model::ExpSum::new(vec![crate::model::ExpTerm { freq: 0.0, profile }]).unwrap(),
        );
        let err = stepanov_seminorm(&u, &u, 0.5, 2.0, &small_cfg()).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let _ = StripSpec::WHOLE_PLANE;
    }

    #[test]
    fn log_singularities_are_clipped_and_flagged() {
        let f = HoloPoly::new([(1.0, Complex::new(1.0, 0.0)), (0.0, Complex::new(-1.0, 0.0))]);
        let u = FunctionExpr::log_abs(f);
        let cfg = MetricConfig {
            x_window: (-0.005, 2.0),
            hx: 1e-2,
            ..small_cfg()
        };
        // The midpoint grid hits x = 0 exactly.
        let d = stepanov_seminorm(&u, &FunctionExpr::constant(0.0), 0.0, 0.0, &cfg).unwrap();
        assert!(d.clipped_samples >= 1);
    }

    #[test]
    fn uniform_examples() {
        let cfg = small_cfg();
        let c = FunctionExpr::cosine(1.0, 1.0);
        assert_eq!(uniform_distance(&c, &c, &[0.0], &cfg).unwrap(), 0.0);
        let d = uniform_distance(&c, &horizontal_shift(&c, PI), &[0.0], &cfg).unwrap();
        assert!((d - 2.0).abs() < 1e-6);
        let m = FunctionExpr::abs(HoloPoly::new([(1.0, Complex::new(1.0, 0.0))]));
        assert!(uniform_distance(&m, &horizontal_shift(&m, 0.77), &[0.0], &cfg).unwrap() < 1e-15);
    }

    #[test]
    fn uniform_distance_rejects_minus_infinity() {
        let f = HoloPoly::new([(1.0, Complex::new(1.0, 0.0)), (0.0, Complex::new(-1.0, 0.0))]);
        let u = FunctionExpr::log_abs(f);
        let err = uniform_distance(&u, &FunctionExpr::constant(0.0), &[0.0], &small_cfg()).unwrap_err();
        assert!(matches!(err, Error::Unbounded(_)));
    }

    #[test]
    fn cosine_periods_are_multiples_of_two_pi() {
        let u = FunctionExpr::cosine(1.0, 1.0);
        let l_max = 20.0;
        let scan =
            find_almost_periods(&u, 1e-9, &PeriodMetric::Uniform { ys: vec![0.0] }, l_max, &small_cfg()).unwrap();
        let expected: Vec<f64> = (1..=(l_max / (2.0 * PI)) as usize)
            .map(|k| 2.0 * PI * k as f64)
            .collect();
        assert_eq!(scan.periods.len(), expected.len(), "{:?}", scan.periods);
        for (t, e) in scan.periods.iter().zip(&expected) {
            assert!((t - e).abs() < 1e-8, "{t} vs {e}");
        }
    }

    #[test]
    fn constant_function_returns_every_scanned_tau() {
        let u = FunctionExpr::constant(3.0);
        let cfg = MetricConfig {
            h_tau: 0.1,
            ..small_cfg()
        };
        let scan = find_almost_periods(&u, 1e-6, &PeriodMetric::Stepanov { alpha: 0.0, beta: 0.0 }, 2.0, &cfg).unwrap();
        assert_eq!(scan.periods.len(), scan.scan.len());
        assert_eq!(scan.periods.len(), 20);
    }

    #[test]
    fn gap_examples() {
        let periods: Vec<f64> = (1..=10).map(|k| 2.0 * PI * k as f64).collect();
        assert!((relative_density_gap(&periods, 20.0 * PI) - 2.0 * PI).abs() < 1e-12);
        assert_eq!(relative_density_gap(&[], 7.0), 7.0);
    }

    #[test]
    fn y_grid_covers_endpoints() {
        let cfg = small_cfg();
        let g = cfg.y_grid(0.3, 1.0);
        assert_eq!(g.first(), Some(&0.3));
        assert_eq!(g.last(), Some(&1.0));
        assert!(g.windows(2).all(|w| w[1] - w[0] <= cfg.hy + 1e-12));
    }

    #[test]
    fn config_rejects_non_dividing_step() {
        let cfg = MetricConfig {
            hx: 0.3,
            ..MetricConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
