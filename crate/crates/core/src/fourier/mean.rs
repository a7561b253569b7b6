use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::model::{clip_floor, Complex, FunctionExpr, DEFAULT_CLIP_FLOOR};

/// Window used for the finite averages `(1/2T) int_{-T}^{T}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Plain box average.
    Uniform,
    /// Average against the normalised bump `exp(-1/(1 - (x/T)^2))`. Same
    /// limit as the box average, but the leakage from a frequency offset
    /// `w` decays faster than any power of `wT`.
    Smooth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeanConfig {
    /// First half-window; doubled until convergence.
    pub t0: f64,
    /// Relative change between consecutive windows that counts as converged.
    pub tol: f64,
    pub t_max: f64,
    /// Upper bound on the midpoint step.
    pub hx: f64,
    pub averaging: Averaging,
    pub clip_floor: f64,
}

impl Default for MeanConfig {
    fn default() -> Self {
        Self {
            t0: 2.0 * PI,
            tol: 1e-4,
            t_max: 200.0 * PI,
            hx: 1e-3,
            averaging: Averaging::Smooth,
            clip_floor: DEFAULT_CLIP_FLOOR,
        }
    }
}

impl MeanConfig {
    fn validate(&self) -> Result<()> {
        if !(self.t0 > 0.0 && self.tol > 0.0 && self.hx > 0.0 && self.t_max >= self.t0) {
            return invalid("mean config needs t0 > 0, tol > 0, hx > 0 and t_max >= t0");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MeanValueResult {
    pub value: Complex,
    pub t_final: f64,
    /// `(T, average over [-T, T])` for every window tried.
    pub history: Vec<(f64, Complex)>,
    pub converged: bool,
    pub clipped_samples: usize,
}

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

/// Windowed averages of `f(x) e^{-i lambda x}` for every `lambda`, with the
/// half-window doubling from `t0` until every average has settled.
///
/// Samples of `f` are shared across frequencies and across doublings.
pub fn line_means(
    f: impl Fn(f64) -> Result<f64> + Sync,
    lambdas: &[f64],
    cfg: &MeanConfig,
) -> Result<Vec<MeanValueResult>> {
    cfg.validate()?;
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    let lam_max = lambdas.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let h_target = cfg.hx.min(2.0 * PI / (10.0 * (1.0 + lam_max)));
    let n0 = (cfg.t0 / h_target).ceil() as usize;
    let h = cfg.t0 / n0 as f64;

    // right[k] = f((k + 1/2) h), left[k] = f(-(k + 1/2) h)
    let mut right: Vec<f64> = Vec::new();
    let mut left: Vec<f64> = Vec::new();
    let mut clipped = 0usize;
    let mut histories: Vec<Vec<(f64, Complex)>> = vec![Vec::new(); lambdas.len()];

    let mut level = 0u32;
    loop {
        let t = cfg.t0 * f64::from(1u32 << level);
        let n = n0 << level;
        let have = right.len();
        let fresh: Vec<(f64, f64)> = (have..n)
            .into_par_iter()
            .map(|k| {
                let x = (k as f64 + 0.5) * h;
                Ok((f(x)?, f(-x)?))
            })
            .collect::<Result<_>>()?;
        for (r, l) in fresh {
            let (r, cr) = clip_floor(r, cfg.clip_floor);
            let (l, cl) = clip_floor(l, cfg.clip_floor);
            clipped += cr as usize + cl as usize;
            right.push(r);
            left.push(l);
        }
        let weights: Vec<f64> = match cfg.averaging {
            Averaging::Uniform => vec![1.0; n],
            Averaging::Smooth => (0..n).map(|k| bump((k as f64 + 0.5) * h / t)).collect(),
        };
        let wsum: f64 = 2.0 * weights.iter().sum::<f64>();
        let values: Vec<Complex> = lambdas
            .par_iter()
            .map(|&lam| {
                let mut acc = Complex::new(0.0, 0.0);
                for k in 0..n {
                    let w = weights[k];
                    if w == 0.0 {
                        continue;
                    }
                    let (s, c) = (lam * (k as f64 + 0.5) * h).sin_cos();
                    // f(x) e^{-i lam x} + f(-x) e^{i lam x}
                    let (r, l) = (right[k], left[k]);
                    acc += Complex::new((r + l) * c, (l - r) * s) * w;
                }
                acc / wsum
            })
            .collect();
        for (hist, v) in histories.iter_mut().zip(values) {
            hist.push((t, v));
        }
        let settled = level >= 1
            && histories.iter().all(|hist| {
                let (a, b) = (hist[hist.len() - 1].1, hist[hist.len() - 2].1);
                (a - b).norm() <= cfg.tol * (1.0 + a.norm())
            });
        if settled || 2.0 * t > cfg.t_max * (1.0 + 1e-12) {
            break;
        }
        level += 1;
    }

    Ok(histories
        .into_iter()
        .map(|history| {
            let (t_final, value) = history[history.len() - 1];
            let converged = history.len() >= 2 && {
                let prev = history[history.len() - 2].1;
                (value - prev).norm() <= cfg.tol * (1.0 + value.norm())
            };
            MeanValueResult {
                value,
                t_final,
                history,
                converged,
                clipped_samples: clipped,
            }
        })
        .collect())
}

fn line_of(u: &FunctionExpr, y: f64) -> impl Fn(f64) -> Result<f64> + Sync + '_ {
    move |x| u.evaluate(Complex::new(x, y))
}

/// `M(u, y) = lim (1/2T) int_{-T}^{T} u(x + iy) dx`.
pub fn mean_value(u: &FunctionExpr, y: f64, cfg: &MeanConfig) -> Result<MeanValueResult> {
    Ok(line_means(line_of(u, y), &[0.0], cfg)?.remove(0))
}

/// `a_lambda(u, y) = M(u e^{-i lambda x}, y)`.
pub fn fourier_coefficient(u: &FunctionExpr, lambda: f64, y: f64, cfg: &MeanConfig) -> Result<MeanValueResult> {
    Ok(line_means(line_of(u, y), &[lambda], cfg)?.remove(0))
}

/// All coefficients `a_lambda(u, y)` for one height from shared samples.
pub fn line_coefficients(u: &FunctionExpr, y: f64, lambdas: &[f64], cfg: &MeanConfig) -> Result<Vec<MeanValueResult>> {
    line_means(line_of(u, y), lambdas, cfg)
}

/// Sampled coefficient profile `y_j -> a_lambda(u, y_j)` with its empirical
/// continuity modulus `max_j |a(y_{j+1}) - a(y_j)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileColumn {
    pub lambda: f64,
    pub ys: Vec<f64>,
    pub values: Vec<Complex>,
    pub modulus: f64,
}

fn grid_modulus(values: &[Complex]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).norm()).fold(0.0, f64::max)
}

pub fn coefficient_profile(u: &FunctionExpr, lambda: f64, ys: &[f64], cfg: &MeanConfig) -> Result<ProfileColumn> {
    let table = coefficient_table(u, &[lambda], ys, cfg)?;
    let values = table.values.into_iter().next().unwrap_or_default();
    Ok(ProfileColumn {
        lambda,
        ys: ys.to_vec(),
        modulus: grid_modulus(&values),
        values,
    })
}

/// `values[l][j] = a_{lambdas[l]}(u, ys[j])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub lambdas: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<Complex>>,
    /// Whether every entry met the convergence tolerance.
    pub converged: bool,
}

impl CoefficientTable {
    pub fn modulus(&self, l: usize) -> f64 {
        grid_modulus(&self.values[l])
    }

    /// CSV with header `lambda,y,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,y,re,im\n");
        for (l, lam) in self.lambdas.iter().enumerate() {
            for (j, y) in self.ys.iter().enumerate() {
                let a = self.values[l][j];
                let _ = writeln!(out, "{lam},{y},{},{}", a.re, a.im);
            }
        }
        out
    }
}

pub fn coefficient_table(u: &FunctionExpr, lambdas: &[f64], ys: &[f64], cfg: &MeanConfig) -> Result<CoefficientTable> {
    let rows: Vec<Vec<MeanValueResult>> = ys
        .par_iter()
        .map(|&y| line_coefficients(u, y, lambdas, cfg))
        .collect::<Result<_>>()?;
    let converged = rows.iter().flatten().all(|r| r.converged);
    let values = (0..lambdas.len())
        .map(|l| rows.iter().map(|row| row[l].value).collect())
        .collect();
    Ok(CoefficientTable {
        lambdas: lambdas.to_vec(),
        ys: ys.to_vec(),
        values,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HoloPoly;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn log_sin() -> FunctionExpr {
        // sin z = (e^{iz} - e^{-iz}) / 2i
        FunctionExpr::log_abs(HoloPoly::new([(1.0, c(0.0, -0.5)), (-1.0, c(0.0, 0.5))]))
    }

    fn log_one_minus_half() -> FunctionExpr {
        FunctionExpr::log_abs(HoloPoly::new([(0.0, c(1.0, 0.0)), (1.0, c(-0.5, 0.0))]))
    }

    #[test]
    fn cosine_mean_vanishes() {
        let r = mean_value(&FunctionExpr::cosine(1.0, 1.0), 0.4, &MeanConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.value.norm() < 1e-4);
    }

    #[test]
    fn minus_y_mean_is_exact() {
        let r = mean_value(&FunctionExpr::affine_y(0.0, -1.0), 0.7, &MeanConfig::default()).unwrap();
        assert!((r.value.re + 0.7).abs() < 1e-12);
        assert_eq!(r.value.im, 0.0);
    }

    #[test]
    fn uniform_average_is_exact_on_full_periods() {
        let cfg = MeanConfig {
            averaging: Averaging::Uniform,
            ..MeanConfig::default()
        };
        let r = fourier_coefficient(&FunctionExpr::cosine(1.0, 1.0), 1.0, 0.0, &cfg).unwrap();
        assert!((r.value - c(0.5, 0.0)).norm() < 1e-12);
        assert_eq!(r.history.len(), 2);
    }

    #[test]
    fn log_sin_mean_matches_jensen() {
        // Jensen: for y > 0, log|sin z| = y - log 2 + log|1 - e^{2iz}|, and the
        // last term has zero mean on the line.
        let oracle = 0.5 - 2f64.ln();
        let r = mean_value(&log_sin(), 0.5, &MeanConfig::default()).unwrap();
        assert!((r.value.re - oracle).abs() < 1e-6, "{}", r.value.re);
    }

    #[test]
    fn log_sin_mean_cross_checked_with_dense_quadrature() {
        // Plain midpoint over exactly one period with 2e5 nodes.
        let u = log_sin();
        let n = 200_000;
        let h = PI / n as f64;
        let s: f64 = (0..n)
            .map(|k| u.evaluate(c((k as f64 + 0.5) * h, 0.5)).unwrap())
            .sum::<f64>()
            * h
            / PI;
        let r = mean_value(&u, 0.5, &MeanConfig::default()).unwrap();
        assert!((r.value.re - s).abs() < 1e-6);
    }

    #[test]
    fn cosine_coefficients() {
        let cfg = MeanConfig::default();
        let u = FunctionExpr::cosine(1.0, 1.0);
        let a1 = fourier_coefficient(&u, 1.0, 0.3, &cfg).unwrap();
        assert!((a1.value - c(0.5, 0.0)).norm() < 1e-4);
        let a2 = fourier_coefficient(&u, 2f64.sqrt(), 0.3, &cfg).unwrap();
        assert!(a2.value.norm() < 1e-4);
    }

    #[test]
    fn power_series_coefficient() {
        // log|1 - c e^{iz}| = -sum_k c^k e^{-ky} cos(kx) / k, so a_1 = -c e^{-y} / 2.
        let cfg = MeanConfig {
            tol: 1e-9,
            ..MeanConfig::default()
        };
        let r = fourier_coefficient(&log_one_minus_half(), 1.0, 0.0, &cfg).unwrap();
        assert!((r.value - c(-0.25, 0.0)).norm() < 1e-6, "{}", r.value);
    }

    #[test]
    fn zero_frequency_coefficient_equals_mean() {
        let u = log_one_minus_half();
        let cfg = MeanConfig::default();
        let a0 = fourier_coefficient(&u, 0.0, 0.2, &cfg).unwrap();
        let m = mean_value(&u, 0.2, &cfg).unwrap();
        assert_eq!(a0.value, m.value);
    }

    #[test]
    fn profiles() {
        let cfg = MeanConfig::default();
        let col = coefficient_profile(&FunctionExpr::affine_y(0.0, -1.0), 0.0, &[0.0, 0.5, 1.0], &cfg).unwrap();
        for (v, e) in col.values.iter().zip([0.0, -0.5, -1.0]) {
            assert!((v.re - e).abs() < 1e-15);
        }
        assert!((col.modulus - 0.5).abs() < 1e-15);

        let ys: Vec<f64> = (0..=10).map(|j| j as f64 / 10.0).collect();
        let tight = MeanConfig {
            tol: 1e-9,
            ..MeanConfig::default()
        };
        let col = coefficient_profile(&log_one_minus_half(), 1.0, &ys, &tight).unwrap();
        for (y, v) in ys.iter().zip(&col.values) {
            assert!((v.re + (-y).exp() / 4.0).abs() < 1e-6, "{y} {v}");
        }

        let m = FunctionExpr::abs(HoloPoly::new([(1.0, c(1.0, 0.0))]));
        let col = coefficient_profile(&m, 0.0, &ys, &cfg).unwrap();
        for (y, v) in ys.iter().zip(&col.values) {
            assert!((v.re - (-y).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn non_convergence_is_reported_not_raised() {
        let cfg = MeanConfig {
            tol: 1e-14,
            t_max: 4.0 * PI,
            averaging: Averaging::Uniform,
            ..MeanConfig::default()
        };
        let u = FunctionExpr::cosine(2f64.sqrt(), 1.0);
        let r = mean_value(&u, 0.0, &cfg).unwrap();
        assert!(!r.converged);
        assert!(!r.history.is_empty());
        assert_eq!(r.t_final, 4.0 * PI);
    }

    #[test]
    fn table_csv_header() {
        let t = coefficient_table(&FunctionExpr::constant(2.0), &[0.0], &[0.0], &MeanConfig::default()).unwrap();
        assert!(t.to_csv().starts_with("lambda,y,re,im\n0,0,2"));
    }
}
