use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mean::{line_coefficients, line_means, MeanConfig};
use crate::error::{invalid, Result};
use crate::model::{Complex, FunctionExpr};

/// Integer combinations `sum_j n_j beta_j` with `|n_j| <= max_coeff` and
/// `|lambda| <= max_abs`, sorted and deduplicated at `1e-12`.
pub fn lattice_candidates(basis: &[f64], max_coeff: i64, max_abs: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    for b in basis {
        let mut next = Vec::new();
        for &l in &out {
            for n in -max_coeff..=max_coeff {
                let v = l + n as f64 * b;
                if v.abs() <= max_abs + 1e-12 {
                    next.push(v);
                }
            }
        }
        out = next;
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    out
}

/// Keeps every candidate whose coefficient modulus exceeds `threshold` on
/// at least one probe line.
pub fn spectrum_scan(
    u: &FunctionExpr,
    candidates: &[f64],
    y_probes: &[f64],
    threshold: f64,
    cfg: &MeanConfig,
) -> Result<Vec<f64>> {
    if y_probes.is_empty() {
        return invalid("spectrum scan needs at least one y-probe");
    }
    let rows: Vec<Vec<f64>> = y_probes
        .par_iter()
        .map(|&y| {
            Ok(line_coefficients(u, y, candidates, cfg)?
                .iter()
                .map(|r| r.value.norm())
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<f64> = candidates
        .iter()
        .enumerate()
        .filter(|(l, _)| rows.iter().any(|row| row[*l] > threshold))
        .map(|(_, &lam)| lam)
        .collect();
    out.sort_by(f64::total_cmp);
    Ok(out)
}

fn modulus_at(samples: &(Vec<f64>, Vec<f64>, Vec<f64>, f64), lam: f64) -> f64 {
    let (right, left, weights, h) = samples;
    let mut acc = Complex::new(0.0, 0.0);
    let mut wsum = 0.0;
    for k in 0..right.len() {
        let (s, c) = (lam * (k as f64 + 0.5) * h).sin_cos();
        acc += Complex::new((right[k] + left[k]) * c, (left[k] - right[k]) * s) * weights[k];
        wsum += 2.0 * weights[k];
    }
    acc.norm() / wsum
}

/// Periodogram peaks of `|a_lambda(u, y)|` on `[-lambda_max, lambda_max]`
/// from one smooth window of half-width `cfg.t_max`, each refined by golden
/// section; peaks not above `threshold` are dropped.
pub fn periodogram_candidates(
    u: &FunctionExpr,
    y: f64,
    lambda_max: f64,
    threshold: f64,
    cfg: &MeanConfig,
) -> Result<Vec<f64>> {
    if !(lambda_max > 0.0) {
        return invalid("lambda_max must be positive");
    }
    let t = cfg.t_max;
    let h = cfg.hx.min(2.0 * std::f64::consts::PI / (10.0 * (1.0 + lambda_max)));
    let n = (t / h).ceil() as usize;
    let h = t / n as f64;
    let pairs: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let x = (k as f64 + 0.5) * h;
            let a = u.evaluate(Complex::new(x, y))?;
            let b = u.evaluate(Complex::new(-x, y))?;
            Ok((a.max(cfg.clip_floor), b.max(cfg.clip_floor)))
        })
        .collect::<Result<_>>()?;
    let (right, left): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let weights: Vec<f64> = (0..n)
        .map(|k| {
            let s = (k as f64 + 0.5) * h / t;
            if s >= 1.0 {
                0.0
            } else {
                (-1.0 / (1.0 - s * s)).exp()
            }
        })
        .collect();
    let samples = (right, left, weights, h);

    // the smooth window's main lobe is about 8/T wide
    let step = 1.0 / t;
    let m = (lambda_max / step).ceil() as i64;
    let grid: Vec<f64> = (-m..=m).map(|k| k as f64 * step).collect();
    let power: Vec<f64> = grid.par_iter().map(|&l| modulus_at(&samples, l)).collect();
    let mut peaks = Vec::new();
    for i in 0..grid.len() {
        let left_ok = i == 0 || power[i] >= power[i - 1];
        let right_ok = i + 1 == grid.len() || power[i] > power[i + 1];
        if !(left_ok && right_ok && power[i] > threshold) {
            continue;
        }
        let (mut a, mut b) = (grid[i] - step, grid[i] + step);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
        let (mut fc, mut fd) = (modulus_at(&samples, c), modulus_at(&samples, d));
        while b - a > 1e-10 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = modulus_at(&samples, c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = modulus_at(&samples, d);
            }
        }
        let lam = 0.5 * (a + b);
        let lam = if lam.abs() < 1e-8 { 0.0 } else { lam };
        if modulus_at(&samples, lam) > threshold {
            peaks.push(lam);
        }
    }
    peaks.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    Ok(peaks)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BesselReport {
    pub mean_square: f64,
    pub coefficient_energy: f64,
    /// `M(|u|^2, y) - sum |a_lambda|^2`.
    pub deficit: f64,
    pub converged: bool,
}

/// Bessel deficit on the line `Im z = y` for a list of distinct frequencies.
pub fn bessel_check(u: &FunctionExpr, y: f64, lambdas: &[f64], cfg: &MeanConfig) -> Result<BesselReport> {
    let sq = line_means(
        |x| {
            let v = u.evaluate(Complex::new(x, y))?.max(cfg.clip_floor);
            Ok(v * v)
        },
        &[0.0],
        cfg,
    )?
    .remove(0);
    let coeffs = line_coefficients(u, y, lambdas, cfg)?;
    let energy: f64 = coeffs.iter().map(|r| r.value.norm_sqr()).sum();
    Ok(BesselReport {
        mean_square: sq.value.re,
        coefficient_energy: energy,
        deficit: sq.value.re - energy,
        converged: sq.converged && coeffs.iter().all(|r| r.converged),
    })
}
