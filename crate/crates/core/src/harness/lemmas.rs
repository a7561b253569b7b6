use rayon::prelude::*;
use std::f64::consts::PI;

use super::mollifier::{convolution_pairing, Mollifier};
use super::report::{Relation, Report};
use crate::error::{invalid, Result};
use crate::model::{Complex, FunctionExpr, HoloPoly};
use crate::potential::{green_potential, log_floor, DiskSpec, MeasureSpec};

pub const LEMMA_SCHEDULE: [u32; 6] = [2, 4, 8, 16, 32, 64];

/// Sampling of the rectangle `[-t1, t1] x [-t2, t2]` used by the line-sup error.
#[derive(Clone, Copy, Debug)]
pub struct LineGrid {
    pub t1: f64,
    pub t2: f64,
    pub lines: usize,
    pub nodes: usize,
}

impl Default for LineGrid {
    /// 8192 nodes put `0` and `1/n`, `n = 2^k <= 64`, on cell edges, away
    /// from the midpoints.
    fn default() -> Self {
        Self {
            t1: 0.2,
            t2: 0.2,
            lines: 81,
            nodes: 8192,
        }
    }
}

/// `sup_y int_{-t1}^{t1} |a(x + iy) - b(x + iy)| dx` with y on `lines`
/// equispaced values of `[-t2, t2]` and a midpoint rule in x.
pub fn line_sup_error<A, B>(a: A, b: B, g: &LineGrid) -> Result<f64>
where
    A: Fn(Complex) -> Result<f64> + Sync,
    B: Fn(Complex) -> Result<f64> + Sync,
{
    let hx = 2.0 * g.t1 / g.nodes as f64;
    let per_line: Vec<f64> = (0..g.lines)
        .into_par_iter()
        .map(|j| {
            let y = if g.lines == 1 {
                0.0
            } else {
                -g.t2 + 2.0 * g.t2 * j as f64 / (g.lines - 1) as f64
            };
            let mut acc = 0.0;
            for k in 0..g.nodes {
                let z = Complex::new(-g.t1 + (k as f64 + 0.5) * hx, y);
                acc += (a(z)? - b(z)?).abs();
            }
            Ok(acc * hx)
        })
        .collect::<Result<_>>()?;
    Ok(per_line.into_iter().fold(0.0, f64::max))
}

fn decreasing(r: &mut Report, prefix: &str, v: &[f64]) {
    for k in 1..v.len() {
        r.check(&format!("{prefix}_increase_{k}"), v[k] - v[k - 1], Relation::Le, 1e-12);
    }
}

/// Line-sup distance between Green potentials of `mu_n` and of `mu` on the
/// disk, plus the same for `u_n = -G^{mu_n} - y` against `u_0 = -G^{mu} - y`.
pub fn lemma12_experiment(
    name: &str,
    mu_n: &[(u32, MeasureSpec)],
    mu: &MeasureSpec,
    disk: &DiskSpec,
    grid: &LineGrid,
    tol: f64,
) -> Result<Report> {
    if grid.t1 * grid.t1 + grid.t2 * grid.t2 >= disk.radius * disk.radius {
        return invalid("line rectangle must lie inside the disk");
    }
    let g = |m: &MeasureSpec, z: Complex| -> Result<f64> { Ok(green_potential(m, disk, z + disk.center)?.value) };
    let mut r = Report::new("lemma12", name);
    r.param("disk", (disk.center, disk.radius))
        .param("t1", grid.t1)
        .param("t2", grid.t2)
        .param("lines", grid.lines)
        .param("nodes", grid.nodes)
        .param("schedule", mu_n.iter().map(|(n, _)| *n).collect::<Vec<_>>())
        .param("tolerance", tol);
    let mut errs = Vec::new();
    let mut variant = Vec::new();
    let mut outside = 0.0f64;
    for (n, m) in mu_n {
        let e = line_sup_error(|z| g(m, z), |z| g(mu, z), grid)?;
        let v = line_sup_error(|z| Ok(-g(m, z)? - z.im), |z| Ok(-g(mu, z)? - z.im), grid)?;
        let ignored = green_potential(m, disk, disk.center)?.ignored_mass;
        outside = outside.max(ignored);
        r.record(&format!("green_error_n{n}"), e)
            .record(&format!("decomposition_error_n{n}"), v)
            .record(&format!("mass_outside_disk_n{n}"), ignored);
        errs.push(e);
        variant.push(v);
    }
    decreasing(&mut r, "green_error", &errs);
    decreasing(&mut r, "decomposition_error", &variant);
    let last = errs.last().copied().unwrap_or(0.0);
    r.check("final_green_error", last, Relation::Le, tol)
        .check(
            "final_decomposition_error",
            variant.last().copied().unwrap_or(0.0),
            Relation::Le,
            tol,
        )
        .key("final_green_error");
    if outside > 0.0 {
        r.caveat("some measures of the sequence carry mass outside the closed disk; that mass is left out");
    }
    r.caveat(format!("supremum over y taken on {} lines", grid.lines));
    Ok(r.finish())
}

/// `mu_n = (1 - 1/n) delta_0`: the error scales exactly like `1/n`.
pub fn lemma12_mass_scaling(disk: &DiskSpec, grid: &LineGrid) -> Result<Report> {
    let mu = MeasureSpec::atom(disk.center, 1.0);
    let seq: Vec<(u32, MeasureSpec)> = LEMMA_SCHEDULE
        .iter()
        .map(|&n| (n, MeasureSpec::atom(disk.center, 1.0 - 1.0 / f64::from(n))))
        .collect();
    let base = lemma12_experiment("mass_scaling", &seq, &mu, disk, grid, f64::INFINITY)?;
    let scaled: Vec<f64> = seq
        .iter()
        .map(|(n, _)| f64::from(*n) * base.measurement(&format!("green_error_n{n}")).unwrap_or(f64::NAN))
        .collect();
    let lo = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut r = base;
    r.record("scaled_error_min", lo)
        .check("scaled_error_relative_spread", (hi - lo) / hi, Relation::Le, 1e-9)
        .key("scaled_error_relative_spread");
    Ok(r.finish())
}

pub fn lemma12_suite() -> Result<Vec<Report>> {
    let disk = DiskSpec::new(Complex::new(0.0, 0.0), 0.4)?;
    let grid = LineGrid::default();
    let delta0 = MeasureSpec::atom(Complex::new(0.0, 0.0), 1.0);
    let moving: Vec<(u32, MeasureSpec)> = LEMMA_SCHEDULE
        .iter()
        .map(|&n| (n, MeasureSpec::atom(Complex::new(1.0 / f64::from(n), 0.0), 1.0)))
        .collect();
    let constant: Vec<(u32, MeasureSpec)> = LEMMA_SCHEDULE.iter().map(|&n| (n, delta0.clone())).collect();
    Ok(vec![
        lemma12_experiment("moving_atom", &moving, &delta0, &disk, &grid, 1e-2)?,
        lemma12_experiment("constant_sequence", &constant, &delta0, &disk, &grid, 1e-12)?,
        lemma12_mass_scaling(&disk, &grid)?,
    ])
}

pub const LEMMA4_FLOORS: [f64; 2] = [1e-2, 1e-4];
const LEMMA4_MOLLIFIER: f64 = 0.2;
const LEMMA4_CENTER: f64 = 0.5;
const LEMMA4_NX: usize = 256;
const LEMMA4_NY: usize = 32;

/// Midpoint-rule `L1` distance between `log max(eps, |f|)` and
/// `log max(eps, |g|)` over `[0, 2 pi] x [0, 1]`.
pub fn log_floor_gap(f: &HoloPoly, g: &HoloPoly, eps: f64) -> f64 {
    let (hx, hy) = (2.0 * PI / LEMMA4_NX as f64, 1.0 / LEMMA4_NY as f64);
    let mut acc = 0.0;
    for j in 0..LEMMA4_NY {
        for i in 0..LEMMA4_NX {
            let z = Complex::new((i as f64 + 0.5) * hx, (j as f64 + 0.5) * hy);
            acc += (log_floor(eps, f.eval(z).norm()) - log_floor(eps, g.eval(z).norm())).abs();
        }
    }
    acc * hx * hy
}

/// Truncated-log `L1` gaps and mollifier pairings of `log|f_n|` against
/// `log|f_0|`; `oracle` gives an exact `L1` gap per `n` when known.
pub fn lemma4_experiment(
    name: &str,
    seq: &[(u32, HoloPoly)],
    f0: &HoloPoly,
    oracle: Option<&dyn Fn(u32) -> f64>,
    vanishing: bool,
) -> Result<Report> {
    let phi = Mollifier::new(LEMMA4_MOLLIFIER)?;
    let ts = [0.0, 0.5 * PI, PI, 1.5 * PI];
    let pairing =
        |f: &HoloPoly, t: f64| convolution_pairing(&FunctionExpr::log_abs(f.clone()), &phi, t, LEMMA4_CENTER, 24);
    let base: Vec<f64> = ts.iter().map(|&t| pairing(f0, t)).collect::<Result<_>>()?;
    let mut r = Report::new("lemma4", name);
    r.param("region", (0.0, 2.0 * PI, 0.0, 1.0))
        .param("grid", (LEMMA4_NX, LEMMA4_NY))
        .param("floors", LEMMA4_FLOORS)
        .param("schedule", seq.iter().map(|(n, _)| *n).collect::<Vec<_>>())
        .param("mollifierRadius", LEMMA4_MOLLIFIER)
        .param("pairingCenterHeight", LEMMA4_CENTER)
        .param("pairingShifts", ts);
    let mut series: Vec<(String, Vec<f64>)> = LEMMA4_FLOORS
        .iter()
        .map(|e| (format!("l1_floor_{e:e}"), Vec::new()))
        .collect();
    series.push(("pairing_gap".into(), Vec::new()));
    for (n, f) in seq {
        for (k, &eps) in LEMMA4_FLOORS.iter().enumerate() {
            let gap = log_floor_gap(f, f0, eps);
            r.record(&format!("{}_n{n}", series[k].0), gap);
            if let Some(o) = oracle {
                r.check(
                    &format!("{}_oracle_error_n{n}", series[k].0),
                    (gap - o(*n)).abs(),
                    Relation::Le,
                    1e-9,
                );
            }
            series[k].1.push(gap);
        }
        let mut worst = 0.0f64;
        for (t, b) in ts.iter().zip(&base) {
            worst = worst.max((pairing(f, *t)? - b).abs());
        }
        r.record(&format!("pairing_gap_n{n}"), worst);
        series[LEMMA4_FLOORS.len()].1.push(worst);
    }
    for (label, v) in &series {
        for k in 1..v.len() {
            r.check(
                &format!("{label}_growth_{k}"),
                v[k] - 1.1 * v[k - 1],
                Relation::Le,
                1e-12,
            );
        }
        if vanishing {
            let (first, last) = (v[0], v[v.len() - 1]);
            r.check(
                &format!("{label}_final_over_first"),
                if first > 0.0 { last / first } else { 0.0 },
                Relation::Le,
                0.125,
            );
        }
    }
    r.key("pairing_gap_n64");
    r.caveat("integrals by midpoint rule on a fixed grid; convergence judged on the finite schedule");
    Ok(r.finish())
}

pub fn lemma4_suite() -> Result<Vec<Report>> {
    use super::corpus::{exp_iz, one_minus_half};
    let perturbed: Vec<(u32, HoloPoly)> = LEMMA_SCHEDULE
        .iter()
        .map(|&n| {
            let c = 0.5 + 1.0 / f64::from(n);
            (
                n,
                HoloPoly::new([(0.0, Complex::new(1.0, 0.0)), (1.0, Complex::new(-c, 0.0))]),
            )
        })
        .collect();
    let constant: Vec<(u32, HoloPoly)> = LEMMA_SCHEDULE.iter().map(|&n| (n, one_minus_half())).collect();
    let scaled: Vec<(u32, HoloPoly)> = LEMMA_SCHEDULE
        .iter()
        .map(|&n| (n, HoloPoly::new([(1.0, Complex::new(1.0 + 1.0 / f64::from(n), 0.0))])))
        .collect();
    let area = 2.0 * PI;
    let exact = move |n: u32| (1.0 + 1.0 / f64::from(n)).ln() * area;
    Ok(vec![
        lemma4_experiment("perturbed_one_minus_half", &perturbed, &one_minus_half(), None, true)?,
        lemma4_experiment("constant_sequence", &constant, &one_minus_half(), None, false)?,
        lemma4_experiment("exp_scale", &scaled, &exp_iz(), Some(&exact), true)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_sup_of_linear_gap() {
        let g = LineGrid {
            t1: 0.5,
            t2: 0.25,
            lines: 5,
            nodes: 100,
        };
        // |a - b| = |y| + 1, integral over x of length 1
        let e = line_sup_error(|z| Ok(z.im.abs() + 1.0), |_| Ok(0.0), &g).unwrap();
        assert!((e - 1.25).abs() < 1e-12);
    }

    #[test]
    fn scaled_exponential_gap_is_explicit() {
        let f = HoloPoly::new([(1.0, Complex::new(1.25, 0.0))]);
        let g = HoloPoly::new([(1.0, Complex::new(1.0, 0.0))]);
        for eps in LEMMA4_FLOORS {
            assert!((log_floor_gap(&f, &g, eps) - 1.25f64.ln() * 2.0 * PI).abs() < 1e-12);
        }
        // below the floor both truncations coincide
        let tiny = HoloPoly::new([(1.0, Complex::new(1e-9, 0.0))]);
        let tinier = HoloPoly::new([(1.0, Complex::new(1e-10, 0.0))]);
        assert_eq!(log_floor_gap(&tiny, &tinier, 1e-4), 0.0);
    }

    #[test]
    fn constant_sequence_has_no_error() {
        let disk = DiskSpec::new(Complex::new(0.0, 0.0), 0.4).unwrap();
        let mu = MeasureSpec::atom(Complex::new(0.1, 0.05), 2.0);
        let grid = LineGrid {
            lines: 5,
            nodes: 64,
            ..LineGrid::default()
        };
        let r = lemma12_experiment("c", &[(1, mu.clone()), (2, mu.clone())], &mu, &disk, &grid, 1e-12).unwrap();
        assert_eq!(r.key_value(), 0.0);
        assert_eq!(r.verdict, super::super::Verdict::Pass);
    }

    #[test]
    fn rectangle_must_fit_the_disk() {
        let disk = DiskSpec::new(Complex::new(0.0, 0.0), 0.25).unwrap();
        let mu = MeasureSpec::atom(Complex::new(0.0, 0.0), 1.0);
        assert!(lemma12_experiment("x", &[], &mu, &disk, &LineGrid::default(), 1.0).is_err());
    }
}
