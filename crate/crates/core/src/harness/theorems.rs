use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use super::mollifier::{convolution_pairing, Mollifier};
use super::report::{Relation, Report};
use super::HarnessConfig;
use crate::error::Result;
use crate::fourier::{
    bochner_fejer_multipliers, bochner_fejer_sum_from_table, coefficient_profile, coefficient_table,
    lattice_candidates, reduce_rational_basis, spectrum_scan, FejerWidth,
};
use crate::metrics::{displacement, find_almost_periods, stepanov_seminorm, MetricConfig, PeriodMetric};
use crate::model::{Complex, FunctionExpr, HoloPoly};
use crate::potential::submean_check;

/// Up to `k` evenly spaced entries of `v`, first and last included.
fn spread<T: Copy>(v: &[T], k: usize) -> Vec<T> {
    if v.len() <= k {
        return v.to_vec();
    }
    (0..k).map(|i| v[i * (v.len() - 1) / (k - 1)]).collect()
}

/// Middle element of each run of consecutive periods (gap > `gap` splits runs).
fn cluster_centres(periods: &[f64], gap: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=periods.len() {
        if i == periods.len() || periods[i] - periods[i - 1] > gap {
            if i > start {
                out.push(periods[(start + i - 1) / 2]);
            }
            start = i;
        }
    }
    out
}

const T1_PHI_RADIUS: f64 = 0.3;
const T1_PAIRING_NODES: usize = 24;
const T1_T_MAX: f64 = 100.0;
const T1_T_STEP: f64 = 0.5;

/// Stepanov displacement versus convolution displacement for each shift.
///
/// With the mollifier supported in `[t - r, t + r] x [y_c - r, y_c + r]`,
/// `|<u(. + tau) - u, phi(. - t)>| <= sup(phi) 2r d(tau)`; the report checks
/// this bound and that both displacements classify every shift alike.
pub fn theorem1_experiment(name: &str, u: &FunctionExpr, shifts: &[f64], y_c: f64, eps_s: f64) -> Result<Report> {
    let phi = Mollifier::new(T1_PHI_RADIUS)?;
    let (alpha, beta) = (y_c - phi.eps, y_c + phi.eps);
    let cfg = MetricConfig {
        x_window: (-1.0, T1_T_MAX + 1.0),
        hx: 1e-2,
        hy: 0.05,
        ..MetricConfig::default()
    };
    let constant = phi.sup() * 2.0 * phi.eps;
    let ts: Vec<f64> = (0..=(T1_T_MAX / T1_T_STEP) as usize)
        .map(|k| k as f64 * T1_T_STEP)
        .collect();
    let base: Vec<f64> = ts
        .iter()
        .map(|&t| convolution_pairing(u, &phi, t, y_c, T1_PAIRING_NODES))
        .collect::<Result<_>>()?;

    let mut r = Report::new("theorem1", name);
    r.param("band", (alpha, beta))
        .param("mollifierRadius", phi.eps)
        .param("pairingCenterHeight", y_c)
        .param("tGrid", (0.0, T1_T_MAX, T1_T_STEP))
        .param("stepanovEps", eps_s)
        .param("shifts", shifts)
        .param("window", cfg.x_window)
        .param("boundConstant", constant);
    let mut worst_gap = f64::NEG_INFINITY;
    for (k, &tau) in shifts.iter().enumerate() {
        let d = stepanov_seminorm(&crate::model::horizontal_shift(u, tau), u, alpha, beta, &cfg)?.value;
        let mut conv = 0.0f64;
        for (t, b) in ts.iter().zip(&base) {
            let p = convolution_pairing(u, &phi, t + tau, y_c, T1_PAIRING_NODES)?;
            conv = conv.max((p - b).abs());
        }
        let gap = conv - 1.1 * constant * d;
        worst_gap = worst_gap.max(gap);
        let agree = (d <= eps_s) == (conv <= constant * eps_s);
        r.record(&format!("tau_{k}"), tau)
            .record(&format!("stepanov_displacement_{k}"), d)
            .record(&format!("convolution_displacement_{k}"), conv)
            .check(&format!("bound_excess_{k}"), gap, Relation::Le, 1e-9)
            .check(
                &format!("classification_agrees_{k}"),
                f64::from(u8::from(agree)),
                Relation::Ge,
                1.0,
            );
    }
    r.record("worst_bound_excess", worst_gap).key("worst_bound_excess");
    r.caveat("sequential compactness is not tested; displacements compared on finite grids only")
        .caveat(format!(
            "uniformity in t checked on the grid [0, {T1_T_MAX}] with step {T1_T_STEP}"
        ))
        .caveat(format!("supremum over x replaced by the window {:?}", cfg.x_window));
    Ok(r.finish())
}

pub fn theorem1_suite(cfg: &HarnessConfig) -> Result<Vec<Report>> {
    let items = super::corpus::corpus();
    let get = |n: &str| items.iter().find(|i| i.name == n).expect("corpus item").expr.clone();
    let mut out = Vec::new();
    out.push(theorem1_experiment("const", &get("const"), &[1.0, 2.5], 0.5, 0.05)?);
    out.push(theorem1_experiment("cos_x", &get("cos_x"), &[2.0 * PI, PI], 0.5, 0.05)?);
    for (name, eps) in [("log_abs_exp_minus_one", 0.05), ("cos_x_plus_cos_sqrt2x", 0.1)] {
        let u = get(name);
        let scan = find_almost_periods(
            &u,
            eps,
            &PeriodMetric::Stepanov { alpha: 0.2, beta: 0.8 },
            20.0,
            &cfg.metric,
        )?;
        let mut shifts = spread(&cluster_centres(&scan.periods, 2.0 * scan.h_tau), 4);
        shifts.push(PI);
        out.push(theorem1_experiment(name, &u, &shifts, 0.5, eps)?);
    }
    Ok(out)
}

/// Minimum and maximum of `|f|` over the samples used by the Stepanov metric
/// for shifts up to `l_max`.
fn modulus_range(f: &HoloPoly, alpha: f64, beta: f64, l_max: f64, cfg: &MetricConfig) -> (f64, f64) {
    let n = ((cfg.x_window.1 - cfg.x_window.0 + 1.0 + l_max) / cfg.hx).ceil() as usize;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for y in cfg.y_grid(alpha, beta) {
        for k in 0..n {
            let x = cfg.x_window.0 + (k as f64 + 0.5) * cfg.hx;
            let m = f.eval(Complex::new(x, y)).norm();
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    (lo, hi)
}

const T2_L_MAX: f64 = 10.0;
const T2_CHECKS: usize = 40;

/// Almost periods of `u = |f|` against those of `log u = log|f|` on a
/// zero-free band, under `|log a - log b| <= |a - b| / min` and
/// `|a - b| <= max |log a - log b|`.
pub fn theorem2_experiment(
    name: &str,
    f: &HoloPoly,
    alpha: f64,
    beta: f64,
    eps: f64,
    cfg: &HarnessConfig,
) -> Result<Report> {
    let mcfg = &cfg.metric;
    let u = FunctionExpr::abs(f.clone());
    let lu = FunctionExpr::log_abs(f.clone());
    let metric = PeriodMetric::Stepanov { alpha, beta };
    let (m_lo, m_hi) = modulus_range(f, alpha, beta, T2_L_MAX, mcfg);
    let mut r = Report::new("theorem2", name);
    r.param("band", (alpha, beta))
        .param("eps", eps)
        .param("lMax", T2_L_MAX)
        .param("window", mcfg.x_window)
        .param("hTau", mcfg.h_tau);
    r.require("min_abs_f", m_lo, Relation::Gt, 1e-8)
        .record("max_abs_f", m_hi);
    if m_lo <= 1e-8 {
        r.caveat("f vanishes on the band; item rejected").key("min_abs_f");
        return Ok(r.finish());
    }
    let pu = find_almost_periods(&u, eps, &metric, T2_L_MAX, mcfg)?;
    let pl = find_almost_periods(&lu, eps, &metric, T2_L_MAX, mcfg)?;
    let log_bound = eps / m_lo;
    let mod_bound = eps * m_hi;
    let mut worst_log = 0.0f64;
    for &t in &spread(&pu.periods, T2_CHECKS) {
        worst_log = worst_log.max(displacement(&lu, t, &metric, mcfg)? / log_bound);
    }
    let mut worst_mod = 0.0f64;
    for &t in &spread(&pl.periods, T2_CHECKS) {
        worst_mod = worst_mod.max(displacement(&u, t, &metric, mcfg)? / mod_bound);
    }
    r.param("periodsModulus", &pu.periods).param("periodsLog", &pl.periods);
    r.check("periods_modulus_count", pu.periods.len() as f64, Relation::Ge, 1.0)
        .check("periods_log_count", pl.periods.len() as f64, Relation::Ge, 1.0)
        .record("log_eps_mapped", log_bound)
        .record("modulus_eps_mapped", mod_bound)
        .check("log_displacement_over_mapped_eps", worst_log, Relation::Le, 1.0 + 1e-9)
        .check(
            "modulus_displacement_over_mapped_eps",
            worst_mod,
            Relation::Le,
            1.0 + 1e-9,
        )
        .key("log_displacement_over_mapped_eps");
    r.caveat(format!(
        "at most {T2_CHECKS} evenly spread periods of each list re-checked against the mapped tolerance"
    ))
    .caveat(format!("supremum over x replaced by the window {:?}", mcfg.x_window));
    Ok(r.finish())
}

/// `cos x` shifted by its antiperiod must not pass as an almost period.
pub fn theorem2_control(eps: f64, cfg: &HarnessConfig) -> Result<Report> {
    let u = FunctionExpr::cosine(1.0, 1.0);
    let metric = PeriodMetric::Stepanov { alpha: 0.2, beta: 0.8 };
    let d = displacement(&u, PI, &metric, &cfg.metric)?;
    let mut r = Report::new("theorem2", "cos_x_antiperiod_control");
    r.param("tau", PI).param("eps", eps);
    r.check("control_displacement", d, Relation::Gt, eps)
        .key("control_displacement");
    Ok(r.finish())
}

pub fn theorem2_suite(cfg: &HarnessConfig) -> Result<Vec<Report>> {
    use super::corpus::{exp_iz, exp_minus_one, one_minus_half};
    Ok(vec![
        theorem2_experiment("exp_iz", &exp_iz(), 0.2, 0.8, 0.05, cfg)?,
        theorem2_experiment("one_minus_half", &one_minus_half(), 0.1, 0.9, 0.05, cfg)?,
        theorem2_experiment("exp_minus_one", &exp_minus_one(), 0.3, 0.9, 0.05, cfg)?,
        theorem2_control(0.05, cfg)?,
    ])
}

const T3_BASE_STEP: f64 = 0.1;
const T3_LEVELS: u32 = 3;
/// Moduli below this are treated as a flat profile.
const T3_FLAT: f64 = 1e-9;

/// Continuity modulus of `y -> a_lambda(u, y)` under halving of the y-step.
pub fn theorem3_experiment(
    name: &str,
    u: &FunctionExpr,
    lambda: f64,
    range: (f64, f64),
    cfg: &HarnessConfig,
) -> Result<Report> {
    let stride = 1usize << T3_LEVELS;
    let fine = T3_BASE_STEP / stride as f64;
    let n = ((range.1 - range.0) / T3_BASE_STEP).round() as usize * stride;
    let ys: Vec<f64> = (0..=n).map(|j| range.0 + j as f64 * fine).collect();
    let col = coefficient_profile(u, lambda, &ys, &cfg.mean)?;
    let mut r = Report::new("theorem3", name);
    r.param("lambda", lambda)
        .param("yRange", range)
        .param("baseStep", T3_BASE_STEP)
        .param("levels", T3_LEVELS)
        .param("flatFloor", T3_FLAT);
    let moduli: Vec<f64> = (0..=T3_LEVELS)
        .map(|l| {
            let s = stride >> l;
            col.values
                .iter()
                .step_by(s)
                .collect::<Vec<_>>()
                .windows(2)
                .map(|w| (w[1] - w[0]).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let mut worst = 0.0f64;
    for (l, w) in moduli.iter().enumerate() {
        r.record(&format!("modulus_step_{}", T3_BASE_STEP / f64::from(1u32 << l)), *w);
    }
    for l in 0..T3_LEVELS as usize {
        if moduli[l] <= T3_FLAT {
            r.check(
                &format!("flat_modulus_level_{}", l + 1),
                moduli[l + 1],
                Relation::Le,
                T3_FLAT,
            );
        } else {
            let ratio = moduli[l + 1] / moduli[l];
            worst = worst.max(ratio);
            r.check(&format!("halving_ratio_level_{}", l + 1), ratio, Relation::Le, 0.75);
        }
    }
    r.record("worst_ratio", worst).key("worst_ratio");
    r.caveat("ratio bound 0.75 is the halving factor 1/2 with slack 1.5");
    Ok(r.finish())
}

pub fn theorem3_suite(cfg: &HarnessConfig) -> Result<Vec<Report>> {
    super::corpus::corpus()
        .iter()
        .map(|i| theorem3_experiment(i.name, &i.expr, i.lambda, i.profile_range, cfg))
        .collect()
}

pub const T4_ORDERS: u32 = 4;
pub const T4_CENTERS: usize = 200;
pub const T4_RADII: [f64; 3] = [0.05, 0.1, 0.2];
const T4_SUBMEAN_TOL: f64 = 1e-6;
const T4_SPECTRUM_THRESHOLD: f64 = 1e-9;
const T4_MAX_FREQ: i64 = 30;

/// Bochner–Fejér approximants `P_1..P_4` of `u`: Stepanov distance to `u`
/// on the band and sub-mean checks at random centres.
pub fn theorem4_experiment(
    name: &str,
    u: &FunctionExpr,
    alpha: f64,
    beta: f64,
    cfg: &HarnessConfig,
    seed: u64,
) -> Result<Report> {
    let mcfg = &cfg.metric;
    let mid = 0.5 * (alpha + beta);
    let cands = lattice_candidates(&[1.0], T4_MAX_FREQ, T4_MAX_FREQ as f64);
    let spectrum = spectrum_scan(u, &cands, &[alpha, mid, beta], T4_SPECTRUM_THRESHOLD, &cfg.mean)?;
    let reduced = reduce_rational_basis(&spectrum, 1e-9);
    let basis = if reduced.basis.is_empty() {
        vec![1.0]
    } else {
        reduced.basis.clone()
    };
    let ys = mcfg.y_grid(alpha, beta);
    let mut lambdas = vec![0.0];
    lambdas.extend(spectrum.iter().copied().filter(|l| *l != 0.0));
    let table = coefficient_table(u, &lambdas, &ys, &cfg.mean)?;

    let rmax = T4_RADII.iter().copied().fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers: Vec<Complex> = (0..T4_CENTERS)
        .map(|_| {
            Complex::new(
                rng.gen_range(mcfg.x_window.0..mcfg.x_window.1),
                rng.gen_range(alpha + rmax..beta - rmax),
            )
        })
        .collect();

    let mut r = Report::new("theorem4", name);
    r.param("band", (alpha, beta))
        .param("spectrum", &spectrum)
        .param("basis", &basis)
        .param("width", FejerWidth::Classical)
        .param("orders", T4_ORDERS)
        .param("window", mcfg.x_window)
        .param("hx", mcfg.hx)
        .param("centers", T4_CENTERS)
        .param("radii", T4_RADII)
        .param("submeanTol", T4_SUBMEAN_TOL)
        .param("seed", seed);
    let mut prev: Option<f64> = None;
    for m in 1..=T4_ORDERS {
        let spec = bochner_fejer_multipliers(&basis, m, FejerWidth::Classical)?;
        let p = FunctionExpr::ExpSum(bochner_fejer_sum_from_table(&spec, &reduced.frequencies, &table)?);
        let d = stepanov_seminorm(&p, u, alpha, beta, mcfg)?.value;
        r.record(&format!("distance_m{m}"), d);
        if let Some(dp) = prev {
            r.check(&format!("distance_increase_m{m}"), d - 1.1 * dp, Relation::Le, 1e-12);
        }
        prev = Some(d);
        let sub = submean_check(&p, &centers, &T4_RADII, T4_SUBMEAN_TOL)?;
        r.record(&format!("worst_submean_margin_m{m}"), sub.worst_margin())
            .check(
                &format!("submean_failures_m{m}"),
                sub.failures() as f64,
                Relation::Le,
                0.0,
            )
            .check(
                &format!("submean_skipped_m{m}"),
                sub.skipped() as f64,
                Relation::Le,
                0.0,
            );
    }
    r.check(
        &format!("final_distance_m{T4_ORDERS}"),
        prev.unwrap_or(0.0),
        Relation::Le,
        0.05,
    )
    .key(&format!("final_distance_m{T4_ORDERS}"));
    r.caveat("classical Bochner-Fejer width (m!)^2; coefficient profiles interpolated harmonically between y-nodes")
        .caveat(format!("supremum over x replaced by the window {:?}", mcfg.x_window));
    Ok(r.finish())
}

pub fn theorem4_suite(cfg: &HarnessConfig) -> Result<Vec<Report>> {
    let items = super::corpus::corpus();
    let get = |n: &str| items.iter().find(|i| i.name == n).expect("corpus item").expr.clone();
    [
        ("const", 0.0, 1.0),
        ("cos_x", 0.0, 1.0),
        ("log_abs_one_minus_half", 0.0, 1.0),
        ("log_abs_sin", 0.3, 1.0),
    ]
    .iter()
    .enumerate()
    .map(|(k, &(n, a, b))| theorem4_experiment(n, &get(n), a, b, cfg, cfg.seed.wrapping_add(k as u64)))
    .collect()
}
