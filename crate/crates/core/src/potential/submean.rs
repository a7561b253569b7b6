use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, invalid, Result};
use crate::model::{clip_floor, Complex, FunctionExpr, GridField, DEFAULT_CLIP_FLOOR};

/// Something that can be sampled at points of the plane.
pub trait Evaluable: Sync {
    fn value_at(&self, z: Complex) -> Result<f64>;

    /// Whether `z` lies in the domain of the function.
    fn covers(&self, z: Complex) -> bool;
}

impl Evaluable for FunctionExpr {
    fn value_at(&self, z: Complex) -> Result<f64> {
        self.evaluate(z)
    }

    fn covers(&self, z: Complex) -> bool {
        self.y_range().contains(z.im)
    }
}

impl Evaluable for GridField {
    fn value_at(&self, z: Complex) -> Result<f64> {
        self.interpolate(z)
    }

    fn covers(&self, z: Complex) -> bool {
        let eps = 1e-9;
        z.re >= self.x0 - eps * self.hx
            && z.re <= self.x1() + eps * self.hx
            && z.im >= self.y0 - eps * self.hy
            && z.im <= self.y1() + eps * self.hy
    }
}

/// Closure defined on the whole plane.
pub struct FnField<F>(pub F);

impl<F: Fn(Complex) -> f64 + Sync> Evaluable for FnField<F> {
    fn value_at(&self, z: Complex) -> Result<f64> {
        Ok((self.0)(z))
    }

    fn covers(&self, _z: Complex) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmeanItem {
    pub center: Complex,
    pub radius: f64,
    pub center_value: f64,
    pub circle_mean: f64,
    /// `circle_mean - center_value`; negative values violate the inequality.
    pub margin: f64,
    pub nodes: usize,
    pub passed: bool,
    /// Circle leaves the domain; not evaluated and not counted as failed.
    pub skipped: bool,
    pub clipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubmeanReport {
    pub items: Vec<SubmeanItem>,
    pub tol: f64,
}

impl SubmeanReport {
    pub fn all_passed(&self) -> bool {
        self.items.iter().all(|i| i.passed || i.skipped)
    }

    pub fn failures(&self) -> usize {
        self.items.iter().filter(|i| !i.passed && !i.skipped).count()
    }

    pub fn skipped(&self) -> usize {
        self.items.iter().filter(|i| i.skipped).count()
    }

    /// Smallest margin over evaluated circles with a finite center value.
    pub fn worst_margin(&self) -> f64 {
        self.items
            .iter()
            .filter(|i| !i.skipped && i.center_value.is_finite())
            .map(|i| i.margin)
            .fold(f64::INFINITY, f64::min)
    }
}

const MIN_NODES: usize = 256;
const MAX_NODES: usize = 65536;

fn circle_mean<E: Evaluable + ?Sized>(u: &E, z0: Complex, rho: f64, n: usize, clipped: &mut bool) -> Result<f64> {
    let mut s = 0.0;
    for k in 0..n {
        let z = z0 + Complex::from_polar(rho, 2.0 * PI * k as f64 / n as f64);
        let (v, c) = clip_floor(u.value_at(z)?, DEFAULT_CLIP_FLOOR);
        *clipped |= c;
        s += v;
    }
    Ok(s / n as f64)
}

fn one_circle<E: Evaluable + ?Sized>(u: &E, z0: Complex, rho: f64, tol: f64) -> Result<SubmeanItem> {
    let mut item = SubmeanItem {
        center: z0,
        radius: rho,
        center_value: f64::NAN,
        circle_mean: f64::NAN,
        margin: f64::NAN,
        nodes: 0,
        passed: false,
        skipped: false,
        clipped: false,
    };
    let inside = (0..16).all(|k| u.covers(z0 + Complex::from_polar(rho, PI * k as f64 / 8.0)))
        && [Complex::new(0.0, rho), Complex::new(0.0, -rho)]
            .iter()
            .all(|d| u.covers(z0 + d));
    if !inside {
        item.skipped = true;
        return Ok(item);
    }
    item.center_value = u.value_at(z0)?;
    let mut clipped = false;
    let mut n = MIN_NODES;
    let mut mean = circle_mean(u, z0, rho, n, &mut clipped)?;
    while n < MAX_NODES {
        let next = circle_mean(u, z0, rho, 2 * n, &mut clipped)?;
        let change = (next - mean).abs();
        n *= 2;
        mean = next;
        if change < tol / 10.0 {
            break;
        }
    }
    item.circle_mean = mean;
    item.nodes = n;
    item.clipped = clipped;
    if item.center_value == f64::NEG_INFINITY {
        item.margin = f64::INFINITY;
        item.passed = true;
    } else {
        item.margin = mean - item.center_value;
        item.passed = mean >= item.center_value - tol;
    }
    Ok(item)
}

/// Sub-mean-value inequality `u(z0) <= (1/2 pi) int u(z0 + rho e^{it}) dt`
/// for every center and radius. Circle means use the periodic trapezoid
/// rule from 256 nodes, doubled until the change drops below `tol / 10`.
pub fn submean_check<E: Evaluable + ?Sized>(
    u: &E,
    centers: &[Complex],
    radii: &[f64],
    tol: f64,
) -> Result<SubmeanReport> {
    use rayon::prelude::*;
    if !(tol >= 0.0) || radii.iter().any(|r| !(*r > 0.0)) {
        return invalid("submean check needs tol >= 0 and positive radii");
    }
    let pairs: Vec<(Complex, f64)> = centers
        .iter()
        .flat_map(|&c| radii.iter().map(move |&r| (c, r)))
        .collect();
    let items = pairs
        .par_iter()
        .map(|&(c, r)| one_circle(u, c, r, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubmeanReport { items, tol })
}

/// `l_eps(t) = log max(eps, t)`.
pub fn log_floor(eps: f64, t: f64) -> f64 {
    eps.max(t).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LogSubharmonicReport {
    /// `(eps, passed)` for the floored logarithm at each level.
    pub levels: Vec<(f64, bool)>,
    pub worst_margins: Vec<f64>,
    /// Sub-mean check of `u` itself.
    pub subharmonic: bool,
    pub verdict: bool,
}

struct Floored<'a> {
    u: &'a FunctionExpr,
    eps: f64,
}

impl Evaluable for Floored<'_> {
    fn value_at(&self, z: Complex) -> Result<f64> {
        let v = self.u.evaluate(z)?;
        if v < 0.0 {
            return domain(format!("negative sample {v} at {z}"));
        }
        Ok(log_floor(self.eps, v))
    }

    fn covers(&self, z: Complex) -> bool {
        self.u.covers(z)
    }
}

/// Log-subharmonicity of a nonnegative `u` through the floored logarithms
/// `log max(eps, u)` for `eps` in `{1e-2, 1e-4, 1e-6}`, together with the
/// sub-mean check of `u`.
pub fn log_subharmonic_check(
    u: &FunctionExpr,
    centers: &[Complex],
    radii: &[f64],
    tol: f64,
) -> Result<LogSubharmonicReport> {
    let mut levels = Vec::new();
    let mut worst = Vec::new();
    for eps in [1e-2, 1e-4, 1e-6] {
        let r = submean_check(&Floored { u, eps }, centers, radii, tol)?;
        levels.push((eps, r.all_passed()));
        worst.push(r.worst_margin());
    }
    let subharmonic = submean_check(u, centers, radii, tol)?.all_passed();
    let verdict = levels.iter().all(|(_, p)| *p) && subharmonic;
    Ok(LogSubharmonicReport {
        levels,
        worst_margins: worst,
        subharmonic,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeltaChoice {
    /// `+inf` when `phi` is constant.
    pub delta: f64,
    pub tau: f64,
    pub modulus_at_tau: f64,
}

const MODULUS_NODES: usize = 4001;

/// `delta = tau eps / (4 sup|phi| + 1)` with `tau` the largest grid lag at
/// which the sampled modulus of continuity of `phi` on `[lo, hi]`, taken one
/// lag further for safety, stays below `eps / (2 m(K))`.
pub fn continuity_modulus_delta(
    phi: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    eps: f64,
    measure_k: f64,
    sup_phi: f64,
) -> Result<DeltaChoice> {
    if !(hi > lo && eps > 0.0 && measure_k > 0.0 && sup_phi >= 0.0) {
        return invalid("need lo < hi, eps > 0, m(K) > 0 and sup|phi| >= 0");
    }
    let n = MODULUS_NODES;
    let h = (hi - lo) / (n - 1) as f64;
    let v: Vec<f64> = (0..n).map(|i| phi(lo + i as f64 * h)).collect();
    if v.iter().any(|x| !x.is_finite()) {
        return invalid("phi must be finite on the interval");
    }
    let omega = |lag: usize| -> f64 { (0..n - lag).map(|i| (v[i + lag] - v[i]).abs()).fold(0.0, f64::max) };
    if omega(1) == 0.0 && v.iter().all(|x| *x == v[0]) {
        return Ok(DeltaChoice {
            delta: f64::INFINITY,
            tau: f64::INFINITY,
            modulus_at_tau: 0.0,
        });
    }
    let target = eps / (2.0 * measure_k);
    // omega is nondecreasing in the lag, so bisect on it
    if omega(2) > target {
        return invalid("phi varies too fast for the sampling grid at this eps");
    }
    let (mut good, mut bad) = (1usize, n - 1);
    if omega(n - 1) <= target {
        good = n - 2;
    } else {
        while bad - good > 1 {
            let mid = (good + bad) / 2;
            if omega(mid + 1) <= target {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    let tau = good as f64 * h;
    Ok(DeltaChoice {
        delta: tau * eps / (4.0 * sup_phi + 1.0),
        tau,
        modulus_at_tau: omega(good + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HoloPoly;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn square_modulus_margin_is_rho_squared() {
        let u = FnField(|z: Complex| z.norm_sqr());
        let r = submean_check(&u, &[c(0.3, -0.2), c(1.0, 2.0)], &[0.1, 0.5], 1e-9).unwrap();
        assert!(r.all_passed());
        for it in &r.items {
            assert!((it.margin - it.radius * it.radius).abs() < 1e-12);
        }
        let v = FnField(|z: Complex| -z.norm_sqr());
        let r = submean_check(&v, &[c(0.0, 0.0)], &[0.2], 1e-6).unwrap();
        assert!(!r.all_passed());
        assert!((r.items[0].margin + 0.04).abs() < 1e-12);
    }

    #[test]
    fn log_modulus_passes_near_zero() {
        let f = FunctionExpr::log_abs(HoloPoly::new([(1.0, c(1.0, 0.0)), (0.0, c(-1.0, 0.0))]));
        let centers = [c(0.0, 0.0), c(0.01, 0.0), c(0.1, 0.05), c(-0.2, 0.1)];
        let r = submean_check(&f, &centers, &[0.05, 0.1, 0.3], 1e-9).unwrap();
        assert!(r.all_passed());
        assert!(r.items[0].passed && r.items[0].center_value == f64::NEG_INFINITY);
    }

    #[test]
    fn circles_leaving_the_domain_are_skipped() {
        let mut u = FunctionExpr::constant(1.0);
        if let FunctionExpr::ExpSum(s) = &mut u {
            s.terms[0].profile = crate::model::CoefficientProfile::Linear {
                ys: vec![0.0, 1.0],
                values: vec![c(1.0, 0.0), c(1.0, 0.0)],
            };
        }
        let r = submean_check(&u, &[c(0.0, 0.05), c(0.0, 0.5)], &[0.1], 1e-9).unwrap();
        assert!(r.items[0].skipped);
        assert!(r.items[1].passed);
        assert_eq!(r.skipped(), 1);
    }

    #[test]
    fn log_subharmonic_examples() {
        let centers = [c(0.3, 0.2), c(1.0, 0.5), c(0.0, 0.0)];
        let radii = [0.05, 0.1, 0.2];
        let f = FunctionExpr::abs(HoloPoly::new([(1.0, c(1.0, 0.0)), (0.0, c(-1.0, 0.0))]));
        assert!(log_subharmonic_check(&f, &centers, &radii, 1e-9).unwrap().verdict);
        let e = FunctionExpr::abs(HoloPoly::new([(1.0, c(1.0, 0.0))]));
        assert!(log_subharmonic_check(&e, &centers, &radii, 1e-9).unwrap().verdict);
        let s = FunctionExpr::abs(HoloPoly::new([(1.0, c(1.0, 0.0))]))
            .plus(FunctionExpr::abs(HoloPoly::new([(-1.0, c(1.0, 0.0))])));
        assert!(log_subharmonic_check(&s, &centers, &radii, 1e-9).unwrap().verdict);
        let neg = FunctionExpr::constant(-1.0);
        assert!(log_subharmonic_check(&neg, &centers, &radii, 1e-9).is_err());
    }

    fn conclusion_holds(phi: impl Fn(f64) -> f64, lo: f64, hi: f64, eps: f64, sup: f64, seed: u64) -> usize {
        let d = continuity_modulus_delta(&phi, lo, hi, eps, 1.0, sup).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pieces = 50;
        let mut tested = 0;
        for _ in 0..1000 {
            let f: Vec<f64> = (0..pieces).map(|_| rng.gen_range(lo..=hi)).collect();
            // g moves every piece by at most 1.5 delta and a few pieces anywhere
            let jump = (d.delta / (hi - lo)).min(1.0);
            let g: Vec<f64> = f
                .iter()
                .map(|&v| {
                    if rng.gen_bool(jump) {
                        rng.gen_range(lo..=hi)
                    } else {
                        (v + rng.gen_range(-1.5..1.5) * d.delta).clamp(lo, hi)
                    }
                })
                .collect();
            let dist: f64 = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).sum::<f64>() / pieces as f64;
            if dist >= d.delta {
                continue;
            }
            tested += 1;
            let gap: f64 = f.iter().zip(&g).map(|(a, b)| (phi(*a) - phi(*b)).abs()).sum::<f64>() / pieces as f64;
            assert!(gap < eps, "gap {gap} with distance {dist} < delta {}", d.delta);
        }
        tested
    }

    #[test]
    fn delta_for_identity() {
        let tested = conclusion_holds(|t| t, -1.0, 1.0, 0.1, 1.0, 3);
        assert!(tested > 100, "{tested}");
    }

    #[test]
    fn delta_for_log_floor() {
        let tested = conclusion_holds(|t| log_floor(0.01, t), 0.0, 1.0, 0.1, 0.01f64.ln().abs(), 5);
        assert!(tested > 100, "{tested}");
    }

    #[test]
    fn delta_for_constant() {
        let d = continuity_modulus_delta(|_| 2.0, -1.0, 1.0, 0.1, 1.0, 2.0).unwrap();
        assert_eq!(d.delta, f64::INFINITY);
        let z = continuity_modulus_delta(|_| 0.0, -1.0, 1.0, 0.1, 1.0, 0.0).unwrap();
        assert_eq!(z.delta, f64::INFINITY);
    }
}
