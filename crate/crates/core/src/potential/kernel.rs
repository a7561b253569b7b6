use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::measure::{log_cell_average, MeasureSpec};
use crate::error::{domain, invalid, Result};
use crate::model::{Complex, StripSpec};

/// Largest admissible `gamma` for the kernel on `strip`: `pi / width^2`.
pub fn gamma_bound(strip: &StripSpec) -> f64 {
    PI / (strip.width() * strip.width())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripKernelSpec {
    pub gamma: f64,
    pub strip: StripSpec,
}

impl StripKernelSpec {
    pub fn new(gamma: f64, strip: StripSpec) -> Result<Self> {
        let s = Self { gamma, strip };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bound = gamma_bound(&self.strip);
        if !(self.gamma > 0.0 && self.gamma < bound) {
            return domain(format!(
                "gamma = {} is not admissible, need 0 < gamma < {bound}",
                self.gamma
            ));
        }
        Ok(())
    }

    /// `theta(w) = K(w) - log|w|`, continuous with `theta(0) = log(gamma) / 2`.
    pub fn theta(&self, w: Complex) -> f64 {
        let r = w.norm();
        if r == 0.0 {
            0.5 * self.gamma.ln()
        } else {
            strip_kernel(self, w) - r.ln()
        }
    }
}

/// `K(w) = (1/2) log|e^{-gamma w^2} - 1|`, `-inf` at `w = 0`.
pub fn strip_kernel(spec: &StripKernelSpec, w: Complex) -> f64 {
    let (u, v) = (w.re, w.im);
    let a = -spec.gamma * (u * u - v * v);
    let b = -2.0 * spec.gamma * u * v;
    // e^{a + ib} - 1 without cancellation for small |a + ib|
    let half = (0.5 * b).sin();
    let re = a.exp_m1() * b.cos() - 2.0 * half * half;
    let im = a.exp() * b.sin();
    0.5 * re.hypot(im).ln()
}

/// `K1 = max(K, -2 log N)`, `K2 = min(K + 2 log N, 0)`. `K2` is nudged so
/// that `K1 + K2` rounds back to `K` whenever some double does.
pub fn kernel_split(spec: &StripKernelSpec, n: f64, w: Complex) -> Result<(f64, f64)> {
    if !(n > 1.0) {
        return invalid(format!("split level N must exceed 1, got {n}"));
    }
    let k = strip_kernel(spec, w);
    let level = 2.0 * n.ln();
    let k1 = k.max(-level);
    if k >= -level || !k.is_finite() {
        let k2 = (k + level).min(0.0);
        return Ok((k1, if k >= -level { 0.0 } else { k2 }));
    }
    let mut k2 = k + level;
    for _ in 0..8 {
        let s = k1 + k2;
        if s == k {
            break;
        }
        k2 = if s < k { k2.next_up() } else { k2.next_down() };
    }
    Ok((k1, k2.min(0.0)))
}

/// `sup {|w| : K2(w) < 0}`, found by bisection on 64 rays.
pub fn split_radius(spec: &StripKernelSpec, n: f64) -> Result<f64> {
    if !(n > 1.0) {
        return invalid(format!("split level N must exceed 1, got {n}"));
    }
    let level = -2.0 * n.ln();
    let mut worst = 0.0f64;
    for k in 0..64 {
        let dir = Complex::from_polar(1.0, PI * k as f64 / 64.0);
        let (mut lo, mut hi) = (0.0, 1.0 / spec.gamma.sqrt());
        if strip_kernel(spec, dir * hi) < level {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if strip_kernel(spec, dir * mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        worst = worst.max(lo);
    }
    Ok(worst)
}

/// Smooth y-profile equal to 1 on `[a, b]` and 0 outside `[a - eps, b + eps]`.
pub fn mollified_indicator(a: f64, b: f64, eps: f64) -> impl Fn(f64) -> f64 + Sync + Send + Copy {
    fn psi(t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            (-1.0 / t).exp()
        }
    }
    move |y: f64| {
        let d = if y < a {
            a - y
        } else if y > b {
            y - b
        } else {
            0.0
        };
        if d == 0.0 {
            return 1.0;
        }
        if d >= eps {
            return 0.0;
        }
        let t = 1.0 - d / eps;
        psi(t) / (psi(t) + psi(1.0 - t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StripPotential {
    pub value: f64,
    /// Columns `|n - floor(Re z)| <= window` were summed.
    pub window: usize,
    /// Bound on the dropped part.
    pub tail_bound: f64,
    /// Largest `phi`-weighted mass found in a unit column.
    pub column_mass: f64,
}

/// `V(z) = int K(w - z) phi(Im w) dmu(w)`, truncated to the unit columns
/// near `Re z` whose Gaussian tail estimate (times 10) stays below `tol`.
pub fn strip_potential(
    mu: &MeasureSpec,
    spec: &StripKernelSpec,
    phi: &(dyn Fn(f64) -> f64 + Sync),
    z: Complex,
    tol: f64,
) -> Result<StripPotential> {
    spec.validate()?;
    if !(tol > 0.0) {
        return invalid("tolerance must be positive");
    }
    // (location, weighted mass, cell size) for every piece of mu
    let mut pieces: Vec<(Complex, f64, Option<(f64, f64)>)> = Vec::new();
    for a in &mu.atoms {
        let wgt = phi(a.z.im);
        if a.mass != 0.0 && wgt != 0.0 {
            pieces.push((a.z, a.mass * wgt, None));
        }
    }
    if let Some(d) = &mu.density {
        for j in 0..d.ny {
            let wgt = phi(d.y(j));
            if wgt == 0.0 {
                continue;
            }
            for i in 0..d.nx {
                let v = d.get(i, j);
                if v != 0.0 {
                    pieces.push((Complex::new(d.x(i), d.y(j)), v * d.hx * d.hy * wgt, Some((d.hx, d.hy))));
                }
            }
        }
    }
    let mut columns: BTreeMap<i64, f64> = BTreeMap::new();
    let mut height = spec.strip.width();
    for (w, m, _) in &pieces {
        *columns.entry(w.re.floor() as i64).or_default() += m.abs();
        height = height.max((w.im - z.im).abs());
    }
    let column_mass = columns.values().copied().fold(0.0, f64::max);

    let g = spec.gamma;
    let q = |k: usize| (g * height * height - g * ((k as f64) - 1.0).max(0.0).powi(2)).exp();
    let tail = |w: usize| {
        let mut s = 0.0;
        let mut k = w + 1;
        loop {
            let t = q(k);
            s += t;
            if t < 1e-300 || t < s * 1e-17 {
                break;
            }
            k += 1;
        }
        2.0 * column_mass * s
    };
    let mut window = 1usize;
    while q(window + 1) > 0.5 || 10.0 * tail(window) > tol {
        window += 1;
        if window > 1_000_000 {
            return domain("tail bound does not reach the tolerance");
        }
    }
    let nz = z.re.floor() as i64;
    let mut value = 0.0;
    for (w, m, cell) in &pieces {
        if (w.re.floor() as i64).abs_diff(nz) as usize > window {
            continue;
        }
        let d = *w - z;
        let k = match cell {
            Some((hx, hy)) if d.norm() < 2.0 * hx.max(*hy) => {
                log_cell_average(d.re - hx / 2.0, d.re + hx / 2.0, d.im - hy / 2.0, d.im + hy / 2.0) + spec.theta(d)
            }
            _ => strip_kernel(spec, d),
        };
        value += m * k;
    }
    let dropped_mass: f64 = columns
        .iter()
        .filter(|(n, _)| n.abs_diff(nz) as usize > window)
        .map(|(_, m)| m)
        .sum();
    Ok(StripPotential {
        value,
        window,
        tail_bound: if dropped_mass > 0.0 { tail(window) } else { 0.0 },
        column_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::super::measure::{riesz_measure, Atom};
    use super::*;
    use crate::model::GridField;
    use proptest::prelude::*;

    fn spec(gamma: f64) -> StripKernelSpec {
        StripKernelSpec::new(gamma, StripSpec::new(0.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn bound_and_admissibility() {
        assert_eq!(gamma_bound(&StripSpec::new(0.0, 1.0).unwrap()), PI);
        assert!((gamma_bound(&StripSpec::new(-1.0, 1.0).unwrap()) - PI / 4.0).abs() < 1e-15);
        assert!(StripKernelSpec::new(PI, StripSpec::new(0.0, 1.0).unwrap()).is_err());
        assert!(StripKernelSpec::new(0.0, StripSpec::new(0.0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn kernel_near_zero_and_far_away() {
        let s = spec(1.0);
        let w = Complex::new(1e-4, 0.0);
        assert!((strip_kernel(&s, w) - w.norm().ln()).abs() <= 1e-6);
        assert!((s.theta(Complex::new(1e-5, 1e-5)) - 0.5 * s.gamma.ln()).abs() < 1e-8);
        let s2 = spec(2.5);
        let w = Complex::new(3e-5, -2e-5);
        // e^{-g w^2} - 1 = -g w^2 (1 + O(w^2))
        let oracle = 0.5 * (s2.gamma * w.norm_sqr()).ln();
        assert!((strip_kernel(&s2, w) - oracle).abs() < 1e-9);
        assert!(strip_kernel(&s, Complex::new(50.0, 0.0)).abs() <= 1e-10);
        assert!(strip_kernel(&s, Complex::new(-50.0, 0.0)).abs() <= 1e-10);
        assert_eq!(strip_kernel(&s, Complex::new(0.0, 0.0)), f64::NEG_INFINITY);
    }

    #[test]
    fn kernel_matches_direct_formula() {
        let s = spec(1.3);
        for w in [Complex::new(0.7, 0.2), Complex::new(-1.5, 0.9), Complex::new(0.1, -0.4)] {
            let direct = 0.5 * ((-s.gamma * w * w).exp() - 1.0).norm().ln();
            assert!((strip_kernel(&s, w) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn kernel_laplacian_is_unit_atom() {
        let s = spec(1.0);
        let h = 2e-3;
        let n = 201;
        let g = GridField::from_fn(-0.2, -0.2, h, h, n, n, |x, y| strip_kernel(&s, Complex::new(x, y)));
        let r = riesz_measure(&g).unwrap();
        assert!((r.total_mass() - 1.0).abs() < 1e-2, "{}", r.total_mass());
    }

    #[test]
    fn split_examples() {
        let s = spec(1.0);
        let (k1, k2) = kernel_split(&s, 10.0, Complex::new(0.5, 0.1)).unwrap();
        assert_eq!(k2, 0.0);
        assert_eq!(k1, strip_kernel(&s, Complex::new(0.5, 0.1)));
        let (k1, k2) = kernel_split(&s, 100.0, Complex::new(1e-6, 0.0)).unwrap();
        assert_eq!(k1, -2.0 * 100f64.ln());
        assert!(k2 < 0.0);
        let r = split_radius(&s, 100.0).unwrap();
        // K ~ log|w| near 0, so the radius is about N^-2
        assert!(r > 0.5e-4 && r < 2e-4, "{r}");
        assert!(kernel_split(&s, 1.0, Complex::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn split_is_exact_at_random_points() {
        use rand::{Rng, SeedableRng};
        let s = spec(1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let w = Complex::new(rng.gen_range(-1e-3..1e-3), rng.gen_range(-1e-3..1e-3))
                * 10f64.powf(rng.gen_range(-3.0..3.0));
            let n = 10f64.powf(rng.gen_range(0.1..4.0));
            let (k1, k2) = kernel_split(&s, n, w).unwrap();
            let k = strip_kernel(&s, w);
            assert!((k1 + k2 - k).abs() <= f64::EPSILON * k.abs(), "{k1} + {k2} vs {k}");
            assert!(k2 <= 0.0 && k1 >= -2.0 * n.ln());
        }
    }

    proptest! {
        #[test]
        fn split_identity(re in -2.0f64..2.0, im in -1.0f64..1.0, n in 1.01f64..1e4) {
            let s = spec(1.0);
            let w = Complex::new(re, im);
            let (k1, k2) = kernel_split(&s, n, w).unwrap();
            let k = strip_kernel(&s, w);
            prop_assert!(k1 + k2 == k || (k1 + k2 - k).abs() <= f64::EPSILON * k.abs());
            prop_assert!(k2 <= 0.0);
            prop_assert!(k1 >= -2.0 * n.ln());
        }
    }

    #[test]
    fn single_atom_potential() {
        let s = spec(1.0);
        let w0 = Complex::new(0.3, 0.5);
        let mu = MeasureSpec::atom(w0, 1.0);
        let phi = mollified_indicator(0.2, 0.8, 0.1);
        let z = Complex::new(-0.4, 0.6);
        let v = strip_potential(&mu, &s, &phi, z, 1e-12).unwrap();
        assert!((v.value - strip_kernel(&s, w0 - z)).abs() < 1e-15);
    }

    #[test]
    fn lattice_potential_is_periodic() {
        let s = spec(1.0);
        let mu = MeasureSpec {
            atoms: (-60..=60)
                .map(|k| Atom {
                    z: Complex::new(2.0 * PI * k as f64, 0.5),
                    mass: 1.0,
                })
                .collect(),
            density: None,
        };
        let phi = |_: f64| 1.0;
        for x in [0.1, 1.0, 2.5, 4.0] {
            let a = strip_potential(&mu, &s, &phi, Complex::new(x, 0.3), 1e-10).unwrap();
            let b = strip_potential(&mu, &s, &phi, Complex::new(x + 2.0 * PI, 0.3), 1e-10).unwrap();
            assert!((a.value - b.value).abs() < 1e-8);
            assert!(a.tail_bound <= 1e-10);
        }
    }

    #[test]
    fn potential_laplacian_recovers_profile() {
        let s = spec(1.0);
        let y0 = 0.45;
        let mu = MeasureSpec::atom(Complex::new(0.0, y0), 1.0);
        let phi = mollified_indicator(0.3, 0.6, 0.2);
        let h = 2e-3;
        let n = 101;
        let g = GridField::from_fn(-0.1, y0 - 0.1, h, h, n, n, |x, y| {
            strip_potential(&mu, &s, &phi, Complex::new(x, y), 1e-12).unwrap().value
        });
        let r = riesz_measure(&g).unwrap();
        assert!((r.total_mass() - phi(y0)).abs() < 1e-2);
    }

    #[test]
    fn indicator_profile() {
        let phi = mollified_indicator(0.0, 1.0, 0.5);
        assert_eq!(phi(0.5), 1.0);
        assert_eq!(phi(-0.6), 0.0);
        assert!((phi(1.25) - 0.5).abs() < 1e-15);
        assert!(phi(-0.1) > phi(-0.3));
    }
}
