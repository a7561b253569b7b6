use serde::{Deserialize, Serialize};

use super::mean::{coefficient_table, CoefficientTable, MeanConfig};
use crate::error::{invalid, Result};
use crate::model::{CoefficientProfile, ExpSum, ExpTerm, FunctionExpr};

const MAX_ORDER: u32 = 10;
const MAX_DEN: i64 = 24;

/// Frequency `lambda = sum_j (num_j / den) basis_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFrequency {
    pub lambda: f64,
    pub num: Vec<i64>,
    pub den: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalBasis {
    pub basis: Vec<f64>,
    /// Input frequencies with coordinates; all `num` have `basis.len()` entries.
    pub frequencies: Vec<RationalFrequency>,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn reduce(mut num: Vec<i64>, den: i64) -> (Vec<i64>, i64) {
    let g = num.iter().fold(den, |g, &n| gcd(g, n));
    if g > 1 {
        num.iter_mut().for_each(|n| *n /= g);
        (num, den / g)
    } else {
        (num, den)
    }
}

/// Finds `num / den` with `|sum_j num_j basis_j / den - lambda| <= tol (1 + |lambda|)`,
/// smallest denominator first.
fn express(lambda: f64, basis: &[f64], tol: f64) -> Option<(Vec<i64>, i64)> {
    let k = basis.len();
    if k == 0 {
        return None;
    }
    let tol = tol * (1.0 + lambda.abs());
    let bmin = basis.iter().fold(f64::INFINITY, |m, b| m.min(b.abs()));
    let bound = 2.0 * (lambda.abs() + 1.0) / bmin + 2.0;
    let max_den = if k <= 2 { MAX_DEN } else { 2 };
    for den in 1..=max_den {
        let d = den as f64;
        let span = (bound * d).ceil() as i64;
        // free coordinates 0..k-1, last one solved by rounding
        let mut free = vec![-span; k - 1];
        loop {
            let partial: f64 = free.iter().zip(basis).map(|(&n, b)| n as f64 * b).sum();
            let last = ((lambda * d - partial) / basis[k - 1]).round();
            let approx = (partial + last * basis[k - 1]) / d;
            if (approx - lambda).abs() <= tol && last.abs() <= (span as f64) {
                let mut num = free.clone();
                num.push(last as i64);
                return Some(reduce(num, den));
            }
            // odometer
            let mut i = 0;
            loop {
                if i == free.len() {
                    break;
                }
                free[i] += 1;
                if free[i] <= span {
                    break;
                }
                free[i] = -span;
                i += 1;
            }
            if i == free.len() {
                break;
            }
        }
    }
    None
}

/// Greedy reduction over the rationals: frequencies are visited in ascending
/// `|lambda|` (positive first on ties); each one either has small rational
/// coordinates in the basis so far, within `tol`, or joins the basis.
pub fn reduce_rational_basis(freqs: &[f64], tol: f64) -> RationalBasis {
    let mut order: Vec<usize> = (0..freqs.len()).collect();
    order.sort_by(|&a, &b| {
        freqs[a]
            .abs()
            .total_cmp(&freqs[b].abs())
            .then(freqs[b].total_cmp(&freqs[a]))
    });
    let mut basis: Vec<f64> = Vec::new();
    let mut coords: Vec<Option<(Vec<i64>, i64)>> = vec![None; freqs.len()];
    for &i in &order {
        let lam = freqs[i];
        if lam.abs() <= tol {
            coords[i] = Some((Vec::new(), 1));
            continue;
        }
        match express(lam, &basis, tol) {
            Some(c) => coords[i] = Some(c),
            None => {
                let mut num = vec![0; basis.len()];
                num.push(1);
                basis.push(lam);
                coords[i] = Some((num, 1));
            }
        }
    }
    let k = basis.len();
    let frequencies = freqs
        .iter()
        .zip(coords)
        .map(|(&lambda, c)| {
            let (mut num, den) = c.expect("every frequency visited");
            num.resize(k, 0);
            RationalFrequency { lambda, num, den }
        })
        .collect();
    RationalBasis { basis, frequencies }
}

/// Width `W` of the one-dimensional Fejér factors `max(0, 1 - |p|/W)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FejerWidth {
    /// `W = m m! + 1`.
    Linear,
    /// `W = (m!)^2`: for `lambda = q beta` the multiplier is `1 - |q|/m!`.
    Classical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierEntry {
    pub p: Vec<i64>,
    pub lambda: f64,
    pub k: f64,
}

/// Product-of-Fejér multipliers over a basis `beta_1..beta_k` with step
/// `1/m!`: `k(p) = prod_j max(0, 1 - |p_j|/W)` at `lambda = sum_j (p_j/m!) beta_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BochnerFejerSpec {
    pub basis: Vec<f64>,
    pub m: u32,
    pub width: FejerWidth,
    pub multipliers: Vec<MultiplierEntry>,
}

fn factorial(m: u32) -> i64 {
    (1..=i64::from(m)).product()
}

impl BochnerFejerSpec {
    pub fn denominator(&self) -> i64 {
        factorial(self.m)
    }

    pub fn width_value(&self) -> i64 {
        let f = self.denominator();
        match self.width {
            FejerWidth::Linear => i64::from(self.m) * f + 1,
            FejerWidth::Classical => f * f,
        }
    }

    pub fn multiplier(&self, p: &[i64]) -> f64 {
        let w = self.width_value() as f64;
        p.iter().map(|&pj| (1.0 - pj.abs() as f64 / w).max(0.0)).product()
    }

    pub fn lambda(&self, p: &[i64]) -> f64 {
        let d = self.denominator() as f64;
        p.iter().zip(&self.basis).map(|(&pj, b)| pj as f64 / d * b).sum()
    }

    /// Multiplier of a frequency given in rational coordinates; zero when the
    /// frequency lies outside the module `(1/m!) Z beta`.
    pub fn multiplier_for(&self, f: &RationalFrequency) -> f64 {
        let d = self.denominator();
        if f.num.iter().all(|&n| n == 0) {
            return 1.0;
        }
        if f.num.len() != self.basis.len() || d % f.den != 0 {
            return 0.0;
        }
        let s = d / f.den;
        let p: Vec<i64> = f.num.iter().map(|n| n * s).collect();
        self.multiplier(&p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// Builds the multiplier table. With several basis elements only entries with
/// `|p_j| <= limit` are listed; the multiplier itself is defined everywhere
/// through [`BochnerFejerSpec::multiplier`].
pub fn bochner_fejer_multipliers(basis: &[f64], m: u32, width: FejerWidth) -> Result<BochnerFejerSpec> {
    if m == 0 || m > MAX_ORDER {
        return invalid(format!("order m must be in 1..={MAX_ORDER}, got {m}"));
    }
    if basis.is_empty() || basis.iter().any(|b| !b.is_finite() || *b == 0.0) {
        return invalid("basis must be nonempty, finite and nonzero");
    }
    let mut spec = BochnerFejerSpec {
        basis: basis.to_vec(),
        m,
        width,
        multipliers: Vec::new(),
    };
    let w = spec.width_value();
    let limit = if basis.len() == 1 { w - 1 } else { (w - 1).min(8) };
    let k = basis.len();
    let mut p = vec![-limit; k];
    loop {
        let mult = spec.multiplier(&p);
        if mult > 0.0 {
            spec.multipliers.push(MultiplierEntry {
                p: p.clone(),
                lambda: spec.lambda(&p),
                k: mult,
            });
        }
        let mut i = 0;
        while i < k {
            p[i] += 1;
            if p[i] <= limit {
                break;
            }
            p[i] = -limit;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    Ok(spec)
}

fn kept_frequencies(spec: &BochnerFejerSpec, frequencies: &[RationalFrequency]) -> Vec<(f64, f64)> {
    let mut kept: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for f in frequencies {
        if f.lambda == 0.0 || kept.iter().any(|(l, _)| *l == f.lambda) {
            continue;
        }
        let k = spec.multiplier_for(f);
        if k > 0.0 {
            kept.push((f.lambda, k));
        }
    }
    kept
}

/// `P_m(z) = sum_lambda k_lambda a_lambda(u, y) e^{i lambda x}` over the given
/// frequencies (the zero frequency is always included). Coefficients are
/// sampled on `ys` and interpolated by strip-harmonic profiles, so `P_m` is
/// exact at the nodes and harmonic in `z` between them.
pub fn bochner_fejer_sum(
    u: &FunctionExpr,
    spec: &BochnerFejerSpec,
    frequencies: &[RationalFrequency],
    ys: &[f64],
    cfg: &MeanConfig,
) -> Result<ExpSum> {
    if ys.len() < 2 || ys.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("y-grid must have at least two increasing nodes");
    }
    let lambdas: Vec<f64> = kept_frequencies(spec, frequencies).iter().map(|(l, _)| *l).collect();
    let table = coefficient_table(u, &lambdas, ys, cfg)?;
    bochner_fejer_sum_from_table(spec, frequencies, &table)
}

/// Same as [`bochner_fejer_sum`] with precomputed coefficients; `table` must
/// hold the zero frequency and every frequency with a nonzero multiplier.
pub fn bochner_fejer_sum_from_table(
    spec: &BochnerFejerSpec,
    frequencies: &[RationalFrequency],
    table: &CoefficientTable,
) -> Result<ExpSum> {
    if table.ys.len() < 2 || table.ys.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("y-grid must have at least two increasing nodes");
    }
    let mut terms = Vec::new();
    for (lambda, k) in kept_frequencies(spec, frequencies) {
        let Some(l) = table.lambdas.iter().position(|t| *t == lambda) else {
            return invalid(format!("coefficient table lacks frequency {lambda}"));
        };
        terms.push(ExpTerm {
            freq: lambda,
            profile: CoefficientProfile::Harmonic {
                lambda,
                ys: table.ys.clone(),
                values: table.values[l].iter().map(|a| a * k).collect(),
            },
        });
    }
    ExpSum::new(terms)
}
