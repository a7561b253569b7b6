use serde::{Deserialize, Serialize};

use super::{Complex, YRange};
use crate::error::{domain, invalid, Result};

/// Continuous coefficient profile `y -> a(y)` of an exponential-sum term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientProfile {
    Const(Complex),
    /// `sum_k c_k y^k`, coefficients in ascending degree.
    Poly(Vec<Complex>),
    /// `c * exp(k * y)`.
    ExpY {
        c: Complex,
        k: f64,
    },
    /// Piecewise-linear interpolation of samples on an increasing y-grid.
    Linear {
        ys: Vec<f64>,
        values: Vec<Complex>,
    },
    /// Piecewise interpolation by `A e^{lambda y} + B e^{-lambda y}` between
    /// consecutive grid nodes, so that `a(y) e^{i lambda x}` is harmonic on
    /// every slab between nodes. Reduces to [`CoefficientProfile::Linear`]
    /// when `lambda = 0`.
    Harmonic {
        lambda: f64,
        ys: Vec<f64>,
        values: Vec<Complex>,
    },
    Sum(Vec<CoefficientProfile>),
}

impl CoefficientProfile {
    pub fn constant(c: f64) -> Self {
        Self::Const(Complex::new(c, 0.0))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Const(c) => finite_complex(*c),
            Self::Poly(cs) => cs.iter().try_for_each(|c| finite_complex(*c)),
            Self::ExpY { c, k } => {
                finite_complex(*c)?;
                if !k.is_finite() {
                    return invalid("exp profile rate must be finite");
                }
                Ok(())
            }
            Self::Linear { ys, values } | Self::Harmonic { ys, values, .. } => {
                if ys.len() < 2 || ys.len() != values.len() {
                    return invalid(format!(
                        "interpolated profile needs >= 2 matching samples, got {} ys and {} values",
                        ys.len(),
                        values.len()
                    ));
                }
                if !ys.windows(2).all(|w| w[0] < w[1]) || !ys.iter().all(|y| y.is_finite()) {
                    return invalid("interpolation grid must be finite and strictly increasing");
                }
                values.iter().try_for_each(|c| finite_complex(*c))
            }
            Self::Sum(parts) => parts.iter().try_for_each(|p| p.validate()),
        }
    }

    /// Closed y-interval on which the profile is defined.
    pub fn y_range(&self) -> YRange {
        match self {
            Self::Linear { ys, .. } | Self::Harmonic { ys, .. } => YRange {
                lo: ys[0],
                hi: ys[ys.len() - 1],
            },
            Self::Sum(parts) => parts.iter().fold(YRange::ALL, |acc, p| acc.intersect(&p.y_range())),
            _ => YRange::ALL,
        }
    }

    pub fn eval(&self, y: f64) -> Result<Complex> {
        match self {
            Self::Const(c) => Ok(*c),
            Self::Poly(cs) => Ok(cs.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * y + c)),
            Self::ExpY { c, k } => Ok(c * (k * y).exp()),
            Self::Linear { ys, values } => {
                let (j, t) = locate(ys, y)?;
                Ok(values[j] * (1.0 - t) + values[j + 1] * t)
            }
            Self::Harmonic { lambda, ys, values } => {
                let (j, t) = locate(ys, y)?;
                let h = ys[j + 1] - ys[j];
                let lh = lambda.abs() * h;
                if lh < 1e-8 {
                    return Ok(values[j] * (1.0 - t) + values[j + 1] * t);
                }
                let s = lh.sinh();
                let w_lo = (lh * (1.0 - t)).sinh() / s;
                let w_hi = (lh * t).sinh() / s;
                Ok(values[j] * w_lo + values[j + 1] * w_hi)
            }
            Self::Sum(parts) => parts
                .iter()
                .try_fold(Complex::new(0.0, 0.0), |acc, p| Ok(acc + p.eval(y)?)),
        }
    }
}

fn finite_complex(c: Complex) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        invalid("profile coefficient must be finite")
    }
}

/// Index `j` of the grid cell `[ys[j], ys[j+1]]` containing `y`, together with
/// the local coordinate `t in [0, 1]`.
fn locate(ys: &[f64], y: f64) -> Result<(usize, f64)> {
    let n = ys.len();
    if !(ys[0] <= y && y <= ys[n - 1]) {
        return domain(format!("y = {y} outside interpolation grid [{}, {}]", ys[0], ys[n - 1]));
    }
    let j = ys.partition_point(|&v| v <= y).saturating_sub(1).min(n - 2);
    let t = (y - ys[j]) / (ys[j + 1] - ys[j]);
    Ok((j, t))
}
