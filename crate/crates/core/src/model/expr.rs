use serde::{Deserialize, Serialize};

use super::{CoefficientProfile, Complex, YRange};
use crate::error::{domain, invalid, Result};

/// One term `c e^{i mu z}` of a holomorphic exponential polynomial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloTerm {
    pub freq: f64,
    pub coef: Complex,
}

/// Holomorphic exponential polynomial `f(z) = sum_n c_n e^{i mu_n z}` with
/// real (not necessarily integer) frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloPoly {
    pub terms: Vec<HoloTerm>,
}

impl HoloPoly {
    pub fn new(terms: impl IntoIterator<Item = (f64, Complex)>) -> Self {
        Self {
            terms: terms.into_iter().map(|(freq, coef)| HoloTerm { freq, coef }).collect(),
        }
    }

    pub fn eval(&self, z: Complex) -> Complex {
        let iz = Complex::new(-z.im, z.re);
        self.terms
            .iter()
            .fold(Complex::new(0.0, 0.0), |acc, t| acc + t.coef * (iz * t.freq).exp())
    }

    fn validate(&self) -> Result<()> {
        if self
            .terms
            .iter()
            .all(|t| t.freq.is_finite() && t.coef.re.is_finite() && t.coef.im.is_finite())
        {
            Ok(())
        } else {
            invalid("holomorphic polynomial terms must be finite")
        }
    }
}

/// One term `a(y) e^{i lambda x}` of an exponential sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub freq: f64,
    pub profile: CoefficientProfile,
}

/// Finite exponential sum `P(z) = sum_n a_n(y) e^{i lambda_n x}` with pairwise
/// distinct frequencies. As a [`FunctionExpr`] leaf it contributes `Re P(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSum {
    pub terms: Vec<ExpTerm>,
}

impl ExpSum {
    pub fn new(terms: Vec<ExpTerm>) -> Result<Self> {
        let s = Self { terms };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.terms.iter().enumerate() {
            if !t.freq.is_finite() {
                return invalid("exponential sum frequency must be finite");
            }
            if self.terms[..i].iter().any(|s| s.freq == t.freq) {
                return invalid(format!("duplicate frequency {} in exponential sum", t.freq));
            }
            t.profile.validate()?;
        }
        Ok(())
    }

    pub fn y_range(&self) -> YRange {
        self.terms
            .iter()
            .fold(YRange::ALL, |acc, t| acc.intersect(&t.profile.y_range()))
    }

    /// Complex value `P(z)`.
    pub fn eval_complex(&self, z: Complex) -> Result<Complex> {
        self.terms.iter().try_fold(Complex::new(0.0, 0.0), |acc, t| {
            let a = t.profile.eval(z.im)?;
            Ok(acc + a * Complex::from_polar(1.0, t.freq * z.re))
        })
    }
}

/// Symbolic generator tree for real-valued (typically subharmonic) functions
/// on a strip.
///
/// JSON form is externally tagged, e.g. `log|e^{iz} - 1|` is
/// `{"logabs":{"terms":[{"freq":1.0,"coef":[1.0,0.0]},{"freq":0.0,"coef":[-1.0,0.0]}]}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionExpr {
    /// `Re P(z)` for an exponential sum `P`.
    ExpSum(ExpSum),
    /// `Re f(z)` for a holomorphic exponential polynomial `f`.
    Re(HoloPoly),
    /// `log|f(z)|`, equal to `-inf` exactly at the zeros of `f`.
    LogAbs(HoloPoly),
    Exp(Box<FunctionExpr>),
    Sum(Box<FunctionExpr>, Box<FunctionExpr>),
    Max(Box<FunctionExpr>, Box<FunctionExpr>),
    /// `c * u` with `c >= 0`.
    Scale(f64, Box<FunctionExpr>),
    /// `u(z + t)` for real `t`.
    HShift(f64, Box<FunctionExpr>),
}

impl FunctionExpr {
    pub fn constant(c: f64) -> Self {
        Self::ExpSum(ExpSum {
            terms: vec![ExpTerm {
                freq: 0.0,
                profile: CoefficientProfile::constant(c),
            }],
        })
    }

    /// `a + b y`.
    pub fn affine_y(a: f64, b: f64) -> Self {
        Self::ExpSum(ExpSum {
            terms: vec![ExpTerm {
                freq: 0.0,
                profile: CoefficientProfile::Poly(vec![Complex::new(a, 0.0), Complex::new(b, 0.0)]),
            }],
        })
    }

    /// `amp * cos(freq x)` (constant in y).
    pub fn cosine(freq: f64, amp: f64) -> Self {
        let half = CoefficientProfile::constant(amp / 2.0);
        Self::ExpSum(ExpSum {
            terms: vec![
                ExpTerm {
                    freq,
                    profile: half.clone(),
                },
                ExpTerm {
                    freq: -freq,
                    profile: half,
                },
            ],
        })
    }

    pub fn log_abs(f: HoloPoly) -> Self {
        Self::LogAbs(f)
    }

    /// `|f(z)|`, represented as `exp(log|f|)`.
    pub fn abs(f: HoloPoly) -> Self {
        Self::Exp(Box::new(Self::LogAbs(f)))
    }

    pub fn exp(self) -> Self {
        Self::Exp(Box::new(self))
    }

    pub fn plus(self, other: FunctionExpr) -> Self {
        Self::Sum(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: FunctionExpr) -> Self {
        Self::Max(Box::new(self), Box::new(other))
    }

    pub fn scale(self, c: f64) -> Self {
        Self::Scale(c, Box::new(self))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::ExpSum(s) => s.validate(),
            Self::Re(f) | Self::LogAbs(f) => f.validate(),
            Self::Exp(e) => e.validate(),
            Self::Sum(a, b) | Self::Max(a, b) => {
                a.validate()?;
                b.validate()
            }
            Self::Scale(c, e) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return invalid(format!("scale factor must be finite and >= 0, got {c}"));
                }
                e.validate()
            }
            Self::HShift(t, e) => {
                if !t.is_finite() {
                    return invalid("shift must be finite");
                }
                e.validate()
            }
        }
    }

    /// Closed range of `Im z` where the expression can be evaluated.
    pub fn y_range(&self) -> YRange {
        match self {
            Self::ExpSum(s) => s.y_range(),
            Self::Re(_) | Self::LogAbs(_) => YRange::ALL,
            Self::Exp(e) | Self::Scale(_, e) | Self::HShift(_, e) => e.y_range(),
            Self::Sum(a, b) | Self::Max(a, b) => a.y_range().intersect(&b.y_range()),
        }
    }

    /// Value at `z` as an extended real in `[-inf, +inf)`.
    pub fn evaluate(&self, z: Complex) -> Result<f64> {
        let range = self.y_range();
        if !range.contains(z.im) {
            return domain(format!(
                "Im z = {} outside host strip [{}, {}]",
                z.im, range.lo, range.hi
            ));
        }
        self.eval_unchecked(z)
    }

    fn eval_unchecked(&self, z: Complex) -> Result<f64> {
        Ok(match self {
            Self::ExpSum(s) => s.eval_complex(z)?.re,
            Self::Re(f) => f.eval(z).re,
            Self::LogAbs(f) => {
                let m = f.eval(z).norm();
                if m == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    m.ln()
                }
            }
            Self::Exp(e) => match e.as_ref() {
                // exp(log|f|) is returned as |f| so the identity is exact.
                Self::LogAbs(f) => f.eval(z).norm(),
                inner => inner.eval_unchecked(z)?.exp(),
            },
            Self::Sum(a, b) => a.eval_unchecked(z)? + b.eval_unchecked(z)?,
            Self::Max(a, b) => a.eval_unchecked(z)?.max(b.eval_unchecked(z)?),
            Self::Scale(c, e) => {
                if *c == 0.0 {
                    0.0
                } else {
                    c * e.eval_unchecked(z)?
                }
            }
            Self::HShift(t, e) => e.eval_unchecked(z + t)?,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function expressions always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let e: FunctionExpr = serde_json::from_str(text)?;
        e.validate()?;
        Ok(e)
    }
}

/// `z -> u(z + t)`.
pub fn horizontal_shift(expr: &FunctionExpr, t: f64) -> FunctionExpr {
    FunctionExpr::HShift(t, Box::new(expr.clone()))
}
