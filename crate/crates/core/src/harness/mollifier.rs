use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, invalid, Result};
use crate::model::{clip_floor, Complex, FunctionExpr, DEFAULT_CLIP_FLOOR};

/// `E_1(1)`, the exponential integral at 1.
const E1_ONE: f64 = 0.219_383_934_395_520_26;

/// Radial bump `c exp(-1 / (1 - |z/eps|^2))` on the disk of radius `eps`,
/// normalised to unit integral.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub eps: f64,
    pub norm: f64,
}

impl Mollifier {
    pub fn new(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return invalid(format!("mollifier radius must be positive, got {eps}"));
        }
        // int_0^1 e^{-1/s} ds = e^{-1} - E_1(1)
        let norm = 1.0 / (PI * eps * eps * ((-1.0f64).exp() - E1_ONE));
        Ok(Self { eps, norm })
    }

    pub fn eval(&self, z: Complex) -> f64 {
        let s = z.norm_sqr() / (self.eps * self.eps);
        if s >= 1.0 {
            0.0
        } else {
            self.norm * (-1.0 / (1.0 - s)).exp()
        }
    }

    pub fn sup(&self) -> f64 {
        self.norm * (-1.0f64).exp()
    }
}

/// `int u(z) phi(z - t - i y_c) dx dy` by the midpoint rule on an `n x n`
/// grid over the support square, with weights renormalised to sum to 1.
pub fn convolution_pairing(u: &FunctionExpr, phi: &Mollifier, t: f64, y_c: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return invalid("pairing needs at least one node per side");
    }
    let e = phi.eps;
    if !u.y_range().contains_interval(y_c - e, y_c + e) {
        return domain(format!("mollifier support around height {y_c} leaves the strip"));
    }
    let h = 2.0 * e / n as f64;
    let mut acc = 0.0;
    let mut wsum = 0.0;
    for j in 0..n {
        let dy = -e + (j as f64 + 0.5) * h;
        for i in 0..n {
            let dx = -e + (i as f64 + 0.5) * h;
            let w = phi.eval(Complex::new(dx, dy));
            if w == 0.0 {
                continue;
            }
            let v = clip_floor(u.evaluate(Complex::new(t + dx, y_c + dy))?, DEFAULT_CLIP_FLOOR).0;
            acc += w * v;
            wsum += w;
        }
    }
    Ok(acc / wsum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_integral() {
        // radial integral 2 pi int_0^eps phi(r) r dr by a fine midpoint rule
        for eps in [0.1, 0.3, 1.0] {
            let m = Mollifier::new(eps).unwrap();
            let n = 400_000;
            let h = eps / n as f64;
            let total: f64 = (0..n)
                .map(|k| {
                    let r = (k as f64 + 0.5) * h;
                    m.eval(Complex::new(r, 0.0)) * r
                })
                .sum::<f64>()
                * 2.0
                * PI
                * h;
            assert!((total - 1.0).abs() < 1e-9, "{total}");
        }
        assert_eq!(Mollifier::new(0.3).unwrap().eval(Complex::new(0.3, 0.0)), 0.0);
    }

    #[test]
    fn pairing_examples() {
        let m = Mollifier::new(0.3).unwrap();
        let one = FunctionExpr::constant(1.0);
        assert!((convolution_pairing(&one, &m, 2.0, 0.5, 24).unwrap() - 1.0).abs() < 1e-12);
        let lin = FunctionExpr::affine_y(0.0, -1.0);
        assert!((convolution_pairing(&lin, &m, 2.0, 0.45, 24).unwrap() + 0.45).abs() < 1e-12);

        // cos x pairs to c(eps) cos t with one constant for every t
        let cosx = FunctionExpr::cosine(1.0, 1.0);
        let c0 = convolution_pairing(&cosx, &m, 0.0, 0.5, 48).unwrap();
        assert!(c0 > 0.9 && c0 < 1.0);
        for t in [0.7, 2.0, 4.1] {
            let p = convolution_pairing(&cosx, &m, t, 0.5, 48).unwrap();
            assert!((p - c0 * t.cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn support_must_stay_in_strip() {
        let m = Mollifier::new(0.3).unwrap();
        let mut u = FunctionExpr::constant(1.0);
        if let FunctionExpr::ExpSum(s) = &mut u {
            s.terms[0].profile = crate::model::CoefficientProfile::Linear {
                ys: vec![0.0, 1.0],
                values: vec![Complex::new(1.0, 0.0); 2],
            };
        }
        assert!(convolution_pairing(&u, &m, 0.0, 0.2, 8).is_err());
        assert!(convolution_pairing(&u, &m, 0.0, 0.5, 8).is_ok());
    }
}
