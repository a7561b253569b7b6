use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Open horizontal strip `y_low < Im z < y_high`. Either edge may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StripSpec {
    pub y_low: f64,
    pub y_high: f64,
}

impl StripSpec {
    pub const WHOLE_PLANE: StripSpec = StripSpec {
        y_low: f64::NEG_INFINITY,
        y_high: f64::INFINITY,
    };

    pub fn new(y_low: f64, y_high: f64) -> Result<Self> {
        if y_low.is_nan() || y_high.is_nan() || y_low >= y_high {
            return invalid(format!("strip needs y_low < y_high, got [{y_low}, {y_high}]"));
        }
        Ok(Self { y_low, y_high })
    }

    pub fn width(&self) -> f64 {
        self.y_high - self.y_low
    }

    pub fn contains(&self, y: f64) -> bool {
        self.y_low < y && y < self.y_high
    }

    /// Validates a closed substrip `[alpha, beta]` with
    /// `y_low < alpha <= beta < y_high`.
    pub fn check_substrip(&self, alpha: f64, beta: f64) -> Result<()> {
        if !(alpha <= beta) {
            return invalid(format!("substrip needs alpha <= beta, got [{alpha}, {beta}]"));
        }
        if !(self.contains(alpha) && self.contains(beta)) {
            return domain(format!(
                "substrip [{alpha}, {beta}] not inside strip ({}, {})",
                self.y_low, self.y_high
            ));
        }
        Ok(())
    }
}

/// Closed interval of admissible `Im z` values for an expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YRange {
    pub lo: f64,
    pub hi: f64,
}

impl YRange {
    pub const ALL: YRange = YRange {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    pub fn contains_interval(&self, a: f64, b: f64) -> bool {
        self.contains(a) && self.contains(b)
    }

    pub fn intersect(&self, other: &YRange) -> YRange {
        YRange {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return domain(format!("empty or non-finite rectangle [{x0}, {x1}] x [{y0}, {y1}]"));
        }
        Ok(Self { x0, x1, y0, y1 })
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}
