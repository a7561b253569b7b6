use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::{Complex, FunctionExpr, Rect};
use crate::error::{domain, invalid, Result};

/// Extended-real samples of a function on a uniform rectangular grid.
///
/// Node `(i, j)` sits at `x0 + i hx + i (y0 + j hy)`; values are stored row by
/// row (`j` major). `-inf` is allowed, `+inf` and NaN are not.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub x0: f64,
    pub y0: f64,
    pub hx: f64,
    pub hy: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(with = "neg_inf_as_null")]
    pub values: Vec<f64>,
}

impl GridField {
    pub fn new(x0: f64, y0: f64, hx: f64, hy: f64, nx: usize, ny: usize, values: Vec<f64>) -> Result<Self> {
        let g = Self {
            x0,
            y0,
            hx,
            hy,
            nx,
            ny,
            values,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hx > 0.0 && self.hy > 0.0) {
            return invalid("grid spacings must be positive");
        }
        if self.nx == 0 || self.ny == 0 || self.values.len() != self.nx * self.ny {
            return invalid(format!(
                "grid {}x{} does not match {} values",
                self.nx,
                self.ny,
                self.values.len()
            ));
        }
        if self.values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return invalid("grid values must lie in [-inf, +inf)");
        }
        Ok(())
    }

    /// Builds a grid by evaluating `f` at every node.
    pub fn from_fn(
        x0: f64,
        y0: f64,
        hx: f64,
        hy: f64,
        nx: usize,
        ny: usize,
        f: impl Fn(f64, f64) -> f64 + Sync,
    ) -> Self {
        let values = (0..ny)
            .into_par_iter()
            .flat_map_iter(|j| {
                let y = y0 + j as f64 * hy;
                (0..nx).map(move |i| (i, y)).collect::<Vec<_>>()
            })
            .map(|(i, y)| f(x0 + i as f64 * hx, y))
            .collect();
        Self {
            x0,
            y0,
            hx,
            hy,
            nx,
            ny,
            values,
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.hx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        self.y0 + j as f64 * self.hy
    }

    pub fn x1(&self) -> f64 {
        self.x(self.nx - 1)
    }

    pub fn y1(&self) -> f64 {
        self.y(self.ny - 1)
    }

    /// Bilinear interpolation inside the grid rectangle.
    pub fn interpolate(&self, z: Complex) -> Result<f64> {
        let fx = (z.re - self.x0) / self.hx;
        let fy = (z.im - self.y0) / self.hy;
        let eps = 1e-9;
        if fx < -eps || fy < -eps || fx > (self.nx - 1) as f64 + eps || fy > (self.ny - 1) as f64 + eps {
            return domain(format!("point {z} outside grid rectangle"));
        }
        let i = (fx.floor().max(0.0) as usize).min(self.nx.saturating_sub(2));
        let j = (fy.floor().max(0.0) as usize).min(self.ny.saturating_sub(2));
        if self.nx == 1 || self.ny == 1 {
            return Ok(self.get(i, j));
        }
        let tx = (fx - i as f64).clamp(0.0, 1.0);
        let ty = (fy - j as f64).clamp(0.0, 1.0);
        let corner = |a: f64, w: f64| if w == 0.0 { 0.0 } else { a * w };
        Ok(corner(self.get(i, j), (1.0 - tx) * (1.0 - ty))
            + corner(self.get(i + 1, j), tx * (1.0 - ty))
            + corner(self.get(i, j + 1), (1.0 - tx) * ty)
            + corner(self.get(i + 1, j + 1), tx * ty))
    }

    /// CSV with header `x,y,value`; `-inf` is written as `-inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,value\n");
        for j in 0..self.ny {
            for i in 0..self.nx {
                let _ = writeln!(out, "{},{},{}", self.x(i), self.y(j), self.get(i, j));
            }
        }
        out
    }
}

/// Samples `expr` at `x0 + i hx + i (y0 + j hy)` for every node of the grid
/// covering `rect`.
pub fn sample_grid(expr: &FunctionExpr, rect: &Rect, hx: f64, hy: f64) -> Result<GridField> {
    let rect = Rect::new(rect.x0, rect.x1, rect.y0, rect.y1)?;
    if !(hx > 0.0 && hy > 0.0) {
        return invalid("grid spacings must be positive");
    }
    let range = expr.y_range();
    if !range.contains_interval(rect.y0, rect.y1) {
        return domain(format!(
            "rectangle y-range [{}, {}] outside host strip [{}, {}]",
            rect.y0, rect.y1, range.lo, range.hi
        ));
    }
    let nx = ((rect.x1 - rect.x0) / hx + 1e-9).floor() as usize + 1;
    let ny = ((rect.y1 - rect.y0) / hy + 1e-9).floor() as usize + 1;
    let rows: Vec<Vec<f64>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            let y = rect.y0 + j as f64 * hy;
            (0..nx)
                .map(|i| expr.evaluate(Complex::new(rect.x0 + i as f64 * hx, y)))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GridField::new(rect.x0, rect.y0, hx, hy, nx, ny, rows.concat())
}

mod neg_inf_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Option<f64>> = values
            .iter()
            .map(|&x| if x == f64::NEG_INFINITY { None } else { Some(x) })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v: Vec<Option<f64>> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|x| x.unwrap_or(f64::NEG_INFINITY)).collect())
    }
}
