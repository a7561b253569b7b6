use crate::model::{Complex, FunctionExpr, HoloPoly};

/// One generator of the fixed experiment corpus.
#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub name: &'static str,
    pub expr: FunctionExpr,
    /// Frequency whose coefficient profile is followed in the continuity test.
    pub lambda: f64,
    /// y-range for coefficient profiles (away from zeros on the real axis).
    pub profile_range: (f64, f64),
    /// Whether `expr` is subharmonic.
    pub subharmonic: bool,
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// `e^{iz} - 1`.
pub fn exp_minus_one() -> HoloPoly {
    HoloPoly::new([(1.0, c(1.0, 0.0)), (0.0, c(-1.0, 0.0))])
}

/// `1 - e^{iz}/2`.
pub fn one_minus_half() -> HoloPoly {
    HoloPoly::new([(0.0, c(1.0, 0.0)), (1.0, c(-0.5, 0.0))])
}

/// `sin z = (e^{iz} - e^{-iz}) / 2i`.
pub fn sine() -> HoloPoly {
    HoloPoly::new([(1.0, c(0.0, -0.5)), (-1.0, c(0.0, 0.5))])
}

/// `e^{iz}`.
pub fn exp_iz() -> HoloPoly {
    HoloPoly::new([(1.0, c(1.0, 0.0))])
}

pub fn corpus() -> Vec<CorpusItem> {
    let item = |name, expr, lambda, profile_range, subharmonic| CorpusItem {
        name,
        expr,
        lambda,
        profile_range,
        subharmonic,
    };
    vec![
        item("const", FunctionExpr::constant(1.5), 0.0, (0.0, 1.0), true),
        item("minus_y", FunctionExpr::affine_y(0.0, -1.0), 0.0, (0.0, 1.0), true),
        item("cos_x", FunctionExpr::cosine(1.0, 1.0), 1.0, (0.0, 1.0), false),
        item(
            "cos_x_plus_cos_sqrt2x",
            FunctionExpr::cosine(1.0, 1.0).plus(FunctionExpr::cosine(2f64.sqrt(), 1.0)),
            1.0,
            (0.0, 1.0),
            false,
        ),
        item(
            "log_abs_exp_minus_one",
            FunctionExpr::log_abs(exp_minus_one()),
            1.0,
            (0.2, 1.0),
            true,
        ),
        item(
            "log_abs_one_minus_half",
            FunctionExpr::log_abs(one_minus_half()),
            1.0,
            (0.0, 1.0),
            true,
        ),
        item("log_abs_sin", FunctionExpr::log_abs(sine()), 2.0, (0.3, 1.0), true),
        item("exp_minus_y", FunctionExpr::abs(exp_iz()), 0.0, (0.0, 1.0), true),
        item(
            "abs_one_minus_half",
            FunctionExpr::abs(one_minus_half()),
            1.0,
            (0.0, 1.0),
            true,
        ),
    ]
}

pub fn corpus_item(name: &str) -> Option<CorpusItem> {
    corpus().into_iter().find(|i| i.name == name)
}
