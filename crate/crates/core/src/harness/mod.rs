//! Reproducible numerical experiments over a fixed corpus of subharmonic
//! almost periodic functions, each producing a [`Report`].

mod corpus;
mod lemmas;
mod mollifier;
mod report;
mod theorems;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

pub use corpus::{corpus, corpus_item, exp_iz, exp_minus_one, one_minus_half, sine, CorpusItem};
pub use lemmas::{
    lemma12_experiment, lemma12_mass_scaling, lemma12_suite, lemma4_experiment, lemma4_suite, line_sup_error,
    log_floor_gap, LineGrid, LEMMA4_FLOORS, LEMMA_SCHEDULE,
};
pub use mollifier::{convolution_pairing, Mollifier};
pub use report::{aggregate_csv, Measurement, Relation, Report, Verdict};
pub use theorems::{
    theorem1_experiment, theorem1_suite, theorem2_control, theorem2_experiment, theorem2_suite, theorem3_experiment,
    theorem3_suite, theorem4_experiment, theorem4_suite, T4_CENTERS, T4_ORDERS, T4_RADII,
};

use crate::error::{invalid, Error, Result};
use crate::fourier::MeanConfig;
use crate::metrics::MetricConfig;

/// Numerical settings shared by the experiments.
#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub metric: MetricConfig,
    pub mean: MeanConfig,
    pub seed: u64,
}

impl HarnessConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            metric: MetricConfig {
                x_window: (0.0, 20.0),
                hx: 1e-2,
                hy: 0.05,
                h_tau: 0.02,
                ..MetricConfig::default()
            },
            mean: MeanConfig {
                hx: 1e-2,
                tol: 1e-9,
                t_max: 512.0 * std::f64::consts::PI,
                ..MeanConfig::default()
            },
            seed,
        }
    }
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Theorem1,
    Theorem2,
    Theorem3,
    Theorem4,
    Lemma12,
    Lemma4,
    All,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thm1" => Self::Theorem1,
            "thm2" => Self::Theorem2,
            "thm3" => Self::Theorem3,
            "thm4" => Self::Theorem4,
            "lem12" => Self::Lemma12,
            "lem4" => Self::Lemma4,
            "all" => Self::All,
            other => return invalid(format!("unknown verify target '{other}'")),
        })
    }
}

/// Runs the experiments of `target` in a fixed order.
pub fn verify(target: Target, cfg: &HarnessConfig) -> Result<Vec<Report>> {
    let all = target == Target::All;
    let mut out = Vec::new();
    if all || target == Target::Theorem1 {
        out.extend(theorem1_suite(cfg)?);
    }
    if all || target == Target::Theorem2 {
        out.extend(theorem2_suite(cfg)?);
    }
    if all || target == Target::Theorem3 {
        out.extend(theorem3_suite(cfg)?);
    }
    if all || target == Target::Theorem4 {
        out.extend(theorem4_suite(cfg)?);
    }
    if all || target == Target::Lemma12 {
        out.extend(lemma12_suite()?);
    }
    if all || target == Target::Lemma4 {
        out.extend(lemma4_suite()?);
    }
    Ok(out)
}

/// Writes `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// One `{id}__{corpus}.json` per report plus `summary.csv`.
pub fn write_reports(dir: &Path, reports: &[Report]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for r in reports {
        write_atomic(
            &dir.join(format!("{}__{}.json", r.id, r.corpus)),
            r.to_json().as_bytes(),
        )?;
    }
    write_atomic(&dir.join("summary.csv"), aggregate_csv(reports).as_bytes())
}
