//! Green potentials in disks, Riesz measures of sampled fields, the strip
//! kernel `K(w) = (1/2) log|e^{-gamma w^2} - 1|` and sub-mean-value checks.

mod kernel;
mod measure;
mod submean;

pub use kernel::{
    gamma_bound, kernel_split, mollified_indicator, split_radius, strip_kernel, strip_potential, StripKernelSpec,
    StripPotential,
};
pub use measure::{
    green_field, green_potential, log_cell_average, riesz_decomposition, riesz_measure, Atom, DiskSpec, GreenValue,
    MeasureSpec, RieszDecomposition, RieszMeasure, SignedMeasure, GREEN_CLIP,
};
pub use submean::{
    continuity_modulus_delta, log_floor, log_subharmonic_check, submean_check, DeltaChoice, Evaluable, FnField,
    LogSubharmonicReport, SubmeanItem, SubmeanReport,
};
