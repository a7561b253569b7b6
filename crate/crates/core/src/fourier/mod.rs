//! Mean values, Fourier–Bohr coefficients, spectra and Bochner–Fejér
//! approximants of almost periodic functions on horizontal lines.

mod bochner;
mod mean;
mod spectrum;

pub use bochner::{
    bochner_fejer_multipliers, bochner_fejer_sum, bochner_fejer_sum_from_table, reduce_rational_basis,
    BochnerFejerSpec, FejerWidth, MultiplierEntry, RationalBasis, RationalFrequency,
};
pub use mean::{
    coefficient_profile, coefficient_table, fourier_coefficient, line_coefficients, line_means, mean_value, Averaging,
    CoefficientTable, MeanConfig, MeanValueResult, ProfileColumn,
};
pub use spectrum::{bessel_check, lattice_candidates, periodogram_candidates, spectrum_scan, BesselReport};
