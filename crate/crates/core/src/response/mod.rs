//! Frequency response of the Ramsey and echo sequences: analytic transfer
//! functions, extraction from time-domain runs, and curve features.

mod analytic;
mod features;
mod numeric;

pub use analytic::{
    default_grid, f0, f_cp, f_cp_as_printed, response_cp, response_up, uniform_grid, ResponseCurve, SequenceKind,
};
pub use features::{find_peaks, find_zeros, main_lobe_fwhm, Peak};
pub use numeric::{numeric_response, numeric_response_curve, probe_direction};
