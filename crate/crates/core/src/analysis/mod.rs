//! Test functions, the two-sided trace formula check and graph comparators.

pub mod compare;
pub mod test_function;
pub mod trace;

pub use compare::{compare, eig_density_diff, len_density_diff, CompareReport, Verdict};
pub use test_function::{bump_test, gaussian_test, BumpMode, Decay, TestFunction};
pub use trace::{
    auto_cutoffs, calibrate_volume_coefficient, trace_check, trace_check_auto, trace_difference,
    DifferenceReport, TraceReport, VOLUME_COEFFICIENT,
};
