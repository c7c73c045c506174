//! The finite-N check of the theorem: ratio scans, both sides of the prefix
//! identity with a region-by-region error budget, and the tail estimates.

pub mod sandwich;
pub mod scan;
pub mod tails;
pub mod verify;

pub use sandwich::{sandwich_bound, sandwich_bound_iter, SandwichCertificate, SandwichReport};
pub use scan::{ratio_scan, ratio_scan_with_bounds, scan_rows, RatioScan, ScanRow, ScanSummary};
pub use tails::{
    lower_tail_target, tail_bounds_check, tail_bounds_check_with_bounds, upper_tail_target, TailBound, TailCheck,
};
pub use verify::{verify_theorem, verify_theorem_with_bounds, RegionSums, Source, VerificationReport};
