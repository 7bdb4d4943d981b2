//! Process-wide numeric tolerance.
//!
//! Every predicate in the crate compares against [`eps`], scaled by the
//! magnitude of its inputs. The value can be replaced once at startup (the
//! CLI reads `KM_TOL`), after which it is only read.

use std::sync::atomic::{AtomicU64, Ordering};

/// Default absolute tolerance for lengths and angles.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Width of the band around zero inside which verdicts are flagged as
/// boundary cases.
pub const BOUNDARY_BAND: f64 = 1e-7;

// f64 bits of DEFAULT_EPS
static EPS_BITS: AtomicU64 = AtomicU64::new(0x3E11_2E0B_E826_D695);

/// Current tolerance.
pub fn eps() -> f64 {
    f64::from_bits(EPS_BITS.load(Ordering::Relaxed))
}

/// Replaces the global tolerance. Non-positive or non-finite values are
/// ignored and the previous value is kept.
pub fn set_eps(value: f64) -> bool {
    if value.is_finite() && value > 0.0 {
        EPS_BITS.store(value.to_bits(), Ordering::Relaxed);
        true
    } else {
        false
    }
}

/// Tolerance scaled by the magnitude of the inputs: `eps * (1 + scale)`.
pub fn scaled(scale: f64) -> f64 {
    eps() * (1.0 + scale.abs())
}
