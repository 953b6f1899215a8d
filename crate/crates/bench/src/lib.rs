//! Shared inputs for the benchmarks.

use fluxvol::{Helical, HelicalParams};

/// The standard perturbed field.
pub fn standard_field() -> Helical {
    Helical::new(HelicalParams::standard()).expect("standard parameters are valid")
}

/// Section start points `(ỹ, 0)` in the inner, island and outer regions.
pub const REGION_STARTS: [(&str, f64); 3] = [("inner", 0.2), ("island", 0.4), ("outer", 0.7)];
