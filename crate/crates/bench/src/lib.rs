//! Shared fixtures for the criterion benches.

use wanderlab::{Construction, ConstructionParams};

/// `γ` used by every bench: above the admissibility threshold for 20 levels.
pub const GAMMA: f64 = 60.0;

/// The construction the benches run against.
pub fn context(max_level: usize) -> Construction {
    let params = ConstructionParams::new(GAMMA, ConstructionParams::DEFAULT_DELTA, max_level, 256, 64)
        .expect("bench parameters are valid");
    Construction::new(params).expect("bench construction builds")
}
