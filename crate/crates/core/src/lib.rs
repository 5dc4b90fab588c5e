//! Numerical laboratory for a quasiregular map with wandering domains.
//!
//! The map `g` is built from a doubly exponential sequence of radii
//! `R_n = exp(γ·(1 + Σ_{k<n} k!))`. Points are held in leveled log
//! coordinates ([`LPoint`]) so that orbits can be followed to any tabulated
//! depth without overflow.
//!
//! - [`construction`]: radii, coefficients, admissibility checks, threshold searches
//! - [`logplane`]: leveled log-coordinate arithmetic
//! - [`qgmap`]: piecewise evaluation of `g`, band interpolation, dilatation
//! - [`dynamics`]: orbits, escape classification, disk chain, `h_n` limits
//! - [`geometry`]: curves, winding numbers, hyperbolic lengths
//! - [`render`]: log-polar raster images

pub mod construction;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod logplane;
pub mod qgmap;
pub mod render;
pub mod report;
pub mod wide;

pub use construction::{
    dilatation_bound, dilatation_product, gamma_threshold, Construction, ConstructionParams, InterpCase,
    ParamOverrides,
};
pub use dynamics::{classify_escape, iterate, xi, EscapeClass, OrbitRecord, Probe, StopReason};
pub use error::{Error, Result};
pub use geometry::{Curve, RoundAnnulus};
pub use logplane::{LPoint, LValue};
pub use qgmap::{classify, eval_g, DilatationStats, RegionTag};
pub use render::{Coloring, Image, RasterSpec};
pub use report::{Check, VerificationReport};
pub use wide::Wide;
