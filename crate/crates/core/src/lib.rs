//! Numerical laboratory for a compact set in C² whose polynomial hull has
//! points that analytic varieties with boundary near the set cannot reach.
//!
//! The crate builds the sets, their hulls and polynomial certificates, the
//! explicit Poletsky disc families, pairings of pushforward Green currents
//! with their weak limit, Fourier-moment checks for pushforwards under
//! ζ ↦ ζ^ν, and the winding-number obstruction.

pub mod disc;
pub mod hull;
pub mod poletsky;
pub mod currents;
pub mod averaging;
pub mod winding;
pub mod quadrature;
pub mod harness;
