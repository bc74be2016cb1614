//! One-variable complex analysis on the unit disc: Möbius maps, Green's
//! function, harmonic measure, Poisson integrals, conjugate functions and
//! the outer function g.

mod arcs;
mod fourier;
mod outer;

pub use arcs::{angular_distance, normalize_angle, ArcSegment, ArcUnion, CirclePoint};
pub use fourier::{circle_moments, harmonic_conjugate, FourierSeries};
pub use outer::{build_outer_function, g_closed_form_iplus, OuterFunction, OuterMethod};

use num_complex::Complex64;
use thiserror::Error;

/// Exclusion radius (radians) around the endpoint set E for boundary checks.
pub const TAU_E: f64 = 0.02;

/// Default truncation order of the indicator series.
pub const DEFAULT_ORDER: usize = 4096;

/// Default number of trapezoid nodes on the circle.
pub const DEFAULT_CIRCLE_NODES: usize = 8192;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscError {
    #[error("|1 - conj(z0)·ζ| is below 1e-14")]
    DegenerateDenominator,
    #[error("Green's function evaluated at its pole")]
    PoleAtSource,
    #[error("point is {distance:.3e} from the circle, under-resolved by grid spacing {spacing:.3e}")]
    ResolutionWarning { distance: f64, spacing: f64 },
    #[error("evaluation point within {distance:.3e} of E, inside the truncation exclusion zone")]
    TruncationError { distance: f64 },
    #[error("closed form evaluated at its branch pole {at}")]
    BranchPole { at: Complex64 },
    #[error("grid of {grid} samples cannot resolve moments up to order {order}")]
    AliasingError { grid: usize, order: usize },
    #[error("invalid arc union: {0}")]
    InvalidArcs(String),
    #[error("{0}")]
    InvalidArgument(String),
}

fn check_interior(z0: Complex64) -> Result<(), DiscError> {
    if z0.norm() < 1.0 {
        Ok(())
    } else {
        Err(DiscError::InvalidArgument(format!("{z0} is not in the open unit disc")))
    }
}

/// φ_{z0}(ζ) = (z0 - ζ)/(1 - conj(z0)ζ).
pub fn mobius(z0: Complex64, zeta: Complex64) -> Result<Complex64, DiscError> {
    check_interior(z0)?;
    let den = 1.0 - z0.conj() * zeta;
    if den.norm() <= 1e-14 {
        return Err(DiscError::DegenerateDenominator);
    }
    Ok((z0 - zeta) / den)
}

/// g_𝔻(z0, ζ) = -log|φ_{z0}(ζ)|.
pub fn green_function(z0: Complex64, zeta: Complex64) -> Result<f64, DiscError> {
    check_interior(z0)?;
    check_interior(zeta)?;
    if (zeta - z0).norm() <= 1e-14 {
        return Err(DiscError::PoleAtSource);
    }
    Ok(-((zeta - z0).norm().ln() - (1.0 - z0.conj() * zeta).norm().ln()))
}

/// Density of ω_𝔻(z0, ·) with respect to σ at ζ: (1-|z0|²)/|ζ-z0|².
pub fn harmonic_measure_density(z0: Complex64, zeta: CirclePoint) -> f64 {
    poisson_kernel(z0, zeta.theta())
}

/// (1-|z|²)/|e^{it} - z|², with the denominator expanded so that z = 0
/// gives exactly 1.
pub fn poisson_kernel(z: Complex64, t: f64) -> f64 {
    let (s, c) = t.sin_cos();
    let r2 = z.norm_sqr();
    (1.0 - r2) / (1.0 - 2.0 * (z.re * c + z.im * s) + r2)
}

/// Poisson integral P[f](z) of boundary samples f(2πj/m), by the trapezoid
/// rule. Points within two grid spacings of the circle are refused since the
/// kernel is no longer resolved there.
pub fn poisson_integral(samples: &[f64], point: Complex64) -> Result<f64, DiscError> {
    let m = samples.len();
    if m == 0 {
        return Err(DiscError::InvalidArgument("no boundary samples".into()));
    }
    check_interior(point)?;
    let spacing = 2.0 * std::f64::consts::PI / m as f64;
    let distance = 1.0 - point.norm();
    if distance < 2.0 * spacing {
        return Err(DiscError::ResolutionWarning { distance, spacing });
    }
    let sum: f64 = samples
        .iter()
        .enumerate()
        .map(|(j, f)| f * poisson_kernel(point, spacing * j as f64))
        .sum();
    Ok(sum / m as f64)
}
