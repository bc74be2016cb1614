//! The example sets K₁, K(I), K₂ in C², their polynomial hulls, distance
//! queries and polynomial certificates for points outside the hull.

mod certificate;

pub use certificate::{find_certificate, verify_certificate, CertificateReport, PolyCertificate};

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disc::{ArcSegment, ArcUnion};

/// Tolerance for boundary membership in the hull.
pub const HULL_TOL: f64 = 1e-12;

/// Default parameter samples per one-dimensional piece of a set.
pub const DEFAULT_PIECE_SAMPLES: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HullError {
    #[error("the full polynomial hull of K1 is not known; only D̄×{{0}} ⊂ hull(K1) is established")]
    UnknownHull,
    #[error("point {0:?} lies in the hull, so no certificate exists")]
    PointInHull(Point2),
    #[error("certificate search precondition violated: {0}")]
    Precondition(String),
    #[error("no certificate up to degree {max_degree}; best margin {best_margin:.6}")]
    CertificateNotFound { max_degree: usize, best_margin: f64 },
    #[error("verification failed: |Q| = {value:.12} at {at:?}")]
    VerificationFailed { value: f64, at: Point2 },
}

/// A point (z, w) of C².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub z: Complex64,
    pub w: Complex64,
}

impl Point2 {
    pub fn new(z: Complex64, w: Complex64) -> Self {
        Self { z, w }
    }

    pub fn origin() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        ((self.z - other.z).norm_sqr() + (self.w - other.w).norm_sqr()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.z.is_finite() && self.w.is_finite()
    }
}

/// The compact sets of the construction.
///
/// * `K1` = {(e^{2πiθ}, w) : |w| = θ, θ ∈ [0,1]}
/// * `K(I)` = ((𝕋∖I)×{0}) ∪ (Ī×𝕋)
/// * `K2` = K(I₊) ∪ ({-1}×𝔻̄)
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ExampleSet {
    K1,
    K { arcs: ArcUnion },
    K2,
}

impl ExampleSet {
    pub fn k(arcs: ArcUnion) -> Self {
        Self::K { arcs }
    }

    /// The arc union I, when the set has one.
    pub fn arcs(&self) -> Option<ArcUnion> {
        match self {
            Self::K1 => None,
            Self::K { arcs } => Some(arcs.clone()),
            Self::K2 => Some(ArcUnion::upper_half()),
        }
    }
}

/// Distance from z to the closed disc.
fn dist_to_closed_disc(z: Complex64) -> f64 {
    (z.norm() - 1.0).max(0.0)
}

fn dist_to_complement(arcs: &ArcUnion, z: Complex64) -> f64 {
    arcs.complement()
        .iter()
        .map(|c| c.distance_from(z))
        .fold(f64::INFINITY, f64::min)
}

/// Squared distance from (z, |w|) to the K₁ point with parameter t.
fn k1_dist2(z: Complex64, wabs: f64, t: f64) -> f64 {
    let (s, c) = (TAU * t).sin_cos();
    (z.re - c).powi(2) + (z.im - s).powi(2) + (wabs - t).powi(2)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..80 {
        if b - a < 1e-14 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Distance to K₁ by a parameter sweep over θ followed by golden-section
/// refinement around every sampled local minimum.
fn k1_distance(p: &Point2) -> f64 {
    const SWEEP: usize = 512;
    let wabs = p.w.norm();
    let vals: Vec<f64> = (0..=SWEEP).map(|k| k1_dist2(p.z, wabs, k as f64 / SWEEP as f64)).collect();
    let mut best = vals.iter().copied().fold(f64::INFINITY, f64::min);
    for k in 0..=SWEEP {
        let left = if k > 0 { vals[k - 1] } else { f64::INFINITY };
        let right = if k < SWEEP { vals[k + 1] } else { f64::INFINITY };
        if vals[k] <= left && vals[k] <= right {
            let a = (k.saturating_sub(1)) as f64 / SWEEP as f64;
            let b = (k + 1).min(SWEEP) as f64 / SWEEP as f64;
            let (_, v) = golden_min(|t| k1_dist2(p.z, wabs, t), a, b);
            best = best.min(v);
        }
    }
    best.max(0.0).sqrt()
}

/// Euclidean distance in C² from `p` to the set.
pub fn set_distance(set: &ExampleSet, p: &Point2) -> f64 {
    match set {
        ExampleSet::K1 => k1_distance(p),
        ExampleSet::K { arcs } => k_distance(arcs, p),
        ExampleSet::K2 => {
            let base = k_distance(&ArcUnion::upper_half(), p);
            let disc = ((p.z + 1.0).norm_sqr() + dist_to_closed_disc(p.w).powi(2)).sqrt();
            base.min(disc)
        }
    }
}

fn k_distance(arcs: &ArcUnion, p: &Point2) -> f64 {
    // (𝕋∖I)×{0}
    let flat = (dist_to_complement(arcs, p.z).powi(2) + p.w.norm_sqr()).sqrt();
    // Ī×𝕋
    let torus = (arcs.distance_to_closure(p.z).powi(2) + (p.w.norm() - 1.0).powi(2)).sqrt();
    flat.min(torus)
}

/// Distance from `p` to the hull (𝔻̄×{0}) ∪ (Ī×𝔻̄) of K(I) or K₂.
pub fn hull_distance(set: &ExampleSet, p: &Point2) -> Result<f64, HullError> {
    let arcs = set.arcs().ok_or(HullError::UnknownHull)?;
    let flat = (dist_to_closed_disc(p.z).powi(2) + p.w.norm_sqr()).sqrt();
    let vertical = (arcs.distance_to_closure(p.z).powi(2) + dist_to_closed_disc(p.w).powi(2)).sqrt();
    let mut d = flat.min(vertical);
    if matches!(set, ExampleSet::K2) {
        d = d.min(((p.z + 1.0).norm_sqr() + dist_to_closed_disc(p.w).powi(2)).sqrt());
    }
    Ok(d)
}

/// Membership in the polynomial hull of K(I) or K₂.
pub fn hull_contains(set: &ExampleSet, p: &Point2) -> Result<bool, HullError> {
    Ok(hull_distance(set, p)? <= HULL_TOL)
}

/// The part of the hull of K₁ that is established: 𝔻̄×{0} ⊂ hull(K₁), and
/// hull(K₁) ⊂ 𝔻̄² since K₁ lies in the bidisc. Everything else is unknown.
pub fn k1_hull_known(p: &Point2) -> Result<bool, HullError> {
    if p.w.norm() <= HULL_TOL && p.z.norm() <= 1.0 + HULL_TOL {
        Ok(true)
    } else if p.z.norm() > 1.0 + HULL_TOL || p.w.norm() > 1.0 + HULL_TOL {
        Ok(false)
    } else {
        Err(HullError::UnknownHull)
    }
}

/// Uniform samples of a closed arc, endpoints included.
pub(crate) fn sample_arc(seg: &ArcSegment, n: usize) -> Vec<Complex64> {
    if n <= 1 || seg.len == 0.0 {
        return vec![Complex64::from_polar(1.0, seg.start)];
    }
    (0..n)
        .map(|k| Complex64::from_polar(1.0, seg.start + seg.len * k as f64 / (n - 1) as f64))
        .collect()
}

/// Points of the set from its parameterization, about `n` in total.
pub fn sample_set(set: &ExampleSet, n: usize) -> Vec<Point2> {
    let n = n.max(16);
    match set {
        ExampleSet::K1 => {
            let phases = 16;
            let steps = (n / phases).max(2);
            let mut out = Vec::with_capacity(steps * phases);
            for k in 0..steps {
                let t = k as f64 / (steps - 1) as f64;
                for j in 0..phases {
                    let phase = TAU * (j as f64 + 0.5 * (k % 2) as f64) / phases as f64;
                    out.push(Point2::new(Complex64::from_polar(1.0, TAU * t), Complex64::from_polar(t, phase)));
                }
            }
            out
        }
        ExampleSet::K { arcs } => sample_k(arcs, n),
        ExampleSet::K2 => {
            let mut out = sample_k(&ArcUnion::upper_half(), n * 3 / 4);
            let m = (n / 4).max(16);
            let rings = (m as f64).sqrt().ceil() as usize;
            for a in 0..rings {
                let rho = a as f64 / (rings - 1).max(1) as f64;
                for b in 0..rings {
                    out.push(Point2::new(
                        Complex64::new(-1.0, 0.0),
                        Complex64::from_polar(rho, TAU * b as f64 / rings as f64),
                    ));
                }
            }
            out
        }
    }
}

fn sample_k(arcs: &ArcUnion, n: usize) -> Vec<Point2> {
    let zero = Complex64::new(0.0, 0.0);
    let flat_n = n / 2;
    let complement = arcs.complement();
    let total_c: f64 = complement.iter().map(|c| c.len).sum::<f64>().max(1e-300);
    let mut out = Vec::with_capacity(n + 8);
    for seg in &complement {
        let k = ((flat_n as f64 * seg.len / total_c).round() as usize).max(2);
        out.extend(sample_arc(seg, k).into_iter().map(|z| Point2::new(z, zero)));
    }
    let phases = 8;
    let torus_n = (n - flat_n) / phases;
    let total_i: f64 = arcs.arcs().iter().map(|a| a.len).sum();
    for seg in arcs.arcs() {
        let k = ((torus_n as f64 * seg.len / total_i).round() as usize).max(2);
        for (i, z) in sample_arc(seg, k).into_iter().enumerate() {
            for j in 0..phases {
                let phase = TAU * (j as f64 + 0.5 * (i % 2) as f64) / phases as f64;
                out.push(Point2::new(z, Complex64::from_polar(1.0, phase)));
            }
        }
    }
    out
}

/// Everything above uses radians; this is the point e^{iθ} ∈ 𝕋.
pub fn circle_point(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}
