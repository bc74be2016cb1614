//! Polynomial certificates Q(z, w) = P(z)·w separating a point p = (z₀, w₀)
//! from the hull of K(I): |P| ≤ 1 on Ī and |P(z₀)|·|w₀| > 1.
//!
//! The search solves the complex Chebyshev problem
//! min sup_{Ī} |P| subject to P(z₀) = 1 over polynomials of degree d with
//! Lawson's iteratively reweighted least squares. The problem is convex, so
//! one run per degree suffices. The minimizer is then rescaled by a rigorous
//! upper bound of its sup norm on Ī.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{sample_set, ExampleSet, HullError, Point2};
use crate::disc::{ArcSegment, ArcUnion};

/// Sup-norm slack allowed on K during verification.
pub const SUP_SLACK: f64 = 1e-9;

/// Minimal amount by which the certified margin must exceed 1.
pub const MARGIN_SLACK: f64 = 1e-6;

const LAWSON_ITERATIONS: usize = 300;
const FINE_FACTOR: usize = 10;

/// P(z) = Σ_k c_k ((z - center)/scale)^k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCertificate {
    pub degree: usize,
    pub center: Complex64,
    pub scale: f64,
    pub coefficients: Vec<Complex64>,
    pub target: Point2,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub samples: usize,
    /// max |Q| over the samples of K.
    pub worst_value: f64,
    pub worst_at: Point2,
    /// |Q(p)|.
    pub target_value: f64,
}

impl PolyCertificate {
    /// Certificate from monomial coefficients in z.
    pub fn from_monomials(coefficients: Vec<Complex64>, target: Point2) -> Self {
        let mut cert = Self {
            degree: coefficients.len().saturating_sub(1),
            center: Complex64::new(0.0, 0.0),
            scale: 1.0,
            coefficients,
            target,
            margin: 0.0,
        };
        cert.margin = cert.q(&target).norm();
        cert
    }

    pub fn p(&self, z: Complex64) -> Complex64 {
        let t = (z - self.center) / self.scale;
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * t + c)
    }

    pub fn q(&self, point: &Point2) -> Complex64 {
        self.p(point.z) * point.w
    }
}

/// Search nodes on Ī, clustered toward the arc endpoints.
fn chebyshev_arc_nodes(arcs: &ArcUnion, total: usize) -> Vec<Complex64> {
    let measure: f64 = arcs.arcs().iter().map(|a| a.len).sum();
    let mut out = Vec::with_capacity(total + 2 * arcs.arcs().len());
    for seg in arcs.arcs() {
        let n = ((total as f64 * seg.len / measure).ceil() as usize).max(16);
        for k in 0..n {
            let s = 0.5 * (1.0 - (std::f64::consts::PI * k as f64 / (n - 1) as f64).cos());
            out.push(Complex64::from_polar(1.0, seg.start + seg.len * s));
        }
    }
    out
}

/// Uniform nodes on each arc with spacing at most `h` in angle.
fn uniform_arc_nodes(arcs: &ArcUnion, per_arc_min: usize, h: f64) -> Vec<Complex64> {
    arcs.arcs()
        .iter()
        .flat_map(|seg: &ArcSegment| {
            let n = ((seg.len / h).ceil() as usize + 1).max(per_arc_min);
            super::sample_arc(seg, n)
        })
        .collect()
}

/// Upper bound for sup_{Ī} |P|: the maximum on a fine grid plus the
/// derivative bound times half the grid spacing.
fn rigorous_sup(arcs: &ArcUnion, cert: &PolyCertificate, nodes: usize) -> f64 {
    let measure: f64 = arcs.arcs().iter().map(|a| a.len).sum();
    let h = measure / nodes as f64;
    let fine = uniform_arc_nodes(arcs, 2, h);
    let max_fine = fine.iter().map(|z| cert.p(*z).norm()).fold(0.0, f64::max);
    let deriv: f64 = cert
        .coefficients
        .iter()
        .enumerate()
        .map(|(k, c)| k as f64 * c.norm())
        .sum::<f64>()
        / cert.scale;
    // chord ≤ arc length, and every point is within h/2 of a node
    max_fine + 0.5 * h * deriv
}

/// Minimizes max_j |1 + Σ_k b_k (t_j^k - t0^k)| over b by Lawson's
/// algorithm. Returns the coefficient vector of P in powers of t.
fn lawson(ts: &[Complex64], t0: Complex64, degree: usize) -> Vec<Complex64> {
    let n = ts.len();
    let t0k: Vec<Complex64> = (1..=degree).map(|k| t0.powu(k as u32)).collect();
    let a = DMatrix::from_fn(n, degree, |j, k| ts[j].powu(k as u32 + 1) - t0k[k]);
    let mut weights = vec![1.0 / n as f64; n];
    let mut b = DVector::<Complex64>::zeros(degree);
    for _ in 0..LAWSON_ITERATIONS {
        let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        let aw = DMatrix::from_fn(n, degree, |j, k| a[(j, k)] * sw[j]);
        let rhs = DVector::from_fn(n, |j, _| Complex64::new(-sw[j], 0.0));
        let svd = aw.svd(true, true);
        match svd.solve(&rhs, 1e-14) {
            Ok(sol) => b = sol,
            Err(_) => break,
        }
        let resid = &a * &b;
        let mags: Vec<f64> = resid.iter().map(|r| (r + 1.0).norm()).collect();
        let mut total = 0.0;
        for (w, m) in weights.iter_mut().zip(&mags) {
            *w *= m;
            total += *w;
        }
        if total <= 0.0 || !total.is_finite() {
            break;
        }
        weights.iter_mut().for_each(|w| *w /= total);
    }
    // P(t) = 1 - Σ b_k t0^k + Σ b_k t^k
    let mut coeffs = Vec::with_capacity(degree + 1);
    coeffs.push(Complex64::new(1.0, 0.0) - b.iter().zip(&t0k).map(|(bk, tk)| bk * tk).sum::<Complex64>());
    coeffs.extend(b.iter().copied());
    coeffs
}

/// Searches degrees 1, 2, 4, … up to `max_degree` for a certificate that
/// separates `p` from the hull of K(I).
pub fn find_certificate(arcs: &ArcUnion, p: &Point2, max_degree: usize) -> Result<PolyCertificate, HullError> {
    if !p.is_finite() {
        return Err(HullError::Precondition("target point is not finite".into()));
    }
    if arcs.distance_to_closure(p.z) <= super::HULL_TOL {
        return Err(HullError::PointInHull(*p));
    }
    if p.w.norm() == 0.0 {
        return Err(HullError::Precondition("w0 = 0: Q = P(z)·w vanishes at the target".into()));
    }
    if max_degree == 0 {
        return Err(HullError::Precondition("max degree must be at least 1".into()));
    }
    let grid = chebyshev_arc_nodes(arcs, 512.max(16 * max_degree));
    let center = grid.iter().sum::<Complex64>() / grid.len() as f64;
    let scale = grid.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
    let ts: Vec<Complex64> = grid.iter().map(|z| (z - center) / scale).collect();
    let t0 = (p.z - center) / scale;

    let mut degrees = Vec::new();
    let mut d = 1;
    while d < max_degree {
        degrees.push(d);
        d *= 2;
    }
    degrees.push(max_degree);

    let mut best_margin = 0.0f64;
    for degree in degrees {
        let coefficients = lawson(&ts, t0, degree);
        let mut cert = PolyCertificate { degree, center, scale, coefficients, target: *p, margin: 0.0 };
        let bound = rigorous_sup(arcs, &cert, FINE_FACTOR * grid.len().max(4096));
        if !(bound.is_finite() && bound > 0.0) {
            continue;
        }
        cert.coefficients.iter_mut().for_each(|c| *c /= bound);
        cert.margin = cert.q(p).norm();
        best_margin = best_margin.max(cert.margin);
        if cert.margin > 1.0 + MARGIN_SLACK {
            return Ok(cert);
        }
    }
    Err(HullError::CertificateNotFound { max_degree, best_margin })
}

/// Checks |Q| ≤ 1 + 1e-9 on `samples` points of K and |Q(p)| > 1.
pub fn verify_certificate(
    cert: &PolyCertificate,
    set: &ExampleSet,
    samples: usize,
) -> Result<CertificateReport, HullError> {
    let pts = sample_set(set, samples);
    let (worst_value, worst_at) = pts
        .iter()
        .map(|pt| (cert.q(pt).norm(), *pt))
        .fold((0.0, Point2::origin()), |acc, x| if x.0 > acc.0 { x } else { acc });
    if worst_value > 1.0 + SUP_SLACK || !worst_value.is_finite() {
        return Err(HullError::VerificationFailed { value: worst_value, at: worst_at });
    }
    let target_value = cert.q(&cert.target).norm();
    if target_value <= 1.0 {
        return Err(HullError::VerificationFailed { value: target_value, at: cert.target });
    }
    Ok(CertificateReport { samples: pts.len(), worst_value, worst_at, target_value })
}
