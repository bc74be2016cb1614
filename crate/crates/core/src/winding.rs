//! Winding numbers of discrete closed curves, zero counting by the argument
//! principle, and random closed curves in metric tubes around K₁.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hull::{set_distance, ExampleSet, Point2};

/// Largest vertex gap allowed in a [`DiscreteCurve`].
pub const MAX_VERTEX_GAP: f64 = 0.05;

/// Distances at or below this count as lying on the base set.
pub const ON_SET_TOL: f64 = 1e-9;

const MAX_REGENERATIONS: usize = 100;
const MAX_REFINEMENTS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WindingError {
    #[error("point at distance {min_distance:.3e} from the curve, below 10 × max segment {max_segment:.3e}")]
    TooCloseToPoint { min_distance: f64, max_segment: f64 },
    #[error("|f - z0| = {min_modulus:.3e} on the boundary grid, below 10/grid")]
    ZeroOnBoundary { min_modulus: f64 },
    #[error("trial {trial}: no curve stayed inside the tube after {attempts} attempts")]
    CurveEscapedTube { trial: usize, attempts: usize },
    #[error("{0}")]
    InvalidArgument(String),
}

/// Closed polyline in C² with first vertex equal to the last.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    vertices: Vec<Point2>,
    refinement: usize,
}

impl DiscreteCurve {
    pub fn new(mut vertices: Vec<Point2>) -> Result<Self, WindingError> {
        if vertices.len() < 3 {
            return Err(WindingError::InvalidArgument("a closed curve needs at least 3 vertices".into()));
        }
        if vertices.first() != vertices.last() {
            vertices.push(vertices[0]);
        }
        let worst = vertices.windows(2).map(|w| w[0].dist(&w[1])).fold(0.0, f64::max);
        if worst >= MAX_VERTEX_GAP {
            return Err(WindingError::InvalidArgument(format!("vertex gap {worst:.3e} exceeds {MAX_VERTEX_GAP}")));
        }
        Ok(Self { vertices, refinement: 0 })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    /// Inserts the midpoint of every segment.
    pub fn refined(&self) -> Self {
        Self { vertices: refine_closed(&self.vertices), refinement: self.refinement + 1 }
    }

    pub fn z_projection(&self) -> Vec<Complex64> {
        self.vertices.iter().map(|p| p.z).collect()
    }
}

fn refine_closed<T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T>>(v: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(2 * v.len());
    for w in v.windows(2) {
        out.push(w[0]);
        out.push((w[0] + w[1]) * 0.5);
    }
    out.push(*v.last().unwrap());
    out
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.z + o.z, self.w + o.w)
    }
}

impl std::ops::Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.z * s, self.w * s)
    }
}

/// Winding number of the closed polyline through `curve` (closed implicitly
/// when the last vertex differs from the first) around z0, as the sum of
/// principal argument increments divided by 2π.
pub fn winding_number(curve: &[Complex64], z0: Complex64) -> Result<i64, WindingError> {
    let n = curve.len();
    if n < 2 {
        return Err(WindingError::InvalidArgument("curve needs at least 2 vertices".into()));
    }
    let seg = |k: usize| (curve[(k + 1) % n] - curve[k]).norm();
    let max_segment = (0..n).map(seg).fold(0.0, f64::max);
    let min_distance = curve.iter().map(|v| (v - z0).norm()).fold(f64::INFINITY, f64::min);
    if min_distance <= 10.0 * max_segment {
        return Err(WindingError::TooCloseToPoint { min_distance, max_segment });
    }
    let total: f64 = (0..n)
        .map(|k| ((curve[(k + 1) % n] - z0) / (curve[k] - z0)).arg())
        .sum();
    Ok((total / TAU).round() as i64)
}

/// Largest grid [`zero_count_via_boundary`] doubles up to.
pub const MAX_ZERO_COUNT_GRID: usize = 1 << 22;

/// Number of solutions of f = z0 in 𝔻, counted with multiplicity, as the
/// winding of f(𝕋) around z0 on a uniform grid. The grid is doubled, up to
/// [`MAX_ZERO_COUNT_GRID`], while the image polygon is too coarse for
/// [`winding_number`].
pub fn zero_count_via_boundary<F>(f: F, z0: Complex64, grid: usize) -> Result<i64, WindingError>
where
    F: Fn(Complex64) -> Complex64,
{
    if grid < 8 {
        return Err(WindingError::InvalidArgument(format!("grid {grid} below 8")));
    }
    let mut m = grid;
    loop {
        let vals: Vec<Complex64> =
            (0..m).map(|j| f(Complex64::from_polar(1.0, TAU * j as f64 / m as f64))).collect();
        let min_modulus = vals.iter().map(|v| (v - z0).norm()).fold(f64::INFINITY, f64::min);
        if min_modulus < 10.0 / grid as f64 {
            return Err(WindingError::ZeroOnBoundary { min_modulus });
        }
        match winding_number(&vals, z0) {
            Err(WindingError::TooCloseToPoint { .. }) if 2 * m <= MAX_ZERO_COUNT_GRID.max(grid) => m *= 2,
            other => return other,
        }
    }
}

/// The metric tube {p : dist(p, base) < δ}. δ = 0 stands for the base set
/// itself, up to [`ON_SET_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpec {
    pub base: ExampleSet,
    pub delta: f64,
}

impl TubeSpec {
    pub fn new(base: ExampleSet, delta: f64) -> Result<Self, WindingError> {
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(WindingError::InvalidArgument(format!("tube radius {delta} must be finite and >= 0")));
        }
        Ok(Self { base, delta })
    }
}

pub fn tube_membership(spec: &TubeSpec, p: &Point2) -> bool {
    let d = set_distance(&spec.base, p);
    d < spec.delta || d <= ON_SET_TOL
}

/// Point of K₁ with parameters θ ∈ [0, 1] and w-phase φ.
pub fn k1_point(theta: f64, phi: f64) -> Point2 {
    Point2::new(Complex64::from_polar(1.0, TAU * theta), Complex64::from_polar(theta, phi))
}

/// The loop ζ ↦ (ζ, |w|·e^{iφ}) at fixed |w|, which turns once in z.
pub fn naive_lift_curve(w_abs: f64, n: usize) -> Vec<Point2> {
    (0..=n)
        .map(|k| {
            let s = TAU * (k % n) as f64 / n as f64;
            Point2::new(Complex64::from_polar(1.0, s), Complex64::from_polar(w_abs, 0.7))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub trials: usize,
    pub delta: f64,
    pub z0: Complex64,
    pub histogram: BTreeMap<i64, usize>,
    pub rejections: usize,
}

/// Step bounds of the random walk in (θ, φ).
const THETA_STEP: f64 = 0.004;
const PHI_STEP: f64 = 0.03;
const WALK_STEPS: usize = 300;

fn reflect_unit(x: f64) -> f64 {
    let y = x.rem_euclid(2.0);
    if y > 1.0 {
        2.0 - y
    } else {
        y
    }
}

/// A random walk on K₁'s (θ, φ) coordinates, closed up linearly, with a
/// smooth periodic perturbation of size at most 0.45δ added to it.
fn random_tube_curve(rng: &mut ChaCha8Rng, delta: f64) -> Vec<Point2> {
    let theta0: f64 = rng.gen_range(0.0..=1.0);
    let phi0: f64 = rng.gen_range(0.0..TAU);
    let mut params = vec![(theta0, phi0)];
    let (mut theta, mut phi) = (theta0, phi0);
    for _ in 0..WALK_STEPS {
        theta = reflect_unit(theta + rng.gen_range(-THETA_STEP..=THETA_STEP));
        phi += rng.gen_range(-PHI_STEP..=PHI_STEP);
        params.push((theta, phi));
    }
    let phi_end = phi0 + TAU * ((phi - phi0) / TAU).round();
    let steps = ((theta - theta0).abs() / THETA_STEP).max((phi - phi_end).abs() / PHI_STEP).ceil() as usize;
    for k in 1..steps.max(1) {
        let s = k as f64 / steps as f64;
        params.push((theta + (theta0 - theta) * s, phi + (phi_end - phi) * s));
    }
    let n = params.len();

    // three harmonics in each coordinate, scaled so that the perturbation
    // has C² norm at most 0.45δ
    let mut coef = [Complex64::new(0.0, 0.0); 6];
    for c in coef.iter_mut() {
        *c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
    }
    let norm: f64 = coef.iter().map(|c| c.norm()).sum();
    let scale = if norm > 0.0 { 0.45 * delta / norm } else { 0.0 };
    let jitter = |s: f64| {
        let mut jz = Complex64::new(0.0, 0.0);
        let mut jw = Complex64::new(0.0, 0.0);
        for h in 0..3 {
            let e = Complex64::from_polar(1.0, TAU * (h + 1) as f64 * s);
            jz += coef[h] * e;
            jw += coef[h + 3] * e;
        }
        Point2::new(jz * scale, jw * scale)
    };

    let mut out: Vec<Point2> = params
        .iter()
        .enumerate()
        .map(|(k, &(t, p))| k1_point(t, p) + jitter(k as f64 / n as f64))
        .collect();
    out.push(out[0]);
    out
}

/// Winding of the z-projection around z0, refining the polyline by midpoint
/// insertion until the separation precondition holds.
fn projected_winding(curve: &DiscreteCurve, z0: Complex64) -> Result<i64, WindingError> {
    let mut zs = curve.z_projection();
    for _ in 0..=MAX_REFINEMENTS {
        match winding_number(&zs, z0) {
            Err(WindingError::TooCloseToPoint { .. }) => zs = refine_closed(&zs),
            other => return other,
        }
    }
    winding_number(&zs, z0)
}

/// Random closed curves inside the δ-tube around K₁ and the histogram of
/// the windings of their z-projections around z0.
pub fn obstruction_demo(
    spec: &TubeSpec,
    z0: Complex64,
    trials: usize,
    seed: u64,
) -> Result<ObstructionReport, WindingError> {
    if spec.base != ExampleSet::K1 {
        return Err(WindingError::InvalidArgument("the obstruction demo runs on tubes around K1".into()));
    }
    if spec.delta > 0.3 || z0.norm() > 0.7 {
        return Err(WindingError::InvalidArgument(format!(
            "demo needs delta <= 0.3 and |z0| <= 0.7 (got {}, {})",
            spec.delta,
            z0.norm()
        )));
    }
    let results: Vec<Result<(i64, usize), WindingError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            for attempt in 0..MAX_REGENERATIONS {
                let verts = random_tube_curve(&mut rng, spec.delta);
                let Ok(curve) = DiscreteCurve::new(verts) else { continue };
                if curve.vertices().iter().all(|p| tube_membership(spec, p)) {
                    return projected_winding(&curve, z0).map(|w| (w, attempt));
                }
            }
            Err(WindingError::CurveEscapedTube { trial, attempts: MAX_REGENERATIONS })
        })
        .collect();
    let mut histogram = BTreeMap::new();
    let mut rejections = 0;
    for r in results {
        let (w, rejected) = r?;
        *histogram.entry(w).or_insert(0) += 1;
        rejections += rejected;
    }
    Ok(ObstructionReport { trials, delta: spec.delta, z0, histogram, rejections })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, center: Complex64, radius: f64, turns: usize) -> Vec<Complex64> {
        (0..n * turns)
            .map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64))
            .collect()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn winding_examples() {
        assert_eq!(winding_number(&circle(256, c(0.0, 0.0), 1.0, 1), c(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&circle(256, c(2.0, 0.0), 0.1, 1), c(0.0, 0.0)).unwrap(), 0);
        assert_eq!(winding_number(&circle(256, c(0.0, 0.0), 1.0, 2), c(0.0, 0.0)).unwrap(), 2);
        let mut rev = circle(256, c(0.0, 0.0), 1.0, 1);
        rev.reverse();
        assert_eq!(winding_number(&rev, c(0.0, 0.0)).unwrap(), -1);
        assert!(matches!(
            winding_number(&circle(16, c(0.0, 0.0), 1.0, 1), c(0.9, 0.0)),
            Err(WindingError::TooCloseToPoint { .. })
        ));
    }

    #[test]
    fn zero_count_examples() {
        assert_eq!(zero_count_via_boundary(|z| z * z, c(0.0, 0.0), 1024).unwrap(), 2);
        assert_eq!(zero_count_via_boundary(|z| z - 3.0, c(0.0, 0.0), 1024).unwrap(), 0);
        let f = |z: Complex64| (c(0.3, 0.0) - z) / (1.0 - 0.3 * z) * 0.99;
        assert_eq!(zero_count_via_boundary(f, c(0.2, 0.0), 1024).unwrap(), 1);
        // too coarse for the polygon test at 8 points, refined internally
        assert_eq!(zero_count_via_boundary(|z| 20.0 * (z - 0.4).powi(5), c(0.0, 0.0), 8).unwrap(), 5);
        assert!(matches!(
            zero_count_via_boundary(|z| z - 1.0, c(0.0, 0.0), 1024),
            Err(WindingError::ZeroOnBoundary { .. })
        ));
    }

    #[test]
    fn tube_examples() {
        let k1 = TubeSpec::new(ExampleSet::K1, 0.5).unwrap();
        assert!(tube_membership(&k1, &k1_point(0.3, 1.0)));
        assert!(!tube_membership(&k1, &Point2::origin()));
        let delta = 0.1;
        let k1 = TubeSpec::new(ExampleSet::K1, delta).unwrap();
        let p = k1_point(0.4, 0.7) + Point2::new(c(0.5 * delta * 0.6, 0.0), c(0.0, 0.5 * delta * 0.8));
        assert!(tube_membership(&k1, &p));
        let exact = TubeSpec::new(ExampleSet::K1, 0.0).unwrap();
        assert!(tube_membership(&exact, &k1_point(0.8, 2.0)));
    }

    #[test]
    fn naive_lift_leaves_the_tube() {
        let spec = TubeSpec::new(ExampleSet::K1, 0.2).unwrap();
        let curve = naive_lift_curve(0.5, 512);
        assert!(curve.iter().any(|p| !tube_membership(&spec, p)));
        let zs: Vec<Complex64> = curve.iter().map(|p| p.z).collect();
        assert_eq!(winding_number(&zs[..512], c(0.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn small_demo_is_deterministic_and_zero() {
        let spec = TubeSpec::new(ExampleSet::K1, 0.2).unwrap();
        let a = obstruction_demo(&spec, c(0.3, -0.2), 24, 7).unwrap();
        let b = obstruction_demo(&spec, c(0.3, -0.2), 24, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.histogram.get(&0), Some(&24));
        let exact = TubeSpec::new(ExampleSet::K1, 0.0).unwrap();
        let r = obstruction_demo(&exact, c(0.0, 0.0), 8, 1).unwrap();
        assert_eq!(r.histogram.get(&0), Some(&8));
    }

    #[test]
    fn curves_respect_the_gap_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let v = random_tube_curve(&mut rng, 0.2);
            assert!(DiscreteCurve::new(v).is_ok());
        }
    }
}
