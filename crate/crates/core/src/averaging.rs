//! Pushforwards of absolutely continuous circle measures under p_ν(ζ) = ζ^ν.
//! The k-th moment of (p_ν)_*μ is a_{-kν}, so weak convergence to μ(𝕋)σ is
//! read off the Fourier coefficients of the density.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disc::{circle_moments, poisson_kernel, ArcSegment, DiscError, FourierSeries, OuterFunction, TAU_E};
use crate::quadrature::{circle_angles, composite_nodes, GaussLegendre};

/// Uniform grid for densities given as functions.
pub const DEFAULT_DENSITY_GRID: usize = 16384;

/// Bins of the histogram fallback in [`g_pushforward_measure`].
pub const HISTOGRAM_BINS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AveragingError {
    #[error("moments up to order {needed} requested, coefficients known to order {order}")]
    TruncationExceeded { needed: usize, order: usize },
    #[error("|g| deviates from 1 by {deviation:.3e} on the arc; it is too close to E")]
    NonUnimodularBoundary { deviation: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

/// An absolutely continuous measure on 𝕋: density samples on a uniform grid
/// (with respect to σ) and its Fourier coefficients a_n = ∫ ζ^{-n} dμ.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMeasure {
    density: Vec<f64>,
    coeffs: FourierSeries,
}

impl CircleMeasure {
    pub fn uniform(order: usize) -> Self {
        Self::trig_polynomial(&[Complex64::new(1.0, 0.0)], order)
    }

    /// Density a_0 + Σ_{n≥1} (a_n ζ^n + conj(a_n) ζ^{-n}), coefficients exact.
    pub fn trig_polynomial(nonneg: &[Complex64], order: usize) -> Self {
        let mut full = vec![Complex64::new(0.0, 0.0); order.max(nonneg.len() - 1) + 1];
        full[..nonneg.len()].copy_from_slice(nonneg);
        let coeffs = FourierSeries::real_from_nonnegative(&full);
        let grid = DEFAULT_DENSITY_GRID.max(4 * coeffs.order());
        let density = circle_angles(grid).iter().map(|&t| coeffs.eval_boundary(t).re).collect();
        Self { density, coeffs }
    }

    /// Harmonic measure ω_𝔻(z0, ·), with a_n = conj(z0)^n and a_{-n} = z0^n.
    pub fn poisson(z0: Complex64, order: usize) -> Result<Self, AveragingError> {
        if z0.norm() >= 1.0 {
            return Err(AveragingError::InvalidArgument(format!("{z0} is not in the open disc")));
        }
        let coeffs = FourierSeries::from_fn(order, |n| {
            if n >= 0 {
                z0.conj().powi(n as i32)
            } else {
                z0.powi((-n) as i32)
            }
        });
        let grid = DEFAULT_DENSITY_GRID.max(4 * order);
        let density = circle_angles(grid).iter().map(|&t| poisson_kernel(z0, t)).collect();
        Ok(Self { density, coeffs })
    }

    /// Coefficients up to `order` by DFT of the samples.
    pub fn from_density(samples: Vec<f64>, order: usize) -> Result<Self, AveragingError> {
        let coeffs = circle_moments(&samples, order)?;
        Ok(Self { density: samples, coeffs })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(f: F, grid: usize, order: usize) -> Result<Self, AveragingError> {
        Self::from_density(circle_angles(grid).into_iter().map(f).collect(), order)
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn coefficients(&self) -> &FourierSeries {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.order()
    }

    /// μ(𝕋) = a_0.
    pub fn mass(&self) -> f64 {
        self.coeffs.coeff(0).re
    }

    /// ∫ ζ^{kν} dμ by the trapezoid rule on the density samples.
    pub fn direct_power_moment(&self, nu: usize, k: i64) -> Complex64 {
        let m = self.density.len();
        let e = k * nu as i64;
        self.density
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let t = TAU * ((j as i64 * e).rem_euclid(m as i64)) as f64 / m as f64;
                Complex64::from_polar(*d, t)
            })
            .sum::<Complex64>()
            / m as f64
    }
}

/// Moment k of (p_ν)_*μ: ∫ ζ^k d(p_ν)_*μ = ∫ ζ^{kν} dμ = a_{-kν}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub nu: usize,
    pub k: i64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

fn check_order(mu: &CircleMeasure, nu: usize, kmax: usize) -> Result<(), AveragingError> {
    if nu == 0 {
        return Err(AveragingError::InvalidArgument("nu must be at least 1".into()));
    }
    let needed = kmax * nu;
    if needed > mu.order() {
        return Err(AveragingError::TruncationExceeded { needed, order: mu.order() });
    }
    Ok(())
}

/// Moments k = -K..=K of (p_ν)_*μ, read from the cached coefficients.
pub fn pushforward_power_moments(mu: &CircleMeasure, nu: usize, kmax: usize) -> Result<Vec<MomentRow>, AveragingError> {
    check_order(mu, nu, kmax)?;
    Ok((-(kmax as i64)..=kmax as i64)
        .map(|k| {
            let a = mu.coeffs.coeff(-k * nu as i64);
            MomentRow { nu, k, re: a.re, im: a.im, abs: a.norm() }
        })
        .collect())
}

/// max_{1≤|k|≤K} |a_{-kν}|.
pub fn weak_gap(mu: &CircleMeasure, nu: usize, kmax: usize) -> Result<f64, AveragingError> {
    check_order(mu, nu, kmax)?;
    Ok(mu.coeffs.max_abs_strided(nu, kmax))
}

/// The pushforward of ω_𝔻(z0, ·)|_arc under the boundary values of g.
///
/// Coefficients come from composite Gauss-Legendre nodes along the arc,
/// a_n = Σ_j q_j γ_j^{-n} with γ_j = g(ζ_j)/|g(ζ_j)|. The density is obtained
/// by change of variables when the unwrapped argument of g is strictly
/// monotone along the arc, and by a histogram otherwise.
pub fn g_pushforward_measure(
    g: &OuterFunction,
    z0: Complex64,
    arc: &ArcSegment,
    grid: usize,
) -> Result<CircleMeasure, AveragingError> {
    if z0.norm() >= 1.0 {
        return Err(AveragingError::InvalidArgument(format!("{z0} is not in the open disc")));
    }
    if grid < 64 {
        return Err(AveragingError::InvalidArgument(format!("grid {grid} below 64")));
    }
    let inside = g.arcs().arcs().iter().any(|i| {
        let off = (arc.start - i.start).rem_euclid(TAU);
        off + arc.len <= i.len
    });
    if !inside || arc.len <= 0.0 {
        return Err(AveragingError::InvalidArgument("arc is not a sub-arc of I".into()));
    }
    for t in [arc.start, arc.end()] {
        if g.arcs().distance_to_endpoints(t) < TAU_E - 1e-12 {
            return Err(AveragingError::InvalidArgument(format!("arc endpoint {t} within τ_E of E")));
        }
    }

    let rule = GaussLegendre::new(32);
    let panels = (grid / 64).max(4);
    let nodes = composite_nodes(&rule, arc.start, arc.end(), panels);
    let mut gammas = Vec::with_capacity(nodes.len());
    let mut weights = Vec::with_capacity(nodes.len());
    let mut deviation = 0.0f64;
    for &(t, w) in &nodes {
        let val = g.eval(Complex64::from_polar(1.0, t))?;
        deviation = deviation.max((val.norm() - 1.0).abs());
        gammas.push(val / val.norm());
        weights.push(w / TAU * poisson_kernel(z0, t));
    }
    if deviation > 1e-2 {
        return Err(AveragingError::NonUnimodularBoundary { deviation });
    }

    let order = grid / 4;
    let mut nonneg = vec![Complex64::new(0.0, 0.0); order + 1];
    for (gamma, q) in gammas.iter().zip(&weights) {
        // a_n = ∫ ζ^{-n} dμ, so each node contributes q·conj(γ)^n
        let step = gamma.conj();
        let mut pw = Complex64::new(*q, 0.0);
        for a in nonneg.iter_mut() {
            *a += pw;
            pw *= step;
        }
    }
    let coeffs = FourierSeries::real_from_nonnegative(&nonneg);
    let density = pushforward_density(g, z0, arc, grid).unwrap_or_else(|| histogram_density(&gammas, &weights));
    Ok(CircleMeasure { density, coeffs })
}

/// Density on a uniform grid of `grid` points by change of variables, or
/// None when arg g is not strictly monotone along the arc.
fn pushforward_density(g: &OuterFunction, z0: Complex64, arc: &ArcSegment, grid: usize) -> Option<Vec<f64>> {
    let samples = 8 * grid;
    let thetas: Vec<f64> = (0..=samples).map(|k| arc.start + arc.len * k as f64 / samples as f64).collect();
    let mut psi: Vec<f64> = Vec::with_capacity(thetas.len());
    for &t in &thetas {
        let a = g.eval_unchecked(Complex64::from_polar(1.0, t)).arg();
        let a = match psi.last() {
            None => a,
            Some(&prev) => prev + (a - prev + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI,
        };
        psi.push(a);
    }
    let incr: Vec<f64> = psi.windows(2).map(|w| w[1] - w[0]).collect();
    let sign = incr[0].signum();
    if sign == 0.0 || incr.iter().any(|d| d.signum() != sign) {
        return None;
    }
    let h = TAU / grid as f64;
    let mut density = vec![0.0; grid];
    for i in 0..samples {
        let (p0, p1) = (psi[i], psi[i + 1]);
        let (lo, hi) = if p0 < p1 { (p0, p1) } else { (p1, p0) };
        let dpsi = (p1 - p0) / (thetas[i + 1] - thetas[i]);
        // grid angles s = k·h (mod 2π) in [lo, hi)
        let mut k = (lo / h).ceil() as i64;
        while (k as f64) * h < hi {
            let s = k as f64 * h;
            let theta = thetas[i] + (s - p0) / dpsi;
            density[k.rem_euclid(grid as i64) as usize] += poisson_kernel(z0, theta) / dpsi.abs();
            k += 1;
        }
    }
    Some(density)
}

fn histogram_density(gammas: &[Complex64], weights: &[f64]) -> Vec<f64> {
    let bins = HISTOGRAM_BINS;
    let mut density = vec![0.0; bins];
    for (g, q) in gammas.iter().zip(weights) {
        let b = ((g.arg().rem_euclid(TAU) / TAU * bins as f64) as usize).min(bins - 1);
        density[b] += q * bins as f64;
    }
    density
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::ArcUnion;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_plus_cos() -> CircleMeasure {
        CircleMeasure::trig_polynomial(&[c(1.0, 0.0), c(0.5, 0.0)], 512)
    }

    #[test]
    fn uniform_measure_is_invariant() {
        let mu = CircleMeasure::uniform(256);
        for nu in [1, 3, 16] {
            let m = pushforward_power_moments(&mu, nu, 8).unwrap();
            for row in m {
                let want = if row.k == 0 { 1.0 } else { 0.0 };
                assert_eq!(row.abs, want);
            }
            assert_eq!(weak_gap(&mu, nu, 8).unwrap(), 0.0);
        }
    }

    #[test]
    fn cosine_density_averages_out() {
        let mu = one_plus_cos();
        assert_eq!(weak_gap(&mu, 1, 8).unwrap(), 0.5);
        for nu in 2..=16 {
            assert_eq!(weak_gap(&mu, nu, 8).unwrap(), 0.0);
        }
        assert!((mu.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_moments_decay_geometrically() {
        let mu = CircleMeasure::poisson(c(0.4, 0.0), 1024).unwrap();
        assert!((weak_gap(&mu, 8, 4).unwrap() - 0.4f64.powi(8)).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for nu in 1..=16 {
            let gap = weak_gap(&mu, nu, 4).unwrap();
            assert!(gap < last);
            last = gap;
        }
    }

    #[test]
    fn direct_quadrature_matches_cached_coefficients() {
        let z0 = c(0.3, -0.5);
        let measures = [
            CircleMeasure::poisson(z0, 2048).unwrap(),
            one_plus_cos(),
            CircleMeasure::from_fn(|t| (t.sin()).exp(), 16384, 2048).unwrap(),
        ];
        for mu in &measures {
            for nu in [1, 2, 5] {
                for row in pushforward_power_moments(mu, nu, 6).unwrap() {
                    let d = mu.direct_power_moment(nu, row.k);
                    assert!((d - c(row.re, row.im)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn truncation_is_reported() {
        let mu = CircleMeasure::poisson(c(0.4, 0.0), 64).unwrap();
        assert!(matches!(weak_gap(&mu, 16, 8), Err(AveragingError::TruncationExceeded { needed: 128, order: 64 })));
    }

    #[test]
    fn g_pushforward_preserves_mass() {
        let g = OuterFunction::closed_form_iplus();
        let arc = ArcSegment { start: TAU_E, len: std::f64::consts::PI - 2.0 * TAU_E };
        let z0 = c(0.2, 0.3);
        let mu = g_pushforward_measure(&g, z0, &arc, 4096).unwrap();
        assert!((mu.mass() - arc.harmonic_measure(z0)).abs() < 1e-9);
        let density_mass = mu.density().iter().sum::<f64>() / mu.density().len() as f64;
        assert!((density_mass - mu.mass()).abs() < 1e-3);
        let mu0 = g_pushforward_measure(&g, c(0.0, 0.0), &arc, 4096).unwrap();
        assert!((mu0.mass() - arc.len / TAU).abs() < 1e-12);
    }

    #[test]
    fn g_pushforward_moments_decay() {
        let g = OuterFunction::closed_form_iplus();
        let arc = ArcSegment { start: 0.3, len: 2.0 };
        let mu = g_pushforward_measure(&g, c(0.0, 0.0), &arc, 8192).unwrap();
        let gaps: Vec<f64> = [1, 2, 4, 8, 16, 32].iter().map(|&nu| weak_gap(&mu, nu, 8).unwrap()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn g_pushforward_guards() {
        let g = OuterFunction::closed_form_iplus();
        let near_e = ArcSegment { start: 0.001, len: 1.0 };
        assert!(g_pushforward_measure(&g, c(0.0, 0.0), &near_e, 1024).is_err());
        let outside = ArcSegment { start: 3.5, len: 1.0 };
        assert!(g_pushforward_measure(&g, c(0.0, 0.0), &outside, 1024).is_err());
        let fourier = crate::disc::build_outer_function(&ArcUnion::upper_half(), 64).unwrap();
        let arc = ArcSegment { start: 0.05, len: 3.0 };
        assert!(matches!(
            g_pushforward_measure(&fourier, c(0.0, 0.0), &arc, 1024),
            Err(AveragingError::NonUnimodularBoundary { .. })
        ));
    }
}
