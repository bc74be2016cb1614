//! Pairings of Green currents, their pushforwards under analytic discs, the
//! limit current T and the measure σ̃ with dd^c T = σ̃ - δ_p.
//!
//! Area pairings are reported in the normalization where the Green current
//! at 0 paired with the unit coefficient gives 1/2, i.e. a coefficient B is
//! integrated against g_𝔻(z0, ·) dA/π. Under d^c = (i/2π)(∂̄ - ∂) the form
//! dd^c v has Lebesgue density Δv/(2π), which is the coefficient Δv/2 in
//! this normalization.

mod battery;

pub use battery::{
    battery_by_labels, default_battery, ComplexFn, ScalarFn, TestForm, TestFunction, BATTERY_LABELS,
};

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disc::{poisson_kernel, ArcUnion, DiscError, OuterFunction};
use crate::hull::Point2;
use crate::poletsky::{build_composite_disc, DiscMap, PoletskyError, RadiusSchedule};
use crate::quadrature::{circle_angles, composite_nodes, graded_composite_nodes, GaussLegendre};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurrentError {
    #[error("finite-difference step {h:e} too small: rounding noise {noise:.3e} exceeds 1e-6 relative")]
    StepTooSmall { h: f64, noise: f64 },
    #[error("test function '{0}' has no analytic Laplacians")]
    MissingLaplacian(String),
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Poletsky(#[from] PoletskyError),
    #[error(transparent)]
    Disc(#[from] DiscError),
}

/// Coefficient of dd^c v in the dA/π normalization, given Δv.
#[inline]
pub fn ddc_coefficient(laplacian: f64) -> f64 {
    0.5 * laplacian
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairingMethod {
    Boundary,
    Area,
    Slice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingResult {
    pub value: f64,
    pub method: PairingMethod,
    /// Nodes of the outer (or only) quadrature.
    pub outer_nodes: usize,
    /// Nodes per inner integral, 0 when there is none.
    pub inner_nodes: usize,
}

/// Quadrature sizes shared by all pairings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CurrentQuadrature {
    /// Trapezoid nodes for circle integrals.
    pub boundary_nodes: usize,
    /// Total Gauss-Legendre nodes of the outer integral of T and σ̃.
    pub limit_outer: usize,
    /// Trapezoid nodes of the inner slice integrals.
    pub limit_inner: usize,
    /// Angles of the polar grid for area pairings.
    pub green_angles: usize,
    /// Geometric refinement levels toward the log singularity.
    pub green_levels: usize,
    /// Gauss-Legendre nodes per radial panel.
    pub green_rule: usize,
    /// Equal panels per circle piece for the graded boundary rule.
    pub graded_panels: usize,
    /// Halvings toward each endpoint of E for the graded boundary rule.
    pub graded_levels: usize,
    /// Gauss-Legendre nodes per panel of the graded boundary rule.
    pub graded_rule: usize,
    /// Outer nodes over I for slice pairings of forms.
    pub form_outer: usize,
}

impl Default for CurrentQuadrature {
    fn default() -> Self {
        Self {
            boundary_nodes: 8192,
            limit_outer: 8192,
            limit_inner: 1024,
            green_angles: 256,
            green_levels: 24,
            green_rule: 12,
            graded_panels: 16,
            graded_levels: 40,
            graded_rule: 64,
            form_outer: 128,
        }
    }
}

impl CurrentQuadrature {
    /// Multiplies every node count by `factor`; refinement levels are kept.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: usize| ((n as f64 * factor).round() as usize).max(4);
        Self {
            boundary_nodes: s(self.boundary_nodes),
            limit_outer: s(self.limit_outer),
            limit_inner: s(self.limit_inner),
            green_angles: s(self.green_angles),
            green_levels: self.green_levels,
            green_rule: s(self.green_rule),
            graded_panels: s(self.graded_panels),
            graded_levels: self.graded_levels,
            graded_rule: s(self.graded_rule),
            form_outer: s(self.form_outer),
        }
    }
}

/// Radial (ρ, weight) pairs on [0, R] refined geometrically toward 0, down
/// to R·2^{-levels}. The first few levels are split further since the
/// integrand varies most near the circle.
fn radial_nodes(rule: &GaussLegendre, radius: f64, levels: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut hi = radius;
    for l in 0..levels {
        let lo = 0.5 * hi;
        let sub = if l < 4 { 4 } else { 1 };
        out.extend(composite_nodes(rule, lo, hi, sub));
        hi = lo;
    }
    out
}

/// (1/π) ∫_𝔻 g_𝔻(z0, ζ) F(ζ) dA(ζ) on a polar grid centered at z0. The
/// ray in direction e^{iφ} leaves the disc at ρ = R(φ). On the innermost
/// disc of radius a the integrand is frozen at F(z0), so its singular part
/// is integrated exactly: ∫_0^a (-ρ log ρ) dρ = a²/4 - (a²/2) log a.
fn green_area<F>(z0: Complex64, f: F, q: &CurrentQuadrature) -> (f64, usize)
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let rule = GaussLegendre::new(q.green_rule);
    let angles = q.green_angles;
    let f0 = f(z0);
    let log_center = (1.0 - z0.norm_sqr()).ln();
    let per_ray: Vec<(f64, usize)> = circle_angles(angles)
        .into_par_iter()
        .map(|phi| {
            let e = Complex64::from_polar(1.0, phi);
            let b = (z0.conj() * e).re;
            let radius = -b + (b * b + 1.0 - z0.norm_sqr()).sqrt();
            let nodes = radial_nodes(&rule, radius, q.green_levels);
            let mut s = 0.0;
            for &(rho, w) in &nodes {
                let zeta = z0 + e * rho;
                let green = -rho.ln() + (1.0 - z0.conj() * zeta).norm().ln();
                s += w * rho * green * f(zeta);
            }
            let a = radius * 0.5f64.powi(q.green_levels as i32);
            s += f0 * (a * a / 4.0 - 0.5 * a * a * a.ln() + 0.5 * a * a * log_center);
            (s, nodes.len() + 1)
        })
        .collect();
    let total: f64 = per_ray.iter().map(|x| x.0).sum();
    let nodes: usize = per_ray.iter().map(|x| x.1).sum();
    (total * (TAU / angles as f64) / PI, nodes)
}

pub fn pair_green<B>(z0: Complex64, beta: B) -> Result<PairingResult, CurrentError>
where
    B: Fn(Complex64) -> f64 + Sync,
{
    pair_green_with(z0, beta, &CurrentQuadrature::default())
}

/// ⟨G_{z0}, B·(i/2π)dζ∧dζ̄⟩ = (1/π) ∫_𝔻 g_𝔻(z0, ·) B dA.
pub fn pair_green_with<B>(z0: Complex64, beta: B, q: &CurrentQuadrature) -> Result<PairingResult, CurrentError>
where
    B: Fn(Complex64) -> f64 + Sync,
{
    if z0.norm() >= 1.0 {
        return Err(CurrentError::InvalidArgument(format!("{z0} is not in the open disc")));
    }
    let (value, nodes) = green_area(z0, beta, q);
    Ok(PairingResult { value, method: PairingMethod::Area, outer_nodes: nodes, inner_nodes: 0 })
}

/// ∫_𝕋 u∘f dσ - u(f(0)) by the trapezoid rule. By Green-Riesz this is
/// ⟨f_* G_0, dd^c u⟩.
pub fn pair_pushforward_boundary(f: &DiscMap, u: &TestFunction) -> PairingResult {
    pair_pushforward_boundary_with(f, u, &CurrentQuadrature::default())
}

pub fn pair_pushforward_boundary_with(f: &DiscMap, u: &TestFunction, q: &CurrentQuadrature) -> PairingResult {
    let m = q.boundary_nodes;
    let mean = circle_angles(m)
        .into_par_iter()
        .map(|t| u.eval(&f.eval(Complex64::from_polar(1.0, t))))
        .collect::<Vec<f64>>()
        .iter()
        .sum::<f64>()
        / m as f64;
    PairingResult {
        value: mean - u.eval(&f.eval(Complex64::new(0.0, 0.0))),
        method: PairingMethod::Boundary,
        outer_nodes: m,
        inner_nodes: 0,
    }
}

/// Nodes (θ, weight w.r.t. σ) for integrals over 𝕋 of functions that are
/// smooth except at the points of E. Each arc between consecutive points of
/// E gets a composite Gauss-Legendre rule graded toward both of its ends.
pub fn graded_circle_nodes(arcs: &ArcUnion, q: &CurrentQuadrature) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(q.graded_rule);
    let mut out = Vec::new();
    for (seg, _) in arcs.pieces() {
        for (t, w) in graded_composite_nodes(&rule, seg.start, seg.end(), q.graded_panels, q.graded_levels) {
            out.push((t, w / TAU));
        }
    }
    out
}

/// ⟨f_* G_0, dd^c u⟩ from the same boundary formula as
/// [`pair_pushforward_boundary`], written in the variable ξ = φ_c(ζ) as
/// ∫ u(F(ξ)) dω_𝔻(c, ξ) - u(F(c)). For composite discs the boundary values
/// of g^ν oscillate without bound near E as r → 1, so the circle is
/// integrated with a rule graded toward E.
pub fn pair_pushforward_boundary_graded(f: &DiscMap, u: &TestFunction, q: &CurrentQuadrature) -> PairingResult {
    let c = f.center;
    let nodes: Vec<(f64, f64)> = match f.outer_function() {
        Some(g) => graded_circle_nodes(g.arcs(), q),
        None => {
            let m = q.boundary_nodes;
            circle_angles(m).into_iter().map(|t| (t, 1.0 / m as f64)).collect()
        }
    };
    let integral: f64 = nodes
        .par_iter()
        .map(|&(t, w)| w * poisson_kernel(c, t) * u.eval(&f.outer_map(Complex64::from_polar(1.0, t))))
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    PairingResult {
        value: integral - u.eval(&f.outer_map(c)),
        method: PairingMethod::Boundary,
        outer_nodes: nodes.len(),
        inner_nodes: 0,
    }
}

pub const DEFAULT_FD_STEP: f64 = 1e-4;

pub fn pair_pushforward_area(f: &DiscMap, u: &TestFunction, h: f64) -> Result<PairingResult, CurrentError> {
    pair_pushforward_area_with(f, u, h, &CurrentQuadrature::default())
}

/// -(1/2π) ∫_𝔻 log|ζ| Δ(u∘f)(ζ) dA with a five-point Laplacian of step h,
/// refined by Richardson extrapolation against step h/2 when the two
/// estimates differ by more than 1e-5.
pub fn pair_pushforward_area_with(
    f: &DiscMap,
    u: &TestFunction,
    h: f64,
    q: &CurrentQuadrature,
) -> Result<PairingResult, CurrentError> {
    if !(1e-5..=1e-3).contains(&h) {
        return Err(CurrentError::InvalidArgument(format!("step {h:e} outside [1e-5, 1e-3]")));
    }
    let v = |z: Complex64| u.eval(&f.eval(z));
    let lap = |z: Complex64, h: f64| {
        let dx = Complex64::new(h, 0.0);
        let dy = Complex64::new(0.0, h);
        (v(z + dx) + v(z - dx) + v(z + dy) + v(z - dy) - 4.0 * v(z)) / (h * h)
    };
    let zero = Complex64::new(0.0, 0.0);
    let (coarse, nodes) = green_area(zero, |z| ddc_coefficient(lap(z, h)), q);
    let (fine, _) = green_area(zero, |z| ddc_coefficient(lap(z, 0.5 * h)), q);

    // rounding noise of the stencil at step h relative to the Laplacian scale
    let probe = circle_angles(64);
    let mut vmax = 0.0f64;
    let mut lmax = 0.0f64;
    for rho in [0.0, 0.25, 0.5, 0.75, 0.95] {
        for &t in &probe {
            let z = Complex64::from_polar(rho, t);
            vmax = vmax.max(v(z).abs());
            lmax = lmax.max(lap(z, h).abs());
        }
    }
    let noise = 8.0 * f64::EPSILON * vmax / (h * h) / lmax.max(1.0);
    if noise > 1e-6 {
        return Err(CurrentError::StepTooSmall { h, noise });
    }
    let value = if (coarse - fine).abs() > 1e-5 { (4.0 * fine - coarse) / 3.0 } else { coarse };
    Ok(PairingResult { value, method: PairingMethod::Area, outer_nodes: nodes, inner_nodes: 0 })
}

/// Outer nodes for T and σ̃: composite Gauss-Legendre on every piece of the
/// partition of 𝕋 into the arcs of I and of its complement, weighted by
/// the density of ω_𝔻(z0, ·). Each node carries its membership in I.
fn limit_outer_nodes(z0: Complex64, arcs: &ArcUnion, q: &CurrentQuadrature) -> Vec<(f64, f64, bool)> {
    let rule = GaussLegendre::new(32);
    let per_panel = rule.nodes.len();
    let mut out = Vec::with_capacity(q.limit_outer + 64);
    for (seg, in_i) in arcs.pieces() {
        let panels = ((q.limit_outer as f64 * seg.len / TAU / per_panel as f64).round() as usize).max(1);
        for (t, w) in composite_nodes(&rule, seg.start, seg.end(), panels) {
            out.push((t, w / TAU * poisson_kernel(z0, t), in_i));
        }
    }
    out
}

fn jensen_sum(z0: Complex64, arcs: &ArcUnion, u: &TestFunction, q: &CurrentQuadrature) -> (f64, usize) {
    let inner = circle_angles(q.limit_inner);
    let zero = Complex64::new(0.0, 0.0);
    let nodes = limit_outer_nodes(z0, arcs, q);
    let total = nodes
        .par_iter()
        .map(|&(t, w, in_i)| {
            let zeta = Complex64::from_polar(1.0, t);
            let val = if in_i {
                inner.iter().map(|&s| u.eval(&Point2::new(zeta, Complex64::from_polar(1.0, s)))).sum::<f64>()
                    / inner.len() as f64
            } else {
                u.eval(&Point2::new(zeta, zero))
            };
            w * val
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    (total, nodes.len())
}

fn check_center(z0: Complex64) -> Result<(), CurrentError> {
    if z0.norm() < 1.0 {
        Ok(())
    } else {
        Err(CurrentError::InvalidArgument(format!("{z0} is not in the open disc")))
    }
}

/// ∫ u dσ̃ with σ̃ = ω_𝔻(z0,·)|_{𝕋∖I} × δ_0 + ω_𝔻(z0,·)|_I × σ.
pub fn jensen_pair(z0: Complex64, arcs: &ArcUnion, u: &TestFunction) -> Result<f64, CurrentError> {
    jensen_pair_with(z0, arcs, u, &CurrentQuadrature::default())
}

pub fn jensen_pair_with(
    z0: Complex64,
    arcs: &ArcUnion,
    u: &TestFunction,
    q: &CurrentQuadrature,
) -> Result<f64, CurrentError> {
    check_center(z0)?;
    Ok(jensen_sum(z0, arcs, u, q).0)
}

/// ⟨T, dd^c u⟩ = ∫ u dσ̃ - u(z0, 0), on the nodes of [`jensen_pair`].
pub fn pair_limit_current(z0: Complex64, arcs: &ArcUnion, u: &TestFunction) -> Result<PairingResult, CurrentError> {
    pair_limit_current_with(z0, arcs, u, &CurrentQuadrature::default())
}

pub fn pair_limit_current_with(
    z0: Complex64,
    arcs: &ArcUnion,
    u: &TestFunction,
    q: &CurrentQuadrature,
) -> Result<PairingResult, CurrentError> {
    check_center(z0)?;
    let (s, nodes) = jensen_sum(z0, arcs, u, q);
    Ok(PairingResult {
        value: s - u.eval(&Point2::new(z0, Complex64::new(0.0, 0.0))),
        method: PairingMethod::Boundary,
        outer_nodes: nodes,
        inner_nodes: q.limit_inner,
    })
}

/// ⟨T, α⟩ from the slice formula: the Green current of 𝔻×{0} at z0 paired
/// with A_zz̄, plus the Green currents of the slices {ζ}×𝔻 over I paired
/// with A_ww̄ and averaged against ω_𝔻(z0, ·).
pub fn pair_limit_current_form(
    z0: Complex64,
    arcs: &ArcUnion,
    alpha: &TestForm,
) -> Result<PairingResult, CurrentError> {
    pair_limit_current_form_with(z0, arcs, alpha, &CurrentQuadrature::default())
}

pub fn pair_limit_current_form_with(
    z0: Complex64,
    arcs: &ArcUnion,
    alpha: &TestForm,
    q: &CurrentQuadrature,
) -> Result<PairingResult, CurrentError> {
    check_center(z0)?;
    let zero = Complex64::new(0.0, 0.0);
    let (flat, flat_nodes) = green_area(z0, |z| (alpha.a_zz)(&Point2::new(z, zero)), q);
    let rule = GaussLegendre::new(16);
    let total_len: f64 = arcs.arcs().iter().map(|a| a.len).sum();
    let outer: Vec<(f64, f64)> = arcs
        .arcs()
        .iter()
        .flat_map(|seg| {
            let panels = ((q.form_outer as f64 * seg.len / total_len / 16.0).ceil() as usize).max(1);
            composite_nodes(&rule, seg.start, seg.end(), panels)
        })
        .collect();
    let slices: f64 = outer
        .iter()
        .map(|&(t, w)| {
            let zeta = Complex64::from_polar(1.0, t);
            let (inner, _) = green_area(zero, |eta| (alpha.a_ww)(&Point2::new(zeta, eta)), q);
            w / TAU * poisson_kernel(z0, t) * inner
        })
        .sum();
    Ok(PairingResult {
        value: flat + slices,
        method: PairingMethod::Slice,
        outer_nodes: flat_nodes + outer.len(),
        inner_nodes: flat_nodes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub nu: usize,
    pub label: String,
    #[serde(rename = "Tnu")]
    pub t_nu: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub gap: f64,
}

/// Rows (ν, u, ⟨T_ν, dd^c u⟩, ⟨T, dd^c u⟩, gap) for the composite discs
/// through p = (z0, 0) with radii from `schedule`.
pub fn convergence_experiment(
    p: &Point2,
    g: &Arc<OuterFunction>,
    schedule: &RadiusSchedule,
    nus: &[usize],
    battery: &[TestFunction],
    q: &CurrentQuadrature,
) -> Result<Vec<ConvergenceRow>, CurrentError> {
    if p.w.norm() != 0.0 || p.z.norm() >= 1.0 {
        return Err(CurrentError::InvalidArgument(format!("target {p:?} is not a point of 𝔻×{{0}}")));
    }
    let limits: Vec<f64> = battery
        .iter()
        .map(|u| pair_limit_current_with(p.z, g.arcs(), u, q).map(|r| r.value))
        .collect::<Result<_, _>>()?;
    let discs: Vec<DiscMap> = nus
        .iter()
        .map(|&nu| {
            let r = schedule.radius(nu).ok_or_else(|| {
                CurrentError::InvalidArgument(format!("schedule covers nu <= {}, requested {nu}", schedule.nu_max()))
            })?;
            Ok(build_composite_disc(p.z, g.clone(), nu as u32, r)?)
        })
        .collect::<Result<_, CurrentError>>()?;
    let mut rows = Vec::with_capacity(nus.len() * battery.len());
    for (disc, &nu) in discs.iter().zip(nus) {
        for (u, &t) in battery.iter().zip(&limits) {
            let t_nu = pair_pushforward_boundary_graded(disc, u, q).value;
            rows.push(ConvergenceRow { nu, label: u.label().to_string(), t_nu, t, gap: (t_nu - t).abs() });
        }
    }
    Ok(rows)
}

/// For p = (z0, w0) with z0 ∈ Ī the single vertical disc through p is used
/// for every ν, so T_ν = T. The limit column is computed independently as
/// ∫ u(z0, ·) dω_𝔻(w0, ·) - u(p).
pub fn vertical_experiment(
    arcs: &ArcUnion,
    p: &Point2,
    nus: &[usize],
    battery: &[TestFunction],
    q: &CurrentQuadrature,
) -> Result<Vec<ConvergenceRow>, CurrentError> {
    let disc = crate::poletsky::build_vertical_disc_at(arcs, p)?;
    let m = q.boundary_nodes;
    let mut rows = Vec::new();
    for u in battery {
        let t = circle_angles(m)
            .iter()
            .map(|&s| poisson_kernel(p.w, s) * u.eval(&Point2::new(p.z, Complex64::from_polar(1.0, s))))
            .sum::<f64>()
            / m as f64
            - u.eval(p);
        let t_nu = pair_pushforward_boundary_with(&disc, u, q).value;
        for &nu in nus {
            rows.push(ConvergenceRow { nu, label: u.label().to_string(), t_nu, t, gap: (t_nu - t).abs() });
        }
    }
    rows.sort_by_key(|r| r.nu);
    Ok(rows)
}

/// ∫_𝕋 u(aξ, bξ) dω_𝔻(z0, ξ) - u(a z0, b z0) by the trapezoid rule: the
/// right-hand side of Green-Riesz for the disc ζ ↦ (aφ_{z0}(ζ), bφ_{z0}(ζ)).
pub fn harmonic_measure_side(z0: Complex64, a: Complex64, b: Complex64, u: &TestFunction, m: usize) -> f64 {
    circle_angles(m)
        .iter()
        .map(|&t| {
            let xi = Complex64::from_polar(1.0, t);
            poisson_kernel(z0, t) * u.eval(&Point2::new(a * xi, b * xi))
        })
        .sum::<f64>()
        / m as f64
        - u.eval(&Point2::new(a * z0, b * z0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poletsky::build_linear_disc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn green_pairing_of_constants() {
        let v = pair_green(c(0.0, 0.0), |_| 1.0).unwrap().value;
        assert!((v - 0.5).abs() < 1e-12, "{v}");
        let v = pair_green(c(0.0, 0.0), |_| 3.0).unwrap().value;
        assert!((v - 1.5).abs() < 1e-12);
        // ∫ g(z0,·) dA/π = (1 - |z0|²)/2
        let z0 = c(0.5, 0.2);
        let v = pair_green(z0, |_| 1.0).unwrap().value;
        assert!((v - 0.5 * (1.0 - z0.norm_sqr())).abs() < 1e-10, "{v}");
    }

    #[test]
    fn green_pairing_outside_support_and_rotation() {
        let v = pair_green(c(0.0, 0.0), |z| if z.norm() > 1.0 { 1.0 } else { 0.0 }).unwrap().value;
        assert_eq!(v, 0.0);
        let b = |z: Complex64| (z.re * 3.0).cos() + z.im * z.im;
        let rot = Complex64::from_polar(1.0, 0.7);
        let v1 = pair_green(c(0.0, 0.0), b).unwrap().value;
        let v2 = pair_green(c(0.0, 0.0), |z| b(z * rot)).unwrap().value;
        assert!((v1 - v2).abs() < 1e-10);
    }

    #[test]
    fn green_riesz_identity_through_ddc_coefficient() {
        // ⟨G_{z0}, dd^c u⟩ = ∫ u dω - u(z0) for u = |z|², Δu = 4
        for z0 in [c(0.0, 0.0), c(0.3, 0.0), c(0.5, 0.2)] {
            let lhs = pair_green(z0, |_| ddc_coefficient(4.0)).unwrap().value;
            assert!((lhs - (1.0 - z0.norm_sqr())).abs() < 1e-10);
        }
    }

    #[test]
    fn boundary_pairing_examples() {
        let g = OuterFunction::closed_form_iplus().shared();
        let d = build_composite_disc(c(0.2, 0.1), g, 3, 0.9).unwrap();
        let re_z = TestFunction::new("Re z", |p| p.z.re);
        assert!(pair_pushforward_boundary(&d, &re_z).value.abs() < 1e-12);
        let one = TestFunction::new("1", |_| 1.0);
        assert!(pair_pushforward_boundary(&d, &one).value.abs() < 1e-14);
        let arcs = ArcUnion::upper_half();
        let v = crate::poletsky::build_vertical_disc(&arcs, c(0.0, 1.0)).unwrap();
        let w2 = TestFunction::new("|w|^2", |p| p.w.norm_sqr());
        assert!((pair_pushforward_boundary(&v, &w2).value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn area_pairing_examples() {
        let id = build_linear_disc(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let z2 = TestFunction::new("|z|^2", |p| p.z.norm_sqr());
        let v = pair_pushforward_area(&id, &z2, DEFAULT_FD_STEP).unwrap().value;
        assert!((v - 1.0).abs() < 1e-6, "{v}");
        let harmonic = TestFunction::new("Re z^2", |p| (p.z * p.z).re);
        assert!(pair_pushforward_area(&id, &harmonic, DEFAULT_FD_STEP).unwrap().value.abs() < 1e-6);
        assert!(matches!(
            pair_pushforward_area(&id, &z2, 1e-6),
            Err(CurrentError::InvalidArgument(_))
        ));
    }

    #[test]
    fn area_pairing_refuses_noisy_steps() {
        let id = build_linear_disc(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let big = TestFunction::new("1e3 |z|^2", |p| 1e3 * p.z.norm_sqr() + 1e3);
        assert!(matches!(pair_pushforward_area(&id, &big, 1e-5), Err(CurrentError::StepTooSmall { .. })));
    }

    #[test]
    fn area_and_boundary_agree_on_composite_disc() {
        let g = OuterFunction::closed_form_iplus().shared();
        let d = build_composite_disc(c(0.0, 0.0), g, 4, 0.9).unwrap();
        let w2 = TestFunction::new("|w|^2", |p| p.w.norm_sqr());
        let a = pair_pushforward_area(&d, &w2, DEFAULT_FD_STEP).unwrap().value;
        let b = pair_pushforward_boundary(&d, &w2).value;
        assert!((a - b).abs() < 1e-4, "{a} vs {b}");
    }

    #[test]
    fn limit_current_examples() {
        let arcs = ArcUnion::upper_half();
        let o = c(0.0, 0.0);
        let w2 = TestFunction::new("|w|^2", |p| p.w.norm_sqr());
        assert!((pair_limit_current(o, &arcs, &w2).unwrap().value - 0.5).abs() < 1e-12);
        let re_z = TestFunction::new("Re z", |p| p.z.re);
        let z0 = c(0.3, -0.2);
        assert!(pair_limit_current(z0, &arcs, &re_z).unwrap().value.abs() < 1e-12);
        assert!((jensen_pair(z0, &arcs, &re_z).unwrap() - 0.3).abs() < 1e-12);
        let one = TestFunction::new("1", |_| 1.0);
        assert!(pair_limit_current(z0, &arcs, &one).unwrap().value.abs() < 1e-12);
        assert!((jensen_pair(o, &arcs, &w2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn limit_current_against_forms() {
        let arcs = ArcUnion::upper_half();
        let o = c(0.0, 0.0);
        let flat = pair_limit_current_form(o, &arcs, &TestForm::diagonal(|_| 1.0, |_| 0.0)).unwrap().value;
        assert!((flat - pair_green(o, |_| 1.0).unwrap().value).abs() < 1e-14);
        let slices = pair_limit_current_form(o, &arcs, &TestForm::diagonal(|_| 0.0, |_| 1.0)).unwrap().value;
        assert!((slices - 0.25).abs() < 1e-10, "{slices}");
        assert_eq!(pair_limit_current_form(o, &arcs, &TestForm::zero()).unwrap().value, 0.0);
    }

    #[test]
    fn form_pairing_matches_ddc_pairing() {
        // ⟨T, dd^c u⟩ computed two ways
        let arcs = ArcUnion::upper_half();
        let z0 = c(0.2, 0.1);
        let q = CurrentQuadrature { form_outer: 64, ..Default::default() };
        for u in battery_by_labels(&["|z|^2", "|w|^2", "|z|^2|w|^2", "exp(Re z)|w|^2"]).unwrap() {
            let a = pair_limit_current_form_with(z0, &arcs, &TestForm::ddc_of(&u).unwrap(), &q).unwrap().value;
            let b = pair_limit_current(z0, &arcs, &u).unwrap().value;
            assert!((a - b).abs() < 1e-8, "{}: {a} vs {b}", u.label());
        }
    }

    #[test]
    fn graded_and_trapezoid_boundary_agree_for_moderate_radius() {
        let g = OuterFunction::closed_form_iplus().shared();
        let d = build_composite_disc(c(0.3, -0.1), g, 4, 0.8).unwrap();
        for u in default_battery() {
            let a = pair_pushforward_boundary(&d, &u).value;
            let b = pair_pushforward_boundary_graded(&d, &u, &CurrentQuadrature::default()).value;
            assert!((a - b).abs() < 1e-10, "{}: {a} vs {b}", u.label());
        }
    }
}
