//! Poletsky disc families for K(I): the vertical discs over Ī and the
//! composites f_ν = f̃_ν ∘ τ_ν ∘ φ_{z0} with f̃_ν(ζ) = (ζ, g(ζ)^ν) and
//! τ_ν(ζ) = r_ν ζ, together with the radius schedule and the checks of the
//! Poletsky conditions.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::disc::{OuterFunction, OuterMethod, TAU_E};
use crate::hull::{hull_distance, set_distance, ExampleSet, HullError, Point2};
use crate::quadrature::circle_angles;

/// Largest exponent j tried for r = 1 - 2^{-j}.
pub const MAX_RADIUS_EXPONENT: u32 = 40;

pub const DEFAULT_BOUNDARY_GRID: usize = 8192;
pub const DEFAULT_INTERIOR_GRID: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoletskyError {
    #[error("vertical disc requested over {0}, which is not a point of the closed arcs")]
    NotInArc(Complex64),
    #[error("no radius 1 - 2^-j with j <= 40 meets the schedule criterion at nu = {nu}")]
    ScheduleExhausted { nu: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Hull(#[from] HullError),
}

#[derive(Debug, Clone)]
pub enum DiscKind {
    /// ξ ↦ (z0, ξ).
    Vertical,
    /// ξ ↦ (rξ, g(rξ)^ν).
    Composite { g: Arc<OuterFunction> },
    /// ξ ↦ (a·rξ, b·rξ).
    Linear { a: Complex64, b: Complex64 },
}

/// A holomorphic disc written as f = F ∘ φ_c with an outer map F on 𝔻̄ and
/// the Möbius involution φ_c, so f(0) = F(c).
#[derive(Debug, Clone)]
pub struct DiscMap {
    pub z0: Complex64,
    pub nu: u32,
    pub r: f64,
    /// Center of the Möbius reparameterization.
    pub center: Complex64,
    pub kind: DiscKind,
}

fn mobius_unchecked(c: Complex64, zeta: Complex64) -> Complex64 {
    (c - zeta) / (1.0 - c.conj() * zeta)
}

impl DiscMap {
    /// F(ξ), the disc before reparameterization.
    pub fn outer_map(&self, xi: Complex64) -> Point2 {
        match &self.kind {
            DiscKind::Vertical => Point2::new(self.z0, xi),
            DiscKind::Composite { g } => {
                let x = xi * self.r;
                Point2::new(x, g.eval_unchecked(x).powu(self.nu))
            }
            DiscKind::Linear { a, b } => {
                let x = xi * self.r;
                Point2::new(a * x, b * x)
            }
        }
    }

    pub fn eval(&self, zeta: Complex64) -> Point2 {
        self.outer_map(mobius_unchecked(self.center, zeta))
    }

    pub fn outer_function(&self) -> Option<&OuterFunction> {
        match &self.kind {
            DiscKind::Composite { g } => Some(g),
            _ => None,
        }
    }

    pub fn is_composite(&self) -> bool {
        matches!(self.kind, DiscKind::Composite { .. })
    }
}

/// The disc ζ ↦ (z0, ζ) over a point z0 of Ī.
pub fn build_vertical_disc(arcs: &crate::disc::ArcUnion, z0: Complex64) -> Result<DiscMap, PoletskyError> {
    build_vertical_disc_at(arcs, &Point2::new(z0, Complex64::new(0.0, 0.0)))
}

/// The same disc {z0}×𝔻̄ reparameterized by φ_{w0}, so that f(0) = p.
pub fn build_vertical_disc_at(arcs: &crate::disc::ArcUnion, p: &Point2) -> Result<DiscMap, PoletskyError> {
    if !arcs.closure_contains_point(p.z, 1e-12) {
        return Err(PoletskyError::NotInArc(p.z));
    }
    if p.w.norm() >= 1.0 {
        return Err(PoletskyError::InvalidArgument(format!("|w0| = {} is not below 1", p.w.norm())));
    }
    Ok(DiscMap { z0: p.z, nu: 1, r: 1.0, center: p.w, kind: DiscKind::Vertical })
}

/// ζ ↦ (r φ_{z0}(ζ), g(r φ_{z0}(ζ))^ν).
pub fn build_composite_disc(
    z0: Complex64,
    g: Arc<OuterFunction>,
    nu: u32,
    r: f64,
) -> Result<DiscMap, PoletskyError> {
    if z0.norm() >= 1.0 {
        return Err(PoletskyError::InvalidArgument(format!("{z0} is not in the open disc")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(PoletskyError::InvalidArgument(format!("radius {r} is not in (0, 1)")));
    }
    if nu == 0 {
        return Err(PoletskyError::InvalidArgument("nu must be at least 1".into()));
    }
    Ok(DiscMap { z0, nu, r, center: z0, kind: DiscKind::Composite { g } })
}

/// ζ ↦ (a φ_{z0}(ζ), b φ_{z0}(ζ)); with a = 1, b = 0 this is the embedding
/// of the disc in the z-line recentered at z0.
pub fn build_linear_disc(z0: Complex64, a: Complex64, b: Complex64) -> Result<DiscMap, PoletskyError> {
    if z0.norm() >= 1.0 {
        return Err(PoletskyError::InvalidArgument(format!("{z0} is not in the open disc")));
    }
    Ok(DiscMap { z0, nu: 1, r: 1.0, center: z0, kind: DiscKind::Linear { a, b } })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    pub nu: usize,
    pub r: f64,
    pub exponent: u32,
    pub eps_nu: f64,
    pub delta_nu: f64,
    /// sup over L_ν of |g(rζ) - g(ζ)| at the chosen r.
    pub sup_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusSchedule {
    pub eps: f64,
    pub grid: usize,
    /// Entry ν - 1 belongs to ν.
    pub entries: Vec<ScheduleEntry>,
}

impl RadiusSchedule {
    pub fn nu_max(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, nu: usize) -> Option<&ScheduleEntry> {
        nu.checked_sub(1).and_then(|k| self.entries.get(k))
    }

    pub fn radius(&self, nu: usize) -> Option<f64> {
        self.entry(nu).map(|e| e.r)
    }
}

/// Exclusion threshold defining L_ν = {ζ ∈ 𝕋 : dist(ζ, E) ≥ threshold}. The
/// Fourier route additionally excludes its Gibbs zone of width τ_E.
pub fn compact_threshold(g: &OuterFunction, nu: usize) -> f64 {
    let t = 1.0 / nu as f64;
    match g.method() {
        OuterMethod::Fourier => t.max(TAU_E),
        OuterMethod::ClosedFormIplus => t,
    }
}

struct GapTable {
    /// Grid indices sorted by decreasing distance to E.
    dist_sorted: Vec<f64>,
    order: Vec<usize>,
    boundary: Vec<Complex64>,
}

impl GapTable {
    fn new(g: &OuterFunction, grid: usize) -> Self {
        let th = circle_angles(grid);
        let dist: Vec<f64> = th.iter().map(|&t| g.arcs().distance_to_endpoints(t)).collect();
        let mut order: Vec<usize> = (0..grid).collect();
        order.sort_by(|&a, &b| dist[b].total_cmp(&dist[a]));
        let dist_sorted = order.iter().map(|&k| dist[k]).collect();
        Self { dist_sorted, order, boundary: g.eval_on_circle(1.0, grid) }
    }

    /// Prefix maxima of |g(rζ) - g(ζ)| in the distance order.
    fn prefix_max(&self, g: &OuterFunction, r: f64) -> Vec<f64> {
        let vals = g.eval_on_circle(r, self.boundary.len());
        let mut acc = 0.0f64;
        self.order
            .iter()
            .map(|&k| {
                acc = acc.max((vals[k] - self.boundary[k]).norm());
                acc
            })
            .collect()
    }

    fn sup_over(&self, prefix: &[f64], threshold: f64) -> f64 {
        let count = self.dist_sorted.partition_point(|&d| d >= threshold);
        if count == 0 {
            0.0
        } else {
            prefix[count - 1]
        }
    }
}

/// sup over the grid points of L_ν of |g(rζ) - g(ζ)|.
pub fn compact_sup_gap(g: &OuterFunction, nu: usize, r: f64, grid: usize) -> f64 {
    let table = GapTable::new(g, grid);
    let prefix = table.prefix_max(g, r);
    table.sup_over(&prefix, compact_threshold(g, nu))
}

pub fn select_radius_schedule(g: &OuterFunction, nu_max: usize, eps: f64) -> Result<RadiusSchedule, PoletskyError> {
    select_radius_schedule_on_grid(g, nu_max, eps, DEFAULT_BOUNDARY_GRID)
}

/// For ν = 1..=nu_max, the smallest r = 1 - 2^{-j} (j ≥ the previous ν's j)
/// with sup_{L_ν} |g(rζ) - g(ζ)| < δ_ν, where ε_ν = eps/ν and δ_ν = ε_ν/ν.
pub fn select_radius_schedule_on_grid(
    g: &OuterFunction,
    nu_max: usize,
    eps: f64,
    grid: usize,
) -> Result<RadiusSchedule, PoletskyError> {
    if nu_max == 0 || !(eps > 0.0) || grid < 16 {
        return Err(PoletskyError::InvalidArgument(format!(
            "schedule needs nu_max >= 1, eps > 0 and a grid of at least 16 points (got {nu_max}, {eps}, {grid})"
        )));
    }
    let table = GapTable::new(g, grid);
    let prefixes: Vec<Vec<f64>> = (1..=MAX_RADIUS_EXPONENT)
        .into_par_iter()
        .map(|j| table.prefix_max(g, 1.0 - 0.5f64.powi(j as i32)))
        .collect();
    let mut entries = Vec::with_capacity(nu_max);
    let mut j_min = 1u32;
    for nu in 1..=nu_max {
        let eps_nu = eps / nu as f64;
        let delta_nu = eps_nu / nu as f64;
        let threshold = compact_threshold(g, nu);
        let found = (j_min..=MAX_RADIUS_EXPONENT)
            .map(|j| (j, table.sup_over(&prefixes[j as usize - 1], threshold)))
            .find(|&(_, gap)| gap < delta_nu);
        let (j, sup_gap) = found.ok_or(PoletskyError::ScheduleExhausted { nu })?;
        j_min = j;
        entries.push(ScheduleEntry { nu, r: 1.0 - 0.5f64.powi(j as i32), exponent: j, eps_nu, delta_nu, sup_gap });
    }
    Ok(RadiusSchedule { eps, grid, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoletskyReport {
    pub nu: u32,
    pub r: f64,
    pub center_gap: f64,
    pub hull_excess: f64,
    pub bad_measure: f64,
}

pub fn verify_poletsky(disc: &DiscMap, set: &ExampleSet, p: &Point2, rho_u: f64) -> Result<PoletskyReport, PoletskyError> {
    verify_poletsky_on_grid(disc, set, p, rho_u, DEFAULT_BOUNDARY_GRID, DEFAULT_INTERIOR_GRID)
}

/// Center gap |f(0) - p|, hull excess max dist(f(ζ), K̂) over the boundary
/// grid and a polar interior grid, and the fraction of boundary nodes with
/// dist(f(ζ), K) > ρ_U.
pub fn verify_poletsky_on_grid(
    disc: &DiscMap,
    set: &ExampleSet,
    p: &Point2,
    rho_u: f64,
    boundary: usize,
    interior: usize,
) -> Result<PoletskyReport, PoletskyError> {
    if !(rho_u > 0.0) {
        return Err(PoletskyError::InvalidArgument(format!("rho_U = {rho_u} must be positive")));
    }
    let center_gap = disc.eval(Complex64::new(0.0, 0.0)).dist(p);
    let bpts: Vec<Point2> = circle_angles(boundary)
        .into_par_iter()
        .map(|t| disc.eval(Complex64::from_polar(1.0, t)))
        .collect();
    let bad = bpts.par_iter().filter(|q| set_distance(set, q) > rho_u).count();
    let mut excess = bpts
        .par_iter()
        .map(|q| hull_distance(set, q))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    let interior_excess = (0..interior)
        .into_par_iter()
        .map(|a| {
            let rho = a as f64 / interior as f64;
            circle_angles(interior)
                .into_iter()
                .map(|t| hull_distance(set, &disc.eval(Complex64::from_polar(rho, t))))
                .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    excess = excess.max(interior_excess);
    Ok(PoletskyReport {
        nu: disc.nu,
        r: disc.r,
        center_gap,
        hull_excess: excess,
        bad_measure: bad as f64 / boundary as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::disc::{build_outer_function, ArcUnion};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn g_closed() -> Arc<OuterFunction> {
        OuterFunction::closed_form_iplus().shared()
    }

    #[test]
    fn vertical_disc_examples() {
        let arcs = ArcUnion::upper_half();
        let d = build_vertical_disc(&arcs, c(0.0, 1.0)).unwrap();
        let q = d.eval(c(1.0, 0.0));
        assert_eq!(q.z, c(0.0, 1.0));
        // φ_0(ζ) = -ζ, so the boundary is still {z0}×𝕋
        assert!((q.w.norm() - 1.0).abs() < 1e-15);
        assert_eq!(d.eval(c(0.0, 0.0)), Point2::new(c(0.0, 1.0), c(0.0, 0.0)));
        let set = ExampleSet::k(arcs.clone());
        let rep = verify_poletsky(&d, &set, &Point2::new(c(0.0, 1.0), c(0.0, 0.0)), 0.05).unwrap();
        assert_eq!(rep.bad_measure, 0.0);
        assert!(rep.hull_excess <= 1e-15);
        assert!(matches!(build_vertical_disc(&arcs, c(0.0, -1.0)), Err(PoletskyError::NotInArc(_))));
    }

    #[test]
    fn composite_at_origin() {
        let d = build_composite_disc(c(0.0, 0.0), g_closed(), 3, 0.7).unwrap();
        let zeta = c(0.3, -0.5);
        assert_eq!(d.eval(zeta).z, -zeta * 0.7);
        let center = d.eval(c(0.0, 0.0));
        assert!((center.w.norm() - (-1.5f64).exp()).abs() < 1e-14);
        for t in circle_angles(64) {
            assert!((d.eval(Complex64::from_polar(1.0, t)).z.norm() - 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn composite_modulus_near_one_over_i() {
        let d = build_composite_disc(c(0.0, 0.0), g_closed(), 1, 1.0 - 1e-9).unwrap();
        // φ_0(-i) = i ∈ I₊
        assert!((d.eval(c(0.0, -1.0)).w.norm() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn schedule_is_monotone_and_reverifies() {
        let g = g_closed();
        let s = select_radius_schedule(&g, 16, 0.1).unwrap();
        assert!(s.entries.windows(2).all(|w| w[0].r <= w[1].r));
        let e = s.entry(16).unwrap();
        let fine = compact_sup_gap(&g, 16, e.r, 2 * DEFAULT_BOUNDARY_GRID);
        assert!(fine < e.delta_nu, "{fine} vs {}", e.delta_nu);
        assert!(s.entry(1).unwrap().r >= 0.5);
    }

    #[test]
    fn schedule_for_fourier_outer_function() {
        let g = build_outer_function(&ArcUnion::upper_half(), 1024).unwrap();
        let s = select_radius_schedule(&g, 8, 0.1).unwrap();
        assert!(s.entries.iter().all(|e| e.sup_gap < e.delta_nu));
    }

    #[test]
    fn composite_images_stay_in_the_bidisc() {
        let g = build_outer_function(&ArcUnion::new(&[(0.3, 1.2), (2.0, 3.5)]).unwrap(), 512).unwrap().shared();
        let d = build_composite_disc(c(0.2, -0.1), g, 5, 0.999).unwrap();
        for rho in [0.0, 0.5, 0.9, 1.0] {
            for t in circle_angles(256) {
                let q = d.eval(Complex64::from_polar(rho, t));
                assert!(q.z.norm() <= 1.0 + 1e-12 && q.w.norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn bad_measure_is_monotone_in_rho() {
        let g = g_closed();
        let d = build_composite_disc(c(0.0, 0.0), g, 8, 0.99).unwrap();
        let set = ExampleSet::k(ArcUnion::upper_half());
        let p = Point2::origin();
        let mut last = f64::INFINITY;
        for rho in [0.01, 0.02, 0.05, 0.1, 0.2] {
            let rep = verify_poletsky_on_grid(&d, &set, &p, rho, 2048, 16).unwrap();
            assert!(rep.bad_measure <= last);
            last = rep.bad_measure;
        }
    }
}
