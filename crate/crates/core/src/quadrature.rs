//! Quadrature rules shared by the circle and disc integrals.
//!
//! Everything on the unit circle uses the uniform trapezoid rule, which is
//! spectrally accurate for smooth periodic integrands. Integrals over pieces
//! of the circle that end at a discontinuity use composite Gauss-Legendre
//! panels, optionally graded geometrically toward the panel ends.

use std::f64::consts::PI;

/// Uniform circle nodes θ_j = 2πj/m.
pub fn circle_angles(m: usize) -> Vec<f64> {
    (0..m).map(|j| 2.0 * PI * j as f64 / m as f64).collect()
}

/// Trapezoid mean (1/m) Σ f(θ_j) over uniform circle nodes, i.e. ∫ f dσ.
pub fn circle_mean<F: Fn(f64) -> f64>(m: usize, f: F) -> f64 {
    let h = 2.0 * PI / m as f64;
    (0..m).map(|j| f(h * j as f64)).sum::<f64>() / m as f64
}

/// Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Splits [a, b] into `panels` equal panels and returns (node, weight) pairs.
pub fn composite_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|k| {
            let lo = a + h * k as f64;
            rule.on_interval(lo, lo + h).collect::<Vec<_>>()
        })
        .collect()
}

/// Panels on [a, b] halved geometrically toward both ends, `levels` halvings
/// per side. Resolves integrands that vary on a logarithmic scale near the
/// interval ends.
pub fn graded_nodes(rule: &GaussLegendre, a: f64, b: f64, levels: usize) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut out = Vec::with_capacity(2 * (levels + 1) * rule.nodes.len());
    for (end, dir) in [(a, 1.0), (b, -1.0)] {
        let mut outer = half;
        for _ in 0..levels {
            let inner = 0.5 * outer;
            out.extend(rule.on_interval(end + dir * inner, end + dir * outer).map(|(x, w)| (x, w)));
            outer = inner;
        }
        out.extend(rule.on_interval(end, end + dir * outer));
    }
    // Intervals traversed right-to-left produce negative weights; flip them.
    for node in out.iter_mut() {
        node.1 = node.1.abs();
    }
    debug_assert!(out.iter().all(|(x, _)| (*x - mid).abs() <= half * (1.0 + 1e-12)));
    out
}

/// Panels on the segment from `end` to `other`, halved `levels` times toward
/// `end`. Weights are nonnegative whatever the orientation.
fn one_sided_graded(rule: &GaussLegendre, end: f64, other: f64, levels: usize, out: &mut Vec<(f64, f64)>) {
    let len = other - end;
    let mut outer = 1.0;
    for _ in 0..levels {
        let inner = 0.5 * outer;
        out.extend(rule.on_interval(end + len * inner, end + len * outer).map(|(x, w)| (x, w.abs())));
        outer = inner;
    }
    out.extend(rule.on_interval(end, end + len * outer).map(|(x, w)| (x, w.abs())));
}

/// [a, b] split into `panels` equal panels; the two end panels are graded
/// toward a and b respectively, the others carry one plain rule each.
pub fn graded_composite_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize, levels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(2);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity((panels + 2 * levels) * rule.nodes.len());
    one_sided_graded(rule, a, a + h, levels, &mut out);
    for k in 1..panels - 1 {
        let lo = a + h * k as f64;
        out.extend(rule.on_interval(lo, lo + h));
    }
    one_sided_graded(rule, b, b - h, levels, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // Exact up to degree 15.
        let s: f64 = rule.on_interval(0.0, 2.0).map(|(x, w)| w * x.powi(15)).sum();
        assert!((s - 2f64.powi(16) / 16.0).abs() < 1e-9);
        let total: f64 = rule.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn graded_nodes_cover_interval() {
        let rule = GaussLegendre::new(10);
        let nodes = graded_nodes(&rule, 1.0, 3.0, 40);
        let len: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((len - 2.0).abs() < 1e-13);
        // log singularity at the left end
        let s: f64 = nodes.iter().map(|(x, w)| w * (x - 1.0).ln()).sum();
        let exact = 2.0 * 2f64.ln() - 2.0;
        assert!((s - exact).abs() < 1e-12, "{s} vs {exact}");
    }

    #[test]
    fn graded_composite_handles_both_ends() {
        let rule = GaussLegendre::new(16);
        let nodes = graded_composite_nodes(&rule, 0.0, 1.0, 8, 40);
        let s: f64 = nodes.iter().map(|(x, w)| w * (x.ln() + (1.0 - x).ln())).sum();
        assert!((s + 2.0).abs() < 1e-13, "{s}");
    }

    #[test]
    fn circle_mean_of_trig_polynomial() {
        let m = circle_mean(64, |t| 1.0 + (3.0 * t).cos() + (5.0 * t).sin());
        assert!((m - 1.0).abs() < 1e-15);
    }
}
