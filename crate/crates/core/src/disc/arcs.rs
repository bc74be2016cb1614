use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::DiscError;

/// A point of the unit circle stored by its angle in [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(theta: f64) -> Self {
        Self(normalize_angle(theta))
    }

    pub fn theta(self) -> f64 {
        self.0
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.0)
    }
}

impl From<Complex64> for CirclePoint {
    fn from(z: Complex64) -> Self {
        Self::new(z.arg())
    }
}

pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Circular distance between two angles, in [0, π].
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// One arc of the circle: angles start..start+len traversed counterclockwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcSegment {
    pub start: f64,
    pub len: f64,
}

impl ArcSegment {
    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    /// Offset of `theta` from the start, measured counterclockwise in [0, 2π).
    fn offset(&self, theta: f64) -> f64 {
        (theta - self.start).rem_euclid(TAU)
    }

    pub fn contains_open(&self, theta: f64) -> bool {
        let o = self.offset(theta);
        o > 0.0 && o < self.len
    }

    pub fn contains_closed(&self, theta: f64, tol: f64) -> bool {
        let o = self.offset(theta);
        o <= self.len + tol || o >= TAU - tol
    }

    /// Euclidean distance in C from `z` to this closed arc.
    pub fn distance_from(&self, z: Complex64) -> f64 {
        let rho = z.norm();
        if rho == 0.0 {
            return 1.0;
        }
        if self.contains_closed(z.arg(), 0.0) {
            return (rho - 1.0).abs();
        }
        // |z - e^{iθ}| grows with the angular distance from arg z, so the
        // nearest point of an arc not containing arg z is an endpoint.
        let a = (z - Complex64::from_polar(1.0, self.start)).norm();
        let b = (z - Complex64::from_polar(1.0, self.end())).norm();
        a.min(b)
    }

    /// Harmonic measure of the arc seen from `z0` in the disc.
    pub fn harmonic_measure(&self, z0: Complex64) -> f64 {
        if self.len >= TAU {
            return 1.0;
        }
        let a = Complex64::from_polar(1.0, self.start) - z0;
        let b = Complex64::from_polar(1.0, self.end()) - z0;
        let swept = (b / a).arg().rem_euclid(TAU);
        swept / PI - self.len / TAU
    }

    /// Fourier coefficient ∫ χ_arc ζ^{-n} dσ of the arc indicator.
    pub fn indicator_coefficient(&self, n: i64) -> Complex64 {
        if n == 0 {
            return Complex64::new(self.len / TAU, 0.0);
        }
        let nf = n as f64;
        let e1 = Complex64::from_polar(1.0, -nf * self.start);
        let e2 = Complex64::from_polar(1.0, -nf * self.end());
        (e1 - e2) / Complex64::new(0.0, TAU * nf)
    }
}

/// A finite union of pairwise disjoint open arcs `I` of the unit circle with
/// σ(Ī) < 1. Its relative boundary E is the finite set of arc endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct ArcUnion {
    arcs: Vec<ArcSegment>,
}

impl ArcUnion {
    /// Builds the union from (θ_start, θ_end) radian pairs with θ_start < θ_end.
    pub fn new(pairs: &[(f64, f64)]) -> Result<Self, DiscError> {
        if pairs.is_empty() {
            return Err(DiscError::InvalidArcs("at least one arc is required".into()));
        }
        let mut arcs = Vec::with_capacity(pairs.len());
        for &(s, e) in pairs {
            if !(s.is_finite() && e.is_finite()) {
                return Err(DiscError::InvalidArcs("non-finite endpoint".into()));
            }
            let len = e - s;
            if len <= 0.0 || len >= TAU {
                return Err(DiscError::InvalidArcs(format!(
                    "arc ({s}, {e}) must satisfy 0 < end - start < 2π"
                )));
            }
            arcs.push(ArcSegment { start: normalize_angle(s), len });
        }
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        for pair in arcs.windows(2) {
            if pair[1].start < pair[0].end() - 1e-15 {
                return Err(DiscError::InvalidArcs("arcs overlap".into()));
            }
        }
        let last = arcs[arcs.len() - 1];
        if arcs.len() > 1 && last.end() > arcs[0].start + TAU + 1e-15 {
            return Err(DiscError::InvalidArcs("arcs overlap across 0".into()));
        }
        let total: f64 = arcs.iter().map(|a| a.len).sum();
        if total >= TAU - 1e-12 {
            return Err(DiscError::InvalidArcs("closure of the union must have measure < 1".into()));
        }
        Ok(Self { arcs })
    }

    /// I₊ = {Im ζ > 0}.
    pub fn upper_half() -> Self {
        Self { arcs: vec![ArcSegment { start: 0.0, len: PI }] }
    }

    pub fn arcs(&self) -> &[ArcSegment] {
        &self.arcs
    }

    /// σ(Ī), which equals σ(I) because E is finite.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.len).sum::<f64>() / TAU
    }

    /// The endpoint set E, sorted, with shared endpoints listed once.
    pub fn endpoints(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .arcs
            .iter()
            .flat_map(|a| [a.start, normalize_angle(a.end())])
            .collect();
        e.sort_by(f64::total_cmp);
        e.dedup_by(|a, b| angular_distance(*a, *b) < 1e-14);
        if e.len() > 1 && angular_distance(e[0], e[e.len() - 1]) < 1e-14 {
            e.pop();
        }
        e
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains_open(theta))
    }

    pub fn closure_contains(&self, theta: f64, tol: f64) -> bool {
        self.arcs.iter().any(|a| a.contains_closed(theta, tol))
    }

    /// Is `z` a point of Ī (within `tol` in modulus and angle)?
    pub fn closure_contains_point(&self, z: Complex64, tol: f64) -> bool {
        (z.norm() - 1.0).abs() <= tol && self.closure_contains(z.arg(), tol)
    }

    pub fn distance_to_endpoints(&self, theta: f64) -> f64 {
        self.endpoints()
            .into_iter()
            .map(|e| angular_distance(theta, e))
            .fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance in C from `z` to Ī.
    pub fn distance_to_closure(&self, z: Complex64) -> f64 {
        self.arcs.iter().map(|a| a.distance_from(z)).fold(f64::INFINITY, f64::min)
    }

    /// The closed arcs making up 𝕋 ∖ I. Zero-length segments appear where two
    /// arcs of I share an endpoint.
    pub fn complement(&self) -> Vec<ArcSegment> {
        let n = self.arcs.len();
        (0..n)
            .map(|k| {
                let a = self.arcs[k];
                let next = self.arcs[(k + 1) % n];
                let end = a.end();
                let mut next_start = next.start;
                while next_start < end - 1e-15 {
                    next_start += TAU;
                }
                ArcSegment { start: normalize_angle(end), len: (next_start - end).max(0.0) }
            })
            .collect()
    }

    /// Partition of the circle into the arcs of I and the non-degenerate arcs
    /// of its complement, tagged by membership in I.
    pub fn pieces(&self) -> Vec<(ArcSegment, bool)> {
        let mut out: Vec<(ArcSegment, bool)> = self.arcs.iter().map(|a| (*a, true)).collect();
        out.extend(self.complement().into_iter().filter(|c| c.len > 0.0).map(|c| (c, false)));
        out.sort_by(|a, b| a.0.start.total_cmp(&b.0.start));
        out
    }

    /// Fourier coefficient of χ_I.
    pub fn indicator_coefficient(&self, n: i64) -> Complex64 {
        self.arcs.iter().map(|a| a.indicator_coefficient(n)).sum()
    }

    /// Harmonic measure ω_𝔻(z0, I).
    pub fn harmonic_measure(&self, z0: Complex64) -> f64 {
        self.arcs.iter().map(|a| a.harmonic_measure(z0)).sum()
    }

    /// True when every arc of `self` lies inside some arc of `other`.
    pub fn is_subset_of(&self, other: &ArcUnion) -> bool {
        self.arcs.iter().all(|a| {
            other.arcs.iter().any(|b| {
                let o = (a.start - b.start).rem_euclid(TAU);
                let o = if o > TAU - 1e-12 { 0.0 } else { o };
                o + a.len <= b.len + 1e-12
            })
        })
    }
}

impl TryFrom<Vec<[f64; 2]>> for ArcUnion {
    type Error = DiscError;

    fn try_from(v: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        let pairs: Vec<(f64, f64)> = v.into_iter().map(|[a, b]| (a, b)).collect();
        ArcUnion::new(&pairs)
    }
}

impl From<ArcUnion> for Vec<[f64; 2]> {
    fn from(a: ArcUnion) -> Self {
        a.arcs.iter().map(|s| [s.start, s.end()]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_half_basics() {
        let i = ArcUnion::upper_half();
        assert_eq!(i.measure(), 0.5);
        assert_eq!(i.endpoints(), vec![0.0, PI]);
        assert!(i.contains(PI / 2.0));
        assert!(!i.contains(0.0));
        assert!(i.closure_contains(0.0, 0.0));
        assert!(!i.contains(-PI / 2.0));
        let c = i.complement();
        assert_eq!(c.len(), 1);
        assert!((c[0].start - PI).abs() < 1e-15 && (c[0].len - PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_unions() {
        assert!(ArcUnion::new(&[]).is_err());
        assert!(ArcUnion::new(&[(1.0, 0.5)]).is_err());
        assert!(ArcUnion::new(&[(0.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(ArcUnion::new(&[(0.0, PI), (PI, TAU)]).is_err());
        // shared endpoint is fine
        let u = ArcUnion::new(&[(0.0, 1.0), (1.0, 2.0)]).unwrap();
        assert_eq!(u.endpoints().len(), 3);
        assert_eq!(u.pieces().len(), 3);
    }

    #[test]
    fn wrapping_arc() {
        let u = ArcUnion::new(&[(-0.5, 0.5)]).unwrap();
        assert!(u.contains(0.0));
        assert!(u.contains(TAU - 0.1));
        assert!(!u.contains(1.0));
        let e = u.endpoints();
        assert!((e[0] - 0.5).abs() < 1e-15 && (e[1] - (TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn arc_harmonic_measure_matches_quadrature() {
        let arc = ArcSegment { start: 0.3, len: 2.2 };
        for z0 in [Complex64::new(0.0, 0.0), Complex64::new(0.4, -0.3), Complex64::new(-0.6, 0.5)] {
            let m = 200_000;
            let mut s = 0.0;
            for j in 0..m {
                let t = arc.start + arc.len * (j as f64 + 0.5) / m as f64;
                let d = (Complex64::from_polar(1.0, t) - z0).norm_sqr();
                s += (1.0 - z0.norm_sqr()) / d;
            }
            let quad = s * arc.len / m as f64 / TAU;
            assert!((quad - arc.harmonic_measure(z0)).abs() < 1e-9);
        }
    }

    #[test]
    fn serde_round_trip() {
        let u = ArcUnion::new(&[(0.0, 1.0), (2.0, 3.0)]).unwrap();
        let s = serde_json::to_string(&u).unwrap();
        assert_eq!(s, "[[0.0,1.0],[2.0,3.0]]");
        let back: ArcUnion = serde_json::from_str(&s).unwrap();
        assert_eq!(back, u);
        assert!(serde_json::from_str::<ArcUnion>("[[1.0,0.0]]").is_err());
    }

    #[test]
    fn subset_relation() {
        let big = ArcUnion::new(&[(0.0, 2.0)]).unwrap();
        let small = ArcUnion::new(&[(0.5, 1.5)]).unwrap();
        assert!(small.is_subset_of(&big));
        assert!(!big.is_subset_of(&small));
    }
}
