use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::averaging::{pushforward_power_moments, weak_gap, CircleMeasure};
use crate::currents::{
    default_battery, harmonic_measure_side, jensen_pair, pair_limit_current, pair_pushforward_area,
    pair_pushforward_boundary, TestFunction, DEFAULT_FD_STEP,
};
use crate::disc::{build_outer_function, circle_moments, green_function, mobius, ArcUnion, OuterFunction};
use crate::hull::{find_certificate, hull_distance, sample_set, verify_certificate, ExampleSet, Point2, HULL_TOL};
use crate::poletsky::build_linear_disc;
use crate::winding::{obstruction_demo, winding_number, zero_count_via_boundary, TubeSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> SelfTestCheck {
    SelfTestCheck { name: name.to_string(), pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_disc_point(rng: &mut ChaCha8Rng, rmax: f64) -> Complex64 {
    Complex64::from_polar(rmax * rng.gen::<f64>().sqrt(), TAU * rng.gen::<f64>())
}

fn mobius_checks(rng: &mut ChaCha8Rng) -> SelfTestCheck {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let z0 = random_disc_point(rng, 0.9);
        let z = random_disc_point(rng, 0.95);
        let back = mobius(z0, mobius(z0, z).unwrap()).unwrap();
        worst = worst.max((back - z).norm());
        let t = Complex64::from_polar(1.0, TAU * rng.gen::<f64>());
        worst = worst.max((mobius(z0, t).unwrap().norm() - 1.0).abs());
    }
    check("Mobius involution and |phi| = 1 on the circle", worst < 1e-12, format!("max error {worst:.2e}"))
}

fn green_symmetry(rng: &mut ChaCha8Rng) -> SelfTestCheck {
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let a = random_disc_point(rng, 0.9);
        let b = random_disc_point(rng, 0.9);
        if (a - b).norm() < 1e-6 {
            continue;
        }
        let (gab, gba) = (green_function(a, b).unwrap(), green_function(b, a).unwrap());
        worst = worst.max((gab - gba).abs() / gab.abs().max(1.0));
    }
    check("Green function symmetry", worst < 1e-12, format!("max relative error {worst:.2e}"))
}

fn outer_modulus(rng: &mut ChaCha8Rng) -> SelfTestCheck {
    let closed = OuterFunction::closed_form_iplus();
    let arcs = ArcUnion::new(&[(0.3, 1.4), (2.5, 4.0)]).unwrap();
    let fourier = build_outer_function(&arcs, 512).unwrap();
    let mut max_inside = 0.0f64;
    for _ in 0..200 {
        let z = random_disc_point(rng, 0.9);
        max_inside = max_inside.max(closed.eval(z).unwrap().norm()).max(fourier.eval(z).unwrap().norm());
    }
    let center = (closed.eval(c(0.0, 0.0)).unwrap().norm() - (-0.5f64).exp()).abs();
    check(
        "|g| < 1 in the disc, |g(0)| = exp(-1/2) for I+",
        max_inside < 1.0 && center < 1e-12,
        format!("max |g| on samples {max_inside:.6}, center error {center:.1e}"),
    )
}

fn moment_symmetry() -> SelfTestCheck {
    let m = 1024;
    let samples: Vec<f64> = (0..m)
        .map(|j| {
            let t = TAU * j as f64 / m as f64;
            1.0 + 0.5 * (3.0 * t).cos() + 0.2 * (t + 0.4).sin()
        })
        .collect();
    let s = circle_moments(&samples, 64).unwrap();
    let worst = (1..=64).map(|n| (s.coeff(n) - s.coeff(-n).conj()).norm()).fold(0.0, f64::max);
    check("moments of a real density are conjugate symmetric", worst < 1e-14, format!("max defect {worst:.2e}"))
}

fn hull_contains_set() -> SelfTestCheck {
    let arcs = ArcUnion::new(&[(0.0, 1.0), (2.0, 3.5)]).unwrap();
    let mut worst = 0.0f64;
    for set in [ExampleSet::k(arcs), ExampleSet::K2] {
        for p in sample_set(&set, 256) {
            worst = worst.max(hull_distance(&set, &p).unwrap());
        }
    }
    check("K lies in its hull", worst <= HULL_TOL, format!("max hull distance of samples {worst:.2e}"))
}

fn hull_monotone(rng: &mut ChaCha8Rng) -> SelfTestCheck {
    let small = ExampleSet::k(ArcUnion::new(&[(0.5, 1.5)]).unwrap());
    let big = ExampleSet::k(ArcUnion::new(&[(0.2, 2.0)]).unwrap());
    let mut ok = true;
    for _ in 0..300 {
        let p = Point2::new(random_disc_point(rng, 1.3), random_disc_point(rng, 1.3));
        ok &= hull_distance(&big, &p).unwrap() <= hull_distance(&small, &p).unwrap() + 1e-12;
    }
    check("hull distance is monotone under nested arcs", ok, "300 random points".into())
}

fn certificate_soundness() -> SelfTestCheck {
    let arcs = ArcUnion::upper_half();
    let p = Point2::new(c(0.0, -1.0), c(0.9, 0.0));
    match find_certificate(&arcs, &p, 4).and_then(|cert| {
        verify_certificate(&cert, &ExampleSet::k(arcs.clone()), 2000).map(|r| (cert.margin, r.worst_value))
    }) {
        Ok((margin, worst)) => check(
            "certificate for (-i, 0.9) is sound",
            margin >= 1.27 && worst <= 1.0 + 1e-9,
            format!("margin {margin:.6}, max |Q| on K {worst:.9}"),
        ),
        Err(e) => check("certificate for (-i, 0.9) is sound", false, e.to_string()),
    }
}

fn winding_invariance() -> SelfTestCheck {
    let n = 400;
    let curve: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            Complex64::from_polar(1.0 + 0.3 * (3.0 * t).cos(), 2.0 * t)
        })
        .collect();
    let base = winding_number(&curve, c(0.0, 0.0)).unwrap();
    let mut refined = Vec::new();
    for k in 0..n {
        refined.push(curve[k]);
        refined.push(0.5 * (curve[k] + curve[(k + 1) % n]));
    }
    let mut shifted = curve.clone();
    shifted.rotate_left(37);
    let mut reversed = curve.clone();
    reversed.reverse();
    let r = winding_number(&refined, c(0.0, 0.0)).unwrap();
    let s = winding_number(&shifted, c(0.0, 0.0)).unwrap();
    let v = winding_number(&reversed, c(0.0, 0.0)).unwrap();
    check(
        "winding invariant under refinement and shift, negated by reversal",
        base == 2 && r == 2 && s == 2 && v == -2,
        format!("{base}, refined {r}, shifted {s}, reversed {v}"),
    )
}

fn zero_count() -> SelfTestCheck {
    let f = |z: Complex64| z * z * (z - 0.5);
    let g = |z: Complex64| z - 0.3;
    let product = |z: Complex64| f(z) * g(z);
    let counts = (
        zero_count_via_boundary(f, c(0.0, 0.0), 2048),
        zero_count_via_boundary(g, c(0.0, 0.0), 2048),
        zero_count_via_boundary(product, c(0.0, 0.0), 2048),
    );
    match counts {
        (Ok(a), Ok(b), Ok(ab)) => {
            check("zero count is additive over products", a == 3 && b == 1 && ab == 4, format!("{a} + {b} = {ab}"))
        }
        _ => check("zero count is additive over products", false, format!("{counts:?}")),
    }
}

fn pairing_linearity() -> SelfTestCheck {
    let battery = default_battery();
    let disc = build_linear_disc(c(0.3, 0.1), c(1.0, 0.0), c(0.5, 0.5)).unwrap();
    let (u, v) = (&battery[3], &battery[8]);
    let combo = TestFunction::linear_combination(&[(2.0, u.clone()), (-0.7, v.clone())]);
    let lhs = pair_pushforward_boundary(&disc, &combo).value;
    let rhs = 2.0 * pair_pushforward_boundary(&disc, u).value - 0.7 * pair_pushforward_boundary(&disc, v).value;
    let err = (lhs - rhs).abs();
    check("pairings are linear in the test function", err < 1e-12, format!("defect {err:.2e}"))
}

fn mass_conservation() -> SelfTestCheck {
    let one = &default_battery()[0];
    let arcs = ArcUnion::new(&[(0.4, 2.0)]).unwrap();
    let mass = jensen_pair(c(0.2, -0.3), &arcs, one).unwrap();
    let mu = CircleMeasure::poisson(c(0.4, 0.2), 256).unwrap();
    let pushed = pushforward_power_moments(&mu, 3, 2).unwrap().into_iter().find(|r| r.k == 0).unwrap().re;
    let err = (mass - 1.0).abs().max((pushed - 1.0).abs());
    check("probability measures keep mass 1", err < 1e-8, format!("max mass error {err:.2e}"))
}

fn green_riesz() -> SelfTestCheck {
    let battery = default_battery();
    let disc = build_linear_disc(c(0.3, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap();
    let mut worst = 0.0f64;
    for u in &battery {
        let area = pair_pushforward_area(&disc, u, DEFAULT_FD_STEP).map(|r| r.value).unwrap_or(f64::INFINITY);
        worst = worst.max((area - harmonic_measure_side(c(0.3, 0.0), c(1.0, 0.0), c(1.0, 0.0), u, 4096)).abs());
    }
    check("Green-Riesz identity on the diagonal disc", worst < 1e-6, format!("max error {worst:.2e}"))
}

fn averaging() -> SelfTestCheck {
    let mu = CircleMeasure::trig_polynomial(&[c(1.0, 0.0), c(0.5, 0.0)], 512);
    let exact = (2..=64).all(|nu| weak_gap(&mu, nu, 8).unwrap() == 0.0);
    let poisson = CircleMeasure::poisson(c(0.4, 0.0), 256).unwrap();
    let m1 = pushforward_power_moments(&poisson, 8, 1).unwrap().into_iter().find(|r| r.k == 1).unwrap().abs;
    let err = (m1 - 0.4f64.powi(8)).abs();
    check(
        "averaging: 1 + cos has zero gap, Poisson moment decays geometrically",
        exact && err < 1e-12,
        format!("exact zero gaps {exact}, |m_1 - 0.4^8| = {err:.1e}"),
    )
}

fn limit_identity() -> SelfTestCheck {
    let arcs = ArcUnion::upper_half();
    let z0 = c(0.1, 0.2);
    let mut ok = true;
    for u in &default_battery() {
        let t = pair_limit_current(z0, &arcs, u).unwrap().value;
        let s = jensen_pair(z0, &arcs, u).unwrap();
        ok &= t - (s - u.eval(&Point2::new(z0, c(0.0, 0.0)))) == 0.0;
    }
    check("dd^c T = sigma~ - delta_p on the battery", ok, "exact on shared nodes".into())
}

fn obstruction(seed: u64) -> SelfTestCheck {
    let spec = TubeSpec::new(ExampleSet::K1, 0.2).unwrap();
    match obstruction_demo(&spec, c(0.0, 0.0), 40, seed) {
        Ok(r) => check(
            "tube curves around K1 do not wind around 0",
            r.histogram.len() == 1 && r.histogram.get(&0) == Some(&40),
            format!("{:?}", r.histogram),
        ),
        Err(e) => check("tube curves around K1 do not wind around 0", false, e.to_string()),
    }
}

fn pushforward_identity() -> SelfTestCheck {
    let m = 2048;
    let z0 = c(0.5, 0.2);
    let omega = CircleMeasure::poisson(z0, 64).unwrap();
    let mut worst = 0.0f64;
    for k in 1..=16i32 {
        let pushed: Complex64 = (0..m)
            .map(|j| mobius(z0, Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)).unwrap().powi(k))
            .sum::<Complex64>()
            / m as f64;
        worst = worst.max((pushed - omega.coefficients().coeff(-(k as i64))).norm());
    }
    check("Mobius pushforward of sigma is harmonic measure", worst < 1e-10, format!("max error {worst:.1e}"))
}

/// All checks, in a fixed order. Random inputs come from `seed`.
pub fn run_selftest_checks(seed: u64) -> Vec<SelfTestCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        mobius_checks(&mut rng),
        green_symmetry(&mut rng),
        outer_modulus(&mut rng),
        moment_symmetry(),
        hull_contains_set(),
        hull_monotone(&mut rng),
        certificate_soundness(),
        winding_invariance(),
        zero_count(),
        pairing_linearity(),
        mass_conservation(),
        green_riesz(),
        averaging(),
        limit_identity(),
        obstruction(seed),
        pushforward_identity(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_checks_pass() {
        for c in run_selftest_checks(42) {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }
}
