//! The outer function g = e^{u+iv} with u = -P[χ_{𝕋∖Ī}].
//!
//! Two constructions are provided. The Fourier route works for any arc
//! union: it takes the exact Fourier coefficients of the arc indicators,
//! damps them with the Jackson kernel and sums the power series of u + iv.
//! The Jackson kernel is positive, so the smoothed boundary data stays in
//! [-1, 0] and |g| ≤ 1 holds on the whole closed disc. For I = I₊ there is
//! also a closed form.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{ArcUnion, DiscError, TAU_E};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterMethod {
    Fourier,
    ClosedFormIplus,
}

#[derive(Debug, Clone)]
pub struct OuterFunction {
    arcs: ArcUnion,
    method: OuterMethod,
    endpoints: Vec<Complex64>,
    /// Power-series coefficients of log g = u + iv (Fourier route only).
    log_coeffs: Vec<Complex64>,
}

/// Jackson damping factors for a series truncated at `order`.
fn jackson_factors(order: usize) -> Vec<f64> {
    let n1 = (order + 1) as f64;
    let q = PI / n1;
    let cot = 1.0 / q.tan();
    (0..=order)
        .map(|k| {
            let kf = k as f64;
            ((n1 - kf) * (q * kf).cos() + (q * kf).sin() * cot) / n1
        })
        .collect()
}

/// Builds g for the arc union `arcs` from its indicator series truncated at
/// `order` (at least 64).
pub fn build_outer_function(arcs: &ArcUnion, order: usize) -> Result<OuterFunction, DiscError> {
    if order < 64 {
        return Err(DiscError::InvalidArgument(format!("truncation order {order} < 64")));
    }
    let damp = jackson_factors(order);
    // u = -(1 - χ_I): u_0 = σ(I) - 1, u_n = (χ_I)_n for n ≠ 0.
    // log g = u_0 + 2 Σ_{n≥1} u_n z^n has real part P[u] and vanishing
    // imaginary part at 0.
    let mut log_coeffs = Vec::with_capacity(order + 1);
    log_coeffs.push(Complex64::new(arcs.measure() - 1.0, 0.0));
    for (n, d) in damp.iter().enumerate().skip(1) {
        log_coeffs.push(arcs.indicator_coefficient(n as i64) * (2.0 * d));
    }
    Ok(OuterFunction::with_method(arcs.clone(), OuterMethod::Fourier, log_coeffs))
}

/// Closed form for I₊: exp((i/π)·Log(i(1-ζ)/(1+ζ))) with arg Log ∈ [0, π]
/// on the closed disc. This branch gives |g(0)| = e^{-1/2}, |g| = 1 on I₊
/// and |g| = e^{-1} on the lower half circle. The exponent -i/π with the
/// same branch would give |g| > 1 inside the disc.
pub fn g_closed_form_iplus(zeta: Complex64) -> Result<Complex64, DiscError> {
    if (zeta + 1.0).norm() <= 1e-14 || (zeta - 1.0).norm() <= 1e-14 {
        return Err(DiscError::BranchPole { at: zeta });
    }
    Ok(closed_form_unchecked(zeta))
}

fn closed_form_unchecked(zeta: Complex64) -> Complex64 {
    let w = Complex64::new(0.0, 1.0) * (1.0 - zeta) / (1.0 + zeta);
    let mut arg = w.im.atan2(w.re);
    // Branch cut along the negative imaginary axis, which is only reached
    // from |ζ| > 1. Boundary values are the limits from inside the disc.
    if arg < -PI / 2.0 {
        arg += 2.0 * PI;
    }
    let log_abs = w.norm().ln();
    Complex64::from_polar((-arg / PI).exp(), log_abs / PI)
}

impl OuterFunction {
    fn with_method(arcs: ArcUnion, method: OuterMethod, log_coeffs: Vec<Complex64>) -> Self {
        let endpoints = arcs.endpoints().into_iter().map(|t| Complex64::from_polar(1.0, t)).collect();
        Self { arcs, method, endpoints, log_coeffs }
    }

    pub fn closed_form_iplus() -> Self {
        Self::with_method(ArcUnion::upper_half(), OuterMethod::ClosedFormIplus, Vec::new())
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn arcs(&self) -> &ArcUnion {
        &self.arcs
    }

    pub fn method(&self) -> OuterMethod {
        self.method
    }

    pub fn truncation_order(&self) -> Option<usize> {
        match self.method {
            OuterMethod::Fourier => Some(self.log_coeffs.len() - 1),
            OuterMethod::ClosedFormIplus => None,
        }
    }

    /// Euclidean distance from `z` to the endpoint set E.
    pub fn distance_to_e(&self, z: Complex64) -> f64 {
        self.endpoints.iter().map(|e| (z - e).norm()).fold(f64::INFINITY, f64::min)
    }

    /// g(z) for |z| ≤ 1, refusing points where the representation is not
    /// trustworthy: the Gibbs region within τ_E of E for the Fourier route,
    /// the branch poles ±1 for the closed form.
    pub fn eval(&self, z: Complex64) -> Result<Complex64, DiscError> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(DiscError::InvalidArgument(format!("g evaluated outside the closed disc at {z}")));
        }
        match self.method {
            OuterMethod::Fourier => {
                let d = self.distance_to_e(z);
                if d < TAU_E {
                    return Err(DiscError::TruncationError { distance: d });
                }
                Ok(self.eval_unchecked(z))
            }
            OuterMethod::ClosedFormIplus => g_closed_form_iplus(z),
        }
    }

    /// g(z) without the E-proximity guard. For the Fourier route this is the
    /// entire function exp(Σ c_n z^n), for the closed form the analytic
    /// continuation across 𝕋 ∖ {±1}.
    pub fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        match self.method {
            OuterMethod::Fourier => self.log_g(z).exp(),
            OuterMethod::ClosedFormIplus => closed_form_unchecked(z),
        }
    }

    fn log_g(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.log_coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// |g| at e^{iθ}, subject to the same guard as [`Self::eval`].
    pub fn boundary_modulus(&self, theta: f64) -> Result<f64, DiscError> {
        self.eval(Complex64::from_polar(1.0, theta)).map(|g| g.norm())
    }

    /// g at the m uniform points radius·e^{2πij/m}, unchecked. The Fourier
    /// route folds the power series modulo m and uses one inverse FFT.
    pub fn eval_on_circle(&self, radius: f64, m: usize) -> Vec<Complex64> {
        match self.method {
            OuterMethod::Fourier => {
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                let mut rn = 1.0;
                for (n, c) in self.log_coeffs.iter().enumerate() {
                    buf[n % m] += c * rn;
                    rn *= radius;
                }
                FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
                buf.into_iter().map(|x| x.exp()).collect()
            }
            OuterMethod::ClosedFormIplus => (0..m)
                .map(|j| {
                    let t = 2.0 * PI * j as f64 / m as f64;
                    closed_form_unchecked(Complex64::from_polar(radius, t))
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fourier_iplus() -> OuterFunction {
        build_outer_function(&ArcUnion::upper_half(), 4096).unwrap()
    }

    #[test]
    fn closed_form_center_value() {
        let g0 = g_closed_form_iplus(Complex64::new(0.0, 0.0)).unwrap();
        assert!((g0.norm() - (-0.5f64).exp()).abs() < 1e-15);
        assert!(g0.im.abs() < 1e-15);
    }

    #[test]
    fn closed_form_boundary_moduli() {
        let top = g_closed_form_iplus(Complex64::new(0.0, 1.0)).unwrap();
        assert!((top.norm() - 1.0).abs() < 1e-15);
        let bottom = g_closed_form_iplus(Complex64::new(0.0, -1.0)).unwrap();
        assert!((bottom.norm() - (-1.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            g_closed_form_iplus(Complex64::new(-1.0, 0.0)),
            Err(DiscError::BranchPole { .. })
        ));
    }

    #[test]
    fn fourier_center_and_boundary() {
        let g = fourier_iplus();
        let g0 = g.eval(Complex64::new(0.0, 0.0)).unwrap();
        assert!((g0.norm() - (-0.5f64).exp()).abs() < 1e-12);
        assert!((g.boundary_modulus(PI / 2.0).unwrap() - 1.0).abs() < 2e-3);
        assert!((g.boundary_modulus(-PI / 2.0).unwrap() - (-1.0f64).exp()).abs() < 2e-3);
        assert!(matches!(g.boundary_modulus(0.01), Err(DiscError::TruncationError { .. })));
    }

    #[test]
    fn fft_circle_evaluation_matches_horner() {
        let g = build_outer_function(&ArcUnion::new(&[(0.2, 1.3), (2.0, 4.0)]).unwrap(), 256).unwrap();
        let vals = g.eval_on_circle(0.97, 64);
        for (j, v) in vals.iter().enumerate() {
            let z = Complex64::from_polar(0.97, 2.0 * PI * j as f64 / 64.0);
            assert!((v - g.eval_unchecked(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn jackson_factors_are_a_probability_kernel() {
        let f = jackson_factors(100);
        assert!((f[0] - 1.0).abs() < 1e-14);
        assert!(f.iter().all(|&x| x > -1e-15 && x <= 1.0 + 1e-15));
    }
}
