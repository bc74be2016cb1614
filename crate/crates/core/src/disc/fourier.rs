use num_complex::Complex64;
use rustfft::FftPlanner;

use super::DiscError;

/// Truncated Fourier series Σ_{|n| ≤ N} a_n ζ^n on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSeries {
    order: usize,
    coeffs: Vec<Complex64>,
}

impl FourierSeries {
    pub fn zeros(order: usize) -> Self {
        Self { order, coeffs: vec![Complex64::new(0.0, 0.0); 2 * order + 1] }
    }

    pub fn from_fn<F: Fn(i64) -> Complex64>(order: usize, f: F) -> Self {
        let n = order as i64;
        Self { order, coeffs: (-n..=n).map(f).collect() }
    }

    /// Real trigonometric polynomial a_0 + Σ_{n≥1} (a_n ζ^n + conj(a_n) ζ^{-n}).
    pub fn real_from_nonnegative(nonneg: &[Complex64]) -> Self {
        let order = nonneg.len().saturating_sub(1);
        let mut s = Self::zeros(order);
        s.coeffs[order] = Complex64::new(nonneg[0].re, 0.0);
        for (n, c) in nonneg.iter().enumerate().skip(1) {
            s.coeffs[order + n] = *c;
            s.coeffs[order - n] = c.conj();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// a_n, zero outside the stored range.
    pub fn coeff(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.order {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(n + self.order as i64) as usize]
        }
    }

    pub fn set_coeff(&mut self, n: i64, value: Complex64) {
        assert!(n.unsigned_abs() as usize <= self.order);
        let idx = (n + self.order as i64) as usize;
        self.coeffs[idx] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.order as i64;
        (-n..=n).zip(self.coeffs.iter().copied())
    }

    /// Value at e^{iθ}.
    pub fn eval_boundary(&self, theta: f64) -> Complex64 {
        self.eval_interior(Complex64::from_polar(1.0, theta))
    }

    /// Harmonic extension Σ a_n r^{|n|} e^{inθ} at z = re^{iθ}, |z| ≤ 1.
    pub fn eval_interior(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let n = self.order as i64;
        let mut pos = Complex64::new(0.0, 0.0);
        let mut neg = Complex64::new(0.0, 0.0);
        for k in (1..=n).rev() {
            pos = (pos + self.coeff(k)) * z;
            neg = (neg + self.coeff(-k)) * zb;
        }
        self.coeff(0) + pos + neg
    }

    /// a_{-n} = conj(a_n) for every n, i.e. the series is real-valued.
    pub fn is_real(&self, tol: f64) -> bool {
        let n = self.order as i64;
        (0..=n).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() <= tol)
    }

    /// max_{1 ≤ |k| ≤ kmax} |a_{k·stride}|.
    pub fn max_abs_strided(&self, stride: usize, kmax: usize) -> f64 {
        (1..=kmax as i64)
            .flat_map(|k| [k, -k])
            .map(|k| self.coeff(k * stride as i64).norm())
            .fold(0.0, f64::max)
    }
}

/// Conjugate function with v(0) = 0: multiplier a_n ↦ -i·sign(n)·a_n.
pub fn harmonic_conjugate(u: &FourierSeries) -> FourierSeries {
    let i = Complex64::new(0.0, 1.0);
    FourierSeries::from_fn(u.order(), |n| match n.signum() {
        1 => -i * u.coeff(n),
        -1 => i * u.coeff(n),
        _ => Complex64::new(0.0, 0.0),
    })
}

/// Fourier moments a_n = ∫ ζ^{-n} f dσ for |n| ≤ order from real density
/// samples on a uniform grid, via FFT. The grid must hold at least 4·order
/// samples. Negative-index coefficients are set to conjugates so the
/// returned series is real to the last bit.
pub fn circle_moments(samples: &[f64], order: usize) -> Result<FourierSeries, DiscError> {
    let m = samples.len();
    if m == 0 || m < 4 * order {
        return Err(DiscError::AliasingError { grid: m, order });
    }
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let fft = FftPlanner::new().plan_fft_forward(m);
    fft.process(&mut buf);
    let scale = 1.0 / m as f64;
    let nonneg: Vec<Complex64> = (0..=order).map(|n| buf[n] * scale).collect();
    Ok(FourierSeries::real_from_nonnegative(&nonneg))
}
