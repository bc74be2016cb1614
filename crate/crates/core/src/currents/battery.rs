use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::CurrentError;
use crate::hull::Point2;

pub type ScalarFn = Arc<dyn Fn(&Point2) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(&Point2) -> Complex64 + Send + Sync>;

/// A smooth real test function u(z, w) with optional Laplacians in z and w.
#[derive(Clone)]
pub struct TestFunction {
    label: String,
    eval: ScalarFn,
    lap_z: Option<ScalarFn>,
    lap_w: Option<ScalarFn>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("label", &self.label)
            .field("laplacians", &(self.lap_z.is_some() && self.lap_w.is_some()))
            .finish()
    }
}

impl TestFunction {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&Point2) -> f64 + Send + Sync + 'static,
    {
        Self { label: label.into(), eval: Arc::new(f), lap_z: None, lap_w: None }
    }

    pub fn with_laplacians<A, B>(mut self, lap_z: A, lap_w: B) -> Self
    where
        A: Fn(&Point2) -> f64 + Send + Sync + 'static,
        B: Fn(&Point2) -> f64 + Send + Sync + 'static,
    {
        self.lap_z = Some(Arc::new(lap_z));
        self.lap_w = Some(Arc::new(lap_w));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn eval(&self, p: &Point2) -> f64 {
        (self.eval)(p)
    }

    pub fn laplacian_z(&self, p: &Point2) -> Option<f64> {
        self.lap_z.as_ref().map(|f| f(p))
    }

    pub fn laplacian_w(&self, p: &Point2) -> Option<f64> {
        self.lap_w.as_ref().map(|f| f(p))
    }

    /// Σ c_k u_k. Laplacians are kept when every term has them.
    pub fn linear_combination(terms: &[(f64, TestFunction)]) -> Self {
        let label = terms
            .iter()
            .map(|(c, u)| format!("{c}*{}", u.label))
            .collect::<Vec<_>>()
            .join("+");
        let t: Vec<(f64, TestFunction)> = terms.to_vec();
        let mut out = {
            let t = t.clone();
            Self::new(label, move |p| t.iter().map(|(c, u)| c * u.eval(p)).sum())
        };
        if t.iter().all(|(_, u)| u.lap_z.is_some() && u.lap_w.is_some()) {
            let tz = t.clone();
            let tw = t;
            out = out.with_laplacians(
                move |p| tz.iter().map(|(c, u)| c * u.laplacian_z(p).unwrap()).sum(),
                move |p| tw.iter().map(|(c, u)| c * u.laplacian_w(p).unwrap()).sum(),
            );
        }
        out
    }
}

/// A (1,1)-form α = Σ A_jk̄ (i/2π) dξ_j ∧ dξ̄_k on C². In this normalization
/// the area element (i/2π) dζ ∧ dζ̄ is dA/π, so the unit coefficient
/// paired with the Green current at 0 gives 1/2.
#[derive(Clone)]
pub struct TestForm {
    pub a_zz: ScalarFn,
    pub a_ww: ScalarFn,
    pub a_zw: Option<ComplexFn>,
    pub a_wz: Option<ComplexFn>,
}

impl fmt::Debug for TestForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("TestForm { .. }")
    }
}

impl TestForm {
    pub fn diagonal<A, B>(a_zz: A, a_ww: B) -> Self
    where
        A: Fn(&Point2) -> f64 + Send + Sync + 'static,
        B: Fn(&Point2) -> f64 + Send + Sync + 'static,
    {
        Self { a_zz: Arc::new(a_zz), a_ww: Arc::new(a_ww), a_zw: None, a_wz: None }
    }

    pub fn zero() -> Self {
        Self::diagonal(|_| 0.0, |_| 0.0)
    }

    /// dd^c u, whose diagonal coefficients are Δ_z u/2 and Δ_w u/2.
    pub fn ddc_of(u: &TestFunction) -> Result<Self, CurrentError> {
        let (lz, lw) = match (&u.lap_z, &u.lap_w) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return Err(CurrentError::MissingLaplacian(u.label.clone())),
        };
        Ok(Self::diagonal(
            move |p| super::ddc_coefficient(lz(p)),
            move |p| super::ddc_coefficient(lw(p)),
        ))
    }
}

/// The nine battery labels, in table order.
pub const BATTERY_LABELS: [&str; 9] =
    ["1", "Re z", "Im z", "|z|^2", "Re w", "|w|^2", "Re(zw)", "|z|^2|w|^2", "exp(Re z)|w|^2"];

fn battery_member(label: &str) -> Option<TestFunction> {
    let zero = |_: &Point2| 0.0;
    let u = match label {
        "1" => TestFunction::new(label, |_| 1.0).with_laplacians(zero, zero),
        "Re z" => TestFunction::new(label, |p| p.z.re).with_laplacians(zero, zero),
        "Im z" => TestFunction::new(label, |p| p.z.im).with_laplacians(zero, zero),
        "|z|^2" => TestFunction::new(label, |p| p.z.norm_sqr()).with_laplacians(|_| 4.0, zero),
        "Re w" => TestFunction::new(label, |p| p.w.re).with_laplacians(zero, zero),
        "|w|^2" => TestFunction::new(label, |p| p.w.norm_sqr()).with_laplacians(zero, |_| 4.0),
        "Re(zw)" => TestFunction::new(label, |p| (p.z * p.w).re).with_laplacians(zero, zero),
        "|z|^2|w|^2" => TestFunction::new(label, |p| p.z.norm_sqr() * p.w.norm_sqr())
            .with_laplacians(|p| 4.0 * p.w.norm_sqr(), |p| 4.0 * p.z.norm_sqr()),
        "exp(Re z)|w|^2" => TestFunction::new(label, |p| p.z.re.exp() * p.w.norm_sqr())
            .with_laplacians(|p| p.z.re.exp() * p.w.norm_sqr(), |p| 4.0 * p.z.re.exp()),
        _ => return None,
    };
    Some(u)
}

pub fn default_battery() -> Vec<TestFunction> {
    BATTERY_LABELS.iter().map(|l| battery_member(l).unwrap()).collect()
}

/// Battery members by label; unknown labels are an error.
pub fn battery_by_labels<S: AsRef<str>>(labels: &[S]) -> Result<Vec<TestFunction>, CurrentError> {
    labels
        .iter()
        .map(|l| {
            battery_member(l.as_ref())
                .ok_or_else(|| CurrentError::InvalidArgument(format!("unknown test function '{}'", l.as_ref())))
        })
        .collect()
}
