//! Function traits shared by the operators: H-valued maps on H^n, H^m-valued
//! maps and real defining functions, each with optional analytic derivatives.

use crate::quat::{HPoint, Quaternion};
use std::sync::Arc;

/// Default absolute finite-difference step.
pub const FD_STEP: f64 = 1e-5;

/// f: H^n → H.
pub trait HFunction: Send + Sync {
    fn n(&self) -> usize;

    fn eval(&self, z: &HPoint) -> Quaternion;

    /// ∂f/∂x_a for the 4n real coordinates, when known in closed form.
    fn partials(&self, _z: &HPoint) -> Option<Vec<Quaternion>> {
        None
    }

    fn label(&self) -> String {
        "f".into()
    }
}

/// Central-difference partials of f.
pub fn partials_fd(f: &dyn HFunction, z: &HPoint, h: f64) -> Vec<Quaternion> {
    (0..4 * z.n())
        .map(|a| (f.eval(&z.shifted(a, h)) - f.eval(&z.shifted(a, -h))) / (2.0 * h))
        .collect()
}

/// Analytic partials when available, else central differences with step h.
pub fn partials(f: &dyn HFunction, z: &HPoint, h: f64) -> Vec<Quaternion> {
    f.partials(z).unwrap_or_else(|| partials_fd(f, z, h))
}

/// Closure-backed H-valued function.
#[derive(Clone)]
pub struct FnH {
    n: usize,
    label: String,
    f: Arc<dyn Fn(&HPoint) -> Quaternion + Send + Sync>,
    d: Option<Arc<dyn Fn(&HPoint) -> Vec<Quaternion> + Send + Sync>>,
}

impl FnH {
    pub fn new(n: usize, label: impl Into<String>, f: impl Fn(&HPoint) -> Quaternion + Send + Sync + 'static) -> Self {
        Self { n, label: label.into(), f: Arc::new(f), d: None }
    }

    pub fn with_partials(mut self, d: impl Fn(&HPoint) -> Vec<Quaternion> + Send + Sync + 'static) -> Self {
        self.d = Some(Arc::new(d));
        self
    }
}

impl HFunction for FnH {
    fn n(&self) -> usize {
        self.n
    }
    fn eval(&self, z: &HPoint) -> Quaternion {
        (self.f)(z)
    }
    fn partials(&self, z: &HPoint) -> Option<Vec<Quaternion>> {
        self.d.as_ref().map(|d| d(z))
    }
    fn label(&self) -> String {
        self.label.clone()
    }
}

impl<T: HFunction + ?Sized> HFunction for Arc<T> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, z: &HPoint) -> Quaternion {
        (**self).eval(z)
    }
    fn partials(&self, z: &HPoint) -> Option<Vec<Quaternion>> {
        (**self).partials(z)
    }
    fn label(&self) -> String {
        (**self).label()
    }
}

/// F: H^n → H^m.
pub trait HMap: Send + Sync {
    fn n(&self) -> usize;
    fn m(&self) -> usize;
    fn eval(&self, z: &HPoint) -> HPoint;
}

/// Closure-backed map H^n → H^m.
#[derive(Clone)]
pub struct FnMap {
    n: usize,
    m: usize,
    f: Arc<dyn Fn(&HPoint) -> HPoint + Send + Sync>,
}

impl FnMap {
    pub fn new(n: usize, m: usize, f: impl Fn(&HPoint) -> HPoint + Send + Sync + 'static) -> Self {
        Self { n, m, f: Arc::new(f) }
    }

    /// The identity of H^n.
    pub fn identity(n: usize) -> Self {
        Self::new(n, n, |z| z.clone())
    }
}

impl HMap for FnMap {
    fn n(&self) -> usize {
        self.n
    }
    fn m(&self) -> usize {
        self.m
    }
    fn eval(&self, z: &HPoint) -> HPoint {
        (self.f)(z)
    }
}

/// ρ: H^n → R.
pub trait RealFunction: Send + Sync {
    fn n(&self) -> usize;

    fn value(&self, z: &HPoint) -> f64;

    fn gradient(&self, z: &HPoint) -> Option<Vec<f64>> {
        let _ = z;
        None
    }

    fn hessian(&self, z: &HPoint) -> Option<Vec<Vec<f64>>> {
        let _ = z;
        None
    }
}

/// Gradient of ρ, analytic when available, else central differences with step h.
pub fn gradient(rho: &dyn RealFunction, z: &HPoint, h: f64) -> Vec<f64> {
    rho.gradient(z).unwrap_or_else(|| gradient_fd(rho, z, h))
}

pub fn gradient_fd(rho: &dyn RealFunction, z: &HPoint, h: f64) -> Vec<f64> {
    (0..4 * z.n()).map(|a| (rho.value(&z.shifted(a, h)) - rho.value(&z.shifted(a, -h))) / (2.0 * h)).collect()
}

/// Hessian of ρ, analytic when available, else second central differences.
pub fn hessian(rho: &dyn RealFunction, z: &HPoint, h: f64) -> Vec<Vec<f64>> {
    rho.hessian(z).unwrap_or_else(|| hessian_fd(rho, z, h))
}

pub fn hessian_fd(rho: &dyn RealFunction, z: &HPoint, h: f64) -> Vec<Vec<f64>> {
    let d = 4 * z.n();
    let f0 = rho.value(z);
    let mut out = vec![vec![0.0; d]; d];
    for a in 0..d {
        let fp = rho.value(&z.shifted(a, h));
        let fm = rho.value(&z.shifted(a, -h));
        out[a][a] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in a + 1..d {
            let pp = rho.value(&z.shifted(a, h).shifted(b, h));
            let pm = rho.value(&z.shifted(a, h).shifted(b, -h));
            let mp = rho.value(&z.shifted(a, -h).shifted(b, h));
            let mm = rho.value(&z.shifted(a, -h).shifted(b, -h));
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    out
}

/// Closure-backed real function.
#[derive(Clone)]
pub struct FnReal {
    n: usize,
    f: Arc<dyn Fn(&HPoint) -> f64 + Send + Sync>,
}

impl FnReal {
    pub fn new(n: usize, f: impl Fn(&HPoint) -> f64 + Send + Sync + 'static) -> Self {
        Self { n, f: Arc::new(f) }
    }
}

impl RealFunction for FnReal {
    fn n(&self) -> usize {
        self.n
    }
    fn value(&self, z: &HPoint) -> f64 {
        (self.f)(z)
    }
}

/// ρ(z) = |z − c|² − r², with exact derivatives.
#[derive(Clone, Debug)]
pub struct BallDefining {
    pub center: HPoint,
    pub radius: f64,
}

impl BallDefining {
    pub fn unit(n: usize) -> Self {
        Self { center: HPoint::zeros(n), radius: 1.0 }
    }
}

impl RealFunction for BallDefining {
    fn n(&self) -> usize {
        self.center.n()
    }
    fn value(&self, z: &HPoint) -> f64 {
        (z - &self.center).norm_sqr() - self.radius * self.radius
    }
    fn gradient(&self, z: &HPoint) -> Option<Vec<f64>> {
        Some((z - &self.center).to_real().into_iter().map(|x| 2.0 * x).collect())
    }
    fn hessian(&self, z: &HPoint) -> Option<Vec<Vec<f64>>> {
        let d = 4 * z.n();
        Some((0..d).map(|a| (0..d).map(|b| if a == b { 2.0 } else { 0.0 }).collect()).collect())
    }
}

impl<T: RealFunction + ?Sized> RealFunction for Arc<T> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn value(&self, z: &HPoint) -> f64 {
        (**self).value(z)
    }
    fn gradient(&self, z: &HPoint) -> Option<Vec<f64>> {
        (**self).gradient(z)
    }
    fn hessian(&self, z: &HPoint) -> Option<Vec<Vec<f64>>> {
        (**self).hessian(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_partials_of_linear_map() {
        let a = Quaternion::new(0.3, -1.0, 0.2, 0.5);
        let f = FnH::new(1, "az", move |z| a * z[0]);
        let p = partials_fd(&f, &HPoint::single(Quaternion::new(0.1, 0.2, 0.3, 0.4)), 1e-5);
        for (m, s) in Quaternion::BASIS.iter().enumerate() {
            assert!(p[m].dist_inf(a * *s) < 1e-10);
        }
    }

    #[test]
    fn ball_derivatives_match_fd() {
        let rho = BallDefining { center: HPoint::single(Quaternion::new(0.1, 0.0, -0.2, 0.3)), radius: 0.8 };
        let z = HPoint::single(Quaternion::new(0.4, 0.5, -0.1, 0.2));
        let g = rho.gradient(&z).unwrap();
        let gf = gradient_fd(&rho, &z, 1e-5);
        assert!(g.iter().zip(&gf).all(|(a, b)| (a - b).abs() < 1e-9));
        let hf = hessian_fd(&rho, &z, 1e-4);
        assert!((hf[0][0] - 2.0).abs() < 1e-5 && hf[0][1].abs() < 1e-5);
    }
}
