use super::{FormValue, Monomial};
use crate::quat::Quaternion;
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(&[f64]) -> FormValue + Send + Sync>;

/// Point ↦ FormValue over `dim` real generators; points are given in the same
/// real coordinates as the generators.
#[derive(Clone)]
pub struct FormField {
    dim: usize,
    degree: usize,
    eval: Eval,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField").field("dim", &self.dim).field("degree", &self.degree).finish()
    }
}

impl FormField {
    pub fn new(dim: usize, degree: usize, eval: impl Fn(&[f64]) -> FormValue + Send + Sync + 'static) -> Self {
        Self { dim, degree, eval: Arc::new(eval) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &[f64]) -> FormValue {
        debug_assert_eq!(p.len(), self.dim);
        (self.eval)(p)
    }
}

/// Central-difference exterior derivative d(c dx_I) = Σ_b ∂_b c dx_b∧dx_I.
pub fn ext_deriv_central(f: &FormField, p: &[f64], h: f64) -> FormValue {
    let dim = f.dim();
    let mut out = FormValue::zero(dim);
    let mut x = p.to_vec();
    for b in 0..dim {
        x[b] = p[b] + h;
        let fp = f.eval(&x);
        x[b] = p[b] - h;
        let fm = f.eval(&x);
        x[b] = p[b];
        let diff = (&fp - &fm).scale(0.5 / h);
        let db = Monomial::from_mask(1 << b);
        for (m, q) in diff.terms() {
            if q == Quaternion::ZERO {
                continue;
            }
            if let Some((mm, s)) = db.wedge(m) {
                out.add_term(mm, q * s);
            }
        }
    }
    out
}

/// Exterior derivative with step `h`; switches to Richardson extrapolation of
/// the h and h/2 central differences when coefficients exceed unit scale.
pub fn ext_deriv(f: &FormField, p: &[f64], h: f64) -> FormValue {
    let coarse = ext_deriv_central(f, p, h);
    if f.eval(p).max_abs() <= 1.0 && coarse.max_abs() <= 1.0 {
        return coarse;
    }
    let fine = ext_deriv_central(f, p, h / 2.0);
    &fine.scale(4.0 / 3.0) - &coarse.scale(1.0 / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_form_is_closed() {
        let f = FormField::new(4, 1, |_| FormValue::dquat(4, 0));
        assert!(ext_deriv(&f, &[0.3, 0.1, -0.2, 0.5], 1e-5).max_abs() < 1e-12);
    }

    #[test]
    fn linear_coefficient() {
        let f = FormField::new(4, 1, |x| FormValue::generator(4, 1, Quaternion::real(x[0])));
        let d = ext_deriv(&f, &[0.3, 0.1, -0.2, 0.5], 1e-5);
        assert!((d.coefficient(Monomial::from_mask(0b11)).w - 1.0).abs() < 1e-9);
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn d_squared_vanishes() {
        let f = FormField::new(4, 0, |x| FormValue::scalar(4, Quaternion::new(x[0] * x[1], x[2].sin(), x[3] * x[0], 1.0)));
        let df = FormField::new(4, 1, move |x| ext_deriv_central(&f, x, 1e-4));
        let dd = ext_deriv_central(&df, &[0.2, 0.4, -0.1, 0.3], 1e-4);
        assert!(dd.max_abs() < 1e-6);
    }
}
