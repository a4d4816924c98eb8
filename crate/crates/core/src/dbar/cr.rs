use crate::error::{Error, Result};
use crate::forms::{FormField, FormValue, Monomial};
use crate::func::{self, HFunction};
use crate::quat::{HPoint, MatrixModel, Quaternion};
use num_complex::Complex64;
use serde::Serialize;
use std::sync::Arc;

/// Wirtinger derivatives of the matrix-model channels of one slot.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotWirtinger {
    pub f11_tbar: Complex64,
    pub f11_u: Complex64,
    pub f12_ubar: Complex64,
    pub f12_t: Complex64,
}

impl SlotWirtinger {
    /// From the real partials ∂/∂x_{4s..4s+3} of f.
    pub fn from_partials(d: &[Quaternion]) -> Self {
        let i = Complex64::i();
        let [p0, p1, p2, p3] = [d[0], d[1], d[2], d[3]].map(MatrixModel::from);
        Self {
            f11_tbar: (p0.t + i * p1.t) * 0.5,
            f11_u: (p2.t - i * p3.t) * 0.5,
            f12_ubar: (p2.u + i * p3.u) * 0.5,
            f12_t: (p0.u - i * p1.u) * 0.5,
        }
    }

    pub fn as_array(&self) -> [Complex64; 4] {
        [self.f11_tbar, self.f11_u, self.f12_ubar, self.f12_t]
    }

    pub fn max_norm(&self) -> f64 {
        self.as_array().iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// ∂̃ along t̄ and along u: ∂f₁₁/∂t̄ + (∂f₁₂/∂t)j and ∂f₁₁/∂u + (∂f₁₂/∂ū)j.
    pub fn channels(&self) -> DbarChannels {
        DbarChannels {
            t_bar: MatrixModel::new(self.f11_tbar, self.f12_t).to_quaternion(),
            u: MatrixModel::new(self.f11_u, self.f12_ubar).to_quaternion(),
        }
    }
}

/// The CR system per slot; zero exactly when f passes the holomorphy test.
#[derive(Clone, Debug, Serialize)]
pub struct CRResidual {
    pub slots: Vec<SlotWirtinger>,
    pub max: f64,
}

impl CRResidual {
    pub fn from_partials(d: &[Quaternion]) -> Self {
        let slots: Vec<SlotWirtinger> = d.chunks(4).map(SlotWirtinger::from_partials).collect();
        let max = slots.iter().map(SlotWirtinger::max_norm).fold(0.0, f64::max);
        Self { slots, max }
    }
}

/// Two quaternion channels of ∂̃f on one slot. `t_bar` is the .I channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DbarChannels {
    pub t_bar: Quaternion,
    pub u: Quaternion,
}

impl DbarChannels {
    pub fn max_norm(&self) -> f64 {
        self.t_bar.norm().max(self.u.norm())
    }
}

/// How real partials are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Differencing {
    /// Analytic partials when the function has them, else central differences.
    Central(f64),
    /// Richardson extrapolation of central differences at h and h/2.
    Richardson(f64),
}

impl Default for Differencing {
    fn default() -> Self {
        Differencing::Central(func::FD_STEP)
    }
}

pub fn partials_with(f: &dyn HFunction, z: &HPoint, mode: Differencing) -> Vec<Quaternion> {
    match mode {
        Differencing::Central(h) => func::partials(f, z, h),
        Differencing::Richardson(h) => {
            let coarse = func::partials_fd(f, z, h);
            let fine = func::partials_fd(f, z, 0.5 * h);
            fine.iter().zip(&coarse).map(|(a, b)| (*a * 4.0 - *b) / 3.0).collect()
        }
    }
}

pub fn cr_residual(f: &dyn HFunction, z: &HPoint, h: f64) -> CRResidual {
    CRResidual::from_partials(&func::partials(f, z, h))
}

pub fn cr_residual_with(f: &dyn HFunction, z: &HPoint, mode: Differencing) -> CRResidual {
    CRResidual::from_partials(&partials_with(f, z, mode))
}

/// ∂̃f on `slot` at z.
pub fn dbar_apply(f: &dyn HFunction, z: &HPoint, slot: usize, mode: Differencing) -> Result<DbarChannels> {
    if slot >= z.n() {
        return Err(Error::Invalid(format!("slot {slot} out of range for n = {}", z.n())));
    }
    let d = partials_with(f, z, mode);
    Ok(SlotWirtinger::from_partials(&d[4 * slot..4 * slot + 4]).channels())
}

/// The 1-form ∂̃f = Σ_s (∂̄_w f₁₁ + (∂_w f₁₂) j) over slot s in w = (t, ū).
pub fn dbar_form_value(d: &[Quaternion]) -> FormValue {
    let dim = d.len();
    let (e, i, j) = (Quaternion::E, Quaternion::I, Quaternion::J);
    let cplx = |c: Complex64| Quaternion::new(c.re, c.im, 0.0, 0.0);
    let mut out = FormValue::zero(dim);
    for (s, chunk) in d.chunks(4).enumerate() {
        let w = SlotWirtinger::from_partials(chunk);
        // dt̄ = dx0 − i dx1, du = dx2 + i dx3, dt = dx0 + i dx1, dū = dx2 − i dx3
        let coeffs = [
            cplx(w.f11_tbar) * e + cplx(w.f12_t) * e * j,
            cplx(w.f11_tbar) * -i + cplx(w.f12_t) * i * j,
            cplx(w.f11_u) * e + cplx(w.f12_ubar) * e * j,
            cplx(w.f11_u) * i + cplx(w.f12_ubar) * -i * j,
        ];
        for (m, c) in coeffs.into_iter().enumerate() {
            out.add_term(Monomial::from_mask(1 << (4 * s + m)), c);
        }
    }
    out
}

pub fn dbar_form(f: Arc<dyn HFunction>, mode: Differencing) -> FormField {
    let dim = 4 * f.n();
    FormField::new(dim, 1, move |x| dbar_form_value(&partials_with(&*f, &HPoint::from_real(x), mode)))
}

/// Max over the grid of |∂̃_k f_j − ∂̃_j f_k| on the .I channel.
#[derive(Clone, Debug, Serialize)]
pub struct CompatReport {
    pub max_asymmetry: f64,
    pub worst: Option<(usize, usize)>,
    pub points: usize,
    pub tol: f64,
    pub pass: bool,
}

pub fn compat_check(fs: &[Arc<dyn HFunction>], grid: &[HPoint], mode: Differencing, tol: f64) -> Result<CompatReport> {
    let n = fs.len();
    if n < 2 {
        return Err(Error::Invalid("compatibility needs at least two components".into()));
    }
    if let Some(f) = fs.iter().find(|f| f.n() != n) {
        return Err(Error::Dimension { expected: n, found: f.n() });
    }
    let mut max_asymmetry: f64 = 0.0;
    let mut worst = None;
    for z in grid {
        let d: Vec<Vec<Quaternion>> = fs.iter().map(|f| partials_with(&**f, z, mode)).collect();
        let ch = |j: usize, k: usize| SlotWirtinger::from_partials(&d[j][4 * k..4 * k + 4]).channels().t_bar;
        for j in 0..n {
            for k in j + 1..n {
                let a = (ch(j, k) - ch(k, j)).norm();
                if a > max_asymmetry {
                    max_asymmetry = a;
                    worst = Some((j, k));
                }
            }
        }
    }
    Ok(CompatReport { max_asymmetry, worst, points: grid.len(), tol, pass: max_asymmetry <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbar::corpus::{Corpus, PairKind};
    use crate::func::FnH;
    use proptest::prelude::*;

    fn pt(n: usize) -> impl Strategy<Value = HPoint> {
        prop::collection::vec(-1.0..1.0f64, 4 * n).prop_map(|v| HPoint::from_real(&v))
    }

    fn q() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    #[test]
    fn conjugation_fails_in_t_bar() {
        let r = cr_residual(&Corpus::Conj.on(1), &HPoint::single(Quaternion::new(0.2, 0.1, 0.0, 0.3)), 1e-5);
        assert!((r.slots[0].f11_tbar - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conj_dbar_is_stable_under_refinement() {
        let f = FnH::new(1, "conj", |z| z[0].conj());
        let z = HPoint::single(Quaternion::new(0.2, 0.1, 0.0, 0.3));
        let a = dbar_apply(&f, &z, 0, Differencing::Central(1e-4)).unwrap();
        let b = dbar_apply(&f, &z, 0, Differencing::Central(5e-5)).unwrap();
        assert!(a.max_norm() > 0.5);
        assert!(a.t_bar.dist_inf(b.t_bar) < 1e-3 && a.u.dist_inf(b.u) < 1e-3);
    }

    #[test]
    fn right_multiplication_by_j_fails() {
        let f = FnH::new(1, "zj", |z| z[0] * Quaternion::J);
        assert!(cr_residual(&f, &HPoint::single(Quaternion::new(0.2, 0.1, 0.0, 0.3)), 1e-5).max > 0.5);
    }

    #[test]
    fn constant_has_zero_dbar() {
        let f = FnH::new(2, "c", |_| Quaternion::new(1.0, 2.0, 3.0, 4.0));
        let d = dbar_apply(&f, &HPoint::zeros(2), 1, Differencing::default()).unwrap();
        assert_eq!(d.max_norm(), 0.0);
    }

    #[test]
    fn dbar_form_channel_matches_apply() {
        let f = Corpus::NormSq.on(1);
        let z = HPoint::single(Quaternion::new(0.2, 0.1, -0.3, 0.3));
        let d = func::partials(&f, &z, 1e-5);
        let form = dbar_form_value(&d);
        let ch = dbar_apply(&f, &z, 0, Differencing::default()).unwrap();
        assert!(form.coefficient(Monomial::from_mask(1)).dist_inf(ch.t_bar) < 1e-15);
        assert!(form.coefficient(Monomial::from_mask(0b100)).dist_inf(ch.u) < 1e-15);
    }

    #[test]
    fn compat_cases() {
        let zero: Arc<dyn HFunction> = Arc::new(FnH::new(2, "0", |_| Quaternion::ZERO));
        let grid = vec![HPoint::zeros(2), HPoint::new(vec![Quaternion::new(0.1, 0.2, 0.3, 0.4), Quaternion::new(-0.2, 0.0, 0.1, 0.5)])];
        assert!(compat_check(&[zero.clone(), zero.clone()], &grid, Differencing::default(), 1e-6).unwrap().pass);

        // f_j = ∂̃_j g for g = |z₁|² z₂ + t₁ t̄₂
        let g = Arc::new(FnH::new(2, "g", |z| {
            let (a, b) = (MatrixModel::from(z[0]), MatrixModel::from(z[1]));
            Quaternion::real(z[0].norm_sqr()) * z[1] + MatrixModel::new(a.t * b.t.conj(), a.u * b.u).to_quaternion()
        }));
        let comps: Vec<Arc<dyn HFunction>> = (0..2)
            .map(|j| {
                let g = g.clone();
                Arc::new(FnH::new(2, "dg", move |z| dbar_apply(&*g, z, j, Differencing::Central(1e-4)).unwrap().t_bar)) as Arc<dyn HFunction>
            })
            .collect();
        let r = compat_check(&comps, &grid, Differencing::Central(1e-3), 1e-5).unwrap();
        assert!(r.pass, "{}", r.max_asymmetry);

        let skew: Arc<dyn HFunction> = Arc::new(FnH::new(2, "skew", |z| z[1].conj() * 2.0));
        let r = compat_check(&[skew, zero], &grid, Differencing::default(), 1e-6).unwrap();
        assert!(!r.pass && r.worst == Some((0, 1)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn affine_with_complex_b_is_holomorphic(a in q(), c in q(), br in -2.0..2.0f64, bi in -2.0..2.0f64, z in pt(1)) {
            let f = Corpus::Affine { a, b: Complex64::new(br, bi), c }.on(1);
            prop_assert!(cr_residual(&f, &z, 1e-5).max <= 1e-12);
            let fd = FnH::new(1, "fd", move |p| f.eval(p));
            prop_assert!(cr_residual(&fd, &z, 1e-5).max <= 1e-8);
        }

        #[test]
        fn channel_pairs_are_holomorphic(z in pt(1)) {
            for pair in PairKind::ALL {
                let f = Corpus::ChannelPair { pair }.on(1);
                prop_assert!(cr_residual(&f, &z, 1e-5).max <= 1e-12);
                let fd = FnH::new(1, "fd", move |p| f.eval(p));
                prop_assert!(cr_residual(&fd, &z, 1e-5).max <= 1e-8);
            }
        }
    }
}
