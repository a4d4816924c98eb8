use super::{FormField, FormValue};
use crate::error::{Error, Result};
use crate::quat::Quaternion;
use std::fmt;
use std::sync::Arc;

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

/// Parametrization [0,1]^k → R^ambient with an orientation sign.
#[derive(Clone)]
pub struct SurfacePatch {
    pub dim: usize,
    pub ambient: usize,
    pub orientation: f64,
    map: MapFn,
    jac: Option<JacFn>,
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("dim", &self.dim)
            .field("ambient", &self.ambient)
            .field("orientation", &self.orientation)
            .field("analytic_partials", &self.jac.is_some())
            .finish()
    }
}

impl SurfacePatch {
    pub fn new(dim: usize, ambient: usize, map: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self { dim, ambient, orientation: 1.0, map: Arc::new(map), jac: None }
    }

    /// Analytic partials: `jac(s)[a][j] = ∂x_a/∂s_j`.
    pub fn with_jacobian(mut self, jac: impl Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static) -> Self {
        self.jac = Some(Arc::new(jac));
        self
    }

    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = sign.signum();
        self
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.jac.is_some()
    }

    pub fn point(&self, s: &[f64]) -> Vec<f64> {
        (self.map)(s)
    }

    pub fn jacobian(&self, s: &[f64]) -> Vec<Vec<f64>> {
        if let Some(j) = &self.jac {
            return j(s);
        }
        let h = 1e-6;
        let mut jac = vec![vec![0.0; self.dim]; self.ambient];
        let mut t = s.to_vec();
        for j in 0..self.dim {
            t[j] = s[j] + h;
            let p = self.point(&t);
            t[j] = s[j] - h;
            let m = self.point(&t);
            t[j] = s[j];
            for a in 0..self.ambient {
                jac[a][j] = (p[a] - m[a]) / (2.0 * h);
            }
        }
        jac
    }

    /// For a hypersurface, sets the orientation so that (n, ∂_1 x, …, ∂_k x) is
    /// positively oriented at the cube centre, `n` the given outward normal field.
    pub fn oriented_by(mut self, normal: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        assert_eq!(self.dim + 1, self.ambient, "orientation by normal needs a hypersurface");
        let s = vec![0.5; self.dim];
        let n = normal(&self.point(&s));
        let j = self.jacobian(&s);
        let mut m = vec![0.0; self.ambient * self.ambient];
        for a in 0..self.ambient {
            m[a * self.ambient] = n[a];
            for c in 0..self.dim {
                m[a * self.ambient + c + 1] = j[a][c];
            }
        }
        self.orientation = det_in_place(&mut m, self.ambient).signum();
        self
    }

    /// Product with [0,1] appended as the last parameter and last ambient coordinate.
    pub fn times_unit_interval(&self) -> Self {
        let base = self.clone();
        let base_j = self.clone();
        let (k, amb) = (self.dim, self.ambient);
        let mut p = Self::new(k + 1, amb + 1, move |s| {
            let mut x = base.point(&s[..k]);
            x.push(s[k]);
            x
        });
        if self.jac.is_some() {
            p = p.with_jacobian(move |s| {
                let mut j = base_j.jacobian(&s[..k]);
                for row in j.iter_mut() {
                    row.push(0.0);
                }
                let mut last = vec![0.0; k + 1];
                last[k] = 1.0;
                j.push(last);
                j
            });
        }
        p.orientation = self.orientation;
        p
    }
}

/// Determinant of an n×n row-major matrix by partial-pivot elimination.
pub(crate) fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a * n + c].abs().total_cmp(&m[b * n + c].abs())).unwrap_or(c);
        if m[piv * n + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            det = -det;
        }
        let p = m[c * n + c];
        det *= p;
        for r in c + 1..n {
            let f = m[r * n + c] / p;
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
    }
    det
}

/// Density of a form value against ds_1∧…∧ds_k given the patch Jacobian.
pub fn pullback_value(form: &FormValue, jac: &[Vec<f64>], k: usize, orientation: f64) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    let mut buf = vec![0.0; k * k];
    for (m, q) in form.terms() {
        if m.degree() != k {
            continue;
        }
        for (r, a) in m.indices().enumerate() {
            buf[r * k..(r + 1) * k].copy_from_slice(&jac[a][..k]);
        }
        let d = if k == 0 { 1.0 } else { det_in_place(&mut buf, k) };
        acc += q * d;
    }
    acc * orientation
}

/// Returns s ↦ density of F pulled back along the patch.
pub fn pullback(f: &FormField, patch: &SurfacePatch) -> Result<impl Fn(&[f64]) -> Quaternion + Send + Sync> {
    if f.degree() != patch.dim {
        return Err(Error::Degree { form: f.degree(), patch: patch.dim });
    }
    if f.dim() != patch.ambient {
        return Err(Error::Dimension { expected: f.dim(), found: patch.ambient });
    }
    let (f, patch) = (f.clone(), patch.clone());
    Ok(move |s: &[f64]| {
        let x = patch.point(s);
        let jac = patch.jacobian(s);
        pullback_value(&f.eval(&x), &jac, patch.dim, patch.orientation)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Monomial;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_density() {
        let f = FormField::new(4, 2, |_| FormValue::term(4, Monomial::from_mask(0b11), Quaternion::E));
        let patch = SurfacePatch::new(2, 4, |s| vec![s[0], s[1], 0.0, 0.0]);
        let d = pullback(&f, &patch).unwrap();
        assert!(d(&[0.3, 0.7]).dist_inf(Quaternion::E) < 1e-9);
    }

    #[test]
    fn circle_density_is_chain_rule() {
        let f = FormField::new(4, 1, |_| FormValue::dquat(4, 0));
        let patch = SurfacePatch::new(1, 4, |s| {
            let a = 2.0 * PI * s[0];
            vec![a.cos(), a.sin(), 0.0, 0.0]
        })
        .with_jacobian(|s| {
            let a = 2.0 * PI * s[0];
            vec![vec![-2.0 * PI * a.sin()], vec![2.0 * PI * a.cos()], vec![0.0], vec![0.0]]
        });
        let d = pullback(&f, &patch).unwrap();
        let s = 0.3;
        let expect = Quaternion::I * (Quaternion::I * (2.0 * PI * s)).exp() * (2.0 * PI);
        assert!(d(&[s]).dist_inf(expect) < 1e-12);
    }

    #[test]
    fn degree_mismatch_is_an_error() {
        let f = FormField::new(4, 2, |_| FormValue::zero(4));
        let patch = SurfacePatch::new(1, 4, |s| vec![s[0], 0.0, 0.0, 0.0]);
        assert!(matches!(pullback(&f, &patch), Err(Error::Degree { .. })));
    }

    #[test]
    fn determinant_matches_permutation_sign() {
        let mut m = vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 2.0];
        assert_eq!(det_in_place(&mut m, 3), -2.0);
    }
}
