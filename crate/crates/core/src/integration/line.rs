use super::quadrature::{ordered_sum, rule_1d, QuadratureSpec, Scheme};
use crate::error::{Error, Result};
use crate::func::{self, HFunction, FD_STEP};
use crate::quat::{HPoint, PathSpec, PureUnit, Quaternion};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// (2πn)^{−1} (∫_γ f(ζ)(ζ−z)^{−1} dζ) M̃ for a loop winding n times about z in the slice of M.
pub fn cauchy_line(f: &dyn HFunction, path: &PathSpec, z: Quaternion, axis: PureUnit, n_wind: i64, q: &QuadratureSpec) -> Result<Quaternion> {
    if n_wind == 0 {
        return Err(Error::Invalid("winding number must be nonzero".into()));
    }
    if f.n() != 1 {
        return Err(Error::Dimension { expected: 1, found: f.n() });
    }
    q.validate()?;
    let (s, w) = rule_1d(q.scheme, q.nodes)?;
    let vals: Vec<Quaternion> = s
        .iter()
        .zip(&w)
        .map(|(s, w)| {
            let zeta = path.point(*s);
            let g = zeta - z;
            if g.norm() < 1e-12 {
                return Err(Error::Singular(format!("loop passes through z at s = {s}")));
            }
            Ok(f.eval(&HPoint::single(zeta)) * g.inv()? * path.velocity(*s) * *w)
        })
        .collect::<Result<_>>()?;
    Ok(ordered_sum(&vals, |v| *v) * axis.get().conj() / (2.0 * PI * n_wind as f64))
}

/// Three nested circles: ζ₃ = z + r₃e^{2πM₃s₃}, ζ₂ = ζ₃ + r₂e^{2πM₂s₂}, ζ₁ = ζ₂ + r₁e^{2πM₁s₁}.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TorusSpec {
    pub axes: [PureUnit; 3],
    pub radii: [f64; 3],
}

impl TorusSpec {
    pub fn standard(radii: [f64; 3]) -> Self {
        Self { axes: [PureUnit::I, PureUnit::J, PureUnit::K], radii }
    }

    pub fn validate(&self) -> Result<()> {
        let v: Vec<[f64; 3]> = self.axes.iter().map(|m| { let q = m.get(); [q.x, q.y, q.z] }).collect();
        let det = v[0][0] * (v[1][1] * v[2][2] - v[1][2] * v[2][1]) - v[0][1] * (v[1][0] * v[2][2] - v[1][2] * v[2][0])
            + v[0][2] * (v[1][0] * v[2][1] - v[1][1] * v[2][0]);
        if det.abs() < 1e-8 {
            return Err(Error::Invalid("torus axes are linearly dependent".into()));
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Invalid("torus radii must be positive".into()));
        }
        Ok(())
    }
}

/// Boundary term, slice corrections and their difference.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TorusResult {
    pub boundary: Quaternion,
    pub correction: Quaternion,
    pub value: Quaternion,
}

/// One circle step: (2π)^{−1}(ζ−c)^{−1}γ'(s) M̃ ds collapses to ds, so the nested
/// line integral is the mean over s₁, s₂, s₃; each factor is still formed
/// from the quaternion product to keep the formula literal.
fn circle_factor(axis: PureUnit, radius: f64, s: f64) -> (Quaternion, Quaternion) {
    let m = axis.get();
    let offset = axis.turn(s) * radius;
    let velocity = m * offset * (2.0 * PI);
    let weight = offset.inv().map(|inv| inv * velocity * m.conj() / (2.0 * PI)).unwrap_or(Quaternion::ZERO);
    (offset, weight)
}

/// ½(∂_x g + ∂_y g · M) at ζ in the slice direction M.
fn dbar_slice(f: &dyn HFunction, zeta: Quaternion, axis: PureUnit) -> Quaternion {
    let d = func::partials(f, &HPoint::single(zeta), FD_STEP);
    let m = axis.get();
    let dy = d[1] * m.x + d[2] * m.y + d[3] * m.z;
    (d[0] + dy * m) * 0.5
}

struct LoopRule {
    s: Vec<f64>,
    w: Vec<f64>,
    radial: (Vec<f64>, Vec<f64>),
}

impl LoopRule {
    fn new(q: &QuadratureSpec) -> Result<Self> {
        let (s, w) = rule_1d(q.scheme, q.nodes)?;
        let radial = rule_1d(Scheme::GaussLegendre, q.nodes)?;
        Ok(Self { s, w, radial })
    }

    fn mean(&self, axis: PureUnit, radius: f64, g: impl Fn(Quaternion) -> Quaternion) -> Quaternion {
        let vals: Vec<Quaternion> = self
            .s
            .iter()
            .zip(&self.w)
            .map(|(s, w)| {
                let (off, fac) = circle_factor(axis, radius, *s);
                g(off) * fac * *w
            })
            .collect();
        ordered_sum(&vals, |v| *v)
    }

    /// (1/π) ∫_{|ζ−c|<r} (∂̄_M f)(ζ)(ζ−c)^{−1} dA in polar form.
    fn disk(&self, f: &dyn HFunction, c: Quaternion, axis: PureUnit, radius: f64) -> Quaternion {
        let (rx, rw) = &self.radial;
        let mut vals = Vec::with_capacity(rx.len() * self.s.len());
        for (t, wt) in rx.iter().zip(rw) {
            let rho = radius * t;
            for (s, ws) in self.s.iter().zip(&self.w) {
                let unit = axis.turn(*s);
                let dbar = dbar_slice(f, c + unit * rho, axis);
                // (ζ−c)^{−1} ρ dρ dθ = e^{−Mθ} dρ dθ
                vals.push(dbar * unit.conj() * (wt * ws * radius * 2.0 * PI));
            }
        }
        ordered_sum(&vals, |v| *v) / PI
    }
}

/// Nested Cauchy–Green formula on a torus around z: the boundary triple line
/// integral minus the slice-disk corrections T₃T₂V₁ + T₃V₂ + V₃.
pub fn torus_cauchy_green(f: &dyn HFunction, torus: &TorusSpec, z: Quaternion, q: &QuadratureSpec) -> Result<TorusResult> {
    torus.validate()?;
    q.validate()?;
    if f.n() != 1 {
        return Err(Error::Dimension { expected: 1, found: f.n() });
    }
    let rule = LoopRule::new(q)?;
    let [m1, m2, m3] = torus.axes;
    let [r1, r2, r3] = torus.radii;
    let eval = |p: Quaternion| f.eval(&HPoint::single(p));
    let boundary = rule.mean(m3, r3, |o3| rule.mean(m2, r2, |o2| rule.mean(m1, r1, |o1| eval(z + o3 + o2 + o1))));
    let v1 = rule.mean(m3, r3, |o3| rule.mean(m2, r2, |o2| rule.disk(f, z + o3 + o2, m1, r1)));
    let v2 = rule.mean(m3, r3, |o3| rule.disk(f, z + o3, m2, r2));
    let v3 = rule.disk(f, z, m3, r3);
    let correction = v1 + v2 + v3;
    Ok(TorusResult { boundary, correction, value: boundary - correction })
}
