use super::{PureUnit, Quaternion};
use crate::error::{Error, Result};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type PathFn = Arc<dyn Fn(f64) -> Quaternion + Send + Sync>;

/// Loop s ∈ [0, 1] ↦ γ(s) in H, with an optional analytic derivative and the
/// reference point the argument is measured from.
#[derive(Clone)]
pub struct PathSpec {
    gamma: PathFn,
    velocity: Option<PathFn>,
    pub reference: Quaternion,
    pub samples: usize,
}

impl fmt::Debug for PathSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathSpec")
            .field("reference", &self.reference)
            .field("samples", &self.samples)
            .field("analytic_velocity", &self.velocity.is_some())
            .finish()
    }
}

impl PathSpec {
    pub fn new(gamma: impl Fn(f64) -> Quaternion + Send + Sync + 'static, reference: Quaternion) -> Self {
        Self { gamma: Arc::new(gamma), velocity: None, reference, samples: 512 }
    }

    pub fn with_velocity(mut self, v: impl Fn(f64) -> Quaternion + Send + Sync + 'static) -> Self {
        self.velocity = Some(Arc::new(v));
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    /// center + r·exp(2π M turns s), measured from `center`.
    pub fn circle(center: Quaternion, radius: f64, axis: PureUnit, turns: f64) -> Self {
        let m = axis.get();
        Self::new(move |s| center + axis.turn(turns * s) * radius, center)
            .with_velocity(move |s| m * axis.turn(turns * s) * (2.0 * PI * turns * radius))
    }

    pub fn point(&self, s: f64) -> Quaternion {
        (self.gamma)(s)
    }

    /// γ'(s), analytic when provided, else a central difference.
    pub fn velocity(&self, s: f64) -> Quaternion {
        match &self.velocity {
            Some(v) => v(s),
            None => {
                let h = 1e-6;
                (self.point(s + h) - self.point(s - h)) / (2.0 * h)
            }
        }
    }
}

/// ΔArg of γ − reference as (M, n) with ΔArg = 2πnM, n ≥ 0.
/// The principal logarithm is continued to the nearest branch (θ + 2πk)·m at
/// each sample; steps larger than π/2 are rejected as under-sampled.
pub fn delta_arg(path: &PathSpec) -> Result<(PureUnit, f64)> {
    let steps = path.samples.max(8);
    let scale = (0..=steps)
        .map(|k| (path.point(k as f64 / steps as f64) - path.reference).norm())
        .fold(0.0_f64, f64::max)
        .max(1.0);
    let mut first = None;
    let mut prev = Quaternion::ZERO;
    for k in 0..=steps {
        let q = path.point(k as f64 / steps as f64) - path.reference;
        if q.norm() < 1e-12 * scale {
            return Err(Error::Singular(format!("path meets the reference point at s = {}", k as f64 / steps as f64)));
        }
        let v = q.ln()?.vector();
        let theta = v.norm();
        let m = if theta > 0.0 { v / theta } else { Quaternion::I };
        let lift = match first {
            None => v,
            Some(_) => {
                let j = ((m.dot(prev) - theta) / (2.0 * PI)).round();
                m * (theta + 2.0 * PI * j)
            }
        };
        if first.is_some() && (lift - prev).norm() > PI / 2.0 {
            return Err(Error::Resolution(format!("argument jumps by more than pi/2 near s = {}", k as f64 / steps as f64)));
        }
        first.get_or_insert(lift);
        prev = lift;
    }
    let total = prev - first.unwrap_or(Quaternion::ZERO);
    let size = total.norm();
    if size < 1e-9 {
        return Ok((PureUnit::I, 0.0));
    }
    Ok((PureUnit::normalize(total)?, size / (2.0 * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_winds_once_and_twice() {
        let c = Quaternion::new(0.3, -0.2, 0.1, 0.5);
        let (m, n) = delta_arg(&PathSpec::circle(c, 0.7, PureUnit::I, 1.0)).unwrap();
        assert!(m.get().dist_inf(Quaternion::I) < 1e-12);
        assert!((n - 1.0).abs() < 1e-12);
        let (_, n2) = delta_arg(&PathSpec::circle(c, 0.7, PureUnit::I, 2.0)).unwrap();
        assert!((n2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tilted_axis_and_reverse_orientation() {
        let axis = PureUnit::normalize(Quaternion::new(0.0, 1.0, 1.0, 0.0)).unwrap();
        let (m, n) = delta_arg(&PathSpec::circle(Quaternion::ZERO, 1.0, axis, -1.0)).unwrap();
        assert!(m.get().dist_inf(-axis.get()) < 1e-12);
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_path_has_zero_winding() {
        let (m, n) = delta_arg(&PathSpec::new(|_| Quaternion::E, Quaternion::ZERO)).unwrap();
        assert_eq!(n, 0.0);
        assert_eq!(m, PureUnit::I);
    }

    #[test]
    fn path_through_reference_is_rejected() {
        let p = PathSpec::new(|s| Quaternion::real(s - 0.5), Quaternion::ZERO).with_samples(10);
        assert!(matches!(delta_arg(&p), Err(Error::Singular(_))));
    }

    #[test]
    fn coarse_sampling_is_rejected() {
        let p = PathSpec::circle(Quaternion::ZERO, 1.0, PureUnit::J, 5.0).with_samples(8);
        assert!(matches!(delta_arg(&p), Err(Error::Resolution(_))));
    }
}
