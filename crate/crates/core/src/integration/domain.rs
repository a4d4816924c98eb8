use super::quadrature::{sphere_area, sphere_samples, tensor_nodes, QuadratureSpec, Scheme};
use crate::error::{Error, Result};
use crate::forms::SurfacePatch;
use crate::func::{self, RealFunction};
use crate::quat::HPoint;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Shape of a domain U ⊂ H^n.
#[derive(Clone)]
pub enum DomainKind {
    Ball { center: HPoint, radius: f64 },
    /// Product of 4-balls, one per slot.
    Polydisk { center: HPoint, radii: Vec<f64> },
    /// {ρ < 0}, star-shaped about `center` and contained in B(center, r_max).
    Sublevel { rho: Arc<dyn RealFunction>, center: HPoint, r_max: f64 },
}

impl fmt::Debug for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Ball { center, radius } => f.debug_struct("Ball").field("center", center).field("radius", radius).finish(),
            Self::Polydisk { center, radii } => f.debug_struct("Polydisk").field("center", center).field("radii", radii).finish(),
            Self::Sublevel { center, r_max, .. } => f.debug_struct("Sublevel").field("center", center).field("r_max", r_max).finish(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DomainSpec {
    pub kind: DomainKind,
}

/// A quadrature node on ∂U: point, outward unit normal, weight of dS.
#[derive(Clone, Debug)]
pub struct BoundaryNode {
    pub x: HPoint,
    pub normal: Vec<f64>,
    pub weight: f64,
}

/// Hopf coordinates of S³: s ∈ [0,1]³ ↦ (cos η e^{iξ₁}, sin η e^{iξ₂}), η = πs₁/2,
/// ξ_k = 2πs_{k+1}; returns the point and the density of dω against ds.
pub fn hopf_point(s: &[f64]) -> ([f64; 4], f64) {
    let (eta, x1, x2) = (0.5 * PI * s[0], 2.0 * PI * s[1], 2.0 * PI * s[2]);
    let (se, ce) = eta.sin_cos();
    ([ce * x1.cos(), ce * x1.sin(), se * x2.cos(), se * x2.sin()], se * ce * 0.5 * PI * 4.0 * PI * PI)
}

/// S³(c, r) in Hopf coordinates with analytic partials, outward orientation.
pub fn sphere_patch(center: &HPoint, radius: f64) -> Result<SurfacePatch> {
    if center.n() != 1 {
        return Err(Error::Invalid("sphere patch is defined for n = 1".into()));
    }
    let c = center.to_real();
    let c2 = c.clone();
    let patch = SurfacePatch::new(3, 4, move |s| {
        let (w, _) = hopf_point(s);
        (0..4).map(|a| c[a] + radius * w[a]).collect()
    })
    .with_jacobian(move |s| {
        let (eta, x1, x2) = (0.5 * PI * s[0], 2.0 * PI * s[1], 2.0 * PI * s[2]);
        let (se, ce) = eta.sin_cos();
        let (h, t) = (0.5 * PI * radius, 2.0 * PI * radius);
        vec![
            vec![-h * se * x1.cos(), -t * ce * x1.sin(), 0.0],
            vec![-h * se * x1.sin(), t * ce * x1.cos(), 0.0],
            vec![h * ce * x2.cos(), 0.0, -t * se * x2.sin()],
            vec![h * ce * x2.sin(), 0.0, t * se * x2.cos()],
        ]
    });
    Ok(patch.oriented_by(move |x| (0..4).map(|a| x[a] - c2[a]).collect()))
}

impl DomainSpec {
    pub fn ball(center: HPoint, radius: f64) -> Self {
        Self { kind: DomainKind::Ball { center, radius } }
    }

    pub fn unit_ball(n: usize) -> Self {
        Self::ball(HPoint::zeros(n), 1.0)
    }

    pub fn polydisk(center: HPoint, radii: Vec<f64>) -> Result<Self> {
        if radii.len() != center.n() {
            return Err(Error::Dimension { expected: center.n(), found: radii.len() });
        }
        Ok(Self { kind: DomainKind::Polydisk { center, radii } })
    }

    pub fn sublevel(rho: Arc<dyn RealFunction>, center: HPoint, r_max: f64) -> Result<Self> {
        if rho.value(&center) >= 0.0 {
            return Err(Error::Domain("sublevel centre must satisfy rho < 0".into()));
        }
        Ok(Self { kind: DomainKind::Sublevel { rho, center, r_max } })
    }

    pub fn n(&self) -> usize {
        self.center().n()
    }

    pub fn center(&self) -> &HPoint {
        match &self.kind {
            DomainKind::Ball { center, .. } | DomainKind::Polydisk { center, .. } | DomainKind::Sublevel { center, .. } => center,
        }
    }

    pub fn label(&self) -> String {
        match &self.kind {
            DomainKind::Ball { radius, .. } => format!("ball(r={radius})"),
            DomainKind::Polydisk { radii, .. } => format!("polydisk(r={radii:?})"),
            DomainKind::Sublevel { .. } => "sublevel".into(),
        }
    }

    pub fn contains(&self, p: &HPoint) -> bool {
        match &self.kind {
            DomainKind::Ball { center, radius } => p.dist(center) < *radius,
            DomainKind::Polydisk { center, radii } => (0..p.n()).all(|s| (p[s] - center[s]).norm() < radii[s]),
            DomainKind::Sublevel { rho, .. } => rho.value(p) < 0.0,
        }
    }

    /// Distance t ≥ 0 from `from` to ∂U along the unit direction ω.
    pub fn radial_extent(&self, from: &HPoint, omega: &[f64]) -> f64 {
        let p = from.to_real();
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let d: Vec<f64> = p.iter().zip(center.to_real()).map(|(a, b)| a - b).collect();
                ball_exit(&d, omega, *radius)
            }
            DomainKind::Polydisk { center, radii } => {
                let c = center.to_real();
                (0..from.n())
                    .filter(|s| omega[4 * s..4 * s + 4].iter().any(|w| *w != 0.0))
                    .map(|s| {
                        let d: Vec<f64> = (0..4).map(|m| p[4 * s + m] - c[4 * s + m]).collect();
                        ball_exit(&d, &omega[4 * s..4 * s + 4], radii[s])
                    })
                    .fold(f64::INFINITY, f64::min)
            }
            DomainKind::Sublevel { rho, r_max, .. } => {
                let at = |t: f64| rho.value(&HPoint::from_real(&p.iter().zip(omega).map(|(a, w)| a + t * w).collect::<Vec<_>>()));
                let (mut lo, mut hi) = (0.0, 2.0 * r_max);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if at(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi.max(1.0) {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    /// Outward unit normal at a boundary point.
    pub fn normal(&self, x: &HPoint) -> Vec<f64> {
        let v = match &self.kind {
            DomainKind::Ball { center, .. } => (x - center).to_real(),
            DomainKind::Polydisk { center, radii } => {
                let s = (0..x.n())
                    .max_by(|&a, &b| ((x[a] - center[a]).norm() / radii[a]).total_cmp(&((x[b] - center[b]).norm() / radii[b])))
                    .unwrap_or(0);
                let mut v = vec![0.0; 4 * x.n()];
                v[4 * s..4 * s + 4].copy_from_slice(&(x[s] - center[s]).to_array());
                v
            }
            DomainKind::Sublevel { rho, .. } => func::gradient(&**rho, x, 1e-6 * (1.0 + x.norm())),
        };
        let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / r).collect()
    }

    /// Distance from an interior point to ∂U (sublevel domains: minimum over a
    /// fixed set of radial directions).
    pub fn boundary_distance(&self, z: &HPoint) -> f64 {
        match &self.kind {
            DomainKind::Ball { center, radius } => radius - z.dist(center),
            DomainKind::Polydisk { center, radii } => (0..z.n()).map(|s| radii[s] - (z[s] - center[s]).norm()).fold(f64::INFINITY, f64::min),
            DomainKind::Sublevel { .. } => {
                if !self.contains(z) {
                    return -1.0;
                }
                sphere_samples(4 * z.n(), 512, 0x5eed).iter().map(|w| self.radial_extent(z, w)).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Boundary nodes as a radial graph over the unit sphere around the centre:
    /// x = c + R(ω)ω, dS = R^{N−1}/(n·ω) dω. Tensor Gauss-Legendre on Hopf
    /// coordinates for n = 1, seeded Monte Carlo otherwise.
    pub fn boundary_nodes(&self, q: &QuadratureSpec) -> Result<Vec<BoundaryNode>> {
        q.validate()?;
        let n = self.n();
        let dim = 4 * n;
        let c = self.center().clone();
        let dirs: Vec<(Vec<f64>, f64)> = if n == 1 && q.scheme != Scheme::MonteCarlo {
            tensor_nodes(3, q.scheme, q.nodes)?
                .into_iter()
                .map(|(s, w)| {
                    let (p, dens) = hopf_point(&s);
                    (p.to_vec(), w * dens)
                })
                .collect()
        } else {
            let w = sphere_area(dim) / q.nodes as f64;
            sphere_samples(dim, q.nodes, q.seed).into_iter().map(|p| (p, w)).collect()
        };
        Ok(dirs
            .into_iter()
            .map(|(omega, w)| {
                let r = self.radial_extent(&c, &omega);
                let x = HPoint::from_real(&c.to_real().iter().zip(&omega).map(|(a, b)| a + r * b).collect::<Vec<_>>());
                let normal = self.normal(&x);
                let cos = normal.iter().zip(&omega).map(|(a, b)| a * b).sum::<f64>();
                BoundaryNode { weight: w * r.powi(dim as i32 - 1) / cos, x, normal }
            })
            .collect())
    }
}

fn ball_exit(d: &[f64], omega: &[f64], radius: f64) -> f64 {
    let b: f64 = d.iter().zip(omega).map(|(a, w)| a * w).sum();
    let w2: f64 = omega.iter().map(|w| w * w).sum();
    let c: f64 = d.iter().map(|a| a * a).sum::<f64>() - radius * radius;
    (-b + (b * b - w2 * c).max(0.0).sqrt()) / w2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::BallDefining;
    use crate::quat::Quaternion;

    #[test]
    fn ball_radial_extent() {
        let d = DomainSpec::unit_ball(1);
        let z = HPoint::single(Quaternion::new(0.5, 0.0, 0.0, 0.0));
        assert!((d.radial_extent(&z, &[1.0, 0.0, 0.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((d.radial_extent(&z, &[-1.0, 0.0, 0.0, 0.0]) - 1.5).abs() < 1e-15);
        assert!((d.boundary_distance(&z) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sublevel_matches_ball() {
        let s = DomainSpec::sublevel(Arc::new(BallDefining::unit(1)), HPoint::zeros(1), 1.0).unwrap();
        let z = HPoint::single(Quaternion::new(0.2, -0.1, 0.3, 0.0));
        let w = [0.5, 0.5, 0.5, 0.5];
        let b = DomainSpec::unit_ball(1);
        assert!((s.radial_extent(&z, &w) - b.radial_extent(&z, &w)).abs() < 1e-12);
    }

    #[test]
    fn boundary_weights_give_area() {
        let d = DomainSpec::ball(HPoint::zeros(1), 2.0);
        let nodes = d.boundary_nodes(&QuadratureSpec::gauss(12)).unwrap();
        let area: f64 = nodes.iter().map(|n| n.weight).sum();
        assert!((area - 2.0 * PI * PI * 8.0).abs() < 1e-10);
        let pd = DomainSpec::polydisk(HPoint::zeros(2), vec![1.0, 1.0]).unwrap();
        let mc = pd.boundary_nodes(&QuadratureSpec::monte_carlo(20000, 3)).unwrap();
        // |∂(B×B)| = 2·|S³|·|B⁴| = 2·2π²·π²/2
        let area: f64 = mc.iter().map(|n| n.weight).sum();
        assert!((area / (2.0 * PI.powi(4)) - 1.0).abs() < 0.1);
    }

    #[test]
    fn sphere_patch_is_outward() {
        let p = sphere_patch(&HPoint::zeros(1), 1.0).unwrap();
        assert_eq!(p.orientation, -1.0);
        assert!(p.has_analytic_partials());
    }
}
