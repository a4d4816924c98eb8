use crate::error::{Error, Result};
use crate::func::HFunction;
use crate::quat::{HPoint, Quaternion};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use std::sync::Arc;

/// Nearest point of conv(K) to w.
#[derive(Clone, Debug, Serialize)]
pub struct ClosestPoint {
    pub point: Vec<f64>,
    pub distance: f64,
    /// (index into K, convex weight)
    pub weights: Vec<(usize, f64)>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(pts: &[Vec<f64>], active: &[usize], lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; pts[0].len()];
    for (i, l) in active.iter().zip(lambda) {
        for (xa, pa) in x.iter_mut().zip(&pts[*i]) {
            *xa += l * pa;
        }
    }
    x
}

/// Affine minimum-norm point of the active set: argmin |Σ μ_i p_i| with Σ μ_i = 1.
fn affine_min(pts: &[Vec<f64>], active: &[usize]) -> Vec<f64> {
    let k = active.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for (r, i) in active.iter().enumerate() {
        for (c, j) in active.iter().enumerate() {
            m[(r, c)] = dot(&pts[*i], &pts[*j]);
        }
        m[(r, k)] = 1.0;
        m[(k, r)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.svd(true, true).solve(&rhs, 1e-14).unwrap_or(rhs);
    sol.iter().take(k).copied().collect()
}

/// Wolfe's minimum-norm-point algorithm on K − w.
pub fn closest_point(k: &[HPoint], w: &HPoint) -> Result<ClosestPoint> {
    if k.is_empty() {
        return Err(Error::Invalid("empty sample set".into()));
    }
    if let Some(p) = k.iter().find(|p| p.n() != w.n()) {
        return Err(Error::Dimension { expected: w.n(), found: p.n() });
    }
    let wr = w.to_real();
    let pts: Vec<Vec<f64>> = k.iter().map(|p| p.to_real().iter().zip(&wr).map(|(a, b)| a - b).collect()).collect();
    let scale = pts.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(1e-300);
    let start = (0..pts.len()).min_by(|a, b| dot(&pts[*a], &pts[*a]).total_cmp(&dot(&pts[*b], &pts[*b]))).unwrap_or(0);
    let mut active = vec![start];
    let mut lambda = vec![1.0];
    let mut x = pts[start].clone();
    for _ in 0..10 * pts.len() + 100 {
        let xx = dot(&x, &x);
        let (j, xp) = (0..pts.len()).map(|j| (j, dot(&x, &pts[j]))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, 0.0));
        if xx - xp <= 1e-12 * scale || active.contains(&j) {
            break;
        }
        active.push(j);
        lambda.push(0.0);
        loop {
            let mu = affine_min(&pts, &active);
            if mu.iter().all(|m| *m > 1e-14) {
                lambda = mu;
                break;
            }
            let theta = lambda
                .iter()
                .zip(&mu)
                .filter(|(_, m)| **m <= 1e-14)
                .map(|(l, m)| l / (l - m))
                .fold(1.0, f64::min);
            for (l, m) in lambda.iter_mut().zip(&mu) {
                *l = (1.0 - theta) * *l + theta * m;
            }
            let keep: Vec<usize> = (0..active.len()).filter(|i| lambda[*i] > 1e-14).collect();
            active = keep.iter().map(|i| active[*i]).collect();
            lambda = keep.iter().map(|i| lambda[*i]).collect();
            let s: f64 = lambda.iter().sum();
            lambda.iter_mut().for_each(|l| *l /= s);
        }
        x = combine(&pts, &active, &lambda);
    }
    let point: Vec<f64> = x.iter().zip(&wr).map(|(a, b)| a + b).collect();
    Ok(ClosestPoint { distance: dot(&x, &x).sqrt(), point, weights: active.into_iter().zip(lambda).collect() })
}

/// f(z) = exp(Σ z_j ζ̃_j − s), with |f(w)| = 1 and sup_K |f| ≤ e^{−gap}.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatingExponential {
    pub direction: HPoint,
    pub shift: f64,
    pub gap: f64,
}

impl SeparatingExponential {
    pub fn exponent(&self, z: &HPoint) -> Quaternion {
        z.iter().zip(self.direction.iter()).map(|(a, d)| *a * d.conj()).sum::<Quaternion>() - Quaternion::real(self.shift)
    }

    /// |f(z)| without forming the exponential.
    pub fn modulus(&self, z: &HPoint) -> f64 {
        self.exponent(z).w.exp()
    }
}

impl HFunction for SeparatingExponential {
    fn n(&self) -> usize {
        self.direction.n()
    }
    fn eval(&self, z: &HPoint) -> Quaternion {
        self.exponent(z).exp()
    }
    fn label(&self) -> String {
        "separating-exp".into()
    }
}

/// Exponential separating w from conv(K) along unit(w − p), p the nearest hull point.
pub fn separating_exponential(k: &[HPoint], w: &HPoint) -> Result<SeparatingExponential> {
    let cp = closest_point(k, w)?;
    let scale = k.iter().map(HPoint::norm).fold(w.norm(), f64::max).max(1.0);
    if cp.distance <= 1e-9 * scale {
        return Err(Error::NoSeparation(format!("point lies in the convex hull (distance {:.3e})", cp.distance)));
    }
    let wr = w.to_real();
    let d: Vec<f64> = wr.iter().zip(&cp.point).map(|(a, b)| (a - b) / cp.distance).collect();
    let direction = HPoint::from_real(&d);
    let shift = dot(&wr, &d);
    let gap = shift - k.iter().map(|p| dot(&p.to_real(), &d)).fold(f64::NEG_INFINITY, f64::max);
    Ok(SeparatingExponential { direction, shift, gap })
}

#[derive(Clone, Debug, Serialize)]
pub struct HullReport {
    pub k: Vec<Vec<f64>>,
    pub grid_size: usize,
    pub members: Vec<Vec<f64>>,
    pub registry: Vec<SeparatingExponential>,
    pub family_size: usize,
    /// members whose distance to conv(K) exceeds the tolerance
    pub hull_violations: usize,
    pub max_hull_distance: f64,
}

/// Grid points z with |f(z)| ≤ sup_K |f| for every family member.
pub fn hull_estimate(k: &[HPoint], grid: &[HPoint], family: &[Arc<dyn HFunction>], registry: Vec<SeparatingExponential>, tol: f64) -> Result<HullReport> {
    let sups: Vec<f64> = family.iter().map(|f| k.iter().map(|p| f.eval(p).norm()).fold(0.0, f64::max)).collect();
    let members: Vec<&HPoint> = grid
        .iter()
        .filter(|z| family.iter().zip(&sups).all(|(f, s)| f.eval(z).norm() <= s * (1.0 + 1e-12)))
        .collect();
    let dists = members.iter().map(|z| closest_point(k, z).map(|c| c.distance)).collect::<Result<Vec<_>>>()?;
    Ok(HullReport {
        k: k.iter().map(HPoint::to_real).collect(),
        grid_size: grid.len(),
        members: members.iter().map(|z| z.to_real()).collect(),
        registry,
        family_size: family.len(),
        hull_violations: dists.iter().filter(|d| **d > tol).count(),
        max_hull_distance: dists.iter().copied().fold(0.0, f64::max),
    })
}

/// One separating exponential per grid point outside conv(K).
pub fn exponential_family(k: &[HPoint], grid: &[HPoint]) -> Vec<SeparatingExponential> {
    grid.iter().filter_map(|w| separating_exponential(k, w).ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sphere_sample(count: usize) -> Vec<HPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = dot(&v, &v).sqrt();
                HPoint::from_real(&v.iter().map(|x| x / r).collect::<Vec<_>>())
            })
            .chain(std::iter::once(HPoint::single(Quaternion::E)))
            .collect()
    }

    #[test]
    fn ball_separation_along_e() {
        let k = sphere_sample(200);
        let w = HPoint::single(Quaternion::real(2.0));
        let s = separating_exponential(&k, &w).unwrap();
        assert!(s.direction.dist(&HPoint::single(Quaternion::E)) < 1e-9);
        assert!((s.shift - 2.0).abs() < 1e-9);
        assert!((s.eval(&w).norm() - 1.0).abs() < 1e-12);
        assert!(k.iter().all(|p| s.eval(p).norm() <= (-1.0f64).exp() + 1e-12));
    }

    #[test]
    fn inside_point_has_no_separation() {
        let k = sphere_sample(50);
        let err = separating_exponential(&k, &k[3]).unwrap_err();
        assert!(matches!(err, Error::NoSeparation(_)));
    }

    #[test]
    fn segment_separation_along_k() {
        let k = vec![HPoint::single(-Quaternion::E), HPoint::single(Quaternion::E)];
        let s = separating_exponential(&k, &HPoint::single(Quaternion::K * 2.0)).unwrap();
        assert!(s.direction.dist(&HPoint::single(Quaternion::K)) < 1e-12);
        assert!((s.shift - 2.0).abs() < 1e-12 && (s.gap - 2.0).abs() < 1e-12);
    }

    #[test]
    fn point_hull_is_the_point() {
        let k = vec![HPoint::zeros(1)];
        let grid: Vec<HPoint> = (-2..=2).flat_map(|a| (-2..=2).map(move |b| HPoint::single(Quaternion::new(0.5 * a as f64, 0.5 * b as f64, 0.0, 0.0)))).collect();
        let reg = exponential_family(&k, &grid);
        let fam: Vec<Arc<dyn HFunction>> = reg.iter().cloned().map(|s| Arc::new(s) as Arc<dyn HFunction>).collect();
        let r = hull_estimate(&k, &grid, &fam, reg, 1e-9).unwrap();
        assert_eq!(r.members, vec![vec![0.0; 4]]);
        let r = hull_estimate(&k, &grid, &[], Vec::new(), 1e-9).unwrap();
        assert_eq!(r.members.len(), grid.len());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn closest_point_is_optimal(v in prop::collection::vec(-1.0..1.0f64, 24), w in prop::collection::vec(-2.0..2.0f64, 4)) {
            let k: Vec<HPoint> = v.chunks(4).map(HPoint::from_real).collect();
            let w = HPoint::from_real(&w);
            let cp = closest_point(&k, &w).unwrap();
            let s: f64 = cp.weights.iter().map(|(_, l)| l).sum();
            prop_assert!((s - 1.0).abs() < 1e-9 && cp.weights.iter().all(|(_, l)| *l >= 0.0));
            // optimality: ⟨w − p, q − p⟩ ≤ 0 for every q in K
            let wr = w.to_real();
            let d: Vec<f64> = wr.iter().zip(&cp.point).map(|(a, b)| a - b).collect();
            for q in &k {
                let qp: Vec<f64> = q.to_real().iter().zip(&cp.point).map(|(a, b)| a - b).collect();
                prop_assert!(dot(&d, &qp) <= 1e-9);
            }
        }
    }
}
