use crate::error::{Error, Result};
use crate::quat::Quaternion;
use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    GaussLegendre,
    Trapezoid,
    MonteCarlo,
}

/// Node rule plus the knobs every operator shares.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    /// Nodes per axis (tensor rules) or total samples (Monte Carlo).
    pub nodes: usize,
    pub seed: u64,
    pub tol: f64,
    /// Smallest admissible distance from the evaluation point to the boundary.
    pub delta_min: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { scheme: Scheme::GaussLegendre, nodes: 32, seed: 0, tol: 1e-3, delta_min: 0.05 }
    }
}

impl QuadratureSpec {
    pub fn gauss(nodes: usize) -> Self {
        Self { nodes, ..Self::default() }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self { scheme: Scheme::MonteCarlo, nodes: samples, seed, ..Self::default() }
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes == 0 {
            return Err(Error::Invalid("quadrature needs at least one node".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// A quadrature value with an error estimate and the number of integrand calls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: Quaternion,
    pub est_error: f64,
    pub evaluations: usize,
}

/// Neumaier-compensated quaternion sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: [f64; 4],
    comp: [f64; 4],
}

impl CompensatedSum {
    pub fn add(&mut self, q: Quaternion) {
        for (m, x) in q.to_array().into_iter().enumerate() {
            let s = self.sum[m];
            let t = s + x;
            self.comp[m] += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
            self.sum[m] = t;
        }
    }

    pub fn total(&self) -> Quaternion {
        Quaternion::from_array([0, 1, 2, 3].map(|m| self.sum[m] + self.comp[m]))
    }
}

impl FromIterator<Quaternion> for CompensatedSum {
    fn from_iter<T: IntoIterator<Item = Quaternion>>(iter: T) -> Self {
        let mut s = Self::default();
        iter.into_iter().for_each(|q| s.add(q));
        s
    }
}

/// Sums in index order after a parallel map, so the result does not depend on the
/// worker count.
pub fn ordered_sum<T: Sync>(items: &[T], f: impl Fn(&T) -> Quaternion + Sync) -> Quaternion {
    let vals: Vec<Quaternion> = items.par_iter().map(&f).collect();
    vals.into_iter().collect::<CompensatedSum>().total()
}

/// One-dimensional rule on [0, 1], nodes ascending.
pub fn rule_1d(scheme: Scheme, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let nz = NonZeroUsize::new(n).ok_or_else(|| Error::Invalid("rule needs at least one node".into()))?;
    Ok(match scheme {
        Scheme::GaussLegendre => {
            let mut pairs: Vec<(f64, f64)> =
                GaussLegendre::new(nz).as_node_weight_pairs().iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            pairs.into_iter().unzip()
        }
        Scheme::Trapezoid => {
            if n == 1 {
                (vec![0.5], vec![1.0])
            } else {
                let h = 1.0 / (n - 1) as f64;
                let w = (0..n).map(|k| if k == 0 || k == n - 1 { 0.5 * h } else { h }).collect();
                ((0..n).map(|k| k as f64 * h).collect(), w)
            }
        }
        Scheme::MonteCarlo => return Err(Error::Invalid("Monte Carlo has no one-dimensional rule".into())),
    })
}

/// Tensor-product nodes and weights on [0,1]^k.
pub fn tensor_nodes(k: usize, scheme: Scheme, n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
    let (x, w) = rule_1d(scheme, n)?;
    let total = n.checked_pow(k as u32).ok_or_else(|| Error::Invalid("tensor grid too large".into()))?;
    Ok((0..total)
        .map(|mut idx| {
            let mut p = vec![0.0; k];
            let mut wt = 1.0;
            for c in (0..k).rev() {
                let i = idx % n;
                idx /= n;
                p[c] = x[i];
                wt *= w[i];
            }
            (p, wt)
        })
        .collect())
}

/// Seeded uniform samples in [0,1]^k.
pub fn uniform_samples(k: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect()
}

/// Seeded uniform samples on the unit sphere S^{d−1} ⊂ R^d.
pub fn sphere_samples(d: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if r > 1e-12 {
                break v.into_iter().map(|x| x / r).collect();
            }
        })
        .collect()
}

/// Surface area of the unit sphere S^{d−1}.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        _ => 2.0 * std::f64::consts::PI / (d - 2) as f64 * sphere_area(d - 2),
    }
}

fn run(nodes: &[(Vec<f64>, f64)], f: &(dyn Fn(&[f64]) -> Quaternion + Sync)) -> Quaternion {
    ordered_sum(nodes, |(p, w)| f(p) * *w)
}

/// Integrates over [0,1]^k. Tensor rules estimate the error against the rule with
/// half the nodes; Monte Carlo reports the standard error.
pub fn integrate_cube(k: usize, q: &QuadratureSpec, f: impl Fn(&[f64]) -> Quaternion + Sync) -> Result<QuadResult> {
    q.validate()?;
    match q.scheme {
        Scheme::MonteCarlo => {
            let pts = uniform_samples(k, q.nodes, q.seed);
            let vals: Vec<Quaternion> = pts.par_iter().map(|p| f(p)).collect();
            Ok(mc_result(&vals, 1.0))
        }
        scheme => {
            let fine = run(&tensor_nodes(k, scheme, q.nodes)?, &f);
            let coarse_n = (q.nodes / 2).max(1);
            let est = if coarse_n < q.nodes { (fine - run(&tensor_nodes(k, scheme, coarse_n)?, &f)).norm() } else { f64::NAN };
            Ok(QuadResult { value: fine, est_error: est, evaluations: q.nodes.pow(k as u32) + coarse_n.pow(k as u32) })
        }
    }
}

/// Mean times `measure`, with the standard error of the mean.
pub fn mc_result(vals: &[Quaternion], measure: f64) -> QuadResult {
    let n = vals.len() as f64;
    let mean = vals.iter().copied().collect::<CompensatedSum>().total() / n;
    let var = vals.iter().map(|v| (*v - mean).norm_sqr()).sum::<f64>() / (n - 1.0).max(1.0);
    QuadResult { value: mean * measure, est_error: measure * (var / n).sqrt(), evaluations: vals.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_is_exact_on_polynomials() {
        let (x, w) = rule_1d(Scheme::GaussLegendre, 5).unwrap();
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(9)).sum();
        assert!((s - 0.1).abs() < 1e-15);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn trapezoid_weights_sum_to_one() {
        let (_, w) = rule_1d(Scheme::Trapezoid, 7).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(8) - PI.powi(4) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cube_integral_and_determinism() {
        let q = QuadratureSpec::gauss(8);
        let f = |p: &[f64]| Quaternion::new(p[0] * p[1], p[2].exp(), 0.0, 1.0);
        let a = integrate_cube(3, &q, f).unwrap();
        assert!((a.value.w - 0.25).abs() < 1e-14 && (a.value.x - (1f64.exp() - 1.0)).abs() < 1e-14);
        let mc = QuadratureSpec::monte_carlo(2000, 7);
        let b = integrate_cube(3, &mc, f).unwrap();
        assert_eq!(b, integrate_cube(3, &mc, f).unwrap());
        assert!((b.value.w - 0.25).abs() < 5.0 * b.est_error);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(Quaternion::real(1e16));
        for _ in 0..10 {
            s.add(Quaternion::real(1.0));
        }
        s.add(Quaternion::real(-1e16));
        assert_eq!(s.total().w, 10.0);
    }
}
