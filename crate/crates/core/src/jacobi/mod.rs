//! Quaternion Jacobi matrices, real rank, the chain rule and local inverses.

use crate::error::{Error, Result};
use crate::func::HMap;
use crate::quat::{HPoint, Quaternion};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Relative singular-value threshold for the real rank.
pub const RANK_TOL: f64 = 1e-8;

/// Real 4m×4n matrix of the differential; column a is ∂f/∂x_a.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix {
    pub m: usize,
    pub n: usize,
    pub real: DMatrix<f64>,
}

impl JacobiMatrix {
    pub fn from_real(m: usize, n: usize, real: DMatrix<f64>) -> Result<Self> {
        if real.nrows() != 4 * m || real.ncols() != 4 * n {
            return Err(Error::Dimension { expected: 4 * m * 4 * n, found: real.len() });
        }
        Ok(Self { m, n, real })
    }

    /// The 4×4 real block mapping slot `col` to slot `row`.
    pub fn block(&self, row: usize, col: usize) -> [[f64; 4]; 4] {
        let mut b = [[0.0; 4]; 4];
        for (r, line) in b.iter_mut().enumerate() {
            for (c, v) in line.iter_mut().enumerate() {
                *v = self.real[(4 * row + r, 4 * col + c)];
            }
        }
        b
    }

    /// Image of the direction h.
    pub fn apply(&self, h: &HPoint) -> HPoint {
        let v = &self.real * nalgebra::DVector::from_vec(h.to_real());
        HPoint::from_real(v.as_slice())
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.real.clone().svd(false, false).singular_values.iter().copied().collect()
    }
}

/// Central differences per real coordinate.
pub fn jacobi_real(f: &dyn HMap, z: &HPoint, h: f64) -> JacobiMatrix {
    let (m, n) = (f.m(), f.n());
    let mut real = DMatrix::zeros(4 * m, 4 * n);
    for a in 0..4 * n {
        let d = (&f.eval(&z.shifted(a, h)) - &f.eval(&z.shifted(a, -h))).scale(0.5 / h).to_real();
        for (r, v) in d.into_iter().enumerate() {
            real[(r, a)] = v;
        }
    }
    JacobiMatrix { m, n, real }
}

/// Number of singular values ≥ tol·σ_max.
pub fn rank_r(j: &JacobiMatrix, tol: f64) -> usize {
    let s = j.singular_values();
    let max = s.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    s.iter().filter(|v| **v >= tol * max).count()
}

pub fn is_regular(j: &JacobiMatrix) -> bool {
    rank_r(j, RANK_TOL) == 4 * j.m.min(j.n)
}

/// Operator norm of J_{g∘f}(z) − J_g(f(z)) J_f(z).
pub fn chain_check(f: &dyn HMap, g: &dyn HMap, z: &HPoint, h: f64) -> Result<f64> {
    if f.m() != g.n() {
        return Err(Error::Dimension { expected: g.n(), found: f.m() });
    }
    let jf = jacobi_real(f, z, h);
    let jg = jacobi_real(g, &f.eval(z), h);
    let comp = Composed { f, g };
    let jc = jacobi_real(&comp, z, h);
    let diff = &jc.real - &jg.real * &jf.real;
    Ok(diff.svd(false, false).singular_values.iter().copied().fold(0.0, f64::max))
}

struct Composed<'a> {
    f: &'a dyn HMap,
    g: &'a dyn HMap,
}

impl HMap for Composed<'_> {
    fn n(&self) -> usize {
        self.f.n()
    }
    fn m(&self) -> usize {
        self.g.m()
    }
    fn eval(&self, z: &HPoint) -> HPoint {
        self.g.eval(&self.f.eval(z))
    }
}

/// Summation rule for h in F(ζ + h(ζ)) = ζ with g = id − F.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseSeries {
    /// h_k = g(ζ + h_{k−1}), summed as the telescoping series of increments.
    #[default]
    Picard,
    /// h = Σ_k g^{∘k}(ζ).
    Composition,
}

/// f^{−1} near f(z): y ↦ z + G(A^{−1}(y − f(z))), G = id + h, A = J_f(z).
#[derive(Clone)]
pub struct LocalInverse {
    f: Arc<dyn HMap>,
    z: HPoint,
    fz: HPoint,
    a_inv: DMatrix<f64>,
    pub k_max: usize,
    pub series: InverseSeries,
    pub radius: f64,
    pub certificate: f64,
}

impl std::fmt::Debug for LocalInverse {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LocalInverse")
            .field("z", &self.z)
            .field("k_max", &self.k_max)
            .field("series", &self.series)
            .field("certificate", &self.certificate)
            .finish()
    }
}

impl LocalInverse {
    fn normalize(&self, v: &HPoint) -> HPoint {
        HPoint::from_real((&self.a_inv * nalgebra::DVector::from_vec(v.to_real())).as_slice())
    }

    /// F(ζ) = A^{−1}(f(z + ζ) − f(z)).
    pub fn normalized(&self, zeta: &HPoint) -> HPoint {
        self.normalize(&(&self.f.eval(&(&self.z + zeta)) - &self.fz))
    }

    fn g(&self, zeta: &HPoint) -> HPoint {
        zeta - &self.normalized(zeta)
    }

    /// h(ζ) truncated at k_max terms.
    pub fn correction(&self, zeta: &HPoint) -> HPoint {
        match self.series {
            InverseSeries::Picard => {
                let mut h = HPoint::zeros(zeta.n());
                for _ in 0..self.k_max {
                    h = self.g(&(zeta + &h));
                }
                h
            }
            InverseSeries::Composition => {
                let mut term = zeta.clone();
                let mut sum = HPoint::zeros(zeta.n());
                for _ in 0..self.k_max {
                    term = self.g(&term);
                    sum = &sum + &term;
                }
                sum
            }
        }
    }

    /// G(ζ) = ζ + h(ζ), the inverse of F.
    pub fn normalized_inverse(&self, zeta: &HPoint) -> HPoint {
        zeta + &self.correction(zeta)
    }

    /// sup over the test points of |F(ζ + h(ζ)) − ζ|.
    pub fn certify(&self, points: &[HPoint]) -> f64 {
        points.iter().map(|p| self.normalized(&self.normalized_inverse(p)).dist(p)).fold(0.0, f64::max)
    }
}

impl HMap for LocalInverse {
    fn n(&self) -> usize {
        self.z.n()
    }
    fn m(&self) -> usize {
        self.z.n()
    }
    fn eval(&self, y: &HPoint) -> HPoint {
        &self.z + &self.normalized_inverse(&self.normalize(&(y - &self.fz)))
    }
}

/// Deterministic test points in the closed ball B(0, radius) ⊂ H^n, boundary included.
pub fn ball_test_points(n: usize, radius: f64, count: usize, seed: u64) -> Vec<HPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = rand_distr::StandardNormal;
    (0..count)
        .map(|k| {
            let v: Vec<f64> = (0..4 * n).map(|_| rng.sample::<f64, _>(dist)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = if k % 4 == 0 { radius } else { radius * rng.gen::<f64>().powf(1.0 / (4 * n) as f64) };
            HPoint::from_real(&v.iter().map(|x| x * r / norm).collect::<Vec<_>>())
        })
        .collect()
}

/// Options for [`local_inverse`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct InverseOptions {
    pub radius: f64,
    pub k_max: usize,
    pub tol: f64,
    pub h: f64,
    pub series: InverseSeries,
    pub test_points: usize,
    pub seed: u64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self { radius: 0.5, k_max: 30, tol: 1e-6, h: 1e-5, series: InverseSeries::Picard, test_points: 200, seed: 0 }
    }
}

/// Local inverse of f at z with its certificate on B(0, radius) in normalized coordinates.
pub fn local_inverse(f: Arc<dyn HMap>, z: &HPoint, opts: InverseOptions) -> Result<LocalInverse> {
    if f.m() != f.n() || f.n() != z.n() {
        return Err(Error::Dimension { expected: z.n(), found: f.m() });
    }
    let j = jacobi_real(&*f, z, opts.h);
    let rank = rank_r(&j, RANK_TOL);
    if rank < 4 * z.n() {
        return Err(Error::RankDeficient { rank, required: 4 * z.n() });
    }
    let a_inv = j.real.clone().try_inverse().ok_or(Error::RankDeficient { rank, required: 4 * z.n() })?;
    let fz = f.eval(z);
    let mut inv = LocalInverse { f, z: z.clone(), fz, a_inv, k_max: opts.k_max, series: opts.series, radius: opts.radius, certificate: f64::NAN };
    let pts = ball_test_points(z.n(), opts.radius, opts.test_points, opts.seed);
    inv.certificate = inv.certify(&pts);
    if !(inv.certificate <= opts.tol) {
        return Err(Error::Divergence { certificate: inv.certificate, tol: opts.tol });
    }
    Ok(inv)
}

/// The map z ↦ z + c·z i z on H.
pub fn quadratic_example(c: f64) -> Arc<dyn HMap> {
    Arc::new(crate::func::FnMap::new(1, 1, move |z| HPoint::single(z[0] + z[0] * Quaternion::I * z[0] * c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::FnMap;
    use proptest::prelude::*;

    fn q() -> impl Strategy<Value = Quaternion> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    fn lr(a: Quaternion, b: Quaternion) -> DMatrix<f64> {
        let (l, r) = (a.left_matrix(), b.right_matrix());
        DMatrix::from_fn(4, 4, |i, j| l[i][j]) * DMatrix::from_fn(4, 4, |i, j| r[i][j])
    }

    fn sandwich(a: Quaternion, b: Quaternion) -> FnMap {
        FnMap::new(1, 1, move |z| HPoint::single(a * z[0] * b))
    }

    #[test]
    fn identity_and_zero() {
        let id = FnMap::identity(2);
        let j = jacobi_real(&id, &HPoint::zeros(2), 1e-5);
        assert!((&j.real - DMatrix::<f64>::identity(8, 8)).amax() < 1e-10);
        assert_eq!(rank_r(&j, RANK_TOL), 8);
        let zero = FnMap::new(1, 1, |_| HPoint::zeros(1));
        assert_eq!(rank_r(&jacobi_real(&zero, &HPoint::zeros(1), 1e-5), RANK_TOL), 0);
    }

    #[test]
    fn projection_has_rank_two() {
        let p = FnMap::new(1, 1, |z| HPoint::single((z[0] - Quaternion::I * z[0] * Quaternion::I) * 0.5));
        let j = jacobi_real(&p, &HPoint::single(Quaternion::new(0.3, 0.1, -0.4, 0.2)), 1e-5);
        assert_eq!(rank_r(&j, RANK_TOL), 2);
        let err = local_inverse(Arc::new(p), &HPoint::zeros(1), InverseOptions::default()).unwrap_err();
        assert!(matches!(err, Error::RankDeficient { rank: 2, required: 4 }));
    }

    #[test]
    fn quaternion_block_view() {
        let a = Quaternion::new(0.5, 1.0, 0.0, -1.0);
        let j = jacobi_real(&sandwich(a, Quaternion::E), &HPoint::zeros(1), 1e-5);
        let l = a.left_matrix();
        let b = j.block(0, 0);
        assert!((0..4).all(|r| (0..4).all(|c| (b[r][c] - l[r][c]).abs() < 1e-10)));
        let h = HPoint::single(Quaternion::new(1.0, 2.0, 3.0, 4.0));
        assert!(j.apply(&h)[0].dist_inf(a * h[0]) < 1e-9);
    }

    #[test]
    fn chain_rule_for_izj_then_kw() {
        let f = sandwich(Quaternion::I, Quaternion::J);
        let g = sandwich(Quaternion::K, Quaternion::E);
        assert!(chain_check(&f, &g, &HPoint::single(Quaternion::new(0.2, 0.3, 0.1, 0.0)), 1e-5).unwrap() < 1e-8);
        let id = FnMap::identity(1);
        let quad = quadratic_example(0.3);
        assert!(chain_check(&*quad, &id, &HPoint::single(Quaternion::new(0.2, 0.3, 0.1, 0.0)), 1e-5).unwrap() < 1e-8);
    }

    #[test]
    fn identity_inverse_has_no_correction() {
        let inv = local_inverse(Arc::new(FnMap::identity(1)), &HPoint::zeros(1), InverseOptions::default()).unwrap();
        let p = HPoint::single(Quaternion::new(0.1, 0.2, 0.3, 0.1));
        assert!(inv.correction(&p).norm() < 1e-9);
        assert!(inv.certificate < 1e-9);
    }

    #[test]
    fn quadratic_inverse_certificate() {
        let inv = local_inverse(quadratic_example(0.05), &HPoint::zeros(1), InverseOptions::default()).unwrap();
        assert!(inv.certificate <= 1e-6);
        let y = HPoint::single(Quaternion::new(0.2, -0.1, 0.3, 0.1));
        let x = inv.eval(&y);
        assert!(quadratic_example(0.05).eval(&x).dist(&y) < 1e-9);
    }

    #[test]
    fn certificate_decreases_with_terms() {
        let base = local_inverse(quadratic_example(0.05), &HPoint::zeros(1), InverseOptions::default()).unwrap();
        let pts = ball_test_points(1, 0.5, 100, 1);
        let certs: Vec<f64> = (1..12)
            .map(|k| LocalInverse { k_max: k, ..base.clone() }.certify(&pts))
            .collect();
        assert!(certs.windows(2).all(|w| w[1] <= w[0] || w[1] < 1e-14), "{certs:?}");
    }

    #[test]
    fn composition_series_misses_cubic_term() {
        let opts = InverseOptions { series: InverseSeries::Composition, tol: 1.0, ..Default::default() };
        let inv = local_inverse(quadratic_example(0.05), &HPoint::zeros(1), opts).unwrap();
        assert!(inv.certificate > 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sandwich_matches_lr(a in q(), b in q(), z in q()) {
            let j = jacobi_real(&sandwich(a, b), &HPoint::single(z), 1e-5);
            prop_assert!((&j.real - lr(a, b)).amax() < 1e-9 * (1.0 + a.norm() * b.norm()));
        }

        #[test]
        fn chain_rule_on_linear_pairs(a in q(), b in q(), c in q(), d in q(), z in q()) {
            let r = chain_check(&sandwich(a, b), &sandwich(c, d), &HPoint::single(z), 1e-5).unwrap();
            prop_assert!(r <= 1e-8 * (1.0 + a.norm() * b.norm() * c.norm() * d.norm()));
        }

        #[test]
        fn rank_invariant_under_unit_multiplication(u in q(), z in q()) {
            prop_assume!(u.norm() > 1e-3);
            let u = u / u.norm();
            let p = FnMap::new(1, 1, |z| HPoint::single((z[0] - Quaternion::I * z[0] * Quaternion::I) * 0.5));
            let up = FnMap::new(1, 1, move |z| HPoint::single(u * (z[0] - Quaternion::I * z[0] * Quaternion::I) * 0.5 * u));
            let z = HPoint::single(z);
            prop_assert_eq!(rank_r(&jacobi_real(&p, &z, 1e-5), RANK_TOL), rank_r(&jacobi_real(&up, &z, 1e-5), RANK_TOL));
        }
    }
}
