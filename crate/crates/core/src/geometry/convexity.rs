use crate::func::{self, RealFunction};
use crate::kernels::v_rho;
use crate::quat::{HPoint, Quaternion};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    /// min Hessian eigenvalue over the samples
    pub eps0: f64,
    pub witness: Vec<f64>,
    pub samples: usize,
    pub pass: bool,
}

pub fn min_hessian_eigenvalue(rho: &dyn RealFunction, z: &HPoint, h: f64) -> f64 {
    let hess = func::hessian(rho, z, h);
    let d = hess.len();
    let m = DMatrix::from_fn(d, d, |r, c| 0.5 * (hess[r][c] + hess[c][r]));
    SymmetricEigen::new(m).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn strict_convexity(rho: &dyn RealFunction, samples: &[HPoint], h: f64) -> ConvexityReport {
    let (eps0, witness) = samples
        .iter()
        .map(|z| (min_hessian_eigenvalue(rho, z, h), z))
        .fold((f64::INFINITY, None), |(m, w), (e, z)| if e < m { (e, Some(z)) } else { (m, w) });
    ConvexityReport { eps0, witness: witness.map(HPoint::to_real).unwrap_or_default(), samples: samples.len(), pass: eps0 > 0.0 }
}

/// Re⟨v_ρ(ζ); ζ−z⟩ − [ρ(ζ) − ρ(z) + ε₀|ζ−z|²/4].
pub fn leray_margin(rho: &dyn RealFunction, zeta: &HPoint, z: &HPoint, eps0: f64) -> f64 {
    let g = zeta - z;
    let v = v_rho(rho, zeta, 1e-6);
    let lhs: f64 = v.iter().zip(g.iter()).map(|(a, b)| a.dot(*b)).sum();
    lhs - (rho.value(zeta) - rho.value(z) + eps0 * g.norm_sqr() / 4.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct PshReport {
    pub min_laplacian: f64,
    pub max_laplacian: f64,
    pub evaluations: usize,
    pub tol: f64,
    /// min ≥ −tol
    pub subharmonic: bool,
    /// min > tol
    pub strict: bool,
}

/// Four-variable Laplacian of ζ ↦ ρ(v + ζw) at ζ.
pub fn line_laplacian(rho: &dyn RealFunction, v: &HPoint, w: &HPoint, zeta: Quaternion, h: f64) -> f64 {
    let phi = |q: Quaternion| rho.value(&(v + &w.left_mul(q)));
    let c = phi(zeta);
    Quaternion::BASIS.iter().map(|s| (phi(zeta + *s * h) - 2.0 * c + phi(zeta - *s * h)) / (h * h)).sum()
}

pub fn plurisubharmonic_check(rho: &dyn RealFunction, bases: &[HPoint], dirs: &[HPoint], grid: &[Quaternion], h: f64, tol: f64) -> PshReport {
    let vals: Vec<f64> = bases
        .iter()
        .flat_map(|v| dirs.iter().flat_map(move |w| grid.iter().map(move |q| line_laplacian(rho, v, w, *q, h))))
        .collect();
    let min_laplacian = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max_laplacian = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    PshReport { min_laplacian, max_laplacian, evaluations: vals.len(), tol, subharmonic: min_laplacian >= -tol, strict: min_laplacian > tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{BallDefining, FnReal};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn samples(n: usize, count: usize) -> Vec<HPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        (0..count).map(|_| HPoint::from_real(&(0..4 * n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>())).collect()
    }

    #[test]
    fn ball_is_strictly_convex() {
        let r = strict_convexity(&BallDefining::unit(2), &samples(2, 20), 1e-4);
        assert!(r.pass && (r.eps0 - 2.0).abs() < 1e-6);
        let fd = FnReal::new(1, |z| z.norm_sqr() - 1.0);
        assert!((strict_convexity(&fd, &samples(1, 10), 1e-4).eps0 - 2.0).abs() < 1e-6);
    }

    #[test]
    fn saddle_is_not_convex() {
        let rho = FnReal::new(1, |z| z[0].w * z[0].w - z[0].x * z[0].x);
        assert!(!strict_convexity(&rho, &samples(1, 5), 1e-4).pass);
    }

    #[test]
    fn quartic_perturbation_keeps_eps() {
        let rho = FnReal::new(1, |z| z.norm_sqr() + 0.1 * z[0].w.powi(4));
        assert!(strict_convexity(&rho, &samples(1, 20), 1e-4).eps0 >= 2.0 - 1e-6);
    }

    #[test]
    fn psh_examples() {
        let grid = [Quaternion::ZERO, Quaternion::new(0.3, -0.2, 0.1, 0.5)];
        let bases = samples(2, 3);
        let dirs = samples(2, 3);
        let sq = FnReal::new(2, |z| z.norm_sqr());
        let r = plurisubharmonic_check(&sq, &bases, &dirs, &grid, 1e-3, 1e-6);
        assert!(r.strict);
        let w = &dirs[0];
        assert!((line_laplacian(&sq, &bases[0], w, grid[1], 1e-3) - 8.0 * w.norm_sqr()).abs() < 1e-6);
        let lin = FnReal::new(2, |z| z[0].w);
        let r = plurisubharmonic_check(&lin, &bases, &dirs, &grid, 1e-3, 1e-6);
        assert!(r.subharmonic && !r.strict);
        let neg = FnReal::new(2, |z| -z.norm_sqr());
        assert!(!plurisubharmonic_check(&neg, &bases, &dirs, &grid, 1e-3, 1e-6).subharmonic);
    }

    #[test]
    fn margin_vanishes_on_diagonal() {
        let z = samples(1, 1).remove(0);
        assert_eq!(leray_margin(&BallDefining::unit(1), &z, &z, 2.0), 0.0);
    }

    proptest! {
        #[test]
        fn ball_margin_is_half_square_distance(v in prop::collection::vec(-1.0..1.0f64, 16)) {
            let (zeta, z) = (HPoint::from_real(&v[..8]), HPoint::from_real(&v[8..]));
            let m = leray_margin(&BallDefining::unit(2), &zeta, &z, 2.0);
            prop_assert!((m - zeta.dist(&z).powi(2) / 2.0).abs() < 1e-10);
        }
    }
}
