use super::domain::{hopf_point, BoundaryNode, DomainSpec};
use super::quadrature::{integrate_cube, mc_result, ordered_sum, rule_1d, sphere_area, sphere_samples, tensor_nodes, uniform_samples, QuadResult, QuadratureSpec, Scheme};
use crate::error::{Error, Result};
use crate::forms::{pullback, FormField, FormValue, SurfacePatch};
use crate::func::HFunction;
use crate::kernels::{self, KernelFamily, KernelKind, KernelSpec, LerayMap, MatrixModelKernel, Nu1Placement, ThetaZKernel};
use crate::quat::{HPoint, Quaternion};
use rayon::prelude::*;
use serde::Serialize;

/// Quadrature of the pullback density of F along a patch.
pub fn integrate_form(f: &FormField, patch: &SurfacePatch, q: &QuadratureSpec) -> Result<QuadResult> {
    let density = pullback(f, patch)?;
    integrate_cube(patch.dim, q, density)
}

/// Σ_a (−1)^a c_[a] n_a: the density against dS of a (N−1)-form with n the outward normal.
pub fn boundary_flux(form: &FormValue, normal: &[f64]) -> Quaternion {
    let top = normal.len();
    let full = if top == 64 { u64::MAX } else { (1u64 << top) - 1 };
    let mut acc = Quaternion::ZERO;
    for (m, c) in form.terms() {
        if m.degree() + 1 != top {
            continue;
        }
        let missing = (full & !m.mask()).trailing_zeros() as usize;
        let sign = if missing.is_multiple_of(2) { 1.0 } else { -1.0 };
        acc += c * (sign * normal[missing]);
    }
    acc
}

/// Evaluates boundary kernels with per-call precomputation.
enum BoundaryKernel {
    Quaternionic(ThetaZKernel),
    Matrix(MatrixModelKernel),
    Generic(KernelSpec),
}

impl BoundaryKernel {
    fn new(spec: &KernelSpec) -> Result<Self> {
        Ok(match (spec.kind, spec.family) {
            (KernelKind::ThetaZ, KernelFamily::Quaternionic) => Self::Quaternionic(ThetaZKernel::new(spec.n, spec.placement)),
            (KernelKind::ThetaZ, KernelFamily::MatrixModel) => Self::Matrix(MatrixModelKernel::new(spec.n)),
            (KernelKind::Phi, _) => Self::Generic(spec.clone()),
            (kind, _) => return Err(Error::Invalid(format!("{kind:?} is not a boundary kernel for functions"))),
        })
    }

    fn eval(&self, zeta: &HPoint, z: &HPoint) -> Result<FormValue> {
        match self {
            Self::Quaternionic(k) => k.eval(zeta, z),
            Self::Matrix(k) => k.eval(zeta, z),
            Self::Generic(spec) => spec.evaluate(zeta, z, 0.0),
        }
    }
}

fn check_point(dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec) -> Result<()> {
    if z.n() != dom.n() {
        return Err(Error::Dimension { expected: dom.n(), found: z.n() });
    }
    let d = dom.boundary_distance(z);
    if d < q.delta_min {
        return Err(Error::Resolution(format!("point at distance {d:.3e} from the boundary needs refinement (minimum {:.3e})", q.delta_min)));
    }
    Ok(())
}

fn boundary_sum(nodes: &[BoundaryNode], mc: bool, density: impl Fn(&BoundaryNode) -> Result<Quaternion> + Sync) -> Result<QuadResult> {
    let vals: Vec<Quaternion> = nodes.par_iter().map(|nd| density(nd).map(|v| v * nd.weight)).collect::<Result<_>>()?;
    if mc {
        let n = vals.len() as f64;
        let scaled: Vec<Quaternion> = vals.iter().map(|v| *v * n).collect();
        return Ok(mc_result(&scaled, 1.0));
    }
    let value = ordered_sum(&vals, |v| *v);
    Ok(QuadResult { value, est_error: f64::NAN, evaluations: vals.len() })
}

/// Boundary operator ∫_{∂U} f(ζ) K(ζ, z) for a degree-(4n−1) kernel in ζ.
pub fn boundary_operator(f: &dyn HFunction, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, kernel: &KernelSpec) -> Result<QuadResult> {
    check_point(dom, z, q)?;
    let k = BoundaryKernel::new(kernel)?;
    let nodes = dom.boundary_nodes(q)?;
    let mc = q.scheme == Scheme::MonteCarlo || dom.n() > 1;
    let mut res = boundary_sum(&nodes, mc, |nd| Ok(f.eval(&nd.x) * boundary_flux(&k.eval(&nd.x, z)?, &nd.normal)))?;
    if !mc && q.nodes >= 2 {
        let coarse = QuadratureSpec { nodes: q.nodes / 2, ..q.clone() };
        let cn = dom.boundary_nodes(&coarse)?;
        let c = boundary_sum(&cn, false, |nd| Ok(f.eval(&nd.x) * boundary_flux(&k.eval(&nd.x, z)?, &nd.normal)))?;
        res.est_error = (res.value - c.value).norm();
        res.evaluations += c.evaluations;
    }
    Ok(res)
}

/// Kernel flux densities at the boundary nodes for one z, reusable across functions.
#[derive(Clone, Debug)]
pub struct BoundaryRule {
    pub points: Vec<HPoint>,
    /// weight · Σ_a (−1)^a K_[a] n_a at each node
    pub densities: Vec<Quaternion>,
}

impl BoundaryRule {
    pub fn new(dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, kernel: &KernelSpec) -> Result<Self> {
        check_point(dom, z, q)?;
        let k = BoundaryKernel::new(kernel)?;
        let nodes = dom.boundary_nodes(q)?;
        let densities = nodes.par_iter().map(|nd| Ok(boundary_flux(&k.eval(&nd.x, z)?, &nd.normal) * nd.weight)).collect::<Result<Vec<_>>>()?;
        Ok(Self { points: nodes.into_iter().map(|nd| nd.x).collect(), densities })
    }

    /// ∫_{∂U} f K.
    pub fn apply(&self, f: &dyn HFunction) -> Quaternion {
        let terms: Vec<Quaternion> = self.points.iter().zip(&self.densities).map(|(x, d)| f.eval(x) * *d).collect();
        ordered_sum(&terms, |v| *v)
    }
}

/// B_∂U f(z) = ∫_{∂U} f(ζ) θ_z(ζ).
pub fn bm_boundary(f: &dyn HFunction, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec) -> Result<QuadResult> {
    boundary_operator(f, dom, z, q, &KernelSpec::theta_z(dom.n()))
}

/// L^ψ f(z) = ∫_{∂U} f(ζ) φ_{ζ,z} with the z-differentials dropped.
pub fn leray_l(f: &dyn HFunction, dom: &DomainSpec, leray: std::sync::Arc<dyn LerayMap>, z: &HPoint, q: &QuadratureSpec) -> Result<QuadResult> {
    boundary_operator(f, dom, z, q, &KernelSpec::phi(dom.n(), leray))
}

/// Options for volume integrals around the kernel singularity.
#[derive(Clone, Copy, Debug, Default)]
pub struct VolumeOptions {
    /// Exclusion radius around z; chosen from the tolerance when absent.
    pub r_ex: Option<f64>,
    pub placement: Nu1Placement,
    pub family: KernelFamily,
}

/// Volume nodes in polar coordinates about z: (ζ, weight of dV) with
/// ζ = z + tω, t ∈ [r_ex, R(ω)].
fn polar_nodes(dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, r_ex: f64) -> Result<Vec<(HPoint, f64)>> {
    let n = dom.n();
    let dim = 4 * n;
    let zr = z.to_real();
    let place = |omega: &[f64], t: f64| HPoint::from_real(&zr.iter().zip(omega).map(|(a, w)| a + t * w).collect::<Vec<_>>());
    if n == 1 && q.scheme != Scheme::MonteCarlo {
        let (rx, rw) = rule_1d(q.scheme, q.nodes)?;
        let mut out = Vec::with_capacity(q.nodes.pow(4));
        for (s, w) in tensor_nodes(3, q.scheme, q.nodes)? {
            let (omega, dens) = hopf_point(&s);
            let big_r = dom.radial_extent(z, &omega);
            let len = big_r - r_ex;
            if len <= 0.0 {
                continue;
            }
            for (x, wr) in rx.iter().zip(&rw) {
                let t = r_ex + len * x;
                out.push((place(&omega, t), w * dens * wr * len * t.powi(dim as i32 - 1)));
            }
        }
        Ok(out)
    } else {
        let area = sphere_area(dim);
        let dirs = sphere_samples(dim, q.nodes, q.seed);
        let radii = uniform_samples(1, q.nodes, q.seed.wrapping_add(1));
        Ok(dirs
            .iter()
            .zip(&radii)
            .map(|(omega, u)| {
                let len = (dom.radial_extent(z, omega) - r_ex).max(0.0);
                let t = r_ex + len * u[0];
                (place(omega, t), area * len * t.powi(dim as i32 - 1) / q.nodes as f64)
            })
            .collect())
    }
}

/// B_U g(z) = ∫_U g(ζ) ∧ θ_z(ζ) for a 1-form field g over the 4n ζ-generators.
pub fn bm_volume(g: &FormField, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, opts: VolumeOptions) -> Result<QuadResult> {
    let n = dom.n();
    if g.degree() != 1 || g.dim() != 4 * n {
        return Err(Error::Degree { form: g.degree(), patch: 1 });
    }
    check_point(dom, z, q)?;
    let kernel = BoundaryKernel::new(&KernelSpec::theta_z(n).with_family(opts.family).with_placement(opts.placement))?;
    let r_ex = match opts.r_ex {
        Some(r) => r,
        None => default_r_ex(g, &kernel, dom, z, q)?,
    };
    let nodes = polar_nodes(dom, z, q, r_ex)?;
    let vals: Vec<Quaternion> = nodes
        .par_iter()
        .map(|(zeta, w)| Ok(g.eval(&zeta.to_real()).wedge(&kernel.eval(zeta, z)?).top_coefficient() * *w))
        .collect::<Result<_>>()?;
    if q.scheme == Scheme::MonteCarlo || n > 1 {
        let k = vals.len() as f64;
        let scaled: Vec<Quaternion> = vals.iter().map(|v| *v * k).collect();
        let mut r = mc_result(&scaled, 1.0);
        r.evaluations = q.nodes;
        return Ok(r);
    }
    Ok(QuadResult { value: ordered_sum(&vals, |v| *v), est_error: f64::NAN, evaluations: vals.len() })
}

/// r_ex such that sup|g| · sup_ω |θ_z| r^{N−1} · |S^{N−1}| · r_ex ≤ 0.1·tol, capped by
/// half the boundary distance.
fn default_r_ex(g: &FormField, kernel: &BoundaryKernel, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec) -> Result<f64> {
    let dim = 4 * dom.n();
    let probe = sphere_samples(dim, 64, 0xbeef);
    let mut g_sup: f64 = 0.0;
    let mut k_sup: f64 = 0.0;
    for omega in &probe {
        let r = dom.radial_extent(z, omega);
        let zeta = HPoint::from_real(&z.to_real().iter().zip(omega).map(|(a, w)| a + 0.5 * r * w).collect::<Vec<_>>());
        g_sup = g_sup.max(g.eval(&zeta.to_real()).max_abs());
        k_sup = k_sup.max(kernel.eval(&zeta, z)?.max_abs() * (0.5 * r).powi(dim as i32 - 1));
    }
    let bound = g_sup * k_sup * dim as f64 * sphere_area(dim);
    let cap = 0.5 * dom.boundary_distance(z);
    Ok(if bound > 0.0 { (0.1 * q.tol / bound).min(cap) } else { cap.min(1e-6) })
}

/// R^ψ g(z) = ∫_{∂U×[0,1]} g(ζ) ∧ φ̄_{ζ,z,λ}, product orientation (∂U, λ).
pub fn leray_r(g: &FormField, dom: &DomainSpec, leray: &dyn LerayMap, z: &HPoint, q: &QuadratureSpec, placement: Nu1Placement) -> Result<QuadResult> {
    let n = dom.n();
    if g.degree() != 1 || g.dim() != 4 * n {
        return Err(Error::Degree { form: g.degree(), patch: 1 });
    }
    check_point(dom, z, q)?;
    let dim = 4 * n + 1;
    let lambda_gen = 4 * n;
    let relabel: Vec<usize> = (0..4 * n).collect();
    let nodes = dom.boundary_nodes(q)?;
    let (lx, lw): (Vec<f64>, Vec<f64>) = if q.scheme == Scheme::MonteCarlo {
        let u = uniform_samples(1, q.nodes, q.seed.wrapping_add(2));
        (u.into_iter().map(|v| v[0]).collect(), vec![1.0; q.nodes])
    } else {
        rule_1d(q.scheme, q.nodes)?
    };
    let density = |nd: &BoundaryNode, lambda: f64| -> Result<Quaternion> {
        let phi = kernels::leray_phi_bar(leray, &nd.x, z, lambda, false, placement)?;
        let form = g.eval(&nd.x.to_real()).relabel(dim, &relabel).wedge(&phi);
        let mut acc = Quaternion::ZERO;
        for (m, c) in form.terms() {
            if m.degree() != dim - 1 || !m.contains(lambda_gen) {
                continue;
            }
            let missing = ((!m.mask()) & ((1u64 << lambda_gen) - 1)).trailing_zeros() as usize;
            let sign = if missing.is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += c * (sign * nd.normal[missing]);
        }
        Ok(acc)
    };
    let vals: Vec<Quaternion> = if q.scheme == Scheme::MonteCarlo {
        nodes.par_iter().zip(lx.par_iter()).map(|(nd, l)| density(nd, *l).map(|v| v * nd.weight)).collect::<Result<_>>()?
    } else {
        nodes
            .par_iter()
            .map(|nd| {
                let mut s = Quaternion::ZERO;
                for (l, w) in lx.iter().zip(&lw) {
                    s += density(nd, *l)? * (*w * nd.weight);
                }
                Ok(s)
            })
            .collect::<Result<_>>()?
    };
    if q.scheme == Scheme::MonteCarlo {
        let k = vals.len() as f64;
        let scaled: Vec<Quaternion> = vals.iter().map(|v| *v * k).collect();
        return Ok(mc_result(&scaled, 1.0));
    }
    Ok(QuadResult { value: ordered_sum(&vals, |v| *v), est_error: f64::NAN, evaluations: vals.len() * lx.len() })
}

/// One exported integral.
#[derive(Clone, Debug, Serialize)]
pub struct IntegralRecord {
    pub operator: String,
    pub domain: String,
    pub point: Vec<f64>,
    pub value: [f64; 4],
    pub est_error: f64,
    pub nodes: usize,
    pub seed: u64,
}

impl IntegralRecord {
    pub fn new(operator: &str, dom: &DomainSpec, z: &HPoint, r: &QuadResult, q: &QuadratureSpec) -> Self {
        Self {
            operator: operator.into(),
            domain: dom.label(),
            point: z.to_real(),
            value: r.value.to_array(),
            est_error: r.est_error,
            nodes: q.nodes,
            seed: q.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Monomial;
    use crate::func::FnH;
    use crate::integration::domain::sphere_patch;
    use crate::kernels::DifferenceMap;
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn exact_loop_form_integrates_to_zero() {
        let f = FormField::new(4, 1, |_| FormValue::dquat(4, 0));
        let patch = SurfacePatch::new(1, 4, |s| {
            let a = 2.0 * PI * s[0];
            vec![a.cos(), a.sin(), 0.0, 0.0]
        })
        .with_jacobian(|s| {
            let a = 2.0 * PI * s[0];
            vec![vec![-2.0 * PI * a.sin()], vec![2.0 * PI * a.cos()], vec![0.0], vec![0.0]]
        });
        let r = integrate_form(&f, &patch, &QuadratureSpec::gauss(32)).unwrap();
        assert!(r.value.norm() < 1e-13);
    }

    #[test]
    fn sphere_area_by_flux() {
        // ι_n dvol integrates to the area of S³
        let f = FormField::new(4, 3, |x| {
            let mut v = FormValue::zero(4);
            for a in 0..4 {
                let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                v.add_term(Monomial::from_mask(0b1111 & !(1 << a)), Quaternion::real(sign * x[a]));
            }
            v
        });
        let patch = sphere_patch(&HPoint::zeros(1), 1.0).unwrap();
        let r = integrate_form(&f, &patch, &QuadratureSpec::gauss(16)).unwrap();
        assert!((r.value.w - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn flux_and_pullback_agree_on_kernel() {
        let z = HPoint::single(Quaternion::new(0.1, 0.2, -0.1, 0.05));
        let zz = z.clone();
        let field = FormField::new(4, 3, move |x| kernels::theta_z(&HPoint::from_real(x), &zz, Nu1Placement::Trailing).unwrap());
        let patch = sphere_patch(&HPoint::zeros(1), 1.0).unwrap();
        let q = QuadratureSpec::gauss(16);
        let a = integrate_form(&field, &patch, &q).unwrap().value;
        let one = FnH::new(1, "1", |_| Quaternion::E);
        let b = bm_boundary(&one, &DomainSpec::unit_ball(1), &z, &q).unwrap().value;
        assert!(a.dist_inf(b) < 1e-12);
    }

    #[test]
    fn constants_factor_on_the_left() {
        let c = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        let f = FnH::new(1, "c", move |_| c);
        let one = FnH::new(1, "1", |_| Quaternion::E);
        let dom = DomainSpec::unit_ball(1);
        let z = HPoint::single(Quaternion::new(0.2, 0.0, 0.1, 0.0));
        let q = QuadratureSpec::gauss(12);
        let bc = bm_boundary(&f, &dom, &z, &q).unwrap().value;
        let b1 = bm_boundary(&one, &dom, &z, &q).unwrap().value;
        assert!(bc.dist_inf(c * b1) < 1e-13);
    }

    #[test]
    fn near_boundary_point_needs_refinement() {
        let one = FnH::new(1, "1", |_| Quaternion::E);
        let z = HPoint::single(Quaternion::real(0.99));
        let err = bm_boundary(&one, &DomainSpec::unit_ball(1), &z, &QuadratureSpec::gauss(8)).unwrap_err();
        assert!(matches!(err, Error::Resolution(_)));
    }

    #[test]
    fn zero_form_has_zero_volume_integral() {
        let g = FormField::new(4, 1, |_| FormValue::zero(4));
        let r = bm_volume(&g, &DomainSpec::unit_ball(1), &HPoint::zeros(1), &QuadratureSpec::gauss(6), VolumeOptions::default()).unwrap();
        assert_eq!(r.value, Quaternion::ZERO);
    }

    #[test]
    fn difference_map_has_vanishing_r_operator() {
        let g = FormField::new(4, 1, |x| FormValue::dquat_conj(4, 0).left_mul(Quaternion::new(x[0], x[1] * x[2], 1.0, -x[3])));
        let z = HPoint::single(Quaternion::new(0.2, -0.1, 0.0, 0.3));
        let r = leray_r(&g, &DomainSpec::unit_ball(1), &DifferenceMap { n: 1 }, &z, &QuadratureSpec::gauss(6), Nu1Placement::Trailing).unwrap();
        assert_eq!(r.value, Quaternion::ZERO);
    }

    #[test]
    fn leray_difference_matches_bm() {
        let f = FnH::new(1, "f", |z| z[0] * Quaternion::J + Quaternion::I);
        let z = HPoint::single(Quaternion::new(0.2, -0.1, 0.0, 0.3));
        let dom = DomainSpec::unit_ball(1);
        let q = QuadratureSpec::gauss(10);
        let a = leray_l(&f, &dom, Arc::new(DifferenceMap { n: 1 }), &z, &q).unwrap().value;
        let b = bm_boundary(&f, &dom, &z, &q).unwrap().value;
        assert!(a.dist_inf(b) < 1e-9);
    }
}
