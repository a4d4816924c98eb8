use super::elementary::omega2;
use super::{assemble, normalization, Layout, Nu1Placement, SlotBlock};
use crate::error::{Error, Result};
use crate::forms::{FormValue, Monomial};
use crate::func::{self, RealFunction};
use crate::quat::{HPoint, Quaternion};
use std::sync::Arc;

/// Smallest admissible |⟨ψ; ζ−z⟩|.
pub const ADMISSIBILITY_TOL: f64 = 1e-8;

/// A boundary distinguishing map ψ(ζ, z).
pub trait LerayMap: Send + Sync {
    fn n(&self) -> usize;

    fn psi(&self, zeta: &HPoint, z: &HPoint) -> HPoint;

    /// ∂ψ/∂x_a over the 4n real ζ-coordinates.
    fn d_zeta(&self, zeta: &HPoint, z: &HPoint) -> Vec<HPoint> {
        fd_columns(|p| self.psi(p, z), zeta)
    }

    /// ∂ψ/∂x_a over the 4n real z-coordinates.
    fn d_z(&self, zeta: &HPoint, z: &HPoint) -> Vec<HPoint> {
        fd_columns(|p| self.psi(zeta, p), z)
    }

    fn label(&self) -> String;
}

fn fd_columns(f: impl Fn(&HPoint) -> HPoint, at: &HPoint) -> Vec<HPoint> {
    let h = 1e-6 * (1.0 + at.norm());
    (0..4 * at.n()).map(|a| (&f(&at.shifted(a, h)) - &f(&at.shifted(a, -h))).scale(0.5 / h)).collect()
}

fn unit(n: usize, a: usize, sign: f64) -> HPoint {
    HPoint::zeros(n).shifted(a, sign)
}

/// ψ(ζ, z) = ζ − z.
#[derive(Clone, Copy, Debug)]
pub struct DifferenceMap {
    pub n: usize,
}

impl LerayMap for DifferenceMap {
    fn n(&self) -> usize {
        self.n
    }
    fn psi(&self, zeta: &HPoint, z: &HPoint) -> HPoint {
        zeta - z
    }
    fn d_zeta(&self, _: &HPoint, _: &HPoint) -> Vec<HPoint> {
        (0..4 * self.n).map(|a| unit(self.n, a, 1.0)).collect()
    }
    fn d_z(&self, _: &HPoint, _: &HPoint) -> Vec<HPoint> {
        (0..4 * self.n).map(|a| unit(self.n, a, -1.0)).collect()
    }
    fn label(&self) -> String {
        "zeta-z".into()
    }
}

/// ψ(ζ, z) = v_ρ(ζ).
#[derive(Clone)]
pub struct VRhoMap {
    pub rho: Arc<dyn RealFunction>,
    pub h: f64,
}

impl VRhoMap {
    pub fn new(rho: Arc<dyn RealFunction>) -> Self {
        Self { rho, h: 1e-6 }
    }
}

impl LerayMap for VRhoMap {
    fn n(&self) -> usize {
        self.rho.n()
    }
    fn psi(&self, zeta: &HPoint, _: &HPoint) -> HPoint {
        v_rho(&*self.rho, zeta, self.h)
    }
    fn d_zeta(&self, zeta: &HPoint, _: &HPoint) -> Vec<HPoint> {
        let hess = func::hessian(&*self.rho, zeta, 1e-4 * (1.0 + zeta.norm()));
        (0..4 * zeta.n()).map(|a| HPoint::from_real(&hess.iter().map(|row| row[a]).collect::<Vec<_>>())).collect()
    }
    fn d_z(&self, zeta: &HPoint, _: &HPoint) -> Vec<HPoint> {
        vec![HPoint::zeros(zeta.n()); 4 * zeta.n()]
    }
    fn label(&self) -> String {
        "v_rho".into()
    }
}

/// v_ρ(z): per slot, Σ_m (∂ρ/∂x_{4l+m}) S_m. Uses the analytic gradient when ρ
/// provides one, else central differences with step h·(|z|+1).
pub fn v_rho(rho: &dyn RealFunction, z: &HPoint, h: f64) -> HPoint {
    HPoint::from_real(&func::gradient(rho, z, h * (1.0 + z.norm())))
}

fn admissible(q: Quaternion) -> Result<Quaternion> {
    if q.norm() < ADMISSIBILITY_TOL {
        return Err(Error::Admissibility(q.norm()));
    }
    q.inv()
}

struct EtaParts {
    g: HPoint,
    psi: HPoint,
    a_inv: Quaternion,
    b_inv: Quaternion,
}

fn eta_parts(leray: &dyn LerayMap, zeta: &HPoint, z: &HPoint) -> Result<EtaParts> {
    if zeta.n() != z.n() {
        return Err(Error::Dimension { expected: zeta.n(), found: z.n() });
    }
    let g = zeta - z;
    if g.norm_sqr() == 0.0 {
        return Err(Error::Singular("eta evaluated on the diagonal".into()));
    }
    let psi = leray.psi(zeta, z);
    let a_inv = g.scalar_product(&g)?.inv()?;
    let b_inv = admissible(g.scalar_product(&psi)?)?;
    Ok(EtaParts { g, psi, a_inv, b_inv })
}

fn eta_from(p: &EtaParts, lambda: f64) -> HPoint {
    &p.g.right_mul(p.a_inv * lambda) + &p.psi.right_mul(p.b_inv * (1.0 - lambda))
}

/// η^ψ(ζ,z,λ) = λ(ζ−z)⟨ζ−z;ζ−z⟩^{−1} + (1−λ)ψ⟨ζ−z;ψ⟩^{−1}.
pub fn leray_eta(leray: &dyn LerayMap, zeta: &HPoint, z: &HPoint, lambda: f64) -> Result<HPoint> {
    Ok(eta_from(&eta_parts(leray, zeta, z)?, lambda))
}

/// The 1-form Σ_a c̃_a dx_a for column derivatives c_a of slot s.
fn conj_differential(dim: usize, offset: usize, cols: &[HPoint], s: usize) -> FormValue {
    let mut f = FormValue::zero(dim);
    for (a, c) in cols.iter().enumerate() {
        let q = c[s].conj();
        if q != Quaternion::ZERO {
            f.add_term(Monomial::from_mask(1 << (offset + a)), q);
        }
    }
    f
}

/// φ_{ζ,z} from ω₁, ν₁, ν₂ of ψ̃; with `with_z = false` the z-differentials are dropped.
pub fn leray_phi(leray: &dyn LerayMap, zeta: &HPoint, z: &HPoint, with_z: bool, placement: Nu1Placement) -> Result<FormValue> {
    let p = eta_parts(leray, zeta, z)?;
    let n = zeta.n();
    let layout = if with_z { Layout::pair(n) } else { Layout::zeta(n) };
    let dz = leray.d_zeta(zeta, z);
    let dzz = if with_z { leray.d_z(zeta, z) } else { Vec::new() };
    let blocks: Vec<SlotBlock> = (0..n)
        .map(|s| {
            let mut d1 = conj_differential(layout.dim(), 0, &dz, s);
            if with_z {
                d1 = &d1 + &conj_differential(layout.dim(), 4 * n, &dzz, s);
            }
            let w2 = omega2(&layout, s);
            SlotBlock { other: d1.wedge(&d1).wedge(&w2), d1, factor: p.psi[s].conj(), omega2: w2 }
        })
        .collect();
    let denom = admissible(p.psi.scalar_product(&p.g)?)?;
    let pre = (0..2 * n).fold(Quaternion::real(normalization(n)), |acc, _| acc * denom);
    Ok(assemble(layout.dim(), &blocks, pre, placement))
}

/// φ̄_{ζ,z,λ} from ω₁, ν₁, ν₂ of η̃^ψ over (ζ, [z,] λ).
pub fn leray_phi_bar(
    leray: &dyn LerayMap,
    zeta: &HPoint,
    z: &HPoint,
    lambda: f64,
    with_z: bool,
    placement: Nu1Placement,
) -> Result<FormValue> {
    let p = eta_parts(leray, zeta, z)?;
    let n = zeta.n();
    let layout = if with_z { Layout::full(n) } else { Layout::zeta_lambda(n) };
    let dim = layout.dim();
    let eta = eta_from(&p, lambda);
    let d_eta = |dg: &HPoint, dpsi: &HPoint| -> Result<HPoint> {
        let da = dg.scalar_product(&p.g)? + p.g.scalar_product(dg)?;
        let db = dg.scalar_product(&p.psi)? + p.g.scalar_product(dpsi)?;
        let first = &dg.right_mul(p.a_inv) - &p.g.right_mul(p.a_inv * da * p.a_inv);
        let second = &dpsi.right_mul(p.b_inv) - &p.psi.right_mul(p.b_inv * db * p.b_inv);
        Ok(&first.scale(lambda) + &second.scale(1.0 - lambda))
    };
    let dpsi_zeta = leray.d_zeta(zeta, z);
    let zeta_cols = (0..4 * n).map(|a| d_eta(&unit(n, a, 1.0), &dpsi_zeta[a])).collect::<Result<Vec<_>>>()?;
    let z_cols = if with_z {
        let dpsi_z = leray.d_z(zeta, z);
        (0..4 * n).map(|a| d_eta(&unit(n, a, -1.0), &dpsi_z[a])).collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    let lambda_col = &p.g.right_mul(p.a_inv) - &p.psi.right_mul(p.b_inv);
    let blocks: Vec<SlotBlock> = (0..n)
        .map(|s| {
            let mut d1 = conj_differential(dim, 0, &zeta_cols, s);
            if with_z {
                d1 = &d1 + &conj_differential(dim, 4 * n, &z_cols, s);
            }
            let ql = lambda_col[s].conj();
            if ql != Quaternion::ZERO {
                d1.add_term(Monomial::from_mask(1 << layout.lambda_index()), ql);
            }
            let w2 = omega2(&layout, s);
            SlotBlock { other: d1.wedge(&d1).wedge(&w2), d1, factor: eta[s].conj(), omega2: w2 }
        })
        .collect();
    Ok(assemble(dim, &blocks, Quaternion::real(normalization(n)), placement))
}
