use super::cr::{DbarChannels, SlotWirtinger};
use crate::error::{Error, Result};
use crate::forms::{FormField, FormValue};
use crate::func::{self, FnH, HFunction, RealFunction, FD_STEP};
use crate::integration::{bm_volume, DomainSpec, QuadratureSpec, VolumeOptions};
use crate::quat::{HPoint, Quaternion};
use serde::Serialize;
use std::sync::Arc;

/// A ball containing supp(f).
#[derive(Clone, Debug)]
pub struct Support {
    pub center: HPoint,
    pub radius: f64,
}

/// f̂ as components indexed by e, i, j, k; the e component is f itself and the
/// others default to zero.
#[derive(Clone)]
pub struct OperatorField {
    components: [Arc<dyn HFunction>; 4],
}

impl OperatorField {
    pub fn lift(f: Arc<dyn HFunction>) -> Self {
        let n = f.n();
        let zero = || Arc::new(FnH::new(n, "0", |_| Quaternion::ZERO)) as Arc<dyn HFunction>;
        Self { components: [f, zero(), zero(), zero()] }
    }

    pub fn with_component(mut self, unit: usize, g: Arc<dyn HFunction>) -> Result<Self> {
        if unit == 0 || unit > 3 {
            return Err(Error::Invalid("only the i, j, k components can be replaced".into()));
        }
        if g.n() != self.components[0].n() {
            return Err(Error::Dimension { expected: self.components[0].n(), found: g.n() });
        }
        self.components[unit] = g;
        Ok(self)
    }

    pub fn component(&self, unit: usize) -> &Arc<dyn HFunction> {
        &self.components[unit]
    }

    /// The channel the solver consumes.
    pub fn i_channel(&self) -> &Arc<dyn HFunction> {
        &self.components[0]
    }
}

impl std::fmt::Debug for OperatorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.components.iter().map(|c| c.label())).finish()
    }
}

fn solver_options(dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, opts: VolumeOptions) -> VolumeOptions {
    let r_ex = opts.r_ex.unwrap_or_else(|| (0.1 * q.tol).min(0.5 * dom.boundary_distance(z)));
    VolumeOptions { r_ex: Some(r_ex), ..opts }
}

fn conj_field(f: Arc<dyn HFunction>) -> FormField {
    FormField::new(4, 1, move |x| FormValue::dquat_conj(4, 0).left_mul(f.eval(&HPoint::from_real(x))))
}

fn check_n1(f: &dyn HFunction, z: &HPoint) -> Result<()> {
    match (f.n(), z.n()) {
        (1, 1) => Ok(()),
        (a, 1) => Err(Error::Dimension { expected: 1, found: a }),
        (_, b) => Err(Error::Dimension { expected: 1, found: b }),
    }
}

fn solve_on(f: Arc<dyn HFunction>, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, opts: VolumeOptions) -> Result<Quaternion> {
    let opts = solver_options(dom, z, q, opts);
    Ok(-bm_volume(&conj_field(f), dom, z, q, opts)?.value)
}

/// ∂u/∂x_a with the derivative moved onto f; exact when f vanishes near ∂U.
fn gradient_on(f: Arc<dyn HFunction>, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, opts: VolumeOptions) -> Result<Vec<Quaternion>> {
    let opts = solver_options(dom, z, q, opts);
    (0..4)
        .map(|a| {
            let f = f.clone();
            let df = Arc::new(FnH::new(1, "df", move |p| func::partials(&*f, p, FD_STEP)[a]));
            Ok(-bm_volume(&conj_field(df), dom, z, q, opts)?.value)
        })
        .collect()
}

fn check_support(support: &Support, dom: &DomainSpec) -> Result<()> {
    if dom.boundary_distance(&support.center) < support.radius {
        return Err(Error::Domain(format!("support ball of radius {} is not compactly contained in {}", support.radius, dom.label())));
    }
    Ok(())
}

/// u(z) = −B_U(f dζ̃)(z) on H.
pub fn dbar_solve(f: Arc<dyn HFunction>, support: &Support, dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, opts: VolumeOptions) -> Result<Quaternion> {
    check_n1(&*f, z)?;
    check_support(support, dom)?;
    solve_on(f, dom, z, q, opts)
}

/// u, ∂̃u and the .I-channel residual |∂̃u − f| at z.
#[derive(Clone, Debug, Serialize)]
pub struct SolveResidual {
    pub point: Vec<f64>,
    pub u: Quaternion,
    pub dbar_u: DbarChannels,
    pub f: Quaternion,
    pub residual: f64,
    /// max CR residual of u, meaningful outside supp(f)
    pub cr: f64,
}

pub fn dbar_solve_residual(
    f: Arc<dyn HFunction>,
    support: &Support,
    dom: &DomainSpec,
    z: &HPoint,
    q: &QuadratureSpec,
    opts: VolumeOptions,
) -> Result<SolveResidual> {
    let u = dbar_solve(f.clone(), support, dom, z, q, opts)?;
    let grad = gradient_on(f.clone(), dom, z, q, opts)?;
    let w = SlotWirtinger::from_partials(&grad);
    let dbar_u = w.channels();
    let fz = f.eval(z);
    Ok(SolveResidual { point: z.to_real(), u, dbar_u, f: fz, residual: (dbar_u.t_bar - fz).norm(), cr: w.max_norm() })
}

/// The slot-1 slice at η = (z₂, …, z_n): f(·, η), ρ(·, η) and ξ = z₁.
pub struct Slice {
    pub f: Arc<dyn HFunction>,
    pub rho: Arc<dyn RealFunction>,
    pub xi: HPoint,
}

pub fn slice(f: Arc<dyn HFunction>, rho: Arc<dyn RealFunction>, z: &HPoint) -> Result<Slice> {
    if f.n() != z.n() || rho.n() != z.n() {
        return Err(Error::Dimension { expected: z.n(), found: f.n().min(rho.n()) });
    }
    let eta: Vec<Quaternion> = z.iter().skip(1).copied().collect();
    let join = {
        let eta = eta.clone();
        move |xi: &HPoint| HPoint::new(std::iter::once(xi[0]).chain(eta.iter().copied()).collect())
    };
    let (j1, j2) = (join.clone(), join.clone());
    let ff = f.clone();
    let f_eta = FnH::new(1, format!("{}|slice", f.label()), move |xi| ff.eval(&j1(xi)))
        .with_partials(move |xi| func::partials(&*f, &j2(xi), FD_STEP)[..4].to_vec());
    let r = rho.clone();
    let rho_eta = func::FnReal::new(1, move |xi| r.value(&join(xi)));
    Ok(Slice { f: Arc::new(f_eta), rho: Arc::new(rho_eta), xi: HPoint::single(z[0]) })
}

/// u(z) = −B_{U_η}(f(·, η) dξ̃)(z₁) over the slice U_η = {ξ : ρ(ξ, η) < 0}.
pub fn dbar_solve_convex(
    f: Arc<dyn HFunction>,
    rho: Arc<dyn RealFunction>,
    r_max: f64,
    z: &HPoint,
    q: &QuadratureSpec,
    opts: VolumeOptions,
) -> Result<Quaternion> {
    let s = slice(f, rho, z)?;
    if s.rho.value(&s.xi) >= 0.0 {
        return Err(Error::Domain("point is not inside the slice domain".into()));
    }
    let dom = DomainSpec::sublevel(s.rho, s.xi.clone(), r_max)?;
    solve_on(s.f, &dom, &s.xi, q, opts)
}
