use super::config::ExperimentConfig;
use super::report::{num, nums, Check, Relation, Report, Table};
use super::{matched_tolerance, sample_points};
use crate::dbar::{dbar_form, Corpus, Differencing};
use crate::error::Result;
use crate::func::{BallDefining, FnH, HFunction, RealFunction};
use crate::integration::{bm_volume, leray_r, BoundaryRule, DomainSpec, QuadratureSpec, VolumeOptions};
use crate::kernels::{form_identities, leray_phi, theta_z, DifferenceMap, KernelFamily, KernelSpec, LerayMap, Nu1Placement, VRhoMap};
use crate::quat::{HPoint, Quaternion};
use std::sync::Arc;

/// Off-centre evaluation point used by the normalization and identity runs.
pub const OFF_CENTRE: [f64; 4] = [0.3, 0.2, -0.1, 0.1];

fn unit() -> FnH {
    FnH::new(1, "1", |_| Quaternion::E)
}

pub fn verify_forms(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("verify-forms", cfg);
    let tol = cfg.tol_or(1e-12);
    let mut t = Table::new("identities", &["name", "formula", "residual", "points"]);
    for c in form_identities(cfg.points_or(100), cfg.seed) {
        t.push(vec![c.name.into(), c.formula.into(), num(c.residual), c.points.to_string()]);
        r.check(Check::at_most(format!("identity/{}", c.name), c.formula, c.residual, tol));
    }
    r.tables.push(t);
    Ok(r)
}

/// |∫_{∂D} θ_z − e| for D = dom.
pub fn normalization_error(dom: &DomainSpec, z: &HPoint, q: &QuadratureSpec, family: KernelFamily) -> Result<f64> {
    let rule = BoundaryRule::new(dom, z, q, &KernelSpec::theta_z(dom.n()).with_family(family))?;
    Ok((rule.apply(&unit()) - Quaternion::E).norm())
}

pub fn kernel_norm(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("kernel-norm", cfg);
    let nodes = cfg.node_list.clone().unwrap_or_else(|| vec![8, 16, 32]);
    let tol = cfg.tol_or(1e-3);
    let floor = cfg.named_tol("rounding", 1e-14);
    let z = HPoint::from_real(&OFF_CENTRE);
    let centred = DomainSpec::ball(z.clone(), cfg.domain.radius);
    let off = DomainSpec::ball(HPoint::zeros(1), cfg.domain.radius);
    let mut t = Table::new("convergence", &["domain", "family", "nodes", "error"]);
    let mut errs = Vec::new();
    for &n in &nodes {
        let q = QuadratureSpec::gauss(n);
        let e = normalization_error(&centred, &z, &q, KernelFamily::Quaternionic)?;
        errs.push(e);
        t.push(vec!["centred".into(), "quaternionic".into(), n.to_string(), num(e)]);
        let e_off = normalization_error(&off, &z, &q, KernelFamily::Quaternionic)?;
        t.push(vec!["off-centre".into(), "quaternionic".into(), n.to_string(), num(e_off)]);
        let e_mm = normalization_error(&centred, &z, &q, KernelFamily::MatrixModel)?;
        t.push(vec!["centred".into(), "matrix-model".into(), n.to_string(), num(e_mm)]);
    }
    r.tables.push(t);
    let last = errs.last().copied().unwrap_or(f64::NAN);
    r.check(Check::at_most("norm/final", "|∫ θ_z − e| over the sphere about z at the finest rule", last, tol));
    let rises = errs.windows(2).filter(|w| w[1] >= w[0] && w[1] > floor).count();
    r.check(Check::new(
        "norm/decreasing",
        "number of refinements that fail to decrease the error above rounding level",
        rises as f64,
        Relation::Equals,
        0.0,
    ));
    r.note(format!("errors by node count: {}", nums(&errs)));
    Ok(r)
}

/// Boundary reproduction of the holomorphic corpus at random interior points,
/// with the per-point tolerance 10·|∫ θ_z − e|.
pub fn reproduce(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("reproduce", cfg);
    let q = QuadratureSpec::gauss(cfg.nodes_or(32));
    let dom = DomainSpec::ball(HPoint::zeros(1), cfg.domain.radius);
    let pts = sample_points(1, 0.7 * cfg.domain.radius, cfg.points_or(20), cfg.seed);
    let floor = cfg.named_tol("rounding", 1e-13);
    let corpus = Corpus::holomorphic_set();
    let mut t = Table::new("errors", &["family", "function", "point", "error", "tolerance"]);
    let mut worst = vec![0.0f64; corpus.len()];
    let mut worst_mm = vec![0.0f64; corpus.len()];
    let mut conj_min = f64::INFINITY;
    for z in &pts {
        let quat = BoundaryRule::new(&dom, z, &q, &KernelSpec::theta_z(1))?;
        let mm = BoundaryRule::new(&dom, z, &q, &KernelSpec::theta_z(1).with_family(KernelFamily::MatrixModel))?;
        let tol = matched_tolerance((quat.apply(&unit()) - Quaternion::E).norm(), floor);
        for (k, c) in corpus.iter().enumerate() {
            let f = c.clone().on(1);
            let e = (quat.apply(&f) - f.eval(z)).norm();
            let e_mm = (mm.apply(&f) - f.eval(z)).norm();
            worst[k] = worst[k].max(e / tol);
            worst_mm[k] = worst_mm[k].max(e_mm);
            t.push(vec!["quaternionic".into(), c.label(), nums(&z.to_real()), num(e), num(tol)]);
            t.push(vec!["matrix-model".into(), c.label(), nums(&z.to_real()), num(e_mm), String::new()]);
        }
        let f = Corpus::Conj.on(1);
        let e = (quat.apply(&f) - f.eval(z)).norm();
        conj_min = conj_min.min(e / tol);
        t.push(vec!["quaternionic".into(), "conj".into(), nums(&z.to_real()), num(e), num(tol)]);
    }
    for (k, c) in corpus.iter().enumerate() {
        r.check(Check::at_most(format!("reproduce/{}", c.label()), "max over points of |B f − f| / (10·|∫ θ_z − e|)", worst[k], 1.0));
        r.note(format!("matrix-model kernel, {}: max |B f − f| = {:.3e}", c.label(), worst_mm[k]));
    }
    r.check(Check::new("reproduce/contrast-conj", "min over points of |B z̃ − z̃| / (10·|∫ θ_z − e|)", conj_min, Relation::AtLeast, 10.0));
    r.tables.push(t);
    Ok(r)
}

/// |f − B_∂U f + B_U ∂̃f| for non-holomorphic f, with quadrature halving estimates.
pub fn mb_identity(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("mb-identity", cfg);
    let tol = cfg.tol_or(5e-2);
    let dom = DomainSpec::ball(HPoint::zeros(1), cfg.domain.radius);
    let (nb, nv) = (cfg.nodes_or(32), cfg.volume_nodes_or(16));
    let pts = sample_points(1, 0.5 * cfg.domain.radius, cfg.points_or(3), cfg.seed);
    let mut t = Table::new("residuals", &["family", "function", "point", "residual", "boundary_halving", "volume_halving"]);
    for family in [KernelFamily::Quaternionic, KernelFamily::MatrixModel] {
        for c in [Corpus::Conj, Corpus::NormSq] {
            let f: Arc<dyn HFunction> = Arc::new(c.clone().on(1));
            let g = dbar_form(f.clone(), Differencing::default());
            let opts = VolumeOptions { family, ..Default::default() };
            let mut worst: f64 = 0.0;
            for z in &pts {
                let spec = KernelSpec::theta_z(1).with_family(family);
                let b = |n: usize| BoundaryRule::new(&dom, z, &QuadratureSpec::gauss(n), &spec).map(|rule| rule.apply(&*f));
                let v = |n: usize| bm_volume(&g, &dom, z, &QuadratureSpec::gauss(n), opts).map(|q| q.value);
                let (b1, b0, v1, v0) = (b(nb)?, b((nb / 2).max(1))?, v(nv)?, v((nv / 2).max(1))?);
                let res = (f.eval(z) - b1 + v1).norm();
                worst = worst.max(res);
                t.push(vec![format!("{family:?}").to_lowercase(), c.label(), nums(&z.to_real()), num(res), num((b1 - b0).norm()), num((v1 - v0).norm())]);
            }
            let statement = "max over points of |f − B_∂U f + B_U ∂̃f|";
            match family {
                KernelFamily::Quaternionic => r.check(Check::at_most(format!("mb/{}", c.label()), statement, worst, tol)),
                KernelFamily::MatrixModel => r.note(format!("matrix-model kernel, {}: max residual {:.3e}", c.label(), worst)),
            }
        }
    }
    r.note("finite-difference step for ∂̃f is 1e-5 (central), truncation O(1e-10)");
    r.tables.push(t);
    Ok(r)
}

/// Collapse of φ to θ_z, vanishing of R for ψ = ζ − z, and Leray reproduction with ψ = v_ρ.
pub fn leray_identity(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("leray-identity", cfg);
    let dom = DomainSpec::ball(HPoint::zeros(1), cfg.domain.radius);
    let diff = DifferenceMap { n: 1 };

    let pairs = sample_points(1, cfg.domain.radius, 2 * cfg.points_or(100), cfg.seed);
    let collapse = pairs
        .chunks(2)
        .filter(|p| p[0].dist(&p[1]) >= 0.1)
        .map(|p| Ok(leray_phi(&diff, &p[0], &p[1], false, Nu1Placement::default())?.distance(&theta_z(&p[0], &p[1], Nu1Placement::default())?)))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.check(Check::at_most("leray/collapse", "max |φ^{ζ−z} − θ_z| over random pairs", collapse, cfg.named_tol("collapse", 1e-9)));

    let inner = sample_points(1, 0.5 * cfg.domain.radius, 3, cfg.seed.wrapping_add(1));
    let qv = QuadratureSpec::gauss(cfg.volume_nodes_or(8));
    let g = dbar_form(Arc::new(Corpus::Conj.on(1)), Differencing::default());
    let r_zero = inner.iter().map(|z| Ok(leray_r(&g, &dom, &diff, z, &qv, Nu1Placement::default())?.value.norm())).collect::<Result<Vec<f64>>>()?.into_iter().fold(0.0, f64::max);
    r.check(Check::at_most("leray/r-vanishes", "max |R^{ζ−z} ∂̃z̃|", r_zero, cfg.named_tol("r_zero", 1e-12)));

    let rho: Arc<dyn RealFunction> = Arc::new(BallDefining { center: HPoint::zeros(1), radius: cfg.domain.radius });
    let vmap: Arc<dyn LerayMap> = Arc::new(VRhoMap::new(rho));
    let q = QuadratureSpec::gauss(cfg.nodes_or(32));
    let floor = cfg.named_tol("rounding", 1e-13);
    let corpus = Corpus::holomorphic_set();
    let mut worst = vec![0.0f64; corpus.len()];
    let mut t = Table::new("reproduction", &["function", "point", "error", "tolerance"]);
    for z in sample_points(1, 0.7 * cfg.domain.radius, cfg.points_or(20), cfg.seed) {
        let quat = BoundaryRule::new(&dom, &z, &q, &KernelSpec::theta_z(1))?;
        let tol = matched_tolerance((quat.apply(&unit()) - Quaternion::E).norm(), floor);
        let leray = BoundaryRule::new(&dom, &z, &q, &KernelSpec::phi(1, vmap.clone()))?;
        for (k, c) in corpus.iter().enumerate() {
            let f = c.clone().on(1);
            let e = (leray.apply(&f) - f.eval(&z)).norm();
            worst[k] = worst[k].max(e / tol);
            t.push(vec![c.label(), nums(&z.to_real()), num(e), num(tol)]);
        }
    }
    for (k, c) in corpus.iter().enumerate() {
        r.check(Check::at_most(format!("leray/reproduce/{}", c.label()), "max over points of |L^{v_ρ} f − f| / (10·|∫ θ_z − e|)", worst[k], 1.0));
    }
    r.tables.push(t);

    let f: Arc<dyn HFunction> = Arc::new(Corpus::Conj.on(1));
    let mut worst_rep: f64 = 0.0;
    for z in &inner {
        let l = BoundaryRule::new(&dom, z, &q, &KernelSpec::phi(1, vmap.clone()))?.apply(&*f);
        let rv = leray_r(&g, &dom, &*vmap, z, &qv, Nu1Placement::default())?.value;
        let b = bm_volume(&g, &dom, z, &QuadratureSpec::gauss(cfg.volume_nodes_or(16)), VolumeOptions::default())?.value;
        worst_rep = worst_rep.max((f.eval(z) - l + rv + b).norm());
    }
    r.check(Check::at_most("leray/representation", "max |f − L^ψ f + R^ψ ∂̃f + B_U ∂̃f| for f = z̃, ψ = v_ρ", worst_rep, cfg.named_tol("representation", 5e-2)));
    Ok(r)
}
