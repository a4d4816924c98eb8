use super::config::ExperimentConfig;
use super::report::{num, nums, Check, Report, Table};
use crate::dbar::{compat_check, dbar_apply, dbar_solve, dbar_solve_residual, Corpus, Differencing, Support};
use crate::error::Result;
use crate::func::{BallDefining, FnH, HFunction, RealFunction};
use crate::integration::{DomainSpec, QuadratureSpec, VolumeOptions};
use crate::quat::{HPoint, MatrixModel, Quaternion};
use rayon::prelude::*;
use std::sync::Arc;

/// Every point of a g⁴ grid on [−a, a]⁴, in row-major order.
pub fn cube_grid(g: usize, a: f64) -> Vec<HPoint> {
    let step = |k: usize| if g == 1 { 0.0 } else { -a + 2.0 * a * k as f64 / (g - 1) as f64 };
    (0..g.pow(4))
        .map(|idx| HPoint::from_real(&(0..4).map(|d| step(idx / g.pow(3 - d as u32) % g)).collect::<Vec<_>>()))
        .collect()
}

fn bump(amp: Quaternion, radius: f64) -> Arc<dyn HFunction> {
    Arc::new(Corpus::Bump { amp, center: vec![0.0; 4], radius }.on(1))
}

pub fn dbar_solve_run(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("dbar-solve", cfg);
    let scale = cfg.domain.radius;
    let dom = DomainSpec::ball(HPoint::zeros(1), scale);
    let support = Support { center: HPoint::zeros(1), radius: 0.5 * scale };
    let q = QuadratureSpec::gauss(cfg.volume_nodes_or(8));
    let opts = VolumeOptions::default();
    let f = bump(Quaternion::E, support.radius);

    let grid = cube_grid(cfg.grid_or(5), 0.4 * scale);
    let residuals = grid.par_iter().map(|z| dbar_solve_residual(f.clone(), &support, &dom, z, &q, opts)).collect::<Result<Vec<_>>>()?;
    let mut t = Table::new("residuals", &["point", "u", "dbar_u_tbar", "f", "residual"]);
    for s in &residuals {
        t.push(vec![nums(&s.point), nums(&s.u.to_array()), nums(&s.dbar_u.t_bar.to_array()), nums(&s.f.to_array()), num(s.residual)]);
    }
    r.tables.push(t);
    let worst = residuals.iter().map(|s| s.residual).fold(0.0, f64::max);
    r.check(Check::at_most("solve/residual", "max over the grid of |∂̃u − f| on the .I channel", worst, cfg.tol_or(5e-2)));

    let far: Vec<HPoint> = Quaternion::BASIS.iter().map(|b| HPoint::single(*b * (0.7 * scale))).collect();
    let cr = far
        .iter()
        .map(|z| dbar_solve_residual(f.clone(), &support, &dom, z, &q, opts).map(|s| s.cr))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.check(Check::at_most("solve/far-field", "max CR residual of u outside the support", cr, cfg.named_tol("far_field", 1e-3)));

    let g = bump(Quaternion::new(0.0, 1.0, -0.5, 2.0), support.radius);
    let (f2, g2) = (f.clone(), g.clone());
    let sum: Arc<dyn HFunction> = Arc::new(FnH::new(1, "f+2g", move |z| f2.eval(z) + g2.eval(z) * 2.0));
    let z = HPoint::single(Quaternion::new(0.1, -0.2, 0.05, 0.15) * scale);
    let u = |h: Arc<dyn HFunction>| dbar_solve(h, &support, &dom, &z, &q, opts);
    let (us, uf, ug) = (u(sum)?, u(f.clone())?, u(g)?);
    let lin = (us - uf - ug * 2.0).norm() / (1.0 + us.norm());
    r.check(Check::at_most("solve/linearity", "|u(f + 2g) − u(f) − 2u(g)| / (1 + |u(f + 2g)|)", lin, cfg.named_tol("linearity", 1e-10)));

    let rho: Arc<dyn RealFunction> = Arc::new(BallDefining { center: HPoint::zeros(1), radius: scale });
    let sub = DomainSpec::sublevel(rho, HPoint::zeros(1), 2.0 * scale)?;
    let s = dbar_solve_residual(f, &support, &sub, &z, &q, opts)?;
    r.note(format!("sublevel-domain solve at {}: residual {:.3e}", nums(&z.to_real()), s.residual));
    Ok(r)
}

fn potential_components() -> Vec<Arc<dyn HFunction>> {
    let g = Arc::new(FnH::new(2, "g", |z| {
        let (a, b) = (MatrixModel::from(z[0]), MatrixModel::from(z[1]));
        Quaternion::real(z[0].norm_sqr()) * z[1] + MatrixModel::new(a.t * b.t.conj(), a.u * b.u).to_quaternion()
    }));
    (0..2)
        .map(|j| {
            let g = g.clone();
            Arc::new(FnH::new(2, format!("dbar{j} g"), move |z| dbar_apply(&*g, z, j, Differencing::Central(1e-4)).map(|c| c.t_bar).unwrap_or(Quaternion::ZERO)))
                as Arc<dyn HFunction>
        })
        .collect()
}

pub fn compat(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("compat", cfg);
    let tol = cfg.tol_or(1e-5);
    let coarse = Differencing::Central(1e-3);
    let grid: Vec<HPoint> = super::sample_points(2, 0.5 * cfg.domain.radius, cfg.points_or(10), cfg.seed);
    let zero: Arc<dyn HFunction> = Arc::new(FnH::new(2, "0", |_| Quaternion::ZERO));
    let skew: Arc<dyn HFunction> = Arc::new(FnH::new(2, "skew", |z| z[1].conj() * 2.0));
    let mut t = Table::new("cases", &["case", "max_asymmetry", "worst", "pass"]);
    let cases: [(&str, Vec<Arc<dyn HFunction>>, bool); 3] =
        [("zero", vec![zero.clone(), zero.clone()], true), ("potential", potential_components(), true), ("skew", vec![skew, zero], false)];
    for (name, fs, expect) in cases {
        let rep = compat_check(&fs, &grid, coarse, tol)?;
        t.push(vec![name.into(), num(rep.max_asymmetry), format!("{:?}", rep.worst), rep.pass.to_string()]);
        let statement = if expect { "∂̃_k f_j = ∂̃_j f_k holds on the grid" } else { "the asymmetric pair is rejected" };
        r.check(Check::flag(format!("compat/{name}"), statement, rep.pass == expect));
    }
    r.tables.push(t);
    Ok(r)
}
