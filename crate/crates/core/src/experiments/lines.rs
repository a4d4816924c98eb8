use super::config::ExperimentConfig;
use super::report::{num, nums, Check, Relation, Report, Table};
use crate::error::Result;
use crate::func::{FnH, HFunction};
use crate::integration::{cauchy_line, torus_cauchy_green, QuadratureSpec, Scheme, TorusSpec};
use crate::quat::{HPoint, PathSpec, PureUnit, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn functions() -> Vec<FnH> {
    let (a, b, c) = (Quaternion::new(0.5, 1.0, 0.0, -1.0), Quaternion::new(2.0, 0.0, 1.0, 0.0), Quaternion::new(0.0, 0.0, 0.0, 1.0));
    vec![
        FnH::new(1, "constant", move |_| c),
        FnH::new(1, "z", |z| z[0]),
        FnH::new(1, "z^2", |z| z[0] * z[0]),
        FnH::new(1, "azb+c", move |z| a * z[0] * b + c),
    ]
}

fn norm_sq() -> FnH {
    FnH::new(1, "norm-sq", |z| Quaternion::real(z[0].norm_sqr()))
}

fn random_quaternion(rng: &mut ChaCha8Rng, r: f64) -> Quaternion {
    Quaternion::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

pub fn line_cauchy(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("line-cauchy", cfg);
    let tol = cfg.tol_or(1e-6);
    let nodes = cfg.nodes_or(64);
    let radius = 0.5 * cfg.domain.radius;
    let axes = [PureUnit::I, PureUnit::J, PureUnit::normalize(Quaternion::new(0.0, 1.0, 1.0, 0.0))?];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<Quaternion> = (0..cfg.points_or(5)).map(|_| random_quaternion(&mut rng, 0.5)).collect();
    let mut t = Table::new("loops", &["function", "axis", "winding", "point", "error"]);
    let fs = functions();
    let mut worst = vec![0.0f64; fs.len()];
    let mut contrast = f64::INFINITY;
    for axis in axes {
        for wind in [1i64, 2] {
            let q = QuadratureSpec::gauss(nodes * wind as usize).with_scheme(Scheme::Trapezoid);
            for z in &pts {
                let path = PathSpec::circle(*z, radius, axis, wind as f64);
                for (k, f) in fs.iter().enumerate() {
                    let e = (cauchy_line(f, &path, *z, axis, wind, &q)? - f.eval(&HPoint::single(*z))).norm();
                    worst[k] = worst[k].max(e);
                    t.push(vec![f.label(), nums(&axis.get().to_array()), wind.to_string(), nums(&z.to_array()), num(e)]);
                }
                let g = norm_sq();
                contrast = contrast.min((cauchy_line(&g, &path, *z, axis, wind, &q)? - g.eval(&HPoint::single(*z))).norm());
            }
        }
    }
    for (f, w) in fs.iter().zip(&worst) {
        r.check(Check::at_most(format!("line/{}", f.label()), "max |(2πn)^{-1}(∮ f(ζ)(ζ−z)^{-1}dζ) M̃ − f(z)| over axes, windings, points", *w, tol));
    }
    r.check(Check::new("line/contrast-norm-sq", "min defect for |z|², expected r²", contrast, Relation::AtLeast, 100.0 * tol));
    r.tables.push(t);
    Ok(r)
}

pub fn torus_cg(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("torus-cg", cfg);
    let tol = cfg.tol_or(1e-6);
    let q = QuadratureSpec::gauss(cfg.nodes_or(16)).with_scheme(Scheme::Trapezoid);
    let torus = TorusSpec::standard([0.2, 0.3, 0.4].map(|x| x * cfg.domain.radius));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts: Vec<Quaternion> = (0..cfg.points_or(3)).map(|_| random_quaternion(&mut rng, 0.5)).collect();
    let mut t = Table::new("torus", &["function", "point", "boundary_error", "correction", "value_error"]);
    let mut fs = functions();
    fs.push(norm_sq());
    let mut boundary_worst = vec![0.0f64; fs.len()];
    let mut value_worst = vec![0.0f64; fs.len()];
    for z in &pts {
        for (k, f) in fs.iter().enumerate() {
            let res = torus_cauchy_green(f, &torus, *z, &q)?;
            let fz = f.eval(&HPoint::single(*z));
            boundary_worst[k] = boundary_worst[k].max((res.boundary - fz).norm());
            value_worst[k] = value_worst[k].max((res.value - fz).norm());
            t.push(vec![f.label(), nums(&z.to_array()), num((res.boundary - fz).norm()), num(res.correction.norm()), num((res.value - fz).norm())]);
        }
    }
    for (k, f) in fs.iter().enumerate() {
        if f.label() == "norm-sq" {
            r.check(Check::new("torus/contrast-norm-sq", "boundary term alone misses |z|² by r₁²+r₂²+r₃²", boundary_worst[k], Relation::AtLeast, 100.0 * tol));
            r.check(Check::at_most("torus/corrected-norm-sq", "|boundary − correction − f(z)| for |z|²", value_worst[k], tol));
        } else {
            r.check(Check::at_most(format!("torus/{}", f.label()), "|boundary term − f(z)|", boundary_worst[k], tol));
            r.check(Check::at_most(format!("torus/corrected-{}", f.label()), "|boundary − correction − f(z)|", value_worst[k], tol));
        }
    }
    r.tables.push(t);
    Ok(r)
}
