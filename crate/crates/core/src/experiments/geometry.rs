use super::config::ExperimentConfig;
use super::report::{num, nums, Check, Relation, Report, Table};
use super::sample_points;
use crate::error::{Error, Result};
use crate::func::{BallDefining, FnMap, FnReal, HFunction, HMap, RealFunction};
use crate::geometry::{exponential_family, hull_estimate, leray_margin, plurisubharmonic_check, separating_exponential, strict_convexity};
use crate::jacobi::{chain_check, jacobi_real, local_inverse, quadratic_example, rank_r, InverseOptions, RANK_TOL};
use crate::quat::{HPoint, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn cube(rng: &mut ChaCha8Rng, count: usize, a: f64) -> Vec<HPoint> {
    (0..count).map(|_| HPoint::from_real(&(0..4).map(|_| rng.gen_range(-a..a)).collect::<Vec<_>>())).collect()
}

pub fn hull(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("hull", cfg);
    let tol = cfg.tol_or(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grid = super::dbar::cube_grid(cfg.grid_or(4), 1.5 * cfg.domain.radius);
    let mut t = Table::new("sets", &["set", "size", "members", "family", "violations", "max_distance", "max_anchor_defect", "max_sup_on_k"]);
    let (mut violations, mut anchor, mut sup_k) = (0usize, 0.0f64, 0.0f64);
    for s in 0..cfg.points_or(20) {
        let size = rng.gen_range(5..=8);
        let k = cube(&mut rng, size, cfg.domain.radius);
        let registry = exponential_family(&k, &grid);
        let (mut a_set, mut s_set) = (0.0f64, 0.0f64);
        for w in &grid {
            match separating_exponential(&k, w) {
                Ok(f) => {
                    a_set = a_set.max((f.eval(w).norm() - 1.0).abs());
                    s_set = s_set.max(k.iter().map(|p| f.eval(p).norm()).fold(0.0, f64::max));
                }
                Err(Error::NoSeparation(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let family: Vec<Arc<dyn HFunction>> = registry.iter().cloned().map(|f| Arc::new(f) as Arc<dyn HFunction>).collect();
        let rep = hull_estimate(&k, &grid, &family, registry, tol)?;
        violations += rep.hull_violations;
        anchor = anchor.max(a_set);
        sup_k = sup_k.max(s_set);
        t.push(vec![
            s.to_string(),
            size.to_string(),
            rep.members.len().to_string(),
            rep.family_size.to_string(),
            rep.hull_violations.to_string(),
            num(rep.max_hull_distance),
            num(a_set),
            num(s_set),
        ]);
    }
    r.tables.push(t);
    r.check(Check::new("hull/violations", "grid points kept by the exponential family but outside conv(K)", violations as f64, Relation::Equals, 0.0));
    r.check(Check::at_most("hull/anchor", "max ||f(w)| − 1| over separating exponentials", anchor, cfg.named_tol("anchor", 1e-12)));
    r.check(Check::new("hull/separation", "max over certificates of sup_K |f|", sup_k, Relation::Below, 1.0));
    Ok(r)
}

pub fn convexity(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("convexity", cfg);
    let h = 1e-4;
    let samples = sample_points(2, 2.0, 20, cfg.seed);
    let ball = strict_convexity(&BallDefining::unit(2), &samples, h);
    r.check(Check::at_most("convexity/ball-eps", "|ε₀ − 2| for |z|² − 1", (ball.eps0 - 2.0).abs(), 1e-6));
    let saddle = FnReal::new(2, |z| z[0].w * z[0].w - z[0].x * z[0].x);
    r.check(Check::flag("convexity/saddle", "w² − x² is rejected", !strict_convexity(&saddle, &samples, h).pass));
    let quartic = FnReal::new(2, |z| z.norm_sqr() + 0.1 * z[0].w.powi(4) - 1.0);
    let q = strict_convexity(&quartic, &samples, h);
    r.check(Check::new("convexity/quartic", "ε₀ of |z|² + 0.1 w⁴ − 1", q.eps0, Relation::AtLeast, 2.0 - 1e-6));

    let rho = BallDefining::unit(2);
    let count = cfg.points_or(10_000);
    let zs = sample_points(2, 1.0, count, cfg.seed.wrapping_add(1));
    let zetas: Vec<HPoint> = sample_points(2, 1.0, count, cfg.seed.wrapping_add(2)).into_iter().map(|p| p.scale(1.0 / p.norm().max(1e-300))).collect();
    let (mut min_margin, mut dev) = (f64::INFINITY, 0.0f64);
    for (zeta, z) in zetas.iter().zip(&zs) {
        let m = leray_margin(&rho, zeta, z, ball.eps0.min(2.0));
        min_margin = min_margin.min(m);
        dev = dev.max((m - zeta.dist(z).powi(2) / 2.0).abs());
    }
    r.check(Check::new("convexity/margin-min", "min Re⟨v_ρ(ζ); ζ−z⟩ − [ρ(ζ) − ρ(z) + ε₀|ζ−z|²/4] over ζ ∈ ∂U", min_margin, Relation::AtLeast, -1e-12));
    r.check(Check::at_most("convexity/margin-exact", "max |margin − |ζ−z|²/2| for the unit ball", dev, cfg.tol_or(1e-10)));
    r.note(format!("ε₀ estimate for the ball: {} from {} samples", num(ball.eps0), ball.samples));
    Ok(r)
}

pub fn psh(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("psh", cfg);
    let tol = cfg.tol_or(1e-6);
    let grid = [Quaternion::ZERO, Quaternion::new(0.3, -0.2, 0.1, 0.5)];
    let bases = sample_points(2, 1.0, 3, cfg.seed);
    let dirs = sample_points(2, 1.0, 3, cfg.seed.wrapping_add(1));
    let mut t = Table::new("functions", &["function", "min_laplacian", "max_laplacian", "subharmonic", "strict"]);
    let cases: [(&str, Box<dyn RealFunction>, bool, bool); 4] = [
        ("norm-sq", Box::new(FnReal::new(2, |z| z.norm_sqr())), true, true),
        ("ball", Box::new(BallDefining::unit(2)), true, true),
        ("linear", Box::new(FnReal::new(2, |z| z[0].w)), true, false),
        ("neg-norm-sq", Box::new(FnReal::new(2, |z| -z.norm_sqr())), false, false),
    ];
    for (name, rho, sub, strict) in cases {
        let rep = plurisubharmonic_check(&*rho, &bases, &dirs, &grid, 1e-3, tol);
        t.push(vec![name.into(), num(rep.min_laplacian), num(rep.max_laplacian), rep.subharmonic.to_string(), rep.strict.to_string()]);
        r.check(Check::flag(format!("psh/{name}"), format!("subharmonic = {sub}, strict = {strict} along every line"), rep.subharmonic == sub && rep.strict == strict));
    }
    r.tables.push(t);
    Ok(r)
}

fn sandwich(a: Quaternion, b: Quaternion) -> FnMap {
    FnMap::new(1, 1, move |z| HPoint::single(a * z[0] * b))
}

pub fn jacobi(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("jacobi", cfg);
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let quat = |rng: &mut ChaCha8Rng| Quaternion::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let mut chain: f64 = 0.0;
    for _ in 0..cfg.points_or(100) {
        let f = sandwich(quat(&mut rng), quat(&mut rng));
        let g = sandwich(quat(&mut rng), quat(&mut rng));
        let z = HPoint::single(quat(&mut rng));
        chain = chain.max(chain_check(&f, &g, &z, h)?);
    }
    let quad = quadratic_example(0.3);
    let z = HPoint::single(Quaternion::new(0.2, 0.3, 0.1, 0.0));
    chain = chain.max(chain_check(&*quad, &sandwich(Quaternion::K, Quaternion::I), &z, h)?);
    r.check(Check::at_most("jacobi/chain", "max ‖J_{g∘f} − J_g(f) J_f‖", chain, cfg.named_tol("chain", 1e-8)));

    let rank = |m: &dyn HMap, at: &HPoint| rank_r(&jacobi_real(m, at, h), RANK_TOL);
    let projection = FnMap::new(1, 1, |z| HPoint::single((z[0] - Quaternion::I * z[0] * Quaternion::I) * 0.5));
    let ranks = [
        ("identity", rank(&FnMap::identity(1), &z), 4),
        ("projection", rank(&projection, &z), 2),
        ("zero", rank(&FnMap::new(1, 1, |_| HPoint::zeros(1)), &z), 0),
    ];
    let mut t = Table::new("ranks", &["map", "rank", "expected"]);
    for (name, got, want) in ranks {
        t.push(vec![name.into(), got.to_string(), want.to_string()]);
        r.check(Check::new(format!("jacobi/rank-{name}"), "real rank of the Jacobian", got as f64, Relation::Equals, want as f64));
    }
    r.tables.push(t);

    let opts = InverseOptions { seed: cfg.seed, ..InverseOptions::default() };
    let inv = local_inverse(quadratic_example(0.05), &HPoint::zeros(1), opts)?;
    r.check(Check::at_most("jacobi/inverse", "sup over test points of |F(ζ + h(ζ)) − ζ|", inv.certificate, cfg.tol_or(1e-6)));
    let rejected = matches!(local_inverse(Arc::new(projection), &HPoint::zeros(1), opts), Err(Error::RankDeficient { .. }));
    r.check(Check::flag("jacobi/rank-deficient", "a rank-deficient Jacobian is rejected", rejected));
    r.note(format!("inverse at {}: {}", nums(&[0.2, -0.1, 0.3, 0.1]), nums(&inv.eval(&HPoint::single(Quaternion::new(0.2, -0.1, 0.3, 0.1))).to_real())));
    Ok(r)
}
