//! Experiment runners producing machine-readable reports.

mod config;
pub mod dbar;
pub mod geometry;
pub mod kernels;
pub mod lines;
mod report;

pub use config::{DomainConfig, ExperimentConfig};
pub use report::{num, nums, Check, Relation, Report, Table};

use crate::error::{Error, Result};
use crate::quat::HPoint;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Experiment {
    VerifyForms,
    KernelNorm,
    Reproduce,
    MbIdentity,
    LerayIdentity,
    LineCauchy,
    TorusCg,
    DbarSolve,
    Compat,
    Hull,
    Convexity,
    Psh,
    Jacobi,
}

impl Experiment {
    pub const ALL: [Experiment; 13] = [
        Self::VerifyForms,
        Self::KernelNorm,
        Self::Reproduce,
        Self::MbIdentity,
        Self::LerayIdentity,
        Self::LineCauchy,
        Self::TorusCg,
        Self::DbarSolve,
        Self::Compat,
        Self::Hull,
        Self::Convexity,
        Self::Psh,
        Self::Jacobi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::VerifyForms => "verify-forms",
            Self::KernelNorm => "kernel-norm",
            Self::Reproduce => "reproduce",
            Self::MbIdentity => "mb-identity",
            Self::LerayIdentity => "leray-identity",
            Self::LineCauchy => "line-cauchy",
            Self::TorusCg => "torus-cg",
            Self::DbarSolve => "dbar-solve",
            Self::Compat => "compat",
            Self::Hull => "hull",
            Self::Convexity => "convexity",
            Self::Psh => "psh",
            Self::Jacobi => "jacobi",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Runs one experiment. Assertion failures are reported in the result, not as errors.
pub fn run(exp: Experiment, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if let Some(name) = &cfg.experiment {
        if name != exp.name() {
            return Err(Error::Config(format!("config is for `{name}`, not `{exp}`")));
        }
    }
    match exp {
        Experiment::VerifyForms => kernels::verify_forms(cfg),
        Experiment::KernelNorm => kernels::kernel_norm(cfg),
        Experiment::Reproduce => kernels::reproduce(cfg),
        Experiment::MbIdentity => kernels::mb_identity(cfg),
        Experiment::LerayIdentity => kernels::leray_identity(cfg),
        Experiment::LineCauchy => lines::line_cauchy(cfg),
        Experiment::TorusCg => lines::torus_cg(cfg),
        Experiment::DbarSolve => dbar::dbar_solve_run(cfg),
        Experiment::Compat => dbar::compat(cfg),
        Experiment::Hull => geometry::hull(cfg),
        Experiment::Convexity => geometry::convexity(cfg),
        Experiment::Psh => geometry::psh(cfg),
        Experiment::Jacobi => geometry::jacobi(cfg),
    }
}

/// Seeded points uniform in the ball of the given radius about 0 in H^n.
pub fn sample_points(n: usize, radius: f64, count: usize, seed: u64) -> Vec<HPoint> {
    crate::jacobi::ball_test_points(n, radius, count, seed)
}

/// Reproduction tolerance matched to the kernel normalization error at the same point.
pub fn matched_tolerance(norm_err: f64, floor: f64) -> f64 {
    10.0 * norm_err.max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ExperimentConfig {
        ExperimentConfig { points: Some(2), nodes: Some(8), volume_nodes: Some(4), grid: Some(2), ..Default::default() }
    }

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert!(matches!("nope".parse::<Experiment>(), Err(Error::Config(_))));
    }

    #[test]
    fn config_must_match_experiment() {
        let cfg = ExperimentConfig { experiment: Some("hull".into()), ..quick() };
        assert!(run(Experiment::Psh, &cfg).is_err());
    }

    #[test]
    fn cheap_runs_are_deterministic() {
        for e in [Experiment::VerifyForms, Experiment::LineCauchy, Experiment::Compat, Experiment::Psh, Experiment::Jacobi] {
            let a = run(e, &quick()).unwrap().to_json().unwrap();
            let b = run(e, &quick()).unwrap().to_json().unwrap();
            assert_eq!(a, b, "{e}");
        }
    }

    #[test]
    fn line_and_torus_pass() {
        assert!(run(Experiment::LineCauchy, &quick()).unwrap().pass);
        let r = run(Experiment::TorusCg, &ExperimentConfig { points: Some(1), ..Default::default() }).unwrap();
        assert!(r.pass, "{}", r.summary());
    }
}
