use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Everything that determines a run. Unset fields fall back to per-experiment defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub seed: u64,
    /// Quadrature nodes per axis (or Monte Carlo samples).
    pub nodes: Option<usize>,
    /// Node counts for convergence tables.
    pub node_list: Option<Vec<usize>>,
    /// Nodes per axis for volume integrals.
    pub volume_nodes: Option<usize>,
    /// Main tolerance of the experiment.
    pub tol: Option<f64>,
    /// Named tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
    /// Number of random sample points.
    pub points: Option<usize>,
    /// Grid points per real axis.
    pub grid: Option<usize>,
    pub domain: DomainConfig,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainConfig {
    pub radius: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        Self { radius: 1.0 }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&s)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: Option<usize>| match v {
            Some(0) => Err(Error::Config(format!("{name} must be positive"))),
            _ => Ok(()),
        };
        positive("nodes", self.nodes)?;
        positive("volume_nodes", self.volume_nodes)?;
        positive("points", self.points)?;
        positive("grid", self.grid)?;
        if let Some(l) = &self.node_list {
            if l.is_empty() || l.contains(&0) {
                return Err(Error::Config("node_list must hold positive counts".into()));
            }
        }
        let tols = self.tol.iter().chain(self.tolerances.values());
        if tols.clone().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::Config("tolerances must be finite and non-negative".into()));
        }
        if !(self.domain.radius.is_finite() && self.domain.radius > 0.0) {
            return Err(Error::Config("domain radius must be positive".into()));
        }
        Ok(())
    }

    pub fn nodes_or(&self, d: usize) -> usize {
        self.nodes.unwrap_or(d)
    }

    pub fn volume_nodes_or(&self, d: usize) -> usize {
        self.volume_nodes.unwrap_or(d)
    }

    pub fn points_or(&self, d: usize) -> usize {
        self.points.unwrap_or(d)
    }

    pub fn grid_or(&self, d: usize) -> usize {
        self.grid.unwrap_or(d)
    }

    pub fn tol_or(&self, d: f64) -> f64 {
        self.tol.unwrap_or(d)
    }

    pub fn named_tol(&self, name: &str, d: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_sections() {
        let cfg = ExperimentConfig::from_toml_str(
            "experiment = \"kernel-norm\"\nseed = 7\nnode_list = [8, 16]\n[tolerances]\nfar_field = 1e-3\n[domain]\nradius = 0.5\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.node_list, Some(vec![8, 16]));
        assert_eq!(cfg.named_tol("far_field", 1.0), 1e-3);
        assert_eq!(cfg.domain.radius, 0.5);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ExperimentConfig::from_toml_str("seed = \"x\""), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_toml_str("unknown = 1").is_err());
        assert!(ExperimentConfig::from_toml_str("nodes = 0").is_err());
        assert!(ExperimentConfig::from_toml_str("tol = -1.0").is_err());
    }
}
