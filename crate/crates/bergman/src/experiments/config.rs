//! Run configuration shared by every experiment and CLI subcommand.

use std::f64::consts::LN_2;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::measure::QuadratureSpec;
use crate::symbol::Symbol;
use crate::tree::{BergmanTree, TreeParams};

/// All run parameters. JSON keys are exactly the field names; unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub n: usize,
    pub gamma: f64,
    /// Tree parameter; derived from `dyadic_level` when absent.
    pub lambda: Option<f64>,
    /// `N₀` of the dyadic disc tree, `λ = ln 2 · 2^{−N₀}`.
    pub dyadic_level: Option<u32>,
    pub depth: usize,
    /// `R` in `S̃_α = ∪_{ω ∈ N_α^R} ∪_{β ≥ ω} K_β`.
    pub neighbor_radius: f64,
    /// Separation scale `M` of the coloring.
    pub coloring_scale: f64,
    pub p_list: Vec<f64>,
    /// Symbol literal `[[a, b, re, im(, s)], …]`.
    pub symbol: Value,
    pub quadrature: QuadratureSpec,
    /// Degree cap `D` of the operator model.
    pub degree_cap: usize,
    /// Output directory.
    pub output: Option<String>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 1,
            gamma: 0.0,
            lambda: None,
            dyadic_level: Some(3),
            depth: 8,
            neighbor_radius: 1.0,
            coloring_scale: 4.0,
            p_list: vec![1.5],
            symbol: serde_json::json!([[0, 1, 1.0, 0.0]]),
            quadrature: QuadratureSpec::default(),
            degree_cap: 128,
            output: None,
            seed: 0,
        }
    }
}

/// `p` with its margin `δ = p(n+1+γ) − 2n` over the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PMargin {
    pub p: f64,
    pub delta: f64,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if !(self.gamma > -1.0) || !self.gamma.is_finite() {
            return Err(Error::Config(format!("gamma must exceed −1, got {}", self.gamma)));
        }
        if self.p_list.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::Config("every p must be positive".into()));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.dyadic_level.is_some() && self.n != 1 {
            return Err(Error::Config("dyadic trees exist only for n = 1".into()));
        }
        let lam = self.lambda()?;
        if !(lam > 0.0) {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if let (Some(l), Some(n0)) = (self.lambda, self.dyadic_level) {
            if (l - LN_2 / (1u64 << n0) as f64).abs() > 1e-12 * l {
                return Err(Error::Config(format!("lambda {l} disagrees with dyadic_level {n0}")));
            }
        }
        if self.neighbor_radius < 6.0 * lam {
            return Err(Error::Config(format!(
                "neighbor_radius {} must be at least 6λ = {} so that Q ⊆ S̃",
                self.neighbor_radius,
                6.0 * lam
            )));
        }
        if self.coloring_scale < 1.0 {
            return Err(Error::Config("coloring_scale must be at least 1".into()));
        }
        if self.degree_cap == 0 {
            return Err(Error::Config("degree_cap must be positive".into()));
        }
        self.quadrature.validate()?;
        self.symbol()?;
        Ok(())
    }

    pub fn lambda(&self) -> Result<f64> {
        match (self.lambda, self.dyadic_level) {
            (Some(l), _) => Ok(l),
            (None, Some(n0)) => Ok(LN_2 / (1u64 << n0) as f64),
            (None, None) => Err(Error::Config("either lambda or dyadic_level is required".into())),
        }
    }

    pub fn symbol(&self) -> Result<Symbol> {
        Symbol::from_literal(self.n, &self.symbol)
    }

    /// `2n/(n+1+γ)`.
    pub fn cutoff(&self) -> f64 {
        2.0 * self.n as f64 / (self.n as f64 + 1.0 + self.gamma)
    }

    pub fn margins(&self) -> Vec<PMargin> {
        let m = self.n as f64 + 1.0 + self.gamma;
        self.p_list.iter().map(|&p| PMargin { p, delta: p * m - 2.0 * self.n as f64 }).collect()
    }

    pub fn tree_params(&self, depth: usize) -> Result<TreeParams> {
        Ok(match self.dyadic_level {
            Some(n0) => TreeParams::dyadic(n0, depth),
            None => TreeParams::generic(self.n, self.lambda()?, depth, self.seed),
        })
    }

    pub fn build_tree(&self, depth: usize) -> Result<BergmanTree> {
        BergmanTree::build(self.tree_params(depth)?)
    }

    /// Copy with other `γ`, symbol and `p` values.
    pub fn with(&self, gamma: f64, symbol: &Symbol, p_list: &[f64]) -> Self {
        Self { gamma, symbol: symbol.to_literal(), p_list: p_list.to_vec(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing_and_validation() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"gamma": 2.0, "p_list": [0.7]}"#).unwrap();
        cfg.validate().unwrap();
        assert!((cfg.cutoff() - 0.5).abs() < 1e-15);
        assert!((cfg.margins()[0].delta - 0.8).abs() < 1e-12);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"gama": 2.0}"#).is_err());
        let bad = ExperimentConfig { gamma: -1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = ExperimentConfig { lambda: Some(0.3), ..Default::default() };
        assert!(bad.validate().is_err());
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&json).unwrap(), cfg);
    }
}
