//! Config-driven experiments producing structured [`Report`]s.

pub mod common;
pub mod config;
pub mod cutoff;
pub mod discretization;
pub mod geometry;
pub mod identities;
pub mod report;
pub mod reverse;
pub mod theorem;

use std::sync::Arc;

pub use config::{ExperimentConfig, PMargin};
pub use report::{Assertion, Num, Report, Table};

use crate::error::{Error, Result};

/// Identifiers accepted by [`verify`].
pub const CHECKS: &[&str] = &[
    "geometry-identities",
    "operator-identities",
    "hankel-spectrum",
    "mo-eval",
    "op-spectrum",
    "sphere-net",
    "tree-estimates",
    "separation",
    "carleson",
    "kernel-ratio",
    "coloring",
    "counting",
    "chains",
    "entrywise-schatten",
    "reverse-cs",
    "discretization-chain",
    "theorem-ratio",
    "cutoff",
];

/// Runs one named check.
pub fn verify(id: &str, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let tree = || -> Result<Arc<crate::tree::BergmanTree>> { Ok(Arc::new(cfg.build_tree(cfg.depth)?)) };
    match id {
        "geometry-identities" => identities::geometry_identities(cfg),
        "operator-identities" => identities::operator_identities(cfg),
        "hankel-spectrum" => identities::hankel_spectrum(cfg),
        "mo-eval" => identities::mo_eval(cfg),
        "op-spectrum" => identities::op_spectrum(cfg, None),
        "sphere-net" => geometry::sphere_net(cfg, &tree()?),
        "tree-estimates" => geometry::tree_estimates(cfg, &tree()?),
        "separation" => geometry::separation(cfg, &tree()?),
        "carleson" => geometry::carleson(cfg, &tree()?),
        "kernel-ratio" => geometry::kernel_ratio(cfg),
        "coloring" => geometry::coloring(cfg, &tree()?),
        "counting" => geometry::counting(cfg, &tree()?),
        "chains" => geometry::chains(cfg, &tree()?),
        "entrywise-schatten" => geometry::entrywise_schatten(cfg),
        "reverse-cs" => reverse::reverse_cs(cfg),
        "discretization-chain" => discretization::discretization_chain(cfg),
        "theorem-ratio" => theorem::theorem_ratio(cfg),
        "cutoff" => cutoff::cutoff(cfg),
        other => Err(Error::Config(format!("unknown check {other:?}; expected one of {}", CHECKS.join(", ")))),
    }
}

/// Every tree and geometry check against one tree, merged into a single report.
pub fn tree_suite(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let tree = Arc::new(cfg.build_tree(cfg.depth)?);
    let mut r = Report::new("tree-check", cfg);
    r.absorb("sphere-net", geometry::sphere_net(cfg, &tree)?);
    r.absorb("tree-estimates", geometry::tree_estimates(cfg, &tree)?);
    r.absorb("separation", geometry::separation(cfg, &tree)?);
    r.absorb("carleson", geometry::carleson(cfg, &tree)?);
    r.absorb("coloring", geometry::coloring(cfg, &tree)?);
    r.absorb("counting", geometry::counting(cfg, &tree)?);
    r.absorb("chains", geometry::chains(cfg, &tree)?);
    Ok(r)
}

/// The checks that need no tree, followed by the tree suite and the
/// experiments that apply to the configuration.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    cfg.validate()?;
    let mut out = vec![
        identities::geometry_identities(cfg)?,
        identities::operator_identities(cfg)?,
        identities::hankel_spectrum(cfg)?,
        identities::mo_eval(cfg)?,
        geometry::entrywise_schatten(cfg)?,
        geometry::kernel_ratio(cfg)?,
        tree_suite(cfg)?,
    ];
    if cfg.n == 1 {
        out.push(identities::op_spectrum(cfg, None)?);
        out.push(cutoff::cutoff(cfg)?);
    }
    if cfg.n == 1 && cfg.dyadic_level.is_some() {
        out.push(reverse::reverse_cs(cfg)?);
        if cfg.p_list.iter().all(|&p| p > cfg.cutoff()) {
            out.push(discretization::discretization_chain(cfg)?);
        }
        out.push(theorem::theorem_ratio(cfg)?);
    }
    Ok(out)
}
