//! The chain `T ≲ A ≲ B ≲ C` from the `τ`-integral of `MO^p` down to the
//! `Q`-region oscillation sum, on the dyadic disc tree.

use rayon::prelude::*;

use super::common::{box_samples, level_oscillation_sums, mo_at, q_boxes, reach_levels, s_boxes, tau_integrals};
use super::config::ExperimentConfig;
use super::report::{drift, Report, Table};
use crate::error::{Error, Result};
use crate::symbol::Symbol;
use crate::tree::DyadicGrid;

/// Quasi-random samples per cell for the supremum over `K`.
const SUP_SAMPLES: usize = 64;

/// Per-level contributions for every `p`.
struct LevelTerms {
    t: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

fn sup_sum(f: &Symbol, gamma: f64, grid: &DyadicGrid, level: usize, ps: &[f64]) -> Result<Vec<f64>> {
    let (cells, mult) = if f.single_charge().is_some() {
        // MO of a single-charge symbol is radial: one cell stands for all.
        (vec![0], grid.count(level))
    } else {
        let j = grid
            .count_exact(level)
            .filter(|&j| j <= 1 << 16)
            .ok_or_else(|| Error::Config(format!("level {level} too wide to enumerate for a mixed-charge symbol")))?;
        ((0..j).collect(), 1.0)
    };
    let sups: Result<Vec<f64>> = cells
        .par_iter()
        .map(|&j| {
            let key = (level, j);
            let mut best: f64 = 0.0;
            for p in box_samples(&grid.cell(key), &grid.center(key), SUP_SAMPLES) {
                best = best.max(mo_at(f, gamma, &p)?);
            }
            Ok(best)
        })
        .collect();
    let sups = sups?;
    Ok(ps.iter().map(|&p| mult * sups.iter().map(|v| v.powf(p)).sum::<f64>()).collect())
}

fn level_terms(cfg: &ExperimentConfig, f: &Symbol, grid: &DyadicGrid, level: usize) -> Result<LevelTerms> {
    let ps = &cfg.p_list;
    let (s_lo, s_hi) = grid.band(level);
    let angular = if f.single_charge().is_some() { 1 } else { 16 };
    let t = tau_integrals(|p| mo_at(f, cfg.gamma, p), s_lo, s_hi, angular, ps)?;
    let a = sup_sum(f, cfg.gamma, grid, level, ps)?;
    let radius = cfg.neighbor_radius;
    let b = level_oscillation_sums(f, cfg.gamma, grid, level, reach_levels(grid, radius), ps, &cfg.quadrature, |k| {
        s_boxes(grid, k, radius)
    })?;
    let c = level_oscillation_sums(f, cfg.gamma, grid, level, 7, ps, &cfg.quadrature, |k| q_boxes(grid, k))?;
    Ok(LevelTerms { t, a, b, c })
}

/// `T(ρ)`, `A(ρ)`, `B(ρ)`, `C(ρ)` for `ρ = depth − 2` and `depth`, with
/// the three ratio constants and their drift.
pub fn discretization_chain(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let n0 = cfg
        .dyadic_level
        .filter(|_| cfg.n == 1)
        .ok_or_else(|| Error::Config("the discretization chain runs on the dyadic disc tree".into()))?;
    let cutoff = cfg.cutoff();
    if let Some(&p) = cfg.p_list.iter().find(|&&p| p <= cutoff) {
        return Err(Error::Config(format!(
            "p = {p} is at or below the cutoff {cutoff}; use the cutoff experiment for that range"
        )));
    }
    if cfg.depth < 3 {
        return Err(Error::Config("depth must be at least 3".into()));
    }
    let f = cfg.symbol()?;
    let grid = DyadicGrid::new(n0);
    let mut r = Report::new("discretization-chain", cfg);
    if f.is_constant() {
        r.notes.push("constant symbol: every quantity vanishes".into());
        for p in &cfg.p_list {
            for q in ["T", "A", "B", "C"] {
                r.constant(format!("{q}_p{p}"), 0.0);
            }
        }
        return Ok(r);
    }
    if cfg.p_list.iter().any(|&p| p > 1.0) {
        r.notes.push("p > 1: the first comparison is checked outside the range p ≤ 1 where it is proved".into());
    }
    let levels: Vec<LevelTerms> = (0..=cfg.depth).map(|l| level_terms(cfg, &f, &grid, l)).collect::<Result<_>>()?;
    let shallow = cfg.depth - 2;
    let mut table = Table::new("levels", &["level", "p", "T", "A", "B", "C"]);
    for (l, lt) in levels.iter().enumerate() {
        for (i, &p) in cfg.p_list.iter().enumerate() {
            table.push(&[l as f64, p, lt.t[i], lt.a[i], lt.b[i], lt.c[i]]);
        }
    }
    r.tables.push(table);
    let mut sums = Table::new("partial_sums", &["rho", "p", "T", "A", "B", "C", "T_over_A", "A_over_B", "B_over_C"]);
    for (i, &p) in cfg.p_list.iter().enumerate() {
        let total = |rho: usize, pick: fn(&LevelTerms) -> &Vec<f64>| -> f64 {
            // T covers d(0,z) ≤ λρ, i.e. levels below ρ; the sums take nodes up to ρ.
            levels.iter().take(rho + 1).map(|lt| pick(lt)[i]).sum::<f64>()
        };
        let t_total = |rho: usize| levels.iter().take(rho).map(|lt| lt.t[i]).sum::<f64>();
        let mut ratios = Vec::new();
        for rho in [shallow, cfg.depth] {
            let (t, a, b, c) = (t_total(rho), total(rho, |x| &x.a), total(rho, |x| &x.b), total(rho, |x| &x.c));
            sums.push(&[rho as f64, p, t, a, b, c, t / a, a / b, b / c]);
            ratios.push([t / a, a / b, b / c]);
            if rho == cfg.depth {
                for (name, v) in [("T", t), ("A", a), ("B", b), ("C", c)] {
                    r.constant(format!("{name}_p{p}"), v);
                }
            }
        }
        for (k, name) in ["T_over_A", "A_over_B", "B_over_C"].iter().enumerate() {
            let (lo, hi) = (ratios[0][k], ratios[1][k]);
            r.constant(format!("{name}_p{p}"), hi);
            r.check(format!("{name}_finite_p{p}"), hi.is_finite() && hi > 0.0, format!("{name} = {hi}"));
            r.check_le(format!("{name}_drift_p{p}"), drift(lo, hi), 2.0);
        }
    }
    r.tables.push(sums);
    Ok(r)
}
