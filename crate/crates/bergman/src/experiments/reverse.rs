//! Reverse Cauchy–Schwarz on the `Q` regions of the dyadic disc tree.
//!
//! For each cell `ν` the double integral
//! `∫_Q |∫_Q (f(z) − f(w)) (1−|c_ν|²)^{−m/2} (1 − z w̄)^{−m} dv_γ(w)|² dv_γ(z)`
//! is compared with `V(f; Q)²`, `m = 2 + γ`.

use num_complex::Complex64;
use rayon::prelude::*;

use super::common::{level_representatives, q_boxes};
use super::config::ExperimentConfig;
use super::report::{drift, Report, Table};
use crate::error::{Error, Result};
use crate::measure::PolarBox;
use crate::polar::PolarPoint;
use crate::symbol::Symbol;
use crate::tree::DyadicGrid;

type C64 = Complex64;

struct CellPair {
    lhs: f64,
    rhs: f64,
    /// `max |(1−|c|²)^m (1 − z w̄)^{−m} − 1|` over node pairs.
    gamma_max: f64,
}

fn cell_pair(f: &Symbol, gamma: f64, boxes: &[(PolarBox, f64)], c: &PolarPoint, order: usize) -> CellPair {
    let m = 2.0 + gamma;
    let mut pts: Vec<(C64, C64, f64)> = Vec::new();
    for (b, _) in boxes {
        for (s, t, w) in b.nodes(gamma, order, order) {
            let z = PolarPoint::new(s, t).to_ball();
            pts.push((z.coords()[0], f.eval(&z), w));
        }
    }
    let vol: f64 = pts.iter().map(|p| p.2).sum();
    let mean: C64 = pts.iter().map(|p| p.1 * p.2).sum::<C64>() / vol;
    let lhs = pts.iter().map(|p| (p.1 - mean).norm_sqr() * p.2).sum::<f64>() / vol;
    let ln_sc = c.s.ln();
    let one = C64::new(1.0, 0.0);
    let (rhs, gamma_max) = pts
        .par_iter()
        .map(|&(z, fz, wz)| {
            let mut inner = C64::new(0.0, 0.0);
            let mut worst: f64 = 0.0;
            for &(w, fw, ww) in &pts {
                let ln_k = -m * (one - z * w.conj()).ln();
                inner += (fz - fw) * (ln_k - 0.5 * m * ln_sc).exp() * ww;
                worst = worst.max(((ln_k + m * ln_sc).exp() - one).norm());
            }
            (wz * inner.norm_sqr(), worst)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1.max(b.1)));
    CellPair { lhs, rhs, gamma_max }
}

/// `RHS ≥ c · V(f;Q)²` and `RHS ≤ C · V(f;Q)²` over all cells to the
/// configured depth, with band drift between the two deepest sub-trees.
pub fn reverse_cs(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let n0 = cfg
        .dyadic_level
        .filter(|_| cfg.n == 1)
        .ok_or_else(|| Error::Config("the reverse Cauchy–Schwarz suite runs on the dyadic disc tree".into()))?;
    let f = cfg.symbol()?;
    if f.is_constant() {
        return Err(Error::Config("constant symbols have no oscillation".into()));
    }
    let grid = DyadicGrid::new(n0);
    let lam = grid.lambda();
    let mut r = Report::new("reverse-cs", cfg);
    let mut t = Table::new("cells", &["level", "index", "multiplicity", "lhs", "rhs", "ratio", "quadrature_change"]);
    let mut gamma_max: f64 = 0.0;
    let shallow = cfg.depth.saturating_sub(2);
    let (mut lo_all, mut hi_all) = (f64::INFINITY, 0.0f64);
    let (mut lo_shallow, mut hi_shallow) = (f64::INFINITY, 0.0f64);
    let mut worst_change: f64 = 0.0;
    for level in 0..=cfg.depth {
        let (reps, mult) = if f.single_charge().is_some() {
            level_representatives(&grid, level, 7)
        } else {
            let j = grid.count_exact(level).filter(|&j| j <= 4096).ok_or_else(|| {
                Error::Config(format!("level {level} too wide to enumerate for a mixed-charge symbol"))
            })?;
            ((0..j).collect(), 1.0)
        };
        for j in reps {
            let key = (level, j);
            let boxes = q_boxes(&grid, key);
            let c = grid.center(key);
            let coarse = cell_pair(&f, cfg.gamma, &boxes, &c, 6);
            let fine = cell_pair(&f, cfg.gamma, &boxes, &c, 10);
            let ratio = fine.rhs / fine.lhs;
            let change = (ratio - coarse.rhs / coarse.lhs).abs() / ratio;
            worst_change = worst_change.max(change);
            gamma_max = gamma_max.max(fine.gamma_max);
            lo_all = lo_all.min(ratio);
            hi_all = hi_all.max(ratio);
            if level <= shallow {
                lo_shallow = lo_shallow.min(ratio);
                hi_shallow = hi_shallow.max(ratio);
            }
            t.push(&[level as f64, j as f64, mult, fine.lhs, fine.rhs, ratio, change]);
        }
    }
    r.tables.push(t);
    r.constant("min_ratio", lo_all);
    r.constant("max_ratio", hi_all);
    r.constant(format!("min_ratio_depth_{shallow}"), lo_shallow);
    r.constant(format!("max_ratio_depth_{shallow}"), hi_shallow);
    r.constant("quadrature_change", worst_change);
    let c2 = gamma_max / lam;
    r.constant("c2", c2);
    r.constant("eight_c2_lambda", 8.0 * c2 * lam);
    if 8.0 * c2 * lam >= 1.0 {
        r.notes.push(format!(
            "measured 8·C₂·λ = {:.3} is not below one; the smallness condition on λ is not met, the inequality is still checked",
            8.0 * c2 * lam
        ));
    }
    r.check("min_ratio_positive", lo_all > 0.0, format!("c = {lo_all}"));
    r.check("max_ratio_finite", hi_all.is_finite(), format!("C = {hi_all}"));
    r.check_le("min_ratio_drift", drift(lo_all, lo_shallow), 2.0);
    r.check_le("max_ratio_drift", drift(hi_all, hi_shallow), 2.0);
    r.check_le("quadrature_converged", worst_change, 1e-3);
    Ok(r)
}
