//! Helpers shared by the suites: symbol classification, `τ`-integrals of
//! the mean oscillation, and per-level sums over the dyadic disc grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{box_statistics, mean_oscillation_polar, mo_zbar_closed_form};
use crate::measure::{PolarBox, QuadratureSpec};
use crate::polar::{sech_sq, PolarPoint};
use crate::special::gauss_legendre_unit;
use crate::symbol::Symbol;
use crate::tree::{CellKey, DyadicGrid};

/// Modulus `|c|` when `f = c z̄` in the disc.
pub fn zbar_multiple(f: &Symbol) -> Option<f64> {
    if f.dim() != 1 || f.num_terms() != 1 {
        return None;
    }
    let (e, c) = f.terms().next()?;
    (e.a[0] == 0 && e.b[0] == 1 && e.s == 0).then(|| c.norm())
}

/// Non-constant and conjugate-holomorphic.
pub fn is_antiholomorphic(f: &Symbol) -> bool {
    !f.is_constant() && f.terms().all(|(e, _)| e.s == 0 && e.a.iter().all(|&a| a == 0))
}

/// `MO_γ(f)` at a disc point; the closed form is used for multiples of
/// `z̄` at `γ = 0`, whose quadrature loses all digits deep in the disc.
pub fn mo_at(f: &Symbol, gamma: f64, p: &PolarPoint) -> Result<f64> {
    match zbar_multiple(f) {
        Some(c) if gamma == 0.0 => Ok(c * mo_zbar_closed_form(p.s)),
        _ => mean_oscillation_polar(f, p, gamma, 0),
    }
}

/// `∫∫ g(s, t)^p s^{−2} ds dt` over `s ∈ [s_lo, s_hi]`, `t ∈ [0, 1)`, for
/// every `p`: eight-point Gauss–Legendre on panels of ratio two in `s`
/// and `angular` equispaced turns (one when `g` is radial).
pub fn tau_integrals<G>(g: G, s_lo: f64, s_hi: f64, angular: usize, ps: &[f64]) -> Result<Vec<f64>>
where
    G: Fn(&PolarPoint) -> Result<f64> + Sync,
{
    if !(s_lo > 0.0 && s_lo < s_hi) {
        return Ok(vec![0.0; ps.len()]);
    }
    let rule = gauss_legendre_unit(8);
    let panels = ((s_hi / s_lo).log2().ceil() as usize).max(1);
    let ratio = (s_hi / s_lo).powf(1.0 / panels as f64);
    let edges: Vec<(f64, f64)> = (0..panels)
        .map(|i| {
            let a = s_lo * ratio.powi(i as i32);
            let b = if i + 1 == panels { s_hi } else { a * ratio };
            (a, b)
        })
        .collect();
    let parts: Result<Vec<Vec<f64>>> = edges
        .par_iter()
        .map(|&(a, b)| {
            let mut acc = vec![0.0; ps.len()];
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let s = a + (b - a) * x;
                for k in 0..angular {
                    let v = g(&PolarPoint::new(s, k as f64 / angular as f64))?;
                    let weight = (b - a) * w / (s * s) / angular as f64;
                    for (slot, &p) in acc.iter_mut().zip(ps) {
                        *slot += weight * v.powf(p);
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![0.0; ps.len()];
    for part in parts? {
        for (t, x) in total.iter_mut().zip(part) {
            *t += x;
        }
    }
    Ok(total)
}

/// `s` of the Bergman sphere of radius `rho`.
pub fn defect_at(rho: f64) -> f64 {
    sech_sq(rho)
}

/// Radical inverse in `base`, for quasi-random cell samples.
pub fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// The center plus `count` Halton points of a polar box.
pub fn box_samples(b: &PolarBox, center: &PolarPoint, count: usize) -> Vec<PolarPoint> {
    let mut out = vec![*center];
    for i in 1..=count as u64 {
        let (x, y) = (radical_inverse(i, 2), radical_inverse(i, 3));
        out.push(PolarPoint::new(b.s_lo + (b.s_hi - b.s_lo) * x, b.t_lo + (b.t_hi - b.t_lo) * y));
    }
    out
}

/// Cells of one level that represent all of them for a rotation-invariant
/// computation reaching `up` levels above: the grid between the two levels
/// repeats with period `2^{e_N − e_{N−up}}` cells. Returns the indices and
/// the multiplicity of each.
pub fn level_representatives(grid: &DyadicGrid, level: usize, up: usize) -> (Vec<i64>, f64) {
    if level == 0 {
        return (vec![0], 1.0);
    }
    // The root is a full disc, so level one is the coarsest grid that matters.
    let top = level.saturating_sub(up).max(1);
    let shift = grid.exponent(level) - grid.exponent(top);
    let reps = (shift as f64).exp2().min(grid.count(level)) as i64;
    ((0..reps).collect(), grid.count(level) / reps as f64)
}

/// `Q` of a grid cell as boxes.
pub fn q_boxes(grid: &DyadicGrid, key: CellKey) -> Vec<(PolarBox, f64)> {
    grid.q_cells(key).into_iter().map(|k| (grid.cell(k), 1.0)).collect()
}

/// `S̃` of a grid cell as disjoint tents over the maximal cells of `N^R`.
pub fn s_boxes(grid: &DyadicGrid, key: CellKey, radius: f64) -> Vec<(PolarBox, f64)> {
    let cells = grid.ball_cells(&grid.center(key), radius);
    let maximal = cells.iter().copied().filter(|&k| {
        let mut p = grid.parent(k);
        while let Some(q) = p {
            if grid.contains_key(&cells, q) {
                return false;
            }
            p = grid.parent(q);
        }
        true
    });
    maximal.map(|k| (grid.tent(k), 1.0)).collect()
}

/// Levels reached above a cell by `Q` (`6λ` plus one) or by `S̃`.
pub fn reach_levels(grid: &DyadicGrid, radius: f64) -> usize {
    (radius / grid.lambda()).ceil() as usize + 1
}

/// `V(f; E)` over boxes, quadrature orders from `q`.
pub fn oscillation(
    f: &Symbol,
    boxes: &[(PolarBox, f64)],
    reference: &PolarPoint,
    gamma: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    Ok(box_statistics(f, boxes, reference, gamma, q)?.oscillation)
}

/// Per-level sums `Σ_{cells at N} V(f; E_cell)^p` for every `p`, with the
/// region chosen by `boxes(key)`. Rotation-invariant symbols use one
/// period of representatives; others enumerate the level.
pub fn level_oscillation_sums<B>(
    f: &Symbol,
    gamma: f64,
    grid: &DyadicGrid,
    level: usize,
    up: usize,
    p_list: &[f64],
    q: &QuadratureSpec,
    boxes: B,
) -> Result<Vec<f64>>
where
    B: Fn(CellKey) -> Vec<(PolarBox, f64)> + Sync,
{
    let (reps, mult) = if f.single_charge().is_some() {
        level_representatives(grid, level, up)
    } else {
        let j = grid
            .count_exact(level)
            .filter(|&j| j <= 1 << 16)
            .ok_or_else(|| Error::Config(format!("level {level} too wide to enumerate for a mixed-charge symbol")))?;
        ((0..j).collect(), 1.0)
    };
    let values: Result<Vec<f64>> = reps
        .par_iter()
        .map(|&j| {
            let key = (level, j);
            oscillation(f, &boxes(key), &grid.center(key), gamma, q)
        })
        .collect();
    let values = values?;
    Ok(p_list.iter().map(|&p| mult * values.iter().map(|v| v.powf(p)).sum::<f64>()).collect())
}
