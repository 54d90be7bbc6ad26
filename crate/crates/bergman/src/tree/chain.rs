//! Chains of same-level cells joining two nodes along a boundary path.
//!
//! For unit centers `ĉ_α`, `ĉ_ν` write `ĉ_ν = κ ĉ_α + (1−|κ|²)^{1/2} c^⊥`
//! and follow `p(t) = ((1−t) + tκ) ĉ_α + (1 − |(1−t) + tκ|²)^{1/2} c^⊥`,
//! along which `|1 − p(t)·ĉ_α| = t |1 − κ|`. The cells met by `p` at the
//! common level, with repeats and loops removed, form the chain.

use std::collections::{BTreeSet, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::BergmanTree;
use crate::error::{Error, Result};
use crate::geometry::dot;

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chain {
    pub ids: Vec<usize>,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn distinct(&self) -> bool {
        let set: BTreeSet<_> = self.ids.iter().collect();
        set.len() == self.ids.len()
    }
}

/// Smallest integer `k` with `ν ∈ bdd N_α^k`.
pub fn boundary_rank(tree: &BergmanTree, alpha: usize, nu: usize) -> usize {
    let level = tree.node(alpha).level;
    let x = tree.beta_between(alpha, nu) * (tree.lambda() * level as f64).exp();
    x.floor() as usize + 1
}

fn path_point(alpha: &[C64], kappa: C64, perp: &[C64], t: f64) -> Vec<C64> {
    let a = C64::new(1.0 - t, 0.0) + kappa * t;
    let b = (1.0 - a.norm_sqr()).max(0.0).sqrt();
    let v: Vec<C64> = alpha.iter().zip(perp).map(|(x, y)| x * a + y * b).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

/// The chain from `α` to `ν`.
pub fn build_chain(tree: &BergmanTree, alpha: usize, nu: usize) -> Result<Chain> {
    let (na, nn) = (tree.node(alpha), tree.node(nu));
    if na.level != nn.level {
        return Err(Error::Domain("chain endpoints must share a level".into()));
    }
    if na.level == 0 {
        return Err(Error::Domain("chains are defined below the root".into()));
    }
    if alpha == nu {
        return Ok(Chain { ids: vec![alpha] });
    }
    let level = na.level;
    let scale = (2.0 * tree.lambda() * level as f64).exp();
    let mut visited = Vec::new();
    if tree.dim() == 1 {
        // Shorter arc between the two anchors, sampled finely relative to
        // the cell widths at this level.
        let (ta, tn) = (na.direction[0].arg() / (2.0 * PI), nn.direction[0].arg() / (2.0 * PI));
        let dt = crate::polar::turn_diff(tn, ta);
        let cells = tree.level_ids(level).len() as f64;
        let samples = (16.0 * cells * dt.abs()).ceil() as usize + 64;
        for i in 0..=samples {
            let t = ta + dt * i as f64 / samples as f64;
            let zeta = [C64::from_polar(1.0, 2.0 * PI * t)];
            visited.push(tree.locate_direction(level, &zeta));
        }
    } else {
        let (a, v) = (&na.direction, &nn.direction);
        let kappa = dot(v, a);
        let rest: Vec<C64> = v.iter().zip(a).map(|(x, y)| x - y * kappa).collect();
        let rn = rest.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let perp: Vec<C64> =
            if rn > 1e-15 { rest.iter().map(|c| c / rn).collect() } else { vec![C64::new(0.0, 0.0); a.len()] };
        let extent = (C64::new(1.0, 0.0) - kappa).norm();
        let samples = ((64.0 * extent * scale).ceil() as usize).clamp(64, 1 << 20);
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let zeta = if rn > 1e-15 {
                path_point(a, kappa, &perp, t)
            } else {
                // Dependent centers: rotate the phase.
                let phase = C64::from_polar(1.0, t * kappa.arg());
                a.iter().map(|c| c * phase).collect()
            };
            visited.push(tree.locate_direction(level, &zeta));
        }
        *visited.last_mut().expect("nonempty") = nu;
        visited[0] = alpha;
    }
    // Collapse repeats and cut loops.
    let mut ids: Vec<usize> = Vec::new();
    let mut pos: HashMap<usize, usize> = HashMap::new();
    for id in visited {
        if let Some(&p) = pos.get(&id) {
            for removed in ids.drain(p + 1..) {
                pos.remove(&removed);
            }
            continue;
        }
        pos.insert(id, ids.len());
        ids.push(id);
    }
    Ok(Chain { ids })
}

/// `v_γ(Q_a ∩ Q_b)` with both regions as cell unions.
pub fn q_overlap(tree: &std::sync::Arc<BergmanTree>, a: usize, b: usize, gamma: f64) -> f64 {
    let qa: BTreeSet<usize> = tree.region_q(a).ids.into_iter().collect();
    let qb = tree.region_q(b).ids;
    qb.into_iter().filter(|id| qa.contains(id)).map(|id| tree.cell_volume(id, gamma)).sum()
}

/// Extra boundary-neighbour radius needed to contain the chain:
/// `max_j rank(η_j) − rank(ν)`, clipped at zero.
pub fn confinement_excess(tree: &BergmanTree, chain: &Chain) -> usize {
    let alpha = chain.ids[0];
    let nu = *chain.ids.last().expect("nonempty chain");
    let k = boundary_rank(tree, alpha, nu);
    chain.ids.iter().map(|&e| boundary_rank(tree, alpha, e)).max().unwrap_or(k).saturating_sub(k)
}
