//! Colorings of the tree into well-separated classes.
//!
//! Two distinct members `α ≠ ν` of one class must satisfy either
//! `|d(α) − d(ν)| > M`, or `d(α) = d(ν)` and
//! `β(ĉ_α, ĉ_ν) > M e^{−λ d(α)}`. Levels are split by residue modulo
//! `M + 1`; inside a level a greedy coloring separates conflicting nodes.

use serde::Serialize;

use super::BergmanTree;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColorClass {
    pub id: usize,
    pub scale: f64,
    pub members: Vec<usize>,
}

/// Outcome of an exhaustive check of the separation alternative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparationCheck {
    pub pairs_checked: u64,
    pub violations: u64,
    /// Smallest `β e^{λd} / M` over same-level pairs in a class (> 1 when valid).
    pub min_margin: f64,
}

fn conflicts(tree: &BergmanTree, a: usize, b: usize, scale: f64) -> bool {
    let level = tree.node(a).level;
    tree.beta_between(a, b) <= scale * (-tree.lambda() * level as f64).exp()
}

/// Nodes of the same level that conflict with `id` at scale `M`.
fn level_conflicts(tree: &BergmanTree, id: usize, scale: f64) -> Vec<usize> {
    let level = tree.node(id).level;
    let ids = tree.level_ids(level);
    if level == 0 {
        return Vec::new();
    }
    if tree.dim() == 1 {
        // Angular order equals index order; scan outwards until the gap
        // exceeds the threshold.
        let count = ids.len();
        let j = tree.node(id).index;
        let mut out = Vec::new();
        for dir in [1isize, -1] {
            for k in 1..count {
                let other = ids.start + ((j as isize + dir * k as isize).rem_euclid(count as isize)) as usize;
                if other == id || !conflicts(tree, id, other, scale) {
                    break;
                }
                out.push(other);
            }
        }
        out.sort_unstable();
        out.dedup();
        return out;
    }
    ids.filter(|&o| o != id && conflicts(tree, id, o, scale)).collect()
}

/// Greedy coloring of every level crossed with level residues modulo `M+1`.
pub fn color_decompose(tree: &BergmanTree, scale: f64) -> Vec<ColorClass> {
    assert!(scale >= 1.0, "coloring scale must be at least 1");
    let period = scale.floor() as usize + 1;
    let mut per_level: Vec<Vec<usize>> = Vec::with_capacity(tree.depth() + 1);
    let mut width = 1;
    for level in 0..=tree.depth() {
        let ids = tree.level_ids(level);
        let mut color = vec![usize::MAX; ids.len()];
        for id in ids.clone() {
            let mut used: Vec<usize> = level_conflicts(tree, id, scale)
                .into_iter()
                .map(|o| color[o - ids.start])
                .filter(|&c| c != usize::MAX)
                .collect();
            used.sort_unstable();
            used.dedup();
            let mut c = 0;
            for u in used {
                if u == c {
                    c += 1;
                } else if u > c {
                    break;
                }
            }
            color[id - ids.start] = c;
        }
        width = width.max(color.iter().max().map_or(0, |c| c + 1));
        per_level.push(color);
    }
    let mut classes: Vec<ColorClass> =
        (0..period * width).map(|id| ColorClass { id, scale, members: Vec::new() }).collect();
    for (level, colors) in per_level.iter().enumerate() {
        let start = tree.level_ids(level).start;
        for (k, &c) in colors.iter().enumerate() {
            classes[(level % period) * width + c].members.push(start + k);
        }
    }
    classes.retain(|c| !c.members.is_empty());
    for (i, c) in classes.iter_mut().enumerate() {
        c.id = i;
    }
    classes
}

/// Checks every pair inside every class.
pub fn verify_separation(tree: &BergmanTree, classes: &[ColorClass]) -> SeparationCheck {
    let lam = tree.lambda();
    let mut out = SeparationCheck { pairs_checked: 0, violations: 0, min_margin: f64::INFINITY };
    for class in classes {
        let m = &class.members;
        for (i, &a) in m.iter().enumerate() {
            let la = tree.node(a).level;
            for &b in &m[i + 1..] {
                let lb = tree.node(b).level;
                out.pairs_checked += 1;
                if la != lb {
                    if (la as f64 - lb as f64).abs() <= class.scale {
                        out.violations += 1;
                    }
                    continue;
                }
                if la == 0 {
                    out.violations += 1;
                    continue;
                }
                let margin = tree.beta_between(a, b) * (lam * la as f64).exp() / class.scale;
                out.min_margin = out.min_margin.min(margin);
                if margin <= 1.0 {
                    out.violations += 1;
                }
            }
        }
    }
    out
}

/// Every node appears in exactly one class.
pub fn is_partition(tree: &BergmanTree, classes: &[ColorClass]) -> bool {
    let mut seen = vec![0u32; tree.len()];
    for c in classes {
        for &m in &c.members {
            seen[m] += 1;
        }
    }
    seen.iter().all(|&k| k == 1)
}
