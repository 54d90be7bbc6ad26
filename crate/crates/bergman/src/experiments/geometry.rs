//! Checks on the tree and the ball geometry it is built from.

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::report::{drift, spread, Report, Table};
use crate::error::Result;
use crate::geometry::{
    bergman_distance, kernel_ratio_deviation, mobius_map, random_direction, random_point, BallPoint, CarlesonSet,
};
use crate::operator::{entrywise_schatten_check, schatten_sum, singular_values};
use crate::polar::{box_inradius, box_max_distance, distance, PolarPoint};
use crate::tree::chain::{boundary_rank, build_chain, confinement_excess, q_overlap};
use crate::tree::coloring::{color_decompose, is_partition, verify_separation};
use crate::tree::{BergmanTree, TreeMode};

type C64 = Complex64;

/// At most `cap` ids of a level, evenly strided.
fn sample_level(tree: &BergmanTree, level: usize, cap: usize) -> Vec<usize> {
    let ids = tree.level_ids(level);
    let step = ids.len().div_ceil(cap).max(1);
    ids.step_by(step).collect()
}

fn rng_for(cfg: &ExperimentConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Separation and covering of the level nets.
pub fn sphere_net(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("sphere-net", cfg);
    let lam = tree.lambda();
    let mut t = Table::new("levels", &["level", "count", "separation_over_lambda", "covering_over_lambda"]);
    if let Some(g) = tree.grid() {
        let mut counts_ok = true;
        for level in 1..=tree.depth() {
            let count = tree.level_ids(level).len();
            counts_ok &= count as f64 == g.count(level);
            let rho = lam * level as f64;
            let gap = distance(&PolarPoint::at_depth(0.0, rho), &PolarPoint::at_depth(g.width(level), rho));
            t.push(&[level as f64, count as f64, gap / lam, 0.5 * gap / lam]);
        }
        r.check("dyadic_counts", counts_ok, "level sizes are 2^{e_N}");
        r.notes.push("dyadic anchors are equispaced; the gap between neighbours is reported, not asserted".into());
    } else {
        let mut min_sep = f64::INFINITY;
        let mut max_cov: f64 = 0.0;
        for level in 1..=tree.depth() {
            let sep = tree.net_separation(level).unwrap_or(f64::INFINITY);
            let cov = tree.net_covering(level, 2000, cfg.seed.wrapping_add(level as u64)) / lam;
            min_sep = min_sep.min(sep);
            max_cov = max_cov.max(cov);
            t.push(&[level as f64, tree.level_ids(level).len() as f64, sep, cov]);
        }
        r.check_ge("separation_at_least_lambda", min_sep, 1.0 - 1e-9);
        r.check_le("covering_at_most_two_lambda", max_cov, 2.0);
        r.constant("min_separation_over_lambda", min_sep);
        r.constant("max_covering_over_lambda", max_cov);
    }
    r.tables.push(t);
    Ok(r)
}

/// `(inradius, circumradius)` of a cell about its center by radial scans
/// along random directions in Möbius coordinates.
fn scanned_radii(tree: &BergmanTree, id: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let c = tree.center(id);
    let rmax = 4.0 * tree.lambda();
    let steps = 64;
    let (mut inr, mut circ) = (f64::INFINITY, 0.0f64);
    for _ in 0..96 {
        let u = random_direction(rng, tree.dim());
        let mut first_out = None;
        for k in 1..=steps {
            let rho = rmax * k as f64 / steps as f64;
            let w = BallPoint::at_bergman_radius(&u, rho);
            let z = if c.norm() == 0.0 { w } else { mobius_map(&c, &w).expect("interior") };
            if tree.locate(&z).map(|x| x == id).unwrap_or(false) {
                circ = circ.max(rho);
            } else if first_out.is_none() {
                first_out = Some(rmax * (k - 1) as f64 / steps as f64);
            }
        }
        inr = inr.min(first_out.unwrap_or(rmax));
    }
    (inr, circ)
}

fn cell_radii(tree: &BergmanTree, id: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    if let (Some(c), Some(b)) = (tree.center_polar(id), tree.cell_box(id)) {
        return (box_inradius(&c, &b), box_max_distance(&c, &b));
    }
    scanned_radii(tree, id, rng)
}

/// Cell sandwich radii, volume law, child counts, the defect law and
/// neighbourhood consistency.
pub fn tree_estimates(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("tree-estimates", cfg);
    let lam = tree.lambda();
    let n = tree.dim() as f64;
    let m = n + 1.0 + cfg.gamma;
    let per_level = if tree.dim() == 1 { 32 } else { 8 };

    // Sandwich radii.
    let mut radii = Table::new("sandwich", &["level", "min_inradius_over_lambda", "max_circumradius_over_lambda"]);
    let levels: Vec<usize> = (1..=tree.depth()).collect();
    let rows: Vec<(usize, f64, f64)> = levels
        .par_iter()
        .map(|&level| {
            let mut rng = rng_for(cfg, 11 + level as u64);
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for id in sample_level(tree, level, per_level) {
                let (a, b) = cell_radii(tree, id, &mut rng);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            (level, lo / lam, hi / lam)
        })
        .collect();
    for &(level, a, b) in &rows {
        radii.push(&[level as f64, a, b]);
    }
    let window: Vec<&(usize, f64, f64)> = rows.iter().filter(|x| x.0 >= 3).collect();
    if !window.is_empty() {
        let ins: Vec<f64> = window.iter().map(|x| x.1).collect();
        let outs: Vec<f64> = window.iter().map(|x| x.2).collect();
        r.check_le("sandwich_inradius_drift", spread(&ins), 1.5);
        r.check_le("sandwich_circumradius_drift", spread(&outs), 1.5);
        r.constant("sandwich_c1_over_lambda", ins.iter().copied().fold(f64::INFINITY, f64::min));
        r.constant("sandwich_c2_over_lambda", outs.iter().copied().fold(0.0, f64::max));
    }
    let max_diam = 2.0 * lam * rows.iter().map(|x| x.2).fold(0.0, f64::max);
    r.tables.push(radii);

    // Volume law.
    let ratios: Vec<f64> = (0..tree.len())
        .map(|id| tree.cell_volume(id, cfg.gamma) * (2.0 * lam * tree.node(id).level as f64 * m).exp())
        .collect();
    let mut vol = Table::new("volume_law", &["level", "min_ratio", "max_ratio"]);
    for level in 0..=tree.depth() {
        let v: Vec<f64> = tree.level_ids(level).map(|id| ratios[id]).collect();
        vol.push(&[
            level as f64,
            v.iter().copied().fold(f64::INFINITY, f64::min),
            v.iter().copied().fold(0.0, f64::max),
        ]);
    }
    r.tables.push(vol);
    r.check_le("volume_law_band", spread(&ratios[1..]), 10.0);
    r.constant("volume_law_band_with_root", spread(&ratios));
    r.notes.push("the volume-law band excludes the root, a ball of radius λ rather than a shell cell".into());

    // Child counts.
    for ell in 1..=3usize {
        let c = (1..tree.len())
            .filter(|&id| tree.node(id).level + ell <= tree.depth())
            .map(|id| tree.generation(id, ell).len() as f64 * (-2.0 * n * ell as f64 * lam).exp())
            .fold(0.0, f64::max);
        r.constant(format!("child_count_constant_{ell}"), c);
    }
    let parents_ok = tree.nodes().iter().all(|node| match node.parent {
        Some(p) => tree.node(p).children.contains(&node.id) && tree.node(p).level + 1 == node.level,
        None => node.id == tree.root(),
    });
    let childless = tree.nodes().iter().filter(|node| node.level < tree.depth() && node.children.is_empty()).count();
    r.check("parent_child_links", parents_ok, "links are mutual and levels step by one");
    r.constant("childless_inner_nodes", childless as f64);

    // 1 − |z|² ≈ e^{−2λ d(α)} on each cell.
    let mut rng = rng_for(cfg, 17);
    let mut defect_ratios = Vec::new();
    for level in 0..=tree.depth() {
        for id in sample_level(tree, level, per_level) {
            for z in tree.sample_cell(id, 16, &mut rng) {
                defect_ratios.push(z.defect() * (2.0 * lam * level as f64).exp());
            }
        }
    }
    r.constant("defect_law_band", spread(&defect_ratios));
    r.check_le("defect_law_band", spread(&defect_ratios), 10.0);

    // Every center locates to its own cell.
    let located = (0..tree.len()).all(|id| match tree.center_polar(id) {
        Some(p) => tree.locate_polar(&p).map(|x| x == id).unwrap_or(false),
        None => tree.locate(&tree.center(id)).map(|x| x == id).unwrap_or(false),
    });
    r.check("centers_locate_home", located, "locate(c_α) = α for every node");
    if tree.dim() == 1 && tree.mode() == TreeMode::Dyadic {
        // Exactly one cell of the point's level claims it.
        let mut ok = true;
        for _ in 0..2000 {
            let z = random_point(&mut rng, 1, lam * (tree.depth() as f64 + 0.9));
            let p = PolarPoint::new(z.defect(), (z.coords()[0].arg() / std::f64::consts::TAU).rem_euclid(1.0));
            let claims = (0..tree.len()).filter(|&id| tree.cell_box(id).expect("disc").contains(&p.to_ball())).count();
            ok &= claims == 1;
        }
        r.check("cells_partition", ok, "2000 random points each lie in exactly one cell");
    }

    // Neighbour systems: K ⊆ Q ⊆ S̃ and approximate symmetry.
    let cap = if tree.dim() == 1 { 4 } else { 2 };
    let mut sym_ok = true;
    let mut nested_ok = true;
    for level in 0..tree.depth() {
        for alpha in sample_level(tree, level, cap) {
            let q: BTreeSet<usize> = tree.region_q(alpha).ids.into_iter().collect();
            let s: BTreeSet<usize> = tree.region_s(alpha, cfg.neighbor_radius).ids.into_iter().collect();
            nested_ok &= q.contains(&alpha) && q.is_subset(&s);
            let (near, _) = tree.neighbors(alpha, 6.0 * lam);
            let stride = near.len().div_ceil(16).max(1);
            for &w in near.iter().step_by(stride) {
                let (back, _) = tree.neighbors(w, 6.0 * lam + max_diam);
                sym_ok &= back.contains(&alpha);
            }
        }
    }
    r.check("regions_nested", nested_ok, "K_α ⊆ Q_α ⊆ S̃_α on sampled nodes");
    r.check("neighbors_symmetric", sym_ok, "ω ∈ N_α^{6λ} implies α ∈ N_ω^{6λ + 2 max diam}");
    Ok(r)
}

/// `β(ĉ_α, ĉ_α') ≥ c (e^{d(c_α, c_α')} − 1)^{1/2} e^{−λ d(α)}` for
/// same-level pairs, with the largest admissible `c` measured.
pub fn separation(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("separation", cfg);
    let lam = tree.lambda();
    let mut t = Table::new("levels", &["level", "pairs", "c"]);
    let rows: Vec<(usize, usize, f64)> = (1..=tree.depth())
        .into_par_iter()
        .map(|level| {
            let ids = sample_level(tree, level, 400);
            let mut c = f64::INFINITY;
            let mut pairs = 0;
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    let d = match (tree.center_polar(a), tree.center_polar(b)) {
                        (Some(x), Some(y)) => distance(&x, &y),
                        _ => bergman_distance(&tree.center(a), &tree.center(b)).expect("interior"),
                    };
                    let beta = tree.beta_between(a, b);
                    c = c.min(beta * (lam * level as f64).exp() / d.exp_m1().sqrt());
                    pairs += 1;
                }
            }
            (level, pairs, c)
        })
        .collect();
    for &(level, pairs, c) in &rows {
        t.push(&[level as f64, pairs as f64, c]);
    }
    let c = rows.iter().map(|x| x.2).fold(f64::INFINITY, f64::min);
    r.constant("c", c);
    r.check("c_positive", c > 0.0 && c.is_finite(), format!("c = {c}"));
    r.tables.push(t);
    Ok(r)
}

/// A random point of a random descendant of `id`.
fn descendant_point(tree: &BergmanTree, id: usize, rng: &mut ChaCha8Rng) -> BallPoint {
    let level = tree.node(id).level;
    let target = rng.gen_range(level..=tree.depth());
    let mut cur = id;
    while tree.node(cur).level < target {
        let ch = &tree.node(cur).children;
        if ch.is_empty() {
            break;
        }
        cur = ch[rng.gen_range(0..ch.len())];
    }
    let pts = tree.sample_cell(cur, 1, rng);
    pts[pts.len() - 1].clone()
}

/// Descendants of `α` lie in `V_{c_α}^ϱ` for one measured `ϱ`.
pub fn carleson(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("carleson", cfg);
    let mut t = Table::new("levels", &["level", "max_aperture"]);
    let cap = if tree.dim() == 1 { 16 } else { 8 };
    let rows: Vec<(usize, f64)> = (1..tree.depth())
        .into_par_iter()
        .map(|level| {
            let mut rng = rng_for(cfg, 101 + level as u64);
            let mut worst: f64 = 0.0;
            for alpha in sample_level(tree, level, cap) {
                let set = CarlesonSet::new(tree.center(alpha), 1.0).expect("nonzero apex");
                for _ in 0..32 {
                    worst = worst.max(set.required_aperture(&descendant_point(tree, alpha, &mut rng)));
                }
                // Corners of deep descendants are the extreme points.
                for d in tree.generation(alpha, tree.depth() - level).into_iter().step_by(7) {
                    worst = worst.max(set.required_aperture(&tree.anchor(d)));
                }
            }
            (level, worst)
        })
        .collect();
    for &(level, w) in &rows {
        t.push(&[level as f64, w]);
    }
    let per_level: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let rho = per_level.iter().copied().fold(0.0, f64::max);
    r.constant("rho", rho);
    r.check("rho_finite", rho.is_finite() && rho > 0.0, format!("ϱ = {rho}"));
    r.check_le("rho_level_drift", spread(&per_level), 2.0);
    r.tables.push(t);
    Ok(r)
}

/// `|(1−z·u)^b/(1−z·v)^b − 1| ≤ C_R d(u, v)` for `d(u, v) ≤ R`.
pub fn kernel_ratio(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("kernel-ratio", cfg);
    let n = cfg.n;
    let b = n as f64 + 1.0 + cfg.gamma;
    let radius = 1.0;
    let batch = |seed: u64| -> f64 {
        let mut rng = rng_for(cfg, seed);
        let mut worst: f64 = 0.0;
        for _ in 0..20_000 {
            let z = random_point(&mut rng, n, 5.0);
            let u = random_point(&mut rng, n, 5.0);
            let w = random_point(&mut rng, n, radius);
            let v = mobius_map(&u, &w).expect("interior");
            let d = w.radius();
            if d > 1e-9 {
                worst = worst.max(kernel_ratio_deviation(&z, &u, &v, b) / d);
            }
        }
        worst
    };
    let (c1, c2) = (batch(201), batch(202));
    r.constant("c_r", c1.max(c2));
    r.constant("radius", radius);
    r.check("c_r_finite", c1.is_finite() && c2.is_finite(), format!("C_R = {}", c1.max(c2)));
    r.check_le("c_r_batch_drift", drift(c1, c2), 2.0);
    Ok(r)
}

/// Separated colorings at scales 2, 4, 8 and the configured one.
pub fn coloring(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("coloring", cfg);
    let n = tree.dim() as i32;
    let mut scales = vec![2.0, 4.0, 8.0];
    if !scales.contains(&cfg.coloring_scale) {
        scales.push(cfg.coloring_scale);
    }
    let mut t =
        Table::new("scales", &["scale", "classes", "classes_over_scale_power", "pairs", "violations", "min_margin"]);
    let mut ratios = Vec::new();
    for &m in &scales {
        let classes = color_decompose(tree, m);
        let check = verify_separation(tree, &classes);
        let ratio = classes.len() as f64 / m.powi(2 * n + 1);
        ratios.push(ratio);
        t.push(&[
            m,
            classes.len() as f64,
            ratio,
            check.pairs_checked as f64,
            check.violations as f64,
            check.min_margin,
        ]);
        r.check(format!("partition_m{m}"), is_partition(tree, &classes), "every node in exactly one class");
        r.check(
            format!("separated_m{m}"),
            check.violations == 0,
            format!("{} pairs, {} violations", check.pairs_checked, check.violations),
        );
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    r.constant("max_classes_over_scale_power", max_ratio);
    r.check_le("classes_over_scale_power_bounded", max_ratio / ratios[0], 2.0);
    r.tables.push(t);
    Ok(r)
}

/// Ring and ball counts of boundary neighbourhoods.
pub fn counting(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("counting", cfg);
    let lam = tree.lambda();
    let n = tree.dim() as i32;
    let classes = color_decompose(tree, cfg.coloring_scale);
    let mut class_of = vec![0usize; tree.len()];
    for c in &classes {
        for &id in &c.members {
            class_of[id] = c.id;
        }
    }
    let mut t = Table::new(
        "levels",
        &["level", "ring_constant", "ball_constant", "class_ring_constant", "inner_ring_constant"],
    );
    let first = 2.min(tree.depth());
    let rows: Vec<(usize, f64, f64, f64, f64)> = (first..=tree.depth())
        .into_par_iter()
        .map(|level| {
            let scale = (lam * level as f64).exp();
            let kmax = (std::f64::consts::SQRT_2 * scale).floor() as usize;
            let kinner = scale.floor() as usize;
            let (mut cr, mut cb, mut cc, mut ci) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
            for alpha in sample_level(tree, level, 8) {
                let mut ring = vec![0usize; kmax + 2];
                let mut class_ring = vec![0usize; kmax + 2];
                for other in tree.level_ids(level) {
                    let k = (tree.beta_between(alpha, other) * scale).floor() as usize;
                    if k < ring.len() {
                        ring[k] += 1;
                        if class_of[other] == class_of[alpha] {
                            class_ring[k] += 1;
                        }
                    }
                }
                let mut ball = 0;
                for k in 1..=kmax {
                    ball += ring[k - 1];
                    let kf = k as f64;
                    cr = cr.max(ring[k] as f64 / kf.powi(2 * n - 1));
                    if k <= kinner {
                        ci = ci.max(ring[k] as f64 / kf.powi(2 * n - 1));
                    }
                    cb = cb.max((ball + ring[k]) as f64 / kf.powi(2 * n));
                    cc = cc.max(class_ring[k] as f64 * cfg.coloring_scale.powi(2 * n - 1) / kf.powi(2 * n - 1));
                }
            }
            (level, cr, cb, cc, ci)
        })
        .collect();
    for &(level, a, b, c, i) in &rows {
        t.push(&[level as f64, a, b, c, i]);
    }
    let upper: Vec<_> = rows.iter().filter(|x| 2 * x.0 >= tree.depth()).collect();
    let rings: Vec<f64> = upper.iter().map(|x| x.1).collect();
    let balls: Vec<f64> = upper.iter().map(|x| x.2).collect();
    let inner: Vec<f64> = upper.iter().map(|x| x.4).collect();
    r.constant("ring_constant", rows.iter().map(|x| x.1).fold(0.0, f64::max));
    r.constant("ball_constant", rows.iter().map(|x| x.2).fold(0.0, f64::max));
    r.constant("class_ring_constant", rows.iter().map(|x| x.3).fold(0.0, f64::max));
    r.check_le("ring_constant_stable", spread(&rings), 2.0);
    r.check_le("ball_constant_stable", spread(&balls), 2.0);
    // Rings with β < 1 stay away from the antipodal set, where for n = 1
    // the level sets of β accumulate.
    r.constant("inner_ring_constant", rows.iter().map(|x| x.4).fold(0.0, f64::max));
    r.check_le("inner_ring_constant_stable", spread(&inner), 2.0);
    r.tables.push(t);
    Ok(r)
}

/// Same-level chains between boundary neighbours.
pub fn chains(cfg: &ExperimentConfig, tree: &Arc<BergmanTree>) -> Result<Report> {
    let mut r = Report::new("chains", cfg);
    let lam = tree.lambda();
    let n = tree.dim() as f64;
    let m = n + 1.0 + cfg.gamma;
    let cap = if tree.dim() == 1 { 2 } else { 1 };
    let mut t = Table::new("chains", &["level", "rank", "length", "min_overlap", "excess"]);
    let (mut ends_ok, mut distinct_ok, mut overlap_ok) = (true, true, true);
    let mut per_level_overlap: Vec<(f64, f64)> = Vec::new();
    let mut length_ratio: f64 = 0.0;
    let mut excess_max = 0usize;
    let start = (tree.depth() / 2).max(1);
    for level in start..tree.depth() {
        let mut level_min = f64::INFINITY;
        for alpha in sample_level(tree, level, cap) {
            let ranks: Vec<(usize, usize)> =
                tree.level_ids(level).map(|nu| (boundary_rank(tree, alpha, nu), nu)).collect();
            for target in [1usize, 2, 4, 8, 16] {
                let Some(&(k, nu)) = ranks.iter().filter(|x| x.0 >= target).min_by_key(|x| (x.0, x.1)) else {
                    continue;
                };
                let chain = build_chain(tree, alpha, nu)?;
                ends_ok &= chain.ids[0] == alpha && *chain.ids.last().expect("nonempty") == nu;
                distinct_ok &= chain.distinct();
                let mut min_overlap = f64::INFINITY;
                for w in chain.ids.windows(2) {
                    min_overlap = min_overlap.min(q_overlap(tree, w[0], w[1], cfg.gamma));
                }
                if chain.len() < 2 {
                    min_overlap = tree.cell_volume(alpha, cfg.gamma);
                }
                overlap_ok &= min_overlap > 0.0;
                level_min = level_min.min(min_overlap);
                let excess = confinement_excess(tree, &chain);
                excess_max = excess_max.max(excess);
                length_ratio = length_ratio.max(chain.len() as f64 / k as f64);
                t.push(&[level as f64, k as f64, chain.len() as f64, min_overlap, excess as f64]);
            }
        }
        if level_min.is_finite() && level_min > 0.0 {
            per_level_overlap.push((level as f64, level_min.ln()));
        }
    }
    r.check("chain_endpoints", ends_ok, "chains start at α and end at ν");
    r.check("chain_distinct", distinct_ok, "chain members are distinct");
    r.check("chain_overlaps_positive", overlap_ok, "consecutive Q regions overlap");
    r.constant("confinement_excess", excess_max as f64);
    r.constant("length_over_rank", length_ratio);
    if per_level_overlap.len() >= 2 {
        let k = per_level_overlap.len() as f64;
        let (sx, sy): (f64, f64) = per_level_overlap.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
        let (mx, my) = (sx / k, sy / k);
        let num: f64 = per_level_overlap.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let den: f64 = per_level_overlap.iter().map(|p| (p.0 - mx).powi(2)).sum();
        r.constant("overlap_exponent", -num / den / (2.0 * lam));
        r.constant("volume_exponent", m);
    }
    r.tables.push(t);
    Ok(r)
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `‖T‖_{S_p}^p ≤ Σ |t_ij|^p` for `p ≤ 2`, and the `p`-triangle
/// inequality of `S_p` for `p ≤ 1`.
pub fn entrywise_schatten(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("entrywise-schatten", cfg);
    let mut rng = rng_for(cfg, 301);
    let ps = [0.5, 1.0, 2.0];
    let mut worst = [f64::INFINITY; 3];
    let mut diag_worst: f64 = 0.0;
    let mut tri_worst = f64::INFINITY;
    for _ in 0..200 {
        let (rows, cols) = (rng.gen_range(1..=30), rng.gen_range(1..=30));
        let a = random_matrix(&mut rng, rows, cols);
        for (i, &p) in ps.iter().enumerate() {
            worst[i] = worst[i].min(entrywise_schatten_check(&a, p)?.slack);
        }
        let k = rows.min(cols);
        let d = DMatrix::from_fn(rows, cols, |i, j| {
            if i == j && i < k {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                C64::new(0.0, 0.0)
            }
        });
        for &p in &ps {
            diag_worst = diag_worst.max(entrywise_schatten_check(&d, p)?.slack.abs());
        }
        let b = random_matrix(&mut rng, rows, cols);
        for &p in &[0.5, 1.0] {
            let lhs = schatten_sum(&singular_values(&(&a + &b))?, p);
            let rhs = schatten_sum(&singular_values(&a)?, p) + schatten_sum(&singular_values(&b)?, p);
            tri_worst = tri_worst.min(rhs - lhs);
        }
    }
    let mut t = Table::new("slack", &["p", "min_slack"]);
    for (i, &p) in ps.iter().enumerate() {
        t.push(&[p, worst[i]]);
        r.check_ge(format!("slack_p{p}"), worst[i], -1e-10);
    }
    r.check_le("diagonal_equality", diag_worst, 1e-10);
    r.check_ge("p_triangle", tri_worst, -1e-10);
    r.tables.push(t);
    Ok(r)
}
