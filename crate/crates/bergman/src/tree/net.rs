//! Greedy λ-separated nets on Bergman spheres `S_r = {d(0,z) = r}`.
//!
//! Two directions `ζ, η` give points of `S_r` at Bergman distance at least
//! `λ` exactly when `|1 − t²ζ·η| ≥ (1 − t²) cosh λ`, `t = tanh r`. Cells
//! are Voronoi cells of the net in that metric, ties broken by index.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{one_minus_dot_unit, random_direction};
use crate::polar::{sech_sq, turn_diff};

type C64 = Complex64;

/// Comparison key for nearest-anchor queries: `|1 − t²ζ·η|`.
pub(crate) fn gap(defect: f64, t2: f64, zeta: &[C64], eta: &[C64]) -> f64 {
    (C64::new(defect, 0.0) + one_minus_dot_unit(zeta, eta) * t2).norm()
}

#[derive(Debug, Clone)]
pub(crate) enum LevelNet {
    /// `n = 1`: anchors at multiples of the minimal separation angle.
    Arcs { anchors: Vec<f64>, bounds: Vec<f64> },
    /// `n ≥ 2`: anchors with a uniform grid index in `R^{2n}`; each anchor
    /// is filed under every cell adjacent to its own, so a query reads one
    /// bucket.
    Points { anchors: Vec<Vec<C64>>, grid: HashMap<u64, Vec<u32>>, h: f64, threshold: f64 },
}

pub(crate) struct SphereGeometry {
    pub defect: f64,
    pub t2: f64,
    pub threshold: f64,
}

impl SphereGeometry {
    pub fn new(radius: f64, lambda: f64) -> Self {
        let defect = sech_sq(radius);
        let t2 = radius.tanh().powi(2);
        Self { defect, t2, threshold: defect * lambda.cosh() }
    }

    /// Grid spacing: `|1 − t²ζ·η| < threshold` forces `|ζ − η| < h`.
    fn spacing(&self, lambda: f64) -> f64 {
        (2.0 * self.defect * (lambda.cosh() - 1.0)).sqrt() / self.t2.sqrt()
    }
}

const LOCAL_PROBES: usize = 32;

/// A random unit vector near `a`: a complex-tangential offset of length up
/// to `tangential` and a phase rotation of up to `phase`.
fn perturb<R: rand::Rng>(a: &[C64], tangential: f64, phase: f64, rng: &mut R) -> Vec<C64> {
    let u = random_direction(rng, a.len());
    let proj = crate::geometry::dot(&u, a);
    let v: Vec<C64> = u.iter().zip(a).map(|(x, y)| x - y * proj).collect();
    let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    let r = tangential * rng.gen::<f64>();
    let rot = C64::from_polar(1.0, phase * (2.0 * rng.gen::<f64>() - 1.0));
    let w: Vec<C64> = a.iter().zip(&v).map(|(x, y)| x * rot + y * (r / vn)).collect();
    let norm = w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    w.into_iter().map(|c| c / norm).collect()
}

fn cell_coords(z: &[C64], h: f64) -> Vec<i64> {
    z.iter().flat_map(|c| [(c.re / h).floor() as i64, (c.im / h).floor() as i64]).collect()
}

/// Hash of integer cell coordinates. Collisions only add candidates to a
/// bucket, never remove them, so they cost time but not correctness.
fn mix(coords: &[i64]) -> u64 {
    coords.iter().fold(0xcbf2_9ce4_8422_2325u64, |acc, &k| {
        (acc ^ (k as u64).wrapping_add(0x9e37_79b9_7f4a_7c15)).wrapping_mul(0x0000_0100_0000_01b3).rotate_left(17)
    })
}

fn grid_key(z: &[C64], h: f64) -> u64 {
    mix(&cell_coords(z, h))
}

/// Keys of the `3^{2n}` cells around (and including) the cell of `z`.
fn neighbour_keys(z: &[C64], h: f64) -> Vec<u64> {
    let base = cell_coords(z, h);
    let dims = base.len();
    let total = 3usize.pow(dims as u32);
    let mut cur = base.clone();
    (0..total)
        .map(|mut code| {
            for (d, c) in cur.iter_mut().enumerate() {
                *c = base[d] + (code % 3) as i64 - 1;
                code /= 3;
            }
            mix(&cur)
        })
        .collect()
}

impl LevelNet {
    pub fn len(&self) -> usize {
        match self {
            LevelNet::Arcs { anchors, .. } => anchors.len(),
            LevelNet::Points { anchors, .. } => anchors.len(),
        }
    }

    pub fn direction(&self, j: usize) -> Vec<C64> {
        match self {
            LevelNet::Arcs { anchors, .. } => vec![C64::from_polar(1.0, 2.0 * PI * anchors[j])],
            LevelNet::Points { anchors, .. } => anchors[j].clone(),
        }
    }

    /// Circle net: anchors `k·θ_min`, the final gap lying in `[θ_min, 2θ_min)`.
    pub fn build_circle(radius: f64, lambda: f64) -> Self {
        let g = SphereGeometry::new(radius, lambda);
        let x = g.defect * lambda.sinh() / (2.0 * g.t2.sqrt());
        let count = if x >= 1.0 { 1 } else { ((PI / x.asin()).floor() as usize).max(1) };
        let step = if count == 1 { 1.0 } else { x.asin() / PI };
        let anchors: Vec<f64> = (0..count).map(|k| k as f64 * step).collect();
        let mut bounds = Vec::with_capacity(count);
        for k in 0..count {
            let prev = if k == 0 { anchors[count - 1] - 1.0 } else { anchors[k - 1] };
            bounds.push(if count == 1 { -0.5 } else { 0.5 * (prev + anchors[k]) });
        }
        LevelNet::Arcs { anchors, bounds }
    }

    /// Greedy net over candidate rounds. Each round draws a uniform batch
    /// and probes the ring just outside every anchor's exclusion zone,
    /// where the last gaps of a nearly maximal net sit. Two consecutive
    /// rounds without additions end the construction.
    pub fn build_sphere(
        n: usize,
        radius: f64,
        lambda: f64,
        seed: u64,
        level: usize,
        max_rounds: usize,
        pool_size: usize,
    ) -> Result<Self> {
        let g = SphereGeometry::new(radius, lambda);
        let h = g.spacing(lambda).max(1e-300);
        // Half-width of the exclusion zone in the complex-normal direction.
        let normal = g.defect * lambda.sinh() / g.t2.max(1e-300);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(level as u64 + 1)));
        let mut anchors: Vec<Vec<C64>> = Vec::new();
        let mut grid: HashMap<u64, Vec<u32>> = HashMap::new();
        let mut offer = |zeta: Vec<C64>, anchors: &mut Vec<Vec<C64>>| -> bool {
            let clash = grid
                .get(&grid_key(&zeta, h))
                .is_some_and(|ids| ids.iter().any(|&i| gap(g.defect, g.t2, &zeta, &anchors[i as usize]) < g.threshold));
            if clash {
                return false;
            }
            let mut keys = neighbour_keys(&zeta, h);
            keys.sort_unstable();
            keys.dedup();
            for k in keys {
                grid.entry(k).or_default().push(anchors.len() as u32);
            }
            anchors.push(zeta);
            true
        };
        // Seed with a large pool swept in grid order, which packs far more
        // regularly than random insertion.
        let mut pool: Vec<(Vec<i64>, Vec<C64>)> = (0..pool_size)
            .map(|_| {
                let zeta = random_direction(&mut rng, n);
                (cell_coords(&zeta, h), zeta)
            })
            .collect();
        pool.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, zeta) in pool {
            offer(zeta, &mut anchors);
        }
        let mut quiet = 0;
        for _ in 0..max_rounds {
            let mut added = 0;
            for _ in 0..(1usize << 16).max(16 * anchors.len()) {
                let zeta = random_direction(&mut rng, n);
                added += offer(zeta, &mut anchors) as usize;
            }
            let existing = anchors.len();
            for i in 0..existing {
                for _ in 0..LOCAL_PROBES {
                    let zeta = perturb(&anchors[i], 2.0 * h, 3.0 * normal, &mut rng);
                    added += offer(zeta, &mut anchors) as usize;
                }
            }
            if added == 0 {
                quiet += 1;
                if quiet == 2 {
                    return Ok(LevelNet::Points { anchors, grid, h, threshold: g.threshold });
                }
            } else {
                quiet = 0;
            }
        }
        Err(Error::Resolution { level, detail: format!("net still growing after {max_rounds} candidate rounds") })
    }

    /// Voronoi cell of a direction; ties go to the lowest index.
    pub fn nearest(&self, radius: f64, zeta: &[C64], turn: Option<f64>) -> usize {
        match self {
            LevelNet::Arcs { bounds, .. } => {
                let t = match turn {
                    Some(t) => t,
                    None => zeta[0].arg() / (2.0 * PI),
                };
                let k = bounds.len();
                if k == 1 {
                    return 0;
                }
                // bounds[0] < 0 ≤ bounds[1] < … ; cell j is [bounds[j], bounds[j+1]).
                let t = t - t.floor();
                let t = if t >= bounds[0] + 1.0 { t - 1.0 } else { t };
                match bounds.binary_search_by(|b| b.partial_cmp(&t).unwrap()) {
                    Ok(j) => j,
                    Err(0) => 0,
                    Err(j) => j - 1,
                }
            }
            LevelNet::Points { anchors, grid, h, threshold } => {
                let g = SphereGeometry { defect: sech_sq(radius), t2: radius.tanh().powi(2), threshold: 0.0 };
                let mut best = (f64::INFINITY, usize::MAX);
                if let Some(ids) = grid.get(&grid_key(zeta, *h)) {
                    for &i in ids {
                        let v = gap(g.defect, g.t2, zeta, &anchors[i as usize]);
                        if v < best.0 || (v == best.0 && (i as usize) < best.1) {
                            best = (v, i as usize);
                        }
                    }
                }
                // Outside every anchor's threshold ball the grid search is
                // not conclusive.
                if best.0 >= *threshold {
                    best = (f64::INFINITY, usize::MAX);
                    for (i, a) in anchors.iter().enumerate() {
                        let v = gap(g.defect, g.t2, zeta, a);
                        if v < best.0 {
                            best = (v, i);
                        }
                    }
                }
                best.1
            }
        }
    }

    /// Arc of cell `j` in turns (circle nets only).
    pub fn arc(&self, j: usize) -> Option<(f64, f64)> {
        match self {
            LevelNet::Arcs { bounds, .. } => {
                let k = bounds.len();
                if k == 1 {
                    return Some((0.0, 1.0));
                }
                let hi = if j + 1 == k { bounds[0] + 1.0 } else { bounds[j + 1] };
                Some((bounds[j], hi))
            }
            LevelNet::Points { .. } => None,
        }
    }

    /// Anchor angle in turns (circle nets only).
    pub fn anchor_turn(&self, j: usize) -> Option<f64> {
        match self {
            LevelNet::Arcs { anchors, .. } => Some(anchors[j]),
            LevelNet::Points { .. } => None,
        }
    }
}

/// Smallest pairwise Bergman-separation statistic `min gap/threshold` of a net.
pub(crate) fn min_separation_ratio(net: &LevelNet, radius: f64, lambda: f64) -> f64 {
    let g = SphereGeometry::new(radius, lambda);
    let k = net.len();
    let mut worst = f64::INFINITY;
    match net {
        LevelNet::Arcs { anchors, .. } => {
            for i in 0..k {
                let j = (i + 1) % k;
                if i == j {
                    continue;
                }
                let dt = turn_diff(anchors[j], anchors[i]);
                let sn = (PI * dt).sin();
                let v = (g.defect * g.defect + 4.0 * g.t2 * sn * sn).sqrt();
                worst = worst.min(v / g.threshold);
            }
        }
        LevelNet::Points { anchors, .. } => {
            for i in 0..k {
                for j in i + 1..k {
                    let v = gap(g.defect, g.t2, &anchors[i], &anchors[j]);
                    worst = worst.min(v / g.threshold);
                }
            }
        }
    }
    worst
}
