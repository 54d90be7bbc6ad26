//! The Bergman tree: cells `K_α` cut from the ball by Bergman spheres at
//! multiples of `λ` and by Voronoi cells of λ-nets on those spheres.
//!
//! Two constructions are available. `Dyadic` (disc only) uses the analytic
//! grid of [`DyadicGrid`], whose cells are exact polar boxes. `Generic`
//! builds greedy nets level by level in any dimension.

pub mod chain;
pub mod coloring;
pub mod dyadic;
pub(crate) mod net;

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{bergman_distance, beta_unit, mobius_map, random_direction, BallPoint};
use crate::measure::{CellUnion, PolarBox, Region, WeightedMeasure};
use crate::polar::{sech_sq, PolarPoint};

pub use dyadic::{CellKey, DyadicGrid};
use net::{gap, LevelNet, SphereGeometry};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeMode {
    Dyadic,
    Generic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub n: usize,
    pub lambda: f64,
    pub depth: usize,
    pub mode: TreeMode,
    /// Dyadic level `N₀` with `λ = ln 2 · 2^{−N₀}` (dyadic mode).
    pub dyadic_level: Option<u32>,
    pub seed: u64,
    /// Candidate batches per level before giving up on a net.
    pub max_rounds: usize,
    /// Directions sampled per level to estimate cell surface measures.
    pub sigma_samples: usize,
}

impl TreeParams {
    pub fn dyadic(n0: u32, depth: usize) -> Self {
        let grid = DyadicGrid::new(n0);
        Self {
            n: 1,
            lambda: grid.lambda(),
            depth,
            mode: TreeMode::Dyadic,
            dyadic_level: Some(n0),
            seed: 0,
            max_rounds: 256,
            sigma_samples: 0,
        }
    }

    pub fn generic(n: usize, lambda: f64, depth: usize, seed: u64) -> Self {
        Self {
            n,
            lambda,
            depth,
            mode: TreeMode::Generic,
            dyadic_level: None,
            seed,
            max_rounds: 256,
            sigma_samples: 1 << 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub level: usize,
    pub index: usize,
    /// Unit direction shared by the anchor and the center.
    pub direction: Vec<C64>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A region built from tree cells, with a flag for depth truncation.
#[derive(Debug, Clone)]
pub struct CellRegion {
    pub region: Region,
    pub ids: Vec<usize>,
    pub truncated: bool,
}

#[derive(Debug)]
pub struct BergmanTree {
    params: TreeParams,
    nodes: Vec<TreeNode>,
    level_start: Vec<usize>,
    grid: Option<DyadicGrid>,
    nets: Vec<Option<LevelNet>>,
    /// Normalized surface measure of each cell's direction set.
    sigma: Vec<f64>,
}

#[derive(Serialize)]
struct ExportLine<'a> {
    level: usize,
    index: usize,
    anchor: Vec<[f64; 2]>,
    center: Vec<[f64; 2]>,
    parent: Option<usize>,
    children: &'a [usize],
}

fn pairs(z: &BallPoint) -> Vec<[f64; 2]> {
    z.coords().iter().map(|c| [c.re, c.im]).collect()
}

impl BergmanTree {
    pub fn build(params: TreeParams) -> Result<Self> {
        if !(params.lambda > 0.0) {
            return Err(Error::Config("lambda must be positive".into()));
        }
        if params.depth < 1 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        match params.mode {
            TreeMode::Dyadic => Self::build_dyadic(params),
            TreeMode::Generic => Self::build_generic(params),
        }
    }

    fn build_dyadic(mut params: TreeParams) -> Result<Self> {
        if params.n != 1 {
            return Err(Error::Config("dyadic trees exist only for n = 1".into()));
        }
        let n0 = params.dyadic_level.ok_or_else(|| Error::Config("dyadic mode needs a dyadic level".into()))?;
        let grid = DyadicGrid::new(n0);
        params.lambda = grid.lambda();
        let mut nodes = Vec::new();
        let mut level_start = Vec::new();
        let mut sigma = Vec::new();
        for level in 0..=params.depth {
            let count = grid
                .count_exact(level)
                .filter(|&j| j <= 1 << 24)
                .ok_or_else(|| Error::Config(format!("level {level} has too many cells to store")))?;
            level_start.push(nodes.len());
            for j in 0..count {
                let t = if level == 0 { 0.0 } else { (j as f64 + 0.5) / count as f64 };
                let parent = grid.parent((level, j)).map(|(l, p)| level_start[l] + p as usize);
                let id = nodes.len();
                nodes.push(TreeNode {
                    id,
                    level,
                    index: j as usize,
                    direction: vec![C64::from_polar(1.0, 2.0 * PI * t)],
                    parent,
                    children: Vec::new(),
                });
                sigma.push(1.0 / count as f64);
                if let Some(p) = parent {
                    nodes[p].children.push(id);
                }
            }
        }
        level_start.push(nodes.len());
        let nets = vec![None; params.depth + 1];
        Ok(Self { params, nodes, level_start, grid: Some(grid), nets, sigma })
    }

    fn build_generic(params: TreeParams) -> Result<Self> {
        let n = params.n;
        let lam = params.lambda;
        let mut e1 = vec![C64::new(0.0, 0.0); n];
        e1[0] = C64::new(1.0, 0.0);
        let mut nodes = vec![TreeNode { id: 0, level: 0, index: 0, direction: e1, parent: None, children: Vec::new() }];
        let mut level_start = vec![0, 1];
        let mut nets: Vec<Option<LevelNet>> = vec![None];
        let mut sigma = vec![1.0];
        for level in 1..=params.depth {
            let radius = lam * level as f64;
            let net = if n == 1 {
                LevelNet::build_circle(radius, lam)
            } else {
                {
                    let prev = level_start[level] - level_start[level - 1];
                    let pool = (1usize << 18).max(256 * prev * (2.0 * n as f64 * lam).exp().ceil() as usize);
                    LevelNet::build_sphere(n, radius, lam, params.seed, level, params.max_rounds, pool)?
                }
            };
            let start = nodes.len();
            for j in 0..net.len() {
                let direction = net.direction(j);
                let parent = if level == 1 {
                    0
                } else {
                    let prev = nets[level - 1].as_ref().expect("previous level built");
                    let turn = net.anchor_turn(j);
                    level_start[level - 1] + prev.nearest(lam * (level - 1) as f64, &direction, turn)
                };
                let id = nodes.len();
                nodes.push(TreeNode { id, level, index: j, direction, parent: Some(parent), children: Vec::new() });
                nodes[parent].children.push(id);
            }
            // Surface measure of each Voronoi cell.
            if n == 1 {
                for j in 0..net.len() {
                    let (a, b) = net.arc(j).expect("circle nets have arcs");
                    sigma.push(b - a);
                }
            } else {
                let samples = params.sigma_samples.max(128 * net.len());
                let mut counts = vec![0usize; net.len()];
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed.wrapping_add(0x5151 * level as u64));
                for _ in 0..samples {
                    let zeta = random_direction(&mut rng, n);
                    counts[net.nearest(radius, &zeta, None)] += 1;
                }
                sigma.extend(counts.iter().map(|&c| c as f64 / samples as f64));
            }
            level_start.push(start + net.len());
            nets.push(Some(net));
        }
        Ok(Self { params, nodes, level_start, grid: None, nets, sigma })
    }

    pub fn dyadic(n0: u32, depth: usize) -> Result<Self> {
        Self::build(TreeParams::dyadic(n0, depth))
    }

    pub fn generic(n: usize, lambda: f64, depth: usize, seed: u64) -> Result<Self> {
        Self::build(TreeParams::generic(n, lambda, depth, seed))
    }

    pub fn params(&self) -> &TreeParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.params.n
    }

    pub fn lambda(&self) -> f64 {
        self.params.lambda
    }

    pub fn depth(&self) -> usize {
        self.params.depth
    }

    pub fn mode(&self) -> TreeMode {
        self.params.mode
    }

    pub fn grid(&self) -> Option<&DyadicGrid> {
        self.grid.as_ref()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn level_ids(&self, level: usize) -> std::ops::Range<usize> {
        self.level_start[level]..self.level_start[level + 1]
    }

    pub fn id_of(&self, level: usize, index: usize) -> usize {
        self.level_start[level] + index
    }

    /// Dyadic key of a node.
    pub fn key(&self, id: usize) -> CellKey {
        let node = &self.nodes[id];
        (node.level, node.index as i64)
    }

    fn id_of_key(&self, key: CellKey) -> Option<usize> {
        let grid = self.grid.as_ref()?;
        let (level, j) = grid.normalize(key);
        (level <= self.params.depth).then(|| self.id_of(level, j as usize))
    }

    /// `(s_lo, s_hi)` with `s = 1 − |z|²` for the level band.
    pub fn level_band(&self, level: usize) -> (f64, f64) {
        let lam = self.params.lambda;
        let hi = if level == 0 { 1.0 } else { sech_sq(lam * level as f64) };
        (sech_sq(lam * (level + 1) as f64), hi)
    }

    /// Sphere anchor `z_j^N` on `S_{λN}`; the origin for the root.
    pub fn anchor(&self, id: usize) -> BallPoint {
        let node = &self.nodes[id];
        if node.level == 0 {
            return BallPoint::origin(self.params.n);
        }
        BallPoint::at_bergman_radius(&node.direction, self.params.lambda * node.level as f64)
    }

    /// Center `c_α` at Bergman radius `λ(N + ½)`; the origin for the root.
    pub fn center(&self, id: usize) -> BallPoint {
        let node = &self.nodes[id];
        if node.level == 0 {
            return BallPoint::origin(self.params.n);
        }
        BallPoint::at_bergman_radius(&node.direction, self.params.lambda * (node.level as f64 + 0.5))
    }

    /// Center in polar form (`n = 1`).
    pub fn center_polar(&self, id: usize) -> Option<PolarPoint> {
        if self.params.n != 1 {
            return None;
        }
        if let Some(g) = &self.grid {
            return Some(g.center(self.key(id)));
        }
        let node = &self.nodes[id];
        if node.level == 0 {
            return Some(PolarPoint::origin());
        }
        let net = self.nets[node.level].as_ref()?;
        let t = net.anchor_turn(node.index)?;
        Some(PolarPoint::at_depth(t, self.params.lambda * (node.level as f64 + 0.5)))
    }

    /// Exact polar box of a cell (`n = 1`).
    pub fn cell_box(&self, id: usize) -> Option<PolarBox> {
        if self.params.n != 1 {
            return None;
        }
        if let Some(g) = &self.grid {
            return Some(g.cell(self.key(id)));
        }
        let node = &self.nodes[id];
        let (s_lo, s_hi) = self.level_band(node.level);
        if node.level == 0 {
            return Some(PolarBox { s_lo, s_hi, t_lo: 0.0, t_hi: 1.0 });
        }
        let (t_lo, t_hi) = self.nets[node.level].as_ref()?.arc(node.index)?;
        Some(PolarBox { s_lo, s_hi, t_lo, t_hi })
    }

    /// `v_γ(K_α)`: exact for `n = 1`, Monte Carlo surface measure otherwise.
    pub fn cell_volume(&self, id: usize, gamma: f64) -> f64 {
        let node = &self.nodes[id];
        let (s_lo, s_hi) = self.level_band(node.level);
        let m = WeightedMeasure { n: self.params.n, gamma };
        m.shell_mass(s_lo, s_hi) * self.sigma[id]
    }

    /// `τ(K_α)` for `dτ = (1−|z|²)^{−n−1} dv`.
    pub fn cell_tau(&self, id: usize) -> f64 {
        let node = &self.nodes[id];
        let (s_lo, s_hi) = self.level_band(node.level);
        let n = self.params.n as f64;
        // In s = 1−|z|², Lebesgue measure on the ball is (π^n/(n−1)!) (1−s)^{n−1} ds dσ
        // with σ the normalized sphere measure.
        let rule = crate::special::gauss_legendre_unit(24);
        let panels = ((s_hi / s_lo).log2().ceil() as usize).max(1);
        let ratio = (s_hi / s_lo).powf(1.0 / panels as f64);
        let mut a = s_lo;
        let mut acc = 0.0;
        for _ in 0..panels {
            let b = a * ratio;
            acc += (b - a)
                * rule.integrate(|x| {
                    let s = a + (b - a) * x;
                    (1.0 - s).powf(n - 1.0) * s.powf(-n - 1.0)
                });
            a = b;
        }
        acc * PI.powf(n) / crate::special::ln_gamma(n).exp() * self.sigma[id]
    }

    pub fn sigma(&self, id: usize) -> f64 {
        self.sigma[id]
    }

    fn level_of_defect(&self, s: f64) -> usize {
        let lam = self.params.lambda;
        let mut level = (PolarPoint::new(s, 0.0).depth() / lam).floor().max(0.0) as usize;
        while level > 0 && s > self.level_band(level).1 {
            level -= 1;
        }
        while s <= self.level_band(level).0 {
            level += 1;
        }
        level
    }

    /// The cell containing `z`.
    pub fn locate(&self, z: &BallPoint) -> Result<usize> {
        let s = z.defect();
        let level = if s >= 1.0 { 0 } else { self.level_of_defect(s) };
        if level > self.params.depth {
            return Err(Error::OutOfDepth {
                distance: z.radius(),
                limit: self.params.lambda * (self.params.depth + 1) as f64,
            });
        }
        if level == 0 {
            return Ok(0);
        }
        let dir = z.direction().expect("nonzero point");
        Ok(self.locate_direction(level, &dir))
    }

    /// Cell at `level` whose sphere cell contains the direction `ζ`.
    pub fn locate_direction(&self, level: usize, zeta: &[C64]) -> usize {
        if level == 0 {
            return 0;
        }
        if let Some(g) = &self.grid {
            let t = zeta[0].arg() / (2.0 * PI);
            let t = t - t.floor();
            let key = g.normalize((level, (t / g.width(level)).floor() as i64));
            return self.id_of(level, key.1 as usize);
        }
        let net = self.nets[level].as_ref().expect("level built");
        self.level_start[level] + net.nearest(self.params.lambda * level as f64, zeta, None)
    }

    pub fn locate_polar(&self, p: &PolarPoint) -> Result<usize> {
        if let Some(g) = &self.grid {
            let key = g.locate(p);
            return self.id_of_key(key).ok_or(Error::OutOfDepth {
                distance: p.depth(),
                limit: self.params.lambda * (self.params.depth + 1) as f64,
            });
        }
        self.locate(&p.to_ball())
    }

    /// All descendants of a node (including itself) down to the tree depth.
    pub fn descendants(&self, id: usize) -> Vec<usize> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.nodes[out[i]].children.iter().copied());
            i += 1;
        }
        out
    }

    /// `C^ℓ(α)`: descendants exactly `ℓ` levels below.
    pub fn generation(&self, id: usize, ell: usize) -> Vec<usize> {
        let mut cur = vec![id];
        for _ in 0..ell {
            cur = cur.iter().flat_map(|&c| self.nodes[c].children.iter().copied()).collect();
        }
        cur
    }

    /// Random points of a cell, always including its center.
    pub fn sample_cell<R: Rng>(&self, id: usize, count: usize, rng: &mut R) -> Vec<BallPoint> {
        let mut out = vec![self.center(id)];
        if let (Some(b), true) = (self.cell_box(id), self.params.n == 1) {
            for _ in 0..count {
                let s = b.s_lo + (b.s_hi - b.s_lo) * rng.gen::<f64>();
                let t = b.t_lo + (b.t_hi - b.t_lo) * rng.gen::<f64>();
                if s > 0.0 {
                    out.push(PolarPoint::new(s, t).to_ball());
                }
            }
            return out;
        }
        let node = &self.nodes[id];
        let lam = self.params.lambda;
        let (lo, hi) = (lam * node.level as f64, lam * (node.level + 1) as f64);
        if node.level == 0 {
            for _ in 0..count {
                let dir = random_direction(rng, self.params.n);
                out.push(BallPoint::at_bergman_radius(&dir, hi * rng.gen::<f64>()));
            }
            return out;
        }
        let g = SphereGeometry::new(lo, lam);
        let spread = (2.0 * g.defect * ((2.0 * lam).cosh() - 1.0)).sqrt() / g.t2.sqrt();
        let mut tries = 0;
        while out.len() < count + 1 && tries < 200 * (count + 1) {
            tries += 1;
            let noise = random_direction(rng, self.params.n);
            let scale = spread * rng.gen::<f64>();
            let v: Vec<C64> = node.direction.iter().zip(&noise).map(|(a, b)| a + b * scale).collect();
            let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            let zeta: Vec<C64> = v.iter().map(|c| c / norm).collect();
            if self.locate_direction(node.level, &zeta) != id {
                continue;
            }
            let rho = lo + (hi - lo) * rng.gen::<f64>();
            out.push(BallPoint::at_bergman_radius(&zeta, rho.max(1e-300)));
        }
        out
    }

    /// `N_α^R = {ω : D(c_α, R) ∩ K_ω ≠ ∅}`, with a flag when the ball
    /// reaches below the tree depth.
    pub fn neighbors(&self, id: usize, radius: f64) -> (Vec<usize>, bool) {
        let lam = self.params.lambda;
        let level = self.nodes[id].level;
        let reach = if level == 0 { radius } else { lam * (level as f64 + 0.5) + radius };
        let truncated = reach >= lam * (self.params.depth + 1) as f64;
        if let Some(g) = &self.grid {
            let c = g.center(self.key(id));
            let mut ids: Vec<usize> = g.ball_cells(&c, radius).into_iter().filter_map(|k| self.id_of_key(k)).collect();
            ids.sort_unstable();
            ids.dedup();
            return (ids, truncated);
        }
        if self.params.n == 1 {
            let c = self.center_polar(id).expect("disc tree");
            let mut ids = Vec::new();
            let first = (((if level == 0 { 0.0 } else { lam * (level as f64 + 0.5) }) - radius) / lam).floor().max(0.0)
                as usize;
            let last = (((reach) / lam).floor() as usize).min(self.params.depth);
            for l in first..=last {
                for other in self.level_ids(l) {
                    let b = self.cell_box(other).expect("disc tree");
                    if crate::polar::box_min_distance(&c, &b) <= radius {
                        ids.push(other);
                    }
                }
            }
            return (ids, truncated);
        }
        // Sampling: points of D(c_α, R), a quarter of them on its boundary.
        let c = self.center(id);
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(id);
        let mut rng = ChaCha8Rng::seed_from_u64(self.params.seed ^ (id as u64).wrapping_mul(0x2545_f491_4f6c_dd1d));
        let samples = 4096;
        for k in 0..samples {
            let dir = random_direction(&mut rng, self.params.n);
            let r = if k % 4 == 0 { radius } else { radius * rng.gen::<f64>() };
            let u = BallPoint::at_bergman_radius(&dir, r.max(1e-300));
            let z = if c.norm() == 0.0 { u } else { mobius_map(&c, &u).expect("interior points") };
            if let Ok(found) = self.locate(&z) {
                set.insert(found);
            }
        }
        // Cells whose centers lie in the ball are always included.
        let lo_level = ((reach - 2.0 * radius) / lam).floor().max(0.0) as usize;
        let hi_level = ((reach / lam).ceil() as usize).min(self.params.depth);
        for l in lo_level..=hi_level {
            for other in self.level_ids(l) {
                if bergman_distance(&c, &self.center(other)).map(|d| d <= radius).unwrap_or(false) {
                    set.insert(other);
                }
            }
        }
        (set.into_iter().collect(), truncated)
    }

    /// `bdd N_α^R`: same-level nodes with `β(ĉ_α, ĉ_ω) < R e^{−λ d(α)}`.
    pub fn boundary_neighbors(&self, id: usize, radius: f64) -> Result<Vec<usize>> {
        let node = &self.nodes[id];
        if node.level == 0 {
            return Err(Error::Domain("boundary neighbours are undefined for the root".into()));
        }
        let bound = radius * (-self.params.lambda * node.level as f64).exp();
        Ok(self.level_ids(node.level).filter(|&other| self.beta_between(id, other) < bound).collect())
    }

    /// `β(ĉ_α, ĉ_ω)` between node directions.
    pub fn beta_between(&self, a: usize, b: usize) -> f64 {
        if let Some(g) = &self.grid {
            let (ka, kb) = (self.key(a), self.key(b));
            let (ca, cb) = (g.center(ka), g.center(kb));
            let dt = crate::polar::turn_diff(ca.t, cb.t);
            return (2.0 * (PI * dt).sin().abs()).sqrt();
        }
        beta_unit(&self.nodes[a].direction, &self.nodes[b].direction)
    }

    fn cells_region(self: &Arc<Self>, mut ids: Vec<usize>, truncated: bool) -> CellRegion {
        ids.sort_unstable();
        ids.dedup();
        let region = Region::Cells(CellUnion { tree: Arc::clone(self), ids: ids.clone() });
        CellRegion { region, ids, truncated }
    }

    /// `Q_α = (∪_{ω ∈ N_α^{6λ}} K_ω) ∪ (∪_{β ∈ C¹(α)} K_β)`.
    pub fn region_q(self: &Arc<Self>, id: usize) -> CellRegion {
        let (mut ids, mut truncated) = self.neighbors(id, 6.0 * self.params.lambda);
        ids.extend(self.nodes[id].children.iter().copied());
        if self.nodes[id].level >= self.params.depth {
            truncated = true;
        }
        self.cells_region(ids, truncated)
    }

    /// `S̃_α = ∪_{ω ∈ N_α^R} ∪_{β ≥ ω} K_β`. Dyadic tents reach the sphere
    /// exactly; generic unions stop at the tree depth.
    pub fn region_s(self: &Arc<Self>, id: usize, radius: f64) -> CellRegion {
        let (omegas, truncated) = self.neighbors(id, radius);
        if let Some(g) = &self.grid {
            // Keep only maximal ω: their tents are disjoint.
            let maximal: Vec<usize> = omegas
                .iter()
                .copied()
                .filter(|&w| {
                    let mut p = self.nodes[w].parent;
                    while let Some(q) = p {
                        if omegas.binary_search(&q).is_ok() {
                            return false;
                        }
                        p = self.nodes[q].parent;
                    }
                    true
                })
                .collect();
            let boxes: Vec<Region> = maximal.iter().map(|&w| Region::Box(g.tent(self.key(w)))).collect();
            let mut ids = Vec::new();
            for &w in &maximal {
                ids.extend(self.descendants(w));
            }
            ids.sort_unstable();
            return CellRegion { region: Region::Union(boxes), ids, truncated };
        }
        let mut ids = Vec::new();
        for &w in &omegas {
            ids.extend(self.descendants(w));
        }
        let _ = truncated;
        self.cells_region(ids, true)
    }

    /// JSON lines `{level, index, anchor, center, parent, children}` in
    /// `(level, index)` order.
    pub fn export_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for node in &self.nodes {
            let line = ExportLine {
                level: node.level,
                index: node.index,
                anchor: pairs(&self.anchor(node.id)),
                center: pairs(&self.center(node.id)),
                parent: node.parent,
                children: &node.children,
            };
            serde_json::to_writer(&mut out, &line)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    /// Net statistics at one level: the smallest ratio of anchor gap to the
    /// separation threshold (at least one for a λ-separated net).
    pub fn net_separation(&self, level: usize) -> Option<f64> {
        let net = self.nets.get(level)?.as_ref()?;
        Some(net::min_separation_ratio(net, self.params.lambda * level as f64, self.params.lambda))
    }

    /// Bergman distance from a sphere point to its nearest anchor, for
    /// sampled directions; returns the maximum (covering radius estimate).
    pub fn net_covering(&self, level: usize, samples: usize, seed: u64) -> f64 {
        let radius = self.params.lambda * level as f64;
        let g = SphereGeometry::new(radius, self.params.lambda);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let zeta = random_direction(&mut rng, self.params.n);
            let id = self.locate_direction(level, &zeta);
            let v = gap(g.defect, g.t2, &zeta, &self.nodes[id].direction);
            // d = acosh(gap / defect) on a common sphere.
            worst = worst.max((v / g.defect).max(1.0).acosh());
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_structure() {
        let t = BergmanTree::dyadic(1, 8).unwrap();
        assert_eq!(t.node(0).children.len(), 2);
        for node in t.nodes().iter().skip(1) {
            let p = node.parent.unwrap();
            assert!(t.node(p).children.contains(&node.id));
            assert_eq!(t.locate(&t.center(node.id)).unwrap(), node.id);
            let d = bergman_distance(&BallPoint::origin(1), &t.center(node.id)).unwrap();
            assert!((d - t.lambda() * (node.level as f64 + 0.5)).abs() < 1e-10);
        }
        assert_eq!(t.locate(&BallPoint::origin(1)).unwrap(), 0);
        let total: f64 = (0..t.len()).map(|i| t.cell_volume(i, 0.0)).sum();
        let (s_lo, _) = t.level_band(8);
        assert!((total - (1.0 - s_lo)).abs() < 1e-12);
    }

    #[test]
    fn generic_disc_net_is_separated_and_covering() {
        let t = BergmanTree::generic(1, std::f64::consts::LN_2 / 2.0, 7, 1).unwrap();
        for level in 1..=7 {
            assert!(t.net_separation(level).unwrap() >= 1.0 - 1e-12);
            assert!(t.net_covering(level, 2000, 5) <= t.lambda() + 1e-12);
        }
        for node in t.nodes().iter().skip(1) {
            assert_eq!(t.locate(&t.center(node.id)).unwrap(), node.id);
        }
    }

    #[test]
    fn generic_ball_net() {
        let t = BergmanTree::generic(2, std::f64::consts::LN_2 / 4.0, 4, 3).unwrap();
        for level in 1..=4 {
            assert!(t.net_separation(level).unwrap() >= 1.0);
            assert!(t.net_covering(level, 2000, 9) <= t.lambda());
        }
        let total: f64 = (1..t.len()).map(|i| t.sigma(i)).sum();
        assert!((total - 4.0).abs() < 1e-9);
    }

    #[test]
    fn export_is_ordered() {
        let t = BergmanTree::dyadic(1, 3).unwrap();
        let mut buf = Vec::new();
        t.export_jsonl(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), t.len());
        let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(first["level"], 0);
        assert!(first["parent"].is_null());
    }
}
