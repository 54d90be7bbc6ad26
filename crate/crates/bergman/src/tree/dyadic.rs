//! Analytic dyadic decomposition of the disc with `λ = ln 2 · 2^{−N₀}`.
//!
//! Level `N` holds `J_N = 2^{e_N}` cells, `e_N = ⌈2N/2^{N₀}⌉`, each the
//! polar box `{λN ≤ d(0,z) < λ(N+1)} × [j/J_N, (j+1)/J_N)`. Indices are
//! signed so that cells near a reference angle can be addressed without
//! wrapping at levels where `J_N` exceeds any integer type.

use std::f64::consts::LN_2;

use crate::measure::PolarBox;
use crate::polar::{box_min_distance, sech_sq, PolarPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGrid {
    pub n0: u32,
}

/// A cell address `(level, index)`; the index is taken modulo `J_level`
/// only when that count is small enough to enumerate.
pub type CellKey = (usize, i64);

impl DyadicGrid {
    pub fn new(n0: u32) -> Self {
        Self { n0 }
    }

    pub fn lambda(&self) -> f64 {
        LN_2 / (1u64 << self.n0) as f64
    }

    pub fn exponent(&self, level: usize) -> u32 {
        let q = 1u64 << self.n0;
        (2 * level as u64).div_ceil(q) as u32
    }

    /// `J_N` as a float; exact for every level of interest.
    pub fn count(&self, level: usize) -> f64 {
        (self.exponent(level) as f64).exp2()
    }

    /// `J_N` when it fits comfortably in an index.
    pub fn count_exact(&self, level: usize) -> Option<i64> {
        let e = self.exponent(level);
        (e < 62).then(|| 1i64 << e)
    }

    pub fn width(&self, level: usize) -> f64 {
        (-(self.exponent(level) as f64)).exp2()
    }

    /// Defect band `(s_lo, s_hi)` of a level.
    pub fn band(&self, level: usize) -> (f64, f64) {
        let lam = self.lambda();
        let hi = if level == 0 { 1.0 } else { sech_sq(lam * level as f64) };
        (sech_sq(lam * (level + 1) as f64), hi)
    }

    pub fn cell(&self, key: CellKey) -> PolarBox {
        let (s_lo, s_hi) = self.band(key.0);
        if key.0 == 0 {
            return PolarBox { s_lo, s_hi, t_lo: 0.0, t_hi: 1.0 };
        }
        let w = self.width(key.0);
        PolarBox { s_lo, s_hi, t_lo: key.1 as f64 * w, t_hi: (key.1 + 1) as f64 * w }
    }

    /// Union of a cell with all its descendants, down to the sphere.
    pub fn tent(&self, key: CellKey) -> PolarBox {
        let mut b = self.cell(key);
        b.s_lo = 0.0;
        b
    }

    pub fn center(&self, key: CellKey) -> PolarPoint {
        if key.0 == 0 {
            return PolarPoint::origin();
        }
        let rho = self.lambda() * (key.0 as f64 + 0.5);
        PolarPoint::at_depth((key.1 as f64 + 0.5) * self.width(key.0), rho)
    }

    pub fn normalize(&self, key: CellKey) -> CellKey {
        match self.count_exact(key.0) {
            Some(j) => (key.0, key.1.rem_euclid(j)),
            None => key,
        }
    }

    pub fn parent(&self, key: CellKey) -> Option<CellKey> {
        if key.0 == 0 {
            return None;
        }
        let shift = self.exponent(key.0) - self.exponent(key.0 - 1);
        Some((key.0 - 1, key.1 >> shift))
    }

    pub fn children(&self, key: CellKey) -> Vec<CellKey> {
        let shift = self.exponent(key.0 + 1) - self.exponent(key.0);
        let base = if key.0 == 0 { 0 } else { key.1 << shift };
        let k = if key.0 == 0 { self.count_exact(1).unwrap_or(1) } else { 1i64 << shift };
        (0..k).map(|i| (key.0 + 1, base + i)).collect()
    }

    /// Level containing a point, from its defect.
    pub fn level_of(&self, s: f64) -> usize {
        let lam = self.lambda();
        let mut level = (PolarPoint::new(s, 0.0).depth() / lam).floor().max(0.0) as usize;
        while level > 0 && s > self.band(level).1 {
            level -= 1;
        }
        while s <= self.band(level).0 {
            level += 1;
        }
        level
    }

    pub fn locate(&self, p: &PolarPoint) -> CellKey {
        let level = self.level_of(p.s);
        if level == 0 {
            return (0, 0);
        }
        let w = self.width(level);
        self.normalize((level, (p.t / w).floor() as i64))
    }

    /// Cells meeting the closed Bergman ball `D(c, R)`, addressed relative
    /// to `c`'s angle (no wrapping at levels with more than `2^61` cells).
    pub fn ball_cells(&self, c: &PolarPoint, radius: f64) -> Vec<CellKey> {
        let lam = self.lambda();
        let rho = c.depth();
        let first = ((rho - radius) / lam).floor().max(0.0) as usize;
        let last = ((rho + radius) / lam).floor() as usize;
        let mut out = Vec::new();
        for level in first..=last {
            if level == 0 {
                if box_min_distance(c, &self.cell((0, 0))) <= radius {
                    out.push((0, 0));
                }
                continue;
            }
            let w = self.width(level);
            let j0 = (c.t / w).floor() as i64;
            let total = self.count_exact(level);
            let half = total.map(|j| j / 2 + 1).unwrap_or(i64::MAX);
            let mut level_cells = Vec::new();
            for dir in [1i64, -1] {
                let mut k = if dir == 1 { 0 } else { 1 };
                while k <= half {
                    let key = (level, j0 + dir * k);
                    if box_min_distance(c, &self.cell(key)) > radius {
                        break;
                    }
                    level_cells.push(key);
                    k += 1;
                }
            }
            if let Some(j) = total {
                let mut seen: Vec<i64> = Vec::new();
                for key in level_cells {
                    let r = key.1.rem_euclid(j);
                    if !seen.contains(&r) {
                        seen.push(r);
                        out.push(key);
                    }
                }
            } else {
                out.extend(level_cells);
            }
        }
        out
    }

    /// `Q = (∪_{ω ∈ N^{6λ}} K_ω) ∪ (∪_{children} K_β)` as cell keys.
    pub fn q_cells(&self, key: CellKey) -> Vec<CellKey> {
        let c = self.center(key);
        let mut cells = self.ball_cells(&c, 6.0 * self.lambda());
        for ch in self.children(key) {
            if !self.contains_key(&cells, ch) {
                cells.push(ch);
            }
        }
        cells
    }

    pub fn contains_key(&self, cells: &[CellKey], key: CellKey) -> bool {
        let k = self.normalize(key);
        cells.iter().any(|&c| self.normalize(c) == k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::distance;

    #[test]
    fn counts_double_per_level() {
        let g = DyadicGrid::new(1);
        assert_eq!(g.count_exact(0), Some(1));
        assert_eq!(g.count_exact(1), Some(2));
        assert_eq!(g.count_exact(5), Some(32));
        let g3 = DyadicGrid::new(3);
        assert_eq!(g3.exponent(4), 1);
        assert_eq!(g3.exponent(5), 2);
        assert_eq!(g3.exponent(512), 128);
    }

    #[test]
    fn centers_and_parents() {
        let g = DyadicGrid::new(1);
        for level in 1..10 {
            let j = g.count_exact(level).unwrap();
            for idx in [0, j / 3, j - 1] {
                let key = (level, idx);
                let c = g.center(key);
                assert_eq!(g.locate(&c), key);
                let d0 = c.depth();
                assert!((d0 - g.lambda() * (level as f64 + 0.5)).abs() < 1e-12);
                let parent = g.parent(key).unwrap();
                assert!(g.children(parent).contains(&key));
            }
        }
        assert_eq!(g.children((0, 0)).len(), 2);
    }

    #[test]
    fn ball_cells_contain_nearby_cells() {
        let g = DyadicGrid::new(3);
        let key = (30, 5);
        let c = g.center(key);
        let cells = g.ball_cells(&c, 6.0 * g.lambda());
        assert!(g.contains_key(&cells, key));
        // Every listed cell really meets the ball; a sample of unlisted
        // points at matching depths lies outside it.
        for &k in &cells {
            let b = g.cell(k);
            assert!(box_min_distance(&c, &b) <= 6.0 * g.lambda());
        }
        let far = PolarPoint::new(c.s, c.t + 0.25);
        assert!(distance(&c, &far) > 6.0 * g.lambda());
        assert!(!g.contains_key(&cells, g.locate(&far)));
    }
}
