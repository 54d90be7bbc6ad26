//! Integration against `dv_γ` and `dτ` over the ball, polar boxes and unions
//! of tree cells.
//!
//! For `n = 1` every region is a signed list of polar boxes in the
//! coordinates `s = 1 − |z|²` and `t = θ/2π`, on which
//! `dv_γ = (γ+1) s^γ ds dt`. Radial rules are Gauss–Jacobi when the box
//! reaches the sphere and graded Gauss–Legendre panels otherwise; angular
//! rules are periodic trapezoid on full turns and Gauss–Legendre on arcs.
//! For `n ≥ 2` the radial variable is integrated by Gauss rules and the
//! direction by seeded Monte Carlo.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::geometry::{random_direction, BallPoint};
use crate::special::{gauss_jacobi_unit, gauss_legendre_unit, ln_gamma};
use crate::tree::BergmanTree;

type C64 = Complex64;

/// The probability measure `dv_γ = c_γ (1−|z|²)^γ dv` on the ball in `C^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedMeasure {
    pub n: usize,
    pub gamma: f64,
}

impl WeightedMeasure {
    pub fn new(n: usize, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if !(gamma > -1.0) {
            return Err(Error::Domain(format!("gamma = {gamma} must exceed -1")));
        }
        Ok(Self { n, gamma })
    }

    /// `c_γ = Γ(n+1+γ)/(π^n Γ(γ+1))`, relative to Lebesgue volume.
    pub fn c_gamma(&self) -> f64 {
        let nf = self.n as f64;
        (ln_gamma(nf + 1.0 + self.gamma) - ln_gamma(self.gamma + 1.0) - nf * PI.ln()).exp()
    }

    /// `n + 1 + γ`, the kernel exponent.
    pub fn kernel_exponent(&self) -> f64 {
        self.n as f64 + 1.0 + self.gamma
    }

    /// `v_γ({s_lo ≤ 1−|z|² ≤ s_hi})`.
    pub fn shell_mass(&self, s_lo: f64, s_hi: f64) -> f64 {
        if self.n == 1 {
            let e = self.gamma + 1.0;
            return s_hi.powf(e) - s_lo.powf(e);
        }
        let (a, b) = (self.gamma + 1.0, self.n as f64);
        let hi = if s_hi >= 1.0 { 1.0 } else { beta_reg(a, b, s_hi) };
        let lo = if s_lo <= 0.0 { 0.0 } else { beta_reg(a, b, s_lo) };
        hi - lo
    }
}

/// `m_k = ∫ |z|^{2k} dv_γ = k! Γ(γ+2)/Γ(k+γ+2)` on the disc.
pub fn moment(k: u32, gamma: f64) -> f64 {
    if k <= 256 {
        return (1..=k).map(|i| i as f64 / (i as f64 + gamma + 1.0)).product();
    }
    let kf = k as f64;
    (ln_gamma(kf + 1.0) + ln_gamma(gamma + 2.0) - ln_gamma(kf + gamma + 2.0)).exp()
}

/// `m_k` for real `k ≥ 0`.
pub fn moment_real(k: f64, gamma: f64) -> f64 {
    (ln_gamma(k + 1.0) + ln_gamma(gamma + 2.0) - ln_gamma(k + gamma + 2.0)).exp()
}

/// `∫ |z^α|² dv_γ = α! Γ(n+1+γ)/Γ(n+1+γ+|α|)` on the ball in `C^n`.
pub fn moment_multi(alpha: &[u32], gamma: f64) -> f64 {
    let nf = alpha.len() as f64;
    let tot: u32 = alpha.iter().sum();
    if tot <= 256 {
        let fact: f64 = alpha.iter().flat_map(|&a| 1..=a).map(|i| i as f64).product();
        return (0..tot).fold(fact, |acc, j| acc / (nf + 1.0 + gamma + j as f64));
    }
    let lf: f64 = alpha.iter().map(|&a| ln_gamma(a as f64 + 1.0)).sum();
    (lf + ln_gamma(nf + 1.0 + gamma) - ln_gamma(nf + 1.0 + gamma + tot as f64)).exp()
}

/// `⟨z^a z̄^b, z^c z̄^d⟩` in `L²(dv_γ)` on the disc.
pub fn monomial_inner(a: u32, b: u32, c: u32, d: u32, gamma: f64) -> C64 {
    if a + d == b + c {
        C64::new(moment(a + d, gamma), 0.0)
    } else {
        C64::new(0.0, 0.0)
    }
}

/// `{s_lo ≤ 1−|z|² ≤ s_hi, t_lo ≤ θ/2π ≤ t_hi}` in the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarBox {
    pub s_lo: f64,
    pub s_hi: f64,
    pub t_lo: f64,
    pub t_hi: f64,
}

fn turns_of(z: C64) -> f64 {
    let t = z.arg() / (2.0 * PI);
    if t < 0.0 {
        t + 1.0
    } else {
        t
    }
}

impl PolarBox {
    pub fn new(s_lo: f64, s_hi: f64, t_lo: f64, t_hi: f64) -> Result<Self> {
        if !(0.0 <= s_lo && s_lo < s_hi && s_hi <= 1.0) {
            return Err(Error::Domain(format!("defect interval [{s_lo}, {s_hi}] invalid")));
        }
        if !(t_lo < t_hi && t_hi - t_lo <= 1.0) {
            return Err(Error::Domain(format!("angular interval [{t_lo}, {t_hi}] invalid")));
        }
        Ok(Self { s_lo, s_hi, t_lo, t_hi })
    }

    pub fn full_turn(&self) -> bool {
        self.t_hi - self.t_lo >= 1.0 - 1e-15
    }

    pub fn mass(&self, gamma: f64) -> f64 {
        (self.t_hi - self.t_lo) * (self.s_hi.powf(gamma + 1.0) - self.s_lo.powf(gamma + 1.0))
    }

    /// Half-open membership `s ∈ (s_lo, s_hi]`, `t ∈ [t_lo, t_hi)`.
    pub fn contains(&self, z: &BallPoint) -> bool {
        let s = z.defect();
        if !(s > self.s_lo && s <= self.s_hi) && !(self.s_hi >= 1.0 && s >= 1.0) {
            return false;
        }
        if self.full_turn() {
            return true;
        }
        let t = turns_of(z.coords()[0]);
        let shifted = t - (t - self.t_lo).floor();
        shifted < self.t_hi
    }

    fn intersect(&self, other: &PolarBox) -> Option<PolarBox> {
        let s_lo = self.s_lo.max(other.s_lo);
        let s_hi = self.s_hi.min(other.s_hi);
        if s_lo >= s_hi {
            return None;
        }
        if self.full_turn() {
            return Some(PolarBox { s_lo, s_hi, ..*other });
        }
        if other.full_turn() {
            return Some(PolarBox { s_lo, s_hi, ..*self });
        }
        for shift in [-1.0, 0.0, 1.0] {
            let lo = self.t_lo.max(other.t_lo + shift);
            let hi = self.t_hi.min(other.t_hi + shift);
            if lo < hi {
                return Some(PolarBox { s_lo, s_hi, t_lo: lo, t_hi: hi });
            }
        }
        None
    }

    /// Quadrature nodes `(s, t, weight)` for `dv_γ` on the box.
    pub fn nodes(&self, gamma: f64, radial: usize, angular: usize) -> Vec<(f64, f64, f64)> {
        let radial_nodes = defect_nodes(self.s_lo, self.s_hi, gamma, radial);
        let angular_nodes: Vec<(f64, f64)> = if self.full_turn() {
            (0..angular).map(|k| (self.t_lo + k as f64 / angular as f64, 1.0 / angular as f64)).collect()
        } else {
            let gl = gauss_legendre_unit(angular);
            let h = self.t_hi - self.t_lo;
            gl.nodes.iter().zip(&gl.weights).map(|(&x, &w)| (self.t_lo + h * x, h * w)).collect()
        };
        let mut out = Vec::with_capacity(radial_nodes.len() * angular_nodes.len());
        for &(s, ws) in &radial_nodes {
            for &(t, wt) in &angular_nodes {
                out.push((s, t, ws * wt));
            }
        }
        out
    }
}

/// Nodes and weights for `(γ+1) s^γ ds` on `[s_lo, s_hi]`: Gauss–Jacobi on
/// `[0, s_hi]` when `s_lo = 0`, otherwise Gauss–Legendre on panels whose
/// endpoints differ by at most a factor 2.
pub fn defect_nodes(s_lo: f64, s_hi: f64, gamma: f64, order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if s_lo <= 0.0 {
        let gj = gauss_jacobi_unit(order, gamma, 0.0);
        let scale = (gamma + 1.0) * s_hi.powf(gamma + 1.0);
        for (&x, &w) in gj.nodes.iter().zip(&gj.weights) {
            out.push((s_hi * x, scale * w));
        }
        return out;
    }
    let panels = ((s_hi / s_lo).log2().ceil() as usize).max(1);
    let ratio = (s_hi / s_lo).powf(1.0 / panels as f64);
    let gl = gauss_legendre_unit(order);
    let mut a = s_lo;
    for k in 0..panels {
        let b = if k + 1 == panels { s_hi } else { a * ratio };
        let h = b - a;
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let s = a + h * x;
            out.push((s, h * w * (gamma + 1.0) * s.powf(gamma)));
        }
        a = b;
    }
    out
}

/// A union of tree cells.
#[derive(Debug, Clone)]
pub struct CellUnion {
    pub tree: Arc<BergmanTree>,
    pub ids: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum Region {
    /// `|z| ≤ 1 − ε`; `ε = 0` is the whole ball.
    Ball {
        eps: f64,
    },
    /// `s_lo ≤ 1 − |z|² ≤ s_hi`.
    Shell {
        s_lo: f64,
        s_hi: f64,
    },
    /// Polar box (`n = 1`).
    Box(PolarBox),
    Cells(CellUnion),
    /// Disjoint union.
    Union(Vec<Region>),
    /// Set difference.
    Minus(std::boxed::Box<Region>, std::boxed::Box<Region>),
}

impl Region {
    pub fn empty() -> Self {
        Region::Union(Vec::new())
    }

    fn ball_defect(eps: f64) -> f64 {
        if eps <= 0.0 {
            0.0
        } else {
            eps * (2.0 - eps)
        }
    }

    pub fn contains(&self, z: &BallPoint) -> bool {
        match self {
            Region::Ball { eps } => z.defect() >= Self::ball_defect(*eps),
            Region::Shell { s_lo, s_hi } => z.defect() >= *s_lo && z.defect() <= *s_hi,
            Region::Box(b) => b.contains(z),
            Region::Cells(c) => match c.tree.locate(z) {
                Ok(id) => c.ids.contains(&id),
                Err(_) => false,
            },
            Region::Union(parts) => parts.iter().any(|r| r.contains(z)),
            Region::Minus(a, b) => a.contains(z) && !b.contains(z),
        }
    }

    /// Signed polar-box decomposition (`n = 1`).
    pub fn signed_boxes(&self) -> Result<Vec<(PolarBox, f64)>> {
        Ok(match self {
            Region::Ball { eps } => {
                vec![(PolarBox { s_lo: Self::ball_defect(*eps), s_hi: 1.0, t_lo: 0.0, t_hi: 1.0 }, 1.0)]
            }
            Region::Shell { s_lo, s_hi } => {
                vec![(PolarBox { s_lo: *s_lo, s_hi: *s_hi, t_lo: 0.0, t_hi: 1.0 }, 1.0)]
            }
            Region::Box(b) => vec![(*b, 1.0)],
            Region::Cells(c) => {
                let mut out = Vec::with_capacity(c.ids.len());
                for &id in &c.ids {
                    let b = c
                        .tree
                        .cell_box(id)
                        .ok_or_else(|| Error::Domain("polar boxes exist only for n = 1 trees".into()))?;
                    out.push((b, 1.0));
                }
                out
            }
            Region::Union(parts) => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.signed_boxes()?);
                }
                out
            }
            Region::Minus(a, b) => {
                let pa = a.signed_boxes()?;
                let pb = b.signed_boxes()?;
                let mut out = pa.clone();
                for (x, sx) in &pa {
                    for (y, sy) in &pb {
                        if let Some(i) = x.intersect(y) {
                            out.push((i, -sx * sy));
                        }
                    }
                }
                out
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_order: usize,
    pub angular_order: usize,
    pub samples: usize,
    pub seed: u64,
    pub target_rel_error: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { radial_order: 16, angular_order: 40, samples: 4096, seed: 0, target_rel_error: 1e-10 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_order < 4 || self.angular_order < 4 {
            return Err(Error::Config("quadrature orders must be at least 4".into()));
        }
        if !(self.target_rel_error > 0.0) {
            return Err(Error::Config("target error must be positive".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("sample count must be positive".into()));
        }
        Ok(())
    }

    pub fn refined(&self) -> Self {
        Self {
            radial_order: 2 * self.radial_order,
            angular_order: 2 * self.angular_order,
            samples: 2 * self.samples,
            ..*self
        }
    }
}

/// Integral value with an error estimate; `std_error` is set for Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: C64,
    pub error: f64,
    pub std_error: Option<f64>,
}

fn checked(v: C64, z: &BallPoint) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { point: format!("{:?}", z.coords()) })
    }
}

fn integrate_boxes<F: Fn(&BallPoint) -> C64>(
    f: &F,
    boxes: &[(PolarBox, f64)],
    gamma: f64,
    radial: usize,
    angular: usize,
) -> Result<C64> {
    let mut total = C64::new(0.0, 0.0);
    for (b, sign) in boxes {
        let mut part = C64::new(0.0, 0.0);
        for (s, t, w) in b.nodes(gamma, radial, angular) {
            let z = BallPoint::disc_from_defect(s, 2.0 * PI * t)?;
            part += checked(f(&z), &z)? * w;
        }
        total += part * *sign;
    }
    Ok(total)
}

/// Radial nodes `(s, weight)` for `|z|²`-distribution `Beta(n, γ+1)`
/// restricted to a defect shell, as a fraction of total `dv_γ` mass.
fn shell_radial_nodes(m: &WeightedMeasure, s_lo: f64, s_hi: f64, order: usize) -> Vec<(f64, f64)> {
    // density of s: (γ+1)-normalized s^γ (1−s)^{n−1} / B(γ+1, n)
    let nf = m.n as f64;
    let norm = (ln_gamma(m.gamma + 1.0 + nf) - ln_gamma(m.gamma + 1.0) - ln_gamma(nf)).exp();
    if s_lo <= 0.0 && s_hi >= 1.0 {
        let gj = gauss_jacobi_unit(order, m.gamma, nf - 1.0);
        return gj.nodes.iter().zip(&gj.weights).map(|(&s, &w)| (s, w * norm)).collect();
    }
    defect_nodes(s_lo, s_hi, m.gamma, order)
        .into_iter()
        .map(|(s, w)| (s, w / (m.gamma + 1.0) * norm * (1.0 - s).powf(nf - 1.0)))
        .collect()
}

fn mc_shell<F: Fn(&BallPoint) -> C64>(
    f: &F,
    m: &WeightedMeasure,
    s_lo: f64,
    s_hi: f64,
    q: &QuadratureSpec,
    filter: &dyn Fn(&BallPoint) -> bool,
) -> Result<(C64, f64)> {
    let radial = shell_radial_nodes(m, s_lo, s_hi, q.radial_order);
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let mut sum = C64::new(0.0, 0.0);
    let mut sum_sq = 0.0;
    for _ in 0..q.samples {
        let dir = random_direction(&mut rng, m.n);
        let mut acc = C64::new(0.0, 0.0);
        for &(s, w) in &radial {
            let r = (1.0 - s).sqrt();
            let coords = dir.iter().map(|c| c * r).collect();
            let z = BallPoint::with_defect(coords, s.max(f64::MIN_POSITIVE))?;
            if filter(&z) {
                acc += checked(f(&z), &z)? * w;
            }
        }
        sum += acc;
        sum_sq += acc.norm_sqr();
    }
    let k = q.samples as f64;
    let mean = sum / k;
    let var = (sum_sq / k - mean.norm_sqr()).max(0.0);
    Ok((mean, (var / (k - 1.0).max(1.0)).sqrt()))
}

fn integrate_mc<F: Fn(&BallPoint) -> C64>(
    f: &F,
    region: &Region,
    m: &WeightedMeasure,
    q: &QuadratureSpec,
) -> Result<(C64, f64)> {
    match region {
        Region::Ball { eps } => mc_shell(f, m, Region::ball_defect(*eps), 1.0, q, &|_| true),
        Region::Shell { s_lo, s_hi } => mc_shell(f, m, *s_lo, *s_hi, q, &|_| true),
        Region::Box(_) => Err(Error::Domain("polar boxes need n = 1".into())),
        Region::Cells(c) => {
            // Stratify by level: one shell per level, directions filtered by cell.
            let mut levels: Vec<usize> = c.ids.iter().map(|&id| c.tree.node(id).level).collect();
            levels.sort_unstable();
            levels.dedup();
            let mut total = C64::new(0.0, 0.0);
            let mut var = 0.0;
            for level in levels {
                let (s_lo, s_hi) = c.tree.level_band(level);
                let spec = QuadratureSpec { seed: q.seed.wrapping_add(level as u64), ..*q };
                let ids = &c.ids;
                let tree = &c.tree;
                let (v, se) = mc_shell(f, m, s_lo, s_hi, &spec, &|z| {
                    tree.locate(z).map(|id| ids.contains(&id)).unwrap_or(false)
                })?;
                total += v;
                var += se * se;
            }
            Ok((total, var.sqrt()))
        }
        Region::Union(parts) => {
            let mut total = C64::new(0.0, 0.0);
            let mut var = 0.0;
            for p in parts {
                let (v, se) = integrate_mc(f, p, m, q)?;
                total += v;
                var += se * se;
            }
            Ok((total, var.sqrt()))
        }
        Region::Minus(a, b) => {
            let (s_lo, s_hi) = (0.0, 1.0);
            let bb = b.as_ref();
            let aa = a.as_ref();
            mc_shell(f, m, s_lo, s_hi, q, &|z| aa.contains(z) && !bb.contains(z))
        }
    }
}

/// `∫_region f dv_γ`.
///
/// For `n = 1` the error is `|I(q) − I(q.refined())|`; for `n ≥ 2` it is the
/// half-width of the 95% confidence interval.
pub fn integrate<F: Fn(&BallPoint) -> C64>(
    f: F,
    region: &Region,
    m: &WeightedMeasure,
    q: &QuadratureSpec,
) -> Result<Integral> {
    q.validate()?;
    if m.n == 1 {
        let boxes = region.signed_boxes()?;
        let base = integrate_boxes(&f, &boxes, m.gamma, q.radial_order, q.angular_order)?;
        let fine = q.refined();
        let refined = integrate_boxes(&f, &boxes, m.gamma, fine.radial_order, fine.angular_order)?;
        return Ok(Integral { value: base, error: (base - refined).norm(), std_error: None });
    }
    let (value, se) = integrate_mc(&f, region, m, q)?;
    Ok(Integral { value, error: 1.96 * se, std_error: Some(se) })
}

/// `v_γ(region)`.
pub fn volume(region: &Region, m: &WeightedMeasure, q: &QuadratureSpec) -> Result<Integral> {
    if m.n == 1 {
        let v: f64 = region.signed_boxes()?.iter().map(|(b, s)| s * b.mass(m.gamma)).sum();
        return Ok(Integral { value: C64::new(v, 0.0), error: 0.0, std_error: None });
    }
    match region {
        Region::Ball { eps } => {
            let v = m.shell_mass(Region::ball_defect(*eps), 1.0);
            Ok(Integral { value: C64::new(v, 0.0), error: 0.0, std_error: None })
        }
        Region::Shell { s_lo, s_hi } => {
            Ok(Integral { value: C64::new(m.shell_mass(*s_lo, *s_hi), 0.0), error: 0.0, std_error: None })
        }
        _ => integrate(|_| C64::new(1.0, 0.0), region, m, q),
    }
}

/// `τ(region)` for `dτ = (1−|z|²)^{−n−1} dv` with Lebesgue `dv`.
pub fn tau_measure(region: &Region, n: usize, q: &QuadratureSpec) -> Result<f64> {
    if n == 1 {
        let mut total = 0.0;
        for (b, sign) in region.signed_boxes()? {
            if b.s_lo <= 0.0 {
                return Err(Error::Divergent("region reaches the sphere; tau diverges".into()));
            }
            total += sign * PI * (b.t_hi - b.t_lo) * (1.0 / b.s_lo - 1.0 / b.s_hi);
        }
        return Ok(total);
    }
    let nf = n as f64;
    let vol = PI.powf(nf) / ln_gamma(nf).exp();
    let shell_tau = |s_lo: f64, s_hi: f64| -> f64 {
        let gl = gauss_legendre_unit(q.radial_order.max(16));
        let panels = ((s_hi / s_lo).log2().ceil() as usize).max(1);
        let ratio = (s_hi / s_lo).powf(1.0 / panels as f64);
        let mut a = s_lo;
        let mut acc = 0.0;
        for _ in 0..panels {
            let b = a * ratio;
            acc += (b - a)
                * gl.integrate(|x| {
                    let s = a + (b - a) * x;
                    (1.0 - s).powf(nf - 1.0) * s.powf(-nf - 1.0)
                });
            a = b;
        }
        vol * acc
    };
    match region {
        Region::Ball { eps } => {
            if *eps <= 0.0 {
                return Err(Error::Divergent("whole ball has infinite tau measure".into()));
            }
            Ok(shell_tau(Region::ball_defect(*eps), 1.0))
        }
        Region::Shell { s_lo, s_hi } => {
            if *s_lo <= 0.0 {
                return Err(Error::Divergent("shell reaches the sphere; tau diverges".into()));
            }
            Ok(shell_tau(*s_lo, *s_hi))
        }
        Region::Union(parts) => parts.iter().map(|p| tau_measure(p, n, q)).sum(),
        _ => {
            // Weighted by (1−|z|²)^{−n−1−γ}/c_γ under dv_γ with γ = 0.
            let m = WeightedMeasure::new(n, 0.0)?;
            let c0 = m.c_gamma();
            let v = integrate(|z| C64::new(z.defect().powf(-nf - 1.0) / c0, 0.0), region, &m, q)?;
            Ok(v.value.re)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: &BallPoint) -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn moments_and_inner_products() {
        assert!((moment(0, 0.7) - 1.0).abs() < 1e-15);
        assert!((moment(2, 0.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((moment(1, 1.0) - 1.0 / 3.0).abs() < 1e-15);
        for k in 0..40 {
            assert!(moment(k + 1, 0.5) < moment(k, 0.5));
        }
        assert_eq!(monomial_inner(1, 0, 0, 1, 0.0), C64::new(0.0, 0.0));
        assert!((monomial_inner(2, 1, 1, 0, 0.0).re - 1.0 / 3.0).abs() < 1e-15);
        let m = WeightedMeasure::new(1, 0.0).unwrap();
        assert!((m.c_gamma() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn ball_integrals() {
        let m = WeightedMeasure::new(1, 0.0).unwrap();
        let q = QuadratureSpec::default();
        let whole = Region::Ball { eps: 0.0 };
        assert!((integrate(one, &whole, &m, &q).unwrap().value.re - 1.0).abs() < 1e-14);
        let v = integrate(|z| C64::new(z.norm_sq(), 0.0), &whole, &m, &q).unwrap();
        assert!((v.value.re - 0.5).abs() < 1e-14 && v.error < 1e-14);
        let odd = integrate(|z| z.coords()[0].powu(3), &whole, &m, &q).unwrap();
        assert!(odd.value.norm() < 1e-14);
    }

    #[test]
    fn monomials_are_exact() {
        for &gamma in &[0.0, 1.0, 2.5, -0.5] {
            let m = WeightedMeasure::new(1, gamma).unwrap();
            let q = QuadratureSpec { radial_order: 8, angular_order: 34, ..Default::default() };
            let whole = Region::Ball { eps: 0.0 };
            for a in 0..16u32 {
                for b in 0..16u32 {
                    let v = integrate(
                        |z| {
                            let w = z.coords()[0];
                            w.powu(a) * w.conj().powu(b)
                        },
                        &whole,
                        &m,
                        &q,
                    )
                    .unwrap();
                    let want = monomial_inner(a, b, 0, 0, gamma);
                    assert!((v.value - want).norm() < 1e-12, "γ={gamma} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn additivity_over_boxes() {
        let m = WeightedMeasure::new(1, 1.5).unwrap();
        let q = QuadratureSpec::default();
        let f = |z: &BallPoint| {
            let w = z.coords()[0];
            w * w.conj().powu(2) + C64::new(z.defect(), 0.0)
        };
        let a = PolarBox::new(0.2, 0.5, 0.1, 0.35).unwrap();
        let b = PolarBox::new(0.2, 0.5, 0.35, 0.8).unwrap();
        let ab = PolarBox::new(0.2, 0.5, 0.1, 0.8).unwrap();
        let ia = integrate(f, &Region::Box(a), &m, &q).unwrap().value;
        let ib = integrate(f, &Region::Box(b), &m, &q).unwrap().value;
        let iab = integrate(f, &Region::Box(ab), &m, &q).unwrap().value;
        assert!((ia + ib - iab).norm() < 1e-12);
        let minus = Region::Minus(Box::new(Region::Box(ab)), Box::new(Region::Box(b)));
        let im = integrate(f, &minus, &m, &q).unwrap().value;
        assert!((im - ia).norm() < 1e-12);
    }

    #[test]
    fn tau_closed_form() {
        let q = QuadratureSpec::default();
        let r = Region::Ball { eps: 1.0 - 0.5f64.sqrt() };
        assert!((tau_measure(&r, 1, &q).unwrap() - PI).abs() < 1e-12);
        assert_eq!(tau_measure(&Region::empty(), 1, &q).unwrap(), 0.0);
        assert!(tau_measure(&Region::Ball { eps: 0.0 }, 1, &q).is_err());
        // n = 2: τ(|z|² < 1/2) = π² ∫_0^{1/2} t (1−t)^{−3} dt = π²/2.
        let got = tau_measure(&Region::Shell { s_lo: 0.5, s_hi: 1.0 }, 2, &q).unwrap();
        assert!((got - PI * PI / 2.0).abs() < 1e-10, "{got}");
    }

    #[test]
    fn monte_carlo_moments_n2() {
        let m = WeightedMeasure::new(2, 0.5).unwrap();
        let q = QuadratureSpec { samples: 20_000, seed: 3, ..Default::default() };
        for alpha in [[1u32, 0], [1, 1], [2, 1], [0, 3]] {
            let v = integrate(
                |z| {
                    let c = z.coords();
                    C64::new(c[0].norm_sqr().powi(alpha[0] as i32) * c[1].norm_sqr().powi(alpha[1] as i32), 0.0)
                },
                &Region::Ball { eps: 0.0 },
                &m,
                &q,
            )
            .unwrap();
            let want = moment_multi(&alpha, 0.5);
            let se = v.std_error.unwrap();
            assert!((v.value.re - want).abs() <= 3.0 * se + 1e-14, "{alpha:?}: {} vs {want} ± {se}", v.value.re);
        }
    }

    #[test]
    fn shell_mass_matches_quadrature() {
        let m = WeightedMeasure::new(3, 1.0).unwrap();
        let q = QuadratureSpec::default();
        let want = m.shell_mass(0.1, 0.4);
        let nodes = shell_radial_nodes(&m, 0.1, 0.4, 20);
        let got: f64 = nodes.iter().map(|p| p.1).sum();
        assert!((got - want).abs() < 1e-13);
        let v = volume(&Region::Ball { eps: 0.0 }, &m, &q).unwrap().value.re;
        assert!((v - 1.0).abs() < 1e-14);
    }
}
