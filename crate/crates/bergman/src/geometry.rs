//! Points of the unit ball, the Bergman metric, Möbius automorphisms and the
//! non-isotropic boundary metric.
//!
//! A [`BallPoint`] carries `1 − |z|²` alongside its coordinates. Every
//! operation that produces a point close to the sphere computes that defect
//! from an exact identity rather than from the coordinates, so distances stay
//! accurate at depths where `|z|` rounds to one.

use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{atanh_with_defect, gauss_legendre_unit, ln_gamma};

pub type C64 = Complex64;

/// Points within this distance of the sphere count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    coords: Vec<C64>,
    norm: f64,
    defect: f64,
    boundary: bool,
}

pub(crate) fn dot(z: &[C64], w: &[C64]) -> C64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub(crate) fn norm_sq(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum()
}

fn check_dims(z: &BallPoint, w: &BallPoint) -> Result<()> {
    if z.dim() != w.dim() {
        return Err(Error::DimensionMismatch(z.dim(), w.dim()));
    }
    Ok(())
}

impl BallPoint {
    /// Interior point; fails unless `|z| < 1`.
    pub fn new(coords: Vec<C64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("a point needs at least one coordinate".into()));
        }
        if coords.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        let ns = norm_sq(&coords);
        if ns >= 1.0 {
            return Err(Error::Domain(format!("|z|^2 = {ns} is not inside the ball")));
        }
        Ok(Self { norm: ns.sqrt(), defect: 1.0 - ns, coords, boundary: false })
    }

    /// Interior point whose defect `1 − |z|²` is known more accurately than
    /// the coordinates can express.
    pub fn with_defect(coords: Vec<C64>, defect: f64) -> Result<Self> {
        if !(defect > 0.0 && defect <= 1.0) {
            return Err(Error::Domain(format!("defect {defect} outside (0, 1]")));
        }
        let ns = norm_sq(&coords);
        if (1.0 - ns - defect).abs() > 1e-12 {
            return Err(Error::Domain(format!("defect {defect} inconsistent with |z|^2 = {ns}")));
        }
        let norm = (1.0 - defect).sqrt();
        Ok(Self { coords, norm, defect, boundary: false })
    }

    /// Boundary point; fails unless `||z| − 1| ≤ 1e-14`.
    pub fn boundary(coords: Vec<C64>) -> Result<Self> {
        let n = norm_sq(&coords).sqrt();
        if (n - 1.0).abs() > BOUNDARY_TOL {
            return Err(Error::Domain(format!("|u| = {n} is not on the sphere")));
        }
        Ok(Self { coords, norm: 1.0, defect: 0.0, boundary: true })
    }

    /// Unit vector `z/|z|` as a boundary point (normalizes exactly).
    pub fn boundary_from_direction(coords: &[C64]) -> Result<Self> {
        let n = norm_sq(coords).sqrt();
        if n == 0.0 {
            return Err(Error::Domain("zero vector has no direction".into()));
        }
        Ok(Self { coords: coords.iter().map(|c| c / n).collect(), norm: 1.0, defect: 0.0, boundary: true })
    }

    pub fn origin(n: usize) -> Self {
        Self { coords: vec![C64::new(0.0, 0.0); n], norm: 0.0, defect: 1.0, boundary: false }
    }

    /// `n = 1` point `√(1−s)·e^{iθ}` given its defect `s`.
    pub fn disc_from_defect(defect: f64, theta: f64) -> Result<Self> {
        if !(defect > 0.0 && defect <= 1.0) {
            return Err(Error::Domain(format!("defect {defect} outside (0, 1]")));
        }
        let r = (1.0 - defect).sqrt();
        Ok(Self { coords: vec![C64::from_polar(r, theta)], norm: r, defect, boundary: false })
    }

    /// `n = 1` convenience constructor.
    pub fn disc(re: f64, im: f64) -> Result<Self> {
        Self::new(vec![C64::new(re, im)])
    }

    /// The point `tanh(r)·ζ` for a unit vector `ζ`, with exact defect.
    pub fn at_bergman_radius(direction: &[C64], r: f64) -> Self {
        let t = r.tanh();
        let e = (-2.0 * r).exp();
        let defect = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let mut norm = t;
        let coords: Vec<C64> = direction.iter().map(|c| c * t).collect();
        if r == 0.0 {
            norm = 0.0;
        }
        Self { coords, norm, defect: if r == 0.0 { 1.0 } else { defect }, boundary: false }
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn norm_sq(&self) -> f64 {
        1.0 - self.defect
    }

    /// `1 − |z|²`, zero for boundary points.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// `1 − |z|`, accurate near the sphere.
    pub fn one_minus_norm(&self) -> f64 {
        self.defect / (1.0 + self.norm)
    }

    pub fn is_boundary(&self) -> bool {
        self.boundary
    }

    /// `z/|z|`; `None` at the origin.
    pub fn direction(&self) -> Option<Vec<C64>> {
        if self.norm == 0.0 {
            return None;
        }
        Some(self.coords.iter().map(|c| c / self.norm).collect())
    }

    /// Bergman distance to the origin, `atanh |z|`.
    pub fn radius(&self) -> f64 {
        atanh_with_defect(self.norm, self.defect)
    }

    fn require_interior(&self, what: &str) -> Result<()> {
        if self.boundary {
            return Err(Error::Domain(format!("{what} needs interior points")));
        }
        Ok(())
    }
}

/// `z · w = Σ z_i conj(w_i)`.
pub fn herm_dot(z: &BallPoint, w: &BallPoint) -> Result<C64> {
    check_dims(z, w)?;
    Ok(dot(z.coords(), w.coords()))
}

/// `1 − w·z`, evaluated through `w − z` so that nearby points keep precision.
pub(crate) fn one_minus_dot(z: &BallPoint, w: &BallPoint) -> C64 {
    let delta: Vec<C64> = w.coords.iter().zip(&z.coords).map(|(a, b)| a - b).collect();
    C64::new(z.defect, 0.0) - dot(&delta, &z.coords)
}

/// `|φ_z(w)|²` and `1 − |φ_z(w)|²`.
fn mobius_modulus(z: &BallPoint, w: &BallPoint) -> (f64, f64) {
    let delta: Vec<C64> = w.coords.iter().zip(&z.coords).map(|(a, b)| a - b).collect();
    let den = one_minus_dot(z, w).norm_sqr();
    let mut wedge = 0.0;
    let n = z.dim();
    for i in 0..n {
        for j in i + 1..n {
            wedge += (z.coords[i] * delta[j] - z.coords[j] * delta[i]).norm_sqr();
        }
    }
    let num = (norm_sq(&delta) - wedge).max(0.0);
    (num / den, z.defect * w.defect / den)
}

/// Bergman distance `½ ln((1+|φ_z(w)|)/(1−|φ_z(w)|))`.
pub fn bergman_distance(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    check_dims(z, w)?;
    z.require_interior("bergman_distance")?;
    w.require_interior("bergman_distance")?;
    let (m2, defect) = mobius_modulus(z, w);
    // Far apart: the defect identity is exact. Close together: the
    // coordinate formula avoids the cancellation in 1 − defect.
    if defect < 0.75 {
        let x = (1.0 - defect).sqrt();
        return Ok((1.0 + x).ln() - 0.5 * defect.ln());
    }
    Ok(m2.sqrt().atanh())
}

/// The involutive automorphism `φ_z` exchanging `z` and `0`.
pub fn mobius_map(z: &BallPoint, w: &BallPoint) -> Result<BallPoint> {
    check_dims(z, w)?;
    z.require_interior("mobius_map")?;
    w.require_interior("mobius_map")?;
    if z.norm == 0.0 {
        return Ok(BallPoint {
            coords: w.coords.iter().map(|c| -c).collect(),
            norm: w.norm,
            defect: w.defect,
            boundary: false,
        });
    }
    let delta: Vec<C64> = w.coords.iter().zip(&z.coords).map(|(a, b)| a - b).collect();
    let dz = dot(&delta, &z.coords);
    let den = C64::new(z.defect, 0.0) - dz;
    let s = z.defect.sqrt();
    let proj = dz / z.norm_sq();
    // φ_z(w) = (z − P_z w − s Q_z w)/(1 − w·z) written in terms of δ = w − z.
    let coords: Vec<C64> =
        z.coords.iter().zip(&delta).map(|(&zi, &di)| (-proj * zi - s * (di - proj * zi)) / den).collect();
    let defect = (z.defect * w.defect / den.norm_sqr()).min(1.0);
    let norm = norm_sq(&coords).sqrt();
    Ok(BallPoint { coords, norm, defect, boundary: false })
}

/// `β(u, v)² = |1 − u·v|` for unit vectors, computed as `½|u−v|² − i Im(u·v)`.
pub(crate) fn one_minus_dot_unit(u: &[C64], v: &[C64]) -> C64 {
    let diff: f64 = u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum();
    C64::new(0.5 * diff, -dot(u, v).im)
}

pub(crate) fn beta_unit(u: &[C64], v: &[C64]) -> f64 {
    one_minus_dot_unit(u, v).norm().sqrt()
}

/// Non-isotropic distance `β(u, v) = |1 − u·v|^{1/2}` on the sphere.
pub fn nonisotropic_distance(u: &BallPoint, v: &BallPoint) -> Result<f64> {
    check_dims(u, v)?;
    if !u.boundary || !v.boundary {
        return Err(Error::Domain("nonisotropic_distance needs boundary points".into()));
    }
    Ok(beta_unit(u.coords(), v.coords()))
}

/// Radial projection `P_r z = tanh(r)·z/|z|` onto the Bergman sphere of radius `r`.
pub fn radial_project(z: &BallPoint, r: f64) -> Result<BallPoint> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    let dir = z.direction().ok_or_else(|| Error::Domain("radial projection of the origin is undefined".into()))?;
    Ok(BallPoint::at_bergman_radius(&dir, r))
}

/// `V_z^ϱ = {w : |1 − w·z/|z|| ≤ ϱ(1 − |z|)}`.
#[derive(Debug, Clone)]
pub struct CarlesonSet {
    apex: BallPoint,
    aperture: f64,
    apex_dir: Vec<C64>,
}

impl CarlesonSet {
    pub fn new(apex: BallPoint, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0) {
            return Err(Error::Domain("aperture must be positive".into()));
        }
        let apex_dir = apex.direction().ok_or_else(|| Error::Domain("Carleson set apex must be nonzero".into()))?;
        Ok(Self { apex, aperture, apex_dir })
    }

    pub fn apex(&self) -> &BallPoint {
        &self.apex
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    /// `|1 − w·ẑ| / (1 − |z|)`: the smallest aperture whose set contains `w`.
    pub fn required_aperture(&self, w: &BallPoint) -> f64 {
        carleson_ratio(&self.apex, &self.apex_dir, w)
    }

    pub fn contains(&self, w: &BallPoint) -> bool {
        self.required_aperture(w) <= self.aperture
    }
}

pub(crate) fn carleson_ratio(apex: &BallPoint, apex_dir: &[C64], w: &BallPoint) -> f64 {
    let gap = match w.direction() {
        None => C64::new(1.0, 0.0),
        Some(wd) => C64::new(w.one_minus_norm(), 0.0) + one_minus_dot_unit(&wd, apex_dir) * w.norm(),
    };
    gap.norm() / apex.one_minus_norm()
}

pub fn carleson_contains(set: &CarlesonSet, w: &BallPoint) -> bool {
    set.contains(w)
}

/// A numerical value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `L(0) = ¼ Γ(n+1)/Γ(n/2+1)²`.
pub fn cap_l_zero(n: usize) -> f64 {
    let nf = n as f64;
    0.25 * (ln_gamma(nf + 1.0) - 2.0 * ln_gamma(nf / 2.0 + 1.0)).exp()
}

fn cap_l_integral(n: usize, r: f64, order: usize) -> f64 {
    // Planar integral over E'(r) in polar coordinates u = e^{iφ}/t, then
    // t = 1 − w² to smooth the arccos endpoint at r = √2.
    let gl = gauss_legendre_unit(order);
    let r2 = r * r;
    let nf = n as f64;
    let mut outer = 0.0;
    for (&w, &ww) in gl.nodes.iter().zip(&gl.weights) {
        let t = 1.0 - w * w;
        let phi0 = (r2 * t / 2.0).min(1.0).acos();
        let mut inner = 0.0;
        for (&x, &wx) in gl.nodes.iter().zip(&gl.weights) {
            let phi = phi0 * x;
            let base = (2.0 * phi.cos() - r2 * t).max(0.0);
            inner += wx * base.powi(n as i32 - 2);
        }
        inner *= 2.0 * phi0;
        outer += ww * 2.0 * w * t.powf(nf - 1.0) * inner;
    }
    (nf - 1.0) * FRAC_1_PI * outer
}

/// `L(r) = σ(B_r)/r^{2n}` with `B_r` a non-isotropic ball on the sphere.
pub fn cap_l(n: usize, r: f64) -> Result<Estimate> {
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    if !(r > 0.0 && r <= 2f64.sqrt() + 1e-15) {
        return Err(Error::Domain(format!("r = {r} outside (0, sqrt 2]")));
    }
    if n == 1 {
        let s = (r * r / 2.0).min(1.0);
        return Ok(Estimate { value: 2.0 / PI * s.asin() / (r * r), error: 0.0 });
    }
    let coarse = cap_l_integral(n, r, 48);
    let fine = cap_l_integral(n, r, 96);
    Ok(Estimate { value: fine, error: (fine - coarse).abs() })
}

/// `L(r)` extended past `√2`, where the cap is the whole sphere and
/// `L(r) = r^{-2n}`.
pub fn cap_l_extended(n: usize, r: f64) -> Result<Estimate> {
    if r > 2f64.sqrt() {
        return Ok(Estimate { value: r.powi(-2 * n as i32), error: 0.0 });
    }
    cap_l(n, r)
}

/// Uniform point on the unit sphere of `C^n`.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let s = norm_sq(&v).sqrt();
        if s > 1e-12 {
            return v.into_iter().map(|c| c / s).collect();
        }
    }
}

/// Point with Bergman radius uniform in `[0, max_radius]` and uniform direction.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, n: usize, max_radius: f64) -> BallPoint {
    let dir = random_direction(rng, n);
    let r: f64 = rng.gen_range(0.0..max_radius);
    BallPoint::at_bergman_radius(&dir, r)
}

/// `|(1−z·u)^b / (1−z·v)^b − 1|` on the principal branch.
pub fn kernel_ratio_deviation(z: &BallPoint, u: &BallPoint, v: &BallPoint, b: f64) -> f64 {
    let one = C64::new(1.0, 0.0);
    let lu = (one - dot(z.coords(), u.coords())).ln();
    let lv = (one - dot(z.coords(), v.coords())).ln();
    (((lu - lv) * b).exp() - one).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pairing_examples() {
        let one = BallPoint::boundary(vec![c(1.0, 0.0)]).unwrap();
        let i = BallPoint::boundary(vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(herm_dot(&one, &i).unwrap(), c(0.0, -1.0));
        let z = BallPoint::new(vec![c(0.3, 0.1), c(-0.2, 0.4)]).unwrap();
        let w = BallPoint::new(vec![c(0.1, 0.5), c(0.2, -0.3)]).unwrap();
        let a = herm_dot(&z, &w).unwrap();
        let b = herm_dot(&w, &z).unwrap();
        assert!((a - b.conj()).norm() < 1e-16);
        assert!(herm_dot(&BallPoint::origin(1), &z).is_err());
    }

    #[test]
    fn distance_examples() {
        let o = BallPoint::origin(1);
        let p = BallPoint::disc(0.6, 0.0).unwrap();
        assert!((bergman_distance(&o, &p).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!(bergman_distance(&p, &p).unwrap().abs() < 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let z = BallPoint::disc(0.5, 0.0).unwrap();
        let w = BallPoint::disc(0.2, 0.0).unwrap();
        let phi = mobius_map(&z, &w).unwrap();
        assert!((phi.coords()[0] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        let fixed = mobius_map(&z, &z).unwrap();
        assert!(fixed.norm() < 1e-15);
        let at0 = mobius_map(&z, &BallPoint::origin(1)).unwrap();
        assert!((at0.coords()[0] - z.coords()[0]).norm() < 1e-15);
    }

    #[test]
    fn deep_points_keep_their_defect() {
        let dir = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let z = BallPoint::at_bergman_radius(&dir, 7.0);
        let w = BallPoint::at_bergman_radius(&dir, 8.0);
        let d = bergman_distance(&z, &w).unwrap();
        assert!((d - 1.0).abs() < 1e-8, "{d}");
        let deep = BallPoint::at_bergman_radius(&dir, 20.0);
        assert!((deep.radius() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn radial_projection_examples() {
        let z = BallPoint::disc(0.3, 0.0).unwrap();
        let p = radial_project(&z, 2f64.ln()).unwrap();
        assert!((p.coords()[0].re - 0.6).abs() < 1e-15);
        assert!(radial_project(&BallPoint::origin(2), 1.0).is_err());
    }

    #[test]
    fn nonisotropic_examples() {
        let one = BallPoint::boundary(vec![c(1.0, 0.0)]).unwrap();
        let m1 = BallPoint::boundary(vec![c(-1.0, 0.0)]).unwrap();
        let i = BallPoint::boundary(vec![c(0.0, 1.0)]).unwrap();
        assert!((nonisotropic_distance(&one, &m1).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((nonisotropic_distance(&one, &i).unwrap() - 2f64.powf(0.25)).abs() < 1e-15);
        assert_eq!(nonisotropic_distance(&one, &one).unwrap(), 0.0);
        assert!(nonisotropic_distance(&one, &BallPoint::disc(0.5, 0.0).unwrap()).is_err());
    }

    #[test]
    fn carleson_examples() {
        let apex = BallPoint::disc(0.5, 0.0).unwrap();
        let set = CarlesonSet::new(apex.clone(), 1.0).unwrap();
        assert!(set.contains(&apex));
        assert!(set.contains(&BallPoint::disc(0.6, 0.0).unwrap()));
        let z = BallPoint::new(vec![c(0.7, 0.0), c(0.0, 0.0)]).unwrap();
        let set = CarlesonSet::new(z, 2.0).unwrap();
        let w = BallPoint::new(vec![c(0.0, 0.0), c(0.3, 0.0)]).unwrap();
        assert!(!set.contains(&w));
        assert!(CarlesonSet::new(BallPoint::origin(1), 1.0).is_err());
    }

    #[test]
    fn cap_l_values() {
        assert!((cap_l(1, 1.0).unwrap().value - 1.0 / 3.0).abs() < 1e-15);
        assert!((cap_l(1, 1e-5).unwrap().value - FRAC_1_PI).abs() < 1e-9);
        assert!((cap_l_zero(1) - FRAC_1_PI).abs() < 1e-14);
        for n in 1..=4 {
            let small = cap_l(n, 1e-4).unwrap();
            assert!((small.value - cap_l_zero(n)).abs() < 1e-6, "n={n}");
            let top = cap_l(n, 2f64.sqrt()).unwrap().value;
            assert!((top - 0.5f64.powi(n as i32)).abs() < 1e-9, "n={n}");
            let bound = top.max(cap_l_zero(n));
            for k in 1..=20 {
                let v = cap_l(n, 2f64.sqrt() * k as f64 / 20.0).unwrap();
                assert!(v.value <= bound + 1e-9, "n={n} k={k}");
                assert!(v.error < 1e-8, "n={n} k={k} err {}", v.error);
            }
            for &r in &[1.5, 2.0, 5.0] {
                assert!(cap_l_extended(n, r).unwrap().value <= top);
            }
        }
        assert!(cap_l(2, 1.5).is_err());
    }

    #[test]
    fn cap_l_matches_direct_cap_measure_n2() {
        // σ(B_r) for n = 2 is the measure of {|1 − ζ_1| < r²}; ζ_1 is uniform on the disc.
        let r: f64 = 0.9;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = 400_000;
        let hits = (0..m)
            .filter(|_| {
                let d = random_direction(&mut rng, 2);
                (c(1.0, 0.0) - d[0]).norm() < r * r
            })
            .count();
        let frac = hits as f64 / m as f64;
        let want = cap_l(2, r).unwrap().value * r.powi(4);
        assert!((frac - want).abs() < 4.0 * (want / m as f64).sqrt(), "{frac} vs {want}");
    }
}
