//! Disc geometry in polar coordinates `(s, t)` with `s = 1 − |z|²` and `t`
//! the argument in turns.
//!
//! Deep in the disc `|z|` rounds to one while `s` and small angle
//! differences remain exact, so distances and differences between nearby
//! points are evaluated from `(s, Δt)` directly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::BallPoint;
use crate::measure::PolarBox;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub s: f64,
    pub t: f64,
}

impl PolarPoint {
    pub fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }

    pub fn origin() -> Self {
        Self { s: 1.0, t: 0.0 }
    }

    pub fn radius(&self) -> f64 {
        (1.0 - self.s).max(0.0).sqrt()
    }

    /// Bergman distance to the origin.
    pub fn depth(&self) -> f64 {
        let r = self.radius();
        if r < 0.5 {
            r.atanh()
        } else {
            (1.0 + r).ln() - 0.5 * self.s.ln()
        }
    }

    /// The point at Bergman radius `rho` on the same ray.
    pub fn at_depth(t: f64, rho: f64) -> Self {
        Self { s: sech_sq(rho), t }
    }

    pub fn to_ball(&self) -> BallPoint {
        BallPoint::disc_from_defect(self.s, 2.0 * PI * self.t).expect("polar points have defect in (0, 1]")
    }
}

/// `sech²(x) = 1 − tanh²(x)`, accurate for large `x`.
pub fn sech_sq(x: f64) -> f64 {
    let e = (-2.0 * x.abs()).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

/// Shortest signed difference `a − b` in turns, in `[−½, ½)`.
pub fn turn_diff(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - (d + 0.5).floor()
}

/// `(|φ_z(w)|², 1 − |φ_z(w)|²)` for polar points.
pub fn mobius_modulus(z: &PolarPoint, w: &PolarPoint) -> (f64, f64) {
    let (r1, r2) = (z.radius(), w.radius());
    let sn = (PI * turn_diff(z.t, w.t)).sin();
    let a = 4.0 * r1 * r2 * sn * sn;
    let dr = if r1 + r2 > 0.0 { (w.s - z.s) / (r1 + r2) } else { 0.0 };
    let omr = (z.s + w.s - z.s * w.s) / (1.0 + r1 * r2);
    let den = omr * omr + a;
    ((dr * dr + a) / den, z.s * w.s / den)
}

pub fn distance(z: &PolarPoint, w: &PolarPoint) -> f64 {
    let (m2, defect) = mobius_modulus(z, w);
    if defect < 0.75 {
        let x = (1.0 - defect).sqrt();
        (1.0 + x).ln() - 0.5 * defect.ln()
    } else {
        m2.sqrt().atanh()
    }
}

/// `w − z` without cancellation.
pub fn delta(z: &PolarPoint, w: &PolarPoint) -> C64 {
    let (rz, rw) = (z.radius(), w.radius());
    let ew = C64::from_polar(1.0, 2.0 * PI * w.t);
    let dr = if rz + rw > 0.0 { (z.s - w.s) / (rz + rw) } else { 0.0 };
    let dt = turn_diff(w.t, z.t);
    let mid = C64::from_polar(1.0, PI * (z.t + dt * 0.5) * 2.0);
    let arc = C64::new(0.0, 2.0 * (PI * dt).sin()) * mid;
    ew * dr + arc * rz
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    fc.min(fd).min(f(a)).min(f(b))
}

/// Depth range `[ρ_lo, ρ_hi]` covered by a box; the open end at the sphere
/// is capped well beyond any query point.
fn depth_range(b: &PolarBox, cap: f64) -> (f64, f64) {
    let lo = PolarPoint::new(b.s_hi, 0.0).depth();
    let hi = if b.s_lo <= 0.0 { cap } else { PolarPoint::new(b.s_lo, 0.0).depth() };
    (lo, hi)
}

fn angular_offset(t: f64, b: &PolarBox) -> Option<f64> {
    if b.full_turn() {
        return None;
    }
    let rel = t - b.t_lo - (t - b.t_lo).floor();
    if rel <= b.t_hi - b.t_lo {
        return None;
    }
    // Outside the arc: the nearer of the two radial edges.
    let to_lo = turn_diff(t, b.t_lo).abs();
    let to_hi = turn_diff(t, b.t_hi).abs();
    Some(if to_lo <= to_hi { b.t_lo } else { b.t_hi })
}

/// Minimum Bergman distance from `z` to the closed box.
pub fn box_min_distance(z: &PolarPoint, b: &PolarBox) -> f64 {
    let rho_z = z.depth();
    let (lo, hi) = depth_range(b, rho_z + 60.0);
    match angular_offset(z.t, b) {
        None => {
            if rho_z < lo {
                lo - rho_z
            } else if rho_z > hi {
                rho_z - hi
            } else {
                0.0
            }
        }
        Some(edge) => {
            // Distance along a geodesic is convex.
            golden_min(|rho| distance(z, &PolarPoint::at_depth(edge, rho)), lo, hi)
        }
    }
}

/// Maximum Bergman distance from `z` to the box, attained at a corner.
pub fn box_max_distance(z: &PolarPoint, b: &PolarBox) -> f64 {
    let (lo, hi) = depth_range(b, f64::INFINITY);
    if hi.is_infinite() {
        return f64::INFINITY;
    }
    let mut ts = vec![b.t_lo, b.t_hi];
    if !b.full_turn() {
        // The point diametrically opposite z may lie inside the arc.
        let opp = z.t + 0.5;
        let rel = opp - b.t_lo - (opp - b.t_lo).floor();
        if rel <= b.t_hi - b.t_lo {
            ts.push(b.t_lo + rel);
        }
    } else {
        ts.push(z.t + 0.5);
    }
    let mut best: f64 = 0.0;
    for &t in &ts {
        for &rho in &[lo, hi] {
            best = best.max(distance(z, &PolarPoint::at_depth(t, rho)));
        }
    }
    best
}

/// Minimum Bergman distance from `z` to the complement of the box.
pub fn box_inradius(z: &PolarPoint, b: &PolarBox) -> f64 {
    let (lo, hi) = depth_range(b, f64::INFINITY);
    let rho_z = z.depth();
    let mut best = (hi - rho_z).min(if b.s_hi >= 1.0 { f64::INFINITY } else { rho_z - lo });
    if !b.full_turn() {
        let cap = if hi.is_finite() { hi } else { rho_z + 60.0 };
        for edge in [b.t_lo, b.t_hi] {
            let d = golden_min(|rho| distance(z, &PolarPoint::at_depth(edge, rho)), lo, cap);
            best = best.min(d);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bergman_distance;

    #[test]
    fn polar_distance_matches_cartesian() {
        let pts = [(0.3, 0.1), (0.01, 0.7), (0.5, 0.95), (1.0, 0.0), (0.002, 0.71)];
        for a in &pts {
            for b in &pts {
                let (p, q) = (PolarPoint::new(a.0, a.1), PolarPoint::new(b.0, b.1));
                let want = bergman_distance(&p.to_ball(), &q.to_ball()).unwrap();
                assert!((distance(&p, &q) - want).abs() < 1e-10, "{a:?} {b:?}");
                let d = delta(&p, &q);
                let direct = q.to_ball().coords()[0] - p.to_ball().coords()[0];
                assert!((d - direct).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn deep_distances_are_resolved() {
        // Radial separation of one unit at depth 40, and an angular offset.
        let z = PolarPoint::at_depth(0.0, 40.0);
        let w = PolarPoint::at_depth(0.0, 41.0);
        assert!((distance(&z, &w) - 1.0).abs() < 1e-9);
        let v = PolarPoint::new(z.s, z.s);
        let d = distance(&z, &v);
        assert!(d > 0.5 && d < 3.0, "{d}");
        assert!(delta(&z, &v).norm() > 0.0);
    }

    #[test]
    fn box_distances() {
        let b = PolarBox::new(0.1, 0.3, 0.2, 0.3).unwrap();
        let inside = PolarPoint::new(0.2, 0.25);
        assert_eq!(box_min_distance(&inside, &b), 0.0);
        let r = box_inradius(&inside, &b);
        assert!(r > 0.0 && r < box_max_distance(&inside, &b));
        let outside = PolarPoint::new(0.2, 0.5);
        let dmin = box_min_distance(&outside, &b);
        // Brute force over a grid of the box.
        let mut brute = f64::INFINITY;
        for i in 0..=200 {
            for j in 0..=40 {
                let s = 0.1 + 0.2 * i as f64 / 200.0;
                let t = 0.2 + 0.1 * j as f64 / 40.0;
                brute = brute.min(distance(&outside, &PolarPoint::new(s, t)));
            }
        }
        assert!(dmin <= brute + 1e-12 && brute - dmin < 1e-3, "{dmin} {brute}");
    }
}
