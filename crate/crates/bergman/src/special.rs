//! Special functions and Gauss rules used throughout the crate.
//!
//! Gauss rules are produced by Golub–Welsch from three-term recurrences and
//! cached per (order, parameters).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

pub fn ln_gamma(x: f64) -> f64 {
    statrs_ln_gamma(x)
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// `ln Γ(x+a) − ln Γ(x+b)`, stable for very large `x`.
pub fn ln_gamma_ratio(x: f64, a: f64, b: f64) -> f64 {
    if x < 1e6 {
        return ln_gamma(x + a) - ln_gamma(x + b);
    }
    // Asymptotic series with Bernoulli polynomials B_2..B_5.
    let bern = |t: f64| -> [f64; 4] {
        [
            t * t - t + 1.0 / 6.0,
            t * t * t - 1.5 * t * t + 0.5 * t,
            t.powi(4) - 2.0 * t.powi(3) + t * t - 1.0 / 30.0,
            t.powi(5) - 2.5 * t.powi(4) + 5.0 / 3.0 * t.powi(3) - t / 6.0,
        ]
    };
    let (ba, bb) = (bern(a), bern(b));
    let mut s = (a - b) * x.ln();
    let mut xp = x;
    for k in 1..=4 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        s += sign * (ba[k - 1] - bb[k - 1]) / ((k * (k + 1)) as f64 * xp);
        xp *= x;
    }
    s
}

/// Pochhammer symbol `(a)_k`.
pub fn pochhammer(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a + j as f64))
}

/// Gauss hypergeometric series `₂F₁(a, b; c; y)` for `0 ≤ y ≤ 1`.
///
/// Terminates when `a` or `b` is a non-positive integer; otherwise the
/// series is summed until terms drop below `1e-17` relative, which requires
/// `c − a − b > 0` at `y = 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, y: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..400_000usize {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * y;
        sum += term;
        if term == 0.0 {
            break;
        }
        if term.abs() < 1e-17 * sum.abs() && k > 4 {
            break;
        }
    }
    sum
}

/// A Gauss rule: nodes ascending, weights summing to the weight's mass.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn golub_welsch(diag: &[f64], offdiag_sq: &[f64], mass: f64) -> GaussRule {
    let n = diag.len();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        j[(k, k)] = diag[k];
        if k + 1 < n {
            let b = offdiag_sq[k + 1].sqrt();
            j[(k, k + 1)] = b;
            j[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (eig.eigenvalues[k], mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule { nodes: pairs.iter().map(|p| p.0).collect(), weights: pairs.iter().map(|p| p.1).collect() }
}

/// Monic recurrence coefficients `(α_k, β_k)`, `k < n`, for the weight
/// `u^a (1−u)^b` on `[0, 1]`; `β_0` is the total mass.
pub fn shifted_jacobi_recurrence(a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    // Classical Jacobi weight (1−x)^b (1+x)^a on [−1, 1], then u = (1+x)/2.
    let (ja, jb) = (b, a);
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let s = ja + jb;
    for k in 0..n {
        let kf = k as f64;
        let ax =
            if k == 0 { (jb - ja) / (s + 2.0) } else { (jb * jb - ja * ja) / ((2.0 * kf + s) * (2.0 * kf + s + 2.0)) };
        alpha.push(0.5 * (1.0 + ax));
        let bx = if k == 0 {
            0.0
        } else if k == 1 {
            4.0 * (1.0 + ja) * (1.0 + jb) / ((2.0 + s).powi(2) * (3.0 + s))
        } else {
            let t = 2.0 * kf + s;
            4.0 * kf * (kf + ja) * (kf + jb) * (kf + s) / (t * t * (t + 1.0) * (t - 1.0))
        };
        beta.push(0.25 * bx);
    }
    if n > 0 {
        beta[0] = ln_beta(a + 1.0, b + 1.0).exp();
    }
    (alpha, beta)
}

type RuleKey = (u8, usize, u64, u64);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: RuleKey, build: impl FnOnce() -> GaussRule) -> Arc<GaussRule> {
    if let Some(r) = rule_cache().lock().unwrap().get(&key) {
        return r.clone();
    }
    let rule = Arc::new(build());
    rule_cache().lock().unwrap().insert(key, rule.clone());
    rule
}

/// Gauss rule on `[0, 1]` for the weight `u^a (1−u)^b`.
pub fn gauss_jacobi_unit(n: usize, a: f64, b: f64) -> Arc<GaussRule> {
    assert!(n >= 1 && a > -1.0 && b > -1.0);
    cached((0, n, a.to_bits(), b.to_bits()), || {
        let (alpha, beta) = shifted_jacobi_recurrence(a, b, n);
        golub_welsch(&alpha, &beta, beta[0])
    })
}

/// Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> Arc<GaussRule> {
    gauss_jacobi_unit(n, 0.0, 0.0)
}

/// Generalized Gauss–Laguerre rule for the weight `x^a e^{−x}` on `[0, ∞)`.
pub fn gauss_laguerre(n: usize, a: f64) -> Arc<GaussRule> {
    assert!(n >= 1 && a > -1.0);
    cached((1, n, a.to_bits(), 0), || {
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + a + 1.0).collect();
        let off: Vec<f64> = (0..n).map(|k| k as f64 * (k as f64 + a)).collect();
        golub_welsch(&diag, &off, ln_gamma(a + 1.0).exp())
    })
}

/// Values `p_0(u) … p_{n−1}(u)` of the polynomials orthonormal for
/// `c · u^a (1−u)^b du` on `[0, 1]`, where `mass` is the total mass of that
/// measure.
pub fn orthonormal_shifted_jacobi(a: f64, b: f64, mass: f64, n: usize, u: f64) -> Vec<f64> {
    let (alpha, beta) = shifted_jacobi_recurrence(a, b, n + 1);
    let mut p = Vec::with_capacity(n);
    if n == 0 {
        return p;
    }
    p.push(1.0 / mass.sqrt());
    if n == 1 {
        return p;
    }
    p.push((u - alpha[0]) * p[0] / beta[1].sqrt());
    for k in 1..n - 1 {
        let next = ((u - alpha[k]) * p[k] - beta[k].sqrt() * p[k - 1]) / beta[k + 1].sqrt();
        p.push(next);
    }
    p
}

/// Radical-inverse (Halton) point in `[0,1)^dim` for the given index.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    (0..dim)
        .map(|d| {
            let base = PRIMES[d];
            let mut f = 1.0;
            let mut r = 0.0;
            let mut i = index + 1;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}

/// `ln((1+x)/(1−x))/2` given `x ≥ 0` and an accurate value of `1 − x²`.
pub fn atanh_with_defect(x: f64, defect: f64) -> f64 {
    if x < 0.5 {
        x.atanh()
    } else {
        (1.0 + x).ln() - 0.5 * defect.ln()
    }
}

pub fn two_pi() -> f64 {
    2.0 * PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_rule_integrates_beta_moments() {
        let r = gauss_jacobi_unit(12, 1.5, 0.5);
        for k in 0..20 {
            let exact = ln_beta(2.5 + k as f64, 1.5).exp();
            let got = r.integrate(|u| u.powi(k));
            assert!((got / exact - 1.0).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn laguerre_rule_moments() {
        let r = gauss_laguerre(20, 2.0);
        for k in 0..20 {
            let exact = ln_gamma(3.0 + k as f64).exp();
            let got = r.integrate(|x| x.powi(k));
            assert!((got / exact - 1.0).abs() < 1e-11, "k={k}");
        }
    }

    #[test]
    fn orthonormal_polynomials_are_orthonormal() {
        let (a, b) = (3.0, 0.5);
        let mass = ln_beta(a + 1.0, b + 1.0).exp();
        let r = gauss_jacobi_unit(30, a, b);
        let n = 12;
        let mut g = vec![vec![0.0; n]; n];
        for (&u, &w) in r.nodes.iter().zip(&r.weights) {
            let p = orthonormal_shifted_jacobi(a, b, mass, n, u);
            for i in 0..n {
                for j in 0..n {
                    g[i][j] += w * p[i] * p[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((g[i][j] - want).abs() < 1e-12, "({i},{j})={}", g[i][j]);
            }
        }
    }

    #[test]
    fn gamma_ratio_asymptotic_matches_direct() {
        for &(a, b) in &[(0.0, 2.0), (1.5, 3.0), (2.0, 1.0)] {
            let x = 1e6;
            let direct = ln_gamma(x + a) - ln_gamma(x + b);
            let asym = ln_gamma_ratio(x * 1.000_000_1, a, b) - (a - b) * 1.000_000_1f64.ln();
            assert!((direct - asym).abs() < 1e-8, "{direct} {asym}");
        }
    }

    #[test]
    fn hyp2f1_terminating_and_closed_form() {
        // 2F1(1,1;2;y) = -ln(1-y)/y
        let y: f64 = 0.3;
        assert!((hyp2f1(1.0, 1.0, 2.0, y) + (1.0 - y).ln() / y).abs() < 1e-14);
        // 2F1(-2, b; c; y) is a quadratic
        let (b, c) = (1.5, 2.5);
        let want = 1.0 - 2.0 * b / c * y + b * (b + 1.0) / (c * (c + 1.0)) * y * y;
        assert!((hyp2f1(-2.0, b, c, y) - want).abs() < 1e-15);
    }
}
