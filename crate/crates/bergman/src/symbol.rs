//! Polynomial symbols `f(z) = Σ c · z^a z̄^b (1 − |z|²)^s`.
//!
//! The defect power `s` is kept as a separate exponent so that boundary
//! vanishing symbols evaluate accurately near the sphere;
//! [`Symbol::expand_defect`] rewrites them as plain monomials.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::geometry::BallPoint;

type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Exponents {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    pub s: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    n: usize,
    terms: BTreeMap<Exponents, C64>,
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// All multi-indices of length `n` with entries summing to `k`.
fn compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(n - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

impl Symbol {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: C64) -> Self {
        let mut s = Self::zero(n);
        s.add_term(vec![0; n], vec![0; n], 0, c);
        s
    }

    /// `coeff · z^a z̄^b (1−|z|²)^s`.
    pub fn monomial(a: Vec<u32>, b: Vec<u32>, s: u32, coeff: C64) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::Symbol("multi-indices must have equal positive length".into()));
        }
        let mut out = Self::zero(a.len());
        out.add_term(a, b, s, coeff);
        Ok(out)
    }

    /// `n = 1` monomial `coeff · z^a z̄^b (1−|z|²)^s`.
    pub fn disc_monomial(a: u32, b: u32, s: u32, coeff: C64) -> Self {
        Self::monomial(vec![a], vec![b], s, coeff).expect("valid n = 1 monomial")
    }

    /// `z̄` in one variable.
    pub fn zbar() -> Self {
        Self::disc_monomial(0, 1, 0, C64::new(1.0, 0.0))
    }

    /// `z` in one variable.
    pub fn z() -> Self {
        Self::disc_monomial(1, 0, 0, C64::new(1.0, 0.0))
    }

    fn add_term(&mut self, a: Vec<u32>, b: Vec<u32>, s: u32, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        let key = Exponents { a, b, s };
        let entry = self.terms.entry(key.clone()).or_insert(C64::new(0.0, 0.0));
        *entry += c;
        if *entry == C64::new(0.0, 0.0) {
            self.terms.remove(&key);
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the expanded symbol has no non-constant monomial.
    pub fn is_constant(&self) -> bool {
        self.expand_defect().terms.keys().all(|e| e.a.iter().all(|&x| x == 0) && e.b.iter().all(|&x| x == 0))
    }

    /// Total degree counting `(1−|z|²)` as degree 2.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.a.iter().sum::<u32>() + e.b.iter().sum::<u32>() + 2 * e.s).max().unwrap_or(0)
    }

    /// `n = 1` charges `a − b` present in the symbol.
    pub fn charges(&self) -> Vec<i64> {
        let mut c: Vec<i64> = self.terms.keys().map(|e| e.a[0] as i64 - e.b[0] as i64).collect();
        c.sort_unstable();
        c.dedup();
        c
    }

    /// The common charge when every term has the same `a − b` (`n = 1`).
    pub fn single_charge(&self) -> Option<i64> {
        if self.n != 1 {
            return None;
        }
        match self.charges().as_slice() {
            [q] => Some(*q),
            _ => None,
        }
    }

    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.b.clone(), e.a.clone(), e.s, c.conj());
        }
        out
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.a.clone(), e.b.clone(), e.s, c * k);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "symbol dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.a.clone(), e.b.clone(), e.s, *c);
        }
        out
    }

    pub fn add_constant(&self, c: C64) -> Self {
        self.add(&Self::constant(self.n, c))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "symbol dimension mismatch");
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let a = e1.a.iter().zip(&e2.a).map(|(x, y)| x + y).collect();
                let b = e1.b.iter().zip(&e2.b).map(|(x, y)| x + y).collect();
                out.add_term(a, b, e1.s + e2.s, c1 * c2);
            }
        }
        out
    }

    /// `|f|² = f · f̄`.
    pub fn abs_sq(&self) -> Self {
        self.mul(&self.conj())
    }

    /// Rewrites every `(1−|z|²)^s` as `Σ_k binom(s,k)(−1)^k |z|^{2k}` with
    /// `|z|^{2k}` expanded multinomially.
    pub fn expand_defect(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (e, c) in &self.terms {
            for k in 0..=e.s {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let outer = binom(e.s, k) * sign;
                for beta in compositions(self.n, k) {
                    let multi = factorial(k) / beta.iter().map(|&x| factorial(x)).product::<f64>();
                    let a = e.a.iter().zip(&beta).map(|(x, y)| x + y).collect();
                    let b = e.b.iter().zip(&beta).map(|(x, y)| x + y).collect();
                    out.add_term(a, b, 0, c * outer * multi);
                }
            }
        }
        out
    }

    fn monomial_value(coords: &[C64], e: &Exponents) -> C64 {
        let mut v = C64::new(1.0, 0.0);
        for (i, z) in coords.iter().enumerate() {
            if e.a[i] > 0 {
                v *= z.powu(e.a[i]);
            }
            if e.b[i] > 0 {
                v *= z.conj().powu(e.b[i]);
            }
        }
        v
    }

    pub fn eval(&self, z: &BallPoint) -> C64 {
        debug_assert_eq!(z.dim(), self.n);
        let defect = z.defect();
        self.terms.iter().map(|(e, c)| c * Self::monomial_value(z.coords(), e) * defect.powi(e.s as i32)).sum()
    }

    /// `f(z) − f(c)` given `δ = z − c` accurately, without cancellation.
    pub fn eval_difference(&self, c: &BallPoint, z: &BallPoint, delta: &[C64]) -> C64 {
        let (sc, sz) = (c.defect(), z.defect());
        let mut total = C64::new(0.0, 0.0);
        for (e, coeff) in &self.terms {
            // Telescoping product over the factor list z_i…, z̄_i….
            let mut base: Vec<C64> = Vec::new();
            let mut step: Vec<C64> = Vec::new();
            for i in 0..self.n {
                for _ in 0..e.a[i] {
                    base.push(c.coords()[i]);
                    step.push(delta[i]);
                }
                for _ in 0..e.b[i] {
                    base.push(c.coords()[i].conj());
                    step.push(delta[i].conj());
                }
            }
            let mut diff = C64::new(0.0, 0.0);
            let mut prefix = C64::new(1.0, 0.0);
            for k in 0..base.len() {
                let suffix: C64 = base[k + 1..].iter().product();
                diff += prefix * step[k] * suffix;
                prefix *= base[k] + step[k];
            }
            let pc: C64 = base.iter().product();
            let defect_diff = if e.s == 0 {
                0.0
            } else {
                // s_z^s − s_c^s = (s_z − s_c) Σ s_z^j s_c^{s−1−j}
                let mut acc = 0.0;
                for j in 0..e.s {
                    acc += sz.powi(j as i32) * sc.powi((e.s - 1 - j) as i32);
                }
                (sz - sc) * acc
            };
            total += coeff * (diff * sz.powi(e.s as i32) + pc * defect_diff);
        }
        total
    }

    /// Parses the literal `[[a, b, re, im(, s)], …]`; for `n ≥ 2` the
    /// exponents `a`, `b` are integer arrays.
    pub fn from_literal(n: usize, value: &Value) -> Result<Self> {
        let rows = value.as_array().ok_or_else(|| Error::Symbol("symbol literal must be a list of terms".into()))?;
        let mut out = Self::zero(n);
        for row in rows {
            let items = row.as_array().ok_or_else(|| Error::Symbol(format!("term {row} is not a list")))?;
            if items.len() != 4 && items.len() != 5 {
                return Err(Error::Symbol(format!("term {row} needs 4 or 5 entries")));
            }
            let index = |v: &Value| -> Result<Vec<u32>> {
                if n == 1 {
                    if let Some(k) = v.as_u64() {
                        return Ok(vec![k as u32]);
                    }
                }
                let arr = v.as_array().ok_or_else(|| Error::Symbol(format!("bad exponent {v}")))?;
                let idx: Option<Vec<u32>> = arr.iter().map(|x| x.as_u64().map(|k| k as u32)).collect();
                let idx = idx.ok_or_else(|| Error::Symbol(format!("bad exponent {v}")))?;
                if idx.len() != n {
                    return Err(Error::Symbol(format!("exponent {v} must have length {n}")));
                }
                Ok(idx)
            };
            let num =
                |v: &Value| -> Result<f64> { v.as_f64().ok_or_else(|| Error::Symbol(format!("bad coefficient {v}"))) };
            let a = index(&items[0])?;
            let b = index(&items[1])?;
            let c = C64::new(num(&items[2])?, num(&items[3])?);
            let s = match items.get(4) {
                None => 0,
                Some(v) => v.as_u64().ok_or_else(|| Error::Symbol(format!("bad defect power {v}")))? as u32,
            };
            out.add_term(a, b, s, c);
        }
        Ok(out)
    }

    pub fn to_literal(&self) -> Value {
        let idx = |v: &[u32]| -> Value {
            if self.n == 1 {
                Value::from(v[0])
            } else {
                Value::from(v.to_vec())
            }
        };
        Value::Array(
            self.terms
                .iter()
                .map(|(e, c)| {
                    let mut row = vec![idx(&e.a), idx(&e.b), Value::from(c.re), Value::from(c.im)];
                    if e.s > 0 {
                        row.push(Value::from(e.s));
                    }
                    Value::Array(row)
                })
                .collect(),
        )
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            for i in 0..self.n {
                let var = if self.n == 1 { "z".to_string() } else { format!("z{}", i + 1) };
                if e.a[i] > 0 {
                    write!(f, "·{var}^{}", e.a[i])?;
                }
                if e.b[i] > 0 {
                    write!(f, "·conj({var})^{}", e.b[i])?;
                }
            }
            if e.s > 0 {
                write!(f, "·(1-|z|^2)^{}", e.s)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn literal_round_trip() {
        let v = json!([[0, 1, 1.0, 0.0], [2, 1, 0.5, -0.25, 3]]);
        let s = Symbol::from_literal(1, &v).unwrap();
        assert_eq!(s.num_terms(), 2);
        let back = Symbol::from_literal(1, &s.to_literal()).unwrap();
        assert_eq!(back, s);
        let v2 = json!([[[1, 0], [0, 2], 1.0, 1.0]]);
        assert_eq!(Symbol::from_literal(2, &v2).unwrap().degree(), 3);
        assert!(Symbol::from_literal(1, &json!([[1, 2, 3]])).is_err());
    }

    #[test]
    fn expansion_matches_evaluation() {
        let f = Symbol::disc_monomial(0, 1, 4, C64::new(1.0, 0.0))
            .add(&Symbol::monomial(vec![1], vec![2], 2, C64::new(0.3, -0.7)).unwrap());
        let g = f.expand_defect();
        for &(re, im) in &[(0.1, 0.2), (-0.5, 0.6), (0.9, -0.1)] {
            let z = BallPoint::disc(re, im).unwrap();
            assert!((f.eval(&z) - g.eval(&z)).norm() < 1e-14);
        }
        let f2 = Symbol::monomial(vec![1, 0], vec![0, 1], 2, C64::new(1.0, 0.0)).unwrap();
        let z = BallPoint::new(vec![C64::new(0.2, 0.1), C64::new(-0.3, 0.4)]).unwrap();
        assert!((f2.eval(&z) - f2.expand_defect().eval(&z)).norm() < 1e-14);
    }

    #[test]
    fn algebra_closure() {
        let f = Symbol::zbar().add(&Symbol::disc_monomial(2, 1, 0, C64::new(0.0, 1.0)));
        let z = BallPoint::disc(0.3, -0.4).unwrap();
        let fz = f.eval(&z);
        assert!((f.conj().eval(&z) - fz.conj()).norm() < 1e-15);
        assert!((f.abs_sq().eval(&z).re - fz.norm_sqr()).abs() < 1e-15);
        assert!(Symbol::constant(1, C64::new(2.0, 0.0)).is_constant());
        assert!(!Symbol::disc_monomial(0, 0, 1, C64::new(1.0, 0.0)).is_constant());
        assert_eq!(Symbol::zbar().single_charge(), Some(-1));
        assert_eq!(f.single_charge(), None);
    }

    #[test]
    fn difference_is_accurate_near_the_sphere() {
        let f = Symbol::disc_monomial(2, 1, 1, C64::new(1.0, 0.0));
        let s = 1e-30;
        let c = BallPoint::disc_from_defect(s, 0.0).unwrap();
        let z = BallPoint::disc_from_defect(2.0 * s, 0.0).unwrap();
        // z − c = √(1−2s) − √(1−s) ≈ −s/2
        let delta = [C64::new(-s / 2.0, 0.0)];
        let got = f.eval_difference(&c, &z, &delta);
        // f(z) − f(c) = |z|²z (1−|z|²) − … ≈ 2s − s to leading order
        assert!((got.re - s).abs() < 1e-12 * s, "{got}");
    }
}
