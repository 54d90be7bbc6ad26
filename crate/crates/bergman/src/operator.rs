//! Finite-dimensional model of the Bergman projection, multiplication
//! operators, Hankel operators and their commutators on the disc.
//!
//! The truncated space is spanned by `z^a z̄^b` with `0 ≤ a, b ≤ D`. It splits
//! into charge sectors `q = a − b`; sector `q` is spanned by
//! `z^{q+} z̄^{q−} p(|z|²)` with `deg p ≤ D − |q|`, and is orthonormalized by
//! the polynomials orthonormal for `(γ+1) u^{|q|} (1−u)^γ du`. Sectors are
//! ordered by ascending `q`, and by ascending degree inside a sector. The
//! Bergman projection is then diagonal: it keeps exactly the vectors
//! `z^q / √m_q`, `q ≥ 0`.
//!
//! For a symbol of a single charge `c`, `H_f` maps the holomorphic vectors to
//! mutually orthogonal sectors, so its singular values are the norms
//! `‖H_f e_k‖`, available in closed form for every (even fractional) `k`.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::measure::{moment, moment_multi};
use crate::special::{gauss_jacobi_unit, gauss_legendre_unit, ln_gamma_ratio, shifted_jacobi_recurrence};
use crate::symbol::Symbol;

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Largest tolerated orthonormality defect of the computed basis.
const ORTHONORMALITY_GUARD: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct TruncatedBasis {
    d: usize,
    gamma: f64,
    offsets: Vec<usize>,
}

impl TruncatedBasis {
    pub fn new(d: usize, gamma: f64) -> Result<Self> {
        if !(gamma > -1.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("weight exponent must exceed −1, got {gamma}")));
        }
        if d == 0 {
            return Err(Error::Domain("degree cap must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(2 * d + 2);
        let mut acc = 0;
        for q in -(d as i64)..=d as i64 {
            offsets.push(acc);
            acc += d + 1 - q.unsigned_abs() as usize;
        }
        offsets.push(acc);
        let basis = Self { d, gamma, offsets };
        let defect = basis.orthonormality_defect();
        if defect > ORTHONORMALITY_GUARD {
            // Condition number of a Gram matrix within `defect` of the identity.
            return Err(Error::Conditioning((1.0 + defect) / (1.0 - defect).max(f64::MIN_POSITIVE)));
        }
        Ok(basis)
    }

    pub fn degree_cap(&self) -> usize {
        self.d
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(D+1)²`.
    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("offsets are nonempty")
    }

    pub fn sector_len(&self, q: i64) -> usize {
        self.d + 1 - q.unsigned_abs() as usize
    }

    pub fn sector_range(&self, q: i64) -> std::ops::Range<usize> {
        let i = (q + self.d as i64) as usize;
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn index(&self, q: i64, k: usize) -> usize {
        debug_assert!(q.unsigned_abs() as usize <= self.d && k < self.sector_len(q));
        self.offsets[(q + self.d as i64) as usize] + k
    }

    /// `(q, k)` of a basis index.
    pub fn label(&self, idx: usize) -> (i64, usize) {
        let i = self.offsets.partition_point(|&o| o <= idx) - 1;
        (i as i64 - self.d as i64, idx - self.offsets[i])
    }

    pub fn is_holomorphic(&self, idx: usize) -> bool {
        let (q, k) = self.label(idx);
        q >= 0 && k == 0
    }

    /// Indices of `z^q / √m_q`, `q = 0..=D`.
    pub fn holomorphic_indices(&self) -> Vec<usize> {
        (0..=self.d as i64).map(|q| self.index(q, 0)).collect()
    }

    /// Stable identifier of the basis construction and ordering.
    pub fn hash(&self) -> String {
        let desc = serde_json::json!({
            "D": self.d,
            "gamma": self.gamma,
            "family": "jacobi",
            "ordering": "charge ascending, degree ascending",
        });
        let mut h = Sha256::new();
        h.update(desc.to_string().as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Monomial coefficients of the radial polynomial of sector `|q|`,
    /// degree `k`: `p(u) = Σ c_j u^j`, from the explicit Jacobi sum
    /// `c_j ∝ (−1)^{k+j} C(k, j) (a+b+k+1)_j / (b+1)_j` with `a = γ`,
    /// `b = |q|`.
    fn radial_coefficients(&self, absq: usize, k: usize) -> Vec<f64> {
        let (a, b) = (self.gamma, absq as f64);
        let kf = k as f64;
        let mut c = Vec::with_capacity(k + 1);
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        c.push(sign * (0..k).map(|i| (b + 1.0 + i as f64) / (i as f64 + 1.0)).product::<f64>());
        for j in 1..=k {
            let jf = j as f64;
            let prev = c[j - 1];
            c.push(-prev * (kf - jf + 1.0) / jf * (a + b + kf + jf) / (b + jf));
        }
        // Squared norm under (γ+1) u^b (1−u)^a du.
        let mut norm = moment(absq as u32, self.gamma) * (a + b + 1.0) / (2.0 * kf + a + b + 1.0);
        for i in 0..k {
            let i = i as f64;
            norm *= (a + 1.0 + i) * (b + 1.0 + i) / ((a + b + 1.0 + i) * (i + 1.0));
        }
        let scale = 1.0 / norm.sqrt();
        c.iter_mut().for_each(|x| *x *= scale);
        c
    }

    /// The basis vector as a symbol. Coefficients grow quickly with the
    /// degree, so this is meant for inspection at small `D`.
    pub fn vector_symbol(&self, idx: usize) -> Symbol {
        let (q, k) = self.label(idx);
        let (qp, qm) = (q.max(0) as u32, (-q).max(0) as u32);
        let mut out = Symbol::zero(1);
        for (j, c) in self.radial_coefficients(q.unsigned_abs() as usize, k).into_iter().enumerate() {
            let j = j as u32;
            out = out.add(&Symbol::disc_monomial(qp + j, qm + j, 0, C64::new(c, 0.0)));
        }
        out
    }

    /// Values of the sector-`|q|` radial polynomials of degree `< len` at
    /// the nodes, as a `nodes × len` table.
    fn radial_table(&self, absq: usize, len: usize, nodes: &[f64]) -> DMatrix<f64> {
        let (alpha, beta) = shifted_jacobi_recurrence(absq as f64, self.gamma, len + 1);
        let p0 = 1.0 / moment(absq as u32, self.gamma).sqrt();
        let mut t = DMatrix::zeros(nodes.len(), len);
        if len == 0 {
            return t;
        }
        for (i, &u) in nodes.iter().enumerate() {
            t[(i, 0)] = p0;
            if len > 1 {
                t[(i, 1)] = (u - alpha[0]) * p0 / beta[1].sqrt();
            }
            for k in 1..len - 1 {
                t[(i, k + 1)] = ((u - alpha[k]) * t[(i, k)] - beta[k].sqrt() * t[(i, k - 1)]) / beta[k + 1].sqrt();
            }
        }
        t
    }

    /// Largest entry of `|G − I|` for the Gram matrix of the basis,
    /// evaluated sector by sector with an exact Gauss rule.
    pub fn orthonormality_defect(&self) -> f64 {
        let rule = gauss_jacobi_unit(self.d + 2, 0.0, self.gamma);
        let mut worst: f64 = 0.0;
        for absq in 0..=self.d {
            let len = self.d + 1 - absq;
            let t = self.radial_table(absq, len, &rule.nodes);
            let w: Vec<f64> = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&u, &w)| (self.gamma + 1.0) * w * u.powi(absq as i32))
                .collect();
            for k in 0..len {
                for l in 0..=k {
                    let g: f64 = (0..w.len()).map(|i| w[i] * t[(i, k)] * t[(i, l)]).sum();
                    let target = if k == l { 1.0 } else { 0.0 };
                    worst = worst.max((g - target).abs());
                }
            }
        }
        worst
    }
}

/// An operator restricted to the listed basis rows and columns (both sorted).
/// `dropped_mass[j]` is the squared norm of column `j`'s image that falls
/// outside the truncated space.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub data: DMatrix<C64>,
    pub dropped_mass: Vec<f64>,
    pub degree_cap: usize,
    pub gamma: f64,
    pub basis_hash: String,
}

#[derive(Debug, Clone, Serialize)]
struct MatrixHeader<'a> {
    rows: usize,
    cols: usize,
    basis_hash: &'a str,
    gamma: f64,
    #[serde(rename = "D")]
    d: usize,
    row_indices: &'a [usize],
    col_indices: &'a [usize],
}

impl OperatorMatrix {
    fn empty_like(basis: &TruncatedBasis, rows: Vec<usize>, cols: Vec<usize>) -> Self {
        let data = DMatrix::from_element(rows.len(), cols.len(), ZERO);
        let dropped_mass = vec![0.0; cols.len()];
        Self { rows, cols, data, dropped_mass, degree_cap: basis.d, gamma: basis.gamma, basis_hash: basis.hash() }
    }

    fn meta_like(&self, rows: Vec<usize>, cols: Vec<usize>, data: DMatrix<C64>) -> Self {
        let dropped_mass = vec![0.0; cols.len()];
        Self {
            rows,
            cols,
            data,
            dropped_mass,
            degree_cap: self.degree_cap,
            gamma: self.gamma,
            basis_hash: self.basis_hash.clone(),
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        match (self.rows.binary_search(&row), self.cols.binary_search(&col)) {
            (Ok(i), Ok(j)) => self.data[(i, j)],
            _ => ZERO,
        }
    }

    pub fn max_dropped_mass(&self) -> f64 {
        self.dropped_mass.iter().copied().fold(0.0, f64::max)
    }

    /// Dense matrix over the full `dim × dim` index space.
    pub fn to_dense(&self, dim: usize) -> DMatrix<C64> {
        let mut out = DMatrix::from_element(dim, dim, ZERO);
        for (j, &c) in self.cols.iter().enumerate() {
            for (i, &r) in self.rows.iter().enumerate() {
                out[(r, c)] = self.data[(i, j)];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        self.meta_like(self.cols.clone(), self.rows.clone(), self.data.adjoint())
    }

    /// Product `self · rhs`, skipping zero entries of `rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = DMatrix::from_element(self.rows.len(), rhs.cols.len(), ZERO);
        for j in 0..rhs.cols.len() {
            for (k, &mid) in rhs.rows.iter().enumerate() {
                let x = rhs.data[(k, j)];
                if x == ZERO {
                    continue;
                }
                if let Ok(kk) = self.cols.binary_search(&mid) {
                    for i in 0..self.rows.len() {
                        out[(i, j)] += self.data[(i, kk)] * x;
                    }
                }
            }
        }
        self.meta_like(self.rows.clone(), rhs.cols.clone(), out)
    }

    /// `self − other` over the union of their index sets.
    pub fn sub(&self, other: &Self) -> Self {
        let union = |a: &[usize], b: &[usize]| {
            let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        let rows = union(&self.rows, &other.rows);
        let cols = union(&self.cols, &other.cols);
        let mut out = DMatrix::from_element(rows.len(), cols.len(), ZERO);
        for (m, sign) in [(self, 1.0), (other, -1.0)] {
            for (j, c) in m.cols.iter().enumerate() {
                let jj = cols.binary_search(c).expect("column in union");
                for (i, r) in m.rows.iter().enumerate() {
                    let ii = rows.binary_search(r).expect("row in union");
                    out[(ii, jj)] += m.data[(i, j)] * sign;
                }
            }
        }
        self.meta_like(rows, cols, out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Drops rows that are identically zero.
    pub fn compress_rows(&self) -> Self {
        let keep: Vec<usize> = (0..self.rows.len()).filter(|&i| self.data.row(i).iter().any(|c| *c != ZERO)).collect();
        let data = DMatrix::from_fn(keep.len(), self.cols.len(), |i, j| self.data[(keep[i], j)]);
        let mut out = self.meta_like(keep.iter().map(|&i| self.rows[i]).collect(), self.cols.clone(), data);
        out.dropped_mass = self.dropped_mass.clone();
        out
    }

    /// Writes `<stem>.bin` (column-major `(re, im)` little-endian f64 pairs)
    /// and `<stem>.json` (dimensions, basis hash, weight, degree cap and the
    /// basis indices of the stored rows and columns).
    pub fn export(&self, stem: &Path) -> Result<()> {
        let mut bin = std::io::BufWriter::new(std::fs::File::create(stem.with_extension("bin"))?);
        for j in 0..self.data.ncols() {
            for i in 0..self.data.nrows() {
                let c = self.data[(i, j)];
                bin.write_all(&c.re.to_le_bytes())?;
                bin.write_all(&c.im.to_le_bytes())?;
            }
        }
        bin.flush()?;
        let header = MatrixHeader {
            rows: self.data.nrows(),
            cols: self.data.ncols(),
            basis_hash: &self.basis_hash,
            gamma: self.gamma,
            d: self.degree_cap,
            row_indices: &self.rows,
            col_indices: &self.cols,
        };
        std::fs::write(stem.with_extension("json"), serde_json::to_string_pretty(&header)?)?;
        Ok(())
    }
}

/// Reads back a matrix written by [`OperatorMatrix::export`] as
/// `(rows, cols, data)`.
pub fn read_exported(stem: &Path) -> Result<(Vec<usize>, Vec<usize>, DMatrix<C64>)> {
    let header: serde_json::Value = serde_json::from_slice(&std::fs::read(stem.with_extension("json"))?)?;
    let idx = |key: &str| -> Result<Vec<usize>> {
        header[key]
            .as_array()
            .ok_or_else(|| Error::Numerical(format!("missing {key} in matrix header")))?
            .iter()
            .map(|v| v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Numerical(format!("bad {key}"))))
            .collect()
    };
    let (rows, cols) = (idx("row_indices")?, idx("col_indices")?);
    let bytes = std::fs::read(stem.with_extension("bin"))?;
    if bytes.len() != rows.len() * cols.len() * 16 {
        return Err(Error::Numerical("matrix payload size does not match header".into()));
    }
    let f = |k: usize| f64::from_le_bytes(bytes[8 * k..8 * k + 8].try_into().expect("8 bytes"));
    let data = DMatrix::from_fn(rows.len(), cols.len(), |i, j| {
        let k = 2 * (j * rows.len() + i);
        C64::new(f(k), f(k + 1))
    });
    Ok((rows, cols, data))
}

/// `P` on the truncated space.
pub fn projection_matrix(basis: &TruncatedBasis) -> OperatorMatrix {
    let all: Vec<usize> = (0..basis.dim()).collect();
    let mut out = OperatorMatrix::empty_like(basis, all.clone(), all);
    for i in basis.holomorphic_indices() {
        out.data[(i, i)] = C64::new(1.0, 0.0);
    }
    out
}

fn require_disc(f: &Symbol) -> Result<()> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch(f.dim(), 1));
    }
    Ok(())
}

/// Images of the given basis columns under `M_f`, restricted to rows
/// accepted by `keep_row`. Returns the sorted row set, the block and the
/// dropped mass per column.
fn multiplication_block(
    basis: &TruncatedBasis,
    f: &Symbol,
    cols: &[usize],
    keep_row: impl Fn(usize) -> bool,
) -> Result<OperatorMatrix> {
    require_disc(f)?;
    let d = basis.d as i64;
    let gamma = basis.gamma;
    let terms: Vec<(i64, u32, u32, C64)> =
        f.terms().map(|(e, c)| (e.a[0] as i64 - e.b[0] as i64, e.a[0].min(e.b[0]), e.s, *c)).collect();
    let max_deg = f.terms().map(|(e, _)| e.a[0] + e.b[0] + e.s).max().unwrap_or(0) as usize;
    // u^A (1−u)^σ p_k p_l with A ≤ deg f + 2D and degrees ≤ D each.
    let nodes_needed = (max_deg + 4 * basis.d) / 2 + 2;
    let rule = gauss_jacobi_unit(nodes_needed, 0.0, gamma);
    let tables: Vec<DMatrix<f64>> =
        (0..=basis.d).map(|absq| basis.radial_table(absq, basis.d + 1 - absq, &rule.nodes)).collect();
    let table = |q: i64| &tables[q.unsigned_abs() as usize];

    // Column images as sparse maps row -> value.
    let mut images: Vec<std::collections::BTreeMap<usize, C64>> = vec![Default::default(); cols.len()];
    let mut norms = vec![0.0; cols.len()];
    for (j, &col) in cols.iter().enumerate() {
        let (q, k) = basis.label(col);
        let tq = table(q);
        for &(c, low, sigma, coef) in &terms {
            let qt = q + c;
            if qt.abs() > d {
                continue;
            }
            // z^{q+} z̄^{q−} · z^{c+} z̄^{c−} |z|^{2 low} · conj(z^{qt+} z̄^{qt−}) = |z|^{2A}.
            let big_a = aligned_power(q, c, qt, low);
            let tt = table(qt);
            for l in 0..basis.sector_len(qt) {
                let row = basis.index(qt, l);
                let mut acc = 0.0;
                for (i, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    acc += w * u.powi(big_a) * (1.0 - u).powi(sigma as i32) * tq[(i, k)] * tt[(i, l)];
                }
                *images[j].entry(row).or_insert(ZERO) += coef * (gamma + 1.0) * acc;
            }
        }
        // ‖f e‖² from pairs of terms of equal charge.
        let mut nsq = 0.0;
        for &(c1, low1, s1, k1) in &terms {
            for &(c2, low2, s2, k2) in &terms {
                if c1 != c2 {
                    continue;
                }
                let power = (q.unsigned_abs() + c1.unsigned_abs()) as i32 + low1 as i32 + low2 as i32;
                let mut acc = 0.0;
                for (i, (&u, &w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
                    acc += w * u.powi(power) * (1.0 - u).powi((s1 + s2) as i32) * tq[(i, k)] * tq[(i, k)];
                }
                nsq += (k1 * k2.conj()).re * (gamma + 1.0) * acc;
            }
        }
        norms[j] = nsq;
    }

    let mut rows: Vec<usize> = images.iter().flat_map(|m| m.keys().copied()).filter(|&r| keep_row(r)).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut out = OperatorMatrix::empty_like(basis, rows, cols.to_vec());
    for (j, img) in images.iter().enumerate() {
        let mut total = 0.0;
        for (&r, &v) in img {
            total += v.norm_sqr();
            if let Ok(i) = out.rows.binary_search(&r) {
                out.data[(i, j)] = v;
            }
        }
        out.dropped_mass[j] = (norms[j] - total).max(0.0);
    }
    Ok(out)
}

/// Exponent `A` with `z^{q+} z̄^{q−} · z^{c+} z̄^{c−} |z|^{2·low} · conj(z^{t+} z̄^{t−}) = |z|^{2A}`
/// where `t = q + c`.
fn aligned_power(q: i64, c: i64, t: i64, low: u32) -> i32 {
    (q.max(0) + c.max(0) + (-t).max(0)) as i32 + low as i32
}

/// `M_f` on the whole truncated space.
pub fn multiplication_matrix(basis: &TruncatedBasis, f: &Symbol) -> Result<OperatorMatrix> {
    let all: Vec<usize> = (0..basis.dim()).collect();
    let mut m = multiplication_block(basis, f, &all, |_| true)?;
    // Report every row so the matrix is square.
    if m.rows.len() != all.len() {
        let mut full = OperatorMatrix::empty_like(basis, all.clone(), all);
        for (i, &r) in m.rows.iter().enumerate() {
            for j in 0..m.cols.len() {
                full.data[(r, j)] = m.data[(i, j)];
            }
        }
        full.dropped_mass = m.dropped_mass;
        m = full;
    }
    Ok(m)
}

/// `H_f = (I − P) M_f P`, stored on its nonzero rows and the holomorphic
/// columns only.
pub fn hankel_matrix(basis: &TruncatedBasis, f: &Symbol) -> Result<OperatorMatrix> {
    let cols = basis.holomorphic_indices();
    let m = multiplication_block(basis, f, &cols, |r| !basis.is_holomorphic(r))?;
    Ok(m.compress_rows())
}

/// `[M_f, P]` computed as `M_f P − P M_f` on the whole truncated space.
pub fn commutator_matrix(basis: &TruncatedBasis, f: &Symbol) -> Result<OperatorMatrix> {
    let m = multiplication_matrix(basis, f)?;
    let p = projection_matrix(basis);
    Ok(m.mul(&p).sub(&p.mul(&m)))
}

/// Largest entry of `[M_f, P] − (H_f − H_{f̄}*)`.
pub fn commutator_identity_defect(basis: &TruncatedBasis, f: &Symbol) -> Result<f64> {
    let lhs = commutator_matrix(basis, f)?;
    let rhs = hankel_matrix(basis, f)?.sub(&hankel_matrix(basis, &f.conj())?.adjoint());
    Ok(lhs.sub(&rhs).max_abs())
}

/// `P f` for a polynomial symbol: `P(z^α z̄^β) = (m_α / m_{α−β}) z^{α−β}`
/// when `β ≤ α`, and zero otherwise.
pub fn project_symbol(f: &Symbol, gamma: f64) -> Symbol {
    let n = f.dim();
    let mut out = Symbol::zero(n);
    for (e, c) in f.expand_defect().terms() {
        if e.a.iter().zip(&e.b).any(|(a, b)| b > a) {
            continue;
        }
        let diff: Vec<u32> = e.a.iter().zip(&e.b).map(|(a, b)| a - b).collect();
        let ratio = moment_multi(&e.a, gamma) / moment_multi(&diff, gamma);
        let term = Symbol::monomial(diff, vec![0; n], 0, c * ratio).expect("valid multi-index");
        out = out.add(&term);
    }
    out
}

/// Singular values in descending order.
pub fn singular_values(t: &DMatrix<C64>) -> Result<Vec<f64>> {
    if t.is_empty() {
        return Ok(Vec::new());
    }
    let svd = t.clone().try_svd(false, false, f64::EPSILON, 100_000).ok_or_else(|| {
        let fro = t.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let dump = if t.len() <= 400 { format!("{t:?}") } else { String::from("(too large to print)") };
        Error::Numerical(format!(
            "SVD did not converge for a {}x{} matrix with Frobenius norm {fro:.6e}: {dump}",
            t.nrows(),
            t.ncols()
        ))
    })?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `Σ s^p` over the given singular values.
pub fn schatten_sum(values: &[f64], p: f64) -> f64 {
    values.iter().map(|s| s.powf(p)).sum()
}

/// `(Σ s^p)^{1/p}`.
pub fn schatten_norm(values: &[f64], p: f64) -> f64 {
    schatten_sum(values, p).powf(1.0 / p)
}

/// Comparison of `‖T‖_{S_p}^p` with `Σ |t_jk|^p` for `0 < p ≤ 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntrywiseBound {
    pub p: f64,
    pub schatten: f64,
    pub entrywise: f64,
    /// `entrywise − schatten`; nonnegative when the bound holds.
    pub slack: f64,
}

pub fn entrywise_schatten_check(t: &DMatrix<C64>, p: f64) -> Result<EntrywiseBound> {
    if !(p > 0.0 && p <= 2.0) {
        return Err(Error::Domain(format!("the entrywise bound needs 0 < p ≤ 2, got {p}")));
    }
    let schatten = schatten_sum(&singular_values(t)?, p);
    let entrywise: f64 = t.iter().map(|c| c.norm().powf(p)).sum();
    Ok(EntrywiseBound { p, schatten, entrywise, slack: entrywise - schatten })
}

// Exact spectra of single-charge Hankel operators.

/// `(1 − v)^e v^σ` expanded in powers of `v`, accumulated into `out`.
fn add_expansion(out: &mut Vec<C64>, e: u32, sigma: u32, coef: C64) {
    let need = (e + sigma) as usize + 1;
    if out.len() < need {
        out.resize(need, ZERO);
    }
    let mut binom = 1.0;
    for j in 0..=e {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out[(j + sigma) as usize] += coef * sign * binom;
        binom = binom * (e - j) as f64 / (j + 1) as f64;
    }
}

/// `ln E[v^j]` for `v ~ Beta(γ+1, x+1)`.
fn ln_v_moment(j: usize, x: f64, gamma: f64) -> f64 {
    (0..j).map(|i| ((gamma + 1.0 + i as f64) / (x + gamma + 2.0 + i as f64)).ln()).sum()
}

/// `Cov(v^j, v^l)` for `v ~ Beta(γ+1, x+1)`, without cancellation.
fn v_covariance(j: usize, l: usize, x: f64, gamma: f64) -> f64 {
    let ln_r: f64 = (0..l)
        .map(|i| {
            let i = i as f64;
            (j as f64 / (gamma + 1.0 + i)).ln_1p() - (j as f64 / (x + gamma + 2.0 + i)).ln_1p()
        })
        .sum();
    (ln_v_moment(j, x, gamma) + ln_v_moment(l, x, gamma)).exp() * ln_r.exp_m1()
}

/// Polynomial in `v = 1 − u` with `f e_k ∝ z^{k+c} g(u)` (or `z̄^{…}`), and
/// the charge `c`.
fn radial_profile(f: &Symbol, conj_shift: bool) -> Result<(i64, Vec<C64>)> {
    require_disc(f)?;
    let c = f
        .single_charge()
        .ok_or_else(|| Error::Domain("exact spectra need a symbol with a single charge a − b".into()))?;
    let mut g = Vec::new();
    for (e, coef) in f.terms() {
        let low = e.a[0].min(e.b[0]);
        let extra = if conj_shift { (-c).max(0) as u32 } else { 0 };
        add_expansion(&mut g, low + extra, e.s, *coef);
    }
    Ok((c, g))
}

/// `ln(m_{k+c} / m_k)` for real `k`.
fn ln_moment_ratio(k: f64, c: f64, gamma: f64) -> f64 {
    ln_gamma_ratio(k, c + 1.0, 1.0) - ln_gamma_ratio(k, c + gamma + 2.0, gamma + 2.0)
}

/// `‖H_f (z^k/√m_k)‖` for a single-charge symbol and real `k ≥ 0`.
pub fn hankel_singular_value(f: &Symbol, gamma: f64, k: f64) -> Result<f64> {
    let (c, g) = radial_profile(f, true)?;
    let cf = c as f64;
    if k + cf < 0.0 {
        // The image lies in a negative sector, orthogonal to the
        // holomorphic functions.
        let (_, gg) = radial_profile(f, false)?;
        let x = k + cf.abs();
        let mut acc = 0.0;
        for (j, a) in gg.iter().enumerate() {
            for (l, b) in gg.iter().enumerate() {
                acc += (a * b.conj()).re * ln_v_moment(j + l, x, gamma).exp();
            }
        }
        return Ok((ln_moment_ratio(k, cf.abs(), gamma).exp() * acc).max(0.0).sqrt());
    }
    let x = k + cf;
    let mut var = 0.0;
    for (j, a) in g.iter().enumerate().skip(1) {
        for (l, b) in g.iter().enumerate().skip(1) {
            var += (a * b.conj()).re * v_covariance(j, l, x, gamma);
        }
    }
    Ok((ln_moment_ratio(k, cf, gamma).exp() * var).max(0.0).sqrt())
}

/// `s_a(H_{z̄}) = ((1+γ)/((a+1+γ)(a+2+γ)))^{1/2}`, `a = 0..count`.
pub fn hankel_zbar_spectrum_exact(gamma: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|a| {
            let a = a as f64;
            ((1.0 + gamma) / ((a + 1.0 + gamma) * (a + 2.0 + gamma))).sqrt()
        })
        .collect()
}

/// Singular values of `[M_f, P]` for a single-charge symbol: the union of
/// the spectra of `H_f` and `H_{f̄}`, first `count` of each, sorted
/// descending.
pub fn commutator_spectrum_exact(f: &Symbol, gamma: f64, count: usize) -> Result<Vec<f64>> {
    let fc = f.conj();
    let mut out = Vec::with_capacity(2 * count);
    for k in 0..count {
        out.push(hankel_singular_value(f, gamma, k as f64)?);
        out.push(hankel_singular_value(&fc, gamma, k as f64)?);
    }
    out.retain(|&s| s > 0.0);
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

const EXACT_TERMS: f64 = 4096.0;

/// `Σ_{k < kmax} (s_k(H_f)^p + s_k(H_{f̄})^p)` for a single-charge symbol.
/// Terms below 4096 are summed exactly; the tail is a midpoint-rule
/// integral over geometric panels.
pub fn commutator_schatten_partial_sum(f: &Symbol, gamma: f64, p: f64, kmax: f64) -> Result<f64> {
    let fc = f.conj();
    let term = |k: f64| -> Result<f64> {
        Ok(hankel_singular_value(f, gamma, k)?.powf(p) + hankel_singular_value(&fc, gamma, k)?.powf(p))
    };
    let exact_to = kmax.min(EXACT_TERMS).ceil() as usize;
    let mut sum = 0.0;
    for k in 0..exact_to {
        sum += term(k as f64)?;
    }
    if kmax <= EXACT_TERMS {
        return Ok(sum);
    }
    let rule = gauss_legendre_unit(16);
    let (mut lo, hi) = (EXACT_TERMS - 0.5, kmax - 0.5);
    while lo < hi {
        let up = (2.0 * lo).min(hi);
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            sum += w * (up - lo) * term(lo + x * (up - lo))?;
        }
        lo = up;
    }
    Ok(sum)
}

/// Schatten ladder `A_k = 2^{2^k}`.
pub fn schatten_ladder(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| 2f64.powf(2f64.powi(k as i32))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_layout_and_orthonormality() {
        let b = TruncatedBasis::new(8, 0.0).unwrap();
        assert_eq!(b.dim(), 81);
        assert_eq!(b.label(b.index(-3, 2)), (-3, 2));
        assert_eq!(b.holomorphic_indices().len(), 9);
        assert!(b.orthonormality_defect() < 1e-13);
        // Against exact monomial inner products.
        let gamma = 1.5;
        // Monomial expansions cancel beyond small degrees; larger D is
        // covered by the Gauss-rule defect below.
        let b = TruncatedBasis::new(4, gamma).unwrap();
        let vs: Vec<Symbol> = (0..b.dim()).map(|i| b.vector_symbol(i)).collect();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let mut g = ZERO;
                for (e1, c1) in vs[i].terms() {
                    for (e2, c2) in vs[j].terms() {
                        g += c1 * c2.conj() * crate::measure::monomial_inner(e1.a[0], e1.b[0], e2.a[0], e2.b[0], gamma);
                    }
                }
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((g - target).norm() < 1e-12, "{i} {j} {g}");
            }
        }
        for d in [32, 128] {
            assert!(TruncatedBasis::new(d, 2.0).unwrap().orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn projection_rule() {
        let g = 0.0;
        let f = Symbol::disc_monomial(3, 1, 0, C64::new(1.0, 0.0));
        let p = project_symbol(&f, g);
        let expected = Symbol::disc_monomial(2, 0, 0, C64::new(moment(3, g) / moment(2, g), 0.0));
        assert_eq!(p, expected);
        assert!(project_symbol(&Symbol::zbar(), g).is_zero());
    }

    #[test]
    fn hankel_of_zbar_on_z() {
        // ‖H_{z̄}(z/√m_1)‖ = 1/√6 at γ = 0.
        let b = TruncatedBasis::new(6, 0.0).unwrap();
        let h = hankel_matrix(&b, &Symbol::zbar()).unwrap();
        let col = h.cols.iter().position(|&c| c == b.index(1, 0)).unwrap();
        let norm = h.data.column(col).norm();
        assert!((norm - 1.0 / 6f64.sqrt()).abs() < 1e-13);
        assert!((hankel_singular_value(&Symbol::zbar(), 0.0, 1.0).unwrap() - 1.0 / 6f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn structural_identities() {
        let b = TruncatedBasis::new(6, 2.5).unwrap();
        let p = projection_matrix(&b);
        assert!(p.mul(&p).sub(&p).max_abs() < 1e-15);
        assert!(p.sub(&p.adjoint()).max_abs() < 1e-15);
        let f = Symbol::disc_monomial(2, 1, 0, C64::new(1.0, -0.5)).add(&Symbol::z());
        assert!(commutator_identity_defect(&b, &f).unwrap() < 1e-12);
    }

    #[test]
    fn exact_spectra() {
        for gamma in [0.0, 2.0] {
            let b = TruncatedBasis::new(24, gamma).unwrap();
            let s = singular_values(&hankel_matrix(&b, &Symbol::zbar()).unwrap().data).unwrap();
            let exact = hankel_zbar_spectrum_exact(gamma, 24);
            for a in 0..20 {
                assert!((s[a] - exact[a]).abs() < 1e-10 * exact[a], "{a} {} {}", s[a], exact[a]);
            }
            let f = Symbol::disc_monomial(2, 1, 0, C64::new(1.0, 0.0));
            let s = singular_values(&hankel_matrix(&b, &f).unwrap().data).unwrap();
            let mut e: Vec<f64> = (0..25).map(|k| hankel_singular_value(&f, gamma, k as f64).unwrap()).collect();
            e.sort_by(|a, b| b.total_cmp(a));
            for a in 0..12 {
                assert!((s[a] - e[a]).abs() < 1e-10 * e[a].max(1e-3), "{a} {} {}", s[a], e[a]);
            }
            let f = Symbol::disc_monomial(0, 1, 4, C64::new(1.0, 0.0));
            let s = singular_values(&hankel_matrix(&b, &f).unwrap().data).unwrap();
            let mut e: Vec<f64> = (0..25).map(|k| hankel_singular_value(&f, gamma, k as f64).unwrap()).collect();
            e.sort_by(|a, b| b.total_cmp(a));
            for a in 0..8 {
                assert!((s[a] - e[a]).abs() < 1e-10 * e[a], "{a} {} {}", s[a], e[a]);
            }
        }
    }

    #[test]
    fn entrywise_bound() {
        let t = DMatrix::from_fn(4, 3, |i, j| C64::new((i + 2 * j) as f64 - 2.0, (i * j) as f64 * 0.3));
        for p in [0.5, 1.0, 2.0] {
            assert!(entrywise_schatten_check(&t, p).unwrap().slack >= -1e-10);
        }
        assert!((entrywise_schatten_check(&t, 2.0).unwrap().slack).abs() < 1e-10);
        assert!(entrywise_schatten_check(&t, 3.0).is_err());
    }

    #[test]
    fn partial_sums_and_export() {
        let f = Symbol::zbar();
        let direct: f64 = hankel_zbar_spectrum_exact(0.0, 10_000).iter().map(|s| s.powf(1.5)).sum();
        let fast = commutator_schatten_partial_sum(&f, 0.0, 1.5, 10_000.0).unwrap();
        assert!((direct - fast).abs() < 1e-9 * direct);
        let b = TruncatedBasis::new(4, 1.0).unwrap();
        let h = hankel_matrix(&b, &f).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("h");
        h.export(&stem).unwrap();
        let (rows, cols, data) = read_exported(&stem).unwrap();
        assert_eq!((rows, cols), (h.rows.clone(), h.cols.clone()));
        assert_eq!(data, h.data);
    }
}
