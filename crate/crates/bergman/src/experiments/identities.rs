//! Exact identities of the geometry, the operator model and the mean
//! oscillation, checked against closed forms.

use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::ExperimentConfig;
use super::report::{Report, Table};
use crate::error::Result;
use crate::geometry::{bergman_distance, herm_dot, mobius_map, random_point, BallPoint};
use crate::kernels::{kernel, mean_oscillation_polar, mo_floor_check, mo_zbar_closed_form};
use crate::measure::{integrate, QuadratureSpec, Region, WeightedMeasure};
use crate::operator::{
    commutator_identity_defect, commutator_spectrum_exact, hankel_matrix, hankel_zbar_spectrum_exact,
    multiplication_matrix, projection_matrix, singular_values, TruncatedBasis,
};
use crate::polar::PolarPoint;
use crate::symbol::Symbol;

type C64 = Complex64;

const GEOMETRY_SAMPLES: usize = 1000;
/// Bergman radius of the random sample points.
const SAMPLE_RADIUS: f64 = 3.0;

/// Möbius invariance of `d` and `1 − |φ_z(w)|² = (1−|z|²)(1−|w|²)/|1 − w·z|²`
/// on random points for `n = 1, 2, 3`.
pub fn geometry_identities(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("geometry-identities", cfg);
    let mut t = Table::new("dimensions", &["n", "samples", "max_invariance_error", "max_defect_identity_error"]);
    for n in 1..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(n as u64));
        let (mut inv, mut ident) = (0.0f64, 0.0f64);
        for _ in 0..GEOMETRY_SAMPLES {
            let a = random_point(&mut rng, n, SAMPLE_RADIUS);
            let z = random_point(&mut rng, n, SAMPLE_RADIUS);
            let w = random_point(&mut rng, n, SAMPLE_RADIUS);
            let d = bergman_distance(&z, &w)?;
            let moved = bergman_distance(&mobius_map(&a, &z)?, &mobius_map(&a, &w)?)?;
            inv = inv.max((d - moved).abs());
            let phi = mobius_map(&z, &w)?;
            let lhs = 1.0 - phi.coords().iter().map(|c| c.norm_sqr()).sum::<f64>();
            let rhs = (1.0 - z.norm_sq()) * (1.0 - w.norm_sq()) / (1.0 - herm_dot(&w, &z)?).norm_sqr();
            ident = ident.max((lhs - rhs).abs());
        }
        t.push(&[n as f64, GEOMETRY_SAMPLES as f64, inv, ident]);
        r.check_le(format!("mobius_invariance_n{n}"), inv, 1e-10);
        r.check_le(format!("defect_identity_n{n}"), ident, 1e-10);
    }
    r.tables.push(t);
    Ok(r)
}

fn test_symbols() -> Vec<(&'static str, Symbol)> {
    let one = C64::new(1.0, 0.0);
    vec![
        ("zbar", Symbol::zbar()),
        ("z2_zbar", Symbol::disc_monomial(2, 1, 0, one)),
        ("zbar_defect4", Symbol::disc_monomial(0, 1, 4, one)),
        ("defect2", Symbol::disc_monomial(0, 0, 2, one)),
        ("mixed", Symbol::disc_monomial(3, 1, 0, C64::new(0.5, -1.0)).add(&Symbol::z()).add(&Symbol::zbar())),
    ]
}

fn holomorphic_test_polynomials() -> Vec<Symbol> {
    let mut out: Vec<Symbol> = (0..=8).map(|k| Symbol::disc_monomial(k, 0, 0, C64::new(1.0, 0.0))).collect();
    let mut g = Symbol::zero(1);
    for k in 0..=8u32 {
        g = g.add(&Symbol::disc_monomial(k, 0, 0, C64::new(1.0 / (k + 1) as f64, 0.5 - k as f64 / 8.0)));
    }
    out.push(g);
    out
}

/// Projection, reproducing property and the commutator identity on the
/// degree-32 model for `γ ∈ {0, 1, 2.5}`.
pub fn operator_identities(cfg: &ExperimentConfig) -> Result<Report> {
    const D: usize = 32;
    let mut r = Report::new("operator-identities", cfg);
    let mut t = Table::new(
        "weights",
        &["gamma", "idempotence", "self_adjointness", "reproducing", "kernel_reproducing", "commutator_identity"],
    );
    let kernel_q = QuadratureSpec { radial_order: 48, angular_order: 64, ..Default::default() };
    let probes = [BallPoint::disc(0.3, -0.2)?, BallPoint::disc(-0.1, 0.55)?, BallPoint::origin(1)];
    for gamma in [0.0, 1.0, 2.5] {
        let basis = TruncatedBasis::new(D, gamma)?;
        let p = projection_matrix(&basis);
        let idem = p.mul(&p).sub(&p).max_abs();
        let adj = p.sub(&p.adjoint()).max_abs();
        // P(g h) = g h for holomorphic g, h: multiplication keeps the
        // holomorphic columns inside the range of P.
        let mut repro: f64 = 0.0;
        for g in holomorphic_test_polynomials() {
            let h = hankel_matrix(&basis, &g)?;
            repro = repro.max(h.max_abs());
            let m = multiplication_matrix(&basis, &g)?;
            let pm = p.mul(&m.mul(&p));
            repro = repro.max(pm.sub(&m.mul(&p)).max_abs());
        }
        // ∫ g(w) K(z, w) dv_γ(w) = g(z).
        let mut kernel_repro: f64 = 0.0;
        let measure = WeightedMeasure::new(1, gamma)?;
        for g in holomorphic_test_polynomials() {
            for z in &probes {
                let v = integrate(
                    |w| g.eval(w) * kernel(z, w, gamma).unwrap_or(C64::new(f64::NAN, f64::NAN)),
                    &Region::Ball { eps: 0.0 },
                    &measure,
                    &kernel_q,
                )?;
                kernel_repro = kernel_repro.max((v.value - g.eval(z)).norm());
            }
        }
        let mut comm: f64 = 0.0;
        for (_, f) in test_symbols() {
            comm = comm.max(commutator_identity_defect(&basis, &f)?);
        }
        t.push(&[gamma, idem, adj, repro, kernel_repro, comm]);
        r.check_le(format!("projection_idempotent_g{gamma}"), idem, 1e-12);
        r.check_le(format!("projection_self_adjoint_g{gamma}"), adj, 1e-12);
        r.check_le(format!("reproducing_g{gamma}"), repro, 1e-12);
        r.check_le(format!("kernel_reproducing_g{gamma}"), kernel_repro, 1e-12);
        r.check_le(format!("commutator_identity_g{gamma}"), comm, 1e-12);
    }
    r.tables.push(t);
    Ok(r)
}

/// Singular values of the truncated `H_{z̄}` against the closed form.
pub fn hankel_spectrum(cfg: &ExperimentConfig) -> Result<Report> {
    let d = cfg.degree_cap;
    let count = 51.min(d / 2);
    let mut r = Report::new("hankel-spectrum", cfg);
    let mut t = Table::new("values", &["gamma", "a", "numeric", "exact"]);
    for gamma in [0.0, 2.0] {
        let basis = TruncatedBasis::new(d, gamma)?;
        let s = singular_values(&hankel_matrix(&basis, &Symbol::zbar())?.data)?;
        let exact = hankel_zbar_spectrum_exact(gamma, count);
        let mut worst: f64 = 0.0;
        for (a, e) in exact.iter().enumerate() {
            worst = worst.max((s[a] - e).abs());
            t.push(&[gamma, a as f64, s[a], *e]);
        }
        r.constant(format!("max_error_g{gamma}"), worst);
        r.check_le(format!("zbar_spectrum_g{gamma}"), worst, 1e-8);
    }
    r.tables.push(t);
    Ok(r)
}

/// Mean oscillation of `z̄` at `γ = 0` by quadrature against its closed
/// form, and the lower floor for the configured symbol.
pub fn mo_eval(cfg: &ExperimentConfig) -> Result<Report> {
    let mut r = Report::new("mo-eval", cfg);
    let zbar = Symbol::zbar();
    let mut t = Table::new("zbar", &["radius", "quadrature", "closed_form"]);
    let mut worst: f64 = 0.0;
    for i in 0..=99 {
        let rad = 0.99 * i as f64 / 99.0;
        let s = 1.0 - rad * rad;
        let q = mean_oscillation_polar(&zbar, &PolarPoint::new(s, 0.125), 0.0, 0)?;
        let c = mo_zbar_closed_form(s);
        worst = worst.max((q - c).abs());
        t.push(&[rad, q, c]);
    }
    r.tables.push(t);
    r.constant("max_closed_form_error", worst);
    r.check_le("zbar_closed_form", worst, 1e-6);
    let at0 = mean_oscillation_polar(&zbar, &PolarPoint::origin(), 0.0, 0)?;
    r.check_le("zbar_at_origin", (at0 - 0.5f64.sqrt()).abs(), 1e-9);

    if cfg.n == 1 {
        let f = cfg.symbol()?;
        let mut ft = Table::new("floor", &["radius", "mo", "floor", "margin"]);
        let mut holds = true;
        for i in 0..20 {
            let rad = 0.95 * i as f64 / 19.0;
            let z = BallPoint::disc(rad * 0.6, rad * 0.8)?;
            let c = mo_floor_check(&f, &z, cfg.gamma)?;
            holds &= c.holds;
            ft.push(&[rad, c.lhs, c.rhs, c.margin]);
        }
        r.tables.push(ft);
        r.check("floor_holds", holds, "MO is bounded below by the defect floor");
    }
    Ok(r)
}

/// Spectrum of the degree-`D` commutator model for the configured symbol,
/// with the two Hankel blocks exported when `export` is given.
pub fn op_spectrum(cfg: &ExperimentConfig, export: Option<&Path>) -> Result<Report> {
    cfg.validate()?;
    let f = cfg.symbol()?;
    let mut r = Report::new("op-spectrum", cfg);
    if cfg.n != 1 {
        r.notes.push("the operator model lives in the disc".into());
        r.check("disc_symbol", false, "n must be 1");
        return Ok(r);
    }
    let basis = TruncatedBasis::new(cfg.degree_cap, cfg.gamma)?;
    let h = hankel_matrix(&basis, &f)?;
    let hc = hankel_matrix(&basis, &f.conj())?;
    if let Some(dir) = export {
        std::fs::create_dir_all(dir)?;
        h.export(&dir.join("hankel"))?;
        hc.export(&dir.join("hankel_conj"))?;
    }
    let mut s = singular_values(&h.data)?;
    s.extend(singular_values(&hc.data)?);
    s.sort_by(|a, b| b.total_cmp(a));
    let mut t = Table::new("singular_values", &["index", "numeric", "exact"]);
    let count = 51.min(cfg.degree_cap / 2);
    let exact = if f.single_charge().is_some() {
        let mut e = commutator_spectrum_exact(&f, cfg.gamma, cfg.degree_cap + 1)?;
        e.truncate(count);
        Some(e)
    } else {
        None
    };
    for (i, v) in s.iter().enumerate() {
        let e = exact.as_ref().and_then(|e| e.get(i)).copied().unwrap_or(f64::NAN);
        t.push(&[i as f64, *v, e]);
    }
    r.tables.push(t);
    r.constant("max_dropped_mass", h.max_dropped_mass().max(hc.max_dropped_mass()));
    for &p in &cfg.p_list {
        r.constant(format!("schatten_sum_p{p}"), s.iter().map(|x| x.powf(p)).sum());
    }
    if let Some(e) = exact {
        let worst = e.iter().zip(&s).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r.constant("max_error_vs_exact", worst);
        r.check_le("spectrum_matches_exact", worst, 1e-8);
    }
    if cfg.degree_cap <= 48 {
        let defect = commutator_identity_defect(&basis, &f)?;
        r.check_le("commutator_identity", defect, 1e-12);
    }
    Ok(r)
}
