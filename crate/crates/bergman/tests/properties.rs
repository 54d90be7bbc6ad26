//! Invariants under random inputs.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bergman::geometry::{bergman_distance, mobius_map, random_point};
use bergman::kernels::mean_oscillation;
use bergman::operator::{entrywise_schatten_check, schatten_sum, singular_values};
use bergman::polar::PolarPoint;
use bergman::symbol::Symbol;
use bergman::tree::BergmanTree;

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mobius_preserves_distance(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, z, w) = (random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0));
        let before = bergman_distance(&z, &w).unwrap();
        let after = bergman_distance(&mobius_map(&a, &z).unwrap(), &mobius_map(&a, &w).unwrap()).unwrap();
        prop_assert!((before - after).abs() <= 1e-10 * before.max(1.0));
    }

    #[test]
    fn mobius_is_an_involution(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (z, w) = (random_point(&mut rng, n, 3.0), random_point(&mut rng, n, 3.0));
        let back = mobius_map(&z, &mobius_map(&z, &w).unwrap()).unwrap();
        let err: f64 = back.coords().iter().zip(w.coords()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-10);
    }

    #[test]
    fn distance_is_a_metric(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_point(&mut rng, n, 2.0), random_point(&mut rng, n, 2.0), random_point(&mut rng, n, 2.0));
        let (xy, yx) = (bergman_distance(&x, &y).unwrap(), bergman_distance(&y, &x).unwrap());
        prop_assert!((xy - yx).abs() <= 1e-12);
        let via = xy + bergman_distance(&y, &z).unwrap();
        prop_assert!(bergman_distance(&x, &z).unwrap() <= via + 1e-10);
    }

    /// `‖A + B‖_p^p ≤ ‖A‖_p^p + ‖B‖_p^p` for `p ≤ 1`.
    #[test]
    fn schatten_p_triangle(seed in any::<u64>(), dim in 1usize..=12, p in 0.2f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, dim, dim);
        let b = random_matrix(&mut rng, dim, dim);
        let sum = schatten_sum(&singular_values(&(&a + &b)).unwrap(), p);
        let parts = schatten_sum(&singular_values(&a).unwrap(), p) + schatten_sum(&singular_values(&b).unwrap(), p);
        prop_assert!(sum <= parts * (1.0 + 1e-10));
    }

    #[test]
    fn entrywise_bound_holds(seed in any::<u64>(), rows in 1usize..=10, cols in 1usize..=10, p in 0.1f64..=2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_matrix(&mut rng, rows, cols);
        prop_assert!(entrywise_schatten_check(&t, p).unwrap().slack >= -1e-10);
    }

    #[test]
    fn mean_oscillation_ignores_constants(seed in any::<u64>(), gamma in 0.0f64..3.0, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_point(&mut rng, 1, 2.0);
        let f = Symbol::disc_monomial(2, 1, 0, C64::new(1.0, 0.5)).add(&Symbol::zbar());
        let c = C64::new(re, im);
        let base = mean_oscillation(&f, &z, gamma).unwrap();
        let shifted = mean_oscillation(&f.add_constant(c), &z, gamma).unwrap();
        let scaled = mean_oscillation(&f.scale(c), &z, gamma).unwrap();
        prop_assert!((base - shifted).abs() <= 1e-9 * base.max(1.0));
        prop_assert!((scaled - c.norm() * base).abs() <= 1e-9 * scaled.max(1.0));
    }

    #[test]
    fn dyadic_cells_contain_located_points(s in 1e-4f64..1.0, t in 0.0f64..1.0) {
        let tree = BergmanTree::dyadic(2, 8).unwrap();
        let p = PolarPoint::new(s, t);
        if let Ok(id) = tree.locate_polar(&p) {
            prop_assert!(tree.cell_box(id).unwrap().contains(&p.to_ball()));
        }
    }
}

#[test]
fn every_center_locates_home() {
    let tree = BergmanTree::dyadic(1, 8).unwrap();
    for id in 0..tree.len() {
        assert_eq!(tree.locate(&tree.center(id)).unwrap(), id);
    }
    let ball = BergmanTree::generic(2, std::f64::consts::LN_2 / 2.0, 3, 7).unwrap();
    for id in 0..ball.len() {
        assert_eq!(ball.locate(&ball.center(id)).unwrap(), id);
    }
}
