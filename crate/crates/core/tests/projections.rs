mod common;

use proptest::prelude::*;

use common::{simplex_projection_oracle, v};
use fracpga::projection::{project_band, project_simplex};
use fracpga::{Band, Projection, Simplex};

fn vectors(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..=max_len)
}

proptest! {
    #[test]
    fn simplex_output_is_feasible(x in vectors(40)) {
        let p = project_simplex(&v(&x)).unwrap();
        prop_assert!(p.iter().all(|&u| u >= 0.0));
        prop_assert!((p.sum() - 1.0).abs() <= 1e-12);
        prop_assert!(Simplex.contains(&p, 1e-12));
    }

    #[test]
    fn simplex_matches_support_enumeration(x in vectors(10)) {
        let p = project_simplex(&v(&x)).unwrap();
        let oracle = simplex_projection_oracle(&x);
        for (a, b) in p.iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-9, "{:?} vs {:?}", p, oracle);
        }
    }

    #[test]
    fn simplex_is_idempotent(x in vectors(30)) {
        let once = project_simplex(&v(&x)).unwrap();
        let twice = project_simplex(&once).unwrap();
        prop_assert!(once.distance(&twice).unwrap() <= 1e-12);
    }

    #[test]
    fn simplex_is_nonexpansive(pair in (1usize..25).prop_flat_map(|n| (
        prop::collection::vec(-10.0..10.0f64, n),
        prop::collection::vec(-10.0..10.0f64, n),
    ))) {
        let (x, y) = pair;
        let (x, y) = (v(&x), v(&y));
        let px = project_simplex(&x).unwrap();
        let py = project_simplex(&y).unwrap();
        prop_assert!(px.distance(&py).unwrap() <= x.distance(&y).unwrap() + 1e-12);
    }

    #[test]
    fn simplex_commutes_with_permutations(x in vectors(20), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..x.len()).collect();
        perm.shuffle(&mut common::rng(seed));
        let permuted: Vec<f64> = perm.iter().map(|&i| x[i]).collect();
        let p = project_simplex(&v(&x)).unwrap();
        let pp = project_simplex(&v(&permuted)).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((pp[k] - p[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn simplex_fixes_feasible_points(x in vectors(20)) {
        let point = project_simplex(&v(&x)).unwrap();
        let again = project_simplex(&point).unwrap();
        prop_assert!(point.distance(&again).unwrap() <= 1e-12);
    }

    #[test]
    fn band_clamps_second_coordinate(x1 in -1e3..1e3f64, x2 in -1e3..1e3f64, a0 in 0.1..500.0f64) {
        let p = project_band(&v(&[x1, x2]), a0).unwrap();
        prop_assert_eq!(p[0], x1);
        prop_assert_eq!(p[1], x2.clamp(-a0, a0));
        let band = Band::new(a0).unwrap();
        prop_assert!(band.contains(&p, 0.0));
        prop_assert_eq!(band.project(&p).unwrap(), p);
    }
}

#[test]
fn simplex_examples() {
    assert_eq!(
        project_simplex(&v(&[0.5, 0.5])).unwrap().as_slice(),
        &[0.5, 0.5]
    );
    assert_eq!(
        project_simplex(&v(&[2.0, 0.0])).unwrap().as_slice(),
        &[1.0, 0.0]
    );
    let p = project_simplex(&v(&[0.0, 0.0, 0.0])).unwrap();
    assert!(p.iter().all(|&u| (u - 1.0 / 3.0).abs() < 1e-15));
}

#[test]
fn band_rejects_bad_input() {
    assert!(project_band(&v(&[1.0, 2.0]), 0.0).is_err());
    assert!(project_band(&v(&[1.0, 2.0, 3.0]), 1.0).is_err());
}
