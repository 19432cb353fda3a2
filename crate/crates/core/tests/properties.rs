use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use symqubit::angular::HalfInt;
use symqubit::fano::{from_tensor, rotate_tensor, to_tensor};
use symqubit::invariants::enumerate;
use symqubit::multiaxial::{decompose, polynomial_of, RankForm};
use symqubit::sampling::{random_density_matrix, random_euler, random_spherical_tensor};
use symqubit::states::{channel_mixed, symmetrize_pure, ChannelParams, Spinor};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_round_trip(seed in any::<u64>(), tj in 1i32..=6) {
        let rho = random_density_matrix(HalfInt::from_twice(tj), &mut rng(seed));
        let t = to_tensor(&rho).unwrap();
        prop_assert!(t.conjugation_defect() < 1e-12);
        prop_assert!(from_tensor(&t).unwrap().max_deviation(&rho) < 1e-12);
    }

    #[test]
    fn rank_norms_survive_rotation(seed in any::<u64>(), tj in 1i32..=6) {
        let mut r = rng(seed);
        let t = to_tensor(&random_density_matrix(HalfInt::from_twice(tj), &mut r)).unwrap();
        let rotated = rotate_tensor(&t, random_euler(&mut r)).unwrap();
        for (a, b) in t.rank_norms().iter().zip(rotated.rank_norms()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_coefficients_are_antisymmetric(seed in any::<u64>(), k in 1usize..=4) {
        let tensor = random_spherical_tensor(k, &mut rng(seed));
        let p = polynomial_of(&tensor).unwrap().unwrap();
        prop_assert!(p.symmetry_defect() < 1e-10 * p.max_coefficient().max(1.0));
    }

    #[test]
    fn decomposition_reconstructs(seed in any::<u64>(), tj in 1i32..=4) {
        let t = to_tensor(&random_density_matrix(HalfInt::from_twice(tj), &mut rng(seed))).unwrap();
        let form = decompose(&t).unwrap();
        prop_assert!(form.reconstruct().unwrap().max_deviation(&t) < 1e-8);
        for rank in &form.ranks {
            prop_assert!(rank.r() >= 0.0);
            let flipped = matches!(rank, RankForm::Axes(a) if a.flipped);
            let n = rank.axes().len();
            for (i, a) in rank.axes().iter().enumerate() {
                let v = a.vector();
                prop_assert!((v.norm() - 1.0).abs() < 1e-12);
                let canonical = if flipped && i + 1 == n { -v.z } else { v.z };
                prop_assert!(canonical >= -1e-12);
            }
        }
    }

    #[test]
    fn pair_values_are_bounded_cosines(seed in any::<u64>(), tj in 1i32..=4) {
        let form = decompose(&to_tensor(&random_density_matrix(HalfInt::from_twice(tj), &mut rng(seed))).unwrap()).unwrap();
        let set = enumerate(&form).unwrap();
        let axes: Vec<_> = form.labeled_axes().map(|(_, a)| *a).collect();
        let mut n = 0;
        for i in 0..axes.len() {
            for j in i + 1..axes.len() {
                let v = set.pairwise[n].value;
                prop_assert!(v.abs() <= 1.0 / 3f64.sqrt() + 1e-15);
                prop_assert!((v + axes[i].dot(&axes[j]) / 3f64.sqrt()).abs() < 1e-12);
                n += 1;
            }
        }
    }

    #[test]
    fn channel_states_are_physical(p in 0.0f64..=1.0, theta in 0.0f64..=PI) {
        let rho = channel_mixed(ChannelParams::equal(p, theta).unwrap()).unwrap();
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-10);
        let t = to_tensor(&rho).unwrap();
        let d = 3.0 + p * p * (2.0 * theta).cos();
        prop_assert!((t.get(1, 0).re - 2.0 * 6f64.sqrt() * p * theta.cos() / d).abs() < 1e-10);
        prop_assert!((t.get(2, 0).re - 2f64.sqrt() * p * p * (1.0 + theta.cos().powi(2)) / d).abs() < 1e-10);
        prop_assert!((t.get(2, 2).norm() - 3f64.sqrt() * p * p * theta.sin().powi(2) / d).abs() < 1e-10);
        for (k, q) in [(1, 1), (1, -1), (2, 1), (2, -1)] {
            prop_assert!(t.get(k, q).norm() < 1e-12);
        }
    }

    #[test]
    fn unequal_channels_are_physical(p1 in 0.0f64..=1.0, p2 in 0.0f64..=1.0, two_theta in 0.0f64..=2.0 * PI) {
        let rho = channel_mixed(ChannelParams::new(p1, p2, two_theta).unwrap()).unwrap();
        prop_assert!(rho.min_eigenvalue() > -1e-10);
        let t = to_tensor(&rho).unwrap();
        prop_assert!(t.get(1, 1).norm() < 1e-12);
        prop_assert!((t.get(2, 2) - t.get(2, -2)).norm() < 1e-12);
    }

    #[test]
    fn symmetrization_ignores_order(
        angles in prop::collection::vec((0.0f64..=PI, 0.0f64..2.0 * PI), 1..6),
        rotate_by in 0usize..6,
    ) {
        let spinors: Vec<Spinor> = angles.iter().map(|&(t, p)| Spinor::new(t, p)).collect();
        let mut shuffled = spinors.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rotate_by % len);
        shuffled.reverse();
        let a = symmetrize_pure(&spinors).unwrap();
        let b = symmetrize_pure(&shuffled).unwrap();
        prop_assert!(a.max_deviation(&b) < 1e-12);
        prop_assert!((a.purity() - 1.0).abs() < 1e-12);
    }
}
