mod common;

use common::*;
use proptest::prelude::*;
use teamgame::game::{self, decompose_symmetric_skew, team_utility, DEFAULT_TENSOR_CAP};
use teamgame::gadgets::{team3v3_gadget, team_gadget_shifted};
use teamgame::{BimatrixGame, Game, MixedProfile, Orientation, PairTerm, PolymatrixGame};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn regret_is_nonnegative(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
        let mut r = rng(seed);
        let g = BimatrixGame::new(rand_matrix(&mut r, m, n, -20, 20, 7), rand_matrix(&mut r, m, n, -20, 20, 3)).unwrap();
        let p = MixedProfile::random(&[m, n], &mut r);
        for player in 0..2 {
            prop_assert!(game::regret(&g, &p, player).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn symmetric_skew_resum_is_exact(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let m = rand_matrix(&mut r, n, n, -50, 50, 11);
        let (a, c) = decompose_symmetric_skew(&m).unwrap();
        prop_assert!(a.is_symmetric() && c.is_skew());
        prop_assert_eq!(a.add(&c).unwrap(), m);
    }

    #[test]
    fn polymatrix_matches_normal_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let counts = vec![r.gen_range(1..4), r.gen_range(1..4), r.gen_range(1..4)];
        let mut terms = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                if i != j && r.gen_bool(0.7) {
                    terms.push(PairTerm { i, j, matrix: rand_matrix(&mut r, counts[i], counts[j], -9, 9, 4) });
                }
            }
        }
        let g = PolymatrixGame::new(counts.clone(), vec![Orientation::Maximize; 3], terms, None).unwrap();
        let nf = g.to_normal_form(DEFAULT_TENSOR_CAP).unwrap();
        for _ in 0..10 {
            let p = MixedProfile::random(&counts, &mut r);
            for player in 0..3 {
                let a = game::evaluate_utility(&g, &p, player).unwrap();
                let b = game::evaluate_utility(&nf, &p, player).unwrap();
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }
}

use rand::Rng;

#[test]
fn team_utilities_agree_within_and_cancel_across() {
    let mut r = rng(11);
    let a = rand_symmetric(&mut r, 3, -9, 9, 2);
    let three = team_gadget_shifted(&a, 0.05).unwrap();
    let six = team3v3_gadget(&rand_matrix(&mut r, 3, 3, -4, 4, 4), 0.1).unwrap();
    let games: [&dyn Game; 2] = [&three.game, &six.game];
    for g in games {
        let part = g.team_partition().unwrap().clone();
        for _ in 0..100 {
            let p = MixedProfile::random(&g.action_counts(), &mut r);
            let first: Vec<f64> = part.first.iter().map(|&i| team_utility(g, &p, i).unwrap()).collect();
            let second: Vec<f64> = part.second.iter().map(|&i| team_utility(g, &p, i).unwrap()).collect();
            for u in first.iter().chain(&second) {
                assert!((u - first[0]).abs() <= 1e-12 || (u - second[0]).abs() <= 1e-12);
            }
            assert!(first.iter().all(|u| (u - first[0]).abs() <= 1e-12));
            assert!(second.iter().all(|u| (u - second[0]).abs() <= 1e-12));
            assert!((first[0] + second[0]).abs() <= 1e-12);
        }
    }
}

#[test]
fn two_player_zero_sum_team_view() {
    let mut r = rng(3);
    let m = rand_matrix(&mut r, 3, 3, -5, 5, 1);
    let g = BimatrixGame::with_orientation(m.clone(), m, [Orientation::Minimize, Orientation::Maximize]).unwrap();
    for _ in 0..20 {
        let p = MixedProfile::random(&[3, 3], &mut r);
        let u0 = team_utility(&g, &p, 0).unwrap();
        let u1 = team_utility(&g, &p, 1).unwrap();
        assert!((u0 + u1).abs() < 1e-12);
    }
}
