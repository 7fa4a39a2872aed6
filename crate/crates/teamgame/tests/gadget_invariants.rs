mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use teamgame::gadgets::{
    canonical_team_ne, gadget_structure_audit, quadratic_gadget, symmetric_backmap, symmetric_regret, team3v3_gadget,
    team_backmap, team_gadget, team_gadget_shifted,
};
use teamgame::game::{self, DEFAULT_TENSOR_CAP};
use teamgame::minmax::{antisymmetry_check, gda_gap};
use teamgame::oracle::local_ne_refine;
use teamgame::{BimatrixGame, Game, MixedProfile, MixedStrategy, Orientation, Q};

#[test]
fn team_gadget_is_exactly_polymatrix() {
    let mut r = rng(31);
    for n in 1..=3 {
        let a = rand_symmetric(&mut r, n, -12, -3, 3);
        let inst = team_gadget(&a, 0.1).unwrap();
        let nf = inst.game.to_normal_form(DEFAULT_TENSOR_CAP).unwrap();
        let counts = inst.game.action_counts();
        for i in 0..counts[0] {
            for j in 0..counts[1] {
                for k in 0..counts[2] {
                    let pure: Vec<Vec<Q>> = [(i, counts[0]), (j, counts[1]), (k, counts[2])]
                        .iter()
                        .map(|&(a, c)| (0..c).map(|t| if t == a { Q::from_integer(1.into()) } else { Q::from_integer(0.into()) }).collect())
                        .collect();
                    for p in 0..3 {
                        assert_eq!(
                            game::evaluate_utility_exact(&inst.game, &pure, p).unwrap(),
                            *nf.pure_payoff(&[i, j, k], p)
                        );
                    }
                }
            }
        }
        for _ in 0..100 {
            let p = MixedProfile::random(&counts, &mut r);
            let u = game::evaluate_utility(&inst.game, &p, 2).unwrap();
            assert!((u - inst.direct_utility(&p).unwrap()).abs() <= 1e-9);
        }
    }
}

#[test]
fn local_search_equilibria_satisfy_the_lemmas() {
    let eps = 0.05;
    let mut r = rng(2024);
    let mut certified = 0;
    for trial in 0..20 {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let a = rand_symmetric(&mut r, n, -10, 10, 5);
        let inst = team_gadget_shifted(&a, eps).unwrap();
        let start = MixedProfile::random(&inst.game.action_counts(), &mut r);
        let res = local_ne_refine(&inst.game, &start, eps * eps, 20_000).unwrap();
        if !res.converged {
            continue;
        }
        certified += 1;
        let audit = gadget_structure_audit(&inst, &res.profile, eps).unwrap();
        assert!(audit.max_xy_gap <= 2.0 * eps && audit.max_z_mass <= 9.0 * eps);
        let (y, bound) = team_backmap(&inst, &res.profile, eps * eps).unwrap();
        let sym = BimatrixGame::identical(inst.a.clone(), Orientation::Minimize).unwrap();
        let regret = game::max_regret(&sym, &MixedProfile::new(vec![y.clone(), y])).unwrap();
        assert!(regret <= bound, "regret {regret} > bound {bound}");
    }
    assert!(certified >= 15, "only {certified} of 20 instances reached an ε²-NE");
}

#[test]
fn canonical_profiles_certify() {
    let mut r = rng(12);
    for _ in 0..20 {
        let n = r.gen_range(1..5);
        let inst = team_gadget_shifted(&rand_symmetric(&mut r, n, -10, 10, 3), 0.1).unwrap();
        let p = canonical_team_ne(&inst).unwrap();
        assert!(game::max_regret(&inst.game, &p).unwrap() <= 1e-9);
        let audit = gadget_structure_audit(&inst, &p, 0.1).unwrap();
        assert_eq!((audit.max_xy_gap, audit.max_z_mass), (0.0, 0.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_gadget_is_antisymmetric(seed in any::<u64>(), n in 1usize..7) {
        let mut r = rng(seed);
        let p = quadratic_gadget(&rand_matrix(&mut r, n, n, -10, 10, 10)).unwrap();
        prop_assert!(antisymmetry_check(&p, 20).unwrap());
    }
}

#[test]
fn symmetric_backmap_bound_holds() {
    let mut r = rng(77);
    for _ in 0..100 {
        let n = r.gen_range(2..6);
        let rm = rand_matrix(&mut r, n, n, -10, 10, 10);
        let p = quadratic_gadget(&rm).unwrap();
        let x = MixedStrategy::random(n, &mut r);
        let gap = gda_gap(&p, x.probs(), x.probs(), 1.0).unwrap().gap;
        let bound = symmetric_backmap(&rm, x.probs(), x.probs(), gap).unwrap();
        assert!(symmetric_regret(&rm, &x).unwrap() <= bound + 1e-9);
    }
}

#[test]
fn team3v3_zero_sum_and_swap_antisymmetric() {
    let mut r = rng(6);
    for _ in 0..5 {
        let n = r.gen_range(1..4);
        let inst = team3v3_gadget(&rand_matrix(&mut r, n, n, -10, 10, 10), 0.1).unwrap();
        let counts = inst.game.action_counts();
        for _ in 0..100 {
            let p = MixedProfile::random(&counts, &mut r);
            let u = inst.direct_utility(&p).unwrap();
            assert!((game::evaluate_utility(&inst.game, &p, 3).unwrap() - u).abs() <= 1e-9);
            let t0 = game::team_utility(&inst.game, &p, 0).unwrap();
            let t1 = game::team_utility(&inst.game, &p, 3).unwrap();
            assert!((t0 + t1).abs() <= 1e-12);
            let s = p.strategies();
            let swapped = MixedProfile::new(vec![
                s[3].clone(), s[4].clone(), s[5].clone(), s[0].clone(), s[1].clone(), s[2].clone(),
            ]);
            let us = game::evaluate_utility(&inst.game, &swapped, 3).unwrap();
            assert!((u + us).abs() <= 1e-12, "{u} vs {us}");
        }
    }
}
