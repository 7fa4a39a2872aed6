mod common;

use common::*;
use rand::Rng;
use teamgame::clique::{
    find_nonadjacent_cover, nashgap_audit, nashgap_report, nearest_form, robust_unique_ne_game, unique_ne_game, wsne_value_audit,
    CanonicalForm, Graph, ParameterRegime, WsneAuditOptions,
};
use teamgame::oracle::{cliques_of_size, max_clique, symmetric_support_enumeration};
use teamgame::rational::{q, qf, to_f64};
use teamgame::Orientation;

#[test]
fn nash_gap_value_is_minus_one_over_k() {
    let mut r = rng(50);
    for _ in 0..50 {
        let n = r.gen_range(1..=7);
        let p = r.gen_range(0.2..0.9);
        let g = rand_graph(&mut r, n, p);
        let rep = nashgap_report(&g).unwrap();
        assert_eq!(rep.k, max_clique(&g).unwrap().0);
        assert_eq!(rep.max_value, qf(-1, rep.k as i64));
        assert_eq!(rep.missing_uniforms, 0);
        // the −1/(k−1) cap fails only on equilibria that are not local maxima of xᵀAx;
        // such profiles always have a non-clique support
        for e in rep.gap_violations() {
            let support: Vec<usize> = (0..n).filter(|&i| e.strategy[i] > q(0)).collect();
            assert!(!g.is_clique(&support));
        }
        match nashgap_audit(&g) {
            Ok(_) => assert!(rep.gap_violations().is_empty()),
            Err(e) => assert!(matches!(e, teamgame::Error::LemmaViolation(_)) && !rep.gap_violations().is_empty()),
        }
    }
}

fn forms_of(cg: &teamgame::clique::CliqueGame) -> Vec<CanonicalForm> {
    let a = cg.game.row_matrix();
    symmetric_support_enumeration(a, Orientation::Maximize)
        .unwrap()
        .iter()
        .map(|x| {
            let xf: Vec<f64> = x.iter().map(to_f64).collect();
            nearest_form(cg, &xf, 1e-9).unwrap().form
        })
        .collect()
}

#[test]
fn bordered_game_has_only_the_three_forms() {
    let mut r = rng(51);
    for _ in 0..30 {
        let n = r.gen_range(1..=6);
        let p = r.gen_range(0.2..0.9);
        let g = rand_graph(&mut r, n, p);
        let omega = max_clique(&g).unwrap().0;
        for k in [omega.max(2), omega + 1] {
            let cg = unique_ne_game(&g, k).unwrap();
            let forms = forms_of(&cg);
            let has_clique = !cliques_of_size(&g, k).unwrap().is_empty();
            assert!(forms.contains(&CanonicalForm::TrivialLast));
            for f in [CanonicalForm::CliqueUniform, CanonicalForm::HalfMix] {
                assert_eq!(forms.contains(&f), has_clique, "n={n} k={k} {forms:?}");
            }
            if k > omega {
                // no k-clique: the trivial equilibrium is the only one
                assert_eq!(forms, vec![CanonicalForm::TrivialLast]);
            }
            let reg = ParameterRegime::new(n, k, qf(1, 2), q(0)).unwrap();
            let rb = robust_unique_ne_game(&g, k, &reg).unwrap();
            let robust_forms = forms_of(&rb);
            assert!(!robust_forms.contains(&CanonicalForm::Other), "n={n} k={k} {robust_forms:?}");
        }
    }
}

#[test]
fn base_game_has_extra_equilibria_at_k_equal_omega() {
    // path 0-1-2 with k = 2: (1/5, 3/5, 1/5, 0) is an equilibrium of the bordered game
    let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
    let cg = unique_ne_game(&p3, 2).unwrap();
    let eqs = symmetric_support_enumeration(cg.game.row_matrix(), Orientation::Maximize).unwrap();
    assert!(eqs.contains(&vec![qf(1, 5), qf(3, 5), qf(1, 5), q(0)]));
    assert!(forms_of(&cg).contains(&CanonicalForm::Other));
}

#[test]
fn border_lies_between_consecutive_clique_values() {
    for k in 2..40 {
        let cg = unique_ne_game(&Graph::complete(3), k).unwrap();
        assert!(cg.border > qf(-1, k as i64 - 1) && cg.border < qf(-1, k as i64));
    }
}

#[test]
fn nonadjacent_cover_self_verifies() {
    let mut r = rng(52);
    for _ in 0..100 {
        let n = r.gen_range(2..=10);
        let p = r.gen_range(0.1..0.95);
        let g = rand_graph(&mut r, n, p);
        match find_nonadjacent_cover(&g, None) {
            Ok(s) => {
                let k = max_clique(&g).unwrap().0;
                assert!(s.len() + k > n);
                assert!(s.iter().all(|&i| s.iter().any(|&j| j != i && !g.has_edge(i, j))));
            }
            Err(_) => assert_eq!(g.edge_count(), n * (n - 1) / 2),
        }
    }
}

#[test]
fn wsne_value_bounds_hold() {
    let mut r = rng(53);
    let mut graphs = vec![Graph::figure_one(), Graph::complete(3), Graph::empty(3)];
    for _ in 0..8 {
        let n = r.gen_range(2..=5);
        let p = r.gen_range(0.3..0.8);
        graphs.push(rand_graph(&mut r, n, p));
    }
    for g in graphs {
        let k = max_clique(&g).unwrap().0;
        let half = qf(1, 2);
        let strict = teamgame::clique::strict_epsilon_bound(g.n(), &half);
        for eps in [q(0), &strict / q(2)] {
            let reg = ParameterRegime::new(g.n(), k, half.clone(), eps.clone()).unwrap();
            let opts = WsneAuditOptions { grid_resolution: 8, perturbation_steps: vec![&eps / q(4), &eps / q(64)] };
            let opts = if eps == q(0) { WsneAuditOptions { perturbation_steps: vec![], ..opts } } else { opts };
            let rep = wsne_value_audit(&g, &reg, &opts).unwrap();
            assert!(rep.on_clique > 0);
        }
    }
}
