mod common;

use common::*;
use rand::Rng;
use teamgame::checks::epsilon_ne_report;
use teamgame::clique::Graph;
use teamgame::oracle::{bimatrix_support_enumeration, grid_ne_search, max_clique, maximal_cliques, symmetric_support_enumeration};
use teamgame::rational::{qf, to_f64};
use teamgame::{BimatrixGame, MixedProfile, MixedStrategy, Orientation};

/// Maximum clique by scanning all vertex subsets.
fn brute_force_clique(g: &Graph) -> usize {
    let adj = g.adjacency_bits();
    let mut best = 0;
    for mask in 0u64..(1u64 << g.n()) {
        let ok = (0..g.n()).filter(|&v| mask >> v & 1 == 1).all(|v| mask & !(1 << v) & !adj[v] == 0);
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

#[test]
fn max_clique_matches_subset_scan() {
    let mut r = rng(99);
    for _ in 0..100 {
        let n = r.gen_range(0..=12);
        let p = r.gen_range(0.1..0.9);
        let g = rand_graph(&mut r, n, p);
        let (k, witness) = max_clique(&g).unwrap();
        assert_eq!(k, brute_force_clique(&g));
        assert_eq!(witness.len(), k);
        assert!(g.is_clique(&witness));
        for c in maximal_cliques(&g).unwrap() {
            assert!(g.is_clique(&c));
        }
    }
}

#[test]
fn enumerated_equilibria_reverify() {
    let mut r = rng(4);
    for _ in 0..40 {
        let n = r.gen_range(1..6);
        let a = rand_matrix(&mut r, n, n, -9, 9, 4);
        for orientation in [Orientation::Maximize, Orientation::Minimize] {
            for x in symmetric_support_enumeration(&a, orientation).unwrap() {
                let s = MixedStrategy::from_exact(&x).unwrap();
                let g = BimatrixGame::with_orientation(a.clone(), a.transpose(), [orientation; 2]).unwrap();
                let cert = epsilon_ne_report(&g, &MixedProfile::new(vec![s.clone(), s])).unwrap();
                assert!(cert.max_regret() <= 1e-9);
            }
        }
    }
}

fn quarter_aligned(v: &[teamgame::Q]) -> bool {
    v.iter().all(|p| (p * qf(4, 1)).is_integer())
}

#[test]
fn zero_eps_grid_matches_support_enumeration() {
    let mut r = rng(17);
    let mut checked = 0;
    while checked < 20 {
        let rm = rand_matrix(&mut r, 2, 2, -4, 4, 1);
        let cm = rand_matrix(&mut r, 2, 2, -4, 4, 1);
        // nondegenerate 2×2 games have finitely many equilibria
        if rm.get(0, 0) == rm.get(1, 0) || rm.get(0, 1) == rm.get(1, 1) || cm.get(0, 0) == cm.get(0, 1) || cm.get(1, 0) == cm.get(1, 1) {
            continue;
        }
        let g = BimatrixGame::new(rm, cm).unwrap();
        let eqs = bimatrix_support_enumeration(&g).unwrap();
        if !eqs.iter().all(|(x, y)| quarter_aligned(x) && quarter_aligned(y)) {
            continue;
        }
        let mut expected: Vec<Vec<f64>> =
            eqs.iter().map(|(x, y)| x.iter().chain(y).map(to_f64).collect()).collect();
        let mut found: Vec<Vec<f64>> = grid_ne_search(&g, 4, 0.0)
            .unwrap()
            .into_iter()
            .map(|(p, _)| p.strategies().iter().flat_map(|s| s.probs().to_vec()).collect())
            .collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        found.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(found, expected);
        checked += 1;
    }
}
