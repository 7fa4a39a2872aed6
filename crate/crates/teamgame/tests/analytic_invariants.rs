mod common;

use common::*;
use rand::Rng;
use teamgame::analytic::{
    induced_matrix, irrational_equilibrium, irrational_game, solve_2x2, team_value_curve, value_curve_exact,
    verify_irrational_equilibrium, QuadSurd,
};
use teamgame::checks::epsilon_ne_report;
use teamgame::oracle::bimatrix_support_enumeration;
use teamgame::rational::{qf, to_f64};
use teamgame::{BimatrixGame, Orientation};

#[test]
fn closed_form_matches_oracle() {
    let mut r = rng(2);
    let mut done = 0;
    while done < 1000 {
        let a = rand_matrix(&mut r, 2, 2, -30, 30, 7);
        let Ok(sol) = solve_2x2(&a) else { continue };
        let g = BimatrixGame::with_orientation(a.clone(), a, [Orientation::Minimize, Orientation::Maximize]).unwrap();
        let eqs = bimatrix_support_enumeration(&g).unwrap();
        assert_eq!(eqs.len(), 1);
        let (x, z) = &eqs[0];
        for i in 0..2 {
            assert!((to_f64(&x[i]) - to_f64(&sol.row[i])).abs() <= 1e-9);
            assert!((to_f64(&z[i]) - to_f64(&sol.col[i])).abs() <= 1e-9);
        }
        let v = g.row_matrix().bilinear(x, z);
        assert!((to_f64(&v) - to_f64(&sol.value)).abs() <= 1e-9);
        done += 1;
    }
}

#[test]
fn value_curve_is_parametric_game_value() {
    let mut prev: Vec<f64> = Vec::new();
    for k in 0..=1000 {
        let y2 = qf(k, 1000);
        let v = value_curve_exact(&y2).unwrap();
        let sol = solve_2x2(&induced_matrix(&y2)).unwrap();
        assert_eq!(v, sol.value);
        let f = team_value_curve(k as f64 / 1000.0).unwrap();
        assert!((f - to_f64(&sol.value)).abs() <= 1e-12);
        prev.push(f);
    }
    for w in prev.windows(3) {
        assert!(w[0] - 2.0 * w[1] + w[2] > 0.0);
    }
}

#[test]
fn irrational_equilibrium_is_exact() {
    let rep = verify_irrational_equilibrium().unwrap();
    assert!(rep.adversary_indifferent && rep.exact_ne);
    assert!(rep.regrets.iter().all(|r| *r <= 1e-9));
    let expected = QuadSurd::new(qf(578, 600), qf(9, 600));
    assert_eq!(rep.action_values[2][0], expected);
    let g = irrational_game();
    let real = teamgame::analytic::surd_profile_to_real(&irrational_equilibrium()).unwrap();
    assert!(epsilon_ne_report(&g, &real).unwrap().max_regret() <= 1e-9);
    let mut r = rng(1);
    for _ in 0..20 {
        assert!(QuadSurd::new(qf(r.gen_range(-99..99), 7), qf(r.gen_range(-99..99), 5)).to_real().is_finite());
    }
}
