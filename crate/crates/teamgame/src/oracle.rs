//! Brute-force ground truth: exact support enumeration, grid sweeps, local refinement
//! and exact maximum clique.

use crate::clique::Graph;
use crate::error::{Error, Result};
use crate::game::{self, BimatrixGame, Game, MixedProfile, MixedStrategy, Orientation};
use crate::geometry::{grid_size, Compositions};
use crate::rational::{solve_exact, Q, RatMatrix};
use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};
use rayon::prelude::*;

pub const CLIQUE_CAP: usize = 20;
pub const SUPPORT_ENUM_CAP: usize = 12;
pub const GRID_SEARCH_CAP: u128 = 100_000_000;

/// Bron–Kerbosch with pivoting over bitsets; calls `f` on every maximal clique.
fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, f: &mut dyn FnMut(u64)) {
    if p == 0 && x == 0 {
        f(r);
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u64 << v;
        bron_kerbosch(adj, r | bit, p & adj[v], x & adj[v], f);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

fn bits_to_vec(mut b: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while b != 0 {
        out.push(b.trailing_zeros() as usize);
        b &= b - 1;
    }
    out
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// All maximal cliques, each as a sorted vertex list (0-indexed).
pub fn maximal_cliques(g: &Graph) -> Result<Vec<Vec<usize>>> {
    if g.n() > 64 {
        return Err(Error::Size(format!("{} vertices exceed the bitset width", g.n())));
    }
    let adj = g.adjacency_bits();
    let mut out = Vec::new();
    if g.n() == 0 {
        return Ok(out);
    }
    bron_kerbosch(&adj, 0, full_mask(g.n()), 0, &mut |c| out.push(bits_to_vec(c)));
    out.sort();
    Ok(out)
}

/// Size of a maximum clique and a witness (lexicographically smallest among maximum ones).
pub fn max_clique(g: &Graph) -> Result<(usize, Vec<usize>)> {
    if g.n() > CLIQUE_CAP {
        return Err(Error::Size(format!("max_clique supports n ≤ {CLIQUE_CAP}, got {}", g.n())));
    }
    let cliques = maximal_cliques(g)?;
    let k = cliques.iter().map(Vec::len).max().unwrap_or(0);
    let witness = cliques.into_iter().find(|c| c.len() == k).unwrap_or_default();
    if !g.is_clique(&witness) {
        return Err(Error::Verification("clique witness has a missing edge".into()));
    }
    Ok((k, witness))
}

pub fn maximum_cliques(g: &Graph) -> Result<Vec<Vec<usize>>> {
    let cliques = maximal_cliques(g)?;
    let k = cliques.iter().map(Vec::len).max().unwrap_or(0);
    Ok(cliques.into_iter().filter(|c| c.len() == k).collect())
}

/// Every clique with exactly `k` vertices.
pub fn cliques_of_size(g: &Graph, k: usize) -> Result<Vec<Vec<usize>>> {
    if g.n() > 64 {
        return Err(Error::Size(format!("{} vertices exceed the bitset width", g.n())));
    }
    let adj = g.adjacency_bits();
    let mut out = Vec::new();
    fn grow(adj: &[u64], chosen: &mut Vec<usize>, cand: u64, k: usize, out: &mut Vec<Vec<usize>>) {
        if chosen.len() == k {
            out.push(chosen.clone());
            return;
        }
        let mut c = cand;
        while c != 0 {
            let v = c.trailing_zeros() as usize;
            c &= c - 1;
            // only larger vertices afterwards keeps each clique once
            let rest = cand & adj[v] & !((1u64 << v) | ((1u64 << v) - 1));
            chosen.push(v);
            grow(adj, chosen, rest, k, out);
            chosen.pop();
        }
    }
    if k == 0 {
        return Ok(vec![vec![]]);
    }
    grow(&adj, &mut Vec::new(), full_mask(g.n()), k, &mut out);
    Ok(out)
}

/// Result of a symmetric support enumeration.
#[derive(Clone, Debug, Default)]
pub struct SymmetricEnumeration {
    pub equilibria: Vec<Vec<Q>>,
    pub singular_supports: usize,
}

/// Exact symmetric equilibria (x, x) of the game (A, Aᵀ) where each player's payoff vector
/// is A x, for players who all maximize or all minimize.
pub fn symmetric_support_enumeration(a: &RatMatrix, orientation: Orientation) -> Result<Vec<Vec<Q>>> {
    Ok(symmetric_support_enumeration_detailed(a, orientation)?.equilibria)
}

pub fn symmetric_support_enumeration_detailed(a: &RatMatrix, orientation: Orientation) -> Result<SymmetricEnumeration> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{:?} matrix is not square", a.shape())));
    }
    let n = a.rows();
    if n == 0 || n > SUPPORT_ENUM_CAP {
        return Err(Error::Size(format!("support enumeration supports 1 ≤ n ≤ {SUPPORT_ENUM_CAP}, got {n}")));
    }
    let mut out = SymmetricEnumeration::default();
    for mask in 1u64..(1u64 << n) {
        let support = bits_to_vec(mask);
        let s = support.len();
        let mut sys = vec![vec![Q::zero(); s + 1]; s + 1];
        let mut rhs = vec![Q::zero(); s + 1];
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                sys[r][c] = a.get(i, j).clone();
            }
            sys[r][s] = -Q::one();
            sys[s][r] = Q::one();
        }
        rhs[s] = Q::one();
        let Some(sol) = solve_exact(sys, rhs) else {
            out.singular_supports += 1;
            log::debug!("singular support {support:?} skipped");
            continue;
        };
        if sol[..s].iter().any(Signed::is_negative) {
            continue;
        }
        let mut x = vec![Q::zero(); n];
        for (r, &i) in support.iter().enumerate() {
            x[i] = sol[r].clone();
        }
        let v = &sol[s];
        let payoffs = a.mul_vec(&x);
        let ok = payoffs.iter().all(|p| match orientation {
            Orientation::Maximize => p <= v,
            Orientation::Minimize => p >= v,
        });
        if ok && !out.equilibria.contains(&x) {
            out.equilibria.push(x);
        }
    }
    Ok(out)
}

/// Exact equilibria of a bimatrix game found on equal-size support pairs.
pub fn bimatrix_support_enumeration(game: &BimatrixGame) -> Result<Vec<(Vec<Q>, Vec<Q>)>> {
    let (m, n) = game.row_matrix().shape();
    if m > SUPPORT_ENUM_CAP || n > SUPPORT_ENUM_CAP {
        return Err(Error::Size(format!("support enumeration supports up to {SUPPORT_ENUM_CAP} actions")));
    }
    // work with payoffs every player maximizes
    let orient = |p: usize, v: &Q| match game.orientation(p) {
        Orientation::Maximize => v.clone(),
        Orientation::Minimize => -v.clone(),
    };
    let r = game.row_matrix().map(|v| orient(0, v));
    let c = game.col_matrix().map(|v| orient(1, v));
    let mut out: Vec<(Vec<Q>, Vec<Q>)> = Vec::new();
    // solves M[rows, cols] w = u·1, Σw = 1 for w on `cols`
    let indifference = |mat: &RatMatrix, rows: &[usize], cols: &[usize], transpose: bool| -> Option<(Vec<Q>, Q)> {
        let s = rows.len();
        let mut sys = vec![vec![Q::zero(); s + 1]; s + 1];
        let mut rhs = vec![Q::zero(); s + 1];
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                sys[ri][ci] = if transpose { mat.get(j, i).clone() } else { mat.get(i, j).clone() };
            }
            sys[ri][s] = -Q::one();
            sys[s][ri] = Q::one();
        }
        rhs[s] = Q::one();
        let sol = solve_exact(sys, rhs)?;
        if sol[..s].iter().any(Signed::is_negative) {
            return None;
        }
        Some((sol[..s].to_vec(), sol[s].clone()))
    };
    for rmask in 1u64..(1u64 << m) {
        let rows = bits_to_vec(rmask);
        for cmask in 1u64..(1u64 << n) {
            if cmask.count_ones() as usize != rows.len() {
                continue;
            }
            let cols = bits_to_vec(cmask);
            let Some((ys, u)) = indifference(&r, &rows, &cols, false) else { continue };
            let Some((xs, w)) = indifference(&c, &cols, &rows, true) else { continue };
            let mut x = vec![Q::zero(); m];
            let mut y = vec![Q::zero(); n];
            for (k, &i) in rows.iter().enumerate() {
                x[i] = xs[k].clone();
            }
            for (k, &j) in cols.iter().enumerate() {
                y[j] = ys[k].clone();
            }
            let row_ok = r.mul_vec(&y).iter().all(|p| p <= &u);
            let col_ok = c.tr_mul_vec(&x).iter().all(|p| p <= &w);
            if row_ok && col_ok && !out.iter().any(|(a, b)| a == &x && b == &y) {
                out.push((x, y));
            }
        }
    }
    Ok(out)
}

fn composition_to_strategy(c: &[usize], m: usize) -> MixedStrategy {
    MixedStrategy::new(c.iter().map(|&k| k as f64 / m as f64).collect()).expect("lattice point")
}

/// Every grid profile (coordinates multiples of 1/m) whose max regret is ≤ eps.
/// Sharded over the first player's grid points.
pub fn grid_ne_search<G: Game + ?Sized>(game: &G, m: usize, eps: f64) -> Result<Vec<(MixedProfile, f64)>> {
    if m == 0 {
        return Err(Error::Invalid("resolution denominator must be ≥ 1".into()));
    }
    let counts = game.action_counts();
    let mut total: u128 = 1;
    for &c in &counts {
        total = grid_size(c, m)
            .and_then(|g| total.checked_mul(g))
            .filter(|&t| t <= GRID_SEARCH_CAP)
            .ok_or_else(|| Error::Size(format!("grid exceeds {GRID_SEARCH_CAP} profiles")))?;
    }
    let first: Vec<Vec<usize>> = Compositions::new(counts[0], m).collect();
    let hits: Vec<Vec<(MixedProfile, f64)>> = first
        .par_iter()
        .map(|c0| {
            let mut found = Vec::new();
            let mut iters: Vec<Compositions> = counts[1..].iter().map(|&c| Compositions::new(c, m)).collect();
            let mut current: Vec<Vec<usize>> = iters.iter_mut().map(|it| it.next().unwrap_or_default()).collect();
            loop {
                let mut strategies = vec![composition_to_strategy(c0, m)];
                strategies.extend(current.iter().map(|c| composition_to_strategy(c, m)));
                let profile = MixedProfile::new(strategies);
                if let Ok(r) = game::max_regret(game, &profile) {
                    if r <= eps {
                        found.push((profile, r));
                    }
                }
                // odometer over the remaining players' grids
                let mut p = current.len();
                loop {
                    if p == 0 {
                        return found;
                    }
                    p -= 1;
                    if let Some(next) = iters[p].next() {
                        current[p] = next;
                        for q in p + 1..current.len() {
                            iters[q] = Compositions::new(counts[q + 1], m);
                            current[q] = iters[q].next().unwrap_or_default();
                        }
                        break;
                    }
                }
            }
        })
        .collect();
    Ok(hits.into_iter().flatten().collect())
}

/// Outcome of `local_ne_refine`.
#[derive(Clone, Debug)]
pub struct RefineResult {
    pub profile: MixedProfile,
    pub max_regret: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub const REFINE_DAMPING: f64 = 0.1;
const POLISH_EVERY: usize = 250;

fn best_response(game: &(impl Game + ?Sized), profile: &MixedProfile, player: usize) -> usize {
    let payoffs = game.action_payoffs(&profile.slices(), player);
    let sign = game.orientation(player).sign();
    let mut best = 0;
    for a in 1..payoffs.len() {
        if sign * payoffs[a] > sign * payoffs[best] {
            best = a;
        }
    }
    best
}

/// Damped fictitious play (step min(0.1, 1/(t+2))) with a periodic support-restricted Newton
/// polish on the indifference equations. Stops once the max regret is ≤ `target`.
pub fn local_ne_refine<G: Game + ?Sized>(
    game: &G,
    start: &MixedProfile,
    target: f64,
    max_iters: usize,
) -> Result<RefineResult> {
    game::check_shape(game, start)?;
    let players = game.num_players();
    let mut current = start.clone();
    let mut best = current.clone();
    let mut best_regret = game::max_regret(game, &current)?;
    if best_regret <= target {
        return Ok(RefineResult { profile: best, max_regret: best_regret, converged: true, iterations: 0 });
    }
    for t in 0..max_iters {
        let step = REFINE_DAMPING.min(1.0 / (t as f64 + 2.0));
        let responses: Vec<usize> = (0..players).map(|p| best_response(game, &current, p)).collect();
        let next: Vec<Vec<f64>> = current
            .strategies()
            .iter()
            .zip(&responses)
            .map(|(s, &br)| {
                let mut v: Vec<f64> = s.probs().iter().map(|p| (1.0 - step) * p).collect();
                v[br] += step;
                v
            })
            .collect();
        current = MixedProfile::from_vecs(next)?;
        let r = game::max_regret(game, &current)?;
        if r < best_regret {
            best_regret = r;
            best = current.clone();
        }
        if (t + 1) % POLISH_EVERY == 0 || t + 1 == max_iters {
            if let Some((p, r)) = polish(game, &current) {
                if r < best_regret {
                    best_regret = r;
                    best = p;
                }
            }
        }
        if best_regret <= target {
            return Ok(RefineResult { profile: best, max_regret: best_regret, converged: true, iterations: t + 1 });
        }
    }
    Ok(RefineResult { profile: best, max_regret: best_regret, converged: false, iterations: max_iters })
}

/// Tries several support guesses around `profile`; returns the best polished profile.
fn polish<G: Game + ?Sized>(game: &G, profile: &MixedProfile) -> Option<(MixedProfile, f64)> {
    let mut best: Option<(MixedProfile, f64)> = None;
    for threshold in [1e-1, 3e-2, 1e-2, 1e-3] {
        let supports: Vec<Vec<usize>> = profile
            .strategies()
            .iter()
            .map(|s| {
                let sup = s.support(threshold);
                if sup.is_empty() {
                    let argmax = (0..s.len()).fold(0, |b, a| if s.probs()[a] > s.probs()[b] { a } else { b });
                    vec![argmax]
                } else {
                    sup
                }
            })
            .collect();
        if let Some(candidate) = newton_on_support(game, profile, &supports) {
            if let Ok(r) = game::max_regret(game, &candidate) {
                if best.as_ref().map_or(true, |(_, b)| r < *b) {
                    best = Some((candidate, r));
                }
            }
        }
    }
    best
}

/// Newton iterations on: equal payoffs across each player's support, and unit mass per player.
fn newton_on_support<G: Game + ?Sized>(game: &G, start: &MixedProfile, supports: &[Vec<usize>]) -> Option<MixedProfile> {
    let counts = game.action_counts();
    let mut offsets = Vec::with_capacity(supports.len());
    let mut dim = 0;
    for s in supports {
        offsets.push(dim);
        dim += s.len();
    }
    let mut z: Vec<f64> = Vec::with_capacity(dim);
    for (p, s) in supports.iter().enumerate() {
        let mass: f64 = s.iter().map(|&a| start.strategy(p).probs()[a]).sum();
        z.extend(s.iter().map(|&a| start.strategy(p).probs()[a] / mass.max(1e-300)));
    }
    let unpack = |z: &[f64]| -> Vec<Vec<f64>> {
        supports
            .iter()
            .enumerate()
            .map(|(p, s)| {
                let mut v = vec![0.0; counts[p]];
                for (k, &a) in s.iter().enumerate() {
                    v[a] = z[offsets[p] + k];
                }
                v
            })
            .collect()
    };
    let residual = |z: &[f64]| -> Vec<f64> {
        let full = unpack(z);
        let refs: Vec<&[f64]> = full.iter().map(|v| v.as_slice()).collect();
        let mut out = Vec::with_capacity(dim);
        for (p, s) in supports.iter().enumerate() {
            let pay = game.action_payoffs(&refs, p);
            for &a in &s[1..] {
                out.push(pay[a] - pay[s[0]]);
            }
            out.push(s.iter().map(|&a| full[p][a]).sum::<f64>() - 1.0);
        }
        out
    };
    for _ in 0..30 {
        let f = residual(&z);
        let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-14 {
            break;
        }
        // the residual is affine in each coordinate, so central differences are exact up to rounding
        let h = 1e-6;
        let mut jac = DMatrix::<f64>::zeros(f.len(), dim);
        for c in 0..dim {
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[c] += h;
            zm[c] -= h;
            let (fp, fm) = (residual(&zp), residual(&zm));
            for r in 0..f.len() {
                jac[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_vec(f.iter().map(|v| -v).collect());
        let step = jac.svd(true, true).solve(&rhs, 1e-12).ok()?;
        for (zi, si) in z.iter_mut().zip(step.iter()) {
            *zi += si;
        }
        if z.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    let full: Vec<Vec<f64>> = unpack(&z)
        .into_iter()
        .map(|v| {
            let c: Vec<f64> = v.into_iter().map(|p| p.max(0.0)).collect();
            let s: f64 = c.iter().sum();
            c.into_iter().map(|p| p / s).collect()
        })
        .collect();
    MixedProfile::from_vecs(full).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn k3_sub_cliques() {
        let a = RatMatrix::from_i64(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]);
        let eqs = symmetric_support_enumeration(&a, Orientation::Minimize).unwrap();
        // minimizing the K₃ payoff is what makes every sub-clique uniform an equilibrium
        assert_eq!(eqs.len(), 7);
        let eqs_max = symmetric_support_enumeration(&a, Orientation::Maximize).unwrap();
        assert_eq!(eqs_max, vec![vec![qf(1, 3), qf(1, 3), qf(1, 3)]]);
    }

    #[test]
    fn two_by_two_identical() {
        let a = RatMatrix::from_i64(&[&[-1, -2], &[-2, -1]]);
        let eqs = symmetric_support_enumeration(&a, Orientation::Maximize).unwrap();
        assert_eq!(eqs.len(), 3);
        assert!(eqs.contains(&vec![q(1), q(0)]));
        assert!(eqs.contains(&vec![q(0), q(1)]));
        assert!(eqs.contains(&vec![qf(1, 2), qf(1, 2)]));
        let single = symmetric_support_enumeration(&RatMatrix::from_i64(&[&[5]]), Orientation::Maximize).unwrap();
        assert_eq!(single, vec![vec![q(1)]]);
        assert!(symmetric_support_enumeration(&RatMatrix::zeros(13, 13), Orientation::Maximize).is_err());
    }

    #[test]
    fn bimatrix_pennies() {
        let r = RatMatrix::from_i64(&[&[1, -1], &[-1, 1]]);
        let g = BimatrixGame::new(r.clone(), r.neg()).unwrap();
        let eqs = bimatrix_support_enumeration(&g).unwrap();
        assert_eq!(eqs, vec![(vec![qf(1, 2), qf(1, 2)], vec![qf(1, 2), qf(1, 2)])]);
    }

    #[test]
    fn grid_pennies() {
        let r = RatMatrix::from_i64(&[&[1, -1], &[-1, 1]]);
        let g = BimatrixGame::new(r.clone(), r.neg()).unwrap();
        let hits = grid_ne_search(&g, 2, 0.0).unwrap();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].0, MixedProfile::uniform(&[2, 2]));
    }

    #[test]
    fn refine_trivial_cases() {
        let r = RatMatrix::from_i64(&[&[1, -1], &[-1, 1]]);
        let g = BimatrixGame::new(r.clone(), r.neg()).unwrap();
        let res = local_ne_refine(&g, &MixedProfile::uniform(&[2, 2]), 1e-9, 10).unwrap();
        assert!(res.converged && res.iterations == 0);
        let zero = BimatrixGame::new(RatMatrix::zeros(3, 2), RatMatrix::zeros(3, 2)).unwrap();
        let start = MixedProfile::from_vecs(vec![vec![0.2, 0.3, 0.5], vec![1.0, 0.0]]).unwrap();
        let res = local_ne_refine(&zero, &start, 0.0, 10).unwrap();
        assert!(res.converged && res.max_regret == 0.0 && res.profile == start);
        let far = MixedProfile::from_vecs(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let res = local_ne_refine(&g, &far, 1e-10, 1000).unwrap();
        assert!(res.converged, "regret {}", res.max_regret);
    }
}
