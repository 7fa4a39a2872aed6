//! Graph-based game families (clique payoff matrices and their bordered unique-equilibrium
//! games) and verifiers for their equilibrium-structure lemmas.

use crate::checks::wsne_value_exact;
use crate::error::{Error, Result};
use crate::game::{self, BimatrixGame, MixedProfile, MixedStrategy, Orientation};
use crate::geometry::simplex_grid_exact;
use crate::minmax::QuadraticMinMaxProblem;
use crate::oracle::{self, symmetric_support_enumeration};
use crate::rational::{q, qf, to_f64, Q, RatMatrix};
use num::{One, Signed, Zero};
use rand::Rng;
use std::collections::BTreeSet;

pub const GRAPH_MAX_VERTICES: usize = 64;
pub const NASHGAP_CAP: usize = 8;

/// Undirected simple graph on vertices 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > GRAPH_MAX_VERTICES {
            return Err(Error::Size(format!("graphs are limited to {GRAPH_MAX_VERTICES} vertices")));
        }
        let mut set = BTreeSet::new();
        let mut adj = vec![0u64; n];
        for (i, j) in edges {
            if i == j {
                return Err(Error::Invalid(format!("self-loop at vertex {i}")));
            }
            if i >= n || j >= n {
                return Err(Error::Invalid(format!("edge ({i}, {j}) outside 0..{n}")));
            }
            set.insert((i.min(j), i.max(j)));
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        Ok(Graph { n, edges: set, adj })
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("valid")
    }

    pub fn empty(n: usize) -> Self {
        Self::new(n, std::iter::empty()).expect("valid")
    }

    /// Erdős–Rényi sample.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        Self::new(n, edges).expect("valid")
    }

    /// The 5-vertex example: a 4-clique on {0,1,2,3} plus vertex 4 joined to 2 and 3.
    pub fn figure_one() -> Self {
        Self::new(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && self.adj[i] >> j & 1 == 1
    }

    pub fn adjacency_bits(&self) -> Vec<u64> {
        self.adj.clone()
    }

    pub fn is_clique(&self, s: &[usize]) -> bool {
        s.iter().all(|&i| i < self.n) && s.iter().enumerate().all(|(a, &i)| s[a + 1..].iter().all(|&j| self.has_edge(i, j)))
    }

    /// Adds `extra` isolated vertices.
    pub fn with_isolated(&self, extra: usize) -> Result<Self> {
        Self::new(self.n + extra, self.edges())
    }
}

/// n, k, δ, ε with a flag for whether they satisfy n ≥ k ≥ 10, δ = ½, ε < δ(1−δ)/(6n⁷).
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterRegime {
    pub n: usize,
    pub k: usize,
    pub delta: Q,
    pub epsilon: Q,
    pub strict: bool,
}

impl ParameterRegime {
    pub fn new(n: usize, k: usize, delta: Q, epsilon: Q) -> Result<Self> {
        if delta <= Q::zero() || delta >= Q::one() {
            return Err(Error::Invalid(format!("δ = {delta} outside (0, 1)")));
        }
        if epsilon.is_negative() {
            return Err(Error::Invalid("ε must be nonnegative".into()));
        }
        let strict = n >= k && k >= 10 && delta == qf(1, 2) && epsilon < strict_epsilon_bound(n, &delta);
        Ok(ParameterRegime { n, k, delta, epsilon, strict })
    }
}

/// δ(1−δ)/(6n⁷).
pub fn strict_epsilon_bound(n: usize, delta: &Q) -> Q {
    let n7 = num::pow(q(n as i64), 7);
    delta * (Q::one() - delta) / (q(6) * n7)
}

/// −1 on the diagonal, 0 on edges, −2 elsewhere.
pub fn payoff_from_graph(g: &Graph) -> RatMatrix {
    RatMatrix::from_fn(g.n(), g.n(), |i, j| {
        if i == j {
            q(-1)
        } else if g.has_edge(i, j) {
            q(0)
        } else {
            q(-2)
        }
    })
}

/// δ on the diagonal, 1 on edges, 0 elsewhere.
pub fn payoff_from_graph_delta(g: &Graph, delta: &Q) -> Result<RatMatrix> {
    if delta <= &Q::zero() || delta >= &Q::one() {
        return Err(Error::Invalid(format!("δ = {delta} outside (0, 1)")));
    }
    Ok(RatMatrix::from_fn(g.n(), g.n(), |i, j| {
        if i == j {
            delta.clone()
        } else if g.has_edge(i, j) {
            q(1)
        } else {
            q(0)
        }
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum CliqueVariant {
    Base,
    Robust(ParameterRegime),
}

/// A bordered clique game together with the graph and k it was built from.
#[derive(Clone, Debug)]
pub struct CliqueGame {
    pub graph: Graph,
    pub k: usize,
    pub variant: CliqueVariant,
    pub corner: Q,
    pub border: Q,
    pub game: BimatrixGame,
}

fn bordered(block: &RatMatrix, border: &Q, corner: &Q) -> RatMatrix {
    let n = block.rows();
    RatMatrix::from_fn(n + 1, n + 1, |i, j| match (i == n, j == n) {
        (true, true) => corner.clone(),
        (true, false) | (false, true) => border.clone(),
        (false, false) => block.get(i, j).clone(),
    })
}

/// A(G) bordered by r = −(2k−1)/(2(k−1)k) with corner V = −1/k.
pub fn unique_ne_game(g: &Graph, k: usize) -> Result<CliqueGame> {
    if k < 2 {
        return Err(Error::Invalid(format!("k = {k} must be at least 2")));
    }
    let ki = k as i64;
    let corner = qf(-1, ki);
    let border = qf(-(2 * ki - 1), 2 * (ki - 1) * ki);
    let m = bordered(&payoff_from_graph(g), &border, &corner);
    let game = BimatrixGame::identical(m, Orientation::Maximize)?;
    Ok(CliqueGame { graph: g.clone(), k, variant: CliqueVariant::Base, corner, border, game })
}

/// Ā(G, δ) bordered by r = V − δ/(n²k⁴) + 3ε with corner V = 1 − 1/k + δ/k.
pub fn robust_unique_ne_game(g: &Graph, k: usize, regime: &ParameterRegime) -> Result<CliqueGame> {
    if k < 1 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    if !regime.strict {
        log::debug!("robust clique game built outside the strict parameter regime");
    }
    let (n, kq) = (q(g.n() as i64), q(k as i64));
    let delta = &regime.delta;
    let corner = Q::one() - Q::one() / &kq + delta / &kq;
    let border = &corner - delta / (&n * &n * num::pow(kq, 4)) + q(3) * &regime.epsilon;
    let m = bordered(&payoff_from_graph_delta(g, delta)?, &border, &corner);
    let game = BimatrixGame::identical(m, Orientation::Maximize)?;
    Ok(CliqueGame { graph: g.clone(), k, variant: CliqueVariant::Robust(regime.clone()), corner, border, game })
}

pub fn clique_uniform_exact(g: &Graph, s: &[usize]) -> Result<Vec<Q>> {
    if s.is_empty() || !g.is_clique(s) {
        return Err(Error::Invalid(format!("{s:?} is not a clique")));
    }
    let w = qf(1, s.len() as i64);
    let mut x = vec![Q::zero(); g.n()];
    for &i in s {
        x[i] = w.clone();
    }
    Ok(x)
}

pub fn clique_uniform(g: &Graph, s: &[usize]) -> Result<MixedStrategy> {
    MixedStrategy::from_exact(&clique_uniform_exact(g, s)?)
}

/// One symmetric equilibrium of (A(G), A(G)) found by the oracle.
#[derive(Clone, Debug)]
pub struct GapEquilibrium {
    pub strategy: Vec<Q>,
    pub value: Q,
    pub clique_form: bool,
}

#[derive(Clone, Debug)]
pub struct NashGapReport {
    pub k: usize,
    pub witness: Vec<usize>,
    pub equilibria: Vec<GapEquilibrium>,
    pub max_value: Q,
    /// Largest value among equilibria that are not uniform on a maximum clique.
    pub max_other_value: Option<Q>,
    /// Maximum cliques whose uniform distribution the enumeration did not return.
    pub missing_uniforms: usize,
}

fn quad_value(a: &RatMatrix, x: &[Q]) -> Q {
    a.bilinear(x, x)
}

/// Enumerates the symmetric equilibria of (A(G), A(G)) and records values without asserting.
pub fn nashgap_report(g: &Graph) -> Result<NashGapReport> {
    if g.n() == 0 || g.n() > NASHGAP_CAP {
        return Err(Error::Size(format!("nash-gap audit supports 1 ≤ n ≤ {NASHGAP_CAP}")));
    }
    let (k, witness) = oracle::max_clique(g)?;
    let a = payoff_from_graph(g);
    let uniforms: Vec<Vec<Q>> =
        oracle::maximum_cliques(g)?.iter().map(|c| clique_uniform_exact(g, c)).collect::<Result<_>>()?;
    let mut equilibria = Vec::new();
    for x in symmetric_support_enumeration(&a, Orientation::Maximize)? {
        let value = quad_value(&a, &x);
        let clique_form = uniforms.contains(&x);
        equilibria.push(GapEquilibrium { strategy: x, value, clique_form });
    }
    let max_value = equilibria.iter().map(|e| e.value.clone()).max().unwrap_or_else(|| qf(-1, k as i64));
    let max_other_value = equilibria.iter().filter(|e| !e.clique_form).map(|e| e.value.clone()).max();
    let missing_uniforms = uniforms.iter().filter(|u| !equilibria.iter().any(|e| &e.strategy == *u)).count();
    Ok(NashGapReport { k, witness, equilibria, max_value, max_other_value, missing_uniforms })
}

impl NashGapReport {
    /// −1/(k−1), or None when k < 2.
    pub fn other_cap(&self) -> Option<Q> {
        (self.k >= 2).then(|| qf(-1, self.k as i64 - 1))
    }

    /// Non-clique-form equilibria whose value exceeds −1/(k−1).
    pub fn gap_violations(&self) -> Vec<&GapEquilibrium> {
        match self.other_cap() {
            Some(cap) => self.equilibria.iter().filter(|e| !e.clique_form && e.value > cap).collect(),
            None => Vec::new(),
        }
    }
}

/// Asserts that uniform distributions on maximum cliques are equilibria of value −1/k, that
/// this is the largest equilibrium value, and that every other equilibrium is worth ≤ −1/(k−1).
pub fn nashgap_audit(g: &Graph) -> Result<NashGapReport> {
    let rep = nashgap_report(g)?;
    let target = qf(-1, rep.k as i64);
    if rep.missing_uniforms > 0 || rep.max_value != target {
        return Err(Error::LemmaViolation(format!(
            "maximum equilibrium value {} differs from −1/{} or a clique-uniform profile is missing",
            rep.max_value, rep.k
        )));
    }
    if let Some(v) = rep.gap_violations().first() {
        return Err(Error::LemmaViolation(format!(
            "non-clique equilibrium {:?} has value {} above −1/{}",
            v.strategy.iter().map(crate::rational::format_rational).collect::<Vec<_>>(),
            v.value,
            rep.k - 1
        )));
    }
    Ok(rep)
}

/// Every i in the returned set has a non-neighbour inside the set, and |S| ≥ n − k + 1.
pub fn find_nonadjacent_cover(g: &Graph, k: Option<usize>) -> Result<Vec<usize>> {
    let k = match k {
        Some(k) => k,
        None => oracle::max_clique(g)?.0,
    };
    // a vertex with any non-neighbour has that non-neighbour in the set too
    let s: Vec<usize> = (0..g.n()).filter(|&i| (0..g.n()).any(|j| j != i && !g.has_edge(i, j))).collect();
    let ok = !s.is_empty()
        && s.len() + k > g.n()
        && s.iter().all(|&i| s.iter().any(|&j| j != i && !g.has_edge(i, j)));
    if !ok {
        return Err(Error::Verification(format!(
            "cover impossible: {} non-universal vertices for n = {}, k = {k}",
            s.len(),
            g.n()
        )));
    }
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonicalForm {
    TrivialLast,
    CliqueUniform,
    HalfMix,
    Other,
}

/// How the profile being classified was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    Nash,
    WellSupported,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub form: CanonicalForm,
    pub distance: f64,
    pub clique: Option<Vec<usize>>,
    /// Closeness bound that was asserted, when the regime is strict.
    pub asserted_bound: Option<f64>,
}

/// Exact canonical forms of a bordered clique game: e_{n+1}, and for every k-clique
/// its uniform distribution and the half mixture with e_{n+1}.
pub fn canonical_forms(cg: &CliqueGame) -> Result<Vec<(CanonicalForm, Option<Vec<usize>>, Vec<Q>)>> {
    let n = cg.graph.n();
    let mut out = Vec::new();
    let mut last = vec![Q::zero(); n + 1];
    last[n] = Q::one();
    out.push((CanonicalForm::TrivialLast, None, last));
    let half = qf(1, 2);
    for c in oracle::cliques_of_size(&cg.graph, cg.k)? {
        let mut u = clique_uniform_exact(&cg.graph, &c)?;
        u.push(Q::zero());
        let mut h: Vec<Q> = u.iter().map(|v| v * &half).collect();
        h[n] = half.clone();
        out.push((CanonicalForm::CliqueUniform, Some(c.clone()), u));
        out.push((CanonicalForm::HalfMix, Some(c), h));
    }
    Ok(out)
}

/// Nearest canonical form in ℓ∞; `Other` when nothing lies within `tolerance`.
pub fn nearest_form(cg: &CliqueGame, x: &[f64], tolerance: f64) -> Result<Classification> {
    let mut best: Option<Classification> = None;
    for (form, clique, point) in canonical_forms(cg)? {
        let d = point.iter().zip(x).fold(0.0f64, |m, (p, v)| m.max((to_f64(p) - v).abs()));
        let better = match &best {
            None => true,
            Some(b) => d < b.distance || (d == b.distance && form < b.form),
        };
        if better {
            best = Some(Classification { form, distance: d, clique, asserted_bound: None });
        }
    }
    let mut c = best.ok_or_else(|| Error::Invalid("no canonical forms".into()))?;
    if c.distance > tolerance {
        c.form = CanonicalForm::Other;
    }
    Ok(c)
}

/// Classifies a certified symmetric ε-NE (or ε-WSNE) of a bordered clique game.
pub fn classify_symmetric_profile(
    cg: &CliqueGame,
    regime: &ParameterRegime,
    x_hat: &MixedStrategy,
    eps: f64,
    kind: CertKind,
) -> Result<Classification> {
    let n1 = cg.graph.n() + 1;
    if x_hat.len() != n1 {
        return Err(Error::Dimension(format!("strategy of length {} for {n1} actions", x_hat.len())));
    }
    let measured = match kind {
        CertKind::Nash => {
            let p = MixedProfile::new(vec![x_hat.clone(), x_hat.clone()]);
            game::max_regret(&cg.game, &p)?
        }
        CertKind::WellSupported => crate::checks::wsne_report(&cg.game, x_hat)?,
    };
    if measured > eps + crate::checks::REGRET_TOL {
        return Err(Error::Precondition(format!("profile is only a {measured:.3e}-equilibrium, not {eps:.3e}")));
    }
    let n6 = (cg.graph.n() as f64).powi(6);
    let bound = match kind {
        CertKind::Nash => n6 * eps.sqrt(),
        CertKind::WellSupported => 2.0 * n6 * eps,
    };
    let mut c = nearest_form(cg, x_hat.probs(), f64::INFINITY)?;
    if regime.strict {
        c.asserted_bound = Some(bound);
        if c.distance > bound {
            return Err(Error::LemmaViolation(format!("distance {:.3e} to nearest form exceeds {bound:.3e}", c.distance)));
        }
    }
    Ok(c)
}

/// f(x, y) = yᵀB̄y − xᵀB̄x as a quadratic problem with Q_x = Q_y = 2B̄ and M = 0.
pub fn nonsym_instance(g: &Graph, k: usize, regime: &ParameterRegime) -> Result<QuadraticMinMaxProblem> {
    let cg = robust_unique_ne_game(g, k, regime)?;
    let b2 = cg.game.row_matrix().scale(&q(2));
    let n = b2.rows();
    QuadraticMinMaxProblem::on_simplices(b2.clone(), b2, RatMatrix::zeros(n, n))
}

#[derive(Clone, Debug, Default)]
pub struct WsneValueReport {
    pub k: usize,
    pub candidates: usize,
    pub on_clique: usize,
    pub off_clique: usize,
    /// Smallest value among candidates supported inside a maximum clique.
    pub min_on_clique_value: Option<Q>,
    pub on_clique_value_bound: Q,
    pub max_on_clique_distance: f64,
    pub distance_bound: Q,
    /// Largest value among candidates not supported inside a k-clique.
    pub max_off_clique_value: Option<Q>,
    pub off_clique_value_bound: Q,
}

/// Options for `wsne_value_audit`: grid denominator and perturbation steps.
#[derive(Clone, Debug)]
pub struct WsneAuditOptions {
    pub grid_resolution: usize,
    pub perturbation_steps: Vec<Q>,
}

impl Default for WsneAuditOptions {
    fn default() -> Self {
        WsneAuditOptions { grid_resolution: 12, perturbation_steps: vec![] }
    }
}

/// Checks both value bounds for symmetric ε-WSNE of (Ā, Ā) on oracle equilibria,
/// their small perturbations and a simplex grid, all in exact arithmetic.
pub fn wsne_value_audit(g: &Graph, regime: &ParameterRegime, opts: &WsneAuditOptions) -> Result<WsneValueReport> {
    let n = g.n();
    if n == 0 || n > oracle::SUPPORT_ENUM_CAP {
        return Err(Error::Size(format!("well-supported audit supports 1 ≤ n ≤ {}", oracle::SUPPORT_ENUM_CAP)));
    }
    let (k, _) = oracle::max_clique(g)?;
    if regime.k != k {
        return Err(Error::Precondition(format!("regime k = {} but the maximum clique has size {k}", regime.k)));
    }
    let delta = &regime.delta;
    let eps = &regime.epsilon;
    let a = payoff_from_graph_delta(g, delta)?;
    let (kq, nq) = (q(k as i64), q(n as i64));
    let v = Q::one() - Q::one() / &kq + delta / &kq;
    let slack = (&kq - delta) / (Q::one() - delta) * eps;
    let on_bound = &v - &slack;
    let off_bound = &v - q(2) * delta / (&nq * &nq * num::pow(kq.clone(), 4)) + q(2) * eps;
    let max_cliques = oracle::maximum_cliques(g)?;

    let mut candidates: Vec<Vec<Q>> = symmetric_support_enumeration(&a, Orientation::Maximize)?;
    let base = candidates.clone();
    for x in &base {
        for t in &opts.perturbation_steps {
            for i in 0..n {
                for j in 0..n {
                    if i != j && &x[j] >= t {
                        let mut y = x.clone();
                        y[i] += t;
                        y[j] -= t;
                        candidates.push(y);
                    }
                }
            }
        }
    }
    if opts.grid_resolution > 0 {
        candidates.extend(simplex_grid_exact(n, opts.grid_resolution)?);
    }
    candidates.sort();
    candidates.dedup();

    let mut rep = WsneValueReport {
        k,
        on_clique_value_bound: on_bound.clone(),
        distance_bound: slack.clone(),
        off_clique_value_bound: off_bound.clone(),
        ..Default::default()
    };
    for x in candidates {
        if &wsne_value_exact(&a, &x) > eps {
            continue;
        }
        rep.candidates += 1;
        let value = a.bilinear(&x, &x);
        let support: Vec<usize> = (0..n).filter(|&i| x[i].is_positive()).collect();
        let containing: Vec<&Vec<usize>> =
            max_cliques.iter().filter(|c| support.iter().all(|i| c.contains(i))).collect();
        if containing.is_empty() {
            rep.off_clique += 1;
            if value > off_bound {
                return Err(Error::LemmaViolation(format!("off-clique WSNE {x:?} has value {value} > {off_bound}")));
            }
            if rep.max_off_clique_value.as_ref().map_or(true, |m| &value > m) {
                rep.max_off_clique_value = Some(value);
            }
        } else {
            rep.on_clique += 1;
            let dist = containing
                .iter()
                .map(|c| {
                    let u = clique_uniform_exact(g, c).expect("maximum clique");
                    u.iter().zip(&x).map(|(p, v)| (p - v).abs()).max().unwrap_or_default()
                })
                .min()
                .unwrap_or_default();
            if value < on_bound || dist > slack {
                return Err(Error::LemmaViolation(format!(
                    "on-clique WSNE {x:?}: value {value} (bound {on_bound}), distance {dist} (bound {slack})"
                )));
            }
            rep.max_on_clique_distance = rep.max_on_clique_distance.max(to_f64(&dist));
            if rep.min_on_clique_value.as_ref().map_or(true, |m| &value < m) {
                rep.min_on_clique_value = Some(value);
            }
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_one_matrix() {
        let a = payoff_from_graph(&Graph::figure_one());
        assert_eq!(a.get(0, 4), &q(-2));
        assert_eq!(a.get(2, 4), &q(0));
        assert_eq!(a.get(3, 3), &q(-1));
        assert!(a.is_symmetric());
        let ad = payoff_from_graph_delta(&Graph::figure_one(), &qf(1, 2)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j {
                    qf(1, 2)
                } else if a.get(i, j).is_zero() {
                    q(1)
                } else {
                    q(0)
                };
                assert_eq!(ad.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn small_graph_matrices() {
        assert_eq!(payoff_from_graph(&Graph::complete(3)), RatMatrix::identity(3).neg());
        assert_eq!(payoff_from_graph(&Graph::empty(2)), RatMatrix::from_i64(&[&[-1, -2], &[-2, -1]]));
        assert_eq!(payoff_from_graph_delta(&Graph::empty(3), &qf(1, 3)).unwrap(), RatMatrix::identity(3).scale(&qf(1, 3)));
        assert!(payoff_from_graph_delta(&Graph::empty(3), &q(1)).is_err());
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
    }

    #[test]
    fn border_constants() {
        let g3 = unique_ne_game(&Graph::complete(3), 3).unwrap();
        assert_eq!((g3.corner.clone(), g3.border.clone()), (qf(-1, 3), qf(-5, 12)));
        let g2 = unique_ne_game(&Graph::complete(3), 2).unwrap();
        assert_eq!((g2.corner.clone(), g2.border.clone()), (qf(-1, 2), qf(-3, 4)));
        assert!(unique_ne_game(&Graph::complete(3), 1).is_err());
        let eps = qf(1, 1_000_000);
        let reg = ParameterRegime::new(5, 3, qf(1, 2), eps.clone()).unwrap();
        let rb = robust_unique_ne_game(&Graph::figure_one(), 3, &reg).unwrap();
        assert_eq!(rb.corner, qf(5, 6));
        assert_eq!(rb.border, qf(5, 6) - qf(1, 4050) + q(3) * eps);
        assert!(!reg.strict);
    }

    #[test]
    fn strict_regime_threshold() {
        let bound = strict_epsilon_bound(10, &qf(1, 2));
        assert_eq!(bound, qf(1, 4) / q(60_000_000));
        assert!(ParameterRegime::new(10, 10, qf(1, 2), &bound / q(2)).unwrap().strict);
        assert!(!ParameterRegime::new(10, 10, qf(1, 2), bound).unwrap().strict);
        assert!(!ParameterRegime::new(9, 9, qf(1, 2), q(0)).unwrap().strict);
    }

    #[test]
    fn clique_uniform_examples() {
        let g = Graph::figure_one();
        assert_eq!(clique_uniform(&g, &[0, 1, 2, 3]).unwrap().probs(), &[0.25, 0.25, 0.25, 0.25, 0.0]);
        assert_eq!(clique_uniform(&g, &[2, 4]).unwrap().probs(), &[0.0, 0.0, 0.5, 0.0, 0.5]);
        assert_eq!(clique_uniform(&g, &[1]).unwrap().probs(), &[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(clique_uniform(&g, &[0, 4]).is_err());
    }

    #[test]
    fn trivial_last_is_always_an_equilibrium() {
        let g = Graph::figure_one();
        let cg = unique_ne_game(&g, 4).unwrap();
        let mut e = vec![Q::zero(); 6];
        e[5] = Q::one();
        assert!(game::regret_exact(&cg.game, &[e.clone(), e], 0).unwrap().is_zero());
    }

    #[test]
    fn path_breaks_the_gap_claim() {
        // x = (1/5, 3/5, 1/5) is a full-support equilibrium of value −3/5 > −1 = −1/(k−1)
        let p3 = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let rep = nashgap_report(&p3).unwrap();
        assert_eq!(rep.max_value, qf(-1, 2));
        let v = rep.gap_violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].strategy, vec![qf(1, 5), qf(3, 5), qf(1, 5)]);
        assert_eq!(v[0].value, qf(-3, 5));
        assert!(matches!(nashgap_audit(&p3), Err(Error::LemmaViolation(_))));
    }

    #[test]
    fn nashgap_examples() {
        let rep = nashgap_audit(&Graph::figure_one()).unwrap();
        assert_eq!(rep.k, 4);
        assert_eq!(rep.max_value, qf(-1, 4));
        let k3 = nashgap_audit(&Graph::complete(3)).unwrap();
        assert_eq!(k3.max_value, qf(-1, 3));
        let single = nashgap_audit(&Graph::empty(1)).unwrap();
        assert_eq!(single.equilibria.len(), 1);
        assert_eq!(single.equilibria[0].value, q(-1));
    }

    #[test]
    fn cover_examples() {
        let s = find_nonadjacent_cover(&Graph::figure_one(), None).unwrap();
        assert!(s.len() >= 2 && s.contains(&0) && s.contains(&4));
        assert!(matches!(find_nonadjacent_cover(&Graph::complete(4), None), Err(Error::Verification(_))));
        assert_eq!(find_nonadjacent_cover(&Graph::empty(4), None).unwrap(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn classify_forms() {
        let g = Graph::figure_one();
        let cg = unique_ne_game(&g, 4).unwrap();
        let reg = ParameterRegime::new(5, 4, qf(1, 2), q(0)).unwrap();
        let last = MixedStrategy::pure(6, 5);
        let c = classify_symmetric_profile(&cg, &reg, &last, 0.0, CertKind::Nash).unwrap();
        assert_eq!((c.form, c.distance), (CanonicalForm::TrivialLast, 0.0));
        let u = MixedStrategy::new(vec![0.25, 0.25, 0.25, 0.25, 0.0, 0.0]).unwrap();
        let c = classify_symmetric_profile(&cg, &reg, &u, 1e-15, CertKind::Nash).unwrap();
        assert_eq!((c.form, c.distance), (CanonicalForm::CliqueUniform, 0.0));
        let h = MixedStrategy::new(vec![0.125, 0.125, 0.125, 0.125, 0.0, 0.5]).unwrap();
        let c = classify_symmetric_profile(&cg, &reg, &h, 1e-15, CertKind::Nash).unwrap();
        assert_eq!((c.form, c.distance), (CanonicalForm::HalfMix, 0.0));
        let bad = MixedStrategy::pure(6, 4);
        assert!(matches!(classify_symmetric_profile(&cg, &reg, &bad, 1e-3, CertKind::Nash), Err(Error::Precondition(_))));
    }

    #[test]
    fn k3_wsne_value() {
        let reg = ParameterRegime::new(3, 3, qf(1, 2), q(0)).unwrap();
        let rep = wsne_value_audit(&Graph::complete(3), &reg, &WsneAuditOptions::default()).unwrap();
        assert_eq!(rep.min_on_clique_value, Some(qf(5, 6)));
        assert_eq!(rep.max_on_clique_distance, 0.0);
    }

    #[test]
    fn nonsym_is_antisymmetric() {
        let reg = ParameterRegime::new(5, 4, qf(1, 2), q(0)).unwrap();
        let p = nonsym_instance(&Graph::figure_one(), 4, &reg).unwrap();
        assert!(crate::minmax::antisymmetry_check(&p, 20).unwrap());
    }
}
