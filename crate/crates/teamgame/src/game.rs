//! Game representations and expected-utility evaluation.

use crate::error::{Error, Result};
use crate::rational::{matvec, matvec_t, to_f64, Q, RatMatrix};
use nalgebra::DMatrix;
use num::{One, Zero};
use rand::Rng;

const CLAMP_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Maximize,
    Minimize,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Maximize => 1.0,
            Orientation::Minimize => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Maximize => Orientation::Minimize,
            Orientation::Minimize => Orientation::Maximize,
        }
    }
}

/// A point of the probability simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Clamps entries in [-1e-12, 0) to zero and renormalizes.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("strategy over zero actions".into()));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < -CLAMP_TOL) {
            return Err(Error::Invalid(format!("probability {bad} out of range")));
        }
        let mut probs: Vec<f64> = probs.into_iter().map(|p| p.max(0.0)).collect();
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::Invalid(format!("probabilities sum to {sum}")));
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(MixedStrategy { probs })
    }

    pub fn uniform(n: usize) -> Self {
        MixedStrategy { probs: vec![1.0 / n as f64; n] }
    }

    pub fn pure(n: usize, action: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[action] = 1.0;
        MixedStrategy { probs }
    }

    pub fn from_exact(probs: &[Q]) -> Result<Self> {
        if probs.iter().any(|p| p < &Q::zero()) {
            return Err(Error::Invalid("negative exact probability".into()));
        }
        let total = probs.iter().fold(Q::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(Error::Invalid("exact probabilities do not sum to one".into()));
        }
        Self::new(probs.iter().map(to_f64).collect())
    }

    /// Uniform sample from the simplex (flat Dirichlet).
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = w.iter().sum();
        MixedStrategy { probs: w.into_iter().map(|v| v / s).collect() }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > tol).collect()
    }

    pub fn linf_distance(&self, other: &MixedStrategy) -> f64 {
        crate::rational::linf(&self.probs, &other.probs)
    }
}

/// One strategy per player.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedProfile {
    strategies: Vec<MixedStrategy>,
}

impl MixedProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        MixedProfile { strategies }
    }

    pub fn uniform(action_counts: &[usize]) -> Self {
        Self::new(action_counts.iter().map(|&n| MixedStrategy::uniform(n)).collect())
    }

    pub fn random<R: Rng + ?Sized>(action_counts: &[usize], rng: &mut R) -> Self {
        Self::new(action_counts.iter().map(|&n| MixedStrategy::random(n, rng)).collect())
    }

    pub fn from_vecs(vecs: Vec<Vec<f64>>) -> Result<Self> {
        Ok(Self::new(vecs.into_iter().map(MixedStrategy::new).collect::<Result<_>>()?))
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn strategy(&self, player: usize) -> &MixedStrategy {
        &self.strategies[player]
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        self.strategies.iter().map(|s| s.probs()).collect()
    }

    pub fn with_strategy(&self, player: usize, s: MixedStrategy) -> Self {
        let mut out = self.clone();
        out.strategies[player] = s;
        out
    }
}

/// Two disjoint player sets covering every player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeamPartition {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
}

impl TeamPartition {
    pub fn new(first: Vec<usize>, second: Vec<usize>, players: usize) -> Result<Self> {
        let mut seen = vec![false; players];
        for &p in first.iter().chain(&second) {
            if p >= players || seen[p] {
                return Err(Error::Invalid(format!("team partition repeats or exceeds player {p}")));
            }
            seen[p] = true;
        }
        if seen.iter().any(|s| !s) || first.is_empty() || second.is_empty() {
            return Err(Error::Invalid("team partition must cover all players with two nonempty teams".into()));
        }
        Ok(TeamPartition { first, second })
    }

    pub fn team_of(&self, player: usize) -> usize {
        if self.first.contains(&player) {
            0
        } else {
            1
        }
    }
}

/// Multilinear game interface. `action_payoffs` gives the raw payoff of every pure action
/// of `player` while the others play `strategies`; orientation says whether the player wants it high or low.
pub trait Game: Sync {
    fn num_players(&self) -> usize;
    fn action_counts(&self) -> Vec<usize>;
    fn orientation(&self, player: usize) -> Orientation;
    fn team_partition(&self) -> Option<&TeamPartition> {
        None
    }
    fn action_payoffs(&self, strategies: &[&[f64]], player: usize) -> Vec<f64>;
    fn action_payoffs_exact(&self, strategies: &[&[Q]], player: usize) -> Vec<Q>;
}

pub fn check_shape<G: Game + ?Sized>(game: &G, profile: &MixedProfile) -> Result<()> {
    let counts = game.action_counts();
    if profile.len() != counts.len() {
        return Err(Error::Dimension(format!(
            "profile has {} strategies, game has {} players",
            profile.len(),
            counts.len()
        )));
    }
    for (p, (s, &n)) in profile.strategies().iter().zip(&counts).enumerate() {
        if s.len() != n {
            return Err(Error::Dimension(format!("player {p}: {} probabilities for {n} actions", s.len())));
        }
    }
    Ok(())
}

fn check_exact_shape<G: Game + ?Sized>(game: &G, strategies: &[Vec<Q>]) -> Result<()> {
    let counts = game.action_counts();
    if strategies.len() != counts.len() || strategies.iter().zip(&counts).any(|(s, &n)| s.len() != n) {
        return Err(Error::Dimension("exact profile shape does not match game".into()));
    }
    Ok(())
}

pub fn evaluate_utility<G: Game + ?Sized>(game: &G, profile: &MixedProfile, player: usize) -> Result<f64> {
    check_shape(game, profile)?;
    if player >= game.num_players() {
        return Err(Error::Dimension(format!("no player {player}")));
    }
    let payoffs = game.action_payoffs(&profile.slices(), player);
    Ok(crate::rational::dot(profile.strategy(player).probs(), &payoffs))
}

pub fn evaluate_utility_exact<G: Game + ?Sized>(game: &G, strategies: &[Vec<Q>], player: usize) -> Result<Q> {
    check_exact_shape(game, strategies)?;
    let refs: Vec<&[Q]> = strategies.iter().map(|s| s.as_slice()).collect();
    let payoffs = game.action_payoffs_exact(&refs, player);
    Ok(crate::rational::dot_q(&strategies[player], &payoffs))
}

/// Best pure deviation for `player`: (action, oriented gain over the current utility).
pub fn best_deviation<G: Game + ?Sized>(game: &G, profile: &MixedProfile, player: usize) -> Result<(usize, f64)> {
    check_shape(game, profile)?;
    let payoffs = game.action_payoffs(&profile.slices(), player);
    let sign = game.orientation(player).sign();
    let current = sign * crate::rational::dot(profile.strategy(player).probs(), &payoffs);
    let (best, value) = payoffs
        .iter()
        .enumerate()
        .map(|(a, v)| (a, sign * v))
        .fold((0, f64::NEG_INFINITY), |acc, (a, v)| if v > acc.1 { (a, v) } else { acc });
    Ok((best, value - current))
}

/// Gain of the best unilateral pure deviation, adjusted for orientation.
pub fn regret<G: Game + ?Sized>(game: &G, profile: &MixedProfile, player: usize) -> Result<f64> {
    Ok(best_deviation(game, profile, player)?.1)
}

pub fn max_regret<G: Game + ?Sized>(game: &G, profile: &MixedProfile) -> Result<f64> {
    (0..game.num_players()).try_fold(0.0f64, |m, p| Ok(m.max(regret(game, profile, p)?)))
}

pub fn regret_exact<G: Game + ?Sized>(game: &G, strategies: &[Vec<Q>], player: usize) -> Result<Q> {
    check_exact_shape(game, strategies)?;
    let refs: Vec<&[Q]> = strategies.iter().map(|s| s.as_slice()).collect();
    let payoffs = game.action_payoffs_exact(&refs, player);
    let current = crate::rational::dot_q(&strategies[player], &payoffs);
    let out = match game.orientation(player) {
        Orientation::Maximize => payoffs.iter().max().cloned().unwrap_or_else(Q::zero) - current,
        Orientation::Minimize => current - payoffs.iter().min().cloned().unwrap_or_else(Q::zero),
    };
    Ok(out)
}

/// Per-profile utility of `player`'s team: the raw utility times the orientation sign.
pub fn team_utility<G: Game + ?Sized>(game: &G, profile: &MixedProfile, player: usize) -> Result<f64> {
    Ok(game.orientation(player).sign() * evaluate_utility(game, profile, player)?)
}

/// Returns (A, C) with A symmetric, C skew-symmetric and A + C = R.
pub fn decompose_symmetric_skew(r: &RatMatrix) -> Result<(RatMatrix, RatMatrix)> {
    if !r.is_square() {
        return Err(Error::Dimension(format!("{:?} matrix is not square", r.shape())));
    }
    let rt = r.transpose();
    let half = Q::new(1.into(), 2.into());
    let a = r.add(&rt)?.scale(&half);
    let c = r.sub(&rt)?.scale(&half);
    Ok((a, c))
}

/// Two-player game with row payoffs R and column payoffs C.
#[derive(Clone, Debug)]
pub struct BimatrixGame {
    r: RatMatrix,
    c: RatMatrix,
    orientation: [Orientation; 2],
    rf: DMatrix<f64>,
    cf: DMatrix<f64>,
}

impl BimatrixGame {
    pub fn new(r: RatMatrix, c: RatMatrix) -> Result<Self> {
        Self::with_orientation(r, c, [Orientation::Maximize; 2])
    }

    pub fn with_orientation(r: RatMatrix, c: RatMatrix, orientation: [Orientation; 2]) -> Result<Self> {
        if r.shape() != c.shape() {
            return Err(Error::Dimension(format!("R is {:?}, C is {:?}", r.shape(), c.shape())));
        }
        if r.rows() == 0 || r.cols() == 0 {
            return Err(Error::Dimension("empty payoff matrix".into()));
        }
        let rf = r.to_f64();
        let cf = c.to_f64();
        Ok(BimatrixGame { r, c, orientation, rf, cf })
    }

    /// The symmetric game (R, Rᵀ).
    pub fn symmetric_from(r: RatMatrix) -> Result<Self> {
        let c = r.transpose();
        Self::new(r, c)
    }

    /// The identical-payoff game (A, A) with both players sharing `orientation`.
    pub fn identical(a: RatMatrix, orientation: Orientation) -> Result<Self> {
        Self::with_orientation(a.clone(), a, [orientation; 2])
    }

    pub fn row_matrix(&self) -> &RatMatrix {
        &self.r
    }

    pub fn col_matrix(&self) -> &RatMatrix {
        &self.c
    }

    pub fn row_matrix_f64(&self) -> &DMatrix<f64> {
        &self.rf
    }

    pub fn col_matrix_f64(&self) -> &DMatrix<f64> {
        &self.cf
    }

    pub fn symmetric(&self) -> bool {
        self.r.is_square() && self.r == self.c.transpose() && self.orientation[0] == self.orientation[1]
    }

    pub fn identical_payoff(&self) -> bool {
        self.r == self.c
    }
}

impl Game for BimatrixGame {
    fn num_players(&self) -> usize {
        2
    }

    fn action_counts(&self) -> Vec<usize> {
        vec![self.r.rows(), self.r.cols()]
    }

    fn orientation(&self, player: usize) -> Orientation {
        self.orientation[player]
    }

    fn action_payoffs(&self, s: &[&[f64]], player: usize) -> Vec<f64> {
        if player == 0 {
            matvec(&self.rf, s[1])
        } else {
            matvec_t(&self.cf, s[0])
        }
    }

    fn action_payoffs_exact(&self, s: &[&[Q]], player: usize) -> Vec<Q> {
        if player == 0 {
            self.r.mul_vec(s[1])
        } else {
            self.c.tr_mul_vec(s[0])
        }
    }
}

/// Payoff of player `i` from its interaction with player `j`: `x_iᵀ matrix x_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTerm {
    pub i: usize,
    pub j: usize,
    pub matrix: RatMatrix,
}

/// Polymatrix game. Without a team partition each term (i, j) pays player i only.
/// With a team partition every player receives the sum of all terms (one shared
/// utility `u`); the two teams have opposite orientations, so their utilities are `u` and `-u`.
#[derive(Clone, Debug)]
pub struct PolymatrixGame {
    action_counts: Vec<usize>,
    orientation: Vec<Orientation>,
    terms: Vec<PairTerm>,
    team: Option<TeamPartition>,
    terms_f: Vec<DMatrix<f64>>,
}

impl PolymatrixGame {
    pub fn new(
        action_counts: Vec<usize>,
        orientation: Vec<Orientation>,
        terms: Vec<PairTerm>,
        team: Option<TeamPartition>,
    ) -> Result<Self> {
        let players = action_counts.len();
        if players == 0 || action_counts.contains(&0) {
            return Err(Error::Dimension("every player needs at least one action".into()));
        }
        if orientation.len() != players {
            return Err(Error::Dimension(format!("{} orientations for {players} players", orientation.len())));
        }
        for t in &terms {
            if t.i >= players || t.j >= players || t.i == t.j {
                return Err(Error::Invalid(format!("bad pair ({}, {})", t.i, t.j)));
            }
            if t.matrix.shape() != (action_counts[t.i], action_counts[t.j]) {
                return Err(Error::Dimension(format!(
                    "pair ({}, {}) matrix is {:?}, expected {:?}",
                    t.i,
                    t.j,
                    t.matrix.shape(),
                    (action_counts[t.i], action_counts[t.j])
                )));
            }
        }
        if let Some(team) = &team {
            let check = TeamPartition::new(team.first.clone(), team.second.clone(), players)?;
            let o1 = orientation[check.first[0]];
            if check.first.iter().any(|&p| orientation[p] != o1)
                || check.second.iter().any(|&p| orientation[p] != o1.flipped())
            {
                return Err(Error::Invalid("teams need uniform and opposite orientations".into()));
            }
        }
        let terms_f = terms.iter().map(|t| t.matrix.to_f64()).collect();
        Ok(PolymatrixGame { action_counts, orientation, terms, team, terms_f })
    }

    pub fn terms(&self) -> &[PairTerm] {
        &self.terms
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.orientation
    }

    pub fn is_shared(&self) -> bool {
        self.team.is_some()
    }

    /// Pure-profile payoff of `player` (exact).
    fn pure_payoff(&self, actions: &[usize], player: usize) -> Q {
        self.terms
            .iter()
            .filter(|t| self.is_shared() || t.i == player)
            .fold(Q::zero(), |acc, t| acc + t.matrix.get(actions[t.i], actions[t.j]))
    }

    pub fn to_normal_form(&self, cap: usize) -> Result<NormalFormGame> {
        let total = checked_product(&self.action_counts, cap)?;
        let players = self.action_counts.len();
        let mut tensors = vec![Vec::with_capacity(total); if self.is_shared() { 1 } else { players }];
        let mut actions = vec![0usize; players];
        for _ in 0..total {
            for (p, tensor) in tensors.iter_mut().enumerate() {
                tensor.push(self.pure_payoff(&actions, p));
            }
            advance(&mut actions, &self.action_counts);
        }
        if self.is_shared() {
            let t = tensors.pop().unwrap_or_default();
            tensors = vec![t; players];
        }
        NormalFormGame::new(self.action_counts.clone(), tensors, self.orientation.clone(), self.team.clone())
    }
}

impl Game for PolymatrixGame {
    fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    fn action_counts(&self) -> Vec<usize> {
        self.action_counts.clone()
    }

    fn orientation(&self, player: usize) -> Orientation {
        self.orientation[player]
    }

    fn team_partition(&self) -> Option<&TeamPartition> {
        self.team.as_ref()
    }

    fn action_payoffs(&self, s: &[&[f64]], player: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.action_counts[player]];
        let mut constant = 0.0;
        for (t, m) in self.terms.iter().zip(&self.terms_f) {
            if t.i == player {
                for (o, v) in out.iter_mut().zip(matvec(m, s[t.j])) {
                    *o += v;
                }
            } else if !self.is_shared() {
                continue;
            } else if t.j == player {
                for (o, v) in out.iter_mut().zip(matvec_t(m, s[t.i])) {
                    *o += v;
                }
            } else {
                constant += crate::rational::dot(s[t.i], &matvec(m, s[t.j]));
            }
        }
        out.iter_mut().for_each(|o| *o += constant);
        out
    }

    fn action_payoffs_exact(&self, s: &[&[Q]], player: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.action_counts[player]];
        let mut constant = Q::zero();
        for t in &self.terms {
            if t.i == player {
                for (o, v) in out.iter_mut().zip(t.matrix.mul_vec(s[t.j])) {
                    *o += v;
                }
            } else if !self.is_shared() {
                continue;
            } else if t.j == player {
                for (o, v) in out.iter_mut().zip(t.matrix.tr_mul_vec(s[t.i])) {
                    *o += v;
                }
            } else {
                constant += t.matrix.bilinear(s[t.i], s[t.j]);
            }
        }
        out.iter_mut().for_each(|o| *o += &constant);
        out
    }
}

pub const DEFAULT_TENSOR_CAP: usize = 10_000_000;

fn checked_product(counts: &[usize], cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for &c in counts {
        total = total
            .checked_mul(c)
            .filter(|&t| t <= cap)
            .ok_or_else(|| Error::Size(format!("pure profile count exceeds cap {cap}")))?;
    }
    Ok(total)
}

/// Odometer step, last player fastest.
fn advance(actions: &mut [usize], counts: &[usize]) {
    for p in (0..actions.len()).rev() {
        actions[p] += 1;
        if actions[p] < counts[p] {
            return;
        }
        actions[p] = 0;
    }
}

/// n-player game with one dense payoff tensor per player (row-major, last player fastest).
#[derive(Clone, Debug)]
pub struct NormalFormGame {
    action_counts: Vec<usize>,
    tensors: Vec<Vec<Q>>,
    tensors_f: Vec<Vec<f64>>,
    orientation: Vec<Orientation>,
    team: Option<TeamPartition>,
}

impl NormalFormGame {
    pub fn new(
        action_counts: Vec<usize>,
        tensors: Vec<Vec<Q>>,
        orientation: Vec<Orientation>,
        team: Option<TeamPartition>,
    ) -> Result<Self> {
        let players = action_counts.len();
        if players == 0 || action_counts.contains(&0) {
            return Err(Error::Dimension("every player needs at least one action".into()));
        }
        let total = checked_product(&action_counts, usize::MAX)?;
        if tensors.len() != players || tensors.iter().any(|t| t.len() != total) {
            return Err(Error::Dimension(format!("expected {players} tensors of {total} entries")));
        }
        if orientation.len() != players {
            return Err(Error::Dimension("orientation count".into()));
        }
        if let Some(team) = &team {
            TeamPartition::new(team.first.clone(), team.second.clone(), players)?;
        }
        let tensors_f = tensors.iter().map(|t| t.iter().map(to_f64).collect()).collect();
        Ok(NormalFormGame { action_counts, tensors, tensors_f, orientation, team })
    }

    pub fn tensor(&self, player: usize) -> &[Q] {
        &self.tensors[player]
    }

    pub fn orientations(&self) -> &[Orientation] {
        &self.orientation
    }

    pub fn flat_index(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.action_counts).fold(0, |acc, (&a, &n)| acc * n + a)
    }

    pub fn pure_payoff(&self, actions: &[usize], player: usize) -> &Q {
        &self.tensors[player][self.flat_index(actions)]
    }

    /// Same-team players see equal team utility and the two teams' utilities cancel,
    /// checked on every pure profile (multilinearity extends it to mixed profiles).
    pub fn is_team_zero_sum(&self) -> bool {
        let Some(team) = &self.team else { return false };
        let sign = |p: usize| match self.orientation[p] {
            Orientation::Maximize => Q::one(),
            Orientation::Minimize => -Q::one(),
        };
        let lead = team.first[0];
        (0..self.tensors[0].len()).all(|idx| {
            let base = sign(lead) * &self.tensors[lead][idx];
            team.first.iter().all(|&p| sign(p) * &self.tensors[p][idx] == base)
                && team.second.iter().all(|&p| sign(p) * &self.tensors[p][idx] == -base.clone())
        })
    }

    fn accumulate<T: Clone>(
        &self,
        player: usize,
        zero: T,
        weight_one: T,
        mul: impl Fn(&T, usize, usize) -> Option<T>,
        add: impl Fn(&mut T, &T, usize),
    ) -> Vec<T> {
        let counts = &self.action_counts;
        let mut out = vec![zero; counts[player]];
        let mut actions = vec![0usize; counts.len()];
        for idx in 0..self.tensors[player].len() {
            let mut w = Some(weight_one.clone());
            for (q, &a) in actions.iter().enumerate() {
                if q != player {
                    w = w.and_then(|w| mul(&w, q, a));
                }
            }
            if let Some(w) = w {
                add(&mut out[actions[player]], &w, idx);
            }
            advance(&mut actions, counts);
        }
        out
    }
}

impl Game for NormalFormGame {
    fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    fn action_counts(&self) -> Vec<usize> {
        self.action_counts.clone()
    }

    fn orientation(&self, player: usize) -> Orientation {
        self.orientation[player]
    }

    fn team_partition(&self) -> Option<&TeamPartition> {
        self.team.as_ref()
    }

    fn action_payoffs(&self, s: &[&[f64]], player: usize) -> Vec<f64> {
        let t = &self.tensors_f[player];
        self.accumulate(
            player,
            0.0,
            1.0,
            |w, q, a| {
                let p = s[q][a];
                (p != 0.0).then(|| w * p)
            },
            |o, w, idx| *o += w * t[idx],
        )
    }

    fn action_payoffs_exact(&self, s: &[&[Q]], player: usize) -> Vec<Q> {
        let t = &self.tensors[player];
        self.accumulate(
            player,
            Q::zero(),
            Q::one(),
            |w, q, a| {
                let p = &s[q][a];
                (!p.is_zero()).then(|| w * p)
            },
            |o, w, idx| *o += w * &t[idx],
        )
    }
}
