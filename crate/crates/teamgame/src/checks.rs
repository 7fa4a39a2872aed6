//! ε-Nash certificates, well-supported reports and the ε-NE to WSNE conversion.

use crate::error::{Error, Result};
use crate::game::{self, BimatrixGame, Game, MixedProfile, MixedStrategy};
use crate::rational::{Q, RatMatrix};

pub const REGRET_TOL: f64 = 1e-12;
pub const SUPPORT_TOL: f64 = 1e-12;

/// A pure deviation that gains `gain` for `player`.
#[derive(Clone, Debug, PartialEq)]
pub struct Deviation {
    pub player: usize,
    pub action: usize,
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub regrets: Vec<f64>,
    pub epsilon: f64,
    pub satisfied: bool,
    pub bound_name: String,
    pub bound_value: f64,
    pub witnesses: Vec<Deviation>,
}

impl Certificate {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().cloned().fold(0.0, f64::max)
    }

    /// Re-targets the certificate at a new ε and bound label.
    pub fn against(mut self, name: &str, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self.bound_name = name.to_string();
        self.bound_value = epsilon;
        self.satisfied = self.regrets.iter().all(|r| *r <= epsilon + REGRET_TOL);
        self
    }
}

/// Per-player regrets and best pure deviations; tested against ε = 0 until retargeted.
pub fn epsilon_ne_report<G: Game + ?Sized>(game: &G, profile: &MixedProfile) -> Result<Certificate> {
    game::check_shape(game, profile)?;
    let mut regrets = Vec::with_capacity(game.num_players());
    let mut witnesses = Vec::new();
    for p in 0..game.num_players() {
        let (action, gain) = game::best_deviation(game, profile, p)?;
        regrets.push(gain);
        if gain > REGRET_TOL {
            witnesses.push(Deviation { player: p, action, gain });
        }
    }
    Ok(Certificate { regrets, epsilon: 0.0, satisfied: false, bound_name: "eps-ne".into(), bound_value: 0.0, witnesses }
        .against("eps-ne", 0.0))
}

fn require_symmetric_identical(game: &BimatrixGame) -> Result<()> {
    if !(game.symmetric() && game.identical_payoff()) {
        return Err(Error::Invalid("well-supported report needs a symmetric identical-payoff game".into()));
    }
    Ok(())
}

/// Smallest ε for which (x, x) is an ε-well-supported equilibrium.
pub fn wsne_report(game: &BimatrixGame, x: &MixedStrategy) -> Result<f64> {
    require_symmetric_identical(game)?;
    if x.len() != game.row_matrix().rows() {
        return Err(Error::Dimension(format!("strategy of length {} for {} actions", x.len(), game.row_matrix().rows())));
    }
    let profile = MixedProfile::new(vec![x.clone(), x.clone()]);
    Ok(wsne_gap_player(game, &profile, 0))
}

/// Exact well-supported gap of (x, x) in (A, A) with maximizing players; support is x_i > 0.
pub fn wsne_value_exact(a: &RatMatrix, x: &[Q]) -> Q {
    let payoffs = a.mul_vec(x);
    let best = payoffs.iter().max().cloned().unwrap_or_default();
    payoffs
        .iter()
        .zip(x)
        .filter(|(_, xi)| num::Signed::is_positive(*xi))
        .map(|(p, _)| &best - p)
        .max()
        .unwrap_or_default()
}

fn wsne_gap_player<G: Game + ?Sized>(game: &G, profile: &MixedProfile, player: usize) -> f64 {
    let sign = game.orientation(player).sign();
    let pay: Vec<f64> = game.action_payoffs(&profile.slices(), player).iter().map(|v| sign * v).collect();
    let best = pay.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    profile
        .strategy(player)
        .support(SUPPORT_TOL)
        .into_iter()
        .map(|i| best - pay[i])
        .fold(0.0, f64::max)
}

/// Largest well-supported gap over all players of any game.
pub fn wsne_gap<G: Game + ?Sized>(game: &G, profile: &MixedProfile) -> Result<f64> {
    game::check_shape(game, profile)?;
    Ok((0..game.num_players()).map(|p| wsne_gap_player(game, profile, p)).fold(0.0, f64::max))
}

/// Converts an (ε²/8)-NE into an ε-WSNE: every action more than ε/2 below the best
/// response against the opponent's original strategy hands its mass to that best response.
pub fn ne_to_wsne(game: &BimatrixGame, profile: &MixedProfile, epsilon: f64) -> Result<MixedProfile> {
    game::check_shape(game, profile)?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Invalid(format!("ε = {epsilon} must be positive")));
    }
    let cert = epsilon_ne_report(game, profile)?;
    let need = epsilon * epsilon / 8.0;
    if cert.max_regret() > need + REGRET_TOL {
        return Err(Error::Precondition(format!(
            "profile regret {:.3e} exceeds ε²/8 = {need:.3e}",
            cert.max_regret()
        )));
    }
    let mut out = Vec::with_capacity(2);
    for p in 0..2 {
        let sign = game.orientation(p).sign();
        let pay: Vec<f64> = game.action_payoffs(&profile.slices(), p).iter().map(|v| sign * v).collect();
        let best = (0..pay.len()).fold(0, |b, a| if pay[a] > pay[b] { a } else { b });
        let mut probs = profile.strategy(p).probs().to_vec();
        let mut moved = 0.0;
        for a in 0..probs.len() {
            if pay[best] - pay[a] > epsilon / 2.0 {
                moved += probs[a];
                probs[a] = 0.0;
            }
        }
        probs[best] += moved;
        out.push(MixedStrategy::new(probs)?);
    }
    let converted = MixedProfile::new(out);
    let gap = wsne_gap(game, &converted)?;
    let drift = (0..2)
        .map(|p| converted.strategy(p).linf_distance(profile.strategy(p)))
        .fold(0.0, f64::max);
    if gap > epsilon + REGRET_TOL || drift > epsilon / 4.0 + REGRET_TOL {
        return Err(Error::Verification(format!(
            "converted profile has well-supported gap {gap:.3e} and drift {drift:.3e} for ε = {epsilon}"
        )));
    }
    Ok(converted)
}

/// One entry of the mass-versus-suboptimality audit.
#[derive(Clone, Debug, PartialEq)]
pub struct MassEntry {
    pub player: usize,
    pub action: usize,
    pub mass: f64,
    pub gap: f64,
}

/// In an ε²-NE a c-suboptimal action carries at most ε²/c mass; returns the entries that break this.
pub fn mass_bound_audit<G: Game + ?Sized>(game: &G, profile: &MixedProfile, epsilon: f64) -> Result<Vec<MassEntry>> {
    let cert = epsilon_ne_report(game, profile)?;
    let e2 = epsilon * epsilon;
    if cert.max_regret() > e2 + REGRET_TOL {
        return Err(Error::Precondition(format!("profile regret {:.3e} exceeds ε² = {e2:.3e}", cert.max_regret())));
    }
    let mut violations = Vec::new();
    for p in 0..game.num_players() {
        let sign = game.orientation(p).sign();
        let pay: Vec<f64> = game.action_payoffs(&profile.slices(), p).iter().map(|v| sign * v).collect();
        let best = pay.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (a, (&mass, &v)) in profile.strategy(p).probs().iter().zip(&pay).enumerate() {
            let c = best - v;
            if c > 0.0 && mass > e2 / c + 1e-9 {
                violations.push(MassEntry { player: p, action: a, mass, gap: c });
            }
        }
    }
    Ok(violations)
}
