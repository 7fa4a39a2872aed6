//! Closed-form 2×2 zero-sum solutions and the three-player team game whose unique
//! equilibrium has irrational coordinates, with exact arithmetic in ℚ(√3).

use crate::error::{Error, Result};
use crate::game::{self, Game, MixedProfile, MixedStrategy, NormalFormGame, Orientation, TeamPartition};
use crate::rational::{q, qf, to_f64, Q, RatMatrix};
use num::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// p + q√3 with rational p, q.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    pub p: Q,
    pub q: Q,
}

impl QuadSurd {
    pub fn new(p: Q, q: Q) -> Self {
        QuadSurd { p, q }
    }

    pub fn rational(p: Q) -> Self {
        QuadSurd { p, q: Q::zero() }
    }

    pub fn zero() -> Self {
        Self::rational(Q::zero())
    }

    pub fn one() -> Self {
        Self::rational(Q::one())
    }

    pub fn sqrt3() -> Self {
        QuadSurd { p: Q::zero(), q: Q::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd { p: self.p.clone(), q: -self.q.clone() }
    }

    /// p² − 3q², zero only for the zero element since √3 is irrational.
    pub fn norm(&self) -> Q {
        &self.p * &self.p - q(3) * &self.q * &self.q
    }

    pub fn signum(&self) -> i32 {
        let sp = sign_of(&self.p);
        let sq = sign_of(&self.q);
        if sp == 0 || sq == 0 || sp == sq {
            return if sp != 0 { sp } else { sq };
        }
        // opposite signs: compare p² with 3q²
        match (&self.p * &self.p).cmp(&(q(3) * &self.q * &self.q)) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn to_real(&self) -> f64 {
        to_f64(&self.p) + to_f64(&self.q) * SQRT3
    }

    pub fn recip(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Invalid("division by zero in ℚ(√3)".into()));
        }
        Ok(QuadSurd { p: &self.p / &n, q: -&self.q / &n })
    }
}

fn sign_of(v: &Q) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

impl fmt::Debug for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}√3", self.p, self.q)
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({})·√3", self.p, self.q)
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadSurd {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn add(self, o: &QuadSurd) -> QuadSurd {
        QuadSurd { p: &self.p + &o.p, q: &self.q + &o.q }
    }
}

impl<'a> Sub<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn sub(self, o: &QuadSurd) -> QuadSurd {
        QuadSurd { p: &self.p - &o.p, q: &self.q - &o.q }
    }
}

impl<'a> Mul<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    fn mul(self, o: &QuadSurd) -> QuadSurd {
        QuadSurd { p: &self.p * &o.p + q(3) * &self.q * &o.q, q: &self.p * &o.q + &self.q * &o.p }
    }
}

impl<'a> Div<&'a QuadSurd> for &'a QuadSurd {
    type Output = QuadSurd;
    /// Panics on division by zero; use `recip` for a checked version.
    fn div(self, o: &QuadSurd) -> QuadSurd {
        self * &o.recip().expect("nonzero divisor")
    }
}

impl Neg for &QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { p: -&self.p, q: -&self.q }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<QuadSurd> for QuadSurd {
            type Output = QuadSurd;
            fn $m(self, o: QuadSurd) -> QuadSurd {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

/// Exact solution of a 2×2 zero-sum game where the row player minimizes ⟨x, A z⟩.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution2x2 {
    pub value: Q,
    pub row: [Q; 2],
    pub col: [Q; 2],
}

pub fn solve_2x2(a: &RatMatrix) -> Result<Solution2x2> {
    if a.shape() != (2, 2) {
        return Err(Error::Dimension(format!("expected 2x2, got {:?}", a.shape())));
    }
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    let c1 = (a11 - a12) * (a22 - a21);
    let c2 = (a11 - a21) * (a22 - a12);
    if !c1.is_positive() || !c2.is_positive() {
        return Err(Error::Degenerate("no fully mixed equilibrium; use support enumeration".into()));
    }
    let d = a11 - a12 - a21 + a22;
    let value = (a11 * a22 - a12 * a21) / &d;
    let row = [(a22 - a21) / &d, (a11 - a12) / &d];
    let col = [(a22 - a12) / &d, (a11 - a21) / &d];
    let az = a.mul_vec(&col);
    let atx = a.tr_mul_vec(&row);
    if az.iter().chain(&atx).any(|v| v != &value) {
        return Err(Error::Verification("closed form is not an equilibrium".into()));
    }
    Ok(Solution2x2 { value, row, col })
}

/// u(x, y, z) indexed [x][y][z]; the team (x, y) minimizes and z maximizes.
fn irrational_table() -> [[[Q; 2]; 2]; 2] {
    [
        [[q(1), qf(9, 10)], [q(3), qf(-1, 10)]],
        [[qf(99, 100), q(1)], [qf(-1, 100), q(3)]],
    ]
}

pub fn irrational_game() -> NormalFormGame {
    let t = irrational_table();
    let mut tensor = Vec::with_capacity(8);
    for row in &t {
        for col in row {
            tensor.extend(col.iter().cloned());
        }
    }
    NormalFormGame::new(
        vec![2, 2, 2],
        vec![tensor.clone(), tensor.clone(), tensor],
        vec![Orientation::Minimize, Orientation::Minimize, Orientation::Maximize],
        Some(TeamPartition { first: vec![0, 1], second: vec![2] }),
    )
    .expect("static table is well formed")
}

/// The equilibrium (x*, y*, z*) with coordinates in ℚ(√3).
pub fn irrational_equilibrium() -> [Vec<QuadSurd>; 3] {
    let s = |a: i64, b: i64, d: i64| QuadSurd::new(qf(a, d), qf(b, d));
    [
        vec![s(3, -1, 6), s(3, 1, 6)],
        vec![s(611, -9, 600), s(-11, 9, 600)],
        vec![s(3, 1, 6), s(3, -1, 6)],
    ]
}

pub fn surd_profile_to_real(profile: &[Vec<QuadSurd>]) -> Result<MixedProfile> {
    let vecs = profile.iter().map(|s| s.iter().map(QuadSurd::to_real).collect()).collect();
    MixedProfile::from_vecs(vecs)
}

/// Exact payoff of each pure action of `player` in a normal-form game, over ℚ(√3).
pub fn action_values_surd(game: &NormalFormGame, strategies: &[Vec<QuadSurd>], player: usize) -> Vec<QuadSurd> {
    let counts = game.action_counts();
    let mut out = vec![QuadSurd::zero(); counts[player]];
    let mut actions = vec![0usize; counts.len()];
    let total: usize = counts.iter().product();
    for _ in 0..total {
        let mut w = QuadSurd::one();
        for (qp, &a) in actions.iter().enumerate() {
            if qp != player {
                w = &w * &strategies[qp][a];
            }
        }
        let entry = QuadSurd::rational(game.pure_payoff(&actions, player).clone());
        out[actions[player]] = &out[actions[player]] + &(&w * &entry);
        for p in (0..actions.len()).rev() {
            actions[p] += 1;
            if actions[p] < counts[p] {
                break;
            }
            actions[p] = 0;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct IrrationalReport {
    pub regrets: [f64; 3],
    /// Exact payoff of each pure action, per player.
    pub action_values: [Vec<QuadSurd>; 3],
    /// Exact utility at the equilibrium.
    pub value: QuadSurd,
    /// The adversary's two actions are worth exactly the same.
    pub adversary_indifferent: bool,
    /// No pure deviation strictly improves any player, compared as surds.
    pub exact_ne: bool,
}

pub fn verify_irrational_equilibrium() -> Result<IrrationalReport> {
    let g = irrational_game();
    let eq = irrational_equilibrium();
    let real = surd_profile_to_real(&eq)?;
    let mut regrets = [0.0; 3];
    for (p, r) in regrets.iter_mut().enumerate() {
        *r = game::regret(&g, &real, p)?;
    }
    let values: Vec<Vec<QuadSurd>> = (0..3).map(|p| action_values_surd(&g, &eq, p)).collect();
    let utility = |p: usize| {
        values[p].iter().zip(&eq[p]).fold(QuadSurd::zero(), |acc, (v, w)| &acc + &(v * w))
    };
    let value = utility(2);
    let adversary_indifferent = values[2][0] == values[2][1];
    let exact_ne = (0..3).all(|p| {
        let current = utility(p);
        values[p].iter().all(|v| match g.orientation(p) {
            Orientation::Maximize => v <= &current,
            Orientation::Minimize => v >= &current,
        })
    });
    let mut it = values.into_iter();
    let action_values = [it.next().unwrap_or_default(), it.next().unwrap_or_default(), it.next().unwrap_or_default()];
    Ok(IrrationalReport { regrets, action_values, value, adversary_indifferent, exact_ne })
}

/// The 2×2 zero-sum game between x (rows, minimizing) and z (columns) induced by y = (1 − y₂, y₂).
pub fn induced_matrix(y2: &Q) -> RatMatrix {
    let one = Q::one();
    let d = &one + q(2) * y2;
    RatMatrix::from_rows(vec![
        vec![d.clone(), qf(9, 10) - y2],
        vec![qf(99, 100) - y2, d],
    ])
    .expect("2x2")
}

fn check_unit(y2: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&y2) {
        return Err(Error::Invalid(format!("y₂ = {y2} outside [0, 1]")));
    }
    Ok(())
}

/// v(y₂) = (109 + 5890 y₂ + 3000 y₂²)/(110 + 6000 y₂), exactly.
pub fn value_curve_exact(y2: &Q) -> Result<Q> {
    if y2.is_negative() || y2 > &Q::one() {
        return Err(Error::Invalid(format!("y₂ = {y2} outside [0, 1]")));
    }
    Ok((q(109) + q(5890) * y2 + q(3000) * y2 * y2) / (q(110) + q(6000) * y2))
}

pub fn team_value_curve(y2: f64) -> Result<f64> {
    check_unit(y2)?;
    Ok((109.0 + 5890.0 * y2 + 3000.0 * y2 * y2) / (110.0 + 6000.0 * y2))
}

/// Minimizer of the value curve, (9√3 − 11)/600.
pub fn value_curve_argmin() -> QuadSurd {
    QuadSurd::new(qf(-11, 600), qf(9, 600))
}

pub fn strategy_from_surds(s: &[QuadSurd]) -> Result<MixedStrategy> {
    MixedStrategy::new(s.iter().map(QuadSurd::to_real).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surd_field_ops() {
        let a = QuadSurd::new(q(2), q(1));
        let b = a.recip().unwrap();
        assert_eq!(&a * &b, QuadSurd::one());
        assert_eq!(&QuadSurd::sqrt3() * &QuadSurd::sqrt3(), QuadSurd::rational(q(3)));
        assert!(QuadSurd::new(q(-2), q(1)).signum() < 0);
        assert!(QuadSurd::new(q(2), q(-1)).signum() > 0);
        assert!((a.to_real() - (2.0 + 3f64.sqrt())).abs() < 1e-15);
        assert!(QuadSurd::zero().recip().is_err());
    }

    #[test]
    fn solve_2x2_examples() {
        let s = solve_2x2(&RatMatrix::from_i64(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(s.value, qf(1, 2));
        assert_eq!(s.row, [qf(1, 2), qf(1, 2)]);
        assert_eq!(s.col, [qf(1, 2), qf(1, 2)]);
        let s = solve_2x2(&induced_matrix(&Q::zero())).unwrap();
        assert_eq!(s.value, qf(109, 110));
        let err = solve_2x2(&RatMatrix::from_i64(&[&[1, 1], &[0, 0]]));
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn table_entries() {
        let g = irrational_game();
        assert_eq!(g.pure_payoff(&[0, 0, 0], 2), &q(1));
        assert_eq!(g.pure_payoff(&[0, 1, 0], 2), &q(3));
        assert_eq!(g.pure_payoff(&[1, 1, 1], 2), &q(3));
        assert_eq!(g.pure_payoff(&[1, 0, 0], 2), &qf(99, 100));
        assert!(g.is_team_zero_sum());
    }

    #[test]
    fn equilibrium_is_exact() {
        let rep = verify_irrational_equilibrium().unwrap();
        assert!(rep.adversary_indifferent && rep.exact_ne);
        assert_eq!(rep.action_values[2][0], QuadSurd::new(qf(578, 600), qf(9, 600)));
        assert!(rep.regrets.iter().all(|r| *r <= 1e-9));
        let eq = irrational_equilibrium();
        assert!((eq[0][0].to_real() - 0.2113249).abs() < 1e-7);
        assert!((eq[1][1].to_real() - 0.0076474).abs() < 1e-7);
        assert!((rep.value.to_real() - 0.9893141).abs() < 1e-7);
    }

    #[test]
    fn value_curve_points() {
        assert_eq!(value_curve_exact(&Q::zero()).unwrap(), qf(109, 110));
        assert_eq!(value_curve_exact(&Q::one()).unwrap(), qf(8999, 6110));
        assert!(team_value_curve(1.5).is_err());
        // derivative numerator 180000 y² + 6600 y − 61 vanishes at the argmin
        let y = value_curve_argmin();
        let poly = &(&QuadSurd::rational(q(180000)) * &(&y * &y)) + &(&QuadSurd::rational(q(6600)) * &y);
        assert_eq!(poly, QuadSurd::rational(q(61)));
    }
}
