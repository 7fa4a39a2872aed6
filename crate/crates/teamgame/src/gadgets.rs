//! Forward constructions and certified back-maps for the four reductions: the 3-player
//! adversarial team gadget, the quadratic antisymmetric min-max gadget (plain and coupled
//! domain) and the symmetric 3 vs 3 team gadget.

use crate::checks::REGRET_TOL;
use crate::error::{Error, Result};
use crate::game::{
    self, decompose_symmetric_skew, BimatrixGame, Game, MixedProfile, MixedStrategy, Orientation, PairTerm,
    PolymatrixGame, TeamPartition,
};
use crate::geometry::JointDomain;
use crate::minmax::{gda_gap, safe_constant, Domain, QuadraticMinMaxProblem, FEASIBILITY_TOL};
use crate::oracle::{symmetric_support_enumeration, SUPPORT_ENUM_CAP};
use crate::rational::{from_f64, q, to_f64, Q, RatMatrix};
use num::{Signed, Zero};

pub const MAX_GADGET_EPSILON: f64 = 0.1;
const SYMMETRY_TOL: f64 = 1e-9;

/// Returns A − (A_max + 2) and the added constant −(A_max + 2); every entry of the result is ≤ −2.
pub fn shift_entries(a: &RatMatrix) -> Result<(RatMatrix, Q)> {
    let max = a.max_entry().ok_or_else(|| Error::Dimension("empty matrix".into()))?;
    let shift = -(max + q(2));
    Ok((a.shifted(&shift), shift))
}

fn check_gadget_matrix(a: &RatMatrix) -> Result<Q> {
    if !a.is_square() || a.rows() == 0 {
        return Err(Error::Dimension(format!("{:?} matrix is not square", a.shape())));
    }
    if !a.is_symmetric() {
        return Err(Error::Invalid("A must be symmetric".into()));
    }
    let max = a.max_entry().expect("nonempty");
    if max > &q(-1) {
        return Err(Error::Invalid(format!("entry {max} > −1; shift the matrix first")));
    }
    Ok(a.min_entry().expect("nonempty").abs())
}

fn check_epsilon(eps: f64) -> Result<Q> {
    if !(eps > 0.0 && eps <= MAX_GADGET_EPSILON) {
        return Err(Error::Invalid(format!("ε = {eps} outside (0, 1/10]")));
    }
    from_f64(eps)
}

/// Coupling matrices for δ(x, y, z): `(z-x term, z-y term)`, each (2n+1)×n.
fn coupling_terms(n: usize, amin: &Q, eps: &Q) -> (RatMatrix, RatMatrix) {
    let c = amin / eps;
    let zx = RatMatrix::from_fn(2 * n + 1, n, |r, col| {
        if r == 2 * n {
            // z_{2n+1}|A_min| written as z_{2n+1}·Σ x_j |A_min|
            amin.clone()
        } else if r == col {
            c.clone()
        } else if r == n + col {
            -c.clone()
        } else {
            Q::zero()
        }
    });
    let zy = RatMatrix::from_fn(2 * n + 1, n, |r, col| {
        if r == col {
            -c.clone()
        } else if r == n + col {
            c.clone()
        } else {
            Q::zero()
        }
    });
    (zx, zy)
}

/// δ(x, y, z) evaluated directly.
pub fn coupling_value(amin: f64, eps: f64, x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let n = x.len();
    let mut s = 0.0;
    for i in 0..n {
        s += z[i] * (x[i] - y[i]) + z[n + i] * (y[i] - x[i]);
    }
    amin / eps * s + amin * z[2 * n]
}

fn utility_range(terms: &[PairTerm]) -> Q {
    terms.iter().map(|t| t.matrix.max_abs()).fold(Q::zero(), |a, b| a + b)
}

/// 3-player adversarial team game: x and y minimize, the adversary z maximizes.
#[derive(Clone, Debug)]
pub struct TeamGadgetInstance {
    pub a: RatMatrix,
    pub epsilon: f64,
    pub amin: Q,
    /// Constant added to the caller's matrix, if it was shifted.
    pub shift: Option<Q>,
    /// Bound on |u| over all profiles.
    pub range: Q,
    pub game: PolymatrixGame,
}

impl TeamGadgetInstance {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn amin_f64(&self) -> f64 {
        to_f64(&self.amin)
    }

    /// Adversary utility evaluated from the defining formula.
    pub fn direct_utility(&self, profile: &MixedProfile) -> Result<f64> {
        game::check_shape(&self.game, profile)?;
        let (x, y, z) = (profile.strategy(0).probs(), profile.strategy(1).probs(), profile.strategy(2).probs());
        let af = self.a.to_f64();
        Ok(crate::rational::dot(x, &crate::rational::matvec(&af, y)) + coupling_value(self.amin_f64(), self.epsilon, x, y, z))
    }
}

pub fn team_gadget(a: &RatMatrix, epsilon: f64) -> Result<TeamGadgetInstance> {
    let amin = check_gadget_matrix(a)?;
    let eps = check_epsilon(epsilon)?;
    let n = a.rows();
    let (zx, zy) = coupling_terms(n, &amin, &eps);
    let terms = vec![
        PairTerm { i: 0, j: 1, matrix: a.clone() },
        PairTerm { i: 2, j: 0, matrix: zx },
        PairTerm { i: 2, j: 1, matrix: zy },
    ];
    let range = utility_range(&terms);
    let game = PolymatrixGame::new(
        vec![n, n, 2 * n + 1],
        vec![Orientation::Minimize, Orientation::Minimize, Orientation::Maximize],
        terms,
        Some(TeamPartition::new(vec![0, 1], vec![2], 3)?),
    )?;
    Ok(TeamGadgetInstance { a: a.clone(), epsilon, amin, shift: None, range, game })
}

/// Shifts `a` so its entries are ≤ −1 when needed, then builds the gadget.
pub fn team_gadget_shifted(a: &RatMatrix, epsilon: f64) -> Result<TeamGadgetInstance> {
    if a.max_entry().map_or(false, |m| m <= &q(-1)) {
        return team_gadget(a, epsilon);
    }
    let (shifted, shift) = shift_entries(a)?;
    let mut inst = team_gadget(&shifted, epsilon)?;
    inst.shift = Some(shift);
    Ok(inst)
}

/// First symmetric minimizing equilibrium of (A, A) found by support enumeration.
fn symmetric_min_ne(a: &RatMatrix) -> Result<Vec<Q>> {
    if a.rows() > SUPPORT_ENUM_CAP {
        return Err(Error::Size(format!("n = {} exceeds the support enumeration cap", a.rows())));
    }
    symmetric_support_enumeration(a, Orientation::Minimize)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::Numeric { message: "no symmetric equilibrium found".into(), residual: f64::NAN })
}

/// (x̄, x̄, e_{2n+1}) with x̄ an exact symmetric minimizing equilibrium of (A, A).
pub fn canonical_team_ne(instance: &TeamGadgetInstance) -> Result<MixedProfile> {
    let x = MixedStrategy::from_exact(&symmetric_min_ne(&instance.a)?)?;
    let n = instance.n();
    let profile = MixedProfile::new(vec![x.clone(), x, MixedStrategy::pure(2 * n + 1, 2 * n)]);
    let r = game::max_regret(&instance.game, &profile)?;
    if r > 1e-9 {
        return Err(Error::Verification(format!("canonical profile has regret {r:.3e}")));
    }
    Ok(profile)
}

fn require_certified<G: Game + ?Sized>(game: &G, profile: &MixedProfile, eps2: f64) -> Result<f64> {
    let r = game::max_regret(game, profile)?;
    if r > eps2 + REGRET_TOL {
        return Err(Error::Precondition(format!("profile has regret {r:.3e} > {eps2:.3e}")));
    }
    Ok(r)
}

/// (21n+1)·|A_min|·ε.
pub fn team_backmap_bound(n: usize, amin: f64, epsilon: f64) -> f64 {
    (21.0 * n as f64 + 1.0) * amin * epsilon
}

/// Maps a certified ε²-NE of the gadget to y*, a symmetric (21n+1)|A_min|ε-NE of (A, A).
pub fn team_backmap(instance: &TeamGadgetInstance, profile: &MixedProfile, eps2_certified: f64) -> Result<(MixedStrategy, f64)> {
    if !(eps2_certified >= 0.0) || eps2_certified > instance.epsilon * instance.epsilon + REGRET_TOL {
        return Err(Error::Precondition(format!(
            "certificate ε² = {eps2_certified} exceeds the gadget scale ε² = {}",
            instance.epsilon * instance.epsilon
        )));
    }
    require_certified(&instance.game, profile, eps2_certified)?;
    Ok((profile.strategy(1).clone(), team_backmap_bound(instance.n(), instance.amin_f64(), instance.epsilon)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureAudit {
    pub max_xy_gap: f64,
    pub max_z_mass: f64,
}

fn audit_pair(x: &[f64], y: &[f64], z: &[f64], eps: f64) -> Result<StructureAudit> {
    let n = x.len();
    let max_xy_gap = crate::rational::linf(x, y);
    let max_z_mass = z[..2 * n].iter().cloned().fold(0.0, f64::max);
    if max_xy_gap > 2.0 * eps + 1e-12 {
        return Err(Error::LemmaViolation(format!("‖x − y‖∞ = {max_xy_gap:.3e} > 2ε = {:.3e}", 2.0 * eps)));
    }
    if max_z_mass > 9.0 * eps + 1e-12 {
        return Err(Error::LemmaViolation(format!("z_j = {max_z_mass:.3e} > 9ε = {:.3e}", 9.0 * eps)));
    }
    Ok(StructureAudit { max_xy_gap, max_z_mass })
}

fn check_audit_eps(instance_eps: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= instance_eps) {
        return Err(Error::Precondition(format!("ε = {eps} must lie in (0, {instance_eps}]")));
    }
    Ok(())
}

/// For a certified ε²-NE: asserts ‖x − y‖∞ ≤ 2ε and z_j ≤ 9ε for j ≤ 2n, with ε the gadget scale.
pub fn gadget_structure_audit(instance: &TeamGadgetInstance, profile: &MixedProfile, eps: f64) -> Result<StructureAudit> {
    check_audit_eps(instance.epsilon, eps)?;
    require_certified(&instance.game, profile, eps * eps)?;
    audit_pair(profile.strategy(0).probs(), profile.strategy(1).probs(), profile.strategy(2).probs(), instance.epsilon)
}

fn check_unit_box(r: &RatMatrix) -> Result<()> {
    if !r.is_square() || r.rows() == 0 {
        return Err(Error::Dimension(format!("{:?} matrix is not square", r.shape())));
    }
    if r.max_abs() > q(1) {
        return Err(Error::Invalid("entries of R must lie in [−1, 1]".into()));
    }
    Ok(())
}

/// f(x, y) = ½⟨y, Ay⟩ − ½⟨x, Ax⟩ + ⟨y, Cx⟩ with A, C the symmetric and skew parts of R.
pub fn quadratic_gadget(r: &RatMatrix) -> Result<QuadraticMinMaxProblem> {
    check_unit_box(r)?;
    let (a, c) = decompose_symmetric_skew(r)?;
    let n = r.rows() as f64;
    Ok(QuadraticMinMaxProblem::on_simplices(a.clone(), a, c)?.with_bounds(4.0 * n, 4.0 * n))
}

/// √2·gap·(2n+1).
pub fn symmetric_backmap_bound(n: usize, gap: f64) -> f64 {
    std::f64::consts::SQRT_2 * gap * (2.0 * n as f64 + 1.0)
}

/// Bound on the symmetric-NE regret of (x*, x*) in (R, Rᵀ) from a certified GDA gap.
pub fn symmetric_backmap(r: &RatMatrix, x: &[f64], y: &[f64], gap: f64) -> Result<f64> {
    let problem = quadratic_gadget(r)?;
    if crate::rational::linf(x, y) > SYMMETRY_TOL {
        return Err(Error::Precondition("the point is not symmetric".into()));
    }
    let measured = gda_gap(&problem, x, y, 1.0)?.gap;
    if !(gap >= measured - 1e-12) {
        return Err(Error::Precondition(format!("claimed gap {gap:.3e} below measured {measured:.3e}")));
    }
    Ok(symmetric_backmap_bound(r.rows(), gap))
}

/// δ = ε^{1/4}·n^{−1/4}.
pub fn default_delta(target_gap: f64, n: usize) -> f64 {
    (target_gap / n as f64).powf(0.25)
}

/// The quadratic gadget restricted to {(x, y) : |x_i − y_i| ≤ δ}.
pub fn coupled_gadget(r: &RatMatrix, delta: f64) -> Result<QuadraticMinMaxProblem> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Invalid(format!("δ = {delta} outside [0, 1]")));
    }
    let base = quadratic_gadget(r)?;
    base.with_domain(Domain::Joint(JointDomain::new(r.rows(), delta)?))
}

/// 2n²δ + 2K·n^{3/2}·√gap/δ with K = (L+1)√(G+4√2).
pub fn median_backmap_bound(n: usize, gap: f64, delta: f64, l: f64, g: f64) -> f64 {
    let n = n as f64;
    let second = if gap == 0.0 { 0.0 } else { 2.0 * safe_constant(l, g) * n.powf(1.5) * gap.sqrt() / delta };
    2.0 * n * n * delta + second
}

/// Midpoint of a certified safe-GDA point on the coupled domain and its symmetric-NE bound.
pub fn median_backmap(r: &RatMatrix, x: &[f64], y: &[f64], gap: f64, delta: f64) -> Result<(MixedStrategy, f64)> {
    let problem = coupled_gadget(r, delta)?;
    if problem.violation(x, y) > FEASIBILITY_TOL {
        return Err(Error::Precondition("point is outside the coupled domain".into()));
    }
    let measured = gda_gap(&problem, x, y, 1.0)?.gap;
    if !(gap >= measured - 1e-12) {
        return Err(Error::Precondition(format!("claimed gap {gap:.3e} below measured {measured:.3e}")));
    }
    let mid = MixedStrategy::new(x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect())?;
    let l = problem.smoothness();
    let g = problem.lipschitz();
    Ok((mid, median_backmap_bound(r.rows(), gap, delta, l, g)))
}

/// Six players x, y, z, x̂, ŷ, ẑ; the hatted team receives u and maximizes it.
#[derive(Clone, Debug)]
pub struct Team3v3Instance {
    pub a: RatMatrix,
    pub c: RatMatrix,
    pub epsilon: f64,
    pub amin: Q,
    pub shift: Option<Q>,
    pub range: Q,
    pub game: PolymatrixGame,
}

impl Team3v3Instance {
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn amin_f64(&self) -> f64 {
        to_f64(&self.amin)
    }

    /// u(x, y, z, x̂, ŷ, ẑ) evaluated from the defining formula.
    pub fn direct_utility(&self, profile: &MixedProfile) -> Result<f64> {
        game::check_shape(&self.game, profile)?;
        let s = profile.slices();
        let (af, cf) = (self.a.to_f64(), self.c.to_f64());
        let bil = |m: &nalgebra::DMatrix<f64>, u: &[f64], v: &[f64]| crate::rational::dot(u, &crate::rational::matvec(m, v));
        let am = self.amin_f64();
        Ok(bil(&af, s[0], s[1]) - bil(&af, s[3], s[4]) + bil(&cf, s[0], s[3])
            + coupling_value(am, self.epsilon, s[0], s[1], s[5])
            - coupling_value(am, self.epsilon, s[3], s[4], s[2]))
    }

    /// (x, x, e_{2n+1}, x, x, e_{2n+1}).
    pub fn mirrored_profile(&self, x: &MixedStrategy) -> MixedProfile {
        let e = MixedStrategy::pure(2 * self.n() + 1, 2 * self.n());
        MixedProfile::new(vec![x.clone(), x.clone(), e.clone(), x.clone(), x.clone(), e])
    }
}

/// A := −½(R + Rᵀ) (shifted to entries ≤ −1 when needed) and C := Rᵀ − R.
pub fn team3v3_gadget(r: &RatMatrix, epsilon: f64) -> Result<Team3v3Instance> {
    if !r.is_square() || r.rows() == 0 {
        return Err(Error::Dimension(format!("{:?} matrix is not square", r.shape())));
    }
    let eps = check_epsilon(epsilon)?;
    let (sym, _) = decompose_symmetric_skew(r)?;
    let mut a = sym.neg();
    let mut shift = None;
    if a.max_entry().expect("nonempty") > &q(-1) {
        let (s, k) = shift_entries(&a)?;
        a = s;
        shift = Some(k);
    }
    let c = r.transpose().sub(r)?;
    let amin = check_gadget_matrix(&a)?;
    let n = r.rows();
    let (zx, zy) = coupling_terms(n, &amin, &eps);
    let terms = vec![
        PairTerm { i: 0, j: 1, matrix: a.clone() },
        PairTerm { i: 3, j: 4, matrix: a.neg() },
        PairTerm { i: 0, j: 3, matrix: c.clone() },
        PairTerm { i: 5, j: 0, matrix: zx.clone() },
        PairTerm { i: 5, j: 1, matrix: zy.clone() },
        PairTerm { i: 2, j: 3, matrix: zx.neg() },
        PairTerm { i: 2, j: 4, matrix: zy.neg() },
    ];
    let range = utility_range(&terms);
    let min = Orientation::Minimize;
    let max = Orientation::Maximize;
    let game = PolymatrixGame::new(
        vec![n, n, 2 * n + 1, n, n, 2 * n + 1],
        vec![min, min, min, max, max, max],
        terms,
        Some(TeamPartition::new(vec![0, 1, 2], vec![3, 4, 5], 6)?),
    )?;
    Ok(Team3v3Instance { a, c, epsilon, amin, shift, range, game })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Team3v3Audit {
    pub team: StructureAudit,
    pub hatted: StructureAudit,
}

/// Audits both closeness lemmas on a certified team-symmetric ε²-NE and returns x* with the
/// (21n+1)|A_min|ε bound for the symmetric-NE claim in (R, Rᵀ).
pub fn team3v3_audit_and_backmap(
    instance: &Team3v3Instance,
    profile: &MixedProfile,
    eps: f64,
) -> Result<(MixedStrategy, f64, Team3v3Audit)> {
    check_audit_eps(instance.epsilon, eps)?;
    game::check_shape(&instance.game, profile)?;
    let s = profile.slices();
    for k in 0..3 {
        if crate::rational::linf(s[k], s[k + 3]) > SYMMETRY_TOL {
            return Err(Error::Precondition("profile is not symmetric across the two teams".into()));
        }
    }
    require_certified(&instance.game, profile, eps * eps)?;
    let team = audit_pair(s[0], s[1], s[2], instance.epsilon)?;
    let hatted = audit_pair(s[3], s[4], s[5], instance.epsilon)?;
    let bound = team_backmap_bound(instance.n(), instance.amin_f64(), instance.epsilon);
    Ok((profile.strategy(0).clone(), bound, Team3v3Audit { team, hatted }))
}

/// Symmetric-NE regret of (x, x) in (R, Rᵀ).
pub fn symmetric_regret(r: &RatMatrix, x: &MixedStrategy) -> Result<f64> {
    let g = BimatrixGame::symmetric_from(r.clone())?;
    game::max_regret(&g, &MixedProfile::new(vec![x.clone(), x.clone()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn a2() -> RatMatrix {
        RatMatrix::from_i64(&[&[-1, -2], &[-2, -1]])
    }

    #[test]
    fn action_counts_and_utility() {
        let inst = team_gadget(&a2(), 0.1).unwrap();
        assert_eq!(inst.game.action_counts(), vec![2, 2, 5]);
        let p = MixedProfile::from_vecs(vec![vec![0.5, 0.5], vec![0.5, 0.5], vec![0.0, 0.0, 0.0, 0.0, 1.0]]).unwrap();
        let u = game::evaluate_utility(&inst.game, &p, 2).unwrap();
        assert!((u - 0.5).abs() < 1e-12);
        assert!((inst.direct_utility(&p).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(team_gadget(&RatMatrix::from_i64(&[&[-1, -2], &[-3, -1]]), 0.1).is_err());
        assert!(team_gadget(&RatMatrix::from_i64(&[&[0, -2], &[-2, -1]]), 0.1).is_err());
        assert!(team_gadget(&a2(), 0.2).is_err());
        assert!(team_gadget(&a2(), 0.0).is_err());
        let shifted = team_gadget_shifted(&RatMatrix::from_i64(&[&[1, 0], &[0, 1]]), 0.1).unwrap();
        assert_eq!(shifted.shift, Some(q(-3)));
        assert_eq!(shifted.a, RatMatrix::from_i64(&[&[-2, -3], &[-3, -2]]));
    }

    #[test]
    fn canonical_equilibria() {
        let inst = team_gadget(&a2(), 0.1).unwrap();
        let p = canonical_team_ne(&inst).unwrap();
        assert_eq!(p.strategy(0).probs(), &[0.5, 0.5]);
        assert_eq!(p.strategy(2).probs(), &[0.0, 0.0, 0.0, 0.0, 1.0]);
        let inst = team_gadget(&RatMatrix::from_i64(&[&[-1, -3], &[-3, -1]]), 0.1).unwrap();
        assert_eq!(canonical_team_ne(&inst).unwrap().strategy(1).probs(), &[0.5, 0.5]);
        let dominant = team_gadget(&RatMatrix::from_i64(&[&[-5, -4], &[-4, -1]]), 0.1).unwrap();
        assert_eq!(canonical_team_ne(&dominant).unwrap().strategy(0).probs(), &[1.0, 0.0]);
    }

    #[test]
    fn backmap_bound_and_precondition() {
        assert!((team_backmap_bound(2, 2.0, 0.01) - 0.86).abs() < 1e-12);
        let inst = team_gadget(&a2(), 0.01).unwrap();
        let p = canonical_team_ne(&inst).unwrap();
        let (y, bound) = team_backmap(&inst, &p, 1e-4).unwrap();
        assert_eq!(y.probs(), &[0.5, 0.5]);
        assert!((bound - 0.86).abs() < 1e-12);
        let bad = p.with_strategy(0, MixedStrategy::pure(2, 0));
        assert!(matches!(team_backmap(&inst, &bad, 1e-4), Err(Error::Precondition(_))));
        let audit = gadget_structure_audit(&inst, &p, 0.01).unwrap();
        assert_eq!((audit.max_xy_gap, audit.max_z_mass), (0.0, 0.0));
    }

    #[test]
    fn quadratic_gadget_shapes() {
        let skew = RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let p = quadratic_gadget(&skew).unwrap();
        assert!(p.qx().is_zero() && p.qy().is_zero());
        // row 1 strictly dominates, so the saddle sits at (e₁, e₁) rather than at uniform
        assert_eq!(gda_gap(&p, &[1.0, 0.0], &[1.0, 0.0], 1.0).unwrap().gap, 0.0);
        assert!((gda_gap(&p, &[0.5, 0.5], &[0.5, 0.5], 1.0).unwrap().gap - 1.0).abs() < 1e-12);
        let rps = RatMatrix::from_i64(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]);
        let u = [1.0 / 3.0; 3];
        assert!(gda_gap(&quadratic_gadget(&rps).unwrap(), &u, &u, 1.0).unwrap().gap < 1e-15);
        let sym = RatMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        assert!(quadratic_gadget(&sym).unwrap().m().is_zero());
        assert!(quadratic_gadget(&RatMatrix::from_i64(&[&[2, 0], &[0, 0]])).is_err());
        assert_eq!(p.recorded_smoothness(), Some(8.0));
    }

    #[test]
    fn backmap_formulas() {
        assert!((symmetric_backmap_bound(4, 0.001) - 0.012_727_922).abs() < 1e-8);
        assert_eq!(symmetric_backmap_bound(3, 0.0), 0.0);
        let delta = default_delta(1e-4, 2);
        assert!((delta - 0.084_089_6).abs() < 1e-6);
        let b = median_backmap_bound(2, 1e-4, delta, 8.0, 8.0);
        assert!((b - 23.05).abs() < 0.01, "{b}");
        assert_eq!(median_backmap_bound(2, 0.0, 1.0, 8.0, 8.0), 8.0);
    }

    #[test]
    fn coupled_domain_limits() {
        let r = RatMatrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let p = coupled_gadget(&r, 1.0).unwrap();
        let x = [0.3, 0.7];
        let y = [0.6, 0.4];
        let a = gda_gap(&p, &x, &y, 1.0).unwrap().gap;
        let b = gda_gap(&quadratic_gadget(&r).unwrap(), &x, &y, 1.0).unwrap().gap;
        assert!((a - b).abs() < 1e-9);
        let diag = coupled_gadget(&r, 0.0).unwrap();
        assert!(diag.violation(&x, &y) > 0.2);
        let (mid, bound) = median_backmap(&r, &[1.0, 0.0], &[1.0, 0.0], 0.0, 1.0).unwrap();
        assert_eq!((mid.probs().to_vec(), bound), (vec![1.0, 0.0], 8.0));
        assert!(matches!(median_backmap(&r, &[0.5, 0.5], &[0.5, 0.5], 0.0, 1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn team3v3_structure() {
        let r = RatMatrix::from_rows(vec![vec![qf(1, 2), q(-1)], vec![q(1), qf(-1, 3)]]).unwrap();
        let inst = team3v3_gadget(&r, 0.05).unwrap();
        assert_eq!(inst.game.action_counts(), vec![2, 2, 5, 2, 2, 5]);
        assert!(inst.c.is_skew());
        let x = MixedStrategy::new(vec![0.3, 0.7]).unwrap();
        let p = inst.mirrored_profile(&x);
        assert!(inst.direct_utility(&p).unwrap().abs() < 1e-12);
        assert!((game::evaluate_utility(&inst.game, &p, 3).unwrap()).abs() < 1e-12);
        let rot = MixedProfile::new(vec![
            x.clone(),
            x.clone(),
            MixedStrategy::pure(5, 4),
            MixedStrategy::pure(2, 1),
            MixedStrategy::pure(2, 1),
            MixedStrategy::pure(5, 4),
        ]);
        assert!(matches!(team3v3_audit_and_backmap(&inst, &rot, 0.05), Err(Error::Precondition(_))));
    }
}
