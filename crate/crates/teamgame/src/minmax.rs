//! Quadratic min-max problems f(x, y) = ½yᵀQ_y y − ½xᵀQ_x x + yᵀM x with x minimizing and
//! y maximizing, GDA maps, fixed-point gaps, first-order checks and gap-to-VI bounds.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::geometry::{project_joint, project_simplex, JointDomain};
use crate::rational::{dot, matvec, matvec_t, spectral_norm, RatMatrix};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    SimplexProduct { nx: usize, ny: usize },
    Joint(JointDomain),
}

#[derive(Clone, Debug)]
pub struct QuadraticMinMaxProblem {
    qx: RatMatrix,
    qy: RatMatrix,
    m: RatMatrix,
    domain: Domain,
    qxf: DMatrix<f64>,
    qyf: DMatrix<f64>,
    mf: DMatrix<f64>,
    recorded_smoothness: Option<f64>,
    recorded_lipschitz: Option<f64>,
}

impl QuadraticMinMaxProblem {
    /// `m` has shape n_y × n_x.
    pub fn new(qx: RatMatrix, qy: RatMatrix, m: RatMatrix, domain: Domain) -> Result<Self> {
        if !qx.is_symmetric() || !qy.is_symmetric() {
            return Err(Error::Invalid("Q_x and Q_y must be symmetric".into()));
        }
        let (nx, ny) = (qx.rows(), qy.rows());
        if m.shape() != (ny, nx) {
            return Err(Error::Dimension(format!("M is {:?}, expected ({ny}, {nx})", m.shape())));
        }
        match domain {
            Domain::SimplexProduct { nx: a, ny: b } if (a, b) == (nx, ny) => {}
            Domain::Joint(d) if d.n == nx && d.n == ny => {}
            _ => return Err(Error::Dimension("domain does not match matrix sizes".into())),
        }
        if nx == 0 || ny == 0 {
            return Err(Error::Dimension("empty problem".into()));
        }
        let (qxf, qyf, mf) = (qx.to_f64(), qy.to_f64(), m.to_f64());
        Ok(QuadraticMinMaxProblem { qx, qy, m, domain, qxf, qyf, mf, recorded_smoothness: None, recorded_lipschitz: None })
    }

    pub fn on_simplices(qx: RatMatrix, qy: RatMatrix, m: RatMatrix) -> Result<Self> {
        let domain = Domain::SimplexProduct { nx: qx.rows(), ny: qy.rows() };
        Self::new(qx, qy, m, domain)
    }

    /// Records externally derived smoothness L and Lipschitz G constants.
    pub fn with_bounds(mut self, smoothness: f64, lipschitz: f64) -> Self {
        self.recorded_smoothness = Some(smoothness);
        self.recorded_lipschitz = Some(lipschitz);
        self
    }

    pub fn with_domain(mut self, domain: Domain) -> Result<Self> {
        let rebuilt = Self::new(self.qx.clone(), self.qy.clone(), self.m.clone(), domain)?;
        self.domain = rebuilt.domain;
        Ok(self)
    }

    pub fn qx(&self) -> &RatMatrix {
        &self.qx
    }

    pub fn qy(&self) -> &RatMatrix {
        &self.qy
    }

    pub fn m(&self) -> &RatMatrix {
        &self.m
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.qx.rows(), self.qy.rows())
    }

    pub fn recorded_smoothness(&self) -> Option<f64> {
        self.recorded_smoothness
    }

    pub fn recorded_lipschitz(&self) -> Option<f64> {
        self.recorded_lipschitz
    }

    /// Q_x = Q_y and M = −Mᵀ, exactly.
    pub fn antisymmetric(&self) -> bool {
        self.qx == self.qy && self.m.is_skew()
    }

    /// Conservative gradient-Lipschitz constant: the recorded one, else 2(‖Q_x‖ + ‖Q_y‖ + ‖M‖).
    pub fn smoothness(&self) -> f64 {
        self.recorded_smoothness.unwrap_or_else(|| {
            2.0 * (spectral_norm(&self.qxf) + spectral_norm(&self.qyf) + spectral_norm(&self.mf))
        })
    }

    /// Conservative bound on ‖∇f‖₂ over the domain: the recorded one, else ‖Q_x‖ + ‖Q_y‖ + 2‖M‖.
    pub fn lipschitz(&self) -> f64 {
        self.recorded_lipschitz.unwrap_or_else(|| {
            spectral_norm(&self.qxf) + spectral_norm(&self.qyf) + 2.0 * spectral_norm(&self.mf)
        })
    }

    fn check_dims(&self, x: &[f64], y: &[f64]) -> Result<()> {
        let (nx, ny) = self.dims();
        if x.len() != nx || y.len() != ny {
            return Err(Error::Dimension(format!("point of sizes ({}, {}) for problem ({nx}, {ny})", x.len(), y.len())));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_dims(x, y)?;
        Ok(0.5 * dot(y, &matvec(&self.qyf, y)) - 0.5 * dot(x, &matvec(&self.qxf, x)) + dot(y, &matvec(&self.mf, x)))
    }

    /// (∇_x f, ∇_y f) = (−Q_x x + Mᵀ y, Q_y y + M x).
    pub fn gradient(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_dims(x, y)?;
        let qx = matvec(&self.qxf, x);
        let mty = matvec_t(&self.mf, y);
        let qy = matvec(&self.qyf, y);
        let mx = matvec(&self.mf, x);
        let gx = qx.iter().zip(&mty).map(|(a, b)| -a + b).collect();
        let gy = qy.iter().zip(&mx).map(|(a, b)| a + b).collect();
        Ok((gx, gy))
    }

    /// What each player descends on: ∇_x f for x and −∇_y f for y. Under Q_x = Q_y and
    /// M = −Mᵀ both evaluate to bit-identical vectors at x = y.
    pub fn feedback(&self, x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.check_dims(x, y)?;
        let qx = matvec(&self.qxf, x);
        let mty = matvec_t(&self.mf, y);
        let qy = matvec(&self.qyf, y);
        let mx = matvec(&self.mf, x);
        let fx = qx.iter().zip(&mty).map(|(a, b)| -a + b).collect();
        let fy = qy.iter().zip(&mx).map(|(a, b)| -a - b).collect();
        Ok((fx, fy))
    }

    pub fn violation(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.domain {
            Domain::Joint(d) => d.violation(x, y),
            Domain::SimplexProduct { .. } => {
                let mut v: f64 = 0.0;
                for s in [x, y] {
                    v = v.max((s.iter().sum::<f64>() - 1.0).abs());
                    v = s.iter().fold(v, |m, &p| m.max(-p));
                }
                v
            }
        }
    }

    fn require_feasible(&self, x: &[f64], y: &[f64]) -> Result<()> {
        self.check_dims(x, y)?;
        let v = self.violation(x, y);
        if v > FEASIBILITY_TOL {
            return Err(Error::Invalid(format!("point violates the domain by {v:.3e}")));
        }
        Ok(())
    }
}

/// One projected gradient descent/ascent step.
pub fn gda_map(problem: &QuadraticMinMaxProblem, x: &[f64], y: &[f64], stepsize: f64) -> Result<(MixedStrategy, MixedStrategy)> {
    problem.require_feasible(x, y)?;
    let (gx, gy) = problem.gradient(x, y)?;
    let ux: Vec<f64> = x.iter().zip(&gx).map(|(a, g)| a - stepsize * g).collect();
    let uy: Vec<f64> = y.iter().zip(&gy).map(|(a, g)| a + stepsize * g).collect();
    match problem.domain() {
        Domain::SimplexProduct { .. } => Ok((project_simplex(&ux)?, project_simplex(&uy)?)),
        Domain::Joint(d) => project_joint(&ux, &uy, &d),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub gap: f64,
    pub stepsize: f64,
    /// Certified VI slack; only present at stepsize 1.
    pub vi_bound: Option<f64>,
    /// Which bound produced `vi_bound`.
    pub lemma: &'static str,
    pub point: (Vec<f64>, Vec<f64>),
}

pub const LEMMA_GRADIENT_MAPPING: &str = "gradient-mapping gap·(L+1)";
pub const LEMMA_SAFE_GDA: &str = "safe-gda √gap·(L+1)·√(G+4√2)";

pub fn gda_gap(problem: &QuadraticMinMaxProblem, x: &[f64], y: &[f64], stepsize: f64) -> Result<GapReport> {
    let (nx, ny) = gda_map(problem, x, y, stepsize)?;
    let d2: f64 = x
        .iter()
        .zip(nx.probs())
        .chain(y.iter().zip(ny.probs()))
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let gap = d2.sqrt();
    let (vi_bound, lemma) = match problem.domain() {
        Domain::SimplexProduct { .. } => (gap_to_vi_bound(gap, problem.smoothness())?, LEMMA_GRADIENT_MAPPING),
        Domain::Joint(_) => (safe_gap_to_vi_bound(gap, problem.smoothness(), problem.lipschitz())?, LEMMA_SAFE_GDA),
    };
    Ok(GapReport {
        gap,
        stepsize,
        vi_bound: (stepsize == 1.0).then_some(vi_bound),
        lemma,
        point: (x.to_vec(), y.to_vec()),
    })
}

/// (eps_x, eps_y): the largest first-order improvement available to each player at (x, y).
pub fn check_fone(problem: &QuadraticMinMaxProblem, x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if let Domain::Joint(_) = problem.domain() {
        return Err(Error::Unsupported("first-order check over the coupled domain".into()));
    }
    problem.require_feasible(x, y)?;
    let (gx, gy) = problem.gradient(x, y)?;
    let min_gx = gx.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_gy = gy.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok((dot(x, &gx) - min_gx, max_gy - dot(y, &gy)))
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Invalid(format!("{name} = {v} must be finite and nonnegative")));
    }
    Ok(())
}

/// gap·(L+1).
pub fn gap_to_vi_bound(gap: f64, l: f64) -> Result<f64> {
    nonneg("gap", gap)?;
    nonneg("L", l)?;
    Ok(gap * (l + 1.0))
}

/// √gap·(L+1)·√(G+4√2).
pub fn safe_gap_to_vi_bound(gap: f64, l: f64, g: f64) -> Result<f64> {
    nonneg("gap", gap)?;
    nonneg("L", l)?;
    nonneg("G", g)?;
    Ok(gap.sqrt() * safe_constant(l, g))
}

/// K = (L+1)·√(G+4√2).
pub fn safe_constant(l: f64, g: f64) -> f64 {
    (l + 1.0) * (g + 4.0 * std::f64::consts::SQRT_2).sqrt()
}

/// Structural antisymmetry plus |f(x,y) + f(y,x)| ≤ 1e−10 on seeded random pairs.
pub fn antisymmetry_check(problem: &QuadraticMinMaxProblem, samples: usize) -> Result<bool> {
    let (nx, ny) = problem.dims();
    if nx != ny {
        return Err(Error::Dimension(format!("antisymmetry needs n_x = n_y, got {nx} and {ny}")));
    }
    if !problem.antisymmetric() {
        return Ok(false);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..samples {
        let x = MixedStrategy::random(nx, &mut rng);
        let y = MixedStrategy::random(nx, &mut rng);
        let s = problem.value(x.probs(), y.probs())? + problem.value(y.probs(), x.probs())?;
        if s.abs() > 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::linf;

    fn rps() -> QuadraticMinMaxProblem {
        let c = RatMatrix::from_i64(&[&[0, -1, 1], &[1, 0, -1], &[-1, 1, 0]]);
        QuadraticMinMaxProblem::on_simplices(RatMatrix::zeros(3, 3), RatMatrix::zeros(3, 3), c).unwrap()
    }

    fn zero(n: usize) -> QuadraticMinMaxProblem {
        QuadraticMinMaxProblem::on_simplices(RatMatrix::zeros(n, n), RatMatrix::zeros(n, n), RatMatrix::zeros(n, n)).unwrap()
    }

    #[test]
    fn zero_problem() {
        let p = zero(3);
        let x = [0.2, 0.3, 0.5];
        let y = [1.0, 0.0, 0.0];
        let (gx, gy) = p.gradient(&x, &y).unwrap();
        assert!(gx.iter().chain(&gy).all(|v| *v == 0.0));
        let (nx, ny) = gda_map(&p, &x, &y, 1.0).unwrap();
        assert!(linf(nx.probs(), &x) < 1e-15 && linf(ny.probs(), &y) < 1e-15);
        assert_eq!(gda_gap(&p, &x, &y, 1.0).unwrap().gap, 0.0);
        assert_eq!(check_fone(&p, &x, &y).unwrap(), (0.0, 0.0));
        assert!(antisymmetry_check(&p, 10).unwrap());
    }

    #[test]
    fn rps_saddle() {
        let p = rps();
        let u = [1.0 / 3.0; 3];
        let (gx, gy) = p.gradient(&u, &u).unwrap();
        assert!(gx.iter().chain(&gy).all(|v| v.abs() < 1e-15));
        assert!(gda_gap(&p, &u, &u, 1.0).unwrap().gap < 1e-15);
        let (ex, ey) = check_fone(&p, &u, &u).unwrap();
        assert!(ex.abs() < 1e-15 && ey.abs() < 1e-15);
        assert!(antisymmetry_check(&p, 50).unwrap());
    }

    #[test]
    fn rps_vertex_step_fixture() {
        let p = rps();
        let e1 = [1.0, 0.0, 0.0];
        // ∇_x f = Mᵀe₁ = (0, −1, 1), ∇_y f = M e₁ = (0, 1, −1)
        let (nx, ny) = gda_map(&p, &e1, &e1, 1.0).unwrap();
        let ex = project_simplex(&[1.0, 1.0, -1.0]).unwrap();
        let ey = project_simplex(&[1.0, 1.0, -1.0]).unwrap();
        assert_eq!(nx.probs(), ex.probs());
        assert_eq!(ny.probs(), ey.probs());
        assert!(linf(nx.probs(), &[0.5, 0.5, 0.0]) < 1e-15);
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(gap_to_vi_bound(0.0, 5.0).unwrap(), 0.0);
        assert!((gap_to_vi_bound(0.01, 12.0).unwrap() - 0.13).abs() < 1e-15);
        assert_eq!(gap_to_vi_bound(1.0, 0.0).unwrap(), 1.0);
        assert!(gap_to_vi_bound(-1.0, 0.0).is_err());
        assert_eq!(safe_gap_to_vi_bound(0.0, 8.0, 8.0).unwrap(), 0.0);
        assert!((safe_gap_to_vi_bound(1e-4, 8.0, 8.0).unwrap() - 0.3326).abs() < 1e-4);
        assert!((safe_gap_to_vi_bound(1.0, 0.0, 0.0).unwrap() - 2.3784).abs() < 1e-4);
        assert!(safe_gap_to_vi_bound(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn fone_rejects_joint_domain() {
        let p = rps().with_domain(Domain::Joint(JointDomain::new(3, 0.5).unwrap())).unwrap();
        let u = [1.0 / 3.0; 3];
        assert!(matches!(check_fone(&p, &u, &u), Err(Error::Unsupported(_))));
    }

    #[test]
    fn asymmetric_q_detected() {
        let q1 = RatMatrix::from_i64(&[&[1, 0], &[0, 1]]);
        let p = QuadraticMinMaxProblem::on_simplices(q1, RatMatrix::zeros(2, 2), RatMatrix::zeros(2, 2)).unwrap();
        assert!(!antisymmetry_check(&p, 5).unwrap());
        let rect = QuadraticMinMaxProblem::on_simplices(RatMatrix::zeros(2, 2), RatMatrix::zeros(3, 3), RatMatrix::zeros(3, 2)).unwrap();
        assert!(antisymmetry_check(&rect, 5).is_err());
    }
}
