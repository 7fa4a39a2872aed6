//! Learning dynamics on quadratic min-max problems. Player x descends on ∇_x f and player y
//! on −∇_y f; the symmetric algorithms apply the same rule to both.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::geometry::{project_joint, project_simplex};
use crate::minmax::{gda_gap, Domain, QuadraticMinMaxProblem, FEASIBILITY_TOL};
use crate::rational::linf;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Gda,
    ExtraGradient,
    OptimisticGda,
    Omwu,
    AlternatingGda,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] =
        [Algorithm::Gda, Algorithm::ExtraGradient, Algorithm::OptimisticGda, Algorithm::Omwu, Algorithm::AlternatingGda];

    /// Whether both players run the same rule on their own feedback.
    pub fn is_symmetric(self) -> bool {
        self != Algorithm::AlternatingGda
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Gda => "gda",
            Algorithm::ExtraGradient => "eg",
            Algorithm::OptimisticGda => "ogda",
            Algorithm::Omwu => "omwu",
            Algorithm::AlternatingGda => "alt-gda",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gda" => Ok(Algorithm::Gda),
            "eg" | "extragradient" | "extra-gradient" => Ok(Algorithm::ExtraGradient),
            "ogda" | "optimistic" | "optimistic-gda" => Ok(Algorithm::OptimisticGda),
            "omwu" => Ok(Algorithm::Omwu),
            "alt-gda" | "alternating" | "alternating-gda" | "altgda" => Ok(Algorithm::AlternatingGda),
            other => Err(Error::Invalid(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicsConfig {
    pub algorithm: Algorithm,
    pub stepsize: f64,
    pub horizon: usize,
    /// Defaults to (uniform, uniform).
    pub init: Option<(Vec<f64>, Vec<f64>)>,
}

impl DynamicsConfig {
    pub fn new(algorithm: Algorithm, stepsize: f64, horizon: usize) -> Self {
        DynamicsConfig { algorithm, stepsize, horizon, init: None }
    }

    pub fn with_init(mut self, x: Vec<f64>, y: Vec<f64>) -> Self {
        self.init = Some((x, y));
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub points: Vec<(Vec<f64>, Vec<f64>)>,
    pub gaps: Vec<f64>,
    pub drifts: Vec<f64>,
    pub utilities: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// max_t ‖x^t − y^t‖∞.
pub fn symmetry_drift(trajectory: &Trajectory) -> f64 {
    trajectory.drifts.iter().cloned().fold(0.0, f64::max)
}

/// min_t of the GDA gap.
pub fn min_gap(trajectory: &Trajectory) -> f64 {
    trajectory.gaps.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn project(domain: Domain, ux: &[f64], uy: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (a, b) = match domain {
        Domain::SimplexProduct { .. } => (project_simplex(ux)?, project_simplex(uy)?),
        Domain::Joint(d) => project_joint(ux, uy, &d)?,
    };
    Ok((a.into_vec(), b.into_vec()))
}

fn step(v: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
    v.iter().zip(g).map(|(a, b)| a - eta * b).collect()
}

fn optimistic(g: &[f64], prev: &[f64]) -> Vec<f64> {
    g.iter().zip(prev).map(|(a, b)| 2.0 * a - b).collect()
}

fn multiplicative(v: &[f64], g: &[f64], eta: f64) -> Result<Vec<f64>> {
    let logits: Vec<f64> = v.iter().zip(g).map(|(p, d)| p.ln() - eta * d).collect();
    let top = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let s: f64 = w.iter().sum();
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::Numeric { message: "multiplicative update overflowed".into(), residual: s });
    }
    Ok(w.into_iter().map(|p| p / s).collect())
}

/// Runs `config.horizon` updates and records the iterate after each one.
pub fn run(problem: &QuadraticMinMaxProblem, config: &DynamicsConfig) -> Result<Trajectory> {
    if config.horizon == 0 {
        return Err(Error::Invalid("horizon must be at least 1".into()));
    }
    if !(config.stepsize > 0.0 && config.stepsize.is_finite()) {
        return Err(Error::Invalid(format!("stepsize {} must be positive", config.stepsize)));
    }
    let (nx, ny) = problem.dims();
    let domain = problem.domain();
    let algo = config.algorithm;
    if matches!(domain, Domain::Joint(_)) && matches!(algo, Algorithm::Omwu | Algorithm::AlternatingGda) {
        return Err(Error::Unsupported(format!("{algo} over the coupled domain")));
    }
    let (mut x, mut y) = match &config.init {
        Some((x, y)) => (x.clone(), y.clone()),
        None => (MixedStrategy::uniform(nx).into_vec(), MixedStrategy::uniform(ny).into_vec()),
    };
    if x.len() != nx || y.len() != ny {
        return Err(Error::Dimension(format!("initial point of sizes ({}, {}) for ({nx}, {ny})", x.len(), y.len())));
    }
    let v = problem.violation(&x, &y);
    if v > FEASIBILITY_TOL {
        return Err(Error::Invalid(format!("initial point violates the domain by {v:.3e}")));
    }
    if algo == Algorithm::Omwu && x.iter().chain(&y).any(|p| *p <= 0.0) {
        return Err(Error::Invalid("OMWU needs a strictly positive initial point".into()));
    }
    let eta = config.stepsize;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut traj = Trajectory::default();
    for _ in 0..config.horizon {
        let (gx, gy) = problem.feedback(&x, &y)?;
        let (nx_, ny_) = match algo {
            Algorithm::Gda => project(domain, &step(&x, &gx, eta), &step(&y, &gy, eta))?,
            Algorithm::ExtraGradient => {
                let (hx, hy) = project(domain, &step(&x, &gx, eta), &step(&y, &gy, eta))?;
                let (hgx, hgy) = problem.feedback(&hx, &hy)?;
                project(domain, &step(&x, &hgx, eta), &step(&y, &hgy, eta))?
            }
            Algorithm::OptimisticGda | Algorithm::Omwu => {
                let (px, py) = prev.take().unwrap_or_else(|| (gx.clone(), gy.clone()));
                let (ox, oy) = (optimistic(&gx, &px), optimistic(&gy, &py));
                prev = Some((gx, gy));
                if algo == Algorithm::Omwu {
                    (multiplicative(&x, &ox, eta)?, multiplicative(&y, &oy, eta)?)
                } else {
                    project(domain, &step(&x, &ox, eta), &step(&y, &oy, eta))?
                }
            }
            Algorithm::AlternatingGda => {
                let x1 = project_simplex(&step(&x, &gx, eta))?.into_vec();
                let (_, gy1) = problem.feedback(&x1, &y)?;
                let y1 = project_simplex(&step(&y, &gy1, eta))?.into_vec();
                (x1, y1)
            }
        };
        x = nx_;
        y = ny_;
        if x.iter().chain(&y).any(|p| !p.is_finite()) {
            return Err(Error::Numeric { message: "iterate is not finite".into(), residual: f64::NAN });
        }
        traj.gaps.push(gda_gap(problem, &x, &y, 1.0)?.gap);
        traj.drifts.push(if nx == ny { linf(&x, &y) } else { f64::NAN });
        traj.utilities.push(problem.value(&x, &y)?);
        traj.points.push((x.clone(), y.clone()));
    }
    Ok(traj)
}
