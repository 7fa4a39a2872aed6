//! Euclidean projections onto the simplex and the coupled domain, plus simplex lattices.

use crate::error::{Error, Result};
use crate::game::MixedStrategy;
use crate::rational::Q;

pub const JOINT_TOL: f64 = 1e-10;
pub const JOINT_MAX_SWEEPS: usize = 100_000;
pub const GRID_CAP: u128 = 100_000_000;

/// Raw sort-and-threshold projection; the caller checks finiteness.
fn project_simplex_raw(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (k, &uk) in u.iter().enumerate() {
        cum += uk;
        let t = (cum - 1.0) / (k + 1) as f64;
        if uk - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&vi| (vi - theta).max(0.0)).collect()
}

pub fn project_simplex(v: &[f64]) -> Result<MixedStrategy> {
    if v.is_empty() {
        return Err(Error::Invalid("empty vector".into()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Invalid("non-finite entry in projection input".into()));
    }
    MixedStrategy::new(project_simplex_raw(v))
}

/// D = {(x, y) in Δⁿ×Δⁿ : |x_i − y_i| ≤ δ}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointDomain {
    pub n: usize,
    pub delta: f64,
}

impl JointDomain {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n == 0 || !delta.is_finite() || delta < 0.0 {
            return Err(Error::Invalid(format!("joint domain needs n ≥ 1 and δ ≥ 0 (got n={n}, δ={delta})")));
        }
        Ok(JointDomain { n, delta })
    }

    /// Largest violation of any defining constraint.
    pub fn violation(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        for s in [x, y] {
            v = v.max((s.iter().sum::<f64>() - 1.0).abs());
            v = s.iter().fold(v, |m, &p| m.max(-p));
        }
        x.iter().zip(y).fold(v, |m, (a, b)| m.max((a - b).abs() - self.delta))
    }

    fn project_box(&self, x: &mut [f64], y: &mut [f64]) {
        let h = self.delta / 2.0;
        for (a, b) in x.iter_mut().zip(y.iter_mut()) {
            let d = *a - *b;
            if d.abs() > self.delta {
                let m = (*a + *b) / 2.0;
                if d > 0.0 {
                    *a = m + h;
                    *b = m - h;
                } else {
                    *a = m - h;
                    *b = m + h;
                }
            }
        }
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean projection onto D by Dykstra's algorithm between Δⁿ×Δⁿ and the coupling box.
pub fn project_joint(x: &[f64], y: &[f64], domain: &JointDomain) -> Result<(MixedStrategy, MixedStrategy)> {
    let n = domain.n;
    if x.len() != n || y.len() != n {
        return Err(Error::Dimension(format!("joint point of sizes ({}, {}) for n = {n}", x.len(), y.len())));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("non-finite entry in projection input".into()));
    }
    let mut zx = x.to_vec();
    let mut zy = y.to_vec();
    if domain.violation(&zx, &zy) == 0.0 {
        return Ok((MixedStrategy::new(zx)?, MixedStrategy::new(zy)?));
    }
    let (mut px, mut py) = (vec![0.0; n], vec![0.0; n]);
    let (mut qx, mut qy) = (vec![0.0; n], vec![0.0; n]);
    let mut prev_sx = vec![f64::INFINITY; n];
    let mut prev_sy = vec![f64::INFINITY; n];
    let mut residual = f64::INFINITY;
    for _ in 0..JOINT_MAX_SWEEPS {
        let ax: Vec<f64> = zx.iter().zip(&px).map(|(a, b)| a + b).collect();
        let ay: Vec<f64> = zy.iter().zip(&py).map(|(a, b)| a + b).collect();
        let sx = project_simplex_raw(&ax);
        let sy = project_simplex_raw(&ay);
        px = ax.iter().zip(&sx).map(|(a, s)| a - s).collect();
        py = ay.iter().zip(&sy).map(|(a, s)| a - s).collect();
        let bx: Vec<f64> = sx.iter().zip(&qx).map(|(a, b)| a + b).collect();
        let by: Vec<f64> = sy.iter().zip(&qy).map(|(a, b)| a + b).collect();
        let mut nx = bx.clone();
        let mut ny = by.clone();
        domain.project_box(&mut nx, &mut ny);
        qx = bx.iter().zip(&nx).map(|(a, s)| a - s).collect();
        qy = by.iter().zip(&ny).map(|(a, s)| a - s).collect();
        let moved = (dist2(&nx, &zx) + dist2(&ny, &zy) + dist2(&sx, &prev_sx) + dist2(&sy, &prev_sy)).sqrt();
        zx = nx;
        zy = ny;
        // the simplex iterate is exactly in Δⁿ×Δⁿ; only the coupling constraint can be off
        let viol = domain.violation(&sx, &sy);
        residual = moved.max(viol);
        if moved <= JOINT_TOL && viol <= JOINT_TOL {
            return Ok((MixedStrategy::new(sx)?, MixedStrategy::new(sy)?));
        }
        prev_sx = sx;
        prev_sy = sy;
    }
    Err(Error::Numeric { message: format!("Dykstra did not converge in {JOINT_MAX_SWEEPS} sweeps"), residual })
}

/// Number of lattice points of Δⁿ with denominator m, or `None` on overflow.
pub fn grid_size(n: usize, m: usize) -> Option<u128> {
    if n == 0 {
        return Some(0);
    }
    // C(m + n − 1, n − 1)
    let k = (n - 1) as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc.checked_mul(m as u128 + i)? / i;
    }
    Some(acc)
}

/// Streaming enumeration of the compositions of m into n parts, in lexicographic order.
#[derive(Clone, Debug)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Compositions {
    pub fn new(n: usize, m: usize) -> Self {
        let current = (n > 0).then(|| {
            let mut c = vec![0; n];
            c[n - 1] = m;
            c
        });
        Compositions { current }
    }
}

impl Iterator for Compositions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let c = self.current.as_mut()?;
        let n = c.len();
        let mut tail = 0;
        let mut advanced = false;
        for i in (0..n.saturating_sub(1)).rev() {
            tail += c[i + 1];
            if tail > 0 {
                c[i] += 1;
                for v in c.iter_mut().skip(i + 1) {
                    *v = 0;
                }
                c[n - 1] = tail - 1;
                advanced = true;
                break;
            }
        }
        if !advanced {
            self.current = None;
        }
        Some(out)
    }
}

/// Lattice points of Δⁿ whose coordinates are multiples of 1/m, each once, never materialized.
pub fn simplex_grid(n: usize, m: usize) -> Result<impl Iterator<Item = MixedStrategy>> {
    simplex_grid_capped(n, m, GRID_CAP)
}

pub fn simplex_grid_capped(n: usize, m: usize, cap: u128) -> Result<impl Iterator<Item = MixedStrategy>> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid("grid needs n ≥ 1 and m ≥ 1".into()));
    }
    match grid_size(n, m) {
        Some(c) if c <= cap => {}
        _ => return Err(Error::Size(format!("simplex grid n={n}, m={m} exceeds cap {cap}"))),
    }
    let mf = m as f64;
    Ok(Compositions::new(n, m).map(move |c| {
        MixedStrategy::new(c.into_iter().map(|k| k as f64 / mf).collect()).expect("lattice point is feasible")
    }))
}

/// Same lattice with exact rational coordinates.
pub fn simplex_grid_exact(n: usize, m: usize) -> Result<impl Iterator<Item = Vec<Q>>> {
    if m == 0 || n == 0 {
        return Err(Error::Invalid("grid needs n ≥ 1 and m ≥ 1".into()));
    }
    match grid_size(n, m) {
        Some(c) if c <= GRID_CAP => {}
        _ => return Err(Error::Size(format!("simplex grid n={n}, m={m} exceeds cap"))),
    }
    Ok(Compositions::new(n, m).map(move |c| {
        c.into_iter().map(|k| Q::new((k as i64).into(), (m as i64).into())).collect()
    }))
}
