//! Exact rational helpers and a dense rational matrix.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // very large numerators/denominators: scale down before converting
        let n = v.numer().to_f64().unwrap_or(f64::NAN);
        let d = v.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Exact rational image of a finite double.
pub fn from_f64(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| Error::Invalid(format!("non-finite value {v}")))
}

/// Parses "p/q", integers and decimal literals (with optional exponent) exactly.
pub fn parse_rational(s: &str) -> Result<Q> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Invalid("empty number".into()));
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Invalid(format!("bad numerator in {t:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Invalid(format!("bad denominator in {t:?}")))?;
        if d.is_zero() {
            return Err(Error::Invalid(format!("zero denominator in {t:?}")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = t[pos + 1..].parse().map_err(|_| Error::Invalid(format!("bad exponent in {t:?}")))?;
            (&t[..pos], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Invalid(format!("not a number: {t:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Invalid(format!("not a number: {t:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(digits.parse::<BigInt>().unwrap_or_default());
    let scale = exp - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num::pow(ten, scale as usize);
    } else {
        value /= num::pow(ten, (-scale) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// Canonical string form: "p" for integers, "p/q" otherwise.
pub fn format_rational(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn q_sqrt_f64(v: &Q) -> f64 {
    to_f64(v).sqrt()
}

/// Solves `a x = b` exactly by Gauss-Jordan elimination. `None` when `a` is singular.
pub fn solve_exact(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Q::one() / &a[col][col];
        for c in col..n {
            a[col][c] = &a[col][c] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &factor * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some(b)
}

/// Dense row-major matrix of rationals.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(format_rational).collect())
            .collect();
        write!(f, "RatMatrix{rows:?}")
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Q>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged matrix rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect())
            .expect("rectangular literal")
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RatMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[Q] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_skew(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..=i).all(|j| *self.get(i, j) == -self.get(j, i)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Q) -> Q) -> Self {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&Q, &Q) -> Q) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!("{:?} vs {:?}", self.shape(), other.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.map(|v| v * s)
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v)
    }

    /// Adds `s` to every entry.
    pub fn shifted(&self, s: &Q) -> Self {
        self.map(|v| v + s)
    }

    pub fn min_entry(&self) -> Option<&Q> {
        self.data.iter().min()
    }

    pub fn max_entry(&self) -> Option<&Q> {
        self.data.iter().max()
    }

    pub fn max_abs(&self) -> Q {
        self.data.iter().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
    }

    /// Exact product `M v`.
    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Q::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    /// Exact product `Mᵀ v`.
    pub fn tr_mul_vec(&self, v: &[Q]) -> Vec<Q> {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(Q::zero(), |acc, i| acc + self.get(i, j) * &v[i]))
            .collect()
    }

    /// Exact bilinear form `xᵀ M y`.
    pub fn bilinear(&self, x: &[Q], y: &[Q]) -> Q {
        self.mul_vec(y).iter().zip(x).fold(Q::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| to_f64(self.get(i, j)))
    }
}

/// `M v` with the inner sum taken in ascending column order.
pub fn matvec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..m.ncols() {
                s += m[(i, j)] * v[j];
            }
            s
        })
        .collect()
}

/// `Mᵀ v` with the inner sum taken in ascending row order.
pub fn matvec_t(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..m.ncols())
        .map(|j| {
            let mut s = 0.0;
            for i in 0..m.nrows() {
                s += m[(i, j)] * v[i];
            }
            s
        })
        .collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

pub fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), qf(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), qf(-1, 4));
        assert_eq!(parse_rational("1e-2").unwrap(), qf(1, 100));
        assert_eq!(parse_rational("12").unwrap(), q(12));
        assert_eq!(parse_rational(".5").unwrap(), qf(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn format_round_trips() {
        for v in [qf(-7, 3), q(4), qf(1, 1000)] {
            assert_eq!(parse_rational(&format_rational(&v)).unwrap(), v);
        }
    }

    #[test]
    fn exact_solve() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve_exact(a, vec![q(3), q(5)]).unwrap();
        assert_eq!(x, vec![qf(4, 5), qf(7, 5)]);
        let singular = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert!(solve_exact(singular, vec![q(1), q(1)]).is_none());
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = RatMatrix::from_i64(&[&[3, 0], &[0, -5]]).to_f64();
        assert!((spectral_norm(&m) - 5.0).abs() < 1e-12);
    }
}
