#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use teamgame::clique::Graph;
use teamgame::rational::{qf, RatMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries p/den with p uniform in lo..=hi.
pub fn rand_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64, den: i64) -> RatMatrix {
    RatMatrix::from_fn(rows, cols, |_, _| qf(rng.gen_range(lo..=hi), den))
}

pub fn rand_symmetric(rng: &mut impl Rng, n: usize, lo: i64, hi: i64, den: i64) -> RatMatrix {
    let m = rand_matrix(rng, n, n, lo, hi, den);
    RatMatrix::from_fn(n, n, |i, j| m.get(i.min(j), i.max(j)).clone())
}

pub fn rand_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    Graph::random(n, p, rng)
}

pub fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
