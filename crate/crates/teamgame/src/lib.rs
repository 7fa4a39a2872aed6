//! Symmetric bimatrix games, adversarial team games and antisymmetric quadratic min-max
//! problems: reduction gadgets with certified back-maps, equilibrium checkers, symmetric
//! learning dynamics, closed-form solvers and brute-force oracles.

pub mod analytic;
pub mod checks;
pub mod dynamics;
pub mod clique;
pub mod error;
pub mod gadgets;
pub mod game;
pub mod geometry;
pub mod minmax;
pub mod oracle;
pub mod rational;

pub use error::{Error, Result};
pub use game::{
    BimatrixGame, Game, MixedProfile, MixedStrategy, NormalFormGame, Orientation, PairTerm, PolymatrixGame,
    TeamPartition,
};
pub use rational::{RatMatrix, Q};
