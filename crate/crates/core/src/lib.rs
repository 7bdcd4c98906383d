//! Exact-arithmetic tools around one knapsack family: Nisan–Wigderson set
//! systems over prime fields, witness certificates showing that every
//! `(1 − ε)`-approximation of the family's knapsack polytope needs many
//! inequalities, a coefficient-rounding scheme that builds such
//! approximations for arbitrary down-monotone polytopes, and a compact
//! disjunctive extended formulation.
//!
//! All arithmetic is over arbitrary-precision rationals ([`Rational`]).

pub mod error;
pub mod extension;
pub mod gf;
mod intjson;
pub mod lowerbound;
pub mod model;
pub mod pairs;
pub mod rational;
pub mod rounding;
pub mod sampling;
pub mod solvers;

pub use error::{Error, Result};
pub use model::{DownMonotoneSystem, KnapsackInstance, LinearSystem, Objective, Point};
pub use rational::{rat, rat_parse, Rational};
