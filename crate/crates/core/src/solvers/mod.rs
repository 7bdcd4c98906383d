//! Exact optimization backends.
//!
//! Every solver returns a [`SolveResult`] whose `argmax` is feasible for the
//! problem solved and whose `value` equals the objective at `argmax`.

mod greedy;
mod knapsack;
mod simplex;
mod vertices;

use serde::{Deserialize, Serialize};

pub use greedy::greedy_fractional_max;
pub use knapsack::{
    brute_force_opt, enumerate_feasible, knapsack_branch_bound, knapsack_dp, knapsack_opt,
    knapsack_opt_with, KnapsackConfig, DEFAULT_DP_CAPACITY_BOUND, DEFAULT_ENUMERATION_LIMIT,
    DEFAULT_NODE_BUDGET,
};
pub use simplex::lp_max;
pub use vertices::{enumerate_vertices, vertex_max};

use crate::model::Point;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Dp,
    BranchBound,
    Enumeration,
    Simplex,
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub value: Rational,
    pub argmax: Point,
    pub method: Method,
}
