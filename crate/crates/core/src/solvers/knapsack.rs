use std::rc::Rc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{dot, KnapsackInstance, Objective, Point};
use crate::rational::Rational;

pub const DEFAULT_DP_CAPACITY_BOUND: u64 = 10_000_000;
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;
pub const DEFAULT_ENUMERATION_LIMIT: usize = 20;

/// Environment variable overriding the branch-and-bound node budget.
pub const NODE_BUDGET_ENV: &str = "KAL_BUDGET_NODES";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnapsackConfig {
    /// Largest integer capacity (after clearing denominators) solved by DP.
    pub dp_capacity_bound: u64,
    pub node_budget: u64,
}

impl Default for KnapsackConfig {
    fn default() -> Self {
        KnapsackConfig {
            dp_capacity_bound: DEFAULT_DP_CAPACITY_BOUND,
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

impl KnapsackConfig {
    /// Defaults, with the node budget taken from `KAL_BUDGET_NODES` when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(text) = std::env::var(NODE_BUDGET_ENV) {
            cfg.node_budget = text
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{NODE_BUDGET_ENV}={text:?} is not a count")))?;
        }
        Ok(cfg)
    }
}

fn check_inputs(inst: &KnapsackInstance, c: &Objective) -> Result<()> {
    if c.dim() != inst.n_items() {
        return Err(Error::InvalidInstance(format!(
            "objective has {} entries for {} items",
            c.dim(),
            inst.n_items()
        )));
    }
    if c.coeffs().iter().any(Rational::is_negative) {
        return Err(Error::InvalidInstance(
            "knapsack objective must be nonnegative (clamp first)".into(),
        ));
    }
    Ok(())
}

/// Exact maximum of `c·x` over feasible 0/1 points.
pub fn knapsack_opt(inst: &KnapsackInstance, c: &Objective) -> Result<SolveResult> {
    knapsack_opt_with(inst, c, &KnapsackConfig::default())
}

/// DP when the denominator-cleared capacity is within the bound, otherwise
/// branch and bound.
pub fn knapsack_opt_with(
    inst: &KnapsackInstance,
    c: &Objective,
    cfg: &KnapsackConfig,
) -> Result<SolveResult> {
    check_inputs(inst, c)?;
    match scaled_weights(inst, cfg.dp_capacity_bound) {
        Some((weights, cap)) => Ok(dp_scaled(&weights, cap, c)),
        None => knapsack_branch_bound(inst, c, cfg.node_budget),
    }
}

/// Clears denominators; `None` if the integer capacity exceeds `bound`.
/// Items heavier than the capacity get `None` weights.
fn scaled_weights(inst: &KnapsackInstance, bound: u64) -> Option<(Vec<Option<u64>>, u64)> {
    let lcm = inst
        .weights()
        .iter()
        .chain(std::iter::once(inst.capacity()))
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let scale = |r: &Rational| r.numer() * (&lcm / r.denom());
    let cap = scale(inst.capacity()).to_u64().filter(|&c| c <= bound)?;
    let weights = inst
        .weights()
        .iter()
        .map(|w| scale(w).to_u64().filter(|&w| w <= cap))
        .collect();
    Some((weights, cap))
}

/// Capacity DP; errors if the scaled capacity exceeds the configured bound.
pub fn knapsack_dp(
    inst: &KnapsackInstance,
    c: &Objective,
    cfg: &KnapsackConfig,
) -> Result<SolveResult> {
    check_inputs(inst, c)?;
    let (weights, cap) = scaled_weights(inst, cfg.dp_capacity_bound).ok_or_else(|| {
        Error::BudgetExceeded(format!(
            "scaled capacity above the DP bound {}",
            cfg.dp_capacity_bound
        ))
    })?;
    Ok(dp_scaled(&weights, cap, c))
}

struct Pick {
    item: usize,
    prev: Option<Rc<Pick>>,
}

#[derive(Clone)]
struct State {
    weight: u64,
    value: Rational,
    picks: Option<Rc<Pick>>,
}

/// DP over reachable capacities, keeping only the Pareto frontier
/// (strictly increasing value with weight).
fn dp_scaled(weights: &[Option<u64>], cap: u64, c: &Objective) -> SolveResult {
    let mut frontier = vec![State {
        weight: 0,
        value: Rational::zero(),
        picks: None,
    }];
    for (item, (w, profit)) in weights.iter().zip(c.coeffs()).enumerate() {
        let Some(w) = *w else { continue };
        if profit.is_zero() {
            continue;
        }
        let shifted: Vec<State> = frontier
            .iter()
            .take_while(|s| s.weight + w <= cap)
            .map(|s| State {
                weight: s.weight + w,
                value: &s.value + profit,
                picks: Some(Rc::new(Pick {
                    item,
                    prev: s.picks.clone(),
                })),
            })
            .collect();
        frontier = merge_frontiers(frontier, shifted);
    }
    let best = frontier.pop().expect("frontier never empty");
    let mut x = Point::zeros(c.dim());
    let mut node = best.picks;
    while let Some(pick) = node {
        x.0[pick.item] = Rational::one();
        node = pick.prev.clone();
    }
    SolveResult {
        value: best.value,
        argmax: x,
        method: Method::Dp,
    }
}

fn merge_frontiers(a: Vec<State>, b: Vec<State>) -> Vec<State> {
    let mut out: Vec<State> = Vec::with_capacity(a.len() + b.len());
    let mut a = a.into_iter().peekable();
    let mut b = b.into_iter().peekable();
    loop {
        let next = match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => a.next(),
            (None, Some(_)) => b.next(),
            (Some(x), Some(y)) => {
                if (x.weight, &y.value) <= (y.weight, &x.value) {
                    a.next()
                } else {
                    b.next()
                }
            }
        }
        .expect("peeked");
        match out.last() {
            Some(last) if next.value <= last.value => {}
            Some(last) if next.weight == last.weight => {
                *out.last_mut().expect("nonempty") = next;
            }
            _ => out.push(next),
        }
    }
    out
}

/// Depth-first branch and bound with the fractional (greedy LP) bound.
pub fn knapsack_branch_bound(
    inst: &KnapsackInstance,
    c: &Objective,
    node_budget: u64,
) -> Result<SolveResult> {
    check_inputs(inst, c)?;
    let n = inst.n_items();
    let mut x = Point::zeros(n);
    let mut base_value = Rational::zero();
    let mut items = Vec::new();
    for i in 0..n {
        let (w, v) = (&inst.weights()[i], &c.coeffs()[i]);
        if v.is_zero() || w > inst.capacity() {
            continue;
        }
        if w.is_zero() {
            x.0[i] = Rational::one();
            base_value += v;
        } else {
            items.push(i);
        }
    }
    // ratio descending, lower index first on ties
    items.sort_by(|&i, &j| {
        let ri = &c.coeffs()[i] * &inst.weights()[j];
        let rj = &c.coeffs()[j] * &inst.weights()[i];
        rj.cmp(&ri).then(i.cmp(&j))
    });

    let mut search = BranchBound {
        weights: items.iter().map(|&i| inst.weights()[i].clone()).collect(),
        values: items.iter().map(|&i| c.coeffs()[i].clone()).collect(),
        chosen: vec![false; items.len()],
        best_value: Rational::zero(),
        best: vec![false; items.len()],
        nodes: 0,
        budget: node_budget,
    };
    // greedy incumbent
    let mut room = inst.capacity().clone();
    for k in 0..items.len() {
        if search.weights[k] <= room {
            room -= &search.weights[k];
            search.best[k] = true;
            search.best_value += &search.values[k];
        }
    }
    search.explore(0, Rational::zero(), inst.capacity().clone())?;

    for (k, &i) in items.iter().enumerate() {
        if search.best[k] {
            x.0[i] = Rational::one();
        }
    }
    Ok(SolveResult {
        value: base_value + search.best_value,
        argmax: x,
        method: Method::BranchBound,
    })
}

struct BranchBound {
    weights: Vec<Rational>,
    values: Vec<Rational>,
    chosen: Vec<bool>,
    best_value: Rational,
    best: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl BranchBound {
    fn fractional_bound(&self, from: usize, value: &Rational, room: &Rational) -> Rational {
        let mut bound = value.clone();
        let mut room = room.clone();
        for k in from..self.weights.len() {
            if self.weights[k] <= room {
                room -= &self.weights[k];
                bound += &self.values[k];
            } else {
                bound += &self.values[k] * &room / &self.weights[k];
                break;
            }
        }
        bound
    }

    fn explore(&mut self, k: usize, value: Rational, room: Rational) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "branch and bound exceeded {} nodes",
                self.budget
            )));
        }
        if value > self.best_value {
            self.best_value = value.clone();
            self.best = self.chosen.clone();
            for slot in self.best[k..].iter_mut() {
                *slot = false;
            }
        }
        if k == self.weights.len() || self.fractional_bound(k, &value, &room) <= self.best_value {
            return Ok(());
        }
        if self.weights[k] <= room {
            self.chosen[k] = true;
            let v = &value + &self.values[k];
            let r = &room - &self.weights[k];
            self.explore(k + 1, v, r)?;
            self.chosen[k] = false;
        }
        self.explore(k + 1, value, room)
    }
}

/// Every feasible 0/1 point, in increasing bitmask order (item 0 is the low bit).
pub fn enumerate_feasible(inst: &KnapsackInstance, n_limit: usize) -> Result<Vec<Point>> {
    let n = inst.n_items();
    if n > n_limit {
        return Err(Error::DimensionTooLarge { n, limit: n_limit });
    }
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << n) {
        let mut weight = Rational::zero();
        for (i, w) in inst.weights().iter().enumerate() {
            if mask >> i & 1 == 1 {
                weight += w;
            }
        }
        if weight <= *inst.capacity() {
            out.push(Point(
                (0..n)
                    .map(|i| Rational::from_integer((mask >> i & 1) as i64))
                    .collect(),
            ));
        }
    }
    Ok(out)
}

/// Maximum over the explicit list of feasible points; the oracle for
/// [`knapsack_opt`].
pub fn brute_force_opt(
    inst: &KnapsackInstance,
    c: &Objective,
    n_limit: usize,
) -> Result<SolveResult> {
    let points = enumerate_feasible(inst, n_limit)?;
    let mut best: Option<(Rational, Point)> = None;
    for x in points {
        let v = dot(c.coeffs(), x.coords());
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, x));
        }
    }
    let (value, argmax) = best.expect("the zero vector is always feasible");
    Ok(SolveResult {
        value,
        argmax,
        method: Method::Enumeration,
    })
}
