//! Coefficient rounding for down-monotone polytopes.
//!
//! With `γ = ε/(1−ε)` and ratio `r = 1 + γ/2`, inequalities whose
//! coefficients lie in `{0} ∪ {⌊r^ℓ⌋ : r^ℓ <= 5n/γ}` suffice for a polytope
//! `Q ⊇ P` with `max_P c·x >= (1−ε)·max_Q c·x`. For a given objective `c`,
//! the single rounded inequality `c̃·x <= β/K` is valid for `Q`, and the box
//! LP under that one inequality already stays within `β/(1−ε)`; that LP
//! value is what [`certify_ratio`] compares against.
//!
//! All exponents are found by exact power bracketing; no logarithms.
//!
//! Polytopes are first normalized so that every coordinate reaches 1: the
//! objective is multiplied by `u_i = max{x_i : x ∈ P}`. For a knapsack this
//! just zeroes items that never fit.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{dot, DownMonotoneSystem, KnapsackInstance, LinearSystem, Objective, Point};
use crate::rational::{rat, Rational};
use crate::solvers::{
    greedy_fractional_max, knapsack_opt_with, lp_max, KnapsackConfig, Method, SolveResult,
};

/// Default cap on the number of inequalities materialized by the exhaustive oracles.
pub const DEFAULT_Q_CAP: u128 = 100_000;

/// A down-monotone polytope inside `[0,1]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Polytope {
    /// Integer hull of a knapsack instance.
    Knapsack(KnapsackInstance),
    /// Nonnegative system with the implicit unit box.
    System(DownMonotoneSystem),
}

impl Polytope {
    pub fn dim(&self) -> usize {
        match self {
            Polytope::Knapsack(k) => k.n_items(),
            Polytope::System(s) => s.n_vars(),
        }
    }

    /// Exact `max c·x` over the polytope; `c` must be nonnegative.
    pub fn maximize(&self, c: &Objective, cfg: &KnapsackConfig) -> Result<SolveResult> {
        match self {
            Polytope::Knapsack(k) => knapsack_opt_with(k, c, cfg),
            Polytope::System(s) => lp_max(&s.with_box(), c),
        }
    }

    /// Membership, exact. Knapsack points must be 0/1 vectors.
    pub fn contains_vertex(&self, y: &Point) -> bool {
        match self {
            Polytope::Knapsack(k) => {
                y.coords().iter().all(|v| v.is_zero() || *v == 1) && k.satisfies(y)
            }
            Polytope::System(s) => s.satisfies(y),
        }
    }

    /// `u_i = max{x_i : x ∈ P}` for every coordinate.
    pub fn coordinate_maxima(&self, cfg: &KnapsackConfig) -> Result<Vec<Rational>> {
        match self {
            Polytope::Knapsack(k) => Ok(k
                .weights()
                .iter()
                .map(|w| {
                    if w <= k.capacity() {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()),
            Polytope::System(_) => (0..self.dim())
                .map(|i| {
                    let mut e = Objective::zeros(self.dim());
                    e.0[i] = Rational::one();
                    Ok(self.maximize(&e, cfg)?.value)
                })
                .collect(),
        }
    }

    /// `max c'·x'` over the normalized polytope `{x' ∈ [0,1]^n : diag(u)·x' ∈ P}`.
    ///
    /// Coordinates with `u_i = 0` are free in the box, the rest map back by `x_i = u_i·x'_i`.
    fn normalized_max(
        &self,
        scale: &[Rational],
        c: &Objective,
        cfg: &KnapsackConfig,
    ) -> Result<Rational> {
        let mut free = Rational::zero();
        let mut original = Objective::zeros(self.dim());
        for (i, (u, ci)) in scale.iter().zip(c.coeffs()).enumerate() {
            if u.is_zero() {
                free += ci;
            } else {
                original.0[i] = ci / u;
            }
        }
        Ok(free + self.maximize(&original, cfg)?.value)
    }
}

/// The coefficient grid `{0} ∪ {⌊r^ℓ⌋ : ℓ = 0..=ell_max}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffSet {
    pub epsilon: Rational,
    pub gamma: Rational,
    pub n: usize,
    /// Sorted, deduplicated.
    #[serde(with = "crate::intjson::vec")]
    pub values: Vec<BigInt>,
    pub ell_max: u64,
    /// Lowest exponent realizing each nonzero value, aligned with `values[1..]`.
    pub witness_exponents: Vec<u64>,
    /// `r^ℓ` for `ℓ = 0..=ell_max + 1`.
    #[serde(skip)]
    powers: Vec<Rational>,
}

pub fn gamma_of(epsilon: &Rational) -> Rational {
    epsilon / (Rational::one() - epsilon)
}

fn check_epsilon(epsilon: &Rational) -> Result<()> {
    if !epsilon.is_positive() || *epsilon > rat(1, 2) {
        return Err(Error::EpsilonOutOfRange(format!(
            "{epsilon}: the rounding scheme assumes 0 < epsilon <= 1/2"
        )));
    }
    Ok(())
}

pub fn coeff_set(n: usize, epsilon: &Rational) -> Result<CoeffSet> {
    check_epsilon(epsilon)?;
    if n == 0 {
        return Err(Error::InvalidInstance(
            "dimension must be at least 1".into(),
        ));
    }
    let gamma = gamma_of(epsilon);
    let ratio = Rational::one() + &gamma / rat(2, 1);
    let limit = Rational::from(5 * n as u64) / &gamma;

    let mut powers = vec![Rational::one()];
    while *powers.last().expect("nonempty") <= limit {
        let next = powers.last().expect("nonempty") * &ratio;
        powers.push(next);
    }
    // powers[ell_max] <= limit < powers[ell_max + 1]
    let ell_max = powers.len() as u64 - 2;

    let mut values = vec![BigInt::zero()];
    let mut witness_exponents = Vec::new();
    for (ell, power) in powers[..=ell_max as usize].iter().enumerate() {
        let v = power.floor();
        if *values.last().expect("nonempty") != v {
            values.push(v);
            witness_exponents.push(ell as u64);
        }
    }
    Ok(CoeffSet {
        epsilon: epsilon.clone(),
        gamma,
        n,
        values,
        ell_max,
        witness_exponents,
        powers,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffSetReport {
    pub n: usize,
    pub epsilon: Rational,
    pub size: usize,
    pub ell_max: u64,
    #[serde(with = "crate::intjson")]
    pub max_value: BigInt,
    /// `5n(1−ε)/ε`.
    pub max_allowed: Rational,
    /// `1 + min(ell_max, ⌊5n/γ⌋)`.
    pub size_bound: u64,
    /// `r^ell_max <= 5n/γ < r^(ell_max+1)`.
    pub bracket_ok: bool,
    pub witnesses_ok: bool,
    /// `|values|^n` inequalities before the box, as a decimal string.
    pub facet_bound: String,
    pub box_rows: usize,
    pub verdict: bool,
}

impl CoeffSet {
    pub fn ratio(&self) -> Rational {
        Rational::one() + &self.gamma / rat(2, 1)
    }

    /// `5n/γ`.
    pub fn limit(&self) -> Rational {
        Rational::from(5 * self.n as u64) / &self.gamma
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        self.values.binary_search(v).is_ok()
    }

    /// The exponent `k` with `r^k <= value < r^(k+1)`, for `1 <= value <= 5n/γ`.
    pub fn bracket(&self, value: &Rational) -> Option<u64> {
        if *value < 1 || *value > self.limit() {
            return None;
        }
        let above = self.powers.partition_point(|p| p <= value);
        Some(above as u64 - 1)
    }

    pub fn report(&self) -> CoeffSetReport {
        let limit = self.limit();
        let ratio = self.ratio();
        let bracket_ok =
            ratio.pow(self.ell_max as u32) <= limit && ratio.pow(self.ell_max as u32 + 1) > limit;
        let witnesses_ok = self
            .values
            .iter()
            .skip(1)
            .zip(&self.witness_exponents)
            .all(|(v, &ell)| ell <= self.ell_max && ratio.pow(ell as u32).floor() == *v);
        let max_value = self.values.last().cloned().unwrap_or_default();
        let max_allowed =
            Rational::from(5 * self.n as u64) * (Rational::one() - &self.epsilon) / &self.epsilon;
        let limit_floor = limit.floor().to_u64().unwrap_or(u64::MAX);
        let size_bound = 1 + self.ell_max.min(limit_floor);
        let facet_bound = num_traits::pow(BigInt::from(self.values.len()), self.n).to_string();
        let verdict = bracket_ok
            && witnesses_ok
            && Rational::from(max_value.clone()) <= max_allowed
            && self.values.len() as u64 <= size_bound;
        CoeffSetReport {
            n: self.n,
            epsilon: self.epsilon.clone(),
            size: self.values.len(),
            ell_max: self.ell_max,
            max_value,
            max_allowed,
            size_bound,
            bracket_ok,
            witnesses_ok,
            facet_bound,
            box_rows: 2 * self.n,
            verdict,
        }
    }
}

/// `(c̃, K, G)` for one objective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundedObjective {
    /// Clamped objective the rounding was applied to.
    pub objective: Objective,
    pub clamped: Vec<usize>,
    /// `‖c‖∞·γ/(5n)`; `None` for the zero objective.
    pub k: Option<Rational>,
    pub g: Vec<usize>,
    #[serde(with = "crate::intjson::vec")]
    pub ctilde: Vec<BigInt>,
    /// Bracketing exponent for indices outside `G`.
    pub exponents: Vec<Option<u64>>,
    /// Per-coordinate maxima used for normalization, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_tilde: Option<Rational>,
}

/// Rounds `c` against the grid of `set`. Negative entries are clamped to 0.
pub fn round_objective(c: &Objective, set: &CoeffSet) -> Result<RoundedObjective> {
    if c.dim() != set.n {
        return Err(Error::InvalidInstance(format!(
            "objective has {} entries, grid built for n = {}",
            c.dim(),
            set.n
        )));
    }
    let (c, clamped) = c.clamped();
    let n = c.dim();
    if c.is_zero() {
        return Ok(RoundedObjective {
            objective: c,
            clamped,
            k: None,
            g: (0..n).collect(),
            ctilde: vec![BigInt::zero(); n],
            exponents: vec![None; n],
            scale: None,
            beta_tilde: None,
        });
    }
    let k = c.max_norm() * &set.gamma / Rational::from(5 * n as u64);
    let mut g = Vec::new();
    let mut ctilde = Vec::with_capacity(n);
    let mut exponents = Vec::with_capacity(n);
    for (i, ci) in c.coeffs().iter().enumerate() {
        if *ci < k {
            g.push(i);
            ctilde.push(BigInt::zero());
            exponents.push(None);
        } else {
            let e = set
                .bracket(&(ci / &k))
                .expect("c_i/K lies in [1, 5n/γ] outside G");
            let v = set.powers[e as usize].floor();
            debug_assert!(set.contains(&v));
            ctilde.push(v);
            exponents.push(Some(e));
        }
    }
    Ok(RoundedObjective {
        objective: c,
        clamped,
        k: Some(k),
        g,
        ctilde,
        exponents,
        scale: None,
        beta_tilde: None,
    })
}

impl RoundedObjective {
    /// Checks `(2/(2+γ))·c_i − K <= K·c̃_i <= c_i` outside `G` and `c̃_i = 0` on `G`.
    pub fn sandwich_holds(&self, gamma: &Rational) -> bool {
        let Some(k) = &self.k else {
            return self.ctilde.iter().all(Zero::is_zero);
        };
        let shrink = rat(2, 1) / (rat(2, 1) + gamma);
        self.objective.coeffs().iter().enumerate().all(|(i, ci)| {
            let scaled = k * &Rational::from(self.ctilde[i].clone());
            if self.g.binary_search(&i).is_ok() {
                self.ctilde[i].is_zero() && ci < k
            } else {
                scaled <= *ci && scaled >= &shrink * ci - k
            }
        })
    }
}

/// Result of certifying one objective; serializes with the fixed key set
/// `epsilon, gamma, K, beta, bound, ratio, verdict, ctilde, G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCheck {
    pub epsilon: Rational,
    pub gamma: Rational,
    #[serde(rename = "K")]
    pub k: Option<Rational>,
    pub beta: Rational,
    pub bound: Rational,
    pub ratio: Rational,
    pub verdict: bool,
    #[serde(with = "crate::intjson::vec")]
    pub ctilde: Vec<BigInt>,
    #[serde(rename = "G")]
    pub g: Vec<usize>,
}

fn normalized_objective(c: &Objective, scale: &[Rational]) -> Objective {
    Objective(c.coeffs().iter().zip(scale).map(|(a, u)| a * u).collect())
}

pub fn certify_ratio(p: &Polytope, c: &Objective, epsilon: &Rational) -> Result<RatioCheck> {
    Ok(certify_ratio_detailed(p, c, epsilon, &KnapsackConfig::default())?.0)
}

/// `β = max_P c·x`, `β̃ = β/K`, bound `= max{c·x : c̃·x <= β̃, 0 <= x <= 1}`;
/// passes iff `β >= (1−ε)·bound`.
pub fn certify_ratio_detailed(
    p: &Polytope,
    c: &Objective,
    epsilon: &Rational,
    cfg: &KnapsackConfig,
) -> Result<(RatioCheck, RoundedObjective)> {
    let n = p.dim();
    if c.dim() != n {
        return Err(Error::InvalidInstance(
            "objective dimension mismatch".into(),
        ));
    }
    let set = coeff_set(n, epsilon)?;
    let (clamped_c, _) = c.clamped();
    let scale = p.coordinate_maxima(cfg)?;
    let normalized = normalized_objective(&clamped_c, &scale);
    let mut rounded = round_objective(&normalized, &set)?;
    rounded.scale = Some(scale);

    let beta = p.maximize(&clamped_c, cfg)?.value;
    let (bound, beta_tilde) = match &rounded.k {
        None => (Rational::zero(), None),
        Some(k) => {
            let beta_tilde = &beta / k;
            let bound =
                greedy_fractional_max(&rounded.objective, &rounded.ctilde, &beta_tilde)?.value;
            (bound, Some(beta_tilde))
        }
    };
    rounded.beta_tilde = beta_tilde;
    let ratio = if bound.is_zero() {
        Rational::one()
    } else {
        &beta / &bound
    };
    let verdict = beta >= (Rational::one() - epsilon) * &bound;
    let check = RatioCheck {
        epsilon: epsilon.clone(),
        gamma: set.gamma.clone(),
        k: rounded.k.clone(),
        beta,
        bound,
        ratio,
        verdict,
        ctilde: rounded.ctilde.clone(),
        g: rounded.g.clone(),
    };
    Ok((check, rounded))
}

/// Checks `c̃·y' <= β̃` for sample points `y` of `P`, where `y'` is `y`
/// in normalized coordinates.
pub fn validity_check(p: &Polytope, rounded: &RoundedObjective, sample: &[Point]) -> Result<bool> {
    let Some(beta_tilde) = &rounded.beta_tilde else {
        // zero objective: c̃ = 0, nothing to violate
        return Ok(true);
    };
    let scale = rounded
        .scale
        .as_ref()
        .ok_or_else(|| Error::InvalidInstance("rounded objective lacks normalization".into()))?;
    let ctilde: Vec<Rational> = rounded.ctilde.iter().cloned().map(Rational::from).collect();
    for y in sample {
        if y.dim() != p.dim() || !p.contains_vertex(y) {
            return Err(Error::InvalidInstance(format!(
                "sample point {y:?} is not in P"
            )));
        }
        let normalized: Vec<Rational> = y
            .coords()
            .iter()
            .zip(scale)
            .map(|(v, u)| if u.is_zero() { Rational::zero() } else { v / u })
            .collect();
        if dot(&ctilde, &normalized) > *beta_tilde {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every nonzero vector in `grid^n`, lexicographic.
fn grid_vectors(grid: &[BigInt], n: usize, cap: u128) -> Result<Vec<Vec<BigInt>>> {
    let count = (grid.len() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::BudgetExceeded(format!(
            "{count} coefficient vectors exceed the cap of {cap}"
        )));
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; n];
    loop {
        if idx.iter().any(|&i| !grid[i].is_zero()) {
            out.push(idx.iter().map(|&i| grid[i].clone()).collect());
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// `max c'·x` over `Q` = box ∩ every `g·x <= max_P' g·y` with `g ∈ grid^n`,
/// in normalized coordinates.
fn q_opt_over_grid(
    p: &Polytope,
    c: &Objective,
    grid: &[BigInt],
    cap: u128,
    cfg: &KnapsackConfig,
) -> Result<SolveResult> {
    let n = p.dim();
    let scale = p.coordinate_maxima(cfg)?;
    let (clamped, _) = c.clamped();
    let objective = normalized_objective(&clamped, &scale);
    let mut sys = LinearSystem::new(n);
    for g in grid_vectors(grid, n, cap)? {
        let coeffs: Vec<Rational> = g.into_iter().map(Rational::from).collect();
        let rhs = p.normalized_max(&scale, &Objective(coeffs.clone()), cfg)?;
        sys.push(coeffs, rhs);
    }
    let sys = sys.with_unit_box();
    lp_max(&sys, &objective)
}

/// The true maximum over `Q` built from the full coefficient grid. Tiny `n` only.
pub fn exhaustive_q_opt(
    p: &Polytope,
    c: &Objective,
    epsilon: &Rational,
    cap: u128,
) -> Result<SolveResult> {
    let set = coeff_set(p.dim(), epsilon)?;
    q_opt_over_grid(p, c, &set.values, cap, &KnapsackConfig::default())
}

/// The same over the integer grid `{0, …, ⌈n/ε⌉}`.
pub fn van_vyve_q_opt(
    p: &Polytope,
    c: &Objective,
    epsilon: &Rational,
    cap: u128,
) -> Result<SolveResult> {
    if !epsilon.is_positive() {
        return Err(Error::EpsilonOutOfRange(epsilon.to_string()));
    }
    let top = (Rational::from(p.dim() as u64) / epsilon).ceil();
    let top = top
        .to_u64()
        .ok_or_else(|| Error::BudgetExceeded("grid too large".into()))?;
    let grid: Vec<BigInt> = (0..=top).map(BigInt::from).collect();
    q_opt_over_grid(p, c, &grid, cap, &KnapsackConfig::default())
}

/// `β <= max_Q <= bound` together with `(1−ε)·max_Q <= β`, from both oracles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleChain {
    pub beta: Rational,
    pub max_q: Rational,
    pub bound: Rational,
    pub van_vyve_max_q: Option<Rational>,
    pub chain_ok: bool,
    pub ratio_ok: bool,
    pub van_vyve_ok: Option<bool>,
}

impl OracleChain {
    pub fn verdict(&self) -> bool {
        self.chain_ok && self.ratio_ok && self.van_vyve_ok.unwrap_or(true)
    }
}

pub fn oracle_chain(
    p: &Polytope,
    c: &Objective,
    epsilon: &Rational,
    with_van_vyve: bool,
) -> Result<OracleChain> {
    let check = certify_ratio(p, c, epsilon)?;
    let q = exhaustive_q_opt(p, c, epsilon, DEFAULT_Q_CAP)?;
    debug_assert_eq!(q.method, Method::Simplex);
    let keep = Rational::one() - epsilon;
    let van_vyve = if with_van_vyve {
        Some(van_vyve_q_opt(p, c, epsilon, DEFAULT_Q_CAP)?.value)
    } else {
        None
    };
    Ok(OracleChain {
        chain_ok: check.beta <= q.value && q.value <= check.bound,
        ratio_ok: &keep * &q.value <= check.beta,
        van_vyve_ok: van_vyve
            .as_ref()
            .map(|v| check.beta <= *v && &keep * v <= check.beta),
        beta: check.beta,
        max_q: q.value,
        bound: check.bound,
        van_vyve_max_q: van_vyve,
    })
}
