//! The knapsack instance `P(n+1, ε)` and its witness family.
//!
//! For `n = p²` the instance has `n` light items of weight `1/(2εp)` and one
//! heavy item of weight `n`, with capacity `n + 1/(2ε) − 1`. Each polynomial
//! set `S` gives a witness point `x^S` (value `1 − ε/2` on `S`, `4/5` on the
//! heavy item) and an objective that separates it with a `(1 − ε)` gap.
//! Midpoints of two witnesses are dominated by an explicit convex
//! combination of feasible 0/1 points, so no single inequality can cut off
//! two witnesses.

mod certificate;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use certificate::{
    certify, certify_with, check_certificate, CheckReport, DominatingRecord, PairRecord, Verdicts,
    WitnessCertificate, WitnessRecord, CERTIFICATE_FORMAT,
};

use crate::error::{Error, Result};
use crate::gf::{intersection_size, is_prime, PolySet};
use crate::model::{KnapsackInstance, Objective, Point, SparseVec};
use crate::rational::{rat, Rational};
use crate::solvers::{knapsack_opt_with, KnapsackConfig};

/// Coordinate of the heavy item in every witness and dominating point.
pub fn heavy_coordinate() -> Rational {
    rat(4, 5)
}

/// Convex weight of the `K`-family part of the dominating combination.
fn k_family_weight() -> Rational {
    rat(4, 5)
}

/// Convex weight of the union set `S ∪ S'`.
fn union_weight_share() -> Rational {
    rat(1, 5)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub p: u64,
    pub epsilon: Rational,
    pub strict: bool,
    /// Degree bound override; only allowed in relaxed mode.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u64>,
}

/// One violated condition of the parameter regime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegimeViolation {
    NotPrime,
    EpsilonTooLarge,
    NNotAboveInverseEpsilon,
    NTooSmall,
    NegativeDegree,
    DegreeOverride,
    NoCardinalitySlack,
}

impl fmt::Display for RegimeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            RegimeViolation::NotPrime => "p must be prime",
            RegimeViolation::EpsilonTooLarge => "epsilon must be below 2/27",
            RegimeViolation::NNotAboveInverseEpsilon => "n = p² must exceed 1/epsilon",
            RegimeViolation::NTooSmall => "n = p² must be at least 130",
            RegimeViolation::NegativeDegree => "floor(p/2 - 4) is negative",
            RegimeViolation::DegreeOverride => "degree override differs from floor(p/2 - 4)",
            RegimeViolation::NoCardinalitySlack => "b - d must be positive",
        };
        f.write_str(text)
    }
}

impl LowerBoundParams {
    pub fn strict(p: u64, epsilon: Rational) -> Self {
        LowerBoundParams {
            p,
            epsilon,
            strict: true,
            degree: None,
        }
    }

    pub fn relaxed(p: u64, epsilon: Rational) -> Self {
        LowerBoundParams {
            p,
            epsilon,
            strict: false,
            degree: None,
        }
    }

    pub fn with_degree(mut self, degree: u64) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn n(&self) -> u64 {
        self.p * self.p
    }

    /// `⌊p/2 − 4⌋`, possibly negative.
    pub fn default_degree(&self) -> BigInt {
        (rat(self.p as i64, 2) - rat(4, 1)).floor()
    }

    pub fn degree(&self) -> Result<u64> {
        match self.degree {
            Some(d) => Ok(d),
            None => self.default_degree().to_u64().ok_or_else(|| {
                Error::Regime(format!(
                    "floor(p/2 - 4) is negative for p = {}; pass a degree in relaxed mode",
                    self.p
                ))
            }),
        }
    }

    /// `b = ⌊(1 − 2ε)·p⌋`.
    pub fn cardinality_bound(&self) -> BigInt {
        cardinality_bound(self.p, &self.epsilon)
    }

    pub fn regime_violations(&self) -> Vec<RegimeViolation> {
        let mut out = Vec::new();
        let n = Rational::from(self.n());
        if !is_prime(self.p) {
            out.push(RegimeViolation::NotPrime);
        }
        if self.epsilon >= rat(2, 27) {
            out.push(RegimeViolation::EpsilonTooLarge);
        }
        if self.epsilon.is_positive() && n <= self.epsilon.recip() {
            out.push(RegimeViolation::NNotAboveInverseEpsilon);
        }
        if self.n() < 130 {
            out.push(RegimeViolation::NTooSmall);
        }
        let default = self.default_degree();
        if default < BigInt::zero() {
            out.push(RegimeViolation::NegativeDegree);
        }
        if let Some(d) = self.degree {
            if BigInt::from(d) != default {
                out.push(RegimeViolation::DegreeOverride);
            }
        }
        if let Ok(d) = self.degree() {
            if self.cardinality_bound() - BigInt::from(d) <= BigInt::zero() {
                out.push(RegimeViolation::NoCardinalitySlack);
            }
        }
        out
    }

    /// Hard errors in any mode; regime violations are errors in strict mode
    /// and logged warnings otherwise.
    pub fn check(&self) -> Result<()> {
        if !self.epsilon.is_positive() || self.epsilon >= 1 {
            return Err(Error::EpsilonOutOfRange(format!(
                "{} (need 0 < epsilon < 1)",
                self.epsilon
            )));
        }
        if self.p == 0 {
            return Err(Error::Regime("p must be positive".into()));
        }
        let violations = self.regime_violations();
        if violations.is_empty() {
            return Ok(());
        }
        let text = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        if self.strict {
            Err(Error::Regime(text))
        } else {
            log::warn!(
                "relaxed parameters p={} eps={}: {text}",
                self.p,
                self.epsilon
            );
            Ok(())
        }
    }
}

pub fn cardinality_bound(p: u64, epsilon: &Rational) -> BigInt {
    ((Rational::one() - rat(2, 1) * epsilon) * Rational::from(p)).floor()
}

/// Weight `1/(2εp)` of each light item.
pub fn light_weight(p: u64, epsilon: &Rational) -> Rational {
    (rat(2, 1) * epsilon * Rational::from(p)).recip()
}

/// The instance for `n = root²` light items; no regime checks beyond `ε > 0`.
pub fn lowerbound_instance(root: u64, epsilon: &Rational) -> Result<KnapsackInstance> {
    if !epsilon.is_positive() {
        return Err(Error::EpsilonOutOfRange(epsilon.to_string()));
    }
    let n = root * root;
    let mut weights = vec![light_weight(root, epsilon); n as usize];
    weights.push(Rational::from(n));
    let capacity = Rational::from(n) + (rat(2, 1) * epsilon).recip() - Rational::one();
    KnapsackInstance::new(weights, capacity)
}

pub fn build_instance(params: &LowerBoundParams) -> Result<KnapsackInstance> {
    params.check()?;
    lowerbound_instance(params.p, &params.epsilon)
}

pub(crate) fn exact_sqrt(n: usize) -> Result<u64> {
    let root = (n as f64).sqrt().round() as u64;
    (root.saturating_sub(1)..=root + 1)
        .find(|r| r * r == n as u64)
        .ok_or_else(|| Error::InvalidInstance(format!("{n} is not a perfect square")))
}

fn check_set(set: &PolySet, n: usize) -> Result<()> {
    match set.elements.iter().find(|&&e| e as usize >= n) {
        Some(e) => Err(Error::InvalidInstance(format!(
            "set element {e} outside the {n} light items"
        ))),
        None => Ok(()),
    }
}

/// `x^S`: `1 − ε/2` on `S`, `4/5` on the heavy item, 0 elsewhere.
pub fn build_witness(set: &PolySet, epsilon: &Rational, n: usize) -> Result<Point> {
    check_set(set, n)?;
    let mut x = Point::zeros(n + 1);
    let inside = Rational::one() - epsilon / rat(2, 1);
    for &e in &set.elements {
        x.0[e as usize] = inside.clone();
    }
    x.0[n] = heavy_coordinate();
    Ok(x)
}

/// The objective separating `x^S`: `1/(2ε√n)` on `S`, 1 on the heavy item.
pub fn separation_objective(set: &PolySet, epsilon: &Rational, n: usize) -> Result<Objective> {
    check_set(set, n)?;
    let root = exact_sqrt(n)?;
    let mut c = Objective::zeros(n + 1);
    let light = light_weight(root, epsilon);
    for &e in &set.elements {
        c.0[e as usize] = light.clone();
    }
    c.0[n] = Rational::one();
    Ok(c)
}

/// Outcome of the separation-gap check for one witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GapCheck {
    pub set: Vec<u32>,
    pub objective: SparseVec,
    pub witness_value: Rational,
    pub optimum: Rational,
    pub verdict: bool,
}

/// Whether the knapsack optimum is solved on the support of the objective
/// or on the whole instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GapSolve {
    #[default]
    Support,
    Full,
}

/// Exact optimum of `c·x` over the instance, where `c` is zero off `support`.
pub(crate) fn optimum_on_support(
    inst: &KnapsackInstance,
    c: &Objective,
    support: &[usize],
    mode: GapSolve,
    cfg: &KnapsackConfig,
) -> Result<Rational> {
    match mode {
        GapSolve::Full => Ok(knapsack_opt_with(inst, c, cfg)?.value),
        GapSolve::Support => {
            let sub = inst.restrict(support);
            let sub_c = Objective(support.iter().map(|&i| c.0[i].clone()).collect());
            Ok(knapsack_opt_with(&sub, &sub_c, cfg)?.value)
        }
    }
}

pub fn verify_gap(inst: &KnapsackInstance, set: &PolySet, epsilon: &Rational) -> Result<GapCheck> {
    verify_gap_with(
        inst,
        set,
        epsilon,
        GapSolve::Support,
        &KnapsackConfig::default(),
    )
}

/// Checks `(1 − ε)·c·x^S > max{c·x : x ∈ P}` exactly.
pub fn verify_gap_with(
    inst: &KnapsackInstance,
    set: &PolySet,
    epsilon: &Rational,
    mode: GapSolve,
    cfg: &KnapsackConfig,
) -> Result<GapCheck> {
    let n = inst
        .n_items()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidInstance("lower-bound instance needs a heavy item".into()))?;
    let x = build_witness(set, epsilon, n)?;
    let c = separation_objective(set, epsilon, n)?;
    let witness_value = c.dot(&x);
    let mut support: Vec<usize> = set.elements.iter().map(|&e| e as usize).collect();
    support.push(n);
    let optimum = optimum_on_support(inst, &c, &support, mode, cfg)?;
    let verdict = (Rational::one() - epsilon) * &witness_value > optimum;
    Ok(GapCheck {
        set: set.elements.clone(),
        objective: SparseVec::from_dense(c.coeffs()),
        witness_value,
        optimum,
        verdict,
    })
}

/// The three distinct nonzero values of the dominating point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatingValues {
    /// Coordinates in `S ∩ S'`.
    pub shared: Rational,
    /// Coordinates in `S △ S'`.
    pub exclusive: Rational,
    /// The heavy item.
    pub last: Rational,
}

/// Symmetry average of the convex combination: weight 4/5 spread uniformly
/// over all sets holding the heavy item, `S ∩ S'` and `b − α` elements of
/// `S △ S'`; weight 1/5 on `S ∪ S'`. Each element of `S △ S'` lies in a
/// `(b − α)/(2p − 2α)` fraction of the former sets.
///
/// `None` when `b − α <= 0`, where the family is empty.
pub fn dominating_values(p: u64, alpha: u64, b: &BigInt) -> Option<DominatingValues> {
    let slack = b - BigInt::from(alpha);
    if slack <= BigInt::zero() || 2 * p <= 2 * alpha {
        return None;
    }
    let fraction = Rational::from(slack) / Rational::from(2 * p - 2 * alpha);
    Some(DominatingValues {
        shared: k_family_weight() + union_weight_share(),
        exclusive: k_family_weight() * fraction + union_weight_share(),
        last: k_family_weight(),
    })
}

/// Expands the closed form into a point of dimension `n + 1`.
pub fn expand_dominating(s: &[u32], t: &[u32], n: usize, values: &DominatingValues) -> Point {
    let mut x = Point::zeros(n + 1);
    for &e in s.iter().chain(t) {
        x.0[e as usize] = values.exclusive.clone();
    }
    for &e in s {
        if t.binary_search(&e).is_ok() {
            x.0[e as usize] = values.shared.clone();
        }
    }
    x.0[n] = values.last.clone();
    x
}

pub fn dominating_point(s: &PolySet, t: &PolySet, epsilon: &Rational, p: u64) -> Result<Point> {
    let n = (p * p) as usize;
    check_set(s, n)?;
    check_set(t, n)?;
    if s.elements == t.elements {
        return Err(Error::InvalidInstance(
            "dominating point needs two distinct sets".into(),
        ));
    }
    let alpha = intersection_size(&s.elements, &t.elements) as u64;
    let b = cardinality_bound(p, epsilon);
    let values = dominating_values(p, alpha, &b)
        .ok_or_else(|| Error::Regime(format!("b - alpha = {} - {alpha} is not positive", b)))?;
    Ok(expand_dominating(&s.elements, &t.elements, n, &values))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceCheck {
    pub s: Vec<u32>,
    pub t: Vec<u32>,
    pub alpha: u64,
    #[serde(with = "crate::intjson")]
    pub cardinality_bound: BigInt,
    pub dominating: Option<DominatingValues>,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Feasibility facts for the 0/1 points behind the dominating point; they
/// depend only on `α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct AlphaFacts {
    pub alpha: u64,
    pub values: Option<DominatingValues>,
    /// `n + b/(2εp)`: weight of each set holding the heavy item.
    pub k_member_weight: Rational,
    /// `(2p − α)/(2εp)`: weight of `S ∪ S'`.
    pub union_weight: Rational,
    pub k_member_feasible: bool,
    pub union_feasible: bool,
}

pub(crate) fn alpha_facts(
    inst: &KnapsackInstance,
    p: u64,
    epsilon: &Rational,
    alpha: u64,
) -> AlphaFacts {
    let b = cardinality_bound(p, epsilon);
    let light = light_weight(p, epsilon);
    let n = Rational::from(p * p);
    let k_member_weight = &n + Rational::from(b.clone()) * &light;
    let union_weight = Rational::from((2 * p).saturating_sub(alpha)) * &light;
    AlphaFacts {
        alpha,
        values: dominating_values(p, alpha, &b),
        k_member_feasible: k_member_weight <= *inst.capacity(),
        union_feasible: union_weight <= *inst.capacity(),
        k_member_weight,
        union_weight,
    }
}

/// Compares the dominating point with the midpoint of two sparse witnesses,
/// coordinate by coordinate over their joint support (both vanish elsewhere).
/// Returns the first violated coordinate.
pub(crate) fn first_undominated(
    s: &[u32],
    t: &[u32],
    half_s: &SparseVec,
    half_t: &SparseVec,
    values: &DominatingValues,
) -> Option<usize> {
    let n = half_s.dim - 1;
    let dominating_at = |i: usize| -> &Rational {
        if i == n {
            &values.last
        } else {
            let (in_s, in_t) = (
                s.binary_search(&(i as u32)).is_ok(),
                t.binary_search(&(i as u32)).is_ok(),
            );
            match (in_s, in_t) {
                (true, true) => &values.shared,
                (false, false) => &ZERO,
                _ => &values.exclusive,
            }
        }
    };
    let (a, b) = (&half_s.entries, &half_t.entries);
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (index, mid) = match (a.get(i), b.get(j)) {
            (Some((ia, va)), Some((ib, vb))) if ia == ib => {
                i += 1;
                j += 1;
                (*ia, va + vb)
            }
            (Some((ia, va)), Some((ib, _))) if ia < ib => {
                i += 1;
                (*ia, va.clone())
            }
            (Some((ia, va)), None) => {
                i += 1;
                (*ia, va.clone())
            }
            (_, Some((ib, vb))) => {
                j += 1;
                (*ib, vb.clone())
            }
            (None, None) => unreachable!(),
        };
        if mid > *dominating_at(index) {
            return Some(index);
        }
    }
    None
}

static ZERO: std::sync::LazyLock<Rational> = std::sync::LazyLock::new(Rational::zero);

/// Halves every entry of a sparse point.
pub(crate) fn halve(x: &SparseVec) -> SparseVec {
    SparseVec {
        dim: x.dim,
        entries: x.entries.iter().map(|(i, v)| (*i, v / rat(2, 1))).collect(),
    }
}

pub(crate) fn dominance_from_parts(
    s: &[u32],
    t: &[u32],
    half_s: &SparseVec,
    half_t: &SparseVec,
    facts: &AlphaFacts,
) -> (bool, Option<String>) {
    let Some(values) = &facts.values else {
        return (
            false,
            Some(format!("b - alpha <= 0 at alpha = {}", facts.alpha)),
        );
    };
    if !facts.k_member_feasible {
        return (
            false,
            Some(format!(
                "K-member weight {} exceeds capacity",
                facts.k_member_weight
            )),
        );
    }
    if !facts.union_feasible {
        return (
            false,
            Some(format!(
                "union weight {} exceeds capacity",
                facts.union_weight
            )),
        );
    }
    match first_undominated(s, t, half_s, half_t, values) {
        Some(i) => (
            false,
            Some(format!(
                "midpoint exceeds dominating point at coordinate {i}"
            )),
        ),
        None => (true, None),
    }
}

/// Checks that `½x^S + ½x^{S'}` is dominated by a feasible convex combination.
pub fn verify_midpoint(
    inst: &KnapsackInstance,
    s: &PolySet,
    t: &PolySet,
    epsilon: &Rational,
) -> Result<DominanceCheck> {
    let n = inst
        .n_items()
        .checked_sub(1)
        .ok_or_else(|| Error::InvalidInstance("lower-bound instance needs a heavy item".into()))?;
    let p = exact_sqrt(n)?;
    let half_s = halve(&SparseVec::from_dense(
        build_witness(s, epsilon, n)?.coords(),
    ));
    let half_t = halve(&SparseVec::from_dense(
        build_witness(t, epsilon, n)?.coords(),
    ));
    let alpha = intersection_size(&s.elements, &t.elements) as u64;
    let facts = alpha_facts(inst, p, epsilon, alpha);
    let (verdict, failure) =
        dominance_from_parts(&s.elements, &t.elements, &half_s, &half_t, &facts);
    Ok(DominanceCheck {
        s: s.elements.clone(),
        t: t.elements.clone(),
        alpha,
        cardinality_bound: cardinality_bound(p, epsilon),
        dominating: facts.values,
        verdict,
        failure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::build_nw_family;

    fn eps16() -> Rational {
        rat(1, 16)
    }

    #[test]
    fn instance_p13() {
        let inst = build_instance(&LowerBoundParams::strict(13, eps16())).unwrap();
        assert_eq!(inst.n_items(), 170);
        assert!(inst.weights()[..169].iter().all(|w| *w == rat(8, 13)));
        assert_eq!(inst.weights()[169], rat(169, 1));
        assert_eq!(*inst.capacity(), rat(176, 1));
        assert_eq!(crate::model::validate_instance(&inst).unwrap().n, 170);
    }

    #[test]
    fn strict_rejects_large_epsilon() {
        let err = build_instance(&LowerBoundParams::strict(13, rat(1, 10))).unwrap_err();
        assert!(matches!(err, Error::Regime(_)));
    }

    #[test]
    fn relaxed_small_n_only_flags_n() {
        let params = LowerBoundParams::relaxed(11, eps16());
        assert_eq!(params.regime_violations(), vec![RegimeViolation::NTooSmall]);
        let inst = build_instance(&params).unwrap();
        assert_eq!(inst.n_items(), 122);
        assert!(build_instance(&LowerBoundParams::strict(11, eps16())).is_err());
    }

    #[test]
    fn p13_default_regime_is_clean() {
        let params = LowerBoundParams::strict(13, eps16());
        assert!(params.regime_violations().is_empty());
        assert_eq!(params.degree().unwrap(), 2);
        assert_eq!(params.cardinality_bound(), BigInt::from(11));
    }

    #[test]
    fn witness_coordinates() {
        let sys = build_nw_family(13, 2).unwrap();
        let x = build_witness(&sys.sets[5], &eps16(), 169).unwrap();
        assert_eq!(x.coords().iter().filter(|v| !v.is_zero()).count(), 14);
        for &e in &sys.sets[5].elements {
            assert_eq!(x.0[e as usize], rat(31, 32));
        }
        assert_eq!(x.0[169], rat(4, 5));

        let empty = PolySet {
            coeffs: vec![],
            elements: vec![],
        };
        let x = build_witness(&empty, &eps16(), 4).unwrap();
        assert_eq!(
            x,
            Point(vec![rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(4, 5)])
        );

        let out_of_range = PolySet {
            coeffs: vec![],
            elements: vec![9],
        };
        assert!(build_witness(&out_of_range, &eps16(), 9).is_err());
    }

    #[test]
    fn objective_and_gap_values() {
        let sys = build_nw_family(13, 2).unwrap();
        let set = &sys.sets[100];
        let c = separation_objective(set, &eps16(), 169).unwrap();
        for &e in &set.elements {
            assert_eq!(c.0[e as usize], rat(8, 13));
        }
        assert_eq!(c.0[169], rat(1, 1));
        let x = build_witness(set, &eps16(), 169).unwrap();
        // 1/(2ε) + 11/20 at ε = 1/16
        assert_eq!(c.dot(&x), rat(171, 20));

        let inst = build_instance(&LowerBoundParams::strict(13, eps16())).unwrap();
        let gap = verify_gap(&inst, set, &eps16()).unwrap();
        assert_eq!(gap.optimum, rat(8, 1));
        assert_eq!(gap.witness_value, rat(171, 20));
        assert!(rat(15, 16) * rat(171, 20) == rat(2565, 320));
        assert!(gap.verdict);

        let full = verify_gap_with(
            &inst,
            set,
            &eps16(),
            GapSolve::Full,
            &KnapsackConfig::default(),
        )
        .unwrap();
        assert_eq!(full.optimum, rat(8, 1));
    }

    #[test]
    fn gap_fails_outside_the_regime() {
        let params = LowerBoundParams::relaxed(13, rat(1, 2));
        let inst = build_instance(&params).unwrap();
        let sys = build_nw_family(13, 2).unwrap();
        let gap = verify_gap(&inst, &sys.sets[0], &rat(1, 2)).unwrap();
        assert_eq!(gap.optimum, rat(1, 1));
        assert_eq!(gap.witness_value, rat(31, 20));
        assert!(!gap.verdict);
    }

    #[test]
    fn dominating_closed_form_values() {
        let b = BigInt::from(11);
        let v0 = dominating_values(13, 0, &b).unwrap();
        assert_eq!(v0.exclusive, rat(7, 13));
        assert_eq!(v0.shared, rat(1, 1));
        assert_eq!(v0.last, rat(4, 5));
        assert!(v0.exclusive >= rat(31, 64));
        let v2 = dominating_values(13, 2, &b).unwrap();
        assert_eq!(v2.exclusive, rat(29, 55));
        assert!(v2.exclusive >= rat(31, 64));
        assert!(dominating_values(13, 11, &b).is_none());
    }

    #[test]
    fn midpoint_check_on_p13() {
        let inst = build_instance(&LowerBoundParams::strict(13, eps16())).unwrap();
        let sys = build_nw_family(13, 2).unwrap();
        let facts = alpha_facts(&inst, 13, &eps16(), 0);
        assert_eq!(facts.k_member_weight, rat(169, 1) + rat(88, 13));
        assert!(facts.k_member_feasible && facts.union_feasible);
        for (i, j) in [(0, 1), (0, 2196), (17, 1000), (5, 6)] {
            let check = verify_midpoint(&inst, &sys.sets[i], &sys.sets[j], &eps16()).unwrap();
            assert!(check.verdict, "{i} {j}: {:?}", check.failure);
            assert!(check.alpha <= 2);
            let x = dominating_point(&sys.sets[i], &sys.sets[j], &eps16(), 13).unwrap();
            let xs = build_witness(&sys.sets[i], &eps16(), 169).unwrap();
            let xt = build_witness(&sys.sets[j], &eps16(), 169).unwrap();
            let mid = Point(
                xs.coords()
                    .iter()
                    .zip(xt.coords())
                    .map(|(a, b)| (a + b) / rat(2, 1))
                    .collect(),
            );
            assert_eq!(mid.first_exceeding(&x), None);
            assert!(inst.satisfies(&x));
        }
    }

    #[test]
    fn midpoint_reports_first_bad_coordinate() {
        // ε = 1/2 gives b = 0, so there is no family K at all
        let inst = lowerbound_instance(13, &rat(1, 2)).unwrap();
        let sys = build_nw_family(13, 2).unwrap();
        let check = verify_midpoint(&inst, &sys.sets[0], &sys.sets[1], &rat(1, 2)).unwrap();
        assert!(!check.verdict);
        assert!(check.failure.unwrap().contains("b - alpha"));

        let s = &sys.sets[0].elements;
        let t = &sys.sets[1].elements;
        let half = |set: &[u32]| {
            let mut dense = vec![Rational::zero(); 170];
            for &e in set {
                dense[e as usize] = rat(1, 2);
            }
            dense[169] = rat(2, 5);
            SparseVec::from_dense(&dense)
        };
        let weak = DominatingValues {
            shared: rat(1, 1),
            exclusive: rat(1, 3),
            last: rat(4, 5),
        };
        let bad = first_undominated(s, t, &half(s), &half(t), &weak).unwrap();
        let first_exclusive = s
            .iter()
            .chain(t)
            .copied()
            .filter(|e| !(s.contains(e) && t.contains(e)))
            .min()
            .unwrap();
        assert_eq!(bad, first_exclusive as usize);
    }
}
