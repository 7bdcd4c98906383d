//! Self-contained witness certificates and their independent re-check.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    alpha_facts, build_instance, build_witness, dominance_from_parts, dominating_values, halve,
    lowerbound_instance, optimum_on_support, separation_objective, AlphaFacts, DominatingValues,
    GapSolve, LowerBoundParams,
};
use crate::error::{Error, Result};
use crate::gf::{build_nw_family, coeffs_of_index, family_size, intersection_size, PolySet};
use crate::model::{dot, KnapsackInstance, Objective, SparseVec};
use crate::pairs::{total_pairs, PairPolicy};
use crate::rational::Rational;
use crate::solvers::KnapsackConfig;

pub const CERTIFICATE_FORMAT: &str = "kal-lowerbound-certificate/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub coeffs: Vec<u64>,
    pub set: Vec<u32>,
    pub point: SparseVec,
    pub objective: SparseVec,
    pub value: Rational,
    pub optimum: Rational,
    pub verdict: bool,
}

/// Closed-form dominating values and the feasibility of the 0/1 points
/// behind them, for one intersection size.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominatingRecord {
    pub alpha: u64,
    pub values: Option<DominatingValues>,
    pub k_member_weight: Rational,
    pub union_weight: Rational,
    pub k_member_feasible: bool,
    pub union_feasible: bool,
}

impl From<&AlphaFacts> for DominatingRecord {
    fn from(f: &AlphaFacts) -> Self {
        DominatingRecord {
            alpha: f.alpha,
            values: f.values.clone(),
            k_member_weight: f.k_member_weight.clone(),
            union_weight: f.union_weight.clone(),
            k_member_feasible: f.k_member_feasible,
            union_feasible: f.union_feasible,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub s: u32,
    pub t: u32,
    pub alpha: u64,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    /// Witness count equals `p^(d+1)` and all sets are distinct.
    pub count: bool,
    /// Every witness is separated with the `(1 − ε)` gap.
    pub gap: bool,
    /// Every checked midpoint is dominated by a feasible point.
    pub domination: bool,
    pub overall: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub format: String,
    pub p: u64,
    pub d: u64,
    pub epsilon: Rational,
    pub strict: bool,
    #[serde(with = "crate::intjson")]
    pub cardinality_bound: BigInt,
    pub instance: KnapsackInstance,
    pub witness_count: u64,
    pub witness_count_formula: String,
    pub witnesses: Vec<WitnessRecord>,
    pub pair_policy: PairPolicy,
    pub pairs_total: u64,
    pub dominating_points: Vec<DominatingRecord>,
    pub pairs: Vec<PairRecord>,
    pub verdicts: Verdicts,
}

impl WitnessCertificate {
    pub fn summary_line(&self) -> String {
        format!(
            "LOWERBOUND p={} eps={} witnesses={} pairs={} verdict={}",
            self.p,
            self.epsilon.to_fraction_string(),
            self.witness_count,
            self.pairs.len(),
            if self.verdicts.overall {
                "PASS"
            } else {
                "FAIL"
            }
        )
    }

    pub fn params(&self) -> LowerBoundParams {
        LowerBoundParams {
            p: self.p,
            epsilon: self.epsilon.clone(),
            strict: self.strict,
            degree: (!self.strict).then_some(self.d),
        }
    }
}

fn witness_record(
    inst: &KnapsackInstance,
    set: &PolySet,
    epsilon: &Rational,
    cfg: &KnapsackConfig,
) -> Result<WitnessRecord> {
    let n = inst.n_items() - 1;
    let x = build_witness(set, epsilon, n)?;
    let c = separation_objective(set, epsilon, n)?;
    let point = SparseVec::from_dense(x.coords());
    let objective = SparseVec::from_dense(c.coeffs());
    let (value, optimum, verdict) = gap_from_parts(inst, &point, &objective, epsilon, cfg)?;
    Ok(WitnessRecord {
        coeffs: set.coeffs.clone(),
        set: set.elements.clone(),
        point,
        objective,
        value,
        optimum,
        verdict,
    })
}

/// `(c·x, max over P restricted to supp(c), (1 − ε)·c·x > max)` from stored data.
fn gap_from_parts(
    inst: &KnapsackInstance,
    point: &SparseVec,
    objective: &SparseVec,
    epsilon: &Rational,
    cfg: &KnapsackConfig,
) -> Result<(Rational, Rational, bool)> {
    let c = Objective(objective.to_dense()?);
    if c.dim() != inst.n_items() || point.dim != inst.n_items() {
        return Err(Error::Malformed("witness dimension mismatch".into()));
    }
    let (c, _) = c.clamped();
    let value = dot(c.coeffs(), &point.to_dense()?);
    let support: Vec<usize> = objective
        .entries
        .iter()
        .filter(|(_, v)| v.is_positive())
        .map(|(i, _)| *i)
        .collect();
    let optimum = optimum_on_support(inst, &c, &support, GapSolve::Support, cfg)?;
    let verdict = (Rational::one() - epsilon) * &value > optimum;
    Ok((value, optimum, verdict))
}

struct PairContext<'a> {
    sets: Vec<&'a [u32]>,
    halves: Vec<SparseVec>,
    facts: BTreeMap<u64, AlphaFacts>,
}

impl PairContext<'_> {
    fn check(&self, s: u32, t: u32) -> PairRecord {
        let (a, b) = (self.sets[s as usize], self.sets[t as usize]);
        let alpha = intersection_size(a, b) as u64;
        let facts = &self.facts[&alpha];
        let (verdict, failure) = dominance_from_parts(
            a,
            b,
            &self.halves[s as usize],
            &self.halves[t as usize],
            facts,
        );
        PairRecord {
            s,
            t,
            alpha,
            verdict,
            failure,
        }
    }
}

fn pair_context<'a>(
    inst: &KnapsackInstance,
    p: u64,
    epsilon: &Rational,
    sets: Vec<&'a [u32]>,
    points: &[&SparseVec],
) -> PairContext<'a> {
    let facts = (0..=p)
        .map(|alpha| (alpha, alpha_facts(inst, p, epsilon, alpha)))
        .collect();
    PairContext {
        sets,
        halves: points.iter().map(|x| halve(x)).collect(),
        facts,
    }
}

/// Builds the family, every witness with its gap check, and the midpoint
/// checks selected by `policy`.
pub fn certify(params: &LowerBoundParams, policy: PairPolicy) -> Result<WitnessCertificate> {
    certify_with(params, policy, &KnapsackConfig::default())
}

pub fn certify_with(
    params: &LowerBoundParams,
    policy: PairPolicy,
    cfg: &KnapsackConfig,
) -> Result<WitnessCertificate> {
    let inst = build_instance(params)?;
    let d = params.degree()?;
    let family = build_nw_family(params.p, d)?;
    let epsilon = &params.epsilon;

    let witnesses: Vec<WitnessRecord> = family
        .sets
        .par_iter()
        .map(|set| witness_record(&inst, set, epsilon, cfg))
        .collect::<Result<_>>()?;

    let ctx = pair_context(
        &inst,
        params.p,
        epsilon,
        family.sets.iter().map(|s| s.elements.as_slice()).collect(),
        &witnesses.iter().map(|w| &w.point).collect::<Vec<_>>(),
    );
    let selected = policy.select(family.sets.len());
    let pairs: Vec<PairRecord> = selected.par_iter().map(|&(s, t)| ctx.check(s, t)).collect();

    let mut used: Vec<u64> = pairs.iter().map(|r| r.alpha).collect();
    used.sort_unstable();
    used.dedup();
    let dominating_points = used
        .iter()
        .map(|a| DominatingRecord::from(&ctx.facts[a]))
        .collect();

    let witness_count = family_size(params.p, d).expect("family was built") as u64;
    let verdicts = combine_verdicts(witness_count, &witnesses, &pairs);
    Ok(WitnessCertificate {
        format: CERTIFICATE_FORMAT.to_string(),
        p: params.p,
        d,
        epsilon: epsilon.clone(),
        strict: params.strict,
        cardinality_bound: params.cardinality_bound(),
        instance: inst,
        witness_count,
        witness_count_formula: format!("p^(d+1) = {}^{}", params.p, d + 1),
        witnesses,
        pair_policy: policy,
        pairs_total: total_pairs(family.sets.len()) as u64,
        dominating_points,
        pairs,
        verdicts,
    })
}

fn combine_verdicts(
    witness_count: u64,
    witnesses: &[WitnessRecord],
    pairs: &[PairRecord],
) -> Verdicts {
    let mut seen = std::collections::HashSet::new();
    let count =
        witnesses.len() as u64 == witness_count && witnesses.iter().all(|w| seen.insert(&w.set));
    let gap = witnesses.iter().all(|w| w.verdict);
    let domination = pairs.iter().all(|r| r.verdict);
    Verdicts {
        count,
        gap,
        domination,
        overall: count && gap && domination,
    }
}

/// Outcome of re-verifying a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    /// Every stored value and verdict was reproduced.
    pub reproduced: bool,
    /// The recomputed overall verdict.
    pub overall: bool,
    pub mismatches: Vec<String>,
}

const MAX_REPORTED: usize = 20;

struct Mismatches(Vec<String>, usize);

impl Mismatches {
    fn push(&mut self, msg: String) {
        self.1 += 1;
        if self.0.len() < MAX_REPORTED {
            self.0.push(msg);
        }
    }
}

/// Recomputes every stored value and verdict from the certificate's own
/// data, and checks that the data matches the construction.
pub fn check_certificate(cert: &WitnessCertificate, cfg: &KnapsackConfig) -> Result<CheckReport> {
    if cert.format != CERTIFICATE_FORMAT {
        return Err(Error::Malformed(format!(
            "unknown format {:?}",
            cert.format
        )));
    }
    let mut bad = Mismatches(Vec::new(), 0);
    let params = cert.params();
    let p = cert.p;
    let epsilon = &cert.epsilon;
    if cert.strict {
        if let Err(e) = params.check() {
            bad.push(format!("strict parameters rejected: {e}"));
        }
        if params.default_degree() != BigInt::from(cert.d) {
            bad.push(format!(
                "strict certificate with degree {} != floor(p/2 - 4)",
                cert.d
            ));
        }
    }
    if cert.d >= p {
        return Err(Error::Malformed(format!(
            "degree {} not below p = {p}",
            cert.d
        )));
    }
    match lowerbound_instance(p, epsilon) {
        Ok(inst) if inst == cert.instance => {}
        Ok(_) => bad.push("stored instance differs from the construction".into()),
        Err(e) => bad.push(format!("instance cannot be rebuilt: {e}")),
    }
    if cert.cardinality_bound != params.cardinality_bound() {
        bad.push("cardinality bound mismatch".into());
    }
    let expected_count =
        family_size(p, cert.d).ok_or_else(|| Error::Malformed("family size overflows".into()))?;
    if cert.witness_count as u128 != expected_count {
        bad.push(format!(
            "witness_count {} != p^(d+1) = {expected_count}",
            cert.witness_count
        ));
    }
    if cert.witnesses.len() as u128 != expected_count {
        bad.push(format!("{} witnesses stored", cert.witnesses.len()));
    }

    let inst = &cert.instance;
    let n = inst.n_items().saturating_sub(1);
    if n as u64 != p * p {
        return Err(Error::Malformed(
            "instance dimension does not match p".into(),
        ));
    }
    let width = cert.d as usize + 1;
    let witness_issues: Vec<Vec<String>> = cert
        .witnesses
        .par_iter()
        .enumerate()
        .map(|(k, w)| {
            let mut issues = Vec::new();
            let expected_set = PolySet::from_coeffs(coeffs_of_index(k as u128, p, width), p);
            if w.coeffs != expected_set.coeffs || w.set != expected_set.elements {
                issues.push(format!("witness {k}: set does not match coefficient order"));
            }
            match build_witness(&expected_set, epsilon, n) {
                Ok(x) if SparseVec::from_dense(x.coords()) == w.point => {}
                _ => issues.push(format!("witness {k}: point differs from the construction")),
            }
            match separation_objective(&expected_set, epsilon, n) {
                Ok(c) if SparseVec::from_dense(c.coeffs()) == w.objective => {}
                _ => issues.push(format!("witness {k}: objective differs from the construction")),
            }
            match gap_from_parts(inst, &w.point, &w.objective, epsilon, cfg) {
                Ok((value, optimum, verdict)) => {
                    if value != w.value || optimum != w.optimum || verdict != w.verdict {
                        issues.push(format!(
                            "witness {k}: recomputed value {value}, optimum {optimum}, verdict {verdict}"
                        ));
                    }
                }
                Err(e) => issues.push(format!("witness {k}: {e}")),
            }
            issues
        })
        .collect();
    for msg in witness_issues.into_iter().flatten() {
        bad.push(msg);
    }

    let members = cert.witnesses.len();
    let expected_pairs = cert.pair_policy.select(members);
    let stored_pairs: Vec<(u32, u32)> = cert.pairs.iter().map(|r| (r.s, r.t)).collect();
    if expected_pairs != stored_pairs {
        bad.push(format!(
            "pair list does not match policy {}",
            cert.pair_policy
        ));
    }
    if cert.pairs_total as u128 != total_pairs(members) {
        bad.push("pairs_total mismatch".into());
    }
    if let Some(r) = cert
        .pairs
        .iter()
        .find(|r| r.s as usize >= members || r.t as usize >= members || r.s >= r.t)
    {
        return Err(Error::Malformed(format!(
            "pair ({}, {}) out of range",
            r.s, r.t
        )));
    }

    let ctx = pair_context(
        inst,
        p,
        epsilon,
        cert.witnesses.iter().map(|w| w.set.as_slice()).collect(),
        &cert.witnesses.iter().map(|w| &w.point).collect::<Vec<_>>(),
    );
    for record in &cert.dominating_points {
        let recomputed = ctx
            .facts
            .get(&record.alpha)
            .map(DominatingRecord::from)
            .or_else(|| {
                let facts = alpha_facts(inst, p, epsilon, record.alpha);
                Some(DominatingRecord::from(&facts))
            });
        if recomputed.as_ref() != Some(record) {
            bad.push(format!(
                "dominating record for alpha {} differs",
                record.alpha
            ));
        }
        if let Some(values) = &record.values {
            if dominating_values(p, record.alpha, &cert.cardinality_bound).as_ref() != Some(values)
            {
                bad.push(format!("closed form mismatch at alpha {}", record.alpha));
            }
        }
    }
    let pair_issues: Vec<String> = cert
        .pairs
        .par_iter()
        .filter_map(|r| {
            let again = ctx.check(r.s, r.t);
            (again != *r).then(|| {
                format!(
                    "pair ({}, {}): recomputed alpha {} verdict {}",
                    r.s, r.t, again.alpha, again.verdict
                )
            })
        })
        .collect();
    for msg in pair_issues {
        bad.push(msg);
    }
    let mut alphas: Vec<u64> = cert.pairs.iter().map(|r| r.alpha).collect();
    alphas.sort_unstable();
    alphas.dedup();
    let stored_alphas: Vec<u64> = cert.dominating_points.iter().map(|r| r.alpha).collect();
    if alphas != stored_alphas {
        bad.push("dominating records do not cover the pair intersections".into());
    }

    let verdicts = combine_verdicts(cert.witness_count, &cert.witnesses, &cert.pairs);
    if verdicts != cert.verdicts {
        bad.push(format!(
            "stored verdicts {:?} != recomputed {verdicts:?}",
            cert.verdicts
        ));
    }
    if bad.1 > bad.0.len() {
        let extra = bad.1 - bad.0.len();
        bad.0.push(format!("... and {extra} more"));
    }
    Ok(CheckReport {
        reproduced: bad.1 == 0,
        overall: verdicts.overall && bad.1 == 0,
        mismatches: bad.0,
    })
}
