//! Compact extended formulation of the lower-bound knapsack via a disjunctive
//! (Balas) union of the two pieces `x_{n+1} = 0` and `x_{n+1} = 1`.
//!
//! All light items share one weight, so each piece's integer hull is
//! `{0 <= x <= 1, Σ x_i <= b_k}` with `b_k = min(n, ⌊2ε√n·(C − k·n)⌋)`.
//! With variables `x⁰, x¹ ∈ R^n` and `λ` the union reads
//!
//! ```text
//! x⁰_i + λ <= 1      Σ x⁰ + b₀·λ <= b₀
//! x¹_i − λ <= 0      Σ x¹ − b₁·λ <= 0      λ <= 1
//! ```
//!
//! and projects by `x = x⁰ + x¹`, `x_{n+1} = λ`. This formulation is a
//! reconstruction; it is trusted only through the LP = IP checks below.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lowerbound::{exact_sqrt, lowerbound_instance};
use crate::model::{KnapsackInstance, LinearSystem, Objective, Point};
use crate::rational::{rat, Rational};
use crate::sampling::{random_objective, trial_rng};
use crate::solvers::{
    enumerate_feasible, enumerate_vertices, knapsack_opt_with, lp_max, KnapsackConfig,
    DEFAULT_ENUMERATION_LIMIT,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalasExtension {
    pub n: usize,
    pub epsilon: Rational,
    pub capacity: Rational,
    #[serde(with = "crate::intjson")]
    pub b0: BigInt,
    #[serde(with = "crate::intjson")]
    pub b1: BigInt,
    /// `b₁ < 0`: the heavy item never fits and `λ` is forced to 0.
    pub piece_one_empty: bool,
    pub system: LinearSystem,
}

fn piece_bound(root: u64, epsilon: &Rational, capacity: &Rational, k: u64) -> BigInt {
    let n = root * root;
    let slack = capacity - Rational::from(k * n);
    let raw = (rat(2, 1) * epsilon * Rational::from(root) * slack).floor();
    raw.min(BigInt::from(n))
}

/// Builds the extension for `n` light items (a perfect square) and `0 < ε < 1`.
pub fn build_balas_extension(n: usize, epsilon: &Rational) -> Result<BalasExtension> {
    if !epsilon.is_positive() || *epsilon >= 1 {
        return Err(Error::EpsilonOutOfRange(format!(
            "{epsilon}: need 0 < epsilon < 1"
        )));
    }
    let root = exact_sqrt(n)?;
    if root == 0 {
        return Err(Error::InvalidInstance(
            "need at least one light item".into(),
        ));
    }
    let capacity = Rational::from(n as u64) + (rat(2, 1) * epsilon).recip() - Rational::one();
    let b0 = piece_bound(root, epsilon, &capacity, 0);
    let b1 = piece_bound(root, epsilon, &capacity, 1);
    if b1.is_negative() {
        log::warn!("b1 = {b1}: the heavy item does not fit, lambda is forced to 0");
    }

    let width = 2 * n + 1;
    let lambda = 2 * n;
    let unit = |entries: &[(usize, Rational)]| {
        let mut coeffs = vec![Rational::zero(); width];
        for (i, v) in entries {
            coeffs[*i] = v.clone();
        }
        coeffs
    };
    let mut sys = LinearSystem::new(width);
    for i in 0..n {
        sys.push(
            unit(&[(i, Rational::one()), (lambda, Rational::one())]),
            Rational::one(),
        );
    }
    for i in 0..n {
        sys.push(
            unit(&[(n + i, Rational::one()), (lambda, -Rational::one())]),
            Rational::zero(),
        );
    }
    let b0r = Rational::from(b0.clone());
    let b1r = Rational::from(b1.clone());
    let mut row = vec![Rational::one(); width];
    row[n..].fill(Rational::zero());
    row[lambda] = b0r.clone();
    sys.push(row, b0r);
    let mut row = vec![Rational::zero(); width];
    row[n..2 * n].fill(Rational::one());
    row[lambda] = -b1r;
    sys.push(row, Rational::zero());
    sys.push(unit(&[(lambda, Rational::one())]), Rational::one());

    let mut names: Vec<String> = (0..n).map(|i| format!("x0_{i}")).collect();
    names.extend((0..n).map(|i| format!("x1_{i}")));
    names.push("lambda".into());
    sys.variables = Some(names);

    Ok(BalasExtension {
        n,
        epsilon: epsilon.clone(),
        capacity,
        piece_one_empty: b1.is_negative(),
        b0,
        b1,
        system: sys,
    })
}

impl BalasExtension {
    /// The knapsack instance this extension describes.
    pub fn instance(&self) -> Result<KnapsackInstance> {
        lowerbound_instance(exact_sqrt(self.n)?, &self.epsilon)
    }

    /// `(x⁰ + x¹, λ)`.
    pub fn project(&self, y: &Point) -> Point {
        let n = self.n;
        let mut x: Vec<Rational> = (0..n).map(|i| &y.0[i] + &y.0[n + i]).collect();
        x.push(y.0[2 * n].clone());
        Point(x)
    }

    /// `c` on both copies, `c_{n+1}` on `λ`.
    pub fn lift_objective(&self, c: &Objective) -> Objective {
        let n = self.n;
        let mut lifted = c.coeffs()[..n].to_vec();
        lifted.extend_from_slice(&c.coeffs()[..n]);
        lifted.push(c.coeffs()[n].clone());
        Objective(lifted)
    }

    /// Lifts a 0/1 point by putting it into the copy selected by `x_{n+1}`.
    pub fn lift(&self, x: &Point) -> Point {
        let n = self.n;
        let mut y = Point::zeros(2 * n + 1);
        let offset = if x.0[n] == 1 { n } else { 0 };
        for i in 0..n {
            y.0[offset + i] = x.0[i].clone();
        }
        y.0[2 * n] = x.0[n].clone();
        y
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectiveMismatch {
    pub trial: u64,
    pub objective: Objective,
    pub lp: Rational,
    pub ip: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub n: usize,
    pub epsilon: Rational,
    #[serde(with = "crate::intjson")]
    pub b0: BigInt,
    #[serde(with = "crate::intjson")]
    pub b1: BigInt,
    pub trials: u64,
    pub seed: u64,
    pub mismatches: Vec<ObjectiveMismatch>,
    /// LP optima whose projection violates the knapsack constraint or the box.
    pub projection_failures: Vec<u64>,
    pub lift_mode: String,
    pub lifted_points: u64,
    pub lift_failures: u64,
    /// `b_k` items fit in piece `k` and `b_k + 1` do not.
    pub bounds_tight: bool,
    pub verdict: bool,
}

fn check_matches(ext: &BalasExtension, inst: &KnapsackInstance) -> Result<()> {
    let expected = ext.instance()?;
    if *inst != expected {
        return Err(Error::InvalidInstance(
            "instance does not match the extension parameters".into(),
        ));
    }
    Ok(())
}

/// Point with the first `count` light items and the heavy item set to `heavy`.
fn prefix_point(n: usize, count: usize, heavy: bool) -> Point {
    let mut x = Point::zeros(n + 1);
    x.0[..count].fill(Rational::one());
    if heavy {
        x.0[n] = Rational::one();
    }
    x
}

fn bounds_tight(ext: &BalasExtension, inst: &KnapsackInstance) -> bool {
    [(false, &ext.b0), (true, &ext.b1)]
        .iter()
        .all(|(heavy, b)| {
            let Some(b) = b.to_i64() else { return false };
            let fits = b < 0 || inst.satisfies(&prefix_point(ext.n, b as usize, *heavy));
            let next = b + 1;
            let overflows = next < 0
                || next as usize > ext.n
                || !inst.satisfies(&prefix_point(ext.n, next as usize, *heavy));
            fits && overflows
        })
}

/// Random feasible 0/1 points: pick a piece that is nonempty, then a random subset of size at most `b_k`.
fn sample_feasible(ext: &BalasExtension, seed: u64, count: u64) -> Vec<Point> {
    (0..count)
        .map(|i| {
            let mut rng = trial_rng(seed ^ 0x5eed, i);
            let heavy = !ext.piece_one_empty && rng.gen_bool(0.5);
            let bound = if heavy { &ext.b1 } else { &ext.b0 };
            let bound = bound.to_usize().unwrap_or(0).min(ext.n);
            let size = rng.gen_range(0..=bound);
            let chosen = rand::seq::index::sample(&mut rng, ext.n, size);
            let mut x = Point::zeros(ext.n + 1);
            for j in chosen {
                x.0[j] = Rational::one();
            }
            if heavy {
                x.0[ext.n] = Rational::one();
            }
            x
        })
        .collect()
}

/// LP over the extension against the exact knapsack optimum for `trials`
/// seeded objectives, plus lifting of feasible 0/1 points (all of them when
/// `n + 1 <= 20`, otherwise `trials` sampled ones).
pub fn verify_extension(
    ext: &BalasExtension,
    inst: &KnapsackInstance,
    trials: u64,
    seed: u64,
    cfg: &KnapsackConfig,
) -> Result<ExtensionReport> {
    check_matches(ext, inst)?;
    let outcomes: Vec<Result<(Option<ObjectiveMismatch>, bool)>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let c = random_objective(&mut trial_rng(seed, trial), ext.n + 1);
            let ip = knapsack_opt_with(inst, &c, cfg)?.value;
            let lp = lp_max(&ext.system, &ext.lift_objective(&c))?;
            let projected_ok = inst.satisfies(&ext.project(&lp.argmax));
            let mismatch = (lp.value != ip).then_some(ObjectiveMismatch {
                trial,
                objective: c,
                lp: lp.value,
                ip,
            });
            Ok((mismatch, projected_ok))
        })
        .collect();
    let mut mismatches = Vec::new();
    let mut projection_failures = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let (mismatch, projected_ok) = outcome?;
        mismatches.extend(mismatch);
        if !projected_ok {
            projection_failures.push(trial as u64);
        }
    }

    let (lift_mode, points) = if ext.n < DEFAULT_ENUMERATION_LIMIT {
        ("all", enumerate_feasible(inst, DEFAULT_ENUMERATION_LIMIT)?)
    } else {
        ("sample", sample_feasible(ext, seed, trials))
    };
    let lift_failures = points
        .iter()
        .filter(|x| {
            !(inst.satisfies(x)
                && ext.system.satisfies(&ext.lift(x))
                && ext.project(&ext.lift(x)) == **x)
        })
        .count() as u64;
    let tight = bounds_tight(ext, inst);

    Ok(ExtensionReport {
        n: ext.n,
        epsilon: ext.epsilon.clone(),
        b0: ext.b0.clone(),
        b1: ext.b1.clone(),
        trials,
        seed,
        verdict: mismatches.is_empty()
            && projection_failures.is_empty()
            && lift_failures == 0
            && tight,
        mismatches,
        projection_failures,
        lift_mode: lift_mode.into(),
        lifted_points: points.len() as u64,
        lift_failures,
        bounds_tight: tight,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullReport {
    pub vertices: usize,
    pub feasible_points: usize,
    pub feasible_contained: usize,
    pub infeasible_points: usize,
    pub infeasible_excluded: usize,
    pub verdict: bool,
}

/// Is `y` a convex combination of `points`? Solved as an LP feasibility problem.
fn in_convex_hull(points: &[Point], y: &Point) -> Result<bool> {
    let m = points.len();
    let mut sys = LinearSystem::new(m);
    for (d, target) in y.coords().iter().enumerate() {
        let row: Vec<Rational> = points.iter().map(|v| v.0[d].clone()).collect();
        let neg: Vec<Rational> = row.iter().map(|v| -v).collect();
        sys.push(row, target.clone());
        sys.push(neg, -target);
    }
    sys.push(vec![Rational::one(); m], Rational::one());
    sys.push(vec![-Rational::one(); m], -Rational::one());
    match lp_max(&sys, &Objective::zeros(m)) {
        Ok(_) => Ok(true),
        Err(Error::Infeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Enumerates every vertex of the extension, projects them, and checks that
/// their hull contains exactly the feasible 0/1 points. Tiny `n` only.
pub fn hull_check(ext: &BalasExtension) -> Result<HullReport> {
    let inst = ext.instance()?;
    let dim = ext.n + 1;
    if dim > DEFAULT_ENUMERATION_LIMIT {
        return Err(Error::DimensionTooLarge {
            n: dim,
            limit: DEFAULT_ENUMERATION_LIMIT,
        });
    }
    let mut projected: Vec<Point> = Vec::new();
    for v in enumerate_vertices(&ext.system)? {
        let x = ext.project(&v);
        if !projected.contains(&x) {
            projected.push(x);
        }
    }
    let mut report = HullReport {
        vertices: projected.len(),
        feasible_points: 0,
        feasible_contained: 0,
        infeasible_points: 0,
        infeasible_excluded: 0,
        verdict: false,
    };
    for mask in 0u64..1 << dim {
        let x = Point(
            (0..dim)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        );
        let inside = in_convex_hull(&projected, &x)?;
        if inst.satisfies(&x) {
            report.feasible_points += 1;
            report.feasible_contained += usize::from(inside);
        } else {
            report.infeasible_points += 1;
            report.infeasible_excluded += usize::from(!inside);
        }
    }
    report.verdict = report.feasible_contained == report.feasible_points
        && report.infeasible_excluded == report.infeasible_points;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::knapsack_opt;

    #[test]
    fn bounds_p13() {
        let ext = build_balas_extension(169, &rat(1, 16)).unwrap();
        assert_eq!(ext.b1, BigInt::from(11));
        assert_eq!(ext.b0, BigInt::from(169));
        assert_eq!(ext.system.n, 339);
        assert_eq!(ext.system.rows.len(), 2 * 169 + 3);
    }

    #[test]
    fn bounds_n9() {
        let ext = build_balas_extension(9, &rat(1, 4)).unwrap();
        assert_eq!(ext.capacity, rat(10, 1));
        assert_eq!(ext.b1, BigInt::from(1));
        assert_eq!(ext.b0, BigInt::from(9));
        let inst = ext.instance().unwrap();
        let ones = Objective(vec![rat(1, 1); 10]);
        assert_eq!(knapsack_opt(&inst, &ones).unwrap().value, rat(9, 1));
        let lp = lp_max(&ext.system, &ext.lift_objective(&ones)).unwrap();
        assert_eq!(lp.value, rat(9, 1));
    }

    #[test]
    fn variable_names() {
        let ext = build_balas_extension(4, &rat(1, 4)).unwrap();
        let names = ext.system.variables.as_ref().unwrap();
        assert_eq!(names[0], "x0_0");
        assert_eq!(names[4], "x1_0");
        assert_eq!(names[8], "lambda");
        let json = serde_json::to_string(&ext).unwrap();
        let back: BalasExtension = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ext);
    }

    #[test]
    fn lambda_one_slice() {
        // fixing λ = 1 forces x⁰ = 0 and leaves Σ x¹ <= b₁
        let ext = build_balas_extension(9, &rat(1, 4)).unwrap();
        let mut sys = ext.system.clone();
        let mut row = vec![Rational::zero(); 19];
        row[18] = -Rational::one();
        sys.push(row, -Rational::one());
        let mut c = vec![rat(1, 1); 19];
        c[18] = Rational::zero();
        let best = lp_max(&sys, &Objective(c)).unwrap();
        assert_eq!(best.value, rat(1, 1));
        assert!(best.argmax.0[..9].iter().all(Rational::is_zero));
    }

    #[test]
    fn zero_objective() {
        let ext = build_balas_extension(4, &rat(1, 4)).unwrap();
        let lp = lp_max(&ext.system, &ext.lift_objective(&Objective::zeros(5))).unwrap();
        assert_eq!(lp.value, rat(0, 1));
    }

    #[test]
    fn verify_small() {
        let ext = build_balas_extension(9, &rat(1, 4)).unwrap();
        let inst = ext.instance().unwrap();
        let report = verify_extension(&ext, &inst, 20, 3, &KnapsackConfig::default()).unwrap();
        assert!(report.verdict, "{report:?}");
        assert_eq!(report.lift_mode, "all");
        // piece 0: all 2^9 subsets; piece 1: empty set or one item
        assert_eq!(report.lifted_points, 512 + 10);
    }

    #[test]
    fn heavy_item_that_never_fits() {
        let ext = build_balas_extension(4, &rat(3, 4)).unwrap();
        assert!(ext.piece_one_empty);
        let inst = ext.instance().unwrap();
        let report = verify_extension(&ext, &inst, 10, 1, &KnapsackConfig::default()).unwrap();
        assert!(report.verdict, "{report:?}");
    }

    #[test]
    fn mismatched_instance_rejected() {
        let ext = build_balas_extension(4, &rat(1, 4)).unwrap();
        let other = build_balas_extension(4, &rat(1, 8))
            .unwrap()
            .instance()
            .unwrap();
        assert!(verify_extension(&ext, &other, 1, 0, &KnapsackConfig::default()).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_balas_extension(10, &rat(1, 4)).is_err());
        assert!(build_balas_extension(9, &rat(1, 1)).is_err());
    }

    #[test]
    fn convex_hull_membership() {
        let square = vec![
            Point(vec![rat(0, 1), rat(0, 1)]),
            Point(vec![rat(1, 1), rat(0, 1)]),
            Point(vec![rat(0, 1), rat(1, 1)]),
        ];
        assert!(in_convex_hull(&square, &Point(vec![rat(1, 2), rat(1, 2)])).unwrap());
        assert!(!in_convex_hull(&square, &Point(vec![rat(1, 1), rat(1, 1)])).unwrap());
    }
}
