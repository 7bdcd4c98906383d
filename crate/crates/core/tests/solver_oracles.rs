//! Exact solvers against brute-force oracles on random inputs.

use kal::model::{KnapsackInstance, LinearSystem, Objective};
use kal::solvers::{
    brute_force_opt, enumerate_feasible, greedy_fractional_max, knapsack_branch_bound,
    knapsack_opt, lp_max, vertex_max,
};
use kal::{rat, Point, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

fn ratio() -> impl Strategy<Value = Rational> {
    (0i64..=30, 1i64..=6).prop_map(|(a, b)| Rational::new(a, b))
}

fn instance(max_n: usize) -> impl Strategy<Value = (KnapsackInstance, Objective)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec((1i64..=40, 1i64..=5), n),
            0i64..=100,
            prop::collection::vec(ratio(), n),
        )
            .prop_map(|(w, cap, c)| {
                let weights: Vec<Rational> =
                    w.into_iter().map(|(a, b)| Rational::new(a, b)).collect();
                let total: Rational = weights.iter().sum();
                let capacity = total * Rational::new(cap, 100);
                (
                    KnapsackInstance::new(weights, capacity).unwrap(),
                    Objective(c),
                )
            })
    })
}

/// The best objective value over all 0/1 vectors, computed without any solver code.
fn raw_enumeration(inst: &KnapsackInstance, c: &Objective) -> Rational {
    let n = inst.n_items();
    let mut best = Rational::zero();
    for mask in 0u32..1 << n {
        let mut weight = Rational::zero();
        let mut value = Rational::zero();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                weight += &inst.weights()[i];
                value += &c.coeffs()[i];
            }
        }
        if weight <= *inst.capacity() && value > best {
            best = value;
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn knapsack_matches_enumeration((inst, c) in instance(10)) {
        let expected = raw_enumeration(&inst, &c);
        let dp = knapsack_opt(&inst, &c).unwrap();
        prop_assert_eq!(&dp.value, &expected);
        prop_assert!(inst.satisfies(&dp.argmax));
        prop_assert_eq!(c.dot(&dp.argmax), expected.clone());
        let bb = knapsack_branch_bound(&inst, &c, 1_000_000).unwrap();
        prop_assert_eq!(&bb.value, &expected);
        prop_assert_eq!(brute_force_opt(&inst, &c, 20).unwrap().value, expected);
    }

    #[test]
    fn feasible_points_are_exactly_the_fitting_subsets((inst, _c) in instance(8)) {
        let points = enumerate_feasible(&inst, 20).unwrap();
        let n = inst.n_items();
        let fitting = (0u32..1 << n)
            .filter(|mask| {
                let w: Rational = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| inst.weights()[i].clone()).sum();
                w <= *inst.capacity()
            })
            .count();
        prop_assert_eq!(points.len(), fitting);
        prop_assert!(points.iter().all(|x| inst.satisfies(x)));
    }

    #[test]
    fn greedy_matches_simplex(
        w in prop::collection::vec(0i64..=10, 1..=6),
        c_seed in prop::collection::vec(ratio(), 6),
        cap in ratio(),
    ) {
        let n = w.len();
        let c = Objective(c_seed[..n].to_vec());
        let weights: Vec<BigInt> = w.iter().map(|&v| BigInt::from(v)).collect();
        let greedy = greedy_fractional_max(&c, &weights, &cap).unwrap();
        let mut sys = LinearSystem::new(n);
        sys.push(w.iter().map(|&v| Rational::from(v)).collect(), cap.clone());
        let sys = sys.with_unit_box();
        let lp = lp_max(&sys, &c).unwrap();
        prop_assert_eq!(&greedy.value, &lp.value);
        prop_assert!(sys.satisfies(&greedy.argmax));
    }

    #[test]
    fn simplex_matches_vertex_enumeration(
        n in 1usize..=3,
        rows in prop::collection::vec((prop::collection::vec(-3i64..=6, 3), 0i64..=12), 0..=4),
        c in prop::collection::vec(-4i64..=9, 3),
    ) {
        let mut sys = LinearSystem::new(n);
        for (coeffs, rhs) in &rows {
            sys.push(coeffs[..n].iter().map(|&v| Rational::from(v)).collect(), Rational::from(*rhs));
        }
        let sys = sys.with_unit_box();
        let c = Objective(c[..n].iter().map(|&v| Rational::from(v)).collect());
        let lp = lp_max(&sys, &c).unwrap();
        let vertices = vertex_max(&sys, &c).unwrap();
        prop_assert_eq!(&lp.value, &vertices.value);
        prop_assert!(sys.satisfies(&lp.argmax));
        prop_assert_eq!(c.dot(&lp.argmax), lp.value);
    }
}

#[test]
fn lower_bound_rows_with_negative_rhs_are_infeasible_when_contradictory() {
    let mut sys = LinearSystem::new(2).with_unit_box();
    sys.push(vec![rat(-1, 1), rat(-1, 1)], rat(-3, 1));
    assert!(lp_max(&sys, &Objective(vec![Rational::one(), Rational::one()])).is_err());
    assert!(!sys.satisfies(&Point(vec![Rational::one(), Rational::one()])));
}
