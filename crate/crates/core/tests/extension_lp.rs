//! LP over the disjunctive extension against the exact knapsack optimum.

use kal::extension::{build_balas_extension, hull_check, verify_extension};
use kal::model::Objective;
use kal::solvers::{knapsack_opt, lp_max, KnapsackConfig};
use kal::{rat, Point, Rational};

#[test]
fn lp_equals_ip_for_small_squares() {
    for (n, eps) in [
        (4, rat(1, 4)),
        (9, rat(1, 4)),
        (16, rat(1, 8)),
        (25, rat(1, 10)),
        (9, rat(2, 3)),
    ] {
        let ext = build_balas_extension(n, &eps).unwrap();
        let inst = ext.instance().unwrap();
        let report = verify_extension(&ext, &inst, 25, 11, &KnapsackConfig::default()).unwrap();
        assert!(report.verdict, "n={n} eps={eps}: {report:?}");
    }
}

#[test]
fn heavy_item_objective() {
    // only the heavy item pays: λ = 1 is optimal whenever piece 1 is nonempty
    let ext = build_balas_extension(16, &rat(1, 8)).unwrap();
    let inst = ext.instance().unwrap();
    let mut c = vec![Rational::zero(); 17];
    c[16] = rat(5, 2);
    let c = Objective(c);
    let lp = lp_max(&ext.system, &ext.lift_objective(&c)).unwrap();
    assert_eq!(lp.value, rat(5, 2));
    assert_eq!(knapsack_opt(&inst, &c).unwrap().value, rat(5, 2));
    assert_eq!(ext.project(&lp.argmax).0[16], Rational::one());
}

#[test]
fn fractional_points_outside_the_hull_stay_out() {
    // all light items at 1 together with the heavy item at 1/2 violates the union
    let ext = build_balas_extension(9, &rat(1, 4)).unwrap();
    let mut objective = vec![Rational::one(); 10];
    objective[9] = rat(3, 1);
    let c = Objective(objective);
    let lp = lp_max(&ext.system, &ext.lift_objective(&c)).unwrap();
    // pieces: 9 light items (value 9) or heavy + one light (value 4)
    assert_eq!(lp.value, rat(9, 1));
    let x = ext.project(&lp.argmax);
    assert!(ext.instance().unwrap().satisfies(&x));
    assert_ne!(x, Point(vec![Rational::one(); 10]));
}

#[test]
fn hull_of_projected_vertices_n4() {
    let ext = build_balas_extension(4, &rat(1, 4)).unwrap();
    let report = hull_check(&ext).unwrap();
    assert!(report.verdict, "{report:?}");
    // 16 subsets without the heavy item plus 5 with it
    assert_eq!(report.feasible_points, 21);
    assert_eq!(report.infeasible_points, 11);
}
