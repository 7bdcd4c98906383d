//! Brute-force vertex enumeration: every choice of `n` tight constraints
//! among the rows and the nonnegativity bounds, solved exactly. Used as an
//! oracle for the simplex and for tiny polyhedral checks.

use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{dot, LinearSystem, Objective, Point};
use crate::rational::Rational;

/// Upper bound on the number of constraint subsets tried.
pub const DEFAULT_SUBSET_LIMIT: u128 = 5_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Solves the square system; `None` if singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in col..n {
                let delta = &factor * &a[col][j];
                a[r][j] -= &delta;
            }
            let delta = &factor * &b[col];
            b[r] -= &delta;
        }
    }
    Some(b)
}

/// All vertices of `{x >= 0 : A x <= b}`, deduplicated, in discovery order.
pub fn enumerate_vertices(sys: &LinearSystem) -> Result<Vec<Point>> {
    sys.check_shape()?;
    let n = sys.n;
    let total = sys.rows.len() + n;
    let subsets = binomial(total, n);
    if subsets > DEFAULT_SUBSET_LIMIT {
        return Err(Error::BudgetExceeded(format!(
            "vertex enumeration would try {subsets} subsets"
        )));
    }
    // constraint k < rows is row k; otherwise -x_{k-rows} <= 0
    let constraint = |k: usize| -> (Vec<Rational>, Rational) {
        if k < sys.rows.len() {
            (sys.rows[k].coeffs.clone(), sys.rows[k].rhs.clone())
        } else {
            let mut coeffs = vec![Rational::zero(); n];
            coeffs[k - sys.rows.len()] = -Rational::one();
            (coeffs, Rational::zero())
        }
    };

    let mut found: Vec<Point> = Vec::new();
    let mut chosen: Vec<usize> = (0..n).collect();
    if n == 0 {
        return Ok(vec![Point(Vec::new())]);
    }
    loop {
        let (a, b): (Vec<_>, Vec<_>) = chosen.iter().map(|&k| constraint(k)).unzip();
        if let Some(x) = solve_square(a, b) {
            let point = Point(x);
            if sys.satisfies(&point) && !found.contains(&point) {
                found.push(point);
            }
        }
        // next combination in lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            if chosen[i] < total - n + i {
                chosen[i] += 1;
                for j in i + 1..n {
                    chosen[j] = chosen[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Maximum of `c·x` over the enumerated vertices.
pub fn vertex_max(sys: &LinearSystem, c: &Objective) -> Result<SolveResult> {
    let vertices = enumerate_vertices(sys)?;
    let mut best: Option<(Rational, Point)> = None;
    for v in vertices {
        let value = dot(c.coeffs(), v.coords());
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, v));
        }
    }
    let (value, argmax) = best.ok_or(Error::Infeasible)?;
    Ok(SolveResult {
        value,
        argmax,
        method: Method::Enumeration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn square_has_four_vertices() {
        let sys = LinearSystem::new(2).with_unit_box();
        let v = enumerate_vertices(&sys).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn cut_cube() {
        let mut sys = LinearSystem::new(3);
        sys.push(vec![rat(1, 1), rat(1, 1), rat(1, 1)], rat(3, 2));
        let sys = sys.with_unit_box();
        // origin, three unit vectors, six permutations of (1, 1/2, 0)
        let v = enumerate_vertices(&sys).unwrap();
        assert_eq!(v.len(), 10);
        let best = vertex_max(&sys, &Objective(vec![rat(1, 1), rat(1, 1), rat(1, 1)])).unwrap();
        assert_eq!(best.value, rat(3, 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 9), 167_960);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(6, 3), 20);
    }
}
