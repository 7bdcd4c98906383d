//! Dictionary-form simplex over exact rationals with Bland's rule.
//!
//! Solves `max c·x` s.t. `A x <= b`, `x >= 0`. Only the nonbasic columns are
//! stored, so a system with many rows and few variables stays small. A
//! negative right-hand side triggers an auxiliary-variable phase one.

use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{LinearSystem, Objective, Point};
use crate::rational::Rational;

/// Rows read `x_basic[i] = rhs[i] - Σ_j coef[i][j] · x_nonbasic[j]`.
struct Dictionary {
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    coef: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    /// `z = obj_const + Σ_j obj[j] · x_nonbasic[j]`
    obj: Vec<Rational>,
    obj_const: Rational,
}

impl Dictionary {
    fn pivot(&mut self, row: usize, col: usize) {
        let a = self.coef[row][col].clone();
        let entering = self.nonbasic[col];
        let leaving = self.basic[row];

        // solve the pivot row for the entering variable
        let inv = a.recip();
        let new_rhs = &self.rhs[row] * &inv;
        let mut new_row: Vec<Rational> = self.coef[row].iter().map(|v| v * &inv).collect();
        new_row[col] = inv;
        self.rhs[row] = new_rhs;
        self.coef[row] = new_row;

        for i in 0..self.coef.len() {
            if i == row || self.coef[i][col].is_zero() {
                continue;
            }
            let factor = self.coef[i][col].clone();
            self.rhs[i] = &self.rhs[i] - &factor * &self.rhs[row];
            for j in 0..self.nonbasic.len() {
                let pivot_entry = &self.coef[row][j];
                if j == col {
                    self.coef[i][j] = -(&factor * pivot_entry);
                } else if !pivot_entry.is_zero() {
                    let delta = &factor * pivot_entry;
                    self.coef[i][j] -= &delta;
                }
            }
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            self.obj_const = &self.obj_const + &factor * &self.rhs[row];
            for j in 0..self.nonbasic.len() {
                let pivot_entry = &self.coef[row][j];
                if j == col {
                    self.obj[j] = -(&factor * pivot_entry);
                } else if !pivot_entry.is_zero() {
                    let delta = &factor * pivot_entry;
                    self.obj[j] -= &delta;
                }
            }
        }
        self.basic[row] = entering;
        self.nonbasic[col] = leaving;
    }

    /// Bland's rule: smallest-index improving variable enters; among tied
    /// ratios the smallest-index basic variable leaves.
    fn optimize(&mut self) -> Result<()> {
        loop {
            let entering = self
                .obj
                .iter()
                .enumerate()
                .filter(|(_, v)| v.is_positive())
                .min_by_key(|&(j, _)| self.nonbasic[j])
                .map(|(j, _)| j);
            let Some(col) = entering else { return Ok(()) };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.coef.len() {
                let a = &self.coef[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((r, q)) => ratio < *q || (ratio == *q && self.basic[i] < self.basic[*r]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return Err(Error::Unbounded);
            };
            self.pivot(row, col);
        }
    }
}

/// Exact optimum of `max c·x` over `sys` (rows `A x <= b`, `x >= 0`).
pub fn lp_max(sys: &LinearSystem, c: &Objective) -> Result<SolveResult> {
    sys.check_shape()?;
    if c.dim() != sys.n {
        return Err(Error::InvalidInstance(format!(
            "objective has {} entries for {} variables",
            c.dim(),
            sys.n
        )));
    }
    let n = sys.n;
    let m = sys.rows.len();
    let mut dict = Dictionary {
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        coef: sys.rows.iter().map(|r| r.coeffs.clone()).collect(),
        rhs: sys.rows.iter().map(|r| r.rhs.clone()).collect(),
        obj: c.coeffs().to_vec(),
        obj_const: Rational::zero(),
    };

    let most_negative = (0..m)
        .filter(|&i| dict.rhs[i].is_negative())
        .min_by(|&i, &j| dict.rhs[i].cmp(&dict.rhs[j]).then(i.cmp(&j)));
    if let Some(row) = most_negative {
        phase_one(&mut dict, row, c)?;
    }
    dict.optimize()?;

    let mut x = Point::zeros(n);
    for (i, &var) in dict.basic.iter().enumerate() {
        if var < n {
            x.0[var] = dict.rhs[i].clone();
        }
    }
    Ok(SolveResult {
        value: dict.obj_const,
        argmax: x,
        method: Method::Simplex,
    })
}

/// Finds a feasible dictionary via an auxiliary variable `x_aux` subtracted
/// from every row, then restores the original objective.
fn phase_one(dict: &mut Dictionary, row: usize, c: &Objective) -> Result<()> {
    let n = c.dim();
    let aux = n + dict.coef.len();
    for r in dict.coef.iter_mut() {
        r.push(-Rational::one());
    }
    dict.nonbasic.push(aux);
    dict.obj = vec![Rational::zero(); dict.nonbasic.len()];
    *dict.obj.last_mut().expect("aux column") = -Rational::one();
    dict.obj_const = Rational::zero();

    let aux_col = dict.nonbasic.len() - 1;
    dict.pivot(row, aux_col);
    dict.optimize()?;
    if dict.obj_const.is_negative() {
        return Err(Error::Infeasible);
    }

    // drive the auxiliary variable out of the basis if it stayed at zero
    if let Some(r) = dict.basic.iter().position(|&v| v == aux) {
        let col = (0..dict.nonbasic.len())
            .filter(|&j| !dict.coef[r][j].is_zero())
            .min_by_key(|&j| dict.nonbasic[j])
            .expect("a basic row always has a nonzero coefficient");
        dict.pivot(r, col);
    }
    let col = dict
        .nonbasic
        .iter()
        .position(|&v| v == aux)
        .expect("aux is nonbasic");
    dict.nonbasic.remove(col);
    for r in dict.coef.iter_mut() {
        r.remove(col);
    }

    // z = Σ c_j x_j, substituting basic variables by their rows
    let mut obj = vec![Rational::zero(); dict.nonbasic.len()];
    let mut obj_const = Rational::zero();
    for (j, &var) in dict.nonbasic.iter().enumerate() {
        if var < n {
            obj[j] += &c.coeffs()[var];
        }
    }
    for (i, &var) in dict.basic.iter().enumerate() {
        if var < n && !c.coeffs()[var].is_zero() {
            let cv = &c.coeffs()[var];
            obj_const += cv * &dict.rhs[i];
            for (j, slot) in obj.iter_mut().enumerate() {
                if !dict.coef[i][j].is_zero() {
                    let delta = cv * &dict.coef[i][j];
                    *slot -= &delta;
                }
            }
        }
    }
    dict.obj = obj;
    dict.obj_const = obj_const;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn system(n: usize, rows: &[(&[i64], i64)]) -> LinearSystem {
        let mut sys = LinearSystem::new(n);
        for (coeffs, rhs) in rows {
            sys.push(coeffs.iter().map(|&v| rat(v, 1)).collect(), rat(*rhs, 1));
        }
        sys
    }

    #[test]
    fn unit_square() {
        let sys = LinearSystem::new(2).with_unit_box();
        let r = lp_max(&sys, &Objective(vec![rat(1, 1), rat(0, 1)])).unwrap();
        assert_eq!(r.value, rat(1, 1));
        assert!(sys.satisfies(&r.argmax));
    }

    #[test]
    fn half_simplex() {
        let mut sys = LinearSystem::new(2);
        sys.push(vec![rat(1, 1), rat(1, 1)], rat(1, 2));
        let sys = sys.with_unit_box();
        let r = lp_max(&sys, &Objective(vec![rat(1, 1), rat(1, 1)])).unwrap();
        assert_eq!(r.value, rat(1, 2));
    }

    #[test]
    fn textbook_example() {
        // max 2x1 + 3x2; 2x1 + x2 <= 18, 6x1 + 5x2 <= 60, 2x1 + 5x2 <= 40 → 28 at (5, 6)
        let sys = system(2, &[(&[2, 1], 18), (&[6, 5], 60), (&[2, 5], 40)]);
        let r = lp_max(&sys, &Objective(vec![rat(2, 1), rat(3, 1)])).unwrap();
        assert_eq!(r.value, rat(28, 1));
        assert_eq!(r.argmax, Point(vec![rat(5, 1), rat(6, 1)]));
    }

    #[test]
    fn phase_one_handles_lower_bounds() {
        // x1 >= 1/2 written as -x1 <= -1/2; maximize -x1 - x2 → -1/2
        let mut sys = LinearSystem::new(2);
        sys.push(vec![rat(-1, 1), rat(0, 1)], rat(-1, 2));
        let sys = sys.with_unit_box();
        let r = lp_max(&sys, &Objective(vec![rat(-1, 1), rat(-1, 1)])).unwrap();
        assert_eq!(r.value, rat(-1, 2));
        assert_eq!(r.argmax, Point(vec![rat(1, 2), rat(0, 1)]));
    }

    #[test]
    fn reports_infeasible_and_unbounded() {
        let sys = system(1, &[(&[1], 1), (&[-1], -2)]);
        assert!(matches!(
            lp_max(&sys, &Objective(vec![rat(1, 1)])),
            Err(Error::Infeasible)
        ));
        let sys = system(2, &[(&[1, -1], 1)]);
        assert!(matches!(
            lp_max(&sys, &Objective(vec![rat(1, 1), rat(0, 1)])),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut sys = LinearSystem::new(4);
        sys.push(
            vec![rat(1, 4), rat(-8, 1), rat(-1, 1), rat(9, 1)],
            rat(0, 1),
        );
        sys.push(
            vec![rat(1, 2), rat(-12, 1), rat(-1, 2), rat(3, 1)],
            rat(0, 1),
        );
        sys.push(vec![rat(0, 1), rat(0, 1), rat(1, 1), rat(0, 1)], rat(1, 1));
        let c = Objective(vec![rat(3, 4), rat(-20, 1), rat(1, 2), rat(-6, 1)]);
        let r = lp_max(&sys, &c).unwrap();
        assert_eq!(r.value, rat(5, 4));
        assert!(sys.satisfies(&r.argmax));
    }
}
