use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Method, SolveResult};
use crate::error::{Error, Result};
use crate::model::{Objective, Point};
use crate::rational::Rational;

/// Exact optimum of `max c·x` s.t. `weights·x <= cap`, `0 <= x <= 1` with
/// integer `weights >= 0`.
///
/// Items with zero weight and positive profit are set to 1; the rest are
/// filled by decreasing `c_i / weights_i` (lower index first on ties), the
/// last one fractionally.
pub fn greedy_fractional_max(
    c: &Objective,
    weights: &[BigInt],
    cap: &Rational,
) -> Result<SolveResult> {
    if c.dim() != weights.len() {
        return Err(Error::InvalidInstance(
            "objective and weights differ in length".into(),
        ));
    }
    if c.coeffs().iter().any(Rational::is_negative)
        || weights.iter().any(|w| w < &BigInt::zero())
        || cap.is_negative()
    {
        return Err(Error::InvalidInstance(
            "greedy bound needs nonnegative objective, weights and capacity".into(),
        ));
    }
    let mut x = Point::zeros(c.dim());
    let mut value = Rational::zero();
    let mut order = Vec::new();
    for (i, (ci, wi)) in c.coeffs().iter().zip(weights).enumerate() {
        if !ci.is_positive() {
            continue;
        }
        if wi.is_zero() {
            x.0[i] = Rational::one();
            value += ci;
        } else {
            order.push(i);
        }
    }
    // c_i / w_i > c_j / w_j  <=>  c_i·w_j > c_j·w_i
    order.sort_by(|&i, &j| {
        let lhs = &c.coeffs()[i] * &Rational::from_integer(weights[j].clone());
        let rhs = &c.coeffs()[j] * &Rational::from_integer(weights[i].clone());
        match rhs.cmp(&lhs) {
            Ordering::Equal => i.cmp(&j),
            other => other,
        }
    });
    let mut room = cap.clone();
    for i in order {
        if room.is_zero() {
            break;
        }
        let w = Rational::from_integer(weights[i].clone());
        if w <= room {
            room -= &w;
            x.0[i] = Rational::one();
            value += &c.coeffs()[i];
        } else {
            let frac = &room / &w;
            value += &c.coeffs()[i] * &frac;
            x.0[i] = frac;
            room = Rational::zero();
        }
    }
    Ok(SolveResult {
        value,
        argmax: x,
        method: Method::Greedy,
    })
}
