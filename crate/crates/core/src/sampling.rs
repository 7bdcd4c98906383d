//! Seeded generators for random instances, systems and objectives.
//!
//! Every trial draws from its own ChaCha stream of the master seed, so trial
//! `i` yields the same data regardless of how trials are scheduled.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{DownMonotoneSystem, KnapsackInstance, LinearSystem, Objective};
use crate::rational::Rational;
use crate::rounding::Polytope;

/// Independent generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform `a/b` with `0 <= a <= max_numer`, `1 <= b <= max_denom`.
pub fn random_rational<R: Rng>(rng: &mut R, max_numer: i64, max_denom: i64) -> Rational {
    Rational::new(rng.gen_range(0..=max_numer), rng.gen_range(1..=max_denom))
}

/// Nonnegative objective; about one coordinate in six is zero.
pub fn random_objective<R: Rng>(rng: &mut R, n: usize) -> Objective {
    Objective(
        (0..n)
            .map(|_| {
                if rng.gen_ratio(1, 6) {
                    Rational::zero()
                } else {
                    random_rational(rng, 50, 7)
                }
            })
            .collect(),
    )
}

/// Weights in `[1/4, 20]`, capacity anywhere between the lightest item and the total.
pub fn random_knapsack<R: Rng>(rng: &mut R, n: usize) -> KnapsackInstance {
    let weights: Vec<Rational> = (0..n)
        .map(|_| Rational::new(rng.gen_range(1..=80), rng.gen_range(1..=4)))
        .collect();
    let total: Rational = weights.iter().sum();
    let fraction = Rational::new(rng.gen_range(1..=19), 20);
    KnapsackInstance::new(weights, total * fraction).expect("nonnegative by construction")
}

/// `rows` random nonnegative constraints, each touching at least one variable.
pub fn random_system<R: Rng>(rng: &mut R, n: usize, rows: usize) -> DownMonotoneSystem {
    let mut sys = LinearSystem::new(n);
    for _ in 0..rows {
        let mut coeffs: Vec<Rational> = (0..n)
            .map(|_| {
                if rng.gen_ratio(1, 3) {
                    Rational::zero()
                } else {
                    Rational::new(rng.gen_range(1..=9), rng.gen_range(1..=3))
                }
            })
            .collect();
        if coeffs.iter().all(Rational::is_zero) {
            coeffs[rng.gen_range(0..n)] = Rational::one();
        }
        let total: Rational = coeffs.iter().sum();
        let rhs = total * Rational::new(rng.gen_range(1..=9), 10);
        sys.push(coeffs, rhs);
    }
    DownMonotoneSystem::new(sys).expect("nonnegative by construction")
}

/// A knapsack hull or a small down-monotone system, with equal odds.
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize) -> Polytope {
    if rng.gen_bool(0.5) {
        Polytope::Knapsack(random_knapsack(rng, n))
    } else {
        let rows = rng.gen_range(1..=3);
        Polytope::System(random_system(rng, n, rows))
    }
}
