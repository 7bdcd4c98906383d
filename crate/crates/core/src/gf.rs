//! Prime-field polynomials and the set system of their graphs.
//!
//! For a prime `p` and degree bound `d`, every polynomial `π` over `F_p` of
//! degree at most `d` yields the set `{a·p + π(a) : a ∈ F_p}` inside the
//! universe `[0, p²)`. Two distinct polynomials agree on at most `d` points,
//! so distinct sets meet in at most `d` elements.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pairs::{total_pairs, PairPolicy};

/// Default upper bound on the number of sets a family may hold.
pub const DEFAULT_FAMILY_CAP: u128 = 2_000_000;

/// Deterministic trial division; adequate for field sizes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut k = 3u64;
    while k.saturating_mul(k) <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 2;
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 16 {
            return Err(Error::Regime(format!(
                "field size {p} too large for a p² universe index"
            )));
        }
        Ok(PrimeField { p })
    }

    pub fn order(&self) -> u64 {
        self.p
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.p
    }
}

/// Horner evaluation of `Σ coeffs[k]·a^k mod p`; inputs must be reduced.
pub fn poly_eval(coeffs: &[u64], a: u64, p: u64) -> u64 {
    coeffs.iter().rev().fold(0, |acc, &c| (acc * a + c) % p)
}

/// Universe index of the pair `(a, b)`.
pub fn pair_index(a: u64, b: u64, p: u64) -> u32 {
    (a * p + b) as u32
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolySet {
    pub coeffs: Vec<u64>,
    pub elements: Vec<u32>,
}

impl PolySet {
    pub fn from_coeffs(coeffs: Vec<u64>, p: u64) -> Self {
        let elements = (0..p)
            .map(|a| pair_index(a, poly_eval(&coeffs, a, p), p))
            .collect();
        PolySet { coeffs, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Size of the intersection of two ascending index lists.
pub fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    pub p: u64,
    pub d: u64,
    pub sets: Vec<PolySet>,
}

#[derive(Serialize, Deserialize)]
struct SetSystemFile {
    p: u64,
    d: u64,
    sets: Vec<Vec<u32>>,
}

impl Serialize for SetSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        SetSystemFile {
            p: self.p,
            d: self.d,
            sets: self.sets.iter().map(|s| s.elements.clone()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SetSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = SetSystemFile::deserialize(deserializer)?;
        let width = file.d as usize + 1;
        let sets = file
            .sets
            .into_iter()
            .enumerate()
            .map(|(k, elements)| PolySet {
                coeffs: coeffs_of_index(k as u128, file.p, width),
                elements,
            })
            .collect();
        Ok(SetSystem {
            p: file.p,
            d: file.d,
            sets,
        })
    }
}

/// Coefficient tuple at position `index` in lexicographic order, `c0` most significant.
pub fn coeffs_of_index(mut index: u128, p: u64, width: usize) -> Vec<u64> {
    let mut coeffs = vec![0; width];
    for slot in coeffs.iter_mut().rev() {
        *slot = (index % p as u128) as u64;
        index /= p as u128;
    }
    coeffs
}

/// `p^(d+1)`, the number of polynomials of degree at most `d`.
pub fn family_size(p: u64, d: u64) -> Option<u128> {
    (p as u128).checked_pow(d as u32 + 1)
}

/// One set per coefficient tuple in `F_p^(d+1)`, in lexicographic order.
pub fn build_nw_family(p: u64, d: u64) -> Result<SetSystem> {
    build_nw_family_capped(p, d, DEFAULT_FAMILY_CAP)
}

pub fn build_nw_family_capped(p: u64, d: u64, cap: u128) -> Result<SetSystem> {
    let field = PrimeField::new(p)?;
    if d >= field.order() {
        return Err(Error::DegreeTooLarge { p, degree: d });
    }
    let size = family_size(p, d)
        .filter(|&s| s <= cap)
        .ok_or(Error::FamilyTooLarge {
            size: family_size(p, d).unwrap_or(u128::MAX),
            cap,
        })?;
    let width = d as usize + 1;
    let sets = (0..size)
        .map(|k| PolySet::from_coeffs(coeffs_of_index(k, p, width), p))
        .collect();
    Ok(SetSystem { p, d, sets })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSystemReport {
    pub p: u64,
    pub d: u64,
    pub count: u128,
    pub expected_count: u128,
    pub uniform_size: bool,
    pub distinct: bool,
    pub max_intersection: usize,
    pub pairs_checked: u128,
    pub pairs_total: u128,
    pub policy: PairPolicy,
    pub verdict: bool,
}

/// Checks uniform size `p`, distinctness, the count `p^(d+1)` and
/// `|S ∩ S'| <= d` over the pairs chosen by `policy`.
pub fn verify_set_system(sys: &SetSystem, policy: PairPolicy) -> SetSystemReport {
    let count = sys.sets.len() as u128;
    let expected_count = family_size(sys.p, sys.d).unwrap_or(u128::MAX);
    let uniform_size = sys.sets.iter().all(|s| s.len() as u64 == sys.p);
    let mut seen = HashSet::with_capacity(sys.sets.len());
    let distinct = sys.sets.iter().all(|s| seen.insert(&s.elements));

    let members = sys.sets.len();
    let (max_intersection, pairs_checked) = match policy {
        PairPolicy::All => (0..members)
            .into_par_iter()
            .map(|i| {
                let a = &sys.sets[i].elements;
                let best = sys.sets[i + 1..]
                    .iter()
                    .map(|s| intersection_size(a, &s.elements))
                    .max()
                    .unwrap_or(0);
                best
            })
            .max()
            .map(|m| (m, total_pairs(members)))
            .unwrap_or((0, 0)),
        PairPolicy::Sample { .. } => {
            let pairs = policy.select(members);
            let max = pairs
                .par_iter()
                .map(|&(i, j)| {
                    intersection_size(
                        &sys.sets[i as usize].elements,
                        &sys.sets[j as usize].elements,
                    )
                })
                .max()
                .unwrap_or(0);
            (max, pairs.len() as u128)
        }
    };

    let verdict =
        uniform_size && distinct && count == expected_count && max_intersection as u64 <= sys.d;
    SetSystemReport {
        p: sys.p,
        d: sys.d,
        count,
        expected_count,
        uniform_size,
        distinct,
        max_intersection,
        pairs_checked,
        pairs_total: total_pairs(members),
        policy,
        verdict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(13).is_ok());
    }

    #[test]
    fn horner_examples() {
        assert_eq!(poly_eval(&[0], 7, 13), 0);
        for a in 0..13 {
            assert_eq!(poly_eval(&[9], a, 13), 9);
        }
        // 1 + 2·2 + 3·4 = 17 ≡ 4
        assert_eq!(poly_eval(&[1, 2, 3], 2, 13), 4);
    }

    #[test]
    fn constants_over_f2() {
        let sys = build_nw_family(2, 0).unwrap();
        let sets: Vec<_> = sys.sets.iter().map(|s| s.elements.clone()).collect();
        assert_eq!(sets, vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn small_family_brute_force() {
        let sys = build_nw_family(3, 1).unwrap();
        assert_eq!(sys.sets.len(), 9);
        // independent brute force over all 36 pairs via explicit set intersection
        let mut max = 0;
        for i in 0..9 {
            for j in i + 1..9 {
                let a: HashSet<_> = sys.sets[i].elements.iter().collect();
                let common = sys.sets[j]
                    .elements
                    .iter()
                    .filter(|e| a.contains(e))
                    .count();
                max = max.max(common);
            }
        }
        assert_eq!(max, 1);
        let report = verify_set_system(&sys, PairPolicy::All);
        assert!(report.verdict);
        assert_eq!(report.max_intersection, 1);
        assert_eq!(report.pairs_checked, 36);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(build_nw_family(4, 0), Err(Error::NotPrime(4))));
        assert!(matches!(
            build_nw_family(5, 5),
            Err(Error::DegreeTooLarge { .. })
        ));
        assert!(matches!(
            build_nw_family_capped(13, 2, 100),
            Err(Error::FamilyTooLarge { .. })
        ));
    }

    #[test]
    fn duplicated_set_fails_verification() {
        let mut sys = build_nw_family(5, 1).unwrap();
        let dup = sys.sets[3].clone();
        sys.sets[7] = dup;
        let report = verify_set_system(&sys, PairPolicy::All);
        assert!(!report.distinct);
        assert_eq!(report.max_intersection, 5);
        assert!(!report.verdict);
    }

    #[test]
    fn index_pairing_is_a_bijection() {
        for p in [2u64, 3, 5, 7, 13] {
            let mut seen = HashSet::new();
            for a in 0..p {
                for b in 0..p {
                    let idx = pair_index(a, b, p);
                    assert!((idx as u64) < p * p);
                    assert!(seen.insert(idx));
                }
            }
            assert_eq!(seen.len() as u64, p * p);
        }
    }

    #[test]
    fn interpolation_is_unique_for_small_fields() {
        // For every choice of d+1 distinct abscissae and arbitrary ordinates,
        // exactly one polynomial of degree <= d passes through them.
        for p in [2u64, 3, 5] {
            for d in 0..p.min(3) {
                let width = d as usize + 1;
                let polys: Vec<Vec<u64>> = (0..family_size(p, d).unwrap())
                    .map(|k| coeffs_of_index(k, p, width))
                    .collect();
                let xs: Vec<u64> = (0..=d).collect();
                for ys_index in 0..family_size(p, d).unwrap() {
                    let ys = coeffs_of_index(ys_index, p, width);
                    let matches = polys
                        .iter()
                        .filter(|c| xs.iter().zip(&ys).all(|(&x, &y)| poly_eval(c, x, p) == y))
                        .count();
                    assert_eq!(matches, 1, "p={p} d={d} ys={ys:?}");
                }
            }
        }
    }

    #[test]
    fn json_round_trip_restores_coefficients() {
        let sys = build_nw_family(3, 1).unwrap();
        let text = serde_json::to_string(&sys).unwrap();
        assert!(text.starts_with(r#"{"p":3,"d":1,"sets":[[0,3,6],"#));
        let back: SetSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
    }
}
