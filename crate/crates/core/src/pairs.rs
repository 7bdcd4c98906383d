//! Which unordered pairs of family members get checked.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PairPolicy {
    All,
    Sample { seed: u64, count: u64 },
}

impl PairPolicy {
    /// Pairs `(i, j)` with `i < j < members`, in ascending order.
    ///
    /// A sample at least as large as the number of pairs degrades to all pairs.
    pub fn select(&self, members: usize) -> Vec<(u32, u32)> {
        let total = total_pairs(members);
        match *self {
            PairPolicy::Sample { seed, count } if (count as u128) < total => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut chosen = BTreeSet::new();
                while (chosen.len() as u64) < count {
                    let a = rng.gen_range(0..members as u32);
                    let b = rng.gen_range(0..members as u32);
                    if a != b {
                        chosen.insert((a.min(b), a.max(b)));
                    }
                }
                chosen.into_iter().collect()
            }
            _ => {
                let mut out = Vec::with_capacity(total as usize);
                for i in 0..members as u32 {
                    for j in i + 1..members as u32 {
                        out.push((i, j));
                    }
                }
                out
            }
        }
    }
}

pub fn total_pairs(members: usize) -> u128 {
    let m = members as u128;
    m * m.saturating_sub(1) / 2
}

impl fmt::Display for PairPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairPolicy::All => f.write_str("all"),
            PairPolicy::Sample { seed, count } => write!(f, "sample:{count}@{seed}"),
        }
    }
}

/// Parses `all` or `sample:<count>`; the seed is supplied separately.
pub fn parse_pair_policy(text: &str, seed: Option<u64>) -> Result<PairPolicy, Error> {
    match text.trim() {
        "all" => Ok(PairPolicy::All),
        other => {
            let count = other
                .strip_prefix("sample:")
                .and_then(|c| u64::from_str(c).ok())
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "pair policy {other:?}: expected all or sample:<count>"
                    ))
                })?;
            let seed = seed.ok_or_else(|| Error::Parse("sampling requires a seed".into()))?;
            Ok(PairPolicy::Sample { seed, count })
        }
    }
}
