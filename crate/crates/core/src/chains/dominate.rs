use super::chain::SubgroupChain;
use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum Domination {
    /// Stage m of B is contained in stage n of A.
    Found { n: usize, m: usize },
    /// No m within the horizon. `obstruction` names a coordinate and a prime
    /// dividing A's divisor there that divides none of B's divisors at that
    /// coordinate on the searched stages; for a custom chain searched to its
    /// last stage this decides "never".
    Unknown {
        n: usize,
        obstruction: Option<(usize, u64)>,
        exhaustive: bool,
    },
}

const TRIAL_LIMIT: u64 = 100_000;

/// Prime factors of `n` below the trial-division limit.
fn small_primes(n: &BigInt) -> Vec<u64> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && n > BigInt::one() {
        let bp = BigInt::from(p);
        if n.is_multiple_of(&bp) {
            out.push(p);
            while n.is_multiple_of(&bp) {
                n /= &bp;
            }
        }
        p += 1;
    }
    if n > BigInt::one() {
        if let Some(q) = n.to_u64().filter(|q| *q <= TRIAL_LIMIT * TRIAL_LIMIT) {
            out.push(q);
        }
    }
    out
}

/// For each stage n of `a` up to `horizon`, the least m ≤ horizon with
/// B_m ⊆ A_n.
pub fn dominates(a: &SubgroupChain, b: &SubgroupChain, horizon: usize) -> Result<Vec<Domination>> {
    if a.group() != b.group() {
        return invalid("chains are over different groups");
    }
    let (a0, a1) = a.range();
    let (b0, b1) = b.range();
    let b_last = b1.min(horizon);
    let b_stages = (b0..=b_last).map(|m| b.stage(m)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for n in a0..=a1.min(horizon) {
        let an = a.stage(n)?;
        if let Some(pos) = b_stages.iter().position(|bm| bm.is_subgroup_of(&an)) {
            out.push(Domination::Found { n, m: b0 + pos });
            continue;
        }
        let mut obstruction = None;
        'coords: for (k, dk) in an.divisors().iter().enumerate() {
            for p in small_primes(dk) {
                let bp = BigInt::from(p);
                if b_stages.iter().all(|bm| !bm.divisors()[k].is_multiple_of(&bp)) {
                    obstruction = Some((k, p));
                    break 'coords;
                }
            }
        }
        let exhaustive = matches!(b.kind(), super::ChainKind::Custom(_)) && b_last == b1;
        out.push(Domination::Unknown {
            n,
            obstruction,
            exhaustive,
        });
    }
    Ok(out)
}
