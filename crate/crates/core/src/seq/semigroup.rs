//! Numerical semigroups: membership, representations, independence.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SeqError;

/// Largest `n` accepted by [`semigroup_member_oracle`].
pub const ORACLE_LIMIT: u64 = 10_000;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_of(set: &BTreeSet<u64>) -> Option<u64> {
    set.iter().copied().reduce(gcd)
}

/// Reachability table: `last[x]` is an element of `K` ending some
/// representation of `x` (0 when `x` is not a non-empty sum).
fn reach_table(n: u64, k: &BTreeSet<u64>) -> Vec<u64> {
    let n = n as usize;
    let mut last = vec![0u64; n + 1];
    for x in 1..=n {
        for &e in k {
            let e_us = e as usize;
            if e_us > x {
                break;
            }
            if e_us == x || last[x - e_us] != 0 {
                last[x] = e;
                break;
            }
        }
    }
    last
}

/// Whether `n` is a non-empty sum of elements of `K` (repetition allowed).
pub fn semigroup_member(n: u64, k: &BTreeSet<u64>) -> bool {
    n >= 1 && !k.is_empty() && reach_table(n, k)[n as usize] != 0
}

/// A representation `n = Σ c_e · e` as a map `e ↦ c_e`, if one exists.
pub fn semigroup_representation(n: u64, k: &BTreeSet<u64>) -> Option<BTreeMap<u64, u64>> {
    if n == 0 || k.is_empty() {
        return None;
    }
    let last = reach_table(n, k);
    if last[n as usize] == 0 {
        return None;
    }
    let mut out = BTreeMap::new();
    let mut x = n as usize;
    while x > 0 {
        let e = last[x];
        *out.entry(e).or_insert(0) += 1;
        x -= e as usize;
    }
    Some(out)
}

/// Brute-force membership by enumerating every multiset of `K` with sum at most `n`.
pub fn semigroup_member_oracle(n: u64, k: &BTreeSet<u64>) -> Result<bool, SeqError> {
    if n > ORACLE_LIMIT {
        return Err(SeqError::OracleBound(n));
    }
    fn go(items: &[u64], remaining: u64, used: bool) -> bool {
        match items.split_first() {
            None => remaining == 0 && used,
            Some((&e, rest)) => {
                let max = remaining / e;
                (0..=max)
                    .rev()
                    .any(|c| go(rest, remaining - c * e, used || c > 0))
            }
        }
    }
    let items: Vec<u64> = k.iter().rev().copied().filter(|&e| e > 0).collect();
    Ok(n >= 1 && go(&items, n, false))
}

/// `n ∈ K` written as a sum of other elements of `K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub n: u64,
    pub combination: BTreeMap<u64, u64>,
}

impl Violation {
    pub fn parts(&self) -> Vec<u64> {
        self.combination
            .iter()
            .flat_map(|(&e, &c)| std::iter::repeat_n(e, c as usize))
            .collect()
    }

    pub fn render_sum(&self) -> String {
        let parts: Vec<String> = self.parts().iter().map(u64::to_string).collect();
        parts.join(" + ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub independent: bool,
    pub violations: Vec<Violation>,
}

/// `K` is independent when no element is a sum of two or more elements of `K`.
/// Every such sum uses only strictly smaller elements.
pub fn is_independent(k: &BTreeSet<u64>) -> IndependenceReport {
    let mut violations = Vec::new();
    for &n in k {
        let smaller: BTreeSet<u64> = k.range(..n).copied().collect();
        if let Some(combination) = semigroup_representation(n, &smaller) {
            violations.push(Violation { n, combination });
        }
    }
    IndependenceReport {
        independent: violations.is_empty(),
        violations,
    }
}

/// Least `F` such that every multiple of `gcd(K)` that is `≥ F` lies in `⟨K⟩`.
pub fn frobenius_threshold(k: &BTreeSet<u64>) -> Option<u64> {
    let g = gcd_of(k)?;
    let reduced: BTreeSet<u64> = k.iter().map(|e| e / g).collect();
    let min = *reduced.iter().next()?;
    // Search until `min` consecutive members appear; everything after follows.
    let mut limit = 64u64.max(min * 4);
    loop {
        let last = reach_table(limit, &reduced);
        let mut run = 0u64;
        let mut largest_gap = 0u64;
        for x in 1..=limit {
            if last[x as usize] != 0 {
                run += 1;
                if run == min {
                    return Some((largest_gap + 1) * g);
                }
            } else {
                run = 0;
                largest_gap = x;
            }
        }
        limit *= 2;
    }
}
