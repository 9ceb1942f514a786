//! Merge plans: finite descriptions of a non-injective surjection `f : I → I`
//! with `Σ_{f(i) = j} n_i = n_j`, witnessing that a sequence is not reversible.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{frobenius_threshold, gcd_of, SeqDescriptor};
use super::{gcd, gcd_divides_infinitely_many, is_independent, semigroup_representation};
use crate::cardinal::Card;

/// `repetition` fibers, each merging indices with values `parts` onto one index with value `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTemplate {
    pub target: u64,
    pub parts: Vec<u64>,
    pub repetition: Card,
}

/// For every `s ≥ 0`, one fiber merging an index of value `start + s·step`
/// together with indices of values `extra` onto an index of value `start + (s+1)·step`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainTemplate {
    pub start: u64,
    pub step: u64,
    pub extra: Vec<u64>,
}

/// Every index not mentioned by a template is a singleton fiber mapped to itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct MergePlan {
    pub fibers: Vec<FiberTemplate>,
    pub chains: Vec<ChainTemplate>,
}

impl fmt::Display for MergePlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items = Vec::new();
        for t in &self.fibers {
            let parts: Vec<String> = t.parts.iter().map(u64::to_string).collect();
            items.push(format!(
                "({}, {{{}}}, {})",
                t.target,
                parts.join(","),
                t.repetition
            ));
        }
        for c in &self.chains {
            let extra: Vec<String> = c.extra.iter().map(u64::to_string).collect();
            items.push(format!(
                "({} + {}s, {{{} + {}s, {}}}, each s)",
                c.start + c.step,
                c.step,
                c.start,
                c.step,
                extra.join(",")
            ));
        }
        f.write_str(&items.join(", "))
    }
}

fn expand(rep: &BTreeMap<u64, u64>) -> Vec<u64> {
    rep.iter()
        .flat_map(|(&e, &c)| std::iter::repeat_n(e, c as usize))
        .collect()
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Builds a merge plan when the sequence is not reversible, `None` otherwise.
pub fn build_merge_plan(s: &SeqDescriptor) -> Option<MergePlan> {
    let s = s.normalized();
    let k = s.infinite_support();
    let report = is_independent(&k);
    if let Some(v) = report.violations.first() {
        return Some(MergePlan {
            fibers: vec![FiberTemplate {
                target: v.n,
                parts: v.parts(),
                repetition: Card::ALEPH0,
            }],
            chains: Vec::new(),
        });
    }
    let g = gcd_of(&k)?;
    if !gcd_divides_infinitely_many(g, &s) {
        return None;
    }
    let threshold = frobenius_threshold(&k)?;
    let tail = s.tails.iter().find(|t| t.start % gcd(t.step, g) == 0)?;
    let mut v0 = tail.start;
    while v0 % g != 0 || v0 < threshold {
        v0 += tail.step;
    }
    let period = lcm(tail.step, g);
    let step = period * threshold.div_ceil(period).max(1);
    let first = semigroup_representation(v0, &k)?;
    let extra = semigroup_representation(step, &k)?;
    Some(MergePlan {
        fibers: vec![FiberTemplate {
            target: v0,
            parts: expand(&first),
            repetition: Card::Finite(1),
        }],
        chains: vec![ChainTemplate {
            start: v0,
            step,
            extra: expand(&extra),
        }],
    })
}

/// Result of [`check_merge_plan`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanCheck {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

/// Longest period checked explicitly beyond the mentioned values.
const MAX_PERIOD: u64 = 1 << 20;

/// Checks that a plan describes a non-injective surjection with fiber sums
/// equal to the target value.
///
/// For every value `v`, let `P(v)` be the number of indices of value `v` used
/// inside non-singleton fibers, `Q(v)` the number used as targets of such
/// fibers, and `M(v)` the multiplicity of `v`. The plan extends to a valid
/// map iff `P(v) ≤ M(v)`, `Q(v) ≤ M(v)`, and `P(v) = Q(v)` when `M(v)` is
/// finite: the remaining indices are fixed, and when `M(v)` is infinite the
/// used and target indices can be chosen so that both sides still cover.
/// Beyond every mentioned value only chain templates act, and the pattern is
/// periodic, so one period past the bound is checked.
pub fn check_merge_plan(plan: &MergePlan, s: &SeqDescriptor) -> PlanCheck {
    let mut diagnostics = Vec::new();
    let mut non_injective = false;
    for t in &plan.fibers {
        if t.parts.is_empty() || t.parts.contains(&0) {
            diagnostics.push(format!(
                "fiber onto {}: parts must be positive values",
                t.target
            ));
        }
        if t.parts.iter().sum::<u64>() != t.target {
            diagnostics.push(format!(
                "fiber onto {}: parts sum to {}",
                t.target,
                t.parts.iter().sum::<u64>()
            ));
        }
        if t.repetition == Card::Finite(0) {
            diagnostics.push(format!("fiber onto {}: zero repetition", t.target));
        } else if t.parts.len() >= 2 {
            non_injective = true;
        }
    }
    for c in &plan.chains {
        if c.step == 0 || c.start == 0 || c.extra.is_empty() || c.extra.contains(&0) {
            diagnostics.push(format!("chain from {}: malformed", c.start));
        } else if c.extra.iter().sum::<u64>() != c.step {
            diagnostics.push(format!(
                "chain from {}: extra parts sum to {}, step is {}",
                c.start,
                c.extra.iter().sum::<u64>(),
                c.step
            ));
        } else {
            non_injective = true;
        }
    }
    if !non_injective {
        diagnostics.push("no fiber merges two or more indices".into());
    }
    if !diagnostics.is_empty() {
        return PlanCheck {
            ok: false,
            diagnostics,
        };
    }

    let mut bound = 0u64;
    for &v in s.table.keys() {
        bound = bound.max(v);
    }
    for t in &s.tails {
        bound = bound.max(t.start);
    }
    for t in &plan.fibers {
        bound = bound.max(t.target);
    }
    for c in &plan.chains {
        bound = bound.max(c.start + c.step);
    }
    let mut period = 1u64;
    for step in s
        .tails
        .iter()
        .map(|t| t.step)
        .chain(plan.chains.iter().map(|c| c.step))
    {
        period = lcm(period, step);
        if period > MAX_PERIOD {
            return PlanCheck {
                ok: false,
                diagnostics: vec![format!("period exceeds {MAX_PERIOD}; cannot check")],
            };
        }
    }

    let mut used: BTreeMap<u64, Card> = BTreeMap::new();
    let mut hit: BTreeMap<u64, Card> = BTreeMap::new();
    let bump = |m: &mut BTreeMap<u64, Card>, v: u64, c: Card| {
        let e = m.entry(v).or_insert(Card::Finite(0));
        *e = e.add(c);
    };
    for t in &plan.fibers {
        for &p in &t.parts {
            bump(&mut used, p, t.repetition);
        }
        bump(&mut hit, t.target, t.repetition);
    }
    for c in &plan.chains {
        for &p in &c.extra {
            bump(&mut used, p, Card::ALEPH0);
        }
    }
    let limit = bound + period;
    for v in 1..=limit {
        let mut p = used.get(&v).copied().unwrap_or(Card::Finite(0));
        let mut q = hit.get(&v).copied().unwrap_or(Card::Finite(0));
        for c in &plan.chains {
            if v >= c.start && (v - c.start) % c.step == 0 {
                p = p.add(Card::Finite(1));
                if v > c.start {
                    q = q.add(Card::Finite(1));
                }
            }
        }
        let m = s.multiplicity(v);
        if p > m {
            diagnostics.push(format!("value {v}: {p} indices merged, only {m} exist"));
        }
        if q > m {
            diagnostics.push(format!("value {v}: {q} targets, only {m} exist"));
        }
        if m.is_finite() && p != q {
            diagnostics.push(format!(
                "value {v}: {p} indices leave but {q} are hit (finite multiplicity {m})"
            ));
        }
    }
    PlanCheck {
        ok: diagnostics.is_empty(),
        diagnostics,
    }
}

pub fn verify_merge_plan(plan: &MergePlan, s: &SeqDescriptor) -> bool {
    check_merge_plan(plan, s).ok
}
