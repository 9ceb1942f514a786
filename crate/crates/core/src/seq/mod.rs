//! Reversible sequences of natural numbers.
//!
//! A sequence `⟨n_i : i ∈ I⟩` of positive naturals is reversible when no
//! non-injective surjection `f : I → I` satisfies `Σ_{f(i) = j} n_i = n_j`
//! for every `j`. Equivalently the tree `⊔_i n_i` (a disjoint union of finite
//! chains) is reversible. The decision uses the set `K` of values repeated
//! infinitely often: the sequence is reversible iff `K` is independent and,
//! when `K ≠ ∅`, `gcd(K)` divides only finitely many of the values.

mod plan;
mod semigroup;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::cardinal::{Card, TriBool};

pub use plan::{
    build_merge_plan, check_merge_plan, verify_merge_plan, ChainTemplate, FiberTemplate, MergePlan,
    PlanCheck,
};
pub use semigroup::{
    frobenius_threshold, gcd, gcd_of, is_independent, semigroup_member, semigroup_member_oracle,
    semigroup_representation, IndependenceReport, Violation, ORACLE_LIMIT,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeqError {
    #[error("oracle bound exceeded: n = {0} > {ORACLE_LIMIT}")]
    OracleBound(u64),
    #[error("invalid sequence descriptor: {0}")]
    Invalid(String),
}

/// Arithmetic tail `start, start + step, start + 2·step, …`, each value repeated `mult` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeqTail {
    pub start: u64,
    pub step: u64,
    pub mult: u64,
}

impl SeqTail {
    pub fn contains(&self, v: u64) -> bool {
        v >= self.start && (v - self.start).is_multiple_of(self.step)
    }
}

/// Finite presentation of an infinite sequence of positive naturals: a table
/// `value ↦ multiplicity` plus arithmetic tails of finite multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SeqDescriptor {
    pub table: BTreeMap<u64, Card>,
    pub tails: Vec<SeqTail>,
}

impl SeqDescriptor {
    pub fn new(table: BTreeMap<u64, Card>, tails: Vec<SeqTail>) -> Result<Self, SeqError> {
        let s = SeqDescriptor { table, tails };
        s.validate()?;
        Ok(s)
    }

    pub fn from_table(entries: impl IntoIterator<Item = (u64, Card)>) -> Self {
        let mut table = BTreeMap::new();
        for (v, m) in entries {
            let e = table.entry(v).or_insert(Card::Finite(0));
            *e = e.add(m);
        }
        SeqDescriptor {
            table,
            tails: Vec::new(),
        }
    }

    pub fn with_tail(mut self, start: u64, step: u64, mult: u64) -> Self {
        self.tails.push(SeqTail { start, step, mult });
        self
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        for (&v, &m) in &self.table {
            if v == 0 {
                return Err(SeqError::Invalid("values must be positive".into()));
            }
            if m == Card::Finite(0) {
                return Err(SeqError::Invalid(format!("value {v} has multiplicity 0")));
            }
        }
        for t in &self.tails {
            if t.start == 0 || t.step == 0 || t.mult == 0 {
                return Err(SeqError::Invalid(
                    "tail start, step and multiplicity must be positive".into(),
                ));
            }
        }
        Ok(())
    }

    /// Number of indices carrying value `v`.
    pub fn multiplicity(&self, v: u64) -> Card {
        let mut m = self.table.get(&v).copied().unwrap_or(Card::Finite(0));
        for t in &self.tails {
            if t.contains(v) {
                m = m.add(Card::Finite(t.mult));
            }
        }
        m
    }

    /// Canonical form: tail values at or below the largest table value are
    /// moved into the table (absorbed by an infinite entry), and identical
    /// tails are merged.
    pub fn normalized(&self) -> SeqDescriptor {
        let mut table = self.table.clone();
        let max_key = table.keys().next_back().copied().unwrap_or(0);
        let mut tails: BTreeMap<(u64, u64), u64> = BTreeMap::new();
        for t in &self.tails {
            let mut start = t.start;
            while start <= max_key {
                let e = table.entry(start).or_insert(Card::Finite(0));
                *e = e.add(Card::Finite(t.mult));
                start += t.step;
            }
            *tails.entry((start, t.step)).or_insert(0) += t.mult;
        }
        SeqDescriptor {
            table,
            tails: tails
                .into_iter()
                .map(|((start, step), mult)| SeqTail { start, step, mult })
                .collect(),
        }
    }

    /// `K`: the values carried by infinitely many indices.
    pub fn infinite_support(&self) -> BTreeSet<u64> {
        self.table
            .iter()
            .filter(|(_, m)| m.is_infinite())
            .map(|(&v, _)| v)
            .collect()
    }

    /// Total number of indices.
    pub fn index_count(&self) -> Card {
        let mut total = self
            .table
            .values()
            .fold(Card::Finite(0), |acc, &m| acc.add(m));
        if !self.tails.is_empty() {
            total = total.add(Card::ALEPH0);
        }
        total
    }
}

impl fmt::Display for SeqDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("seq{")?;
        let mut first = true;
        for (v, m) in &self.table {
            f.write_str(if first { " " } else { ", " })?;
            write!(f, "{v}: {m}")?;
            first = false;
        }
        for t in &self.tails {
            f.write_str(if first { " " } else { " ; " })?;
            write!(f, "tail {} + {}t x{}", t.start, t.step, t.mult)?;
            first = false;
        }
        f.write_str(" }")
    }
}

impl std::str::FromStr for SeqDescriptor {
    type Err = crate::expr::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_seq(s)
    }
}

impl Serialize for SeqDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SeqDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Outcome of the sequence test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeqVerdict {
    pub reversible: TriBool,
    #[serde(rename = "K")]
    pub k_set: BTreeSet<u64>,
    #[serde(rename = "gcdK")]
    pub gcd_k: Option<u64>,
    pub reason: String,
    pub witness: Option<MergePlan>,
}

/// Whether `g` divides infinitely many distinct values of `s`.
///
/// Only tails contribute infinitely many distinct values; `a + d·t ≡ 0 (mod g)`
/// is solvable iff `gcd(d, g)` divides `a`.
pub fn gcd_divides_infinitely_many(g: u64, s: &SeqDescriptor) -> bool {
    g >= 1 && s.tails.iter().any(|t| t.start % gcd(t.step, g) == 0)
}

fn fmt_set(set: &BTreeSet<u64>) -> String {
    let items: Vec<String> = set.iter().map(u64::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn is_reversible_sequence(s: &SeqDescriptor) -> SeqVerdict {
    let s = s.normalized();
    let k = s.infinite_support();
    let report = is_independent(&k);
    let g = gcd_of(&k);
    let (reversible, reason) = if let Some(v) = report.violations.first() {
        (
            false,
            format!(
                "Fact 1.2: K = {} is not independent ({} = {})",
                fmt_set(&k),
                v.n,
                v.render_sum()
            ),
        )
    } else if let Some(g) = g.filter(|&g| gcd_divides_infinitely_many(g, &s)) {
        (
            false,
            format!(
                "Fact 1.2: K = {} is independent but gcd(K) = {g} divides infinitely many values",
                fmt_set(&k)
            ),
        )
    } else if k.is_empty() {
        (
            true,
            "Fact 1.2: K = {} (no value repeats infinitely often)".to_string(),
        )
    } else {
        (
            true,
            format!(
                "Fact 1.2: K = {} is independent and gcd(K) = {} divides finitely many values",
                fmt_set(&k),
                g.unwrap_or(0)
            ),
        )
    };
    let witness = if reversible {
        None
    } else {
        build_merge_plan(&s)
    };
    SeqVerdict {
        reversible: reversible.into(),
        k_set: k,
        gcd_k: g,
        reason,
        witness,
    }
}
