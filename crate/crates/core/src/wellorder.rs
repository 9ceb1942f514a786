//! Disjoint unions of well orders `⊔_{i∈I} α_i`, `α_i = γ_i + n_i`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cardinal::{Card, TriBool};
use crate::expr::{paren_ordinal, TreeExpr};
use crate::ordinal::Ordinal;
use crate::seq::{is_reversible_sequence, SeqDescriptor, SeqTail, SeqVerdict};

/// `mult` copies of the well order `order`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WoPart {
    pub order: Ordinal,
    pub mult: Card,
}

/// One copy each of `γ + a`, `γ + a + d`, `γ + a + 2d`, …
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WoTail {
    pub limit: Ordinal,
    pub start: u64,
    pub step: u64,
}

impl WoTail {
    pub fn first(&self) -> Ordinal {
        self.limit.add_finite(self.start)
    }

    pub fn contains(&self, alpha: &Ordinal) -> bool {
        let (g, n) = alpha.decompose();
        g == self.limit && n >= self.start && (n - self.start).is_multiple_of(self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WellOrderFamily {
    pub parts: Vec<WoPart>,
    pub tails: Vec<WoTail>,
}

impl WellOrderFamily {
    /// Merges repeated orders and sorts parts and tails.
    pub fn normalized(&self) -> WellOrderFamily {
        let mut merged: BTreeMap<Ordinal, Card> = BTreeMap::new();
        for p in &self.parts {
            let e = merged.entry(p.order.clone()).or_insert(Card::Finite(0));
            *e = e.add(p.mult);
        }
        let mut tails = self.tails.clone();
        tails.sort();
        WellOrderFamily {
            parts: merged
                .into_iter()
                .map(|(order, mult)| WoPart { order, mult })
                .collect(),
            tails,
        }
    }

    pub fn component_count(&self) -> Card {
        let mut total = self
            .parts
            .iter()
            .fold(Card::Finite(0), |acc, p| acc.add(p.mult));
        if !self.tails.is_empty() {
            total = total.add(Card::ALEPH0);
        }
        total
    }

    /// `|I_α|`: the number of components isomorphic to `α`.
    pub fn multiplicity(&self, alpha: &Ordinal) -> Card {
        let mut m = Card::Finite(0);
        for p in self.parts.iter().filter(|p| &p.order == alpha) {
            m = m.add(p.mult);
        }
        let hits = self.tails.iter().filter(|t| t.contains(alpha)).count();
        m.add(Card::Finite(hits as u64))
    }

    /// The largest limit part `γ*` (0 when every component is finite).
    pub fn max_limit(&self) -> Ordinal {
        self.parts
            .iter()
            .map(|p| p.order.decompose().0)
            .chain(self.tails.iter().map(|t| t.limit.clone()))
            .max()
            .unwrap_or_default()
    }

    /// `⟨n_i : i ∈ J_γ ∖ I_γ⟩` as a sequence descriptor.
    pub fn finite_parts_over(&self, gamma: &Ordinal) -> SeqDescriptor {
        let mut table = BTreeMap::new();
        for p in &self.parts {
            let (g, n) = p.order.decompose();
            if &g == gamma && n >= 1 {
                let e = table.entry(n).or_insert(Card::Finite(0));
                *e = e.add(p.mult);
            }
        }
        let tails = self
            .tails
            .iter()
            .filter(|t| &t.limit == gamma)
            .map(|t| SeqTail {
                start: t.start,
                step: t.step,
                mult: 1,
            })
            .collect();
        SeqDescriptor { table, tails }
    }

    /// The family as `union{ m: chain(α), … }` when it has no tails.
    pub fn to_union(&self) -> Option<TreeExpr> {
        if !self.tails.is_empty() || self.parts.is_empty() {
            return None;
        }
        Some(TreeExpr::union(
            self.parts
                .iter()
                .map(|p| (p.mult, TreeExpr::Chain(p.order.clone()))),
        ))
    }

    /// Reads a union of chains as a family.
    pub fn from_chain_union(e: &TreeExpr) -> Option<WellOrderFamily> {
        match e {
            TreeExpr::Chain(a) => Some(WellOrderFamily {
                parts: vec![WoPart {
                    order: a.clone(),
                    mult: Card::Finite(1),
                }],
                tails: vec![],
            }),
            TreeExpr::Family(f) => Some(f.clone()),
            TreeExpr::Union(parts) => {
                let mut out = WellOrderFamily::default();
                for p in parts {
                    let sub = WellOrderFamily::from_chain_union(&p.sub)?;
                    if p.mult != Card::Finite(1) && !sub.tails.is_empty() {
                        return None;
                    }
                    for q in sub.parts {
                        out.parts.push(WoPart {
                            order: q.order,
                            mult: q.mult.mul(p.mult),
                        });
                    }
                    out.tails.extend(sub.tails);
                }
                Some(out.normalized())
            }
            _ => None,
        }
    }
}

impl fmt::Display for WellOrderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("wfam{")?;
        let mut first = true;
        for p in &self.parts {
            f.write_str(if first { " " } else { ", " })?;
            write!(f, "{}: {}", paren_ordinal(&p.order), p.mult)?;
            first = false;
        }
        for t in &self.tails {
            f.write_str(if first { " " } else { " ; " })?;
            write!(f, "tail {} step {}", paren_ordinal(&t.first()), t.step)?;
            first = false;
        }
        f.write_str(" }")
    }
}

impl std::str::FromStr for WellOrderFamily {
    type Err = crate::expr::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_family(s)
    }
}

impl Serialize for WellOrderFamily {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WellOrderFamily {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Which clause decided the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WellOrderClause {
    /// Every `I_α` is finite.
    AllFinite,
    /// Some `I_α` with `α ≤ γ*` is infinite.
    InfiniteBelowMax { alpha: Ordinal },
    /// Decided by the sequence of finite parts over `γ*`.
    TopSequence,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WellOrderVerdict {
    pub reversible: TriBool,
    pub clause: WellOrderClause,
    pub gamma_star: Ordinal,
    pub sequence: Option<SeqDescriptor>,
    pub seq_verdict: Option<SeqVerdict>,
    pub reason: String,
}

pub fn classify_wellorder_union(f: &WellOrderFamily) -> WellOrderVerdict {
    let f = f.normalized();
    let gamma_star = f.max_limit();
    if f.parts.iter().all(|p| p.mult.is_finite()) {
        return WellOrderVerdict {
            reversible: TriBool::Yes,
            clause: WellOrderClause::AllFinite,
            gamma_star,
            sequence: None,
            seq_verdict: None,
            reason: "Fact 1.3: |I_α| < ω for every α".into(),
        };
    }
    if let Some(p) = f
        .parts
        .iter()
        .find(|p| p.mult.is_infinite() && p.order <= gamma_star)
    {
        return WellOrderVerdict {
            reversible: TriBool::No,
            clause: WellOrderClause::InfiniteBelowMax {
                alpha: p.order.clone(),
            },
            reason: format!(
                "Fact 1.3: γ* = {gamma_star} exists, but I_α is infinite for α = {} ≤ γ*",
                p.order
            ),
            gamma_star,
            sequence: None,
            seq_verdict: None,
        };
    }
    let seq = f.finite_parts_over(&gamma_star);
    let verdict = is_reversible_sequence(&seq);
    let reason = format!(
        "Fact 1.3: γ* = {gamma_star}, every I_α with α ≤ γ* is finite; the finite parts over γ* form {seq}: {}",
        verdict.reason
    );
    WellOrderVerdict {
        reversible: verdict.reversible.clone(),
        clause: WellOrderClause::TopSequence,
        gamma_star,
        sequence: Some(seq),
        seq_verdict: Some(verdict),
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    fn part(order: Ordinal, mult: Card) -> WoPart {
        WoPart { order, mult }
    }

    fn five_part() -> WellOrderFamily {
        WellOrderFamily {
            parts: vec![
                part(w(), Card::Finite(1)),
                part(w().add_finite(4), Card::ALEPH0),
                part(w().add_finite(6), Card::ALEPH0),
            ],
            tails: vec![
                WoTail {
                    limit: Ordinal::zero(),
                    start: 1,
                    step: 1,
                },
                WoTail {
                    limit: w(),
                    start: 1,
                    step: 2,
                },
            ],
        }
    }

    #[test]
    fn five_part_union_is_reversible() {
        let v = classify_wellorder_union(&five_part());
        assert_eq!(v.reversible, TriBool::Yes);
        assert_eq!(v.clause, WellOrderClause::TopSequence);
        assert_eq!(v.gamma_star, w());
    }

    #[test]
    fn one_and_two_infinitely_often() {
        let f = WellOrderFamily {
            parts: vec![
                part(Ordinal::finite(1), Card::ALEPH0),
                part(Ordinal::finite(2), Card::ALEPH0),
            ],
            tails: vec![],
        };
        let v = classify_wellorder_union(&f);
        assert_eq!(v.reversible, TriBool::No);
        assert!(v.seq_verdict.unwrap().witness.is_some());
    }

    #[test]
    fn omega_many_omegas() {
        let f = WellOrderFamily {
            parts: vec![part(w(), Card::ALEPH0)],
            tails: vec![],
        };
        let v = classify_wellorder_union(&f);
        assert_eq!(v.reversible, TriBool::No);
        assert_eq!(v.clause, WellOrderClause::InfiniteBelowMax { alpha: w() });
    }

    #[test]
    fn finite_multiplicities_are_reversible() {
        let f = WellOrderFamily {
            parts: vec![
                part(w(), Card::Finite(3)),
                part(Ordinal::finite(2), Card::Finite(5)),
            ],
            tails: vec![],
        };
        assert_eq!(classify_wellorder_union(&f).reversible, TriBool::Yes);
    }

    #[test]
    fn display_and_multiplicity() {
        let f = five_part();
        assert_eq!(
            f.to_string(),
            "wfam{ w: 1, (w + 4): w, (w + 6): w ; tail 1 step 1 ; tail (w + 1) step 2 }"
        );
        assert_eq!(f.multiplicity(&w().add_finite(5)), Card::Finite(1));
        assert_eq!(f.multiplicity(&w().add_finite(4)), Card::ALEPH0);
        assert_eq!(f.multiplicity(&Ordinal::finite(9)), Card::Finite(1));
        assert_eq!(f.component_count(), Card::ALEPH0);
    }

    #[test]
    fn chain_union_round_trip() {
        let f = WellOrderFamily {
            parts: vec![
                part(Ordinal::finite(1), Card::ALEPH0),
                part(w(), Card::Finite(2)),
            ],
            tails: vec![],
        };
        let u = f.to_union().unwrap();
        assert_eq!(
            WellOrderFamily::from_chain_union(&u).unwrap(),
            f.normalized()
        );
    }
}
