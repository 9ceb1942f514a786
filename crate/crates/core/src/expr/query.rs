//! Structural queries on expressions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::TreeExpr;
use crate::cardinal::{Card, CardValue, TriBool};
use crate::ordinal::Ordinal;

pub(crate) fn checked_height(e: &TreeExpr) -> Option<Ordinal> {
    match e {
        TreeExpr::Chain(a) => Some(a.clone()),
        TreeExpr::Kary { height, .. } => Some(height.clone()),
        TreeExpr::Union(parts) => {
            let mut best = Ordinal::zero();
            for p in parts {
                best = best.max(checked_height(&p.sub)?);
            }
            Some(best)
        }
        TreeExpr::Sum { prefix, sub } => prefix.checked_add(&checked_height(sub)?),
        TreeExpr::Root(sub) => Ordinal::finite(1).checked_add(&checked_height(sub)?),
        TreeExpr::Delta(a) => a.checked_add(&Ordinal::finite(2)),
        TreeExpr::Family(f) => {
            let mut best = Ordinal::zero();
            for p in &f.parts {
                best = best.max(p.order.clone());
            }
            for t in &f.tails {
                best = best.max(t.limit.checked_add(&Ordinal::omega())?);
            }
            Some(best)
        }
    }
}

/// `he(T)`: the least `α` with an empty level `L_α`.
pub fn height(e: &TreeExpr) -> Ordinal {
    checked_height(e).expect("ordinal coefficient overflow")
}

fn chain_card(a: &Ordinal) -> Card {
    match a.as_finite() {
        Some(n) => Card::Finite(n),
        None => Card::ALEPH0,
    }
}

fn kary_card(l: Card, a: &Ordinal) -> CardValue {
    if l == Card::Finite(1) {
        return CardValue::Known(chain_card(a));
    }
    if let Some(n) = a.as_finite() {
        return match l {
            Card::Aleph(_) if n <= 1 => CardValue::Known(Card::Finite(n)),
            Card::Aleph(_) => CardValue::Known(l),
            Card::Finite(k) => {
                // 1 + k + … + k^(n-1)
                let mut total: u64 = 0;
                let mut power: u64 = 1;
                for i in 0..n {
                    total = match total.checked_add(power) {
                        Some(t) => t,
                        None => {
                            return CardValue::Undetermined(
                                "finite size exceeds the 64-bit range".into(),
                            )
                        }
                    };
                    if i + 1 < n {
                        power = match power.checked_mul(k) {
                            Some(p) => p,
                            None => {
                                return CardValue::Undetermined(
                                    "finite size exceeds the 64-bit range".into(),
                                )
                            }
                        };
                    }
                }
                CardValue::Known(Card::Finite(total))
            }
        };
    }
    if *a == Ordinal::omega() {
        return CardValue::Known(l.max(Card::ALEPH0));
    }
    CardValue::Undetermined(format!(
        "|^{{<{a}}}{l}| involves {l}^aleph0; the value of 2^aleph0 is ZFC-independent"
    ))
}

/// `|T|`, or `Undetermined` when the answer depends on cardinal exponentiation.
pub fn cardinality(e: &TreeExpr) -> CardValue {
    match e {
        TreeExpr::Chain(a) => CardValue::Known(chain_card(a)),
        TreeExpr::Kary { branching, height } => kary_card(*branching, height),
        TreeExpr::Union(parts) => parts
            .iter()
            .fold(CardValue::Known(Card::Finite(0)), |acc, p| {
                acc.add(&CardValue::Known(p.mult).mul(&cardinality(&p.sub)))
            }),
        TreeExpr::Sum { prefix, sub } => {
            CardValue::Known(chain_card(prefix)).add(&cardinality(sub))
        }
        TreeExpr::Root(sub) => CardValue::Known(Card::Finite(1)).add(&cardinality(sub)),
        TreeExpr::Delta(_) => CardValue::Known(Card::ALEPH0),
        TreeExpr::Family(f) => {
            let mut total = CardValue::Known(Card::Finite(0));
            for p in &f.parts {
                total = total.add(&CardValue::Known(p.mult.mul(chain_card(&p.order))));
            }
            if !f.tails.is_empty() {
                total = total.add(&CardValue::Known(Card::ALEPH0));
            }
            total
        }
    }
}

/// `|L_0|`, the number of minimal elements (equivalently, of components).
pub fn level0_card(e: &TreeExpr) -> CardValue {
    match e {
        TreeExpr::Union(parts) => parts
            .iter()
            .fold(CardValue::Known(Card::Finite(0)), |acc, p| {
                acc.add(&CardValue::Known(p.mult).mul(&level0_card(&p.sub)))
            }),
        TreeExpr::Delta(_) => CardValue::Known(Card::ALEPH0),
        TreeExpr::Family(f) => CardValue::Known(f.component_count()),
        _ => CardValue::Known(Card::Finite(1)),
    }
}

fn level0_finite(e: &TreeExpr) -> bool {
    level0_card(e).known().is_some_and(Card::is_finite)
}

/// Whether every node (class of elements with the same down-set) is finite.
pub fn has_finite_nodes(e: &TreeExpr) -> TriBool {
    let yes = match e {
        TreeExpr::Chain(_) => true,
        TreeExpr::Kary { branching, height } => {
            branching.is_finite() || *height <= Ordinal::finite(1)
        }
        TreeExpr::Union(parts) => {
            level0_finite(e) && parts.iter().all(|p| has_finite_nodes(&p.sub).is_yes())
        }
        TreeExpr::Sum { sub, .. } | TreeExpr::Root(sub) => return has_finite_nodes(sub),
        TreeExpr::Delta(_) => false,
        TreeExpr::Family(f) => f.component_count().is_finite(),
    };
    yes.into()
}

/// Whether every maximal chain has order type `he(T)`.
pub fn all_branches_full_height(e: &TreeExpr) -> TriBool {
    let yes = match e {
        TreeExpr::Chain(_) | TreeExpr::Kary { .. } => true,
        TreeExpr::Union(parts) => {
            let h = height(e);
            parts
                .iter()
                .all(|p| height(&p.sub) == h && all_branches_full_height(&p.sub).is_yes())
        }
        TreeExpr::Sum { sub, .. } | TreeExpr::Root(sub) => return all_branches_full_height(sub),
        TreeExpr::Delta(_) => false,
        TreeExpr::Family(f) => {
            f.tails.is_empty() && f.parts.windows(2).all(|w| w[0].order == w[1].order)
        }
    };
    yes.into()
}

/// Whether every level `L_α` is finite.
pub fn finite_levels(e: &TreeExpr) -> TriBool {
    let yes = match e {
        TreeExpr::Chain(_) => true,
        TreeExpr::Kary { branching, height } => match branching {
            Card::Finite(1) => true,
            Card::Finite(_) => *height <= Ordinal::omega(),
            Card::Aleph(_) => *height <= Ordinal::finite(1),
        },
        TreeExpr::Union(parts) => {
            level0_finite(e) && parts.iter().all(|p| finite_levels(&p.sub).is_yes())
        }
        TreeExpr::Sum { sub, .. } | TreeExpr::Root(sub) => return finite_levels(sub),
        TreeExpr::Delta(_) => false,
        TreeExpr::Family(f) => f.component_count().is_finite(),
    };
    yes.into()
}

/// An isomorphism class of connectivity components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentClass {
    /// `mult` components isomorphic to `shape`.
    Copies { mult: Card, shape: TreeExpr },
    /// One chain each of length `limit + start`, `limit + start + step`, …
    ChainRun {
        limit: Ordinal,
        start: u64,
        step: u64,
    },
}

/// The connectivity components, grouped by shape.
pub fn components(e: &TreeExpr) -> Vec<ComponentClass> {
    let mut copies: BTreeMap<TreeExpr, Card> = BTreeMap::new();
    let mut runs = Vec::new();
    collect(e, Card::Finite(1), &mut copies, &mut runs);
    let mut out: Vec<ComponentClass> = copies
        .into_iter()
        .map(|(shape, mult)| ComponentClass::Copies { mult, shape })
        .collect();
    out.extend(runs);
    out
}

fn collect(
    e: &TreeExpr,
    scale: Card,
    copies: &mut BTreeMap<TreeExpr, Card>,
    runs: &mut Vec<ComponentClass>,
) {
    let mut push = |shape: TreeExpr, m: Card| {
        let slot = copies.entry(shape).or_insert(Card::Finite(0));
        *slot = slot.add(m.mul(scale));
    };
    match e {
        TreeExpr::Union(parts) if !e.is_connected() => {
            for p in parts {
                collect(&p.sub, scale.mul(p.mult), copies, runs);
            }
        }
        TreeExpr::Union(parts) => collect(&parts[0].sub, scale, copies, runs),
        TreeExpr::Delta(a) => {
            let antichain = TreeExpr::union([(Card::Finite(2), TreeExpr::chain(1))]);
            push(
                super::normalize(&TreeExpr::sum(a.clone(), antichain)),
                Card::ALEPH0,
            );
            push(TreeExpr::Chain(a.add_finite(2)), Card::ALEPH0);
        }
        TreeExpr::Family(f) => {
            for p in &f.parts {
                push(TreeExpr::Chain(p.order.clone()), p.mult);
            }
            for t in &f.tails {
                runs.push(ComponentClass::ChainRun {
                    limit: t.limit.clone(),
                    start: t.start,
                    step: t.step,
                });
            }
        }
        other => push(other.clone(), Card::Finite(1)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn heights() {
        assert_eq!(height(&TreeExpr::kary(Card::Finite(2), w())), w());
        assert_eq!(height(&TreeExpr::delta(w())), w().add_finite(2));
        let u = TreeExpr::union([(Card::ALEPH0, TreeExpr::chain(w()))]);
        assert_eq!(height(&TreeExpr::root(u)), w());
    }

    #[test]
    fn sizes() {
        assert_eq!(
            cardinality(&TreeExpr::kary(Card::Finite(2), w())),
            CardValue::Known(Card::ALEPH0)
        );
        assert_eq!(
            cardinality(&TreeExpr::kary(Card::Finite(3), 3)),
            CardValue::Known(Card::Finite(13))
        );
        assert!(matches!(
            cardinality(&TreeExpr::kary(Card::Finite(2), w().succ())),
            CardValue::Undetermined(_)
        ));
        assert_eq!(
            cardinality(&TreeExpr::kary(Card::Aleph(1), 3)),
            CardValue::Known(Card::Aleph(1))
        );
    }

    #[test]
    fn level_zero() {
        assert_eq!(
            level0_card(&TreeExpr::kary(Card::ALEPH0, w())),
            CardValue::Known(Card::Finite(1))
        );
        let u = TreeExpr::union([
            (Card::ALEPH0, TreeExpr::chain(1)),
            (Card::ALEPH0, TreeExpr::chain(2)),
        ]);
        assert_eq!(level0_card(&u), CardValue::Known(Card::ALEPH0));
        assert_eq!(
            level0_card(&TreeExpr::delta(w())),
            CardValue::Known(Card::ALEPH0)
        );
    }

    #[test]
    fn nodes() {
        assert_eq!(
            has_finite_nodes(&TreeExpr::kary(Card::ALEPH0, w())),
            TriBool::No
        );
        assert_eq!(
            has_finite_nodes(&TreeExpr::kary(Card::Finite(2), w())),
            TriBool::Yes
        );
        let u = TreeExpr::union([(Card::ALEPH0, TreeExpr::kary(Card::Finite(2), w()))]);
        assert_eq!(has_finite_nodes(&u), TriBool::No);
        let r = TreeExpr::root(TreeExpr::union([(Card::Finite(3), TreeExpr::chain(2))]));
        assert_eq!(has_finite_nodes(&r), TriBool::Yes);
    }

    #[test]
    fn branches() {
        assert_eq!(
            all_branches_full_height(&TreeExpr::kary(Card::Finite(2), w())),
            TriBool::Yes
        );
        let u = TreeExpr::union([
            (Card::ALEPH0, TreeExpr::chain(1)),
            (Card::ALEPH0, TreeExpr::chain(2)),
        ]);
        assert_eq!(all_branches_full_height(&u), TriBool::No);
        assert_eq!(all_branches_full_height(&TreeExpr::delta(w())), TriBool::No);
    }

    #[test]
    fn component_lists() {
        let k = TreeExpr::kary(Card::Finite(2), w());
        assert_eq!(
            components(&k),
            vec![ComponentClass::Copies {
                mult: Card::Finite(1),
                shape: k.clone()
            }]
        );
        let u = TreeExpr::union([
            (Card::ALEPH0, TreeExpr::chain(2)),
            (Card::Finite(3), TreeExpr::chain(w())),
        ]);
        assert_eq!(components(&u).len(), 2);
        let d = components(&TreeExpr::delta(w()));
        assert_eq!(d.len(), 2);
        assert!(d.contains(&ComponentClass::Copies {
            mult: Card::ALEPH0,
            shape: TreeExpr::chain(w().add_finite(2))
        }));
    }
}
