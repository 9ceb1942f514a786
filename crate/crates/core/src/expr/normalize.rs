//! Canonical forms.

use std::collections::BTreeMap;

use super::query::checked_height;
use super::{Part, TreeExpr};
use crate::cardinal::Card;
use crate::ordinal::Ordinal;

const OVERFLOW: &str = "finite size exceeds the 64-bit range";

/// Normalizes an expression, failing only when a finite quantity overflows.
///
/// Unions are flattened, identical parts merged and sorted; trivial k-ary trees
/// become chains; chain prefixes are collected into a single `Sum`, with
/// `Root` kept only over disconnected trees.
pub fn try_normalize(e: &TreeExpr) -> Result<TreeExpr, String> {
    let n = norm(e)?;
    checked_height(&n).ok_or_else(|| "height exceeds the 64-bit coefficient range".to_string())?;
    Ok(n)
}

/// Infallible wrapper around [`try_normalize`] for expressions accepted by the parser.
pub fn normalize(e: &TreeExpr) -> TreeExpr {
    try_normalize(e).expect("expression was validated at parse time")
}

fn norm(e: &TreeExpr) -> Result<TreeExpr, String> {
    Ok(match e {
        TreeExpr::Chain(a) => TreeExpr::Chain(a.clone()),
        TreeExpr::Kary { branching, height } => {
            if *branching == Card::Finite(1) {
                TreeExpr::Chain(height.clone())
            } else if *height == Ordinal::finite(1) {
                TreeExpr::Chain(Ordinal::finite(1))
            } else {
                e.clone()
            }
        }
        TreeExpr::Union(parts) => {
            let mut merged: BTreeMap<TreeExpr, Card> = BTreeMap::new();
            for p in parts {
                let sub = norm(&p.sub)?;
                let flat = match sub {
                    TreeExpr::Union(inner) => inner
                        .into_iter()
                        .map(|q| Ok((q.sub, q.mult.checked_mul(p.mult).ok_or(OVERFLOW)?)))
                        .collect::<Result<Vec<_>, String>>()?,
                    other => vec![(other, p.mult)],
                };
                for (s, m) in flat {
                    let slot = merged.entry(s).or_insert(Card::Finite(0));
                    *slot = slot.checked_add(m).ok_or(OVERFLOW)?;
                }
            }
            TreeExpr::Union(merged.into_iter().map(|(s, m)| Part::new(m, s)).collect())
        }
        TreeExpr::Sum { prefix, sub } => sum_with(prefix.clone(), norm(sub)?)?,
        TreeExpr::Root(sub) => sum_with(Ordinal::finite(1), norm(sub)?)?,
        TreeExpr::Delta(a) => TreeExpr::Delta(a.clone()),
        TreeExpr::Family(f) => TreeExpr::Family(f.normalized()),
    })
}

fn add(a: &Ordinal, b: &Ordinal) -> Result<Ordinal, String> {
    a.checked_add(b).ok_or_else(|| OVERFLOW.to_string())
}

fn sum_with(prefix: Ordinal, sub: TreeExpr) -> Result<TreeExpr, String> {
    match sub {
        TreeExpr::Chain(b) => Ok(TreeExpr::Chain(add(&prefix, &b)?)),
        TreeExpr::Sum { prefix: q, sub } => sum_with(add(&prefix, &q)?, *sub),
        TreeExpr::Root(sub) => sum_with(prefix.succ(), *sub),
        TreeExpr::Union(parts) if parts.len() == 1 && parts[0].mult == Card::Finite(1) => {
            let only = parts.into_iter().next().expect("one part");
            sum_with(prefix, only.sub)
        }
        other if prefix == Ordinal::finite(1) && !other.is_connected() => {
            Ok(TreeExpr::Root(Box::new(other)))
        }
        other => Ok(TreeExpr::Sum {
            prefix,
            sub: Box::new(other),
        }),
    }
}
