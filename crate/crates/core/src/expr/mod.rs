//! The tree-description language: AST, parser, canonical printer, normalizer,
//! and the structural queries (height, size, nodes, branches, components).

mod normalize;
mod parse;
mod query;

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cardinal::Card;
use crate::ordinal::Ordinal;
use crate::wellorder::WellOrderFamily;

pub use normalize::{normalize, try_normalize};
pub use parse::{parse_card, parse_expr, parse_family, parse_ordinal, parse_seq, ParseError};
pub use query::{
    all_branches_full_height, cardinality, components, finite_levels, has_finite_nodes, height,
    level0_card, ComponentClass,
};

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;

/// Symbolic description of a (possibly infinite) tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeExpr {
    /// The well order `α`, `α ≥ 1`.
    Chain(Ordinal),
    /// The complete `λ`-ary tree `^{<α}λ` of all sequences of length `< α`.
    Kary { branching: Card, height: Ordinal },
    /// Disjoint union of `mult` copies of each (rooted) part.
    Union(Vec<Part>),
    /// The ordinal sum `prefix + sub`: a chain placed below every element of `sub`.
    Sum { prefix: Ordinal, sub: Box<TreeExpr> },
    /// The rooted lift `T_r`: one fresh element below all of `sub`.
    Root(Box<TreeExpr>),
    /// `Δ_α`: ℤ-indexed copies of `α`, topped by a 2-antichain for `n ≤ 0`
    /// and by a 2-chain for `n > 0`.
    Delta(Ordinal),
    /// A disjoint union of well orders given by a finite family description.
    Family(WellOrderFamily),
}

/// One `mult: sub` entry of a union.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Part {
    pub mult: Card,
    pub sub: TreeExpr,
}

impl Part {
    pub fn new(mult: Card, sub: TreeExpr) -> Self {
        Part { mult, sub }
    }
}

impl TreeExpr {
    pub fn chain(alpha: impl Into<Ordinal>) -> Self {
        TreeExpr::Chain(alpha.into())
    }

    pub fn kary(branching: Card, height: impl Into<Ordinal>) -> Self {
        TreeExpr::Kary {
            branching,
            height: height.into(),
        }
    }

    pub fn union(parts: impl IntoIterator<Item = (Card, TreeExpr)>) -> Self {
        TreeExpr::Union(parts.into_iter().map(|(m, s)| Part::new(m, s)).collect())
    }

    pub fn sum(prefix: impl Into<Ordinal>, sub: TreeExpr) -> Self {
        TreeExpr::Sum {
            prefix: prefix.into(),
            sub: Box::new(sub),
        }
    }

    pub fn root(sub: TreeExpr) -> Self {
        TreeExpr::Root(Box::new(sub))
    }

    pub fn delta(alpha: impl Into<Ordinal>) -> Self {
        TreeExpr::Delta(alpha.into())
    }

    /// Whether the described tree has exactly one minimal element.
    pub fn is_connected(&self) -> bool {
        match self {
            TreeExpr::Chain(_)
            | TreeExpr::Kary { .. }
            | TreeExpr::Sum { .. }
            | TreeExpr::Root(_) => true,
            TreeExpr::Union(parts) => match parts.as_slice() {
                [p] => p.mult == Card::Finite(1) && p.sub.is_connected(),
                _ => false,
            },
            TreeExpr::Delta(_) => false,
            TreeExpr::Family(f) => f.component_count() == Card::Finite(1),
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    /// Nesting depth of constructors (a leaf has depth 1).
    pub fn depth(&self) -> usize {
        match self {
            TreeExpr::Union(parts) => 1 + parts.iter().map(|p| p.sub.depth()).max().unwrap_or(0),
            TreeExpr::Sum { sub, .. } | TreeExpr::Root(sub) => 1 + sub.depth(),
            _ => 1,
        }
    }
}

/// Renders an ordinal, parenthesized when it has more than one term.
pub(crate) fn paren_ordinal(o: &Ordinal) -> String {
    if o.terms().len() > 1 {
        format!("({o})")
    } else {
        o.to_string()
    }
}

impl fmt::Display for TreeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeExpr::Chain(a) => write!(f, "chain({a})"),
            TreeExpr::Kary { branching, height } => write!(f, "kary({branching}, {height})"),
            TreeExpr::Union(parts) => {
                f.write_str("union{ ")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}: {}", p.mult, p.sub)?;
                }
                f.write_str(" }")
            }
            TreeExpr::Sum { prefix, sub } => write!(f, "sum({prefix}, {sub})"),
            TreeExpr::Root(sub) => write!(f, "root({sub})"),
            TreeExpr::Delta(a) => write!(f, "delta({a})"),
            TreeExpr::Family(fam) => write!(f, "{fam}"),
        }
    }
}

/// Canonical text of an expression.
pub fn render_expr(e: &TreeExpr) -> String {
    e.to_string()
}

impl std::str::FromStr for TreeExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

impl Serialize for TreeExpr {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TreeExpr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_examples() {
        let w = Ordinal::omega();
        assert_eq!(
            render_expr(&TreeExpr::kary(Card::Finite(2), w.clone())),
            "kary(2, w)"
        );
        assert_eq!(
            render_expr(&TreeExpr::chain(w.add_finite(4))),
            "chain(w + 4)"
        );
        let u = TreeExpr::union([(Card::Finite(3), TreeExpr::chain(w))]);
        assert_eq!(render_expr(&u), "union{ 3: chain(w) }");
    }

    #[test]
    fn connectivity() {
        let w = Ordinal::omega();
        assert!(TreeExpr::chain(3).is_connected());
        assert!(!TreeExpr::delta(w.clone()).is_connected());
        assert!(TreeExpr::union([(Card::Finite(1), TreeExpr::chain(2))]).is_connected());
        assert!(!TreeExpr::union([(Card::ALEPH0, TreeExpr::chain(2))]).is_connected());
        assert!(TreeExpr::root(TreeExpr::delta(w)).is_connected());
    }
}
