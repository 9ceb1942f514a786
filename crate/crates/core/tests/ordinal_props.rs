use std::cmp::Ordering;

use proptest::prelude::*;
use revtree::{Card, Ordinal};

/// Dense oracle: `c[i]` is the coefficient of `ω^i`.
#[derive(Clone, Debug, PartialEq)]
struct Dense(Vec<u64>);

impl Dense {
    fn trim(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    fn cmp(&self, other: &Dense) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for i in (0..n).rev() {
            let a = self.0.get(i).copied().unwrap_or(0);
            let b = other.0.get(i).copied().unwrap_or(0);
            if a != b {
                return a.cmp(&b);
            }
        }
        Ordering::Equal
    }

    /// `α + β`: terms of `α` below the leading exponent of `β` are absorbed.
    fn add(&self, other: &Dense) -> Dense {
        let Some(lead) = other.0.iter().rposition(|&c| c != 0) else {
            return self.clone();
        };
        let mut out = vec![0; self.0.len().max(other.0.len())];
        for (i, &c) in self.0.iter().enumerate() {
            if i > lead {
                out[i] = c;
            }
        }
        out[lead] = self.0.get(lead).copied().unwrap_or(0) + other.0[lead];
        out[..lead].copy_from_slice(&other.0[..lead]);
        Dense(out).trim()
    }

    fn to_ordinal(&self) -> Ordinal {
        let terms: Vec<(u32, u64)> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i as u32, c))
            .collect();
        Ordinal::from_terms(terms).unwrap()
    }

    fn from_ordinal(o: &Ordinal) -> Dense {
        let mut v = Vec::new();
        for &(e, c) in o.terms() {
            if v.len() <= e as usize {
                v.resize(e as usize + 1, 0);
            }
            v[e as usize] = c;
        }
        Dense(v).trim()
    }
}

fn dense() -> impl Strategy<Value = Dense> {
    prop::collection::vec(
        prop_oneof![3 => Just(0u64), 2 => 1u64..5, 1 => 5u64..1000],
        0..5,
    )
    .prop_map(|v| Dense(v).trim())
}

proptest! {
    #[test]
    fn round_trip_through_dense(a in dense()) {
        prop_assert_eq!(Dense::from_ordinal(&a.to_ordinal()), a);
    }

    #[test]
    fn comparison_matches_oracle(a in dense(), b in dense()) {
        prop_assert_eq!(a.to_ordinal().cmp(&b.to_ordinal()), a.cmp(&b));
    }

    #[test]
    fn addition_matches_oracle(a in dense(), b in dense()) {
        let sum = a.to_ordinal().add(&b.to_ordinal());
        prop_assert_eq!(Dense::from_ordinal(&sum), a.add(&b));
    }

    #[test]
    fn addition_laws(a in dense(), b in dense(), c in dense()) {
        let (a, b, c) = (a.to_ordinal(), b.to_ordinal(), c.to_ordinal());
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a.clone());
        prop_assert!(a.add(&b) >= a);
        prop_assert!(a.add(&b) >= b);
        // strict monotonicity in the right argument
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
        }
        // weak monotonicity in the left argument
        if a <= b {
            prop_assert!(a.add(&c) <= b.add(&c));
        }
    }

    #[test]
    fn successor_and_decomposition(a in dense()) {
        let a = a.to_ordinal();
        prop_assert!(a < a.succ());
        prop_assert!(a.succ().is_successor());
        let (limit, n) = a.decompose();
        prop_assert!(limit.is_zero() || limit.is_limit());
        prop_assert_eq!(limit.add_finite(n), a.clone());
        prop_assert_eq!(a.is_successor(), n > 0);
        prop_assert_eq!(a.finite_part(), n);
    }

    #[test]
    fn finite_ordinals_are_naturals(x in 0u64..1_000_000, y in 0u64..1_000_000) {
        let s = Ordinal::finite(x).add(&Ordinal::finite(y));
        prop_assert_eq!(s.as_finite(), Some(x + y));
        prop_assert_eq!(Ordinal::finite(x).cmp(&Ordinal::finite(y)), x.cmp(&y));
    }

    #[test]
    fn display_parses_back(a in dense()) {
        let a = a.to_ordinal();
        prop_assert_eq!(revtree::expr::parse_ordinal(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn sup_is_the_maximum(v in prop::collection::vec(dense(), 1..6)) {
        let ords: Vec<Ordinal> = v.iter().map(Dense::to_ordinal).collect();
        let sup = Ordinal::sup(ords.iter()).unwrap();
        prop_assert!(ords.iter().all(|o| *o <= sup));
        prop_assert!(ords.contains(&sup));
    }

    #[test]
    fn finite_cardinals_match_integers(x in 0u64..1 << 30, y in 0u64..1 << 30) {
        prop_assert_eq!(Card::Finite(x).add(Card::Finite(y)), Card::Finite(x + y));
        prop_assert_eq!(Card::Finite(x).mul(Card::Finite(y)), Card::Finite(x * y));
        prop_assert_eq!(Card::Finite(x) < Card::Finite(y), x < y);
    }

    #[test]
    fn infinite_cardinal_absorption(x in 0u64..1000, k in 0u32..4) {
        let a = Card::Aleph(k);
        prop_assert_eq!(a.add(Card::Finite(x)), a);
        prop_assert_eq!(Card::Finite(x).add(a), a);
        let expected = if x == 0 { Card::Finite(0) } else { a };
        prop_assert_eq!(a.mul(Card::Finite(x)), expected);
        prop_assert_eq!(a.mul(Card::Aleph(k + 1)), Card::Aleph(k + 1));
        prop_assert!(Card::Finite(x) < a);
    }
}

#[test]
fn overflow_is_reported_not_wrapped() {
    let big = Ordinal::finite(u64::MAX);
    assert!(big.checked_add(&Ordinal::finite(1)).is_none());
    let w = Ordinal::monomial(1, u64::MAX);
    assert!(w.checked_add(&Ordinal::omega()).is_none());
    assert_eq!(Card::Finite(u64::MAX).checked_add(Card::Finite(1)), None);
}
