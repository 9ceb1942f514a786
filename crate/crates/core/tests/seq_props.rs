use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use revtree::seq::{
    build_merge_plan, frobenius_threshold, gcd_of, is_independent, semigroup_member,
    verify_merge_plan,
};
use revtree::{is_reversible_sequence, Card, SeqDescriptor, TriBool};

/// Whether `n` is a sum of one or more elements of `ks`, by recursion on the
/// largest summand.
fn oracle_member(n: u64, ks: &[u64], memo: &mut BTreeMap<(u64, usize), bool>) -> bool {
    fn go(n: u64, ks: &[u64], top: usize, memo: &mut BTreeMap<(u64, usize), bool>) -> bool {
        if n == 0 {
            return true;
        }
        if let Some(&r) = memo.get(&(n, top)) {
            return r;
        }
        let r = (0..top).any(|i| ks[i] <= n && go(n - ks[i], ks, i + 1, memo));
        memo.insert((n, top), r);
        r
    }
    n > 0 && go(n, ks, ks.len(), memo)
}

fn member(n: u64, k: &BTreeSet<u64>) -> bool {
    let ks: Vec<u64> = k.iter().copied().collect();
    oracle_member(n, &ks, &mut BTreeMap::new())
}

fn oracle_independent(k: &BTreeSet<u64>) -> bool {
    k.iter().all(|&n| {
        let rest: BTreeSet<u64> = k.iter().copied().filter(|&x| x != n).collect();
        !member(n, &rest)
    })
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// The reversibility criterion evaluated by brute force.
fn oracle_reversible(table: &[(u64, Card)], tails: &[(u64, u64, u64)]) -> bool {
    let mut mult: BTreeMap<u64, Card> = BTreeMap::new();
    for &(v, m) in table {
        let e = mult.entry(v).or_insert(Card::Finite(0));
        *e = e.add(m);
    }
    let k: BTreeSet<u64> = mult
        .iter()
        .filter(|(_, m)| m.is_infinite())
        .map(|(&v, _)| v)
        .collect();
    if !oracle_independent(&k) {
        return false;
    }
    if k.is_empty() {
        return true;
    }
    let g = k.iter().fold(0, |acc, &x| gcd(acc, x));
    // a tail a + d·t meets a multiple of g infinitely often iff it does for some t < g
    !tails
        .iter()
        .any(|&(a, d, _)| (0..g).any(|t| (a + d * t) % g == 0))
}

fn k_set() -> impl Strategy<Value = BTreeSet<u64>> {
    prop::collection::btree_set(1u64..=30, 0..=5)
}

fn card() -> impl Strategy<Value = Card> {
    prop_oneof![3 => (1u64..4).prop_map(Card::Finite), 2 => Just(Card::ALEPH0)]
}

type Raw = (Vec<(u64, Card)>, Vec<(u64, u64, u64)>);

fn raw_seq() -> impl Strategy<Value = Raw> {
    (
        prop::collection::vec((1u64..=30, card()), 0..5),
        prop::collection::vec((1u64..=40, 1u64..=6, 1u64..=3), 0..3),
    )
}

fn build((table, tails): &Raw) -> SeqDescriptor {
    tails.iter().fold(
        SeqDescriptor::from_table(table.iter().copied()),
        |s, &(a, d, m)| s.with_tail(a, d, m),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn membership_matches_oracle(n in 0u64..=120, k in k_set()) {
        prop_assert_eq!(semigroup_member(n, &k), member(n, &k));
    }

    #[test]
    fn independence_matches_oracle(k in k_set()) {
        let r = is_independent(&k);
        prop_assert_eq!(r.independent, oracle_independent(&k));
        for v in &r.violations {
            prop_assert!(k.contains(&v.n));
            let parts = v.parts();
            prop_assert!(parts.len() >= 2);
            prop_assert_eq!(parts.iter().sum::<u64>(), v.n);
            prop_assert!(parts.iter().all(|p| k.contains(p) && *p != v.n));
        }
    }

    #[test]
    fn frobenius_threshold_is_tight(k in prop::collection::btree_set(1u64..=20, 1..=4)) {
        let f = frobenius_threshold(&k).unwrap();
        let g = gcd_of(&k).unwrap();
        prop_assert_eq!(f % g, 0);
        let mut x = f.max(g);
        while x < f + 200 {
            prop_assert!(member(x, &k), "{} should be a member", x);
            x += g;
        }
        if f > g {
            prop_assert!(!member(f - g, &k));
        }
    }

    #[test]
    fn verdict_matches_criterion(raw in raw_seq()) {
        let s = build(&raw);
        let v = is_reversible_sequence(&s);
        let expected = oracle_reversible(&raw.0, &raw.1);
        prop_assert_eq!(&v.reversible, &TriBool::from(expected), "{}: {}", s, v.reason);
        prop_assert!(v.reason.starts_with("Fact 1.2"));
    }

    #[test]
    fn plans_exist_exactly_for_nonreversible_sequences(raw in raw_seq()) {
        let s = build(&raw);
        let v = is_reversible_sequence(&s);
        match v.reversible {
            TriBool::No => {
                let plan = build_merge_plan(&s).expect("plan");
                prop_assert!(verify_merge_plan(&plan, &s.normalized()), "{}: {}", s, plan);
                prop_assert!(v.witness.is_some());
            }
            _ => {
                prop_assert!(v.witness.is_none());
                prop_assert!(build_merge_plan(&s).is_none());
            }
        }
    }
}

#[test]
fn finite_index_sets_are_reversible() {
    let s = SeqDescriptor::from_table([(1, Card::Finite(5)), (2, Card::Finite(3))]);
    assert_eq!(is_reversible_sequence(&s).reversible, TriBool::Yes);
}

mod wellorder {
    use super::*;
    use revtree::wellorder::{WoPart, WoTail};
    use revtree::{
        classify, classify_wellorder_union, Ordinal, TreeExpr, Verdict, WellOrderFamily,
    };

    fn limit(i: u64) -> Ordinal {
        if i == 0 {
            Ordinal::zero()
        } else {
            Ordinal::monomial(1, i)
        }
    }

    fn ord(g: u64, n: u64) -> Ordinal {
        limit(g).add_finite(n)
    }

    /// `(γ index, n, mult)` parts and `(γ index, start, step)` tails.
    type RawFam = (Vec<(u64, u64, Card)>, Vec<(u64, u64, u64)>);

    fn raw_family() -> impl Strategy<Value = RawFam> {
        (
            prop::collection::vec((0u64..3, 0u64..6, card()), 1..5),
            prop::collection::vec((0u64..3, 1u64..6, 1u64..4), 0..2),
        )
            .prop_map(|(parts, tails)| {
                let parts = parts
                    .into_iter()
                    .map(|(g, n, m)| (g, if g == 0 { n.max(1) } else { n }, m))
                    .collect();
                (parts, tails)
            })
    }

    fn family((parts, tails): &RawFam) -> WellOrderFamily {
        WellOrderFamily {
            parts: parts
                .iter()
                .map(|&(g, n, mult)| WoPart {
                    order: ord(g, n),
                    mult,
                })
                .collect(),
            tails: tails
                .iter()
                .map(|&(g, start, step)| WoTail {
                    limit: limit(g),
                    start,
                    step,
                })
                .collect(),
        }
    }

    /// The union-of-well-orders criterion, evaluated directly.
    fn oracle((parts, tails): &RawFam) -> bool {
        let infinite: BTreeSet<(u64, u64)> = parts
            .iter()
            .filter(|p| p.2.is_infinite())
            .map(|&(g, n, _)| (g, n))
            .collect();
        if infinite.is_empty() {
            return true;
        }
        let top = parts
            .iter()
            .map(|p| p.0)
            .chain(tails.iter().map(|t| t.0))
            .max()
            .unwrap();
        // every α ≤ γ* = ω·top must occur finitely often
        if infinite
            .iter()
            .any(|&(g, n)| g < top || (g == top && n == 0))
        {
            return false;
        }
        let table: Vec<(u64, Card)> = parts
            .iter()
            .filter(|p| p.0 == top && p.1 > 0)
            .map(|&(_, n, m)| (n, m))
            .collect();
        let seq_tails: Vec<(u64, u64, u64)> = tails
            .iter()
            .filter(|t| t.0 == top)
            .map(|&(_, a, d)| (a, d, 1))
            .collect();
        oracle_reversible(&table, &seq_tails)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn verdict_matches_criterion(raw in raw_family()) {
            let f = family(&raw);
            let v = classify_wellorder_union(&f);
            prop_assert_eq!(&v.reversible, &TriBool::from(oracle(&raw)), "{}: {}", f, v.reason);
        }

        #[test]
        fn classifier_agrees_on_families(raw in raw_family()) {
            let f = family(&raw);
            let expected = Verdict::from_bool(oracle(&raw));
            prop_assert_eq!(classify(&TreeExpr::Family(f.clone())).verdict, expected);
            if let Some(u) = f.to_union() {
                prop_assert_eq!(classify(&u).verdict, expected, "{}", u);
            }
        }
    }

    #[test]
    fn the_five_part_example() {
        let f = revtree::expr::parse_family(
            "wfam{ w: 1, (w + 4): w, (w + 6): w ; tail 1 step 1 ; tail (w + 1) step 2 }",
        )
        .unwrap();
        assert_eq!(classify_wellorder_union(&f).reversible, TriBool::Yes);
    }
}
