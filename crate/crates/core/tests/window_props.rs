mod common;

use std::collections::{HashMap, HashSet};

use revtree::window::{
    elem_height, elem_leq, enumerate_window, instantiate_witness, is_valid_element, verify_witness,
    Element, Point, WindowError, WindowParams, WitnessDescriptor,
};
use revtree::{classify, Card, Verdict, Witness};

use common::{e, random_exprs};

const BUILT_IN: &[&str] = &[
    "kary(w, w)",
    "kary(w, w + 1)",
    "union{ w: kary(2, w) }",
    "union{ w: kary(3, w + 1) }",
    "union{ w: chain(w) }",
    "delta(w)",
    "delta(2)",
    "root(delta(w))",
    "union{ w: kary(w, 2), 1: kary(w, 3) }",
    "union{ w: chain(2), w: chain(3), 1: chain(w) }",
    "union{ w: chain(3), w: chain(w + 1) }",
    "union{ 2: kary(w, w) }",
    "union{ 1: kary(2, w), w: chain(w) }",
    "sum(2, union{ w: chain(w) })",
];

fn sizes() -> [WindowParams; 3] {
    [
        WindowParams {
            depth: 3,
            width: 2,
            comps: 3,
            zrange: 2,
        },
        WindowParams {
            depth: 4,
            width: 3,
            comps: 4,
            zrange: 3,
        },
        WindowParams::default(),
    ]
}

fn witness_of(text: &str) -> (WitnessDescriptor, revtree::TreeExpr) {
    let c = classify(&e(text));
    assert_eq!(c.verdict, Verdict::NonReversible, "{text}");
    match c.witness {
        Some(Witness::Condensation { descriptor, target }) => (descriptor, target),
        other => panic!("{text}: {other:?}"),
    }
}

#[test]
fn enlarging_the_window_keeps_a_pass() {
    for text in BUILT_IN {
        let (d, t) = witness_of(text);
        for w in sizes() {
            let r = verify_witness(&d, &t, &w).unwrap();
            assert!(r.pass, "{text} at {w:?}: {}", r.summary());
        }
    }
}

#[test]
fn heights_never_drop_under_witnesses() {
    for text in BUILT_IN {
        let (d, t) = witness_of(text);
        let m = instantiate_witness(&d, &t).unwrap();
        let w = WindowParams::default();
        let cod: HashSet<Element> = enumerate_window(&m.codomain, &w)
            .unwrap()
            .into_iter()
            .collect();
        for x in enumerate_window(&m.domain, &w).unwrap() {
            let y = m.apply(&x).unwrap();
            assert!(is_valid_element(&m.codomain, &y), "{text}: {x} -> {y}");
            if cod.contains(&y) {
                assert!(
                    elem_height(&m.domain, &x) <= elem_height(&m.codomain, &y),
                    "{text}: {x} -> {y}"
                );
            }
        }
    }
}

#[test]
fn partition_pairs_tile_the_window() {
    for n in 2..=5u64 {
        for m in 1..n {
            for width in [2u32, 5, 8] {
                let w = WindowParams {
                    depth: n as u32 + 1,
                    width,
                    comps: 2,
                    zrange: 1,
                };
                let d = WitnessDescriptor::Part {
                    m,
                    n,
                    lambda: Card::ALEPH0,
                };
                let map = instantiate_witness(&d, &e(&format!("kary(w, {n})"))).unwrap();
                let mut hits: HashMap<Element, usize> = HashMap::new();
                for x in enumerate_window(&map.domain, &w).unwrap() {
                    *hits.entry(map.apply(&x).unwrap()).or_default() += 1;
                }
                for z in enumerate_window(&map.codomain, &w).unwrap() {
                    assert_eq!(hits.get(&z), Some(&1), "m={m} n={n} width={width}: {z}");
                }
                assert!(
                    hits.values().all(|&c| c == 1),
                    "m={m} n={n}: images overlap"
                );
            }
        }
    }
}

/// All words of length `< len` over `k` labels.
fn words(k: u64, len: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 1..len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u64>| (0..k).map(move |l| [w.clone(), vec![l]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn g0_image_is_the_declared_region() {
    for (k, text, omega) in [
        (3u64, "kary(3, w + 1)", true),
        (2, "kary(2, w)", false),
        (2, "kary(2, w + 1)", true),
    ] {
        let depth = 4usize;
        let w = WindowParams {
            depth: depth as u32,
            width: 4,
            comps: 2,
            zrange: 1,
        };
        let map = instantiate_witness(&WitnessDescriptor::G0 { k }, &e(text)).unwrap();
        let image: HashSet<Element> = enumerate_window(&map.domain, &w)
            .unwrap()
            .iter()
            .map(|x| map.apply(x).unwrap())
            .collect();
        let mut expected = HashSet::new();
        for phi in words(k, depth) {
            if phi.iter().all(|&l| l == 0) {
                expected.insert(Element::at_root(Point::Seq(phi)));
            } else {
                expected.insert(Element::at_root(Point::Seq([vec![0], phi].concat())));
            }
        }
        if omega {
            expected.insert(Element::at_root(Point::Omega(vec![])));
            for phi in words(k, depth + 1) {
                if phi.last().is_some_and(|&l| l != 0) {
                    expected.insert(Element::at_root(Point::Omega([vec![0], phi].concat())));
                }
            }
        }
        assert_eq!(image, expected, "{text}");
    }
}

#[test]
fn random_windows_are_downward_closed() {
    let w = WindowParams {
        depth: 3,
        width: 2,
        comps: 2,
        zrange: 1,
    };
    let mut seen = 0;
    for x in random_exprs(3, 150, 3) {
        let t = revtree::normalize(&x);
        let win = match enumerate_window(&t, &w) {
            Ok(win) => win,
            Err(WindowError::Unsupported(_)) => continue,
            Err(err) => panic!("{t}: {err}"),
        };
        seen += 1;
        let set: HashSet<&Element> = win.iter().collect();
        assert_eq!(set.len(), win.len(), "{t}: duplicates");
        for y in &win {
            assert!(is_valid_element(&t, y), "{t}: {y}");
            if let Some(n) = elem_height(&t, y).as_finite() {
                let below = win.iter().filter(|x| *x != y && elem_leq(&t, x, y)).count();
                assert_eq!(below as u64, n, "{t}: {y}");
            }
        }
    }
    assert!(seen >= 50);
}

#[test]
fn spec_window_examples() {
    let w = WindowParams::default();
    let r = verify_witness(
        &witness_of("delta(w)").0,
        &e("delta(w)"),
        &WindowParams {
            zrange: 4,
            depth: 6,
            ..w
        },
    )
    .unwrap();
    assert!(r.pass);
    let raise = r.height_raise.unwrap();
    assert_eq!(raise.element.to_string(), "[0.0]b");
    assert_eq!(raise.before.to_string(), "w");
    assert_eq!(raise.after.to_string(), "w + 1");

    let (d, t) = witness_of("union{ w: kary(3, w + 1) }");
    let r = verify_witness(
        &d,
        &t,
        &WindowParams {
            comps: 5,
            depth: 5,
            ..w
        },
    )
    .unwrap();
    assert!(r.pass);
    let raise = r.height_raise.unwrap();
    assert_eq!(raise.element.comp.index, 1);
    assert_eq!(
        (raise.before.to_string(), raise.after.to_string()),
        ("0".into(), "1".into())
    );
}
