//! The window checker for witness condensations.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::witness::{instantiate_witness, CondensationMap, WitnessDescriptor};
use super::{
    component_expr, elem_height, elem_leq, enumerate_window, is_valid_element, point_leq, Comp,
    Element, Point, WindowError, WindowParams,
};
use crate::expr::TreeExpr;
use crate::ordinal::Ordinal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightRaise {
    pub element: Element,
    pub before: Ordinal,
    pub after: Ordinal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub witness: String,
    pub target: String,
    pub params: WindowParams,
    pub elements: usize,
    /// Every image is an element of the codomain.
    pub well_defined: bool,
    pub injective: bool,
    pub order_preserving: bool,
    /// `he(x) ≤ he(f(x))` throughout the window.
    pub height_monotone: bool,
    pub height_raise: Option<HeightRaise>,
    /// Incomparable `x, y` with `f(x) < f(y)`.
    pub order_reflecting_failure: Option<(Element, Element)>,
    /// Fraction of the declared image region (inside the window) that is hit.
    pub coverage: f64,
    pub region_size: usize,
    pub out_of_window_images: usize,
    pub diagnostics: Vec<String>,
    pub pass: bool,
}

impl WindowReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} on {}: {} ({} elements; injective={}, order_preserving={}, coverage={:.3})",
            self.witness,
            self.target,
            if self.pass { "PASS" } else { "FAIL" },
            self.elements,
            self.injective,
            self.order_preserving,
            self.coverage
        );
        if let Some(r) = &self.height_raise {
            s.push_str(&format!(
                "; height raise at {}: {} -> {}",
                r.element, r.before, r.after
            ));
        }
        s
    }
}

/// `(wraps, word, is_omega)` for points that are sequences under `wraps` lifts.
fn seq_core(p: &Point) -> Option<(usize, &[u64], bool)> {
    match p {
        Point::Seq(s) => Some((0, s, false)),
        Point::Omega(s) => Some((0, s, true)),
        Point::Above(x) => seq_core(&x.point).map(|(k, s, o)| (k + 1, s, o)),
        _ => None,
    }
}

fn wrap(p: Point, comps: &[Comp]) -> Point {
    comps
        .iter()
        .rev()
        .fold(p, |p, c| Point::Above(Box::new(Element::new(*c, p))))
}

fn lift_comps(p: &Point) -> Vec<Comp> {
    let mut out = Vec::new();
    let mut cur = p;
    while let Point::Above(x) = cur {
        out.push(x.comp);
        cur = &x.point;
    }
    out
}

/// All `(i, j)` with `pts[i] < pts[j]` inside one component `sub`.
///
/// Below a sequence point only its prefixes and the non-sequence points
/// can lie, so those are looked up instead of scanning every pair.
fn strict_pairs(sub: &TreeExpr, comp: &Comp, pts: &[(usize, &Point)]) -> Vec<(usize, usize)> {
    let index: HashMap<&Point, usize> = pts.iter().map(|&(i, p)| (p, i)).collect();
    let others: Vec<(usize, &Point)> = pts
        .iter()
        .filter(|(_, p)| seq_core(p).is_none())
        .copied()
        .collect();
    let max_len = pts
        .iter()
        .filter_map(|(_, p)| seq_core(p).map(|(_, s, _)| s.len()))
        .max()
        .unwrap_or(0);
    let mut out = Vec::new();
    for &(j, q) in pts {
        for &(i, p) in &others {
            if i != j && p != q && point_leq(sub, comp, p, q) {
                out.push((i, j));
            }
        }
        let Some((_, word, omega)) = seq_core(q) else {
            continue;
        };
        let comps = lift_comps(q);
        let lens = if omega {
            max_len.max(word.len()) + 1
        } else {
            word.len()
        };
        for l in 0..lens {
            let prefix: Vec<u64> = (0..l).map(|k| word.get(k).copied().unwrap_or(0)).collect();
            let cand = wrap(Point::Seq(prefix), &comps);
            if let Some(&i) = index.get(&cand) {
                if i != j && point_leq(sub, comp, &cand, q) {
                    out.push((i, j));
                }
            }
        }
    }
    out
}

const MAX_DIAGNOSTICS: usize = 8;

fn note(diags: &mut Vec<String>, msg: String) {
    if diags.len() < MAX_DIAGNOSTICS {
        diags.push(msg);
    }
}

/// Runs every check of a witness map on a finite window of its domain.
pub fn check_condensation_window(
    map: &CondensationMap,
    w: &WindowParams,
) -> Result<WindowReport, WindowError> {
    check_map(
        &map.descriptor.to_string(),
        &map.domain,
        &map.codomain,
        |x| map.apply(x),
        |z| map.invert(z),
        |z| map.in_region(z),
        w,
    )
}

fn check_map(
    name: &str,
    dom: &TreeExpr,
    cod: &TreeExpr,
    apply: impl Fn(&Element) -> Option<Element>,
    invert: impl Fn(&Element) -> Option<Element>,
    in_region: impl Fn(&Element) -> bool,
    w: &WindowParams,
) -> Result<WindowReport, WindowError> {
    let window = enumerate_window(dom, w)?;
    let cod_window = if dom == cod {
        window.clone()
    } else {
        enumerate_window(cod, w)?
    };
    let in_window: HashSet<&Element> = cod_window.iter().collect();
    let mut diags = Vec::new();

    let mut images: Vec<Option<Element>> = Vec::with_capacity(window.len());
    let mut well_defined = true;
    let mut out_of_window = 0;
    for x in &window {
        let y = apply(x).filter(|y| is_valid_element(cod, y));
        match &y {
            None => {
                well_defined = false;
                note(&mut diags, format!("no valid image for {x}"));
            }
            Some(y) if !in_window.contains(y) => out_of_window += 1,
            _ => {}
        }
        images.push(y);
    }

    let mut seen = HashSet::new();
    let mut injective = true;
    for (x, y) in window.iter().zip(&images) {
        if let Some(y) = y {
            if !seen.insert(y.clone()) {
                injective = false;
                note(&mut diags, format!("{x} collides at {y}"));
            }
        }
    }

    let mut by_comp: BTreeMap<Comp, Vec<usize>> = BTreeMap::new();
    for (i, x) in window.iter().enumerate() {
        by_comp.entry(x.comp).or_default().push(i);
    }
    let mut order_preserving = true;
    for (comp, idx) in &by_comp {
        let Some(sub) = component_expr(dom, comp) else {
            continue;
        };
        let pts: Vec<(usize, &Point)> = idx.iter().map(|&i| (i, &window[i].point)).collect();
        for (i, j) in strict_pairs(&sub, comp, &pts) {
            let ok = match (&images[i], &images[j]) {
                (Some(a), Some(b)) => elem_leq(cod, a, b),
                _ => true,
            };
            if !ok {
                order_preserving = false;
                note(
                    &mut diags,
                    format!("{} <= {} is not preserved", window[i], window[j]),
                );
            }
        }
    }

    let mut height_monotone = true;
    let mut raise: Option<(Ordinal, usize, Ordinal)> = None;
    for (i, (x, y)) in window.iter().zip(&images).enumerate() {
        let Some(y) = y else { continue };
        let before = elem_height(dom, x);
        let after = elem_height(cod, y);
        if after < before {
            height_monotone = false;
            note(
                &mut diags,
                format!("height drops at {x}: {before} -> {after}"),
            );
        } else if after > before && raise.as_ref().is_none_or(|(b, _, _)| before < *b) {
            raise = Some((before, i, after));
        }
    }
    let height_raise = raise.map(|(before, i, after)| HeightRaise {
        element: window[i].clone(),
        before,
        after,
    });

    let mut by_image: BTreeMap<Comp, Vec<usize>> = BTreeMap::new();
    for (i, y) in images.iter().enumerate() {
        if let Some(y) = y {
            by_image.entry(y.comp).or_default().push(i);
        }
    }
    let mut order_reflecting_failure = None;
    'outer: for (comp, idx) in &by_image {
        let Some(sub) = component_expr(cod, comp) else {
            continue;
        };
        let pts: Vec<(usize, &Point)> = idx
            .iter()
            .filter_map(|&i| images[i].as_ref().map(|y| (i, &y.point)))
            .collect();
        for (i, j) in strict_pairs(&sub, comp, &pts) {
            let (x, y) = (&window[i], &window[j]);
            if !elem_leq(dom, x, y) && !elem_leq(dom, y, x) {
                order_reflecting_failure = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }

    let mut region_size = 0;
    let mut covered = 0;
    for z in cod_window.iter().filter(|z| in_region(z)) {
        region_size += 1;
        let hit = invert(z)
            .filter(|p| is_valid_element(dom, p))
            .is_some_and(|p| apply(&p).as_ref() == Some(z));
        if hit {
            covered += 1;
        } else {
            note(&mut diags, format!("{z} is not covered"));
        }
    }
    let coverage = if region_size == 0 {
        note(
            &mut diags,
            "the declared region meets the window in no element".into(),
        );
        0.0
    } else {
        covered as f64 / region_size as f64
    };

    let pass = well_defined
        && injective
        && order_preserving
        && height_monotone
        && (height_raise.is_some() || order_reflecting_failure.is_some())
        && covered == region_size
        && region_size > 0;
    Ok(WindowReport {
        witness: name.to_string(),
        target: cod.to_string(),
        params: *w,
        elements: window.len(),
        well_defined,
        injective,
        order_preserving,
        height_monotone,
        height_raise,
        order_reflecting_failure,
        coverage,
        region_size,
        out_of_window_images: out_of_window,
        diagnostics: diags,
        pass,
    })
}

/// Instantiates `desc` on `target` and checks it on the window `w`.
pub fn verify_witness(
    desc: &WitnessDescriptor,
    target: &TreeExpr,
    w: &WindowParams,
) -> Result<WindowReport, WindowError> {
    let map = instantiate_witness(desc, target)?;
    check_condensation_window(&map, w)
}
