//! Finite windows into the infinite trees of the grammar, executable witness
//! condensations, and the window checker.

mod check;
mod witness;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cardinal::Card;
use crate::expr::TreeExpr;
use crate::ordinal::Ordinal;

pub use check::{check_condensation_window, verify_witness, WindowReport};
pub use witness::{
    instantiate_witness, ChainKind, CondensationMap, DeltaEmbedding, WitnessDescriptor,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WindowError {
    #[error("outside the materializable fragment: {0}")]
    Unsupported(String),
    #[error("invalid window parameters: {0}")]
    Params(String),
    #[error("witness does not fit the expression: {0}")]
    Mismatch(String),
}

/// Bounds of a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowParams {
    /// Longest sequence materialized, and bound on ordinal coefficients.
    pub depth: u32,
    /// Labels enumerated per node when the branching is infinite.
    pub width: u32,
    /// Copies enumerated per part when the multiplicity is infinite.
    pub comps: u32,
    /// `|n|` bound for the ℤ-indexed components of Δ.
    pub zrange: u32,
}

impl Default for WindowParams {
    fn default() -> Self {
        WindowParams {
            depth: 6,
            width: 4,
            comps: 5,
            zrange: 4,
        }
    }
}

impl WindowParams {
    pub fn validate(&self) -> Result<(), WindowError> {
        if self.depth == 0 || self.width == 0 || self.comps == 0 || self.zrange == 0 {
            return Err(WindowError::Params(
                "all window parameters must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Which component an element lives in: part `shape` of a union, copy `index`.
/// For Δ the index is the ℤ-coordinate `n`; connected trees use `(0, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Comp {
    pub shape: u32,
    pub index: i64,
}

impl Comp {
    pub const ROOT: Comp = Comp { shape: 0, index: 0 };
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPos {
    Below(Ordinal),
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    /// A finite sequence in a k-ary tree.
    Seq(Vec<u64>),
    /// An eventually-zero ω-sequence, trailing zeros stripped.
    Omega(Vec<u64>),
    /// A point of a well order.
    Chain(Ordinal),
    /// A point of a Δ component (the component's `n` is the comp index).
    Delta(DeltaPos),
    /// A point `ξ` of the prefix chain of a sum or rooted lift.
    Prefix(Ordinal),
    /// A point of the tree placed above a prefix.
    Above(Box<Element>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub comp: Comp,
    pub point: Point,
}

impl Element {
    pub fn new(comp: Comp, point: Point) -> Self {
        Element { comp, point }
    }

    pub fn at_root(point: Point) -> Self {
        Element {
            comp: Comp::ROOT,
            point,
        }
    }

    pub fn seq(items: &[u64]) -> Self {
        Element::at_root(Point::Seq(items.to_vec()))
    }
}

fn fmt_items(items: &[u64]) -> String {
    items
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Seq(s) => write!(f, "<{}>", fmt_items(s)),
            Point::Omega(s) if s.is_empty() => f.write_str("<0^w>"),
            Point::Omega(s) => write!(f, "<{},0^w>", fmt_items(s)),
            Point::Chain(x) => write!(f, "{x}"),
            Point::Delta(DeltaPos::Below(x)) => write!(f, "p{x}"),
            Point::Delta(DeltaPos::A) => f.write_str("a"),
            Point::Delta(DeltaPos::B) => f.write_str("b"),
            Point::Prefix(x) => write!(f, "r{x}"),
            Point::Above(e) => write!(f, "^{e}"),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}.{}]{}", self.comp.shape, self.comp.index, self.point)
    }
}

/// Strips trailing zeros from the prefix of an eventually-zero ω-sequence.
pub(crate) fn strip(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Every ordinal `< alpha` whose CNF coefficients are all `< bound`.
fn ordinals_below(alpha: &Ordinal, bound: u64) -> Result<Vec<Ordinal>, WindowError> {
    let lead = alpha.terms().first().map(|t| t.0).unwrap_or(0);
    if lead > 3 {
        return Err(WindowError::Unsupported(format!(
            "ordinal {alpha} has exponent above 3"
        )));
    }
    let slots = lead as usize + 1;
    let mut out = Vec::new();
    let mut digits = vec![0u64; slots];
    loop {
        let terms: Vec<(u32, u64)> = digits
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (lead - i as u32, c))
            .collect();
        let o = Ordinal::from_terms(terms).expect("CNF by construction");
        if &o < alpha {
            out.push(o);
        }
        let mut i = slots;
        loop {
            if i == 0 {
                out.sort();
                return Ok(out);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < bound {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn label_bound(l: Card, w: &WindowParams) -> u64 {
    match l {
        Card::Finite(n) => n.min(w.width as u64),
        Card::Aleph(_) => w.width as u64,
    }
}

fn copy_bound(m: Card, w: &WindowParams) -> u64 {
    match m {
        Card::Finite(n) => n.min(w.comps as u64),
        Card::Aleph(_) => w.comps as u64,
    }
}

fn all_words(labels: u64, max_len: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for wd in &frontier {
            for l in 0..labels {
                let mut v: Vec<u64> = wd.clone();
                v.push(l);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Points of a connected (or Δ) expression, before component tagging.
fn points(e: &TreeExpr, w: &WindowParams) -> Result<Vec<Element>, WindowError> {
    let depth = w.depth as u64;
    match e {
        TreeExpr::Kary { branching, height } => {
            let omega = Ordinal::omega();
            if *height > omega.succ() {
                return Err(WindowError::Unsupported(format!(
                    "kary height {height} above w + 1"
                )));
            }
            let labels = label_bound(*branching, w);
            let max_len = match height.as_finite() {
                Some(n) => (n - 1).min(depth - 1),
                None => depth - 1,
            };
            let mut out: Vec<Element> = all_words(labels, max_len)
                .into_iter()
                .map(|s| Element::at_root(Point::Seq(s)))
                .collect();
            if *height == omega.succ() {
                let mut omegas: Vec<Vec<u64>> =
                    all_words(labels, depth).into_iter().map(strip).collect();
                omegas.sort();
                omegas.dedup();
                out.extend(
                    omegas
                        .into_iter()
                        .map(|s| Element::at_root(Point::Omega(s))),
                );
            }
            Ok(out)
        }
        TreeExpr::Chain(a) => Ok(ordinals_below(a, depth)?
            .into_iter()
            .map(|x| Element::at_root(Point::Chain(x)))
            .collect()),
        TreeExpr::Sum { prefix, sub } => sum_points(prefix, sub, w),
        TreeExpr::Root(sub) => sum_points(&Ordinal::finite(1), sub, w),
        TreeExpr::Union(_) | TreeExpr::Family(_) => enumerate_window(e, w),
        TreeExpr::Delta(a) => {
            let below = ordinals_below(a, depth)?;
            let z = w.zrange as i64;
            let mut out = Vec::new();
            for n in -z..=z {
                let comp = Comp { shape: 0, index: n };
                for x in &below {
                    out.push(Element::new(comp, Point::Delta(DeltaPos::Below(x.clone()))));
                }
                out.push(Element::new(comp, Point::Delta(DeltaPos::A)));
                out.push(Element::new(comp, Point::Delta(DeltaPos::B)));
            }
            Ok(out)
        }
    }
}

fn sum_points(
    prefix: &Ordinal,
    sub: &TreeExpr,
    w: &WindowParams,
) -> Result<Vec<Element>, WindowError> {
    let mut out: Vec<Element> = ordinals_below(prefix, w.depth as u64)?
        .into_iter()
        .map(|x| Element::at_root(Point::Prefix(x)))
        .collect();
    for x in points(sub, w)? {
        out.push(Element::at_root(Point::Above(Box::new(x))));
    }
    Ok(out)
}

/// The family's components as `(shape, chain length)` lists, one entry per materialized copy.
fn family_chains(e: &TreeExpr, w: &WindowParams) -> Option<Vec<(Comp, Ordinal)>> {
    let TreeExpr::Family(f) = e else { return None };
    let mut out = Vec::new();
    for (i, p) in f.parts.iter().enumerate() {
        for c in 0..copy_bound(p.mult, w) {
            out.push((
                Comp {
                    shape: i as u32,
                    index: c as i64,
                },
                p.order.clone(),
            ));
        }
    }
    for (j, t) in f.tails.iter().enumerate() {
        for k in 0..w.comps as u64 {
            out.push((
                Comp {
                    shape: (f.parts.len() + j) as u32,
                    index: k as i64,
                },
                family_member(t, k),
            ));
        }
    }
    Some(out)
}

fn family_member(t: &crate::wellorder::WoTail, k: u64) -> Ordinal {
    t.limit.add_finite(t.start + k * t.step)
}

/// Materializes a finite window of `e`.
pub fn enumerate_window(e: &TreeExpr, w: &WindowParams) -> Result<Vec<Element>, WindowError> {
    w.validate()?;
    match e {
        TreeExpr::Union(parts) => {
            let mut out = Vec::new();
            for (i, p) in parts.iter().enumerate() {
                if !p.sub.is_connected() {
                    return Err(WindowError::Unsupported(
                        "nested disconnected union part".into(),
                    ));
                }
                let inner = points(&p.sub, w)?;
                for c in 0..copy_bound(p.mult, w) {
                    let comp = Comp {
                        shape: i as u32,
                        index: c as i64,
                    };
                    out.extend(inner.iter().map(|x| Element::new(comp, x.point.clone())));
                }
            }
            Ok(out)
        }
        TreeExpr::Family(_) => {
            let mut out = Vec::new();
            for (comp, len) in family_chains(e, w).expect("family") {
                for x in ordinals_below(&len, w.depth as u64)? {
                    out.push(Element::new(comp, Point::Chain(x)));
                }
            }
            Ok(out)
        }
        _ => points(e, w),
    }
}

/// The sub-expression that the points of component `comp` live in.
fn component_expr<'a>(e: &'a TreeExpr, comp: &Comp) -> Option<std::borrow::Cow<'a, TreeExpr>> {
    use std::borrow::Cow;
    match e {
        TreeExpr::Union(parts) => {
            let p = parts.get(comp.shape as usize)?;
            if comp.index < 0 {
                return None;
            }
            if let Card::Finite(m) = p.mult {
                if comp.index as u64 >= m {
                    return None;
                }
            }
            Some(Cow::Borrowed(&p.sub))
        }
        TreeExpr::Family(f) => {
            if comp.index < 0 {
                return None;
            }
            let s = comp.shape as usize;
            if let Some(p) = f.parts.get(s) {
                if let Card::Finite(m) = p.mult {
                    if comp.index as u64 >= m {
                        return None;
                    }
                }
                return Some(Cow::Owned(TreeExpr::Chain(p.order.clone())));
            }
            let t = f.tails.get(s - f.parts.len())?;
            Some(Cow::Owned(TreeExpr::Chain(family_member(
                t,
                comp.index as u64,
            ))))
        }
        TreeExpr::Delta(_) => (comp.shape == 0).then_some(Cow::Borrowed(e)),
        _ => (*comp == Comp::ROOT).then_some(Cow::Borrowed(e)),
    }
}

fn valid_point(e: &TreeExpr, p: &Point) -> bool {
    match (e, p) {
        (TreeExpr::Kary { branching, height }, Point::Seq(s)) => {
            Ordinal::finite(s.len() as u64) < *height
                && s.iter().all(|&l| Card::Finite(l) < *branching)
        }
        (TreeExpr::Kary { branching, height }, Point::Omega(s)) => {
            *height > Ordinal::omega()
                && s.last() != Some(&0)
                && s.iter().all(|&l| Card::Finite(l) < *branching)
        }
        (TreeExpr::Chain(a), Point::Chain(x)) => x < a,
        (TreeExpr::Delta(a), Point::Delta(DeltaPos::Below(x))) => x < a,
        (TreeExpr::Delta(_), Point::Delta(_)) => true,
        (TreeExpr::Sum { prefix, .. }, Point::Prefix(x)) => x < prefix,
        (TreeExpr::Sum { sub, .. }, Point::Above(x)) => is_valid_element(sub, x),
        (TreeExpr::Root(_), Point::Prefix(x)) => x.is_zero(),
        (TreeExpr::Root(sub), Point::Above(x)) => is_valid_element(sub, x),
        (TreeExpr::Union(parts), _) if parts.len() == 1 && parts[0].mult == Card::Finite(1) => {
            valid_point(&parts[0].sub, p)
        }
        _ => false,
    }
}

/// Whether `x` denotes an element of the tree `e`.
pub fn is_valid_element(e: &TreeExpr, x: &Element) -> bool {
    match component_expr(e, &x.comp) {
        Some(sub) => valid_point(&sub, &x.point),
        None => false,
    }
}

fn point_height(e: &TreeExpr, comp: &Comp, p: &Point) -> Ordinal {
    match (e, p) {
        (_, Point::Seq(s)) => Ordinal::finite(s.len() as u64),
        (_, Point::Omega(_)) => Ordinal::omega(),
        (_, Point::Chain(x)) | (_, Point::Prefix(x)) => x.clone(),
        (TreeExpr::Delta(a), Point::Delta(pos)) => match pos {
            DeltaPos::Below(x) => x.clone(),
            DeltaPos::A => a.clone(),
            DeltaPos::B if comp.index > 0 => a.succ(),
            DeltaPos::B => a.clone(),
        },
        (TreeExpr::Sum { prefix, sub }, Point::Above(x)) => prefix.add(&elem_height(sub, x)),
        (TreeExpr::Root(sub), Point::Above(x)) => Ordinal::finite(1).add(&elem_height(sub, x)),
        (TreeExpr::Union(parts), _) if parts.len() == 1 => point_height(&parts[0].sub, comp, p),
        _ => Ordinal::zero(),
    }
}

/// `he(x)` inside the tree `e`.
pub fn elem_height(e: &TreeExpr, x: &Element) -> Ordinal {
    match component_expr(e, &x.comp) {
        Some(sub) => point_height(&sub, &x.comp, &x.point),
        None => Ordinal::zero(),
    }
}

fn omega_at(s: &[u64], i: usize) -> u64 {
    s.get(i).copied().unwrap_or(0)
}

pub(super) fn point_leq(e: &TreeExpr, comp: &Comp, p: &Point, q: &Point) -> bool {
    match (p, q) {
        (Point::Seq(a), Point::Seq(b)) => a.len() <= b.len() && b.starts_with(a),
        (Point::Seq(a), Point::Omega(b)) => a.iter().enumerate().all(|(i, &l)| omega_at(b, i) == l),
        (Point::Omega(a), Point::Omega(b)) => a == b,
        (Point::Omega(_), Point::Seq(_)) => false,
        (Point::Chain(a), Point::Chain(b)) => a <= b,
        (Point::Delta(a), Point::Delta(b)) => match (a, b) {
            (DeltaPos::Below(x), DeltaPos::Below(y)) => x <= y,
            (DeltaPos::Below(_), _) => true,
            (DeltaPos::A, DeltaPos::A) | (DeltaPos::B, DeltaPos::B) => true,
            (DeltaPos::A, DeltaPos::B) => comp.index > 0,
            _ => false,
        },
        (Point::Prefix(a), Point::Prefix(b)) => a <= b,
        (Point::Prefix(_), Point::Above(_)) => true,
        (Point::Above(_), Point::Prefix(_)) => false,
        (Point::Above(a), Point::Above(b)) => match e {
            TreeExpr::Sum { sub, .. } | TreeExpr::Root(sub) => elem_leq(sub, a, b),
            TreeExpr::Union(parts) if parts.len() == 1 => point_leq(&parts[0].sub, comp, p, q),
            _ => false,
        },
        _ => false,
    }
}

/// `x ≤ y` in the tree `e`; elements of different components are incomparable.
pub fn elem_leq(e: &TreeExpr, x: &Element, y: &Element) -> bool {
    if x.comp != y.comp {
        return false;
    }
    match component_expr(e, &x.comp) {
        Some(sub) => point_leq(&sub, &x.comp, &x.point, &y.point),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn w() -> WindowParams {
        WindowParams::default()
    }

    #[test]
    fn window_sizes() {
        let k = parse_expr("kary(2, w)").unwrap();
        let p = WindowParams { depth: 3, ..w() };
        assert_eq!(enumerate_window(&k, &p).unwrap().len(), 7);
        let u = parse_expr("union{ w: chain(2) }").unwrap();
        let p = WindowParams {
            depth: 3,
            comps: 3,
            ..w()
        };
        assert_eq!(enumerate_window(&u, &p).unwrap().len(), 6);
        let d = parse_expr("delta(w)").unwrap();
        let p = WindowParams {
            depth: 2,
            zrange: 1,
            ..w()
        };
        assert_eq!(enumerate_window(&d, &p).unwrap().len(), 12);
    }

    #[test]
    fn heights() {
        let d = parse_expr("delta(w)").unwrap();
        let b1 = Element::new(Comp { shape: 0, index: 1 }, Point::Delta(DeltaPos::B));
        let b0 = Element::new(Comp { shape: 0, index: 0 }, Point::Delta(DeltaPos::B));
        assert_eq!(elem_height(&d, &b1), Ordinal::omega().succ());
        assert_eq!(elem_height(&d, &b0), Ordinal::omega());
        let k = parse_expr("kary(2, w)").unwrap();
        assert_eq!(
            elem_height(&k, &Element::seq(&[0, 1, 0])),
            Ordinal::finite(3)
        );
    }

    #[test]
    fn order() {
        let k = parse_expr("kary(2, w + 1)").unwrap();
        assert!(elem_leq(&k, &Element::seq(&[0]), &Element::seq(&[0, 1])));
        assert!(!elem_leq(&k, &Element::seq(&[0]), &Element::seq(&[1, 0])));
        let om = Element::at_root(Point::Omega(vec![1]));
        assert!(elem_leq(&k, &Element::seq(&[1, 0, 0]), &om));
        assert!(!elem_leq(&k, &Element::seq(&[1, 1]), &om));
        let d = parse_expr("delta(w)").unwrap();
        let a1 = Element::new(Comp { shape: 0, index: 1 }, Point::Delta(DeltaPos::A));
        let b1 = Element::new(Comp { shape: 0, index: 1 }, Point::Delta(DeltaPos::B));
        assert!(elem_leq(&d, &a1, &b1));
        let a0 = Element::new(Comp { shape: 0, index: 0 }, Point::Delta(DeltaPos::A));
        let b0 = Element::new(Comp { shape: 0, index: 0 }, Point::Delta(DeltaPos::B));
        assert!(!elem_leq(&d, &a0, &b0));
    }

    #[test]
    fn windows_are_downward_closed() {
        for text in [
            "kary(3, w + 1)",
            "union{ w: kary(2, w) }",
            "delta(w + 1)",
            "root(delta(w))",
            "union{ w: chain(w*2), 3: sum(w, union{ 2: chain(1) }) }",
        ] {
            let e = parse_expr(text).unwrap();
            let e = crate::expr::normalize(&e);
            let win = enumerate_window(&e, &w()).unwrap();
            for y in &win {
                assert!(is_valid_element(&e, y), "{text}: {y}");
                let he = elem_height(&e, y);
                let below = win.iter().filter(|x| *x != y && elem_leq(&e, x, y)).count();
                if let Some(n) = he.as_finite() {
                    assert_eq!(below as u64, n, "{text}: {y}");
                }
            }
        }
    }

    #[test]
    fn chain_points() {
        let xs = ordinals_below(&Ordinal::monomial(1, 2), 3).unwrap();
        assert_eq!(xs.len(), 6);
        assert_eq!(xs[3], Ordinal::omega());
    }
}
