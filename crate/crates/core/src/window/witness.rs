//! Witness condensation descriptors and their executable maps.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{component_expr, strip, Comp, DeltaPos, Element, Point, WindowError};
use crate::cardinal::Card;
use crate::expr::{normalize, Part, TreeExpr};
use crate::ordinal::Ordinal;

/// Where the components of a Δ sit inside a larger union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEmbedding {
    /// Part holding the copies of `α + antichain(2)` (the `n ≤ 0` components).
    pub antichain_shape: u32,
    /// Part holding the copies of `α + 2` (the `n > 0` components).
    pub chain_shape: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ChainKind {
    /// Inside `^{<α}λ`, `λ ≥ ω`: the cones `[⟨i⟩, ·)` shift down one step,
    /// `[⟨1⟩, ·)` lands on `[⟨0,0⟩, ·)`, and `[⟨0⟩, ·)` absorbs the gap.
    KaryPrefix,
    /// Union of `^{<n}λ` (part `long_shape`) with infinitely many `^{<m}λ`
    /// (part `short_shape`): the level-splitting partition pair on copy 0.
    LevelSplit {
        m: u64,
        n: u64,
        long_shape: u32,
        short_shape: u32,
    },
    /// Infinitely many copies of a limit well order: copies 0 and 1 interleave
    /// into copy 0, the rest shift down.
    Interleave { shape: u32 },
    /// Infinitely many copies of a successor order `α = β + n` next to a
    /// host chain `δ ≥ β + ω`: copy 0 merges into the host, the rest shift down.
    Absorb { copies_shape: u32, host_shape: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum WitnessDescriptor {
    /// The monomorphism `g_0` of `^{<α}k` onto `{0_β} ∪ [⟨0⟩, ·)`.
    #[serde(rename = "W-G0")]
    G0 { k: u64 },
    /// The condensation of `⊔_ω ^{<α}k` built from `g_0` and component shifts.
    #[serde(rename = "W-SHIFT")]
    Shift { k: u64, alpha: Ordinal, shape: u32 },
    /// The ℤ-shift `F_g` of `Δ_α`.
    #[serde(rename = "W-FG")]
    Fg {
        alpha: Ordinal,
        embedding: Option<DeltaEmbedding>,
    },
    #[serde(rename = "W-CHAIN")]
    Chain { chain: ChainKind },
    /// The partition pair `f: ^{<m}λ → ^{<n}λ`, `g: ^{<n}λ → ^{<n}λ`.
    #[serde(rename = "W-PART")]
    Part { m: u64, n: u64, lambda: Card },
    /// Identity on the prefix chain, `inner` above it.
    #[serde(rename = "LIFT")]
    Lift {
        prefix: Ordinal,
        inner: Box<WitnessDescriptor>,
    },
    /// `inner` on one component, identity elsewhere.
    #[serde(rename = "SCOPED")]
    Scoped {
        shape: u32,
        copy: i64,
        inner: Box<WitnessDescriptor>,
    },
    /// `inner` on the sub-union of the listed parts, identity elsewhere.
    #[serde(rename = "RESTRICT")]
    Restrict {
        shapes: Vec<u32>,
        inner: Box<WitnessDescriptor>,
    },
}

impl WitnessDescriptor {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessDescriptor::G0 { .. } => "W-G0",
            WitnessDescriptor::Shift { .. } => "W-SHIFT",
            WitnessDescriptor::Fg { .. } => "W-FG",
            WitnessDescriptor::Chain { .. } => "W-CHAIN",
            WitnessDescriptor::Part { .. } => "W-PART",
            WitnessDescriptor::Lift { inner, .. }
            | WitnessDescriptor::Scoped { inner, .. }
            | WitnessDescriptor::Restrict { inner, .. } => inner.name(),
        }
    }

    pub fn lift(prefix: Ordinal, inner: WitnessDescriptor) -> Self {
        WitnessDescriptor::Lift {
            prefix,
            inner: Box::new(inner),
        }
    }

    pub fn scoped(shape: u32, inner: WitnessDescriptor) -> Self {
        WitnessDescriptor::Scoped {
            shape,
            copy: 0,
            inner: Box::new(inner),
        }
    }
}

impl fmt::Display for WitnessDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessDescriptor::G0 { k } => write!(f, "W-G0({k})"),
            WitnessDescriptor::Shift { k, alpha, shape } => {
                write!(f, "W-SHIFT({k}, {alpha}) on part {shape}")
            }
            WitnessDescriptor::Fg {
                alpha,
                embedding: None,
            } => write!(f, "W-FG({alpha})"),
            WitnessDescriptor::Fg {
                alpha,
                embedding: Some(e),
            } => write!(
                f,
                "W-FG({alpha}) on parts {} and {}",
                e.antichain_shape, e.chain_shape
            ),
            WitnessDescriptor::Chain { chain } => match chain {
                ChainKind::KaryPrefix => f.write_str("W-CHAIN(prefix cones)"),
                ChainKind::LevelSplit {
                    m,
                    n,
                    long_shape,
                    short_shape,
                } => write!(
                    f,
                    "W-CHAIN(level split m={m}, n={n}; parts {short_shape} -> {long_shape})"
                ),
                ChainKind::Interleave { shape } => write!(f, "W-CHAIN(interleave on part {shape})"),
                ChainKind::Absorb {
                    copies_shape,
                    host_shape,
                } => write!(
                    f,
                    "W-CHAIN(absorb part {copies_shape} into part {host_shape})"
                ),
            },
            WitnessDescriptor::Part { m, n, lambda } => write!(f, "W-PART({m}, {n}) over {lambda}"),
            WitnessDescriptor::Lift { prefix, inner } => write!(f, "lift by {prefix} of {inner}"),
            WitnessDescriptor::Scoped { shape, copy, inner } => {
                write!(f, "{inner} on component {shape}.{copy}")
            }
            WitnessDescriptor::Restrict { shapes, inner } => {
                let s: Vec<String> = shapes.iter().map(u32::to_string).collect();
                write!(f, "{inner} on parts {{{}}}", s.join(", "))
            }
        }
    }
}

/// An executable map between the elements of `domain` and of `codomain`.
#[derive(Debug, Clone)]
pub struct CondensationMap {
    pub descriptor: WitnessDescriptor,
    pub domain: TreeExpr,
    pub codomain: TreeExpr,
    inner: Option<Box<CondensationMap>>,
    short_is_point: bool,
}

fn mismatch(msg: impl Into<String>) -> WindowError {
    WindowError::Mismatch(msg.into())
}

fn union_parts(e: &TreeExpr) -> Result<&[Part], WindowError> {
    match e {
        TreeExpr::Union(parts) => Ok(parts),
        _ => Err(mismatch(format!("{e} is not a union"))),
    }
}

fn part_at(e: &TreeExpr, shape: u32) -> Result<&Part, WindowError> {
    union_parts(e)?
        .get(shape as usize)
        .ok_or_else(|| mismatch(format!("{e} has no part {shape}")))
}

fn antichain_over(alpha: &Ordinal) -> TreeExpr {
    normalize(&TreeExpr::sum(
        alpha.clone(),
        TreeExpr::union([(Card::Finite(2), TreeExpr::chain(1))]),
    ))
}

/// Checks that `desc` applies to `target` and builds its map.
pub fn instantiate_witness(
    desc: &WitnessDescriptor,
    target: &TreeExpr,
) -> Result<CondensationMap, WindowError> {
    let plain = |domain: TreeExpr, codomain: TreeExpr| CondensationMap {
        descriptor: desc.clone(),
        domain,
        codomain,
        inner: None,
        short_is_point: false,
    };
    let omega = Ordinal::omega();
    match desc {
        WitnessDescriptor::G0 { k } => match target {
            TreeExpr::Kary {
                branching: Card::Finite(b),
                height,
            } if b == k && *k >= 2 && *height >= omega => Ok(plain(target.clone(), target.clone())),
            _ => Err(mismatch(format!(
                "W-G0({k}) needs kary({k}, α) with α ≥ w, got {target}"
            ))),
        },
        WitnessDescriptor::Shift { k, alpha, shape } => {
            let p = part_at(target, *shape)?;
            let want = TreeExpr::kary(Card::Finite(*k), alpha.clone());
            if p.sub != want || p.mult.is_finite() || *k < 2 {
                return Err(mismatch(format!("W-SHIFT needs infinitely many {want}")));
            }
            Ok(plain(target.clone(), target.clone()))
        }
        WitnessDescriptor::Fg { alpha, embedding } => match embedding {
            None if *target == TreeExpr::Delta(alpha.clone()) => {
                Ok(plain(target.clone(), target.clone()))
            }
            None => Err(mismatch(format!(
                "W-FG({alpha}) needs delta({alpha}), got {target}"
            ))),
            Some(emb) => {
                let a = part_at(target, emb.antichain_shape)?;
                let c = part_at(target, emb.chain_shape)?;
                if a.sub != antichain_over(alpha)
                    || c.sub != TreeExpr::Chain(alpha.add_finite(2))
                    || a.mult.is_finite()
                    || c.mult.is_finite()
                {
                    return Err(mismatch("the union does not contain the components of Δ"));
                }
                Ok(plain(target.clone(), target.clone()))
            }
        },
        WitnessDescriptor::Chain { chain } => match chain {
            ChainKind::KaryPrefix => match target {
                TreeExpr::Kary { branching, height }
                    if branching.is_infinite() && *height >= omega =>
                {
                    Ok(plain(target.clone(), target.clone()))
                }
                _ => Err(mismatch(format!(
                    "prefix cones need kary(λ ≥ ω, α ≥ w), got {target}"
                ))),
            },
            ChainKind::LevelSplit {
                m,
                n,
                long_shape,
                short_shape,
            } => {
                let long = part_at(target, *long_shape)?;
                let short = part_at(target, *short_shape)?;
                let TreeExpr::Kary { branching, height } = &long.sub else {
                    return Err(mismatch("level split needs a k-ary long part"));
                };
                let short_ok = if *m == 1 {
                    short.sub == TreeExpr::chain(1)
                } else {
                    short.sub == TreeExpr::kary(*branching, *m)
                };
                if !branching.is_infinite()
                    || *height != Ordinal::finite(*n)
                    || !(1..*n).contains(m)
                    || !short_ok
                    || short.mult.is_finite()
                {
                    return Err(mismatch("level split parts do not match"));
                }
                let mut map = plain(target.clone(), target.clone());
                map.short_is_point = *m == 1;
                Ok(map)
            }
            ChainKind::Interleave { shape } => {
                let (order, mult) = match target {
                    TreeExpr::Union(_) => {
                        let p = part_at(target, *shape)?;
                        match &p.sub {
                            TreeExpr::Chain(a) => (a.clone(), p.mult),
                            _ => return Err(mismatch("interleave needs a chain part")),
                        }
                    }
                    TreeExpr::Family(f) => {
                        let p = f
                            .parts
                            .get(*shape as usize)
                            .ok_or_else(|| mismatch("no such family part"))?;
                        (p.order.clone(), p.mult)
                    }
                    _ => return Err(mismatch("interleave needs a union")),
                };
                if !order.is_limit() || mult.is_finite() {
                    return Err(mismatch(
                        "interleave needs infinitely many copies of a limit order",
                    ));
                }
                Ok(plain(target.clone(), target.clone()))
            }
            ChainKind::Absorb {
                copies_shape,
                host_shape,
            } => {
                let order = |shape: u32| match component_expr(target, &Comp { shape, index: 0 })
                    .as_deref()
                {
                    Some(TreeExpr::Chain(a))
                        if matches!(target, TreeExpr::Union(_) | TreeExpr::Family(_)) =>
                    {
                        Ok(a.clone())
                    }
                    _ => Err(mismatch(format!("part {shape} is not a chain of {target}"))),
                };
                let alpha = order(*copies_shape)?;
                let delta = order(*host_shape)?;
                let infinite = match target {
                    TreeExpr::Union(parts) => parts[*copies_shape as usize].mult.is_infinite(),
                    TreeExpr::Family(f) => f
                        .parts
                        .get(*copies_shape as usize)
                        .is_some_and(|p| p.mult.is_infinite()),
                    _ => false,
                };
                let beta = alpha.decompose().0;
                if !alpha.is_successor() || !infinite || delta < beta.add(&omega) {
                    return Err(mismatch(
                        "absorb needs infinitely many α = β + n and a host δ ≥ β + w",
                    ));
                }
                Ok(plain(target.clone(), target.clone()))
            }
        },
        WitnessDescriptor::Part { m, n, lambda } => {
            if !(1..*n).contains(m) || lambda.is_finite() {
                return Err(mismatch("W-PART needs 1 ≤ m < n and λ ≥ ω"));
            }
            let codomain = TreeExpr::kary(*lambda, *n);
            let domain = TreeExpr::Union(vec![
                Part::new(Card::Finite(1), TreeExpr::kary(*lambda, *m)),
                Part::new(Card::Finite(1), codomain.clone()),
            ]);
            Ok(plain(domain, codomain))
        }
        WitnessDescriptor::Lift { prefix, inner } => {
            let sub = match target {
                TreeExpr::Sum { prefix: p, sub } if p == prefix => sub,
                TreeExpr::Root(sub) if *prefix == Ordinal::finite(1) => sub,
                _ => {
                    return Err(mismatch(format!(
                        "lift by {prefix} does not match {target}"
                    )))
                }
            };
            let inner = instantiate_witness(inner, sub)?;
            same_shape(inner, desc, target)
        }
        WitnessDescriptor::Scoped { shape, copy, inner } => {
            let comp = Comp {
                shape: *shape,
                index: *copy,
            };
            let sub = component_expr(target, &comp).ok_or_else(|| mismatch("no such component"))?;
            if !matches!(target, TreeExpr::Union(_) | TreeExpr::Family(_)) {
                return Err(mismatch("scoped witnesses need a union"));
            }
            let inner = instantiate_witness(inner, &sub)?;
            same_shape(inner, desc, target)
        }
        WitnessDescriptor::Restrict { shapes, inner } => {
            let parts = union_parts(target)?;
            let mut sub = Vec::new();
            for s in shapes {
                sub.push(part_at(target, *s)?.clone());
            }
            if shapes.windows(2).any(|w| w[0] >= w[1]) || shapes.len() > parts.len() {
                return Err(mismatch("restriction shapes must be increasing"));
            }
            let inner = instantiate_witness(inner, &TreeExpr::Union(sub))?;
            same_shape(inner, desc, target)
        }
    }
}

fn same_shape(
    inner: CondensationMap,
    desc: &WitnessDescriptor,
    target: &TreeExpr,
) -> Result<CondensationMap, WindowError> {
    if inner.domain != inner.codomain {
        return Err(mismatch("only self-maps can be lifted"));
    }
    Ok(CondensationMap {
        descriptor: desc.clone(),
        domain: target.clone(),
        codomain: target.clone(),
        inner: Some(Box::new(inner)),
        short_is_point: false,
    })
}

/// A point of a k-ary tree as a word plus a flag for the ω-length case.
fn word(p: &Point) -> Option<(Vec<u64>, bool)> {
    match p {
        Point::Seq(s) => Some((s.clone(), false)),
        Point::Omega(s) => Some((s.clone(), true)),
        _ => None,
    }
}

fn unword(v: Vec<u64>, omega: bool) -> Point {
    if omega {
        Point::Omega(strip(v))
    } else {
        Point::Seq(v)
    }
}

/// Pads an ω-word so that positions `< len` are explicit.
fn padded(mut v: Vec<u64>, omega: bool, len: usize) -> Vec<u64> {
    if omega && v.len() < len {
        v.resize(len, 0);
    }
    v
}

fn all_zero(v: &[u64]) -> bool {
    v.iter().all(|&x| x == 0)
}

fn g0(p: &Point) -> Option<Point> {
    let (v, om) = word(p)?;
    if all_zero(&v) {
        return Some(p.clone());
    }
    let mut out = vec![0];
    out.extend(v);
    Some(unword(out, om))
}

/// First label and remainder of a nonempty word.
fn split_head(v: Vec<u64>, omega: bool) -> Option<(u64, Vec<u64>)> {
    let v = padded(v, omega, 1);
    let (&h, rest) = v.split_first()?;
    Some((h, rest.to_vec()))
}

fn prepend(labels: &[u64], p: &Point) -> Option<Point> {
    let (v, om) = word(p)?;
    let mut out = labels.to_vec();
    out.extend(v);
    Some(unword(out, om))
}

fn kary_prefix(p: &Point) -> Option<Point> {
    let (v, om) = word(p)?;
    if v.is_empty() && !om {
        return Some(p.clone());
    }
    let (h, rest) = split_head(v, om)?;
    match h {
        0 => {
            let rest = padded(rest, om, 1);
            match rest.split_first() {
                None => Some(Point::Seq(vec![0])),
                Some((&j, tail)) => prepend(&[0, j + 1], &unword(tail.to_vec(), om)),
            }
        }
        1 => prepend(&[0, 0], &unword(rest, om)),
        i => prepend(&[i - 1], &unword(rest, om)),
    }
}

fn kary_prefix_inv(p: &Point) -> Option<Point> {
    let (v, om) = word(p)?;
    if v.is_empty() && !om {
        return Some(p.clone());
    }
    let (h, rest) = split_head(v, om)?;
    if h >= 1 {
        return prepend(&[h + 1], &unword(rest, om));
    }
    let rest = padded(rest, om, 1);
    match rest.split_first() {
        None => Some(Point::Seq(vec![0])),
        Some((0, tail)) => prepend(&[1], &unword(tail.to_vec(), om)),
        Some((&j, tail)) => prepend(&[0, j - 1], &unword(tail.to_vec(), om)),
    }
}

/// Partition maps on finite words.
fn part_f(n: u64, m: u64, v: &[u64]) -> Vec<u64> {
    let mut out = vec![0; (n - m) as usize];
    out.extend_from_slice(v);
    out
}

fn part_g(n: u64, m: u64, v: &[u64]) -> Vec<u64> {
    let z = (n - m - 1) as usize;
    let mut out = v.to_vec();
    if v.len() > z && all_zero(&v[..z]) {
        out[z] += 1;
    }
    out
}

/// `Ok(word)` for an f-preimage, `Err(word)` for a g-preimage.
fn part_inv(n: u64, m: u64, v: &[u64]) -> Result<Vec<u64>, Vec<u64>> {
    let z = (n - m - 1) as usize;
    if v.len() > z && all_zero(&v[..z]) {
        if v[z] == 0 {
            return Ok(v[z + 1..].to_vec());
        }
        let mut out = v.to_vec();
        out[z] -= 1;
        return Err(out);
    }
    Err(v.to_vec())
}

fn delta_chain_point(alpha: &Ordinal, pos: &DeltaPos) -> Point {
    Point::Chain(match pos {
        DeltaPos::Below(x) => x.clone(),
        DeltaPos::A => alpha.clone(),
        DeltaPos::B => alpha.succ(),
    })
}

impl CondensationMap {
    fn absorbed_order(&self, shape: u32) -> Option<Ordinal> {
        match component_expr(&self.domain, &Comp { shape, index: 0 })?.as_ref() {
            TreeExpr::Chain(a) => Some(a.clone()),
            _ => None,
        }
    }

    fn comp_of(&self, x: &Element, shape: u32) -> bool {
        x.comp.shape == shape
    }

    fn to_delta(
        &self,
        alpha: &Ordinal,
        emb: &DeltaEmbedding,
        x: &Element,
    ) -> Option<(i64, DeltaPos)> {
        if self.comp_of(x, emb.antichain_shape) {
            let pos = match &x.point {
                Point::Prefix(p) => DeltaPos::Below(p.clone()),
                Point::Above(inner) => match inner.comp.index {
                    0 => DeltaPos::A,
                    1 => DeltaPos::B,
                    _ => return None,
                },
                _ => return None,
            };
            return Some((-x.comp.index, pos));
        }
        if self.comp_of(x, emb.chain_shape) {
            let Point::Chain(p) = &x.point else {
                return None;
            };
            let pos = if p < alpha {
                DeltaPos::Below(p.clone())
            } else if *p == *alpha {
                DeltaPos::A
            } else {
                DeltaPos::B
            };
            return Some((x.comp.index + 1, pos));
        }
        None
    }

    fn place_delta(
        &self,
        alpha: &Ordinal,
        emb: &DeltaEmbedding,
        n: i64,
        pos: &DeltaPos,
    ) -> Element {
        if n <= 0 {
            let point = match pos {
                DeltaPos::Below(p) => Point::Prefix(p.clone()),
                DeltaPos::A | DeltaPos::B => {
                    let index = if *pos == DeltaPos::A { 0 } else { 1 };
                    Point::Above(Box::new(Element::new(
                        Comp { shape: 0, index },
                        Point::Chain(Ordinal::zero()),
                    )))
                }
            };
            Element::new(
                Comp {
                    shape: emb.antichain_shape,
                    index: -n,
                },
                point,
            )
        } else {
            Element::new(
                Comp {
                    shape: emb.chain_shape,
                    index: n - 1,
                },
                delta_chain_point(alpha, pos),
            )
        }
    }

    /// `f(x)`, or `None` when `x` is outside the map's domain.
    pub fn apply(&self, x: &Element) -> Option<Element> {
        let c = x.comp;
        match &self.descriptor {
            WitnessDescriptor::G0 { .. } => Some(Element::new(c, g0(&x.point)?)),
            WitnessDescriptor::Shift { k, shape, .. } => {
                if c.shape != *shape {
                    return Some(x.clone());
                }
                let k = *k as i64;
                match c.index {
                    0 => Some(Element::new(c, g0(&x.point)?)),
                    i if i < k => Some(Element::new(
                        Comp {
                            shape: *shape,
                            index: 0,
                        },
                        prepend(&[i as u64], &x.point)?,
                    )),
                    i => Some(Element::new(
                        Comp {
                            shape: *shape,
                            index: i - k + 1,
                        },
                        x.point.clone(),
                    )),
                }
            }
            WitnessDescriptor::Fg { alpha, embedding } => match embedding {
                None => Some(Element::new(
                    Comp {
                        shape: c.shape,
                        index: c.index + 1,
                    },
                    x.point.clone(),
                )),
                Some(emb) => match self.to_delta(alpha, emb, x) {
                    Some((n, pos)) => Some(self.place_delta(alpha, emb, n + 1, &pos)),
                    None if c.shape == emb.antichain_shape || c.shape == emb.chain_shape => None,
                    None => Some(x.clone()),
                },
            },
            WitnessDescriptor::Chain { chain } => match chain {
                ChainKind::KaryPrefix => Some(Element::new(c, kary_prefix(&x.point)?)),
                ChainKind::LevelSplit {
                    m,
                    n,
                    long_shape,
                    short_shape,
                } => {
                    if c.shape == *long_shape && c.index == 0 {
                        let (v, _) = word(&x.point)?;
                        return Some(Element::new(c, Point::Seq(part_g(*n, *m, &v))));
                    }
                    if c.shape != *short_shape {
                        return Some(x.clone());
                    }
                    if c.index > 0 {
                        return Some(Element::new(
                            Comp {
                                shape: c.shape,
                                index: c.index - 1,
                            },
                            x.point.clone(),
                        ));
                    }
                    let v = match &x.point {
                        Point::Chain(z) if self.short_is_point && z.is_zero() => Vec::new(),
                        p => word(p)?.0,
                    };
                    Some(Element::new(
                        Comp {
                            shape: *long_shape,
                            index: 0,
                        },
                        Point::Seq(part_f(*n, *m, &v)),
                    ))
                }
                ChainKind::Interleave { shape } => {
                    if c.shape != *shape {
                        return Some(x.clone());
                    }
                    let Point::Chain(p) = &x.point else {
                        return None;
                    };
                    let (lim, j) = p.decompose();
                    match c.index {
                        0 => Some(Element::new(c, Point::Chain(lim.add_finite(2 * j)))),
                        1 => Some(Element::new(
                            Comp {
                                shape: *shape,
                                index: 0,
                            },
                            Point::Chain(lim.add_finite(2 * j + 1)),
                        )),
                        i => Some(Element::new(
                            Comp {
                                shape: *shape,
                                index: i - 1,
                            },
                            x.point.clone(),
                        )),
                    }
                }
                ChainKind::Absorb {
                    copies_shape,
                    host_shape,
                } => {
                    let Point::Chain(p) = &x.point else {
                        return Some(x.clone());
                    };
                    let (beta, n) = self.absorbed_order(*copies_shape)?.decompose();
                    let (lim, j) = p.decompose();
                    if c.shape == *copies_shape {
                        if c.index > 0 {
                            return Some(Element::new(
                                Comp {
                                    shape: c.shape,
                                    index: c.index - 1,
                                },
                                x.point.clone(),
                            ));
                        }
                        return Some(Element::new(
                            Comp {
                                shape: *host_shape,
                                index: 0,
                            },
                            Point::Chain(lim.add_finite(2 * j + 1)),
                        ));
                    }
                    if c.shape != *host_shape || c.index != 0 {
                        return Some(x.clone());
                    }
                    let q = if *p < beta {
                        lim.add_finite(2 * j)
                    } else if lim == beta && j < n {
                        beta.add_finite(2 * j)
                    } else if lim == beta {
                        beta.add_finite(j + n)
                    } else {
                        p.clone()
                    };
                    Some(Element::new(c, Point::Chain(q)))
                }
            },
            WitnessDescriptor::Part { m, n, .. } => {
                let (v, _) = word(&x.point)?;
                let out = if c.shape == 0 {
                    part_f(*n, *m, &v)
                } else {
                    part_g(*n, *m, &v)
                };
                Some(Element::at_root(Point::Seq(out)))
            }
            WitnessDescriptor::Lift { .. } => match &x.point {
                Point::Prefix(_) => Some(x.clone()),
                Point::Above(inner) => {
                    let y = self.inner.as_ref()?.apply(inner)?;
                    Some(Element::new(c, Point::Above(Box::new(y))))
                }
                _ => None,
            },
            WitnessDescriptor::Scoped { shape, copy, .. } => {
                if c.shape != *shape || c.index != *copy {
                    return Some(x.clone());
                }
                let y = self
                    .inner
                    .as_ref()?
                    .apply(&Element::at_root(x.point.clone()))?;
                (y.comp == Comp::ROOT).then(|| Element::new(c, y.point))
            }
            WitnessDescriptor::Restrict { shapes, .. } => {
                let Some(i) = shapes.iter().position(|s| *s == c.shape) else {
                    return Some(x.clone());
                };
                let local = Element::new(
                    Comp {
                        shape: i as u32,
                        index: c.index,
                    },
                    x.point.clone(),
                );
                let y = self.inner.as_ref()?.apply(&local)?;
                let s = *shapes.get(y.comp.shape as usize)?;
                Some(Element::new(
                    Comp {
                        shape: s,
                        index: y.comp.index,
                    },
                    y.point,
                ))
            }
        }
    }

    /// The preimage of `z`, or `None` when `z` is not in the image region.
    pub fn invert(&self, z: &Element) -> Option<Element> {
        let c = z.comp;
        match &self.descriptor {
            WitnessDescriptor::G0 { .. } => {
                let (v, om) = word(&z.point)?;
                if all_zero(&v) {
                    return Some(z.clone());
                }
                let (h, rest) = split_head(v, om)?;
                (h == 0).then(|| Element::new(c, unword(rest, om)))
            }
            WitnessDescriptor::Shift { k, shape, .. } => {
                if c.shape != *shape {
                    return Some(z.clone());
                }
                if c.index > 0 {
                    return Some(Element::new(
                        Comp {
                            shape: *shape,
                            index: c.index + *k as i64 - 1,
                        },
                        z.point.clone(),
                    ));
                }
                let (v, om) = word(&z.point)?;
                if all_zero(&v) {
                    return Some(z.clone());
                }
                let (h, rest) = split_head(v, om)?;
                if h >= *k {
                    return None;
                }
                Some(Element::new(
                    Comp {
                        shape: *shape,
                        index: h as i64,
                    },
                    unword(rest, om),
                ))
            }
            WitnessDescriptor::Fg { alpha, embedding } => match embedding {
                None => Some(Element::new(
                    Comp {
                        shape: c.shape,
                        index: c.index - 1,
                    },
                    z.point.clone(),
                )),
                Some(emb) => match self.to_delta(alpha, emb, z) {
                    Some((n, pos)) => Some(self.place_delta(alpha, emb, n - 1, &pos)),
                    None if c.shape == emb.antichain_shape || c.shape == emb.chain_shape => None,
                    None => Some(z.clone()),
                },
            },
            WitnessDescriptor::Chain { chain } => match chain {
                ChainKind::KaryPrefix => Some(Element::new(c, kary_prefix_inv(&z.point)?)),
                ChainKind::LevelSplit {
                    m,
                    n,
                    long_shape,
                    short_shape,
                } => {
                    if c.shape == *short_shape {
                        return Some(Element::new(
                            Comp {
                                shape: c.shape,
                                index: c.index + 1,
                            },
                            z.point.clone(),
                        ));
                    }
                    if c.shape != *long_shape || c.index != 0 {
                        return Some(z.clone());
                    }
                    let (v, _) = word(&z.point)?;
                    match part_inv(*n, *m, &v) {
                        Ok(w) if self.short_is_point => w.is_empty().then(|| {
                            Element::new(
                                Comp {
                                    shape: *short_shape,
                                    index: 0,
                                },
                                Point::Chain(Ordinal::zero()),
                            )
                        }),
                        Ok(w) => Some(Element::new(
                            Comp {
                                shape: *short_shape,
                                index: 0,
                            },
                            Point::Seq(w),
                        )),
                        Err(w) => Some(Element::new(c, Point::Seq(w))),
                    }
                }
                ChainKind::Interleave { shape } => {
                    if c.shape != *shape {
                        return Some(z.clone());
                    }
                    if c.index > 0 {
                        return Some(Element::new(
                            Comp {
                                shape: *shape,
                                index: c.index + 1,
                            },
                            z.point.clone(),
                        ));
                    }
                    let Point::Chain(p) = &z.point else {
                        return None;
                    };
                    let (lim, j) = p.decompose();
                    Some(Element::new(
                        Comp {
                            shape: *shape,
                            index: (j % 2) as i64,
                        },
                        Point::Chain(lim.add_finite(j / 2)),
                    ))
                }
                ChainKind::Absorb {
                    copies_shape,
                    host_shape,
                } => {
                    if c.shape == *copies_shape {
                        return Some(Element::new(
                            Comp {
                                shape: c.shape,
                                index: c.index + 1,
                            },
                            z.point.clone(),
                        ));
                    }
                    if c.shape != *host_shape || c.index != 0 {
                        return Some(z.clone());
                    }
                    let Point::Chain(p) = &z.point else {
                        return None;
                    };
                    let (beta, n) = self.absorbed_order(*copies_shape)?.decompose();
                    let (lim, j) = p.decompose();
                    let split = |base: &Ordinal, j: u64| {
                        if j.is_multiple_of(2) {
                            Element::new(c, Point::Chain(base.add_finite(j / 2)))
                        } else {
                            Element::new(
                                Comp {
                                    shape: *copies_shape,
                                    index: 0,
                                },
                                Point::Chain(base.add_finite(j / 2)),
                            )
                        }
                    };
                    Some(if *p < beta {
                        split(&lim, j)
                    } else if lim == beta && j < 2 * n {
                        split(&beta, j)
                    } else if lim == beta {
                        Element::new(c, Point::Chain(beta.add_finite(j - n)))
                    } else {
                        z.clone()
                    })
                }
            },
            WitnessDescriptor::Part { m, n, .. } => {
                let (v, _) = word(&z.point)?;
                match part_inv(*n, *m, &v) {
                    Ok(w) => Some(Element::new(Comp { shape: 0, index: 0 }, Point::Seq(w))),
                    Err(w) => Some(Element::new(Comp { shape: 1, index: 0 }, Point::Seq(w))),
                }
            }
            WitnessDescriptor::Lift { .. } => match &z.point {
                Point::Prefix(_) => Some(z.clone()),
                Point::Above(inner) => {
                    let y = self.inner.as_ref()?.invert(inner)?;
                    Some(Element::new(c, Point::Above(Box::new(y))))
                }
                _ => None,
            },
            WitnessDescriptor::Scoped { shape, copy, .. } => {
                if c.shape != *shape || c.index != *copy {
                    return Some(z.clone());
                }
                let y = self
                    .inner
                    .as_ref()?
                    .invert(&Element::at_root(z.point.clone()))?;
                (y.comp == Comp::ROOT).then(|| Element::new(c, y.point))
            }
            WitnessDescriptor::Restrict { shapes, .. } => {
                let Some(i) = shapes.iter().position(|s| *s == c.shape) else {
                    return Some(z.clone());
                };
                let local = Element::new(
                    Comp {
                        shape: i as u32,
                        index: c.index,
                    },
                    z.point.clone(),
                );
                let y = self.inner.as_ref()?.invert(&local)?;
                let s = *shapes.get(y.comp.shape as usize)?;
                Some(Element::new(
                    Comp {
                        shape: s,
                        index: y.comp.index,
                    },
                    y.point,
                ))
            }
        }
    }

    /// Whether `z` lies in the region the witness claims to cover.
    pub fn in_region(&self, z: &Element) -> bool {
        match &self.descriptor {
            WitnessDescriptor::G0 { .. } => self.invert(z).is_some(),
            WitnessDescriptor::Lift { .. } => match &z.point {
                Point::Above(inner) => self.inner.as_ref().is_some_and(|m| m.in_region(inner)),
                _ => true,
            },
            WitnessDescriptor::Scoped { shape, copy, .. } => {
                z.comp.shape != *shape
                    || z.comp.index != *copy
                    || self
                        .inner
                        .as_ref()
                        .is_some_and(|m| m.in_region(&Element::at_root(z.point.clone())))
            }
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn e(text: &str) -> TreeExpr {
        normalize(&parse_expr(text).unwrap())
    }

    #[test]
    fn g0_examples() {
        let m = instantiate_witness(&WitnessDescriptor::G0 { k: 3 }, &e("kary(3, w + 1)")).unwrap();
        assert_eq!(
            m.apply(&Element::seq(&[0, 0])).unwrap(),
            Element::seq(&[0, 0])
        );
        assert_eq!(
            m.apply(&Element::seq(&[2, 0])).unwrap(),
            Element::seq(&[0, 2, 0])
        );
        assert!(m.invert(&Element::seq(&[1])).is_none());
    }

    #[test]
    fn fg_example() {
        let m = instantiate_witness(
            &WitnessDescriptor::Fg {
                alpha: Ordinal::omega(),
                embedding: None,
            },
            &e("delta(w)"),
        )
        .unwrap();
        let b0 = Element::new(Comp { shape: 0, index: 0 }, Point::Delta(DeltaPos::B));
        let b1 = Element::new(Comp { shape: 0, index: 1 }, Point::Delta(DeltaPos::B));
        assert_eq!(m.apply(&b0).unwrap(), b1);
    }

    #[test]
    fn kary_prefix_round_trips() {
        for p in [
            Point::Seq(vec![]),
            Point::Seq(vec![0]),
            Point::Seq(vec![0, 0, 3]),
            Point::Seq(vec![1, 2]),
            Point::Seq(vec![5]),
            Point::Omega(vec![]),
            Point::Omega(vec![1]),
            Point::Omega(vec![0, 2]),
        ] {
            let q = kary_prefix(&p).unwrap();
            assert_eq!(kary_prefix_inv(&q).unwrap(), p, "{p} -> {q}");
        }
        assert_eq!(
            kary_prefix(&Point::Seq(vec![1])).unwrap(),
            Point::Seq(vec![0, 0])
        );
        assert_eq!(
            kary_prefix(&Point::Omega(vec![1])).unwrap(),
            Point::Omega(vec![])
        );
    }

    #[test]
    fn partition_maps_split_the_codomain() {
        for n in 2..6u64 {
            for m in 1..n {
                for v in [vec![], vec![0], vec![0, 0, 0], vec![1, 0], vec![0, 2]] {
                    if v.len() as u64 >= n {
                        continue;
                    }
                    match part_inv(n, m, &v) {
                        Ok(w) => assert_eq!(part_f(n, m, &w), v),
                        Err(w) => assert_eq!(part_g(n, m, &w), v),
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_mismatched_targets() {
        assert!(instantiate_witness(&WitnessDescriptor::G0 { k: 3 }, &e("kary(2, w)")).is_err());
        let d = WitnessDescriptor::Chain {
            chain: ChainKind::Interleave { shape: 0 },
        };
        assert!(instantiate_witness(&d, &e("union{ w: chain(w + 1) }")).is_err());
        assert!(instantiate_witness(&d, &e("union{ w: chain(w) }")).is_ok());
    }
}
