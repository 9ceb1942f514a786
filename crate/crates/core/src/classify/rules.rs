//! The individual rules. Each inspects a normalized expression.

use serde_json::{json, Map, Value};

use super::{classify_with, Certificate, Ctx, Decision, Outcome, RuleId, Verdict, Witness};
use crate::cardinal::{Card, CardValue, TriBool};
use crate::expr::{
    all_branches_full_height, cardinality, components, finite_levels, has_finite_nodes, height,
    level0_card, normalize, ComponentClass, Part, TreeExpr,
};
use crate::ordinal::Ordinal;
use crate::wellorder::{classify_wellorder_union, WellOrderClause, WellOrderFamily};
use crate::window::{ChainKind, DeltaEmbedding, WitnessDescriptor};

/// Unicode rendering of ordinals and cardinals for conditions.
pub(super) fn pretty(x: impl ToString) -> String {
    x.to_string().replace("aleph", "ℵ").replace('w', "ω")
}

fn na(msg: impl Into<String>) -> Outcome {
    Outcome::NotApplicable(msg.into())
}

fn facts(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn decided(reversible: bool, condition: String, f: Value, witness: Option<Witness>) -> Outcome {
    Outcome::Decided(Decision {
        reversible,
        facts: facts(f),
        condition,
        witness,
        premises: Vec::new(),
    })
}

fn with_premises(o: Outcome, premises: Vec<super::TraceEntry>) -> Outcome {
    match o {
        Outcome::Decided(mut d) => {
            d.premises = premises;
            Outcome::Decided(d)
        }
        other => other,
    }
}

fn cond(desc: WitnessDescriptor, target: &TreeExpr) -> Option<Witness> {
    Some(Witness::Condensation {
        descriptor: desc,
        target: target.clone(),
    })
}

fn chain_witness(kind: ChainKind, target: &TreeExpr) -> Option<Witness> {
    cond(WitnessDescriptor::Chain { chain: kind }, target)
}

/// Re-targets a sub-certificate's witness through `wrap`.
fn lift_witness(
    w: Option<Witness>,
    target: &TreeExpr,
    wrap: impl FnOnce(WitnessDescriptor) -> WitnessDescriptor,
) -> Option<Witness> {
    match w {
        Some(Witness::Condensation { descriptor, .. }) => cond(wrap(descriptor), target),
        other => other,
    }
}

pub(super) fn apply(rule: RuleId, e: &TreeExpr, ctx: Ctx) -> Outcome {
    match rule {
        RuleId::Root => root(e, ctx),
        RuleId::Kary => kary(e),
        RuleId::UKary => ukary(e),
        RuleId::MixKary => mixkary(e),
        RuleId::ChainU => chainu(e),
        RuleId::WellU => wellu(e),
        RuleId::Delta => delta(e),
        RuleId::CompFin => comp_fin(e, ctx),
        RuleId::CompSub => comp_sub(e, ctx),
        RuleId::F2o => f2o(e, ctx),
        RuleId::FinLev => finlev(e),
        RuleId::FinNode => finnode(e),
        RuleId::FullFin => fullfin(e),
        RuleId::Omega => omega(e),
        RuleId::Bad => bad(e),
    }
}

fn root(e: &TreeExpr, ctx: Ctx) -> Outcome {
    let (prefix, sub) = match e {
        TreeExpr::Sum { prefix, sub } => (prefix.clone(), sub.as_ref()),
        TreeExpr::Root(sub) => (Ordinal::finite(1), sub.as_ref()),
        _ => return na("not a rooted lift or sum"),
    };
    let c = classify_with(sub, ctx.deeper());
    if c.verdict == Verdict::Unknown {
        return Outcome::Undecided(format!(
            "the tree {sub} above the prefix {prefix} is undecided"
        ));
    }
    let rev = c.verdict == Verdict::Reversible;
    let witness = lift_witness(c.witness, e, |d| WitnessDescriptor::lift(prefix.clone(), d));
    let o = decided(
        rev,
        format!("T = {} + S with S = {} {}", pretty(&prefix), sub, c.verdict),
        json!({ "prefix": prefix, "sub": sub, "sub_verdict": c.verdict }),
        witness,
    );
    with_premises(o, c.trace)
}

fn min_condition(alpha: &Ordinal, lam: &str, lam_card: Card) -> (bool, String) {
    let a = pretty(alpha);
    let m = match (alpha.as_finite(), lam_card.as_finite()) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) => Some(x),
        (None, Some(y)) => Some(y),
        (None, None) => None,
    };
    match m {
        Some(m) => (true, format!("min{{{a}, {lam}}} = {m} < ω")),
        None => (false, format!("min{{{a}, {lam}}} = ω ≥ ω")),
    }
}

fn kary(e: &TreeExpr) -> Outcome {
    let TreeExpr::Kary { branching, height } = e else {
        return na("not a complete k-ary tree");
    };
    let (rev, condition) = min_condition(height, &pretty(branching), *branching);
    let witness = (!rev)
        .then(|| chain_witness(ChainKind::KaryPrefix, e))
        .flatten();
    decided(
        rev,
        condition,
        json!({ "lambda": branching, "alpha": height }),
        witness,
    )
}

fn ukary(e: &TreeExpr) -> Outcome {
    let (mu, l, a, in_union) = match e {
        TreeExpr::Kary { branching, height } => {
            (Card::Finite(1), *branching, height.clone(), false)
        }
        TreeExpr::Union(parts) if parts.len() == 1 => match &parts[0].sub {
            TreeExpr::Kary { branching, height } => {
                (parts[0].mult, *branching, height.clone(), true)
            }
            _ => return na("the single part is not a complete k-ary tree"),
        },
        _ => return na("not a union of copies of one complete k-ary tree"),
    };
    let prod = l.mul(mu);
    let (rev, condition) = min_condition(&a, &format!("{}·{}", pretty(l), pretty(mu)), prod);
    let witness = if rev {
        None
    } else if l.is_infinite() {
        let d = WitnessDescriptor::Chain {
            chain: ChainKind::KaryPrefix,
        };
        cond(
            if in_union {
                WitnessDescriptor::scoped(0, d)
            } else {
                d
            },
            e,
        )
    } else {
        let k = l.as_finite().expect("finite branching");
        cond(
            WitnessDescriptor::Shift {
                k,
                alpha: a.clone(),
                shape: 0,
            },
            e,
        )
    };
    decided(
        rev,
        condition,
        json!({ "lambda": l, "alpha": a, "mu": mu }),
        witness,
    )
}

fn mixkary(e: &TreeExpr) -> Outcome {
    let TreeExpr::Union(parts) = e else {
        return na("not a union");
    };
    let mut lambda: Option<Card> = None;
    let mut heights = Vec::new();
    for p in parts {
        let n = match &p.sub {
            TreeExpr::Kary { branching, height } => {
                let Some(n) = height.as_finite() else {
                    return na(format!("part {} has infinite height", p.sub));
                };
                if branching.is_finite() {
                    return na(format!("part {} has finite branching", p.sub));
                }
                if lambda.is_some_and(|l| l != *branching) {
                    return na("the parts have different branchings");
                }
                lambda = Some(*branching);
                n
            }
            TreeExpr::Chain(a) if *a == Ordinal::finite(1) => 1,
            other => return na(format!("part {other} is not of the form ^{{<n}}λ")),
        };
        heights.push((n, p.mult));
    }
    let Some(lambda) = lambda else {
        return na("no part with infinite branching");
    };
    let inf: Vec<u64> = heights
        .iter()
        .filter(|(_, m)| m.is_infinite())
        .map(|(n, _)| *n)
        .collect();
    let seq: Vec<String> = heights
        .iter()
        .map(|(n, m)| format!("{n}:{}", pretty(m)))
        .collect();
    let f = json!({ "lambda": lambda, "sequence": seq.join(", "), "K": inf });
    if inf.is_empty() {
        return decided(true, "⟨n_i⟩ is finite-to-one".into(), f, None);
    }
    let k = *inf.iter().min().expect("nonempty");
    let long = heights.iter().position(|(n, _)| *n > k);
    match long {
        None => decided(
            true,
            format!("⟨n_i⟩ is almost constant at k = {k} and bounded by k"),
            f,
            None,
        ),
        Some(i0) => {
            let n = heights[i0].0;
            let short = heights
                .iter()
                .position(|(h, _)| *h == k)
                .expect("k is a height");
            let witness = chain_witness(
                ChainKind::LevelSplit {
                    m: k,
                    n,
                    long_shape: i0 as u32,
                    short_shape: short as u32,
                },
                e,
            );
            decided(
                false,
                format!("⟨n_i⟩ is not finite-to-one; k = {k} repeats infinitely often but n = {n} > k occurs"),
                f,
                witness,
            )
        }
    }
}

fn chainu(e: &TreeExpr) -> Outcome {
    let (mu, a) = match e {
        TreeExpr::Chain(a) => (Card::Finite(1), a),
        TreeExpr::Union(parts) if parts.len() == 1 => match &parts[0].sub {
            TreeExpr::Chain(a) => (parts[0].mult, a),
            _ => return na("the single part is not a well order"),
        },
        _ => return na("not a union of copies of one well order"),
    };
    let rev = mu.is_finite() || a.is_successor();
    let condition = if mu.is_finite() {
        format!("μ = {mu} < ω")
    } else if rev {
        format!("α = {} is a successor", pretty(a))
    } else {
        format!("μ = {} ≥ ω and α = {} is a limit", pretty(mu), pretty(a))
    };
    let witness = (!rev)
        .then(|| chain_witness(ChainKind::Interleave { shape: 0 }, e))
        .flatten();
    decided(rev, condition, json!({ "mu": mu, "alpha": a }), witness)
}

/// Index of the component shape holding the chain `order` in a union or family.
fn chain_shape(e: &TreeExpr, order: &Ordinal) -> Option<u32> {
    match e {
        TreeExpr::Union(parts) => parts
            .iter()
            .position(|p| p.sub == TreeExpr::Chain(order.clone())),
        TreeExpr::Family(f) => f.parts.iter().position(|p| &p.order == order),
        _ => None,
    }
    .map(|i| i as u32)
}

/// A component realizing `γ*`: a chain of order `γ* + m`.
fn host_shape(e: &TreeExpr, gamma: &Ordinal) -> Option<u32> {
    match e {
        TreeExpr::Union(parts) => parts.iter().position(|p| match &p.sub {
            TreeExpr::Chain(a) => &a.decompose().0 == gamma,
            _ => false,
        }),
        TreeExpr::Family(f) => f
            .parts
            .iter()
            .position(|p| &p.order.decompose().0 == gamma)
            .or_else(|| {
                f.tails
                    .iter()
                    .position(|t| &t.limit == gamma)
                    .map(|j| f.parts.len() + j)
            }),
        _ => None,
    }
    .map(|i| i as u32)
}

fn wellu(e: &TreeExpr) -> Outcome {
    let Some(f) = WellOrderFamily::from_chain_union(e) else {
        return na("not a union of well orders");
    };
    let v = classify_wellorder_union(&f);
    let rev = match &v.reversible {
        TriBool::Yes => true,
        TriBool::No => false,
        TriBool::Unknown(r) => {
            return Outcome::Undecided(format!("the sequence test is undecided: {r}"))
        }
    };
    let witness = if rev {
        None
    } else {
        match &v.clause {
            WellOrderClause::TopSequence => match (&v.seq_verdict, &v.sequence) {
                (Some(sv), Some(seq)) => sv.witness.clone().map(|plan| Witness::MergePlan {
                    plan,
                    sequence: seq.clone(),
                }),
                _ => None,
            },
            WellOrderClause::InfiniteBelowMax { alpha } => {
                let copies = chain_shape(e, alpha);
                if alpha.is_limit() {
                    copies.and_then(|shape| chain_witness(ChainKind::Interleave { shape }, e))
                } else {
                    match (copies, host_shape(e, &v.gamma_star)) {
                        (Some(copies_shape), Some(host)) => chain_witness(
                            ChainKind::Absorb {
                                copies_shape,
                                host_shape: host,
                            },
                            e,
                        ),
                        _ => None,
                    }
                }
            }
            WellOrderClause::AllFinite => None,
        }
    };
    let condition = v
        .reason
        .split_once(": ")
        .map(|(_, r)| r.to_string())
        .unwrap_or_else(|| v.reason.clone());
    let mut f = json!({ "gamma_star": v.gamma_star, "clause": v.clause });
    if let (Some(seq), Some(sv)) = (&v.sequence, &v.seq_verdict) {
        f["sequence"] = json!(seq);
        f["K"] = json!(sv.k_set);
        f["gcdK"] = json!(sv.gcd_k);
    }
    decided(rev, condition, f, witness)
}

fn antichain_over(alpha: &Ordinal) -> TreeExpr {
    normalize(&TreeExpr::sum(
        alpha.clone(),
        TreeExpr::union([(Card::Finite(2), TreeExpr::chain(1))]),
    ))
}

fn delta(e: &TreeExpr) -> Outcome {
    match e {
        TreeExpr::Delta(a) => decided(
            false,
            format!("T = Δ_α with α = {}", pretty(a)),
            json!({ "alpha": a }),
            cond(
                WitnessDescriptor::Fg {
                    alpha: a.clone(),
                    embedding: None,
                },
                e,
            ),
        ),
        TreeExpr::Union(parts) => {
            for (i, p) in parts.iter().enumerate() {
                let TreeExpr::Chain(b) = &p.sub else { continue };
                let (g, n) = b.decompose();
                if p.mult.is_finite() || n < 2 {
                    continue;
                }
                let a = g.add_finite(n - 2);
                if a.is_zero() {
                    continue;
                }
                let anti = antichain_over(&a);
                if let Some(j) = parts
                    .iter()
                    .position(|q| q.sub == anti && q.mult.is_infinite())
                {
                    return decided(
                        false,
                        format!(
                            "the components of Δ_α, α = {}, occur as a sub-union",
                            pretty(&a)
                        ),
                        json!({ "alpha": a }),
                        cond(
                            WitnessDescriptor::Fg {
                                alpha: a.clone(),
                                embedding: Some(DeltaEmbedding {
                                    antichain_shape: j as u32,
                                    chain_shape: i as u32,
                                }),
                            },
                            e,
                        ),
                    );
                }
            }
            na("no archetypical sub-union Δ_α among the components")
        }
        _ => na("not Δ_α or a union containing it"),
    }
}

/// Part index of a component shape inside `e`.
fn shape_index(e: &TreeExpr, shape: &TreeExpr) -> Option<u32> {
    match (e, shape) {
        (TreeExpr::Union(parts), _) => parts.iter().position(|p| &p.sub == shape).map(|i| i as u32),
        (TreeExpr::Family(_), TreeExpr::Chain(a)) => chain_shape(e, a),
        _ => None,
    }
}

fn comp_fin(e: &TreeExpr, ctx: Ctx) -> Outcome {
    if e.is_connected() {
        return na("connected");
    }
    let mut shapes = Vec::new();
    let mut total = 0u64;
    for c in components(e) {
        match c {
            ComponentClass::Copies {
                mult: Card::Finite(m),
                shape,
            } => {
                total = total.saturating_add(m);
                shapes.push(shape);
            }
            _ => return na(format!("|L_0| = {} is infinite", pretty(level0_card(e)))),
        }
    }
    let mut premises = Vec::new();
    let mut pending = None;
    for shape in &shapes {
        let c: Certificate = classify_with(shape, ctx.deeper());
        match c.verdict {
            Verdict::Reversible => premises.extend(c.trace),
            Verdict::NonReversible => {
                let Some(i) = shape_index(e, shape) else {
                    return Outcome::Undecided(format!("component {shape} cannot be located"));
                };
                let witness = lift_witness(c.witness, e, |d| WitnessDescriptor::scoped(i, d));
                let o = decided(
                    false,
                    format!("component {shape} is non-reversible"),
                    json!({ "components": total, "component": shape }),
                    witness,
                );
                return with_premises(o, c.trace);
            }
            Verdict::Unknown => pending = Some(shape.clone()),
        }
    }
    if let Some(shape) = pending {
        return Outcome::Undecided(format!("component {shape} is undecided"));
    }
    let o = decided(
        true,
        format!("{total} components, each reversible"),
        json!({ "components": total }),
        None,
    );
    with_premises(o, premises)
}

const MAX_SUBSET_PARTS: usize = 10;

fn comp_sub(e: &TreeExpr, ctx: Ctx) -> Outcome {
    let TreeExpr::Union(parts) = e else {
        return na("not a union");
    };
    for (i, p) in parts.iter().enumerate() {
        let c = classify_with(&p.sub, ctx.without_subunions());
        if c.verdict == Verdict::NonReversible {
            let witness = lift_witness(c.witness, e, |d| WitnessDescriptor::scoped(i as u32, d));
            let o = decided(
                false,
                format!("the component {} is non-reversible", p.sub),
                json!({ "sub_union": p.sub }),
                witness,
            );
            return with_premises(o, c.trace);
        }
    }
    let n = parts.len();
    if (2..=MAX_SUBSET_PARTS).contains(&n) {
        let mut masks: Vec<u32> = (1..(1u32 << n) - 1).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        for mask in masks {
            let shapes: Vec<u32> = (0..n as u32).filter(|i| mask & (1 << i) != 0).collect();
            let sub = TreeExpr::Union(
                shapes
                    .iter()
                    .map(|&i| parts[i as usize].clone())
                    .collect::<Vec<Part>>(),
            );
            let c = classify_with(&sub, ctx.without_subunions());
            if c.verdict == Verdict::NonReversible {
                let witness = lift_witness(c.witness, e, |d| WitnessDescriptor::Restrict {
                    shapes: shapes.clone(),
                    inner: Box::new(d),
                });
                let o = decided(
                    false,
                    format!("the sub-union {sub} is non-reversible"),
                    json!({ "sub_union": sub }),
                    witness,
                );
                return with_premises(o, c.trace);
            }
        }
    }
    na("no component or proper sub-union is known to be non-reversible")
}

fn f2o(e: &TreeExpr, ctx: Ctx) -> Outcome {
    if e.is_connected() {
        return na("connected");
    }
    let comps = components(e);
    let mut premises = Vec::new();
    for c in &comps {
        let ComponentClass::Copies { mult, shape } = c else {
            continue;
        };
        if mult.is_infinite() {
            return na(format!(
                "{} copies of {shape}: ⟨|T_i|, he(T_i)⟩ is not finite-to-one",
                pretty(mult)
            ));
        }
        let cert = classify_with(shape, ctx.deeper());
        match cert.verdict {
            Verdict::Reversible => premises.extend(cert.trace),
            Verdict::NonReversible => return na(format!("component {shape} is not reversible")),
            Verdict::Unknown => {
                return Outcome::Undecided(format!("component {shape} is undecided"))
            }
        }
    }
    let runs = comps
        .iter()
        .filter(|c| matches!(c, ComponentClass::ChainRun { .. }))
        .count();
    let o = decided(
        true,
        "every component is reversible and ⟨|T_i|, he(T_i)⟩ is finite-to-one".into(),
        json!({ "component_classes": comps.len(), "chain_runs": runs }),
        None,
    );
    with_premises(o, premises)
}

fn finlev(e: &TreeExpr) -> Outcome {
    match finite_levels(e) {
        TriBool::Yes => decided(true, "every level L_α is finite".into(), json!({}), None),
        TriBool::No => na("some level is infinite"),
        TriBool::Unknown(r) => Outcome::Undecided(r),
    }
}

/// Branchings of the k-ary pieces that reach level ω, or `None` when the
/// node sizes are not computable from the grammar.
fn high_branchings(e: &TreeExpr, offset: &Ordinal, out: &mut Vec<Card>) -> Option<()> {
    match e {
        TreeExpr::Chain(_) | TreeExpr::Family(_) => Some(()),
        TreeExpr::Kary { branching, height } => {
            if offset.add(height) > Ordinal::omega() {
                out.push(*branching);
            }
            Some(())
        }
        TreeExpr::Union(parts) => parts
            .iter()
            .try_for_each(|p| high_branchings(&p.sub, offset, out)),
        TreeExpr::Sum { prefix, sub } => high_branchings(sub, &offset.add(prefix), out),
        TreeExpr::Root(sub) => high_branchings(sub, &offset.add_finite(1), out),
        TreeExpr::Delta(_) => None,
    }
}

fn finnode(e: &TreeExpr) -> Outcome {
    match has_finite_nodes(e) {
        TriBool::Yes => {}
        TriBool::No => return na("some node is infinite"),
        TriBool::Unknown(r) => return Outcome::Undecided(r),
    }
    let h = height(e);
    if h <= Ordinal::omega().succ() {
        return decided(
            true,
            format!("all nodes finite and he(T) = {} ≤ ω + 1", pretty(&h)),
            json!({ "height": h }),
            None,
        );
    }
    let mut bs = Vec::new();
    if high_branchings(e, &Ordinal::zero(), &mut bs).is_none() {
        return na("node sizes above level ω are not computable");
    }
    bs.sort();
    bs.dedup();
    if bs.len() <= 1 {
        let size = bs
            .first()
            .map(|b| b.to_string())
            .unwrap_or_else(|| "1".into());
        return decided(
            true,
            format!("all nodes finite and on each level α ≥ ω the node sizes are almost constant ({size})"),
            json!({ "height": h, "node_size": size }),
            None,
        );
    }
    na(format!(
        "he(T) = {} > ω + 1 and the branchings {:?} above level ω differ",
        pretty(&h),
        bs.iter().map(|b| b.to_string()).collect::<Vec<_>>()
    ))
}

fn branch_failure(e: &TreeExpr) -> Option<Outcome> {
    match all_branches_full_height(e) {
        TriBool::Yes => None,
        TriBool::No => Some(na("not all branches have height he(T)")),
        TriBool::Unknown(r) => Some(Outcome::Undecided(r)),
    }
}

fn fullfin(e: &TreeExpr) -> Outcome {
    if let Some(o) = branch_failure(e) {
        return o;
    }
    let h = height(e);
    if !h.is_finite() {
        return na(format!("he(T) = {} is infinite", pretty(&h)));
    }
    decided(
        true,
        format!("all branches have height he(T) = {h} < ω"),
        json!({ "height": h }),
        None,
    )
}

fn omega(e: &TreeExpr) -> Outcome {
    if let Some(o) = branch_failure(e) {
        return o;
    }
    let h = height(e);
    if h != Ordinal::omega() {
        return na(format!("he(T) = {} ≠ ω", pretty(&h)));
    }
    match cardinality(e) {
        CardValue::Known(c) if c == Card::ALEPH0 => {}
        CardValue::Known(c) => return na(format!("|T| = {} ≠ ω", pretty(c))),
        CardValue::Undetermined(r) => {
            return Outcome::Undecided(format!("cardinality Undetermined: {r}"))
        }
    }
    match has_finite_nodes(e) {
        TriBool::Yes => decided(
            true,
            "he(T) = |T| = ω, all branches full, all nodes finite".into(),
            json!({ "height": h }),
            None,
        ),
        TriBool::No => decided(
            false,
            "he(T) = |T| = ω, all branches full, some node infinite".into(),
            json!({ "height": h }),
            None,
        ),
        TriBool::Unknown(r) => Outcome::Undecided(r),
    }
}

fn bad(e: &TreeExpr) -> Outcome {
    if let Some(o) = branch_failure(e) {
        return o;
    }
    let size = match cardinality(e) {
        CardValue::Known(c) => c,
        CardValue::Undetermined(r) => {
            return Outcome::Undecided(format!("cardinality Undetermined blocks R-BAD: {r}"))
        }
    };
    let Some(kappa) = size.initial_ordinal() else {
        return na(format!("|T| = {} is finite", size));
    };
    if !size.is_regular_infinite() {
        return na(format!("|T| = {} is not a regular cardinal", pretty(size)));
    }
    let h = height(e);
    if h != kappa {
        return na(format!("he(T) = {} ≠ |T| = {}", pretty(&h), pretty(size)));
    }
    match level0_card(e) {
        CardValue::Known(l) if l == size => {}
        CardValue::Known(l) => {
            return na(format!("|L_0| = {} ≠ |T| = {}", pretty(l), pretty(size)))
        }
        CardValue::Undetermined(r) => return Outcome::Undecided(r),
    }
    decided(
        false,
        format!(
            "he(T) = |T| = |L_0| = {} is regular and all branches are full",
            pretty(size)
        ),
        json!({ "kappa": size }),
        None,
    )
}
