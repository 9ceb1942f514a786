//! Rule-based reversibility classification with certificates.

mod explain;
mod rules;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::expr::{normalize, TreeExpr};
use crate::seq::{check_merge_plan, MergePlan, PlanCheck, SeqDescriptor};
use crate::window::{verify_witness, WindowError, WindowParams, WindowReport, WitnessDescriptor};

pub use explain::explain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R-ROOT")]
    Root,
    #[serde(rename = "R-KARY")]
    Kary,
    #[serde(rename = "R-UKARY")]
    UKary,
    #[serde(rename = "R-MIXKARY")]
    MixKary,
    #[serde(rename = "R-CHAINU")]
    ChainU,
    #[serde(rename = "R-WELLU")]
    WellU,
    #[serde(rename = "R-DELTA")]
    Delta,
    #[serde(rename = "R-COMP-FIN")]
    CompFin,
    #[serde(rename = "R-COMP-SUB")]
    CompSub,
    #[serde(rename = "R-F2O")]
    F2o,
    #[serde(rename = "R-FINLEV")]
    FinLev,
    #[serde(rename = "R-FINNODE")]
    FinNode,
    #[serde(rename = "R-FULLFIN")]
    FullFin,
    #[serde(rename = "R-OMEGA")]
    Omega,
    #[serde(rename = "R-BAD")]
    Bad,
}

impl RuleId {
    /// Rules in the order `classify` tries them.
    pub const ALL: [RuleId; 15] = [
        RuleId::Root,
        RuleId::Kary,
        RuleId::UKary,
        RuleId::MixKary,
        RuleId::ChainU,
        RuleId::WellU,
        RuleId::Delta,
        RuleId::CompFin,
        RuleId::CompSub,
        RuleId::F2o,
        RuleId::FinLev,
        RuleId::FinNode,
        RuleId::FullFin,
        RuleId::Omega,
        RuleId::Bad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Root => "R-ROOT",
            RuleId::Kary => "R-KARY",
            RuleId::UKary => "R-UKARY",
            RuleId::MixKary => "R-MIXKARY",
            RuleId::ChainU => "R-CHAINU",
            RuleId::WellU => "R-WELLU",
            RuleId::Delta => "R-DELTA",
            RuleId::CompFin => "R-COMP-FIN",
            RuleId::CompSub => "R-COMP-SUB",
            RuleId::F2o => "R-F2O",
            RuleId::FinLev => "R-FINLEV",
            RuleId::FinNode => "R-FINNODE",
            RuleId::FullFin => "R-FULLFIN",
            RuleId::Omega => "R-OMEGA",
            RuleId::Bad => "R-BAD",
        }
    }

    pub fn citation(self) -> &'static str {
        match self {
            RuleId::Root => "Fact 2.4",
            RuleId::Kary => "Thm 5.6",
            RuleId::UKary => "Thm 6.1",
            RuleId::MixKary => "Thm 6.3",
            RuleId::ChainU => "§6",
            RuleId::WellU => "Fact 1.3",
            RuleId::Delta => "Prop 4.1(b)",
            RuleId::CompFin => "Fact 1.4(b)",
            RuleId::CompSub => "Fact 1.4(a)",
            RuleId::F2o => "Fact 1.5",
            RuleId::FinLev => "Fact 1.1",
            RuleId::FinNode => "Thm 5.1",
            RuleId::FullFin => "Thm 3.2(a)",
            RuleId::Omega => "Thm 3.2(b)",
            RuleId::Bad => "Thm 3.1(a)",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        RuleId::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "reversible")]
    Reversible,
    #[serde(rename = "non-reversible")]
    NonReversible,
    #[serde(rename = "unknown")]
    Unknown,
}

impl Verdict {
    pub fn from_bool(reversible: bool) -> Self {
        if reversible {
            Verdict::Reversible
        } else {
            Verdict::NonReversible
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Reversible => "reversible",
            Verdict::NonReversible => "non-reversible",
            Verdict::Unknown => "unknown",
        }
    }

    /// Two verdicts conflict when one is reversible and the other is not.
    pub fn conflicts_with(self, other: Verdict) -> bool {
        matches!(
            (self, other),
            (Verdict::Reversible, Verdict::NonReversible)
                | (Verdict::NonReversible, Verdict::Reversible)
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub rule: RuleId,
    pub citation: String,
    pub facts: Value,
}

impl TraceEntry {
    fn fact(&self, key: &str) -> Option<&str> {
        self.facts.get(key).and_then(Value::as_str)
    }

    /// The rule's instantiated condition, e.g. `min{ω, 2} = 2 < ω`.
    pub fn condition(&self) -> &str {
        self.fact("condition").unwrap_or("")
    }

    /// The expression this entry is about.
    pub fn subject(&self) -> &str {
        self.fact("subject").unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A condensation that is not an automorphism, checkable on windows.
    Condensation {
        descriptor: WitnessDescriptor,
        target: TreeExpr,
    },
    /// A non-injective merge of a sequence of finite orders over `γ*`.
    MergePlan {
        plan: MergePlan,
        sequence: SeqDescriptor,
    },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Condensation { descriptor, target } => write!(f, "{descriptor} on {target}"),
            Witness::MergePlan { plan, sequence } => {
                write!(f, "merge plan [{plan}] for {sequence}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessVerification {
    Window { report: Box<WindowReport> },
    MergePlan { check: PlanCheck },
}

impl WitnessVerification {
    pub fn passed(&self) -> bool {
        match self {
            WitnessVerification::Window { report } => report.pass,
            WitnessVerification::MergePlan { check } => check.ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub expr: TreeExpr,
    pub verdict: Verdict,
    pub trace: Vec<TraceEntry>,
    pub witness: Option<Witness>,
    pub unknown_reasons: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_verification: Option<WitnessVerification>,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// The rule that decided the verdict.
    pub fn deciding_rule(&self) -> Option<RuleId> {
        self.trace.first().map(|t| t.rule)
    }

    /// Checks the attached witness and records the result in `witness_verification`.
    pub fn verify(&mut self, w: &WindowParams) -> Result<bool, WindowError> {
        let v = match &self.witness {
            None => return Ok(false),
            Some(Witness::Condensation { descriptor, target }) => WitnessVerification::Window {
                report: Box::new(verify_witness(descriptor, target, w)?),
            },
            Some(Witness::MergePlan { plan, sequence }) => WitnessVerification::MergePlan {
                check: check_merge_plan(plan, sequence),
            },
        };
        let ok = v.passed();
        self.witness_verification = Some(v);
        Ok(ok)
    }
}

/// What a single rule concluded about an expression.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleResult {
    pub rule: RuleId,
    pub verdict: Verdict,
    /// Why the rule did not decide, when `verdict` is unknown.
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub expr: TreeExpr,
    /// Every rule that reached a verdict.
    pub verdicts: Vec<(RuleId, Verdict)>,
    pub conflicts: Vec<(RuleId, RuleId)>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.conflicts.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Ctx {
    depth: u32,
    allow_subunions: bool,
}

const MAX_RECURSION: u32 = 16;

impl Ctx {
    fn top() -> Self {
        Ctx {
            depth: 0,
            allow_subunions: true,
        }
    }

    fn deeper(self) -> Self {
        Ctx {
            depth: self.depth + 1,
            ..self
        }
    }

    fn without_subunions(self) -> Self {
        Ctx {
            depth: self.depth + 1,
            allow_subunions: false,
        }
    }
}

/// A rule's conclusion, before it is packaged into a certificate.
#[derive(Debug, Clone)]
pub(crate) struct Decision {
    reversible: bool,
    facts: Map<String, Value>,
    condition: String,
    witness: Option<Witness>,
    premises: Vec<TraceEntry>,
}

pub(crate) enum Outcome {
    NotApplicable(String),
    Undecided(String),
    Decided(Decision),
}

fn entry(rule: RuleId, subject: &TreeExpr, d: &Decision) -> TraceEntry {
    let mut facts = d.facts.clone();
    facts.insert("subject".into(), Value::String(subject.to_string()));
    facts.insert("condition".into(), Value::String(d.condition.clone()));
    facts.insert(
        "conclusion".into(),
        Value::String(Verdict::from_bool(d.reversible).to_string()),
    );
    TraceEntry {
        rule,
        citation: rule.citation().to_string(),
        facts: Value::Object(facts),
    }
}

fn classify_with(e: &TreeExpr, ctx: Ctx) -> Certificate {
    let n = normalize(e);
    let mut reasons = Vec::new();
    if ctx.depth > MAX_RECURSION {
        reasons.push("recursion limit reached".to_string());
    } else {
        for rule in RuleId::ALL {
            if rule == RuleId::CompSub && !ctx.allow_subunions {
                continue;
            }
            match rules::apply(rule, &n, ctx) {
                Outcome::Decided(d) => {
                    let mut trace = vec![entry(rule, &n, &d)];
                    trace.extend(d.premises);
                    return Certificate {
                        expr: n,
                        verdict: Verdict::from_bool(d.reversible),
                        trace,
                        witness: d.witness,
                        unknown_reasons: Vec::new(),
                        witness_verification: None,
                    };
                }
                Outcome::NotApplicable(r) | Outcome::Undecided(r) => {
                    reasons.push(format!("{rule}: {r}"))
                }
            }
        }
    }
    Certificate {
        expr: n,
        verdict: Verdict::Unknown,
        trace: Vec::new(),
        witness: None,
        unknown_reasons: reasons,
        witness_verification: None,
    }
}

/// Classifies `e` with the first rule (in [`RuleId::ALL`] order) that decides it.
pub fn classify(e: &TreeExpr) -> Certificate {
    classify_with(e, Ctx::top())
}

/// Evaluates a single rule on `e`.
pub fn apply_rule(rule: RuleId, e: &TreeExpr) -> RuleResult {
    let n = normalize(e);
    match rules::apply(rule, &n, Ctx::top()) {
        Outcome::Decided(d) => RuleResult {
            rule,
            verdict: Verdict::from_bool(d.reversible),
            reason: None,
        },
        Outcome::NotApplicable(r) | Outcome::Undecided(r) => RuleResult {
            rule,
            verdict: Verdict::Unknown,
            reason: Some(r),
        },
    }
}

/// Runs every rule on `e` and reports pairs of rules that disagree.
pub fn cross_check(e: &TreeExpr) -> ConsistencyReport {
    let verdicts: Vec<(RuleId, Verdict)> = RuleId::ALL
        .into_iter()
        .map(|r| (r, apply_rule(r, e).verdict))
        .filter(|(_, v)| *v != Verdict::Unknown)
        .collect();
    let mut conflicts = Vec::new();
    for (i, (r1, v1)) in verdicts.iter().enumerate() {
        for (r2, v2) in &verdicts[i + 1..] {
            if v1.conflicts_with(*v2) {
                conflicts.push((*r1, *r2));
            }
        }
    }
    ConsistencyReport {
        expr: normalize(e),
        verdicts,
        conflicts,
    }
}
