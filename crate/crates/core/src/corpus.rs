//! Verdict corpora: lines of `expr ⟹ verdict`, `#` comments.

use serde::{Deserialize, Serialize};

use crate::classify::{classify, RuleId, Verdict};
use crate::expr::parse_expr;

/// The corpus shipped with the crate.
pub const REFERENCE_CORPUS: &str = include_str!("../corpus/reference.corpus");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusCase {
    pub line: usize,
    pub expr: String,
    pub expected: Verdict,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub case: CorpusCase,
    pub actual: Option<Verdict>,
    pub rule: Option<RuleId>,
    pub error: Option<String>,
}

impl CaseResult {
    pub fn ok(&self) -> bool {
        self.actual == Some(self.case.expected)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub results: Vec<CaseResult>,
    /// Lines that could not be read as `expr ⟹ verdict`.
    pub malformed: Vec<(usize, String)>,
}

impl CorpusReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.ok()).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed() + self.malformed.len()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

fn parse_verdict(s: &str) -> Option<Verdict> {
    match s.trim() {
        "reversible" => Some(Verdict::Reversible),
        "non-reversible" | "nonreversible" => Some(Verdict::NonReversible),
        "unknown" => Some(Verdict::Unknown),
        _ => None,
    }
}

/// Splits a corpus text into cases and malformed lines.
pub fn parse_corpus(text: &str) -> (Vec<CorpusCase>, Vec<(usize, String)>) {
    let mut cases = Vec::new();
    let mut bad = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (body, note) = match trimmed.split_once('#') {
            Some((b, n)) => (b.trim(), n.trim().to_string()),
            None => (trimmed, String::new()),
        };
        let split = body.split_once('⟹').or_else(|| body.split_once("=>"));
        let Some((expr, verdict)) = split else {
            bad.push((line, format!("missing '⟹' in {trimmed:?}")));
            continue;
        };
        match parse_verdict(verdict) {
            Some(expected) => cases.push(CorpusCase {
                line,
                expr: expr.trim().to_string(),
                expected,
                note,
            }),
            None => bad.push((line, format!("unknown verdict {:?}", verdict.trim()))),
        }
    }
    (cases, bad)
}

pub fn run_corpus(text: &str) -> CorpusReport {
    let (cases, malformed) = parse_corpus(text);
    let results = cases
        .into_iter()
        .map(|case| match parse_expr(&case.expr) {
            Ok(e) => {
                let c = classify(&e);
                CaseResult {
                    actual: Some(c.verdict),
                    rule: c.deciding_rule(),
                    error: None,
                    case,
                }
            }
            Err(err) => CaseResult {
                actual: None,
                rule: None,
                error: Some(err.to_string()),
                case,
            },
        })
        .collect();
    CorpusReport { results, malformed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_corpus_passes() {
        let r = run_corpus(REFERENCE_CORPUS);
        if let Some(res) = r.results.iter().find(|r| !r.ok()) {
            panic!(
                "line {}: {} expected {:?}, got {:?}",
                res.case.line, res.case.expr, res.case.expected, res.actual
            );
        }
        assert!(r.malformed.is_empty());
        assert!(r.results.len() >= 14);
    }

    #[test]
    fn mismatches_and_malformed_lines_fail() {
        let r = run_corpus("kary(2, w) ⟹ non-reversible\nkary(2, w) reversible\n");
        assert_eq!(r.passed(), 0);
        assert_eq!(r.failed(), 2);
        assert!(run_corpus("").all_passed());
        assert!(run_corpus("kary(2, w) => reversible").all_passed());
    }
}
