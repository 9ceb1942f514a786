//! Human-readable derivations.

use super::{Certificate, TraceEntry, Verdict};

fn line(t: &TraceEntry, top: &str) -> String {
    let conclusion = t
        .facts
        .get("conclusion")
        .and_then(|v| v.as_str())
        .unwrap_or("");
    let on = if t.subject().is_empty() || t.subject() == top {
        String::new()
    } else {
        format!(" on {}", t.subject())
    };
    format!(
        "{}{on}: {} ⇒ {conclusion} [{}]",
        t.rule,
        t.condition(),
        t.citation
    )
}

/// One line per trace entry, then the witness or the reasons for `unknown`.
pub fn explain(c: &Certificate) -> String {
    let top = c.expr.to_string();
    let mut out = vec![format!("{top}: {}", c.verdict)];
    for (i, t) in c.trace.iter().enumerate() {
        let indent = if i == 0 { "  " } else { "    " };
        out.push(format!("{indent}{}", line(t, &top)));
    }
    match &c.witness {
        Some(w) => {
            out.push(format!("  witness: {w}"));
            out.push(format!("  verify with: revtree witness-verify '{top}'"));
        }
        None if c.verdict == Verdict::NonReversible => {
            out.push("  witness: none (citation only)".into());
        }
        None => {}
    }
    if let Some(v) = &c.witness_verification {
        out.push(format!(
            "  verification: {}",
            if v.passed() { "PASS" } else { "FAIL" }
        ));
    }
    if !c.unknown_reasons.is_empty() {
        out.push("  no rule decided the verdict:".into());
        out.extend(c.unknown_reasons.iter().map(|r| format!("    - {r}")));
    }
    out.join("\n")
}
