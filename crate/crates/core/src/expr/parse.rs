//! Recursive-descent parser for expressions, ordinals, cardinals, sequence
//! descriptors and well-order families.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{try_normalize, Part, TreeExpr, MAX_DEPTH};
use crate::cardinal::Card;
use crate::ordinal::Ordinal;
use crate::seq::{SeqDescriptor, SeqTail};
use crate::wellorder::{WellOrderFamily, WoPart, WoTail};

/// A syntax error or a violated invariant, with the character offset where it was found.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {pos}: {message}")]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    depth: usize,
}

impl Cursor {
    fn new(text: &str) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            depth: 0,
        }
    }

    fn err<T>(&self, pos: usize, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.describe_next();
            self.err(self.pos, format!("expected '{c}', found {found}"))
        }
    }

    fn describe_next(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".into(),
        }
    }

    fn peek_ident(&mut self) -> Option<String> {
        self.skip_ws();
        let mut end = self.pos;
        while self.chars.get(end).is_some_and(|c| c.is_ascii_alphabetic()) {
            end += 1;
        }
        (end > self.pos).then(|| self.chars[self.pos..end].iter().collect())
    }

    fn ident(&mut self) -> Option<String> {
        let id = self.peek_ident()?;
        self.pos += id.chars().count();
        Some(id)
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        let start = self.pos;
        match self.ident() {
            Some(id) if id == kw => Ok(()),
            Some(id) => self.err(start, format!("expected '{kw}', found '{id}'")),
            None => {
                let found = self.describe_next();
                self.err(start, format!("expected '{kw}', found {found}"))
            }
        }
    }

    fn peek_digit(&mut self) -> bool {
        self.peek().is_some_and(|c| c.is_ascii_digit())
    }

    fn nat(&mut self) -> PResult<u64> {
        self.skip_ws();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(d) = self.chars.get(self.pos).and_then(|c| c.to_digit(10)) {
            value = match value.checked_mul(10).and_then(|v| v.checked_add(d as u64)) {
                Some(v) => v,
                None => return self.err(start, "number exceeds the 64-bit range"),
            };
            self.pos += 1;
        }
        if self.pos == start {
            let found = self.describe_next();
            return self.err(start, format!("expected a natural number, found {found}"));
        }
        Ok(value)
    }

    fn positive(&mut self, what: &str) -> PResult<u64> {
        let start = self.pos;
        let n = self.nat()?;
        if n == 0 {
            return self.err(start, format!("{what} must be at least 1"));
        }
        Ok(n)
    }

    fn finish(&mut self) -> PResult<()> {
        if self.peek().is_some() {
            let found = self.describe_next();
            return self.err(self.pos, format!("unexpected trailing input {found}"));
        }
        Ok(())
    }

    // ord := term ("+" term)*
    fn ordinal(&mut self) -> PResult<Ordinal> {
        let start = self.pos;
        let mut acc = self.ord_term()?;
        while self.eat('+') {
            let rhs = self.ord_term()?;
            acc = match acc.checked_add(&rhs) {
                Some(a) => a,
                None => return self.err(start, "ordinal coefficient exceeds the 64-bit range"),
            };
        }
        Ok(acc)
    }

    // term := "(" ord ")" | "w" ["^" nat] ["*" nat] | nat
    fn ord_term(&mut self) -> PResult<Ordinal> {
        self.skip_ws();
        let start = self.pos;
        if self.eat('(') {
            let o = self.ordinal()?;
            self.expect(')')?;
            return Ok(o);
        }
        if self.peek_digit() {
            return Ok(Ordinal::finite(self.nat()?));
        }
        match self.ident().as_deref() {
            Some("w") => {
                let mut exp = 1u64;
                if self.eat('^') {
                    let at = self.pos;
                    exp = self.nat()?;
                    if exp > u32::MAX as u64 {
                        return self.err(at, "exponent too large");
                    }
                }
                let mut coeff = 1u64;
                if self.eat('*') {
                    coeff = self.positive("coefficient")?;
                }
                Ok(Ordinal::monomial(exp as u32, coeff))
            }
            Some("aleph") => self.err(
                start,
                "aleph in ordinal position: only ordinals below w^w are supported",
            ),
            Some(id) => self.err(start, format!("expected an ordinal, found '{id}'")),
            None => {
                let found = self.describe_next();
                self.err(start, format!("expected an ordinal, found {found}"))
            }
        }
    }

    // card := nat | "w" | "aleph" nat
    fn card(&mut self) -> PResult<Card> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_digit() {
            return Ok(Card::Finite(self.nat()?));
        }
        match self.ident().as_deref() {
            Some("w") => Ok(Card::ALEPH0),
            Some("aleph") => {
                let at = self.pos;
                let k = self.nat()?;
                u32::try_from(k)
                    .map(Card::Aleph)
                    .or_else(|_| self.err(at, "aleph index too large"))
            }
            Some(id) => self.err(start, format!("expected a cardinal, found '{id}'")),
            None => {
                let found = self.describe_next();
                self.err(start, format!("expected a cardinal, found {found}"))
            }
        }
    }

    fn positive_card(&mut self, what: &str) -> PResult<Card> {
        self.skip_ws();
        let start = self.pos;
        let c = self.card()?;
        if c == Card::Finite(0) {
            return self.err(start, format!("{what} must be at least 1"));
        }
        Ok(c)
    }

    fn positive_ordinal(&mut self, what: &str) -> PResult<Ordinal> {
        self.skip_ws();
        let start = self.pos;
        let o = self.ordinal()?;
        if o.is_zero() {
            return self.err(start, format!("{what} must be at least 1"));
        }
        Ok(o)
    }

    fn expr(&mut self) -> PResult<TreeExpr> {
        self.skip_ws();
        let start = self.pos;
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.err(start, format!("nesting deeper than {MAX_DEPTH}"));
        }
        let e = self.expr_inner(start)?;
        self.depth -= 1;
        Ok(e)
    }

    fn expr_inner(&mut self, start: usize) -> PResult<TreeExpr> {
        let Some(head) = self.ident() else {
            let found = self.describe_next();
            return self.err(start, format!("expected an expression, found {found}"));
        };
        match head.as_str() {
            "chain" => {
                self.expect('(')?;
                let a = self.positive_ordinal("chain length")?;
                self.expect(')')?;
                Ok(TreeExpr::Chain(a))
            }
            "kary" => {
                self.expect('(')?;
                let l = self.positive_card("branching")?;
                self.expect(',')?;
                let a = self.positive_ordinal("height")?;
                self.expect(')')?;
                Ok(TreeExpr::Kary {
                    branching: l,
                    height: a,
                })
            }
            "union" => {
                self.expect('{')?;
                let mut parts = Vec::new();
                loop {
                    let mult = self.positive_card("multiplicity")?;
                    self.expect(':')?;
                    self.skip_ws();
                    let at = self.pos;
                    let sub = self.expr()?;
                    match sub {
                        TreeExpr::Delta(_) => {
                            return self.err(at, "Delta is disconnected; not a valid union part")
                        }
                        TreeExpr::Family(_) => {
                            return self.err(
                                at,
                                "wfam is disconnected; not a valid union part (list its chains instead)",
                            )
                        }
                        _ => {}
                    }
                    parts.push(Part::new(mult, sub));
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect('}')?;
                Ok(TreeExpr::Union(parts))
            }
            "sum" => {
                self.expect('(')?;
                let p = self.positive_ordinal("sum prefix")?;
                self.expect(',')?;
                let sub = self.expr()?;
                self.expect(')')?;
                Ok(TreeExpr::sum(p, sub))
            }
            "root" => {
                self.expect('(')?;
                let sub = self.expr()?;
                self.expect(')')?;
                Ok(TreeExpr::root(sub))
            }
            "delta" => {
                self.expect('(')?;
                let a = self.positive_ordinal("delta length")?;
                self.expect(')')?;
                Ok(TreeExpr::Delta(a))
            }
            "wfam" => Ok(TreeExpr::Family(self.family_body()?)),
            "seq" => self.err(
                start,
                "seq{...} is a sequence descriptor, not a tree expression",
            ),
            other => self.err(start, format!("unknown constructor '{other}'")),
        }
    }

    // wfam{ item (sep item)* }, item := ord ":" card | "tail" ord "step" nat
    fn family_body(&mut self) -> PResult<WellOrderFamily> {
        self.expect('{')?;
        let mut fam = WellOrderFamily::default();
        if self.eat('}') {
            return self.err(self.pos - 1, "wfam needs at least one part or tail");
        }
        loop {
            if self.peek_ident().as_deref() == Some("tail") {
                self.keyword("tail")?;
                self.skip_ws();
                let first_at = self.pos;
                let first = self.ordinal()?;
                let (limit, start) = first.decompose();
                if start == 0 {
                    return self.err(
                        first_at,
                        "tail start must be a successor (γ + a with a ≥ 1)",
                    );
                }
                self.keyword("step")?;
                let step = self.positive("tail step")?;
                fam.tails.push(WoTail { limit, start, step });
            } else {
                let order = self.positive_ordinal("well order length")?;
                self.expect(':')?;
                let mult = self.positive_card("multiplicity")?;
                fam.parts.push(WoPart { order, mult });
            }
            if !(self.eat(',') || self.eat(';')) {
                break;
            }
        }
        self.expect('}')?;
        Ok(fam)
    }

    // seq{ item (sep item)* }, item := nat ":" card | "tail" nat "+" nat "t" ["x" nat]
    fn seq_body(&mut self) -> PResult<SeqDescriptor> {
        self.keyword("seq")?;
        self.expect('{')?;
        let mut table: BTreeMap<u64, Card> = BTreeMap::new();
        let mut tails = Vec::new();
        if self.eat('}') {
            return Ok(SeqDescriptor { table, tails });
        }
        loop {
            if self.peek_ident().as_deref() == Some("tail") {
                self.keyword("tail")?;
                let start = self.positive("tail start")?;
                self.expect('+')?;
                let step = self.positive("tail step")?;
                self.keyword("t")?;
                let mut mult = 1;
                if self.peek_ident().as_deref() == Some("x") {
                    self.keyword("x")?;
                    mult = self.positive("tail multiplicity")?;
                }
                tails.push(SeqTail { start, step, mult });
            } else {
                let v = self.positive("sequence value")?;
                self.expect(':')?;
                let m = self.positive_card("multiplicity")?;
                let e = table.entry(v).or_insert(Card::Finite(0));
                *e = match e.checked_add(m) {
                    Some(c) => c,
                    None => return self.err(self.pos, "multiplicity exceeds the 64-bit range"),
                };
            }
            if !(self.eat(',') || self.eat(';')) {
                break;
            }
        }
        self.expect('}')?;
        Ok(SeqDescriptor { table, tails })
    }
}

/// Parses a tree expression. The result is not normalized.
pub fn parse_expr(text: &str) -> Result<TreeExpr, ParseError> {
    let mut c = Cursor::new(text);
    let e = c.expr()?;
    c.finish()?;
    try_normalize(&e).map_err(|message| ParseError { pos: 0, message })?;
    Ok(e)
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, ParseError> {
    let mut c = Cursor::new(text);
    let o = c.ordinal()?;
    c.finish()?;
    Ok(o)
}

pub fn parse_card(text: &str) -> Result<Card, ParseError> {
    let mut c = Cursor::new(text);
    let k = c.card()?;
    c.finish()?;
    Ok(k)
}

pub fn parse_seq(text: &str) -> Result<SeqDescriptor, ParseError> {
    let mut c = Cursor::new(text);
    let s = c.seq_body()?;
    c.finish()?;
    Ok(s)
}

pub fn parse_family(text: &str) -> Result<WellOrderFamily, ParseError> {
    let mut c = Cursor::new(text);
    c.keyword("wfam")?;
    let f = c.family_body()?;
    c.finish()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(
            parse_expr("kary(2, w)").unwrap(),
            TreeExpr::kary(Card::Finite(2), Ordinal::omega())
        );
        let u = parse_expr("union{ w: chain(1), w: chain(2) }").unwrap();
        assert_eq!(
            u,
            TreeExpr::union([
                (Card::ALEPH0, TreeExpr::chain(1)),
                (Card::ALEPH0, TreeExpr::chain(2))
            ])
        );
    }

    #[test]
    fn ordinals() {
        assert_eq!(
            parse_ordinal("w^2*3 + w + 4").unwrap().to_string(),
            "w^2*3 + w + 4"
        );
        assert_eq!(parse_ordinal("3 + w").unwrap(), Ordinal::omega());
        assert_eq!(
            parse_ordinal("(w*2 + 1) + w").unwrap(),
            Ordinal::monomial(1, 3)
        );
        assert!(parse_ordinal("w*0").is_err());
    }

    #[test]
    fn rejects_delta_part() {
        let e = parse_expr("union{ 2: delta(w) }").unwrap_err();
        assert_eq!(e.message, "Delta is disconnected; not a valid union part");
        assert_eq!(e.pos, 10);
    }

    #[test]
    fn rejects_aleph_height() {
        let e = parse_expr("union{ aleph1: kary(2, aleph1) }").unwrap_err();
        assert!(e.message.contains("ordinal position"), "{e}");
    }

    #[test]
    fn rejects_zeros_and_garbage() {
        for bad in [
            "chain(0)",
            "kary(0, w)",
            "kary(2, 0)",
            "delta(0)",
            "sum(0, chain(1))",
            "union{ 0: chain(1) }",
            "union{ }",
            "chain(w",
            "chain(w))",
            "tree(3)",
            "",
            "chain(99999999999999999999)",
        ] {
            assert!(parse_expr(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn depth_limit() {
        let mut text = "chain(1)".to_string();
        for _ in 0..MAX_DEPTH {
            text = format!("root({text})");
        }
        assert!(parse_expr(&text).unwrap_err().message.contains("nesting"));
    }

    #[test]
    fn overflow_detected() {
        let text = format!("sum({}, chain({}))", u64::MAX, 1);
        assert!(parse_expr(&text).is_err());
    }

    #[test]
    fn seq_literals() {
        let s = parse_seq("seq{ 1: w, 2: w }").unwrap();
        assert_eq!(s.table.len(), 2);
        let s = parse_seq("seq{ 4: w, 6: w ; tail 1 + 2t x1 }").unwrap();
        assert_eq!(
            s.tails,
            vec![SeqTail {
                start: 1,
                step: 2,
                mult: 1
            }]
        );
        let s = parse_seq("seq{ tail 3 + 4t }").unwrap();
        assert_eq!(s.tails[0].mult, 1);
        assert!(parse_seq("seq{ 0: w }").is_err());
    }

    #[test]
    fn family_literals() {
        let f = parse_family("wfam{ (w + 4): w, (w + 6): w ; tail (w + 1) step 2 }").unwrap();
        assert_eq!(f.parts.len(), 2);
        assert_eq!(f.tails[0].limit, Ordinal::omega());
        assert_eq!(f.tails[0].start, 1);
        assert!(parse_family("wfam{ tail w step 2 }").is_err());
        assert!(parse_family("wfam{ }").is_err());
    }
}
