//! Symbolic cardinals (finite numbers and ℵ_k for finite k) and three-valued answers.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ordinal::Ordinal;

/// A cardinal: a natural number or `ℵ_k` with `k` finite.
///
/// Every `ℵ_k` with finite `k` is regular, so regularity is decidable here.
/// The derived order puts every finite cardinal below every aleph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Card {
    Finite(u64),
    Aleph(u32),
}

impl Card {
    pub const ALEPH0: Card = Card::Aleph(0);

    pub fn is_infinite(self) -> bool {
        matches!(self, Card::Aleph(_))
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    pub fn as_finite(self) -> Option<u64> {
        match self {
            Card::Finite(n) => Some(n),
            Card::Aleph(_) => None,
        }
    }

    /// Infinite cardinals of the fragment are all regular.
    pub fn is_regular_infinite(self) -> bool {
        self.is_infinite()
    }

    /// The initial ordinal of this cardinal, when it lies below ω^ω.
    pub fn initial_ordinal(self) -> Option<Ordinal> {
        match self {
            Card::Finite(n) => Some(Ordinal::finite(n)),
            Card::Aleph(0) => Some(Ordinal::omega()),
            Card::Aleph(_) => None,
        }
    }

    pub fn checked_add(self, rhs: Card) -> Option<Card> {
        match (self, rhs) {
            (Card::Finite(a), Card::Finite(b)) => a.checked_add(b).map(Card::Finite),
            (a, b) => Some(a.max(b)),
        }
    }

    pub fn checked_mul(self, rhs: Card) -> Option<Card> {
        match (self, rhs) {
            (Card::Finite(0), _) | (_, Card::Finite(0)) => Some(Card::Finite(0)),
            (Card::Finite(a), Card::Finite(b)) => a.checked_mul(b).map(Card::Finite),
            (a, b) => Some(a.max(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    /// Cardinal sum; infinite summands absorb. Panics on `u64` overflow.
    pub fn add(self, rhs: Card) -> Card {
        self.checked_add(rhs).expect("finite cardinal overflow")
    }

    #[allow(clippy::should_implement_trait)]
    /// Cardinal product; infinite factors absorb. Panics on `u64` overflow.
    pub fn mul(self, rhs: Card) -> Card {
        self.checked_mul(rhs).expect("finite cardinal overflow")
    }
}

/// Cardinal product of two non-zero cardinals.
pub fn card_product(a: Card, b: Card) -> Card {
    a.mul(b)
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Aleph(0) => f.write_str("w"),
            Card::Aleph(k) => write!(f, "aleph{k}"),
        }
    }
}

impl std::str::FromStr for Card {
    type Err = crate::expr::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_card(s)
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// A size that is either known exactly or not settled by ZFC (or by this fragment).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CardValue {
    Known(Card),
    Undetermined(String),
}

impl CardValue {
    pub fn known(&self) -> Option<Card> {
        match self {
            CardValue::Known(c) => Some(*c),
            CardValue::Undetermined(_) => None,
        }
    }

    pub fn add(&self, rhs: &CardValue) -> CardValue {
        self.combine(rhs, Card::checked_add)
    }

    pub fn mul(&self, rhs: &CardValue) -> CardValue {
        self.combine(rhs, Card::checked_mul)
    }

    fn combine(&self, rhs: &CardValue, op: fn(Card, Card) -> Option<Card>) -> CardValue {
        match (self, rhs) {
            (CardValue::Known(a), CardValue::Known(b)) => match op(*a, *b) {
                Some(c) => CardValue::Known(c),
                None => CardValue::Undetermined("finite size exceeds the 64-bit range".into()),
            },
            (CardValue::Undetermined(r), _) | (_, CardValue::Undetermined(r)) => {
                CardValue::Undetermined(r.clone())
            }
        }
    }
}

impl fmt::Display for CardValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardValue::Known(c) => write!(f, "{c}"),
            CardValue::Undetermined(reason) => write!(f, "undetermined ({reason})"),
        }
    }
}

/// Yes / No / Unknown-with-reason.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriBool {
    Yes,
    No,
    Unknown(String),
}

impl TriBool {
    pub fn is_yes(&self) -> bool {
        matches!(self, TriBool::Yes)
    }

    pub fn is_no(&self) -> bool {
        matches!(self, TriBool::No)
    }
}

impl From<bool> for TriBool {
    fn from(b: bool) -> Self {
        if b {
            TriBool::Yes
        } else {
            TriBool::No
        }
    }
}

impl fmt::Display for TriBool {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriBool::Yes => f.write_str("yes"),
            TriBool::No => f.write_str("no"),
            TriBool::Unknown(r) => write!(f, "unknown ({r})"),
        }
    }
}
