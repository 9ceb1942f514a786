//! Ordinals below ω^ω in Cantor normal form.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An ordinal `ω^e1·c1 + ω^e2·c2 + …` with `e1 > e2 > … ≥ 0` and every `ci ≥ 1`.
///
/// Exponents are natural numbers, so the representable range is exactly the
/// ordinals below ω^ω. The empty term list is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(u32, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn finite(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(0, n)],
            }
        }
    }

    pub fn omega() -> Self {
        Ordinal {
            terms: vec![(1, 1)],
        }
    }

    /// `ω^exp · coeff`.
    pub fn monomial(exp: u32, coeff: u64) -> Self {
        if coeff == 0 {
            Self::zero()
        } else {
            Ordinal {
                terms: vec![(exp, coeff)],
            }
        }
    }

    /// Builds an ordinal from CNF terms, rejecting lists that are not in normal form.
    pub fn from_terms(terms: Vec<(u32, u64)>) -> Option<Self> {
        let sorted = terms.windows(2).all(|w| w[0].0 > w[1].0);
        if sorted && terms.iter().all(|&(_, c)| c >= 1) {
            Some(Ordinal { terms })
        } else {
            None
        }
    }

    pub fn terms(&self) -> &[(u32, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|&(e, _)| e == 0)
    }

    pub fn as_finite(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(0, n)] => Some(*n),
            _ => None,
        }
    }

    /// The finite part `n` in `γ + n`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(&(0, n)) => n,
            _ => 0,
        }
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && self.finite_part() == 0
    }

    pub fn is_successor(&self) -> bool {
        self.finite_part() > 0
    }

    /// Splits `a` into `(γ, n)` with `γ` a limit or 0 and `γ + n = a`.
    pub fn decompose(&self) -> (Ordinal, u64) {
        let n = self.finite_part();
        let mut terms = self.terms.clone();
        if n > 0 {
            terms.pop();
        }
        (Ordinal { terms }, n)
    }

    /// Ordinal addition; `None` only when a coefficient overflows `u64`.
    pub fn checked_add(&self, rhs: &Ordinal) -> Option<Ordinal> {
        let Some(&(lead, lead_coeff)) = rhs.terms.first() else {
            return Some(self.clone());
        };
        let mut terms: Vec<(u32, u64)> = self
            .terms
            .iter()
            .copied()
            .take_while(|&(e, _)| e >= lead)
            .collect();
        match terms.last_mut() {
            Some(last) if last.0 == lead => last.1 = last.1.checked_add(lead_coeff)?,
            _ => terms.push((lead, lead_coeff)),
        }
        terms.extend(rhs.terms.iter().skip(1).copied());
        Some(Ordinal { terms })
    }

    /// Ordinal addition. Panics if a coefficient overflows `u64`.
    pub fn add(&self, rhs: &Ordinal) -> Ordinal {
        self.checked_add(rhs).expect("ordinal coefficient overflow")
    }

    pub fn add_finite(&self, n: u64) -> Ordinal {
        self.add(&Ordinal::finite(n))
    }

    pub fn succ(&self) -> Ordinal {
        self.add_finite(1)
    }

    /// Largest element of a finite non-empty list (the supremum for finite lists).
    pub fn sup<'a, I>(items: I) -> Option<Ordinal>
    where
        I: IntoIterator<Item = &'a Ordinal>,
    {
        items.into_iter().max().cloned()
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a.0.cmp(&b.0).then(a.1.cmp(&b.1));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, &(e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match (e, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("w")?,
                (1, c) => write!(f, "w*{c}")?,
                (e, 1) => write!(f, "w^{e}")?,
                (e, c) => write!(f, "w^{e}*{c}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Ordinal {
    type Err = crate::expr::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::expr::parse_ordinal(s)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Ordinal {
        Ordinal::omega()
    }

    #[test]
    fn left_absorption() {
        assert_eq!(Ordinal::finite(3).add(&w()), w());
        assert_eq!(w().add_finite(4).to_string(), "w + 4");
    }

    #[test]
    fn add_merges_leading_coefficient() {
        // (ω·2 + 1) + ω: the trailing 1 is absorbed, then ω·2 + ω = ω·3.
        let a = Ordinal::monomial(1, 2).add_finite(1);
        assert_eq!(a.add(&w()), Ordinal::monomial(1, 3));
    }

    #[test]
    fn comparison() {
        assert_eq!(w().cmp(&w()), Ordering::Equal);
        assert!(Ordinal::finite(5) < w());
        let big = Ordinal::from_terms(vec![(1, 9), (0, 7)]).unwrap();
        assert!(Ordinal::monomial(2, 1) > big);
    }

    #[test]
    fn sup_of_list() {
        let items = [Ordinal::finite(3), w(), w().succ()];
        assert_eq!(Ordinal::sup(&items), Some(w().succ()));
        let items = [Ordinal::monomial(1, 2), w().add_finite(5)];
        assert_eq!(Ordinal::sup(&items), Some(Ordinal::monomial(1, 2)));
        assert_eq!(Ordinal::sup(&[]), None);
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(w().add_finite(4).decompose(), (w(), 4));
        assert_eq!(Ordinal::finite(7).decompose(), (Ordinal::zero(), 7));
        let w2 = Ordinal::monomial(1, 2);
        assert_eq!(w2.decompose(), (w2.clone(), 0));
    }

    #[test]
    fn rejects_non_normal_terms() {
        assert!(Ordinal::from_terms(vec![(0, 1), (1, 1)]).is_none());
        assert!(Ordinal::from_terms(vec![(1, 0)]).is_none());
        assert!(Ordinal::from_terms(vec![(1, 1), (1, 2)]).is_none());
    }

    #[test]
    fn overflow_is_reported() {
        let a = Ordinal::finite(u64::MAX);
        assert!(a.checked_add(&Ordinal::finite(1)).is_none());
    }
}
