use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};

/// A finitely supported integer combination `Σ f_s s` in `ZΓ`. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupRingElement {
    terms: BTreeMap<GroupElement, BigInt>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        GroupRingElement { terms: BTreeMap::new() }
    }

    pub fn monomial(g: GroupElement, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(g, c.into());
        out
    }

    pub fn one(group: &Group) -> Self {
        Self::monomial(group.identity(), 1)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, BigInt)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    fn add_term(&mut self, g: GroupElement, c: BigInt) {
        let slot = self.terms.entry(g.clone()).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, g: &GroupElement) -> BigInt {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.terms.keys()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_term(g.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        GroupRingElement { terms: self.terms.iter().map(|(g, c)| (g.clone(), c * k)).collect() }
    }

    /// `(Σ f_s s)(Σ g_t t) = Σ f_s g_t (st)`.
    pub fn mul(&self, other: &Self, group: &Group) -> Self {
        let mut out = Self::zero();
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                out.add_term(group.mul(s, t), a * b);
            }
        }
        out
    }

    /// `g · f`.
    pub fn left_translate(&self, g: &GroupElement, group: &Group) -> Self {
        GroupRingElement { terms: self.terms.iter().map(|(s, c)| (group.mul(g, s), c.clone())).collect() }
    }

    /// Largest word length in the support; 0 for the zero element.
    pub fn radius(&self, group: &Group) -> usize {
        self.support().map(|g| group.length(g)).max().unwrap_or(0)
    }

    /// Smallest word length in the support; 0 for the zero element.
    pub fn min_length(&self, group: &Group) -> usize {
        self.support().map(|g| group.length(g)).min().unwrap_or(0)
    }

    pub fn format(&self, group: &Group) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (g, c)) in self.terms.iter().enumerate() {
            let word = group.format(g);
            let mag = c.abs();
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                out.push(' ');
            }
            out.push_str(sign);
            if i > 0 {
                out.push(' ');
            }
            if group.is_identity(g) {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&word);
            } else {
                out.push_str(&format!("{mag}{word}"));
            }
        }
        out
    }

    /// Parses `"2a - B + 3e"` style sums; a bare integer means that multiple of `e`.
    pub fn parse(group: &Group, text: &str) -> Result<Self> {
        let bad = || Error::MalformedWord(text.to_string());
        let cleaned = text.replace(' ', "");
        if cleaned.is_empty() || cleaned == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut rest = cleaned.as_str();
        while !rest.is_empty() {
            let (neg, body) = match rest.as_bytes()[0] {
                b'-' => (true, &rest[1..]),
                b'+' => (false, &rest[1..]),
                _ => (false, rest),
            };
            let end = body.find(['+', '-']).unwrap_or(body.len());
            let term = &body[..end];
            rest = &body[end..];
            let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
            let coeff: BigInt = if digits == 0 { BigInt::one() } else { term[..digits].parse().map_err(|_| bad())? };
            let word = &term[digits..];
            if term.is_empty() {
                return Err(bad());
            }
            let g = if word.is_empty() { group.identity() } else { group.normal_form(word)? };
            out.add_term(g, if neg { -coeff } else { coeff });
        }
        Ok(out)
    }
}
