use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;

use super::{ElementIndex, Group, GroupElement};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A nonempty, duplicate-free, ordered finite subset of a group.
#[derive(Clone, Debug)]
pub struct FiniteWindow {
    group: Group,
    elems: Vec<GroupElement>,
    index: ElementIndex,
}

impl PartialEq for FiniteWindow {
    /// Order-sensitive equality; use [`FiniteWindow::set_eq`] for sets.
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.elems == other.elems
    }
}

impl FiniteWindow {
    /// Builds a window, keeping the first occurrence of repeated elements.
    pub fn new(group: Group, elems: Vec<GroupElement>) -> Result<FiniteWindow> {
        if elems.is_empty() {
            return Err(Error::EmptyWindow);
        }
        if let Some(bad) = elems.iter().find(|g| !group.contains(g)) {
            return Err(Error::InvalidWindow(format!("{bad} is not a normal form of this group")));
        }
        let mut seen = HashSet::new();
        let elems: Vec<GroupElement> = elems.into_iter().filter(|g| seen.insert(g.clone())).collect();
        Ok(Self::from_distinct(group, elems))
    }

    pub(crate) fn from_distinct(group: Group, elems: Vec<GroupElement>) -> FiniteWindow {
        let index: HashMap<GroupElement, usize> = elems.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        debug_assert_eq!(index.len(), elems.len());
        FiniteWindow { group, elems, index }
    }

    pub fn singleton(group: Group, g: GroupElement) -> FiniteWindow {
        Self::from_distinct(group, vec![g])
    }

    pub fn identity(group: &Group) -> FiniteWindow {
        Self::singleton(group.clone(), group.identity())
    }

    /// Parses a comma-separated list of words, e.g. `"e,a,ab"`.
    pub fn from_words(group: &Group, words: &str) -> Result<FiniteWindow> {
        let elems = words
            .split(',')
            .map(|w| group.normal_form(w))
            .collect::<Result<Vec<_>>>()?;
        FiniteWindow::new(group.clone(), elems)
    }

    /// The interval `{lo, ..., hi}` of `Z`.
    pub fn interval(group: &Group, lo: i64, hi: i64) -> Result<FiniteWindow> {
        if !group.is_integers() {
            return Err(Error::InvalidWindow("intervals are defined on Z only".into()));
        }
        if hi < lo {
            return Err(Error::EmptyWindow);
        }
        let elems = (lo..=hi).map(|k| GroupElement::Lattice(vec![k])).collect();
        Ok(Self::from_distinct(group.clone(), elems))
    }

    /// The box `[0, n)^d` of a lattice `Z^d`, in lexicographic order.
    pub fn lattice_box(group: &Group, n: usize) -> Result<FiniteWindow> {
        let d = group
            .lattice_dim()
            .ok_or_else(|| Error::InvalidWindow("boxes are defined on lattices only".into()))?;
        if n == 0 {
            return Err(Error::EmptyWindow);
        }
        let mut elems = Vec::with_capacity(n.pow(d as u32));
        let mut coord = vec![0i64; d];
        loop {
            elems.push(GroupElement::Lattice(coord.clone()));
            let mut k = d;
            loop {
                if k == 0 {
                    return Ok(Self::from_distinct(group.clone(), elems));
                }
                k -= 1;
                coord[k] += 1;
                if (coord[k] as usize) < n {
                    break;
                }
                coord[k] = 0;
            }
        }
    }

    /// Parses a window descriptor: `ball:R`, `box:N`, `interval:N` (the set
    /// `{0..N-1}`), `interval:A..B` (inclusive) or `words:e,a,ab`.
    pub fn parse(group: &Group, text: &str) -> Result<FiniteWindow> {
        let bad = || Error::InvalidWindow(format!("cannot parse window `{text}`"));
        let (kind, arg) = text.trim().split_once(':').ok_or_else(bad)?;
        match kind.trim() {
            "ball" => Ok(group.ball(arg.trim().parse().map_err(|_| bad())?)),
            "box" => FiniteWindow::lattice_box(group, arg.trim().parse().map_err(|_| bad())?),
            "interval" => match arg.split_once("..") {
                Some((a, b)) => FiniteWindow::interval(
                    group,
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                ),
                None => {
                    let n: i64 = arg.trim().parse().map_err(|_| bad())?;
                    FiniteWindow::interval(group, 0, n - 1)
                }
            },
            "words" => FiniteWindow::from_words(group, arg),
            _ => Err(bad()),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elems
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elems.iter()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn position(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn set_eq(&self, other: &FiniteWindow) -> bool {
        self.group == other.group && self.len() == other.len() && self.iter().all(|g| other.contains(g))
    }

    pub fn is_subset(&self, other: &FiniteWindow) -> bool {
        self.iter().all(|g| other.contains(g))
    }

    fn check_owner(&self, other: &FiniteWindow) -> Result<()> {
        if self.group != other.group {
            return Err(Error::MismatchedOwners);
        }
        Ok(())
    }

    /// `F^{-1}`, in the order of `F`.
    pub fn inverse(&self) -> FiniteWindow {
        let elems = self.elems.iter().map(|g| self.group.inverse(g)).collect();
        Self::from_distinct(self.group.clone(), elems)
    }

    /// `gF`, in the order of `F`.
    pub fn translate_left(&self, g: &GroupElement) -> FiniteWindow {
        let elems = self.elems.iter().map(|f| self.group.mul(g, f)).collect();
        Self::from_distinct(self.group.clone(), elems)
    }

    /// The product set `KF = {kf}`, ordered by first appearance with `k`
    /// outermost.
    pub fn product(k: &FiniteWindow, f: &FiniteWindow) -> Result<FiniteWindow> {
        k.check_owner(f)?;
        let mut seen = HashSet::with_capacity(k.len() * f.len());
        let mut elems = Vec::new();
        for a in &k.elems {
            for b in &f.elems {
                let g = k.group.mul(a, b);
                if seen.insert(g.clone()) {
                    elems.push(g);
                }
            }
        }
        Ok(Self::from_distinct(k.group.clone(), elems))
    }

    pub fn union(&self, other: &FiniteWindow) -> Result<FiniteWindow> {
        self.check_owner(other)?;
        let mut elems = self.elems.clone();
        elems.extend(other.iter().filter(|g| !self.contains(g)).cloned());
        Ok(Self::from_distinct(self.group.clone(), elems))
    }

    /// Intersection; `None` when empty.
    pub fn intersection(&self, other: &FiniteWindow) -> Result<Option<FiniteWindow>> {
        self.check_owner(other)?;
        let elems: Vec<GroupElement> = self.iter().filter(|g| other.contains(g)).cloned().collect();
        Ok((!elems.is_empty()).then(|| Self::from_distinct(self.group.clone(), elems)))
    }

    /// Number of elements of `self` outside `other`.
    pub fn count_outside(&self, other: &FiniteWindow) -> usize {
        self.iter().filter(|g| !other.contains(g)).count()
    }

    pub fn format(&self) -> Vec<String> {
        self.elems.iter().map(|g| self.group.format(g)).collect()
    }
}

/// `|KF \ F| / |F|` as an exact rational.
pub fn folner_defect(k: &FiniteWindow, f: &FiniteWindow) -> Result<Rational> {
    let kf = FiniteWindow::product(k, f)?;
    Ok(Rational::new(BigInt::from(kf.count_outside(f)), BigInt::from(f.len())))
}
