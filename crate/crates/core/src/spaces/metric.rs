use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Configuration, FiniteAlphabet, ShiftSystem};
use crate::error::{Error, Result};
use crate::group::{FiniteWindow, GroupElement};
use crate::rational::{int, sqrt_bounds, Interval, Rational};

/// The base pseudometric before windowing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Base {
    /// `Σ_{n ≤ depth} 2^{-n} ρ(x_{s_n}, y_{s_n})` over the group enumeration.
    Induced { depth: usize },
    /// `ρ(x_e, y_e)`.
    Disc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PseudometricSpec {
    pub base: Base,
    /// `ρ_F(x, y) = max_{s ∈ F} ρ(sx, sy)` when present.
    pub window: Option<FiniteWindow>,
}

impl PseudometricSpec {
    pub fn disc() -> Self {
        PseudometricSpec { base: Base::Disc, window: None }
    }

    pub fn induced(depth: usize) -> Self {
        PseudometricSpec { base: Base::Induced { depth }, window: None }
    }

    pub fn with_window(mut self, f: FiniteWindow) -> Self {
        self.window = Some(f);
        self
    }
}

/// A pseudometric prepared for repeated evaluation on one system.
#[derive(Clone, Debug)]
pub struct Pseudometric {
    alphabet: FiniteAlphabet,
    base: Base,
    window: FiniteWindow,
    /// `s_1, ..., s_N` with weights `2^{-n}`
    coords: Vec<GroupElement>,
    coord_set: HashSet<GroupElement>,
    weights: Vec<Rational>,
    tail_bound: Rational,
}

impl Pseudometric {
    pub fn new(sys: &ShiftSystem, spec: &PseudometricSpec) -> Result<Pseudometric> {
        let alphabet = sys.finite_alphabet()?.clone();
        let group = sys.group();
        let window = match &spec.window {
            Some(f) if f.group() != group => return Err(Error::MismatchedOwners),
            Some(f) => f.clone(),
            None => FiniteWindow::identity(group),
        };
        let (coords, weights, tail_bound) = match spec.base {
            Base::Disc => (vec![group.identity()], vec![int(1)], int(0)),
            Base::Induced { depth } => {
                if depth == 0 {
                    return Err(Error::OutOfRange("truncation depth must be positive".into()));
                }
                let coords = group.first_elements(depth);
                let weights: Vec<Rational> =
                    (1..=coords.len()).map(|n| Rational::new(BigInt::one(), BigInt::one() << n)).collect();
                // finite groups are summed completely
                let tail = if coords.len() < depth {
                    int(0)
                } else {
                    alphabet.diam() * Rational::new(BigInt::one(), BigInt::one() << depth)
                };
                (coords, weights, tail)
            }
        };
        let coord_set = coords.iter().cloned().collect();
        Ok(Pseudometric { alphabet, base: spec.base.clone(), window, coords, coord_set, weights, tail_bound })
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn alphabet(&self) -> &FiniteAlphabet {
        &self.alphabet
    }

    pub fn window(&self) -> &FiniteWindow {
        &self.window
    }

    /// The coordinates `s_1, ..., s_N` read by the base pseudometric.
    pub fn coordinates(&self) -> &[GroupElement] {
        &self.coords
    }

    /// Upper bound on the omitted part of the series.
    pub fn truncation_bound(&self) -> &Rational {
        &self.tail_bound
    }

    /// `F^{-1} · {s_1, ..., s_N}`: every coordinate the windowed evaluation reads.
    pub fn dependency_window(&self) -> FiniteWindow {
        let group = self.window.group();
        let coords = FiniteWindow::new(group.clone(), self.coords.clone()).expect("nonempty coordinates");
        FiniteWindow::product(&self.window.inverse(), &coords).expect("same group")
    }

    /// The base pseudometric on `(sx, sy)`, reading `(sx)_t = x_{s^{-1} t}`.
    pub fn base_eval_shifted(&self, s: &GroupElement, x: &Configuration, y: &Configuration) -> Interval {
        let group = self.window.group();
        let s_inv = group.inverse(s);
        let mut lo = Rational::zero();
        for (t, w) in self.coords.iter().zip(&self.weights) {
            let u = group.mul(&s_inv, t);
            let (a, b) = (x.letter(&u), y.letter(&u));
            if a != b {
                lo += w * self.alphabet.dist(a, b);
            }
        }
        if matches!(self.base, Base::Disc) || self.tail_bound.is_zero() {
            return Interval::exact(lo);
        }
        let exact = x.tail() == y.tail()
            && x.differences(y).iter().all(|u| self.coord_set.contains(&group.mul(s, u)));
        if exact {
            Interval::exact(lo)
        } else {
            let hi = &lo + &self.tail_bound;
            Interval::new(lo, hi)
        }
    }

    pub fn base_eval(&self, x: &Configuration, y: &Configuration) -> Interval {
        self.base_eval_shifted(&self.window.group().identity(), x, y)
    }

    /// `max_{s ∈ F} ρ(sx, sy)` as a certified enclosure.
    pub fn eval(&self, x: &Configuration, y: &Configuration) -> Result<Interval> {
        if x.group() != self.window.group() || y.group() != self.window.group() {
            return Err(Error::MismatchedOwners);
        }
        let mut best = Interval::zero();
        for s in self.window.iter() {
            best = best.max(&self.base_eval_shifted(s, x, y));
        }
        Ok(best)
    }
}

pub fn eval_metric(sys: &ShiftSystem, spec: &PseudometricSpec, x: &Configuration, y: &Configuration) -> Result<Interval> {
    Pseudometric::new(sys, spec)?.eval(x, y)
}

/// `(ρ_2, ρ_∞)` between two maps `[d] → X`, as certified enclosures.
pub fn microstate_metrics(pm: &Pseudometric, phi: &[Configuration], psi: &[Configuration]) -> Result<(Interval, Interval)> {
    if phi.len() != psi.len() {
        return Err(Error::DimensionMismatch { expected: phi.len(), found: psi.len() });
    }
    if phi.is_empty() {
        return Err(Error::OutOfRange("microstates need d ≥ 1".into()));
    }
    let dists = phi.iter().zip(psi).map(|(x, y)| pm.eval(x, y)).collect::<Result<Vec<_>>>()?;
    Ok(rho_two_and_sup(&dists))
}

/// `ρ_2` and `ρ_∞` from per-point distance enclosures.
pub fn rho_two_and_sup(dists: &[Interval]) -> (Interval, Interval) {
    let d = Rational::from_integer(BigInt::from(dists.len()));
    let mut sum_lo = Rational::zero();
    let mut sum_hi = Rational::zero();
    let mut sup = Interval::zero();
    for q in dists {
        sum_lo += &q.lo * &q.lo;
        sum_hi += &q.hi * &q.hi;
        sup = sup.max(q);
    }
    let lo = sqrt_bounds(&(sum_lo / &d)).0;
    let hi = sqrt_bounds(&(sum_hi / &d)).1;
    (Interval::new(lo, hi), sup)
}
