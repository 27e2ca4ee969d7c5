use std::collections::HashSet;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::{Bracket, WindowFamily, WindowValue};
use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group, GroupElement};
use crate::rational::{int, Rational};
use crate::spaces::{Configuration, OneDimSft, Pattern, PatternEnumerator, ShiftSystem};

/// Longest period searched for the periodic-orbit lower bound on `Z`.
const MAX_PERIOD: usize = 12;
const PERIODIC_BUDGET: usize = 50_000;

/// A finite union of cylinders `[x_w = p_w for w ∈ W]`.
#[derive(Clone, Debug)]
pub struct CylinderSet {
    group: Group,
    cylinders: Vec<Pattern>,
}

impl CylinderSet {
    pub fn new(group: &Group, cylinders: Vec<Pattern>) -> Result<CylinderSet> {
        if cylinders.iter().any(|c| c.window.group() != group) {
            return Err(Error::MismatchedOwners);
        }
        Ok(CylinderSet { group: group.clone(), cylinders })
    }

    pub fn empty(group: &Group) -> CylinderSet {
        CylinderSet { group: group.clone(), cylinders: Vec::new() }
    }

    /// `[x_e = a]`.
    pub fn letter_at_identity(group: &Group, a: u32) -> CylinderSet {
        let p = Pattern { window: FiniteWindow::identity(group), letters: vec![a] };
        CylinderSet { group: group.clone(), cylinders: vec![p] }
    }

    pub fn is_empty(&self) -> bool {
        self.cylinders.is_empty()
    }

    pub fn cylinders(&self) -> &[Pattern] {
        &self.cylinders
    }

    pub fn contains(&self, x: &Configuration) -> bool {
        let e = self.group.identity();
        self.cylinders.iter().any(|c| c.occurs_at(x, &e))
    }

    /// The union of the cylinder windows.
    pub fn support(&self) -> Option<FiniteWindow> {
        let elems: Vec<GroupElement> = self.cylinders.iter().flat_map(|c| c.window.iter().cloned()).collect();
        FiniteWindow::new(self.group.clone(), elems).ok()
    }
}

fn z_coord(g: &GroupElement) -> i64 {
    match g {
        GroupElement::Lattice(v) => v[0],
        _ => unreachable!("Z elements are lattice vectors"),
    }
}

/// `sup_x Σ_{s ∈ F} 1_A(sx)` by dynamic programming over the globally
/// admissible words covering `F^{-1} · supp(A)` on `Z`.
fn sup_on_z(t: &OneDimSft, a: &CylinderSet, f: &FiniteWindow) -> Option<usize> {
    let supp: Vec<i64> = a.support()?.iter().map(z_coord).collect();
    let (umin, umax) = (*supp.iter().min().unwrap(), *supp.iter().max().unwrap());
    let fs: Vec<i64> = f.iter().map(z_coord).collect();
    let lo = fs.iter().map(|s| umin - s).min().unwrap();
    let hi = fs.iter().map(|s| umax - s).max().unwrap();
    let len = (hi - lo + 1) as usize;
    let context = (umax - umin) as usize;
    let fset: HashSet<i64> = fs.into_iter().collect();
    // (sx) ∈ A reads x at -s + w; evaluate when the last such letter, at
    // p = umax - s, has been placed
    let cyl: Vec<Vec<(usize, u32)>> = a
        .cylinders()
        .iter()
        .map(|c| c.window.iter().zip(&c.letters).map(|(w, &l)| ((umax - z_coord(w)) as usize, l)).collect())
        .collect();
    let best = t.max_path_score(len, context, |i, ctx| {
        let p = lo + i as i64;
        if !fset.contains(&(umax - p)) || ctx.len() <= context {
            return 0;
        }
        let last = ctx.len() - 1;
        cyl.iter().any(|c| c.iter().all(|&(back, l)| ctx[last - back] == l)) as u64
    })?;
    Some(best as usize)
}

/// The same supremum over locally admissible patterns on the dependency
/// window, by exhaustive enumeration; an upper bound on the true value.
fn sup_by_enumeration(sys: &ShiftSystem, a: &CylinderSet, f: &FiniteWindow, budget: usize) -> Result<usize> {
    let group = sys.group();
    let supp = a.support().expect("nonempty");
    let dep = FiniteWindow::product(&f.inverse(), &supp)?;
    let checks: Vec<Vec<Vec<(usize, u32)>>> = f
        .iter()
        .map(|s| {
            let s_inv = group.inverse(s);
            a.cylinders()
                .iter()
                .map(|c| {
                    c.window
                        .iter()
                        .zip(&c.letters)
                        .map(|(w, &l)| (dep.position(&group.mul(&s_inv, w)).unwrap(), l))
                        .collect()
                })
                .collect()
        })
        .collect();
    let en = PatternEnumerator::new(sys, &dep)?;
    let mut best = 0;
    let mut seen = 0usize;
    let mut over = false;
    en.for_each(|p| {
        seen += 1;
        if seen > budget {
            over = true;
            return ControlFlow::Break(());
        }
        let hits = checks.iter().filter(|cs| cs.iter().any(|c| c.iter().all(|&(i, l)| p[i] == l))).count();
        best = best.max(hits);
        if best == f.len() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if over {
        return Err(Error::TooLarge(format!("more than {budget} patterns on the dependency window")));
    }
    Ok(best)
}

/// Best visit frequency of `A` along a periodic orbit of period at most
/// [`MAX_PERIOD`]. Averaging `Σ_{s∈F} 1_A(s σ^j x)` over the orbit gives
/// `|F|` times the frequency, so some orbit point reaches it for every `F`.
fn periodic_lower_bound(t: &OneDimSft, a: &CylinderSet) -> Option<(Rational, String)> {
    a.support()?;
    let mut best: Option<(Rational, String)> = None;
    for p in 1..=MAX_PERIOD {
        let words = match t.words(p, Some(PERIODIC_BUDGET)) {
            Ok(w) => w,
            Err(_) => break,
        };
        for w in words {
            let reps = 2 + (t.memory() + p) / p;
            let periodic: Vec<u32> = w.iter().cycle().take(reps * p).copied().collect();
            if !t.in_language(&periodic) {
                continue;
            }
            let letter = |i: i64| w[i.rem_euclid(p as i64) as usize];
            // (jx)_u = x_{u - j}
            let hits = (0..p as i64)
                .filter(|j| {
                    a.cylinders().iter().any(|c| c.window.iter().zip(&c.letters).all(|(u, &l)| letter(z_coord(u) - j) == l))
                })
                .count();
            let freq = Rational::new(BigInt::from(hits), BigInt::from(p));
            if best.as_ref().is_none_or(|(b, _)| freq > *b) {
                let word: String = w.iter().map(|a| a.to_string()).collect();
                best = Some((freq, format!("periodic orbit of ({word})^∞")));
            }
        }
    }
    best
}

/// Bracket on `ocap^nv(A) = inf_F sup_x (Σ_{s∈F} 1_A(sx)) / |F|`.
///
/// On `Z` the supremum is exact by dynamic programming over globally
/// admissible words; elsewhere it is an upper bound from locally admissible
/// patterns (at most `budget` of them per window). The lower bound uses
/// constant fixed points in `A`, and periodic orbits on `Z`.
pub fn orbit_capacity(sys: &ShiftSystem, a: &CylinderSet, fam: &WindowFamily, budget: usize) -> Result<Bracket<Rational>> {
    if fam.group() != sys.group() || a.group != *sys.group() {
        return Err(Error::MismatchedOwners);
    }
    let k = sys.finite_alphabet()?.size() as u32;
    if a.is_empty() {
        let rows = fam
            .iter()
            .map(|(label, f)| WindowValue { window: label.into(), size: f.len(), value: int(0), note: "A is empty".into() })
            .collect();
        return Ok(Bracket::from_rows(rows, int(0), "A is empty"));
    }
    let transfer = if sys.group().is_integers() { OneDimSft::new(sys).ok() } else { None };
    let rows = fam
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(label, f)| {
            let (sup, how) = match &transfer {
                Some(t) => (sup_on_z(t, a, f).unwrap_or(0), "global DP"),
                None => (sup_by_enumeration(sys, a, f, budget)?, "local enumeration"),
            };
            Ok(WindowValue {
                window: label.to_string(),
                size: f.len(),
                value: Rational::new(BigInt::from(sup), BigInt::from(f.len())),
                note: format!("sup={sup} ({how})"),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let group = sys.group();
    let fixed = (0..k).find(|&c| {
        let x = Configuration::constant(group, c);
        sys.is_admissible(&x) && a.contains(&x)
    });
    let (lower, why) = if let Some(c) = fixed {
        (int(1), format!("constant point {c} lies in A"))
    } else if let Some((q, why)) = transfer.as_ref().and_then(|t| periodic_lower_bound(t, a)) {
        (q, why)
    } else {
        (int(0), "no lower-bound argument applies".to_string())
    };
    Ok(Bracket::from_rows(rows, lower, why))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn golden_mean_half() {
        let gm = ShiftSystem::golden_mean();
        let z = gm.group().clone();
        let a = CylinderSet::letter_at_identity(&z, 1);
        let fam = WindowFamily::new(vec![("interval:20".into(), FiniteWindow::interval(&z, 0, 19).unwrap())]).unwrap();
        let b = orbit_capacity(&gm, &a, &fam, 1_000_000).unwrap();
        assert_eq!(b.upper, ratio(1, 2));
        assert_eq!(b.lower, ratio(1, 2));
    }

    #[test]
    fn full_shift_is_one() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 2).unwrap();
        let a = CylinderSet::letter_at_identity(&z, 1);
        let fam = WindowFamily::intervals(&z, 1, 8).unwrap();
        let b = orbit_capacity(&sys, &a, &fam, 1000).unwrap();
        assert_eq!((b.lower, b.upper), (int(1), int(1)));
    }

    #[test]
    fn empty_set() {
        let gm = ShiftSystem::golden_mean();
        let fam = WindowFamily::intervals(gm.group(), 1, 4).unwrap();
        let b = orbit_capacity(&gm, &CylinderSet::empty(gm.group()), &fam, 10).unwrap();
        assert_eq!((b.lower, b.upper), (int(0), int(0)));
    }

    #[test]
    fn odd_windows_and_longer_cylinders() {
        let gm = ShiftSystem::golden_mean();
        let z = gm.group().clone();
        let a = CylinderSet::letter_at_identity(&z, 1);
        let f = FiniteWindow::interval(&z, 0, 4).unwrap();
        let fam = WindowFamily::new(vec![("f".into(), f.clone())]).unwrap();
        assert_eq!(orbit_capacity(&gm, &a, &fam, 100).unwrap().upper, ratio(3, 5));
        // A = [x_0 x_1 = 0 0]: the all-zero point visits every time
        let zz = Pattern::word(&z, &[0, 0]).unwrap();
        let a = CylinderSet::new(&z, vec![zz]).unwrap();
        assert_eq!(orbit_capacity(&gm, &a, &fam, 100).unwrap().lower, int(1));
    }

    #[test]
    fn dp_matches_enumeration_on_z() {
        let gm = ShiftSystem::golden_mean();
        let z = gm.group().clone();
        let a = CylinderSet::new(&z, vec![Pattern::word(&z, &[1, 0, 1]).unwrap(), Pattern::word(&z, &[0, 0]).unwrap()]).unwrap();
        let t = OneDimSft::new(&gm).unwrap();
        for n in 1..10 {
            let f = FiniteWindow::interval(&z, 0, n - 1).unwrap();
            let dp = sup_on_z(&t, &a, &f).unwrap();
            let brute = sup_by_enumeration(&gm, &a, &f, 1 << 20).unwrap();
            assert_eq!(dp, brute, "n = {n}");
        }
    }

    #[test]
    fn free_group_enumeration() {
        let f2 = Group::free(2).unwrap();
        let sys = ShiftSystem::full_shift(&f2, 2).unwrap();
        let a = CylinderSet::letter_at_identity(&f2, 1);
        let fam = WindowFamily::balls(&f2, 0, 1).unwrap();
        let b = orbit_capacity(&sys, &a, &fam, 1 << 12).unwrap();
        assert_eq!((b.lower, b.upper), (int(1), int(1)));
    }
}
