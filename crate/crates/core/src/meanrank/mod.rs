//! Naive mean rank of finitely presented `ZΓ`-modules through truncated
//! integer linear algebra.
//!
//! An element of `ZΓ^n` supported in the ball `B_R` is a vector of
//! `Q^{n·|B_R|}`. Relators are admitted only through translates that fit in
//! `B_R`, so every computed rank is an upper bound on the true rank, and it
//! can only drop as `R` grows.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group, GroupElement};
use crate::invariants::{Bracket, WindowFamily, WindowValue};
use crate::rational::{int, Rational};
use crate::sofic::SoficMap;

pub mod linalg;
pub mod presentation;
pub mod ring;

pub use linalg::{bareiss_rank, invariant_factors, smith_normal_form, IntMatrix, SparseEchelon, SparseVec};
pub use presentation::{preset, ModuleFile, ModuleVector, SubgroupSpec, ZGModulePresentation, PRESETS};
pub use ring::GroupRingElement;

/// Coordinates allowed in one elimination.
pub const MAX_COORDINATES: usize = 250_000;

/// Strictly increasing support radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationSchedule {
    radii: Vec<usize>,
}

impl TruncationSchedule {
    pub fn new(radii: Vec<usize>) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::OutOfRange("empty truncation schedule".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange("schedule radii must be strictly increasing".into()));
        }
        Ok(TruncationSchedule { radii })
    }

    /// `count` consecutive radii starting at `start`.
    pub fn consecutive(start: usize, count: usize) -> Result<Self> {
        Self::new((start..start + count).collect())
    }

    pub fn radii(&self) -> &[usize] {
        &self.radii
    }
}

/// Index of `(component, g)` for `g ∈ B_R`.
struct Coordinates {
    ball: HashMap<GroupElement, usize>,
    rank: usize,
}

impl Coordinates {
    fn new(group: &Group, rank: usize, radius: usize) -> Result<Self> {
        let ball = group.ball(radius);
        let total = ball.len() * rank;
        if total > MAX_COORDINATES {
            return Err(Error::TooLarge(format!("{total} coordinates at radius {radius}")));
        }
        let ball = ball.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ok(Coordinates { ball, rank })
    }

    fn len(&self) -> usize {
        self.ball.len() * self.rank
    }

    /// `None` when the vector leaves the ball.
    fn encode(&self, v: &[GroupRingElement], offset: usize) -> Option<SparseVec> {
        let per = self.ball.len();
        let mut out = SparseVec::new();
        for (c, x) in v.iter().enumerate() {
            for (g, k) in x.terms() {
                let &i = self.ball.get(g)?;
                out.insert(offset + c * per + i, k.clone());
            }
        }
        Some(out)
    }
}

fn translate(v: &[GroupRingElement], g: &GroupElement, group: &Group) -> ModuleVector {
    v.iter().map(|x| x.left_translate(g, group)).collect()
}

fn vector_radius(v: &[GroupRingElement], group: &Group) -> usize {
    v.iter().map(|x| x.radius(group)).max().unwrap_or(0)
}

/// All translates `t·r` supported in `B_R`.
fn relation_translates(pres: &ZGModulePresentation, radius: usize) -> Vec<ModuleVector> {
    let group = pres.group();
    let mut out = Vec::new();
    for r in pres.relators() {
        // if t·g ∈ B_R for some g ∈ supp r then |t| ≤ R + |g|
        let reach = r.iter().filter(|x| !x.is_zero()).map(|x| x.min_length(group)).min().unwrap_or(0);
        for t in group.ball(radius + reach).iter() {
            let tr = translate(r, t, group);
            if vector_radius(&tr, group) <= radius {
                out.push(tr);
            }
        }
    }
    out
}

/// The truncated linear system behind one window rank: the relation
/// translates `T_R` and the generators `s^{-1} a_j`, as sparse integer rows
/// over `n·|B_R|` coordinates.
#[derive(Clone, Debug)]
pub struct WindowSystem {
    pub radius: usize,
    pub coordinates: usize,
    pub relations: Vec<SparseVec>,
    pub generators: Vec<SparseVec>,
}

impl WindowSystem {
    /// `rank(T_R ∪ G) - rank(T_R)`.
    pub fn quotient_rank(&self) -> usize {
        let mut e = SparseEchelon::new();
        for r in &self.relations {
            e.insert(r.clone());
        }
        let base = e.rank();
        for g in &self.generators {
            e.insert(g.clone());
        }
        e.rank() - base
    }
}

/// Smallest radius containing every `s^{-1} a_j` for `s ∈ F`.
pub fn required_radius(pres: &ZGModulePresentation, a: &SubgroupSpec, f: &FiniteWindow) -> usize {
    let group = pres.group();
    f.iter()
        .flat_map(|s| {
            let si = group.inverse(s);
            a.generators().iter().map(move |v| vector_radius(&translate(v, &si, group), group))
        })
        .max()
        .unwrap_or(0)
}

fn check_owner(pres: &ZGModulePresentation, f: &FiniteWindow) -> Result<()> {
    if f.group() != pres.group() {
        return Err(Error::MismatchedOwners);
    }
    Ok(())
}

/// Builds the system at `max(radius, required_radius)`.
pub fn build_window_system(
    pres: &ZGModulePresentation,
    a: &SubgroupSpec,
    f: &FiniteWindow,
    radius: usize,
) -> Result<WindowSystem> {
    check_owner(pres, f)?;
    let group = pres.group();
    let radius = radius.max(required_radius(pres, a, f));
    let coords = Coordinates::new(group, pres.rank(), radius)?;
    let relations = relation_translates(pres, radius)
        .iter()
        .map(|v| coords.encode(v, 0).expect("translates are filtered to the ball"))
        .collect();
    let pairs: Vec<(&GroupElement, &ModuleVector)> =
        f.iter().flat_map(|s| a.generators().iter().map(move |v| (s, v))).collect();
    let generators = pairs
        .par_iter()
        .map(|(s, v)| {
            let moved = translate(v, &group.inverse(s), group);
            coords.encode(&moved, 0).expect("radius covers the generators")
        })
        .collect();
    Ok(WindowSystem { radius, coordinates: coords.len(), relations, generators })
}

/// Upper bound on `rk(A^F)` at one radius (enlarged to fit the generators).
pub fn window_rank_at(pres: &ZGModulePresentation, a: &SubgroupSpec, f: &FiniteWindow, radius: usize) -> Result<usize> {
    Ok(build_window_system(pres, a, f, radius)?.quotient_rank())
}

/// Window rank along a schedule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowRank {
    /// the last (smallest) computed rank
    pub rank: usize,
    pub radius: usize,
    /// two consecutive radii gave the same rank
    pub stable: bool,
    /// `(radius, rank)` for each radius evaluated
    pub history: Vec<(usize, usize)>,
}

/// Walks the schedule radii that contain the generators, stopping once two
/// consecutive radii agree. Free modules need no relators, so the first
/// admissible radius is already exact.
pub fn window_subgroup_rank(
    pres: &ZGModulePresentation,
    a: &SubgroupSpec,
    f: &FiniteWindow,
    sched: &TruncationSchedule,
) -> Result<WindowRank> {
    check_owner(pres, f)?;
    let need = required_radius(pres, a, f);
    let radii: Vec<usize> = sched.radii().iter().copied().filter(|&r| r >= need).collect();
    if radii.is_empty() {
        return Err(Error::OutOfRange(format!(
            "generator translates need radius {need}, beyond every schedule radius"
        )));
    }
    let mut history: Vec<(usize, usize)> = Vec::new();
    for &r in &radii {
        let rank = window_rank_at(pres, a, f, r)?;
        let agrees = history.last().is_some_and(|&(_, prev)| prev == rank);
        history.push((r, rank));
        if agrees || pres.is_free() {
            return Ok(WindowRank { rank, radius: r, stable: true, history });
        }
    }
    let &(radius, rank) = history.last().expect("at least one radius");
    Ok(WindowRank { rank, radius, stable: false, history })
}

/// Schedule starting at the radius the window needs.
pub fn auto_schedule(pres: &ZGModulePresentation, a: &SubgroupSpec, f: &FiniteWindow, count: usize) -> TruncationSchedule {
    TruncationSchedule::consecutive(required_radius(pres, a, f), count.max(1)).expect("count ≥ 1")
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanRankBracket {
    pub bracket: Bracket<Rational>,
    pub windows: Vec<WindowRank>,
    /// every row is an exact rank rather than a truncation bound
    pub exact_rows: bool,
}

/// Bracket on `inf_F rk(A^F)/|F|`. Rows are truncated ranks, each a valid
/// upper bound; they are exact for free modules. The lower bound is 1 for a
/// nonzero subgroup of a free module over a left-orderable group, where the
/// translates `s^{-1} a` of a nonzero `a` are independent, and 0 otherwise.
/// With `sched = None` each window gets three consecutive radii starting at
/// the one it needs.
pub fn naive_mean_rank_bracket(
    pres: &ZGModulePresentation,
    a: &SubgroupSpec,
    fam: &WindowFamily,
    sched: Option<&TruncationSchedule>,
) -> Result<MeanRankBracket> {
    if fam.group() != pres.group() {
        return Err(Error::MismatchedOwners);
    }
    let mut rows = Vec::new();
    let mut windows = Vec::new();
    for (label, f) in fam.iter() {
        let own;
        let s = match sched {
            Some(s) => s,
            None => {
                own = auto_schedule(pres, a, f, 3);
                &own
            }
        };
        let w = window_subgroup_rank(pres, a, f, s)?;
        rows.push(WindowValue {
            window: label.to_string(),
            size: f.len(),
            value: Rational::new(BigInt::from(w.rank), BigInt::from(f.len())),
            note: format!("rank={} R={} {}", w.rank, w.radius, if w.stable { "stable" } else { "UNSTABLE" }),
        });
        windows.push(w);
    }
    if windows.iter().all(|w| !w.stable) {
        return Err(Error::Unstable("no window rank stabilized on the schedule".into()));
    }
    let (lower, why) = if a.is_zero() {
        (int(0), "zero subgroup")
    } else if pres.is_free() && pres.group().is_orderable() {
        (int(1), "translates of a nonzero element of a free module over an orderable group are independent")
    } else {
        (int(0), "no closed form; the upper bound is a truncation heuristic")
    };
    Ok(MeanRankBracket { bracket: Bracket::from_rows(rows, lower, why), windows, exact_rows: pres.is_free() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurrogateReport {
    pub value: Rational,
    pub rank: usize,
    pub d: usize,
    pub radius: usize,
    pub coordinates: usize,
}

/// `rk(image of A^d in M^d / M(B, F, σ))/d` on truncated coordinates, where
/// `M(B, F, σ)` is generated by `δ_v⊗b - δ_{σ_s v}⊗sb` and each copy of
/// `M^d` carries its relation translates `T_R`.
pub fn sofic_rank_surrogate(
    pres: &ZGModulePresentation,
    a: &SubgroupSpec,
    b: &SubgroupSpec,
    f: &FiniteWindow,
    sigma: &SoficMap,
    radius: usize,
) -> Result<SurrogateReport> {
    check_owner(pres, f)?;
    let group = pres.group();
    if sigma.group() != group {
        return Err(Error::MismatchedOwners);
    }
    let d = sigma.d();
    let sb: Vec<(usize, &GroupElement, ModuleVector, ModuleVector)> = b
        .generators()
        .iter()
        .enumerate()
        .flat_map(|(j, v)| f.iter().map(move |s| (j, s, v.clone(), translate(v, s, group))))
        .collect();
    let need = a
        .generators()
        .iter()
        .chain(sb.iter().map(|t| &t.3))
        .chain(b.generators())
        .map(|v| vector_radius(v, group))
        .max()
        .unwrap_or(0);
    let radius = radius.max(need);
    let coords = Coordinates::new(group, pres.rank(), radius)?;
    let per = coords.len();
    if per.saturating_mul(d) > MAX_COORDINATES {
        return Err(Error::TooLarge(format!("{} coordinates for d = {d}", per * d)));
    }
    let local = relation_translates(pres, radius);
    let mut e = SparseEchelon::new();
    for v in 0..d {
        for r in &local {
            e.insert(coords.encode(r, v * per).expect("filtered to the ball"));
        }
    }
    for (_, s, bv, sbv) in &sb {
        for v in 0..d {
            let mut row = coords.encode(bv, v * per).expect("radius covers B");
            let w = sigma.apply(s, v);
            for (k, c) in coords.encode(sbv, w * per).expect("radius covers sB") {
                let slot = row.entry(k).or_default();
                *slot -= c;
            }
            e.insert(row);
        }
    }
    let base = e.rank();
    for v in 0..d {
        for g in a.generators() {
            e.insert(coords.encode(g, v * per).expect("radius covers A"));
        }
    }
    let rank = e.rank() - base;
    Ok(SurrogateReport {
        value: Rational::new(BigInt::from(rank), BigInt::from(d)),
        rank,
        d,
        radius,
        coordinates: per * d,
    })
}
