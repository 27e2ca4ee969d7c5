//! Microstate spaces `Map(ρ, F, δ, σ)`: maps `φ: [d] → X` with
//! `ρ_2(sφ, φ∘σ_s) ≤ δ` for every `s ∈ F`.
//!
//! Points are stored as configurations. Points produced here by pullback or
//! enumeration are restrictions to the coordinates the checks read, so their
//! distances carry the full truncation bound of the pseudometric.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group, GroupElement};
use crate::invariants::separated_greedy;
use crate::rational::{int, Interval, LogRatio, Rational};
use crate::sofic::SoficMap;
use crate::spaces::{
    ConfigurationRecord, Configuration, OneDimSft, PatternEnumerator, Pseudometric, PseudometricSpec, ShiftSystem,
};

/// Cap on `|patterns|^2 · |F|` for the enumeration distance tables.
pub const MAX_TABLE: usize = 4_000_000;

#[derive(Clone, Debug)]
pub struct Microstate {
    points: Vec<Configuration>,
    /// points are restrictions, unknown outside their support
    truncated: bool,
}

impl Microstate {
    pub fn new(points: Vec<Configuration>) -> Result<Microstate> {
        Self::build(points, false)
    }

    fn build(points: Vec<Configuration>, truncated: bool) -> Result<Microstate> {
        let first = points.first().ok_or_else(|| Error::OutOfRange("microstates need d ≥ 1".into()))?;
        let group = first.group().clone();
        if points.iter().any(|x| *x.group() != group) {
            return Err(Error::MismatchedOwners);
        }
        Ok(Microstate { points, truncated })
    }

    pub fn constant(x: Configuration, d: usize) -> Result<Microstate> {
        Self::new(vec![x; d])
    }

    pub fn d(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Configuration] {
        &self.points
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn to_record(&self) -> MicrostateRecord {
        MicrostateRecord {
            d: self.d(),
            truncated: self.truncated,
            points: self.points.iter().map(Configuration::to_record).collect(),
        }
    }

    pub fn from_record(group: &Group, rec: &MicrostateRecord) -> Result<Microstate> {
        if rec.points.len() != rec.d {
            return Err(Error::DimensionMismatch { expected: rec.d, found: rec.points.len() });
        }
        let points = rec.points.iter().map(|p| Configuration::from_record(group, p)).collect::<Result<Vec<_>>>()?;
        Self::build(points, rec.truncated)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MicrostateRecord {
    pub d: usize,
    pub truncated: bool,
    pub points: Vec<ConfigurationRecord>,
}

/// Parameters of `Map(ρ, F, δ, σ)`. `δ = 0` is allowed and asks for exact
/// equivariance on the evaluated coordinates.
#[derive(Clone, Debug)]
pub struct MicrostateSpaceSpec {
    pub sys: ShiftSystem,
    pub rho: PseudometricSpec,
    pub f: FiniteWindow,
    pub delta: Rational,
    pub sigma: SoficMap,
    pm: Pseudometric,
}

impl MicrostateSpaceSpec {
    pub fn new(sys: ShiftSystem, rho: PseudometricSpec, f: FiniteWindow, delta: Rational, sigma: SoficMap) -> Result<Self> {
        if delta < int(0) {
            return Err(Error::OutOfRange("δ must be nonnegative".into()));
        }
        if f.group() != sys.group() || sigma.group() != sys.group() {
            return Err(Error::MismatchedOwners);
        }
        let pm = Pseudometric::new(&sys, &rho)?;
        Ok(MicrostateSpaceSpec { sys, rho, f, delta, sigma, pm })
    }

    pub fn pseudometric(&self) -> &Pseudometric {
        &self.pm
    }

    pub fn d(&self) -> usize {
        self.sigma.d()
    }

    /// `(F^{-1} ∪ {e}) · D` where `D` is every coordinate `ρ` reads: the
    /// coordinates of `φ(v)` that the membership checks depend on.
    pub fn support(&self) -> FiniteWindow {
        let group = self.sys.group();
        let lead = self.f.inverse().union(&FiniteWindow::identity(group)).expect("same group");
        FiniteWindow::product(&lead, &self.pm.dependency_window()).expect("same group")
    }

    /// `ρ(sφ(v), φ(σ_s v))` for every `v`.
    fn site_distances(&self, phi: &Microstate, s: &GroupElement) -> Vec<Interval> {
        let perm = self.sigma.permutation(s);
        (0..phi.d())
            .into_par_iter()
            .map(|v| {
                let moved = phi.points[v].act(s);
                let iv = self.pm.eval(&moved, &phi.points[perm.apply(v)]).expect("checked owners");
                if phi.truncated {
                    widen(iv, self.pm.truncation_bound())
                } else {
                    iv
                }
            })
            .collect()
    }

    fn check_dimension(&self, phi: &Microstate) -> Result<()> {
        if phi.d() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), found: phi.d() });
        }
        if phi.points[0].group() != self.sys.group() {
            return Err(Error::MismatchedOwners);
        }
        Ok(())
    }
}

/// Unknown coordinates beyond the truncation can add up to the tail bound.
fn widen(iv: Interval, tail: &Rational) -> Interval {
    let hi = &iv.lo + tail;
    if hi > iv.hi {
        Interval::new(iv.lo, hi)
    } else {
        iv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Yes,
    No,
    Undecided,
}

/// `ρ_2(sφ, φ∘σ_s)^2` for one `s`, as an exact rational interval.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftDefect {
    pub s: String,
    pub rho2_squared: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub verdict: Verdict,
    pub defects: Vec<ShiftDefect>,
    /// `δ^2 - max_s sup ρ_2^2`; nonnegative exactly when the verdict is YES
    pub margin: Rational,
}

fn mean_squares(dists: &[Interval]) -> Interval {
    let d = Rational::from_integer(BigInt::from(dists.len()));
    let lo: Rational = dists.iter().map(|q| &q.lo * &q.lo).sum();
    let hi: Rational = dists.iter().map(|q| &q.hi * &q.hi).sum();
    Interval::new(lo / &d, hi / &d)
}

/// Compares `ρ_2^2` with `δ^2` exactly for every `s ∈ F`.
pub fn is_member(spec: &MicrostateSpaceSpec, phi: &Microstate) -> Result<Membership> {
    spec.check_dimension(phi)?;
    let group = spec.sys.group();
    let d2 = &spec.delta * &spec.delta;
    let defects: Vec<ShiftDefect> = spec
        .f
        .iter()
        .map(|s| ShiftDefect { s: group.format(s), rho2_squared: mean_squares(&spec.site_distances(phi, s)) })
        .collect();
    let worst = defects.iter().map(|x| x.rho2_squared.hi.clone()).max().unwrap_or_else(|| int(0));
    let verdict = if defects.iter().any(|x| x.rho2_squared.lo > d2) {
        Verdict::No
    } else if worst <= d2 {
        Verdict::Yes
    } else {
        Verdict::Undecided
    };
    Ok(Membership { verdict, defects, margin: d2 - worst })
}

/// `φ_ω(v)_g = ω(σ_{g^{-1}} v)` restricted to [`MicrostateSpaceSpec::support`].
pub fn pullback(spec: &MicrostateSpaceSpec, omega: &[u32]) -> Result<Microstate> {
    if !spec.sys.is_full() {
        return Err(Error::Precondition("pullbacks are only defined for full shifts".into()));
    }
    let k = spec.sys.finite_alphabet()?.size() as u32;
    if omega.len() != spec.d() {
        return Err(Error::DimensionMismatch { expected: spec.d(), found: omega.len() });
    }
    if let Some(&bad) = omega.iter().find(|&&a| a >= k) {
        return Err(Error::OutOfRange(format!("letter {bad} outside an alphabet of size {k}")));
    }
    let group = spec.sys.group();
    let w = spec.support();
    let perms: Vec<_> = w.iter().map(|g| spec.sigma.permutation(&group.inverse(g))).collect();
    let points = (0..spec.d())
        .map(|v| {
            let letters = perms.iter().map(|p| omega[p.apply(v)]).collect();
            Configuration::new(w.clone(), letters, 0)
        })
        .collect::<Result<Vec<_>>>()?;
    Microstate::build(points, true)
}

/// Per-`s` outcome of the counting lemma on one microstate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaRow {
    pub s: String,
    /// sites with `ρ(sφ(v), φ(σ_s v)) ≤ √δ` certified
    pub certain: usize,
    /// sites where the comparison with `√δ` is undecided
    pub undecided: usize,
    pub required: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaCheck {
    pub verdict: Verdict,
    pub rows: Vec<LemmaRow>,
}

/// Counts `{v : ρ(sφ(v), φ(σ_s v)) ≤ √δ}` against `(1 - δ) d` for each
/// `s ∈ F`. `φ` must be a certified member.
pub fn map_lowerbound_check(spec: &MicrostateSpaceSpec, phi: &Microstate) -> Result<LemmaCheck> {
    if is_member(spec, phi)?.verdict != Verdict::Yes {
        return Err(Error::Precondition("the microstate is not a certified member".into()));
    }
    let group = spec.sys.group();
    let required = (int(1) - &spec.delta) * int(phi.d() as i64);
    let mut verdict = Verdict::Yes;
    let rows = spec
        .f
        .iter()
        .map(|s| {
            let dists = spec.site_distances(phi, s);
            // ρ ≤ √δ ⟺ ρ^2 ≤ δ for ρ ≥ 0
            let certain = dists.iter().filter(|q| &q.hi * &q.hi <= spec.delta).count();
            let possible = dists.iter().filter(|q| &q.lo * &q.lo <= spec.delta).count();
            if int(possible as i64) < required {
                verdict = Verdict::No;
            } else if int(certain as i64) < required && verdict == Verdict::Yes {
                verdict = Verdict::Undecided;
            }
            LemmaRow { s: group.format(s), certain, undecided: possible - certain, required: required.clone() }
        })
        .collect();
    Ok(LemmaCheck { verdict, rows })
}

/// Candidate points of the finite model: patterns on the support. Over `Z`
/// they are words of the language on the hull interval, so each extends to
/// a point of `X`; elsewhere they are locally admissible only.
#[derive(Clone, Debug)]
pub struct FiniteModel {
    pub window: FiniteWindow,
    pub patterns: Vec<Vec<u32>>,
    pub globally_admissible: bool,
}

pub fn finite_model(spec: &MicrostateSpaceSpec, budget: Option<usize>) -> Result<FiniteModel> {
    let support = spec.support();
    let group = spec.sys.group();
    if group.is_integers() && !spec.sys.is_full() {
        let xs: Vec<i64> = support
            .iter()
            .map(|g| match g {
                GroupElement::Lattice(v) => v[0],
                _ => unreachable!("Z elements are lattice vectors"),
            })
            .collect();
        let (lo, hi) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
        let window = FiniteWindow::interval(group, lo, hi)?;
        let sft = OneDimSft::new(&spec.sys)?;
        let patterns = sft.words(window.len(), budget)?;
        return Ok(FiniteModel { window, patterns, globally_admissible: true });
    }
    let patterns = PatternEnumerator::new(&spec.sys, &support)?.collect(budget)?;
    Ok(FiniteModel { window: support, patterns, globally_admissible: spec.sys.is_full() })
}

/// Certified members found by exhaustive search within a node budget.
#[derive(Clone, Debug)]
pub struct MemberEnumeration {
    pub members: Vec<Microstate>,
    pub nodes: usize,
    /// the search stopped at the budget
    pub partial: bool,
    pub globally_admissible: bool,
}

/// Depth-first search over assignments `[d] → patterns`, pruned by the
/// partial sums of the certified lower distances, keeping the assignments
/// certified as members.
pub fn enumerate_members(spec: &MicrostateSpaceSpec, budget: usize) -> Result<MemberEnumeration> {
    let model = finite_model(spec, Some(budget))?;
    let p = model.patterns.len();
    let d = spec.d();
    let configs: Vec<Configuration> = model
        .patterns
        .iter()
        .map(|w| Configuration::new(model.window.clone(), w.clone(), 0))
        .collect::<Result<_>>()?;
    if p == 0 {
        return Ok(MemberEnumeration { members: vec![], nodes: 0, partial: false, globally_admissible: model.globally_admissible });
    }
    if p.saturating_mul(p).saturating_mul(spec.f.len()) > MAX_TABLE {
        return Err(Error::TooLarge(format!("{p} model patterns")));
    }
    let tail = spec.pm.truncation_bound().clone();
    // table[s][a][b] = ρ(s·a, b) squared, as (lo, hi)
    let tables: Vec<Vec<(Rational, Rational)>> = spec
        .f
        .iter()
        .map(|s| {
            (0..p * p)
                .into_par_iter()
                .map(|ab| {
                    let (a, b) = (ab / p, ab % p);
                    let iv = widen(spec.pm.eval(&configs[a].act(s), &configs[b]).expect("same group"), &tail);
                    (&iv.lo * &iv.lo, &iv.hi * &iv.hi)
                })
                .collect()
        })
        .collect();
    let perms: Vec<_> = spec.f.iter().map(|s| spec.sigma.permutation(s)).collect();
    // pairs (s, u) whose sites are both assigned once v is
    let mut closing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); d];
    for (i, perm) in perms.iter().enumerate() {
        for u in 0..d {
            closing[u.max(perm.apply(u))].push((i, u));
        }
    }
    let cap = &spec.delta * &spec.delta * int(d as i64);
    let mut state = Search {
        p,
        tables: &tables,
        perms: &perms,
        closing: &closing,
        cap,
        assign: vec![0; d],
        lo: vec![int(0); spec.f.len()],
        hi: vec![int(0); spec.f.len()],
        nodes: 0,
        budget,
        found: Vec::new(),
        partial: false,
    };
    state.dfs(0);
    let members = state
        .found
        .into_iter()
        .map(|a| Microstate::build(a.into_iter().map(|i| configs[i].clone()).collect(), true))
        .collect::<Result<Vec<_>>>()?;
    Ok(MemberEnumeration { members, nodes: state.nodes, partial: state.partial, globally_admissible: model.globally_admissible })
}

struct Search<'a> {
    p: usize,
    tables: &'a [Vec<(Rational, Rational)>],
    perms: &'a [crate::sofic::Permutation],
    closing: &'a [Vec<(usize, usize)>],
    cap: Rational,
    assign: Vec<usize>,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    nodes: usize,
    budget: usize,
    found: Vec<Vec<usize>>,
    partial: bool,
}

impl Search<'_> {
    fn dfs(&mut self, v: usize) {
        if v == self.assign.len() {
            if self.hi.iter().all(|h| *h <= self.cap) {
                self.found.push(self.assign.clone());
            }
            return;
        }
        for a in 0..self.p {
            if self.nodes >= self.budget {
                self.partial = true;
                return;
            }
            self.nodes += 1;
            self.assign[v] = a;
            let saved = (self.lo.clone(), self.hi.clone());
            for &(i, u) in &self.closing[v] {
                let (x, y) = (self.assign[u], self.assign[self.perms[i].apply(u)]);
                let (l, h) = &self.tables[i][x * self.p + y];
                self.lo[i] += l;
                self.hi[i] += h;
            }
            if self.lo.iter().all(|l| *l <= self.cap) {
                self.dfs(v + 1);
            }
            self.lo = saved.0;
            self.hi = saved.1;
            if self.partial {
                return;
            }
        }
    }
}

/// Lower bound on `N_ε(Map, ρ_∞)` with the per-site estimate
/// `log(count)/d` (`None` stands for `-∞` when no member was found).
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedMicrostates {
    pub count: usize,
    pub d: usize,
    pub estimate: Option<LogRatio>,
    pub partial: bool,
    pub method: CountMethod,
    /// candidates examined: labelings or search nodes
    pub examined: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    Pullback,
    Enumeration,
}

/// Full shifts use the pullback family of all labelings `[d] → A` (at most
/// `budget` of them, in lexicographic order); subshifts use
/// [`enumerate_members`]. Members are then counted greedily at every
/// threshold `t ≥ ε` among the distances, keeping the best.
pub fn count_separated_microstates(spec: &MicrostateSpaceSpec, eps: &Rational, budget: usize) -> Result<SeparatedMicrostates> {
    if *eps <= int(0) {
        return Err(Error::OutOfRange("ε must be positive".into()));
    }
    let d = spec.d();
    let (members, partial, method, examined) = if spec.sys.is_full() {
        let k = spec.sys.finite_alphabet()?.size();
        let total = BigUint::from(k).pow(d as u32);
        let take = if total > BigUint::from(budget) { budget } else { usize::try_from(&total).expect("≤ budget") };
        let members: Vec<Microstate> = (0..take)
            .into_par_iter()
            .map(|idx| {
                let omega = labeling(idx, k, d);
                let phi = pullback(spec, &omega)?;
                Ok((is_member(spec, &phi)?.verdict == Verdict::Yes).then_some(phi))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        (members, BigUint::from(take) < total, CountMethod::Pullback, take)
    } else {
        let e = enumerate_members(spec, budget)?;
        (e.members, e.partial, CountMethod::Enumeration, e.nodes)
    };
    let count = separated_count(spec, &members, eps);
    let estimate = (count > 0).then(|| LogRatio::new(BigUint::from(count), d as u64));
    Ok(SeparatedMicrostates { count, d, estimate, partial, method, examined })
}

/// `ω` with `ω(v)` the `v`-th base-`k` digit of `idx`, most significant first.
fn labeling(mut idx: usize, k: usize, d: usize) -> Vec<u32> {
    let mut out = vec![0u32; d];
    for slot in out.iter_mut().rev() {
        *slot = (idx % k) as u32;
        idx /= k;
    }
    out
}

/// Member distances as ranks into the sorted list of distinct values.
/// Points are interned first, so the pseudometric runs once per pair of
/// distinct points rather than once per pair of members and site.
fn ranked_distances(spec: &MicrostateSpaceSpec, members: &[Microstate]) -> (Vec<Vec<u32>>, Vec<Rational>) {
    let mut index: HashMap<(Vec<GroupElement>, Vec<u32>, u32), usize> = HashMap::new();
    let mut distinct: Vec<&Configuration> = Vec::new();
    let ids: Vec<Vec<usize>> = members
        .iter()
        .map(|m| {
            m.points
                .iter()
                .map(|x| {
                    let key = (x.support().elements().to_vec(), x.letters().to_vec(), x.tail());
                    *index.entry(key).or_insert_with(|| {
                        distinct.push(x);
                        distinct.len() - 1
                    })
                })
                .collect()
        })
        .collect();
    let p = distinct.len();
    let table: Vec<Rational> = (0..p * p)
        .into_par_iter()
        .map(|ij| spec.pm.eval(distinct[ij / p], distinct[ij % p]).expect("same group").lo)
        .collect();
    let mut values = table.clone();
    values.push(int(0));
    values.sort();
    values.dedup();
    let ranks: Vec<u32> = table.iter().map(|v| values.binary_search(v).expect("present") as u32).collect();
    let n = members.len();
    let matrix = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 0;
                    }
                    ids[i].iter().zip(&ids[j]).map(|(&a, &b)| ranks[a * p + b]).max().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    (matrix, values)
}

/// Certified lower bounds on `ρ_∞` between members.
pub fn sup_distance_matrix(spec: &MicrostateSpaceSpec, members: &[Microstate]) -> Vec<Vec<Rational>> {
    let (ranks, values) = ranked_distances(spec, members);
    ranks.iter().map(|row| row.iter().map(|&r| values[r as usize].clone()).collect()).collect()
}

fn separated_count(spec: &MicrostateSpaceSpec, members: &[Microstate], eps: &Rational) -> usize {
    if members.len() <= 1 {
        return members.len();
    }
    let (dist, values) = ranked_distances(spec, members);
    // ranks at or above the first value ≥ ε are exactly the distances ≥ ε
    let first = values.partition_point(|v| v < eps) as u32;
    if first as usize == values.len() {
        return 1;
    }
    (first..values.len() as u32).map(|t| separated_greedy(&dist, &t).0).max().unwrap_or(1).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn cyclic_spec(sys: ShiftSystem, f: &str, delta: Rational, d: usize) -> MicrostateSpaceSpec {
        let z = sys.group().clone();
        let f = FiniteWindow::from_words(&z, f).unwrap();
        MicrostateSpaceSpec::new(sys, PseudometricSpec::disc(), f, delta, SoficMap::from_cyclic(&z, d).unwrap()).unwrap()
    }

    #[test]
    fn identity_window_is_always_member() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 3).unwrap();
        let spec = cyclic_spec(sys, "e", int(0), 5);
        let pts = (0..5).map(|v| Configuration::constant(&z, (v % 3) as u32)).collect();
        let phi = Microstate::new(pts).unwrap();
        assert_eq!(is_member(&spec, &phi).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn fixed_points_and_defects() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 2).unwrap();
        let spec = cyclic_spec(sys.clone(), "x,X,xx", int(0), 6);
        let phi = Microstate::constant(Configuration::constant(&z, 1), 6).unwrap();
        let m = is_member(&spec, &phi).unwrap();
        assert_eq!(m.verdict, Verdict::Yes);
        assert_eq!(m.margin, int(0));
        // one site disagrees with its neighbours
        let mut pts = vec![Configuration::constant(&z, 0); 6];
        pts[2] = Configuration::constant(&z, 1);
        let phi = Microstate::new(pts).unwrap();
        assert_eq!(is_member(&spec, &phi).unwrap().verdict, Verdict::No);
        let loose = cyclic_spec(sys, "x", int(1), 6);
        assert_eq!(is_member(&loose, &phi).unwrap().verdict, Verdict::Yes);
        // ρ_2^2 = 2/6 for s = x
        assert_eq!(is_member(&loose, &phi).unwrap().defects[0].rho2_squared, Interval::exact(ratio(1, 3)));
    }

    #[test]
    fn pullbacks_are_members() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 2).unwrap();
        let spec = cyclic_spec(sys.clone(), "x,X,xxx", int(0), 7);
        for idx in 0..(1 << 7) {
            let omega = labeling(idx, 2, 7);
            let phi = pullback(&spec, &omega).unwrap();
            assert_eq!(is_member(&spec, &phi).unwrap().verdict, Verdict::Yes);
            assert!(phi.points().iter().zip(&omega).all(|(x, &a)| x.letter(&z.identity()) == a));
        }
        let c = pullback(&spec, &[1; 7]).unwrap();
        assert!(c.points().iter().all(|x| x.letters().iter().all(|&a| a == 1)));
        assert!(pullback(&spec, &[2; 7]).is_err());
        assert!(pullback(&spec, &[0; 6]).is_err());
        let gm = ShiftSystem::golden_mean();
        assert!(pullback(&cyclic_spec(gm, "x", int(0), 7), &[0; 7]).is_err());
    }

    #[test]
    fn induced_pullback_is_undecided_at_zero() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 2).unwrap();
        let f = FiniteWindow::from_words(&z, "x").unwrap();
        let sigma = SoficMap::from_cyclic(&z, 5).unwrap();
        let spec = MicrostateSpaceSpec::new(sys.clone(), PseudometricSpec::induced(3), f.clone(), int(0), sigma.clone()).unwrap();
        let phi = pullback(&spec, &[0, 1, 1, 0, 1]).unwrap();
        assert_eq!(is_member(&spec, &phi).unwrap().verdict, Verdict::Undecided);
        // the omitted tail weighs 1/8
        let spec = MicrostateSpaceSpec::new(sys, PseudometricSpec::induced(3), f, ratio(1, 8), sigma).unwrap();
        assert_eq!(is_member(&spec, &phi).unwrap().verdict, Verdict::Yes);
    }

    #[test]
    fn lemma_holds_on_members() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 2).unwrap();
        let spec = cyclic_spec(sys, "x", ratio(1, 2), 8);
        let mut pts = vec![Configuration::constant(&z, 0); 8];
        pts[3] = Configuration::constant(&z, 1);
        let phi = Microstate::new(pts).unwrap();
        // ρ_2^2 = 2/8 ≤ 1/4
        let check = map_lowerbound_check(&spec, &phi).unwrap();
        assert_eq!(check.verdict, Verdict::Yes);
        assert_eq!(check.rows[0].certain, 6);
        let tight = cyclic_spec(ShiftSystem::full_shift(&z, 2).unwrap(), "x", ratio(1, 10), 8);
        assert!(map_lowerbound_check(&tight, &phi).is_err());
    }

    #[test]
    fn full_shift_pullback_count() {
        let z = Group::integers();
        for d in 1..=8 {
            let spec = cyclic_spec(ShiftSystem::full_shift(&z, 2).unwrap(), "x", int(0), d);
            let c = count_separated_microstates(&spec, &int(1), 1 << 12).unwrap();
            assert_eq!(c.count, 1 << d);
            assert_eq!(c.estimate, Some(LogRatio::new(BigUint::from(2u32), 1)));
            assert!(!c.partial);
        }
        let spec = cyclic_spec(ShiftSystem::full_shift(&z, 2).unwrap(), "x", int(0), 8);
        let c = count_separated_microstates(&spec, &int(1), 100).unwrap();
        assert!(c.partial && c.count == 100);
    }

    #[test]
    fn empty_map_on_odd_cycle() {
        let sys = ShiftSystem::one_dim_sft(2, &[&[0, 0], &[1, 1]]).unwrap();
        for d in [3, 5, 7] {
            let spec = cyclic_spec(sys.clone(), "x", int(0), d);
            let c = count_separated_microstates(&spec, &int(1), 1 << 16).unwrap();
            assert_eq!(c.count, 0);
            assert_eq!(c.estimate, None);
            assert!(!c.partial);
        }
        let spec = cyclic_spec(sys, "x", int(0), 4);
        assert_eq!(count_separated_microstates(&spec, &int(1), 1 << 16).unwrap().count, 2);
    }

    #[test]
    fn single_site_counts_the_model() {
        let gm = ShiftSystem::golden_mean();
        let spec = cyclic_spec(gm, "e", int(0), 1);
        let c = count_separated_microstates(&spec, &int(1), 1000).unwrap();
        assert_eq!(c.count, 2);
        let z = Group::integers();
        let spec = cyclic_spec(ShiftSystem::full_shift(&z, 3).unwrap(), "e", int(0), 1);
        assert_eq!(count_separated_microstates(&spec, &int(1), 1000).unwrap().count, 3);
    }

    #[test]
    fn golden_mean_enumeration() {
        let gm = ShiftSystem::golden_mean();
        let spec = cyclic_spec(gm, "x", int(0), 6);
        let e = enumerate_members(&spec, 1 << 20).unwrap();
        assert!(e.globally_admissible && !e.partial);
        // exact members are the pullbacks of cyclic golden-mean words
        assert_eq!(e.members.len(), 18);
        for phi in &e.members {
            assert_eq!(is_member(&spec, phi).unwrap().verdict, Verdict::Yes);
        }
    }

    #[test]
    fn monotone_in_delta_and_budget() {
        let gm = ShiftSystem::golden_mean();
        let mut prev = 0;
        for delta in [int(0), ratio(1, 3), ratio(2, 3), int(1)] {
            let spec = cyclic_spec(gm.clone(), "x", delta, 4);
            let n = enumerate_members(&spec, 1 << 20).unwrap().members.len();
            assert!(n >= prev);
            prev = n;
        }
        let spec = cyclic_spec(gm, "x", ratio(2, 3), 5);
        let counts: Vec<usize> =
            [10, 100, 1000, 100_000].iter().map(|&b| count_separated_microstates(&spec, &int(1), b).unwrap().count).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }

    #[test]
    fn records_round_trip() {
        let z = Group::integers();
        let spec = cyclic_spec(ShiftSystem::full_shift(&z, 2).unwrap(), "x", int(0), 4);
        let phi = pullback(&spec, &[0, 1, 1, 0]).unwrap();
        let back = Microstate::from_record(&z, &phi.to_record()).unwrap();
        assert!(back.is_truncated());
        assert!(back.points().iter().zip(phi.points()).all(|(a, b)| a.same_point(b)));
    }
}
