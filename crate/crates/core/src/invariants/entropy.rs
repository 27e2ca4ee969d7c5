use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Pow, Zero};
use rayon::prelude::*;

use super::separated::{separated_exact, EXHAUSTIVE_LIMIT};
use super::{Bracket, WindowFamily, WindowValue};
use crate::error::{Error, Result};
use crate::group::{FiniteWindow, GroupElement};
use crate::rational::{int, LogRatio, Rational};
use crate::spaces::{Base, OneDimSft, PatternEnumerator, ShiftSystem};

/// How a window count was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CountMethod {
    /// `k^|C|` on a full shift
    FullShift,
    /// globally admissible words from the transfer graph
    Global,
    /// locally admissible patterns; an upper bound on the global count
    Local,
    /// exact maximum separated set among the enumerated patterns
    Separated,
    /// `ε` exceeds every distance, so one point suffices
    Trivial,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::FullShift => "full-shift",
            CountMethod::Global => "global",
            CountMethod::Local => "local",
            CountMethod::Separated => "separated",
            CountMethod::Trivial => "trivial",
        })
    }
}

/// An upper bound (exact for full shifts and global counts below the minimal
/// letter gap) on `N_ε(X, ρ_F)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowCount {
    pub count: BigUint,
    /// number of coordinates `|C|` the count ranges over
    pub coordinates: usize,
    pub method: CountMethod,
    pub exact: bool,
}

/// Smallest `N ≥ 0` with `diam · 2^{-N} < ε`.
pub fn induced_depth(diam: &Rational, eps: &Rational) -> usize {
    let mut n = 0;
    let mut tail = diam.clone();
    while tail >= *eps {
        tail /= int(2);
        n += 1;
    }
    n
}

fn lattice_coord(g: &GroupElement) -> Option<i64> {
    match g {
        GroupElement::Lattice(v) if v.len() == 1 => Some(v[0]),
        _ => None,
    }
}

/// Whether `C` is a contiguous interval of `Z`.
fn is_interval(c: &FiniteWindow) -> bool {
    if !c.group().is_integers() {
        return false;
    }
    let xs: Vec<i64> = c.iter().map(|g| lattice_coord(g).unwrap()).collect();
    let (lo, hi) = (*xs.iter().min().unwrap(), *xs.iter().max().unwrap());
    (hi - lo + 1) as usize == xs.len()
}

/// The coordinates read by `ρ_F`: `F^{-1}` for the coordinate pseudometric,
/// `F^{-1} · {s_1..s_N}` for the induced metric with `N` from `ε`. `None`
/// when no coordinate matters.
pub fn coordinate_window(sys: &ShiftSystem, base: &Base, eps: &Rational, f: &FiniteWindow) -> Result<Option<FiniteWindow>> {
    let alphabet = sys.finite_alphabet()?;
    let group = sys.group();
    match base {
        Base::Disc => Ok(Some(f.inverse())),
        Base::Induced { .. } => {
            let n = induced_depth(&alphabet.diam(), eps);
            if n == 0 {
                return Ok(None);
            }
            let coords = FiniteWindow::new(group.clone(), group.first_elements(n))?;
            Ok(Some(FiniteWindow::product(&f.inverse(), &coords)?))
        }
    }
}

enum Source {
    Full(usize),
    Global(OneDimSft),
    Local(FiniteWindow),
}

impl Source {
    fn pick(sys: &ShiftSystem, c: &FiniteWindow) -> Result<Source> {
        if sys.is_full() {
            return Ok(Source::Full(sys.finite_alphabet()?.size()));
        }
        if is_interval(c) {
            if let Ok(t) = OneDimSft::new(sys) {
                return Ok(Source::Global(t));
            }
        }
        Ok(Source::Local(c.clone()))
    }

    fn count(&self, sys: &ShiftSystem, len: usize) -> Result<(BigUint, CountMethod)> {
        Ok(match self {
            Source::Full(k) => (Pow::pow(BigUint::from(*k), len), CountMethod::FullShift),
            Source::Global(t) => (t.count_words(len), CountMethod::Global),
            Source::Local(c) => (PatternEnumerator::new(sys, c)?.count(), CountMethod::Local),
        })
    }

    fn patterns(&self, sys: &ShiftSystem, c: &FiniteWindow) -> Result<Vec<Vec<u32>>> {
        match self {
            Source::Global(t) => t.words(c.len(), Some(EXHAUSTIVE_LIMIT)),
            Source::Full(_) | Source::Local(_) => PatternEnumerator::new(sys, c)?.collect(Some(EXHAUSTIVE_LIMIT)),
        }
    }
}

/// Upper bound on `N_ε(X, ρ_F)` for the base pseudometric `base`: points
/// agreeing on the coordinate window are within `ε`, so admissible
/// patterns there dominate every separated set.
pub fn window_count(sys: &ShiftSystem, base: &Base, eps: &Rational, f: &FiniteWindow) -> Result<WindowCount> {
    if *eps <= int(0) {
        return Err(Error::OutOfRange("ε must be positive".into()));
    }
    if f.group() != sys.group() {
        return Err(Error::MismatchedOwners);
    }
    let alphabet = sys.finite_alphabet()?;
    let trivial = WindowCount { count: BigUint::one(), coordinates: 0, method: CountMethod::Trivial, exact: true };
    let c = match coordinate_window(sys, base, eps, f)? {
        Some(c) => c,
        None => return Ok(trivial),
    };
    if matches!(base, Base::Disc) && *eps > alphabet.diam() {
        return Ok(WindowCount { coordinates: c.len(), ..trivial });
    }
    let source = Source::pick(sys, &c)?;
    let (count, method) = source.count(sys, c.len())?;
    if count.is_zero() {
        return Err(Error::Precondition("the subshift has no admissible pattern on this window".into()));
    }
    let below_gap = alphabet.min_gap().is_none_or(|g| *eps <= g);
    if let Base::Disc = base {
        if below_gap {
            let exact = method != CountMethod::Local;
            return Ok(WindowCount { count, coordinates: c.len(), method, exact });
        }
        if count <= BigUint::from(EXHAUSTIVE_LIMIT) {
            let pats = source.patterns(sys, &c)?;
            let dist: Vec<Vec<Rational>> = pats
                .iter()
                .map(|p| {
                    pats.iter()
                        .map(|q| p.iter().zip(q).map(|(&a, &b)| alphabet.dist(a, b).clone()).max().unwrap_or_else(|| int(0)))
                        .collect()
                })
                .collect();
            let n = separated_exact(&dist, eps)?;
            let exact = method != CountMethod::Local;
            return Ok(WindowCount {
                count: BigUint::from(n),
                coordinates: c.len(),
                method: CountMethod::Separated,
                exact,
            });
        }
    }
    Ok(WindowCount { count, coordinates: c.len(), method, exact: false })
}

/// Bracket on `h_ε^nv = inf_F log N_ε(X, ρ_F) / |F|`. The upper bound is the
/// minimum over the family; the lower bound is `log k` for full shifts under
/// the coordinate pseudometric with `ε` at most the smallest letter gap
/// (where every window gives exactly `k^|F|`), and `0` otherwise.
pub fn naive_eps_entropy(sys: &ShiftSystem, base: &Base, eps: &Rational, fam: &WindowFamily) -> Result<Bracket<LogRatio>> {
    if fam.group() != sys.group() {
        return Err(Error::MismatchedOwners);
    }
    let alphabet = sys.finite_alphabet()?;
    let rows = fam
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(label, f)| {
            let wc = window_count(sys, base, eps, f)?;
            Ok(WindowValue {
                window: label.to_string(),
                size: f.len(),
                value: LogRatio::new(wc.count.clone(), f.len() as u64),
                note: format!("N={} over {} coordinates ({})", wc.count, wc.coordinates, wc.method),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let below_gap = alphabet.min_gap().is_none_or(|g| *eps <= g);
    let (lower, why) = if sys.is_full() && matches!(base, Base::Disc) && below_gap {
        (LogRatio::new(BigUint::from(alphabet.size()), 1), "full shift: N = k^|F| on every window")
    } else {
        (LogRatio::zero(), "no closed-form lower bound")
    };
    Ok(Bracket::from_rows(rows, lower, why))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::rational::ratio;
    use crate::spaces::{Alphabet, Constraint, FiniteAlphabet};

    #[test]
    fn full_shift_entropy_is_exact() {
        let z = Group::integers();
        for k in [2usize, 3, 5] {
            let sys = ShiftSystem::full_shift(&z, k).unwrap();
            let fam = WindowFamily::intervals(&z, 1, 10).unwrap();
            let b = naive_eps_entropy(&sys, &Base::Disc, &int(1), &fam).unwrap();
            assert_eq!(b.lower, b.upper);
            assert_eq!(b.upper, LogRatio::new(BigUint::from(k), 1));
        }
    }

    #[test]
    fn golden_mean_upper_bound() {
        let gm = ShiftSystem::golden_mean();
        let fam = WindowFamily::intervals(gm.group(), 1, 16).unwrap();
        let b = naive_eps_entropy(&gm, &Base::Disc, &ratio(1, 2), &fam).unwrap();
        assert_eq!(b.upper, LogRatio::new(BigUint::from(2584u32), 16));
        assert_eq!(b.upper_witness, "interval:16");
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((b.upper.value() - phi.ln()).abs() < 0.02);
        assert_eq!(b.lower, LogRatio::zero());
    }

    #[test]
    fn one_point_system() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 1).unwrap();
        let fam = WindowFamily::intervals(&z, 1, 5).unwrap();
        let b = naive_eps_entropy(&sys, &Base::Disc, &ratio(1, 3), &fam).unwrap();
        assert_eq!((b.lower.value(), b.upper.value()), (0.0, 0.0));
    }

    #[test]
    fn large_eps_collapses() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 3).unwrap();
        let f = FiniteWindow::interval(&z, 0, 3).unwrap();
        let wc = window_count(&sys, &Base::Disc, &int(2), &f).unwrap();
        assert_eq!(wc.count, BigUint::one());
        let wc = window_count(&sys, &Base::Induced { depth: 1 }, &int(2), &f).unwrap();
        assert_eq!((wc.count, wc.method), (BigUint::one(), CountMethod::Trivial));
    }

    #[test]
    fn intermediate_eps_uses_separation() {
        // letters 0, 1/2, 1 on a line: at ε = 3/4 only {0, 1} separate per site
        let z = Group::integers();
        let a = FiniteAlphabet::on_line(&[int(0), ratio(1, 2), int(1)]).unwrap();
        let sys = ShiftSystem::new(Alphabet::Finite(a), z.clone(), Constraint::Full).unwrap();
        let f = FiniteWindow::interval(&z, 0, 1).unwrap();
        let wc = window_count(&sys, &Base::Disc, &ratio(3, 4), &f).unwrap();
        assert_eq!(wc.method, CountMethod::Separated);
        assert_eq!(wc.count, BigUint::from(4u32));
    }

    #[test]
    fn induced_depth_is_strict() {
        assert_eq!(induced_depth(&int(1), &ratio(1, 10)), 4);
        assert_eq!(induced_depth(&int(1), &int(1)), 1);
        assert_eq!(induced_depth(&int(1), &ratio(3, 2)), 0);
    }

    #[test]
    fn adding_windows_never_raises_the_upper_bound() {
        let gm = ShiftSystem::golden_mean();
        let z = gm.group().clone();
        let base = WindowFamily::intervals(&z, 1, 6).unwrap();
        let more = base.extended(&WindowFamily::intervals(&z, 10, 12).unwrap()).unwrap();
        let a = naive_eps_entropy(&gm, &Base::Disc, &int(1), &base).unwrap();
        let b = naive_eps_entropy(&gm, &Base::Disc, &int(1), &more).unwrap();
        assert!(b.upper <= a.upper);
    }
}
