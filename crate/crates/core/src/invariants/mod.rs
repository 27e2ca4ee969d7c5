//! Window-infimum invariants reported as brackets over a declared family of
//! windows.

use std::fmt;

use crate::error::{Error, Result};
use crate::group::{FiniteWindow, Group};

pub mod decay;
pub mod entropy;
pub mod mdim;
pub mod ocap;
pub mod separated;

pub use decay::{decay_diagnostic, DecayRow, DecayTable};
pub use entropy::{naive_eps_entropy, window_count, CountMethod, WindowCount};
pub use mdim::{amplification, naive_mdim_bracket, stabdim, wdim_bracket, WdimOptions};
pub use ocap::{orbit_capacity, CylinderSet};
pub use separated::{separated_exact, separated_exact_with_limit, separated_greedy, EXHAUSTIVE_LIMIT};

/// An ordered, nonempty list of windows of one group.
#[derive(Clone, Debug)]
pub struct WindowFamily {
    windows: Vec<FiniteWindow>,
    labels: Vec<String>,
}

impl WindowFamily {
    pub fn new(windows: Vec<(String, FiniteWindow)>) -> Result<WindowFamily> {
        let first = windows.first().ok_or(Error::EmptyWindow)?;
        let group = first.1.group().clone();
        if windows.iter().any(|(_, w)| *w.group() != group) {
            return Err(Error::MismatchedOwners);
        }
        let (labels, windows) = windows.into_iter().unzip();
        Ok(WindowFamily { windows, labels })
    }

    /// Intervals `{0, ..., n-1}` of `Z` for `n` in `lo..=hi`.
    pub fn intervals(group: &Group, lo: usize, hi: usize) -> Result<WindowFamily> {
        let ws = (lo.max(1)..=hi)
            .map(|n| Ok((format!("interval:{n}"), FiniteWindow::interval(group, 0, n as i64 - 1)?)))
            .collect::<Result<Vec<_>>>()?;
        WindowFamily::new(ws)
    }

    pub fn balls(group: &Group, lo: usize, hi: usize) -> Result<WindowFamily> {
        WindowFamily::new((lo..=hi).map(|r| (format!("ball:{r}"), group.ball(r))).collect())
    }

    pub fn boxes(group: &Group, lo: usize, hi: usize) -> Result<WindowFamily> {
        let ws = (lo.max(1)..=hi)
            .map(|n| Ok((format!("box:{n}"), FiniteWindow::lattice_box(group, n)?)))
            .collect::<Result<Vec<_>>>()?;
        WindowFamily::new(ws)
    }

    /// Parses `intervals:A..B`, `balls:A..B`, `boxes:A..B` or a `;`-separated
    /// list of window descriptors.
    pub fn parse(group: &Group, text: &str) -> Result<WindowFamily> {
        let bad = || Error::InvalidWindow(format!("cannot parse window family `{text}`"));
        if let Some((kind, range)) = text.trim().split_once(':') {
            if let Some((a, b)) = range.split_once("..") {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().parse().map_err(|_| bad())?;
                match kind.trim() {
                    "intervals" => return WindowFamily::intervals(group, a, b),
                    "balls" => return WindowFamily::balls(group, a, b),
                    "boxes" => return WindowFamily::boxes(group, a, b),
                    _ => {}
                }
            }
        }
        let ws = text
            .split(';')
            .map(|w| Ok((w.trim().to_string(), FiniteWindow::parse(group, w)?)))
            .collect::<Result<Vec<_>>>()?;
        WindowFamily::new(ws)
    }

    pub fn group(&self) -> &Group {
        self.windows[0].group()
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FiniteWindow)> {
        self.labels.iter().map(String::as_str).zip(&self.windows)
    }

    pub fn windows(&self) -> &[FiniteWindow] {
        &self.windows
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// This family followed by the windows of `other`.
    pub fn extended(&self, other: &WindowFamily) -> Result<WindowFamily> {
        let mut ws: Vec<(String, FiniteWindow)> = self.labels.iter().cloned().zip(self.windows.iter().cloned()).collect();
        ws.extend(other.labels.iter().cloned().zip(other.windows.iter().cloned()));
        WindowFamily::new(ws)
    }
}

/// A value computed on one window of the family.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowValue<T> {
    pub window: String,
    pub size: usize,
    pub value: T,
    pub note: String,
}

/// Certified `lower ≤ inf_F ... ≤ upper` with the window attaining the upper
/// bound and the argument behind the lower bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Bracket<T> {
    pub lower: T,
    pub upper: T,
    pub upper_witness: String,
    pub lower_witness: String,
    pub rows: Vec<WindowValue<T>>,
}

impl<T: PartialOrd + Clone> Bracket<T> {
    /// Takes the minimum over rows as the upper bound.
    pub fn from_rows(rows: Vec<WindowValue<T>>, lower: T, lower_witness: impl Into<String>) -> Bracket<T> {
        let best = rows
            .iter()
            .enumerate()
            .fold(0, |b, (i, r)| if r.value < rows[b].value { i } else { b });
        Bracket {
            upper: rows[best].value.clone(),
            upper_witness: rows[best].window.clone(),
            lower,
            lower_witness: lower_witness.into(),
            rows,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lower <= self.upper
    }

    pub fn contains(&self, v: &T) -> bool {
        &self.lower <= v && v <= &self.upper
    }
}

impl<T: fmt::Display> fmt::Display for Bracket<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, Rational};

    #[test]
    fn families() {
        let z = Group::integers();
        let fam = WindowFamily::parse(&z, "intervals:1..10").unwrap();
        assert_eq!(fam.len(), 10);
        assert_eq!(fam.windows()[9].len(), 10);
        let f2 = Group::free(2).unwrap();
        let balls = WindowFamily::parse(&f2, "balls:0..3").unwrap();
        assert_eq!(balls.windows().iter().map(|w| w.len()).collect::<Vec<_>>(), vec![1, 5, 17, 53]);
        let custom = WindowFamily::parse(&f2, "ball:1; words:e,ab").unwrap();
        assert_eq!(custom.labels(), &["ball:1".to_string(), "words:e,ab".to_string()]);
        assert!(WindowFamily::new(vec![]).is_err());
        let mixed = vec![("a".into(), z.ball(1)), ("b".into(), f2.ball(1))];
        assert!(WindowFamily::new(mixed).is_err());
    }

    #[test]
    fn bracket_from_rows() {
        let rows: Vec<WindowValue<Rational>> = [3, 1, 2]
            .iter()
            .enumerate()
            .map(|(i, &v)| WindowValue { window: format!("w{i}"), size: 1, value: int(v), note: String::new() })
            .collect();
        let b = Bracket::from_rows(rows, int(0), "none");
        assert_eq!(b.upper, int(1));
        assert_eq!(b.upper_witness, "w1");
        assert!(b.is_valid() && b.contains(&int(1)));
    }
}
