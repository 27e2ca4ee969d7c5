use num_bigint::BigInt;
use rayon::prelude::*;

use super::entropy::induced_depth;
use super::{Bracket, WindowFamily, WindowValue};
use crate::error::{Error, Result};
use crate::group::FiniteWindow;
use crate::rational::{fmt_rational, int, Rational};
use crate::spaces::{Alphabet, ShiftSystem};

#[derive(Clone, Debug, Default)]
pub struct WdimOptions {
    /// Threshold below which the linear lower bound is claimed; defaults to
    /// a quarter of the alphabet diameter.
    pub eps0: Option<Rational>,
    /// Use slope `m` instead of `m - 1` for sup-metric cubes. This rests on
    /// an external result and is reported as an assumption.
    pub refinement: bool,
}

impl WdimOptions {
    pub fn threshold(&self, alphabet: &Alphabet) -> Rational {
        self.eps0.clone().unwrap_or_else(|| alphabet.diam() / int(4))
    }
}

/// Bounds on `Wdim_ε(X, ρ̃_F)` for one window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WdimBound {
    pub lower: usize,
    pub upper: usize,
    /// truncation depth `N` of the certified embedding
    pub depth: usize,
    /// `|F^{-1} · {s_1..s_N}|`
    pub coordinates: usize,
    pub lower_note: String,
}

fn slope(alphabet: &Alphabet, eps: &Rational, opts: &WdimOptions) -> (usize, String) {
    match alphabet {
        Alphabet::Cube { dim } => {
            let eps0 = opts.threshold(alphabet);
            if *eps >= eps0 {
                (0, format!("ε ≥ ε0 = {}: lower bound hypothesis fails", fmt_rational(&eps0)))
            } else if opts.refinement {
                (*dim, "slope m for sup-metric cubes (external assumption)".into())
            } else {
                (dim - 1, "slope m-1 from the cube lemma".into())
            }
        }
        Alphabet::Finite(_) => (0, "finite alphabet: Wdim is 0".into()),
        Alphabet::Product(_) => (0, "no lower bound for product alphabets".into()),
    }
}

/// Upper bound `m · |F^{-1} S_N|` from projecting onto the coordinates whose
/// omitted series weight `diam · 2^{-N}` is below `ε` (a certified
/// `(ε, ρ̃_F)`-embedding), and the linear lower bound `|F| · slope`.
pub fn wdim_bracket(sys: &ShiftSystem, eps: &Rational, f: &FiniteWindow, opts: &WdimOptions) -> Result<WdimBound> {
    if *eps <= int(0) {
        return Err(Error::OutOfRange("ε must be positive".into()));
    }
    if f.group() != sys.group() {
        return Err(Error::MismatchedOwners);
    }
    let alphabet = sys.alphabet();
    if !sys.is_full() && !alphabet.is_finite() {
        return Err(Error::UnsupportedAlphabet("subshifts over continua are not supported".into()));
    }
    let m = alphabet.dim();
    let depth = induced_depth(&alphabet.diam(), eps);
    let coordinates = if depth == 0 {
        0
    } else {
        let group = sys.group();
        let coords = FiniteWindow::new(group.clone(), group.first_elements(depth))?;
        FiniteWindow::product(&f.inverse(), &coords)?.len()
    };
    let (s, lower_note) = slope(alphabet, eps, opts);
    Ok(WdimBound { lower: f.len() * s, upper: m * coordinates, depth, coordinates, lower_note })
}

/// Bracket on `mdim_ε^nv`. The upper bound is the minimum of
/// `wdim upper / |F|` over the family; the lower bound is the closed-form
/// infimum of the linear lower functional over all windows.
pub fn naive_mdim_bracket(
    sys: &ShiftSystem,
    eps: &Rational,
    fam: &WindowFamily,
    opts: &WdimOptions,
) -> Result<Bracket<Rational>> {
    if fam.group() != sys.group() {
        return Err(Error::MismatchedOwners);
    }
    let rows = fam
        .iter()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(label, f)| {
            let w = wdim_bracket(sys, eps, f, opts)?;
            Ok(WindowValue {
                window: label.to_string(),
                size: f.len(),
                value: Rational::new(BigInt::from(w.upper), BigInt::from(f.len())),
                note: format!("N={} coordinates={} lower={}", w.depth, w.coordinates, w.lower),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (s, note) = slope(sys.alphabet(), eps, opts);
    Ok(Bracket::from_rows(rows, int(s as i64), note))
}

/// `inf_n dim(K^n) / n`, which is `dim K` for cubes, finite sets and their
/// products.
pub fn stabdim(alphabet: &Alphabet) -> Rational {
    int(alphabet.dim() as i64)
}

/// `min_{F ∈ fam} |SF| / |F|` with the attaining window.
pub fn amplification(s: &FiniteWindow, fam: &WindowFamily) -> Result<Bracket<Rational>> {
    let rows = fam
        .iter()
        .map(|(label, f)| {
            let sf = FiniteWindow::product(s, f)?;
            Ok(WindowValue {
                window: label.to_string(),
                size: f.len(),
                value: Rational::new(BigInt::from(sf.len()), BigInt::from(f.len())),
                note: format!("|SF|={}", sf.len()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // |SF| ≥ |F| whenever S is nonempty, so 1 is always a lower bound
    Ok(Bracket::from_rows(rows, int(1), "|SF| ≥ |F|"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::rational::ratio;

    #[test]
    fn cube_over_z() {
        let z = Group::integers();
        let sys = ShiftSystem::cube_shift(&z, 2).unwrap();
        let opts = WdimOptions::default();
        for n in [1usize, 5, 50] {
            let f = FiniteWindow::interval(&z, 0, n as i64 - 1).unwrap();
            let w = wdim_bracket(&sys, &ratio(1, 10), &f, &opts).unwrap();
            assert_eq!(w.depth, 4);
            assert_eq!(w.upper, 2 * (n + 3));
            assert_eq!(w.lower, n);
        }
        let fam = WindowFamily::intervals(&z, 1, 50).unwrap();
        let b = naive_mdim_bracket(&sys, &ratio(1, 10), &fam, &opts).unwrap();
        assert_eq!(b.lower, int(1));
        assert_eq!(b.upper, ratio(2 * 53, 50));
        assert!(b.contains(&stabdim(sys.alphabet())));
    }

    #[test]
    fn lower_slope() {
        let z = Group::integers();
        let sys = ShiftSystem::cube_shift(&z, 3).unwrap();
        let f = FiniteWindow::interval(&z, 0, 9).unwrap();
        let w = wdim_bracket(&sys, &ratio(1, 10), &f, &WdimOptions::default()).unwrap();
        assert_eq!(w.lower, 20);
        let refined = WdimOptions { refinement: true, ..Default::default() };
        assert_eq!(wdim_bracket(&sys, &ratio(1, 10), &f, &refined).unwrap().lower, 30);
        let coarse = wdim_bracket(&sys, &ratio(1, 2), &f, &WdimOptions::default()).unwrap();
        assert_eq!(coarse.lower, 0);
    }

    #[test]
    fn large_eps_embeds_into_a_point() {
        let z = Group::integers();
        let sys = ShiftSystem::cube_shift(&z, 1).unwrap();
        let e = FiniteWindow::identity(&z);
        let w = wdim_bracket(&sys, &ratio(3, 2), &e, &WdimOptions::default()).unwrap();
        assert_eq!((w.lower, w.upper), (0, 0));
    }

    #[test]
    fn finite_alphabet_is_zero() {
        let gm = ShiftSystem::golden_mean();
        let fam = WindowFamily::intervals(gm.group(), 1, 10).unwrap();
        let b = naive_mdim_bracket(&gm, &ratio(1, 10), &fam, &WdimOptions::default()).unwrap();
        assert_eq!((b.lower, b.upper), (int(0), int(0)));
    }

    #[test]
    fn stable_dimension() {
        assert_eq!(stabdim(&Alphabet::discrete(5).unwrap()), int(0));
        assert_eq!(stabdim(&Alphabet::cube(2).unwrap()), int(2));
        let p = Alphabet::product(vec![Alphabet::cube(2).unwrap(), Alphabet::discrete(3).unwrap()]).unwrap();
        assert_eq!(stabdim(&p), int(2));
    }

    #[test]
    fn amplification_examples() {
        let f2 = Group::free(2).unwrap();
        let b = amplification(&f2.ball(2), &WindowFamily::balls(&f2, 1, 6).unwrap()).unwrap();
        assert!(b.upper >= int(8));
        let z2 = Group::lattice(2).unwrap();
        let b = amplification(&z2.ball(1), &WindowFamily::boxes(&z2, 1, 30).unwrap()).unwrap();
        assert_eq!(b.upper, ratio(900 + 120, 900));
        assert_eq!(b.upper_witness, "box:30");
        let e = FiniteWindow::identity(&f2);
        assert_eq!(amplification(&e, &WindowFamily::balls(&f2, 0, 3).unwrap()).unwrap().upper, int(1));
    }
}
