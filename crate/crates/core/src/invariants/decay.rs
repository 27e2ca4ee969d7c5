use super::entropy::{naive_eps_entropy, window_count};
use super::WindowFamily;
use crate::error::{Error, Result};
use crate::group::FiniteWindow;
use crate::rational::{fmt_rational, int, to_f64, LogRatio, Rational};
use crate::spaces::{Base, ShiftSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRow {
    pub eps: Rational,
    /// upper bound on `h_ε^nv / |log ε|`
    pub entropy_ratio: f64,
    /// `log N_ε(X, ρ) / |log ε|` (from an upper bound on `N_ε`)
    pub count_ratio: f64,
    pub product: f64,
    pub entropy_upper: LogRatio,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayTable {
    /// rows ordered by decreasing `ε`
    pub rows: Vec<DecayRow>,
    pub trending_to_zero: bool,
}

/// The sequence `(h_ε^nv / |log ε|) · (log N_ε / |log ε|)` along a grid of
/// `ε ∈ (0, 1)`. The trend flag is set when the products vanish, or when the
/// last product is at most the first and below half the largest.
pub fn decay_diagnostic(sys: &ShiftSystem, base: &Base, grid: &[Rational], fam: &WindowFamily) -> Result<DecayTable> {
    if grid.is_empty() {
        return Err(Error::OutOfRange("empty ε grid".into()));
    }
    if let Some(bad) = grid.iter().find(|e| **e <= int(0) || **e >= int(1)) {
        return Err(Error::OutOfRange(format!("ε = {} is outside (0, 1)", fmt_rational(bad))));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| b.cmp(a));
    grid.dedup();
    let e = FiniteWindow::identity(sys.group());
    let rows = grid
        .into_iter()
        .map(|eps| {
            let h = naive_eps_entropy(sys, base, &eps, fam)?.upper;
            let n = window_count(sys, base, &eps, &e)?.count;
            let log_eps = to_f64(&eps).ln().abs();
            let entropy_ratio = h.value() / log_eps;
            let count_ratio = LogRatio::new(n, 1).value() / log_eps;
            Ok(DecayRow { eps, entropy_ratio, count_ratio, product: entropy_ratio * count_ratio, entropy_upper: h })
        })
        .collect::<Result<Vec<_>>>()?;
    let products: Vec<f64> = rows.iter().map(|r| r.product).collect();
    let (first, last) = (products[0], *products.last().unwrap());
    let max = products.iter().cloned().fold(0.0, f64::max);
    let trending_to_zero = max == 0.0 || (last <= first && last < 0.5 * max);
    Ok(DecayTable { rows, trending_to_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::rational::ratio;

    fn grid() -> Vec<Rational> {
        (1..=8).map(|k| ratio(1, 1 << k)).collect()
    }

    #[test]
    fn one_point_system_is_zero() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 1).unwrap();
        let fam = WindowFamily::intervals(&z, 1, 4).unwrap();
        let t = decay_diagnostic(&sys, &Base::Disc, &grid(), &fam).unwrap();
        assert!(t.rows.iter().all(|r| r.product == 0.0));
        assert!(t.trending_to_zero);
    }

    #[test]
    fn coordinate_pseudometric_decays() {
        let z = Group::integers();
        let sys = ShiftSystem::full_shift(&z, 3).unwrap();
        let fam = WindowFamily::intervals(&z, 1, 6).unwrap();
        let t = decay_diagnostic(&sys, &Base::Disc, &grid(), &fam).unwrap();
        let products: Vec<f64> = t.rows.iter().map(|r| r.product).collect();
        assert!(products.windows(2).all(|w| w[1] < w[0]));
        assert!(t.trending_to_zero);
        assert!(t.rows.iter().all(|r| r.count_ratio * to_f64(&r.eps).ln().abs() <= 3f64.ln() + 1e-12));
    }

    #[test]
    fn grid_validation() {
        let gm = ShiftSystem::golden_mean();
        let fam = WindowFamily::intervals(gm.group(), 1, 3).unwrap();
        assert!(decay_diagnostic(&gm, &Base::Disc, &[int(1)], &fam).is_err());
        assert!(decay_diagnostic(&gm, &Base::Disc, &[], &fam).is_err());
    }

    #[test]
    fn induced_metric_runs() {
        let gm = ShiftSystem::golden_mean();
        let fam = WindowFamily::intervals(gm.group(), 1, 8).unwrap();
        let t = decay_diagnostic(&gm, &Base::Induced { depth: 8 }, &grid()[..5], &fam).unwrap();
        assert_eq!(t.rows.len(), 5);
        assert!(t.rows.iter().all(|r| r.product.is_finite() && r.product >= 0.0));
    }
}
