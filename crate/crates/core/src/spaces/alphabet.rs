use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{fmt_rational, int, Rational};

/// A finite metric space `{0, ..., k-1}` with an exact rational metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlphabet {
    metric: Vec<Vec<Rational>>,
}

impl FiniteAlphabet {
    /// Validates symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality.
    pub fn new(metric: Vec<Vec<Rational>>) -> Result<FiniteAlphabet> {
        let k = metric.len();
        if k == 0 {
            return Err(Error::InvalidMetric("empty alphabet".into()));
        }
        if metric.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidMetric("metric matrix is not square".into()));
        }
        for a in 0..k {
            if !metric[a][a].is_zero() {
                return Err(Error::InvalidMetric(format!("nonzero diagonal entry at {a}")));
            }
            for b in 0..k {
                if metric[a][b] != metric[b][a] {
                    return Err(Error::InvalidMetric(format!("asymmetric entries at ({a}, {b})")));
                }
                if a != b && metric[a][b] <= int(0) {
                    return Err(Error::InvalidMetric(format!("distance between {a} and {b} is not positive")));
                }
                for c in 0..k {
                    if metric[a][c] > &metric[a][b] + &metric[b][c] {
                        return Err(Error::InvalidMetric(format!(
                            "triangle inequality fails for ({a}, {b}, {c}): {} > {} + {}",
                            fmt_rational(&metric[a][c]),
                            fmt_rational(&metric[a][b]),
                            fmt_rational(&metric[b][c])
                        )));
                    }
                }
            }
        }
        Ok(FiniteAlphabet { metric })
    }

    /// `k` letters at mutual distance 1.
    pub fn discrete(k: usize) -> Result<FiniteAlphabet> {
        let metric = (0..k).map(|a| (0..k).map(|b| int((a != b) as i64)).collect()).collect();
        FiniteAlphabet::new(metric)
    }

    /// Distinct points of the real line with `|a - b|`.
    pub fn on_line(points: &[Rational]) -> Result<FiniteAlphabet> {
        let metric = points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect();
        FiniteAlphabet::new(metric)
    }

    pub fn size(&self) -> usize {
        self.metric.len()
    }

    pub fn dist(&self, a: u32, b: u32) -> &Rational {
        &self.metric[a as usize][b as usize]
    }

    pub fn metric(&self) -> &[Vec<Rational>] {
        &self.metric
    }

    pub fn diam(&self) -> Rational {
        self.metric.iter().flatten().max().cloned().unwrap_or_else(|| int(0))
    }

    /// Smallest positive distance; `None` for a one-letter alphabet.
    pub fn min_gap(&self) -> Option<Rational> {
        self.metric.iter().flatten().filter(|q| !q.is_zero()).min().cloned()
    }
}

/// Alphabets of shift systems: finite metric spaces, cubes `[0,1]^m` with the
/// sup metric (kept symbolic) and finite products of these.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alphabet {
    Finite(FiniteAlphabet),
    Cube { dim: usize },
    Product(Vec<Alphabet>),
}

impl Alphabet {
    pub fn discrete(k: usize) -> Result<Alphabet> {
        Ok(Alphabet::Finite(FiniteAlphabet::discrete(k)?))
    }

    pub fn cube(dim: usize) -> Result<Alphabet> {
        if dim == 0 {
            return Err(Error::UnsupportedAlphabet("cube dimension must be at least 1".into()));
        }
        Ok(Alphabet::Cube { dim })
    }

    pub fn product(factors: Vec<Alphabet>) -> Result<Alphabet> {
        if factors.is_empty() {
            return Err(Error::UnsupportedAlphabet("empty product".into()));
        }
        Ok(Alphabet::Product(factors))
    }

    pub fn as_finite(&self) -> Option<&FiniteAlphabet> {
        match self {
            Alphabet::Finite(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Alphabet::Finite(_) => true,
            Alphabet::Cube { .. } => false,
            Alphabet::Product(fs) => fs.iter().all(Alphabet::is_finite),
        }
    }

    /// Diameter; products carry the sup metric.
    pub fn diam(&self) -> Rational {
        match self {
            Alphabet::Finite(a) => a.diam(),
            Alphabet::Cube { .. } => int(1),
            Alphabet::Product(fs) => fs.iter().map(Alphabet::diam).max().unwrap_or_else(|| int(0)),
        }
    }

    /// Covering dimension: 0 for finite sets, `m` for `[0,1]^m`, additive
    /// over products.
    pub fn dim(&self) -> usize {
        match self {
            Alphabet::Finite(_) => 0,
            Alphabet::Cube { dim } => *dim,
            Alphabet::Product(fs) => fs.iter().map(Alphabet::dim).sum(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Alphabet::Finite(a) => format!("finite:{}", a.size()),
            Alphabet::Cube { dim } => format!("cube:{dim}"),
            Alphabet::Product(fs) => fs.iter().map(Alphabet::describe).collect::<Vec<_>>().join("x"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn validation() {
        assert!(FiniteAlphabet::discrete(3).is_ok());
        assert!(FiniteAlphabet::discrete(0).is_err());
        let bad = vec![vec![int(0), int(1), int(5)], vec![int(1), int(0), int(1)], vec![int(5), int(1), int(0)]];
        assert!(matches!(FiniteAlphabet::new(bad), Err(Error::InvalidMetric(_))));
        let asym = vec![vec![int(0), int(1)], vec![int(2), int(0)]];
        assert!(FiniteAlphabet::new(asym).is_err());
        assert!(FiniteAlphabet::on_line(&[int(0), int(0)]).is_err());
    }

    #[test]
    fn line_points() {
        let a = FiniteAlphabet::on_line(&[int(0), ratio(3, 10), ratio(6, 10), int(1)]).unwrap();
        assert_eq!(a.diam(), int(1));
        assert_eq!(a.min_gap(), Some(ratio(3, 10)));
        assert_eq!(a.dist(1, 3), &ratio(7, 10));
    }

    #[test]
    fn dimensions() {
        let p = Alphabet::product(vec![Alphabet::cube(2).unwrap(), Alphabet::discrete(3).unwrap()]).unwrap();
        assert_eq!(p.dim(), 2);
        assert!(!p.is_finite());
        assert_eq!(Alphabet::discrete(4).unwrap().dim(), 0);
        assert!(Alphabet::cube(0).is_err());
    }
}
