use crate::error::{Error, Result};

/// Default size cap for exhaustive separated-set search.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Maximum size of an `ε`-separated subset (`dist ≥ ε` between distinct
/// members) of a finite pseudometric space given by its distance matrix.
pub fn separated_exact<T: PartialOrd>(dist: &[Vec<T>], eps: &T) -> Result<usize> {
    separated_exact_with_limit(dist, eps, EXHAUSTIVE_LIMIT)
}

/// [`separated_exact`] with an explicit cap on the number of points (at most 64).
pub fn separated_exact_with_limit<T: PartialOrd>(dist: &[Vec<T>], eps: &T, limit: usize) -> Result<usize> {
    let n = dist.len();
    if n > limit.min(64) {
        return Err(Error::TooLarge(format!("{n} points exceed the exhaustive limit {}", limit.min(64))));
    }
    let adj: Vec<u64> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && dist[i][j] >= *eps).fold(0u64, |m, j| m | (1 << j)))
        .collect();
    let mut best = 0;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    max_clique(&adj, all, 0, &mut best);
    Ok(best)
}

/// Branch and bound over the lowest candidate: include it or drop it.
fn max_clique(adj: &[u64], cand: u64, size: usize, best: &mut usize) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() as usize <= *best {
        return;
    }
    let v = cand.trailing_zeros() as usize;
    max_clique(adj, cand & adj[v], size + 1, best);
    max_clique(adj, cand & !(1 << v), size, best);
}

/// A maximal `ε`-separated set built by inserting points in input order.
/// Maximality makes it `ε`-spanning, so its size lies between the exact
/// counts at `2ε` and at `ε`.
pub fn separated_greedy<T: PartialOrd>(dist: &[Vec<T>], eps: &T) -> (usize, Vec<usize>) {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..dist.len() {
        if chosen.iter().all(|&j| dist[i][j] >= *eps) {
            chosen.push(i);
        }
    }
    (chosen.len(), chosen)
}
