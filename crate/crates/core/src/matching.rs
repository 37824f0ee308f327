//! Maximum bipartite matching by augmenting paths (Kuhn's algorithm).

/// Maximum-cardinality matching between `n_left` and `n_right` vertices where
/// `edge(l, r)` says whether the pair may be matched. Returns the partner of
/// each left vertex. Left vertices are tried in index order and right
/// candidates in index order, so the result is deterministic.
pub fn max_matching(
    n_left: usize,
    n_right: usize,
    edge: impl Fn(usize, usize) -> bool,
) -> Vec<Option<usize>> {
    let adj: Vec<Vec<usize>> = (0..n_left)
        .map(|l| (0..n_right).filter(|&r| edge(l, r)).collect())
        .collect();
    max_matching_adj(&adj, n_right)
}

/// As [`max_matching`], with candidate lists given explicitly (tried in list order).
pub fn max_matching_adj(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    let mut right_of: Vec<Option<usize>> = vec![None; n_right];
    let mut left_of: Vec<Option<usize>> = vec![None; adj.len()];
    for l in 0..adj.len() {
        let mut seen = vec![false; n_right];
        augment(l, adj, &mut seen, &mut right_of);
    }
    for (r, l) in right_of.iter().enumerate() {
        if let Some(l) = l {
            left_of[*l] = Some(r);
        }
    }
    left_of
}

fn augment(l: usize, adj: &[Vec<usize>], seen: &mut [bool], right_of: &mut [Option<usize>]) -> bool {
    for &r in &adj[l] {
        if seen[r] {
            continue;
        }
        seen[r] = true;
        let free = match right_of[r] {
            None => true,
            Some(other) => augment(other, adj, seen, right_of),
        };
        if free {
            right_of[r] = Some(l);
            return true;
        }
    }
    false
}

/// `true` iff a matching covers every vertex on both sides.
pub fn has_perfect_matching(n_left: usize, n_right: usize, edge: impl Fn(usize, usize) -> bool) -> bool {
    n_left == n_right && max_matching(n_left, n_right, edge).iter().all(Option::is_some)
}
