use crate::error::Error;
use crate::tournament::{min_out_degree_within, Tournament};
use crate::vertex_set::VertexSet;

/// Largest order a vertex-minimal subtournament with minimum out-degree `k`
/// can have: `floor(((2k+3)^2 - 1) / 8) = k^2/2 + 3k/2 + 1`.
pub fn core_size_bound(k: usize) -> usize {
    ((2 * k + 3) * (2 * k + 3) - 1) / 8
}

/// A vertex-minimal `W ⊆ within` whose induced subtournament has minimum
/// out-degree at least `k`.
///
/// Vertices are deleted greedily in id order, sweeping until a full pass
/// deletes nothing. A vertex may go exactly when none of its in-neighbours
/// in `W` sits at out-degree `k`.
pub fn extract_min_outdeg_subtournament(
    t: &Tournament,
    within: &VertexSet,
    k: usize,
) -> Result<VertexSet, Error> {
    if within.is_empty() {
        return Err(Error::Precondition("empty vertex set".into()));
    }
    let have = min_out_degree_within(t, within);
    if have < k {
        return Err(Error::Precondition(format!(
            "induced minimum out-degree is {have}, below {k}"
        )));
    }
    let n = t.n();
    let mut w = within.clone();
    let mut deg = vec![0usize; n];
    let mut tight = VertexSet::empty(n);
    for v in w.iter() {
        deg[v] = t.out_degree_within(v, &w);
        if deg[v] == k {
            tight.insert(v);
        }
    }
    let mut scratch = VertexSet::empty(n);
    loop {
        let mut changed = false;
        for v in within.iter() {
            if !w.contains(v) || w.len() == 1 {
                continue;
            }
            if t.in_neighbors(v).intersection_len(&tight) != 0 {
                continue;
            }
            w.remove(v);
            tight.remove(v);
            scratch.clone_from(t.in_neighbors(v));
            scratch.intersect_with(&w);
            for u in scratch.iter() {
                deg[u] -= 1;
                if deg[u] == k {
                    tight.insert(u);
                }
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let bound = core_size_bound(k);
    assert!(
        w.len() <= bound,
        "vertex-minimal core of size {} exceeds {bound}",
        w.len()
    );
    Ok(w)
}
