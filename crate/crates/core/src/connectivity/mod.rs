//! Disjoint path systems, vertex connectivity and an exact linkage oracle.

mod flow;
mod linkage;

pub use linkage::{
    is_k_linked_all, is_k_linked_exact, LinkageInstance, LinkageOutcome, DEFAULT_NODE_BUDGET,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Violation};
use crate::path::{check_pairwise_disjoint, Path};
use crate::tournament::{min_in_degree, min_out_degree, Tournament};
use crate::vertex_set::VertexSet;
use flow::SplitFlow;

/// A family of pairwise disjoint paths together with the contract it was
/// routed under.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathSystem {
    pub paths: Vec<Path>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub avoid: Vec<usize>,
    pub internal_exclusion: Vec<usize>,
}

impl PathSystem {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Re-walks every path against `t` and checks the contract.
    pub fn verify(&self, t: &Tournament) -> Result<(), Violation> {
        let n = t.n();
        let sources = VertexSet::from_vertices(n, self.sources.iter().copied());
        let sinks = VertexSet::from_vertices(n, self.sinks.iter().copied());
        let avoid = VertexSet::from_vertices(n, self.avoid.iter().copied());
        let excl = VertexSet::from_vertices(n, self.internal_exclusion.iter().copied());
        let named: Vec<(String, &Path)> = self
            .paths
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("P{i}"), p))
            .collect();
        for (name, p) in &named {
            p.check(t, name)?;
            if !sources.contains(p.first()) {
                return Err(Violation::Endpoint {
                    path: name.clone(),
                    detail: format!("start {} is not a source", p.first()),
                });
            }
            if !sinks.contains(p.last()) {
                return Err(Violation::Endpoint {
                    path: name.clone(),
                    detail: format!("end {} is not a sink", p.last()),
                });
            }
            if let Some(&v) = p.vertices().iter().find(|&&v| avoid.contains(v)) {
                return Err(Violation::Forbidden {
                    path: name.clone(),
                    vertex: v,
                    why: "avoid set",
                });
            }
            if let Some(&v) = p.interior().iter().find(|&&v| excl.contains(v)) {
                return Err(Violation::Forbidden {
                    path: name.clone(),
                    vertex: v,
                    why: "internal exclusion",
                });
            }
        }
        check_pairwise_disjoint(&named)
    }

    /// Union of all path vertices.
    pub fn vertex_set(&self, n: usize) -> VertexSet {
        let mut s = VertexSet::empty(n);
        for p in &self.paths {
            for &v in p.vertices() {
                s.insert(v);
            }
        }
        s
    }
}

/// Up to `limit` vertex-disjoint paths from `from` to `to` in `T - avoid`
/// whose interiors avoid `internal_exclusion`.
///
/// The count is the max-flow value of the split network, so a short system
/// means no larger one exists. A vertex of `internal_exclusion` may still
/// serve as an endpoint: members of `from` start paths, members of `to` end
/// them, and any other excluded vertex is unusable.
pub fn max_disjoint_paths(
    t: &Tournament,
    from: &VertexSet,
    to: &VertexSet,
    avoid: &VertexSet,
    internal_exclusion: &VertexSet,
    limit: usize,
) -> Result<PathSystem, Error> {
    if !from.is_disjoint(to) || !from.is_disjoint(avoid) || !to.is_disjoint(avoid) {
        return Err(Error::Precondition(
            "from, to and avoid must be pairwise disjoint".into(),
        ));
    }
    Ok(disjoint_paths_unchecked(
        t,
        from,
        to,
        avoid,
        internal_exclusion,
        limit,
    ))
}

/// As [`max_disjoint_paths`] without the disjointness precondition; a vertex
/// in both `from` and `to` counts as a single-vertex path.
pub(crate) fn disjoint_paths_unchecked(
    t: &Tournament,
    from: &VertexSet,
    to: &VertexSet,
    avoid: &VertexSet,
    internal_exclusion: &VertexSet,
    limit: usize,
) -> PathSystem {
    let n = t.n();
    let allowed = {
        let mut a = VertexSet::full(n);
        a.difference_with(avoid);
        let mut dead = internal_exclusion.difference(from);
        dead.difference_with(to);
        a.difference_with(&dead);
        a
    };
    let no_entry = internal_exclusion.intersection(from);
    let no_exit = internal_exclusion.intersection(to);
    let mut flow = SplitFlow::new(t, allowed, from.clone(), to.clone(), no_entry, no_exit);
    flow.run(limit);
    PathSystem {
        paths: flow.paths(),
        sources: from.to_vec(),
        sinks: to.to_vec(),
        avoid: avoid.to_vec(),
        internal_exclusion: internal_exclusion.to_vec(),
    }
}

/// Number of internally disjoint `u -> w` paths, capped at `limit`.
/// Requires that `u -> w` is not an edge.
fn local_connectivity(t: &Tournament, u: usize, w: usize, limit: usize) -> usize {
    debug_assert!(u != w && !t.has_edge(u, w));
    let n = t.n();
    let mut allowed = VertexSet::full(n);
    allowed.remove(u);
    allowed.remove(w);
    let mut flow = SplitFlow::new(
        t,
        allowed,
        t.out_neighbors(u).clone(),
        t.in_neighbors(w).clone(),
        VertexSet::empty(n),
        VertexSet::empty(n),
    );
    flow.run(limit)
}

/// Strong vertex connectivity, capped at `cap`.
fn connectivity_capped(t: &Tournament, cap: usize) -> usize {
    let n = t.n();
    let mut best = min_out_degree(t).min(min_in_degree(t)).min(cap);
    // Any minimum separator misses one of v_0..v_best, and a vertex outside
    // the separator has a non-adjacent partner on the far side in one
    // direction.
    let mut i = 0;
    while i <= best && i < n {
        for w in 0..n {
            if best == 0 {
                return 0;
            }
            if w == i {
                continue;
            }
            let (a, b) = if t.has_edge(w, i) { (i, w) } else { (w, i) };
            best = best.min(local_connectivity(t, a, b, best));
        }
        i += 1;
    }
    best
}

/// Largest `k` such that `t` stays strongly connected after deleting any
/// `k - 1` vertices.
pub fn vertex_connectivity(t: &Tournament) -> usize {
    if t.n() < 2 {
        return 0;
    }
    connectivity_capped(t, usize::MAX)
}

/// Whether `t` is strongly `k`-connected, stopping as soon as a pair with
/// fewer than `k` disjoint paths shows up.
pub fn is_k_connected(t: &Tournament, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    if t.n() <= k {
        return false;
    }
    connectivity_capped(t, k) >= k
}
