//! Directed vertex-simple paths and a few bitset BFS helpers.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Violation;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

/// A directed path given by its vertex sequence. Length counts edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<usize>);

impl Path {
    pub fn new(vertices: Vec<usize>) -> Self {
        Path(vertices)
    }

    pub fn single(v: usize) -> Self {
        Path(vec![v])
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> usize {
        self.0[0]
    }

    pub fn last(&self) -> usize {
        *self.0.last().expect("empty path")
    }

    /// Vertices strictly between the endpoints.
    pub fn interior(&self) -> &[usize] {
        if self.0.len() <= 2 {
            &[]
        } else {
            &self.0[1..self.0.len() - 1]
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.iter().position(|&x| x == v)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn reversed(&self) -> Path {
        Path(self.0.iter().rev().copied().collect())
    }

    /// Prefix ending at index `i` (inclusive).
    pub fn prefix(&self, i: usize) -> Path {
        Path(self.0[..=i].to_vec())
    }

    /// Suffix starting at index `i`.
    pub fn suffix(&self, i: usize) -> Path {
        Path(self.0[i..].to_vec())
    }

    /// Concatenates `self` and `other`, which must share the junction vertex.
    pub fn join(&self, other: &Path) -> Path {
        assert_eq!(self.last(), other.first(), "paths do not meet");
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0[1..]);
        Path(v)
    }

    pub fn to_set(&self, n: usize) -> VertexSet {
        VertexSet::from_vertices(n, self.0.iter().copied())
    }

    /// Checks simplicity and that every step is an edge of `t`.
    pub fn check(&self, t: &Tournament, name: &str) -> Result<(), Violation> {
        if self.0.is_empty() {
            return Err(Violation::EmptyPath { path: name.into() });
        }
        let mut seen = VertexSet::empty(t.n());
        for &v in &self.0 {
            if v >= t.n() {
                return Err(Violation::OutOfRange {
                    path: name.into(),
                    vertex: v,
                });
            }
            if !seen.insert(v) {
                return Err(Violation::RepeatedVertex {
                    path: name.into(),
                    vertex: v,
                });
            }
        }
        for (a, b) in self.edges() {
            if !t.has_edge(a, b) {
                return Err(Violation::NotAnEdge {
                    path: name.into(),
                    from: a,
                    to: b,
                });
            }
        }
        Ok(())
    }

    /// First forward chord `x_i -> x_j` with `j >= i + 2`, if any.
    pub fn forward_chord(&self, t: &Tournament) -> Option<(usize, usize)> {
        let v = &self.0;
        for i in 0..v.len() {
            for j in i + 2..v.len() {
                if t.has_edge(v[i], v[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Removes every forward chord by jumping, from each kept vertex, to its
    /// farthest out-neighbour further along the path. One pass leaves no
    /// chords. Returns whether anything changed.
    pub fn shortcut_chords(&mut self, t: &Tournament) -> bool {
        let v = &self.0;
        if v.len() <= 2 {
            return false;
        }
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        out.push(v[0]);
        while i + 1 < v.len() {
            let j = (i + 1..v.len())
                .rev()
                .find(|&j| t.has_edge(v[i], v[j]))
                .expect("consecutive vertices are adjacent");
            out.push(v[j]);
            i = j;
        }
        let changed = out.len() != v.len();
        self.0 = out;
        changed
    }
}

/// Checks that the paths are pairwise vertex-disjoint, naming the clash.
pub fn check_pairwise_disjoint(paths: &[(String, &Path)]) -> Result<(), Violation> {
    let mut owner: HashMap<usize, &str> = HashMap::new();
    for (name, p) in paths {
        for &v in p.vertices() {
            if let Some(prev) = owner.insert(v, name.as_str()) {
                return Err(Violation::Disjointness {
                    vertex: v,
                    first: prev.to_string(),
                    second: name.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Shortest path from `from` to `to` whose interior lies in `allowed`.
/// Ties go to the smallest vertex id at each step back from `to`.
pub fn shortest_path(
    t: &Tournament,
    from: usize,
    to: usize,
    allowed: &VertexSet,
) -> Option<Path> {
    if from == to {
        return Some(Path::single(from));
    }
    let n = t.n();
    let mut levels: Vec<VertexSet> = vec![VertexSet::from_vertices(n, [from])];
    let mut visited = levels[0].clone();
    loop {
        let frontier = levels.last().unwrap();
        if !frontier.is_disjoint(t.in_neighbors(to)) {
            break;
        }
        let mut next = VertexSet::empty(n);
        for v in frontier.iter() {
            next.union_with(t.out_neighbors(v));
        }
        next.intersect_with(allowed);
        next.difference_with(&visited);
        next.remove(to);
        if next.is_empty() {
            return None;
        }
        visited.union_with(&next);
        levels.push(next);
    }
    let mut rev = vec![to];
    let mut cur = to;
    for level in levels.iter().rev() {
        cur = level
            .first_common(t.in_neighbors(cur))
            .expect("bfs level has a predecessor");
        rev.push(cur);
    }
    rev.reverse();
    Some(Path(rev))
}

/// Vertices reachable from `from` using only vertices of `allowed`
/// (`from` itself is always included).
pub fn reachable_within(t: &Tournament, from: usize, allowed: &VertexSet) -> VertexSet {
    let mut seen = VertexSet::from_vertices(t.n(), [from]);
    let mut frontier = seen.clone();
    while !frontier.is_empty() {
        let mut next = VertexSet::empty(t.n());
        for v in frontier.iter() {
            next.union_with(t.out_neighbors(v));
        }
        next.intersect_with(allowed);
        next.difference_with(&seen);
        seen.union_with(&next);
        frontier = next;
    }
    seen
}
