//! Unit vertex-capacity max-flow on an implicit split network.
//!
//! Each vertex `v` becomes `v_in -> v_out` with capacity one; tournament
//! edges become `u_out -> v_in`. The residual graph is never materialised:
//! neighbourhoods are scanned straight from the tournament's bitsets, so a
//! BFS costs `O(n^2 / 64)` and `k` augmentations cost `O(k n^2 / 64)`.

use std::collections::VecDeque;

use crate::path::Path;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

const NONE: usize = usize::MAX;
const TERMINAL: usize = usize::MAX - 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Node {
    Source,
    In(usize),
    Out(usize),
}

pub(crate) struct SplitFlow<'a> {
    t: &'a Tournament,
    allowed: VertexSet,
    sources: VertexSet,
    sinks: VertexSet,
    no_entry: VertexSet,
    no_exit: VertexSet,
    next: Vec<usize>,
    prev: Vec<usize>,
    used: VertexSet,
    value: usize,
}

impl<'a> SplitFlow<'a> {
    /// `allowed` bounds every vertex a path may touch. `no_entry` vertices
    /// may start a path but never be entered; `no_exit` vertices may end a
    /// path but never be left. Sources and sinks may overlap, in which case a
    /// shared vertex yields a single-vertex path.
    pub(crate) fn new(
        t: &'a Tournament,
        allowed: VertexSet,
        sources: VertexSet,
        sinks: VertexSet,
        no_entry: VertexSet,
        no_exit: VertexSet,
    ) -> Self {
        let n = t.n();
        let sources = sources.intersection(&allowed);
        let sinks = sinks.intersection(&allowed);
        SplitFlow {
            t,
            allowed,
            sources,
            sinks,
            no_entry,
            no_exit,
            next: vec![NONE; n],
            prev: vec![NONE; n],
            used: VertexSet::empty(n),
            value: 0,
        }
    }

    /// Augments up to `limit` times; returns the flow value.
    pub(crate) fn run(&mut self, limit: usize) -> usize {
        while self.value < limit && self.augment() {}
        self.value
    }

    fn augment(&mut self) -> bool {
        let n = self.t.n();
        let mut parent_in = vec![Node::Source; n];
        let mut parent_out = vec![Node::Source; n];
        let mut seen_in = VertexSet::empty(n);
        let mut seen_out = VertexSet::empty(n);
        let mut queue: VecDeque<Node> = VecDeque::new();

        for s in self.sources.iter() {
            if self.prev[s] != TERMINAL {
                seen_in.insert(s);
                parent_in[s] = Node::Source;
                queue.push_back(Node::In(s));
            }
        }

        let mut entry_candidates = VertexSet::empty(n);
        let mut found: Option<usize> = None;
        'bfs: while let Some(node) = queue.pop_front() {
            match node {
                Node::Source => unreachable!(),
                Node::In(v) => {
                    if !self.used.contains(v) {
                        if seen_out.insert(v) {
                            parent_out[v] = Node::In(v);
                            if self.sinks.contains(v) && self.next[v] != TERMINAL {
                                found = Some(v);
                                break 'bfs;
                            }
                            queue.push_back(Node::Out(v));
                        }
                    } else {
                        let p = self.prev[v];
                        if p != TERMINAL && seen_out.insert(p) {
                            parent_out[p] = Node::In(v);
                            if self.sinks.contains(p) && self.next[p] != TERMINAL {
                                found = Some(p);
                                break 'bfs;
                            }
                            queue.push_back(Node::Out(p));
                        }
                    }
                }
                Node::Out(u) => {
                    if self.used.contains(u) && seen_in.insert(u) {
                        parent_in[u] = Node::Out(u);
                        queue.push_back(Node::In(u));
                    }
                    if self.no_exit.contains(u) {
                        continue;
                    }
                    entry_candidates.clone_from(self.t.out_neighbors(u));
                    entry_candidates.intersect_with(&self.allowed);
                    entry_candidates.difference_with(&self.no_entry);
                    entry_candidates.difference_with(&seen_in);
                    for v in entry_candidates.iter() {
                        if self.next[u] == v {
                            continue;
                        }
                        seen_in.insert(v);
                        parent_in[v] = Node::Out(u);
                        queue.push_back(Node::In(v));
                    }
                }
            }
        }

        let Some(end) = found else {
            return false;
        };

        // Walk back from the sink, collecting arcs as (from, to).
        let mut arcs: Vec<(Node, Node)> = Vec::new();
        let mut cur = Node::Out(end);
        loop {
            let par = match cur {
                Node::In(v) => parent_in[v],
                Node::Out(v) => parent_out[v],
                Node::Source => break,
            };
            arcs.push((par, cur));
            cur = par;
        }

        // Cancellations first so that new assignments are not clobbered.
        for &(a, b) in &arcs {
            if let (Node::In(v), Node::Out(u)) = (a, b) {
                if u != v {
                    // cancel flow u -> v
                    self.next[u] = NONE;
                    self.prev[v] = NONE;
                }
            }
        }
        for &(a, b) in &arcs {
            match (a, b) {
                (Node::Source, Node::In(s)) => self.prev[s] = TERMINAL,
                (Node::Out(u), Node::In(v)) if u != v => {
                    self.next[u] = v;
                    self.prev[v] = u;
                }
                _ => {}
            }
        }
        self.next[end] = TERMINAL;
        for &(a, b) in &arcs {
            for node in [a, b] {
                if let Node::In(v) | Node::Out(v) = node {
                    if self.prev[v] == NONE {
                        self.used.remove(v);
                        self.next[v] = NONE;
                    } else {
                        self.used.insert(v);
                    }
                }
            }
        }
        self.value += 1;
        true
    }

    /// Decomposes the current flow into paths, trimmed so that each starts
    /// at its last source vertex and ends at its first sink vertex.
    pub(crate) fn paths(&self) -> Vec<Path> {
        let mut out = Vec::with_capacity(self.value);
        for s in self.sources.iter() {
            if self.prev[s] != TERMINAL {
                continue;
            }
            let mut walk = vec![s];
            let mut v = s;
            while self.next[v] != TERMINAL {
                v = self.next[v];
                debug_assert!(v != NONE, "broken flow path");
                walk.push(v);
            }
            let end = walk
                .iter()
                .position(|&x| self.sinks.contains(x))
                .expect("flow path reaches a sink");
            walk.truncate(end + 1);
            let start = walk
                .iter()
                .rposition(|&x| self.sources.contains(x))
                .expect("flow path starts at a source");
            out.push(Path::new(walk.split_off(start)));
        }
        out.sort_by_key(|p| p.first());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitive_flow_counts() {
        // 0 -> everything; from {0,1} to {4,5} in T5: plenty of room
        let t = Tournament::transitive(6);
        let all = t.vertices();
        let mut f = SplitFlow::new(
            &t,
            all,
            VertexSet::from_vertices(6, [0, 1]),
            VertexSet::from_vertices(6, [4, 5]),
            VertexSet::empty(6),
            VertexSet::empty(6),
        );
        assert_eq!(f.run(usize::MAX), 2);
        let paths = f.paths();
        assert_eq!(paths.len(), 2);
        for p in &paths {
            p.check(&t, "p").unwrap();
        }
    }

    #[test]
    fn overlap_gives_trivial_path() {
        let t = Tournament::transitive(3);
        let mut f = SplitFlow::new(
            &t,
            t.vertices(),
            VertexSet::from_vertices(3, [1]),
            VertexSet::from_vertices(3, [1]),
            VertexSet::empty(3),
            VertexSet::empty(3),
        );
        assert_eq!(f.run(5), 1);
        assert_eq!(f.paths()[0].vertices(), &[1]);
    }
}
