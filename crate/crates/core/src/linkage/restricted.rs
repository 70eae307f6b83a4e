//! The edge set of a loop-augmented subdivision and distances inside it.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::path::Path;
use crate::subdivision::KStar;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

/// Edges counted as belonging to the structure:
///
/// 1. edges of the long subdivision paths (single-edge paths contribute
///    nothing);
/// 2. edges of the loop paths;
/// 3. for each branch pair `{u, v}`, tournament edges between `{u, v}` and
///    the vertices of `P_uv` and `P_vu`, other than the edge `uv` itself;
/// 4. for each branch vertex `u`, tournament edges between `u` and the
///    loops containing `u`.
#[derive(Clone, Debug)]
pub struct RestrictedEdgeSet {
    n: usize,
    branch: Vec<usize>,
    is_branch: VertexSet,
    vertices: VertexSet,
    edges: HashSet<(usize, usize)>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    /// The branch pair whose path or loop has `x` as a non-branch vertex.
    owner: HashMap<usize, (usize, usize)>,
}

impl RestrictedEdgeSet {
    pub fn build(t: &Tournament, star: &KStar) -> Self {
        let n = t.n();
        let branch = star.branch().to_vec();
        let is_branch = VertexSet::from_vertices(n, branch.iter().copied());
        let mut edges: HashSet<(usize, usize)> = HashSet::new();
        let mut owner = HashMap::new();
        let add_path = |p: &Path, edges: &mut HashSet<(usize, usize)>| {
            for (a, b) in p.edges() {
                edges.insert((a, b));
            }
        };
        let between = |u: usize, xs: &[usize], edges: &mut HashSet<(usize, usize)>| {
            for &x in xs {
                if x == u {
                    continue;
                }
                if t.has_edge(u, x) {
                    edges.insert((u, x));
                } else {
                    edges.insert((x, u));
                }
            }
        };

        for pp in star.base.paths() {
            let (u, v) = pp.pair;
            if pp.path.len() >= 2 {
                add_path(&pp.path, &mut edges);
                for &x in pp.path.interior() {
                    owner.insert(x, (u.min(v), u.max(v)));
                }
            }
        }
        for lp in &star.loops {
            let (u, v) = lp.pair;
            for l in [&lp.entry, &lp.exit] {
                add_path(l, &mut edges);
                for &x in l.vertices() {
                    if !is_branch.contains(x) {
                        owner.insert(x, (u.min(v), u.max(v)));
                    }
                }
            }
        }
        let b = &branch;
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                let (u, v) = (b[i], b[j]);
                let mut xs: Vec<usize> = star.base.path(u, v).vertices().to_vec();
                xs.extend_from_slice(star.base.path(v, u).vertices());
                xs.retain(|&x| !is_branch.contains(x));
                between(u, &xs, &mut edges);
                between(v, &xs, &mut edges);
            }
        }
        for lp in &star.loops {
            let (u, v) = lp.pair;
            // entry loops end at u, exit loops start at v
            let entry: Vec<usize> = lp.entry.vertices().to_vec();
            let exit: Vec<usize> = lp.exit.vertices().to_vec();
            between(u, &entry, &mut edges);
            between(v, &exit, &mut edges);
        }

        let mut vertices = star.vertex_set(n);
        vertices.union_with(&is_branch);
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(a, c) in &edges {
            out[a].push(c);
            inn[c].push(a);
        }
        for l in out.iter_mut().chain(inn.iter_mut()) {
            l.sort_unstable();
        }
        RestrictedEdgeSet {
            n,
            branch,
            is_branch,
            vertices,
            edges,
            out,
            inn,
            owner,
        }
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn branch(&self) -> &[usize] {
        &self.branch
    }

    pub fn is_branch(&self, v: usize) -> bool {
        self.is_branch.contains(v)
    }

    /// `V(S)`: branch vertices, subdivision paths and loops.
    pub fn vertices(&self) -> &VertexSet {
        &self.vertices
    }

    /// The branch pair (smaller id first) owning a non-branch vertex.
    pub fn owner(&self, x: usize) -> Option<(usize, usize)> {
        self.owner.get(&x).copied()
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.inn[v]
    }

    /// Number of edges of `p` not in the set.
    pub fn off_edges(&self, p: &Path) -> usize {
        p.edges().filter(|&(a, b)| !self.contains(a, b)).count()
    }

    fn bfs(&self, from: usize, forward: bool, limit: usize) -> Vec<(usize, usize)> {
        let adj = if forward { &self.out } else { &self.inn };
        let mut dist = HashMap::from([(from, 0usize)]);
        let mut order = vec![(from, 0)];
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            if d == limit {
                continue;
            }
            for &w in &adj[v] {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    order.push((w, d + 1));
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Length of a shortest structure path from `u` to `x`.
    pub fn in_distance(&self, u: usize, x: usize) -> Option<usize> {
        self.bfs(u, true, usize::MAX)
            .into_iter()
            .find(|&(v, _)| v == x)
            .map(|(_, d)| d)
    }

    /// Length of a shortest structure path from `x` to `u`.
    pub fn out_distance(&self, u: usize, x: usize) -> Option<usize> {
        self.bfs(u, false, usize::MAX)
            .into_iter()
            .find(|&(v, _)| v == x)
            .map(|(_, d)| d)
    }

    /// Every vertex at in-distance at most `radius` from `u`, with distance.
    pub fn in_ball(&self, u: usize, radius: usize) -> Vec<(usize, usize)> {
        self.bfs(u, true, radius)
    }

    /// Every vertex at out-distance at most `radius` from `u`, with distance.
    pub fn out_ball(&self, u: usize, radius: usize) -> Vec<(usize, usize)> {
        self.bfs(u, false, radius)
    }

    pub fn universe(&self) -> usize {
        self.n
    }
}
