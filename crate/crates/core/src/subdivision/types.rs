use serde::{Deserialize, Serialize};

use crate::path::Path;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

/// The path embedding the branch pair `(from, to)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPath {
    pub pair: (usize, usize),
    pub path: Path,
}

/// A subdivision of a spanning subdigraph of the complete digraph on the
/// branch vertices. Paths are kept in the order they were embedded.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialSubdivision {
    pub branch: Vec<usize>,
    pub paths: Vec<PairPath>,
}

impl PartialSubdivision {
    pub fn new(branch: Vec<usize>) -> Self {
        PartialSubdivision {
            branch,
            paths: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.branch.len()
    }

    /// Number of embedded ordered pairs.
    pub fn m(&self) -> usize {
        self.paths.len()
    }

    pub fn is_complete(&self) -> bool {
        let k = self.k();
        self.m() == k * k.saturating_sub(1)
    }

    pub fn path(&self, u: usize, v: usize) -> Option<&Path> {
        self.paths
            .iter()
            .find(|pp| pp.pair == (u, v))
            .map(|pp| &pp.path)
    }

    pub fn has_pair(&self, u: usize, v: usize) -> bool {
        self.path(u, v).is_some()
    }

    /// Branch vertices plus every path vertex.
    pub fn vertex_set(&self, n: usize) -> VertexSet {
        let mut s = VertexSet::from_vertices(n, self.branch.iter().copied());
        for pp in &self.paths {
            for &v in pp.path.vertices() {
                s.insert(v);
            }
        }
        s
    }

    pub fn total_vertices(&self) -> usize {
        self.k() + self.paths.iter().map(|pp| pp.path.interior().len()).sum::<usize>()
    }
}

/// A complete subdivision in which no path has a forward chord, so each
/// branch pair is joined by exactly one single edge and one longer path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MinimalSubdivision(pub(crate) PartialSubdivision);

impl MinimalSubdivision {
    pub fn branch(&self) -> &[usize] {
        &self.0.branch
    }

    pub fn k(&self) -> usize {
        self.0.k()
    }

    pub fn as_partial(&self) -> &PartialSubdivision {
        &self.0
    }

    pub fn into_partial(self) -> PartialSubdivision {
        self.0
    }

    pub fn path(&self, u: usize, v: usize) -> &Path {
        self.0.path(u, v).expect("complete subdivision")
    }

    pub fn paths(&self) -> &[PairPath] {
        &self.0.paths
    }

    /// The long direction of the pair `{u, v}` as `(from, to)`.
    pub fn long_direction(&self, t: &Tournament, u: usize, v: usize) -> (usize, usize) {
        if t.has_edge(u, v) {
            (v, u)
        } else {
            (u, v)
        }
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        self.0.vertex_set(n)
    }
}

/// The two loop paths attached to the long path `P_{uv}`: `entry` runs from
/// the second vertex of `P_{uv}` back to `u`, `exit` from `v` to the
/// penultimate vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoopPair {
    pub pair: (usize, usize),
    pub entry: Path,
    pub exit: Path,
}

/// A minimal subdivision with loop paths on every long path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KStar {
    pub base: MinimalSubdivision,
    pub loops: Vec<LoopPair>,
}

impl KStar {
    pub fn branch(&self) -> &[usize] {
        self.base.branch()
    }

    pub fn loops_for(&self, u: usize, v: usize) -> Option<&LoopPair> {
        self.loops.iter().find(|l| l.pair == (u, v))
    }

    pub fn vertex_set(&self, n: usize) -> VertexSet {
        let mut s = self.base.vertex_set(n);
        for l in &self.loops {
            for p in [&l.entry, &l.exit] {
                for &v in p.vertices() {
                    s.insert(v);
                }
            }
        }
        s
    }
}
