//! Subdivisions of complete digraphs and their loop-augmented variant.

mod bounds;
mod core;
mod driver;
mod types;
mod verify;

pub use self::bounds::{bound_d, bound_dstar, bound_f, BOUND_BIT_CAP};
pub use self::core::{core_size_bound, extract_min_outdeg_subtournament};
pub use driver::{EmbedOptions, EmbedStats, DEFAULT_WORK_BUDGET};
pub use types::{KStar, LoopPair, MinimalSubdivision, PairPath, PartialSubdivision};
pub use verify::{verify_kstar, verify_partial, verify_subdivision};

use crate::error::Error;
use crate::path::Path;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;
use driver::{choose_branch, run_top, Embedder, Frame, Plan};

/// Ordered branch-index pairs `(i, j)`, `i != j`, lexicographically.
fn lexicographic_pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect()
}

#[derive(Clone)]
struct SubState {
    ps: PartialSubdivision,
    occ: VertexSet,
}

struct SubdivisionPlan {
    k: usize,
    order: Vec<(usize, usize)>,
}

impl Plan for SubdivisionPlan {
    type S = SubState;

    fn seed(&self, e: &mut Embedder<'_>, universe: &VertexSet) -> Result<Frame<SubState>, Error> {
        let t = e.t;
        if universe.len() < self.k {
            return Err(Error::exhausted(
                "seed",
                format!("{} vertices cannot host {} branch vertices", universe.len(), self.k),
            ));
        }
        let anchored = e.seed_anchor(universe).and_then(|z| {
            let nz = t.out_neighbors(z).intersection(universe);
            (nz.len() >= self.k).then_some((z, nz))
        });
        let (branch, anchor) = match anchored {
            Some((z, nz)) => (choose_branch(t, &nz, self.k), Some(z)),
            None => (choose_branch(t, universe, self.k), None),
        };
        let occ = VertexSet::from_vertices(t.n(), branch.iter().copied());
        Ok(Frame {
            s: SubState {
                ps: PartialSubdivision::new(branch),
                occ,
            },
            anchor,
        })
    }

    fn occupied<'a>(&self, s: &'a SubState) -> &'a VertexSet {
        &s.occ
    }

    fn task(&self, s: &SubState, step: usize) -> (usize, usize) {
        let (i, j) = self.order[step];
        (s.ps.branch[i], s.ps.branch[j])
    }

    fn install(&self, _t: &Tournament, s: &mut SubState, step: usize, p: Path) {
        let pair = self.task(s, step);
        debug_assert_eq!((p.first(), p.last()), pair);
        for &v in p.vertices() {
            s.occ.insert(v);
        }
        s.ps.paths.push(PairPath { pair, path: p });
    }
}

#[derive(Clone)]
struct KState {
    base: MinimalSubdivision,
    /// `(long pair, endpoints)` per loop, entry before exit.
    slots: Vec<((usize, usize), (usize, usize))>,
    loops: Vec<Path>,
    occ: VertexSet,
}

struct KStarPlan {
    sub: SubdivisionPlan,
}

fn loop_slots(t: &Tournament, base: &MinimalSubdivision) -> Vec<((usize, usize), (usize, usize))> {
    let b = base.branch();
    let mut slots = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let pair = base.long_direction(t, b[i], b[j]);
            let p = base.path(pair.0, pair.1).vertices();
            let len = p.len();
            slots.push((pair, (p[1], p[0])));
            slots.push((pair, (p[len - 1], p[len - 2])));
        }
    }
    slots
}

impl Plan for KStarPlan {
    type S = KState;

    fn seed(&self, e: &mut Embedder<'_>, universe: &VertexSet) -> Result<Frame<KState>, Error> {
        let t = e.t;
        let f = e.build(&self.sub, universe, self.sub.order.len())?;
        let base = MinimalSubdivision(minimize_subdivision(t, &f.s.ps));
        let slots = loop_slots(t, &base);
        let occ = base.vertex_set(t.n());
        Ok(Frame {
            s: KState {
                base,
                slots,
                loops: Vec::new(),
                occ,
            },
            anchor: f.anchor,
        })
    }

    fn occupied<'a>(&self, s: &'a KState) -> &'a VertexSet {
        &s.occ
    }

    fn task(&self, s: &KState, step: usize) -> (usize, usize) {
        s.slots[step].1
    }

    fn install(&self, t: &Tournament, s: &mut KState, step: usize, mut p: Path) {
        debug_assert_eq!(step, s.loops.len());
        p.shortcut_chords(t);
        for &v in p.vertices() {
            s.occ.insert(v);
        }
        s.loops.push(p);
    }
}

impl KState {
    fn finish(self) -> KStar {
        let mut loops = Vec::with_capacity(self.loops.len() / 2);
        let mut it = self.slots.iter().zip(self.loops);
        while let (Some((s1, entry)), Some((_, exit))) = (it.next(), it.next()) {
            loops.push(LoopPair {
                pair: s1.0,
                entry,
                exit,
            });
        }
        KStar {
            base: self.base,
            loops,
        }
    }
}

/// Removes every forward chord from every path.
pub fn minimize_subdivision(t: &Tournament, ps: &PartialSubdivision) -> PartialSubdivision {
    let mut out = ps.clone();
    for pp in &mut out.paths {
        pp.path.shortcut_chords(t);
    }
    out
}

/// Embeds a minimal subdivision of the complete digraph on `k` vertices.
pub fn embed_subdivision(t: &Tournament, k: usize) -> Result<MinimalSubdivision, Error> {
    embed_subdivision_with(t, k, &EmbedOptions::default()).map(|(s, _)| s)
}

pub fn embed_subdivision_with(
    t: &Tournament,
    k: usize,
    opts: &EmbedOptions,
) -> Result<(MinimalSubdivision, EmbedStats), Error> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let plan = SubdivisionPlan {
        k,
        order: lexicographic_pairs(k),
    };
    let (s, stats) = run_top(t, &plan, plan.order.len(), opts)?;
    let min = MinimalSubdivision(minimize_subdivision(t, &s.ps));
    verify_subdivision(t, &min)?;
    Ok((min, stats))
}

/// Adds the ordered branch pair `pair` to `ps`. When `anchor` is given the
/// whole of `ps` must lie in its out-neighbourhood. Returns the grown
/// structure and its anchor, if it still has one.
pub fn augment_edge(
    t: &Tournament,
    ps: &PartialSubdivision,
    pair: (usize, usize),
    anchor: Option<usize>,
) -> Result<(PartialSubdivision, Option<usize>, EmbedStats), Error> {
    verify_partial(t, ps)?;
    let index = |v: usize| ps.branch.iter().position(|&b| b == v);
    let (Some(i), Some(j)) = (index(pair.0), index(pair.1)) else {
        return Err(Error::Precondition("pair must join branch vertices".into()));
    };
    if i == j || ps.has_pair(pair.0, pair.1) {
        return Err(Error::Precondition(format!(
            "pair {pair:?} is a loop or already embedded"
        )));
    }
    let occ = ps.vertex_set(t.n());
    if let Some(z) = anchor {
        if !occ.is_subset(t.out_neighbors(z)) {
            return Err(Error::Precondition(format!(
                "structure is not inside N⁺({z})"
            )));
        }
    }
    let mut order: Vec<(usize, usize)> = ps
        .paths
        .iter()
        .map(|pp| (index(pp.pair.0).unwrap(), index(pp.pair.1).unwrap()))
        .collect();
    order.push((i, j));
    let plan = SubdivisionPlan { k: ps.k(), order };
    let mut e = Embedder::new(t, DEFAULT_WORK_BUDGET);
    let frame = Frame {
        s: SubState { ps: ps.clone(), occ },
        anchor,
    };
    let out = e.advance(&plan, &t.vertices(), frame, ps.m())?;
    Ok((out.s.ps, out.anchor, e.stats))
}

/// Embeds a minimal subdivision on `k` branch vertices with both loop paths
/// on each of its long paths.
pub fn embed_kstar(t: &Tournament, k: usize) -> Result<KStar, Error> {
    embed_kstar_with(t, k, &EmbedOptions::default()).map(|(s, _)| s)
}

pub fn embed_kstar_with(
    t: &Tournament,
    k: usize,
    opts: &EmbedOptions,
) -> Result<(KStar, EmbedStats), Error> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive".into()));
    }
    let plan = KStarPlan {
        sub: SubdivisionPlan {
            k,
            order: lexicographic_pairs(k),
        },
    };
    let loops = k * (k - 1);
    let (s, stats) = run_top(t, &plan, loops, opts)?;
    let star = s.finish();
    verify_kstar(t, &star)?;
    Ok((star, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        assert_eq!(
            lexicographic_pairs(3),
            vec![(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
        );
    }

    #[test]
    fn k1_is_single_vertex() {
        let t = Tournament::random(10, 1);
        let s = embed_subdivision(&t, 1).unwrap();
        assert_eq!(s.k(), 1);
        assert!(s.paths().is_empty());
        let star = embed_kstar(&t, 1).unwrap();
        assert!(star.loops.is_empty());
    }

    #[test]
    fn augment_with_direct_edge() {
        let t = Tournament::random(30, 2);
        let (u, v) = (0..30)
            .flat_map(|u| (0..30).map(move |v| (u, v)))
            .find(|&(u, v)| t.has_edge(u, v))
            .unwrap();
        let ps = PartialSubdivision::new(vec![u, v]);
        let (out, _, _) = augment_edge(&t, &ps, (u, v), None).unwrap();
        assert_eq!(out.path(u, v).unwrap().vertices(), &[u, v]);
    }

    #[test]
    fn chord_removed() {
        // u=0 -> a=1 -> b=2 -> v=3 with 0 -> 2, and 3 -> 0
        let t = Tournament::from_fn(4, |i, j| !(i == 1 && j == 3) && !(i == 0 && j == 3));
        let mut ps = PartialSubdivision::new(vec![0, 3]);
        ps.paths.push(PairPath {
            pair: (0, 3),
            path: Path::new(vec![0, 1, 2, 3]),
        });
        let m = minimize_subdivision(&t, &ps);
        assert_eq!(m.path(0, 3).unwrap().vertices(), &[0, 2, 3]);
        assert_eq!(minimize_subdivision(&t, &m), m);
    }

    #[test]
    fn random_k3_embeds_and_verifies() {
        let t = Tournament::random(200, 9);
        let (s, stats) = embed_subdivision_with(&t, 3, &EmbedOptions::default()).unwrap();
        verify_subdivision(&t, &s).unwrap();
        assert_eq!(s.paths().len(), 6);
        assert!(stats.work > 0);
        let json = serde_json::to_string(&s).unwrap();
        let back: MinimalSubdivision = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let star = embed_kstar(&t, 3).unwrap();
        verify_kstar(&t, &star).unwrap();
        assert_eq!(star.loops.len(), 3);
        let json = serde_json::to_string(&star).unwrap();
        assert_eq!(serde_json::from_str::<KStar>(&json).unwrap(), star);
    }
}
