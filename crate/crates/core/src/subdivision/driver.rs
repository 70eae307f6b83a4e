//! The inductive embedder.
//!
//! A structure is grown one path at a time. Each frame may carry an anchor
//! `z` whose out-neighbourhood contains the whole structure. With an anchor,
//! a new path from `a` to `b` is looked for inside
//! `N' = N⁺(z) ∖ (structure ∖ {a, b})`; failing that through some `w` that
//! `a` reaches in `N'` and an edge `w -> w'` into `N⁻(z)`, giving
//! `a ... w w' z b`; failing that the structure is rebuilt inside the last
//! strong component of `N'`, whose vertices all have smaller out-degree than
//! `z`. Without an anchor the path is routed directly around the structure,
//! or the structure is rebuilt inside the last strong component of the free
//! vertices, which lies in `N⁺(b)`, making `b` the anchor.
//!
//! Every rebuild happens in a strictly smaller vertex set, so the recursion
//! terminates. A shared work budget bounds the total effort.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::path::{shortest_path, Path};
use crate::scc::strong_components;
use crate::tournament::{min_out_degree_within, Tournament};
use crate::vertex_set::VertexSet;

use super::core::extract_min_outdeg_subtournament;

pub const DEFAULT_WORK_BUDGET: u64 = 2_000_000;

#[derive(Clone, Debug)]
pub struct EmbedOptions {
    /// Vertices the structure may use; all of them when `None`.
    pub universe: Option<VertexSet>,
    /// Routing and decomposition calls allowed before giving up.
    pub budget: u64,
    /// Anchor candidates tried at the top level, in decreasing out-degree.
    pub anchor_attempts: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            universe: None,
            budget: DEFAULT_WORK_BUDGET,
            anchor_attempts: 8,
        }
    }
}

/// Which routing rules fired during an embedding.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbedStats {
    /// Paths routed inside the anchor's out-neighbourhood.
    pub anchored_routes: usize,
    /// Paths routed `a ... w w' z b` through the anchor.
    pub anchor_shortcuts: usize,
    /// Rebuilds inside the last strong component of `N'`.
    pub descents: usize,
    /// Paths routed around an unanchored structure.
    pub direct_routes: usize,
    /// Rebuilds inside the last strong component of the free vertices.
    pub rebuilds: usize,
    /// Direct routes taken after a failed descent.
    pub fallbacks: usize,
    pub max_depth: usize,
    pub work: u64,
    /// `(d⁺(z), d⁺(q))` for each descent that came back anchored at `q`.
    pub degree_drops: Vec<(usize, usize)>,
}

pub(crate) struct Frame<S> {
    pub s: S,
    pub anchor: Option<usize>,
}

pub(crate) trait Plan {
    type S: Clone;
    fn seed(&self, e: &mut Embedder<'_>, universe: &VertexSet) -> Result<Frame<Self::S>, Error>;
    fn occupied<'a>(&self, s: &'a Self::S) -> &'a VertexSet;
    fn task(&self, s: &Self::S, step: usize) -> (usize, usize);
    fn install(&self, t: &Tournament, s: &mut Self::S, step: usize, p: Path);
}

pub(crate) struct Embedder<'t> {
    pub t: &'t Tournament,
    budget: u64,
    depth: usize,
    rank: usize,
    pub stats: EmbedStats,
}

impl<'t> Embedder<'t> {
    pub fn new(t: &'t Tournament, budget: u64) -> Self {
        Embedder {
            t,
            budget,
            depth: 0,
            rank: 0,
            stats: EmbedStats::default(),
        }
    }

    fn charge(&mut self) -> Result<(), Error> {
        self.stats.work += 1;
        if self.stats.work > self.budget {
            return Err(Error::ResourceLimit {
                budget: self.budget,
            });
        }
        Ok(())
    }

    fn nested<R>(&mut self, f: impl FnOnce(&mut Self) -> Result<R, Error>) -> Result<R, Error> {
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        let r = f(self);
        self.depth -= 1;
        r
    }

    /// The anchor for a fresh structure: the vertex of `universe` with the
    /// largest out-degree inside it, or the `rank`-th such at the top level.
    pub fn seed_anchor(&self, universe: &VertexSet) -> Option<usize> {
        let rank = if self.depth == 0 { self.rank } else { 0 };
        let mut by_degree: Vec<(usize, usize)> = universe
            .iter()
            .map(|v| (self.t.out_degree_within(v, universe), v))
            .collect();
        by_degree.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        by_degree.get(rank).map(|&(_, v)| v)
    }

    pub fn build<P: Plan>(
        &mut self,
        plan: &P,
        universe: &VertexSet,
        steps: usize,
    ) -> Result<Frame<P::S>, Error> {
        self.charge()?;
        let mut frame = plan.seed(self, universe)?;
        for step in 0..steps {
            frame = self.advance(plan, universe, frame, step)?;
        }
        Ok(frame)
    }

    pub fn advance<P: Plan>(
        &mut self,
        plan: &P,
        w: &VertexSet,
        frame: Frame<P::S>,
        step: usize,
    ) -> Result<Frame<P::S>, Error> {
        self.charge()?;
        match frame.anchor {
            Some(z) => self.route_anchored(plan, w, frame.s, z, step),
            None => self.route_free(plan, w, frame.s, step),
        }
    }

    fn route_free<P: Plan>(
        &mut self,
        plan: &P,
        w: &VertexSet,
        mut s: P::S,
        step: usize,
    ) -> Result<Frame<P::S>, Error> {
        let t = self.t;
        let (x, y) = plan.task(&s, step);
        let free = w.difference(plan.occupied(&s));
        if let Some(p) = shortest_path(t, x, y, &free) {
            plan.install(t, &mut s, step, p);
            self.stats.direct_routes += 1;
            return Ok(Frame { s, anchor: None });
        }
        if t.out_neighbors(x).is_disjoint(&free) {
            return Err(Error::exhausted(
                "claim",
                format!("{x} has no out-neighbour off the structure"),
            ));
        }
        self.charge()?;
        let last = strong_components(t, &free).last().clone();
        assert!(
            last.is_subset(t.out_neighbors(y)),
            "last free component not dominated by {y}"
        );
        self.stats.rebuilds += 1;
        let sub = self.nested(|e| e.build(plan, &last, step))?;
        self.route_anchored(plan, w, sub.s, y, step)
    }

    fn route_anchored<P: Plan>(
        &mut self,
        plan: &P,
        w: &VertexSet,
        mut s: P::S,
        z: usize,
        step: usize,
    ) -> Result<Frame<P::S>, Error> {
        let t = self.t;
        let (a, b) = plan.task(&s, step);
        let occ = plan.occupied(&s).clone();
        let nz = t.out_neighbors(z).intersection(w);
        assert!(occ.is_subset(&nz), "structure escaped N⁺({z})");
        let mut n_prime = nz.difference(&occ);
        n_prime.insert(a);
        n_prime.insert(b);

        if let Some(p) = shortest_path(t, a, b, &n_prime) {
            plan.install(t, &mut s, step, p);
            self.stats.anchored_routes += 1;
            return Ok(Frame { s, anchor: Some(z) });
        }

        let into_z = t.in_neighbors(z).intersection(w);
        let mut inner = n_prime.clone();
        inner.remove(b);
        if let Some((via, exit)) = first_exit(t, a, &inner, &into_z) {
            let head = shortest_path(t, a, via, &inner).expect("reachable");
            let tail = Path::new(vec![via, exit, z, b]);
            plan.install(t, &mut s, step, head.join(&tail));
            self.stats.anchor_shortcuts += 1;
            return Ok(Frame { s, anchor: None });
        }

        self.charge()?;
        let last = strong_components(t, &n_prime).last().clone();
        debug_assert!(!last.contains(b));
        self.stats.descents += 1;
        let attempt = self.nested(|e| {
            let sub = e.build(plan, &last, step)?;
            e.advance(plan, &last, sub, step)
        });
        match attempt {
            Ok(f) => {
                if let Some(q) = f.anchor {
                    let (dz, dq) = (t.out_degree_within(z, w), t.out_degree_within(q, w));
                    assert!(dq < dz, "anchor degree did not drop: {dz} -> {dq}");
                    self.stats.degree_drops.push((dz, dq));
                }
                assert!(plan.occupied(&f.s).is_subset(&last));
                Ok(Frame {
                    s: f.s,
                    anchor: Some(z),
                })
            }
            Err(err) if err.is_hypothesis_exhausted() => {
                let free = w.difference(&occ);
                match shortest_path(t, a, b, &free) {
                    Some(p) => {
                        plan.install(t, &mut s, step, p);
                        self.stats.fallbacks += 1;
                        Ok(Frame { s, anchor: None })
                    }
                    None => Err(err),
                }
            }
            Err(err) => Err(err),
        }
    }
}

/// BFS from `a` inside `inner`; the first vertex, level by level and then by
/// id, with an out-neighbour in `target`, together with that out-neighbour.
fn first_exit(
    t: &Tournament,
    a: usize,
    inner: &VertexSet,
    target: &VertexSet,
) -> Option<(usize, usize)> {
    let n = t.n();
    let mut seen = VertexSet::from_vertices(n, [a]);
    let mut level = seen.clone();
    while !level.is_empty() {
        for v in level.iter() {
            if let Some(x) = t.out_neighbors(v).first_common(target) {
                return Some((v, x));
            }
        }
        let mut next = VertexSet::empty(n);
        for v in level.iter() {
            next.union_with(t.out_neighbors(v));
        }
        next.intersect_with(inner);
        next.difference_with(&seen);
        seen.union_with(&next);
        level = next;
    }
    None
}

/// `k` branch vertices from `pool`: the highest out-degree vertices of a
/// vertex-minimal core of `T[pool]`, or of `pool` itself when the core is
/// too small. Returned in increasing id order.
pub(crate) fn choose_branch(t: &Tournament, pool: &VertexSet, k: usize) -> Vec<usize> {
    let threshold = min_out_degree_within(t, pool).min(k);
    let core = extract_min_outdeg_subtournament(t, pool, threshold).expect("threshold holds");
    let src = if core.len() >= k { core } else { pool.clone() };
    let mut ranked: Vec<(usize, usize)> = src
        .iter()
        .map(|v| (t.out_degree_within(v, &src), v))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out: Vec<usize> = ranked.into_iter().take(k).map(|(_, v)| v).collect();
    out.sort_unstable();
    out
}

/// Runs `plan` to completion, retrying with further anchor candidates when
/// the hypothesis runs out.
pub(crate) fn run_top<P: Plan>(
    t: &Tournament,
    plan: &P,
    steps: usize,
    opts: &EmbedOptions,
) -> Result<(P::S, EmbedStats), Error> {
    let universe = opts.universe.clone().unwrap_or_else(|| t.vertices());
    let attempts = opts.anchor_attempts.max(1).min(universe.len().max(1));
    let mut e = Embedder::new(t, opts.budget);
    let mut last = None;
    for rank in 0..attempts {
        e.rank = rank;
        match e.build(plan, &universe, steps) {
            Ok(f) => return Ok((f.s, e.stats)),
            Err(err) if err.is_hypothesis_exhausted() => last = Some(err),
            Err(err) => return Err(err),
        }
    }
    Err(last.expect("at least one attempt"))
}
