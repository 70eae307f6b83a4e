//! `k` paths into a landing set `L` and `k` paths out of it, all disjoint.
//!
//! Vertices outside `A ∪ B ∪ L` with many out-neighbours in `L` and an
//! in-edge from `A` give length-two paths `a w l`; symmetrically for `B`.
//! The remaining sinks are reached from `L` by a flow (`P`), then the
//! remaining sources reach `L` by a second flow (`Q`) that keeps clear of
//! the first few vertices of each `P`-path. Collisions between the two
//! families are removed by exchange rewrites, each lowering the potential
//! `(-|W|, |∪P|, -|P'|, |∪Q|, |∪P ∩ ∪Q|)`, where `P'` are the `P`-paths
//! whose second vertex has at least `2k` in-neighbours in `L`.

use std::cell::OnceCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::connectivity::disjoint_paths_unchecked;
use crate::error::{Error, Violation};
use crate::path::{check_pairwise_disjoint, Path};
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

use super::trace::TraceRecord;

/// The matchings behind the length-two paths, in the caller's orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReversingState {
    /// `(a, w)` with `a -> w`, each `w` having at least `2k` out-neighbours
    /// in `L`.
    pub w_a: Vec<(usize, usize)>,
    /// `(w, b)` with `w -> b`, each `w` having at least `2k` in-neighbours
    /// in `L`.
    pub w_b: Vec<(usize, usize)>,
    /// The system was built in the reversed tournament.
    pub reflected: bool,
    /// Routed `L`-to-sink paths whose second vertex is rich in `L`.
    pub rich_second: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReversingSystem {
    /// One path per source, ordered like the sources.
    pub from_a: Vec<Path>,
    /// One path per sink, ordered like the sinks.
    pub to_b: Vec<Path>,
    pub state: ReversingState,
    pub trace: Vec<TraceRecord>,
}

/// A system in the orientation it was built in: `t` itself, or its reverse
/// with the roles of `A` and `B` exchanged.
pub(crate) struct Oriented {
    pub reflected: bool,
    pub from_a: Vec<Path>,
    pub to_b: Vec<Path>,
    pub w_a: Vec<(usize, usize)>,
    pub w_b: Vec<(usize, usize)>,
    pub rich_second: usize,
    pub trace: Vec<TraceRecord>,
}

struct Hit {
    qi: usize,
    i: usize,
    pi: usize,
    j: usize,
}

enum Step {
    Continue,
    Restart,
}

struct Engine<'t> {
    fwd: &'t Tournament,
    rev: &'t OnceCell<Tournament>,
    reflected: bool,
    k: usize,
    a: Vec<usize>,
    b: Vec<usize>,
    l: VertexSet,
    w_a: Vec<(usize, usize)>,
    w_b: Vec<(usize, usize)>,
    p: Vec<Path>,
    q: Vec<Path>,
    trace: Vec<TraceRecord>,
}

impl<'t> Engine<'t> {
    fn t(&self) -> &'t Tournament {
        if self.reflected {
            self.rev.get_or_init(|| self.fwd.reverse())
        } else {
            self.fwd
        }
    }

    fn n(&self) -> usize {
        self.fwd.n()
    }

    fn rich_in(&self, v: usize) -> bool {
        self.t().in_neighbors(v).intersection_len(&self.l) >= 2 * self.k
    }

    fn rich_out(&self, v: usize) -> bool {
        self.t().out_neighbors(v).intersection_len(&self.l) >= 2 * self.k
    }

    fn set(&self, vs: impl IntoIterator<Item = usize>) -> VertexSet {
        VertexSet::from_vertices(self.n(), vs)
    }

    fn reflect(&mut self) {
        std::mem::swap(&mut self.a, &mut self.b);
        let w_a = self.w_b.iter().map(|&(w, b)| (b, w)).collect();
        let w_b = self.w_a.iter().map(|&(a, w)| (w, a)).collect();
        self.w_a = w_a;
        self.w_b = w_b;
        self.p.clear();
        self.q.clear();
        self.reflected = !self.reflected;
    }

    fn is_rich_second(&self, p: &Path) -> bool {
        !p.is_empty() && self.rich_in(p.vertices()[1])
    }

    fn potential(&self) -> Vec<i64> {
        let w = (self.w_a.len() + self.w_b.len()) as i64;
        let up: usize = self.p.iter().map(|p| p.vertices().len()).sum();
        let uq: usize = self.q.iter().map(|p| p.vertices().len()).sum();
        let on_p = self.set(self.p.iter().flat_map(|p| p.vertices().iter().copied()));
        let inter = self
            .q
            .iter()
            .flat_map(|p| p.vertices())
            .filter(|&&v| on_p.contains(v))
            .count();
        let rich = self.p.iter().filter(|p| self.is_rich_second(p)).count();
        vec![-w, up as i64, -(rich as i64), uq as i64, inter as i64]
    }

    fn record(&mut self, rule: &'static str, before: Vec<i64>) -> Result<(), Error> {
        let after = self.potential();
        if after >= before {
            return Err(Error::PotentialNotDecreasing { rule });
        }
        self.trace.push(TraceRecord {
            stage: "reversing".into(),
            rule: rule.into(),
            before,
            after,
        });
        Ok(())
    }

    fn w_set(&self) -> VertexSet {
        self.set(
            self.w_a
                .iter()
                .map(|&(_, w)| w)
                .chain(self.w_b.iter().map(|&(w, _)| w)),
        )
    }

    fn greedy_matchings(&mut self) {
        let t = self.t();
        let mut blocked = self.l.clone();
        blocked.union_with(&self.set(self.a.iter().chain(&self.b).copied()));
        for &a in &self.a.clone() {
            let w = t
                .out_neighbors(a)
                .difference(&blocked)
                .iter()
                .find(|&w| self.rich_out(w));
            if let Some(w) = w {
                blocked.insert(w);
                self.w_a.push((a, w));
            }
        }
        for &b in &self.b.clone() {
            let w = t
                .in_neighbors(b)
                .difference(&blocked)
                .iter()
                .find(|&w| self.rich_in(w));
            if let Some(w) = w {
                blocked.insert(w);
                self.w_b.push((w, b));
            }
        }
    }

    /// `L` minus every `L`-vertex in use, except those of `P[skip]`.
    fn free_l(&self, skip: Option<usize>) -> VertexSet {
        let mut free = self.l.clone();
        for (i, p) in self.p.iter().enumerate() {
            if Some(i) != skip {
                free.remove(p.first());
            }
        }
        for q in &self.q {
            free.remove(q.last());
        }
        free
    }

    fn p_avoid(&self) -> VertexSet {
        let mut avoid = self.set(self.a.iter().copied());
        avoid.union_with(&self.w_set());
        avoid.union_with(&self.set(self.w_b.iter().map(|&(_, b)| b)));
        avoid
    }

    fn route_p(&mut self) -> Result<(), Error> {
        let matched = self.set(self.w_b.iter().map(|&(_, b)| b));
        let b2 = self.set(self.b.iter().copied().filter(|&b| !matched.contains(b)));
        let sys = disjoint_paths_unchecked(self.t(), &self.l, &b2, &self.p_avoid(), &self.l, b2.len());
        if sys.len() < b2.len() {
            return Err(Error::exhausted(
                "reversing-paths",
                format!("{} of {} paths from L to the unmatched sinks", sys.len(), b2.len()),
            ));
        }
        self.p = sys.paths;
        Ok(())
    }

    /// Shorter or richer replacement of `P[idx]`'s start, if any.
    fn better_start(&self, idx: usize) -> Option<(&'static str, Path)> {
        let t = self.t();
        let x = self.p[idx].vertices();
        let free = self.free_l(Some(idx));
        for j in (2..x.len()).rev() {
            if let Some(l) = t.in_neighbors(x[j]).first_common(&free) {
                let mut v = vec![l];
                v.extend_from_slice(&x[j..]);
                return Some(("p-start", Path::new(v)));
            }
        }
        let mut blocked = self.p_avoid();
        blocked.union_with(&self.l);
        for p in &self.p {
            blocked.union_with(&p.to_set(self.n()));
        }
        let lowest = if self.is_rich_second(&self.p[idx]) { 3 } else { 2 };
        for j in (lowest..x.len()).rev() {
            for m in t.in_neighbors(x[j]).difference(&blocked).iter() {
                if j == 2 && !self.rich_in(m) {
                    continue;
                }
                if let Some(l) = t.in_neighbors(m).first_common(&free) {
                    let mut v = vec![l, m];
                    v.extend_from_slice(&x[j..]);
                    return Some((if j == 2 { "p-rich-second" } else { "p-detour" }, Path::new(v)));
                }
            }
        }
        None
    }

    fn improve_p(&mut self) -> Result<(), Error> {
        let t = self.t();
        'again: loop {
            for idx in 0..self.p.len() {
                let before = self.potential();
                let mut p = self.p[idx].clone();
                if p.shortcut_chords(t) {
                    self.p[idx] = p;
                    self.record("p-chord", before)?;
                    continue 'again;
                }
                if let Some((rule, p)) = self.better_start(idx) {
                    self.p[idx] = p;
                    self.record(rule, before)?;
                    continue 'again;
                }
            }
            return Ok(());
        }
    }

    fn q_avoid(&self) -> VertexSet {
        let mut y = self.set(self.a.iter().copied());
        let unmatched = self.set(self.unmatched_a());
        y.difference_with(&unmatched);
        y.union_with(&self.w_set());
        y.union_with(&self.set(self.b.iter().copied()));
        for p in &self.p {
            let v = p.vertices();
            let range = if self.is_rich_second(p) { 1..3 } else { 0..2 };
            for i in range {
                if let Some(&x) = v.get(i) {
                    y.insert(x);
                }
            }
        }
        y
    }

    fn unmatched_a(&self) -> Vec<usize> {
        self.a
            .iter()
            .copied()
            .filter(|a| !self.w_a.iter().any(|&(m, _)| m == *a))
            .collect()
    }

    fn route_q(&mut self) -> Result<(), Error> {
        let y = self.q_avoid();
        let a2 = self.set(self.unmatched_a());
        let to = self.l.difference(&y);
        let sys = disjoint_paths_unchecked(self.t(), &a2, &to, &y, &self.l, a2.len());
        if sys.len() < a2.len() {
            return Err(Error::exhausted(
                "reversing-paths",
                format!("{} of {} paths from the unmatched sources to L", sys.len(), a2.len()),
            ));
        }
        self.q = sys.paths;
        Ok(())
    }

    fn improve_q(&mut self) -> Result<(), Error> {
        let t = self.t();
        'again: loop {
            for idx in 0..self.q.len() {
                let before = self.potential();
                let mut q = self.q[idx].clone();
                if q.shortcut_chords(t) {
                    self.q[idx] = q;
                    self.record("q-chord", before)?;
                    continue 'again;
                }
                let mut free = self.free_l(None);
                free.insert(self.q[idx].last());
                let v = self.q[idx].vertices();
                for i in 0..v.len().saturating_sub(2) {
                    if let Some(z) = t.out_neighbors(v[i]).first_common(&free) {
                        let mut w = v[..=i].to_vec();
                        w.push(z);
                        self.q[idx] = Path::new(w);
                        self.record("q-exit", before)?;
                        continue 'again;
                    }
                }
            }
            return Ok(());
        }
    }

    fn first_hit(&self) -> Option<Hit> {
        let mut on_p = HashMap::new();
        for (pi, p) in self.p.iter().enumerate() {
            for (j, &x) in p.vertices().iter().enumerate() {
                on_p.insert(x, (pi, j));
            }
        }
        for (qi, q) in self.q.iter().enumerate() {
            for (i, y) in q.vertices().iter().enumerate() {
                if let Some(&(pi, j)) = on_p.get(y) {
                    return Some(Hit { qi, i, pi, j });
                }
            }
        }
        None
    }

    /// After `P` changed: re-tighten it and route `Q` afresh.
    fn reroute_after_p(&mut self) -> Result<(), Error> {
        self.improve_p()?;
        self.route_q()?;
        self.improve_q()
    }

    fn resolve(&mut self, h: Hit) -> Result<Step, Error> {
        let t = self.t();
        let before = self.potential();
        let q = self.q[h.qi].vertices().to_vec();
        let p = self.p[h.pi].vertices().to_vec();
        let free = self.free_l(None);
        if h.j == 0 {
            let Some(x) = t.in_neighbors(p[1]).first_common(&free) else {
                return Err(Error::ClaimViolation {
                    claim: "reversing",
                    detail: format!("second vertex {} has no free in-neighbour in L", p[1]),
                });
            };
            let mut v = vec![x];
            v.extend_from_slice(&p[1..]);
            self.p[h.pi] = Path::new(v);
            self.record("p-restart", before)?;
            return Ok(Step::Continue);
        }
        let prev = q[h.i - 1];
        let y = q[h.i];
        if h.i == 1 {
            if self.rich_out(y) {
                self.w_a.push((prev, y));
                self.p.clear();
                self.q.clear();
                self.record("matching", before)?;
                return Ok(Step::Restart);
            }
            let Some(z) = t.in_neighbors(y).first_common(&free) else {
                return Err(Error::ClaimViolation {
                    claim: "reversing",
                    detail: format!("{y} has neither 2k out- nor a free in-neighbour in L"),
                });
            };
            let mut v = vec![z, y];
            v.extend_from_slice(&p[h.j..]);
            self.p[h.pi] = Path::new(v);
        } else if let Some(z) = t.out_neighbors(prev).first_common(&free) {
            let mut v = q[..h.i].to_vec();
            v.push(z);
            self.q[h.qi] = Path::new(v);
            self.record("q-exit", before)?;
            return Ok(Step::Continue);
        } else {
            let z = free.first().expect("|L| exceeds the used L-vertices");
            let mut v = vec![z, prev];
            v.extend_from_slice(&p[h.j..]);
            self.p[h.pi] = Path::new(v);
        }
        self.q.clear();
        self.record("p-through-q", before)?;
        self.reroute_after_p()?;
        Ok(Step::Continue)
    }

    fn run(&mut self) -> Result<(), Error> {
        self.greedy_matchings();
        'restart: loop {
            if self.w_a.len() > self.w_b.len() {
                self.reflect();
            }
            self.p.clear();
            self.q.clear();
            self.route_p()?;
            self.improve_p()?;
            self.route_q()?;
            self.improve_q()?;
            while let Some(h) = self.first_hit() {
                if let Step::Restart = self.resolve(h)? {
                    continue 'restart;
                }
            }
            return Ok(());
        }
    }

    fn attach(&mut self) -> (Vec<Path>, Vec<Path>) {
        let t = self.t();
        let mut free = self.free_l(None);
        let mut from_a = self.q.clone();
        let mut to_b = self.p.clone();
        for &(a, w) in &self.w_a {
            let l = t.out_neighbors(w).first_common(&free).expect("2k out-neighbours in L");
            free.remove(l);
            from_a.push(Path::new(vec![a, w, l]));
        }
        for &(w, b) in &self.w_b {
            let l = t.in_neighbors(w).first_common(&free).expect("2k in-neighbours in L");
            free.remove(l);
            to_b.push(Path::new(vec![l, w, b]));
        }
        let pos = |xs: &[usize], v: usize| xs.iter().position(|&x| x == v);
        from_a.sort_by_key(|p| pos(&self.a, p.first()));
        to_b.sort_by_key(|p| pos(&self.b, p.last()));
        (from_a, to_b)
    }
}

fn check_input(n: usize, a: &[usize], b: &[usize], l: &VertexSet) -> Result<(), Error> {
    let k = a.len();
    let ends = VertexSet::from_vertices(n, a.iter().chain(b).copied());
    if k == 0 || b.len() != k || ends.len() != 2 * k {
        return Err(Error::Precondition(
            "A and B must be disjoint sets of the same positive size".into(),
        ));
    }
    if a.iter().chain(b).any(|&v| v >= n) || l.universe() != n {
        return Err(Error::Precondition("vertex out of range".into()));
    }
    if !ends.is_disjoint(l) || l.len() < 4 * k {
        return Err(Error::Precondition(format!(
            "L must avoid A and B and have at least {} vertices",
            4 * k
        )));
    }
    Ok(())
}

pub(crate) fn reversing_oriented(
    t: &Tournament,
    rev: &OnceCell<Tournament>,
    a: &[usize],
    b: &[usize],
    l: &VertexSet,
) -> Result<Oriented, Error> {
    check_input(t.n(), a, b, l)?;
    let mut e = Engine {
        fwd: t,
        rev,
        reflected: false,
        k: a.len(),
        a: a.to_vec(),
        b: b.to_vec(),
        l: l.clone(),
        w_a: Vec::new(),
        w_b: Vec::new(),
        p: Vec::new(),
        q: Vec::new(),
        trace: Vec::new(),
    };
    e.run()?;
    let rich_second = e.p.iter().filter(|p| e.is_rich_second(p)).count();
    let (from_a, to_b) = e.attach();
    Ok(Oriented {
        reflected: e.reflected,
        from_a,
        to_b,
        w_a: e.w_a,
        w_b: e.w_b,
        rich_second,
        trace: e.trace,
    })
}

/// `k = |A|` paths from `A` to `L` and `k` paths from `L` to `B`, pairwise
/// disjoint and internally disjoint from `L`.
///
/// Needs `|A| = |B|`, `|L| >= 4|A|`, and the three sets disjoint. The
/// guarantee is for `4k`-connected tournaments; elsewhere the search reports
/// a [`Error::HypothesisExhausted`] when routing falls short.
pub fn find_reversing_system(
    t: &Tournament,
    a: &[usize],
    b: &[usize],
    l: &VertexSet,
) -> Result<ReversingSystem, Error> {
    let rev = OnceCell::new();
    let o = reversing_oriented(t, &rev, a, b, l)?;
    let sys = if o.reflected {
        ReversingSystem {
            from_a: o.to_b.iter().map(Path::reversed).collect(),
            to_b: o.from_a.iter().map(Path::reversed).collect(),
            state: ReversingState {
                w_a: o.w_b.iter().map(|&(w, a)| (a, w)).collect(),
                w_b: o.w_a.iter().map(|&(b, w)| (w, b)).collect(),
                reflected: true,
                rich_second: o.rich_second,
            },
            trace: o.trace,
        }
    } else {
        ReversingSystem {
            from_a: o.from_a,
            to_b: o.to_b,
            state: ReversingState {
                w_a: o.w_a,
                w_b: o.w_b,
                reflected: false,
                rich_second: o.rich_second,
            },
            trace: o.trace,
        }
    };
    verify_reversing_system(t, a, b, l, &sys.from_a, &sys.to_b)?;
    Ok(sys)
}

/// Path `i` of `from_a` leaves `a[i]` and path `i` of `to_b` enters `b[i]`;
/// all `2k` paths are disjoint and meet `L` only at their `L`-end.
pub fn verify_reversing_system(
    t: &Tournament,
    a: &[usize],
    b: &[usize],
    l: &VertexSet,
    from_a: &[Path],
    to_b: &[Path],
) -> Result<(), Violation> {
    if from_a.len() != a.len() || to_b.len() != b.len() {
        return Err(Violation::Incomplete(format!(
            "{} + {} paths for {} sources and {} sinks",
            from_a.len(),
            to_b.len(),
            a.len(),
            b.len()
        )));
    }
    let mut named = Vec::new();
    for (i, p) in from_a.iter().enumerate() {
        let name = format!("Q{i}");
        p.check(t, &name)?;
        if p.first() != a[i] || !l.contains(p.last()) || p.is_empty() {
            return Err(Violation::Endpoint {
                path: name,
                detail: format!("expected {} -> L, got {:?}", a[i], p.vertices()),
            });
        }
        named.push((name, p));
    }
    for (i, p) in to_b.iter().enumerate() {
        let name = format!("P{i}");
        p.check(t, &name)?;
        if p.last() != b[i] || !l.contains(p.first()) {
            return Err(Violation::Endpoint {
                path: name,
                detail: format!("expected L -> {}, got {:?}", b[i], p.vertices()),
            });
        }
        named.push((name, p));
    }
    for (name, p) in &named {
        if let Some(&v) = p.interior().iter().find(|&&v| l.contains(v)) {
            return Err(Violation::Forbidden {
                path: name.clone(),
                vertex: v,
                why: "landing set",
            });
        }
    }
    check_pairwise_disjoint(&named)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::popielarz;
    use crate::constructions::Internal;

    #[test]
    fn direct_edges_k1() {
        // a = 0, b = 1, L = {2, 3, 4, 5}; the only edge into b from L is 3 -> 1
        let t = Tournament::from_fn(6, |i, j| (i, j) != (1, 3));
        let l = VertexSet::from_vertices(6, 2..6);
        let sys = find_reversing_system(&t, &[0], &[1], &l).unwrap();
        assert_eq!(sys.from_a[0].len(), 1);
        assert_eq!(sys.to_b[0].len(), 1);
    }

    #[test]
    fn random_dense_instance() {
        let t = Tournament::random(300, 3);
        let l = VertexSet::from_vertices(300, 4..12);
        let sys = find_reversing_system(&t, &[0, 1], &[2, 3], &l).unwrap();
        verify_reversing_system(&t, &[0, 1], &[2, 3], &l, &sys.from_a, &sys.to_b).unwrap();
        assert!(sys.trace.iter().all(TraceRecord::improved));
    }

    #[test]
    fn popielarz_exhausts() {
        let c = popielarz(2, 60, Internal::Seeded(1)).unwrap();
        let part = |s: &str| c.parts[s].clone();
        let mut l = c.part("L1");
        l.union_with(&c.part("L2"));
        l.union_with(&c.part("L3"));
        let err = find_reversing_system(&c.tournament, &part("A"), &part("B"), &l).unwrap_err();
        assert!(err.is_hypothesis_exhausted(), "{err}");
    }
}
