//! Rerouting two path families around a loop-augmented subdivision until
//! they can be spliced into a linkage.
//!
//! `Q_i` runs from `x_i` to a branch vertex `w_i`, `P_i` from a branch
//! vertex `z_i` to `y_i`. For each `i` a spare branch vertex `u_i` is
//! chosen, and the final path is
//! `Q_i ... q_i  P_{w_i u_i} ... u_i  P_{u_i z_i} ... p_i  P_i ... y_i`,
//! where `q_i` is the last vertex of `P_{w_i u_i}` on a `Q`-path and `p_i`
//! the first vertex of `P_{u_i z_i}` on a `P`-path. This needs `q_i` on
//! `Q_i`, `p_i` on `P_i`, and no `P`-path on `P_{w_i u_i}` nor `Q`-path on
//! `P_{u_i z_i}`. Whenever one of those or one of the loop conditions fails,
//! a rewrite through `u_i` applies that lowers
//! `(edges outside the structure, total vertices)`.

use std::collections::HashMap;

use crate::error::{Error, Violation};
use crate::path::{check_pairwise_disjoint, Path};
use crate::subdivision::KStar;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

use super::restricted::RestrictedEdgeSet;
use super::trace::TraceRecord;

/// `8k^2 + 4k`: how many branch vertices may be in-close to a family.
pub fn close_limit(k: usize) -> usize {
    8 * k * k + 4 * k
}

/// Branch vertices `u` at in-distance at most 2 from some vertex `x`.
pub(crate) fn close_in(es: &RestrictedEdgeSet) -> HashMap<usize, Vec<usize>> {
    let mut map: HashMap<usize, Vec<usize>> = HashMap::new();
    for &u in es.branch() {
        for (x, _) in es.in_ball(u, 2) {
            map.entry(x).or_default().push(u);
        }
    }
    map
}

/// A pair `(u, x)` with `u` in `good`, `x` on a path of `family` but not its
/// start, `u` at in-distance at most 2 from `x`, and not one of the trivial
/// pairs (start, second) or (start, third).
pub fn goodness_violation(
    es: &RestrictedEdgeSet,
    good: &[usize],
    family: &[Path],
) -> Option<(usize, usize)> {
    goodness_violation_with(&close_in(es), good, family)
}

fn goodness_violation_with(
    close: &HashMap<usize, Vec<usize>>,
    good: &[usize],
    family: &[Path],
) -> Option<(usize, usize)> {
    for p in family {
        let v = p.vertices();
        for (idx, &x) in v.iter().enumerate().skip(1) {
            for &u in close.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if !good.contains(&u) || (u == v[0] && idx <= 2) {
                    continue;
                }
                return Some((u, x));
            }
        }
    }
    None
}

/// The good set for `family` and the branch vertices discarded as close.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodSet {
    pub good: Vec<usize>,
    pub close: Vec<usize>,
}

/// Drops the family's start vertices and every branch vertex in-close to a
/// later family vertex; the rest is a set the family is good for.
pub fn select_good_set(
    es: &RestrictedEdgeSet,
    family: &[Path],
    k: usize,
) -> Result<GoodSet, Error> {
    let close = close_in(es);
    let starts: Vec<usize> = family.iter().map(Path::first).collect();
    let mut near = Vec::new();
    for p in family {
        for &x in &p.vertices()[1..] {
            for &u in close.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                if !starts.contains(&u) && !near.contains(&u) {
                    near.push(u);
                }
            }
        }
    }
    near.sort_unstable();
    if near.len() > close_limit(k) {
        return Err(Error::CountViolation {
            found: near.len(),
            limit: close_limit(k),
        });
    }
    let good: Vec<usize> = es
        .branch()
        .iter()
        .copied()
        .filter(|u| !starts.contains(u) && !near.contains(u))
        .collect();
    if good.len() < 2 * k {
        return Err(Error::exhausted(
            "good-set",
            format!("{} good branch vertices, need {}", good.len(), 2 * k),
        ));
    }
    debug_assert!(goodness_violation_with(&close, &good, family).is_none());
    Ok(GoodSet { good, close: near })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Fam {
    P,
    Q,
}

struct Finding {
    claim: &'static str,
    detail: String,
    rewrite: Option<(&'static str, Vec<Path>, Vec<Path>)>,
}

/// The state rerouted to a fixed point: families `P` (branch set to sinks)
/// and `Q` (sources to branch set), with `P` good for `good`.
pub struct LinkageContext<'a> {
    t: &'a Tournament,
    star: &'a KStar,
    es: RestrictedEdgeSet,
    close: HashMap<usize, Vec<usize>>,
    branch: VertexSet,
    sources: Vec<usize>,
    sinks: Vec<usize>,
    pub p: Vec<Path>,
    pub q: Vec<Path>,
    pub good: Vec<usize>,
    pub close_vertices: usize,
    pub trace: Vec<TraceRecord>,
}

impl<'a> LinkageContext<'a> {
    /// `q[i]` must run from `sources[i]` into the branch set and `p[i]` from
    /// the branch set to `sinks[i]`, all disjoint and internally disjoint
    /// from the branch set.
    pub fn new(
        t: &'a Tournament,
        star: &'a KStar,
        sources: Vec<usize>,
        sinks: Vec<usize>,
        p: Vec<Path>,
        q: Vec<Path>,
    ) -> Result<Self, Error> {
        if [sinks.len(), p.len(), q.len()].iter().any(|&l| l != sources.len()) {
            return Err(Error::Precondition(
                "sources, sinks and both path families must have equal length".into(),
            ));
        }
        let es = RestrictedEdgeSet::build(t, star);
        let branch = VertexSet::from_vertices(t.n(), star.branch().iter().copied());
        let k = sources.len();
        let gs = select_good_set(&es, &p, k)?;
        let ctx = LinkageContext {
            t,
            star,
            close: close_in(&es),
            es,
            branch,
            sources,
            sinks,
            p,
            q,
            good: gs.good,
            close_vertices: gs.close.len(),
            trace: Vec::new(),
        };
        ctx.validate(&ctx.p, &ctx.q)?;
        Ok(ctx)
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn restricted_edges(&self) -> &RestrictedEdgeSet {
        &self.es
    }

    fn potential_of(&self, p: &[Path], q: &[Path]) -> Vec<i64> {
        let off: usize = p.iter().chain(q).map(|x| self.es.off_edges(x)).sum();
        let size: usize = p.iter().chain(q).map(|x| x.vertices().len()).sum();
        vec![off as i64, size as i64]
    }

    pub fn potential(&self) -> Vec<i64> {
        self.potential_of(&self.p, &self.q)
    }

    /// The spare branch vertices `u_1, ..., u_k`.
    pub fn spare(&self) -> Result<Vec<usize>, Error> {
        let used: Vec<usize> = self
            .p
            .iter()
            .map(Path::first)
            .chain(self.q.iter().map(Path::last))
            .collect();
        let spare: Vec<usize> = self
            .good
            .iter()
            .copied()
            .filter(|u| !used.contains(u))
            .take(self.k())
            .collect();
        if spare.len() < self.k() {
            return Err(Error::exhausted(
                "good-set",
                format!("{} spare branch vertices, need {}", spare.len(), self.k()),
            ));
        }
        Ok(spare)
    }

    fn validate(&self, p: &[Path], q: &[Path]) -> Result<(), Violation> {
        let mut named = Vec::new();
        for (i, x) in p.iter().enumerate() {
            let name = format!("P{i}");
            x.check(self.t, &name)?;
            if !self.branch.contains(x.first()) || x.last() != self.sinks[i] {
                return Err(Violation::Endpoint {
                    path: name,
                    detail: format!("expected branch -> {}", self.sinks[i]),
                });
            }
            named.push((name, x));
        }
        for (i, x) in q.iter().enumerate() {
            let name = format!("Q{i}");
            x.check(self.t, &name)?;
            if x.first() != self.sources[i] || !self.branch.contains(x.last()) {
                return Err(Violation::Endpoint {
                    path: name,
                    detail: format!("expected {} -> branch", self.sources[i]),
                });
            }
            named.push((name, x));
        }
        for (name, x) in &named {
            if let Some(&v) = x.interior().iter().find(|&&v| self.branch.contains(v)) {
                return Err(Violation::Forbidden {
                    path: name.clone(),
                    vertex: v,
                    why: "branch vertex",
                });
            }
        }
        check_pairwise_disjoint(&named)
    }

    fn owners(&self) -> HashMap<usize, (Fam, usize, usize)> {
        let mut m = HashMap::new();
        for (fam, family) in [(Fam::P, &self.p), (Fam::Q, &self.q)] {
            for (i, x) in family.iter().enumerate() {
                for (pos, &v) in x.vertices().iter().enumerate() {
                    m.insert(v, (fam, i, pos));
                }
            }
        }
        m
    }

    /// `P_{w u}` and, when it is long, its exit loop from `u` back to the
    /// penultimate vertex.
    fn toward(&self, w: usize, u: usize) -> (&'a Path, Option<&'a Path>) {
        let pw = self.star.base.path(w, u);
        let lw = (pw.len() >= 2).then(|| &self.star.loops_for(w, u).expect("long pair").exit);
        (pw, lw)
    }

    /// `P_{u z}` and, when long, its entry loop from the second vertex to `u`.
    fn away(&self, u: usize, z: usize) -> (&'a Path, Option<&'a Path>) {
        let pz = self.star.base.path(u, z);
        let lz = (pz.len() >= 2).then(|| &self.star.loops_for(u, z).expect("long pair").entry);
        (pz, lz)
    }

    fn with_q(&self, j: usize, path: Vec<usize>) -> (Vec<Path>, Vec<Path>) {
        let mut q = self.q.clone();
        q[j] = Path::new(path);
        (self.p.clone(), q)
    }

    fn with_p(&self, j: usize, path: Vec<usize>) -> (Vec<Path>, Vec<Path>) {
        let mut p = self.p.clone();
        p[j] = Path::new(path);
        (p, self.q.clone())
    }

    fn scan(&self) -> Result<Vec<Finding>, Error> {
        let spare = self.spare()?;
        let own = self.owners();
        let on = |v: usize, f: Fam| own.get(&v).filter(|o| o.0 == f).map(|o| (o.1, o.2));
        let mut found = Vec::new();

        for (i, &u) in spare.iter().enumerate() {
            let w = self.q[i].last();
            let (_, lw) = self.toward(w, u);
            if let Some(lw) = lw {
                let lv = lw.vertices();
                if let Some((a, (j, pos))) =
                    (1..lv.len()).find_map(|a| on(lv[a], Fam::Q).map(|o| (a, o)))
                {
                    if !(a == 1 || (a == lv.len() - 1 && j == i)) {
                        let mut path = self.q[j].vertices()[..=pos].to_vec();
                        path.push(u);
                        let (p, q) = self.with_q(j, path);
                        found.push(Finding {
                            claim: "exit-loop",
                            detail: format!("Q{j} meets the exit loop at {u} first at {}", lv[a]),
                            rewrite: Some(("q-to-spare", p, q)),
                        });
                    }
                }
            }
        }

        for (i, &u) in spare.iter().enumerate() {
            let w = self.q[i].last();
            let (pw, lw) = self.toward(w, u);
            let pv = pw.vertices();
            for c in 1..pv.len().saturating_sub(1) {
                if on(pv[c], Fam::P).is_none() {
                    continue;
                }
                if c != pv.len() - 2 {
                    return Err(Error::ClaimViolation {
                        claim: "path-to-spare",
                        detail: format!("P meets P({w},{u}) at {} before its penultimate", pv[c]),
                    });
                }
                let lv = lw.expect("long path").vertices();
                let (a, (m, pos)) = (1..lv.len())
                    .find_map(|a| on(lv[a], Fam::P).map(|o| (a, o)))
                    .expect("penultimate vertex on P");
                let hit = (1..=a).find_map(|b| on(lv[b], Fam::Q).map(|o| (b, o)));
                let rewrite = match hit {
                    None => {
                        let mut path = lv[..=a].to_vec();
                        path.extend_from_slice(&self.p[m].vertices()[pos + 1..]);
                        let (p, q) = self.with_p(m, path);
                        Some(("p-from-spare", p, q))
                    }
                    Some((1, (j, r))) if lv.len() > 2 => {
                        let mut path = self.q[j].vertices()[..=r].to_vec();
                        path.extend_from_slice(&[lv[2], u]);
                        let (p, q) = self.with_q(j, path);
                        Some(("q-via-loop", p, q))
                    }
                    _ => None,
                };
                found.push(Finding {
                    claim: "path-to-spare",
                    detail: format!("P meets P({w},{u}) at {}", pv[c]),
                    rewrite,
                });
            }
            let (c, (j, pos)) = (0..pv.len())
                .rev()
                .find_map(|c| on(pv[c], Fam::Q).map(|o| (c, o)))
                .expect("w on Q");
            if j != i {
                let mut path = self.q[j].vertices()[..=pos].to_vec();
                path.extend_from_slice(&pv[c + 1..]);
                let (p, q) = self.with_q(j, path);
                found.push(Finding {
                    claim: "path-to-spare",
                    detail: format!("last Q-vertex {} of P({w},{u}) lies on Q{j}", pv[c]),
                    rewrite: Some(("q-along-path", p, q)),
                });
            }
        }

        for (i, &u) in spare.iter().enumerate() {
            let z = self.p[i].first();
            let (pz, lz) = self.away(u, z);
            if let Some(lz) = lz {
                if let Some(&v) = lz.vertices().iter().find(|&&v| on(v, Fam::P).is_some()) {
                    return Err(Error::ClaimViolation {
                        claim: "entry-loop",
                        detail: format!("P meets the entry loop of P({u},{z}) at {v}"),
                    });
                }
            }
            let pv = pz.vertices();
            for c in 1..pv.len().saturating_sub(1) {
                let Some((j, pos)) = on(pv[c], Fam::Q) else {
                    continue;
                };
                let rewrite = if c >= 2 {
                    let mut path = self.q[j].vertices()[..=pos].to_vec();
                    path.push(u);
                    let (p, q) = self.with_q(j, path);
                    Some(("q-to-spare", p, q))
                } else {
                    let lv = lz.expect("long path").vertices();
                    let (a, (m, r)) = (0..lv.len())
                        .rev()
                        .find_map(|a| on(lv[a], Fam::Q).map(|o| (a, o)))
                        .expect("second vertex on Q");
                    let mut path = self.q[m].vertices()[..=r].to_vec();
                    path.extend_from_slice(&lv[a + 1..]);
                    let (p, q) = self.with_q(m, path);
                    Some(("q-via-loop", p, q))
                };
                found.push(Finding {
                    claim: "path-from-spare",
                    detail: format!("Q meets P({u},{z}) at {}", pv[c]),
                    rewrite,
                });
            }
            let (c, (j, pos)) = (0..pv.len())
                .find_map(|c| on(pv[c], Fam::P).map(|o| (c, o)))
                .expect("z on P");
            if j != i {
                let mut path = pv[..=c].to_vec();
                path.extend_from_slice(&self.p[j].vertices()[pos + 1..]);
                let (p, q) = self.with_p(j, path);
                found.push(Finding {
                    claim: "path-from-spare",
                    detail: format!("first P-vertex {} of P({u},{z}) lies on P{j}", pv[c]),
                    rewrite: Some(("p-along-path", p, q)),
                });
            }
        }
        Ok(found)
    }

    fn acceptable(&self, p: &[Path], q: &[Path], before: &[i64]) -> bool {
        self.validate(p, q).is_ok()
            && (p == self.p.as_slice()
                || goodness_violation_with(&self.close, &self.good, p).is_none())
            && self.potential_of(p, q).as_slice() < before
    }

    /// Applies rewrites until none is needed. Each one is logged.
    pub fn reroute_fixed_point(&mut self) -> Result<(), Error> {
        loop {
            let found = self.scan()?;
            if found.is_empty() {
                return Ok(());
            }
            let before = self.potential();
            let mut applied = false;
            for f in &found {
                if let Some((rule, p, q)) = &f.rewrite {
                    if self.acceptable(p, q, &before) {
                        self.p = p.clone();
                        self.q = q.clone();
                        self.trace.push(TraceRecord {
                            stage: "reroute".into(),
                            rule: rule.to_string(),
                            before: before.clone(),
                            after: self.potential(),
                        });
                        applied = true;
                        break;
                    }
                }
            }
            if !applied {
                let f = &found[0];
                return Err(Error::ClaimViolation {
                    claim: f.claim,
                    detail: format!("{}; no improving rewrite applies", f.detail),
                });
            }
        }
    }

    /// Direct check of every splice condition and loop condition.
    pub fn check_claims(&self) -> Result<(), Error> {
        let found = self.scan()?;
        match found.first() {
            None => Ok(()),
            Some(f) => Err(Error::ClaimViolation {
                claim: f.claim,
                detail: f.detail.clone(),
            }),
        }
    }

    /// The spliced linkage, path `i` from `sources[i]` to `sinks[i]` through
    /// the `i`-th spare branch vertex.
    pub fn splice(&self) -> Result<(Vec<Path>, Vec<usize>), Error> {
        self.check_claims()?;
        let spare = self.spare()?;
        let own = self.owners();
        let mut out = Vec::new();
        for (i, &u) in spare.iter().enumerate() {
            let (w, z) = (self.q[i].last(), self.p[i].first());
            let pw = self.star.base.path(w, u).vertices();
            let pz = self.star.base.path(u, z).vertices();
            let c = (0..pw.len())
                .rev()
                .find(|&c| matches!(own.get(&pw[c]), Some((Fam::Q, _, _))))
                .expect("w on Q");
            let d = (0..pz.len())
                .find(|&d| matches!(own.get(&pz[d]), Some((Fam::P, _, _))))
                .expect("z on P");
            let qpos = self.q[i].position(pw[c]).expect("claims hold");
            let ppos = self.p[i].position(pz[d]).expect("claims hold");
            let mut v = self.q[i].vertices()[..=qpos].to_vec();
            v.extend_from_slice(&pw[c + 1..]);
            v.extend_from_slice(&pz[1..=d]);
            v.extend_from_slice(&self.p[i].vertices()[ppos + 1..]);
            out.push(Path::new(v));
        }
        Ok((out, spare))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::{embed_kstar_with, EmbedOptions};

    #[test]
    fn close_limit_values() {
        assert_eq!(close_limit(1), 12);
        assert_eq!(close_limit(3), 84);
    }

    #[test]
    fn mismatched_lengths_are_rejected() {
        let t = Tournament::random(150, 3);
        let star = embed_kstar_with(&t, 4, &EmbedOptions::default()).unwrap().0;
        let err = LinkageContext::new(&t, &star, vec![0, 1], vec![2], Vec::new(), Vec::new())
            .err()
            .unwrap();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn trivial_family_is_good() {
        let t = Tournament::random(150, 4);
        let star = embed_kstar_with(&t, 4, &EmbedOptions::default()).unwrap().0;
        let es = RestrictedEdgeSet::build(&t, &star);
        assert_eq!(goodness_violation(&es, star.branch(), &[]), None);
        let gs = select_good_set(&es, &[], 2).unwrap();
        assert!(gs.close.is_empty());
        assert!(select_good_set(&es, &[], 3).is_err());
    }
}
