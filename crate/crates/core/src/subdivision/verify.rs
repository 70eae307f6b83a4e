//! Structural checks written against the raw tournament only.

use std::collections::{HashMap, HashSet};

use crate::error::Violation;
use crate::path::Path;
use crate::tournament::Tournament;

use super::types::{KStar, MinimalSubdivision, PartialSubdivision};

fn walk(t: &Tournament, name: &str, p: &Path) -> Result<(), Violation> {
    let v = p.vertices();
    if v.is_empty() {
        return Err(Violation::EmptyPath { path: name.into() });
    }
    let mut seen = HashSet::new();
    for &x in v {
        if x >= t.n() {
            return Err(Violation::OutOfRange {
                path: name.into(),
                vertex: x,
            });
        }
        if !seen.insert(x) {
            return Err(Violation::RepeatedVertex {
                path: name.into(),
                vertex: x,
            });
        }
    }
    for w in v.windows(2) {
        if !t.has_edge(w[0], w[1]) {
            return Err(Violation::NotAnEdge {
                path: name.into(),
                from: w[0],
                to: w[1],
            });
        }
    }
    Ok(())
}

fn chord_free(t: &Tournament, name: &str, p: &Path) -> Result<(), Violation> {
    let v = p.vertices();
    for i in 0..v.len() {
        for j in i + 2..v.len() {
            if t.has_edge(v[i], v[j]) {
                return Err(Violation::ForwardChord {
                    path: name.into(),
                    from: v[i],
                    to: v[j],
                });
            }
        }
    }
    Ok(())
}

fn endpoints(name: &str, p: &Path, from: usize, to: usize) -> Result<(), Violation> {
    let v = p.vertices();
    if v.first() != Some(&from) || v.last() != Some(&to) {
        return Err(Violation::Endpoint {
            path: name.into(),
            detail: format!("expected {from} -> {to}, got {v:?}"),
        });
    }
    Ok(())
}

/// Records interior vertices, failing on the first one claimed twice or
/// lying in `reserved`.
struct Interiors {
    owner: HashMap<usize, String>,
}

impl Interiors {
    fn claim(
        &mut self,
        name: &str,
        p: &Path,
        reserved: &HashSet<usize>,
        why: &'static str,
    ) -> Result<(), Violation> {
        let v = p.vertices();
        if v.len() <= 2 {
            return Ok(());
        }
        for &x in &v[1..v.len() - 1] {
            if reserved.contains(&x) {
                return Err(Violation::Forbidden {
                    path: name.into(),
                    vertex: x,
                    why,
                });
            }
            if let Some(prev) = self.owner.insert(x, name.to_string()) {
                return Err(Violation::Disjointness {
                    vertex: x,
                    first: prev,
                    second: name.into(),
                });
            }
        }
        Ok(())
    }
}

/// Paths join distinct branch vertices, respect their keys, and are
/// internally disjoint from each other and from the branch set.
pub fn verify_partial(t: &Tournament, ps: &PartialSubdivision) -> Result<(), Violation> {
    let k = ps.branch.len();
    let branch: HashSet<usize> = ps.branch.iter().copied().collect();
    if branch.len() != k {
        return Err(Violation::Other("repeated branch vertex".into()));
    }
    if let Some(&b) = ps.branch.iter().find(|&&b| b >= t.n()) {
        return Err(Violation::OutOfRange {
            path: "branch".into(),
            vertex: b,
        });
    }
    if ps.paths.len() > k * k.saturating_sub(1) {
        return Err(Violation::Other(format!(
            "{} paths exceed the {} ordered pairs",
            ps.paths.len(),
            k * k.saturating_sub(1)
        )));
    }
    let mut pairs = HashSet::new();
    let mut interiors = Interiors {
        owner: HashMap::new(),
    };
    for pp in &ps.paths {
        let (u, v) = pp.pair;
        let name = format!("P({u},{v})");
        if u == v || !branch.contains(&u) || !branch.contains(&v) {
            return Err(Violation::Other(format!(
                "{name} does not join two branch vertices"
            )));
        }
        if !pairs.insert(pp.pair) {
            return Err(Violation::Other(format!("{name} embedded twice")));
        }
        walk(t, &name, &pp.path)?;
        endpoints(&name, &pp.path, u, v)?;
        interiors.claim(&name, &pp.path, &branch, "branch vertex")?;
    }
    Ok(())
}

/// All ordered pairs embedded, no forward chords, and for every branch pair
/// exactly one direction a single edge.
pub fn verify_subdivision(t: &Tournament, s: &MinimalSubdivision) -> Result<(), Violation> {
    let ps = s.as_partial();
    verify_partial(t, ps)?;
    let k = ps.branch.len();
    if ps.paths.len() != k * k.saturating_sub(1) {
        return Err(Violation::Incomplete(format!(
            "{} of {} ordered pairs embedded",
            ps.paths.len(),
            k * k.saturating_sub(1)
        )));
    }
    let mut len: HashMap<(usize, usize), usize> = HashMap::new();
    for pp in &ps.paths {
        chord_free(t, &format!("P({},{})", pp.pair.0, pp.pair.1), &pp.path)?;
        len.insert(pp.pair, pp.path.vertices().len() - 1);
    }
    for (i, &u) in ps.branch.iter().enumerate() {
        for &v in &ps.branch[i + 1..] {
            let ones = [len[&(u, v)], len[&(v, u)]]
                .iter()
                .filter(|&&l| l == 1)
                .count();
            if ones != 1 {
                return Err(Violation::PairLength { u, v, found: ones });
            }
        }
    }
    Ok(())
}

/// Base checks plus: one loop pair per branch pair, on its long path, with
/// the right endpoints; loops chord-free and internally disjoint from the
/// base and from each other.
pub fn verify_kstar(t: &Tournament, s: &KStar) -> Result<(), Violation> {
    verify_subdivision(t, &s.base)?;
    let ps = s.base.as_partial();
    let mut base_vertices: HashSet<usize> = ps.branch.iter().copied().collect();
    for pp in &ps.paths {
        base_vertices.extend(pp.path.vertices().iter().copied());
    }
    let k = ps.branch.len();
    if s.loops.len() != k * k.saturating_sub(1) / 2 {
        return Err(Violation::Incomplete(format!(
            "{} loop pairs for {} branch pairs",
            s.loops.len(),
            k * k.saturating_sub(1) / 2
        )));
    }
    let mut seen = HashSet::new();
    let mut interiors = Interiors {
        owner: HashMap::new(),
    };
    for lp in &s.loops {
        let (u, v) = lp.pair;
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(Violation::Other(format!("loops for {{{u},{v}}} twice")));
        }
        let Some(p) = ps.paths.iter().find(|pp| pp.pair == (u, v)) else {
            return Err(Violation::Other(format!("no path P({u},{v}) for loops")));
        };
        let pv = p.path.vertices();
        if pv.len() < 3 {
            return Err(Violation::Other(format!(
                "loops attached to single edge P({u},{v})"
            )));
        }
        let entry = format!("Lentry({u},{v})");
        let exit = format!("Lexit({u},{v})");
        walk(t, &entry, &lp.entry)?;
        walk(t, &exit, &lp.exit)?;
        endpoints(&entry, &lp.entry, pv[1], u)?;
        endpoints(&exit, &lp.exit, v, pv[pv.len() - 2])?;
        chord_free(t, &entry, &lp.entry)?;
        chord_free(t, &exit, &lp.exit)?;
        interiors.claim(&entry, &lp.entry, &base_vertices, "subdivision vertex")?;
        interiors.claim(&exit, &lp.exit, &base_vertices, "subdivision vertex")?;
    }
    Ok(())
}
