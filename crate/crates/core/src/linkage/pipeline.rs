use std::cell::OnceCell;

use serde::{Deserialize, Serialize};

use crate::connectivity::LinkageInstance;
use crate::error::{Error, Violation};
use crate::path::{check_pairwise_disjoint, shortest_path, Path};
use crate::subdivision::{
    embed_kstar_with, verify_kstar, EmbedOptions, EmbedStats, KStar, LoopPair,
    MinimalSubdivision, PairPath, PartialSubdivision,
};
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

use super::context::LinkageContext;
use super::reversing::reversing_oriented;
use super::trace::TraceRecord;

/// A verified linkage and how it was found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkReport {
    /// Path `i` runs from source `i` to sink `i`.
    pub paths: Vec<Path>,
    /// The branch vertex each path was routed through; empty for `k = 1`.
    pub via: Vec<usize>,
    /// Branch vertices of the subdivision.
    pub r: usize,
    /// The work was done in the reversed tournament.
    pub reflected: bool,
    pub close_vertices: usize,
    pub good_set: usize,
    pub embed: Option<EmbedStats>,
    pub trace: Vec<TraceRecord>,
}

#[derive(Clone, Debug)]
#[derive(Default)]
pub struct LinkOptions {
    /// Branch vertices to embed; `12k^2` when `None`.
    pub r: Option<usize>,
    pub embed: EmbedOptions,
}


/// The same structure seen in the reversed tournament.
pub fn reverse_kstar(star: &KStar) -> KStar {
    let ps = star.base.as_partial();
    let base = PartialSubdivision {
        branch: ps.branch.clone(),
        paths: ps
            .paths
            .iter()
            .map(|pp| PairPath {
                pair: (pp.pair.1, pp.pair.0),
                path: pp.path.reversed(),
            })
            .collect(),
    };
    KStar {
        base: MinimalSubdivision(base),
        loops: star
            .loops
            .iter()
            .map(|l| LoopPair {
                pair: (l.pair.1, l.pair.0),
                entry: l.exit.reversed(),
                exit: l.entry.reversed(),
            })
            .collect(),
    }
}

/// Path `i` joins `sources[i]` to `sinks[i]`; all paths disjoint.
pub fn verify_linkage(
    t: &Tournament,
    inst: &LinkageInstance,
    paths: &[Path],
) -> Result<(), Violation> {
    if paths.len() != inst.k() {
        return Err(Violation::Incomplete(format!(
            "{} paths for {} pairs",
            paths.len(),
            inst.k()
        )));
    }
    let mut named = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        let name = format!("L{i}");
        p.check(t, &name)?;
        if p.first() != inst.sources[i] || p.last() != inst.sinks[i] {
            return Err(Violation::Endpoint {
                path: name,
                detail: format!("expected {} -> {}", inst.sources[i], inst.sinks[i]),
            });
        }
        named.push((name, p));
    }
    check_pairwise_disjoint(&named)
}

/// Links `x_i` to `y_i` for every `i` by vertex-disjoint paths.
pub fn link_terminals(
    t: &Tournament,
    inst: &LinkageInstance,
    r: Option<usize>,
) -> Result<Vec<Path>, Error> {
    let opts = LinkOptions {
        r,
        ..LinkOptions::default()
    };
    link_terminals_with(t, inst, &opts).map(|rep| rep.paths)
}

/// Embeds a loop-augmented subdivision away from the terminals, joins the
/// terminals to its branch set by a reversing system, reroutes, and
/// splices. Any stage may report [`Error::HypothesisExhausted`].
pub fn link_terminals_with(
    t: &Tournament,
    inst: &LinkageInstance,
    opts: &LinkOptions,
) -> Result<LinkReport, Error> {
    let inst = LinkageInstance::new(inst.sources.clone(), inst.sinks.clone())?;
    if inst.sources.iter().chain(&inst.sinks).any(|&v| v >= t.n()) {
        return Err(Error::Precondition("terminal out of range".into()));
    }
    let k = inst.k();
    if k == 1 {
        let path = shortest_path(t, inst.sources[0], inst.sinks[0], &t.vertices()).ok_or_else(
            || Error::exhausted("route", format!("{} does not reach {}", inst.sources[0], inst.sinks[0])),
        )?;
        return Ok(LinkReport {
            paths: vec![path],
            via: Vec::new(),
            r: 0,
            reflected: false,
            close_vertices: 0,
            good_set: 0,
            embed: None,
            trace: Vec::new(),
        });
    }

    let r = opts.r.unwrap_or(12 * k * k);
    let terminals = VertexSet::from_vertices(t.n(), inst.sources.iter().chain(&inst.sinks).copied());
    let mut embed = opts.embed.clone();
    let mut universe = embed.universe.take().unwrap_or_else(|| t.vertices());
    universe.difference_with(&terminals);
    embed.universe = Some(universe);
    let (star, stats) = embed_kstar_with(t, r, &embed)?;
    let branch = VertexSet::from_vertices(t.n(), star.branch().iter().copied());

    let rev = OnceCell::new();
    let sys = reversing_oriented(t, &rev, &inst.sources, &inst.sinks, &branch)?;
    let (tf, fstar, xs, ys) = if sys.reflected {
        let rt = rev.get().expect("reflection builds the reverse");
        let rs = reverse_kstar(&star);
        debug_assert!(verify_kstar(rt, &rs).is_ok());
        (rt, rs, inst.sinks.clone(), inst.sources.clone())
    } else {
        (t, star, inst.sources.clone(), inst.sinks.clone())
    };

    let mut ctx = LinkageContext::new(tf, &fstar, xs, ys, sys.to_b, sys.from_a)?;
    ctx.reroute_fixed_point()?;
    let (mut paths, via) = ctx.splice()?;
    if sys.reflected {
        paths = paths.iter().map(Path::reversed).collect();
    }
    verify_linkage(t, &inst, &paths)?;
    for (p, &u) in paths.iter().zip(&via) {
        if !p.contains(u) {
            return Err(Violation::Other(format!("path misses its branch vertex {u}")).into());
        }
    }
    let mut trace = sys.trace;
    trace.extend(ctx.trace.iter().cloned());
    Ok(LinkReport {
        paths,
        via,
        r,
        reflected: sys.reflected,
        close_vertices: ctx.close_vertices,
        good_set: ctx.good.len(),
        embed: Some(stats),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversal_is_an_involution() {
        let t = Tournament::random(150, 6);
        let star = embed_kstar_with(&t, 4, &EmbedOptions::default()).unwrap().0;
        let rs = reverse_kstar(&star);
        assert!(verify_kstar(&t.reverse(), &rs).is_ok());
        assert_eq!(reverse_kstar(&rs), star);
    }

    #[test]
    fn verify_linkage_catches_shared_vertices() {
        let t = Tournament::transitive(6);
        let inst = LinkageInstance::new(vec![0, 1], vec![4, 5]).unwrap();
        let good = [Path::new(vec![0, 2, 4]), Path::new(vec![1, 3, 5])];
        assert!(verify_linkage(&t, &inst, &good).is_ok());
        let shared = [Path::new(vec![0, 2, 4]), Path::new(vec![1, 2, 5])];
        assert!(verify_linkage(&t, &inst, &shared).is_err());
        assert!(verify_linkage(&t, &inst, &good[..1]).is_err());
    }

    #[test]
    fn too_few_branch_vertices_is_a_precondition() {
        let t = Tournament::random(200, 1);
        let inst = LinkageInstance::new(vec![0, 1], vec![2, 3]).unwrap();
        let err = link_terminals(&t, &inst, Some(5)).unwrap_err();
        assert!(!err.is_hypothesis_exhausted(), "{err}");
    }
}
