//! One function per subcommand that turns `(params, seed)` into a record, and
//! the matching certificate check used on replay.

use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use serde_json::{json, Value};
use tourlink::connectivity::{
    is_k_connected, is_k_linked_all, is_k_linked_exact, max_disjoint_paths, vertex_connectivity,
    LinkageInstance, LinkageOutcome, PathSystem, DEFAULT_NODE_BUDGET,
};
use tourlink::linkage::{
    find_reversing_system, link_terminals_with, verify_linkage, verify_reversing_system,
    LinkOptions, TraceRecord,
};
use tourlink::subdivision::{
    bound_d, bound_dstar, embed_kstar_with, embed_subdivision_with,
    extract_min_outdeg_subtournament, verify_kstar, verify_subdivision, EmbedOptions, KStar,
    MinimalSubdivision,
};
use tourlink::tournament::{min_in_degree, min_out_degree};
use tourlink::{strong_components, Error, Path, Tournament, VertexSet};

use crate::record::{ExperimentRecord, Outcome, Params};

/// Subcommands that produce one record per seed.
pub const COMMANDS: &[&str] = &[
    "gen",
    "degrees",
    "scc",
    "connectivity",
    "disjoint-paths",
    "linked-exact",
    "extract-core",
    "subdivide",
    "kstar",
    "reverse-paths",
    "link",
    "construct",
    "bounds",
];

struct Run {
    outcome: Outcome,
    certificate: Option<Value>,
    detail: Option<String>,
    trace: Option<Vec<TraceRecord>>,
}

impl Run {
    fn success(cert: Value) -> Self {
        Run {
            outcome: Outcome::Success,
            certificate: Some(cert),
            detail: None,
            trace: None,
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("certificates serialize")
}

fn ids(s: &VertexSet) -> Vec<usize> {
    s.iter().collect()
}

fn set(t: &Tournament, vs: &[usize]) -> anyhow::Result<VertexSet> {
    if let Some(&v) = vs.iter().find(|&&v| v >= t.n()) {
        bail!("vertex {v} out of range for n = {}", t.n());
    }
    Ok(VertexSet::from_vertices(t.n(), vs.iter().copied()))
}

fn embed_options(p: &Params) -> EmbedOptions {
    let mut o = EmbedOptions::default();
    if let Some(b) = p.budget {
        o.budget = b;
    }
    o
}

fn terminals(p: &Params, k: usize) -> (Vec<usize>, Vec<usize>) {
    let sources = if p.sources.is_empty() { (0..k).collect() } else { p.sources.clone() };
    let sinks = if p.sinks.is_empty() { (k..2 * k).collect() } else { p.sinks.clone() };
    (sources, sinks)
}

/// `A`, `B` and `L` for a reversing system: the construction's parts when
/// it has them, otherwise the flags, otherwise `0..k`, `k..2k`, `2k..6k`.
fn reversing_sets(p: &Params, seed: u64, k: usize) -> anyhow::Result<(Vec<usize>, Vec<usize>, Vec<usize>)> {
    if let Some(c) = p.construction(seed)? {
        if let (Some(a), Some(b)) = (c.parts.get("A"), c.parts.get("B")) {
            if p.sources.is_empty() && p.sinks.is_empty() && p.pool.is_empty() {
                let l = c
                    .parts
                    .iter()
                    .filter(|(name, _)| name.starts_with('L'))
                    .flat_map(|(_, v)| v.iter().copied())
                    .collect();
                return Ok((a.clone(), b.clone(), l));
            }
        }
    }
    let (a, b) = terminals(p, k);
    let pool = if p.pool.is_empty() { (2 * k..6 * k).collect() } else { p.pool.clone() };
    Ok((a, b, pool))
}

fn bounds(k: usize, m: Option<usize>) -> Result<Value, Error> {
    let top = k * (k - 1);
    let ms: Vec<usize> = match m {
        Some(m) => vec![m],
        None => (0..=top).collect(),
    };
    let d: Vec<String> = ms
        .iter()
        .map(|&m| bound_d(k, m).map(|x| x.to_string()))
        .collect::<Result<_, _>>()?;
    let dstar = bound_dstar(k, top).map(|x| x.to_string()).ok();
    Ok(json!({ "k": k, "m": ms, "d": d, "dstar": dstar }))
}

fn run(command: &str, p: &Params, seed: u64, input: Option<&Tournament>) -> anyhow::Result<Run> {
    if command == "bounds" {
        return Ok(Run::success(bounds(p.need_k()?, p.m)?));
    }
    let t = p.tournament(seed, input)?;
    let n = t.n();
    let out = match command {
        "gen" => Run::success(json!({ "n": n })),
        "construct" => {
            let parts = p.construction(seed)?.map(|c| c.parts);
            Run::success(json!({ "n": n, "parts": parts }))
        }
        "degrees" => {
            let out: Vec<usize> = (0..n).map(|v| t.out_degree(v)).collect();
            Run::success(json!({
                "min_out": min_out_degree(&t),
                "min_in": min_in_degree(&t),
                "out": out,
            }))
        }
        "scc" => {
            let comps: Vec<Vec<usize>> = strong_components(&t, &t.vertices())
                .components
                .iter()
                .map(ids)
                .collect();
            Run::success(json!({ "components": comps }))
        }
        "connectivity" => Run::success(json!({ "kappa": vertex_connectivity(&t) })),
        "disjoint-paths" => {
            let limit = p.k.unwrap_or(usize::MAX);
            let sys = max_disjoint_paths(
                &t,
                &set(&t, &p.from)?,
                &set(&t, &p.to)?,
                &set(&t, &p.avoid)?,
                &set(&t, &p.exclude)?,
                limit,
            )?;
            Run::success(to_value(&sys))
        }
        "linked-exact" => {
            let budget = p.budget.unwrap_or(DEFAULT_NODE_BUDGET);
            if p.sources.is_empty() && p.sinks.is_empty() {
                match is_k_linked_all(&t, p.need_k()?, budget)? {
                    None => Run::success(json!({ "k": p.k, "linked": true })),
                    Some(inst) => Run {
                        outcome: Outcome::Counterexample,
                        certificate: Some(json!({ "instance": inst })),
                        detail: None,
                        trace: None,
                    },
                }
            } else {
                let inst = LinkageInstance::new(p.sources.clone(), p.sinks.clone())?;
                match is_k_linked_exact(&t, &inst, budget)? {
                    LinkageOutcome::Linked(paths) => Run::success(json!({ "paths": paths })),
                    LinkageOutcome::NotLinked => Run {
                        outcome: Outcome::Counterexample,
                        certificate: Some(json!({ "instance": inst })),
                        detail: None,
                        trace: None,
                    },
                }
            }
        }
        "extract-core" => {
            let core = extract_min_outdeg_subtournament(&t, &t.vertices(), p.need_k()?)?;
            Run::success(json!({ "core": ids(&core) }))
        }
        "subdivide" => {
            let (s, stats) = embed_subdivision_with(&t, p.need_k()?, &embed_options(p))?;
            Run::success(json!({ "subdivision": s, "stats": stats }))
        }
        "kstar" => {
            let (s, stats) = embed_kstar_with(&t, p.need_k()?, &embed_options(p))?;
            Run::success(json!({ "kstar": s, "stats": stats }))
        }
        "reverse-paths" => {
            let k = p.need_k()?;
            let (a, b, l) = reversing_sets(p, seed, k)?;
            let sys = find_reversing_system(&t, &a, &b, &set(&t, &l)?)?;
            Run {
                outcome: Outcome::Success,
                certificate: Some(json!({
                    "a": a,
                    "b": b,
                    "l": l,
                    "from_a": sys.from_a,
                    "to_b": sys.to_b,
                    "state": sys.state,
                })),
                detail: None,
                trace: Some(sys.trace),
            }
        }
        "link" => {
            let (sources, sinks) = terminals(p, p.need_k()?);
            let inst = LinkageInstance::new(sources, sinks)?;
            let opts = LinkOptions {
                r: p.r,
                embed: embed_options(p),
            };
            let mut report = link_terminals_with(&t, &inst, &opts)?;
            let trace = std::mem::take(&mut report.trace);
            let mut cert = to_value(&report);
            cert.as_object_mut().expect("report is an object").remove("trace");
            cert["instance"] = to_value(&inst);
            Run {
                outcome: Outcome::Success,
                certificate: Some(cert),
                detail: None,
                trace: Some(trace),
            }
        }
        other => bail!("unknown command {other:?}"),
    };
    Ok(out)
}

/// Runs `command` once and records what happened. Hypothesis exhaustion
/// and every other failure become outcomes, not errors.
pub fn execute(command: &str, params: &Params, seed: u64, input: Option<&Tournament>) -> ExperimentRecord {
    let start = Instant::now();
    let res = run(command, params, seed, input);
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let run = res.unwrap_or_else(|e| {
        let outcome = match e.downcast_ref::<Error>() {
            Some(err) if err.is_hypothesis_exhausted() => Outcome::HypothesisExhausted,
            _ => Outcome::Error,
        };
        Run {
            outcome,
            certificate: None,
            detail: Some(format!("{e:#}")),
            trace: None,
        }
    });
    ExperimentRecord {
        command: command.to_string(),
        params: params.clone(),
        seed,
        outcome: run.outcome,
        certificate: run.certificate,
        detail: run.detail,
        wall_time_ms,
        potential_trace: run.trace,
    }
}

fn field<T: serde::de::DeserializeOwned>(cert: &Value, key: &str) -> anyhow::Result<T> {
    serde_json::from_value(cert.get(key).cloned().ok_or_else(|| anyhow!("certificate lacks {key:?}"))?)
        .with_context(|| format!("certificate field {key:?}"))
}

/// Checks a certificate against the tournament by the matching verifier,
/// without reusing the code that produced it.
pub fn check_certificate(
    command: &str,
    p: &Params,
    seed: u64,
    t: &Tournament,
    outcome: Outcome,
    cert: &Value,
) -> anyhow::Result<()> {
    let n = t.n();
    match (command, outcome) {
        ("gen" | "construct", _) => {
            if field::<usize>(cert, "n")? != n {
                bail!("vertex count differs");
            }
        }
        ("degrees", _) => {
            let out: Vec<usize> = field(cert, "out")?;
            if out.len() != n || (0..n).any(|v| out[v] != t.out_neighbors(v).len()) {
                bail!("out-degrees differ");
            }
            if field::<usize>(cert, "min_out")? != out.iter().copied().min().unwrap_or(0) {
                bail!("minimum out-degree differs");
            }
            let min_in = (0..n).map(|v| n - 1 - out[v]).min().unwrap_or(0);
            if field::<usize>(cert, "min_in")? != min_in {
                bail!("minimum in-degree differs");
            }
        }
        ("scc", _) => {
            let comps: Vec<Vec<usize>> = field(cert, "components")?;
            let mut of = vec![usize::MAX; n];
            for (i, c) in comps.iter().enumerate() {
                for &v in c {
                    if v >= n || of[v] != usize::MAX {
                        bail!("components do not partition the vertices");
                    }
                    of[v] = i;
                }
                if strong_components(t, &set(t, c)?).len() != 1 {
                    bail!("component {i} is not strongly connected");
                }
            }
            if of.contains(&usize::MAX) {
                bail!("components do not cover the vertices");
            }
            for u in 0..n {
                for v in 0..n {
                    if t.has_edge(u, v) && of[u] > of[v] {
                        bail!("edge {u}->{v} runs against the order");
                    }
                }
            }
        }
        ("connectivity", _) => {
            let kappa: usize = field(cert, "kappa")?;
            if !is_k_connected(t, kappa) || is_k_connected(t, kappa + 1) {
                bail!("connectivity is not {kappa}");
            }
        }
        ("disjoint-paths", _) => {
            let sys: PathSystem = serde_json::from_value(cert.clone())?;
            sys.verify(t)?;
            if sys.sources != p.from || sys.sinks != p.to {
                bail!("path system was routed between other sets");
            }
        }
        ("linked-exact", Outcome::Success) => {
            if let Some(paths) = cert.get("paths") {
                let paths: Vec<Path> = serde_json::from_value(paths.clone())?;
                let inst = LinkageInstance::new(p.sources.clone(), p.sinks.clone())?;
                verify_linkage(t, &inst, &paths)?;
            }
        }
        ("linked-exact", Outcome::Counterexample) => {
            let inst: LinkageInstance = field(cert, "instance")?;
            let budget = p.budget.unwrap_or(DEFAULT_NODE_BUDGET);
            if is_k_linked_exact(t, &inst, budget)?.is_linked() {
                bail!("counterexample instance is linked");
            }
        }
        ("extract-core", _) => {
            let k = p.need_k()?;
            let core: Vec<usize> = field(cert, "core")?;
            let deg = |x: usize, skip: usize| core.iter().filter(|&&y| y != skip && t.has_edge(x, y)).count();
            if core.iter().any(|&x| deg(x, usize::MAX) < k) {
                bail!("core has a vertex of out-degree below {k}");
            }
            if let Some(&v) = core.iter().find(|&&v| core.iter().all(|&x| x == v || deg(x, v) >= k)) {
                bail!("core vertex {v} can be deleted");
            }
        }
        ("subdivide", _) => {
            let s: MinimalSubdivision = field(cert, "subdivision")?;
            verify_subdivision(t, &s)?;
            if Some(s.k()) != p.k {
                bail!("wrong number of branch vertices");
            }
        }
        ("kstar", _) => {
            let s: KStar = field(cert, "kstar")?;
            verify_kstar(t, &s)?;
            if Some(s.branch().len()) != p.k {
                bail!("wrong number of branch vertices");
            }
        }
        ("reverse-paths", _) => {
            let (a, b, l): (Vec<usize>, Vec<usize>, Vec<usize>) =
                (field(cert, "a")?, field(cert, "b")?, field(cert, "l")?);
            if (a.clone(), b.clone(), l.clone()) != reversing_sets(p, seed, p.need_k()?)? {
                bail!("terminal sets differ from the parameters");
            }
            let from_a: Vec<Path> = field(cert, "from_a")?;
            let to_b: Vec<Path> = field(cert, "to_b")?;
            verify_reversing_system(t, &a, &b, &set(t, &l)?, &from_a, &to_b)?;
        }
        ("link", _) => {
            let (sources, sinks) = terminals(p, p.need_k()?);
            let inst = LinkageInstance::new(sources, sinks)?;
            if field::<LinkageInstance>(cert, "instance")? != inst {
                bail!("terminals differ from the parameters");
            }
            let paths: Vec<Path> = field(cert, "paths")?;
            verify_linkage(t, &inst, &paths)?;
        }
        ("bounds", _) => {
            if bounds(p.need_k()?, p.m)? != *cert {
                bail!("bound values differ");
            }
        }
        (other, o) => bail!("no certificate check for {other} with outcome {o:?}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(source: &str, n: usize, k: usize) -> Params {
        Params {
            source: source.into(),
            n: Some(n),
            k: Some(k),
            ..Params::default()
        }
    }

    #[test]
    fn every_command_checks_its_own_certificate() {
        let cases = [
            ("gen", params("random", 30, 1)),
            ("degrees", params("random", 30, 1)),
            ("scc", params("random", 12, 1)),
            ("connectivity", params("random", 20, 1)),
            ("extract-core", params("random", 60, 3)),
            ("subdivide", params("random", 150, 3)),
            ("kstar", params("random", 200, 3)),
            ("reverse-paths", params("random", 200, 2)),
            ("construct", params("popielarz", 20, 2)),
            ("linked-exact", params("random", 9, 1)),
            ("bounds", params("random", 1, 2)),
        ];
        for (cmd, p) in cases {
            let r = execute(cmd, &p, 1, None);
            assert_eq!(r.outcome, Outcome::Success, "{cmd}: {:?}", r.detail);
            let t = p.tournament(1, None).unwrap();
            check_certificate(cmd, &p, 1, &t, r.outcome, r.certificate.as_ref().unwrap())
                .unwrap_or_else(|e| panic!("{cmd}: {e}"));
        }
    }

    #[test]
    fn tampered_certificates_fail() {
        let p = params("random", 40, 3);
        let t = p.tournament(2, None).unwrap();
        let r = execute("extract-core", &p, 2, None);
        let mut cert = r.certificate.unwrap();
        let core = cert["core"].as_array_mut().unwrap();
        core.pop();
        assert!(check_certificate("extract-core", &p, 2, &t, r.outcome, &cert).is_err());
        let kappa = vertex_connectivity(&t);
        let wrong = json!({ "kappa": kappa + 1 });
        assert!(check_certificate("connectivity", &p, 2, &t, Outcome::Success, &wrong).is_err());
    }

    #[test]
    fn failures_become_outcomes() {
        let r = execute("subdivide", &params("transitive", 8, 2), 0, None);
        assert_eq!(r.outcome, Outcome::HypothesisExhausted);
        let r = execute("subdivide", &Params { source: "random".into(), n: Some(8), ..Params::default() }, 0, None);
        assert_eq!(r.outcome, Outcome::Error);
        assert!(r.detail.unwrap().contains("--k"));
    }

    #[test]
    fn bound_table() {
        let v = bounds(2, None).unwrap();
        assert_eq!(v["d"], json!(["1", "7", "343"]));
    }
}
