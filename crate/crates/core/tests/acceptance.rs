//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any fails.

use std::collections::{HashMap, HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use tourlink::connectivity::{
    is_k_connected, is_k_linked_all, max_disjoint_paths, vertex_connectivity, LinkageInstance, DEFAULT_NODE_BUDGET,
};
use tourlink::constructions::{popielarz, triangle_blowup, Internal};
use tourlink::linkage::{find_reversing_system, link_terminals_with, LinkOptions, ReversingSystem, TraceRecord};
use tourlink::subdivision::{
    bound_d, bound_dstar, embed_kstar, embed_subdivision, extract_min_outdeg_subtournament,
    verify_kstar, verify_subdivision, KStar, MinimalSubdivision,
};
use tourlink::{Error, Path, Tournament, VertexSet};

type Outcome = Result<String, String>;
/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn walks(t: &Tournament, v: &[usize]) -> bool {
    v.windows(2).all(|w| t.has_edge(w[0], w[1])) && v.iter().collect::<HashSet<_>>().len() == v.len()
}

fn forward_chord(t: &Tournament, v: &[usize]) -> Option<(usize, usize)> {
    (0..v.len())
        .flat_map(|i| (i + 2..v.len()).map(move |j| (i, j)))
        .find(|&(i, j)| t.has_edge(v[i], v[j]))
        .map(|(i, j)| (v[i], v[j]))
}

/// Strongly connected once the vertices in `gone` are deleted.
fn strong_without(t: &Tournament, gone: u32) -> bool {
    let alive: Vec<usize> = (0..t.n()).filter(|&v| gone >> v & 1 == 0).collect();
    let Some(&root) = alive.first() else { return true };
    [true, false].into_iter().all(|forward| {
        let mut seen = 1u32 << root;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &alive {
                let e = if forward { t.has_edge(v, w) } else { t.has_edge(w, v) };
                if e && seen >> w & 1 == 0 {
                    seen |= 1 << w;
                    stack.push(w);
                }
            }
        }
        alive.iter().all(|&v| seen >> v & 1 == 1)
    })
}

fn connectivity_by_cuts(t: &Tournament) -> usize {
    let n = t.n();
    (0..n - 1)
        .find(|&size| (0u32..1 << n).any(|c| c.count_ones() as usize == size && !strong_without(t, c)))
        .unwrap_or(n - 1)
}

/// Some vertex of `from` reaches some vertex of `to` avoiding `blocked`.
fn reaches(t: &Tournament, from: u32, to: u32, blocked: u32) -> bool {
    let mut seen = from & !blocked;
    let mut stack: Vec<usize> = (0..t.n()).filter(|&v| seen >> v & 1 == 1).collect();
    while let Some(v) = stack.pop() {
        if to >> v & 1 == 1 {
            return true;
        }
        for w in 0..t.n() {
            if (seen | blocked) >> w & 1 == 0 && t.has_edge(v, w) {
                seen |= 1 << w;
                stack.push(w);
            }
        }
    }
    false
}

fn min_separator(t: &Tournament, from: u32, to: u32) -> usize {
    let n = t.n();
    (0..=n)
        .find(|&size| (0u32..1 << n).any(|s| s.count_ones() as usize == size && !reaches(t, from, to, s)))
        .unwrap()
}

/// Two disjoint paths `x0 -> y0` and `x1 -> y1`, by enumerating simple paths
/// for the first pair.
fn two_linked(t: &Tournament, x: [usize; 2], y: [usize; 2]) -> bool {
    fn first(t: &Tournament, v: usize, used: u32, x: [usize; 2], y: [usize; 2]) -> bool {
        if v == y[0] {
            return reaches(t, 1 << x[1], 1 << y[1], used);
        }
        (0..t.n()).any(|w| {
            used >> w & 1 == 0 && w != x[1] && w != y[1] && t.has_edge(v, w) && first(t, w, used | 1 << w, x, y)
        })
    }
    first(t, x[0], 1 << x[0], x, y)
}

fn check_subdivision(t: &Tournament, s: &MinimalSubdivision) -> Result<(), String> {
    let branch = s.branch();
    let k = branch.len();
    let bset: HashSet<usize> = branch.iter().copied().collect();
    ensure(bset.len() == k, || "repeated branch vertex".into())?;
    let mut by_pair: HashMap<(usize, usize), &[usize]> = HashMap::new();
    let mut owner: HashSet<usize> = HashSet::new();
    for pp in s.paths() {
        let v = pp.path.vertices();
        ensure(by_pair.insert(pp.pair, v).is_none(), || format!("pair {:?} twice", pp.pair))?;
        ensure((v[0], v[v.len() - 1]) == pp.pair, || format!("path ends differ from {:?}", pp.pair))?;
        ensure(walks(t, v), || format!("{:?} is not a path", pp.pair))?;
        ensure(forward_chord(t, v).is_none(), || format!("{:?} has a forward chord", pp.pair))?;
        for &x in &v[1..v.len() - 1] {
            ensure(!bset.contains(&x) && owner.insert(x), || format!("interior vertex {x} shared"))?;
        }
    }
    ensure(by_pair.len() == k * (k - 1), || "missing pairs".into())?;
    for &u in branch {
        for &v in branch {
            if u < v {
                let ones = [by_pair[&(u, v)], by_pair[&(v, u)]].iter().filter(|p| p.len() == 2).count();
                ensure(ones == 1, || format!("pair {u},{v} has {ones} single edges"))?;
            }
        }
    }
    Ok(())
}

fn check_kstar(t: &Tournament, s: &KStar) -> Result<(), String> {
    check_subdivision(t, &s.base)?;
    let k = s.branch().len();
    ensure(s.loops.len() == k * (k - 1) / 2, || "wrong loop count".into())?;
    let base: HashSet<usize> = s.base.vertex_set(t.n()).iter().collect();
    let mut interiors = HashSet::new();
    for l in &s.loops {
        let (u, v) = l.pair;
        let p = s.base.path(u, v).vertices();
        let (e, x) = (l.entry.vertices(), l.exit.vertices());
        ensure(p.len() >= 3, || format!("loop on a single edge {u}->{v}"))?;
        ensure((e[0], e[e.len() - 1]) == (p[1], u), || "entry loop ends".into())?;
        ensure((x[0], x[x.len() - 1]) == (v, p[p.len() - 2]), || "exit loop ends".into())?;
        for lv in [e, x] {
            ensure(walks(t, lv) && forward_chord(t, lv).is_none(), || format!("loop of {u},{v} not induced"))?;
            for &y in &lv[1..lv.len() - 1] {
                ensure(!base.contains(&y) && interiors.insert(y), || format!("loop vertex {y} shared"))?;
            }
        }
    }
    Ok(())
}

/// Membership in the restricted edge set, from the four defining clauses.
fn in_structure(t: &Tournament, s: &KStar, a: usize, b: usize) -> bool {
    if !t.has_edge(a, b) {
        return false;
    }
    let consecutive = |p: &Path| p.vertices().windows(2).any(|w| w == [a, b]);
    if s.base.paths().iter().any(|pp| pp.path.len() >= 2 && consecutive(&pp.path)) {
        return true;
    }
    if s.loops.iter().any(|l| consecutive(&l.entry) || consecutive(&l.exit)) {
        return true;
    }
    let branch = s.branch();
    for (i, &u) in branch.iter().enumerate() {
        for &v in &branch[i + 1..] {
            if (a, b) == (u, v) || (a, b) == (v, u) {
                continue;
            }
            let on = |x: usize| s.base.path(u, v).contains(x) || s.base.path(v, u).contains(x);
            let end = |x: usize| x == u || x == v;
            if (end(a) && on(b)) || (end(b) && on(a)) {
                return true;
            }
        }
    }
    s.loops.iter().any(|l| {
        let (u, v) = l.pair;
        (a == u && l.entry.contains(b))
            || (b == u && l.entry.contains(a))
            || (a == v && l.exit.contains(b))
            || (b == v && l.exit.contains(a))
    })
}

fn bfs(adj: &HashMap<usize, Vec<usize>>, from: usize) -> HashMap<usize, usize> {
    let mut dist = HashMap::from([(from, 0)]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            if !dist.contains_key(&w) {
                dist.insert(w, dist[&v] + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Branch pair carrying the non-branch vertex `x`.
fn carrier(s: &KStar, x: usize) -> (usize, usize) {
    s.base
        .paths()
        .iter()
        .find(|pp| pp.path.interior().contains(&x))
        .map(|pp| pp.pair)
        .or_else(|| s.loops.iter().find(|l| l.entry.contains(x) || l.exit.contains(x)).map(|l| l.pair))
        .expect("vertex lies on the structure")
}

fn separation(t: &Tournament, s: &KStar) -> Result<usize, String> {
    let verts: Vec<usize> = s.vertex_set(t.n()).iter().collect();
    let mut fwd: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut back: HashMap<usize, Vec<usize>> = HashMap::new();
    for &a in &verts {
        for &b in &verts {
            if a != b && in_structure(t, s, a, b) {
                fwd.entry(a).or_default().push(b);
                back.entry(b).or_default().push(a);
            }
        }
    }
    let branch: HashSet<usize> = s.branch().iter().copied().collect();
    let mut checked = 0;
    for &w in s.branch() {
        let (din, dout) = (bfs(&fwd, w), bfs(&back, w));
        for &x in verts.iter().filter(|x| !branch.contains(x)) {
            let (u, v) = carrier(s, x);
            if w == u || w == v {
                continue;
            }
            for (d, dir) in [(din.get(&x), "in"), (dout.get(&x), "out")] {
                ensure(d.is_none_or(|&d| d >= 3), || format!("{dir}-distance {w},{x} is {d:?}"))?;
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_1() -> Outcome {
    let mut cores = 0;
    let mut largest = 0.0f64;
    for seed in 0..200u64 {
        let t = Tournament::random(2000, seed);
        for k in 2..=10 {
            let w = extract_min_outdeg_subtournament(&t, &t.vertices(), k).map_err(|e| format!("seed {seed} k {k}: {e}"))?;
            let ids: Vec<usize> = w.iter().collect();
            ensure(ids.len() <= 3 * k * k, || format!("seed {seed} k {k}: size {}", ids.len()))?;
            let deg = |x: usize, skip: usize| ids.iter().filter(|&&y| y != skip && t.has_edge(x, y)).count();
            ensure(ids.iter().all(|&x| deg(x, usize::MAX) >= k), || format!("seed {seed} k {k}: degree"))?;
            for &gone in &ids {
                ensure(ids.iter().any(|&x| x != gone && deg(x, gone) < k), || {
                    format!("seed {seed} k {k}: {gone} removable")
                })?;
            }
            cores += 1;
            largest = largest.max(ids.len() as f64 / (k * k) as f64);
        }
    }
    Ok(format!("{cores} cores, largest size/k^2 = {largest:.2}"))
}

fn criterion_2() -> Outcome {
    let mut rng = SplitMix64::seed_from_u64(2);
    let mut total = 0;
    for inst in 0..500u64 {
        let n = 6 + (rng.next_u64() % 7) as usize;
        let t = Tournament::random(n, 1000 + inst);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, (rng.next_u64() % (i as u64 + 1)) as usize);
        }
        let a = 1 + (rng.next_u64() % 3) as usize;
        let b = 1 + (rng.next_u64() % 3) as usize;
        let (xs, ys) = (&order[..a], &order[a..a + b]);
        let mask = |vs: &[usize]| vs.iter().fold(0u32, |m, &v| m | 1 << v);
        let set = |vs: &[usize]| VertexSet::from_vertices(n, vs.iter().copied());
        let empty = VertexSet::empty(n);
        let sys = max_disjoint_paths(&t, &set(xs), &set(ys), &empty, &empty, usize::MAX).map_err(|e| e.to_string())?;
        sys.verify(&t).map_err(|e| format!("instance {inst}: {e}"))?;
        let sep = min_separator(&t, mask(xs), mask(ys));
        ensure(sys.len() == sep, || format!("instance {inst}: {} paths, separator {sep}", sys.len()))?;
        total += sep;
    }
    Ok(format!("500 instances agree, {total} paths in all"))
}

fn criterion_3() -> Outcome {
    let c = triangle_blowup(2, 4, 4, Internal::Seeded(0)).map_err(|e| e.to_string())?;
    let t = &c.tournament;
    let kappa = connectivity_by_cuts(t);
    ensure(kappa == 2 && vertex_connectivity(t) == 2, || format!("connectivity {kappa}"))?;
    let n = t.n();
    let mut blocked = 0;
    for x0 in 0..n {
        for x1 in 0..n {
            for y0 in 0..n {
                for y1 in 0..n {
                    let q = [x0, x1, y0, y1];
                    if q.iter().collect::<HashSet<_>>().len() == 4 && !two_linked(t, [x0, x1], [y0, y1]) {
                        blocked += 1;
                    }
                }
            }
        }
    }
    ensure(blocked > 0, || "every terminal choice links".into())?;
    let bad = is_k_linked_all(t, 2, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    let bad = bad.ok_or("is_k_linked_all reports linked")?;
    ensure(!two_linked(t, [bad.sources[0], bad.sources[1]], [bad.sinks[0], bad.sinks[1]]), || {
        "reported counterexample links".into()
    })?;
    Ok(format!("kappa = 2, {blocked} blocked terminal choices"))
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for seed in 0..500u64 {
        let n = 12 + (seed % 3) as usize;
        let t = Tournament::random(n, seed);
        if vertex_connectivity(&t) >= 5 {
            let res = is_k_linked_all(&t, 2, DEFAULT_NODE_BUDGET).map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(res.is_none(), || format!("seed {seed}: not 2-linked: {res:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} of 500 were 5-connected, all 2-linked"))
}

fn criterion_5() -> Outcome {
    for seed in 0..5u64 {
        let c = popielarz(2, 60, Internal::Seeded(seed)).map_err(|e| e.to_string())?;
        let t = &c.tournament;
        let kappa = vertex_connectivity(t);
        ensure(kappa >= 5, || format!("seed {seed}: kappa {kappa}"))?;
        let mut l = c.part("L1");
        l.union_with(&c.part("L2"));
        l.union_with(&c.part("L3"));
        let sys = max_disjoint_paths(t, &c.part("A"), &l, &c.part("B"), &VertexSet::empty(60), usize::MAX)
            .map_err(|e| e.to_string())?;
        ensure(sys.len() <= 3, || format!("seed {seed}: {} paths A -> L", sys.len()))?;
        let res = find_reversing_system(t, &c.parts["A"], &c.parts["B"], &l);
        ensure(matches!(&res, Err(e) if e.is_hypothesis_exhausted()), || format!("seed {seed}: {:?}", res.err()))?;
    }
    Ok("5 seeds blocked and exhausted".into())
}

fn criterion_6() -> Outcome {
    let mut ok = 0;
    for seed in 0..50u64 {
        let t = Tournament::random(800, seed);
        match embed_subdivision(&t, 3) {
            Ok(s) => {
                verify_subdivision(&t, &s).map_err(|e| format!("seed {seed}: {e}"))?;
                check_subdivision(&t, &s).map_err(|e| format!("seed {seed}: {e}"))?;
                ok += 1;
            }
            Err(e) if e.is_hypothesis_exhausted() => {}
            Err(e) => return Err(format!("seed {seed}: {e}")),
        }
    }
    ensure(ok * 10 >= 50 * 9, || format!("success {ok}/50"))?;
    Ok(format!("success {ok}/50"))
}

fn criterion_7() -> Outcome {
    let (mut runs, mut pairs_checked) = (0, 0);
    for seed in 0..40u64 {
        if runs == 20 {
            break;
        }
        let t = Tournament::random(3000, seed);
        let s = match embed_kstar(&t, 3) {
            Ok(s) => s,
            Err(e) if e.is_hypothesis_exhausted() => continue,
            Err(e) => return Err(format!("seed {seed}: {e}")),
        };
        verify_kstar(&t, &s).map_err(|e| format!("seed {seed}: {e}"))?;
        check_kstar(&t, &s).map_err(|e| format!("seed {seed}: {e}"))?;
        pairs_checked += separation(&t, &s).map_err(|e| format!("seed {seed}: {e}"))?;
        runs += 1;
    }
    ensure(runs == 20, || format!("only {runs} successful runs"))?;
    Ok(format!("20 runs, {pairs_checked} branch/vertex distances checked"))
}

fn check_reversing(t: &Tournament, a: &[usize], b: &[usize], l: &VertexSet, sys: &ReversingSystem) -> Result<(), String> {
    let mut seen = HashSet::new();
    for (i, p) in sys.from_a.iter().enumerate() {
        let v = p.vertices();
        ensure(v[0] == a[i] && l.contains(v[v.len() - 1]), || format!("A path {i} ends"))?;
        ensure(v[..v.len() - 1].iter().all(|&x| !l.contains(x)), || format!("A path {i} meets L"))?;
        ensure(walks(t, v) && v.iter().all(|&x| seen.insert(x)), || format!("A path {i}"))?;
    }
    for (i, p) in sys.to_b.iter().enumerate() {
        let v = p.vertices();
        ensure(v[v.len() - 1] == b[i] && l.contains(v[0]), || format!("B path {i} ends"))?;
        ensure(v[1..].iter().all(|&x| !l.contains(x)), || format!("B path {i} meets L"))?;
        ensure(walks(t, v) && v.iter().all(|&x| seen.insert(x)), || format!("B path {i}"))?;
    }
    ensure(sys.from_a.len() == a.len() && sys.to_b.len() == b.len(), || "path count".into())?;
    ensure(sys.trace.iter().all(TraceRecord::improved), || "potential rose".into())
}

fn criterion_8() -> Outcome {
    let (a, b) = ([0usize, 1], [2usize, 3]);
    let (mut runs, mut rewrites) = (0, 0);
    for seed in 0..200u64 {
        if runs == 50 {
            break;
        }
        let t = Tournament::random(300, seed);
        if !is_k_connected(&t, 8) {
            continue;
        }
        let l = VertexSet::from_vertices(300, 4..12);
        let sys = find_reversing_system(&t, &a, &b, &l).map_err(|e| format!("seed {seed}: {e}"))?;
        check_reversing(&t, &a, &b, &l, &sys).map_err(|e| format!("seed {seed}: {e}"))?;
        rewrites += sys.trace.len();
        runs += 1;
    }
    ensure(runs == 50, || format!("only {runs} seeds were 8-connected"))?;
    // dense instances rarely need a rewrite; small ones exercise them
    let mut small = 0;
    for seed in 0..1000u64 {
        let t = Tournament::random(16, seed);
        let l = VertexSet::from_vertices(16, 4..12);
        if let Ok(sys) = find_reversing_system(&t, &a, &b, &l) {
            check_reversing(&t, &a, &b, &l, &sys).map_err(|e| format!("n = 16, seed {seed}: {e}"))?;
            small += sys.trace.len();
        }
    }
    Ok(format!("50 systems verified with {rewrites} rewrites; {small} improving rewrites at n = 16"))
}

fn criterion_9() -> Outcome {
    let inst = LinkageInstance::new(vec![0, 1], vec![2, 3]).map_err(|e| e.to_string())?;
    let opts = LinkOptions {
        r: Some(48),
        ..LinkOptions::default()
    };
    let (mut ok, mut failed) = (0, Vec::new());
    for seed in 0..20u64 {
        let t = Tournament::random(4000, seed);
        match link_terminals_with(&t, &inst, &opts) {
            Ok(rep) => {
                let mut seen = HashSet::new();
                for (i, p) in rep.paths.iter().enumerate() {
                    let v = p.vertices();
                    ensure((v[0], v[v.len() - 1]) == (inst.sources[i], inst.sinks[i]), || format!("seed {seed}: ends"))?;
                    ensure(walks(&t, v) && v.iter().all(|&x| seen.insert(x)), || format!("seed {seed}: path {i}"))?;
                }
                ensure(rep.trace.iter().all(TraceRecord::improved), || format!("seed {seed}: potential rose"))?;
                let again = link_terminals_with(&t, &inst, &opts).map_err(|e| format!("seed {seed} replay: {e}"))?;
                ensure(again == rep, || format!("seed {seed}: replay differs"))?;
                ok += 1;
            }
            Err(Error::HypothesisExhausted { stage, .. }) => failed.push(format!("{seed}@{stage}")),
            Err(e) => return Err(format!("seed {seed}: {e}")),
        }
    }
    Ok(format!("{ok}/20 linked and replayed; exhausted: {failed:?}"))
}

fn criterion_10() -> Outcome {
    let want: Vec<BigUint> = [1u32, 7, 343].map(BigUint::from).to_vec();
    let got: Vec<BigUint> = (0..=2).map(|m| bound_d(2, m).unwrap()).collect();
    ensure(got == want, || format!("d(2, 0..=2) = {got:?}"))?;
    ensure(bound_d(1, 0).unwrap() == BigUint::from(1u32), || "d(1, 0)".into())?;
    let seven = BigUint::from(7u32);
    for k in 2..=3 {
        let mut prev = bound_d(k, 0).unwrap();
        for m in 1..=k * (k - 1) {
            let cur = bound_d(k, m).map_err(|e| e.to_string())?;
            ensure(cur == &seven * &prev * &prev, || format!("recursion fails at k {k} m {m}"))?;
            prev = cur;
        }
        let top = bound_dstar(k, k * (k - 1)).map_err(|e| e.to_string())?;
        ensure(top >= prev, || format!("dstar below d at k {k}"))?;
    }
    Ok("d(2, m) = 1, 7, 343 and d(k, m+1) = 7 d(k, m)^2 for k <= 3".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("core size and minimality", 60, criterion_1),
        ("disjoint paths equal minimum separator", 120, criterion_2),
        ("triangle blow-up is 2-connected, not 2-linked", 60, criterion_3),
        ("5-connected small tournaments are 2-linked", 1800, criterion_4),
        ("blocking construction", 120, criterion_5),
        ("subdivision embedding at n = 800, k = 3", 600, criterion_6),
        ("loop-augmented structure separation", 900, criterion_7),
        ("reversing path systems", 600, criterion_8),
        ("full linkage pipeline", 3600, criterion_9),
        ("bound recursion", 1, criterion_10),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let res = res.and_then(|s| {
            if took > Duration::from_secs(limit) {
                Err(format!("{s}; took {took:.1?}, limit {limit}s"))
            } else {
                Ok(s)
            }
        });
        match res {
            Ok(s) => println!("criterion {:>2} PASS  {name}: {s} ({took:.1?})", i + 1),
            Err(s) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {s} ({took:.1?})", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
