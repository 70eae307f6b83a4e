//! Exhaustive k-linkage search for small tournaments.
//!
//! Only induced-chordless paths are enumerated for all but the last pair:
//! any linkage can be shortened to one whose paths have no forward chords,
//! and a chordless path leaves the most room for the others. The final pair
//! is routed by BFS. Failed `(stage, blocked)` states are cached.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::path::Path;
use crate::tournament::Tournament;

pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
const MAX_VERTICES: usize = 64;

/// Terminal pairs `x_i -> y_i`, all `2k` vertices distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkageInstance {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl LinkageInstance {
    pub fn new(sources: Vec<usize>, sinks: Vec<usize>) -> Result<Self, Error> {
        if sources.is_empty() || sources.len() != sinks.len() {
            return Err(Error::Precondition(
                "need k >= 1 sources and as many sinks".into(),
            ));
        }
        let mut all: Vec<usize> = sources.iter().chain(&sinks).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Precondition("terminals must be distinct".into()));
        }
        Ok(LinkageInstance { sources, sinks })
    }

    pub fn k(&self) -> usize {
        self.sources.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkageOutcome {
    Linked(Vec<Path>),
    NotLinked,
}

impl LinkageOutcome {
    pub fn is_linked(&self) -> bool {
        matches!(self, LinkageOutcome::Linked(_))
    }
}

struct Search<'a> {
    out: Vec<u64>,
    inst: &'a LinkageInstance,
    terminals: u64,
    failed: HashSet<(usize, u64)>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), Error> {
        self.nodes += 1;
        if self.nodes > self.budget {
            Err(Error::ResourceLimit {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    /// Routes pairs `stage..k` avoiding `used`, which holds every vertex of
    /// earlier paths.
    fn route(&mut self, stage: usize, used: u64, acc: &mut Vec<Path>) -> Result<bool, Error> {
        let k = self.inst.k();
        if stage == k {
            return Ok(true);
        }
        if self.failed.contains(&(stage, used)) {
            return Ok(false);
        }
        let x = self.inst.sources[stage];
        let y = self.inst.sinks[stage];
        let own = (1u64 << x) | (1u64 << y);
        let blocked = used | (self.terminals & !own);
        if stage + 1 == k {
            self.tick()?;
            if let Some(p) = bfs(&self.out, x, y, blocked) {
                acc.push(p);
                return Ok(true);
            }
            self.failed.insert((stage, used));
            return Ok(false);
        }
        let mut walk = vec![x];
        if self.extend(stage, used, blocked, y, &mut walk, 0, acc)? {
            return Ok(true);
        }
        self.failed.insert((stage, used));
        Ok(false)
    }

    /// `early` is the union of out-rows of all walk vertices but the last.
    #[allow(clippy::too_many_arguments)]
    fn extend(
        &mut self,
        stage: usize,
        used: u64,
        blocked: u64,
        y: usize,
        walk: &mut Vec<usize>,
        early: u64,
        acc: &mut Vec<Path>,
    ) -> Result<bool, Error> {
        self.tick()?;
        let c = *walk.last().unwrap();
        let on_walk = walk.iter().fold(0u64, |m, &v| m | (1u64 << v));
        if self.out[c] >> y & 1 == 1 {
            let mut full = walk.clone();
            full.push(y);
            let mask = on_walk | (1u64 << y);
            acc.push(Path::new(full));
            if self.route(stage + 1, used | mask, acc)? {
                return Ok(true);
            }
            acc.pop();
            return Ok(false);
        }
        let next_early = early | self.out[c];
        if next_early >> y & 1 == 1 {
            return Ok(false);
        }
        let free = !(blocked | on_walk | early | (1u64 << y));
        if reach(&self.out, c, y, free) {
            let mut cand = self.out[c] & free;
            while cand != 0 {
                let v = cand.trailing_zeros() as usize;
                cand &= cand - 1;
                walk.push(v);
                let ok = self.extend(stage, used, blocked, y, walk, next_early, acc)?;
                walk.pop();
                if ok {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

fn reach(out: &[u64], from: usize, to: usize, free: u64) -> bool {
    let mut seen = 1u64 << from;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let v = f.trailing_zeros() as usize;
            f &= f - 1;
            if out[v] >> to & 1 == 1 {
                return true;
            }
            next |= out[v];
        }
        next &= free & !seen;
        seen |= next;
        frontier = next;
    }
    false
}

fn bfs(out: &[u64], x: usize, y: usize, blocked: u64) -> Option<Path> {
    let n = out.len();
    let mut parent = vec![usize::MAX; n];
    let free = !blocked;
    let mut seen = 1u64 << x;
    let mut queue = std::collections::VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if out[v] >> y & 1 == 1 {
            let mut rev = vec![y, v];
            let mut cur = v;
            while cur != x {
                cur = parent[cur];
                rev.push(cur);
            }
            rev.reverse();
            return Some(Path::new(rev));
        }
        let mut cand = out[v] & free & !seen;
        seen |= cand;
        while cand != 0 {
            let w = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            parent[w] = v;
            queue.push_back(w);
        }
    }
    None
}

fn masks(t: &Tournament) -> Result<Vec<u64>, Error> {
    if t.n() > MAX_VERTICES {
        return Err(Error::Precondition(format!(
            "exact linkage search supports at most {MAX_VERTICES} vertices"
        )));
    }
    Ok((0..t.n())
        .map(|v| t.out_neighbors(v).iter().fold(0u64, |m, w| m | (1u64 << w)))
        .collect())
}

fn solve(
    out: Vec<u64>,
    inst: &LinkageInstance,
    budget: u64,
    nodes: &mut u64,
) -> Result<LinkageOutcome, Error> {
    let n = out.len();
    if inst.sources.iter().chain(&inst.sinks).any(|&v| v >= n) {
        return Err(Error::Precondition("terminal out of range".into()));
    }
    let terminals = inst
        .sources
        .iter()
        .chain(&inst.sinks)
        .fold(0u64, |m, &v| m | (1u64 << v));
    let mut search = Search {
        out,
        inst,
        terminals,
        failed: HashSet::new(),
        nodes: *nodes,
        budget,
    };
    let mut acc = Vec::with_capacity(inst.k());
    let res = search.route(0, 0, &mut acc);
    *nodes = search.nodes;
    Ok(if res? {
        LinkageOutcome::Linked(acc)
    } else {
        LinkageOutcome::NotLinked
    })
}

/// Decides whether the pairs of `inst` can be joined by vertex-disjoint
/// paths, returning a witness when they can.
pub fn is_k_linked_exact(
    t: &Tournament,
    inst: &LinkageInstance,
    budget: u64,
) -> Result<LinkageOutcome, Error> {
    let out = masks(t)?;
    let mut nodes = 0;
    solve(out, inst, budget, &mut nodes)
}

/// Checks every terminal choice: sources as an unordered set, sinks as an
/// ordered tuple from the remaining vertices. Returns a failing instance if
/// there is one. The budget is shared across all instances.
pub fn is_k_linked_all(
    t: &Tournament,
    k: usize,
    budget: u64,
) -> Result<Option<LinkageInstance>, Error> {
    let out = masks(t)?;
    let n = t.n();
    if k == 0 || 2 * k > n {
        return Err(Error::Precondition(format!(
            "k = {k} needs 1 <= 2k <= n = {n}"
        )));
    }
    let mut nodes = 0u64;
    let mut xs: Vec<usize> = (0..k).collect();
    loop {
        let rest: Vec<usize> = (0..n).filter(|v| !xs.contains(v)).collect();
        let mut ys = Vec::with_capacity(k);
        let mut failure = None;
        for_each_arrangement(&rest, k, &mut ys, &mut |ys| {
            let inst = LinkageInstance {
                sources: xs.clone(),
                sinks: ys.to_vec(),
            };
            match solve(out.clone(), &inst, budget, &mut nodes) {
                Ok(LinkageOutcome::Linked(_)) => Ok(true),
                Ok(LinkageOutcome::NotLinked) => {
                    failure = Some(inst);
                    Ok(false)
                }
                Err(e) => Err(e),
            }
        })?;
        if failure.is_some() {
            return Ok(failure);
        }
        if !next_combination(&mut xs, n) {
            return Ok(None);
        }
    }
}

/// Calls `f` on each ordered `k`-tuple of distinct items until it returns
/// `false`.
fn for_each_arrangement(
    items: &[usize],
    k: usize,
    cur: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> Result<bool, Error>,
) -> Result<bool, Error> {
    if cur.len() == k {
        return f(cur);
    }
    for &v in items {
        if cur.contains(&v) {
            continue;
        }
        cur.push(v);
        let go = for_each_arrangement(items, k, cur, f)?;
        cur.pop();
        if !go {
            return Ok(false);
        }
    }
    Ok(true)
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
