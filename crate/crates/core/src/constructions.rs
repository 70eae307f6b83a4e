//! Extremal examples and standard fixtures.

use std::collections::BTreeMap;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

/// How edges inside the "arbitrary" zones of a construction are oriented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Internal {
    /// One SplitMix64 draw per free pair, in lexicographic pair order.
    Seeded(u64),
    /// Lower id beats higher id.
    Transitive,
}

/// A tournament together with its named parts (each a sorted id list).
#[derive(Clone, Debug)]
pub struct Construction {
    pub tournament: Tournament,
    pub parts: BTreeMap<String, Vec<usize>>,
}

impl Construction {
    pub fn part(&self, name: &str) -> VertexSet {
        let n = self.tournament.n();
        VertexSet::from_vertices(n, self.parts[name].iter().copied())
    }

    /// Part labels as JSON, for the `.parts.json` sidecar.
    pub fn parts_json(&self) -> String {
        serde_json::to_string_pretty(&self.parts).expect("labels serialize")
    }
}

/// Orientation of each pair: `Some(true)` forced `i -> j`, `Some(false)`
/// forced `j -> i`, `None` free.
fn assemble(n: usize, internal: Internal, rule: impl Fn(usize, usize) -> Option<bool>) -> Tournament {
    let mut rng = match internal {
        Internal::Seeded(s) => Some(SplitMix64::seed_from_u64(s)),
        Internal::Transitive => None,
    };
    Tournament::from_fn(n, |i, j| match rule(i, j) {
        Some(dir) => dir,
        None => match rng.as_mut() {
            Some(r) => r.next_u64() >> 63 == 1,
            None => true,
        },
    })
}

fn labels(sizes: &[(&str, usize)]) -> (Vec<usize>, BTreeMap<String, Vec<usize>>) {
    let mut of = Vec::new();
    let mut parts = BTreeMap::new();
    for (idx, &(name, size)) in sizes.iter().enumerate() {
        let start = of.len();
        of.extend(std::iter::repeat_n(idx, size));
        parts.insert(name.to_string(), (start..start + size).collect());
    }
    (of, parts)
}

/// `i -> j` for `i < j`.
pub fn transitive(n: usize) -> Tournament {
    Tournament::transitive(n)
}

/// Blow-up of the rotational tournament on `parts.len()` vertices: part `i`
/// beats part `j` when `j - i mod m` lies in `1..=(m-1)/2`, and for even `m`
/// the antipodal pairs go from lower to higher index. With three parts this
/// is the blown-up directed triangle `P0 -> P1 -> P2 -> P0`. Parts are named
/// `P0`, `P1`, ...
pub fn directed_cycle_blowup(parts: &[usize], internal: Internal) -> Result<Construction, Error> {
    if parts.is_empty() || parts.contains(&0) {
        return Err(Error::Precondition("parts must be nonempty".into()));
    }
    let m = parts.len();
    let names: Vec<String> = (0..m).map(|i| format!("P{i}")).collect();
    let sizes: Vec<(&str, usize)> = names.iter().map(|s| s.as_str()).zip(parts.iter().copied()).collect();
    let (of, labels) = labels(&sizes);
    let t = assemble(of.len(), internal, |i, j| {
        let (a, b) = (of[i], of[j]);
        if a == b {
            return None;
        }
        let d = (b + m - a) % m;
        Some(if 2 * d == m { a < b } else { 2 * d < m })
    });
    Ok(Construction {
        tournament: t,
        parts: labels,
    })
}

/// Directed triangle blown up into parts `A -> B -> C -> A` with
/// `|C| = 2k - 2`. Vertex ids run through `A`, then `B`, then `C`.
pub fn triangle_blowup(
    k: usize,
    size_a: usize,
    size_b: usize,
    internal: Internal,
) -> Result<Construction, Error> {
    if k < 2 || size_a < 2 * k || size_b < 2 * k {
        return Err(Error::Precondition(format!(
            "need k >= 2 and |A|, |B| >= 2k (k = {k}, |A| = {size_a}, |B| = {size_b})"
        )));
    }
    let c = directed_cycle_blowup(&[size_a, size_b, 2 * k - 2], internal)?;
    let mut parts = BTreeMap::new();
    for (old, new) in [("P0", "A"), ("P1", "B"), ("P2", "C")] {
        parts.insert(new.to_string(), c.parts[old].clone());
    }
    Ok(Construction {
        tournament: c.tournament,
        parts,
    })
}

/// A `(3k-1)`-connected tournament with no reversing path system between
/// `A` and `B` through `L`. Parts `A`, `S`, `B`, `L1`, `L2`, `L3` in that id order, with
/// `|A| = |B| = k`, `|S| = 2k - 1` and `L` split equitably (remainders go to
/// `L1` then `L2`). Forced edges: `L -> A`, `B -> L`, `A -> S`, `S -> B`,
/// `A -> B`, `L1 -> L2 -> L3 -> L1`, `S -> L1`, `L2 -> S`. Pairs inside a
/// part and between `S` and `L3` are free.
pub fn popielarz(k: usize, n: usize, internal: Internal) -> Result<Construction, Error> {
    let fixed = 4 * k - 1;
    if k < 1 || n < fixed + 3 {
        return Err(Error::Precondition(format!(
            "need k >= 1 and n >= 4k + 2 (k = {k}, n = {n})"
        )));
    }
    let l = n - fixed;
    let l1 = l / 3 + usize::from(l % 3 >= 1);
    let l2 = l / 3 + usize::from(l % 3 == 2);
    let l3 = l / 3;
    let (of, parts) = labels(&[
        ("A", k),
        ("S", 2 * k - 1),
        ("B", k),
        ("L1", l1),
        ("L2", l2),
        ("L3", l3),
    ]);
    const A: usize = 0;
    const S: usize = 1;
    const B: usize = 2;
    const L1: usize = 3;
    const L2: usize = 4;
    const L3: usize = 5;
    let forced = |a: usize, b: usize| -> Option<bool> {
        let is_l = |p: usize| p >= L1;
        match (a, b) {
            _ if a == b => None,
            (x, A) if is_l(x) => Some(true),
            (B, y) if is_l(y) => Some(true),
            (A, S) | (S, B) | (A, B) => Some(true),
            (L1, L2) | (L2, L3) | (L3, L1) => Some(true),
            (S, L1) | (L2, S) => Some(true),
            (S, L3) | (L3, S) => None,
            _ => Some(false),
        }
    };
    let t = assemble(of.len(), internal, |i, j| {
        let (a, b) = (of[i], of[j]);
        match forced(a, b) {
            Some(true) => Some(true),
            Some(false) => {
                debug_assert_eq!(forced(b, a), Some(true), "unclassified pair {a},{b}");
                Some(false)
            }
            None => None,
        }
    });
    Ok(Construction {
        tournament: t,
        parts,
    })
}
