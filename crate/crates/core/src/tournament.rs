//! Tournament representation, validation, generation and the `TRN1` format.

use std::fmt::Write as _;

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::TournamentError;
use crate::vertex_set::VertexSet;

/// Default upper bound on the vertex count. Adjacency is quadratic in `n`.
pub const DEFAULT_MAX_VERTICES: usize = 20_000;

/// A tournament on vertices `0..n`, stored as out- and in-neighbourhood
/// bitsets per vertex.
///
/// Values are immutable once built; every constructor either produces a
/// valid orientation by construction or runs [`Tournament::validate`].
#[derive(Clone, PartialEq, Eq)]
pub struct Tournament {
    n: usize,
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
}

impl std::fmt::Debug for Tournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Tournament(n={})", self.n)
    }
}

impl Tournament {
    /// Builds the tournament where, for `i < j`, the edge is `i -> j` exactly
    /// when `forward(i, j)` holds.
    pub fn from_fn(n: usize, mut forward: impl FnMut(usize, usize) -> bool) -> Self {
        assert!(n >= 1, "tournament needs at least one vertex");
        let mut out = vec![VertexSet::empty(n); n];
        let mut inn = vec![VertexSet::empty(n); n];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = if forward(i, j) { (i, j) } else { (j, i) };
                out[a].insert(b);
                inn[b].insert(a);
            }
        }
        Tournament { n, out, inn }
    }

    /// Builds from a full adjacency matrix, rejecting anything that is not a
    /// tournament. `rows[i][j]` means `i -> j`.
    pub fn from_matrix(rows: &[Vec<bool>]) -> Result<Self, TournamentError> {
        Self::from_matrix_capped(rows, DEFAULT_MAX_VERTICES)
    }

    pub fn from_matrix_capped(rows: &[Vec<bool>], cap: usize) -> Result<Self, TournamentError> {
        let n = rows.len();
        if n == 0 {
            return Err(TournamentError::Empty);
        }
        if n > cap {
            return Err(TournamentError::TooLarge { n, cap });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(TournamentError::Format {
                    line: i + 2,
                    msg: format!("expected {n} entries, found {}", row.len()),
                });
            }
        }
        check_matrix(n, |i, j| rows[i][j])?;
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }

    /// Re-checks every tournament invariant on the stored representation.
    pub fn validate(&self) -> Result<(), TournamentError> {
        check_matrix(self.n, |i, j| self.out[i].contains(j))?;
        for v in 0..self.n {
            debug_assert_eq!(self.out_degree(v) + self.in_degree(v), self.n - 1);
            for u in self.inn[v].iter() {
                if !self.out[u].contains(v) {
                    return Err(TournamentError::Missing { u, v });
                }
            }
        }
        Ok(())
    }

    /// Canonical transitive tournament: `i -> j` iff `i < j`.
    pub fn transitive(n: usize) -> Self {
        Self::from_fn(n, |_, _| true)
    }

    /// Seeded uniform random tournament.
    ///
    /// Generator: SplitMix64 with its state initialised to `seed`. Pairs
    /// `(i, j)` with `i < j` are visited in lexicographic order; each draws
    /// one `u64` and the edge is `i -> j` iff its top bit is set.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = SplitMix64::seed_from_u64(seed);
        Self::from_fn(n, |_, _| rng.next_u64() >> 63 == 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    pub fn out_neighbors(&self, v: usize) -> &VertexSet {
        &self.out[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &VertexSet {
        &self.inn[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.inn[v].len()
    }

    /// Out-degree of `v` inside the subtournament induced on `within`.
    pub fn out_degree_within(&self, v: usize, within: &VertexSet) -> usize {
        self.out[v].intersection_len(within)
    }

    pub fn in_degree_within(&self, v: usize, within: &VertexSet) -> usize {
        self.inn[v].intersection_len(within)
    }

    /// Edge-reversed tournament. Out- and in-neighbourhoods swap.
    pub fn reverse(&self) -> Tournament {
        Tournament {
            n: self.n,
            out: self.inn.clone(),
            inn: self.out.clone(),
        }
    }

    /// Induced subtournament on `keep`, relabelled to `0..keep.len()` in
    /// increasing id order. Returns the old ids in new-label order.
    pub fn induced(&self, keep: &VertexSet) -> (Tournament, Vec<usize>) {
        let ids = keep.to_vec();
        let sub = Tournament::from_fn(ids.len(), |i, j| self.has_edge(ids[i], ids[j]));
        (sub, ids)
    }

    /// Serialises to the canonical `TRN1` text: the vertex count on the first
    /// line, then one row of `0`/`1` characters per vertex.
    pub fn to_trn(&self) -> String {
        let mut s = String::with_capacity(self.n * (self.n + 1) + 8);
        writeln!(s, "{}", self.n).unwrap();
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.has_edge(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    pub fn from_trn(text: &str) -> Result<Self, TournamentError> {
        Self::from_trn_capped(text, DEFAULT_MAX_VERTICES)
    }

    pub fn from_trn_capped(text: &str, cap: usize) -> Result<Self, TournamentError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(TournamentError::Empty)?;
        let n: usize = header.trim().parse().map_err(|_| TournamentError::Format {
            line: 1,
            msg: format!("expected vertex count, found {header:?}"),
        })?;
        if n == 0 {
            return Err(TournamentError::Empty);
        }
        if n > cap {
            return Err(TournamentError::TooLarge { n, cap });
        }
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let line_no = i + 2;
            let line = lines.next().ok_or_else(|| TournamentError::Format {
                line: line_no,
                msg: "missing row".into(),
            })?;
            let row = line
                .trim_end_matches('\r')
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    other => Err(TournamentError::Format {
                        line: line_no,
                        msg: format!("unexpected character {other:?}"),
                    }),
                })
                .collect::<Result<Vec<bool>, _>>()?;
            rows.push(row);
        }
        if let Some(extra) = lines.find(|l| !l.trim().is_empty()) {
            return Err(TournamentError::Format {
                line: n + 2,
                msg: format!("trailing content {extra:?}"),
            });
        }
        Self::from_matrix_capped(&rows, cap)
    }
}

fn check_matrix(n: usize, edge: impl Fn(usize, usize) -> bool) -> Result<(), TournamentError> {
    for i in 0..n {
        if edge(i, i) {
            return Err(TournamentError::Diagonal(i));
        }
        for j in i + 1..n {
            match (edge(i, j), edge(j, i)) {
                (true, true) => return Err(TournamentError::BothDirections { u: i, v: j }),
                (false, false) => return Err(TournamentError::Missing { u: i, v: j }),
                _ => {}
            }
        }
    }
    Ok(())
}

/// `δ⁺(T)`.
pub fn min_out_degree(t: &Tournament) -> usize {
    (0..t.n()).map(|v| t.out_degree(v)).min().unwrap_or(0)
}

/// Minimum out-degree of the subtournament induced on `within` (0 if empty).
pub fn min_out_degree_within(t: &Tournament, within: &VertexSet) -> usize {
    within
        .iter()
        .map(|v| t.out_degree_within(v, within))
        .min()
        .unwrap_or(0)
}

pub fn min_in_degree(t: &Tournament) -> usize {
    (0..t.n()).map(|v| t.in_degree(v)).min().unwrap_or(0)
}
