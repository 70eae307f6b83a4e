//! Strong components of induced subtournaments.
//!
//! The condensation of a tournament is a transitive tournament on its
//! components, so the components come out in a single dominance order.

use crate::tournament::Tournament;
use crate::vertex_set::VertexSet;

/// Strong components `S_1, ..., S_l` such that every edge between `S_i` and
/// `S_j` with `i < j` points from `S_i` to `S_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CondensationOrder {
    pub components: Vec<VertexSet>,
}

impl CondensationOrder {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The dominated end of the order (no edges leave it inside `within`).
    pub fn last(&self) -> &VertexSet {
        self.components.last().expect("at least one component")
    }

    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(v))
    }
}

/// Strong components of `T[within]` in condensation order.
///
/// Iterative Tarjan over the induced subtournament; the total-order property
/// is checked afterwards and a violation panics (it would mean the input is
/// not a tournament).
pub fn strong_components(t: &Tournament, within: &VertexSet) -> CondensationOrder {
    let n = t.n();
    const UNSEEN: usize = usize::MAX;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = VertexSet::empty(n);
    let mut stack: Vec<usize> = Vec::new();
    let mut comps: Vec<VertexSet> = Vec::new();
    let mut counter = 0usize;
    let succ: Vec<Vec<usize>> = {
        let mut s = vec![Vec::new(); n];
        for v in within.iter() {
            s[v] = t.out_neighbors(v).intersection(within).to_vec();
        }
        s
    };

    for root in within.iter() {
        if index[root] != UNSEEN {
            continue;
        }
        // (vertex, next successor offset)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack.insert(root);
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack.insert(w);
                    call.push((w, 0));
                } else if on_stack.contains(w) {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = VertexSet::empty(n);
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack.remove(w);
                        comp.insert(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    // Tarjan emits sinks first.
    comps.reverse();
    let order = CondensationOrder { components: comps };
    assert_total_order(t, &order);
    order
}

fn assert_total_order(t: &Tournament, order: &CondensationOrder) {
    let n = t.n();
    let mut later = VertexSet::empty(n);
    for comp in order.components.iter().rev() {
        for v in comp.iter() {
            assert!(
                later.is_subset(t.out_neighbors(v)),
                "condensation is not a total order at vertex {v}"
            );
        }
        later.union_with(comp);
    }
}

pub fn is_strongly_connected(t: &Tournament) -> bool {
    strong_components(t, &t.vertices()).len() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_one_component() {
        let t = Tournament::from_fn(3, |i, j| !(i == 0 && j == 2));
        let c = strong_components(&t, &t.vertices());
        assert_eq!(c.len(), 1);
        assert_eq!(c.components[0].len(), 3);
    }

    #[test]
    fn transitive_gives_singletons_in_order() {
        let t = Tournament::transitive(5);
        let c = strong_components(&t, &t.vertices());
        let firsts: Vec<usize> = c.components.iter().map(|s| s.first().unwrap()).collect();
        assert_eq!(firsts, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn random_subset_order_by_cross_edge_scan() {
        let t = Tournament::random(60, 12);
        let within = VertexSet::from_vertices(60, (0..60).filter(|v| v % 2 == 0));
        let c = strong_components(&t, &within);
        let total: usize = c.components.iter().map(|s| s.len()).sum();
        assert_eq!(total, 30);
        for (i, si) in c.components.iter().enumerate() {
            for sj in &c.components[i + 1..] {
                for a in si.iter() {
                    for b in sj.iter() {
                        assert!(t.has_edge(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn reverse_mirrors_components() {
        let t = Tournament::from_fn(12, |i, j| (i / 4 != j / 4) || (j - i) % 2 == 1);
        let c = strong_components(&t, &t.vertices());
        let mut r = strong_components(&t.reverse(), &t.vertices());
        r.components.reverse();
        assert_eq!(c, r);
    }
}
