//! Chromatic polynomial of a face-adjacency graph by deletion-contraction,
//! memoized on a degree-refined canonical key. This is the counting oracle
//! against which the backtracking enumerator is checked.

use crate::poly::IntPolynomial;
use crate::surface_map::FaceGraph;
use std::collections::HashMap;

/// Simple undirected graph for the deletion-contraction recursion. Parallel
/// edges are deduplicated on construction; a loop collapses everything to
/// the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>, // sorted, deduplicated, u < v
    has_loop: bool,
}

impl SimpleGraph {
    fn new(n: usize, raw: &[(usize, usize)]) -> SimpleGraph {
        let mut has_loop = false;
        let mut edges: Vec<(usize, usize)> = raw
            .iter()
            .filter_map(|&(a, b)| {
                if a == b {
                    has_loop = true;
                    None
                } else {
                    Some((a.min(b), a.max(b)))
                }
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        SimpleGraph { n, edges, has_loop }
    }

    fn delete(&self, idx: usize) -> SimpleGraph {
        let mut edges = self.edges.clone();
        edges.remove(idx);
        SimpleGraph {
            n: self.n,
            edges,
            has_loop: false,
        }
    }

    /// Contract edge (u, v): v is merged into u, last vertex renamed to v's
    /// slot to keep labels dense.
    fn contract(&self, idx: usize) -> SimpleGraph {
        let (u, v) = self.edges[idx];
        let relabel = |w: usize| -> usize {
            let w = if w == v { u } else { w };
            // keep vertex ids dense: move the last vertex into v's slot
            if w == self.n - 1 {
                v
            } else {
                w
            }
        };
        // careful when v is the last vertex: then relabel is just v -> u
        let relabel_last = v == self.n - 1;
        let map = |w: usize| -> usize {
            if relabel_last {
                if w == v {
                    u
                } else {
                    w
                }
            } else {
                relabel(w)
            }
        };
        // the contracted edge itself (and any parallel copy) disappears
        // rather than becoming a loop
        let raw: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| (map(a), map(b)))
            .filter(|&(a, b)| a != b)
            .collect();
        SimpleGraph::new(self.n - 1, &raw)
    }

    /// Canonical key from iterated degree refinement. Not full isomorphism
    /// canonization: ties within a refinement class keep original order, so
    /// the key is sound (equal key implies equal graph after relabel) but may
    /// miss some cache hits.
    fn canonical_key(&self) -> (usize, Vec<(usize, usize)>) {
        let mut color: Vec<u64> = vec![0; self.n];
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for (v, nbrs) in adj.iter().enumerate() {
            color[v] = nbrs.len() as u64;
        }
        for _ in 0..self.n {
            let mut sigs: Vec<(u64, Vec<u64>)> = Vec::with_capacity(self.n);
            for v in 0..self.n {
                let mut nc: Vec<u64> = adj[v].iter().map(|&w| color[w]).collect();
                nc.sort_unstable();
                sigs.push((color[v], nc));
            }
            let mut sorted: Vec<&(u64, Vec<u64>)> = sigs.iter().collect();
            sorted.sort();
            sorted.dedup();
            let next: Vec<u64> = sigs
                .iter()
                .map(|s| sorted.binary_search(&s).unwrap() as u64)
                .collect();
            if next == color {
                break;
            }
            color = next;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (color[v], v));
        let mut rank = vec![0usize; self.n];
        for (i, &v) in order.iter().enumerate() {
            rank[v] = i;
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (rank[a], rank[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort_unstable();
        (self.n, edges)
    }
}

pub struct ChromaticSolver {
    memo: HashMap<(usize, Vec<(usize, usize)>), IntPolynomial>,
}

impl Default for ChromaticSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl ChromaticSolver {
    pub fn new() -> ChromaticSolver {
        ChromaticSolver {
            memo: HashMap::new(),
        }
    }

    pub fn chromatic_poly(&mut self, g: &FaceGraph) -> IntPolynomial {
        if g.has_loop() {
            return IntPolynomial::zero();
        }
        let sg = SimpleGraph::new(g.n_faces(), g.adjacencies());
        self.solve(sg)
    }

    /// Chromatic polynomial of an arbitrary (vertex-count, edge-list) graph;
    /// loops and multi-edges allowed.
    pub fn chromatic_poly_edges(&mut self, n: usize, edges: &[(usize, usize)]) -> IntPolynomial {
        let sg = SimpleGraph::new(n, edges);
        if sg.has_loop {
            return IntPolynomial::zero();
        }
        self.solve(sg)
    }

    fn solve(&mut self, g: SimpleGraph) -> IntPolynomial {
        if g.has_loop {
            return IntPolynomial::zero();
        }
        if g.edges.is_empty() {
            return IntPolynomial::t().pow(g.n as u32);
        }
        let key = g.canonical_key();
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        // P(G) = P(G - e) - P(G / e) on the first edge
        let deleted = self.solve(g.delete(0));
        let contracted = self.solve(g.contract(0));
        let p = &deleted - &contracted;
        self.memo.insert(key, p.clone());
        p
    }
}

/// One-shot convenience wrapper.
pub fn chromatic_poly(g: &FaceGraph) -> IntPolynomial {
    ChromaticSolver::new().chromatic_poly(g)
}

/// Exhaustive proper-coloring count with `t` colors; the independent oracle
/// used in tests against both the polynomial and the backtracking counter.
pub fn brute_force_colorings(n: usize, edges: &[(usize, usize)], t: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut assignment = vec![0u64; n];
    let mut count = 0u64;
    let mut level = 0usize;
    let mut started = vec![false; n];
    loop {
        if level == n {
            count += 1;
            level -= 1;
            continue;
        }
        let next = if started[level] {
            assignment[level] + 1
        } else {
            started[level] = true;
            0
        };
        if next >= t {
            started[level] = false;
            if level == 0 {
                break;
            }
            level -= 1;
            continue;
        }
        assignment[level] = next;
        let ok = edges.iter().all(|&(a, b)| {
            if a == b {
                return false;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            hi > level || assignment[lo] != assignment[hi]
        });
        if ok {
            if level == n - 1 {
                count += 1;
                // stay at this level, try next color
            } else {
                level += 1;
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{Signed, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eval(p: &IntPolynomial, t: u64) -> BigInt {
        p.eval(&BigInt::from(t))
    }

    #[test]
    fn single_vertex_is_t() {
        let p = ChromaticSolver::new().chromatic_poly_edges(1, &[]);
        assert_eq!(p, IntPolynomial::t());
    }

    #[test]
    fn complete_graph_k4() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let p = ChromaticSolver::new().chromatic_poly_edges(4, &edges);
        // t(t-1)(t-2)(t-3), frozen from brute force over t in 0..=5
        for t in 0..=5u64 {
            assert_eq!(eval(&p, t), BigInt::from(brute_force_colorings(4, &edges, t)));
        }
        assert_eq!(eval(&p, 3), BigInt::zero());
        assert_eq!(eval(&p, 6), BigInt::from(360));
        assert_eq!(p.degree(), Some(4));
    }

    #[test]
    fn loop_gives_zero() {
        let p = ChromaticSolver::new().chromatic_poly_edges(3, &[(0, 1), (2, 2)]);
        assert!(p.is_zero());
        assert_eq!(p.eval_i64(10), BigInt::zero());
    }

    #[test]
    fn multi_edges_deduplicated() {
        let single = ChromaticSolver::new().chromatic_poly_edges(2, &[(0, 1)]);
        let double = ChromaticSolver::new().chromatic_poly_edges(2, &[(0, 1), (1, 0)]);
        assert_eq!(single, double);
    }

    fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.gen_bool(density) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    #[test]
    fn deletion_contraction_identity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(2..=10);
            let edges = random_graph(&mut rng, n, 0.4);
            if edges.is_empty() {
                continue;
            }
            let g = SimpleGraph::new(n, &edges);
            let mut solver = ChromaticSolver::new();
            let whole = solver.solve(g.clone());
            let idx = rng.gen_range(0..g.edges.len());
            let lhs = solver.solve(g.delete(idx));
            let rhs = solver.solve(g.contract(idx));
            assert_eq!(whole, &lhs - &rhs);
        }
    }

    #[test]
    fn brute_force_equivalence_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..30 {
            let n = rng.gen_range(1..=7);
            let edges = random_graph(&mut rng, n, 0.5);
            let p = ChromaticSolver::new().chromatic_poly_edges(n, &edges);
            for t in 0..=5u64 {
                assert_eq!(
                    eval(&p, t),
                    BigInt::from(brute_force_colorings(n, &edges, t)),
                    "n={n} t={t} edges={edges:?}"
                );
            }
        }
    }

    #[test]
    fn sign_alternation_and_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let n = rng.gen_range(1..=8);
            let edges = random_graph(&mut rng, n, 0.4);
            let p = ChromaticSolver::new().chromatic_poly_edges(n, &edges);
            assert_eq!(p.degree(), Some(n));
            for (i, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                // coefficient of t^i has sign (-1)^(n - i)
                assert_eq!(c.is_negative(), (n - i) % 2 == 1, "n={n} i={i} p={p}");
            }
        }
    }
}
