//! Microlocal rank-1 sheaves on a 2-graph weave counted as proper
//! P^1(F_q)-colorings of faces: q+1 opaque color tokens, adjacency means
//! "different colors", with an optional pinned framing triple (0, 1, inf)
//! normalizing the projective symmetry.

use crate::surface_map::{CombMap, FaceGraph};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ColoringError {
    #[error("q must be at least 2, got {0}")]
    QTooSmall(u64),
    #[error("face {0} out of range (map has {1} faces)")]
    UnknownFace(usize, usize),
    #[error("color index {0} out of range for q = {1} (colors are 0..q-1 and inf)")]
    UnknownColor(usize, u64),
    #[error("no triple of pairwise-adjacent faces exists; framing is unsupported here")]
    NoFramingTriple,
    #[error("framing faces {0} and {1} are not adjacent")]
    FramingNotAdjacent(usize, usize),
}

/// The color set P^1 of size q+1. Colors are opaque tokens; index q is the
/// distinguished point at infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ColorSpace {
    q: u64,
}

impl ColorSpace {
    pub fn new(q: u64) -> Result<ColorSpace, ColoringError> {
        if q < 2 {
            return Err(ColoringError::QTooSmall(q));
        }
        Ok(ColorSpace { q })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn size(&self) -> u64 {
        self.q + 1
    }

    pub fn zero(&self) -> Color {
        Color(0)
    }

    pub fn one(&self) -> Color {
        Color(1)
    }

    pub fn infinity(&self) -> Color {
        Color(self.q as usize)
    }

    /// True when q is a prime power, the regime where counts are honest
    /// F_q-point counts rather than just oracle values.
    pub fn q_is_prime_power(&self) -> bool {
        let mut n = self.q;
        for p in 2..=n {
            if p * p > n {
                break;
            }
            if n % p == 0 {
                while n % p == 0 {
                    n /= p;
                }
                return n == 1;
            }
        }
        true // n prime (or caught above); q >= 2 always reaches here prime
    }

    pub fn parse_color(&self, tok: &str) -> Result<Color, ColoringError> {
        let idx = match tok {
            "inf" | "oo" | "∞" => self.q as usize,
            _ => tok
                .parse::<usize>()
                .map_err(|_| ColoringError::UnknownColor(usize::MAX, self.q))?,
        };
        if idx > self.q as usize {
            return Err(ColoringError::UnknownColor(idx, self.q));
        }
        Ok(Color(idx))
    }

    pub fn display(&self, c: Color) -> String {
        if c.0 == self.q as usize {
            "inf".to_string()
        } else {
            c.0.to_string()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Color(pub usize);

#[derive(Clone, Debug)]
pub struct ColoringProblem {
    face_graph: FaceGraph,
    space: ColorSpace,
    fixed: Vec<Option<Color>>,
    /// Fixed assignment pins two adjacent faces to the same color; counts are
    /// zero and this flag is raised in results instead of an error.
    infeasible_fixed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub count: BigUint,
    pub infeasible_fixed: bool,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    /// First solutions in lexicographic order (faces by id, colors by index).
    pub solutions: Vec<Vec<Color>>,
    pub total: BigUint,
}

impl ColoringProblem {
    pub fn new(map: &CombMap, q: u64) -> Result<ColoringProblem, ColoringError> {
        let space = ColorSpace::new(q)?;
        let face_graph = map.face_adjacency();
        let n = face_graph.n_faces();
        Ok(ColoringProblem {
            face_graph,
            space,
            fixed: vec![None; n],
            infeasible_fixed: false,
        })
    }

    pub fn from_face_graph(face_graph: FaceGraph, q: u64) -> Result<ColoringProblem, ColoringError> {
        let space = ColorSpace::new(q)?;
        let n = face_graph.n_faces();
        Ok(ColoringProblem {
            face_graph,
            space,
            fixed: vec![None; n],
            infeasible_fixed: false,
        })
    }

    pub fn space(&self) -> &ColorSpace {
        &self.space
    }

    pub fn face_graph(&self) -> &FaceGraph {
        &self.face_graph
    }

    pub fn fix(&mut self, face: usize, color: Color) -> Result<(), ColoringError> {
        let n = self.face_graph.n_faces();
        if face >= n {
            return Err(ColoringError::UnknownFace(face, n));
        }
        if color.0 > self.space.q as usize {
            return Err(ColoringError::UnknownColor(color.0, self.space.q));
        }
        self.fixed[face] = Some(color);
        // adjacent faces pinned to equal colors make the problem infeasible
        for &(a, b) in self.face_graph.simple_adjacencies().iter() {
            if let (Some(x), Some(y)) = (self.fixed[a], self.fixed[b]) {
                if x == y {
                    self.infeasible_fixed = true;
                }
            }
        }
        Ok(())
    }

    /// Pin three pairwise-adjacent faces to (0, 1, inf).
    pub fn frame(&mut self, triple: (usize, usize, usize)) -> Result<(), ColoringError> {
        let (a, b, c) = triple;
        for (x, y) in [(a, b), (a, c), (b, c)] {
            if !self.face_graph.are_adjacent(x, y) {
                return Err(ColoringError::FramingNotAdjacent(x, y));
            }
        }
        self.fix(a, self.space.zero())?;
        self.fix(b, self.space.one())?;
        self.fix(c, self.space.infinity())?;
        Ok(())
    }

    /// Canonical framing: lexicographically first pairwise-adjacent triple.
    pub fn frame_canonical(&mut self) -> Result<(usize, usize, usize), ColoringError> {
        let triple = self
            .face_graph
            .first_triple()
            .ok_or(ColoringError::NoFramingTriple)?;
        self.frame(triple)?;
        Ok(triple)
    }

    /// Exact count by enumerating color-class patterns rather than
    /// colorings: unpinned faces either join an existing class or open a new
    /// one (restricted-growth order, so each partition is visited once), and
    /// a complete pattern with j free classes stands for
    /// (t-f)(t-f-1)...(t-f-j+1) colorings, where t is the palette size and f
    /// the number of distinct pinned colors. Colors are interchangeable, so
    /// this is exponentially cheaper than walking colorings.
    pub fn count(&self) -> CountResult {
        if self.infeasible_fixed || self.face_graph.has_loop() {
            return CountResult {
                count: BigUint::zero(),
                infeasible_fixed: self.infeasible_fixed,
            };
        }
        let n = self.face_graph.n_faces();
        let t = self.space.size();
        let mut pinned_colors: Vec<usize> = self.fixed.iter().flatten().map(|c| c.0).collect();
        pinned_colors.sort_unstable();
        pinned_colors.dedup();
        let f = pinned_colors.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in self.face_graph.simple_adjacencies().iter() {
            adj[a].push(b);
            adj[b].push(a);
        }
        // classes 0..f are the pinned colors; free classes follow
        let mut class = vec![usize::MAX; n];
        let mut todo = Vec::new();
        for (face, pin) in self.fixed.iter().enumerate() {
            match pin {
                Some(c) => {
                    class[face] = pinned_colors.binary_search(&c.0).expect("pinned color");
                }
                None => todo.push(face),
            }
        }
        // most-constrained-first among the unpinned faces
        todo.sort_by_key(|&face| (usize::MAX - adj[face].len(), face));
        // falling factorials (t-f)_j for j = 0..=todo.len()
        let max_free = todo.len();
        let mut weights = Vec::with_capacity(max_free + 1);
        let mut acc = BigUint::one();
        weights.push(acc.clone());
        for j in 0..max_free {
            let avail = (t as i128) - (f as i128) - (j as i128);
            if avail <= 0 {
                acc = BigUint::zero();
            } else {
                acc *= BigUint::from(avail as u64);
            }
            weights.push(acc.clone());
        }
        let mut count = BigUint::zero();
        self.count_patterns(0, &todo, &adj, f, 0, &mut class, &weights, &mut count);
        CountResult {
            count,
            infeasible_fixed: false,
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn count_patterns(
        &self,
        level: usize,
        todo: &[usize],
        adj: &[Vec<usize>],
        pinned: usize,
        free_used: usize,
        class: &mut Vec<usize>,
        weights: &[BigUint],
        count: &mut BigUint,
    ) {
        if level == todo.len() {
            *count += &weights[free_used];
            return;
        }
        let face = todo[level];
        for cls in 0..(pinned + free_used) {
            if adj[face].iter().any(|&w| class[w] == cls) {
                continue;
            }
            class[face] = cls;
            self.count_patterns(level + 1, todo, adj, pinned, free_used, class, weights, count);
            class[face] = usize::MAX;
        }
        // open a fresh class (single branch: classes are unlabeled)
        if weights[free_used + 1] > BigUint::zero() {
            class[face] = pinned + free_used;
            self.count_patterns(
                level + 1,
                todo,
                adj,
                pinned,
                free_used + 1,
                class,
                weights,
                count,
            );
            class[face] = usize::MAX;
        }
    }

    /// First solutions in lexicographic order of the assignment vector
    /// (faces by id, colors by index); stops walking once `limit` solutions
    /// are found. The exact total comes from `count`.
    pub fn enumerate(&self, limit: usize) -> Enumeration {
        let total = self.count().count;
        if total == BigUint::zero() {
            return Enumeration {
                solutions: Vec::new(),
                total,
            };
        }
        let n = self.face_graph.n_faces();
        let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in self.face_graph.simple_adjacencies().iter() {
            earlier[a.max(b)].push(a.min(b));
        }
        let ncolors = self.space.size() as usize;
        let mut assigned: Vec<usize> = vec![usize::MAX; n];
        let mut solutions: Vec<Vec<Color>> = Vec::new();
        self.enumerate_rec(0, &earlier, ncolors, limit, &mut assigned, &mut solutions);
        Enumeration { solutions, total }
    }

    fn enumerate_rec(
        &self,
        face: usize,
        earlier: &[Vec<usize>],
        ncolors: usize,
        limit: usize,
        assigned: &mut Vec<usize>,
        solutions: &mut Vec<Vec<Color>>,
    ) -> bool {
        if solutions.len() >= limit {
            return false;
        }
        if face == assigned.len() {
            solutions.push(assigned.iter().map(|&c| Color(c)).collect());
            return solutions.len() < limit;
        }
        let choices: Vec<usize> = match self.fixed[face] {
            Some(c) => vec![c.0],
            None => (0..ncolors).collect(),
        };
        for c in choices {
            if earlier[face].iter().any(|&g| assigned[g] == c) {
                continue;
            }
            assigned[face] = c;
            let keep_going = self.enumerate_rec(face + 1, earlier, ncolors, limit, assigned, solutions);
            assigned[face] = usize::MAX;
            if !keep_going {
                return false;
            }
        }
        true
    }
}

/// Unconstrained coloring count.
pub fn count_colorings(map: &CombMap, q: u64) -> Result<CountResult, ColoringError> {
    Ok(ColoringProblem::new(map, q)?.count())
}

/// Count with the canonical framing triple pinned to (0, 1, inf). When the
/// unconstrained count is nonzero and the projective symmetry acts freely,
/// this equals total / ((q+1) q (q-1)).
pub fn framed_count(map: &CombMap, q: u64) -> Result<BigUint, ColoringError> {
    let mut p = ColoringProblem::new(map, q)?;
    p.frame_canonical()?;
    Ok(p.count().count)
}

#[derive(Clone, Debug)]
pub struct CountTable {
    pub framed: bool,
    pub rows: Vec<(u64, BigUint)>,
}

pub fn count_table(map: &CombMap, qs: &[u64], framed: bool) -> Result<CountTable, ColoringError> {
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let v = if framed {
            framed_count(map, q)?
        } else {
            count_colorings(map, q)?.count
        };
        rows.push((q, v));
    }
    Ok(CountTable { framed, rows })
}

impl fmt::Display for CountTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let header = if self.framed { "framed" } else { "total" };
        let width = self
            .rows
            .iter()
            .map(|(_, v)| v.to_string().len())
            .max()
            .unwrap_or(1)
            .max(header.len());
        writeln!(f, "{:>4}  {:>width$}", "q", header)?;
        for (q, v) in &self.rows {
            writeln!(f, "{q:>4}  {v:>width$}")?;
        }
        Ok(())
    }
}
