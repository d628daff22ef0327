//! Combinatorial maps: embedded graphs on closed oriented surfaces encoded
//! by a half-edge structure (darts, edge involution `alpha`, vertex rotation
//! `sigma`). Faces are the orbits of `sigma ∘ alpha`, traversed with the
//! interior on the left.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use thiserror::Error;

pub type Dart = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("dart {0} referenced but not declared")]
    UnknownDart(Dart),
    #[error("alpha has fixed point at dart {0}")]
    AlphaFixedPoint(Dart),
    #[error("alpha is not an involution at dart {0}")]
    AlphaNotInvolution(Dart),
    #[error("dart {0} appears in more than one alpha pair")]
    AlphaOverlap(Dart),
    #[error("dart {0} appears in more than one sigma cycle")]
    SigmaOverlap(Dart),
    #[error("dart {0} is not covered by alpha")]
    AlphaMissing(Dart),
    #[error("dart {0} is not covered by sigma")]
    SigmaMissing(Dart),
    #[error("map has no darts")]
    Empty,
    #[error("vertex at dart {0} is not trivalent (degree {1})")]
    NotTrivalent(Dart, usize),
    #[error("unknown builtin graph name {0:?} (expected theta, tetra, bigon or loop)")]
    UnknownBuiltin(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An embedded 2-graph as a half-edge combinatorial map. Immutable after
/// construction; `build` enforces the permutation axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombMap {
    darts: Vec<Dart>,
    alpha: BTreeMap<Dart, Dart>,
    sigma: BTreeMap<Dart, Dart>,
    labels: BTreeMap<Dart, String>,
}

/// Structured serialization form (text and key/value tree share this shape).
#[derive(Serialize, Deserialize)]
pub struct GraphFile {
    pub darts: Vec<Dart>,
    pub alpha: Vec<(Dart, Dart)>,
    pub sigma: Vec<Vec<Dart>>,
    #[serde(default)]
    pub labels: BTreeMap<Dart, String>,
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub components: usize,
    /// Genus of the base surface (summed over components).
    pub genus: i64,
    /// Darts starting vertex orbits of size != 3.
    pub non_trivalent: Vec<(Dart, usize)>,
    pub vertex_degrees: Vec<usize>,
}

impl ValidationReport {
    pub fn is_trivalent(&self) -> bool {
        self.non_trivalent.is_empty()
    }
}

/// Euler characteristic and genus of the weave surface (the branched double
/// cover of the base) determined by a trivalent map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WeaveEuler {
    pub chi: i64,
    /// Genus via chi = 2 - 2g; meaningful when the weave is connected and
    /// orientable, which holds for all the builtin families.
    pub genus: i64,
}

impl CombMap {
    pub fn build(
        darts: Vec<Dart>,
        alpha_pairs: &[(Dart, Dart)],
        sigma_cycles: &[Vec<Dart>],
    ) -> Result<CombMap, MapError> {
        let mut darts = darts;
        darts.sort_unstable();
        darts.dedup();
        if darts.is_empty() {
            return Err(MapError::Empty);
        }
        let dart_set: BTreeSet<Dart> = darts.iter().copied().collect();

        let mut alpha = BTreeMap::new();
        for &(a, b) in alpha_pairs {
            for d in [a, b] {
                if !dart_set.contains(&d) {
                    return Err(MapError::UnknownDart(d));
                }
            }
            if a == b {
                return Err(MapError::AlphaFixedPoint(a));
            }
            if alpha.insert(a, b).is_some() {
                return Err(MapError::AlphaOverlap(a));
            }
            if alpha.insert(b, a).is_some() {
                return Err(MapError::AlphaOverlap(b));
            }
        }
        for &d in &darts {
            match alpha.get(&d) {
                None => return Err(MapError::AlphaMissing(d)),
                Some(&e) => {
                    if alpha.get(&e) != Some(&d) {
                        return Err(MapError::AlphaNotInvolution(d));
                    }
                }
            }
        }

        let mut sigma = BTreeMap::new();
        for cycle in sigma_cycles {
            if cycle.is_empty() {
                continue;
            }
            for w in 0..cycle.len() {
                let d = cycle[w];
                let next = cycle[(w + 1) % cycle.len()];
                if !dart_set.contains(&d) {
                    return Err(MapError::UnknownDart(d));
                }
                if sigma.insert(d, next).is_some() {
                    return Err(MapError::SigmaOverlap(d));
                }
            }
        }
        for &d in &darts {
            if !sigma.contains_key(&d) {
                return Err(MapError::SigmaMissing(d));
            }
        }

        Ok(CombMap {
            darts,
            alpha,
            sigma,
            labels: BTreeMap::new(),
        })
    }

    pub fn with_labels(mut self, labels: BTreeMap<Dart, String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn darts(&self) -> &[Dart] {
        &self.darts
    }

    pub fn alpha(&self, d: Dart) -> Dart {
        self.alpha[&d]
    }

    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma[&d]
    }

    /// Face permutation: sigma after alpha.
    pub fn phi(&self, d: Dart) -> Dart {
        self.sigma[&self.alpha[&d]]
    }

    pub fn labels(&self) -> &BTreeMap<Dart, String> {
        &self.labels
    }

    fn orbits(&self, next: impl Fn(Dart) -> Dart) -> Vec<Vec<Dart>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &d in &self.darts {
            if seen.contains(&d) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = d;
            loop {
                orbit.push(cur);
                seen.insert(cur);
                cur = next(cur);
                if cur == d {
                    break;
                }
            }
            out.push(orbit);
        }
        out
    }

    /// Vertex orbits (cycles of sigma), ordered by minimal contained dart.
    pub fn vertices(&self) -> Vec<Vec<Dart>> {
        self.orbits(|d| self.sigma[&d])
    }

    /// Edges as unordered dart pairs, ordered by smaller dart.
    pub fn edges(&self) -> Vec<(Dart, Dart)> {
        self.darts
            .iter()
            .filter(|&&d| d < self.alpha[&d])
            .map(|&d| (d, self.alpha[&d]))
            .collect()
    }

    /// Face orbits (cycles of phi), ordered by minimal contained dart. The
    /// index in this list is the canonical face id.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        self.orbits(|d| self.phi(d))
    }

    /// Connected components under the group generated by alpha and sigma.
    pub fn components(&self) -> usize {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for &start in &self.darts {
            if seen.contains(&start) {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            while let Some(d) = stack.pop() {
                if !seen.insert(d) {
                    continue;
                }
                stack.push(self.alpha[&d]);
                stack.push(self.sigma[&d]);
            }
        }
        count
    }

    pub fn validate(&self) -> ValidationReport {
        let vertices = self.vertices();
        let edges = self.edges();
        let faces = self.faces();
        let components = self.components();
        let chi = vertices.len() as i64 - edges.len() as i64 + faces.len() as i64;
        let genus = (2 * components as i64 - chi) / 2;
        let non_trivalent: Vec<(Dart, usize)> = vertices
            .iter()
            .filter(|v| v.len() != 3)
            .map(|v| (*v.iter().min().unwrap(), v.len()))
            .collect();
        ValidationReport {
            vertices: vertices.len(),
            edges: edges.len(),
            faces: faces.len(),
            components,
            genus,
            non_trivalent,
            vertex_degrees: vertices.iter().map(|v| v.len()).collect(),
        }
    }

    /// Euler characteristic of the weave surface over a trivalent map:
    /// chi(Lambda) = 2 chi(Sigma) - V.
    pub fn weave_euler_char(&self) -> Result<WeaveEuler, MapError> {
        let report = self.validate();
        if let Some(&(d, deg)) = report.non_trivalent.first() {
            return Err(MapError::NotTrivalent(d, deg));
        }
        let chi_base =
            report.vertices as i64 - report.edges as i64 + report.faces as i64;
        let chi = 2 * chi_base - report.vertices as i64;
        Ok(WeaveEuler {
            chi,
            genus: (2 - chi) / 2,
        })
    }

    /// Map dart -> face id (canonical numbering by minimal dart per orbit).
    pub fn face_of(&self) -> BTreeMap<Dart, usize> {
        let mut out = BTreeMap::new();
        for (i, face) in self.faces().iter().enumerate() {
            for &d in face {
                out.insert(d, i);
            }
        }
        out
    }

    pub fn face_adjacency(&self) -> FaceGraph {
        let face_of = self.face_of();
        let n_faces = self.faces().len();
        let mut adjacencies = Vec::new();
        for (d, e) in self.edges() {
            let (mut a, mut b) = (face_of[&d], face_of[&e]);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            adjacencies.push((a, b));
        }
        adjacencies.sort_unstable();
        FaceGraph {
            n_faces,
            adjacencies,
        }
    }

    /// Canonical relabeling: deterministic traversal from each possible start
    /// dart, taking the lexicographically least (sigma, alpha) encoding. Two
    /// maps are isomorphic iff their canonical encodings are equal.
    pub fn canonical_encoding(&self) -> Vec<Vec<(u32, u32)>> {
        let mut comps: Vec<Vec<(u32, u32)>> = Vec::new();
        let mut seen_comp = BTreeSet::new();
        for &root in &self.darts {
            if seen_comp.contains(&root) {
                continue;
            }
            // collect the component
            let mut comp = Vec::new();
            let mut stack = vec![root];
            let mut in_comp = BTreeSet::new();
            while let Some(d) = stack.pop() {
                if !in_comp.insert(d) {
                    continue;
                }
                comp.push(d);
                stack.push(self.alpha[&d]);
                stack.push(self.sigma[&d]);
            }
            seen_comp.extend(in_comp.iter().copied());

            let mut best: Option<Vec<(u32, u32)>> = None;
            for &start in &comp {
                let enc = self.encode_from(start, comp.len());
                if best.as_ref().map_or(true, |b| enc < *b) {
                    best = Some(enc);
                }
            }
            comps.push(best.unwrap());
        }
        comps.sort();
        comps
    }

    fn encode_from(&self, start: Dart, size: usize) -> Vec<(u32, u32)> {
        let mut label: BTreeMap<Dart, u32> = BTreeMap::new();
        let mut order: Vec<Dart> = Vec::with_capacity(size);
        label.insert(start, 0);
        order.push(start);
        let mut i = 0;
        while i < order.len() {
            let d = order[i];
            for n in [self.sigma[&d], self.alpha[&d]] {
                if !label.contains_key(&n) {
                    label.insert(n, order.len() as u32);
                    order.push(n);
                }
            }
            i += 1;
        }
        order
            .iter()
            .map(|d| (label[&self.sigma[d]], label[&self.alpha[d]]))
            .collect()
    }

    pub fn is_isomorphic(&self, other: &CombMap) -> bool {
        self.canonical_encoding() == other.canonical_encoding()
    }

    /// A builtin graph by name: theta, tetra, bigon or loop. Tetra stands in
    /// for the Clifford-torus 2-graph, theta for the genus-0 seed.
    pub fn builtin(name: &str) -> Result<CombMap, MapError> {
        match name {
            "theta" => CombMap::build(
                (0..6).collect(),
                &[(0, 3), (1, 4), (2, 5)],
                &[vec![0, 1, 2], vec![3, 5, 4]],
            ),
            "tetra" => CombMap::build(
                (0..12).collect(),
                &[(0, 5), (2, 6), (3, 8), (1, 9), (4, 10), (7, 11)],
                &[
                    vec![0, 1, 2],
                    vec![3, 4, 5],
                    vec![6, 7, 8],
                    vec![9, 10, 11],
                ],
            ),
            "bigon" => CombMap::build(
                (0..4).collect(),
                &[(0, 2), (1, 3)],
                &[vec![0, 1], vec![2, 3]],
            ),
            "loop" => CombMap::build((0..2).collect(), &[(0, 1)], &[vec![0, 1]]),
            _ => Err(MapError::UnknownBuiltin(name.to_string())),
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 4] = ["theta", "tetra", "bigon", "loop"];

    /// Line-oriented text serialization; round-trips through `parse_text` up
    /// to canonical relabeling.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let max = *self.darts.last().unwrap();
        let contiguous = self.darts.len() as u32 == max + 1 && self.darts[0] == 0;
        if contiguous {
            writeln!(out, "darts {}", self.darts.len()).unwrap();
        } else {
            let list: Vec<String> = self.darts.iter().map(|d| d.to_string()).collect();
            writeln!(out, "darts: {}", list.join(" ")).unwrap();
        }
        for (a, b) in self.edges() {
            writeln!(out, "alpha: {a} {b}").unwrap();
        }
        for cycle in self.vertices() {
            let list: Vec<String> = cycle.iter().map(|d| d.to_string()).collect();
            writeln!(out, "sigma: {}", list.join(" ")).unwrap();
        }
        for (d, text) in &self.labels {
            writeln!(out, "label {d} {text}").unwrap();
        }
        out
    }

    pub fn to_graph_file(&self) -> GraphFile {
        GraphFile {
            darts: self.darts.clone(),
            alpha: self.edges(),
            sigma: self.vertices(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_graph_file(gf: GraphFile) -> Result<CombMap, MapError> {
        Ok(CombMap::build(gf.darts, &gf.alpha, &gf.sigma)?.with_labels(gf.labels))
    }

    /// Parse the text format. Lines starting with `#` are comments; a leading
    /// `{` switches to the structured (JSON) form.
    pub fn parse(input: &str) -> Result<CombMap, MapError> {
        if input.trim_start().starts_with('{') {
            let gf: GraphFile =
                serde_json::from_str(input).map_err(|e| MapError::Parse {
                    line: e.line(),
                    msg: e.to_string(),
                })?;
            return CombMap::from_graph_file(gf);
        }
        let mut darts: Vec<Dart> = Vec::new();
        let mut alpha = Vec::new();
        let mut sigma = Vec::new();
        let mut labels = BTreeMap::new();
        for (idx, raw) in input.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            let head = tokens.next().unwrap();
            let parse_dart = |tok: &str| -> Result<Dart, MapError> {
                tok.parse().map_err(|_| MapError::Parse {
                    line: lineno,
                    msg: format!("expected dart id, found {tok:?}"),
                })
            };
            match head {
                "darts" => {
                    let n: u32 = tokens
                        .next()
                        .ok_or_else(|| MapError::Parse {
                            line: lineno,
                            msg: "darts needs a count".into(),
                        })
                        .and_then(parse_dart)?;
                    darts.extend(0..n);
                }
                "darts:" => {
                    for tok in tokens {
                        darts.push(parse_dart(tok)?);
                    }
                }
                "alpha:" => {
                    let a = tokens.next().map(parse_dart).transpose()?;
                    let b = tokens.next().map(parse_dart).transpose()?;
                    match (a, b) {
                        (Some(a), Some(b)) => alpha.push((a, b)),
                        _ => {
                            return Err(MapError::Parse {
                                line: lineno,
                                msg: "alpha needs two dart ids".into(),
                            })
                        }
                    }
                }
                "sigma:" => {
                    let cycle: Result<Vec<Dart>, _> = tokens.map(parse_dart).collect();
                    sigma.push(cycle?);
                }
                "label" => {
                    let d = tokens
                        .next()
                        .ok_or_else(|| MapError::Parse {
                            line: lineno,
                            msg: "label needs a dart id".into(),
                        })
                        .and_then(parse_dart)?;
                    let text: Vec<&str> = tokens.collect();
                    labels.insert(d, text.join(" "));
                }
                other => {
                    return Err(MapError::Parse {
                        line: lineno,
                        msg: format!("unknown directive {other:?}"),
                    })
                }
            }
        }
        Ok(CombMap::build(darts, &alpha, &sigma)?.with_labels(labels))
    }
}

/// Face-adjacency structure: one adjacency entry per edge of the source map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceGraph {
    n_faces: usize,
    adjacencies: Vec<(usize, usize)>,
}

impl FaceGraph {
    pub fn new(n_faces: usize, mut adjacencies: Vec<(usize, usize)>) -> FaceGraph {
        for (a, b) in adjacencies.iter_mut() {
            if a > b {
                std::mem::swap(a, b);
            }
        }
        adjacencies.sort_unstable();
        FaceGraph {
            n_faces,
            adjacencies,
        }
    }

    pub fn n_faces(&self) -> usize {
        self.n_faces
    }

    /// Multiset of adjacencies, one per edge.
    pub fn adjacencies(&self) -> &[(usize, usize)] {
        &self.adjacencies
    }

    /// Deduplicated adjacency pairs, loops excluded.
    pub fn simple_adjacencies(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adjacencies
            .iter()
            .copied()
            .filter(|(a, b)| a != b)
            .collect();
        out.dedup();
        out
    }

    /// An edge with the same face on both sides; forces zero proper colorings.
    pub fn has_loop(&self) -> bool {
        self.adjacencies.iter().any(|(a, b)| a == b)
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        let key = (a.min(b), a.max(b));
        a != b && self.adjacencies.binary_search(&key).is_ok()
    }

    /// Lexicographically first triple of pairwise-adjacent faces, if any.
    pub fn first_triple(&self) -> Option<(usize, usize, usize)> {
        for a in 0..self.n_faces {
            for b in (a + 1)..self.n_faces {
                if !self.are_adjacent(a, b) {
                    continue;
                }
                for c in (b + 1)..self.n_faces {
                    if self.are_adjacent(a, c) && self.are_adjacent(b, c) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_counts() {
        let m = CombMap::builtin("theta").unwrap();
        let r = m.validate();
        assert_eq!((r.vertices, r.edges, r.faces), (2, 3, 3));
        assert_eq!(r.genus, 0);
        assert!(r.is_trivalent());
    }

    #[test]
    fn tetra_counts_and_dual() {
        let m = CombMap::builtin("tetra").unwrap();
        let r = m.validate();
        assert_eq!((r.vertices, r.edges, r.faces), (4, 6, 4));
        assert_eq!(r.genus, 0);
        // dual of the tetrahedron is the tetrahedron: complete graph on 4 faces
        let fg = m.face_adjacency();
        assert_eq!(fg.simple_adjacencies().len(), 6);
        assert_eq!(fg.adjacencies().len(), 6);
        assert!(!fg.has_loop());
    }

    #[test]
    fn bigon_and_loop() {
        let m = CombMap::builtin("bigon").unwrap();
        let r = m.validate();
        assert_eq!((r.vertices, r.edges, r.faces), (2, 2, 2));
        let fg = m.face_adjacency();
        assert_eq!(fg.adjacencies(), &[(0, 1), (0, 1)]);

        let l = CombMap::builtin("loop").unwrap();
        let rl = l.validate();
        assert_eq!((rl.vertices, rl.edges, rl.faces), (1, 1, 2));
        assert!(!rl.is_trivalent());
    }

    #[test]
    fn theta_faces_all_pairwise_adjacent() {
        let m = CombMap::builtin("theta").unwrap();
        let fg = m.face_adjacency();
        assert_eq!(fg.n_faces(), 3);
        assert_eq!(fg.simple_adjacencies(), vec![(0, 1), (0, 2), (1, 2)]);
        assert_eq!(fg.first_triple(), Some((0, 1, 2)));
    }

    #[test]
    fn alpha_fixed_point_rejected() {
        let err = CombMap::build(vec![0, 1], &[(0, 0), (1, 1)], &[vec![0, 1]]);
        assert_eq!(err.unwrap_err(), MapError::AlphaFixedPoint(0));
    }

    #[test]
    fn missing_dart_rejected() {
        let err = CombMap::build(vec![0, 1], &[(0, 2)], &[vec![0, 1]]);
        assert_eq!(err.unwrap_err(), MapError::UnknownDart(2));
    }

    #[test]
    fn weave_euler_chars() {
        let theta = CombMap::builtin("theta").unwrap();
        assert_eq!(theta.weave_euler_char().unwrap(), WeaveEuler { chi: 2, genus: 0 });
        let tetra = CombMap::builtin("tetra").unwrap();
        assert_eq!(tetra.weave_euler_char().unwrap(), WeaveEuler { chi: 0, genus: 1 });
        let l = CombMap::builtin("loop").unwrap();
        assert!(matches!(l.weave_euler_char(), Err(MapError::NotTrivalent(_, _))));
    }

    #[test]
    fn text_round_trip() {
        for name in CombMap::BUILTIN_NAMES {
            let m = CombMap::builtin(name).unwrap();
            let back = CombMap::parse(&m.to_text()).unwrap();
            assert!(m.is_isomorphic(&back), "round trip failed for {name}");
            assert_eq!(m.faces(), back.faces());
        }
    }

    #[test]
    fn json_round_trip() {
        let m = CombMap::builtin("tetra").unwrap();
        let json = serde_json::to_string(&m.to_graph_file()).unwrap();
        let back = CombMap::parse(&json).unwrap();
        assert!(m.is_isomorphic(&back));
    }

    #[test]
    fn isomorphism_ignores_relabeling() {
        let m = CombMap::builtin("theta").unwrap();
        // same theta with darts shifted by 10
        let shifted = CombMap::build(
            (10..16).collect(),
            &[(10, 13), (11, 14), (12, 15)],
            &[vec![10, 11, 12], vec![13, 15, 14]],
        )
        .unwrap();
        assert!(m.is_isomorphic(&shifted));
        let bigon = CombMap::builtin("bigon").unwrap();
        assert!(!m.is_isomorphic(&bigon));
    }

    #[test]
    fn parse_error_reports_line() {
        let err = CombMap::parse("darts 4\nalpha: 0\n").unwrap_err();
        match err {
            MapError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
