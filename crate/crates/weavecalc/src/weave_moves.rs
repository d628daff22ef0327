//! Graph surgeries realizing Lagrangian cobordisms on 2-graph weaves:
//! connected sum with the Clifford torus (triangle insertion at a trivalent
//! vertex), connected sum with the unknotted torus (bigon insertion on an
//! edge), a generic disk-patch rewrite, and the Lambda(g, k) builder.

use crate::poly::IntPolynomial;
use crate::surface_map::{CombMap, Dart, MapError};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MoveError {
    #[error("dart {0} does not exist in the map")]
    UnknownDart(Dart),
    #[error("triangle insertion site at dart {0} is not a trivalent vertex (degree {1})")]
    SiteNotTrivalent(Dart, usize),
    #[error("bigon insertion site {0} has the same face on both sides")]
    LoopAdjacency(Dart),
    #[error("invalid lambda parameters: need 0 <= k <= g, got g={g} k={k}")]
    BadLambda { g: i64, k: i64 },
    #[error("no eligible site for the move")]
    NoSite,
    #[error("patch removal set is not a union of vertex orbits (dart {0} half-removed)")]
    PartialVertexRemoval(Dart),
    #[error("excised region is not a disk: {0}")]
    NonDiskExcision(String),
    #[error("patch boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// A replacement sub-map with a declared boundary-dart matching. The removed
/// darts must cover whole vertex orbits; boundary darts of the excision are
/// the surviving darts whose alpha-partner was removed.
#[derive(Clone, Debug)]
pub struct Patch {
    pub remove: Vec<Dart>,
    pub darts: Vec<Dart>,
    pub alpha: Vec<(Dart, Dart)>,
    pub sigma: Vec<Vec<Dart>>,
    /// (host boundary dart, patch port dart) pairs.
    pub matching: Vec<(Dart, Dart)>,
}

#[derive(Clone, Debug)]
pub enum WeaveMove {
    /// Site: any dart at the trivalent vertex to replace by a triangle.
    TriangleInsertion(Dart),
    /// Site: either dart of the edge to split by a bigon.
    BigonInsertion(Dart),
    Patch(Patch),
}

/// Predicted effect of a move on framed counts and on the weave genus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MovePrediction {
    pub factor: IntPolynomial,
    pub genus_delta: i64,
    pub description: String,
}

/// Count factor and genus shift for the builtin moves; patches carry no
/// prediction.
pub fn predict(m: &WeaveMove) -> Option<MovePrediction> {
    match m {
        WeaveMove::TriangleInsertion(_) => Some(MovePrediction {
            factor: IntPolynomial::t_plus(-2),
            genus_delta: 1,
            description: "triangle insertion (Clifford summand): framed count factor q-2".into(),
        }),
        WeaveMove::BigonInsertion(_) => Some(MovePrediction {
            factor: IntPolynomial::t_plus(-1),
            genus_delta: 1,
            description: "bigon insertion (unknot summand): framed count factor q-1".into(),
        }),
        WeaveMove::Patch(_) => None,
    }
}

fn fresh_darts(map: &CombMap, n: u32) -> Vec<Dart> {
    let start = map.darts().last().unwrap() + 1;
    (start..start + n).collect()
}

fn rebuild(
    darts: Vec<Dart>,
    alpha: &BTreeMap<Dart, Dart>,
    sigma_cycles: &[Vec<Dart>],
) -> Result<CombMap, MapError> {
    let pairs: Vec<(Dart, Dart)> = alpha
        .iter()
        .filter(|(a, b)| a < b)
        .map(|(&a, &b)| (a, b))
        .collect();
    CombMap::build(darts, &pairs, sigma_cycles)
}

fn current_alpha(map: &CombMap) -> BTreeMap<Dart, Dart> {
    map.darts().iter().map(|&d| (d, map.alpha(d))).collect()
}

/// Replace the trivalent vertex at dart `site` by a 3-cycle of trivalent
/// vertices, creating one new triangular face adjacent to the three faces
/// formerly around the vertex. (V, E, F) changes by (+2, +3, +1).
pub fn insert_triangle(map: &CombMap, site: Dart) -> Result<CombMap, MoveError> {
    if !map.darts().contains(&site) {
        return Err(MoveError::UnknownDart(site));
    }
    // vertex orbit in ccw order starting at site
    let a = site;
    let b = map.sigma(a);
    let c = map.sigma(b);
    if map.sigma(c) != a || b == a || c == a {
        let mut deg = 1;
        let mut cur = map.sigma(a);
        while cur != a {
            deg += 1;
            cur = map.sigma(cur);
        }
        return Err(MoveError::SiteNotTrivalent(site, deg));
    }

    let n = fresh_darts(map, 6);
    let alpha = {
        let mut al = current_alpha(map);
        al.insert(n[0], n[1]);
        al.insert(n[1], n[0]);
        al.insert(n[2], n[3]);
        al.insert(n[3], n[2]);
        al.insert(n[4], n[5]);
        al.insert(n[5], n[4]);
        al
    };
    let mut cycles: Vec<Vec<Dart>> = map
        .vertices()
        .into_iter()
        .filter(|v| !v.contains(&a))
        .collect();
    // corner vertices, each keeping one original dart; interior triangle face
    // is the phi-orbit of the three inward darts
    cycles.push(vec![a, n[0], n[5]]);
    cycles.push(vec![b, n[2], n[1]]);
    cycles.push(vec![c, n[4], n[3]]);

    let mut darts: Vec<Dart> = map.darts().to_vec();
    darts.extend_from_slice(&n);
    Ok(rebuild(darts, &alpha, &cycles)?)
}

/// Split the edge at dart `site` by two new trivalent vertices bounding one
/// new bigon face. The two sides of the edge must be distinct faces.
pub fn insert_bigon(map: &CombMap, site: Dart) -> Result<CombMap, MoveError> {
    if !map.darts().contains(&site) {
        return Err(MoveError::UnknownDart(site));
    }
    let d = site;
    let d2 = map.alpha(d);
    let face_of = map.face_of();
    if face_of[&d] == face_of[&d2] {
        return Err(MoveError::LoopAdjacency(site));
    }

    let n = fresh_darts(map, 6);
    let (a0, a1, a2, b0, b1, b2) = (n[0], n[1], n[2], n[3], n[4], n[5]);
    let mut alpha = current_alpha(map);
    alpha.insert(d, a0);
    alpha.insert(a0, d);
    alpha.insert(d2, b0);
    alpha.insert(b0, d2);
    alpha.insert(a1, b1);
    alpha.insert(b1, a1);
    alpha.insert(a2, b2);
    alpha.insert(b2, a2);

    let mut cycles = map.vertices();
    cycles.push(vec![a0, a2, a1]);
    cycles.push(vec![b0, b1, b2]);

    let mut darts: Vec<Dart> = map.darts().to_vec();
    darts.extend_from_slice(&n);
    Ok(rebuild(darts, &alpha, &cycles)?)
}

/// Excise a disk (a union of vertex stars) and stitch in a replacement
/// sub-map along the declared boundary matching.
pub fn apply_patch(map: &CombMap, patch: &Patch) -> Result<CombMap, MoveError> {
    let removed: BTreeSet<Dart> = patch.remove.iter().copied().collect();
    for &d in &removed {
        if !map.darts().contains(&d) {
            return Err(MoveError::UnknownDart(d));
        }
        if !removed.contains(&map.sigma(d)) {
            return Err(MoveError::PartialVertexRemoval(d));
        }
    }
    if removed.is_empty() {
        return Err(MoveError::NonDiskExcision("removal set is empty".into()));
    }
    check_disk(map, &removed)?;

    // boundary darts: survivors whose partner is removed
    let boundary: Vec<Dart> = map
        .darts()
        .iter()
        .copied()
        .filter(|d| !removed.contains(d) && removed.contains(&map.alpha(*d)))
        .collect();
    let matched_hosts: BTreeSet<Dart> = patch.matching.iter().map(|&(h, _)| h).collect();
    let boundary_set: BTreeSet<Dart> = boundary.iter().copied().collect();
    if matched_hosts != boundary_set {
        return Err(MoveError::BoundaryMismatch(format!(
            "excision has {} boundary darts, matching covers {} of them",
            boundary_set.len(),
            matched_hosts.len()
        )));
    }
    let patch_darts: BTreeSet<Dart> = patch.darts.iter().copied().collect();
    let mut matched_ports = BTreeSet::new();
    for &(_, p) in &patch.matching {
        if !patch_darts.contains(&p) {
            return Err(MoveError::BoundaryMismatch(format!(
                "port dart {p} is not a patch dart"
            )));
        }
        if !matched_ports.insert(p) {
            return Err(MoveError::BoundaryMismatch(format!(
                "port dart {p} matched twice"
            )));
        }
    }
    if let Some(overlap) = patch.darts.iter().find(|d| map.darts().contains(d)) {
        return Err(MoveError::BoundaryMismatch(format!(
            "patch dart {overlap} collides with a host dart"
        )));
    }

    let mut alpha: BTreeMap<Dart, Dart> = map
        .darts()
        .iter()
        .filter(|d| !removed.contains(d))
        .filter(|d| !removed.contains(&map.alpha(**d)))
        .map(|&d| (d, map.alpha(d)))
        .collect();
    for &(x, y) in &patch.alpha {
        alpha.insert(x, y);
        alpha.insert(y, x);
    }
    for &(h, p) in &patch.matching {
        alpha.insert(h, p);
        alpha.insert(p, h);
    }

    let mut cycles: Vec<Vec<Dart>> = map
        .vertices()
        .into_iter()
        .filter(|v| !removed.contains(&v[0]))
        .collect();
    cycles.extend(patch.sigma.iter().cloned());

    let mut darts: Vec<Dart> = map
        .darts()
        .iter()
        .copied()
        .filter(|d| !removed.contains(d))
        .collect();
    darts.extend(patch.darts.iter().copied());

    let result = rebuild(darts, &alpha, &cycles)?;

    // the inserted region must itself be a disk
    let inserted: BTreeSet<Dart> = patch.darts.iter().copied().collect();
    check_disk(&result, &inserted)
        .map_err(|_| MoveError::BoundaryMismatch("replacement region is not a disk".into()))?;
    Ok(result)
}

/// Disk test for a region given by whole vertex stars: connected through
/// internal edges and chi = V - E_internal + F_internal = 1 (classification
/// of compact surfaces with boundary).
fn check_disk(map: &CombMap, removed: &BTreeSet<Dart>) -> Result<(), MoveError> {
    let vertices: Vec<Vec<Dart>> = map
        .vertices()
        .into_iter()
        .filter(|v| removed.contains(&v[0]))
        .collect();
    let v = vertices.len();
    let e_int = map
        .edges()
        .iter()
        .filter(|(a, b)| removed.contains(a) && removed.contains(b))
        .count();
    let f_int = map
        .faces()
        .iter()
        .filter(|f| f.iter().all(|d| removed.contains(d)))
        .count();

    // connectivity over internal edges
    let mut vertex_of: BTreeMap<Dart, usize> = BTreeMap::new();
    for (i, vs) in vertices.iter().enumerate() {
        for &d in vs {
            vertex_of.insert(d, i);
        }
    }
    let mut reach = vec![false; v];
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        if reach[i] {
            continue;
        }
        reach[i] = true;
        for &d in &vertices[i] {
            let partner = map.alpha(d);
            if let Some(&j) = vertex_of.get(&partner) {
                stack.push(j);
            }
        }
    }
    if !reach.iter().all(|&r| r) {
        return Err(MoveError::NonDiskExcision("region is disconnected".into()));
    }
    let chi = v as i64 - e_int as i64 + f_int as i64;
    if chi != 1 {
        return Err(MoveError::NonDiskExcision(format!(
            "region has Euler characteristic {chi}, expected 1"
        )));
    }
    Ok(())
}

pub fn apply_move(map: &CombMap, m: &WeaveMove) -> Result<CombMap, MoveError> {
    match m {
        WeaveMove::TriangleInsertion(d) => insert_triangle(map, *d),
        WeaveMove::BigonInsertion(d) => insert_bigon(map, *d),
        WeaveMove::Patch(p) => apply_patch(map, p),
    }
}

/// The Lambda(g, k) family: theta seed, k triangle insertions, then g - k
/// bigon insertions, at canonical sites. Framed count polynomial is
/// (q-2)^k (q-1)^(g-k) and the weave genus is g.
pub fn build_lambda(g: i64, k: i64) -> Result<CombMap, MoveError> {
    if k < 0 || g < k {
        return Err(MoveError::BadLambda { g, k });
    }
    let mut map = CombMap::builtin("theta").expect("builtin theta");
    // first insertion at the smallest-id vertex; later ones at the
    // smallest-id vertex of the most recently created triangle
    let mut site: Dart = 0;
    for i in 0..k {
        let before = *map.darts().last().unwrap();
        map = insert_triangle(&map, site)?;
        let _ = i;
        // new triangle corner vertices contain the six fresh darts; the
        // smallest-id vertex among them starts at dart before+1
        site = smallest_new_triangle_vertex(&map, before);
    }
    for _ in 0..(g - k) {
        let site = smallest_bigon_site(&map).ok_or(MoveError::NoSite)?;
        map = insert_bigon(&map, site)?;
    }
    Ok(map)
}

fn smallest_new_triangle_vertex(map: &CombMap, old_max: Dart) -> Dart {
    // vertices created by the last triangle insertion contain darts > old_max;
    // pick the one with the smallest minimal dart
    map.vertices()
        .into_iter()
        .filter(|v| v.iter().any(|&d| d > old_max))
        .map(|v| *v.iter().min().unwrap())
        .min()
        .expect("triangle insertion creates vertices")
}

fn smallest_bigon_site(map: &CombMap) -> Option<Dart> {
    let face_of = map.face_of();
    map.edges()
        .into_iter()
        .find(|(a, b)| face_of[a] != face_of[b])
        .map(|(a, _)| a)
}

/// A patch that excises the star of the vertex at `site` and re-inserts it
/// unchanged (with fresh dart ids); apply_patch on it is the identity up to
/// isomorphism. Also the template for user-written patch files.
pub fn identity_patch(map: &CombMap, site: Dart) -> Result<Patch, MoveError> {
    if !map.darts().contains(&site) {
        return Err(MoveError::UnknownDart(site));
    }
    let mut star = vec![site];
    let mut cur = map.sigma(site);
    while cur != site {
        star.push(cur);
        cur = map.sigma(cur);
    }
    let base = map.darts().last().unwrap() + 1;
    let fresh: BTreeMap<Dart, Dart> = star
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, base + i as u32))
        .collect();
    Ok(Patch {
        remove: star.clone(),
        darts: fresh.values().copied().collect(),
        alpha: Vec::new(),
        sigma: vec![star.iter().map(|d| fresh[d]).collect()],
        matching: star.iter().map(|&d| (map.alpha(d), fresh[&d])).collect(),
    })
}

/// A patch equivalent to `insert_triangle` at the vertex of `site`, expressed
/// through the generic rewrite mechanism.
pub fn triangle_patch(map: &CombMap, site: Dart) -> Result<Patch, MoveError> {
    if !map.darts().contains(&site) {
        return Err(MoveError::UnknownDart(site));
    }
    let a = site;
    let b = map.sigma(a);
    let c = map.sigma(b);
    if map.sigma(c) != a || b == a || c == a {
        return Err(MoveError::SiteNotTrivalent(site, 0));
    }
    let base = map.darts().last().unwrap() + 1;
    let nd: Vec<Dart> = (base..base + 9).collect();
    // nd[0..3]: outward darts replacing a, b, c; nd[3..9]: triangle darts
    Ok(Patch {
        remove: vec![a, b, c],
        darts: nd.clone(),
        alpha: vec![(nd[3], nd[4]), (nd[5], nd[6]), (nd[7], nd[8])],
        sigma: vec![
            vec![nd[0], nd[3], nd[8]],
            vec![nd[1], nd[5], nd[4]],
            vec![nd[2], nd[7], nd[6]],
        ],
        matching: vec![
            (map.alpha(a), nd[0]),
            (map.alpha(b), nd[1]),
            (map.alpha(c), nd[2]),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::framed_count;
    use num_bigint::BigUint;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn triangle_on_theta_matches_tetra() {
        let theta = CombMap::builtin("theta").unwrap();
        let tetra = CombMap::builtin("tetra").unwrap();
        for site in [0u32, 3] {
            let m = insert_triangle(&theta, site).unwrap();
            let r = m.validate();
            assert_eq!((r.vertices, r.edges, r.faces), (4, 6, 4));
            assert_eq!(r.genus, 0);
            for q in [3u64, 5, 7] {
                assert_eq!(
                    framed_count(&m, q).unwrap(),
                    framed_count(&tetra, q).unwrap(),
                    "site {site} q {q}"
                );
            }
        }
    }

    #[test]
    fn triangle_on_tetra_squares_factor() {
        let tetra = CombMap::builtin("tetra").unwrap();
        let m = insert_triangle(&tetra, 0).unwrap();
        assert_eq!(framed_count(&m, 5).unwrap(), big(9));
    }

    #[test]
    fn bigon_on_theta() {
        let theta = CombMap::builtin("theta").unwrap();
        let m = insert_bigon(&theta, 0).unwrap();
        let r = m.validate();
        assert_eq!((r.vertices, r.edges, r.faces), (4, 6, 4));
        assert_eq!(r.genus, 0);
        assert_eq!(framed_count(&m, 5).unwrap(), big(4));
    }

    #[test]
    fn bigon_on_tetra_mixed_product() {
        let tetra = CombMap::builtin("tetra").unwrap();
        let m = insert_bigon(&tetra, 0).unwrap();
        assert_eq!(framed_count(&m, 4).unwrap(), big(2 * 3));
    }

    #[test]
    fn insertions_drop_weave_euler_char_by_two() {
        let theta = CombMap::builtin("theta").unwrap();
        let chi0 = theta.weave_euler_char().unwrap().chi;
        let t = insert_triangle(&theta, 0).unwrap();
        assert_eq!(t.weave_euler_char().unwrap().chi, chi0 - 2);
        let b = insert_bigon(&theta, 0).unwrap();
        assert_eq!(b.weave_euler_char().unwrap().chi, chi0 - 2);
    }

    #[test]
    fn bigon_rejects_loop_adjacency() {
        let m = CombMap::build(vec![0, 1], &[(0, 1)], &[vec![0], vec![1]]).unwrap();
        assert!(matches!(insert_bigon(&m, 0), Err(MoveError::LoopAdjacency(0))));
    }

    #[test]
    fn triangle_rejects_non_trivalent_site() {
        let bigon = CombMap::builtin("bigon").unwrap();
        assert!(matches!(
            insert_triangle(&bigon, 0),
            Err(MoveError::SiteNotTrivalent(0, 2))
        ));
    }

    #[test]
    fn identity_patch_is_isomorphism() {
        for name in ["theta", "tetra"] {
            let m = CombMap::builtin(name).unwrap();
            let p = identity_patch(&m, 0).unwrap();
            let out = apply_patch(&m, &p).unwrap();
            assert!(m.is_isomorphic(&out), "identity patch changed {name}");
        }
    }

    #[test]
    fn triangle_patch_matches_insert_triangle() {
        let theta = CombMap::builtin("theta").unwrap();
        let direct = insert_triangle(&theta, 0).unwrap();
        let patched = apply_patch(&theta, &triangle_patch(&theta, 0).unwrap()).unwrap();
        assert!(direct.is_isomorphic(&patched));
    }

    #[test]
    fn patch_arity_mismatch_is_error() {
        let theta = CombMap::builtin("theta").unwrap();
        let mut p = identity_patch(&theta, 0).unwrap();
        p.matching.pop();
        assert!(matches!(
            apply_patch(&theta, &p),
            Err(MoveError::BoundaryMismatch(_))
        ));
    }

    #[test]
    fn non_disk_excision_rejected() {
        // removing everything is the whole sphere, chi = 2
        let theta = CombMap::builtin("theta").unwrap();
        let p = Patch {
            remove: theta.darts().to_vec(),
            darts: vec![100, 101],
            alpha: vec![(100, 101)],
            sigma: vec![vec![100, 101]],
            matching: vec![],
        };
        assert!(matches!(
            apply_patch(&theta, &p),
            Err(MoveError::NonDiskExcision(_))
        ));
    }

    #[test]
    fn lambda_family_counts() {
        // framed counts (q-2)^k (q-1)^(g-k)
        let l11 = build_lambda(1, 1).unwrap();
        let table: Vec<u64> = [2u64, 3, 4, 5]
            .iter()
            .map(|&q| (&framed_count(&l11, q).unwrap()).try_into().unwrap())
            .collect();
        assert_eq!(table, vec![0, 1, 2, 3]);

        let l10 = build_lambda(1, 0).unwrap();
        assert_eq!(framed_count(&l10, 2).unwrap(), big(1));
        assert_eq!(framed_count(&l10, 3).unwrap(), big(2));

        let l21 = build_lambda(2, 1).unwrap();
        assert_eq!(framed_count(&l21, 5).unwrap(), big(12));
    }

    #[test]
    fn lambda_genus_and_validation() {
        for g in 0..=3 {
            for k in 0..=g {
                let m = build_lambda(g, k).unwrap();
                let we = m.weave_euler_char().unwrap();
                assert_eq!(we.genus, g, "g={g} k={k}");
                assert_eq!(m.validate().genus, 0, "base stays a sphere");
            }
        }
        assert!(build_lambda(1, 2).is_err());
        assert!(build_lambda(-1, 0).is_err());
    }

    #[test]
    fn predictions() {
        let t = predict(&WeaveMove::TriangleInsertion(0)).unwrap();
        assert_eq!(t.factor.eval_i64(5).to_string(), "3");
        assert_eq!(t.genus_delta, 1);
        let b = predict(&WeaveMove::BigonInsertion(0)).unwrap();
        assert_eq!(b.factor.eval_i64(5).to_string(), "4");
        let p = identity_patch(&CombMap::builtin("theta").unwrap(), 0).unwrap();
        assert!(predict(&WeaveMove::Patch(p)).is_none());
    }
}
