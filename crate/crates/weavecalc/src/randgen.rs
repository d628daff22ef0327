//! Seeded random instances for self-tests and property suites: planar
//! trivalent maps grown by local insertions, random graphs, random chain
//! complexes, and random split sheaf data.

use crate::cobordism::{Monodromy, SheafDatum};
use crate::homalg::{ChainComplex, ChainMap, Degree, Matrix};
use crate::surface_map::CombMap;
use crate::weave_moves::{insert_bigon, insert_triangle};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random planar trivalent map grown from the two-vertex seed graph by
/// triangle insertions at random vertices. Stays genus 0 and trivalent.
pub fn random_planar_map(rng: &mut ChaCha8Rng, max_faces: usize) -> CombMap {
    let mut map = CombMap::builtin("theta").expect("seed graph");
    // each insertion adds one face
    let extra = if max_faces > 3 {
        rng.gen_range(0..=(max_faces - 3))
    } else {
        0
    };
    for _ in 0..extra {
        let verts = map.vertices();
        let v = &verts[rng.gen_range(0..verts.len())];
        map = insert_triangle(&map, v[0]).expect("triangle at a trivalent vertex");
    }
    map
}

/// Random trivalent map of arbitrary genus: triangle and bigon insertions
/// mixed. Bigon insertion needs an edge with two distinct side faces, so it
/// is skipped when none exists.
pub fn random_weave_map(rng: &mut ChaCha8Rng, steps: usize) -> CombMap {
    let mut map = CombMap::builtin("theta").expect("seed graph");
    for _ in 0..steps {
        if rng.gen_bool(0.5) {
            let verts = map.vertices();
            let v = &verts[rng.gen_range(0..verts.len())];
            map = insert_triangle(&map, v[0]).expect("triangle at a trivalent vertex");
        } else {
            let face_of = map.face_of();
            let sites: Vec<_> = map
                .edges()
                .iter()
                .map(|&(d, _)| d)
                .filter(|&d| face_of[&d] != face_of[&map.alpha(d)])
                .collect();
            if sites.is_empty() {
                continue;
            }
            let d = sites[rng.gen_range(0..sites.len())];
            map = insert_bigon(&map, d).expect("bigon on a two-sided edge");
        }
    }
    map
}

/// Random simple graph edge list on n vertices.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
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

/// Random complex supported in [lo, hi]: a direct sum of single-degree
/// pieces and short exact two-term pieces. Every finite complex over a field
/// decomposes this way up to isomorphism, so nothing is lost.
pub fn random_complex(
    rng: &mut ChaCha8Rng,
    p: u64,
    lo: Degree,
    hi: Degree,
    max_dim: usize,
) -> ChainComplex {
    let mut acc = ChainComplex::zero(p);
    for n in lo..=hi {
        let dim = rng.gen_range(0..=max_dim);
        if dim > 0 {
            acc = acc.direct_sum(&ChainComplex::concentrated(p, n, dim));
        }
        if n < hi && rng.gen_bool(0.4) {
            let k = rng.gen_range(1..=2usize);
            let mut dims = BTreeMap::new();
            dims.insert(n, k);
            dims.insert(n + 1, k);
            let mut diffs = BTreeMap::new();
            diffs.insert(n, Matrix::identity(p, k));
            acc = acc.direct_sum(&ChainComplex::new(p, dims, diffs).expect("exact piece"));
        }
    }
    acc
}

/// Random split sheaf datum: B = A (+) C with r the inclusion and s the
/// projection (the only shape compatible with s o r = id when both are chain
/// maps), monodromy drawn to match a random handle index.
pub fn random_sheaf_datum(rng: &mut ChaCha8Rng, p: u64) -> SheafDatum {
    let a = random_complex(rng, p, -1, 2, 2);
    let c = random_complex(rng, p, -1, 2, 2);
    let b = a.direct_sum(&c);
    let degrees: std::collections::BTreeSet<Degree> = b.dims().keys().copied().collect();
    let mut rcomp = BTreeMap::new();
    let mut scomp = BTreeMap::new();
    for &n in &degrees {
        let (da, db) = (a.dim(n), b.dim(n));
        let mut rm = Matrix::zero(p, db, da);
        let mut sm = Matrix::zero(p, da, db);
        for i in 0..da {
            rm.set(i, i, 1);
            sm.set(i, i, 1);
        }
        rcomp.insert(n, rm);
        scomp.insert(n, sm);
    }
    let r = ChainMap::new(a.clone(), b.clone(), rcomp).expect("split inclusion");
    let s = ChainMap::new(b.clone(), a.clone(), scomp).expect("split projection");
    let k = rng.gen_range(1..=3u32);
    let monodromy = match k {
        1 => {
            let f = random_complex(rng, p, 0, 1, 2);
            let f_prime = if rng.gen_bool(0.5) {
                f.clone()
            } else {
                random_complex(rng, p, 0, 1, 2)
            };
            Monodromy::Spheres { f, f_prime }
        }
        2 => {
            let f = ChainComplex::concentrated(p, 0, rng.gen_range(1..=2));
            let rand_endo = |rng: &mut ChaCha8Rng| {
                let d = f.dim(0);
                let mut m = Matrix::zero(p, d, d);
                for i in 0..d {
                    for j in 0..d {
                        m.set(i, j, rng.gen_range(0..p));
                    }
                }
                ChainMap::new(f.clone(), f.clone(), [(0, m)].into()).expect("endomorphism")
            };
            Monodromy::Loop {
                f01: rand_endo(rng),
                f12: rand_endo(rng),
                f02: rand_endo(rng),
                h: None,
            }
        }
        _ => Monodromy::Pure {
            f: ChainComplex::concentrated(p, rng.gen_range(0..=1), rng.gen_range(1..=3)),
        },
    };
    SheafDatum::new(a, b, r, s, k, monodromy).expect("split datum is valid by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_maps_are_valid_genus_zero() {
        let mut rng = rng_from_seed(101);
        for _ in 0..20 {
            let m = random_planar_map(&mut rng, 12);
            let rep = m.validate();
            assert_eq!(rep.genus, 0);
            assert!(rep.non_trivalent.is_empty());
            assert!(rep.faces <= 12);
        }
    }

    #[test]
    fn weave_maps_are_valid_trivalent() {
        let mut rng = rng_from_seed(103);
        for _ in 0..20 {
            let m = random_weave_map(&mut rng, 6);
            let rep = m.validate();
            assert!(rep.non_trivalent.is_empty());
            assert_eq!(rep.components, 1);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let m1 = random_planar_map(&mut rng_from_seed(7), 10);
        let m2 = random_planar_map(&mut rng_from_seed(7), 10);
        assert_eq!(m1.to_text(), m2.to_text());
    }

    #[test]
    fn random_complexes_validate() {
        let mut rng = rng_from_seed(107);
        for _ in 0..30 {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let c = random_complex(&mut rng, p, -2, 3, 3);
            // round-trip through the constructor re-runs all invariants
            let rebuilt =
                ChainComplex::new(p, c.dims().clone(), {
                    let mut d = BTreeMap::new();
                    for &n in c.dims().keys() {
                        let m = c.diff(n);
                        if !m.is_zero() {
                            d.insert(n, m);
                        }
                    }
                    d
                })
                .unwrap();
            assert_eq!(rebuilt.homology_ranks(), c.homology_ranks());
        }
    }

    #[test]
    fn random_data_satisfy_split_ranks() {
        let mut rng = rng_from_seed(109);
        for _ in 0..40 {
            let p = [2u64, 3, 5][rng.gen_range(0..3)];
            let d = random_sheaf_datum(&mut rng, p);
            d.check_split_ranks().unwrap();
        }
    }
}
