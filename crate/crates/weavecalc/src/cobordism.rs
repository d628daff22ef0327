//! Local handle-attachment engine on sheaf data: an outside stalk A, an
//! inside stalk B, a split transition r: A -> B with retraction s, and the
//! wall complex F measuring the transition. Extending the datum across a
//! k-handle is a concrete linear-algebra problem over F_p, solved here.

use crate::homalg::{
    cone, solve_homotopy, check_homotopy, ChainComplex, ChainMap, Degree, HomalgError, Homotopy,
    Matrix,
};
use crate::poly::IntPolynomial;
use num_bigint::BigUint;
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CobordismError {
    #[error(transparent)]
    Homalg(#[from] HomalgError),
    #[error("handle index {0} out of range (need k >= 1)")]
    BadIndex(u32),
    #[error("monodromy data does not match handle index {0}")]
    MonodromyMismatch(u32),
    #[error("retraction is not split: s o r != identity at degree {0}")]
    NotSplit(Degree),
    #[error("wall complex ranks inconsistent with the stalk splitting at degree {0}")]
    SplitRanks(Degree),
    #[error("gluing map is not invertible at degree {0}")]
    NotInvertible(Degree),
    #[error("gluing homotopy does not satisfy the transition equation")]
    BadHomotopy,
    #[error("extension check for k >= 3 needs the wall complex concentrated in one degree")]
    NotPure,
    #[error("datum does not extend: {0}")]
    NotExtendable(String),
    #[error("gluing data missing for handle index {0}")]
    MissingGluing(u32),
}

/// Attaching-sphere data per handle index: two wall complexes for k = 1
/// (components of S^0), a triangle of endomorphisms of one wall complex for
/// k = 2 (edges of the triangulated circle), nothing beyond the wall complex
/// for k >= 3.
#[derive(Clone, Debug)]
pub enum Monodromy {
    Spheres {
        f: ChainComplex,
        f_prime: ChainComplex,
    },
    Loop {
        f01: ChainMap,
        f12: ChainMap,
        f02: ChainMap,
        h: Option<Homotopy>,
    },
    Pure {
        f: ChainComplex,
    },
}

#[derive(Clone, Debug)]
pub struct SheafDatum {
    pub a: ChainComplex,
    pub b: ChainComplex,
    pub r: ChainMap,
    pub s: ChainMap,
    pub attach_k: u32,
    pub monodromy: Monodromy,
}

impl SheafDatum {
    pub fn new(
        a: ChainComplex,
        b: ChainComplex,
        r: ChainMap,
        s: ChainMap,
        attach_k: u32,
        monodromy: Monodromy,
    ) -> Result<SheafDatum, CobordismError> {
        if attach_k == 0 {
            return Err(CobordismError::BadIndex(attach_k));
        }
        let ok = match (&monodromy, attach_k) {
            (Monodromy::Spheres { .. }, 1) => true,
            (Monodromy::Loop { .. }, 2) => true,
            (Monodromy::Pure { .. }, k) => k >= 3,
            _ => false,
        };
        if !ok {
            return Err(CobordismError::MonodromyMismatch(attach_k));
        }
        let d = SheafDatum {
            a,
            b,
            r,
            s,
            attach_k,
            monodromy,
        };
        d.check_split()?;
        Ok(d)
    }

    pub fn p(&self) -> u64 {
        self.a.p()
    }

    /// s o r = id on A, degreewise.
    fn check_split(&self) -> Result<(), CobordismError> {
        let comp = self.s.compose(&self.r)?;
        for &n in self.a.dims().keys() {
            if comp.component(n) != Matrix::identity(self.p(), self.a.dim(n)) {
                return Err(CobordismError::NotSplit(n));
            }
        }
        Ok(())
    }

    /// Wall complex F: total complex of r with the grading pinned so that
    /// piece n is A^(n+1) (+) B^n. With this shift the splitting gives
    /// rk H^n(B) = rk H^n(A) + rk H^n(F) in every degree.
    pub fn microstalk(&self) -> ChainComplex {
        cone(&self.r).shift(1)
    }

    /// The rank identity that the split transition forces. Exposed so callers
    /// can assert it; `new` does not recompute homology on every build.
    pub fn check_split_ranks(&self) -> Result<(), CobordismError> {
        let ha = self.a.homology_ranks();
        let hb = self.b.homology_ranks();
        let hf = self.microstalk().homology_ranks();
        let degrees: std::collections::BTreeSet<Degree> = ha
            .keys()
            .chain(hb.keys())
            .chain(hf.keys())
            .copied()
            .collect();
        for n in degrees {
            let lhs = hb.get(&n).copied().unwrap_or(0);
            let rhs = ha.get(&n).copied().unwrap_or(0) + hf.get(&n).copied().unwrap_or(0);
            if lhs != rhs {
                return Err(CobordismError::SplitRanks(n));
            }
        }
        Ok(())
    }
}

/// Why a datum does or does not extend across its handle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendReport {
    pub extends: bool,
    pub reason: String,
}

/// How strictly the k = 2 loop condition is tested: at the chain level the
/// trivializing homotopy must exist as honest data; the weaker mode only
/// compares induced maps on homology.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LoopMode {
    #[default]
    Strict,
    HomologyOnly,
}

pub fn can_extend(d: &SheafDatum) -> Result<ExtendReport, CobordismError> {
    can_extend_mode(d, LoopMode::Strict)
}

pub fn can_extend_mode(d: &SheafDatum, mode: LoopMode) -> Result<ExtendReport, CobordismError> {
    match &d.monodromy {
        Monodromy::Spheres { f, f_prime } => {
            let hf = f.homology_ranks();
            let hg = f_prime.homology_ranks();
            if hf == hg {
                Ok(ExtendReport {
                    extends: true,
                    reason: "wall complexes on both sphere components have equal homology ranks"
                        .into(),
                })
            } else {
                Ok(ExtendReport {
                    extends: false,
                    reason: format!(
                        "wall homology ranks differ: {:?} vs {:?}",
                        hf, hg
                    ),
                })
            }
        }
        Monodromy::Loop { f01, f12, f02, .. } => {
            let fcx = f02.source().clone();
            let rhs = f02.sub(&f12.compose(f01)?);
            match mode {
                LoopMode::Strict => {
                    if solve_homotopy(&fcx, &rhs).is_some() {
                        Ok(ExtendReport {
                            extends: true,
                            reason: "loop monodromy trivialized: homotopy equation solvable"
                                .into(),
                        })
                    } else {
                        Ok(ExtendReport {
                            extends: false,
                            reason: "homotopy equation H d - d H = f02 - f12 f01 has no solution"
                                .into(),
                        })
                    }
                }
                LoopMode::HomologyOnly => {
                    let comp = f12.compose(f01)?;
                    if f02.induces_same_on_homology(&comp) {
                        Ok(ExtendReport {
                            extends: true,
                            reason: "monodromy trivial on homology (weak mode)".into(),
                        })
                    } else {
                        Ok(ExtendReport {
                            extends: false,
                            reason: "monodromy nontrivial already on homology".into(),
                        })
                    }
                }
            }
        }
        Monodromy::Pure { f } => {
            let supported: Vec<Degree> = f
                .dims()
                .keys()
                .copied()
                .collect();
            if supported.len() <= 1 {
                Ok(ExtendReport {
                    extends: true,
                    reason: "wall complex concentrated in one degree extends uniquely".into(),
                })
            } else {
                Err(CobordismError::NotPure)
            }
        }
    }
}

/// Gluing choice for a handle: an invertible degreewise automorphism of the
/// wall complex for k = 1, a trivializing homotopy for k = 2, nothing for
/// k >= 3.
#[derive(Clone, Debug)]
pub enum Gluing {
    WallAutomorphism(ChainMap),
    TrivializingHomotopy(Homotopy),
    Unique,
}

#[derive(Clone, Debug)]
pub struct AttachResult {
    pub datum_plus: SheafDatum,
    pub gluing: Gluing,
    /// Transition across the handle as a block map on A (+) F: identity on
    /// the A block, the chosen automorphism on the wall block.
    pub transition: ChainMap,
}

pub fn attach_handle(d: &SheafDatum, choice: Gluing) -> Result<AttachResult, CobordismError> {
    let report = can_extend(d)?;
    if !report.extends {
        return Err(CobordismError::NotExtendable(report.reason));
    }
    match (&d.monodromy, &choice) {
        (Monodromy::Spheres { f, .. }, Gluing::WallAutomorphism(ff)) => {
            if ff.source().dims() != f.dims() || ff.target().dims() != f.dims() {
                return Err(CobordismError::Homalg(HomalgError::Shape(
                    "wall automorphism must be an endomorphism of the wall complex".into(),
                )));
            }
            for &n in f.dims().keys() {
                if !ff.component(n).is_invertible() {
                    return Err(CobordismError::NotInvertible(n));
                }
            }
            let transition = block_transition(&d.a, ff)?;
            Ok(AttachResult {
                datum_plus: d.clone(),
                gluing: choice,
                transition,
            })
        }
        (Monodromy::Loop { f01, f12, f02, .. }, Gluing::TrivializingHomotopy(h)) => {
            if !check_homotopy(h, f02, f12, f01)? {
                return Err(CobordismError::BadHomotopy);
            }
            let f = f02.source();
            let transition = block_transition(&d.a, &ChainMap::identity(f))?;
            Ok(AttachResult {
                datum_plus: d.clone(),
                gluing: choice,
                transition,
            })
        }
        (Monodromy::Pure { f }, Gluing::Unique) => {
            let transition = block_transition(&d.a, &ChainMap::identity(f))?;
            Ok(AttachResult {
                datum_plus: d.clone(),
                gluing: choice,
                transition,
            })
        }
        _ => Err(CobordismError::MissingGluing(d.attach_k)),
    }
}

/// (id_A, f_F) on the split model A (+) F.
fn block_transition(a: &ChainComplex, ff: &ChainMap) -> Result<ChainMap, CobordismError> {
    let model = a.direct_sum(ff.source());
    let degrees: std::collections::BTreeSet<Degree> = model.dims().keys().copied().collect();
    let mut components = BTreeMap::new();
    for &n in &degrees {
        let id_a = Matrix::identity(a.p(), a.dim(n));
        let m = id_a.direct_sum(&ff.component(n));
        components.insert(n, m);
    }
    Ok(ChainMap::new(model.clone(), model, components)?)
}

/// All invertible r x r matrices over F_p, by exhaustive enumeration. Small
/// cases only; used to count gluing choices for a wall complex of rank r
/// concentrated in one degree.
pub fn enumerate_invertible(p: u64, r: usize) -> Vec<Matrix> {
    let entries = r * r;
    let total = (p as u128).pow(entries as u32);
    assert!(total <= 1 << 24, "enumeration domain too large");
    let mut out = Vec::new();
    for idx in 0..total {
        let mut m = Matrix::zero(p, r, r);
        let mut rest = idx;
        for e in 0..entries {
            m.set(e / r, e % r, (rest % p as u128) as u64);
            rest /= p as u128;
        }
        if m.is_invertible() {
            out.push(m);
        }
    }
    out
}

/// |GL_r(F_q)| = prod_{i<r} (q^r - q^i).
pub fn gl_order(q: u64, r: usize) -> BigUint {
    let q = BigUint::from(q);
    let qr = q.pow(r as u32);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= &qr - q.pow(i as u32);
    }
    acc
}

/// Same product as a polynomial in q.
pub fn gl_poly(r: usize) -> IntPolynomial {
    let t = IntPolynomial::t();
    let tr = t.pow(r as u32);
    let mut acc = IntPolynomial::one();
    for i in 0..r {
        acc = &acc * &(&tr - &t.pow(i as u32));
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HandleDescriptor {
    pub k: u32,
    /// For k = 1: does the handle join one component to itself?
    pub same_component: bool,
    pub rank: usize,
}

/// Multiplicative factor the handle contributes to the count of simple
/// sheaves, as a polynomial in q.
pub fn moduli_factor(h: &HandleDescriptor) -> Result<IntPolynomial, CobordismError> {
    if h.k == 0 {
        return Err(CobordismError::BadIndex(h.k));
    }
    if h.k == 1 && h.same_component {
        return Ok(if h.rank == 1 {
            IntPolynomial::t_plus(-1) // q - 1
        } else {
            gl_poly(h.rank)
        });
    }
    // k = 1 joining two components, k = 2 with trivialized loop, k >= 3
    Ok(IntPolynomial::one())
}
