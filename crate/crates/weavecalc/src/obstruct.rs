//! Count-based decision procedures: filling obstructions from vanishing
//! framed counts, cobordism obstructions from count comparisons, and the
//! Euler-characteristic bookkeeping of the long exact sequences.

use crate::coloring::{framed_count, ColoringError};
use crate::surface_map::CombMap;
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ObstructError {
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("probe value q = {0} too small (need q >= 2)")]
    BadProbe(u64),
}

/// Hypotheses under which the count comparison has obstruction force. They
/// are caller-supplied flags: whether a hypothetical cobordism is Maslov-0
/// and restricts surjectively on first cohomology is not visible in the
/// combinatorial input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CobordismHypothesis {
    pub maslov_zero: bool,
    pub h1_surjective: bool,
    /// No concave end at all: the filling case.
    pub filling: bool,
}

impl CobordismHypothesis {
    pub fn filling() -> CobordismHypothesis {
        CobordismHypothesis {
            maslov_zero: true,
            h1_surjective: true,
            filling: true,
        }
    }

    pub fn cobordism() -> CobordismHypothesis {
        CobordismHypothesis {
            maslov_zero: true,
            h1_surjective: true,
            filling: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Obstructed {
        q: u64,
        count_minus: BigUint,
        count_plus: BigUint,
        rule: String,
    },
    Consistent {
        rule: String,
    },
    /// The comparison was not run because the hypotheses it needs are absent.
    Inconclusive {
        rule: String,
    },
}

impl Verdict {
    pub fn is_obstructed(&self) -> bool {
        matches!(self, Verdict::Obstructed { .. })
    }

    pub fn rule(&self) -> &str {
        match self {
            Verdict::Obstructed { rule, .. }
            | Verdict::Consistent { rule }
            | Verdict::Inconclusive { rule } => rule,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Obstructed {
                q,
                count_minus,
                count_plus,
                rule,
            } => write!(
                f,
                "obstructed at q = {q}: counts {count_minus} vs {count_plus} ({rule})"
            ),
            Verdict::Consistent { rule } => write!(f, "consistent ({rule})"),
            Verdict::Inconclusive { rule } => write!(f, "inconclusive ({rule})"),
        }
    }
}

const RULE_FILLING: &str =
    "a filling would quantize to a simple sheaf over every coefficient field, \
     so a vanishing framed count at any q rules it out";
const RULE_COBORDISM: &str =
    "a Maslov-0 cobordism with surjective restriction on H^1 embeds the \
     concave-end moduli into the convex-end moduli, so counts cannot drop";
const RULE_HYPOTHESIS: &str =
    "count comparison needs the Maslov-0 and H^1-surjectivity hypotheses";

/// A filling is obstructed as soon as the framed count vanishes at some
/// probe q.
pub fn check_filling(map: &CombMap, qs: &[u64]) -> Result<Verdict, ObstructError> {
    for &q in qs {
        if q < 2 {
            return Err(ObstructError::BadProbe(q));
        }
        let c = framed_count(map, q)?;
        if c == BigUint::from(0u32) {
            return Ok(Verdict::Obstructed {
                q,
                count_minus: BigUint::from(0u32),
                count_plus: BigUint::from(0u32),
                rule: RULE_FILLING.to_string(),
            });
        }
    }
    Ok(Verdict::Consistent {
        rule: RULE_FILLING.to_string(),
    })
}

/// Compare framed counts of the two ends: under the stated hypotheses the
/// concave-end count can never exceed the convex-end count, so a strict drop
/// is an obstruction. "Consistent" never claims a cobordism exists.
pub fn check_cobordism(
    minus: &CombMap,
    plus: &CombMap,
    hyp: &CobordismHypothesis,
    qs: &[u64],
) -> Result<Verdict, ObstructError> {
    if !hyp.filling && !(hyp.maslov_zero && hyp.h1_surjective) {
        return Ok(Verdict::Inconclusive {
            rule: RULE_HYPOTHESIS.to_string(),
        });
    }
    for &q in qs {
        if q < 2 {
            return Err(ObstructError::BadProbe(q));
        }
        let cm = framed_count(minus, q)?;
        let cp = framed_count(plus, q)?;
        if cm > cp {
            return Ok(Verdict::Obstructed {
                q,
                count_minus: cm,
                count_plus: cp,
                rule: RULE_COBORDISM.to_string(),
            });
        }
    }
    Ok(Verdict::Consistent {
        rule: RULE_COBORDISM.to_string(),
    })
}

/// chi of the convex end from the long exact sequence of the pair: the
/// relative term contributes rF*rG*(chi(L) - chi(concave end)).
pub fn les_chi(chi_l: i64, chi_lminus: i64, rf: i64, rg: i64, chi_minus: i64) -> i64 {
    chi_minus + rf * rg * (chi_l - chi_lminus)
}

/// Same identity written as the Mayer-Vietoris splitting; kept as a separate
/// entry point so both forms can be cross-checked.
pub fn les_chi_mv(chi_l: i64, chi_lminus: i64, rf: i64, rg: i64, chi_minus: i64) -> i64 {
    chi_minus + rf * rg * chi_l - rf * rg * chi_lminus
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CapReport {
    /// The degree-0 bookkeeping forces the identity of a nonzero object to
    /// vanish: no cap exists.
    Obstructed { reason: String },
    /// Zero object: nothing to contradict.
    Vacuous,
    /// The H^0 agreement hypothesis was not supplied.
    Inconclusive,
}

/// Degree-0 bookkeeping for capping off a connected end inside a flexible
/// ambient: global sections of the endomorphism sheaf vanish, but with
/// trivial monodromy the end contributes a 1-dimensional H^0 containing the
/// identity, a contradiction whenever the object is nonzero.
pub fn cap_contradiction(chi_lminus: i64, rf: i64, h0_agree: bool) -> CapReport {
    let _ = chi_lminus; // recorded in the report only through the reason text
    if rf == 0 {
        return CapReport::Vacuous;
    }
    if !h0_agree {
        return CapReport::Inconclusive;
    }
    CapReport::Obstructed {
        reason: format!(
            "rank {rf} endomorphisms have id in H^0, but global sections vanish: id = 0"
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface_map::CombMap;
    use crate::weave_moves::build_lambda;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn torus_with_clifford_summand_has_no_filling() {
        let l11 = build_lambda(1, 1).unwrap();
        let v = check_filling(&l11, &[2]).unwrap();
        match v {
            Verdict::Obstructed { q, .. } => assert_eq!(q, 2),
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn unknotted_torus_fillable_counts_positive() {
        let l10 = build_lambda(1, 0).unwrap();
        let v = check_filling(&l10, &[2, 3, 4]).unwrap();
        assert!(!v.is_obstructed());
        // counts 1, 2, 3 at q = 2, 3, 4
        for (q, expect) in [(2u64, 1u32), (3, 2), (4, 3)] {
            assert_eq!(framed_count(&l10, q).unwrap(), BigUint::from(expect));
        }
    }

    #[test]
    fn sphere_always_consistent() {
        let theta = CombMap::builtin("theta").unwrap();
        let v = check_filling(&theta, &[2, 3, 4, 5, 6, 7, 8, 9]).unwrap();
        assert!(!v.is_obstructed());
    }

    #[test]
    fn count_drop_obstructs_cobordism() {
        let minus = build_lambda(2, 1).unwrap();
        let plus = build_lambda(2, 2).unwrap();
        let v = check_cobordism(&minus, &plus, &CobordismHypothesis::cobordism(), &[5]).unwrap();
        match v {
            Verdict::Obstructed {
                q,
                count_minus,
                count_plus,
                ..
            } => {
                assert_eq!(q, 5);
                assert_eq!(count_minus, BigUint::from(12u32));
                assert_eq!(count_plus, BigUint::from(9u32));
            }
            other => panic!("expected obstruction, got {other:?}"),
        }
    }

    #[test]
    fn equal_and_growing_counts_consistent() {
        let l11 = build_lambda(1, 1).unwrap();
        let v = check_cobordism(&l11, &l11, &CobordismHypothesis::cobordism(), &[2, 3, 5]).unwrap();
        assert!(!v.is_obstructed());
        let l21 = build_lambda(2, 1).unwrap();
        let v = check_cobordism(&l11, &l21, &CobordismHypothesis::cobordism(), &[3, 5, 7]).unwrap();
        assert!(!v.is_obstructed());
    }

    #[test]
    fn missing_hypotheses_inconclusive() {
        let l11 = build_lambda(1, 1).unwrap();
        let l22 = build_lambda(2, 2).unwrap();
        let hyp = CobordismHypothesis {
            maslov_zero: true,
            h1_surjective: false,
            filling: false,
        };
        let v = check_cobordism(&l22, &l11, &hyp, &[5]).unwrap();
        assert!(matches!(v, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn obstruction_antisymmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let hyp = CobordismHypothesis::cobordism();
        for _ in 0..20 {
            let g = rng.gen_range(1..=3i64);
            let k1 = rng.gen_range(0..=g);
            let k2 = rng.gen_range(0..=g);
            let a = build_lambda(g, k1).unwrap();
            let b = build_lambda(g, k2).unwrap();
            let q = [3u64, 5, 7][rng.gen_range(0..3)];
            let ab = check_cobordism(&a, &b, &hyp, &[q]).unwrap();
            let ba = check_cobordism(&b, &a, &hyp, &[q]).unwrap();
            if ab.is_obstructed() {
                assert!(!ba.is_obstructed());
            }
        }
    }

    #[test]
    fn filling_monotone_in_probe_set() {
        let l21 = build_lambda(2, 1).unwrap();
        assert!(check_filling(&l21, &[2]).unwrap().is_obstructed());
        assert!(check_filling(&l21, &[3, 5, 2, 7]).unwrap().is_obstructed());
    }

    #[test]
    fn chi_filling_case() {
        // no concave end, rank 1: chi of the convex end is chi of the filling
        for chi_l in [-4i64, -2, 0, 1, 2] {
            assert_eq!(les_chi(chi_l, 0, 1, 1, 0), chi_l);
        }
    }

    #[test]
    fn chi_concordance_case() {
        for chi in [-3i64, 0, 5] {
            for chi_minus in [-2i64, 0, 7] {
                assert_eq!(les_chi(chi, chi, 1, 1, chi_minus), chi_minus);
            }
        }
    }

    #[test]
    fn chi_genus_two_from_torus() {
        assert_eq!(les_chi(-2, 0, 1, 1, 0), -2);
    }

    #[test]
    fn chi_forms_agree_and_are_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let chi_l = rng.gen_range(-10..=10i64);
            let chi_lm = rng.gen_range(-10..=10i64);
            let rf = rng.gen_range(0..=4i64);
            let rg = rng.gen_range(0..=4i64);
            let chi_m = rng.gen_range(-10..=10i64);
            assert_eq!(
                les_chi(chi_l, chi_lm, rf, rg, chi_m),
                les_chi_mv(chi_l, chi_lm, rf, rg, chi_m)
            );
            // linearity in chi_l
            assert_eq!(
                les_chi(chi_l + 1, chi_lm, rf, rg, chi_m) - les_chi(chi_l, chi_lm, rf, rg, chi_m),
                rf * rg
            );
            // multiplicativity in the rank product
            assert_eq!(
                les_chi(chi_l, chi_lm, 2 * rf, rg, chi_m) - chi_m,
                2 * (les_chi(chi_l, chi_lm, rf, rg, chi_m) - chi_m)
            );
        }
    }

    #[test]
    fn cap_reports() {
        assert!(matches!(
            cap_contradiction(0, 1, true),
            CapReport::Obstructed { .. }
        ));
        assert_eq!(cap_contradiction(0, 0, true), CapReport::Vacuous);
        assert_eq!(cap_contradiction(0, 1, false), CapReport::Inconclusive);
    }
}
