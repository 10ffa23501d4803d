//! The subdiagram-sum maps and the invariant spaces they classify.
//!
//! `i_gpv` sends a Gauss diagram to the sum of its subdiagrams, all arrows
//! dashed; a dashed arrow in the input marks a semivirtual crossing and
//! survives into every term. The inverse is the alternating subdiagram
//! sum. Invariant functionals are exact orthogonal-complement bases of the
//! relation systems, evaluated on knots through the subdiagram pairing.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::diagram::{CanonicalKey, Diagram, Flavor, Skeleton, Style};
use crate::enumerate::{dashed_arrows, diagrams, solid_arrows, Count};
use crate::error::{Error, Result};
use crate::formal_sum::{rat, FormalSum, Rational};
use crate::gauss_code;
use crate::linalg::RelationSystem;
use crate::relations;

/// Subdiagram sum of a solid or mixed Gauss diagram: every subdiagram
/// containing all dashed arrows contributes its fully dashed copy.
pub fn i_gpv(d: &Diagram) -> FormalSum {
    assert!(d.directed(), "i_gpv expects an arrow diagram");
    let n = d.arc_count();
    let dashed_mask: u64 = d
        .arcs()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.style == Style::Dashed)
        .fold(0, |m, (i, _)| m | 1 << i);
    let mut out = FormalSum::zero(d.skeleton(), Flavor::ArrowSigned);
    for mask in 0u64..1 << n {
        if mask & dashed_mask != dashed_mask {
            continue;
        }
        out.add_diagram(&d.restrict(mask).with_style(Style::Dashed), rat(1));
    }
    out
}

/// Linear lift of [`i_gpv`] to sums of solid diagrams.
pub fn i_gpv_sum(s: &FormalSum) -> Result<FormalSum> {
    let mut out = FormalSum::zero(s.skeleton(), Flavor::ArrowSigned);
    for (key, coeff) in s.iter() {
        out = out.add(&i_gpv(&key.decode()).scale(coeff))?;
    }
    Ok(out)
}

/// The explicit inverse of the subdiagram sum: alternating sum over
/// subdiagrams, solid output.
pub fn i_gpv_inverse(s: &FormalSum) -> Result<FormalSum> {
    if !s.flavor().directed() {
        return Err(Error::UnsupportedFlavor("i_gpv_inverse expects arrow diagrams".into()));
    }
    let mut out = FormalSum::zero(s.skeleton(), Flavor::ArrowSigned);
    for (key, coeff) in s.iter() {
        let d = key.decode();
        let n = d.arc_count();
        for mask in 0u64..1 << n {
            let removed = n - (mask.count_ones() as usize);
            let sign = if removed % 2 == 0 { rat(1) } else { rat(-1) };
            out.add_diagram(&d.restrict(mask).with_style(Style::Solid), sign * coeff);
        }
    }
    Ok(out)
}

/// Chord-level subdiagram sum: the bar of [`i_gpv`]. Invariant under
/// reversing any arrow of the input.
pub fn i_chord(d: &Diagram) -> FormalSum {
    i_gpv(d).bar()
}

/// All constraints `D - reverse_arrow(D, k)` over canonical dashed diagrams
/// with 1..=n arrows, nonzero ones only, deduplicated after normalization.
pub fn flip_constraints(n: usize, skeleton: Skeleton, ceiling: usize) -> Result<Vec<FormalSum>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for key in dashed_arrows(skeleton, Count::UpTo(n), ceiling)? {
        let d = key.decode();
        for k in 0..d.arc_count() {
            let flipped = d.reverse_arrow(k)?;
            let row = FormalSum::generator(&d).sub(&FormalSum::generator(&flipped))?;
            if row.is_zero() {
                continue;
            }
            let norm = row.normalized();
            let fingerprint: Vec<(CanonicalKey, Rational)> =
                norm.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
            if seen.insert(fingerprint) {
                out.push(norm);
            }
        }
    }
    Ok(out)
}

/// Which relation system cuts out the invariant space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    #[serde(rename = "gpv")]
    Gpv,
    #[serde(rename = "gpv+virtualization")]
    GpvVirtualization,
    #[serde(rename = "chord")]
    Chord,
}

impl std::fmt::Display for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Profile::Gpv => write!(f, "gpv"),
            Profile::GpvVirtualization => write!(f, "gpv+virtualization"),
            Profile::Chord => write!(f, "chord"),
        }
    }
}

/// A rational functional on diagrams with at most `order` arcs, exactly
/// orthogonal to its defining relation system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFunctional {
    pub order: usize,
    pub skeleton: Skeleton,
    pub profile: Profile,
    pub entries: FormalSum,
}

impl InvariantFunctional {
    /// The constant invariant is the indicator of the empty diagram.
    pub fn is_constant(&self) -> bool {
        self.entries.len() == 1
            && self.entries.iter().next().map(|(k, _)| k.arc_count() == 0).unwrap_or(false)
    }
}

/// The relation system for a profile at the given order.
pub fn relation_system(
    order: usize,
    skeleton: Skeleton,
    profile: Profile,
    ceiling: usize,
) -> Result<RelationSystem> {
    match profile {
        Profile::Gpv => relations::generate_polyak(order, skeleton, ceiling),
        Profile::GpvVirtualization => {
            let mut sys = relations::generate_polyak(order, skeleton, ceiling)?;
            for (i, row) in flip_constraints(order, skeleton, ceiling)?.into_iter().enumerate() {
                let mut prov = crate::linalg::Provenance::new("flip");
                prov.detail = format!("flip constraint {i}");
                sys.push(&row, prov)?;
            }
            sys.dedup();
            Ok(sys)
        }
        Profile::Chord => relations::generate_chord_relations(order, skeleton, ceiling),
    }
}

/// Basis of the exact dual of the quotient by the profile's relations:
/// rational functionals orthogonal to every relation row, normalized and
/// deterministically ordered.
pub fn invariant_space(
    order: usize,
    skeleton: Skeleton,
    profile: Profile,
    ceiling: usize,
) -> Result<Vec<InvariantFunctional>> {
    let sys = relation_system(order, skeleton, profile, ceiling)?;
    Ok(space_from_system(&sys, order, skeleton, profile))
}

/// Extracts the invariant functionals from an already-built relation
/// system (possibly loaded from cache).
pub fn space_from_system(
    sys: &RelationSystem,
    order: usize,
    skeleton: Skeleton,
    profile: Profile,
) -> Vec<InvariantFunctional> {
    let flavor = match profile {
        Profile::Chord => Flavor::ChordSigned,
        _ => Flavor::ArrowSigned,
    };
    sys.orthogonal_complement()
        .into_iter()
        .map(|row| InvariantFunctional {
            order,
            skeleton,
            profile,
            entries: sys.sum_from_row(&row, flavor),
        })
        .collect()
}

/// Evaluates a functional on a knot via the subdiagram pairing: the sum of
/// the functional's values over all dashed subdiagrams of the knot's Gauss
/// diagram (terms beyond the order contribute nothing).
pub fn evaluate(f: &InvariantFunctional, knot: &Diagram) -> Result<Rational> {
    if knot.skeleton() != f.skeleton {
        return Err(Error::SkeletonMismatch {
            expected: f.skeleton.to_string(),
            got: knot.skeleton().to_string(),
        });
    }
    if !knot.directed() || !knot.all_solid() {
        return Err(Error::UnsupportedFlavor("evaluation expects a solid Gauss diagram".into()));
    }
    let n = knot.arc_count();
    let mut total = Rational::zero();
    for mask in 0u64..1 << n {
        if (mask.count_ones() as usize) > f.order {
            continue;
        }
        let sub = knot.restrict(mask).with_style(Style::Dashed);
        total += f.entries.coeff(&sub.canonical_key());
    }
    Ok(total)
}

/// A virtualization witness: two knots one arrow flip apart on which the
/// functional takes different values.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct WitnessPair {
    pub knot: String,
    pub knot_flipped: String,
    pub flipped_label: u64,
    pub value: String,
    pub value_flipped: String,
}

/// Deterministic search for a witness pair: solid diagrams by arrow count,
/// then canonical key, then flipped-arrow index. Returns the first pair on
/// which `f` distinguishes a diagram from a one-arrow flip of it.
pub fn find_witness(
    f: &InvariantFunctional,
    max_crossings: usize,
    ceiling: usize,
) -> Result<Option<WitnessPair>> {
    for m in 1..=max_crossings {
        for key in solid_arrows(f.skeleton, Count::Exactly(m), ceiling)? {
            let d = key.decode();
            let base = evaluate(f, &d)?;
            for k in 0..d.arc_count() {
                let flipped = d.reverse_arrow(k)?;
                let v2 = evaluate(f, &flipped)?;
                if v2 != base {
                    let (code, labels) = gauss_code::emit_with_labels(&d)?;
                    let (code2, _) = gauss_code::emit_with_labels(&flipped)?;
                    return Ok(Some(WitnessPair {
                        knot: code,
                        knot_flipped: code2,
                        flipped_label: labels[k],
                        value: crate::json::rational_to_string(&base),
                        value_flipped: crate::json::rational_to_string(&v2),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Ambient keys used by a profile at an order (dashed signed arrows, or
/// signed chords for the chord profile).
pub fn ambient(order: usize, skeleton: Skeleton, profile: Profile, ceiling: usize) -> Result<Vec<CanonicalKey>> {
    match profile {
        Profile::Chord => diagrams(skeleton, Flavor::ChordSigned, Style::Solid, Count::UpTo(order), ceiling),
        _ => dashed_arrows(skeleton, Count::UpTo(order), ceiling),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Arc, Sign};
    use crate::gauss_code::parse;

    fn dashed(skel: Skeleton, arrows: &[(usize, usize, Sign)]) -> Diagram {
        Diagram::new(
            skel,
            true,
            arrows.iter().map(|&(t, h, s)| Arc::arrow(t, h, s, Style::Dashed)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn i_gpv_of_empty_is_empty() {
        let empty = Diagram::empty(Skeleton::Circle, true);
        let s = i_gpv(&empty);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&empty.canonical_key()), rat(1));
    }

    #[test]
    fn i_gpv_of_single_solid_arrow() {
        let d = parse("O1+,U1+").unwrap();
        let s = i_gpv(&d);
        assert_eq!(s.len(), 2);
        let empty = Diagram::empty(Skeleton::Circle, true);
        assert_eq!(s.coeff(&empty.canonical_key()), rat(1));
        assert_eq!(s.coeff(&d.with_style(Style::Dashed).canonical_key()), rat(1));
    }

    #[test]
    fn i_gpv_keeps_dashed_arrows_in_every_term() {
        // one dashed arrow: the semivirtual diagram maps to itself only
        let d = dashed(Skeleton::Circle, &[(0, 1, Sign::Plus)]);
        let s = i_gpv(&d);
        assert_eq!(s.len(), 1);
        assert_eq!(s.coeff(&d.canonical_key()), rat(1));

        // mixed: dashed arrow survives, solid arrow optional
        let mixed = Diagram::new(
            Skeleton::Line,
            true,
            vec![
                Arc::arrow(0, 2, Sign::Plus, Style::Dashed),
                Arc::arrow(1, 3, Sign::Minus, Style::Solid),
            ],
        )
        .unwrap();
        let s = i_gpv(&mixed);
        assert_eq!(s.len(), 2);
        for (k, _) in s.iter() {
            assert!(k.arc_count() >= 1);
        }
    }

    #[test]
    fn inverse_of_single_dashed_arrow() {
        let d = dashed(Skeleton::Circle, &[(0, 1, Sign::Plus)]);
        let inv = i_gpv_inverse(&FormalSum::generator(&d)).unwrap();
        // solid(a) - empty
        assert_eq!(inv.len(), 2);
        assert_eq!(inv.coeff(&d.with_style(Style::Solid).canonical_key()), rat(1));
        assert_eq!(inv.coeff(&Diagram::empty(Skeleton::Circle, true).canonical_key()), rat(-1));
        // and applying i_gpv recovers the dashed generator
        let round = i_gpv_sum(&inv).unwrap();
        assert_eq!(round, FormalSum::generator(&d));
    }

    #[test]
    fn round_trip_on_all_diagrams_up_to_three_arrows() {
        for skel in [Skeleton::Circle, Skeleton::Line] {
            for key in dashed_arrows(skel, Count::UpTo(3), 6).unwrap() {
                let gen = FormalSum::generator(&key.decode());
                let round = i_gpv_sum(&i_gpv_inverse(&gen).unwrap()).unwrap();
                assert_eq!(round, gen, "key {key}");
            }
        }
    }

    #[test]
    fn inverse_composes_the_other_way_too() {
        let d = parse("O1+,U2-,O2-,U1+").unwrap();
        let sum = FormalSum::generator(&d);
        let back = i_gpv_inverse(&i_gpv(&d)).unwrap();
        assert_eq!(back, sum);
    }

    #[test]
    fn i_chord_is_flip_invariant() {
        let d = parse("O1+,U2+,O3-,U1+,O2+,U3-").unwrap();
        let base = i_chord(&d);
        assert_eq!(base.len() as u64 <= 8, true);
        for k in 0..3 {
            assert_eq!(i_chord(&d.reverse_arrow(k).unwrap()), base);
        }
    }

    #[test]
    fn flip_constraints_small_cases() {
        // circle: the two orientations of one arrow are rotation equivalent
        let c = flip_constraints(1, Skeleton::Circle, 6).unwrap();
        assert!(c.is_empty());
        // line: one nonzero constraint per sign
        let l = flip_constraints(1, Skeleton::Line, 6).unwrap();
        assert_eq!(l.len(), 2);
        for row in &l {
            assert_eq!(row.len(), 2);
        }
    }
}
