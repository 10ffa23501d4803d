//! Generation of the relation families over diagram ambients.
//!
//! The signed arrow relations are generated normatively as subdiagram-sum
//! differences across Reidemeister-move pairs, truncated at the working
//! order; the chord relations are their bar images. The graded families
//! (isolated-arrow, two-term sign relation, six-term) arise as homogeneous
//! degree-n parts of the local relation bundles, the instances that keep
//! their full ambient context. Unsigned families come from the
//! sign-forgetting map, adjacent-endpoint transpositions and the classical
//! four-term schema.

use rayon::prelude::*;

use crate::diagram::{Arc, CanonicalKey, Diagram, Flavor, Skeleton, Style};
use crate::enumerate::{dashed_arrows, diagrams, solid_arrows, Count};
use crate::error::{Error, Result};
use crate::formal_sum::{rat, FormalSum, Rational};
use crate::invariant::i_gpv;
use crate::linalg::{Provenance, RelationSystem};
use crate::moves::{self, MovePair};

/// The relation schemas the engine can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RelationKind {
    /// Isolated dashed arrow (first Polyak relation).
    Dp1,
    /// Three-term second Polyak relation.
    Dp2,
    /// Eight-term third Polyak relation.
    Dp3,
    /// Bar images of the above, on signed chords.
    Dr1,
    Dr2,
    Dr3,
    /// Degree-n graded families on signed diagrams.
    OneTermSigned,
    Ns,
    SixTermSigned,
    /// Unsigned families.
    OneTerm,
    SixTerm,
    FourTerm,
    TwoTerm,
}

impl RelationKind {
    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Dp1 => "dp1",
            RelationKind::Dp2 => "dp2",
            RelationKind::Dp3 => "dp3",
            RelationKind::Dr1 => "dr1",
            RelationKind::Dr2 => "dr2",
            RelationKind::Dr3 => "dr3",
            RelationKind::OneTermSigned => "1t-signed",
            RelationKind::Ns => "ns",
            RelationKind::SixTermSigned => "6t-signed",
            RelationKind::OneTerm => "1t",
            RelationKind::SixTerm => "6t",
            RelationKind::FourTerm => "4t",
            RelationKind::TwoTerm => "2t",
        }
    }
}

fn prov(kind: RelationKind, context: &CanonicalKey, detail: &str) -> Provenance {
    let mut p = Provenance::new(kind.name());
    p.context = context.to_string();
    p.detail = detail.to_string();
    p
}

/// The subdiagram-sum difference `I(before) - I(after)` of a move pair.
fn i_difference(pair: &MovePair) -> FormalSum {
    i_gpv(&pair.before)
        .sub(&i_gpv(&pair.after))
        .expect("move pairs share skeleton and flavor")
}

/// The local relation bundle of a move pair: the part of the
/// subdiagram difference that keeps the full ambient context. For an R1
/// pair this is the single kinked diagram; for R2 the three-term sum; for
/// R3 the four-plus-four alternating sum.
fn local_bundle(pair: &MovePair) -> FormalSum {
    let n_before = pair.before.arc_count();
    let ctx_before: u64 = {
        let mut mask = (1u64 << n_before) - 1;
        for &k in &pair.touched {
            mask &= !(1 << k);
        }
        mask
    };
    let mut out = FormalSum::zero(pair.before.skeleton(), Flavor::ArrowSigned);
    let t = pair.touched.len();
    if pair.touched_after.is_empty() {
        // insertion move: after contributes only subsets missing every
        // inserted arrow, which all cancel; keep the nonempty subsets
        for s in 1u64..1 << t {
            let mut mask = ctx_before;
            for (bit, &k) in pair.touched.iter().enumerate() {
                if s >> bit & 1 == 1 {
                    mask |= 1 << k;
                }
            }
            out.add_diagram(&pair.before.restrict(mask).with_style(Style::Dashed), rat(1));
        }
    } else {
        // rearrangement move: single-arrow and empty subsets agree on both
        // sides and cancel
        let n_after = pair.after.arc_count();
        let ctx_after: u64 = {
            let mut mask = (1u64 << n_after) - 1;
            for &k in &pair.touched_after {
                mask &= !(1 << k);
            }
            mask
        };
        for s in 0u64..1 << t {
            if s.count_ones() < 2 {
                continue;
            }
            let mut mask_b = ctx_before;
            let mut mask_a = ctx_after;
            for bit in 0..t {
                if s >> bit & 1 == 1 {
                    mask_b |= 1 << pair.touched[bit];
                    mask_a |= 1 << pair.touched_after[bit];
                }
            }
            out.add_diagram(&pair.before.restrict(mask_b).with_style(Style::Dashed), rat(1));
            out.add_diagram(&pair.after.restrict(mask_a).with_style(Style::Dashed), rat(-1));
        }
    }
    out
}

fn contexts(skeleton: Skeleton, m: usize, ceiling: usize) -> Result<Vec<Diagram>> {
    Ok(solid_arrows(skeleton, Count::Exactly(m), ceiling)?
        .into_iter()
        .map(|k| k.decode())
        .collect())
}

/// All move pairs contributing to the order-n relation module: R1 and R2
/// over contexts with up to n-1 arrows, R3 over contexts with up to n-2
/// (an R3 instance lives on diagrams with one arrow more than the order,
/// and its truncation is the six-term content).
fn move_pairs(order: usize, skeleton: Skeleton, ceiling: usize) -> Result<Vec<(RelationKind, MovePair)>> {
    let mut out = Vec::new();
    if order >= 1 {
        for m in 0..=order - 1 {
            for ctx in contexts(skeleton, m, ceiling)? {
                out.extend(moves::r1_insertions(&ctx).into_iter().map(|p| (RelationKind::Dp1, p)));
                out.extend(moves::r2_insertions(&ctx).into_iter().map(|p| (RelationKind::Dp2, p)));
            }
        }
    }
    if order >= 2 {
        for m in 0..=order - 2 {
            for ctx in contexts(skeleton, m, ceiling)? {
                out.extend(moves::r3_instances(&ctx).into_iter().map(|p| (RelationKind::Dp3, p)));
            }
        }
    }
    Ok(out)
}

/// The order-n relation system on dashed signed arrow diagrams: every
/// subdiagram-sum difference across the enumerated move pairs, truncated
/// by deleting terms above the order, deduplicated.
pub fn generate_polyak(order: usize, skeleton: Skeleton, ceiling: usize) -> Result<RelationSystem> {
    let ambient = dashed_arrows(skeleton, Count::UpTo(order), ceiling)?;
    let mut sys = RelationSystem::new(ambient);
    let pairs = move_pairs(order, skeleton, ceiling)?;
    let rows: Vec<(FormalSum, Provenance)> = pairs
        .par_iter()
        .map(|(kind, pair)| {
            let row = i_difference(pair).truncate(order);
            let p = prov(*kind, &pair.after.canonical_key(), &pair.detail);
            (row, p)
        })
        .collect();
    for (row, p) in rows {
        if !row.is_zero() {
            sys.push(&row.normalized(), p)?;
        }
    }
    sys.dedup();
    Ok(sys)
}

/// Local-bundle instances of the arrow relations at the given order
/// (truncation applied), the independent cross-check fixture for
/// [`generate_polyak`].
pub fn local_polyak_instances(order: usize, skeleton: Skeleton, ceiling: usize) -> Result<Vec<FormalSum>> {
    let pairs = move_pairs(order, skeleton, ceiling)?;
    let mut out: Vec<FormalSum> = pairs
        .par_iter()
        .map(|(_, pair)| local_bundle(pair).truncate(order))
        .filter(|row| !row.is_zero())
        .map(|row| row.normalized())
        .collect();
    out.sort_by(|a, b| {
        let ka: Vec<_> = a.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        let kb: Vec<_> = b.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
        ka.cmp(&kb)
    });
    out.dedup();
    Ok(out)
}

/// The order-n chord relation system: exactly the bar images of the
/// [`generate_polyak`] rows, re-merged and deduplicated.
pub fn generate_chord_relations(order: usize, skeleton: Skeleton, ceiling: usize) -> Result<RelationSystem> {
    let arrow_sys = generate_polyak(order, skeleton, ceiling)?;
    let ambient = diagrams(skeleton, Flavor::ChordSigned, Style::Solid, Count::UpTo(order), ceiling)?;
    let mut sys = RelationSystem::new(ambient);
    for (row, p) in arrow_sys.rows().iter().zip(arrow_sys.provenance()) {
        let sum = arrow_sys.sum_from_row(row, Flavor::ArrowSigned).bar();
        if sum.is_zero() {
            continue;
        }
        let mut p = p.clone();
        p.schema = match p.schema.as_str() {
            "dp1" => "dr1".into(),
            "dp2" => "dr2".into(),
            "dp3" => "dr3".into(),
            other => other.into(),
        };
        sys.push(&sum.normalized(), p)?;
    }
    sys.dedup();
    Ok(sys)
}

/// A degree-n graded relation instance together with the untruncated local
/// relation it was carved from.
#[derive(Debug, Clone)]
pub struct GradedInstance {
    pub kind: RelationKind,
    /// The degree-n homogeneous part (the graded relation itself).
    pub graded: FormalSum,
    /// The untruncated local relation instance at the same site.
    pub untruncated: FormalSum,
    pub provenance: Provenance,
}

/// Graded signed families at order n: isolated-arrow instances (contexts of
/// n-1 arrows), the two-term sign relation (degree-n parts of local R2
/// bundles over n-1 arrow contexts) and the signed six-term relation
/// (degree-n parts of local R3 bundles over n-2 arrow contexts). With
/// `chord` set, everything is pushed down along the bar map first.
pub fn graded_instances(
    kind: RelationKind,
    order: usize,
    skeleton: Skeleton,
    chord: bool,
    ceiling: usize,
) -> Result<Vec<GradedInstance>> {
    let (m, pair_kind): (usize, RelationKind) = match kind {
        RelationKind::OneTermSigned => {
            if order == 0 {
                return Ok(Vec::new());
            }
            (order - 1, RelationKind::Dp1)
        }
        RelationKind::Ns => {
            if order == 0 {
                return Ok(Vec::new());
            }
            (order - 1, RelationKind::Dp2)
        }
        RelationKind::SixTermSigned => {
            if order < 2 {
                return Ok(Vec::new());
            }
            (order - 2, RelationKind::Dp3)
        }
        other => {
            return Err(Error::InvalidDiagram(format!(
                "graded_instances expects a signed graded kind, got {}",
                other.name()
            )))
        }
    };
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for ctx in contexts(skeleton, m, ceiling)? {
        let pairs = match pair_kind {
            RelationKind::Dp1 => moves::r1_insertions(&ctx),
            RelationKind::Dp2 => moves::r2_insertions(&ctx),
            _ => moves::r3_instances(&ctx),
        };
        for pair in pairs {
            let mut untruncated = local_bundle(&pair);
            let mut graded = untruncated.homogeneous_part(order);
            if chord {
                untruncated = untruncated.bar();
                graded = graded.bar();
            }
            if graded.is_zero() {
                continue;
            }
            let fingerprint: Vec<(CanonicalKey, Rational)> =
                graded.iter().map(|(k, c)| (k.clone(), c.clone())).collect();
            if !seen.insert(fingerprint) {
                continue;
            }
            out.push(GradedInstance {
                kind,
                graded,
                untruncated,
                provenance: prov(kind, &pair.after.canonical_key(), &pair.detail),
            });
        }
    }
    Ok(out)
}

/// Whether some arc has skeleton-adjacent endpoints.
pub fn has_isolated_arc(d: &Diagram) -> bool {
    d.arcs().iter().any(|a| {
        let (x, y) = (a.a.min(a.b), a.a.max(a.b));
        moves::adjacent(d, x, y) || moves::adjacent(d, y, x)
    })
}

fn unsigned_flavor(arrow: bool) -> Flavor {
    if arrow {
        Flavor::ArrowUnsigned
    } else {
        Flavor::ChordUnsigned
    }
}

/// Generates one of the unsigned relation families over the diagrams with
/// exactly `order` arcs.
pub fn generate_unsigned(
    kind: RelationKind,
    order: usize,
    skeleton: Skeleton,
    arrow: bool,
    ceiling: usize,
) -> Result<RelationSystem> {
    let flavor = unsigned_flavor(arrow);
    let ambient = diagrams(skeleton, flavor, Style::Solid, Count::Exactly(order), ceiling)?;
    let mut sys = RelationSystem::new(ambient.clone());
    match kind {
        RelationKind::OneTerm => {
            for key in &ambient {
                if has_isolated_arc(&key.decode()) {
                    let mut sum = FormalSum::zero(skeleton, flavor);
                    sum.add_key(key.clone(), rat(1))?;
                    sys.push(&sum, prov(kind, key, "isolated arc"))?;
                }
            }
        }
        RelationKind::SixTerm => {
            for inst in graded_instances(RelationKind::SixTermSigned, order, skeleton, !arrow, ceiling)? {
                let row = inst.graded.xi()?;
                if !row.is_zero() {
                    sys.push(&row.normalized(), inst.provenance)?;
                }
            }
            sys.dedup();
        }
        RelationKind::TwoTerm => {
            if arrow {
                return Err(Error::InvalidDiagram("the two-term relation lives on chords".into()));
            }
            for key in &ambient {
                let d = key.decode();
                let m = d.endpoints();
                let adjacency: Vec<(usize, usize)> = match skeleton {
                    Skeleton::Line => (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
                    Skeleton::Circle => (0..m).map(|i| (i, (i + 1) % m)).collect(),
                };
                for (i, j) in adjacency {
                    if i == j {
                        continue;
                    }
                    // the two positions must belong to distinct chords
                    if d.arcs().iter().any(|a| (a.a == i && a.b == j) || (a.a == j && a.b == i)) {
                        continue;
                    }
                    let swapped = swap_positions(&d, i, j);
                    let row = FormalSum::generator(&d).sub(&FormalSum::generator(&swapped))?;
                    if row.is_zero() {
                        continue;
                    }
                    sys.push(&row, prov(kind, key, &format!("swap ({i},{j})")))?;
                }
            }
            sys.dedup();
        }
        RelationKind::FourTerm => {
            if arrow {
                return Err(Error::InvalidDiagram("the four-term relation lives on chords".into()));
            }
            if order < 2 {
                return Ok(sys);
            }
            for frame_key in diagrams(skeleton, flavor, Style::Solid, Count::Exactly(order - 1), ceiling)? {
                let frame = frame_key.decode();
                for (ui, u) in frame.arcs().iter().enumerate() {
                    for r_gap in 0..moves::gap_count(&frame) {
                        let row = four_term_row(&frame, u.a, u.b, r_gap)?;
                        if row.is_zero() {
                            continue;
                        }
                        sys.push(
                            &row,
                            prov(kind, &frame_key, &format!("chord {ui} r_gap {r_gap}")),
                        )?;
                    }
                }
            }
            sys.dedup();
        }
        other => {
            return Err(Error::InvalidDiagram(format!(
                "generate_unsigned expects an unsigned kind, got {}",
                other.name()
            )))
        }
    }
    Ok(sys)
}

/// Exchanges the partners of two skeleton positions.
fn swap_positions(d: &Diagram, i: usize, j: usize) -> Diagram {
    let map = |e: usize| {
        if e == i {
            j
        } else if e == j {
            i
        } else {
            e
        }
    };
    let arcs = d
        .arcs()
        .iter()
        .map(|a| Arc { a: map(a.a), b: map(a.b), sign: a.sign, style: a.style })
        .collect();
    Diagram::new(d.skeleton(), d.directed(), arcs).expect("swap keeps validity")
}

/// One four-term relation row: the moving endpoint of a new chord passes
/// both endpoints of the fixed chord `(ea, eb)`; the new chord's other
/// endpoint sits at `r_gap`. Terms: after(ea) - before(ea) + after(eb) -
/// before(eb).
fn four_term_row(frame: &Diagram, ea: usize, eb: usize, r_gap: usize) -> Result<FormalSum> {
    let m = frame.endpoints();
    let gap_after = |e: usize| match frame.skeleton() {
        Skeleton::Circle => (e + 1) % m.max(1),
        Skeleton::Line => e + 1,
    };
    let mut row = FormalSum::zero(frame.skeleton(), Flavor::ChordUnsigned);
    for (endpoint, side_after, coeff) in [
        (ea, true, rat(1)),
        (ea, false, rat(-1)),
        (eb, true, rat(1)),
        (eb, false, rat(-1)),
    ] {
        // entry order fixes the within-gap order so x lands adjacent to the
        // endpoint
        let (entries, x_entry, r_entry) = if side_after {
            (vec![(gap_after(endpoint), 1), (r_gap, 1)], 0usize, 1usize)
        } else {
            (vec![(r_gap, 1), (endpoint, 1)], 1usize, 0usize)
        };
        let (old_map, slots) = moves::insert_points(m, &entries);
        let x = slots[x_entry][0];
        let r = slots[r_entry][0];
        let mut arcs: Vec<Arc> = frame
            .arcs()
            .iter()
            .map(|a| Arc { a: old_map[a.a], b: old_map[a.b], sign: a.sign, style: a.style })
            .collect();
        arcs.push(Arc::chord(x, r, None));
        let d = Diagram::new(frame.skeleton(), false, arcs)?;
        row.add_diagram(&d, coeff);
    }
    Ok(row)
}

/// Exact decomposition of an unsigned six-term row as one four-term row
/// plus a combination of two-term rows. The four-term part is absent when
/// the instance's four-term bracket cancels to the zero vector (which
/// happens at small orders where the moving endpoint's four positions
/// coincide in pairs).
#[derive(Debug, Clone)]
pub struct SixTermDecomposition {
    pub four_term: Option<(usize, Rational)>,
    pub two_term_coeffs: Vec<(usize, Rational)>,
}

/// Finds the four-term-plus-two-term decomposition of an unsigned chord
/// six-term instance. Failure means the generation conventions disagree
/// and is reported as a convention mismatch carrying the instance.
pub fn decompose_six_term(
    row: &FormalSum,
    four: &RelationSystem,
    two: &RelationSystem,
) -> Result<SixTermDecomposition> {
    if let Some(coeffs) = two.in_span(row)? {
        return Ok(SixTermDecomposition { four_term: None, two_term_coeffs: coeffs });
    }
    for (fi, f) in four.rows().iter().enumerate() {
        let f_sum = four.sum_from_row(f, Flavor::ChordUnsigned);
        for eps in [rat(1), rat(-1)] {
            let remainder = row.sub(&f_sum.scale(&eps))?;
            if let Some(coeffs) = two.in_span(&remainder)? {
                return Ok(SixTermDecomposition {
                    four_term: Some((fi, eps)),
                    two_term_coeffs: coeffs,
                });
            }
        }
    }
    Err(Error::ConventionMismatch {
        message: "six-term row admits no four-term-plus-two-term decomposition".into(),
        instance: row.to_string(),
    })
}
