//! Property suites backing the engine's algebraic identities:
//! sign-forgetting compatibilities, the six-term decomposition, span
//! equalities between generation routes, dual-dimension agreement across
//! the bar identification, and cache/certificate reproducibility.

use proptest::prelude::*;

use polyak_core::diagram::{Arc, Diagram, Flavor, Sign, Skeleton, Style};
use polyak_core::enumerate::{diagrams, matchings, Count};
use polyak_core::formal_sum::{rat, FormalSum, Rational};
use polyak_core::gauss_code;
use polyak_core::invariant::{evaluate, invariant_space, Profile};
use polyak_core::linalg::{Provenance, RelationSystem};
use polyak_core::relations::{self, RelationKind};
use polyak_core::verify::{Status, Verifier, VerifyOptions};

#[test]
fn xi_compatibilities_hold_for_graded_families() {
    for n in [2usize, 3] {
        for skel in [Skeleton::Circle, Skeleton::Line] {
            if n == 3 && skel == Skeleton::Line {
                continue;
            }
            for chord in [true, false] {
                let arrow = !chord;
                let one_t =
                    relations::generate_unsigned(RelationKind::OneTerm, n, skel, arrow, 6).unwrap();
                let six_t =
                    relations::generate_unsigned(RelationKind::SixTerm, n, skel, arrow, 6).unwrap();
                // xi of isolated signed instances lands in the unsigned
                // isolated family
                for inst in
                    relations::graded_instances(RelationKind::OneTermSigned, n, skel, chord, 6)
                        .unwrap()
                {
                    let image = inst.graded.xi().unwrap();
                    assert!(one_t.in_span(&image).unwrap().is_some());
                }
                // xi of the signed six-term instances lands in the unsigned
                // six-term span
                for inst in
                    relations::graded_instances(RelationKind::SixTermSigned, n, skel, chord, 6)
                        .unwrap()
                {
                    let image = inst.graded.xi().unwrap();
                    if !image.is_zero() {
                        assert!(six_t.in_span(&image).unwrap().is_some());
                    }
                }
                // xi kills every two-term sign instance outright
                for inst in
                    relations::graded_instances(RelationKind::Ns, n, skel, chord, 6).unwrap()
                {
                    assert!(inst.graded.xi().unwrap().is_zero());
                }
            }
        }
    }
}

#[test]
fn flip_constraint_count_matches_raw_pair_oracle() {
    // oracle: enumerate raw (non-canonical) decorated diagrams and all
    // single-arrow flips, normalize, dedup; the canonical-representative
    // route must find exactly the same constraint set
    for (n, skel) in [(2usize, Skeleton::Circle), (3, Skeleton::Circle), (2, Skeleton::Line)] {
        let mut oracle: std::collections::BTreeSet<Vec<(polyak_core::CanonicalKey, Rational)>> =
            Default::default();
        for m in 1..=n {
            for pairs in matchings(m) {
                for dm in 0u64..1 << m {
                    for sm in 0u64..1 << m {
                        let arcs: Vec<Arc> = pairs
                            .iter()
                            .enumerate()
                            .map(|(i, &(a, b))| {
                                let (t, h) = if dm >> i & 1 == 1 { (b, a) } else { (a, b) };
                                let sign =
                                    if sm >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
                                Arc::arrow(t, h, sign, Style::Dashed)
                            })
                            .collect();
                        let d = Diagram::new(skel, true, arcs).unwrap();
                        for k in 0..m {
                            let row = FormalSum::generator(&d)
                                .sub(&FormalSum::generator(&d.reverse_arrow(k).unwrap()))
                                .unwrap();
                            if !row.is_zero() {
                                let norm = row.normalized();
                                oracle.insert(
                                    norm.iter().map(|(k, c)| (k.clone(), c.clone())).collect(),
                                );
                            }
                        }
                    }
                }
            }
        }
        let via_canonical =
            polyak_core::invariant::flip_constraints(n, skel, 6).unwrap();
        assert_eq!(via_canonical.len(), oracle.len(), "flip count at ({n}, {skel})");
    }
}

#[test]
fn graded_instances_have_the_displayed_term_counts() {
    // two-term sign instances have two terms; the signed six-term
    // instances have six (three per side); isolated instances one
    for skel in [Skeleton::Circle, Skeleton::Line] {
        for inst in relations::graded_instances(RelationKind::Ns, 2, skel, false, 6).unwrap() {
            assert_eq!(inst.graded.len(), 2, "{}", inst.graded);
            assert_eq!(inst.untruncated.len(), 3);
        }
        for inst in
            relations::graded_instances(RelationKind::OneTermSigned, 2, skel, false, 6).unwrap()
        {
            assert_eq!(inst.graded.len(), 1);
        }
        let mut saw_full_bundle = false;
        for inst in
            relations::graded_instances(RelationKind::SixTermSigned, 2, skel, false, 6).unwrap()
        {
            // canonical merging can shrink the six-term pattern, never grow it
            assert!(inst.graded.len() <= 6, "{}", inst.graded);
            let plus: Rational =
                inst.graded.iter().map(|(_, c)| c.clone()).filter(|c| c > &rat(0)).sum();
            assert!(plus <= rat(3));
            // the untruncated local bundle is the four-plus-four pattern
            assert!(inst.untruncated.len() <= 8);
            saw_full_bundle |= inst.untruncated.len() == 8;
        }
        // on the small circle every empty-context bundle loses a term to
        // rotational merging; the full pattern survives on the line
        if skel == Skeleton::Line {
            assert!(saw_full_bundle, "some local bundle keeps all eight terms");
        }
    }
}

#[test]
fn six_term_decomposition_all_instances_and_negative_control() {
    for (n, skel) in [(2usize, Skeleton::Circle), (3, Skeleton::Line)] {
        let six = relations::generate_unsigned(RelationKind::SixTerm, n, skel, false, 6).unwrap();
        let four = relations::generate_unsigned(RelationKind::FourTerm, n, skel, false, 6).unwrap();
        let two = relations::generate_unsigned(RelationKind::TwoTerm, n, skel, false, 6).unwrap();
        assert!(!six.is_empty());
        for row in six.rows() {
            let sum = six.sum_from_row(row, Flavor::ChordUnsigned);
            relations::decompose_six_term(&sum, &four, &two)
                .unwrap_or_else(|e| panic!("decomposition failed at ({n}, {skel}): {e}"));
        }
        // negative control: corrupt one coefficient's sign
        let sum = six.sum_from_row(&six.rows()[0], Flavor::ChordUnsigned);
        let (key, coeff) = sum.iter().next().map(|(k, c)| (k.clone(), c.clone())).unwrap();
        let mut corrupted = sum.clone();
        corrupted.add_key(key, coeff.clone() * rat(-7)).unwrap();
        if corrupted != sum && !corrupted.is_zero() {
            assert!(
                relations::decompose_six_term(&corrupted, &four, &two).is_err(),
                "corrupted instance must be refused"
            );
        }
    }
}

#[test]
fn chord_relations_match_local_transcriptions_at_order_two() {
    // the bar images of the move-difference rows span the same module as
    // the local-bundle chord instances, both directions
    for skel in [Skeleton::Circle, Skeleton::Line] {
        let chord = relations::generate_chord_relations(2, skel, 6).unwrap();
        let locals = relations::local_polyak_instances(2, skel, 6).unwrap();
        let ambient = chord.ambient().to_vec();
        let mut local_sys = RelationSystem::new(ambient);
        for row in &locals {
            let barred = row.bar();
            if !barred.is_zero() {
                local_sys.push(&barred.normalized(), Provenance::new("local")).unwrap();
            }
        }
        local_sys.dedup();
        for row in chord.rows() {
            let sum = chord.sum_from_row(row, Flavor::ChordSigned);
            assert!(local_sys.in_span(&sum).unwrap().is_some(), "difference row outside local span");
        }
        for row in local_sys.rows() {
            let sum = local_sys.sum_from_row(row, Flavor::ChordSigned);
            assert!(chord.in_span(&sum).unwrap().is_some(), "local row outside difference span");
        }
    }
}

#[test]
fn dual_dimension_agrees_across_the_bar_identification() {
    // the virtualization-constrained arrow-side dual has the same
    // dimension as the chord-side dual
    for (n, skel) in [
        (1usize, Skeleton::Circle),
        (2, Skeleton::Circle),
        (3, Skeleton::Circle),
        (1, Skeleton::Line),
        (2, Skeleton::Line),
    ] {
        let virt = invariant_space(n, skel, Profile::GpvVirtualization, 6).unwrap();
        let chord = invariant_space(n, skel, Profile::Chord, 6).unwrap();
        assert_eq!(virt.len(), chord.len(), "dual dimensions disagree at ({n}, {skel})");
    }
}

#[test]
fn polyak_order_one_circle_hand_computation() {
    // ambient {empty, +arrow, -arrow}; the kink relations kill both
    // one-arrow diagrams, leaving the constants
    let sys = relations::generate_polyak(1, Skeleton::Circle, 6).unwrap();
    assert_eq!(sys.ambient().len(), 3);
    assert_eq!(sys.rank(), 2);
    let basis = invariant_space(1, Skeleton::Circle, Profile::Gpv, 6).unwrap();
    assert_eq!(basis.len(), 1);
    assert!(basis[0].is_constant());
}

#[test]
fn empty_indicator_evaluates_to_one_everywhere() {
    let basis = invariant_space(1, Skeleton::Circle, Profile::Gpv, 6).unwrap();
    let constant = &basis[0];
    for code in ["", "O1+,U1+", "O1+,U2+,O2+,U1+", "O1-,U2+,U1-,O2+"] {
        let knot = gauss_code::parse(code).unwrap();
        assert_eq!(evaluate(constant, &knot).unwrap(), rat(1));
    }
}

#[test]
fn virtualization_profile_is_flip_invariant_under_evaluation() {
    for (n, skel) in [(2usize, Skeleton::Circle), (2, Skeleton::Line)] {
        let basis = invariant_space(n, skel, Profile::GpvVirtualization, 6).unwrap();
        let keys = polyak_core::enumerate::solid_arrows(skel, Count::UpTo(3), 6).unwrap();
        for key in keys.iter().step_by(7) {
            let d = key.decode();
            for f in &basis {
                let v = evaluate(f, &d).unwrap();
                for k in 0..d.arc_count() {
                    let flipped = d.reverse_arrow(k).unwrap();
                    assert_eq!(evaluate(f, &flipped).unwrap(), v);
                }
            }
        }
    }
}

#[test]
fn evaluation_rejects_skeleton_mismatch() {
    let basis = invariant_space(1, Skeleton::Circle, Profile::Gpv, 6).unwrap();
    let long_knot = gauss_code::parse("L:O1+,U1+").unwrap();
    assert!(evaluate(&basis[0], &long_knot).is_err());
}

#[test]
fn warm_cache_reproduces_certificates_and_skips_generation() {
    let dir = tempfile::tempdir().unwrap();
    let cold = Verifier::new(VerifyOptions::default(), Some(dir.path().to_path_buf()));
    let first = cold.verify_theorem1(3, Skeleton::Circle).unwrap();
    assert_eq!(cold.cache().hits(), 0);
    let warm = Verifier::new(VerifyOptions::default(), Some(dir.path().to_path_buf()));
    let second = warm.verify_theorem1(3, Skeleton::Circle).unwrap();
    assert!(warm.cache().hits() > 0, "second run must hit the cache");
    assert_eq!(first.canonical_bytes(), second.canonical_bytes());
    assert_eq!(first.status, Status::Pass);
}

#[test]
fn relation_rows_respect_truncation_and_flavor() {
    for skel in [Skeleton::Circle, Skeleton::Line] {
        let sys = relations::generate_polyak(2, skel, 6).unwrap();
        for row in sys.rows() {
            assert!(!row.is_empty());
            for (col, _) in row {
                assert!(sys.ambient()[*col].arc_count() <= 2);
            }
        }
    }
}

#[test]
fn one_term_rows_are_isolated_diagrams_with_unit_coefficient() {
    let sys =
        relations::generate_unsigned(RelationKind::OneTerm, 2, Skeleton::Circle, false, 6).unwrap();
    for row in sys.rows() {
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].1, rat(1));
        assert!(relations::has_isolated_arc(&sys.ambient()[row[0].0].decode()));
    }
}

#[test]
fn two_term_rows_have_two_unit_terms() {
    for skel in [Skeleton::Circle, Skeleton::Line] {
        let sys = relations::generate_unsigned(RelationKind::TwoTerm, 3, skel, false, 6).unwrap();
        assert!(!sys.is_empty());
        for row in sys.rows() {
            assert_eq!(row.len(), 2, "two-term rows have exactly two terms");
            let coeffs: Vec<Rational> = row.iter().map(|(_, c)| c.clone()).collect();
            assert!(coeffs.contains(&rat(1)) && coeffs.contains(&rat(-1)));
        }
    }
}

#[test]
fn line_two_term_connects_all_three_patterns() {
    // AABB <-> ABAB <-> ABBA: one class
    let sys = relations::generate_unsigned(RelationKind::TwoTerm, 2, Skeleton::Line, false, 6)
        .unwrap();
    assert_eq!(sys.ambient().len(), 3);
    assert_eq!(sys.rank(), 2);
}

#[test]
fn bar_of_isolated_instances_is_an_isolated_chord() {
    for inst in
        relations::graded_instances(RelationKind::OneTermSigned, 2, Skeleton::Circle, true, 6)
            .unwrap()
    {
        assert_eq!(inst.graded.len(), 1);
        let (key, coeff) = inst.graded.iter().next().unwrap();
        assert_eq!(coeff, &rat(1));
        assert!(relations::has_isolated_arc(&key.decode()));
        assert_eq!(key.flavor(), Flavor::ChordSigned);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Mutated Gauss codes never crash the parser: they parse or they
    /// report a positioned error.
    #[test]
    fn parser_total_on_mutated_codes(
        base in prop::sample::select(vec![
            "O1+,U1+",
            "O1+,U2+,O2+,U1+",
            "L:O1+,U2-,U1+,O2-",
            "O1-,U2-,O3+,U1-,O2-,U3+",
        ]),
        edit_pos in 0usize..24,
        edit_char in prop::sample::select(vec!['O', 'U', '+', '-', ',', 'X', '9', ':', 'L']),
    ) {
        let mut text: Vec<char> = base.chars().collect();
        if edit_pos < text.len() {
            text[edit_pos] = edit_char;
        } else {
            text.push(edit_char);
        }
        let mutated: String = text.into_iter().collect();
        match gauss_code::parse(&mutated) {
            Ok(d) => {
                // accepted mutants still round trip
                let code = gauss_code::emit(&d).unwrap();
                prop_assert_eq!(
                    gauss_code::parse(&code).unwrap().canonical_key(),
                    d.canonical_key()
                );
            }
            Err(polyak_core::Error::Parse { position, .. }) => {
                prop_assert!(position <= mutated.len());
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error kind: {e}"))),
        }
    }

    /// Canonical keys are rotation-complete: any rotation has the same key.
    #[test]
    fn rotation_invariance_of_keys(
        matching_idx in 0usize..105,
        dirs in 0u64..16,
        signs in 0u64..16,
        rot in 0usize..8,
    ) {
        let all = matchings(4);
        let pairs = &all[matching_idx % all.len()];
        let arcs: Vec<Arc> = pairs.iter().enumerate().map(|(i, &(a, b))| {
            let (t, h) = if dirs >> i & 1 == 1 { (b, a) } else { (a, b) };
            let sign = if signs >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
            Arc::arrow(t, h, sign, Style::Dashed)
        }).collect();
        let d = Diagram::new(Skeleton::Circle, true, arcs).unwrap();
        prop_assert_eq!(d.rotate(rot).canonical_key(), d.canonical_key());
    }

    /// Formal sums are linear: (a + b) - b = a.
    #[test]
    fn formal_sum_addition_cancels(
        idx_a in 0usize..3,
        idx_b in 0usize..3,
        coeff in -5i64..=5,
    ) {
        let keys = diagrams(Skeleton::Line, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(2), 6).unwrap();
        let mut a = FormalSum::zero(Skeleton::Line, Flavor::ChordUnsigned);
        a.add_key(keys[idx_a].clone(), rat(3)).unwrap();
        let mut b = FormalSum::zero(Skeleton::Line, Flavor::ChordUnsigned);
        b.add_key(keys[idx_b].clone(), rat(coeff)).unwrap();
        let round = a.add(&b).unwrap().sub(&b).unwrap();
        prop_assert_eq!(round, a);
    }

    /// Gauss-code round trips preserve canonical keys on random solid
    /// diagrams.
    #[test]
    fn gauss_round_trip_random(
        matching_idx in 0usize..105,
        dirs in 0u64..16,
        signs in 0u64..16,
        line in any::<bool>(),
    ) {
        let all = matchings(4);
        let pairs = &all[matching_idx % all.len()];
        let arcs: Vec<Arc> = pairs.iter().enumerate().map(|(i, &(a, b))| {
            let (t, h) = if dirs >> i & 1 == 1 { (b, a) } else { (a, b) };
            let sign = if signs >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
            Arc::arrow(t, h, sign, Style::Solid)
        }).collect();
        let skel = if line { Skeleton::Line } else { Skeleton::Circle };
        let d = Diagram::new(skel, true, arcs).unwrap();
        let code = gauss_code::emit(&d).unwrap();
        prop_assert_eq!(gauss_code::parse(&code).unwrap().canonical_key(), d.canonical_key());
    }
}
