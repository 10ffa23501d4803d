//! Exhaustive enumeration of canonical diagrams.
//!
//! Diagrams are produced by decorating the perfect matchings of `2n`
//! points with directions and signs as the flavor requires, then reduced
//! modulo rotation and deduplicated by canonical key.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::diagram::{Arc, CanonicalKey, Diagram, Flavor, Sign, Skeleton, Style};
use crate::error::{Error, Result};

/// Whether to enumerate one homogeneous piece or everything up to an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Exactly(usize),
    UpTo(usize),
}

impl Count {
    pub fn order(self) -> usize {
        match self {
            Count::Exactly(n) | Count::UpTo(n) => n,
        }
    }
}

/// All perfect matchings of `0..2n-1` as sorted pair lists; `(2n-1)!!` of
/// them.
pub fn matchings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(free: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free.is_empty() {
            out.push(acc.clone());
            return;
        }
        let a = free[0];
        for i in 1..free.len() {
            let b = free[i];
            let mut rest: Vec<usize> = free.clone();
            rest.remove(i);
            rest.remove(0);
            acc.push((a, b));
            go(&mut rest, acc, out);
            acc.pop();
        }
    }
    let mut free: Vec<usize> = (0..2 * n).collect();
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return out;
    }
    go(&mut free, &mut Vec::new(), &mut out);
    out
}

fn decorated(skeleton: Skeleton, flavor: Flavor, style: Style, n: usize) -> Vec<CanonicalKey> {
    let base = matchings(n);
    let keys: BTreeSet<CanonicalKey> = base
        .par_iter()
        .flat_map_iter(|pairs| {
            let dir_masks: u64 = if flavor.directed() { 1 << n } else { 1 };
            let sign_masks: u64 = if flavor.signed() { 1 << n } else { 1 };
            let mut local = Vec::new();
            for dm in 0..dir_masks {
                for sm in 0..sign_masks {
                    let arcs: Vec<Arc> = pairs
                        .iter()
                        .enumerate()
                        .map(|(i, &(a, b))| {
                            let sign = if flavor.signed() {
                                Some(if sm >> i & 1 == 1 { Sign::Minus } else { Sign::Plus })
                            } else {
                                None
                            };
                            let st = if flavor == Flavor::ArrowSigned { style } else { Style::Solid };
                            if flavor.directed() {
                                let (t, h) = if dm >> i & 1 == 1 { (b, a) } else { (a, b) };
                                Arc { a: t, b: h, sign, style: st }
                            } else {
                                Arc { a, b, sign, style: st }
                            }
                        })
                        .collect();
                    let d = Diagram::new(skeleton, flavor.directed(), arcs)
                        .expect("enumerated diagrams are well-formed");
                    local.push(d.canonical_key());
                }
            }
            local
        })
        .collect();
    keys.into_iter().collect()
}

/// Enumerates canonical diagrams of the requested flavor, sorted by key and
/// duplicate-free. `style` applies to arrow-signed diagrams only (the other
/// flavors carry no style). Orders above `ceiling` are refused.
pub fn diagrams(
    skeleton: Skeleton,
    flavor: Flavor,
    style: Style,
    count: Count,
    ceiling: usize,
) -> Result<Vec<CanonicalKey>> {
    let order = count.order();
    if order > ceiling {
        return Err(Error::ResourceLimit { requested: order, ceiling });
    }
    let mut keys: BTreeSet<CanonicalKey> = BTreeSet::new();
    let sizes: Vec<usize> = match count {
        Count::Exactly(n) => vec![n],
        Count::UpTo(n) => (0..=n).collect(),
    };
    for n in sizes {
        if n == 0 {
            keys.insert(Diagram::empty(skeleton, flavor.directed()).canonical_key());
        } else {
            keys.extend(decorated(skeleton, flavor, style, n));
        }
    }
    Ok(keys.into_iter().collect())
}

/// Dashed signed arrow diagrams: the generators of the arrow-space ambient.
pub fn dashed_arrows(skeleton: Skeleton, count: Count, ceiling: usize) -> Result<Vec<CanonicalKey>> {
    diagrams(skeleton, Flavor::ArrowSigned, Style::Dashed, count, ceiling)
}

/// Solid signed arrow diagrams: Gauss diagrams of virtual knots.
pub fn solid_arrows(skeleton: Skeleton, count: Count, ceiling: usize) -> Result<Vec<CanonicalKey>> {
    diagrams(skeleton, Flavor::ArrowSigned, Style::Solid, count, ceiling)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_counts_are_double_factorials() {
        assert_eq!(matchings(0).len(), 1);
        assert_eq!(matchings(1).len(), 1);
        assert_eq!(matchings(2).len(), 3);
        assert_eq!(matchings(3).len(), 15);
        assert_eq!(matchings(4).len(), 105);
    }

    #[test]
    fn line_unsigned_chords_exactly_two() {
        let keys =
            diagrams(Skeleton::Line, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(2), 6)
                .unwrap();
        // AABB, ABAB, ABBA
        assert_eq!(keys.len(), 3);
    }

    #[test]
    fn circle_unsigned_chords_exactly_two() {
        let keys =
            diagrams(Skeleton::Circle, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(2), 6)
                .unwrap();
        // crossing and non-crossing
        assert_eq!(keys.len(), 2);
    }

    #[test]
    fn circle_unsigned_chords_exactly_three_matches_orbit_oracle() {
        // oracle: canonicalize all 15 matchings by hand, i.e. take each
        // matching's orbit under the 6 rotations and count distinct minima
        let mut orbit_minima: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
        for pairs in matchings(3) {
            let mut best: Option<Vec<(usize, usize)>> = None;
            for r in 0..6 {
                let mut rotated: Vec<(usize, usize)> = pairs
                    .iter()
                    .map(|&(a, b)| {
                        let (x, y) = ((a + r) % 6, (b + r) % 6);
                        (x.min(y), x.max(y))
                    })
                    .collect();
                rotated.sort_unstable();
                if best.as_ref().map_or(true, |b| &rotated < b) {
                    best = Some(rotated);
                }
            }
            orbit_minima.insert(best.unwrap());
        }
        assert_eq!(orbit_minima.len(), 5);

        let keys =
            diagrams(Skeleton::Circle, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(3), 6)
                .unwrap();
        assert_eq!(keys.len(), orbit_minima.len());
    }

    #[test]
    fn signed_arrow_counts_match_burnside() {
        // circle, signed arrows: 2 at n=1, 14 at n=2, 164 at n=3
        let count = |n| {
            dashed_arrows(Skeleton::Circle, Count::Exactly(n), 6).unwrap().len()
        };
        assert_eq!(count(1), 2);
        assert_eq!(count(2), 14);
        assert_eq!(count(3), 164);
        let upto =
            dashed_arrows(Skeleton::Circle, Count::UpTo(3), 6).unwrap();
        assert_eq!(upto.len(), 1 + 2 + 14 + 164);
        // line, signed arrows: no rotation quotient
        let line = dashed_arrows(Skeleton::Line, Count::UpTo(2), 6).unwrap();
        assert_eq!(line.len(), 1 + 4 + 48);
    }

    #[test]
    fn up_to_contains_the_empty_diagram() {
        let keys =
            diagrams(Skeleton::Circle, Flavor::ChordSigned, Style::Solid, Count::UpTo(1), 6)
                .unwrap();
        assert!(keys.iter().any(|k| k.arc_count() == 0));
        assert_eq!(keys.len(), 3);
    }

    #[test]
    fn ceiling_is_enforced() {
        let res = diagrams(Skeleton::Circle, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(7), 6);
        assert!(matches!(res, Err(Error::ResourceLimit { requested: 7, ceiling: 6 })));
    }

    #[test]
    fn keys_are_sorted_and_unique() {
        let keys = dashed_arrows(Skeleton::Circle, Count::UpTo(2), 6).unwrap();
        for w in keys.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
}
