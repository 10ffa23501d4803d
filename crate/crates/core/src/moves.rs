//! Reidemeister moves on Gauss diagrams.
//!
//! Moves are purely combinatorial here: virtual crossings never appear in a
//! Gauss diagram, so strands can be routed anywhere and a move is applicable
//! at any choice of skeleton gaps.
//!
//! - R1 inserts or deletes an isolated arrow (adjacent endpoints), any sign
//!   and direction.
//! - R2 inserts or deletes a pair of opposite-sign arrows whose endpoints
//!   occupy two adjacent position pairs, connected in parallel (crossed) or
//!   antiparallel (nested) fashion, with both heads on one strand.
//! - R3 swaps the endpoint order inside each of three adjacent position
//!   pairs carrying a triangle of arrows. The admissible sign/direction
//!   profiles are generated from planar line arrangements: two triangle
//!   chiralities, six height orders and eight direction patterns, with the
//!   crossing sign read off the orientation determinant and the arrowhead
//!   placed on the lower strand.

use std::collections::BTreeSet;

use crate::diagram::{Arc, Diagram, Sign, Skeleton, Style};
use crate::error::{Error, Result};

/// Number of insertion gaps of a diagram: one per position on the circle
/// (between an endpoint and its successor), one more than the endpoint
/// count on a line. The empty diagram has exactly one gap.
pub fn gap_count(d: &Diagram) -> usize {
    let m = d.endpoints();
    match d.skeleton() {
        Skeleton::Circle => m.max(1),
        Skeleton::Line => m + 1,
    }
}

/// Renumbers positions after inserting new points. `inserts` lists
/// `(gap, count)` pairs; gap `g` means "immediately before old position
/// `g`". Entries sharing a gap keep their list order. Returns the map from
/// old positions to new ones and the new positions of each entry's points.
pub fn insert_points(total_old: usize, inserts: &[(usize, usize)]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let mut old_map = vec![0usize; total_old];
    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); inserts.len()];
    let mut next = 0usize;
    for g in 0..=total_old {
        for (i, &(gap, count)) in inserts.iter().enumerate() {
            if gap == g {
                for _ in 0..count {
                    slots[i].push(next);
                    next += 1;
                }
            }
        }
        if g < total_old {
            old_map[g] = next;
            next += 1;
        }
    }
    (old_map, slots)
}

fn rebuild(context: &Diagram, old_map: &[usize], extra: Vec<Arc>) -> Diagram {
    let mut arcs: Vec<Arc> = context
        .arcs()
        .iter()
        .map(|a| Arc { a: old_map[a.a], b: old_map[a.b], sign: a.sign, style: a.style })
        .collect();
    arcs.extend(extra);
    Diagram::new(context.skeleton(), true, arcs).expect("move insertion is well-formed")
}

/// Finds the arc indices whose (tail, head) pairs are the given markers.
pub fn locate_arcs(d: &Diagram, markers: &[(usize, usize)]) -> Vec<usize> {
    markers
        .iter()
        .map(|&(a, b)| {
            d.arcs().iter().position(|arc| arc.a == a && arc.b == b).expect("marker arc present")
        })
        .collect()
}

/// A move written as the (before, after) diagram pair, with the arcs the
/// move touches identified inside `before`.
#[derive(Debug, Clone)]
pub struct MovePair {
    pub before: Diagram,
    pub after: Diagram,
    /// Indices (into `before.arcs()`) of the arrows the move inserts or
    /// rearranges.
    pub touched: Vec<usize>,
    /// The same arrows located in `after` (empty for insertion moves,
    /// whose `after` is the bare context).
    pub touched_after: Vec<usize>,
    pub detail: String,
}

/// All R1 kink insertions on the given context: every gap, sign and
/// direction. `after` is the context itself.
pub fn r1_insertions(context: &Diagram) -> Vec<MovePair> {
    let mut out = Vec::new();
    for gap in 0..gap_count(context) {
        for sign in [Sign::Plus, Sign::Minus] {
            for head_first in [false, true] {
                let (old_map, slots) = insert_points(context.endpoints(), &[(gap, 2)]);
                let (p1, p2) = (slots[0][0], slots[0][1]);
                let (tail, head) = if head_first { (p2, p1) } else { (p1, p2) };
                let before =
                    rebuild(context, &old_map, vec![Arc::arrow(tail, head, sign, Style::Solid)]);
                let touched = locate_arcs(&before, &[(tail, head)]);
                out.push(MovePair {
                    before,
                    after: context.clone(),
                    touched,
                    touched_after: Vec::new(),
                    detail: format!("r1 gap={gap} sign={} head_first={head_first}", sign.as_i64()),
                });
            }
        }
    }
    out
}

/// Endpoint pairing of an R2 pair: crossed corresponds to parallel strands,
/// nested to antiparallel ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum R2Pattern {
    Crossed,
    Nested,
}

/// All R2 pair insertions on the context: every unordered gap pair, both
/// patterns, both head sides, both sign orders.
pub fn r2_insertions(context: &Diagram) -> Vec<MovePair> {
    let gaps = gap_count(context);
    let mut out = Vec::new();
    for g1 in 0..gaps {
        for g2 in g1..gaps {
            for pattern in [R2Pattern::Crossed, R2Pattern::Nested] {
                for heads_on_first in [true, false] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let (old_map, slots) = if g1 == g2 {
                            let (m, s) = insert_points(context.endpoints(), &[(g1, 4)]);
                            (m, vec![vec![s[0][0], s[0][1]], vec![s[0][2], s[0][3]]])
                        } else {
                            let (m, s) = insert_points(context.endpoints(), &[(g1, 2), (g2, 2)]);
                            (m, vec![s[0].clone(), s[1].clone()])
                        };
                        let (u1, u2) = (slots[0][0], slots[0][1]);
                        let (v1, v2) = (slots[1][0], slots[1][1]);
                        let pairs = match pattern {
                            R2Pattern::Crossed => [(u1, v1), (u2, v2)],
                            R2Pattern::Nested => [(u1, v2), (u2, v1)],
                        };
                        let mut arcs = Vec::with_capacity(2);
                        let mut markers = Vec::with_capacity(2);
                        for (i, &(u, v)) in pairs.iter().enumerate() {
                            let s = if i == 0 { sign } else { sign.flip() };
                            let (tail, head) = if heads_on_first { (v, u) } else { (u, v) };
                            arcs.push(Arc::arrow(tail, head, s, Style::Solid));
                            markers.push((tail, head));
                        }
                        let before = rebuild(context, &old_map, arcs);
                        let touched = locate_arcs(&before, &markers);
                        out.push(MovePair {
                            before,
                            after: context.clone(),
                            touched,
                            touched_after: Vec::new(),
                            detail: format!(
                                "r2 gaps=({g1},{g2}) pattern={pattern:?} heads_on_first={heads_on_first} sign={}",
                                sign.as_i64()
                            ),
                        });
                    }
                }
            }
        }
    }
    out
}

/// One admissible R3 configuration. Lines are indexed 0..2; crossings are
/// named by the line pair: 0 = (0,1), 1 = (0,2), 2 = (1,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct R3Template {
    /// `order[i]` lists the other line met first and second along line `i`.
    pub order: [[usize; 2]; 3],
    /// Crossing signs, indexed by pair as above.
    pub sign: [Sign; 3],
    /// The line carrying the arrowhead of each crossing (the under strand).
    pub head: [usize; 3],
}

fn pair_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 1) => 0,
        (0, 2) => 1,
        _ => 2,
    }
}

fn permutations() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Generates the admissible R3 configurations from planar line
/// arrangements. Lines have slopes (0, ±1, ∓1); crossings sit at
/// x-parameters 0, 1, 1/2; the sign of a crossing is the sign of
/// `det[v_over, v_under]` and the head goes on the lower strand.
pub fn r3_templates() -> Vec<R3Template> {
    let mut set = BTreeSet::new();
    for chirality in [1i64, -1] {
        // direction vectors of the three lines
        let base = [(1i64, 0i64), (1, chirality), (1, -chirality)];
        // x-parameter (doubled to stay integral) of each crossing on each
        // of its two lines: crossing (0,1) at 0, (0,2) at 2, (1,2) at 1
        let on_line: [[(usize, i64); 2]; 3] = [
            [(0, 0), (1, 2)],
            [(0, 0), (2, 1)],
            [(2, 1), (1, 2)],
        ];
        for dirs in 0..8u32 {
            let d: Vec<i64> = (0..3).map(|i| if dirs >> i & 1 == 1 { -1 } else { 1 }).collect();
            for heights in permutations() {
                let mut order = [[0usize; 2]; 3];
                for i in 0..3 {
                    let mut cs = on_line[i];
                    cs.sort_by_key(|&(_, x)| d[i] * x);
                    for (slot, &(crossing, _)) in cs.iter().enumerate() {
                        let (a, b) = match crossing {
                            0 => (0, 1),
                            1 => (0, 2),
                            _ => (1, 2),
                        };
                        order[i][slot] = if a == i { b } else { a };
                    }
                }
                let mut sign = [Sign::Plus; 3];
                let mut head = [0usize; 3];
                for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
                    let (over, under) = if heights[i] > heights[j] { (i, j) } else { (j, i) };
                    let vo = (d[over] * base[over].0, d[over] * base[over].1);
                    let vu = (d[under] * base[under].0, d[under] * base[under].1);
                    let det = vo.0 * vu.1 - vo.1 * vu.0;
                    let p = pair_index(i, j);
                    sign[p] = if det > 0 { Sign::Plus } else { Sign::Minus };
                    head[p] = under;
                }
                set.insert(R3Template { order, sign, head });
            }
        }
    }
    set.into_iter().collect()
}

fn r3_arcs_for(slots: &[Vec<usize>], template: &R3Template, reversed: bool) -> Vec<Arc> {
    let slot_of = |i: usize, other: usize| -> usize {
        let mut pos = if template.order[i][0] == other { 0 } else { 1 };
        if reversed {
            pos = 1 - pos;
        }
        slots[i][pos]
    };
    let mut arcs = Vec::with_capacity(3);
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let p = pair_index(i, j);
        let (ei, ej) = (slot_of(i, j), slot_of(j, i));
        let (tail, head) = if template.head[p] == j { (ei, ej) } else { (ej, ei) };
        arcs.push(Arc::arrow(tail, head, template.sign[p], Style::Solid));
    }
    arcs
}

/// All R3 instances over the context: every placement of the three move
/// arcs at skeleton gaps (in every insertion order) and every admissible
/// template. `before` and `after` differ by swapping the endpoint order
/// inside each of the three arcs. Placements producing an identical
/// canonical (before, after) pair are emitted once.
pub fn r3_instances(context: &Diagram) -> Vec<MovePair> {
    let gaps = gap_count(context);
    let templates = r3_templates();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for g0 in 0..gaps {
        for g1 in 0..gaps {
            for g2 in 0..gaps {
                let site = [g0, g1, g2];
                for perm in permutations() {
                    // two points per line, inserted in `perm` sequence so
                    // that equal gaps get the declared within-gap order
                    let entries: Vec<(usize, usize)> =
                        perm.iter().map(|&line| (site[line], 2)).collect();
                    let (old_map, raw_slots) = insert_points(context.endpoints(), &entries);
                    let mut slots: Vec<Vec<usize>> = vec![Vec::new(); 3];
                    for (k, &line) in perm.iter().enumerate() {
                        slots[line] = raw_slots[k].clone();
                    }
                    for template in &templates {
                        let before_arcs = r3_arcs_for(&slots, template, false);
                        let after_arcs = r3_arcs_for(&slots, template, true);
                        let markers: Vec<(usize, usize)> =
                            before_arcs.iter().map(|a| (a.a, a.b)).collect();
                        let markers_after: Vec<(usize, usize)> =
                            after_arcs.iter().map(|a| (a.a, a.b)).collect();
                        let before = rebuild(context, &old_map, before_arcs);
                        let after = rebuild(context, &old_map, after_arcs);
                        let fingerprint = (before.canonical_key(), after.canonical_key());
                        if !seen.insert(fingerprint) {
                            continue;
                        }
                        let touched = locate_arcs(&before, &markers);
                        let touched_after = locate_arcs(&after, &markers_after);
                        out.push(MovePair {
                            before,
                            after,
                            touched,
                            touched_after,
                            detail: format!("r3 sites={site:?} perm={perm:?}"),
                        });
                    }
                }
            }
        }
    }
    out
}

/// A single Reidemeister move to apply to a diagram.
#[derive(Debug, Clone)]
pub enum RMove {
    R1Insert { gap: usize, sign: Sign, head_first: bool },
    R1Delete { arrow: usize },
    R2Insert { gaps: (usize, usize), pattern: R2Pattern, heads_on_first: bool, sign: Sign },
    R2Delete { arrows: (usize, usize) },
    R3 { arrows: [usize; 3] },
}

pub(crate) fn adjacent(d: &Diagram, x: usize, y: usize) -> bool {
    let m = d.endpoints();
    if y == x + 1 {
        return true;
    }
    d.skeleton() == Skeleton::Circle && x == m - 1 && y == 0 && m > 2
}

fn delete_arcs(d: &Diagram, remove: &[usize]) -> Diagram {
    let mut mask = (1u64 << d.arc_count()) - 1;
    for &k in remove {
        mask &= !(1 << k);
    }
    d.restrict(mask)
}

/// Applies `mv` to a solid Gauss diagram, validating its preconditions.
pub fn apply(d: &Diagram, mv: &RMove) -> Result<Diagram> {
    if !d.directed() || !d.all_solid() || !(d.is_signed() || d.arc_count() == 0) {
        return Err(Error::MovePrecondition("moves apply to solid signed Gauss diagrams".into()));
    }
    match *mv {
        RMove::R1Insert { gap, sign, head_first } => {
            if gap >= gap_count(d) {
                return Err(Error::MovePrecondition(format!("gap {gap} out of range")));
            }
            let (old_map, slots) = insert_points(d.endpoints(), &[(gap, 2)]);
            let (p1, p2) = (slots[0][0], slots[0][1]);
            let (tail, head) = if head_first { (p2, p1) } else { (p1, p2) };
            Ok(rebuild(d, &old_map, vec![Arc::arrow(tail, head, sign, Style::Solid)]))
        }
        RMove::R1Delete { arrow } => {
            let arc = d
                .arcs()
                .get(arrow)
                .ok_or_else(|| Error::MovePrecondition(format!("arrow {arrow} out of range")))?;
            let (x, y) = (arc.a.min(arc.b), arc.a.max(arc.b));
            if !adjacent(d, x, y) && !adjacent(d, y, x) {
                return Err(Error::MovePrecondition(format!(
                    "arrow {arrow} is not isolated (endpoints {x},{y})"
                )));
            }
            Ok(delete_arcs(d, &[arrow]))
        }
        RMove::R2Insert { gaps, pattern, heads_on_first, sign } => {
            let (g1, g2) = gaps;
            if g1 >= gap_count(d) || g2 >= gap_count(d) {
                return Err(Error::MovePrecondition("gap out of range".into()));
            }
            let (lo, hi) = (g1.min(g2), g1.max(g2));
            let (old_map, slots) = if lo == hi {
                let (m, s) = insert_points(d.endpoints(), &[(lo, 4)]);
                (m, vec![vec![s[0][0], s[0][1]], vec![s[0][2], s[0][3]]])
            } else {
                let (m, s) = insert_points(d.endpoints(), &[(lo, 2), (hi, 2)]);
                (m, s)
            };
            let (u1, u2) = (slots[0][0], slots[0][1]);
            let (v1, v2) = (slots[1][0], slots[1][1]);
            let pairs = match pattern {
                R2Pattern::Crossed => [(u1, v1), (u2, v2)],
                R2Pattern::Nested => [(u1, v2), (u2, v1)],
            };
            let mut arcs = Vec::with_capacity(2);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                let s = if i == 0 { sign } else { sign.flip() };
                let (tail, head) = if heads_on_first { (v, u) } else { (u, v) };
                arcs.push(Arc::arrow(tail, head, s, Style::Solid));
            }
            Ok(rebuild(d, &old_map, arcs))
        }
        RMove::R2Delete { arrows } => {
            let (k1, k2) = arrows;
            let (a1, a2) = match (d.arcs().get(k1), d.arcs().get(k2)) {
                (Some(x), Some(y)) if k1 != k2 => (*x, *y),
                _ => return Err(Error::MovePrecondition("bad arrow indices".into())),
            };
            if a1.sign == a2.sign {
                return Err(Error::MovePrecondition("R2 pair must have opposite signs".into()));
            }
            let mut sorted = [a1.a, a1.b, a2.a, a2.b];
            sorted.sort_unstable();
            let splits = [
                [(sorted[0], sorted[1]), (sorted[2], sorted[3])],
                [(sorted[0], sorted[2]), (sorted[1], sorted[3])],
                [(sorted[0], sorted[3]), (sorted[1], sorted[2])],
            ];
            let mut ok = false;
            for split in splits {
                let [(p1, p2), (q1, q2)] = split;
                let adj = (adjacent(d, p1, p2) || adjacent(d, p2, p1))
                    && (adjacent(d, q1, q2) || adjacent(d, q2, q1));
                if !adj {
                    continue;
                }
                let in_p = |e: usize| e == p1 || e == p2;
                if in_p(a1.a) != in_p(a1.b)
                    && in_p(a2.a) != in_p(a2.b)
                    && in_p(a1.b) == in_p(a2.b)
                {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(Error::MovePrecondition(
                    "arrows do not form an interleaved opposite-sign R2 pair".into(),
                ));
            }
            Ok(delete_arcs(d, &[k1, k2]))
        }
        RMove::R3 { arrows } => apply_r3(d, arrows),
    }
}

fn apply_r3(d: &Diagram, arrows: [usize; 3]) -> Result<Diagram> {
    let n = d.arc_count();
    let [k0, k1, k2] = arrows;
    if k0 >= n || k1 >= n || k2 >= n || k0 == k1 || k1 == k2 || k0 == k2 {
        return Err(Error::MovePrecondition("bad arrow triple".into()));
    }
    let triple = [d.arcs()[k0], d.arcs()[k1], d.arcs()[k2]];
    let mut eps: Vec<usize> = triple.iter().flat_map(|a| [a.a, a.b]).collect();
    eps.sort_unstable();

    let partitions = adjacent_pair_partitions(d, &eps);
    if partitions.is_empty() {
        return Err(Error::MovePrecondition("endpoints do not form three adjacent pairs".into()));
    }
    let templates = r3_templates();
    for pairs in partitions {
        for assign in permutations() {
            // slots[l] = the position pair assigned to template line l, in
            // traversal order
            let mut slots = [[0usize; 2]; 3];
            for (pair_idx, &line) in assign.iter().enumerate() {
                slots[line] = [pairs[pair_idx].0, pairs[pair_idx].1];
            }
            let line_of =
                |e: usize| -> Option<usize> { (0..3).find(|&l| slots[l][0] == e || slots[l][1] == e) };
            let mut sign = [None::<Sign>; 3];
            let mut head = [usize::MAX; 3];
            let mut order = [[usize::MAX; 2]; 3];
            let mut valid = true;
            for arc in &triple {
                let (lt, lh) = match (line_of(arc.a), line_of(arc.b)) {
                    (Some(x), Some(y)) if x != y => (x, y),
                    _ => {
                        valid = false;
                        break;
                    }
                };
                let p = pair_index(lt, lh);
                if sign[p].is_some() {
                    valid = false;
                    break;
                }
                sign[p] = arc.sign;
                head[p] = lh;
                for (line, e, other) in [(lt, arc.a, lh), (lh, arc.b, lt)] {
                    let slot = if slots[line][0] == e { 0 } else { 1 };
                    order[line][slot] = other;
                }
            }
            if !valid || sign.iter().any(|s| s.is_none()) {
                continue;
            }
            let config = R3Template {
                order,
                sign: [sign[0].unwrap(), sign[1].unwrap(), sign[2].unwrap()],
                head,
            };
            if templates.contains(&config) {
                let mut perm: Vec<usize> = (0..d.endpoints()).collect();
                for s in &slots {
                    perm[s[0]] = s[1];
                    perm[s[1]] = s[0];
                }
                let arcs = d
                    .arcs()
                    .iter()
                    .map(|a| Arc { a: perm[a.a], b: perm[a.b], sign: a.sign, style: a.style })
                    .collect();
                return Ok(Diagram::new(d.skeleton(), true, arcs).expect("R3 keeps validity"));
            }
        }
    }
    Err(Error::MovePrecondition(
        "arrow triple does not match any admissible R3 configuration".into(),
    ))
}

/// Ways to split the six sorted endpoint positions into three
/// skeleton-adjacent pairs, each pair in traversal order.
fn adjacent_pair_partitions(d: &Diagram, eps: &[usize]) -> Vec<[(usize, usize); 3]> {
    fn go(
        d: &Diagram,
        remaining: Vec<usize>,
        acc: &mut Vec<(usize, usize)>,
        out: &mut Vec<[(usize, usize); 3]>,
    ) {
        if remaining.is_empty() {
            out.push([acc[0], acc[1], acc[2]]);
            return;
        }
        let x = remaining[0];
        for i in 1..remaining.len() {
            let y = remaining[i];
            let pair = if adjacent(d, x, y) {
                Some((x, y))
            } else if adjacent(d, y, x) {
                Some((y, x))
            } else {
                None
            };
            if let Some(p) = pair {
                let mut rest = remaining.clone();
                rest.remove(i);
                rest.remove(0);
                acc.push(p);
                go(d, rest, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(d, eps.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Every move applicable to `d`, in a deterministic order. Useful for
/// randomized invariance sweeps.
pub fn applicable_moves(d: &Diagram) -> Vec<RMove> {
    let mut out = Vec::new();
    for gap in 0..gap_count(d) {
        for sign in [Sign::Plus, Sign::Minus] {
            for head_first in [false, true] {
                out.push(RMove::R1Insert { gap, sign, head_first });
            }
        }
    }
    for gap1 in 0..gap_count(d) {
        for gap2 in gap1..gap_count(d) {
            for pattern in [R2Pattern::Crossed, R2Pattern::Nested] {
                for heads_on_first in [true, false] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        out.push(RMove::R2Insert { gaps: (gap1, gap2), pattern, heads_on_first, sign });
                    }
                }
            }
        }
    }
    for k in 0..d.arc_count() {
        if apply(d, &RMove::R1Delete { arrow: k }).is_ok() {
            out.push(RMove::R1Delete { arrow: k });
        }
    }
    for k1 in 0..d.arc_count() {
        for k2 in k1 + 1..d.arc_count() {
            if apply(d, &RMove::R2Delete { arrows: (k1, k2) }).is_ok() {
                out.push(RMove::R2Delete { arrows: (k1, k2) });
            }
        }
    }
    for k0 in 0..d.arc_count() {
        for k1 in k0 + 1..d.arc_count() {
            for k2 in k1 + 1..d.arc_count() {
                if apply(d, &RMove::R3 { arrows: [k0, k1, k2] }).is_ok() {
                    out.push(RMove::R3 { arrows: [k0, k1, k2] });
                }
            }
        }
    }
    out
}
