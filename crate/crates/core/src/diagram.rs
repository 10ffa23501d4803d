//! Gauss, arrow and chord diagrams on circle and line skeletons, together
//! with their canonical forms under rotation.
//!
//! A diagram with `n` arcs places its `2n` endpoints at the positions
//! `0..2n-1`, read along the skeleton. Directed diagrams (arrow diagrams,
//! Gauss diagrams) orient each arc tail-to-head, where the head marks the
//! underpass occurrence of the crossing. Undirected diagrams are chord
//! diagrams. Signs are optional so that the unsigned arrow and chord spaces
//! share the same machinery; styles distinguish solid arrows (classical
//! crossings) from dashed ones (semivirtual crossings).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The underlying 1-manifold the endpoints live on.
///
/// A circle admits rotations of its endpoint labels; a line admits no
/// symmetry at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Skeleton {
    Circle,
    Line,
}

impl Skeleton {
    pub fn tag(self) -> u8 {
        match self {
            Skeleton::Circle => b'c',
            Skeleton::Line => b'l',
        }
    }
}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Skeleton::Circle => write!(f, "circle"),
            Skeleton::Line => write!(f, "line"),
        }
    }
}

/// Crossing sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// Solid arrows are classical crossings, dashed arrows semivirtual ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Style {
    Solid,
    Dashed,
}

/// One of the four diagram spaces the engine works over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "arrow-signed")]
    ArrowSigned,
    #[serde(rename = "arrow-unsigned")]
    ArrowUnsigned,
    #[serde(rename = "chord-signed")]
    ChordSigned,
    #[serde(rename = "chord-unsigned")]
    ChordUnsigned,
}

impl Flavor {
    pub fn directed(self) -> bool {
        matches!(self, Flavor::ArrowSigned | Flavor::ArrowUnsigned)
    }

    pub fn signed(self) -> bool {
        matches!(self, Flavor::ArrowSigned | Flavor::ChordSigned)
    }

    pub fn tag(self) -> u8 {
        match self {
            Flavor::ArrowSigned => 0,
            Flavor::ArrowUnsigned => 1,
            Flavor::ChordSigned => 2,
            Flavor::ChordUnsigned => 3,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Flavor::ArrowSigned => "as",
            Flavor::ArrowUnsigned => "au",
            Flavor::ChordSigned => "cs",
            Flavor::ChordUnsigned => "cu",
        }
    }

    pub fn from_short(s: &str) -> Option<Flavor> {
        match s {
            "as" => Some(Flavor::ArrowSigned),
            "au" => Some(Flavor::ArrowUnsigned),
            "cs" => Some(Flavor::ChordSigned),
            "cu" => Some(Flavor::ChordUnsigned),
            _ => None,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Flavor::ArrowSigned => "arrow-signed",
            Flavor::ArrowUnsigned => "arrow-unsigned",
            Flavor::ChordSigned => "chord-signed",
            Flavor::ChordUnsigned => "chord-unsigned",
        };
        write!(f, "{s}")
    }
}

/// A single arc. In a directed diagram `a` is the tail and `b` the head;
/// in an undirected one the pair is stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub a: usize,
    pub b: usize,
    pub sign: Option<Sign>,
    pub style: Style,
}

impl Arc {
    pub fn arrow(tail: usize, head: usize, sign: Sign, style: Style) -> Arc {
        Arc { a: tail, b: head, sign: Some(sign), style }
    }

    pub fn chord(a: usize, b: usize, sign: Option<Sign>) -> Arc {
        Arc { a: a.min(b), b: a.max(b), sign, style: Style::Solid }
    }
}

/// A diagram: `n` arcs on `2n` skeleton positions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagram {
    skeleton: Skeleton,
    directed: bool,
    arcs: Vec<Arc>,
}

impl Diagram {
    /// Validates and normalizes the arc list. Endpoints must be exactly
    /// `0..2n-1`, each used once; undirected arcs are stored `a < b` and
    /// forced solid; signedness must be uniform across the diagram.
    pub fn new(skeleton: Skeleton, directed: bool, mut arcs: Vec<Arc>) -> Result<Diagram> {
        let n = arcs.len();
        let mut seen = vec![false; 2 * n];
        for arc in &arcs {
            if arc.a == arc.b {
                return Err(Error::BadEndpoint {
                    index: arc.a,
                    reason: "arc endpoints coincide".into(),
                });
            }
            for e in [arc.a, arc.b] {
                if e >= 2 * n {
                    return Err(Error::BadEndpoint {
                        index: e,
                        reason: format!("out of range for {n} arcs"),
                    });
                }
                if seen[e] {
                    return Err(Error::BadEndpoint { index: e, reason: "used twice".into() });
                }
                seen[e] = true;
            }
        }
        if let Some(first) = arcs.first() {
            let signed = first.sign.is_some();
            if arcs.iter().any(|a| a.sign.is_some() != signed) {
                return Err(Error::InvalidDiagram(
                    "signed and unsigned arcs mixed in one diagram".into(),
                ));
            }
        }
        if !directed {
            for arc in &mut arcs {
                if arc.a > arc.b {
                    std::mem::swap(&mut arc.a, &mut arc.b);
                }
                arc.style = Style::Solid;
            }
        }
        arcs.sort_by_key(|a| a.a.min(a.b));
        Ok(Diagram { skeleton, directed, arcs })
    }

    pub fn empty(skeleton: Skeleton, directed: bool) -> Diagram {
        Diagram { skeleton, directed, arcs: Vec::new() }
    }

    pub fn skeleton(&self) -> Skeleton {
        self.skeleton
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn endpoints(&self) -> usize {
        2 * self.arcs.len()
    }

    pub fn is_signed(&self) -> bool {
        self.arcs.iter().all(|a| a.sign.is_some())
    }

    pub fn flavor(&self) -> Flavor {
        match (self.directed, self.arcs.is_empty() || self.is_signed()) {
            (true, true) => Flavor::ArrowSigned,
            (true, false) => Flavor::ArrowUnsigned,
            (false, true) => Flavor::ChordSigned,
            (false, false) => Flavor::ChordUnsigned,
        }
    }

    /// The flavor the diagram has when regarded as a generator of one of
    /// the ambient spaces; the empty diagram is ambiguous, so the caller
    /// states the intent.
    pub fn flavor_as(&self, flavor: Flavor) -> Result<()> {
        if self.arcs.is_empty() {
            if self.directed == flavor.directed() {
                return Ok(());
            }
        } else if self.flavor() == flavor {
            return Ok(());
        }
        Err(Error::FlavorMismatch { expected: flavor.to_string(), got: self.flavor().to_string() })
    }

    pub fn all_solid(&self) -> bool {
        self.arcs.iter().all(|a| a.style == Style::Solid)
    }

    pub fn all_dashed(&self) -> bool {
        self.arcs.iter().all(|a| a.style == Style::Dashed)
    }

    /// Same diagram with every arc drawn in the given style.
    pub fn with_style(&self, style: Style) -> Diagram {
        let mut d = self.clone();
        for arc in &mut d.arcs {
            arc.style = style;
        }
        d
    }

    /// Drops all signs, returning the unsigned diagram and the parity sign
    /// `(-1)^m` where `m` counts minus-signed arcs.
    pub fn strip_signs(&self) -> (Sign, Diagram) {
        let minus = self.arcs.iter().filter(|a| a.sign == Some(Sign::Minus)).count();
        let mut d = self.clone();
        for arc in &mut d.arcs {
            arc.sign = None;
        }
        let parity = if minus % 2 == 0 { Sign::Plus } else { Sign::Minus };
        (parity, d)
    }

    /// Forgets arrow directions, keeping signs: the chord diagram underlying
    /// an arrow diagram.
    pub fn bar(&self) -> Diagram {
        let arcs = self.arcs.iter().map(|a| Arc::chord(a.a, a.b, a.sign)).collect();
        Diagram { skeleton: self.skeleton, directed: false, arcs }
    }

    /// Reverses arc `k` (head and tail swap; sign and style kept).
    pub fn reverse_arrow(&self, k: usize) -> Result<Diagram> {
        if !self.directed {
            return Err(Error::InvalidDiagram("reverse_arrow on an undirected diagram".into()));
        }
        if k >= self.arcs.len() {
            return Err(Error::InvalidDiagram(format!(
                "arrow index {k} out of range ({} arrows)",
                self.arcs.len()
            )));
        }
        let mut d = self.clone();
        let arc = &mut d.arcs[k];
        std::mem::swap(&mut arc.a, &mut arc.b);
        d.arcs.sort_by_key(|a| a.a.min(a.b));
        Ok(d)
    }

    /// The sub-diagram spanned by the arcs selected by `mask`, endpoints
    /// recompacted to `0..2m-1` in the induced order.
    pub fn restrict(&self, mask: u64) -> Diagram {
        let kept: Vec<&Arc> =
            self.arcs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, a)| a).collect();
        let mut old_positions: Vec<usize> = kept.iter().flat_map(|a| [a.a, a.b]).collect();
        old_positions.sort_unstable();
        let renum = |e: usize| old_positions.binary_search(&e).unwrap();
        let arcs = kept
            .iter()
            .map(|a| Arc { a: renum(a.a), b: renum(a.b), sign: a.sign, style: a.style })
            .collect();
        Diagram { skeleton: self.skeleton, directed: self.directed, arcs }
    }

    /// All `2^n` sub-diagrams, in mask order.
    pub fn subdiagrams(&self) -> impl Iterator<Item = Diagram> + '_ {
        let n = self.arcs.len();
        assert!(n < 64, "diagram too large for subdiagram masks");
        (0u64..1 << n).map(move |mask| self.restrict(mask))
    }

    /// Shifts every endpoint by `r` steps along the circle (identity on a
    /// line skeleton).
    pub fn rotate(&self, r: usize) -> Diagram {
        if self.skeleton == Skeleton::Line || self.arcs.is_empty() {
            return self.clone();
        }
        let m = self.endpoints();
        let shift = |e: usize| (e + r) % m;
        let mut arcs: Vec<Arc> = self
            .arcs
            .iter()
            .map(|a| {
                let mut arc = Arc { a: shift(a.a), b: shift(a.b), sign: a.sign, style: a.style };
                if !self.directed && arc.a > arc.b {
                    std::mem::swap(&mut arc.a, &mut arc.b);
                }
                arc
            })
            .collect();
        arcs.sort_by_key(|a| a.a.min(a.b));
        Diagram { skeleton: self.skeleton, directed: self.directed, arcs }
    }

    /// Raw byte encoding of the diagram as labeled, without any symmetry
    /// reduction. Two diagrams get equal encodings iff they are equal.
    pub fn encode(&self) -> Vec<u8> {
        let n = self.arcs.len();
        let mut partner = vec![0u8; 2 * n];
        let mut attr = vec![0u8; 2 * n];
        for arc in &self.arcs {
            partner[arc.a] = arc.b as u8;
            partner[arc.b] = arc.a as u8;
            let sign_code = match arc.sign {
                None => 0u8,
                Some(Sign::Plus) => 1,
                Some(Sign::Minus) => 2,
            };
            let style_code = if arc.style == Style::Dashed { 1u8 } else { 0 };
            // bit0: this endpoint is the head of a directed arc
            let base = (sign_code << 1) | (style_code << 3);
            attr[arc.a] = base;
            attr[arc.b] = base | u8::from(self.directed);
        }
        let mut out = Vec::with_capacity(3 + 4 * n);
        out.push(self.skeleton.tag());
        out.push(self.flavor().tag());
        out.push(n as u8);
        for e in 0..2 * n {
            out.push(partner[e]);
            out.push(attr[e]);
        }
        out
    }

    /// Canonical form under orientation-preserving rotation: the rotation
    /// whose encoding is lexicographically least, together with its key and
    /// the offset that achieves it.
    pub fn canonical(&self) -> Canonical {
        if self.skeleton == Skeleton::Line || self.arcs.is_empty() {
            let key = CanonicalKey(self.encode());
            return Canonical { diagram: self.clone(), key, rotation: 0 };
        }
        let mut best = self.clone();
        let mut best_bytes = self.encode();
        let mut best_rot = 0;
        for r in 1..self.endpoints() {
            let cand = self.rotate(r);
            let bytes = cand.encode();
            if bytes < best_bytes {
                best = cand;
                best_bytes = bytes;
                best_rot = r;
            }
        }
        Canonical { diagram: best, key: CanonicalKey(best_bytes), rotation: best_rot }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        self.canonical().key
    }
}

/// Result of canonicalization: the representative diagram, its key, and the
/// rotation offset that was applied (always 0 on a line).
#[derive(Debug, Clone)]
pub struct Canonical {
    pub diagram: Diagram,
    pub key: CanonicalKey,
    pub rotation: usize,
}

/// Byte-string key identifying a diagram up to rotation. Keys order
/// first by skeleton, then flavor, then arc count, then the rotated
/// encoding itself; this ordering fixes ambient column order everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn skeleton(&self) -> Skeleton {
        if self.0[0] == b'c' {
            Skeleton::Circle
        } else {
            Skeleton::Line
        }
    }

    pub fn flavor(&self) -> Flavor {
        match self.0[1] {
            0 => Flavor::ArrowSigned,
            1 => Flavor::ArrowUnsigned,
            2 => Flavor::ChordSigned,
            _ => Flavor::ChordUnsigned,
        }
    }

    pub fn arc_count(&self) -> usize {
        self.0[2] as usize
    }

    /// Reconstructs the canonical diagram the key encodes.
    pub fn decode(&self) -> Diagram {
        let n = self.arc_count();
        let flavor = self.flavor();
        let mut arcs = Vec::with_capacity(n);
        let mut visited = vec![false; 2 * n];
        for e in 0..2 * n {
            if visited[e] {
                continue;
            }
            let partner = self.0[3 + 2 * e] as usize;
            visited[e] = true;
            visited[partner] = true;
            let attr_e = self.0[3 + 2 * e + 1];
            let attr_p = self.0[3 + 2 * partner + 1];
            let sign = match (attr_e >> 1) & 0b11 {
                0 => None,
                1 => Some(Sign::Plus),
                _ => Some(Sign::Minus),
            };
            let style = if (attr_e >> 3) & 1 == 1 { Style::Dashed } else { Style::Solid };
            let (a, b) = if flavor.directed() {
                // head bit distinguishes tail from head
                if attr_p & 1 == 1 {
                    (e, partner)
                } else {
                    (partner, e)
                }
            } else {
                (e, partner)
            };
            arcs.push(Arc { a, b, sign, style });
        }
        arcs.sort_by_key(|a| a.a.min(a.b));
        Diagram { skeleton: self.skeleton(), directed: flavor.directed(), arcs }
    }

    /// Uniform style of the arcs, if there is one (chord keys report Solid).
    pub fn uniform_style(&self) -> Option<Style> {
        let d = self.decode();
        if d.all_solid() {
            Some(Style::Solid)
        } else if d.all_dashed() {
            Some(Style::Dashed)
        } else {
            None
        }
    }
}

impl fmt::Display for CanonicalKey {
    /// Text form, e.g. `c:as:0>2+s,1>3-d` or `l:cu:0-1,2-3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.decode();
        let flavor = self.flavor();
        write!(f, "{}:{}:", self.0[0] as char, flavor.short())?;
        for (i, arc) in d.arcs().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if flavor.directed() {
                write!(f, "{}>{}", arc.a, arc.b)?;
            } else {
                write!(f, "{}-{}", arc.a, arc.b)?;
            }
            if let Some(sign) = arc.sign {
                write!(f, "{}", if sign == Sign::Plus { '+' } else { '-' })?;
            }
            if flavor == Flavor::ArrowSigned {
                write!(f, "{}", if arc.style == Style::Dashed { 'd' } else { 's' })?;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for CanonicalKey {
    type Err = Error;

    /// Parses the text form and validates that it names a canonical
    /// representative.
    fn from_str(s: &str) -> Result<CanonicalKey> {
        let err = |m: &str| Error::Schema { pointer: String::new(), message: m.to_string() };
        let mut parts = s.splitn(3, ':');
        let skel = match parts.next() {
            Some("c") => Skeleton::Circle,
            Some("l") => Skeleton::Line,
            _ => return Err(err("key must start with 'c:' or 'l:'")),
        };
        let flavor = parts
            .next()
            .and_then(Flavor::from_short)
            .ok_or_else(|| err("unknown flavor tag in key"))?;
        let body = parts.next().ok_or_else(|| err("missing arc list in key"))?;
        let mut arcs = Vec::new();
        if !body.is_empty() {
            for piece in body.split(',') {
                let sep = if flavor.directed() { '>' } else { '-' };
                // '-' may also begin a sign, so split on the first separator only
                let sep_pos =
                    piece.find(sep).ok_or_else(|| err("arc is missing its separator"))?;
                let a: usize =
                    piece[..sep_pos].parse().map_err(|_| err("bad endpoint number"))?;
                let rest = &piece[sep_pos + 1..];
                let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
                if digits.is_empty() {
                    return Err(err("bad endpoint number"));
                }
                let b: usize = digits.parse().map_err(|_| err("bad endpoint number"))?;
                let mut tail = rest[digits.len()..].chars();
                let mut sign = None;
                let mut style = Style::Solid;
                if flavor.signed() {
                    sign = match tail.next() {
                        Some('+') => Some(Sign::Plus),
                        Some('-') => Some(Sign::Minus),
                        _ => return Err(err("missing sign on signed arc")),
                    };
                }
                if flavor == Flavor::ArrowSigned {
                    style = match tail.next() {
                        Some('s') => Style::Solid,
                        Some('d') => Style::Dashed,
                        _ => return Err(err("missing style on arrow-signed arc")),
                    };
                }
                if tail.next().is_some() {
                    return Err(err("trailing characters after arc"));
                }
                arcs.push(Arc { a, b, sign, style });
            }
        }
        let d = Diagram::new(skel, flavor.directed(), arcs)
            .map_err(|e| err(&format!("invalid diagram in key: {e}")))?;
        d.flavor_as(flavor).map_err(|e| err(&format!("{e}")))?;
        let canonical = d.canonical();
        if canonical.diagram != d {
            return Err(err("key does not name a canonical representative"));
        }
        Ok(canonical.key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(skel: Skeleton, arrows: &[(usize, usize, Sign)]) -> Diagram {
        Diagram::new(
            skel,
            true,
            arrows.iter().map(|&(t, h, s)| Arc::arrow(t, h, s, Style::Solid)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_arrow_circle_rotation_orbit() {
        let d1 = gauss(Skeleton::Circle, &[(0, 1, Sign::Plus)]);
        let d2 = gauss(Skeleton::Circle, &[(1, 0, Sign::Plus)]);
        assert_eq!(d1.canonical_key(), d2.canonical_key());
    }

    #[test]
    fn line_diagrams_have_no_symmetry() {
        let d1 = gauss(Skeleton::Line, &[(0, 1, Sign::Plus)]);
        let d2 = gauss(Skeleton::Line, &[(1, 0, Sign::Plus)]);
        assert_ne!(d1.canonical_key(), d2.canonical_key());
        let c = d1.canonical();
        assert_eq!(c.rotation, 0);
        assert_eq!(c.diagram, d1);
    }

    #[test]
    fn canonical_is_idempotent_and_rotation_invariant() {
        let d = gauss(
            Skeleton::Circle,
            &[(0, 4, Sign::Plus), (1, 6, Sign::Minus), (2, 5, Sign::Plus), (7, 3, Sign::Minus)],
        );
        let c = d.canonical();
        assert_eq!(c.diagram.canonical().key, c.key);
        for r in 0..8 {
            assert_eq!(d.rotate(r).canonical_key(), c.key, "rotation {r}");
        }
        // oracle: the canonical encoding is the minimum over the whole orbit
        let orbit_min =
            (0..8).map(|r| d.rotate(r).encode()).min().unwrap();
        assert_eq!(c.key.bytes(), &orbit_min[..]);
    }

    #[test]
    fn subdiagram_count_is_two_to_the_n() {
        let d = gauss(
            Skeleton::Circle,
            &[(0, 2, Sign::Plus), (1, 4, Sign::Minus), (3, 5, Sign::Plus)],
        );
        let subs: Vec<_> = d.subdiagrams().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().any(|s| s.arc_count() == 0));
        assert!(subs.iter().any(|s| s == &d));
        let empty = Diagram::empty(Skeleton::Circle, true);
        assert_eq!(empty.subdiagrams().count(), 1);
    }

    #[test]
    fn restrict_recompacts_endpoints() {
        let d = gauss(Skeleton::Line, &[(0, 3, Sign::Plus), (1, 2, Sign::Minus)]);
        let sub = d.restrict(0b01);
        assert_eq!(sub.arcs(), &[Arc::arrow(0, 1, Sign::Plus, Style::Solid)]);
        let sub = d.restrict(0b10);
        assert_eq!(sub.arcs(), &[Arc::arrow(0, 1, Sign::Minus, Style::Solid)]);
    }

    #[test]
    fn reverse_arrow_is_an_involution_preserving_signs() {
        let d = gauss(
            Skeleton::Circle,
            &[(0, 2, Sign::Plus), (1, 4, Sign::Minus), (3, 5, Sign::Plus)],
        );
        for k in 0..3 {
            let r = d.reverse_arrow(k).unwrap();
            assert_eq!(r.reverse_arrow(k).unwrap(), d);
            let signs = |x: &Diagram| {
                let mut v: Vec<_> = x.arcs().iter().map(|a| a.sign).collect();
                v.sort();
                v
            };
            assert_eq!(signs(&r), signs(&d));
        }
        assert!(d.reverse_arrow(3).is_err());
    }

    #[test]
    fn bar_forgets_directions_only() {
        let d = gauss(Skeleton::Circle, &[(2, 0, Sign::Plus), (1, 3, Sign::Minus)]);
        let b = d.bar();
        assert!(!b.directed());
        assert_eq!(b.arcs()[0], Arc::chord(0, 2, Some(Sign::Plus)));
        // direction-blind: reversing any arrow leaves the bar unchanged
        for k in 0..2 {
            assert_eq!(d.reverse_arrow(k).unwrap().bar(), b);
        }
    }

    #[test]
    fn strip_signs_tracks_parity() {
        let d = gauss(Skeleton::Circle, &[(0, 2, Sign::Minus), (1, 3, Sign::Plus)]);
        let (parity, unsigned) = d.strip_signs();
        assert_eq!(parity, Sign::Minus);
        assert!(unsigned.arcs().iter().all(|a| a.sign.is_none()));
        let (parity2, _) = d.reverse_arrow(0).unwrap().strip_signs();
        assert_eq!(parity2, Sign::Minus);
    }

    #[test]
    fn validation_rejects_malformed_endpoints() {
        let bad = Diagram::new(
            Skeleton::Circle,
            true,
            vec![Arc::arrow(0, 5, Sign::Plus, Style::Solid), Arc::arrow(1, 2, Sign::Plus, Style::Solid)],
        );
        match bad {
            Err(Error::BadEndpoint { index, .. }) => assert_eq!(index, 5),
            other => panic!("expected BadEndpoint, got {other:?}"),
        }
        let dup = Diagram::new(
            Skeleton::Circle,
            true,
            vec![Arc::arrow(0, 1, Sign::Plus, Style::Solid), Arc::arrow(1, 2, Sign::Plus, Style::Solid)],
        );
        assert!(dup.is_err());
    }

    #[test]
    fn key_text_round_trip() {
        let d = gauss(
            Skeleton::Circle,
            &[(0, 4, Sign::Plus), (1, 6, Sign::Minus), (2, 5, Sign::Plus), (7, 3, Sign::Minus)],
        );
        let key = d.canonical_key();
        let text = key.to_string();
        let back: CanonicalKey = text.parse().unwrap();
        assert_eq!(back, key);

        let chord = Diagram::new(
            Skeleton::Line,
            false,
            vec![Arc::chord(0, 2, None), Arc::chord(1, 3, None)],
        )
        .unwrap();
        let key = chord.canonical_key();
        assert_eq!(key.to_string().parse::<CanonicalKey>().unwrap(), key);
    }

    #[test]
    fn key_decode_matches_canonical_diagram() {
        let d = gauss(Skeleton::Circle, &[(0, 2, Sign::Plus), (1, 3, Sign::Minus)]);
        let c = d.canonical();
        assert_eq!(c.key.decode(), c.diagram);
        assert_eq!(c.key.arc_count(), 2);
        assert_eq!(c.key.flavor(), Flavor::ArrowSigned);
    }

    #[test]
    fn dashed_and_solid_diagrams_have_distinct_keys() {
        let solid = gauss(Skeleton::Circle, &[(0, 1, Sign::Plus)]);
        let dashed = solid.with_style(Style::Dashed);
        assert_ne!(solid.canonical_key(), dashed.canonical_key());
        assert_eq!(dashed.canonical_key().uniform_style(), Some(Style::Dashed));
    }
}
