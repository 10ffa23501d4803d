//! Sparse rational linear combinations of canonical diagrams.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigRational, Signed, Zero};

use crate::diagram::{CanonicalKey, Diagram, Flavor, Sign, Skeleton, Style};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// A finitely supported rational vector over canonical diagram keys, all of
/// one flavor and skeleton. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSum {
    flavor: Flavor,
    skeleton: Skeleton,
    terms: BTreeMap<CanonicalKey, Rational>,
}

impl FormalSum {
    pub fn zero(skeleton: Skeleton, flavor: Flavor) -> FormalSum {
        FormalSum { flavor, skeleton, terms: BTreeMap::new() }
    }

    /// A single canonical diagram with coefficient 1.
    pub fn generator(d: &Diagram) -> FormalSum {
        let mut s = FormalSum::zero(d.skeleton(), d.flavor());
        s.add_diagram(d, rat(1));
        s
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn skeleton(&self) -> Skeleton {
        self.skeleton
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalKey, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &CanonicalKey) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn keys(&self) -> impl Iterator<Item = &CanonicalKey> {
        self.terms.keys()
    }

    fn check_key(&self, key: &CanonicalKey) -> Result<()> {
        if key.skeleton() != self.skeleton {
            return Err(Error::SkeletonMismatch {
                expected: self.skeleton.to_string(),
                got: key.skeleton().to_string(),
            });
        }
        // the empty diagram is shared between the signed and unsigned
        // flavor of each directedness, so only directedness can disagree
        let kf = key.flavor();
        if kf != self.flavor && !(key.arc_count() == 0 && kf.directed() == self.flavor.directed()) {
            return Err(Error::FlavorMismatch {
                expected: self.flavor.to_string(),
                got: kf.to_string(),
            });
        }
        Ok(())
    }

    pub fn add_key(&mut self, key: CanonicalKey, c: Rational) -> Result<()> {
        self.check_key(&key)?;
        if c.is_zero() {
            return Ok(());
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
        Ok(())
    }

    /// Canonicalizes `d` and adds it with coefficient `c`.
    pub fn add_diagram(&mut self, d: &Diagram, c: Rational) {
        let key = d.canonical_key();
        self.add_key(key, c).expect("diagram flavor/skeleton matches the sum");
    }

    pub fn add(&self, other: &FormalSum) -> Result<FormalSum> {
        if other.flavor != self.flavor || other.skeleton != self.skeleton {
            return Err(Error::FlavorMismatch {
                expected: format!("{}/{}", self.skeleton, self.flavor),
                got: format!("{}/{}", other.skeleton, other.flavor),
            });
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_key(k.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormalSum) -> Result<FormalSum> {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, c: &Rational) -> FormalSum {
        if c.is_zero() {
            return FormalSum::zero(self.skeleton, self.flavor);
        }
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect();
        FormalSum { flavor: self.flavor, skeleton: self.skeleton, terms }
    }

    /// Scales so the coefficient of the least key is 1; the zero sum is
    /// returned unchanged.
    pub fn normalized(&self) -> FormalSum {
        match self.terms.values().next() {
            None => self.clone(),
            Some(lead) => self.scale(&(Rational::from_integer(1.into()) / lead)),
        }
    }

    /// Keeps only the terms whose diagrams have exactly `degree` arcs.
    pub fn homogeneous_part(&self, degree: usize) -> FormalSum {
        let terms =
            self.terms.iter().filter(|(k, _)| k.arc_count() == degree).map(|(k, v)| (k.clone(), v.clone())).collect();
        FormalSum { flavor: self.flavor, skeleton: self.skeleton, terms }
    }

    /// Drops every term with more than `order` arcs.
    pub fn truncate(&self, order: usize) -> FormalSum {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.arc_count() <= order)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        FormalSum { flavor: self.flavor, skeleton: self.skeleton, terms }
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.arc_count()).max()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.arc_count()).min()
    }

    /// Direction-forgetting map, lifted term by term.
    pub fn bar(&self) -> FormalSum {
        let flavor =
            if self.flavor.signed() { Flavor::ChordSigned } else { Flavor::ChordUnsigned };
        let mut out = FormalSum::zero(self.skeleton, flavor);
        for (k, c) in &self.terms {
            out.add_diagram(&k.decode().bar(), c.clone());
        }
        out
    }

    /// Sign-forgetting map: each signed diagram `F` maps to
    /// `(-1)^{m(F)} |F|` where `m(F)` counts its minus signs.
    pub fn xi(&self) -> Result<FormalSum> {
        if !self.flavor.signed() {
            return Err(Error::UnsupportedFlavor(format!(
                "xi is defined on signed diagrams, got {}",
                self.flavor
            )));
        }
        let flavor =
            if self.flavor.directed() { Flavor::ArrowUnsigned } else { Flavor::ChordUnsigned };
        let mut out = FormalSum::zero(self.skeleton, flavor);
        for (k, c) in &self.terms {
            let (parity, unsigned) = k.decode().strip_signs();
            let coeff = match parity {
                Sign::Plus => c.clone(),
                Sign::Minus => -c.clone(),
            };
            out.add_diagram(&unsigned.with_style(Style::Solid), coeff);
        }
        Ok(out)
    }
}

/// The average map: an unsigned chord diagram goes to the sum of its `2^n`
/// arrow orientations, each with coefficient 1 (merged under canonical
/// keys).
pub fn average(chord: &Diagram) -> Result<FormalSum> {
    if chord.directed() {
        return Err(Error::UnsupportedFlavor("average expects a chord diagram".into()));
    }
    if chord.is_signed() && chord.arc_count() > 0 {
        return Err(Error::UnsupportedFlavor("average expects an unsigned chord diagram".into()));
    }
    let n = chord.arc_count();
    let mut out = FormalSum::zero(chord.skeleton(), Flavor::ArrowUnsigned);
    for mask in 0u64..1 << n {
        let arcs = chord
            .arcs()
            .iter()
            .enumerate()
            .map(|(i, arc)| {
                let (t, h) = if mask >> i & 1 == 1 { (arc.b, arc.a) } else { (arc.a, arc.b) };
                crate::diagram::Arc { a: t, b: h, sign: None, style: Style::Solid }
            })
            .collect();
        let d = Diagram::new(chord.skeleton(), true, arcs).expect("orientation is well-formed");
        out.add_diagram(&d, rat(1));
    }
    Ok(out)
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
                if c.is_negative() {
                    write!(f, "- ")?;
                } else {
                    write!(f, "+ ")?;
                }
                write!(f, "{}·[{}]", c.abs(), k)?;
            } else {
                write!(f, "{}·[{}]", c, k)?;
            }
        }
        Ok(())
    }
}
