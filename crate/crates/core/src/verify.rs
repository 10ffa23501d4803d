//! Claim-by-claim verification with machine-readable certificates.
//!
//! Each `verify_*` entry point reruns one verified statement at the given
//! order and emits a certificate holding the dimensions, ranks, witness
//! data and cache fingerprints of the run. Certificates are reproducible
//! byte for byte for fixed parameters and version, up to the reported
//! runtime (which the canonical form zeroes out).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::diagram::{Flavor, Skeleton, Style};
use crate::enumerate::{diagrams, Count};
use crate::error::{Error, Result};
use crate::formal_sum::{FormalSum, Rational};
use crate::invariant::{self, InvariantFunctional, Profile};
use crate::json as wire;
use crate::linalg::{row_space, RelationSystem};
use crate::relations::{self, RelationKind};

pub const CERT_SCHEMA: &str = "polyak-lab/cert/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }

    /// Process exit code convention: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counts {
    pub diagrams: usize,
    pub relations: usize,
}

/// Machine-readable record of one verification run.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub schema: String,
    pub claim: String,
    pub params: Value,
    pub status: Status,
    pub dims: BTreeMap<String, i64>,
    pub counts: Counts,
    pub basis: Vec<Value>,
    pub witnesses: Vec<Value>,
    pub runtime_ms: u64,
    pub version: String,
    pub fingerprints: Vec<String>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }

    /// Serialization with the runtime zeroed: the byte-reproducible core.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut c = self.clone();
        c.runtime_ms = 0;
        serde_json::to_vec(&c).expect("certificate serializes")
    }
}

/// Shape check for certificate JSON; reports the pointer of the first
/// missing required field.
pub fn validate_certificate(v: &Value) -> Result<Status> {
    wire::require_fields(
        v,
        &["schema", "claim", "params", "status", "dims", "counts", "basis", "witnesses", "runtime_ms"],
    )?;
    match v.get("status").and_then(Value::as_str) {
        Some("PASS") => Ok(Status::Pass),
        Some("FAIL") => Ok(Status::Fail),
        Some("INCONCLUSIVE") => Ok(Status::Inconclusive),
        _ => Err(Error::Schema { pointer: "/status".into(), message: "unknown status".into() }),
    }
}

/// Ceilings and bounds for verification runs.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Highest order for signed arrow computations.
    pub signed_ceiling: usize,
    /// Highest order for unsigned chord computations.
    pub unsigned_ceiling: usize,
    /// Enumeration ceiling passed through to diagram generation.
    pub enumeration_ceiling: usize,
    /// Crossing bound for virtualization witness search.
    pub witness_bound: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            signed_ceiling: 4,
            unsigned_ceiling: 5,
            enumeration_ceiling: 6,
            witness_bound: 4,
        }
    }
}

pub struct Verifier {
    pub opts: VerifyOptions,
    cache: Cache,
}

impl Verifier {
    pub fn new(opts: VerifyOptions, cache_dir: Option<PathBuf>) -> Verifier {
        let cache = match cache_dir {
            Some(dir) => Cache::at(dir),
            None => Cache::disabled(),
        };
        Verifier { opts, cache }
    }

    pub fn with_cache(opts: VerifyOptions, cache: Cache) -> Verifier {
        Verifier { opts, cache }
    }

    pub fn cache(&self) -> &Cache {
        &self.cache
    }

    fn check_signed(&self, n: usize) -> Result<()> {
        if n > self.opts.signed_ceiling {
            return Err(Error::ResourceLimit { requested: n, ceiling: self.opts.signed_ceiling });
        }
        Ok(())
    }

    fn check_unsigned(&self, n: usize) -> Result<()> {
        if n > self.opts.unsigned_ceiling {
            return Err(Error::ResourceLimit { requested: n, ceiling: self.opts.unsigned_ceiling });
        }
        Ok(())
    }

    /// Cached order-n arrow relation system.
    fn polyak_system(&self, n: usize, skeleton: Skeleton, prints: &mut Vec<String>) -> Result<RelationSystem> {
        self.cached_system("polyak", n, skeleton, Flavor::ArrowSigned, prints, || {
            relations::generate_polyak(n, skeleton, self.opts.enumeration_ceiling)
        })
    }

    /// Cached order-n chord relation system.
    fn chord_system(&self, n: usize, skeleton: Skeleton, prints: &mut Vec<String>) -> Result<RelationSystem> {
        self.cached_system("chord", n, skeleton, Flavor::ChordSigned, prints, || {
            relations::generate_chord_relations(n, skeleton, self.opts.enumeration_ceiling)
        })
    }

    fn cached_system(
        &self,
        kind: &str,
        n: usize,
        skeleton: Skeleton,
        flavor: Flavor,
        prints: &mut Vec<String>,
        gen: impl FnOnce() -> Result<RelationSystem>,
    ) -> Result<RelationSystem> {
        if let Some(payload) = self.cache.get(kind, skeleton, n) {
            if let Ok(sys) = wire::system_from_json(&payload, skeleton, flavor) {
                prints.push(self.cache.fingerprint(kind, skeleton, n, &payload));
                return Ok(sys);
            }
        }
        let sys = gen()?;
        let payload = wire::system_to_json(&sys, flavor);
        self.cache.put(kind, skeleton, n, &payload);
        prints.push(self.cache.fingerprint(kind, skeleton, n, &payload));
        Ok(sys)
    }

    fn certificate(
        &self,
        claim: &str,
        params: Value,
        status: Status,
        dims: BTreeMap<String, i64>,
        counts: Counts,
        basis: Vec<Value>,
        witnesses: Vec<Value>,
        started: Instant,
        fingerprints: Vec<String>,
    ) -> Certificate {
        Certificate {
            schema: CERT_SCHEMA.into(),
            claim: claim.into(),
            params,
            status,
            dims,
            counts,
            basis,
            witnesses,
            runtime_ms: started.elapsed().as_millis() as u64,
            version: env!("CARGO_PKG_VERSION").into(),
            fingerprints,
        }
    }

    /// No nonconstant invariant in the virtualization-constrained space,
    /// and a concrete witness pair for every nonconstant unconstrained
    /// basis functional.
    pub fn verify_theorem1(&self, n: usize, skeleton: Skeleton) -> Result<Certificate> {
        self.check_signed(n)?;
        let started = Instant::now();
        let mut prints = Vec::new();
        let polyak = self.polyak_system(n, skeleton, &mut prints)?;
        let gpv_basis = invariant::space_from_system(&polyak, n, skeleton, Profile::Gpv);

        let mut virt = polyak.clone();
        for (i, row) in invariant::flip_constraints(n, skeleton, self.opts.enumeration_ceiling)?
            .into_iter()
            .enumerate()
        {
            let mut p = crate::linalg::Provenance::new("flip");
            p.detail = format!("flip constraint {i}");
            virt.push(&row, p)?;
        }
        virt.dedup();
        let virt_basis = invariant::space_from_system(&virt, n, skeleton, Profile::GpvVirtualization);

        let constants_only = virt_basis.len() == 1 && virt_basis[0].is_constant();
        let mut witnesses = Vec::new();
        let mut missing: Option<&InvariantFunctional> = None;
        for f in gpv_basis.iter().filter(|f| !f.is_constant()) {
            match invariant::find_witness(f, self.opts.witness_bound, self.opts.enumeration_ceiling)? {
                Some(w) => witnesses.push(serde_json::to_value(&w).expect("witness serializes")),
                None => {
                    missing = Some(f);
                    break;
                }
            }
        }
        let status = if let Some(f) = missing {
            witnesses.push(json!({
                "inconclusive_functional": wire::functional_to_json(f),
                "crossing_bound": self.opts.witness_bound,
            }));
            Status::Inconclusive
        } else if constants_only {
            Status::Pass
        } else {
            Status::Fail
        };

        let mut dims = BTreeMap::new();
        dims.insert("gpv".into(), gpv_basis.len() as i64);
        dims.insert("virt".into(), virt_basis.len() as i64);
        let counts = Counts { diagrams: polyak.ambient().len(), relations: virt.len() };
        let basis = gpv_basis
            .iter()
            .chain(virt_basis.iter())
            .map(wire::functional_to_json)
            .collect();
        Ok(self.certificate(
            "theorem1",
            json!({ "order": n, "skeleton": skeleton.to_string() }),
            status,
            dims,
            counts,
            basis,
            witnesses,
            started,
            prints,
        ))
    }

    /// The quotient of exactly-n unsigned chord diagrams by the isolated
    /// chord and six-term relations vanishes over the rationals.
    pub fn verify_vanishing(&self, n: usize, skeleton: Skeleton) -> Result<Certificate> {
        self.check_unsigned(n)?;
        let started = Instant::now();
        let one = relations::generate_unsigned(RelationKind::OneTerm, n, skeleton, false, self.opts.enumeration_ceiling)?;
        let six = relations::generate_unsigned(RelationKind::SixTerm, n, skeleton, false, self.opts.enumeration_ceiling)?;
        let total = one.ambient().len();
        let mut combined: Vec<crate::linalg::SparseRow> = one.rows().to_vec();
        combined.extend(six.rows().iter().cloned());
        let rank = row_space(&combined, total).rank;
        let rank_one = row_space(one.rows(), total).rank;
        let status = if rank == total { Status::Pass } else { Status::Fail };
        let mut dims = BTreeMap::new();
        dims.insert("diagrams".into(), total as i64);
        dims.insert("rank".into(), rank as i64);
        dims.insert("rank_one_term".into(), rank_one as i64);
        dims.insert("quotient".into(), (total - rank) as i64);
        let counts = Counts { diagrams: total, relations: combined.len() };
        Ok(self.certificate(
            "vanishing",
            json!({ "order": n, "skeleton": skeleton.to_string() }),
            status,
            dims,
            counts,
            Vec::new(),
            Vec::new(),
            started,
            Vec::new(),
        ))
    }

    /// All exactly-n unsigned chord diagrams collapse to a single class
    /// modulo the two-term relation, and that class dies once isolated
    /// chords vanish.
    pub fn verify_caterpillar(&self, n: usize, skeleton: Skeleton) -> Result<Certificate> {
        self.check_unsigned(n)?;
        let started = Instant::now();
        let two = relations::generate_unsigned(RelationKind::TwoTerm, n, skeleton, false, self.opts.enumeration_ceiling)?;
        let one = relations::generate_unsigned(RelationKind::OneTerm, n, skeleton, false, self.opts.enumeration_ceiling)?;
        let total = two.ambient().len();
        let rank_two = row_space(two.rows(), total).rank;
        let mut combined: Vec<crate::linalg::SparseRow> = two.rows().to_vec();
        combined.extend(one.rows().iter().cloned());
        let rank_both = row_space(&combined, total).rank;
        let single_class = rank_two + 1 == total;
        let class_dies = rank_both == total;
        // a representative with an isolated chord lies in the single class
        let representative = two
            .ambient()
            .iter()
            .find(|k| relations::has_isolated_arc(&k.decode()))
            .map(|k| k.to_string());
        let status = if single_class && class_dies && representative.is_some() {
            Status::Pass
        } else {
            Status::Fail
        };
        let mut dims = BTreeMap::new();
        dims.insert("diagrams".into(), total as i64);
        dims.insert("rank_two_term".into(), rank_two as i64);
        dims.insert("rank_with_one_term".into(), rank_both as i64);
        dims.insert("quotient".into(), (total - rank_two) as i64);
        let counts = Counts { diagrams: total, relations: combined.len() };
        let witnesses = representative
            .map(|r| vec![json!({ "isolated_chord_representative": r })])
            .unwrap_or_default();
        Ok(self.certificate(
            "caterpillar",
            json!({ "order": n, "skeleton": skeleton.to_string() }),
            status,
            dims,
            counts,
            Vec::new(),
            witnesses,
            started,
            Vec::new(),
        ))
    }

    /// The average map sends four-term rows into the arrow six-term span
    /// and isolated-chord rows into the isolated-arrow span, and halving
    /// it back along bar is the identity; memberships carry explicit
    /// coefficients.
    pub fn verify_average(&self, n: usize) -> Result<Certificate> {
        self.check_unsigned(n)?;
        let started = Instant::now();
        let mut witnesses = Vec::new();
        let mut dims = BTreeMap::new();
        let mut total_relations = 0;
        let mut total_diagrams = 0;
        let mut ok = true;
        for skeleton in [Skeleton::Circle, Skeleton::Line] {
            let ceiling = self.opts.enumeration_ceiling;
            let four = relations::generate_unsigned(RelationKind::FourTerm, n, skeleton, false, ceiling)?;
            let six_arrow = relations::generate_unsigned(RelationKind::SixTerm, n, skeleton, true, ceiling)?;
            let one_chord = relations::generate_unsigned(RelationKind::OneTerm, n, skeleton, false, ceiling)?;
            let one_arrow = relations::generate_unsigned(RelationKind::OneTerm, n, skeleton, true, ceiling)?;
            total_relations += four.len() + six_arrow.len() + one_chord.len() + one_arrow.len();

            for (i, row) in four.rows().iter().enumerate() {
                let image = average_of_sum(&four.sum_from_row(row, Flavor::ChordUnsigned))?;
                match six_arrow.in_span(&image)? {
                    Some(coeffs) => witnesses.push(json!({
                        "family": "mu(4T) in <6T>",
                        "skeleton": skeleton.to_string(),
                        "row": i,
                        "coefficients": coeffs
                            .iter()
                            .map(|(j, c)| json!([j, wire::rational_to_string(c)]))
                            .collect::<Vec<_>>(),
                    })),
                    None => {
                        ok = false;
                        witnesses.push(json!({
                            "family": "mu(4T) in <6T>",
                            "skeleton": skeleton.to_string(),
                            "row": i,
                            "failure": "image not in span",
                        }));
                    }
                }
            }
            for (i, row) in one_chord.rows().iter().enumerate() {
                let image = average_of_sum(&one_chord.sum_from_row(row, Flavor::ChordUnsigned))?;
                match one_arrow.in_span(&image)? {
                    Some(coeffs) => witnesses.push(json!({
                        "family": "mu(1T) in <1T>",
                        "skeleton": skeleton.to_string(),
                        "row": i,
                        "coefficients": coeffs
                            .iter()
                            .map(|(j, c)| json!([j, wire::rational_to_string(c)]))
                            .collect::<Vec<_>>(),
                    })),
                    None => {
                        ok = false;
                        witnesses.push(json!({
                            "family": "mu(1T) in <1T>",
                            "skeleton": skeleton.to_string(),
                            "row": i,
                            "failure": "image not in span",
                        }));
                    }
                }
            }
            // mu' identity on every generator
            let ambient = diagrams(skeleton, Flavor::ChordUnsigned, Style::Solid, Count::Exactly(n), ceiling)?;
            total_diagrams += ambient.len();
            let scale = Rational::new(1.into(), num::BigInt::from(1i64 << n));
            for key in &ambient {
                let d = key.decode();
                let back = average_of_sum(&FormalSum::generator(&d))?.bar().scale(&scale);
                if back != FormalSum::generator(&d) {
                    ok = false;
                    witnesses.push(json!({
                        "family": "mu' identity",
                        "skeleton": skeleton.to_string(),
                        "diagram": key.to_string(),
                        "failure": "mu'(D) != D",
                    }));
                }
            }
            dims.insert(format!("four_term_rows_{skeleton}"), four.len() as i64);
            dims.insert(format!("six_term_rows_{skeleton}"), six_arrow.len() as i64);
        }
        let status = if ok { Status::Pass } else { Status::Fail };
        let counts = Counts { diagrams: total_diagrams, relations: total_relations };
        Ok(self.certificate(
            "average",
            json!({ "order": n }),
            status,
            dims,
            counts,
            Vec::new(),
            witnesses,
            started,
            Vec::new(),
        ))
    }

    /// Every graded relation instance at order n is an untruncated local
    /// relation instance plus a remainder supported above the order.
    pub fn verify_membership(&self, n: usize, arrow: bool) -> Result<Certificate> {
        self.check_signed(n)?;
        let started = Instant::now();
        let mut counts_by_family = BTreeMap::new();
        let mut witnesses = Vec::new();
        let mut ok = true;
        let mut total = 0;
        for skeleton in [Skeleton::Circle, Skeleton::Line] {
            for kind in [RelationKind::OneTermSigned, RelationKind::Ns, RelationKind::SixTermSigned] {
                let instances = relations::graded_instances(
                    kind,
                    n,
                    skeleton,
                    !arrow,
                    self.opts.enumeration_ceiling,
                )?;
                *counts_by_family.entry(format!("{}_{skeleton}", kind.name())).or_insert(0i64) +=
                    instances.len() as i64;
                total += instances.len();
                for inst in &instances {
                    let remainder = inst.graded.sub(&inst.untruncated)?;
                    let supported_above = remainder.min_degree().map_or(true, |d| d >= n + 1);
                    if !supported_above {
                        ok = false;
                        witnesses.push(json!({
                            "skeleton": skeleton.to_string(),
                            "family": kind.name(),
                            "instance": inst.graded.to_string(),
                            "failure": "remainder touches degrees at or below the order",
                        }));
                    }
                }
            }
        }
        let status = if ok { Status::Pass } else { Status::Fail };
        let counts = Counts { diagrams: 0, relations: total };
        Ok(self.certificate(
            "membership",
            json!({ "order": n, "flavor": if arrow { "arrow" } else { "chord" } }),
            status,
            counts_by_family,
            counts,
            Vec::new(),
            witnesses,
            started,
            Vec::new(),
        ))
    }

    /// The chord-side invariant space stays one-dimensional across orders.
    pub fn verify_stability(&self, n_low: usize, n_high: usize, skeleton: Skeleton) -> Result<Certificate> {
        self.check_signed(n_high)?;
        if n_low > n_high {
            return Err(Error::InvalidDiagram("empty order range".into()));
        }
        let started = Instant::now();
        let mut prints = Vec::new();
        let mut dims = BTreeMap::new();
        let mut relations_total = 0;
        let mut diagrams_total = 0;
        let mut ok = true;
        for n in n_low..=n_high {
            let sys = self.chord_system(n, skeleton, &mut prints)?;
            let basis = invariant::space_from_system(&sys, n, skeleton, Profile::Chord);
            dims.insert(format!("hom_v{n}"), basis.len() as i64);
            relations_total += sys.len();
            diagrams_total += sys.ambient().len();
            if basis.len() != 1 || !basis[0].is_constant() {
                ok = false;
            }
        }
        let status = if ok { Status::Pass } else { Status::Fail };
        let counts = Counts { diagrams: diagrams_total, relations: relations_total };
        Ok(self.certificate(
            "stability",
            json!({ "n_low": n_low, "n_high": n_high, "skeleton": skeleton.to_string() }),
            status,
            dims,
            counts,
            Vec::new(),
            Vec::new(),
            started,
            prints,
        ))
    }
}

/// Linear lift of the average map to unsigned chord sums.
pub fn average_of_sum(sum: &FormalSum) -> Result<FormalSum> {
    let mut out = FormalSum::zero(sum.skeleton(), Flavor::ArrowUnsigned);
    for (key, coeff) in sum.iter() {
        out = out.add(&crate::formal_sum::average(&key.decode())?.scale(coeff))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verifier() -> Verifier {
        Verifier::new(VerifyOptions::default(), None)
    }

    #[test]
    fn theorem1_at_order_one_circle() {
        let cert = verifier().verify_theorem1(1, Skeleton::Circle).unwrap();
        assert_eq!(cert.status, Status::Pass);
        assert_eq!(cert.dims["gpv"], 1);
        assert_eq!(cert.dims["virt"], 1);
        // constant functional only: no witnesses needed
        assert!(cert.witnesses.is_empty());
    }

    #[test]
    fn vanishing_at_order_two() {
        for skel in [Skeleton::Circle, Skeleton::Line] {
            let cert = verifier().verify_vanishing(2, skel).unwrap();
            assert_eq!(cert.status, Status::Pass, "{skel}");
            assert_eq!(cert.dims["quotient"], 0);
        }
    }

    #[test]
    fn caterpillar_at_order_two_line() {
        let cert = verifier().verify_caterpillar(2, Skeleton::Line).unwrap();
        assert_eq!(cert.status, Status::Pass);
        assert_eq!(cert.dims["diagrams"], 3);
        assert_eq!(cert.dims["quotient"], 1);
    }

    #[test]
    fn membership_at_order_two_chord() {
        let cert = verifier().verify_membership(2, false).unwrap();
        assert_eq!(cert.status, Status::Pass);
    }

    #[test]
    fn witness_bound_exhaustion_is_inconclusive() {
        // a crossing bound too small to separate any flip pair leaves the
        // nonconstant functionals unwitnessed: distinct status, never PASS
        let opts = VerifyOptions { witness_bound: 1, ..VerifyOptions::default() };
        let v = Verifier::new(opts, None);
        let cert = v.verify_theorem1(2, Skeleton::Line).unwrap();
        assert_eq!(cert.status, Status::Inconclusive);
        assert_eq!(cert.status.exit_code(), 2);
        // the failing functional is recorded
        assert!(cert
            .witnesses
            .iter()
            .any(|w| w.get("inconclusive_functional").is_some()));
    }

    #[test]
    fn ceilings_are_enforced() {
        let v = verifier();
        assert!(matches!(v.verify_theorem1(5, Skeleton::Circle), Err(Error::ResourceLimit { .. })));
        assert!(matches!(v.verify_vanishing(6, Skeleton::Circle), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn certificate_shape_validates() {
        let cert = verifier().verify_theorem1(1, Skeleton::Circle).unwrap();
        let v = cert.to_json();
        assert_eq!(validate_certificate(&v).unwrap(), Status::Pass);
        let mut broken = v.clone();
        broken.as_object_mut().unwrap().remove("dims");
        match validate_certificate(&broken) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/dims"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

}
