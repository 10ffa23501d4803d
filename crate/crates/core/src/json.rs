//! JSON wire formats: diagrams, formal sums, invariant functionals,
//! relation systems and certificates.
//!
//! Rationals travel as strings `"p/q"` in lowest terms; diagrams inside
//! sums and functionals travel as canonical key strings. Readers validate
//! shape and report the JSON pointer of the first violation.

use num::BigInt;
use serde_json::{json, Map, Value};

use crate::diagram::{Arc, CanonicalKey, Diagram, Flavor, Sign, Skeleton, Style};
use crate::error::{Error, Result};
use crate::formal_sum::{FormalSum, Rational};
use crate::invariant::{InvariantFunctional, Profile};
use crate::linalg::{Provenance, RelationSystem};

fn schema_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.to_string(), message: message.into() }
}

pub fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_from_str(s: &str, pointer: &str) -> Result<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt =
        num.trim().parse().map_err(|_| schema_err(pointer, format!("bad numerator in {s:?}")))?;
    let d: BigInt =
        den.trim().parse().map_err(|_| schema_err(pointer, format!("bad denominator in {s:?}")))?;
    if d == BigInt::from(0) {
        return Err(schema_err(pointer, "zero denominator"));
    }
    Ok(Rational::new(n, d))
}

fn get<'v>(v: &'v Value, field: &str, pointer: &str) -> Result<&'v Value> {
    v.get(field).ok_or_else(|| schema_err(&format!("{pointer}/{field}"), "missing field"))
}

fn as_str<'v>(v: &'v Value, pointer: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| schema_err(pointer, "expected a string"))
}

fn as_array<'v>(v: &'v Value, pointer: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| schema_err(pointer, "expected an array"))
}

fn as_usize(v: &Value, pointer: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema_err(pointer, "expected a non-negative integer"))
}

fn skeleton_from(v: &Value, pointer: &str) -> Result<Skeleton> {
    match as_str(v, pointer)? {
        "circle" => Ok(Skeleton::Circle),
        "line" => Ok(Skeleton::Line),
        other => Err(schema_err(pointer, format!("unknown skeleton {other:?}"))),
    }
}

pub fn diagram_to_json(d: &Diagram) -> Value {
    let arrows: Vec<Value> = d
        .arcs()
        .iter()
        .map(|a| {
            json!({
                "tail": a.a,
                "head": a.b,
                "sign": a.sign.map(Sign::as_i64).unwrap_or(0),
                "style": if a.style == Style::Dashed { "dashed" } else { "solid" },
            })
        })
        .collect();
    json!({
        "skeleton": if d.skeleton() == Skeleton::Circle { "circle" } else { "line" },
        "arrows": arrows,
    })
}

pub fn diagram_from_json(v: &Value) -> Result<Diagram> {
    let skeleton = skeleton_from(get(v, "skeleton", "")?, "/skeleton")?;
    let arrows = as_array(get(v, "arrows", "")?, "/arrows")?;
    let mut arcs = Vec::with_capacity(arrows.len());
    for (i, item) in arrows.iter().enumerate() {
        let p = format!("/arrows/{i}");
        let tail = as_usize(get(item, "tail", &p)?, &format!("{p}/tail"))?;
        let head = as_usize(get(item, "head", &p)?, &format!("{p}/head"))?;
        let sign = match get(item, "sign", &p)?.as_i64() {
            Some(1) => Some(Sign::Plus),
            Some(-1) => Some(Sign::Minus),
            _ => None,
        };
        let style = match as_str(get(item, "style", &p)?, &format!("{p}/style"))? {
            "solid" => Style::Solid,
            "dashed" => Style::Dashed,
            other => return Err(schema_err(&format!("{p}/style"), format!("unknown style {other:?}"))),
        };
        let sign = sign.ok_or_else(|| schema_err(&format!("{p}/sign"), "sign must be 1 or -1"))?;
        arcs.push(Arc::arrow(tail, head, sign, style));
    }
    Diagram::new(skeleton, true, arcs)
        .map_err(|e| schema_err("/arrows", format!("invalid diagram: {e}")))
}

fn entries_to_json(sum: &FormalSum) -> Vec<Value> {
    sum.iter()
        .map(|(k, c)| json!({ "diagram": k.to_string(), "coeff": rational_to_string(c) }))
        .collect()
}

fn entries_from_json(
    items: &[Value],
    pointer: &str,
    skeleton: Skeleton,
    flavor: Flavor,
) -> Result<FormalSum> {
    let mut sum = FormalSum::zero(skeleton, flavor);
    for (i, item) in items.iter().enumerate() {
        let p = format!("{pointer}/{i}");
        let key_str = as_str(get(item, "diagram", &p)?, &format!("{p}/diagram"))?;
        let key: CanonicalKey = key_str
            .parse()
            .map_err(|e| schema_err(&format!("{p}/diagram"), format!("{e}")))?;
        let coeff = rational_from_str(
            as_str(get(item, "coeff", &p)?, &format!("{p}/coeff"))?,
            &format!("{p}/coeff"),
        )?;
        sum.add_key(key, coeff).map_err(|e| schema_err(&format!("{p}/diagram"), format!("{e}")))?;
    }
    Ok(sum)
}

pub fn sum_to_json(sum: &FormalSum) -> Value {
    json!({
        "flavor": sum.flavor().short(),
        "skeleton": if sum.skeleton() == Skeleton::Circle { "circle" } else { "line" },
        "terms": entries_to_json(sum),
    })
}

pub fn sum_from_json(v: &Value) -> Result<FormalSum> {
    let skeleton = skeleton_from(get(v, "skeleton", "")?, "/skeleton")?;
    let flavor = Flavor::from_short(as_str(get(v, "flavor", "")?, "/flavor")?)
        .ok_or_else(|| schema_err("/flavor", "unknown flavor"))?;
    let items = as_array(get(v, "terms", "")?, "/terms")?;
    entries_from_json(items, "/terms", skeleton, flavor)
}

pub fn functional_to_json(f: &InvariantFunctional) -> Value {
    json!({
        "order": f.order,
        "skeleton": if f.skeleton == Skeleton::Circle { "circle" } else { "line" },
        "profile": f.profile.to_string(),
        "entries": entries_to_json(&f.entries),
    })
}

pub fn functional_from_json(v: &Value) -> Result<InvariantFunctional> {
    let order = as_usize(get(v, "order", "")?, "/order")?;
    let skeleton = skeleton_from(get(v, "skeleton", "")?, "/skeleton")?;
    let profile = match v.get("profile").and_then(Value::as_str) {
        None | Some("gpv") => Profile::Gpv,
        Some("gpv+virtualization") => Profile::GpvVirtualization,
        Some("chord") => Profile::Chord,
        Some(other) => return Err(schema_err("/profile", format!("unknown profile {other:?}"))),
    };
    let flavor = match profile {
        Profile::Chord => Flavor::ChordSigned,
        _ => Flavor::ArrowSigned,
    };
    let items = as_array(get(v, "entries", "")?, "/entries")?;
    let entries = entries_from_json(items, "/entries", skeleton, flavor)?;
    for (key, _) in entries.iter() {
        if key.arc_count() > order {
            return Err(schema_err("/entries", "entry above the stated order"));
        }
    }
    Ok(InvariantFunctional { order, skeleton, profile, entries })
}

pub fn system_to_json(sys: &RelationSystem, flavor: Flavor) -> Value {
    let ambient: Vec<Value> = sys.ambient().iter().map(|k| Value::String(k.to_string())).collect();
    let rows: Vec<Value> = sys
        .rows()
        .iter()
        .zip(sys.provenance())
        .map(|(row, p)| {
            let sum = sys.sum_from_row(row, flavor);
            json!({
                "provenance": { "schema": p.schema, "context": p.context, "detail": p.detail },
                "terms": entries_to_json(&sum),
            })
        })
        .collect();
    json!({ "ambient": ambient, "rows": rows })
}

pub fn system_from_json(v: &Value, skeleton: Skeleton, flavor: Flavor) -> Result<RelationSystem> {
    let ambient_vals = as_array(get(v, "ambient", "")?, "/ambient")?;
    let mut ambient = Vec::with_capacity(ambient_vals.len());
    for (i, item) in ambient_vals.iter().enumerate() {
        let p = format!("/ambient/{i}");
        let key: CanonicalKey =
            as_str(item, &p)?.parse().map_err(|e| schema_err(&p, format!("{e}")))?;
        ambient.push(key);
    }
    let mut sys = RelationSystem::new(ambient);
    for (i, item) in as_array(get(v, "rows", "")?, "/rows")?.iter().enumerate() {
        let p = format!("/rows/{i}");
        let terms = as_array(get(item, "terms", &p)?, &format!("{p}/terms"))?;
        let sum = entries_from_json(terms, &format!("{p}/terms"), skeleton, flavor)?;
        let prov_v = get(item, "provenance", &p)?;
        let mut prov = Provenance::new(
            as_str(get(prov_v, "schema", &p)?, &format!("{p}/provenance/schema"))?,
        );
        prov.context = as_str(get(prov_v, "context", &p)?, &format!("{p}/provenance/context"))?.to_string();
        prov.detail = as_str(get(prov_v, "detail", &p)?, &format!("{p}/provenance/detail"))?.to_string();
        sys.push(&sum, prov).map_err(|e| schema_err(&format!("{p}/terms"), format!("{e}")))?;
    }
    Ok(sys)
}

/// Serializes any value with stable formatting (two-space indentation,
/// keys in struct order).
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json serialization cannot fail");
    out.push(b'\n');
    out
}

/// Required-field check used by certificate readers.
pub fn require_fields(v: &Value, fields: &[&str]) -> Result<()> {
    let obj: &Map<String, Value> =
        v.as_object().ok_or_else(|| schema_err("", "expected an object"))?;
    for f in fields {
        if !obj.contains_key(*f) {
            return Err(schema_err(&format!("/{f}"), "missing field"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Sign;
    use crate::formal_sum::rat;
    use crate::gauss_code::parse;

    #[test]
    fn rational_round_trip_and_normalization() {
        let r = rational_from_str("2/4", "/x").unwrap();
        assert_eq!(rational_to_string(&r), "1/2");
        let r = rational_from_str("-6/4", "/x").unwrap();
        assert_eq!(rational_to_string(&r), "-3/2");
        let r = rational_from_str("5", "/x").unwrap();
        assert_eq!(rational_to_string(&r), "5/1");
        assert!(rational_from_str("1/0", "/x").is_err());
        assert!(rational_from_str("a/b", "/x").is_err());
    }

    #[test]
    fn diagram_round_trip() {
        let d = parse("O1+,U2-,O2-,U1+").unwrap();
        let v = diagram_to_json(&d);
        let back = diagram_from_json(&v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn diagram_schema_errors_carry_pointers() {
        let v = json!({ "skeleton": "circle" });
        match diagram_from_json(&v) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/arrows"),
            other => panic!("expected schema error, got {other:?}"),
        }
        let v = json!({ "skeleton": "circle", "arrows": [{ "tail": 0, "head": 1, "sign": 2, "style": "solid" }] });
        match diagram_from_json(&v) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/arrows/0/sign"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn sum_round_trip() {
        let d = parse("O1+,U1+").unwrap().with_style(Style::Dashed);
        let mut sum = FormalSum::zero(Skeleton::Circle, Flavor::ArrowSigned);
        sum.add_diagram(&d, Rational::new(2.into(), 3.into()));
        sum.add_diagram(&Diagram::empty(Skeleton::Circle, true), rat(-1));
        let back = sum_from_json(&sum_to_json(&sum)).unwrap();
        assert_eq!(back, sum);
    }

    #[test]
    fn functional_round_trip() {
        use crate::invariant::{invariant_space, Profile};
        let basis = invariant_space(2, Skeleton::Line, Profile::Gpv, 6).unwrap();
        for f in &basis {
            let back = functional_from_json(&functional_to_json(f)).unwrap();
            assert_eq!(&back, f);
        }
    }

    #[test]
    fn functional_rejects_noncanonical_keys() {
        let v = json!({
            "order": 1,
            "skeleton": "circle",
            "entries": [{ "diagram": "c:as:1>0+d", "coeff": "1/1" }],
        });
        // 1>0 is the non-canonical rotation of the one-arrow circle diagram
        assert!(functional_from_json(&v).is_err());
    }

    #[test]
    fn dashed_key_strings_parse() {
        let d = parse("O1+,U1+").unwrap().with_style(Style::Dashed);
        let key = d.canonical_key();
        let s = key.to_string();
        assert!(s.ends_with('d'), "{s}");
        let back: CanonicalKey = s.parse().unwrap();
        assert_eq!(back, key);
        let _ = Sign::Plus;
    }
}
