//! Gauss code parsing and emission.
//!
//! Grammar: `["L:"] item ("," item)*` with `item = ("O"|"U") digits ("+"|"-")`.
//! Every label occurs exactly twice, once as O (overpass, the arrow tail)
//! and once as U (underpass, the arrow head), with matching signs. The
//! `L:` prefix selects the line skeleton; the circle is the default. The
//! empty code denotes the empty diagram.

use std::collections::BTreeMap;

use crate::diagram::{Arc, Diagram, Sign, Skeleton, Style};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pass {
    Over,
    Under,
}

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse { position, message: message.into() }
}

/// Parses a Gauss code into a solid Gauss diagram.
pub fn parse(text: &str) -> Result<Diagram> {
    let bytes = text.as_bytes();
    let (skeleton, mut pos) = if let Some(rest) = text.strip_prefix("L:") {
        (Skeleton::Line, text.len() - rest.len())
    } else {
        (Skeleton::Circle, 0)
    };
    if pos == text.len() {
        return Ok(Diagram::empty(skeleton, true));
    }

    // tokens in traversal order: (pass, label, sign, byte offset)
    let mut tokens: Vec<(Pass, u64, Sign, usize)> = Vec::new();
    loop {
        let start = pos;
        let pass = match bytes.get(pos) {
            Some(b'O') => Pass::Over,
            Some(b'U') => Pass::Under,
            Some(_) => return Err(parse_err(pos, "expected 'O' or 'U'")),
            None => return Err(parse_err(pos, "expected an item, found end of input")),
        };
        pos += 1;
        let digits_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == digits_start {
            return Err(parse_err(pos, "expected a crossing label"));
        }
        let label: u64 = text[digits_start..pos]
            .parse()
            .map_err(|_| parse_err(digits_start, "crossing label out of range"))?;
        if label == 0 {
            return Err(parse_err(digits_start, "crossing labels are positive"));
        }
        let sign = match bytes.get(pos) {
            Some(b'+') => Sign::Plus,
            Some(b'-') => Sign::Minus,
            _ => return Err(parse_err(pos, "expected '+' or '-'")),
        };
        pos += 1;
        tokens.push((pass, label, sign, start));
        match bytes.get(pos) {
            None => break,
            Some(b',') => pos += 1,
            Some(_) => return Err(parse_err(pos, "expected ',' between items")),
        }
    }

    // label -> (over endpoint, under endpoint, sign, first byte offset)
    let mut crossings: BTreeMap<u64, (Option<usize>, Option<usize>, Sign, usize)> = BTreeMap::new();
    for (endpoint, &(pass, label, sign, offset)) in tokens.iter().enumerate() {
        let entry = crossings.entry(label).or_insert((None, None, sign, offset));
        if entry.2 != sign {
            return Err(parse_err(offset, format!("sign mismatch for label {label}")));
        }
        let slot = match pass {
            Pass::Over => &mut entry.0,
            Pass::Under => &mut entry.1,
        };
        if slot.is_some() {
            let kind = if pass == Pass::Over { "O" } else { "U" };
            return Err(parse_err(offset, format!("label {label} occurs twice as {kind}")));
        }
        *slot = Some(endpoint);
    }

    let mut arcs = Vec::with_capacity(crossings.len());
    for (label, (over, under, sign, offset)) in crossings {
        match (over, under) {
            (Some(tail), Some(head)) => arcs.push(Arc::arrow(tail, head, sign, Style::Solid)),
            _ => return Err(parse_err(offset, format!("label {label} occurs only once"))),
        }
    }
    Diagram::new(skeleton, true, arcs)
}

/// Emits the Gauss code of a solid Gauss diagram. Labels are assigned in
/// order of first endpoint along the skeleton.
pub fn emit(diagram: &Diagram) -> Result<String> {
    let (code, _) = emit_with_labels(diagram)?;
    Ok(code)
}

/// As [`emit`], also reporting the label assigned to each arc (indexed as
/// in `diagram.arcs()`).
pub fn emit_with_labels(diagram: &Diagram) -> Result<(String, Vec<u64>)> {
    if !diagram.directed() || !diagram.is_signed() {
        return Err(Error::UnsupportedFlavor("Gauss codes describe signed arrow diagrams".into()));
    }
    if !diagram.all_solid() {
        return Err(Error::UnsupportedFlavor(
            "Gauss codes describe solid diagrams; dashed arrow present".into(),
        ));
    }
    let n = diagram.arc_count();
    // endpoint -> (arc index, is_head)
    let mut at = vec![(0usize, false); 2 * n];
    for (i, arc) in diagram.arcs().iter().enumerate() {
        at[arc.a] = (i, false);
        at[arc.b] = (i, true);
    }
    let mut labels = vec![0u64; n];
    let mut next = 1u64;
    let mut items = Vec::with_capacity(2 * n);
    for e in 0..2 * n {
        let (arc, is_head) = at[e];
        if labels[arc] == 0 {
            labels[arc] = next;
            next += 1;
        }
        let sign = diagram.arcs()[arc].sign.expect("signed diagram");
        items.push(format!(
            "{}{}{}",
            if is_head { 'U' } else { 'O' },
            labels[arc],
            if sign == Sign::Plus { '+' } else { '-' }
        ));
    }
    let mut code = String::new();
    if diagram.skeleton() == Skeleton::Line {
        code.push_str("L:");
    }
    code.push_str(&items.join(","));
    Ok((code, labels))
}
