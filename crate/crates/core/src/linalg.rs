//! Exact sparse rational linear algebra over canonical-diagram ambients.
//!
//! Everything here is exact: coefficients are arbitrary-precision
//! rationals and no floating point appears anywhere. Elimination uses
//! fraction-free updates over a cleared-denominator integer view with
//! Markowitz-style sparse pivot selection; ties break to the lowest column
//! index, then the lowest row index, so results are deterministic for a
//! fixed ambient ordering. Rows are sorted and deduplicated before
//! elimination, which makes every computation independent of input order.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::diagram::CanonicalKey;
use crate::error::{Error, Result};
use crate::formal_sum::{FormalSum, Rational};

/// A sparse row: strictly increasing column indices with nonzero rational
/// coefficients.
pub type SparseRow = Vec<(usize, Rational)>;

/// Where a relation row came from: the generating schema and the site data
/// of one witness instance.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub schema: String,
    pub context: String,
    pub sites: Vec<usize>,
    pub detail: String,
}

impl Provenance {
    pub fn new(schema: impl Into<String>) -> Provenance {
        Provenance { schema: schema.into(), context: String::new(), sites: Vec::new(), detail: String::new() }
    }
}

/// A family of relation vectors over a fixed ambient list of canonical
/// diagram keys.
#[derive(Debug, Clone)]
pub struct RelationSystem {
    ambient: Vec<CanonicalKey>,
    index: BTreeMap<CanonicalKey, usize>,
    rows: Vec<SparseRow>,
    provenance: Vec<Provenance>,
}

impl RelationSystem {
    pub fn new(ambient: Vec<CanonicalKey>) -> RelationSystem {
        let index = ambient.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        RelationSystem { ambient, index, rows: Vec::new(), provenance: Vec::new() }
    }

    pub fn ambient(&self) -> &[CanonicalKey] {
        &self.ambient
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Converts a formal sum to a sparse row over this ambient. Terms
    /// outside the ambient are an error.
    pub fn row_from_sum(&self, sum: &FormalSum) -> Result<SparseRow> {
        let mut row = Vec::with_capacity(sum.len());
        for (key, coeff) in sum.iter() {
            let col = self.index.get(key).ok_or_else(|| {
                Error::InvalidDiagram(format!("relation term [{key}] is outside the ambient"))
            })?;
            row.push((*col, coeff.clone()));
        }
        row.sort_by_key(|&(c, _)| c);
        Ok(row)
    }

    pub fn sum_from_row(&self, row: &SparseRow, flavor: crate::diagram::Flavor) -> FormalSum {
        let skel = self.ambient.first().map(|k| k.skeleton()).unwrap_or(crate::diagram::Skeleton::Circle);
        let mut out = FormalSum::zero(skel, flavor);
        for (col, coeff) in row {
            out.add_key(self.ambient[*col].clone(), coeff.clone()).expect("ambient keys share flavor");
        }
        out
    }

    /// Adds a relation row. Zero rows are dropped; duplicate rows (after
    /// leading-coefficient normalization) are dropped, keeping the first
    /// witness provenance.
    pub fn push(&mut self, sum: &FormalSum, provenance: Provenance) -> Result<()> {
        let row = self.row_from_sum(sum)?;
        if row.is_empty() {
            return Ok(());
        }
        self.rows.push(row);
        self.provenance.push(provenance);
        Ok(())
    }

    /// Sorts rows by (normalized coefficients, support) and removes exact
    /// duplicates up to scale. Provenance follows its row.
    pub fn dedup(&mut self) {
        let mut tagged: Vec<(Vec<(usize, Rational)>, SparseRow, Provenance)> = self
            .rows
            .drain(..)
            .zip(self.provenance.drain(..))
            .map(|(row, prov)| (normalize_row(&row), row, prov))
            .collect();
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        tagged.dedup_by(|a, b| a.0 == b.0);
        for (_, row, prov) in tagged {
            self.rows.push(row);
            self.provenance.push(prov);
        }
    }
}

/// Scales a row so its leading coefficient is 1.
fn normalize_row(row: &SparseRow) -> SparseRow {
    match row.first() {
        None => Vec::new(),
        Some((_, lead)) => {
            let inv = Rational::one() / lead;
            row.iter().map(|(c, v)| (*c, v * &inv)).collect()
        }
    }
}

/// Clears denominators and divides by the content, giving a primitive
/// integer row with positive leading coefficient times a positive scale.
fn primitive_integer_row(row: &SparseRow) -> Vec<(usize, BigInt)> {
    if row.is_empty() {
        return Vec::new();
    }
    let mut denom_lcm = BigInt::one();
    for (_, v) in row {
        let d = v.denom();
        let g = num::integer::gcd(denom_lcm.clone(), d.clone());
        denom_lcm = denom_lcm / g * d;
    }
    let mut ints: Vec<(usize, BigInt)> =
        row.iter().map(|(c, v)| (*c, v.numer() * (&denom_lcm / v.denom()))).collect();
    let mut content = BigInt::zero();
    for (_, v) in &ints {
        content = num::integer::gcd(content, v.clone());
    }
    if !content.is_one() && !content.is_zero() {
        for (_, v) in &mut ints {
            *v = &*v / &content;
        }
    }
    if ints.first().map(|(_, v)| v.is_negative()).unwrap_or(false) {
        for (_, v) in &mut ints {
            *v = -v.clone();
        }
    }
    ints
}

type IntRow = Vec<(usize, BigInt)>;

fn int_row_get(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |&(c, _)| c).ok().map(|i| &row[i].1)
}

/// `p*dst - c*src`, fraction-free, result kept primitive.
fn eliminate_into(dst: &IntRow, src: &IntRow, p: &BigInt, c: &BigInt) -> IntRow {
    let mut out: IntRow = Vec::with_capacity(dst.len() + src.len());
    let (mut i, mut j) = (0, 0);
    while i < dst.len() || j < src.len() {
        let take_dst = j >= src.len() || (i < dst.len() && dst[i].0 < src[j].0);
        let take_src = i >= dst.len() || (j < src.len() && src[j].0 < dst[i].0);
        if take_dst {
            out.push((dst[i].0, p * &dst[i].1));
            i += 1;
        } else if take_src {
            out.push((src[j].0, -(c * &src[j].1)));
            j += 1;
        } else {
            let v = p * &dst[i].1 - c * &src[j].1;
            if !v.is_zero() {
                out.push((dst[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    // keep entries small
    let mut content = BigInt::zero();
    for (_, v) in &out {
        content = num::integer::gcd(content, v.clone());
    }
    if !content.is_zero() && !content.is_one() {
        for (_, v) in &mut out {
            *v = &*v / &content;
        }
    }
    out
}

/// Outcome of exact row reduction: a reduced basis of the row space
/// expressed over the ambient columns.
#[derive(Debug, Clone)]
pub struct RowSpace {
    /// Reduced rows, each normalized to leading coefficient 1, sorted by
    /// pivot column.
    pub basis: Vec<SparseRow>,
    /// Pivot column of each basis row.
    pub pivots: Vec<usize>,
    pub rank: usize,
    ncols: usize,
}

impl RowSpace {
    /// Reduces `v` against the basis; returns the remainder.
    pub fn reduce(&self, v: &SparseRow) -> SparseRow {
        let mut acc: BTreeMap<usize, Rational> = v.iter().cloned().collect();
        for (i, &p) in self.pivots.iter().enumerate() {
            let c = match acc.get(&p) {
                Some(c) if !c.is_zero() => c.clone(),
                _ => continue,
            };
            for (col, coeff) in &self.basis[i] {
                let entry = acc.entry(*col).or_insert_with(Rational::zero);
                *entry -= &c * coeff;
                if entry.is_zero() {
                    acc.remove(col);
                }
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    /// Basis of the orthogonal complement `{w : <w, b> = 0 for all basis b}`,
    /// one vector per non-pivot column, normalized so the first nonzero
    /// coefficient (in ambient order) is 1, sorted by leading support.
    pub fn orthogonal_complement(&self) -> Vec<SparseRow> {
        let pivot_set: std::collections::BTreeSet<usize> = self.pivots.iter().copied().collect();
        let mut out = Vec::new();
        for free in 0..self.ncols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut w: BTreeMap<usize, Rational> = BTreeMap::new();
            w.insert(free, Rational::one());
            for (i, &p) in self.pivots.iter().enumerate() {
                if let Some(c) = self.basis[i].iter().find(|(col, _)| *col == free) {
                    w.insert(p, -c.1.clone());
                }
            }
            let row: SparseRow = w.into_iter().collect();
            out.push(normalize_row(&row));
        }
        out.sort_by(|a, b| a.first().map(|x| x.0).cmp(&b.first().map(|x| x.0)).then_with(|| a.cmp(b)));
        out
    }
}

/// Exact reduced row echelon form of the given rows over `ncols` columns.
///
/// Rows are deduplicated and sorted first, so the result only depends on
/// the set of input rows. Pivoting is fraction-free over a primitive
/// integer view; within each elimination step the pivot is chosen to
/// minimize the Markowitz fill estimate, ties broken by lowest column then
/// lowest row.
pub fn row_space(rows: &[SparseRow], ncols: usize) -> RowSpace {
    let mut work: Vec<IntRow> = rows
        .iter()
        .map(|r| primitive_integer_row(r))
        .filter(|r| !r.is_empty())
        .collect();
    work.sort();
    work.dedup();

    let mut reduced: Vec<IntRow> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();

    while !work.is_empty() {
        // column occupancy for the Markowitz score
        let mut col_count: BTreeMap<usize, usize> = BTreeMap::new();
        for row in &work {
            for (c, _) in row {
                *col_count.entry(*c).or_insert(0) += 1;
            }
        }
        // pick (row, leading col) minimizing (nnz(row)-1)*(nnz(col)-1),
        // ties: lowest column, then lowest row index
        let mut best: Option<(usize, usize, usize)> = None; // (score, col, row_idx)
        for (ri, row) in work.iter().enumerate() {
            let col = row[0].0;
            let score = (row.len() - 1) * (col_count[&col] - 1);
            let cand = (score, col, ri);
            if best.map_or(true, |b| cand < b) {
                best = Some(cand);
            }
        }
        let (_, pcol, pri) = best.unwrap();
        let pivot_row = work.swap_remove(pri);
        let pval = int_row_get(&pivot_row, pcol).unwrap().clone();

        work = work
            .into_iter()
            .filter_map(|row| {
                let out = match int_row_get(&row, pcol) {
                    Some(c) => eliminate_into(&row, &pivot_row, &pval, &c.clone()),
                    None => row,
                };
                (!out.is_empty()).then_some(out)
            })
            .collect();
        work.sort();
        work.dedup();

        // back-substitute into the rows already reduced
        for prev in reduced.iter_mut() {
            if let Some(c) = int_row_get(prev, pcol) {
                *prev = eliminate_into(prev, &pivot_row, &pval, &c.clone());
            }
        }
        reduced.push(pivot_row);
        pivots.push(pcol);
    }

    let mut order: Vec<usize> = (0..reduced.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    let basis: Vec<SparseRow> = order
        .iter()
        .map(|&i| {
            let lead = int_row_get(&reduced[i], pivots[i]).unwrap().clone();
            reduced[i]
                .iter()
                .map(|(c, v)| (*c, BigRational::new(v.clone(), lead.clone())))
                .collect()
        })
        .collect();
    let pivots: Vec<usize> = order.into_iter().map(|i| pivots[i]).collect();
    let rank = basis.len();
    RowSpace { basis, pivots, rank, ncols }
}

impl RelationSystem {
    pub fn row_space(&self) -> RowSpace {
        row_space(&self.rows, self.ambient.len())
    }

    pub fn rank(&self) -> usize {
        self.row_space().rank
    }

    /// The exact dual of the quotient by this system: vectors orthogonal to
    /// every relation row.
    pub fn orthogonal_complement(&self) -> Vec<SparseRow> {
        self.row_space().orthogonal_complement()
    }
}

/// Expresses `v` as an exact linear combination of `rows`, if possible.
/// Returns the coefficients, sparse over row indices. The refusal case is
/// verified: `v` must strictly enlarge the rank.
pub fn in_span(v: &SparseRow, rows: &[SparseRow], ncols: usize) -> Option<Vec<(usize, Rational)>> {
    // eliminate over rows augmented with identity bookkeeping columns
    let aug = |row: &SparseRow, idx: Option<usize>| -> SparseRow {
        let mut r = row.clone();
        if let Some(i) = idx {
            r.push((ncols + i, Rational::one()));
        }
        r
    };
    let mut work: Vec<SparseRow> = rows.iter().enumerate().map(|(i, r)| aug(r, Some(i))).collect();
    // plain elimination on the leading (non-bookkeeping) part
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row index in work)
    for wi in 0..work.len() {
        // reduce row wi by existing pivots
        let mut row: BTreeMap<usize, Rational> = work[wi].iter().cloned().collect();
        for &(pc, pr) in &pivots {
            let c = match row.get(&pc) {
                Some(c) if !c.is_zero() => c.clone(),
                _ => continue,
            };
            for (col, coeff) in &work[pr] {
                let e = row.entry(*col).or_insert_with(Rational::zero);
                *e -= &c * coeff;
                if e.is_zero() {
                    row.remove(col);
                }
            }
        }
        let lead = row.iter().find(|(c, v)| **c < ncols && !v.is_zero()).map(|(c, _)| *c);
        let row_vec: SparseRow = row.into_iter().collect();
        work[wi] = row_vec;
        if let Some(lc) = lead {
            let inv = Rational::one() / &work[wi].iter().find(|(c, _)| *c == lc).unwrap().1;
            work[wi] = work[wi].iter().map(|(c, v)| (*c, v * &inv)).collect();
            pivots.push((lc, wi));
        }
    }
    // reduce v, carrying coefficients in the bookkeeping columns
    let mut row: BTreeMap<usize, Rational> = v.iter().cloned().collect();
    for &(pc, pr) in &pivots {
        let c = match row.get(&pc) {
            Some(c) if !c.is_zero() => c.clone(),
            _ => continue,
        };
        for (col, coeff) in &work[pr] {
            let e = row.entry(*col).or_insert_with(Rational::zero);
            *e -= &c * coeff;
            if e.is_zero() {
                row.remove(col);
            }
        }
    }
    if row.iter().any(|(c, v)| *c < ncols && !v.is_zero()) {
        return None;
    }
    // v - sum(coeffs) = 0, so v = -sum over bookkeeping residue
    let coeffs: Vec<(usize, Rational)> = row
        .into_iter()
        .filter(|(c, v)| *c >= ncols && !v.is_zero())
        .map(|(c, v)| (c - ncols, -v))
        .collect();
    Some(coeffs)
}

impl RelationSystem {
    /// Membership of a formal sum in the span of this system's rows, with
    /// explicit coefficients on success.
    pub fn in_span(&self, sum: &FormalSum) -> Result<Option<Vec<(usize, Rational)>>> {
        let v = self.row_from_sum(sum)?;
        Ok(in_span(&v, &self.rows, self.ambient.len()))
    }
}

/// Exact dot product of two sparse rows.
pub fn dot(a: &SparseRow, b: &SparseRow) -> Rational {
    let mut out = Rational::zero();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    out
}
