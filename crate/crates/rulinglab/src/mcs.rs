//! Slice-by-slice transfer of filtered complexes (A-form Morse complex
//! sequences), the handleslide move engine, and the augmentation sweep.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{right_moving, PotentialTable, Slice, SliceInfo, TangleFront};
use crate::linalg::{identity, mat_mul, FilteredComplex, Matrix, PrimeField};
use crate::ruling::check_modulus;
use crate::types::{IsoType, Modulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParamKind {
    CrossingValue,
    CuspValue,
    BasePointUnit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Param {
    /// 1-based slice index.
    pub slice: usize,
    pub kind: ParamKind,
    pub value: u64,
}

pub type ParamAssignment = Vec<Param>;

/// Adds `c` times row `src` to row `dst`.
fn row_add(f: PrimeField, d: &mut Matrix, dst: usize, src: usize, c: u64) {
    for j in 0..d.len() {
        d[dst][j] = f.add(d[dst][j], f.mul(c, d[src][j]));
    }
}

/// Adds `c` times column `src` to column `dst`.
fn col_add(f: PrimeField, d: &mut Matrix, dst: usize, src: usize, c: u64) {
    for row in d.iter_mut() {
        row[dst] = f.add(row[dst], f.mul(c, row[src]));
    }
}

/// Conjugates by the handleslide `e_k -> e_k - r e_{k+1}`:
/// `d' = H^{-1} d H` with `H = I - r E_{k,k+1}`.
fn handleslide(f: PrimeField, d: &mut Matrix, k: usize, r: u64) {
    if r == 0 {
        return;
    }
    row_add(f, d, k, k + 1, r);
    col_add(f, d, k + 1, k, f.neg(r));
}

fn swap(d: &mut Matrix, k: usize) {
    d.swap(k, k + 1);
    for row in d.iter_mut() {
        row.swap(k, k + 1);
    }
}

/// Result of pushing a complex across one slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transfer {
    Alive {
        complex: FilteredComplex,
        /// Base-point value forced at a marked right cusp.
        forced: Option<u64>,
    },
    Dead,
}

/// Pushes `state` across `slice`. `value` is the crossing's augmentation
/// value, the free handleslide coefficient at a right cusp when `m = 1`,
/// or the base-point unit; it is ignored elsewhere. `mu_right` holds the
/// potentials after the slice.
pub fn transfer_slice(
    state: &FilteredComplex,
    slice: &Slice,
    info: &SliceInfo,
    mu_right: &[i64],
    value: u64,
) -> Result<Transfer> {
    let f = state.field;
    let n = state.n();
    let k = slice.position() - 1;
    let mut d = state.d.clone();
    let out = |d: Matrix, forced| {
        let c = FilteredComplex { field: f, m: state.m, mu: mu_right.to_vec(), d };
        debug_assert!(c.check().is_ok(), "transfer broke the complex: {:?}", c.check());
        Transfer::Alive { complex: c, forced }
    };
    match (*slice, *info) {
        (Slice::Crossing(_), SliceInfo::Crossing { .. }) => {
            if k + 1 >= n {
                return Err(Error::Invalid("crossing outside the complex".into()));
            }
            if d[k][k + 1] != 0 {
                return Ok(Transfer::Dead);
            }
            handleslide(f, &mut d, k, f.neg(value));
            swap(&mut d, k);
            Ok(out(d, None))
        }
        (Slice::LeftCusp { .. }, _) => {
            for row in d.iter_mut() {
                row.splice(k..k, [0, 0]);
            }
            d.splice(k..k, [vec![0; n + 2], vec![0; n + 2]]);
            d[k][k + 1] = f.sign(mu_right[k]);
            Ok(out(d, None))
        }
        (Slice::RightCusp { marked, .. }, SliceInfo::RightCusp { sigma, .. }) => {
            if k + 1 >= n {
                return Err(Error::Invalid("right cusp outside the complex".into()));
            }
            handleslide(f, &mut d, k, value);
            let p = d[k][k + 1];
            let mu_k = state.mu[k];
            let forced = if marked {
                if p == 0 {
                    return Ok(Transfer::Dead);
                }
                let t_sigma = f.neg(f.mul(f.sign(mu_k), p));
                Some(if sigma == 1 { t_sigma } else { f.inv(t_sigma) })
            } else {
                if p != f.sign(mu_k + 1) {
                    return Ok(Transfer::Dead);
                }
                None
            };
            let pi = f.inv(p);
            let keep: Vec<usize> = (0..n).filter(|&i| i != k && i != k + 1).collect();
            let nd = keep
                .iter()
                .map(|&i| keep.iter().map(|&j| f.sub(d[i][j], f.mul(f.mul(d[i][k + 1], d[k][j]), pi))).collect())
                .collect();
            Ok(out(nd, forced))
        }
        (Slice::BasePoint(_), SliceInfo::BasePoint { .. }) => {
            if value == 0 {
                return Err(Error::Invalid("base-point value must be a unit".into()));
            }
            let lambda = if right_moving(state.mu[k]) { value } else { f.inv(value) };
            let li = f.inv(lambda);
            for j in 0..n {
                d[k][j] = f.mul(d[k][j], li);
            }
            for row in d.iter_mut() {
                row[k] = f.mul(row[k], lambda);
            }
            Ok(out(d, None))
        }
        _ => Err(Error::Invalid(format!("slice `{slice}` does not match its potential data"))),
    }
}

/// Values the sweep ranges over at one slice.
pub fn slice_choices(slice: &Slice, info: &SliceInfo, m: Modulus, f: PrimeField) -> Vec<(Option<ParamKind>, u64)> {
    match (*slice, *info) {
        (Slice::Crossing(_), SliceInfo::Crossing { degree, .. }) if m.is_zero(degree) => {
            f.elements().map(|v| (Some(ParamKind::CrossingValue), v)).collect()
        }
        (Slice::RightCusp { .. }, _) if m.0 == 1 => f.elements().map(|v| (Some(ParamKind::CuspValue), v)).collect(),
        (Slice::BasePoint(_), _) => f.units().map(|v| (Some(ParamKind::BasePointUnit), v)).collect(),
        (Slice::Crossing(_), _) => vec![(Some(ParamKind::CrossingValue), 0)],
        _ => vec![(None, 0)],
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub budget: u64,
    pub witnesses: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { budget: crate::DEFAULT_BUDGET, witnesses: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepResult {
    pub count: u64,
    pub witnesses: Vec<ParamAssignment>,
    /// Branches visited.
    pub nodes: u64,
}

fn check_left(front: &TangleFront, table: &PotentialTable, m: Modulus, eps_l: &FilteredComplex) -> Result<()> {
    check_modulus(front, m)?;
    if eps_l.m != m {
        return Err(Error::Invalid(format!("left complex is graded mod {}, expected {}", eps_l.m.0, m.0)));
    }
    if eps_l.n() != front.n_left || eps_l.mu.iter().zip(table.left()).any(|(&a, &b)| !m.congruent(a, b)) {
        return Err(Error::Invalid("left complex does not match the left boundary".into()));
    }
    eps_l.check()
}

/// Depth-first sweep over every parameter assignment, calling `visit` on
/// each surviving branch with its final complex.
pub fn sweep_visit(
    front: &TangleFront,
    m: Modulus,
    eps_l: &FilteredComplex,
    budget: u64,
    mut visit: impl FnMut(&ParamAssignment, &FilteredComplex),
) -> Result<u64> {
    let table = front.propagate_potential()?;
    check_left(front, &table, m, eps_l)?;
    let mut start = eps_l.clone();
    start.mu = table.left().to_vec();
    let f = eps_l.field;
    let choices: Vec<_> = front.slices.iter().zip(&table.info).map(|(s, i)| slice_choices(s, i, m, f)).collect();
    let mut nodes = 0u64;
    let mut assignment = vec![];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        idx: usize,
        state: &FilteredComplex,
        front: &TangleFront,
        table: &PotentialTable,
        choices: &[Vec<(Option<ParamKind>, u64)>],
        budget: u64,
        nodes: &mut u64,
        assignment: &mut ParamAssignment,
        visit: &mut dyn FnMut(&ParamAssignment, &FilteredComplex),
    ) -> Result<()> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::Budget(budget));
        }
        if idx == front.slices.len() {
            visit(assignment, state);
            return Ok(());
        }
        for &(kind, v) in &choices[idx] {
            let t = transfer_slice(state, &front.slices[idx], &table.info[idx], &table.boundaries[idx + 1], v)?;
            if let Transfer::Alive { complex, forced } = t {
                let before = assignment.len();
                if let Some(kind) = kind {
                    assignment.push(Param { slice: idx + 1, kind, value: v });
                }
                if let Some(t) = forced {
                    assignment.push(Param { slice: idx + 1, kind: ParamKind::BasePointUnit, value: t });
                }
                rec(idx + 1, &complex, front, table, choices, budget, nodes, assignment, visit)?;
                assignment.truncate(before);
            }
        }
        Ok(())
    }
    rec(0, &start, front, &table, &choices, budget, &mut nodes, &mut assignment, &mut visit)?;
    Ok(nodes)
}

/// Counts augmentations with left boundary `eps_l` whose right boundary
/// lies in the orbit of `rho_r`.
pub fn sweep_enumerate(
    front: &TangleFront,
    m: Modulus,
    eps_l: &FilteredComplex,
    rho_r: &IsoType,
    opts: SweepOptions,
) -> Result<SweepResult> {
    let mut count = 0;
    let mut witnesses = vec![];
    let nodes = sweep_visit(front, m, eps_l, opts.budget, |a, c| {
        if c.in_orbit(rho_r) {
            count += 1;
            if opts.witnesses {
                witnesses.push(a.clone());
            }
        }
    })?;
    Ok(SweepResult { count, witnesses, nodes })
}

/// Surviving branch counts grouped by the isomorphism type at the right.
pub fn sweep_partition(
    front: &TangleFront,
    m: Modulus,
    eps_l: &FilteredComplex,
    budget: u64,
) -> Result<BTreeMap<IsoType, u64>> {
    let mut out = BTreeMap::new();
    sweep_visit(front, m, eps_l, budget, |_, c| *out.entry(c.barannikov()).or_insert(0) += 1)?;
    Ok(out)
}

/// A handleslide between 1-based strands `top < bottom`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Handleslide {
    pub top: usize,
    pub bottom: usize,
    pub coeff: u64,
}

impl Handleslide {
    fn key(&self) -> (i64, usize) {
        (-(self.top as i64), self.bottom)
    }

    /// `h < h'` in the proper order.
    pub fn precedes(&self, o: &Handleslide) -> bool {
        self.key() < o.key()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramItem {
    Handleslide(Handleslide),
    /// Crossing between strands `k`, `k+1`.
    Crossing(usize),
}

/// A trivial tangle decorated with handleslides and crossings, read left
/// to right as a composition of elementary maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagram {
    pub field: PrimeField,
    pub m: Modulus,
    /// Potentials at the left edge.
    pub mu: Vec<i64>,
    pub items: Vec<DiagramItem>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    /// Type 0.
    InsertTrivial { at: usize, top: usize, bottom: usize },
    /// Type 0.
    RemoveTrivial { at: usize },
    /// Type 1: swap the handleslide and crossing at `at`, `at + 1`.
    SlidePastCrossing { at: usize },
    /// Type 2: swap the handleslides at `at`, `at + 1`.
    Interchange { at: usize },
    /// Type 3: merge the handleslides at `at`, `at + 1`.
    Merge { at: usize },
    /// Type 4: insert `coeff` then `-coeff` at `at`.
    InsertCanceling { at: usize, top: usize, bottom: usize, coeff: u64 },
    /// Type 5: the collection `items[start..start + len]` absorbs the
    /// handleslide next to it on `side`.
    Incorporate { start: usize, len: usize, side: Side },
    /// Type 6: the handleslide `items[start + index]` leaves the collection
    /// `items[start..start + len]` towards `side`.
    Extract { start: usize, len: usize, index: usize, side: Side },
}

fn hs_matrix(f: PrimeField, n: usize, h: &Handleslide) -> Matrix {
    let mut p = identity(n);
    p[h.top - 1][h.bottom - 1] = f.neg(h.coeff);
    p
}

fn swap_matrix(n: usize, k: usize) -> Matrix {
    let mut p = identity(n);
    p.swap(k - 1, k);
    p
}

fn inapplicable(msg: impl Into<String>) -> Error {
    Error::Invalid(format!("move not applicable: {}", msg.into()))
}

/// Primitive Type 2 on two adjacent handleslides (left, right). Returns
/// the new left, right and the spawned handleslide, if any.
fn interchange(f: PrimeField, h1: Handleslide, h2: Handleslide) -> (Handleslide, Handleslide, Option<Handleslide>) {
    let spawn = if h1.bottom == h2.top {
        Some(Handleslide { top: h1.top, bottom: h2.bottom, coeff: f.neg(f.mul(h1.coeff, h2.coeff)) })
    } else if h1.top == h2.bottom {
        Some(Handleslide { top: h2.top, bottom: h1.bottom, coeff: f.mul(h1.coeff, h2.coeff) })
    } else {
        None
    };
    (h2, h1, spawn.filter(|s| s.coeff != 0))
}

/// Brings `v` into proper order (or its reverse) using only interchanges,
/// merges and removal of trivial handleslides.
fn normalize(f: PrimeField, v: &mut Vec<Handleslide>, reversed: bool) {
    let out_of_order = |a: &Handleslide, b: &Handleslide| {
        if reversed {
            a.key() < b.key()
        } else {
            a.key() > b.key()
        }
    };
    for _ in 0..100_000 {
        if let Some(i) = v.iter().position(|h| h.coeff == 0) {
            v.remove(i);
            continue;
        }
        let Some(i) =
            (0..v.len().saturating_sub(1)).find(|&i| out_of_order(&v[i], &v[i + 1]) || v[i].key() == v[i + 1].key())
        else {
            return;
        };
        if v[i].key() == v[i + 1].key() {
            v[i].coeff = f.add(v[i].coeff, v[i + 1].coeff);
            v.remove(i + 1);
        } else {
            let (a, b, s) = interchange(f, v[i], v[i + 1]);
            v[i] = a;
            v[i + 1] = b;
            if let Some(s) = s {
                v.insert(i + 2, s);
            }
        }
    }
    panic!("handleslide normalization did not terminate");
}

pub fn is_properly_ordered(v: &[Handleslide]) -> bool {
    v.windows(2).all(|w| w[0].precedes(&w[1]))
}

impl Diagram {
    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Potentials just before item `at`.
    pub fn mu_at(&self, at: usize) -> Vec<i64> {
        let mut mu = self.mu.clone();
        for it in &self.items[..at] {
            if let DiagramItem::Crossing(k) = it {
                mu.swap(k - 1, *k);
            }
        }
        mu
    }

    /// Product of the elementary matrices, left to right.
    pub fn composite(&self) -> Matrix {
        let n = self.n();
        self.items.iter().fold(identity(n), |acc, it| {
            let e = match it {
                DiagramItem::Handleslide(h) => hs_matrix(self.field, n, h),
                DiagramItem::Crossing(k) => swap_matrix(n, *k),
            };
            mat_mul(self.field, &acc, &e)
        })
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n();
        for (at, it) in self.items.iter().enumerate() {
            match *it {
                DiagramItem::Handleslide(h) => {
                    if !(1 <= h.top && h.top < h.bottom && h.bottom <= n) || h.coeff >= self.field.q {
                        return Err(Error::Invalid(format!("bad handleslide at {at}")));
                    }
                    let mu = self.mu_at(at);
                    if h.coeff != 0 && !self.m.congruent(mu[h.top - 1], mu[h.bottom - 1]) {
                        return Err(Error::Invalid(format!("handleslide at {at} is not graded")));
                    }
                }
                DiagramItem::Crossing(k) => {
                    if !(1 <= k && k < n) {
                        return Err(Error::Invalid(format!("bad crossing at {at}")));
                    }
                }
            }
        }
        Ok(())
    }

    fn hs(&self, at: usize) -> Result<Handleslide> {
        match self.items.get(at) {
            Some(DiagramItem::Handleslide(h)) => Ok(*h),
            _ => Err(inapplicable(format!("no handleslide at {at}"))),
        }
    }

    fn collection(&self, start: usize, len: usize) -> Result<Vec<Handleslide>> {
        let v = (start..start + len).map(|i| self.hs(i)).collect::<Result<Vec<_>>>()?;
        let rev: Vec<_> = v.iter().rev().copied().collect();
        if !is_properly_ordered(&v) && !is_properly_ordered(&rev) {
            return Err(inapplicable("collection is neither properly ordered nor reversed"));
        }
        Ok(v)
    }

    pub fn apply_move(&self, mv: &Move) -> Result<Diagram> {
        let f = self.field;
        let mut out = self.clone();
        let items = &mut out.items;
        match *mv {
            Move::InsertTrivial { at, top, bottom } => {
                let mu = self.mu_at(at.min(self.items.len()));
                if !(1 <= top && top < bottom && bottom <= self.n()) || at > self.items.len() {
                    return Err(inapplicable("bad position"));
                }
                if !self.m.congruent(mu[top - 1], mu[bottom - 1]) {
                    return Err(inapplicable("strands have different potentials"));
                }
                items.insert(at, DiagramItem::Handleslide(Handleslide { top, bottom, coeff: 0 }));
            }
            Move::RemoveTrivial { at } => {
                if self.hs(at)?.coeff != 0 {
                    return Err(inapplicable("coefficient is not zero"));
                }
                items.remove(at);
            }
            Move::SlidePastCrossing { at } => {
                let pair = (self.items.get(at).copied(), self.items.get(at + 1).copied());
                let sw = |k: usize, i: usize| {
                    if i == k {
                        k + 1
                    } else if i == k + 1 {
                        k
                    } else {
                        i
                    }
                };
                let moved = |k: usize, h: Handleslide| -> Result<Handleslide> {
                    if (h.top, h.bottom) == (k, k + 1) {
                        return Err(inapplicable("handleslide sits on the crossing strands"));
                    }
                    Ok(Handleslide { top: sw(k, h.top), bottom: sw(k, h.bottom), coeff: h.coeff })
                };
                match pair {
                    (Some(DiagramItem::Handleslide(h)), Some(DiagramItem::Crossing(k))) => {
                        items[at] = DiagramItem::Crossing(k);
                        items[at + 1] = DiagramItem::Handleslide(moved(k, h)?);
                    }
                    (Some(DiagramItem::Crossing(k)), Some(DiagramItem::Handleslide(h))) => {
                        items[at] = DiagramItem::Handleslide(moved(k, h)?);
                        items[at + 1] = DiagramItem::Crossing(k);
                    }
                    _ => return Err(inapplicable("need a handleslide next to a crossing")),
                }
            }
            Move::Interchange { at } => {
                let (a, b, s) = interchange(f, self.hs(at)?, self.hs(at + 1)?);
                items[at] = DiagramItem::Handleslide(a);
                items[at + 1] = DiagramItem::Handleslide(b);
                if let Some(s) = s {
                    items.insert(at + 2, DiagramItem::Handleslide(s));
                }
            }
            Move::Merge { at } => {
                let (a, b) = (self.hs(at)?, self.hs(at + 1)?);
                if (a.top, a.bottom) != (b.top, b.bottom) {
                    return Err(inapplicable("handleslides on different strands"));
                }
                items[at] = DiagramItem::Handleslide(Handleslide { coeff: f.add(a.coeff, b.coeff), ..a });
                items.remove(at + 1);
            }
            Move::InsertCanceling { at, top, bottom, coeff } => {
                let mu = self.mu_at(at.min(self.items.len()));
                if !(1 <= top && top < bottom && bottom <= self.n()) || at > self.items.len() {
                    return Err(inapplicable("bad position"));
                }
                if coeff != 0 && !self.m.congruent(mu[top - 1], mu[bottom - 1]) {
                    return Err(inapplicable("strands have different potentials"));
                }
                let h = Handleslide { top, bottom, coeff: coeff % f.q };
                let hn = Handleslide { coeff: f.neg(h.coeff), ..h };
                items.splice(at..at, [DiagramItem::Handleslide(h), DiagramItem::Handleslide(hn)]);
            }
            Move::Incorporate { start, len, side } => {
                let v = self.collection(start, len)?;
                let reversed = !is_properly_ordered(&v);
                let (lo, mut work) = match side {
                    Side::Right => {
                        let h = self.hs(start + len)?;
                        (start, v.iter().copied().chain([h]).collect::<Vec<_>>())
                    }
                    Side::Left => {
                        if start == 0 {
                            return Err(inapplicable("nothing to the left"));
                        }
                        let h = self.hs(start - 1)?;
                        (start - 1, [h].into_iter().chain(v.iter().copied()).collect())
                    }
                };
                normalize(f, &mut work, reversed);
                items.splice(
                    lo..start + len + (side == Side::Right) as usize,
                    work.into_iter().map(DiagramItem::Handleslide),
                );
            }
            Move::Extract { start, len, index, side } => {
                let v = self.collection(start, len)?;
                if index >= len {
                    return Err(inapplicable("index outside the collection"));
                }
                let reversed = !is_properly_ordered(&v);
                let mut work = v.clone();
                let h = work[index];
                let mut pos = index;
                let mut spawned = vec![];
                match side {
                    Side::Left => {
                        while pos > 0 {
                            let (a, b, s) = interchange(f, work[pos - 1], work[pos]);
                            work[pos - 1] = a;
                            work[pos] = b;
                            if let Some(s) = s {
                                work.insert(pos + 1, s);
                            }
                            pos -= 1;
                        }
                        work.remove(0);
                    }
                    Side::Right => {
                        while pos + 1 < work.len() {
                            let (a, b, s) = interchange(f, work[pos], work[pos + 1]);
                            work[pos] = a;
                            work[pos + 1] = b;
                            if let Some(s) = s {
                                // Spawns commute with both, so they may go left.
                                work.insert(pos, s);
                                pos += 1;
                            }
                            pos += 1;
                        }
                        work.pop();
                    }
                }
                spawned.append(&mut work);
                normalize(f, &mut spawned, reversed);
                let mut new: Vec<DiagramItem> = spawned.into_iter().map(DiagramItem::Handleslide).collect();
                match side {
                    Side::Left => new.insert(0, DiagramItem::Handleslide(h)),
                    Side::Right => new.push(DiagramItem::Handleslide(h)),
                }
                items.splice(start..start + len, new);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::parse_tangle;
    use crate::types::BoundaryRuling;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn br(s: &str, n: usize) -> BoundaryRuling {
        BoundaryRuling::parse(s, n).unwrap()
    }

    fn trefoil() -> TangleFront {
        parse_tangle("r = 1\nleft = 4\nmu = [2,1,1,0]\nx 2\nx 2\nx 2\n").unwrap()
    }

    fn count(t: &TangleFront, q: u64, l: &str, r: &str) -> u64 {
        let n = t.n_left;
        let k = f(q);
        let tab = t.propagate_potential().unwrap();
        let eps = FilteredComplex::canonical(k, Modulus(2), tab.left().to_vec(), &br(l, n));
        let nr = tab.right().len();
        sweep_enumerate(t, Modulus(2), &eps, &br(r, nr), SweepOptions::default()).unwrap().count
    }

    #[test]
    fn trefoil_counts() {
        let t = trefoil();
        for q in [2u64, 3, 5] {
            assert_eq!(count(&t, q, "(1,2)(3,4)", "(1,2)(3,4)"), 2 * (q - 1) * q + (q - 1).pow(3));
            assert_eq!(count(&t, q, "(1,2)(3,4)", "(1,3)(2,4)"), q + (q - 1).pow(2));
            assert_eq!(count(&t, q, "(1,3)(2,4)", "(1,2)(3,4)"), q * q + q * (q - 1).pow(2));
            assert_eq!(count(&t, q, "(1,3)(2,4)", "(1,3)(2,4)"), q * (q - 1));
        }
    }

    #[test]
    fn crossing_with_zero_value_permutes() {
        let k = f(5);
        let t = trefoil();
        let tab = t.propagate_potential().unwrap();
        let c = FilteredComplex::canonical(k, Modulus(2), vec![2, 1, 1, 0], &br("(1,2)(3,4)", 4));
        let Transfer::Alive { complex, .. } =
            transfer_slice(&c, &t.slices[0], &tab.info[0], &tab.boundaries[1], 0).unwrap()
        else {
            panic!()
        };
        assert_eq!(complex.barannikov(), br("(1,3)(2,4)", 4));
        assert_eq!(complex.d[0][2], c.d[0][1]);
        assert_eq!(complex.d[1][3], c.d[2][3]);
    }

    #[test]
    fn right_cusp_zero_pivot_dies() {
        let k = f(3);
        let t = parse_tangle("r = 0\nleft = 2\nmu = [1,0]\nrc* 1\n").unwrap();
        let tab = t.propagate_potential().unwrap();
        let z = FilteredComplex::zero(k, Modulus(0), vec![1, 0]);
        assert_eq!(transfer_slice(&z, &t.slices[0], &tab.info[0], &[], 0).unwrap(), Transfer::Dead);
    }

    #[test]
    fn base_point_scales_row_and_column() {
        let k = f(5);
        let t = parse_tangle("r = 0\nleft = 3\nmu = [1,0,-1]\nbp 2\n").unwrap();
        let tab = t.propagate_potential().unwrap();
        let mut c = FilteredComplex::zero(k, Modulus(0), vec![1, 0, -1]);
        c.d[0][1] = 1;
        let Transfer::Alive { complex, .. } =
            transfer_slice(&c, &t.slices[0], &tab.info[0], &tab.boundaries[1], 2).unwrap()
        else {
            panic!()
        };
        // Strand 2 has even potential, so lambda = 2 scales column 2.
        assert_eq!(complex.d[0][1], 2);
    }

    #[test]
    fn trivial_with_base_point() {
        let t = parse_tangle("r = 1\nleft = 2\nmu = [1,0]\nbp 1\n").unwrap();
        for q in [2u64, 3, 5] {
            assert_eq!(count(&t, q, "(1,2)", "(1,2)"), q - 1);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let t = trefoil();
        let eps = FilteredComplex::canonical(f(5), Modulus(2), vec![2, 1, 1, 0], &br("(1,2)(3,4)", 4));
        let opts = SweepOptions { budget: 10, witnesses: false };
        assert_eq!(sweep_enumerate(&t, Modulus(2), &eps, &br("(1,2)(3,4)", 4), opts), Err(Error::Budget(10)));
    }

    #[test]
    fn witnesses_are_recorded() {
        let t = trefoil();
        let eps = FilteredComplex::canonical(f(2), Modulus(2), vec![2, 1, 1, 0], &br("(1,2)(3,4)", 4));
        let opts = SweepOptions { budget: 1000, witnesses: true };
        let r = sweep_enumerate(&t, Modulus(2), &eps, &br("(1,2)(3,4)", 4), opts).unwrap();
        assert_eq!(r.witnesses.len(), 5);
        assert!(r.witnesses.iter().all(|w| w.len() == 3));
    }

    #[test]
    fn local_crossing_counts() {
        // Switch / departure / return targets for one degree-0 crossing.
        let t = parse_tangle("r = 1\nleft = 4\nmu = [2,1,1,0]\nx 2\n").unwrap();
        for q in [2u64, 3, 5] {
            let k = f(q);
            let a = br("(1,2)(3,4)", 4);
            let b = br("(1,3)(2,4)", 4);
            let ea = FilteredComplex::canonical(k, Modulus(2), vec![2, 1, 1, 0], &a);
            let pa = sweep_partition(&t, Modulus(2), &ea, 1000).unwrap();
            assert_eq!(pa.get(&a), Some(&(q - 1)));
            assert_eq!(pa.get(&b), Some(&1));
            let eb = FilteredComplex::canonical(k, Modulus(2), vec![2, 1, 1, 0], &b);
            let pb = sweep_partition(&t, Modulus(2), &eb, 1000).unwrap();
            assert_eq!(pb.get(&a), Some(&q));
            assert_eq!(pb.len(), 1);
        }
    }

    fn h(top: usize, bottom: usize, coeff: u64) -> DiagramItem {
        DiagramItem::Handleslide(Handleslide { top, bottom, coeff })
    }

    fn diagram(items: Vec<DiagramItem>) -> Diagram {
        Diagram { field: f(5), m: Modulus(1), mu: vec![0; 4], items }
    }

    #[test]
    fn merge_and_trivial_moves() {
        let d = diagram(vec![h(1, 2, 2), h(1, 2, 4)]);
        let m = d.apply_move(&Move::Merge { at: 0 }).unwrap();
        assert_eq!(m.items, vec![h(1, 2, 1)]);
        assert_eq!(m.composite(), d.composite());
        let z = diagram(vec![h(2, 3, 0)]);
        assert_eq!(z.apply_move(&Move::RemoveTrivial { at: 0 }).unwrap().composite(), z.composite());
        assert!(d.apply_move(&Move::RemoveTrivial { at: 0 }).is_err());
    }

    #[test]
    fn interchange_spawns() {
        let d = diagram(vec![h(1, 2, 2), h(2, 3, 3)]);
        let m = d.apply_move(&Move::Interchange { at: 0 }).unwrap();
        assert_eq!(m.items, vec![h(2, 3, 3), h(1, 2, 2), h(1, 3, 4)]);
        assert_eq!(m.composite(), d.composite());
        let e = diagram(vec![h(2, 3, 2), h(1, 2, 3)]);
        let me = e.apply_move(&Move::Interchange { at: 0 }).unwrap();
        assert_eq!(me.items[2], h(1, 3, 1));
        assert_eq!(me.composite(), e.composite());
    }

    #[test]
    fn slide_past_crossing() {
        let d = diagram(vec![h(1, 3, 2), DiagramItem::Crossing(2)]);
        let m = d.apply_move(&Move::SlidePastCrossing { at: 0 }).unwrap();
        assert_eq!(m.items, vec![DiagramItem::Crossing(2), h(1, 2, 2)]);
        assert_eq!(m.composite(), d.composite());
        let bad = diagram(vec![h(2, 3, 2), DiagramItem::Crossing(2)]);
        assert!(bad.apply_move(&Move::SlidePastCrossing { at: 0 }).is_err());
    }
}
