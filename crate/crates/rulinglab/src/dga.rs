//! The LCH DGA of a simple tangle front: generators, gradings, the disk
//! differential, co-restriction to the right boundary, and brute-force
//! augmentations.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::front::{right_moving, PotentialTable, Slice, SliceInfo, TangleFront};
use crate::linalg::{FilteredComplex, Matrix, PrimeField};
use crate::mcs::{Param, ParamAssignment, ParamKind};
use crate::types::{IsoType, Modulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// `slice` is 1-based.
    Crossing {
        slice: usize,
    },
    RightCusp {
        slice: usize,
        marked: bool,
    },
    /// Pair of 1-based left endpoints `i < j`.
    LeftPair {
        i: usize,
        j: usize,
    },
    BasePointUnit {
        slice: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub kind: GeneratorKind,
    /// Reduced mod `2r`.
    pub degree: i64,
}

/// A noncommutative polynomial over `Z[t_1^{±1}, ..., t_B^{±1}]`. The
/// units are central, so each term is a coefficient, an exponent vector
/// and a word in the non-invertible generators.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NCElement {
    pub nvars: usize,
    terms: BTreeMap<(Vec<usize>, Vec<i32>), i64>,
}

impl NCElement {
    pub fn zero(nvars: usize) -> Self {
        NCElement { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::monomial(nvars, 1, vec![0; nvars], vec![])
    }

    pub fn generator(nvars: usize, g: usize) -> Self {
        Self::monomial(nvars, 1, vec![0; nvars], vec![g])
    }

    /// `t_j^e`.
    pub fn unit(nvars: usize, j: usize, e: i32) -> Self {
        let mut exps = vec![0; nvars];
        exps[j] = e;
        Self::monomial(nvars, 1, exps, vec![])
    }

    pub fn monomial(nvars: usize, coeff: i64, exps: Vec<i32>, word: Vec<usize>) -> Self {
        let mut out = Self::zero(nvars);
        out.add_term(coeff, exps, word);
        out
    }

    fn add_term(&mut self, coeff: i64, exps: Vec<i32>, word: Vec<usize>) {
        if coeff == 0 {
            return;
        }
        let key = (word, exps);
        let c = self.terms.entry(key.clone()).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.terms.remove(&key);
        }
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

    /// Terms as `(coefficient, unit exponents, word)`.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &[i32], &[usize])> {
        self.terms.iter().map(|((w, e), &c)| (c, e.as_slice(), w.as_slice()))
    }

    pub fn add(&self, o: &NCElement) -> NCElement {
        let mut out = self.clone();
        for ((w, e), &c) in &o.terms {
            out.add_term(c, e.clone(), w.clone());
        }
        out
    }

    pub fn scale(&self, k: i64) -> NCElement {
        let mut out = Self::zero(self.nvars);
        for ((w, e), &c) in &self.terms {
            out.add_term(c * k, e.clone(), w.clone());
        }
        out
    }

    pub fn mul(&self, o: &NCElement) -> NCElement {
        let mut out = Self::zero(self.nvars);
        for ((w1, e1), &c1) in &self.terms {
            for ((w2, e2), &c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let w = w1.iter().chain(w2).copied().collect();
                out.add_term(c1 * c2, e, w);
            }
        }
        out
    }

    /// Evaluates under `values` (by generator index) and `units` (by
    /// base-point number).
    pub fn eval(&self, f: PrimeField, values: &[u64], units: &[u64]) -> u64 {
        let mut acc = 0;
        for ((w, e), &c) in &self.terms {
            let mut v = f.from_i64(c);
            for (j, &x) in e.iter().enumerate() {
                let base = if x < 0 { f.inv(units[j]) } else { units[j] };
                v = f.mul(v, f.pow(base, x.unsigned_abs() as u64));
            }
            for &g in w {
                v = f.mul(v, values[g]);
            }
            acc = f.add(acc, v);
        }
        acc
    }

    pub fn to_json(&self, gens: &[Generator], units: &[usize]) -> serde_json::Value {
        serde_json::Value::Array(
            self.sorted()
                .into_iter()
                .map(|(c, e, w)| {
                    let u: BTreeMap<String, i32> = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &x)| x != 0)
                        .map(|(j, &x)| (gens[units[j]].name.clone(), x))
                        .collect();
                    json!({
                        "coeff": c,
                        "units": u,
                        "word": w.iter().map(|&g| gens[g].name.clone()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }

    fn sorted(&self) -> Vec<(i64, &[i32], &[usize])> {
        let mut v: Vec<_> = self.terms().collect();
        v.sort_by(|a, b| (a.2.len(), a.2, a.1).cmp(&(b.2.len(), b.2, b.1)));
        v
    }

    /// Renders with the given generator table.
    pub fn display<'a>(&'a self, gens: &'a [Generator], units: &'a [usize]) -> NCDisplay<'a> {
        NCDisplay { el: self, gens, units }
    }
}

pub struct NCDisplay<'a> {
    el: &'a NCElement,
    gens: &'a [Generator],
    units: &'a [usize],
}

impl fmt::Display for NCDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.el.sorted();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (c, e, w)) in terms.into_iter().enumerate() {
            let mut factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(j, &x)| {
                    let t = &self.gens[self.units[j]].name;
                    if x == 1 {
                        t.clone()
                    } else {
                        format!("{t}^{x}")
                    }
                })
                .collect();
            factors.extend(w.iter().map(|&g| self.gens[g].name.clone()));
            let body = factors.join("*");
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if n == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            match (mag, body.is_empty()) {
                (_, true) => write!(f, "{mag}")?,
                (1, false) => write!(f, "{body}")?,
                (_, false) => write!(f, "{mag}*{body}")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaPresentation {
    pub r: u32,
    pub generators: Vec<Generator>,
    /// Generator indices of the base-point units, in slice order.
    pub units: Vec<usize>,
    /// Differential of each generator; `None` until computed.
    pub differential: Vec<Option<NCElement>>,
}

impl DgaPresentation {
    pub fn nvars(&self) -> usize {
        self.units.len()
    }

    pub fn modulus(&self) -> Modulus {
        Modulus(2 * self.r)
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn pair(&self, i: usize, j: usize) -> Option<usize> {
        self.generators.iter().position(|g| g.kind == GeneratorKind::LeftPair { i, j })
    }

    fn slice_generator(&self, slice: usize) -> Option<usize> {
        self.generators.iter().position(|g| match g.kind {
            GeneratorKind::Crossing { slice: s } | GeneratorKind::RightCusp { slice: s, .. } => s == slice,
            _ => false,
        })
    }

    fn slice_unit(&self, slice: usize) -> Option<usize> {
        self.units.iter().position(|&g| self.generators[g].kind == GeneratorKind::BasePointUnit { slice })
    }

    pub fn is_unit(&self, g: usize) -> bool {
        matches!(self.generators[g].kind, GeneratorKind::BasePointUnit { .. })
    }

    /// Degree of a word, reduced.
    pub fn word_degree(&self, w: &[usize]) -> i64 {
        self.modulus().reduce(w.iter().map(|&g| self.generators[g].degree).sum())
    }

    /// Extends the differential to `x` by the graded Leibniz rule.
    pub fn apply(&self, x: &NCElement) -> Result<NCElement> {
        let nv = self.nvars();
        let mut out = NCElement::zero(nv);
        for (c, e, w) in x.terms() {
            let mut prefix_deg = 0i64;
            for (p, &g) in w.iter().enumerate() {
                let dg = self.differential[g].as_ref().ok_or_else(|| {
                    Error::Invalid(format!("differential of {} not computed", self.generators[g].name))
                })?;
                let sign = if prefix_deg.rem_euclid(2) == 0 { 1 } else { -1 };
                let left = NCElement::monomial(nv, c * sign, e.to_vec(), w[..p].to_vec());
                let right = NCElement::monomial(nv, 1, vec![0; nv], w[p + 1..].to_vec());
                out = out.add(&left.mul(dg).mul(&right));
                prefix_deg += self.generators[g].degree;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gens: Vec<_> = self
            .generators
            .iter()
            .map(|g| {
                let (kind, extra) = match g.kind {
                    GeneratorKind::Crossing { slice } => ("crossing", json!({ "slice": slice })),
                    GeneratorKind::RightCusp { slice, marked } => {
                        ("rightCusp", json!({ "slice": slice, "marked": marked }))
                    }
                    GeneratorKind::LeftPair { i, j } => ("leftPair", json!({ "i": i, "j": j })),
                    GeneratorKind::BasePointUnit { slice } => ("basePointUnit", json!({ "slice": slice })),
                };
                json!({ "name": g.name, "kind": kind, "degree": g.degree, "location": extra })
            })
            .collect();
        let diff: serde_json::Map<String, serde_json::Value> = self
            .generators
            .iter()
            .zip(&self.differential)
            .filter_map(|(g, d)| d.as_ref().map(|d| (g.name.clone(), d.to_json(&self.generators, &self.units))))
            .collect();
        json!({ "r": self.r, "generators": gens, "differential": diff })
    }
}

impl fmt::Display for DgaPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, d) in self.generators.iter().zip(&self.differential) {
            if matches!(g.kind, GeneratorKind::BasePointUnit { .. }) {
                writeln!(f, "|{}| = 0 (unit)", g.name)?;
                continue;
            }
            write!(f, "|{}| = {}", g.name, g.degree)?;
            if let Some(d) = d {
                write!(f, "    d{} = {}", g.name, d.display(&self.generators, &self.units))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn pair_name(i: usize, j: usize) -> String {
    if i < 10 && j < 10 {
        format!("a{i}{j}")
    } else {
        format!("a{i},{j}")
    }
}

/// First slice index of the trailing block of right cusps (and base
/// points), or an error if the front is not simple.
fn simple_block(front: &TangleFront) -> Result<usize> {
    let counts = front.strand_counts()?;
    let mut start = front.slices.len();
    while start > 0 && matches!(front.slices[start - 1], Slice::RightCusp { .. } | Slice::BasePoint(_)) {
        start -= 1;
    }
    if let Some(i) = front.slices[..start].iter().position(|s| matches!(s, Slice::RightCusp { .. })) {
        return Err(Error::Unsupported(format!(
            "front is not simple: right cusp at slice {} precedes a crossing or left cusp",
            i + 1
        )));
    }
    let mut remaining: Vec<usize> = (1..=counts[start]).collect();
    for (i, s) in front.slices.iter().enumerate().skip(start) {
        if let Slice::RightCusp { k, .. } = *s {
            let (a, b) = (remaining[k - 1], remaining[k]);
            if b != a + 1 {
                return Err(Error::Unsupported(format!(
                    "front is not simple: right cusp at slice {} is nested",
                    i + 1
                )));
            }
            remaining.drain(k - 1..=k);
        }
    }
    Ok(start)
}

pub fn is_simple(front: &TangleFront) -> bool {
    simple_block(front).is_ok()
}

/// Generators and degrees.
pub fn build_dga(front: &TangleFront) -> Result<DgaPresentation> {
    simple_block(front)?;
    let table = front.propagate_potential()?;
    let modulus = Modulus(2 * front.r);
    let mut generators = vec![];
    let mut units = vec![];
    let mut label = 0;
    for (s, (slice, info)) in front.slices.iter().zip(&table.info).enumerate() {
        match (*slice, *info) {
            (Slice::Crossing(_), SliceInfo::Crossing { degree, .. }) => {
                label += 1;
                generators.push(Generator {
                    name: format!("a{label}"),
                    kind: GeneratorKind::Crossing { slice: s + 1 },
                    degree: modulus.reduce(degree),
                });
            }
            (Slice::RightCusp { marked, .. }, _) => {
                label += 1;
                generators.push(Generator {
                    name: format!("a{label}"),
                    kind: GeneratorKind::RightCusp { slice: s + 1, marked },
                    degree: modulus.reduce(1),
                });
            }
            _ => {}
        }
    }
    let mu = table.left();
    for i in 1..=mu.len() {
        for j in i + 1..=mu.len() {
            generators.push(Generator {
                name: pair_name(i, j),
                kind: GeneratorKind::LeftPair { i, j },
                degree: modulus.reduce(mu[i - 1] - mu[j - 1] - 1),
            });
        }
    }
    for (s, slice) in front.slices.iter().enumerate() {
        if matches!(slice, Slice::BasePoint(_) | Slice::RightCusp { marked: true, .. }) {
            units.push(generators.len());
            generators.push(Generator {
                name: format!("t{}", units.len()),
                kind: GeneratorKind::BasePointUnit { slice: s + 1 },
                degree: 0,
            });
        }
    }
    let n = generators.len();
    Ok(DgaPresentation { r: front.r, generators, units, differential: vec![None; n] })
}

struct DiskCtx<'a> {
    front: &'a TangleFront,
    table: &'a PotentialTable,
    pres: &'a DgaPresentation,
}

#[derive(Clone)]
struct Partial {
    sign: i64,
    exps: Vec<i32>,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

/// One step of a leftward disk sweep across a crossing at `c`, starting
/// from boundary strands `(u, l)` on its right. Each option is the new
/// state together with an optional corner (on the upper or lower edge)
/// and its sign.
fn crossing_step(c: usize, u: usize, l: usize, deg: i64) -> Vec<((usize, usize), Option<(bool, i64)>)> {
    let bottom_sign = if (deg + 1).rem_euclid(2) == 0 { 1 } else { -1 };
    if (u, l) == (c, c + 1) {
        vec![]
    } else if u == c + 1 {
        vec![((c, l), None), ((c + 1, l), Some((true, bottom_sign)))]
    } else if u == c {
        vec![((c + 1, l), None)]
    } else if l == c {
        vec![((u, c + 1), None), ((u, c), Some((false, 1)))]
    } else if l == c + 1 {
        vec![((u, c), None)]
    } else {
        vec![((u, l), None)]
    }
}

impl DiskCtx<'_> {
    fn unit_exp(&self, boundary: usize, k: usize, upper: bool) -> i32 {
        let rm = right_moving(self.table.boundaries[boundary][k - 1]);
        // Upper edges run leftward, lower edges rightward.
        if rm != upper {
            1
        } else {
            -1
        }
    }

    fn sweep(&self, idx: usize, u: usize, l: usize, acc: Partial, out: &mut NCElement) {
        let nv = self.pres.nvars();
        if idx == 0 {
            let pair = self.pres.pair(u, l).expect("pair generator");
            let word = acc.upper.iter().copied().chain([pair]).chain(acc.lower.iter().rev().copied()).collect();
            out.add_term(acc.sign, acc.exps, word);
            return;
        }
        let s = idx - 1;
        match self.front.slices[s] {
            Slice::Crossing(c) => {
                let g = self.pres.slice_generator(s + 1).expect("crossing generator");
                for ((nu, nl), corner) in crossing_step(c, u, l, self.pres.generators[g].degree) {
                    let mut a = acc.clone();
                    if let Some((upper, sign)) = corner {
                        a.sign *= sign;
                        if upper {
                            a.upper.push(g);
                        } else {
                            a.lower.push(g);
                        }
                    }
                    self.sweep(idx - 1, nu, nl, a, out);
                }
            }
            Slice::LeftCusp { k, .. } => {
                if (u, l) == (k, k + 1) {
                    let word = acc.upper.iter().copied().chain(acc.lower.iter().rev().copied()).collect();
                    out.add_term(acc.sign, acc.exps, word);
                } else if u == k || u == k + 1 || l == k || l == k + 1 {
                } else {
                    let sh = |x: usize| if x > k + 1 { x - 2 } else { x };
                    self.sweep(idx - 1, sh(u), sh(l), acc, out);
                }
            }
            Slice::RightCusp { k, .. } => {
                debug_assert!(!(u < k && l >= k), "nested right cusp inside a disk");
                let sh = |x: usize| if x >= k { x + 2 } else { x };
                self.sweep(idx - 1, sh(u), sh(l), acc, out);
            }
            Slice::BasePoint(k) => {
                let mut a = acc;
                if u == k || l == k {
                    let j = self.pres.slice_unit(s + 1).expect("unit");
                    a.exps[j] += self.unit_exp(idx, k, u == k);
                }
                debug_assert_eq!(a.exps.len(), nv);
                self.sweep(idx - 1, u, l, a, out);
            }
        }
    }
}

/// Fills in the differential of every generator.
pub fn differential(mut pres: DgaPresentation, front: &TangleFront) -> Result<DgaPresentation> {
    simple_block(front)?;
    let table = front.propagate_potential()?;
    let nv = pres.nvars();
    let modulus = pres.modulus();
    let mut diffs = vec![];
    {
        let ctx = DiskCtx { front, table: &table, pres: &pres };
        for (gi, g) in pres.generators.iter().enumerate() {
            let d = match g.kind {
                GeneratorKind::BasePointUnit { .. } => NCElement::zero(nv),
                GeneratorKind::LeftPair { i, j } => {
                    let mut d = NCElement::zero(nv);
                    for k in i + 1..j {
                        let ik = pres.pair(i, k).unwrap();
                        let kj = pres.pair(k, j).unwrap();
                        let sign = if (pres.generators[ik].degree + 1).rem_euclid(2) == 0 { 1 } else { -1 };
                        d.add_term(sign, vec![0; nv], vec![ik, kj]);
                    }
                    d
                }
                GeneratorKind::Crossing { slice } => {
                    let Slice::Crossing(c) = front.slices[slice - 1] else { unreachable!() };
                    let mut d = NCElement::zero(nv);
                    let start = Partial { sign: 1, exps: vec![0; nv], upper: vec![], lower: vec![] };
                    ctx.sweep(slice - 1, c, c + 1, start, &mut d);
                    d
                }
                GeneratorKind::RightCusp { slice, marked } => {
                    let Slice::RightCusp { k, .. } = front.slices[slice - 1] else { unreachable!() };
                    let SliceInfo::RightCusp { sigma, .. } = table.info[slice - 1] else { unreachable!() };
                    let mut d = if marked {
                        NCElement::unit(nv, pres.slice_unit(slice).unwrap(), sigma as i32)
                    } else {
                        NCElement::one(nv)
                    };
                    let start = Partial { sign: 1, exps: vec![0; nv], upper: vec![], lower: vec![] };
                    ctx.sweep(slice - 1, k, k + 1, start, &mut d);
                    d
                }
            };
            for (_, _, w) in d.terms() {
                let dw = pres.word_degree(w);
                if !modulus.congruent(dw, g.degree - 1) {
                    return Err(Error::Invalid(format!(
                        "differential of {} does not lower degree: term of degree {dw}",
                        g.name
                    )));
                }
            }
            diffs.push((gi, d));
        }
    }
    for (gi, d) in diffs {
        pres.differential[gi] = Some(d);
    }
    Ok(pres)
}

/// Builds the full presentation.
pub fn dga(front: &TangleFront) -> Result<DgaPresentation> {
    differential(build_dga(front)?, front)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareReport {
    /// Generators whose `∂∂` is nonzero, with the residue rendered.
    pub residues: Vec<(String, String)>,
}

impl SquareReport {
    pub fn passed(&self) -> bool {
        self.residues.is_empty()
    }
}

pub fn check_d_squared(pres: &DgaPresentation) -> Result<SquareReport> {
    let mut residues = vec![];
    for (g, d) in pres.generators.iter().zip(&pres.differential) {
        let d = d.as_ref().ok_or_else(|| Error::Invalid("presentation is incomplete".into()))?;
        let dd = pres.apply(d)?;
        if !dd.is_zero() {
            residues.push((g.name.clone(), dd.display(&pres.generators, &pres.units).to_string()));
        }
    }
    Ok(SquareReport { residues })
}

/// Images of the right-boundary pair generators `b_ij` in `A(T)`,
/// composed slice by slice. Indexed `[i-1][j-1]` for `i < j`.
pub fn right_boundary_images(pres: &DgaPresentation, front: &TangleFront) -> Result<Vec<Vec<NCElement>>> {
    simple_block(front)?;
    let table = front.propagate_potential()?;
    let nv = pres.nvars();
    let n0 = table.left().len();
    let mut img: Vec<Vec<NCElement>> = (1..=n0)
        .map(|i| {
            (1..=n0)
                .map(|j| if i < j { NCElement::generator(nv, pres.pair(i, j).unwrap()) } else { NCElement::zero(nv) })
                .collect()
        })
        .collect();
    for (s, slice) in front.slices.iter().enumerate() {
        let n = table.boundaries[s + 1].len();
        let get = |img: &Vec<Vec<NCElement>>, i: usize, j: usize| img[i - 1][j - 1].clone();
        let mut next = vec![vec![NCElement::zero(nv); n]; n];
        for i in 1..=n {
            for j in i + 1..=n {
                next[i - 1][j - 1] = match *slice {
                    Slice::Crossing(c) => {
                        let g = pres.slice_generator(s + 1).unwrap();
                        let gen = NCElement::generator(nv, g);
                        let mut acc = NCElement::zero(nv);
                        for ((u, l), corner) in crossing_step(c, i, j, pres.generators[g].degree) {
                            let inner = get(&img, u, l);
                            acc = acc.add(&match corner {
                                None => inner,
                                Some((true, sign)) => gen.scale(sign).mul(&inner),
                                Some((false, sign)) => inner.mul(&gen.scale(sign)),
                            });
                        }
                        acc
                    }
                    Slice::LeftCusp { k, .. } => {
                        if (i, j) == (k, k + 1) {
                            NCElement::one(nv)
                        } else if [k, k + 1].contains(&i) || [k, k + 1].contains(&j) {
                            NCElement::zero(nv)
                        } else {
                            let sh = |x: usize| if x > k + 1 { x - 2 } else { x };
                            get(&img, sh(i), sh(j))
                        }
                    }
                    Slice::RightCusp { k, marked } => {
                        let sh = |x: usize| if x >= k { x + 2 } else { x };
                        let (a, b) = (sh(i), sh(j));
                        let direct = get(&img, a, b);
                        if i < k && j >= k {
                            let SliceInfo::RightCusp { sigma, .. } = table.info[s] else { unreachable!() };
                            let cusp = NCElement::generator(nv, pres.slice_generator(s + 1).unwrap());
                            let t = if marked {
                                NCElement::unit(nv, pres.slice_unit(s + 1).unwrap(), -(sigma as i32))
                            } else {
                                NCElement::one(nv)
                            };
                            let left = get(&img, a, k + 1).add(&get(&img, a, k).mul(&cusp));
                            let right = get(&img, k, b).add(&cusp.mul(&get(&img, k + 1, b)));
                            direct.add(&t.mul(&left).mul(&right))
                        } else {
                            direct
                        }
                    }
                    Slice::BasePoint(k) => {
                        let mut e = 0;
                        let rm = right_moving(table.boundaries[s + 1][k - 1]);
                        if i == k {
                            e += if rm { -1 } else { 1 };
                        }
                        if j == k {
                            e += if rm { 1 } else { -1 };
                        }
                        let x = get(&img, i, j);
                        if e == 0 {
                            x
                        } else {
                            NCElement::unit(nv, pres.slice_unit(s + 1).unwrap(), e).mul(&x)
                        }
                    }
                };
            }
        }
        img = next;
    }
    Ok(img)
}

/// Checks that the co-restriction to the right boundary is a chain map.
pub fn check_corestriction(pres: &DgaPresentation, front: &TangleFront) -> Result<Vec<(usize, usize)>> {
    let table = front.propagate_potential()?;
    let mu = table.right();
    let img = right_boundary_images(pres, front)?;
    let modulus = pres.modulus();
    let mut bad = vec![];
    for i in 1..=mu.len() {
        for j in i + 1..=mu.len() {
            let lhs = pres.apply(&img[i - 1][j - 1])?;
            let mut rhs = NCElement::zero(pres.nvars());
            for k in i + 1..j {
                let sign = if modulus.reduce(mu[i - 1] - mu[k - 1]).rem_euclid(2) == 0 { 1 } else { -1 };
                rhs = rhs.add(&img[i - 1][k - 1].mul(&img[k - 1][j - 1]).scale(sign));
            }
            if lhs != rhs {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

/// Numeric co-restriction across one right cusp at `k`: `eps` holds the
/// left pair values `[i-1][j-1]`, `a` the cusp value, `t` the base-point
/// unit (1 if unmarked). Returns the right pair values.
pub fn corestrict_right_cusp(f: PrimeField, eps: &Matrix, k: usize, a: u64, t: u64, sigma: i8) -> Result<Matrix> {
    if t.is_multiple_of(f.q) {
        return Err(Error::Invalid("base-point value must be a unit".into()));
    }
    let n = eps.len();
    if k == 0 || k + 1 > n {
        return Err(Error::Invalid("cusp outside the strands".into()));
    }
    let ts = if sigma == 1 { f.inv(t) } else { t };
    let e = |i: usize, j: usize| eps[i - 1][j - 1];
    let sh = |x: usize| if x >= k { x + 2 } else { x };
    let mut out = vec![vec![0; n - 2]; n - 2];
    for i in 1..=n - 2 {
        for j in i + 1..=n - 2 {
            let (p, q) = (sh(i), sh(j));
            let mut v = e(p, q);
            if i < k && j >= k {
                let l = f.add(e(p, k + 1), f.mul(e(p, k), a));
                let r = f.add(e(k, q), f.mul(a, e(k + 1, q)));
                v = f.add(v, f.mul(ts, f.mul(l, r)));
            }
            out[i - 1][j - 1] = v;
        }
    }
    Ok(out)
}

/// One augmentation: values indexed by generator (units included).
pub type Augmentation = Vec<u64>;

/// Every graded augmentation over `F_q`. With `eps_left`, the pair
/// generators are pinned to its values.
pub fn brute_force_augmentations(
    pres: &DgaPresentation,
    m: Modulus,
    f: PrimeField,
    eps_left: Option<&FilteredComplex>,
    budget: u64,
) -> Result<Vec<Augmentation>> {
    if !m.divides(2 * pres.r) {
        return Err(Error::Invalid(format!("m = {} does not divide 2r = {}", m.0, 2 * pres.r)));
    }
    let eps_vals = eps_left.map(|c| c.eps_values());
    let domains: Vec<Vec<u64>> = pres
        .generators
        .iter()
        .map(|g| match g.kind {
            GeneratorKind::BasePointUnit { .. } => f.units().collect(),
            GeneratorKind::LeftPair { i, j } if eps_vals.is_some() => vec![eps_vals.as_ref().unwrap()[i - 1][j - 1]],
            _ if m.is_zero(g.degree) => f.elements().collect(),
            _ => vec![0],
        })
        .collect();
    let total = domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64));
    match total {
        Some(t) if t <= budget => {}
        _ => return Err(Error::Budget(budget)),
    }
    let diffs: Vec<&NCElement> = pres
        .differential
        .iter()
        .map(|d| d.as_ref().ok_or_else(|| Error::Invalid("presentation is incomplete".into())))
        .collect::<Result<_>>()?;
    let mut out = vec![];
    let mut vals: Vec<u64> = domains.iter().map(|d| d[0]).collect();
    let mut idx = vec![0usize; domains.len()];
    loop {
        let units: Vec<u64> = pres.units.iter().map(|&g| vals[g]).collect();
        if diffs.iter().all(|d| d.eval(f, &vals, &units) == 0) {
            out.push(vals.clone());
        }
        let mut p = 0;
        loop {
            if p == domains.len() {
                return Ok(out);
            }
            idx[p] += 1;
            if idx[p] < domains[p].len() {
                vals[p] = domains[p][idx[p]];
                break;
            }
            idx[p] = 0;
            vals[p] = domains[p][0];
            p += 1;
        }
    }
}

/// The right-boundary complex of an augmentation.
pub fn right_complex(
    pres: &DgaPresentation,
    images: &[Vec<NCElement>],
    mu_right: &[i64],
    m: Modulus,
    f: PrimeField,
    aug: &Augmentation,
) -> FilteredComplex {
    let units: Vec<u64> = pres.units.iter().map(|&g| aug[g]).collect();
    let n = mu_right.len();
    let eps: Matrix =
        (0..n).map(|i| (0..n).map(|j| if i < j { images[i][j].eval(f, aug, &units) } else { 0 }).collect()).collect();
    FilteredComplex::from_eps(f, m, mu_right.to_vec(), &eps)
}

/// The sweep-style parameter record of an augmentation.
pub fn as_params(pres: &DgaPresentation, m: Modulus, aug: &Augmentation) -> ParamAssignment {
    let mut out = vec![];
    let mut slices: Vec<(usize, usize)> = pres
        .generators
        .iter()
        .enumerate()
        .filter_map(|(g, gen)| match gen.kind {
            GeneratorKind::Crossing { slice }
            | GeneratorKind::RightCusp { slice, .. }
            | GeneratorKind::BasePointUnit { slice } => Some((slice, g)),
            _ => None,
        })
        .collect();
    slices.sort_by_key(|&(s, g)| (s, pres.is_unit(g)));
    for (slice, g) in slices {
        let kind = match pres.generators[g].kind {
            GeneratorKind::Crossing { .. } => ParamKind::CrossingValue,
            GeneratorKind::RightCusp { .. } if m.0 == 1 => ParamKind::CuspValue,
            GeneratorKind::RightCusp { .. } => continue,
            _ => ParamKind::BasePointUnit,
        };
        out.push(Param { slice, kind, value: aug[g] });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DgaCount {
    pub count: u64,
    pub witnesses: Vec<ParamAssignment>,
}

/// Brute-force count of augmentations with `ε_L = eps_left` and right
/// boundary in the orbit of `rho_r`.
pub fn dga_count(
    front: &TangleFront,
    m: Modulus,
    eps_left: &FilteredComplex,
    rho_r: &IsoType,
    budget: u64,
) -> Result<DgaCount> {
    let pres = dga(front)?;
    let table = front.propagate_potential()?;
    let images = right_boundary_images(&pres, front)?;
    let f = eps_left.field;
    let mut witnesses = vec![];
    for aug in brute_force_augmentations(&pres, m, f, Some(eps_left), budget)? {
        let c = right_complex(&pres, &images, table.right(), m, f, &aug);
        if c.in_orbit(rho_r) {
            witnesses.push(as_params(&pres, m, &aug));
        }
    }
    witnesses.sort();
    Ok(DgaCount { count: witnesses.len() as u64, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::parse_tangle;
    use crate::mcs::{sweep_enumerate, SweepOptions};
    use crate::types::BoundaryRuling;

    fn trefoil() -> TangleFront {
        parse_tangle("r = 1\nleft = 4\nmu = [2,1,1,0]\nx 2\nx 2\nx 2\n").unwrap()
    }

    fn show(p: &DgaPresentation, name: &str) -> String {
        let g = p.index(name).unwrap();
        p.differential[g].as_ref().unwrap().display(&p.generators, &p.units).to_string()
    }

    #[test]
    fn trefoil_generators_and_differential() {
        let p = dga(&trefoil()).unwrap();
        let deg = |s: &str| p.generators[p.index(s).unwrap()].degree;
        assert_eq!([deg("a1"), deg("a2"), deg("a3")], [0, 0, 0]);
        assert_eq!(deg("a23"), 1); // -1 mod 2
        assert_eq!([deg("a14"), deg("a12"), deg("a13"), deg("a24"), deg("a34")], [1, 0, 0, 0, 0]);
        assert_eq!(show(&p, "a1"), "a23");
        assert_eq!(show(&p, "a2"), "0");
        assert_eq!(show(&p, "a3"), "0");
        assert!(check_d_squared(&p).unwrap().passed());
    }

    #[test]
    fn trefoil_integer_grading() {
        let t = parse_tangle("r = 0\nleft = 4\nmu = [2,1,1,0]\nx 2\nx 2\nx 2\n").unwrap();
        let p = dga(&t).unwrap();
        assert_eq!(p.generators[p.index("a23").unwrap()].degree, -1);
        assert_eq!(show(&p, "a14"), "-a12*a24 - a13*a34");
    }

    #[test]
    fn four_strand_cusp_example() {
        let t = parse_tangle("r = 0\nleft = 4\nmu = [1,1,0,0]\nx 1\nrc 2\n").unwrap();
        let p = dga(&t).unwrap();
        assert_eq!(show(&p, "a1"), "a12");
        assert_eq!(show(&p, "a2"), "1 + a13 - a1*a23");
        assert!(check_d_squared(&p).unwrap().passed());
    }

    #[test]
    fn trivial_tangles() {
        let t = parse_tangle("r = 0\nleft = 2\nmu = [1,0]\n").unwrap();
        let p = dga(&t).unwrap();
        assert_eq!(p.generators.len(), 1);
        assert_eq!(p.generators[0].degree, 0);
        assert_eq!(show(&p, "a12"), "0");
        let lone = parse_tangle("r = 0\nleft = 0\nlc 1\n").unwrap();
        assert!(dga(&lone).unwrap().generators.is_empty());
    }

    #[test]
    fn non_simple_is_unsupported() {
        let t = parse_tangle("r = 1\nleft = 4\nmu = [1,0,1,0]\nrc 1\nx 1\n").unwrap();
        assert!(matches!(build_dga(&t), Err(Error::Unsupported(_))));
        let nested = parse_tangle("r = 1\nleft = 4\nmu = [1,1,0,0]\nrc 2\nrc 1\n").unwrap();
        assert!(matches!(build_dga(&nested), Err(Error::Unsupported(_))));
    }

    #[test]
    fn trefoil_corestriction_images() {
        let t = trefoil();
        let p = dga(&t).unwrap();
        let img = right_boundary_images(&p, &t).unwrap();
        let s = |i: usize, j: usize| img[i - 1][j - 1].display(&p.generators, &p.units).to_string();
        assert_eq!(s(1, 2), "a13 + a12*a1 + a12*a3 + a13*a2*a3 + a12*a1*a2*a3");
        assert_eq!(s(1, 3), "a12 + a13*a2 + a12*a1*a2");
        assert_eq!(s(1, 4), "a14");
        assert_eq!(s(2, 3), "0");
        assert_eq!(s(2, 4), "a34 - a2*a24 + a2*a1*a34");
        assert_eq!(s(3, 4), "a24 - a1*a34 - a3*a34 + a3*a2*a24 - a3*a2*a1*a34");
        assert!(check_corestriction(&p, &t).unwrap().is_empty());
    }

    #[test]
    fn right_cusp_corestriction_formula() {
        let t = parse_tangle("r = 0\nleft = 4\nmu = [3,1,0,-1]\nrc* 2\n").unwrap();
        let p = dga(&t).unwrap();
        let img = right_boundary_images(&p, &t).unwrap();
        let s = img[0][1].display(&p.generators, &p.units).to_string();
        let tab = t.propagate_potential().unwrap();
        let SliceInfo::RightCusp { sigma, .. } = tab.info[0] else { panic!() };
        let te = if sigma == 1 { "t1^-1" } else { "t1" };
        assert_eq!(s, format!("a14 + {te}*a13*a24 + {te}*a12*a1*a24 + {te}*a13*a1*a34 + {te}*a12*a1*a1*a34"));
        assert!(check_corestriction(&p, &t).unwrap().is_empty());
    }

    #[test]
    fn brute_force_trivial() {
        let t = parse_tangle("r = 0\nleft = 2\nmu = [1,0]\n").unwrap();
        let p = dga(&t).unwrap();
        for q in [2u64, 3, 5] {
            let f = PrimeField::new(q).unwrap();
            assert_eq!(brute_force_augmentations(&p, Modulus(0), f, None, 1000).unwrap().len() as u64, q);
        }
    }

    #[test]
    fn odd_generators_forced_to_zero() {
        let p = dga(&trefoil()).unwrap();
        let f = PrimeField::new(2).unwrap();
        let a14 = p.index("a14").unwrap();
        for aug in brute_force_augmentations(&p, Modulus(2), f, None, 1 << 20).unwrap() {
            assert_eq!(aug[a14], 0);
        }
    }

    #[test]
    fn trefoil_matches_sweep_per_assignment() {
        let t = trefoil();
        let pairs = ["(1,2)(3,4)", "(1,3)(2,4)"];
        for q in [2u64, 3] {
            let f = PrimeField::new(q).unwrap();
            for l in pairs {
                for r in pairs {
                    let eps = FilteredComplex::canonical(
                        f,
                        Modulus(2),
                        vec![2, 1, 1, 0],
                        &BoundaryRuling::parse(l, 4).unwrap(),
                    );
                    let rr = BoundaryRuling::parse(r, 4).unwrap();
                    let d = dga_count(&t, Modulus(2), &eps, &rr, 1 << 20).unwrap();
                    let opts = SweepOptions { budget: 1 << 20, witnesses: true };
                    let mut s = sweep_enumerate(&t, Modulus(2), &eps, &rr, opts).unwrap();
                    s.witnesses.sort();
                    assert_eq!(d.witnesses, s.witnesses, "q={q} {l} -> {r}");
                }
            }
        }
    }
}
