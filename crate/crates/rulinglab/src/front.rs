//! Tangle fronts as slice sequences: parsing, validation, Maslov potentials,
//! orientations, composition and classical invariants.

use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Modulus;

/// One elementary event. `k` is the 1-based position at the slice's left
/// edge (for a left cusp, the position of the new upper strand).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slice {
    Crossing(usize),
    /// `mu` optionally fixes the potential of the new lower strand.
    LeftCusp {
        k: usize,
        mu: Option<i64>,
    },
    RightCusp {
        k: usize,
        marked: bool,
    },
    BasePoint(usize),
}

impl Slice {
    pub fn position(&self) -> usize {
        match *self {
            Slice::Crossing(k) | Slice::BasePoint(k) => k,
            Slice::LeftCusp { k, .. } | Slice::RightCusp { k, .. } => k,
        }
    }

    fn shifted(&self, by: usize) -> Slice {
        match *self {
            Slice::Crossing(k) => Slice::Crossing(k + by),
            Slice::BasePoint(k) => Slice::BasePoint(k + by),
            Slice::LeftCusp { k, mu } => Slice::LeftCusp { k: k + by, mu },
            Slice::RightCusp { k, marked } => Slice::RightCusp { k: k + by, marked },
        }
    }
}

impl fmt::Display for Slice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Slice::Crossing(k) => write!(f, "x {k}"),
            Slice::LeftCusp { k, mu: None } => write!(f, "lc {k}"),
            Slice::LeftCusp { k, mu: Some(v) } => write!(f, "lc {k} {v}"),
            Slice::RightCusp { k, marked: false } => write!(f, "rc {k}"),
            Slice::RightCusp { k, marked: true } => write!(f, "rc* {k}"),
            Slice::BasePoint(k) => write!(f, "bp {k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TangleFront {
    /// Potentials live in Z/2r; `r = 0` means integer potentials.
    pub r: u32,
    pub n_left: usize,
    pub mu_left: Vec<i64>,
    pub slices: Vec<Slice>,
}

/// Derived data for one slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SliceInfo {
    /// `label` is the 1-based crossing number in slice order.
    Crossing {
        label: usize,
        degree: i64,
        sign: i8,
    },
    LeftCusp {
        up: bool,
    },
    /// `sigma = +1` for a down cusp, `-1` for an up cusp.
    RightCusp {
        sigma: i8,
        marked: bool,
    },
    BasePoint {
        right_moving: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialTable {
    pub modulus: Modulus,
    /// Potentials at each slice boundary, `boundaries[0]` is the left end.
    pub boundaries: Vec<Vec<i64>>,
    pub info: Vec<SliceInfo>,
    /// Component id of the strand at each position of each boundary.
    pub components: Vec<Vec<usize>>,
    /// Component id of each slice.
    pub slice_component: Vec<usize>,
}

pub fn right_moving(mu: i64) -> bool {
    mu.rem_euclid(2) == 0
}

impl PotentialTable {
    pub fn left(&self) -> &[i64] {
        &self.boundaries[0]
    }

    pub fn right(&self) -> &[i64] {
        self.boundaries.last().unwrap()
    }

    pub fn crossing_degrees(&self) -> Vec<i64> {
        self.info
            .iter()
            .filter_map(|i| match i {
                SliceInfo::Crossing { degree, .. } => Some(*degree),
                _ => None,
            })
            .collect()
    }
}

/// Union-find with additive offsets: `value(x) = value(root) + offset(x)`.
struct OffsetDsu {
    parent: Vec<usize>,
    offset: Vec<i64>,
}

impl OffsetDsu {
    fn new() -> Self {
        OffsetDsu { parent: vec![], offset: vec![] }
    }

    fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.offset.push(0);
        self.parent.len() - 1
    }

    fn find(&mut self, x: usize) -> (usize, i64) {
        let p = self.parent[x];
        if p == x {
            return (x, 0);
        }
        let (root, off) = self.find(p);
        self.parent[x] = root;
        self.offset[x] += off;
        (root, self.offset[x])
    }

    /// Imposes `value(a) - value(b) = diff`. Returns false on conflict.
    /// Keeps the smaller root, so variable 0 stays a root.
    fn relate(&mut self, a: usize, b: usize, diff: i64, modulus: Modulus) -> bool {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            return modulus.congruent(oa - ob, diff);
        }
        // value(ra) + oa - value(rb) - ob = diff
        if ra < rb {
            self.parent[rb] = ra;
            self.offset[rb] = oa - ob - diff;
        } else {
            self.parent[ra] = rb;
            self.offset[ra] = diff + ob - oa;
        }
        true
    }
}

impl TangleFront {
    pub fn new(r: u32, mu_left: Vec<i64>, slices: Vec<Slice>) -> Self {
        TangleFront { r, n_left: mu_left.len(), mu_left, slices }
    }

    pub fn modulus(&self) -> Modulus {
        Modulus(2 * self.r)
    }

    /// Strand count at every slice boundary, checking slice bounds.
    pub fn strand_counts(&self) -> Result<Vec<usize>> {
        if self.mu_left.len() != self.n_left {
            return Err(Error::Invalid(format!("left = {} but mu lists {} values", self.n_left, self.mu_left.len())));
        }
        let mut s = self.n_left;
        let mut out = vec![s];
        for (idx, sl) in self.slices.iter().enumerate() {
            let k = sl.position();
            let (ok, next, range) = match sl {
                Slice::Crossing(_) => (k >= 1 && k < s, s, format!("1..={}", s.saturating_sub(1))),
                Slice::LeftCusp { .. } => (k >= 1 && k <= s + 1, s + 2, format!("1..={}", s + 1)),
                Slice::RightCusp { .. } => {
                    (k >= 1 && k < s, s.saturating_sub(2), format!("1..={}", s.saturating_sub(1)))
                }
                Slice::BasePoint(_) => (k >= 1 && k <= s, s, format!("1..={s}")),
            };
            if !ok {
                return Err(Error::SliceRange {
                    index: idx + 1,
                    msg: format!("`{sl}` out of range {range} for {s} strands"),
                });
            }
            s = next;
            out.push(s);
        }
        Ok(out)
    }

    pub fn n_right(&self) -> Result<usize> {
        Ok(*self.strand_counts()?.last().unwrap())
    }

    pub fn num_crossings(&self) -> usize {
        self.slices.iter().filter(|s| matches!(s, Slice::Crossing(_))).count()
    }

    pub fn num_right_cusps(&self) -> usize {
        self.slices.iter().filter(|s| matches!(s, Slice::RightCusp { .. })).count()
    }

    /// Number of base points, marked right cusps included.
    pub fn num_base_points(&self) -> usize {
        self.slices.iter().filter(|s| matches!(s, Slice::BasePoint(_) | Slice::RightCusp { marked: true, .. })).count()
    }

    pub fn is_closed(&self) -> bool {
        self.n_left == 0 && self.n_right().map(|n| n == 0).unwrap_or(false)
    }

    /// Propagates the Maslov potential across all slices.
    ///
    /// Left endpoints are fixed by `mu_left`. Each left cusp without an
    /// explicit value introduces a free potential, which right cusps may
    /// later determine; potentials still free at the end are set so the new
    /// lower strand has potential 0.
    pub fn propagate_potential(&self) -> Result<PotentialTable> {
        let counts = self.strand_counts()?;
        let md = self.modulus();
        let mut dsu = OffsetDsu::new();
        let ground = dsu.add();
        // Each position holds (variable, offset).
        let mut cur: Vec<(usize, i64)> = self.mu_left.iter().map(|&v| (ground, v)).collect();
        let mut exprs = vec![cur.clone()];
        // Strand connectivity.
        let mut comp = OffsetDsu::new();
        let mut cur_ids: Vec<usize> = (0..self.n_left).map(|_| comp.add()).collect();
        let mut ids = vec![cur_ids.clone()];
        let mut slice_strand = vec![];
        for (idx, sl) in self.slices.iter().enumerate() {
            let k = sl.position() - 1;
            match *sl {
                Slice::Crossing(_) => {
                    cur.swap(k, k + 1);
                    cur_ids.swap(k, k + 1);
                    slice_strand.push(cur_ids[k]);
                }
                Slice::LeftCusp { mu, .. } => {
                    let lower = match mu {
                        Some(v) => (ground, v),
                        None => (dsu.add(), 0),
                    };
                    cur.splice(k..k, [(lower.0, lower.1 + 1), lower]);
                    let id = comp.add();
                    cur_ids.splice(k..k, [id, id]);
                    slice_strand.push(id);
                }
                Slice::RightCusp { .. } => {
                    let (u, l) = (cur[k], cur[k + 1]);
                    // value(u.0) + u.1 = value(l.0) + l.1 + 1
                    if !dsu.relate(u.0, l.0, l.1 + 1 - u.1, md) {
                        return Err(Error::Potential(format!(
                            "slice {} (`{sl}`): cusp strands cannot differ by 1 mod {} \
                             (rotation obstruction)",
                            idx + 1,
                            md.0
                        )));
                    }
                    comp.relate(cur_ids[k], cur_ids[k + 1], 0, Modulus(1));
                    slice_strand.push(cur_ids[k]);
                    cur.drain(k..k + 2);
                    cur_ids.drain(k..k + 2);
                }
                Slice::BasePoint(_) => slice_strand.push(cur_ids[k]),
            }
            debug_assert_eq!(cur.len(), counts[idx + 1]);
            exprs.push(cur.clone());
            ids.push(cur_ids.clone());
        }
        let value = |x: usize, off: i64, dsu: &mut OffsetDsu| {
            let (_, o) = dsu.find(x);
            md.reduce(o + off)
        };
        let boundaries: Vec<Vec<i64>> =
            exprs.iter().map(|row| row.iter().map(|&(x, o)| value(x, o, &mut dsu)).collect()).collect();
        let mut cid = |x: usize| comp.find(x).0;
        let components: Vec<Vec<usize>> = ids.iter().map(|row| row.iter().map(|&x| cid(x)).collect()).collect();
        let slice_component = slice_strand.iter().map(|&x| cid(x)).collect();

        let mut info = vec![];
        let mut label = 0;
        for (idx, sl) in self.slices.iter().enumerate() {
            let k = sl.position() - 1;
            let left = &boundaries[idx];
            info.push(match *sl {
                Slice::Crossing(_) => {
                    label += 1;
                    let degree = md.reduce(left[k] - left[k + 1]);
                    let sign = if degree.rem_euclid(2) == 0 { 1 } else { -1 };
                    SliceInfo::Crossing { label, degree, sign }
                }
                Slice::LeftCusp { .. } => {
                    let upper = boundaries[idx + 1][k];
                    SliceInfo::LeftCusp { up: right_moving(upper) }
                }
                Slice::RightCusp { marked, .. } => {
                    let sigma = if right_moving(left[k]) { 1 } else { -1 };
                    SliceInfo::RightCusp { sigma, marked }
                }
                Slice::BasePoint(_) => SliceInfo::BasePoint { right_moving: right_moving(left[k]) },
            });
        }
        Ok(PotentialTable { modulus: md, boundaries, info, components, slice_component })
    }

    pub fn validate(&self) -> ValidationReport {
        let mut rep = ValidationReport {
            strand_counts: None,
            cusp_potentials: None,
            unmarked_components: vec![],
            all_right_cusps_marked: self.slices.iter().all(|s| !matches!(s, Slice::RightCusp { marked: false, .. })),
        };
        if let Err(e) = self.strand_counts() {
            rep.strand_counts = Some(e.to_string());
            return rep;
        }
        let table = match self.propagate_potential() {
            Ok(t) => t,
            Err(e) => {
                rep.cusp_potentials = Some(e.to_string());
                return rep;
            }
        };
        let mut cusp_comps = vec![];
        let mut marked_comps = vec![];
        for (idx, sl) in self.slices.iter().enumerate() {
            let c = table.slice_component[idx];
            match sl {
                Slice::RightCusp { marked, .. } => {
                    cusp_comps.push((idx + 1, c));
                    if *marked {
                        marked_comps.push(c);
                    }
                }
                Slice::BasePoint(_) => marked_comps.push(c),
                _ => {}
            }
        }
        for (idx, c) in cusp_comps {
            if !marked_comps.contains(&c) {
                rep.unmarked_components.push(idx);
            }
        }
        rep
    }

    /// Concatenates two fronts along a matching boundary.
    pub fn compose(&self, other: &TangleFront) -> Result<TangleFront> {
        if self.r != other.r {
            return Err(Error::Boundary(format!("r = {} vs r = {}", self.r, other.r)));
        }
        let t1 = self.propagate_potential()?;
        let t2 = other.propagate_potential()?;
        let right = t1.right();
        if right.len() != other.n_left {
            return Err(Error::Boundary(format!("{} right endpoints vs {} left endpoints", right.len(), other.n_left)));
        }
        let md = self.modulus();
        if right.iter().zip(&other.mu_left).any(|(&a, &b)| !md.congruent(a, b)) {
            return Err(Error::Boundary(format!(
                "right potentials {:?} vs left potentials {:?}",
                right, other.mu_left
            )));
        }
        let mut out = self.clone();
        out.slices.extend_from_slice(&other.slices);
        let agrees = |t: &PotentialTable| {
            t.boundaries[..t1.boundaries.len()] == t1.boundaries[..]
                && t.boundaries[t1.boundaries.len() - 1..] == t2.boundaries[..]
        };
        if out.propagate_potential().map(|t| agrees(&t)).unwrap_or(false) {
            return Ok(out);
        }
        // Free cusp potentials got constrained across the cut: pin them.
        out.slices = pin_left_cusps(self, &t1).into_iter().chain(pin_left_cusps(other, &t2)).collect();
        let t = out.propagate_potential()?;
        debug_assert!(agrees(&t));
        Ok(out)
    }

    /// Splits after the first `at` slices. The right part starts from the
    /// resolved potentials of the left part.
    pub fn split(&self, at: usize) -> Result<(TangleFront, TangleFront)> {
        let t = self.propagate_potential()?;
        let pinned = pin_left_cusps(self, &t);
        let left = TangleFront::new(self.r, self.mu_left.clone(), pinned[..at].to_vec());
        let right = TangleFront::new(self.r, t.boundaries[at].clone(), pinned[at..].to_vec());
        Ok((left, right))
    }

    pub fn classical_invariants(&self) -> Result<ClassicalInvariants> {
        if !self.is_closed() {
            return Err(Error::Unsupported("classical invariants need a closed front".into()));
        }
        let t = self.propagate_potential()?;
        let (mut writhe, mut up, mut down) = (0i64, 0i64, 0i64);
        for i in &t.info {
            match *i {
                SliceInfo::Crossing { sign, .. } => writhe += sign as i64,
                SliceInfo::LeftCusp { up: u } => {
                    if u {
                        up += 1
                    } else {
                        down += 1
                    }
                }
                SliceInfo::RightCusp { sigma, .. } => {
                    if sigma == 1 {
                        down += 1
                    } else {
                        up += 1
                    }
                }
                SliceInfo::BasePoint { .. } => {}
            }
        }
        Ok(ClassicalInvariants { tb: writhe - self.num_right_cusps() as i64, rot: Ratio::new(up - down, 2) })
    }

    /// Shifts every slice down by `k` positions and prepends `mu_top`.
    pub fn with_strands_on_top(&self, mu_top: &[i64]) -> TangleFront {
        let k = mu_top.len();
        let mut mu = mu_top.to_vec();
        mu.extend_from_slice(&self.mu_left);
        TangleFront::new(self.r, mu, self.slices.iter().map(|s| s.shifted(k)).collect())
    }

    pub fn parse(text: &str) -> Result<TangleFront> {
        parse_tangle(text)
    }

    pub fn serialize(&self) -> String {
        let mut s = format!("r = {}\nleft = {}\n", self.r, self.n_left);
        let mu: Vec<String> = self.mu_left.iter().map(|v| v.to_string()).collect();
        s += &format!("mu = [{}]\n", mu.join(","));
        for sl in &self.slices {
            s += &format!("{sl}\n");
        }
        s
    }
}

fn pin_left_cusps(front: &TangleFront, t: &PotentialTable) -> Vec<Slice> {
    front
        .slices
        .iter()
        .enumerate()
        .map(|(idx, sl)| match *sl {
            Slice::LeftCusp { k, .. } => Slice::LeftCusp { k, mu: Some(t.boundaries[idx + 1][k]) },
            other => other,
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalInvariants {
    pub tb: i64,
    pub rot: Ratio<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Failure of slice bounds or header consistency.
    pub strand_counts: Option<String>,
    /// Failure of the cusp potential condition.
    pub cusp_potentials: Option<String>,
    /// Right cusps (1-based slice index) whose component has no base point.
    pub unmarked_components: Vec<usize>,
    pub all_right_cusps_marked: bool,
}

impl ValidationReport {
    pub fn consistent(&self) -> bool {
        self.strand_counts.is_none() && self.cusp_potentials.is_none()
    }

    pub fn base_point_hypothesis(&self) -> bool {
        self.unmarked_components.is_empty()
    }

    pub fn passes(&self) -> bool {
        self.consistent() && self.base_point_hypothesis()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let line = |ok: Option<&String>| match ok {
            None => "ok".to_string(),
            Some(e) => format!("FAIL ({e})"),
        };
        writeln!(f, "strand counts: {}", line(self.strand_counts.as_ref()))?;
        writeln!(f, "cusp potentials: {}", line(self.cusp_potentials.as_ref()))?;
        if self.unmarked_components.is_empty() {
            writeln!(f, "base points: ok")?;
        } else {
            writeln!(
                f,
                "base points: FAIL (right cusps at slices {:?} lie on components without a base point)",
                self.unmarked_components
            )?;
        }
        write!(f, "all right cusps marked: {}", if self.all_right_cusps_marked { "yes" } else { "no" })
    }
}

pub fn parse_tangle(text: &str) -> Result<TangleFront> {
    let mut r: Option<u32> = None;
    let mut left: Option<usize> = None;
    let mut mu: Option<Vec<i64>> = None;
    let mut slices = vec![];
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        let col = content.find(|c: char| !c.is_whitespace()).unwrap() + 1;
        let err = |col: usize, msg: String| Error::Syntax { line: line_no, col, msg };
        if let Some(eq) = trimmed.find('=') {
            if !slices.is_empty() {
                return Err(err(col, "header line after the first slice".into()));
            }
            let key = trimmed[..eq].trim();
            let val = trimmed[eq + 1..].trim();
            let vcol = col + eq + 1 + (trimmed[eq + 1..].len() - trimmed[eq + 1..].trim_start().len());
            match key {
                "r" => {
                    let v: i64 = val.parse().map_err(|_| err(vcol, format!("bad integer `{val}`")))?;
                    if v < 0 {
                        return Err(err(vcol, "r must be nonnegative".into()));
                    }
                    r = Some(v as u32);
                }
                "left" => left = Some(val.parse().map_err(|_| err(vcol, format!("bad count `{val}`")))?),
                "mu" => {
                    let inner = val
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| err(vcol, "expected `[...]`".into()))?;
                    let vals = inner
                        .split(',')
                        .map(str::trim)
                        .filter(|t| !t.is_empty())
                        .map(|t| t.parse::<i64>().map_err(|_| err(vcol, format!("bad potential `{t}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    mu = Some(vals);
                }
                _ => return Err(err(col, format!("unknown header `{key}`"))),
            }
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let arg_col = col + trimmed.find(char::is_whitespace).unwrap_or(trimmed.len()) + 1;
        let num = |i: usize| -> Result<i64> {
            let t = toks.get(i).ok_or_else(|| err(arg_col, format!("`{}` needs a position", toks[0])))?;
            t.parse::<i64>().map_err(|_| err(arg_col, format!("bad number `{t}`")))
        };
        let pos = |v: i64| -> Result<usize> {
            if v < 1 {
                Err(err(arg_col, format!("position {v} must be at least 1")))
            } else {
                Ok(v as usize)
            }
        };
        let max_args = if toks[0] == "lc" { 3 } else { 2 };
        if toks.len() > max_args {
            return Err(err(col, format!("too many arguments for `{}`", toks[0])));
        }
        let sl = match toks[0] {
            "x" => Slice::Crossing(pos(num(1)?)?),
            "lc" => Slice::LeftCusp { k: pos(num(1)?)?, mu: if toks.len() == 3 { Some(num(2)?) } else { None } },
            "rc" => Slice::RightCusp { k: pos(num(1)?)?, marked: false },
            "rc*" => Slice::RightCusp { k: pos(num(1)?)?, marked: true },
            "bp" => Slice::BasePoint(pos(num(1)?)?),
            other => return Err(err(col, format!("unknown slice `{other}`"))),
        };
        slices.push(sl);
    }
    let r = r.ok_or_else(|| Error::Syntax { line: 1, col: 1, msg: "missing header `r = ...`".into() })?;
    let mu = match (mu, left) {
        (Some(m), Some(n)) if m.len() != n => {
            return Err(Error::Syntax { line: 1, col: 1, msg: format!("left = {n} but mu has {} entries", m.len()) })
        }
        (Some(m), _) => m,
        (None, Some(0)) | (None, None) => vec![],
        (None, Some(_)) => return Err(Error::Syntax { line: 1, col: 1, msg: "missing header `mu = [...]`".into() }),
    };
    let front = TangleFront::new(r, mu, slices);
    front.strand_counts()?;
    Ok(front)
}
