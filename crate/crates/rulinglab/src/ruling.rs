//! Normal rulings and generalized normal rulings by left-to-right sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::{Slice, SliceInfo, TangleFront};
use crate::types::{BoundaryRuling, Modulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CrossingClass {
    Switch,
    Return,
    Departure,
    /// Nonzero degree, or a non-switching crossing with no special role.
    Pass,
    /// Both strands homological and degree zero.
    HomologicalCrossing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingDecision {
    pub label: usize,
    pub slice: usize,
    pub class: CrossingClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingPath {
    /// Pairing at each slice boundary.
    pub states: Vec<BoundaryRuling>,
    pub decisions: Vec<CrossingDecision>,
    pub s: usize,
    /// Returns at crossings of degree zero.
    pub r_prime: usize,
    pub d: usize,
    pub h: usize,
    pub c_r: usize,
    pub m_is_one: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingStats {
    pub s: usize,
    pub r: usize,
    pub d: usize,
    pub h: usize,
    pub chi: i64,
}

impl RulingPath {
    pub fn r(&self) -> usize {
        self.r_prime + if self.m_is_one { self.c_r } else { 0 }
    }

    pub fn chi(&self) -> i64 {
        self.c_r as i64 - self.s as i64 - self.h as i64
    }

    pub fn stats(&self) -> RulingStats {
        RulingStats { s: self.s, r: self.r(), d: self.d, h: self.h, chi: self.chi() }
    }

    /// Crossing labels of the switches, increasing.
    pub fn switch_set(&self) -> Vec<usize> {
        self.decisions.iter().filter(|d| d.class == CrossingClass::Switch).map(|d| d.label).collect()
    }

    pub fn homological_set(&self) -> Vec<usize> {
        self.decisions.iter().filter(|d| d.class == CrossingClass::HomologicalCrossing).map(|d| d.label).collect()
    }
}

pub fn ruling_stats(path: &RulingPath, _front: &TangleFront) -> RulingStats {
    path.stats()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mate {
    Pair(usize),
    Hom,
}

fn to_state(r: &BoundaryRuling) -> Vec<Mate> {
    let mut v = vec![Mate::Hom; r.n];
    for &(i, j) in &r.pairs {
        v[i - 1] = Mate::Pair(j - 1);
        v[j - 1] = Mate::Pair(i - 1);
    }
    v
}

fn from_state(v: &[Mate]) -> BoundaryRuling {
    let pairs = (0..v.len())
        .filter_map(|i| match v[i] {
            Mate::Pair(j) if j > i => Some((i + 1, j + 1)),
            _ => None,
        })
        .collect();
    let hom = (0..v.len()).filter(|&i| v[i] == Mate::Hom).map(|i| i + 1).collect();
    BoundaryRuling { n: v.len(), pairs, homological: hom }
}

fn conjugate(v: &[Mate], k: usize) -> Vec<Mate> {
    let sw = |i: usize| {
        if i == k {
            k + 1
        } else if i == k + 1 {
            k
        } else {
            i
        }
    };
    let mut out = v.to_vec();
    for i in 0..v.len() {
        out[sw(i)] = match v[i] {
            Mate::Pair(j) => Mate::Pair(sw(j)),
            Mate::Hom => Mate::Hom,
        };
    }
    out
}

fn branches(v: &[Mate], k: usize, degree_zero: bool) -> Vec<CrossingClass> {
    use CrossingClass::*;
    let far = v.len();
    let end = |m: Mate| match m {
        Mate::Pair(j) => j,
        Mate::Hom => far,
    };
    match (v[k], v[k + 1]) {
        (Mate::Hom, Mate::Hom) => return vec![if degree_zero { HomologicalCrossing } else { Pass }],
        (Mate::Pair(a), _) if a == k + 1 => return vec![],
        _ => {}
    }
    if !degree_zero {
        return vec![Pass];
    }
    let (a, b) = (end(v[k]), end(v[k + 1]));
    let i1 = (k.min(a), k.max(a));
    let i2 = ((k + 1).min(b), (k + 1).max(b));
    let disjoint = i1.1 < i2.0 || i2.1 < i1.0;
    let nested = (i1.0 < i2.0 && i2.1 < i1.1) || (i2.0 < i1.0 && i1.1 < i2.1);
    if disjoint || nested {
        vec![Switch, Departure]
    } else {
        vec![Return]
    }
}

/// Possible classifications of a crossing between positions `k`, `k+1`
/// (1-based) for the given incoming pairing. Empty means no valid branch.
pub fn classify_crossing(state: &BoundaryRuling, k: usize, degree_zero: bool) -> Vec<CrossingClass> {
    branches(&to_state(state), k - 1, degree_zero)
}

/// Checks that `m` is a valid grading modulus for potentials mod `2r`.
pub fn check_modulus(front: &TangleFront, m: Modulus) -> Result<()> {
    if !m.divides(2 * front.r) {
        return Err(Error::Invalid(format!("grading modulus {} must divide 2r = {}", m.0, 2 * front.r)));
    }
    Ok(())
}

/// Enumerates (generalized) normal rulings from `rho_l` to `rho_r`, sorted
/// by switch set.
pub fn enumerate_rulings(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
    generalized: bool,
) -> Result<Vec<RulingPath>> {
    check_modulus(front, m)?;
    let table = front.propagate_potential()?;
    rho_l.check_potentials(table.left(), m)?;
    rho_r.check_potentials(table.right(), m)?;
    if !generalized && !(rho_l.is_acyclic() && rho_r.is_acyclic()) {
        return Err(Error::Invalid("ordinary rulings cannot have homological endpoints".into()));
    }
    let target = to_state(rho_r);
    let base = RulingPath {
        states: vec![rho_l.clone()],
        decisions: vec![],
        s: 0,
        r_prime: 0,
        d: 0,
        h: 0,
        c_r: front.num_right_cusps(),
        m_is_one: m.0 == 1,
    };
    let mut out = vec![];
    let mut stack = vec![(to_state(rho_l), base)];
    while let Some((state, path)) = stack.pop() {
        let idx = path.states.len() - 1;
        if idx == front.slices.len() {
            if state == target {
                out.push(path);
            }
            continue;
        }
        let k = front.slices[idx].position() - 1;
        let mu = &table.boundaries[idx + 1];
        let mut push = |st: Vec<Mate>, mut p: RulingPath| {
            let b = from_state(&st);
            debug_assert!(b.check_potentials(mu, m).is_ok());
            p.states.push(b);
            stack.push((st, p));
        };
        match (front.slices[idx], table.info[idx]) {
            (Slice::Crossing(_), SliceInfo::Crossing { label, degree, .. }) => {
                // Pushed in reverse so the switch branch is explored first.
                for class in branches(&state, k, m.is_zero(degree)).into_iter().rev() {
                    let mut p = path.clone();
                    p.decisions.push(CrossingDecision { label, slice: idx + 1, class });
                    let st = match class {
                        CrossingClass::Switch => {
                            p.s += 1;
                            state.clone()
                        }
                        CrossingClass::HomologicalCrossing => {
                            p.h += 1;
                            state.clone()
                        }
                        CrossingClass::Departure => {
                            p.d += 1;
                            conjugate(&state, k)
                        }
                        CrossingClass::Return => {
                            p.r_prime += 1;
                            conjugate(&state, k)
                        }
                        CrossingClass::Pass => conjugate(&state, k),
                    };
                    push(st, p);
                }
            }
            (Slice::LeftCusp { .. }, _) => {
                let shift = |m: Mate| match m {
                    Mate::Pair(j) if j >= k => Mate::Pair(j + 2),
                    other => other,
                };
                let mut st: Vec<Mate> = state.iter().map(|&x| shift(x)).collect();
                st.splice(k..k, [Mate::Pair(k + 1), Mate::Pair(k)]);
                push(st, path);
            }
            (Slice::RightCusp { .. }, _) => {
                if state[k] != Mate::Pair(k + 1) {
                    continue;
                }
                let shift = |m: Mate| match m {
                    Mate::Pair(j) if j > k + 1 => Mate::Pair(j - 2),
                    other => other,
                };
                let mut st = state.clone();
                st.drain(k..k + 2);
                let st = st.into_iter().map(shift).collect();
                push(st, path);
            }
            _ => push(state, path),
        }
    }
    out.sort_by(|a, b| {
        (a.switch_set(), a.homological_set(), &a.decisions_key()).cmp(&(
            b.switch_set(),
            b.homological_set(),
            &b.decisions_key(),
        ))
    });
    Ok(out)
}

impl RulingPath {
    fn decisions_key(&self) -> Vec<CrossingClass> {
        self.decisions.iter().map(|d| d.class).collect()
    }
}

/// Potentials of the strands added by the hat construction, top first.
pub fn hat_potentials(front: &TangleFront, m: Modulus, homology: &[usize]) -> Result<Vec<i64>> {
    check_modulus(front, m)?;
    if m.0 > 0 && homology.len() > m.0 as usize {
        return Err(Error::Invalid(format!("homology type {:?} has more than m = {} degree classes", homology, m.0)));
    }
    let md = front.modulus();
    let mut mu = vec![];
    for (i, &k) in homology.iter().enumerate() {
        let v = md.reduce(m.reduce(i as i64 + 1));
        mu.extend(std::iter::repeat_n(v, k));
    }
    Ok(mu)
}

/// Prepends parallel strands, one block per degree class of `homology`.
pub fn hat_construction(front: &TangleFront, m: Modulus, homology: &[usize]) -> Result<TangleFront> {
    let mu = hat_potentials(front, m, homology)?;
    Ok(front.with_strands_on_top(&mu))
}

/// Extends a boundary ruling to the hatted boundary by pairing the new
/// strands, in order, with the homological endpoints of matching degree.
pub fn hat_boundary(rho: &BoundaryRuling, mu: &[i64], m: Modulus) -> Result<BoundaryRuling> {
    let h = rho.homology_type(mu, m);
    let k: usize = h.iter().sum();
    let mut pairs: Vec<(usize, usize)> = rho.pairs.iter().map(|&(i, j)| (i + k, j + k)).collect();
    let mut next = 1;
    for (deg, &count) in h.iter().enumerate() {
        let ends: Vec<usize> = rho.homological.iter().copied().filter(|&i| m.reduce(mu[i - 1]) == deg as i64).collect();
        debug_assert_eq!(ends.len(), count);
        for e in ends {
            pairs.push((next, e + k));
            next += 1;
        }
    }
    BoundaryRuling::new(rho.n + k, pairs, vec![])
}

/// Inverse of [`hat_boundary`] on the right: drops the `k` top strands and
/// marks their partners homological. `None` if two hat strands are paired.
pub fn restrict_hat(rho: &BoundaryRuling, k: usize) -> Option<BoundaryRuling> {
    let mut pairs = vec![];
    let mut hom = vec![];
    for &(i, j) in &rho.pairs {
        match (i <= k, j <= k) {
            (true, true) => return None,
            (true, false) => hom.push(j - k),
            (false, false) => pairs.push((i - k, j - k)),
            (false, true) => unreachable!(),
        }
    }
    if rho.homological.iter().any(|&i| i <= k) {
        return None;
    }
    hom.extend(rho.homological.iter().map(|i| i - k));
    BoundaryRuling::new(rho.n - k, pairs, hom).ok()
}
