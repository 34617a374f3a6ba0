#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rulinglab::dga::is_simple;
use rulinglab::{Modulus, Slice, TangleFront};

#[derive(Clone, Copy, Debug)]
pub struct Gen {
    pub r: u32,
    pub max_strands: usize,
    pub max_slices: usize,
    pub simple: bool,
    /// Every right cusp marked.
    pub mark_all: bool,
    pub base_points: bool,
}

impl Default for Gen {
    fn default() -> Self {
        Gen { r: 1, max_strands: 6, max_slices: 6, simple: true, mark_all: true, base_points: true }
    }
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn cusp_ok(md: Modulus, upper: i64, lower: i64) -> bool {
    md.congruent(upper, lower + 1)
}

fn attempt(rng: &mut StdRng, g: &Gen) -> TangleFront {
    let md = Modulus(2 * g.r);
    let n0 = rng.gen_range(0..=g.max_strands.min(4));
    let mut mu: Vec<i64> = (0..n0).map(|_| rng.gen_range(-2..=2)).collect();
    let mu_left = mu.clone();
    let len = rng.gen_range(0..=g.max_slices);
    let tail = if g.simple { rng.gen_range(0..=len) } else { 0 };
    let mut slices = vec![];
    for s in 0..len {
        let in_tail = g.simple && s >= len - tail;
        let n = mu.len();
        let mut options = vec![];
        if !in_tail && n >= 2 {
            options.push(0);
        }
        if !in_tail && n + 2 <= g.max_strands {
            options.push(1);
        }
        let cusps: Vec<usize> = (1..n).filter(|&k| cusp_ok(md, mu[k - 1], mu[k])).collect();
        if (in_tail || !g.simple) && !cusps.is_empty() {
            options.push(2);
            options.push(2);
        }
        if g.base_points && n >= 1 {
            options.push(3);
        }
        if options.is_empty() {
            break;
        }
        match options[rng.gen_range(0..options.len())] {
            0 => {
                let k = rng.gen_range(1..n);
                mu.swap(k - 1, k);
                slices.push(Slice::Crossing(k));
            }
            1 => {
                let k = rng.gen_range(1..=n + 1);
                let v = rng.gen_range(-2..=2);
                mu.splice(k - 1..k - 1, [v + 1, v]);
                slices.push(Slice::LeftCusp { k, mu: Some(v) });
            }
            2 => {
                let k = cusps[rng.gen_range(0..cusps.len())];
                mu.drain(k - 1..=k);
                let marked = g.mark_all || rng.gen_bool(0.5);
                slices.push(Slice::RightCusp { k, marked });
            }
            _ => slices.push(Slice::BasePoint(rng.gen_range(1..=n))),
        }
    }
    TangleFront::new(g.r, mu_left, slices)
}

/// A random front satisfying the generator's constraints.
pub fn random_front(rng: &mut StdRng, g: &Gen) -> TangleFront {
    loop {
        let t = attempt(rng, g);
        if t.propagate_potential().is_err() {
            continue;
        }
        if g.simple && !is_simple(&t) {
            continue;
        }
        if !t.validate().passes() {
            continue;
        }
        return t;
    }
}

use rulinglab::mcs::{is_properly_ordered, Diagram, DiagramItem, Handleslide, Move, Side};
use rulinglab::PrimeField;

fn graded_pair(rng: &mut StdRng, mu: &[i64], m: Modulus) -> Option<(usize, usize)> {
    let n = mu.len();
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .filter(|&(i, j)| m.congruent(mu[i - 1], mu[j - 1]))
        .collect();
    (!pairs.is_empty()).then(|| pairs[rng.gen_range(0..pairs.len())])
}

/// A random graded diagram over `F_5`.
pub fn random_diagram(rng: &mut StdRng) -> Diagram {
    let m = Modulus(rng.gen_range(1..=2));
    let n = rng.gen_range(2..=5);
    let mu: Vec<i64> = (0..n).map(|_| rng.gen_range(0..2)).collect();
    let mut d = Diagram { field: PrimeField::new(5).unwrap(), m, mu, items: vec![] };
    for _ in 0..rng.gen_range(0..10) {
        let cur = d.mu_at(d.items.len());
        if rng.gen_bool(0.3) {
            d.items.push(DiagramItem::Crossing(rng.gen_range(1..n)));
        } else if let Some((top, bottom)) = graded_pair(rng, &cur, m) {
            d.items.push(DiagramItem::Handleslide(Handleslide { top, bottom, coeff: rng.gen_range(1..5) }));
        }
    }
    d
}

/// A diagram holding a properly ordered (or reversed) collection of
/// handleslides with one more handleslide beside it. Returns the diagram,
/// the collection's start and length, and the side of the extra one.
pub fn collection_diagram(rng: &mut StdRng) -> (Diagram, usize, usize, Side) {
    loop {
        let m = Modulus(rng.gen_range(1..=2));
        let n = rng.gen_range(2..=5);
        let mu: Vec<i64> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut v: Vec<Handleslide> = vec![];
        for _ in 0..rng.gen_range(1..7) {
            if let Some((top, bottom)) = graded_pair(rng, &mu, m) {
                if v.iter().all(|h| (h.top, h.bottom) != (top, bottom)) {
                    v.push(Handleslide { top, bottom, coeff: rng.gen_range(1..5) });
                }
            }
        }
        let Some((top, bottom)) = graded_pair(rng, &mu, m) else { continue };
        if v.is_empty() {
            continue;
        }
        v.sort_by(|a, b| if a.precedes(b) { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater });
        if rng.gen_bool(0.5) {
            v.reverse();
        }
        let h = DiagramItem::Handleslide(Handleslide { top, bottom, coeff: rng.gen_range(1..5) });
        let side = if rng.gen_bool(0.5) { Side::Left } else { Side::Right };
        let mut items = vec![];
        let prefix = rng.gen_range(0..2);
        for _ in 0..prefix {
            items.push(DiagramItem::Crossing(rng.gen_range(1..n)));
        }
        // Crossings before the collection change the potentials; start from
        // the permuted ones so the collection stays graded.
        let mut start_mu = mu.clone();
        for it in items.iter().rev() {
            if let DiagramItem::Crossing(k) = it {
                start_mu.swap(k - 1, *k);
            }
        }
        let len = v.len();
        let start = items.len() + (side == Side::Left) as usize;
        if side == Side::Left {
            items.push(h);
        }
        items.extend(v.into_iter().map(DiagramItem::Handleslide));
        if side == Side::Right {
            items.push(h);
        }
        let d = Diagram { field: PrimeField::new(5).unwrap(), m, mu: start_mu, items };
        assert!(d.check().is_ok());
        return (d, start, len, side);
    }
}

/// Candidate moves of each type for a diagram; `None` where a type has no
/// applicable instance. Index = move type, 5 and 6 excluded.
pub fn basic_moves(rng: &mut StdRng, d: &Diagram) -> Vec<(usize, Diagram, Move)> {
    let mut out = vec![];
    let len = d.items.len();
    let at = rng.gen_range(0..=len);
    if let Some((top, bottom)) = graded_pair(rng, &d.mu_at(at), d.m) {
        out.push((0, d.clone(), Move::InsertTrivial { at, top, bottom }));
        let mut z = d.clone();
        z.items.insert(at, DiagramItem::Handleslide(Handleslide { top, bottom, coeff: 0 }));
        out.push((0, z, Move::RemoveTrivial { at }));
        out.push((4, d.clone(), Move::InsertCanceling { at, top, bottom, coeff: rng.gen_range(0..5) }));
    }
    let hs: Vec<usize> = (0..len).filter(|&i| matches!(d.items[i], DiagramItem::Handleslide(_))).collect();
    for i in 0..len.saturating_sub(1) {
        match (d.items[i], d.items[i + 1]) {
            (DiagramItem::Handleslide(h), DiagramItem::Crossing(k))
            | (DiagramItem::Crossing(k), DiagramItem::Handleslide(h))
                if (h.top, h.bottom) != (k, k + 1) =>
            {
                out.push((1, d.clone(), Move::SlidePastCrossing { at: i }))
            }
            (DiagramItem::Handleslide(_), DiagramItem::Handleslide(_)) => {
                out.push((2, d.clone(), Move::Interchange { at: i }))
            }
            _ => {}
        }
    }
    if let Some(&i) = hs.get(rng.gen_range(0..hs.len().max(1))) {
        let DiagramItem::Handleslide(h) = d.items[i] else { unreachable!() };
        let mut dup = d.clone();
        dup.items.insert(i + 1, DiagramItem::Handleslide(Handleslide { coeff: rng.gen_range(0..5), ..h }));
        out.push((3, dup, Move::Merge { at: i }));
    }
    out
}

/// Applies `mv`, checking the composite and grading. Returns the result.
pub fn checked_apply(d: &Diagram, mv: &Move) -> Diagram {
    let out = d.apply_move(mv).unwrap_or_else(|e| panic!("{mv:?} on {d:?}: {e}"));
    assert_eq!(out.composite(), d.composite(), "{mv:?} changed the composite of {d:?}");
    out.check().unwrap();
    out
}

pub fn collection_ordered(items: &[DiagramItem]) -> bool {
    let v: Vec<Handleslide> = items
        .iter()
        .map(|i| match i {
            DiagramItem::Handleslide(h) => *h,
            _ => panic!("not a handleslide"),
        })
        .collect();
    let rev: Vec<_> = v.iter().rev().copied().collect();
    is_properly_ordered(&v) || is_properly_ordered(&rev)
}

use rulinglab::{BoundaryRuling, FilteredComplex};

/// Every isomorphism type on the given potentials, homological strands
/// allowed.
pub fn all_types(mu: &[i64], m: Modulus) -> Vec<BoundaryRuling> {
    fn rec(
        i: usize,
        mu: &[i64],
        m: Modulus,
        used: &mut Vec<bool>,
        pairs: &mut Vec<(usize, usize)>,
        out: &mut Vec<BoundaryRuling>,
    ) {
        let n = mu.len();
        if i == n {
            let hom = (1..=n).filter(|&k| !used[k - 1]).collect();
            out.push(BoundaryRuling::new(n, pairs.clone(), hom).unwrap());
            return;
        }
        if used[i] {
            return rec(i + 1, mu, m, used, pairs, out);
        }
        rec(i + 1, mu, m, used, pairs, out);
        for j in i + 1..n {
            if !used[j] && m.congruent(mu[i], mu[j] + 1) {
                used[i] = true;
                used[j] = true;
                pairs.push((i + 1, j + 1));
                rec(i + 1, mu, m, used, pairs, out);
                pairs.pop();
                used[i] = false;
                used[j] = false;
            }
        }
    }
    let mut out = vec![];
    rec(0, mu, m, &mut vec![false; mu.len()], &mut vec![], &mut out);
    out
}

/// A random invertible, upper-triangular, degree-preserving matrix.
pub fn random_automorphism(rng: &mut StdRng, mu: &[i64], m: Modulus, f: PrimeField) -> Vec<Vec<u64>> {
    let n = mu.len();
    let mut g = vec![vec![0; n]; n];
    for i in 0..n {
        g[i][i] = rng.gen_range(1..f.q);
        for j in i + 1..n {
            if m.congruent(mu[i], mu[j]) {
                g[i][j] = rng.gen_range(0..f.q);
            }
        }
    }
    g
}

/// A random complex in the orbit of `t`.
pub fn random_complex(rng: &mut StdRng, mu: &[i64], m: Modulus, f: PrimeField, t: &BoundaryRuling) -> FilteredComplex {
    let c = FilteredComplex::canonical(f, m, mu.to_vec(), t);
    c.conjugate(&random_automorphism(rng, mu, m, f))
}
