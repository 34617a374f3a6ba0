//! Cell decompositions, variety dimensions, augmentation numbers and the
//! verification of the counting identities.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::TangleFront;
use crate::linalg::{FilteredComplex, PrimeField};
use crate::mcs::{sweep_enumerate, SweepOptions};
use crate::polynomial::{generalized_ruling_polynomial, ruling_polynomial, substitute_z, HalfPoly, RationalS};
use crate::ruling::{enumerate_rulings, hat_boundary, hat_construction, restrict_hat, RulingStats};
use crate::types::{BoundaryRuling, Modulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dimension {
    Empty,
    Finite(i64),
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Empty => write!(f, "empty"),
            Dimension::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub switches: Vec<usize>,
    pub stats: RulingStats,
    /// Exponent of `(q-1)`.
    pub torus_exp: i64,
    /// Exponent of `q`.
    pub affine_exp: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDecomposition {
    pub base_points: usize,
    pub cells: Vec<Cell>,
}

fn s_pow(e: i64) -> RationalS {
    RationalS::poly(HalfPoly::monomial(1, e))
}

fn rat_pow(b: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(b.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

impl CellDecomposition {
    pub fn dimension(&self) -> Dimension {
        self.cells.iter().map(|c| c.torus_exp + c.affine_exp).max().map_or(Dimension::Empty, Dimension::Finite)
    }

    /// `Σ (q-1)^T q^A`.
    pub fn count(&self, q: u64) -> BigRational {
        let q = BigRational::from_integer(BigInt::from(q));
        let q1 = &q - BigRational::one();
        self.cells
            .iter()
            .map(|c| rat_pow(&q1, c.torus_exp) * rat_pow(&q, c.affine_exp))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// The count with `q = s^2`, using `q - 1 = s z`.
    pub fn symbolic_count(&self) -> RationalS {
        self.cells.iter().fold(RationalS::poly(HalfPoly::zero()), |acc, c| {
            acc.add(&s_pow(c.torus_exp + 2 * c.affine_exp).mul_z_pow(c.torus_exp))
        })
    }

    /// `q^{-dim} Σ (q-1)^T q^A` in the `s`-ring, zero when empty.
    pub fn symbolic_aug(&self) -> RationalS {
        match self.dimension() {
            Dimension::Empty => RationalS::poly(HalfPoly::zero()),
            Dimension::Finite(d) => s_pow(-2 * d).mul(&self.symbolic_count()),
        }
    }

    /// `-χ + 2r` if it is the same for every cell.
    pub fn constant(&self) -> Option<i64> {
        let mut vals = self.cells.iter().map(|c| -c.stats.chi + 2 * c.stats.r as i64);
        let first = vals.next()?;
        vals.all(|v| v == first).then_some(first)
    }
}

fn cells(front: &TangleFront, m: Modulus, rho_l: &BoundaryRuling, rho_r: &BoundaryRuling) -> Result<CellDecomposition> {
    let generalized = !(rho_l.is_acyclic() && rho_r.is_acyclic());
    let b = front.num_base_points() as i64;
    let cells = enumerate_rulings(front, m, rho_l, rho_r, generalized)?
        .into_iter()
        .map(|p| {
            let st = p.stats();
            let h = st.h as i64;
            Cell { switches: p.switch_set(), stats: st, torus_exp: -st.chi - h + b, affine_exp: st.r as i64 + h }
        })
        .collect();
    Ok(CellDecomposition { base_points: front.num_base_points(), cells })
}

fn require_marked(front: &TangleFront) -> Result<()> {
    if front.validate().all_right_cusps_marked {
        Ok(())
    } else {
        Err(Error::Hypothesis("every right cusp must be marked".into()))
    }
}

fn require_base_points(front: &TangleFront) -> Result<()> {
    let v = front.validate();
    if !v.consistent() {
        return Err(Error::Invalid(v.to_string()));
    }
    if !v.base_point_hypothesis() {
        return Err(Error::Hypothesis(format!(
            "right cusps at slices {:?} lie on components without a base point",
            v.unmarked_components
        )));
    }
    Ok(())
}

/// One cell per ruling, with exponents `(-χ + B, r)`; for generalized
/// boundary data `(-χ - h + B, r + h)`.
pub fn cell_decomposition(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<CellDecomposition> {
    require_marked(front)?;
    cells(front, m, rho_l, rho_r)
}

/// `max(-χ + B + r)`, or [`Dimension::Empty`].
pub fn variety_dimension(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<Dimension> {
    require_base_points(front)?;
    Ok(cells(front, m, rho_l, rho_r)?.dimension())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugNumber {
    pub q: u64,
    pub dimension: Dimension,
    pub count: u64,
    pub value: BigRational,
}

fn sweep_count(
    front: &TangleFront,
    m: Modulus,
    f: PrimeField,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
    budget: u64,
) -> Result<u64> {
    let table = front.propagate_potential()?;
    let eps = FilteredComplex::canonical(f, m, table.left().to_vec(), rho_l);
    Ok(sweep_enumerate(front, m, &eps, rho_r, SweepOptions { budget, witnesses: false })?.count)
}

/// `q^{-dim}` times the number of augmentations with `ε_L` canonical for
/// `rho_l` and right boundary in the orbit of `rho_r`.
pub fn augmentation_number(
    front: &TangleFront,
    m: Modulus,
    q: u64,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
    budget: u64,
) -> Result<AugNumber> {
    let f = PrimeField::new(q)?;
    let dimension = variety_dimension(front, m, rho_l, rho_r)?;
    let count = sweep_count(front, m, f, rho_l, rho_r, budget)?;
    let value = match dimension {
        Dimension::Empty => BigRational::zero(),
        Dimension::Finite(d) => {
            BigRational::from_integer(count.into()) * rat_pow(&BigRational::from_integer(q.into()), -d)
        }
    };
    Ok(AugNumber { q, dimension, count, value })
}

/// `q^{(d+B)/2} z^{-B} aug`, stored as `q^{d/2} * scaled`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizedAug {
    pub d: Option<i64>,
    pub scaled: BigRational,
}

impl fmt::Display for NormalizedAug {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.d {
            None => write!(f, "0"),
            Some(d) => write!(f, "q^({d}/2) * {}", self.scaled),
        }
    }
}

/// Top `z`-degree of the (generalized) ruling polynomial.
pub fn polynomial_degree(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<Option<i64>> {
    Ok(cells(front, m, rho_l, rho_r)?.cells.iter().map(|c| -c.stats.chi).max())
}

pub fn normalized_aug_number(
    front: &TangleFront,
    m: Modulus,
    q: u64,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
    budget: u64,
) -> Result<NormalizedAug> {
    let aug = augmentation_number(front, m, q, rho_l, rho_r, budget)?;
    let d = polynomial_degree(front, m, rho_l, rho_r)?;
    let b = front.num_base_points() as i64;
    let qr = BigRational::from_integer(q.into());
    let factor = rat_pow(&qr, b) * rat_pow(&(&qr - BigRational::one()), -b);
    Ok(NormalizedAug { d, scaled: aug.value * factor })
}

/// `s^{d+B} z^{-B}` times the symbolic augmentation number.
pub fn normalized_symbolic(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<RationalS> {
    require_base_points(front)?;
    let c = cells(front, m, rho_l, rho_r)?;
    let Some(d) = c.cells.iter().map(|c| -c.stats.chi).max() else {
        return Ok(RationalS::poly(HalfPoly::zero()));
    };
    let b = front.num_base_points() as i64;
    Ok(s_pow(d + b).mul_z_pow(-b).mul(&c.symbolic_aug()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeCheck {
    pub q: u64,
    pub sweep: u64,
    pub predicted: String,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub left: String,
    pub right: String,
    pub polynomial: String,
    pub dimension: Dimension,
    /// `-χ + 2r` constant across rulings.
    pub constant_ok: bool,
    /// `d` from the polynomial agrees with the dimension bookkeeping.
    pub degree_ok: bool,
    pub symbolic_ok: bool,
    pub primes: Vec<PrimeCheck>,
}

impl PairReport {
    pub fn passed(&self) -> bool {
        self.constant_ok && self.degree_ok && self.symbolic_ok && self.primes.iter().all(|p| p.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugNumberReport {
    pub m: u32,
    pub base_points: usize,
    pub pairs: Vec<PairReport>,
}

impl AugNumberReport {
    pub fn passed(&self) -> bool {
        self.pairs.iter().all(|p| p.passed())
    }

    pub fn failures(&self) -> Vec<&PairReport> {
        self.pairs.iter().filter(|p| !p.passed()).collect()
    }
}

impl fmt::Display for AugNumberReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.pairs {
            let status = if p.passed() { "PASS" } else { "FAIL" };
            write!(f, "{status} <{}|R|{}> = {}  dim {}", p.left, p.right, p.polynomial, p.dimension)?;
            if !p.symbolic_ok {
                write!(f, "  symbolic identity fails")?;
            }
            if !p.constant_ok || !p.degree_ok {
                write!(f, "  degree bookkeeping fails")?;
            }
            for c in &p.primes {
                write!(f, "  q={}: {}", c.q, c.sweep)?;
                if !c.ok {
                    write!(f, " (expected {})", c.predicted)?;
                }
            }
            writeln!(f)?;
        }
        let failed = self.failures().len();
        write!(f, "{} boundary pairs, {} failed", self.pairs.len(), failed)
    }
}

/// Checks `q^{-dim} Σ (q-1)^T q^A = q^{-(d+B)/2} z^{sign*B} P` in the
/// `s`-ring, where `P` is the substituted polynomial.
pub fn symbolic_identity(c: &CellDecomposition, p: &RationalS, d: Option<i64>, z_sign: i64) -> bool {
    let lhs = c.symbolic_aug();
    let Some(d) = d else {
        return lhs.num.is_zero() && p.num.is_zero();
    };
    let b = c.base_points as i64;
    let rhs = s_pow(-(d + b)).mul_z_pow(z_sign * b).mul(p);
    lhs == rhs
}

fn pair_report(
    front: &TangleFront,
    m: Modulus,
    primes: &[u64],
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
    budget: u64,
) -> Result<PairReport> {
    let c = cells(front, m, rho_l, rho_r)?;
    let generalized = !(rho_l.is_acyclic() && rho_r.is_acyclic());
    let (polynomial, p) = if generalized {
        let g = generalized_ruling_polynomial(front, m, rho_l, rho_r)?;
        (g.to_string(), g.substitute())
    } else {
        let r = ruling_polynomial(front, m, rho_l, rho_r)?;
        (r.to_string(), substitute_z(&r))
    };
    let d = c.cells.iter().map(|c| -c.stats.chi).max();
    let dimension = c.dimension();
    let constant = c.constant();
    let degree_ok = match (d, dimension, constant) {
        (None, Dimension::Empty, _) => true,
        (Some(d), Dimension::Finite(dim), Some(k)) => d == 2 * (dim - c.base_points as i64) - k,
        _ => false,
    };
    let mut checks = vec![];
    for &q in primes {
        let f = PrimeField::new(q)?;
        let sweep = sweep_count(front, m, f, rho_l, rho_r, budget)?;
        let predicted = c.count(q);
        checks.push(PrimeCheck {
            q,
            sweep,
            ok: predicted == BigRational::from_integer(sweep.into()),
            predicted: predicted.to_string(),
        });
    }
    Ok(PairReport {
        left: rho_l.to_string(),
        right: rho_r.to_string(),
        polynomial,
        dimension,
        constant_ok: constant.is_some() || c.cells.is_empty(),
        degree_ok,
        symbolic_ok: symbolic_identity(&c, &p, d, 1),
        primes: checks,
    })
}

fn check_primes(primes: &[u64]) -> Result<()> {
    for (i, &q) in primes.iter().enumerate() {
        PrimeField::new(q)?;
        if primes[..i].contains(&q) {
            return Err(Error::Invalid(format!("prime {q} listed twice")));
        }
    }
    Ok(())
}

/// The counting theorem for every pair of acyclic boundary rulings.
pub fn verify_main_theorem(front: &TangleFront, m: Modulus, primes: &[u64], budget: u64) -> Result<AugNumberReport> {
    check_primes(primes)?;
    require_base_points(front)?;
    let table = front.propagate_potential()?;
    let mut pairs = vec![];
    for l in BoundaryRuling::enumerate(table.left(), m, None) {
        for r in BoundaryRuling::enumerate(table.right(), m, None) {
            pairs.push(pair_report(front, m, primes, &l, &r, budget)?);
        }
    }
    Ok(AugNumberReport { m: m.0, base_points: front.num_base_points(), pairs })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteComparison {
    pub left: String,
    pub right: String,
    pub q: u64,
    pub route_a: u64,
    pub route_b: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralizedReport {
    pub homology: Vec<usize>,
    /// Generalized rulings against the sweep from non-acyclic `ε_L`.
    pub route_b: AugNumberReport,
    /// The main theorem on the hatted front.
    pub route_a: AugNumberReport,
    pub comparisons: Vec<RouteComparison>,
    /// Whether the hatted identity holds with `z^B` and with `z^{-B}`.
    pub z_plus_b: bool,
    pub z_minus_b: bool,
}

impl GeneralizedReport {
    pub fn passed(&self) -> bool {
        self.route_a.passed() && self.route_b.passed() && self.comparisons.iter().all(|c| c.route_a == c.route_b)
    }
}

impl fmt::Display for GeneralizedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "homology type H={:?}", self.homology)?;
        writeln!(f, "route B (generalized rulings):")?;
        writeln!(f, "{}", self.route_b)?;
        writeln!(f, "route A (hat construction):")?;
        writeln!(f, "{}", self.route_a)?;
        for c in &self.comparisons {
            let s = if c.route_a == c.route_b { "PASS" } else { "FAIL" };
            writeln!(f, "{s} {} -> {} q={}: route A {} route B {}", c.left, c.right, c.q, c.route_a, c.route_b)?;
        }
        write!(f, "hatted identity with z^B: {}, with z^-B: {}", self.z_plus_b, self.z_minus_b)
    }
}

/// Both routes for boundary data of homology type `homology`.
pub fn verify_generalized(
    front: &TangleFront,
    m: Modulus,
    homology: &[usize],
    primes: &[u64],
    budget: u64,
) -> Result<GeneralizedReport> {
    check_primes(primes)?;
    require_base_points(front)?;
    let table = front.propagate_potential()?;
    let lefts = BoundaryRuling::enumerate(table.left(), m, Some(homology));
    let rights = BoundaryRuling::enumerate(table.right(), m, Some(homology));
    if lefts.is_empty() || rights.is_empty() {
        return Err(Error::Boundary(format!("no boundary ruling has homology type {homology:?}")));
    }
    let mut route_b = vec![];
    for l in &lefts {
        for r in &rights {
            route_b.push(pair_report(front, m, primes, l, r, budget)?);
        }
    }
    let hat = hat_construction(front, m, homology)?;
    let k: usize = homology.iter().sum();
    let hat_table = hat.propagate_potential()?;
    let hat_rights = BoundaryRuling::enumerate(hat_table.right(), m, None);
    let mut route_a = vec![];
    let mut comparisons = vec![];
    let (mut z_plus_b, mut z_minus_b) = (true, true);
    for l in &lefts {
        let hl = hat_boundary(l, table.left(), m)?;
        for r in &rights {
            let lifts: Vec<_> = hat_rights.iter().filter(|hr| restrict_hat(hr, k).as_ref() == Some(r)).collect();
            let mut sums = vec![0u64; primes.len()];
            for hr in lifts {
                let rep = pair_report(&hat, m, primes, &hl, hr, budget)?;
                for (s, p) in sums.iter_mut().zip(&rep.primes) {
                    *s += p.sweep;
                }
                let c = cells(&hat, m, &hl, hr)?;
                let p = substitute_z(&ruling_polynomial(&hat, m, &hl, hr)?);
                let d = c.cells.iter().map(|c| -c.stats.chi).max();
                z_plus_b &= symbolic_identity(&c, &p, d, 1);
                z_minus_b &= symbolic_identity(&c, &p, d, -1);
                route_a.push(rep);
            }
            for (i, &q) in primes.iter().enumerate() {
                let f = PrimeField::new(q)?;
                comparisons.push(RouteComparison {
                    left: l.to_string(),
                    right: r.to_string(),
                    q,
                    route_a: sums[i],
                    route_b: sweep_count(front, m, f, l, r, budget)?,
                });
            }
        }
    }
    let b = front.num_base_points();
    Ok(GeneralizedReport {
        homology: homology.to_vec(),
        route_b: AugNumberReport { m: m.0, base_points: b, pairs: route_b },
        route_a: AugNumberReport { m: m.0, base_points: b, pairs: route_a },
        comparisons,
        z_plus_b,
        z_minus_b,
    })
}
