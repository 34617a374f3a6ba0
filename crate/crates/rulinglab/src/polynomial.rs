//! Exact Laurent polynomials, Ruling polynomials and composition checks.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::front::TangleFront;
use crate::ruling::{enumerate_rulings, RulingPath};
use crate::types::{BoundaryRuling, Modulus};

pub trait Var: Clone + fmt::Debug + PartialEq + Eq {
    const NAME: &'static str;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z;
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct S;

impl Var for Z {
    const NAME: &'static str = "z";
}
impl Var for S {
    const NAME: &'static str = "s";
}

/// A Laurent polynomial with integer coefficients in one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent<V: Var> {
    terms: BTreeMap<i64, BigInt>,
    var: PhantomData<V>,
}

pub type LaurentPoly = Laurent<Z>;
/// Laurent polynomial in `s = q^{1/2}`.
pub type HalfPoly = Laurent<S>;

impl<V: Var> Laurent<V> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new(), var: PhantomData }
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    pub fn var() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn shift(&self, by: i64) -> Self {
        Laurent { terms: self.terms.iter().map(|(e, c)| (e + by, c.clone())).collect(), var: PhantomData }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut p = Self::zero();
        for (e, v) in &self.terms {
            p.add_term(*e, v * c);
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient by `d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (dmax, dmin) = (d.max_degree()?, d.min_degree()?);
        let dlead = d.coeff(dmax);
        let mut rem = self.clone();
        let mut q = Self::zero();
        while let (Some(rmax), Some(rmin)) = (rem.max_degree(), rem.min_degree()) {
            if rmax - rmin < dmax - dmin {
                return None;
            }
            let c = rem.coeff(rmax);
            if !(&c % &dlead).is_zero() {
                return None;
            }
            let t = Self::monomial(c / &dlead, rmax - dmax);
            rem = &rem - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    /// Exact value at an integer point, as a rational.
    pub fn eval(&self, x: &num_rational::BigRational) -> num_rational::BigRational {
        let mut acc = num_rational::BigRational::zero();
        for (e, c) in &self.terms {
            let xe = if *e >= 0 {
                num_traits::pow(x.clone(), *e as usize)
            } else {
                num_traits::pow(x.recip(), (-e) as usize)
            };
            acc += xe * num_rational::BigRational::from_integer(c.clone());
        }
        acc
    }

    /// `(exponent, coefficient)` pairs in increasing exponent order.
    pub fn to_pairs(&self) -> Vec<(i64, String)> {
        self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "var": V::NAME,
            "exponents": self.terms.keys().collect::<Vec<_>>(),
            "coefficients": self.terms.values().map(|c| c.to_string()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Option<Self> {
        let es = v.get("exponents")?.as_array()?;
        let cs = v.get("coefficients")?.as_array()?;
        if es.len() != cs.len() {
            return None;
        }
        let mut p = Self::zero();
        for (e, c) in es.iter().zip(cs) {
            p.add_term(e.as_i64()?, c.as_str()?.parse().ok()?);
        }
        Some(p)
    }
}

impl<V: Var> Serialize for Laurent<V> {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de, V: Var> Deserialize<'de> for Laurent<V> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        Self::from_json(&v).ok_or_else(|| serde::de::Error::custom("bad polynomial"))
    }
}

impl<V: Var> Default for Laurent<V> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<V: Var> Add for &Laurent<V> {
    type Output = Laurent<V>;
    fn add(self, o: &Laurent<V>) -> Laurent<V> {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl<V: Var> Sub for &Laurent<V> {
    type Output = Laurent<V>;
    fn sub(self, o: &Laurent<V>) -> Laurent<V> {
        self + &(-o)
    }
}

impl<V: Var> Neg for &Laurent<V> {
    type Output = Laurent<V>;
    fn neg(self) -> Laurent<V> {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), var: PhantomData }
    }
}

impl<V: Var> Mul for &Laurent<V> {
    type Output = Laurent<V>;
    fn mul(self, o: &Laurent<V>) -> Laurent<V> {
        let mut p = Laurent::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl<V: Var> $tr for Laurent<V> {
            type Output = Laurent<V>;
            fn $f(self, o: Laurent<V>) -> Laurent<V> { (&self).$f(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

impl<V: Var> fmt::Display for Laurent<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let var = match *e {
                0 => String::new(),
                1 => V::NAME.to_string(),
                e => format!("{}^{}", V::NAME, e),
            };
            if var.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{a}*{var}")?;
            }
        }
        Ok(())
    }
}

/// `s - s^{-1}`, the image of `z`.
pub fn z_in_s() -> HalfPoly {
    HalfPoly::from_terms([(1, 1), (-1, -1)])
}

/// `num / (s - s^{-1})^den`, kept with the smallest possible `den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalS {
    pub num: HalfPoly,
    pub den: u32,
}

impl RationalS {
    pub fn new(num: HalfPoly, den: u32) -> Self {
        let z = z_in_s();
        let (mut num, mut den) = (num, den);
        while den > 0 {
            match num.div_exact(&z) {
                Some(q) => {
                    num = q;
                    den -= 1;
                }
                None => break,
            }
        }
        if num.is_zero() {
            den = 0;
        }
        RationalS { num, den }
    }

    pub fn poly(p: HalfPoly) -> Self {
        RationalS { num: p, den: 0 }
    }

    pub fn as_poly(&self) -> Option<&HalfPoly> {
        (self.den == 0).then_some(&self.num)
    }

    pub fn add(&self, o: &RationalS) -> RationalS {
        let z = z_in_s();
        let d = self.den.max(o.den);
        let a = &self.num * &z.pow(d - self.den);
        let b = &o.num * &z.pow(d - o.den);
        RationalS::new(&a + &b, d)
    }

    pub fn mul(&self, o: &RationalS) -> RationalS {
        RationalS::new(&self.num * &o.num, self.den + o.den)
    }

    /// Multiplies by `z^e` for any integer `e`.
    pub fn mul_z_pow(&self, e: i64) -> RationalS {
        if e >= 0 {
            RationalS::new(&self.num * &z_in_s().pow(e as u32), self.den)
        } else {
            RationalS::new(self.num.clone(), self.den + (-e) as u32)
        }
    }
}

impl fmt::Display for RationalS {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den {
            0 => write!(f, "{}", self.num),
            1 => write!(f, "({}) / (s - s^-1)", self.num),
            d => write!(f, "({}) / (s - s^-1)^{}", self.num, d),
        }
    }
}

/// `z -> s - s^{-1}`.
pub fn substitute_z(p: &LaurentPoly) -> RationalS {
    let mut acc = RationalS::poly(HalfPoly::zero());
    for (e, c) in p.terms() {
        acc = acc.add(&RationalS::poly(HalfPoly::monomial(c.clone(), 0)).mul_z_pow(e));
    }
    acc
}

/// `Σ c z^a (q/(q-1))^b`, keyed by `(a, b)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenPoly {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl GenPoly {
    pub fn zero() -> Self {
        GenPoly::default()
    }

    pub fn term(c: impl Into<BigInt>, z: i64, h: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(z, h, c.into());
        p
    }

    pub fn add_term(&mut self, z: i64, h: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((z, h)).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(z, h));
        }
    }

    pub fn add(&self, o: &GenPoly) -> GenPoly {
        let mut p = self.clone();
        for ((z, h), c) in &o.terms {
            p.add_term(*z, *h, c.clone());
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &BigInt)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `z -> s - s^{-1}`, `q/(q-1) -> s/(s - s^{-1})`.
    pub fn substitute(&self) -> RationalS {
        let mut acc = RationalS::poly(HalfPoly::zero());
        for ((z, h), c) in &self.terms {
            let t = RationalS::poly(HalfPoly::monomial(c.clone(), *h)).mul_z_pow(z - h);
            acc = acc.add(&t);
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        let t: Vec<_> = self.terms.iter().map(|((z, h), c)| serde_json::json!([z, h, c.to_string()])).collect();
        serde_json::json!({ "terms": t })
    }
}

impl fmt::Display for GenPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((z, h), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mut parts = vec![];
            match *z {
                0 => {}
                1 => parts.push("z".to_string()),
                e => parts.push(format!("z^{e}")),
            }
            match *h {
                0 => {}
                1 => parts.push("(q/(q-1))".to_string()),
                e => parts.push(format!("(q/(q-1))^{e}")),
            }
            if !a.is_one() || parts.is_empty() {
                parts.insert(0, a.to_string());
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

fn paths_polynomial(paths: &[RulingPath]) -> LaurentPoly {
    let mut p = LaurentPoly::zero();
    for r in paths {
        p = &p + &LaurentPoly::monomial(1, -r.chi());
    }
    p
}

/// `Σ z^{-χ(ρ)}` over normal rulings with the given boundary.
pub fn ruling_polynomial(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<LaurentPoly> {
    Ok(paths_polynomial(&enumerate_rulings(front, m, rho_l, rho_r, false)?))
}

/// `Σ z^{-χ(ρ)} (q/(q-1))^{h(ρ)}` over generalized normal rulings.
pub fn generalized_ruling_polynomial(
    front: &TangleFront,
    m: Modulus,
    rho_l: &BoundaryRuling,
    rho_r: &BoundaryRuling,
) -> Result<GenPoly> {
    let mut p = GenPoly::zero();
    for r in enumerate_rulings(front, m, rho_l, rho_r, true)? {
        p.add_term(-r.chi(), r.h as i64, BigInt::one());
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RulingMatrix {
    pub left: Vec<BoundaryRuling>,
    pub right: Vec<BoundaryRuling>,
    pub entries: Vec<Vec<LaurentPoly>>,
}

impl RulingMatrix {
    pub fn get(&self, l: &BoundaryRuling, r: &BoundaryRuling) -> Option<&LaurentPoly> {
        let i = self.left.iter().position(|x| x == l)?;
        let j = self.right.iter().position(|x| x == r)?;
        Some(&self.entries[i][j])
    }

    pub fn mul(&self, o: &RulingMatrix) -> Result<RulingMatrix> {
        if self.right != o.left {
            return Err(Error::Boundary("inner boundary rulings differ".into()));
        }
        let entries = (0..self.left.len())
            .map(|i| {
                (0..o.right.len())
                    .map(|j| {
                        (0..self.right.len())
                            .fold(LaurentPoly::zero(), |acc, k| &acc + &(&self.entries[i][k] * &o.entries[k][j]))
                    })
                    .collect()
            })
            .collect();
        Ok(RulingMatrix { left: self.left.clone(), right: o.right.clone(), entries })
    }
}

impl fmt::Display for RulingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.left.iter().enumerate() {
            for (j, r) in self.right.iter().enumerate() {
                writeln!(f, "<{l}|R|{r}> = {}", self.entries[i][j])?;
            }
        }
        Ok(())
    }
}

/// Ruling polynomials for all pairs of boundary rulings.
pub fn ruling_matrix(front: &TangleFront, m: Modulus) -> Result<RulingMatrix> {
    let t = front.propagate_potential()?;
    let left = BoundaryRuling::enumerate(t.left(), m, None);
    let right = BoundaryRuling::enumerate(t.right(), m, None);
    let mut entries = vec![];
    for l in &left {
        let mut row = vec![];
        for r in &right {
            row.push(ruling_polynomial(front, m, l, r)?);
        }
        entries.push(row);
    }
    Ok(RulingMatrix { left, right, entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub left: BoundaryRuling,
    pub right: BoundaryRuling,
    pub composed: LaurentPoly,
    pub product: LaurentPoly,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub entries_checked: usize,
    pub discrepancies: Vec<Discrepancy>,
}

impl CompositionReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares two matrices over the same bases entrywise.
pub fn compare_matrices(composed: &RulingMatrix, product: &RulingMatrix) -> CompositionReport {
    let mut rep = CompositionReport { entries_checked: 0, discrepancies: vec![] };
    for (i, l) in composed.left.iter().enumerate() {
        for (j, r) in composed.right.iter().enumerate() {
            rep.entries_checked += 1;
            let c = &composed.entries[i][j];
            let p = product.get(l, r).cloned().unwrap_or_default();
            if *c != p {
                rep.discrepancies.push(Discrepancy {
                    left: l.clone(),
                    right: r.clone(),
                    composed: c.clone(),
                    product: p,
                });
            }
        }
    }
    rep
}

/// Checks `matrix(T1 ∘ T2) = matrix(T1) · matrix(T2)`.
pub fn compose_check(t1: &TangleFront, t2: &TangleFront, m: Modulus) -> Result<CompositionReport> {
    let whole = t1.compose(t2)?;
    let composed = ruling_matrix(&whole, m)?;
    let product = ruling_matrix(t1, m)?.mul(&ruling_matrix(t2, m)?)?;
    Ok(compare_matrices(&composed, &product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::front::parse_tangle;

    fn z(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(terms.iter().copied())
    }

    fn trefoil() -> TangleFront {
        parse_tangle("r = 1\nleft = 4\nmu = [2,1,1,0]\nx 2\nx 2\nx 2\n").unwrap()
    }

    #[test]
    fn printing() {
        assert_eq!(z(&[(1, 2), (3, 1)]).to_string(), "2*z + z^3");
        assert_eq!(z(&[(-1, 2), (1, 1)]).to_string(), "2*z^-1 + z");
        assert_eq!(z(&[(0, -1), (2, 1)]).to_string(), "-1 + z^2");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
        assert_eq!(z(&[(1, 1), (2, -3)]).to_string(), "z - 3*z^2");
    }

    #[test]
    fn json_roundtrip() {
        let p = z(&[(-2, 5), (1, -1)]);
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(serde_json::from_value::<LaurentPoly>(v).unwrap(), p);
    }

    #[test]
    fn trefoil_polynomials() {
        let t = trefoil();
        let a = BoundaryRuling::parse("(1,2)(3,4)", 4).unwrap();
        let b = BoundaryRuling::parse("(1,3)(2,4)", 4).unwrap();
        let m = Modulus(2);
        assert_eq!(ruling_polynomial(&t, m, &a, &a).unwrap().to_string(), "2*z + z^3");
        assert_eq!(ruling_polynomial(&t, m, &a, &b).unwrap().to_string(), "1 + z^2");
        assert_eq!(ruling_polynomial(&t, m, &b, &a).unwrap().to_string(), "1 + z^2");
        assert_eq!(ruling_polynomial(&t, m, &b, &b).unwrap().to_string(), "z");
        let mat = ruling_matrix(&t, m).unwrap();
        assert_eq!(mat.left, vec![a.clone(), b.clone()]);
        assert_eq!(mat.entries[0][1], z(&[(0, 1), (2, 1)]));
    }

    #[test]
    fn plat_trefoil_polynomial() {
        let p = parse_tangle("r = 1\nleft = 0\nlc 1 1\nlc 3 0\nx 2\nx 2\nx 2\nrc 3\nrc 1\n").unwrap();
        let e = BoundaryRuling::empty(0);
        let r = ruling_polynomial(&p, Modulus(2), &e, &e).unwrap();
        assert_eq!(r, z(&[(-1, 2), (1, 1)]));
    }

    #[test]
    fn trivial_matrix_is_identity() {
        let t = TangleFront::new(1, vec![2, 1, 1, 0], vec![]);
        let mat = ruling_matrix(&t, Modulus(2)).unwrap();
        for i in 0..mat.left.len() {
            for j in 0..mat.right.len() {
                let want = if i == j { LaurentPoly::one() } else { LaurentPoly::zero() };
                assert_eq!(mat.entries[i][j], want);
            }
        }
    }

    #[test]
    fn trefoil_composition() {
        let t = trefoil();
        for cut in 0..=3 {
            let (a, b) = t.split(cut).unwrap();
            assert!(compose_check(&a, &b, Modulus(2)).unwrap().passed());
        }
    }

    #[test]
    fn permuted_basis_is_detected() {
        let t = trefoil();
        let (a, b) = t.split(1).unwrap();
        let composed = ruling_matrix(&t, Modulus(2)).unwrap();
        let mut product = ruling_matrix(&a, Modulus(2)).unwrap().mul(&ruling_matrix(&b, Modulus(2)).unwrap()).unwrap();
        product.right.reverse();
        assert!(!compare_matrices(&composed, &product).passed());
    }

    #[test]
    fn substitution() {
        let s = substitute_z(&z(&[(1, 2), (3, 1)]));
        assert_eq!(s.as_poly().unwrap(), &HalfPoly::from_terms([(3, 1), (1, -1), (-1, 1), (-3, -1)]));
        assert_eq!(substitute_z(&LaurentPoly::one()).as_poly().unwrap(), &HalfPoly::one());
        assert_eq!(GenPoly::term(1, 1, 1).substitute().as_poly().unwrap(), &HalfPoly::var());
        let zi = substitute_z(&z(&[(-1, 1)]));
        assert_eq!(zi.den, 1);
    }

    #[test]
    fn type_three_identity() {
        let lhs = GenPoly::term(1, 1, 0).add(&GenPoly::term(1, 3, 1));
        let rhs = GenPoly::term(1, 3, 2);
        assert_eq!(lhs.substitute(), rhs.substitute());
        assert_ne!(GenPoly::term(1, 3, 1).substitute(), rhs.substitute());
        assert_eq!(lhs.to_string(), "z + z^3*(q/(q-1))");
    }

    #[test]
    fn exact_division() {
        let p = HalfPoly::from_terms([(2, 1), (0, -1)]);
        assert_eq!(p.div_exact(&z_in_s()).unwrap(), HalfPoly::var());
        assert!(HalfPoly::one().div_exact(&z_in_s()).is_none());
    }
}
