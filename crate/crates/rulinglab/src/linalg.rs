//! Prime fields, graded filtered complexes and Barannikov normal forms.
//!
//! Matrix indices are 0-based; `d[i][j] = <d e_i, e_j>`. Isomorphism types
//! use the 1-based [`BoundaryRuling`] convention.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BoundaryRuling, IsoType, Modulus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeField {
    pub q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        let prime = q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| !q.is_multiple_of(d));
        if !prime || q >= 1 << 20 {
            return Err(Error::Invalid(format!("{q} is not a prime below 2^20")));
        }
        Ok(PrimeField { q })
    }

    pub fn from_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.q as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.q
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.q - b) % self.q
    }

    pub fn neg(&self, a: u64) -> u64 {
        (self.q - a) % self.q
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.q;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(!a.is_multiple_of(self.q), "inverse of zero");
        self.pow(a, self.q - 2)
    }

    /// `(-1)^mu`.
    pub fn sign(&self, mu: i64) -> u64 {
        if mu.rem_euclid(2) == 0 {
            1
        } else {
            self.q - 1
        }
    }

    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.q
    }

    pub fn units(&self) -> std::ops::Range<u64> {
        1..self.q
    }
}

pub type Matrix = Vec<Vec<u64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| (i == j) as u64).collect()).collect()
}

pub fn mat_mul(f: PrimeField, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let w = if k == 0 { 0 } else { b[0].len() };
    let mut c = vec![vec![0; w]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] == 0 {
                continue;
            }
            for j in 0..w {
                c[i][j] = (c[i][j] + a[i][l] * b[l][j]) % f.q;
            }
        }
    }
    c
}

/// Inverse by Gauss-Jordan; `None` if singular.
pub fn mat_inv(f: PrimeField, a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = f.inv(m[col][col]);
        for j in 0..n {
            m[col][j] = f.mul(m[col][j], s);
            inv[col][j] = f.mul(inv[col][j], s);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let c = m[r][col];
                for j in 0..n {
                    m[r][j] = f.sub(m[r][j], f.mul(c, m[col][j]));
                    inv[r][j] = f.sub(inv[r][j], f.mul(c, inv[col][j]));
                }
            }
        }
    }
    Some(inv)
}

/// A Z/m-graded filtered complex over F_q on `n` basis vectors
/// `e_1 > ... > e_n` (top to bottom), with `|e_i| = mu[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredComplex {
    pub field: PrimeField,
    pub m: Modulus,
    pub mu: Vec<i64>,
    pub d: Matrix,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    q: u64,
    m: u32,
    mu: Vec<i64>,
    entries: Vec<(usize, usize, i64)>,
}

impl FilteredComplex {
    pub fn zero(field: PrimeField, m: Modulus, mu: Vec<i64>) -> Self {
        let n = mu.len();
        FilteredComplex { field, m, mu, d: vec![vec![0; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    /// Whether an entry at `(i, j)` respects filtration and degree.
    pub fn allowed(&self, i: usize, j: usize) -> bool {
        i < j && self.m.congruent(self.mu[i] - self.mu[j], 1)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n();
        let f = self.field;
        if self.d.len() != n || self.d.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid("matrix size does not match the grading".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let v = self.d[i][j];
                if v >= f.q {
                    return Err(Error::Invalid(format!("entry ({},{}) not reduced mod {}", i + 1, j + 1, f.q)));
                }
                if v != 0 && !self.allowed(i, j) {
                    return Err(Error::Invalid(format!(
                        "entry ({},{}) breaks the filtration or the degree",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let sq = mat_mul(f, &self.d, &self.d);
        if sq.iter().flatten().any(|&v| v != 0) {
            return Err(Error::Invalid("d^2 != 0".into()));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.check().is_ok()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut entries = vec![];
        for i in 0..self.n() {
            for j in 0..self.n() {
                if self.d[i][j] != 0 {
                    entries.push((i + 1, j + 1, self.d[i][j] as i64));
                }
            }
        }
        serde_json::to_value(ComplexJson { q: self.field.q, m: self.m.0, mu: self.mu.clone(), entries }).unwrap()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: ComplexJson = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("complex JSON: {e}")))?;
        let field = PrimeField::new(j.q)?;
        let mut c = FilteredComplex::zero(field, Modulus(j.m), j.mu);
        for (i, k, v) in j.entries {
            if i == 0 || k == 0 || i > c.n() || k > c.n() {
                return Err(Error::Invalid(format!("entry ({i},{k}) out of range")));
            }
            c.d[i - 1][k - 1] = field.from_i64(v);
        }
        c.check()?;
        Ok(c)
    }

    /// Augmentation values `eps(a_ij) = (-1)^{mu(i)} d[i][j]`.
    pub fn eps_values(&self) -> Matrix {
        let f = self.field;
        (0..self.n()).map(|i| self.d[i].iter().map(|&v| f.mul(f.sign(self.mu[i]), v)).collect()).collect()
    }

    /// Inverse of [`FilteredComplex::eps_values`].
    pub fn from_eps(field: PrimeField, m: Modulus, mu: Vec<i64>, eps: &Matrix) -> Self {
        let d = (0..mu.len()).map(|i| eps[i].iter().map(|&v| field.mul(field.sign(mu[i]), v)).collect()).collect();
        FilteredComplex { field, m, mu, d }
    }

    /// `g d g^{-1}`: the differential in the basis `v_i = Σ g[i][j] e_j`.
    pub fn conjugate(&self, g: &Matrix) -> FilteredComplex {
        let f = self.field;
        let gi = mat_inv(f, g).expect("singular change of basis");
        FilteredComplex { d: mat_mul(f, &mat_mul(f, g, &self.d), &gi), ..self.clone() }
    }

    /// Barannikov pairing by row reduction from the bottom.
    pub fn barannikov(&self) -> IsoType {
        let n = self.n();
        let f = self.field;
        let low = |row: &[u64]| row.iter().position(|&v| v != 0);
        // reduced[l] = row whose lowest (smallest) nonzero index is l.
        let mut by_low: Vec<Option<Vec<u64>>> = vec![None; n];
        let mut pairs = vec![];
        for i in (0..n).rev() {
            let mut row = self.d[i].clone();
            while let Some(l) = low(&row) {
                match &by_low[l] {
                    Some(other) => {
                        let c = f.mul(row[l], f.inv(other[l]));
                        for j in 0..n {
                            row[j] = f.sub(row[j], f.mul(c, other[j]));
                        }
                    }
                    None => {
                        pairs.push((i + 1, l + 1));
                        by_low[l] = Some(row);
                        break;
                    }
                }
            }
        }
        let mut used = vec![false; n + 1];
        for &(i, j) in &pairs {
            used[i] = true;
            used[j] = true;
        }
        let hom = (1..=n).filter(|&i| !used[i]).collect();
        BoundaryRuling::new(n, pairs, hom).expect("Barannikov pairing is a partition")
    }

    /// The differential is in the orbit of the canonical complex of `t`.
    pub fn in_orbit(&self, t: &IsoType) -> bool {
        self.barannikov() == *t
    }

    /// The Barannikov representative with `eps(a_{i,rho(i)}) = 1`.
    pub fn canonical(field: PrimeField, m: Modulus, mu: Vec<i64>, t: &IsoType) -> Self {
        let mut c = FilteredComplex::zero(field, m, mu);
        for &(i, j) in &t.pairs {
            c.d[i - 1][j - 1] = field.sign(c.mu[i - 1]);
        }
        c
    }

    /// Canonical unipotent change of basis to the standard form.
    pub fn standardize(&self) -> Standardized {
        let n = self.n();
        let f = self.field;
        let t = self.barannikov();
        let rho: Vec<Option<usize>> = (1..=n).map(|i| t.rho(i).map(|j| j - 1)).collect();
        let is_lower: Vec<bool> = (0..n).map(|i| t.lower().contains(&(i + 1))).collect();
        let mut phi = identity(n);
        // d applied to the new basis vectors of U ∪ H, in e-coordinates.
        let mut dv: Vec<Option<Vec<u64>>> = vec![None; n];
        for i in (0..n).rev() {
            if is_lower[i] {
                continue;
            }
            let target = rho[i].unwrap_or(n);
            let mut a: Vec<usize> = (i + 1..n)
                .filter(|&j| self.m.congruent(self.mu[j], self.mu[i]) && rho[j].is_some_and(|r| r < target))
                .collect();
            a.sort_by_key(|&j| rho[j]);
            let mut row = self.d[i].clone();
            for &j in &a {
                let r = rho[j].unwrap();
                let dj = dv[j].as_ref().unwrap();
                let c = f.mul(row[r], f.inv(dj[r]));
                if c == 0 {
                    continue;
                }
                for l in 0..n {
                    row[l] = f.sub(row[l], f.mul(c, dj[l]));
                    phi[i][l] = f.sub(phi[i][l], f.mul(c, phi[j][l]));
                }
            }
            let lead = row.iter().position(|&v| v != 0);
            assert_eq!(lead, rho[i], "standardization pivot mismatch");
            dv[i] = Some(row);
        }
        let mut pivots = BTreeMap::new();
        for i in 0..n {
            if let Some(r) = rho[i] {
                let row = dv[i].as_ref().unwrap();
                let c = row[r];
                pivots.insert(r + 1, c);
                let ci = f.inv(c);
                phi[r] = row.iter().map(|&v| f.mul(v, ci)).collect();
            }
        }
        let standard = self.conjugate(&phi);
        Standardized { phi0: phi, standard, pivots }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Standardized {
    /// Rows are the new basis vectors in old coordinates.
    pub phi0: Matrix,
    /// `phi0 · d · phi0^{-1}`.
    pub standard: FilteredComplex,
    /// Pivot `c` with `d e_i = c e_{rho(i)}`, keyed by the 1-based lower index.
    pub pivots: BTreeMap<usize, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitStats {
    pub a: u64,
    pub lower: usize,
    pub size: BigUint,
}

/// `A(ρ)` and the orbit size `(q-1)^{|L|} q^{A(ρ)}`.
pub fn orbit_stats(t: &IsoType, mu: &[i64], m: Modulus, q: u64) -> OrbitStats {
    let n = t.n;
    let rho = |i: usize| t.rho(i).unwrap_or(usize::MAX);
    let lower = t.lower();
    let same = |i: usize| (i + 1..=n).filter(move |&j| m.congruent(mu[j - 1], mu[i - 1]));
    let mut a = 0u64;
    for i in 1..=n {
        if lower.contains(&i) {
            a += same(i).count() as u64;
        } else {
            a += same(i).filter(|&j| t.rho(j).is_some() && rho(j) < rho(i)).count() as u64;
        }
    }
    let size = BigUint::from(q - 1).pow(lower.len() as u32) * BigUint::from(q).pow(a as u32);
    OrbitStats { a, lower: lower.len(), size }
}

/// Counts complexes in the orbit of `t` by enumerating every valid
/// differential. Exponential; meant for small `n`.
pub fn brute_force_orbit_size(t: &IsoType, mu: &[i64], m: Modulus, field: PrimeField) -> u64 {
    let base = FilteredComplex::zero(field, m, mu.to_vec());
    let slots: Vec<(usize, usize)> =
        (0..mu.len()).flat_map(|i| (0..mu.len()).map(move |j| (i, j))).filter(|&(i, j)| base.allowed(i, j)).collect();
    let mut c = base;
    let mut count = 0;
    fn rec(k: usize, slots: &[(usize, usize)], c: &mut FilteredComplex, t: &IsoType, count: &mut u64) {
        if k == slots.len() {
            if c.is_valid() && c.in_orbit(t) {
                *count += 1;
            }
            return;
        }
        let (i, j) = slots[k];
        for v in c.field.elements() {
            c.d[i][j] = v;
            rec(k + 1, slots, c, t, count);
        }
        c.d[i][j] = 0;
    }
    rec(0, &slots, &mut c, t, &mut count);
    count
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn br(s: &str, n: usize) -> BoundaryRuling {
        BoundaryRuling::parse(s, n).unwrap()
    }

    #[test]
    fn field_basics() {
        let k = f(7);
        assert_eq!(k.mul(3, k.inv(3)), 1);
        assert_eq!(k.sign(3), 6);
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1 << 21).is_err());
    }

    #[test]
    fn barannikov_examples() {
        let c = FilteredComplex::zero(f(5), Modulus(2), vec![1, 0, 0]);
        assert_eq!(c.barannikov(), BoundaryRuling::empty(3));
        let mut c = FilteredComplex::zero(f(5), Modulus(2), vec![2, 1, 1, 0]);
        c.d[0][1] = 1;
        c.d[2][3] = 1;
        assert_eq!(c.barannikov(), br("(1,2)(3,4)", 4));
        let mut c = FilteredComplex::zero(f(5), Modulus(2), vec![1, 0, 0]);
        c.d[0][1] = 1;
        c.d[0][2] = 1;
        assert_eq!(c.barannikov(), br("(1,2)[3]", 3));
    }

    #[test]
    fn canonical_eps_values() {
        let k = f(5);
        let mu = vec![2, 1, 1, 0];
        let c = FilteredComplex::canonical(k, Modulus(2), mu.clone(), &br("(1,2)(3,4)", 4));
        let e = c.eps_values();
        assert_eq!((e[0][1], e[2][3]), (1, 1));
        assert_eq!(e.iter().flatten().filter(|&&v| v != 0).count(), 2);
        let c2 = FilteredComplex::canonical(k, Modulus(2), mu.clone(), &br("(1,3)(2,4)", 4));
        let e2 = c2.eps_values();
        assert_eq!((e2[0][2], e2[1][3]), (1, 1));
        assert_eq!(c2.d[1][3], 4);
        assert_eq!(FilteredComplex::from_eps(k, Modulus(2), mu, &e2), c2);
        let z = FilteredComplex::canonical(k, Modulus(2), vec![0, 0], &BoundaryRuling::empty(2));
        assert!(z.d.iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn standardize_example() {
        let mut c = FilteredComplex::zero(f(5), Modulus(2), vec![1, 0, 0]);
        c.d[0][1] = 1;
        c.d[0][2] = 1;
        let s = c.standardize();
        assert_eq!(s.phi0[1], vec![0, 1, 1]);
        assert_eq!(s.standard.d[0], vec![0, 1, 0]);
        assert_eq!(s.pivots.get(&2), Some(&1));
        let canon = FilteredComplex::canonical(f(5), Modulus(2), vec![2, 1, 1, 0], &br("(1,2)(3,4)", 4));
        assert_eq!(canon.standardize().phi0, identity(4));
    }

    #[test]
    fn orbit_examples() {
        let mu = [2, 1, 1, 0];
        let a = orbit_stats(&br("(1,2)(3,4)", 4), &mu, Modulus(2), 3);
        assert_eq!((a.lower, a.a, a.size.clone()), (2, 1, BigUint::from(12u32)));
        let b = orbit_stats(&br("(1,3)(2,4)", 4), &mu, Modulus(2), 3);
        assert_eq!((b.a, b.size.clone()), (0, BigUint::from(4u32)));
        for q in [2, 3] {
            let k = f(q);
            assert_eq!(brute_force_orbit_size(&br("(1,2)(3,4)", 4), &mu, Modulus(2), k), (q - 1) * (q - 1) * q);
            assert_eq!(brute_force_orbit_size(&br("(1,3)(2,4)", 4), &mu, Modulus(2), k), (q - 1) * (q - 1));
        }
        let h = orbit_stats(&BoundaryRuling::empty(3), &[0, 0, 0], Modulus(2), 5);
        assert_eq!(h.size, BigUint::from(1u32));
    }

    #[test]
    fn orbit_membership() {
        let k = f(5);
        let mu = vec![2, 1, 1, 0];
        let t = br("(1,2)(3,4)", 4);
        let canon = FilteredComplex::canonical(k, Modulus(2), mu.clone(), &t);
        assert!(canon.in_orbit(&t));
        let mut eps = vec![vec![0; 4]; 4];
        eps[0][1] = 3;
        eps[2][3] = 2;
        let c = FilteredComplex::from_eps(k, Modulus(2), mu.clone(), &eps);
        assert!(c.is_valid());
        assert!(c.in_orbit(&t));
        assert!(!FilteredComplex::zero(k, Modulus(2), mu).in_orbit(&t));
    }

    #[test]
    fn json_roundtrip() {
        let k = f(5);
        let c = FilteredComplex::canonical(k, Modulus(2), vec![2, 1, 1, 0], &br("(1,3)(2,4)", 4));
        let back = FilteredComplex::from_json(&c.to_json().to_string()).unwrap();
        assert_eq!(back, c);
        assert!(FilteredComplex::from_json(r#"{"q":5,"m":2,"mu":[0,0],"entries":[[1,2,1]]}"#).is_err());
    }
}
