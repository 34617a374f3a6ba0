//! Shared boundary data: grading moduli and boundary rulings (isomorphism types).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grading modulus. `0` means integer grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus(pub u32);

impl Modulus {
    pub fn reduce(self, a: i64) -> i64 {
        if self.0 == 0 {
            a
        } else {
            a.rem_euclid(self.0 as i64)
        }
    }

    pub fn congruent(self, a: i64, b: i64) -> bool {
        self.reduce(a - b) == 0
    }

    pub fn is_zero(self, a: i64) -> bool {
        self.congruent(a, 0)
    }

    /// `m | n`, with `0 | n` only for `n = 0`.
    pub fn divides(self, n: u32) -> bool {
        if self.0 == 0 {
            n == 0
        } else {
            n.is_multiple_of(self.0)
        }
    }
}

/// A pairing of boundary endpoints, 1-based, plus unpaired homological
/// endpoints. Read as an isomorphism type: `U` are the upper ends of pairs,
/// `L` the lower ends, `H` the homological set and `rho(i) = j` for `(i, j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryRuling {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    pub homological: Vec<usize>,
}

pub type IsoType = BoundaryRuling;

impl BoundaryRuling {
    pub fn new(n: usize, mut pairs: Vec<(usize, usize)>, mut homological: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; n + 1];
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        let ends = pairs.iter().flat_map(|&(i, j)| [i, j]).chain(homological.iter().copied());
        for e in ends {
            if e == 0 || e > n {
                return Err(Error::Invalid(format!("endpoint {e} out of range 1..={n}")));
            }
            if seen[e] {
                return Err(Error::Invalid(format!("endpoint {e} used twice")));
            }
            seen[e] = true;
        }
        if let Some(i) = (1..=n).find(|&i| !seen[i]) {
            return Err(Error::Invalid(format!("endpoint {i} is neither paired nor homological")));
        }
        pairs.sort();
        homological.sort();
        Ok(BoundaryRuling { n, pairs, homological })
    }

    pub fn empty(n: usize) -> Self {
        BoundaryRuling { n, pairs: vec![], homological: (1..=n).collect() }
    }

    /// Parses `(1,2)(3,4)[5]`. Whitespace is ignored.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Invalid(format!("boundary ruling `{text}`: {msg}"));
        let mut pairs = vec![];
        let mut hom = vec![];
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let (open, close) = match rest.as_bytes()[0] {
                b'(' => ('(', ')'),
                b'[' => ('[', ']'),
                _ => return Err(bad("expected `(` or `[`")),
            };
            let end = rest.find(close).ok_or_else(|| bad("unclosed group"))?;
            let body = &rest[1..end];
            let nums: Vec<usize> = body
                .split(',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad("bad index")))
                .collect::<Result<_>>()?;
            match (open, nums.as_slice()) {
                ('(', [i, j]) => pairs.push((*i, *j)),
                ('[', hs) => hom.extend_from_slice(hs),
                ('(', []) if s == "()" => {}
                _ => return Err(bad("a pair needs exactly two indices")),
            }
            rest = &rest[end + 1..];
        }
        Self::new(n, pairs, hom)
    }

    pub fn partner(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn rho(&self, i: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == i).map(|p| p.1)
    }

    pub fn upper(&self) -> Vec<usize> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn lower(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.pairs.iter().map(|p| p.1).collect();
        l.sort();
        l
    }

    pub fn is_acyclic(&self) -> bool {
        self.homological.is_empty()
    }

    /// Checks `mu(i) = mu(j) + 1 (mod m)` on every pair. `mu` is 0-based.
    pub fn check_potentials(&self, mu: &[i64], m: Modulus) -> Result<()> {
        if mu.len() != self.n {
            return Err(Error::Invalid(format!("boundary ruling on {} endpoints, boundary has {}", self.n, mu.len())));
        }
        for &(i, j) in &self.pairs {
            if !m.congruent(mu[i - 1], mu[j - 1] + 1) {
                return Err(Error::Invalid(format!(
                    "pair ({i},{j}) has potentials {} and {}, not differing by 1 mod {}",
                    mu[i - 1],
                    mu[j - 1],
                    m.0
                )));
            }
        }
        Ok(())
    }

    /// Multiplicity of homological endpoints in each degree class. With
    /// integer grading the degrees must be nonnegative.
    pub fn homology_type(&self, mu: &[i64], m: Modulus) -> Vec<usize> {
        let mut h = vec![];
        for &i in &self.homological {
            let d = m.reduce(mu[i - 1]);
            let d = usize::try_from(d).expect("negative degree class");
            if h.len() <= d {
                h.resize(d + 1, 0);
            }
            h[d] += 1;
        }
        if m.0 > 0 && h.len() < m.0 as usize {
            h.resize(m.0 as usize, 0);
        }
        h
    }

    /// All boundary rulings of the given boundary. With `homology = None`
    /// only perfect matchings are produced; otherwise exactly those whose
    /// homological set has the given type.
    pub fn enumerate(mu: &[i64], m: Modulus, homology: Option<&[usize]>) -> Vec<Self> {
        let n = mu.len();
        let mut out = vec![];
        let mut partner = vec![None::<usize>; n];
        let mut hom = vec![];
        fn rec(
            i: usize,
            mu: &[i64],
            m: Modulus,
            allow_hom: bool,
            partner: &mut Vec<Option<usize>>,
            hom: &mut Vec<usize>,
            out: &mut Vec<Vec<Option<usize>>>,
            homs: &mut Vec<Vec<usize>>,
        ) {
            let n = mu.len();
            if i == n {
                out.push(partner.clone());
                homs.push(hom.clone());
                return;
            }
            if partner[i].is_some() {
                return rec(i + 1, mu, m, allow_hom, partner, hom, out, homs);
            }
            if allow_hom {
                hom.push(i);
                rec(i + 1, mu, m, allow_hom, partner, hom, out, homs);
                hom.pop();
            }
            for j in i + 1..n {
                if partner[j].is_none() && m.congruent(mu[i], mu[j] + 1) {
                    partner[i] = Some(j);
                    partner[j] = Some(i);
                    rec(i + 1, mu, m, allow_hom, partner, hom, out, homs);
                    partner[i] = None;
                    partner[j] = None;
                }
            }
        }
        let mut raw = vec![];
        let mut homs = vec![];
        rec(0, mu, m, homology.is_some(), &mut partner, &mut hom, &mut raw, &mut homs);
        for (p, h) in raw.into_iter().zip(homs) {
            let pairs = (0..n).filter_map(|i| p[i].filter(|&j| j > i).map(|j| (i + 1, j + 1))).collect();
            let r = BoundaryRuling::new(n, pairs, h.iter().map(|i| i + 1).collect()).unwrap();
            if let Some(want) = homology {
                if !same_type(&r.homology_type(mu, m), want) {
                    continue;
                }
            }
            out.push(r);
        }
        out.sort();
        out
    }
}

/// Compares homology types ignoring trailing zeros.
pub fn same_type(a: &[usize], b: &[usize]) -> bool {
    let n = a.len().max(b.len());
    (0..n).all(|i| a.get(i).copied().unwrap_or(0) == b.get(i).copied().unwrap_or(0))
}

impl fmt::Display for BoundaryRuling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j) in &self.pairs {
            write!(f, "({i},{j})")?;
        }
        for h in &self.homological {
            write!(f, "[{h}]")?;
        }
        if self.pairs.is_empty() && self.homological.is_empty() {
            write!(f, "()")?;
        }
        Ok(())
    }
}
