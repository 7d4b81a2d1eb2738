// Ordinary (nonnegative exponent) multivariate polynomials with machine-word
// exponents. Only used once degrees are known to be small.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::SparsePoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct MPoly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MPoly {
    pub fn zero(n: usize) -> Self {
        MPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n);
        }
        MPoly {
            n: self.n,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn leading(&self) -> Option<(&Vec<u32>, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Scales so the lexicographically leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => self.clone(),
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
        }
    }

    /// Exact division by lexicographic leading terms.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (de, dc) = d.leading().map(|(e, c)| (e.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut q = Self::zero(self.n);
        while let Some((e, c)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&de).any(|(a, b)| a < b) {
                return None;
            }
            let diff: Vec<u32> = e.iter().zip(&de).map(|(a, b)| a - b).collect();
            let mut t = Self::zero(self.n);
            t.add_term(diff, c / &dc);
            rem = rem.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    /// Splits into coefficients of powers of `var`, each a polynomial in the
    /// remaining `n - 1` variables.
    pub fn to_univariate(&self, var: usize) -> Vec<MPoly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![MPoly::zero(self.n - 1); deg + 1];
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest.remove(var) as usize;
            out[k].add_term(rest, c.clone());
        }
        trim(&mut out);
        out
    }

    pub fn from_univariate(n: usize, var: usize, coeffs: &[MPoly]) -> MPoly {
        let mut r = MPoly::zero(n);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut full = e.clone();
                full.insert(var, k as u32);
                r.add_term(full, v.clone());
            }
        }
        r
    }

    /// Converts a Laurent polynomial after stripping its monomial factor.
    /// Returns the stripped shift as well.
    pub fn from_sparse(p: &SparsePoly) -> Option<(MPoly, Vec<BigInt>)> {
        let min = p.min_exponents();
        let mut r = MPoly::zero(p.num_vars());
        for (e, c) in p.terms() {
            let mut v = Vec::with_capacity(e.len());
            for (x, m) in e.iter().zip(&min) {
                v.push((x - m).to_u32()?);
            }
            r.add_term(v, c.clone());
        }
        Some((r, min))
    }

    pub fn to_sparse(&self) -> SparsePoly {
        SparsePoly::from_terms(
            self.n,
            self.terms
                .iter()
                .map(|(e, c)| (e.iter().map(|&x| BigInt::from(x)).collect(), c.clone())),
        )
        .expect("consistent arity")
    }
}

pub(crate) fn trim(v: &mut Vec<MPoly>) {
    while v.len() > 1 && v.last().map(MPoly::is_zero).unwrap_or(false) {
        v.pop();
    }
    if v.len() == 1 && v[0].is_zero() {
        v.clear();
    }
}
