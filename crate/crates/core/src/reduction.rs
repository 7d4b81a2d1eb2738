//! Iterated reduction of a curve through small subtori.
//!
//! Starting from `phi(t) = (t^a_1, ..., t^a_N)`, each level looks for the
//! lexicographically first primitive relation `b` with `|b| <= B_k` on the
//! current exponent vector and factors the curve through `{x^b = 1}`. A pass
//! that finds nothing ends the loop.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, IntMatrix};
use crate::poly::{ExponentVector, DEFAULT_DEGREE_CEILING};
use crate::torus::{self, MonomialMap, Subtorus};

/// Bounds and ceilings shared by the reduction and everything built on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// `B_k` for level `k`; the last entry repeats.
    pub bound_schedule: Vec<u64>,
    /// Defaults to `N - 1`.
    pub max_levels: Option<usize>,
    /// Re-express `psi` in free original coordinates after each level when a
    /// unit minor allows it.
    pub lift: bool,
    /// Per-variable degree ceiling for small gcds.
    pub degree_ceiling: u64,
    /// Largest root-of-unity order scanned; `None` means `3 * min(D, 10^4)`.
    pub cyclotomic_bound: Option<u64>,
    /// Largest `N` for which exceptional subsets are enumerated.
    pub exceptional_ceiling: usize,
    /// Whether certificates carry exceptional-subset and torsion annotations.
    pub annotate: bool,
}

impl ReductionConfig {
    /// Constant bound `B` at every level.
    pub fn new(bound: u64) -> Self {
        Self::with_schedule(vec![bound])
    }

    pub fn with_schedule(bound_schedule: Vec<u64>) -> Self {
        ReductionConfig {
            bound_schedule,
            max_levels: None,
            lift: true,
            degree_ceiling: DEFAULT_DEGREE_CEILING,
            cyclotomic_bound: None,
            exceptional_ceiling: 6,
            annotate: true,
        }
    }

    pub fn bound_at(&self, level: usize) -> u64 {
        let s = &self.bound_schedule;
        s.get(level).or(s.last()).copied().unwrap_or(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bound_schedule.is_empty() || self.bound_schedule.contains(&0) {
            return Err(Error::Precondition("bounds must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn quiet(&self) -> Self {
        ReductionConfig {
            annotate: false,
            ..self.clone()
        }
    }
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self::new(6)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub level: usize,
    pub bound: u64,
    /// The relation found, in the coordinates current at that level.
    pub subtorus: Subtorus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionResult {
    pub k: usize,
    pub psi: MonomialMap,
    pub phi1: MonomialMap,
    pub trace: Vec<TraceStep>,
    /// `prod_k (N B_k)^N`, the recorded ceiling on `size(psi)`.
    #[serde(with = "crate::poly::decimal")]
    pub psi_bound: BigInt,
}

impl ReductionResult {
    /// The identity reduction `k = 0`.
    pub fn trivial(a: &[BigInt]) -> Self {
        ReductionResult {
            k: 0,
            psi: MonomialMap::identity(a.len()),
            phi1: MonomialMap::curve(a),
            trace: Vec::new(),
            psi_bound: BigInt::one(),
        }
    }

    pub fn phi1_exponents(&self) -> ExponentVector {
        self.phi1.matrix().column(0)
    }
}

/// Runs the reduction on a curve whose exponent vector has gcd 1.
pub fn reduce(phi: &MonomialMap, cfg: &ReductionConfig) -> Result<ReductionResult> {
    cfg.validate()?;
    let a = phi.exponents()?;
    let g = a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return Err(Error::ZeroInput("exponent vector"));
    }
    if !g.is_one() {
        return Err(Error::Precondition(format!(
            "exponent vector has gcd {g}; normalize first"
        )));
    }
    let n = a.len();
    let max_levels = cfg.max_levels.unwrap_or(n - 1).min(n - 1);
    let mut res = ReductionResult::trivial(&a);
    while res.k < max_levels {
        let bound = cfg.bound_at(res.k);
        let cur = res.phi1_exponents();
        let Some(b) = lattice::kernel_scan(&cur, bound, 1).pop() else {
            break;
        };
        let t = Subtorus::new(b)?;
        let (psi_t, phi_t) = torus::riduci(&res.phi1, &t)?;
        res.psi = torus::compose(&res.psi, &psi_t)?;
        res.phi1 = phi_t;
        res.trace.push(TraceStep {
            level: res.k,
            bound,
            subtorus: t,
        });
        res.psi_bound *= BigInt::from(n as u64 * bound).pow(n as u32);
        res.k += 1;
        if cfg.lift {
            if let Some((psi, phi1)) = free_coordinates(&res.psi, &a)? {
                res.psi = psi;
                res.phi1 = phi1;
            }
        }
    }
    debug_assert_eq!(torus::compose(&res.psi, &res.phi1).ok().as_ref(), Some(phi));
    Ok(res)
}

/// Re-bases the image lattice of `psi` so that a subset of the original
/// coordinates is free. With `R` the relation lattice (left kernel of `psi`)
/// and `S` a column set where `R_S` is unimodular, the free coordinates `F`
/// give `psi[F] = I`, `psi[S] = -R_S^-1 R_F` and `phi1 = a[F]`.
///
/// Among admissible `S`, prefers the smallest `size(psi)`, then the smallest
/// `size(phi1)`.
fn free_coordinates(psi: &MonomialMap, a: &[BigInt]) -> Result<Option<(MonomialMap, MonomialMap)>> {
    let r = lattice::left_kernel(psi.matrix());
    let (k, n) = (r.rows(), r.cols());
    if k == 0 {
        return Ok(None);
    }
    let mut best: Option<((BigInt, BigInt), MonomialMap, MonomialMap)> = None;
    for s in subsets(n, k) {
        let rs = r.select_columns(&s);
        if lattice::det(&rs)?.magnitude() != &One::one() {
            continue;
        }
        let free: Vec<usize> = (0..n).filter(|j| !s.contains(j)).collect();
        let rs_inv = lattice::inverse_unimodular(&rs)?;
        let dep = rs_inv.mul(&r.select_columns(&free))?;
        let mut m = IntMatrix::zeros(n, free.len());
        for (jj, &j) in free.iter().enumerate() {
            m.set(j, jj, BigInt::one());
        }
        for (ii, &i) in s.iter().enumerate() {
            for jj in 0..free.len() {
                m.set(i, jj, -dep.get(ii, jj));
            }
        }
        let new_psi = MonomialMap::new(m);
        let phi1: Vec<BigInt> = free.iter().map(|&j| a[j].clone()).collect();
        let new_phi = MonomialMap::curve(&phi1);
        let key = (new_psi.size(), new_phi.size());
        if best.as_ref().is_none_or(|(bk, _, _)| key < *bk) {
            best = Some((key, new_psi, new_phi));
        }
    }
    Ok(best.map(|(_, p, f)| (p, f)))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
