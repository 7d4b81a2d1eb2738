//! Sparse gcd certificates for systems of lacunary polynomials.
//!
//! A system `f_i = gamma_i0 + sum_j gamma_ij t^a_j` is the pullback of the
//! linear forms `L_i = gamma_i0 + sum_j gamma_ij x_j` along the curve
//! `t -> (t^a_1, ..., t^a_N)`. Reducing the curve to `psi o phi1` with small
//! `psi` turns the gcd into a small-degree gcd `G` of `F_i = psi^#(L_i)`, and
//! `g = phi1^#(G)` divides every `f_i`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;
use crate::oracle;
use crate::par;
use crate::poly::{self, gcd_many, parse_bigint, parse_rational, ExponentVector, SparsePoly};
use crate::reduction::{reduce, ReductionConfig, ReductionResult};
use crate::torus::{self, MonomialMap};

/// Polynomials `f_i` sharing the support `{0, a_1, ..., a_N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseSystem {
    gamma: Vec<Vec<BigRational>>,
    a: ExponentVector,
}

impl SparseSystem {
    /// Validates: at least one nonzero row, rows of length `N + 1`, exponents
    /// distinct, nonzero and with gcd 1.
    pub fn new(gamma: Vec<Vec<BigRational>>, a: ExponentVector) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::Malformed("empty exponent vector".into()));
        }
        if gamma.iter().any(|r| r.len() != n + 1) {
            return Err(Error::Malformed(format!("every row needs {} coefficients", n + 1)));
        }
        if gamma.iter().all(|r| r.iter().all(Zero::is_zero)) {
            return Err(Error::ZeroInput("every polynomial of the system is zero"));
        }
        check_exponents(&a)?;
        let g = a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g != BigInt::from(1) {
            return Err(Error::Malformed(format!("exponents have gcd {g}")));
        }
        Ok(SparseSystem { gamma, a })
    }

    /// Integer coefficients, convenient for tests and examples.
    pub fn from_i64(gamma: &[&[i64]], a: &[i64]) -> Result<Self> {
        Self::new(
            gamma.iter().map(|r| r.iter().map(|&c| poly::rat(c)).collect()).collect(),
            a.iter().map(|&x| BigInt::from(x)).collect(),
        )
    }

    pub fn gamma(&self) -> &[Vec<BigRational>] {
        &self.gamma
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.a
    }

    /// `N`.
    pub fn num_terms(&self) -> usize {
        self.a.len()
    }

    /// `D = max |a_j|`.
    pub fn degree(&self) -> BigInt {
        self.a.iter().map(Signed::abs).max().unwrap_or_default()
    }

    /// The univariate `f_i`.
    pub fn polys(&self) -> Vec<SparsePoly> {
        self.gamma.iter().map(|r| row_poly(r, &self.a)).collect()
    }

    /// The linear forms `L_i` in `N` variables.
    pub fn linear_forms(&self) -> Vec<SparsePoly> {
        let n = self.a.len();
        self.gamma
            .iter()
            .map(|r| {
                let terms = r.iter().enumerate().map(|(j, c)| {
                    let mut e = vec![BigInt::zero(); n];
                    if j > 0 {
                        e[j - 1] = BigInt::from(1);
                    }
                    (e, c.clone())
                });
                SparsePoly::from_terms(n, terms).expect("arity matches")
            })
            .collect()
    }

    /// The subsum system on `lambda` (0-based term indices), with its
    /// exponents divided by their gcd `d`.
    pub fn subsum(&self, lambda: &[usize]) -> Result<Subsum> {
        if lambda.is_empty() || lambda.iter().any(|&j| j >= self.a.len()) {
            return Err(Error::Dimension(format!("bad subset {lambda:?}")));
        }
        let rows: Vec<Vec<BigRational>> = self
            .gamma
            .iter()
            .map(|r| std::iter::once(r[0].clone()).chain(lambda.iter().map(|&j| r[j + 1].clone())).collect())
            .collect();
        if rows.iter().all(|r| r.iter().all(Zero::is_zero)) {
            return Ok(Subsum::AllZero);
        }
        let sub: Vec<BigInt> = lambda.iter().map(|&j| self.a[j].clone()).collect();
        let (d, reduced) = lattice::vector_gcd_split(&sub)?;
        Ok(Subsum::System(SparseSystem::new(rows, reduced)?, d))
    }
}

/// Result of restricting a system to a subset of its terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subsum {
    /// Every subsum polynomial vanishes identically.
    AllZero,
    /// The subsum system in `t' = t^d`.
    System(SparseSystem, BigInt),
}

fn check_exponents(a: &[BigInt]) -> Result<()> {
    if a.iter().any(Zero::is_zero) {
        return Err(Error::Malformed("exponents must be nonzero".into()));
    }
    let mut sorted = a.to_vec();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Malformed("exponents must be distinct".into()));
    }
    Ok(())
}

fn row_poly(r: &[BigRational], a: &[BigInt]) -> SparsePoly {
    let terms = r.iter().enumerate().map(|(j, c)| {
        let e = if j == 0 { BigInt::zero() } else { a[j - 1].clone() };
        (vec![e], c.clone())
    });
    SparsePoly::from_terms(1, terms).expect("univariate")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Text(String),
    Int(i64),
}

impl Number {
    fn rational(&self) -> Result<BigRational> {
        match self {
            Number::Text(s) => parse_rational(s),
            Number::Int(x) => Ok(poly::rat(*x)),
        }
    }

    fn integer(&self) -> Result<BigInt> {
        match self {
            Number::Text(s) => parse_bigint(s),
            Number::Int(x) => Ok(BigInt::from(*x)),
        }
    }
}

#[derive(Deserialize)]
struct SystemJson {
    gamma: Vec<Vec<Number>>,
    exponents: Vec<Number>,
}

#[derive(Serialize)]
struct SystemOut {
    gamma: Vec<Vec<String>>,
    exponents: Vec<String>,
}

impl SparseSystem {
    /// Parses `{"gamma": [[...], ...], "exponents": [...]}`; entries may be
    /// JSON integers or strings such as `"-3/2"`.
    pub fn from_json(s: &str) -> Result<Self> {
        let j: SystemJson = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
        let gamma = j
            .gamma
            .iter()
            .map(|r| r.iter().map(Number::rational).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let a = j.exponents.iter().map(Number::integer).collect::<Result<Vec<_>>>()?;
        Self::new(gamma, a)
    }

    pub fn to_json(&self) -> String {
        let out = SystemOut {
            gamma: self
                .gamma
                .iter()
                .map(|r| r.iter().map(poly::format_rational).collect())
                .collect(),
            exponents: self.a.iter().map(|x| x.to_string()).collect(),
        };
        serde_json::to_string(&out).expect("serializable")
    }
}

/// Orders `n` at which some primitive `n`-th root of unity is a common root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionAnnotation {
    pub orders: Vec<u64>,
    pub complete_up_to: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcdCertificate {
    #[serde(flatten)]
    pub reduction: ReductionResult,
    #[serde(rename = "G")]
    pub big_g: SparsePoly,
    /// `phi1^#(G)`, not renormalized.
    pub g: SparsePoly,
    /// True when the reduction found no relation (`k = 0`).
    pub fallback: bool,
    /// Subsets `Lambda` (1-based term indices) whose subsum systems have a
    /// common root; `None` when not computed.
    pub exceptional: Option<Vec<Vec<usize>>>,
    pub torsion: Option<TorsionAnnotation>,
}

fn default_torsion_bound(sys: &SparseSystem) -> u64 {
    3 * sys.degree().to_u64().unwrap_or(u64::MAX).min(10_000)
}

/// The sparse gcd certificate. With `cfg.annotate`, also scans for torsion
/// common roots and, for `N <= cfg.exceptional_ceiling`, exceptional subsets.
pub fn sparse_gcd(sys: &SparseSystem, cfg: &ReductionConfig) -> Result<GcdCertificate> {
    let annotate = cfg.annotate;
    let exceptional = annotate && sys.num_terms() <= cfg.exceptional_ceiling;
    certify(sys, cfg, annotate, exceptional)
}

fn certify(sys: &SparseSystem, cfg: &ReductionConfig, torsion: bool, exceptional: bool) -> Result<GcdCertificate> {
    let phi = MonomialMap::curve(sys.exponents());
    let mut red = reduce(&phi, cfg)?;
    let forms = sys.linear_forms();
    let big_g = loop {
        let fs = forms
            .iter()
            .map(|l| torus::pullback(&red.psi, l))
            .collect::<Result<Vec<_>>>()?;
        match gcd_many(&fs, cfg.degree_ceiling) {
            Ok(g) => break g,
            // back off to a shallower reduction whose pullbacks fit
            Err(Error::DegreeCeiling { .. }) if red.k > 0 => {
                let shallower = ReductionConfig {
                    max_levels: Some(red.k - 1),
                    ..cfg.clone()
                };
                red = reduce(&phi, &shallower)?;
            }
            Err(e) => return Err(e),
        }
    };
    let g = torus::pullback(&red.phi1, &big_g)?;
    let torsion = torsion.then(|| cyclotomic_scan(sys, cfg.cyclotomic_bound.unwrap_or_else(|| default_torsion_bound(sys))));
    let exceptional = if exceptional {
        Some(exceptional_subsets(sys, &cfg.quiet())?)
    } else {
        None
    };
    Ok(GcdCertificate {
        fallback: red.k == 0,
        reduction: red,
        big_g,
        g,
        exceptional,
        torsion,
    })
}

/// Exact test for common roots of unity of order `n <= order_bound`.
///
/// `Phi_n` divides `r` iff `t^n - 1` divides `r * prod_{p | n} (t^(n/p) - 1)`,
/// so each row is reduced mod `t^n - 1` (at most `N + 1` terms) and multiplied
/// by a product of `2^omega(n)` terms. Cost never depends on `D`.
pub fn cyclotomic_scan(sys: &SparseSystem, order_bound: u64) -> TorsionAnnotation {
    torsion_scan(sys.gamma(), sys.exponents(), order_bound)
}

/// [`cyclotomic_scan`] on raw rows, without the system invariants.
pub fn torsion_scan(gamma: &[Vec<BigRational>], a: &[BigInt], order_bound: u64) -> TorsionAnnotation {
    let hits = par::map_range(order_bound as usize, |i| {
        let n = i as u64 + 1;
        gamma
            .iter()
            .filter(|r| r.iter().any(|c| !c.is_zero()))
            .all(|r| cyclotomic_divides(r, a, n))
            .then_some(n)
    });
    TorsionAnnotation {
        orders: hits.into_iter().flatten().collect(),
        complete_up_to: order_bound,
    }
}

fn cyclotomic_divides(row: &[BigRational], a: &[BigInt], n: u64) -> bool {
    let nb = BigInt::from(n);
    let mut r: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (j, c) in row.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = if j == 0 {
            0
        } else {
            a[j - 1].mod_floor(&nb).to_u64().expect("reduced")
        };
        *r.entry(e).or_insert_with(BigRational::zero) += c;
    }
    r.retain(|_, c| !c.is_zero());
    if r.is_empty() {
        return true;
    }
    let mut m: Vec<(u64, i32)> = vec![(0, 1)];
    for p in oracle::prime_factors(n) {
        let s = n / p;
        m = m
            .iter()
            .flat_map(|&(e, c)| [((e + s) % n, c), (e, -c)])
            .collect();
    }
    let mut out: BTreeMap<u64, BigRational> = BTreeMap::new();
    for (e, c) in &r {
        for &(f, s) in &m {
            let v = out.entry((e + f) % n).or_insert_with(BigRational::zero);
            if s > 0 {
                *v += c;
            } else {
                *v -= c;
            }
        }
    }
    out.values().all(Zero::is_zero)
}

/// Nonempty proper subsets `Lambda` (1-based) whose subsum systems have a
/// common root: either every subsum vanishes, or the recursive certificate
/// has nonconstant `g` or a torsion common root.
pub fn exceptional_subsets(sys: &SparseSystem, cfg: &ReductionConfig) -> Result<Vec<Vec<usize>>> {
    let n = sys.num_terms();
    if n > cfg.exceptional_ceiling {
        return Err(Error::Ceiling(format!(
            "exceptional subsets enumerated only for N <= {}",
            cfg.exceptional_ceiling
        )));
    }
    let masks: Vec<u32> = (1..(1u32 << n) - 1).collect();
    let found = par::map(&masks, |&mask| -> Result<Option<Vec<usize>>> {
        let lambda: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let report = match sys.subsum(&lambda)? {
            Subsum::AllZero => true,
            Subsum::System(sub, _) => {
                let cert = certify(&sub, cfg, true, false)?;
                !cert.g.is_monomial() || cert.torsion.is_some_and(|t| !t.orders.is_empty())
            }
        };
        Ok(report.then(|| lambda.iter().map(|j| j + 1).collect()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Vec<usize>> = found.into_iter().flatten().collect();
    out.sort();
    Ok(out)
}

/// One named check of [`verify_certificate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Counterexample for a failed divisibility check.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Re-checks a certificate against its system: structural identities
/// always, and divisibility of the dense gcd by `g` when `D <= ceiling`.
pub fn verify_certificate(sys: &SparseSystem, cert: &GcdCertificate, ceiling: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let mut push = |name: &str, passed: bool, detail: Option<String>| {
        out.push(Check {
            name: name.into(),
            passed,
            detail,
        })
    };
    let red = &cert.reduction;
    let phi = MonomialMap::curve(sys.exponents());
    push("composition", torus::compose(&red.psi, &red.phi1).ok() == Some(phi), None);
    push("psi injective", red.psi.is_injective(), None);
    push("g is the pullback of G", torus::pullback(&red.phi1, &cert.big_g).ok() == Some(cert.g.clone()), None);
    let mut failed = None;
    for (i, l) in sys.linear_forms().iter().enumerate() {
        let f = torus::pullback(&red.psi, l)?;
        if failed.is_none() && !f.is_zero() && f.div_exact(&cert.big_g)?.is_none() {
            failed = Some(format!("G does not divide F_{} = {f}", i + 1));
        }
    }
    push("G divides every F_i", failed.is_none(), failed);
    if sys.degree() <= BigInt::from(ceiling) {
        let dense = sys
            .polys()
            .iter()
            .map(|f| oracle::densify(f, ceiling))
            .collect::<Result<Vec<_>>>()?;
        let gcd = oracle::dense_gcd_many(&dense)?;
        let g = oracle::densify(&cert.g, ceiling)?;
        let detail = if g.is_zero() {
            Some("g is zero".to_string())
        } else {
            let (_, r) = gcd.div_rem(&g);
            (!r.is_zero()).then(|| format!("dense gcd {gcd} leaves remainder {r} modulo g"))
        };
        push("g divides the dense gcd", detail.is_none(), detail);
    }
    Ok(out)
}
