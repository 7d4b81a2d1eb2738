//! Second intersections of a monomial curve with its osculating space.
//!
//! For `0 = a_0 < a_1 < ... < a_N` the osculating space at `(1, ..., 1)` is
//! `{rank A(a, x) < N}` with rows `(1, a_i, ..., a_i^(N-2), x_i)`. It is cut
//! out by two linear forms, so a second intersection point `xi^a` is a common
//! root of two lacunary polynomials and the gcd engine applies.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcd_engine::{sparse_gcd, torsion_scan, GcdCertificate, SparseSystem};
use crate::lattice::{self, IntMatrix};
use crate::multiplicity::{delta_filter, enumerate_witness_subspaces, strip_torsion_factors};
use crate::oracle::{self, DensePoly, DEFAULT_ORACLE_CEILING};
use crate::par;
use crate::poly::{gcd_many, gcd_small, ExponentVector, SparsePoly};
use crate::reduction::ReductionConfig;
use crate::torus::{self, MonomialMap};

/// Largest number of column sets [`SubspaceTable::new`] will examine.
pub const SUBSPACE_ENUMERATION_CEILING: u64 = 5_000_000;

/// Exponents `0 < a_1 < ... < a_N` with gcd 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OsculatingInstance {
    a: ExponentVector,
}

impl OsculatingInstance {
    pub fn new(a: ExponentVector) -> Result<Self> {
        if a.len() < 3 {
            return Err(Error::Precondition("need N >= 3".into()));
        }
        if !a[0].is_positive() || a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Precondition("exponents must be positive and strictly increasing".into()));
        }
        let g = a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if !g.is_one() {
            return Err(Error::Precondition(format!("exponents have gcd {g}; normalize first")));
        }
        Ok(OsculatingInstance { a })
    }

    /// Divides by the gcd first. Scaling `a` by `d` scales column `j` of `A`
    /// by `d^j`, so the osculating space is unchanged.
    pub fn normalized(a: &[BigInt]) -> Result<(Self, BigInt)> {
        let (d, a1) = lattice::vector_gcd_split(a)?;
        Ok((Self::new(a1)?, d))
    }

    pub fn from_i64(a: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn exponents(&self) -> &[BigInt] {
        &self.a
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `D = a_N`.
    pub fn degree(&self) -> &BigInt {
        self.a.last().expect("nonempty")
    }

    /// `a_0, ..., a_N` with `a_0 = 0`.
    fn homogeneous(&self) -> Vec<BigInt> {
        std::iter::once(BigInt::zero()).chain(self.a.iter().cloned()).collect()
    }

    /// `A(a, x)` for a point `x` of length `N + 1`.
    pub fn matrix_at(&self, x: &[BigRational]) -> Result<Vec<Vec<BigRational>>> {
        let n = self.n();
        if x.len() != n + 1 {
            return Err(Error::Dimension(format!("point needs {} coordinates", n + 1)));
        }
        Ok(self
            .homogeneous()
            .iter()
            .zip(x)
            .map(|(ai, xi)| {
                let ai = BigRational::from_integer(ai.clone());
                let mut row: Vec<BigRational> = (0..n - 1).map(|k| pow_q(&ai, k)).collect();
                row.push(xi.clone());
                row
            })
            .collect())
    }
}

fn pow_q(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |acc, _| acc * x)
}

fn vandermonde(xs: &[BigInt]) -> BigInt {
    let mut p = BigInt::one();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            p *= &xs[j] - &xs[i];
        }
    }
    p
}

/// Rank over Q by Gaussian elimination.
pub fn rank_q(mut m: Vec<Vec<BigRational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c].clone();
        for i in rank + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &pivot;
            let (top, rest) = m.split_at_mut(i);
            for (x, p) in rest[0][c..cols].iter_mut().zip(&top[rank][c..cols]) {
                *x -= &f * p;
            }
        }
        rank += 1;
    }
    rank
}

/// Coefficients of `x_0, ..., x_N` in the maximal minor of `A(a, x)` that
/// omits row `deleted`, by cofactor expansion along the `x` column.
pub fn minor_form(inst: &OsculatingInstance, deleted: usize) -> Vec<BigInt> {
    let h = inst.homogeneous();
    let n = inst.n();
    let rows: Vec<usize> = (0..=n).filter(|&i| i != deleted).collect();
    let mut coef = vec![BigInt::zero(); n + 1];
    for (p, &i) in rows.iter().enumerate() {
        let others: Vec<BigInt> = rows.iter().filter(|&&j| j != i).map(|&j| h[j].clone()).collect();
        let v = vandermonde(&others);
        coef[i] = if (p + n - 1).is_multiple_of(2) { v } else { -v };
    }
    coef
}

fn independent(r1: &[BigInt], r2: &[BigInt]) -> bool {
    (0..r1.len()).any(|i| (i + 1..r1.len()).any(|j| &r1[i] * &r2[j] != &r1[j] * &r2[i]))
}

/// Coefficient rows of two independent minor forms: rows 0 and 1 deleted,
/// moving on to later pairs only if those are dependent.
pub fn minor_rows(inst: &OsculatingInstance) -> Result<[Vec<BigInt>; 2]> {
    let n = inst.n();
    for i in 0..=n {
        for j in i + 1..=n {
            let (r1, r2) = (minor_form(inst, i), minor_form(inst, j));
            if independent(&r1, &r2) {
                return Ok([r1, r2]);
            }
        }
    }
    Err(Error::Precondition("all minor forms are dependent".into()))
}

/// The two linear forms in `x_0, ..., x_N` cutting out the osculating space.
pub fn build_minor_forms(inst: &OsculatingInstance) -> Result<(SparsePoly, SparsePoly)> {
    let [r1, r2] = minor_rows(inst)?;
    let n = inst.n();
    let form = |r: &[BigInt]| {
        SparsePoly::from_terms(
            n + 1,
            r.iter().enumerate().map(|(i, c)| {
                let mut e = vec![BigInt::zero(); n + 1];
                e[i] = BigInt::one();
                (e, BigRational::from_integer(c.clone()))
            }),
        )
    };
    Ok((form(&r1)?, form(&r2)?))
}

/// The gcd-engine system `f_i = L_i(1, t^a_1, ..., t^a_N)`.
pub fn minor_system(inst: &OsculatingInstance) -> Result<SparseSystem> {
    let rows = minor_rows(inst)?;
    SparseSystem::new(
        rows.iter()
            .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
            .collect(),
        inst.a.clone(),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// No subspace within the bounds carries a non-torsion second point.
    NoSmallStructure,
    /// Some bounded `B` carries one, re-verified densely.
    CandidateFound,
    /// Only the trivial `B = a` carries one.
    FallbackSmallD,
}

/// Outcome for one `B` with `a = B theta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceCheck {
    #[serde(rename = "B")]
    pub b: IntMatrix,
    #[serde(with = "crate::poly::decimal_vec")]
    pub theta: Vec<BigInt>,
    /// Common factor of all minors after removing factors that pull back
    /// to monomials or vanish only at roots of unity.
    pub common_factor: SparsePoly,
    /// Whether the resultant of the first two minors in the last variable
    /// vanishes identically.
    pub resultant_vanishes: bool,
    pub candidate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionPoint {
    /// `rank A(a, (1 : ... : 1))`.
    pub rank: usize,
    /// Rank deficient there, and `t = 1` is a common root found by the
    /// torsion scan.
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirolaReport {
    #[serde(with = "crate::poly::decimal_vec")]
    pub a: Vec<BigInt>,
    /// The input was `scale * a`.
    #[serde(with = "crate::poly::decimal")]
    pub scale: BigInt,
    pub certificate: GcdCertificate,
    pub witness_subspaces: Vec<SubspaceCheck>,
    /// The check at `B = a`, `theta = 1`, when the degree is small.
    pub small_degree: Option<SubspaceCheck>,
    pub torsion_point: TorsionPoint,
    pub verdict: Verdict,
}

type TableCache = HashMap<(usize, u64), Arc<SubspaceTable>>;

/// Primitive `B` with small entries together with a basis of the relations
/// `R B = 0`, so that `a` lies in the span of `B` iff `R a = 0`.
pub struct SubspaceTable {
    pub n: usize,
    pub bound: u64,
    entries: Vec<(IntMatrix, IntMatrix)>,
}

impl SubspaceTable {
    pub fn new(n: usize, bound: u64) -> Result<Self> {
        let side = 2.0 * bound as f64 + 1.0;
        let vecs = (side.powi(n as i32) - 1.0) / 2.0;
        let mut combos = 0.0;
        let mut c = 1.0;
        for r in 1..n {
            c = c * (vecs - (r as f64 - 1.0)) / r as f64;
            combos += c;
        }
        if combos > SUBSPACE_ENUMERATION_CEILING as f64 {
            return Err(Error::Ceiling(format!(
                "about {combos:.0} column sets for N = {n}, bound = {bound}"
            )));
        }
        let entries = enumerate_witness_subspaces(n, bound)
            .into_iter()
            .map(|b| {
                let r = lattice::left_kernel(&b);
                (b, r)
            })
            .collect();
        Ok(SubspaceTable { n, bound, entries })
    }

    /// Shared table for `(n, bound)`.
    pub fn cached(n: usize, bound: u64) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<TableCache>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().expect("cache lock").get(&(n, bound)) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::new(n, bound)?);
        cache.lock().expect("cache lock").insert((n, bound), t.clone());
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Matrices whose column span contains `a`.
    pub fn containing<'a>(&'a self, a: &'a [BigInt]) -> impl Iterator<Item = &'a IntMatrix> + 'a {
        self.entries
            .iter()
            .filter(move |(_, r)| r.mul_vec(a).is_ok_and(|v| v.iter().all(Zero::is_zero)))
            .map(|(b, _)| b)
    }
}

/// The `(N-1) x (N-1)` minors of the dehomogenized matrix with rows
/// `(a_i, ..., a_i^(N-2), y^b_i - 1)`, one per omitted row.
fn subspace_minors(inst: &OsculatingInstance, b: &IntMatrix) -> Result<Vec<SparsePoly>> {
    let n = inst.n();
    let vars = b.cols();
    let binom = |i: usize| -> Result<SparsePoly> {
        SparsePoly::from_terms(
            vars,
            [
                (b.row(i), BigRational::one()),
                (vec![BigInt::zero(); vars], -BigRational::one()),
            ],
        )
    };
    let mut out = Vec::with_capacity(n);
    for deleted in 0..n {
        let rows: Vec<usize> = (0..n).filter(|&i| i != deleted).collect();
        let mut m = SparsePoly::zero(vars);
        for (p, &i) in rows.iter().enumerate() {
            let others: Vec<BigInt> = rows.iter().filter(|&&j| j != i).map(|&j| inst.a[j].clone()).collect();
            // rows (a_j, ..., a_j^(N-2)) = a_j (1, ..., a_j^(N-3))
            let det = others.iter().product::<BigInt>() * vandermonde(&others);
            let sign = if (p + n - 2).is_multiple_of(2) { det } else { -det };
            m = m.add(&binom(i)?.scale(&BigRational::from_integer(sign)))?;
        }
        out.push(m);
    }
    Ok(out)
}

/// Exact bound on the order of roots of unity in a polynomial of degree
/// `deg <= 10^4`: `n / phi(n) < 6` below `10^5`.
fn order_bound(deg: usize) -> u64 {
    6 * deg as u64 + 30
}

/// Whether `Res_var(p, q)` vanishes: iff one input is zero or they share a
/// factor of positive degree in `var`. Much cheaper than the Sylvester
/// determinant.
fn resultant_vanishes(p: &SparsePoly, q: &SparsePoly, var: usize, ceiling: u64) -> Result<bool> {
    if p.is_zero() || q.is_zero() {
        return Ok(true);
    }
    let g = gcd_small(p, q, ceiling)?;
    Ok(g.max_exponents()[var] != g.min_exponents()[var])
}

struct DenseGcd(OnceLock<Option<DensePoly>>);

impl DenseGcd {
    fn get(&self, sys: &SparseSystem) -> Option<&DensePoly> {
        self.0
            .get_or_init(|| {
                let dense: Option<Vec<DensePoly>> = sys
                    .polys()
                    .iter()
                    .map(|f| oracle::densify(f, DEFAULT_ORACLE_CEILING).ok())
                    .collect();
                oracle::dense_gcd_many(&dense?).ok()
            })
            .as_ref()
    }
}

fn check_subspace(
    inst: &OsculatingInstance,
    sys: &SparseSystem,
    dense: &DenseGcd,
    b: IntMatrix,
    theta: Vec<BigInt>,
    cfg: &ReductionConfig,
) -> Result<SubspaceCheck> {
    let minors = subspace_minors(inst, &b)?;
    let g = gcd_many(&minors, cfg.degree_ceiling)?;
    let (g, _) = delta_filter(&g, &theta, cfg.degree_ceiling)?;
    let (g, _) = strip_torsion_factors(&g)?;
    let last = b.cols() - 1;
    let resultant_vanishes = resultant_vanishes(&minors[0], &minors[1], last, cfg.degree_ceiling)?;
    let mut candidate = false;
    if !g.is_constant() {
        let pi = torus::pullback(&MonomialMap::curve(&theta), &g)?;
        candidate = match oracle::densify(&pi, DEFAULT_ORACLE_CEILING) {
            Ok(p) if !pi.is_monomial() => {
                let p = p.strip_t();
                let deg = p.degree().unwrap_or(0);
                let (core, _) = oracle::cyclotomic_strip(&p, order_bound(deg))?;
                // the second point must also be a common root of the minor forms
                !core.is_constant()
                    && dense
                        .get(sys)
                        .is_some_and(|d| !oracle::dense_gcd(&core, d).is_ok_and(|c| c.is_constant()))
            }
            Ok(_) => false,
            // too large to decide densely: report the structure
            Err(_) => !pi.is_monomial(),
        };
    }
    Ok(SubspaceCheck {
        b,
        theta,
        common_factor: g,
        resultant_vanishes,
        candidate,
    })
}

/// Checks every bounded primitive `B` with `a = B theta`, `|theta| <=
/// theta_box`, for a codimension-one component of the rank-deficient locus
/// through a non-torsion point of the curve.
pub fn pirola_check(inst: &OsculatingInstance, cfg: &ReductionConfig, theta_box: u64) -> Result<PirolaReport> {
    let table = SubspaceTable::cached(inst.n(), cfg.bound_at(0))?;
    check_with_table(inst, BigInt::one(), cfg, theta_box, &table)
}

fn check_with_table(
    inst: &OsculatingInstance,
    scale: BigInt,
    cfg: &ReductionConfig,
    theta_box: u64,
    table: &SubspaceTable,
) -> Result<PirolaReport> {
    if theta_box == 0 {
        return Err(Error::Precondition("theta_box must be positive".into()));
    }
    let sys = minor_system(inst)?;
    let certificate = sparse_gcd(&sys, cfg)?;
    let dense = DenseGcd(OnceLock::new());
    let tb = BigInt::from(theta_box);
    let mut witness_subspaces = Vec::new();
    for b in table.containing(&inst.a) {
        let theta = lattice::solve_factorization(b, &inst.a)?;
        if theta.iter().any(|t| t.abs() > tb) {
            continue;
        }
        witness_subspaces.push(check_subspace(inst, &sys, &dense, b.clone(), theta, cfg)?);
    }
    let small_degree = if inst.degree() <= &BigInt::from(cfg.degree_ceiling) {
        let b = IntMatrix::column_vector(&inst.a);
        Some(check_subspace(inst, &sys, &dense, b, vec![BigInt::one()], cfg)?)
    } else {
        None
    };
    let ones = vec![BigRational::one(); inst.n() + 1];
    let rank = rank_q(inst.matrix_at(&ones)?);
    let at_one = torsion_scan(sys.gamma(), sys.exponents(), 1);
    let torsion_point = TorsionPoint {
        rank,
        flagged: rank < inst.n() && at_one.orders == [1],
    };
    let verdict = if witness_subspaces.iter().any(|c| c.candidate) {
        Verdict::CandidateFound
    } else if small_degree.as_ref().is_some_and(|c| c.candidate) {
        Verdict::FallbackSmallD
    } else {
        Verdict::NoSmallStructure
    };
    Ok(PirolaReport {
        a: inst.a.clone(),
        scale,
        certificate,
        witness_subspaces,
        small_degree,
        torsion_point,
        verdict,
    })
}

/// All `0 < a_1 < ... < a_N <= max_d`, each normalized by its gcd. With
/// `theta_box = None` the box is `2 * D * bound` per instance.
pub fn pirola_scan(n: usize, max_d: u64, cfg: &ReductionConfig, theta_box: Option<u64>) -> Result<Vec<PirolaReport>> {
    let table = SubspaceTable::cached(n, cfg.bound_at(0))?;
    let mut instances = Vec::new();
    let mut cur: Vec<u64> = (1..=n as u64).collect();
    if n == 0 || cur[n - 1] > max_d {
        return Ok(Vec::new());
    }
    loop {
        instances.push(cur.clone());
        // next strictly increasing tuple
        let mut i = n;
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            if cur[i] < max_d - (n - 1 - i) as u64 {
                cur[i] += 1;
                for k in i + 1..n {
                    cur[k] = cur[k - 1] + 1;
                }
                i = usize::MAX;
                break;
            }
        }
        if i != usize::MAX {
            break;
        }
    }
    par::map(&instances, |a| {
        let a: Vec<BigInt> = a.iter().map(|&x| BigInt::from(x)).collect();
        let (inst, d) = OsculatingInstance::normalized(&a)?;
        let boxed = theta_box.unwrap_or_else(|| 2 * inst.degree().to_u64().unwrap_or(u64::MAX / 4) * cfg.bound_at(0));
        check_with_table(&inst, d, cfg, boxed, &table)
    })
    .into_iter()
    .collect()
}
