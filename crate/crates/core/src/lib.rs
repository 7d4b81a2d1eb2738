//! Exact sparse (lacunary) polynomial toolkit.
//!
//! Computes gcd certificates for systems of sparse univariate Laurent
//! polynomials in time polylogarithmic in the degree, structure witnesses
//! for their multiple non-cyclotomic roots, and rank checks for osculating
//! spaces of monomial curves. A dense brute-force [`oracle`] checks the sparse
//! results on desk-scale inputs.
//!
//! ```
//! use lacunary::poly::SparsePoly;
//! use lacunary::multiplicity::find_witness;
//! use lacunary::reduction::ReductionConfig;
//! use num_bigint::BigInt;
//!
//! // (t^D - 2)^2 = 4 - 4 t^D + t^(2D) with D = 10^9
//! let d = BigInt::from(1_000_000_000u64);
//! let gamma = vec![4.into(), (-4).into(), 1.into()].into_iter()
//!     .map(|x: i64| lacunary::poly::rat(x)).collect::<Vec<_>>();
//! let w = find_witness(&gamma, &[d.clone(), &d * 2], &ReductionConfig::new(6))
//!     .unwrap()
//!     .expect("witness");
//! assert_eq!(w.theta, vec![d]);
//! ```

pub mod cli;
pub mod error;
pub mod gcd_engine;
pub mod lattice;
pub mod multiplicity;
pub mod oracle;
pub mod osculating;
pub mod par;
pub mod poly;
pub mod reduction;
pub mod torus;

pub use error::{Error, Result};
