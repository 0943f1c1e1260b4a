//! Exact arithmetic for mixed sums of generalized polygonal numbers.
//!
//! The crate is organised around a handful of modules:
//!
//! - [`polygonal`]: generalized polygonal numbers, representation counts and
//!   truants of sums `a_1 P_{m_1} + ... + a_r P_{m_r}`.
//! - [`escalator`]: escalator trees over the classes bounded by
//!   `lcm(m_i - 2)`, the depth-two truant table and the depth-three/four scans.
//! - [`padic`]: closed forms for the local density integrals `I_p(n; phi)` at
//!   odd primes and at `p = 2`.
//! - [`lattice`]: the shifted lattice attached to a sum, per-prime local
//!   densities and rigorous Eisenstein-coefficient intervals.
//! - [`oracle`]: brute-force ground truth used to check everything above.
//!
//! Data-parallel loops go through [`exec::Exec`]; with the `parallel` feature
//! disabled every loop runs sequentially.

pub mod arith;
pub mod bitset;
pub mod corpus;
pub mod error;
pub mod escalator;
pub mod exec;
pub mod interval;
pub mod lattice;
pub mod oracle;
pub mod padic;
pub mod polygonal;

pub use error::{Error, Result};
pub use exec::Exec;
pub use polygonal::{PolygonalSum, Term, TruantResult};
