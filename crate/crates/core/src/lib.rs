//! Linear codes over F_{2^n} whose defining sets are built from simplicial
//! complexes in F_2^m, together with the machinery needed to analyse them:
//! binary-field towers, LFSR coordinate sequences, character sums, closed-form
//! weight formulas, subfield codes, and a claim-by-claim verifier that checks
//! predicted parameters against brute-force weight enumeration.

pub mod bitmat;
pub mod cli;
pub mod codes;
pub mod error;
pub mod gf2n;
pub mod lfsr;
pub mod simplicial;
pub mod verify;
pub mod weight_theory;

pub use error::{Error, Result};
