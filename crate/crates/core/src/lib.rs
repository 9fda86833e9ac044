//! Exact-arithmetic library for quadratic forms and orthogonal-group
//! involutions over fields of characteristic 2.
//!
//! The library models quadratic spaces of type (r, s) over GF(2^m) or
//! F2(t1,...,tn), builds and normalizes the involution types that occur in
//! their orthogonal groups (transvection products, null, radical and block
//! involutions), decides conjugacy, and cross-checks every classification
//! against brute-force enumeration of the groups over small finite fields.

pub mod error;
pub mod field;
pub mod involutions;
pub mod linalg;
pub mod bilinear;
pub mod quadspace;

pub use error::{Error, Result};

/// Placeholder until the CLI lands.
pub fn cli_main() -> i32 { 0 }
pub use field::{Elem, Field};
