//! Exact computational toolkit for normal surfaces with ADE singularities.
//!
//! The library works throughout with finitely generated abelian groups in
//! invariant-factor form (built on an integer Smith normal form), Dynkin
//! configurations and their local homology, generalized labeled codes and
//! their shortenings, discriminant forms of polarized ADE lattices, weight
//! restriction checks, and genealogy graphs of code classes.
//!
//! No floating point is used anywhere: group elements, characters and
//! lattice vectors are integers and exact rationals.

pub mod abelian;
pub mod ade;
pub mod catalog;
pub mod codes;
pub mod doc;
pub mod genealogy;
pub mod lattice;
pub mod matrix;
pub mod restrictions;

/// Errors surfaced by the toolkit.
///
/// `Input` covers malformed or inconsistent caller data, `ResourceCap`
/// signals that an enumeration exceeded its configured bound (never a
/// silent truncation).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
