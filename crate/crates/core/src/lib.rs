//! Desk-scale computational workbench for Yang-Mills-type gauge theories.
//!
//! The crate evaluates discretized gauge actions with arbitrary curvature
//! pairings, classifies invariant pairings and rank bounds, constructs and
//! verifies extensions of such theories, and implements the monoid, group-ring
//! module and category structures on extension spaces over finite sampled
//! configuration domains.
//!
//! Module map: [`lie`] and [`groups`] carry the algebra/group layer,
//! [`fields`] the lattice discretization, [`pairing`] the pairing space,
//! [`theory`] the action functionals, [`scalar`] the scalar-invariance
//! polynomial, [`group_ring`] exact group-ring arithmetic, [`ext`] the
//! extension calculus, [`cat`] the category of extensions, and [`io`] the
//! serialization schemas used by the command-line front end.

pub mod error;
pub mod linalg;

pub mod lie;

pub mod groups;

pub mod fields;

pub mod pairing;

pub mod theory;

pub mod scalar;

pub mod group_ring;

pub mod ext;

pub mod cat;

pub mod io;

pub use error::{Result, YmtError};
