//! Finite-stage machinery for ends of locally finite graphs.
//!
//! The crate works with three kinds of objects:
//!
//! - finite multigraphs ([`multigraph`]) with the two contraction flavours
//!   used throughout: quotienting by a partition while dropping new loops, and
//!   contracting a single edge while keeping them;
//! - lazily generated locally finite connected graphs ([`locally_finite`])
//!   explored by distance classes, together with their truncation inverse
//!   systems (dummy vertices standing in for the infinite components);
//! - tree blowups ([`blowup`]): the rooted binary tree with every level-`n`
//!   node replaced by a complete block, which serve as universal targets.
//!
//! On top of those sit the two embedding recursions ([`embed_lf`] for
//! locally finite graphs, [`embed_gl`] for graph-like continua given as
//! single-edge contraction systems from [`graphlike`]) and the bundled
//! verification suites in [`verify`].

pub mod blowup;
pub mod embed_gl;
pub mod embed_lf;
mod error;
pub mod graphlike;
pub mod limits;
pub mod locally_finite;
pub mod multigraph;
mod name;
pub mod verify;

pub use error::{Error, Result};
pub use name::Name;
