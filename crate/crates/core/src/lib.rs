//! Random sequential adsorption (RSA) on random geometric graphs and on the
//! clustered random graph model that serves as their corrected mean-field
//! surrogate.
//!
//! The crate is organised bottom-up:
//!
//! - [`params`], [`graph`], [`rng`]: shared parameter bundle, the immutable
//!   graph type and the reproducible random stream contract.
//! - [`sampling`]: exact Poisson, binomial and hypergeometric variates drawn
//!   from an [`RngStream`].
//! - [`rgg`], [`crg`]: the two graph generators.
//! - [`rsa`]: greedy jamming on an explicit graph and an exact small-graph
//!   oracle.
//! - [`explore`]: the graph-free exploration chain for the clustered model.
//! - [`meanfield`], [`special`]: the deterministic limits (jamming fraction,
//!   CLT variance) and the dimension-to-clustering map.
//! - [`mc`], [`io`]: replication harness, summaries and file formats.

// Negated float comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod crg;
pub mod error;
pub mod explore;
pub mod graph;
pub mod io;
pub mod mc;
pub mod meanfield;
pub mod numeric;
pub mod params;
pub mod rgg;
pub mod rng;
pub mod rsa;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
pub use graph::{Graph, Vertex};
pub use params::Params;
pub use rng::RngStream;
pub use rsa::JamResult;
