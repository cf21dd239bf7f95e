//! Independence polynomials of complete bipartite graphs `K_{m,n}`: exact
//! construction, structured root finding, Hurwitz stability classification,
//! and the contour and threshold computations behind the known stability and
//! instability results for these graphs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contour;
pub mod cpoly;
pub mod error;
pub mod graphs;
pub mod intpoly;
pub mod numfmt;
pub mod pk;
pub mod ratio;
pub mod roots;
pub mod stability;

pub use error::{Error, Result};
