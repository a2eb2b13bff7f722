//! Finding pairs of densely connected vertex sets (sets `L`, `R` with most
//! edges running between them) in hypergraphs, by simulating a nonlinear
//! heat diffusion and rounding its result with a two-sided sweep.
//!
//! The pieces, bottom up:
//!
//! * [`hypergraph`] and [`graph`]: the data structures and the scalar
//!   measures (degrees, cuts, bipartiteness, discrepancy).
//! * [`reductions`]: clique and random reductions to graphs.
//! * [`rate`]: the exact diffusion rate, via per-class linear programs and a
//!   max-flow decomposition that certifies it.
//! * [`diffusion`]: the FBC and FBCA diffusion loops.
//! * [`sweep`]: sweep-set rounding and the clique-reduction baseline.
//! * [`synth`], [`metrics`], [`io`]: benchmark generation, scoring and file
//!   formats.

pub mod diffusion;
pub mod error;
pub mod flow;
pub mod graph;
pub mod hypergraph;
pub mod io;
pub mod lp;
pub mod metrics;
pub mod partition;
pub mod rate;
pub mod reductions;
pub mod rng;
pub mod sweep;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
pub use graph::Graph;
pub use hypergraph::Hypergraph;
pub use partition::Bipartition;
