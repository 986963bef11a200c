//! Exact maximal flows, minimal cutsets and threshold-percolation structure
//! for first-passage capacities on the lattice `Z^d`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs: capacity fields are evaluated lazily from a seed
//! through a counter-based generator keyed by absolute edge coordinates, so
//! two fields built from the same seed are coupled edge by edge.
//!
//! Module map:
//!
//! * [`distributions`] capacity laws on `[0, +inf]`, truncation, shift,
//!   envelopes, stochastic order and the inverse-CDF coupled field.
//! * [`lattice`] points, edges, rational directions, hyperrectangles,
//!   cylinders and slabs, and the finite flow problems they induce.
//! * [`maxflow`] exact max-flow / min-cut with extended capacities and the
//!   minimal-cardinality cutset rule, plus a brute-force oracle.
//! * [`percolation`] level-`K` clusters, diameters, exterior boundaries and
//!   the regularity events.
//! * [`flows`] the flow functionals built on top of all of the above.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod distributions;
pub mod error;
pub mod flows;
pub mod lattice;
pub mod maxflow;
pub mod percolation;
pub mod rational;
pub mod rng;

pub use distributions::{
    Capacity, CapacityField, Capacities, Distribution, Level, Prob, Total, Value, DEFAULT_QUANTUM,
};
pub use error::{Error, Result};
pub use lattice::{
    CylinderKind, CylinderSpec, Direction, Edge, FlowProblem, Height, Hyperrect, Point, Terminals,
};
pub use flows::{
    annulus_decomposition, annulus_flow, animal, cutset_surgery, phi, phi_directed, slab_height,
    subadditive_split, tau, tilde_phi, zero_cutset,
};
pub use maxflow::{brute_force_min_cut, efficient, is_cutset, max_flow, validate_stream, CutResult};
