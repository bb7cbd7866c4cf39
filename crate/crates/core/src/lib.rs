//! Numerical core for sublinear integral equations `u = G(u^q dσ)` with `0 < q < 1`.
//!
//! The crate is `no_std` (it needs `alloc`). It covers:
//!
//! * [`measure`]: finite measures built from point atoms and uniform cells, and
//!   the `L^q(σ)` / `L^{q,∞}(σ)` quasi-norms of sampled functions;
//! * [`kernel`]: the min, Riesz, Poisson and symmetrized Poisson kernels plus
//!   tabulated matrix kernels, with quasi-symmetry and weak maximum principle probes;
//! * [`potential`]: potentials `Gν`, the Hardy split on the half-line, the exact
//!   one-dimensional embedding constant, the K-potential envelope and finite-set capacity;
//! * [`solver`]: monotone fixed-point iteration for `u = G(u^q dσ)` and its certificates;
//! * [`maximal`]: fractional, measure-normalized and dyadic maximal operators,
//!   the maximal fixed-point iteration and Hausdorff content upper bounds;
//! * [`poisson`]: Poisson extension, balayage, `PP*` and the Carleson constructions;
//! * [`lab`]: brute-force checks of the equivalences on finite matrix kernels.

#![no_std]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod kernel;
pub mod lab;
pub mod lp;
pub mod maximal;
pub mod measure;
pub mod poisson;
pub mod potential;
pub mod solver;

mod key;

pub use error::{Error, Result};
pub use geometry::AxisBox;
pub use kernel::{KernelSpec, KernelVariant, WeakMaxReport};
pub use measure::{CellAtom, DiscreteMeasure, Domain, GridFunction, PointAtom};
pub use solver::{IterationReport, SeedScale, SolveOptions};
