//! Certified upper bounds for (weighted) independence numbers of packing
//! graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] holds finite packing graphs, the instance generators and an
//!   exact branch-and-bound oracle for `α` and `α_w`.
//! * [`basis`] enumerates the independent sets `I_t` in canonical order and
//!   tabulates the union rule that defines moment-matrix entries.
//! * [`sdp`] is a dense primal–dual interior-point solver for
//!   block-diagonal semidefinite programs, with SDPA import/export.
//! * [`hierarchy`] assembles the moment hierarchy `las_t`, the `ϑ`/`ϑ′`
//!   two-point programs and the three-point bound, and checks dual kernels
//!   independently of the solver.
//! * [`sphere`] is the symmetry-reduced two-point bound for spherical codes
//!   (the Delsarte linear programming bound) with polynomial certificates.
//! * [`cli`] is the command-line front end used by the `packbound` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod cli;
pub mod graph;
pub mod hierarchy;
pub mod sdp;
pub mod sphere;

pub use faer;

pub use basis::{IndepSetBasis, UnionTable};
pub use graph::{AlphaResult, Graph};
pub use hierarchy::{BoundResult, Certificate, MomentProgram};
pub use sdp::{SdpProblem, SdpSolution, SolveStatus};
