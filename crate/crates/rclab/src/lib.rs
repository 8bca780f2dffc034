//! Laboratory for circuits realized in physical space.
//!
//! A circuit drawn on a whiteboard costs nothing to wire: any gate may feed
//! any other, no matter how far apart they sit on the page.  A circuit built
//! in a `d`-dimensional lattice pays for geometry.  Signals travel at most
//! one lattice site per tick (in the Chebyshev metric), every site holds at
//! most a bounded number of components, and a computation finishing at time
//! `T` can only have touched the radius-`T` ball around its origin.
//!
//! This crate provides the pieces needed to study that regime end to end:
//!
//! * [`circuit`] — NAND-basis circuit representation, validation, evaluation,
//!   and a canonical text encoding with line-level edit accounting.
//! * [`uniform`] — parity circuit families and constructive family extension
//!   (grow `C_n` into `C_{n+1}` by local edits rather than a rebuild).
//! * [`geometry`] — ball volumes, sphere areas, packing capacities, and
//!   minimum completion times in `d` dimensions.
//! * [`embed`] — placement and routing of circuits into the lattice, with a
//!   verifier that replays every causal and capacity constraint.
//! * [`width`] — min-cut wire width via max-flow, plus boundary-crossing
//!   profiles of embedded circuits.
//! * [`checker`] — scaling-law fits over measured size/width/time series.
//! * [`flux`] — token dynamics on the lattice and information flux through
//!   sphere boundaries, including saturation runs that meet the area bound.
//! * [`recurrent`] — Turing machines compiled to one-dimensional lattice
//!   automata, run in lockstep, and feedback (recurrent) circuit evaluation.
//! * [`thermo`] — erasure accounting per gate firing against dissipation
//!   budgets scaling with the boundary area.
//! * [`attention`] — capacity bounds for attention-style associative memory
//!   under the same geometric limits, with task-specific lower bounds.
//! * [`report`] — deterministic CSV/SVG emission for sweep artifacts.

pub mod attention;
pub mod checker;
pub mod circuit;
pub mod embed;
pub mod flux;
pub mod geometry;
pub mod recurrent;
pub mod report;
pub mod thermo;
pub mod uniform;
pub mod width;
