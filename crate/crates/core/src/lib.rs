//! Exact rational flows on finite graphs, connected toast decompositions,
//! and rounding of rational flows to integral flows with sup-norm change
//! below 3.
//!
//! The crate is split along the pipeline:
//!
//! * [`rational`] — arbitrary-precision rationals with dyadic predicates,
//! * [`graph`] — finite simple graphs, tori, neighborhoods, Følner and
//!   hole/annulus predicates,
//! * [`flow`] — antisymmetric edge flows, divergence, flow verification,
//! * [`toast`] — the nested-tile data structure, validation, stratification
//!   and generation on tori,
//! * [`parity`] — parity (T-join style) subgraphs, cycle decompositions and
//!   constrained cycle search,
//! * [`rounding`] — the two-stage rounding algorithm (rational → dyadic →
//!   integral),
//! * [`oracle`] — brute-force ground truth: feasibility, enumeration and
//!   seeded instance generation,
//! * [`equidecomp`] — translation actions on tori, Følner tilings and
//!   flow-driven equidecompositions.
//!
//! All arithmetic is exact; nothing here touches floating point. Everything
//! is deterministic given the inputs (and seeds, where applicable).

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod equidecomp;
pub mod flow;
pub mod graph;
pub mod oracle;
pub mod parity;
pub mod rational;
pub mod rounding;
pub mod toast;

pub use flow::{Flow, FlowProblem, FlowReport};
pub use graph::{Graph, Vertex, VertexSet};
pub use rational::ExactRational;
pub use toast::{Toast, ToastLevels};

use alloc::string::String;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A vertex that is not part of the graph at hand.
    UnknownVertex(Vertex),
    /// Mismatched graphs between two arguments.
    GraphMismatch,
    /// A precondition on the input data does not hold.
    Domain(String),
    /// Structurally malformed input (dangling ids, unknown vertices, ...).
    Format(String),
    /// Parameters outside the supported range.
    Parameter(String),
    /// Input for which the requested operation has no answer by design.
    Infeasible(String),
    /// A runtime assertion the algorithm relies on failed; carries a
    /// description of the witness state.
    CertifiedFailure(String),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            Error::GraphMismatch => write!(f, "arguments refer to different graphs"),
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::Format(m) => write!(f, "format error: {m}"),
            Error::Parameter(m) => write!(f, "parameter error: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible input: {m}"),
            Error::CertifiedFailure(m) => write!(f, "certified failure: {m}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
