//! Two-mode nonlinear coherent states on the fixed-charge Fock ladder.
//!
//! A state of charge `q` lives on `F_q = span{|n+q, n>}` and is stored as the
//! amplitude vector `c_0 .. c_N`. The crate builds eigenstates of
//! `f(N_a, N_b) a b` by two independent routes, applies photon addition,
//! subtraction and Kerr evolution, and checks the defining identities
//! numerically.

pub mod cli;
pub mod constructors;
pub mod error;
pub mod fock;
pub mod io;
pub mod nlfun;
pub mod sweep;
pub mod transforms;
pub mod verify;

pub use num_complex::Complex64;

pub use constructors::{
    build, build_by_exponential, build_by_recursion, build_parity_superposition,
    build_perelomov_closed, perelomov_tau, BaseKind, StateKind, StateSpec, Truncation,
    TruncationMode,
};
pub use error::{Result, TmnlcsError};
pub use fock::{FockLadderState, LadderAction, Mode};
pub use nlfun::{Catalog, NonlinearFunction};
pub use transforms::{KerrParams, Operation, TransformRecord};
pub use verify::{Check, PhotonStatistics, VerificationReport};

/// Underflow guard for norms and "nonzero" amplitude tests.
pub const EPS_FLOOR: f64 = 1e-300;

/// Relative tail weight `|c_N|^2 / sum |c_n|^2` below which a truncation counts as converged.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Hard cap on the ladder truncation for adaptive construction.
pub const MAX_TRUNCATION: usize = 4096;
