//! Photon addition, photon subtraction and Kerr evolution.
//!
//! Each transform returns the normalized output state, the nonlinear function
//! the output is an eigenstate for (when there is one), and a provenance
//! record that is also appended to the state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TmnlcsError};
use crate::fock::{self, FockLadderState, Mode};
use crate::nlfun::{self, NonlinearFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operation {
    /// Built by a constructor; `route` names which one.
    Construct {
        route: String,
        kind: String,
    },
    PhotonAdd {
        m: u32,
        n: u32,
    },
    PhotonSubtract {
        m: u32,
        n: u32,
    },
    Kerr {
        gamma_t: f64,
    },
    /// Modes `a` and `b` were relabeled to keep the charge non-negative.
    ModeSwap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub operation: Operation,
    pub input_charge: i64,
    /// Photon-number difference produced by the operation, before any relabeling.
    pub output_charge: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub induced_function_label: Option<String>,
}

impl TransformRecord {
    pub(crate) fn construct(route: &str, kind: &str, q: u32, f: &NonlinearFunction) -> Self {
        Self {
            operation: Operation::Construct {
                route: route.to_owned(),
                kind: kind.to_owned(),
            },
            input_charge: i64::from(q),
            output_charge: i64::from(q),
            induced_function_label: Some(f.label().to_owned()),
        }
    }

    fn mode_swap(signed_charge: i64) -> Self {
        Self {
            operation: Operation::ModeSwap,
            input_charge: signed_charge,
            output_charge: -signed_charge,
            induced_function_label: None,
        }
    }
}

/// Accumulated Kerr phase `gamma * t`, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    gamma_t: f64,
}

impl KerrParams {
    pub fn new(gamma_t: f64) -> Result<Self> {
        if !gamma_t.is_finite() {
            return Err(TmnlcsError::InvalidParameter(format!(
                "gamma_t must be finite, got {gamma_t}"
            )));
        }
        Ok(Self { gamma_t })
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }
}

/// Output of a photon addition or subtraction.
#[derive(Debug, Clone)]
pub struct Transformed {
    pub state: FockLadderState,
    pub induced: NonlinearFunction,
    pub record: TransformRecord,
}

fn finish(
    shift: fock::ModeShift,
    input_charge: u32,
    operation: Operation,
    induced: NonlinearFunction,
) -> Result<Transformed> {
    let induced = if shift.swapped {
        nlfun::swapped(&induced)
    } else {
        induced
    };
    let mut state = fock::normalize(&shift.state)?;
    let record = TransformRecord {
        operation,
        input_charge: i64::from(input_charge),
        output_charge: shift.signed_charge,
        induced_function_label: Some(induced.label().to_owned()),
    };
    state.push_record(record.clone());
    if shift.swapped {
        state.push_record(TransformRecord::mode_swap(shift.signed_charge));
    }
    Ok(Transformed {
        state,
        induced,
        record,
    })
}

/// Normalized `a†^m b†^n |psi>` and the function it is a coherent state for,
/// `f(N_a-m, N_b-n)[1-m/(N_a+1)][1-n/(N_b+1)]` (mode-swapped if the charge
/// changed sign).
pub fn photon_add(
    state: &FockLadderState,
    f: &NonlinearFunction,
    m: u32,
    n: u32,
) -> Result<Transformed> {
    // a† first: the charge only grows, so a relabel can happen at most in the b† step
    let after_a = fock::raise_mode_canonical(state, Mode::A, m);
    let shift = fock::raise_mode_canonical(&after_a.state, Mode::B, n);
    finish(
        shift,
        state.charge_q(),
        Operation::PhotonAdd { m, n },
        nlfun::photon_added_function(f, m, n),
    )
}

/// Normalized `a^m b^n |psi>` and its function `f(N_a+m, N_b+n)`.
pub fn photon_subtract(
    state: &FockLadderState,
    f: &NonlinearFunction,
    m: u32,
    n: u32,
) -> Result<Transformed> {
    let after_b = fock::lower_mode_canonical(state, Mode::B, n);
    let shift = fock::lower_mode_canonical(&after_b.state, Mode::A, m);
    finish(
        shift,
        state.charge_q(),
        Operation::PhotonSubtract { m, n },
        nlfun::photon_subtracted_function(f, m, n),
    )
}

/// `exp(-i gamma_t N_b (N_b - 1))`: on `F_q`, `c_n -> exp(-i gamma_t n(n-1)) c_n`.
pub fn kerr_evolve(
    state: &FockLadderState,
    params: KerrParams,
) -> (FockLadderState, TransformRecord) {
    let gt = params.gamma_t;
    let amps: Vec<Complex64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let k = (n * n.saturating_sub(1)) as f64;
            c * Complex64::from_polar(1.0, -gt * k)
        })
        .collect();
    let q = state.charge_q();
    let record = TransformRecord {
        operation: Operation::Kerr { gamma_t: gt },
        input_charge: i64::from(q),
        output_charge: i64::from(q),
        induced_function_label: None,
    };
    let out = FockLadderState::assemble(q, amps, state.converged(), state.provenance().to_vec())
        .with_record(record.clone());
    (out, record)
}
