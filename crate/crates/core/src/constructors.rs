//! Construction of two-mode nonlinear coherent states.
//!
//! Two independent routes build the eigenstate of `f(N_a, N_b) ab`:
//! the coefficient recursion `C_{n+1} = alpha C_n / (f(n+q, n) sqrt((n+1)(n+q+1)))`
//! and the exponential series `sum_k (g a†b†)^k / k! |q,0>` with
//! `g = alpha / (f(N_a-1, N_b-1) N_a)`. Closed forms cover the Perelomov
//! states and the parity superpositions.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{Result, TmnlcsError};
use crate::fock::{self, FockLadderState};
use crate::nlfun::{self, catalog, Catalog, NonlinearFunction};
use crate::transforms::TransformRecord;
use crate::{MAX_TRUNCATION, TAIL_TOLERANCE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative weight below which the next exponential-series term is dropped.
const SERIES_TERM_TOLERANCE: f64 = 1e-16;

/// Running squared norm above which partial amplitudes are rescaled.
const RESCALE_ABOVE: f64 = 1e200;

#[derive(Debug, Clone)]
pub enum StateKind {
    Custom(NonlinearFunction),
    Pair,
    /// Two-mode Perelomov state; the spec eigenvalue holds `xi`.
    Perelomov,
    ParityPair,
    /// Parity Perelomov state; the spec eigenvalue holds `xi`.
    ParityPerelomov,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Custom(_) => "custom",
            Self::Pair => "pair",
            Self::Perelomov => "perelomov",
            Self::ParityPair => "parity_pair",
            Self::ParityPerelomov => "parity_perelomov",
        }
    }

    /// The nonlinear function the built state is an eigenstate for.
    pub fn function(&self) -> NonlinearFunction {
        match self {
            Self::Custom(f) => f.clone(),
            Self::Pair => catalog(Catalog::Unity),
            Self::Perelomov => catalog(Catalog::PerelomovReduced),
            Self::ParityPair => catalog(Catalog::ParityB),
            Self::ParityPerelomov => catalog(Catalog::ParityPerelomov),
        }
    }

    pub fn is_perelomov(&self) -> bool {
        matches!(self, Self::Perelomov | Self::ParityPerelomov)
    }

    /// Looks up a named kind; `custom` needs a function and is not accepted here.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "pair" => Ok(Self::Pair),
            "perelomov" => Ok(Self::Perelomov),
            "parity_pair" => Ok(Self::ParityPair),
            "parity_perelomov" => Ok(Self::ParityPerelomov),
            other => Err(TmnlcsError::UnknownName(other.to_owned())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationMode {
    /// Grow until the last two rungs each carry less than `tail_tolerance`
    /// of the squared norm.
    Adaptive { tail_tolerance: f64 },
    /// Exactly `N + 1` rungs.
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub mode: TruncationMode,
    /// Hard cap on the ladder index for adaptive growth.
    pub max_n: usize,
    /// Return an unconverged state instead of a `Convergence` error.
    pub allow_unconverged: bool,
}

impl Truncation {
    pub fn adaptive() -> Self {
        Self {
            mode: TruncationMode::Adaptive {
                tail_tolerance: TAIL_TOLERANCE,
            },
            max_n: MAX_TRUNCATION,
            allow_unconverged: false,
        }
    }

    pub fn fixed(n: usize) -> Self {
        Self {
            mode: TruncationMode::Fixed(n),
            ..Self::adaptive()
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::adaptive()
    }
}

#[derive(Debug, Clone)]
pub struct StateSpec {
    pub kind: StateKind,
    /// `alpha`, or `zeta` for pair kinds, or `xi` for Perelomov kinds.
    pub eigenvalue: Complex64,
    pub charge_q: u32,
    pub truncation: Truncation,
}

impl StateSpec {
    pub fn new(kind: StateKind, eigenvalue: Complex64, charge_q: u32) -> Self {
        Self {
            kind,
            eigenvalue,
            charge_q,
            truncation: Truncation::default(),
        }
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// The eigenvalue of `f ab`: `tau(xi)` for Perelomov kinds, else the spec value.
    pub fn effective_eigenvalue(&self) -> Complex64 {
        if self.kind.is_perelomov() {
            perelomov_tau(self.eigenvalue)
        } else {
            self.eigenvalue
        }
    }

    pub fn function(&self) -> NonlinearFunction {
        self.kind.function()
    }

    fn validate(&self) -> Result<()> {
        if !(self.eigenvalue.re.is_finite() && self.eigenvalue.im.is_finite()) {
            return Err(TmnlcsError::InvalidParameter(format!(
                "eigenvalue must be finite, got {}",
                self.eigenvalue
            )));
        }
        if let TruncationMode::Adaptive { tail_tolerance } = self.truncation.mode {
            if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
                return Err(TmnlcsError::InvalidParameter(format!(
                    "tail tolerance must lie in (0, 1), got {tail_tolerance}"
                )));
            }
        }
        Ok(())
    }
}

/// `tau = xi tanh|xi| / |xi|`, with `tau(0) = 0`.
pub fn perelomov_tau(xi: Complex64) -> Complex64 {
    let r = xi.norm();
    if r == 0.0 {
        return ZERO;
    }
    xi * (r.tanh() / r)
}

/// Grows `c_0 = 1, c_{n+1} = c_n * ratio(n)` under the truncation policy.
/// Returns the unnormalized amplitudes and whether the tail criterion held.
/// A fixed-length ladder counts as converged when its top two rungs carry
/// less than the global tail tolerance.
fn fixed_tail_converged(amps: &[Complex64]) -> bool {
    let total: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
    if total <= 0.0 || amps.len() < 2 {
        return total > 0.0;
    }
    amps[amps.len() - 2..]
        .iter()
        .all(|c| c.norm_sqr() / total < TAIL_TOLERANCE)
}

fn grow_ladder(
    truncation: &Truncation,
    mut ratio: impl FnMut(usize) -> Result<Complex64>,
) -> Result<(Vec<Complex64>, bool)> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    let mut norm_sqr = 1.0;
    loop {
        let n = amps.len() - 1;
        match truncation.mode {
            TruncationMode::Fixed(target) => {
                if n >= target {
                    let ok = fixed_tail_converged(&amps);
                    return Ok((amps, ok));
                }
            }
            TruncationMode::Adaptive { tail_tolerance } => {
                let last = amps[n];
                if n >= 1 && last == ZERO {
                    // series terminated exactly
                    return Ok((amps, true));
                }
                if n >= 2 {
                    let prev = amps[n - 1];
                    let small = |c: Complex64| c.norm_sqr() / norm_sqr < tail_tolerance;
                    if small(last) && small(prev) && last.norm() <= prev.norm() {
                        return Ok((amps, true));
                    }
                }
                if n >= truncation.max_n {
                    if truncation.allow_unconverged {
                        return Ok((amps, false));
                    }
                    return Err(TmnlcsError::Convergence {
                        max_n: truncation.max_n,
                        tail: last.norm_sqr() / norm_sqr,
                    });
                }
            }
        }
        let next = if amps[n] == ZERO {
            ZERO
        } else {
            amps[n] * ratio(n)?
        };
        if !(next.re.is_finite() && next.im.is_finite()) {
            return Err(TmnlcsError::InvalidParameter(format!(
                "amplitude overflow at rung {}",
                n + 1
            )));
        }
        amps.push(next);
        norm_sqr += next.norm_sqr();
        if norm_sqr > RESCALE_ABOVE {
            let s = norm_sqr.sqrt().recip();
            amps.iter_mut().for_each(|c| *c *= s);
            norm_sqr = amps.iter().map(|c| c.norm_sqr()).sum();
        }
    }
}

fn finalize(
    q: u32,
    amps: Vec<Complex64>,
    converged: bool,
    record: TransformRecord,
) -> Result<FockLadderState> {
    let raw = FockLadderState::assemble(q, amps, true, Vec::new());
    let mut state = fock::normalize(&raw)?;
    state.set_converged(converged);
    state.push_record(record);
    Ok(state)
}

/// Builds the state from the coefficient recursion.
pub fn build_by_recursion(spec: &StateSpec) -> Result<FockLadderState> {
    spec.validate()?;
    let f = spec.function();
    let alpha = spec.effective_eigenvalue();
    let q = spec.charge_q;
    let (amps, converged) = grow_ladder(&spec.truncation, |n| {
        if alpha == ZERO {
            return Ok(ZERO);
        }
        let fv = f.evaluate((n as u64 + u64::from(q)) as i64, n as i64)?;
        if fv == ZERO {
            return Err(TmnlcsError::FunctionZero {
                label: f.label().to_owned(),
                rung: n,
            });
        }
        let w = ((n as f64 + 1.0) * (n as f64 + f64::from(q) + 1.0)).sqrt();
        Ok(alpha / (fv * w))
    })?;
    finalize(
        q,
        amps,
        converged,
        TransformRecord::construct("recursion", spec.kind.name(), q, &f),
    )
}

/// Builds the state by summing `sum_k (g a†b†)^k / k! |q,0>` term by term
/// with the ladder actions.
pub fn build_by_exponential(spec: &StateSpec) -> Result<FockLadderState> {
    spec.validate()?;
    let f = spec.function();
    let alpha = spec.effective_eigenvalue();
    let q = spec.charge_q;
    let trunc = &spec.truncation;
    let g = nlfun::raising_partner(&f, alpha);

    let mut term = FockLadderState::ground(q);
    let mut sum: Vec<Complex64> = term.amplitudes().to_vec();
    let mut converged = true;
    let mut k = 0usize;
    loop {
        if let TruncationMode::Fixed(target) = trunc.mode {
            if k >= target {
                break;
            }
        } else if alpha == ZERO {
            break;
        } else if k >= trunc.max_n {
            let tail = sum.last().map_or(0.0, |c| c.norm_sqr())
                / sum.iter().map(|c| c.norm_sqr()).sum::<f64>();
            if !trunc.allow_unconverged {
                return Err(TmnlcsError::Convergence {
                    max_n: trunc.max_n,
                    tail,
                });
            }
            converged = false;
            break;
        }
        let (na, nb) = term.occupations(k);
        if alpha != ZERO && f.vanishes_at(na, nb)? {
            return Err(TmnlcsError::FunctionZero {
                label: f.label().to_owned(),
                rung: k,
            });
        }
        let prev_weight = term.norm_sqr();
        let raised = fock::apply_diagonal(&fock::apply_raise_both(&term), &g)?;
        let scale = 1.0 / (k as f64 + 1.0);
        let amps: Vec<Complex64> = raised.amplitudes().iter().map(|c| c * scale).collect();
        term = FockLadderState::assemble(q, amps, true, Vec::new());
        k += 1;

        let len = term.amplitudes().len();
        sum.resize(len.max(sum.len()), ZERO);
        for (s, c) in sum.iter_mut().zip(term.amplitudes()) {
            *s += c;
        }
        let total: f64 = sum.iter().map(|c| c.norm_sqr()).sum();
        let weight = term.norm_sqr();
        if total > RESCALE_ABOVE {
            let s = total.sqrt().recip();
            sum.iter_mut().for_each(|c| *c *= s);
            let amps = term.amplitudes().iter().map(|c| c * s).collect();
            term = FockLadderState::assemble(q, amps, true, Vec::new());
        }
        if let TruncationMode::Adaptive { .. } = trunc.mode {
            if weight == 0.0 || (weight / total < SERIES_TERM_TOLERANCE && weight <= prev_weight) {
                break;
            }
        }
    }
    if let TruncationMode::Fixed(target) = trunc.mode {
        sum.resize(target + 1, ZERO);
        converged = fixed_tail_converged(&sum);
    }
    finalize(
        q,
        sum,
        converged,
        TransformRecord::construct("exponential", spec.kind.name(), q, &f),
    )
}

/// `|xi, q> ∝ exp(tau a†b†)|q,0>`: `c_n ∝ tau^n sqrt((n+q)! / (n! q!))`.
pub fn build_perelomov_closed(
    xi: Complex64,
    q: u32,
    truncation: &Truncation,
) -> Result<FockLadderState> {
    let spec = StateSpec::new(StateKind::Perelomov, xi, q).with_truncation(*truncation);
    spec.validate()?;
    let tau = perelomov_tau(xi);
    if tau.norm() >= 1.0 {
        return Err(TmnlcsError::Convergence {
            max_n: 0,
            tail: tau.norm(),
        });
    }
    let (amps, converged) = grow_ladder(truncation, |n| {
        Ok(tau * ((n as f64 + f64::from(q) + 1.0) / (n as f64 + 1.0)).sqrt())
    })?;
    finalize(
        q,
        amps,
        converged,
        TransformRecord::construct(
            "perelomov_closed",
            "perelomov",
            q,
            &catalog(Catalog::PerelomovReduced),
        ),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseKind {
    Pair,
    Perelomov,
}

/// `(e^{-i pi/4} |i v, q> + e^{i pi/4} |-i v, q>) / sqrt(2)`, renormalized,
/// where `|v, q>` is a pair state (`v = zeta`) or Perelomov state (`v = xi`).
pub fn build_parity_superposition(
    base: BaseKind,
    eigenvalue: Complex64,
    q: u32,
    truncation: &Truncation,
) -> Result<FockLadderState> {
    let i = Complex64::i();
    let make = |v: Complex64| match base {
        BaseKind::Pair => {
            build_by_recursion(&StateSpec::new(StateKind::Pair, v, q).with_truncation(*truncation))
        }
        BaseKind::Perelomov => build_perelomov_closed(v, q, truncation),
    };
    let plus = make(i * eigenvalue)?;
    let minus = make(-i * eigenvalue)?;
    let w = std::f64::consts::FRAC_1_SQRT_2;
    let sum = fock::superpose(&[
        (Complex64::from_polar(w, -FRAC_PI_4), &plus),
        (Complex64::from_polar(w, FRAC_PI_4), &minus),
    ])?;
    let (kind, f) = match base {
        BaseKind::Pair => ("parity_pair", catalog(Catalog::ParityB)),
        BaseKind::Perelomov => ("parity_perelomov", catalog(Catalog::ParityPerelomov)),
    };
    let converged = sum.converged();
    finalize(
        q,
        sum.amplitudes().to_vec(),
        converged,
        TransformRecord::construct("parity_superposition", kind, q, &f),
    )
}

/// The default route: the coefficient recursion.
pub fn build(spec: &StateSpec) -> Result<FockLadderState> {
    build_by_recursion(spec)
}
