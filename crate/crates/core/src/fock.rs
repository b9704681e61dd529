//! States on the charge-`q` ladder `F_q = span{|n+q, n>}` and the ladder
//! operator actions on them.
//!
//! Index `n` of the amplitude vector multiplies the ket `|n+q, n>`; the
//! occupations are never stored. Every action returns a new state and none
//! of them renormalizes.

use num_complex::Complex64;

use crate::error::{Result, TmnlcsError};
use crate::nlfun::NonlinearFunction;
use crate::transforms::TransformRecord;
use crate::{EPS_FLOOR, TAIL_TOLERANCE};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct FockLadderState {
    charge_q: u32,
    amplitudes: Vec<Complex64>,
    converged: bool,
    provenance: Vec<TransformRecord>,
}

impl FockLadderState {
    /// Builds a state from raw amplitudes; `converged` is set from the tail criterion.
    pub fn new(charge_q: u32, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(TmnlcsError::InvalidParameter(
                "a ladder state needs at least one amplitude".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(TmnlcsError::InvalidParameter(
                "amplitudes must be finite".into(),
            ));
        }
        Ok(Self::assemble(charge_q, amplitudes, true, Vec::new()))
    }

    /// Builds a state with an explicit convergence flag and provenance, as
    /// read back from a state file.
    pub fn from_parts(
        charge_q: u32,
        amplitudes: Vec<Complex64>,
        converged: bool,
        provenance: Vec<TransformRecord>,
    ) -> Result<Self> {
        let mut s = Self::new(charge_q, amplitudes)?;
        s.converged = converged;
        s.provenance = provenance;
        Ok(s)
    }

    /// The basis ket `|index+q, index>`, with one empty rung above it so the
    /// exact finite state counts as converged.
    pub fn basis(charge_q: u32, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; index + 2];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::assemble(charge_q, amplitudes, true, Vec::new())
    }

    /// `|q, 0>`.
    pub fn ground(charge_q: u32) -> Self {
        Self::basis(charge_q, 0)
    }

    /// `converged_in` is ANDed with the tail criterion of the new amplitudes.
    pub(crate) fn assemble(
        charge_q: u32,
        amplitudes: Vec<Complex64>,
        converged_in: bool,
        provenance: Vec<TransformRecord>,
    ) -> Self {
        let mut s = Self {
            charge_q,
            amplitudes,
            converged: false,
            provenance,
        };
        s.converged = converged_in && s.tail_ratio() < TAIL_TOLERANCE;
        s
    }

    fn derived(&self, charge_q: u32, amplitudes: Vec<Complex64>) -> Self {
        Self::assemble(
            charge_q,
            amplitudes,
            self.converged,
            self.provenance.clone(),
        )
    }

    /// Records the constructor's verdict, which used its own tail tolerance.
    pub(crate) fn set_converged(&mut self, converged: bool) {
        self.converged = converged;
    }

    pub(crate) fn push_record(&mut self, record: TransformRecord) {
        self.provenance.push(record);
    }

    pub fn with_record(mut self, record: TransformRecord) -> Self {
        self.provenance.push(record);
        self
    }

    pub fn charge_q(&self) -> u32 {
        self.charge_q
    }

    pub fn truncation_n(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn provenance(&self) -> &[TransformRecord] {
        &self.provenance
    }

    /// `(n_a, n_b)` of the ket at ladder index `n`.
    pub fn occupations(&self, n: usize) -> (i64, i64) {
        (n as i64 + i64::from(self.charge_q), n as i64)
    }

    /// Euclidean norm, computed with scaling so tiny amplitudes do not underflow.
    pub fn norm(&self) -> f64 {
        let scale = self.amplitudes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let s: f64 = self.amplitudes.iter().map(|c| (c / scale).norm_sqr()).sum();
        scale * s.sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `|c_N|^2 / max(sum |c_n|^2, EPS_FLOOR)`.
    pub fn tail_ratio(&self) -> f64 {
        let norm = self.norm();
        if norm <= EPS_FLOOR {
            return 0.0;
        }
        let top = self.amplitudes[self.amplitudes.len() - 1].norm() / norm;
        top * top
    }

    /// Amplitudes zero-padded (or cut) to `len` entries.
    pub(crate) fn padded(&self, len: usize) -> Vec<Complex64> {
        let mut v = self.amplitudes.clone();
        v.resize(len, ZERO);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    A,
    B,
}

/// The ladder operator actions, with their effect on the charge.
#[derive(Debug, Clone)]
pub enum LadderAction {
    LowerBoth,
    RaiseBoth,
    RaiseA,
    RaiseB,
    LowerA,
    LowerB,
    NumberA,
    NumberB,
    Diagonal(NonlinearFunction),
    ParityB,
}

impl LadderAction {
    pub fn charge_shift(&self) -> i64 {
        match self {
            Self::RaiseA | Self::LowerB => 1,
            Self::LowerA | Self::RaiseB => -1,
            _ => 0,
        }
    }

    pub fn apply(&self, state: &FockLadderState) -> Result<FockLadderState> {
        match self {
            Self::LowerBoth => Ok(apply_lower_both(state)),
            Self::RaiseBoth => Ok(apply_raise_both(state)),
            Self::RaiseA => apply_raise_mode(state, Mode::A, 1),
            Self::RaiseB => apply_raise_mode(state, Mode::B, 1),
            Self::LowerA => apply_lower_mode(state, Mode::A, 1),
            Self::LowerB => apply_lower_mode(state, Mode::B, 1),
            Self::NumberA => Ok(apply_real_diagonal(state, |na, _| na as f64)),
            Self::NumberB => Ok(apply_real_diagonal(state, |_, nb| nb as f64)),
            Self::Diagonal(f) => apply_diagonal(state, f),
            Self::ParityB => Ok(apply_real_diagonal(state, |_, nb| {
                if nb % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            })),
        }
    }
}

/// `ab`: `out[n] = sqrt((n+1)(n+q+1)) c_{n+1}`; the top rung becomes zero.
pub fn apply_lower_both(state: &FockLadderState) -> FockLadderState {
    let q = f64::from(state.charge_q);
    let amps = &state.amplitudes;
    let out = (0..amps.len())
        .map(|n| match amps.get(n + 1) {
            Some(c) => c * ((n as f64 + 1.0) * (n as f64 + q + 1.0)).sqrt(),
            None => ZERO,
        })
        .collect();
    state.derived(state.charge_q, out)
}

/// `a†b†`: `out[n+1] = sqrt((n+1)(n+q+1)) c_n`; truncation grows by one.
pub fn apply_raise_both(state: &FockLadderState) -> FockLadderState {
    let q = f64::from(state.charge_q);
    let mut out = Vec::with_capacity(state.amplitudes.len() + 1);
    out.push(ZERO);
    out.extend(
        state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| c * ((n as f64 + 1.0) * (n as f64 + q + 1.0)).sqrt()),
    );
    state.derived(state.charge_q, out)
}

/// Multiplies `c_n` by `f(n+q, n)`. `f` is only evaluated where `c_n != 0`,
/// so the action is defined whenever `f` is defined on the state's support.
pub fn apply_diagonal(state: &FockLadderState, f: &NonlinearFunction) -> Result<FockLadderState> {
    let out = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            if c == ZERO {
                return Ok(ZERO);
            }
            let (na, nb) = state.occupations(n);
            Ok(c * f.evaluate(na, nb)?)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(state.derived(state.charge_q, out))
}

fn apply_real_diagonal(state: &FockLadderState, f: impl Fn(i64, i64) -> f64) -> FockLadderState {
    let out = state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, c)| {
            let (na, nb) = state.occupations(n);
            c * f(na, nb)
        })
        .collect();
    state.derived(state.charge_q, out)
}

/// Outcome of a single-mode power that may leave the `q >= 0` convention.
#[derive(Debug, Clone)]
pub struct ModeShift {
    /// The state on the canonical ladder (modes swapped when `swapped`).
    pub state: FockLadderState,
    /// `N_a - N_b` before canonicalization.
    pub signed_charge: i64,
    pub swapped: bool,
}

/// Moves every component `|na, nb>` to `|na+da, nb+db>` with weight `w(na, nb)`.
/// When the new difference is negative the modes are relabeled.
fn shift_components(
    state: &FockLadderState,
    da: i64,
    db: i64,
    weight: impl Fn(i64, i64) -> f64,
) -> ModeShift {
    let q = i64::from(state.charge_q);
    let signed_charge = q + da - db;
    let swapped = signed_charge < 0;
    let top = state.truncation_n() as i64 + if swapped { q + da } else { db };
    let mut out = vec![ZERO; top.max(0) as usize + 1];
    for (k, &c) in state.amplitudes.iter().enumerate() {
        let (na, nb) = state.occupations(k);
        let (na2, nb2) = (na + da, nb + db);
        if na2 < 0 || nb2 < 0 || c == ZERO {
            continue;
        }
        let w = weight(na, nb);
        let idx = if swapped { na2 } else { nb2 } as usize;
        out[idx] = c * w;
    }
    let charge = u32::try_from(signed_charge.unsigned_abs()).expect("charge fits in u32");
    ModeShift {
        state: state.derived(charge, out),
        signed_charge,
        swapped,
    }
}

/// `sqrt((x+1)(x+2)...(x+m))`
fn raise_weight(x: i64, m: u32) -> f64 {
    (1..=i64::from(m))
        .map(|j| ((x + j) as f64).sqrt())
        .product()
}

/// `sqrt(x(x-1)...(x-m+1))`, zero when `x < m`.
fn lower_weight(x: i64, m: u32) -> f64 {
    if x < i64::from(m) {
        return 0.0;
    }
    (0..i64::from(m)).map(|j| ((x - j) as f64).sqrt()).product()
}

/// `a†^m` or `b†^m`, relabeling the modes if the charge would go negative.
pub fn raise_mode_canonical(state: &FockLadderState, mode: Mode, count: u32) -> ModeShift {
    let m = i64::from(count);
    match mode {
        Mode::A => shift_components(state, m, 0, |na, _| raise_weight(na, count)),
        Mode::B => shift_components(state, 0, m, |_, nb| raise_weight(nb, count)),
    }
}

/// `a^m` or `b^m`, relabeling the modes if the charge would go negative.
pub fn lower_mode_canonical(state: &FockLadderState, mode: Mode, count: u32) -> ModeShift {
    let m = i64::from(count);
    match mode {
        Mode::A => shift_components(state, -m, 0, |na, _| lower_weight(na, count)),
        Mode::B => shift_components(state, 0, -m, |_, nb| lower_weight(nb, count)),
    }
}

fn reject_swap(shift: ModeShift) -> Result<FockLadderState> {
    if shift.swapped {
        Err(TmnlcsError::ChargeNegative {
            charge: shift.signed_charge,
        })
    } else {
        Ok(shift.state)
    }
}

/// `a†^m` or `b†^m`. Errors with `ChargeNegative` when the result would need
/// the modes relabeled; see [`raise_mode_canonical`] for the relabeling form.
pub fn apply_raise_mode(
    state: &FockLadderState,
    mode: Mode,
    count: u32,
) -> Result<FockLadderState> {
    reject_swap(raise_mode_canonical(state, mode, count))
}

/// `a^m` or `b^m`; components with too few photons are annihilated.
pub fn apply_lower_mode(
    state: &FockLadderState,
    mode: Mode,
    count: u32,
) -> Result<FockLadderState> {
    reject_swap(lower_mode_canonical(state, mode, count))
}

/// `<s1|s2>`; the shorter vector is zero-padded.
pub fn inner_product(s1: &FockLadderState, s2: &FockLadderState) -> Result<Complex64> {
    if s1.charge_q != s2.charge_q {
        return Err(TmnlcsError::ChargeMismatch {
            left: s1.charge_q,
            right: s2.charge_q,
        });
    }
    Ok(s1
        .amplitudes
        .iter()
        .zip(&s2.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Scales to unit norm and rotates the lowest nonzero amplitude onto the
/// positive real axis.
pub fn normalize(state: &FockLadderState) -> Result<FockLadderState> {
    let norm = state.norm();
    if norm.is_nan() || norm <= EPS_FLOOR {
        return Err(TmnlcsError::ZeroState);
    }
    let lead = state
        .amplitudes
        .iter()
        .position(|c| c.norm() > EPS_FLOOR)
        .ok_or(TmnlcsError::ZeroState)?;
    let c = state.amplitudes[lead];
    let rot = c.conj() / c.norm() / norm;
    let mut out: Vec<Complex64> = state.amplitudes.iter().map(|a| a * rot).collect();
    out[lead] = Complex64::new(c.norm() / norm, 0.0);
    let mut s = state.clone();
    s.amplitudes = out;
    Ok(s)
}

/// `sum_k w_k |s_k>` for states of equal charge, over the longest truncation.
pub fn superpose(terms: &[(Complex64, &FockLadderState)]) -> Result<FockLadderState> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| TmnlcsError::InvalidParameter("empty superposition".into()))?;
    let q = first.charge_q;
    let len = terms
        .iter()
        .map(|(_, s)| s.amplitudes.len())
        .max()
        .unwrap_or(1);
    let mut out = vec![ZERO; len];
    let mut converged = true;
    for (w, s) in terms {
        if s.charge_q != q {
            return Err(TmnlcsError::ChargeMismatch {
                left: q,
                right: s.charge_q,
            });
        }
        converged &= s.converged;
        for (o, c) in out.iter_mut().zip(s.padded(len)) {
            *o += w * c;
        }
    }
    Ok(FockLadderState::assemble(q, out, converged, Vec::new()))
}
