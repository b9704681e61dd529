//! Verification: eigen-residuals, fidelities, operator identities and photon
//! statistics, collected into ordered reports.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constructors::{
    build_by_exponential, build_by_recursion, build_parity_superposition, build_perelomov_closed,
    BaseKind, StateKind, StateSpec,
};
use crate::error::{Result, TmnlcsError};
use crate::fock::{self, FockLadderState};
use crate::io::fmt_f64;
use crate::nlfun::{self, catalog, Catalog, NonlinearFunction};

pub const EIGEN_TOLERANCE: f64 = 1e-10;
pub const FIDELITY_TOLERANCE: f64 = 1e-10;
pub const TAIL_MASS_TOLERANCE: f64 = 1e-12;
pub const NUMBER_DIFFERENCE_TOLERANCE: f64 = 1e-12;
pub const COMMUTATOR_TOLERANCE: f64 = 1e-12;
pub const PHASE_OPERATOR_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Check {
    /// Passes when `value < tolerance`.
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        if !value.is_finite() {
            return Self {
                name: name.into(),
                value: 1.0,
                tolerance,
                passed: false,
                error: Some(format!("non-finite value {value}")),
            };
        }
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
            error: None,
        }
    }

    /// A check that could not be evaluated.
    pub fn errored(name: impl Into<String>, err: &TmnlcsError) -> Self {
        Self {
            name: name.into(),
            value: 1.0,
            tolerance: 0.0,
            passed: false,
            error: Some(format!("{}: {err}", err.kind())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall_passed: bool,
}

impl Default for VerificationReport {
    fn default() -> Self {
        Self {
            checks: Vec::new(),
            overall_passed: true,
        }
    }
}

impl VerificationReport {
    pub fn push(&mut self, check: Check) {
        self.overall_passed &= check.passed;
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        checks.into_iter().for_each(|c| self.push(c));
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `||f ab |psi> - alpha |psi>|| / max(|alpha|, 1)`, over rungs below the
/// truncation edge (`ab` reads the rung above).
pub fn eigen_residual(
    state: &FockLadderState,
    f: &NonlinearFunction,
    alpha: Complex64,
) -> Result<f64> {
    let fab = fock::apply_diagonal(&fock::apply_lower_both(state), f)?;
    let n_top = state.truncation_n();
    let sq: f64 = fab.amplitudes()[..n_top]
        .iter()
        .zip(&state.amplitudes()[..n_top])
        .map(|(l, c)| (l - alpha * c).norm_sqr())
        .sum();
    Ok(sq.sqrt() / alpha.norm().max(1.0))
}

/// `|<s1|s2>| / (||s1|| ||s2||)`.
pub fn fidelity(s1: &FockLadderState, s2: &FockLadderState) -> Result<f64> {
    let ip = fock::inner_product(s1, s2)?;
    let denom = s1.norm() * s2.norm();
    if denom.is_nan() || denom <= crate::EPS_FLOOR {
        return Err(TmnlcsError::ZeroState);
    }
    Ok(ip.norm() / denom)
}

/// Compares `1/sqrt((1+N_a)(1+N_b)) ab` with `1/(1+N_a) ab` on charge-0 states.
pub fn check_phase_operator_equivalence(samples: &[FockLadderState]) -> Result<VerificationReport> {
    if let Some(bad) = samples.iter().find(|s| s.charge_q() != 0) {
        return Err(TmnlcsError::ChargeMismatch {
            left: 0,
            right: bad.charge_q(),
        });
    }
    let phase = NonlinearFunction::real("1/sqrt((1+na)(1+nb))", |na, nb| {
        Some(1.0 / (((1 + na) * (1 + nb)) as f64).sqrt())
    });
    let reduced = catalog(Catalog::PerelomovReduced);
    let mut report = VerificationReport::default();
    for (i, s) in samples.iter().enumerate() {
        let lowered = fock::apply_lower_both(s);
        let x = fock::apply_diagonal(&lowered, &phase)?;
        let y = fock::apply_diagonal(&lowered, &reduced)?;
        let diff: f64 = x
            .amplitudes()
            .iter()
            .zip(y.amplitudes())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        report.push(Check::below(
            format!("phase_operator/sample={i}"),
            diff.sqrt(),
            PHASE_OPERATOR_TOLERANCE,
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonStatistics {
    pub mean_na: f64,
    pub mean_nb: f64,
    pub var_na: f64,
    pub var_nb: f64,
    /// `(var_nb - mean_nb) / mean_nb`; `None` (omitted) when `mean_nb < 1e-12`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mandel_q_b: Option<f64>,
    pub cross_corr: f64,
}

/// Moments of `N_a`, `N_b` from the weights `|c_n|^2` (normalized internally).
pub fn photon_statistics(state: &FockLadderState) -> PhotonStatistics {
    let q = f64::from(state.charge_q());
    let total = state.norm_sqr();
    let weights: Vec<f64> = state
        .amplitudes()
        .iter()
        .map(|c| {
            if total > 0.0 {
                c.norm_sqr() / total
            } else {
                0.0
            }
        })
        .collect();
    let mean = |g: &dyn Fn(f64) -> f64| -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(n, p)| p * g(n as f64))
            .sum()
    };
    let mean_nb = mean(&|n| n);
    let mean_na = mean(&|n| n + q);
    let var_nb = mean(&|n| (n - mean_nb).powi(2));
    let var_na = mean(&|n| (n + q - mean_na).powi(2));
    let cross_corr = mean(&|n| (n + q - mean_na) * (n - mean_nb));
    let mandel_q_b = (mean_nb >= 1e-12).then(|| (var_nb - mean_nb) / mean_nb);
    PhotonStatistics {
        mean_na,
        mean_nb,
        var_na,
        var_nb,
        mandel_q_b,
        cross_corr,
    }
}

/// `|| [f ab, h a†b†] |n+q, n> - |n+q, n> ||` with `h = 1/(f(N_a-1, N_b-1) N_a)`.
pub fn commutator_residual(f: &NonlinearFunction, q: u32, n: usize) -> Result<f64> {
    let h = nlfun::raising_partner(f, Complex64::new(1.0, 0.0));
    let ket = FockLadderState::basis(q, n);
    let f_ab = |s: &FockLadderState| fock::apply_diagonal(&fock::apply_lower_both(s), f);
    let h_up = |s: &FockLadderState| fock::apply_diagonal(&fock::apply_raise_both(s), &h);
    let first = f_ab(&h_up(&ket)?)?;
    let second = h_up(&f_ab(&ket)?)?;
    let len = first.amplitudes().len().max(second.amplitudes().len());
    let (a, b, k) = (first.padded(len), second.padded(len), ket.padded(len));
    let sq: f64 = (0..len).map(|i| (a[i] - b[i] - k[i]).norm_sqr()).sum();
    Ok(sq.sqrt())
}

/// Maximum commutator residual over interior rungs `1 ..= truncation - 2`.
pub fn commutator_check(f: &NonlinearFunction, q: u32, truncation: usize) -> Check {
    let name = format!("commutator/{}/q={q}", f.label());
    let mut worst: f64 = 0.0;
    for n in 1..truncation.saturating_sub(1) {
        match commutator_residual(f, q, n) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return Check::errored(name, &e),
        }
    }
    Check::below(name, worst, COMMUTATOR_TOLERANCE)
}

/// The catalog functions relevant at charge `q`.
pub fn catalog_functions(q: u32) -> Vec<NonlinearFunction> {
    [
        Catalog::Unity,
        Catalog::PerelomovFull { q },
        Catalog::PerelomovReduced,
        Catalog::ParityB,
        Catalog::ParityPerelomov,
    ]
    .into_iter()
    .map(catalog)
    .collect()
}

fn point_id(spec: &StateSpec) -> String {
    let kind = match &spec.kind {
        StateKind::Custom(f) => format!("custom[{}]", f.label()),
        k => k.name().to_owned(),
    };
    format!(
        "{kind}/eigenvalue=({},{})/q={}",
        fmt_f64(spec.eigenvalue.re),
        fmt_f64(spec.eigenvalue.im),
        spec.charge_q
    )
}

/// Every per-state check for one spec: eigen-residual, recursion vs
/// exponential, tail mass, number difference, and the closed-form or
/// superposition route where one exists.
pub fn verify_spec(spec: &StateSpec) -> Vec<Check> {
    let id = point_id(spec);
    let mut checks = Vec::new();
    let state = match build_by_recursion(spec) {
        Ok(s) => s,
        Err(e) => return vec![Check::errored(format!("{id}/build"), &e)],
    };
    let f = spec.function();
    let alpha = spec.effective_eigenvalue();
    checks.push(match eigen_residual(&state, &f, alpha) {
        Ok(r) => Check::below(format!("{id}/eigen_residual"), r, EIGEN_TOLERANCE),
        Err(e) => Check::errored(format!("{id}/eigen_residual"), &e),
    });
    let fid_check = |name: &str, other: Result<FockLadderState>| {
        let name = format!("{id}/{name}");
        match other.and_then(|o| fidelity(&state, &o)) {
            Ok(fid) => Check::below(name, (1.0 - fid).abs(), FIDELITY_TOLERANCE),
            Err(e) => Check::errored(name, &e),
        }
    };
    checks.push(fid_check("dual_route", build_by_exponential(spec)));
    let t = &spec.truncation;
    match spec.kind {
        StateKind::Perelomov => checks.push(fid_check(
            "perelomov_closed",
            build_perelomov_closed(spec.eigenvalue, spec.charge_q, t),
        )),
        StateKind::ParityPair => checks.push(fid_check(
            "parity_superposition",
            build_parity_superposition(BaseKind::Pair, spec.eigenvalue, spec.charge_q, t),
        )),
        StateKind::ParityPerelomov => checks.push(fid_check(
            "parity_superposition",
            build_parity_superposition(BaseKind::Perelomov, spec.eigenvalue, spec.charge_q, t),
        )),
        StateKind::Pair | StateKind::Custom(_) => {}
    }
    checks.push(Check::below(
        format!("{id}/tail_mass"),
        state.tail_ratio(),
        TAIL_MASS_TOLERANCE,
    ));
    let stats = photon_statistics(&state);
    checks.push(Check::below(
        format!("{id}/number_difference"),
        (stats.mean_na - stats.mean_nb - f64::from(spec.charge_q)).abs(),
        NUMBER_DIFFERENCE_TOLERANCE,
    ));
    checks
}

/// A finite set of verification points.
#[derive(Debug, Clone, Default)]
pub struct SuiteGrid {
    pub points: Vec<StateSpec>,
    /// Charges at which the commutator identity is checked for every catalog function.
    pub commutator_charges: Vec<u32>,
    /// Ladder length used for the commutator check.
    pub commutator_truncation: usize,
    /// Charge-0 states for the phase-operator comparison.
    pub phase_operator_samples: Vec<FockLadderState>,
}

impl SuiteGrid {
    pub fn from_specs(points: Vec<StateSpec>) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    /// Every catalog kind over `|alpha| in {0.1, 0.5, 1, 2}`, `arg alpha in {0, pi/3}`,
    /// `q in {0, 1, 2, 5}`; commutators for `q in {0, 1, 2}`; phase operator on `F_0`.
    pub fn default_grid() -> Self {
        let mut points = Vec::new();
        let kinds = [
            StateKind::Pair,
            StateKind::Perelomov,
            StateKind::ParityPair,
            StateKind::ParityPerelomov,
        ];
        for kind in &kinds {
            for r in [0.1, 0.5, 1.0, 2.0] {
                for phi in [0.0, PI / 3.0] {
                    for q in [0u32, 1, 2, 5] {
                        points.push(StateSpec::new(
                            kind.clone(),
                            Complex64::from_polar(r, phi),
                            q,
                        ));
                    }
                }
            }
        }
        let mut samples: Vec<FockLadderState> =
            (0..8).map(|n| FockLadderState::basis(0, n)).collect();
        for (kind, v) in [
            (StateKind::Pair, Complex64::new(1.0, 0.0)),
            (StateKind::Perelomov, Complex64::new(0.5, 0.0)),
            (StateKind::ParityPair, Complex64::from_polar(1.5, 0.4)),
        ] {
            if let Ok(s) = build_by_recursion(&StateSpec::new(kind, v, 0)) {
                samples.push(s);
            }
        }
        Self {
            points,
            commutator_charges: vec![0, 1, 2],
            commutator_truncation: 24,
            phase_operator_samples: samples,
        }
    }
}

/// Runs every check in the grid; failures are recorded, never thrown.
pub fn run_suite(grid: &SuiteGrid) -> VerificationReport {
    let mut report = VerificationReport::default();
    for spec in &grid.points {
        report.extend(verify_spec(spec));
    }
    for &q in &grid.commutator_charges {
        for f in catalog_functions(q) {
            report.push(commutator_check(&f, q, grid.commutator_truncation));
        }
    }
    if !grid.phase_operator_samples.is_empty() {
        match check_phase_operator_equivalence(&grid.phase_operator_samples) {
            Ok(r) => report.extend(r.checks),
            Err(e) => report.push(Check::errored("phase_operator", &e)),
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlfun::parse_expression;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn residual_examples() {
        let s = build_by_recursion(&StateSpec::new(StateKind::Pair, c(1.2), 2)).unwrap();
        assert!(eigen_residual(&s, &catalog(Catalog::Unity), c(1.2)).unwrap() < 1e-10);
        for q in 0..4 {
            let g = FockLadderState::ground(q);
            for f in catalog_functions(q) {
                assert_eq!(eigen_residual(&g, &f, c(0.0)).unwrap(), 0.0);
            }
        }
        let s = build_by_recursion(&StateSpec::new(StateKind::Perelomov, c(0.8), 0)).unwrap();
        let tau = 0.8f64.tanh();
        assert!((tau - 0.664037).abs() < 1e-6);
        assert!(eigen_residual(&s, &catalog(Catalog::PerelomovReduced), c(tau)).unwrap() < 1e-10);
        // the wrong eigenvalue is detected
        assert!(eigen_residual(&s, &catalog(Catalog::PerelomovReduced), c(0.8)).unwrap() > 1e-3);
    }

    #[test]
    fn fidelity_examples() {
        let s = build_by_recursion(&StateSpec::new(StateKind::Pair, c(0.9), 1)).unwrap();
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        let g = FockLadderState::ground(3);
        let k = FockLadderState::basis(3, 1);
        assert_eq!(fidelity(&g, &k).unwrap(), 0.0);
        assert!(matches!(
            fidelity(&g, &FockLadderState::ground(1)),
            Err(TmnlcsError::ChargeMismatch { .. })
        ));
    }

    #[test]
    fn phase_operator_examples() {
        let k = FockLadderState::basis(0, 5);
        let r = check_phase_operator_equivalence(&[k]).unwrap();
        assert_eq!(r.checks[0].value, 0.0);
        let s = build_by_recursion(&StateSpec::new(StateKind::Pair, c(1.0), 0)).unwrap();
        let r = check_phase_operator_equivalence(&[s]).unwrap();
        assert!(r.checks[0].value < 1e-14);
        assert!(matches!(
            check_phase_operator_equivalence(&[FockLadderState::ground(1)]),
            Err(TmnlcsError::ChargeMismatch { left: 0, right: 1 })
        ));
    }

    #[test]
    fn statistics_of_ground() {
        let st = photon_statistics(&FockLadderState::ground(2));
        assert_eq!(st.mean_na, 2.0);
        assert_eq!(st.mean_nb, 0.0);
        assert_eq!(st.var_na, 0.0);
        assert_eq!(st.var_nb, 0.0);
        assert_eq!(st.mandel_q_b, None);
    }

    #[test]
    fn commutator_on_catalog() {
        for q in 0..3 {
            for f in catalog_functions(q) {
                let chk = commutator_check(&f, q, 24);
                assert!(chk.passed, "{chk:?}");
            }
        }
    }

    #[test]
    fn empty_grid() {
        let r = run_suite(&SuiteGrid::default());
        assert!(r.checks.is_empty());
        assert!(r.overall_passed);
    }

    #[test]
    fn zero_on_trajectory_is_recorded() {
        let f = parse_expression("2 - nb").unwrap();
        let grid = SuiteGrid::from_specs(vec![StateSpec::new(StateKind::Custom(f), c(0.3), 0)]);
        let r = run_suite(&grid);
        assert!(!r.overall_passed);
        assert_eq!(r.checks.len(), 1);
        assert!(r.checks[0]
            .error
            .as_deref()
            .unwrap()
            .starts_with("FunctionZeroError"));
    }

    #[test]
    fn overall_is_conjunction() {
        let mut r = VerificationReport::default();
        r.push(Check::below("a", 0.0, 1.0));
        assert!(r.overall_passed);
        r.push(Check::below("b", 2.0, 1.0));
        r.push(Check::below("c", 0.0, 1.0));
        assert!(!r.overall_passed);
        assert_eq!(r.failures().count(), 1);
        assert!(!Check::below("nan", f64::NAN, 1.0).passed);
    }
}
