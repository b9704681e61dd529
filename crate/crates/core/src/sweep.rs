//! Kerr-phase parameter sweeps: evolve a pair or Perelomov state by each
//! `gamma_t` and compare with the matching parity state. One CSV row per
//! grid point, ordered eigenvalue, then charge, then `gamma_t`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constructors::{build_by_recursion, StateKind, StateSpec, Truncation};
use crate::error::{Result, TmnlcsError};
use crate::io::fmt_f64;
use crate::transforms::{kerr_evolve, KerrParams};
use crate::verify::{fidelity, photon_statistics, PhotonStatistics};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    /// `pair` or `perelomov`.
    pub kind: String,
    #[serde(default)]
    pub eigenvalues: Vec<[f64; 2]>,
    #[serde(default)]
    pub charges: Vec<u32>,
    #[serde(default)]
    pub gamma_t: Vec<f64>,
}

#[derive(Debug)]
pub struct SweepRow {
    pub kind: String,
    pub eigenvalue: Complex64,
    pub charge_q: u32,
    pub gamma_t: f64,
    pub outcome: Result<(f64, PhotonStatistics)>,
}

pub const CSV_HEADER: [&str; 12] = [
    "kind",
    "eigenvalue_re",
    "eigenvalue_im",
    "q",
    "gamma_t",
    "fidelity_to_parity",
    "mean_na",
    "mean_nb",
    "var_nb",
    "mandel_q_b",
    "cross_corr",
    "error",
];

fn kinds(name: &str) -> Result<(StateKind, StateKind)> {
    match name {
        "pair" => Ok((StateKind::Pair, StateKind::ParityPair)),
        "perelomov" => Ok((StateKind::Perelomov, StateKind::ParityPerelomov)),
        other => Err(TmnlcsError::UnknownName(other.to_owned())),
    }
}

fn sweep_point(
    base: &StateKind,
    target: &StateKind,
    v: Complex64,
    q: u32,
    gamma_t: f64,
    truncation: &Truncation,
) -> Result<(f64, PhotonStatistics)> {
    let start =
        build_by_recursion(&StateSpec::new(base.clone(), v, q).with_truncation(*truncation))?;
    let parity =
        build_by_recursion(&StateSpec::new(target.clone(), v, q).with_truncation(*truncation))?;
    let (evolved, _) = kerr_evolve(&start, KerrParams::new(gamma_t)?);
    Ok((fidelity(&evolved, &parity)?, photon_statistics(&evolved)))
}

pub fn run_sweep(grid: &SweepGrid, truncation: &Truncation) -> Result<Vec<SweepRow>> {
    let (base, target) = kinds(&grid.kind)?;
    let mut rows = Vec::new();
    for &[re, im] in &grid.eigenvalues {
        let v = Complex64::new(re, im);
        for &q in &grid.charges {
            for &gt in &grid.gamma_t {
                rows.push(SweepRow {
                    kind: grid.kind.clone(),
                    eigenvalue: v,
                    charge_q: q,
                    gamma_t: gt,
                    outcome: sweep_point(&base, &target, v, q, gt, truncation),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        let mut rec = vec![
            row.kind.clone(),
            fmt_f64(row.eigenvalue.re),
            fmt_f64(row.eigenvalue.im),
            row.charge_q.to_string(),
            fmt_f64(row.gamma_t),
        ];
        match &row.outcome {
            Ok((fid, st)) => {
                rec.push(fmt_f64(*fid));
                rec.push(fmt_f64(st.mean_na));
                rec.push(fmt_f64(st.mean_nb));
                rec.push(fmt_f64(st.var_nb));
                rec.push(st.mandel_q_b.map(fmt_f64).unwrap_or_default());
                rec.push(fmt_f64(st.cross_corr));
                rec.push(String::new());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 6));
                rec.push(format!("{}: {e}", e.kind()));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
