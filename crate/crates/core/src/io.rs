//! File formats: state JSON, state-spec JSON, and the fixed float format
//! (17 significant digits, lowercase scientific) shared by JSON and CSV output.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constructors::{StateKind, StateSpec, Truncation, TruncationMode};
use crate::error::{Result, TmnlcsError};
use crate::fock::FockLadderState;
use crate::nlfun::parse_function;
use crate::transforms::TransformRecord;

pub const FORMAT_VERSION: u32 = 1;

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// JSON formatter that writes every float in the fixed scientific format.
/// serde_json turns NaN and infinities into `null` before they reach the
/// formatter, and none of our outputs has a legitimate null, so `null` is
/// refused.
#[derive(Debug, Default, Clone, Copy)]
pub struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("non-finite value {value} in output"),
            ));
        }
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_null<W: ?Sized + Write>(&mut self, _writer: &mut W) -> io::Result<()> {
        Err(io::Error::new(
            io::ErrorKind::InvalidData,
            "null (non-finite number?) in output",
        ))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`SciFormatter`], followed by a newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

fn one() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    #[serde(default = "one")]
    format_version: u32,
    charge_q: u32,
    truncation_n: usize,
    amplitudes: Vec<[f64; 2]>,
    converged: bool,
    #[serde(default)]
    provenance: Vec<TransformRecord>,
}

pub fn state_to_json(state: &FockLadderState) -> Result<String> {
    let file = StateFile {
        format_version: FORMAT_VERSION,
        charge_q: state.charge_q(),
        truncation_n: state.truncation_n(),
        amplitudes: state.amplitudes().iter().map(|c| [c.re, c.im]).collect(),
        converged: state.converged(),
        provenance: state.provenance().to_vec(),
    };
    to_json_string(&file)
}

pub fn state_from_json(text: &str) -> Result<FockLadderState> {
    let file: StateFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(TmnlcsError::Schema(format!(
            "unsupported format_version {}",
            file.format_version
        )));
    }
    if file.amplitudes.len() != file.truncation_n + 1 {
        return Err(TmnlcsError::Schema(format!(
            "truncation_n {} does not match {} amplitudes",
            file.truncation_n,
            file.amplitudes.len()
        )));
    }
    let amps = file
        .amplitudes
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    FockLadderState::from_parts(file.charge_q, amps, file.converged, file.provenance)
        .map_err(|e| TmnlcsError::Schema(e.to_string()))
}

pub fn read_state(path: &Path) -> Result<FockLadderState> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn write_state(path: &Path, state: &FockLadderState) -> Result<()> {
    fs::write(path, state_to_json(state)?)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationFile {
    /// `adaptive` (param = tail tolerance) or `fixed` (param = N).
    pub mode: String,
    pub param: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpecFile {
    pub kind: String,
    pub eigenvalue: [f64; 2],
    pub charge_q: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<TruncationFile>,
    /// Catalog name or expression; required when `kind` is `custom`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
}

impl StateSpecFile {
    pub fn into_spec(self) -> Result<StateSpec> {
        let kind = match (self.kind.as_str(), &self.function) {
            ("custom", Some(text)) => StateKind::Custom(parse_function(text, self.charge_q)?),
            ("custom", None) => {
                return Err(TmnlcsError::Schema(
                    "kind `custom` requires a `function` field".into(),
                ))
            }
            (name, None) => StateKind::from_name(name)?,
            (name, Some(_)) => {
                return Err(TmnlcsError::Schema(format!(
                    "`function` is only valid for kind `custom`, not `{name}`"
                )))
            }
        };
        let mut truncation = Truncation::adaptive();
        if let Some(t) = self.truncation {
            truncation.mode = parse_truncation(&t.mode, t.param)?;
        }
        let [re, im] = self.eigenvalue;
        Ok(StateSpec::new(kind, Complex64::new(re, im), self.charge_q).with_truncation(truncation))
    }
}

pub fn parse_truncation(mode: &str, param: f64) -> Result<TruncationMode> {
    match mode {
        "adaptive" => Ok(TruncationMode::Adaptive {
            tail_tolerance: param,
        }),
        "fixed" if param >= 0.0 && param.fract() == 0.0 && param < 1e9 => {
            Ok(TruncationMode::Fixed(param as usize))
        }
        "fixed" => Err(TmnlcsError::Schema(format!(
            "fixed truncation needs a non-negative integer, got {param}"
        ))),
        other => Err(TmnlcsError::Schema(format!(
            "unknown truncation mode `{other}`"
        ))),
    }
}

pub fn spec_from_json(text: &str) -> Result<StateSpec> {
    let file: StateSpecFile = serde_json::from_str(text)?;
    file.into_spec()
}

pub fn read_spec(path: &Path) -> Result<StateSpec> {
    spec_from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::build_by_recursion;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.25e-6), "-2.4999999999999999e-7");
        assert_eq!(fmt_f64(-0.125), "-1.2500000000000000e-1");
        assert_eq!(fmt_f64(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(to_json_string(&[f64::NAN]).is_err());
        assert!(to_json_string(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn state_round_trip_is_bit_exact() {
        let spec = StateSpec::new(StateKind::Pair, Complex64::new(0.7, 0.3), 2);
        let s = build_by_recursion(&spec).unwrap();
        let text = state_to_json(&s).unwrap();
        let back = state_from_json(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(state_to_json(&back).unwrap(), text);
        assert!(text.contains("\"format_version\":1"));
    }

    #[test]
    fn schema_errors() {
        let bad = r#"{"charge_q":0,"truncation_n":2,"amplitudes":[[1.0,0.0]],"converged":true}"#;
        assert!(matches!(state_from_json(bad), Err(TmnlcsError::Schema(_))));
        let extra =
            r#"{"charge_q":0,"truncation_n":0,"amplitudes":[[1.0,0.0]],"converged":true,"x":1}"#;
        assert!(matches!(state_from_json(extra), Err(TmnlcsError::Json(_))));
        let ver = r#"{"format_version":2,"charge_q":0,"truncation_n":0,"amplitudes":[[1.0,0.0]],"converged":true}"#;
        assert!(matches!(state_from_json(ver), Err(TmnlcsError::Schema(_))));
    }

    #[test]
    fn spec_file_parsing() {
        let s = spec_from_json(
            r#"{"kind":"perelomov","eigenvalue":[0.5,0.0],"charge_q":1,"truncation":{"mode":"fixed","param":40}}"#,
        )
        .unwrap();
        assert!(matches!(s.kind, StateKind::Perelomov));
        assert_eq!(s.truncation.mode, TruncationMode::Fixed(40));

        let s = spec_from_json(
            r#"{"kind":"custom","function":"powneg1(nb)/(na+1)","eigenvalue":[0.2,0.0],"charge_q":0}"#,
        )
        .unwrap();
        assert!(matches!(s.kind, StateKind::Custom(_)));

        assert!(
            spec_from_json(r#"{"kind":"custom","eigenvalue":[0.2,0.0],"charge_q":0}"#).is_err()
        );
        assert!(matches!(
            spec_from_json(r#"{"kind":"squeezed","eigenvalue":[0.2,0.0],"charge_q":0}"#),
            Err(TmnlcsError::UnknownName(_))
        ));
        assert!(spec_from_json(
            r#"{"kind":"pair","eigenvalue":[0.2,0.0],"charge_q":0,"truncation":{"mode":"fixed","param":2.5}}"#
        )
        .is_err());
    }
}
