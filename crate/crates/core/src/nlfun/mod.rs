//! Nonlinear functions `f(N_a, N_b)` of the two number operators.
//!
//! Functions are closures over the occupation numbers; equality between two
//! functions is only ever checked pointwise. Domain violations surface at
//! evaluation time with the offending `(n_a, n_b)`.

mod expr;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Result, TmnlcsError};

pub use expr::parse_expression;

type EvalFn = dyn Fn(i64, i64) -> Result<Complex64> + Send + Sync;

/// An evaluable diagonal function `(n_a, n_b) -> C` with a human-readable label.
#[derive(Clone)]
pub struct NonlinearFunction {
    label: String,
    eval: Arc<EvalFn>,
}

impl NonlinearFunction {
    /// Wraps a closure that returns `None` where the function is undefined.
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(i64, i64) -> Option<Complex64> + Send + Sync + 'static,
    {
        let label = label.into();
        let err_label = label.clone();
        Self::composite(label, move |na, nb| {
            f(na, nb).ok_or_else(|| TmnlcsError::FunctionDomain {
                label: err_label.clone(),
                na,
                nb,
            })
        })
    }

    /// Real-valued convenience constructor.
    pub fn real<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(i64, i64) -> Option<f64> + Send + Sync + 'static,
    {
        Self::new(label, move |na, nb| f(na, nb).map(Complex64::from))
    }

    fn composite<F>(label: String, f: F) -> Self
    where
        F: Fn(i64, i64) -> Result<Complex64> + Send + Sync + 'static,
    {
        Self {
            label,
            eval: Arc::new(f),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Evaluates at the occupation pair. Negative occupations and non-finite
    /// values are domain errors.
    pub fn evaluate(&self, na: i64, nb: i64) -> Result<Complex64> {
        if na < 0 || nb < 0 {
            return Err(self.domain_error(na, nb));
        }
        let v = (self.eval)(na, nb)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(self.domain_error(na, nb));
        }
        Ok(v)
    }

    /// Zero-set guard: whether `f` vanishes at `(n_a, n_b)`.
    pub fn vanishes_at(&self, na: i64, nb: i64) -> Result<bool> {
        Ok(self.evaluate(na, nb)? == Complex64::new(0.0, 0.0))
    }

    fn domain_error(&self, na: i64, nb: i64) -> TmnlcsError {
        TmnlcsError::FunctionDomain {
            label: self.label.clone(),
            na,
            nb,
        }
    }
}

impl fmt::Debug for NonlinearFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearFunction")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Named functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Catalog {
    /// `f = 1`: pair coherent states.
    Unity,
    /// `f = 2 / (N_a + N_b + q + 2)`: Perelomov states in the full form.
    PerelomovFull { q: u32 },
    /// `f = 1 / (N_a + 1)`: Perelomov states restricted to `F_q`.
    PerelomovReduced,
    /// `f = (-1)^{N_b}`.
    ParityB,
    /// `f = (-1)^{N_b} / (N_a + 1)`.
    ParityPerelomov,
}

impl Catalog {
    pub const NAMES: [&'static str; 5] = [
        "unity",
        "perelomov_full",
        "perelomov_reduced",
        "parity_b",
        "parity_perelomov",
    ];

    /// Resolves a catalog name. `perelomov_full` takes the charge from `q`.
    pub fn from_name(name: &str, q: u32) -> Result<Self> {
        match name.trim() {
            "unity" => Ok(Self::Unity),
            "perelomov_full" => Ok(Self::PerelomovFull { q }),
            "perelomov_reduced" => Ok(Self::PerelomovReduced),
            "parity_b" => Ok(Self::ParityB),
            "parity_perelomov" => Ok(Self::ParityPerelomov),
            other => Err(TmnlcsError::UnknownName(other.to_owned())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Unity => "unity",
            Self::PerelomovFull { .. } => "perelomov_full",
            Self::PerelomovReduced => "perelomov_reduced",
            Self::ParityB => "parity_b",
            Self::ParityPerelomov => "parity_perelomov",
        }
    }

    pub fn function(self) -> NonlinearFunction {
        catalog(self)
    }
}

impl FromStr for Catalog {
    type Err = TmnlcsError;

    /// Accepts `perelomov_full(q)` in addition to the bare names.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(arg) = s
            .strip_prefix("perelomov_full(")
            .and_then(|r| r.strip_suffix(')'))
        {
            let arg = arg.trim();
            let q = arg
                .strip_prefix("q=")
                .unwrap_or(arg)
                .trim()
                .parse()
                .map_err(|_| TmnlcsError::UnknownName(s.to_owned()))?;
            return Ok(Self::PerelomovFull { q });
        }
        Self::from_name(s, 0)
    }
}

fn parity(nb: i64) -> f64 {
    if nb % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn catalog(entry: Catalog) -> NonlinearFunction {
    match entry {
        Catalog::Unity => NonlinearFunction::real("unity", |_, _| Some(1.0)),
        Catalog::PerelomovFull { q } => {
            NonlinearFunction::real(format!("perelomov_full(q={q})"), move |na, nb| {
                Some(2.0 / (na + nb + i64::from(q) + 2) as f64)
            })
        }
        Catalog::PerelomovReduced => {
            NonlinearFunction::real("perelomov_reduced", |na, _| Some(1.0 / (na + 1) as f64))
        }
        Catalog::ParityB => NonlinearFunction::real("parity_b", |_, nb| Some(parity(nb))),
        Catalog::ParityPerelomov => NonlinearFunction::real("parity_perelomov", |na, nb| {
            Some(parity(nb) / (na + 1) as f64)
        }),
    }
}

/// Resolves a catalog name, or failing that, parses an expression over `na`, `nb`.
/// Labels produced by this module for catalog entries and expressions parse back.
pub fn parse_function(text: &str, q: u32) -> Result<NonlinearFunction> {
    let text = text.trim();
    if let Some((head, args)) = split_call(text) {
        let int = |s: &str| {
            s.parse::<i64>()
                .map_err(|_| TmnlcsError::Parse(format!("bad integer `{s}` in `{text}`")))
        };
        let count = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| TmnlcsError::Parse(format!("bad count `{s}` in `{text}`")))
        };
        match (head, args.as_slice()) {
            ("expr", _) => {
                let inner = &text[5..text.len() - 1];
                return parse_expression(inner);
            }
            ("shifted", [f, da, db]) => {
                return Ok(shifted(&parse_function(f, q)?, int(da)?, int(db)?))
            }
            ("swapped", [f]) => return Ok(swapped(&parse_function(f, q)?)),
            ("product", [f, g]) => {
                return Ok(product(&parse_function(f, q)?, &parse_function(g, q)?))
            }
            ("photon_added", [f, m, n]) => {
                return Ok(photon_added_function(
                    &parse_function(f, q)?,
                    count(m)?,
                    count(n)?,
                ))
            }
            _ => {}
        }
    }
    match text.parse::<Catalog>() {
        Ok(Catalog::PerelomovFull { .. }) if text == "perelomov_full" => {
            Ok(catalog(Catalog::PerelomovFull { q }))
        }
        Ok(entry) => Ok(catalog(entry)),
        Err(_) => parse_expression(text),
    }
}

/// Splits `name(a, b, ...)` into the name and its top-level arguments.
fn split_call(text: &str) -> Option<(&str, Vec<&str>)> {
    let open = text.find('(')?;
    let head = &text[..open];
    if head.is_empty() || !head.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    let body = text[open + 1..].strip_suffix(')')?;
    let mut args = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, c) in body.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                args.push(body[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    args.push(body[start..].trim());
    Some((head, args))
}

/// `g(n_a, n_b) = f(n_a + da, n_b + db)`.
pub fn shifted(f: &NonlinearFunction, da: i64, db: i64) -> NonlinearFunction {
    if da == 0 && db == 0 {
        return f.clone();
    }
    let inner = f.clone();
    NonlinearFunction::composite(format!("shifted({},{da},{db})", f.label), move |na, nb| {
        inner.evaluate(na + da, nb + db)
    })
}

/// Pointwise product.
pub fn product(f: &NonlinearFunction, g: &NonlinearFunction) -> NonlinearFunction {
    let (f1, g1) = (f.clone(), g.clone());
    NonlinearFunction::composite(
        format!("product({},{})", f.label, g.label),
        move |na, nb| Ok(f1.evaluate(na, nb)? * g1.evaluate(na, nb)?),
    )
}

/// `g(n_a, n_b) = f(n_b, n_a)`, the same function after relabeling the modes.
pub fn swapped(f: &NonlinearFunction) -> NonlinearFunction {
    let inner = f.clone();
    NonlinearFunction::composite(format!("swapped({})", f.label), move |na, nb| {
        inner.evaluate(nb, na)
    })
}

/// `f(N_a - m, N_b - n) [1 - m/(N_a+1)] [1 - n/(N_b+1)]`.
///
/// Where the prefactor is exactly zero the composite is zero and `f` is not
/// evaluated; this is what keeps the function defined on `ab` applied to the
/// lowest rung of a photon-added state.
pub fn photon_added_function(f: &NonlinearFunction, m: u32, n: u32) -> NonlinearFunction {
    if m == 0 && n == 0 {
        return f.clone();
    }
    let inner = f.clone();
    let (m, n) = (i64::from(m), i64::from(n));
    NonlinearFunction::composite(
        format!("photon_added({},{m},{n})", f.label),
        move |na, nb| {
            let pre = (1.0 - m as f64 / (na + 1) as f64) * (1.0 - n as f64 / (nb + 1) as f64);
            if pre == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            Ok(inner.evaluate(na - m, nb - n)? * pre)
        },
    )
}

/// `h(N_a, N_b) = 1 / (f(N_a - 1, N_b - 1) N_a)`, the operator paired with
/// `f ab` so that `[f ab, h a†b†] = 1`. Scaled by `alpha` it is the generator
/// of the exponential form of the coherent state.
pub fn raising_partner(f: &NonlinearFunction, alpha: Complex64) -> NonlinearFunction {
    let inner = f.clone();
    let label = if alpha == Complex64::new(1.0, 0.0) {
        format!("1/({}*na)", shifted(f, -1, -1).label)
    } else {
        format!("({alpha})/({}*na)", shifted(f, -1, -1).label)
    };
    let err_label = label.clone();
    NonlinearFunction::composite(label, move |na, nb| {
        let d = inner.evaluate(na - 1, nb - 1)? * na as f64;
        if d == Complex64::new(0.0, 0.0) {
            return Err(TmnlcsError::FunctionDomain {
                label: err_label.clone(),
                na,
                nb,
            });
        }
        Ok(alpha / d)
    })
}

/// `f(N_a + m, N_b + n)`.
pub fn photon_subtracted_function(f: &NonlinearFunction, m: u32, n: u32) -> NonlinearFunction {
    shifted(f, i64::from(m), i64::from(n))
}
