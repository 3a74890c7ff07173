//! Document types for the CLI and their JSON/CSV encodings.
//!
//! Exact values are always serialized as canonical rational strings
//! (`"-1/12"`, `"3"`); floats ride alongside for convenience only.

use hq_core::{parse, parse_rational, BigRational, ErrorReport, HermiteRule, KernelSet};
use serde::{Deserialize, Serialize};

use crate::Error;

/// An interval endpoint as given on the command line.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint {
    Exact(BigRational),
    /// A constant expression such as `pi` or `pi/2`; float path only.
    Float(f64),
}

impl Endpoint {
    /// Rationals (`"p/q"`, integers, decimals) stay exact; anything else must
    /// be a constant expression.
    pub fn parse(text: &str) -> Result<Self, Error> {
        if let Ok(r) = parse_rational(text) {
            return Ok(Self::Exact(r));
        }
        let expr = parse(text).map_err(|e| Error::Usage(format!("endpoint `{text}`: {e}")))?;
        if !expr.is_constant() {
            return Err(Error::Usage(format!("endpoint `{text}` must not depend on x")));
        }
        let v = expr
            .eval(0.0)
            .map_err(|e| Error::Usage(format!("endpoint `{text}`: {e}")))?;
        if !v.is_finite() {
            return Err(Error::Usage(format!("endpoint `{text}` is not finite")));
        }
        Ok(Self::Float(v))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Exact(r) => hq_core::exactmath::to_f64(r),
            Self::Float(v) => *v,
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            Self::Exact(r) => Some(r),
            Self::Float(_) => None,
        }
    }
}

pub fn rational_string(r: &BigRational) -> String {
    r.to_string()
}

fn rationals(v: &[BigRational]) -> Vec<String> {
    v.iter().map(rational_string).collect()
}

fn parse_rationals(v: &[String]) -> Result<Vec<BigRational>, Error> {
    v.iter()
        .map(|s| parse_rational(s).map_err(|e| Error::Format(e.to_string())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightsDoc {
    pub w_a: Vec<String>,
    pub w_b: Vec<String>,
    pub n: usize,
    pub a: String,
    pub b: String,
    pub w_a_float: Vec<f64>,
    pub w_b_float: Vec<f64>,
}

impl WeightsDoc {
    pub fn from_rule(rule: &HermiteRule) -> Self {
        let (w_a_float, w_b_float) = rule.float_weights();
        Self {
            w_a: rationals(rule.w_a()),
            w_b: rationals(rule.w_b()),
            n: rule.n(),
            a: rational_string(rule.a()),
            b: rational_string(rule.b()),
            w_a_float,
            w_b_float,
        }
    }

    /// Rebuilds the exact rule; the float columns are ignored.
    pub fn to_rule(&self) -> Result<HermiteRule, Error> {
        let one = |s: &String| parse_rational(s).map_err(|e| Error::Format(e.to_string()));
        HermiteRule::from_parts(
            self.n,
            one(&self.a)?,
            one(&self.b)?,
            parse_rationals(&self.w_a)?,
            parse_rationals(&self.w_b)?,
        )
        .map_err(|e| Error::Format(e.to_string()))
    }
}

pub fn rule_to_json(rule: &HermiteRule) -> String {
    serde_json::to_string(&WeightsDoc::from_rule(rule)).expect("weights document serializes")
}

pub fn rule_from_json(text: &str) -> Result<HermiteRule, Error> {
    let doc: WeightsDoc = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    doc.to_rule()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelDoc {
    pub n: usize,
    pub a: String,
    pub b: String,
    pub c: String,
    /// `delta_0 .. delta_{n-2}`.
    pub deltas: Vec<String>,
    /// Monomial coefficients of `K_n`, constant term first.
    pub kernel: Vec<String>,
    pub kernel_text: String,
    pub l2sq: String,
    pub abs_integral: f64,
    pub sign_changes: usize,
}

impl KernelDoc {
    pub fn from_set(set: &KernelSet, tol: f64) -> Result<Self, hq_core::Error> {
        let abs = set.abs_integral(0, tol)?;
        Ok(Self {
            n: set.n(),
            a: rational_string(set.a()),
            b: rational_string(set.b()),
            c: rational_string(&set.params().c),
            deltas: rationals(&set.params().deltas),
            kernel: rationals(set.kernel().coeffs()),
            kernel_text: set.kernel().to_string(),
            l2sq: rational_string(&set.l2sq(0).expect("level 0 exists")),
            abs_integral: abs.value,
            sign_changes: abs.sign_changes,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrateDoc {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "fn")]
    pub function: String,
    pub quadrature_value: f64,
    pub reference_value: f64,
    /// `reference - quadrature`.
    pub actual_error: f64,
    /// The same error from `(-1)^n ∫ f^(n) K_n`.
    pub kernel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "fn")]
    pub function: String,
    pub quadrature_value: f64,
    pub reference_value: Option<f64>,
    pub actual_error: Option<f64>,
    pub bound_uniform: Option<f64>,
    pub bound_l2: Option<f64>,
    pub bound_kind: String,
    pub derivative_order_used: usize,
    pub samples_used: usize,
}

impl ReportDoc {
    pub fn new(n: usize, a: f64, b: f64, function: &str, report: &ErrorReport) -> Self {
        Self {
            n,
            a,
            b,
            function: function.to_string(),
            quadrature_value: report.quadrature_value,
            reference_value: report.reference_value,
            actual_error: report.actual_error,
            bound_uniform: report.bound_uniform,
            bound_l2: report.bound_l2,
            bound_kind: report.bound_kind.label().to_string(),
            derivative_order_used: report.derivative_order_used,
            samples_used: report.samples_used,
        }
    }
}

/// One line of a composite error table. Column order is fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTableRow {
    pub n: usize,
    pub m: usize,
    pub h: f64,
    pub quadrature: f64,
    pub reference: f64,
    pub error: f64,
    pub observed_order: Option<f64>,
    pub bound_uniform: Option<f64>,
    pub bound_l2: Option<f64>,
}

pub const ERROR_TABLE_HEADER: [&str; 9] = [
    "n",
    "m",
    "h",
    "quadrature",
    "reference",
    "error",
    "observed_order",
    "bound_uniform",
    "bound_l2",
];

pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<ErrorTableRow>, Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| Error::Format(e.to_string()))
}
