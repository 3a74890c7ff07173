//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 on numerical failures
//! (unconverged reference integral, domain errors, failed identities).

use std::f64::consts::PI;
use std::io::Write;

use clap::{Parser, ValueEnum};
use hq_core::weights::check_order_cap;
use hq_core::{
    compute_weights, error_exact, error_report, integrate_single, parse, reference_integrate, BoundOptions, Expr,
    IntervalKernel, JetProvider, OracleConfig, DEFAULT_MAX_ORDER,
};
use serde::Serialize;

use crate::cache::KernelCache;
use crate::format::{rows_to_csv, Endpoint, IntegrateDoc, KernelDoc, ReportDoc, WeightsDoc};
use crate::table::{doubling_sequence, error_table, TableOptions};
use crate::verify::verify_set;
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    /// Exact weights of the order-n rule.
    Weights,
    /// Matched error kernel and its norms.
    Kernel,
    /// Single-interval quadrature against the reference integral.
    Integrate,
    /// Composite error table for 1, 2, 4, ... up to m panels.
    Composite,
    /// Sampled error bounds.
    Bounds,
    /// Exact identity suite.
    Verify,
    /// The x^2 sin(x) on [0, pi] comparison.
    Demo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, PartialEq, Parser)]
#[command(name = "hq", version, about = "Two-point Hermite quadrature of arbitrary order")]
pub struct CliRequest {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// Rule order (number of derivatives used at each endpoint).
    #[arg(long)]
    pub n: Option<usize>,
    /// Left endpoint: `p/q`, a decimal, or a constant such as `pi`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Right endpoint.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Integrand in `x`, e.g. `x^2*sin(x)`.
    #[arg(long = "fn", allow_hyphen_values = true)]
    pub function: Option<String>,
    /// Largest panel count for `composite`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Reference-integral tolerance (absolute and relative).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Derivative order feeding the bounds (n by default, at most 2n).
    #[arg(long)]
    pub bound_order: Option<usize>,
}

/// Process-level settings that do not come from flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Settings {
    pub max_n: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            max_n: DEFAULT_MAX_ORDER,
        }
    }
}

impl Settings {
    /// Reads `HQ_MAX_N`.
    pub fn from_env() -> Result<Self, Error> {
        match std::env::var("HQ_MAX_N") {
            Ok(v) => v
                .trim()
                .parse()
                .ok()
                .filter(|&n: &usize| n >= 1)
                .map(|max_n| Self { max_n })
                .ok_or_else(|| Error::Usage(format!("HQ_MAX_N must be a positive integer, got `{v}`"))),
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Flags resolved and checked before any computation.
struct Resolved {
    n: usize,
    a: Endpoint,
    b: Endpoint,
    function: Option<(String, Expr)>,
    oracle: OracleConfig,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn resolve(req: &CliRequest, settings: &Settings) -> Result<Resolved, Error> {
    use Subcommand::*;
    let sub = req.subcommand;
    let n = match (sub, req.n) {
        (Demo, _) => req.n.unwrap_or(2),
        (_, Some(n)) => n,
        (_, None) => return Err(usage("--n is required")),
    };
    check_order_cap(n, settings.max_n).map_err(|e| usage(e.to_string()))?;

    let endpoint = |flag: &str, given: &Option<String>, default: &str| -> Result<Endpoint, Error> {
        Endpoint::parse(given.as_deref().unwrap_or(default)).map_err(|e| usage(format!("--{flag}: {e}")))
    };
    let (a, b) = if sub == Demo {
        if req.a.is_some() || req.b.is_some() || req.function.is_some() {
            return Err(usage("demo takes no --a, --b or --fn"));
        }
        (Endpoint::Exact(hq_core::ratio(0, 1)), Endpoint::Float(PI))
    } else {
        (endpoint("a", &req.a, "0")?, endpoint("b", &req.b, "1")?)
    };
    if a.to_f64() >= b.to_f64() {
        return Err(usage("need a < b"));
    }
    if matches!(sub, Weights | Kernel | Verify) && (a.exact().is_none() || b.exact().is_none()) {
        return Err(usage(
            format!("{sub:?} is exact: endpoints must be rational").to_lowercase(),
        ));
    }

    let function = match (sub, &req.function) {
        (Integrate | Composite | Bounds, Some(src)) => {
            let expr = parse(src).map_err(|e| usage(format!("--fn: {e}")))?;
            Some((src.clone(), expr))
        }
        (Integrate | Composite | Bounds, None) => return Err(usage("--fn is required")),
        (_, Some(_)) => return Err(usage("--fn is not used by this subcommand")),
        (_, None) => None,
    };

    match (sub, req.m) {
        (Composite, None) => return Err(usage("--m is required")),
        (Composite, Some(0)) => return Err(usage("--m must be at least 1")),
        (Composite, Some(_)) => {}
        (_, Some(_)) => return Err(usage("--m is only used by composite")),
        _ => {}
    }
    if let Some(k) = req.bound_order {
        if !matches!(sub, Bounds | Composite) {
            return Err(usage("--bound-order is only used by bounds and composite"));
        }
        if k < n || k > 2 * n {
            return Err(usage(format!("--bound-order must lie in {n}..={}", 2 * n)));
        }
    }
    let oracle = match req.tol {
        Some(t) if t > 0.0 && t.is_finite() => OracleConfig::with_tol(t),
        Some(t) => return Err(usage(format!("--tol must be positive, got {t}"))),
        None => OracleConfig::default(),
    };
    Ok(Resolved {
        n,
        a,
        b,
        function,
        oracle,
    })
}

fn json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize") + "\n"
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.12e}"))
}

/// Executes a parsed request and returns the emitted document.
pub fn run(req: &CliRequest, settings: &Settings) -> Result<String, Error> {
    let r = resolve(req, settings)?;
    let cache = KernelCache::new();
    let (n, fa, fb) = (r.n, r.a.to_f64(), r.b.to_f64());

    match req.subcommand {
        Subcommand::Weights => {
            let (a, b) = (r.a.exact().expect("checked"), r.b.exact().expect("checked"));
            let rule = compute_weights(n, a, b)?;
            let doc = WeightsDoc::from_rule(&rule);
            Ok(match req.format {
                Format::Json => json(&doc),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        j: usize,
                        w_a: &'a str,
                        w_b: &'a str,
                        w_a_float: f64,
                        w_b_float: f64,
                    }
                    let rows: Vec<Row> = (0..n)
                        .map(|j| Row {
                            j,
                            w_a: &doc.w_a[j],
                            w_b: &doc.w_b[j],
                            w_a_float: doc.w_a_float[j],
                            w_b_float: doc.w_b_float[j],
                        })
                        .collect();
                    rows_to_csv(&rows)?
                }
                Format::Text => {
                    let mut s = format!("order {n} on [{}, {}]\n", doc.a, doc.b);
                    for j in 0..n {
                        s += &format!("j = {j}: w_a = {}, w_b = {}\n", doc.w_a[j], doc.w_b[j]);
                    }
                    s
                }
            })
        }
        Subcommand::Kernel => {
            let set = cache.get_or_build(n, r.a.exact().expect("checked"), r.b.exact().expect("checked"))?;
            let tol = req.tol.unwrap_or(1e-12);
            let doc = KernelDoc::from_set(&set, tol)?;
            Ok(match req.format {
                Format::Json => json(&doc),
                Format::Csv => {
                    #[derive(Serialize)]
                    struct Row<'a> {
                        power: usize,
                        coefficient: &'a str,
                    }
                    let rows: Vec<Row> = doc
                        .kernel
                        .iter()
                        .enumerate()
                        .map(|(power, c)| Row { power, coefficient: c })
                        .collect();
                    rows_to_csv(&rows)?
                }
                Format::Text => format!(
                    "K_{n}(x) = {}\n{}\n||K||_2^2 = {}\n∫|K| = {:.15e} ({} sign changes)\n",
                    doc.kernel_text,
                    set.params(),
                    doc.l2sq,
                    doc.abs_integral,
                    doc.sign_changes
                ),
            })
        }
        Subcommand::Integrate => {
            let (src, f) = r.function.as_ref().expect("checked");
            let quadrature_value = integrate_single(f, n, fa, fb)?;
            let reference_value = reference(f, fa, fb, &r.oracle)?;
            let kernel = IntervalKernel::new(n, fa, fb)?;
            let kernel_error = error_exact(|x| nth_derivative(f, x, n), &kernel, &r.oracle)?;
            let doc = IntegrateDoc {
                n,
                a: fa,
                b: fb,
                function: src.clone(),
                quadrature_value,
                reference_value,
                actual_error: reference_value - quadrature_value,
                kernel_error,
            };
            Ok(match req.format {
                Format::Json => json(&doc),
                Format::Csv => rows_to_csv(&[doc])?,
                Format::Text => format!(
                    "value     = {:.12}\nreference = {:.12}\nerror     = {:.12}\nkernel    = {:.12}\n",
                    doc.quadrature_value, doc.reference_value, doc.actual_error, doc.kernel_error
                ),
            })
        }
        Subcommand::Composite => {
            let (_, f) = r.function.as_ref().expect("checked");
            let opts = TableOptions {
                bound_order: req.bound_order,
                oracle: r.oracle,
                ..TableOptions::default()
            };
            let rows = error_table(f, n, fa, fb, &doubling_sequence(req.m.expect("checked")), &opts)?;
            Ok(match req.format {
                Format::Json => json(&rows),
                Format::Csv => rows_to_csv(&rows)?,
                Format::Text => {
                    let mut s = format!("{:>6} {:>22} {:>22} {:>8}\n", "m", "quadrature", "error", "order");
                    for row in &rows {
                        s += &format!(
                            "{:>6} {:>22.15} {:>22.12e} {:>8}\n",
                            row.m,
                            row.quadrature,
                            row.error,
                            row.observed_order
                                .map_or_else(|| "-".to_string(), |o| format!("{o:.3}"))
                        );
                    }
                    s
                }
            })
        }
        Subcommand::Bounds => {
            let (src, f) = r.function.as_ref().expect("checked");
            let opts = BoundOptions {
                order: req.bound_order,
                oracle: r.oracle,
                ..BoundOptions::default()
            };
            let report = error_report(f, n, fa, fb, &opts)?;
            let doc = ReportDoc::new(n, fa, fb, src, &report);
            Ok(match req.format {
                Format::Json => json(&doc),
                Format::Csv => rows_to_csv(&[doc])?,
                Format::Text => format!(
                    "value          = {:.12}\nreference      = {}\nerror          = {}\nbound (unif.)  = {}\nbound (L2)     = {}\nderivative     = {}\ntighter bound  = {}\n",
                    doc.quadrature_value,
                    fmt_opt(doc.reference_value),
                    fmt_opt(doc.actual_error),
                    fmt_opt(doc.bound_uniform),
                    fmt_opt(doc.bound_l2),
                    doc.derivative_order_used,
                    doc.bound_kind
                ),
            })
        }
        Subcommand::Verify => {
            let set = cache.get_or_build(n, r.a.exact().expect("checked"), r.b.exact().expect("checked"))?;
            let checks = verify_set(&set)?;
            let out = match req.format {
                Format::Json => json(&checks),
                Format::Csv => rows_to_csv(&checks)?,
                Format::Text => checks
                    .iter()
                    .map(|c| format!("{} {}: {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                    .collect(),
            };
            if checks.iter().all(|c| c.passed) {
                Ok(out)
            } else {
                Err(Error::Failed(out))
            }
        }
        Subcommand::Demo => {
            let f = parse("x^2*sin(x)").expect("demo integrand parses");
            let truth = reference(&f, 0.0, PI, &r.oracle)?;
            let trapezoid = integrate_single(&f, 1, 0.0, PI)?;
            let hermite = integrate_single(&f, n, 0.0, PI)?;
            #[derive(Serialize)]
            struct Line {
                label: String,
                value: f64,
                error: f64,
            }
            let lines = [
                ("true value".to_string(), truth),
                ("trapezoid".to_string(), trapezoid),
                (format!("hermite n={n}"), hermite),
            ]
            .map(|(label, value)| Line {
                label,
                value,
                error: truth - value,
            });
            Ok(match req.format {
                Format::Json => json(&lines),
                Format::Csv => rows_to_csv(&lines)?,
                Format::Text => lines
                    .iter()
                    .map(|l| format!("{:<14} {:>18.12} {:>18.12}\n", l.label, l.value, l.error))
                    .collect(),
            })
        }
    }
}

fn reference(f: &Expr, a: f64, b: f64, cfg: &OracleConfig) -> Result<f64, Error> {
    Ok(reference_integrate(|x| f.value(x).unwrap_or(f64::NAN), a, b, cfg)?.converged_value()?)
}

fn nth_derivative(f: &Expr, x: f64, n: usize) -> f64 {
    f.jet(x, n).map_or(f64::NAN, |jet| jet.derivative(n))
}

/// Parses `args` (program name first), runs, and writes to the given streams.
/// Returns the process exit status.
pub fn main_with_args<I, T>(args: I, settings: Result<Settings, Error>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let req = match CliRequest::try_parse_from(args) {
        Ok(req) => req,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    1
                }
            };
        }
    };
    let result = settings.and_then(|s| run(&req, &s));
    match result {
        Ok(doc) => {
            let _ = write!(out, "{doc}");
            0
        }
        Err(Error::Failed(doc)) => {
            let _ = write!(out, "{doc}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
