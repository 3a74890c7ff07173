//! Single-interval and composite Hermite quadrature, the kernel form of the
//! error, and sampled error bounds.
//!
//! Sign convention: the error is `E = ∫f - Q`, so
//! `E = (-1)^n ∫ f^(n) K_n = (-1)^(n+j) ∫ f^(n+j) K^j` for `j = 0..n`, where
//! `K^j` is the `j`-th antiderivative of the kernel anchored at `a`.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::autodiff::JetProvider;
use crate::exactmath::{ratio, to_f64, BigRational, FloatPolynomial};
use crate::kernel::KernelSet;
use crate::oracle::{reference_integrate, OracleConfig};
use crate::weights::{check_order, compute_weights, float_omegas};
use crate::{Error, Result};

fn check_float_interval(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval {
            a: a.to_string(),
            b: b.to_string(),
        })
    }
}

/// Strictly increasing nodes `x_0 < ... < x_m`, `m >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition<T> {
    nodes: Vec<T>,
}

impl<T: PartialOrd> Partition<T> {
    pub fn new(nodes: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition);
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Number of subintervals.
    pub fn panels(&self) -> usize {
        self.nodes.len() - 1
    }
}

impl Partition<f64> {
    /// `m` equal panels. The last node is `b` exactly.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Self> {
        check_float_interval(a, b)?;
        if m == 0 {
            return Err(Error::InvalidPartition);
        }
        let h = (b - a) / m as f64;
        let mut nodes: Vec<f64> = (0..m).map(|i| a + i as f64 * h).collect();
        nodes.push(b);
        Self::new(nodes)
    }
}

impl Partition<BigRational> {
    pub fn uniform_exact(a: &BigRational, b: &BigRational, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPartition);
        }
        let h = (b - a) / BigRational::from_integer(m.into());
        Self::new((0..=m).map(|i| a + &h * BigRational::from_integer(i.into())).collect())
    }
}

fn panel_sum(omegas: &[f64], lo: f64, hi: f64, da: &[f64], db: &[f64]) -> f64 {
    let h = hi - lo;
    let mut hp = h;
    let mut acc = 0.0;
    for (j, w) in omegas.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += w * hp * (da[j] + sign * db[j]);
        hp *= h;
    }
    acc
}

fn derivs_at<P: JetProvider + ?Sized>(f: &P, x: f64, n: usize) -> Result<Vec<f64>> {
    let jet = f.jet(x, n - 1)?;
    if jet.order() + 1 < n {
        return Err(Error::JetTooShort {
            have: jet.order(),
            need: n - 1,
        });
    }
    Ok((0..n).map(|k| jet.derivative(k)).collect())
}

/// Order-`n` Hermite quadrature of `f` over `[a, b]` in floating point.
pub fn integrate_single<P: JetProvider + ?Sized>(f: &P, n: usize, a: f64, b: f64) -> Result<f64> {
    check_order(n)?;
    check_float_interval(a, b)?;
    let omegas = float_omegas(n)?;
    Ok(panel_sum(&omegas, a, b, &derivs_at(f, a, n)?, &derivs_at(f, b, n)?))
}

/// Composite rule; each node's jet is evaluated once and shared by the two
/// panels that meet there.
pub fn integrate_composite<P: JetProvider + ?Sized>(f: &P, n: usize, partition: &Partition<f64>) -> Result<f64> {
    check_order(n)?;
    let omegas = float_omegas(n)?;
    let nodes = partition.nodes();
    if nodes.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidPartition);
    }
    let jets = nodes.iter().map(|&x| derivs_at(f, x, n)).collect::<Result<Vec<_>>>()?;
    Ok((0..partition.panels())
        .map(|i| panel_sum(&omegas, nodes[i], nodes[i + 1], &jets[i], &jets[i + 1]))
        .sum())
}

/// Exact composite rule. `derivs(x, n)` must return `f(x), ..., f^(n-1)(x)`.
pub fn integrate_composite_exact<F>(derivs: F, n: usize, partition: &Partition<BigRational>) -> Result<BigRational>
where
    F: Fn(&BigRational, usize) -> Result<Vec<BigRational>>,
{
    check_order(n)?;
    let nodes = partition.nodes();
    let jets = nodes.iter().map(|x| derivs(x, n)).collect::<Result<Vec<_>>>()?;
    let mut total = BigRational::zero();
    for i in 0..partition.panels() {
        let rule = compute_weights(n, &nodes[i], &nodes[i + 1])?;
        total += rule.apply_exact(&jets[i], &jets[i + 1])?;
    }
    Ok(total)
}

/// Kernel levels `K^0..K^n` on a floating-point interval.
///
/// Built once on `[-1, 1]` in exact arithmetic and mapped by
/// `K^j(x) = (h/2)^(n+j) K~^j(s)`, `s = (2x - a - b) / h`, so intervals with
/// irrational endpoints such as `[0, pi]` are supported.
#[derive(Clone, Debug)]
pub struct IntervalKernel {
    a: f64,
    b: f64,
    unit: KernelSet,
    levels: Vec<FloatPolynomial>,
    unit_abs: Vec<f64>,
    unit_l2sq: Vec<f64>,
}

impl IntervalKernel {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        check_float_interval(a, b)?;
        let unit = KernelSet::new(n, &ratio(-1, 1), &ratio(1, 1))?;
        let levels = (0..=n).map(|j| unit.level(j).expect("level <= n").to_f64()).collect();
        let unit_abs = (0..=n)
            .map(|j| Ok(unit.abs_integral(j, 1e-14)?.value))
            .collect::<Result<_>>()?;
        let unit_l2sq = (0..=n).map(|j| to_f64(&unit.l2sq(j).expect("level <= n"))).collect();
        Ok(Self {
            a,
            b,
            unit,
            levels,
            unit_abs,
            unit_l2sq,
        })
    }

    /// The same order on another interval, reusing the exact construction.
    pub fn rescaled(&self, a: f64, b: f64) -> Result<Self> {
        check_float_interval(a, b)?;
        Ok(Self { a, b, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.unit.n()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// The exact kernel set on `[-1, 1]`.
    pub fn unit(&self) -> &KernelSet {
        &self.unit
    }

    fn half(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    fn check_level(&self, j: usize) -> Result<()> {
        if j <= self.n() {
            Ok(())
        } else {
            Err(Error::InvalidKernelLevel { level: j, n: self.n() })
        }
    }

    /// `K^j(x)`.
    pub fn eval(&self, j: usize, x: f64) -> Result<f64> {
        self.check_level(j)?;
        let half = self.half();
        let s = (x - 0.5 * (self.a + self.b)) / half;
        Ok(libm::pow(half, (self.n() + j) as f64) * self.levels[j].eval(s))
    }

    /// `∫_a^b |K^j|`.
    pub fn abs_integral(&self, j: usize) -> Result<f64> {
        self.check_level(j)?;
        Ok(self.unit_abs[j] * libm::pow(self.half(), (self.n() + j + 1) as f64))
    }

    /// `(∫_a^b (K^j)^2)^(1/2)`.
    pub fn l2_norm(&self, j: usize) -> Result<f64> {
        self.check_level(j)?;
        Ok(libm::sqrt(
            self.unit_l2sq[j] * libm::pow(self.half(), (2 * (self.n() + j) + 1) as f64),
        ))
    }
}

/// `E = (-1)^n ∫ f^(n) K_n`, integrated by the oracle.
pub fn error_exact<F: Fn(f64) -> f64>(f_n: F, kernel: &IntervalKernel, cfg: &OracleConfig) -> Result<f64> {
    error_at_level(f_n, kernel, 0, cfg)
}

/// `E = (-1)^(n+j) ∫ f^(n+j) K^j` for `j <= n`.
pub fn error_at_level<F: Fn(f64) -> f64>(
    f_nj: F,
    kernel: &IntervalKernel,
    j: usize,
    cfg: &OracleConfig,
) -> Result<f64> {
    kernel.check_level(j)?;
    let sign = if (kernel.n() + j).is_multiple_of(2) { 1.0 } else { -1.0 };
    let integrand = |x: f64| f_nj(x) * kernel.eval(j, x).unwrap_or(f64::NAN);
    let value = reference_integrate(integrand, kernel.a(), kernel.b(), cfg)?.converged_value()?;
    Ok(sign * value)
}

/// `∫_a^b f^(4) (x-a)^2 (x-b)^2 / 24`, the order-2 error written with the
/// Peano kernel. A constant `f^(4) = c` gives `c (b-a)^5 / 720`.
pub fn e2_classical_f4<F: Fn(f64) -> f64>(f4: F, a: f64, b: f64, cfg: &OracleConfig) -> Result<f64> {
    check_float_interval(a, b)?;
    let integrand = |x: f64| {
        let w = (x - a) * (x - b);
        f4(x) * w * w / 24.0
    };
    reference_integrate(integrand, a, b, cfg)?.converged_value()
}

/// Uniform samples of `f^(order)` on `[a, b]`, endpoints included.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeSamples {
    order: usize,
    a: f64,
    b: f64,
    values: Vec<f64>,
}

impl DerivativeSamples {
    pub fn new(order: usize, a: f64, b: f64, values: Vec<f64>) -> Result<Self> {
        check_float_interval(a, b)?;
        if values.len() < 2 {
            return Err(Error::TooFewSamples {
                need: 2,
                got: values.len(),
            });
        }
        Ok(Self { order, a, b, values })
    }

    fn grid(a: f64, b: f64, count: usize) -> Result<impl Iterator<Item = f64>> {
        check_float_interval(a, b)?;
        if count < 2 {
            return Err(Error::TooFewSamples { need: 2, got: count });
        }
        let step = (b - a) / (count - 1) as f64;
        Ok((0..count).map(move |i| if i + 1 == count { b } else { a + i as f64 * step }))
    }

    /// Samples a closure that already evaluates `f^(order)`.
    pub fn from_fn<F: Fn(f64) -> f64>(f: F, order: usize, a: f64, b: f64, count: usize) -> Result<Self> {
        let values = Self::grid(a, b, count)?.map(f).collect();
        Self::new(order, a, b, values)
    }

    /// Samples `f^(order)` through Taylor jets of `f`.
    pub fn from_provider<P: JetProvider + ?Sized>(f: &P, order: usize, a: f64, b: f64, count: usize) -> Result<Self> {
        let values = Self::grid(a, b, count)?
            .map(|x| f.jet(x, order).map(|jet| jet.derivative(order)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(order, a, b, values)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(max - min) / 2`: sup-distance of the samples to their midrange.
    pub fn midrange_deviation(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        0.5 * (hi - lo)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn trapezoid(&self, g: impl Fn(f64) -> f64) -> f64 {
        let step = (self.b - self.a) / (self.values.len() - 1) as f64;
        let last = self.values.len() - 1;
        let inner: f64 = self.values[1..last].iter().map(|&v| g(v)).sum();
        step * (inner + 0.5 * (g(self.values[0]) + g(self.values[last])))
    }

    /// Trapezoid estimate of `(1/(b-a)) ∫ f^(order)`.
    pub fn mean(&self) -> f64 {
        self.trapezoid(|v| v) / (self.b - self.a)
    }

    /// Trapezoid estimate of `‖f^(order) - mean‖_2`.
    pub fn mean_deviation_l2(&self) -> f64 {
        let mean = self.mean();
        libm::sqrt(self.trapezoid(|v| (v - mean) * (v - mean)).max(0.0))
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.trapezoid(|v| v * v))
    }
}

fn sample_level(samples: &DerivativeSamples, kernel: &IntervalKernel) -> Result<usize> {
    let n = kernel.n();
    if samples.order < n || samples.order > 2 * n {
        return Err(Error::OrderMismatch {
            expected: n,
            got: samples.order,
        });
    }
    Ok(samples.order - n)
}

/// Sampled estimate of `‖f^(k) - midrange‖_∞ ∫|K^(k-n)|` for `n <= k < 2n`.
/// For `k = 2n` the kernel `K^n` has one sign and the estimate is
/// `‖f^(2n)‖_∞ ∫|K^n|`. Sampling makes this an estimate, not an enclosure.
pub fn bound_uniform(samples: &DerivativeSamples, kernel: &IntervalKernel) -> Result<f64> {
    let j = sample_level(samples, kernel)?;
    let dev = if j == kernel.n() {
        samples.sup_norm()
    } else {
        samples.midrange_deviation()
    };
    Ok(dev * kernel.abs_integral(j)?)
}

/// Sampled estimate of `‖f^(k) - mean‖_2 ‖K^(k-n)‖_2`; plain `‖f^(2n)‖_2`
/// for `k = 2n`.
pub fn bound_l2(samples: &DerivativeSamples, kernel: &IntervalKernel) -> Result<f64> {
    let j = sample_level(samples, kernel)?;
    let dev = if j == kernel.n() {
        samples.l2_norm()
    } else {
        samples.mean_deviation_l2()
    };
    Ok(dev * kernel.l2_norm(j)?)
}

/// Both order-2 bounds driven by `f'''`: `(uniform, l2)`, with the
/// once-integrated kernel `G`.
pub fn e2_bound_f3(f3_samples: &DerivativeSamples, kernel: &IntervalKernel) -> Result<(f64, f64)> {
    if kernel.n() != 2 {
        return Err(Error::OrderMismatch {
            expected: 2,
            got: kernel.n(),
        });
    }
    if f3_samples.order != 3 {
        return Err(Error::OrderMismatch {
            expected: 3,
            got: f3_samples.order,
        });
    }
    Ok((bound_uniform(f3_samples, kernel)?, bound_l2(f3_samples, kernel)?))
}

/// Which of the two bounds is the smaller one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// The uniform bound, built on the midrange shift.
    Midrange,
    /// The L2 bound, built on the mean shift.
    Mean,
}

impl BoundKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Midrange => "midrange",
            Self::Mean => "mean",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundOptions {
    /// Derivative order feeding the bounds; `None` means `n`.
    pub order: Option<usize>,
    pub initial_samples: usize,
    /// Grid doublings allowed while the bounds are still moving.
    pub max_refinements: usize,
    /// Relative change below which a refinement is accepted.
    pub rel_change: f64,
    pub oracle: OracleConfig,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            order: None,
            initial_samples: 257,
            max_refinements: 3,
            rel_change: 0.01,
            oracle: OracleConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub quadrature_value: f64,
    pub reference_value: Option<f64>,
    /// `reference - quadrature`.
    pub actual_error: Option<f64>,
    pub bound_uniform: Option<f64>,
    pub bound_l2: Option<f64>,
    pub bound_kind: BoundKind,
    pub derivative_order_used: usize,
    /// Grid size the bound estimates settled on.
    pub samples_used: usize,
}

impl ErrorReport {
    /// `|actual| <= bound (1 + slack)` for every bound present.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        let Some(err) = self.actual_error else {
            return true;
        };
        [self.bound_uniform, self.bound_l2]
            .into_iter()
            .flatten()
            .all(|bound| err.abs() <= bound * (1.0 + slack))
    }
}

fn relative_change(old: f64, new: f64) -> f64 {
    let scale = old.abs().max(new.abs());
    if scale == 0.0 {
        0.0
    } else {
        (new - old).abs() / scale
    }
}

/// Quadrature, oracle reference, actual error and both sampled bounds.
///
/// Bounds start on `initial_samples` points; the grid is refined to
/// `2N - 1` points until both bounds move by less than `rel_change`.
pub fn error_report<P: JetProvider + ?Sized>(
    f: &P,
    n: usize,
    a: f64,
    b: f64,
    opts: &BoundOptions,
) -> Result<ErrorReport> {
    let quadrature_value = integrate_single(f, n, a, b)?;
    let reference = reference_integrate(|x| f.value(x).unwrap_or(f64::NAN), a, b, &opts.oracle)?.converged_value()?;

    let order = opts.order.unwrap_or(n);
    let kernel = IntervalKernel::new(n, a, b)?;
    let bounds_on = |count: usize| -> Result<(f64, f64)> {
        let samples = DerivativeSamples::from_provider(f, order, a, b, count)?;
        Ok((bound_uniform(&samples, &kernel)?, bound_l2(&samples, &kernel)?))
    };
    let mut count = opts.initial_samples.max(2);
    let mut bounds = bounds_on(count)?;
    for _ in 0..opts.max_refinements {
        let finer_count = 2 * count - 1;
        let finer = bounds_on(finer_count)?;
        let settled = relative_change(bounds.0, finer.0) < opts.rel_change
            && relative_change(bounds.1, finer.1) < opts.rel_change;
        bounds = finer;
        count = finer_count;
        if settled {
            break;
        }
    }

    Ok(ErrorReport {
        quadrature_value,
        reference_value: Some(reference),
        actual_error: Some(reference - quadrature_value),
        bound_uniform: Some(bounds.0),
        bound_l2: Some(bounds.1),
        bound_kind: if bounds.0 <= bounds.1 {
            BoundKind::Midrange
        } else {
            BoundKind::Mean
        },
        derivative_order_used: order,
        samples_used: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{parse, JetFn, TaylorJet};
    use crate::exactmath::Polynomial;
    use alloc::vec;
    use approx::assert_relative_eq;
    use core::f64::consts::{E, PI};
    use proptest::prelude::*;

    fn corpus() -> Vec<(&'static str, f64)> {
        // expression and its integral over [0, 1]
        vec![
            ("exp(x)", E - 1.0),
            ("sin(x)", 1.0 - libm::cos(1.0)),
            ("x^2*sin(x)", 2.0 * libm::sin(1.0) + libm::cos(1.0) - 2.0),
            ("1/(1+x^2)", PI / 4.0),
        ]
    }

    #[test]
    fn motivating_example() {
        let f = parse("x^2*sin(x)").unwrap();
        let q = integrate_single(&f, 2, 0.0, PI).unwrap();
        assert_relative_eq!(q, PI.powi(4) / 12.0, epsilon = 1e-12);
        let kernel = IntervalKernel::new(2, 0.0, PI).unwrap();
        let f2 = |x: f64| (2.0 - x * x) * libm::sin(x) + 4.0 * x * libm::cos(x);
        let e = error_exact(f2, &kernel, &OracleConfig::default()).unwrap();
        assert_relative_eq!(e, PI * PI - 4.0 - PI.powi(4) / 12.0, epsilon = 1e-11);
    }

    #[test]
    fn single_interval_examples() {
        let c = parse("3.5").unwrap();
        for n in 1..=6 {
            assert_relative_eq!(integrate_single(&c, n, -1.0, 2.0).unwrap(), 10.5, epsilon = 1e-13);
        }
        let quartic = parse("x^4").unwrap();
        assert_relative_eq!(
            integrate_single(&quartic, 2, 0.0, 1.0).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-15
        );
        assert!(integrate_single(&quartic, 0, 0.0, 1.0).is_err());
        assert!(integrate_single(&quartic, 2, 1.0, 1.0).is_err());
        let log = parse("log(x)").unwrap();
        assert!(matches!(integrate_single(&log, 2, 0.0, 1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn partitions() {
        assert_eq!(Partition::new(vec![0.0]), Err(Error::InvalidPartition));
        assert_eq!(Partition::new(vec![0.0, 1.0, 1.0]), Err(Error::InvalidPartition));
        assert_eq!(Partition::new(vec![0.0, f64::NAN]), Err(Error::InvalidPartition));
        let p = Partition::uniform(0.0, 1.0, 3).unwrap();
        assert_eq!(p.panels(), 3);
        assert_eq!(*p.nodes().last().unwrap(), 1.0);
        assert!(Partition::uniform(0.0, 1.0, 0).is_err());
        let q = Partition::uniform_exact(&ratio(0, 1), &ratio(1, 1), 4).unwrap();
        assert_eq!(q.nodes()[1], ratio(1, 4));
    }

    #[test]
    fn composite_with_one_panel_is_single() {
        let f = parse("exp(x)*cos(2*x)").unwrap();
        for n in 1..=4 {
            let single = integrate_single(&f, n, 0.25, 1.5).unwrap();
            let comp = integrate_composite(&f, n, &Partition::new(vec![0.25, 1.5]).unwrap()).unwrap();
            assert_eq!(single, comp);
        }
    }

    #[test]
    fn composite_exp_m4() {
        let f = parse("exp(x)").unwrap();
        let v = integrate_composite(&f, 2, &Partition::uniform(0.0, 1.0, 4).unwrap()).unwrap();
        let err = E - 1.0 - v;
        // per panel E = f^(4)(xi) h^5 / 720
        let predicted = 0.25f64.powi(4) / 720.0 * (E - 1.0);
        assert!(err.abs() < 1e-5);
        assert_relative_eq!(err, predicted, max_relative = 0.01);
    }

    #[test]
    fn composite_exact_on_polynomials() {
        for n in 1..=4 {
            let p = Polynomial::from_ints(&[1, -2, 3, 0, 5, -1, 2, 7][..2 * n]);
            let part = Partition::new(vec![ratio(-1, 2), ratio(1, 7), ratio(2, 3), ratio(3, 1)]).unwrap();
            let got = integrate_composite_exact(|x, k| Ok(p.derivatives_at(x, k)), n, &part).unwrap();
            assert_eq!(got, p.definite_integral(&ratio(-1, 2), &ratio(3, 1)));
        }
    }

    #[test]
    fn composite_order() {
        let f = parse("exp(x)").unwrap();
        for n in 1..=3 {
            let err =
                |m: usize| E - 1.0 - integrate_composite(&f, n, &Partition::uniform(0.0, 1.0, m).unwrap()).unwrap();
            let order = libm::log2(err(16) / err(32));
            assert!((order - 2.0 * n as f64).abs() <= 0.15, "n = {n}: order {order}");
        }
    }

    #[test]
    fn interval_kernel_matches_exact_kernel() {
        let exact = KernelSet::new(3, &ratio(1, 4), &ratio(2, 1)).unwrap();
        let k = IntervalKernel::new(3, 0.25, 2.0).unwrap();
        for j in 0..=3 {
            let p = exact.level(j).unwrap().to_f64();
            for i in 0..=10 {
                let x = 0.25 + 1.75 * i as f64 / 10.0;
                assert_relative_eq!(k.eval(j, x).unwrap(), p.eval(x), epsilon = 1e-13, max_relative = 1e-12);
            }
            assert_relative_eq!(
                k.l2_norm(j).unwrap(),
                to_f64(&exact.l2sq(j).unwrap()).sqrt(),
                max_relative = 1e-13
            );
            assert_relative_eq!(
                k.abs_integral(j).unwrap(),
                exact.abs_integral(j, 1e-14).unwrap().value,
                max_relative = 1e-12
            );
        }
        assert!(k.eval(4, 0.5).is_err());
        assert!(IntervalKernel::new(2, 1.0, f64::INFINITY).is_err());
        let moved = k.rescaled(-1.0, 1.0).unwrap();
        assert_relative_eq!(
            moved.abs_integral(0).unwrap(),
            exact.abs_integral(0, 1e-14).unwrap().value * (2.0 / 1.75f64).powi(4),
            max_relative = 1e-12
        );
    }

    #[test]
    fn unit_interval_constants() {
        let k = IntervalKernel::new(2, 0.0, 1.0).unwrap();
        assert_relative_eq!(k.abs_integral(0).unwrap(), 3f64.sqrt() / 54.0, epsilon = 1e-15);
        assert_relative_eq!(k.l2_norm(0).unwrap(), 1.0 / 720f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(k.abs_integral(1).unwrap(), 1.0 / 192.0, epsilon = 1e-15);
        assert_relative_eq!(k.l2_norm(1).unwrap(), 1.0 / 30240f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(k.abs_integral(2).unwrap(), 1.0 / 720.0, epsilon = 1e-15);
        let scaled = IntervalKernel::new(2, 3.0, 5.0).unwrap();
        assert_relative_eq!(
            scaled.abs_integral(0).unwrap(),
            8.0 * 3f64.sqrt() / 54.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn error_exact_examples() {
        let cfg = OracleConfig::default();
        for n in 1..=4 {
            let k = IntervalKernel::new(n, 0.0, 1.0).unwrap();
            // derivative of a degree 2n-1 polynomial vanishes against K_n
            let cubic_like = |x: f64| libm::pow(x, (n - 1) as f64) * 2.0 + 1.0;
            assert!(error_exact(cubic_like, &k, &cfg).unwrap().abs() < 1e-14);
            // f = x^(2n): f^(n) = (2n)!/n! x^n
            let c: f64 = ((n + 1)..=(2 * n)).map(|i| i as f64).product();
            let e = error_exact(|x| c * libm::pow(x, n as f64), &k, &cfg).unwrap();
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            let denom: f64 = (1..=(2 * n + 1)).map(|i| i as f64).product();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_relative_eq!(e, sign * fact * fact / denom, max_relative = 1e-12);
        }
    }

    #[test]
    fn error_at_every_level_agrees() {
        let cfg = OracleConfig::default();
        let k = IntervalKernel::new(3, -0.5, 1.25).unwrap();
        // f = exp(2x): f^(k) = 2^k exp(2x)
        let reference = 0.5 * (libm::exp(2.5) - libm::exp(-1.0));
        let f = parse("exp(2*x)").unwrap();
        let want = reference - integrate_single(&f, 3, -0.5, 1.25).unwrap();
        for j in 0..=3 {
            let scale = libm::pow(2.0, (3 + j) as f64);
            let e = error_at_level(|x| scale * libm::exp(2.0 * x), &k, j, &cfg).unwrap();
            assert_relative_eq!(e, want, max_relative = 1e-9);
        }
    }

    #[test]
    fn quartic_bounds() {
        let k = IntervalKernel::new(2, 0.0, 1.0).unwrap();
        let f2 = DerivativeSamples::from_fn(|x| 12.0 * x * x, 2, 0.0, 1.0, 257).unwrap();
        assert_relative_eq!(
            bound_uniform(&f2, &k).unwrap(),
            6.0 * 3f64.sqrt() / 54.0,
            epsilon = 1e-12
        );
        // trapezoid moments of 12x^2 carry an O(h^2) error
        assert_relative_eq!(
            bound_l2(&f2, &k).unwrap(),
            (144.0f64 / 5.0 - 16.0).sqrt() / 720f64.sqrt(),
            max_relative = 1e-4
        );
        let f3 = DerivativeSamples::from_fn(|x| 24.0 * x, 3, 0.0, 1.0, 257).unwrap();
        let (u, l2) = e2_bound_f3(&f3, &k).unwrap();
        assert_relative_eq!(u, 1.0 / 16.0, epsilon = 1e-14);
        // ‖24x - 12‖_2 = sqrt(48)
        assert_relative_eq!(l2, 48f64.sqrt() / 30240f64.sqrt(), max_relative = 1e-4);
        assert!(u >= 1.0 / 30.0 && l2 >= 1.0 / 30.0);
        assert!(e2_bound_f3(&f2, &k).is_err());
        let f4 = DerivativeSamples::from_fn(|_| 24.0, 4, 0.0, 1.0, 9).unwrap();
        assert_relative_eq!(bound_uniform(&f4, &k).unwrap(), 1.0 / 30.0, epsilon = 1e-15);
        let f5 = DerivativeSamples::from_fn(|_| 0.0, 5, 0.0, 1.0, 9).unwrap();
        assert!(bound_uniform(&f5, &k).is_err());
    }

    #[test]
    fn constant_derivatives_give_zero_bounds() {
        let k = IntervalKernel::new(2, 0.0, 1.0).unwrap();
        for order in [2, 3] {
            let s = DerivativeSamples::from_fn(|_| 7.0, order, 0.0, 1.0, 33).unwrap();
            assert_eq!(bound_uniform(&s, &k).unwrap(), 0.0);
            assert_eq!(bound_l2(&s, &k).unwrap(), 0.0);
        }
        assert!(DerivativeSamples::from_fn(|_| 7.0, 2, 0.0, 1.0, 1).is_err());
        assert!(DerivativeSamples::new(2, 0.0, 1.0, vec![]).is_err());
    }

    #[test]
    fn classical_f4() {
        let cfg = OracleConfig::default();
        assert_relative_eq!(
            e2_classical_f4(|_| 24.0, 0.0, 1.0, &cfg).unwrap(),
            1.0 / 30.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            e2_classical_f4(|_| 1.0, 0.0, 1.0, &cfg).unwrap(),
            1.0 / 720.0,
            epsilon = 1e-16
        );
        assert_relative_eq!(
            e2_classical_f4(|_| 1.0, 1.0, 3.0, &cfg).unwrap(),
            32.0 / 720.0,
            epsilon = 1e-15
        );
        assert_eq!(e2_classical_f4(|_| 0.0, 0.0, 1.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn reports_on_the_corpus() {
        for (src, exact) in corpus() {
            let f = parse(src).unwrap();
            for n in 1..=4 {
                let r = error_report(&f, n, 0.0, 1.0, &BoundOptions::default()).unwrap();
                let q = integrate_single(&f, n, 0.0, 1.0).unwrap();
                assert_eq!(r.quadrature_value, q);
                assert_relative_eq!(r.reference_value.unwrap(), exact, epsilon = 1e-14);
                assert!(r.bounds_hold(0.0), "{src}, n = {n}: {r:?}");
                assert_eq!(r.derivative_order_used, n);
            }
            let r3 = error_report(
                &f,
                2,
                0.0,
                1.0,
                &BoundOptions {
                    order: Some(3),
                    ..BoundOptions::default()
                },
            )
            .unwrap();
            assert!(r3.bounds_hold(0.0), "{src}: {r3:?}");
            assert_eq!(r3.derivative_order_used, 3);
        }
    }

    #[test]
    fn quadrature_minus_reference_matches_kernel_form() {
        let cfg = OracleConfig::default();
        type Derivative = fn(usize, f64) -> f64;
        let cases: [(&str, Derivative); 2] = [
            ("exp(x)", |_, x| libm::exp(x)),
            ("sin(x)", |k, x| match k % 4 {
                0 => libm::sin(x),
                1 => libm::cos(x),
                2 => -libm::sin(x),
                _ => -libm::cos(x),
            }),
        ];
        for (src, deriv) in cases {
            let f = parse(src).unwrap();
            for n in 1..=4 {
                let (a, b) = (-0.3, 1.7);
                let reference = reference_integrate(|x| deriv(0, x), a, b, &cfg).unwrap().value;
                let q = integrate_single(&f, n, a, b).unwrap();
                let k = IntervalKernel::new(n, a, b).unwrap();
                let e = error_exact(|x| deriv(n, x), &k, &cfg).unwrap();
                assert!((reference - q - e).abs() < 1e-12, "{src} n = {n}");
            }
        }
    }

    #[test]
    fn log_kink_needs_only_first_derivative() {
        // f(x) = ∫_0^x log|t - 1/2| dt; f' has a log singularity inside (0, 1)
        let g = |x: f64| {
            let u = x - 0.5;
            if u == 0.0 {
                0.0
            } else {
                u * libm::log(libm::fabs(u)) - u
            }
        };
        let f0 = g(0.0);
        let f = JetFn(move |x: f64, order: usize| {
            let mut d = vec![g(x) - f0];
            if order >= 1 {
                d.push(libm::log(libm::fabs(x - 0.5)));
            }
            d.resize(order + 1, f64::NAN);
            Ok(TaylorJet::from_derivatives(&d))
        });
        let cfg = OracleConfig::default();
        for (a, b) in [(0.0, 1.0), (0.0, 0.8), (0.3, 0.9)] {
            let q = integrate_single(&f, 1, a, b).unwrap();
            let reference = reference_integrate(|x| g(x) - f0, a, b, &cfg)
                .unwrap()
                .converged_value()
                .unwrap();
            let k = IntervalKernel::new(1, a, b).unwrap();
            let e = error_exact(|x| libm::log(libm::fabs(x - 0.5)), &k, &cfg).unwrap();
            assert!(
                (reference - q - e).abs() < 1e-6,
                "[{a}, {b}]: {} vs {}",
                reference - q,
                e
            );
            if a == 0.0 && b == 0.8 {
                assert!(e.abs() > 1e-3);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn composite_is_sum_of_singles(n in 1usize..=4, cuts in proptest::collection::vec(0.01f64..0.99, 1..5)) {
            let f = parse("exp(x)*sin(3*x)").unwrap();
            let mut nodes = vec![0.0, 1.0];
            nodes.extend(cuts);
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            let part = Partition::new(nodes.clone()).unwrap();
            let comp = integrate_composite(&f, n, &part).unwrap();
            let singles: f64 = nodes.windows(2).map(|w| integrate_single(&f, n, w[0], w[1]).unwrap()).sum();
            prop_assert!((comp - singles).abs() <= 1e-14);
        }

        #[test]
        fn exact_composite_of_low_degree(n in 1usize..=4, m in 1usize..=5, coeffs in proptest::collection::vec(-9i64..=9, 1..=8)) {
            let p = Polynomial::from_ints(&coeffs[..coeffs.len().min(2 * n)]);
            let (a, b) = (ratio(-2, 3), ratio(5, 2));
            let part = Partition::uniform_exact(&a, &b, m).unwrap();
            let got = integrate_composite_exact(|x, k| Ok(p.derivatives_at(x, k)), n, &part).unwrap();
            prop_assert_eq!(got, p.definite_integral(&a, &b));
        }
    }
}
