//! Error kernels of the Hermite rule.
//!
//! The order-`n` rule on `[a, b]` satisfies
//!
//! ```text
//! ∫_a^b f - Q_n(f) = ∫_a^b (-1)^n f^(n)(x) K_n(x) dx,
//! K_n(x) = (x + c)^n / n! + sum_{i=0}^{n-2} delta_i x^i / i!
//! ```
//!
//! for a unique parameter set `(c, delta_0..delta_{n-2})`. That kernel is a
//! shifted, unnormalized Legendre polynomial and is built here three ways:
//! by solving the matching conditions against the weights, by the Rodrigues
//! formula, and as the `n`-th derivative of the Peano kernel of the rule.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::exactmath::{factorial, from_f64, rpow, to_f64, BigRational, Polynomial};
use crate::weights::{check_interval, check_order, compute_weights, HermiteRule};
use crate::{Error, Result};

/// Matched kernel parameters `c` and `delta_0..delta_{n-2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelParams {
    pub n: usize,
    pub c: BigRational,
    pub deltas: Vec<BigRational>,
}

/// Solves the triangular matching conditions for the kernel parameters.
///
/// `c = -(a+b)/2`, then for `j = 1..n-1`
/// `delta_{n-1-j} = (-1)^(j+1) w_j^a - (a+c)^(j+1)/(j+1)! - sum_{i=1}^{j-1} delta_{i+n-1-j} a^i / i!`.
pub fn solve_params(n: usize, a: &BigRational, b: &BigRational) -> Result<KernelParams> {
    let rule = compute_weights(n, a, b)?;
    let c = -(a + b) / BigRational::from_integer(2.into());
    let a_plus_c = a + &c;
    let mut deltas = alloc::vec![BigRational::zero(); n.saturating_sub(1)];
    for j in 1..n {
        let signed_w = if j % 2 == 1 {
            rule.w_a()[j].clone()
        } else {
            -&rule.w_a()[j]
        };
        let mut value = signed_w - rpow(&a_plus_c, j + 1) / BigRational::from_integer(factorial(j + 1));
        for i in 1..j {
            value -= &deltas[i + n - 1 - j] * rpow(a, i) / BigRational::from_integer(factorial(i));
        }
        deltas[n - 1 - j] = value;
    }
    Ok(KernelParams { n, c, deltas })
}

/// `K_n(x) = (x+c)^n/n! + sum_i delta_i x^i/i!`.
pub fn kernel_from_params(params: &KernelParams) -> Polynomial {
    let shift = Polynomial::new(alloc::vec![params.c.clone(), BigRational::one()]);
    let lead = shift
        .pow(params.n)
        .scale(&(BigRational::one() / BigRational::from_integer(factorial(params.n))));
    let tail = Polynomial::new(
        params
            .deltas
            .iter()
            .enumerate()
            .map(|(i, d)| d / BigRational::from_integer(factorial(i)))
            .collect(),
    );
    &lead + &tail
}

/// `(x-a)^n (x-b)^n / (2n)!`, the `n`-th antiderivative of the matched kernel.
fn node_polynomial(n: usize, a: &BigRational, b: &BigRational) -> Polynomial {
    (&Polynomial::linear_factor(a).pow(n) * &Polynomial::linear_factor(b).pow(n))
        .scale(&(BigRational::one() / BigRational::from_integer(factorial(2 * n))))
}

/// `K_n = 1/(2n)! d^n/dx^n [(x-a)^n (x-b)^n]`.
pub fn rodrigues_kernel(n: usize, a: &BigRational, b: &BigRational) -> Result<Polynomial> {
    check_order(n)?;
    check_interval(a, b)?;
    Ok(node_polynomial(n, a, b).derivative(n))
}

/// `K^1..K^n` with `K^j(x) = ∫_a^x K^{j-1}`.
pub fn antiderivative_chain(kernel: &Polynomial, a: &BigRational, n: usize) -> Vec<Polynomial> {
    let mut chain: Vec<Polynomial> = Vec::with_capacity(n);
    for j in 0..n {
        let prev = if j == 0 { kernel } else { &chain[j - 1] };
        let next = prev.antiderivative(a);
        chain.push(next);
    }
    chain
}

/// Peano kernel of the rule,
/// `(b-x)^{2n}/(2n)! - sum_k w_k^b (b-x)^{2n-1-k}/(2n-1-k)!`.
pub fn peano_kernel(rule: &HermiteRule) -> Polynomial {
    let n = rule.n();
    let b_minus_x = Polynomial::new(alloc::vec![rule.b().clone(), -BigRational::one()]);
    let inv_fact = |k: usize| BigRational::one() / BigRational::from_integer(factorial(k));
    let mut k_poly = b_minus_x.pow(2 * n).scale(&inv_fact(2 * n));
    for (k, w) in rule.w_b().iter().enumerate() {
        let power = 2 * n - 1 - k;
        k_poly = &k_poly - &b_minus_x.pow(power).scale(&(w * inv_fact(power)));
    }
    k_poly
}

/// Exact `∫_a^b K(x)^2 dx`.
pub fn kernel_l2sq(kernel: &Polynomial, a: &BigRational, b: &BigRational) -> BigRational {
    (kernel * kernel).definite_integral(a, b)
}

/// `∫|K|` together with the number of sign changes found in `(a, b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsIntegral {
    pub value: f64,
    pub sign_changes: usize,
}

fn sign_at(p: &Polynomial, x: &BigRational) -> Ordering {
    p.eval(x).cmp(&BigRational::zero())
}

/// Points in `(a, b)` where `p` changes sign (or vanishes at a scan node),
/// found from a uniform scan with `cells` cells.
fn scan_roots(p: &Polynomial, a: &BigRational, b: &BigRational, cells: usize, width: &BigRational) -> Vec<BigRational> {
    let step = (b - a) / BigRational::from_integer(cells.into());
    let mut roots = Vec::new();
    let mut prev_x = a.clone();
    let mut prev_sign = sign_at(p, a);
    for i in 1..=cells {
        let x = if i == cells {
            b.clone()
        } else {
            a + &step * BigRational::from_integer(i.into())
        };
        let s = sign_at(p, &x);
        if s == Ordering::Equal {
            if i < cells {
                roots.push(x.clone());
            }
        } else if prev_sign != Ordering::Equal && s != prev_sign {
            roots.push(bisect(p, prev_x.clone(), x.clone(), prev_sign, width));
        }
        prev_x = x;
        prev_sign = s;
    }
    roots
}

fn bisect(
    p: &Polynomial,
    mut lo: BigRational,
    mut hi: BigRational,
    lo_sign: Ordering,
    width: &BigRational,
) -> BigRational {
    let two = BigRational::from_integer(2.into());
    while &(&hi - &lo) > width {
        // round the midpoint to a double to keep denominators small
        let exact_mid = (&lo + &hi) / &two;
        let mid = from_f64(to_f64(&exact_mid))
            .filter(|m| m > &lo && m < &hi)
            .unwrap_or(exact_mid);
        match sign_at(p, &mid) {
            Ordering::Equal => return mid,
            s if s == lo_sign => lo = mid,
            _ => hi = mid,
        }
        if to_f64(&lo) == to_f64(&hi) {
            break;
        }
    }
    (lo + hi) / two
}

/// `∫_a^b |K(x)| dx` to relative accuracy `tol`.
///
/// Sign changes are located on a uniform grid of `8 * deg` cells with exact
/// sign evaluation and refined by bisection; the scan is repeated on a doubled
/// grid and both must agree on the root count. Between roots the exact
/// antiderivative is evaluated at the (rational) root approximations, so the
/// only inexactness is the root placement.
pub fn kernel_abs_integral(kernel: &Polynomial, a: &BigRational, b: &BigRational, tol: f64) -> Result<AbsIntegral> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance);
    }
    check_interval(a, b)?;
    let Some(deg) = kernel.degree() else {
        return Ok(AbsIntegral {
            value: 0.0,
            sign_changes: 0,
        });
    };
    let len = b - a;
    let rel = from_f64(tol.min(1e-14)).unwrap_or_else(BigRational::zero);
    let scale = a.abs().max(b.abs()).max(len.clone());
    let width = &rel * &scale;

    let mut cells = 8 * deg.max(1);
    let mut roots = scan_roots(kernel, a, b, cells, &width);
    let mut stable = false;
    for _ in 0..6 {
        cells *= 2;
        let finer = scan_roots(kernel, a, b, cells, &width);
        let same = finer.len() == roots.len();
        roots = finer;
        if same {
            stable = true;
            break;
        }
    }
    if !stable || roots.len() > deg {
        return Err(Error::RootIsolation(format!(
            "found {} sign changes for a degree-{deg} polynomial on [{a}, {b}]",
            roots.len()
        )));
    }

    let anti = kernel.antiderivative(a);
    let mut total = BigRational::zero();
    let mut left = BigRational::zero();
    for x in roots.iter().chain(core::iter::once(b)) {
        let right = anti.eval(x);
        total += (&right - &left).abs();
        left = right;
    }
    Ok(AbsIntegral {
        value: to_f64(&total),
        sign_changes: roots.len(),
    })
}

/// The matched kernel on `[a, b]` together with its antiderivative chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSet {
    n: usize,
    a: BigRational,
    b: BigRational,
    params: KernelParams,
    levels: Vec<Polynomial>,
}

impl KernelSet {
    /// Builds the kernel from the matched parameters and integrates it `n` times.
    pub fn new(n: usize, a: &BigRational, b: &BigRational) -> Result<Self> {
        let params = solve_params(n, a, b)?;
        let kernel = kernel_from_params(&params);
        let mut levels = Vec::with_capacity(n + 1);
        levels.push(kernel.clone());
        levels.extend(antiderivative_chain(&kernel, a, n));
        Ok(Self {
            n,
            a: a.clone(),
            b: b.clone(),
            params,
            levels,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn kernel(&self) -> &Polynomial {
        &self.levels[0]
    }

    /// `K^j`, with `K^0 = K`. `None` for `j > n`.
    pub fn level(&self, j: usize) -> Option<&Polynomial> {
        self.levels.get(j)
    }

    /// `K^1..K^n`.
    pub fn antiderivatives(&self) -> &[Polynomial] {
        &self.levels[1..]
    }

    pub fn l2sq(&self, j: usize) -> Option<BigRational> {
        self.level(j).map(|k| kernel_l2sq(k, &self.a, &self.b))
    }

    pub fn abs_integral(&self, j: usize, tol: f64) -> Result<AbsIntegral> {
        let k = self.level(j).ok_or(Error::InvalidKernelLevel { level: j, n: self.n })?;
        kernel_abs_integral(k, &self.a, &self.b, tol)
    }

    /// Checks that `K^n` is `(x-a)^n (x-b)^n / (2n)!`.
    pub fn closes_to_node_polynomial(&self) -> bool {
        self.levels[self.n] == node_polynomial(self.n, &self.a, &self.b)
    }
}

impl core::fmt::Display for KernelParams {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "c = {}", self.c)?;
        for (i, d) in self.deltas.iter().enumerate() {
            write!(f, ", delta_{i} = {d}")?;
        }
        Ok(())
    }
}
