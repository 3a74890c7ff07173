//! The two-point Hermite interpolant assembled from endpoint jets.
//!
//! ```text
//! H_n(x) = (x-a)^n sum_k B_k (x-b)^k / k!  +  (x-b)^n sum_k A_k (x-a)^k / k!
//! A_k = d^k/dx^k [f(x) / (x-b)^n] at a,   B_k = d^k/dx^k [f(x) / (x-a)^n] at b
//! ```
//!
//! `A_k` and `B_k` are expanded with the Leibniz rule so only the jets are needed.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::exactmath::{binomial, factorial, from_f64, rpow, BigInt, BigRational, Polynomial};
use crate::weights::{check_interval, check_order};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `A_k`, expansion around `a`.
    AtA,
    /// `B_k`, expansion around `b`.
    AtB,
}

/// Endpoint data `f^(j)(a)`, `f^(j)(b)` for `j = 0..n-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPair {
    a: BigRational,
    b: BigRational,
    jet_a: Vec<BigRational>,
    jet_b: Vec<BigRational>,
}

impl JetPair {
    pub fn new(a: BigRational, b: BigRational, jet_a: Vec<BigRational>, jet_b: Vec<BigRational>) -> Result<Self> {
        check_order(jet_a.len())?;
        if jet_b.len() != jet_a.len() {
            return Err(Error::JetLength {
                expected: jet_a.len(),
                got: jet_b.len(),
            });
        }
        check_interval(&a, &b)?;
        Ok(Self { a, b, jet_a, jet_b })
    }

    /// Float jets are taken at their exact binary value, so the construction
    /// itself stays exact.
    pub fn from_f64(a: f64, b: f64, jet_a: &[f64], jet_b: &[f64]) -> Result<Self> {
        let conv = |x: f64| {
            from_f64(x).ok_or(Error::Domain {
                expr: alloc::format!("{x}"),
                reason: "non-finite jet entry",
            })
        };
        let jets = |v: &[f64]| v.iter().map(|&x| conv(x)).collect::<Result<Vec<_>>>();
        Self::new(conv(a)?, conv(b)?, jets(jet_a)?, jets(jet_b)?)
    }

    /// Jets of an exact polynomial.
    pub fn of_polynomial(p: &Polynomial, n: usize, a: BigRational, b: BigRational) -> Result<Self> {
        let jet_a = p.derivatives_at(&a, n);
        let jet_b = p.derivatives_at(&b, n);
        Self::new(a, b, jet_a, jet_b)
    }

    pub fn n(&self) -> usize {
        self.jet_a.len()
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn jet_a(&self) -> &[BigRational] {
        &self.jet_a
    }

    pub fn jet_b(&self) -> &[BigRational] {
        &self.jet_b
    }
}

/// `A_0..A_{n-1}` (side `AtA`) or `B_0..B_{n-1}` (side `AtB`).
pub fn leibniz_coeffs(side: Side, pair: &JetPair) -> Vec<BigRational> {
    let n = pair.n();
    let (jet, gap) = match side {
        Side::AtA => (&pair.jet_a, &pair.a - &pair.b),
        Side::AtB => (&pair.jet_b, &pair.b - &pair.a),
    };
    let fact_n1 = factorial(n - 1);
    (0..n)
        .map(|k| {
            (0..=k).fold(BigRational::zero(), |acc, j| {
                let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
                let num = binomial(k, j) * factorial(n + k - j - 1) * BigInt::from(sign);
                let term = BigRational::new(num, fact_n1.clone()) / rpow(&gap, n + k - j);
                acc + term * &jet[j]
            })
        })
        .collect()
}

/// Exact Hermite interpolant; its degree is at most `2n - 1`.
pub fn build_hermite(pair: &JetPair) -> Result<Polynomial> {
    let n = pair.n();
    let from_a = Polynomial::linear_factor(&pair.a);
    let from_b = Polynomial::linear_factor(&pair.b);
    let a_coeffs = leibniz_coeffs(Side::AtA, pair);
    let b_coeffs = leibniz_coeffs(Side::AtB, pair);

    let series = |coeffs: &[BigRational], base: &Polynomial| {
        coeffs.iter().enumerate().fold(Polynomial::zero(), |acc, (k, c)| {
            let scaled = c / BigRational::from_integer(factorial(k));
            &acc + &base.pow(k).scale(&scaled)
        })
    };
    let h = &(&from_a.pow(n) * &series(&b_coeffs, &from_b)) + &(&from_b.pow(n) * &series(&a_coeffs, &from_a));
    debug_assert!(h.degree().is_none_or(|d| d < 2 * n));
    Ok(h)
}
