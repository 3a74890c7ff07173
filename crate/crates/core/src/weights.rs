//! Closed-form Hermite quadrature weights.
//!
//! For order `n` on `[a, b]` with `h = b - a`,
//!
//! ```text
//! w_j^a = h^(j+1) * omega_j,   w_j^b = (-1)^j * w_j^a,
//! omega_j = n * sum_{k=j}^{n-1} C(k, j) (n+k-j-1)! / (n+k+1)!
//! ```
//!
//! and the rule reads `sum_j w_j^a f^(j)(a) + w_j^b f^(j)(b)`.

use alloc::string::ToString;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::autodiff::TaylorJet;
use crate::exactmath::{binomial, factorial, rpow, to_f64, BigRational};
use crate::{Error, Result};

/// Default cap on the rule order. Factorials and kernel degrees grow with `n`;
/// callers may raise the cap explicitly.
pub const DEFAULT_MAX_ORDER: usize = 64;

pub(crate) fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidOrder(n))
    } else {
        Ok(())
    }
}

/// Rejects `n` above `cap` as well as `n == 0`.
pub fn check_order_cap(n: usize, cap: usize) -> Result<()> {
    check_order(n)?;
    if n > cap {
        return Err(Error::OrderTooLarge { n, cap });
    }
    Ok(())
}

pub(crate) fn check_interval(a: &BigRational, b: &BigRational) -> Result<()> {
    if a < b {
        Ok(())
    } else {
        Err(Error::InvalidInterval {
            a: a.to_string(),
            b: b.to_string(),
        })
    }
}

/// Interval-free weights `omega_0 .. omega_{n-1}`.
pub fn omega_coeffs(n: usize) -> Result<Vec<BigRational>> {
    check_order(n)?;
    let omegas = (0..n)
        .map(|j| {
            let sum = (j..n).fold(BigRational::zero(), |acc, k| {
                acc + BigRational::new(binomial(k, j) * factorial(n + k - j - 1), factorial(n + k + 1))
            });
            sum * BigRational::from_integer(n.into())
        })
        .collect();
    Ok(omegas)
}

/// An order-`n` two-point Hermite rule on `[a, b]` with exact weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteRule {
    n: usize,
    a: BigRational,
    b: BigRational,
    w_a: Vec<BigRational>,
    w_b: Vec<BigRational>,
}

/// Builds the order-`n` rule on `[a, b]`.
pub fn compute_weights(n: usize, a: &BigRational, b: &BigRational) -> Result<HermiteRule> {
    check_interval(a, b)?;
    let h = b - a;
    let w_a: Vec<BigRational> = omega_coeffs(n)?
        .into_iter()
        .enumerate()
        .map(|(j, omega)| omega * rpow(&h, j + 1))
        .collect();
    let w_b = mirror_weights(&w_a);
    Ok(HermiteRule {
        n,
        a: a.clone(),
        b: b.clone(),
        w_a,
        w_b,
    })
}

fn mirror_weights(w_a: &[BigRational]) -> Vec<BigRational> {
    w_a.iter()
        .enumerate()
        .map(|(j, w)| if j % 2 == 0 { w.clone() } else { -w })
        .collect()
}

impl HermiteRule {
    /// Reassembles a rule from serialized parts, checking its invariants
    /// (`a < b`, `n` weights per side, mirrored signs, `w_a[0] + w_b[0] = b - a`).
    pub fn from_parts(
        n: usize,
        a: BigRational,
        b: BigRational,
        w_a: Vec<BigRational>,
        w_b: Vec<BigRational>,
    ) -> Result<Self> {
        check_order(n)?;
        check_interval(&a, &b)?;
        if w_a.len() != n || w_b.len() != n {
            return Err(Error::InconsistentRule("weight vectors must have length n"));
        }
        if mirror_weights(&w_a) != w_b {
            return Err(Error::InconsistentRule("w_b[j] must equal (-1)^j w_a[j]"));
        }
        if &w_a[0] + &w_b[0] != &b - &a {
            return Err(Error::InconsistentRule("w_a[0] + w_b[0] must equal b - a"));
        }
        Ok(Self { n, a, b, w_a, w_b })
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

    pub fn w_a(&self) -> &[BigRational] {
        &self.w_a
    }

    pub fn w_b(&self) -> &[BigRational] {
        &self.w_b
    }

    /// Weights rounded to doubles.
    pub fn float_weights(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.w_a.iter().map(to_f64).collect(),
            self.w_b.iter().map(to_f64).collect(),
        )
    }

    /// Applies the rule to exact derivative values `f^(j)(a)`, `f^(j)(b)`.
    /// Each slice must hold at least `n` entries; extra entries are ignored.
    pub fn apply_exact(&self, derivs_a: &[BigRational], derivs_b: &[BigRational]) -> Result<BigRational> {
        let have = derivs_a.len().min(derivs_b.len());
        if have < self.n {
            return Err(Error::JetTooShort {
                have: have.saturating_sub(1),
                need: self.n - 1,
            });
        }
        let mut acc = BigRational::zero();
        for j in 0..self.n {
            acc += &self.w_a[j] * &derivs_a[j] + &self.w_b[j] * &derivs_b[j];
        }
        Ok(acc)
    }

    /// Float application to Taylor jets.
    pub fn apply(&self, jet_a: &TaylorJet, jet_b: &TaylorJet) -> Result<f64> {
        let (wa, wb) = self.float_weights();
        apply_float(&wa, &wb, jet_a, jet_b)
    }
}

pub(crate) fn apply_float(wa: &[f64], wb: &[f64], jet_a: &TaylorJet, jet_b: &TaylorJet) -> Result<f64> {
    let n = wa.len();
    let have = jet_a.order().min(jet_b.order());
    if have + 1 < n {
        return Err(Error::JetTooShort { have, need: n - 1 });
    }
    Ok((0..n)
        .map(|j| wa[j] * jet_a.derivative(j) + wb[j] * jet_b.derivative(j))
        .sum())
}

/// `sum_j w_a[j] f^(j)(a) + w_b[j] f^(j)(b)` in floating point.
pub fn apply_rule(rule: &HermiteRule, jet_a: &TaylorJet, jet_b: &TaylorJet) -> Result<f64> {
    rule.apply(jet_a, jet_b)
}

/// `omega_j` as doubles, with `h^(j+1)` factored out.
pub(crate) fn float_omegas(n: usize) -> Result<Vec<f64>> {
    Ok(omega_coeffs(n)?.iter().map(to_f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{ratio, Polynomial};
    use crate::interpolant::{build_hermite, JetPair};
    use alloc::vec;
    use num_traits::One;
    use proptest::prelude::*;

    #[test]
    fn trapezoid_for_order_one() {
        let rule = compute_weights(1, &ratio(-2, 3), &ratio(5, 4)).unwrap();
        let half = ratio(23, 24);
        assert_eq!(rule.w_a(), core::slice::from_ref(&half));
        assert_eq!(rule.w_b(), &[half]);
    }

    #[test]
    fn order_two_unit_interval() {
        let rule = compute_weights(2, &ratio(0, 1), &ratio(1, 1)).unwrap();
        assert_eq!(rule.w_a(), &[ratio(1, 2), ratio(1, 12)]);
        assert_eq!(rule.w_b(), &[ratio(1, 2), ratio(-1, 12)]);
    }

    /// Oracle: integrate the Hermite interpolant of each unit jet.
    fn weights_via_interpolant(n: usize, a: &BigRational, b: &BigRational) -> (Vec<BigRational>, Vec<BigRational>) {
        let zeros = vec![BigRational::zero(); n];
        let mut wa = Vec::new();
        let mut wb = Vec::new();
        for j in 0..n {
            let mut e = zeros.clone();
            e[j] = BigRational::one();
            let ha = build_hermite(&JetPair::new(a.clone(), b.clone(), e.clone(), zeros.clone()).unwrap()).unwrap();
            let hb = build_hermite(&JetPair::new(a.clone(), b.clone(), zeros.clone(), e).unwrap()).unwrap();
            wa.push(ha.definite_integral(a, b));
            wb.push(hb.definite_integral(a, b));
        }
        (wa, wb)
    }

    #[test]
    fn order_three_matches_interpolant_oracle() {
        let (zero, one) = (ratio(0, 1), ratio(1, 1));
        let (wa, wb) = weights_via_interpolant(3, &zero, &one);
        // frozen from the oracle (and an independent moment solve)
        assert_eq!(wa, vec![ratio(1, 2), ratio(1, 10), ratio(1, 120)]);
        assert_eq!(wb, vec![ratio(1, 2), ratio(-1, 10), ratio(1, 120)]);
        let rule = compute_weights(3, &zero, &one).unwrap();
        assert_eq!(rule.w_a(), wa.as_slice());
        assert_eq!(rule.w_b(), wb.as_slice());
    }

    #[test]
    fn closed_form_matches_oracle_on_skewed_interval() {
        let (a, b) = (ratio(-3, 7), ratio(11, 5));
        for n in 1..=7 {
            let (wa, wb) = weights_via_interpolant(n, &a, &b);
            let rule = compute_weights(n, &a, &b).unwrap();
            assert_eq!(rule.w_a(), wa.as_slice(), "n = {n}");
            assert_eq!(rule.w_b(), wb.as_slice(), "n = {n}");
        }
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_coeffs(1).unwrap(), vec![ratio(1, 2)]);
        assert_eq!(omega_coeffs(2).unwrap(), vec![ratio(1, 2), ratio(1, 12)]);
        let (a, b) = (ratio(2, 3), ratio(9, 4));
        let h = &b - &a;
        let rule = compute_weights(2, &a, &b).unwrap();
        for (j, omega) in omega_coeffs(2).unwrap().iter().enumerate() {
            assert_eq!(rule.w_a()[j], omega * rpow(&h, j + 1));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(omega_coeffs(0), Err(Error::InvalidOrder(0)));
        assert!(compute_weights(0, &ratio(0, 1), &ratio(1, 1)).is_err());
        assert!(matches!(
            compute_weights(2, &ratio(1, 1), &ratio(1, 1)),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(compute_weights(2, &ratio(2, 1), &ratio(1, 1)).is_err());
        assert_eq!(
            check_order_cap(65, DEFAULT_MAX_ORDER),
            Err(Error::OrderTooLarge { n: 65, cap: 64 })
        );
        assert!(check_order_cap(64, DEFAULT_MAX_ORDER).is_ok());
    }

    #[test]
    fn quartic_value_and_failure() {
        let rule = compute_weights(2, &ratio(0, 1), &ratio(1, 1)).unwrap();
        let q = Polynomial::monomial(4);
        let da = q.derivatives_at(&ratio(0, 1), 2);
        let db = q.derivatives_at(&ratio(1, 1), 2);
        let value = rule.apply_exact(&da, &db).unwrap();
        assert_eq!(value, ratio(1, 6));
        assert_eq!(ratio(1, 5) - value, ratio(1, 30));
    }

    #[test]
    fn constant_integrand_gives_length() {
        for n in 1..=6 {
            let (a, b) = (ratio(-1, 3), ratio(5, 2));
            let rule = compute_weights(n, &a, &b).unwrap();
            let mut d = vec![BigRational::zero(); n];
            d[0] = BigRational::one();
            assert_eq!(rule.apply_exact(&d, &d).unwrap(), &b - &a);
            let jet = TaylorJet::constant(1.0, n - 1);
            let v = rule.apply(&jet, &jet).unwrap();
            assert!((v - to_f64(&(&b - &a))).abs() < 1e-15);
        }
    }

    #[test]
    fn short_jets_are_rejected() {
        let rule = compute_weights(3, &ratio(0, 1), &ratio(1, 1)).unwrap();
        let short = TaylorJet::constant(1.0, 1);
        assert_eq!(rule.apply(&short, &short), Err(Error::JetTooShort { have: 1, need: 2 }));
        assert!(rule.apply_exact(&[BigRational::one()], &[BigRational::one()]).is_err());
    }

    #[test]
    fn first_failure_degree() {
        // error on x^(2n) equals the exact integral of (x-a)^n (x-b)^n
        let (a, b) = (ratio(-1, 2), ratio(4, 3));
        for n in 1..=6 {
            let rule = compute_weights(n, &a, &b).unwrap();
            let f = Polynomial::monomial(2 * n);
            let err = f.definite_integral(&a, &b)
                - rule
                    .apply_exact(&f.derivatives_at(&a, n), &f.derivatives_at(&b, n))
                    .unwrap();
            let node = &Polynomial::linear_factor(&a).pow(n) * &Polynomial::linear_factor(&b).pow(n);
            assert_eq!(err, node.definite_integral(&a, &b), "n = {n}");
        }
    }

    #[test]
    fn from_parts_validates() {
        let rule = compute_weights(3, &ratio(0, 1), &ratio(2, 1)).unwrap();
        let rebuilt = HermiteRule::from_parts(
            3,
            rule.a().clone(),
            rule.b().clone(),
            rule.w_a().to_vec(),
            rule.w_b().to_vec(),
        )
        .unwrap();
        assert_eq!(rebuilt, rule);
        let mut broken = rule.w_b().to_vec();
        broken[1] = -&broken[1];
        assert!(HermiteRule::from_parts(3, ratio(0, 1), ratio(2, 1), rule.w_a().to_vec(), broken).is_err());
    }

    fn small_rational() -> impl Strategy<Value = BigRational> {
        (-40i64..=40, 1i64..=9).prop_map(|(n, d)| ratio(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn exact_on_low_degree_polynomials(
            n in 1usize..=10,
            coeffs in proptest::collection::vec(small_rational(), 1..=20),
            a in small_rational(),
            len in (1i64..=20, 1i64..=6),
        ) {
            let b = &a + ratio(len.0, len.1);
            let p = Polynomial::new(coeffs.into_iter().take(2 * n).collect());
            let rule = compute_weights(n, &a, &b).unwrap();
            let q = rule.apply_exact(&p.derivatives_at(&a, n), &p.derivatives_at(&b, n)).unwrap();
            prop_assert_eq!(q, p.definite_integral(&a, &b));
        }

        #[test]
        fn affine_covariance(n in 1usize..=8, a in small_rational(), len in (1i64..=20, 1i64..=6)) {
            let h = ratio(len.0, len.1);
            let b = &a + &h;
            let rule = compute_weights(n, &a, &b).unwrap();
            let omegas = omega_coeffs(n).unwrap();
            for (j, omega) in omegas.iter().enumerate() {
                prop_assert_eq!(&rule.w_a()[j], &(omega * rpow(&h, j + 1)));
            }
            prop_assert_eq!(&rule.w_a()[0] + &rule.w_b()[0], h);
        }
    }
}
