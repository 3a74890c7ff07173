use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

/// Truncated Taylor expansion `t_0 + t_1 (x-x0) + ... + t_m (x-x0)^m`.
///
/// Coefficients are stored instead of derivatives so high orders do not
/// overflow; `f^(k)(x0) = k! * t_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorJet {
    coeffs: Vec<f64>,
}

impl TaylorJet {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet has at least one coefficient");
        Self { coeffs }
    }

    /// Jet of the derivative values `f(x0), f'(x0), ..., f^(m)(x0)`.
    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The independent variable expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut jet = Self::constant(x0, order);
        if order >= 1 {
            jet.coeffs[1] = 1.0;
        }
        jet
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k! * t_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (2..=k).map(|i| i as f64).product();
        self.coeffs[k] * fact
    }

    pub fn derivatives(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.derivative(k)).collect()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let m = self.order().min(other.order());
        Self {
            coeffs: (0..=m).map(|k| op(self.coeffs[k], other.coeffs[k])).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Quotient by a jet with nonzero constant term; `None` otherwise.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let b0 = other.coeffs[0];
        if b0 == 0.0 {
            return None;
        }
        let m = self.order().min(other.order());
        let mut q = vec![0.0; m + 1];
        for k in 0..=m {
            let acc: f64 = (0..k).map(|j| q[j] * other.coeffs[k - j]).sum();
            q[k] = (self.coeffs[k] - acc) / b0;
        }
        Some(Self { coeffs: q })
    }

    pub fn exp(&self) -> Self {
        let m = self.order();
        let mut e = vec![0.0; m + 1];
        e[0] = libm::exp(self.coeffs[0]);
        for k in 1..=m {
            let acc: f64 = (1..=k).map(|j| j as f64 * self.coeffs[j] * e[k - j]).sum();
            e[k] = acc / k as f64;
        }
        Self { coeffs: e }
    }

    /// Natural log; `None` unless the constant term is positive.
    pub fn checked_ln(&self) -> Option<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return None;
        }
        let m = self.order();
        let mut l = vec![0.0; m + 1];
        l[0] = libm::log(a0);
        for k in 1..=m {
            let acc: f64 = (1..k).map(|j| j as f64 * l[j] * self.coeffs[k - j]).sum();
            l[k] = (self.coeffs[k] - acc / k as f64) / a0;
        }
        Some(Self { coeffs: l })
    }

    /// Square root; `None` unless the constant term is positive.
    pub fn checked_sqrt(&self) -> Option<Self> {
        let a0 = self.coeffs[0];
        if !(a0 > 0.0) {
            return None;
        }
        let m = self.order();
        let mut r = vec![0.0; m + 1];
        r[0] = libm::sqrt(a0);
        for k in 1..=m {
            let acc: f64 = (1..k).map(|j| r[j] * r[k - j]).sum();
            r[k] = (self.coeffs[k] - acc) / (2.0 * r[0]);
        }
        Some(Self { coeffs: r })
    }

    /// `(sin, cos)` of the jet.
    pub fn sin_cos(&self) -> (Self, Self) {
        let m = self.order();
        let mut s = vec![0.0; m + 1];
        let mut c = vec![0.0; m + 1];
        s[0] = libm::sin(self.coeffs[0]);
        c[0] = libm::cos(self.coeffs[0]);
        for k in 1..=m {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                let w = j as f64 * self.coeffs[j];
                acc_s += w * c[k - j];
                acc_c += w * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = -acc_c / k as f64;
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }

    /// Integer power by repeated squaring. Negative powers need a nonzero
    /// constant term.
    pub fn checked_powi(&self, exp: i64) -> Option<Self> {
        let mut acc = Self::constant(1.0, self.order());
        let mut base = self.clone();
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        if exp < 0 {
            Self::constant(1.0, self.order()).checked_div(&acc)
        } else {
            Some(acc)
        }
    }
}

impl Add for &TaylorJet {
    type Output = TaylorJet;

    fn add(self, rhs: &TaylorJet) -> TaylorJet {
        self.zip_with(rhs, |x, y| x + y)
    }
}

impl Sub for &TaylorJet {
    type Output = TaylorJet;

    fn sub(self, rhs: &TaylorJet) -> TaylorJet {
        self.zip_with(rhs, |x, y| x - y)
    }
}

/// Cauchy product, truncated to the shorter order.
impl Mul for &TaylorJet {
    type Output = TaylorJet;

    fn mul(self, rhs: &TaylorJet) -> TaylorJet {
        let m = self.order().min(rhs.order());
        TaylorJet {
            coeffs: (0..=m)
                .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
                .collect(),
        }
    }
}

impl Neg for &TaylorJet {
    type Output = TaylorJet;

    fn neg(self) -> TaylorJet {
        self.scale(-1.0)
    }
}
