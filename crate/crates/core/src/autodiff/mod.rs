//! Expression parsing and Taylor-mode differentiation of integrands.

mod expr;
mod jet;

pub use expr::{parse, BinOp, Expr, Func, ParseError};
pub use jet::TaylorJet;

use crate::exactmath::Polynomial;
use crate::Result;

/// Highest supported jet order.
pub const MAX_JET_ORDER: usize = 128;

/// Anything that can produce Taylor jets of an integrand.
pub trait JetProvider {
    /// Jet of degree `order` at `x`.
    fn jet(&self, x: f64, order: usize) -> Result<TaylorJet>;

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.jet(x, 0)?.value())
    }
}

impl JetProvider for Expr {
    fn jet(&self, x: f64, order: usize) -> Result<TaylorJet> {
        Expr::jet(self, x, order)
    }

    fn value(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }
}

/// Float jets of an exact polynomial (coefficients rounded once).
impl JetProvider for Polynomial {
    fn jet(&self, x: f64, order: usize) -> Result<TaylorJet> {
        let mut work: alloc::vec::Vec<f64> = self.to_f64().coeffs().to_vec();
        let mut coeffs = alloc::vec![0.0; order + 1];
        // repeated synthetic division by (t - x): remainders are Taylor coefficients
        for slot in coeffs.iter_mut() {
            if work.is_empty() {
                break;
            }
            let mut quotient = alloc::vec![0.0; work.len() - 1];
            let mut acc = 0.0;
            for i in (0..work.len()).rev() {
                acc = work[i] + acc * x;
                if i > 0 {
                    quotient[i - 1] = acc;
                }
            }
            *slot = acc;
            work = quotient;
        }
        Ok(TaylorJet::from_coeffs(coeffs))
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.to_f64().eval(x))
    }
}

/// Adapts a closure `(x, order) -> jet` to [`JetProvider`].
pub struct JetFn<F>(pub F);

impl<F> JetProvider for JetFn<F>
where
    F: Fn(f64, usize) -> Result<TaylorJet>,
{
    fn jet(&self, x: f64, order: usize) -> Result<TaylorJet> {
        (self.0)(x, order)
    }
}

impl<T: JetProvider + ?Sized> JetProvider for &T {
    fn jet(&self, x: f64, order: usize) -> Result<TaylorJet> {
        (**self).jet(x, order)
    }

    fn value(&self, x: f64) -> Result<f64> {
        (**self).value(x)
    }
}
