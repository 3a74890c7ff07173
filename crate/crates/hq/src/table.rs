//! Composite error tables.

use hq_core::quadrature::DerivativeSamples;
use hq_core::{
    bound_l2, bound_uniform, integrate_composite, reference_integrate, IntervalKernel, JetProvider, OracleConfig,
    Partition,
};

use crate::format::ErrorTableRow;

/// Panel counts `1, 2, 4, ...` up to `m`, with `m` itself appended when it is
/// not a power of two.
pub fn doubling_sequence(m: usize) -> Vec<usize> {
    let mut seq: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2))
        .take_while(|&k| k <= m)
        .collect();
    if seq.last() != Some(&m) && m > 0 {
        seq.push(m);
    }
    seq
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableOptions {
    /// Derivative order feeding the bounds; `None` disables them.
    pub bound_order: Option<usize>,
    pub samples_per_panel: usize,
    pub oracle: OracleConfig,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            bound_order: None,
            samples_per_panel: 257,
            oracle: OracleConfig::default(),
        }
    }
}

/// Sum of per-panel sampled bounds on a uniform partition.
pub fn composite_bounds<P: JetProvider + ?Sized>(
    f: &P,
    kernel: &IntervalKernel,
    partition: &Partition<f64>,
    order: usize,
    samples: usize,
) -> hq_core::Result<(f64, f64)> {
    let mut total = (0.0, 0.0);
    for w in partition.nodes().windows(2) {
        let panel = kernel.rescaled(w[0], w[1])?;
        let s = DerivativeSamples::from_provider(f, order, w[0], w[1], samples)?;
        total.0 += bound_uniform(&s, &panel)?;
        total.1 += bound_l2(&s, &panel)?;
    }
    Ok(total)
}

/// One row per panel count; `error = reference - quadrature` and the observed
/// order compares each row with the previous one.
pub fn error_table<P: JetProvider + ?Sized>(
    f: &P,
    n: usize,
    a: f64,
    b: f64,
    counts: &[usize],
    opts: &TableOptions,
) -> hq_core::Result<Vec<ErrorTableRow>> {
    let reference = reference_integrate(|x| f.value(x).unwrap_or(f64::NAN), a, b, &opts.oracle)?.converged_value()?;
    let kernel = match opts.bound_order {
        Some(_) => Some(IntervalKernel::new(n, a, b)?),
        None => None,
    };
    let mut rows: Vec<ErrorTableRow> = Vec::with_capacity(counts.len());
    for &m in counts {
        let partition = Partition::uniform(a, b, m)?;
        let quadrature = integrate_composite(f, n, &partition)?;
        let error = reference - quadrature;
        let observed_order = rows.last().and_then(|prev| {
            let r = (prev.error / error).abs();
            (r.is_finite() && r > 0.0 && error != 0.0).then(|| r.ln() / (m as f64 / prev.m as f64).ln())
        });
        let bounds = match (opts.bound_order, &kernel) {
            (Some(order), Some(k)) => Some(composite_bounds(f, k, &partition, order, opts.samples_per_panel)?),
            _ => None,
        };
        rows.push(ErrorTableRow {
            n,
            m,
            h: (b - a) / m as f64,
            quadrature,
            reference,
            error,
            observed_order,
            bound_uniform: bounds.map(|x| x.0),
            bound_l2: bounds.map(|x| x.1),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hq_core::parse;

    #[test]
    fn sequences() {
        assert_eq!(doubling_sequence(1), vec![1]);
        assert_eq!(doubling_sequence(8), vec![1, 2, 4, 8]);
        assert_eq!(doubling_sequence(12), vec![1, 2, 4, 8, 12]);
        assert!(doubling_sequence(0).is_empty());
    }

    #[test]
    fn exp_table_converges_at_order_2n() {
        let f = parse("exp(x)").unwrap();
        for n in 1..=3 {
            let opts = TableOptions {
                bound_order: Some(n),
                ..TableOptions::default()
            };
            let rows = error_table(&f, n, 0.0, 1.0, &[2, 4, 8, 16, 32], &opts).unwrap();
            assert!(rows[0].observed_order.is_none());
            let last = rows.last().unwrap();
            assert!((last.observed_order.unwrap() - 2.0 * n as f64).abs() < 0.15, "{rows:?}");
            for r in &rows {
                assert!(
                    r.error.abs() <= r.bound_uniform.unwrap() && r.error.abs() <= r.bound_l2.unwrap(),
                    "{r:?}"
                );
            }
        }
    }
}
