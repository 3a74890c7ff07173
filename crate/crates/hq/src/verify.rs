//! Exact identity suite for one order and interval.

use hq_core::exactmath::{factorial, rpow};
use hq_core::{
    compute_weights, kernel_from_params, peano_kernel, ratio, rodrigues_kernel, BigRational, KernelSet, Polynomial,
};
use num_traits::Zero;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

fn int(v: i64) -> BigRational {
    ratio(v, 1)
}

/// Closed-form parameters that hold for every `n` large enough:
/// `c`, `delta_{n-2}`, `delta_{n-3}` and `delta_{n-4}`.
pub fn closed_form_params(n: usize, a: &BigRational, b: &BigRational) -> Vec<(String, usize, BigRational)> {
    let h = b - a;
    let h2 = &h * &h;
    let s = a + b;
    let nn = int(n as i64);
    let mut out = Vec::new();
    if n >= 2 {
        out.push(("delta_{n-2}".into(), n - 2, -&h2 / (int(8) * (int(2) * &nn - int(1)))));
    }
    if n >= 3 {
        out.push((
            "delta_{n-3}".into(),
            n - 3,
            &s * &h2 / (int(16) * (int(2) * &nn - int(1))),
        ));
    }
    if n >= 4 {
        let num = &h2 * (&h2 + (int(6) - int(4) * &nn) * &s * &s);
        let den = int(128) * (int(2) * &nn - int(3)) * (int(2) * &nn - int(1));
        out.push(("delta_{n-4}".into(), n - 4, num / den));
    }
    out
}

/// Runs every exact identity for order `n` on `[a, b]`.
pub fn identity_suite(n: usize, a: &BigRational, b: &BigRational) -> hq_core::Result<Vec<Check>> {
    let set = KernelSet::new(n, a, b)?;
    verify_set(&set)
}

pub fn verify_set(set: &KernelSet) -> hq_core::Result<Vec<Check>> {
    let (n, a, b) = (set.n(), set.a(), set.b());
    let rule = compute_weights(n, a, b)?;
    let from_params = kernel_from_params(set.params());
    let rodrigues = rodrigues_kernel(n, a, b)?;
    let peano = peano_kernel(&rule);
    let mut checks = Vec::new();

    checks.push(Check::new(
        "rodrigues",
        from_params == rodrigues,
        format!("K_n = {from_params}"),
    ));
    checks.push(Check::new(
        "peano",
        set.level(n) == Some(&peano) && peano.derivative(n) == from_params,
        "K_n^n equals the Peano kernel and its n-th derivative is K_n",
    ));
    checks.push(Check::new(
        "node-polynomial",
        set.closes_to_node_polynomial(),
        "K_n^n = (x-a)^n (x-b)^n / (2n)!",
    ));

    let bad_moment = (0..n).find(|&m| {
        !(&Polynomial::monomial(m) * &from_params)
            .definite_integral(a, b)
            .is_zero()
    });
    checks.push(Check::new(
        "orthogonality",
        bad_moment.is_none(),
        match bad_moment {
            Some(m) => format!("moment {m} does not vanish"),
            None => format!("moments 0..{} vanish", n - 1),
        },
    ));

    let mirrored = from_params.compose_affine(&(a + b), &int(-1));
    let sign = if n % 2 == 0 { int(1) } else { int(-1) };
    checks.push(Check::new(
        "symmetry",
        (&mirrored - &from_params.scale(&sign)).is_zero(),
        "K_n(a+b-x) = (-1)^n K_n(x)",
    ));

    let params = set.params();
    checks.push(Check::new(
        "table:c",
        params.c == -(a + b) / int(2),
        format!("c = {}", params.c),
    ));
    for (name, idx, want) in closed_form_params(n, a, b) {
        let got = &params.deltas[idx];
        checks.push(Check::new(
            format!("table:{name}"),
            got == &want,
            format!("{got} (closed form {want})"),
        ));
    }

    let bad_degree = (0..2 * n).find(|&d| {
        let p = Polynomial::monomial(d);
        let q = rule
            .apply_exact(&p.derivatives_at(a, n), &p.derivatives_at(b, n))
            .expect("jets have n entries");
        q != p.definite_integral(a, b)
    });
    checks.push(Check::new(
        "exactness",
        bad_degree.is_none(),
        match bad_degree {
            Some(d) => format!("x^{d} is not integrated exactly"),
            None => format!("x^0..x^{} integrated exactly", 2 * n - 1),
        },
    ));

    // E(x^(2n)) = (2n)! ∫ K_n^n
    let top = Polynomial::monomial(2 * n);
    let q = rule
        .apply_exact(&top.derivatives_at(a, n), &top.derivatives_at(b, n))
        .expect("jets have n entries");
    let err = top.definite_integral(a, b) - q;
    let predicted =
        set.level(n).expect("level n").definite_integral(a, b) * BigRational::from_integer(factorial(2 * n));
    checks.push(Check::new(
        "first-failure",
        err == predicted,
        format!("E(x^{}) = {err}", 2 * n),
    ));

    let beta = rpow(&(b - a), 2 * n + 1)
        * BigRational::new(factorial(n) * factorial(n), factorial(2 * n + 1))
        * if n % 2 == 0 { int(1) } else { int(-1) };
    checks.push(Check::new(
        "first-failure-closed-form",
        err == beta,
        "(-1)^n n! n! (b-a)^(2n+1) / (2n+1)!",
    ));
    Ok(checks)
}
