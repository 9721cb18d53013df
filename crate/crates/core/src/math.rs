//! Small numeric helpers shared across the crate.

/// log(exp(a) + exp(b)) without overflow.
///
/// Works from the larger argument so the exponent is never positive; returns
/// negative infinity only when both inputs are negative infinity.
#[inline]
pub fn log_sum_exp2(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        b
    } else if b == f64::NEG_INFINITY {
        a
    } else if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// log-sum-exp over a slice, streaming over [`log_sum_exp2`] pairs.
#[inline]
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut acc = f64::NEG_INFINITY;
    for &x in xs {
        acc = log_sum_exp2(acc, x);
    }
    acc
}

/// ln(1 + exp(x)) without overflow for large |x|.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Maclaurin series for erf(x), used for |x| < 1 where no cancellation
/// amplification occurs: erf(x) = 2/sqrt(pi) sum_n (-1)^n x^{2n+1} / (n! (2n+1)).
fn erf_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let x2 = x * x;
    let mut pow = x; // x^{2n+1} / n!
    let mut sum = x;
    let mut n = 1.0;
    while n < 200.0 {
        pow *= -x2 / n;
        let term = pow / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

/// Continued fraction for sqrt(pi) e^{x^2} erfc(x), valid for x >= 1:
/// 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...))))), evaluated by
/// modified Lentz.
fn erfcx_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    for j in 1..400 {
        let a = if j == 1 { 1.0 } else { (j - 1) as f64 / 2.0 };
        d = x + a * d;
        if d == 0.0 {
            d = tiny;
        }
        c = x + a / c;
        if c == 0.0 {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f / std::f64::consts::PI.sqrt()
}

/// Complementary error function, ~1e-15 relative accuracy.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < 1.0 {
        1.0 - erf_series(x)
    } else {
        erfcx_cf(x) * (-x * x).exp()
    }
}

/// Scaled complementary error function e^{x^2} erfc(x) for x >= 0.
///
/// Avoids the overflow/underflow pair in the naive product. Used for
/// threshold-conditioned error rates where erfc terms carry e^{+gamma_t/gbar}
/// prefactors.
pub fn erfcx(x: f64) -> f64 {
    assert!(x >= 0.0, "erfcx domain here is x >= 0");
    if x < 1.0 {
        (x * x).exp() * (1.0 - erf_series(x))
    } else {
        erfcx_cf(x)
    }
}

/// Composite Simpson quadrature of `f` on [a, b] with `n` panels (n even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n.is_multiple_of(2), "simpson needs an even panel count");
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}
