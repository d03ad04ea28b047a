//! Normal and chi-squared quantile functions, implemented in-crate so the
//! binaries stay dependency-free on the statistics side.
//!
//! The normal CDF and the chi-squared CDF both route through the regularized
//! incomplete gamma function (series for x < a+1, continued fraction
//! otherwise, per Numerical Recipes). Quantiles start from a closed-form
//! approximation and are polished with Newton steps against those CDFs, so
//! quantile/CDF round-trips hold to well under 1e-8.

use std::f64::consts::PI;

/// ln Γ(z) for z > 0 (Lanczos approximation).
fn ln_gamma(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    const C: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let mut sum = 1.000000000190015;
    for (i, &c) in C.iter().enumerate() {
        sum += c / (z + i as f64 + 1.0);
    }
    let tmp = z + 5.5;
    (z + 0.5) * tmp.ln() - tmp + (2.5066282746310005 * sum / z).ln()
}

/// Regularized lower incomplete gamma P(a, x), series branch (x < a + 1).
fn gamma_p_series(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let gln = ln_gamma(a);
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - gln).exp()
}

/// Regularized upper incomplete gamma Q(a, x), continued fraction (x >= a + 1).
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let gln = ln_gamma(a);
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (-x + a * x.ln() - gln).exp() * h
}

/// Regularized lower incomplete gamma P(a, x).
fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x <= 0.0 {
        0.0
    } else if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_cf(a, x)
    }
}

/// Standard normal CDF via erf(x/sqrt 2) = P(1/2, x^2/2).
pub fn normal_cdf(x: f64) -> f64 {
    let half = 0.5 * gamma_p(0.5, 0.5 * x * x);
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Standard normal density.
fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Acklam's rational approximation to the inverse normal CDF; the starting
/// point for the Newton polish in [`normal_quantile`].
fn inverse_normal_initial(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if q < P_LOW {
        let u = (-2.0 * q.ln()).sqrt();
        (((((C[0] * u + C[1]) * u + C[2]) * u + C[3]) * u + C[4]) * u + C[5])
            / ((((D[0] * u + D[1]) * u + D[2]) * u + D[3]) * u + 1.0)
    } else if q <= 1.0 - P_LOW {
        let u = q - 0.5;
        let r = u * u;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * u
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        -inverse_normal_initial(1.0 - q)
    }
}

/// Inverse of the standard normal CDF.
///
/// Rational approximation refined by Newton steps on [`normal_cdf`];
/// `|normal_cdf(normal_quantile(q)) - q| <= 1e-9` over (0, 1).
/// Panics when `q` lies outside the open unit interval.
pub fn normal_quantile(q: f64) -> f64 {
    assert!(q > 0.0 && q < 1.0, "normal_quantile requires q in (0,1), got {q}");
    if q == 0.5 {
        return 0.0;
    }
    let mut x = inverse_normal_initial(q);
    for _ in 0..3 {
        let err = normal_cdf(x) - q;
        let d = normal_pdf(x);
        if d <= 0.0 {
            break;
        }
        let step = err / d;
        x -= step;
        if step.abs() < 1e-13 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

/// Chi-squared CDF with `d` degrees of freedom: P(d/2, x/2).
pub fn chisq_cdf(x: f64, d: u32) -> f64 {
    assert!(d >= 1, "chisq_cdf requires d >= 1");
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(d as f64 / 2.0, x / 2.0)
}

/// Chi-squared quantile with `d` degrees of freedom.
///
/// Wilson-Hilferty starting point, Newton iteration on [`chisq_cdf`] with a
/// bisection safeguard; the returned value satisfies
/// `|chisq_cdf(result, d) - q| <= 1e-8`. Panics for `q` outside (0, 1) or
/// `d < 1`.
pub fn chisq_quantile(q: f64, d: u32) -> f64 {
    assert!(q > 0.0 && q < 1.0, "chisq_quantile requires q in (0,1), got {q}");
    assert!(d >= 1, "chisq_quantile requires d >= 1");
    let df = d as f64;

    // Wilson-Hilferty cube approximation
    let z = normal_quantile(q);
    let t = 1.0 - 2.0 / (9.0 * df) + z * (2.0 / (9.0 * df)).sqrt();
    let mut x = (df * t * t * t).max(1e-12);

    // bracket the root for the bisection safeguard
    let mut lo = 0.0;
    let mut hi = x.max(df) * 2.0 + 10.0;
    while chisq_cdf(hi, d) < q {
        hi *= 2.0;
    }

    let half = df / 2.0;
    let ln_norm = half * std::f64::consts::LN_2 + ln_gamma(half);
    for _ in 0..200 {
        let f = chisq_cdf(x, d) - q;
        if f.abs() <= 1e-12 {
            break;
        }
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        // chi-squared density at x
        let pdf = ((half - 1.0) * x.ln() - 0.5 * x - ln_norm).exp();
        let mut next = if pdf > 0.0 { x - f / pdf } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-13 * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    x
}
