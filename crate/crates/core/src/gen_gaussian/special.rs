//! Log-domain special functions: standard normal tails and the regularized
//! incomplete gamma functions with their inverses.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use libm::{erf, erfc, lgamma as ln_gamma};

const EPS: f64 = 1e-16;
const MAX_SERIES: usize = 10_000;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// `ln φ(h)` for the standard normal density.
pub fn ln_normal_pdf(h: f64) -> f64 {
    -0.5 * h * h - 0.5 * (2.0 * PI).ln()
}

/// Standard normal CDF.
pub fn normal_cdf(h: f64) -> f64 {
    0.5 * erfc(-h * FRAC_1_SQRT_2)
}

/// `ln(1 - Φ(x))`, accurate far into the upper tail.
pub fn ln_normal_upper_tail(x: f64) -> f64 {
    if x < 37.0 {
        return (0.5 * erfc(x * FRAC_1_SQRT_2)).ln();
    }
    // Mills ratio R(x) = (1 - Φ(x)) / φ(x) as a continued fraction,
    // evaluated bottom-up.
    let mut t = x;
    for k in (1..=120).rev() {
        t = x + k as f64 / t;
    }
    ln_normal_pdf(x) - t.ln()
}

/// `P(|Z| <= x)` and `ln P(|Z| > x)` for `x >= 0`.
pub(crate) fn normal_two_sided(x: f64) -> (f64, f64) {
    let inner = erf(x * FRAC_1_SQRT_2);
    let ln_outer = LN_2 + ln_normal_upper_tail(x);
    (inner, ln_outer)
}

/// `ln P(a, x)`, the log of the regularized lower incomplete gamma function.
pub fn ln_gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if x < a + 1.0 {
        ln_p_series(a, x)
    } else {
        (-ln_q_fraction(a, x).exp()).ln_1p()
    }
}

/// `ln Q(a, x)`, the log of the regularized upper incomplete gamma function.
pub fn ln_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        (-ln_p_series(a, x).exp()).ln_1p()
    } else {
        ln_q_fraction(a, x)
    }
}

fn ln_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_SERIES {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    a * x.ln() - x - ln_gamma(a) + sum.ln()
}

fn ln_q_fraction(a: f64, x: f64) -> f64 {
    // Modified Lentz evaluation of the Legendre continued fraction.
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_SERIES {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    a * x.ln() - x - ln_gamma(a) + h.ln()
}

/// `ln` of the gamma density kernel `x^{a-1} e^{-x} / Γ(a)`.
fn ln_gamma_kernel(a: f64, x: f64) -> f64 {
    (a - 1.0) * x.ln() - x - ln_gamma(a)
}

/// Solves `ln P(a, x) = ln_target` for `x`.
pub fn inv_gamma_p_ln(a: f64, ln_target: f64) -> f64 {
    if ln_target == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_target > -LN_2 {
        // P is close to one: invert Q = 1 - P, which is well conditioned there.
        return inv_gamma_q_ln(a, (-ln_target.exp_m1()).ln());
    }
    // Leading term of the series: ln P ≈ a ln x - ln Γ(a + 1).
    let guess = ((ln_target + ln_gamma(a + 1.0)) / a).min(a.max(1.0).ln() + 2.0);
    solve_in_log_x(guess, |u| {
        let x = u.exp();
        let lp = ln_gamma_p(a, x);
        let slope = (ln_gamma_kernel(a, x) - lp).exp() * x;
        (lp - ln_target, slope, slope * (a - x - slope))
    })
}

/// Solves `ln Q(a, x) = ln_target` for `x`.
pub fn inv_gamma_q_ln(a: f64, ln_target: f64) -> f64 {
    if ln_target >= 0.0 {
        return 0.0;
    }
    if ln_target > -LN_2 {
        return inv_gamma_p_ln(a, (-ln_target.exp_m1()).ln());
    }
    let guess = (-ln_target).max(a).max(1e-3).ln();
    solve_in_log_x(guess, |u| {
        let x = u.exp();
        let lq = ln_gamma_q(a, x);
        let slope = -(ln_gamma_kernel(a, x) - lq).exp() * x;
        (lq - ln_target, slope, slope * (a - x - slope))
    })
}

/// Inverts `ln Q(a, x) = ln_target` in the far tail using the asymptotic
/// expansion `Γ(a, x) ~ x^{a-1} e^{-x} (1 + (a-1)/x + (a-1)(a-2)/x² + …)`.
pub(crate) fn inv_gamma_q_ln_asymptotic(a: f64, ln_target: f64) -> f64 {
    let lg = ln_gamma(a);
    let mut x = -ln_target;
    for _ in 0..NEWTON_MAX_ITER {
        let c1 = (a - 1.0) / x;
        let c2 = c1 * (a - 2.0) / x;
        let c3 = c2 * (a - 3.0) / x;
        let next = -ln_target + (a - 1.0) * x.ln() - lg + (1.0 + c1 + c2 + c3).ln();
        if (next - x).abs() <= NEWTON_TOL * x {
            return next;
        }
        x = next;
    }
    x
}

/// Safeguarded Halley iteration on a monotone function of `u = ln x`.
/// `eval` returns the residual and its first two derivatives with respect
/// to `u`.
///
/// The bracket is tightened from every evaluation. A step that leaves it is
/// replaced by bisection, or by a doubling search while one side is
/// still open.
fn solve_in_log_x(guess: f64, eval: impl Fn(f64) -> (f64, f64, f64)) -> f64 {
    const U_MIN: f64 = -745.0;
    const U_MAX: f64 = 710.0;
    let mut u = guess.clamp(U_MIN, U_MAX);
    let (mut r, mut s, mut curvature) = eval(u);
    let increasing = s > 0.0;
    let below = |r: f64| if increasing { r < 0.0 } else { r > 0.0 };
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut search = 1.0;
    for _ in 0..NEWTON_MAX_ITER {
        if r == 0.0 {
            break;
        }
        if below(r) {
            lo = u;
        } else {
            hi = u;
        }
        let mut next = u - 2.0 * r * s / (2.0 * s * s - r * curvature);
        if !next.is_finite() || next <= lo || next >= hi {
            next = u - r / s;
        }
        if !next.is_finite() || next <= lo || next >= hi {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                search *= 2.0;
                (lo + search).min(U_MAX)
            } else {
                search *= 2.0;
                (hi - search).max(U_MIN)
            };
            if next == u {
                break;
            }
        }
        if (next - u).abs() < NEWTON_TOL * u.abs().max(1.0) {
            u = next;
            break;
        }
        u = next;
        (r, s, curvature) = eval(u);
    }
    u.exp()
}
