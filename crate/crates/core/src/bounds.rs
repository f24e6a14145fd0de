//! Closed-form probability bounds for the four-day majority process.
//!
//! Everything here is a deterministic function of the parameter tuple
//! `(n, p, c, eps1, eps2, r)`: the two hypothesis inequalities, the per-day
//! Blue-camp ceilings `n^B_0..n^B_4`, the per-day failure bounds `P1..P4`,
//! and their union-bound composition into a lower bound on the probability
//! that Red is unanimous after day four. The supporting binomial estimates
//! (a Berry-Esseen error term, a binomial-dominance lower bound, a
//! collision upper bound, degree and bad-set reduction bounds) are exposed
//! as standalone functions.
//!
//! Bound values are returned raw: several are vacuous (negative, above one,
//! or infinite) for small `n` or extreme parameters, and tests rely on the
//! exact formula semantics. Use [`clamp01`] at reporting boundaries only.
//!
//! All logarithms are natural; `C1 = sqrt(3 ln 2) ~ 1.442027`.

use serde::Serialize;
use thiserror::Error;

/// Berry-Esseen constant for Bernoulli-type summands.
pub const C0: f64 = 0.56;

/// `sqrt(3 ln 2)`: the constant coupling the day-1 margin to the day-2
/// union bound.
pub fn c1() -> f64 {
    (3.0 * std::f64::consts::LN_2).sqrt()
}

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

/// Parameters of the four-day theorem: `n` vertices, edge probability `p`,
/// initial advantage `c` (Red starts with at least n/2 + c), day-2 margin
/// `eps1`, day-1 margin `eps2`, and day-3 fraction `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundParams {
    pub n: u64,
    pub p: f64,
    pub c: u64,
    pub eps1: f64,
    pub eps2: f64,
    pub r: f64,
}

impl BoundParams {
    pub fn new(n: u64, p: f64, c: u64, eps1: f64, eps2: f64, r: f64) -> Result<Self, BoundsError> {
        if n < 3 {
            return Err(BoundsError::InvalidParameter(format!(
                "n must be at least 3, got {n}"
            )));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "p must lie strictly inside (0, 1), got {p}"
            )));
        }
        if c < 1 {
            return Err(BoundsError::InvalidParameter(
                "c must be a positive integer".into(),
            ));
        }
        if !(eps1 > 0.0 && eps2 > 0.0) {
            return Err(BoundsError::InvalidParameter(format!(
                "eps1 and eps2 must be positive, got {eps1} and {eps2}"
            )));
        }
        if !(r > 0.0 && r < 0.5) {
            return Err(BoundsError::InvalidParameter(format!(
                "r must lie strictly inside (0, 1/2), got {r}"
            )));
        }
        Ok(BoundParams {
            n,
            p,
            c,
            eps1,
            eps2,
            r,
        })
    }

    /// Bernoulli standard deviation `sigma = sqrt(p(1-p))`.
    pub fn sigma(&self) -> f64 {
        (self.p * (1.0 - self.p)).sqrt()
    }
}

/// Everything the four-day theorem yields at one parameter point.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub params: BoundParams,
    /// The two hypothesis inequalities (both hold, or no report is built).
    pub conditions_ok: (bool, bool),
    /// Per-day Blue-camp ceilings `n^B_0..n^B_4`.
    pub milestones: [f64; 5],
    /// Per-day failure bounds `P1..P4`.
    pub p_values: [f64; 4],
    pub total_failure: f64,
    /// `max(0, 1 - (P1+P2+P3+P4))`.
    pub win_lower_bound: f64,
}

/// Integral of the standard normal density from 0 to `a`. Odd in `a`;
/// `phi0(inf) = 1/2`. Absolute error well below 1e-12 (one erf call).
pub fn phi0(a: f64) -> f64 {
    0.5 * libm::erf(a / std::f64::consts::SQRT_2)
}

fn min_p_q(p: f64) -> f64 {
    if p <= 0.5 {
        p
    } else {
        1.0 - p
    }
}

/// Day-1 bound `Q(n, p, d)`: a Chebyshev ratio controlling the probability
/// that fewer than (n+1)/2 + d*sqrt(n) vertices are Red after one day, given
/// an initial advantage of `c`.
///
/// Requires the day-1 margin condition
/// `sqrt(n-1) phi0(...) - C0(1-2s^2)/s > d + 1/(2 sqrt(n))`,
/// i.e. a strictly positive denominator bracket.
pub fn q_bound(n: u64, p: f64, c: u64, d: f64) -> Result<f64, BoundsError> {
    if n < 3 {
        return Err(BoundsError::InvalidParameter(format!(
            "n must be at least 3, got {n}"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "p must lie strictly inside (0, 1), got {p}"
        )));
    }
    let nf = n as f64;
    let sigma = (p * (1.0 - p)).sqrt();
    let one_minus_2var = 1.0 - 2.0 * (p * (1.0 - p));
    let numerator = 0.25 + 4.0 * C0 * C0 * one_minus_2var * one_minus_2var * (nf - 1.0) / (nf - 2.0);
    let phi_arg = (2.0 * p * c as f64 + min_p_q(p)) / (sigma * (nf - 1.0).sqrt());
    let bracket = (nf - 1.0).sqrt() * phi0(phi_arg)
        - C0 * one_minus_2var / sigma
        - d
        - 1.0 / (2.0 * nf.sqrt());
    if bracket <= 0.0 {
        return Err(BoundsError::PreconditionViolated(format!(
            "day-1 margin condition fails: bracket = {bracket:.6} <= 0 at d = {d}"
        )));
    }
    Ok(numerator / (bracket * bracket))
}

/// Day-1 failure bound: `P1 = Q(n, p, C1/(2p) + eps2)`.
pub fn p1(params: &BoundParams) -> Result<f64, BoundsError> {
    q_bound(
        params.n,
        params.p,
        params.c,
        c1() / (2.0 * params.p) + params.eps2,
    )
}

/// Variant of [`p1`] with `C1/p` instead of `C1/(2p)` in the margin. The two
/// forms circulate; only the `C1/(2p)` form reproduces the reference values
/// this crate pins, so [`p1`] is the default and this one is kept for
/// comparison.
pub fn p1_wide_margin(params: &BoundParams) -> Result<f64, BoundsError> {
    q_bound(params.n, params.p, params.c, c1() / params.p + params.eps2)
}

/// Day-2 failure bound:
/// `P2 = (1/n) exp(-(8n/3) [(1-2e1) p e2 (p e2 + C1) - e1 ln 2])`.
///
/// May exceed 1/n when the bracket goes negative (vacuous bound); callers
/// clamp at reporting time.
pub fn p2(params: &BoundParams) -> f64 {
    let n = params.n as f64;
    let (p, e1, e2) = (params.p, params.eps1, params.eps2);
    let a = (1.0 - 2.0 * e1) * p * e2 * (p * e2 + c1()) - e1 * std::f64::consts::LN_2;
    (-(8.0 * n / 3.0) * a).exp() / n
}

/// Day-3 failure bound:
/// `P3 = (1/n) exp(-2 r p^3 (2 e1 n - 1)^2 / (1 + r p) - 2 n ln 2)`.
///
/// Requires `2 e1 n > 1`. Underflows to zero for moderate `n`; that is the
/// honest f64 value of an astronomically small bound.
pub fn p3(params: &BoundParams) -> Result<f64, BoundsError> {
    let n = params.n as f64;
    let (p, e1, r) = (params.p, params.eps1, params.r);
    if 2.0 * e1 * n <= 1.0 {
        return Err(BoundsError::PreconditionViolated(format!(
            "need 2*eps1*n > 1, got {}",
            2.0 * e1 * n
        )));
    }
    let m = 2.0 * e1 * n - 1.0;
    let exponent = -2.0 * r * p.powi(3) * m * m / (1.0 + r * p) - 2.0 * n * std::f64::consts::LN_2;
    Ok(exponent.exp() / n)
}

/// The day-3 reduction bound with `+2 n ln 2` in the exponent, as the
/// underlying union-bound lemma states it. Vacuous (often infinite) at
/// realistic sizes; exposed for transparency next to [`p3`].
pub fn day3_lemma_bound(params: &BoundParams) -> Result<f64, BoundsError> {
    let n = params.n as f64;
    let (p, e1, r) = (params.p, params.eps1, params.r);
    if 2.0 * e1 * n <= 1.0 {
        return Err(BoundsError::PreconditionViolated(format!(
            "need 2*eps1*n > 1, got {}",
            2.0 * e1 * n
        )));
    }
    let m = 2.0 * e1 * n - 1.0;
    let exponent = -2.0 * r * p.powi(3) * m * m / (1.0 + r * p) + 2.0 * n * std::f64::consts::LN_2;
    Ok(exponent.exp() / n)
}

/// Day-4 failure bound: `P4 = n exp(-(1 - 2r + 2r ln 2r) p (n-1))`.
pub fn p4(params: &BoundParams) -> f64 {
    let n = params.n as f64;
    let (p, r) = (params.p, params.r);
    let two_r = 2.0 * r;
    n * (-(1.0 - two_r + two_r * two_r.ln()) * p * (n - 1.0)).exp()
}

/// The per-day Blue-camp ceilings:
/// `n^B_0 = n/2 - c`, `n^B_1 = (n-1)/2 - (C1/(2p) + eps2) sqrt(n)`,
/// `n^B_2 = (1/2 - eps1) n`, `n^B_3 = r p (n-1)`, `n^B_4 = 0`.
///
/// Returned as reals; integer camp sizes compare as `|B_t| <= value`.
pub fn milestones(params: &BoundParams) -> [f64; 5] {
    let n = params.n as f64;
    [
        n / 2.0 - params.c as f64,
        (n - 1.0) / 2.0 - (c1() / (2.0 * params.p) + params.eps2) * n.sqrt(),
        (0.5 - params.eps1) * n,
        params.r * params.p * (n - 1.0),
        0.0,
    ]
}

/// The two hypothesis inequalities:
/// `2 sqrt(n-1) phi0((2pc + min(p,1-p)) / (sigma sqrt(n-1))) > C1/p + 2 eps2 + 1/sqrt(n)`
/// and `2 eps1 n > 1`.
pub fn check_conditions(params: &BoundParams) -> (bool, bool) {
    let n = params.n as f64;
    let sigma = params.sigma();
    let phi_arg = (2.0 * params.p * params.c as f64 + min_p_q(params.p)) / (sigma * (n - 1.0).sqrt());
    let lhs = 2.0 * (n - 1.0).sqrt() * phi0(phi_arg);
    let rhs = c1() / params.p + 2.0 * params.eps2 + 1.0 / n.sqrt();
    (lhs > rhs, 2.0 * params.eps1 * n > 1.0)
}

/// Assembles milestones, `P1..P4`, their sum, and the win lower bound
/// `max(0, 1 - sum)`. Fails (naming the culprit) when either hypothesis
/// inequality is false or the initial Blue-camp range `1 <= n/2 - c` is
/// empty.
pub fn theorem_report(params: &BoundParams) -> Result<BoundReport, BoundsError> {
    let (cond1, cond2) = check_conditions(params);
    if !cond1 {
        return Err(BoundsError::PreconditionViolated(
            "hypothesis inequality (1) fails: 2 sqrt(n-1) phi0(...) is not above C1/p + 2 eps2 + 1/sqrt(n)"
                .into(),
        ));
    }
    if !cond2 {
        return Err(BoundsError::PreconditionViolated(
            "hypothesis inequality (2) fails: 2 eps1 n is not above 1".into(),
        ));
    }
    if (params.n as f64) / 2.0 - (params.c as f64) < 1.0 {
        return Err(BoundsError::PreconditionViolated(format!(
            "initial Blue-camp range is empty: need 1 <= n/2 - c, got n/2 - c = {}",
            params.n as f64 / 2.0 - params.c as f64
        )));
    }
    let p_values = [p1(params)?, p2(params), p3(params)?, p4(params)];
    let total_failure = p_values[0] + p_values[1] + p_values[2] + p_values[3];
    Ok(BoundReport {
        params: *params,
        conditions_ok: (cond1, cond2),
        milestones: milestones(params),
        p_values,
        total_failure,
        win_lower_bound: clamp01(1.0 - total_failure),
    })
}

/// Normal-approximation error for a sum of `n` Bernoulli-type variables:
/// `C0 (1 - 2 sigma^2) / (sigma sqrt(n))`.
pub fn berry_esseen_error(n: u64, p: f64) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    assert!(p > 0.0 && p < 1.0, "p must lie strictly inside (0, 1)");
    let var = p * (1.0 - p);
    C0 * (1.0 - 2.0 * var) / (var.sqrt() * (n as f64).sqrt())
}

/// Lower bound on `Pr(Y1 > Y2 + d)` for independent `Y1 ~ Bin(n1, p)`,
/// `Y2 ~ Bin(n2, p)` with `n1 > n2` and integer `d < p(n1 - n2)`:
/// `1/2 + phi0((p(n1-n2) - d) / (sigma sqrt(n1+n2))) - C0(1-2sigma^2)/(sigma sqrt(n1+n2))`.
///
/// Not clamped; may be negative when the margin is thin.
pub fn dominance_lower_bound(n1: u64, n2: u64, p: f64, d: i64) -> Result<f64, BoundsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "p must lie strictly inside (0, 1), got {p}"
        )));
    }
    if n1 <= n2 {
        return Err(BoundsError::InvalidParameter(format!(
            "need n1 > n2, got n1 = {n1}, n2 = {n2}"
        )));
    }
    if d as f64 >= p * (n1 - n2) as f64 {
        return Err(BoundsError::PreconditionViolated(format!(
            "need d < p (n1 - n2), got d = {d} and p (n1 - n2) = {}",
            p * (n1 - n2) as f64
        )));
    }
    let total = ((n1 + n2) as f64).sqrt();
    let var = p * (1.0 - p);
    let sigma = var.sqrt();
    Ok(0.5 + phi0((p * (n1 - n2) as f64 - d as f64) / (sigma * total))
        - C0 * (1.0 - 2.0 * var) / (sigma * total))
}

/// Upper bound on `Pr(X1 = X2 + d)` for independent `X1 ~ Bin(n1, p)`,
/// `X2 ~ Bin(n2, p)` and a positive integer `d < (n1+n2)/2`:
/// `2 C0 (1 - 2 sigma^2) / (sigma sqrt(n1 + n2))`.
pub fn collision_upper_bound(n1: u64, n2: u64, p: f64, d: u64) -> Result<f64, BoundsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "p must lie strictly inside (0, 1), got {p}"
        )));
    }
    if d == 0 || 2 * d >= n1 + n2 {
        return Err(BoundsError::PreconditionViolated(format!(
            "need 0 < d < (n1 + n2)/2, got d = {d} with n1 + n2 = {}",
            n1 + n2
        )));
    }
    let var = p * (1.0 - p);
    Ok(2.0 * C0 * (1.0 - 2.0 * var) / (var.sqrt() * ((n1 + n2) as f64).sqrt()))
}

/// Probability that every coloring with at most `s p (n-1) / 2` Blue
/// vertices empties in one day, lower-bounded via a Chernoff bound on
/// minimum degree: `1 - n exp(-(1 - s + s ln s) p (n-1))` for `s` in (0,1).
///
/// Setting `s = 2r` makes the failure term identical to [`p4`].
pub fn degree_reduction_prob(n: u64, p: f64, s: f64) -> f64 {
    assert!(s > 0.0 && s < 1.0, "s must lie strictly inside (0, 1)");
    let n = n as f64;
    1.0 - n * (-(1.0 - s + s * s.ln()) * p * (n - 1.0)).exp()
}

/// Probability that a graph universally reduces Blue camps of size `n0` to
/// at most `m - 1`, lower-bounded via Hoeffding plus a double union bound:
/// `1 - (4^n / n) exp(-2 p^2 (n - 2 n0 - 1)^2 m / (n + m - 2))`.
///
/// Requires `n0 < n/2` and `1 <= m <= n`. Vacuous (very negative) at small
/// `n`; evaluated in log space so the `4^n` factor cannot overflow.
pub fn bad_set_bound(n: u64, n0: u64, m: u64, p: f64) -> Result<f64, BoundsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "p must lie strictly inside (0, 1), got {p}"
        )));
    }
    if 2 * n0 >= n {
        return Err(BoundsError::PreconditionViolated(format!(
            "need n0 < n/2, got n0 = {n0}, n = {n}"
        )));
    }
    if m == 0 || m > n {
        return Err(BoundsError::PreconditionViolated(format!(
            "need 1 <= m <= n, got m = {m}, n = {n}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    let gap = nf - 2.0 * n0 as f64 - 1.0;
    let hoeffding = 2.0 * p * p * gap * gap * mf / (nf + mf - 2.0);
    let log_failure = nf * (4.0f64).ln() - nf.ln() - hoeffding;
    Ok(1.0 - log_failure.exp())
}

/// Clamps a raw bound into [0, 1] for reporting.
pub fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}
