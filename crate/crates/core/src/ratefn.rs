//! Cramér rate function of the uniform distribution on `{0, 1, ..., B}`.
//!
//! For `0 <= c < B/2`,
//!
//! ```text
//! I(c, B) = sup_t ( t c - log( (1 + e^t + ... + e^{Bt}) / (B + 1) ) )
//! ```
//!
//! and `I(c, B) = 0` for `c >= B/2`. The supremum is found from the
//! stationarity condition `tilted_mean(t) = c`, which has a unique root with
//! `t < 0` because the tilted mean is strictly increasing and equals `B/2` at
//! `t = 0`.

use serde::Serialize;

use crate::{Error, Result};

/// Tolerance used for rate solves unless the caller asks otherwise.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_BISECTIONS: u32 = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateQuery {
    c: f64,
    b: u32,
}

impl RateQuery {
    pub fn new(c: f64, b: u32) -> Result<Self> {
        if c.is_nan() || c < 0.0 {
            return Err(Error::invalid("c", c, "must be nonnegative"));
        }
        if b == 0 {
            return Err(Error::invalid("B", b, "must be positive"));
        }
        Ok(RateQuery { c, b })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn b(&self) -> u32 {
        self.b
    }
}

/// Optimal tilt of the dual problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Tilt {
    Finite(f64),
    /// `c = 0`: the supremum is approached only as `t -> -inf`.
    NegInfinity,
    /// `c >= B/2`: zero branch, nothing was solved.
    None,
}

impl Tilt {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Tilt::Finite(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RateResult {
    pub value: f64,
    pub t_star: Tilt,
    pub iterations: u32,
    /// `|tilted_mean(t_star) - c|`, zero when no solve was needed.
    pub residual: f64,
}

/// Weights `e^{jt - shift}` for `j = 0..=B`, with the shift chosen so the
/// largest weight is exactly 1.
fn shifted_weights(t: f64, b: u32) -> (f64, impl Iterator<Item = (u32, f64)>) {
    let top = if t > 0.0 { b } else { 0 };
    let shift = top as f64 * t;
    (
        shift,
        (0..=b).map(move |j| (j, (j as f64 * t - shift).exp())),
    )
}

/// `log( mean_{j=0..B} e^{jt} )`.
pub fn log_mgf(t: f64, b: u32) -> f64 {
    let top = if t > 0.0 { b } else { 0 };
    let (shift, weights) = shifted_weights(t, b);
    let rest: f64 = weights.filter(|&(j, _)| j != top).map(|(_, w)| w).sum();
    let log_sum = if rest < 0.25 {
        rest.ln_1p()
    } else {
        (1.0 + rest).ln()
    };
    shift + log_sum - ((b + 1) as f64).ln()
}

/// Mean of the exponentially tilted law `P(j) ∝ e^{jt}` on `{0..B}`.
pub fn tilted_mean(t: f64, b: u32) -> f64 {
    let (_, weights) = shifted_weights(t, b);
    let (num, den) = weights.fold((0.0, 0.0), |(n, d), (j, w)| (n + j as f64 * w, d + w));
    num / den
}

/// `I(c, B)` via bisection on the stationarity condition.
pub fn rate_i(q: &RateQuery, tol: f64) -> Result<RateResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::invalid("tol", tol, "must be positive and finite"));
    }
    let (c, b) = (q.c, q.b);
    if c >= b as f64 / 2.0 {
        return Ok(RateResult {
            value: 0.0,
            t_star: Tilt::None,
            iterations: 0,
            residual: 0.0,
        });
    }
    if c == 0.0 {
        return Ok(RateResult {
            value: ((b + 1) as f64).ln(),
            t_star: Tilt::NegInfinity,
            iterations: 0,
            residual: 0.0,
        });
    }

    // Below -2 log(B+1)/c the dual objective is already negative.
    let mut lo = -2.0 * ((b + 1) as f64).ln() / c.max(0.01);
    while tilted_mean(lo, b) >= c {
        lo *= 2.0;
    }
    let mut hi = 0.0f64;
    // relative for small c, so t* is located even when c is far below tol
    let target = 0.5 * tol * c.min(1.0);
    let mut iterations = 0;
    let mut t = 0.5 * (lo + hi);
    let mut residual = (tilted_mean(t, b) - c).abs();
    while iterations < MAX_BISECTIONS {
        iterations += 1;
        t = 0.5 * (lo + hi);
        let g = tilted_mean(t, b) - c;
        residual = g.abs();
        if residual <= target || t <= lo || t >= hi {
            break;
        }
        if g < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
    }

    let value = t * c - log_mgf(t, b);
    if !value.is_finite() {
        return Err(Error::NonFinite("rate_i"));
    }
    Ok(RateResult {
        value: value.max(0.0),
        t_star: Tilt::Finite(t),
        iterations,
        residual,
    })
}

/// `log(B + 1) - I(c, B)`, the exponential growth rate of `|W(m, floor(cm), B)|`.
pub fn log_w_rate_limit(q: &RateQuery, tol: f64) -> Result<f64> {
    let rate = rate_i(q, tol)?;
    Ok(((q.b + 1) as f64).ln() - rate.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entropy(c: f64) -> f64 {
        -c * c.ln() - (1.0 - c) * (1.0 - c).ln()
    }

    fn rate(c: f64, b: u32) -> RateResult {
        rate_i(&RateQuery::new(c, b).unwrap(), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn log_mgf_examples() {
        for b in 1..12 {
            assert_eq!(log_mgf(0.0, b), 0.0);
        }
        let expected = ((1.0 + 1f64.exp()) / 2.0).ln();
        assert!((log_mgf(1.0, 1) - expected).abs() < 1e-15);
        assert!((log_mgf(1.0, 1) - 0.620115).abs() < 1e-6);
        assert!((log_mgf(-50.0, 3) + 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_mgf_is_stable_for_large_tilts() {
        // e^{jt} overflows f64 for t = 800; the shifted form does not.
        let v = log_mgf(800.0, 3);
        assert!((v - (2400.0 - 4f64.ln())).abs() < 1e-9);
        assert!((log_mgf(-1e6, 5) + 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn tilted_mean_examples() {
        for b in 1..12 {
            assert_eq!(tilted_mean(0.0, b), b as f64 / 2.0);
        }
        let e = 1f64.exp();
        assert!((tilted_mean(1.0, 1) - e / (1.0 + e)).abs() < 1e-15);
        assert!((tilted_mean(1.0, 1) - 0.731059).abs() < 1e-6);
        assert_eq!(tilted_mean(-1e4, 4), 0.0);
    }

    #[test]
    fn tilted_mean_increases() {
        for b in 1..8 {
            let mut prev = tilted_mean(-40.0, b);
            for i in -399i32..=400 {
                let cur = tilted_mean(i as f64 * 0.1, b);
                // flat tails wobble at the last ulp
                assert!(cur >= prev - 4.0 * f64::EPSILON * b as f64);
                if i.abs() < 100 {
                    assert!(cur > prev);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn rate_examples() {
        let r = rate(2.0, 4);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.t_star, Tilt::None);
        assert_eq!(r.iterations, 0);

        let r = rate(0.0, 3);
        assert_eq!(r.value, 4f64.ln());
        assert_eq!(r.t_star, Tilt::NegInfinity);

        let r = rate(0.25, 1);
        let expected = 2f64.ln() - entropy(0.25);
        assert!((r.value - expected).abs() < 1e-12);
        assert!((r.value - 0.130812).abs() < 1e-6);
        let t = r.t_star.finite().unwrap();
        assert!((t - (0.25f64 / 0.75).ln()).abs() < 1e-9);
    }

    #[test]
    fn invalid_queries_rejected() {
        assert!(RateQuery::new(-0.1, 2).is_err());
        assert!(RateQuery::new(f64::NAN, 2).is_err());
        assert!(RateQuery::new(0.1, 0).is_err());
        let q = RateQuery::new(0.1, 2).unwrap();
        assert!(rate_i(&q, 0.0).is_err());
        assert!(rate_i(&q, -1.0).is_err());
    }

    #[test]
    fn tiny_mean_expands_bracket() {
        // tilted mean is about e^t here, so t* is near log(1e-150) = -345.4,
        // below the initial bracket end -2 log 4 / 0.01 = -277.3
        let r = rate(1e-150, 3);
        let t = r.t_star.finite().unwrap();
        assert!(t < -2.0 * 4f64.ln() / 0.01);
        assert!((t - 1e-150f64.ln()).abs() < 1e-6);
        assert!(r.residual <= 10.0 * DEFAULT_TOL);
        assert!(r.value <= 4f64.ln() && 4f64.ln() - r.value < 1e-15);

        let r = rate(1e-6, 3);
        assert!(r.residual <= 10.0 * DEFAULT_TOL);
        assert!(r.value < 4f64.ln() && r.value > 4f64.ln() - 1e-4);
    }

    #[test]
    fn limit_examples() {
        let q = RateQuery::new(1.0, 2).unwrap();
        assert_eq!(log_w_rate_limit(&q, DEFAULT_TOL).unwrap(), 3f64.ln());
        let q = RateQuery::new(0.0, 2).unwrap();
        assert_eq!(log_w_rate_limit(&q, DEFAULT_TOL).unwrap(), 0.0);
    }

    #[test]
    fn boundary_continuity() {
        for b in 1..=10 {
            let v = rate(b as f64 / 2.0 - 1e-3, b).value;
            assert!(v > 0.0 && v <= 1e-5, "B={b}: {v}");
        }
    }
}
