//! The asymptotic exponent bound and its nested maximization.
//!
//! For fixed `B`, a sum-ratio `r = L/m` and a split fraction `a`, the lower
//! bound on `theta - 1` is
//!
//! ```text
//! ( log 2 + ar log B + (1 - ar) log(B + 1)
//!   - I(ar, 1) - ar I((1 - a)/a, B - 1) - (1 - ar) I(r/(1 - ar), B)
//!   - log(2B + 1) + I(2r, 2B) ) / log(2B + 1)
//! ```
//!
//! which is maximized over `a in (0, min(1, 1/r))`, then over `r in [0.5, 2]`,
//! then over `B`.

use rayon::prelude::*;
use serde::Serialize;

use crate::onedim;
use crate::ratefn::{self, RateQuery};
use crate::{Error, Result};

/// Rate-function tolerance used inside the objective, independent of the
/// outer search tolerance.
pub const INNER_TOL: f64 = 1e-12;

pub const R_LO: f64 = 0.5;
pub const R_HI: f64 = 2.0;

/// Tolerances of the four published columns.
pub const TABLE_EPS: [f64; 4] = [1e-4, 1e-6, 1e-8, 1e-10];

const MAX_ITER: u32 = 1000;

/// `I(c, B)` with the single-point support `B = 0` mapped to zero.
fn rate(c: f64, b: u32, tol: f64) -> Result<f64> {
    if b == 0 {
        return Ok(0.0);
    }
    Ok(ratefn::rate_i(&RateQuery::new(c, b)?, tol)?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NumeratorTerms {
    pub log2_term: f64,
    pub ar_log_b: f64,
    pub one_minus_ar_log_b1: f64,
    pub i_ar_1: f64,
    pub ar_i_inner: f64,
    pub one_minus_ar_i_outer: f64,
    pub i_2r_2b: f64,
}

impl NumeratorTerms {
    /// Exponential growth rate of `|U - U|` per coordinate.
    pub fn log_d_rate(&self) -> f64 {
        self.log2_term + self.ar_log_b + self.one_minus_ar_log_b1
            - self.i_ar_1
            - self.ar_i_inner
            - self.one_minus_ar_i_outer
    }

    pub fn theta_minus_1(&self, b: u32) -> f64 {
        let log_q = (2.0 * b as f64 + 1.0).ln();
        (self.log_d_rate() - log_q + self.i_2r_2b) / log_q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThetaPoint {
    #[serde(rename = "B")]
    pub b: u32,
    pub r: f64,
    pub a: f64,
    pub terms: NumeratorTerms,
    pub theta_minus_1: f64,
}

impl ThetaPoint {
    pub fn recomputed(&self) -> f64 {
        self.terms.theta_minus_1(self.b)
    }
}

fn check_br(b: u32, r: f64) -> Result<()> {
    if b == 0 {
        return Err(Error::invalid("B", b, "must be positive"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", r, "must be positive and finite"));
    }
    Ok(())
}

/// Upper end of the admissible `a` interval.
pub fn a_upper(r: f64) -> f64 {
    1f64.min(1.0 / r)
}

/// Evaluate the bound at `(B, r, a)`.
///
/// `tol` is passed to the rate-function solves.
pub fn theta_objective(b: u32, r: f64, a: f64, tol: f64) -> Result<ThetaPoint> {
    check_br(b, r)?;
    let i_2r_2b = rate(2.0 * r, 2 * b, tol)?;
    objective_with(b, r, a, i_2r_2b, tol)
}

fn objective_with(b: u32, r: f64, a: f64, i_2r_2b: f64, tol: f64) -> Result<ThetaPoint> {
    if !(a > 0.0 && a < a_upper(r)) {
        return Err(Error::invalid("a", a, "must lie in (0, min(1, 1/r))"));
    }
    let ar = a * r;
    let bf = b as f64;
    let terms = NumeratorTerms {
        log2_term: std::f64::consts::LN_2,
        ar_log_b: ar * bf.ln(),
        one_minus_ar_log_b1: (1.0 - ar) * (bf + 1.0).ln(),
        i_ar_1: rate(ar, 1, tol)?,
        ar_i_inner: ar * rate((1.0 - a) / a, b - 1, tol)?,
        one_minus_ar_i_outer: (1.0 - ar) * rate(r / (1.0 - ar), b, tol)?,
        i_2r_2b,
    };
    let theta_minus_1 = terms.theta_minus_1(b);
    if !theta_minus_1.is_finite() {
        return Err(Error::NonFinite("theta_objective"));
    }
    Ok(ThetaPoint {
        b,
        r,
        a,
        terms,
        theta_minus_1,
    })
}

/// Result of the inner maximization over `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InnerOptimum {
    pub a_star: f64,
    pub point: ThetaPoint,
    pub evaluations: u32,
    pub boundary_hit: bool,
}

impl InnerOptimum {
    pub fn value(&self) -> f64 {
        self.point.theta_minus_1
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::invalid("eps", eps, "must be positive and finite"));
    }
    Ok(())
}

/// Maximize the bound over `a in (0, min(1, 1/r))` for fixed `B` and `r`.
pub fn maximize_a(b: u32, r: f64, eps: f64) -> Result<InnerOptimum> {
    check_br(b, r)?;
    check_eps(eps)?;
    let i_2r_2b = rate(2.0 * r, 2 * b, INNER_TOL)?;
    maximize_a_with(b, r, eps, i_2r_2b)
}

fn maximize_a_with(b: u32, r: f64, eps: f64, i_2r_2b: f64) -> Result<InnerOptimum> {
    let inset = eps.max(1e-12);
    let (lo, hi) = (inset, a_upper(r) - inset);
    let mut failure = None;
    let m = onedim::maximize(
        |a| match objective_with(b, r, a, i_2r_2b, INNER_TOL) {
            Ok(p) => p.theta_minus_1,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        eps,
        MAX_ITER,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let point = objective_with(b, r, m.x, i_2r_2b, INNER_TOL)?;
    Ok(InnerOptimum {
        a_star: m.x,
        point,
        evaluations: m.evaluations,
        boundary_hit: near_edge(m.x, lo, hi, eps),
    })
}

fn near_edge(x: f64, lo: f64, hi: f64, eps: f64) -> bool {
    x - lo <= 2.0 * eps || hi - x <= 2.0 * eps
}

/// Per-`B` optimum at one search tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OptimizationReport {
    #[serde(rename = "B")]
    pub b: u32,
    pub epsilon: f64,
    pub r_star: f64,
    pub a_star: f64,
    pub theta_minus_1: f64,
    /// Objective evaluations across all inner searches.
    pub evaluations: u64,
    /// Set when either optimum sits within two tolerances of its interval edge.
    pub boundary_hit: bool,
}

impl OptimizationReport {
    pub fn theta(&self) -> f64 {
        1.0 + self.theta_minus_1
    }
}

/// Maximize over `r in [0.5, 2]` of the inner optimum over `a`.
pub fn maximize_r(b: u32, eps: f64) -> Result<OptimizationReport> {
    if b == 0 {
        return Err(Error::invalid("B", b, "must be positive"));
    }
    check_eps(eps)?;
    let mut evaluations = 0u64;
    let mut failure = None;
    let m = onedim::maximize(
        |r| match maximize_a(b, r, eps) {
            Ok(inner) => {
                evaluations += inner.evaluations as u64;
                inner.value()
            }
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        R_LO,
        R_HI,
        eps,
        MAX_ITER,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let inner = maximize_a(b, m.x, eps)?;
    evaluations += inner.evaluations as u64;
    Ok(OptimizationReport {
        b,
        epsilon: eps,
        r_star: m.x,
        a_star: inner.a_star,
        theta_minus_1: inner.value(),
        evaluations,
        boundary_hit: inner.boundary_hit || near_edge(m.x, R_LO, R_HI, eps),
    })
}

/// Grid of optimization reports, one row per `B`, one column per tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Table {
    pub b_values: Vec<u32>,
    pub eps_list: Vec<f64>,
    pub rows: Vec<Vec<OptimizationReport>>,
}

impl Table {
    pub fn cell(&self, b: u32, eps_index: usize) -> Option<&OptimizationReport> {
        let row = self.b_values.iter().position(|&x| x == b)?;
        self.rows[row].get(eps_index)
    }

    /// The cell with the largest bound in column `eps_index`.
    pub fn best_in_column(&self, eps_index: usize) -> Option<&OptimizationReport> {
        self.rows
            .iter()
            .filter_map(|row| row.get(eps_index))
            .max_by(|x, y| x.theta_minus_1.total_cmp(&y.theta_minus_1))
    }
}

/// Evaluate every `(B, eps)` cell. Cells run in parallel; the result order
/// is fixed by the inputs.
pub fn table1(eps_list: &[f64], b_lo: u32, b_hi: u32) -> Result<Table> {
    if eps_list.is_empty() {
        return Err(Error::invalid("eps_list", "[]", "must be nonempty"));
    }
    if b_lo == 0 || b_lo > b_hi {
        return Err(Error::invalid(
            "b_range",
            format!("{b_lo}..{b_hi}"),
            "must satisfy 1 <= lo <= hi",
        ));
    }
    for &eps in eps_list {
        check_eps(eps)?;
    }
    let b_values: Vec<u32> = (b_lo..=b_hi).collect();
    let cells: Vec<(u32, f64)> = b_values
        .iter()
        .flat_map(|&b| eps_list.iter().map(move |&eps| (b, eps)))
        .collect();
    let reports = cells
        .par_iter()
        .map(|&(b, eps)| maximize_r(b, eps))
        .collect::<Result<Vec<_>>>()?;
    let rows = reports
        .chunks(eps_list.len())
        .map(|chunk| chunk.to_vec())
        .collect();
    Ok(Table {
        b_values,
        eps_list: eps_list.to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b1_hand_evaluation() {
        let p = theta_objective(1, 1.0, 0.5, INNER_TOL).unwrap();
        let expected = (1.5 * 2f64.ln() - 3f64.ln()) / 3f64.ln();
        assert!((p.theta_minus_1 - expected).abs() < 1e-15);
        assert!((p.theta_minus_1 + 0.0536).abs() < 1e-4);
        assert_eq!(p.terms.i_ar_1, 0.0);
        assert_eq!(p.terms.ar_i_inner, 0.0);
        assert_eq!(p.terms.one_minus_ar_i_outer, 0.0);
        assert_eq!(p.terms.i_2r_2b, 0.0);
    }

    #[test]
    fn a_outside_interval_rejected() {
        for &(r, a) in &[(1.0, 0.0), (1.0, 1.0), (2.0, 0.5), (0.5, 1.2), (1.0, -0.1)] {
            assert!(theta_objective(3, r, a, INNER_TOL).is_err(), "r={r} a={a}");
        }
        assert!(theta_objective(0, 1.0, 0.5, INNER_TOL).is_err());
        assert!(theta_objective(3, 0.0, 0.5, INNER_TOL).is_err());
    }

    #[test]
    fn decomposition_consistency() {
        for b in 1..=10 {
            for &(r, a) in &[(0.6, 0.3), (1.0, 0.9), (1.7, 0.5), (1.2, 0.05)] {
                let p = theta_objective(b, r, a, INNER_TOL).unwrap();
                let rel = ((p.recomputed() - p.theta_minus_1) / p.theta_minus_1).abs();
                assert!(rel <= 1e-14);
            }
        }
    }

    #[test]
    fn inner_domain_shape() {
        let inner = maximize_a(1, 2.0, 1e-8).unwrap();
        assert!(inner.a_star > 0.0 && inner.a_star < 0.5);
        assert!(inner.value().is_finite());
    }

    #[test]
    fn inner_tolerance_refinement() {
        let coarse = maximize_a(3, 1.0, 1e-6).unwrap();
        let fine = maximize_a(3, 1.0, 1e-10).unwrap();
        assert!((coarse.value() - fine.value()).abs() <= 1e-5);
    }

    #[test]
    fn invalid_inputs() {
        assert!(maximize_a(3, 1.0, 0.0).is_err());
        assert!(maximize_r(0, 1e-6).is_err());
        assert!(maximize_r(3, f64::NAN).is_err());
        assert!(table1(&[], 3, 10).is_err());
        assert!(table1(&[1e-4], 5, 3).is_err());
        assert!(table1(&[1e-4], 0, 3).is_err());
    }

    #[test]
    fn report_matches_objective() {
        let rep = maximize_r(4, 1e-6).unwrap();
        let p = theta_objective(4, rep.r_star, rep.a_star, INNER_TOL).unwrap();
        assert!((p.theta_minus_1 - rep.theta_minus_1).abs() <= 1e-12);
        assert!(rep.r_star >= R_LO && rep.r_star <= R_HI);
        assert!(rep.a_star > 0.0 && rep.a_star < a_upper(rep.r_star));
    }
}
