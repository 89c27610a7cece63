//! Counting and enumeration of bounded simplex sets.
//!
//! `W(m, L, B)` is the set of vectors `x in N^m` with `x_i <= B` for every
//! coordinate and `x_1 + ... + x_m <= L`. The unbounded simplex `V(m, L)` is
//! the special case `B >= L`.

use std::f64::consts::LN_2;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// Default upper bound on the number of vectors [`enumerate_w`] will materialise.
pub const DEFAULT_ENUM_CAP: u64 = 10_000_000;

/// Work threshold (`m * L_eff`) above which [`log_count_rate`] leaves exact
/// big-integer arithmetic for the log-domain recurrence.
pub const EXACT_WORK_LIMIT: u64 = 1_000_000;

/// Parameters `(m, L, B)` of a bounded simplex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct WParams {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "B")]
    pub b: usize,
}

impl WParams {
    pub fn new(m: usize, l: usize, b: usize) -> Self {
        WParams { m, l, b }
    }

    /// Build from signed integers, rejecting negative entries.
    pub fn checked(m: i64, l: i64, b: i64) -> Result<Self> {
        let conv = |name, v: i64| {
            usize::try_from(v).map_err(|_| Error::invalid(name, v, "must be nonnegative"))
        };
        Ok(WParams {
            m: conv("m", m)?,
            l: conv("L", l)?,
            b: conv("B", b)?,
        })
    }

    /// `min(L, m*B)`: sums above `m*B` are unreachable.
    pub fn effective_l(&self) -> usize {
        self.l.min(self.m.saturating_mul(self.b))
    }

    pub fn saturated(&self) -> Self {
        WParams {
            l: self.effective_l(),
            ..*self
        }
    }
}

impl fmt::Display for WParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, L={}, B={})", self.m, self.l, self.b)
    }
}

/// An exact count together with its natural logarithm.
#[derive(Debug, Clone, PartialEq)]
pub struct CountValue {
    pub exact: BigUint,
    pub log_value: f64,
}

impl CountValue {
    pub fn new(exact: BigUint) -> Self {
        let log_value = ln_biguint(&exact);
        CountValue { exact, log_value }
    }

    pub fn from_u64(v: u64) -> Self {
        Self::new(BigUint::from(v))
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }
}

impl fmt::Display for CountValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.exact.fmt(f)
    }
}

impl PartialEq<u64> for CountValue {
    fn eq(&self, other: &u64) -> bool {
        self.exact == BigUint::from(*other)
    }
}

/// Natural logarithm of an arbitrary-precision integer; `-inf` for zero.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (x.to_u64().expect("fits in u64") as f64).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top 64 bits");
    (top as f64).ln() + shift as f64 * LN_2
}

/// A point of `Z^m`. Members of `W` have coordinates in `[0, B]`; differences
/// of members have coordinates in `[-B, B]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn zeros(m: usize) -> Self {
        LatticeVector(vec![0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), other.dim());
        LatticeVector(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &LatticeVector) -> LatticeVector {
        debug_assert_eq!(self.dim(), other.dim());
        LatticeVector(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }

    /// Membership test for `W(m, L, B)` with `m = self.dim()`.
    pub fn is_member(&self, l: usize, b: usize) -> bool {
        let b = b as i64;
        self.0.iter().all(|&x| (0..=b).contains(&x)) && self.sum() <= l as i64
    }
}

impl From<Vec<i64>> for LatticeVector {
    fn from(v: Vec<i64>) -> Self {
        LatticeVector(v)
    }
}

/// Number of members of `W(m, L, B)` with each exact coordinate sum
/// `0..=min(L, mB)`.
///
/// Rolling array over the sum with a sliding window of width `B + 1`,
/// `O(m * L_eff)` big-integer additions.
pub fn count_by_sum(p: WParams) -> Vec<BigUint> {
    let l = p.effective_l();
    let mut cur = vec![BigUint::zero(); l + 1];
    cur[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); l + 1];
    for _ in 0..p.m {
        let mut window = BigUint::zero();
        for s in 0..=l {
            window += &cur[s];
            if s > p.b {
                window -= &cur[s - p.b - 1];
            }
            next[s].clone_from(&window);
        }
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// `|W(m, L, B)|`, exactly.
pub fn count_w(p: WParams) -> CountValue {
    let total: BigUint = count_by_sum(p).into_iter().sum();
    CountValue::new(total)
}

/// Binomial coefficient `C(m, k)`; zero when `k > m`.
pub fn binomial(m: u64, k: u64) -> CountValue {
    if k > m {
        return CountValue::new(BigUint::zero());
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        // acc = C(m - k + i, i) after this step, so the division is exact
        acc *= m - k + i;
        acc /= i;
    }
    CountValue::new(acc)
}

/// All members of `W(m, L, B)` in lexicographic order.
///
/// Fails without allocating when `|W|` exceeds `cap`.
pub fn enumerate_w(p: WParams, cap: u64) -> Result<Vec<LatticeVector>> {
    let count = count_w(p);
    if count.exact > BigUint::from(cap) {
        return Err(Error::CapExceeded {
            cap,
            count: count.exact.to_string(),
        });
    }
    let n = count.exact.to_usize().expect("bounded by cap");
    let mut out = Vec::with_capacity(n);
    if p.m == 0 {
        out.push(LatticeVector::zeros(0));
        return Ok(out);
    }
    let mut cur = vec![0i64; p.m];
    enumerate_rec(&mut cur, 0, p.l as i64, p.b as i64, &mut out);
    debug_assert_eq!(out.len(), n);
    Ok(out)
}

fn enumerate_rec(cur: &mut [i64], idx: usize, budget: i64, b: i64, out: &mut Vec<LatticeVector>) {
    if idx == cur.len() {
        out.push(LatticeVector(cur.to_vec()));
        return;
    }
    for v in 0..=b.min(budget) {
        cur[idx] = v;
        enumerate_rec(cur, idx + 1, budget - v, b, out);
    }
    cur[idx] = 0;
}

/// Backend used by [`log_count_rate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateBackend {
    /// Pick by [`EXACT_WORK_LIMIT`].
    Auto,
    Exact,
    LogDomain,
}

/// `log|W(m, floor(r m), B)| / m`.
pub fn log_count_rate(m: usize, r: f64, b: usize) -> Result<f64> {
    log_count_rate_with(m, r, b, RateBackend::Auto)
}

pub fn log_count_rate_with(m: usize, r: f64, b: usize, backend: RateBackend) -> Result<f64> {
    if m == 0 {
        return Err(Error::invalid("m", m, "must be positive"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::invalid("r", r, "must be positive and finite"));
    }
    if b == 0 {
        return Err(Error::invalid("B", b, "must be positive"));
    }
    let l = (r * m as f64).floor() as usize;
    let p = WParams::new(m, l, b);
    let work = (m as u64).saturating_mul(p.effective_l() as u64);
    let use_exact = match backend {
        RateBackend::Exact => true,
        RateBackend::LogDomain => false,
        RateBackend::Auto => work <= EXACT_WORK_LIMIT,
    };
    let log_count = if use_exact {
        count_w(p).log_value
    } else {
        log_count_w(p)
    };
    Ok(log_count / m as f64)
}

/// `log|W(m, L, B)|` by the same recurrence as [`count_by_sum`], carried out
/// on logarithms with a max-shifted log-sum-exp over each window.
pub fn log_count_w(p: WParams) -> f64 {
    let l = p.effective_l();
    let mut cur = vec![f64::NEG_INFINITY; l + 1];
    cur[0] = 0.0;
    let mut next = vec![f64::NEG_INFINITY; l + 1];
    for _ in 0..p.m {
        for s in 0..=l {
            let lo = s.saturating_sub(p.b);
            next[s] = log_sum_exp(&cur[lo..=s]);
        }
        std::mem::swap(&mut cur, &mut next);
    }
    log_sum_exp(&cur)
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp()).sum();
    max + s.ln()
}
