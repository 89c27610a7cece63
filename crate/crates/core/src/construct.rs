//! Integer sets built from bounded simplex sets, and the exact exponent bound.
//!
//! The digit map `g(x) = sum_k x_k (2B + 1)^k` sends `W(m, L, B)` to a set of
//! integers `U`. Digits of `W + W` lie in `[0, 2B]` and digits of `W - W` in
//! `[-B, B]`, so neither operation carries and `|U + U| = |W + W|`,
//! `|U - U| = |W - W|`.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::wcount::{self, binomial, count_w, enumerate_w, CountValue, LatticeVector, WParams};
use crate::{Error, Result};

/// A finite set of integers kept strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntegerSet(Vec<BigInt>);

impl IntegerSet {
    pub fn from_unsorted(mut elements: Vec<BigInt>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        IntegerSet(elements)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn elements(&self) -> &[BigInt] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        self.0.binary_search(v).is_ok()
    }

    pub fn min(&self) -> Option<&BigInt> {
        self.0.first()
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.0.last()
    }

    pub fn negated(&self) -> IntegerSet {
        IntegerSet(self.0.iter().rev().map(|v| -v).collect())
    }

    /// Newline-delimited decimal integers, ascending.
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for v in &self.0 {
            writeln!(out, "{v}")?;
        }
        Ok(())
    }

    /// Parse the format produced by [`IntegerSet::write_to`]. Blank lines are skipped.
    pub fn read_from<R: BufRead>(input: R) -> io::Result<IntegerSet> {
        let mut out = Vec::new();
        for line in input.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v = line.parse::<BigInt>().map_err(|e| {
                io::Error::new(io::ErrorKind::InvalidData, format!("{line:?}: {e}"))
            })?;
            out.push(v);
        }
        Ok(IntegerSet::from_unsorted(out))
    }
}

impl FromIterator<BigInt> for IntegerSet {
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        IntegerSet::from_unsorted(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a IntegerSet {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn radix_value(coords: &[i64], weights: &[BigInt]) -> BigInt {
    coords.iter().zip(weights).map(|(&x, w)| w * x).sum()
}

/// Powers `(2B + 1)^k` for `k < m`.
pub fn g_weights(m: usize, b: usize) -> Vec<BigInt> {
    let base = BigInt::from(2 * b + 1);
    let mut w = Vec::with_capacity(m);
    let mut cur = BigInt::one();
    for _ in 0..m {
        w.push(cur.clone());
        cur *= &base;
    }
    w
}

/// Weights `L_0 = 1`, `L_k = 2L L_{k-1} + 1`. Coordinate `k` (zero-based) is
/// paired with `L_k`.
pub fn f_weights(m: usize, l: usize) -> Vec<BigInt> {
    let two_l = BigInt::from(2 * l);
    let mut w = Vec::with_capacity(m);
    let mut cur = BigInt::one();
    for _ in 0..m {
        w.push(cur.clone());
        cur = &cur * &two_l + 1;
    }
    w
}

/// Base-`(2B + 1)` value of `x`. Coordinates must lie in `[-2B, 2B]`.
pub fn encode_g(x: &LatticeVector, b: usize) -> Result<BigInt> {
    let lim = 2 * b as i64;
    check_coords(x, -lim, lim)?;
    Ok(radix_value(x.coords(), &g_weights(x.dim(), b)))
}

/// Value of `x` under the `L_k` radix. Coordinates must lie in `[0, L]`.
pub fn encode_f(x: &LatticeVector, l: usize) -> Result<BigInt> {
    check_coords(x, 0, l as i64)?;
    Ok(radix_value(x.coords(), &f_weights(x.dim(), l)))
}

fn check_coords(x: &LatticeVector, lo: i64, hi: i64) -> Result<()> {
    match x.coords().iter().position(|v| !(lo..=hi).contains(v)) {
        Some(index) => Err(Error::CoordinateOutOfRange {
            index,
            value: x.coords()[index],
            lo,
            hi,
        }),
        None => Ok(()),
    }
}

/// `U = g(W(m, L, B))`.
pub fn build_u(p: WParams, cap: u64) -> Result<IntegerSet> {
    let w = enumerate_w(p, cap)?;
    let weights = g_weights(p.m, p.b);
    Ok(w.iter()
        .map(|x| radix_value(x.coords(), &weights))
        .collect())
}

fn pairwise<F>(u: &IntegerSet, symmetric: bool, op: F) -> IntegerSet
where
    F: Fn(&BigInt, &BigInt) -> BigInt,
{
    let n = u.len();
    let mut out = Vec::with_capacity(if symmetric { n * (n + 1) / 2 } else { n * n });
    for (i, x) in u.iter().enumerate() {
        let start = if symmetric { i } else { 0 };
        for y in &u.elements()[start..] {
            out.push(op(x, y));
        }
    }
    IntegerSet::from_unsorted(out)
}

/// `{u + v : u, v in U}`.
pub fn sumset(u: &IntegerSet) -> IntegerSet {
    pairwise(u, true, |x, y| x + y)
}

/// `{u - v : u, v in U}`.
pub fn diffset(u: &IntegerSet) -> IntegerSet {
    pairwise(u, false, |x, y| x - y)
}

/// Cardinalities of `W + W` and `W - W`, computed on lattice vectors.
pub fn lattice_sum_diff_sizes(w: &[LatticeVector]) -> (usize, usize) {
    let mut sums = BTreeSet::new();
    let mut diffs = BTreeSet::new();
    for x in w {
        for y in w {
            sums.insert(x.add(y));
            diffs.insert(x.sub(y));
        }
    }
    (sums.len(), diffs.len())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// `|U - U|`
    pub d: CountValue,
    /// `|U + U|`
    pub s: CountValue,
    /// `2 max(U) + 1`
    pub q: BigUint,
    pub theta: f64,
}

/// `theta >= 1 + (log|U - U| - log|U + U|) / log(2 max U + 1)` for a finite
/// `U` containing zero.
pub fn theta_bound_exact(u: &IntegerSet) -> Result<BoundReport> {
    if u.is_empty() {
        return Err(Error::DegenerateSet("U is empty"));
    }
    if !u.contains(&BigInt::zero()) {
        return Err(Error::DegenerateSet("U must contain 0"));
    }
    if u.min().is_some_and(|v| v.is_negative()) {
        return Err(Error::DegenerateSet(
            "U must be a set of nonnegative integers",
        ));
    }
    let max = u.max().expect("nonempty");
    if !max.is_positive() {
        return Err(Error::DegenerateSet("U = {0} gives log q = 0"));
    }
    let q = (max.magnitude() << 1u32) + 1u32;
    let d = CountValue::from_u64(diffset(u).len() as u64);
    let s = CountValue::from_u64(sumset(u).len() as u64);
    let log_q = wcount::ln_biguint(&q);
    let theta = 1.0 + (d.log_value - s.log_value) / log_q;
    Ok(BoundReport { d, s, q, theta })
}

/// `B ((2B + 1)^m - 1) / (2B)`, the largest value `g` can take on `[0, B]^m`.
pub fn max_u_bound(m: usize, b: usize) -> BigUint {
    if b == 0 {
        return BigUint::zero();
    }
    let base = BigUint::from(2 * b + 1);
    (base.pow(m as u32) - 1u32) * b / (2 * b)
}

/// Right-hand side of `|U - U| = sum_k C(m,k) |W(k, L-k, B-1)| |W(m-k, L, B)|`.
pub fn diffset_convolution(p: WParams) -> BigUint {
    let WParams { m, l, b } = p;
    if b == 0 {
        return BigUint::one();
    }
    (0..=m.min(l))
        .map(|k| {
            binomial(m as u64, k as u64).exact
                * count_w(WParams::new(k, l - k, b - 1)).exact
                * count_w(WParams::new(m - k, l, b)).exact
        })
        .sum()
}

/// Check `|U + U| = |W(m, 2L, 2B)|` by exhaustive pair enumeration.
pub fn verify_sumset_identity(p: WParams, cap: u64) -> Result<bool> {
    let u = build_u(p, cap)?;
    let lhs = BigUint::from(sumset(&u).len());
    Ok(lhs == count_w(WParams::new(p.m, 2 * p.l, 2 * p.b)).exact)
}

/// Check the convolution formula for `|U - U|` by exhaustive pair enumeration.
pub fn verify_diffset_identity(p: WParams, cap: u64) -> Result<bool> {
    if p.b == 0 {
        return Err(Error::invalid("B", p.b, "must be positive"));
    }
    let u = build_u(p, cap)?;
    let lhs = BigUint::from(diffset(&u).len());
    Ok(lhs == diffset_convolution(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Injectivity {
    pub on_sums: bool,
    pub on_diffs: bool,
}

impl Injectivity {
    pub fn holds(&self) -> bool {
        self.on_sums && self.on_diffs
    }
}

fn injectivity_with(w: &[LatticeVector], weights: &[BigInt]) -> Injectivity {
    let (lattice_sums, lattice_diffs) = lattice_sum_diff_sizes(w);
    let images: Vec<BigInt> = w.iter().map(|x| radix_value(x.coords(), weights)).collect();
    let mut sums = BTreeSet::new();
    let mut diffs = BTreeSet::new();
    for x in &images {
        for y in &images {
            sums.insert(x + y);
            diffs.insert(x - y);
        }
    }
    // The map is linear, so equal vectors give equal images; it is injective
    // exactly when no two distinct vectors collide, i.e. the counts agree.
    Injectivity {
        on_sums: sums.len() == lattice_sums,
        on_diffs: diffs.len() == lattice_diffs,
    }
}

/// Injectivity of `g` on `W + W` and `W - W`.
pub fn verify_injectivity(p: WParams, cap: u64) -> Result<Injectivity> {
    let w = enumerate_w(p, cap)?;
    Ok(injectivity_with(&w, &g_weights(p.m, p.b)))
}

/// Injectivity of `f` on `V + V` and `V - V` where `V = V(m, L)`.
pub fn verify_injectivity_f(m: usize, l: usize, cap: u64) -> Result<Injectivity> {
    let w = enumerate_w(WParams::new(m, l, l), cap)?;
    Ok(injectivity_with(&w, &f_weights(m, l)))
}

/// `|U| = |W|` for `U = g(W)`.
pub fn u_size_matches(p: WParams, u: &IntegerSet) -> bool {
    count_w(p).exact.to_usize() == Some(u.len())
}
