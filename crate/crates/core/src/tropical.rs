//! Max-plus (tropical) analysis of recurrence degree growth and the
//! resulting algebraic entropy classification.

use crate::dynamics::RecurrenceSpec;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

/// Tropicalized recurrence d_{n+N} + d_n = max(sum of positive-side
/// exponents times d, sum of negative-side exponents times d), seeded with
/// -1 at one initial position and 0 elsewhere. With the seed at position j,
/// term n of the output is the exponent of x_j in the monomial denominator
/// of the symbolic orbit entry x_n.
pub fn tropical_degrees(spec: &RecurrenceSpec, seed_pos: usize, count: usize) -> Vec<BigInt> {
    let n = spec.n;
    assert!((1..=n).contains(&seed_pos), "seed position out of range");
    let mut d = vec![BigInt::ZERO; n.min(count)];
    if seed_pos <= d.len() {
        d[seed_pos - 1] = BigInt::from(-1);
    }
    let (pos, neg) = spec.side_exponents();
    while d.len() < count {
        let base = d.len() - n;
        let mut a = BigInt::ZERO;
        let mut b = BigInt::ZERO;
        for j in 0..n - 1 {
            a += pos[j] * &d[base + j + 1];
            b += neg[j] * &d[base + j + 1];
        }
        let v = a.max(b) - &d[base];
        d.push(v);
    }
    d
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EntropyClass {
    /// One side of the exchange relation has total degree 3 or more, so
    /// degrees grow exponentially.
    PositiveEntropy { side_sum: i64 },
    /// x_{n+2m} x_n = x_{n+m} + 1 (globally periodic orbits, period 5m).
    PeriodicCaseI { m: usize },
    /// x_{n+N} x_n = x_{n+q} x_{n+N-q} + 1.
    PrimitiveCaseII { q: usize },
    /// N = 2m, x_{n+2m} x_n = x_{n+q} x_{n+2m-q} + x_{n+m}.
    CompositeCaseIII { q: usize },
    /// x_{n+N} x_n = x_{n+p} x_{n+N-p} + x_{n+q} x_{n+N-q}.
    GaleRobinsonCaseIV { p: usize, q: usize },
    /// The all-zero tuple (x_{n+N} x_n = 2) fits none of the four shapes.
    UnclassifiedZeroCandidate,
}

/// Shape of one side: None if it is not a sum of at most two unit exponents
/// placed symmetrically; Some(indices) otherwise (empty for the zero side).
fn side_shape(side: &[i64], n: usize) -> Option<Vec<usize>> {
    let mut idx = Vec::new();
    for (j, &c) in side.iter().enumerate() {
        let pos = j + 1;
        match c {
            0 => {}
            1 => idx.push(pos),
            2 if 2 * pos == n => {
                idx.push(pos);
                idx.push(pos);
            }
            _ => return None,
        }
    }
    match idx.len() {
        0 => Some(idx),
        1 if 2 * idx[0] == n => Some(idx),
        2 if idx[0] + idx[1] == n => Some(idx),
        _ => None,
    }
}

pub fn classify_entropy(spec: &RecurrenceSpec) -> EntropyClass {
    let n = spec.n;
    let (pos, neg) = spec.side_exponents();
    let sum = |v: &[i64]| v.iter().sum::<i64>();
    let (sp, sn) = (sum(&pos), sum(&neg));
    if sp == 0 && sn == 0 {
        return EntropyClass::UnclassifiedZeroCandidate;
    }
    if sp.max(sn) >= 3 {
        return EntropyClass::PositiveEntropy {
            side_sum: sp.max(sn),
        };
    }
    // Order the two sides by total degree, largest first.
    let (hi, lo) = if sp >= sn { (&pos, &neg) } else { (&neg, &pos) };
    let hi_shape = side_shape(hi, n);
    let lo_shape = side_shape(lo, n);
    match (hi_shape, lo_shape) {
        (Some(h), Some(l)) => match (h.len(), l.len()) {
            (1, 0) => EntropyClass::PeriodicCaseI { m: h[0] },
            (2, 0) => EntropyClass::PrimitiveCaseII { q: h[0].min(h[1]) },
            (2, 1) => EntropyClass::CompositeCaseIII { q: h[0].min(h[1]) },
            (2, 2) => {
                let a = h[0].min(h[1]);
                let b = l[0].min(l[1]);
                EntropyClass::GaleRobinsonCaseIV {
                    p: a.min(b),
                    q: a.max(b),
                }
            }
            _ => EntropyClass::PositiveEntropy { side_sum: sp.max(sn) },
        },
        // Palindromic tuples with side sums below 3 always match one of the
        // shapes above; a non-palindromic side cannot arise here, but keep a
        // conservative fallback instead of panicking.
        _ => EntropyClass::PositiveEntropy { side_sum: sp.max(sn) },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum GrowthFit {
    Periodic,
    Linear,
    Quadratic,
    Exponential { rate: f64 },
}

/// Some period matches exactly over the last `window` index pairs; periods
/// up to the available tail length are tried. Exact integer comparison
/// keeps growing sequences from ever matching.
fn eventually_periodic(seq: &[BigInt], window: usize) -> bool {
    let len = seq.len();
    if len < window + 1 {
        return false;
    }
    (1..=len - window).any(|p| (len - window - p..len - p).all(|i| seq[i] == seq[i + p]))
}

fn lag_diff(seq: &[BigInt], lag: usize) -> Vec<BigInt> {
    if seq.len() <= lag {
        return Vec::new();
    }
    (0..seq.len() - lag).map(|i| &seq[i + lag] - &seq[i]).collect()
}

/// Classify a degree sequence by exact lagged finite differences. The
/// polynomially growing sequences here are quasi-polynomials: polynomial in
/// n with coefficients periodic in n, where even the leading coefficient
/// can be non-constant (so consecutive differences may oscillate with
/// growing amplitude). Differencing at a lag that is a multiple of the
/// coefficient period removes one polynomial degree, so the sequence, a
/// first lagged difference, or a second lagged difference being eventually
/// periodic gives Periodic, Linear or Quadratic growth. Lags run to 3N and
/// candidate periods to the available tail length, which covers the
/// quasi-periods arising for N <= 8 (up to 40 for the six-node
/// two-quadratic-term families at 60 terms). Anything left is exponential,
/// with the rate estimated from log-ratios over the tail.
pub fn growth_fit(degrees: &[BigInt], n: usize) -> GrowthFit {
    let window = 2 * n;
    let max_lag = 3 * n;
    if eventually_periodic(degrees, window) {
        return GrowthFit::Periodic;
    }
    for lag in 1..=max_lag {
        if eventually_periodic(&lag_diff(degrees, lag), window) {
            return GrowthFit::Linear;
        }
    }
    for lag in 1..=max_lag {
        let d2 = lag_diff(&lag_diff(degrees, lag), lag);
        if eventually_periodic(&d2, window) {
            return GrowthFit::Quadratic;
        }
    }
    let tail: Vec<f64> = degrees
        .iter()
        .rev()
        .take(4 * n)
        .rev()
        .map(|x| x.to_f64().unwrap_or(f64::MAX))
        .collect();
    let mut logs = Vec::new();
    for w in tail.windows(2) {
        if w[0] > 0.0 && w[1] > 0.0 {
            logs.push((w[1] / w[0]).ln());
        }
    }
    let rate = if logs.is_empty() {
        0.0
    } else {
        logs.iter().sum::<f64>() / logs.len() as f64
    };
    GrowthFit::Exponential { rate }
}

/// Dominant eigenvalue of the linearized max-plus recurrence
/// d_{n+N} = sum_j c_j d_{n+j} - d_n, where c is the side of larger total
/// degree. Computed numerically by power iteration on the companion matrix.
pub fn linearized_rate(spec: &RecurrenceSpec) -> f64 {
    let n = spec.n;
    let (pos, neg) = spec.side_exponents();
    let sum = |v: &[i64]| v.iter().sum::<i64>();
    let c = if sum(&pos) >= sum(&neg) { pos } else { neg };
    // Companion matrix of x^N - c_{N-1} x^{N-1} - ... - c_1 x + 1.
    // Top row ordered for state (d_{k+N-1}, ..., d_k): coefficient of
    // d_{k+j} sits at column N-1-j; d_k itself carries -1.
    let mut top = vec![0.0f64; n];
    for j in 1..n {
        top[n - 1 - j] = c[j - 1] as f64;
    }
    top[n - 1] -= 1.0;
    let mut v = vec![1.0f64; n];
    let mut lambda = 1.0;
    for _ in 0..500 {
        let mut next = vec![0.0; n];
        next[0] = top.iter().zip(&v).map(|(a, b)| a * b).sum();
        for i in 1..n {
            next[i] = v[i - 1];
        }
        let norm = next.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        for x in &mut next {
            *x /= norm;
        }
        v = next;
    }
    lambda.ln()
}
