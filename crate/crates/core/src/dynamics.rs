//! Cluster dynamics: recurrences attached to periodic quivers, exact
//! numeric orbits, symbolic (Laurent) orbits, and the two-component
//! period-2 recurrences.

use crate::algebra::{rational_pow, AlgebraError, LaurentPoly, Rational};
use crate::quiver::{detect_period, PalindromicTuple, QuiverError, QuiverMatrix};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DynamicsError {
    #[error("division by zero at orbit index {0}")]
    ZeroDivisorAt(usize),
    #[error("Laurent property violated at orbit index {0}")]
    LaurentViolationAt(usize),
    #[error("resource limit exceeded at orbit index {index}: {terms} terms, max |exponent| {max_exp}")]
    ResourceLimit {
        index: usize,
        terms: usize,
        max_exp: i64,
    },
    #[error("initial data has wrong length: expected {0}, got {1}")]
    BadInitLength(usize, usize),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Recurrence x_{n+N} x_n = prod_{m_j >= 0} x_{n+j}^{m_j} + prod_{m_j <= 0} x_{n+j}^{-m_j}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceSpec {
    pub n: usize,
    pub m: Vec<i64>,
}

impl RecurrenceSpec {
    pub fn new(tuple: PalindromicTuple) -> Self {
        RecurrenceSpec {
            n: tuple.n,
            m: tuple.m,
        }
    }

    pub fn from_m(m: Vec<i64>) -> Result<Self, QuiverError> {
        Ok(Self::new(PalindromicTuple::new(m)?))
    }

    pub fn tuple(&self) -> PalindromicTuple {
        PalindromicTuple::new(self.m.clone()).expect("spec is palindromic")
    }

    /// Exponents of the two monomials on the right-hand side:
    /// (positive part, negative part), both indexed by the shift j = 1..N-1.
    pub fn side_exponents(&self) -> (Vec<i64>, Vec<i64>) {
        let pos = self.m.iter().map(|&x| x.max(0)).collect();
        let neg = self.m.iter().map(|&x| (-x).max(0)).collect();
        (pos, neg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period2Spec {
    pub n: usize,
    pub params: Vec<i64>,
    /// Whether a one-off boundary relation precedes the steady recurrence
    /// (the odd-N case).
    pub boundary: bool,
}

impl Period2Spec {
    pub fn new(n: usize, params: Vec<i64>) -> Result<Self, QuiverError> {
        match n {
            4 if params.len() == 3 => Ok(Period2Spec {
                n,
                params,
                boundary: false,
            }),
            5 if params.len() == 2 => Ok(Period2Spec {
                n,
                params,
                boundary: true,
            }),
            _ => Err(QuiverError::BadParams(
                "two-component recurrences cover N = 4 (r,s,t) and N = 5 (r,t)".into(),
            )),
        }
    }
}

/// Exact numeric orbit; `halted_at` records the first index at which a zero
/// divisor stopped iteration (the singular hyperplanes are meaningful, not
/// a panic).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub values: Vec<Rational>,
    pub halted_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOrbit {
    pub values: Vec<(Rational, Rational)>,
    pub halted_at: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicOrbit {
    pub nvars: usize,
    pub values: Vec<LaurentPoly>,
}

/// Caps for symbolic iteration; exponents grow quadratically, so late
/// entries can explode without a guard.
#[derive(Debug, Clone, Copy)]
pub struct ResourceCaps {
    pub max_terms: usize,
    pub max_abs_exponent: i64,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps {
            max_terms: 2_000_000,
            max_abs_exponent: 1_000_000,
        }
    }
}

/// Exchange relation at node k (1-indexed): replaces cluster entry k by
/// (prod_{b_ik>0} x_i^{b_ik} + prod_{b_ik<0} x_i^{-b_ik}) / x_k.
pub fn exchange_step(
    q: &QuiverMatrix,
    cluster: &[LaurentPoly],
    k: usize,
) -> Result<Vec<LaurentPoly>, DynamicsError> {
    if k < 1 || k > q.n {
        return Err(QuiverError::NodeOutOfRange(k, q.n).into());
    }
    if cluster.len() != q.n {
        return Err(DynamicsError::BadInitLength(q.n, cluster.len()));
    }
    let nvars = cluster[0].nvars();
    let mut pos = LaurentPoly::one(nvars);
    let mut neg = LaurentPoly::one(nvars);
    for i in 1..=q.n {
        let b = q.entry(i, k);
        if b > 0 {
            pos = pos.mul_ref(&cluster[i - 1].pow(b as u32));
        } else if b < 0 {
            neg = neg.mul_ref(&cluster[i - 1].pow((-b) as u32));
        }
    }
    let numerator = pos.add_ref(&neg);
    let new_k = numerator
        .div_exact(&cluster[k - 1])
        .map_err(|_| DynamicsError::LaurentViolationAt(k))?;
    let mut out = cluster.to_vec();
    out[k - 1] = new_k;
    Ok(out)
}

/// Read the recurrence exponents off the first column of a period-1 quiver.
pub fn recurrence_from_quiver(q: &QuiverMatrix) -> Result<RecurrenceSpec, QuiverError> {
    if detect_period(q, 1) != Some(1) && !q.is_zero() {
        return Err(QuiverError::NotPeriodic);
    }
    let m: Vec<i64> = (2..=q.n).map(|i| q.entry(i, 1)).collect();
    Ok(RecurrenceSpec::new(PalindromicTuple::new(m)?))
}

fn numeric_step(spec: &RecurrenceSpec, window: &[Rational]) -> Option<Rational> {
    // window holds x_n .. x_{n+N-1}; returns x_{n+N} or None on division by zero.
    let mut pos = Rational::from(num_bigint::BigInt::from(1));
    let mut neg = pos.clone();
    for (j, &mj) in spec.m.iter().enumerate() {
        if mj > 0 {
            pos *= rational_pow(&window[j + 1], mj);
        } else if mj < 0 {
            if window[j + 1].is_zero() {
                return None;
            }
            neg *= rational_pow(&window[j + 1], -mj);
        }
    }
    if window[0].is_zero() {
        return None;
    }
    Some((pos + neg) / window[0].clone())
}

pub fn iterate(
    spec: &RecurrenceSpec,
    init: &[Rational],
    count: usize,
) -> Result<Orbit, DynamicsError> {
    if init.len() != spec.n {
        return Err(DynamicsError::BadInitLength(spec.n, init.len()));
    }
    let mut values: Vec<Rational> = init.to_vec();
    let mut halted_at = None;
    while values.len() < count {
        let n0 = values.len() - spec.n;
        let window = &values[n0..];
        match numeric_step(spec, window) {
            Some(v) => values.push(v),
            None => {
                halted_at = Some(values.len() + 1);
                break;
            }
        }
    }
    values.truncate(count);
    Ok(Orbit { values, halted_at })
}

pub fn iterate_symbolic(
    spec: &RecurrenceSpec,
    count: usize,
    caps: ResourceCaps,
) -> Result<SymbolicOrbit, DynamicsError> {
    let n = spec.n;
    let mut values: Vec<LaurentPoly> = (0..n).map(|i| LaurentPoly::var(n, i)).collect();
    while values.len() < count {
        let idx = values.len(); // 0-based index of the entry being produced
        let base = idx - n;
        let mut pos = LaurentPoly::one(n);
        let mut neg = LaurentPoly::one(n);
        for (j, &mj) in spec.m.iter().enumerate() {
            if mj > 0 {
                pos = pos.mul_ref(&values[base + j + 1].pow(mj as u32));
            } else if mj < 0 {
                neg = neg.mul_ref(&values[base + j + 1].pow((-mj) as u32));
            }
        }
        let numerator = pos.add_ref(&neg);
        let next = numerator
            .div_exact(&values[base])
            .map_err(|_| DynamicsError::LaurentViolationAt(idx + 1))?;
        if next.num_terms() > caps.max_terms || next.max_abs_exponent() > caps.max_abs_exponent {
            return Err(DynamicsError::ResourceLimit {
                index: idx + 1,
                terms: next.num_terms(),
                max_exp: next.max_abs_exponent(),
            });
        }
        values.push(next);
    }
    values.truncate(count);
    Ok(SymbolicOrbit { nvars: n, values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LaurentReport {
    pub ok: bool,
    pub failure_index: Option<usize>,
    /// Denominator exponent vectors, one per orbit entry (entry j of vector
    /// n is the exponent of x_{j+1} in the monomial denominator of x_{n+1};
    /// negative values mean the variable divides the numerator).
    pub denominators: Vec<Vec<i64>>,
}

pub fn verify_laurent(spec: &RecurrenceSpec, count: usize, caps: ResourceCaps) -> LaurentReport {
    match iterate_symbolic(spec, count, caps) {
        Ok(orbit) => LaurentReport {
            ok: true,
            failure_index: None,
            denominators: orbit
                .values
                .iter()
                .map(|p| p.denominator_exponents())
                .collect(),
        },
        Err(DynamicsError::LaurentViolationAt(i)) => LaurentReport {
            ok: false,
            failure_index: Some(i),
            denominators: vec![],
        },
        Err(_) => LaurentReport {
            ok: false,
            failure_index: None,
            denominators: vec![],
        },
    }
}

fn pow_nonneg(v: &Rational, e: i64) -> Rational {
    rational_pow(v, e)
}

/// Two-component orbit of the alternating period-2 recurrences. Initial
/// data is the cluster in interleaved order: (x1,y1,x2,y2) for N=4 and
/// (x1,y1,x2,y2,x3) for N=5.
pub fn iterate_period2(
    spec: &Period2Spec,
    init: &[Rational],
    count: usize,
) -> Result<PairOrbit, DynamicsError> {
    if init.len() != spec.n {
        return Err(DynamicsError::BadInitLength(spec.n, init.len()));
    }
    // Interleaved sequence x1, y1, x2, y2, ... with pairs assembled at the end.
    let mut seq: Vec<Rational> = init.to_vec();
    let mut halted_at = None;
    let need = 2 * count;
    match spec.n {
        4 => {
            let (r, s, t) = (spec.params[0], spec.params[1], spec.params[2]);
            while seq.len() < need {
                let k = seq.len();
                // Producing x_{i+2} when k is even, y_{i+2} when k is odd;
                // in both cases divide by the entry N positions back.
                let den = seq[k - 4].clone();
                if den.is_zero() {
                    halted_at = Some(k / 2 + 1);
                    break;
                }
                let val = if k % 2 == 0 {
                    // x_{n+2} x_n = y_n^r y_{n+1}^t + x_{n+1}^s
                    let a = pow_nonneg(&seq[k - 3], r) * pow_nonneg(&seq[k - 1], t);
                    let b = pow_nonneg(&seq[k - 2], s);
                    (a + b) / den
                } else {
                    // y_{n+2} y_n = x_{n+2}^r x_{n+1}^t + y_{n+1}^s
                    let a = pow_nonneg(&seq[k - 1], r) * pow_nonneg(&seq[k - 3], t);
                    let b = pow_nonneg(&seq[k - 2], s);
                    (a + b) / den
                };
                seq.push(val);
            }
        }
        5 => {
            let (r, t) = (spec.params[0], spec.params[1]);
            // Boundary relation first: x1 y3 = y1^r x3^t + x2 y2.
            if seq.len() < need {
                if seq[0].is_zero() {
                    halted_at = Some(3);
                } else {
                    let v = (pow_nonneg(&seq[1], r) * pow_nonneg(&seq[4], t)
                        + &seq[2] * &seq[3])
                        / seq[0].clone();
                    seq.push(v);
                }
            }
            while halted_at.is_none() && seq.len() < need {
                let k = seq.len();
                let val = if k % 2 == 0 {
                    // y_n x_{n+3} = y_{n+2}^r x_{n+1}^t + x_{n+2} y_{n+1}
                    let den = seq[k - 5].clone();
                    if den.is_zero() {
                        halted_at = Some(k / 2 + 1);
                        break;
                    }
                    (pow_nonneg(&seq[k - 1], r) * pow_nonneg(&seq[k - 4], t)
                        + &seq[k - 2] * &seq[k - 3])
                        / den
                } else {
                    // x_{n+1} y_{n+3} = y_{n+1}^r x_{n+3}^t + x_{n+2} y_{n+2}
                    let den = seq[k - 5].clone();
                    if den.is_zero() {
                        halted_at = Some(k / 2 + 1);
                        break;
                    }
                    (pow_nonneg(&seq[k - 4], r) * pow_nonneg(&seq[k - 1], t)
                        + &seq[k - 3] * &seq[k - 2])
                        / den
                };
                seq.push(val);
            }
        }
        _ => {
            return Err(QuiverError::BadParams("unsupported node count".into()).into());
        }
    }
    let mut values = Vec::new();
    let mut it = seq.into_iter();
    while let (Some(x), Some(y)) = (it.next(), it.next()) {
        if values.len() == count {
            break;
        }
        values.push((x, y));
    }
    values.truncate(count);
    Ok(PairOrbit { values, halted_at })
}

/// Load either a plain recurrence spec or a period-2 spec from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecFile {
    Period2 { period2: Period2Spec },
    Recurrence(RecurrenceSpec),
}
