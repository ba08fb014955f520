//! Sparse multivariate Laurent polynomials with big-integer coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by the exponent vector, so the
//! internal order is lexicographic and every polynomial has a unique
//! canonical form (no zero coefficients are ever stored).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("division is not exact")]
    NotDivisible,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("evaluation point has a zero coordinate under a negative exponent (variable {0})")]
    PoleAtPoint(usize),
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("only monomials can be raised to a negative power")]
    NegativePowerOfSum,
}

/// Exponent vector of a single Laurent monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<i64>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        let mut acc = Rational::one();
        for (j, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if point[j].is_zero() {
                if e < 0 {
                    return Err(AlgebraError::PoleAtPoint(j));
                }
                return Ok(Rational::zero());
            }
            acc *= rational_pow(&point[j], e);
        }
        Ok(acc)
    }
}

pub fn rational_pow(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut b = base.clone();
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    if exp < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Sparse Laurent polynomial in `nvars` variables over the integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i64>, BigInt>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        LaurentPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn constant_i64(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigInt::from(c))
    }

    /// The variable x_{idx} (0-based).
    pub fn var(nvars: usize, idx: usize) -> Self {
        Self::monomial(nvars, &Monomial::var(nvars, idx), BigInt::one())
    }

    pub fn monomial(nvars: usize, m: &Monomial, c: BigInt) -> Self {
        assert_eq!(m.0.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m.0.clone(), c);
        }
        p
    }

    pub fn from_terms<I>(nvars: usize, it: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, BigInt)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&vec![0i64; self.nvars])
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i64>, &BigInt)> {
        self.terms.iter()
    }

    /// True when the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(Monomial, BigInt)> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some((Monomial(e.clone()), c.clone()))
        } else {
            None
        }
    }

    fn add_term(&mut self, e: Vec<i64>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn max_total_degree(&self) -> i64 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    /// Largest absolute exponent appearing in any term.
    pub fn max_abs_exponent(&self) -> i64 {
        self.terms
            .keys()
            .flat_map(|e| e.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Per-variable minimum exponent over all terms (0 for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i64> {
        let mut mins = vec![i64::MAX; self.nvars];
        for e in self.terms.keys() {
            for (j, &x) in e.iter().enumerate() {
                mins[j] = mins[j].min(x);
            }
        }
        if self.terms.is_empty() {
            mins = vec![0; self.nvars];
        }
        mins
    }

    /// Per-variable maximum exponent over all terms.
    pub fn max_exponents(&self) -> Vec<i64> {
        let mut maxs = vec![i64::MIN; self.nvars];
        for e in self.terms.keys() {
            for (j, &x) in e.iter().enumerate() {
                maxs[j] = maxs[j].max(x);
            }
        }
        if self.terms.is_empty() {
            maxs = vec![0; self.nvars];
        }
        maxs
    }

    /// Exponent vector of the monomial denominator: for each variable the
    /// negated minimum exponent, so `x^(-1)` reports denominator exponent 1
    /// and `x` reports -1.
    pub fn denominator_exponents(&self) -> Vec<i64> {
        self.min_exponents().iter().map(|&m| -m).collect()
    }

    pub fn neg_ref(&self) -> Self {
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c))
                .collect(),
        }
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.clone(), k * c))
                .collect(),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&BigInt::from(c))
    }

    /// Multiply by a single monomial term.
    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        LaurentPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| {
                    (
                        e.iter().zip(&m.0).map(|(a, b)| a + b).collect(),
                        k * c,
                    )
                })
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    /// Signed power; negative exponents are only defined for monomials with
    /// a unit coefficient up to sign.
    pub fn pow_i64(&self, exp: i64) -> Result<Self, AlgebraError> {
        if exp >= 0 {
            return Ok(self.pow(exp as u32));
        }
        match self.as_monomial() {
            Some((m, c)) => {
                let inv = Monomial(m.0.iter().map(|x| -x).collect());
                let unit = Self::monomial(self.nvars, &inv, BigInt::one());
                if c.is_one() {
                    Ok(unit.pow((-exp) as u32))
                } else if (-&c).is_one() {
                    let p = unit.pow((-exp) as u32);
                    Ok(if exp % 2 == 0 { p } else { p.neg_ref() })
                } else {
                    Err(AlgebraError::NegativePowerOfSum)
                }
            }
            None => Err(AlgebraError::NegativePowerOfSum),
        }
    }

    fn leading(&self) -> Option<(&Vec<i64>, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Exact division. Returns `NotDivisible` when `self` is not a Laurent
    /// polynomial multiple of `divisor`.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, AlgebraError> {
        assert_eq!(self.nvars, divisor.nvars);
        if divisor.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        // Fast path: divisor is a single term.
        if let Some((m, c)) = divisor.as_monomial() {
            let inv = Monomial(m.0.iter().map(|x| -x).collect());
            let mut out = Self::zero(self.nvars);
            for (e, k) in &self.terms {
                let (q, r) = num_integer::Integer::div_rem(k, &c);
                if !r.is_zero() {
                    return Err(AlgebraError::NotDivisible);
                }
                out.add_term(e.iter().zip(&inv.0).map(|(a, b)| a + b).collect(), q);
            }
            return Ok(out);
        }
        // If the quotient exists its exponent range in each variable is
        // pinned by the ranges of the operands; candidate terms outside
        // that box prove the division inexact.
        let lo: Vec<i64> = self
            .min_exponents()
            .iter()
            .zip(divisor.min_exponents())
            .map(|(a, b)| a - b)
            .collect();
        let hi: Vec<i64> = self
            .max_exponents()
            .iter()
            .zip(divisor.max_exponents())
            .map(|(a, b)| a - b)
            .collect();
        let (dlead_e, dlead_c) = divisor.leading().unwrap();
        let dlead_e = dlead_e.clone();
        let dlead_c = dlead_c.clone();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((rlead_e, rlead_c)) = rem.leading() {
            let qe: Vec<i64> = rlead_e.iter().zip(&dlead_e).map(|(a, b)| a - b).collect();
            if qe
                .iter()
                .zip(lo.iter().zip(&hi))
                .any(|(x, (l, h))| x < l || x > h)
            {
                return Err(AlgebraError::NotDivisible);
            }
            let (qc, r) = num_integer::Integer::div_rem(rlead_c, &dlead_c);
            if !r.is_zero() {
                return Err(AlgebraError::NotDivisible);
            }
            let qm = Monomial(qe);
            rem = rem.sub_ref(&divisor.mul_term(&qm, &qc));
            quot.add_term(qm.0, qc);
        }
        Ok(quot)
    }

    /// Partial derivative with respect to variable `idx` (0-based).
    pub fn partial(&self, idx: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[idx] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[idx] -= 1;
            out.add_term(ne, c * BigInt::from(e[idx]));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational, AlgebraError> {
        if point.len() != self.nvars {
            return Err(AlgebraError::VariableMismatch(point.len(), self.nvars));
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let m = Monomial(e.clone()).eval(point)?;
            acc += m * Rational::from(c.clone());
        }
        Ok(acc)
    }

    /// Substitute `args[j]` for variable j. The result must again be a
    /// Laurent polynomial; negative powers of non-monomial arguments are
    /// resolved through exact division.
    pub fn compose(&self, args: &[Self]) -> Result<Self, AlgebraError> {
        if args.len() != self.nvars {
            return Err(AlgebraError::VariableMismatch(args.len(), self.nvars));
        }
        if self.is_zero() {
            return Ok(Self::zero(args.first().map(|a| a.nvars).unwrap_or(0)));
        }
        let out_vars = args[0].nvars;
        let mins = self.min_exponents();
        let shifts: Vec<i64> = mins.iter().map(|&m| (-m).max(0)).collect();
        let mut num = Self::zero(out_vars);
        for (e, c) in &self.terms {
            let mut t = Self::constant(out_vars, c.clone());
            for (j, a) in args.iter().enumerate() {
                let p = e[j] + shifts[j];
                debug_assert!(p >= 0);
                if p != 0 {
                    t = t.mul_ref(&a.pow(p as u32));
                }
            }
            num = num.add_ref(&t);
        }
        let mut den = Self::one(out_vars);
        for (j, a) in args.iter().enumerate() {
            if shifts[j] != 0 {
                den = den.mul_ref(&a.pow(shifts[j] as u32));
            }
        }
        num.div_exact(&den)
    }

    /// Split into homogeneous components keyed by total degree.
    pub fn homogeneous_components(&self) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d: i64 = e.iter().sum();
            out.entry(d)
                .or_insert_with(|| Self::zero(self.nvars))
                .add_term(e.clone(), c.clone());
        }
        out
    }

    /// Content of the coefficient vector (gcd, always nonnegative).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = num_integer::Integer::gcd(&g, c);
        }
        g
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: Self) -> LaurentPoly {
        self.add_ref(rhs)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: Self) -> LaurentPoly {
        self.sub_ref(rhs)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: Self) -> LaurentPoly {
        self.mul_ref(rhs)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_ref()
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            let is_const = e.iter().all(|&x| x == 0);
            if !a.is_one() || is_const {
                write!(f, "{a}")?;
                if !is_const {
                    write!(f, "*")?;
                }
            }
            let mut sep = false;
            for (j, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                if sep {
                    write!(f, "*")?;
                }
                sep = true;
                if x == 1 {
                    write!(f, "x{}", j + 1)?;
                } else {
                    write!(f, "x{}^{}", j + 1, x)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<i64>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    nvars: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exponents: e.clone(),
                    coeff: c.to_string(),
                })
                .collect(),
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(d)?;
        let mut p = LaurentPoly::zero(repr.nvars);
        for t in repr.terms {
            if t.exponents.len() != repr.nvars {
                return Err(D::Error::custom("exponent vector length mismatch"));
            }
            let c = BigInt::from_str(&t.coeff).map_err(D::Error::custom)?;
            p.add_term(t.exponents, c);
        }
        Ok(p)
    }
}

/// Parse a rational from a `p` or `p/q` string.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        BigInt::from_str(s).ok().map(Rational::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xv(n: usize, i: usize) -> LaurentPoly {
        LaurentPoly::var(n, i)
    }

    #[test]
    fn mul_collects_terms() {
        // (x + y)(x - y) = x^2 - y^2
        let x = xv(2, 0);
        let y = xv(2, 1);
        let p = (&x + &y).mul_ref(&x.sub_ref(&y));
        assert_eq!(p.num_terms(), 2);
        assert_eq!(p, (&x * &x).sub_ref(&(&y * &y)));
    }

    #[test]
    fn div_exact_recovers_factor() {
        let x = xv(2, 0);
        let y = xv(2, 1);
        let a = &x + &y;
        let b = (&x * &x).add_ref(&LaurentPoly::constant_i64(2, 3));
        let prod = a.mul_ref(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
    }

    #[test]
    fn div_exact_detects_failure() {
        let x = xv(1, 0);
        let a = (&x * &x).add_ref(&LaurentPoly::one(1)); // x^2 + 1
        let b = x.add_ref(&LaurentPoly::one(1)); // x + 1
        assert_eq!(a.div_exact(&b), Err(AlgebraError::NotDivisible));
    }

    #[test]
    fn div_exact_laurent_shift() {
        // (x^-1 + y) / x^-1 = 1 + x*y
        let n = 2;
        let p = LaurentPoly::from_terms(
            n,
            vec![
                (vec![-1, 0], BigInt::from(1)),
                (vec![0, 1], BigInt::from(1)),
            ],
        );
        let d = LaurentPoly::from_terms(n, vec![(vec![-1, 0], BigInt::from(1))]);
        let q = p.div_exact(&d).unwrap();
        let expect = LaurentPoly::from_terms(
            n,
            vec![(vec![0, 0], BigInt::from(1)), (vec![1, 1], BigInt::from(1))],
        );
        assert_eq!(q, expect);
    }

    #[test]
    fn partial_and_eval() {
        // f = 3 x^2 y^-1, df/dx = 6 x y^-1, df/dy = -3 x^2 y^-2
        let f = LaurentPoly::from_terms(2, vec![(vec![2, -1], BigInt::from(3))]);
        let fx = f.partial(0);
        let fy = f.partial(1);
        let pt = vec![Rational::from(BigInt::from(2)), Rational::from(BigInt::from(4))];
        assert_eq!(f.eval(&pt).unwrap(), Rational::new(BigInt::from(3), BigInt::from(1)));
        assert_eq!(fx.eval(&pt).unwrap(), Rational::from(BigInt::from(3)));
        assert_eq!(
            fy.eval(&pt).unwrap(),
            Rational::new(BigInt::from(-3), BigInt::from(4))
        );
    }

    #[test]
    fn eval_pole_detected() {
        let f = LaurentPoly::from_terms(1, vec![(vec![-1], BigInt::from(1))]);
        let res = f.eval(&[Rational::zero()]);
        assert_eq!(res, Err(AlgebraError::PoleAtPoint(0)));
    }

    #[test]
    fn compose_with_division() {
        // f = x1 / x2; substitute x1 -> y^2, x2 -> y gives y.
        let f = LaurentPoly::from_terms(2, vec![(vec![1, -1], BigInt::from(1))]);
        let y = xv(1, 0);
        let y2 = y.pow(2);
        assert_eq!(f.compose(&[y2, y.clone()]).unwrap(), y);
    }

    #[test]
    fn serde_roundtrip() {
        let f = LaurentPoly::from_terms(
            2,
            vec![
                (vec![2, -1], BigInt::from(3)),
                (vec![0, 0], BigInt::from(-7)),
            ],
        );
        let s = serde_json::to_string(&f).unwrap();
        let g: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
