//! Presymplectic two-forms, log-canonical Poisson brackets, and reduction
//! to the symplectic leaf coordinates cut out by the kernel of the
//! exchange matrix.

use crate::algebra::{LaurentPoly, Rational};
use crate::dynamics::{recurrence_from_quiver, RecurrenceSpec};
use crate::linalg::{
    hnf_rows, int_mat_from_i64, integer_kernel, invert_rational, mat_mul_rat, rank_int,
    rat_mat_from_int, transpose, IntMat, RatMat,
};
use crate::quiver::{QuiverError, QuiverMatrix};
use crate::sample::Sampler;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PoissonError {
    #[error("point lies on the singular locus")]
    SingularPoint,
    #[error("reduced two-form is degenerate")]
    DegenerateReducedForm,
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

/// Log-canonical two-form with coefficient matrix b: at a point x the
/// matrix of the form is W_jk = b_jk / (x_j x_k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoForm {
    pub b: IntMat,
}

impl TwoForm {
    pub fn from_quiver(q: &QuiverMatrix) -> Self {
        TwoForm {
            b: q.to_int_mat(),
        }
    }

    pub fn rank(&self) -> usize {
        rank_int(&self.b)
    }

    pub fn value_at(&self, x: &[Rational]) -> Result<RatMat, PoissonError> {
        if x.iter().any(|v| v.is_zero()) {
            return Err(PoissonError::SingularPoint);
        }
        let n = self.b.len();
        let mut out = vec![vec![Rational::zero(); n]; n];
        for j in 0..n {
            for k in 0..n {
                if !self.b[j][k].is_zero() {
                    out[j][k] = Rational::from(self.b[j][k].clone()) / (&x[j] * &x[k]);
                }
            }
        }
        Ok(out)
    }
}

/// One application of the recurrence map: (x1,...,xN) -> (x2,...,xN,x_{N+1}).
fn map_step(spec: &RecurrenceSpec, x: &[Rational]) -> Result<Vec<Rational>, PoissonError> {
    let (pos, neg) = spec.side_exponents();
    let mono = |e: &[i64]| -> Result<Rational, PoissonError> {
        let mut acc = Rational::one();
        for (j, &p) in e.iter().enumerate() {
            if p != 0 {
                if x[j + 1].is_zero() {
                    return Err(PoissonError::SingularPoint);
                }
                acc *= crate::algebra::rational_pow(&x[j + 1], p);
            }
        }
        Ok(acc)
    };
    if x[0].is_zero() {
        return Err(PoissonError::SingularPoint);
    }
    let a = mono(&pos)?;
    let b = mono(&neg)?;
    let mut out = x[1..].to_vec();
    out.push((a + b) / x[0].clone());
    Ok(out)
}

/// Exact Jacobian of the recurrence map at x. Rows 1..N-1 are shifts; the
/// last row differentiates (A + B)/x1 where A and B are the two side
/// monomials in x2..xN.
fn map_jacobian(spec: &RecurrenceSpec, x: &[Rational]) -> Result<RatMat, PoissonError> {
    let n = spec.n;
    let (pos, neg) = spec.side_exponents();
    let mono = |e: &[i64]| -> Rational {
        let mut acc = Rational::one();
        for (j, &p) in e.iter().enumerate() {
            if p != 0 {
                acc *= crate::algebra::rational_pow(&x[j + 1], p);
            }
        }
        acc
    };
    if x.iter().any(|v| v.is_zero()) {
        return Err(PoissonError::SingularPoint);
    }
    let a = mono(&pos);
    let b = mono(&neg);
    let mut jac = vec![vec![Rational::zero(); n]; n];
    for i in 0..n - 1 {
        jac[i][i + 1] = Rational::one();
    }
    jac[n - 1][0] = -(&a + &b) / (&x[0] * &x[0]);
    for k in 1..n {
        let coeff = Rational::from(BigInt::from(pos[k - 1])) * &a
            + Rational::from(BigInt::from(neg[k - 1])) * &b;
        jac[n - 1][k] = coeff / (&x[0] * &x[k]);
    }
    Ok(jac)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub ok: bool,
    pub trials: usize,
    pub seed: u64,
}

/// Check J(x)^T W(phi(x)) J(x) = W(x) exactly at sampled rational points.
pub fn verify_form_invariance(
    q: &QuiverMatrix,
    trials: usize,
    seed: u64,
) -> Result<InvarianceReport, PoissonError> {
    let spec = recurrence_from_quiver(q)?;
    let form = TwoForm::from_quiver(q);
    let mut sampler = Sampler::new(seed);
    for _ in 0..trials {
        // Positive points stay clear of the singular locus, and the map
        // keeps them positive; resample defensively anyway.
        let mut x = sampler.positive_point(q.n);
        let mut guard = 0;
        let (y, jac) = loop {
            match (map_step(&spec, &x), map_jacobian(&spec, &x)) {
                (Ok(y), Ok(j)) => break (y, j),
                _ => {
                    guard += 1;
                    if guard > 100 {
                        return Err(PoissonError::SingularPoint);
                    }
                    x = sampler.positive_point(q.n);
                }
            }
        };
        let w_x = form.value_at(&x)?;
        let w_y = form.value_at(&y)?;
        let pulled = mat_mul_rat(&mat_mul_rat(&transpose(&jac), &w_y), &jac);
        if pulled != w_x {
            return Ok(InvarianceReport {
                ok: false,
                trials,
                seed,
            });
        }
    }
    Ok(InvarianceReport {
        ok: true,
        trials,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantBracket {
    /// Integer matrix C with C B = scale * I; the log-canonical bracket
    /// {x_j, x_k} = c_jk x_j x_k is invariant under the map.
    Nondegenerate { c: IntMat, scale: BigInt },
    /// B is singular; no nondegenerate log-canonical bracket exists on the
    /// full set of cluster variables.
    Degenerate { rank: usize },
}

fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return a.clone().max(b.clone());
    }
    (a * b).abs() / a.gcd(b)
}

/// Smallest positive rational lambda with lambda * M integer; returns the
/// integer matrix and lambda.
fn minimal_integer_multiple(m: &RatMat) -> (IntMat, Rational) {
    let mut l = BigInt::one();
    for row in m {
        for v in row {
            l = lcm_big(&l, v.denom());
        }
    }
    let scaled: IntMat = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| (v * Rational::from(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut g = BigInt::zero();
    for row in &scaled {
        for v in row {
            g = g.gcd(v);
        }
    }
    if g.is_zero() {
        return (scaled, Rational::from(l));
    }
    let out: IntMat = scaled
        .iter()
        .map(|row| row.iter().map(|v| v / &g).collect())
        .collect();
    (out, Rational::new(l, g))
}

/// The canonical invariant bracket: the minimal integer multiple of B^{-1}
/// when B is nondegenerate, or its rank when it is not.
pub fn invariant_bracket(q: &QuiverMatrix) -> InvariantBracket {
    let b = q.to_int_mat();
    let b_rat = rat_mat_from_int(&b);
    match invert_rational(&b_rat) {
        None => InvariantBracket::Degenerate {
            rank: rank_int(&b),
        },
        Some(inv) => {
            let (c, lambda) = minimal_integer_multiple(&inv);
            // C B = lambda I with lambda an integer for integer B.
            let scale = lambda.to_integer();
            InvariantBracket::Nondegenerate { c, scale }
        }
    }
}

/// Euler operator x_j d/dx_j: scales each term by its exponent of x_j.
fn euler(f: &LaurentPoly, j: usize) -> LaurentPoly {
    LaurentPoly::from_terms(
        f.nvars(),
        f.terms()
            .filter(|(e, _)| e[j] != 0)
            .map(|(e, c)| (e.clone(), c * BigInt::from(e[j]))),
    )
}

/// Log-canonical bracket {f, g} = sum_{j,k} c_jk (x_j df/dx_j)(x_k dg/dx_k).
pub fn bracket(f: &LaurentPoly, g: &LaurentPoly, c: &IntMat) -> LaurentPoly {
    let n = c.len();
    let fe: Vec<LaurentPoly> = (0..n).map(|j| euler(f, j)).collect();
    let ge: Vec<LaurentPoly> = (0..n).map(|k| euler(g, k)).collect();
    let mut out = LaurentPoly::zero(f.nvars());
    for j in 0..n {
        if fe[j].is_zero() {
            continue;
        }
        for k in 0..n {
            if c[j][k].is_zero() || ge[k].is_zero() {
                continue;
            }
            let mut term = fe[j].mul_ref(&ge[k]);
            term = term.scale(&c[j][k]);
            out = out.add_ref(&term);
        }
    }
    out
}

/// Jacobi identity for a skew tensor of polynomial entries P_ij(u):
/// sum_l (P_il dP_jk/du_l + P_jl dP_ki/du_l + P_kl dP_ij/du_l) = 0
/// for all i < j < k.
pub fn verify_jacobi(p: &[Vec<LaurentPoly>]) -> bool {
    let n = p.len();
    let nv = if n == 0 { 0 } else { p[0][0].nvars() };
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let mut acc = LaurentPoly::zero(nv);
                for l in 0..n {
                    let t1 = p[i][l].mul_ref(&p[j][k].partial(l));
                    let t2 = p[j][l].mul_ref(&p[k][i].partial(l));
                    let t3 = p[k][l].mul_ref(&p[i][j].partial(l));
                    acc = acc.add_ref(&t1).add_ref(&t2).add_ref(&t3);
                }
                if !acc.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafReduction {
    /// Basis of the integer kernel of B (Hermite form rows).
    pub u_basis: IntMat,
    /// Basis of the saturated lattice orthogonal to the kernel; the reduced
    /// variables are the monomials y_i = x^{v_i}.
    pub v_basis: IntMat,
    /// Matrix X of the reduced two-form, satisfying V^T X V = B.
    pub reduced_form: RatMat,
    /// Minimal integer multiple of X^{-1}: the coefficient matrix of the
    /// nondegenerate log-canonical bracket on the reduced variables.
    pub reduced_bracket: IntMat,
    /// Scalar lambda with reduced_bracket = lambda * X^{-1}.
    pub lambda: Rational,
}

/// Project out the kernel directions of B: pick monomial coordinates
/// y_i = x^{v_i} spanning the orthogonal lattice and compute the induced
/// nondegenerate two-form and bracket on them.
pub fn leaf_reduce(q: &QuiverMatrix) -> Result<LeafReduction, PoissonError> {
    let b = q.to_int_mat();
    let n = b.len();
    let u_basis = integer_kernel(&b);
    let v_basis: IntMat = if u_basis.is_empty() {
        hnf_rows(&int_mat_from_i64(
            &(0..n)
                .map(|i| {
                    let mut r = vec![0i64; n];
                    r[i] = 1;
                    r
                })
                .collect::<Vec<_>>(),
        ))
    } else {
        integer_kernel(&u_basis)
    };
    let v = rat_mat_from_int(&v_basis);
    let vt = transpose(&v);
    let g = mat_mul_rat(&v, &vt);
    let g_inv = invert_rational(&g).ok_or(PoissonError::DegenerateReducedForm)?;
    let vbv = mat_mul_rat(&mat_mul_rat(&v, &rat_mat_from_int(&b)), &vt);
    let x = mat_mul_rat(&mat_mul_rat(&g_inv, &vbv), &g_inv);
    let x_inv = invert_rational(&x).ok_or(PoissonError::DegenerateReducedForm)?;
    let (reduced_bracket, lambda) = minimal_integer_multiple(&x_inv);
    Ok(LeafReduction {
        u_basis,
        v_basis,
        reduced_form: x,
        reduced_bracket,
        lambda,
    })
}

/// The reduced variables as Laurent monomials in the original x.
pub fn reduced_monomials(v_basis: &IntMat) -> Vec<LaurentPoly> {
    let n = if v_basis.is_empty() {
        0
    } else {
        v_basis[0].len()
    };
    v_basis
        .iter()
        .map(|row| {
            let e: Vec<i64> = row
                .iter()
                .map(|x| i64::try_from(x).expect("small exponent"))
                .collect();
            LaurentPoly::from_terms(n, [(e, BigInt::one())])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::linalg::{lattice_eq, mat_mul_int};
    use crate::quiver::build_period1;
    use crate::quiver::PalindromicTuple;

    #[test]
    fn somos4_bracket_degenerate() {
        let r = invariant_bracket(&fixtures::somos4_quiver());
        assert_eq!(r, InvariantBracket::Degenerate { rank: 2 });
    }

    #[test]
    fn composite4_bracket() {
        let q = build_period1(&PalindromicTuple::new(vec![1, -1, 1]).unwrap());
        let InvariantBracket::Nondegenerate { c, scale } = invariant_bracket(&q) else {
            panic!("expected nondegenerate bracket");
        };
        let expect = int_mat_from_i64(&[
            vec![0, 1, 1, 2],
            vec![-1, 0, 1, 1],
            vec![-1, -1, 0, 1],
            vec![-2, -1, -1, 0],
        ]);
        assert_eq!(c, expect);
        assert_eq!(scale, BigInt::from(2));
        // C B = 2 I.
        let prod = mat_mul_int(&c, &q.to_int_mat());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { BigInt::from(2) } else { BigInt::zero() };
                assert_eq!(prod[i][j], want);
            }
        }
    }

    #[test]
    fn even_primitive_bracket_is_sign_toeplitz() {
        for m in [2usize, 3] {
            let q = fixtures::primitive_quiver(2 * m, 1);
            let InvariantBracket::Nondegenerate { c, scale } = invariant_bracket(&q) else {
                panic!("expected nondegenerate bracket");
            };
            assert_eq!(scale, BigInt::from(2));
            for j in 0..2 * m {
                for k in 0..2 * m {
                    let d = k as i64 - j as i64;
                    let want = if d.rem_euclid(2) == 1 { d.signum() } else { 0 };
                    assert_eq!(c[j][k], BigInt::from(want), "entry ({j},{k})");
                }
            }
        }
    }

    #[test]
    fn form_invariance_under_the_map() {
        for q in [fixtures::somos4_quiver(), fixtures::somos5_quiver()] {
            let report = verify_form_invariance(&q, 5, 42).unwrap();
            assert!(report.ok);
        }
        let comp = build_period1(&PalindromicTuple::new(vec![1, -1, 1]).unwrap());
        assert!(verify_form_invariance(&comp, 5, 7).unwrap().ok);
    }

    #[test]
    fn somos4_leaf_reduction() {
        let red = leaf_reduce(&fixtures::somos4_quiver()).unwrap();
        assert!(lattice_eq(
            &red.v_basis,
            &int_mat_from_i64(&fixtures::somos4_y_exponents())
        ));
        // Reduced bracket is {y1, y2} = y1 y2.
        assert_eq!(
            red.reduced_bracket,
            int_mat_from_i64(&[vec![0, 1], vec![-1, 0]])
        );
        // V^T X V recovers B.
        let v = rat_mat_from_int(&red.v_basis);
        let back = mat_mul_rat(
            &mat_mul_rat(&transpose(&v), &red.reduced_form),
            &v,
        );
        assert_eq!(back, rat_mat_from_int(&fixtures::somos4_quiver().to_int_mat()));
    }

    #[test]
    fn p31_leaf_reduction() {
        let red = leaf_reduce(&fixtures::primitive_quiver(3, 1)).unwrap();
        assert!(lattice_eq(
            &red.u_basis,
            &int_mat_from_i64(&[vec![1, -1, 1]])
        ));
        // y1 = x1 x2, y2 = x2 x3.
        assert!(lattice_eq(
            &red.v_basis,
            &int_mat_from_i64(&[vec![1, 1, 0], vec![0, 1, 1]])
        ));
    }

    #[test]
    fn log_canonical_brackets_satisfy_jacobi() {
        // P_jk = c_jk u_j u_k always passes; a generic skew tensor fails.
        let c = int_mat_from_i64(&[
            vec![0, 1, 1, 2],
            vec![-1, 0, 1, 1],
            vec![-1, -1, 0, 1],
            vec![-2, -1, -1, 0],
        ]);
        let n = 4;
        let mut p = vec![vec![LaurentPoly::zero(n); n]; n];
        for j in 0..n {
            for k in 0..n {
                let mut e = vec![0i64; n];
                e[j] += 1;
                e[k] += 1;
                p[j][k] = LaurentPoly::from_terms(n, [(e, c[j][k].clone())]);
            }
        }
        assert!(verify_jacobi(&p));

        let u = |i: usize| LaurentPoly::var(3, i);
        let mut bad = vec![vec![LaurentPoly::zero(3); 3]; 3];
        bad[0][1] = u(1).mul_ref(&u(2));
        bad[1][0] = bad[0][1].neg_ref();
        bad[0][2] = u(0);
        bad[2][0] = bad[0][2].neg_ref();
        bad[1][2] = LaurentPoly::one(3);
        bad[2][1] = bad[1][2].neg_ref();
        assert!(!verify_jacobi(&bad));
    }

    #[test]
    fn bracket_of_coordinates() {
        let c = int_mat_from_i64(&[vec![0, 1], vec![-1, 0]]);
        let x0 = LaurentPoly::var(2, 0);
        let x1 = LaurentPoly::var(2, 1);
        assert_eq!(bracket(&x0, &x1, &c), x0.mul_ref(&x1));
        assert_eq!(bracket(&x1, &x0, &c), x0.mul_ref(&x1).neg_ref());
    }
}
