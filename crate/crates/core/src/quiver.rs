//! Quivers as skew-symmetric integer matrices: mutation, rotation,
//! periodicity detection and the period-1/period-2 construction machinery.

use crate::linalg::{self, IntMat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuiverError {
    #[error("node {0} out of range 1..={1}")]
    NodeOutOfRange(usize, usize),
    #[error("matrix is not skew-symmetric")]
    NotSkew,
    #[error("tuple is not palindromic")]
    NotPalindromic,
    #[error("quiver is not mutation-periodic with the required period")]
    NotPeriodic,
    #[error("invalid parameters: {0}")]
    BadParams(String),
}

/// Skew-symmetric exchange matrix of a quiver without 1- or 2-cycles.
/// Entry b[i][j] counts arrows from node i+1 to node j+1 (nodes are
/// 1-indexed in every public interface).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverMatrix {
    pub n: usize,
    pub b: Vec<Vec<i64>>,
}

impl QuiverMatrix {
    pub fn new(b: Vec<Vec<i64>>) -> Result<Self, QuiverError> {
        let n = b.len();
        if b.iter().any(|r| r.len() != n) {
            return Err(QuiverError::NotSkew);
        }
        for i in 0..n {
            for j in 0..n {
                if b[i][j] != -b[j][i] {
                    return Err(QuiverError::NotSkew);
                }
            }
        }
        Ok(QuiverMatrix { n, b })
    }

    pub fn zero(n: usize) -> Self {
        QuiverMatrix {
            n,
            b: vec![vec![0; n]; n],
        }
    }

    /// 1-indexed entry access.
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.b[i - 1][j - 1]
    }

    pub fn from_json(s: &str) -> Result<Self, QuiverError> {
        let raw: QuiverMatrix =
            serde_json::from_str(s).map_err(|_| QuiverError::NotSkew)?;
        if raw.b.len() != raw.n {
            return Err(QuiverError::NotSkew);
        }
        Self::new(raw.b)
    }

    pub fn to_int_mat(&self) -> IntMat {
        linalg::int_mat_from_i64(&self.b)
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().all(|r| r.iter().all(|&x| x == 0))
    }
}

/// Quiver mutation at node k (1-indexed).
pub fn mutate(q: &QuiverMatrix, k: usize) -> Result<QuiverMatrix, QuiverError> {
    if k < 1 || k > q.n {
        return Err(QuiverError::NodeOutOfRange(k, q.n));
    }
    let kk = k - 1;
    let n = q.n;
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            b[i][j] = if i == kk || j == kk {
                -q.b[i][j]
            } else {
                q.b[i][j]
                    + (q.b[i][kk].abs() * q.b[kk][j] + q.b[i][kk] * q.b[kk][j].abs()) / 2
            };
        }
    }
    Ok(QuiverMatrix { n, b })
}

/// Conjugation by the cyclic rotation rho: entry (i,j) becomes the old
/// entry (i-1, j-1) with indices mod n.
pub fn rotate(q: &QuiverMatrix) -> QuiverMatrix {
    let n = q.n;
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            b[i][j] = q.b[(i + n - 1) % n][(j + n - 1) % n];
        }
    }
    QuiverMatrix { n, b }
}

pub fn rotate_times(q: &QuiverMatrix, m: usize) -> QuiverMatrix {
    let mut out = q.clone();
    for _ in 0..m {
        out = rotate(&out);
    }
    out
}

/// The skew-rotation tau: subdiagonal ones with a -1 in the corner,
/// satisfying tau^n = -I.
pub fn tau(n: usize) -> Vec<Vec<i64>> {
    let mut t = vec![vec![0i64; n]; n];
    for r in 0..n - 1 {
        t[r + 1][r] = 1;
    }
    t[0][n - 1] = -1;
    t
}

fn mat_mul_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][l] * b[l][j];
            }
        }
    }
    out
}

fn mat_pow_i64(a: &[Vec<i64>], k: usize) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = 1;
    }
    for _ in 0..k {
        out = mat_mul_i64(&out, a);
    }
    out
}

fn mat_transpose_i64(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Smallest m <= max_m with mu_m ... mu_1 (q) = rho^m q rho^{-m}; the
/// mutations act on the successive quivers in the chain.
pub fn detect_period(q: &QuiverMatrix, max_m: usize) -> Option<usize> {
    let mut cur = q.clone();
    for m in 1..=max_m {
        let node = (m - 1) % q.n + 1;
        cur = mutate(&cur, node).expect("node in range");
        if cur == rotate_times(q, m) {
            return Some(m);
        }
    }
    None
}

/// True when node 1 is a sink and B commutes with the skew-rotation.
pub fn is_sink_type(q: &QuiverMatrix) -> bool {
    let sink = q.b[0].iter().all(|&x| x <= 0);
    if !sink {
        return false;
    }
    let t = tau(q.n);
    let conj = mat_mul_i64(&mat_mul_i64(&t, &q.b), &mat_transpose_i64(&t));
    conj == q.b
}

/// The primitive B_N^(k) = tau^k - (tau^t)^k, except B_{2r}^(r) = tau^r.
pub fn primitive(n: usize, k: usize) -> Result<QuiverMatrix, QuiverError> {
    if k < 1 || k > n / 2 {
        return Err(QuiverError::NodeOutOfRange(k, n / 2));
    }
    let t = tau(n);
    let tk = mat_pow_i64(&t, k);
    let b = if n == 2 * k {
        tk
    } else {
        let ttk = mat_pow_i64(&mat_transpose_i64(&t), k);
        (0..n)
            .map(|i| (0..n).map(|j| tk[i][j] - ttk[i][j]).collect())
            .collect()
    };
    Ok(QuiverMatrix { n, b })
}

/// Palindromic exponent tuple (m_1, ..., m_{N-1}) with m_j = m_{N-j}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PalindromicTuple {
    pub n: usize,
    pub m: Vec<i64>,
}

impl PalindromicTuple {
    pub fn new(m: Vec<i64>) -> Result<Self, QuiverError> {
        let n = m.len() + 1;
        if n < 2 {
            return Err(QuiverError::BadParams("tuple is empty".into()));
        }
        for j in 1..n {
            if m[j - 1] != m[n - j - 1] {
                return Err(QuiverError::NotPalindromic);
            }
        }
        Ok(PalindromicTuple { n, m })
    }

    /// m_j with 1-based index.
    pub fn mj(&self, j: usize) -> i64 {
        self.m[j - 1]
    }
}

/// epsilon_ij = (m_i |m_j| - m_j |m_i|) / 2 (always an integer).
pub fn epsilon(m: &[i64], i: usize, j: usize) -> i64 {
    let a = m[i - 1];
    let b = m[j - 1];
    (a * b.abs() - b * a.abs()) / 2
}

/// Build the period-1 quiver with first column (0, m_1, ..., m_{N-1}).
/// The lower triangle satisfies b_ij = b_{i-1,j-1} + eps_{j-1,i-1}.
pub fn build_period1(t: &PalindromicTuple) -> QuiverMatrix {
    let n = t.n;
    let mut b = vec![vec![0i64; n]; n];
    for i in 2..=n {
        b[i - 1][0] = t.mj(i - 1);
    }
    for j in 2..n {
        for i in j + 1..=n {
            b[i - 1][j - 1] = b[i - 2][j - 2] + epsilon(&t.m, j - 1, i - 1);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            b[i][j] = -b[j][i];
        }
    }
    QuiverMatrix { n, b }
}

/// Nested-primitive decomposition of a period-1 quiver: level k carries the
/// coefficients of the primitives of size N-2k embedded at offset k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveDecomposition {
    pub n: usize,
    /// levels[k] = coefficient vector (c_1, ..., c_{floor((N-2k)/2)}) of the
    /// primitives B_{N-2k}^(j) embedded at rows/columns k+1 ... N-k.
    pub levels: Vec<Vec<i64>>,
}

impl PrimitiveDecomposition {
    /// Reassemble the quiver from the nested levels.
    pub fn assemble(&self) -> QuiverMatrix {
        let n = self.n;
        let mut b = vec![vec![0i64; n]; n];
        for (k, coeffs) in self.levels.iter().enumerate() {
            let m = n - 2 * k;
            for (idx, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let p = primitive(m, idx + 1).expect("index in range");
                for i in 0..m {
                    for j in 0..m {
                        b[i + k][j + k] += c * p.b[i][j];
                    }
                }
            }
        }
        QuiverMatrix { n, b }
    }

    /// Human-readable form like "P4(1)-2P4(2)+2P2(1)".
    pub fn display(&self) -> String {
        let mut out = String::new();
        for (k, coeffs) in self.levels.iter().enumerate() {
            let m = self.n - 2 * k;
            for (idx, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                if c > 0 && !out.is_empty() {
                    out.push('+');
                }
                if c == -1 {
                    out.push('-');
                } else if c != 1 {
                    out.push_str(&c.to_string());
                }
                out.push_str(&format!("P{}({})", m, idx + 1));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

/// Peel a period-1 quiver into its nested primitive levels.
pub fn decompose_period1(q: &QuiverMatrix) -> Result<PrimitiveDecomposition, QuiverError> {
    if detect_period(q, 1) != Some(1) && !q.is_zero() {
        return Err(QuiverError::NotPeriodic);
    }
    let n = q.n;
    let mut residue = q.b.clone();
    let mut levels: Vec<Vec<i64>> = Vec::new();
    let mut k = 0usize;
    while n >= 2 * k + 2 {
        let m = n - 2 * k;
        // First column of the central block must be palindromic.
        let col: Vec<i64> = (1..m).map(|i| residue[k + i][k]).collect();
        for j in 1..m {
            if col[j - 1] != col[m - j - 1] {
                return Err(QuiverError::NotPeriodic);
            }
        }
        let coeffs: Vec<i64> = col[..m / 2].to_vec();
        for (idx, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let p = primitive(m, idx + 1).expect("index in range");
            for i in 0..m {
                for j in 0..m {
                    residue[i + k][j + k] -= c * p.b[i][j];
                }
            }
        }
        // The outer ring of the block must now vanish.
        for i in 0..m {
            if residue[k][k + i] != 0
                || residue[k + i][k] != 0
                || residue[k + m - 1][k + i] != 0
                || residue[k + i][k + m - 1] != 0
            {
                return Err(QuiverError::NotPeriodic);
            }
        }
        levels.push(coeffs);
        k += 1;
    }
    if residue.iter().any(|r| r.iter().any(|&x| x != 0)) {
        return Err(QuiverError::NotPeriodic);
    }
    Ok(PrimitiveDecomposition { n, levels })
}

fn sigma(m: &[i64]) -> Vec<i64> {
    let mut s = m.to_vec();
    let last = s.len() - 1;
    s.swap(0, last);
    s
}

fn build_with_sigma(m: &[i64]) -> (QuiverMatrix, QuiverMatrix) {
    // Coupled recursion: b_ij(m) = b_{i-1,j-1}(sigma m) + eps_{j-1,i-1}(m),
    // run simultaneously for m and sigma(m).
    let n = m.len() + 1;
    let sm = sigma(m);
    let mut a = vec![vec![0i64; n]; n];
    let mut c = vec![vec![0i64; n]; n];
    for i in 2..=n {
        a[i - 1][0] = m[i - 2];
        c[i - 1][0] = sm[i - 2];
    }
    for j in 2..n {
        for i in j + 1..=n {
            a[i - 1][j - 1] = c[i - 2][j - 2] + epsilon(m, j - 1, i - 1);
            c[i - 1][j - 1] = a[i - 2][j - 2] + epsilon(&sm, j - 1, i - 1);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            a[i][j] = -a[j][i];
            c[i][j] = -c[j][i];
        }
    }
    (QuiverMatrix { n, b: a }, QuiverMatrix { n, b: c })
}

/// Regular period-2 family builder. For N=4 the parameters are (r,s,t)
/// giving the tuple (r,-s,t); for N=5 they are (r,t) giving (r,-1,-1,t).
/// Returns (B(1), B(2)) with mu_1 B(1) = rho B(2) rho^{-1}.
pub fn build_period2(n: usize, params: &[i64]) -> Result<(QuiverMatrix, QuiverMatrix), QuiverError> {
    let m: Vec<i64> = match n {
        4 => {
            if params.len() != 3 {
                return Err(QuiverError::BadParams("N=4 expects (r,s,t)".into()));
            }
            let (r, s, t) = (params[0], params[1], params[2]);
            if r < 0 || t < 0 {
                return Err(QuiverError::BadParams("need m_1, m_3 >= 0".into()));
            }
            if s <= 0 {
                return Err(QuiverError::BadParams(
                    "need at least one negative even entry (m_2 = -s < 0)".into(),
                ));
            }
            if t == r {
                return Err(QuiverError::BadParams("N=4 requires t != r".into()));
            }
            vec![r, -s, t]
        }
        5 => {
            if params.len() != 2 {
                return Err(QuiverError::BadParams("N=5 expects (r,t)".into()));
            }
            let (r, t) = (params[0], params[1]);
            if r < 0 || t < 0 {
                return Err(QuiverError::BadParams("need m_1, m_4 >= 0".into()));
            }
            vec![r, -1, -1, t]
        }
        _ => {
            return Err(QuiverError::BadParams(
                "regular period-2 builder covers N = 4 and N = 5".into(),
            ))
        }
    };
    let (b1, b2) = build_with_sigma(&m);
    // The construction closes up only when the last row of B(1) equals
    // sigma(m); reject parameter choices that break it.
    let sm = sigma(&m);
    for j in 1..n {
        if b1.b[n - 1][j - 1] != sm[j - 1] {
            return Err(QuiverError::BadParams(
                "recursion boundary condition failed".into(),
            ));
        }
    }
    Ok((b1, b2))
}

/// The exceptional five-node period-2 pair, parameterized by m1.
pub fn exceptional_period2(m1: i64) -> (QuiverMatrix, QuiverMatrix) {
    let b1 = QuiverMatrix::new(vec![
        vec![0, -m1, -1, -m1 - 1, 1],
        vec![m1, 0, 1, -m1 - 1, -m1 - 1],
        vec![1, -1, 0, 1, -1],
        vec![m1 + 1, m1 + 1, -1, 0, -m1],
        vec![-1, m1 + 1, 1, m1, 0],
    ])
    .expect("fixture is skew");
    let b2 = QuiverMatrix::new(vec![
        vec![0, m1, 1, m1 + 1, -1],
        vec![-m1, 0, 1, -m1 - 1, -1],
        vec![-1, -1, 0, 1, 0],
        vec![-m1 - 1, m1 + 1, -1, 0, 1],
        vec![1, 1, 0, -1, 0],
    ])
    .expect("fixture is skew");
    (b1, b2)
}
