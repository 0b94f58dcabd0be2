//! Channel ingestion, Gram matrices and the 2×2 Hermitian primitives the
//! rest of the solver is built on.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// 2×2 complex matrix.
pub type CMat2 = Matrix2<C64>;
/// 2×1 complex column vector.
pub type CVec2 = Vector2<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// First coordinate vector `[1, 0]ᵀ`.
pub fn e1() -> CVec2 {
    CVec2::new(ONE, ZERO)
}

/// Second coordinate vector `[0, 1]ᵀ`.
pub fn e2() -> CVec2 {
    CVec2::new(ZERO, ONE)
}

/// Converts a power ratio in decibels to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Legitimate and eavesdropper channels for a two-antenna transmitter,
/// together with the transmit power to noise ratio `rho = P / sigma^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelInstance {
    h_r: DMatrix<C64>,
    h_e: DMatrix<C64>,
    rho: f64,
}

impl ChannelInstance {
    /// `h_r` is `n_R × 2`, `h_e` is `n_E × 2`, `rho` is linear.
    pub fn new(h_r: DMatrix<C64>, h_e: DMatrix<C64>, rho: f64) -> Result<Self> {
        check_channel_matrix("h_r", &h_r)?;
        check_channel_matrix("h_e", &h_e)?;
        check_rho(rho)?;
        Ok(Self { h_r, h_e, rho })
    }

    /// Same channels at a different power ratio.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self {
            h_r: self.h_r.clone(),
            h_e: self.h_e.clone(),
            rho,
        })
    }

    pub fn h_r(&self) -> &DMatrix<C64> {
        &self.h_r
    }

    pub fn h_e(&self) -> &DMatrix<C64> {
        &self.h_e
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_db(&self) -> f64 {
        10.0 * self.rho.log10()
    }

    pub fn n_r(&self) -> usize {
        self.h_r.nrows()
    }

    pub fn n_e(&self) -> usize {
        self.h_e.nrows()
    }
}

fn check_channel_matrix(name: &str, h: &DMatrix<C64>) -> Result<()> {
    if h.ncols() != 2 {
        return Err(Error::Shape(format!(
            "{name}: expected 2 columns, found {}",
            h.ncols()
        )));
    }
    if h.nrows() == 0 {
        return Err(Error::Shape(format!("{name}: expected at least one row")));
    }
    if h.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain(format!("{name}: entries must be finite")));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Domain(format!(
            "rho must be positive and finite, got {rho}"
        )));
    }
    Ok(())
}

/// `H†H` for an `n × 2` matrix, built entrywise so the result is exactly Hermitian.
pub fn gram_2x2(h: &DMatrix<C64>) -> CMat2 {
    let mut a = 0.0;
    let mut c = 0.0;
    let mut b = ZERO;
    for row in h.row_iter() {
        let (h1, h2) = (row[0], row[1]);
        a += h1.norm_sqr();
        c += h2.norm_sqr();
        b += h1.conj() * h2;
    }
    hermitian(a, b, c)
}

/// Builds `[[a, b], [b*, c]]`.
pub fn hermitian(a: f64, b: C64, c: f64) -> CMat2 {
    CMat2::new(C64::new(a, 0.0), b, b.conj(), C64::new(c, 0.0))
}

/// Projects onto the Hermitian matrices: real diagonal, conjugate off-diagonals.
pub fn symmetrize(m: &CMat2) -> CMat2 {
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    hermitian(m[(0, 0)].re, b, m[(1, 1)].re)
}

/// Largest absolute entry.
pub fn max_abs(m: &CMat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues `(min, max)` of a Hermitian 2×2 matrix. Only the upper
/// triangle and the real diagonal are read.
pub fn hermitian_eigenvalues(m: &CMat2) -> (f64, f64) {
    let a = m[(0, 0)].re;
    let c = m[(1, 1)].re;
    let mean = 0.5 * (a + c);
    let radius = (0.5 * (a - c)).hypot(m[(0, 1)].norm());
    (mean - radius, mean + radius)
}

/// `det` of a Hermitian 2×2 matrix as a real number.
pub fn hermitian_det(m: &CMat2) -> f64 {
    m[(0, 0)].re * m[(1, 1)].re - m[(0, 1)].norm_sqr()
}

/// PSD test with the tolerance `min eig ≥ −1e-10·(1 + trace)`.
pub fn is_psd(m: &CMat2) -> bool {
    let (lo, _) = hermitian_eigenvalues(m);
    let trace = m[(0, 0)].re + m[(1, 1)].re;
    lo >= -1e-10 * (1.0 + trace.abs())
}

/// The pair of scaled Gram matrices `S_R = ρ H_R†H_R` and `S_E = ρ H_E†H_E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramPair {
    s_r: CMat2,
    s_e: CMat2,
}

impl GramPair {
    /// Builds a pair from arbitrary matrices; they are symmetrized and must
    /// be PSD within tolerance.
    pub fn new(s_r: CMat2, s_e: CMat2) -> Result<Self> {
        let s_r = symmetrize(&s_r);
        let s_e = symmetrize(&s_e);
        for (name, s) in [("s_r", &s_r), ("s_e", &s_e)] {
            if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Domain(format!("{name}: entries must be finite")));
            }
            if !is_psd(s) {
                return Err(Error::Domain(format!("{name}: not positive semidefinite")));
            }
        }
        Ok(Self { s_r, s_e })
    }

    pub fn s_r(&self) -> &CMat2 {
        &self.s_r
    }

    pub fn s_e(&self) -> &CMat2 {
        &self.s_e
    }

    /// Exchanges the roles of receiver and eavesdropper.
    pub fn swapped(&self) -> Self {
        Self {
            s_r: self.s_e,
            s_e: self.s_r,
        }
    }

    pub fn a1(&self) -> f64 {
        self.s_r[(0, 0)].re
    }

    pub fn b1(&self) -> C64 {
        self.s_r[(0, 1)]
    }

    pub fn c1(&self) -> f64 {
        self.s_r[(1, 1)].re
    }

    pub fn a2(&self) -> f64 {
        self.s_e[(0, 0)].re
    }

    pub fn b2(&self) -> C64 {
        self.s_e[(0, 1)]
    }

    pub fn c2(&self) -> f64 {
        self.s_e[(1, 1)].re
    }
}

/// Forms `S_R = ρ H_R†H_R` and `S_E = ρ H_E†H_E`.
pub fn gram_pair(ch: &ChannelInstance) -> GramPair {
    GramPair {
        s_r: gram_2x2(&ch.h_r) * C64::from(ch.rho),
        s_e: gram_2x2(&ch.h_e) * C64::from(ch.rho),
    }
}

/// Whether `H_R†H_R − H_E†H_E` has a positive eigenvalue, i.e. whether the
/// secrecy capacity is strictly positive. Independent of `rho`.
pub fn positive_secrecy(ch: &ChannelInstance) -> bool {
    let gr = gram_2x2(&ch.h_r);
    let ge = gram_2x2(&ch.h_e);
    let (_, top) = hermitian_eigenvalues(&(gr - ge));
    let tol = 1e-12 * (1.0 + max_abs(&gr) + max_abs(&ge));
    top > tol
}

/// Largest eigenvalue of a 2×2 matrix with real spectrum, from its trace
/// and determinant.
pub fn lambda_max_2x2(b: &CMat2) -> Result<f64> {
    let tr = b.trace();
    let det = b.determinant();
    let scale = 1.0 + tr.norm();
    if tr.im.abs() > 1e-9 * scale || det.im.abs() > 1e-9 * scale * scale {
        return Err(Error::Domain(format!(
            "trace {tr} or determinant {det} is not real"
        )));
    }
    let (tr, det) = (tr.re, det.re);
    let mut disc = tr * tr - 4.0 * det;
    if disc < 0.0 {
        if disc < -1e-9 * scale * scale {
            return Err(Error::Domain(format!(
                "discriminant {disc} is negative: eigenvalues are not real"
            )));
        }
        disc = 0.0;
    }
    Ok(0.5 * (tr + disc.sqrt()))
}

/// `det(I + c1 c2† + c3 c4†)` evaluated as a dense determinant (`lhs`) and
/// through the rank-two closed form (`rhs`).
pub fn det3_identity_check(c1: &[C64], c2: &[C64], c3: &[C64], c4: &[C64]) -> Result<(C64, C64)> {
    let n = c1.len();
    if [c2.len(), c3.len(), c4.len()].iter().any(|&m| m != n) {
        return Err(Error::Shape(format!(
            "vector lengths differ: {}, {}, {}, {}",
            n,
            c2.len(),
            c3.len(),
            c4.len()
        )));
    }
    if n == 0 {
        return Err(Error::Shape("vectors must be nonempty".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { ONE } else { ZERO };
        id + c1[i] * c2[j].conj() + c3[i] * c4[j].conj()
    });
    let lhs = m.determinant();

    let inner = |u: &[C64], v: &[C64]| -> C64 { u.iter().zip(v).map(|(a, b)| a.conj() * b).sum() };
    let rhs = (ONE + inner(c2, c1)) * (ONE + inner(c4, c3)) - inner(c4, c1) * inner(c2, c3);
    Ok((lhs, rhs))
}
