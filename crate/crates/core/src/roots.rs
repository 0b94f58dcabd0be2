//! Real polynomial root finding up to degree four, and extraction of the two
//! candidate eigenvalue levels `tau1` (quadratic) and `tau2` (quartic).
//!
//! Quartics are solved by radicals: the monic quartic is depressed, a
//! nonnegative root of the resolvent cubic splits it into two real
//! quadratics. Every root then gets one Newton step on the original
//! polynomial. Roots whose residual is still too large are replaced by the
//! nearest eigenvalue of the companion matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::channel::C64;
use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};

/// Relative residual bound `|P(r)| ≤ RESIDUAL_TOL·(1 + max|a_i|)·max(1, |r|)^deg`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// A root is treated as real when `|Im r| ≤ REAL_TOL·(1 + |Re r|)`.
pub const REAL_TOL: f64 = 1e-6;
/// `x` from the quartic branch must lie in `(X_TOL, 1 − X_TOL)`.
pub const X_TOL: f64 = 1e-9;
/// Leading quartic coefficients at or below this fraction of the terms that
/// cancel to produce them are rounding residue and are dropped.
const CANCELLATION_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RootMethod {
    Radicals,
    CompanionFallback,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSet {
    /// All roots, complex, in no particular order.
    #[serde(serialize_with = "serialize_complex_list")]
    pub roots: Vec<C64>,
    /// Real parts of the roots passing the realness filter, descending.
    pub real_roots: Vec<f64>,
    pub method: RootMethod,
}

fn serialize_complex_list<S: serde::Serializer>(
    roots: &[C64],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(roots.len()))?;
    for z in roots {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}

impl RootSet {
    fn new(roots: Vec<C64>, method: RootMethod) -> Self {
        let mut real_roots: Vec<f64> = roots.iter().filter(|z| is_real(**z)).map(|z| z.re).collect();
        real_roots.sort_by(|a, b| b.total_cmp(a));
        Self {
            roots,
            real_roots,
            method,
        }
    }
}

pub fn is_real(z: C64) -> bool {
    z.im.abs() <= REAL_TOL * (1.0 + z.re.abs())
}

/// Evaluates a polynomial with coefficients in descending order, returning
/// `(P(z), P'(z))`.
pub fn eval_with_derivative(coeffs: &[f64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &a in coeffs {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

pub fn eval(coeffs: &[f64], z: C64) -> C64 {
    eval_with_derivative(coeffs, z).0
}

/// Whether `z` satisfies the relative residual bound for `coeffs`.
pub fn residual_ok(coeffs: &[f64], z: C64) -> bool {
    let deg = coeffs.len().saturating_sub(1) as i32;
    let scale = 1.0 + coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    eval(coeffs, z).norm() <= RESIDUAL_TOL * scale * z.norm().max(1.0).powi(deg)
}

/// One Newton step, kept only if it lowers the residual.
fn polish(coeffs: &[f64], z: C64) -> C64 {
    let (p, dp) = eval_with_derivative(coeffs, z);
    if dp.norm() == 0.0 || !p.is_finite() {
        return z;
    }
    let next = z - p / dp;
    if next.is_finite() && eval(coeffs, next).norm() < p.norm() {
        next
    } else {
        z
    }
}

fn check_not_all_zero(coeffs: &[f64]) -> Result<()> {
    if coeffs.iter().any(|a| !a.is_finite()) {
        return Err(Error::Domain("polynomial coefficients must be finite".into()));
    }
    if coeffs.iter().all(|&a| a == 0.0) {
        return Err(Error::DegeneratePolynomial);
    }
    Ok(())
}

/// Roots of `a2 τ² + a1 τ + a0`. Falls back to the linear case when `a2 = 0`.
pub fn solve_quadratic(a2: f64, a1: f64, a0: f64) -> Result<RootSet> {
    check_not_all_zero(&[a2, a1, a0])?;
    Ok(RootSet::new(quadratic_roots(a2, a1, a0), RootMethod::Radicals))
}

fn quadratic_roots(a2: f64, a1: f64, a0: f64) -> Vec<C64> {
    if a2 == 0.0 {
        if a1 == 0.0 {
            return Vec::new();
        }
        return vec![C64::new(-a0 / a1, 0.0)];
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    if disc >= 0.0 {
        // larger-magnitude root first, the other from the product a0/a2
        let q = -0.5 * (a1 + a1.signum() * disc.sqrt());
        if q == 0.0 {
            return vec![C64::new(0.0, 0.0); 2];
        }
        vec![C64::new(q / a2, 0.0), C64::new(a0 / q, 0.0)]
    } else {
        let re = -a1 / (2.0 * a2);
        let im = (-disc).sqrt() / (2.0 * a2.abs());
        vec![C64::new(re, im), C64::new(re, -im)]
    }
}

/// Largest real root of the monic cubic `m³ + b m² + c m + d`.
fn largest_real_cubic_root(b: f64, c: f64, d: f64) -> f64 {
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = 2.0 * shift * shift * shift - c * shift + d;
    let half_q = 0.5 * q;
    let third_p = p / 3.0;
    let disc = half_q * half_q + third_p * third_p * third_p;
    let z = if disc > 0.0 {
        let u = (-half_q - half_q.signum() * disc.sqrt()).cbrt();
        if u == 0.0 {
            0.0
        } else {
            u - third_p / u
        }
    } else if p == 0.0 {
        0.0
    } else {
        let r = (-third_p).sqrt();
        let cos_phi = (-half_q / (r * r * r)).clamp(-1.0, 1.0);
        2.0 * r * (cos_phi.acos() / 3.0).cos()
    };
    let mut m = z - shift;
    let coeffs = [1.0, b, c, d];
    for _ in 0..3 {
        let (f, df) = eval_with_derivative(&coeffs, C64::new(m, 0.0));
        if df.re == 0.0 {
            break;
        }
        let next = m - f.re / df.re;
        if !next.is_finite() || eval(&coeffs, C64::new(next, 0.0)).norm() >= f.norm() {
            break;
        }
        m = next;
    }
    m
}

/// Roots of a monic cubic: one real root by radicals, the rest by deflation.
fn cubic_roots_monic(b: f64, c: f64, d: f64) -> Vec<C64> {
    let r = largest_real_cubic_root(b, c, d);
    // synthetic division by (m - r)
    let b1 = b + r;
    let c1 = c + r * b1;
    let mut roots = quadratic_roots(1.0, b1, c1);
    roots.push(C64::new(r, 0.0));
    roots
}

/// Roots of the monic quartic `t⁴ + b t³ + c t² + d t + e` by Ferrari's method.
fn quartic_roots_monic(b: f64, c: f64, d: f64, e: f64) -> Vec<C64> {
    let shift = 0.25 * b;
    let b2 = b * b;
    let p = c - 0.375 * b2;
    let q = d - 0.5 * b * c + 0.125 * b2 * b;
    let r = e - 0.25 * b * d + b2 * c / 16.0 - 3.0 * b2 * b2 / 256.0;

    // m³ + p m² + (p²/4 − r) m − q²/8 = 0 has a root m ≥ 0
    let m = largest_real_cubic_root(p, 0.25 * p * p - r, -0.125 * q * q).max(0.0);
    let scale = 1.0 + p * p + r.abs();
    let ys: Vec<C64> = if q == 0.0 || m <= 1e-30 * scale {
        // biquadratic y⁴ + p y² + r
        quadratic_roots(1.0, p, r)
            .into_iter()
            .flat_map(|w| {
                let s = w.sqrt();
                [s, -s]
            })
            .collect()
    } else {
        let s = (2.0 * m).sqrt();
        let k = q / (2.0 * s);
        let mut ys = quadratic_roots(1.0, -s, 0.5 * p + m + k);
        ys.extend(quadratic_roots(1.0, s, 0.5 * p + m - k));
        ys
    };
    ys.into_iter().map(|y| y - shift).collect()
}

/// Strips zero leading coefficients.
fn trim_leading(coeffs: &[f64]) -> &[f64] {
    let start = coeffs.iter().position(|&a| a != 0.0).unwrap_or(coeffs.len());
    &coeffs[start..]
}

/// Radical roots of a polynomial of degree at most four (descending coefficients).
fn radical_roots(coeffs: &[f64]) -> Vec<C64> {
    match coeffs.len() {
        0 | 1 => Vec::new(),
        2 => vec![C64::new(-coeffs[1] / coeffs[0], 0.0)],
        3 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        4 => {
            let a = coeffs[0];
            cubic_roots_monic(coeffs[1] / a, coeffs[2] / a, coeffs[3] / a)
        }
        5 => {
            let a = coeffs[0];
            quartic_roots_monic(coeffs[1] / a, coeffs[2] / a, coeffs[3] / a, coeffs[4] / a)
        }
        n => panic!("degree {} not supported", n - 1),
    }
}

/// Eigenvalues of the companion matrix of a polynomial whose leading
/// coefficient is nonzero.
fn companion_eigenvalues(coeffs: &[f64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// All roots of `a4 τ⁴ + a3 τ³ + a2 τ² + a1 τ + a0` from the companion
/// matrix, each given one Newton step. Negligible leading coefficients
/// lower the degree.
pub fn quartic_companion_roots(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64) -> Result<Vec<C64>> {
    let full = [a4, a3, a2, a1, a0];
    check_not_all_zero(&full)?;
    let coeffs = trim_leading(&full);
    Ok(companion_eigenvalues(coeffs)
        .into_iter()
        .map(|z| polish(coeffs, z))
        .collect())
}

/// All roots of `a4 τ⁴ + a3 τ³ + a2 τ² + a1 τ + a0`. Zero leading
/// coefficients lower the degree.
pub fn solve_quartic(a4: f64, a3: f64, a2: f64, a1: f64, a0: f64) -> Result<RootSet> {
    let full = [a4, a3, a2, a1, a0];
    check_not_all_zero(&full)?;
    let coeffs = trim_leading(&full);

    let mut roots: Vec<C64> = radical_roots(coeffs)
        .into_iter()
        .map(|z| polish(coeffs, z))
        .collect();

    let failing: Vec<usize> = (0..roots.len())
        .filter(|&i| !roots[i].is_finite() || !residual_ok(coeffs, roots[i]))
        .collect();
    if failing.is_empty() {
        return Ok(RootSet::new(roots, RootMethod::Radicals));
    }

    let mut spare: Vec<C64> = companion_eigenvalues(coeffs)
        .into_iter()
        .map(|z| polish(coeffs, z))
        .collect();
    // a failing root is swapped for the closest companion root not already
    // matched by a passing radical root
    for (i, z) in roots.iter().enumerate() {
        if failing.contains(&i) {
            continue;
        }
        if let Some(k) = nearest(&spare, *z) {
            spare.swap_remove(k);
        }
    }
    for &i in &failing {
        let target = if roots[i].is_finite() { roots[i] } else { C64::new(0.0, 0.0) };
        if let Some(k) = nearest(&spare, target) {
            roots[i] = spare.swap_remove(k);
        }
    }
    Ok(RootSet::new(roots, RootMethod::CompanionFallback))
}

fn nearest(pool: &[C64], z: C64) -> Option<usize> {
    pool.iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| (**a - z).norm().total_cmp(&(**b - z).norm()))
        .map(|(k, _)| k)
}

/// Descending coefficients of `−q3 τ² + p3 τ − q6`.
pub fn tau_quadratic(c: &CoefficientSet) -> [f64; 3] {
    [-c.q3, c.p3, -c.q6]
}

/// Descending coefficients of `B1(τ)² − 4 A1(τ) C1(τ)`.
pub fn tau_quartic(c: &CoefficientSet) -> [f64; 5] {
    let a = [-c.q1, c.p1, -c.q4];
    let b = [-c.q2, c.p2, -c.q5];
    let cc = [-c.q3, c.p3, -c.q6];
    let bb = poly_mul(&b, &b);
    let ac = poly_mul(&a, &cc);
    let mut out: [f64; 5] = std::array::from_fn(|i| bb[i] - 4.0 * ac[i]);

    // A small leading coefficient may still carry a large genuine root, so
    // only residue of the cancellation itself is cleared.
    let abs = |v: [f64; 3]| v.map(f64::abs);
    let bb_abs = poly_mul(&abs(b), &abs(b));
    let ac_abs = poly_mul(&abs(a), &abs(cc));
    for i in 0..4 {
        if out[i].abs() > CANCELLATION_TOL * (bb_abs[i] + 4.0 * ac_abs[i]) {
            break;
        }
        out[i] = 0.0;
    }
    out
}

fn poly_mul(x: &[f64; 3], y: &[f64; 3]) -> [f64; 5] {
    [
        x[0] * y[0],
        x[0] * y[1] + x[1] * y[0],
        x[0] * y[2] + x[1] * y[1] + x[2] * y[0],
        x[1] * y[2] + x[2] * y[1],
        x[2] * y[2],
    ]
}

pub fn tau_quadratic_roots(c: &CoefficientSet) -> Result<RootSet> {
    let [a2, a1, a0] = tau_quadratic(c);
    solve_quadratic(a2, a1, a0)
}

/// `B1(τ)² − 4 A1(τ) C1(τ)` and its derivative, evaluated without expanding
/// the product. The expanded quartic loses digits to cancellation when the
/// coefficients are large; the factored form does not.
fn tau_quartic_factored(c: &CoefficientSet, z: C64) -> (C64, C64) {
    let quad = |k2: f64, k1: f64, k0: f64| -> (C64, C64) {
        ((z * (-k2) + k1) * z - k0, z * (-2.0 * k2) + k1)
    };
    let (a, da) = quad(c.q1, c.p1, c.q4);
    let (b, db) = quad(c.q2, c.p2, c.q5);
    let (cc, dcc) = quad(c.q3, c.p3, c.q6);
    (b * b - a * cc * 4.0, b * db * 2.0 - (da * cc + a * dcc) * 4.0)
}

/// Roots of the quartic, refined by Newton steps on the factored form.
pub fn tau_quartic_roots(c: &CoefficientSet) -> Result<RootSet> {
    let [a4, a3, a2, a1, a0] = tau_quartic(c);
    let rs = solve_quartic(a4, a3, a2, a1, a0)?;
    let refined = rs
        .roots
        .iter()
        .map(|&z0| {
            let mut z = z0;
            let (mut f, mut df) = tau_quartic_factored(c, z);
            for _ in 0..4 {
                if df.norm() == 0.0 || f.norm() == 0.0 {
                    break;
                }
                let next = z - f / df;
                let (fn_, dfn) = tau_quartic_factored(c, next);
                if !next.is_finite() || fn_.norm() >= f.norm() {
                    break;
                }
                (z, f, df) = (next, fn_, dfn);
            }
            z
        })
        .collect();
    Ok(RootSet::new(refined, rs.method))
}

/// Largest real root of the quadratic, if any.
pub fn tau1_candidate(c: &CoefficientSet) -> Option<f64> {
    tau_quadratic_roots(c).ok()?.real_roots.first().copied()
}

/// Admissible quartic root together with its interior power split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tau2 {
    pub tau: f64,
    pub x: f64,
}

/// Scans the real roots in descending order and returns the first whose
/// vertex `x = −B1/(2A1)` lies strictly inside `(0, 1)`.
pub fn tau2_from_roots(c: &CoefficientSet, roots: &RootSet) -> Option<Tau2> {
    roots.real_roots.iter().find_map(|&tau| {
        let (a1, b1, _) = c.f_of_x_coefficients(tau);
        let scale = 1.0 + tau * tau * c.q1.abs() + (tau * c.p1).abs() + c.q4.abs();
        if a1.abs() <= 1e-12 * scale {
            return None;
        }
        let x = -b1 / (2.0 * a1);
        (x > X_TOL && x < 1.0 - X_TOL).then_some(Tau2 { tau, x })
    })
}

pub fn tau2_candidate(c: &CoefficientSet) -> Option<Tau2> {
    let roots = tau_quartic_roots(c).ok()?;
    tau2_from_roots(c, &roots)
}
