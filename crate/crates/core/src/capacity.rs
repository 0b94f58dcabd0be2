//! Closed-form secrecy capacity.
//!
//! Any nonzero feasible covariance splits as `Q = x e1e1† + (1 − x) uu†`.
//! For fixed `x` the objective is a generalized Rayleigh quotient of the
//! pencil `(G1(x), G2(x))`, so the capacity is `ln τ★` where `τ★` is the
//! largest eigenvalue level reachable on `x ∈ [0, 1)`. That level is either
//! the largest root of the `x = 0` quadratic (beamforming) or a quartic root
//! at which `F(x) = −τ² f2(x) + τ f1(x) − f3(x)` has an interior double root.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::channel::{
    e1, gram_pair, hermitian_det, hermitian_eigenvalues, is_psd, max_abs, positive_secrecy,
    symmetrize, CMat2, CVec2, ChannelInstance, GramPair, C64,
};
use crate::coefficients::{coefficient_set, Coefficient, CoefficientSet};
use crate::error::{Error, Result};
use crate::roots::{self, RootSet, Tau2};

/// Allowed gap in nats between `ln τ★` and the objective at the rebuilt `Q★`.
pub const VERIFY_TOL: f64 = 1e-6;
/// Relative tolerance under which `τ1` and `τ2` count as tied.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `x★ = 0`, rank-one covariance.
    Quadratic,
    /// Interior `x★`, full-rank covariance.
    Quartic,
    /// No positive secrecy; nothing is transmitted.
    Degenerate,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Quadratic => "quadratic",
            Branch::Quartic => "quartic",
            Branch::Degenerate => "degenerate",
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySolution {
    pub capacity_nats: f64,
    pub capacity_bits: f64,
    pub tau_star: f64,
    pub x_star: f64,
    pub u_star: CVec2,
    pub q_star: CMat2,
    pub branch: Branch,
}

pub(crate) fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub(crate) fn matrix_pairs(m: &CMat2) -> [[[f64; 2]; 2]; 2] {
    [
        [complex_pair(m[(0, 0)]), complex_pair(m[(0, 1)])],
        [complex_pair(m[(1, 0)]), complex_pair(m[(1, 1)])],
    ]
}

impl Serialize for CapacitySolution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CapacitySolution", 7)?;
        st.serialize_field("capacity_bits", &self.capacity_bits)?;
        st.serialize_field("capacity_nats", &self.capacity_nats)?;
        st.serialize_field("tau_star", &self.tau_star)?;
        st.serialize_field("x_star", &self.x_star)?;
        st.serialize_field("branch", &self.branch)?;
        st.serialize_field(
            "u_star",
            &[complex_pair(self.u_star[0]), complex_pair(self.u_star[1])],
        )?;
        st.serialize_field("q_star", &matrix_pairs(&self.q_star))?;
        st.end()
    }
}

/// The pencil `(G1(x), G2(x))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GMatrices {
    pub g1: CMat2,
    pub g2: CMat2,
}

fn g_matrix(s: &CMat2, x: f64) -> CMat2 {
    let a = s[(0, 0)].re;
    let det = hermitian_det(s);
    let mut inner = *s;
    inner[(1, 1)] += C64::from(x * det);
    let g = CMat2::identity() * C64::from(1.0 + x * a) + inner * C64::from(1.0 - x);
    symmetrize(&g)
}

/// `G(x) = (1 + x e1†S e1) I + (1 − x)(S + x det(S) e2e2†)` for `S_R` and `S_E`.
pub fn g_matrices(g: &GramPair, x: f64) -> Result<GMatrices> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1), got {x}")));
    }
    let gm = GMatrices {
        g1: g_matrix(g.s_r(), x),
        g2: g_matrix(g.s_e(), x),
    };
    for (name, m) in [("G1", &gm.g1), ("G2", &gm.g2)] {
        if hermitian_eigenvalues(m).0 <= 0.0 {
            return Err(Error::Numerical(format!("{name}({x}) is not positive definite")));
        }
    }
    Ok(gm)
}

/// Rotates `u` so that its first non-negligible entry is real and positive.
fn normalize_phase(u: CVec2) -> CVec2 {
    let Some(pivot) = u.iter().find(|z| z.norm() > 1e-12).copied() else {
        return u;
    };
    let rot = pivot.conj() / pivot.norm();
    let mut out = u * rot;
    for z in out.iter_mut() {
        if z.norm() > 1e-12 {
            z.im = 0.0;
            break;
        }
    }
    out
}

/// Unit eigenvector and top eigenvalue of `G1 u = λ G2 u`, via the Cholesky
/// factor of `G2`.
pub fn optimal_u(gm: &GMatrices) -> Result<(CVec2, f64)> {
    let g2 = &gm.g2;
    let trace = g2[(0, 0)].re + g2[(1, 1)].re;
    if hermitian_eigenvalues(g2).0 <= 1e-14 * trace {
        return Err(Error::Conditioning("G2 is numerically singular".into()));
    }
    // G2 = L L†
    let l11 = g2[(0, 0)].re.sqrt();
    let l21 = g2[(1, 0)] / l11;
    let l22 = (g2[(1, 1)].re - l21.norm_sqr()).sqrt();
    let zero = C64::new(0.0, 0.0);
    let l_inv = CMat2::new(
        C64::from(1.0 / l11),
        zero,
        -l21 / (l11 * l22),
        C64::from(1.0 / l22),
    );
    let c = symmetrize(&(l_inv * gm.g1 * l_inv.adjoint()));
    let (_, lam) = hermitian_eigenvalues(&c);

    let (alpha, beta, gamma) = (c[(0, 0)].re, c[(0, 1)], c[(1, 1)].re);
    let mut v = if alpha >= gamma {
        CVec2::new(C64::from(lam - gamma), beta.conj())
    } else {
        CVec2::new(beta, C64::from(lam - alpha))
    };
    if v.norm() == 0.0 {
        v = e1();
    }
    let u = l_inv.adjoint() * v;
    let u = normalize_phase(u / C64::from(u.norm()));

    let residual = (gm.g1 * u - gm.g2 * u * C64::from(lam)).norm();
    if residual > 1e-10 * max_abs(&gm.g1).max(1.0) * lam.max(1.0) {
        return Err(Error::Numerical(format!(
            "generalized eigenvector residual {residual:e} too large"
        )));
    }
    Ok((u, lam))
}

/// `x e1e1† + (1 − x) uu†` for any `u` with `u†u ≤ 1`.
pub fn compose_q(x: f64, u: &CVec2) -> CMat2 {
    let mut q = u * u.adjoint() * C64::from(1.0 - x);
    q[(0, 0)] += C64::from(x);
    symmetrize(&q)
}

/// Full-power covariance `x e1e1† + (1 − x) uu†` for a unit vector `u`.
pub fn assemble_q(x: f64, u: &CVec2) -> Result<CMat2> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1), got {x}")));
    }
    let norm_sq = u.norm_squared();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("u must have unit norm, u†u = {norm_sq}")));
    }
    Ok(compose_q(x, u))
}

/// Splits a nonzero PSD `Q` with `tr Q ≤ 1` into `(x, u)` with
/// `Q = x e1e1† + (1 − x) uu†`, `0 ≤ x < 1`, `u†u ≤ 1`. `x` is chosen so
/// that `Q − x e1e1†` is singular.
pub fn decompose_q(q: &CMat2) -> Result<(f64, CVec2)> {
    let q = symmetrize(q);
    if !is_psd(&q) || q.trace().re > 1.0 + 1e-10 || max_abs(&q) == 0.0 {
        return Err(Error::Domain(
            "expected a nonzero PSD matrix with trace at most 1".into(),
        ));
    }
    let q22 = q[(1, 1)].re;
    if q22 <= 1e-300 {
        let u = CVec2::new(C64::from(q[(0, 0)].re.max(0.0).sqrt()), C64::new(0.0, 0.0));
        return Ok((0.0, u));
    }
    let x = (hermitian_det(&q) / q22).max(0.0);
    // Q − x e1e1† is rank one with second column q_{·2}
    let r = CVec2::new(q[(0, 1)], C64::from(q22)) / C64::from(q22.sqrt());
    let u = r / C64::from((1.0 - x).sqrt());
    Ok((x, u))
}

/// `ln det(I + Q S_R) − ln det(I + Q S_E)` in nats.
pub fn secrecy_objective(q: &CMat2, g: &GramPair) -> Result<f64> {
    let trace = q.trace().re;
    if !is_psd(&symmetrize(q)) || trace > 1.0 + 1e-10 {
        return Err(Error::Domain(format!(
            "Q must be PSD with trace at most 1 (trace {trace})"
        )));
    }
    let id = CMat2::identity();
    let det_r = (id + q * g.s_r()).determinant().re;
    let det_e = (id + q * g.s_e()).determinant().re;
    if det_r <= 0.0 || det_e <= 0.0 {
        return Err(Error::Numerical(format!(
            "nonpositive determinant: det(I+QS_R) = {det_r}, det(I+QS_E) = {det_e}"
        )));
    }
    Ok(det_r.ln() - det_e.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveOptions {
    /// Skip the check of `ln τ★` against the objective at `Q★`.
    pub skip_objective_check: bool,
    /// Adds an offset to one coefficient before root solving. Fault
    /// injection for the verification tooling.
    pub perturbation: Option<(Coefficient, f64)>,
}

/// Intermediate quantities of a solve, for debugging dumps and certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub gram: GramPair,
    pub coefficients: CoefficientSet,
    pub quadratic_roots: Option<RootSet>,
    pub quartic_roots: Option<RootSet>,
    pub tau1: Option<f64>,
    pub tau2: Option<Tau2>,
    /// Objective evaluated at the rebuilt `Q★`, nats.
    pub objective_nats: f64,
}

impl Serialize for Diagnostics {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Diagnostics", 8)?;
        st.serialize_field("s_r", &matrix_pairs(self.gram.s_r()))?;
        st.serialize_field("s_e", &matrix_pairs(self.gram.s_e()))?;
        st.serialize_field("coefficients", &self.coefficients)?;
        st.serialize_field("quadratic_roots", &self.quadratic_roots)?;
        st.serialize_field("quartic_roots", &self.quartic_roots)?;
        st.serialize_field("tau1", &self.tau1)?;
        st.serialize_field("tau2", &self.tau2)?;
        st.serialize_field("objective_nats", &self.objective_nats)?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub solution: CapacitySolution,
    pub diagnostics: Diagnostics,
}

/// Secrecy capacity and optimal covariance of a channel.
pub fn secrecy_capacity(ch: &ChannelInstance) -> Result<CapacitySolution> {
    solve(ch, &SolveOptions::default()).map(|s| s.solution)
}

pub fn solve(ch: &ChannelInstance, opts: &SolveOptions) -> Result<Solved> {
    solve_gram(&gram_pair(ch), positive_secrecy(ch), opts)
}

/// Positivity test on the Gram matrices themselves; equivalent to
/// [`positive_secrecy`] up to the `rho` scaling.
pub fn positive_secrecy_gram(g: &GramPair) -> bool {
    let (_, top) = hermitian_eigenvalues(&(g.s_r() - g.s_e()));
    top > 1e-12 * (1.0 + max_abs(g.s_r()) + max_abs(g.s_e()))
}

/// Solves from the Gram pair. `positive` is the outcome of the positivity
/// test; when false the zero covariance is returned.
pub fn solve_gram(g: &GramPair, positive: bool, opts: &SolveOptions) -> Result<Solved> {
    let mut coefficients = coefficient_set(g);
    if let Some((which, delta)) = opts.perturbation {
        *coefficients.get_mut(which) += delta;
    }
    let quadratic_roots = roots::tau_quadratic_roots(&coefficients).ok();
    let quartic_roots = match roots::tau_quartic_roots(&coefficients) {
        Ok(r) => Some(r),
        Err(Error::DegeneratePolynomial) => None,
        Err(e) => return Err(e),
    };
    let tau1 = quadratic_roots.as_ref().and_then(|r| r.real_roots.first().copied());
    let tau2 = quartic_roots
        .as_ref()
        .and_then(|r| roots::tau2_from_roots(&coefficients, r));

    let mut diagnostics = Diagnostics {
        gram: *g,
        coefficients,
        quadratic_roots,
        quartic_roots,
        tau1,
        tau2,
        objective_nats: 0.0,
    };

    if !positive {
        let solution = CapacitySolution {
            capacity_nats: 0.0,
            capacity_bits: 0.0,
            tau_star: 1.0,
            x_star: 0.0,
            u_star: e1(),
            q_star: CMat2::zeros(),
            branch: Branch::Degenerate,
        };
        return Ok(Solved {
            solution,
            diagnostics,
        });
    }

    let (tau_star, x_star, branch) = match (tau1, tau2) {
        (Some(t1), Some(t2)) if t2.tau > t1 * (1.0 + TIE_TOL) => (t2.tau, t2.x, Branch::Quartic),
        (Some(t1), _) => (t1, 0.0, Branch::Quadratic),
        (None, Some(t2)) => (t2.tau, t2.x, Branch::Quartic),
        (None, None) => {
            return Err(Error::inconsistency(
                "positive secrecy holds but neither the quadratic nor the quartic has an admissible root",
            ))
        }
    };
    if !(tau_star.is_finite() && tau_star > 0.0) {
        return Err(Error::inconsistency(format!(
            "selected eigenvalue level {tau_star} is not positive"
        )));
    }

    let gm = g_matrices(g, x_star)?;
    let (u_star, _) = optimal_u(&gm)?;
    let q_star = assemble_q(x_star, &u_star)?;
    let objective = secrecy_objective(&q_star, g)?;
    let capacity_nats = tau_star.ln();
    diagnostics.objective_nats = objective;

    if !opts.skip_objective_check && (objective - capacity_nats).abs() > VERIFY_TOL {
        return Err(Error::Inconsistency {
            message: format!(
                "closed form ln(tau) = {capacity_nats} but objective at Q* = {objective}"
            ),
            closed_form_nats: Some(capacity_nats),
            objective_nats: Some(objective),
        });
    }

    Ok(Solved {
        solution: CapacitySolution {
            capacity_nats,
            capacity_bits: capacity_nats / std::f64::consts::LN_2,
            tau_star,
            x_star,
            u_star,
            q_star,
            branch,
        },
        diagnostics,
    })
}

/// The optimality condition satisfied by the winning branch: `C1(τ★) = 0`
/// for the quadratic branch, `B1² − 4 A1 C1 = 0` for the quartic branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCertificate {
    pub residual: f64,
    pub bound: f64,
}

impl BranchCertificate {
    pub fn holds(&self) -> bool {
        self.residual <= self.bound
    }
}

pub fn branch_certificate(c: &CoefficientSet, sol: &CapacitySolution) -> Option<BranchCertificate> {
    let tau = sol.tau_star;
    let (a1, b1, c1) = c.f_of_x_coefficients(tau);
    match sol.branch {
        Branch::Quadratic => Some(BranchCertificate {
            residual: c1.abs(),
            bound: 1e-8 * (1.0 + tau * tau * c.q3.abs()),
        }),
        Branch::Quartic => Some(BranchCertificate {
            residual: (b1 * b1 - 4.0 * a1 * c1).abs(),
            bound: 1e-6 * (1.0 + b1 * b1),
        }),
        Branch::Degenerate => None,
    }
}
