//! Brute-force capacity estimates that do not touch the root formulas.
//!
//! The x-grid oracle scans the one-dimensional reduction
//! `x ↦ ln λmax(G2(x)⁻¹G1(x))` on a uniform grid. Every grid point is a
//! feasible covariance, so its maximum is a lower bound; with an empirical
//! Lipschitz estimate it also gives an approximate upper bound. The direct
//! oracle samples covariances from the original feasible set at random and
//! only ever gives a lower bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::capacity::{compose_q, g_matrices, matrix_pairs, optimal_u, secrecy_objective};
use crate::channel::{lambda_max_2x2, symmetrize, CMat2, CVec2, GramPair, C64};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 100_000;
pub const DEFAULT_SAMPLES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Best objective value found, nats. Never below zero since `Q = 0` is feasible.
    pub best_value_nats: f64,
    /// Grid position of the maximizer (x-grid oracle only; `None` if `Q = 0` won).
    pub argmax_x: Option<f64>,
    /// Covariance attaining `best_value_nats`.
    pub argmax_q: CMat2,
    /// Grid size or sample count.
    pub resolution: usize,
    /// Estimated bound on how far the true maximum can lie above
    /// `best_value_nats` (x-grid oracle only).
    pub value_gap_bound: Option<f64>,
}

impl Serialize for OracleReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("OracleReport", 5)?;
        st.serialize_field("best_value_nats", &self.best_value_nats)?;
        st.serialize_field("argmax_x", &self.argmax_x)?;
        st.serialize_field("argmax_q", &matrix_pairs(&self.argmax_q))?;
        st.serialize_field("resolution", &self.resolution)?;
        st.serialize_field("value_gap_bound", &self.value_gap_bound)?;
        st.end()
    }
}

/// `ln λmax(G2(x)⁻¹G1(x))` computed from the explicit pencil.
pub fn reduced_objective(g: &GramPair, x: f64) -> Result<f64> {
    let gm = g_matrices(g, x)?;
    let inv = gm
        .g2
        .try_inverse()
        .ok_or_else(|| Error::Conditioning("G2 is singular".into()))?;
    Ok(lambda_max_2x2(&(inv * gm.g1))?.ln())
}

/// Scans `x ∈ {0, h, …, 1 − h}` with `h = 1 / n_points`.
pub fn x_grid_oracle(g: &GramPair, n_points: usize) -> Result<OracleReport> {
    if n_points < 2 {
        return Err(Error::Domain(format!("n_points must be at least 2, got {n_points}")));
    }
    let h = 1.0 / n_points as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_x = 0.0;
    let mut max_slope = 0.0f64;
    let mut prev: Option<f64> = None;
    for i in 0..n_points {
        let x = i as f64 * h;
        let v = reduced_objective(g, x)?;
        if let Some(p) = prev {
            max_slope = max_slope.max(((v - p) / h).abs());
        }
        prev = Some(v);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    let gap = h * 2.0 * max_slope;

    if best < 0.0 {
        return Ok(OracleReport {
            best_value_nats: 0.0,
            argmax_x: None,
            argmax_q: CMat2::zeros(),
            resolution: n_points,
            value_gap_bound: Some(gap),
        });
    }
    let (u, _) = optimal_u(&g_matrices(g, best_x)?)?;
    Ok(OracleReport {
        best_value_nats: best,
        argmax_x: Some(best_x),
        argmax_q: compose_q(best_x, &u),
        resolution: n_points,
        value_gap_bound: Some(gap),
    })
}

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Haar-distributed 2×2 unitary from Gram–Schmidt on complex Gaussian columns.
fn random_unitary(rng: &mut ChaCha8Rng) -> CMat2 {
    let a = CVec2::new(complex_normal(rng), complex_normal(rng));
    let b = CVec2::new(complex_normal(rng), complex_normal(rng));
    let v1 = a / C64::from(a.norm());
    let b = b - v1 * v1.dotc(&b);
    let v2 = b / C64::from(b.norm());
    CMat2::from_columns(&[v1, v2])
}

/// Random feasible covariance `V diag(λ, t − λ) V†` with `t ∈ (0, 1]`,
/// `λ ∈ [0, t)`.
pub fn sample_covariance(rng: &mut ChaCha8Rng) -> CMat2 {
    let t = 1.0 - rng.random::<f64>();
    let lam = t * rng.random::<f64>();
    let v = random_unitary(rng);
    let d = CMat2::from_diagonal(&CVec2::new(C64::from(lam), C64::from(t - lam)));
    symmetrize(&(v * d * v.adjoint()))
}

/// Random search over `{Q ⪰ 0, tr Q ≤ 1}`. Deterministic in `seed`.
pub fn direct_q_oracle(g: &GramPair, n_samples: usize, seed: u64) -> Result<OracleReport> {
    if n_samples == 0 {
        return Err(Error::Domain("n_samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0;
    let mut best_q = CMat2::zeros();
    for _ in 0..n_samples {
        let q = sample_covariance(&mut rng);
        let v = secrecy_objective(&q, g)?;
        if v > best {
            best = v;
            best_q = q;
        }
    }
    Ok(OracleReport {
        best_value_nats: best,
        argmax_x: None,
        argmax_q: best_q,
        resolution: n_samples,
        value_gap_bound: None,
    })
}
