//! Verification and batch runs built on top of the solver: the oracle
//! sandwich check, power sweeps and random-channel Monte Carlo.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{branch_certificate, solve, Branch, BranchCertificate, CapacitySolution, SolveOptions};
use crate::channel::{db_to_linear, gram_pair, ChannelInstance, C64};
use crate::coefficients::Coefficient;
use crate::error::{Error, Result};
use crate::oracle::{direct_q_oracle, x_grid_oracle, OracleReport};

/// Absolute slack for the inequality checks, nats.
pub const SANDWICH_SLACK: f64 = 1e-9;
/// Relative bound on `|objective(Q★) − ln τ★|`.
pub const CONSISTENCY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifySpec {
    pub grid_points: usize,
    pub samples: usize,
    pub seed: u64,
    pub perturbation: Option<(Coefficient, f64)>,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            grid_points: crate::oracle::DEFAULT_GRID_POINTS,
            samples: crate::oracle::DEFAULT_SAMPLES,
            seed: 0,
            perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SandwichReport {
    pub closed_form: CapacitySolution,
    pub grid: OracleReport,
    pub direct: OracleReport,
    /// `|objective(Q★) − ln τ★|`, nats.
    pub consistency_gap: f64,
    pub direct_below_closed: bool,
    pub grid_below_closed: bool,
    pub closed_below_grid_bound: bool,
    pub consistent: bool,
    pub pass: bool,
}

/// Runs the closed form and both oracles on one channel and checks
/// `direct ≤ closed`, `grid ≤ closed ≤ grid + gap`, and that `Q★`
/// reproduces `ln τ★`.
pub fn verify_channel(ch: &ChannelInstance, spec: &VerifySpec) -> Result<SandwichReport> {
    let opts = SolveOptions {
        skip_objective_check: true,
        perturbation: spec.perturbation,
    };
    let solved = solve(ch, &opts)?;
    let g = gram_pair(ch);
    let grid = x_grid_oracle(&g, spec.grid_points)?;
    let direct = direct_q_oracle(&g, spec.samples, spec.seed)?;

    let closed = solved.solution.capacity_nats;
    let consistency_gap = (solved.diagnostics.objective_nats - closed).abs();
    let gap = grid.value_gap_bound.unwrap_or(0.0);

    let direct_below_closed = direct.best_value_nats <= closed + SANDWICH_SLACK;
    let grid_below_closed = grid.best_value_nats <= closed + SANDWICH_SLACK;
    let closed_below_grid_bound = closed <= grid.best_value_nats + gap + SANDWICH_SLACK;
    let consistent = consistency_gap <= CONSISTENCY_TOL * (1.0 + closed.abs());
    let pass = direct_below_closed && grid_below_closed && closed_below_grid_bound && consistent;
    Ok(SandwichReport {
        closed_form: solved.solution,
        grid,
        direct,
        consistency_gap,
        direct_below_closed,
        grid_below_closed,
        closed_below_grid_bound,
        consistent,
        pass,
    })
}

/// Uniform grid of power ratios in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub rho_db_start: f64,
    pub rho_db_stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(rho_db_start: f64, rho_db_stop: f64, steps: usize) -> Result<Self> {
        if !(rho_db_start.is_finite() && rho_db_stop.is_finite()) || rho_db_start > rho_db_stop {
            return Err(Error::Input(format!(
                "sweep range must satisfy start <= stop, got {rho_db_start}..{rho_db_stop}"
            )));
        }
        if steps == 0 {
            return Err(Error::Input("steps must be at least 1".into()));
        }
        Ok(Self {
            rho_db_start,
            rho_db_stop,
            steps,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.rho_db_start];
        }
        let step = (self.rho_db_stop - self.rho_db_start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.rho_db_start + i as f64 * step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho_db: f64,
    pub capacity_bits: f64,
    pub branch: Branch,
    pub x_star: f64,
}

/// Capacity of `ch` at every point of the sweep, in sweep order.
pub fn sweep(ch: &ChannelInstance, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.points()
        .into_par_iter()
        .map(|rho_db| {
            let sol = solve(&ch.with_rho(db_to_linear(rho_db))?, &SolveOptions::default())?.solution;
            Ok(SweepRow {
                rho_db,
                capacity_bits: sol.capacity_bits,
                branch: sol.branch,
                x_star: sol.x_star,
            })
        })
        .collect()
}

/// Channel with i.i.d. unit-variance circularly-symmetric complex Gaussian entries.
pub fn random_channel<R: Rng + ?Sized>(n_r: usize, n_e: usize, rho: f64, rng: &mut R) -> Result<ChannelInstance> {
    let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).expect("valid normal");
    let mut draw = |n: usize| {
        DMatrix::from_fn(n, 2, |_, _| C64::new(normal.sample(rng), normal.sample(rng)))
    };
    let h_r = draw(n_r);
    let h_e = draw(n_e);
    ChannelInstance::new(h_r, h_e, rho)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSpec {
    pub n_r: usize,
    pub n_e: usize,
    pub rho_db: f64,
    pub trials: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub samples: usize,
    /// Fault injection applied to every trial; see [`SolveOptions`].
    pub perturbation: Option<(Coefficient, f64)>,
}

impl MonteCarloSpec {
    pub const DEFAULT_GRID_POINTS: usize = 10_000;
    pub const DEFAULT_SAMPLES: usize = 10_000;

    pub fn new(n_r: usize, n_e: usize, rho_db: f64, trials: usize, seed: u64) -> Self {
        Self {
            n_r,
            n_e,
            rho_db,
            trials,
            seed,
            grid_points: Self::DEFAULT_GRID_POINTS,
            samples: Self::DEFAULT_SAMPLES,
            perturbation: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_r == 0 || self.n_e == 0 {
            return Err(Error::Input("antenna counts must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if !self.rho_db.is_finite() {
            return Err(Error::Input("rho_db must be finite".into()));
        }
        Ok(())
    }

    /// The channel drawn for trial `index`; independent of every other trial.
    pub fn trial_channel(&self, index: usize) -> Result<ChannelInstance> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        random_channel(self.n_r, self.n_e, db_to_linear(self.rho_db), &mut rng)
    }

    fn trial_oracle_seed(&self, index: usize) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(index as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub index: usize,
    pub channel: ChannelInstance,
    pub report: std::result::Result<SandwichReport, Error>,
    pub certificate: Option<BranchCertificate>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_ok_and(|r| r.pass)
    }

    /// `|closed − grid|` in nats, or infinity on error.
    pub fn grid_deviation(&self) -> f64 {
        match &self.report {
            Ok(r) => (r.closed_form.capacity_nats - r.grid.best_value_nats).abs(),
            Err(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub spec: MonteCarloSpec,
    pub outcomes: Vec<TrialOutcome>,
}

impl MonteCarloReport {
    pub fn passed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.outcomes.len()
    }

    pub fn max_grid_deviation(&self) -> f64 {
        self.outcomes.iter().map(TrialOutcome::grid_deviation).fold(0.0, f64::max)
    }

    pub fn max_consistency_gap(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|o| o.report.as_ref().map_or(f64::INFINITY, |r| r.consistency_gap))
            .fold(0.0, f64::max)
    }

    /// Trial with the largest closed-form versus grid deviation.
    pub fn worst(&self) -> &TrialOutcome {
        self.outcomes
            .iter()
            .max_by(|a, b| a.grid_deviation().total_cmp(&b.grid_deviation()))
            .expect("at least one trial")
    }

    pub fn failures(&self) -> impl Iterator<Item = &TrialOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

/// Runs the sandwich check on `spec.trials` random channels. Trials run in
/// parallel; outcomes are returned in trial order.
pub fn run_montecarlo(spec: &MonteCarloSpec) -> Result<MonteCarloReport> {
    spec.validate()?;
    let outcomes = (0..spec.trials)
        .into_par_iter()
        .map(|index| {
            let channel = spec.trial_channel(index)?;
            let verify = VerifySpec {
                grid_points: spec.grid_points,
                samples: spec.samples,
                seed: spec.trial_oracle_seed(index),
                perturbation: spec.perturbation,
            };
            let report = verify_channel(&channel, &verify);
            let certificate = match &report {
                Ok(r) => {
                    let coeffs = crate::coefficients::coefficient_set(&gram_pair(&channel));
                    branch_certificate(&coeffs, &r.closed_form)
                }
                Err(_) => None,
            };
            Ok(TrialOutcome {
                index,
                channel,
                report,
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloReport {
        spec: *spec,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_points() {
        assert_eq!(SweepSpec::new(3.0, 9.0, 1).unwrap().points(), vec![3.0]);
        let pts = SweepSpec::new(-10.0, 30.0, 81).unwrap().points();
        assert_eq!(pts.len(), 81);
        assert_eq!(pts[30], 5.0);
        assert_eq!(pts[80], 30.0);
        assert!(SweepSpec::new(1.0, 0.0, 3).is_err());
        assert!(SweepSpec::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn trial_channels_are_reproducible() {
        let spec = MonteCarloSpec::new(3, 2, 5.0, 4, 9);
        assert_eq!(spec.trial_channel(2).unwrap(), spec.trial_channel(2).unwrap());
        assert_ne!(spec.trial_channel(1).unwrap(), spec.trial_channel(2).unwrap());
    }

    #[test]
    fn random_entries_have_unit_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = random_channel(20_000, 1, 1.0, &mut rng).unwrap();
        let mean_power = ch.h_r().iter().map(|z| z.norm_sqr()).sum::<f64>() / 40_000.0;
        assert!((mean_power - 1.0).abs() < 0.03, "{mean_power}");
    }
}
