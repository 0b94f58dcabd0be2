//! Secrecy capacity of Gaussian MIMO wiretap channels whose transmitter has
//! two antennas.
//!
//! The capacity `max ln det(I + Q S_R) − ln det(I + Q S_E)` over
//! `Q ⪰ 0, tr Q ≤ 1` is obtained in closed form as `ln τ★`, where `τ★` is
//! the larger of the top real root of a quadratic and an admissible real
//! root of a quartic whose coefficients are polynomial in the Gram entries.
//! The optimal covariance is rebuilt from the maximizing split
//! `Q = x e1e1† + (1 − x) uu†` and checked against a direct evaluation.
//!
//! ```
//! use mimo_secrecy::{fixtures, secrecy_capacity, Branch};
//!
//! let sol = secrecy_capacity(&fixtures::interior_channel()).unwrap();
//! assert_eq!(sol.branch, Branch::Quartic);
//! assert!((sol.capacity_bits - 3.7308).abs() < 5e-4);
//! ```

pub mod capacity;
pub mod channel;
pub mod channel_file;
pub mod coefficients;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod oracle;
pub mod roots;

pub use capacity::{
    assemble_q, branch_certificate, decompose_q, g_matrices, optimal_u, secrecy_capacity,
    secrecy_objective, solve, solve_gram, Branch, BranchCertificate, CapacitySolution,
    Diagnostics, GMatrices, SolveOptions, Solved,
};
pub use channel::{
    det3_identity_check, gram_pair, lambda_max_2x2, positive_secrecy, ChannelInstance, GramPair,
    CMat2, CVec2, C64,
};
pub use channel_file::ChannelFile;
pub use coefficients::{coefficient_set, f_values, Coefficient, CoefficientSet, FPolyValues};
pub use error::{Error, Result};
pub use experiments::{
    run_montecarlo, sweep, verify_channel, MonteCarloReport, MonteCarloSpec, SandwichReport,
    SweepRow, SweepSpec, VerifySpec,
};
pub use oracle::{direct_q_oracle, x_grid_oracle, OracleReport};
pub use roots::{solve_quadratic, solve_quartic, tau1_candidate, tau2_candidate, RootMethod, RootSet, Tau2};
