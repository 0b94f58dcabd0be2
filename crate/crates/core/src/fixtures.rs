//! Two reference channels at 5 dB with three receive antennas. In the first
//! the optimal covariance has full rank; in the second the eavesdropper has a
//! single antenna and beamforming is optimal.

use nalgebra::DMatrix;

use crate::channel::{db_to_linear, ChannelInstance, C64};

fn matrix(rows: usize, entries: &[(f64, f64)]) -> DMatrix<C64> {
    let data: Vec<C64> = entries.iter().map(|&(re, im)| C64::new(re, im)).collect();
    DMatrix::from_row_slice(rows, 2, &data)
}

pub fn receiver_3x2() -> DMatrix<C64> {
    matrix(
        3,
        &[
            (0.7442, 1.4223),
            (1.1740, -1.8109),
            (-0.5172, 0.4116),
            (-1.3020, 0.2417),
            (1.9755, 0.4169),
            (-0.7105, 0.7272),
        ],
    )
}

pub fn eavesdropper_3x2() -> DMatrix<C64> {
    matrix(
        3,
        &[
            (-0.4503, 0.9711),
            (-0.7453, 1.1555),
            (-0.7089, 0.1272),
            (-0.0506, 0.5835),
            (-0.1313, -0.3833),
            (0.1974, 0.1632),
        ],
    )
}

pub fn eavesdropper_1x2() -> DMatrix<C64> {
    matrix(1, &[(-1.2480, -0.2893), (4.6312, 0.2417)])
}

pub const REFERENCE_RHO_DB: f64 = 5.0;

/// Full-rank optimum: three receive and three eavesdropper antennas.
pub fn interior_channel() -> ChannelInstance {
    ChannelInstance::new(receiver_3x2(), eavesdropper_3x2(), db_to_linear(REFERENCE_RHO_DB))
        .expect("valid fixture")
}

/// Beamforming optimum: same receiver, single-antenna eavesdropper.
pub fn beamforming_channel() -> ChannelInstance {
    ChannelInstance::new(receiver_3x2(), eavesdropper_1x2(), db_to_linear(REFERENCE_RHO_DB))
        .expect("valid fixture")
}
