#![allow(dead_code)]

use mimo_secrecy::channel::hermitian;
use mimo_secrecy::{CMat2, ChannelInstance, GramPair, C64};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cnormal<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn cvec<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| cnormal(rng)).collect()
}

pub fn cmatrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| cnormal(rng))
}

/// Random PSD 2×2 matrix `A†A` with `A` of `rank` rows, scaled by `scale`.
pub fn random_psd<R: Rng>(rng: &mut R, rank: usize, scale: f64) -> CMat2 {
    let a = cmatrix(rng, rank, 2);
    mimo_secrecy::channel::gram_2x2(&a) * C64::from(scale)
}

pub fn random_gram_pair<R: Rng>(rng: &mut R) -> GramPair {
    let rank_r = rng.random_range(1..=3);
    let rank_e = rng.random_range(1..=3);
    let scale_r = 10f64.powf(rng.random_range(-1.0..1.5));
    let scale_e = 10f64.powf(rng.random_range(-1.0..1.5));
    GramPair::new(
        random_psd(rng, rank_r, scale_r),
        random_psd(rng, rank_e, scale_e),
    )
    .unwrap()
}

pub fn random_channel<R: Rng>(rng: &mut R, n_r: usize, n_e: usize, rho: f64) -> ChannelInstance {
    ChannelInstance::new(cmatrix(rng, n_r, 2), cmatrix(rng, n_e, 2), rho).unwrap()
}

/// Haar unitary of size `n` from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    let qr = cmatrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            d / C64::from(d.norm())
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q * phases
}

pub fn diag(a: f64, c: f64) -> CMat2 {
    hermitian(a, C64::new(0.0, 0.0), c)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
