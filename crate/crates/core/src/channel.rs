//! Flat Rayleigh MIMO channel ensemble.
//!
//! Entries are i.i.d. circularly symmetric complex Gaussian with unit
//! variance (real and imaginary parts each carry variance 1/2). A realization
//! is addressed by (master seed, trial index): the same address always
//! produces the same matrix, which is what lets every scheme and SNR point
//! see common channel draws.

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::linalg::{svd, CMat, SvdResult};
use crate::rng::{substream, DOMAIN_CHANNEL};
use crate::{invalid, Result};

/// Antenna geometry and the master seed of the random ensemble.
/// Receive antennas must be at least the transmit count (nr >= nt >= 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub nt: usize,
    pub nr: usize,
    pub master_seed: u64,
}

impl ChannelConfig {
    pub fn new(nt: usize, nr: usize, master_seed: u64) -> Result<Self> {
        let cfg = ChannelConfig { nt, nr, master_seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nt < 1 || self.nr < self.nt {
            return Err(invalid(format!(
                "channel requires nr >= nt >= 1, got nt={} nr={}",
                self.nt, self.nr
            )));
        }
        Ok(())
    }
}

/// One channel draw with its eagerly computed SVD. The decomposition is what
/// every adaptation scheme consumes, so it is part of the realization.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    pub h: CMat,
    pub svd: SvdResult,
    pub trial_index: u64,
}

impl ChannelRealization {
    /// Singular values, descending.
    pub fn sigma(&self) -> &[f64] {
        &self.svd.sigma
    }
}

/// Draws realization `trial_index` of the ensemble. Entries are generated
/// row-major, real part before imaginary part, from the per-trial substream.
pub fn sample_channel(cfg: &ChannelConfig, trial_index: u64) -> Result<ChannelRealization> {
    cfg.validate()?;
    let mut rng = substream(cfg.master_seed, DOMAIN_CHANNEL, trial_index);
    let scale = 0.5f64.sqrt();
    let h = CMat::from_fn(cfg.nr, cfg.nt, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * scale, im * scale)
    });
    let svd = svd(&h)?;
    Ok(ChannelRealization { h, svd, trial_index })
}

/// An SNR grid point carrying both the linear ratio and its dB value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnrPoint {
    pub rho: f64,
    pub rho_db: f64,
}

impl SnrPoint {
    pub fn from_db(rho_db: f64) -> Self {
        SnrPoint { rho: 10f64.powf(rho_db / 10.0), rho_db }
    }

    pub fn from_linear(rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(invalid(format!("SNR must be positive and finite, got {rho}")));
        }
        Ok(SnrPoint { rho, rho_db: 10.0 * rho.log10() })
    }
}

/// Uniform dB grid from `start_db` to `stop_db` inclusive in steps of
/// `step_db`. The stop point is included when it lands within a half step.
pub fn snr_grid_db(start_db: f64, stop_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !step_db.is_finite() {
        return Err(invalid(format!("grid step must be positive, got {step_db}")));
    }
    if stop_db < start_db {
        return Err(invalid(format!("grid stop {stop_db} below start {start_db}")));
    }
    let count = ((stop_db - start_db) / step_db + 0.5).floor() as usize + 1;
    Ok((0..count).map(|i| start_db + i as f64 * step_db).collect())
}
