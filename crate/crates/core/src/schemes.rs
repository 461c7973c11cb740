//! Transmit adaptation schemes over the spatial subchannels of a channel
//! realization.
//!
//! With singular values lambda_1 >= ... >= lambda_nt and total transmit power
//! P at noise variance sigma_z^2 (rho = P / sigma_z^2):
//!
//! * equal power: every antenna carries P/nt, no feedback needed;
//! * water-filling: power poured over subchannels against levels
//!   sigma_z^2 / lambda_i^2, the capacity-optimal reference;
//! * beamforming: all power on the strongest right singular vector v_1;
//! * beam-nulling: the weakest right singular vector v_nt is fed back and the
//!   transmitter spreads equal power over its orthogonal complement, keeping
//!   the strongest nt-1 subchannels at the cost of one feedback vector;
//! * the multi-dimensional variants spend k feedback vectors: beamforming on
//!   the k strongest, or nulling the k weakest (k limited to nt/2 so the
//!   feedback stays cheaper than full channel knowledge).
//!
//! Capacities are accumulated in nats internally and reported in bits per
//! channel use.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::linalg::{orthonormal_complement, CMat};
use crate::{invalid, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Which adaptation strategy to run. `k` counts fed-back singular vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeKind {
    EqualPower,
    WaterFilling,
    Beamforming,
    BeamNulling,
    MdBeamforming { k: usize },
    MdBeamNulling { k: usize },
}

impl SchemeKind {
    /// Short label used in file names, CSV columns and CLI arguments.
    pub fn label(&self) -> String {
        match self {
            SchemeKind::EqualPower => "eq".into(),
            SchemeKind::WaterFilling => "wf".into(),
            SchemeKind::Beamforming => "bf".into(),
            SchemeKind::BeamNulling => "bn".into(),
            SchemeKind::MdBeamforming { k } => format!("md-bf{k}"),
            SchemeKind::MdBeamNulling { k } => format!("md-bn{k}"),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        let l = label.trim();
        match l {
            "eq" => Ok(SchemeKind::EqualPower),
            "wf" => Ok(SchemeKind::WaterFilling),
            "bf" => Ok(SchemeKind::Beamforming),
            "bn" => Ok(SchemeKind::BeamNulling),
            _ => {
                if let Some(k) = l.strip_prefix("md-bf") {
                    let k: usize =
                        k.parse().map_err(|_| invalid(format!("bad scheme label '{l}'")))?;
                    Ok(SchemeKind::MdBeamforming { k })
                } else if let Some(k) = l.strip_prefix("md-bn") {
                    let k: usize =
                        k.parse().map_err(|_| invalid(format!("bad scheme label '{l}'")))?;
                    Ok(SchemeKind::MdBeamNulling { k })
                } else {
                    Err(invalid(format!("unknown scheme label '{l}'")))
                }
            }
        }
    }
}

/// A scheme bound to a total transmit power budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub total_power: f64,
}

impl SchemeSpec {
    pub fn new(kind: SchemeKind, total_power: f64) -> Self {
        SchemeSpec { kind, total_power }
    }

    /// Unit power budget; SNR is then set through the noise variance.
    pub fn unit(kind: SchemeKind) -> Self {
        SchemeSpec { kind, total_power: 1.0 }
    }

    pub fn validate(&self, nt: usize) -> Result<()> {
        if !(self.total_power > 0.0) || !self.total_power.is_finite() {
            return Err(invalid(format!(
                "total power must be positive and finite, got {}",
                self.total_power
            )));
        }
        if nt < 1 {
            return Err(invalid("nt must be at least 1"));
        }
        match self.kind {
            SchemeKind::EqualPower | SchemeKind::WaterFilling | SchemeKind::Beamforming => Ok(()),
            SchemeKind::BeamNulling => {
                if nt < 2 {
                    Err(invalid("beam-nulling needs nt >= 2 (one antenna leaves nothing to null)"))
                } else {
                    Ok(())
                }
            }
            SchemeKind::MdBeamforming { k } | SchemeKind::MdBeamNulling { k } => {
                if k < 1 || k > nt / 2 {
                    Err(invalid(format!(
                        "multi-dimensional schemes need 1 <= k <= nt/2, got k={k} with nt={nt}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Stream count of the adapted transmission. Water-filling depends on the
    /// realization (active subchannels), so it has no static count.
    pub fn static_streams(&self, nt: usize) -> Option<usize> {
        match self.kind {
            SchemeKind::EqualPower => Some(nt),
            SchemeKind::WaterFilling => None,
            SchemeKind::Beamforming => Some(1),
            SchemeKind::BeamNulling => Some(nt - 1),
            SchemeKind::MdBeamforming { k } => Some(k),
            SchemeKind::MdBeamNulling { k } => Some(nt - k),
        }
    }
}

fn check_sigma(sigma: &[f64]) -> Result<()> {
    if sigma.is_empty() {
        return Err(invalid("empty singular value list"));
    }
    for (i, s) in sigma.iter().enumerate() {
        if !s.is_finite() || *s < 0.0 {
            return Err(invalid(format!("singular value {i} invalid: {s}")));
        }
    }
    for w in sigma.windows(2) {
        if w[1] > w[0] + 1e-12 * w[0].max(1.0) {
            return Err(invalid("singular values must be sorted descending"));
        }
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("SNR must be positive and finite, got {rho}")));
    }
    Ok(())
}

/// Equal-power capacity in nats: sum_i ln(1 + (rho/nt) lambda_i^2).
pub fn capacity_equal_nats(sigma: &[f64], rho: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_rho(rho)?;
    let nt = sigma.len() as f64;
    Ok(sigma.iter().map(|s| (1.0 + rho / nt * s * s).ln()).sum())
}

pub fn capacity_equal(sigma: &[f64], rho: f64) -> Result<f64> {
    Ok(capacity_equal_nats(sigma, rho)? / LN_2)
}

/// Beamforming capacity in nats: ln(1 + rho lambda_1^2).
pub fn capacity_bf_nats(sigma: &[f64], rho: f64) -> Result<f64> {
    check_sigma(sigma)?;
    check_rho(rho)?;
    Ok((1.0 + rho * sigma[0] * sigma[0]).ln())
}

pub fn capacity_bf(sigma: &[f64], rho: f64) -> Result<f64> {
    Ok(capacity_bf_nats(sigma, rho)? / LN_2)
}

/// Beam-nulling capacity in nats: equal power over the strongest nt-1
/// subchannels, sum_{i<nt} ln(1 + rho/(nt-1) lambda_i^2).
pub fn capacity_bn_nats(sigma: &[f64], rho: f64) -> Result<f64> {
    capacity_md_bn_nats(sigma, rho, 1)
}

pub fn capacity_bn(sigma: &[f64], rho: f64) -> Result<f64> {
    Ok(capacity_bn_nats(sigma, rho)? / LN_2)
}

/// k-dimensional beamforming capacity in nats over the k strongest
/// subchannels: sum_{i<=k} ln(1 + (rho/k) lambda_i^2).
pub fn capacity_md_bf_nats(sigma: &[f64], rho: f64, k: usize) -> Result<f64> {
    check_sigma(sigma)?;
    check_rho(rho)?;
    if k < 1 || k > sigma.len() {
        return Err(invalid(format!("k must be in 1..={}, got {k}", sigma.len())));
    }
    Ok(sigma[..k].iter().map(|s| (1.0 + rho / k as f64 * s * s).ln()).sum())
}

pub fn capacity_md_bf(sigma: &[f64], rho: f64, k: usize) -> Result<f64> {
    Ok(capacity_md_bf_nats(sigma, rho, k)? / LN_2)
}

/// k-dimensional beam-nulling capacity in nats: the k weakest subchannels are
/// nulled, equal power over the remaining nt-k.
pub fn capacity_md_bn_nats(sigma: &[f64], rho: f64, k: usize) -> Result<f64> {
    check_sigma(sigma)?;
    check_rho(rho)?;
    let nt = sigma.len();
    if k < 1 || k >= nt {
        return Err(invalid(format!("k must be in 1..{nt}, got {k}")));
    }
    let kept = nt - k;
    Ok(sigma[..kept].iter().map(|s| (1.0 + rho / kept as f64 * s * s).ln()).sum())
}

pub fn capacity_md_bn(sigma: &[f64], rho: f64, k: usize) -> Result<f64> {
    Ok(capacity_md_bn_nats(sigma, rho, k)? / LN_2)
}

/// Water-filling power split over spatial subchannels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerAllocation {
    /// Power per subchannel, in singular-value order; zero when inactive.
    pub per_subchannel: Vec<f64>,
    /// The common water level mu of the active set.
    pub water_level: f64,
    /// Number of active subchannels (a prefix, since sigma is descending).
    pub active: usize,
}

/// Solves max sum_i ln(1 + p_i lambda_i^2 / noise_var) subject to
/// sum p_i = total_power, p_i >= 0.
///
/// Deterministic active-set elimination: because sigma is descending, the
/// optimal active set is always a prefix, so at most nt rounds of dropping
/// the weakest candidate are needed. The returned allocation satisfies the
/// stationarity conditions to machine precision (checked in tests against an
/// independent bisection of the water level).
pub fn waterfill(sigma: &[f64], total_power: f64, noise_var: f64) -> Result<PowerAllocation> {
    check_sigma(sigma)?;
    if !(total_power > 0.0) || !total_power.is_finite() {
        return Err(invalid(format!("total power must be positive, got {total_power}")));
    }
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(invalid(format!("noise variance must be positive, got {noise_var}")));
    }
    if sigma[0] <= 0.0 {
        return Err(invalid("all subchannels have zero gain; nothing to allocate"));
    }

    // Inverse gains for the positive-gain prefix.
    let floors: Vec<f64> =
        sigma.iter().take_while(|s| **s > 0.0).map(|s| noise_var / (s * s)).collect();

    let mut active = floors.len();
    let (mu, powers) = loop {
        let floor_sum: f64 = floors[..active].iter().sum();
        let mu = (total_power + floor_sum) / active as f64;
        // The last active subchannel has the highest floor; if it drowns,
        // drop it and repeat.
        if mu <= floors[active - 1] && active > 1 {
            active -= 1;
            continue;
        }
        let powers: Vec<f64> = floors[..active].iter().map(|f| (mu - f).max(0.0)).collect();
        break (mu, powers);
    };

    let mut per_subchannel = vec![0.0; sigma.len()];
    per_subchannel[..active].copy_from_slice(&powers);
    Ok(PowerAllocation { per_subchannel, water_level: mu, active })
}

/// Water-filling capacity in nats for a given allocation.
pub fn capacity_wf_nats(sigma: &[f64], total_power: f64, noise_var: f64) -> Result<f64> {
    let alloc = waterfill(sigma, total_power, noise_var)?;
    Ok(sigma
        .iter()
        .zip(alloc.per_subchannel.iter())
        .map(|(s, p)| (1.0 + p * s * s / noise_var).ln())
        .sum())
}

pub fn capacity_wf(sigma: &[f64], total_power: f64, noise_var: f64) -> Result<f64> {
    Ok(capacity_wf_nats(sigma, total_power, noise_var)? / LN_2)
}

/// Instantaneous capacity of a scheme in nats at SNR `rho = P / noise_var`.
pub fn instantaneous_capacity_nats(spec: &SchemeSpec, sigma: &[f64], rho: f64) -> Result<f64> {
    spec.validate(sigma.len())?;
    match spec.kind {
        SchemeKind::EqualPower => capacity_equal_nats(sigma, rho),
        SchemeKind::WaterFilling => {
            // Capacity depends only on rho; use a unit power budget.
            capacity_wf_nats(sigma, 1.0, 1.0 / rho)
        }
        SchemeKind::Beamforming => capacity_bf_nats(sigma, rho),
        SchemeKind::BeamNulling => capacity_bn_nats(sigma, rho),
        SchemeKind::MdBeamforming { k } => capacity_md_bf_nats(sigma, rho, k),
        SchemeKind::MdBeamNulling { k } => capacity_md_bn_nats(sigma, rho, k),
    }
}

pub fn instantaneous_capacity_bits(spec: &SchemeSpec, sigma: &[f64], rho: f64) -> Result<f64> {
    Ok(instantaneous_capacity_nats(spec, sigma, rho)? / LN_2)
}

/// The channel a detector sees after transmit adaptation: received vector
/// y = matrix * x + z with unit-energy symbols x and noise variance
/// `noise_var` per receive dimension. Power scaling is folded into `matrix`.
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    pub matrix: CMat,
    pub streams: usize,
    pub noise_var: f64,
}

/// Builds the effective channel of a scheme for one realization.
///
/// The feedback quantities come from the realization's SVD; the orthogonal
/// complement used by beam-nulling is the deterministic QR-based construction
/// from `linalg`, so transmitter and receiver models agree on it exactly.
pub fn build_effective_channel(
    spec: &SchemeSpec,
    chan: &ChannelRealization,
    noise_var: f64,
) -> Result<EffectiveChannel> {
    let nt = chan.h.cols();
    spec.validate(nt)?;
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(invalid(format!("noise variance must be positive, got {noise_var}")));
    }
    let p = spec.total_power;
    let v = &chan.svd.v;

    let matrix = match spec.kind {
        SchemeKind::EqualPower => chan.h.scale_real((p / nt as f64).sqrt()),
        SchemeKind::WaterFilling => {
            let alloc = waterfill(chan.sigma(), p, noise_var)?;
            let idx: Vec<usize> = (0..nt).filter(|&i| alloc.per_subchannel[i] > 0.0).collect();
            let mut cols = v.select_cols(&idx);
            for (jj, &i) in idx.iter().enumerate() {
                let w = alloc.per_subchannel[i].sqrt();
                for r in 0..cols.rows() {
                    cols[(r, jj)] = cols[(r, jj)].scale(w);
                }
            }
            chan.h.mul(&cols)
        }
        SchemeKind::Beamforming => {
            let v1 = v.select_cols(&[0]);
            chan.h.mul(&v1).scale_real(p.sqrt())
        }
        SchemeKind::BeamNulling => {
            let weakest = v.select_cols(&[nt - 1]);
            let phi = orthonormal_complement(&weakest)?;
            chan.h.mul(&phi).scale_real((p / (nt - 1) as f64).sqrt())
        }
        SchemeKind::MdBeamforming { k } => {
            let vk = v.select_cols(&(0..k).collect::<Vec<_>>());
            chan.h.mul(&vk).scale_real((p / k as f64).sqrt())
        }
        SchemeKind::MdBeamNulling { k } => {
            let weak = v.select_cols(&((nt - k)..nt).collect::<Vec<_>>());
            let phi = orthonormal_complement(&weak)?;
            chan.h.mul(&phi).scale_real((p / (nt - k) as f64).sqrt())
        }
    };
    let streams = matrix.cols();
    Ok(EffectiveChannel { matrix, streams, noise_var })
}

/// Numerical derivative of a capacity grid with respect to linear SNR.
/// Central differences inside, one-sided at the ends; needs at least three
/// points on a strictly increasing grid. Units follow the input (a nats grid
/// yields nats per unit rho).
pub fn slope_curve(rho_grid: &[f64], capacities: &[f64]) -> Result<Vec<f64>> {
    let n = rho_grid.len();
    if n < 3 {
        return Err(invalid(format!("slope needs at least 3 grid points, got {n}")));
    }
    if capacities.len() != n {
        return Err(invalid("capacity list length does not match grid"));
    }
    for w in rho_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid("rho grid must be strictly increasing"));
        }
    }
    let mut out = Vec::with_capacity(n);
    out.push((capacities[1] - capacities[0]) / (rho_grid[1] - rho_grid[0]));
    for i in 1..n - 1 {
        out.push((capacities[i + 1] - capacities[i - 1]) / (rho_grid[i + 1] - rho_grid[i - 1]));
    }
    out.push((capacities[n - 1] - capacities[n - 2]) / (rho_grid[n - 1] - rho_grid[n - 2]));
    Ok(out)
}
