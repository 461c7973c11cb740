//! Modulation, slicing and analytic bit error rate kernels.
//!
//! Constellations are unit average energy with Gray bit maps: PSK for 1 to 3
//! bits per symbol, square rectangular QAM for even bit counts up to 8. The
//! closed-form BER kernels are the standard nearest-neighbor approximations;
//! their `gamma` argument is the PER-BIT signal-to-noise ratio. Detector
//! outputs are symbol-level SINRs, so the ensemble-averaging helper divides
//! by the bits per symbol before applying a kernel; that convention is what
//! makes the analytic curves land on the Monte Carlo bit-level simulations.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel, ChannelConfig};
use crate::detection::mmse_sinrs;
use crate::schemes::{build_effective_channel, SchemeSpec};
use crate::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstellationKind {
    Psk,
    RectangularQam,
}

/// A Gray-mapped constellation. `points[m]` is the symbol for index `m`,
/// `bit_map[m]` its bit pattern (MSB first within the symbol).
#[derive(Debug, Clone)]
pub struct Constellation {
    pub kind: ConstellationKind,
    pub eta: u32,
    points: Vec<Complex64>,
    bit_map: Vec<u32>,
    index_of_pattern: Vec<usize>,
}

fn gray(m: u32) -> u32 {
    m ^ (m >> 1)
}

impl Constellation {
    /// 2^eta-PSK on the unit circle, Gray-coded around the ring.
    pub fn psk(eta: u32) -> Result<Self> {
        if !(1..=3).contains(&eta) {
            return Err(invalid(format!("PSK supports 1 to 3 bits per symbol, got {eta}")));
        }
        let m = 1usize << eta;
        let mut points = Vec::with_capacity(m);
        let mut bit_map = Vec::with_capacity(m);
        for i in 0..m {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            points.push(Complex64::new(theta.cos(), theta.sin()));
            bit_map.push(gray(i as u32));
        }
        Self::assemble(ConstellationKind::Psk, eta, points, bit_map)
    }

    /// Square 2^eta-QAM (even eta), independent Gray coding per axis,
    /// normalized to unit average energy.
    pub fn qam(eta: u32) -> Result<Self> {
        if eta < 2 || eta % 2 != 0 || eta > 8 {
            return Err(invalid(format!(
                "rectangular QAM needs even bits per symbol in 2..=8, got {eta}"
            )));
        }
        let per_axis = 1usize << (eta / 2);
        // Levels -(L-1), ..., -1, 1, ..., L-1 in steps of 2; average energy
        // per axis (L^2 - 1)/3.
        let axis_energy = (per_axis * per_axis - 1) as f64 / 3.0;
        let norm = (2.0 * axis_energy).sqrt();
        let level = |pos: usize| (2.0 * pos as f64 - (per_axis as f64 - 1.0)) / norm;
        let m = 1usize << eta;
        let mut points = Vec::with_capacity(m);
        let mut bit_map = Vec::with_capacity(m);
        for ipos in 0..per_axis {
            for qpos in 0..per_axis {
                points.push(Complex64::new(level(ipos), level(qpos)));
                bit_map.push((gray(ipos as u32) << (eta / 2)) | gray(qpos as u32));
            }
        }
        Self::assemble(ConstellationKind::RectangularQam, eta, points, bit_map)
    }

    fn assemble(
        kind: ConstellationKind,
        eta: u32,
        points: Vec<Complex64>,
        bit_map: Vec<u32>,
    ) -> Result<Self> {
        let m = points.len();
        let mut index_of_pattern = vec![usize::MAX; m];
        for (i, &b) in bit_map.iter().enumerate() {
            index_of_pattern[b as usize] = i;
        }
        debug_assert!(index_of_pattern.iter().all(|&i| i != usize::MAX));
        Ok(Constellation { kind, eta, points, bit_map, index_of_pattern })
    }

    /// Preset rule used by rate-matched systems: PSK up to 3 bits, QAM for
    /// even counts above, everything else unmappable.
    pub fn for_bits_per_symbol(eta: u32) -> Result<Self> {
        match eta {
            1..=3 => Self::psk(eta),
            4 | 6 | 8 => Self::qam(eta),
            _ => Err(invalid(format!(
                "no supported constellation carries {eta} bits per symbol \
                 (PSK 1-3, rectangular QAM 4/6/8)"
            ))),
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "bpsk" => Self::psk(1),
            "qpsk" => Self::psk(2),
            "8psk" => Self::psk(3),
            "4qam" => Self::qam(2),
            "16qam" => Self::qam(4),
            "64qam" => Self::qam(6),
            "256qam" => Self::qam(8),
            other => Err(invalid(format!("unknown constellation '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        match (self.kind, self.eta) {
            (ConstellationKind::Psk, 1) => "bpsk".into(),
            (ConstellationKind::Psk, 2) => "qpsk".into(),
            (ConstellationKind::Psk, e) => format!("{}psk", 1u32 << e),
            (ConstellationKind::RectangularQam, e) => format!("{}qam", 1u32 << e),
        }
    }

    pub fn size(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.eta
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    pub fn pattern(&self, index: usize) -> u32 {
        self.bit_map[index]
    }

    /// Bits of symbol `index`, MSB first.
    pub fn bits_of(&self, index: usize) -> Vec<u8> {
        let b = self.bit_map[index];
        (0..self.eta).rev().map(|k| ((b >> k) & 1) as u8).collect()
    }

    /// Maps bits (0/1 values, length a multiple of eta, MSB first per symbol)
    /// to symbols.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        if bits.len() % self.eta as usize != 0 {
            return Err(invalid(format!(
                "bit count {} not a multiple of {} bits per symbol",
                bits.len(),
                self.eta
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(invalid("bits must be 0 or 1"));
        }
        Ok(bits
            .chunks(self.eta as usize)
            .map(|chunk| {
                let mut pattern = 0u32;
                for &b in chunk {
                    pattern = (pattern << 1) | b as u32;
                }
                self.points[self.index_of_pattern[pattern as usize]]
            })
            .collect())
    }

    /// Nearest-point hard decision; ties break toward the lower index.
    pub fn slice(&self, z: Complex64) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    pub fn demodulate_hard(&self, indices: &[usize]) -> Vec<u8> {
        indices.iter().flat_map(|&i| self.bits_of(i)).collect()
    }

    pub fn demodulate_soft(&self, soft: &[Complex64]) -> Vec<u8> {
        soft.iter().flat_map(|&z| self.bits_of(self.slice(z))).collect()
    }
}

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Approximate Gray-coded 2^eta-PSK bit error rate at per-bit SNR `gamma`.
/// For eta = 1 this is the exact BPSK expression Q(sqrt(2 gamma)).
pub fn ber_psk(gamma: f64, eta: u32) -> Result<f64> {
    if eta < 1 {
        return Err(invalid("eta must be at least 1"));
    }
    if !(gamma >= 0.0) {
        return Err(invalid(format!("gamma must be non-negative, got {gamma}")));
    }
    if eta == 1 {
        return Ok(q_function((2.0 * gamma).sqrt()));
    }
    let m = (1u32 << eta) as f64;
    let arg = (2.0 * eta as f64 * gamma).sqrt() * (std::f64::consts::PI / m).sin();
    Ok(2.0 / eta as f64 * q_function(arg))
}

/// Approximate Gray-coded rectangular 2^eta-QAM bit error rate at per-bit
/// SNR `gamma`.
pub fn ber_qam(gamma: f64, eta: u32) -> Result<f64> {
    if eta < 2 || eta % 2 != 0 {
        return Err(invalid("QAM kernel needs even eta >= 2"));
    }
    if !(gamma >= 0.0) {
        return Err(invalid(format!("gamma must be non-negative, got {gamma}")));
    }
    let m = (1u32 << eta) as f64;
    let arg = (3.0 * eta as f64 * gamma / (m - 1.0)).sqrt();
    Ok(4.0 / eta as f64 * q_function(arg))
}

/// Kernel matching the constellation family, at per-bit SNR `gamma`.
pub fn ber_kernel(cons: &Constellation, gamma: f64) -> Result<f64> {
    match cons.kind {
        ConstellationKind::Psk => ber_psk(gamma, cons.eta),
        ConstellationKind::RectangularQam => ber_qam(gamma, cons.eta),
    }
}

/// Monte Carlo mean and standard error of an analytic per-realization value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AnalyticBer {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Ensemble-averaged analytic BER of a scheme with a linear MMSE front end:
/// for each channel draw, the per-stream symbol SINRs are converted to
/// per-bit ratios and pushed through the constellation's kernel, then the
/// per-stream values are averaged; the ensemble mean over `trials` draws is
/// returned with its standard error.
///
/// Channel draws come from the same per-trial substreams as the bit-level
/// simulator, so the two paths see identical channels for identical seeds.
pub fn ber_average_analytic(
    spec: &SchemeSpec,
    cfg: &ChannelConfig,
    cons: &Constellation,
    rho: f64,
    trials: u64,
) -> Result<AnalyticBer> {
    cfg.validate()?;
    spec.validate(cfg.nt)?;
    if trials == 0 {
        return Err(invalid("analytic averaging needs at least one trial"));
    }
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid(format!("SNR must be positive, got {rho}")));
    }
    let noise_var = spec.total_power / rho;
    let eta = cons.eta as f64;

    // Fixed-size chunks accumulated in trial order keep the reduction
    // identical for any worker count.
    const CHUNK: u64 = 512;
    let n_chunks = trials.div_ceil(CHUNK);
    let partials: Vec<Result<(f64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(trials);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for t in lo..hi {
                let chan = sample_channel(cfg, t)?;
                let eff = build_effective_channel(spec, &chan, noise_var)?;
                let sinrs = mmse_sinrs(&eff)?;
                let mut acc = 0.0;
                for g in &sinrs {
                    acc += ber_kernel(cons, g / eta)?;
                }
                let val = acc / sinrs.len() as f64;
                sum += val;
                sumsq += val * val;
            }
            Ok((sum, sumsq))
        })
        .collect();

    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for p in partials {
        let (s, s2) = p?;
        sum += s;
        sumsq += s2;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = ((sumsq - sum * sum / n) / (n - 1.0).max(1.0)).max(0.0);
    Ok(AnalyticBer { mean, stderr: (var / n).sqrt(), trials })
}
