//! Monte Carlo engines: ergodic capacity estimation, bit-level BER
//! simulation with stopping rules, crossover detection, and slope averages.
//!
//! Determinism contract: every estimate is a pure function of the
//! configuration and the master seed. Channel draws are indexed by trial
//! number, bit and noise draws by (SNR point, trial number), and parallel
//! reductions run over fixed-size chunks combined in trial order — so
//! results are bit-identical for any worker count, and different schemes
//! evaluated under the same seed see the same channels (common random
//! numbers), which sharpens every curve comparison.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{sample_channel, ChannelConfig, SnrPoint};
use crate::detection::{matched_filter_od, ml_detect, mmse_detect, ML_SEARCH_CAP};
use crate::modem::{ber_average_analytic, Constellation};
use crate::rng::{point_domain, substream, DOMAIN_BITS, DOMAIN_NOISE};
use crate::schemes::{
    build_effective_channel, instantaneous_capacity_bits, SchemeKind, SchemeSpec,
};
use crate::stcode::{lifted_channel, stack_received, LinearDispersionCode, OrthogonalDesign};
use crate::{invalid, Result};

const CAPACITY_CHUNK: u64 = 1024;
const BER_CHUNK: u64 = 256;
const FIRST_ROUND_TRIALS: u64 = 512;
const MAX_ROUND_TRIALS: u64 = 131_072;

/// Ergodic capacity of one scheme over an SNR grid.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityCurve {
    pub scheme: String,
    pub spec: SchemeSpec,
    pub rho_grid_db: Vec<f64>,
    pub mean_bits: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
}

/// Estimates ergodic capacities for several schemes over a shared grid,
/// reusing the same channel draws for every scheme and SNR point.
pub fn estimate_capacity_set(
    specs: &[SchemeSpec],
    cfg: &ChannelConfig,
    rho_grid_db: &[f64],
    trials: u64,
) -> Result<Vec<CapacityCurve>> {
    cfg.validate()?;
    if specs.is_empty() {
        return Err(invalid("no schemes requested"));
    }
    for spec in specs {
        spec.validate(cfg.nt)?;
    }
    if trials < 100 {
        return Err(invalid(format!(
            "capacity estimation needs at least 100 trials, got {trials}"
        )));
    }
    if rho_grid_db.is_empty() {
        return Err(invalid("empty SNR grid"));
    }
    let rhos: Vec<f64> = rho_grid_db.iter().map(|&db| SnrPoint::from_db(db).rho).collect();
    let n_cells = specs.len() * rhos.len();

    let n_chunks = trials.div_ceil(CAPACITY_CHUNK);
    let partials: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CAPACITY_CHUNK;
            let hi = ((c + 1) * CAPACITY_CHUNK).min(trials);
            let mut sum = vec![0.0; n_cells];
            let mut sumsq = vec![0.0; n_cells];
            for t in lo..hi {
                let chan = sample_channel(cfg, t)?;
                let sigma = chan.sigma();
                for (si, spec) in specs.iter().enumerate() {
                    for (ri, &rho) in rhos.iter().enumerate() {
                        let bits = instantaneous_capacity_bits(spec, sigma, rho)?;
                        let cell = si * rhos.len() + ri;
                        sum[cell] += bits;
                        sumsq[cell] += bits * bits;
                    }
                }
            }
            Ok((sum, sumsq))
        })
        .collect();

    let mut sum = vec![0.0; n_cells];
    let mut sumsq = vec![0.0; n_cells];
    for p in partials {
        let (s, s2) = p?;
        for i in 0..n_cells {
            sum[i] += s[i];
            sumsq[i] += s2[i];
        }
    }

    let n = trials as f64;
    let mut curves = Vec::with_capacity(specs.len());
    for (si, spec) in specs.iter().enumerate() {
        let mut mean_bits = Vec::with_capacity(rhos.len());
        let mut stderr = Vec::with_capacity(rhos.len());
        for ri in 0..rhos.len() {
            let cell = si * rhos.len() + ri;
            let mean = sum[cell] / n;
            let var = ((sumsq[cell] - sum[cell] * sum[cell] / n) / (n - 1.0).max(1.0)).max(0.0);
            mean_bits.push(mean);
            stderr.push((var / n).sqrt());
        }
        curves.push(CapacityCurve {
            scheme: spec.kind.label(),
            spec: *spec,
            rho_grid_db: rho_grid_db.to_vec(),
            mean_bits,
            stderr,
            trials,
            master_seed: cfg.master_seed,
        });
    }
    Ok(curves)
}

pub fn estimate_capacity(
    spec: &SchemeSpec,
    cfg: &ChannelConfig,
    rho_grid_db: &[f64],
    trials: u64,
) -> Result<CapacityCurve> {
    Ok(estimate_capacity_set(std::slice::from_ref(spec), cfg, rho_grid_db, trials)?
        .pop()
        .expect("one curve per spec"))
}

/// Ensemble mean of the capacity slope dC/drho (nats per unit linear SNR)
/// at one SNR, by per-realization central differences. Returns (mean,
/// standard error).
pub fn estimate_mean_slope(
    spec: &SchemeSpec,
    cfg: &ChannelConfig,
    rho: f64,
    trials: u64,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    spec.validate(cfg.nt)?;
    if trials < 100 {
        return Err(invalid("slope estimation needs at least 100 trials"));
    }
    let h = rho * 1e-3;
    let to_nats = std::f64::consts::LN_2;
    let n_chunks = trials.div_ceil(CAPACITY_CHUNK);
    let partials: Vec<Result<(f64, f64)>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CAPACITY_CHUNK;
            let hi = ((c + 1) * CAPACITY_CHUNK).min(trials);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for t in lo..hi {
                let chan = sample_channel(cfg, t)?;
                let sigma = chan.sigma();
                let hi_c = instantaneous_capacity_bits(spec, sigma, rho + h)? * to_nats;
                let lo_c = instantaneous_capacity_bits(spec, sigma, rho - h)? * to_nats;
                let slope = (hi_c - lo_c) / (2.0 * h);
                sum += slope;
                sumsq += slope * slope;
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
    Ok((mean, (var / n).sqrt()))
}

/// A sign change of `a - b`, located by linear interpolation in dB.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Crossover {
    pub rho_db: f64,
    /// True when |a - b| exceeds twice the combined standard error at both
    /// bracketing grid points, i.e. the sign change is resolved.
    pub confident: bool,
}

/// Finds every crossing of two curves sharing a grid. Identical curves (or
/// curves that never change order) yield an empty list.
pub fn detect_crossover(
    rho_grid_db: &[f64],
    a: &[f64],
    b: &[f64],
    a_err: &[f64],
    b_err: &[f64],
) -> Result<Vec<Crossover>> {
    let n = rho_grid_db.len();
    if a.len() != n || b.len() != n || a_err.len() != n || b_err.len() != n {
        return Err(invalid("crossover inputs must share one grid"));
    }
    if n < 2 {
        return Err(invalid("crossover detection needs at least two grid points"));
    }
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let d0 = a[i] - b[i];
        let d1 = a[i + 1] - b[i + 1];
        if d0 == 0.0 && d1 == 0.0 {
            continue;
        }
        let crossing = if d0 == 0.0 {
            // Counted once, at the left bracket of the zero.
            i > 0 && (a[i - 1] - b[i - 1]) * d1 < 0.0
        } else {
            d0 * d1 < 0.0
        };
        if !crossing {
            continue;
        }
        let frac = if d1 == d0 { 0.5 } else { d0 / (d0 - d1) };
        let rho_db = rho_grid_db[i] + frac * (rho_grid_db[i + 1] - rho_grid_db[i]);
        let sep0 = 2.0 * (a_err[i].powi(2) + b_err[i].powi(2)).sqrt();
        let sep1 = 2.0 * (a_err[i + 1].powi(2) + b_err[i + 1].powi(2)).sqrt();
        let confident = d0.abs() >= sep0 && d1.abs() >= sep1;
        out.push(Crossover { rho_db, confident });
    }
    Ok(out)
}

/// Space-time code attached to a bit-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CodeSpec {
    /// One symbol per stream per use, no coding across time.
    None,
    /// Square cyclic linear dispersion code over the stream count.
    Ldc,
    /// Orthogonal design matched to the stream count.
    Od(OrthogonalDesignKind),
}

/// Serializable mirror of the orthogonal design variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OrthogonalDesignKind {
    Alamouti2,
    Rate34_3,
    Rate34_4,
}

impl OrthogonalDesignKind {
    pub fn design(&self) -> OrthogonalDesign {
        match self {
            OrthogonalDesignKind::Alamouti2 => OrthogonalDesign::Alamouti2,
            OrthogonalDesignKind::Rate34_3 => OrthogonalDesign::Rate34_3,
            OrthogonalDesignKind::Rate34_4 => OrthogonalDesign::Rate34_4,
        }
    }

    pub fn for_streams(streams: usize) -> Result<Self> {
        Ok(match OrthogonalDesign::for_streams(streams)? {
            OrthogonalDesign::Alamouti2 => OrthogonalDesignKind::Alamouti2,
            OrthogonalDesign::Rate34_3 => OrthogonalDesignKind::Rate34_3,
            OrthogonalDesign::Rate34_4 => OrthogonalDesignKind::Rate34_4,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Receiver {
    Mmse,
    Ml,
    MatchedFilter,
}

impl Receiver {
    pub fn label(&self) -> &'static str {
        match self {
            Receiver::Mmse => "mmse",
            Receiver::Ml => "ml",
            Receiver::MatchedFilter => "mf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mmse" => Ok(Receiver::Mmse),
            "ml" => Ok(Receiver::Ml),
            "mf" | "matched" | "matched-filter" => Ok(Receiver::MatchedFilter),
            other => Err(invalid(format!("unknown receiver '{other}'"))),
        }
    }
}

/// A complete bit-level system: scheme, optional space-time code,
/// constellation, and receiver.
#[derive(Debug, Clone)]
pub struct BerSystem {
    pub scheme: SchemeSpec,
    pub code: CodeSpec,
    pub constellation: Constellation,
    pub receiver: Receiver,
}

impl BerSystem {
    pub fn new(
        scheme: SchemeSpec,
        code: CodeSpec,
        constellation: Constellation,
        receiver: Receiver,
    ) -> Self {
        BerSystem { scheme, code, constellation, receiver }
    }

    /// Builds a system carrying `rate` information bits per channel use,
    /// deriving the constellation order from the code geometry. Fails when
    /// the rate is not divisible into an integer number of bits per symbol.
    pub fn for_rate(
        scheme: SchemeSpec,
        code: CodeSpec,
        receiver: Receiver,
        rate: u32,
        nt: usize,
    ) -> Result<Self> {
        scheme.validate(nt)?;
        let streams = scheme
            .static_streams(nt)
            .ok_or_else(|| invalid("bit-level simulation needs a fixed stream count"))?;
        let (bits_per_block, symbols_per_block) = match code {
            CodeSpec::None => (rate as usize, streams),
            CodeSpec::Ldc => (rate as usize * streams, streams * streams),
            CodeSpec::Od(kind) => {
                let od = kind.design();
                (rate as usize * od.block_len(), od.num_symbols())
            }
        };
        if bits_per_block % symbols_per_block != 0 {
            return Err(invalid(format!(
                "rate {rate} bits/use cannot be split across {symbols_per_block} symbols \
                 per block (needs {bits_per_block} bits per block)"
            )));
        }
        let eta = (bits_per_block / symbols_per_block) as u32;
        let constellation = Constellation::for_bits_per_symbol(eta)?;
        let sys = BerSystem { scheme, code, constellation, receiver };
        sys.validate(nt)?;
        Ok(sys)
    }

    /// Streams seen by the space-time encoder (the effective channel width).
    pub fn stream_count(&self, nt: usize) -> Result<usize> {
        self.scheme
            .static_streams(nt)
            .ok_or_else(|| invalid("bit-level simulation needs a fixed stream count"))
    }

    /// Information bits carried by one simulated block.
    pub fn bits_per_block(&self, nt: usize) -> Result<u64> {
        let streams = self.stream_count(nt)?;
        let eta = self.constellation.bits_per_symbol() as u64;
        Ok(match self.code {
            CodeSpec::None => streams as u64 * eta,
            CodeSpec::Ldc => (streams * streams) as u64 * eta,
            CodeSpec::Od(kind) => kind.design().num_symbols() as u64 * eta,
        })
    }

    /// Information bits per channel use.
    pub fn rate_bits_per_use(&self, nt: usize) -> Result<f64> {
        let bits = self.bits_per_block(nt)? as f64;
        let uses = match self.code {
            CodeSpec::None => 1.0,
            CodeSpec::Ldc => self.stream_count(nt)? as f64,
            CodeSpec::Od(kind) => kind.design().block_len() as f64,
        };
        Ok(bits / uses)
    }

    pub fn validate(&self, nt: usize) -> Result<()> {
        self.scheme.validate(nt)?;
        if self.scheme.kind == SchemeKind::WaterFilling {
            return Err(invalid(
                "water-filling varies its stream count per realization; \
                 bit-level simulation supports fixed-stream schemes only",
            ));
        }
        let streams = self.stream_count(nt)?;
        match (&self.code, &self.receiver) {
            (CodeSpec::Od(kind), Receiver::MatchedFilter) => {
                if kind.design().streams() != streams {
                    return Err(invalid(format!(
                        "orthogonal design spans {} streams but the scheme produces {streams}",
                        kind.design().streams()
                    )));
                }
            }
            (CodeSpec::Od(_), r) => {
                return Err(invalid(format!(
                    "orthogonal designs use the matched-filter receiver, got {}",
                    r.label()
                )));
            }
            (_, Receiver::MatchedFilter) => {
                return Err(invalid("the matched-filter receiver requires an orthogonal design"));
            }
            _ => {}
        }
        if self.receiver == Receiver::Ml {
            let detected_streams = match self.code {
                CodeSpec::None => streams,
                CodeSpec::Ldc => streams * streams,
                CodeSpec::Od(_) => unreachable!("rejected above"),
            };
            let mut space = 1u64;
            for _ in 0..detected_streams {
                space = space.saturating_mul(self.constellation.size() as u64);
            }
            if space > ML_SEARCH_CAP {
                return Err(invalid(format!(
                    "ML search space {}^{detected_streams} exceeds the cap of {ML_SEARCH_CAP}",
                    self.constellation.size()
                )));
            }
        }
        Ok(())
    }

    /// Stable identifier used in output files, e.g. `md-bn2+ldc-qpsk-mmse`.
    pub fn label(&self) -> String {
        let code = match self.code {
            CodeSpec::None => String::new(),
            CodeSpec::Ldc => "+ldc".into(),
            CodeSpec::Od(kind) => format!("+{}", kind.design().label()),
        };
        format!(
            "{}{}-{}-{}",
            self.scheme.kind.label(),
            code,
            self.constellation.name(),
            self.receiver.label()
        )
    }
}

/// Stopping rule for one BER grid point: stop once `min_errors` bit errors
/// are seen, or flag the point after `max_bits` simulated bits.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StoppingRule {
    pub min_errors: u64,
    pub max_bits: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule { min_errors: 200, max_bits: 100_000_000 }
    }
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        if self.min_errors == 0 || self.max_bits == 0 {
            return Err(invalid("stopping rule needs positive error and bit budgets"));
        }
        Ok(())
    }
}

/// Measured bit error rates of one system over an SNR grid.
#[derive(Debug, Clone, Serialize)]
pub struct BerCurve {
    pub system: String,
    pub rho_grid_db: Vec<f64>,
    pub ber: Vec<f64>,
    /// Standard error of the BER estimate from the per-trial spread of
    /// error counts. Trials share a channel draw, so their bit errors are
    /// correlated; this clustered estimate is honest where a naive
    /// binomial one would be optimistic.
    pub stderr: Vec<f64>,
    pub error_counts: Vec<u64>,
    pub bit_counts: Vec<u64>,
    /// True where the bit budget ran out before `min_errors` errors.
    pub capped: Vec<bool>,
    pub master_seed: u64,
}

fn complex_noise(rng: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let sd = (0.5 * var).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(sd * re, sd * im)
}

/// One transmit/detect round trip; returns (bit errors, bits sent).
fn run_trial(
    system: &BerSystem,
    cfg: &ChannelConfig,
    rho: f64,
    point_idx: usize,
    trial: u64,
) -> Result<(u64, u64)> {
    let chan = sample_channel(cfg, trial)?;
    let noise_var = system.scheme.total_power / rho;
    let eff = build_effective_channel(&system.scheme, &chan, noise_var)?;
    let cons = &system.constellation;
    let mut bits_rng = substream(cfg.master_seed, point_domain(DOMAIN_BITS, point_idx), trial);
    let mut noise_rng = substream(cfg.master_seed, point_domain(DOMAIN_NOISE, point_idx), trial);

    let n_symbols = match system.code {
        CodeSpec::None => eff.streams,
        CodeSpec::Ldc => eff.streams * eff.streams,
        CodeSpec::Od(kind) => kind.design().num_symbols(),
    };
    let n_bits = n_symbols * cons.bits_per_symbol() as usize;
    let tx_bits: Vec<u8> = (0..n_bits).map(|_| bits_rng.gen_range(0..=1u8)).collect();
    let symbols = cons.modulate(&tx_bits)?;

    let rx_bits = match system.code {
        CodeSpec::None => {
            let mut y = eff.matrix.mul_vec(&symbols);
            for v in y.iter_mut() {
                *v += complex_noise(&mut noise_rng, noise_var);
            }
            let hard = match system.receiver {
                Receiver::Mmse => mmse_detect(&eff, &y, cons)?.hard_symbols,
                Receiver::Ml => ml_detect(&eff, &y, cons)?,
                Receiver::MatchedFilter => unreachable!("rejected at validation"),
            };
            cons.demodulate_hard(&hard)
        }
        CodeSpec::Ldc => {
            let code = LinearDispersionCode::cyclic(eff.streams, eff.streams)?;
            let s = code.encode(&symbols)?;
            let mut y = eff.matrix.mul(&s);
            for t in 0..y.cols() {
                for r in 0..y.rows() {
                    y[(r, t)] += complex_noise(&mut noise_rng, noise_var);
                }
            }
            let lifted = lifted_channel(&eff, &code)?;
            let y_vec = stack_received(&y);
            let hard = match system.receiver {
                Receiver::Mmse => mmse_detect(&lifted, &y_vec, cons)?.hard_symbols,
                Receiver::Ml => ml_detect(&lifted, &y_vec, cons)?,
                Receiver::MatchedFilter => unreachable!("rejected at validation"),
            };
            cons.demodulate_hard(&hard)
        }
        CodeSpec::Od(kind) => {
            let od = kind.design();
            let s = od.encode(&symbols)?;
            let mut y = eff.matrix.mul(&s);
            for t in 0..y.cols() {
                for r in 0..y.rows() {
                    y[(r, t)] += complex_noise(&mut noise_rng, noise_var);
                }
            }
            let det = matched_filter_od(&eff, od, &y)?;
            cons.demodulate_soft(&det.soft_symbols)
        }
    };

    let errors = tx_bits.iter().zip(&rx_bits).filter(|(a, b)| a != b).count() as u64;
    Ok((errors, n_bits as u64))
}

fn simulate_point(
    system: &BerSystem,
    cfg: &ChannelConfig,
    rho: f64,
    point_idx: usize,
    stopping: &StoppingRule,
    bits_per_trial: u64,
) -> Result<(u64, u64, f64)> {
    let mut errors = 0u64;
    let mut bits = 0u64;
    let mut errors_sq = 0u64;
    let mut next_trial = 0u64;
    let mut round = FIRST_ROUND_TRIALS;
    while errors < stopping.min_errors && bits < stopping.max_bits {
        let remaining = (stopping.max_bits - bits).div_ceil(bits_per_trial);
        let n = round.min(remaining).max(1);
        let n_chunks = n.div_ceil(BER_CHUNK);
        let partials: Vec<Result<(u64, u64, u64)>> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = next_trial + c * BER_CHUNK;
                let hi = (next_trial + (c + 1) * BER_CHUNK).min(next_trial + n);
                let mut e = 0u64;
                let mut b = 0u64;
                let mut e2 = 0u64;
                for t in lo..hi {
                    let (te, tb) = run_trial(system, cfg, rho, point_idx, t)?;
                    e += te;
                    b += tb;
                    e2 += te * te;
                }
                Ok((e, b, e2))
            })
            .collect();
        for p in partials {
            let (e, b, e2) = p?;
            errors += e;
            bits += b;
            errors_sq += e2;
        }
        next_trial += n;
        round = (round * 2).min(MAX_ROUND_TRIALS);
    }
    // Clustered standard error: trials are the independent unit, not bits.
    let n = next_trial as f64;
    let stderr = if next_trial > 1 {
        let mean = errors as f64 / n;
        let var = (errors_sq as f64 - n * mean * mean) / (n - 1.0);
        (var.max(0.0) / n).sqrt() / bits_per_trial as f64
    } else {
        0.0
    };
    Ok((errors, bits, stderr))
}

/// Bit-level Monte Carlo BER of one system over an SNR grid.
pub fn simulate_ber(
    system: &BerSystem,
    cfg: &ChannelConfig,
    rho_grid_db: &[f64],
    stopping: &StoppingRule,
) -> Result<BerCurve> {
    cfg.validate()?;
    system.validate(cfg.nt)?;
    stopping.validate()?;
    if rho_grid_db.is_empty() {
        return Err(invalid("empty SNR grid"));
    }
    let bits_per_trial = system.bits_per_block(cfg.nt)?;
    let mut ber = Vec::with_capacity(rho_grid_db.len());
    let mut stderr = Vec::with_capacity(rho_grid_db.len());
    let mut error_counts = Vec::with_capacity(rho_grid_db.len());
    let mut bit_counts = Vec::with_capacity(rho_grid_db.len());
    let mut capped = Vec::with_capacity(rho_grid_db.len());
    for (point_idx, &db) in rho_grid_db.iter().enumerate() {
        let rho = SnrPoint::from_db(db).rho;
        let (errors, bits, se) =
            simulate_point(system, cfg, rho, point_idx, stopping, bits_per_trial)?;
        ber.push(errors as f64 / bits as f64);
        stderr.push(se);
        error_counts.push(errors);
        bit_counts.push(bits);
        capped.push(errors < stopping.min_errors);
    }
    Ok(BerCurve {
        system: system.label(),
        rho_grid_db: rho_grid_db.to_vec(),
        ber,
        stderr,
        error_counts,
        bit_counts,
        capped,
        master_seed: cfg.master_seed,
    })
}

/// Analytic (kernel-based) BER of an MMSE-detected system over a grid,
/// averaged over `trials` channel draws per point. The draws match the
/// bit-level simulator's, so the two curves are directly comparable.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticBerCurve {
    pub system: String,
    pub rho_grid_db: Vec<f64>,
    pub ber: Vec<f64>,
    pub stderr: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
}

pub fn analytic_ber_curve(
    spec: &SchemeSpec,
    cfg: &ChannelConfig,
    cons: &Constellation,
    rho_grid_db: &[f64],
    trials: u64,
) -> Result<AnalyticBerCurve> {
    if rho_grid_db.is_empty() {
        return Err(invalid("empty SNR grid"));
    }
    let mut ber = Vec::with_capacity(rho_grid_db.len());
    let mut stderr = Vec::with_capacity(rho_grid_db.len());
    for &db in rho_grid_db {
        let rho = SnrPoint::from_db(db).rho;
        let est = ber_average_analytic(spec, cfg, cons, rho, trials)?;
        ber.push(est.mean);
        stderr.push(est.stderr);
    }
    Ok(AnalyticBerCurve {
        system: format!("{}-{}-analytic", spec.kind.label(), cons.name()),
        rho_grid_db: rho_grid_db.to_vec(),
        ber,
        stderr,
        trials,
        master_seed: cfg.master_seed,
    })
}
