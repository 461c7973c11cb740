//! Receivers for the effective channel: unbiased linear MMSE with per-stream
//! SINR, exhaustive maximum-likelihood search, and the matched filter that
//! orthogonal designs admit.
//!
//! The MMSE path treats each stream in turn: with `R_I` the covariance of
//! interference plus noise (all other columns plus `noise_var * I`), the
//! unbiased estimate is `x_i + z_i` where `z_i` has variance `1/gamma_i` and
//! `gamma_i = h_i^H R_I^{-1} h_i` is the post-detection SINR. Because the
//! estimator is unbiased, downstream slicing and the analytic BER kernels
//! can both consume `gamma_i` directly.

use num_complex::Complex64;

use crate::linalg::{hermitian_solve, vec_dot, CMat};
use crate::modem::Constellation;
use crate::schemes::EffectiveChannel;
use crate::stcode::OrthogonalDesign;
use crate::{invalid, numerical, Result};

/// Largest exhaustive ML search space (constellation size ^ streams).
pub const ML_SEARCH_CAP: u64 = 1 << 20;

/// Output of the linear MMSE receiver.
#[derive(Debug, Clone)]
pub struct DetectionResult {
    /// Unbiased per-stream estimates `x_i + z_i`.
    pub soft_symbols: Vec<Complex64>,
    /// Per-stream post-detection SINR (linear).
    pub sinr: Vec<f64>,
    /// Constellation indices after nearest-point slicing.
    pub hard_symbols: Vec<usize>,
}

fn check_effective(eff: &EffectiveChannel) -> Result<()> {
    if eff.streams == 0 || eff.matrix.cols() != eff.streams {
        return Err(invalid(format!(
            "effective channel claims {} streams but has {} columns",
            eff.streams,
            eff.matrix.cols()
        )));
    }
    if !(eff.noise_var > 0.0) || !eff.noise_var.is_finite() {
        return Err(invalid(format!(
            "noise variance must be positive and finite, got {}",
            eff.noise_var
        )));
    }
    if !eff.matrix.is_finite() {
        return Err(invalid("effective channel has non-finite entries"));
    }
    Ok(())
}

/// Per-stream filters `s_i = R_I^{-1} h_i` and SINRs `gamma_i`.
fn mmse_filters(eff: &EffectiveChannel) -> Result<Vec<(Vec<Complex64>, f64)>> {
    check_effective(eff)?;
    let nr = eff.matrix.rows();
    let n = eff.streams;
    // Full covariance H H^H + noise_var I; per stream subtract the own
    // column's outer product to get R_I.
    let full = {
        let mut m = eff.matrix.mul(&eff.matrix.h());
        for i in 0..nr {
            m[(i, i)] += eff.noise_var;
        }
        m
    };
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let h_i = eff.matrix.col(i);
        let mut r_i = full.clone();
        for r in 0..nr {
            for c in 0..nr {
                r_i[(r, c)] -= h_i[r] * h_i[c].conj();
            }
        }
        let s = hermitian_solve(&r_i, &h_i)?;
        let gamma = vec_dot(&h_i, &s).re;
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(numerical(format!(
                "non-positive SINR {gamma} for stream {i} (noise_var {})",
                eff.noise_var
            )));
        }
        out.push((s, gamma));
    }
    Ok(out)
}

/// Post-detection SINR of each stream under unbiased linear MMSE.
pub fn mmse_sinrs(eff: &EffectiveChannel) -> Result<Vec<f64>> {
    Ok(mmse_filters(eff)?.into_iter().map(|(_, g)| g).collect())
}

/// Unbiased linear MMSE detection of one received vector.
pub fn mmse_detect(
    eff: &EffectiveChannel,
    y: &[Complex64],
    cons: &Constellation,
) -> Result<DetectionResult> {
    let filters = mmse_filters(eff)?;
    if y.len() != eff.matrix.rows() {
        return Err(invalid(format!(
            "received vector has length {}, channel has {} outputs",
            y.len(),
            eff.matrix.rows()
        )));
    }
    let mut soft = Vec::with_capacity(filters.len());
    let mut sinr = Vec::with_capacity(filters.len());
    let mut hard = Vec::with_capacity(filters.len());
    for (s, gamma) in filters {
        // w = s / gamma makes the estimator unbiased; x_hat = w^H y.
        let x_hat = vec_dot(&s, y) / gamma;
        hard.push(cons.slice(x_hat));
        soft.push(x_hat);
        sinr.push(gamma);
    }
    Ok(DetectionResult { soft_symbols: soft, sinr, hard_symbols: hard })
}

/// Exhaustive maximum-likelihood detection: argmin over all symbol vectors
/// of the residual `||y - H x||^2`. Rejected if the search space exceeds
/// [`ML_SEARCH_CAP`].
pub fn ml_detect(
    eff: &EffectiveChannel,
    y: &[Complex64],
    cons: &Constellation,
) -> Result<Vec<usize>> {
    check_effective(eff)?;
    let nr = eff.matrix.rows();
    if y.len() != nr {
        return Err(invalid(format!(
            "received vector has length {}, channel has {nr} outputs",
            y.len()
        )));
    }
    let n = eff.streams;
    let m = cons.size() as u64;
    let mut space = 1u64;
    for _ in 0..n {
        space = space.saturating_mul(m);
        if space > ML_SEARCH_CAP {
            return Err(invalid(format!(
                "ML search space {m}^{n} exceeds the cap of {ML_SEARCH_CAP} candidates"
            )));
        }
    }
    let cols: Vec<Vec<Complex64>> = (0..n).map(|j| eff.matrix.col(j)).collect();
    let mut idx = vec![0usize; n];
    let mut best_idx = idx.clone();
    let mut best_metric = f64::INFINITY;
    loop {
        let mut metric = 0.0;
        for r in 0..nr {
            let mut acc = y[r];
            for j in 0..n {
                acc -= cols[j][r] * cons.point(idx[j]);
            }
            metric += acc.norm_sqr();
        }
        if metric < best_metric {
            best_metric = metric;
            best_idx.copy_from_slice(&idx);
        }
        // Odometer increment; lowest stream index is the fastest digit, so
        // ties resolve toward lexicographically smallest indices.
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(best_idx);
            }
            idx[pos] += 1;
            if idx[pos] < cons.size() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Output of the orthogonal-design matched filter: one decoupled scalar
/// channel per symbol, all at the same SNR.
#[derive(Debug, Clone)]
pub struct OdDetection {
    pub soft_symbols: Vec<Complex64>,
    /// Per-symbol post-combining SNR (linear), equal across symbols.
    pub snr: f64,
}

fn frob_re(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            let p = a[(r, c)].conj() * b[(r, c)];
            acc += p.re;
        }
    }
    acc
}

/// Core matched filter over a real-expanded block basis: `blocks` holds, per
/// symbol, the channel responses to a unit real part and a unit imaginary
/// part. The basis must be orthogonal under the real Frobenius inner product
/// with equal norms `c`; estimates are the normalized correlations and each
/// symbol sees SNR `c / noise_var`.
pub(crate) fn matched_filter_blocks(
    blocks: &[CMat],
    y_block: &CMat,
    noise_var: f64,
) -> Result<OdDetection> {
    debug_assert!(blocks.len() % 2 == 0);
    let c = blocks.iter().map(|b| frob_re(b, b)).sum::<f64>() / blocks.len() as f64;
    if !(c > 0.0) || !c.is_finite() {
        return Err(numerical(format!("degenerate matched-filter gain {c}")));
    }
    for a in 0..blocks.len() {
        for b in 0..blocks.len() {
            let want = if a == b { c } else { 0.0 };
            let got = frob_re(&blocks[a], &blocks[b]);
            if (got - want).abs() > 1e-10 * c {
                return Err(invalid(format!(
                    "code responses are not orthogonal: correlation of components \
                     {a} and {b} is {got:.3e}, expected {want:.3e}"
                )));
            }
        }
    }
    let soft = blocks
        .chunks(2)
        .map(|pair| Complex64::new(frob_re(&pair[0], y_block) / c, frob_re(&pair[1], y_block) / c))
        .collect();
    Ok(OdDetection { soft_symbols: soft, snr: c / noise_var })
}

/// Matched-filter reception of one orthogonal-design block. The received
/// block is `nr x block_len`; the design's row orthogonality guarantees the
/// real-expanded basis is orthogonal for every channel, so each symbol comes
/// out as an independent scalar channel with SNR
/// `(block_len / num_symbols) * ||H_eff||_F^2 / noise_var`.
pub fn matched_filter_od(
    eff: &EffectiveChannel,
    od: OrthogonalDesign,
    y_block: &CMat,
) -> Result<OdDetection> {
    check_effective(eff)?;
    if od.streams() != eff.streams {
        return Err(invalid(format!(
            "orthogonal design spans {} streams but the channel has {}",
            od.streams(),
            eff.streams
        )));
    }
    if y_block.rows() != eff.matrix.rows() || y_block.cols() != od.block_len() {
        return Err(invalid(format!(
            "received block is {}x{}, expected {}x{}",
            y_block.rows(),
            y_block.cols(),
            eff.matrix.rows(),
            od.block_len()
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let units = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
    let mut blocks = Vec::with_capacity(2 * od.num_symbols());
    for j in 0..od.num_symbols() {
        for unit in units {
            let mut x = vec![zero; od.num_symbols()];
            x[j] = unit;
            blocks.push(eff.matrix.mul(&od.encode(&x)?));
        }
    }
    matched_filter_blocks(&blocks, y_block, eff.noise_var)
}
