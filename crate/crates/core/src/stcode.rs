//! Space-time block codes over the effective channel inputs.
//!
//! Two families are provided. Linear dispersion codes spread `L` complex
//! symbols over a `streams x block_len` transmit block `S = sum_i s_i M_i`;
//! the receiver sees the stacked linear model `vec(Y) = G s + z`, so any
//! linear or ML detector for flat channels applies to the lifted system.
//! Orthogonal designs (Alamouti and the rate-3/4 three- and four-stream
//! designs) trade rate for a decoupled matched-filter receiver: their rows
//! stay orthogonal for every symbol draw, which collapses detection to
//! independent scalar channels.
//!
//! Power convention: with unit-energy symbols every encoder emits blocks
//! with `E ||S||_F^2 = streams * block_len`, i.e. unit average power per
//! stream per use, matching the uncoded transmitter.

use num_complex::Complex64;

use crate::linalg::CMat;
use crate::schemes::EffectiveChannel;
use crate::{invalid, Result};

/// A linear dispersion code: `L = streams * block_len` dispersion matrices,
/// each `streams x block_len`.
#[derive(Debug, Clone)]
pub struct LinearDispersionCode {
    pub streams: usize,
    pub block_len: usize,
    matrices: Vec<CMat>,
}

impl LinearDispersionCode {
    /// Builds the cyclic phase/shift family for square blocks
    /// (`block_len == streams`): with `D = diag(1, w, ..., w^{n-1})`,
    /// `w = exp(2 pi i / n)`, and `P` the cyclic shift, the matrices are
    /// `D^a P^b / sqrt(n)` in `a`-major order. All are unitary up to the
    /// scale, so the power constraint holds exactly and the symbol-to-block
    /// map is invertible.
    pub fn cyclic(streams: usize, block_len: usize) -> Result<Self> {
        if streams == 0 {
            return Err(invalid("dispersion code needs at least one stream"));
        }
        if block_len != streams {
            return Err(invalid(format!(
                "cyclic dispersion family is defined for square blocks \
                 (streams {streams}, block length {block_len})"
            )));
        }
        let n = streams;
        let scale = 1.0 / (n as f64).sqrt();
        let omega = 2.0 * std::f64::consts::PI / n as f64;
        let mut matrices = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                // (D^a P^b)[r, c] = w^{a r} * [c == (r + b) mod n]
                let m = CMat::from_fn(n, n, |r, c| {
                    if c == (r + b) % n {
                        let phase = omega * (a * r) as f64;
                        Complex64::new(phase.cos(), phase.sin()) * scale
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                matrices.push(m);
            }
        }
        Self::from_matrices(streams, block_len, matrices)
    }

    /// Wraps caller-supplied dispersion matrices, enforcing the dimension
    /// and total power constraints.
    pub fn from_matrices(streams: usize, block_len: usize, matrices: Vec<CMat>) -> Result<Self> {
        if streams == 0 || block_len == 0 {
            return Err(invalid("dispersion code dimensions must be positive"));
        }
        let l = streams * block_len;
        if matrices.len() != l {
            return Err(invalid(format!(
                "expected {l} dispersion matrices for a {streams}x{block_len} block, got {}",
                matrices.len()
            )));
        }
        let mut power = 0.0;
        for (i, m) in matrices.iter().enumerate() {
            if m.rows() != streams || m.cols() != block_len {
                return Err(invalid(format!(
                    "dispersion matrix {i} is {}x{}, expected {streams}x{block_len}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(invalid(format!("dispersion matrix {i} has non-finite entries")));
            }
            power += m.fro_norm().powi(2);
        }
        let target = l as f64;
        if (power - target).abs() > 1e-9 * target.max(1.0) {
            return Err(invalid(format!(
                "dispersion matrices carry total power {power:.12}, expected {target} \
                 (unit average power per stream per use)"
            )));
        }
        Ok(LinearDispersionCode { streams, block_len, matrices })
    }

    pub fn num_symbols(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, i: usize) -> &CMat {
        &self.matrices[i]
    }

    /// `S = sum_i s_i M_i`; expects exactly `num_symbols` symbols.
    pub fn encode(&self, symbols: &[Complex64]) -> Result<CMat> {
        if symbols.len() != self.matrices.len() {
            return Err(invalid(format!(
                "dispersion encoder needs {} symbols, got {}",
                self.matrices.len(),
                symbols.len()
            )));
        }
        let mut s = CMat::zeros(self.streams, self.block_len);
        for (sym, m) in symbols.iter().zip(&self.matrices) {
            for r in 0..self.streams {
                for c in 0..self.block_len {
                    s[(r, c)] += sym * m[(r, c)];
                }
            }
        }
        Ok(s)
    }

    /// JSON description of the code (dimensions plus matrices as row-major
    /// `[re, im]` pairs), for exporting a configuration alongside results.
    pub fn to_json(&self) -> serde_json::Value {
        let mats: Vec<serde_json::Value> = self
            .matrices
            .iter()
            .map(|m| {
                let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
                    .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                    .collect();
                serde_json::json!(rows)
            })
            .collect();
        serde_json::json!({
            "streams": self.streams,
            "block_len": self.block_len,
            "matrices": mats,
        })
    }
}

/// Stacks `Y = Heff * S` column by column: `vec(Y)[t * nr + r] = Y[r, t]`.
fn vec_block(y: &CMat) -> Vec<Complex64> {
    let (nr, t) = (y.rows(), y.cols());
    let mut v = Vec::with_capacity(nr * t);
    for col in 0..t {
        for row in 0..nr {
            v.push(y[(row, col)]);
        }
    }
    v
}

/// Lifts an effective channel through a dispersion code: the returned
/// channel has matrix `G` with column `i = vec(Heff * M_i)`, acting on the
/// symbol vector, with the same per-entry noise variance.
pub fn lifted_channel(
    eff: &EffectiveChannel,
    code: &LinearDispersionCode,
) -> Result<EffectiveChannel> {
    if eff.streams != code.streams {
        return Err(invalid(format!(
            "dispersion code spans {} streams but the channel has {}",
            code.streams, eff.streams
        )));
    }
    let nr = eff.matrix.rows();
    let t = code.block_len;
    let l = code.num_symbols();
    let mut g = CMat::zeros(nr * t, l);
    for (i, m) in code.matrices.iter().enumerate() {
        let col = vec_block(&eff.matrix.mul(m));
        g.set_col(i, &col);
    }
    Ok(EffectiveChannel { matrix: g, streams: l, noise_var: eff.noise_var })
}

/// Stacks a received `nr x block_len` block into the vector the lifted
/// channel acts on.
pub fn stack_received(y: &CMat) -> Vec<Complex64> {
    vec_block(y)
}

/// Complex orthogonal designs with decoupled matched-filter reception.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthogonalDesign {
    /// Two streams, two uses, two symbols (rate 1).
    Alamouti2,
    /// Three streams, four uses, three symbols (rate 3/4).
    Rate34_3,
    /// Four streams, four uses, three symbols (rate 3/4).
    Rate34_4,
}

impl OrthogonalDesign {
    pub fn for_streams(streams: usize) -> Result<Self> {
        match streams {
            2 => Ok(OrthogonalDesign::Alamouti2),
            3 => Ok(OrthogonalDesign::Rate34_3),
            4 => Ok(OrthogonalDesign::Rate34_4),
            other => Err(invalid(format!(
                "no orthogonal design for {other} streams (supported: 2, 3, 4)"
            ))),
        }
    }

    pub fn streams(&self) -> usize {
        match self {
            OrthogonalDesign::Alamouti2 => 2,
            OrthogonalDesign::Rate34_3 => 3,
            OrthogonalDesign::Rate34_4 => 4,
        }
    }

    pub fn block_len(&self) -> usize {
        match self {
            OrthogonalDesign::Alamouti2 => 2,
            OrthogonalDesign::Rate34_3 | OrthogonalDesign::Rate34_4 => 4,
        }
    }

    pub fn num_symbols(&self) -> usize {
        match self {
            OrthogonalDesign::Alamouti2 => 2,
            OrthogonalDesign::Rate34_3 | OrthogonalDesign::Rate34_4 => 3,
        }
    }

    /// Symbols per channel use.
    pub fn rate(&self) -> f64 {
        self.num_symbols() as f64 / self.block_len() as f64
    }

    pub fn label(&self) -> &'static str {
        match self {
            OrthogonalDesign::Alamouti2 => "alamouti",
            OrthogonalDesign::Rate34_3 => "od34x3",
            OrthogonalDesign::Rate34_4 => "od34x4",
        }
    }

    /// Encodes `num_symbols` symbols into a `streams x block_len` block.
    /// Entries are scaled by `sqrt(block_len / num_symbols)` so unit-energy
    /// symbols give `E ||S||_F^2 = streams * block_len`.
    pub fn encode(&self, x: &[Complex64]) -> Result<CMat> {
        if x.len() != self.num_symbols() {
            return Err(invalid(format!(
                "orthogonal design needs {} symbols, got {}",
                self.num_symbols(),
                x.len()
            )));
        }
        let scale = (self.block_len() as f64 / self.num_symbols() as f64).sqrt();
        let z = Complex64::new(0.0, 0.0);
        let rows: Vec<Vec<Complex64>> = match self {
            OrthogonalDesign::Alamouti2 => vec![vec![x[0], -x[1].conj()], vec![x[1], x[0].conj()]],
            OrthogonalDesign::Rate34_3 => vec![
                vec![x[0], -x[1].conj(), -x[2].conj(), z],
                vec![x[1], x[0].conj(), z, -x[2].conj()],
                vec![x[2], z, x[0].conj(), x[1].conj()],
            ],
            OrthogonalDesign::Rate34_4 => vec![
                vec![x[0], -x[1].conj(), -x[2].conj(), z],
                vec![x[1], x[0].conj(), z, -x[2].conj()],
                vec![x[2], z, x[0].conj(), x[1].conj()],
                vec![z, x[2], -x[1], x[0]],
            ],
        };
        let mut s = CMat::from_rows(&rows)?;
        for r in 0..s.rows() {
            for c in 0..s.cols() {
                s[(r, c)] *= scale;
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel, ChannelConfig};
    use crate::linalg::{svd, vec_dot};
    use crate::schemes::{build_effective_channel, SchemeKind, SchemeSpec};
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_symbols(rng: &mut StdRng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| {
                Complex64::new(
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng),
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng),
                )
            })
            .collect()
    }

    #[test]
    fn cyclic_family_power_and_count() {
        for n in 1..=5usize {
            let code = LinearDispersionCode::cyclic(n, n).unwrap();
            assert_eq!(code.num_symbols(), n * n);
            let power: f64 =
                (0..code.num_symbols()).map(|i| code.matrix(i).fro_norm().powi(2)).sum();
            assert!(((power - (n * n) as f64).abs()) <= 1e-12);
            // Each matrix is unitary up to 1/sqrt(n): M M^H = I/n.
            for i in 0..code.num_symbols() {
                let m = code.matrix(i);
                let gram = m.mul(&m.h());
                for r in 0..n {
                    for c in 0..n {
                        let want = if r == c { 1.0 / n as f64 } else { 0.0 };
                        assert!((gram[(r, c)] - want).norm() <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cyclic_symbol_map_is_invertible() {
        // The stacked map s -> vec(S) is square; its smallest singular value
        // must be bounded away from zero.
        for n in 2..=4usize {
            let code = LinearDispersionCode::cyclic(n, n).unwrap();
            let eye = EffectiveChannel { matrix: CMat::identity(n), streams: n, noise_var: 1.0 };
            let lifted = lifted_channel(&eye, &code).unwrap();
            let s = svd(&lifted.matrix).unwrap();
            let min_sigma = *s.sigma.last().unwrap();
            assert!(min_sigma > 1e-8, "n={n}: min sigma {min_sigma}");
        }
    }

    #[test]
    fn from_matrices_validates() {
        // Wrong count.
        let mats = vec![CMat::identity(2); 3];
        assert!(LinearDispersionCode::from_matrices(2, 2, mats).is_err());
        // Wrong power (identities carry 2.0 each, total 8 != 4).
        let mats = vec![CMat::identity(2); 4];
        assert!(LinearDispersionCode::from_matrices(2, 2, mats).is_err());
        // Wrong shape.
        let mats = vec![CMat::zeros(3, 2); 4];
        assert!(LinearDispersionCode::from_matrices(2, 2, mats).is_err());
    }

    #[test]
    fn unit_column_code_reduces_to_plain_channel() {
        // With block_len 1 and M_i = e_i, the lifted channel is the channel.
        let nt = 3;
        let mats: Vec<CMat> = (0..nt)
            .map(|i| {
                CMat::from_fn(nt, 1, |r, _| {
                    if r == i {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        let code = LinearDispersionCode::from_matrices(nt, 1, mats).unwrap();
        let cfg = ChannelConfig::new(nt, nt, 7).unwrap();
        let chan = sample_channel(&cfg, 0).unwrap();
        let spec = SchemeSpec::unit(SchemeKind::EqualPower);
        let eff = build_effective_channel(&spec, &chan, 0.1).unwrap();
        let lifted = lifted_channel(&eff, &code).unwrap();
        assert_eq!(lifted.matrix.rows(), eff.matrix.rows());
        assert_eq!(lifted.matrix.cols(), eff.matrix.cols());
        assert!(lifted.matrix.sub(&eff.matrix).max_abs() <= 1e-15);
        assert_eq!(lifted.noise_var, eff.noise_var);
    }

    #[test]
    fn lifted_channel_matches_block_encoding() {
        // vec(Heff * encode(s)) must equal G * s for random draws.
        let mut rng = StdRng::seed_from_u64(21);
        let cfg = ChannelConfig::new(3, 4, 99).unwrap();
        let spec = SchemeSpec::unit(SchemeKind::EqualPower);
        for trial in 0..20 {
            let chan = sample_channel(&cfg, trial).unwrap();
            let eff = build_effective_channel(&spec, &chan, 0.05).unwrap();
            let code = LinearDispersionCode::cyclic(3, 3).unwrap();
            let lifted = lifted_channel(&eff, &code).unwrap();
            let s = random_symbols(&mut rng, code.num_symbols());
            let direct = stack_received(&eff.matrix.mul(&code.encode(&s).unwrap()));
            let via_g = lifted.matrix.mul_vec(&s);
            let scale = direct.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
            for (a, b) in direct.iter().zip(&via_g) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn orthogonal_design_row_gram_is_scaled_identity() {
        let mut rng = StdRng::seed_from_u64(5);
        for od in
            [OrthogonalDesign::Alamouti2, OrthogonalDesign::Rate34_3, OrthogonalDesign::Rate34_4]
        {
            for _ in 0..100 {
                let x = random_symbols(&mut rng, od.num_symbols());
                let s = od.encode(&x).unwrap();
                let energy: f64 = x.iter().map(|z| z.norm_sqr()).sum();
                let want = energy * od.block_len() as f64 / od.num_symbols() as f64;
                let gram = s.mul(&s.h());
                for r in 0..od.streams() {
                    for c in 0..od.streams() {
                        let target = if r == c { want } else { 0.0 };
                        assert!(
                            (gram[(r, c)] - target).norm() <= 1e-12 * want.max(1.0),
                            "{:?} gram[{r},{c}]",
                            od
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonal_design_unit_symbols_hit_power_budget() {
        // PSK symbols have |x| = 1, so the block power is deterministic and
        // must equal streams * block_len exactly.
        let mut rng = StdRng::seed_from_u64(6);
        for od in
            [OrthogonalDesign::Alamouti2, OrthogonalDesign::Rate34_3, OrthogonalDesign::Rate34_4]
        {
            for _ in 0..20 {
                let x: Vec<Complex64> = (0..od.num_symbols())
                    .map(|_| {
                        let t: f64 = <StandardNormal as Distribution<f64>>::sample(
                            &StandardNormal,
                            &mut rng,
                        );
                        Complex64::new(t.cos(), t.sin())
                    })
                    .collect();
                let s = od.encode(&x).unwrap();
                let p = s.fro_norm().powi(2);
                let want = (od.streams() * od.block_len()) as f64;
                assert!((p - want).abs() <= 1e-12 * want);
            }
        }
    }

    #[test]
    fn rates_and_shapes() {
        assert_eq!(OrthogonalDesign::Alamouti2.rate(), 1.0);
        assert_eq!(OrthogonalDesign::Rate34_3.rate(), 0.75);
        assert_eq!(OrthogonalDesign::Rate34_4.rate(), 0.75);
        assert_eq!(OrthogonalDesign::for_streams(2).unwrap(), OrthogonalDesign::Alamouti2);
        assert!(OrthogonalDesign::for_streams(5).is_err());
        let s = OrthogonalDesign::Rate34_4.encode(&[Complex64::new(1.0, 0.0); 3]).unwrap();
        assert_eq!((s.rows(), s.cols()), (4, 4));
    }

    #[test]
    fn alamouti_real_expanded_blocks_are_orthogonal() {
        // The matched-filter basis blocks H*encode(e_j) and H*encode(i e_j)
        // are orthogonal under the real Frobenius inner product with equal
        // norms, for any channel — including a single receive antenna.
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut rng = StdRng::seed_from_u64(31);
        for (nt, nr) in [(2usize, 1usize), (2, 2), (2, 4)] {
            for trial in 0..25 {
                let h = CMat::from_fn(nr, nt, |_, _| {
                    Complex64::new(
                        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng),
                        <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng),
                    )
                });
                let od = OrthogonalDesign::Alamouti2;
                let mut blocks = Vec::new();
                for j in 0..od.num_symbols() {
                    for unit in [one, i] {
                        let mut x = vec![zero; od.num_symbols()];
                        x[j] = unit;
                        blocks.push(h.mul(&od.encode(&x).unwrap()));
                    }
                }
                let c = h.fro_norm().powi(2) * od.block_len() as f64 / od.num_symbols() as f64;
                for a in 0..blocks.len() {
                    for b in 0..blocks.len() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for r in 0..nr {
                            for t in 0..od.block_len() {
                                acc += blocks[a][(r, t)].conj() * blocks[b][(r, t)];
                            }
                        }
                        let want = if a == b { c } else { 0.0 };
                        assert!(
                            (acc.re - want).abs() <= 1e-10 * c.max(1.0),
                            "({nt},{nr}) trial {trial}: block {a},{b} re {} vs {want}",
                            acc.re
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn encode_rejects_wrong_symbol_count() {
        let od = OrthogonalDesign::Rate34_3;
        assert!(od.encode(&[Complex64::new(1.0, 0.0); 2]).is_err());
        let code = LinearDispersionCode::cyclic(2, 2).unwrap();
        assert!(code.encode(&[Complex64::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn json_export_shape() {
        let code = LinearDispersionCode::cyclic(2, 2).unwrap();
        let j = code.to_json();
        assert_eq!(j["streams"], 2);
        assert_eq!(j["block_len"], 2);
        assert_eq!(j["matrices"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn vec_dot_convention_matches_block_stacking() {
        // Sanity anchor for the stacking order used throughout: entry
        // (row r, time t) lands at index t*nr + r.
        let y = CMat::from_rows(&[
            vec![Complex64::new(1.0, 0.0), Complex64::new(3.0, 0.0)],
            vec![Complex64::new(2.0, 0.0), Complex64::new(4.0, 0.0)],
        ])
        .unwrap();
        let v = stack_received(&y);
        let expect = [1.0, 2.0, 3.0, 4.0];
        for (z, e) in v.iter().zip(expect) {
            assert_eq!(z.re, e);
        }
        // vec_dot conjugates its first argument.
        let a = vec![Complex64::new(0.0, 1.0)];
        let b = vec![Complex64::new(0.0, 1.0)];
        assert!((vec_dot(&a, &b) - Complex64::new(1.0, 0.0)).norm() <= 1e-15);
    }
}
