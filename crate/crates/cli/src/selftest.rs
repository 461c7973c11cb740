use beamsim_core::channel::{sample_channel, ChannelConfig};
use beamsim_core::detection::mmse_sinrs;
use beamsim_core::linalg::{hermitian_solve, orthonormal_complement, vec_dot, CMat};
use beamsim_core::schemes::{
    build_effective_channel, capacity_bf, capacity_bn, waterfill, SchemeKind, SchemeSpec,
};
use beamsim_core::sim::{
    simulate_ber, BerSystem, CodeSpec, OrthogonalDesignKind, Receiver, StoppingRule,
};
use num_complex::Complex64;
use sha2::{Digest, Sha256};

/// Runs the fast invariant suite and renders one PASS/FAIL line per
/// property plus a SHA-256 over the whole report. With `fault` set, one
/// entry of the first nulling subspace is negated before the checks, so the
/// orthogonality property must fail — a negative control for the harness
/// itself.
pub struct SelftestReport {
    pub lines: Vec<String>,
    pub all_passed: bool,
    pub sha256: String,
}

type Check = (&'static str, Box<dyn Fn() -> Result<(), String>>);

pub fn run_selftest(seed: u64, fault: bool) -> SelftestReport {
    let checks: Vec<Check> = vec![
        ("nulling-subspace-orthogonality", Box::new(move || subspace_orthogonality(seed, fault))),
        ("water-filling-kkt", Box::new(move || water_filling_kkt(seed))),
        ("mmse-sinr-oracle", Box::new(move || mmse_sinr_oracle(seed))),
        ("two-antenna-bf-bn-equivalence", Box::new(move || bf_bn_equivalence(seed))),
        ("noiseless-round-trips", Box::new(move || noiseless_round_trips(seed))),
        ("deterministic-replay", Box::new(move || deterministic_replay(seed))),
    ];

    let mut lines = Vec::new();
    let mut all_passed = true;
    for (name, check) in checks {
        match check() {
            Ok(()) => lines.push(format!("PASS {name}")),
            Err(msg) => {
                all_passed = false;
                lines.push(format!("FAIL {name}: {msg}"));
            }
        }
    }
    let mut hasher = Sha256::new();
    for line in &lines {
        hasher.update(line.as_bytes());
        hasher.update(b"\n");
    }
    let sha256 = format!("{:x}", hasher.finalize());
    SelftestReport { lines, all_passed, sha256 }
}

fn subspace_orthogonality(seed: u64, fault: bool) -> Result<(), String> {
    let cfg = ChannelConfig::new(5, 5, seed).map_err(|e| e.to_string())?;
    for trial in 0..300u64 {
        let chan = sample_channel(&cfg, trial).map_err(|e| e.to_string())?;
        for k in [1usize, 2] {
            let weak = chan.svd.v.select_cols(&((5 - k)..5).collect::<Vec<_>>());
            let mut phi = orthonormal_complement(&weak).map_err(|e| e.to_string())?;
            if fault && trial == 0 && k == 1 {
                phi[(0, 0)] = -phi[(0, 0)];
            }
            let gram_err = phi.h().mul(&phi).sub(&CMat::identity(5 - k)).max_abs();
            if gram_err > 1e-10 {
                return Err(format!("subspace Gram deviates from identity by {gram_err:.3e}"));
            }
            let leak = weak.h().mul(&phi).max_abs();
            if leak > 1e-10 {
                return Err(format!("nulled directions leak {leak:.3e}"));
            }
            let full = phi.hcat(&weak);
            let unit_err = full.h().mul(&full).sub(&CMat::identity(5)).max_abs();
            if unit_err > 1e-10 {
                return Err(format!("completed basis off unitary by {unit_err:.3e}"));
            }
        }
    }
    Ok(())
}

fn water_filling_kkt(seed: u64) -> Result<(), String> {
    for (nt, nr) in [(4usize, 4usize), (5, 5)] {
        let cfg = ChannelConfig::new(nt, nr, seed).map_err(|e| e.to_string())?;
        for trial in 0..300u64 {
            let chan = sample_channel(&cfg, trial).map_err(|e| e.to_string())?;
            let noise_var = 0.25;
            let alloc = waterfill(chan.sigma(), 1.0, noise_var).map_err(|e| e.to_string())?;
            let total: f64 = alloc.per_subchannel.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(format!("allocated power {total} != 1"));
            }
            for (&p, &s) in alloc.per_subchannel.iter().zip(chan.sigma()) {
                let inverse_gain = noise_var / (s * s);
                if p > 0.0 {
                    if (p + inverse_gain - alloc.water_level).abs() > 1e-9 {
                        return Err("active subchannel off the water level".into());
                    }
                } else if alloc.water_level > inverse_gain + 1e-9 {
                    return Err("inactive subchannel should have been filled".into());
                }
            }
        }
    }
    Ok(())
}

fn mmse_sinr_oracle(seed: u64) -> Result<(), String> {
    let cfg = ChannelConfig::new(4, 4, seed).map_err(|e| e.to_string())?;
    let spec = SchemeSpec::unit(SchemeKind::BeamNulling);
    for trial in 0..200u64 {
        let chan = sample_channel(&cfg, trial).map_err(|e| e.to_string())?;
        let noise_var = 0.2;
        let eff = build_effective_channel(&spec, &chan, noise_var).map_err(|e| e.to_string())?;
        let sinrs = mmse_sinrs(&eff).map_err(|e| e.to_string())?;
        // Independent route: gamma_i = u_i / (1 - u_i) with
        // u_i = Re h_i^H (H H^H + noise I)^(-1) h_i on the full covariance.
        let mut cov = eff.matrix.mul(&eff.matrix.h());
        for i in 0..cov.rows() {
            cov[(i, i)] += Complex64::new(noise_var, 0.0);
        }
        for (i, &gamma) in sinrs.iter().enumerate() {
            let h_i = eff.matrix.col(i);
            let solved = hermitian_solve(&cov, &h_i).map_err(|e| e.to_string())?;
            let u = vec_dot(&h_i, &solved).re;
            let alt = u / (1.0 - u);
            if (gamma - alt).abs() > 1e-9 * alt.max(1.0) {
                return Err(format!("stream {i} trial {trial}: SINR {gamma} vs oracle {alt}"));
            }
        }
    }
    Ok(())
}

fn bf_bn_equivalence(seed: u64) -> Result<(), String> {
    let cfg = ChannelConfig::new(2, 2, seed).map_err(|e| e.to_string())?;
    for trial in 0..500u64 {
        let chan = sample_channel(&cfg, trial).map_err(|e| e.to_string())?;
        for rho in [0.5, 4.0, 50.0] {
            let bf = capacity_bf(chan.sigma(), rho).map_err(|e| e.to_string())?;
            let bn = capacity_bn(chan.sigma(), rho).map_err(|e| e.to_string())?;
            if (bf - bn).abs() > 1e-9 {
                return Err(format!("trial {trial} rho {rho}: single-beam {bf} vs nulling {bn}"));
            }
        }
    }
    Ok(())
}

fn noiseless_round_trips(seed: u64) -> Result<(), String> {
    let cases: Vec<(SchemeKind, CodeSpec, Receiver, u32, usize)> = vec![
        (SchemeKind::Beamforming, CodeSpec::None, Receiver::Mmse, 3, 4),
        (SchemeKind::BeamNulling, CodeSpec::None, Receiver::Ml, 6, 4),
        (SchemeKind::BeamNulling, CodeSpec::Ldc, Receiver::Mmse, 6, 4),
        (
            SchemeKind::MdBeamforming { k: 2 },
            CodeSpec::Od(OrthogonalDesignKind::Alamouti2),
            Receiver::MatchedFilter,
            6,
            5,
        ),
        (
            SchemeKind::MdBeamNulling { k: 2 },
            CodeSpec::Od(OrthogonalDesignKind::Rate34_3),
            Receiver::MatchedFilter,
            6,
            5,
        ),
    ];
    let stopping = StoppingRule { min_errors: 1, max_bits: 2000 };
    for (kind, code, receiver, rate, nt) in cases {
        let cfg = ChannelConfig::new(nt, nt, seed).map_err(|e| e.to_string())?;
        let system = BerSystem::for_rate(SchemeSpec::unit(kind), code, receiver, rate, nt)
            .map_err(|e| e.to_string())?;
        let curve = simulate_ber(&system, &cfg, &[90.0], &stopping).map_err(|e| e.to_string())?;
        if curve.error_counts[0] != 0 {
            return Err(format!(
                "{} flipped {} bits without noise",
                system.label(),
                curve.error_counts[0]
            ));
        }
    }
    Ok(())
}

fn deterministic_replay(seed: u64) -> Result<(), String> {
    let cfg = ChannelConfig::new(4, 4, seed).map_err(|e| e.to_string())?;
    let system = BerSystem::for_rate(
        SchemeSpec::unit(SchemeKind::BeamNulling),
        CodeSpec::None,
        Receiver::Mmse,
        6,
        4,
    )
    .map_err(|e| e.to_string())?;
    let stopping = StoppingRule { min_errors: 50, max_bits: 200_000 };
    let grid = [6.0, 9.0];
    let a = simulate_ber(&system, &cfg, &grid, &stopping).map_err(|e| e.to_string())?;
    let b = simulate_ber(&system, &cfg, &grid, &stopping).map_err(|e| e.to_string())?;
    let ja = serde_json::to_string(&a).map_err(|e| e.to_string())?;
    let jb = serde_json::to_string(&b).map_err(|e| e.to_string())?;
    if ja != jb {
        return Err("re-running the same configuration changed the curve".into());
    }
    Ok(())
}
