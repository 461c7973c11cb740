//! Acceptance suite. Each test evaluates one exit criterion end to end and
//! prints a `acceptance <id> PASS|FAIL <detail>` line before asserting, so
//! a full run (`cargo test --test acceptance -- --nocapture`) reads as a
//! checklist. Tolerances are pinned in the assertions.

use std::time::{Duration, Instant};

use beamsim_core::channel::{sample_channel, snr_grid_db, ChannelConfig};
use beamsim_core::detection::mmse_sinrs;
use beamsim_core::linalg::{hermitian_solve, orthonormal_complement, vec_dot, CMat};
use beamsim_core::schemes::{
    build_effective_channel, capacity_bf, capacity_bn, instantaneous_capacity_bits, waterfill,
    SchemeKind, SchemeSpec,
};
use beamsim_core::sim::{
    analytic_ber_curve, detect_crossover, estimate_capacity_set, simulate_ber, BerCurve, BerSystem,
    CapacityCurve, CodeSpec, OrthogonalDesignKind, Receiver, StoppingRule,
};
use beamsim_core::stcode::LinearDispersionCode;
use num_complex::Complex64;

use beamsim_cli::presets::{all_presets, find_preset, FigurePreset};

const MASTER_SEED: u64 = 1;

fn verdict(id: &str, pass: bool, detail: &str) {
    println!("acceptance {id} {} {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id}: {detail}");
}

fn unit_specs(kinds: &[SchemeKind]) -> Vec<SchemeSpec> {
    kinds.iter().copied().map(SchemeSpec::unit).collect()
}

fn capacity_curves(
    nt: usize,
    nr: usize,
    kinds: &[SchemeKind],
    from_db: f64,
    to_db: f64,
    step_db: f64,
    trials: u64,
) -> (Vec<f64>, Vec<CapacityCurve>) {
    let cfg = ChannelConfig::new(nt, nr, MASTER_SEED).unwrap();
    let grid = snr_grid_db(from_db, to_db, step_db).unwrap();
    let curves = estimate_capacity_set(&unit_specs(kinds), &cfg, &grid, trials).unwrap();
    (grid, curves)
}

/// The single crossing of two mean curves, requiring exactly one.
fn single_crossover(grid: &[f64], a: &CapacityCurve, b: &CapacityCurve) -> Option<f64> {
    let list = detect_crossover(grid, &a.mean_bits, &b.mean_bits, &a.stderr, &b.stderr).unwrap();
    match list.as_slice() {
        [only] => Some(only.rho_db),
        _ => None,
    }
}

// -------------------------------------------------------------------------
// 1. 5x5 adaptation regions: closest-to-water-filling pattern and the two
//    region boundaries among equal power, beamforming, beam-nulling.

#[test]
fn criterion_01_five_antenna_adaptation_regions() {
    let t0 = Instant::now();
    use SchemeKind::{BeamNulling, Beamforming, EqualPower, WaterFilling};
    let (grid, curves) = capacity_curves(
        5,
        5,
        &[EqualPower, WaterFilling, Beamforming, BeamNulling],
        -8.0,
        20.0,
        0.5,
        20_000,
    );
    let (eq, wf, bf, bn) = (&curves[0], &curves[1], &curves[2], &curves[3]);

    let bf_bn = single_crossover(&grid, bf, bn);
    let bn_eq = single_crossover(&grid, bn, eq);
    let (Some(x1), Some(x2)) = (bf_bn, bn_eq) else {
        verdict("01", false, "expected exactly one bf/bn and one bn/eq capacity crossing");
        return;
    };

    // Closest scheme to water-filling, skipping a guard band around each
    // boundary where the two contenders are statistically tied.
    let mut pattern_ok = true;
    let mut pattern_note = String::from("closest-to-wf pattern holds");
    for i in 0..grid.len() {
        let db = grid[i];
        let dist = |c: &CapacityCurve| (c.mean_bits[i] - wf.mean_bits[i]).abs();
        let (d_eq, d_bf, d_bn) = (dist(eq), dist(bf), dist(bn));
        let expected = if db < x1 - 0.75 {
            "bf"
        } else if db > x1 + 0.75 && db < x2 - 0.75 {
            "bn"
        } else {
            continue;
        };
        let closest = if d_bf <= d_bn && d_bf <= d_eq {
            "bf"
        } else if d_bn <= d_eq {
            "bn"
        } else {
            "eq"
        };
        if closest != expected {
            pattern_ok = false;
            pattern_note =
                format!("at {db} dB the closest scheme to wf is {closest}, expected {expected}");
            break;
        }
    }

    let elapsed = t0.elapsed();
    let x1_ok = (x1 - 3.5).abs() <= 1.0;
    let x2_ok = (x2 - 16.0).abs() <= 1.5;
    let time_ok = elapsed < Duration::from_secs(120);
    verdict(
        "01",
        x1_ok && x2_ok && pattern_ok && time_ok,
        &format!(
            "bf/bn boundary {x1:.2} dB (target 3.5±1.0: {}), bn/eq boundary {x2:.2} dB \
             (target 16.0±1.5: {}), {pattern_note}, elapsed {elapsed:.1?}",
            if x1_ok { "ok" } else { "off" },
            if x2_ok { "ok" } else { "off" },
        ),
    );
}

// -------------------------------------------------------------------------
// 2. Two transmit antennas: single-beam and nulling capacities coincide
//    per realization.

#[test]
fn criterion_02_two_antenna_equivalence() {
    let cfg = ChannelConfig::new(2, 2, MASTER_SEED).unwrap();
    let mut max_dev: f64 = 0.0;
    for trial in 0..10_000u64 {
        let chan = sample_channel(&cfg, trial).unwrap();
        for rho in [1.0, 10.0, 100.0] {
            let bf = capacity_bf(chan.sigma(), rho).unwrap();
            let bn = capacity_bn(chan.sigma(), rho).unwrap();
            max_dev = max_dev.max((bf - bn).abs());
        }
    }
    verdict(
        "02",
        max_dev <= 1e-9,
        &format!("max |C_bf - C_bn| = {max_dev:.3e} bits over 10000 draws (limit 1e-9)"),
    );
}

// -------------------------------------------------------------------------
// 3. Multi-eigenvector adaptation regions over 5x5: the order of the
//    best-capacity scheme and the four region boundaries.

#[test]
fn criterion_03_multi_eigenvector_adaptation_regions() {
    use SchemeKind::{BeamNulling, Beamforming, EqualPower};
    let kinds = [
        Beamforming,
        SchemeKind::MdBeamforming { k: 2 },
        SchemeKind::MdBeamNulling { k: 2 },
        BeamNulling,
        EqualPower,
    ];
    let (grid, curves) = capacity_curves(5, 5, &kinds, -12.0, 28.0, 0.5, 20_000);

    let argmax = |i: usize| {
        (0..curves.len())
            .max_by(|&a, &b| curves[a].mean_bits[i].partial_cmp(&curves[b].mean_bits[i]).unwrap())
            .unwrap()
    };
    let mut owners: Vec<usize> = Vec::new();
    let mut switches: Vec<(usize, usize, f64)> = Vec::new();
    for i in 0..grid.len() {
        let best = argmax(i);
        if owners.last() != Some(&best) {
            if let Some(&prev) = owners.last() {
                switches.push((prev, best, grid[i] - 0.25));
            }
            owners.push(best);
        }
    }
    let order_ok = owners == vec![0, 1, 2, 3, 4];

    // Refine each boundary with the pairwise crossing nearest the switch.
    let targets = [0.0, 5.5, 12.7, 23.0];
    let mut boundary_notes = Vec::new();
    let mut boundaries_ok = order_ok;
    if order_ok {
        for (s, &target) in switches.iter().zip(&targets) {
            let (a, b, near) = *s;
            let list = detect_crossover(
                &grid,
                &curves[a].mean_bits,
                &curves[b].mean_bits,
                &curves[a].stderr,
                &curves[b].stderr,
            )
            .unwrap();
            let refined = list
                .iter()
                .map(|c| c.rho_db)
                .min_by(|x, y| (x - near).abs().partial_cmp(&(y - near).abs()).unwrap())
                .unwrap_or(near);
            let ok = (refined - target).abs() <= 1.0;
            boundaries_ok &= ok;
            boundary_notes.push(format!(
                "{}/{} {refined:.2} dB (target {target}±1.0: {})",
                curves[a].scheme,
                curves[b].scheme,
                if ok { "ok" } else { "off" }
            ));
        }
    } else {
        let seq: Vec<&str> = owners.iter().map(|&i| curves[i].scheme.as_str()).collect();
        boundary_notes.push(format!("best-scheme order {}", seq.join(" -> ")));
    }
    verdict(
        "03",
        boundaries_ok,
        &format!(
            "best-scheme order {}: {}",
            if order_ok { "ok" } else { "wrong" },
            boundary_notes.join(", ")
        ),
    );
}

// -------------------------------------------------------------------------
// 4. One- vs two-eigenvector beam-nulling capacity crossover over 5x5.

#[test]
fn criterion_04_two_eigenvector_nulling_boundary() {
    use SchemeKind::BeamNulling;
    let kinds = [BeamNulling, SchemeKind::MdBeamNulling { k: 2 }];
    let (grid, curves) = capacity_curves(5, 5, &kinds, -8.0, 25.0, 0.5, 20_000);
    let crossing = single_crossover(&grid, &curves[0], &curves[1]);
    match crossing {
        Some(x) => verdict(
            "04",
            (x - 13.0).abs() <= 1.0,
            &format!("bn/md-bn2 crossover {x:.2} dB (target 13.0±1.0)"),
        ),
        None => verdict("04", false, "expected exactly one bn/md-bn2 capacity crossing"),
    }
}

// -------------------------------------------------------------------------
// 5. Simulated vs analytic BER agreement for the two nulling systems.

struct PresetRun {
    nt: usize,
    nr: usize,
    systems: Vec<BerSystem>,
    grid: Vec<f64>,
    stopping: StoppingRule,
    analytic_trials: Option<u64>,
}

fn preset_ber_systems(preset: &FigurePreset) -> PresetRun {
    let FigurePreset::Ber { nt, nr, rate, systems, grid, stopping, analytic_trials, .. } = preset
    else {
        panic!("expected a BER preset");
    };
    let built: Vec<BerSystem> = systems
        .iter()
        .map(|(p, r)| {
            BerSystem::for_rate(SchemeSpec::unit(p.scheme), p.code, *r, *rate, *nt).unwrap()
        })
        .collect();
    PresetRun {
        nt: *nt,
        nr: *nr,
        systems: built,
        grid: grid.points().unwrap(),
        stopping: *stopping,
        analytic_trials: *analytic_trials,
    }
}

fn simulated_vs_analytic(name: &str) -> (bool, String) {
    let t0 = Instant::now();
    let preset = find_preset(name).unwrap();
    let PresetRun { nt, nr, systems, grid, stopping, analytic_trials } =
        preset_ber_systems(&preset);
    let system = &systems[0];
    let cfg = ChannelConfig::new(nt, nr, MASTER_SEED).unwrap();
    let sim = simulate_ber(system, &cfg, &grid, &stopping).unwrap();
    let ana = analytic_ber_curve(
        &system.scheme,
        &cfg,
        &system.constellation,
        &grid,
        analytic_trials.unwrap(),
    )
    .unwrap();
    let elapsed = t0.elapsed();

    let mut worst_z: f64 = 0.0;
    let mut worst_db = f64::NAN;
    let mut checked = 0usize;
    for i in 0..grid.len() {
        if sim.ber[i] < 1e-3 {
            continue;
        }
        checked += 1;
        let se = (sim.stderr[i].powi(2) + ana.stderr[i].powi(2)).sqrt();
        let z = if se > 0.0 {
            (sim.ber[i] - ana.ber[i]).abs() / se
        } else if sim.ber[i] == ana.ber[i] {
            0.0
        } else {
            f64::INFINITY
        };
        if z > worst_z {
            worst_z = z;
            worst_db = grid[i];
        }
    }
    let pass = worst_z <= 2.0 && checked > 0 && elapsed < Duration::from_secs(600);
    (
        pass,
        format!(
            "{name} ({}): {checked} points at BER >= 1e-3, worst |z| = {worst_z:.2} \
             at {worst_db} dB (limit 2), elapsed {elapsed:.1?}",
            sim.system
        ),
    )
}

#[test]
fn criterion_05_analytic_matches_simulated_ber() {
    let (pass_a, note_a) = simulated_vs_analytic("fig3a");
    let (pass_b, note_b) = simulated_vs_analytic("fig3b");
    verdict("05", pass_a && pass_b, &format!("{note_a}; {note_b}"));
}

// -------------------------------------------------------------------------
// 6. Beamforming vs beam-nulling BER orderings at low and high rate.

fn run_preset_curves(name: &str) -> (Vec<f64>, Vec<BerCurve>) {
    let preset = find_preset(name).unwrap();
    let PresetRun { nt, nr, systems, grid, stopping, .. } = preset_ber_systems(&preset);
    let cfg = ChannelConfig::new(nt, nr, MASTER_SEED).unwrap();
    let curves = systems.iter().map(|s| simulate_ber(s, &cfg, &grid, &stopping).unwrap()).collect();
    (grid, curves)
}

/// z-score for `low < high`; +inf when both standard errors vanish but the
/// means still differ in the right direction.
fn separation(low: (f64, f64), high: (f64, f64)) -> f64 {
    let gap = high.0 - low.0;
    let se = (low.1.powi(2) + high.1.powi(2)).sqrt();
    if se > 0.0 {
        gap / se
    } else if gap > 0.0 {
        f64::INFINITY
    } else {
        f64::NEG_INFINITY
    }
}

fn point(curve: &BerCurve, i: usize) -> (f64, f64) {
    (curve.ber[i], curve.stderr[i])
}

#[test]
fn criterion_06_beamforming_vs_nulling_ber_orderings() {
    // Low rate: beamforming at or below both nulling receivers everywhere.
    let (grid_a, curves_a) = run_preset_curves("fig4a");
    let (bf_a, bn_ml, bn_mmse_a) = (&curves_a[0], &curves_a[1], &curves_a[2]);
    let mut low_ok = true;
    let mut low_note = String::from("low rate: bf below bn (ml and mmse) at every point");
    for i in 0..grid_a.len() {
        let z_ml = separation(point(bf_a, i), point(bn_ml, i));
        let z_mmse = separation(point(bf_a, i), point(bn_mmse_a, i));
        if z_ml < 2.0 || z_mmse < 2.0 {
            low_ok = false;
            low_note = format!(
                "low rate at {} dB: z(bf<bn_ml) = {z_ml:.2}, z(bf<bn_mmse) = {z_mmse:.2}",
                grid_a[i]
            );
            break;
        }
    }

    // High rate: nulling with MMSE wins through the mid range, beamforming
    // wins at the top, with a detected crossing in between.
    let (grid_b, curves_b) = run_preset_curves("fig4b");
    let (bf_b, bn_mmse_b) = (&curves_b[0], &curves_b[2]);
    let mut mid_ok = true;
    let mut mid_worst = f64::INFINITY;
    for i in 0..grid_b.len() {
        let db = grid_b[i];
        if !(6.0..=15.0).contains(&db) {
            continue;
        }
        let z = separation(point(bn_mmse_b, i), point(bf_b, i));
        mid_worst = mid_worst.min(z);
        mid_ok &= z >= 2.0;
    }
    let last = grid_b.len() - 1;
    let z_top = separation(point(bf_b, last), point(bn_mmse_b, last));
    let top_ok = z_top >= 2.0;
    let crossings =
        detect_crossover(&grid_b, &bf_b.ber, &bn_mmse_b.ber, &bf_b.stderr, &bn_mmse_b.stderr)
            .unwrap();
    let cross_ok = crossings.iter().any(|c| c.rho_db > 15.0 && c.rho_db < 18.0);
    let cross_note =
        crossings.iter().map(|c| format!("{:.2} dB", c.rho_db)).collect::<Vec<_>>().join(", ");

    verdict(
        "06",
        low_ok && mid_ok && top_ok && cross_ok,
        &format!(
            "{low_note}; high rate: worst z(bn_mmse<bf) on 6..15 dB = {mid_worst:.2}, \
             z(bf<bn_mmse) at {} dB = {z_top:.2}, bf/bn crossings at [{cross_note}]",
            grid_b[last]
        ),
    );
}

// -------------------------------------------------------------------------
// 7. Dispersion-coded nulling beats symbol-wise nulling under the same
//    MMSE receiver through the mid-BER range.

#[test]
fn criterion_07_dispersion_code_improves_nulling() {
    use SchemeKind::BeamNulling;
    let cfg = ChannelConfig::new(4, 4, MASTER_SEED).unwrap();
    let grid = snr_grid_db(0.0, 18.0, 3.0).unwrap();
    let stopping = StoppingRule { min_errors: 200, max_bits: 2_000_000 };
    let plain =
        BerSystem::for_rate(SchemeSpec::unit(BeamNulling), CodeSpec::None, Receiver::Mmse, 6, 4)
            .unwrap();
    let coded =
        BerSystem::for_rate(SchemeSpec::unit(BeamNulling), CodeSpec::Ldc, Receiver::Mmse, 6, 4)
            .unwrap();
    let plain_curve = simulate_ber(&plain, &cfg, &grid, &stopping).unwrap();
    let coded_curve = simulate_ber(&coded, &cfg, &grid, &stopping).unwrap();

    let band = 1e-4..=1e-2;
    let mut checked = Vec::new();
    let mut worst_z = f64::INFINITY;
    for i in 0..grid.len() {
        if !band.contains(&plain_curve.ber[i]) && !band.contains(&coded_curve.ber[i]) {
            continue;
        }
        let z = separation(point(&coded_curve, i), point(&plain_curve, i));
        worst_z = worst_z.min(z);
        checked.push(format!("{} dB z={z:.2}", grid[i]));
    }
    verdict(
        "07",
        !checked.is_empty() && worst_z >= 2.0,
        &format!(
            "coded vs plain nulling at BER in [1e-4, 1e-2]: {} (all z >= 2 required)",
            checked.join(", ")
        ),
    );
}

// -------------------------------------------------------------------------
// 8. Concatenated two-eigenvector systems: dispersion codes beat orthogonal
//    designs in the 1e-3..1e-2 band, nulling+dispersion best of the four.

#[test]
fn criterion_08_concatenated_system_ordering() {
    let (grid, curves) = run_preset_curves("fig10");
    let (bn_ldc, bn_od, bf_ldc, bf_ala) = (&curves[0], &curves[1], &curves[2], &curves[3]);
    let band = 1e-3..=1e-2;

    let mut pair_notes = Vec::new();
    let mut pairs_ok = true;
    for (label, ldc, stbc) in [("nulling", bn_ldc, bn_od), ("beamforming", bf_ldc, bf_ala)] {
        let mut any = false;
        for i in 0..grid.len() {
            if !band.contains(&ldc.ber[i]) && !band.contains(&stbc.ber[i]) {
                continue;
            }
            any = true;
            let z = separation(point(ldc, i), point(stbc, i));
            pairs_ok &= z >= 2.0;
            pair_notes.push(format!("{label} {} dB z={z:.2}", grid[i]));
        }
        pairs_ok &= any;
    }

    let mut best_notes = Vec::new();
    let mut best_ok = false;
    for i in 0..grid.len() {
        if !band.contains(&bn_ldc.ber[i]) {
            continue;
        }
        best_ok = true;
        for other in [bn_od, bf_ldc, bf_ala] {
            let z = separation(point(bn_ldc, i), point(other, i));
            if z < 2.0 {
                best_ok = false;
            }
            best_notes.push(format!("{} dB vs {} z={z:.2}", grid[i], other.system));
        }
    }

    verdict(
        "08",
        pairs_ok && best_ok,
        &format!(
            "dispersion vs orthogonal-design pairs: {}; nulling+dispersion best-of-four: {}",
            pair_notes.join(", "),
            best_notes.join(", ")
        ),
    );
}

// -------------------------------------------------------------------------
// 9. Oracle suites at 10^4 random instances each.

#[test]
fn criterion_09_oracle_suites() {
    let mut notes = Vec::new();
    let mut all_ok = true;

    // (a) MMSE SINR against the direct-inverse route.
    let mut max_sinr_dev: f64 = 0.0;
    for (nt, nr, kind, count, seed) in [
        (4usize, 4usize, SchemeKind::BeamNulling, 5_000u64, 11u64),
        (5, 5, SchemeKind::MdBeamNulling { k: 2 }, 5_000, 12),
    ] {
        let cfg = ChannelConfig::new(nt, nr, seed).unwrap();
        let spec = SchemeSpec::unit(kind);
        for trial in 0..count {
            let chan = sample_channel(&cfg, trial).unwrap();
            let noise_var = [0.02, 0.2, 2.0][(trial % 3) as usize];
            let eff = build_effective_channel(&spec, &chan, noise_var).unwrap();
            let sinrs = mmse_sinrs(&eff).unwrap();
            let mut cov = eff.matrix.mul(&eff.matrix.h());
            for i in 0..cov.rows() {
                cov[(i, i)] += Complex64::new(noise_var, 0.0);
            }
            for (i, &gamma) in sinrs.iter().enumerate() {
                let h_i = eff.matrix.col(i);
                let solved = hermitian_solve(&cov, &h_i).unwrap();
                let u = vec_dot(&h_i, &solved).re;
                let alt = u / (1.0 - u);
                max_sinr_dev = max_sinr_dev.max((gamma - alt).abs() / alt.max(1.0));
            }
        }
    }
    all_ok &= max_sinr_dev <= 1e-9;
    notes.push(format!("sinr dual-route max dev {max_sinr_dev:.2e} (limit 1e-9)"));

    // (b) + (c) water-filling KKT residuals and per-realization dominance.
    let cfg = ChannelConfig::new(5, 5, 13).unwrap();
    let others = unit_specs(&[
        SchemeKind::EqualPower,
        SchemeKind::Beamforming,
        SchemeKind::BeamNulling,
        SchemeKind::MdBeamforming { k: 2 },
        SchemeKind::MdBeamNulling { k: 2 },
    ]);
    let wf_spec = SchemeSpec::unit(SchemeKind::WaterFilling);
    let mut max_kkt: f64 = 0.0;
    let mut max_short: f64 = 0.0;
    for trial in 0..10_000u64 {
        let chan = sample_channel(&cfg, trial).unwrap();
        let rho = [0.5, 5.0, 50.0][(trial % 3) as usize];
        let noise_var = 1.0 / rho;
        let alloc = waterfill(chan.sigma(), 1.0, noise_var).unwrap();
        let total: f64 = alloc.per_subchannel.iter().sum();
        max_kkt = max_kkt.max((total - 1.0).abs());
        for (&p, &s) in alloc.per_subchannel.iter().zip(chan.sigma()) {
            let inverse_gain = noise_var / (s * s);
            if p > 0.0 {
                max_kkt = max_kkt.max((p + inverse_gain - alloc.water_level).abs());
            } else {
                max_kkt = max_kkt.max((alloc.water_level - inverse_gain).max(0.0));
            }
        }
        let wf_bits = instantaneous_capacity_bits(&wf_spec, chan.sigma(), rho).unwrap();
        for spec in &others {
            let bits = instantaneous_capacity_bits(spec, chan.sigma(), rho).unwrap();
            max_short = max_short.max(bits - wf_bits);
        }
    }
    all_ok &= max_kkt <= 1e-9;
    notes.push(format!("water-filling kkt max residual {max_kkt:.2e} (limit 1e-9)"));
    all_ok &= max_short <= 1e-9;
    notes.push(format!("water-filling dominance max shortfall {max_short:.2e} (limit 1e-9)"));

    // (d) nulling subspace orthogonality, completed-basis unitarity, and
    // dispersion/design basis unitarity.
    let cfg = ChannelConfig::new(5, 5, 14).unwrap();
    let mut max_sub: f64 = 0.0;
    for trial in 0..10_000u64 {
        let chan = sample_channel(&cfg, trial).unwrap();
        let k = 1 + (trial % 2) as usize;
        let weak = chan.svd.v.select_cols(&((5 - k)..5).collect::<Vec<_>>());
        let phi = orthonormal_complement(&weak).unwrap();
        max_sub = max_sub.max(phi.h().mul(&phi).sub(&CMat::identity(5 - k)).max_abs());
        max_sub = max_sub.max(weak.h().mul(&phi).max_abs());
        let full = phi.hcat(&weak);
        max_sub = max_sub.max(full.h().mul(&full).sub(&CMat::identity(5)).max_abs());
    }
    // Dispersion matrices are unitary up to the 1/sqrt(streams) power
    // scale, so streams * B^H B must be the identity.
    for streams in [2usize, 3, 4] {
        let code = LinearDispersionCode::cyclic(streams, streams).unwrap();
        for i in 0..code.num_symbols() {
            let b = code.matrix(i);
            let mut gram = b.h().mul(b);
            for r in 0..streams {
                for c in 0..streams {
                    gram[(r, c)] *= streams as f64;
                }
            }
            max_sub = max_sub.max(gram.sub(&CMat::identity(streams)).max_abs());
        }
    }
    all_ok &= max_sub <= 1e-10;
    notes.push(format!("subspace/basis unitarity max dev {max_sub:.2e} (limit 1e-10)"));

    // (e) noiseless end-to-end round trip for every scheme/code preset.
    let cases: Vec<(usize, SchemeKind, CodeSpec, Receiver, u32)> = vec![
        (4, SchemeKind::Beamforming, CodeSpec::None, Receiver::Mmse, 3),
        (4, SchemeKind::Beamforming, CodeSpec::None, Receiver::Ml, 6),
        (4, SchemeKind::BeamNulling, CodeSpec::None, Receiver::Mmse, 6),
        (4, SchemeKind::BeamNulling, CodeSpec::None, Receiver::Ml, 3),
        (4, SchemeKind::BeamNulling, CodeSpec::Ldc, Receiver::Mmse, 6),
        (5, SchemeKind::MdBeamforming { k: 2 }, CodeSpec::Ldc, Receiver::Mmse, 6),
        (
            5,
            SchemeKind::MdBeamforming { k: 2 },
            CodeSpec::Od(OrthogonalDesignKind::Alamouti2),
            Receiver::MatchedFilter,
            6,
        ),
        (
            5,
            SchemeKind::MdBeamNulling { k: 2 },
            CodeSpec::Od(OrthogonalDesignKind::Rate34_3),
            Receiver::MatchedFilter,
            6,
        ),
    ];
    let stopping = StoppingRule { min_errors: 1, max_bits: 4_000 };
    let mut round_trip_ok = true;
    for (nt, kind, code, receiver, rate) in cases {
        let cfg = ChannelConfig::new(nt, nt, 15).unwrap();
        let system = BerSystem::for_rate(SchemeSpec::unit(kind), code, receiver, rate, nt).unwrap();
        let curve = simulate_ber(&system, &cfg, &[90.0], &stopping).unwrap();
        if curve.error_counts[0] != 0 {
            round_trip_ok = false;
            notes.push(format!("{} flipped bits without noise", system.label()));
        }
    }
    all_ok &= round_trip_ok;
    if round_trip_ok {
        notes.push("noiseless round trips exact for all 8 system presets".into());
    }

    verdict("09", all_ok, &notes.join("; "));
}

// -------------------------------------------------------------------------
// 10. Byte-identical outputs for every preset across worker counts.

#[test]
fn criterion_10_deterministic_outputs_across_workers() {
    let bin = env!("CARGO_BIN_EXE_beamsim");
    let root = tempfile::tempdir().unwrap();
    let mut compared = 0usize;
    let mut note = String::new();
    let mut all_ok = true;

    for preset in all_presets() {
        let name = preset.name();
        let dir_a = root.path().join(format!("{name}-w1"));
        let dir_b = root.path().join(format!("{name}-w3"));
        for (dir, workers) in [(&dir_a, "1"), (&dir_b, "3")] {
            let mut cmd = std::process::Command::new(bin);
            cmd.arg("figure").arg(name).args(["--seed", "1", "--workers", workers]);
            match preset {
                FigurePreset::Capacity { .. } => {
                    cmd.args(["--trials", "400"]);
                }
                FigurePreset::Ber { .. } => {
                    cmd.args(["--min-errors", "12", "--max-bits", "30000"]);
                }
            }
            cmd.arg("--out").arg(dir);
            let out = cmd.output().unwrap();
            if !out.status.success() {
                all_ok = false;
                note = format!(
                    "{name} with {workers} workers exited {:?}: {}",
                    out.status.code(),
                    String::from_utf8_lossy(&out.stderr)
                );
            }
        }
        if !all_ok {
            break;
        }
        let mut names_a: Vec<String> = std::fs::read_dir(&dir_a)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names_a.sort();
        let mut names_b: Vec<String> = std::fs::read_dir(&dir_b)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names_b.sort();
        if names_a != names_b || names_a.is_empty() {
            all_ok = false;
            note = format!("{name}: file sets differ ({names_a:?} vs {names_b:?})");
            break;
        }
        for file in &names_a {
            let bytes_a = std::fs::read(dir_a.join(file)).unwrap();
            let bytes_b = std::fs::read(dir_b.join(file)).unwrap();
            if bytes_a != bytes_b {
                all_ok = false;
                note = format!("{name}/{file}: outputs differ between worker counts");
                break;
            }
            compared += 1;
        }
        if !all_ok {
            break;
        }
    }
    if all_ok {
        note = format!("all 12 presets byte-identical across 1 vs 3 workers ({compared} files)");
    }
    verdict("10", all_ok, &note);
}
