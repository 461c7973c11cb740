use beamsim_core::schemes::SchemeKind;
use beamsim_core::sim::{CodeSpec, OrthogonalDesignKind, Receiver, StoppingRule};
use beamsim_core::{Error, Result};

use crate::config::{GridSpec, SystemPreset};

/// A named figure preset: either a capacity comparison or a BER comparison
/// with fully documented antenna, rate, constellation and budget choices.
#[derive(Debug, Clone)]
pub enum FigurePreset {
    Capacity {
        name: &'static str,
        about: &'static str,
        nt: usize,
        nr: usize,
        schemes: Vec<SchemeKind>,
        grid: GridSpec,
        trials: u64,
    },
    Ber {
        name: &'static str,
        about: &'static str,
        nt: usize,
        nr: usize,
        rate: u32,
        systems: Vec<(SystemPreset, Receiver)>,
        grid: GridSpec,
        stopping: StoppingRule,
        /// Also emit the kernel-based analytic curve for each uncoded MMSE
        /// system (channel draws per point given here).
        analytic_trials: Option<u64>,
    },
}

impl FigurePreset {
    pub fn name(&self) -> &'static str {
        match self {
            FigurePreset::Capacity { name, .. } => name,
            FigurePreset::Ber { name, .. } => name,
        }
    }

    pub fn about(&self) -> &'static str {
        match self {
            FigurePreset::Capacity { about, .. } => about,
            FigurePreset::Ber { about, .. } => about,
        }
    }
}

fn sys(scheme: SchemeKind, code: CodeSpec, receiver: Receiver) -> (SystemPreset, Receiver) {
    (SystemPreset { scheme, code }, receiver)
}

const MD2_BF: SchemeKind = SchemeKind::MdBeamforming { k: 2 };
const MD2_BN: SchemeKind = SchemeKind::MdBeamNulling { k: 2 };

/// The full preset table. SNR ranges cover each comparison's interesting
/// BER span at the stated budgets; capacity grids are dense enough for
/// crossover interpolation.
pub fn all_presets() -> Vec<FigurePreset> {
    use CodeSpec::{Ldc, None as Uncoded, Od};
    use OrthogonalDesignKind::{Alamouti2, Rate34_3};
    use Receiver::{MatchedFilter as Mf, Ml, Mmse};
    use SchemeKind::{BeamNulling as Bn, Beamforming as Bf, EqualPower as Eq, WaterFilling as Wf};

    vec![
        FigurePreset::Capacity {
            name: "fig2",
            about: "5x5 ergodic capacity: equal power, water-filling, \
                    beamforming, beam-nulling",
            nt: 5,
            nr: 5,
            schemes: vec![Eq, Wf, Bf, Bn],
            grid: GridSpec { from_db: 0.0, to_db: 25.0, step_db: 0.5 },
            trials: 20_000,
        },
        FigurePreset::Ber {
            name: "fig3a",
            about: "3x3 beam-nulling, 8PSK (R=6), MMSE: simulated vs analytic \
                    BER. Starts at 2 dB, below which the nearest-neighbour \
                    PSK kernel is biased at the operating SINRs",
            nt: 3,
            nr: 3,
            rate: 6,
            systems: vec![sys(Bn, Uncoded, Mmse)],
            grid: GridSpec { from_db: 2.0, to_db: 20.0, step_db: 2.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 20_000_000 },
            analytic_trials: Some(20_000),
        },
        FigurePreset::Ber {
            name: "fig3b",
            about: "4x4 beam-nulling, QPSK (R=6), MMSE: simulated vs analytic BER",
            nt: 4,
            nr: 4,
            rate: 6,
            systems: vec![sys(Bn, Uncoded, Mmse)],
            grid: GridSpec { from_db: 0.0, to_db: 18.0, step_db: 2.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 20_000_000 },
            analytic_trials: Some(20_000),
        },
        FigurePreset::Ber {
            name: "fig4a",
            about: "4x4 at R=3: beamforming (8PSK) vs beam-nulling (BPSK, \
                    ML and MMSE)",
            nt: 4,
            nr: 4,
            rate: 3,
            systems: vec![sys(Bf, Uncoded, Mmse), sys(Bn, Uncoded, Ml), sys(Bn, Uncoded, Mmse)],
            grid: GridSpec { from_db: 0.0, to_db: 12.0, step_db: 3.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Ber {
            name: "fig4b",
            about: "4x4 at R=6: beamforming (64QAM) vs beam-nulling (QPSK, \
                    ML and MMSE)",
            nt: 4,
            nr: 4,
            rate: 6,
            systems: vec![sys(Bf, Uncoded, Mmse), sys(Bn, Uncoded, Ml), sys(Bn, Uncoded, Mmse)],
            grid: GridSpec { from_db: 0.0, to_db: 18.0, step_db: 3.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Ber {
            name: "fig5a",
            about: "4x4 at R=3: fig4a systems plus beam-nulling concatenated \
                    with a linear dispersion code (BPSK, MMSE)",
            nt: 4,
            nr: 4,
            rate: 3,
            systems: vec![
                sys(Bf, Uncoded, Mmse),
                sys(Bn, Uncoded, Ml),
                sys(Bn, Uncoded, Mmse),
                sys(Bn, Ldc, Mmse),
            ],
            grid: GridSpec { from_db: 0.0, to_db: 12.0, step_db: 3.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Ber {
            name: "fig5b",
            about: "4x4 at R=6: fig4b systems plus beam-nulling concatenated \
                    with a linear dispersion code (QPSK, MMSE)",
            nt: 4,
            nr: 4,
            rate: 6,
            systems: vec![
                sys(Bf, Uncoded, Mmse),
                sys(Bn, Uncoded, Ml),
                sys(Bn, Uncoded, Mmse),
                sys(Bn, Ldc, Mmse),
            ],
            grid: GridSpec { from_db: 0.0, to_db: 18.0, step_db: 3.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Capacity {
            name: "fig6",
            about: "5x5 ergodic capacity: one- vs two-eigenvector beam-nulling \
                    against water-filling and equal power",
            nt: 5,
            nr: 5,
            schemes: vec![Wf, Eq, Bn, MD2_BN],
            grid: GridSpec { from_db: -8.0, to_db: 25.0, step_db: 0.5 },
            trials: 20_000,
        },
        FigurePreset::Capacity {
            name: "fig7",
            about: "5x5 ergodic capacity: the multi-eigenvector beamforming \
                    and beam-nulling family against water-filling and equal \
                    power",
            nt: 5,
            nr: 5,
            schemes: vec![Wf, Eq, Bf, MD2_BF, Bn, MD2_BN],
            grid: GridSpec { from_db: -12.0, to_db: 28.0, step_db: 0.5 },
            trials: 20_000,
        },
        FigurePreset::Ber {
            name: "fig8",
            about: "5x5, two-eigenvector beamforming at R=2: linear dispersion \
                    code (BPSK, MMSE) vs orthogonal design (QPSK, matched \
                    filter)",
            nt: 5,
            nr: 5,
            rate: 2,
            systems: vec![sys(MD2_BF, Ldc, Mmse), sys(MD2_BF, Od(Alamouti2), Mf)],
            grid: GridSpec { from_db: -9.0, to_db: 3.0, step_db: 2.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Ber {
            name: "fig9",
            about: "5x5, two-eigenvector beam-nulling at R=3: linear \
                    dispersion code (BPSK, MMSE) vs rate-3/4 orthogonal \
                    design (16QAM, matched filter)",
            nt: 5,
            nr: 5,
            rate: 3,
            systems: vec![sys(MD2_BN, Ldc, Mmse), sys(MD2_BN, Od(Rate34_3), Mf)],
            grid: GridSpec { from_db: 0.0, to_db: 9.0, step_db: 1.5 },
            stopping: StoppingRule { min_errors: 200, max_bits: 1_000_000 },
            analytic_trials: None,
        },
        FigurePreset::Ber {
            name: "fig10",
            about: "5x5 at R=6, two-eigenvector schemes concatenated with \
                    space-time codes: beam-nulling and beamforming, each \
                    with a linear dispersion code (MMSE) and an orthogonal \
                    design (matched filter)",
            nt: 5,
            nr: 5,
            rate: 6,
            systems: vec![
                sys(MD2_BN, Ldc, Mmse),
                sys(MD2_BN, Od(Rate34_3), Mf),
                sys(MD2_BF, Ldc, Mmse),
                sys(MD2_BF, Od(Alamouti2), Mf),
            ],
            grid: GridSpec { from_db: 0.0, to_db: 21.0, step_db: 3.0 },
            stopping: StoppingRule { min_errors: 200, max_bits: 2_000_000 },
            analytic_trials: None,
        },
    ]
}

pub fn find_preset(name: &str) -> Result<FigurePreset> {
    all_presets().into_iter().find(|p| p.name() == name).ok_or_else(|| {
        let names: Vec<&str> = all_presets().iter().map(|p| p.name()).collect();
        Error::InvalidInput(format!("unknown figure {name:?}; available: {}", names.join(", ")))
    })
}
