use clap::{Args, Parser, Subcommand, ValueEnum};

/// Link-level simulator for SVD-based MIMO adaptation: capacity and BER
/// curves for equal-power, water-filling, beamforming, beam-nulling, their
/// multi-eigenvector generalizations, and space-time-code concatenations.
#[derive(Debug, Parser)]
#[command(name = "beamsim", version, about)]
pub struct Cli {
    /// Flat key=value config file; command-line flags override its entries.
    /// May also select the command itself via `command=...` when no
    /// subcommand is given.
    #[arg(long, global = true)]
    pub config: Option<String>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ergodic capacity curves for a set of adaptation schemes.
    Capacity(CapacityArgs),
    /// Bit-level BER curve for one transmission system.
    Ber(BerArgs),
    /// Run a named figure preset (fig2, fig3a, ..., fig10).
    Figure(FigureArgs),
    /// BER comparison of several systems at one data rate.
    Compare(CompareArgs),
    /// Fast invariant suite with a deterministic report hash.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}, expected csv or json")),
        }
    }

    pub fn name(self) -> &'static str {
        self.extension()
    }
}

#[derive(Debug, Args, Default)]
pub struct CapacityArgs {
    /// Transmit antennas.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Receive antennas (defaults to nt).
    #[arg(long)]
    pub nr: Option<usize>,
    /// Comma-separated scheme labels: eq,wf,bf,bn,md-bf<k>,md-bn<k>.
    #[arg(long)]
    pub schemes: Option<String>,
    /// Grid start in dB.
    #[arg(long)]
    pub from_db: Option<f64>,
    /// Grid stop in dB (inclusive).
    #[arg(long)]
    pub to_db: Option<f64>,
    /// Grid step in dB.
    #[arg(long)]
    pub step_db: Option<f64>,
    /// Channel draws per grid point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed for the channel ensemble.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per CPU). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Draw an independent channel ensemble per scheme instead of the
    /// default common-random-number coupling.
    #[arg(long)]
    pub independent: bool,
}

#[derive(Debug, Args, Default)]
pub struct BerArgs {
    /// System preset: scheme with optional code suffix, e.g. bn, bf,
    /// bn-ldc, md-bf2-alamouti, md-bn2-od34x3.
    #[arg(long)]
    pub preset: Option<String>,
    /// Data rate in bits per channel use.
    #[arg(long)]
    pub rate: Option<u32>,
    /// Receiver: mmse, ml, or mf (matched filter; orthogonal designs only).
    #[arg(long)]
    pub receiver: Option<String>,
    /// Transmit antennas.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Receive antennas (defaults to nt).
    #[arg(long)]
    pub nr: Option<usize>,
    /// Grid start in dB.
    #[arg(long)]
    pub from_db: Option<f64>,
    /// Grid stop in dB (inclusive).
    #[arg(long)]
    pub to_db: Option<f64>,
    /// Grid step in dB.
    #[arg(long)]
    pub step_db: Option<f64>,
    /// Stop a grid point after this many bit errors.
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Hard bit budget per grid point; short points are flagged as capped.
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Also write the kernel-based analytic BER curve (MMSE systems
    /// without a space-time code).
    #[arg(long)]
    pub analytic: bool,
    /// Channel draws per point for the analytic curve.
    #[arg(long)]
    pub analytic_trials: Option<u64>,
    /// Master seed for the channel ensemble.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per CPU). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct FigureArgs {
    /// Preset name: fig2, fig3a, fig3b, fig4a, fig4b, fig5a, fig5b, fig6,
    /// fig7, fig8, fig9, fig10.
    pub name: Option<String>,
    /// Master seed for the channel ensemble.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per CPU). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Override a capacity preset's channel draws per grid point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Override a BER preset's per-point error target.
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Override a BER preset's per-point bit budget.
    #[arg(long)]
    pub max_bits: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct CompareArgs {
    /// Comma-separated system presets, each with an optional :receiver
    /// suffix, e.g. bf,bn:ml,bn-ldc (default receiver: mf for orthogonal
    /// designs, mmse otherwise).
    #[arg(long)]
    pub systems: Option<String>,
    /// Data rate in bits per channel use, shared by all systems.
    #[arg(long)]
    pub rate: Option<u32>,
    /// Transmit antennas.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Receive antennas (defaults to nt).
    #[arg(long)]
    pub nr: Option<usize>,
    /// Grid start in dB.
    #[arg(long)]
    pub from_db: Option<f64>,
    /// Grid stop in dB (inclusive).
    #[arg(long)]
    pub to_db: Option<f64>,
    /// Grid step in dB.
    #[arg(long)]
    pub step_db: Option<f64>,
    /// Stop a grid point after this many bit errors.
    #[arg(long)]
    pub min_errors: Option<u64>,
    /// Hard bit budget per grid point; short points are flagged as capped.
    #[arg(long)]
    pub max_bits: Option<u64>,
    /// Master seed for the channel ensemble.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per CPU). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Output format: csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args, Default)]
pub struct SelftestArgs {
    /// Master seed for the random instances the checks draw.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: one per CPU). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Negative control: corrupt one entry of the nulling subspace before
    /// the checks so the orthogonality property must fail.
    #[arg(long)]
    pub fault: bool,
}
