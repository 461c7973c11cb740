use beamsim_core::channel::ChannelConfig;
use beamsim_core::schemes::SchemeSpec;
use beamsim_core::sim::{
    analytic_ber_curve, detect_crossover, estimate_capacity, estimate_capacity_set, simulate_ber,
    BerCurve, BerSystem, CapacityCurve, CodeSpec, Crossover, Receiver, StoppingRule,
};
use beamsim_core::{Error, Result};

use crate::args::{
    BerArgs, CapacityArgs, Cli, Command, CompareArgs, FigureArgs, OutputFormat, SelftestArgs,
};
use crate::config::{
    parse_scheme_list, parse_system_list, ConfigMap, GridSpec, ResolvedBer, ResolvedCapacity,
    ResolvedCompare, SystemPreset,
};
use crate::output::{stem, OutputWriter};
use crate::presets::{find_preset, FigurePreset};
use crate::selftest::run_selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_SELFTEST: i32 = 3;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Runs one parsed invocation to completion and returns the process exit
/// code. `Err` maps to a nonzero code in `execute_from_env`.
pub fn run(cli: Cli) -> Result<i32> {
    let mut config = match &cli.config {
        Some(path) => ConfigMap::load(path)?,
        None => ConfigMap::default(),
    };
    let command = select_command(cli.command, &mut config)?;
    match command {
        Command::Capacity(args) => run_capacity(args, config),
        Command::Ber(args) => run_ber(args, config),
        Command::Figure(args) => run_figure(args, config),
        Command::Compare(args) => run_compare(args, config),
        Command::Selftest(args) => run_selftest_command(args, config),
    }
}

/// The config file may name the command (`command=capacity`); a subcommand
/// on the command line must then agree with it.
fn select_command(given: Option<Command>, config: &mut ConfigMap) -> Result<Command> {
    let from_config = config.string("command");
    match (given, from_config) {
        (Some(cmd), None) => Ok(cmd),
        (Some(cmd), Some(name)) => {
            if command_name(&cmd) == name {
                Ok(cmd)
            } else {
                Err(invalid(format!(
                    "config selects command={name} but the command line says {}",
                    command_name(&cmd)
                )))
            }
        }
        (None, Some(name)) => match name.as_str() {
            "capacity" => Ok(Command::Capacity(CapacityArgs::default())),
            "ber" => Ok(Command::Ber(BerArgs::default())),
            "figure" => Ok(Command::Figure(FigureArgs::default())),
            "compare" => Ok(Command::Compare(CompareArgs::default())),
            "selftest" => Ok(Command::Selftest(SelftestArgs::default())),
            other => Err(invalid(format!("config selects unknown command {other:?}"))),
        },
        (None, None) => Err(invalid(
            "no command given; pass one (capacity, ber, figure, compare, selftest) \
             or set command= in the config file",
        )),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Capacity(_) => "capacity",
        Command::Ber(_) => "ber",
        Command::Figure(_) => "figure",
        Command::Compare(_) => "compare",
        Command::Selftest(_) => "selftest",
    }
}

/// Command-line value, else config-file value, else `None`. The config key
/// is consumed (and validated) even when the flag overrides it.
fn merge<T: std::str::FromStr>(
    from_args: Option<T>,
    config: &mut ConfigMap,
    key: &str,
) -> Result<Option<T>> {
    let from_config = config.parse_as::<T>(key)?;
    Ok(from_args.or(from_config))
}

fn merge_flag(from_args: bool, config: &mut ConfigMap, key: &str) -> Result<bool> {
    let from_config = config.flag(key)?;
    Ok(from_args || from_config.unwrap_or(false))
}

fn merge_format(
    from_args: Option<&str>,
    config: &mut ConfigMap,
    default: OutputFormat,
) -> Result<OutputFormat> {
    let text = from_args.map(str::to_string).or_else(|| config.string("format"));
    match text {
        None => Ok(default),
        Some(s) => OutputFormat::parse(&s).map_err(invalid),
    }
}

fn merge_grid(
    from_db: Option<f64>,
    to_db: Option<f64>,
    step_db: Option<f64>,
    config: &mut ConfigMap,
    default: GridSpec,
) -> Result<GridSpec> {
    Ok(GridSpec {
        from_db: merge(from_db, config, "from_db")?.unwrap_or(default.from_db),
        to_db: merge(to_db, config, "to_db")?.unwrap_or(default.to_db),
        step_db: merge(step_db, config, "step_db")?.unwrap_or(default.step_db),
    })
}

/// Worker-thread override. It never appears in embedded configs: results
/// are identical for any worker count, so recording it would make
/// byte-equal runs look different.
fn merge_workers(from_args: Option<usize>, config: &mut ConfigMap) -> Result<Option<usize>> {
    merge(from_args, config, "workers")
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| invalid(format!("cannot build a pool of {n} worker threads: {e}")))?;
            pool.install(f)
        }
    }
}

const DEFAULT_SEED: u64 = 1;
/// Odd multiplier giving each scheme a well-separated seed when ensembles
/// are drawn independently.
const SEED_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

// ---------------------------------------------------------------------------
// capacity

fn resolve_capacity(args: CapacityArgs, config: &mut ConfigMap) -> Result<ResolvedCapacity> {
    let nt = merge(args.nt, config, "nt")?.unwrap_or(5);
    let nr = merge(args.nr, config, "nr")?.unwrap_or(nt);
    let scheme_text =
        args.schemes.or_else(|| config.string("schemes")).unwrap_or_else(|| "eq,wf,bf,bn".into());
    let schemes = parse_scheme_list(&scheme_text)?;
    let grid = merge_grid(
        args.from_db,
        args.to_db,
        args.step_db,
        config,
        GridSpec { from_db: 0.0, to_db: 25.0, step_db: 1.0 },
    )?;
    Ok(ResolvedCapacity {
        nt,
        nr,
        schemes,
        grid,
        trials: merge(args.trials, config, "trials")?.unwrap_or(20_000),
        seed: merge(args.seed, config, "seed")?.unwrap_or(DEFAULT_SEED),
        independent: merge_flag(args.independent, config, "independent")?,
        format: merge_format(args.format.as_deref(), config, OutputFormat::Csv)?,
        out: merge(args.out, config, "out")?.unwrap_or_else(|| ".".into()),
    })
}

fn compute_capacity(r: &ResolvedCapacity) -> Result<Vec<CapacityCurve>> {
    let grid = r.grid.points()?;
    if r.independent {
        let mut curves = Vec::with_capacity(r.schemes.len());
        for (i, spec) in r.schemes.iter().enumerate() {
            let seed = r.seed.wrapping_add(SEED_STRIDE.wrapping_mul(i as u64 + 1));
            let cfg = ChannelConfig::new(r.nt, r.nr, seed)?;
            curves.push(estimate_capacity(spec, &cfg, &grid, r.trials)?);
        }
        Ok(curves)
    } else {
        // Default: every scheme sees the same channel draws, so curve
        // differences are paired and crossover estimates are sharp.
        let cfg = ChannelConfig::new(r.nt, r.nr, r.seed)?;
        estimate_capacity_set(&r.schemes, &cfg, &grid, r.trials)
    }
}

fn capacity_crossovers(curves: &[CapacityCurve]) -> Result<Vec<(String, String, Vec<Crossover>)>> {
    let mut out = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let list = detect_crossover(
                &curves[i].rho_grid_db,
                &curves[i].mean_bits,
                &curves[j].mean_bits,
                &curves[i].stderr,
                &curves[j].stderr,
            )?;
            if !list.is_empty() {
                out.push((curves[i].scheme.clone(), curves[j].scheme.clone(), list));
            }
        }
    }
    Ok(out)
}

fn ber_crossovers(curves: &[BerCurve]) -> Result<Vec<(String, String, Vec<Crossover>)>> {
    let mut out = Vec::new();
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let list = detect_crossover(
                &curves[i].rho_grid_db,
                &curves[i].ber,
                &curves[j].ber,
                &curves[i].stderr,
                &curves[j].stderr,
            )?;
            if !list.is_empty() {
                out.push((curves[i].system.clone(), curves[j].system.clone(), list));
            }
        }
    }
    Ok(out)
}

fn prefixed(prefix: Option<&str>, base: String) -> String {
    match prefix {
        Some(p) => format!("{p}_{base}"),
        None => base,
    }
}

fn write_capacity_outputs(
    writer: &mut OutputWriter,
    prefix: Option<&str>,
    curves: &[CapacityCurve],
) -> Result<()> {
    for curve in curves {
        let name = prefixed(prefix, stem("capacity", &curve.scheme));
        writer.capacity_curves(&name, std::slice::from_ref(curve), &[])?;
    }
    if curves.len() >= 2 {
        let crossovers = capacity_crossovers(curves)?;
        let name = prefixed(prefix, "capacity_combined".into());
        writer.capacity_curves(&name, curves, &crossovers)?;
        report_crossovers(&crossovers);
    }
    Ok(())
}

fn write_ber_outputs(
    writer: &mut OutputWriter,
    prefix: Option<&str>,
    curves: &[BerCurve],
) -> Result<()> {
    for curve in curves {
        let name = prefixed(prefix, stem("ber", &curve.system));
        writer.ber_curves(&name, std::slice::from_ref(curve), &[])?;
    }
    if curves.len() >= 2 {
        let crossovers = ber_crossovers(curves)?;
        let name = prefixed(prefix, "ber_combined".into());
        writer.ber_curves(&name, curves, &crossovers)?;
        report_crossovers(&crossovers);
    }
    Ok(())
}

fn report_crossovers(crossovers: &[(String, String, Vec<Crossover>)]) {
    for (a, b, list) in crossovers {
        for c in list {
            let tag = if c.confident { "" } else { " (within noise)" };
            println!("crossover {a}/{b} at {:.2} dB{tag}", c.rho_db);
        }
    }
}

fn report_written(writer: &OutputWriter) {
    for path in writer.written_files() {
        println!("wrote {}", path.display());
    }
}

fn run_capacity(args: CapacityArgs, mut config: ConfigMap) -> Result<i32> {
    let workers = merge_workers(args.workers, &mut config)?;
    let resolved = resolve_capacity(args, &mut config)?;
    config.reject_unconsumed()?;
    let curves = with_pool(workers, || compute_capacity(&resolved))?;
    let mut writer = OutputWriter::new(&resolved.out, resolved.format, resolved.config_pairs())?;
    write_capacity_outputs(&mut writer, None, &curves)?;
    report_written(&writer);
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// ber

fn resolve_ber(args: BerArgs, config: &mut ConfigMap) -> Result<ResolvedBer> {
    let preset_text = args
        .preset
        .or_else(|| config.string("preset"))
        .ok_or_else(|| invalid("ber needs --preset (e.g. bn, bn-ldc, md-bf2-alamouti)"))?;
    let preset = SystemPreset::parse(&preset_text)?;
    let rate = merge(args.rate, config, "rate")?
        .ok_or_else(|| invalid("ber needs --rate (information bits per channel use)"))?;
    let receiver = match args.receiver.or_else(|| config.string("receiver")) {
        Some(text) => Receiver::parse(&text)?,
        None => preset.default_receiver(),
    };
    let nt = merge(args.nt, config, "nt")?.unwrap_or(4);
    let nr = merge(args.nr, config, "nr")?.unwrap_or(nt);
    let grid = merge_grid(
        args.from_db,
        args.to_db,
        args.step_db,
        config,
        GridSpec { from_db: 0.0, to_db: 18.0, step_db: 3.0 },
    )?;
    let stopping = StoppingRule {
        min_errors: merge(args.min_errors, config, "min_errors")?.unwrap_or(200),
        max_bits: merge(args.max_bits, config, "max_bits")?.unwrap_or(100_000_000),
    };
    Ok(ResolvedBer {
        preset,
        receiver,
        rate,
        nt,
        nr,
        grid,
        stopping,
        analytic: merge_flag(args.analytic, config, "analytic")?,
        analytic_trials: merge(args.analytic_trials, config, "analytic_trials")?.unwrap_or(20_000),
        seed: merge(args.seed, config, "seed")?.unwrap_or(DEFAULT_SEED),
        format: merge_format(args.format.as_deref(), config, OutputFormat::Csv)?,
        out: merge(args.out, config, "out")?.unwrap_or_else(|| ".".into()),
    })
}

fn run_ber(args: BerArgs, mut config: ConfigMap) -> Result<i32> {
    let workers = merge_workers(args.workers, &mut config)?;
    let resolved = resolve_ber(args, &mut config)?;
    config.reject_unconsumed()?;
    let system = BerSystem::for_rate(
        SchemeSpec::unit(resolved.preset.scheme),
        resolved.preset.code,
        resolved.receiver,
        resolved.rate,
        resolved.nt,
    )?;
    if resolved.analytic
        && !(resolved.preset.code == CodeSpec::None && resolved.receiver == Receiver::Mmse)
    {
        return Err(invalid(
            "the analytic curve models per-stream MMSE detection without a \
             space-time code; drop --analytic for this system",
        ));
    }
    let cfg = ChannelConfig::new(resolved.nt, resolved.nr, resolved.seed)?;
    let grid = resolved.grid.points()?;
    let resolved_ref = &resolved;
    let (curve, analytic) = with_pool(workers, || {
        let curve = simulate_ber(&system, &cfg, &grid, &resolved_ref.stopping)?;
        let analytic = if resolved_ref.analytic {
            Some(analytic_ber_curve(
                &system.scheme,
                &cfg,
                &system.constellation,
                &grid,
                resolved_ref.analytic_trials,
            )?)
        } else {
            None
        };
        Ok((curve, analytic))
    })?;
    let mut writer = OutputWriter::new(&resolved.out, resolved.format, resolved.config_pairs())?;
    let base = stem("ber", &curve.system);
    writer.ber_curves(&base, std::slice::from_ref(&curve), &[])?;
    if let Some(ana) = &analytic {
        writer.analytic_curve(&format!("{base}_analytic"), ana)?;
    }
    report_written(&writer);
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// compare

fn resolve_compare(args: CompareArgs, config: &mut ConfigMap) -> Result<ResolvedCompare> {
    let systems_text = args
        .systems
        .or_else(|| config.string("systems"))
        .ok_or_else(|| invalid("compare needs --systems (e.g. bf,bn:ml,bn-ldc)"))?;
    let systems = parse_system_list(&systems_text)?;
    let rate = merge(args.rate, config, "rate")?
        .ok_or_else(|| invalid("compare needs --rate (information bits per channel use)"))?;
    let nt = merge(args.nt, config, "nt")?.unwrap_or(4);
    let nr = merge(args.nr, config, "nr")?.unwrap_or(nt);
    let grid = merge_grid(
        args.from_db,
        args.to_db,
        args.step_db,
        config,
        GridSpec { from_db: 0.0, to_db: 18.0, step_db: 3.0 },
    )?;
    let stopping = StoppingRule {
        min_errors: merge(args.min_errors, config, "min_errors")?.unwrap_or(200),
        max_bits: merge(args.max_bits, config, "max_bits")?.unwrap_or(100_000_000),
    };
    Ok(ResolvedCompare {
        systems,
        rate,
        nt,
        nr,
        grid,
        stopping,
        seed: merge(args.seed, config, "seed")?.unwrap_or(DEFAULT_SEED),
        format: merge_format(args.format.as_deref(), config, OutputFormat::Csv)?,
        out: merge(args.out, config, "out")?.unwrap_or_else(|| ".".into()),
    })
}

fn build_systems(
    systems: &[(SystemPreset, Receiver)],
    rate: u32,
    nt: usize,
) -> Result<Vec<BerSystem>> {
    let built: Vec<BerSystem> = systems
        .iter()
        .map(|(preset, receiver)| {
            BerSystem::for_rate(SchemeSpec::unit(preset.scheme), preset.code, *receiver, rate, nt)
        })
        .collect::<Result<_>>()?;
    for i in 0..built.len() {
        for j in i + 1..built.len() {
            if built[i].label() == built[j].label() {
                return Err(invalid(format!(
                    "system {} appears twice; output files would collide",
                    built[i].label()
                )));
            }
        }
    }
    Ok(built)
}

fn simulate_compare(
    systems: &[BerSystem],
    cfg: &ChannelConfig,
    grid: &[f64],
    stopping: &StoppingRule,
) -> Result<Vec<BerCurve>> {
    // Same seed for every system: common random numbers pair the curves.
    systems.iter().map(|s| simulate_ber(s, cfg, grid, stopping)).collect()
}

fn run_compare(args: CompareArgs, mut config: ConfigMap) -> Result<i32> {
    let workers = merge_workers(args.workers, &mut config)?;
    let resolved = resolve_compare(args, &mut config)?;
    config.reject_unconsumed()?;
    let systems = build_systems(&resolved.systems, resolved.rate, resolved.nt)?;
    let cfg = ChannelConfig::new(resolved.nt, resolved.nr, resolved.seed)?;
    let grid = resolved.grid.points()?;
    let stopping = resolved.stopping;
    let curves = with_pool(workers, || simulate_compare(&systems, &cfg, &grid, &stopping))?;
    let mut writer = OutputWriter::new(&resolved.out, resolved.format, resolved.config_pairs())?;
    write_ber_outputs(&mut writer, None, &curves)?;
    report_written(&writer);
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// figure

struct FigureOverrides {
    seed: u64,
    trials: Option<u64>,
    min_errors: Option<u64>,
    max_bits: Option<u64>,
    format: OutputFormat,
    out: String,
}

fn run_figure(args: FigureArgs, mut config: ConfigMap) -> Result<i32> {
    let workers = merge_workers(args.workers, &mut config)?;
    let name = args
        .name
        .or_else(|| config.string("name"))
        .ok_or_else(|| invalid("figure needs a preset name (fig2, fig3a, ..., fig10)"))?;
    let preset = find_preset(&name)?;
    let overrides = FigureOverrides {
        seed: merge(args.seed, &mut config, "seed")?.unwrap_or(DEFAULT_SEED),
        trials: merge(args.trials, &mut config, "trials")?,
        min_errors: merge(args.min_errors, &mut config, "min_errors")?,
        max_bits: merge(args.max_bits, &mut config, "max_bits")?,
        format: merge_format(args.format.as_deref(), &mut config, OutputFormat::Csv)?,
        out: merge(args.out, &mut config, "out")?.unwrap_or_else(|| ".".into()),
    };
    config.reject_unconsumed()?;
    match &preset {
        FigurePreset::Capacity { .. } => {
            if overrides.min_errors.is_some() || overrides.max_bits.is_some() {
                return Err(invalid(format!(
                    "{name} is a capacity preset; min_errors/max_bits do not apply \
                     (its budget is set with trials)"
                )));
            }
        }
        FigurePreset::Ber { .. } => {
            if overrides.trials.is_some() {
                return Err(invalid(format!(
                    "{name} is a BER preset; trials does not apply \
                     (its budget is set with min_errors/max_bits)"
                )));
            }
        }
    }
    println!("{}: {}", preset.name(), preset.about());

    match preset {
        FigurePreset::Capacity { name, nt, nr, schemes, grid, trials, .. } => {
            let resolved = ResolvedCapacity {
                nt,
                nr,
                schemes: schemes.into_iter().map(SchemeSpec::unit).collect(),
                grid,
                trials: overrides.trials.unwrap_or(trials),
                seed: overrides.seed,
                independent: false,
                format: overrides.format,
                out: overrides.out,
            };
            let pairs = vec![
                ("command".into(), "figure".into()),
                ("name".into(), name.to_string()),
                ("seed".into(), resolved.seed.to_string()),
                ("trials".into(), resolved.trials.to_string()),
                ("format".into(), resolved.format.name().into()),
            ];
            let curves = with_pool(workers, || compute_capacity(&resolved))?;
            let mut writer = OutputWriter::new(&resolved.out, resolved.format, pairs)?;
            write_capacity_outputs(&mut writer, Some(name), &curves)?;
            report_written(&writer);
        }
        FigurePreset::Ber {
            name, nt, nr, rate, systems, grid, stopping, analytic_trials, ..
        } => {
            let resolved = ResolvedCompare {
                systems,
                rate,
                nt,
                nr,
                grid,
                stopping: StoppingRule {
                    min_errors: overrides.min_errors.unwrap_or(stopping.min_errors),
                    max_bits: overrides.max_bits.unwrap_or(stopping.max_bits),
                },
                seed: overrides.seed,
                format: overrides.format,
                out: overrides.out,
            };
            let pairs = vec![
                ("command".into(), "figure".into()),
                ("name".into(), name.to_string()),
                ("seed".into(), resolved.seed.to_string()),
                ("min_errors".into(), resolved.stopping.min_errors.to_string()),
                ("max_bits".into(), resolved.stopping.max_bits.to_string()),
                ("format".into(), resolved.format.name().into()),
            ];
            let systems = build_systems(&resolved.systems, resolved.rate, resolved.nt)?;
            let cfg = ChannelConfig::new(resolved.nt, resolved.nr, resolved.seed)?;
            let grid_points = resolved.grid.points()?;
            let stopping = resolved.stopping;
            let systems_ref = &systems;
            let grid_ref = &grid_points;
            let analytic: Vec<(usize, u64)> = match analytic_trials {
                None => Vec::new(),
                Some(trials) => systems
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.code == CodeSpec::None && s.receiver == Receiver::Mmse)
                    .map(|(i, _)| (i, trials))
                    .collect(),
            };
            let (curves, analytic_curves) = with_pool(workers, move || {
                let curves = simulate_compare(systems_ref, &cfg, grid_ref, &stopping)?;
                let mut analytic_curves = Vec::new();
                for (i, trials) in analytic {
                    analytic_curves.push(analytic_ber_curve(
                        &systems_ref[i].scheme,
                        &cfg,
                        &systems_ref[i].constellation,
                        grid_ref,
                        trials,
                    )?);
                }
                Ok((curves, analytic_curves))
            })?;
            let mut writer = OutputWriter::new(&resolved.out, resolved.format, pairs)?;
            write_ber_outputs(&mut writer, Some(name), &curves)?;
            for ana in &analytic_curves {
                let base = prefixed(Some(name), stem("ber", &ana.system));
                writer.analytic_curve(&format!("{base}_analytic"), ana)?;
            }
            report_written(&writer);
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// selftest

fn run_selftest_command(args: SelftestArgs, mut config: ConfigMap) -> Result<i32> {
    let workers = merge_workers(args.workers, &mut config)?;
    let seed = merge(args.seed, &mut config, "seed")?.unwrap_or(DEFAULT_SEED);
    let fault = merge_flag(args.fault, &mut config, "fault")?;
    config.reject_unconsumed()?;
    let report = with_pool(workers, || Ok(run_selftest(seed, fault)))?;
    for line in &report.lines {
        println!("{line}");
    }
    println!("report-sha256 {}", report.sha256);
    Ok(if report.all_passed { EXIT_OK } else { EXIT_SELFTEST })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn capacity_cli(extra: &str) -> Cli {
        let line = format!("beamsim capacity {extra}");
        <Cli as clap::Parser>::try_parse_from(line.split_whitespace()).unwrap()
    }

    #[test]
    fn command_line_overrides_config_file() {
        let mut config = ConfigMap::parse("nt=3\ntrials=500\nseed=9\n").unwrap();
        let cli = capacity_cli("--nt 4 --trials 800");
        let Some(Command::Capacity(args)) = cli.command else { unreachable!() };
        let resolved = resolve_capacity(args, &mut config).unwrap();
        assert_eq!(resolved.nt, 4);
        assert_eq!(resolved.nr, 4);
        assert_eq!(resolved.trials, 800);
        assert_eq!(resolved.seed, 9);
        config.reject_unconsumed().unwrap();
    }

    #[test]
    fn config_command_must_match_the_given_one() {
        let mut config = ConfigMap::parse("command=ber\n").unwrap();
        let cli = capacity_cli("");
        let err = select_command(cli.command, &mut config).unwrap_err();
        assert!(err.to_string().contains("command=ber"));
    }

    #[test]
    fn config_alone_selects_the_command() {
        let mut config = ConfigMap::parse("command=selftest\nseed=4\n").unwrap();
        let cmd = select_command(None, &mut config).unwrap();
        assert!(matches!(cmd, Command::Selftest(_)));
    }

    #[test]
    fn stray_config_keys_are_rejected() {
        let mut config = ConfigMap::parse("trails=500\n").unwrap();
        let cli = capacity_cli("");
        let Some(Command::Capacity(args)) = cli.command else { unreachable!() };
        resolve_capacity(args, &mut config).unwrap();
        let err = config.reject_unconsumed().unwrap_err();
        assert!(err.to_string().contains("trails"));
    }

    #[test]
    fn ber_requires_preset_and_rate() {
        let mut config = ConfigMap::default();
        let err = resolve_ber(BerArgs::default(), &mut config).unwrap_err();
        assert!(err.to_string().contains("preset"));
        let mut config = ConfigMap::parse("preset=bn\n").unwrap();
        let err = resolve_ber(BerArgs::default(), &mut config).unwrap_err();
        assert!(err.to_string().contains("rate"));
    }

    #[test]
    fn analytic_flag_rejects_coded_systems() {
        let config =
            ConfigMap::parse("preset=bn-ldc\nrate=6\nanalytic=true\nout=/tmp/beamsim-reject\n")
                .unwrap();
        let err = run_ber(BerArgs::default(), config).unwrap_err();
        assert!(err.to_string().contains("analytic"), "{err}");
    }

    #[test]
    fn duplicate_systems_are_rejected() {
        let systems = parse_system_list("bn,bn").unwrap();
        let err = build_systems(&systems, 6, 4).unwrap_err();
        assert!(err.to_string().contains("twice"));
    }

    #[test]
    fn figure_rejects_budget_overrides_of_the_wrong_kind() {
        let figure_cli = |extra: &str| {
            let line = format!("beamsim figure {extra}");
            <Cli as clap::Parser>::try_parse_from(line.split_whitespace()).unwrap()
        };
        let Some(Command::Figure(args)) = figure_cli("fig2 --min-errors 50").command else {
            unreachable!()
        };
        let err = run_figure(args, ConfigMap::default()).unwrap_err();
        assert!(err.to_string().contains("capacity preset"), "{err}");

        let Some(Command::Figure(args)) = figure_cli("fig3b --trials 500").command else {
            unreachable!()
        };
        let err = run_figure(args, ConfigMap::default()).unwrap_err();
        assert!(err.to_string().contains("BER preset"), "{err}");
    }
}
