use std::collections::BTreeMap;
use std::collections::BTreeSet;

use beamsim_core::schemes::{SchemeKind, SchemeSpec};
use beamsim_core::sim::{CodeSpec, OrthogonalDesignKind, Receiver, StoppingRule};
use beamsim_core::{Error, Result};

use crate::args::OutputFormat;

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Flat key=value file with `#` comments. Keys mirror the long flag names
/// (underscored); `command=` may select the subcommand. Unknown keys are
/// rejected so typos surface instead of silently using defaults.
#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    values: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(invalid(format!(
                    "config line {} is not key=value: {raw:?}",
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(invalid(format!("config key {key:?} given twice")));
            }
        }
        Ok(Self { values, consumed: BTreeSet::new() })
    }

    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {path:?}: {e}")))?;
        Self::parse(&text)
    }

    fn raw(&mut self, key: &str) -> Option<&str> {
        if self.values.contains_key(key) {
            self.consumed.insert(key.to_string());
            self.values.get(key).map(|s| s.as_str())
        } else {
            None
        }
    }

    pub fn string(&mut self, key: &str) -> Option<String> {
        self.raw(key).map(|s| s.to_string())
    }

    pub fn parse_as<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| invalid(format!("config key {key}={s:?} is not a valid value"))),
        }
    }

    pub fn flag(&mut self, key: &str) -> Result<Option<bool>> {
        match self.raw(key) {
            None => Ok(None),
            Some("true") | Some("1") => Ok(Some(true)),
            Some("false") | Some("0") => Ok(Some(false)),
            Some(other) => Err(invalid(format!("config key {key}={other:?} is not a boolean"))),
        }
    }

    /// Errors when the file holds keys nothing consumed — catching both
    /// typos and options that do not belong to the chosen command.
    pub fn reject_unconsumed(&self) -> Result<()> {
        let stray: Vec<&String> =
            self.values.keys().filter(|k| !self.consumed.contains(*k)).collect();
        if stray.is_empty() {
            Ok(())
        } else {
            Err(invalid(format!(
                "config keys not understood by this command: {}",
                stray.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}

/// A BER transmission-system preset: adaptation scheme plus optional
/// space-time code, named like `bn`, `bn-ldc`, `md-bf2-alamouti`.
#[derive(Debug, Clone, Copy)]
pub struct SystemPreset {
    pub scheme: SchemeKind,
    pub code: CodeSpec,
}

impl SystemPreset {
    pub fn parse(name: &str) -> Result<Self> {
        let (stem, code) = if let Some(s) = name.strip_suffix("-ldc") {
            (s, CodeSpec::Ldc)
        } else if let Some(s) = name.strip_suffix("-alamouti") {
            (s, CodeSpec::Od(OrthogonalDesignKind::Alamouti2))
        } else if let Some(s) = name.strip_suffix("-od34x3") {
            (s, CodeSpec::Od(OrthogonalDesignKind::Rate34_3))
        } else if let Some(s) = name.strip_suffix("-od34x4") {
            (s, CodeSpec::Od(OrthogonalDesignKind::Rate34_4))
        } else {
            (name, CodeSpec::None)
        };
        let scheme = SchemeKind::parse(stem).map_err(|_| {
            invalid(format!(
                "unknown system preset {name:?}; expected a scheme label (eq, wf, bf, \
                 bn, md-bf<k>, md-bn<k>) with an optional -ldc, -alamouti, -od34x3 \
                 or -od34x4 suffix"
            ))
        })?;
        Ok(Self { scheme, code })
    }

    pub fn name(&self) -> String {
        let code = match self.code {
            CodeSpec::None => "",
            CodeSpec::Ldc => "-ldc",
            CodeSpec::Od(OrthogonalDesignKind::Alamouti2) => "-alamouti",
            CodeSpec::Od(OrthogonalDesignKind::Rate34_3) => "-od34x3",
            CodeSpec::Od(OrthogonalDesignKind::Rate34_4) => "-od34x4",
        };
        format!("{}{}", self.scheme.label(), code)
    }

    /// The receiver used when none is named: matched filter for orthogonal
    /// designs (where it is optimal), MMSE otherwise.
    pub fn default_receiver(&self) -> Receiver {
        match self.code {
            CodeSpec::Od(_) => Receiver::MatchedFilter,
            _ => Receiver::Mmse,
        }
    }
}

pub fn parse_scheme_list(spec: &str) -> Result<Vec<SchemeSpec>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(invalid("empty entry in scheme list"));
        }
        out.push(SchemeSpec::unit(SchemeKind::parse(part)?));
    }
    if out.is_empty() {
        return Err(invalid("scheme list is empty"));
    }
    Ok(out)
}

/// One system entry of a comparison: preset plus optional `:receiver`.
pub fn parse_system_list(spec: &str) -> Result<Vec<(SystemPreset, Receiver)>> {
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(invalid("empty entry in system list"));
        }
        let (name, receiver) = match part.split_once(':') {
            Some((n, r)) => (n, Some(Receiver::parse(r)?)),
            None => (part, None),
        };
        let preset = SystemPreset::parse(name)?;
        let receiver = receiver.unwrap_or_else(|| preset.default_receiver());
        out.push((preset, receiver));
    }
    Ok(out)
}

/// Snr grid description kept in resolved form so outputs can embed it.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub from_db: f64,
    pub to_db: f64,
    pub step_db: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        beamsim_core::channel::snr_grid_db(self.from_db, self.to_db, self.step_db)
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedCapacity {
    pub nt: usize,
    pub nr: usize,
    pub schemes: Vec<SchemeSpec>,
    pub grid: GridSpec,
    pub trials: u64,
    pub seed: u64,
    pub independent: bool,
    pub format: OutputFormat,
    pub out: String,
}

impl ResolvedCapacity {
    pub fn config_pairs(&self) -> Vec<(String, String)> {
        let scheme_names: Vec<String> = self.schemes.iter().map(|s| s.kind.label()).collect();
        vec![
            ("command".into(), "capacity".into()),
            ("nt".into(), self.nt.to_string()),
            ("nr".into(), self.nr.to_string()),
            ("schemes".into(), scheme_names.join(",")),
            ("from_db".into(), self.grid.from_db.to_string()),
            ("to_db".into(), self.grid.to_db.to_string()),
            ("step_db".into(), self.grid.step_db.to_string()),
            ("trials".into(), self.trials.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("independent".into(), self.independent.to_string()),
            ("format".into(), self.format.name().into()),
        ]
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedBer {
    pub preset: SystemPreset,
    pub receiver: Receiver,
    pub rate: u32,
    pub nt: usize,
    pub nr: usize,
    pub grid: GridSpec,
    pub stopping: StoppingRule,
    pub analytic: bool,
    pub analytic_trials: u64,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: String,
}

impl ResolvedBer {
    pub fn config_pairs(&self) -> Vec<(String, String)> {
        let mut pairs = vec![
            ("command".into(), "ber".into()),
            ("preset".into(), self.preset.name()),
            ("receiver".into(), self.receiver.label().into()),
            ("rate".into(), self.rate.to_string()),
            ("nt".into(), self.nt.to_string()),
            ("nr".into(), self.nr.to_string()),
            ("from_db".into(), self.grid.from_db.to_string()),
            ("to_db".into(), self.grid.to_db.to_string()),
            ("step_db".into(), self.grid.step_db.to_string()),
            ("min_errors".into(), self.stopping.min_errors.to_string()),
            ("max_bits".into(), self.stopping.max_bits.to_string()),
            ("analytic".into(), self.analytic.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("format".into(), self.format.name().into()),
        ];
        if self.analytic {
            pairs.push(("analytic_trials".into(), self.analytic_trials.to_string()));
        }
        pairs
    }
}

#[derive(Debug, Clone)]
pub struct ResolvedCompare {
    pub systems: Vec<(SystemPreset, Receiver)>,
    pub rate: u32,
    pub nt: usize,
    pub nr: usize,
    pub grid: GridSpec,
    pub stopping: StoppingRule,
    pub seed: u64,
    pub format: OutputFormat,
    pub out: String,
}

impl ResolvedCompare {
    pub fn config_pairs(&self) -> Vec<(String, String)> {
        let names: Vec<String> =
            self.systems.iter().map(|(p, r)| format!("{}:{}", p.name(), r.label())).collect();
        vec![
            ("command".into(), "compare".into()),
            ("systems".into(), names.join(",")),
            ("rate".into(), self.rate.to_string()),
            ("nt".into(), self.nt.to_string()),
            ("nr".into(), self.nr.to_string()),
            ("from_db".into(), self.grid.from_db.to_string()),
            ("to_db".into(), self.grid.to_db.to_string()),
            ("step_db".into(), self.grid.step_db.to_string()),
            ("min_errors".into(), self.stopping.min_errors.to_string()),
            ("max_bits".into(), self.stopping.max_bits.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("format".into(), self.format.name().into()),
        ]
    }
}
