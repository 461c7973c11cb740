use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use beamsim_core::sim::{AnalyticBerCurve, BerCurve, CapacityCurve, Crossover};
use beamsim_core::{Error, Result};
use serde_json::{json, Map, Value};

use crate::args::OutputFormat;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::InvalidInput(format!("cannot write {}: {e}", path.display()))
}

/// Formats a float with Rust's shortest-roundtrip representation; the same
/// bits always print the same bytes, which the determinism contract relies
/// on.
fn num(x: f64) -> String {
    format!("{x}")
}

fn config_comment_block(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "# {k}={v}");
    }
    out
}

fn config_object(pairs: &[(String, String)]) -> Value {
    let mut map = Map::new();
    for (k, v) in pairs {
        map.insert(k.clone(), Value::String(v.clone()));
    }
    Value::Object(map)
}

pub struct OutputWriter {
    dir: PathBuf,
    format: OutputFormat,
    config_pairs: Vec<(String, String)>,
    written: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn new(
        dir: impl Into<PathBuf>,
        format: OutputFormat,
        config_pairs: Vec<(String, String)>,
    ) -> Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        Ok(Self { dir, format, config_pairs, written: Vec::new() })
    }

    pub fn written_files(&self) -> &[PathBuf] {
        &self.written
    }

    fn write_file(&mut self, stem: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(format!("{stem}.{}", self.format.extension()));
        std::fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }

    fn json_document(&self, body: Value) -> String {
        let mut doc = Map::new();
        doc.insert("config".into(), config_object(&self.config_pairs));
        if let Value::Object(fields) = body {
            for (k, v) in fields {
                doc.insert(k, v);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc))
            .expect("curve serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn capacity_curves(
        &mut self,
        stem: &str,
        curves: &[CapacityCurve],
        crossovers: &[(String, String, Vec<Crossover>)],
    ) -> Result<PathBuf> {
        match self.format {
            OutputFormat::Csv => {
                let mut text = config_comment_block(&self.config_pairs);
                for (a, b, list) in crossovers {
                    for c in list {
                        let _ = writeln!(
                            text,
                            "# crossover {a}/{b} rho_db={} confident={}",
                            num(c.rho_db),
                            c.confident
                        );
                    }
                }
                text.push_str("rho_db,scheme,mean_bits,stderr,trials\n");
                for curve in curves {
                    for i in 0..curve.rho_grid_db.len() {
                        let _ = writeln!(
                            text,
                            "{},{},{},{},{}",
                            num(curve.rho_grid_db[i]),
                            curve.scheme,
                            num(curve.mean_bits[i]),
                            num(curve.stderr[i]),
                            curve.trials
                        );
                    }
                }
                self.write_file(stem, &text)
            }
            OutputFormat::Json => {
                let crossings: Vec<Value> = crossovers
                    .iter()
                    .flat_map(|(a, b, list)| {
                        list.iter().map(move |c| {
                            json!({
                                "a": a,
                                "b": b,
                                "rho_db": c.rho_db,
                                "confident": c.confident,
                            })
                        })
                    })
                    .collect();
                let body = json!({ "curves": curves, "crossovers": crossings });
                let text = self.json_document(body);
                self.write_file(stem, &text)
            }
        }
    }

    pub fn ber_curves(
        &mut self,
        stem: &str,
        curves: &[BerCurve],
        crossovers: &[(String, String, Vec<Crossover>)],
    ) -> Result<PathBuf> {
        match self.format {
            OutputFormat::Csv => {
                let mut text = config_comment_block(&self.config_pairs);
                for curve in curves {
                    let capped: Vec<String> = curve
                        .rho_grid_db
                        .iter()
                        .zip(&curve.capped)
                        .filter(|(_, &c)| c)
                        .map(|(db, _)| num(*db))
                        .collect();
                    if !capped.is_empty() {
                        let _ =
                            writeln!(text, "# capped {} rho_db={}", curve.system, capped.join(";"));
                    }
                }
                for (a, b, list) in crossovers {
                    for c in list {
                        let _ = writeln!(
                            text,
                            "# crossover {a}/{b} rho_db={} confident={}",
                            num(c.rho_db),
                            c.confident
                        );
                    }
                }
                text.push_str("rho_db,system,ber,errors,bits\n");
                for curve in curves {
                    for i in 0..curve.rho_grid_db.len() {
                        let _ = writeln!(
                            text,
                            "{},{},{},{},{}",
                            num(curve.rho_grid_db[i]),
                            curve.system,
                            num(curve.ber[i]),
                            curve.error_counts[i],
                            curve.bit_counts[i]
                        );
                    }
                }
                self.write_file(stem, &text)
            }
            OutputFormat::Json => {
                let crossings: Vec<Value> = crossovers
                    .iter()
                    .flat_map(|(a, b, list)| {
                        list.iter().map(move |c| {
                            json!({
                                "a": a,
                                "b": b,
                                "rho_db": c.rho_db,
                                "confident": c.confident,
                            })
                        })
                    })
                    .collect();
                let body = json!({ "curves": curves, "crossovers": crossings });
                let text = self.json_document(body);
                self.write_file(stem, &text)
            }
        }
    }

    /// Kernel-based analytic curve; the CSV schema differs from simulated
    /// BER files (stderr and trials instead of raw counts) and says so in a
    /// comment.
    pub fn analytic_curve(&mut self, stem: &str, curve: &AnalyticBerCurve) -> Result<PathBuf> {
        match self.format {
            OutputFormat::Csv => {
                let mut text = config_comment_block(&self.config_pairs);
                text.push_str("# schema=analytic-ber\n");
                text.push_str("rho_db,system,ber,stderr,trials\n");
                for i in 0..curve.rho_grid_db.len() {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{}",
                        num(curve.rho_grid_db[i]),
                        curve.system,
                        num(curve.ber[i]),
                        num(curve.stderr[i]),
                        curve.trials
                    );
                }
                self.write_file(stem, &text)
            }
            OutputFormat::Json => {
                let text = self.json_document(json!({ "curve": curve }));
                self.write_file(stem, &text)
            }
        }
    }
}

/// File stem for one curve inside an output directory; labels only contain
/// `[a-z0-9+-]`, so they embed directly.
pub fn stem(kind: &str, label: &str) -> String {
    format!("{kind}_{label}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve() -> BerCurve {
        BerCurve {
            system: "bn-qpsk-mmse".into(),
            rho_grid_db: vec![0.0, 3.0],
            ber: vec![0.125, 0.5e-3],
            stderr: vec![1e-3, 5e-5],
            error_counts: vec![400, 120],
            bit_counts: vec![3200, 240000],
            capped: vec![false, true],
            master_seed: 1,
        }
    }

    #[test]
    fn ber_csv_embeds_config_and_flags_capped_points() {
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![("command".to_string(), "ber".to_string())];
        let mut w = OutputWriter::new(dir.path(), OutputFormat::Csv, pairs).unwrap();
        let path = w.ber_curves("ber_test", &[curve()], &[]).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert!(text.starts_with("# command=ber\n"));
        assert!(text.contains("# capped bn-qpsk-mmse rho_db=3"));
        assert!(text.contains("rho_db,system,ber,errors,bits\n"));
        assert!(text.contains("0,bn-qpsk-mmse,0.125,400,3200\n"));
        // Comment lines form a loadable config file.
        let config_lines: String = text
            .lines()
            .filter(|l| l.starts_with("# ") && l.contains('='))
            .map(|l| format!("{}\n", &l[2..]))
            .collect();
        let mut map = crate::config::ConfigMap::parse(&config_lines).unwrap();
        assert_eq!(map.string("command"), Some("ber".into()));
    }

    #[test]
    fn json_documents_carry_config_and_curves() {
        let dir = tempfile::tempdir().unwrap();
        let pairs = vec![("command".to_string(), "ber".to_string())];
        let mut w = OutputWriter::new(dir.path(), OutputFormat::Json, pairs).unwrap();
        let path = w.ber_curves("ber_test", &[curve()], &[]).unwrap();
        let doc: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(doc["config"]["command"], "ber");
        assert_eq!(doc["curves"][0]["system"], "bn-qpsk-mmse");
        assert_eq!(doc["curves"][0]["capped"][1], true);
    }
}
