//! Self-describing artifact writers.
//!
//! Every emitted file carries the tool version, the config hash, and the
//! master seed: CSV files in a leading `#` comment line before the header
//! row, JSON files in a `provenance` object. Nothing time- or
//! machine-dependent is written, so identical runs produce identical
//! bytes.

use crate::config::Overrides;
use crate::critical::{SandwichReport, ScalingStudy};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Identity block stamped into every artifact.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    /// Flag overrides that shadowed config-file values, key -> value.
    pub overrides: Overrides,
}

impl Provenance {
    pub fn new(config_hash: String, seed: u64, overrides: Overrides) -> Self {
        Provenance { version: crate::VERSION.into(), config_hash, seed, overrides }
    }

    /// One-line `#` comment for the top of CSV files.
    pub fn comment_line(&self) -> String {
        let mut line = format!(
            "# version={} config_hash={} seed={}",
            self.version, self.config_hash, self.seed
        );
        if !self.overrides.is_empty() {
            let pairs: Vec<String> =
                self.overrides.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
            line.push_str(&format!(" overrides={}", pairs.join(",")));
        }
        line
    }
}

/// Writes a CSV file: provenance comment, header row, then records.
/// Fields are quoted per RFC 4180 only when needed (the csv crate's
/// default).
pub fn write_csv<I>(path: &Path, prov: &Provenance, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut file = BufWriter::new(File::create(path)?);
    writeln!(file, "{}", prov.comment_line())?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidParam(format!(
                "row width {} does not match header width {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `{ "provenance": ..., <key>: value }` as pretty JSON with a
/// trailing newline.
pub fn write_json<T: Serialize>(path: &Path, prov: &Provenance, key: &str, value: &T) -> Result<()> {
    let doc = json!({ "provenance": prov, key: value });
    let mut file = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut file, &doc)?;
    writeln!(file)?;
    file.flush()?;
    Ok(())
}

/// Shortest round-trip decimal form of a float, for CSV cells.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Files produced by [`emit_report`].
#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub summary: PathBuf,
    pub plot: PathBuf,
}

/// Emits the study summary (`summary.json`) and the plot-ready columns
/// (`plot.csv`: density, log density, log mean gap, fitted line) into
/// `out_dir`. Sandwich reports, when supplied, contribute a pass rate.
pub fn emit_report(
    study: &ScalingStudy,
    sandwiches: &[SandwichReport],
    out_dir: &Path,
    prov: &Provenance,
) -> Result<ReportPaths> {
    if study.points.is_empty() {
        return Err(Error::InvalidParam("study has no density points".into()));
    }
    std::fs::create_dir_all(out_dir)?;

    let per_density: Vec<_> = study
        .points
        .iter()
        .map(|p| {
            json!({
                "rho": p.rho,
                "mean_gap": p.mean_gap,
                "stderr_gap": p.stderr_gap,
                "seeds_ok": p.estimates.len(),
                "seeds_failed": p.failures.len(),
                "undecided_probes": p.undecided_total,
                "excluded": p.excluded,
            })
        })
        .collect();
    let excluded: Vec<_> = study
        .points
        .iter()
        .filter(|p| p.excluded)
        .map(|p| {
            json!({
                "rho": p.rho,
                "seeds_failed": p.failures.len(),
                "failures": p.failures,
            })
        })
        .collect();
    let sandwich = if sandwiches.is_empty() {
        json!(null)
    } else {
        let attempts = sandwiches.len();
        let passes = sandwiches
            .iter()
            .filter(|s| s.complete && s.ordered == Some(true))
            .count();
        json!({
            "attempts": attempts,
            "passes": passes,
            "pass_rate": passes as f64 / attempts as f64,
        })
    };
    let summary = json!({
        "tau": study.tau,
        "fit": study.fit,
        "fit_note": study.fit_note,
        "notes": study.notes,
        "densities": per_density,
        "excluded": excluded,
        "sandwich": sandwich,
    });
    let summary_path = out_dir.join("summary.json");
    write_json(&summary_path, prov, "summary", &summary)?;

    let mut rows = Vec::new();
    for p in &study.points {
        if p.excluded || !(p.mean_gap > 0.0) {
            continue;
        }
        let lx = p.rho.ln();
        let ly = p.mean_gap.ln();
        let fit_ly = study
            .fit
            .as_ref()
            .map(|f| fmt_f64(f.slope * lx + f.intercept))
            .unwrap_or_default();
        rows.push(vec![fmt_f64(p.rho), fmt_f64(lx), fmt_f64(ly), fit_ly]);
    }
    let plot_path = out_dir.join("plot.csv");
    write_csv(
        &plot_path,
        prov,
        &["rho", "log_rho", "log_mean_gap", "fit_log_gap"],
        rows,
    )?;
    Ok(ReportPaths { summary: summary_path, plot: plot_path })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::{DensityPoint, FitResult};

    fn toy_study() -> ScalingStudy {
        let mk = |rho: f64, gap: f64| DensityPoint {
            rho,
            estimates: Vec::new(),
            failures: Vec::new(),
            mean_gap: gap,
            stderr_gap: 0.01,
            undecided_total: 0,
            excluded: false,
        };
        ScalingStudy {
            tau: 0.0,
            master_seed: 7,
            config_hash: "abcdef012345".into(),
            points: vec![mk(1.0, 0.7), mk(4.0, 1.4)],
            fit: Some(FitResult {
                slope: 0.5,
                intercept: 0.7f64.ln(),
                slope_ci: [0.45, 0.55],
                bootstrap_samples: 100,
            }),
            fit_note: None,
            notes: Vec::new(),
        }
    }

    fn prov() -> Provenance {
        Provenance::new("abcdef012345".into(), 7, Overrides::default())
    }

    #[test]
    fn csv_carries_provenance_and_quotes_when_needed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &prov(),
            &["a", "b"],
            vec![
                vec!["1.5".to_string(), "plain".to_string()],
                vec!["2".to_string(), "needs,quote".to_string()],
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        let head = lines.next().unwrap();
        assert!(head.starts_with("# version="));
        assert!(head.contains("config_hash=abcdef012345"));
        assert!(head.contains("seed=7"));
        assert_eq!(lines.next().unwrap(), "a,b");
        assert_eq!(lines.next().unwrap(), "1.5,plain");
        assert_eq!(lines.next().unwrap(), "2,\"needs,quote\"");
    }

    #[test]
    fn report_summarizes_fit_and_plot_columns() {
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_report(&toy_study(), &[], dir.path(), &prov()).unwrap();
        let summary: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&paths.summary).unwrap()).unwrap();
        assert_eq!(summary["provenance"]["seed"], 7);
        assert_eq!(summary["summary"]["fit"]["slope"], 0.5);
        assert!(summary["summary"]["sandwich"].is_null());
        let plot = std::fs::read_to_string(&paths.plot).unwrap();
        let data: Vec<&str> = plot.lines().collect();
        assert_eq!(data[1], "rho,log_rho,log_mean_gap,fit_log_gap");
        assert_eq!(data.len(), 4, "two density rows");
        // The fitted line passes through both points of an exact fit.
        let cells: Vec<&str> = data[2].split(',').collect();
        let ly: f64 = cells[2].parse().unwrap();
        let fit: f64 = cells[3].parse().unwrap();
        assert!((ly - fit).abs() < 1e-12);
    }

    #[test]
    fn empty_study_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut study = toy_study();
        study.points.clear();
        assert!(emit_report(&study, &[], dir.path(), &prov()).is_err());
    }

    #[test]
    fn floats_round_trip_through_the_csv_cells() {
        assert_eq!(fmt_f64(0.1), "0.1");
        let weird = 0.1 + 0.2;
        let back: f64 = fmt_f64(weird).parse().unwrap();
        assert_eq!(back.to_bits(), weird.to_bits());
    }
}
