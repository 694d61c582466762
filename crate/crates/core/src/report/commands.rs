//! The four `seglen` commands. Every file is written atomically.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analysis::{compare_to_reference, pooled_mean_curve, run_sweep_with, AccuracyCurve, Correlation};
use crate::signal::{generate_synthetic_dataset, load_dataset, write_dataset, Dataset};
use crate::{Error, Result};

use super::svg::{accuracy_plot, comparison_plot, derivative_plot, normalized_plot, LinePlot, TOO_FEW_POINTS};
use super::tables::{
    compare_csv_bytes, feature_csv_bytes, knee_csv_bytes, knee_report_text, knee_rows, read_reference_csv,
    read_sweep_csv, sweep_csv_bytes, KneeRow,
};
use super::{write_atomic, RunConfig};

pub const SWEEP_CSV: &str = "sweep.csv";
pub const KNEE_CSV: &str = "knee.csv";
pub const KNEE_TXT: &str = "knee.txt";
pub const RUN_MANIFEST: &str = "run_manifest.json";
pub const COMPARE_CSV: &str = "compare.csv";
pub const COMPARE_TXT: &str = "compare.txt";

/// Loads the manifest or generates the synthetic dataset named by `config`.
pub fn load_source(config: &RunConfig) -> Result<Dataset<f64>> {
    match (&config.manifest, &config.synth) {
        (Some(m), None) => load_dataset(m),
        (None, Some(s)) => generate_synthetic_dataset(s),
        _ => Err(Error::Config("exactly one of manifest and synth must be set".into())),
    }
}

/// Writes the synthetic dataset (CSV per recording plus `manifest.json`)
/// into the output directory and returns the manifest path.
pub fn cmd_synth(config: &RunConfig) -> Result<PathBuf> {
    let spec = config
        .synth
        .as_ref()
        .ok_or_else(|| Error::Config("synth needs a synth section in the config".into()))?;
    let dataset = generate_synthetic_dataset(spec)?;
    write_dataset(&dataset, &config.output_dir)
}

#[derive(Debug, Clone)]
pub struct SweepOutputs {
    pub curves: Vec<AccuracyCurve<f64>>,
    pub knees: Vec<KneeRow>,
    pub files: Vec<PathBuf>,
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Runs the sweep and writes results, knee report, run manifest and plots.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepOutputs> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let dataset = load_source(config)?;
    let mut files = Vec::new();

    let feature_dir = out.join("features");
    let curves = run_sweep_with(&dataset, &config.sweep_config(), |name, duration, vectors| {
        if config.export_features {
            let path = feature_dir.join(format!("{}_{duration}s.csv", slug(name)));
            write_atomic(&path, &feature_csv_bytes(vectors)?)?;
            files.push(path);
        }
        Ok(())
    })?;

    let knees = knee_rows(&curves);
    let mut emit = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = out.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };
    emit(SWEEP_CSV, &sweep_csv_bytes(&curves)?)?;
    emit(KNEE_CSV, &knee_csv_bytes(&knees)?)?;
    emit(KNEE_TXT, knee_report_text(&knees).as_bytes())?;
    let manifest = serde_json::to_string_pretty(&config.manifest()).expect("manifest serializes");
    emit(RUN_MANIFEST, manifest.as_bytes())?;

    if curves.iter().all(|c| c.len() >= 2) {
        files.extend(write_plots(&curves, &knees, out)?);
    } else {
        log::warn!("some curves have fewer than 2 points; plots skipped");
    }
    Ok(SweepOutputs { curves, knees, files })
}

fn write_plot(plot: &LinePlot, path: PathBuf) -> Result<Option<PathBuf>> {
    if plot.series.is_empty() {
        log::warn!("{}: nothing to plot", path.display());
        return Ok(None);
    }
    write_atomic(&path, plot.render()?.as_bytes())?;
    Ok(Some(path))
}

/// Writes `accuracy.svg`, `normalized.svg` and `derivative.svg`.
pub fn write_plots(curves: &[AccuracyCurve<f64>], knees: &[KneeRow], out: &Path) -> Result<Vec<PathBuf>> {
    if curves.is_empty() || curves.iter().any(|c| c.len() < 2) {
        return Err(Error::invalid(TOO_FEW_POINTS));
    }
    let multi = curves.iter().any(|c| c.dataset != curves[0].dataset);
    let knee_marks: Vec<(String, f64)> = knees
        .iter()
        .filter_map(|k| {
            let name = if multi {
                format!("{}/{}", k.dataset, k.classifier)
            } else {
                k.classifier.clone()
            };
            k.knee_duration().map(|d| (name, d))
        })
        .collect();
    let mut files = Vec::new();
    for (plot, name) in [
        (accuracy_plot(curves), "accuracy.svg"),
        (normalized_plot(curves), "normalized.svg"),
        (derivative_plot(curves, &knee_marks), "derivative.svg"),
    ] {
        files.extend(write_plot(&plot, out.join(name))?);
    }
    Ok(files)
}

/// Renders the plots for an existing sweep results CSV.
pub fn cmd_plot(results: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let curves = read_sweep_csv(results)?;
    if curves.is_empty() {
        return Err(Error::invalid(format!("{}: no result rows", results.display())));
    }
    write_plots(&curves, &knee_rows(&curves), out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub dataset: String,
    pub classifier: String,
    pub correlation: Correlation,
}

/// Correlates every curve, and each dataset's pooled mean curve, with the
/// reference. Writes `compare.csv`, `compare.txt` and `comparison.svg`.
pub fn cmd_compare(results: &Path, reference: &Path, out: &Path) -> Result<Vec<CompareRow>> {
    let mut curves = read_sweep_csv(results)?;
    let (ref_x, ref_y) = read_reference_csv(reference)?;
    let mut datasets: Vec<String> = Vec::new();
    for c in &curves {
        if !datasets.contains(&c.dataset) {
            datasets.push(c.dataset.clone());
        }
    }
    let plotted = curves.clone();
    for ds in &datasets {
        let group: Vec<_> = curves.iter().filter(|c| &c.dataset == ds).cloned().collect();
        if group.len() > 1 {
            curves.push(pooled_mean_curve(&group)?);
        }
    }

    let mut rows = Vec::new();
    let mut last_err = None;
    for c in &curves {
        match compare_to_reference(&c.durations, &c.mean_acc, &ref_x, &ref_y) {
            Ok(correlation) => rows.push(CompareRow {
                dataset: c.dataset.clone(),
                classifier: c.classifier.clone(),
                correlation,
            }),
            Err(e) => {
                log::warn!("{}/{}: not compared: {e}", c.dataset, c.classifier);
                last_err = Some(e);
            }
        }
    }
    if rows.is_empty() {
        return Err(last_err.unwrap_or_else(|| Error::invalid("no curves to compare")));
    }

    let table: Vec<_> = rows
        .iter()
        .map(|r| (r.dataset.clone(), r.classifier.clone(), r.correlation))
        .collect();
    write_atomic(&out.join(COMPARE_CSV), &compare_csv_bytes(&table)?)?;
    let mut text = String::from("Pearson correlation with the reference curve\n\n");
    for r in &rows {
        let c = r.correlation;
        let _ = writeln!(
            text,
            "{:<24} {:<10} r = {:.4}  p = {:.3e}  (n = {})",
            r.dataset, r.classifier, c.r, c.p_value, c.n
        );
    }
    write_atomic(&out.join(COMPARE_TXT), text.as_bytes())?;
    match comparison_plot(&plotted, &ref_x, &ref_y) {
        Ok(plot) => {
            write_plot(&plot, out.join("comparison.svg"))?;
        }
        Err(e) => log::warn!("comparison plot skipped: {e}"),
    }
    Ok(rows)
}
