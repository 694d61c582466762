//! CSV and text result tables.
//!
//! | file | columns |
//! |------|---------|
//! | sweep results | `dataset,classifier,duration_s,acc_mean,acc_std,repeat_accs` (JSON array) |
//! | knee report | `dataset,classifier,knee_duration,confidence` (empty cells: no knee) |
//! | reference curve | `duration_s,value` |
//! | feature matrix | `subject_id,duration_s,f000..fNNN` (empty cell: missing) |
//! | comparison | `dataset,classifier,n,r,p_value` |

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{
    detect_knee_curve, pooled_mean_curve, AccuracyCurve, Correlation, KneeOutcome,
};
use crate::features::FeatureVector;
use crate::{Error, Result};

use super::write_atomic;

pub const SWEEP_HEADER: [&str; 6] = ["dataset", "classifier", "duration_s", "acc_mean", "acc_std", "repeat_accs"];
pub const KNEE_HEADER: [&str; 4] = ["dataset", "classifier", "knee_duration", "confidence"];
pub const REFERENCE_HEADER: [&str; 2] = ["duration_s", "value"];
pub const COMPARE_HEADER: [&str; 5] = ["dataset", "classifier", "n", "r", "p_value"];

fn csv_bytes<F>(header: &[&str], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    fill(&mut w)?;
    w.into_inner().map_err(|e| Error::invalid(format!("csv buffer: {e}")))
}

fn parse_field<T: std::str::FromStr>(file: &Path, row: usize, column: usize, text: &str) -> Result<T> {
    text.trim().parse().map_err(|_| Error::Parse {
        file: file.display().to_string(),
        row,
        column,
        message: format!("cannot parse {text:?}"),
    })
}

fn check_header(file: &Path, got: &csv::StringRecord, want: &[&str]) -> Result<()> {
    if got.iter().map(str::trim).ne(want.iter().copied()) {
        return Err(Error::Parse {
            file: file.display().to_string(),
            row: 1,
            column: 1,
            message: format!("expected header {}", want.join(",")),
        });
    }
    Ok(())
}

fn read_records(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes.as_slice());
    check_header(path, r.headers()?, header)?;
    r.records().map(|rec| rec.map_err(Error::from)).collect()
}

pub fn sweep_csv_bytes(curves: &[AccuracyCurve<f64>]) -> Result<Vec<u8>> {
    csv_bytes(&SWEEP_HEADER, |w| {
        for c in curves {
            for i in 0..c.len() {
                let repeats = serde_json::to_string(&c.repeat_accs[i]).expect("floats serialize");
                w.write_record([
                    c.dataset.as_str(),
                    c.classifier.as_str(),
                    &c.durations[i].to_string(),
                    &c.mean_acc[i].to_string(),
                    &c.std_acc[i].to_string(),
                    &repeats,
                ])?;
            }
        }
        Ok(())
    })
}

pub fn write_sweep_csv(curves: &[AccuracyCurve<f64>], path: &Path) -> Result<()> {
    write_atomic(path, &sweep_csv_bytes(curves)?)
}

/// Curves in order of first appearance of each `(dataset, classifier)`.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<AccuracyCurve<f64>>> {
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut cols: Vec<[Vec<f64>; 3]> = Vec::new();
    let mut repeats: Vec<Vec<Vec<f64>>> = Vec::new();
    for (i, rec) in read_records(path, &SWEEP_HEADER)?.iter().enumerate() {
        let row = i + 2;
        if rec.len() != SWEEP_HEADER.len() {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row,
                column: rec.len().min(SWEEP_HEADER.len()) + 1,
                message: format!("expected {} columns", SWEEP_HEADER.len()),
            });
        }
        let key = (rec[0].to_string(), rec[1].to_string());
        let k = match keys.iter().position(|x| *x == key) {
            Some(k) => k,
            None => {
                keys.push(key);
                cols.push(Default::default());
                repeats.push(Vec::new());
                keys.len() - 1
            }
        };
        for (j, col) in cols[k].iter_mut().enumerate() {
            col.push(parse_field(path, row, j + 3, &rec[j + 2])?);
        }
        let reps: Vec<f64> = serde_json::from_str(&rec[5]).map_err(|e| Error::Parse {
            file: path.display().to_string(),
            row,
            column: 6,
            message: format!("repeat_accs is not a JSON number array: {e}"),
        })?;
        repeats[k].push(reps);
    }
    keys.into_iter()
        .zip(cols)
        .zip(repeats)
        .map(|(((dataset, classifier), [d, m, s]), r)| AccuracyCurve::new(dataset, classifier, d, m, s, r))
        .collect()
}

/// Knee of one curve, or why there is none.
#[derive(Debug, Clone, PartialEq)]
pub struct KneeRow {
    pub dataset: String,
    pub classifier: String,
    pub outcome: std::result::Result<KneeOutcome<f64>, String>,
}

impl KneeRow {
    pub fn knee_duration(&self) -> Option<f64> {
        self.outcome.as_ref().ok()?.knee().map(|k| k.knee_duration)
    }

    pub fn confidence(&self) -> Option<f64> {
        self.outcome.as_ref().ok()?.knee().map(|k| k.confidence)
    }
}

/// One row per curve, then one pooled-mean row per dataset.
pub fn knee_rows(curves: &[AccuracyCurve<f64>]) -> Vec<KneeRow> {
    let row = |c: &AccuracyCurve<f64>| KneeRow {
        dataset: c.dataset.clone(),
        classifier: c.classifier.clone(),
        outcome: detect_knee_curve(c).map_err(|e| e.to_string()),
    };
    let mut rows: Vec<KneeRow> = curves.iter().map(row).collect();
    let mut datasets: Vec<&str> = Vec::new();
    for c in curves {
        if !datasets.contains(&c.dataset.as_str()) {
            datasets.push(&c.dataset);
        }
    }
    for ds in datasets {
        let group: Vec<AccuracyCurve<f64>> = curves.iter().filter(|c| c.dataset == ds).cloned().collect();
        rows.push(match pooled_mean_curve(&group) {
            Ok(p) => row(&p),
            Err(e) => KneeRow {
                dataset: ds.to_string(),
                classifier: "pooled".into(),
                outcome: Err(e.to_string()),
            },
        });
    }
    rows
}

fn opt_cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn knee_csv_bytes(rows: &[KneeRow]) -> Result<Vec<u8>> {
    csv_bytes(&KNEE_HEADER, |w| {
        for r in rows {
            w.write_record([
                r.dataset.as_str(),
                r.classifier.as_str(),
                &opt_cell(r.knee_duration()),
                &opt_cell(r.confidence()),
            ])?;
        }
        Ok(())
    })
}

pub fn knee_report_text(rows: &[KneeRow]) -> String {
    let mut out = String::from("Knee points (Kneedle, difference-curve maximum)\n\n");
    for r in rows {
        let what = match &r.outcome {
            Ok(KneeOutcome::Knee(k)) => format!("knee at {} s (confidence {:.4})", k.knee_duration, k.confidence),
            Ok(KneeOutcome::NoKnee { .. }) => "no knee (difference curve never positive)".to_string(),
            Err(e) => format!("not evaluated: {e}"),
        };
        let _ = writeln!(out, "{:<24} {:<10} {what}", r.dataset, r.classifier);
    }
    out
}

/// Reads `duration_s,value` rows.
pub fn read_reference_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for (i, rec) in read_records(path, &REFERENCE_HEADER)?.iter().enumerate() {
        if rec.len() != 2 {
            return Err(Error::Parse {
                file: path.display().to_string(),
                row: i + 2,
                column: rec.len().min(2) + 1,
                message: "expected 2 columns".into(),
            });
        }
        x.push(parse_field(path, i + 2, 1, &rec[0])?);
        y.push(parse_field(path, i + 2, 2, &rec[1])?);
    }
    Ok((x, y))
}

pub fn compare_csv_bytes(rows: &[(String, String, Correlation)]) -> Result<Vec<u8>> {
    csv_bytes(&COMPARE_HEADER, |w| {
        for (ds, clf, c) in rows {
            w.write_record([ds.as_str(), clf.as_str(), &c.n.to_string(), &c.r.to_string(), &c.p_value.to_string()])?;
        }
        Ok(())
    })
}

pub fn feature_csv_bytes(vectors: &[FeatureVector<f64>]) -> Result<Vec<u8>> {
    let width = vectors.first().map_or(0, |v| v.values.len());
    if vectors.iter().any(|v| v.values.len() != width) {
        return Err(Error::DimensionMismatch {
            expected: width,
            got: vectors.iter().map(|v| v.values.len()).find(|&l| l != width).unwrap_or(0),
        });
    }
    let mut header = vec!["subject_id".to_string(), "duration_s".to_string()];
    header.extend((0..width).map(|j| format!("f{j:03}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_bytes(&header_refs, |w| {
        for v in vectors {
            let mut rec = vec![v.subject_id.clone(), v.duration_s.to_string()];
            rec.extend(v.values.iter().map(|&x| opt_cell(x)));
            w.write_record(&rec)?;
        }
        Ok(())
    })
}

pub fn write_feature_csv(vectors: &[FeatureVector<f64>], path: &Path) -> Result<()> {
    write_atomic(path, &feature_csv_bytes(vectors)?)
}
