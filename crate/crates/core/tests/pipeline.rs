//! Sweep, configuration and output files end to end on small synthetic data.

use std::path::Path;

use proptest::prelude::*;
use seglen_core::analysis::{run_sweep, ConditionMode, SweepConfig};
use seglen_core::classify::{ClassifierSpec, GbtParams, MlpConfig};
use seglen_core::report::commands::SWEEP_CSV;
use seglen_core::report::svg::TOO_FEW_POINTS;
use seglen_core::report::tables::{feature_csv_bytes, read_sweep_csv, write_sweep_csv};
use seglen_core::report::{cmd_compare, cmd_plot, cmd_sweep, cmd_synth, RunConfig};
use seglen_core::signal::{generate_synthetic_dataset, load_dataset, SynthSpec};
use seglen_core::{Dataset, Error};

fn tiny_spec() -> SynthSpec {
    SynthSpec {
        n_subjects: 3,
        n_channels: 2,
        duration_s: 8.0,
        seed: 2,
        ..SynthSpec::default()
    }
}

fn fast_classifiers() -> Vec<ClassifierSpec> {
    vec![
        ClassifierSpec::knn(3),
        ClassifierSpec::Mlp(MlpConfig {
            hidden_layers: vec![8],
            epochs: 10,
            ..MlpConfig::default()
        }),
        ClassifierSpec::Gbt(GbtParams {
            n_trees: 5,
            ..GbtParams::default()
        }),
    ]
}

fn tiny_dataset() -> Dataset {
    generate_synthetic_dataset(&tiny_spec()).unwrap()
}

fn config(grid: Vec<f64>) -> SweepConfig {
    SweepConfig {
        grid,
        classifiers: fast_classifiers(),
        ..SweepConfig::default()
    }
}

#[test]
fn one_curve_per_classifier_on_the_grid() {
    let grid = vec![0.5, 1.0, 2.0];
    let curves = run_sweep(&tiny_dataset(), &config(grid.clone())).unwrap();
    let labels: Vec<&str> = curves.iter().map(|c| c.classifier.as_str()).collect();
    assert_eq!(labels, ["knn_k3", "mlp", "gbt"]);
    for c in &curves {
        assert_eq!(c.durations, grid);
        assert!(c.mean_acc.iter().all(|a| (0.0..=1.0).contains(a)));
        assert!(c.repeat_accs.iter().all(|r| r.len() == 3));
    }
}

#[test]
fn singleton_grid_gives_single_point_curves() {
    let curves = run_sweep(&tiny_dataset(), &config(vec![1.0])).unwrap();
    assert_eq!(curves.len(), 3);
    assert!(curves.iter().all(|c| c.len() == 1));
}

#[test]
fn durations_without_enough_segments_are_dropped() {
    // 8 s recordings: 5 s gives one segment per subject, 10 s gives none
    let curves = run_sweep(&tiny_dataset(), &config(vec![1.0, 2.0, 5.0, 10.0])).unwrap();
    for c in &curves {
        assert_eq!(c.durations, vec![1.0, 2.0]);
    }
}

#[test]
fn per_condition_mode_sweeps_each_condition() {
    let ds = generate_synthetic_dataset(&SynthSpec {
        conditions: vec!["open".into(), "closed".into()],
        ..tiny_spec()
    })
    .unwrap();
    let curves = run_sweep(
        &ds,
        &SweepConfig {
            condition_mode: ConditionMode::PerCondition,
            ..config(vec![1.0, 2.0])
        },
    )
    .unwrap();
    assert_eq!(curves.len(), 6);
    let datasets: Vec<&str> = curves.iter().map(|c| c.dataset.as_str()).collect();
    assert_ne!(datasets[0], datasets[3]);
}

#[test]
fn sweep_csv_round_trips() {
    let curves = run_sweep(&tiny_dataset(), &config(vec![0.5, 1.0, 2.0])).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    write_sweep_csv(&curves, &path).unwrap();
    assert_eq!(read_sweep_csv(&path).unwrap(), curves);
}

#[test]
fn feature_csv_parses_back() {
    let ds = tiny_dataset();
    let vectors = seglen_core::analysis::segment_features(&ds, 1.0, &Default::default()).unwrap();
    let bytes = feature_csv_bytes(&vectors).unwrap();
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    assert_eq!(reader.headers().unwrap().len(), 2 + 2 * 19);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), vectors.len());
    for (rec, v) in rows.iter().zip(&vectors) {
        assert_eq!(&rec[0], v.subject_id);
        for (cell, value) in rec.iter().skip(2).zip(&v.values) {
            match value {
                Some(x) => assert_eq!(cell.parse::<f64>().unwrap(), *x),
                None => assert!(cell.is_empty()),
            }
        }
    }
}

#[test]
fn synth_output_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        synth: Some(tiny_spec()),
        output_dir: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let manifest = cmd_synth(&cfg).unwrap();
    let loaded = load_dataset(&manifest).unwrap();
    let original = tiny_dataset();
    assert_eq!(loaded.recordings().len(), original.recordings().len());
    for (a, b) in loaded.recordings().iter().zip(original.recordings()) {
        assert_eq!(a.subject_id, b.subject_id);
        assert_eq!(a.data(), b.data());
    }
}

fn small_run(out: &Path, grid: Vec<f64>) -> RunConfig {
    RunConfig {
        synth: Some(tiny_spec()),
        grid,
        classifiers: fast_classifiers(),
        output_dir: out.to_path_buf(),
        export_features: true,
        ..RunConfig::default()
    }
}

#[test]
fn sweep_writes_tables_plots_and_features() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_sweep(&small_run(dir.path(), vec![0.5, 1.0, 2.0])).unwrap();
    for name in ["sweep.csv", "knee.csv", "knee.txt", "run_manifest.json", "accuracy.svg", "normalized.svg", "derivative.svg"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }
    assert_eq!(std::fs::read_dir(dir.path().join("features")).unwrap().count(), 3);
    // per-classifier knees plus the pooled row
    assert_eq!(out.knees.len(), 4);

    // the run manifest reproduces the configuration
    let again = RunConfig::load(&dir.path().join("run_manifest.json")).unwrap();
    assert_eq!(again, small_run(dir.path(), vec![0.5, 1.0, 2.0]));

    let replot = dir.path().join("replot");
    std::fs::create_dir_all(&replot).unwrap();
    let files = cmd_plot(&dir.path().join(SWEEP_CSV), &replot).unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let name = f.file_name().unwrap();
        assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(dir.path().join(name)).unwrap());
    }
}

#[test]
fn single_point_results_cannot_be_plotted() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmd_sweep(&small_run(dir.path(), vec![1.0])).unwrap();
    assert!(out.files.iter().all(|f| f.extension().unwrap() != "svg"));
    let err = cmd_plot(&dir.path().join(SWEEP_CSV), dir.path()).unwrap_err();
    assert!(err.to_string().contains(TOO_FEW_POINTS), "{err}");
}

#[test]
fn compare_against_a_reference_curve() {
    let dir = tempfile::tempdir().unwrap();
    cmd_sweep(&small_run(dir.path(), vec![0.5, 1.0, 2.0, 4.0])).unwrap();
    let reference = dir.path().join("reference.csv");
    std::fs::write(&reference, "duration_s,value\n0.25,0.3\n1,0.6\n3,0.8\n6,0.85\n").unwrap();
    let rows = cmd_compare(&dir.path().join(SWEEP_CSV), &reference, dir.path()).unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.correlation.n == 4 && (-1.0..=1.0).contains(&r.correlation.r)));
    for name in ["compare.csv", "compare.txt", "comparison.svg"] {
        assert!(dir.path().join(name).is_file(), "{name} missing");
    }

    std::fs::write(&reference, "duration_s,value\n20,0.3\n30,0.6\n").unwrap();
    assert!(matches!(
        cmd_compare(&dir.path().join(SWEEP_CSV), &reference, dir.path()),
        Err(Error::NoOverlap)
    ));
}

fn classifier_strategy() -> impl Strategy<Value = ClassifierSpec> {
    prop_oneof![
        (1usize..20).prop_map(ClassifierSpec::knn),
        (prop::collection::vec(1usize..300, 1..5), 1usize..2000, 1usize..128, any::<u64>()).prop_map(
            |(hidden_layers, epochs, batch_size, seed)| ClassifierSpec::Mlp(MlpConfig {
                hidden_layers,
                epochs,
                batch_size,
                seed,
                ..MlpConfig::default()
            })
        ),
        (1usize..500, 1usize..8, 0.01f64..1.0, any::<u64>()).prop_map(|(n_trees, max_depth, subsample, seed)| {
            ClassifierSpec::Gbt(GbtParams {
                n_trees,
                max_depth,
                subsample,
                seed,
                ..GbtParams::default()
            })
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn run_config_survives_json(
        gaps in prop::collection::vec(0.05f64..3.0, 1..19),
        clf in classifier_strategy(),
        seed in any::<u64>(),
        synth_seed in any::<u64>(),
        repeats in 1usize..10,
    ) {
        let mut d = 0.05;
        let grid: Vec<f64> = gaps.iter().map(|g| { d += g; d }).collect();
        let mut cfg = RunConfig {
            grid,
            classifiers: vec![clf],
            master_seed: seed,
            ..RunConfig::default()
        };
        cfg.protocol.repeats = repeats;
        if let Some(s) = cfg.synth.as_mut() {
            s.seed = synth_seed;
        }
        let text = cfg.to_json_pretty();
        let back = RunConfig::from_json_str(&text, Path::new("cfg.json")).unwrap();
        prop_assert_eq!(&back, &cfg);
        let manifest = serde_json::to_string(&cfg.manifest()).unwrap();
        prop_assert_eq!(RunConfig::from_json_str(&manifest, Path::new("m.json")).unwrap(), cfg);
    }
}
