// SPDX-License-Identifier: Apache-2.0

use super::*;
use crate::topology::build_ttn;

fn tiny_options() -> DataOptions {
    DataOptions {
        root: PathBuf::from("/nonexistent"),
        quantum_count: 30,
        quantum_test: 10,
        quantum_qubits: 4,
        ..Default::default()
    }
}

#[test]
fn task_names_round_trip() {
    for s in ["iris12", "0or1", "gt4", "q1or10", "q2or5"] {
        assert_eq!(s.parse::<TaskSpec>().unwrap().to_string(), s);
    }
    assert_eq!(
        "q10or1".parse::<TaskSpec>().unwrap(),
        TaskSpec::Quantum { low: 1, high: 10 }
    );
    for bad in ["q3or3", "q0or2", "qxor2", "iris99"] {
        assert!(bad.parse::<TaskSpec>().is_err(), "{bad}");
    }
}

#[test]
fn hybrid_needs_exponential_map_blocks() {
    assert!(matches!(
        ClassifierSpec::new(LayoutChoice::Hybrid, Family::Simple, Field::Real),
        Err(Error::UnsupportedKind(_))
    ));
    assert!(ClassifierSpec::new(LayoutChoice::Hybrid, Family::General, Field::Complex).is_ok());
}

#[test]
fn sample_std_uses_n_minus_one() {
    let (m, s) = mean_and_std(&[2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]);
    assert_eq!(m, 5.0);
    // sum of squared deviations is 32 over 7 degrees of freedom
    assert!((s.unwrap() - (32.0f64 / 7.0).sqrt()).abs() < 1e-15);
    assert_eq!(mean_and_std(&[3.0]), (3.0, None));
}

#[test]
fn noise_grid_has_21_points() {
    let l = NoiseSweepConfig::default().lambdas().unwrap();
    assert_eq!(l.len(), 21);
    assert!((l[20] - 0.2).abs() < 1e-12);
    let bad = NoiseSweepConfig {
        lambda_step: 0.0,
        ..Default::default()
    };
    assert!(bad.lambdas().is_err());
}

#[test]
fn quantum_task_experiment_runs_and_serializes() {
    let store = DataStore::new(tiny_options());
    let task: TaskSpec = "q1or3".parse().unwrap();
    let prepared = store.prepare(task).unwrap();
    assert_eq!(prepared.data.count(Split::Test), 20);
    assert_eq!(prepared.data.count(Split::Val), 0);
    let spec = ClassifierSpec::new(LayoutChoice::Ttn, Family::General, Field::Complex).unwrap();
    let config = TrainConfig {
        max_iters: 20,
        eval_every: 5,
        ..task.default_config()
    };
    let (result, runs) = run_experiment(spec, &prepared, &config, &[0, 1]).unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(result.accuracies.len(), 2);
    assert!(result.std_dev.is_some());
    let text = result.to_json().unwrap();
    assert_eq!(
        ExperimentResult::from_json(&text)
            .unwrap()
            .to_json()
            .unwrap(),
        text
    );
    let csv = curves_csv(&[(0, &runs[0].report.curves)]);
    assert_eq!(csv.lines().count(), 1 + runs[0].report.curves.len());
}

#[test]
fn noiseless_sweep_matches_exact_labels_with_many_shots() {
    let store = DataStore::new(tiny_options());
    let prepared = store.prepare("q1or2".parse().unwrap()).unwrap();
    let model = build_ttn(4, GateKind::SimpleReal).unwrap();
    let params = crate::trainer::init_params(
        &model,
        crate::trainer::InitScheme::UniformAngles { half_range: 3.0 },
        5,
    );
    let rows = prepared.data.indices(Split::Test);
    let exact = evaluate(&model, &params, &prepared.data, &rows)
        .unwrap()
        .accuracy
        * 100.0;
    let cfg = NoiseSweepConfig {
        lambda_max: 0.0,
        shots: 100_001,
        repeats: 3,
        ..Default::default()
    };
    let pts = noise_sweep(&model, &params, &prepared.data, &rows, &cfg).unwrap();
    assert_eq!(pts.len(), 1);
    // an example flips only when its probability sits within a few 1e-3 of one half
    assert!((pts[0].mean_accuracy - exact).abs() <= 100.0 / rows.len() as f64 + 1e-9);
}

#[test]
fn entropy_histogram_shape() {
    let h = entropy_histograms(&[1, 4], 4, 20, 3, 64).unwrap();
    assert_eq!(h.len(), 2);
    assert!(h
        .iter()
        .all(|x| x.counts.len() == 64 && x.counts.iter().sum::<u64>() == 20));
    assert!(h
        .iter()
        .flat_map(|x| &x.entropies)
        .all(|&s| (0.0..=2.0 + 1e-12).contains(&s)));
    let csv = histogram_csv(&h);
    assert_eq!(
        csv.lines().next().unwrap(),
        "bin_low,bin_high,class_1,class_4"
    );
    assert_eq!(csv.lines().count(), 65);
    assert!((h[0].overlap(&h[0]) - 1.0).abs() < 1e-12);
}
