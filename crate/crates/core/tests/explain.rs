use basa::explain::{explain_instance_z, fit_discretizer, ExplainConfig};
use basa::models::{train, ModelKind, TrainConfig};
use basa::{FeatureMatrix, Level};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Labels are the tertile of `a`; `b` and `c` are noise.
fn tertile_data(n: usize, seed: u64) -> FeatureMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Array2::zeros((n, 3));
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let a: f64 = rng.random_range(-2.0..2.0);
        values[[i, 0]] = a;
        values[[i, 1]] = rng.random_range(-2.0..2.0);
        values[[i, 2]] = rng.random_range(-2.0..2.0);
        labels.push(if a < -0.67 {
            Level::L1
        } else if a < 0.67 {
            Level::L2
        } else {
            Level::L3
        });
    }
    FeatureMatrix::new(
        (0..n).map(|i| format!("d{i}")).collect(),
        labels,
        vec!["a".into(), "b".into(), "c".into()],
        values,
    )
    .unwrap()
}

fn setup(kind: ModelKind) -> (basa::models::TrainedModel, FeatureMatrix, basa::explain::Discretizer) {
    let data = tertile_data(150, 7);
    let cfg = TrainConfig {
        n_trees: 30,
        ..TrainConfig::for_kind(kind)
    };
    let model = train(&data, &cfg).unwrap();
    let d = fit_discretizer(&data.names, &data.values).unwrap();
    (model, data, d)
}

#[test]
fn the_only_informative_feature_leads() {
    for kind in [ModelKind::Logreg, ModelKind::Rf] {
        let (model, data, d) = setup(kind);
        let cfg = ExplainConfig { n_samples: 2000, ..ExplainConfig::default() };
        for i in 0..10 {
            let row = data.values.row(i);
            let target = data.labels[i];
            let e = explain_instance_z(&model, &data.doc_ids[i], row, &d, target, &cfg).unwrap();
            assert_eq!(e.entries[0].condition.feature, "a", "{kind} row {i}: {:?}", e.entries);
        }
    }
}

#[test]
fn explanations_are_reproducible_and_satisfied() {
    let (model, data, d) = setup(ModelKind::Rf);
    for i in 0..20 {
        let cfg = ExplainConfig { n_samples: 500, seed: 100 + i as u64, ..ExplainConfig::default() };
        let row = data.values.row(i);
        let a = explain_instance_z(&model, "x", row, &d, Level::L2, &cfg).unwrap();
        let b = explain_instance_z(&model, "x", row, &d, Level::L2, &cfg).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
        for entry in &a.entries {
            let j = data.column_index(&entry.condition.feature).unwrap();
            assert!(entry.condition.contains(row[j]), "{:?} vs {}", entry.condition, row[j]);
        }
    }
}

#[test]
fn mismatched_discretizer_is_rejected() {
    let (model, data, _) = setup(ModelKind::Logreg);
    let two = data.select_columns(&["a", "b"]).unwrap();
    let d = fit_discretizer(&two.names, &two.values).unwrap();
    let cfg = ExplainConfig { n_samples: 50, ..ExplainConfig::default() };
    assert!(explain_instance_z(&model, "x", two.values.row(0), &d, Level::L1, &cfg).is_err());
}
