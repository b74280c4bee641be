use std::collections::BTreeMap;

use basa::corpus::{is_vowel, split_sentences, syllabify, tokenize, Document};
use basa::eval::compute_metrics;
use basa::explain::{fit_discretizer, fit_local_surrogate, render_boundary, weighted_ridge, ExplainConfig};
use basa::features::{extract_all, Family, FeatureRegistry, Resources};
use basa::interpret::{combine_rankings, mdi_importances, rank_by_spearman, spearman_rho, two_sample_ttest};
use basa::lm::train_ngram;
use basa::models::{train, FeaturesPerSplit, ModelKind, TrainConfig};
use basa::{FeatureMatrix, Level};
use ndarray::Array2;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig::with_cases(n)
}

fn word() -> impl Strategy<Value = String> {
    "[a-z]{1,12}".prop_filter("needs a vowel", |w| w.chars().any(is_vowel))
}

fn level() -> impl Strategy<Value = Level> {
    (0usize..3).prop_map(|i| Level::ALL[i])
}

fn sentence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(vec!["ang", "bata", "ay", "kumain", "ng", "isda", "sa", "bahay"]), 1..8)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec((prop::collection::vec(word(), 1..9), prop::sample::select(vec![".", "!", "?"])), 1..6)
        .prop_map(|sents| {
            sents
                .into_iter()
                .map(|(words, end)| format!("{}{end}", words.join(" ")))
                .collect::<Vec<_>>()
                .join(" ")
        })
}

fn labeled_matrix(values: Vec<Vec<f64>>, labels: Vec<Level>) -> FeatureMatrix {
    let n = values.len();
    let d = values[0].len();
    let flat: Vec<f64> = values.into_iter().flatten().collect();
    FeatureMatrix::new(
        (0..n).map(|i| format!("d{i}")).collect(),
        labels,
        (0..d).map(|j| format!("f{j}")).collect(),
        Array2::from_shape_vec((n, d), flat).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(cases(128))]

    #[test]
    fn syllables_rejoin_to_the_word(w in word()) {
        let syllables = syllabify(&w).unwrap();
        let joined: String = syllables.iter().map(|s| s.text.as_str()).collect();
        prop_assert_eq!(joined, w.clone());
        prop_assert_eq!(syllables.len(), w.chars().filter(|c| is_vowel(*c)).count());
        for s in &syllables {
            prop_assert_eq!(s.pattern.matches('v').count(), 1);
            let trimmed = s.pattern.trim_start_matches('c').trim_end_matches('c');
            prop_assert_eq!(trimmed, "v");
        }
    }

    #[test]
    fn sentence_split_keeps_token_multiset(t in text()) {
        let mut whole = tokenize(&t).unwrap();
        let mut parts: Vec<String> = split_sentences(&t)
            .unwrap()
            .iter()
            .flat_map(|s| tokenize(s).unwrap())
            .collect();
        whole.sort();
        parts.sort();
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn smoothed_distributions_sum_to_one(
        texts in prop::collection::vec(sentence(), 1..12),
        order in 1usize..=3,
        alpha in 0.1f64..3.0,
    ) {
        let m = train_ngram(&texts, order, alpha, Level::L1).unwrap();
        let vocab: Vec<String> = m.vocabulary().iter().cloned().collect();
        let contexts: Vec<Vec<String>> = if order == 1 {
            vec![Vec::new()]
        } else {
            m.contexts().cloned().collect()
        };
        for ctx in contexts {
            let total: f64 = vocab.iter().map(|w| m.probability(&ctx, w)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12, "context {:?} sums to {}", ctx, total);
        }
    }

    #[test]
    fn unigram_perplexity_ignores_order(
        texts in prop::collection::vec(sentence(), 1..8),
        doc in sentence(),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let m = train_ngram(&texts, 1, 1.0, Level::L2).unwrap();
        let mut shuffled = doc.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = m.perplexity(&doc).unwrap();
        let b = m.perplexity(&shuffled).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a);
    }

    // Restricted to in-vocabulary documents: an unseen word enlarges the
    // smoothed vocabulary and can dilute the rest (see the pinned case below).
    #[test]
    fn own_tokens_never_raise_unigram_perplexity(
        texts in prop::collection::vec(sentence(), 1..8),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 1..10),
    ) {
        let seen: Vec<&String> = texts.iter().flatten().collect();
        let doc: Vec<String> = picks.iter().map(|i| i.get(&seen).to_string()).collect();
        let before = train_ngram(&texts, 1, 1.0, Level::L3).unwrap().perplexity(&doc).unwrap();
        let mut more = texts.clone();
        more.push(doc.clone());
        let after = train_ngram(&more, 1, 1.0, Level::L3).unwrap().perplexity(&doc).unwrap();
        prop_assert!(after <= before * (1.0 + 1e-12), "{} > {}", after, before);
    }
}

#[test]
fn unseen_word_can_raise_unigram_perplexity() {
    let texts = vec![vec!["ang".to_string()]];
    let doc = vec!["ang".to_string(), "bata".to_string()];
    let before = train_ngram(&texts, 1, 1.0, Level::L1).unwrap().perplexity(&doc).unwrap();
    let mut more = texts.clone();
    more.push(doc.clone());
    let after = train_ngram(&more, 1, 1.0, Level::L1).unwrap().perplexity(&doc).unwrap();
    // P = (2/3)(1/3) before and (1/2)(1/3) after
    assert!((before - 4.5f64.sqrt()).abs() < 1e-12);
    assert!((after - 6f64.sqrt()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn feature_ranges_and_duplication(t in text(), k in 2usize..4) {
        let registry = FeatureRegistry::with_families(&[Family::Trad, Family::Lex, Family::Syll, Family::Morph]);
        let resources = Resources::new(registry, None);
        let doc = Document::new("d", t.clone(), Level::L1).unwrap();
        let a = extract_all(&doc, &resources).unwrap();
        prop_assert_eq!(&a, &extract_all(&doc, &resources).unwrap());

        let ttr = a.get("ttr").unwrap();
        prop_assert!(ttr > 0.0 && ttr <= 1.0);
        let mut syll_total = 0.0;
        for (name, v) in &a.values {
            if name.ends_with("_density") || name.ends_with("_ratio") || name == "lexical_density" {
                prop_assert!((0.0..=1.0).contains(v), "{} = {}", name, v);
            }
            if resources.registry.family_of(name) == Some(Family::Syll) {
                syll_total += v;
            }
        }
        prop_assert!((syll_total - 1.0).abs() < 1e-9);

        let repeated = vec![t.as_str(); k].join(" ");
        let dup = extract_all(&Document::new("d", repeated, Level::L1).unwrap(), &resources).unwrap();
        for (name, v) in &a.values {
            let fam = resources.registry.family_of(name);
            let scale_free = name == "avg_sentence_length"
                || name == "avg_word_length"
                || name.ends_with("_density")
                || fam == Some(Family::Syll);
            if scale_free {
                let w = dup.get(name).unwrap();
                prop_assert!((v - w).abs() < 1e-9, "{}: {} vs {}", name, v, w);
            }
        }
    }

    #[test]
    fn spearman_symmetric_bounded_and_rank_based(
        pairs in prop::collection::vec((-5i32..5, -50.0f64..50.0), 3..40),
    ) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        if let (Ok(a), Ok(b)) = (spearman_rho(&x, &y), spearman_rho(&y, &x)) {
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!(a.abs() <= 1.0 + 1e-12);
            let tx: Vec<f64> = x.iter().map(|v| v.powi(3) + 2.0 * v).collect();
            let ty: Vec<f64> = y.iter().map(|v| (v / 10.0).exp()).collect();
            let c = spearman_rho(&tx, &ty).unwrap();
            prop_assert!((a - c).abs() < 1e-9);
        }
    }

    #[test]
    fn welch_t_is_antisymmetric(
        a in prop::collection::vec(-10.0f64..10.0, 2..20),
        b in prop::collection::vec(-10.0f64..10.0, 2..20),
    ) {
        if let (Ok(ab), Ok(ba)) = (two_sample_ttest(&a, &b), two_sample_ttest(&b, &a)) {
            prop_assert!((ab.t_statistic + ba.t_statistic).abs() < 1e-12);
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
        }
    }

    #[test]
    fn metrics_respect_identities(
        pairs in prop::collection::vec((level(), level()), 1..60),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let golds: Vec<Level> = pairs.iter().map(|p| p.0).collect();
        let preds: Vec<Level> = pairs.iter().map(|p| p.1).collect();
        let r = compute_metrics(&golds, &preds).unwrap();
        prop_assert_eq!(r.accuracy, r.weighted_recall);
        for m in [r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1] {
            prop_assert!((0.0..=1.0).contains(&m));
        }
        let best_f1 = r.per_class.iter().map(|c| c.f1).fold(0.0, f64::max);
        prop_assert!(r.weighted_f1 <= best_f1 + 1e-12);

        let mut shuffled = pairs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let g2: Vec<Level> = shuffled.iter().map(|p| p.0).collect();
        let p2: Vec<Level> = shuffled.iter().map(|p| p.1).collect();
        let s = compute_metrics(&g2, &p2).unwrap();
        prop_assert!((r.accuracy - s.accuracy).abs() < 1e-12);
        prop_assert!((r.weighted_precision - s.weighted_precision).abs() < 1e-12);
        prop_assert!((r.weighted_f1 - s.weighted_f1).abs() < 1e-12);
    }

    #[test]
    fn combined_size_is_union_size(
        a in prop::collection::btree_set(0usize..15, 1..10),
        b in prop::collection::btree_set(0usize..15, 1..10),
    ) {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| (0..15).map(|j| ((i * 7 + j * 3) % 11) as f64 + i as f64 * (j + 1) as f64).collect()).collect();
        let labels: Vec<Level> = (0..12).map(|i| Level::ALL[i % 3]).collect();
        let m = labeled_matrix(rows, labels);
        let full = rank_by_spearman(&m, 15).unwrap();
        let keep = |set: &std::collections::BTreeSet<usize>| {
            let mut r = full.clone();
            r.entries.retain(|e| set.contains(&e.feature[1..].parse::<usize>().unwrap()));
            r
        };
        let (ra, rb) = (keep(&a), keep(&b));
        let inter = ra.names().iter().filter(|n| rb.names().contains(n)).count();
        prop_assert_eq!(combine_rankings(&ra, &rb).len(), ra.len() + rb.len() - inter);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn importances_are_a_distribution(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 4), level()), 12..40),
        seed in any::<u64>(),
    ) {
        let labels: Vec<Level> = rows.iter().map(|r| r.1).collect();
        let mut values: Vec<Vec<f64>> = rows.iter().map(|r| r.0.clone()).collect();
        // a constant column can never be split on
        for v in &mut values {
            v.push(1.0);
        }
        let m = labeled_matrix(values, labels);
        let cfg = TrainConfig { n_trees: 5, seed, ..TrainConfig::for_kind(ModelKind::Rf) };
        let model = train(&m, &cfg).unwrap();
        let imp = mdi_importances(&model).unwrap();
        prop_assert!(imp.iter().all(|v| *v >= 0.0));
        prop_assert_eq!(imp[4], 0.0);
        let total: f64 = imp.iter().sum();
        // all zero only when every tree is a single leaf
        prop_assert!((total - 1.0).abs() < 1e-9 || total == 0.0);
    }

    #[test]
    fn unlimited_single_tree_fits_training_data(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 3), level()), 4..40),
    ) {
        let mut seen = BTreeMap::new();
        let rows: Vec<_> = rows
            .into_iter()
            .filter(|(x, _)| seen.insert(x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(), ()).is_none())
            .collect();
        let labels: Vec<Level> = rows.iter().map(|r| r.1).collect();
        let m = labeled_matrix(rows.iter().map(|r| r.0.clone()).collect(), labels.clone());
        let cfg = TrainConfig {
            n_trees: 1,
            bootstrap: false,
            max_depth: 1000,
            features_per_split: FeaturesPerSplit::All,
            ..TrainConfig::for_kind(ModelKind::Rf)
        };
        let model = train(&m, &cfg).unwrap();
        prop_assert_eq!(model.predict_matrix_z(&m).unwrap(), labels);
    }

    #[test]
    fn ridge_norm_shrinks_with_lambda(
        rows in prop::collection::vec(prop::collection::vec(0u8..2, 3), 8..30),
        targets_seed in prop::collection::vec(0.0f64..1.0, 30),
        l1 in 0.01f64..5.0,
        extra in 0.0f64..5.0,
    ) {
        let n = rows.len();
        let z = Array2::from_shape_fn((n, 3), |(i, j)| f64::from(rows[i][j]));
        let t: Vec<f64> = targets_seed[..n].to_vec();
        let w: Vec<f64> = (0..n).map(|i| 0.2 + (i % 5) as f64 * 0.2).collect();
        let norm = |lambda: f64| {
            weighted_ridge(&z, &t, &w, lambda, true)
                .map(|f| f.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt())
        };
        if let (Ok(a), Ok(b)) = (norm(l1), norm(l1 + extra)) {
            prop_assert!(b <= a + 1e-9, "{} > {}", b, a);
        }
    }

    #[test]
    fn surrogate_instance_row_and_bin_chain(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 3), level()), 12..30),
        pick in 0usize..12,
        seed in any::<u64>(),
    ) {
        let labels: Vec<Level> = rows.iter().map(|r| r.1).collect();
        let m = labeled_matrix(rows.iter().map(|r| r.0.clone()).collect(), labels);
        let d = fit_discretizer(&m.names, &m.values).unwrap();
        for name in &m.names {
            let bounds: Vec<_> = (0..4).map(|b| render_boundary(&d, name, b).unwrap()).collect();
            for pair in bounds.windows(2) {
                prop_assert_eq!(pair[0].upper, pair[1].lower);
            }
        }
        let cfg = TrainConfig { n_trees: 5, ..TrainConfig::for_kind(ModelKind::Rf) };
        let model = train(&m, &cfg).unwrap();
        let ecfg = ExplainConfig { n_samples: 200, seed, ..ExplainConfig::default() };
        let s = fit_local_surrogate(&model, m.values.row(pick), &d, Level::L2, &ecfg).unwrap();
        prop_assert!(s.binary.row(0).iter().all(|v| *v == 1.0));
        let max = s.weights.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert_eq!(s.weights[0], max);
    }
}
