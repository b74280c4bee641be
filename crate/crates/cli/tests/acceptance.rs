//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS or FAIL line; exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use basa::eval::compute_metrics;
use basa::explain::{explain_instance_z, fit_discretizer, fit_local_surrogate, render_boundary, ExplainConfig};
use basa::interpret::{rf_global_importance, spearman_rho, two_sample_ttest};
use basa::lm::train_ngram;
use basa::models::{logreg_loss_and_gradient, train, ModelKind, TrainConfig};
use basa::synth::{generate_corpus, SynthConfig};
use basa::{FeatureMatrix, Level};
use basa_cli::config::{ExperimentConfig, SelectionMode};
use basa_cli::pipeline::{discretizer_for, run_experiment};
use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(elapsed < limit, format!("{detail}; {:.2?} (limit {limit:?})", elapsed))
}

fn levels(v: &[u8]) -> Vec<Level> {
    v.iter().map(|&n| Level::try_from(n).unwrap()).collect()
}

fn random_level(rng: &mut ChaCha8Rng) -> Level {
    Level::ALL[rng.random_range(0..3)]
}

fn matrix(values: Array2<f64>, labels: Vec<Level>) -> FeatureMatrix {
    let (n, d) = values.dim();
    FeatureMatrix::new(
        (0..n).map(|i| format!("d{i}")).collect(),
        labels,
        (0..d).map(|j| format!("f{j}")).collect(),
        values,
    )
    .unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let r = compute_metrics(&levels(&[1, 1, 2, 2, 3, 3]), &levels(&[1, 2, 2, 2, 3, 1])).map_err(|e| e.to_string())?;
    let expected = [0.6667, 0.7222, 0.6667, 0.6556];
    let got = [r.accuracy, r.weighted_precision, r.weighted_recall, r.weighted_f1];
    let hand_ok = expected.iter().zip(&got).all(|(e, g)| (e - g).abs() <= 1e-4);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut identity_ok = true;
    for _ in 0..200 {
        let n = rng.random_range(1..80);
        let golds: Vec<Level> = (0..n).map(|_| random_level(&mut rng)).collect();
        let preds: Vec<Level> = (0..n).map(|_| random_level(&mut rng)).collect();
        let r = compute_metrics(&golds, &preds).map_err(|e| e.to_string())?;
        identity_ok &= r.accuracy == r.weighted_recall;
    }
    let elapsed = start.elapsed();
    check(hand_ok && identity_ok, format!("hand case {got:.4?}; accuracy == weighted recall on 200 sets: {identity_ok}"))
        .and_then(|d| within(elapsed, Duration::from_secs(1), d))
}

/// Brute-force average ranks followed by textbook Pearson.
fn reference_spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut compared = 0;
    while compared < 100 {
        let n = rng.random_range(3..=50);
        // small integer ranges force ties
        let x: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..8))).collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(0..12)) * 0.5).collect();
        let Ok(rho) = spearman_rho(&x, &y) else {
            continue;
        };
        worst = worst.max((rho - reference_spearman(&x, &y)).abs());
        compared += 1;
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-9, format!("max |diff| {worst:.2e} over 100 tied vectors"))
        .and_then(|d| within(elapsed, Duration::from_secs(1), d))
}

fn tokens(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let m1 = train_ngram(&[tokens(&["a", "a", "b"])], 1, 1.0, Level::L1).map_err(|e| e.to_string())?;
    let p1 = m1.perplexity(&tokens(&["a", "b"])).map_err(|e| e.to_string())?;
    let m2 = train_ngram(&[tokens(&["a"])], 1, 1.0, Level::L1).map_err(|e| e.to_string())?;
    let p2 = m2.perplexity(&tokens(&["a"])).map_err(|e| e.to_string())?;
    let hand_ok = (p1 - 6f64.sqrt()).abs() <= 1e-9 && (p2 - 1.5).abs() <= 1e-9;

    let words = ["ang", "bata", "ay", "kumain", "ng", "isda", "sa", "bahay", "mabait", "siya", "at", "aso"];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut corpus = Vec::new();
    let mut total = 0;
    while total < 1000 {
        let len = rng.random_range(1..=12).min(1000 - total);
        corpus.push((0..len).map(|_| words[rng.random_range(0..words.len())].to_string()).collect::<Vec<_>>());
        total += len;
    }
    let mut worst = 0.0f64;
    let mut contexts = 0;
    for order in 1..=3 {
        let m = train_ngram(&corpus, order, 1.0, Level::L2).map_err(|e| e.to_string())?;
        let vocab: Vec<String> = m.vocabulary().iter().cloned().collect();
        let ctxs: Vec<Vec<String>> = if order == 1 { vec![Vec::new()] } else { m.contexts().cloned().collect() };
        for ctx in ctxs {
            let sum: f64 = vocab.iter().map(|w| m.probability(&ctx, w)).sum();
            worst = worst.max((sum - 1.0).abs());
            contexts += 1;
        }
    }
    let elapsed = start.elapsed();
    check(
        hand_ok && worst <= 1e-12,
        format!("PP {p1:.10} (sqrt 6) and {p2:.10} (1.5); max |sum - 1| {worst:.1e} over {contexts} contexts"),
    )
    .and_then(|d| within(elapsed, Duration::from_secs(1), d))
}

/// Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col].clone();
            for (v, p) in a[row].iter_mut().zip(&pivot_row).skip(col) {
                *v -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Closed-form weighted ridge with an unpenalized intercept in slot 0.
fn reference_ridge(z: &Array2<f64>, y: &[f64], w: &[f64], lambda: f64) -> Vec<f64> {
    let (n, d) = z.dim();
    let p = d + 1;
    let row = |i: usize| -> Vec<f64> { std::iter::once(1.0).chain(z.row(i).iter().copied()).collect() };
    let mut a = vec![vec![0.0; p]; p];
    let mut b = vec![0.0; p];
    for i in 0..n {
        let r = row(i);
        for j in 0..p {
            b[j] += w[i] * r[j] * y[i];
            for k in 0..p {
                a[j][k] += w[i] * r[j] * r[k];
            }
        }
    }
    for (j, a_row) in a.iter_mut().enumerate().skip(1) {
        a_row[j] += lambda;
    }
    solve_dense(a, b)
}

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, d: usize) -> FeatureMatrix {
    let values = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
    let labels = (0..n)
        .map(|i| {
            let s = values[[i, 0]] + 0.5 * values[[i, d - 1]] + rng.random_range(-0.5..0.5);
            if s < -0.6 {
                Level::L1
            } else if s < 0.6 {
                Level::L2
            } else {
                Level::L3
            }
        })
        .collect();
    matrix(values, labels)
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for run in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(400 + run);
        let d = rng.random_range(2..=8);
        let data = random_dataset(&mut rng, 60, d);
        let kind = if run % 2 == 0 { ModelKind::Logreg } else { ModelKind::Rf };
        let cfg = TrainConfig { n_trees: 20, epochs: 200, seed: run, ..TrainConfig::for_kind(kind) };
        let model = train(&data, &cfg).map_err(|e| e.to_string())?;
        let disc = fit_discretizer(&data.names, &data.values).map_err(|e| e.to_string())?;
        let ecfg = ExplainConfig { n_samples: 200, top_k: d, lambda: 1.0, seed: run, kernel_width: None };
        let row = data.values.row(rng.random_range(0..60));
        let target = random_level(&mut rng);
        let surrogate = fit_local_surrogate(&model, row, &disc, target, &ecfg).map_err(|e| e.to_string())?;
        let beta = reference_ridge(&surrogate.binary, &surrogate.targets, &surrogate.weights, ecfg.lambda);
        let e = explain_instance_z(&model, "x", row, &disc, target, &ecfg).map_err(|e| e.to_string())?;
        worst = worst.max((e.intercept - beta[0]).abs());
        for entry in &e.entries {
            let j = data.column_index(&entry.condition.feature).map_err(|e| e.to_string())?;
            worst = worst.max((entry.weight - beta[j + 1]).abs());
        }
        for (j, c) in surrogate.fit.coefficients.iter().enumerate() {
            worst = worst.max((c - beta[j + 1]).abs());
        }
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-6, format!("max |coef - closed form| {worst:.2e} over 50 runs"))
        .and_then(|d| within(elapsed, Duration::from_secs(10), d))
}

fn gini(counts: &[usize; 3]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|&c| (c as f64 / n as f64).powi(2)).sum::<f64>()
}

/// Best impurity decrease per feature by enumerating every threshold.
fn best_decreases(x: &Array2<f64>, y: &[Level]) -> Vec<f64> {
    let n = y.len();
    let mut all = [0usize; 3];
    for l in y {
        all[l.index()] += 1;
    }
    (0..x.ncols())
        .map(|j| {
            let mut best = 0.0f64;
            for t in x.column(j).iter() {
                let (mut left, mut right) = ([0usize; 3], [0usize; 3]);
                for i in 0..n {
                    if x[[i, j]] <= *t { left[y[i].index()] += 1 } else { right[y[i].index()] += 1 }
                }
                let (nl, nr) = (left.iter().sum::<usize>() as f64, right.iter().sum::<usize>() as f64);
                if nl == 0.0 || nr == 0.0 {
                    continue;
                }
                best = best.max(gini(&all) - (nl * gini(&left) + nr * gini(&right)) / n as f64);
            }
            best
        })
        .collect()
}

fn criterion_5() -> Outcome {
    let values = Array2::from_shape_vec((6, 2), vec![0.0, 5.0, 0.0, 5.0, 0.0, 5.0, 1.0, 5.0, 1.0, 5.0, 1.0, 5.0]).unwrap();
    let labels = levels(&[1, 1, 1, 3, 3, 3]);
    let oracle = best_decreases(&values, &labels);
    let stump = matrix(values, labels);
    let cfg = TrainConfig { n_trees: 10, max_depth: 1, ..TrainConfig::for_kind(ModelKind::Rf) };
    let model = train(&stump, &cfg).map_err(|e| e.to_string())?;
    let ranking = rf_global_importance(&model, Some(&stump), 2).map_err(|e| e.to_string())?;
    let score = |name: &str| ranking.entries.iter().find(|e| e.feature == name).map(|e| e.score);
    let (a, b) = (score("f0"), score("f1"));
    let oracle_ok = oracle[0] == 0.5 && oracle[1] == 0.0;
    let stump_ok = a == Some(1.0) && b == Some(0.0);

    let mut random_ok = true;
    for run in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + run);
        let data = random_dataset(&mut rng, 80, 5);
        let cfg = TrainConfig { n_trees: 15, seed: run, ..TrainConfig::for_kind(ModelKind::Rf) };
        let model = train(&data, &cfg).map_err(|e| e.to_string())?;
        let r = rf_global_importance(&model, None, 5).map_err(|e| e.to_string())?;
        let sum: f64 = r.entries.iter().map(|e| e.score).sum();
        random_ok &= r.entries.iter().all(|e| e.score >= 0.0) && (sum - 1.0).abs() <= 1e-9;
    }
    check(
        oracle_ok && stump_ok && random_ok,
        format!("stump (A, B) = ({a:?}, {b:?}), enumeration oracle {oracle:?}; 20 random datasets valid: {random_ok}"),
    )
}

/// Mean cross-entropy plus (lambda / 2) * ||W||^2, written out directly.
fn reference_loss(w: &Array2<f64>, b: &Array1<f64>, x: &Array2<f64>, y: &[Level], lambda: f64) -> f64 {
    let mut loss = 0.0;
    for (i, label) in y.iter().enumerate() {
        let scores: Vec<f64> = (0..3).map(|k| b[k] + (0..x.ncols()).map(|j| w[[k, j]] * x[[i, j]]).sum::<f64>()).collect();
        let z: f64 = scores.iter().map(|s| s.exp()).sum();
        loss -= (scores[label.index()].exp() / z).ln();
    }
    loss / y.len() as f64 + 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>()
}

fn criterion_6() -> Outcome {
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut loss_gap = 0.0f64;
    for run in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + run);
        let d = rng.random_range(1..=10);
        let n = rng.random_range(5..30);
        let x = Array2::from_shape_fn((n, d), |_| rng.random_range(-2.0..2.0));
        let y: Vec<Level> = (0..n).map(|_| random_level(&mut rng)).collect();
        let w = Array2::from_shape_fn((3, d), |_| rng.random_range(-1.0..1.0));
        let b = Array1::from_shape_fn(3, |_| rng.random_range(-1.0..1.0));
        let lambda = rng.random_range(0.0..0.1);
        let (loss, gw, gb) = logreg_loss_and_gradient(&w, &b, &x, &y, lambda);
        loss_gap = loss_gap.max((loss - reference_loss(&w, &b, &x, &y, lambda)).abs());
        let f = |w: &Array2<f64>, b: &Array1<f64>| reference_loss(w, b, &x, &y, lambda);
        let (mut diff2, mut norm2) = (0.0, 0.0);
        for k in 0..3 {
            for j in 0..d {
                let (mut wp, mut wm) = (w.clone(), w.clone());
                wp[[k, j]] += h;
                wm[[k, j]] -= h;
                let fd = (f(&wp, &b) - f(&wm, &b)) / (2.0 * h);
                diff2 += (gw[[k, j]] - fd).powi(2);
                norm2 += fd.powi(2);
            }
            let (mut bp, mut bm) = (b.clone(), b.clone());
            bp[k] += h;
            bm[k] -= h;
            let fd = (f(&w, &bp) - f(&w, &bm)) / (2.0 * h);
            diff2 += (gb[k] - fd).powi(2);
            norm2 += fd.powi(2);
        }
        worst = worst.max((diff2 / norm2.max(1e-300)).sqrt());
    }
    check(
        worst < 1e-5 && loss_gap < 1e-12,
        format!("max relative gradient error {worst:.2e}; loss vs reference {loss_gap:.1e}"),
    )
}

fn default_config() -> ExperimentConfig {
    ExperimentConfig { explain_count: 0, ..ExperimentConfig::default() }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let corpus = generate_corpus(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let mut sums = [0.0; 3];
    for s in 0..5 {
        let cfg = ExperimentConfig { seed: 42 + s, ..default_config() };
        let exp = run_experiment(&cfg, &corpus).map_err(|e| e.to_string())?;
        for o in &exp.outcomes {
            let slot = match o.mode {
                SelectionMode::Spearman => 0,
                SelectionMode::Global => 1,
                SelectionMode::Combined => 2,
                SelectionMode::All => continue,
            };
            sums[slot] += o.metrics.accuracy / 5.0;
        }
    }
    let [corr, global, combined] = sums;
    let elapsed = start.elapsed();
    check(
        combined >= global && global >= corr - 0.02 && combined > corr,
        format!("mean accuracy Corr {corr:.4}, Global {global:.4}, Combined {combined:.4}"),
    )
    .and_then(|d| within(elapsed, Duration::from_secs(120), d))
}

fn criterion_8() -> Outcome {
    let corpus = generate_corpus(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let exp = run_experiment(&default_config(), &corpus).map_err(|e| e.to_string())?;
    let rf = exp.globals.iter().find(|g| g.kind == ModelKind::Rf).ok_or("no RF ranking")?;
    let top3 = rf.ranking.names().into_iter().take(3).collect::<Vec<_>>();
    let t = exp.word_count_ttest.ok_or("word_count t-test unavailable")?;
    // the pipeline's t-test must agree with one on the raw training column
    let j = exp.data.train_raw.column_index("word_count").map_err(|e| e.to_string())?;
    let pick = |level: Level| -> Vec<f64> {
        exp.data.train_raw.labels.iter().zip(exp.data.train_raw.column(j)).filter(|(l, _)| **l == level).map(|(_, v)| *v).collect()
    };
    let direct = two_sample_ttest(&pick(Level::L1), &pick(Level::L3)).map_err(|e| e.to_string())?;
    check(
        top3.iter().any(|n| n == "word_count") && t.p_value < 0.05 && direct.p_value == t.p_value,
        format!("RF top-3 {top3:?}; word_count L1 vs L3 t = {:.3}, p = {:.2e}", t.t_statistic, t.p_value),
    )
}

fn criterion_9() -> Outcome {
    let corpus = generate_corpus(&SynthConfig::default()).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig { explain_count: 50, ..ExperimentConfig::default() };
    let exp = run_experiment(&cfg, &corpus).map_err(|e| e.to_string())?;
    let outcome = &exp.outcomes[exp.explained.ok_or("nothing explained")?];
    let disc = discretizer_for(&exp.data, &outcome.features).map_err(|e| e.to_string())?;
    let test = exp.data.test_z.select_columns(&outcome.features).map_err(|e| e.to_string())?;
    let (mut conditions, mut violations, mut chain_breaks, mut mismatched) = (0, 0, 0, 0);
    for name in &disc.names {
        let bounds: Vec<_> = (0..4).map(|b| render_boundary(&disc, name, b)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        chain_breaks += bounds.windows(2).filter(|p| p[0].upper != p[1].lower).count();
    }
    for (n, e) in exp.explanations.iter().enumerate() {
        let row = test.values.row(n);
        for entry in &e.entries {
            let j = test.column_index(&entry.condition.feature).map_err(|e| e.to_string())?;
            conditions += 1;
            if !entry.condition.contains(row[j]) {
                violations += 1;
            }
        }
        let ecfg = basa_cli::pipeline::explain_config(&cfg, cfg.explain_seed() + n as u64);
        let again = explain_instance_z(&outcome.model, &e.doc_id, row, &disc, e.target, &ecfg).map_err(|e| e.to_string())?;
        if again.to_json().map_err(|e| e.to_string())? != e.to_json().map_err(|e| e.to_string())? {
            mismatched += 1;
        }
    }
    check(
        exp.explanations.len() == 50 && violations == 0 && chain_breaks == 0 && mismatched == 0,
        format!(
            "{} explanations, {conditions} conditions, {violations} unsatisfied, {chain_breaks} chain breaks, {mismatched} non-identical reruns",
            exp.explanations.len()
        ),
    )
}

fn run_binary(out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_basa"))
        .args(["run", "--out"])
        .arg(out)
        .env("RUST_LOG", "error")
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    check(status.success(), format!("run exited with {status}")).map(|_| ())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_binary(&a)?;
    run_binary(&b)?;
    let mut files = vec!["metrics.csv".to_string(), "rankings.csv".to_string()];
    let mut explanations: Vec<String> = std::fs::read_dir(a.join("explanations"))
        .map_err(|e| e.to_string())?
        .map(|e| format!("explanations/{}", e.unwrap().file_name().to_string_lossy()))
        .collect();
    explanations.sort();
    let n_explanations = explanations.len();
    files.extend(explanations);
    let differing: Vec<&String> = files
        .iter()
        .filter(|f| std::fs::read(a.join(f)).ok() != std::fs::read(b.join(f)).ok() || !b.join(f).exists())
        .collect();
    check(
        differing.is_empty() && n_explanations > 0,
        format!("{} files compared ({n_explanations} explanation files), differing: {differing:?}", files.len()),
    )
}

/// Student t CDF for four degrees of freedom, in closed form.
fn t4_cdf(t: f64) -> f64 {
    let s = t / (4.0 + t * t).sqrt();
    0.5 + 0.75 * s * (1.0 - s * s / 3.0)
}

fn criterion_11() -> Outcome {
    let r = two_sample_ttest(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).map_err(|e| e.to_string())?;
    let oracle_p = 2.0 * (1.0 - t4_cdf(r.t_statistic.abs()));
    check(
        (r.t_statistic + 3.6742).abs() <= 1e-4
            && (r.degrees_of_freedom - 4.0).abs() <= 1e-9
            && (r.p_value - 0.0214).abs() <= 1e-3
            && (r.p_value - oracle_p).abs() <= 1e-9,
        format!(
            "t = {:.4}, df = {:.4}, p = {:.4} (closed-form t4 p = {:.4})",
            r.t_statistic, r.degrees_of_freedom, r.p_value, oracle_p
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("metrics oracle", criterion_1),
        ("spearman oracle", criterion_2),
        ("perplexity oracle", criterion_3),
        ("ridge oracle", criterion_4),
        ("importance oracle", criterion_5),
        ("logreg gradient check", criterion_6),
        ("selection comparison ordering", criterion_7),
        ("word_count importance and t-test", criterion_8),
        ("explanation invariants", criterion_9),
        ("run determinism", criterion_10),
        ("t-test oracle", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {:>2} {name}: {detail}", i + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
