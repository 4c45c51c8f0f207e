//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.
//!
//! Run with `cargo test -p rationale-cli --test acceptance`.

use std::collections::BTreeMap;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rationale_core::corpus::{
    generate_synthetic_corpus, Document, Label, RationaleSpan, SyntheticConfig,
};
use rationale_core::eval::{
    curves_from_scores, document_examples, prepare_folds, rationale_eval_with_models,
    rationale_identification_eval, snippet_classification_eval, snippet_test_set, word_savings,
    EvalConfig, FoldScorers, PrCurve, RecallAtKTable, RECALL_GRID_STEPS,
};
use rationale_core::model::{loss_and_gradient, train, train_with_trace, ModelKind, Params, TrainConfig};
use rationale_core::rationale::{MatchMode, Method};
use rationale_core::snippets::{
    refine_snippet, sample_negatives, window_document, ModelScorer, RefineConfig, ScoredSpan, Snippet,
    SnippetScorer, Span, WindowConfig,
};
use rationale_core::text::{SparseVector, Vocabulary};
use rationale_core::Execution;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("word-savings arithmetic", c01_word_savings),
        ("windowing oracle", c02_windowing),
        ("gradient check", c03_gradient),
        ("optimizer sanity", c04_optimizer),
        ("PR-curve oracle", c05_pr_curve),
        ("recall@K oracle and monotonicity", c06_recall_at_k),
        ("negative-sampling constraints", c07_negatives),
        ("synthetic end-to-end floor", c08_synthetic_floor),
        ("refinement invariant", c09_refinement),
        ("CLI determinism", c10_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {:>2}  {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {:>2}  {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn c01_word_savings() -> Outcome {
    let r = word_savings(970, 50, 1, 23_791, None, None).map_err(|e| e.to_string())?;
    ensure!(r.savings_per_doc_min == 920 && r.savings_per_doc_max == 920, "per doc {:?}", r);
    ensure!(r.total_savings_min == 21_887_720 && r.total_savings_max == 21_887_720, "total {:?}", r);

    let r = word_savings(970, 50, 5, 23_791, None, Some((125, 250))).map_err(|e| e.to_string())?;
    ensure!(
        (r.total_savings_min, r.total_savings_max) == (17_129_520, 20_103_395),
        "override totals {} to {}",
        r.total_savings_min,
        r.total_savings_max
    );
    ensure!(
        (r.doc_equivalents_min, r.doc_equivalents_max) == (17_659, 20_725),
        "document equivalents {} to {}",
        r.doc_equivalents_min,
        r.doc_equivalents_max
    );
    Ok("920 words/doc, 21,887,720 total; 17,129,520-20,103,395 words, 17,659-20,725 documents".into())
}

/// Every candidate window start, truncated at the end, minus candidates
/// that sit inside another candidate.
fn brute_force_windows(len: usize, n: usize) -> Vec<Span> {
    let candidates: Vec<Span> = (0..len)
        .filter(|s| s % (n / 2) == 0)
        .map(|s| Span { start: s, end: (s + n).min(len) })
        .collect();
    candidates
        .iter()
        .filter(|c| {
            !candidates
                .iter()
                .any(|d| d != *c && d.start <= c.start && c.end <= d.end)
        })
        .copied()
        .collect()
}

fn doc_of_len(id: &str, len: usize, label: Label) -> Document {
    let text: Vec<String> = (0..len).map(|i| format!("w{}", i % 97)).collect();
    Document::new(id, text.join(" "), label)
}

fn c02_windowing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let len = rng.random_range(0..=2000usize);
        let n = 2 * rng.random_range(1..=300usize);
        let doc = doc_of_len("d", len, Label::Unlabeled);
        ensure!(doc.len() == len, "document builder produced {} tokens", doc.len());
        let got: Vec<Span> = window_document(&doc, WindowConfig::new(n).map_err(|e| e.to_string())?)
            .iter()
            .map(Snippet::span)
            .collect();
        let want = brute_force_windows(len, n);
        ensure!(got == want, "trial {trial}: L={len} n={n}: {got:?} != {want:?}");

        let mut covered = vec![false; len];
        for w in &got {
            ensure!(w.start < w.end && w.end <= len && w.len() <= n, "L={len} n={n}: bad window {w:?}");
            covered[w.start..w.end].iter_mut().for_each(|c| *c = true);
        }
        ensure!(covered.iter().all(|&c| c), "L={len} n={n}: windows leave tokens uncovered");
        for pair in got.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            ensure!(b.start == a.start + n / 2, "L={len} n={n}: stride broken at {a:?} {b:?}");
            ensure!(a.end - b.start == n / 2, "L={len} n={n}: overlap of {a:?} {b:?} is not n/2");
        }
    }
    Ok("1000 random (L, n) pairs match the brute-force enumerator; coverage, stride and n/2 overlap hold".into())
}

fn c03_gradient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let dim = rng.random_range(1..=10usize);
        let n = rng.random_range(1..=40usize);
        let examples: Vec<(SparseVector, bool)> = (0..n)
            .map(|_| {
                let mut entries: Vec<(u32, f64)> = Vec::new();
                for i in 0..dim as u32 {
                    if rng.random_bool(0.6) {
                        entries.push((i, rng.random_range(-2.0..2.0)));
                    }
                }
                (SparseVector::from_entries(entries, dim).unwrap(), rng.random_bool(0.5))
            })
            .collect();
        let params = Params {
            weights: (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect(),
            intercept: rng.random_range(-2.0..2.0),
        };
        let lambda = if trial % 4 == 0 { 0.0 } else { rng.random_range(0.0..0.5) };
        let loss = |p: &Params| loss_and_gradient(&examples, p, lambda, Execution::Sequential).0;
        let (_, grad) = loss_and_gradient(&examples, &params, lambda, Execution::Sequential);

        let h = 1e-5;
        let mut analytic = grad.weights.clone();
        analytic.push(grad.intercept);
        let mut numeric = Vec::with_capacity(dim + 1);
        for j in 0..=dim {
            let (mut plus, mut minus) = (params.clone(), params.clone());
            if j < dim {
                plus.weights[j] += h;
                minus.weights[j] -= h;
            } else {
                plus.intercept += h;
                minus.intercept -= h;
            }
            numeric.push((loss(&plus) - loss(&minus)) / (2.0 * h));
        }
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let diff: Vec<f64> = analytic.iter().zip(&numeric).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&analytic).max(norm(&numeric)).max(1e-12);
        worst = worst.max(rel);
        ensure!(rel < 1e-5, "trial {trial}: relative error {rel:e} (dim {dim}, {n} examples)");
    }
    Ok(format!("100 instances, worst relative error {worst:.2e}"))
}

fn c04_optimizer() -> Outcome {
    let vocab = Vocabulary::build(&[vec!["neg", "pos"]], 1).map_err(|e| e.to_string())?;
    let v = |neg: f64, pos: f64| SparseVector::from_entries(vec![(0, neg), (1, pos)], 2).unwrap();
    let data = vec![
        (v(0.1, 0.9), true),
        (v(0.2, 0.8), true),
        (v(0.3, 0.7), true),
        (v(0.0, 1.0), true),
        (v(0.9, 0.1), false),
        (v(0.8, 0.2), false),
        (v(0.7, 0.3), false),
        (v(1.0, 0.0), false),
    ];
    let (model, trace) = train_with_trace(&data, &vocab, ModelKind::DocumentModel, &TrainConfig::default())
        .map_err(|e| e.to_string())?;
    let correct = data
        .iter()
        .filter(|(x, y)| (model.predict_proba(x).unwrap() >= 0.5) == *y)
        .count();
    ensure!(correct == 8, "training accuracy {correct}/8");
    if let Some(i) = trace.losses.windows(2).position(|w| w[1] > w[0]) {
        return Err(format!("loss rose at step {}: {:?}", i + 1, &trace.losses[i..i + 2]));
    }
    Ok(format!(
        "8/8 correct; loss {:.4} -> {:.4} over {} non-increasing steps",
        trace.losses[0],
        trace.losses.last().unwrap(),
        trace.losses.len() - 1
    ))
}

/// Confusion-matrix sweep: one point per distinct score, predicting positive
/// for every item scoring at least that much.
fn brute_force_pr(scored: &[(f64, bool)]) -> Vec<(f64, f64, f64)> {
    let positives = scored.iter().filter(|s| s.1).count() as f64;
    let mut thresholds: Vec<f64> = scored.iter().map(|s| s.0).collect();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    thresholds
        .into_iter()
        .map(|t| {
            let tp = scored.iter().filter(|s| s.0 >= t && s.1).count() as f64;
            let fp = scored.iter().filter(|s| s.0 >= t && !s.1).count() as f64;
            (t, tp / positives, tp / (tp + fp))
        })
        .collect()
}

fn interpolate(points: &[(f64, f64, f64)], recall: f64) -> f64 {
    for (i, p) in points.iter().enumerate() {
        if p.1 >= recall {
            if i == 0 {
                return p.2;
            }
            let a = points[i - 1];
            return a.2 + (recall - a.1) / (p.1 - a.1) * (p.2 - a.2);
        }
    }
    points.last().map_or(0.0, |p| p.2)
}

fn curve_matches(curve: &PrCurve, scored: &[(f64, bool)]) -> Result<(), String> {
    let want = brute_force_pr(scored);
    ensure!(curve.points.len() == want.len(), "{} points, sweep has {}", curve.points.len(), want.len());
    for (p, w) in curve.points.iter().zip(&want) {
        ensure!(
            p.threshold == Some(w.0) && p.recall == w.1 && p.precision == w.2,
            "point {p:?} differs from sweep {w:?}"
        );
    }
    Ok(())
}

fn c05_pr_curve() -> Outcome {
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let folds = rng.random_range(1..=5usize);
        let per_fold: Vec<Vec<(f64, bool)>> = (0..folds)
            .map(|_| {
                let len = rng.random_range(1..=1000usize);
                let levels = rng.random_range(2..=60u32);
                let mut s: Vec<(f64, bool)> = (0..len)
                    .map(|_| (rng.random_range(0..levels) as f64 / levels as f64, rng.random_bool(0.3)))
                    .collect();
                s[0].1 = true;
                s
            })
            .collect();
        let curves = curves_from_scores(Method::RationaleModel, &per_fold).map_err(|e| e.to_string())?;
        for (curve, scored) in curves.folds.iter().zip(&per_fold) {
            curve_matches(curve, scored).map_err(|e| format!("seed {seed}: {e}"))?;
        }
        let sweeps: Vec<_> = per_fold.iter().map(|s| brute_force_pr(s)).collect();
        ensure!(curves.averaged.points.len() == RECALL_GRID_STEPS + 1, "seed {seed}: grid size");
        for p in &curves.averaged.points {
            let want = sweeps.iter().map(|s| interpolate(s, p.recall)).sum::<f64>() / folds as f64;
            ensure!((p.precision - want).abs() < 1e-12, "seed {seed}: averaged {p:?} vs {want}");
        }
    }

    // The same check through the full snippet-classification experiment.
    let corpus = generate_synthetic_corpus(&SyntheticConfig {
        n_docs: 300,
        responsive_rate: 0.15,
        seed: 5,
        ..SyntheticConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let config = EvalConfig { seed: 5, folds: 3, ..EvalConfig::default() };
    let (filtered, folds) = prepare_folds(&corpus, &config).map_err(|e| e.to_string())?;
    let report = snippet_classification_eval(&filtered, &folds, &config).map_err(|e| e.to_string())?;
    for method_curves in &report.methods {
        for (fold, curve) in folds.iter().zip(&method_curves.folds) {
            let scorer = fold.scorer(method_curves.method);
            let scored: Vec<(f64, bool)> = snippet_test_set(&fold.test_docs(&filtered), config.seed)
                .into_iter()
                .map(|(d, span, y)| (scorer.score(d, span), y))
                .collect();
            curve_matches(curve, &scored).map_err(|e| format!("{}: {e}", method_curves.method.name()))?;
        }
    }
    Ok("50 randomized tied score sets and a 3-fold snippet experiment match the brute-force sweep".into())
}

/// Twenty documents with hand-placed rationales, plus two fixed scoring
/// tables with many ties.
fn hand_scored_corpus() -> Vec<Document> {
    let layout: [(usize, &[(usize, usize)]); 20] = [
        (40, &[(5, 20)]),
        (75, &[(60, 75)]),
        (120, &[(0, 12)]),
        (150, &[(70, 95)]),
        (210, &[(100, 112), (180, 200)]),
        (260, &[(250, 260)]),
        (300, &[(140, 190)]),
        (333, &[(11, 31)]),
        (360, &[(200, 215)]),
        (410, &[(390, 405)]),
        (450, &[(220, 280)]),
        (480, &[(47, 53)]),
        (512, &[(300, 340), (400, 420)]),
        (560, &[(555, 560)]),
        (600, &[(10, 250)]),
        (640, &[(330, 342)]),
        (700, &[(680, 690)]),
        (777, &[(390, 400)]),
        (850, &[(425, 470)]),
        (990, &[(0, 990)]),
    ];
    layout
        .iter()
        .enumerate()
        .map(|(i, (len, spans))| {
            let mut d = doc_of_len(&format!("hand-{i:02}"), *len, Label::Responsive);
            for &(s, e) in *spans {
                d.push_rationale(RationaleSpan::annotated(s, e)).unwrap();
            }
            d
        })
        .collect()
}

fn doc_index(doc: &Document) -> usize {
    doc.id[5..].parse().unwrap()
}

/// Coarse score levels so that ties are frequent.
fn table_score_a(doc: &Document, span: Span) -> f64 {
    let i = doc_index(doc);
    ((span.start * 7 + span.end * 3 + i * 11) % 5) as f64 / 4.0
}

fn table_score_b(doc: &Document, span: Span) -> f64 {
    let i = doc_index(doc);
    let centre = (span.start + span.end) / 2;
    let target = (doc.len() * ((i % 4) + 1)) / 5;
    1.0 / (1.0 + (centre.abs_diff(target) / 40) as f64)
}

fn exhaustive_recall(folds: &[Vec<&Document>], n: usize, k: usize, scorer: fn(&Document, Span) -> f64) -> f64 {
    let per_fold: Vec<f64> = folds
        .iter()
        .map(|docs| {
            let hits = docs
                .iter()
                .filter(|d| {
                    let mut ranked: Vec<(f64, Span)> =
                        brute_force_windows(d.len(), n).into_iter().map(|s| (scorer(d, s), s)).collect();
                    ranked.sort_by(|a, b| {
                        b.0.partial_cmp(&a.0)
                            .unwrap()
                            .then(a.1.start.cmp(&b.1.start))
                            .then(a.1.len().cmp(&b.1.len()))
                    });
                    ranked.iter().take(k).any(|(_, w)| {
                        d.rationales
                            .iter()
                            .any(|r| w.start < r.end_token && r.start_token < w.end)
                    })
                })
                .count();
            hits as f64 / docs.len() as f64
        })
        .collect();
    per_fold.iter().sum::<f64>() / per_fold.len() as f64
}

fn recall_monotone(table: &RecallAtKTable) -> Result<(), String> {
    for a in &table.rows {
        for b in &table.rows {
            if a.n == b.n && a.method == b.method && a.k < b.k && a.recall > b.recall {
                return Err(format!("recall drops from K={} to K={} at n={}", a.k, b.k, a.n));
            }
        }
    }
    Ok(())
}

fn c06_recall_at_k() -> Outcome {
    let docs = hand_scored_corpus();
    let ns = [2, 10, 20, 50, 100, 200, 400, 1000];
    let ks: Vec<usize> = (1..=10).collect();
    let (a, b) = (table_score_a as fn(&Document, Span) -> f64, table_score_b as fn(&Document, Span) -> f64);
    let mut checked = 0;
    for fold_count in [1usize, 4] {
        let groups: Vec<Vec<&Document>> = (0..fold_count)
            .map(|f| docs.iter().filter(|d| doc_index(d) % fold_count == f).collect())
            .collect();
        let inputs: Vec<FoldScorers> = groups
            .iter()
            .map(|g| FoldScorers {
                test_docs: g.clone(),
                scorers: vec![
                    (Method::RationaleModel, &a as &dyn SnippetScorer),
                    (Method::DocumentModel, &b as &dyn SnippetScorer),
                ],
            })
            .collect();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let table = rationale_identification_eval(&inputs, &ns, &ks, MatchMode::Overlap, exec)
                .map_err(|e| e.to_string())?;
            recall_monotone(&table)?;
            for &n in &ns {
                for &k in &ks {
                    for (method, scorer) in [(Method::RationaleModel, a), (Method::DocumentModel, b)] {
                        let want = exhaustive_recall(&groups, n, k, scorer);
                        let got = table.get(n, k, method).ok_or(format!("missing row n={n} K={k}"))?;
                        ensure!(
                            (got - want).abs() < 1e-12,
                            "{} folds, n={n} K={k} {}: {got} vs exhaustive {want}",
                            fold_count,
                            method.name()
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} (folds, n, K, method) cells match exhaustive enumeration; recall non-decreasing in K"))
}

fn c07_negatives() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let docs: Vec<Document> = (0..125)
        .map(|i| {
            let label = match i % 5 {
                0 => Label::Responsive,
                1 => Label::Unlabeled,
                _ => Label::NotResponsive,
            };
            let len = match i % 7 {
                0 => rng.random_range(0..10),
                1 => rng.random_range(10..=30),
                2 => rng.random_range(200..=300),
                _ => rng.random_range(30..=1500),
            };
            doc_of_len(&format!("n{i:03}"), len, label)
        })
        .collect();
    let eligible: Vec<&Document> = docs
        .iter()
        .filter(|d| d.label == Label::NotResponsive && d.len() >= 10)
        .collect();
    let by_id: BTreeMap<&str, &Document> = docs.iter().map(|d| (d.id.as_str(), d)).collect();
    let mut draws = 0;
    let mut seed = 0u64;
    while draws < 10_000 {
        let sample = sample_negatives(&docs, seed);
        ensure!(
            sample.snippets.len() == eligible.len(),
            "seed {seed}: {} samples for {} eligible documents",
            sample.snippets.len(),
            eligible.len()
        );
        ensure!(
            sample.skipped == docs.iter().filter(|d| d.label == Label::NotResponsive && d.len() < 10).count(),
            "seed {seed}: skipped count {}",
            sample.skipped
        );
        for (s, d) in sample.snippets.iter().zip(&eligible) {
            ensure!(s.doc_id == d.id, "seed {seed}: sample for {} where {} expected", s.doc_id, d.id);
            let doc = by_id[s.doc_id.as_str()];
            let len = s.end_token - s.start_token;
            ensure!(
                s.end_token <= doc.len() && (10..=250).contains(&len) && len <= doc.len(),
                "seed {seed}: span [{}, {}) in a {}-token document",
                s.start_token,
                s.end_token,
                doc.len()
            );
        }
        draws += sample.snippets.len();
        seed += 1;
    }
    Ok(format!("{draws} draws over {seed} seeds, one per eligible document, all within bounds"))
}

fn c08_synthetic_floor() -> Outcome {
    let corpus = generate_synthetic_corpus(&SyntheticConfig {
        n_docs: 2000,
        responsive_rate: 0.065,
        seed: 2024,
        ..SyntheticConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let config = EvalConfig {
        seed: 2024,
        window_sizes: vec![50],
        max_k: 5,
        ..EvalConfig::default()
    };
    let (filtered, folds) = prepare_folds(&corpus, &config).map_err(|e| e.to_string())?;
    let table = rationale_eval_with_models(&filtered, &folds, &config).map_err(|e| e.to_string())?;
    recall_monotone(&table)?;
    let get = |k, m| table.get(50, k, m).unwrap_or(f64::NAN);
    let (r1, r5, d1) = (get(1, Method::RationaleModel), get(5, Method::RationaleModel), get(1, Method::DocumentModel));
    let detail = format!("rationale model R@1 {r1:.3} R@5 {r5:.3}, document model R@1 {d1:.3}");
    ensure!(r1 >= 0.48 && r5 >= 0.79 && d1 >= 0.44, "{detail} below floors 0.48 / 0.79 / 0.44");
    Ok(detail)
}

fn c09_refinement() -> Outcome {
    let train_corpus = generate_synthetic_corpus(&SyntheticConfig {
        n_docs: 800,
        responsive_rate: 0.1,
        seed: 91,
        ..SyntheticConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let tokens: Vec<&[String]> = train_corpus.documents.iter().map(|d| d.tokens.as_slice()).collect();
    let vocab = Vocabulary::build(&tokens, 2).map_err(|e| e.to_string())?;
    let model = train(
        &document_examples(&train_corpus.documents, &vocab),
        &vocab,
        ModelKind::DocumentModel,
        &TrainConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let scorer = ModelScorer::new(&vocab, &model).map_err(|e| e.to_string())?;

    let docs = generate_synthetic_corpus(&SyntheticConfig {
        n_docs: 1000,
        responsive_rate: 0.3,
        seed: 92,
        ..SyntheticConfig::default()
    })
    .map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut improved, mut total_steps) = (0, 0);
    for doc in &docs.documents {
        let size = if rng.random_bool(0.5) { 200 } else { rng.random_range(2..=600usize) }.min(doc.len());
        let start = rng.random_range(0..=doc.len() - size);
        let span = Span { start, end: start + size };
        let config = RefineConfig {
            min_size: rng.random_range(2..=60),
            epsilon: 0.0,
        };
        let seed = ScoredSpan { span, score: scorer.score(doc, span) };
        let r = refine_snippet(doc, &scorer, seed, config);
        ensure!(r.best.score >= seed.score, "{}: refined score {} < seed {}", doc.id, r.best.score, seed.score);
        ensure!(span.contains(&r.best.span), "{}: refined span leaves its seed", doc.id);
        let bound = (size as f64 / config.min_size as f64).log2().floor().max(0.0) as usize;
        ensure!(r.steps <= bound, "{}: {} steps from N={size}, min {} (bound {bound})", doc.id, r.steps, config.min_size);
        ensure!(r.trajectory.windows(2).all(|w| w[1] > w[0]), "{}: trajectory not increasing", doc.id);
        improved += usize::from(r.steps > 0);
        total_steps += r.steps;
    }
    Ok(format!(
        "1000 documents; {improved} seeds improved ({total_steps} accepted steps), none lowered, step bound held"
    ))
}

fn run_cli(dir: &Path, threads: usize, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_rationale"))
        .current_dir(dir)
        .args(["--seed", "17", "--threads", &threads.to_string()])
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "`rationale {}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(())
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

fn c10_determinism() -> Outcome {
    let pipeline: &[&[&str]] = &[
        &["gen-corpus", "--out", "corpus.jsonl", "--n-docs", "600"],
        &["train", "--corpus", "corpus.jsonl", "--out-dir", "models", "--l2", "1e-7"],
        &["extract", "--corpus", "corpus.jsonl", "--models", "models", "--out", "doc.jsonl", "--report", "doc.txt", "--refine"],
        &["extract", "--corpus", "corpus.jsonl", "--models", "models", "--out", "rat.jsonl", "--method", "rationale"],
        &["eval-snippets", "--corpus", "corpus.jsonl", "--out-dir", "pr"],
        &["eval-rationales", "--corpus", "corpus.jsonl", "--out", "recall.json", "--table", "recall.txt"],
    ];
    let mut runs = Vec::new();
    for threads in [1, 1, 4] {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        for args in pipeline {
            run_cli(dir.path(), threads, args)?;
        }
        runs.push((threads, artifacts(dir.path())));
    }
    let (_, reference) = &runs[0];
    ensure!(reference.len() >= 10, "only {} artifacts written", reference.len());
    for (i, (threads, files)) in runs.iter().enumerate().skip(1) {
        ensure!(
            files.keys().eq(reference.keys()),
            "run {i} (--threads {threads}) wrote a different set of files"
        );
        for (name, bytes) in files {
            ensure!(&reference[name] == bytes, "{name} differs in run {i} (--threads {threads})");
        }
    }
    Ok(format!(
        "{} artifacts byte-identical across two --threads 1 runs and one --threads 4 run",
        reference.len()
    ))
}
