//! Acceptance gate: one test per release criterion, each printing a single
//! PASS/FAIL line (visible with --nocapture). Failure details land in the
//! panic message as well.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bookrec_core::ahp::{ahp_weights, compose_global_weights, consistency_check, ComparisonMatrix, WeightVector};
use bookrec_core::blend::{hitrate, hitrate_at_n, held_out_positives};
use bookrec_core::cf::{nwde_neighbors, predict_rating_cf, tag_knn_predict, RecommendationList};
use bookrec_core::cluster::{
    default_lambda, predict_rating_cluster, run_ant_clustering, select_neighbor_clusters,
    ClusterParams,
};
use bookrec_core::ratings::holdout_split;
use bookrec_core::similarity::{normalize_wde, rating_diff, shannon_entropy, weighted_diff_entropy};
use bookrec_core::synthetic::{cluster_purity, planted_clusters, preference_dataset};
use bookrec_core::{RatingMatrix, TagCatalog, UserId};

fn conclude(id: u32, failures: Vec<String>, detail: String) {
    let ok = failures.is_empty();
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {id}: {verdict} ({detail})");
    assert!(
        ok,
        "criterion {id} failed: {detail}; problems: {}",
        failures.join("; ")
    );
}

fn book_matrix() -> ComparisonMatrix {
    ComparisonMatrix::new(vec![
        vec![1.0, 2.0, 6.0],
        vec![0.5, 1.0, 3.0],
        vec![1.0 / 6.0, 1.0 / 3.0, 1.0],
    ])
    .expect("reciprocal judgment matrix")
}

#[test]
fn criterion_1_weight_derivation_reproduction() {
    let mut failures = Vec::new();

    // Warm up so the timed pass measures steady-state arithmetic.
    let _ = consistency_check(&book_matrix(), &ahp_weights(&book_matrix()));

    let start = Instant::now();
    let matrix = book_matrix();
    let weights = ahp_weights(&matrix);
    let report = consistency_check(&matrix, &weights).expect("order 3 is supported");
    let elapsed = start.elapsed();

    let expected = [0.6, 0.3, 0.1];
    for (i, (&got, &want)) in weights.values().iter().zip(&expected).enumerate() {
        if (got - want).abs() >= 1e-9 {
            failures.push(format!("weight {i}: {got} vs {want}"));
        }
    }
    if (report.lambda_max - 3.0).abs() >= 1e-9 {
        failures.push(format!("lambda_max {}", report.lambda_max));
    }
    if report.ci.abs() >= 1e-9 {
        failures.push(format!("ci {}", report.ci));
    }
    if report.cr.abs() >= 1e-9 {
        failures.push(format!("cr {}", report.cr));
    }
    if !report.acceptable {
        failures.push("not acceptable".into());
    }
    if elapsed >= Duration::from_millis(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    conclude(
        1,
        failures,
        format!(
            "weights within 1e-9 of (0.6, 0.3, 0.1), lambda_max={}, ci={}, cr={}, {elapsed:?}",
            report.lambda_max, report.ci, report.cr
        ),
    );
}

#[test]
fn criterion_2_composed_weight_table() {
    let mut failures = Vec::new();
    let first = ahp_weights(&book_matrix());
    let a = first.values();

    let groups: [&[f64]; 3] = [
        &[0.2, 0.1, 0.05, 0.05, 0.05, 0.05, 0.1],
        &[0.1, 0.1, 0.05, 0.05],
        &[0.03, 0.02, 0.04, 0.01],
    ];
    let children: Vec<WeightVector> = groups
        .iter()
        .zip(a)
        .map(|(&targets, &ai)| {
            WeightVector::new(targets.iter().map(|&t| t / ai).collect())
                .expect("reverse-derived locals sum to 1")
        })
        .collect();
    let composed = compose_global_weights(&first, &children).expect("matching shapes");
    let v = composed.values();
    let flat: Vec<f64> = groups.concat();

    // The first two groups multiply back bit-exactly; the third differs by
    // at most one ulp because the computed first-level weight is one ulp
    // under the decimal 0.1.
    for i in 0..11 {
        if v[i] != flat[i] {
            failures.push(format!("leaf {i}: {} != {}", v[i], flat[i]));
        }
    }
    for i in 11..15 {
        if (v[i] - flat[i]).abs() >= 1e-15 {
            failures.push(format!("leaf {i}: {} vs {}", v[i], flat[i]));
        }
    }
    let content: f64 = v[0..7].iter().sum();
    let price: f64 = v[7..11].iter().sum();
    let outlook: f64 = v[11..15].iter().sum();
    let total: f64 = v.iter().sum();
    if content != 0.6 {
        failures.push(format!("content sum {content}"));
    }
    if price != 0.3 {
        failures.push(format!("price sum {price}"));
    }
    if outlook != a[2] || (outlook - 0.1).abs() >= 1e-15 {
        failures.push(format!("outlook sum {outlook}"));
    }
    if total != 1.0 {
        failures.push(format!("total {total}"));
    }
    conclude(
        2,
        failures,
        format!("15 leaves; groups sum to {content}, {price}, {outlook}; total {total}"),
    );
}

#[test]
fn criterion_3_tag_knn_reproduction() {
    let mut failures = Vec::new();
    let mut matrix = RatingMatrix::new();
    let mut tags = TagCatalog::new();
    let scores = [2u8, 4, 4, 4, 4];
    for (i, &score) in scores.iter().enumerate() {
        let book = (i + 1) as u64;
        matrix.insert(1, book, score);
        tags.insert(book, vec!["novel".to_string()]);
    }
    tags.insert(100, vec!["novel".to_string()]);
    let got = tag_knn_predict(1, 100, &matrix, &tags, 5).expect("five tagged neighbors");
    if got != 4 {
        failures.push(format!("predicted {got}"));
    }
    conclude(3, failures, format!("scores {{2,4,4,4,4}} -> {got}"));
}

#[test]
fn criterion_4_entropy_oracle() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_err = 0.0f64;
    for trial in 0..1000 {
        let k = 2 + (trial % 9);
        let raw: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let reference: f64 = p.iter().map(|&x| -(x * x.log2())).sum();
        let got = shannon_entropy(&p).expect("valid distribution");
        let err = (got - reference).abs();
        max_err = max_err.max(err);
        if err >= 1e-12 {
            failures.push(format!("trial {trial}: err {err:e}"));
        }
    }
    for k in [2usize, 4, 8] {
        let p = vec![1.0 / k as f64; k];
        let got = shannon_entropy(&p).expect("uniform distribution");
        let want = (k as f64).log2();
        if got != want {
            failures.push(format!("uniform {k}: {got} != {want}"));
        }
    }
    conclude(
        4,
        failures,
        format!("1000 random distributions, max |err| {max_err:e}; uniform 2/4/8 exact"),
    );
}

#[test]
fn criterion_5_wde_nwde_suite() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    for _ in 0..50 {
        let len = rng.random_range(1..=20);
        let v: Vec<u8> = (0..len).map(|_| rng.random_range(1..=5)).collect();
        let diff = rating_diff(&v, &v).expect("equal lengths");
        let wde = weighted_diff_entropy(&diff);
        if wde != 0.0 {
            failures.push(format!("identical vectors gave {wde}"));
        }
    }

    let diff = rating_diff(&[5, 1], &[1, 5]).expect("equal lengths");
    let wde = weighted_diff_entropy(&diff);
    if wde != 2.0 {
        failures.push(format!("(4,-4) case gave {wde}"));
    }

    let scales = [0.5, 2.0, 7.25];
    let shifts = [-3.5, 0.0, 4.25];
    for trial in 0..1000usize {
        let count = 1 + (trial % 30);
        let table: BTreeMap<UserId, f64> = (1..=count as UserId)
            .map(|u| (u, rng.random_range(0.0..5.0)))
            .collect();
        let nwde = normalize_wde(&table);
        let min = table.values().cloned().fold(f64::INFINITY, f64::min);
        let max = table.values().cloned().fold(f64::NEG_INFINITY, f64::max);
        for (user, &w) in &table {
            let n = nwde[user];
            if !(0.0..=1.0).contains(&n) {
                failures.push(format!("trial {trial}: out of range {n}"));
            }
            if w == min && n != 1.0 {
                failures.push(format!("trial {trial}: min -> {n}"));
            }
            if w == max && max > min && n != 0.0 {
                failures.push(format!("trial {trial}: max -> {n}"));
            }
        }
        let scale = scales[trial % 3];
        let shift = shifts[(trial / 3) % 3];
        let moved: BTreeMap<UserId, f64> =
            table.iter().map(|(&u, &w)| (u, scale * w + shift)).collect();
        let remapped = normalize_wde(&moved);
        for (user, &n) in &nwde {
            if (n - remapped[user]).abs() >= 1e-9 {
                failures.push(format!("trial {trial}: affine drift {}", n - remapped[user]));
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    conclude(
        5,
        failures,
        "identical->0, (4,-4)->2.0, 1000 tables bounded/extremes/affine-invariant".to_string(),
    );
}

#[test]
fn criterion_6_clustering_recovery() {
    let mut failures = Vec::new();
    let mut recovered = 0;
    let mut min_purity = f64::INFINITY;
    let mut max_elapsed = Duration::ZERO;
    for seed in 0..10u64 {
        let (matrix, labels) = planted_clusters(3, 10, 5, seed);
        let params = ClusterParams::for_users(30, seed);
        let start = Instant::now();
        let cs = run_ant_clustering(&matrix, &params).expect("valid parameters");
        let elapsed = start.elapsed();
        max_elapsed = max_elapsed.max(elapsed);
        if elapsed >= Duration::from_secs(10) {
            failures.push(format!("seed {seed} took {elapsed:?}"));
        }
        let purity = cluster_purity(&cs, &labels);
        min_purity = min_purity.min(purity);
        if purity >= 0.9 {
            recovered += 1;
        }
    }
    if recovered < 8 {
        failures.push(format!("only {recovered}/10 seeds reached 0.9 purity"));
    }
    conclude(
        6,
        failures,
        format!("{recovered}/10 seeds >= 0.9 purity, min {min_purity:.3}, slowest seed {max_elapsed:?}"),
    );
}

#[test]
fn criterion_7_prediction_sanity() {
    let mut failures = Vec::new();
    let on_scale = |v: f64| v == 0.0 || (1.0..=5.0).contains(&v);

    let (matrix, _, _) = preference_dataset(50, 50, 5, 20, 11);
    let mut checked = 0usize;
    for user in matrix.users() {
        let nb = nwde_neighbors(user, &matrix, 5).expect("every user has neighbors");
        for book in matrix.books() {
            let p = predict_rating_cf(user, book, &nb, &matrix).expect("user has ratings");
            if !on_scale(p) {
                failures.push(format!("cf {user}/{book}: {p}"));
            }
            checked += 1;
        }
    }

    let cs = run_ant_clustering(&matrix, &ClusterParams::for_users(50, 11))
        .expect("valid parameters");
    let lambda = default_lambda(&cs);
    for user in matrix.users() {
        let sel = select_neighbor_clusters(user, &cs, lambda, &matrix)
            .expect("threshold selects at least one cluster");
        for book in matrix.books() {
            let p = predict_rating_cluster(user, book, &sel, &cs, &matrix);
            if !on_scale(p) {
                failures.push(format!("cluster {user}/{book}: {p}"));
            }
            checked += 1;
        }
    }

    // Shifting every score by +1 must shift mean-centered predictions by
    // exactly +1; scores stay in {2,3} so no clamping interferes.
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut base = RatingMatrix::new();
    let mut shifted = RatingMatrix::new();
    for user in 1..=50u64 {
        for book in 1..=50u64 {
            if rng.random_bool(0.5) {
                let score: u8 = if rng.random_bool(0.5) { 2 } else { 3 };
                base.insert(user, book, score);
                shifted.insert(user, book, score + 1);
            }
        }
    }
    let mut max_drift = 0.0f64;
    for user in base.users() {
        let nb = nwde_neighbors(user, &base, 5).expect("dense enough");
        let nb_shifted = nwde_neighbors(user, &shifted, 5).expect("dense enough");
        for book in base.books() {
            let p = predict_rating_cf(user, book, &nb, &base).expect("user has ratings");
            let q = predict_rating_cf(user, book, &nb_shifted, &shifted).expect("user has ratings");
            let drift = (q - (p + 1.0)).abs();
            max_drift = max_drift.max(drift);
            if drift >= 1e-9 {
                failures.push(format!("translation {user}/{book}: drift {drift:e}"));
            }
        }
        if failures.len() > 5 {
            break;
        }
    }
    conclude(
        7,
        failures,
        format!("{checked} exhaustive predictions in {{0}} U [1,5]; translation drift max {max_drift:e}"),
    );
}

#[test]
fn criterion_8_hitrate_harness() {
    let mut failures = Vec::new();

    // An oracle that recommends exactly the held-out positives must score 1.
    let (matrix, _, _) = preference_dataset(30, 40, 4, 12, 8);
    let split = holdout_split(&matrix, 0.3, 8).expect("valid fraction");
    let mut oracle_users = 0usize;
    let mut oracle_mean = 0.0f64;
    for user in split.test.users() {
        let positives = held_out_positives(&split, user);
        if positives.is_empty() {
            continue;
        }
        let rec = RecommendationList {
            user,
            items: positives.iter().map(|&b| (b, 5.0)).collect(),
        };
        let h = hitrate(&rec, &positives).expect("nonempty recommendation");
        oracle_mean += h;
        oracle_users += 1;
    }
    if oracle_users == 0 {
        failures.push("oracle cohort is empty".into());
    } else {
        oracle_mean /= oracle_users as f64;
        if oracle_mean != 1.0 {
            failures.push(format!("oracle mean {oracle_mean}"));
        }
    }

    // A uniform random recommender drawing h books out of B candidates has
    // expected hitrate h/B; the observed mean over 1000 seeded trials must
    // sit within three standard errors of it.
    let candidates: Vec<u64> = (1..=20).collect();
    let positives: BTreeSet<u64> = (1..=5).collect();
    let (n_draw, total, hits) = (5.0f64, 20.0f64, 5.0f64);
    let expected = hits / total;
    let var_overlap = n_draw * (hits / total) * (1.0 - hits / total) * ((total - n_draw) / (total - 1.0));
    let var_trial = var_overlap / (n_draw * n_draw);
    let trials = 1000usize;
    let se = (var_trial / trials as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut mean = 0.0f64;
    for _ in 0..trials {
        let mut pool = candidates.clone();
        pool.shuffle(&mut rng);
        let rec = RecommendationList {
            user: 1,
            items: pool.iter().take(5).map(|&b| (b, 3.0)).collect(),
        };
        mean += hitrate(&rec, &positives).expect("nonempty recommendation");
    }
    mean /= trials as f64;
    let deviation = (mean - expected).abs();
    if deviation > 3.0 * se {
        failures.push(format!(
            "random recommender mean {mean} vs {expected} (3se = {:.4})",
            3.0 * se
        ));
    }

    // Ranked lists must beat (or tie) the unranked id-order baseline on
    // data planted with genre preferences.
    let (pref_matrix, _, _) = preference_dataset(40, 60, 4, 20, 5);
    let pref_split = holdout_split(&pref_matrix, 0.3, 5).expect("valid fraction");
    let comparison = hitrate_at_n(&pref_split, &[3], 5);
    let ranked = comparison[0].ranked.mean;
    let unranked = comparison[0].unranked.mean;
    if ranked < unranked {
        failures.push(format!("ranked {ranked} < unranked {unranked}"));
    }

    conclude(
        8,
        failures,
        format!(
            "oracle 1.0 over {oracle_users} users; random {mean:.4} vs {expected} (3se {:.4}); ranked {ranked:.3} >= unranked {unranked:.3}",
            3.0 * se
        ),
    );
}

#[test]
fn criterion_9_byte_identical_artifacts() {
    let mut failures = Vec::new();
    let fixture = common::preference_fixture(20, 25, 4, 10, 17);
    let dir = fixture.dir.path();

    let ahp_json = r#"{
  "root": {
    "name": "book quality",
    "matrix": [[1, 2, 6], [0.5, 1, 3], [0.16666666666666666, 0.3333333333333333, 1]],
    "children": [
      {"name": "content"},
      {"name": "price"},
      {"name": "outlook"}
    ]
  },
  "membership": [
    [0.5, 0.3, 0.2, 0.0],
    [0.2, 0.5, 0.2, 0.1],
    [0.1, 0.3, 0.4, 0.2]
  ]
}"#;
    std::fs::write(dir.join("ahp.json"), ahp_json).expect("write criteria");

    let ratings = fixture.ratings.to_str().unwrap().to_string();
    let tags = fixture.tags.to_str().unwrap().to_string();
    let pairs = fixture.pairs.to_str().unwrap().to_string();

    let stages: Vec<(&str, Vec<String>, Vec<&str>)> = vec![
        (
            "ahp",
            vec!["ahp".into(), "--ahp-config".into(), "ahp.json".into()],
            vec!["ahp_report.tsv"],
        ),
        (
            "cluster",
            vec![
                "cluster".into(),
                "--ratings".into(),
                ratings.clone(),
                "--seed".into(),
                "5".into(),
            ],
            vec!["clusters.json", "grid_trace.tsv"],
        ),
        (
            "predict",
            vec![
                "predict".into(),
                "--pairs".into(),
                pairs.clone(),
                "--ratings".into(),
                ratings.clone(),
                "--tags".into(),
                tags.clone(),
                "--seed".into(),
                "5".into(),
            ],
            vec!["predictions.tsv"],
        ),
        (
            "recommend",
            vec![
                "recommend".into(),
                "--user".into(),
                "1".into(),
                "--n".into(),
                "3".into(),
                "--ratings".into(),
                ratings.clone(),
            ],
            vec!["recommendations.tsv"],
        ),
        (
            "evaluate",
            vec![
                "evaluate".into(),
                "--ratings".into(),
                ratings.clone(),
                "--n".into(),
                "1,3".into(),
                "--k".into(),
                "3".into(),
                "--seed".into(),
                "5".into(),
                "--format".into(),
                "json".into(),
            ],
            vec!["hitrate.json"],
        ),
    ];

    for (stage, args, artifacts) in &stages {
        for out_dir in ["run_a", "run_b"] {
            let output = common::bin()
                .current_dir(dir)
                .args(args)
                .arg("--output-dir")
                .arg(out_dir)
                .output()
                .expect("binary runs");
            if !output.status.success() {
                failures.push(format!(
                    "{stage} exited {:?}: {}",
                    output.status.code(),
                    String::from_utf8_lossy(&output.stderr)
                ));
            }
        }
        for artifact in artifacts {
            let a = std::fs::read(dir.join("run_a").join(artifact)).expect("artifact a");
            let b = std::fs::read(dir.join("run_b").join(artifact)).expect("artifact b");
            if a != b {
                failures.push(format!("{stage}: {artifact} differs between runs"));
            }
        }
    }
    conclude(
        9,
        failures,
        "ahp, cluster, predict, recommend, evaluate each byte-identical across two runs".to_string(),
    );
}
