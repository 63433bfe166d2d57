//! Subcommand implementations. Each one loads its inputs, drives the core
//! library, writes artifacts under the output directory, and prints a short
//! summary to stdout. All randomness flows from the resolved seed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use bookrec_core::ahp::{ahp_weights, consistency_check, ComparisonMatrix, WeightVector};
use bookrec_core::blend::blend_scores;
use bookrec_core::cf::{nwde_neighbors, tag_knn_predict, top_n_recommend};
use bookrec_core::cluster::{
    default_lambda, predict_rating_cluster, run_ant_clustering_with_trace,
    select_neighbor_clusters, NeighborClusterSelection,
};
use bookrec_core::fuzzy::{fuzzy_composite_score, GradeScale, MembershipMatrix};
use bookrec_core::ratings::holdout_split;
use bookrec_core::{RatingMatrix, Score, UserId};

use crate::config::{AhpConfig, AhpNode, ReportFormat, Resolved};
use crate::io;
use crate::report::{self, AhpReport, NodeReport, PredictionRow};
use crate::CliError;

fn ratings_path(cfg: &Resolved) -> Result<&Path, CliError> {
    cfg.ratings_path.as_deref().ok_or_else(|| {
        CliError::Usage("--ratings (or ratings_path in the config file) is required".into())
    })
}

fn load_matrix(cfg: &Resolved) -> Result<RatingMatrix, CliError> {
    let path = ratings_path(cfg)?;
    Ok(io::load_ratings(path)?.matrix)
}

fn round_half_up(value: f64) -> Score {
    (value + 0.5).floor().clamp(1.0, 5.0) as Score
}

/// Derive weights for every criterion node, report consistency, and score
/// the optional survey membership table.
pub fn run_ahp(cfg: &Resolved) -> Result<(), CliError> {
    let path = cfg.ahp_config_path.as_deref().ok_or_else(|| {
        CliError::Usage("--ahp-config (or ahp_config_path in the config file) is required".into())
    })?;
    let config = AhpConfig::load(path)?;
    let mut result = AhpReport {
        nodes: Vec::new(),
        leaves: Vec::new(),
        composite: None,
    };
    walk_criteria(&config.root, 1.0, &mut result)?;

    if let Some(rows) = &config.membership {
        if rows.len() != result.leaves.len() {
            return Err(CliError::Data(anyhow!(
                "criteria file {}: membership has {} rows but the tree has {} leaves",
                path.display(),
                rows.len(),
                result.leaves.len()
            )));
        }
        let weights: Vec<f64> = result.leaves.iter().map(|&(_, w)| w).collect();
        let weights = WeightVector::new(weights)
            .map_err(|e| CliError::Data(anyhow!("composed leaf weights are invalid: {e}")))?;
        let membership = MembershipMatrix::new(rows.clone())
            .map_err(|e| CliError::Data(anyhow!("criteria file {}: {e}", path.display())))?;
        let grades = match &config.grades {
            Some(spec) => GradeScale::new(spec.labels.clone(), spec.scores.clone())
                .map_err(|e| CliError::Data(anyhow!("criteria file {}: {e}", path.display())))?,
            None => GradeScale::standard(),
        };
        let score = fuzzy_composite_score(&weights, &membership, &grades)
            .map_err(|e| CliError::Data(anyhow!("criteria file {}: {e}", path.display())))?;
        result.composite = Some(score);
    }

    let (name, content) = match cfg.format {
        ReportFormat::Tsv => ("ahp_report.tsv", report::ahp_report_tsv(&result)),
        ReportFormat::Json => ("ahp_report.json", report::ahp_report_json(&result)),
    };
    let written = io::write_artifact(&cfg.output_dir, name, &content)?;
    eprintln!(
        "derived {} leaf weights across {} criterion nodes",
        result.leaves.len(),
        result.nodes.len()
    );
    if let Some(score) = result.composite {
        println!("composite score: {score}");
    }
    eprintln!("wrote {}", written.display());
    Ok(())
}

fn walk_criteria(node: &AhpNode, global: f64, out: &mut AhpReport) -> Result<(), CliError> {
    if node.children.is_empty() {
        out.leaves.push((node.name.clone(), global));
        return Ok(());
    }
    let cells = node.matrix.as_ref().ok_or_else(|| {
        CliError::Data(anyhow!(
            "criteria node '{}' lists children but has no comparison matrix",
            node.name
        ))
    })?;
    if cells.len() != node.children.len() {
        return Err(CliError::Data(anyhow!(
            "criteria node '{}': matrix order {} does not match its {} children",
            node.name,
            cells.len(),
            node.children.len()
        )));
    }
    let matrix = ComparisonMatrix::new(cells.clone())
        .map_err(|e| CliError::Data(anyhow!("criteria node '{}': {e}", node.name)))?;
    let weights = ahp_weights(&matrix);
    let consistency = consistency_check(&matrix, &weights)
        .map_err(|e| CliError::Data(anyhow!("criteria node '{}': {e}", node.name)))?;
    out.nodes.push(NodeReport {
        name: node.name.clone(),
        child_names: node.children.iter().map(|c| c.name.clone()).collect(),
        local_weights: weights.values().to_vec(),
        lambda_max: consistency.lambda_max,
        ci: consistency.ci,
        ri: consistency.ri,
        cr: consistency.cr,
        acceptable: consistency.acceptable,
    });
    for (child, &w) in node.children.iter().zip(weights.values()) {
        walk_criteria(child, global * w, out)?;
    }
    Ok(())
}

/// Group users by rating similarity and emit the grouping plus the final
/// grid layout it was read from.
pub fn run_cluster(cfg: &Resolved) -> Result<(), CliError> {
    let matrix = load_matrix(cfg)?;
    let params = cfg.cluster_params(matrix.user_count());
    let (cs, grid) = run_ant_clustering_with_trace(&matrix, &params)
        .map_err(|e| CliError::Data(anyhow!("clustering failed: {e}")))?;
    let clusters_path =
        io::write_artifact(&cfg.output_dir, "clusters.json", &report::clusters_json(&cs))?;
    let trace_path =
        io::write_artifact(&cfg.output_dir, "grid_trace.tsv", &report::grid_trace_tsv(&grid))?;
    eprintln!(
        "grouped {} users into {} clusters",
        cs.total_users,
        cs.clusters.len()
    );
    eprintln!("wrote {}", clusters_path.display());
    eprintln!("wrote {}", trace_path.display());
    Ok(())
}

/// Predict scores for (user, book) pairs: the tag predictor and the cluster
/// predictor each contribute when they can, and the blend falls back to
/// whichever side exists, then to the user's rounded mean.
pub fn run_predict(cfg: &Resolved, pairs_path: &Path) -> Result<(), CliError> {
    let matrix = load_matrix(cfg)?;
    let tags_path = cfg.tags_path.as_deref().ok_or_else(|| {
        CliError::Usage("--tags (or tags_path in the config file) is required".into())
    })?;
    let tags = io::load_tags(tags_path)?;
    let pairs = io::load_pairs(pairs_path)?;

    let params = cfg.cluster_params(matrix.user_count());
    let (cs, _) = run_ant_clustering_with_trace(&matrix, &params)
        .map_err(|e| CliError::Data(anyhow!("clustering failed: {e}")))?;
    let lambda = default_lambda(&cs);
    let mut selections: BTreeMap<UserId, Option<NeighborClusterSelection>> = BTreeMap::new();

    let mut rows = Vec::with_capacity(pairs.len());
    for &(line, user, book) in &pairs {
        if let Some(score) = matrix.get(user, book) {
            rows.push(PredictionRow {
                user,
                book,
                tag_side: Some(score),
                cluster_side: Some(f64::from(score)),
                final_score: score,
            });
            continue;
        }
        let tag_side = tag_knn_predict(user, book, &matrix, &tags, cfg.k).ok();
        let selection = selections
            .entry(user)
            .or_insert_with(|| select_neighbor_clusters(user, &cs, lambda, &matrix).ok());
        let cluster_side = selection
            .as_ref()
            .map(|sel| predict_rating_cluster(user, book, sel, &cs, &matrix))
            .filter(|&v| v != 0.0);
        let final_score = match (tag_side, cluster_side) {
            (Some(yi), Some(yj)) => blend_scores(yi, yj),
            (Some(yi), None) => yi,
            (None, Some(yj)) => round_half_up(yj),
            (None, None) => {
                let mean = matrix.mean_rating(user).map_err(|e| {
                    CliError::Data(anyhow!(
                        "pairs file {} line {}: {e}",
                        pairs_path.display(),
                        line
                    ))
                })?;
                round_half_up(mean)
            }
        };
        rows.push(PredictionRow {
            user,
            book,
            tag_side,
            cluster_side,
            final_score,
        });
    }

    let written =
        io::write_artifact(&cfg.output_dir, "predictions.tsv", &report::predictions_tsv(&rows))?;
    eprintln!("predicted {} pairs", rows.len());
    eprintln!("wrote {}", written.display());
    Ok(())
}

/// Rank the target user's unread books by predicted score and keep the top n.
pub fn run_recommend(cfg: &Resolved, user: UserId) -> Result<(), CliError> {
    let n = cfg.single_n()?;
    let matrix = load_matrix(cfg)?;
    let neighbors = nwde_neighbors(user, &matrix, cfg.k)
        .map_err(|e| CliError::Data(anyhow!("cannot rank neighbors: {e}")))?;
    let rec = top_n_recommend(user, n, &matrix, &neighbors)
        .map_err(|e| CliError::Data(anyhow!("cannot recommend: {e}")))?;
    let content = report::recommendations_tsv(&rec);
    let written = io::write_artifact(&cfg.output_dir, "recommendations.tsv", &content)?;
    print!("{content}");
    eprintln!("wrote {}", written.display());
    Ok(())
}

/// Hold out part of every user's ratings, recommend from the rest, and
/// report the hitrate of ranked lists against an unranked baseline.
pub fn run_evaluate(cfg: &Resolved) -> Result<(), CliError> {
    let matrix = load_matrix(cfg)?;
    let split = holdout_split(&matrix, cfg.test_fraction, cfg.seed)
        .map_err(|e| CliError::Data(anyhow!("cannot split ratings: {e}")))?;
    let comparisons = bookrec_core::blend::hitrate_at_n(&split, &cfg.n_values, cfg.k);
    let (name, content) = match cfg.format {
        ReportFormat::Tsv => ("hitrate.tsv", report::hitrate_tsv(&comparisons)),
        ReportFormat::Json => ("hitrate.json", report::hitrate_json(&comparisons)),
    };
    let written = io::write_artifact(&cfg.output_dir, name, &content)?;
    for c in &comparisons {
        println!(
            "n={}\tranked={}\tunranked={}\tusers={}",
            c.n,
            c.ranked.mean,
            c.unranked.mean,
            c.ranked.per_user.len()
        );
    }
    eprintln!("wrote {}", written.display());
    Ok(())
}

/// Paths a run may write, for callers that need to inspect artifacts.
pub fn artifact_path(cfg: &Resolved, name: &str) -> PathBuf {
    cfg.output_dir.join(name)
}
