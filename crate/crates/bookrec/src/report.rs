//! Artifact renderers. Every function is a pure value-to-string mapping so
//! identical inputs always produce byte-identical files; floats print in
//! shortest round-trip form.

use bookrec_core::blend::HitrateComparison;
use bookrec_core::cf::RecommendationList;
use bookrec_core::cluster::{ClusterSet, GridSnapshot};
use bookrec_core::{BookId, Score, UserId};
use serde_json::{json, Value};

/// Consistency findings for one internal criterion node.
#[derive(Debug, Clone)]
pub struct NodeReport {
    pub name: String,
    pub child_names: Vec<String>,
    pub local_weights: Vec<f64>,
    pub lambda_max: f64,
    pub ci: f64,
    pub ri: f64,
    pub cr: f64,
    pub acceptable: bool,
}

/// Full weighting report: per-node consistency, leaf-level global weights
/// in tree order, and the optional survey-based composite score.
#[derive(Debug, Clone)]
pub struct AhpReport {
    pub nodes: Vec<NodeReport>,
    pub leaves: Vec<(String, f64)>,
    pub composite: Option<f64>,
}

pub fn ahp_report_tsv(report: &AhpReport) -> String {
    let mut out = String::new();
    for node in &report.nodes {
        out.push_str(&format!(
            "node\t{}\t{}\t{}\t{}\t{}\n",
            node.name, node.lambda_max, node.ci, node.cr, node.acceptable
        ));
        for (child, weight) in node.child_names.iter().zip(&node.local_weights) {
            out.push_str(&format!("weight\t{}/{}\t{}\n", node.name, child, weight));
        }
    }
    for (name, weight) in &report.leaves {
        out.push_str(&format!("leaf\t{}\t{}\n", name, weight));
    }
    if let Some(score) = report.composite {
        out.push_str(&format!("score\t{}\n", score));
    }
    out
}

pub fn ahp_report_json(report: &AhpReport) -> String {
    let nodes: Vec<Value> = report
        .nodes
        .iter()
        .map(|n| {
            let weights: Vec<Value> = n
                .child_names
                .iter()
                .zip(&n.local_weights)
                .map(|(name, w)| json!({"name": name, "weight": w}))
                .collect();
            json!({
                "name": n.name,
                "lambda_max": n.lambda_max,
                "ci": n.ci,
                "ri": n.ri,
                "cr": n.cr,
                "acceptable": n.acceptable,
                "weights": weights,
            })
        })
        .collect();
    let leaves: Vec<Value> = report
        .leaves
        .iter()
        .map(|(name, w)| json!({"name": name, "weight": w}))
        .collect();
    let mut body = json!({"nodes": nodes, "leaves": leaves});
    if let Some(score) = report.composite {
        body["composite_score"] = json!(score);
    }
    pretty(&body)
}

pub fn clusters_json(cs: &ClusterSet) -> String {
    let clusters: Vec<Value> = cs
        .clusters
        .iter()
        .map(|c| {
            let members: Vec<Value> = c.members.iter().map(|&m| json!(m)).collect();
            let center: Vec<Value> = c
                .center
                .iter()
                .map(|(&book, &value)| json!([book, value]))
                .collect();
            json!({"members": members, "density": c.density, "center": center})
        })
        .collect();
    pretty(&json!({"total_users": cs.total_users, "clusters": clusters}))
}

pub fn grid_trace_tsv(grid: &GridSnapshot) -> String {
    let mut out = String::new();
    for &(x, y, user) in &grid.cells {
        out.push_str(&format!("{x}\t{y}\t{user}\n"));
    }
    out
}

/// One emitted prediction; `None` sides print as 0, which sits outside the
/// 1..=5 score scale and therefore cannot be mistaken for a prediction.
#[derive(Debug, Clone)]
pub struct PredictionRow {
    pub user: UserId,
    pub book: BookId,
    pub tag_side: Option<Score>,
    pub cluster_side: Option<f64>,
    pub final_score: Score,
}

pub fn predictions_tsv(rows: &[PredictionRow]) -> String {
    let mut out = String::new();
    for row in rows {
        let yi = row.tag_side.map_or_else(|| "0".to_string(), |v| v.to_string());
        let yj = row
            .cluster_side
            .map_or_else(|| "0".to_string(), |v| v.to_string());
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            row.user, row.book, yi, yj, row.final_score
        ));
    }
    out
}

pub fn recommendations_tsv(rec: &RecommendationList) -> String {
    let mut out = String::new();
    for &(book, score) in &rec.items {
        out.push_str(&format!("{}\t{}\t{}\n", rec.user, book, score));
    }
    out
}

pub fn hitrate_tsv(comparisons: &[HitrateComparison]) -> String {
    let mut out = String::new();
    for c in comparisons {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            c.n,
            c.ranked.mean,
            c.ranked.per_user.len()
        ));
    }
    out
}

pub fn hitrate_json(comparisons: &[HitrateComparison]) -> String {
    let rows: Vec<Value> = comparisons
        .iter()
        .map(|c| {
            let side = |report: &bookrec_core::blend::HitrateReport| {
                let per_user: Vec<Value> = report
                    .per_user
                    .iter()
                    .map(|(&user, &h)| json!([user, h]))
                    .collect();
                json!({
                    "mean": report.mean,
                    "user_count": report.per_user.len(),
                    "per_user": per_user,
                })
            };
            json!({"n": c.n, "ranked": side(&c.ranked), "unranked": side(&c.unranked)})
        })
        .collect();
    pretty(&json!({ "hitrate": rows }))
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("JSON rendering cannot fail");
    text.push('\n');
    text
}
