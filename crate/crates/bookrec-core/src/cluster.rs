//! Ant-colony clustering on a toroidal grid. Users are scattered over the
//! grid; ants wander, picking up objects that sit among dissimilar neighbors
//! and dropping them among similar ones, so like users accumulate into
//! spatially contiguous groups. Contiguous groups become clusters, and
//! unrated scores are predicted from the clusters nearest the target user.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ratings::{BookId, RatingMatrix, UserId};
use crate::similarity::cosine_similarity;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ClusterError {
    #[error("grid of {cells} cells cannot hold {users} users")]
    GridTooSmall { cells: usize, users: usize },
    #[error("invalid parameter: {0}")]
    InvalidParams(&'static str),
    #[error("no cluster reaches the selection threshold")]
    NoneSelected,
    #[error("cluster set is empty")]
    EmptyClusterSet,
    #[error("user {0} has no ratings")]
    UserHasNoRatings(UserId),
}

/// Tuning knobs for the ant walk. `speed` is the ant speed used by the
/// similarity formula when called directly; the engine draws each ant's own
/// speed uniformly from `(0, max_speed]` instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterParams {
    pub alpha: f64,
    pub speed: f64,
    pub max_speed: f64,
    pub patch_side: usize,
    pub k1: f64,
    pub k2: f64,
    pub iterations: usize,
    pub grid_width: usize,
    pub grid_height: usize,
    pub ant_count: usize,
    pub seed: u64,
}

impl ClusterParams {
    /// Defaults scaled to the population: a square grid with about six
    /// cells per user, one ant per three users, and an iteration budget
    /// proportional to the user count. The similarity scale `alpha` is
    /// tight because dissimilar-neighbor terms must stay strongly negative
    /// even for the fastest ants, or distinct groups fuse on the grid.
    pub fn for_users(user_count: usize, seed: u64) -> Self {
        let side = libm::ceil(libm::sqrt(6.0 * user_count as f64)) as usize;
        let side = side.max(2);
        Self {
            alpha: 0.2,
            speed: 10.0,
            max_speed: 10.0,
            patch_side: 3,
            k1: 0.1,
            k2: 0.1,
            iterations: (10_000usize.saturating_mul(user_count)).min(1_000_000),
            grid_width: side,
            grid_height: side,
            ant_count: user_count.div_ceil(3).max(1),
            seed,
        }
    }

    // Negated comparisons are deliberate: NaN parameters must fail too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    fn validate(&self, users: usize) -> Result<(), ClusterError> {
        if !(self.alpha > 0.0) {
            return Err(ClusterError::InvalidParams("alpha must be positive"));
        }
        if !(self.speed > 0.0 && self.speed <= self.max_speed) {
            return Err(ClusterError::InvalidParams("speed must lie in (0, max_speed]"));
        }
        if self.patch_side == 0 || self.patch_side.is_multiple_of(2) {
            return Err(ClusterError::InvalidParams("patch_side must be odd"));
        }
        if !(self.k1 > 0.0) {
            return Err(ClusterError::InvalidParams("k1 must be positive"));
        }
        if !(self.k2 > 0.0 && self.k2 <= 0.5) {
            return Err(ClusterError::InvalidParams("k2 must lie in (0, 0.5]"));
        }
        if self.ant_count == 0 {
            return Err(ClusterError::InvalidParams("need at least one ant"));
        }
        let cells = self.grid_width * self.grid_height;
        if cells < users {
            return Err(ClusterError::GridTooSmall { cells, users });
        }
        Ok(())
    }
}

/// One contiguous group of users. The center holds, for every book rated by
/// at least one member, the mean member rating; density is the member share
/// of the whole population.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub members: BTreeSet<UserId>,
    pub center: BTreeMap<BookId, f64>,
    pub density: f64,
}

/// Clusters partition the user set.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    pub total_users: usize,
}

/// Final grid occupancy, row-major, for trace output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSnapshot {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<(usize, usize, UserId)>,
}

/// Clusters whose selection probability reached the threshold, most
/// probable first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborClusterSelection {
    pub threshold: f64,
    pub selected: Vec<usize>,
}

fn avg_similarity(
    neighbor_dissimilarities: &[f64],
    speed: f64,
    alpha: f64,
    max_speed: f64,
    patch_side: usize,
) -> f64 {
    let discount = alpha * (1.0 + (speed - 1.0) / max_speed);
    let sum: f64 = neighbor_dissimilarities
        .iter()
        .map(|d| 1.0 - d / discount)
        .sum();
    let f = sum / (patch_side * patch_side) as f64;
    if f > 0.0 {
        f
    } else {
        0.0
    }
}

/// Average similarity of an object to its patch neighbors, clamped at 0.
/// Dissimilar neighbors contribute negative terms, so a hostile patch
/// drives the result to 0 and an empty one yields 0.
pub fn local_avg_similarity(neighbor_dissimilarities: &[f64], params: &ClusterParams) -> f64 {
    avg_similarity(
        neighbor_dissimilarities,
        params.speed,
        params.alpha,
        params.max_speed,
        params.patch_side,
    )
}

/// Pickup probability falls off quadratically as local similarity grows;
/// drop probability rises linearly until it saturates at `k2`. With
/// `k2 <= 0.5` both stay in `[0, 1]`.
pub fn pickup_drop_probabilities(f: f64, params: &ClusterParams) -> (f64, f64) {
    let ratio = params.k1 / (params.k1 + f);
    let p_pick = ratio * ratio;
    let p_drop = if f < params.k2 { 2.0 * f } else { 1.0 };
    (p_pick, p_drop)
}

/// Pairwise dissimilarity: 1 minus the cosine of the common-book rating
/// vectors; users with no common book are maximally dissimilar.
fn dissimilarity_matrix(matrix: &RatingMatrix, users: &[UserId]) -> Vec<Vec<f64>> {
    let n = users.len();
    let mut diss = alloc::vec![alloc::vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let common = matrix.common_ratings(users[i], users[j]);
            let d = if common.is_empty() {
                1.0
            } else {
                let a: Vec<f64> = common.iter().map(|&(x, _)| f64::from(x)).collect();
                let b: Vec<f64> = common.iter().map(|&(_, y)| f64::from(y)).collect();
                // Scores are at least 1, so the norms are never zero.
                1.0 - cosine_similarity(&a, &b).unwrap()
            };
            diss[i][j] = d;
            diss[j][i] = d;
        }
    }
    diss
}

struct Ant {
    x: usize,
    y: usize,
    speed: f64,
    carrying: Option<usize>,
}

struct Board<'a> {
    grid: Vec<Option<usize>>,
    width: usize,
    height: usize,
    diss: &'a [Vec<f64>],
}

impl Board<'_> {
    fn cell(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Distinct occupied patch cells around `(cx, cy)`, the center excluded.
    /// Wrapping on a small grid can alias offsets, hence the dedup.
    fn patch_dissimilarities(&self, obj: usize, cx: usize, cy: usize, patch_side: usize) -> Vec<f64> {
        let radius = (patch_side / 2) as isize;
        let mut seen = BTreeSet::new();
        let mut ds = Vec::new();
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let nx = (cx as isize + dx).rem_euclid(self.width as isize) as usize;
                let ny = (cy as isize + dy).rem_euclid(self.height as isize) as usize;
                if (nx, ny) == (cx, cy) || !seen.insert((nx, ny)) {
                    continue;
                }
                if let Some(other) = self.grid[self.cell(nx, ny)] {
                    ds.push(self.diss[obj][other]);
                }
            }
        }
        ds
    }

    fn fit(&self, obj: usize, cx: usize, cy: usize, speed: f64, params: &ClusterParams) -> f64 {
        let ds = self.patch_dissimilarities(obj, cx, cy, params.patch_side);
        avg_similarity(&ds, speed, params.alpha, params.max_speed, params.patch_side)
    }
}

fn toroidal_chebyshev(a: (usize, usize), b: (usize, usize), w: usize, h: usize) -> usize {
    let dx = a.0.abs_diff(b.0);
    let dy = a.1.abs_diff(b.1);
    dx.min(w - dx).max(dy.min(h - dy))
}

/// Runs the ant walk and returns the resulting clusters along with the final
/// grid occupancy. Deterministic for a fixed seed.
pub fn run_ant_clustering_with_trace(
    matrix: &RatingMatrix,
    params: &ClusterParams,
) -> Result<(ClusterSet, GridSnapshot), ClusterError> {
    let users: Vec<UserId> = matrix.users().collect();
    if users.is_empty() {
        return Err(ClusterError::InvalidParams("matrix has no users"));
    }
    params.validate(users.len())?;

    let diss = dissimilarity_matrix(matrix, &users);
    let (w, h) = (params.grid_width, params.grid_height);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut board = Board {
        grid: alloc::vec![None; w * h],
        width: w,
        height: h,
        diss: &diss,
    };
    let mut cell_order: Vec<usize> = (0..w * h).collect();
    cell_order.shuffle(&mut rng);
    for (obj, &cell) in cell_order.iter().take(users.len()).enumerate() {
        board.grid[cell] = Some(obj);
    }

    let mut ants: Vec<Ant> = (0..params.ant_count)
        .map(|_| Ant {
            x: rng.random_range(0..w),
            y: rng.random_range(0..h),
            // Uniform over (0, max_speed]: the open end keeps speed positive.
            speed: params.max_speed * (1.0 - rng.random::<f64>()),
            carrying: None,
        })
        .collect();

    for step in 0..params.iterations {
        let ant = &mut ants[step % params.ant_count];
        ant.x = rng.random_range(0..w);
        ant.y = rng.random_range(0..h);
        let cell = board.cell(ant.x, ant.y);
        match ant.carrying {
            None => {
                if let Some(obj) = board.grid[cell] {
                    let f = board.fit(obj, ant.x, ant.y, ant.speed, params);
                    let (p_pick, _) = pickup_drop_probabilities(f, params);
                    if rng.random_bool(p_pick) {
                        board.grid[cell] = None;
                        ant.carrying = Some(obj);
                    }
                }
            }
            Some(obj) => {
                if board.grid[cell].is_none() {
                    let f = board.fit(obj, ant.x, ant.y, ant.speed, params);
                    let (_, p_drop) = pickup_drop_probabilities(f, params);
                    if rng.random_bool(p_drop) {
                        board.grid[cell] = Some(obj);
                        ant.carrying = None;
                    }
                }
            }
        }
    }

    // Ants may end the walk still loaded; park those objects on the nearest
    // free cell so the grid holds every user.
    for ant in &mut ants {
        let Some(obj) = ant.carrying.take() else {
            continue;
        };
        let mut best: Option<(usize, usize, usize)> = None;
        for y in 0..h {
            for x in 0..w {
                if board.grid[board.cell(x, y)].is_some() {
                    continue;
                }
                let key = (toroidal_chebyshev((ant.x, ant.y), (x, y), w, h), y, x);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, y, x) = best.expect("grid holds at least as many cells as users");
        let cell = board.cell(x, y);
        board.grid[cell] = Some(obj);
    }

    let cluster_set = extract_clusters(&board, matrix, &users);
    let mut cells = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if let Some(obj) = board.grid[board.cell(x, y)] {
                cells.push((x, y, users[obj]));
            }
        }
    }
    let snapshot = GridSnapshot {
        width: w,
        height: h,
        cells,
    };
    Ok((cluster_set, snapshot))
}

/// See [`run_ant_clustering_with_trace`]; this drops the grid trace.
pub fn run_ant_clustering(
    matrix: &RatingMatrix,
    params: &ClusterParams,
) -> Result<ClusterSet, ClusterError> {
    run_ant_clustering_with_trace(matrix, params).map(|(cs, _)| cs)
}

/// Flood fill over occupied cells with toroidal 8-connectivity, visiting
/// row-major so cluster order is stable.
fn extract_clusters(board: &Board<'_>, matrix: &RatingMatrix, users: &[UserId]) -> ClusterSet {
    let (w, h) = (board.width, board.height);
    let mut visited = alloc::vec![false; w * h];
    let mut clusters = Vec::new();
    for start in 0..w * h {
        if visited[start] || board.grid[start].is_none() {
            continue;
        }
        let mut members = BTreeSet::new();
        let mut stack = alloc::vec![start];
        visited[start] = true;
        while let Some(cell) = stack.pop() {
            if let Some(obj) = board.grid[cell] {
                members.insert(users[obj]);
            }
            let (x, y) = (cell % w, cell / w);
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = (x as i64 + dx).rem_euclid(w as i64) as usize;
                    let ny = (y as i64 + dy).rem_euclid(h as i64) as usize;
                    let next = ny * w + nx;
                    if !visited[next] && board.grid[next].is_some() {
                        visited[next] = true;
                        stack.push(next);
                    }
                }
            }
        }
        clusters.push(build_cluster(members, matrix, users.len()));
    }
    ClusterSet {
        clusters,
        total_users: users.len(),
    }
}

fn build_cluster(members: BTreeSet<UserId>, matrix: &RatingMatrix, total_users: usize) -> Cluster {
    let mut sums: BTreeMap<BookId, (f64, usize)> = BTreeMap::new();
    for &user in &members {
        if let Some(ratings) = matrix.user_ratings(user) {
            for (&book, &score) in ratings {
                let entry = sums.entry(book).or_insert((0.0, 0));
                entry.0 += f64::from(score);
                entry.1 += 1;
            }
        }
    }
    let center = sums
        .into_iter()
        .map(|(book, (sum, count))| (book, sum / count as f64))
        .collect();
    let density = members.len() as f64 / total_users as f64;
    Cluster {
        members,
        center,
        density,
    }
}

/// Selection probability of every cluster for a user: density times
/// closeness to the cluster center, normalized to sum 1. Closeness is
/// `1/(1 + dist)` with `dist` the Euclidean gap over the user's rated books
/// (center entries missing a book count as 0).
pub fn cluster_selection_probabilities(
    u: UserId,
    cs: &ClusterSet,
    matrix: &RatingMatrix,
) -> Result<Vec<f64>, ClusterError> {
    if cs.clusters.is_empty() {
        return Err(ClusterError::EmptyClusterSet);
    }
    let ratings = matrix
        .user_ratings(u)
        .filter(|r| !r.is_empty())
        .ok_or(ClusterError::UserHasNoRatings(u))?;
    let weights: Vec<f64> = cs
        .clusters
        .iter()
        .map(|cluster| {
            let mut dist_sq = 0.0;
            for (&book, &score) in ratings {
                let center = cluster.center.get(&book).copied().unwrap_or(0.0);
                let gap = center - f64::from(score);
                dist_sq += gap * gap;
            }
            let sim = 1.0 / (1.0 + libm::sqrt(dist_sq));
            cluster.density * sim
        })
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|weight| weight / total).collect())
}

/// Clusters with probability at least `lambda`, most probable first, ties
/// broken toward the lower cluster id.
pub fn select_neighbor_clusters(
    u: UserId,
    cs: &ClusterSet,
    lambda: f64,
    matrix: &RatingMatrix,
) -> Result<NeighborClusterSelection, ClusterError> {
    let probabilities = cluster_selection_probabilities(u, cs, matrix)?;
    let mut chosen: Vec<(usize, f64)> = probabilities
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p >= lambda)
        .collect();
    if chosen.is_empty() {
        return Err(ClusterError::NoneSelected);
    }
    chosen.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(NeighborClusterSelection {
        threshold: lambda,
        selected: chosen.into_iter().map(|(id, _)| id).collect(),
    })
}

/// Threshold matching a uniform spread over the clusters, so any cluster at
/// least as likely as chance is selected.
pub fn default_lambda(cs: &ClusterSet) -> f64 {
    1.0 / cs.clusters.len() as f64
}

/// Predicted score from the selected clusters: the user's own rating when
/// one exists, otherwise the similarity-weighted mean of the ratings given
/// by cluster members who rated the book, clamped to the rating scale.
/// Returns 0 when nobody in the selected clusters rated the book or no
/// rater shares a rated book with the user.
pub fn predict_rating_cluster(
    u: UserId,
    book: BookId,
    sel: &NeighborClusterSelection,
    cs: &ClusterSet,
    matrix: &RatingMatrix,
) -> f64 {
    if let Some(score) = matrix.get(u, book) {
        return f64::from(score);
    }
    let mut sim_sum = 0.0;
    let mut weighted = 0.0;
    for &cluster_id in &sel.selected {
        for &member in &cs.clusters[cluster_id].members {
            if member == u {
                continue;
            }
            let Some(score) = matrix.get(member, book) else {
                continue;
            };
            let common = matrix.common_ratings(u, member);
            if common.is_empty() {
                continue;
            }
            let a: Vec<f64> = common.iter().map(|&(x, _)| f64::from(x)).collect();
            let b: Vec<f64> = common.iter().map(|&(_, y)| f64::from(y)).collect();
            let sim = cosine_similarity(&a, &b).unwrap();
            sim_sum += sim;
            weighted += sim * f64::from(score);
        }
    }
    if sim_sum == 0.0 {
        return 0.0;
    }
    let prediction = weighted / sim_sum;
    prediction.clamp(1.0, 5.0)
}
