//! Seeded K-means (k-means++ initialisation, Lloyd iterations) over the
//! numeric attribute codes.
//!
//! Features are `(severity, priority, component, os)` codes taken as reals;
//! the assignee code is left out because it is the prediction target.

use std::collections::{BTreeMap, HashSet};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::BugRecord;

pub const DIMENSIONS: usize = 4;

pub const DEFAULT_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FeatureVector(pub [f64; DIMENSIONS]);

impl FeatureVector {
    pub fn from_record(record: &BugRecord) -> Self {
        FeatureVector([
            f64::from(record.severity),
            f64::from(record.priority),
            f64::from(record.component),
            f64::from(record.operating_system),
        ])
    }

    pub fn squared_distance(&self, other: &FeatureVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn bits(&self) -> [u64; DIMENSIONS] {
        self.0.map(f64::to_bits)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterModel {
    pub k: usize,
    pub seed: u64,
    pub centroids: Vec<FeatureVector>,
    /// Cluster index for each input point, by position.
    pub assignments: Vec<usize>,
    pub inertia: f64,
    pub iterations_run: usize,
    /// Inertia after seeding, then after each Lloyd iteration.
    pub inertia_history: Vec<f64>,
}

impl ClusterModel {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.assignments {
            sizes[c] += 1;
        }
        sizes
    }

    /// Sum of squared distances recomputed from the assignments.
    pub fn recompute_inertia(&self, points: &[FeatureVector]) -> f64 {
        points
            .iter()
            .zip(&self.assignments)
            .map(|(p, &c)| p.squared_distance(&self.centroids[c]))
            .sum()
    }

    /// JSON document for `clusters.json`, with assignments keyed by bug id.
    pub fn to_json(&self, records: &[BugRecord]) -> Result<String> {
        #[derive(Serialize)]
        struct Doc<'a> {
            k: usize,
            seed: u64,
            iterations_run: usize,
            inertia: f64,
            centroids: &'a [FeatureVector],
            sizes: Vec<usize>,
            assignments: BTreeMap<&'a str, usize>,
        }
        if records.len() != self.assignments.len() {
            return Err(Error::Consistency(format!(
                "{} records but {} assignments",
                records.len(),
                self.assignments.len()
            )));
        }
        let doc = Doc {
            k: self.k,
            seed: self.seed,
            iterations_run: self.iterations_run,
            inertia: self.inertia,
            centroids: &self.centroids,
            sizes: self.cluster_sizes(),
            assignments: records
                .iter()
                .map(|r| r.bug_id.as_str())
                .zip(self.assignments.iter().copied())
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

fn nearest(point: &FeatureVector, centroids: &[FeatureVector]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centroids.iter().enumerate() {
        let d = point.squared_distance(c);
        // strict: the lowest index wins ties
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

fn assign(points: &[FeatureVector], centroids: &[FeatureVector]) -> Vec<usize> {
    points.par_iter().map(|p| nearest(p, centroids).0).collect()
}

fn inertia(points: &[FeatureVector], centroids: &[FeatureVector], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &c)| p.squared_distance(&centroids[c]))
        .sum()
}

fn means(
    points: &[FeatureVector],
    assignments: &[usize],
    previous: &[FeatureVector],
) -> Vec<FeatureVector> {
    let k = previous.len();
    let mut sums = vec![[0.0; DIMENSIONS]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignments) {
        counts[c] += 1;
        for (s, v) in sums[c].iter_mut().zip(&p.0) {
            *s += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .zip(previous)
        .map(|((sum, n), prev)| {
            if n == 0 {
                *prev
            } else {
                FeatureVector(sum.map(|s| s / n as f64))
            }
        })
        .collect()
}

fn kmeans_plus_plus(
    points: &[FeatureVector],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<FeatureVector> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())]);
    let mut weights: Vec<f64> = points
        .iter()
        .map(|p| p.squared_distance(&centroids[0]))
        .collect();
    while centroids.len() < k {
        // Feasibility was checked up front, so some point is still uncovered.
        let dist = WeightedIndex::new(&weights).expect("positive total weight");
        let chosen = points[dist.sample(rng)];
        for (w, p) in weights.iter_mut().zip(points) {
            *w = w.min(p.squared_distance(&chosen));
        }
        centroids.push(chosen);
    }
    centroids
}

/// Re-seeds every empty cluster at the point farthest from its centroid.
/// Returns false if repair could not make all clusters non-empty.
fn repair_empty(
    points: &[FeatureVector],
    centroids: &mut [FeatureVector],
    assignments: &mut Vec<usize>,
) -> bool {
    let k = centroids.len();
    for _ in 0..=k * 2 {
        let mut sizes = vec![0usize; k];
        for &c in assignments.iter() {
            sizes[c] += 1;
        }
        let Some(empty) = sizes.iter().position(|&n| n == 0) else {
            return true;
        };
        let (far, _) = points
            .iter()
            .zip(assignments.iter())
            .enumerate()
            .filter(|(_, (_, &c))| sizes[c] > 1)
            .map(|(i, (p, &c))| (i, p.squared_distance(&centroids[c])))
            .fold((usize::MAX, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
        if far == usize::MAX {
            return false;
        }
        centroids[empty] = points[far];
        *assignments = assign(points, centroids);
    }
    false
}

fn distinct_count(points: &[FeatureVector]) -> usize {
    points
        .iter()
        .map(FeatureVector::bits)
        .collect::<HashSet<_>>()
        .len()
}

/// Partitions `points` into `k` clusters.
///
/// Seeding is k-means++ driven by a ChaCha8 generator seeded with `seed`.
/// Iteration stops at the first assignment fixpoint or after
/// `max_iterations` Lloyd steps, whichever comes first.
pub fn kmeans_fit(
    points: &[FeatureVector],
    k: usize,
    seed: u64,
    max_iterations: usize,
) -> Result<ClusterModel> {
    if k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    if max_iterations == 0 {
        return Err(Error::Parameter("max_iterations must be positive".into()));
    }
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(Error::InfeasibleK { k, distinct });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus(points, k, &mut rng);
    // Seeds are distinct input points, so each seed's own point lands in its cluster.
    let mut assignments = assign(points, &centroids);
    let mut history = vec![inertia(points, &centroids, &assignments)];
    let mut iterations_run = 0;

    while iterations_run < max_iterations {
        iterations_run += 1;
        let mut next_centroids = means(points, &assignments, &centroids);
        let mut next = assign(points, &next_centroids);
        if !repair_empty(points, &mut next_centroids, &mut next) {
            return Err(Error::Consistency(
                "could not repair an empty cluster".into(),
            ));
        }
        history.push(inertia(points, &next_centroids, &next));
        centroids = next_centroids;
        let converged = next == assignments;
        assignments = next;
        if converged {
            break;
        }
    }

    let inertia = *history.last().expect("history is never empty");
    Ok(ClusterModel {
        k,
        seed,
        centroids,
        assignments,
        inertia,
        iterations_run,
        inertia_history: history,
    })
}

/// Groups records by their cluster, preserving input order within each group.
pub fn split_by_cluster(
    records: &[BugRecord],
    model: &ClusterModel,
) -> Result<Vec<Vec<BugRecord>>> {
    if records.len() != model.assignments.len() {
        return Err(Error::Consistency(format!(
            "model covers {} records, got {}",
            model.assignments.len(),
            records.len()
        )));
    }
    let mut groups = vec![Vec::new(); model.k];
    for (record, &c) in records.iter().zip(&model.assignments) {
        groups
            .get_mut(c)
            .ok_or_else(|| {
                Error::Consistency(format!(
                    "cluster index {c} out of range for k = {}",
                    model.k
                ))
            })?
            .push(record.clone());
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn fv(v: f64) -> FeatureVector {
        FeatureVector([v; DIMENSIONS])
    }

    fn check_invariants(points: &[FeatureVector], model: &ClusterModel) {
        assert_eq!(model.assignments.len(), points.len());
        assert!(
            model.cluster_sizes().iter().all(|&n| n > 0),
            "empty cluster"
        );
        for (p, &c) in points.iter().zip(&model.assignments) {
            assert_eq!(nearest(p, &model.centroids).0, c, "not nearest");
        }
        let recomputed = model.recompute_inertia(points);
        assert!((recomputed - model.inertia).abs() <= 1e-9 * recomputed.max(1.0));
        for w in model.inertia_history.windows(2) {
            assert!(
                w[1] <= w[0],
                "inertia increased: {:?}",
                model.inertia_history
            );
        }
    }

    #[test]
    fn identical_points_single_cluster() {
        let points = vec![FeatureVector([4.0, 3.0, 2.0, 1.0]); 10];
        let model = kmeans_fit(&points, 1, 0, 100).unwrap();
        assert_eq!(model.centroids, vec![points[0]]);
        assert_eq!(model.inertia, 0.0);
        assert_eq!(model.iterations_run, 1);
    }

    #[test]
    fn two_clumps_split_exactly() {
        let mut points = vec![fv(1.0); 5];
        points.extend(vec![fv(9.0); 5]);
        for seed in 0..20 {
            let model = kmeans_fit(&points, 2, seed, 100).unwrap();
            assert_eq!(model.inertia, 0.0);
            let first = model.assignments[0];
            assert!(model.assignments[..5].iter().all(|&c| c == first));
            assert!(model.assignments[5..].iter().all(|&c| c != first));
            check_invariants(&points, &model);
        }
    }

    #[test]
    fn k_equals_distinct_points() {
        let points: Vec<_> = (1..=6)
            .map(|i| fv(i as f64))
            .chain([fv(2.0), fv(5.0)])
            .collect();
        let model = kmeans_fit(&points, 6, 3, 100).unwrap();
        assert_eq!(model.inertia, 0.0);
        for (p, &c) in points.iter().zip(&model.assignments) {
            assert_eq!(&model.centroids[c], p);
        }
    }

    #[test]
    fn parameter_errors() {
        let points = vec![fv(1.0), fv(2.0)];
        assert!(matches!(
            kmeans_fit(&points, 0, 0, 10),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            kmeans_fit(&points, 1, 0, 0),
            Err(Error::Parameter(_))
        ));
        assert!(matches!(
            kmeans_fit(&points, 3, 0, 10),
            Err(Error::InfeasibleK { k: 3, distinct: 2 })
        ));
        assert!(matches!(kmeans_fit(&[], 1, 0, 10), Err(Error::EmptyInput)));
    }

    #[test]
    fn max_iterations_bounds_the_loop() {
        let points: Vec<_> = (0..60)
            .map(|i| {
                FeatureVector([
                    (i % 7) as f64,
                    (i % 5) as f64,
                    (i % 11) as f64,
                    (i % 3) as f64,
                ])
            })
            .collect();
        let model = kmeans_fit(&points, 5, 9, 1).unwrap();
        assert_eq!(model.iterations_run, 1);
        check_invariants(&points, &model);
    }

    fn record(i: usize) -> BugRecord {
        BugRecord {
            bug_id: format!("b{i}"),
            severity: 1,
            priority: 1,
            component: 1,
            operating_system: 1,
            assignee: i as u32,
        }
    }

    fn model_with(assignments: Vec<usize>, k: usize) -> ClusterModel {
        ClusterModel {
            k,
            seed: 0,
            centroids: vec![fv(0.0); k],
            assignments,
            inertia: 0.0,
            iterations_run: 0,
            inertia_history: vec![0.0],
        }
    }

    #[test]
    fn split_partitions_in_order() {
        let records: Vec<_> = (0..3).map(record).collect();
        let groups = split_by_cluster(&records, &model_with(vec![0, 1, 0], 2)).unwrap();
        assert_eq!(
            groups,
            vec![
                vec![records[0].clone(), records[2].clone()],
                vec![records[1].clone()]
            ]
        );

        let single = split_by_cluster(&records, &model_with(vec![0, 0, 0], 1)).unwrap();
        assert_eq!(single, vec![records.clone()]);
    }

    #[test]
    fn split_rejects_mismatch() {
        let records: Vec<_> = (0..3).map(record).collect();
        assert!(matches!(
            split_by_cluster(&records, &model_with(vec![0, 0], 1)),
            Err(Error::Consistency(_))
        ));
        assert!(matches!(
            split_by_cluster(&records, &model_with(vec![0, 0, 4], 2)),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn split_preserves_multiset() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let records: Vec<_> = (0..100)
            .map(|i| BugRecord {
                bug_id: format!("b{i}"),
                severity: rng.gen_range(1..=7),
                priority: rng.gen_range(1..=5),
                component: rng.gen_range(1..=9),
                operating_system: rng.gen_range(1..=4),
                assignee: rng.gen_range(1..=6),
            })
            .collect();
        let points: Vec<_> = records.iter().map(FeatureVector::from_record).collect();
        let model = kmeans_fit(&points, 5, 1, 100).unwrap();
        let groups = split_by_cluster(&records, &model).unwrap();
        let mut flat: Vec<_> = groups.into_iter().flatten().collect();
        let mut expected = records.clone();
        flat.sort_by(|a, b| a.bug_id.cmp(&b.bug_id));
        expected.sort_by(|a, b| a.bug_id.cmp(&b.bug_id));
        assert_eq!(flat, expected);
    }

    #[test]
    fn clusters_json_keys_by_bug_id() {
        let records: Vec<_> = (0..3).map(record).collect();
        let json = model_with(vec![0, 1, 0], 2).to_json(&records).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["assignments"]["b1"], 1);
        assert_eq!(value["sizes"], serde_json::json!([2, 1]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn model_invariants_hold(
            raw in prop::collection::vec((1u32..=7, 1u32..=5, 1u32..=12, 1u32..=6), 1..120),
            k in 1usize..=6,
            seed in any::<u64>(),
        ) {
            let points: Vec<_> = raw
                .iter()
                .map(|&(a, b, c, d)| FeatureVector([a, b, c, d].map(f64::from)))
                .collect();
            prop_assume!(distinct_count(&points) >= k);
            let model = kmeans_fit(&points, k, seed, DEFAULT_MAX_ITERATIONS).unwrap();
            check_invariants(&points, &model);
            let again = kmeans_fit(&points, k, seed, DEFAULT_MAX_ITERATIONS).unwrap();
            prop_assert_eq!(again, model);
        }
    }
}
