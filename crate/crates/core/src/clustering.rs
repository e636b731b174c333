//! Hard clustering under a Bregman geometry: the within-cluster Jensen-gap
//! loss and a Lloyd-style alternation of nearest-centroid assignment and
//! weighted-mean centroid updates. The weighted mean minimizes the weighted
//! divergence to any Bregman divergence, which is what makes the plain mean
//! update correct for every generator, not just the squared norm.

use crate::dataset::WeightedDataset;
use crate::divergence::DivergenceFn;
use crate::domain::DomainKind;
use crate::error::{Error, Result};
use crate::generator::ConvexGenerator;
use crate::linalg::Matrix;
use crate::sampler;

/// State of a clustering run.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteringState {
    /// Cluster index per data row.
    pub assignments: Vec<usize>,
    /// k x l centroid matrix (weighted cluster means, interior-clamped when
    /// the geometry requires it).
    pub centroids: Matrix,
    /// Final loss `sum_i mu_i d_phi(x_i, c_{a(i)})`.
    pub loss: f64,
    /// Completed iterations (one iteration = centroid step + assignment step).
    pub iteration: usize,
    /// Loss after every half-step, starting with the loss under the initial
    /// assignment. Non-increasing for a correct run.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
    /// Number of empty-cluster repairs performed.
    pub empty_cluster_repairs: usize,
    /// Number of centroid interior-clamps performed (log-like geometries).
    pub boundary_clamps: usize,
}

/// Divergence-form clustering loss `sum_i mu_i d_phi(x_i, c_{a(i)})`.
pub fn divergence_form_loss(
    gen: &ConvexGenerator,
    ds: &WeightedDataset,
    assignments: &[usize],
    centroids: &Matrix,
) -> Result<f64> {
    validate_assignments(ds, assignments, centroids)?;
    let d = DivergenceFn::bregman(gen);
    loss_with(&d, ds, assignments, centroids)
}

fn loss_with(
    d: &DivergenceFn,
    ds: &WeightedDataset,
    assignments: &[usize],
    centroids: &Matrix,
) -> Result<f64> {
    let mut total = 0.0;
    for (i, &w) in ds.weights().iter().enumerate() {
        if w > 0.0 {
            total += w * d.evaluate(ds.row(i), centroids.row(assignments[i]))?;
        }
    }
    Ok(total)
}

/// Jensen-gap form of the clustering loss: the sum over clusters of the
/// cluster mass times the Jensen-gap information of the cluster-normalized
/// weights and points. When each centroid is the weighted mean of its
/// cluster, this equals the divergence-form loss.
#[allow(clippy::needless_range_loop)]
pub fn jensen_gap_loss(
    gen: &ConvexGenerator,
    ds: &WeightedDataset,
    assignments: &[usize],
    centroids: &Matrix,
) -> Result<f64> {
    validate_assignments(ds, assignments, centroids)?;
    let k = centroids.rows();
    let l = ds.dim();
    let mut masses = vec![0.0f64; k];
    let mut counts = vec![0usize; k];
    for (i, &a) in assignments.iter().enumerate() {
        masses[a] += ds.weights()[i];
        counts[a] += 1;
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::EmptyCluster(j));
    }
    let mut total = 0.0;
    for j in 0..k {
        if masses[j] <= 0.0 {
            continue;
        }
        // Cluster mean and mean generator value under normalized weights.
        let mut mean = vec![0.0f64; l];
        let mut mean_phi = 0.0;
        for (i, &a) in assignments.iter().enumerate() {
            if a == j && ds.weights()[i] > 0.0 {
                let w = ds.weights()[i] / masses[j];
                for (m, &x) in mean.iter_mut().zip(ds.row(i)) {
                    *m += w * x;
                }
                mean_phi += w * gen.value(ds.row(i));
            }
        }
        total += masses[j] * (mean_phi - gen.value(&mean));
    }
    Ok(total)
}

fn validate_assignments(
    ds: &WeightedDataset,
    assignments: &[usize],
    centroids: &Matrix,
) -> Result<()> {
    if assignments.len() != ds.len() {
        return Err(Error::LengthMismatch {
            expected: ds.len(),
            got: assignments.len(),
        });
    }
    if centroids.cols() != ds.dim() {
        return Err(Error::LengthMismatch {
            expected: ds.dim(),
            got: centroids.cols(),
        });
    }
    let k = centroids.rows();
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::EmptyCluster(bad));
    }
    Ok(())
}

/// Loss change from replacing two weighted points with their weighted mean:
/// `mu1 phi(x1) + mu2 phi(x2) - (mu1 + mu2) phi((mu1 x1 + mu2 x2)/(mu1 + mu2))`.
/// Strictly positive for x1 != x2 by strict convexity; zero when they agree.
pub fn merge_loss_decrease(
    gen: &ConvexGenerator,
    x1: &[f64],
    x2: &[f64],
    mu1: f64,
    mu2: f64,
) -> f64 {
    assert!(mu1 > 0.0 && mu2 > 0.0, "merge weights must be positive");
    assert!(
        gen.domain().contains(x1) && gen.domain().contains(x2),
        "merge points must lie in the generator domain"
    );
    let total = mu1 + mu2;
    let mean: Vec<f64> = x1
        .iter()
        .zip(x2)
        .map(|(&a, &b)| (mu1 * a + mu2 * b) / total)
        .collect();
    mu1 * gen.value(x1) + mu2 * gen.value(x2) - total * gen.value(&mean)
}

/// Lloyd-style Bregman hard clustering.
///
/// Starts from `k` distinct data rows sampled without replacement by weight,
/// then alternates nearest-centroid assignment (ties to the lowest cluster
/// index) with weighted-mean centroid updates. Empty clusters are repaired by
/// promoting the point farthest from its centroid to a singleton; centroids
/// of log-like geometries are clamped to the relative interior before any
/// divergence evaluation. Both repairs are counted in the returned state.
///
/// Terminates on an assignment fixed point, on relative loss change below
/// `rel_tol`, or after `max_iters` iterations. The loss never increases
/// across half-steps.
pub fn bregman_lloyd(
    gen: &ConvexGenerator,
    ds: &WeightedDataset,
    k: usize,
    seed: u64,
    max_iters: usize,
    rel_tol: f64,
) -> Result<ClusteringState> {
    let l = ds.dim();
    if gen.dim() != l {
        return Err(Error::LengthMismatch {
            expected: gen.dim(),
            got: l,
        });
    }
    let distinct = count_distinct_rows(ds);
    if k == 0 || k > distinct {
        return Err(Error::InsufficientDistinctRows { k, distinct });
    }
    let d = DivergenceFn::bregman(gen);
    let mut boundary_clamps = 0usize;
    let mut empty_cluster_repairs = 0usize;

    let mut centroids = init_centroids(ds, k, seed);
    clamp_centroids(gen, &mut centroids, &mut boundary_clamps);

    let mut assignments = assign_all(&d, ds, &centroids)?;
    let mut loss = loss_with(&d, ds, &assignments, &centroids)?;
    let mut loss_trace = vec![loss];
    let mut iteration = 0usize;
    let mut converged = false;

    while iteration < max_iters {
        iteration += 1;
        update_centroids(
            ds,
            &mut assignments,
            &mut centroids,
            &d,
            gen,
            &mut empty_cluster_repairs,
            &mut boundary_clamps,
        )?;
        let after_update = loss_with(&d, ds, &assignments, &centroids)?;
        loss_trace.push(after_update);

        let new_assignments = assign_all(&d, ds, &centroids)?;
        let unchanged = new_assignments == assignments;
        assignments = new_assignments;
        let after_assign = loss_with(&d, ds, &assignments, &centroids)?;
        loss_trace.push(after_assign);

        let rel_change = (loss - after_assign).abs() / (1.0 + after_assign.abs());
        loss = after_assign;
        if unchanged || rel_change < rel_tol {
            converged = true;
            break;
        }
    }

    Ok(ClusteringState {
        assignments,
        centroids,
        loss,
        iteration,
        loss_trace,
        converged,
        empty_cluster_repairs,
        boundary_clamps,
    })
}

fn count_distinct_rows(ds: &WeightedDataset) -> usize {
    let mut rows: Vec<&[f64]> = (0..ds.len()).map(|i| ds.row(i)).collect();
    rows.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| !o.is_eq())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    1 + rows.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Weighted sampling without replacement of k distinct rows.
fn init_centroids(ds: &WeightedDataset, k: usize, seed: u64) -> Matrix {
    use rand::Rng;
    let mut rng = sampler::stream_rng(seed, 0);
    let mut available: Vec<usize> = (0..ds.len()).collect();
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(k);
    while chosen.len() < k && !available.is_empty() {
        let total: f64 = available.iter().map(|&i| ds.weights()[i]).sum();
        let pick_pos = if total > 1e-300 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pos = available.len() - 1;
            for (p, &i) in available.iter().enumerate() {
                acc += ds.weights()[i];
                if acc >= target {
                    pos = p;
                    break;
                }
            }
            pos
        } else {
            0
        };
        let idx = available.remove(pick_pos);
        let row = ds.row(idx).to_vec();
        if !chosen.iter().any(|c| c.as_slice() == row.as_slice()) {
            chosen.push(row);
        }
    }
    Matrix::from_rows(&chosen).expect("chosen centroid rows are rectangular")
}

fn clamp_centroids(gen: &ConvexGenerator, centroids: &mut Matrix, clamps: &mut usize) {
    if gen.domain().kind() == DomainKind::FullSpace {
        return;
    }
    for j in 0..centroids.rows() {
        let (clamped, changed) = gen.domain().clamp_to_interior(centroids.row(j));
        if changed {
            *clamps += 1;
            for (col, &v) in clamped.iter().enumerate() {
                centroids.set(j, col, v);
            }
        }
    }
}

fn assign_all(d: &DivergenceFn, ds: &WeightedDataset, centroids: &Matrix) -> Result<Vec<usize>> {
    let mut assignments = Vec::with_capacity(ds.len());
    for i in 0..ds.len() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for j in 0..centroids.rows() {
            let dij = d.evaluate(ds.row(i), centroids.row(j))?;
            if dij < best_d {
                best_d = dij;
                best = j;
            }
        }
        assignments.push(best);
    }
    Ok(assignments)
}

fn update_centroids(
    ds: &WeightedDataset,
    assignments: &mut [usize],
    centroids: &mut Matrix,
    d: &DivergenceFn,
    gen: &ConvexGenerator,
    repairs: &mut usize,
    clamps: &mut usize,
) -> Result<()> {
    let k = centroids.rows();
    loop {
        let mut counts = vec![0usize; k];
        for &a in assignments.iter() {
            counts[a] += 1;
        }
        recompute_means(ds, assignments, centroids);
        clamp_centroids(gen, centroids, clamps);
        let Some(empty) = counts.iter().position(|&c| c == 0) else {
            return Ok(());
        };
        // Promote the point farthest from its centroid, drawn from a cluster
        // that can spare it.
        let mut worst_idx = None;
        let mut worst_d = f64::NEG_INFINITY;
        for i in 0..ds.len() {
            if counts[assignments[i]] < 2 {
                continue;
            }
            let dij = d.evaluate(ds.row(i), centroids.row(assignments[i]))?;
            if dij > worst_d {
                worst_d = dij;
                worst_idx = Some(i);
            }
        }
        let donor = worst_idx.expect("some cluster has at least two points");
        assignments[donor] = empty;
        *repairs += 1;
    }
}

#[allow(clippy::needless_range_loop)]
fn recompute_means(ds: &WeightedDataset, assignments: &[usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let l = centroids.cols();
    let mut masses = vec![0.0f64; k];
    let mut counts = vec![0usize; k];
    let mut sums = vec![vec![0.0f64; l]; k];
    let mut plain = vec![vec![0.0f64; l]; k];
    for (i, &a) in assignments.iter().enumerate() {
        let w = ds.weights()[i];
        masses[a] += w;
        counts[a] += 1;
        for (col, &x) in ds.row(i).iter().enumerate() {
            sums[a][col] += w * x;
            plain[a][col] += x;
        }
    }
    for j in 0..k {
        if counts[j] == 0 {
            continue;
        }
        if masses[j] > 0.0 {
            for col in 0..l {
                centroids.set(j, col, sums[j][col] / masses[j]);
            }
        } else {
            // All assigned points carry zero weight: fall back to the plain
            // average, which still lies in the domain.
            for col in 0..l {
                centroids.set(j, col, plain[j][col] / counts[j] as f64);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::ConvexDomain;

    fn line_dataset(weights: Vec<f64>, xs: &[f64]) -> WeightedDataset {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        WeightedDataset::new(
            ConvexDomain::full_space(1).unwrap(),
            weights,
            Matrix::from_rows(&rows).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn singleton_clusters_have_zero_loss() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[0.0, 1.0, 2.0, 3.0]);
        let assignments = vec![0, 1, 2, 3];
        let centroids = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let loss = jensen_gap_loss(&gen, &ds, &assignments, &centroids).unwrap();
        assert!(loss.abs() <= 1e-15);
        let div = divergence_form_loss(&gen, &ds, &assignments, &centroids).unwrap();
        assert!(div.abs() <= 1e-15);
    }

    #[test]
    fn one_cluster_recovers_jensen_gap_information() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.5, 0.5], &[0.0, 2.0]);
        let centroid = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let loss = jensen_gap_loss(&gen, &ds, &[0, 0], &centroid).unwrap();
        let info = crate::information::jensen_gap_information(&gen, &ds).unwrap();
        assert!((loss - info).abs() < 1e-15);
    }

    #[test]
    fn hand_computed_two_cluster_loss() {
        // Uniform weights over {0, 2, 10, 12}, split {0,2} / {10,12}:
        // within-cluster squared deviations give 0.5 under d = (x-c)^2/2.
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[0.0, 2.0, 10.0, 12.0]);
        let assignments = vec![0, 0, 1, 1];
        let centroids = Matrix::from_rows(&[vec![1.0], vec![11.0]]).unwrap();
        let jens = jensen_gap_loss(&gen, &ds, &assignments, &centroids).unwrap();
        let div = divergence_form_loss(&gen, &ds, &assignments, &centroids).unwrap();
        assert!((jens - 0.5).abs() < 1e-14, "{jens}");
        assert!((div - 0.5).abs() < 1e-14, "{div}");
        assert!((jens - div).abs() <= 1e-10);
    }

    #[test]
    fn jensen_gap_loss_rejects_empty_cluster() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.5, 0.5], &[0.0, 2.0]);
        let centroids = Matrix::from_rows(&[vec![1.0], vec![5.0]]).unwrap();
        assert!(matches!(
            jensen_gap_loss(&gen, &ds, &[0, 0], &centroids),
            Err(Error::EmptyCluster(1))
        ));
    }

    #[test]
    fn merge_hand_values() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        assert_eq!(merge_loss_decrease(&gen, &[1.3], &[1.3], 0.4, 0.6), 0.0);
        let v = merge_loss_decrease(&gen, &[0.0], &[2.0], 0.5, 0.5);
        assert!((v - 0.5).abs() < 1e-15);

        let ent = ConvexGenerator::negative_entropy(2).unwrap();
        let w = merge_loss_decrease(&ent, &[1.0, 0.0], &[0.0, 1.0], 0.5, 0.5);
        assert!((w - (2.0f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn k_equals_one_converges_to_global_mean() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[0.0, 1.0, 5.0, 6.0]);
        let state = bregman_lloyd(&gen, &ds, 1, 7, 50, 1e-10).unwrap();
        assert!((state.centroids.get(0, 0) - 3.0).abs() < 1e-12);
        let info = crate::information::jensen_gap_information(&gen, &ds).unwrap();
        assert!((state.loss - info).abs() < 1e-12);
        assert!(state.converged);
        assert_eq!(state.iteration, 1);
    }

    #[test]
    fn separated_blobs_recover_partition() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(
            vec![1.0 / 6.0; 6],
            &[0.0, 0.2, 0.4, 10.0, 10.2, 10.4],
        );
        let state = bregman_lloyd(&gen, &ds, 2, 3, 100, 1e-10).unwrap();
        assert!(state.converged);
        let a = state.assignments[0];
        assert!(state.assignments[..3].iter().all(|&x| x == a));
        let b = state.assignments[3];
        assert!(state.assignments[3..].iter().all(|&x| x == b));
        assert_ne!(a, b);
        // Loss equals the within-blob Jensen-gap sum.
        let jens = jensen_gap_loss(&gen, &ds, &state.assignments, &state.centroids).unwrap();
        assert!((state.loss - jens).abs() <= 1e-10);
    }

    #[test]
    fn loss_trace_is_non_increasing() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.125; 8], &[0.0, 0.5, 1.0, 4.0, 4.5, 9.0, 9.5, 10.0]);
        let state = bregman_lloyd(&gen, &ds, 3, 11, 100, 1e-10).unwrap();
        for pair in state.loss_trace.windows(2) {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "loss increased: {:?}",
                state.loss_trace
            );
        }
    }

    #[test]
    fn kl_geometry_on_simplex() {
        let gen = ConvexGenerator::negative_entropy(2).unwrap();
        let rows = vec![
            vec![0.9, 0.1],
            vec![0.85, 0.15],
            vec![0.1, 0.9],
            vec![0.15, 0.85],
        ];
        let ds = WeightedDataset::new(
            ConvexDomain::simplex(2).unwrap(),
            vec![0.25; 4],
            Matrix::from_rows(&rows).unwrap(),
        )
        .unwrap();
        let state = bregman_lloyd(&gen, &ds, 2, 5, 100, 1e-10).unwrap();
        assert!(state.converged);
        assert_eq!(state.assignments[0], state.assignments[1]);
        assert_eq!(state.assignments[2], state.assignments[3]);
        assert_ne!(state.assignments[0], state.assignments[2]);
        for pair in state.loss_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12);
        }
    }

    #[test]
    fn label_permutation_leaves_loss_invariant() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[0.0, 2.0, 10.0, 12.0]);
        let assignments = vec![0, 0, 1, 1];
        let centroids = Matrix::from_rows(&[vec![1.0], vec![11.0]]).unwrap();
        let swapped_assignments = vec![1, 1, 0, 0];
        let swapped_centroids = Matrix::from_rows(&[vec![11.0], vec![1.0]]).unwrap();
        let a = jensen_gap_loss(&gen, &ds, &assignments, &centroids).unwrap();
        let b = jensen_gap_loss(&gen, &ds, &swapped_assignments, &swapped_centroids).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn rerun_is_identical() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.125; 8], &[0.0, 0.5, 1.0, 4.0, 4.5, 9.0, 9.5, 10.0]);
        let a = bregman_lloyd(&gen, &ds, 3, 17, 100, 1e-10).unwrap();
        let b = bregman_lloyd(&gen, &ds, 3, 17, 100, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_cluster_is_repaired_with_the_farthest_point() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[0.0, 1.0, 8.0, 9.0]);
        let d = DivergenceFn::bregman(&gen);
        // Assignment that leaves cluster 1 empty. Under the recomputed mean
        // 4.5 the endpoints 0.0 and 9.0 are equally far; the tie goes to the
        // lowest index, so point 0 becomes the singleton.
        let mut assignments = vec![0, 0, 0, 0];
        let mut centroids = Matrix::from_rows(&[vec![4.5], vec![100.0]]).unwrap();
        let mut repairs = 0;
        let mut clamps = 0;
        update_centroids(
            &ds,
            &mut assignments,
            &mut centroids,
            &d,
            &gen,
            &mut repairs,
            &mut clamps,
        )
        .unwrap();
        assert_eq!(repairs, 1);
        assert_eq!(assignments, vec![1, 0, 0, 0]);
        assert!((centroids.get(0, 0) - 6.0).abs() < 1e-12);
        assert!((centroids.get(1, 0) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn shared_zero_coordinate_centroid_is_clamped_into_the_interior() {
        let gen = ConvexGenerator::negative_entropy(3).unwrap();
        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.8, 0.2, 0.0]];
        let ds = WeightedDataset::new(
            ConvexDomain::simplex(3).unwrap(),
            vec![0.5, 0.5],
            Matrix::from_rows(&rows).unwrap(),
        )
        .unwrap();
        let state = bregman_lloyd(&gen, &ds, 1, 2, 50, 1e-10).unwrap();
        assert!(state.boundary_clamps >= 1);
        assert!(state.loss.is_finite() && state.loss >= 0.0);
        assert!(gen.domain().contains_interior(state.centroids.row(0)));
    }

    #[test]
    fn k_must_not_exceed_distinct_rows() {
        let gen = ConvexGenerator::squared_norm(1).unwrap();
        let ds = line_dataset(vec![0.25; 4], &[1.0, 1.0, 2.0, 2.0]);
        assert!(matches!(
            bregman_lloyd(&gen, &ds, 3, 1, 10, 1e-10),
            Err(Error::InsufficientDistinctRows { k: 3, distinct: 2 })
        ));
        assert!(bregman_lloyd(&gen, &ds, 2, 1, 10, 1e-10).is_ok());
    }
}
