//! Evaluation metrics for link prediction, weight prediction, mask recovery
//! and signal recovery.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{upper_pairs, EdgeSet, GlobalGraph, MaskSet};
use crate::spectral::SignalMatrix;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("ground truth has no edges, metric undefined")]
    EmptyTruth,
    #[error("ground truth selects no mask entries, metric undefined")]
    EmptyMaskTruth,
    #[error("both edge sets are empty, jaccard undefined")]
    EmptyUnion,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("layer structure mismatch: {left} vs {right} layers")]
    LayerMismatch { left: usize, right: usize },
    #[error("ground truth has zero norm, relative error undefined")]
    ZeroNormTruth,
    #[error("zero ground-truth entries at indices {0:?}; relative error undefined")]
    ZeroTruthEntries(Vec<(usize, usize)>),
    #[error("no entries selected for evaluation")]
    EmptyEvaluationMask,
}

/// Binary link-prediction counts and rates over unordered vertex pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeClassificationReport {
    pub precision: f64,
    pub recall: f64,
    pub f_score: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl EdgeClassificationReport {
    fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = if tp + fp > 0 {
            tp as f64 / (tp + fp) as f64
        } else {
            0.0
        };
        let recall = if tp + fn_ > 0 {
            tp as f64 / (tp + fn_) as f64
        } else {
            0.0
        };
        let f_score = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self {
            precision,
            recall,
            f_score,
            tp,
            fp,
            fn_,
        }
    }
}

/// Weight-prediction errors over the strict upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightErrorReport {
    /// Mean squared error over the off-diagonal upper-triangle entries.
    pub mse: f64,
    /// Squared error normalized by the squared norm of the ground truth.
    pub rse: f64,
}

fn classify(inferred: &EdgeSet, truth: &EdgeSet) -> (usize, usize, usize) {
    let tp = inferred.intersection_len(truth);
    let fp = inferred.len() - tp;
    let fn_ = truth.len() - tp;
    (tp, fp, fn_)
}

/// Link-prediction report of an inferred graph against the ground truth,
/// with edges binarized at `edge_tol`.
pub fn edge_report(
    inferred: &GlobalGraph,
    truth: &GlobalGraph,
    edge_tol: f64,
) -> Result<EdgeClassificationReport, MetricError> {
    if inferred.n() != truth.n() {
        return Err(MetricError::DimensionMismatch {
            left: inferred.n(),
            right: truth.n(),
        });
    }
    let truth_edges = truth.edge_set(edge_tol);
    if truth_edges.is_empty() {
        return Err(MetricError::EmptyTruth);
    }
    let inferred_edges = inferred.edge_set(edge_tol);
    let (tp, fp, fn_) = classify(&inferred_edges, &truth_edges);
    Ok(EdgeClassificationReport::from_counts(tp, fp, fn_))
}

/// MSE and RSE of an inferred weight matrix against the ground truth. Both
/// graphs are expected to be volume-normalized identically by the caller.
pub fn weight_report(
    inferred: &GlobalGraph,
    truth: &GlobalGraph,
) -> Result<WeightErrorReport, MetricError> {
    if inferred.n() != truth.n() {
        return Err(MetricError::DimensionMismatch {
            left: inferred.n(),
            right: truth.n(),
        });
    }
    let n = truth.n();
    let wi = inferred.weights();
    let wt = truth.weights();
    let mut sq = 0.0;
    let mut truth_sq = 0.0;
    for (i, j) in upper_pairs(n) {
        let d = wi[(i, j)] - wt[(i, j)];
        sq += d * d;
        truth_sq += wt[(i, j)] * wt[(i, j)];
    }
    if truth_sq <= 0.0 {
        return Err(MetricError::ZeroNormTruth);
    }
    let pairs = (n * (n - 1) / 2) as f64;
    Ok(WeightErrorReport {
        mse: sq / pairs,
        rse: sq / truth_sq,
    })
}

/// Mask-recovery report: per-layer selections are mask entries at or above
/// `select_threshold` on the union support, pooled over layers.
///
/// The comparison carries a tolerance absorbing solver accuracy, so
/// iterates resting just under a planted 0.5 still count as selected.
pub fn mask_report(
    inferred: &MaskSet,
    truth: &MaskSet,
    select_threshold: f64,
) -> Result<EdgeClassificationReport, MetricError> {
    if inferred.t() != truth.t() {
        return Err(MetricError::LayerMismatch {
            left: inferred.t(),
            right: truth.t(),
        });
    }
    if inferred.n() != truth.n() {
        return Err(MetricError::DimensionMismatch {
            left: inferred.n(),
            right: truth.n(),
        });
    }
    let selected = |v: f64| v >= select_threshold - 1e-6;
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    let mut truth_any = false;
    for t in 0..truth.t() {
        for &(i, j) in truth.support() {
            let in_truth = selected(truth.value(t, i, j));
            let in_inferred = selected(inferred.value(t, i, j));
            truth_any |= in_truth;
            match (in_inferred, in_truth) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        // Selections outside the truth support still count as false
        // positives.
        for &(i, j) in inferred.support() {
            if truth.support().binary_search(&(i, j)).is_err() && selected(inferred.value(t, i, j))
            {
                fp += 1;
            }
        }
    }
    if !truth_any {
        return Err(MetricError::EmptyMaskTruth);
    }
    Ok(EdgeClassificationReport::from_counts(tp, fp, fn_))
}

/// Jaccard index of two edge sets: the proportion of the intersection to the
/// union; one when the topologies are identical.
pub fn jaccard(inferred: &EdgeSet, truth: &EdgeSet) -> Result<f64, MetricError> {
    let inter = inferred.intersection_len(truth);
    let union = inferred.len() + truth.len() - inter;
    if union == 0 {
        return Err(MetricError::EmptyUnion);
    }
    Ok(inter as f64 / union as f64)
}

/// Mean absolute percentage error of the recovered signals over the entries
/// flagged in `evaluate`; `None` evaluates every entry.
pub fn mape(
    recovered: &SignalMatrix,
    truth: &SignalMatrix,
    evaluate: Option<&DMatrix<bool>>,
) -> Result<f64, MetricError> {
    if recovered.n() != truth.n() || recovered.k() != truth.k() {
        return Err(MetricError::DimensionMismatch {
            left: recovered.n() * recovered.k(),
            right: truth.n() * truth.k(),
        });
    }
    let mut zero_entries = Vec::new();
    let mut total = 0.0;
    let mut count = 0usize;
    for j in 0..truth.k() {
        for i in 0..truth.n() {
            if let Some(mask) = evaluate {
                if !mask[(i, j)] {
                    continue;
                }
            }
            let t = truth.data()[(i, j)];
            if t == 0.0 {
                zero_entries.push((i, j));
                continue;
            }
            total += ((recovered.data()[(i, j)] - t) / t).abs();
            count += 1;
        }
    }
    if !zero_entries.is_empty() {
        return Err(MetricError::ZeroTruthEntries(zero_entries));
    }
    if count == 0 {
        return Err(MetricError::EmptyEvaluationMask);
    }
    Ok(100.0 * total / count as f64)
}

/// Mean squared error between two signal matrices over the entries flagged
/// in `evaluate`; `None` evaluates every entry.
pub fn signal_mse(
    recovered: &SignalMatrix,
    truth: &SignalMatrix,
    evaluate: Option<&DMatrix<bool>>,
) -> Result<f64, MetricError> {
    if recovered.n() != truth.n() || recovered.k() != truth.k() {
        return Err(MetricError::DimensionMismatch {
            left: recovered.n() * recovered.k(),
            right: truth.n() * truth.k(),
        });
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for j in 0..truth.k() {
        for i in 0..truth.n() {
            if let Some(mask) = evaluate {
                if !mask[(i, j)] {
                    continue;
                }
            }
            let d = recovered.data()[(i, j)] - truth.data()[(i, j)];
            total += d * d;
            count += 1;
        }
    }
    if count == 0 {
        return Err(MetricError::EmptyEvaluationMask);
    }
    Ok(total / count as f64)
}

/// Render rows as an aligned plain-text table.
pub fn format_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (k, cell) in row.iter().enumerate() {
            if k < widths.len() {
                widths[k] = widths[k].max(cell.len());
            }
        }
    }
    let mut out = String::new();
    let render = |cells: Vec<String>, widths: &[usize]| -> String {
        cells
            .iter()
            .enumerate()
            .map(|(k, c)| format!("{:<width$}", c, width = widths[k]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    out.push_str(&render(
        headers.iter().map(|h| h.to_string()).collect(),
        &widths,
    ));
    out.push('\n');
    for row in rows {
        out.push_str(&render(row.clone(), &widths));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{GlobalGraph, MaskSet};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph_from_edges(n: usize, edges: &[(usize, usize, f64)]) -> GlobalGraph {
        let mut w = DMatrix::zeros(n, n);
        for &(i, j, v) in edges {
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
        GlobalGraph::from_weights(&w).unwrap()
    }

    fn random_graph(n: usize, seed: u64) -> GlobalGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = DMatrix::zeros(n, n);
        for (i, j) in upper_pairs(n) {
            if rng.random::<f64>() < 0.5 {
                let v = rng.random_range(0.2..1.0);
                w[(i, j)] = v;
                w[(j, i)] = v;
            }
        }
        w[(0, 1)] = 1.0;
        w[(1, 0)] = 1.0;
        GlobalGraph::from_weights(&w).unwrap()
    }

    #[test]
    fn identical_graphs_score_perfectly() {
        let g = random_graph(7, 3);
        let report = edge_report(&g, &g, 1e-4).unwrap();
        assert_eq!(
            (report.precision, report.recall, report.f_score),
            (1.0, 1.0, 1.0)
        );
        assert_eq!(report.fp + report.fn_, 0);
    }

    #[test]
    fn empty_inference_has_zero_recall() {
        let truth = graph_from_edges(4, &[(0, 1, 1.0), (2, 3, 0.5)]);
        let empty = graph_from_edges(4, &[]);
        let report = edge_report(&empty, &truth, 1e-4).unwrap();
        assert_eq!(report.recall, 0.0);
        assert_eq!(report.f_score, 0.0);
    }

    #[test]
    fn empty_truth_is_undefined() {
        let truth = graph_from_edges(4, &[]);
        let g = graph_from_edges(4, &[(0, 1, 1.0)]);
        assert!(matches!(
            edge_report(&g, &truth, 1e-4),
            Err(MetricError::EmptyTruth)
        ));
    }

    #[test]
    fn weight_errors_of_identical_matrices_vanish() {
        let g = random_graph(6, 5);
        let report = weight_report(&g, &g).unwrap();
        assert_eq!((report.mse, report.rse), (0.0, 0.0));
    }

    #[test]
    fn doubled_weights_have_unit_rse() {
        let truth = random_graph(6, 7);
        let doubled = GlobalGraph::from_weights(&(truth.weights() * 2.0)).unwrap();
        let report = weight_report(&doubled, &truth).unwrap();
        assert!((report.rse - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_truth_is_undefined() {
        let truth = graph_from_edges(4, &[]);
        let g = graph_from_edges(4, &[(0, 1, 1.0)]);
        assert!(matches!(
            weight_report(&g, &truth),
            Err(MetricError::ZeroNormTruth)
        ));
    }

    fn mask_pair(support: Vec<(usize, usize)>, a: Vec<f64>, b: Vec<f64>) -> MaskSet {
        MaskSet::new(5, support, vec![a, b]).unwrap()
    }

    #[test]
    fn identical_masks_recover_perfectly() {
        let support = vec![(0, 1), (1, 2), (2, 3)];
        let m = mask_pair(support, vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]);
        let report = mask_report(&m, &m, 0.5).unwrap();
        assert_eq!(report.f_score, 1.0);
    }

    #[test]
    fn planted_halves_count_for_both_layers() {
        let support = vec![(0, 1)];
        let m = mask_pair(support, vec![0.5], vec![0.5]);
        let report = mask_report(&m, &m, 0.5).unwrap();
        assert_eq!(report.tp, 2);
    }

    #[test]
    fn swapped_selections_have_zero_precision() {
        let support = vec![(0, 1), (1, 2)];
        let truth = mask_pair(support.clone(), vec![1.0, 1.0], vec![0.0, 0.0]);
        let swapped = mask_pair(support, vec![0.0, 0.0], vec![1.0, 1.0]);
        let report = mask_report(&swapped, &truth, 0.5).unwrap();
        assert_eq!(report.precision, 0.0);
        assert_eq!(report.recall, 0.0);
    }

    #[test]
    fn jaccard_identical_and_disjoint() {
        let a = EdgeSet::from_pairs([(0, 1), (1, 2)]);
        let b = EdgeSet::from_pairs([(2, 3)]);
        assert_eq!(jaccard(&a, &a).unwrap(), 1.0);
        assert_eq!(jaccard(&a, &b).unwrap(), 0.0);
        assert!(matches!(
            jaccard(&EdgeSet::new(), &EdgeSet::new()),
            Err(MetricError::EmptyUnion)
        ));
    }

    #[test]
    fn jaccard_count_form_agrees_with_set_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for seed in 0..20u64 {
            let inferred = random_graph(6, seed).edge_set(1e-4);
            let truth = random_graph(6, seed + 100).edge_set(1e-4);
            if inferred.is_empty() && truth.is_empty() {
                continue;
            }
            let j = jaccard(&inferred, &truth).unwrap();
            let tp = inferred.intersection_len(&truth);
            let fp = inferred.len() - tp;
            let fn_ = truth.len() - tp;
            let count_form = tp as f64 / (tp + fp + fn_) as f64;
            assert_eq!(j, count_form);
            let _ = rng.random::<f64>();
        }
    }

    #[test]
    fn exact_recovery_has_zero_mape() {
        let x = SignalMatrix::new(DMatrix::from_element(4, 3, 2.5)).unwrap();
        assert_eq!(mape(&x, &x, None).unwrap(), 0.0);
    }

    #[test]
    fn ten_percent_off_is_ten_percent() {
        let truth = SignalMatrix::new(DMatrix::from_element(4, 3, 2.0)).unwrap();
        let rec = SignalMatrix::new(DMatrix::from_element(4, 3, 2.2)).unwrap();
        assert!((mape(&rec, &truth, None).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn zero_truth_entries_are_reported() {
        let mut data = DMatrix::from_element(3, 2, 1.0);
        data[(1, 0)] = 0.0;
        let truth = SignalMatrix::new(data.clone()).unwrap();
        let rec = SignalMatrix::new(DMatrix::from_element(3, 2, 1.0)).unwrap();
        match mape(&rec, &truth, None) {
            Err(MetricError::ZeroTruthEntries(list)) => assert_eq!(list, vec![(1, 0)]),
            other => panic!("expected zero-entry error, got {other:?}"),
        }
    }

    #[test]
    fn table_is_aligned_and_stable() {
        let t = format_table(
            &["method", "f"],
            &[
                vec!["ml".into(), "0.9".into()],
                vec!["gl-sigrep".into(), "0.8".into()],
            ],
        );
        assert_eq!(t, "method     f\nml         0.9\ngl-sigrep  0.8\n");
    }

    proptest! {
        #[test]
        fn metrics_are_invariant_under_vertex_relabeling(seed in 0u64..200) {
            let n = 6;
            let inferred = random_graph(n, seed);
            let truth = random_graph(n, seed + 1000);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.random_range(0..=i);
                perm.swap(i, j);
            }
            let relabel = |g: &GlobalGraph| {
                let w = g.weights();
                let mut pw = DMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        pw[(perm[i], perm[j])] = w[(i, j)];
                    }
                }
                GlobalGraph::from_weights(&pw).unwrap()
            };
            let base_edges = edge_report(&inferred, &truth, 1e-4).unwrap();
            let perm_edges = edge_report(&relabel(&inferred), &relabel(&truth), 1e-4).unwrap();
            prop_assert_eq!(base_edges, perm_edges);
            let base_w = weight_report(&inferred, &truth).unwrap();
            let perm_w = weight_report(&relabel(&inferred), &relabel(&truth)).unwrap();
            prop_assert!((base_w.mse - perm_w.mse).abs() < 1e-12);
            prop_assert!((base_w.rse - perm_w.rse).abs() < 1e-12);
        }
    }
}
