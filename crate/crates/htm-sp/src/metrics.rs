//! Clustering-style F1 evaluation.
//!
//! For class `i` and cluster `j`: recall is `n_ij / n_i`, precision is
//! `n_ij / n_j`, their harmonic mean is `F(i, j)` (0 when both vanish), and
//! the overall score weights each class's best `F(i, j)` by its share of the
//! items: `F1 = sum_i (n_i / n) * max_j F(i, j)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class-by-cluster assignment counts. `n_ij` counts items of class `i`
/// assigned to cluster `j`; row and column totals are derived on
/// construction, so the consistency invariants hold by definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    matrix: Vec<Vec<u64>>,
}

impl ConfusionCounts {
    /// An all-zero matrix with `classes` rows and `clusters` columns.
    pub fn zeros(classes: usize, clusters: usize) -> Self {
        ConfusionCounts {
            matrix: vec![vec![0; clusters]; classes],
        }
    }

    pub fn from_matrix(matrix: Vec<Vec<u64>>) -> Result<Self> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::input("confusion matrix must be non-empty"));
        }
        let clusters = matrix[0].len();
        if matrix.iter().any(|row| row.len() != clusters) {
            return Err(Error::input("confusion matrix rows differ in length"));
        }
        Ok(ConfusionCounts { matrix })
    }

    pub fn record(&mut self, class: usize, cluster: usize) {
        self.matrix[class][cluster] += 1;
    }

    pub fn matrix(&self) -> &[Vec<u64>] {
        &self.matrix
    }

    pub fn num_classes(&self) -> usize {
        self.matrix.len()
    }

    pub fn num_clusters(&self) -> usize {
        self.matrix[0].len()
    }

    /// Items of class `i`.
    pub fn class_total(&self, i: usize) -> u64 {
        self.matrix[i].iter().sum()
    }

    /// Items assigned to cluster `j`.
    pub fn cluster_total(&self, j: usize) -> u64 {
        self.matrix.iter().map(|row| row[j]).sum()
    }

    /// All items.
    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }
}

/// Full F1 evaluation output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    pub recall: Vec<Vec<f64>>,
    pub precision: Vec<Vec<f64>>,
    pub f_scores: Vec<Vec<f64>>,
    /// Best F(i, j) over clusters, per class.
    pub best_f: Vec<f64>,
    /// Weighted overall score.
    pub f1: f64,
    /// Classes with zero items; they carry weight 0 in the overall score.
    pub empty_classes: Vec<usize>,
}

/// Evaluates recall, precision, per-pair F and the weighted overall F1.
///
/// Conventions: `F(i, j) = 0` when precision and recall are both zero, and a
/// cluster with no items yields zero precision for every class. Classes with
/// no items are excluded from the weighted sum (their weight `n_i / n` is
/// zero) and reported in `empty_classes`.
pub fn f1_report(counts: &ConfusionCounts) -> Result<F1Report> {
    let n = counts.total();
    if n == 0 {
        return Err(Error::computation(
            "confusion counts are all zero, F1 is undefined",
        ));
    }
    let classes = counts.num_classes();
    let clusters = counts.num_clusters();
    let class_totals: Vec<u64> = (0..classes).map(|i| counts.class_total(i)).collect();
    let cluster_totals: Vec<u64> = (0..clusters).map(|j| counts.cluster_total(j)).collect();

    let mut recall = vec![vec![0.0; clusters]; classes];
    let mut precision = vec![vec![0.0; clusters]; classes];
    let mut f_scores = vec![vec![0.0; clusters]; classes];
    let mut best_f = vec![0.0; classes];
    let mut empty_classes = Vec::new();
    let mut f1 = 0.0;

    for i in 0..classes {
        if class_totals[i] == 0 {
            empty_classes.push(i);
        }
        for j in 0..clusters {
            let nij = counts.matrix()[i][j] as f64;
            let r = if class_totals[i] > 0 {
                nij / class_totals[i] as f64
            } else {
                0.0
            };
            let p = if cluster_totals[j] > 0 {
                nij / cluster_totals[j] as f64
            } else {
                0.0
            };
            let f = if p + r > 0.0 { 2.0 * r * p / (p + r) } else { 0.0 };
            recall[i][j] = r;
            precision[i][j] = p;
            f_scores[i][j] = f;
            if f > best_f[i] {
                best_f[i] = f;
            }
        }
        f1 += class_totals[i] as f64 / n as f64 * best_f[i];
    }

    Ok(F1Report {
        recall,
        precision,
        f_scores,
        best_f,
        f1,
        empty_classes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diagonal_matrix_scores_one() {
        let counts = ConfusionCounts::from_matrix(vec![
            vec![7, 0, 0],
            vec![0, 3, 0],
            vec![0, 0, 11],
        ])
        .unwrap();
        let report = f1_report(&counts).unwrap();
        assert_eq!(report.f1, 1.0);
        assert_eq!(report.best_f, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn hand_derived_two_by_two_fixture() {
        // n_00=1, n_01=1, n_10=0, n_11=2:
        //   class 0 best F = 2*(0.5*1)/1.5 = 2/3
        //   class 1 best F = 2*(1*(2/3))/(5/3) = 0.8
        //   F1 = 0.5*(2/3) + 0.5*0.8 = 11/15
        let counts = ConfusionCounts::from_matrix(vec![vec![1, 1], vec![0, 2]]).unwrap();
        let report = f1_report(&counts).unwrap();
        assert!((report.f1 - 11.0 / 15.0).abs() < 1e-9);
        assert!((report.best_f[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((report.best_f[1] - 0.8).abs() < 1e-12);
        assert!((report.recall[0][0] - 0.5).abs() < 1e-12);
        assert!((report.precision[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_cluster_column_gets_zero_f_by_convention() {
        let counts =
            ConfusionCounts::from_matrix(vec![vec![3, 0, 0], vec![1, 2, 0]]).unwrap();
        let report = f1_report(&counts).unwrap();
        for i in 0..2 {
            assert_eq!(report.f_scores[i][2], 0.0);
            assert_eq!(report.precision[i][2], 0.0);
        }
    }

    #[test]
    fn empty_class_is_excluded_with_zero_weight() {
        let counts =
            ConfusionCounts::from_matrix(vec![vec![4, 0], vec![0, 0]]).unwrap();
        let report = f1_report(&counts).unwrap();
        assert_eq!(report.empty_classes, vec![1]);
        assert_eq!(report.f1, 1.0); // class 0 carries all the weight
    }

    #[test]
    fn all_zero_counts_are_a_computation_error() {
        let counts = ConfusionCounts::zeros(2, 2);
        assert!(matches!(f1_report(&counts), Err(Error::Computation(_))));
    }

    #[test]
    fn ragged_matrix_is_rejected() {
        assert!(ConfusionCounts::from_matrix(vec![vec![1, 2], vec![3]]).is_err());
        assert!(ConfusionCounts::from_matrix(vec![]).is_err());
    }

    #[test]
    fn totals_are_consistent() {
        let counts =
            ConfusionCounts::from_matrix(vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        assert_eq!(counts.class_total(0), 6);
        assert_eq!(counts.class_total(1), 15);
        assert_eq!(counts.cluster_total(0), 5);
        assert_eq!(counts.total(), 21);
    }

    proptest! {
        #[test]
        fn f1_stays_in_unit_interval_and_ignores_cluster_permutations(
            matrix in proptest::collection::vec(
                proptest::collection::vec(0u64..50, 4),
                2..5,
            ),
            swap in (0usize..4, 0usize..4),
        ) {
            prop_assume!(matrix.iter().flatten().any(|&v| v > 0));
            let counts = ConfusionCounts::from_matrix(matrix.clone()).unwrap();
            let report = f1_report(&counts).unwrap();
            prop_assert!((0.0..=1.0).contains(&report.f1));

            // permuting cluster columns leaves the score unchanged
            let mut permuted = matrix;
            for row in &mut permuted {
                row.swap(swap.0, swap.1);
            }
            let permuted_report =
                f1_report(&ConfusionCounts::from_matrix(permuted).unwrap()).unwrap();
            prop_assert!((report.f1 - permuted_report.f1).abs() < 1e-12);
        }
    }
}
