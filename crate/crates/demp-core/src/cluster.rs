//! Agglomerative hierarchical clustering of event tokens by the similarity
//! of their outgoing transition-probability profiles.

use std::str::FromStr;

use crate::lsa::TransitionReport;
use crate::table::{fmt_stat, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    Single,
    #[default]
    Complete,
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Linkage, String> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            other => Err(format!("unknown linkage {other:?} (single|complete)")),
        }
    }
}

/// One agglomeration step. Cluster ids follow the usual convention: leaves
/// are `0..n`, the cluster formed at step `k` gets id `n + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub height: f64,
    /// Leaves in the newly formed cluster.
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<String>,
    pub merges: Vec<Merge>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ClusterError {
    #[error("clustering needs at least two tokens, got {0}")]
    TooFewTokens(usize),
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Cluster the report's tokens. Pairwise dissimilarity is the Euclidean
/// distance between outgoing transition-probability profiles; cluster
/// distances follow the chosen linkage (minimum for single, maximum for
/// complete). Ties break towards the smallest cluster-id pair, which keeps
/// the output deterministic.
pub fn cluster(report: &TransitionReport, linkage: Linkage) -> Result<Dendrogram, ClusterError> {
    let n = report.alphabet.len();
    if n < 2 {
        return Err(ClusterError::TooFewTokens(n));
    }
    let profiles = report.outgoing_profiles();

    // active[i] = Some(cluster id); dist is kept dense over active slots
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes: Vec<usize> = vec![1; n];
    let mut active: Vec<bool> = vec![true; n];
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(&profiles[i], &profiles[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    let mut merges = Vec::with_capacity(n - 1);
    for step in 0..n - 1 {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            for j in i + 1..n {
                if !active[j] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((_, _, d)) => dist[i][j] < d,
                };
                if better {
                    best = Some((i, j, dist[i][j]));
                }
            }
        }
        let (i, j, height) = best.expect("at least two active clusters remain");

        merges.push(Merge {
            left: ids[i].min(ids[j]),
            right: ids[i].max(ids[j]),
            height,
            size: sizes[i] + sizes[j],
        });

        // fold j into i, which now represents the merged cluster
        for k in 0..n {
            if k == i || k == j || !active[k] {
                continue;
            }
            dist[i][k] = match linkage {
                Linkage::Single => dist[i][k].min(dist[j][k]),
                Linkage::Complete => dist[i][k].max(dist[j][k]),
            };
            dist[k][i] = dist[i][k];
        }
        active[j] = false;
        sizes[i] += sizes[j];
        ids[i] = n + step;
    }

    Ok(Dendrogram {
        leaves: report.alphabet.clone(),
        merges,
    })
}

impl Dendrogram {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["step", "left", "right", "height", "size"]);
        for (k, m) in self.merges.iter().enumerate() {
            t.push_row(vec![
                k.to_string(),
                self.cluster_label(m.left),
                self.cluster_label(m.right),
                fmt_stat(m.height),
                m.size.to_string(),
            ]);
        }
        t
    }

    fn cluster_label(&self, id: usize) -> String {
        if id < self.leaves.len() {
            self.leaves[id].clone()
        } else {
            format!("#{id}")
        }
    }

    /// Heights in merge order; non-decreasing for single and complete linkage.
    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsa::lsa;

    fn streams(spec: &[&[&str]]) -> Vec<Vec<String>> {
        spec.iter()
            .map(|s| s.iter().map(|t| t.to_string()).collect())
            .collect()
    }

    #[test]
    fn identical_profiles_merge_at_height_zero() {
        // A and B both always lead to C
        let report = lsa(
            &streams(&[&["A", "C"], &["B", "C"], &["A", "C"], &["B", "C"]]),
            1,
            0.05,
        )
        .unwrap();
        let d = cluster(&report, Linkage::Complete).unwrap();
        let first = &d.merges[0];
        let pair = [
            d.leaves[first.left].as_str(),
            d.leaves[first.right].as_str(),
        ];
        assert_eq!(pair, ["A", "B"]);
        assert_eq!(first.height, 0.0);
    }

    #[test]
    fn first_merge_is_the_identical_pair_not_the_orthogonal_one() {
        // A and B lead to C; D leads to A: D's profile is orthogonal
        let report = lsa(
            &streams(&[&["A", "C"], &["B", "C"], &["D", "A"]]),
            1,
            0.05,
        )
        .unwrap();
        let d = cluster(&report, Linkage::Complete).unwrap();
        let first = &d.merges[0];
        let mut pair = [
            d.leaves[first.left].clone(),
            d.leaves[first.right].clone(),
        ];
        pair.sort();
        assert_eq!(pair, ["A", "B"]);
        assert_eq!(first.height, 0.0);
    }

    #[test]
    fn heights_are_non_decreasing_under_both_linkages() {
        let report = lsa(
            &streams(&[
                &["A", "B", "C", "D", "A", "C"],
                &["B", "D", "A", "B"],
                &["C", "A", "D", "B", "C"],
            ]),
            1,
            0.05,
        )
        .unwrap();
        for linkage in [Linkage::Single, Linkage::Complete] {
            let d = cluster(&report, linkage).unwrap();
            let h = d.heights();
            assert!(h.windows(2).all(|w| w[0] <= w[1]), "{h:?}");
            assert_eq!(d.merges.len(), report.alphabet.len() - 1);
            assert_eq!(d.merges.last().unwrap().size, report.alphabet.len());
        }
    }

    #[test]
    fn single_token_report_cannot_cluster() {
        let report = lsa(&streams(&[&["A", "A"]]), 1, 0.05).unwrap();
        assert_eq!(
            cluster(&report, Linkage::Complete),
            Err(ClusterError::TooFewTokens(1))
        );
    }

    #[test]
    fn review_grammar_clusters_match_an_independent_distance_oracle() {
        // independent tally: outgoing profiles and pairwise distances
        // computed here from the raw streams, not via the report
        let corpus = crate::synthetic::review_session_streams(7, 300);
        let mut alphabet: Vec<String> = corpus.iter().flatten().cloned().collect();
        alphabet.sort();
        alphabet.dedup();
        let idx = |t: &str| alphabet.iter().position(|x| x == t).unwrap();
        let n = alphabet.len();
        let mut counts = vec![vec![0u64; n]; n];
        for s in &corpus {
            for w in s.windows(2) {
                counts[idx(&w[0])][idx(&w[1])] += 1;
            }
        }
        let profile = |a: usize| -> Vec<f64> {
            let row: u64 = counts[a].iter().sum();
            counts[a]
                .iter()
                .map(|&c| if row == 0 { 0.0 } else { c as f64 / row as f64 })
                .collect()
        };
        let mut best: Option<(usize, usize, f64)> = None;
        for a in 0..n {
            for b in a + 1..n {
                let d = euclidean(&profile(a), &profile(b));
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((a, b, d));
                }
            }
        }
        let (oracle_a, oracle_b, _) = best.unwrap();

        // in this grammar developments are always followed by evaluations
        // and vice versa: their profiles are orthogonal one-hots, so they
        // can never be the closest pair
        let dev_eval = euclidean(&profile(idx("DEV")), &profile(idx("EVAL")));
        assert!((dev_eval - 2f64.sqrt()).abs() < 1e-12);
        assert_ne!(
            (oracle_a, oracle_b),
            (idx("DEV").min(idx("EVAL")), idx("DEV").max(idx("EVAL")))
        );

        let report = lsa(&corpus, 1, 0.05).unwrap();
        assert_eq!(report.alphabet, alphabet);
        let d = cluster(&report, Linkage::Complete).unwrap();
        let first = &d.merges[0];
        assert_eq!(
            (first.left.min(first.right), first.left.max(first.right)),
            (oracle_a, oracle_b),
            "first merge must be the closest-profile pair"
        );
        let h = d.heights();
        assert!(h.windows(2).all(|w| w[0] <= w[1]));
    }
}
