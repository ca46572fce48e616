//! Lag sequential analysis over categorical event streams, plus the
//! rewrite/mine loop that induces composite configurations.
//!
//! For an ordered pair of tokens (A, B) at lag L, the corrected z statistic
//! is
//!
//! ```text
//! z = (p(B|A) - p(B)) / sqrt( p(B) * (1 - p(B)) * (1 - p(A)) / (N * p(A)) )
//! ```
//!
//! with N the number of lagged event pairs pooled over all streams, p(A) the
//! antecedent marginal, p(B) the consequent marginal and p(B|A) the
//! conditional. Streams are never concatenated: transitions do not cross
//! stream (sequence) boundaries. Pairs whose variance is undefined, or whose
//! expected count under independence falls below the minimum support, are
//! excluded from the significance set.

use std::collections::BTreeSet;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::table::{fmt_share, fmt_stat, Table};

/// Minimum expected pair count for the normal approximation to be trusted.
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionReport {
    /// Sorted token alphabet; matrices are indexed by position here.
    pub alphabet: Vec<String>,
    pub lag: usize,
    pub alpha: f64,
    /// Two-tailed critical value corresponding to `alpha`.
    pub z_threshold: f64,
    pub min_expected: f64,
    /// Total lagged pairs pooled over all streams.
    pub total_transitions: u64,
    pub counts: Vec<Vec<u64>>,
    /// Expected pair counts under independence.
    pub expected: Vec<Vec<f64>>,
    /// `None` where the variance is undefined.
    pub z: Vec<Vec<Option<f64>>>,
    /// Ordered index pairs significant at `alpha` with enough support.
    pub significant: Vec<(usize, usize)>,
    /// Set when the input cannot support the statistic (fewer than two
    /// distinct tokens, or no transitions at all).
    pub degenerate: bool,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LsaError {
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    InvalidAlpha(f64),
    #[error("lag must be at least 1")]
    ZeroLag,
}

pub fn two_tailed_threshold(alpha: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}

/// Run lag sequential analysis over per-sequence token streams.
pub fn lsa(streams: &[Vec<String>], lag: usize, alpha: f64) -> Result<TransitionReport, LsaError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LsaError::InvalidAlpha(alpha));
    }
    if lag == 0 {
        return Err(LsaError::ZeroLag);
    }

    let alphabet: Vec<String> = streams
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n_tokens = alphabet.len();
    let index = |token: &str| alphabet.iter().position(|t| t == token).unwrap();

    let mut counts = vec![vec![0u64; n_tokens]; n_tokens];
    for stream in streams {
        for window in stream.windows(lag + 1) {
            counts[index(&window[0])][index(&window[lag])] += 1;
        }
    }
    let total: u64 = counts.iter().flatten().sum();
    let row: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<u64> = (0..n_tokens)
        .map(|b| counts.iter().map(|r| r[b]).sum())
        .collect();

    let z_threshold = two_tailed_threshold(alpha);
    let degenerate = n_tokens < 2 || total == 0;
    let mut expected = vec![vec![0.0; n_tokens]; n_tokens];
    let mut z = vec![vec![None; n_tokens]; n_tokens];
    let mut significant = Vec::new();

    if !degenerate {
        let n = total as f64;
        for a in 0..n_tokens {
            for b in 0..n_tokens {
                expected[a][b] = row[a] as f64 * col[b] as f64 / n;
                if row[a] == 0 || row[a] == total || col[b] == 0 || col[b] == total {
                    continue; // variance undefined
                }
                let p_a = row[a] as f64 / n;
                let p_b = col[b] as f64 / n;
                let p_b_given_a = counts[a][b] as f64 / row[a] as f64;
                let variance = p_b * (1.0 - p_b) * (1.0 - p_a) / (n * p_a);
                let score = (p_b_given_a - p_b) / variance.sqrt();
                z[a][b] = Some(score);
                if score.abs() > z_threshold && expected[a][b] >= MIN_EXPECTED_COUNT {
                    significant.push((a, b));
                }
            }
        }
    }

    Ok(TransitionReport {
        alphabet,
        lag,
        alpha,
        z_threshold,
        min_expected: MIN_EXPECTED_COUNT,
        total_transitions: total,
        counts,
        expected,
        z,
        significant,
        degenerate,
    })
}

impl TransitionReport {
    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.alphabet.iter().position(|t| t == token)
    }

    pub fn count_between(&self, a: &str, b: &str) -> u64 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.counts[i][j],
            _ => 0,
        }
    }

    pub fn z_between(&self, a: &str, b: &str) -> Option<f64> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.z[i][j]
    }

    pub fn is_significant(&self, a: &str, b: &str) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.significant.contains(&(i, j)),
            _ => false,
        }
    }

    /// Outgoing transition-probability profile of every token: row
    /// conditionals `p(. | token)`, all zeros for tokens never in antecedent
    /// position.
    pub fn outgoing_profiles(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let sum: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if sum == 0 { 0.0 } else { c as f64 / sum as f64 })
                    .collect()
            })
            .collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "antecedent",
            "consequent",
            "count",
            "expected",
            "z",
            "significant",
        ]);
        for a in 0..self.alphabet.len() {
            for b in 0..self.alphabet.len() {
                t.push_row(vec![
                    self.alphabet[a].clone(),
                    self.alphabet[b].clone(),
                    self.counts[a][b].to_string(),
                    fmt_share(self.expected[a][b]),
                    self.z[a][b].map(fmt_stat).unwrap_or_default(),
                    if self.significant.contains(&(a, b)) { "yes" } else { "no" }.to_string(),
                ]);
            }
        }
        t
    }

    /// Digraph of the significant transitions, edges labelled with z.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph {name} {{\n");
        out.push_str("    rankdir=LR;\n    node [shape=box];\n");
        for token in &self.alphabet {
            out.push_str(&format!("    \"{}\";\n", token.replace('"', "\\\"")));
        }
        for &(a, b) in &self.significant {
            let z = self.z[a][b].unwrap_or_default();
            out.push_str(&format!(
                "    \"{}\" -> \"{}\" [label=\"z={}\"{}];\n",
                self.alphabet[a].replace('"', "\\\""),
                self.alphabet[b].replace('"', "\\\""),
                fmt_stat(z),
                if z < 0.0 { " style=dashed" } else { "" },
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Replace every non-overlapping left-to-right occurrence of the adjacent
/// pair with the composite token. Returns the rewritten stream and the
/// number of replacements (zero when the pair does not occur).
pub fn apply_rewrite(stream: &[String], pair: (&str, &str), replacement: &str) -> (Vec<String>, usize) {
    let mut out = Vec::with_capacity(stream.len());
    let mut replaced = 0;
    let mut i = 0;
    while i < stream.len() {
        if i + 1 < stream.len() && stream[i] == pair.0 && stream[i + 1] == pair.1 {
            out.push(replacement.to_string());
            replaced += 1;
            i += 2;
        } else {
            out.push(stream[i].clone());
            i += 1;
        }
    }
    (out, replaced)
}

/// One grammar rule induced by the mining loop.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RewriteRule {
    pub left: String,
    pub right: String,
    pub replacement: String,
    /// The z score that selected this pair.
    pub z: f64,
    /// 1-based cycle in which the rule was applied.
    pub cycle: usize,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConfigurationGrammar {
    pub rules: Vec<RewriteRule>,
    /// Completed analyse-and-rewrite cycles.
    pub cycles: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MiningOutcome {
    pub grammar: ConfigurationGrammar,
    /// The report of the final analysis pass, in which no further pair
    /// qualified (or the cycle budget ran out).
    pub report: TransitionReport,
    /// The streams after all rewrites.
    pub streams: Vec<Vec<String>>,
}

/// Iteratively group the most strongly attracted adjacent pair into a
/// composite token, as long as the analysis finds significantly attracted
/// pairs. One rule per cycle keeps the procedure deterministic: the maximal
/// positive z wins, ties broken lexicographically.
pub fn mine_configurations(
    streams: &[Vec<String>],
    lag: usize,
    alpha: f64,
    max_cycles: usize,
) -> Result<MiningOutcome, LsaError> {
    let mut streams: Vec<Vec<String>> = streams.to_vec();
    let mut rules: Vec<RewriteRule> = Vec::new();

    loop {
        let report = lsa(&streams, lag, alpha)?;
        let best = report
            .significant
            .iter()
            .filter_map(|&(a, b)| {
                let z = report.z[a][b]?;
                (z > 0.0).then_some((a, b, z))
            })
            .max_by(|x, y| {
                // on a z tie the lexicographically smallest pair wins
                let x_pair = (&report.alphabet[x.0], &report.alphabet[x.1]);
                let y_pair = (&report.alphabet[y.0], &report.alphabet[y.1]);
                x.2.partial_cmp(&y.2)
                    .unwrap()
                    .then_with(|| y_pair.cmp(&x_pair))
            });

        let Some((a, b, z)) = best else {
            return Ok(MiningOutcome {
                grammar: ConfigurationGrammar {
                    cycles: rules.len(),
                    rules,
                },
                report,
                streams,
            });
        };
        if rules.len() >= max_cycles {
            return Ok(MiningOutcome {
                grammar: ConfigurationGrammar {
                    cycles: rules.len(),
                    rules,
                },
                report,
                streams,
            });
        }

        let left = report.alphabet[a].clone();
        let right = report.alphabet[b].clone();
        let replacement = format!("{left}+{right}");
        let mut replaced_total = 0;
        for stream in &mut streams {
            let (rewritten, replaced) = apply_rewrite(stream, (&left, &right), &replacement);
            *stream = rewritten;
            replaced_total += replaced;
        }
        debug_assert!(replaced_total > 0, "a positively attracted pair must occur");
        rules.push(RewriteRule {
            left,
            right,
            replacement,
            z,
            cycle: rules.len() + 1,
        });
    }
}

/// Gapped co-occurrence counts: how often `b` occurs within `1..=window`
/// positions after `a`. A descriptive companion to the lagged statistic; no
/// significance is attached.
pub fn windowed_counts(streams: &[Vec<String>], window: usize) -> (Vec<String>, Vec<Vec<u64>>) {
    let alphabet: Vec<String> = streams
        .iter()
        .flatten()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index = |token: &str| alphabet.iter().position(|t| t == token).unwrap();
    let mut counts = vec![vec![0u64; alphabet.len()]; alphabet.len()];
    for stream in streams {
        for i in 0..stream.len() {
            for j in i + 1..stream.len().min(i + window + 1) {
                counts[index(&stream[i])][index(&stream[j])] += 1;
            }
        }
    }
    (alphabet, counts)
}
