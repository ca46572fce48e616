//! Inter-rater agreement statistics over two codings of the same move list.

use std::collections::BTreeMap;

use crate::model::Transcript;
use crate::table::{fmt_share, Table};

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ReliabilityReport {
    pub n_items: usize,
    /// Distinct categories observed across both codings.
    pub categories: usize,
    pub observed_agreement: f64,
    /// Cohen's kappa; `None` when expected agreement is 1 (both raters used
    /// a single identical category throughout) and the statistic is undefined.
    pub kappa: Option<f64>,
    /// Perrault-Leigh reliability index.
    pub perrault_leigh: Option<f64>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ReliabilityError {
    #[error("codings differ in length: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty codings")]
    Empty,
    #[error("need at least two categories, found {0}")]
    TooFewCategories(usize),
    #[error("move sets differ: {0}")]
    UnpairedMoves(String),
}

fn tally(a: &[String], b: &[String]) -> Result<ReliabilityReport, ReliabilityError> {
    if a.len() != b.len() {
        return Err(ReliabilityError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(ReliabilityError::Empty);
    }
    let n = a.len() as f64;

    let mut categories: Vec<&String> = a.iter().chain(b).collect();
    categories.sort();
    categories.dedup();
    let k = categories.len();

    let mut marg_a: BTreeMap<&String, f64> = BTreeMap::new();
    let mut marg_b: BTreeMap<&String, f64> = BTreeMap::new();
    let mut agreements = 0usize;
    for (x, y) in a.iter().zip(b) {
        *marg_a.entry(x).or_default() += 1.0;
        *marg_b.entry(y).or_default() += 1.0;
        if x == y {
            agreements += 1;
        }
    }
    let observed = agreements as f64 / n;
    let expected: f64 = categories
        .iter()
        .map(|c| {
            marg_a.get(c).copied().unwrap_or(0.0) / n * (marg_b.get(c).copied().unwrap_or(0.0) / n)
        })
        .sum();

    let kappa = if expected < 1.0 {
        Some((observed - expected) / (1.0 - expected))
    } else {
        None
    };

    let perrault_leigh = if k >= 2 {
        let chance = 1.0 / k as f64;
        Some(if observed >= chance {
            ((observed - chance) * k as f64 / (k as f64 - 1.0)).sqrt()
        } else {
            0.0
        })
    } else {
        None
    };

    Ok(ReliabilityReport {
        n_items: a.len(),
        categories: k,
        observed_agreement: observed,
        kappa,
        perrault_leigh,
    })
}

/// Cohen's kappa: chance-corrected agreement with expected agreement from
/// the marginal products, `(Po - Pe) / (1 - Pe)`.
pub fn cohen_kappa(a: &[String], b: &[String]) -> Result<ReliabilityReport, ReliabilityError> {
    tally(a, b)
}

/// Perrault-Leigh reliability index:
/// `I = sqrt((Po - 1/k) * k / (k - 1))` for `Po >= 1/k`, else 0,
/// with k the number of categories.
pub fn perrault_leigh(a: &[String], b: &[String]) -> Result<ReliabilityReport, ReliabilityError> {
    let report = tally(a, b)?;
    if report.categories < 2 {
        return Err(ReliabilityError::TooFewCategories(report.categories));
    }
    Ok(report)
}

/// How moves are mapped to category labels for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ComparisonKey {
    /// The activity tag alone (the dimension most sensitive to rater
    /// judgement).
    #[default]
    Activity,
    /// The whole code tail (type, activity, polarity, subject, attribute).
    FullCode,
}

/// Pair two codings of the same meeting by move identity. Implicit,
/// coder-inserted introductions are skipped: they are artifacts of
/// normalization, not rater judgements.
pub fn pair_codings(
    a: &Transcript,
    b: &Transcript,
    key: ComparisonKey,
) -> Result<(Vec<String>, Vec<String>), ReliabilityError> {
    let label = |m: &crate::model::CodedMove| match key {
        ComparisonKey::Activity => m.activity.tag().to_string(),
        ComparisonKey::FullCode => m.code(),
    };

    let index_b: BTreeMap<String, &crate::model::CodedMove> = b
        .moves
        .iter()
        .filter(|m| !m.is_implicit())
        .map(|m| (m.id(), m))
        .collect();

    let mut labels_a = Vec::new();
    let mut labels_b = Vec::new();
    let mut missing: Vec<String> = Vec::new();
    let mut seen = 0usize;
    for m in a.moves.iter().filter(|m| !m.is_implicit()) {
        seen += 1;
        match index_b.get(&m.id()) {
            Some(other) => {
                labels_a.push(label(m));
                labels_b.push(label(other));
            }
            None => missing.push(m.id()),
        }
    }
    if !missing.is_empty() || seen != index_b.len() {
        return Err(ReliabilityError::UnpairedMoves(if missing.is_empty() {
            "second coding has extra moves".to_string()
        } else {
            format!("missing from second coding: {}", missing.join(", "))
        }));
    }
    Ok((labels_a, labels_b))
}

impl ReliabilityReport {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["metric", "value"]);
        t.push_row(vec!["n_items".into(), self.n_items.to_string()]);
        t.push_row(vec!["categories".into(), self.categories.to_string()]);
        t.push_row(vec![
            "observed_agreement".into(),
            fmt_share(self.observed_agreement),
        ]);
        t.push_row(vec![
            "kappa".into(),
            self.kappa.map(fmt_share).unwrap_or_else(|| "undefined".into()),
        ]);
        t.push_row(vec![
            "perrault_leigh".into(),
            self.perrault_leigh
                .map(fmt_share)
                .unwrap_or_else(|| "undefined".into()),
        ]);
        t
    }
}
