//! Distribution statistics over levelled corpora: moves and words per
//! nesting level, activities per level, subject classes per level.

use std::collections::BTreeMap;

use crate::model::{Activity, Subject};
use crate::sequence::Sequence;
use crate::table::{fmt_share, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct DistRow {
    pub label: String,
    pub moves: u64,
    pub move_share: f64,
    pub words: u64,
    pub word_share: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub dimension: &'static str,
    pub scope: String,
    pub rows: Vec<DistRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    pub table: DistributionTable,
    /// Pearson correlation between per-level move shares and word shares.
    pub move_word_correlation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityDistribution {
    pub table: DistributionTable,
    /// Shares of the exchange-family groupings at this level:
    /// synchronisation (HYP+INFO), review (JUSTIF+EVAL), alternative
    /// elaboration (DEV). They need not sum to 1.
    pub groups: Vec<(String, f64)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty corpus: no moves to tally")]
    EmptyCorpus,
    #[error("no moves at level {0}")]
    LevelAbsent(u32),
}

/// Subject classes reported by the per-level subject distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SubjectClass {
    Solution,
    Alternative,
    Criterion,
    Hypothesis,
    Evaluation,
    Justification,
    Rejection,
    Introduction,
    Other,
}

impl SubjectClass {
    pub fn of(subject: &Subject) -> SubjectClass {
        match subject {
            Subject::Solution(_) => SubjectClass::Solution,
            Subject::Criterion(_) => SubjectClass::Criterion,
            Subject::MoveResult { activity, .. } => match activity {
                Activity::Dev => SubjectClass::Alternative,
                Activity::Hyp => SubjectClass::Hypothesis,
                Activity::Eval => SubjectClass::Evaluation,
                Activity::Justif => SubjectClass::Justification,
                Activity::Rej => SubjectClass::Rejection,
                Activity::Intro => SubjectClass::Introduction,
                Activity::Man | Activity::Info | Activity::Acc => SubjectClass::Other,
            },
            Subject::Project | Subject::Meeting => SubjectClass::Other,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SubjectClass::Solution => "solution",
            SubjectClass::Alternative => "alternative",
            SubjectClass::Criterion => "criterion",
            SubjectClass::Hypothesis => "hypothesis",
            SubjectClass::Evaluation => "evaluation",
            SubjectClass::Justification => "justification",
            SubjectClass::Rejection => "rejection",
            SubjectClass::Introduction => "introduction",
            SubjectClass::Other => "other",
        }
    }
}

fn build_rows<K: Ord, L: Fn(&K) -> String>(
    tallies: BTreeMap<K, (u64, u64)>,
    label: L,
) -> Vec<DistRow> {
    let total_moves: u64 = tallies.values().map(|(m, _)| m).sum();
    let total_words: u64 = tallies.values().map(|(_, w)| w).sum();
    tallies
        .into_iter()
        .map(|(k, (moves, words))| DistRow {
            label: label(&k),
            moves,
            move_share: moves as f64 / total_moves as f64,
            words,
            word_share: if total_words == 0 {
                0.0
            } else {
                words as f64 / total_words as f64
            },
        })
        .collect()
}

/// Sample Pearson correlation; `None` when fewer than two points or when
/// either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Moves and words per nesting level, with the move/word share correlation.
pub fn level_distribution(seqs: &[&Sequence]) -> Result<LevelDistribution, StatsError> {
    let mut tallies: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for seq in seqs {
        for lm in &seq.moves {
            let entry = tallies.entry(lm.level).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += lm.coded.word_count() as u64;
        }
    }
    if tallies.is_empty() {
        return Err(StatsError::EmptyCorpus);
    }
    let rows = build_rows(tallies, |level| level.to_string());
    let move_shares: Vec<f64> = rows.iter().map(|r| r.move_share).collect();
    let word_shares: Vec<f64> = rows.iter().map(|r| r.word_share).collect();
    Ok(LevelDistribution {
        table: DistributionTable {
            dimension: "level",
            scope: "corpus".to_string(),
            rows,
        },
        move_word_correlation: pearson(&move_shares, &word_shares),
    })
}

/// Activity tallies restricted to one level. Requests count under the
/// activity they request.
pub fn activity_distribution(
    seqs: &[&Sequence],
    level: u32,
) -> Result<ActivityDistribution, StatsError> {
    let mut tallies: BTreeMap<Activity, (u64, u64)> = BTreeMap::new();
    for seq in seqs {
        for lm in seq.moves.iter().filter(|m| m.level == level) {
            let entry = tallies.entry(lm.coded.activity).or_insert((0, 0));
            entry.0 += 1;
            entry.1 += lm.coded.word_count() as u64;
        }
    }
    if tallies.is_empty() {
        return Err(StatsError::LevelAbsent(level));
    }
    let total: u64 = tallies.values().map(|(m, _)| m).sum();
    let share_of = |acts: &[Activity]| {
        acts.iter()
            .filter_map(|a| tallies.get(a))
            .map(|(m, _)| *m)
            .sum::<u64>() as f64
            / total as f64
    };
    let groups = vec![
        ("SYNCH".to_string(), share_of(&[Activity::Hyp, Activity::Info])),
        ("REVIEW".to_string(), share_of(&[Activity::Justif, Activity::Eval])),
        ("ALT.ELAB".to_string(), share_of(&[Activity::Dev])),
    ];
    Ok(ActivityDistribution {
        table: DistributionTable {
            dimension: "activity",
            scope: format!("level {level}"),
            rows: build_rows(tallies, |a| a.tag().to_string()),
        },
        groups,
    })
}

/// Subject-class tallies restricted to one level.
pub fn subject_distribution(
    seqs: &[&Sequence],
    level: u32,
) -> Result<DistributionTable, StatsError> {
    let mut tallies: BTreeMap<SubjectClass, (u64, u64)> = BTreeMap::new();
    for seq in seqs {
        for lm in seq.moves.iter().filter(|m| m.level == level) {
            let entry = tallies
                .entry(SubjectClass::of(&lm.coded.subject))
                .or_insert((0, 0));
            entry.0 += 1;
            entry.1 += lm.coded.word_count() as u64;
        }
    }
    if tallies.is_empty() {
        return Err(StatsError::LevelAbsent(level));
    }
    Ok(DistributionTable {
        dimension: "subject-class",
        scope: format!("level {level}"),
        rows: build_rows(tallies, |c| c.label().to_string()),
    })
}

impl DistributionTable {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[self.dimension, "moves", "move_share", "words", "word_share"]);
        for r in &self.rows {
            t.push_row(vec![
                r.label.clone(),
                r.moves.to_string(),
                fmt_share(r.move_share),
                r.words.to_string(),
                fmt_share(r.word_share),
            ]);
        }
        t
    }
}
