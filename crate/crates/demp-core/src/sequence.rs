//! Partitioning a levelled transcript into verbal sequences.
//!
//! A sequence groups the moves whose main subject is one and the same part
//! of the document: it runs from one theme-opening introduction (or the
//! start of a management block) up to the next opener. Themes derived inside
//! a sequence stay part of it.

use crate::level::LeveledMove;
use crate::model::{Activity, Subject};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    Solution,
    Management,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    /// 1-based position in the transcript.
    pub index: usize,
    pub main_subject: Subject,
    pub kind: SequenceKind,
    pub moves: Vec<LeveledMove>,
}

impl Sequence {
    /// The opener is always the first move of the sequence.
    pub fn opener(&self) -> &LeveledMove {
        &self.moves[0]
    }
}

fn classify_kind(main_subject: &Subject, moves: &[LeveledMove]) -> SequenceKind {
    let opener_is_task = matches!(main_subject, Subject::Project | Subject::Meeting);
    let all_man = moves.iter().all(|m| m.coded.activity == Activity::Man);
    if opener_is_task || all_man {
        SequenceKind::Management
    } else {
        SequenceKind::Solution
    }
}

/// Split levelled moves into contiguous sequences. Every move lands in
/// exactly one sequence and concatenating them restores transcript order.
pub fn segment_sequences(moves: Vec<LeveledMove>) -> Vec<Sequence> {
    let mut sequences: Vec<Sequence> = Vec::new();
    let mut current: Vec<LeveledMove> = Vec::new();

    let flush = |current: &mut Vec<LeveledMove>, sequences: &mut Vec<Sequence>| {
        if current.is_empty() {
            return;
        }
        let moves = std::mem::take(current);
        let main_subject = moves[0].coded.subject.clone();
        let kind = classify_kind(&main_subject, &moves);
        sequences.push(Sequence {
            index: sequences.len() + 1,
            main_subject,
            kind,
            moves,
        });
    };

    for lm in moves {
        // every level-0 move opens a new sequence; nested moves never are
        if lm.level == 0 {
            flush(&mut current, &mut sequences);
        }
        current.push(lm);
    }
    flush(&mut current, &mut sequences);
    sequences
}

/// Split into (solution, management) partitions; analyses consume the
/// solution partition unless management is explicitly opted in.
pub fn partition_by_kind(seqs: Vec<Sequence>) -> (Vec<Sequence>, Vec<Sequence>) {
    seqs.into_iter()
        .partition(|s| s.kind == SequenceKind::Solution)
}
