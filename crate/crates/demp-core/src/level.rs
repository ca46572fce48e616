//! Nesting-level assignment.
//!
//! Every move gets a level reflecting how deeply its subject is embedded
//! under the introduction that opened the discussion theme:
//!
//! - Rule A nests a move one level below the move whose result (or whose
//!   introduced solution) it takes as subject. Attributes play no role here.
//! - Rule B nests a move one level below the move whose *attribute* it takes
//!   as subject, for moves that discuss a criterion.
//!
//! Theme-opening introductions sit at level 0. Rule B's level arithmetic
//! (reference level + 1) is recorded in the `rule` field so downstream
//! consumers can tell which rule produced a level.

use crate::diag::Diagnostic;
use crate::model::{Activity, CodedMove, Rank, Subject, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelRule {
    /// Synthesized theme opener; rendered as a blank rule cell.
    Root,
    A,
    B,
}

impl LevelRule {
    pub fn label(self) -> &'static str {
        match self {
            LevelRule::Root => "",
            LevelRule::A => "A",
            LevelRule::B => "B",
        }
    }
}

/// A move with its assigned nesting level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeveledMove {
    pub coded: CodedMove,
    pub level: u32,
    pub rule: LevelRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelingOutcome {
    pub moves: Vec<LeveledMove>,
    /// Cross-sequence back-references and similar non-fatal findings.
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LevelError {
    #[error("move {rank}: unresolvable subject {subject}")]
    Unresolvable { rank: Rank, subject: String },
}

struct Assigned {
    level: u32,
    /// Index of the opener of the sequence this move belongs to.
    opener: usize,
}

/// Assign a nesting level to every move. Expects a validated, normalized
/// transcript; dangling references surface as [`LevelError::Unresolvable`].
pub fn assign_levels(t: &Transcript) -> Result<LevelingOutcome, LevelError> {
    let mut assigned: Vec<Assigned> = Vec::with_capacity(t.moves.len());
    let mut out: Vec<LeveledMove> = Vec::with_capacity(t.moves.len());
    let mut diagnostics = Vec::new();
    // (label, index of its most recent introduction)
    let mut intros: Vec<(String, usize)> = Vec::new();
    let mut current_opener: Option<usize> = None;
    let mut management_block = false;

    for (i, m) in t.moves.iter().enumerate() {
        let unresolvable = || LevelError::Unresolvable {
            rank: m.rank,
            subject: m.subject.code(),
        };

        let (level, rule, opener) = if m.is_solution_intro() {
            // a theme opener; implicit ones carry no rule annotation
            let rule = if m.is_implicit() { LevelRule::Root } else { LevelRule::A };
            if let Subject::Solution(label) = &m.subject {
                match intros.iter_mut().find(|(l, _)| l == label) {
                    Some(entry) => entry.1 = i,
                    None => intros.push((label.clone(), i)),
                }
            }
            current_opener = Some(i);
            management_block = false;
            (0, rule, i)
        } else if m.activity == Activity::Man
            && matches!(m.subject, Subject::Project | Subject::Meeting)
        {
            // management moves group into their own blocks: the first of a
            // run opens the block, the rest act on its shared subject
            if management_block {
                (1, LevelRule::A, current_opener.unwrap_or(i))
            } else {
                current_opener = Some(i);
                management_block = true;
                (0, LevelRule::Root, i)
            }
        } else {
            match &m.subject {
                Subject::Solution(label) => {
                    let (_, intro_idx) = intros
                        .iter()
                        .rev()
                        .find(|(l, _)| l == label)
                        .ok_or_else(unresolvable)?;
                    if current_opener != Some(assigned[*intro_idx].opener) {
                        diagnostics.push(Diagnostic::warning(
                            m.rank,
                            format!("subject SOL{label} resolves outside the current sequence"),
                        ));
                    }
                    (assigned[*intro_idx].level + 1, LevelRule::A, current_opener.unwrap_or(i))
                }
                Subject::MoveResult { activity, rank } => {
                    let target = t.moves[..i]
                        .iter()
                        .position(|p| p.rank == *rank && p.activity == *activity)
                        .ok_or_else(unresolvable)?;
                    if current_opener != Some(assigned[target].opener) {
                        diagnostics.push(Diagnostic::warning(
                            m.rank,
                            format!(
                                "subject {} resolves outside the current sequence",
                                m.subject.code()
                            ),
                        ));
                    }
                    (assigned[target].level + 1, LevelRule::A, current_opener.unwrap_or(i))
                }
                Subject::Criterion(c) => {
                    let target = t.moves[..i]
                        .iter()
                        .rposition(|p| p.attribute.as_ref().is_some_and(|a| a.matches(c)))
                        .ok_or_else(unresolvable)?;
                    if current_opener != Some(assigned[target].opener) {
                        diagnostics.push(Diagnostic::warning(
                            m.rank,
                            format!(
                                "criterion subject {} was last used outside the current sequence",
                                m.subject.code()
                            ),
                        ));
                    }
                    (assigned[target].level + 1, LevelRule::B, current_opener.unwrap_or(i))
                }
                Subject::Project | Subject::Meeting => {
                    // invalid outside MAN blocks; validation reports it
                    return Err(unresolvable());
                }
            }
        };

        assigned.push(Assigned { level, opener });
        out.push(LeveledMove {
            coded: m.clone(),
            level,
            rule,
        });
    }

    Ok(LevelingOutcome {
        moves: out,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_transcript;
    use crate::registry::CriterionRegistry;

    fn levels_of(src: &str) -> Vec<(u32, LevelRule)> {
        let t = parse_transcript(src, &CriterionRegistry::default()).unwrap();
        assign_levels(&t)
            .unwrap()
            .moves
            .into_iter()
            .map(|lm| (lm.level, lm.rule))
            .collect()
    }

    #[test]
    fn single_intro_sits_at_level_zero() {
        let lv = levels_of("# meeting: m\n1|A|here|INTRO/SOLa\n");
        assert_eq!(lv, [(0, LevelRule::A)]);
    }

    #[test]
    fn reference_chain_deepens_one_level_per_hop() {
        let lv = levels_of(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|HYP/INTRO1\n\
             3|C|c|REJ/HYP2\n\
             4|A|d|ACC/REJ3\n",
        );
        let depths: Vec<u32> = lv.iter().map(|(l, _)| *l).collect();
        assert_eq!(depths, [0, 1, 2, 3]);
    }

    #[test]
    fn solution_subject_levels_against_its_introduction() {
        let lv = levels_of("# meeting: m\n1|A|a|INTRO/SOLa\n2|B|b|EVAL/SOLa\n");
        assert_eq!(lv[1], (1, LevelRule::A));
    }

    #[test]
    fn rule_b_nests_below_the_attribute_use() {
        let lv = levels_of(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|EVAL/INTRO1/CRIT.Ca\n\
             3|C|c|INFO/CRIT.Ca\n",
        );
        assert_eq!(lv[2], (2, LevelRule::B));
    }

    #[test]
    fn cross_sequence_reference_is_levelled_and_flagged() {
        let t = parse_transcript(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|HYP/INTRO1\n\
             3|A|c|INTRO/SOLb\n\
             4|B|d|ACC/HYP2\n",
            &CriterionRegistry::default(),
        )
        .unwrap();
        let outcome = assign_levels(&t).unwrap();
        assert_eq!(outcome.moves[3].level, 2);
        assert_eq!(outcome.diagnostics.len(), 1);
        assert!(outcome.diagnostics[0]
            .message
            .contains("outside the current sequence"));
    }

    #[test]
    fn management_runs_form_their_own_block() {
        let lv = levels_of(
            "# meeting: m\n\
             1|A|plan|MAN/MEET\n\
             2|B|more|MAN/MEET\n\
             3|A|doc|INTRO/SOLa\n\
             4|B|eh|EVAL/INTRO3\n",
        );
        assert_eq!(
            lv,
            [
                (0, LevelRule::Root),
                (1, LevelRule::A),
                (0, LevelRule::A),
                (1, LevelRule::A)
            ]
        );
    }

    #[test]
    fn dangling_reference_is_unresolvable() {
        let t = parse_transcript(
            "# meeting: m\n1|A|a|INTRO/SOLa\n2|B|b|ACC/HYP9\n",
            &CriterionRegistry::default(),
        )
        .unwrap();
        assert!(matches!(
            assign_levels(&t),
            Err(LevelError::Unresolvable { .. })
        ));
    }
}
