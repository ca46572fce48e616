//! Grouping sequence moves into functional exchanges.
//!
//! Five patterns cover the functional activities observed in review
//! meetings; each exchange is opened by a head activity and optionally
//! closed by an acceptance of its result:
//!
//! | pattern                  | head activities | trailing  |
//! |--------------------------|-----------------|-----------|
//! | cognitive synchronisation| INFO, HYP       | (ACC)     |
//! | review                   | EVAL, JUSTIF    | (ACC)     |
//! | conflict resolution      | REJ             | (ACC)     |
//! | alternative elaboration  | DEV             | (ACC)     |
//! | management               | MAN             |           |
//!
//! A request is classified by the activity it requests and thereby attaches
//! to the exchange its answer opens (an unanswered request keeps the
//! requested kind as a degenerate exchange). Acceptances never open an
//! exchange while one is in progress, whatever their subject.

use crate::diag::Diagnostic;
use crate::model::{Activity, MoveType, Subject};
use crate::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExchangeKind {
    CognitiveSynchronisation,
    Review,
    ConflictResolution,
    AlternativeElaboration,
    Management,
}

impl ExchangeKind {
    /// Table label, as printed in the exchange column.
    pub fn label(self) -> &'static str {
        match self {
            ExchangeKind::CognitiveSynchronisation => "COGN.SYNCHRO",
            ExchangeKind::Review => "REVIEW",
            ExchangeKind::ConflictResolution => "CONFLICT",
            ExchangeKind::AlternativeElaboration => "ALT.ELAB",
            ExchangeKind::Management => "MANAGEMENT",
        }
    }

    /// Short event token used in transition streams.
    pub fn token(self) -> &'static str {
        match self {
            ExchangeKind::CognitiveSynchronisation => "SYNCH",
            ExchangeKind::Review => "REV",
            ExchangeKind::ConflictResolution => "CONF",
            ExchangeKind::AlternativeElaboration => "ALT",
            ExchangeKind::Management => "MAN",
        }
    }

    /// The pattern opened by a head activity, if any.
    pub fn of_head(activity: Activity) -> Option<ExchangeKind> {
        match activity {
            Activity::Info | Activity::Hyp => Some(ExchangeKind::CognitiveSynchronisation),
            Activity::Eval | Activity::Justif => Some(ExchangeKind::Review),
            Activity::Rej => Some(ExchangeKind::ConflictResolution),
            Activity::Dev => Some(ExchangeKind::AlternativeElaboration),
            Activity::Man => Some(ExchangeKind::Management),
            Activity::Intro | Activity::Acc => None,
        }
    }
}

/// One exchange: indices into the sequence's move list plus bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Exchange {
    pub kind: ExchangeKind,
    /// Positions of the member moves within the sequence, in order.
    pub members: Vec<usize>,
    /// Position of the move matching the pattern's head activity.
    pub opener: usize,
    /// Classification caveats (unanswered request, absorbed acceptance with a
    /// non-result subject, rejection of a solution rather than a hypothesis).
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedSequence {
    pub exchanges: Vec<Exchange>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ClassifiedSequence {
    /// Exchange membership per sequence move: `membership[i]` is the index
    /// of the exchange containing move `i`, `None` for the theme opener.
    pub fn membership(&self, len: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; len];
        for (x, e) in self.exchanges.iter().enumerate() {
            for &i in &e.members {
                out[i] = Some(x);
            }
        }
        out
    }
}

/// Thematic base of a subject: what the reference chain bottoms out at
/// inside this sequence. Used to decide whether same-kind moves continue
/// one exchange or open a fresh one.
fn subject_family(seq: &Sequence, subject: &Subject) -> String {
    match subject {
        Subject::MoveResult { activity, rank } => {
            let target = seq
                .moves
                .iter()
                .find(|m| m.coded.rank == *rank && m.coded.activity == *activity);
            match target {
                Some(t) => subject_family(seq, &t.coded.subject),
                None => subject.code(),
            }
        }
        other => other.code(),
    }
}

/// Whether a subject denotes a solution (directly, via its introduction, or
/// via a developed alternative) rather than a hypothesis or other result.
fn targets_a_solution(seq: &Sequence, subject: &Subject) -> bool {
    match subject {
        Subject::Solution(_) => true,
        Subject::MoveResult { activity: Activity::Dev, .. } => true,
        Subject::MoveResult { activity: Activity::Intro, rank } => seq
            .moves
            .iter()
            .find(|m| m.coded.rank == *rank && m.coded.activity == Activity::Intro)
            .is_none_or(|intro| matches!(intro.coded.subject, Subject::Solution(_))),
        _ => false,
    }
}

/// Classify one sequence into an ordered, non-overlapping cover of its
/// non-opening moves.
pub fn classify(seq: &Sequence) -> ClassifiedSequence {
    let mut exchanges: Vec<Exchange> = Vec::new();
    let mut diagnostics: Vec<Diagnostic> = Vec::new();

    let skip_opener = !seq.moves.is_empty() && seq.moves[0].coded.is_solution_intro();
    let start = usize::from(skip_opener);

    for (i, lm) in seq.moves.iter().enumerate().skip(start) {
        let m = &lm.coded;
        let family = subject_family(seq, &m.subject);

        // acceptances close whatever is open, they never start anything new
        if m.activity == Activity::Acc && m.move_type == MoveType::Assertion {
            if let Some(open) = exchanges.last_mut() {
                let opener_result_rank = seq.moves[open.opener].coded.rank;
                let of_result = matches!(
                    &m.subject,
                    Subject::MoveResult { rank, .. } if *rank == opener_result_rank
                );
                if !of_result {
                    open.notes
                        .push(format!("{}: acceptance with a non-result subject", m.id()));
                }
                open.members.push(i);
            } else {
                let inferred = match &m.subject {
                    Subject::MoveResult { activity, .. } => ExchangeKind::of_head(*activity),
                    _ => None,
                }
                .unwrap_or(ExchangeKind::CognitiveSynchronisation);
                diagnostics.push(Diagnostic::warning(
                    m.rank,
                    "acceptance without a preceding exchange",
                ));
                exchanges.push(Exchange {
                    kind: inferred,
                    members: vec![i],
                    opener: i,
                    notes: vec![format!("{}: degenerate acceptance-only exchange", m.id())],
                });
            }
            continue;
        }

        match ExchangeKind::of_head(m.activity) {
            Some(kind) => {
                let mut notes = Vec::new();
                if m.move_type == MoveType::Request {
                    let answered = seq.moves[i + 1..].iter().any(|later| {
                        later.coded.activity == m.activity
                            && later.coded.subject == m.subject
                            && later.coded.move_type == MoveType::Assertion
                    });
                    if !answered {
                        notes.push(format!("{}: request not answered in sequence", m.id()));
                    }
                }
                if kind == ExchangeKind::ConflictResolution && targets_a_solution(seq, &m.subject)
                {
                    notes.push(format!(
                        "{}: rejection of a solution (not a hypothesis) read as conflict",
                        m.id()
                    ));
                }

                let continues = exchanges.last().is_some_and(|open| {
                    open.kind == kind
                        && subject_family(seq, &seq.moves[open.opener].coded.subject) == family
                });
                if continues {
                    let open = exchanges.last_mut().unwrap();
                    open.members.push(i);
                    open.notes.append(&mut notes);
                } else {
                    exchanges.push(Exchange {
                        kind,
                        members: vec![i],
                        opener: i,
                        notes,
                    });
                }
            }
            None => {
                // a nested introduction or similar: no pattern covers it
                diagnostics.push(Diagnostic::warning(
                    m.rank,
                    format!(
                        "move {} ({}) matches no exchange pattern",
                        m.id(),
                        m.activity
                    ),
                ));
                if let Some(open) = exchanges.last_mut() {
                    open.members.push(i);
                    open.notes
                        .push(format!("{}: attached unclassifiable move", m.id()));
                } else {
                    exchanges.push(Exchange {
                        kind: ExchangeKind::CognitiveSynchronisation,
                        members: vec![i],
                        opener: i,
                        notes: vec![format!("{}: degenerate unclassified exchange", m.id())],
                    });
                }
            }
        }
    }

    ClassifiedSequence {
        exchanges,
        diagnostics,
    }
}

/// Event stream of one sequence: the theme opener as its own token,
/// then one token per exchange.
pub fn exchange_stream(seq: &Sequence, classified: &ClassifiedSequence) -> Vec<String> {
    let mut stream = Vec::with_capacity(classified.exchanges.len() + 1);
    if !seq.moves.is_empty() && seq.moves[0].coded.is_solution_intro() {
        stream.push("INTRO".to_string());
    }
    for e in &classified.exchanges {
        stream.push(e.token().to_string());
    }
    stream
}

impl Exchange {
    pub fn token(&self) -> &'static str {
        self.kind.token()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_transcript;
    use crate::level::assign_levels;
    use crate::registry::CriterionRegistry;
    use crate::sequence::segment_sequences;

    fn pipeline(src: &str) -> Vec<(Sequence, ClassifiedSequence)> {
        let t = parse_transcript(src, &CriterionRegistry::default()).unwrap();
        segment_sequences(assign_levels(&t).unwrap().moves)
            .into_iter()
            .map(|s| {
                let c = classify(&s);
                (s, c)
            })
            .collect()
    }

    #[test]
    fn single_man_sequence_is_one_management_exchange() {
        let result = pipeline("# meeting: m\n1|A|next week|MAN/MEET\n");
        assert_eq!(result.len(), 1);
        let (_, c) = &result[0];
        assert_eq!(c.exchanges.len(), 1);
        assert_eq!(c.exchanges[0].kind, ExchangeKind::Management);
        assert_eq!(c.exchanges[0].members, [0]);
    }

    #[test]
    fn same_kind_same_family_moves_merge() {
        let result = pipeline(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|INFO/INTRO1\n\
             3|C|c|INFO/INTRO1\n\
             4|B|d|EVAL/INTRO1\n\
             5|C|e|INFO/INTRO1\n",
        );
        let (_, c) = &result[0];
        let kinds: Vec<ExchangeKind> = c.exchanges.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            [
                ExchangeKind::CognitiveSynchronisation,
                ExchangeKind::Review,
                ExchangeKind::CognitiveSynchronisation
            ]
        );
        assert_eq!(c.exchanges[0].members, [1, 2]);
    }

    #[test]
    fn unanswered_request_forms_a_degenerate_exchange_of_its_kind() {
        let result = pipeline(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|why|REQ/JUSTIF/INTRO1\n\
             3|C|c|INFO/INTRO1\n",
        );
        let (_, c) = &result[0];
        assert_eq!(c.exchanges[0].kind, ExchangeKind::Review);
        assert!(c.exchanges[0].notes[0].contains("not answered"));
        assert_eq!(c.exchanges[1].kind, ExchangeKind::CognitiveSynchronisation);
    }

    #[test]
    fn acceptance_of_preceding_result_closes_the_exchange() {
        let result = pipeline(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|REJ/INTRO1\n\
             3|C|ok|ACC/REJ2\n",
        );
        let (_, c) = &result[0];
        assert_eq!(c.exchanges.len(), 1);
        assert_eq!(c.exchanges[0].kind, ExchangeKind::ConflictResolution);
        assert_eq!(c.exchanges[0].members, [1, 2]);
        assert!(c.exchanges[0]
            .notes
            .iter()
            .any(|n| n.contains("rejection of a solution")));
    }

    #[test]
    fn nested_introduction_is_attached_with_a_diagnostic() {
        let result = pipeline(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|HYP/INTRO1\n\
             3|C|c|INTRO/HYP2\n",
        );
        let (_, c) = &result[0];
        assert_eq!(c.exchanges.len(), 1);
        assert_eq!(c.exchanges[0].members, [1, 2]);
        assert_eq!(c.diagnostics.len(), 1);
        assert!(c.diagnostics[0].message.contains("matches no exchange pattern"));
    }

    #[test]
    fn stream_emits_intro_plus_exchange_tokens() {
        let result = pipeline(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|b|INFO/INTRO1\n\
             3|B|c|DEV/INTRO1\n",
        );
        let (s, c) = &result[0];
        assert_eq!(exchange_stream(s, c), ["INTRO", "SYNCH", "ALT"]);
    }
}
