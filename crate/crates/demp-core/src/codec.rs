//! Parsing, rendering, validation and normalization of transcript files.
//!
//! File layout: UTF-8, a `# meeting: <id>` header, then one record per line.
//! Records are pipe-delimited `rank|speaker|text|code`, keeping the raw
//! utterance next to its code so word counts stay available:
//!
//! ```text
//! 52|B|Why did you put 150 there?|REQ/JUSTIF/INTRO51
//! 51|--||INTRO/SOLed
//! ```
//!
//! The code tail is `[REQ/]ACTIVITY[+|-]/SUBJECT[/CRIT.Kx]`. The `REQ/`
//! prefix marks requests (assertions are unmarked); `+`/`-` annotate the
//! polarity of EVAL/JUSTIF/REJ tags. The `--` speaker marks implicit
//! introductions inserted when a subject is discussed without having been
//! introduced.

use std::fmt;

use crate::diag::Diagnostic;
use crate::model::{
    Activity, CodedMove, CriterionKind, CriterionRef, MoveType, Polarity, Rank, Speaker, Subject,
    Transcript, IMPLICIT_MARKER,
};
use crate::registry::CriterionRegistry;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MoveParseError {
    #[error("malformed record: expected `rank|speaker|text|code`")]
    FieldCount,
    #[error("invalid rank {0:?}")]
    BadRank(String),
    #[error("invalid speaker {0:?}")]
    BadSpeaker(String),
    #[error("empty code tail")]
    EmptyCode,
    #[error("unknown activity tag {0:?}")]
    UnknownActivity(String),
    #[error("polarity annotation not allowed on {0:?}")]
    BadPolarity(String),
    #[error("unparsable subject {0:?}")]
    BadSubject(String),
    #[error("unparsable attribute {0:?}")]
    BadAttribute(String),
    #[error("unknown criterion letter {0:?}")]
    UnknownCriterionLetter(String),
    #[error("trailing code token {0:?}")]
    TrailingToken(String),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TranscriptParseError {
    #[error("line {line}: {source}")]
    Move {
        line: usize,
        #[source]
        source: MoveParseError,
    },
    #[error("missing `# meeting: <id>` header")]
    MissingHeader,
    #[error("line {line}: duplicate rank {rank}")]
    DuplicateRank { line: usize, rank: Rank },
    #[error("line {line}: rank {rank} does not increase over {previous}")]
    NonIncreasingRank {
        line: usize,
        rank: Rank,
        previous: Rank,
    },
}

fn parse_criterion(token: &str, registry: &CriterionRegistry) -> Result<CriterionRef, MoveParseError> {
    let rest = token
        .strip_prefix("CRIT.")
        .ok_or_else(|| MoveParseError::BadAttribute(token.to_string()))?;
    let mut chars = rest.chars();
    let kind = match chars.next() {
        Some('F') => CriterionKind::Form,
        Some('C') => CriterionKind::Content,
        _ => return Err(MoveParseError::BadAttribute(token.to_string())),
    };
    let letter = match (chars.next(), chars.next()) {
        (None, _) => None,
        (Some(l), None) if l.is_ascii_lowercase() => Some(l),
        _ => return Err(MoveParseError::BadAttribute(token.to_string())),
    };
    if let Some(l) = letter {
        if !registry.contains(kind, l) {
            return Err(MoveParseError::UnknownCriterionLetter(token.to_string()));
        }
    }
    Ok(CriterionRef::new(kind, letter))
}

fn parse_subject(token: &str, registry: &CriterionRegistry) -> Result<Subject, MoveParseError> {
    if let Some(label) = token.strip_prefix("SOL") {
        if !label.is_empty() && label.chars().all(|c| c.is_ascii_alphanumeric()) {
            return Ok(Subject::Solution(label.to_string()));
        }
        return Err(MoveParseError::BadSubject(token.to_string()));
    }
    match token {
        "PROJ" => return Ok(Subject::Project),
        "MEET" => return Ok(Subject::Meeting),
        _ => {}
    }
    if token.starts_with("CRIT.") {
        let c = parse_criterion(token, registry).map_err(|e| match e {
            MoveParseError::BadAttribute(t) => MoveParseError::BadSubject(t),
            other => other,
        })?;
        return Ok(Subject::Criterion(c));
    }
    // result of a previous move: ACTIVITY followed by a rank
    let split = token.find(|c: char| c.is_ascii_digit());
    if let Some(at) = split {
        let (tag, rank) = token.split_at(at);
        if let (Some(activity), Ok(rank)) = (Activity::from_tag(tag), rank.parse::<Rank>()) {
            return Ok(Subject::MoveResult { activity, rank });
        }
    }
    Err(MoveParseError::BadSubject(token.to_string()))
}

/// Parse a single transcript record into a typed move.
///
/// The TYPE field defaults to assertion; only the `REQ` marker appears in
/// codes. Criterion letters are checked against the registry.
pub fn parse_move(line: &str, registry: &CriterionRegistry) -> Result<CodedMove, MoveParseError> {
    let (rank, rest) = line.split_once('|').ok_or(MoveParseError::FieldCount)?;
    let (speaker, rest) = rest.split_once('|').ok_or(MoveParseError::FieldCount)?;
    // the code tail never contains '|', so split it off the right and let
    // the free text keep any pipes it happens to contain
    let (text, code) = rest.rsplit_once('|').ok_or(MoveParseError::FieldCount)?;

    let rank: Rank = rank
        .trim()
        .parse()
        .map_err(|()| MoveParseError::BadRank(rank.to_string()))?;

    let speaker = speaker.trim();
    let speaker = if speaker == IMPLICIT_MARKER {
        Speaker::Implicit
    } else if !speaker.is_empty() && !speaker.contains(['|', '/']) && !speaker.contains(char::is_whitespace)
    {
        Speaker::named(speaker)
    } else {
        return Err(MoveParseError::BadSpeaker(speaker.to_string()));
    };

    let mut tokens = code.split('/').peekable();
    let mut move_type = MoveType::Assertion;
    if tokens.peek() == Some(&"REQ") {
        move_type = MoveType::Request;
        tokens.next();
    }
    let activity_token = tokens.next().filter(|t| !t.is_empty()).ok_or(MoveParseError::EmptyCode)?;
    let (activity_tag, polarity) = match activity_token.as_bytes().last() {
        Some(b'+') => (&activity_token[..activity_token.len() - 1], Some(Polarity::Positive)),
        Some(b'-') => (&activity_token[..activity_token.len() - 1], Some(Polarity::Negative)),
        _ => (activity_token, None),
    };
    let activity = Activity::from_tag(activity_tag)
        .ok_or_else(|| MoveParseError::UnknownActivity(activity_token.to_string()))?;
    if polarity.is_some() && !activity.allows_polarity() {
        return Err(MoveParseError::BadPolarity(activity_token.to_string()));
    }

    let subject_token = tokens
        .next()
        .ok_or_else(|| MoveParseError::BadSubject(String::new()))?;
    let subject = parse_subject(subject_token, registry)?;

    let attribute = match tokens.next() {
        None => None,
        Some(token) => Some(parse_criterion(token, registry)?),
    };
    if let Some(extra) = tokens.next() {
        return Err(MoveParseError::TrailingToken(extra.to_string()));
    }

    Ok(CodedMove {
        speaker,
        rank,
        text: text.to_string(),
        move_type,
        activity,
        polarity,
        subject,
        attribute,
    })
}

/// Render a move back to its canonical record form.
/// `parse_move(render_move(m))` is structurally identical to `m`.
pub fn render_move(m: &CodedMove) -> String {
    format!("{}|{}|{}|{}", m.rank, m.speaker, m.text, m.code())
}

/// Parse a whole transcript file: header line, then one record per line.
/// Blank lines and `#` comment lines are skipped; rank gaps are preserved
/// (eliminated regulator or inaudible turns leave them).
pub fn parse_transcript(
    stream: &str,
    registry: &CriterionRegistry,
) -> Result<Transcript, TranscriptParseError> {
    let mut lines = stream.lines().enumerate();
    let meeting_id = loop {
        match lines.next() {
            None => return Err(TranscriptParseError::MissingHeader),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => match l.trim().strip_prefix("# meeting:") {
                Some(id) => break id.trim().to_string(),
                None => return Err(TranscriptParseError::MissingHeader),
            },
        }
    };

    let mut moves: Vec<CodedMove> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let trimmed = raw.trim_end_matches(['\r']);
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let m = parse_move(trimmed, registry)
            .map_err(|source| TranscriptParseError::Move { line, source })?;
        if let Some(prev) = moves.last() {
            if m.rank == prev.rank {
                return Err(TranscriptParseError::DuplicateRank { line, rank: m.rank });
            }
            if m.rank < prev.rank {
                return Err(TranscriptParseError::NonIncreasingRank {
                    line,
                    rank: m.rank,
                    previous: prev.rank,
                });
            }
        }
        moves.push(m);
    }
    Ok(Transcript::new(meeting_id, moves))
}

/// Render a transcript in canonical file form.
pub fn render_transcript(t: &Transcript) -> String {
    let mut out = format!("# meeting: {}\n", t.meeting_id);
    for m in &t.moves {
        out.push_str(&render_move(m));
        out.push('\n');
    }
    out
}

/// Check the transcript model invariants. Returns an empty list when every
/// invariant holds; error severity marks violations normalization cannot fix.
pub fn validate(t: &Transcript) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut introduced: Vec<&str> = Vec::new();

    for (i, m) in t.moves.iter().enumerate() {
        if m.is_implicit() && (m.activity != Activity::Intro || !m.text.is_empty()) {
            diags.push(Diagnostic::error(
                m.rank,
                "implicit marker is reserved for empty-text introductions",
            ));
        }

        if m.activity == Activity::Man
            && !matches!(m.subject, Subject::Project | Subject::Meeting)
        {
            diags.push(Diagnostic::error(
                m.rank,
                format!("MAN moves take PROJ or MEET subjects, found {}", m.subject.code()),
            ));
        }

        match &m.subject {
            Subject::Project | Subject::Meeting => {
                if m.activity != Activity::Man {
                    diags.push(Diagnostic::error(
                        m.rank,
                        format!(
                            "subject {} is restricted to MAN moves, found on {}",
                            m.subject.code(),
                            m.activity
                        ),
                    ));
                }
            }
            Subject::MoveResult { activity, rank } => {
                let resolved = t.moves[..i]
                    .iter()
                    .any(|p| p.rank == *rank && p.activity == *activity);
                if !resolved {
                    diags.push(Diagnostic::error(
                        m.rank,
                        format!(
                            "dangling reference: no earlier {} move at rank {}",
                            activity, rank
                        ),
                    ));
                }
            }
            Subject::Criterion(c) => {
                let used = t.moves[..i]
                    .iter()
                    .any(|p| p.attribute.as_ref().is_some_and(|a| a.matches(c)));
                if !used {
                    diags.push(Diagnostic::error(
                        m.rank,
                        format!("criterion subject {} was never used as an attribute", c),
                    ));
                }
            }
            Subject::Solution(label) => {
                if m.activity != Activity::Intro && !introduced.contains(&label.as_str()) {
                    // normalize() repairs this by inserting an implicit
                    // introduction, unless the pre slot is already taken
                    let slot = Rank::pre(m.rank.major());
                    let fixable = !m.rank.is_pre() && !t.moves.iter().any(|p| p.rank == slot);
                    if fixable {
                        diags.push(Diagnostic::warning(
                            m.rank,
                            format!("solution {label:?} used before any introduction"),
                        ));
                    } else {
                        diags.push(Diagnostic::error(
                            m.rank,
                            format!(
                                "solution {label:?} is never introduced and the implicit slot {slot} is occupied"
                            ),
                        ));
                    }
                }
            }
        }

        if m.is_solution_intro() {
            if let Subject::Solution(label) = &m.subject {
                if !introduced.contains(&label.as_str()) {
                    introduced.push(label);
                }
            }
        }
    }
    diags
}

/// Insert an implicit introduction before the first use of every solution
/// that is discussed without having been introduced. The synthesized move
/// reuses the rank of the first referencing move with a `.0` sub-rank that
/// orders just before it. Idempotent.
pub fn normalize(t: &Transcript) -> Transcript {
    let mut introduced: Vec<String> = Vec::new();
    let mut out: Vec<CodedMove> = Vec::with_capacity(t.moves.len());

    for m in &t.moves {
        if let Subject::Solution(label) = &m.subject {
            if m.activity != Activity::Intro && !introduced.iter().any(|l| l == label) {
                let slot = Rank::pre(m.rank.major());
                let taken = m.rank.is_pre() || t.moves.iter().any(|p| p.rank == slot);
                if !taken {
                    out.push(CodedMove {
                        speaker: Speaker::Implicit,
                        rank: slot,
                        text: String::new(),
                        move_type: MoveType::Assertion,
                        activity: Activity::Intro,
                        polarity: None,
                        subject: Subject::Solution(label.clone()),
                        attribute: None,
                    });
                    introduced.push(label.clone());
                }
            }
        }
        if m.is_solution_intro() {
            if let Subject::Solution(label) = &m.subject {
                if !introduced.iter().any(|l| l == label) {
                    introduced.push(label.clone());
                }
            }
        }
        out.push(m.clone());
    }
    Transcript::new(t.meeting_id.clone(), out)
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_transcript(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::has_errors;

    fn reg() -> CriterionRegistry {
        CriterionRegistry::default()
    }

    #[test]
    fn parses_a_full_assertion_record() {
        let m = parse_move(
            "60|M|Ah no, this is JUSTIF a type, like the type of the message itself.|REJ/HYP57/CRIT.Ca",
            &reg(),
        )
        .unwrap();
        assert_eq!(m.speaker, Speaker::named("M"));
        assert_eq!(m.rank, Rank::main(60));
        assert_eq!(m.move_type, MoveType::Assertion);
        assert_eq!(m.activity, Activity::Rej);
        assert_eq!(m.subject, Subject::move_result(Activity::Hyp, Rank::main(57)));
        assert_eq!(
            m.attribute,
            Some(CriterionRef::new(CriterionKind::Content, Some('a')))
        );
        assert_eq!(m.word_count(), 14);
    }

    #[test]
    fn parses_a_request_record() {
        let m = parse_move("52|B|Why did you put 150 there?|REQ/JUSTIF/INTRO51", &reg()).unwrap();
        assert_eq!(m.move_type, MoveType::Request);
        assert_eq!(m.activity, Activity::Justif);
        assert_eq!(m.subject, Subject::move_result(Activity::Intro, Rank::main(51)));
        assert_eq!(m.attribute, None);
    }

    #[test]
    fn parses_an_implicit_introduction() {
        let m = parse_move("51|--||INTRO/SOLed", &reg()).unwrap();
        assert!(m.is_implicit());
        assert_eq!(m.activity, Activity::Intro);
        assert_eq!(m.subject, Subject::solution("ed"));
        assert_eq!(m.text, "");
        assert_eq!(m.word_count(), 0);
    }

    #[test]
    fn parses_polarity_and_criterion_subjects() {
        let m = parse_move("7|A|too slow|EVAL-/SOLx/CRIT.Cf", &reg()).unwrap();
        assert_eq!(m.polarity, Some(Polarity::Negative));
        let m = parse_move("8|A|the efficiency rule|INFO/CRIT.Cf", &reg()).unwrap();
        assert_eq!(
            m.subject,
            Subject::Criterion(CriterionRef::new(CriterionKind::Content, Some('f')))
        );
    }

    #[test]
    fn text_may_contain_pipes() {
        let m = parse_move("9|A|either x|y works|INFO/SOLx", &reg()).unwrap();
        assert_eq!(m.text, "either x|y works");
        let again = parse_move(&render_move(&m), &reg()).unwrap();
        assert_eq!(again, m);
    }

    #[test]
    fn rejects_malformed_records() {
        let r = reg();
        assert_eq!(parse_move("52|B|missing code", &r), Err(MoveParseError::FieldCount));
        assert!(matches!(
            parse_move("52|B|x|FOO/SOLa", &r),
            Err(MoveParseError::UnknownActivity(_))
        ));
        assert!(matches!(
            parse_move("52|B|x|INFO+/SOLa", &r),
            Err(MoveParseError::BadPolarity(_))
        ));
        assert!(matches!(
            parse_move("52|B|x|INFO/WAT", &r),
            Err(MoveParseError::BadSubject(_))
        ));
        assert!(matches!(
            parse_move("52|B|x|EVAL/SOLa/CRIT.Cz", &r),
            Err(MoveParseError::UnknownCriterionLetter(_))
        ));
        assert!(matches!(
            parse_move("0|B|x|INFO/SOLa", &r),
            Err(MoveParseError::BadRank(_))
        ));
        assert!(matches!(
            parse_move("52||x|INFO/SOLa", &r),
            Err(MoveParseError::BadSpeaker(_))
        ));
        assert!(matches!(
            parse_move("52|B|x|INFO/SOLa/CRIT.Ca/CRIT.Cb", &r),
            Err(MoveParseError::TrailingToken(_))
        ));
    }

    #[test]
    fn transcript_requires_header_and_increasing_ranks() {
        let r = reg();
        assert_eq!(
            parse_transcript("1|A|x|INTRO/SOLa\n", &r),
            Err(TranscriptParseError::MissingHeader)
        );
        let empty = parse_transcript("# meeting: m1\n", &r).unwrap();
        assert_eq!(empty.meeting_id, "m1");
        assert!(empty.moves.is_empty());

        let bad = parse_transcript("# meeting: m\n54|A|x|INTRO/SOLa\n52|B|y|INFO/SOLa\n", &r);
        assert!(matches!(bad, Err(TranscriptParseError::NonIncreasingRank { .. })));
        let dup = parse_transcript("# meeting: m\n5|A|x|INTRO/SOLa\n5|B|y|INFO/SOLa\n", &r);
        assert!(matches!(dup, Err(TranscriptParseError::DuplicateRank { .. })));
    }

    #[test]
    fn validate_flags_dangling_and_restricted_subjects() {
        let r = reg();
        let t = parse_transcript(
            "# meeting: m\n1|A|x|INTRO/SOLa\n2|B|y|ACC/HYP99\n3|C|z|MAN/SOLa\n",
            &r,
        )
        .unwrap();
        let diags = validate(&t);
        assert!(diags.iter().any(|d| d.message.contains("dangling reference")));
        assert!(diags
            .iter()
            .any(|d| d.locator == "3" && d.message.contains("PROJ or MEET")));

        let t = parse_transcript("# meeting: m\n1|A|x|INFO/PROJ\n", &r).unwrap();
        assert!(has_errors(&validate(&t)));
    }

    #[test]
    fn normalize_inserts_implicit_intro_before_first_use() {
        let r = reg();
        let t = parse_transcript("# meeting: m\n52|B|why|REQ/JUSTIF/SOLed\n", &r).unwrap();
        assert!(!validate(&t).is_empty());
        let n = normalize(&t);
        assert_eq!(n.moves.len(), 2);
        assert!(n.moves[0].is_implicit());
        assert_eq!(n.moves[0].rank, Rank::pre(52));
        assert_eq!(n.moves[0].subject, Subject::solution("ed"));
        assert!(validate(&n).is_empty());
        assert_eq!(normalize(&n), n, "normalize must be idempotent");
        // round-trips through the file form
        let reparsed = parse_transcript(&render_transcript(&n), &r).unwrap();
        assert_eq!(reparsed, n);
    }

    #[test]
    fn normalize_handles_two_missing_intros_in_first_use_order() {
        let r = reg();
        let t = parse_transcript(
            "# meeting: m\n3|A|x|EVAL/SOLb\n5|B|y|EVAL/SOLa\n6|C|z|INFO/SOLb\n",
            &r,
        )
        .unwrap();
        let n = normalize(&t);
        let ids: Vec<String> = n.moves.iter().map(|m| m.rank.to_string()).collect();
        assert_eq!(ids, ["3.0", "3", "5.0", "5", "6"]);
        assert_eq!(n.moves[0].subject, Subject::solution("b"));
        assert_eq!(n.moves[2].subject, Subject::solution("a"));
        assert!(validate(&n).is_empty());
    }
}
