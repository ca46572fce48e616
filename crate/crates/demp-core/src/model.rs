//! Core data model for coded review-meeting transcripts.
//!
//! A meeting protocol is a sequence of *moves*: single-speaker contributions
//! coded with an identity, a type (assertion or request), an activity, a
//! subject and an optional criterion attribute. The model mirrors that code
//! syntax one-to-one so that parsing and rendering are lossless.

use std::fmt;
use std::str::FromStr;

/// The nine reviewing activities a move can be coded with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    Man,
    Intro,
    Dev,
    Eval,
    Hyp,
    Info,
    Justif,
    Acc,
    Rej,
}

impl Activity {
    /// All activities in canonical (table) order.
    pub const ALL: [Activity; 9] = [
        Activity::Man,
        Activity::Intro,
        Activity::Dev,
        Activity::Eval,
        Activity::Hyp,
        Activity::Info,
        Activity::Justif,
        Activity::Acc,
        Activity::Rej,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Activity::Man => "MAN",
            Activity::Intro => "INTRO",
            Activity::Dev => "DEV",
            Activity::Eval => "EVAL",
            Activity::Hyp => "HYP",
            Activity::Info => "INFO",
            Activity::Justif => "JUSTIF",
            Activity::Acc => "ACC",
            Activity::Rej => "REJ",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Activity> {
        Activity::ALL.iter().copied().find(|a| a.tag() == tag)
    }

    /// Activities that may carry a polarity annotation (`+` / `-`).
    pub fn allows_polarity(self) -> bool {
        matches!(self, Activity::Eval | Activity::Justif | Activity::Rej)
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A move is either an assertion (the default, left implicit in the code)
/// or a request, marked `REQ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MoveType {
    #[default]
    Assertion,
    Request,
}

/// Optional polarity annotation on an evaluative activity tag.
/// Absence of an annotation means neutral / unannotated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl Polarity {
    pub fn suffix(self) -> char {
        match self {
            Polarity::Positive => '+',
            Polarity::Negative => '-',
        }
    }
}

/// Whether a criterion concerns the form or the content of a subject.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CriterionKind {
    Form,
    Content,
}

impl CriterionKind {
    pub fn code(self) -> char {
        match self {
            CriterionKind::Form => 'F',
            CriterionKind::Content => 'C',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Form => "form",
            CriterionKind::Content => "content",
        }
    }
}

/// A reference to a criterion: its kind plus an optional lowercase letter
/// index into the criterion registry (`CRIT.C` is kind-only, `CRIT.Ca` is
/// the first content criterion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CriterionRef {
    pub kind: CriterionKind,
    pub letter: Option<char>,
}

impl CriterionRef {
    pub fn new(kind: CriterionKind, letter: Option<char>) -> CriterionRef {
        CriterionRef { kind, letter }
    }

    /// Whether two criterion references denote the same criterion.
    /// A kind-only reference matches any lettered criterion of that kind.
    pub fn matches(&self, other: &CriterionRef) -> bool {
        self.kind == other.kind
            && match (self.letter, other.letter) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            }
    }
}

impl fmt::Display for CriterionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CRIT.{}", self.kind.code())?;
        if let Some(l) = self.letter {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Position of a move in the protocol.
///
/// Ordinary moves carry a bare major rank ("52"). An implicit introduction
/// synthesized by normalization reuses the rank of the move that first needed
/// it, with a `.0` sub-rank that orders *before* the main slot ("52.0").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rank {
    major: u32,
    pre: bool,
}

impl Rank {
    pub fn main(major: u32) -> Rank {
        Rank { major, pre: false }
    }

    /// The synthetic `.0` slot ordered immediately before `main(major)`.
    pub fn pre(major: u32) -> Rank {
        Rank { major, pre: true }
    }

    pub fn major(self) -> u32 {
        self.major
    }

    pub fn is_pre(self) -> bool {
        self.pre
    }
}

impl PartialOrd for Rank {
    fn partial_cmp(&self, other: &Rank) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rank {
    fn cmp(&self, other: &Rank) -> std::cmp::Ordering {
        // pre slot sorts before the main slot of the same major rank
        self.major
            .cmp(&other.major)
            .then(other.pre.cmp(&self.pre))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pre {
            write!(f, "{}.0", self.major)
        } else {
            write!(f, "{}", self.major)
        }
    }
}

impl FromStr for Rank {
    type Err = ();

    fn from_str(s: &str) -> Result<Rank, ()> {
        let (major, pre) = match s.strip_suffix(".0") {
            Some(head) => (head, true),
            None => (s, false),
        };
        if major.is_empty() || !major.bytes().all(|b| b.is_ascii_digit()) {
            return Err(());
        }
        let major: u32 = major.parse().map_err(|_| ())?;
        if major == 0 {
            return Err(());
        }
        Ok(Rank { major, pre })
    }
}

/// Marker used in the speaker column for implicit (coder-inserted) moves.
pub const IMPLICIT_MARKER: &str = "--";

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Speaker {
    /// The reserved `--` marker of implicit introductions.
    Implicit,
    Named(String),
}

impl Speaker {
    pub fn named(s: impl Into<String>) -> Speaker {
        Speaker::Named(s.into())
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self, Speaker::Implicit)
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Speaker::Implicit => f.write_str(IMPLICIT_MARKER),
            Speaker::Named(n) => f.write_str(n),
        }
    }
}

/// The informational entity a move acts on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subject {
    /// A part of the document under review (`SOLed`).
    Solution(String),
    /// The project as a whole (`PROJ`, management moves only).
    Project,
    /// The meeting itself (`MEET`, management moves only).
    Meeting,
    /// The result of a previous move, coded by its activity and rank
    /// (`INTRO51`, `HYP57`).
    MoveResult { activity: Activity, rank: Rank },
    /// A criterion taken as subject of discussion (`CRIT.Ca`).
    Criterion(CriterionRef),
}

impl Subject {
    pub fn solution(label: impl Into<String>) -> Subject {
        Subject::Solution(label.into())
    }

    pub fn move_result(activity: Activity, rank: Rank) -> Subject {
        Subject::MoveResult { activity, rank }
    }

    /// Canonical code token for the subject field.
    pub fn code(&self) -> String {
        match self {
            Subject::Solution(label) => format!("SOL{label}"),
            Subject::Project => "PROJ".to_string(),
            Subject::Meeting => "MEET".to_string(),
            Subject::MoveResult { activity, rank } => format!("{activity}{rank}"),
            Subject::Criterion(c) => c.to_string(),
        }
    }
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// One coded speaker contribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedMove {
    pub speaker: Speaker,
    pub rank: Rank,
    pub text: String,
    pub move_type: MoveType,
    pub activity: Activity,
    /// Polarity annotation on EVAL/JUSTIF/REJ tags; `None` = neutral.
    pub polarity: Option<Polarity>,
    pub subject: Subject,
    pub attribute: Option<CriterionRef>,
}

impl CodedMove {
    /// Number of whitespace-delimited tokens of the raw text.
    /// Implicit moves have empty text and therefore count zero words.
    pub fn word_count(&self) -> usize {
        self.text.split_whitespace().count()
    }

    /// Whether this is an implicit (coder-inserted) introduction.
    pub fn is_implicit(&self) -> bool {
        self.speaker.is_implicit()
    }

    /// Whether this move introduces a solution, i.e. opens a discussion theme.
    pub fn is_solution_intro(&self) -> bool {
        self.activity == Activity::Intro && matches!(self.subject, Subject::Solution(_))
    }

    /// The `speaker ++ rank` identifier, e.g. `M60` or `--51`.
    pub fn id(&self) -> String {
        format!("{}{}", self.speaker, self.rank)
    }

    /// Canonical code tail (everything after the text column), e.g.
    /// `REQ/JUSTIF/INTRO51/CRIT.Ca`.
    pub fn code(&self) -> String {
        let mut out = String::new();
        if self.move_type == MoveType::Request {
            out.push_str("REQ/");
        }
        out.push_str(self.activity.tag());
        if let Some(p) = self.polarity {
            out.push(p.suffix());
        }
        out.push('/');
        out.push_str(&self.subject.code());
        if let Some(attr) = &self.attribute {
            out.push('/');
            out.push_str(&attr.to_string());
        }
        out
    }
}

/// The ordered moves of one meeting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub meeting_id: String,
    pub moves: Vec<CodedMove>,
}

impl Transcript {
    pub fn new(meeting_id: impl Into<String>, moves: Vec<CodedMove>) -> Transcript {
        Transcript {
            meeting_id: meeting_id.into(),
            moves,
        }
    }

    /// Index of the move occupying `rank`, if any.
    pub fn index_of_rank(&self, rank: Rank) -> Option<usize> {
        self.moves.iter().position(|m| m.rank == rank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_ordering_puts_pre_slot_first() {
        assert!(Rank::pre(52) < Rank::main(52));
        assert!(Rank::main(51) < Rank::pre(52));
        assert!(Rank::main(52) < Rank::main(53));
    }

    #[test]
    fn rank_round_trips_through_strings() {
        for r in [Rank::main(1), Rank::main(68), Rank::pre(52)] {
            assert_eq!(r.to_string().parse::<Rank>().unwrap(), r);
        }
        assert!("0".parse::<Rank>().is_err());
        assert!("".parse::<Rank>().is_err());
        assert!("5.1".parse::<Rank>().is_err());
        assert!("x7".parse::<Rank>().is_err());
    }

    #[test]
    fn activity_tags_round_trip() {
        for a in Activity::ALL {
            assert_eq!(Activity::from_tag(a.tag()), Some(a));
        }
        assert_eq!(Activity::from_tag("JUS"), None);
    }

    #[test]
    fn criterion_matching_is_lenient_on_missing_letters() {
        let ca = CriterionRef::new(CriterionKind::Content, Some('a'));
        let c = CriterionRef::new(CriterionKind::Content, None);
        let fa = CriterionRef::new(CriterionKind::Form, Some('a'));
        assert!(ca.matches(&ca));
        assert!(c.matches(&ca));
        assert!(ca.matches(&c));
        assert!(!ca.matches(&fa));
    }

    #[test]
    fn word_count_splits_on_whitespace() {
        let m = CodedMove {
            speaker: Speaker::named("B"),
            rank: Rank::main(52),
            text: "Why did you put 150 there?".to_string(),
            move_type: MoveType::Request,
            activity: Activity::Justif,
            polarity: None,
            subject: Subject::move_result(Activity::Intro, Rank::main(51)),
            attribute: None,
        };
        assert_eq!(m.word_count(), 6);
        assert_eq!(m.code(), "REQ/JUSTIF/INTRO51");
        assert_eq!(m.id(), "B52");
    }
}
