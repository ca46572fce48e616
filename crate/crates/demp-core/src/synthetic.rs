//! Deterministic generators for calibration and test corpora.
//!
//! Everything here is seeded: the same seed always yields the same corpus,
//! so harnesses built on these generators are reproducible bit for bit.

use rand::prelude::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    Activity, CodedMove, CriterionKind, CriterionRef, MoveType, Polarity, Rank, Speaker, Subject,
    Transcript,
};

/// Exchange-level event streams drawn from the canonical review-session
/// grammar: a theme introduction, optionally followed by a cognitive
/// synchronisation exchange, then either an evaluation alone or an
/// evaluation paired with the development of an alternative (in either
/// order):
///
/// ```text
/// INTRO [SYNCH] (EVAL | DEV EVAL | EVAL DEV)
/// ```
pub fn review_session_streams(seed: u64, sessions: usize) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut streams = Vec::with_capacity(sessions);
    for _ in 0..sessions {
        let mut stream = vec!["INTRO".to_string()];
        if rng.random_bool(0.5) {
            stream.push("SYNCH".to_string());
        }
        match rng.random_range(0..3) {
            0 => stream.push("EVAL".to_string()),
            1 => {
                stream.push("DEV".to_string());
                stream.push("EVAL".to_string());
            }
            _ => {
                stream.push("EVAL".to_string());
                stream.push("DEV".to_string());
            }
        }
        streams.push(stream);
    }
    streams
}

/// An i.i.d. uniform stream over the given alphabet.
pub fn uniform_stream(seed: u64, len: usize, alphabet: &[&str]) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| alphabet[rng.random_range(0..alphabet.len())].to_string())
        .collect()
}

const WORD_POOL: &[&str] = &[
    "the", "compiler", "checks", "these", "fields", "first", "message", "type", "why", "put",
    "150", "there", "fixed", "arrays", "start", "we", "can", "do", "it", "here", "a|b", "x/y",
    "OK,", "no!", "\"quoted\"",
];

fn random_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..=8);
    (0..n)
        .map(|_| *WORD_POOL.choose(rng).unwrap())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Syntactically valid coded moves with strictly increasing ranks. Subject
/// references may dangle; this feeds codec round-trip fuzzing, not the
/// analysis pipeline.
pub fn random_records(seed: u64, count: usize) -> Vec<CodedMove> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let speakers = ["A", "B", "C", "M", "rev1"];
    let solutions = ["ed", "ee", "x9", "intro2"];
    let mut moves = Vec::with_capacity(count);
    let mut rank = 0u32;

    for _ in 0..count {
        rank += rng.random_range(1..4);
        let implicit = rng.random_ratio(1, 10);
        if implicit {
            moves.push(CodedMove {
                speaker: Speaker::Implicit,
                rank: if rng.random_bool(0.5) { Rank::pre(rank) } else { Rank::main(rank) },
                text: String::new(),
                move_type: MoveType::Assertion,
                activity: Activity::Intro,
                polarity: None,
                subject: Subject::solution(*solutions.choose(&mut rng).unwrap()),
                attribute: None,
            });
            continue;
        }

        let activity = *Activity::ALL.choose(&mut rng).unwrap();
        let polarity = if activity.allows_polarity() && rng.random_bool(0.3) {
            Some(if rng.random_bool(0.5) { Polarity::Positive } else { Polarity::Negative })
        } else {
            None
        };
        let subject = match (activity, rng.random_range(0..5)) {
            (Activity::Man, roll) => {
                if roll % 2 == 0 {
                    Subject::Project
                } else {
                    Subject::Meeting
                }
            }
            (_, 0) => Subject::solution(*solutions.choose(&mut rng).unwrap()),
            (_, 1) => Subject::Criterion(random_criterion(&mut rng)),
            _ => {
                let target = *Activity::ALL.choose(&mut rng).unwrap();
                let target_rank = rng.random_range(1..=rank.max(1));
                Subject::move_result(
                    target,
                    if rng.random_ratio(1, 8) { Rank::pre(target_rank) } else { Rank::main(target_rank) },
                )
            }
        };
        let attribute = if rng.random_bool(0.3) {
            Some(random_criterion(&mut rng))
        } else {
            None
        };
        moves.push(CodedMove {
            speaker: Speaker::named(*speakers.choose(&mut rng).unwrap()),
            rank: Rank::main(rank),
            text: random_text(&mut rng),
            move_type: if rng.random_bool(0.15) { MoveType::Request } else { MoveType::Assertion },
            activity,
            polarity,
            subject,
            attribute,
        });
    }
    moves
}

fn random_criterion(rng: &mut ChaCha8Rng) -> CriterionRef {
    let kind = if rng.random_bool(0.5) { CriterionKind::Form } else { CriterionKind::Content };
    // stay within the default registry: content letters reach only 'g'
    let max = match kind {
        CriterionKind::Form => b'l',
        CriterionKind::Content => b'g',
    };
    let letter = if rng.random_bool(0.85) {
        Some(rng.random_range(b'a'..=max) as char)
    } else {
        None
    };
    CriterionRef::new(kind, letter)
}

/// A valid multi-sequence transcript for pipeline-level suites: every
/// reference resolves, every solution is introduced, activities and
/// subjects vary, requests and polarity annotations occur.
pub fn random_transcript(seed: u64, sequences: usize, meeting_id: &str) -> Transcript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let speakers = ["A", "B", "C", "D"];
    let mut moves: Vec<CodedMove> = Vec::new();
    let mut rank = 0u32;
    let next_rank = |rng: &mut ChaCha8Rng, rank: &mut u32| {
        *rank += rng.random_range(1..3);
        Rank::main(*rank)
    };

    for s in 0..sequences {
        let label = format!("s{s}");
        let opener_rank = next_rank(&mut rng, &mut rank);
        moves.push(CodedMove {
            speaker: Speaker::named(*speakers.choose(&mut rng).unwrap()),
            rank: opener_rank,
            text: random_text(&mut rng),
            move_type: MoveType::Assertion,
            activity: Activity::Intro,
            polarity: None,
            subject: Subject::solution(label.clone()),
            attribute: None,
        });
        let mut in_sequence: Vec<(Activity, Rank)> = vec![(Activity::Intro, opener_rank)];

        let body = rng.random_range(1..=7);
        for _ in 0..body {
            let activity = *[
                Activity::Dev,
                Activity::Eval,
                Activity::Hyp,
                Activity::Info,
                Activity::Justif,
                Activity::Rej,
                Activity::Acc,
            ]
            .choose(&mut rng)
            .unwrap();
            let polarity = if activity.allows_polarity() && rng.random_bool(0.4) {
                Some(if rng.random_bool(0.4) { Polarity::Positive } else { Polarity::Negative })
            } else {
                None
            };
            let subject = if rng.random_bool(0.3) {
                Subject::solution(label.clone())
            } else {
                let &(act, r) = in_sequence.choose(&mut rng).unwrap();
                Subject::move_result(act, r)
            };
            let move_type = if rng.random_bool(0.15)
                && matches!(activity, Activity::Justif | Activity::Eval | Activity::Info)
            {
                MoveType::Request
            } else {
                MoveType::Assertion
            };
            let attribute = if rng.random_bool(0.35)
                && matches!(activity, Activity::Eval | Activity::Justif | Activity::Rej | Activity::Acc)
            {
                Some(random_criterion(&mut rng))
            } else {
                None
            };
            let r = next_rank(&mut rng, &mut rank);
            moves.push(CodedMove {
                speaker: Speaker::named(*speakers.choose(&mut rng).unwrap()),
                rank: r,
                text: random_text(&mut rng),
                move_type,
                activity,
                polarity,
                subject,
                attribute,
            });
            in_sequence.push((activity, r));
        }
    }
    Transcript::new(meeting_id, moves)
}

/// The four non-introduction activities of the small enumeration alphabet.
const ENUM_ACTIVITIES: [Activity; 4] = [
    Activity::Dev,
    Activity::Eval,
    Activity::Hyp,
    Activity::Info,
];
const ENUM_SOLUTIONS: [&str; 3] = ["p", "q", "r"];

fn enum_move(rank: u32, activity: Activity, subject: Subject) -> CodedMove {
    CodedMove {
        speaker: Speaker::named("A"),
        rank: Rank::main(rank),
        text: String::new(),
        move_type: MoveType::Assertion,
        activity,
        polarity: None,
        subject,
        attribute: None,
    }
}

/// Exhaustively enumerate every structurally valid transcript of up to
/// `max_moves` moves over a 3-solution, 4-activity alphabet: the first move
/// introduces a solution, each later move either introduces a solution or
/// acts on the current opening solution or on the result of any earlier
/// move. The visitor runs once per transcript, at every length.
pub fn enumerate_transcripts(max_moves: usize, mut visit: impl FnMut(&[CodedMove])) {
    fn recurse(
        moves: &mut Vec<CodedMove>,
        opening: &str,
        max_moves: usize,
        visit: &mut impl FnMut(&[CodedMove]),
    ) {
        visit(moves);
        if moves.len() >= max_moves {
            return;
        }
        let rank = moves.len() as u32 + 1;

        for label in ENUM_SOLUTIONS {
            moves.push(enum_move(rank, Activity::Intro, Subject::solution(label)));
            recurse(moves, label, max_moves, visit);
            moves.pop();
        }
        for activity in ENUM_ACTIVITIES {
            moves.push(enum_move(rank, activity, Subject::solution(opening)));
            recurse(moves, opening, max_moves, visit);
            moves.pop();

            for j in 0..rank - 1 {
                let target = &moves[j as usize];
                let subject = Subject::move_result(target.activity, target.rank);
                moves.push(enum_move(rank, activity, subject));
                recurse(moves, opening, max_moves, visit);
                moves.pop();
            }
        }
    }

    let mut moves = Vec::with_capacity(max_moves);
    for label in ENUM_SOLUTIONS {
        moves.push(enum_move(1, Activity::Intro, Subject::solution(label)));
        recurse(&mut moves, label, max_moves, &mut visit);
        moves.pop();
    }
}

/// One random transcript of exactly `len` moves over the enumeration
/// alphabet, extended with occasional criterion attributes and
/// criterion-subject moves so deep nesting and attribute-based nesting both
/// occur.
pub fn sampled_transcript(seed: u64, len: usize) -> Transcript {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moves: Vec<CodedMove> = Vec::new();
    let mut opening = ENUM_SOLUTIONS[0];
    let criterion = CriterionRef::new(CriterionKind::Content, Some('a'));

    for i in 0..len {
        let rank = i as u32 + 1;
        let mut m = if i == 0 || rng.random_ratio(1, 6) {
            opening = ENUM_SOLUTIONS[rng.random_range(0..ENUM_SOLUTIONS.len())];
            enum_move(rank, Activity::Intro, Subject::solution(opening))
        } else {
            let activity = ENUM_ACTIVITIES[rng.random_range(0..ENUM_ACTIVITIES.len())];
            let has_attribute_use = moves
                .iter()
                .any(|p| p.attribute.as_ref().is_some_and(|a| a.matches(&criterion)));
            match rng.random_range(0..4) {
                0 => enum_move(rank, activity, Subject::solution(opening)),
                1 if has_attribute_use => {
                    enum_move(rank, activity, Subject::Criterion(criterion))
                }
                _ => {
                    let target = &moves[rng.random_range(0..moves.len())];
                    enum_move(
                        rank,
                        activity,
                        Subject::move_result(target.activity, target.rank),
                    )
                }
            }
        };
        if m.activity != Activity::Intro && rng.random_ratio(1, 4) {
            m.attribute = Some(criterion);
        }
        moves.push(m);
    }
    Transcript::new(format!("sampled-{seed}"), moves)
}
