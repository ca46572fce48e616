//! Analysis toolkit for coded transcripts of design evaluation meetings.
//!
//! The pipeline starts from a coded transcript file and mechanically
//! reproduces the full analysis chain:
//!
//! 1. [`codec`] parses, validates, normalizes and re-serializes transcripts;
//! 2. [`level`] assigns a nesting level to every move (rules A and B);
//! 3. [`sequence`] partitions the transcript into theme-scoped sequences;
//! 4. [`exchange`] groups sequence moves into functional exchanges;
//! 5. [`stats`], [`lsa`] and [`cluster`] compute distribution statistics,
//!    lag sequential z scores, rewrite-based configuration mining and
//!    hierarchical clustering over the resulting event streams;
//! 6. [`reliability`] compares two codings of the same meeting;
//! 7. [`qoc`] extracts a Question/Option/Criterion design-rationale graph
//!    per sequence.
//!
//! All operations are pure functions over immutable values: analyses are
//! deterministic and safe to run on many transcripts in parallel.

pub mod cluster;
pub mod codec;
pub mod diag;
pub mod exchange;
pub mod level;
pub mod lsa;
pub mod model;
pub mod pipeline;
pub mod qoc;
pub mod registry;
pub mod reliability;
pub mod sequence;
pub mod stats;
pub mod synthetic;
pub mod table;

pub use codec::{normalize, parse_move, parse_transcript, render_move, render_transcript, validate};
pub use diag::{has_errors, Diagnostic, Severity};
pub use exchange::{classify, exchange_stream, ClassifiedSequence, Exchange, ExchangeKind};
pub use level::{assign_levels, LevelRule, LeveledMove};
pub use model::{
    Activity, CodedMove, CriterionKind, CriterionRef, MoveType, Polarity, Rank, Speaker, Subject,
    Transcript,
};
pub use pipeline::{analyze_transcript, AnalyzedMeeting, AnalyzedSequence};
pub use registry::CriterionRegistry;
pub use sequence::{partition_by_kind, segment_sequences, Sequence, SequenceKind};
