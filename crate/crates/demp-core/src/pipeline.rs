//! End-to-end analysis of one transcript: validate, normalize, level,
//! segment, classify. All downstream reports consume the result.

use crate::codec::{normalize, validate};
use crate::diag::{has_errors, Diagnostic};
use crate::exchange::{classify, exchange_stream, ClassifiedSequence};
use crate::level::{assign_levels, LevelError};
use crate::model::Transcript;
use crate::sequence::{segment_sequences, Sequence, SequenceKind};

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedSequence {
    pub sequence: Sequence,
    pub classified: ClassifiedSequence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzedMeeting {
    pub meeting_id: String,
    /// The normalized transcript the analysis ran on.
    pub transcript: Transcript,
    pub sequences: Vec<AnalyzedSequence>,
    /// Warnings gathered across validation, levelling and classification.
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("transcript has validation errors")]
    Invalid(Vec<Diagnostic>),
    #[error(transparent)]
    Level(#[from] LevelError),
}

/// Run the full per-meeting pipeline. Validation warnings are carried in the
/// result; error-severity findings abort with [`AnalysisError::Invalid`].
pub fn analyze_transcript(raw: &Transcript) -> Result<AnalyzedMeeting, AnalysisError> {
    let normalized = normalize(raw);
    let mut diagnostics = validate(&normalized);
    if has_errors(&diagnostics) {
        return Err(AnalysisError::Invalid(diagnostics));
    }

    let outcome = assign_levels(&normalized)?;
    diagnostics.extend(outcome.diagnostics);

    let sequences = segment_sequences(outcome.moves)
        .into_iter()
        .map(|sequence| {
            let classified = classify(&sequence);
            diagnostics.extend(classified.diagnostics.iter().cloned());
            AnalyzedSequence {
                sequence,
                classified,
            }
        })
        .collect();

    Ok(AnalyzedMeeting {
        meeting_id: normalized.meeting_id.clone(),
        transcript: normalized,
        sequences,
        diagnostics,
    })
}

impl AnalyzedMeeting {
    /// Sequences surviving the management filter.
    pub fn selected_sequences(&self, include_management: bool) -> Vec<&AnalyzedSequence> {
        self.sequences
            .iter()
            .filter(|s| include_management || s.sequence.kind == SequenceKind::Solution)
            .collect()
    }

    /// Per-sequence exchange event streams, one stream per selected sequence.
    pub fn exchange_streams(&self, include_management: bool) -> Vec<Vec<String>> {
        self.selected_sequences(include_management)
            .into_iter()
            .map(|s| exchange_stream(&s.sequence, &s.classified))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_transcript;
    use crate::registry::CriterionRegistry;

    #[test]
    fn pipeline_runs_and_normalizes_missing_intros() {
        let t = parse_transcript(
            "# meeting: m\n2|B|b|EVAL/SOLa\n3|C|c|ACC/EVAL2\n",
            &CriterionRegistry::default(),
        )
        .unwrap();
        let analyzed = analyze_transcript(&t).unwrap();
        assert_eq!(analyzed.transcript.moves.len(), 3);
        assert_eq!(analyzed.sequences.len(), 1);
        assert_eq!(analyzed.exchange_streams(false), [["INTRO", "REV"]]);
    }

    #[test]
    fn pipeline_rejects_dangling_references() {
        let t = parse_transcript(
            "# meeting: m\n1|A|a|INTRO/SOLa\n2|B|b|ACC/HYP9\n",
            &CriterionRegistry::default(),
        )
        .unwrap();
        assert!(matches!(
            analyze_transcript(&t),
            Err(AnalysisError::Invalid(_))
        ));
    }
}
