//! Question/Option/Criterion design-rationale extraction.
//!
//! Each solution sequence yields a tripartite graph: the stem Question
//! (explicit request or synthesized implicit one), the Options in play (the
//! introduced solution plus every developed alternative), and the Criteria
//! invoked when assessing them. Options respond to Questions; assessments
//! attach Options to Criteria with a polarity taken from the assessing
//! activity. Only annotated polarity is trusted: an unannotated evaluation
//! yields a neutral edge, never a guess.

use serde::{Deserialize, Serialize};

use crate::diag::Diagnostic;
use crate::model::{Activity, CodedMove, MoveType, Polarity, Rank, Subject};
use crate::registry::CriterionRegistry;
use crate::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QocNodeKind {
    Question,
    Option,
    Criterion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QocNode {
    pub id: String,
    pub kind: QocNodeKind,
    pub label: String,
    /// Rank of the originating move, or `"implicit"` for synthesized nodes.
    pub origin: String,
    /// `form` / `content` for registry criteria; absent for uncoded ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion_kind: Option<String>,
    /// Criterion node created from a justification that carried no
    /// criterion attribute.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub uncoded: bool,
    /// For criteria: how many assessments invoke this criterion.
    #[serde(default)]
    pub strength: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QocPolarity {
    Supports,
    Rejects,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QocRelation {
    /// Option -> Question
    RespondsTo,
    /// Option -> Criterion
    AssessedBy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QocEdge {
    pub from: String,
    pub to: String,
    pub relation: QocRelation,
    pub polarity: QocPolarity,
    /// Ranks of the moves this edge is read off.
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QocGraph {
    pub sequence_index: usize,
    pub nodes: Vec<QocNode>,
    pub edges: Vec<QocEdge>,
    /// Node id of the option accepted last, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decision: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum QocExportError {
    #[error("unknown export format {0:?} (dot|json)")]
    UnknownFormat(String),
}

struct OptionNode {
    node: usize,
    origin_rank: Rank,
}

struct Builder<'a> {
    registry: &'a CriterionRegistry,
    nodes: Vec<QocNode>,
    edges: Vec<QocEdge>,
    questions: Vec<(Option<Rank>, usize)>,
    options: Vec<OptionNode>,
}

impl<'a> Builder<'a> {
    fn push_node(&mut self, kind: QocNodeKind, label: String, origin: String) -> usize {
        let prefix = match kind {
            QocNodeKind::Question => 'q',
            QocNodeKind::Option => 'o',
            QocNodeKind::Criterion => 'c',
        };
        let count = self.nodes.iter().filter(|n| n.kind == kind).count();
        self.nodes.push(QocNode {
            id: format!("{prefix}{}", count + 1),
            kind,
            label,
            origin,
            criterion_kind: None,
            uncoded: false,
            strength: 0,
        });
        self.nodes.len() - 1
    }

    fn add_option(&mut self, label: String, rank: Rank) -> usize {
        let node = self.push_node(QocNodeKind::Option, label, rank.to_string());
        self.options.push(OptionNode {
            node,
            origin_rank: rank,
        });
        node
    }

    /// The option a subject denotes, if any. Resolution is direct only:
    /// solution labels, introduction results and development results.
    /// Assessments of hypotheses or other move results name no option.
    fn target_option(&self, subject: &Subject) -> Option<usize> {
        match subject {
            Subject::Solution(label) => {
                let code = format!("SOL{label}");
                self.options
                    .iter()
                    .find(|o| self.nodes[o.node].label == code)
                    .map(|o| o.node)
            }
            Subject::MoveResult {
                activity: Activity::Intro | Activity::Dev,
                rank,
            } => self
                .options
                .iter()
                .find(|o| o.origin_rank == *rank)
                .map(|o| o.node),
            _ => None,
        }
    }

    /// Criterion node for a registry reference, created on first use.
    fn criterion_node(&mut self, c: &crate::model::CriterionRef) -> usize {
        let kind_name = c.kind.name().to_string();
        let label = self
            .registry
            .name(c)
            .unwrap_or_else(|| c.to_string());
        if let Some(i) = self.nodes.iter().position(|n| {
            n.kind == QocNodeKind::Criterion
                && n.label == label
                && n.criterion_kind.as_deref() == Some(kind_name.as_str())
        }) {
            return i;
        }
        let i = self.push_node(QocNodeKind::Criterion, label, "attribute".to_string());
        self.nodes[i].criterion_kind = Some(kind_name);
        i
    }

    fn add_assessment(&mut self, option: usize, criterion: usize, polarity: QocPolarity, rank: Rank) {
        let from = self.nodes[option].id.clone();
        let to = self.nodes[criterion].id.clone();
        if let Some(edge) = self
            .edges
            .iter_mut()
            .find(|e| e.from == from && e.to == to && e.polarity == polarity)
        {
            edge.evidence.push(rank.to_string());
            return;
        }
        self.edges.push(QocEdge {
            from,
            to,
            relation: QocRelation::AssessedBy,
            polarity,
            evidence: vec![rank.to_string()],
        });
    }
}

fn assessment_polarity(m: &CodedMove) -> QocPolarity {
    match m.activity {
        Activity::Rej => QocPolarity::Rejects,
        Activity::Justif | Activity::Acc => QocPolarity::Supports,
        Activity::Eval => match m.polarity {
            Some(Polarity::Negative) => QocPolarity::Rejects,
            Some(Polarity::Positive) => QocPolarity::Supports,
            None => QocPolarity::Neutral,
        },
        _ => QocPolarity::Neutral,
    }
}

/// Extract the design-rationale graph of one classified solution sequence.
/// Sequences with no review or alternative content yield an empty graph
/// with a diagnostic.
pub fn extract_qoc(seq: &Sequence, registry: &CriterionRegistry) -> QocGraph {
    let has_content = seq.moves.iter().any(|lm| {
        matches!(
            lm.coded.activity,
            Activity::Eval | Activity::Justif | Activity::Rej | Activity::Dev
        ) || lm.coded.move_type == MoveType::Request
    });
    if !has_content {
        return QocGraph {
            sequence_index: seq.index,
            nodes: Vec::new(),
            edges: Vec::new(),
            decision: None,
            diagnostics: vec![Diagnostic::warning(
                seq.moves.first().map(|m| m.coded.rank.to_string()).unwrap_or_else(|| "-".into()),
                "sequence has no review or alternative content",
            )],
        };
    }

    let mut b = Builder {
        registry,
        nodes: Vec::new(),
        edges: Vec::new(),
        questions: Vec::new(),
        options: Vec::new(),
    };
    let mut diagnostics = Vec::new();

    // stem question: the first explicit request, or a synthesized implicit
    // question when review content or an alternative precedes any request
    let mut needs_implicit_question = false;
    for lm in &seq.moves {
        let m = &lm.coded;
        if m.move_type == MoveType::Request {
            break;
        }
        let opens_review = matches!(
            m.activity,
            Activity::Eval | Activity::Justif | Activity::Rej
        ) && m.rank != seq.opener().coded.rank;
        if opens_review || m.activity == Activity::Dev {
            needs_implicit_question = true;
            break;
        }
    }

    let opening_label = match &seq.opener().coded.subject {
        Subject::Solution(label) => format!("SOL{label}"),
        other => other.code(),
    };
    if needs_implicit_question {
        let node = b.push_node(
            QocNodeKind::Question,
            format!("(implicit) assessment of {opening_label}"),
            "implicit".to_string(),
        );
        b.questions.push((None, node));
    }
    for lm in &seq.moves {
        let m = &lm.coded;
        if m.move_type == MoveType::Request {
            let label = if m.text.is_empty() {
                format!("requested {} of {}", m.activity, m.subject.code())
            } else {
                m.text.clone()
            };
            let node = b.push_node(QocNodeKind::Question, label, m.rank.to_string());
            b.questions.push((Some(m.rank), node));
        }
    }

    // options: the opening solution plus every developed alternative
    if seq.opener().coded.is_solution_intro() {
        b.add_option(opening_label.clone(), seq.opener().coded.rank);
    }
    for lm in &seq.moves {
        let m = &lm.coded;
        if m.activity == Activity::Dev && m.move_type == MoveType::Assertion {
            let label = if m.text.is_empty() {
                format!("DEV{}", m.rank)
            } else {
                m.text.clone()
            };
            b.add_option(label, m.rank);
        }
    }

    // assessments
    let mut decision: Option<usize> = None;
    for lm in &seq.moves {
        let m = &lm.coded;
        if m.move_type != MoveType::Assertion {
            continue;
        }
        let assessing = matches!(
            m.activity,
            Activity::Eval | Activity::Justif | Activity::Rej | Activity::Acc
        );
        if assessing {
            if let Some(attr) = &m.attribute {
                let criterion = b.criterion_node(attr);
                if let Some(option) = b.target_option(&m.subject) {
                    b.add_assessment(option, criterion, assessment_polarity(m), m.rank);
                }
            } else if m.activity == Activity::Justif {
                // justification of a rejection without a coded criterion:
                // keep the argument as an uncoded criterion node
                if let Subject::MoveResult {
                    activity: Activity::Rej,
                    rank,
                } = &m.subject
                {
                    let label = if m.text.is_empty() {
                        format!("justification {}", m.rank)
                    } else {
                        m.text.clone()
                    };
                    let node = b.push_node(QocNodeKind::Criterion, label, m.rank.to_string());
                    b.nodes[node].uncoded = true;
                    let rejected = seq
                        .moves
                        .iter()
                        .find(|p| p.coded.rank == *rank && p.coded.activity == Activity::Rej)
                        .and_then(|rej| b.target_option(&rej.coded.subject));
                    if let Some(option) = rejected {
                        b.add_assessment(option, node, QocPolarity::Rejects, m.rank);
                    }
                }
            }
            if m.activity == Activity::Acc {
                if let Some(option) = b.target_option(&m.subject) {
                    decision = Some(option);
                }
            }
        }
    }

    // every option answers the latest question raised at or before it;
    // options created before any explicit question answer the stem question
    for opt in &b.options {
        let target = b
            .questions
            .iter()
            .rfind(|(rank, _)| match rank {
                None => true,
                Some(r) => *r <= opt.origin_rank,
            })
            .map(|(_, node)| *node)
            .or_else(|| b.questions.first().map(|(_, node)| *node));
        if let Some(q) = target {
            b.edges.push(QocEdge {
                from: b.nodes[opt.node].id.clone(),
                to: b.nodes[q].id.clone(),
                relation: QocRelation::RespondsTo,
                polarity: QocPolarity::Neutral,
                evidence: vec![b.nodes[opt.node].origin.clone()],
            });
        } else {
            diagnostics.push(Diagnostic::warning(
                b.nodes[opt.node].origin.clone(),
                "option without any question to respond to",
            ));
        }
    }

    // order edges deterministically: responds-to first, then assessments,
    // each in node order
    let node_pos = |id: &str, nodes: &[QocNode]| nodes.iter().position(|n| n.id == id).unwrap();
    let mut edges = b.edges;
    edges.sort_by_key(|e| {
        (
            matches!(e.relation, QocRelation::AssessedBy),
            node_pos(&e.from, &b.nodes),
            node_pos(&e.to, &b.nodes),
        )
    });

    let mut nodes = b.nodes;
    for node in nodes.iter_mut().filter(|n| n.kind == QocNodeKind::Criterion) {
        node.strength = edges
            .iter()
            .filter(|e| e.relation == QocRelation::AssessedBy && e.to == node.id)
            .count();
    }

    let decision = decision.map(|i| nodes[i].id.clone());
    QocGraph {
        sequence_index: seq.index,
        nodes,
        edges,
        decision,
        diagnostics,
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl QocGraph {
    /// Questions render as diamonds, options as boxes (the decision with a
    /// doubled border), criteria as ellipses; rejecting edges are dashed,
    /// neutral assessments dotted.
    pub fn to_dot(&self) -> String {
        let mut out = format!("digraph qoc_seq{} {{\n", self.sequence_index);
        out.push_str("    rankdir=LR;\n");
        out.push_str(&self.dot_body("    ", ""));
        out.push_str("}\n");
        out
    }

    fn dot_body(&self, indent: &str, id_prefix: &str) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            let shape = match n.kind {
                QocNodeKind::Question => "diamond",
                QocNodeKind::Option => "box",
                QocNodeKind::Criterion => "ellipse",
            };
            let mut attrs = format!("shape={shape} label=\"{}\"", dot_escape(&n.label));
            if self.decision.as_deref() == Some(n.id.as_str()) {
                attrs.push_str(" peripheries=2");
            }
            if n.uncoded {
                attrs.push_str(" style=dashed");
            }
            out.push_str(&format!("{indent}\"{id_prefix}{}\" [{attrs}];\n", n.id));
        }
        for e in &self.edges {
            let label = match e.relation {
                QocRelation::RespondsTo => "responds-to".to_string(),
                QocRelation::AssessedBy => match e.polarity {
                    QocPolarity::Supports => "supports".to_string(),
                    QocPolarity::Rejects => "rejects".to_string(),
                    QocPolarity::Neutral => "assesses".to_string(),
                },
            };
            let style = match (e.relation, e.polarity) {
                (QocRelation::AssessedBy, QocPolarity::Rejects) => " style=dashed",
                (QocRelation::AssessedBy, QocPolarity::Neutral) => " style=dotted",
                _ => "",
            };
            out.push_str(&format!(
                "{indent}\"{id_prefix}{}\" -> \"{id_prefix}{}\" [label=\"{label}\"{style}];\n",
                e.from, e.to
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph serializes");
        s.push('\n');
        s
    }

    pub fn export(&self, format: &str) -> Result<String, QocExportError> {
        match format {
            "dot" => Ok(self.to_dot()),
            "json" => Ok(self.to_json()),
            other => Err(QocExportError::UnknownFormat(other.to_string())),
        }
    }
}

/// Corpus-wide merged DOT: one cluster per sequence, node ids namespaced by
/// sequence index.
pub fn merged_dot(graphs: &[QocGraph]) -> String {
    let mut out = String::from("digraph qoc {\n    rankdir=LR;\n");
    for g in graphs {
        out.push_str(&format!(
            "    subgraph cluster_seq{} {{\n        label=\"sequence {}\";\n",
            g.sequence_index, g.sequence_index
        ));
        out.push_str(&g.dot_body("        ", &format!("s{}_", g.sequence_index)));
        out.push_str("    }\n");
    }
    out.push_str("}\n");
    out
}

/// Corpus-wide merged JSON: the array of per-sequence graphs.
pub fn merged_json(graphs: &[QocGraph]) -> String {
    let mut s = serde_json::to_string_pretty(graphs).expect("graphs serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::parse_transcript;
    use crate::level::assign_levels;
    use crate::registry::CriterionRegistry;
    use crate::sequence::segment_sequences;

    fn graphs(src: &str) -> Vec<QocGraph> {
        let registry = CriterionRegistry::default();
        let t = parse_transcript(src, &registry).unwrap();
        segment_sequences(assign_levels(&t).unwrap().moves)
            .iter()
            .map(|s| extract_qoc(s, &registry))
            .collect()
    }

    #[test]
    fn intro_only_sequence_yields_empty_graph_with_diagnostic() {
        let g = &graphs("# meeting: m\n1|A|here|INTRO/SOLa\n")[0];
        assert!(g.nodes.is_empty());
        assert!(g.edges.is_empty());
        assert_eq!(g.diagnostics.len(), 1);
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph qoc_seq1 {"));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn development_and_negative_review_build_the_expected_graph() {
        let g = &graphs(
            "# meeting: m\n\
             1|A|the draft|INTRO/SOLa\n\
             2|B|use a map instead|DEV/INTRO1\n\
             3|C|hard to read|EVAL-/INTRO1/CRIT.Fa\n\
             4|B|agreed|ACC/DEV2\n",
        )[0];
        let questions: Vec<_> = g.nodes.iter().filter(|n| n.kind == QocNodeKind::Question).collect();
        let options: Vec<_> = g.nodes.iter().filter(|n| n.kind == QocNodeKind::Option).collect();
        let criteria: Vec<_> = g.nodes.iter().filter(|n| n.kind == QocNodeKind::Criterion).collect();
        assert_eq!(questions.len(), 1);
        assert_eq!(questions[0].origin, "implicit");
        assert_eq!(options.len(), 2);
        assert_eq!(criteria.len(), 1);
        assert_eq!(criteria[0].label, "Nomenclature");
        assert_eq!(criteria[0].criterion_kind.as_deref(), Some("form"));

        let rejects: Vec<_> = g
            .edges
            .iter()
            .filter(|e| e.polarity == QocPolarity::Rejects)
            .collect();
        assert_eq!(rejects.len(), 1);
        assert_eq!(rejects[0].from, options[0].id, "the opening option is rejected");
        // the developed alternative was accepted
        assert_eq!(g.decision.as_deref(), Some(options[1].id.as_str()));
    }

    #[test]
    fn explicit_request_becomes_the_question() {
        let g = &graphs(
            "# meeting: m\n\
             1|A|the draft|INTRO/SOLa\n\
             2|B|why this layout?|REQ/JUSTIF/INTRO1\n\
             3|A|guide says so|JUSTIF/INTRO1/CRIT.Fa\n",
        )[0];
        let q: Vec<_> = g.nodes.iter().filter(|n| n.kind == QocNodeKind::Question).collect();
        assert_eq!(q.len(), 1);
        assert_eq!(q[0].label, "why this layout?");
        assert_eq!(q[0].origin, "2");
        assert!(g
            .edges
            .iter()
            .any(|e| e.relation == QocRelation::RespondsTo && e.to == q[0].id));
        assert!(g
            .edges
            .iter()
            .any(|e| e.relation == QocRelation::AssessedBy
                && e.polarity == QocPolarity::Supports));
    }

    #[test]
    fn uncoded_justification_of_a_rejection_becomes_a_flagged_criterion() {
        let g = &graphs(
            "# meeting: m\n\
             1|A|the draft|INTRO/SOLa\n\
             2|B|no good|REJ/INTRO1\n\
             3|B|breaks the build|JUSTIF/REJ2\n",
        )[0];
        let criteria: Vec<_> = g.nodes.iter().filter(|n| n.kind == QocNodeKind::Criterion).collect();
        assert_eq!(criteria.len(), 1);
        assert!(criteria[0].uncoded);
        assert_eq!(criteria[0].label, "breaks the build");
        assert!(g
            .edges
            .iter()
            .any(|e| e.to == criteria[0].id && e.polarity == QocPolarity::Rejects));
    }

    #[test]
    fn graphs_are_tripartite_and_json_round_trips() {
        let gs = graphs(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|alt|DEV/INTRO1\n\
             3|C|fine|EVAL+/DEV2/CRIT.Ca\n\
             4|A|take it|ACC/DEV2/CRIT.Ca\n\
             5|A|b|INTRO/SOLb\n\
             6|B|why|REQ/JUSTIF/INTRO5\n\
             7|A|because|JUSTIF/INTRO5/CRIT.Cb\n",
        );
        for g in &gs {
            for e in &g.edges {
                let kind_of = |id: &str| g.nodes.iter().find(|n| n.id == id).unwrap().kind;
                match e.relation {
                    QocRelation::RespondsTo => {
                        assert_eq!(kind_of(&e.from), QocNodeKind::Option);
                        assert_eq!(kind_of(&e.to), QocNodeKind::Question);
                    }
                    QocRelation::AssessedBy => {
                        assert_eq!(kind_of(&e.from), QocNodeKind::Option);
                        assert_eq!(kind_of(&e.to), QocNodeKind::Criterion);
                    }
                }
            }
            let json = g.to_json();
            let back: QocGraph = serde_json::from_str(&json).unwrap();
            assert_eq!(back.to_json(), json);
        }
        let merged = merged_dot(&gs);
        assert!(merged.contains("subgraph cluster_seq1"));
        assert!(merged.contains("subgraph cluster_seq2"));
        assert!(merged.contains("s2_q1"));
    }

    #[test]
    fn criterion_strength_counts_assessments() {
        let g = &graphs(
            "# meeting: m\n\
             1|A|a|INTRO/SOLa\n\
             2|B|good|EVAL+/INTRO1/CRIT.Fa\n\
             3|B|alt|DEV/INTRO1\n\
             4|C|better|EVAL+/DEV3/CRIT.Fa\n",
        )[0];
        let criterion = g
            .nodes
            .iter()
            .find(|n| n.kind == QocNodeKind::Criterion)
            .unwrap();
        assert_eq!(criterion.strength, 2);
    }

    #[test]
    fn unknown_export_format_is_rejected() {
        let g = &graphs("# meeting: m\n1|A|a|INTRO/SOLa\n")[0];
        assert!(g.export("svg").is_err());
        assert!(g.export("dot").is_ok());
        assert!(g.export("json").is_ok());
    }
}
