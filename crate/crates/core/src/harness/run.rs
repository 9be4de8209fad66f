//! Applying a rewrite sequence to a code and reporting what happened. The
//! three rewriting-code conditions are asserted inline on every rewrite:
//! the step is a data-graph edge, the new state is above the old one, and
//! it decodes to the requested value. A run never errors — hitting the
//! code's limit is data, not a failure.

use serde::Serialize;
use std::fmt;

use crate::bounds::{self, BoundsReport};
use crate::cell::CellState;
use crate::code::{CodeError, RewritingCode, WriteNote};
use crate::graph::{DataGraph, RewriteSequence};

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StopReason {
    /// Every requested rewrite was supported.
    SequenceEnded,
    Exhausted {
        detail: String,
    },
    Unreachable {
        value: usize,
    },
    /// Any other code error, e.g. a rewrite to a non-neighbor.
    Rejected {
        error: String,
    },
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StopReason::SequenceEnded => write!(f, "sequence_ended"),
            StopReason::Exhausted { detail } => {
                write!(f, "exhausted: {}", detail.replace(',', ";"))
            }
            StopReason::Unreachable { value } => write!(f, "unreachable: value {value}"),
            StopReason::Rejected { error } => write!(f, "rejected: {}", error.replace(',', ";")),
        }
    }
}

/// One supported rewrite in a trace.
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    /// 1-based rewrite number within the sequence.
    pub step: u64,
    pub value: usize,
    /// `(cell, amount)` raises this rewrite performed.
    pub raised: Vec<(usize, u32)>,
    pub weight: u64,
    /// Register bookkeeping, present for trajectory codes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<WriteNote>,
}

/// The light result of a run: supported-rewrite count and stop reason.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub t: u64,
    pub stop_reason: StopReason,
    pub final_state: CellState,
}

/// A full run record, serializable to JSON; CSV rows carry the summary
/// columns.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub code: String,
    pub graph: String,
    pub sequence: String,
    pub n: u64,
    pub q: u32,
    pub alphabet: u64,
    /// Supported rewrites before the first failure.
    pub t: u64,
    pub stop_reason: StopReason,
    /// Seeds that drove this run (code sampling and/or walk generation);
    /// filled in by the caller that derived them.
    pub seeds: Vec<u64>,
    /// The code family's worst-case guarantee, floored, when one applies.
    pub guarantee_lb: Option<i64>,
    pub ub_trivial: u64,
    pub bounds: BoundsReport,
    pub trace: Vec<TraceRow>,
}

impl RunReport {
    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }
}

fn raises_between(before: &CellState, after: &CellState) -> Vec<(usize, u32)> {
    before
        .levels()
        .iter()
        .zip(after.levels())
        .enumerate()
        .filter(|(_, (b, a))| a > b)
        .map(|(i, (b, a))| (i, a - b))
        .collect()
}

/// Applies `seq` until the first unsupported rewrite; `on_step` sees each
/// supported rewrite's before/after states.
fn drive(
    code: &dyn RewritingCode,
    graph: &DataGraph,
    seq: &RewriteSequence,
    mut on_step: impl FnMut(u64, usize, &CellState, &CellState),
) -> Measurement {
    let mut state = code.initial_state();
    assert_eq!(
        code.decode(&state).expect("initial state must decode"),
        0,
        "initial state must hold v_0 = 0"
    );
    let mut current = 0usize;
    let mut t = 0u64;
    let mut stop_reason = StopReason::SequenceEnded;
    for (i, &v) in seq.values().iter().enumerate() {
        // Rewriting-code condition 1: the rewrite is a data-graph edge.
        assert!(
            graph.has_edge(current, v),
            "sequence step {} is not an edge",
            i + 1
        );
        match code.update(&state, v) {
            Ok(next) => {
                // Conditions 2 and 3: monotone transition, correct decode.
                assert!(
                    next.is_above(&state).expect("same shape"),
                    "update must not lower any level (step {})",
                    i + 1
                );
                assert_eq!(
                    code.decode(&next).expect("updated state must decode"),
                    v,
                    "update must decode to its target (step {})",
                    i + 1
                );
                t += 1;
                on_step(t, v, &state, &next);
                state = next;
                current = v;
            }
            Err(CodeError::Exhausted { detail }) => {
                stop_reason = StopReason::Exhausted { detail };
                break;
            }
            Err(CodeError::Unreachable { value }) => {
                stop_reason = StopReason::Unreachable { value };
                break;
            }
            Err(other) => {
                stop_reason = StopReason::Rejected {
                    error: other.to_string(),
                };
                break;
            }
        }
    }
    // The universal ceiling: no code supports more than n(q-1) rewrites.
    assert!(
        t <= bounds::ub_trivial(code.cell_budget() as u64, code.q()),
        "measured t={t} exceeds n(q-1)"
    );
    Measurement {
        t,
        stop_reason,
        final_state: state,
    }
}

/// Supported-rewrite count without trace collection.
pub fn measure(code: &dyn RewritingCode, graph: &DataGraph, seq: &RewriteSequence) -> Measurement {
    drive(code, graph, seq, |_, _, _, _| {})
}

/// Full run with a per-rewrite trace and attached bound evaluations.
pub fn run_sequence(
    code: &dyn RewritingCode,
    graph: &DataGraph,
    seq: &RewriteSequence,
) -> RunReport {
    let mut trace = Vec::with_capacity(seq.len());
    let measurement = drive(code, graph, seq, |step, value, before, after| {
        trace.push(TraceRow {
            step,
            value,
            raised: raises_between(before, after),
            weight: after.weight(),
            note: code.write_annotation(before, value),
        });
    });
    let n = code.cell_budget() as u64;
    let q = code.q();
    RunReport {
        version: crate::VERSION.to_string(),
        code: code.spec_string(),
        graph: graph.spec().to_string(),
        sequence: seq.spec().to_string(),
        n,
        q,
        alphabet: code.alphabet() as u64,
        t: measurement.t,
        stop_reason: measurement.stop_reason,
        seeds: Vec::new(),
        guarantee_lb: code.guarantee_floor(),
        ub_trivial: bounds::ub_trivial(n, q),
        bounds: BoundsReport::evaluate(
            n,
            q,
            code.alphabet() as u64,
            Some(graph.max_out_degree() as u64),
            0.15,
            1.0,
        ),
        trace,
    }
}

/// Header for per-trial CSV output.
pub const CSV_HEADER: &str = "trial,seed,t,lb,ub,stop_reason";

impl RunReport {
    pub fn csv_row(&self, trial: u64, seed: u64) -> String {
        let lb = self.guarantee_lb.map_or(String::new(), |v| v.to_string());
        format!(
            "{trial},{seed},{},{lb},{},{}",
            self.t, self.ub_trivial, self.stop_reason
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DataGraph;
    use crate::registers::SplitCode;

    #[test]
    fn worked_example_run_reports_t5_and_exact_trace() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        let graph = DataGraph::complete(56).unwrap();
        let seq =
            RewriteSequence::new(vec![23, 45, 6, 27, 12], "list:23,45,6,27,12".into(), &graph)
                .unwrap();
        let report = run_sequence(&code, &graph, &seq);
        assert_eq!(report.t, 5);
        assert_eq!(report.stop_reason, StopReason::SequenceEnded);
        assert_eq!(report.trace.len(), 5);
        // First rewrite raises exactly cells 2 and 15.
        assert_eq!(report.trace[0].raised, vec![(2, 1), (15, 1)]);
        assert_eq!(report.trace[0].weight, 2);
        // Guarantee column: one modular group of 8 per digit.
        assert_eq!(report.guarantee_lb, Some(9));
        assert!(report.t <= report.ub_trivial);
    }

    #[test]
    fn empty_sequence_measures_zero() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        let graph = DataGraph::complete(56).unwrap();
        let seq = RewriteSequence::new(vec![], "list:".into(), &graph).unwrap();
        let m = measure(&code, &graph, &seq);
        assert_eq!(m.t, 0);
        assert_eq!(m.stop_reason, StopReason::SequenceEnded);
    }

    #[test]
    fn long_sequence_stops_at_exhaustion() {
        let code = crate::registers::ModularCode::new(4, 2, 4).unwrap();
        let graph = DataGraph::complete(4).unwrap();
        let seq = crate::harness::sequence::cyclic_sequence(&graph, 100).unwrap();
        let m = measure(&code, &graph, &seq);
        assert!(m.t <= 4, "ceiling n(q-1)");
        assert!(matches!(m.stop_reason, StopReason::Exhausted { .. }));
    }

    #[test]
    fn report_serializes_to_json() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        let graph = DataGraph::complete(56).unwrap();
        let seq = RewriteSequence::new(vec![23], "list:23".into(), &graph).unwrap();
        let report = run_sequence(&code, &graph, &seq);
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"t\":1"));
        assert!(json.contains("\"code\":\"split:L=56\""));
        assert_eq!(report.csv_row(0, 7), "0,7,1,9,48,sequence_ended");
    }
}
