//! Rewrite-sequence generators. Sequences start from the implicit
//! `v_0 = 0` and are validated against the data graph on construction;
//! callers cap lengths at `n(q-1)`, past which no code supports rewrites
//! anyway.

use crate::graph::{DataGraph, GraphError, RewriteSequence};
use crate::harness::rng::SplitMix64;

/// Uniform out-edge walk from vertex 0, deterministic in `seed`.
pub fn random_walk_sequence(
    graph: &DataGraph,
    seed: u64,
    length: u64,
) -> Result<RewriteSequence, GraphError> {
    let mut rng = SplitMix64::new(seed);
    let mut values = Vec::with_capacity(length as usize);
    let mut v = 0usize;
    for _ in 0..length {
        v = graph.follow(v, rng.gen_range(graph.out_degree(v)))?;
        values.push(v);
    }
    RewriteSequence::new(values, format!("walk:len={length},seed={seed}"), graph)
}

/// The deterministic round-robin load `1, 2, ..., L-1, 0, 1, ...`; every
/// step changes the value, so it is valid on any complete graph.
pub fn cyclic_sequence(graph: &DataGraph, length: u64) -> Result<RewriteSequence, GraphError> {
    let alphabet = graph.vertex_count();
    let values: Vec<usize> = (1..=length)
        .map(|i| (i % alphabet as u64) as usize)
        .collect();
    RewriteSequence::new(values, format!("cyclic:len={length}"), graph)
}

/// Parsed form of a sequence spec string: `"walk:len=448,seed=7"`,
/// `"cyclic:len=448"`, or an explicit `"list:23,45,6"`. Lengths default to
/// the caller-provided cap; walk seeds default to the master seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    Walk {
        length: Option<u64>,
        seed: Option<u64>,
    },
    Cyclic {
        length: Option<u64>,
    },
    List(Vec<usize>),
}

impl SequenceSpec {
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let (kind, args) = match text.split_once(':') {
            Some((kind, args)) => (kind.trim(), args.trim()),
            None => (text.trim(), ""),
        };
        match kind {
            "walk" => {
                let (mut length, mut seed) = (None, None);
                for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    match part.split_once('=') {
                        Some(("len", v)) => length = Some(parse_u64(v, text)?),
                        Some(("seed", v)) => seed = Some(parse_u64(v, text)?),
                        _ => {
                            return Err(GraphError::InvalidParams(format!(
                                "bad walk argument '{part}'"
                            )))
                        }
                    }
                }
                Ok(SequenceSpec::Walk { length, seed })
            }
            "cyclic" => {
                let mut length = None;
                for part in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                    match part.split_once('=') {
                        Some(("len", v)) => length = Some(parse_u64(v, text)?),
                        _ => {
                            return Err(GraphError::InvalidParams(format!(
                                "bad cyclic argument '{part}'"
                            )))
                        }
                    }
                }
                Ok(SequenceSpec::Cyclic { length })
            }
            "list" => {
                let values: Result<Vec<usize>, _> =
                    args.split(',').map(|v| v.trim().parse::<usize>()).collect();
                values
                    .map(SequenceSpec::List)
                    .map_err(|_| GraphError::InvalidParams(format!("bad list in '{text}'")))
            }
            other => Err(GraphError::InvalidParams(format!(
                "unknown sequence kind '{other}'"
            ))),
        }
    }

    /// Materializes the sequence. `max_length` is the `n(q-1)` cap; `seed`
    /// seeds walks whose spec carries none.
    pub fn build(
        &self,
        graph: &DataGraph,
        max_length: u64,
        seed: u64,
    ) -> Result<RewriteSequence, GraphError> {
        match self {
            SequenceSpec::Walk {
                length,
                seed: own_seed,
            } => random_walk_sequence(
                graph,
                own_seed.unwrap_or(seed),
                length.unwrap_or(max_length).min(max_length),
            ),
            SequenceSpec::Cyclic { length } => {
                cyclic_sequence(graph, length.unwrap_or(max_length).min(max_length))
            }
            SequenceSpec::List(values) => {
                RewriteSequence::new(values.clone(), format!("list:{}", join(values)), graph)
            }
        }
    }
}

fn parse_u64(v: &str, context: &str) -> Result<u64, GraphError> {
    v.trim()
        .parse::<u64>()
        .map_err(|_| GraphError::InvalidParams(format!("bad integer '{v}' in '{context}'")))
}

fn join(values: &[usize]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
