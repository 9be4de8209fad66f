//! The rewriting-code contract: a decoding function from cell states to
//! values and an update function that realizes a rewrite by only raising
//! levels. Every code in this crate guarantees, for a legal rewrite to `v`:
//!
//! 1. `(decode(s), v)` is an edge of the data graph,
//! 2. `update(s, v)` is above `s`,
//! 3. `decode(update(s, v)) = v`.

use std::fmt;
use std::sync::Arc;

use crate::cell::{CellError, CellState};
use crate::graph::{DataGraph, GraphError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    /// Code parameters outside the construction's domain.
    InvalidParams(String),
    /// No group count `b` satisfies `floor(n/b)^b >= L`.
    NoFeasibleB {
        n: usize,
        alphabet: usize,
    },
    /// No register assignment can host the requested alphabet.
    InfeasibleLayout(String),
    /// Value `>= L`.
    ValueOutOfRange {
        value: usize,
        alphabet: usize,
    },
    /// A rewrite must change the stored value.
    ValueUnchanged {
        value: usize,
    },
    /// The code cannot realize any further rewrite from this state.
    Exhausted {
        detail: String,
    },
    /// The rewrite target is not adjacent to the current value.
    NotAnEdge {
        from: usize,
        to: usize,
    },
    /// An update-vector query on a state with a level at `q-1`.
    SaturatedCell {
        index: usize,
    },
    /// No state above the current one decodes to the requested value.
    Unreachable {
        value: usize,
    },
    /// A state that does not fit the code's cell layout.
    StateMismatch {
        expected_cells: usize,
        got: usize,
    },
    Cell(CellError),
    Graph(GraphError),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::InvalidParams(msg) => write!(f, "invalid code parameters: {msg}"),
            CodeError::NoFeasibleB { n, alphabet } => {
                write!(
                    f,
                    "no feasible group count: floor({n}/b)^b < {alphabet} for every b"
                )
            }
            CodeError::InfeasibleLayout(msg) => write!(f, "infeasible layout: {msg}"),
            CodeError::ValueOutOfRange { value, alphabet } => {
                write!(f, "value {value} out of range for alphabet {alphabet}")
            }
            CodeError::ValueUnchanged { value } => {
                write!(f, "rewrite to {value} does not change the stored value")
            }
            CodeError::Exhausted { detail } => write!(f, "code exhausted: {detail}"),
            CodeError::NotAnEdge { from, to } => {
                write!(f, "rewrite {from} -> {to} is not a data-graph edge")
            }
            CodeError::SaturatedCell { index } => {
                write!(f, "cell {index} is saturated at q-1")
            }
            CodeError::Unreachable { value } => {
                write!(f, "no reachable state decodes to {value}")
            }
            CodeError::StateMismatch {
                expected_cells,
                got,
            } => {
                write!(f, "state has {got} cells, code expects {expected_cells}")
            }
            CodeError::Cell(e) => write!(f, "{e}"),
            CodeError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CodeError {}

impl From<CellError> for CodeError {
    fn from(e: CellError) -> Self {
        CodeError::Cell(e)
    }
}

impl From<GraphError> for CodeError {
    fn from(e: GraphError) -> Self {
        CodeError::Graph(e)
    }
}

/// Per-write bookkeeping a code may expose for traces; the trajectory code
/// reports which register a write lands in.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct WriteNote {
    /// 1-based write number (the initial anchor store is write 1).
    pub write_index: u64,
    /// 0 is the anchor, `1..=d` are edge registers.
    pub register: usize,
    /// The symbol stored: a vertex for the anchor, an edge label otherwise.
    pub symbol: usize,
}

/// A rewriting code: `decode` reads the stored value, `update` realizes a
/// rewrite by raising levels only.
pub trait RewritingCode: Send + Sync {
    /// The spec string this code answers to, e.g. `"split:L=56"`.
    fn spec_string(&self) -> String;

    /// Number of cells a state of this code carries. For the trajectory
    /// code this includes the separately budgeted counter cells.
    fn state_cells(&self) -> usize;

    /// The cell budget `n` the guarantees are quoted against (excludes
    /// counter cells).
    fn cell_budget(&self) -> usize;

    fn q(&self) -> u32;

    fn alphabet(&self) -> usize;

    /// The state representing the initial data `v_0 = 0`.
    fn initial_state(&self) -> CellState {
        CellState::new(self.state_cells(), self.q()).expect("valid code shape")
    }

    fn decode(&self, s: &CellState) -> Result<usize, CodeError>;

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError>;

    /// Trace annotation for the write `update(s, v)` would perform.
    fn write_annotation(&self, _s: &CellState, _v: usize) -> Option<WriteNote> {
        None
    }

    /// The family's worst-case rewrite guarantee at these parameters,
    /// floored to an integer; `None` where no closed form applies (for
    /// instance the randomized code, whose guarantee is in expectation).
    fn guarantee_floor(&self) -> Option<i64> {
        None
    }
}

fn check_shape(code: &(impl RewritingCode + ?Sized), s: &CellState) -> Result<(), CodeError> {
    if s.n() != code.state_cells() {
        return Err(CodeError::StateMismatch {
            expected_cells: code.state_cells(),
            got: s.n(),
        });
    }
    Ok(())
}

/// Shared prelude for `update`: shape, range, edge membership (complete
/// graph unless the code checks its own), and the changed-value rule.
pub(crate) fn check_update_args(
    code: &(impl RewritingCode + ?Sized),
    s: &CellState,
    v: usize,
) -> Result<usize, CodeError> {
    check_shape(code, s)?;
    if v >= code.alphabet() {
        return Err(CodeError::ValueOutOfRange {
            value: v,
            alphabet: code.alphabet(),
        });
    }
    let current = code.decode(s)?;
    if v == current {
        return Err(CodeError::ValueUnchanged { value: v });
    }
    Ok(current)
}

pub(crate) fn check_decode_shape(
    code: &(impl RewritingCode + ?Sized),
    s: &CellState,
) -> Result<(), CodeError> {
    check_shape(code, s)
}

/// Parsed form of a code spec string:
/// `"modular:L=8"`, `"baserep:L=16"`, `"split:L=56"`, `"trajectory"`,
/// `"parametric:theta=identity"`, `"robust:seed=7"` (optionally with
/// `,mode=continue`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Modular {
        alphabet: Option<usize>,
    },
    BaseRep {
        alphabet: Option<usize>,
    },
    Split {
        alphabet: Option<usize>,
    },
    Trajectory,
    ParametricIdentity,
    Robust {
        seed: Option<u64>,
        stop_at_full: bool,
    },
}

impl CodeSpec {
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let (kind, args) = match text.split_once(':') {
            Some((kind, args)) => (kind.trim(), args.trim()),
            None => (text.trim(), ""),
        };
        let fields: Vec<(&str, &str)> = args
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|part| part.split_once('=').unwrap_or((part, "")))
            .map(|(k, v)| (k.trim(), v.trim()))
            .collect();
        let alphabet = |key: &str| -> Result<Option<usize>, CodeError> {
            match fields.iter().find(|(k, _)| k.eq_ignore_ascii_case(key)) {
                None => Ok(None),
                Some((_, v)) => v.parse::<usize>().map(Some).map_err(|_| {
                    CodeError::InvalidParams(format!("bad integer '{v}' in '{text}'"))
                }),
            }
        };
        match kind {
            "modular" => Ok(CodeSpec::Modular {
                alphabet: alphabet("L")?,
            }),
            "baserep" => Ok(CodeSpec::BaseRep {
                alphabet: alphabet("L")?,
            }),
            "split" => Ok(CodeSpec::Split {
                alphabet: alphabet("L")?,
            }),
            "trajectory" => Ok(CodeSpec::Trajectory),
            "parametric" => match fields.iter().find(|(k, _)| *k == "theta") {
                Some((_, "identity")) | None => Ok(CodeSpec::ParametricIdentity),
                Some((_, other)) => Err(CodeError::InvalidParams(format!(
                    "unsupported theta '{other}' (only 'identity')"
                ))),
            },
            "robust" => {
                let seed = match fields.iter().find(|(k, _)| *k == "seed") {
                    None => None,
                    Some((_, v)) => Some(v.parse::<u64>().map_err(|_| {
                        CodeError::InvalidParams(format!("bad seed '{v}' in '{text}'"))
                    })?),
                };
                let stop_at_full = match fields.iter().find(|(k, _)| *k == "mode") {
                    None => true,
                    Some((_, "stop-at-full")) => true,
                    Some((_, "continue")) => false,
                    Some((_, other)) => {
                        return Err(CodeError::InvalidParams(format!(
                            "unknown robust mode '{other}' (stop-at-full | continue)"
                        )))
                    }
                };
                Ok(CodeSpec::Robust { seed, stop_at_full })
            }
            other => Err(CodeError::InvalidParams(format!(
                "unknown code kind '{other}'"
            ))),
        }
    }

    /// Instantiates the code for `n` cells of `q` levels over `graph`.
    ///
    /// A spec-supplied alphabet must match the graph; absent, the graph's
    /// vertex count is used. `master_seed` seeds the robust code when its
    /// spec carries no seed of its own; `t_target` sizes the trajectory
    /// counter.
    pub fn build(
        &self,
        n: usize,
        q: u32,
        graph: &Arc<DataGraph>,
        t_target: u64,
        master_seed: u64,
    ) -> Result<Box<dyn RewritingCode>, CodeError> {
        let graph_alphabet = graph.vertex_count();
        let resolve = |spec_alphabet: &Option<usize>| -> Result<usize, CodeError> {
            match spec_alphabet {
                None => Ok(graph_alphabet),
                Some(a) if *a == graph_alphabet => Ok(*a),
                Some(a) => Err(CodeError::InvalidParams(format!(
                    "code alphabet L={a} does not match graph L={graph_alphabet}"
                ))),
            }
        };
        match self {
            CodeSpec::Modular { alphabet } => {
                let code = crate::registers::ModularCode::new(n, q, resolve(alphabet)?)?;
                Ok(Box::new(code))
            }
            CodeSpec::BaseRep { alphabet } => {
                let code = crate::registers::BaseRepCode::new(n, q, resolve(alphabet)?)?;
                Ok(Box::new(code))
            }
            CodeSpec::Split { alphabet } => {
                let code = crate::registers::SplitCode::new(n, q, resolve(alphabet)?)?;
                Ok(Box::new(code))
            }
            CodeSpec::Trajectory => {
                let code =
                    crate::trajectory::TrajectoryCode::plan(n, q, Arc::clone(graph), t_target)?;
                Ok(Box::new(code))
            }
            CodeSpec::ParametricIdentity => {
                let code = crate::parametric::ParametricCode::identity(n, q, graph_alphabet)?;
                Ok(Box::new(code))
            }
            CodeSpec::Robust { seed, stop_at_full } => {
                let code = crate::parametric::RobustCode::sample(
                    n,
                    q,
                    graph_alphabet,
                    seed.unwrap_or(master_seed),
                    *stop_at_full,
                )?;
                Ok(Box::new(code))
            }
        }
    }
}
