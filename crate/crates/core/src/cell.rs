//! Flash-cell state: a vector of `n` levels in `{0..q-1}` that may only
//! increase. Raising a level is the sole mutation path; erasure resets are
//! outside the rewriting game modeled here.

use std::fmt;

/// Errors raised by cell-state operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CellError {
    /// `n` or `q` outside the model (`n >= 1`, `q >= 2`).
    InvalidShape { n: usize, q: u32 },
    /// A raise would push a level past `q-1`.
    OverLevel {
        index: usize,
        level: u32,
        amount: u32,
        q: u32,
    },
    /// Cell index outside `0..n`.
    IndexOutOfRange { index: usize, n: usize },
    /// Two states with different `n` or `q` were compared.
    DimensionMismatch,
}

impl fmt::Display for CellError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellError::InvalidShape { n, q } => {
                write!(
                    f,
                    "invalid cell-state shape: n={n}, q={q} (need n >= 1, q >= 2)"
                )
            }
            CellError::OverLevel {
                index,
                level,
                amount,
                q,
            } => write!(
                f,
                "raising cell {index} from level {level} by {amount} exceeds q-1={}",
                q - 1
            ),
            CellError::IndexOutOfRange { index, n } => {
                write!(f, "cell index {index} out of range for n={n}")
            }
            CellError::DimensionMismatch => write!(f, "cell states have different n or q"),
        }
    }
}

impl std::error::Error for CellError {}

/// An immutable snapshot of `n` cell levels, each in `{0..q-1}`.
///
/// Updates return new states, so states can be shared freely (memoized game
/// trees, parallel trials) and the monotone-transition rule can be checked
/// by comparing snapshots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellState {
    levels: Vec<u32>,
    q: u32,
}

impl CellState {
    /// All-zero start state of `n` cells with `q` levels each.
    pub fn new(n: usize, q: u32) -> Result<Self, CellError> {
        if n == 0 || q < 2 {
            return Err(CellError::InvalidShape { n, q });
        }
        Ok(CellState {
            levels: vec![0; n],
            q,
        })
    }

    /// Builds a state from explicit levels. Every level must be `< q`.
    pub fn from_levels(levels: Vec<u32>, q: u32) -> Result<Self, CellError> {
        if levels.is_empty() || q < 2 {
            return Err(CellError::InvalidShape { n: levels.len(), q });
        }
        if let Some(index) = levels.iter().position(|&c| c >= q) {
            return Err(CellError::OverLevel {
                index,
                level: levels[index],
                amount: 0,
                q,
            });
        }
        Ok(CellState { levels, q })
    }

    pub fn n(&self) -> usize {
        self.levels.len()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn level(&self, i: usize) -> u32 {
        self.levels[i]
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Sum of all levels, in `[0, n(q-1)]`.
    pub fn weight(&self) -> u64 {
        self.levels.iter().map(|&c| u64::from(c)).sum()
    }

    /// Returns a copy with cell `i` raised by `amount` (> 0).
    pub fn raise(&self, i: usize, amount: u32) -> Result<Self, CellError> {
        if i >= self.levels.len() {
            return Err(CellError::IndexOutOfRange {
                index: i,
                n: self.levels.len(),
            });
        }
        let level = self.levels[i];
        if amount == 0 || level + amount > self.q - 1 {
            return Err(CellError::OverLevel {
                index: i,
                level,
                amount,
                q: self.q,
            });
        }
        let mut levels = self.levels.clone();
        levels[i] += amount;
        Ok(CellState { levels, q: self.q })
    }

    /// Raises several cells at once; `plan` lists `(index, amount)` pairs.
    pub fn raise_all(&self, plan: &[(usize, u32)]) -> Result<Self, CellError> {
        let mut s = self.clone();
        for &(i, amount) in plan {
            s = s.raise(i, amount)?;
        }
        Ok(s)
    }

    /// True iff `self[i] >= other[i]` for all `i` (the monotone order).
    pub fn is_above(&self, other: &CellState) -> Result<bool, CellError> {
        if self.levels.len() != other.levels.len() || self.q != other.q {
            return Err(CellError::DimensionMismatch);
        }
        Ok(self.levels.iter().zip(&other.levels).all(|(a, b)| a >= b))
    }

    /// Comma-separated level list, e.g. `"0,0,1,1,1,0,0,1"`. Used in traces
    /// and golden tests.
    pub fn to_trace_string(&self) -> String {
        let parts: Vec<String> = self.levels.iter().map(|c| c.to_string()).collect();
        parts.join(",")
    }

    /// Parses the format produced by [`CellState::to_trace_string`].
    pub fn from_trace_string(s: &str, q: u32) -> Result<Self, CellError> {
        let levels: Result<Vec<u32>, _> = s.split(',').map(|t| t.trim().parse::<u32>()).collect();
        let levels = levels.map_err(|_| CellError::InvalidShape { n: 0, q })?;
        CellState::from_levels(levels, q)
    }
}
