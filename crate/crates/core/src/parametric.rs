//! Weight-indexed parametric codes and the randomized robust code built on
//! them.
//!
//! A parametric code decodes `sum theta[w-1][i] * c_i + sum_{j<w} a_j mod L`
//! at weight `w`, and rewrites greedily: it raises levels with the minimum
//! total weight increase that lands on the target value.
//!
//! The robust code draws the `a` sequence uniformly at random and groups
//! cells into `L` super cells (cell `j` belongs to class `j mod L`); while
//! no super cell is full, every rewrite raises exactly one cell, in a super
//! cell that is uniform and independent of history.

use crate::cell::CellState;
use crate::code::{check_decode_shape, check_update_args, CodeError, RewritingCode};
use crate::harness::rng::SplitMix64;

/// The update vector of a state: entry `i` is the decoded-value change
/// caused by raising cell `i` by one. Defined only when every level is at
/// most `q-2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateVector {
    pub entries: Vec<usize>,
}

impl UpdateVector {
    /// Number of distinct entries; `L` means any rewrite costs one unit of
    /// weight.
    pub fn diversity(&self) -> usize {
        let mut seen = self.entries.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// A fully tabulated weight-indexed code: `theta` has `n(q-1)` rows of `n`
/// entries, `a` has `n(q-1)` entries, all in `{0..L-1}`.
#[derive(Debug, Clone)]
pub struct ParametricCode {
    n: usize,
    q: u32,
    alphabet: usize,
    theta: Vec<Vec<usize>>,
    a: Vec<usize>,
    /// `a_prefix[w] = sum_{j<w} a_j mod L`.
    a_prefix: Vec<usize>,
}

impl ParametricCode {
    pub fn new(
        n: usize,
        q: u32,
        alphabet: usize,
        theta: Vec<Vec<usize>>,
        a: Vec<usize>,
    ) -> Result<Self, CodeError> {
        if n == 0 || q < 2 || alphabet < 2 {
            return Err(CodeError::InvalidParams(format!(
                "parametric code needs n >= 1, q >= 2, L >= 2, got n={n}, q={q}, L={alphabet}"
            )));
        }
        let rows = n * (q as usize - 1);
        if theta.len() != rows || theta.iter().any(|row| row.len() != n) {
            return Err(CodeError::InvalidParams(format!(
                "theta must be {rows} rows of {n} entries"
            )));
        }
        if a.len() != rows {
            return Err(CodeError::InvalidParams(format!(
                "a must have {rows} entries"
            )));
        }
        if theta
            .iter()
            .flatten()
            .chain(a.iter())
            .any(|&e| e >= alphabet)
        {
            return Err(CodeError::InvalidParams("table entries must be < L".into()));
        }
        let a_prefix = prefix_sums(&a, alphabet);
        Ok(ParametricCode {
            n,
            q,
            alphabet,
            theta,
            a,
            a_prefix,
        })
    }

    /// The natural choice `theta[w][i] = i` (1-based cell index,
    /// reduced mod L) with an all-zero `a` sequence.
    pub fn identity(n: usize, q: u32, alphabet: usize) -> Result<Self, CodeError> {
        if q < 2 {
            return Err(CodeError::InvalidParams(format!("need q >= 2, got {q}")));
        }
        let rows = n * (q as usize - 1);
        let row: Vec<usize> = (1..=n).map(|i| i % alphabet.max(1)).collect();
        ParametricCode::new(n, q, alphabet, vec![row; rows], vec![0; rows])
    }

    pub fn theta_row(&self, w: usize) -> &[usize] {
        &self.theta[w]
    }

    pub fn a_sequence(&self) -> &[usize] {
        &self.a
    }

    fn decode_levels(&self, levels: &[u32]) -> usize {
        let w: u64 = levels.iter().map(|&c| u64::from(c)).sum();
        if w == 0 {
            return 0;
        }
        let row = &self.theta[w as usize - 1];
        let mut acc: u64 = self.a_prefix[w as usize] as u64;
        for (i, &c) in levels.iter().enumerate() {
            acc = (acc + row[i] as u64 * u64::from(c)) % self.alphabet as u64;
        }
        acc as usize
    }

    /// The update vector at `s`; errors with `SaturatedCell` if some level
    /// is already `q-1`.
    pub fn update_vector(&self, s: &CellState) -> Result<UpdateVector, CodeError> {
        check_decode_shape(self, s)?;
        if let Some(index) = s.levels().iter().position(|&c| c == self.q - 1) {
            return Err(CodeError::SaturatedCell { index });
        }
        let base = self.decode_levels(s.levels());
        let mut levels = s.levels().to_vec();
        let entries = (0..self.n)
            .map(|i| {
                levels[i] += 1;
                let e = (self.decode_levels(&levels) + self.alphabet - base) % self.alphabet;
                levels[i] -= 1;
                e
            })
            .collect();
        Ok(UpdateVector { entries })
    }
}

fn prefix_sums(a: &[usize], modulus: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let mut acc = 0usize;
    out.push(0);
    for &x in a {
        acc = (acc + x) % modulus;
        out.push(acc);
    }
    out
}

/// Feasibility DP for "spend exactly `units` level raises across cells with
/// per-cell caps so the weighted increment sum is `target` mod `modulus`";
/// returns the increment vector whose raised-index sequence is
/// lexicographically smallest, or `None`.
fn increment_plan(
    weights: &[usize],
    caps: &[u32],
    units: usize,
    target: usize,
    modulus: usize,
) -> Option<Vec<u32>> {
    let n = weights.len();
    // reach[i][m][r]: cells i.. can spend exactly m units hitting residue r.
    let mut reach = vec![vec![vec![false; modulus]; units + 1]; n + 1];
    reach[n][0][0] = true;
    for i in (0..n).rev() {
        let w = weights[i] % modulus;
        for m in 0..=units {
            for r in 0..modulus {
                let mut ok = false;
                for t in 0..=(caps[i] as usize).min(m) {
                    let rest = (r + modulus - t * w % modulus) % modulus;
                    if reach[i + 1][m - t][rest] {
                        ok = true;
                        break;
                    }
                }
                reach[i][m][r] = ok;
            }
        }
    }
    if !reach[0][units][target % modulus] {
        return None;
    }
    // Greedy reconstruction: units poured into the earliest cells first,
    // which makes the sequence of raised indices lexicographically smallest.
    let mut plan = vec![0u32; n];
    let mut m = units;
    let mut r = target % modulus;
    for i in 0..n {
        let w = weights[i] % modulus;
        for t in (0..=(caps[i] as usize).min(m)).rev() {
            let rest = (r + modulus - t * w % modulus) % modulus;
            if reach[i + 1][m - t][rest] {
                plan[i] = t as u32;
                m -= t;
                r = rest;
                break;
            }
        }
    }
    debug_assert_eq!(m, 0);
    Some(plan)
}

impl RewritingCode for ParametricCode {
    fn spec_string(&self) -> String {
        format!("parametric:theta=identity,L={}", self.alphabet)
    }

    fn state_cells(&self) -> usize {
        self.n
    }

    fn cell_budget(&self) -> usize {
        self.n
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn alphabet(&self) -> usize {
        self.alphabet
    }

    fn decode(&self, s: &CellState) -> Result<usize, CodeError> {
        check_decode_shape(self, s)?;
        Ok(self.decode_levels(s.levels()))
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        check_update_args(self, s, v)?;
        let w = s.weight() as usize;
        let caps: Vec<u32> = s.levels().iter().map(|&c| self.q - 1 - c).collect();
        let capacity: usize = caps.iter().map(|&c| c as usize).sum();
        // Greedy: smallest weight increase k whose final decode hits v. The
        // theta row and a-prefix are those of the final weight w+k.
        for k in 1..=capacity {
            let row = &self.theta[w + k - 1];
            let mut base = self.a_prefix[w + k] as u64;
            for (i, &c) in s.levels().iter().enumerate() {
                base = (base + row[i] as u64 * u64::from(c)) % self.alphabet as u64;
            }
            let target = (v + self.alphabet - base as usize % self.alphabet) % self.alphabet;
            if let Some(plan) = increment_plan(row, &caps, k, target, self.alphabet) {
                let raises: Vec<(usize, u32)> = plan
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > 0)
                    .map(|(i, &t)| (i, t))
                    .collect();
                let s2 = s.raise_all(&raises)?;
                debug_assert_eq!(self.decode_levels(s2.levels()), v);
                return Ok(s2);
            }
        }
        Err(CodeError::Unreachable { value: v })
    }
}

/// The randomized robust code: `a` drawn i.i.d. uniform from `{0..L-1}`
/// under a seed, cells partitioned into `L` super cells by index mod `L`.
///
/// In `stop_at_full` mode the code refuses every rewrite once any super
/// cell has reached capacity, matching the balls-into-bins accounting of
/// its guarantee; otherwise it keeps going with minimum-weight
/// multi-increment plans.
#[derive(Debug, Clone)]
pub struct RobustCode {
    n: usize,
    q: u32,
    alphabet: usize,
    a: Vec<usize>,
    a_prefix: Vec<usize>,
    seed: u64,
    stop_at_full: bool,
}

impl RobustCode {
    pub fn sample(
        n: usize,
        q: u32,
        alphabet: usize,
        seed: u64,
        stop_at_full: bool,
    ) -> Result<Self, CodeError> {
        if q < 2 || alphabet < 2 {
            return Err(CodeError::InvalidParams(format!(
                "robust code needs q >= 2, L >= 2, got q={q}, L={alphabet}"
            )));
        }
        if n < alphabet {
            return Err(CodeError::InvalidParams(format!(
                "robust code needs n >= L, got n={n}, L={alphabet}"
            )));
        }
        let mut rng = SplitMix64::new(seed);
        let a: Vec<usize> = (0..n * (q as usize - 1))
            .map(|_| rng.gen_range(alphabet))
            .collect();
        let a_prefix = prefix_sums(&a, alphabet);
        Ok(RobustCode {
            n,
            q,
            alphabet,
            a,
            a_prefix,
            seed,
            stop_at_full,
        })
    }

    /// Test hook: replaces the sampled `a` sequence (entries must be `< L`).
    pub fn with_a_sequence(mut self, a: Vec<usize>) -> Result<Self, CodeError> {
        if a.len() != self.a.len() || a.iter().any(|&x| x >= self.alphabet) {
            return Err(CodeError::InvalidParams("bad a sequence".into()));
        }
        self.a_prefix = prefix_sums(&a, self.alphabet);
        self.a = a;
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stop_at_full(&self) -> bool {
        self.stop_at_full
    }

    pub fn a_sequence(&self) -> &[usize] {
        &self.a
    }

    /// 0-based super-cell class of a 0-based cell index. In 1-based
    /// numbering, class `i` holds the cells congruent to `i mod L`.
    pub fn class_of(&self, cell: usize) -> usize {
        cell % self.alphabet
    }

    /// Cells of one class, ascending.
    pub fn class_cells(&self, class0: usize) -> impl Iterator<Item = usize> + '_ {
        (class0..self.n).step_by(self.alphabet)
    }

    /// Super-cell levels `h`: the level sum per class.
    pub fn super_levels(&self, s: &CellState) -> Vec<u64> {
        let mut h = vec![0u64; self.alphabet];
        for (j, &c) in s.levels().iter().enumerate() {
            h[j % self.alphabet] += u64::from(c);
        }
        h
    }

    /// Capacity of each super cell: class size times `q-1`.
    pub fn class_capacities(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.alphabet];
        for j in 0..self.n {
            sizes[j % self.alphabet] += 1;
        }
        sizes.iter().map(|&s| s * u64::from(self.q - 1)).collect()
    }

    fn decode_from_h(&self, h: &[u64], w: u64) -> usize {
        if w == 0 {
            return 0;
        }
        let modulus = self.alphabet as u64;
        let mut acc = self.a_prefix[w as usize] as u64;
        for (class0, &level) in h.iter().enumerate() {
            acc = (acc + (class0 as u64 + 1) % modulus * (level % modulus)) % modulus;
        }
        acc as usize
    }

    /// Update vector over super cells: entry for (1-based) class `i` is the
    /// decode change from raising that super cell. While no super cell is
    /// full this is `(i + a_w) mod L`, with all `L` values distinct.
    pub fn super_update_vector(&self, s: &CellState) -> Result<Vec<usize>, CodeError> {
        check_decode_shape(self, s)?;
        let h = self.super_levels(s);
        let caps = self.class_capacities();
        if let Some(class0) = h.iter().zip(&caps).position(|(l, c)| l >= c) {
            return Err(CodeError::SaturatedCell { index: class0 });
        }
        let w = s.weight();
        let base = self.decode_from_h(&h, w);
        let mut h2 = h;
        Ok((0..self.alphabet)
            .map(|class0| {
                h2[class0] += 1;
                let e = (self.decode_from_h(&h2, w + 1) + self.alphabet - base) % self.alphabet;
                h2[class0] -= 1;
                e
            })
            .collect())
    }

    /// Raises `count` levels on the lowest free cells of `class0`.
    fn raise_in_class(&self, s: &CellState, class0: usize, count: usize) -> CellState {
        let mut levels = s.levels().to_vec();
        let mut left = count;
        for j in self.class_cells(class0) {
            while left > 0 && levels[j] < self.q - 1 {
                levels[j] += 1;
                left -= 1;
            }
            if left == 0 {
                break;
            }
        }
        assert_eq!(left, 0, "class capacity checked before raising");
        CellState::from_levels(levels, self.q).expect("raises stay within q")
    }
}

impl RewritingCode for RobustCode {
    fn spec_string(&self) -> String {
        let mode = if self.stop_at_full {
            "stop-at-full"
        } else {
            "continue"
        };
        format!("robust:seed={},mode={mode}", self.seed)
    }

    fn state_cells(&self) -> usize {
        self.n
    }

    fn cell_budget(&self) -> usize {
        self.n
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn alphabet(&self) -> usize {
        self.alphabet
    }

    fn decode(&self, s: &CellState) -> Result<usize, CodeError> {
        check_decode_shape(self, s)?;
        Ok(self.decode_from_h(&self.super_levels(s), s.weight()))
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        let current = check_update_args(self, s, v)?;
        let h = self.super_levels(s);
        let caps = self.class_capacities();
        if self.stop_at_full {
            if let Some(class0) = h.iter().zip(&caps).position(|(l, c)| l >= c) {
                return Err(CodeError::Exhausted {
                    detail: format!("super cell {} is full (stop-at-full mode)", class0 + 1),
                });
            }
        }
        let w = s.weight() as usize;
        let total_capacity = self.n * (self.q as usize - 1);
        if w >= total_capacity {
            return Err(CodeError::Unreachable { value: v });
        }

        // One super-cell raise: i + a_w = v - current (mod L), residue 0
        // meaning class L.
        let residue = ((v + self.alphabet - current) % self.alphabet + self.alphabet
            - self.a[w] % self.alphabet)
            % self.alphabet;
        let class0 = if residue == 0 {
            self.alphabet - 1
        } else {
            residue - 1
        };
        if h[class0] < caps[class0] {
            return Ok(self.raise_in_class(s, class0, 1));
        }

        // The chosen super cell is full; find the cheapest multi-increment
        // plan over classes with room. The m-th raise happens at weight
        // w+m-1, so k raises shift the decode by sum(i_m) + sum a[w..w+k-1].
        let class_room: Vec<u32> = h
            .iter()
            .zip(&caps)
            .map(|(l, c)| (c - l).min(u64::from(u32::MAX)) as u32)
            .collect();
        let weights: Vec<usize> = (1..=self.alphabet).map(|i| i % self.alphabet).collect();
        let mut a_sum = self.a[w] % self.alphabet;
        for k in 2..=(total_capacity - w) {
            a_sum = (a_sum + self.a[w + k - 1]) % self.alphabet;
            let target = (v + 2 * self.alphabet - current - a_sum) % self.alphabet;
            if let Some(plan) = increment_plan(&weights, &class_room, k, target, self.alphabet) {
                let mut s2 = s.clone();
                for (class0, &count) in plan.iter().enumerate() {
                    if count > 0 {
                        s2 = self.raise_in_class(&s2, class0, count as usize);
                    }
                }
                debug_assert_eq!(self.decode(&s2)?, v);
                return Ok(s2);
            }
        }
        Err(CodeError::Unreachable { value: v })
    }
}
