//! Rewriting codes for complete data graphs. Three constructions cover the
//! alphabet range:
//!
//! - [`ModularCode`] for `2 <= L <= n`: groups of `L` cells written band by
//!   band, decoding `sum i*(c_i - c_0) mod L` in the active group.
//! - [`BaseRepCode`] for very large `L`: each write stores the radix-`R`
//!   representation of the value in the next band of levels.
//! - [`SplitCode`] for `n < L`: the value is split into `b` digits, one
//!   modular group per digit.
//!
//! These serve standalone and as sub-codes inside the trajectory code.

use crate::cell::CellState;
use crate::code::{check_decode_shape, check_update_args, CodeError, RewritingCode};

/// Tie-break among equal-cardinality raise sets. `LexSmallest` reproduces
/// the reference worked example (it picks `{4,7}` over `{5,6}`);
/// `LexLargest` exists so golden tests can prove they detect a divergent
/// encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LexSmallest,
    LexLargest,
}

/// Minimum-cardinality subset of `free` whose index sum is `target` mod
/// `modulus`. Returns the chosen indices (ascending) or `None` when no
/// subset works. `free` must be sorted ascending.
fn min_subset_for_residue(
    free: &[usize],
    modulus: usize,
    target: usize,
    tie: TieBreak,
) -> Option<Vec<usize>> {
    debug_assert!(free.windows(2).all(|w| w[0] < w[1]));
    let target = target % modulus;

    // 0/1 DP over residues for the minimum cardinality.
    const UNREACHABLE: u32 = u32::MAX;
    let mut best = vec![UNREACHABLE; modulus];
    best[0] = 0;
    for &cell in free {
        let w = cell % modulus;
        let prev = best.clone();
        for (r, &count) in prev.iter().enumerate() {
            if count != UNREACHABLE {
                let nr = (r + w) % modulus;
                best[nr] = best[nr].min(count + 1);
            }
        }
    }
    if best[target] == UNREACHABLE {
        return None;
    }
    let cardinality = best[target] as usize;
    if cardinality == 0 {
        return Some(Vec::new());
    }

    // Suffix reachability: reach[i][m][r] = true iff some m-subset of
    // free[i..] sums to r. Small at register scale (|free| <= L <= n).
    let len = free.len();
    let mut reach = vec![vec![vec![false; modulus]; cardinality + 1]; len + 1];
    reach[len][0][0] = true;
    for i in (0..len).rev() {
        let w = free[i] % modulus;
        for m in 0..=cardinality {
            for r in 0..modulus {
                let skip = reach[i + 1][m][r];
                let take = m > 0 && reach[i + 1][m - 1][(r + modulus - w) % modulus];
                reach[i][m][r] = skip || take;
            }
        }
    }

    // Reconstruct the tie-broken subset: scanning ascending and taking the
    // first feasible cell yields the lexicographically smallest index
    // sequence; preferring the largest feasible first cell yields the
    // largest.
    let mut chosen = Vec::with_capacity(cardinality);
    let mut need = target;
    let mut remaining = cardinality;
    let mut lo = 0;
    while remaining > 0 {
        let mut pick = None;
        let candidates: Box<dyn Iterator<Item = usize>> = match tie {
            TieBreak::LexSmallest => Box::new(lo..len),
            TieBreak::LexLargest => Box::new((lo..len).rev()),
        };
        for i in candidates {
            let w = free[i] % modulus;
            let rest = (need + modulus - w) % modulus;
            if reach[i + 1][remaining - 1][rest] {
                pick = Some((i, rest));
                break;
            }
        }
        let (i, rest) = pick.expect("DP promised a feasible subset");
        chosen.push(free[i]);
        need = rest;
        remaining -= 1;
        lo = i + 1;
    }
    Some(chosen)
}

/// Decode of one modular group: `sum i*(c_i - c_0) mod modulus`. The level
/// of cell 0 doubles as the band marker, so the formula is band-agnostic.
fn group_decode(levels: &[u32], modulus: usize) -> usize {
    let c0 = i64::from(levels[0]);
    let mut acc: i64 = 0;
    for (i, &c) in levels.iter().enumerate() {
        acc += (i as i64) * (i64::from(c) - c0);
    }
    acc.rem_euclid(modulus as i64) as usize
}

/// Plans one write of `target` into a modular group, returning the group's
/// new levels, or `None` when the group cannot realize it.
///
/// Within a band only band-bottom cells (besides cell 0) may rise by one; a
/// minimum-cardinality set with the right index sum realizes the change.
/// When no set exists the whole group advances one band (every cell to the
/// common next level, which decodes to 0) and the value is encoded there.
fn group_plan(
    levels: &[u32],
    q: u32,
    modulus: usize,
    target: usize,
    tie: TieBreak,
) -> Option<Vec<u32>> {
    let current = group_decode(levels, modulus);
    let band = levels[0];

    if current == target {
        // Only the first store of value 0 into a fresh group lands here: the
        // write must raise something so the group becomes active. The pair
        // {1, modulus-1} has zero index sum; it needs modulus >= 3.
        if levels.iter().all(|&c| c == 0) && target == 0 && modulus >= 3 && q >= 2 {
            let mut next = levels.to_vec();
            next[1] = 1;
            next[modulus - 1] = 1;
            return Some(next);
        }
        return None;
    }

    let delta = (target + modulus - current) % modulus;

    // In-band attempt: raised cells go to band+1, which must exist.
    if band < q - 1 {
        let free: Vec<usize> = (1..levels.len()).filter(|&i| levels[i] == band).collect();
        if let Some(set) = min_subset_for_residue(&free, modulus, delta, tie) {
            debug_assert!(!set.is_empty());
            let mut next = levels.to_vec();
            for i in set {
                next[i] += 1;
            }
            return Some(next);
        }
    }

    // Band advance: everyone to band+1, which decodes to 0, then encode the
    // target in the fresh band with a single cell.
    let new_band = band + 1;
    if new_band > q - 1 {
        return None;
    }
    let mut next: Vec<u32> = levels.iter().map(|&c| c.max(new_band)).collect();
    if target == 0 {
        return Some(next);
    }
    if new_band + 1 > q - 1 {
        return None;
    }
    next[target] += 1;
    Some(next)
}

/// The modular WOM code for `2 <= L <= n`: `floor(n/L)` groups of `L`
/// cells, each written through `q-1` bands; the highest-indexed group with
/// a nonzero cell is the one currently decoded.
#[derive(Debug, Clone)]
pub struct ModularCode {
    n: usize,
    q: u32,
    modulus: usize,
    groups: usize,
    tie: TieBreak,
}

impl ModularCode {
    pub fn new(n: usize, q: u32, alphabet: usize) -> Result<Self, CodeError> {
        Self::with_tie_break(n, q, alphabet, TieBreak::default())
    }

    pub fn with_tie_break(
        n: usize,
        q: u32,
        alphabet: usize,
        tie: TieBreak,
    ) -> Result<Self, CodeError> {
        if q < 2 {
            return Err(CodeError::InvalidParams(format!("need q >= 2, got {q}")));
        }
        if alphabet < 2 || alphabet > n {
            return Err(CodeError::InvalidParams(format!(
                "modular code needs 2 <= L <= n, got L={alphabet}, n={n}"
            )));
        }
        Ok(ModularCode {
            n,
            q,
            modulus: alphabet,
            groups: n / alphabet,
            tie,
        })
    }

    pub fn group_count(&self) -> usize {
        self.groups
    }

    fn group_slice<'a>(&self, s: &'a CellState, g: usize) -> &'a [u32] {
        &s.levels()[g * self.modulus..(g + 1) * self.modulus]
    }

    /// Highest-indexed group with a nonzero cell; 0 for the all-zero state.
    fn active_group(&self, s: &CellState) -> usize {
        (0..self.groups)
            .rev()
            .find(|&g| self.group_slice(s, g).iter().any(|&c| c != 0))
            .unwrap_or(0)
    }

    fn replace_group(&self, s: &CellState, g: usize, group_levels: Vec<u32>) -> CellState {
        let mut levels = s.levels().to_vec();
        levels[g * self.modulus..(g + 1) * self.modulus].copy_from_slice(&group_levels);
        CellState::from_levels(levels, self.q).expect("group plan stays within q")
    }
}

impl RewritingCode for ModularCode {
    fn spec_string(&self) -> String {
        format!("modular:L={}", self.modulus)
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
        self.modulus
    }

    fn decode(&self, s: &CellState) -> Result<usize, CodeError> {
        check_decode_shape(self, s)?;
        Ok(group_decode(
            self.group_slice(s, self.active_group(s)),
            self.modulus,
        ))
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        check_update_args(self, s, v)?;
        let active = self.active_group(s);
        for g in active..self.groups {
            if let Some(next) =
                group_plan(self.group_slice(s, g), self.q, self.modulus, v, self.tie)
            {
                return Ok(self.replace_group(s, g, next));
            }
        }
        Err(CodeError::Exhausted {
            detail: format!("all {} modular group(s) exhausted", self.groups),
        })
    }

    fn guarantee_floor(&self) -> Option<i64> {
        Some(
            crate::bounds::lb_modular(self.n as u64, self.q, self.modulus as u64)
                .per_group_form
                .floor(),
        )
    }
}

/// The base-representation code: each write stores the value's `n`-digit
/// radix-`R` representation in the next band of `R` levels, with
/// `R = ceil(L^(1/n))`. Supports `floor(q/R)` writes total.
#[derive(Debug, Clone)]
pub struct BaseRepCode {
    n: usize,
    q: u32,
    alphabet: usize,
    radix: u32,
}

impl BaseRepCode {
    pub fn new(n: usize, q: u32, alphabet: usize) -> Result<Self, CodeError> {
        if n == 0 || q < 2 || alphabet < 2 {
            return Err(CodeError::InvalidParams(format!(
                "base-rep code needs n >= 1, q >= 2, L >= 2, got n={n}, q={q}, L={alphabet}"
            )));
        }
        let radix = smallest_radix(n, alphabet);
        if radix > q {
            return Err(CodeError::InvalidParams(format!(
                "radix {radix} exceeds q={q}: alphabet {alphabet} does not fit {n} cells"
            )));
        }
        Ok(BaseRepCode {
            n,
            q,
            alphabet,
            radix,
        })
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    /// Band currently written, or `None` for the untouched all-zero state.
    fn band(&self, s: &CellState) -> Option<u32> {
        let max = *s.levels().iter().max().expect("n >= 1");
        if max == 0 {
            None
        } else {
            Some(max / self.radix)
        }
    }
}

/// Smallest `R` with `R^n >= alphabet`; at least 2 for any alphabet >= 2.
fn smallest_radix(n: usize, alphabet: usize) -> u32 {
    let mut radix: u128 = 2;
    loop {
        let mut power: u128 = 1;
        let mut enough = false;
        for _ in 0..n {
            power = power.saturating_mul(radix);
            if power >= alphabet as u128 {
                enough = true;
                break;
            }
        }
        if enough {
            return radix as u32;
        }
        radix += 1;
    }
}

impl RewritingCode for BaseRepCode {
    fn spec_string(&self) -> String {
        format!("baserep:L={}", self.alphabet)
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
        let radix = u128::from(self.radix);
        let modulus = self.alphabet as u128;
        let mut acc: u128 = 0;
        let mut power: u128 = 1;
        for &c in s.levels() {
            acc = (acc + u128::from(c) % radix * power) % modulus;
            power = power * radix % modulus;
        }
        Ok(acc as usize)
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        check_update_args(self, s, v)?;
        let next_band = match self.band(s) {
            None => 0,
            Some(k) => k + 1,
        };
        let base = next_band * self.radix;
        if base + self.radix - 1 > self.q - 1 {
            return Err(CodeError::Exhausted {
                detail: format!(
                    "band {next_band} tops out at level {} > q-1={}",
                    base + self.radix - 1,
                    self.q - 1
                ),
            });
        }
        let mut rest = v;
        let levels: Vec<u32> = (0..self.n)
            .map(|_| {
                let digit = (rest % self.radix as usize) as u32;
                rest /= self.radix as usize;
                base + digit
            })
            .collect();
        debug_assert_eq!(rest, 0, "value must fit n radix-R digits");
        Ok(CellState::from_levels(levels, self.q).expect("band check keeps levels under q"))
    }

    /// Total writes including the initial store: `floor(q / R)`.
    fn guarantee_floor(&self) -> Option<i64> {
        Some(i64::from(self.q / self.radix))
    }
}

/// Smallest group count `b` with `floor(n/b)^b >= alphabet`; 1 whenever the
/// alphabet already fits one modular group (`alphabet <= n`).
pub fn choose_b(n: usize, alphabet: usize) -> Result<usize, CodeError> {
    if n == 0 || alphabet < 2 {
        return Err(CodeError::InvalidParams(format!(
            "choose_b needs n >= 1, L >= 2, got n={n}, L={alphabet}"
        )));
    }
    if alphabet <= n {
        return Ok(1);
    }
    for b in 1..=n {
        let group = (n / b) as u128;
        let mut power: u128 = 1;
        let mut enough = false;
        for _ in 0..b {
            power = power.saturating_mul(group);
            if power >= alphabet as u128 {
                enough = true;
                break;
            }
        }
        if enough {
            // Inside the analyzed regime the group count stays under the
            // closed-form ceiling 2 log L / log(n / log L).
            #[cfg(debug_assertions)]
            {
                let (nf, lf) = (n as f64, (alphabet as f64).log2());
                if alphabet >= n && lf * 16.0 <= nf && nf / lf >= 2.0 {
                    debug_assert!(b as f64 <= 2.0 * lf / (nf / lf).log2() + 1e-9);
                }
            }
            return Ok(b);
        }
    }
    Err(CodeError::NoFeasibleB { n, alphabet })
}

/// The split code for `n < L`: the value is written as `b` digits in radix
/// `M = floor(n/b)`, each digit kept by its own modular group of `M` cells.
/// Group 0 holds the most significant digit.
#[derive(Debug, Clone)]
pub struct SplitCode {
    n: usize,
    q: u32,
    alphabet: usize,
    group_count: usize,
    group_size: usize,
    tie: TieBreak,
}

impl SplitCode {
    pub fn new(n: usize, q: u32, alphabet: usize) -> Result<Self, CodeError> {
        Self::with_tie_break(n, q, alphabet, TieBreak::default())
    }

    pub fn with_tie_break(
        n: usize,
        q: u32,
        alphabet: usize,
        tie: TieBreak,
    ) -> Result<Self, CodeError> {
        if q < 2 {
            return Err(CodeError::InvalidParams(format!("need q >= 2, got {q}")));
        }
        let group_count = choose_b(n, alphabet)?;
        let group_size = n / group_count;
        Ok(SplitCode {
            n,
            q,
            alphabet,
            group_count,
            group_size,
            tie,
        })
    }

    pub fn group_count(&self) -> usize {
        self.group_count
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// The digit vector of `v`, most significant first.
    pub fn digits(&self, v: usize) -> Vec<usize> {
        let mut digits = vec![0; self.group_count];
        let mut rest = v;
        for slot in digits.iter_mut().rev() {
            *slot = rest % self.group_size;
            rest /= self.group_size;
        }
        digits
    }

    fn group_slice<'a>(&self, s: &'a CellState, g: usize) -> &'a [u32] {
        &s.levels()[g * self.group_size..(g + 1) * self.group_size]
    }

    /// Per-group decoded digits, most significant first.
    pub fn decode_digits(&self, s: &CellState) -> Vec<usize> {
        (0..self.group_count)
            .map(|g| group_decode(self.group_slice(s, g), self.group_size))
            .collect()
    }
}

impl RewritingCode for SplitCode {
    fn spec_string(&self) -> String {
        format!("split:L={}", self.alphabet)
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
        Ok(self
            .decode_digits(s)
            .into_iter()
            .fold(0, |acc, digit| acc * self.group_size + digit))
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        check_update_args(self, s, v)?;
        let targets = self.digits(v);
        let mut levels = s.levels().to_vec();
        for (g, &digit) in targets.iter().enumerate() {
            let slice = &levels[g * self.group_size..(g + 1) * self.group_size];
            if group_decode(slice, self.group_size) == digit {
                continue; // unchanged digits leave their groups untouched
            }
            let next =
                group_plan(slice, self.q, self.group_size, digit, self.tie).ok_or_else(|| {
                    CodeError::Exhausted {
                        detail: format!("split group {g} exhausted"),
                    }
                })?;
            levels[g * self.group_size..(g + 1) * self.group_size].copy_from_slice(&next);
        }
        Ok(CellState::from_levels(levels, self.q).expect("group plans stay within q"))
    }

    /// Worst case every rewrite touches every digit group, so the weakest
    /// single group's guarantee is the code's.
    fn guarantee_floor(&self) -> Option<i64> {
        Some(
            crate::bounds::Ratio::new((self.group_size as i64 + 4) * (i64::from(self.q) - 1), 4)
                .floor(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(levels: &[u32], q: u32) -> CellState {
        CellState::from_levels(levels.to_vec(), q).unwrap()
    }

    #[test]
    fn group_decode_worked_example_states() {
        // Group 1 of the worked example after the rewrite to v=6 (digit 0).
        assert_eq!(group_decode(&[0, 0, 1, 1, 1, 0, 0, 1], 8), 0);
        assert_eq!(group_decode(&[0; 8], 8), 0);
        // Final group-1 state, digit 1, read in band 1.
        assert_eq!(group_decode(&[1, 2, 1, 1, 1, 1, 1, 1], 8), 1);
    }

    #[test]
    fn mod_update_picks_minimal_lex_smallest_set() {
        let code = ModularCode::new(8, 4, 8).unwrap();
        // delta 3 with free cells {1,4,5,6,7}: pairs {4,7} and {5,6} tie,
        // lexicographically smallest wins.
        let s = state(&[0, 0, 1, 1, 0, 0, 0, 0], 4);
        assert_eq!(code.decode(&s).unwrap(), 5);
        let s2 = code.update(&s, 0).unwrap();
        assert_eq!(s2.levels(), &[0, 0, 1, 1, 1, 0, 0, 1]);
    }

    #[test]
    fn mod_update_tie_break_hook_diverges() {
        let code = ModularCode::with_tie_break(8, 4, 8, TieBreak::LexLargest).unwrap();
        let s = state(&[0, 0, 1, 1, 0, 0, 0, 0], 4);
        let s2 = code.update(&s, 0).unwrap();
        assert_eq!(s2.levels(), &[0, 0, 1, 1, 0, 1, 1, 0]);
        assert_eq!(code.decode(&s2).unwrap(), 0);
    }

    #[test]
    fn mod_update_band_advance() {
        let code = ModularCode::new(8, 4, 8).unwrap();
        // Only cell 1 free and delta 6 unreachable: advance the band, then
        // encode 1 by raising cell 1 inside band 1.
        let s = state(&[0, 0, 1, 1, 1, 1, 1, 1], 4);
        assert_eq!(code.decode(&s).unwrap(), 3);
        let s2 = code.update(&s, 1).unwrap();
        assert_eq!(s2.levels(), &[1, 2, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn mod_update_triple_when_no_smaller_set() {
        let code = ModularCode::new(8, 4, 8).unwrap();
        let s = state(&[0, 1, 0, 0, 0, 1, 1, 1], 4);
        assert_eq!(code.decode(&s).unwrap(), 3);
        let s2 = code.update(&s, 4).unwrap();
        assert_eq!(s2.levels(), &[0, 1, 1, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn mod_update_moves_to_next_group_on_exhaustion() {
        // n=4, L=2, q=2: group {0,1} supports 1 -> 0 via the all-ones band,
        // then the write of 1 must open group {2,3}.
        let code = ModularCode::new(4, 2, 2).unwrap();
        let s0 = code.initial_state();
        let s1 = code.update(&s0, 1).unwrap();
        assert_eq!(s1.levels(), &[0, 1, 0, 0]);
        let s2 = code.update(&s1, 0).unwrap();
        assert_eq!(s2.levels(), &[1, 1, 0, 0]);
        let s3 = code.update(&s2, 1).unwrap();
        assert_eq!(s3.levels(), &[1, 1, 0, 1]);
        assert_eq!(code.decode(&s3).unwrap(), 1);
        let s4 = code.update(&s3, 0).unwrap();
        assert_eq!(s4.levels(), &[1, 1, 1, 1]);
        assert!(matches!(
            code.update(&s4, 1),
            Err(CodeError::Exhausted { .. })
        ));
    }

    #[test]
    fn mod_update_rejects_bad_values() {
        let code = ModularCode::new(8, 4, 8).unwrap();
        let s = code.initial_state();
        assert!(matches!(
            code.update(&s, 8),
            Err(CodeError::ValueOutOfRange { .. })
        ));
        assert!(matches!(
            code.update(&s, 0),
            Err(CodeError::ValueUnchanged { .. })
        ));
    }

    #[test]
    fn minimal_set_matches_brute_force() {
        // Exhaustive check of cardinality minimality for group size <= 12.
        for modulus in [5usize, 8, 12] {
            for mask in 0u32..(1 << (modulus - 1)) {
                let free: Vec<usize> = (1..modulus).filter(|i| mask >> (i - 1) & 1 == 1).collect();
                for target in 0..modulus {
                    let got = min_subset_for_residue(&free, modulus, target, TieBreak::LexSmallest);
                    let brute = brute_min_cardinality(&free, modulus, target);
                    match (got, brute) {
                        (None, None) => {}
                        (Some(set), Some(k)) => {
                            assert_eq!(set.len(), k, "free={free:?} target={target}");
                            let sum: usize = set.iter().sum();
                            assert_eq!(sum % modulus, target);
                        }
                        (got, brute) => {
                            panic!("free={free:?} target={target}: dp={got:?} brute={brute:?}")
                        }
                    }
                }
            }
        }
    }

    fn brute_min_cardinality(free: &[usize], modulus: usize, target: usize) -> Option<usize> {
        let mut best: Option<usize> = None;
        for mask in 0u32..(1 << free.len()) {
            let mut sum = 0usize;
            let mut count = 0usize;
            for (i, &cell) in free.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    sum += cell;
                    count += 1;
                }
            }
            if sum % modulus == target % modulus {
                best = Some(best.map_or(count, |b: usize| b.min(count)));
            }
        }
        best
    }

    #[test]
    fn base_rep_radix_and_decode() {
        let code = BaseRepCode::new(3, 8, 8).unwrap();
        assert_eq!(code.radix(), 2);
        assert_eq!(code.decode(&state(&[1, 0, 1], 8)).unwrap(), 5);
        assert_eq!(code.decode(&state(&[0, 0, 0], 8)).unwrap(), 0);
        assert_eq!(code.decode(&state(&[3, 3, 2], 8)).unwrap(), 3);
    }

    #[test]
    fn base_rep_update_bands() {
        let code = BaseRepCode::new(3, 8, 8).unwrap();
        let s0 = code.initial_state();
        let s1 = code.update(&s0, 5).unwrap();
        assert_eq!(s1.levels(), &[1, 0, 1]);
        let s2 = code.update(&s1, 3).unwrap();
        assert_eq!(s2.levels(), &[3, 3, 2]);
        assert!(s2.is_above(&s1).unwrap());
    }

    #[test]
    fn base_rep_exhausts_when_band_overflows() {
        // q=4, R=2: band 1 ends at level 3, so band 2 cannot open.
        let code = BaseRepCode::new(3, 4, 8).unwrap();
        let s = code.update(&code.initial_state(), 5).unwrap();
        let s = code.update(&s, 3).unwrap();
        assert!(matches!(
            code.update(&s, 1),
            Err(CodeError::Exhausted { .. })
        ));
    }

    #[test]
    fn base_rep_rejects_oversized_radix() {
        // L = 20 on 4 cells needs radix 3; q=2 cannot host it.
        assert!(BaseRepCode::new(4, 2, 20).is_err());
        assert!(BaseRepCode::new(4, 5, 20).is_ok());
    }

    #[test]
    fn choose_b_examples() {
        assert_eq!(choose_b(16, 56).unwrap(), 2);
        assert_eq!(choose_b(16, 8).unwrap(), 1);
        assert_eq!(choose_b(64, 64).unwrap(), 1);
        // floor(8/b)^b maxes out at 16 < 100: no feasible grouping.
        assert!(matches!(
            choose_b(8, 100),
            Err(CodeError::NoFeasibleB { .. })
        ));
        // Brute-force scan oracle.
        for n in 1..=40usize {
            for alphabet in 2..=200usize {
                let oracle = (1..=n).find(|&b| ((n / b) as u128).pow(b as u32) >= alphabet as u128);
                match (choose_b(n, alphabet), oracle) {
                    (Ok(b), Some(expect)) => assert_eq!(b, expect, "n={n} L={alphabet}"),
                    (Err(CodeError::NoFeasibleB { .. }), None) => {}
                    (got, oracle) => panic!("n={n} L={alphabet}: got {got:?}, oracle {oracle:?}"),
                }
            }
        }
    }

    #[test]
    fn split_digits_match_worked_example() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        assert_eq!(code.group_count(), 2);
        assert_eq!(code.group_size(), 8);
        assert_eq!(code.digits(23), vec![2, 7]);
        assert_eq!(code.digits(45), vec![5, 5]);
        assert_eq!(code.digits(0), vec![0, 0]);
        // Digit recombination: (2,7) -> 23, (5,5) -> 45.
        let s = code.update(&code.initial_state(), 23).unwrap();
        assert_eq!(code.decode(&s).unwrap(), 23);
    }

    #[test]
    fn split_worked_example_full_trace() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        let expected = [
            "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0",
            "0,0,1,0,0,0,0,0,0,0,0,0,0,0,0,1",
            "0,0,1,1,0,0,0,0,0,0,0,0,0,0,1,1",
            "0,0,1,1,1,0,0,1,0,1,0,0,0,0,1,1",
            "0,0,1,1,1,1,1,1,0,1,0,0,0,1,1,1",
            "1,2,1,1,1,1,1,1,0,1,1,1,1,1,1,1",
        ];
        let mut s = code.initial_state();
        assert_eq!(s.to_trace_string(), expected[0]);
        for (i, &v) in [23usize, 45, 6, 27, 12].iter().enumerate() {
            s = code.update(&s, v).unwrap();
            assert_eq!(
                s.to_trace_string(),
                expected[i + 1],
                "after rewrite {}",
                i + 1
            );
            assert_eq!(code.decode(&s).unwrap(), v);
        }
    }

    #[test]
    fn split_leaves_unchanged_digit_groups_untouched() {
        let code = SplitCode::new(16, 4, 56).unwrap();
        let s = code.update(&code.initial_state(), 23).unwrap(); // digits (2,7)
        let s2 = code.update(&s, 18).unwrap(); // digits (2,2): group 0 unchanged
        assert_eq!(&s2.levels()[..8], &s.levels()[..8]);
        assert_ne!(&s2.levels()[8..], &s.levels()[8..]);
    }

    #[test]
    fn split_infeasible_alphabet() {
        assert!(matches!(
            SplitCode::new(4, 5, 20),
            Err(CodeError::NoFeasibleB { .. })
        ));
    }

    #[test]
    fn definition3_contract_smoke() {
        // decode(update(s, v)) = v and monotonicity across a mixed workload.
        let codes: Vec<Box<dyn RewritingCode>> = vec![
            Box::new(ModularCode::new(12, 4, 6).unwrap()),
            Box::new(BaseRepCode::new(4, 9, 60).unwrap()),
            Box::new(SplitCode::new(16, 4, 56).unwrap()),
        ];
        for code in codes {
            let mut s = code.initial_state();
            let mut v = 0usize;
            let mut step = 0usize;
            loop {
                let next = (v + 1 + step * 3) % code.alphabet();
                let next = if next == v {
                    (next + 1) % code.alphabet()
                } else {
                    next
                };
                match code.update(&s, next) {
                    Ok(s2) => {
                        assert!(s2.is_above(&s).unwrap(), "{}", code.spec_string());
                        assert_eq!(code.decode(&s2).unwrap(), next, "{}", code.spec_string());
                        s = s2;
                        v = next;
                    }
                    Err(CodeError::Exhausted { .. }) => break,
                    Err(e) => panic!("{}: unexpected error {e}", code.spec_string()),
                }
                step += 1;
                assert!(
                    step <= code.cell_budget() * code.q() as usize,
                    "too many rewrites"
                );
            }
        }
    }
}
