//! Exhaustive worst-case analysis. `worst_case_t` plays the adversary
//! against a fixed (deterministic) code: at every step it picks the
//! out-edge that minimizes the remaining supported rewrites, memoized over
//! (cell state, current value). `optimal_game_value` additionally searches
//! over every decode map to find what the best possible code could
//! guarantee, for tiny state spaces.

use std::collections::HashMap;

use crate::cell::CellState;
use crate::code::{CodeError, RewritingCode};
use crate::graph::DataGraph;
use crate::harness::HarnessError;

/// The exact worst-case supported-rewrite count `min` over all rewrite
/// sequences. The adversary is clairvoyant: it sees the full code,
/// including any sampled randomness.
pub fn worst_case_t(
    code: &dyn RewritingCode,
    graph: &DataGraph,
    state_cap: usize,
) -> Result<u64, HarnessError> {
    struct Search<'a> {
        code: &'a dyn RewritingCode,
        graph: &'a DataGraph,
        memo: HashMap<(CellState, usize), u64>,
        cap: usize,
    }

    impl Search<'_> {
        fn value(&mut self, state: &CellState, current: usize) -> Result<u64, HarnessError> {
            let key = (state.clone(), current);
            if let Some(&v) = self.memo.get(&key) {
                return Ok(v);
            }
            if self.memo.len() >= self.cap {
                return Err(HarnessError::StateSpaceTooLarge {
                    explored: self.memo.len(),
                    cap: self.cap,
                });
            }
            let mut worst = u64::MAX;
            for &next in self.graph.out_neighbors(current) {
                let supported = match self.code.update(state, next) {
                    Ok(s2) => {
                        debug_assert!(s2.is_above(state).unwrap_or(false));
                        1 + self.value(&s2, next)?
                    }
                    Err(CodeError::Exhausted { .. }) | Err(CodeError::Unreachable { .. }) => 0,
                    Err(e) => return Err(HarnessError::Code(e)),
                };
                worst = worst.min(supported);
                if worst == 0 {
                    break;
                }
            }
            // A strongly connected graph without self-loops always offers
            // the adversary a move, so `worst` is set.
            self.memo.insert(key, worst);
            Ok(worst)
        }
    }

    let mut search = Search {
        code,
        graph,
        memo: HashMap::new(),
        cap: state_cap,
    };
    let initial = code.initial_state();
    let start = code.decode(&initial)?;
    search.value(&initial, start)
}

/// Hard caps for the optimal-code oracle: beyond these the decode-map
/// enumeration is not worth running.
pub const ORACLE_MAX_STATES: usize = 64;
pub const ORACLE_MAX_ALPHABET: usize = 4;
/// Runtime guard on the `L^(q^n - 1)` decode maps actually enumerated.
pub const ORACLE_MAX_MAPS: u128 = 1 << 20;

/// The best worst-case rewrite count any code can achieve for `n` cells of
/// `q` levels over a complete `L`-vertex data graph, by exhaustive search
/// over all decode maps (all-zero state pinned to value 0). For each map
/// the encoder picks the best above-state, the adversary the worst next
/// value; both play perfectly.
pub fn optimal_game_value(n: usize, q: u32, alphabet: usize) -> Result<u64, HarnessError> {
    if n == 0 || q < 2 || alphabet < 2 {
        return Err(HarnessError::Code(CodeError::InvalidParams(format!(
            "need n >= 1, q >= 2, L >= 2, got n={n}, q={q}, L={alphabet}"
        ))));
    }
    let state_count = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if state_count > ORACLE_MAX_STATES as u128 {
        return Err(HarnessError::CapsExceeded(format!(
            "q^n = {state_count} states (cap {ORACLE_MAX_STATES})"
        )));
    }
    if alphabet > ORACLE_MAX_ALPHABET {
        return Err(HarnessError::CapsExceeded(format!(
            "L = {alphabet} (cap {ORACLE_MAX_ALPHABET})"
        )));
    }
    let states = state_count as usize;
    let map_count = (alphabet as u128)
        .checked_pow(states as u32 - 1)
        .unwrap_or(u128::MAX);
    if map_count > ORACLE_MAX_MAPS {
        return Err(HarnessError::CapsExceeded(format!(
            "L^(q^n - 1) = {map_count} decode maps (cap {ORACLE_MAX_MAPS})"
        )));
    }

    // Levels of state index s: mixed-radix digits base q.
    let levels = |s: usize| -> Vec<u32> {
        let mut digits = Vec::with_capacity(n);
        let mut rest = s;
        for _ in 0..n {
            digits.push((rest % q as usize) as u32);
            rest /= q as usize;
        }
        digits
    };
    // above[s]: bitmask of states componentwise >= s.
    let all_levels: Vec<Vec<u32>> = (0..states).map(levels).collect();
    let above: Vec<u64> = (0..states)
        .map(|s| {
            let mut mask = 0u64;
            for s2 in 0..states {
                if all_levels[s2]
                    .iter()
                    .zip(&all_levels[s])
                    .all(|(a, b)| a >= b)
                {
                    mask |= 1 << s2;
                }
            }
            mask
        })
        .collect();

    fn game(
        state: usize,
        current: usize,
        decode: &[usize],
        above: &[u64],
        alphabet: usize,
        memo: &mut [Vec<Option<u64>>],
    ) -> u64 {
        if let Some(v) = memo[state][current] {
            return v;
        }
        let mut worst = u64::MAX;
        for target in (0..alphabet).filter(|&t| t != current) {
            let mut best = 0u64; // no reachable encoding: this rewrite fails
            let mut candidates = above[state];
            while candidates != 0 {
                let s2 = candidates.trailing_zeros() as usize;
                candidates &= candidates - 1;
                if decode[s2] == target {
                    // s2 != state since their decodes differ; weight rises.
                    best = best.max(1 + game(s2, target, decode, above, alphabet, memo));
                }
            }
            worst = worst.min(best);
            if worst == 0 {
                break;
            }
        }
        memo[state][current] = Some(worst);
        worst
    }

    let mut best_overall = 0u64;
    let mut decode = vec![0usize; states];
    for map_id in 0..map_count {
        let mut rest = map_id;
        for slot in decode.iter_mut().skip(1) {
            *slot = (rest % alphabet as u128) as usize;
            rest /= alphabet as u128;
        }
        let mut memo = vec![vec![None; alphabet]; states];
        best_overall = best_overall.max(game(0, 0, &decode, &above, alphabet, &mut memo));
    }
    Ok(best_overall)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registers::ModularCode;

    #[test]
    fn modular_two_cells_two_levels() {
        let code = ModularCode::new(2, 2, 2).unwrap();
        let graph = DataGraph::complete(2).unwrap();
        assert_eq!(worst_case_t(&code, &graph, 10_000).unwrap(), 2);
    }

    #[test]
    fn worst_case_never_exceeds_trivial_ceiling() {
        for (n, q, alphabet) in [(4usize, 2u32, 4usize), (4, 3, 2), (6, 2, 3)] {
            let code = ModularCode::new(n, q, alphabet).unwrap();
            let graph = DataGraph::complete(alphabet).unwrap();
            let t = worst_case_t(&code, &graph, 1_000_000).unwrap();
            assert!(
                t <= (n as u64) * u64::from(q - 1),
                "n={n} q={q} L={alphabet}: t={t}"
            );
        }
    }

    #[test]
    fn state_cap_triggers() {
        let code = ModularCode::new(8, 4, 8).unwrap();
        let graph = DataGraph::complete(8).unwrap();
        assert!(matches!(
            worst_case_t(&code, &graph, 3),
            Err(HarnessError::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn oracle_tiny_cases() {
        // Two binary cells, binary alphabet: two rewrites are achievable
        // and no map does better.
        assert_eq!(optimal_game_value(2, 2, 2).unwrap(), 2);
        // One cell of q levels, L=2: alternate on the single cell.
        for q in 2..=8u32 {
            assert_eq!(optimal_game_value(1, q, 2).unwrap(), u64::from(q) - 1);
        }
    }

    #[test]
    fn oracle_respects_caps() {
        assert!(matches!(
            optimal_game_value(7, 2, 2),
            Err(HarnessError::CapsExceeded(_))
        ));
        assert!(matches!(
            optimal_game_value(2, 2, 5),
            Err(HarnessError::CapsExceeded(_))
        ));
        assert!(matches!(
            optimal_game_value(5, 2, 3),
            Err(HarnessError::CapsExceeded(_))
        ));
    }

    #[test]
    fn oracle_upper_bounded_by_capacity() {
        assert!(optimal_game_value(2, 3, 2).unwrap() <= 4);
        assert!(optimal_game_value(3, 2, 2).unwrap() <= 3);
    }
}
