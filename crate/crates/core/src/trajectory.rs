//! The trajectory code: an anchor register holding a full vertex, `d` edge
//! registers holding local edge labels, and a block of counter cells raised
//! once per write so the decoder knows its position in the anchor/edge
//! cycle.
//!
//! Registers are smaller rewriting codes over complete alphabets: the
//! anchor stores a symbol from `{0..L-1}`, each edge register a label from
//! `{0..max_out_degree-1}`. Register `i` is written exactly once per `d+1`
//! consecutive writes. The initial anchor store of `v_0 = 0` counts as
//! write 1: it raises the first counter cell, and the fresh anchor already
//! decodes to 0 so no register cell moves.

use serde::Serialize;
use std::sync::Arc;

use crate::bounds::{self, Ratio};
use crate::cell::CellState;
use crate::code::{check_update_args, CodeError, RewritingCode, WriteNote};
use crate::graph::DataGraph;
use crate::registers::{ModularCode, SplitCode};

/// Which construction the layout planner picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LayoutMode {
    /// Complete data graph: `d = 0`, the anchor takes the whole budget.
    Complete,
    /// Out-degree below the threshold: modular edge registers.
    SmallDelta,
    /// Out-degree above the threshold: split edge registers.
    LargeDelta,
}

/// A register's sub-code. `Unit` handles a degenerate one-symbol alphabet
/// (out-degree 1 graphs): nothing needs storing.
#[derive(Debug, Clone)]
pub enum RegisterCode {
    Modular(ModularCode),
    Split(SplitCode),
    Unit,
}

impl RegisterCode {
    /// Picks the sub-code for `alphabet` symbols in `cells` cells: modular
    /// when the alphabet fits (unless `prefer_split`), split otherwise.
    fn for_alphabet(
        cells: usize,
        q: u32,
        alphabet: usize,
        prefer_split: bool,
    ) -> Result<Self, CodeError> {
        if alphabet <= 1 {
            return Ok(RegisterCode::Unit);
        }
        if !prefer_split && alphabet <= cells {
            return Ok(RegisterCode::Modular(ModularCode::new(cells, q, alphabet)?));
        }
        Ok(RegisterCode::Split(SplitCode::new(cells, q, alphabet)?))
    }

    fn kind(&self) -> &'static str {
        match self {
            RegisterCode::Modular(_) => "modular",
            RegisterCode::Split(_) => "split",
            RegisterCode::Unit => "unit",
        }
    }

    fn decode(&self, levels: &[u32], q: u32) -> Result<usize, CodeError> {
        match self {
            RegisterCode::Unit => Ok(0),
            RegisterCode::Modular(code) => {
                code.decode(&CellState::from_levels(levels.to_vec(), q)?)
            }
            RegisterCode::Split(code) => code.decode(&CellState::from_levels(levels.to_vec(), q)?),
        }
    }

    /// Stores `symbol`, leaving the register untouched when it already
    /// decodes to it.
    fn store(&self, levels: &[u32], q: u32, symbol: usize) -> Result<Vec<u32>, CodeError> {
        match self {
            RegisterCode::Unit => {
                if symbol == 0 {
                    Ok(levels.to_vec())
                } else {
                    Err(CodeError::ValueOutOfRange {
                        value: symbol,
                        alphabet: 1,
                    })
                }
            }
            RegisterCode::Modular(code) => store_via(code, levels, q, symbol),
            RegisterCode::Split(code) => store_via(code, levels, q, symbol),
        }
    }

    /// Worst-case writes this register supports: the modular per-group
    /// guarantee, or its per-digit-group form for a split register. `None`
    /// for the unit register (it never exhausts).
    fn guarantee(&self, q: u32) -> Option<Ratio> {
        match self {
            RegisterCode::Unit => None,
            RegisterCode::Modular(code) => Some(
                bounds::lb_modular(code.cell_budget() as u64, q, code.alphabet() as u64)
                    .per_group_form,
            ),
            RegisterCode::Split(code) => {
                let m = code.group_size() as i64;
                Some(Ratio::new((m + 4) * (i64::from(q) - 1), 4))
            }
        }
    }
}

fn store_via(
    code: &(impl RewritingCode + ?Sized),
    levels: &[u32],
    q: u32,
    symbol: usize,
) -> Result<Vec<u32>, CodeError> {
    let state = CellState::from_levels(levels.to_vec(), q)?;
    if code.decode(&state)? == symbol {
        return Ok(levels.to_vec());
    }
    Ok(code.update(&state, symbol)?.levels().to_vec())
}

/// The planned shape of a trajectory code.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryLayout {
    pub mode: LayoutMode,
    /// Edge-register count; 0 iff the data graph is complete.
    pub d: usize,
    pub anchor_cells: usize,
    pub edge_cells: usize,
    pub counter_cells: usize,
    pub t_target: u64,
    pub anchor_kind: &'static str,
    pub edge_kind: &'static str,
    /// True when `L <= 2^(n/16)`, the regime carrying a guarantee.
    pub regime_ok: bool,
    /// The composite worst-case guarantee `(d+1) * min` over register
    /// guarantees, floored; `None` outside any meaningful regime.
    pub guarantee_floor: Option<i64>,
}

/// The trajectory code over an arbitrary data graph.
pub struct TrajectoryCode {
    graph: Arc<DataGraph>,
    layout: TrajectoryLayout,
    anchor: RegisterCode,
    edge: RegisterCode,
    n: usize,
    q: u32,
}

impl TrajectoryCode {
    /// Plans register sizes and sub-codes for `n` cells of `q` levels over
    /// `graph`, with `ceil(t_target/q)` extra counter cells.
    ///
    /// Complete graphs get `d = 0`. Otherwise `d` follows the construction
    /// picked by the out-degree threshold, clamped to at least 1 (a
    /// non-complete graph needs an edge register) and to at most `n/2` so
    /// every register keeps a cell.
    pub fn plan(n: usize, q: u32, graph: Arc<DataGraph>, t_target: u64) -> Result<Self, CodeError> {
        if n == 0 || q < 2 {
            return Err(CodeError::InvalidParams(format!(
                "need n >= 1, q >= 2, got n={n}, q={q}"
            )));
        }
        if t_target == 0 {
            return Err(CodeError::InvalidParams("t_target must be >= 1".into()));
        }
        let alphabet = graph.vertex_count();
        let delta = graph.max_out_degree();
        let log_l = (alphabet as f64).log2();

        let (mode, d) = if graph.is_complete() {
            (LayoutMode::Complete, 0usize)
        } else if (delta as u64) <= bounds::delta_threshold(n as u64, alphabet as u64) {
            let d = (log_l / bounds::guarded_log2(n as f64 / log_l)).floor() as usize;
            (LayoutMode::SmallDelta, d.clamp(1, (n / 2).max(1)))
        } else {
            let d = (log_l / bounds::guarded_log2(delta as f64)).floor() as usize;
            (LayoutMode::LargeDelta, d.clamp(1, (n / 2).max(1)))
        };

        let (anchor_cells, edge_cells) = if d == 0 { (n, 0) } else { (n / 2, n / (2 * d)) };
        if anchor_cells == 0 || (d > 0 && edge_cells == 0) {
            return Err(CodeError::InfeasibleLayout(format!(
                "n={n} leaves empty registers for d={d}"
            )));
        }
        let anchor = RegisterCode::for_alphabet(anchor_cells, q, alphabet, false)
            .map_err(|e| CodeError::InfeasibleLayout(format!("anchor: {e}")))?;
        let edge = if d == 0 {
            RegisterCode::Unit
        } else {
            RegisterCode::for_alphabet(edge_cells, q, delta, matches!(mode, LayoutMode::LargeDelta))
                .map_err(|e| CodeError::InfeasibleLayout(format!("edge register: {e}")))?
        };

        let counter_cells = t_target.div_ceil(u64::from(q)) as usize;
        let guarantee = {
            let mut bound: Option<Ratio> = anchor.guarantee(q);
            if d > 0 {
                bound = match (bound, edge.guarantee(q)) {
                    (Some(a), Some(e)) => Some(a.min(e)),
                    (one, None) | (None, one) => one,
                };
            }
            bound.map(|r| r.scale(d as i64 + 1).floor())
        };
        let layout = TrajectoryLayout {
            mode,
            d,
            anchor_cells,
            edge_cells,
            counter_cells,
            t_target,
            anchor_kind: anchor.kind(),
            edge_kind: edge.kind(),
            regime_ok: bounds::in_split_regime(n as u64, alphabet as u64),
            guarantee_floor: guarantee,
        };
        Ok(TrajectoryCode {
            graph,
            layout,
            anchor,
            edge,
            n,
            q,
        })
    }

    pub fn layout(&self) -> &TrajectoryLayout {
        &self.layout
    }

    pub fn graph(&self) -> &Arc<DataGraph> {
        &self.graph
    }

    /// Composite worst-case guarantee, exact rational form.
    pub fn guarantee(&self) -> Option<Ratio> {
        let mut bound = self.anchor.guarantee(self.q);
        if self.layout.d > 0 {
            bound = match (bound, self.edge.guarantee(self.q)) {
                (Some(a), Some(e)) => Some(a.min(e)),
                (one, None) | (None, one) => one,
            };
        }
        bound.map(|r| r.scale(self.layout.d as i64 + 1))
    }

    fn anchor_range(&self) -> std::ops::Range<usize> {
        0..self.layout.anchor_cells
    }

    fn edge_range(&self, register: usize) -> std::ops::Range<usize> {
        debug_assert!(register >= 1 && register <= self.layout.d);
        let start = self.layout.anchor_cells + (register - 1) * self.layout.edge_cells;
        start..start + self.layout.edge_cells
    }

    fn counter_range(&self) -> std::ops::Range<usize> {
        self.n..self.n + self.layout.counter_cells
    }

    /// Total writes so far: the sum of counter-cell levels.
    pub fn counter_read(&self, s: &CellState) -> u64 {
        self.counter_range().map(|j| u64::from(s.level(j))).sum()
    }

    pub fn counter_capacity(&self) -> u64 {
        self.layout.counter_cells as u64 * u64::from(self.q - 1)
    }

    fn raise_counter(&self, levels: &mut [u32]) -> Result<(), CodeError> {
        for j in self.counter_range() {
            if levels[j] < self.q - 1 {
                levels[j] += 1;
                return Ok(());
            }
        }
        Err(CodeError::Exhausted {
            detail: "write counter full".into(),
        })
    }
}

impl RewritingCode for TrajectoryCode {
    fn spec_string(&self) -> String {
        "trajectory".into()
    }

    fn state_cells(&self) -> usize {
        self.n + self.layout.counter_cells
    }

    fn cell_budget(&self) -> usize {
        self.n
    }

    fn q(&self) -> u32 {
        self.q
    }

    fn alphabet(&self) -> usize {
        self.graph.vertex_count()
    }

    fn initial_state(&self) -> CellState {
        // Write 1: the anchor stores v_0 = 0 (a fresh anchor already decodes
        // to 0, so only the counter moves).
        let mut levels = vec![0u32; self.state_cells()];
        self.raise_counter(&mut levels).expect("counter_cells >= 1");
        CellState::from_levels(levels, self.q).expect("valid shape")
    }

    fn decode(&self, s: &CellState) -> Result<usize, CodeError> {
        if s.n() != self.state_cells() {
            return Err(CodeError::StateMismatch {
                expected_cells: self.state_cells(),
                got: s.n(),
            });
        }
        let writes = self.counter_read(s);
        if writes == 0 {
            return Ok(0);
        }
        let steps = ((writes - 1) % (self.layout.d as u64 + 1)) as usize;
        let mut v = self
            .anchor
            .decode(&s.levels()[self.anchor_range()], self.q)?;
        for register in 1..=steps {
            let label = self
                .edge
                .decode(&s.levels()[self.edge_range(register)], self.q)?;
            v = self.graph.follow(v, label)?;
        }
        Ok(v)
    }

    fn update(&self, s: &CellState, v: usize) -> Result<CellState, CodeError> {
        let current = check_update_args(self, s, v)?;
        if !self.graph.has_edge(current, v) {
            return Err(CodeError::NotAnEdge {
                from: current,
                to: v,
            });
        }
        let writes = self.counter_read(s);
        if writes >= self.counter_capacity() {
            return Err(CodeError::Exhausted {
                detail: "write counter full".into(),
            });
        }
        let write_index = writes + 1;
        let register = ((write_index - 1) % (self.layout.d as u64 + 1)) as usize;

        let mut levels = s.levels().to_vec();
        if register == 0 {
            let range = self.anchor_range();
            let stored = self.anchor.store(&levels[range.clone()], self.q, v)?;
            levels[range].copy_from_slice(&stored);
        } else {
            let label = self.graph.edge_label(current, v)?;
            let range = self.edge_range(register);
            let stored = self.edge.store(&levels[range.clone()], self.q, label)?;
            levels[range].copy_from_slice(&stored);
        }
        self.raise_counter(&mut levels)?;
        Ok(CellState::from_levels(levels, self.q)?)
    }

    fn write_annotation(&self, s: &CellState, v: usize) -> Option<WriteNote> {
        let current = self.decode(s).ok()?;
        let write_index = self.counter_read(s) + 1;
        let register = ((write_index - 1) % (self.layout.d as u64 + 1)) as usize;
        let symbol = if register == 0 {
            v
        } else {
            self.graph.edge_label(current, v).ok()?
        };
        Some(WriteNote {
            write_index,
            register,
            symbol,
        })
    }

    fn guarantee_floor(&self) -> Option<i64> {
        self.layout.guarantee_floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::CodeError;

    fn plan(n: usize, q: u32, graph: DataGraph, t_target: u64) -> TrajectoryCode {
        TrajectoryCode::plan(n, q, Arc::new(graph), t_target).unwrap()
    }

    #[test]
    fn layout_hypercube_picks_small_delta_d1() {
        // L=16, delta=4: threshold floor(64*4/8) = 32 >= 4, d = floor(4/4).
        let code = plan(64, 8, DataGraph::hypercube(4, 2).unwrap(), 448);
        let layout = code.layout();
        assert_eq!(layout.mode, LayoutMode::SmallDelta);
        assert_eq!(layout.d, 1);
        assert_eq!(layout.anchor_cells, 32);
        assert_eq!(layout.edge_cells, 32);
        assert_eq!(layout.anchor_kind, "modular");
        assert_eq!(layout.edge_kind, "modular");
        assert_eq!(layout.counter_cells, 56);
        // Composite guarantee: 2 * min(70, 112).
        assert_eq!(code.guarantee().unwrap(), Ratio::from_int(140));
        assert_eq!(layout.guarantee_floor, Some(140));
    }

    #[test]
    fn layout_complete_graph_is_anchor_only() {
        let code = plan(16, 4, DataGraph::complete(56).unwrap(), 48);
        assert_eq!(code.layout().mode, LayoutMode::Complete);
        assert_eq!(code.layout().d, 0);
        assert_eq!(code.layout().anchor_cells, 16);
        assert_eq!(code.layout().anchor_kind, "split");
    }

    #[test]
    fn layout_large_delta_uses_split_edges() {
        // Tree with delta 5 over L=16 vertices: the threshold for n=16 is
        // floor(16 * log2(16/4) / 8) = 4, so delta exceeds it.
        let graph = DataGraph::bidirected_tree(5, 16).unwrap();
        assert_eq!(graph.max_out_degree(), 5);
        let code = plan(16, 8, graph, 112);
        assert_eq!(code.layout().mode, LayoutMode::LargeDelta);
        assert_eq!(code.layout().d, 1);
        assert_eq!(code.layout().anchor_kind, "split");
        assert_eq!(code.layout().edge_kind, "split");
    }

    #[test]
    fn initial_state_counts_as_write_one() {
        let code = plan(64, 8, DataGraph::hypercube(4, 2).unwrap(), 448);
        let s = code.initial_state();
        assert_eq!(code.counter_read(&s), 1);
        assert_eq!(code.decode(&s).unwrap(), 0);
        // No register cell moved.
        assert_eq!(s.levels()[..64].iter().sum::<u32>(), 0);
    }

    #[test]
    fn writes_alternate_anchor_and_edge_register() {
        let graph = Arc::new(DataGraph::hypercube(4, 2).unwrap());
        let code = TrajectoryCode::plan(64, 8, Arc::clone(&graph), 448).unwrap();
        let s1 = code.initial_state();

        // Write 2 lands in register 1 as the label of edge (0, 2).
        let note = code.write_annotation(&s1, 2).unwrap();
        assert_eq!((note.write_index, note.register), (2, 1));
        assert_eq!(note.symbol, graph.edge_label(0, 2).unwrap());
        assert_eq!(note.symbol, 1);
        let s2 = code.update(&s1, 2).unwrap();
        assert_eq!(code.decode(&s2).unwrap(), 2);
        assert_eq!(code.counter_read(&s2), 2);
        // Anchor untouched, register 1 moved.
        assert_eq!(s2.levels()[..32], s1.levels()[..32]);
        assert!(s2.levels()[32..64] != s1.levels()[32..64]);

        // Write 3 lands back in the anchor.
        let note = code.write_annotation(&s2, 3).unwrap();
        assert_eq!((note.write_index, note.register, note.symbol), (3, 0, 3));
        let s3 = code.update(&s2, 3).unwrap();
        assert_eq!(code.decode(&s3).unwrap(), 3);
        assert!(s3.is_above(&s2).unwrap());

        // Storing an edge label the register already holds (label 0 into a
        // fresh register) only moves the counter.
        let fresh = code.initial_state();
        let s = code.update(&fresh, 1).unwrap(); // edge (0,1) has label 0
        assert_eq!(code.decode(&s).unwrap(), 1);
        assert_eq!(s.levels()[..64], fresh.levels()[..64]);
        assert_eq!(code.counter_read(&s), 2);
    }

    #[test]
    fn update_rejects_non_edges() {
        let code = plan(64, 8, DataGraph::hypercube(4, 2).unwrap(), 448);
        let s = code.initial_state();
        // 0 -> 3 flips two coordinates.
        assert!(matches!(
            code.update(&s, 3),
            Err(CodeError::NotAnEdge { .. })
        ));
    }

    #[test]
    fn complete_graph_trajectory_behaves_like_anchor() {
        let code = plan(8, 4, DataGraph::complete(8).unwrap(), 24);
        let mut s = code.initial_state();
        for (i, v) in [5usize, 2, 7, 1].iter().enumerate() {
            s = code.update(&s, *v).unwrap();
            assert_eq!(code.decode(&s).unwrap(), *v);
            assert_eq!(code.counter_read(&s), i as u64 + 2);
        }
    }

    #[test]
    fn counter_exhaustion_stops_updates() {
        // Tiny counter: t_target 4 with q=4 gives one counter cell, capacity 3.
        let code = plan(8, 4, DataGraph::complete(8).unwrap(), 4);
        assert_eq!(code.counter_capacity(), 3);
        let mut s = code.initial_state();
        let mut v = 0;
        let mut writes = 1;
        loop {
            let next = (v + 1) % 8;
            match code.update(&s, next) {
                Ok(s2) => {
                    s = s2;
                    v = next;
                    writes += 1;
                }
                Err(CodeError::Exhausted { detail }) => {
                    assert!(detail.contains("counter"), "{detail}");
                    break;
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert_eq!(writes, 3);
        assert_eq!(code.counter_read(&s), 3);
    }

    #[test]
    fn register_cadence_with_two_edge_registers() {
        // L=256, delta=8, n=64, q=8 plans d=2. Each write may only touch
        // its scheduled register (write w goes to register (w-1) mod 3)
        // plus one counter cell.
        let graph = Arc::new(DataGraph::hypercube(8, 2).unwrap());
        let code = TrajectoryCode::plan(64, 8, Arc::clone(&graph), 448).unwrap();
        let layout = code.layout();
        assert_eq!(layout.d, 2);
        assert_eq!((layout.anchor_cells, layout.edge_cells), (32, 16));
        let regions = [0..32usize, 32..48, 48..64];

        let mut rng = crate::harness::rng::SplitMix64::new(23);
        let mut s = code.initial_state();
        let mut v = 0usize;
        for write in 2u64..=60 {
            let next = graph.follow(v, rng.gen_range(graph.out_degree(v))).unwrap();
            let s2 = match code.update(&s, next) {
                Ok(s2) => s2,
                Err(CodeError::Exhausted { .. }) => break,
                Err(e) => panic!("unexpected {e}"),
            };
            let scheduled = ((write - 1) % 3) as usize;
            for (r, range) in regions.iter().enumerate() {
                if r != scheduled {
                    assert_eq!(
                        s.levels()[range.clone()],
                        s2.levels()[range.clone()],
                        "write {write} touched register {r} (scheduled {scheduled})"
                    );
                }
            }
            assert_eq!(code.counter_read(&s2), code.counter_read(&s) + 1);
            assert_eq!(code.decode(&s2).unwrap(), next);
            s = s2;
            v = next;
        }
    }

    #[test]
    fn random_walk_round_trip_on_three_graph_families() {
        use crate::harness::rng::SplitMix64;
        for graph in [
            DataGraph::hypercube(3, 2).unwrap(),
            DataGraph::debruijn(3, 2).unwrap(),
            DataGraph::bidirected_tree(3, 7).unwrap(),
        ] {
            let spec = graph.spec().to_string();
            let graph = Arc::new(graph);
            let code = TrajectoryCode::plan(48, 8, Arc::clone(&graph), 320).unwrap();
            let mut rng = SplitMix64::new(17);
            let mut s = code.initial_state();
            let mut v = 0usize;
            let mut supported = 0u64;
            loop {
                let next = graph.follow(v, rng.gen_range(graph.out_degree(v))).unwrap();
                match code.update(&s, next) {
                    Ok(s2) => {
                        assert!(s2.is_above(&s).unwrap(), "{spec}");
                        assert_eq!(code.decode(&s2).unwrap(), next, "{spec}");
                        s = s2;
                        v = next;
                        supported += 1;
                    }
                    Err(CodeError::Exhausted { .. }) => break,
                    Err(e) => panic!("{spec}: unexpected {e}"),
                }
            }
            assert!(supported > 0, "{spec}");
        }
    }
}
