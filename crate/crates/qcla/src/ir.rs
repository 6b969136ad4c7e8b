//! Circuit intermediate representation.
//!
//! A [`Circuit`] is a flat list of [`Block`]s over a fixed set of wires. A
//! block is either a primitive gate (`X`, `H`, `S`, `T`, `CNOT`, ...) or a
//! block-level Toffoli carrying a decomposition [`Variant`] tag. Synthesis
//! produces block-level circuits; lowering replaces each Toffoli block with
//! its template and leaves a primitive-only circuit behind.
//!
//! Wires are indexed little-endian: bit `i` of a register value lives on the
//! register's `i`-th wire. Every block records the [`RoundLabel`] and
//! [`Segment`] it was synthesized under so that per-round resource reports
//! and strategy-driven variant assignment can key on them later.

use std::collections::HashMap;
use std::fmt;

use petgraph::graph::{DiGraph, NodeIndex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a wire within a circuit.
pub type WireId = usize;

/// What a wire is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    /// The single control qubit of the controlled modular adder.
    Ctrl,
    /// Constant-addend register (holds the embedded classical constant).
    D,
    /// Target register (accumulates the sum).
    B,
    /// Carry register; wire `i` of this register holds carry `c_{i+1}`.
    Carry,
    /// Propagate-function workspace for spans wider than two bits.
    Pfunc,
    /// Comparator result qubit.
    Comp,
    /// Ancilla appended during lowering.
    Ancilla,
}

/// Primitive or block-level gate kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum BlockKind {
    /// Pauli X.
    X,
    /// Hadamard.
    H,
    /// Phase gate S.
    S,
    /// Inverse phase gate.
    Sdg,
    /// T gate.
    T,
    /// Inverse T gate.
    Tdg,
    /// Pauli Z.
    Z,
    /// Controlled NOT; wires are `[control, target]`.
    Cnot,
    /// Controlled Z; wires are `[a, b]` (symmetric).
    Cz,
    /// Destructive X-basis measurement used for measurement-assisted
    /// uncomputation. The wire is consumed (reset to zero) and the outcome
    /// is stored in classical bit `meas_bit`.
    MeasureX,
    /// Block-level Toffoli with a decomposition variant; wires are
    /// `[control, control, target]`.
    Toffoli,
}

impl BlockKind {
    fn arity(self) -> usize {
        match self {
            BlockKind::X
            | BlockKind::H
            | BlockKind::S
            | BlockKind::Sdg
            | BlockKind::T
            | BlockKind::Tdg
            | BlockKind::Z
            | BlockKind::MeasureX => 1,
            BlockKind::Cnot | BlockKind::Cz => 2,
            BlockKind::Toffoli => 3,
        }
    }
}

/// Decomposition variant attached to a block-level Toffoli.
///
/// `St` is the textbook Clifford+T decomposition; the others are
/// relative-phase decompositions that are only correct up to basis-state
/// phases and therefore need a phase-safety argument at their use site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Standard 7 T-gate Clifford+T Toffoli.
    St,
    /// Gidney-style relative-phase Toffoli (4 T gates, T-depth 2).
    Grt,
    /// Inverse of [`Variant::Grt`].
    Igrt,
    /// First half of a measurement-ready pair: a `Grt` computing onto a
    /// dedicated ancilla.
    PgrtFirst,
    /// Second half of a measurement-ready pair: copy-out plus `Igrt` on the
    /// ancilla; wires are `[control, control, target, ancilla]`.
    PgrtSecond,
    /// 3-CNOT relative-phase Toffoli (Maslov RTOF3).
    Rt3,
    /// Inverse of [`Variant::Rt3`] (same matrix; kept distinct for
    /// reporting).
    Irt3,
    /// 4-CNOT relative-phase Toffoli (Maslov RTOF4).
    Rt4,
    /// Inverse of [`Variant::Rt4`].
    Irt4,
    /// Plain Toffoli with no decomposition commitment yet; lowers as `St`.
    Plain,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::St => "st",
            Variant::Grt => "grt",
            Variant::Igrt => "igrt",
            Variant::PgrtFirst => "pgrt-first",
            Variant::PgrtSecond => "pgrt-second",
            Variant::Rt3 => "rt3",
            Variant::Irt3 => "irt3",
            Variant::Rt4 => "rt4",
            Variant::Irt4 => "irt4",
            Variant::Plain => "plain",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "st" => Variant::St,
            "grt" => Variant::Grt,
            "igrt" => Variant::Igrt,
            "pgrt-first" => Variant::PgrtFirst,
            "pgrt-second" => Variant::PgrtSecond,
            "rt3" => Variant::Rt3,
            "irt3" => Variant::Irt3,
            "rt4" => Variant::Rt4,
            "irt4" => Variant::Irt4,
            "plain" => Variant::Plain,
            other => return Err(format!("unknown variant `{other}`")),
        })
    }
}

/// Synthesis round a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RoundLabel {
    /// Carry/propagate initialization of the adder or comparator.
    Init,
    /// Propagate rounds of the lookahead tree.
    P,
    /// Generate rounds of the lookahead tree.
    G,
    /// Carry rounds of the lookahead tree.
    C,
    /// Uncomputation of the propagate rounds.
    InvP,
    /// Uncomputation of the generate rounds.
    InvG,
    /// Uncomputation of the carry rounds.
    InvC,
    /// Uncomputation of the initialization round.
    InvInit,
    /// Pre-erase bit flips that re-express the sum for carry erasure.
    Pe,
    /// Undo of the pre-erase bit flips.
    InvPe,
    /// Final sum formation from carries.
    CalcSum,
    /// Embedding of a classical constant into a register under control.
    Embed,
    /// Reset (un-embedding) of a previously embedded constant.
    Reset,
    /// Comparator hook between the forward and inverse halves.
    Middle,
}

impl fmt::Display for RoundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RoundLabel::Init => "INIT",
            RoundLabel::P => "P",
            RoundLabel::G => "G",
            RoundLabel::C => "C",
            RoundLabel::InvP => "INV_P",
            RoundLabel::InvG => "INV_G",
            RoundLabel::InvC => "INV_C",
            RoundLabel::InvInit => "INV_INIT",
            RoundLabel::Pe => "PE",
            RoundLabel::InvPe => "INV_PE",
            RoundLabel::CalcSum => "CALC_SUM",
            RoundLabel::Embed => "EMBED",
            RoundLabel::Reset => "RESET",
            RoundLabel::Middle => "MIDDLE",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RoundLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "INIT" => RoundLabel::Init,
            "P" => RoundLabel::P,
            "G" => RoundLabel::G,
            "C" => RoundLabel::C,
            "INV_P" => RoundLabel::InvP,
            "INV_G" => RoundLabel::InvG,
            "INV_C" => RoundLabel::InvC,
            "INV_INIT" => RoundLabel::InvInit,
            "PE" => RoundLabel::Pe,
            "INV_PE" => RoundLabel::InvPe,
            "CALC_SUM" => RoundLabel::CalcSum,
            "EMBED" => RoundLabel::Embed,
            "RESET" => RoundLabel::Reset,
            "MIDDLE" => RoundLabel::Middle,
            other => return Err(format!("unknown round label `{other}`")),
        })
    }
}

/// Top-level section of the controlled modular adder a block belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Segment {
    /// Leading controlled comparator (computes the comparison flag).
    CompFirst,
    /// Trailing controlled comparator (clears the comparison flag).
    CompLast,
    /// The doubly-controlled adder in the middle, including its constant
    /// embedding and reset.
    Adder,
    /// The carry-erasing second pass of an adder.
    EraseCarry,
}

impl Segment {
    /// Coarse grouping used by strategy tables: comparator rounds and adder
    /// rounds get different variant assignments.
    pub fn group(self) -> SegGroup {
        match self {
            Segment::CompFirst | Segment::CompLast => SegGroup::Comparator,
            Segment::Adder | Segment::EraseCarry => SegGroup::Adder,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Segment::CompFirst => "CMP1",
            Segment::CompLast => "CMP2",
            Segment::Adder => "ADD",
            Segment::EraseCarry => "ERASE",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Segment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "CMP1" => Segment::CompFirst,
            "CMP2" => Segment::CompLast,
            "ADD" => Segment::Adder,
            "ERASE" => Segment::EraseCarry,
            other => return Err(format!("unknown segment `{other}`")),
        })
    }
}

/// Coarse strategy-table grouping of segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegGroup {
    /// Either of the two controlled comparators.
    Comparator,
    /// The doubly-controlled adder (including carry erasure).
    Adder,
}

/// One gate or Toffoli block in a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    /// Gate kind.
    pub kind: BlockKind,
    /// Decomposition variant; present exactly when `kind` is `Toffoli`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variant: Option<Variant>,
    /// Wires acted on; controls precede targets.
    pub wires: Vec<WireId>,
    /// Synthesis round.
    pub round: RoundLabel,
    /// Synthesis segment.
    pub seg: Segment,
    /// Classical bit written by a `MeasureX` block.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub meas_bit: Option<usize>,
    /// Classical bit conditioning this block (the block is applied only when
    /// the bit is 1).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cond_bit: Option<usize>,
}

impl Block {
    /// New unconditional block with arity checking in debug builds.
    pub fn new(kind: BlockKind, wires: Vec<WireId>, round: RoundLabel, seg: Segment) -> Self {
        debug_assert_eq!(wires.len(), kind.arity(), "wrong arity for {kind:?}");
        debug_assert!(distinct(&wires), "duplicate wire in {kind:?} {wires:?}");
        Block {
            kind,
            variant: None,
            wires,
            round,
            seg,
            meas_bit: None,
            cond_bit: None,
        }
    }

    /// Block-level Toffoli with an explicit variant. `PgrtSecond` carries a
    /// fourth wire (the copy target); all other variants take 3.
    pub fn toffoli_variant(
        variant: Variant,
        wires: Vec<WireId>,
        round: RoundLabel,
        seg: Segment,
    ) -> Self {
        let want = if variant == Variant::PgrtSecond { 4 } else { 3 };
        debug_assert_eq!(wires.len(), want, "wrong arity for {variant:?}");
        debug_assert!(distinct(&wires), "duplicate wire in {variant:?} {wires:?}");
        Block {
            kind: BlockKind::Toffoli,
            variant: Some(variant),
            wires,
            round,
            seg,
            meas_bit: None,
            cond_bit: None,
        }
    }
}

fn distinct(wires: &[WireId]) -> bool {
    wires
        .iter()
        .enumerate()
        .all(|(i, w)| wires[i + 1..].iter().all(|v| v != w))
}

/// Logical register layout of a synthesized circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registers {
    /// Control wire.
    pub ctrl: WireId,
    /// Constant register, little-endian.
    pub d: Vec<WireId>,
    /// Target register, little-endian.
    pub b: Vec<WireId>,
    /// Carry register; entry `i` holds carry `c_{i+1}`.
    pub carry: Vec<WireId>,
    /// Propagate workspace, little-endian by allocation order.
    pub pfunc: Vec<WireId>,
    /// Comparison flag wire.
    pub comp: WireId,
}

impl Registers {
    /// Wire holding carry `c_j` for `j >= 1`.
    pub fn carry_wire(&self, j: usize) -> WireId {
        assert!(j >= 1, "carries are indexed from 1");
        self.carry[j - 1]
    }
}

/// A quantum circuit: wires with roles, classical bits, and a block list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    /// Problem register width.
    pub n: usize,
    /// Role of each wire; `roles.len()` is the wire count.
    pub roles: Vec<Role>,
    /// Number of classical bits used by measurement blocks.
    pub n_classical: usize,
    /// Logical register layout.
    pub regs: Registers,
    /// The gate sequence.
    pub blocks: Vec<Block>,
}

impl Circuit {
    /// Empty circuit over the canonical `4n + 2` register layout:
    /// control, constant `D`, target `B`, carries, propagate workspace, and
    /// the comparison flag, in that wire order.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroWidth);
        }
        let mut roles = Vec::with_capacity(4 * n + 2);
        roles.push(Role::Ctrl);
        let ctrl = 0;
        let d: Vec<WireId> = (0..n).map(|i| 1 + i).collect();
        roles.extend(std::iter::repeat_n(Role::D, n));
        let b: Vec<WireId> = (0..n).map(|i| 1 + n + i).collect();
        roles.extend(std::iter::repeat_n(Role::B, n));
        let carry: Vec<WireId> = (0..n).map(|i| 1 + 2 * n + i).collect();
        roles.extend(std::iter::repeat_n(Role::Carry, n));
        let pfunc: Vec<WireId> = (0..n).map(|i| 1 + 3 * n + i).collect();
        roles.extend(std::iter::repeat_n(Role::Pfunc, n));
        let comp = 1 + 4 * n;
        roles.push(Role::Comp);
        Ok(Circuit {
            n,
            roles,
            n_classical: 0,
            regs: Registers {
                ctrl,
                d,
                b,
                carry,
                pfunc,
                comp,
            },
            blocks: Vec::new(),
        })
    }

    /// Total wire count.
    pub fn width(&self) -> usize {
        self.roles.len()
    }

    /// Append a fresh ancilla wire and return its id.
    pub fn alloc_ancilla(&mut self) -> WireId {
        self.roles.push(Role::Ancilla);
        self.roles.len() - 1
    }

    /// Reserve a fresh classical bit and return its index.
    pub fn alloc_classical(&mut self) -> usize {
        self.n_classical += 1;
        self.n_classical - 1
    }

    /// Append a block.
    pub fn push(&mut self, block: Block) {
        debug_assert!(
            block.wires.iter().all(|&w| w < self.width()),
            "wire out of range"
        );
        self.blocks.push(block);
    }

    /// Append an X gate.
    pub fn x(&mut self, w: WireId, round: RoundLabel, seg: Segment) {
        self.push(Block::new(BlockKind::X, vec![w], round, seg));
    }

    /// Append a CNOT.
    pub fn cnot(&mut self, c: WireId, t: WireId, round: RoundLabel, seg: Segment) {
        self.push(Block::new(BlockKind::Cnot, vec![c, t], round, seg));
    }

    /// Append a block-level Toffoli with the given variant.
    pub fn toffoli(
        &mut self,
        c1: WireId,
        c2: WireId,
        t: WireId,
        variant: Variant,
        round: RoundLabel,
        seg: Segment,
    ) {
        let mut block = Block::new(BlockKind::Toffoli, vec![c1, c2, t], round, seg);
        block.variant = Some(variant);
        self.push(block);
    }

    /// Copy of this circuit with block `idx` removed. Useful for fault
    /// injection.
    pub fn without_block(&self, idx: usize) -> Circuit {
        let mut out = self.clone();
        out.blocks.remove(idx);
        out
    }

    /// True if any block is a block-level Toffoli.
    pub fn has_toffoli_blocks(&self) -> bool {
        self.blocks.iter().any(|b| b.kind == BlockKind::Toffoli)
    }

    /// Data-dependency DAG over blocks: an edge `u -> v` means `v` touches a
    /// wire (or classical bit) last touched by `u`.
    pub fn dependency_dag(&self) -> DiGraph<usize, ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<NodeIndex> = (0..self.blocks.len()).map(|i| g.add_node(i)).collect();
        let mut front: HashMap<WireId, usize> = HashMap::new();
        let mut cfront: HashMap<usize, usize> = HashMap::new();
        for (i, b) in self.blocks.iter().enumerate() {
            let mut preds: Vec<usize> = Vec::new();
            for &w in &b.wires {
                if let Some(&p) = front.get(&w) {
                    preds.push(p);
                }
                front.insert(w, i);
            }
            if let Some(cb) = b.cond_bit {
                if let Some(&p) = cfront.get(&cb) {
                    preds.push(p);
                }
            }
            if let Some(mb) = b.meas_bit {
                cfront.insert(mb, i);
            }
            preds.sort_unstable();
            preds.dedup();
            for p in preds {
                g.add_edge(nodes[p], nodes[i], ());
            }
        }
        g
    }
}

/// Depth/counting metric over blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Metric {
    /// Block-level Toffolis.
    Toffoli,
    /// T and T-dagger gates.
    T,
    /// CNOT gates (CZ excluded).
    Cnot,
    /// Every block counts.
    Total,
}

fn metric_weight(metric: Metric, block: &Block) -> usize {
    let hit = match metric {
        Metric::Toffoli => block.kind == BlockKind::Toffoli,
        Metric::T => matches!(block.kind, BlockKind::T | BlockKind::Tdg),
        Metric::Cnot => block.kind == BlockKind::Cnot,
        Metric::Total => true,
    };
    usize::from(hit)
}

/// Number of blocks matched by `metric`.
pub fn count_matching(circuit: &Circuit, metric: Metric) -> usize {
    circuit
        .blocks
        .iter()
        .map(|b| metric_weight(metric, b))
        .sum()
}

/// Maximum-weight path length through the dependency structure, where a
/// block weighs 1 if it matches `metric` and 0 otherwise.
///
/// Dependencies are wire overlaps plus measurement-to-conditioned-gate
/// edges. `T` and `Cnot` depths are only defined on primitive circuits; a
/// circuit that still contains Toffoli blocks is rejected for those metrics
/// because the blocks hide an unknown number of primitive layers.
pub fn metric_depth(circuit: &Circuit, metric: Metric) -> Result<usize> {
    if matches!(metric, Metric::T | Metric::Cnot) && circuit.has_toffoli_blocks() {
        return Err(Error::BlockLevelDepth { metric });
    }
    let mut front: HashMap<WireId, usize> = HashMap::new();
    let mut cfront: HashMap<usize, usize> = HashMap::new();
    let mut best = 0usize;
    for block in &circuit.blocks {
        let mut depth_in = 0usize;
        for &w in &block.wires {
            depth_in = depth_in.max(front.get(&w).copied().unwrap_or(0));
        }
        if let Some(cb) = block.cond_bit {
            depth_in = depth_in.max(cfront.get(&cb).copied().unwrap_or(0));
        }
        let depth_out = depth_in + metric_weight(metric, block);
        for &w in &block.wires {
            front.insert(w, depth_out);
        }
        if let Some(mb) = block.meas_bit {
            cfront.insert(mb, depth_out);
        }
        best = best.max(depth_out);
    }
    Ok(best)
}

/// Primitive gate totals for a lowered circuit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GateCounts {
    /// Block-level Toffolis still present (zero after lowering).
    pub toffoli: usize,
    /// T plus T-dagger.
    pub t: usize,
    /// CNOT gates.
    pub cnot: usize,
    /// CZ gates (classically conditioned ones included).
    pub cz: usize,
    /// Hadamard gates.
    pub h: usize,
    /// S plus S-dagger.
    pub s: usize,
    /// X gates.
    pub x: usize,
    /// Z gates.
    pub z: usize,
    /// X-basis measurements.
    pub measurement: usize,
}

impl GateCounts {
    /// Tally every block of `circuit`.
    pub fn of(circuit: &Circuit) -> Self {
        let mut c = GateCounts::default();
        for b in &circuit.blocks {
            match b.kind {
                BlockKind::Toffoli => c.toffoli += 1,
                BlockKind::T | BlockKind::Tdg => c.t += 1,
                BlockKind::Cnot => c.cnot += 1,
                BlockKind::Cz => c.cz += 1,
                BlockKind::H => c.h += 1,
                BlockKind::S | BlockKind::Sdg => c.s += 1,
                BlockKind::X => c.x += 1,
                BlockKind::Z => c.z += 1,
                BlockKind::MeasureX => c.measurement += 1,
            }
        }
        c
    }

    /// CNOT-equivalent two-qubit count: CNOT plus CZ. Headline
    /// two-qubit-cost figures use this; the CNOT depth metric does not.
    pub fn cnot_like(&self) -> usize {
        self.cnot + self.cz
    }
}
