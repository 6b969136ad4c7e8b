//! Decomposition strategies: which Toffoli variant realizes each round.
//!
//! A strategy maps every Toffoli site of a synthesized circuit, keyed by
//! its section (comparator or adder) and round label, to a decomposition:
//! an in-place variant, a paired decomposition onto a recycled ancilla, or
//! — inside comparators, where the constant register is idle — a compute
//! that parks its AND value on a constant-register wire until the mirrored
//! inverse round collects it.
//!
//! Lowering has two observable levels:
//!
//! * [`lower_blocks`] keeps Toffoli variants as single blocks (inlining
//!   only measurement-assisted uncomputation, which has no block form), so
//!   the result stays exactly simulable by the monomial engine; and
//! * [`lower`] additionally expands every variant into Clifford+T
//!   primitives for gate counting, depth metrics, and export.

use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use crate::decomp::{self, phase_safe, PhaseContext, UncomputeMode};
use crate::error::{Error, Result};
use crate::ir::{Block, BlockKind, Circuit, RoundLabel, SegGroup, Variant, WireId};

/// Named decomposition strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Strategy {
    /// Ripple-carry reference costs; a closed-form model with no circuit.
    #[serde(rename = "vanmeter-itoh-ref")]
    VanMeterItohRef,
    /// Textbook Toffolis everywhere.
    #[serde(rename = "draper-st")]
    DraperSt,
    /// Relative-phase propagate rounds, exact Toffolis elsewhere; no extra
    /// qubits.
    #[serde(rename = "thapliyal-qubit-opt")]
    ThapliyalQubitOpt,
    /// Paired decompositions on recycled ancillas for the carry rounds.
    #[serde(rename = "thapliyal-t-opt")]
    ThapliyalTOpt,
    /// Like the T-optimized table, plus comparator carries parked on the
    /// idle constant register.
    #[serde(rename = "ours-ftq")]
    OursFtq,
    /// Shallow relative-phase variants throughout; no measurements and no
    /// extra qubits.
    #[serde(rename = "ours-nisq")]
    OursNisq,
}

impl Strategy {
    /// Every strategy, in report order.
    pub const ALL: [Strategy; 6] = [
        Strategy::VanMeterItohRef,
        Strategy::DraperSt,
        Strategy::ThapliyalQubitOpt,
        Strategy::ThapliyalTOpt,
        Strategy::OursFtq,
        Strategy::OursNisq,
    ];

    /// Canonical kebab-case name.
    pub fn name(self) -> &'static str {
        match self {
            Strategy::VanMeterItohRef => "vanmeter-itoh-ref",
            Strategy::DraperSt => "draper-st",
            Strategy::ThapliyalQubitOpt => "thapliyal-qubit-opt",
            Strategy::ThapliyalTOpt => "thapliyal-t-opt",
            Strategy::OursFtq => "ours-ftq",
            Strategy::OursNisq => "ours-nisq",
        }
    }

    /// False for strategies that exist only as cost models.
    pub fn lowerable(self) -> bool {
        self != Strategy::VanMeterItohRef
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s {
            "vanmeter-itoh-ref" | "vmi" => Strategy::VanMeterItohRef,
            "draper-st" | "draper" => Strategy::DraperSt,
            "thapliyal-qubit-opt" | "qubit-opt" => Strategy::ThapliyalQubitOpt,
            "thapliyal-t-opt" | "t-opt" => Strategy::ThapliyalTOpt,
            "ours-ftq" | "ftq" => Strategy::OursFtq,
            "ours-nisq" | "nisq" => Strategy::OursNisq,
            other => return Err(format!("unknown strategy `{other}`")),
        })
    }
}

/// How one Toffoli site is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    /// Single variant block on the original wires.
    InPlace(Variant),
    /// Paired decomposition: compute the AND onto a recycled ancilla, copy
    /// it out, uncompute immediately.
    Pgrt,
    /// Compute the AND onto a fresh constant-register wire and keep it.
    GrtHeld,
    /// Collect the matching held value back off the constant register.
    IgrtHeld,
}

/// Variant table for one strategy.
///
/// Rounds without carry structure (the comparator hook, constant embedding
/// and its reset) always use the exact decomposition: they sit between the
/// mirrored halves, so no mirror ever cancels a relative phase left there.
fn action(strategy: Strategy, group: SegGroup, round: RoundLabel) -> Action {
    use RoundLabel::*;
    use Strategy::*;
    if matches!(round, Middle | Embed | Reset) {
        return Action::InPlace(Variant::St);
    }
    match (strategy, group) {
        (VanMeterItohRef, _) | (DraperSt, _) => Action::InPlace(Variant::St),
        (ThapliyalQubitOpt, SegGroup::Comparator) => match round {
            P => Action::InPlace(Variant::Grt),
            InvP => Action::InPlace(Variant::Igrt),
            _ => Action::InPlace(Variant::St),
        },
        (ThapliyalQubitOpt, SegGroup::Adder) => match round {
            Init | P => Action::InPlace(Variant::Grt),
            InvP | InvInit => Action::InPlace(Variant::Igrt),
            _ => Action::InPlace(Variant::St),
        },
        (ThapliyalTOpt, SegGroup::Comparator) => match round {
            P => Action::InPlace(Variant::Grt),
            G | InvG => Action::Pgrt,
            InvP => Action::InPlace(Variant::Igrt),
            _ => Action::InPlace(Variant::St),
        },
        (OursFtq, SegGroup::Comparator) => match round {
            P => Action::InPlace(Variant::Grt),
            G => Action::GrtHeld,
            InvG => Action::IgrtHeld,
            InvP => Action::InPlace(Variant::Igrt),
            _ => Action::InPlace(Variant::St),
        },
        (ThapliyalTOpt | OursFtq, SegGroup::Adder) => match round {
            Init | P => Action::InPlace(Variant::Grt),
            G | C | InvC | InvG => Action::Pgrt,
            InvP | InvInit => Action::InPlace(Variant::Igrt),
            _ => Action::InPlace(Variant::St),
        },
        (OursNisq, SegGroup::Comparator) => match round {
            P | G => Action::InPlace(Variant::Rt3),
            InvG | InvP => Action::InPlace(Variant::Irt3),
            _ => Action::InPlace(Variant::St),
        },
        (OursNisq, SegGroup::Adder) => match round {
            P => Action::InPlace(Variant::Rt3),
            Init | G | C => Action::InPlace(Variant::Rt4),
            InvP => Action::InPlace(Variant::Irt3),
            InvC | InvG | InvInit => Action::InPlace(Variant::Irt4),
            _ => Action::InPlace(Variant::St),
        },
    }
}

/// Label of the decomposition realizing a round's Toffolis under a
/// strategy, as it appears in per-round breakdown tables: a variant name,
/// `pgrt` for the paired decomposition, or `grt-held`/`igrt-held` for
/// carries parked on the constant register.
pub fn round_realization(strategy: Strategy, group: SegGroup, round: RoundLabel) -> String {
    match action(strategy, group, round) {
        Action::InPlace(v) => v.to_string(),
        Action::Pgrt => "pgrt".into(),
        Action::GrtHeld => "grt-held".into(),
        Action::IgrtHeld => "igrt-held".into(),
    }
}

/// Rounds whose Toffoli targets are guaranteed fresh `|0>` wires: carries
/// written by the initial round, freshly allocated propagate products, and
/// the constant register during embedding. Carry-merge rounds accumulate
/// into already-written wires.
fn target_starts_zero(round: RoundLabel) -> bool {
    matches!(round, RoundLabel::Init | RoundLabel::P | RoundLabel::Embed)
}

fn ensure_safe(variant: Variant, round: RoundLabel, target_initial_zero: bool) -> Result<()> {
    let ctx = PhaseContext::for_round(round, target_initial_zero);
    if phase_safe(variant, ctx) {
        Ok(())
    } else {
        Err(Error::PhaseSafety { variant, round })
    }
}

struct Lowering {
    out: Circuit,
    strategy: Strategy,
    /// Recycled ancillas for paired decompositions, reused oldest-first so
    /// consecutive sites in one round land on distinct wires.
    pool: VecDeque<WireId>,
    pool_cap: usize,
    pool_created: usize,
    /// Held comparator carries: `(c1, c2, target, parked_on)`.
    held: Vec<(WireId, WireId, WireId, WireId)>,
    held_next: usize,
    mode: UncomputeMode,
    next_classical: usize,
}

impl Lowering {
    fn push_variant(&mut self, variant: Variant, wires: Vec<WireId>, block: &Block) -> Result<()> {
        let vb = Block::toffoli_variant(variant, wires, block.round, block.seg);
        // Measurement-assisted uncomputation has no single-block form;
        // inline it so the result stays monomial-simulable.
        if self.mode == UncomputeMode::MeasurementUncompute
            && matches!(variant, Variant::Igrt | Variant::PgrtSecond)
        {
            let expanded = decomp::expand_block(&vb, self.mode, &mut self.next_classical)?;
            self.out.blocks.extend(expanded);
        } else {
            self.out.push(vb);
        }
        Ok(())
    }

    fn take_pool_ancilla(&mut self) -> WireId {
        if self.pool_created < self.pool_cap {
            self.pool_created += 1;
            self.out.alloc_ancilla()
        } else {
            self.pool
                .pop_front()
                .expect("paired-decomposition ancilla pool exhausted below its capacity")
        }
    }

    fn lower_toffoli(&mut self, block: &Block) -> Result<()> {
        let (c1, c2, t) = (block.wires[0], block.wires[1], block.wires[2]);
        let round = block.round;
        match action(self.strategy, block.seg.group(), round) {
            Action::InPlace(variant) => {
                ensure_safe(variant, round, target_starts_zero(round))?;
                self.push_variant(variant, vec![c1, c2, t], block)?;
            }
            Action::Pgrt => {
                let anc = self.take_pool_ancilla();
                ensure_safe(Variant::PgrtFirst, round, true)?;
                self.push_variant(Variant::PgrtFirst, vec![c1, c2, anc], block)?;
                self.push_variant(Variant::PgrtSecond, vec![c1, c2, anc, t], block)?;
                self.pool.push_back(anc);
            }
            Action::GrtHeld => {
                let anc = self.out.regs.d[self.held_next];
                self.held_next += 1;
                ensure_safe(Variant::Grt, round, true)?;
                self.push_variant(Variant::Grt, vec![c1, c2, anc], block)?;
                self.out
                    .blocks
                    .push(Block::new(BlockKind::Cnot, vec![anc, t], round, block.seg));
                self.held.push((c1, c2, t, anc));
            }
            Action::IgrtHeld => {
                let (hc1, hc2, ht, anc) = self.held.pop().ok_or(Error::HeldMismatch)?;
                if (hc1, hc2, ht) != (c1, c2, t) {
                    return Err(Error::HeldMismatch);
                }
                self.out
                    .blocks
                    .push(Block::new(BlockKind::Cnot, vec![anc, t], round, block.seg));
                ensure_safe(Variant::Igrt, round, false)?;
                self.push_variant(Variant::Igrt, vec![c1, c2, anc], block)?;
                if self.held.is_empty() {
                    self.held_next = 0;
                }
            }
        }
        Ok(())
    }
}

/// Block-level lowering: every Toffoli site replaced according to the
/// strategy table, with variants kept as single blocks.
///
/// Under [`UncomputeMode::MeasurementUncompute`] the inverse gadgets are
/// inlined as Hadamard, X-basis measurement, and a classically conditioned
/// CZ; everything else stays a block, so the output is exactly simulable
/// by the monomial engine in both modes.
pub fn lower_blocks(circuit: &Circuit, strategy: Strategy, mode: UncomputeMode) -> Result<Circuit> {
    if !strategy.lowerable() {
        return Err(Error::ModelOnlyStrategy(strategy.to_string()));
    }
    let mut out = circuit.clone();
    out.blocks = Vec::with_capacity(circuit.blocks.len() * 2);
    let mut st = Lowering {
        out,
        strategy,
        pool: VecDeque::new(),
        pool_cap: circuit.n.div_ceil(2),
        pool_created: 0,
        held: Vec::new(),
        held_next: 0,
        mode,
        next_classical: circuit.n_classical,
    };
    for block in &circuit.blocks {
        if block.kind == BlockKind::Toffoli {
            st.lower_toffoli(block)?;
        } else {
            st.out.blocks.push(block.clone());
        }
    }
    if !st.held.is_empty() {
        return Err(Error::HeldMismatch);
    }
    st.out.n_classical = st.next_classical;
    Ok(st.out)
}

/// Primitive-level lowering: [`lower_blocks`] followed by template
/// expansion of every remaining variant block under the uncompute mode.
pub fn lower(circuit: &Circuit, strategy: Strategy, mode: UncomputeMode) -> Result<Circuit> {
    let blocks = lower_blocks(circuit, strategy, mode)?;
    decomp::expand(&blocks, mode)
}
