//! Resource analytics: KQ cost models, the T-width scheduler, the optimal
//! T-width, reference ripple-carry costs, the distillation gadget, and the
//! per-circuit [`ResourceReport`].
//!
//! All logarithms are base 2, matching the lookahead round counts.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use petgraph::graph::NodeIndex;
use petgraph::Direction;
use serde::Serialize;

use crate::decomp::UncomputeMode;
use crate::error::{Error, Result};
use crate::ir::{
    count_matching, metric_depth, Block, BlockKind, Circuit, GateCounts, Metric, RoundLabel,
    Segment,
};
use crate::modadd::{synth_modadd, Instance};
use crate::strategy::{lower, round_realization, Strategy};

/// Default number of logical qubits consumed by one magic-state
/// distillation gadget, from the 15-qubit circuit.
pub const DEFAULT_CG: usize = 15;

/// Modeled T-depth of the adder pipeline when at most `n_t` T gates run
/// per layer: `86n/n_T + 12·log2(n_T) − 12`.
pub fn model_t_depth(n: usize, n_t: usize) -> f64 {
    assert!(n >= 1 && n_t >= 1, "model is defined for n, n_T >= 1");
    86.0 * n as f64 / n_t as f64 + 12.0 * (n_t as f64).log2() - 12.0
}

/// Modeled KQ_T: `(4n + (c_g+1)·n_T + 2) × model_t_depth(n, n_T)`. The
/// qubit term charges the whole circuit footprint plus `n_T` magic-state
/// consumers with `c_g` distillation qubits each, for the full duration.
pub fn model_kq_t(n: usize, n_t: usize, c_g: usize) -> f64 {
    let qubits = 4.0 * n as f64 + (c_g as f64 + 1.0) * n_t as f64 + 2.0;
    qubits * model_t_depth(n, n_t)
}

/// The T-width minimizing [`model_kq_t`] for the given width.
///
/// Seeds at the continuous optimum `sqrt(86/(3(c_g+1)))·n/sqrt(log2 n)`,
/// takes the better of its floor and ceiling, then walks downhill while a
/// neighbor is at least as good; the model is unimodal in `n_T`, so this
/// meets the exhaustive argmin within one unit even where the continuous
/// formula's integer neighborhood does not.
pub fn optimal_t_width(n: usize, c_g: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let f = |k: usize| model_kq_t(n, k, c_g);
    let nf = n as f64;
    let continuous = (86.0 / (3.0 * (c_g as f64 + 1.0))).sqrt() * nf / nf.log2().sqrt();
    let lo = (continuous.floor() as usize).max(1);
    let hi = (continuous.ceil() as usize).max(1);
    let mut k = if f(hi) < f(lo) { hi } else { lo };
    while k > 1 && f(k - 1) <= f(k) {
        k -= 1;
    }
    while f(k + 1) < f(k) {
        k += 1;
    }
    k
}

fn is_t(block: &Block) -> bool {
    matches!(block.kind, BlockKind::T | BlockKind::Tdg)
}

/// Scheduled T-depth of a primitive circuit when at most `n_t` T/T-dagger
/// gates run per time layer.
///
/// Greedy list scheduling over the dependency DAG: ready non-T gates cost
/// nothing and dissolve immediately; each layer fires up to `n_t` ready T
/// gates, longest remaining T-path first. Returns the number of layers
/// that contained at least one T gate. Pass `usize::MAX` for the
/// unconstrained depth, which equals `metric_depth(circuit, T)`.
pub fn schedule_t_width(circuit: &Circuit, n_t: usize) -> Result<usize> {
    if n_t == 0 {
        return Err(Error::ZeroTWidth);
    }
    if circuit.has_toffoli_blocks() {
        return Err(Error::BlockLevelDepth { metric: Metric::T });
    }
    if n_t == usize::MAX {
        return metric_depth(circuit, Metric::T);
    }
    let len = circuit.blocks.len();
    let dag = circuit.dependency_dag();

    // Longest T-path from each block to any sink, inclusive. Blocks are
    // already in topological order, so one reverse sweep suffices.
    let mut crit = vec![0usize; len];
    for i in (0..len).rev() {
        let succ_max = dag
            .neighbors_directed(NodeIndex::new(i), Direction::Outgoing)
            .map(|j| crit[j.index()])
            .max()
            .unwrap_or(0);
        crit[i] = usize::from(is_t(&circuit.blocks[i])) + succ_max;
    }

    let mut indeg: Vec<usize> = (0..len)
        .map(|i| {
            dag.neighbors_directed(NodeIndex::new(i), Direction::Incoming)
                .count()
        })
        .collect();
    let mut ready_t: BinaryHeap<(usize, Reverse<usize>)> = BinaryHeap::new();
    let mut ready_other: Vec<usize> = Vec::new();
    let enqueue = |i: usize,
                   circuit: &Circuit,
                   ready_t: &mut BinaryHeap<(usize, Reverse<usize>)>,
                   ready_other: &mut Vec<usize>,
                   crit: &[usize]| {
        if is_t(&circuit.blocks[i]) {
            ready_t.push((crit[i], Reverse(i)));
        } else {
            ready_other.push(i);
        }
    };
    for (i, &deg) in indeg.iter().enumerate() {
        if deg == 0 {
            enqueue(i, circuit, &mut ready_t, &mut ready_other, &crit);
        }
    }

    let mut layers = 0usize;
    let mut done = 0usize;
    let mut fired: Vec<usize> = Vec::new();
    loop {
        while let Some(i) = ready_other.pop() {
            done += 1;
            for j in dag.neighbors_directed(NodeIndex::new(i), Direction::Outgoing) {
                let j = j.index();
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    enqueue(j, circuit, &mut ready_t, &mut ready_other, &crit);
                }
            }
        }
        if ready_t.is_empty() {
            break;
        }
        layers += 1;
        fired.clear();
        for _ in 0..n_t.min(ready_t.len()) {
            let (_, Reverse(i)) = ready_t.pop().expect("heap size checked");
            fired.push(i);
        }
        for &i in &fired {
            done += 1;
            for j in dag.neighbors_directed(NodeIndex::new(i), Direction::Outgoing) {
                let j = j.index();
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    enqueue(j, circuit, &mut ready_t, &mut ready_other, &crit);
                }
            }
        }
    }
    debug_assert_eq!(done, len, "scheduler must consume every block");
    Ok(layers)
}

/// Closed-form costs of the ripple-carry reference construction at width
/// `n`: `30n` Toffolis, `210n` T, `184.5n` CNOT, depths `12·log2 n`
/// (Toffoli) and `78·log2 n` (CNOT), `4n` qubits, and `KQ_CX =
/// 312·n·log2 n`.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReferenceCosts {
    /// Modeled circuit width.
    pub n: usize,
    /// Toffoli count.
    pub toffoli_count: f64,
    /// T count.
    pub t_count: f64,
    /// CNOT count.
    pub cnot_count: f64,
    /// Toffoli depth.
    pub toffoli_depth: f64,
    /// CNOT depth.
    pub cnot_depth: f64,
    /// Qubit count.
    pub qubit_count: f64,
    /// Qubits times CNOT-depth.
    pub kq_cx: f64,
}

/// Evaluates the ripple-carry reference model at width `n`.
pub fn reference_costs(n: usize) -> ReferenceCosts {
    let nf = n as f64;
    let lg = if n > 1 { n.ilog2() as f64 } else { 0.0 };
    ReferenceCosts {
        n,
        toffoli_count: 30.0 * nf,
        t_count: 210.0 * nf,
        cnot_count: 184.5 * nf,
        toffoli_depth: 12.0 * lg,
        cnot_depth: 78.0 * lg,
        qubit_count: 4.0 * nf,
        kq_cx: 312.0 * nf * lg,
    }
}

/// Number of qubits in the distillation gadget.
pub const DISTILLATION_QUBITS: usize = 15;

/// The 15-qubit magic-state distillation gadget, recorded structurally:
/// five multi-target CNOT columns (control, targets) followed by one
/// measurement step. It is not an adder-register circuit, so it carries
/// its own layout rather than reusing the synthesis IR.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Distillation {
    /// CNOT columns in time order; each is one fully concurrent step.
    pub columns: Vec<(usize, Vec<usize>)>,
    /// Rows measured in the X basis at the end.
    pub x_measured: Vec<usize>,
    /// Rows measured in the Z basis at the end.
    pub z_measured: Vec<usize>,
    /// Row carrying the distilled output state.
    pub output: usize,
}

impl Distillation {
    /// Qubit count.
    pub fn qubits(&self) -> usize {
        DISTILLATION_QUBITS
    }

    /// Total CNOT count across all columns.
    pub fn cnot_count(&self) -> usize {
        self.columns.iter().map(|(_, targets)| targets.len()).sum()
    }

    /// Time steps assuming each column's CNOTs run fully concurrently,
    /// plus one final measurement step.
    pub fn depth(&self) -> usize {
        self.columns.len() + 1
    }
}

/// Builds the distillation gadget and its cost summary.
pub fn synth_distillation() -> (Distillation, DistillationReport) {
    let gadget = Distillation {
        columns: vec![
            (1, vec![0, 4, 6, 8, 10, 12, 14]),
            (2, vec![0, 5, 6, 9, 10, 13, 14]),
            (3, vec![4, 5, 6, 11, 12, 13, 14]),
            (7, vec![8, 9, 10, 11, 12, 13, 14]),
            (0, vec![4, 5, 8, 9, 11, 14]),
        ],
        x_measured: vec![1, 2, 3, 7],
        z_measured: vec![4, 5, 6, 8, 9, 10, 11, 12, 13, 14],
        output: 0,
    };
    let report = DistillationReport {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        qubit_count: gadget.qubits(),
        cnot_count: gadget.cnot_count(),
        depth: gadget.depth(),
    };
    (gadget, report)
}

/// Cost summary of the distillation gadget.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistillationReport {
    /// Report schema identifier.
    pub schema: &'static str,
    /// Tool version.
    pub version: &'static str,
    /// Qubit count.
    pub qubit_count: usize,
    /// CNOT count.
    pub cnot_count: usize,
    /// Time steps under full per-column concurrency.
    pub depth: usize,
}

/// Schema identifier embedded in serialized reports.
pub const REPORT_SCHEMA: &str = "qcla-report-v1";

/// Instance coordinates embedded in a report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InstanceMeta {
    /// Register width.
    pub n: usize,
    /// Modulus (decimal).
    pub modulus: String,
    /// Addend (decimal).
    pub addend: String,
}

/// One row of the per-round breakdown.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundRow {
    /// Section the round belongs to (in execution order).
    pub section: String,
    /// Round label; the row key of per-round cost tables.
    pub round: String,
    /// Gate class tallied by this row: `toffoli`, `t`, or `cnot`.
    pub gate: String,
    /// Decomposition realizing this round's Toffolis under the strategy.
    pub cost: String,
    /// Gate count.
    pub count: usize,
    /// Depth of this round's subcircuit in the row's metric.
    pub depth: usize,
}

/// Full resource report for one lowered instance.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResourceReport {
    /// Report schema identifier.
    pub schema: &'static str,
    /// Tool version.
    pub version: &'static str,
    /// Strategy name.
    pub strategy: String,
    /// Instance coordinates.
    pub instance: InstanceMeta,
    /// Seed the instance was sampled with (provenance; reports themselves
    /// are deterministic).
    pub seed: u64,
    /// Logical Toffoli count of the synthesized circuit.
    pub toffoli_count: usize,
    /// T plus T-dagger count after lowering.
    pub t_count: usize,
    /// Two-qubit count after lowering (CNOT plus CZ).
    pub cnot_count: usize,
    /// Total wires after lowering.
    pub qubit_count: usize,
    /// Classical bits consumed by measurement-assisted uncomputation.
    pub classical_bits: usize,
    /// Toffoli depth of the synthesized circuit.
    pub toffoli_depth: usize,
    /// T-depth after lowering.
    pub t_depth: usize,
    /// CNOT-depth after lowering.
    pub cnot_depth: usize,
    /// `qubit_count × t_depth`.
    pub kq_t: usize,
    /// `qubit_count × cnot_depth`.
    pub kq_cx: usize,
    /// Per-round breakdown, sections in execution order.
    pub per_round: Vec<RoundRow>,
}

/// Depth of the blocks with one `(section, round)` key, in one metric.
fn round_depth(template: &Circuit, blocks: Vec<Block>, metric: Metric) -> Result<usize> {
    let mut sub = template.clone();
    sub.blocks = blocks;
    metric_depth(&sub, metric)
}

fn per_round_rows(
    synthesized: &Circuit,
    primitive: &Circuit,
    strategy: Strategy,
) -> Result<Vec<RoundRow>> {
    type Key = (Segment, RoundLabel);
    let mut order: Vec<Key> = Vec::new();
    let mut grouped: HashMap<Key, (Vec<Block>, Vec<Block>)> = HashMap::new();
    for b in &synthesized.blocks {
        let key = (b.seg, b.round);
        if !grouped.contains_key(&key) {
            order.push(key);
        }
        grouped.entry(key).or_default().0.push(b.clone());
    }
    for b in &primitive.blocks {
        let key = (b.seg, b.round);
        if !grouped.contains_key(&key) {
            order.push(key);
        }
        grouped.entry(key).or_default().1.push(b.clone());
    }

    let mut rows = Vec::new();
    for key in order {
        let (seg, round) = key;
        let (block_level, prim_level) = grouped.remove(&key).expect("key from order");
        let cost = round_realization(strategy, seg.group(), round);
        let toffolis: Vec<Block> = block_level
            .iter()
            .filter(|b| b.kind == BlockKind::Toffoli)
            .cloned()
            .collect();
        if !toffolis.is_empty() {
            rows.push(RoundRow {
                section: seg.to_string(),
                round: round.to_string(),
                gate: "toffoli".into(),
                cost: cost.clone(),
                count: toffolis.len(),
                depth: round_depth(synthesized, toffolis, Metric::Toffoli)?,
            });
        }
        let t_count = prim_level.iter().filter(|b| is_t(b)).count();
        if t_count > 0 {
            rows.push(RoundRow {
                section: seg.to_string(),
                round: round.to_string(),
                gate: "t".into(),
                cost: cost.clone(),
                count: t_count,
                depth: round_depth(primitive, prim_level.clone(), Metric::T)?,
            });
        }
        let cx_count = prim_level
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Cnot | BlockKind::Cz))
            .count();
        if cx_count > 0 {
            rows.push(RoundRow {
                section: seg.to_string(),
                round: round.to_string(),
                gate: "cnot".into(),
                cost,
                count: cx_count,
                depth: round_depth(primitive, prim_level, Metric::Cnot)?,
            });
        }
    }
    Ok(rows)
}

/// Synthesizes, lowers (measurement-assisted uncomputation, the headline
/// counting mode), and tallies an instance under a strategy.
///
/// Toffoli figures describe the synthesized block-level circuit; T/CNOT
/// figures describe the primitive lowering. `seed` is recorded verbatim
/// for provenance.
pub fn report_for(inst: &Instance, strategy: Strategy, seed: u64) -> Result<ResourceReport> {
    let synthesized = synth_modadd(inst)?;
    let primitive = lower(&synthesized, strategy, UncomputeMode::MeasurementUncompute)?;
    let counts = GateCounts::of(&primitive);
    let qubit_count = primitive.width();
    let t_depth = metric_depth(&primitive, Metric::T)?;
    let cnot_depth = metric_depth(&primitive, Metric::Cnot)?;
    Ok(ResourceReport {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        strategy: strategy.to_string(),
        instance: InstanceMeta {
            n: inst.n,
            modulus: inst.modulus.to_string(),
            addend: inst.addend.to_string(),
        },
        seed,
        toffoli_count: count_matching(&synthesized, Metric::Toffoli),
        t_count: counts.t,
        cnot_count: counts.cnot_like(),
        qubit_count,
        classical_bits: primitive.n_classical,
        toffoli_depth: metric_depth(&synthesized, Metric::Toffoli)?,
        t_depth,
        cnot_depth,
        kq_t: qubit_count * t_depth,
        kq_cx: qubit_count * cnot_depth,
        per_round: per_round_rows(&synthesized, &primitive, strategy)?,
    })
}
