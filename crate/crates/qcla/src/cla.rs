//! Carry-lookahead adder and comparator synthesis.
//!
//! The in-place adder follows the Draper carry-lookahead construction: an
//! initialization round writes generate bits into the carry register and
//! propagate bits into the target register, logarithmic P/G/C round
//! ladders compute every carry, a sum round folds the carries into the
//! target, and a mirrored second pass erases the intermediate carries.
//!
//! The comparator reuses the same round machinery: it adds the constant
//! `2^n - d` to `b` far enough to obtain the overflow carry `g[0,n]`
//! (which equals `[b >= d]`), taps it with a hook, and then uncomputes
//! everything symmetrically. Spans reaching past the register are clamped
//! to `n`, which is what makes the padded power-of-two index formulas work
//! at any width.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ir::{Circuit, Registers, RoundLabel, Segment, Variant, WireId};

/// One propagate/generate Toffoli: combines `[lo,mid)` and `[mid,hi)` into
/// `[lo,hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PgSpan {
    /// Span start.
    pub lo: usize,
    /// Split point.
    pub mid: usize,
    /// Span end (exclusive).
    pub hi: usize,
}

/// One carry Toffoli: extends carry `c_lo` across `[lo,hi)` into `c_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CSpan {
    /// Source carry index.
    pub lo: usize,
    /// Target carry index.
    pub hi: usize,
}

/// Round-by-round gate plan for the in-place adder. Each entry pairs the
/// round parameter `t` with the spans emitted in that layer.
#[derive(Debug, Clone, Default)]
pub struct AdderPlan {
    /// Propagate rounds, `t = 1 .. floor(log2 n) - 1`.
    pub p_rounds: Vec<(usize, Vec<PgSpan>)>,
    /// Generate rounds, `t = 1 .. floor(log2 n)`.
    pub g_rounds: Vec<(usize, Vec<PgSpan>)>,
    /// Carry rounds, `t` descending from `floor(log2(2n/3))` to 1.
    pub c_rounds: Vec<(usize, Vec<CSpan>)>,
}

/// Gate plan for the full-width adder on `n` bits, with no omissions.
pub fn plan_adder_rounds(n: usize) -> AdderPlan {
    let mut plan = AdderPlan::default();
    if n == 0 {
        return plan;
    }
    let ln = n.ilog2() as usize;
    for t in 1..ln.max(1) {
        let step = 1usize << t;
        if step > n {
            break;
        }
        let row: Vec<PgSpan> = (1..n / step)
            .map(|i| PgSpan {
                lo: step * i,
                mid: step * i + step / 2,
                hi: step * (i + 1),
            })
            .collect();
        if !row.is_empty() {
            plan.p_rounds.push((t, row));
        }
    }
    for t in 1..=ln {
        let step = 1usize << t;
        let row: Vec<PgSpan> = (0..n / step)
            .map(|i| PgSpan {
                lo: step * i,
                mid: step * i + step / 2,
                hi: step * (i + 1),
            })
            .collect();
        if !row.is_empty() {
            plan.g_rounds.push((t, row));
        }
    }
    let q = 2 * n / 3;
    let tc0 = if q >= 1 { q.ilog2() as usize } else { 0 };
    for t in (1..=tc0).rev() {
        let step = 1usize << t;
        let half = step / 2;
        let row: Vec<CSpan> = (1..=(n - half) / step)
            .map(|i| CSpan {
                lo: step * i,
                hi: step * i + half,
            })
            .collect();
        if !row.is_empty() {
            plan.c_rounds.push((t, row));
        }
    }
    plan
}

/// Span-to-wire assignment for propagate bits.
///
/// Width-1 spans `(i, i+1)` live directly on the target register's bit `i`
/// after initialization; wider spans are assigned wires from the propagate
/// workspace in deterministic emission order. Clamped comparator spans may
/// alias an equivalent narrower span instead of owning a wire.
struct PMap {
    map: HashMap<(usize, usize), WireId>,
    aliases: HashMap<(usize, usize), (usize, usize)>,
    pfunc: Vec<WireId>,
    next: usize,
}

impl PMap {
    fn new(regs: &Registers) -> Self {
        let mut map = HashMap::new();
        for (i, &w) in regs.b.iter().enumerate() {
            map.insert((i, i + 1), w);
        }
        PMap {
            map,
            aliases: HashMap::new(),
            pfunc: regs.pfunc.clone(),
            next: 0,
        }
    }

    fn add_alias(&mut self, from: (usize, usize), to: (usize, usize)) {
        self.aliases.insert(from, to);
    }

    /// Wire for span `(x, y)`, following aliases that were never allocated
    /// directly.
    fn get(&self, mut x: usize, mut y: usize) -> WireId {
        while !self.map.contains_key(&(x, y)) {
            let &(nx, ny) = self
                .aliases
                .get(&(x, y))
                .unwrap_or_else(|| panic!("span ({x},{y}) neither allocated nor aliased"));
            x = nx;
            y = ny;
        }
        self.map[&(x, y)]
    }

    fn alloc(&mut self, x: usize, y: usize) -> WireId {
        debug_assert!(
            !self.map.contains_key(&(x, y)),
            "span ({x},{y}) reallocated"
        );
        let w = self.pfunc[self.next];
        self.next += 1;
        self.map.insert((x, y), w);
        w
    }

    fn get_or_alloc(&mut self, x: usize, y: usize) -> WireId {
        if self.map.contains_key(&(x, y)) {
            self.map[&(x, y)]
        } else {
            self.alloc(x, y)
        }
    }
}

fn emit_p_rounds(
    circ: &mut Circuit,
    pmap: &mut PMap,
    plan: &AdderPlan,
    round: RoundLabel,
    seg: Segment,
    reverse: bool,
    skip_hi: Option<usize>,
) {
    let mut rounds: Vec<&(usize, Vec<PgSpan>)> = plan.p_rounds.iter().collect();
    if reverse {
        rounds.reverse();
    }
    for (_, row) in rounds {
        let mut gates: Vec<PgSpan> = row.clone();
        if reverse {
            gates.reverse();
        }
        for s in gates {
            if skip_hi == Some(s.hi) {
                continue;
            }
            let target = if reverse {
                pmap.get(s.lo, s.hi)
            } else {
                pmap.get_or_alloc(s.lo, s.hi)
            };
            let (c1, c2) = (pmap.get(s.lo, s.mid), pmap.get(s.mid, s.hi));
            circ.toffoli(c1, c2, target, Variant::Plain, round, seg);
        }
    }
}

fn emit_g_rounds(
    circ: &mut Circuit,
    pmap: &PMap,
    plan: &AdderPlan,
    round: RoundLabel,
    seg: Segment,
    reverse: bool,
    skip_hi: Option<usize>,
) {
    let mut rounds: Vec<&(usize, Vec<PgSpan>)> = plan.g_rounds.iter().collect();
    if reverse {
        rounds.reverse();
    }
    for (_, row) in rounds {
        let mut gates: Vec<PgSpan> = row.clone();
        if reverse {
            gates.reverse();
        }
        for s in gates {
            if skip_hi == Some(s.hi) {
                continue;
            }
            let (c1, c2, t) = (
                circ.regs.carry_wire(s.mid),
                pmap.get(s.mid, s.hi),
                circ.regs.carry_wire(s.hi),
            );
            circ.toffoli(c1, c2, t, Variant::Plain, round, seg);
        }
    }
}

fn emit_c_rounds(
    circ: &mut Circuit,
    pmap: &PMap,
    plan: &AdderPlan,
    round: RoundLabel,
    seg: Segment,
    reverse: bool,
    skip_hi: Option<usize>,
) {
    let mut rounds: Vec<&(usize, Vec<CSpan>)> = plan.c_rounds.iter().collect();
    if reverse {
        rounds.reverse();
    }
    for (_, row) in rounds {
        let mut gates: Vec<CSpan> = row.clone();
        if reverse {
            gates.reverse();
        }
        for s in gates {
            if skip_hi == Some(s.hi) {
                continue;
            }
            let (c1, c2, t) = (
                circ.regs.carry_wire(s.lo),
                pmap.get(s.lo, s.hi),
                circ.regs.carry_wire(s.hi),
            );
            circ.toffoli(c1, c2, t, Variant::Plain, round, seg);
        }
    }
}

/// In-place adder `|a>|b> -> |a>|a+b mod 2^(n+1)>`.
///
/// The sum's low `n` bits land in the `B` register and the top bit on carry
/// wire `c_n`; carries `c_1..c_{n-1}` and the propagate workspace are
/// restored to zero by the erasing second pass.
pub fn synth_adder(n: usize) -> Result<Circuit> {
    let mut circ = Circuit::new(n)?;
    adder_into(&mut circ, false, &HashSet::new());
    Ok(circ)
}

/// Emits the adder rounds into an existing circuit.
///
/// With `cc_opt` the gates feeding the overflow carry `c_n` are omitted
/// (the result is only needed mod `2^n`) and initialization/erasure gates
/// on `neither`-class bits — positions where the embedded constant is known
/// to be zero — are skipped.
pub(crate) fn adder_into(circ: &mut Circuit, cc_opt: bool, neither: &HashSet<usize>) {
    let n = circ.n;
    let seg = Segment::Adder;
    let regs = circ.regs.clone();
    let plan = plan_adder_rounds(n);
    let mut pmap = PMap::new(&regs);
    let skip = cc_opt.then_some(n);

    for i in 0..n {
        if cc_opt && neither.contains(&i) {
            continue;
        }
        if !(cc_opt && i == n - 1) {
            circ.toffoli(
                regs.d[i],
                regs.b[i],
                regs.carry_wire(i + 1),
                Variant::Plain,
                RoundLabel::Init,
                seg,
            );
        }
        circ.cnot(regs.d[i], regs.b[i], RoundLabel::Init, seg);
    }
    emit_p_rounds(circ, &mut pmap, &plan, RoundLabel::P, seg, false, skip);
    emit_g_rounds(circ, &pmap, &plan, RoundLabel::G, seg, false, skip);
    emit_c_rounds(circ, &pmap, &plan, RoundLabel::C, seg, false, skip);
    emit_p_rounds(circ, &mut pmap, &plan, RoundLabel::InvP, seg, true, skip);
    for i in 1..n {
        circ.cnot(regs.carry_wire(i), regs.b[i], RoundLabel::CalcSum, seg);
    }

    // Second pass: erase carries c_1..c_{n-1} by running the width-(n-1)
    // inverse network against the re-expressed sum bits.
    let m = n - 1;
    if m >= 1 {
        let seg = Segment::EraseCarry;
        for i in 0..m {
            circ.x(regs.b[i], RoundLabel::Pe, seg);
            if !(cc_opt && neither.contains(&i)) {
                circ.cnot(regs.d[i], regs.b[i], RoundLabel::Pe, seg);
            }
        }
        let mut pmap = PMap::new(&regs);
        let plan = plan_adder_rounds(m);
        emit_p_rounds(circ, &mut pmap, &plan, RoundLabel::P, seg, false, None);
        emit_c_rounds(circ, &pmap, &plan, RoundLabel::InvC, seg, true, None);
        emit_g_rounds(circ, &pmap, &plan, RoundLabel::InvG, seg, true, None);
        emit_p_rounds(circ, &mut pmap, &plan, RoundLabel::InvP, seg, true, None);
        for i in (0..m).rev() {
            if !(cc_opt && neither.contains(&i)) {
                circ.cnot(regs.d[i], regs.b[i], RoundLabel::InvInit, seg);
                circ.toffoli(
                    regs.d[i],
                    regs.b[i],
                    regs.carry_wire(i + 1),
                    Variant::Plain,
                    RoundLabel::InvInit,
                    seg,
                );
            }
        }
        for i in (0..m).rev() {
            circ.x(regs.b[i], RoundLabel::InvPe, seg);
        }
    }
}

/// Comparator gate plan: the P/G ladders of a virtual power-of-two-width
/// adder, with spans clamped to `n` and degenerate clamped spans recorded
/// as aliases of the narrower span they collapse onto.
#[derive(Debug, Clone, Default)]
pub struct ComparatorPlan {
    /// Propagate rounds.
    pub p_rounds: Vec<(usize, Vec<PgSpan>)>,
    /// Generate rounds (the top one computes `g[0,n]` into `c_n`).
    pub g_rounds: Vec<(usize, Vec<PgSpan>)>,
    /// Clamped-span aliases, `from -> to`.
    pub aliases: Vec<((usize, usize), (usize, usize))>,
}

/// Gate plan for the comparator's forward half on `n` bits.
pub fn plan_comparator_rounds(n: usize) -> ComparatorPlan {
    let mut plan = ComparatorPlan::default();
    if n <= 1 {
        return plan;
    }
    let m = bit_length(n - 1).max(1);
    let padded = 1usize << m;
    for t in 1..m {
        let step = 1usize << t;
        let mut row = Vec::new();
        for i in 1..padded / step {
            let x = step * i;
            if x >= n {
                continue;
            }
            let mid = (x + step / 2).min(n);
            let y = (step * (i + 1)).min(n);
            if mid == y {
                plan.aliases.push(((x, y), (x, mid)));
            } else {
                row.push(PgSpan { lo: x, mid, hi: y });
            }
        }
        if !row.is_empty() {
            plan.p_rounds.push((t, row));
        }
    }
    for t in 1..=m {
        let step = 1usize << t;
        let mut row = Vec::new();
        for i in 0..padded / step {
            let x = step * i;
            let mid = x + step / 2;
            if x >= n || mid >= n {
                // g[x,n] is already held at c_n once mid passes the edge.
                continue;
            }
            let y = (step * (i + 1)).min(n);
            row.push(PgSpan { lo: x, mid, hi: y });
        }
        if !row.is_empty() {
            plan.g_rounds.push((t, row));
        }
    }
    plan
}

fn bit_length(x: usize) -> usize {
    if x == 0 {
        0
    } else {
        x.ilog2() as usize + 1
    }
}

/// Comparison sense of a comparator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompSense {
    /// Flip the result iff `b >= d`.
    Geq,
    /// Flip the result iff `b < d`.
    Lt,
}

/// What the comparator does with the overflow carry `c_n`.
pub(crate) enum CompHook {
    /// CNOT from `c_n` into the comparison flag.
    CompCnot,
    /// Toffoli with the global control and `c_n` into the comparison flag.
    CtrlToffoli,
}

/// Standalone comparator: flips the `COMP` wire iff `b >= d` (or `b < d`
/// for [`CompSense::Lt`]). Uses the `B`, carry, and propagate registers;
/// everything except `COMP` is restored.
pub fn synth_comparator_skeleton(n: usize, d: &BigUint, sense: CompSense) -> Result<Circuit> {
    let mut circ = Circuit::new(n)?;
    comparator_into(&mut circ, d, sense, Segment::CompFirst, CompHook::CompCnot)?;
    Ok(circ)
}

pub(crate) fn comparator_into(
    circ: &mut Circuit,
    d: &BigUint,
    sense: CompSense,
    seg: Segment,
    hook: CompHook,
) -> Result<()> {
    let n = circ.n;
    let two_n = BigUint::one() << n;
    if *d >= two_n {
        return Err(Error::ConstantOutOfRange {
            n,
            value: d.to_string(),
        });
    }
    let regs = circ.regs.clone();
    // Adding 2^n - d to b overflows exactly when b >= d; the initialization
    // specializes to the set bits of that constant.
    let constant = (&two_n - d) % &two_n;
    let bits: Vec<usize> = (0..n).filter(|&i| constant.bit(i as u64)).collect();
    for &i in &bits {
        circ.cnot(regs.b[i], regs.carry_wire(i + 1), RoundLabel::Init, seg);
        circ.x(regs.b[i], RoundLabel::Init, seg);
    }

    let plan = plan_comparator_rounds(n);
    let mut pmap = PMap::new(&regs);
    for (from, to) in &plan.aliases {
        pmap.add_alias(*from, *to);
    }
    for (_, row) in &plan.p_rounds {
        for s in row {
            let target = pmap.alloc(s.lo, s.hi);
            let (c1, c2) = (pmap.get(s.lo, s.mid), pmap.get(s.mid, s.hi));
            circ.toffoli(c1, c2, target, Variant::Plain, RoundLabel::P, seg);
        }
    }
    for (_, row) in &plan.g_rounds {
        for s in row {
            circ.toffoli(
                regs.carry_wire(s.mid),
                pmap.get(s.mid, s.hi),
                regs.carry_wire(s.hi),
                Variant::Plain,
                RoundLabel::G,
                seg,
            );
        }
    }

    // Result hook on c_n; LT and the degenerate d=0 case invert the carry.
    let negate = (sense == CompSense::Lt) ^ (*d == BigUint::ZERO);
    let cn = regs.carry_wire(n);
    if negate {
        circ.x(cn, RoundLabel::Middle, seg);
    }
    match hook {
        CompHook::CompCnot => circ.cnot(cn, regs.comp, RoundLabel::Middle, seg),
        CompHook::CtrlToffoli => circ.toffoli(
            regs.ctrl,
            cn,
            regs.comp,
            Variant::St,
            RoundLabel::Middle,
            seg,
        ),
    }
    if negate {
        circ.x(cn, RoundLabel::Middle, seg);
    }

    // Mirror: inverse G, inverse P, inverse initialization.
    for (_, row) in plan.g_rounds.iter().rev() {
        for s in row.iter().rev() {
            circ.toffoli(
                regs.carry_wire(s.mid),
                pmap.get(s.mid, s.hi),
                regs.carry_wire(s.hi),
                Variant::Plain,
                RoundLabel::InvG,
                seg,
            );
        }
    }
    for (_, row) in plan.p_rounds.iter().rev() {
        for s in row.iter().rev() {
            let (c1, c2) = (pmap.get(s.lo, s.mid), pmap.get(s.mid, s.hi));
            circ.toffoli(
                c1,
                c2,
                pmap.get(s.lo, s.hi),
                Variant::Plain,
                RoundLabel::InvP,
                seg,
            );
        }
    }
    for &i in bits.iter().rev() {
        circ.x(regs.b[i], RoundLabel::InvInit, seg);
        circ.cnot(regs.b[i], regs.carry_wire(i + 1), RoundLabel::InvInit, seg);
    }
    Ok(())
}
