//! Control modular adder synthesis.
//!
//! Computes `|x>|b> -> |x>|b + a*x mod N>` for classical `a < N < 2^n`
//! in three sections:
//!
//! 1. a leading controlled comparator that flips the `COMP` flag when the
//!    sum would need reduction (`x = 1` and `b >= N - a`),
//! 2. a doubly-controlled adder: the constant `2^n + a - N` (reduce) or `a`
//!    (no reduction) is embedded into the `D` register keyed on `CTRL` and
//!    `COMP`, added into `B` mod `2^n`, and un-embedded again,
//! 3. a trailing controlled comparator that clears `COMP` by checking
//!    `b' < a`, which after the addition is equivalent to "a reduction
//!    happened".
//!
//! Everything but `B` (and the preserved `CTRL`) is returned to zero.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::cla::{adder_into, comparator_into, CompHook, CompSense};
use crate::error::{Error, Result};
use crate::ir::{Block, Circuit, RoundLabel, Segment, Variant};

/// One modular-addition problem: width, modulus, and classical addend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    /// Register width in bits.
    pub n: usize,
    /// Modulus `N`, `1 <= N < 2^n`.
    pub modulus: BigUint,
    /// Addend `a`, `0 <= a < N`.
    pub addend: BigUint,
}

impl Instance {
    /// Validated instance: requires `n >= 1` and `0 <= a < N < 2^n`.
    pub fn new(n: usize, modulus: BigUint, addend: BigUint) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroWidth);
        }
        let two_n = BigUint::one() << n;
        if modulus == BigUint::ZERO || modulus >= two_n || addend >= modulus {
            return Err(Error::InvalidInstance {
                n,
                modulus: modulus.to_string(),
                addend: addend.to_string(),
            });
        }
        Ok(Instance { n, modulus, addend })
    }

    /// Random instance with a genuine `n`-bit modulus: `N` uniform in
    /// `[2^(n-1), 2^n)` and `a` uniform in `[0, N)`.
    pub fn sample<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroWidth);
        }
        let half = BigUint::one() << (n - 1);
        let modulus = &half + rand_below(rng, &half);
        let addend = rand_below(rng, &modulus);
        Instance::new(n, modulus, addend)
    }

    /// The reduction constant `(2^n + a - N) mod 2^n`.
    pub fn reduced_addend(&self) -> BigUint {
        let two_n = BigUint::one() << self.n;
        ((&two_n + &self.addend) - &self.modulus) % &two_n
    }
}

/// Uniform draw from `[0, bound)` by masked rejection sampling.
fn rand_below<R: RngCore + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    debug_assert!(*bound > BigUint::ZERO);
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let top_mask = 0xffu8 >> (8 * bytes as u64 - bits);
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill_bytes(&mut buf);
        buf[bytes - 1] &= top_mask;
        let v = BigUint::from_bytes_le(&buf);
        if &v < bound {
            return v;
        }
    }
}

/// Bit classes driving the embedding: positions are split by which of the
/// two candidate constants — `2^n + a - N` (subtract path) and `a` (plain
/// path) — have the bit set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmbedPlan {
    /// Bit set in both constants: written by a CNOT from `CTRL` alone.
    pub both: Vec<usize>,
    /// Bit set only in `2^n + a - N`: needs `CTRL` and `COMP`.
    pub only_sub: Vec<usize>,
    /// Bit set only in `a`: needs `CTRL` and negated `COMP`.
    pub only_add: Vec<usize>,
    /// Bit set in neither: never written, and the adder may skip it.
    pub neither: Vec<usize>,
}

/// Classify the bit positions of an instance.
pub fn embed_classes(inst: &Instance) -> EmbedPlan {
    let v = inst.reduced_addend();
    let mut plan = EmbedPlan::default();
    for i in 0..inst.n {
        let vi = v.bit(i as u64);
        let ai = inst.addend.bit(i as u64);
        match (vi, ai) {
            (true, true) => plan.both.push(i),
            (true, false) => plan.only_sub.push(i),
            (false, true) => plan.only_add.push(i),
            (false, false) => plan.neither.push(i),
        }
    }
    plan
}

/// Whether an embedding writes the constant or erases it again.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Write the constant into `D`.
    Embed,
    /// Erase it (exact inverse block sequence).
    Reset,
}

/// Balanced CNOT doubling among already-written class members: every pass
/// lets each written bit seed one more, so chain depth is logarithmic in
/// the class size.
fn fanout_chain(
    blocks: &mut Vec<Block>,
    circ: &Circuit,
    first: usize,
    rest: &[usize],
    round: RoundLabel,
    seg: Segment,
) {
    let mut done = vec![first];
    let mut todo: VecDeque<usize> = rest.iter().copied().collect();
    while !todo.is_empty() {
        let mut next = Vec::new();
        for &s in &done {
            let Some(t) = todo.pop_front() else { break };
            blocks.push(Block::new(
                crate::ir::BlockKind::Cnot,
                vec![circ.regs.d[s], circ.regs.d[t]],
                round,
                seg,
            ));
            next.push(t);
        }
        done.extend(next);
    }
}

pub(crate) fn embed_into(circ: &mut Circuit, inst: &Instance, direction: Direction) {
    let plan = embed_classes(inst);
    let round = match direction {
        Direction::Embed => RoundLabel::Embed,
        Direction::Reset => RoundLabel::Reset,
    };
    let seg = Segment::Adder;
    let regs = circ.regs.clone();
    let mut blocks: Vec<Block> = Vec::new();

    if let Some((&first, rest)) = plan.both.split_first() {
        blocks.push(Block::new(
            crate::ir::BlockKind::Cnot,
            vec![regs.ctrl, regs.d[first]],
            round,
            seg,
        ));
        fanout_chain(&mut blocks, circ, first, rest, round, seg);
    }
    if let Some((&first, rest)) = plan.only_sub.split_first() {
        blocks.push(Block::toffoli_variant(
            Variant::Plain,
            vec![regs.ctrl, regs.comp, regs.d[first]],
            round,
            seg,
        ));
        fanout_chain(&mut blocks, circ, first, rest, round, seg);
    }
    if let Some((&first, rest)) = plan.only_add.split_first() {
        blocks.push(Block::new(
            crate::ir::BlockKind::X,
            vec![regs.comp],
            round,
            seg,
        ));
        blocks.push(Block::toffoli_variant(
            Variant::Plain,
            vec![regs.ctrl, regs.comp, regs.d[first]],
            round,
            seg,
        ));
        fanout_chain(&mut blocks, circ, first, rest, round, seg);
        blocks.push(Block::new(
            crate::ir::BlockKind::X,
            vec![regs.comp],
            round,
            seg,
        ));
    }

    if direction == Direction::Reset {
        // Every embed gate is self-inverse, so the reset is the reversed
        // block sequence.
        blocks.reverse();
    }
    circ.blocks.extend(blocks);
}

/// Standalone embedding circuit: writes `2^n+a-N` into `D` when
/// `CTRL = COMP = 1`, `a` when `CTRL = 1, COMP = 0`, nothing when
/// `CTRL = 0`. [`Direction::Reset`] is the exact inverse.
pub fn synth_embed(inst: &Instance, direction: Direction) -> Result<Circuit> {
    let mut circ = Circuit::new(inst.n)?;
    embed_into(&mut circ, inst, direction);
    Ok(circ)
}

/// Which of the two controlled comparators to synthesize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// Leading comparator: flips `COMP` iff `x = 1` and `b >= N - a`.
    First,
    /// Trailing comparator: flips `COMP` iff `x = 1` and `b < a`.
    Last,
}

/// Controlled comparator section of the modular adder. Only the result
/// hook carries the control: it becomes a Toffoli on `CTRL` and the
/// overflow carry, targeting `COMP`.
pub fn synth_c_comparator(inst: &Instance, which: Which) -> Result<Circuit> {
    let mut circ = Circuit::new(inst.n)?;
    c_comparator_into(&mut circ, inst, which)?;
    Ok(circ)
}

pub(crate) fn c_comparator_into(circ: &mut Circuit, inst: &Instance, which: Which) -> Result<()> {
    let (d, sense, seg) = match which {
        Which::First => (
            &inst.modulus - &inst.addend,
            CompSense::Geq,
            Segment::CompFirst,
        ),
        Which::Last => (inst.addend.clone(), CompSense::Lt, Segment::CompLast),
    };
    comparator_into(circ, &d, sense, seg, CompHook::CtrlToffoli)
}

/// Doubly-controlled adder: embed, add mod `2^n` with the overflow and
/// known-zero-bit optimizations, reset. `B` ends at
/// `b + (embedded value) mod 2^n`; `D`, carries, and the propagate
/// workspace end at zero.
pub fn synth_cc_adder(inst: &Instance) -> Result<Circuit> {
    let mut circ = Circuit::new(inst.n)?;
    cc_adder_into(&mut circ, inst);
    Ok(circ)
}

pub(crate) fn cc_adder_into(circ: &mut Circuit, inst: &Instance) {
    embed_into(circ, inst, Direction::Embed);
    let neither: HashSet<usize> = embed_classes(inst).neither.into_iter().collect();
    adder_into(circ, true, &neither);
    embed_into(circ, inst, Direction::Reset);
}

/// Full control modular adder `|x>|b> -> |x>|b + a*x mod N>` on exactly
/// `4n + 2` wires, with `COMP` and all workspace registers restored to
/// zero and global phase exponent zero.
pub fn synth_modadd(inst: &Instance) -> Result<Circuit> {
    let mut circ = Circuit::new(inst.n)?;
    c_comparator_into(&mut circ, inst, Which::First)?;
    cc_adder_into(&mut circ, inst);
    c_comparator_into(&mut circ, inst, Which::Last)?;
    Ok(circ)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{metric_depth, BlockKind, Metric};
    use crate::sim::run_monomial;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inst(n: usize, modulus: u64, addend: u64) -> Instance {
        Instance::new(n, BigUint::from(modulus), BigUint::from(addend)).unwrap()
    }

    fn modadd_input(circ: &Circuit, x: u8, b: u64) -> Vec<u8> {
        let mut input = vec![0u8; circ.width()];
        input[circ.regs.ctrl] = x;
        for i in 0..circ.n {
            input[circ.regs.b[i]] = ((b >> i) & 1) as u8;
        }
        input
    }

    fn b_value(circ: &Circuit, bits: &[u8]) -> u64 {
        (0..circ.n)
            .map(|i| u64::from(bits[circ.regs.b[i]]) << i)
            .sum()
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(0, BigUint::from(1u8), BigUint::ZERO).is_err());
        assert!(Instance::new(4, BigUint::ZERO, BigUint::ZERO).is_err());
        assert!(Instance::new(4, BigUint::from(16u8), BigUint::ZERO).is_err());
        assert!(Instance::new(4, BigUint::from(9u8), BigUint::from(9u8)).is_err());
        assert!(Instance::new(4, BigUint::from(9u8), BigUint::from(8u8)).is_ok());
        // Small moduli are allowed even though sampling never produces them.
        assert!(Instance::new(4, BigUint::from(3u8), BigUint::from(2u8)).is_ok());
    }

    #[test]
    fn sampling_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1usize, 2, 5, 16, 64] {
            for _ in 0..20 {
                let inst = Instance::sample(n, &mut rng).unwrap();
                let half = BigUint::one() << (n - 1);
                assert!(inst.modulus >= half && inst.modulus < (BigUint::one() << n));
                assert!(inst.addend < inst.modulus);
            }
        }
    }

    #[test]
    fn embed_classes_partition() {
        let plan = embed_classes(&inst(6, 59, 37));
        // 2^6 + 37 - 59 = 42 = 101010b against a = 37 = 100101b.
        assert_eq!(plan.both, vec![5]);
        assert_eq!(plan.only_sub, vec![1, 3]);
        assert_eq!(plan.only_add, vec![0, 2]);
        assert_eq!(plan.neither, vec![4]);
        let total =
            plan.both.len() + plan.only_sub.len() + plan.only_add.len() + plan.neither.len();
        assert_eq!(total, 6);
    }

    fn d_value(circ: &Circuit, bits: &[u8]) -> u64 {
        (0..circ.n)
            .map(|i| u64::from(bits[circ.regs.d[i]]) << i)
            .sum()
    }

    #[test]
    fn embed_writes_the_right_constant() {
        let instance = inst(6, 59, 37);
        let circ = synth_embed(&instance, Direction::Embed).unwrap();
        for (x, comp, want) in [(1u8, 1u8, 42u64), (1, 0, 37), (0, 0, 0), (0, 1, 0)] {
            let mut input = vec![0u8; circ.width()];
            input[circ.regs.ctrl] = x;
            input[circ.regs.comp] = comp;
            let state = run_monomial(&circ, &input, 0).unwrap();
            assert_eq!(d_value(&circ, &state.bits), want, "x={x} comp={comp}");
            assert_eq!(state.bits[circ.regs.comp], comp, "comp must be restored");
        }
    }

    #[test]
    fn reset_reverses_embed() {
        let instance = inst(5, 21, 13);
        let fwd = synth_embed(&instance, Direction::Embed).unwrap();
        let rev = synth_embed(&instance, Direction::Reset).unwrap();
        let fwd_sig: Vec<_> = fwd
            .blocks
            .iter()
            .map(|b| (b.kind, b.wires.clone()))
            .collect();
        let mut rev_sig: Vec<_> = rev
            .blocks
            .iter()
            .map(|b| (b.kind, b.wires.clone()))
            .collect();
        rev_sig.reverse();
        assert_eq!(fwd_sig, rev_sig);
        // Embedding then resetting is the identity.
        let mut both = fwd.clone();
        both.blocks.extend(rev.blocks.clone());
        for (x, comp) in [(0u8, 0u8), (1, 0), (1, 1), (0, 1)] {
            let mut input = vec![0u8; both.width()];
            input[both.regs.ctrl] = x;
            input[both.regs.comp] = comp;
            let state = run_monomial(&both, &input, 0).unwrap();
            assert_eq!(d_value(&both, &state.bits), 0);
            assert_eq!(state.bits[both.regs.comp], comp);
            assert_eq!(state.phase_exp, 0);
        }
    }

    #[test]
    fn embed_fanout_depth_is_logarithmic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let instance = Instance::sample(64, &mut rng).unwrap();
            let circ = synth_embed(&instance, Direction::Embed).unwrap();
            let depth = metric_depth(&circ, Metric::Total).unwrap();
            // Three chains of <= ceil(log2 64) CNOT layers plus the seeds
            // and COMP flips.
            assert!(depth <= 2 + 2 * 7, "depth {depth}");
        }
    }

    #[test]
    fn c_comparator_first_and_last_examples() {
        let instance = inst(6, 59, 37);
        let first = synth_c_comparator(&instance, Which::First).unwrap();
        let last = synth_c_comparator(&instance, Which::Last).unwrap();
        for b in [0u64, 10, 21, 22, 30, 36, 37, 58] {
            for x in [0u8, 1] {
                let fs = run_monomial(&first, &modadd_input(&first, x, b), 0).unwrap();
                assert_eq!(
                    fs.bits[first.regs.comp] == 1,
                    x == 1 && b >= 22,
                    "FIRST x={x} b={b}"
                );
                let ls = run_monomial(&last, &modadd_input(&last, x, b), 0).unwrap();
                assert_eq!(
                    ls.bits[last.regs.comp] == 1,
                    x == 1 && b < 37,
                    "LAST x={x} b={b}"
                );
            }
        }
    }

    #[test]
    fn comp_after_first_comparator_matches_predicate() {
        for n in [2usize, 3] {
            for modulus in (1u64 << (n - 1)) + 1..1 << n {
                for addend in 0..modulus {
                    let instance = inst(n, modulus, addend);
                    let circ = synth_c_comparator(&instance, Which::First).unwrap();
                    let d = modulus - addend;
                    for b in 0..modulus {
                        for x in [0u8, 1] {
                            let st = run_monomial(&circ, &modadd_input(&circ, x, b), 0).unwrap();
                            assert_eq!(
                                st.bits[circ.regs.comp] == 1,
                                x == 1 && b >= d,
                                "n={n} N={modulus} a={addend} x={x} b={b}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn cc_adder_adds_embedded_value() {
        let instance = inst(6, 59, 37);
        let circ = synth_cc_adder(&instance).unwrap();
        // x=1, COMP=1, b=30: 30 + 42 mod 64 = 8.
        let mut input = modadd_input(&circ, 1, 30);
        input[circ.regs.comp] = 1;
        let state = run_monomial(&circ, &input, 0).unwrap();
        assert_eq!(b_value(&circ, &state.bits), 8);
        assert_eq!(d_value(&circ, &state.bits), 0);
        // x=0 leaves b untouched.
        let state0 = run_monomial(&circ, &modadd_input(&circ, 0, 30), 0).unwrap();
        assert_eq!(b_value(&circ, &state0.bits), 30);
    }

    #[test]
    fn modadd_example() {
        let instance = inst(6, 59, 37);
        let circ = synth_modadd(&instance).unwrap();
        assert_eq!(circ.width(), 4 * 6 + 2);
        let state = run_monomial(&circ, &modadd_input(&circ, 1, 30), 0).unwrap();
        assert_eq!(b_value(&circ, &state.bits), 8, "30 + 37 mod 59");
        assert_eq!(state.bits[circ.regs.comp], 0);
        assert_eq!(state.phase_exp, 0);
    }

    #[test]
    fn modadd_identity_addend() {
        let instance = inst(4, 9, 0);
        let circ = synth_modadd(&instance).unwrap();
        let state = run_monomial(&circ, &modadd_input(&circ, 1, 0), 0).unwrap();
        assert_eq!(b_value(&circ, &state.bits), 0);
    }

    #[test]
    fn modadd_exhaustive_width_4() {
        for modulus in 9u64..16 {
            for addend in 0..modulus {
                let instance = inst(4, modulus, addend);
                let circ = synth_modadd(&instance).unwrap();
                for b in 0..modulus {
                    for x in [0u8, 1] {
                        let state = run_monomial(&circ, &modadd_input(&circ, x, b), 0).unwrap();
                        let want = (b + addend * u64::from(x)) % modulus;
                        assert_eq!(
                            b_value(&circ, &state.bits),
                            want,
                            "N={modulus} a={addend} b={b} x={x}"
                        );
                        assert_eq!(state.bits[circ.regs.ctrl], x);
                        assert_eq!(state.bits[circ.regs.comp], 0);
                        assert_eq!(d_value(&circ, &state.bits), 0);
                        for j in 1..=circ.n {
                            assert_eq!(state.bits[circ.regs.carry_wire(j)], 0);
                        }
                        for &w in &circ.regs.pfunc {
                            assert_eq!(state.bits[w], 0);
                        }
                        assert_eq!(state.phase_exp, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn neither_class_averages_quarter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 64usize;
        let trials = 400;
        let mut total = 0usize;
        for _ in 0..trials {
            let instance = Instance::sample(n, &mut rng).unwrap();
            total += embed_classes(&instance).neither.len();
        }
        let mean = total as f64 / trials as f64;
        let expect = n as f64 / 4.0;
        assert!(
            (mean - expect).abs() < 0.15 * expect,
            "mean {mean} vs {expect}"
        );
    }

    #[test]
    fn embed_cnot_count_averages_three_quarters() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 64usize;
        let trials = 400;
        let mut total = 0usize;
        for _ in 0..trials {
            let instance = Instance::sample(n, &mut rng).unwrap();
            let circ = synth_embed(&instance, Direction::Embed).unwrap();
            total += circ
                .blocks
                .iter()
                .filter(|b| b.kind == BlockKind::Cnot)
                .count();
        }
        let mean = total as f64 / trials as f64;
        let expect = 3.0 * n as f64 / 4.0;
        assert!(
            (mean - expect).abs() < 0.12 * expect,
            "mean {mean} vs {expect}"
        );
    }
}
