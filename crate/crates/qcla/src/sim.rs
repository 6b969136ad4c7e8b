//! Simulation and functional verification.
//!
//! Two engines back each other up:
//!
//! * [`run_monomial`] — exact simulation of circuits whose every block maps
//!   basis states to basis states times an 8th root of unity. The state is
//!   one bit vector plus an integer phase exponent, so correctness checks
//!   ("phase exponent is exactly 0") are crisp. Hadamards are admitted only
//!   as the first half of the measurement-assisted uncompute pattern.
//! * [`run_statevector`] — a sparse amplitude map over up to 20 wires that
//!   simulates arbitrary primitive circuits, including mid-circuit X-basis
//!   measurements. Measurement coins are drawn from the same seeded stream
//!   in the same order as the monomial engine, so the two can be compared
//!   run-for-run.
//!
//! [`verify_functional`] drives the modular-adder contract
//! `B = (b + a*x) mod N` over exhaustive or sampled inputs, and
//! [`fired_blocks`] supports fault injection by recording which two-qubit
//! and Toffoli blocks ever act nontrivially on an instance's reachable
//! inputs.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decomp::{omega, variant_matrix};
use crate::error::{Error, Result};
use crate::ir::{Block, BlockKind, Circuit, Role, Variant};
use crate::modadd::Instance;

/// Identifier of the seeded generator used by both engines, recorded in
/// verdicts for reproducibility.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Final state of a monomial run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    /// Bit value per wire.
    pub bits: Vec<u8>,
    /// Global phase exponent in eighths of a full turn.
    pub phase_exp: u8,
    /// Classical measurement record.
    pub classical: Vec<u8>,
}

/// What a single block did when stepped.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StepOutcome {
    /// True when the block acted nontrivially: a CNOT whose control was
    /// set, or a Toffoli variant whose controls were both set. False for
    /// skipped conditional blocks.
    pub fired: bool,
}

/// Step-by-step monomial engine.
pub(crate) struct Engine {
    pub bits: Vec<u8>,
    pub phase_exp: u8,
    pub classical: Vec<u8>,
    pending_h: Vec<bool>,
    rng: ChaCha8Rng,
}

impl Engine {
    pub fn new(circ: &Circuit, input: &[u8], seed: u64) -> Self {
        assert_eq!(input.len(), circ.width(), "input must cover every wire");
        Engine {
            bits: input.to_vec(),
            phase_exp: 0,
            classical: vec![0; circ.n_classical],
            pending_h: vec![false; circ.width()],
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn add_phase(&mut self, eighths: u8) {
        self.phase_exp = (self.phase_exp + eighths) % 8;
    }

    pub fn step(&mut self, block: &Block) -> Result<StepOutcome> {
        if let Some(cb) = block.cond_bit {
            if self.classical[cb] == 0 {
                return Ok(StepOutcome { fired: false });
            }
        }
        if block.kind != BlockKind::MeasureX && block.wires.iter().any(|&w| self.pending_h[w]) {
            return Err(Error::NonMonomial(format!(
                "{:?} touches a wire awaiting its X-basis measurement",
                block.kind
            )));
        }
        let mut fired = false;
        match block.kind {
            BlockKind::X => self.bits[block.wires[0]] ^= 1,
            BlockKind::Z => self.add_phase(4 * self.bits[block.wires[0]]),
            BlockKind::S => self.add_phase(2 * self.bits[block.wires[0]]),
            BlockKind::Sdg => self.add_phase(6 * self.bits[block.wires[0]]),
            BlockKind::T => self.add_phase(self.bits[block.wires[0]]),
            BlockKind::Tdg => self.add_phase(7 * self.bits[block.wires[0]]),
            BlockKind::Cnot => {
                fired = self.bits[block.wires[0]] == 1;
                self.bits[block.wires[1]] ^= self.bits[block.wires[0]];
            }
            BlockKind::Cz => {
                self.add_phase(4 * (self.bits[block.wires[0]] & self.bits[block.wires[1]]));
            }
            BlockKind::H => {
                self.pending_h[block.wires[0]] = true;
            }
            BlockKind::MeasureX => {
                let w = block.wires[0];
                if !self.pending_h[w] {
                    return Err(Error::NonMonomial(
                        "X-basis measurement without a preceding Hadamard".into(),
                    ));
                }
                self.pending_h[w] = false;
                let m = (self.rng.next_u32() & 1) as u8;
                self.add_phase(4 * (m & self.bits[w]));
                self.bits[w] = 0;
                if let Some(bit) = block.meas_bit {
                    self.classical[bit] = m;
                }
            }
            BlockKind::Toffoli => {
                fired = self.apply_toffoli(block)?;
            }
        }
        Ok(StepOutcome { fired })
    }

    fn apply_toffoli(&mut self, block: &Block) -> Result<bool> {
        let variant = block.variant.unwrap_or(Variant::Plain);
        let (c1, c2) = (block.wires[0], block.wires[1]);
        let fired = self.bits[c1] == 1 && self.bits[c2] == 1;
        match variant {
            Variant::PgrtSecond => {
                // Copy-out CNOT from the ancilla, then the inverse of the
                // earlier relative-phase compute on it.
                let (anc, t) = (block.wires[2], block.wires[3]);
                self.bits[t] ^= self.bits[anc];
                self.apply_monomial(Variant::Igrt, c1, c2, anc)?;
            }
            // The first half of a paired decomposition is a GRT computing
            // the AND of the controls onto the ancilla.
            Variant::PgrtFirst => self.apply_monomial(Variant::Grt, c1, c2, block.wires[2])?,
            _ => self.apply_monomial(variant, c1, c2, block.wires[2])?,
        }
        Ok(fired)
    }

    fn apply_monomial(&mut self, variant: Variant, c1: usize, c2: usize, t: usize) -> Result<()> {
        let m = variant_matrix(variant)?;
        let idx =
            (self.bits[c1] as usize) * 4 + (self.bits[c2] as usize) * 2 + self.bits[t] as usize;
        let (out, phase) = m.apply(idx);
        self.add_phase(phase);
        self.bits[c1] = ((out >> 2) & 1) as u8;
        self.bits[c2] = ((out >> 1) & 1) as u8;
        self.bits[t] = (out & 1) as u8;
        Ok(())
    }

    pub fn finish(self) -> Result<SimState> {
        if self.pending_h.iter().any(|&p| p) {
            return Err(Error::NonMonomial(
                "circuit ends with an unmeasured Hadamard".into(),
            ));
        }
        Ok(SimState {
            bits: self.bits,
            phase_exp: self.phase_exp,
            classical: self.classical,
        })
    }
}

/// Exact monomial simulation of `circuit` from the given basis assignment.
///
/// Fails on any block that is not monomial on basis states (a Hadamard is
/// accepted only immediately before the matching X-basis measurement).
pub fn run_monomial(circuit: &Circuit, input: &[u8], seed: u64) -> Result<SimState> {
    let mut engine = Engine::new(circuit, input, seed);
    for block in &circuit.blocks {
        engine.step(block)?;
    }
    engine.finish()
}

/// Wire budget of the sparse statevector oracle.
pub const MAX_SV_WIRES: usize = 20;

const AMP_PRUNE: f64 = 1e-15;

/// Sparse statevector: basis key (bit `i` of the key is wire `i`) to
/// amplitude.
#[derive(Debug, Clone)]
pub struct SparseState {
    /// Nonzero amplitudes by basis key.
    pub amps: HashMap<u64, Complex64>,
    /// Classical measurement record.
    pub classical: Vec<u8>,
}

impl SparseState {
    /// Amplitude of a basis key (zero if absent).
    pub fn amplitude(&self, key: u64) -> Complex64 {
        self.amps.get(&key).copied().unwrap_or(Complex64::ZERO)
    }
}

/// Exact simulation of a primitive (or block-level) circuit on at most
/// [`MAX_SV_WIRES`] wires. Measurement outcomes are sampled from the same
/// seeded stream as [`run_monomial`], so runs with equal seeds see equal
/// coins.
pub fn run_statevector(circuit: &Circuit, input: &[u8], seed: u64) -> Result<SparseState> {
    let width = circuit.width();
    if width > MAX_SV_WIRES {
        return Err(Error::WireBudget {
            max: MAX_SV_WIRES,
            got: width,
        });
    }
    assert_eq!(input.len(), width, "input must cover every wire");
    let mut key = 0u64;
    for (w, &v) in input.iter().enumerate() {
        key |= u64::from(v & 1) << w;
    }
    let mut amps: HashMap<u64, Complex64> = HashMap::new();
    amps.insert(key, Complex64::ONE);
    let mut classical = vec![0u8; circuit.n_classical];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for block in &circuit.blocks {
        if let Some(cb) = block.cond_bit {
            if classical[cb] == 0 {
                continue;
            }
        }
        match block.kind {
            BlockKind::X => {
                let bit = 1u64 << block.wires[0];
                amps = amps.into_iter().map(|(k, a)| (k ^ bit, a)).collect();
            }
            BlockKind::Z | BlockKind::S | BlockKind::Sdg | BlockKind::T | BlockKind::Tdg => {
                let p = match block.kind {
                    BlockKind::Z => 4,
                    BlockKind::S => 2,
                    BlockKind::Sdg => 6,
                    BlockKind::T => 1,
                    _ => 7,
                };
                let bit = 1u64 << block.wires[0];
                let ph = omega(p);
                for (k, a) in amps.iter_mut() {
                    if k & bit != 0 {
                        *a *= ph;
                    }
                }
            }
            BlockKind::Cnot => {
                let (c, t) = (1u64 << block.wires[0], 1u64 << block.wires[1]);
                amps = amps
                    .into_iter()
                    .map(|(k, a)| (if k & c != 0 { k ^ t } else { k }, a))
                    .collect();
            }
            BlockKind::Cz => {
                let (c, t) = (1u64 << block.wires[0], 1u64 << block.wires[1]);
                for (k, a) in amps.iter_mut() {
                    if k & c != 0 && k & t != 0 {
                        *a = -*a;
                    }
                }
            }
            BlockKind::H => {
                let bit = 1u64 << block.wires[0];
                let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let mut next: HashMap<u64, Complex64> = HashMap::with_capacity(amps.len() * 2);
                for (k, a) in amps {
                    let lo = k & !bit;
                    let hi = k | bit;
                    if k & bit == 0 {
                        *next.entry(lo).or_insert(Complex64::ZERO) += a * s;
                        *next.entry(hi).or_insert(Complex64::ZERO) += a * s;
                    } else {
                        *next.entry(lo).or_insert(Complex64::ZERO) += a * s;
                        *next.entry(hi).or_insert(Complex64::ZERO) -= a * s;
                    }
                }
                next.retain(|_, a| a.norm() > AMP_PRUNE);
                amps = next;
            }
            BlockKind::MeasureX => {
                // The preceding Hadamard already rotated the X observable
                // onto the computational basis, so the measurement projects
                // onto wire value `m` and retires the wire to |0⟩. On a
                // branch whose pre-Hadamard wire value was `a` this leaves
                // the relative phase (−1)^{m·a}, matching the monomial
                // engine's bookkeeping.
                let bit = 1u64 << block.wires[0];
                let m = (rng.next_u32() & 1) as u8;
                let mut next: HashMap<u64, Complex64> = HashMap::with_capacity(amps.len());
                for (k, a) in amps {
                    if u8::from(k & bit != 0) == m {
                        next.insert(k & !bit, a);
                    }
                }
                next.retain(|_, a| a.norm() > AMP_PRUNE);
                let norm: f64 = next.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm <= AMP_PRUNE {
                    return Err(Error::NonMonomial(
                        "measurement outcome has zero probability".into(),
                    ));
                }
                let scale = Complex64::new(1.0 / norm, 0.0);
                for a in next.values_mut() {
                    *a *= scale;
                }
                amps = next;
                if let Some(cb) = block.meas_bit {
                    classical[cb] = m;
                }
            }
            BlockKind::Toffoli => {
                let variant = block.variant.unwrap_or(Variant::Plain);
                let realized = match variant {
                    Variant::PgrtSecond => {
                        let (anc, t) = (1u64 << block.wires[2], 1u64 << block.wires[3]);
                        amps = amps
                            .into_iter()
                            .map(|(k, a)| (if k & anc != 0 { k ^ t } else { k }, a))
                            .collect();
                        Variant::Igrt
                    }
                    Variant::PgrtFirst => Variant::Grt,
                    v => v,
                };
                amps = apply_toffoli_sv(
                    amps,
                    realized,
                    block.wires[0],
                    block.wires[1],
                    block.wires[2],
                )?;
            }
        }
    }
    Ok(SparseState { amps, classical })
}

fn apply_toffoli_sv(
    amps: HashMap<u64, Complex64>,
    variant: Variant,
    c1: usize,
    c2: usize,
    t: usize,
) -> Result<HashMap<u64, Complex64>> {
    let m = variant_matrix(variant)?;
    let mut next = HashMap::with_capacity(amps.len());
    for (k, a) in amps {
        let idx =
            ((k >> c1) & 1) as usize * 4 + ((k >> c2) & 1) as usize * 2 + ((k >> t) & 1) as usize;
        let (out, p) = m.apply(idx);
        let mut nk = k & !((1u64 << c1) | (1u64 << c2) | (1u64 << t));
        nk |= ((out as u64 >> 2) & 1) << c1;
        nk |= ((out as u64 >> 1) & 1) << c2;
        nk |= (out as u64 & 1) << t;
        *next.entry(nk).or_insert(Complex64::ZERO) += a * omega(p);
    }
    Ok(next)
}

/// Basis assignment for a modular-adder run: control `x`, target value `b`,
/// everything else zero.
pub fn modadd_input(circ: &Circuit, x: u8, b: &BigUint) -> Vec<u8> {
    let mut input = vec![0u8; circ.width()];
    input[circ.regs.ctrl] = x & 1;
    for i in 0..circ.n {
        input[circ.regs.b[i]] = u8::from(b.bit(i as u64));
    }
    input
}

/// How many inputs a verification covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyScope {
    /// Every `x` in `{0,1}` and every `b < N`.
    Exhaustive,
    /// The given number of uniformly sampled `(x, b)` cases.
    Sampled(usize),
}

/// Verification configuration.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Input coverage.
    pub scope: VerifyScope,
    /// Seed for input sampling.
    pub seed: u64,
    /// Simulation seeds; every case is re-run once per entry with the seed
    /// mixed per case, so measurement coins decorrelate across cases.
    pub run_seeds: Vec<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            scope: VerifyScope::Exhaustive,
            seed: 0,
            run_seeds: vec![0],
        }
    }
}

/// First failing case of a verification, with enough context to replay it.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Counterexample {
    /// Control input.
    pub x: u8,
    /// Target input (decimal).
    pub b: String,
    /// Observed target output (decimal), when the run finished.
    pub got: Option<String>,
    /// Expected target output (decimal).
    pub want: String,
    /// Final phase exponent, when the run finished.
    pub phase_exp: Option<u8>,
    /// What went wrong.
    pub reason: String,
    /// Simulation seed of the failing run.
    pub run_seed: u64,
}

/// Verification outcome.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    /// True when every case passed.
    pub pass: bool,
    /// Number of `(x, b, seed)` runs executed.
    pub cases: usize,
    /// Sampling seed used.
    pub seed: u64,
    /// Generator identifier.
    pub rng: &'static str,
    /// First failure, if any.
    pub counterexample: Option<Counterexample>,
}

const SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// Checks the modular-adder contract on an already synthesized (and
/// possibly lowered) circuit: `B = (b + a*x) mod N`, control preserved,
/// every other register and ancilla zero, phase exponent zero.
pub fn verify_circuit(circ: &Circuit, inst: &Instance, opts: &VerifyOptions) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cases: Vec<(u8, BigUint)> = match opts.scope {
        VerifyScope::Exhaustive => {
            let mut v = Vec::new();
            let mut b = BigUint::ZERO;
            while b < inst.modulus {
                v.push((0, b.clone()));
                v.push((1, b.clone()));
                b += 1u8;
            }
            v
        }
        VerifyScope::Sampled(k) => (0..k)
            .map(|_| {
                let x = (rng.next_u32() & 1) as u8;
                let b = sample_below(&mut rng, &inst.modulus);
                (x, b)
            })
            .collect(),
    };

    let mut ran = 0usize;
    for (idx, (x, b)) in cases.iter().enumerate() {
        let want = (b + &inst.addend * x) % &inst.modulus;
        for &run_seed in &opts.run_seeds {
            ran += 1;
            let eff_seed = run_seed ^ (idx as u64).wrapping_mul(SEED_MIX);
            let fail = check_case(circ, *x, b, &want, eff_seed);
            if let Some(cex) = fail {
                return Verdict {
                    pass: false,
                    cases: ran,
                    seed: opts.seed,
                    rng: RNG_ALGORITHM,
                    counterexample: Some(cex),
                };
            }
        }
    }
    Verdict {
        pass: true,
        cases: ran,
        seed: opts.seed,
        rng: RNG_ALGORITHM,
        counterexample: None,
    }
}

fn sample_below(rng: &mut ChaCha8Rng, bound: &BigUint) -> BigUint {
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

fn check_case(
    circ: &Circuit,
    x: u8,
    b: &BigUint,
    want: &BigUint,
    run_seed: u64,
) -> Option<Counterexample> {
    let input = modadd_input(circ, x, b);
    let state = match run_monomial(circ, &input, run_seed) {
        Ok(s) => s,
        Err(e) => {
            return Some(Counterexample {
                x,
                b: b.to_string(),
                got: None,
                want: want.to_string(),
                phase_exp: None,
                reason: format!("simulation error: {e}"),
                run_seed,
            });
        }
    };
    let mut got = BigUint::ZERO;
    for i in (0..circ.n).rev() {
        got <<= 1;
        if state.bits[circ.regs.b[i]] == 1 {
            got |= BigUint::from(1u8);
        }
    }
    let mut reason = None;
    if got != *want {
        reason = Some("wrong sum".to_string());
    } else if state.bits[circ.regs.ctrl] != x {
        reason = Some("control not preserved".to_string());
    } else if state.phase_exp != 0 {
        reason = Some("nonzero phase exponent".to_string());
    } else {
        for (w, role) in circ.roles.iter().enumerate() {
            let must_be_zero = matches!(
                role,
                Role::D | Role::Carry | Role::Pfunc | Role::Comp | Role::Ancilla
            );
            if must_be_zero && state.bits[w] != 0 {
                reason = Some(format!("wire {w} ({role:?}) not restored to zero"));
                break;
            }
        }
    }
    reason.map(|reason| Counterexample {
        x,
        b: b.to_string(),
        got: Some(got.to_string()),
        want: want.to_string(),
        phase_exp: Some(state.phase_exp),
        reason,
        run_seed,
    })
}

/// Synthesizes, lowers, and verifies an instance under a strategy.
///
/// Verification runs at the block level of the lowering ([`crate::strategy::lower_blocks`]),
/// where every variant acts by its exact monomial matrix; under
/// measurement-assisted uncomputation the inlined measurement gadgets are
/// simulated with seeded coins, one per entry in `opts.run_seeds`.
pub fn verify_functional(
    inst: &Instance,
    strategy: crate::strategy::Strategy,
    mode: crate::decomp::UncomputeMode,
    opts: &VerifyOptions,
) -> Result<Verdict> {
    let circ = crate::modadd::synth_modadd(inst)?;
    let lowered = crate::strategy::lower_blocks(&circ, strategy, mode)?;
    Ok(verify_circuit(&lowered, inst, opts))
}

/// Indexes of every CNOT/Toffoli block that acts nontrivially (control(s)
/// set when reached) on at least one valid `(x, b)` input of the instance.
///
/// Firing depends only on bit values, never on measurement coins, so a
/// single seed suffices. This is the candidate pool for fault injection:
/// deleting a block that never fires is an equivalent circuit and cannot
/// be detected.
pub fn fired_blocks(circ: &Circuit, inst: &Instance) -> Result<HashSet<usize>> {
    let mut fired = HashSet::new();
    let mut b = BigUint::ZERO;
    while b < inst.modulus {
        for x in [0u8, 1] {
            let input = modadd_input(circ, x, &b);
            let mut engine = Engine::new(circ, &input, 0);
            for (idx, block) in circ.blocks.iter().enumerate() {
                let outcome = engine.step(block)?;
                if outcome.fired && matches!(block.kind, BlockKind::Cnot | BlockKind::Toffoli) {
                    fired.insert(idx);
                }
            }
            engine.finish()?;
        }
        b += 1u8;
    }
    Ok(fired)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{RoundLabel, Segment};
    use crate::modadd::synth_modadd;

    fn single_variant_circuit(variant: Variant) -> Circuit {
        let mut c = Circuit::new(1).unwrap();
        let ws = vec![c.regs.d[0], c.regs.b[0], c.regs.carry[0]];
        c.push(Block::toffoli_variant(
            variant,
            ws,
            RoundLabel::G,
            Segment::Adder,
        ));
        c
    }

    #[test]
    fn single_block_matches_matrix_for_all_inputs() {
        for variant in [
            Variant::St,
            Variant::Plain,
            Variant::Grt,
            Variant::Igrt,
            Variant::Rt3,
            Variant::Irt3,
            Variant::Rt4,
            Variant::Irt4,
        ] {
            let circ = single_variant_circuit(variant);
            let m = variant_matrix(variant).unwrap();
            for idx in 0..8usize {
                let mut input = vec![0u8; circ.width()];
                input[circ.regs.d[0]] = ((idx >> 2) & 1) as u8;
                input[circ.regs.b[0]] = ((idx >> 1) & 1) as u8;
                input[circ.regs.carry[0]] = (idx & 1) as u8;
                let state = run_monomial(&circ, &input, 0).unwrap();
                let (want_out, want_phase) = m.apply(idx);
                let got_out = (state.bits[circ.regs.d[0]] as usize) * 4
                    + (state.bits[circ.regs.b[0]] as usize) * 2
                    + state.bits[circ.regs.carry[0]] as usize;
                assert_eq!(got_out, want_out, "{variant} input {idx}");
                assert_eq!(state.phase_exp, want_phase, "{variant} input {idx}");
            }
        }
    }

    #[test]
    fn toffoli_truth_table_on_110() {
        let circ = single_variant_circuit(Variant::St);
        let mut input = vec![0u8; circ.width()];
        input[circ.regs.d[0]] = 1;
        input[circ.regs.b[0]] = 1;
        let state = run_monomial(&circ, &input, 0).unwrap();
        assert_eq!(state.bits[circ.regs.carry[0]], 1);
        assert_eq!(state.phase_exp, 0);
    }

    #[test]
    fn grt_phase_on_111_input() {
        // The -i branch of the relative-phase Toffoli sits on the input
        // whose controls and target are all 1.
        let circ = single_variant_circuit(Variant::Grt);
        let mut input = vec![0u8; circ.width()];
        input[circ.regs.d[0]] = 1;
        input[circ.regs.b[0]] = 1;
        input[circ.regs.carry[0]] = 1;
        let state = run_monomial(&circ, &input, 0).unwrap();
        assert_eq!(state.bits[circ.regs.carry[0]], 0, "target uncomputed");
        assert_eq!(state.phase_exp, 6);
        // A zero target stays phase-exact.
        input[circ.regs.carry[0]] = 0;
        let state = run_monomial(&circ, &input, 0).unwrap();
        assert_eq!(state.bits[circ.regs.carry[0]], 1);
        assert_eq!(state.phase_exp, 0);
    }

    #[test]
    fn hadamard_outside_measure_pattern_is_rejected() {
        let mut circ = Circuit::new(1).unwrap();
        circ.push(Block::new(
            BlockKind::H,
            vec![circ.regs.d[0]],
            RoundLabel::G,
            Segment::Adder,
        ));
        let input = vec![0u8; circ.width()];
        assert!(matches!(
            run_monomial(&circ, &input, 0),
            Err(Error::NonMonomial(_))
        ));
    }

    #[test]
    fn statevector_double_hadamard_is_identity() {
        let mut circ = Circuit::new(1).unwrap();
        for _ in 0..2 {
            circ.push(Block::new(
                BlockKind::H,
                vec![circ.regs.d[0]],
                RoundLabel::G,
                Segment::Adder,
            ));
        }
        let input = vec![0u8; circ.width()];
        let state = run_statevector(&circ, &input, 0).unwrap();
        assert_eq!(state.amps.len(), 1);
        assert!((state.amplitude(0) - Complex64::ONE).norm() <= 1e-12);
    }

    #[test]
    fn statevector_wire_budget() {
        let circ = Circuit::new(5).unwrap(); // 22 wires
        let input = vec![0u8; circ.width()];
        assert!(matches!(
            run_statevector(&circ, &input, 0),
            Err(Error::WireBudget { .. })
        ));
    }

    #[test]
    fn modadd_result_is_seed_independent() {
        let inst = Instance::new(6, BigUint::from(59u8), BigUint::from(37u8)).unwrap();
        let circ = synth_modadd(&inst).unwrap();
        let lowered = crate::strategy::lower_blocks(
            &circ,
            crate::strategy::Strategy::OursFtq,
            crate::decomp::UncomputeMode::MeasurementUncompute,
        )
        .unwrap();
        let input = modadd_input(&lowered, 1, &BigUint::from(30u8));
        let reference = run_monomial(&lowered, &input, 0).unwrap();
        assert_eq!(reference.phase_exp, 0);
        for seed in 1..100u64 {
            let state = run_monomial(&lowered, &input, seed).unwrap();
            assert_eq!(state.bits, reference.bits, "seed {seed}");
            assert_eq!(state.phase_exp, 0, "seed {seed}");
        }
    }

    #[test]
    fn verify_passes_and_catches_mutations() {
        let inst = Instance::new(4, BigUint::from(13u8), BigUint::from(7u8)).unwrap();
        let circ = synth_modadd(&inst).unwrap();
        let verdict = verify_circuit(&circ, &inst, &VerifyOptions::default());
        assert!(verdict.pass, "{:?}", verdict.counterexample);
        assert_eq!(verdict.cases, 26);

        // Dropping one CNOT must produce a counterexample.
        let cnot_idx = circ
            .blocks
            .iter()
            .position(|b| b.kind == BlockKind::Cnot)
            .unwrap();
        let broken = circ.without_block(cnot_idx);
        let verdict = verify_circuit(&broken, &inst, &VerifyOptions::default());
        assert!(!verdict.pass);
        assert!(verdict.counterexample.is_some());
    }

    #[test]
    fn sampled_verification_runs_requested_cases() {
        let inst = Instance::new(8, BigUint::from(201u8), BigUint::from(77u8)).unwrap();
        let circ = synth_modadd(&inst).unwrap();
        let opts = VerifyOptions {
            scope: VerifyScope::Sampled(50),
            seed: 9,
            run_seeds: vec![0],
        };
        let verdict = verify_circuit(&circ, &inst, &opts);
        assert!(verdict.pass, "{:?}", verdict.counterexample);
        assert_eq!(verdict.cases, 50);
    }

    #[test]
    fn fired_blocks_are_a_strict_subset() {
        let inst = Instance::new(3, BigUint::from(5u8), BigUint::from(3u8)).unwrap();
        let circ = synth_modadd(&inst).unwrap();
        let fired = fired_blocks(&circ, &inst).unwrap();
        let candidates = circ
            .blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Cnot | BlockKind::Toffoli))
            .count();
        assert!(!fired.is_empty());
        assert!(fired.len() <= candidates);
        for &idx in &fired {
            assert!(matches!(
                circ.blocks[idx].kind,
                BlockKind::Cnot | BlockKind::Toffoli
            ));
        }
    }
}
