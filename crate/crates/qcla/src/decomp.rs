//! Toffoli decomposition catalog.
//!
//! Each [`Variant`](crate::ir::Variant) is backed by a primitive template on
//! abstract wires `0, 1, 2` (controls, then target) and — when it acts as a
//! standalone 3-qubit gate — an exact 8x8 monomial matrix whose nonzero
//! entries are 8th roots of unity. Monomial matrices are stored as a basis
//! permutation plus phase exponents (in eighths of a full turn), so
//! simulation and inversion stay exact.
//!
//! [`expand`] substitutes templates into a circuit, turning block-level
//! Toffolis into primitive gates. Inverse variants that uncompute an earlier
//! relative-phase Toffoli can be expanded in two modes: a unitary inverse
//! template, or the cheaper measurement-assisted pattern (Hadamard, X-basis
//! measurement, classically conditioned CZ).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ir::{Block, BlockKind, Circuit, RoundLabel, Segment, Variant, WireId};

/// One primitive gate of a decomposition template, on abstract wire indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateGate {
    /// Hadamard on the given abstract wire.
    H(usize),
    /// S on the given abstract wire.
    S(usize),
    /// S-dagger on the given abstract wire.
    Sdg(usize),
    /// T on the given abstract wire.
    T(usize),
    /// T-dagger on the given abstract wire.
    Tdg(usize),
    /// CNOT with abstract (control, target).
    Cx(usize, usize),
}

impl TemplateGate {
    /// Inverse gate (CNOT and H are self-inverse).
    pub fn inverse(self) -> TemplateGate {
        match self {
            TemplateGate::T(w) => TemplateGate::Tdg(w),
            TemplateGate::Tdg(w) => TemplateGate::T(w),
            TemplateGate::S(w) => TemplateGate::Sdg(w),
            TemplateGate::Sdg(w) => TemplateGate::S(w),
            g => g,
        }
    }
}

use TemplateGate::{Cx, Tdg, H, S, T};

/// Textbook Clifford+T Toffoli: 7 T, 6 CNOT, 2 H, 1 S.
pub const ST_TEMPLATE: &[TemplateGate] = &[
    H(2),
    Cx(1, 2),
    Tdg(2),
    Cx(0, 2),
    T(2),
    Cx(1, 2),
    Tdg(2),
    Cx(0, 2),
    Tdg(1),
    T(2),
    Cx(0, 1),
    H(2),
    Tdg(1),
    Cx(0, 1),
    T(0),
    S(1),
];

/// Relative-phase Toffoli with 4 T gates at T-depth 2.
pub const GRT_TEMPLATE: &[TemplateGate] = &[
    H(2),
    T(2),
    Cx(0, 2),
    Cx(1, 2),
    Cx(2, 0),
    Cx(2, 1),
    Tdg(0),
    Tdg(1),
    T(2),
    Cx(2, 0),
    Cx(2, 1),
    H(2),
    S(2),
];

/// Relative-phase Toffoli with only 3 CNOTs.
pub const RT3_TEMPLATE: &[TemplateGate] = &[
    H(2),
    T(2),
    Cx(1, 2),
    Tdg(2),
    Cx(0, 2),
    T(2),
    Cx(1, 2),
    Tdg(2),
    H(2),
];

/// Relative-phase Toffoli with 4 CNOTs and a smaller phase footprint.
pub const RT4_TEMPLATE: &[TemplateGate] = &[
    H(2),
    T(2),
    Cx(1, 2),
    Tdg(2),
    Cx(0, 2),
    T(2),
    Cx(1, 2),
    Tdg(2),
    Cx(0, 2),
    H(2),
];

fn inverse_template(template: &[TemplateGate]) -> Vec<TemplateGate> {
    template.iter().rev().map(|g| g.inverse()).collect()
}

/// Primitive template for a variant, or `None` for the paired
/// [`Variant::PgrtFirst`]/[`Variant::PgrtSecond`] halves whose expansion
/// depends on the uncompute mode.
pub fn template(variant: Variant) -> Option<Vec<TemplateGate>> {
    match variant {
        Variant::St | Variant::Plain => Some(ST_TEMPLATE.to_vec()),
        Variant::Grt => Some(GRT_TEMPLATE.to_vec()),
        Variant::Igrt => Some(inverse_template(GRT_TEMPLATE)),
        Variant::Rt3 => Some(RT3_TEMPLATE.to_vec()),
        Variant::Irt3 => Some(inverse_template(RT3_TEMPLATE)),
        Variant::Rt4 => Some(RT4_TEMPLATE.to_vec()),
        Variant::Irt4 => Some(inverse_template(RT4_TEMPLATE)),
        Variant::PgrtFirst | Variant::PgrtSecond => None,
    }
}

/// Basis permutation of the ideal Toffoli on `|c1 c2 t>` indices (wire 0 is
/// the most significant bit).
pub const TOFFOLI_PERM: [usize; 8] = [0, 1, 2, 3, 4, 5, 7, 6];

/// Exact monomial 8x8 matrix: basis `j` maps to basis `perm[j]` with phase
/// `exp(i*pi/4)^phase[j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonomialMatrix {
    /// Output basis index per input basis index.
    pub perm: [usize; 8],
    /// Phase exponent (eighths of a full turn) per input basis index.
    pub phase: [u8; 8],
}

impl MonomialMatrix {
    /// Image of basis state `j`: `(perm[j], phase[j])`.
    pub fn apply(&self, j: usize) -> (usize, u8) {
        (self.perm[j], self.phase[j])
    }

    /// Exact inverse.
    pub fn inverse(&self) -> MonomialMatrix {
        let mut perm = [0usize; 8];
        let mut phase = [0u8; 8];
        for j in 0..8 {
            let (k, p) = self.apply(j);
            perm[k] = j;
            phase[k] = (8 - p) % 8;
        }
        MonomialMatrix { perm, phase }
    }

    /// Dense complex form, rows/cols indexed by `|c1 c2 t>`.
    pub fn to_dense(&self) -> [[Complex64; 8]; 8] {
        let mut m = [[Complex64::ZERO; 8]; 8];
        for (j, (&row, &p)) in self.perm.iter().zip(self.phase.iter()).enumerate() {
            m[row][j] = omega(p);
        }
        m
    }
}

/// `exp(i*pi/4)^p` as a complex number.
pub fn omega(p: u8) -> Complex64 {
    let theta = std::f64::consts::FRAC_PI_4 * f64::from(p % 8);
    Complex64::new(theta.cos(), theta.sin())
}

const GRT_PHASE: [u8; 8] = [0, 2, 0, 6, 0, 6, 0, 6];
const IGRT_PHASE: [u8; 8] = [0, 6, 0, 2, 0, 2, 2, 0];
const RT3_PHASE: [u8; 8] = [0, 0, 0, 0, 0, 4, 2, 6];
const IRT3_PHASE: [u8; 8] = [0, 0, 0, 0, 0, 4, 2, 6];
const RT4_PHASE: [u8; 8] = [0, 0, 0, 0, 0, 0, 6, 6];
const IRT4_PHASE: [u8; 8] = [0, 0, 0, 0, 0, 0, 2, 2];

/// Exact monomial matrix of a standalone 3-qubit variant.
///
/// The paired `PgrtFirst`/`PgrtSecond` halves are rejected; query their
/// constituents (`Grt`, `Igrt`) instead.
pub fn variant_matrix(variant: Variant) -> Result<MonomialMatrix> {
    let phase = match variant {
        Variant::St | Variant::Plain => [0u8; 8],
        Variant::Grt => GRT_PHASE,
        Variant::Igrt => IGRT_PHASE,
        Variant::Rt3 => RT3_PHASE,
        Variant::Irt3 => IRT3_PHASE,
        Variant::Rt4 => RT4_PHASE,
        Variant::Irt4 => IRT4_PHASE,
        Variant::PgrtFirst | Variant::PgrtSecond => {
            return Err(Error::NoVariantMatrix(variant));
        }
    };
    Ok(MonomialMatrix {
        perm: TOFFOLI_PERM,
        phase,
    })
}

/// Phase exponents (eighths of a turn) picked up by each basis input of a
/// standalone variant. Same rejection rule as [`variant_matrix`].
pub fn phase_exponents(variant: Variant) -> Result<[u8; 8]> {
    Ok(variant_matrix(variant)?.phase)
}

/// Why a variant may be placed without corrupting the computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validity {
    /// Implements the Toffoli matrix exactly.
    AlwaysPhaseExact,
    /// Phase-exact whenever the target starts in `|0>`.
    TargetZero,
    /// Relative phase is canceled by a paired uncompute of the same value.
    PairedUncompute,
    /// Relative phase cancels against the mirrored inverse round.
    RelativePhaseSafe,
}

/// Phase-safety class of a variant.
pub fn validity(variant: Variant) -> Validity {
    match variant {
        Variant::St | Variant::Plain => Validity::AlwaysPhaseExact,
        Variant::Grt | Variant::PgrtFirst => Validity::TargetZero,
        Variant::Igrt | Variant::PgrtSecond => Validity::PairedUncompute,
        Variant::Rt3 | Variant::Irt3 | Variant::Rt4 | Variant::Irt4 => Validity::RelativePhaseSafe,
    }
}

/// Whether a block sits in the forward (compute) or mirrored (uncompute)
/// half of its section.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComputePhase {
    /// Forward half: values are being computed.
    Compute,
    /// Mirrored half: previously computed values are being erased.
    Uncompute,
}

/// Placement context for [`phase_safe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseContext {
    /// Round the variant is placed in.
    pub round: RoundLabel,
    /// Compute or uncompute half.
    pub phase: ComputePhase,
    /// Whether the target wire is guaranteed `|0>` before the gate.
    pub target_initial_zero: bool,
}

impl PhaseContext {
    /// Context derived from a round label, with the stated target guarantee.
    pub fn for_round(round: RoundLabel, target_initial_zero: bool) -> Self {
        let phase = match round {
            RoundLabel::InvP
            | RoundLabel::InvG
            | RoundLabel::InvC
            | RoundLabel::InvInit
            | RoundLabel::InvPe
            | RoundLabel::Reset => ComputePhase::Uncompute,
            _ => ComputePhase::Compute,
        };
        PhaseContext {
            round,
            phase,
            target_initial_zero,
        }
    }
}

/// True iff the variant's phase-safety argument holds in the given context.
///
/// Exact variants are always safe. A relative-phase Toffoli needs its target
/// to start in `|0>`; its inverse needs a matching earlier compute of the
/// same value, which only an uncompute context provides. The mirrored
/// variants are safe only inside the symmetric compute/uncompute rounds of
/// the lookahead structure — in particular the middle comparator hook is
/// excluded.
pub fn phase_safe(variant: Variant, ctx: PhaseContext) -> bool {
    let mirrored_compute = matches!(
        ctx.round,
        RoundLabel::Init | RoundLabel::P | RoundLabel::G | RoundLabel::C
    ) && ctx.phase == ComputePhase::Compute;
    let mirrored_uncompute = matches!(
        ctx.round,
        RoundLabel::InvP | RoundLabel::InvG | RoundLabel::InvC | RoundLabel::InvInit
    ) && ctx.phase == ComputePhase::Uncompute;
    match variant {
        Variant::St | Variant::Plain => true,
        Variant::Grt | Variant::PgrtFirst => ctx.target_initial_zero,
        Variant::Igrt => ctx.phase == ComputePhase::Uncompute,
        Variant::PgrtSecond => true,
        Variant::Rt3 | Variant::Rt4 => mirrored_compute,
        Variant::Irt3 | Variant::Irt4 => mirrored_uncompute,
    }
}

/// How inverse relative-phase Toffolis are realized at the primitive level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UncomputeMode {
    /// Full inverse template.
    UnitaryUncompute,
    /// X-basis measurement plus classically conditioned CZ.
    MeasurementUncompute,
}

fn instantiate(
    template: &[TemplateGate],
    wires: &[WireId],
    round: RoundLabel,
    seg: Segment,
    out: &mut Vec<Block>,
) {
    for g in template {
        let block = match *g {
            TemplateGate::H(w) => Block::new(BlockKind::H, vec![wires[w]], round, seg),
            TemplateGate::S(w) => Block::new(BlockKind::S, vec![wires[w]], round, seg),
            TemplateGate::Sdg(w) => Block::new(BlockKind::Sdg, vec![wires[w]], round, seg),
            TemplateGate::T(w) => Block::new(BlockKind::T, vec![wires[w]], round, seg),
            TemplateGate::Tdg(w) => Block::new(BlockKind::Tdg, vec![wires[w]], round, seg),
            TemplateGate::Cx(c, t) => {
                Block::new(BlockKind::Cnot, vec![wires[c], wires[t]], round, seg)
            }
        };
        out.push(block);
    }
}

fn emit_igrt(
    controls: (WireId, WireId),
    anc: WireId,
    mode: UncomputeMode,
    round: RoundLabel,
    seg: Segment,
    next_classical: &mut usize,
    out: &mut Vec<Block>,
) {
    match mode {
        UncomputeMode::UnitaryUncompute => {
            instantiate(
                &inverse_template(GRT_TEMPLATE),
                &[controls.0, controls.1, anc],
                round,
                seg,
                out,
            );
        }
        UncomputeMode::MeasurementUncompute => {
            let bit = *next_classical;
            *next_classical += 1;
            out.push(Block::new(BlockKind::H, vec![anc], round, seg));
            let mut meas = Block::new(BlockKind::MeasureX, vec![anc], round, seg);
            meas.meas_bit = Some(bit);
            out.push(meas);
            let mut cz = Block::new(BlockKind::Cz, vec![controls.0, controls.1], round, seg);
            cz.cond_bit = Some(bit);
            out.push(cz);
        }
    }
}

/// Primitive blocks realizing one Toffoli-variant block.
///
/// `next_classical` supplies classical bit indices for measurement-assisted
/// uncomputation and is advanced as bits are consumed.
pub fn expand_block(
    block: &Block,
    mode: UncomputeMode,
    next_classical: &mut usize,
) -> Result<Vec<Block>> {
    if block.kind != BlockKind::Toffoli {
        return Ok(vec![block.clone()]);
    }
    let variant = block.variant.unwrap_or(Variant::Plain);
    let want = if variant == Variant::PgrtSecond { 4 } else { 3 };
    if block.wires.len() != want {
        return Err(Error::WrongArity {
            kind: format!("toffoli variant {variant}"),
            want,
            got: block.wires.len(),
        });
    }
    let mut out = Vec::new();
    match variant {
        Variant::Igrt => {
            if mode == UncomputeMode::MeasurementUncompute {
                emit_igrt(
                    (block.wires[0], block.wires[1]),
                    block.wires[2],
                    mode,
                    block.round,
                    block.seg,
                    next_classical,
                    &mut out,
                );
            } else {
                instantiate(
                    &inverse_template(GRT_TEMPLATE),
                    &block.wires,
                    block.round,
                    block.seg,
                    &mut out,
                );
            }
        }
        Variant::PgrtFirst => {
            // GRT computing the AND of the controls onto the ancilla.
            instantiate(GRT_TEMPLATE, &block.wires, block.round, block.seg, &mut out);
        }
        Variant::PgrtSecond => {
            // Copy the ancilla into the carry target, then uncompute it.
            let (c1, c2, anc, t) = (
                block.wires[0],
                block.wires[1],
                block.wires[2],
                block.wires[3],
            );
            out.push(Block::new(
                BlockKind::Cnot,
                vec![anc, t],
                block.round,
                block.seg,
            ));
            emit_igrt(
                (c1, c2),
                anc,
                mode,
                block.round,
                block.seg,
                next_classical,
                &mut out,
            );
        }
        other => {
            let tmpl = template(other).expect("standalone variants have templates");
            instantiate(&tmpl, &block.wires, block.round, block.seg, &mut out);
        }
    }
    Ok(out)
}

/// Primitive-level copy of `circuit`: every Toffoli-variant block replaced
/// by its template under the given uncompute mode.
pub fn expand(circuit: &Circuit, mode: UncomputeMode) -> Result<Circuit> {
    let mut out = circuit.clone();
    out.blocks = Vec::with_capacity(circuit.blocks.len() * 4);
    let mut next_classical = circuit.n_classical;
    for block in &circuit.blocks {
        out.blocks
            .extend(expand_block(block, mode, &mut next_classical)?);
    }
    out.n_classical = next_classical;
    Ok(out)
}

/// Dense 8x8 matrix of a 3-wire template (wire 0 is the most significant
/// bit of the basis index).
pub fn template_dense(template: &[TemplateGate]) -> [[Complex64; 8]; 8] {
    let mut m = identity8();
    for g in template {
        let gm = gate_dense(*g);
        m = matmul(&gm, &m);
    }
    m
}

fn identity8() -> [[Complex64; 8]; 8] {
    let mut m = [[Complex64::ZERO; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::ONE;
    }
    m
}

fn matmul(a: &[[Complex64; 8]; 8], b: &[[Complex64; 8]; 8]) -> [[Complex64; 8]; 8] {
    let mut m = [[Complex64::ZERO; 8]; 8];
    for i in 0..8 {
        for k in 0..8 {
            if a[i][k] == Complex64::ZERO {
                continue;
            }
            for j in 0..8 {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

fn bit_of(index: usize, wire: usize) -> usize {
    (index >> (2 - wire)) & 1
}

fn gate_dense(g: TemplateGate) -> [[Complex64; 8]; 8] {
    let mut m = [[Complex64::ZERO; 8]; 8];
    match g {
        TemplateGate::Cx(c, t) => {
            for (i, row) in m.iter_mut().enumerate() {
                let j = if bit_of(i, c) == 1 {
                    i ^ (1 << (2 - t))
                } else {
                    i
                };
                row[j] = Complex64::ONE;
            }
        }
        TemplateGate::H(w) => {
            let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            for (i, row) in m.iter_mut().enumerate() {
                let flipped = i ^ (1 << (2 - w));
                row[i] = if bit_of(i, w) == 1 { -s } else { s };
                row[flipped] = s;
            }
        }
        TemplateGate::S(w) | TemplateGate::Sdg(w) | TemplateGate::T(w) | TemplateGate::Tdg(w) => {
            let p = match g {
                TemplateGate::S(_) => 2,
                TemplateGate::Sdg(_) => 6,
                TemplateGate::T(_) => 1,
                TemplateGate::Tdg(_) => 7,
                _ => unreachable!(),
            };
            for (j, row) in m.iter_mut().enumerate() {
                row[j] = if bit_of(j, w) == 1 {
                    omega(p)
                } else {
                    Complex64::ONE
                };
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    const MATRIX_VARIANTS: [Variant; 8] = [
        Variant::St,
        Variant::Plain,
        Variant::Grt,
        Variant::Igrt,
        Variant::Rt3,
        Variant::Irt3,
        Variant::Rt4,
        Variant::Irt4,
    ];

    fn max_entry_diff(a: &[[Complex64; 8]; 8], b: &[[Complex64; 8]; 8]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..8 {
            for j in 0..8 {
                worst = worst.max((a[i][j] - b[i][j]).norm());
            }
        }
        worst
    }

    #[test]
    fn template_gate_budgets() {
        let tally = |tmpl: &[TemplateGate]| {
            let mut t = 0;
            let mut cx = 0;
            let mut h = 0;
            let mut s = 0;
            for g in tmpl {
                match g {
                    TemplateGate::T(_) | TemplateGate::Tdg(_) => t += 1,
                    TemplateGate::Cx(..) => cx += 1,
                    TemplateGate::H(_) => h += 1,
                    TemplateGate::S(_) | TemplateGate::Sdg(_) => s += 1,
                }
            }
            (t, cx, h, s)
        };
        assert_eq!(tally(ST_TEMPLATE), (7, 6, 2, 1));
        assert_eq!(tally(GRT_TEMPLATE), (4, 6, 2, 1));
        assert_eq!(tally(RT3_TEMPLATE), (4, 3, 2, 0));
        assert_eq!(tally(RT4_TEMPLATE), (4, 4, 2, 0));
    }

    #[test]
    fn templates_match_matrices() {
        for v in MATRIX_VARIANTS {
            let tmpl = template(v).unwrap();
            let diff = max_entry_diff(
                &template_dense(&tmpl),
                &variant_matrix(v).unwrap().to_dense(),
            );
            assert!(diff <= 1e-12, "{v}: max entry diff {diff}");
        }
    }

    #[test]
    fn st_is_exact_toffoli() {
        let m = variant_matrix(Variant::St).unwrap();
        assert_eq!(m.perm, TOFFOLI_PERM);
        assert_eq!(m.phase, [0; 8]);
        let dense = template_dense(ST_TEMPLATE);
        for (j, &row) in TOFFOLI_PERM.iter().enumerate() {
            assert!((dense[row][j] - Complex64::ONE).norm() <= 1e-12);
        }
    }

    #[test]
    fn grt_matrix_pins() {
        let dense = variant_matrix(Variant::Grt).unwrap().to_dense();
        // Column 7 maps to row 6 with phase -i.
        assert!((dense[6][7] - Complex64::new(0.0, -1.0)).norm() <= 1e-12);
        // Column 1 picks up +i.
        assert!((dense[1][1] - Complex64::new(0.0, 1.0)).norm() <= 1e-12);
    }

    #[test]
    fn inverse_pairs_cancel() {
        for (v, iv) in [
            (Variant::Grt, Variant::Igrt),
            (Variant::Rt3, Variant::Irt3),
            (Variant::Rt4, Variant::Irt4),
        ] {
            let m = variant_matrix(v).unwrap();
            assert_eq!(variant_matrix(iv).unwrap(), m.inverse());
            for j in 0..8 {
                let (k, p) = m.apply(j);
                let (j2, q) = m.inverse().apply(k);
                assert_eq!(j2, j);
                assert_eq!((p + q) % 8, 0);
            }
        }
    }

    #[test]
    fn rt3_matrix_is_self_inverse() {
        let m = variant_matrix(Variant::Rt3).unwrap();
        assert_eq!(m.inverse(), m);
    }

    #[test]
    fn grt_exact_on_zero_target() {
        let m = variant_matrix(Variant::Grt).unwrap();
        for j in [0usize, 2, 4, 6] {
            let (k, p) = m.apply(j);
            assert_eq!(p, 0, "input {j} must keep phase 1");
            assert_eq!(k, TOFFOLI_PERM[j]);
        }
    }

    #[test]
    fn pgrt_halves_have_no_matrix() {
        assert!(matches!(
            variant_matrix(Variant::PgrtFirst),
            Err(Error::NoVariantMatrix(Variant::PgrtFirst))
        ));
        assert!(matches!(
            variant_matrix(Variant::PgrtSecond),
            Err(Error::NoVariantMatrix(Variant::PgrtSecond))
        ));
        assert!(template(Variant::PgrtFirst).is_none());
    }

    #[test]
    fn igrt_measurement_pattern() {
        let mut block = Block::new(
            BlockKind::Toffoli,
            vec![4, 5, 6],
            RoundLabel::InvG,
            Segment::CompFirst,
        );
        block.variant = Some(Variant::Igrt);
        let mut bits = 0usize;
        let out = expand_block(&block, UncomputeMode::MeasurementUncompute, &mut bits).unwrap();
        assert_eq!(bits, 1);
        assert_eq!(out.len(), 3);
        assert_eq!(out[0].kind, BlockKind::H);
        assert_eq!(out[0].wires, vec![6]);
        assert_eq!(out[1].kind, BlockKind::MeasureX);
        assert_eq!(out[1].meas_bit, Some(0));
        assert_eq!(out[2].kind, BlockKind::Cz);
        assert_eq!(out[2].wires, vec![4, 5]);
        assert_eq!(out[2].cond_bit, Some(0));
    }

    #[test]
    fn pgrt_pair_primitive_costs() {
        // A full pair at primitive level costs 8 two-qubit gates in
        // measurement mode: 6 CNOTs inside the compute half, the copy CNOT,
        // and the conditioned CZ.
        let mut first = Block::new(
            BlockKind::Toffoli,
            vec![0, 1, 9],
            RoundLabel::G,
            Segment::Adder,
        );
        first.variant = Some(Variant::PgrtFirst);
        let mut second = first.clone();
        second.variant = Some(Variant::PgrtSecond);
        second.wires = vec![0, 1, 9, 2];
        let mut bits = 0usize;
        let mut blocks =
            expand_block(&first, UncomputeMode::MeasurementUncompute, &mut bits).unwrap();
        blocks
            .extend(expand_block(&second, UncomputeMode::MeasurementUncompute, &mut bits).unwrap());
        let two_qubit = blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::Cnot | BlockKind::Cz))
            .count();
        assert_eq!(two_qubit, 8);
        let t_count = blocks
            .iter()
            .filter(|b| matches!(b.kind, BlockKind::T | BlockKind::Tdg))
            .count();
        assert_eq!(t_count, 4);
    }

    #[test]
    fn phase_safety_rules() {
        let ctx = |round, tiz| PhaseContext::for_round(round, tiz);
        assert!(phase_safe(Variant::Grt, ctx(RoundLabel::Init, true)));
        assert!(!phase_safe(Variant::Grt, ctx(RoundLabel::Init, false)));
        assert!(phase_safe(Variant::Rt3, ctx(RoundLabel::G, false)));
        assert!(!phase_safe(Variant::Rt3, ctx(RoundLabel::Middle, false)));
        assert!(!phase_safe(Variant::Rt3, ctx(RoundLabel::InvG, false)));
        assert!(phase_safe(Variant::Irt3, ctx(RoundLabel::InvG, false)));
        assert!(phase_safe(Variant::Irt4, ctx(RoundLabel::InvInit, false)));
        assert!(!phase_safe(Variant::Igrt, ctx(RoundLabel::G, false)));
        assert!(phase_safe(Variant::Igrt, ctx(RoundLabel::InvP, false)));
        assert!(phase_safe(Variant::St, ctx(RoundLabel::Middle, false)));
    }

    #[test]
    fn validity_classes() {
        assert_eq!(validity(Variant::St), Validity::AlwaysPhaseExact);
        assert_eq!(validity(Variant::Grt), Validity::TargetZero);
        assert_eq!(validity(Variant::PgrtSecond), Validity::PairedUncompute);
        assert_eq!(validity(Variant::Rt4), Validity::RelativePhaseSafe);
    }

    #[test]
    fn phase_tables_match_template_matrices() {
        // The stored permutation/phase pairs are re-derivable from the dense
        // template products, so the two representations cannot drift apart.
        for v in MATRIX_VARIANTS {
            let dense = template_dense(&template(v).unwrap());
            let m = variant_matrix(v).unwrap();
            for (j, (row, p)) in (0..8).map(|c| m.apply(c)).enumerate() {
                assert!((dense[row][j] - omega(p)).norm() <= 1e-12, "{v} column {j}");
            }
        }
    }
}
