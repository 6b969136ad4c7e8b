//! Property-based checks of pipeline invariants: the adder and comparator
//! oracles at random widths and inputs, full-stack modular addition under
//! every lowerable strategy, serializer round-trips, and scheduler
//! monotonicity.

use std::sync::OnceLock;

use num_bigint::BigUint;
use proptest::prelude::*;

use qcla::cla::{synth_adder, synth_comparator_skeleton, CompSense};
use qcla::decomp::UncomputeMode;
use qcla::ir::{metric_depth, Metric};
use qcla::modadd::{synth_modadd, Instance};
use qcla::qasm::{export_qasm, parse_qasm};
use qcla::resource::schedule_t_width;
use qcla::sim::{run_monomial, verify_circuit, VerifyOptions, VerifyScope};
use qcla::strategy::{lower, lower_blocks, Strategy as Strat};
use qcla::Circuit;

const LOWERABLE: [Strat; 5] = [
    Strat::DraperSt,
    Strat::ThapliyalQubitOpt,
    Strat::ThapliyalTOpt,
    Strat::OursFtq,
    Strat::OursNisq,
];

fn arb_instance(max_n: usize) -> impl Strategy<Value = Instance> {
    (1usize..=max_n)
        .prop_flat_map(|n| (Just(n), 1u64..(1u64 << n)))
        .prop_flat_map(|(n, modulus)| (Just(n), Just(modulus), 0..modulus))
        .prop_map(|(n, modulus, addend)| {
            Instance::new(n, BigUint::from(modulus), BigUint::from(addend)).unwrap()
        })
}

fn ftq8() -> &'static Circuit {
    static CIRC: OnceLock<Circuit> = OnceLock::new();
    CIRC.get_or_init(|| {
        let inst = Instance::new(8, BigUint::from(201u8), BigUint::from(77u8)).unwrap();
        lower(
            &synth_modadd(&inst).unwrap(),
            Strat::OursFtq,
            UncomputeMode::MeasurementUncompute,
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adder_adds_with_carry_out(n in 1usize..=8, a in any::<u64>(), b in any::<u64>(), seed in any::<u64>()) {
        let mask = (1u64 << n) - 1;
        let (a, b) = (a & mask, b & mask);
        let circ = synth_adder(n).unwrap();
        let mut input = vec![0u8; circ.width()];
        for i in 0..n {
            input[circ.regs.d[i]] = ((a >> i) & 1) as u8;
            input[circ.regs.b[i]] = ((b >> i) & 1) as u8;
        }
        let state = run_monomial(&circ, &input, seed).unwrap();
        let mut sum = u64::from(state.bits[circ.regs.carry_wire(n)]) << n;
        for i in 0..n {
            sum |= u64::from(state.bits[circ.regs.b[i]]) << i;
            prop_assert_eq!(u64::from(state.bits[circ.regs.d[i]]), (a >> i) & 1);
        }
        prop_assert_eq!(sum, a + b);
        prop_assert_eq!(state.phase_exp, 0);
        for j in 1..n {
            prop_assert_eq!(state.bits[circ.regs.carry_wire(j)], 0);
        }
        for &w in &circ.regs.pfunc {
            prop_assert_eq!(state.bits[w], 0);
        }
    }

    #[test]
    fn comparator_computes_its_predicate(
        n in 1usize..=7,
        d in any::<u64>(),
        b in any::<u64>(),
        geq in any::<bool>(),
    ) {
        let mask = (1u64 << n) - 1;
        let (d, b) = (d & mask, b & mask);
        let sense = if geq { CompSense::Geq } else { CompSense::Lt };
        let circ = synth_comparator_skeleton(n, &BigUint::from(d), sense).unwrap();
        let mut input = vec![0u8; circ.width()];
        for i in 0..n {
            input[circ.regs.b[i]] = ((b >> i) & 1) as u8;
        }
        let state = run_monomial(&circ, &input, 0).unwrap();
        let want = if geq { b >= d } else { b < d };
        prop_assert_eq!(state.bits[circ.regs.comp] == 1, want);
        for i in 0..n {
            prop_assert_eq!(u64::from(state.bits[circ.regs.b[i]]), (b >> i) & 1);
        }
        for j in 1..=n {
            prop_assert_eq!(state.bits[circ.regs.carry_wire(j)], 0);
        }
        prop_assert_eq!(state.phase_exp, 0);
    }

    #[test]
    fn modular_addition_holds_under_every_strategy(
        inst in arb_instance(4),
        strat_idx in 0usize..LOWERABLE.len(),
        measure in any::<bool>(),
        run_seed in any::<u64>(),
    ) {
        let strategy = LOWERABLE[strat_idx];
        let mode = if measure {
            UncomputeMode::MeasurementUncompute
        } else {
            UncomputeMode::UnitaryUncompute
        };
        let circ = lower_blocks(&synth_modadd(&inst).unwrap(), strategy, mode).unwrap();
        let opts = VerifyOptions {
            scope: VerifyScope::Exhaustive,
            seed: 0,
            run_seeds: vec![run_seed],
        };
        let verdict = verify_circuit(&circ, &inst, &opts);
        prop_assert!(verdict.pass, "{:?}", verdict.counterexample);
    }

    #[test]
    fn qasm_round_trips_at_both_levels(
        inst in arb_instance(4),
        strat_idx in 0usize..LOWERABLE.len(),
        measure in any::<bool>(),
        primitive in any::<bool>(),
    ) {
        let strategy = LOWERABLE[strat_idx];
        let mode = if measure {
            UncomputeMode::MeasurementUncompute
        } else {
            UncomputeMode::UnitaryUncompute
        };
        let synthesized = synth_modadd(&inst).unwrap();
        let circ = if primitive {
            lower(&synthesized, strategy, mode).unwrap()
        } else {
            lower_blocks(&synthesized, strategy, mode).unwrap()
        };
        let parsed = parse_qasm(&export_qasm(&circ)).unwrap();
        prop_assert_eq!(parsed, circ);
    }

    #[test]
    fn schedule_is_monotone_in_t_width(a in 1usize..=120, b in 1usize..=120) {
        let circ = ftq8();
        let (lo, hi) = (a.min(b), a.max(b));
        let d_lo = schedule_t_width(circ, lo).unwrap();
        let d_hi = schedule_t_width(circ, hi).unwrap();
        prop_assert!(d_lo >= d_hi, "depth({lo})={d_lo} < depth({hi})={d_hi}");
        prop_assert!(d_hi >= metric_depth(circ, Metric::T).unwrap());
    }
}
