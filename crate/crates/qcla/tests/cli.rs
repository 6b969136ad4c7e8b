//! End-to-end checks of the command-line interface: output formats, exit
//! codes, determinism, and seed resolution.

use std::process::{Command, Output};

use num_bigint::BigUint;
use qcla::decomp::UncomputeMode;
use qcla::modadd::{synth_modadd, Instance};
use qcla::qasm::parse_qasm;
use qcla::resource::{optimal_t_width, DEFAULT_CG};
use qcla::strategy::{lower_blocks, Strategy};

fn qcla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcla"))
        .args(args)
        .env_remove("QCLA_SEED")
        .env_remove("QCLA_LOG")
        .output()
        .expect("binary runs")
}

fn qcla_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcla"))
        .args(args)
        .env_remove("QCLA_SEED")
        .env_remove("QCLA_LOG")
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(out)).expect("valid json on stdout")
}

#[test]
fn synth_round_trips_and_is_deterministic() {
    let args = [
        "synth",
        "--n",
        "4",
        "--modulus",
        "13",
        "--addend",
        "7",
        "--level",
        "block",
    ];
    let out = qcla(&args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let parsed = parse_qasm(&stdout(&out)).unwrap();
    let inst = Instance::new(4, BigUint::from(13u8), BigUint::from(7u8)).unwrap();
    let want = lower_blocks(
        &synth_modadd(&inst).unwrap(),
        Strategy::OursFtq,
        UncomputeMode::MeasurementUncompute,
    )
    .unwrap();
    assert_eq!(parsed, want);
    assert_eq!(
        out.stdout,
        qcla(&args).stdout,
        "synth must be deterministic"
    );
}

#[test]
fn synth_emits_primitive_qasm_and_json() {
    let out = qcla(&[
        "synth",
        "--n",
        "3",
        "--modulus",
        "5",
        "--addend",
        "3",
        "--strategy",
        "ours-nisq",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("OPENQASM 2.0;"));
    assert!(
        !text.contains("// tof"),
        "primitive output has no block pseudo-ops"
    );

    let out = qcla(&[
        "synth",
        "--n",
        "3",
        "--modulus",
        "5",
        "--addend",
        "3",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["n"], 3);
    assert!(!v["blocks"].as_array().unwrap().is_empty());
}

#[test]
fn verify_passes_and_fault_injection_fails() {
    let ok = qcla(&["verify", "--n", "4", "--modulus", "13", "--addend", "7"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json(&ok);
    assert_eq!(v["pass"], true);
    assert_eq!(v["cases"], 26);
    assert!(v["counterexample"].is_null());

    let bad = qcla(&[
        "verify",
        "--n",
        "4",
        "--modulus",
        "13",
        "--addend",
        "7",
        "--drop-block",
        "0",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let v = json(&bad);
    assert_eq!(v["pass"], false);
    assert!(v["counterexample"].is_object());
    assert_eq!(v["rng"], "chacha8");
}

#[test]
fn verify_sampled_large_width() {
    let out = qcla(&[
        "verify",
        "--n",
        "8",
        "--strategy",
        "ours-nisq",
        "--samples",
        "1000",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert_eq!(json(&out)["cases"], 1000);
}

#[test]
fn usage_errors_exit_two() {
    let missing_addend = qcla(&["verify", "--n", "4", "--modulus", "13"]);
    assert_eq!(missing_addend.status.code(), Some(2));

    let bad_strategy = qcla(&["report", "--n", "4", "--strategy", "bogus"]);
    assert_eq!(bad_strategy.status.code(), Some(2));

    let zero_width = qcla(&["synth", "--n", "0"]);
    assert_eq!(zero_width.status.code(), Some(2));

    let wrong_format = qcla(&[
        "report",
        "--n",
        "4",
        "--modulus",
        "13",
        "--addend",
        "7",
        "--format",
        "qasm",
    ]);
    assert_eq!(wrong_format.status.code(), Some(2));

    let bad_env = qcla_with_env(&["report", "--n", "4"], "QCLA_SEED", "not-a-number");
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn report_csv_has_the_pinned_columns() {
    let out = qcla(&[
        "report",
        "--n",
        "8",
        "--modulus",
        "201",
        "--addend",
        "77",
        "--strategy",
        "ours-nisq",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("round,gate,cost,count,depth"));
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "bad row: {line}");
        fields[3].parse::<usize>().expect("count is integer");
        fields[4].parse::<usize>().expect("depth is integer");
    }
    for round in [
        "INIT", "P", "G", "C", "MIDDLE", "INV_P", "CALC_SUM", "PE", "EMBED",
    ] {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("{round},"))),
            "missing round row {round}"
        );
    }
}

#[test]
fn report_json_embeds_provenance() {
    let out = qcla(&[
        "report",
        "--n",
        "8",
        "--modulus",
        "201",
        "--addend",
        "77",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["schema"], "qcla-report-v1");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["strategy"], "ours-ftq");
    assert_eq!(v["instance"]["n"], 8);
    assert_eq!(v["instance"]["modulus"], "201");
    assert_eq!(v["instance"]["addend"], "77");
    assert_eq!(v["seed"], 5);
    assert!(v["perRound"].as_array().unwrap().len() > 10);
    assert_eq!(
        v["kqT"].as_u64().unwrap(),
        v["qubitCount"].as_u64().unwrap() * v["tDepth"].as_u64().unwrap()
    );
}

#[test]
fn reference_model_report() {
    let out = qcla(&[
        "report",
        "--n",
        "64",
        "--modulus",
        "201",
        "--addend",
        "77",
        "--strategy",
        "vmi",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["model"], true);
    assert_eq!(v["strategy"], "vanmeter-itoh-ref");
    assert_eq!(v["reference"]["tCount"].as_f64().unwrap(), 210.0 * 64.0);
    assert_eq!(v["reference"]["qubitCount"].as_f64().unwrap(), 256.0);
}

#[test]
fn sweep_kqt_marks_the_model_optimum() {
    let out = qcla(&[
        "sweep-kqt",
        "--n",
        "64",
        "--n-t-min",
        "1",
        "--n-t-max",
        "64",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,n_T,model_t_depth,scheduled_t_depth,kq_t,optimum")
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 64);
    let optima: Vec<&Vec<String>> = rows.iter().filter(|r| r[5] == "true").collect();
    assert_eq!(optima.len(), 1);
    assert_eq!(
        optima[0][1].parse::<usize>().unwrap(),
        optimal_t_width(64, DEFAULT_CG)
    );
    // The modeled KQ_T column is unimodal in n_T.
    let kq: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    let argmin = kq
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    assert!(kq[..argmin].windows(2).all(|w| w[0] >= w[1]));
    assert!(kq[argmin..].windows(2).all(|w| w[0] <= w[1]));
    // Scheduled depth is non-increasing in the T-width budget.
    let sched: Vec<usize> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(sched.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn distill_report_summary() {
    let out = qcla(&["distill-report"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["qubitCount"], 15);
    assert_eq!(v["cnotCount"], 34);
    assert_eq!(v["depth"], 6);
}

#[test]
fn seed_resolution_order() {
    let env_seed = qcla_with_env(&["report", "--n", "6"], "QCLA_SEED", "9");
    let flag_seed = qcla(&["report", "--n", "6", "--seed", "9"]);
    assert_eq!(
        env_seed.stdout, flag_seed.stdout,
        "env seed matches flag seed"
    );

    let flag_beats_env = qcla_with_env(&["report", "--n", "6", "--seed", "4"], "QCLA_SEED", "9");
    assert_eq!(json(&flag_beats_env)["seed"], 4);

    let default_seed = qcla(&["report", "--n", "6"]);
    assert_eq!(json(&default_seed)["seed"], 0);
}
