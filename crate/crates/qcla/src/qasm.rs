//! QASM-2.0-subset serialization.
//!
//! Exports are deterministic and round-trip exactly: every gate line
//! carries a `// round=<label> seg=<section>` annotation, block-level
//! Toffolis are emitted as commented pseudo-ops, and one single-bit
//! classical register is declared per measurement so the classically
//! conditioned `if` statements keep standard semantics. Primitive exports
//! use only standard statements outside comments, so a conforming reader
//! can load them.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ir::{Block, BlockKind, Circuit, Role, RoundLabel, Segment, Variant, WireId};

fn role_prefix(role: Role) -> &'static str {
    match role {
        Role::Ctrl => "ctrl",
        Role::D => "d",
        Role::B => "b",
        Role::Carry => "carry",
        Role::Pfunc => "pfunc",
        Role::Comp => "comp",
        Role::Ancilla => "anc",
    }
}

const ROLE_ORDER: [&str; 7] = ["ctrl", "d", "b", "carry", "pfunc", "comp", "anc"];

/// Per-wire `role[index]` names, counting within each role in wire order.
fn wire_names(circ: &Circuit) -> Vec<String> {
    let mut counts: HashMap<&'static str, usize> = HashMap::new();
    circ.roles
        .iter()
        .map(|&role| {
            let prefix = role_prefix(role);
            let idx = counts.entry(prefix).or_insert(0);
            let name = format!("{prefix}[{idx}]");
            *idx += 1;
            name
        })
        .collect()
}

fn gate_name(kind: BlockKind) -> &'static str {
    match kind {
        BlockKind::X => "x",
        BlockKind::H => "h",
        BlockKind::S => "s",
        BlockKind::Sdg => "sdg",
        BlockKind::T => "t",
        BlockKind::Tdg => "tdg",
        BlockKind::Z => "z",
        BlockKind::Cnot => "cx",
        BlockKind::Cz => "cz",
        BlockKind::MeasureX => "measure",
        BlockKind::Toffoli => unreachable!("Toffoli blocks are exported as pseudo-ops"),
    }
}

/// Serializes a circuit (block or primitive level) as QASM-2.0-subset text.
pub fn export_qasm(circ: &Circuit) -> String {
    let names = wire_names(circ);
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(
        out,
        "// qcla circuit: n={} width={} classical={}",
        circ.n,
        circ.width(),
        circ.n_classical
    );
    let mut role_sizes: HashMap<&str, usize> = HashMap::new();
    for &role in &circ.roles {
        *role_sizes.entry(role_prefix(role)).or_insert(0) += 1;
    }
    for prefix in ROLE_ORDER {
        if let Some(&size) = role_sizes.get(prefix) {
            let _ = writeln!(out, "qreg {prefix}[{size}];");
        }
    }
    for bit in 0..circ.n_classical {
        let _ = writeln!(out, "creg m{bit}[1];");
    }
    for block in &circ.blocks {
        let args = block
            .wires
            .iter()
            .map(|&w| names[w].as_str())
            .collect::<Vec<_>>()
            .join(",");
        let tail = format!("round={} seg={}", block.round, block.seg);
        match block.kind {
            BlockKind::Toffoli => {
                let variant = block.variant.unwrap_or(Variant::Plain);
                let _ = writeln!(out, "// tof {variant} {args} {tail}");
            }
            BlockKind::MeasureX => {
                let bit = block.meas_bit.expect("measurement without classical bit");
                let _ = writeln!(out, "measure {args} -> m{bit}[0]; // {tail}");
            }
            kind => {
                let cond = match block.cond_bit {
                    Some(bit) => format!("if(m{bit}==1) "),
                    None => String::new(),
                };
                let _ = writeln!(out, "{cond}{} {args}; // {tail}", gate_name(kind));
            }
        }
    }
    out
}

fn perr(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

fn parse_usize(s: &str, line: usize, what: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| perr(line, format!("{what} is not a number: `{s}`")))
}

/// `key=value` lookup in a whitespace-separated token list.
fn field<'a>(tokens: &'a [&'a str], key: &str, line: usize) -> Result<&'a str> {
    tokens
        .iter()
        .find_map(|t| t.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| perr(line, format!("missing `{key}=` field")))
}

fn parse_annotation(tokens: &[&str], line: usize) -> Result<(RoundLabel, Segment)> {
    let round = field(tokens, "round", line)?
        .parse::<RoundLabel>()
        .map_err(|e| perr(line, e))?;
    let seg = field(tokens, "seg", line)?
        .parse::<Segment>()
        .map_err(|e| perr(line, e))?;
    Ok((round, seg))
}

fn parse_wire(names: &HashMap<String, WireId>, s: &str, line: usize) -> Result<WireId> {
    names
        .get(s)
        .copied()
        .ok_or_else(|| perr(line, format!("unknown wire `{s}`")))
}

fn parse_wire_list(names: &HashMap<String, WireId>, s: &str, line: usize) -> Result<Vec<WireId>> {
    s.split(',')
        .map(|w| parse_wire(names, w.trim(), line))
        .collect()
}

/// `m<bit>[0]` classical reference.
fn parse_creg(s: &str, line: usize) -> Result<usize> {
    let body = s
        .strip_prefix('m')
        .and_then(|r| r.strip_suffix("[0]"))
        .ok_or_else(|| perr(line, format!("malformed classical reference `{s}`")))?;
    parse_usize(body, line, "classical bit")
}

/// Parses text produced by [`export_qasm`] back into a circuit.
pub fn parse_qasm(text: &str) -> Result<Circuit> {
    let mut circ: Option<Circuit> = None;
    let mut names: HashMap<String, WireId> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty()
            || trimmed.starts_with("OPENQASM")
            || trimmed.starts_with("include")
            || trimmed.starts_with("qreg")
            || trimmed.starts_with("creg")
        {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("// qcla circuit:") {
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            let n = parse_usize(field(&tokens, "n", line)?, line, "width n")?;
            let width = parse_usize(field(&tokens, "width", line)?, line, "wire count")?;
            let classical =
                parse_usize(field(&tokens, "classical", line)?, line, "classical count")?;
            let mut c = Circuit::new(n).map_err(|e| perr(line, e.to_string()))?;
            if width < c.width() {
                return Err(perr(
                    line,
                    format!("width {width} is below the register minimum {}", c.width()),
                ));
            }
            for _ in c.width()..width {
                c.alloc_ancilla();
            }
            c.n_classical = classical;
            for (w, name) in wire_names(&c).into_iter().enumerate() {
                names.insert(name, w);
            }
            circ = Some(c);
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix("// tof ") {
            let circ = circ
                .as_mut()
                .ok_or_else(|| perr(line, "gate before circuit header"))?;
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            if tokens.len() < 2 {
                return Err(perr(line, "malformed toffoli pseudo-op"));
            }
            let variant = tokens[0].parse::<Variant>().map_err(|e| perr(line, e))?;
            let wires = parse_wire_list(&names, tokens[1], line)?;
            let (round, seg) = parse_annotation(&tokens, line)?;
            let want = if variant == Variant::PgrtSecond { 4 } else { 3 };
            if wires.len() != want {
                return Err(perr(
                    line,
                    format!(
                        "variant {variant} expects {want} wires, got {}",
                        wires.len()
                    ),
                ));
            }
            circ.push(Block::toffoli_variant(variant, wires, round, seg));
            continue;
        }
        if trimmed.starts_with("//") {
            continue;
        }

        let circ = circ
            .as_mut()
            .ok_or_else(|| perr(line, "gate before circuit header"))?;
        let (code, annot) = match trimmed.split_once("//") {
            Some((c, a)) => (c.trim(), a.trim()),
            None => return Err(perr(line, "gate line without round annotation")),
        };
        let annot_tokens: Vec<&str> = annot.split_whitespace().collect();
        let (round, seg) = parse_annotation(&annot_tokens, line)?;
        let code = code.strip_suffix(';').unwrap_or(code).trim();

        if let Some(rest) = code.strip_prefix("measure ") {
            let (wire_s, creg_s) = rest
                .split_once("->")
                .ok_or_else(|| perr(line, "malformed measure statement"))?;
            let w = parse_wire(&names, wire_s.trim(), line)?;
            let bit = parse_creg(creg_s.trim(), line)?;
            if bit >= circ.n_classical {
                return Err(perr(line, format!("classical bit {bit} out of range")));
            }
            let mut block = Block::new(BlockKind::MeasureX, vec![w], round, seg);
            block.meas_bit = Some(bit);
            circ.push(block);
            continue;
        }

        let (cond_bit, code) = match code.strip_prefix("if(") {
            Some(rest) => {
                let (cond, gate) = rest
                    .split_once(')')
                    .ok_or_else(|| perr(line, "malformed if statement"))?;
                let creg = cond
                    .strip_suffix("==1")
                    .ok_or_else(|| perr(line, "only `==1` conditions are supported"))?;
                let bit = parse_creg(&format!("{creg}[0]"), line)?;
                if bit >= circ.n_classical {
                    return Err(perr(line, format!("classical bit {bit} out of range")));
                }
                (Some(bit), gate.trim())
            }
            None => (None, code),
        };

        let (name, args_s) = code
            .split_once(' ')
            .ok_or_else(|| perr(line, format!("malformed gate statement `{code}`")))?;
        let kind = match name {
            "x" => BlockKind::X,
            "h" => BlockKind::H,
            "s" => BlockKind::S,
            "sdg" => BlockKind::Sdg,
            "t" => BlockKind::T,
            "tdg" => BlockKind::Tdg,
            "z" => BlockKind::Z,
            "cx" => BlockKind::Cnot,
            "cz" => BlockKind::Cz,
            other => return Err(perr(line, format!("unsupported gate `{other}`"))),
        };
        let wires = parse_wire_list(&names, args_s.trim(), line)?;
        let mut block = Block::new(kind, wires, round, seg);
        block.cond_bit = cond_bit;
        circ.push(block);
    }
    circ.ok_or_else(|| perr(0, "no circuit header found"))
}
