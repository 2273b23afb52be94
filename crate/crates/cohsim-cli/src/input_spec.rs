//! Per-qubit initializer parsing: `zero | one | plus | bloch(theta,gamma)`,
//! either one token broadcast to the register or a comma-separated list.

use cohsim_core::state::{compose, QuantumState};

use crate::Failure;

pub fn parse_input_state(spec: &str, qubit_count: usize) -> Result<QuantumState, Failure> {
    let tokens = split_top_level(spec);
    let parts: Vec<QuantumState> = if tokens.len() == 1 {
        let one = parse_single(&tokens[0])?;
        vec![one; qubit_count]
    } else {
        if tokens.len() != qubit_count {
            return Err(Failure::Diagnostics(format!(
                "input spec lists {} qubit(s) but the circuit has {qubit_count}",
                tokens.len()
            )));
        }
        tokens
            .iter()
            .map(|t| parse_single(t))
            .collect::<Result<_, _>>()?
    };
    let positions: Vec<[usize; 1]> = (0..qubit_count).map(|q| [q]).collect();
    let refs: Vec<(&QuantumState, &[usize])> = parts
        .iter()
        .zip(&positions)
        .map(|(p, pos)| (p, pos.as_slice()))
        .collect();
    compose(&refs, qubit_count).map_err(|e| Failure::Diagnostics(format!("input spec: {e}")))
}

/// Split on commas that are not inside `bloch(...)` parentheses.
fn split_top_level(spec: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in spec.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                tokens.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(ch),
        }
    }
    tokens.push(current.trim().to_string());
    tokens
}

fn parse_single(token: &str) -> Result<QuantumState, Failure> {
    let lower = token.to_ascii_lowercase();
    match lower.as_str() {
        "zero" | "0" => Ok(QuantumState::zero_state(1)),
        "one" | "1" => Ok(QuantumState::basis_state(1, 1)),
        "plus" | "+" => Ok(QuantumState::bloch(std::f64::consts::FRAC_PI_2, 0.0)),
        _ => {
            let inner = lower
                .strip_prefix("bloch(")
                .and_then(|rest| rest.strip_suffix(')'))
                .ok_or_else(|| {
                    Failure::Diagnostics(format!(
                        "unknown initializer '{token}' (expected zero, one, plus, or bloch(theta,gamma))"
                    ))
                })?;
            let mut angles = inner.split(',').map(str::trim);
            let theta: f64 = angles
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Failure::Diagnostics(format!("bad theta in '{token}'")))?;
            let gamma: f64 = angles
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Failure::Diagnostics(format!("bad gamma in '{token}'")))?;
            if angles.next().is_some() {
                return Err(Failure::Diagnostics(format!(
                    "too many angles in '{token}'"
                )));
            }
            if !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(Failure::Diagnostics(format!(
                    "theta {theta} outside [0, pi]"
                )));
            }
            if !(0.0..std::f64::consts::TAU).contains(&gamma) {
                return Err(Failure::Diagnostics(format!(
                    "gamma {gamma} outside [0, 2 pi)"
                )));
            }
            Ok(QuantumState::bloch(theta, gamma))
        }
    }
}
