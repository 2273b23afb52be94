//! WebAssembly bindings for the interactive demo page.
//!
//! Three operations back the page: a stage-resolved teleportation profile
//! with adjustable message angle and Werner resource quality, the Bloch
//! angle sweep of the message-dependent coherence term, and the W/GHZ
//! coherence scaling curves. Every function returns a JSON string; errors
//! come back as `{"error": "..."}` so the page can surface them.

use wasm_bindgen::prelude::wasm_bindgen;

use cohsim_core::protocols::{build_teleportation, prepare_ghz, prepare_w, BlochState};
use cohsim_core::report::{format_value, profile_to_json};
use cohsim_core::state::{compose, QuantumState};

fn error_json(message: &str) -> String {
    let escaped: String = message
        .chars()
        .map(|c| match c {
            '"' => "\\\"".to_string(),
            '\\' => "\\\\".to_string(),
            c if (c as u32) < 0x20 => format!("\\u{:04x}", c as u32),
            c => c.to_string(),
        })
        .collect();
    format!("{{\"error\": \"{escaped}\"}}")
}

/// Teleportation profile payload shared by the wasm export and host tests.
pub fn teleport_profile_payload(
    theta: f64,
    gamma: f64,
    n_gadgets: usize,
    werner: f64,
) -> Result<String, String> {
    if n_gadgets == 0 || n_gadgets > 3 {
        return Err("gadget count must be between 1 and 3".into());
    }
    let bloch = BlochState::new(theta, gamma).map_err(|e| e.to_string())?;
    let part = bloch.state();
    let positions: Vec<[usize; 1]> = (0..n_gadgets).map(|q| [q]).collect();
    let refs: Vec<(&QuantumState, &[usize])> =
        positions.iter().map(|p| (&part, p.as_slice())).collect();
    let message = compose(&refs, n_gadgets).map_err(|e| e.to_string())?;
    let run = build_teleportation(n_gadgets, &message, werner).map_err(|e| e.to_string())?;
    let profile = run.profile().map_err(|e| e.to_string())?;
    // Wrap the profile with the budget context the page displays.
    let mut out = String::from("{\n");
    out.push_str(&format!(
        "  \"budget_bound\": {},\n  \"message_coherence\": {},\n  \"profile\": ",
        format_value(run.ledger.peak_bound()),
        format_value(run.ledger.message_coherence),
    ));
    out.push_str(&profile_to_json(&profile));
    out.push_str("}\n");
    Ok(out)
}

/// Message-term sweep payload: `peak(phi) - 2n` over a phi grid.
pub fn angle_sweep_payload(points: usize) -> Result<String, String> {
    if !(2..=257).contains(&points) {
        return Err("points must be between 2 and 257".into());
    }
    let mut phis = Vec::with_capacity(points);
    let mut peaks = Vec::with_capacity(points);
    let mut terms = Vec::with_capacity(points);
    for i in 0..points {
        let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (points - 1) as f64;
        let message = QuantumState::bloch(2.0 * phi, 0.0);
        let run = build_teleportation(1, &message, 1.0).map_err(|e| e.to_string())?;
        let peak = run.profile().map_err(|e| e.to_string())?.peak.1;
        phis.push(format_value(phi));
        peaks.push(format_value(peak));
        terms.push(format_value(peak - 2.0));
    }
    Ok(format!(
        "{{\n  \"phi\": [{}],\n  \"peak\": [{}],\n  \"message_term\": [{}]\n}}\n",
        phis.join(", "),
        peaks.join(", "),
        terms.join(", ")
    ))
}

/// W/GHZ coherence scaling payload for n = 2..=max_n.
pub fn state_scaling_payload(max_n: usize) -> Result<String, String> {
    if !(2..=12).contains(&max_n) {
        return Err("max_n must be between 2 and 12".into());
    }
    let mut sizes = Vec::new();
    let mut w = Vec::new();
    let mut ghz = Vec::new();
    for n in 2..=max_n {
        sizes.push(n.to_string());
        let w_state = prepare_w(n).map_err(|e| e.to_string())?;
        w.push(format_value(
            w_state
                .relative_entropy_of_coherence()
                .map_err(|e| e.to_string())?,
        ));
        let ghz_state = prepare_ghz(n).map_err(|e| e.to_string())?;
        ghz.push(format_value(
            ghz_state
                .relative_entropy_of_coherence()
                .map_err(|e| e.to_string())?,
        ));
    }
    Ok(format!(
        "{{\n  \"n\": [{}],\n  \"w\": [{}],\n  \"ghz\": [{}]\n}}\n",
        sizes.join(", "),
        w.join(", "),
        ghz.join(", ")
    ))
}

/// Stage-resolved teleportation profile as JSON.
#[wasm_bindgen]
pub fn teleport_profile(theta: f64, gamma: f64, n_gadgets: usize, werner: f64) -> String {
    teleport_profile_payload(theta, gamma, n_gadgets, werner).unwrap_or_else(|e| error_json(&e))
}

/// Message-dependent coherence term over a Bloch-angle grid, as JSON.
#[wasm_bindgen]
pub fn angle_sweep(points: usize) -> String {
    angle_sweep_payload(points).unwrap_or_else(|e| error_json(&e))
}

/// W/GHZ coherence scaling curves, as JSON.
#[wasm_bindgen]
pub fn state_scaling(max_n: usize) -> String {
    state_scaling_payload(max_n).unwrap_or_else(|e| error_json(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn teleport_payload_carries_profile_and_budget() {
        let json = teleport_profile_payload(0.0, 0.0, 1, 1.0).unwrap();
        assert!(json.contains("\"budget_bound\": 3.000000000000"));
        assert!(json.contains("\"total_coherence\": 2.000000000000"));
        assert!(json.contains("\"stages\""));
    }

    #[test]
    fn angle_sweep_payload_hits_known_endpoints() {
        let json = angle_sweep_payload(3).unwrap();
        assert!(json.contains("\"message_term\": [0.000000000000, 1.000000000000, 0.000000000000]"));
    }

    #[test]
    fn state_scaling_payload_tracks_log2() {
        let json = state_scaling_payload(4).unwrap();
        assert!(json.contains("\"n\": [2, 3, 4]"));
        assert!(json.contains("2.000000000000"));
        assert!(json.contains("\"ghz\": [1.000000000000, 1.000000000000, 1.000000000000]"));
    }

    #[test]
    fn payloads_are_valid_json() {
        for payload in [
            teleport_profile_payload(1.1, 0.4, 2, 0.8).unwrap(),
            angle_sweep_payload(9).unwrap(),
            state_scaling_payload(6).unwrap(),
            teleport_profile(0.0, 0.0, 0, 1.0),
        ] {
            let parsed: std::result::Result<serde_json::Value, _> = serde_json::from_str(&payload);
            assert!(parsed.is_ok(), "invalid JSON: {payload}");
        }
        let doc: serde_json::Value =
            serde_json::from_str(&teleport_profile_payload(0.5, 0.0, 1, 1.0).unwrap()).unwrap();
        assert!(doc["profile"]["stages"].as_array().unwrap().len() == 7);
        assert!(doc["budget_bound"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn errors_surface_as_json() {
        assert!(teleport_profile(0.0, 0.0, 0, 1.0).starts_with("{\"error\""));
        assert!(angle_sweep(1).starts_with("{\"error\""));
        assert!(state_scaling(1).starts_with("{\"error\""));
        assert!(teleport_profile(0.0, 0.0, 1, 1.5).starts_with("{\"error\""));
    }
}
