//! CSV and JSON emission for coherence profiles.
//!
//! Both formats print every float through the same 12-decimal formatter, so
//! the JSON numerals are string-identical to the CSV fields. Output is
//! byte-deterministic with LF line endings.

use crate::circuit::CoherenceProfile;

/// Fixed-point float format shared by every emitter. Negative zero prints
/// as plain zero.
pub fn format_value(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.12}")
}

/// CSV with header `stage_index,label,total_coherence,is_post_measurement,q0,...,q{n-1}`.
pub fn profile_to_csv(profile: &CoherenceProfile) -> String {
    let mut out = String::from("stage_index,label,total_coherence,is_post_measurement");
    for q in 0..profile.qubit_count {
        out.push_str(&format!(",q{q}"));
    }
    out.push('\n');
    for stage in &profile.stages {
        out.push_str(&format!(
            "{},{},{},{}",
            stage.index,
            csv_field(&stage.label),
            format_value(stage.total_coherence),
            stage.is_post_measurement
        ));
        for value in &stage.per_qubit {
            out.push(',');
            out.push_str(&format_value(*value));
        }
        out.push('\n');
    }
    out
}

fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

/// JSON document carrying the same numbers as the CSV (identical formatted
/// numerals). The shape is described by `schema/profile.schema.json`.
pub fn profile_to_json(profile: &CoherenceProfile) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"qubit_count\": {},\n", profile.qubit_count));
    out.push_str(&format!(
        "  \"peak\": {{ \"stage_index\": {}, \"total_coherence\": {} }},\n",
        profile.peak.0,
        format_value(profile.peak.1)
    ));
    out.push_str("  \"stages\": [\n");
    for (i, stage) in profile.stages.iter().enumerate() {
        let per_qubit: Vec<String> = stage.per_qubit.iter().map(|v| format_value(*v)).collect();
        out.push_str(&format!(
            "    {{ \"index\": {}, \"label\": {}, \"total_coherence\": {}, \"is_post_measurement\": {}, \"per_qubit\": [{}] }}{}\n",
            stage.index,
            json_string(&stage.label),
            format_value(stage.total_coherence),
            stage.is_post_measurement,
            per_qubit.join(", "),
            if i + 1 == profile.stages.len() { "" } else { "," }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

fn json_string(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for ch in text.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{simulate_profile, Circuit, CircuitElement, GateKind};
    use crate::state::QuantumState;

    fn sample_profile() -> CoherenceProfile {
        let circuit = Circuit::new(
            2,
            vec![
                CircuitElement::gate(GateKind::H, &[0]),
                CircuitElement::stage("h"),
                CircuitElement::measure(&[0]),
                CircuitElement::stage("m"),
            ],
        )
        .unwrap();
        simulate_profile(&circuit, &QuantumState::zero_state(2)).unwrap()
    }

    #[test]
    fn csv_has_stable_header_and_values() {
        let csv = profile_to_csv(&sample_profile());
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "stage_index,label,total_coherence,is_post_measurement,q0,q1"
        );
        assert_eq!(
            lines.next().unwrap(),
            "0,init,0.000000000000,false,0.000000000000,0.000000000000"
        );
        assert_eq!(
            lines.next().unwrap(),
            "1,h,1.000000000000,false,1.000000000000,0.000000000000"
        );
        assert_eq!(
            lines.next().unwrap(),
            "2,m,0.000000000000,true,0.000000000000,0.000000000000"
        );
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn json_numerals_match_csv_fields() {
        let profile = sample_profile();
        let csv = profile_to_csv(&profile);
        let json = profile_to_json(&profile);
        for value in ["0.000000000000", "1.000000000000"] {
            assert!(csv.contains(value));
            assert!(json.contains(value));
        }
        assert!(
            json.contains("\"peak\": { \"stage_index\": 1, \"total_coherence\": 1.000000000000 }")
        );
    }

    #[test]
    fn csv_quotes_awkward_labels() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn json_escapes_labels() {
        assert_eq!(json_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
