//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line with the measured residual. Randomized criteria use the
//! fixed seed 7 so the suite is reproducible byte for byte.

use cohsim_core::checks::{self, CheckOutcome, TOLERANCE};
use cohsim_core::circuit::simulate_stages;
use cohsim_core::dsl;
use cohsim_core::protocols::{
    build_swap, build_teleportation, repeater_run, RepeaterMode, RepeaterSchedule,
};
use cohsim_core::state::QuantumState;

const SEED: u64 = 7;

fn assert_outcome(criterion: &str, outcome: CheckOutcome) {
    println!(
        "{} criterion {criterion}: {}",
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.line()
    );
    assert!(
        outcome.passed,
        "criterion {criterion} failed: {}",
        outcome.line()
    );
}

#[test]
fn criterion_01_w_ghz_scaling() {
    assert_outcome("1", checks::check_w_ghz_scaling().unwrap());
}

#[test]
fn criterion_02_two_bit_offset() {
    assert_outcome("2", checks::check_two_bit_offset().unwrap());
}

#[test]
fn criterion_03_stage_profile_shape() {
    assert_outcome("3", checks::check_stage_profile().unwrap());
}

#[test]
fn criterion_04_reduced_coherences() {
    assert_outcome("4", checks::check_reduced_coherences(SEED).unwrap());
}

#[test]
fn criterion_05_scaling_law() {
    assert_outcome("5", checks::check_scaling_law(SEED).unwrap());
}

#[test]
fn criterion_06_stage_decomposition() {
    assert_outcome("6", checks::check_stage_decomposition(SEED).unwrap());
}

#[test]
fn criterion_07_additivity() {
    assert_outcome("7", checks::check_additivity(SEED).unwrap());
}

#[test]
fn criterion_08_branching_identity() {
    assert_outcome("8", checks::check_branching(SEED).unwrap());
}

#[test]
fn criterion_09_budget_bound() {
    assert_outcome("9", checks::check_budget(SEED).unwrap());
}

#[test]
fn criterion_10_holevo_invariance() {
    assert_outcome("10", checks::check_holevo().unwrap());
}

#[test]
fn criterion_11_dephasing_monotonicity() {
    assert_outcome("11", checks::check_dephasing_monotone(SEED).unwrap());
}

#[test]
fn criterion_12_swapping_benchmark() {
    assert_outcome("12", checks::check_swap_benchmark().unwrap());
}

#[test]
fn criterion_13_repeater_modes() {
    assert_outcome("13", checks::check_repeater().unwrap());
}

#[test]
fn criterion_14_angle_sweep() {
    assert_outcome("14", checks::check_angle_sweep().unwrap());
}

#[test]
fn criterion_15_werner_degradation() {
    assert_outcome("15", checks::check_werner_degradation(SEED).unwrap());
}

#[test]
fn criterion_16_dsl_roundtrip_and_fuzz() {
    assert_outcome("16", checks::check_dsl_roundtrip_fuzz(SEED).unwrap());
}

// Spot checks pinning the headline numbers independently of the check
// functions, straight from the builders.

#[test]
fn spot_check_teleportation_numbers() {
    let run = build_teleportation(1, &QuantumState::zero_state(1), 1.0).unwrap();
    let profile = run.profile().unwrap();
    assert_eq!(profile.peak.0, 4);
    assert!((profile.peak.1 - 2.0).abs() <= TOLERANCE);

    let three = build_teleportation(3, &QuantumState::zero_state(3), 1.0).unwrap();
    assert!((three.profile().unwrap().peak.1 - 6.0).abs() <= TOLERANCE);
}

#[test]
fn spot_check_swap_pre_measurement_state() {
    // The eight equal branches of the rotated double-Bell state, expanded
    // by hand in the computational basis (qubit order A, B, C, D).
    let run = build_swap().unwrap();
    let (_, states) = run.simulate().unwrap();
    let snapshot = &states[6].state;
    let amps = snapshot
        .amplitudes()
        .expect("still pure before measurement");
    let expected_magnitude = 1.0 / 8.0_f64.sqrt();
    let support = [
        (0b0000, 1.0),
        (0b0100, 1.0),
        (0b0011, 1.0),
        (0b0111, 1.0),
        (0b1010, 1.0),
        (0b1110, -1.0),
        (0b1001, 1.0),
        (0b1101, -1.0),
    ];
    for (idx, sign) in support {
        let amp = amps[idx];
        assert!(
            (amp.re - sign * expected_magnitude).abs() < 1e-12 && amp.im.abs() < 1e-12,
            "amplitude at {idx:04b} was {amp}"
        );
    }
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((snapshot.relative_entropy_of_coherence().unwrap() - 3.0).abs() <= TOLERANCE);
}

#[test]
fn spot_check_repeater_peaks() {
    let two = repeater_run(&RepeaterSchedule::new(2, RepeaterMode::Sequential).unwrap()).unwrap();
    let three = repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Sequential).unwrap()).unwrap();
    assert!((two.measured_peak - 3.0).abs() <= TOLERANCE);
    assert!((three.measured_peak - 3.0).abs() <= TOLERANCE);
    let parallel =
        repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Parallel(2)).unwrap()).unwrap();
    assert!((parallel.measured_peak - 5.0).abs() <= TOLERANCE);
    assert!((parallel.estimate - 7.0).abs() <= TOLERANCE);
}

#[test]
fn spot_check_builtin_circuits_are_file_artifacts() {
    // Every gate-only builder serializes to .qc and reparses identically.
    let teleport = build_teleportation(2, &QuantumState::zero_state(2), 1.0).unwrap();
    let text = dsl::serialize_circuit(&teleport.circuit);
    let reparsed = dsl::parse_circuit(&text).into_circuit().unwrap();
    assert_eq!(reparsed.elements, teleport.circuit.elements);
    let (original, _) = simulate_stages(&teleport.circuit, &teleport.initial).unwrap();
    let (roundtrip, _) = simulate_stages(&reparsed, &teleport.initial).unwrap();
    assert_eq!(original.totals(), roundtrip.totals());
}
