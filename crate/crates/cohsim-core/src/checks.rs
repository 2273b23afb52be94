//! The verification suites behind `cohsim verify` and the acceptance tests.
//!
//! Every suite returns a [`CheckOutcome`] with the worst measured residual,
//! so failures carry numbers rather than just a flag. Randomized suites are
//! fully determined by their seed.

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{simulate_stages, CircuitElement};
use crate::dsl;
use crate::error::Result;
use crate::linalg::{shannon_entropy_raw, tensor, ProbVector};
use crate::protocols::{
    branch_coherence, budget_bound, build_superdense, build_swap, build_teleportation,
    build_teleportation_pure_path, ghz_circuit, holevo_invariance, prepare_ghz, prepare_w,
    repeater_run, verify_stage_decomposition, w_circuit, BranchSpec, BudgetLedger, RepeaterMode,
    RepeaterSchedule,
};
use crate::random::{
    random_basis_state, random_bloch_angles, random_mixed_state, random_probs,
    random_product_state, random_pure_state, random_unitary2, rng_from_seed,
};
use crate::state::{compose, holevo_chi, Ensemble, QuantumState};

pub const TOLERANCE: f64 = 1e-9;

/// Result of one verification suite.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub max_residual: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn from_residual(name: &'static str, max_residual: f64, detail: String) -> Self {
        CheckOutcome {
            name,
            passed: max_residual <= TOLERANCE,
            max_residual,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {} max_residual={:.3e} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.detail
        )
    }
}

fn track(worst: &mut f64, residual: f64) {
    if residual > *worst {
        *worst = residual;
    }
}

/// W/GHZ coherence scaling for n = 2..=10.
pub fn check_w_ghz_scaling() -> Result<CheckOutcome> {
    let mut worst = 0.0;
    for n in 2..=10 {
        let w = prepare_w(n)?.relative_entropy_of_coherence()?;
        track(&mut worst, (w - (n as f64).log2()).abs());
        let ghz = prepare_ghz(n)?.relative_entropy_of_coherence()?;
        track(&mut worst, (ghz - 1.0).abs());
    }
    Ok(CheckOutcome::from_residual(
        "w-ghz-scaling",
        worst,
        "n = 2..=10".into(),
    ))
}

/// The two-bit pre-measurement offset of a single gadget on `|0>`, and the
/// uniform four-point support of its dephased diagonal.
pub fn check_two_bit_offset() -> Result<CheckOutcome> {
    let run = build_teleportation(1, &QuantumState::zero_state(1), 1.0)?;
    let (profile, states) = run.simulate()?;
    let mut worst = (profile.stages[4].total_coherence - 2.0).abs();

    let pre_measure = &states[4].state;
    let probs = pre_measure.dephase_all().diagonal_probs();
    for (idx, p) in probs.iter().enumerate() {
        let expected = match idx {
            0b000 | 0b011 | 0b100 | 0b111 => 0.25,
            _ => 0.0,
        };
        track(&mut worst, (p - expected).abs());
    }
    Ok(CheckOutcome::from_residual(
        "two-bit-offset",
        worst,
        "pre-measurement C_r = 2, diagonal uniform on {000, 011, 100, 111}".into(),
    ))
}

/// Full stage profile [0, 1, 1, 1, 2, 0, 0] for input `|0>`.
pub fn check_stage_profile() -> Result<CheckOutcome> {
    let run = build_teleportation(1, &QuantumState::zero_state(1), 1.0)?;
    let profile = run.profile()?;
    let expected = [0.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.0];
    let mut worst = (profile.stages.len() as f64 - expected.len() as f64).abs();
    for (stage, want) in profile.stages.iter().zip(expected) {
        track(&mut worst, (stage.total_coherence - want).abs());
    }
    Ok(CheckOutcome::from_residual(
        "stage-profile",
        worst,
        "teleportation of |0>: [0, 1, 1, 1, 2, 0, 0]".into(),
    ))
}

/// Reduced coherences: locals never exceed the total, and measured qubits
/// hold zero coherence after the measurement layer.
pub fn check_reduced_coherences(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    let mut messages = vec![QuantumState::zero_state(1)];
    for _ in 0..2 {
        let (theta, gamma) = random_bloch_angles(&mut rng);
        messages.push(QuantumState::bloch(theta, gamma));
    }
    // One two-gadget run alongside the single-gadget cases.
    messages.push(random_product_state(2, &mut rng));
    for message in &messages {
        let n = message.qubit_count();
        let run = build_teleportation(n, message, 1.0)?;
        let (profile, _) = run.simulate()?;
        for stage in &profile.stages {
            let local_sum: f64 = stage.per_qubit.iter().sum();
            track(&mut worst, (local_sum - stage.total_coherence).max(0.0));
            if stage.is_post_measurement {
                // Message and ancilla qubits of every gadget were measured.
                for g in 0..n {
                    track(&mut worst, stage.per_qubit[3 * g].abs() * 10.0);
                    track(&mut worst, stage.per_qubit[3 * g + 1].abs() * 10.0);
                }
            }
        }
    }
    Ok(CheckOutcome::from_residual(
        "reduced-coherences",
        worst,
        "sum of locals <= total; measured qubits at zero (x10 margin)".into(),
    ))
}

/// Peak scaling `2n + C_r(message)` for parallel teleportation.
pub fn check_scaling_law(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    let mut cases = 0;
    for n in 1..=3usize {
        for _ in 0..5 {
            let message = random_product_state(n, &mut rng);
            let message_coherence = message.relative_entropy_of_coherence()?;
            let run = build_teleportation(n, &message, 1.0)?;
            let peak = run.profile()?.peak.1;
            track(
                &mut worst,
                (peak - 2.0 * n as f64 - message_coherence).abs(),
            );
            cases += 1;
        }
    }
    // n = 4 runs on the statevector path, cut before the measurement layer.
    let message = random_product_state(4, &mut rng);
    let message_coherence = message.relative_entropy_of_coherence()?;
    let run = build_teleportation_pure_path(4, &message)?;
    let peak = run.profile()?.peak.1;
    track(&mut worst, (peak - 8.0 - message_coherence).abs());
    Ok(CheckOutcome::from_residual(
        "scaling-law",
        worst,
        format!("{cases} full runs (n = 1..3) + pure-path n = 4"),
    ))
}

/// Stage-resolved decomposition residuals for n in {1, 2}.
pub fn check_stage_decomposition(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    let mut cases = 0;
    for n in 1..=2usize {
        for _ in 0..5 {
            // Entangled messages are fair game for the decomposition.
            let message = random_pure_state(n, &mut rng);
            for residual in verify_stage_decomposition(n, &message)? {
                track(&mut worst, residual);
            }
            cases += 1;
        }
    }
    Ok(CheckOutcome::from_residual(
        "stage-decomposition",
        worst,
        format!("{cases} random pure messages, every stage"),
    ))
}

/// Additivity of the coherence measure over tensor products.
pub fn check_additivity(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    for _ in 0..100 {
        let na = rng.random_range(1..=3);
        let nb = rng.random_range(1..=3);
        let a = random_any_state(na, &mut rng);
        let b = random_any_state(nb, &mut rng);
        let ca = a.relative_entropy_of_coherence()?;
        let cb = b.relative_entropy_of_coherence()?;
        let joint = if a.is_pure() && b.is_pure() {
            let pos_a: Vec<usize> = (0..na).collect();
            let pos_b: Vec<usize> = (na..na + nb).collect();
            compose(&[(&a, pos_a.as_slice()), (&b, pos_b.as_slice())], na + nb)?
        } else {
            QuantumState::mixed(na + nb, tensor(&a.to_density(), &b.to_density()))?
        };
        let cab = joint.relative_entropy_of_coherence()?;
        track(&mut worst, (cab - ca - cb).abs());
    }
    Ok(CheckOutcome::from_residual(
        "additivity",
        worst,
        "100 random pairs up to 3+3 qubits".into(),
    ))
}

fn random_any_state(n: usize, rng: &mut impl Rng) -> QuantumState {
    if rng.random::<bool>() {
        random_pure_state(n, rng)
    } else {
        let env = rng.random_range(1..=n);
        random_mixed_state(n, env, rng)
    }
}

/// Branch-superposition identity over random specs, plus the exact uniform
/// incoherent case at a tightened (1e-10) tolerance.
pub fn check_branching(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let payload_qubits = rng.random_range(1..=2);
        let probs = ProbVector::new(random_probs(m, &mut rng))?;
        let payloads: Vec<QuantumState> = (0..m)
            .map(|_| random_pure_state(payload_qubits, &mut rng))
            .collect();
        let (direct, rhs) = branch_coherence(&BranchSpec::new(probs, payloads)?)?;
        track(&mut worst, (direct - rhs).abs());
    }
    for m in [2usize, 4, 8] {
        let probs = ProbVector::new(vec![1.0 / m as f64; m])?;
        let payloads: Vec<QuantumState> = (0..m)
            .map(|k| QuantumState::basis_state(1, k % 2))
            .collect();
        let (direct, rhs) = branch_coherence(&BranchSpec::new(probs, payloads)?)?;
        track(&mut worst, (direct - (m as f64).log2()).abs() * 10.0);
        track(&mut worst, (rhs - (m as f64).log2()).abs() * 10.0);
    }
    Ok(CheckOutcome::from_residual(
        "branching-identity",
        worst,
        "100 random specs (m <= 8) + uniform incoherent cases (x10 margin)".into(),
    ))
}

/// Budget bound: named protocols at their known peaks, the state builders,
/// and 20 random protocol-shaped `.qc` circuits with up to two layers.
pub fn check_budget(seed: u64) -> Result<CheckOutcome> {
    let mut worst = 0.0;

    let teleport = build_teleportation(1, &QuantumState::zero_state(1), 1.0)?;
    let bound = teleport.ledger.peak_bound();
    track(&mut worst, (bound - 3.0).abs());
    let profile = teleport.profile()?;
    track(&mut worst, (profile.peak.1 - 2.0).abs());
    for stage in &profile.stages {
        track(&mut worst, (stage.total_coherence - bound).max(0.0));
    }

    let swap = build_swap()?;
    let bound = swap.ledger.peak_bound();
    track(&mut worst, (bound - 4.0).abs());
    let profile = swap.profile()?;
    track(&mut worst, (profile.peak.1 - 3.0).abs());
    for stage in &profile.stages {
        track(&mut worst, (stage.total_coherence - bound).max(0.0));
    }

    // State builders: the prepared state itself is the resource.
    for (circuit, target) in [
        (w_circuit(4)?, prepare_w(4)?),
        (ghz_circuit(4)?, prepare_ghz(4)?),
    ] {
        let ledger = BudgetLedger::new(0.0, target.relative_entropy_of_coherence()?, vec![])?;
        let (profile, _) =
            simulate_stages(&circuit, &QuantumState::zero_state(circuit.qubit_count))?;
        for stage in &profile.stages {
            track(
                &mut worst,
                (stage.total_coherence - ledger.peak_bound()).max(0.0),
            );
        }
    }

    let mut rng = rng_from_seed(seed);
    for _ in 0..20 {
        let (source, ledger) = random_protocol_source(&mut rng)?;
        let circuit = dsl::parse_circuit(&source)
            .into_circuit()
            .expect("generated source is valid");
        let (profile, _) =
            simulate_stages(&circuit, &QuantumState::zero_state(circuit.qubit_count))?;
        let bound = ledger.peak_bound();
        for stage in &profile.stages {
            track(&mut worst, (stage.total_coherence - bound).max(0.0));
        }
        // The per-layer form stays within range by construction.
        for l in 0..=ledger.layer_alphabets.len() {
            let partial = budget_bound(&ledger, l)?;
            track(&mut worst, (partial - bound).max(0.0));
        }
    }
    Ok(CheckOutcome::from_residual(
        "budget-bound",
        worst,
        "teleport (3), swap (4), state builders, 20 random protocol circuits".into(),
    ))
}

/// Random LOCC-shaped `.qc` circuit: message/resource preparation, then up
/// to two measurement layers. Each layer spends at most one coherent
/// single-qubit unitary per measured qubit; everything else is a basis
/// permutation or diagonal phase, so the budget bound applies.
fn random_protocol_source(rng: &mut impl Rng) -> Result<(String, BudgetLedger)> {
    let qubits = rng.random_range(3..=5usize);
    let resource: Vec<usize> = vec![1, 2];
    let mut lines = vec![format!("qubits {qubits}")];

    // Message preparation on qubit 0.
    let message_u = random_unitary2(rng);
    let p0 = message_u.get(0, 0).norm_sqr();
    let message_coherence = shannon_entropy_raw(&[p0, 1.0 - p0]);
    lines.push(u_line(0, &message_u));

    // Resource preparation confined to the resource block.
    for _ in 0..rng.random_range(2..=4usize) {
        match rng.random_range(0..3u8) {
            0 => lines.push(format!(
                "h {}",
                resource[rng.random_range(0..resource.len())]
            )),
            1 => {
                let q = resource[rng.random_range(0..resource.len())];
                lines.push(u_line(q, &random_unitary2(rng)));
            }
            _ => {
                lines.push(format!("cnot {} {}", resource[0], resource[1]));
            }
        }
    }
    lines.push("stage prep".into());

    // Measure the prepared resource coherence off the simulated prefix:
    // the prep stage factorizes, so C_R = C_r(prep) - C_M.
    let prep_source = format!("{}\n", lines.join("\n"));
    let prep_circuit = dsl::parse_circuit(&prep_source)
        .into_circuit()
        .expect("prep prefix is valid");
    let (prep_profile, _) = simulate_stages(&prep_circuit, &QuantumState::zero_state(qubits))?;
    let prep_total = prep_profile
        .stages
        .last()
        .expect("prep stage")
        .total_coherence;
    let resource_coherence = (prep_total - message_coherence).max(0.0);

    // Measurement layers.
    let layer_count = rng.random_range(1..=2usize);
    let mut alphabets = Vec::new();
    for layer in 0..layer_count {
        let width = rng.random_range(1..=2usize);
        let mut targets = Vec::new();
        while targets.len() < width {
            let q = rng.random_range(0..qubits);
            if !targets.contains(&q) {
                targets.push(q);
            }
        }
        for &q in &targets {
            lines.push(u_line(q, &random_unitary2(rng)));
        }
        for _ in 0..rng.random_range(0..=3usize) {
            lines.push(permutation_line(qubits, rng));
        }
        lines.push(format!("stage branch-{layer}"));
        let rendered: Vec<String> = targets.iter().map(|q| q.to_string()).collect();
        lines.push(format!("measure {}", rendered.join(" ")));
        lines.push(format!("stage measure-{layer}"));
        alphabets.push(1usize << width);
    }
    for _ in 0..rng.random_range(0..=2usize) {
        lines.push(permutation_line(qubits, rng));
    }
    lines.push("stage final".into());

    let ledger = BudgetLedger::new(message_coherence, resource_coherence, alphabets)?;
    Ok((format!("{}\n", lines.join("\n")), ledger))
}

fn u_line(q: usize, m: &crate::linalg::ComplexMatrix) -> String {
    format!(
        "u {q} {} {} {} {} {} {} {} {}",
        m.get(0, 0).re,
        m.get(0, 0).im,
        m.get(0, 1).re,
        m.get(0, 1).im,
        m.get(1, 0).re,
        m.get(1, 0).im,
        m.get(1, 1).re,
        m.get(1, 1).im,
    )
}

/// Basis permutations and diagonal phases: coherence-invariant filler.
fn permutation_line(qubits: usize, rng: &mut impl Rng) -> String {
    match rng.random_range(0..4u8) {
        0 | 1 => {
            let gate = if rng.random::<bool>() { "cnot" } else { "cz" };
            let a = rng.random_range(0..qubits);
            let mut b = rng.random_range(0..qubits);
            while b == a {
                b = rng.random_range(0..qubits);
            }
            format!("{gate} {a} {b}")
        }
        2 => format!("x {}", rng.random_range(0..qubits)),
        _ => {
            let gate = ["z", "s", "t"][rng.random_range(0..3usize)];
            format!("{gate} {}", rng.random_range(0..qubits))
        }
    }
}

/// Branching cap: the coherent-branching contribution carried into each
/// measurement layer, `H` of the measured register's outcome distribution,
/// never exceeds `log2 m` of that layer.
pub fn check_branching_cap(seed: u64) -> Result<CheckOutcome> {
    let mut worst = 0.0;
    let mut layers_checked = 0usize;

    let inspect = |circuit: &crate::circuit::Circuit,
                   input: &QuantumState,
                   worst: &mut f64|
     -> Result<usize> {
        let mut state = input.clone();
        let mut seen = 0usize;
        for element in &circuit.elements {
            if let CircuitElement::Measure { targets } = element {
                let marginal = state.partial_trace_keep(&sorted(targets))?;
                let branching = shannon_entropy_raw(&marginal.diagonal_probs());
                track(worst, (branching - targets.len() as f64).max(0.0));
                seen += 1;
            }
            state = crate::circuit::apply_element(&state, element)?;
        }
        Ok(seen)
    };

    let mut rng = rng_from_seed(seed);
    let coherent = random_product_state(2, &mut rng);
    let runs = vec![
        build_teleportation(1, &QuantumState::zero_state(1), 1.0)?,
        build_teleportation(2, &coherent, 1.0)?,
        build_swap()?,
        build_superdense((1, 1))?,
    ];
    for run in &runs {
        layers_checked += inspect(&run.circuit, &run.initial, &mut worst)?;
    }
    for _ in 0..5 {
        let (source, _) = random_protocol_source(&mut rng)?;
        let circuit = dsl::parse_circuit(&source)
            .into_circuit()
            .expect("generated source");
        let input = QuantumState::zero_state(circuit.qubit_count);
        layers_checked += inspect(&circuit, &input, &mut worst)?;
    }
    Ok(CheckOutcome::from_residual(
        "branching-cap",
        worst,
        format!("{layers_checked} measurement layers, each within log2 m"),
    ))
}

fn sorted(targets: &[usize]) -> Vec<usize> {
    let mut out = targets.to_vec();
    out.sort_unstable();
    out
}

/// Holevo invariance for three fixed single-qubit ensembles, with the
/// intermediate-coherence exhibit.
pub fn check_holevo() -> Result<CheckOutcome> {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let plus = QuantumState::pure(1, vec![Complex64::new(inv, 0.0), Complex64::new(inv, 0.0)])?;
    let minus = QuantumState::pure(1, vec![Complex64::new(inv, 0.0), Complex64::new(-inv, 0.0)])?;
    let ensembles = vec![
        Ensemble::new(vec![
            (0.5, QuantumState::zero_state(1)),
            (0.5, QuantumState::basis_state(1, 1)),
        ])?,
        Ensemble::new(vec![
            (0.5, QuantumState::zero_state(1)),
            (0.5, plus.clone()),
        ])?,
        Ensemble::new(vec![
            (0.25, QuantumState::zero_state(1)),
            (0.25, QuantumState::basis_state(1, 1)),
            (0.25, plus),
            (0.25, minus),
        ])?,
    ];
    let mut worst = 0.0;
    let mut exhibited = false;
    for ensemble in &ensembles {
        let result = holevo_invariance(ensemble)?;
        track(&mut worst, (result.chi_in - result.chi_out).abs());
        let chi = holevo_chi(ensemble)?;
        track(&mut worst, (result.chi_in - chi).abs());
        if result.max_intermediate >= 2.0 - TOLERANCE && result.max_intermediate > result.chi_in {
            exhibited = true;
        }
    }
    if !exhibited {
        track(&mut worst, 1.0);
    }
    Ok(CheckOutcome::from_residual(
        "holevo-invariance",
        worst,
        "3 fixed ensembles; intermediate peak >= 2 > chi for at least one".into(),
    ))
}

/// Coherence never increases under the partial dephasing channel.
pub fn check_dephasing_monotone(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(1..=2usize);
        let state = random_any_state(n, &mut rng);
        let baseline = state.relative_entropy_of_coherence()?;
        for target in 0..n {
            let mut previous = baseline;
            for step in 1..=9 {
                let lambda = step as f64 / 10.0;
                let element = CircuitElement::Dephase { lambda, target };
                let dephased = crate::circuit::apply_element(&state, &element)?;
                let value = dephased.relative_entropy_of_coherence()?;
                track(&mut worst, (value - baseline).max(0.0));
                // The grid itself is monotone: D_b = D_x . D_a for b > a.
                track(&mut worst, (value - previous).max(0.0));
                previous = value;
            }
        }
    }
    Ok(CheckOutcome::from_residual(
        "dephasing-monotone",
        worst,
        "50 random states x lambda grid 0.1..0.9 x each qubit".into(),
    ))
}

/// Swapping benchmark: two-bit branching entropy at the Bell layer and the
/// three-bit pre-measurement coherence.
pub fn check_swap_benchmark() -> Result<CheckOutcome> {
    let run = build_swap()?;
    let (profile, states) = run.simulate()?;
    let mut worst = 0.0;
    let pre = profile
        .stages
        .iter()
        .find(|s| s.label == "pre-measure")
        .expect("stage exists");
    track(&mut worst, (pre.total_coherence - 3.0).abs());

    // Outcome distribution of the measured pair (B, C) at the pre-measure
    // cut: uniform over the four Bell outcomes, i.e. 2 bits of branching.
    let snapshot = &states[pre.index].state;
    let pair = snapshot.partial_trace_keep(&[1, 2])?;
    let branching = shannon_entropy_raw(&pair.diagonal_probs());
    track(&mut worst, (branching - 2.0).abs());

    // Resource coherence of the two Bell pairs.
    track(&mut worst, (run.ledger.resource_coherence - 2.0).abs());
    Ok(CheckOutcome::from_residual(
        "swap-benchmark",
        worst,
        "branching entropy 2 bits, pre-measurement C_r = 3".into(),
    ))
}

/// Repeater peaks: sequential O(1) behavior and the parallel estimate.
pub fn check_repeater() -> Result<CheckOutcome> {
    let mut worst = 0.0;
    let two = repeater_run(&RepeaterSchedule::new(2, RepeaterMode::Sequential)?)?;
    let three = repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Sequential)?)?;
    if (two.measured_peak - three.measured_peak).abs() > 0.5 {
        track(&mut worst, (two.measured_peak - three.measured_peak).abs());
    }
    for run in [&two, &three] {
        track(&mut worst, (run.measured_peak - run.estimate).max(0.0));
    }
    let parallel = repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Parallel(2))?)?;
    track(
        &mut worst,
        (parallel.measured_peak - parallel.estimate).max(0.0),
    );
    track(&mut worst, (parallel.estimate - 7.0).abs());
    Ok(CheckOutcome::from_residual(
        "repeater-peaks",
        worst,
        "sequential N = 2, 3 flat; peaks within C_r(sigma_R) + 2s".into(),
    ))
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy_raw(&[p.clamp(0.0, 1.0), (1.0 - p).clamp(0.0, 1.0)])
}

/// Angle sweep: the message term `peak(phi) - 2` equals the binary entropy
/// of `cos^2 phi` on a 33-point grid over [0, pi/2].
pub fn check_angle_sweep() -> Result<CheckOutcome> {
    let mut worst = 0.0;
    for i in 0..33 {
        let phi = std::f64::consts::FRAC_PI_2 * i as f64 / 32.0;
        let message = QuantumState::bloch(2.0 * phi, 0.0);
        let run = build_teleportation(1, &message, 1.0)?;
        let peak = run.profile()?.peak.1;
        let expected = binary_entropy(phi.cos().powi(2));
        track(&mut worst, (peak - 2.0 - expected).abs());
    }
    Ok(CheckOutcome::from_residual(
        "angle-sweep",
        worst,
        "33 grid points over [0, pi/2]".into(),
    ))
}

/// Werner degradation: peaks nonincreasing in the noise, and the linear
/// gadget structure preserved (identical product messages give exactly
/// n times the single-gadget peak; incoherent messages add nothing).
pub fn check_werner_degradation(seed: u64) -> Result<CheckOutcome> {
    let mut rng = rng_from_seed(seed);
    let mut worst = 0.0;
    let grid = [1.0, 0.8, 0.6];

    let single_peak = |message: &QuantumState, lambda: f64| -> Result<f64> {
        Ok(build_teleportation(1, message, lambda)?.profile()?.peak.1)
    };

    // Monotone peaks for |0> and one random Bloch message.
    let (theta, gamma) = random_bloch_angles(&mut rng);
    for message in [
        QuantumState::zero_state(1),
        QuantumState::bloch(theta, gamma),
    ] {
        let mut previous = f64::INFINITY;
        for lambda in grid {
            let peak = single_peak(&message, lambda)?;
            track(&mut worst, (peak - previous).max(0.0));
            previous = peak;
        }
    }

    for lambda in grid {
        // Identical product messages: peak(n) = n * peak(1) exactly.
        let (theta, gamma) = random_bloch_angles(&mut rng);
        let part = QuantumState::bloch(theta, gamma);
        let one = single_peak(&part, lambda)?;
        for n in 2..=2usize {
            let positions: Vec<[usize; 1]> = (0..n).map(|q| [q]).collect();
            let refs: Vec<(&QuantumState, &[usize])> =
                positions.iter().map(|p| (&part, p.as_slice())).collect();
            let message = compose(&refs, n)?;
            let peak = build_teleportation(n, &message, lambda)?.profile()?.peak.1;
            track(&mut worst, (peak - n as f64 * one).abs());
        }

        // Incoherent product messages: the offset C_r(message) = 0 exactly.
        let zero_peak = single_peak(&QuantumState::zero_state(1), lambda)?;
        let basis = random_basis_state(2, &mut rng);
        let peak = build_teleportation(2, &basis, lambda)?.profile()?.peak.1;
        track(&mut worst, (peak - 2.0 * zero_peak).abs());
    }

    // Ideal resources recover the full offset law for coherent messages.
    let (theta, gamma) = random_bloch_angles(&mut rng);
    let message = QuantumState::bloch(theta, gamma);
    let peak = single_peak(&message, 1.0)?;
    track(
        &mut worst,
        (peak - 2.0 - message.relative_entropy_of_coherence()?).abs(),
    );

    Ok(CheckOutcome::from_residual(
        "werner-degradation",
        worst,
        "peaks nonincreasing over {1.0, 0.8, 0.6}; linear gadget structure".into(),
    ))
}

/// Round-trip fixpoint on every built-in circuit and a 10,000-case fuzz
/// run over the parser.
pub fn check_dsl_roundtrip_fuzz(seed: u64) -> Result<CheckOutcome> {
    let mut worst = 0.0;
    let built_ins = vec![
        build_teleportation(1, &QuantumState::zero_state(1), 1.0)?.circuit,
        build_teleportation(2, &QuantumState::zero_state(2), 1.0)?.circuit,
        build_superdense((1, 0))?.circuit,
        build_swap()?.circuit,
        repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Sequential)?)?.circuit,
        repeater_run(&RepeaterSchedule::new(3, RepeaterMode::Parallel(2))?)?.circuit,
        w_circuit(3)?,
        ghz_circuit(4)?,
    ];
    for circuit in &built_ins {
        let text = dsl::serialize_circuit(circuit);
        match dsl::parse_circuit(&text).into_circuit() {
            Ok(reparsed) => {
                if reparsed.elements != circuit.elements {
                    track(&mut worst, 1.0);
                }
                if dsl::serialize_circuit(&reparsed) != text {
                    track(&mut worst, 1.0);
                }
            }
            Err(_) => track(&mut worst, 1.0),
        }
    }

    let mut rng = rng_from_seed(seed);
    let mut diagnostics_seen = 0usize;
    for case in 0..10_000 {
        let source = fuzz_source(case, &mut rng);
        let outcome = dsl::parse_circuit(&source);
        if outcome.circuit.is_none() && !outcome.has_errors() {
            track(&mut worst, 1.0);
        }
        if !outcome.diagnostics.is_empty() {
            diagnostics_seen += 1;
        }
    }
    Ok(CheckOutcome::from_residual(
        "dsl-roundtrip-fuzz",
        worst,
        format!(
            "8 built-ins round-tripped; 10000 fuzz inputs, {diagnostics_seen} with diagnostics"
        ),
    ))
}

fn fuzz_source(case: usize, rng: &mut impl Rng) -> String {
    match case % 3 {
        0 => {
            // Raw byte soup, lossily decoded.
            let len = rng.random_range(0..160usize);
            let bytes: Vec<u8> = (0..len).map(|_| rng.random::<u8>()).collect();
            String::from_utf8_lossy(&bytes).into_owned()
        }
        1 => {
            // Printable token soup with newlines.
            let words = [
                "qubits", "h", "x", "z", "s", "t", "cnot", "cz", "u", "measure", "dephase",
                "stage", "#", "-1", "0", "1", "2", "17", "nan", "inf", "0.5", "1e300", "qq",
            ];
            let len = rng.random_range(0..40usize);
            let mut out = String::new();
            for _ in 0..len {
                out.push_str(words[rng.random_range(0..words.len())]);
                out.push(if rng.random::<bool>() { ' ' } else { '\n' });
            }
            out
        }
        _ => {
            // Mutated valid source.
            let mut source = String::from("qubits 3\nh 0\ncnot 0 1\nmeasure 0 1\nstage m\n");
            let flips = rng.random_range(0..6usize);
            let mut bytes = source.clone().into_bytes();
            for _ in 0..flips {
                if bytes.is_empty() {
                    break;
                }
                let pos = rng.random_range(0..bytes.len());
                bytes[pos] = rng.random::<u8>();
            }
            source = String::from_utf8_lossy(&bytes).into_owned();
            source
        }
    }
}

/// Named suites for `cohsim verify`.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckOutcome>> {
    let outcomes = match name {
        "additivity" => vec![check_additivity(seed)?],
        "scaling" => vec![check_scaling_law(seed)?, check_stage_decomposition(seed)?],
        "branching" => vec![check_branching(seed)?, check_branching_cap(seed)?],
        "budget" => vec![check_budget(seed)?],
        "holevo" => vec![check_holevo()?],
        "monotone" => vec![check_dephasing_monotone(seed)?],
        "all" => vec![
            check_w_ghz_scaling()?,
            check_two_bit_offset()?,
            check_stage_profile()?,
            check_reduced_coherences(seed)?,
            check_scaling_law(seed)?,
            check_stage_decomposition(seed)?,
            check_additivity(seed)?,
            check_branching(seed)?,
            check_branching_cap(seed)?,
            check_budget(seed)?,
            check_holevo()?,
            check_dephasing_monotone(seed)?,
            check_swap_benchmark()?,
            check_repeater()?,
            check_angle_sweep()?,
            check_werner_degradation(seed)?,
            check_dsl_roundtrip_fuzz(seed)?,
        ],
        other => {
            return Err(crate::error::Error::InvalidParams {
                context: format!(
                    "unknown suite '{other}' (expected all, additivity, scaling, branching, budget, holevo, monotone)"
                ),
            })
        }
    };
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_protocol_sources_parse_and_respect_budget() {
        let mut rng = rng_from_seed(99);
        for _ in 0..5 {
            let (source, ledger) = random_protocol_source(&mut rng).unwrap();
            let circuit = dsl::parse_circuit(&source).into_circuit().unwrap();
            let (profile, _) =
                simulate_stages(&circuit, &QuantumState::zero_state(circuit.qubit_count)).unwrap();
            let bound = ledger.peak_bound();
            for stage in &profile.stages {
                assert!(
                    stage.total_coherence <= bound + TOLERANCE,
                    "stage {} = {} > bound {bound}\n{source}",
                    stage.index,
                    stage.total_coherence
                );
            }
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", 1).is_err());
    }
}
