//! Builders and verifiers for the standard communication protocols:
//! W/GHZ states, superdense coding, teleportation (single, parallel,
//! imperfect-resource), entanglement swapping, repeater schedules, the
//! branch-superposition identity, and the coherence budget bound.

use num_complex::Complex64;

use crate::circuit::{
    simulate_profile, simulate_stages, Circuit, CircuitElement, CoherenceProfile, GateKind,
    StageState,
};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ProbVector};
use crate::state::{compose, holevo_chi, Ensemble, QuantumState};

/// Single-qubit pure state `cos(theta/2)|0> + e^{i gamma} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub theta: f64,
    pub gamma: f64,
}

impl BlochState {
    pub fn new(theta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParams {
                context: format!("theta {theta} outside [0, pi]"),
            });
        }
        if !(0.0..std::f64::consts::TAU).contains(&gamma) {
            return Err(Error::InvalidParams {
                context: format!("gamma {gamma} outside [0, 2 pi)"),
            });
        }
        Ok(BlochState { theta, gamma })
    }

    pub fn state(&self) -> QuantumState {
        QuantumState::bloch(self.theta, self.gamma)
    }
}

const MAX_STATE_QUBITS: usize = 20;

/// `|W_n> = (1/sqrt(n)) sum_k |0..1_k..0>`, coherence `log2 n`.
pub fn prepare_w(n: usize) -> Result<QuantumState> {
    if !(2..=MAX_STATE_QUBITS).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            context: "W state needs 2..=20 qubits".into(),
        });
    }
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::ZERO; 1 << n];
    for k in 0..n {
        amps[1 << (n - 1 - k)] = amp;
    }
    QuantumState::pure(n, amps)
}

/// `|GHZ_n> = (|0..0> + |1..1>)/sqrt(2)`, coherence 1 for every `n`.
pub fn prepare_ghz(n: usize) -> Result<QuantumState> {
    if !(1..=MAX_STATE_QUBITS).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            context: "GHZ state needs 1..=20 qubits".into(),
        });
    }
    let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![Complex64::ZERO; 1 << n];
    amps[0] = inv;
    amps[(1 << n) - 1] = inv;
    QuantumState::pure(n, amps)
}

fn ry(theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    ComplexMatrix::from_rows(vec![
        vec![Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ])
    .expect("2x2 shape")
}

/// Preparation circuit for `|W_n>`: excite qubit 0, then cascade the
/// amplitude down the register with controlled rotations (compiled into
/// `ry` + `cnot` pairs) followed by a transfer `cnot`.
pub fn w_circuit(n: usize) -> Result<Circuit> {
    if !(2..=MAX_STATE_QUBITS).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            context: "W circuit needs 2..=20 qubits".into(),
        });
    }
    let mut elements = vec![
        CircuitElement::gate(GateKind::X, &[0]),
        CircuitElement::stage("excite"),
    ];
    for k in 0..n - 1 {
        // Split the remaining amplitude so position k keeps weight 1/n:
        // controlled-Ry(2 theta) with sin(theta) = sqrt((n-k-1)/(n-k)).
        let sin_theta = (((n - k - 1) as f64) / ((n - k) as f64)).sqrt();
        let theta = sin_theta.asin();
        elements.extend([
            CircuitElement::gate(GateKind::Custom(ry(theta)), &[k + 1]),
            CircuitElement::gate(GateKind::Cnot, &[k, k + 1]),
            CircuitElement::gate(GateKind::Custom(ry(-theta)), &[k + 1]),
            CircuitElement::gate(GateKind::Cnot, &[k, k + 1]),
            CircuitElement::gate(GateKind::Cnot, &[k + 1, k]),
            CircuitElement::stage(format!("split-{k}")),
        ]);
    }
    elements.push(CircuitElement::stage("w"));
    Circuit::new(n, elements)
}

/// Preparation circuit for `|GHZ_n>`: Hadamard plus a `cnot` chain.
pub fn ghz_circuit(n: usize) -> Result<Circuit> {
    if !(1..=MAX_STATE_QUBITS).contains(&n) {
        return Err(Error::InvalidSize {
            n,
            context: "GHZ circuit needs 1..=20 qubits".into(),
        });
    }
    let mut elements = vec![
        CircuitElement::gate(GateKind::H, &[0]),
        CircuitElement::stage("h"),
    ];
    for k in 0..n - 1 {
        elements.extend([
            CircuitElement::gate(GateKind::Cnot, &[k, k + 1]),
            CircuitElement::stage(format!("chain-{k}")),
        ]);
    }
    elements.push(CircuitElement::stage("ghz"));
    Circuit::new(n, elements)
}

/// Coherence budget of a protocol run: message coherence, resource
/// coherence, and the measurement-layer alphabet sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetLedger {
    pub message_coherence: f64,
    pub resource_coherence: f64,
    pub layer_alphabets: Vec<usize>,
}

impl BudgetLedger {
    pub fn new(
        message_coherence: f64,
        resource_coherence: f64,
        layer_alphabets: Vec<usize>,
    ) -> Result<Self> {
        if message_coherence < 0.0 || resource_coherence < 0.0 {
            return Err(Error::InvalidParams {
                context: "ledger coherences must be nonnegative".into(),
            });
        }
        if layer_alphabets.iter().any(|&m| m < 2) {
            return Err(Error::InvalidParams {
                context: "measurement alphabets must have at least 2 outcomes".into(),
            });
        }
        Ok(BudgetLedger {
            message_coherence,
            resource_coherence,
            layer_alphabets,
        })
    }

    /// Budget with every measurement layer counted (the peak bound).
    pub fn peak_bound(&self) -> f64 {
        budget_bound(self, self.layer_alphabets.len()).expect("all layers in range")
    }
}

/// `C_r(rho_M) + C_r(sigma_R) + sum_{l <= up_to_layer} log2 m_l`.
pub fn budget_bound(ledger: &BudgetLedger, up_to_layer: usize) -> Result<f64> {
    if up_to_layer > ledger.layer_alphabets.len() {
        return Err(Error::LayerOutOfRange {
            layer: up_to_layer,
            available: ledger.layer_alphabets.len(),
        });
    }
    let branching: f64 = ledger.layer_alphabets[..up_to_layer]
        .iter()
        .map(|&m| (m as f64).log2())
        .sum();
    Ok(ledger.message_coherence + ledger.resource_coherence + branching)
}

/// Werner resource `lambda |Phi+><Phi+| + (1 - lambda) I/4` on two qubits.
pub fn werner_state(lambda: f64) -> Result<QuantumState> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidWernerParameter { lambda });
    }
    let inv = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let bell = vec![inv, Complex64::ZERO, Complex64::ZERO, inv];
    if lambda == 1.0 {
        return QuantumState::pure(2, bell);
    }
    let mut rho = ComplexMatrix::outer(&bell);
    rho.scale(lambda);
    rho.add_scaled(&ComplexMatrix::from_diagonal(&[0.25; 4]), 1.0 - lambda);
    QuantumState::mixed(2, rho)
}

/// A built protocol: the circuit, the initial state it runs on, and the
/// budget ledger for the bound checks.
#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub circuit: Circuit,
    pub initial: QuantumState,
    pub ledger: BudgetLedger,
}

impl ProtocolRun {
    pub fn simulate(&self) -> Result<(CoherenceProfile, Vec<StageState>)> {
        simulate_stages(&self.circuit, &self.initial)
    }

    pub fn profile(&self) -> Result<CoherenceProfile> {
        simulate_profile(&self.circuit, &self.initial)
    }
}

/// Per-gadget register layout: message qubit, Alice ancilla, Bob qubit.
fn gadget_qubits(g: usize) -> (usize, usize, usize) {
    (3 * g, 3 * g + 1, 3 * g + 2)
}

/// Parallel teleportation of an `n_gadgets`-qubit message.
///
/// The circuit applies each per-gadget step to every gadget before the
/// stage cut, so the stage structure matches the single-gadget profile:
/// `init`, `bell-h`, `bell-cnot`, `encode-cnot`, `encode-h`, `measure`,
/// `correct`. With `werner = 1` the Bell pairs are created by gates; with
/// `werner < 1` the Bell-creation layers are dropped and the Werner pairs
/// enter through the initial state (they have no gate preparation in this
/// gate set).
pub fn build_teleportation(
    n_gadgets: usize,
    message: &QuantumState,
    werner: f64,
) -> Result<ProtocolRun> {
    build_teleportation_with(n_gadgets, message, werner, true)
}

/// Teleportation circuit truncated before the measurement layer, keeping
/// the simulation on the statevector path for larger gadget counts.
pub fn build_teleportation_pure_path(
    n_gadgets: usize,
    message: &QuantumState,
) -> Result<ProtocolRun> {
    build_teleportation_with(n_gadgets, message, 1.0, false)
}

fn build_teleportation_with(
    n_gadgets: usize,
    message: &QuantumState,
    werner: f64,
    with_measurement: bool,
) -> Result<ProtocolRun> {
    if n_gadgets == 0 {
        return Err(Error::InvalidSize {
            n: 0,
            context: "need at least one gadget".into(),
        });
    }
    if message.qubit_count() != n_gadgets {
        return Err(Error::SizeMismatch {
            context: format!(
                "message has {} qubits but {n_gadgets} gadget(s) were requested",
                message.qubit_count()
            ),
        });
    }
    if !(0.0..=1.0).contains(&werner) {
        return Err(Error::InvalidWernerParameter { lambda: werner });
    }

    let qubit_count = 3 * n_gadgets;
    let ideal_resource = werner == 1.0;
    let mut elements = Vec::new();

    if ideal_resource {
        for g in 0..n_gadgets {
            let (_, a, _) = gadget_qubits(g);
            elements.push(CircuitElement::gate(GateKind::H, &[a]));
        }
        elements.push(CircuitElement::stage("bell-h"));
        for g in 0..n_gadgets {
            let (_, a, b) = gadget_qubits(g);
            elements.push(CircuitElement::gate(GateKind::Cnot, &[a, b]));
        }
        elements.push(CircuitElement::stage("bell-cnot"));
    }
    for g in 0..n_gadgets {
        let (m, a, _) = gadget_qubits(g);
        elements.push(CircuitElement::gate(GateKind::Cnot, &[m, a]));
    }
    elements.push(CircuitElement::stage("encode-cnot"));
    for g in 0..n_gadgets {
        let (m, _, _) = gadget_qubits(g);
        elements.push(CircuitElement::gate(GateKind::H, &[m]));
    }
    elements.push(CircuitElement::stage("encode-h"));
    if with_measurement {
        for g in 0..n_gadgets {
            let (m, a, _) = gadget_qubits(g);
            elements.push(CircuitElement::measure(&[m, a]));
        }
        elements.push(CircuitElement::stage("measure"));
        for g in 0..n_gadgets {
            let (m, a, b) = gadget_qubits(g);
            elements.push(CircuitElement::gate(GateKind::Cnot, &[a, b]));
            elements.push(CircuitElement::gate(GateKind::Cz, &[m, b]));
        }
        elements.push(CircuitElement::stage("correct"));
    }
    let circuit = Circuit::new(qubit_count, elements)?;

    // Initial state: message on the m qubits, ancilla/Bob in |0> for ideal
    // resources, Werner pairs on (a, b) otherwise.
    let message_positions: Vec<usize> = (0..n_gadgets).map(|g| gadget_qubits(g).0).collect();
    let mut parts: Vec<(&QuantumState, Vec<usize>)> = Vec::new();
    let zero = QuantumState::zero_state(1);
    let resource = werner_state(werner)?;
    parts.push((message, message_positions));
    for g in 0..n_gadgets {
        let (_, a, b) = gadget_qubits(g);
        if ideal_resource {
            parts.push((&zero, vec![a]));
            parts.push((&zero, vec![b]));
        } else {
            parts.push((&resource, vec![a, b]));
        }
    }
    let part_refs: Vec<(&QuantumState, &[usize])> =
        parts.iter().map(|(s, pos)| (*s, pos.as_slice())).collect();
    let initial = compose(&part_refs, qubit_count)?;

    let ledger = BudgetLedger::new(
        message.relative_entropy_of_coherence()?,
        (n_gadgets as f64) * resource.relative_entropy_of_coherence()?,
        vec![4; if with_measurement { n_gadgets } else { 0 }],
    )?;
    Ok(ProtocolRun {
        circuit,
        initial,
        ledger,
    })
}

/// Bob's joint marginal after a teleportation run (the last snapshot
/// reduced to the Bob qubits).
pub fn bob_marginal(run_states: &[StageState], n_gadgets: usize) -> Result<QuantumState> {
    let last = run_states.last().ok_or(Error::EmptyProfile)?;
    let bob: Vec<usize> = (0..n_gadgets).map(|g| gadget_qubits(g).2).collect();
    last.state.partial_trace_keep(&bob)
}

/// Stage-wise residuals of the parallel-teleportation decomposition:
/// `|C_r(global, i) - n C_r(single gadget on |0>, i) - C_r(message)|`.
pub fn verify_stage_decomposition(n_gadgets: usize, message: &QuantumState) -> Result<Vec<f64>> {
    if !message.is_pure() {
        return Err(Error::invalid_state(
            "stage decomposition needs a pure message",
        ));
    }
    let global = build_teleportation(n_gadgets, message, 1.0)?.profile()?;
    let single = build_teleportation(1, &QuantumState::zero_state(1), 1.0)?.profile()?;
    if global.stages.len() != single.stages.len() {
        return Err(Error::dimension(
            "stage counts differ between global and gadget runs",
        ));
    }
    let message_coherence = message.relative_entropy_of_coherence()?;
    Ok(global
        .stages
        .iter()
        .zip(&single.stages)
        .map(|(g, s)| {
            (g.total_coherence - (n_gadgets as f64) * s.total_coherence - message_coherence).abs()
        })
        .collect())
}

/// Superdense coding of a classical bit pair: Bell creation, encoding
/// `Z^{b1} X^{b2}` on Alice's qubit, decoding `cnot` + `h`, and the final
/// measurement. The decoded diagonal concentrates on `|b1 b2>`.
pub fn build_superdense(bits: (u8, u8)) -> Result<ProtocolRun> {
    let (b1, b2) = bits;
    if b1 > 1 || b2 > 1 {
        return Err(Error::InvalidParams {
            context: format!("bits ({b1}, {b2}) must be 0/1"),
        });
    }
    let mut elements = vec![
        CircuitElement::gate(GateKind::H, &[0]),
        CircuitElement::stage("bell-h"),
        CircuitElement::gate(GateKind::Cnot, &[0, 1]),
        CircuitElement::stage("bell-cnot"),
    ];
    if b2 == 1 {
        elements.push(CircuitElement::gate(GateKind::X, &[0]));
    }
    if b1 == 1 {
        elements.push(CircuitElement::gate(GateKind::Z, &[0]));
    }
    elements.push(CircuitElement::stage("encode"));
    elements.extend([
        CircuitElement::gate(GateKind::Cnot, &[0, 1]),
        CircuitElement::stage("decode-cnot"),
        CircuitElement::gate(GateKind::H, &[0]),
        CircuitElement::stage("decode-h"),
        CircuitElement::measure(&[0, 1]),
        CircuitElement::stage("measure"),
    ]);
    Ok(ProtocolRun {
        circuit: Circuit::new(2, elements)?,
        initial: QuantumState::zero_state(2),
        ledger: BudgetLedger::new(0.0, 1.0, vec![4])?,
    })
}

/// The four encoded two-qubit states of superdense coding as a uniform
/// ensemble (its Holevo quantity is exactly 2 bits).
pub fn superdense_encoded_ensemble() -> Result<Ensemble> {
    let mut members = Vec::new();
    for b1 in 0..=1u8 {
        for b2 in 0..=1u8 {
            let run = build_superdense((b1, b2))?;
            let (_, states) = run.simulate()?;
            // Stage 3 is the cut right after the encoding layer.
            let encoded = states
                .iter()
                .find(|s| s.stage_index == 3)
                .expect("encode stage exists")
                .state
                .clone();
            members.push((0.25, encoded));
        }
    }
    Ensemble::new(members)
}

/// Coherent branching specification `|Psi> = sum_k sqrt(p_k) |k>_C |psi_k>_Q`.
#[derive(Debug, Clone)]
pub struct BranchSpec {
    pub probs: ProbVector,
    pub payloads: Vec<QuantumState>,
}

impl BranchSpec {
    pub fn new(probs: ProbVector, payloads: Vec<QuantumState>) -> Result<Self> {
        if probs.len() != payloads.len() {
            return Err(Error::dimension("probability and payload counts differ"));
        }
        let payload_qubits = payloads[0].qubit_count();
        for payload in &payloads {
            if !payload.is_pure() {
                return Err(Error::invalid_state("branch payloads must be pure"));
            }
            if payload.qubit_count() != payload_qubits {
                return Err(Error::MixedDimensions {
                    left: payload_qubits,
                    right: payload.qubit_count(),
                });
            }
        }
        Ok(BranchSpec { probs, payloads })
    }

    /// Qubits of the control register (`>= log2 m`).
    pub fn control_qubits(&self) -> usize {
        let m = self.probs.len();
        let mut c = 1;
        while (1usize << c) < m {
            c += 1;
        }
        c
    }

    /// Assemble the branch superposition as a pure state on `C (x) Q`.
    pub fn assemble(&self) -> Result<QuantumState> {
        let c = self.control_qubits();
        let q = self.payloads[0].qubit_count();
        let mut amps = vec![Complex64::ZERO; 1 << (c + q)];
        for (k, (p, payload)) in self.probs.probs().iter().zip(&self.payloads).enumerate() {
            let weight = p.sqrt();
            let base = k << q;
            for (j, amp) in payload
                .amplitudes()
                .expect("validated pure")
                .iter()
                .enumerate()
            {
                amps[base | j] = amp * weight;
            }
        }
        QuantumState::pure(c + q, amps)
    }
}

/// Both sides of the branch-superposition identity: the direct coherence of
/// the assembled state and `H({p_k}) + sum_k p_k C_r(psi_k)`.
pub fn branch_coherence(spec: &BranchSpec) -> Result<(f64, f64)> {
    let direct = spec.assemble()?.relative_entropy_of_coherence()?;
    let mut rhs = spec.probs.shannon_entropy();
    for (p, payload) in spec.probs.probs().iter().zip(&spec.payloads) {
        rhs += p * payload.relative_entropy_of_coherence()?;
    }
    Ok((direct, rhs))
}

/// Entanglement swapping: two Bell pairs (A,B) and (C,D), a Bell
/// measurement at the middle node (B,C), and corrections on D. The final
/// A-D marginal is exactly `|Phi+>`.
pub fn build_swap() -> Result<ProtocolRun> {
    let elements = vec![
        CircuitElement::gate(GateKind::H, &[0]),
        CircuitElement::stage("bell-ab-h"),
        CircuitElement::gate(GateKind::Cnot, &[0, 1]),
        CircuitElement::stage("bell-ab"),
        CircuitElement::gate(GateKind::H, &[2]),
        CircuitElement::stage("bell-cd-h"),
        CircuitElement::gate(GateKind::Cnot, &[2, 3]),
        CircuitElement::stage("bell-cd"),
        CircuitElement::gate(GateKind::Cnot, &[1, 2]),
        CircuitElement::stage("swap-cnot"),
        CircuitElement::gate(GateKind::H, &[1]),
        CircuitElement::stage("pre-measure"),
        CircuitElement::measure(&[1, 2]),
        CircuitElement::stage("measure"),
        CircuitElement::gate(GateKind::Cnot, &[2, 3]),
        CircuitElement::gate(GateKind::Cz, &[1, 3]),
        CircuitElement::stage("correct"),
    ];
    Ok(ProtocolRun {
        circuit: Circuit::new(4, elements)?,
        initial: QuantumState::zero_state(4),
        ledger: BudgetLedger::new(0.0, 2.0, vec![4])?,
    })
}

/// Swap order of a repeater chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepeaterMode {
    Sequential,
    /// The first `s` swaps execute in one parallel window.
    Parallel(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepeaterSchedule {
    pub links: usize,
    pub mode: RepeaterMode,
}

impl RepeaterSchedule {
    pub fn new(links: usize, mode: RepeaterMode) -> Result<Self> {
        if links < 2 {
            return Err(Error::InvalidSize {
                n: links,
                context: "chain needs >= 2 links".into(),
            });
        }
        if let RepeaterMode::Parallel(s) = mode {
            if s < 1 || s > links - 1 {
                return Err(Error::InvalidParams {
                    context: format!("parallel width {s} outside 1..={}", links - 1),
                });
            }
        }
        Ok(RepeaterSchedule { links, mode })
    }

    fn parallel_width(&self) -> usize {
        match self.mode {
            RepeaterMode::Sequential => 1,
            RepeaterMode::Parallel(s) => s,
        }
    }
}

/// Result of one repeater-chain simulation.
#[derive(Debug, Clone)]
pub struct RepeaterRun {
    pub circuit: Circuit,
    pub profile: CoherenceProfile,
    pub measured_peak: f64,
    /// `C_r(sigma_R) + 2 s` with all link pairs counted as the resource.
    pub estimate: f64,
    pub ledger: BudgetLedger,
}

const REPEATER_QUBIT_LIMIT: usize = 12;

/// Simulate a repeater chain of `links` elementary Bell pairs with swaps
/// ordered per the schedule. Link `i` occupies qubits `(2i, 2i+1)`; swap
/// `k` Bell-measures `(2k+1, 2k+2)` and corrects onto `2k+3`. Links are
/// created just before the swap that consumes them, so the sequential peak
/// stays flat in the chain length.
pub fn repeater_run(schedule: &RepeaterSchedule) -> Result<RepeaterRun> {
    let n = schedule.links;
    let qubits = 2 * n;
    if qubits > REPEATER_QUBIT_LIMIT {
        return Err(Error::TooLarge {
            qubits,
            limit: REPEATER_QUBIT_LIMIT,
        });
    }
    let s = schedule.parallel_width();

    let create_link = |elements: &mut Vec<CircuitElement>, i: usize| {
        elements.push(CircuitElement::gate(GateKind::H, &[2 * i]));
        elements.push(CircuitElement::gate(GateKind::Cnot, &[2 * i, 2 * i + 1]));
        elements.push(CircuitElement::stage(format!("link-{i}")));
    };
    let rotate = |elements: &mut Vec<CircuitElement>, k: usize| {
        elements.push(CircuitElement::gate(
            GateKind::Cnot,
            &[2 * k + 1, 2 * k + 2],
        ));
        elements.push(CircuitElement::gate(GateKind::H, &[2 * k + 1]));
    };

    let mut elements = Vec::new();
    // Parallel window: links 0..=s and the first s swaps.
    for i in 0..=s {
        create_link(&mut elements, i);
    }
    for k in 0..s {
        rotate(&mut elements, k);
    }
    elements.push(CircuitElement::stage("pre-measure-window"));
    for k in 0..s {
        elements.push(CircuitElement::measure(&[2 * k + 1, 2 * k + 2]));
    }
    elements.push(CircuitElement::stage("measure-window"));
    let window_end = 2 * s + 1;
    for k in 0..s {
        elements.push(CircuitElement::gate(
            GateKind::Cnot,
            &[2 * k + 2, window_end],
        ));
        elements.push(CircuitElement::gate(GateKind::Cz, &[2 * k + 1, window_end]));
    }
    elements.push(CircuitElement::stage("correct-window"));
    // Remaining swaps run sequentially with just-in-time link creation.
    for k in s..n - 1 {
        create_link(&mut elements, k + 1);
        rotate(&mut elements, k);
        elements.push(CircuitElement::stage(format!("pre-measure-{k}")));
        elements.push(CircuitElement::measure(&[2 * k + 1, 2 * k + 2]));
        elements.push(CircuitElement::stage(format!("measure-{k}")));
        elements.push(CircuitElement::gate(
            GateKind::Cnot,
            &[2 * k + 2, 2 * k + 3],
        ));
        elements.push(CircuitElement::gate(GateKind::Cz, &[2 * k + 1, 2 * k + 3]));
        elements.push(CircuitElement::stage(format!("correct-{k}")));
    }

    let circuit = Circuit::new(qubits, elements)?;
    let profile = simulate_profile(&circuit, &QuantumState::zero_state(qubits))?;
    let measured_peak = profile.peak.1;
    let resource_coherence = n as f64;
    let estimate = resource_coherence + 2.0 * s as f64;
    let ledger = BudgetLedger::new(0.0, resource_coherence, vec![4; n - 1])?;
    Ok(RepeaterRun {
        circuit,
        profile,
        measured_peak,
        estimate,
        ledger,
    })
}

/// Outcome of the Holevo-invariance demonstration.
#[derive(Debug, Clone)]
pub struct HolevoInvariance {
    pub chi_in: f64,
    pub chi_out: f64,
    /// Largest global coherence reached at any stage of any member's run.
    pub max_intermediate: f64,
}

/// Teleport every member of a single-qubit ensemble through one gadget and
/// compare the Holevo quantity before and after. The intermediate peak
/// exhibits that coherence is not an information monotone.
pub fn holevo_invariance(ensemble: &Ensemble) -> Result<HolevoInvariance> {
    if ensemble.qubit_count() != 1 {
        return Err(Error::InvalidParams {
            context: "holevo invariance runs single-qubit ensembles".into(),
        });
    }
    let chi_in = holevo_chi(ensemble)?;
    let mut outputs = Vec::new();
    let mut max_intermediate = 0.0_f64;
    for (weight, member) in ensemble.members() {
        let run = build_teleportation(1, member, 1.0)?;
        let (profile, states) = run.simulate()?;
        max_intermediate = max_intermediate.max(profile.peak.1);
        outputs.push((*weight, bob_marginal(&states, 1)?));
    }
    let chi_out = holevo_chi(&Ensemble::new(outputs)?)?;
    Ok(HolevoInvariance {
        chi_in,
        chi_out,
        max_intermediate,
    })
}
