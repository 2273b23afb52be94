//! Circuit representation, stage-cut semantics, gate/channel application,
//! and the stage-resolved simulator producing coherence profiles.
//!
//! Measurement is always non-selective: a `Measure` element completely
//! dephases its targets in the computational basis, which keeps the engine
//! deterministic. Conditional corrections are expressed as coherent
//! controlled gates applied after the measurement.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{bit_position, ComplexMatrix};
use crate::state::{QuantumState, StateBody};

/// Unitarity tolerance for custom gates (shared with the `.qc` parser).
pub const UNITARY_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-9;

/// The gate alphabet of the engine: the named single- and two-qubit gates
/// plus an arbitrary single-qubit unitary escape hatch.
#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    T,
    Cnot,
    Cz,
    Custom(ComplexMatrix),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Custom(_) => "u",
        }
    }

    /// Number of qubits the gate acts on.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }

    /// Dense unitary of the gate (dim 2 or 4).
    pub fn matrix(&self) -> ComplexMatrix {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let rows = match self {
            GateKind::H => vec![
                vec![c(inv, 0.0), c(inv, 0.0)],
                vec![c(inv, 0.0), c(-inv, 0.0)],
            ],
            GateKind::X => vec![
                vec![c(0.0, 0.0), c(1.0, 0.0)],
                vec![c(1.0, 0.0), c(0.0, 0.0)],
            ],
            GateKind::Z => vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(-1.0, 0.0)],
            ],
            GateKind::S => vec![
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 1.0)],
            ],
            GateKind::T => {
                let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
                vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), t]]
            }
            GateKind::Cnot => {
                let mut m = ComplexMatrix::zeros(4);
                m.set(0, 0, Complex64::ONE);
                m.set(1, 1, Complex64::ONE);
                m.set(2, 3, Complex64::ONE);
                m.set(3, 2, Complex64::ONE);
                return m;
            }
            GateKind::Cz => return ComplexMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0]),
            GateKind::Custom(m) => return m.clone(),
        };
        ComplexMatrix::from_rows(rows).expect("static gate data")
    }

    fn check_unitary(&self) -> Result<()> {
        if let GateKind::Custom(m) = self {
            if m.dim() != 2 {
                return Err(Error::dimension("custom gates are single-qubit (dim 2)"));
            }
            let deviation = m.unitarity_deviation();
            if deviation > UNITARY_TOL {
                return Err(Error::NonUnitaryGate {
                    name: "u".into(),
                    deviation,
                });
            }
        }
        Ok(())
    }
}

/// One step of a circuit.
#[derive(Debug, Clone, PartialEq)]
pub enum CircuitElement {
    /// Unitary gate on one or two target qubits. For two-qubit gates the
    /// first target is the control.
    Gate { kind: GateKind, targets: Vec<usize> },
    /// Non-selective measurement: complete dephasing of the targets.
    Measure { targets: Vec<usize> },
    /// Partial dephasing channel `D_lambda(rho) = (1-lambda) rho + lambda Delta(rho)`
    /// on a single qubit.
    Dephase { lambda: f64, target: usize },
    /// Marker at which the simulator records the global state.
    StageCut { label: String },
}

impl CircuitElement {
    pub fn gate(kind: GateKind, targets: &[usize]) -> Self {
        CircuitElement::Gate {
            kind,
            targets: targets.to_vec(),
        }
    }

    pub fn measure(targets: &[usize]) -> Self {
        let mut targets = targets.to_vec();
        targets.sort_unstable();
        targets.dedup();
        CircuitElement::Measure { targets }
    }

    pub fn stage(label: impl Into<String>) -> Self {
        CircuitElement::StageCut {
            label: label.into(),
        }
    }

    fn validate(&self, qubit_count: usize) -> Result<()> {
        let check_index = |q: usize| -> Result<()> {
            if q >= qubit_count {
                Err(Error::IndexOutOfRange {
                    index: q,
                    qubit_count,
                })
            } else {
                Ok(())
            }
        };
        match self {
            CircuitElement::Gate { kind, targets } => {
                kind.check_unitary()?;
                if targets.len() != kind.arity() {
                    return Err(Error::dimension(format!(
                        "gate {} expects {} targets, got {}",
                        kind.name(),
                        kind.arity(),
                        targets.len()
                    )));
                }
                for &q in targets {
                    check_index(q)?;
                }
                if targets.len() == 2 && targets[0] == targets[1] {
                    return Err(Error::dimension("two-qubit gate targets must differ"));
                }
                Ok(())
            }
            CircuitElement::Measure { targets } => {
                if targets.is_empty() {
                    return Err(Error::dimension("measure target set must be nonempty"));
                }
                for &q in targets {
                    check_index(q)?;
                }
                Ok(())
            }
            CircuitElement::Dephase { lambda, target } => {
                if !(0.0..=1.0).contains(lambda) {
                    return Err(Error::InvalidParams {
                        context: format!("dephase lambda {lambda} outside [0, 1]"),
                    });
                }
                check_index(*target)
            }
            CircuitElement::StageCut { .. } => Ok(()),
        }
    }
}

/// Ordered sequence of gates, channels, non-selective measurements, and
/// stage-cut markers. Stage 0 is implicit before any element.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub qubit_count: usize,
    pub elements: Vec<CircuitElement>,
}

impl Circuit {
    pub fn new(qubit_count: usize, elements: Vec<CircuitElement>) -> Result<Self> {
        if qubit_count == 0 {
            return Err(Error::dimension("circuit needs at least one qubit"));
        }
        for (position, element) in elements.iter().enumerate() {
            element
                .validate(qubit_count)
                .map_err(|e| e.at_element(position))?;
        }
        Ok(Circuit {
            qubit_count,
            elements,
        })
    }

    /// Outcome alphabet sizes `m = 2^|targets|`, one per `Measure` element
    /// in circuit order. `Dephase` elements contribute nothing.
    pub fn measurement_layers(&self) -> Vec<usize> {
        self.elements
            .iter()
            .filter_map(|e| match e {
                CircuitElement::Measure { targets } => Some(1usize << targets.len()),
                _ => None,
            })
            .collect()
    }

    pub fn stage_cut_count(&self) -> usize {
        self.elements
            .iter()
            .filter(|e| matches!(e, CircuitElement::StageCut { .. }))
            .count()
    }
}

/// Per-stage record of the coherence bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub index: usize,
    pub label: String,
    pub total_coherence: f64,
    pub per_qubit: Vec<f64>,
    pub is_post_measurement: bool,
}

/// Stage-resolved coherence data of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceProfile {
    pub qubit_count: usize,
    pub stages: Vec<StageRecord>,
    /// `(stage index, bits)` of the maximum, ties broken toward the earliest stage.
    pub peak: (usize, f64),
}

impl CoherenceProfile {
    fn from_stages(qubit_count: usize, stages: Vec<StageRecord>) -> Result<Self> {
        let peak = peak_of_stages(&stages)?;
        Ok(CoherenceProfile {
            qubit_count,
            stages,
            peak,
        })
    }

    pub fn totals(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.total_coherence).collect()
    }
}

/// Argmax of the stage totals with ties broken toward the earliest stage.
pub fn peak_coherence(profile: &CoherenceProfile) -> Result<(usize, f64)> {
    peak_of_stages(&profile.stages)
}

fn peak_of_stages(stages: &[StageRecord]) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for stage in stages {
        match best {
            Some((_, value)) if stage.total_coherence <= value => {}
            _ => best = Some((stage.index, stage.total_coherence)),
        }
    }
    best.ok_or(Error::EmptyProfile)
}

/// Snapshot of the global state at a stage cut.
#[derive(Debug, Clone)]
pub struct StageState {
    pub stage_index: usize,
    pub state: QuantumState,
}

/// Apply one circuit element to a state. Gates keep pure states pure;
/// `Measure` and `Dephase` (with `lambda > 0`) promote to a density matrix.
pub fn apply_element(state: &QuantumState, element: &CircuitElement) -> Result<QuantumState> {
    element.validate(state.qubit_count())?;
    let n = state.qubit_count();
    match element {
        CircuitElement::StageCut { .. } => Ok(state.clone()),
        CircuitElement::Measure { targets } => state.dephase(targets),
        CircuitElement::Dephase { lambda, target } => {
            if *lambda == 0.0 {
                return Ok(state.clone());
            }
            let mut rho = state.to_density();
            let mask = 1usize << bit_position(n, *target);
            let dim = rho.dim();
            let entries = rho.entries_mut();
            let keep = 1.0 - lambda;
            for i in 0..dim {
                for j in 0..dim {
                    if (i ^ j) & mask != 0 {
                        entries[i * dim + j] *= keep;
                    }
                }
            }
            Ok(QuantumState::mixed_unchecked(n, rho))
        }
        CircuitElement::Gate { kind, targets } => {
            let mut out = state.clone();
            apply_gate(&mut out, kind, targets);
            Ok(out)
        }
    }
}

fn apply_gate(state: &mut QuantumState, kind: &GateKind, targets: &[usize]) {
    let n = state.qubit_count();
    match state.body_mut() {
        StateBody::Pure(amps) => match kind {
            GateKind::Cnot => {
                let control = 1usize << bit_position(n, targets[0]);
                let flip = 1usize << bit_position(n, targets[1]);
                for i in 0..amps.len() {
                    if i & control != 0 && i & flip == 0 {
                        amps.swap(i, i | flip);
                    }
                }
            }
            GateKind::Cz => {
                let mask = (1usize << bit_position(n, targets[0]))
                    | (1usize << bit_position(n, targets[1]));
                for (i, amp) in amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            kind => {
                let m = kind.matrix();
                apply_single_qubit_to_vector(amps, n, targets[0], &m);
            }
        },
        StateBody::Mixed(rho) => {
            // rho -> U rho U-dagger: act on the row index with U, then on the
            // column index with conj(U).
            let dim = rho.dim();
            match kind {
                GateKind::Cnot => {
                    let control = 1usize << bit_position(n, targets[0]);
                    let flip = 1usize << bit_position(n, targets[1]);
                    let entries = rho.entries_mut();
                    for i in 0..dim {
                        if i & control != 0 && i & flip == 0 {
                            let other = i | flip;
                            for j in 0..dim {
                                entries.swap(i * dim + j, other * dim + j);
                            }
                        }
                    }
                    for j in 0..dim {
                        if j & control != 0 && j & flip == 0 {
                            let other = j | flip;
                            for i in 0..dim {
                                entries.swap(i * dim + j, i * dim + other);
                            }
                        }
                    }
                }
                GateKind::Cz => {
                    let mask = (1usize << bit_position(n, targets[0]))
                        | (1usize << bit_position(n, targets[1]));
                    let entries = rho.entries_mut();
                    for i in 0..dim {
                        let si = i & mask == mask;
                        for j in 0..dim {
                            if si != (j & mask == mask) {
                                entries[i * dim + j] = -entries[i * dim + j];
                            }
                        }
                    }
                }
                kind => {
                    let m = kind.matrix();
                    apply_single_qubit_to_density(rho, n, targets[0], &m);
                }
            }
        }
    }
}

fn apply_single_qubit_to_vector(
    amps: &mut [Complex64],
    qubit_count: usize,
    target: usize,
    m: &ComplexMatrix,
) {
    let stride = 1usize << bit_position(qubit_count, target);
    let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    for i in 0..amps.len() {
        if i & stride == 0 {
            let j = i | stride;
            let (a0, a1) = (amps[i], amps[j]);
            amps[i] = m00 * a0 + m01 * a1;
            amps[j] = m10 * a0 + m11 * a1;
        }
    }
}

fn apply_single_qubit_to_density(
    rho: &mut ComplexMatrix,
    qubit_count: usize,
    target: usize,
    m: &ComplexMatrix,
) {
    let dim = rho.dim();
    let stride = 1usize << bit_position(qubit_count, target);
    let (m00, m01, m10, m11) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let entries = rho.entries_mut();
    // Rows: rho <- U rho.
    for i in 0..dim {
        if i & stride == 0 {
            let k = i | stride;
            for j in 0..dim {
                let (a0, a1) = (entries[i * dim + j], entries[k * dim + j]);
                entries[i * dim + j] = m00 * a0 + m01 * a1;
                entries[k * dim + j] = m10 * a0 + m11 * a1;
            }
        }
    }
    // Columns: rho <- rho U-dagger.
    let (c00, c01, c10, c11) = (m00.conj(), m01.conj(), m10.conj(), m11.conj());
    for j in 0..dim {
        if j & stride == 0 {
            let k = j | stride;
            for i in 0..dim {
                let (a0, a1) = (entries[i * dim + j], entries[i * dim + k]);
                entries[i * dim + j] = a0 * c00 + a1 * c01;
                entries[i * dim + k] = a0 * c10 + a1 * c11;
            }
        }
    }
}

/// Stage-resolved simulation: records a profile entry (and a state
/// snapshot) at stage 0 and after every `StageCut`.
pub fn simulate_stages(
    circuit: &Circuit,
    input: &QuantumState,
) -> Result<(CoherenceProfile, Vec<StageState>)> {
    run_simulation(circuit, input, true)
}

/// As [`simulate_stages`] but without keeping state snapshots.
pub fn simulate_profile(circuit: &Circuit, input: &QuantumState) -> Result<CoherenceProfile> {
    Ok(run_simulation(circuit, input, false)?.0)
}

fn run_simulation(
    circuit: &Circuit,
    input: &QuantumState,
    keep_states: bool,
) -> Result<(CoherenceProfile, Vec<StageState>)> {
    if input.qubit_count() != circuit.qubit_count {
        return Err(Error::dimension(format!(
            "input has {} qubits, circuit has {}",
            input.qubit_count(),
            circuit.qubit_count
        )));
    }

    let mut stages = Vec::new();
    let mut snapshots = Vec::new();
    let mut state = input.clone();
    let mut stage_index = 0usize;
    let mut measured_since_cut = false;

    let record = |state: &QuantumState,
                  label: &str,
                  index: usize,
                  post_measurement: bool,
                  stages: &mut Vec<StageRecord>,
                  snapshots: &mut Vec<StageState>|
     -> Result<()> {
        stages.push(StageRecord {
            index,
            label: label.to_string(),
            total_coherence: state.relative_entropy_of_coherence()?,
            per_qubit: state.reduced_coherences()?,
            is_post_measurement: post_measurement,
        });
        if keep_states {
            snapshots.push(StageState {
                stage_index: index,
                state: state.clone(),
            });
        }
        Ok(())
    };

    record(&state, "init", 0, false, &mut stages, &mut snapshots)?;

    for (position, element) in circuit.elements.iter().enumerate() {
        if let CircuitElement::StageCut { label } = element {
            stage_index += 1;
            record(
                &state,
                label,
                stage_index,
                measured_since_cut,
                &mut stages,
                &mut snapshots,
            )?;
            measured_since_cut = false;
            continue;
        }
        state = apply_element(&state, element).map_err(|e| e.at_element(position))?;
        if matches!(element, CircuitElement::Measure { .. }) {
            measured_since_cut = true;
        }
        let trace = state.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::invalid_state(format!(
                "trace drifted to {trace} after element {position}"
            )));
        }
    }

    Ok((
        CoherenceProfile::from_stages(circuit.qubit_count, stages)?,
        snapshots,
    ))
}
