//! Quantum state representation (pure and mixed), the dephasing map, the
//! relative entropy of coherence, von Neumann entropy, and the Holevo
//! quantity.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, bit_position, hermitian_eigenvalues, ComplexMatrix, ProbVector};

const NORM_TOL: f64 = 1e-9;
/// Coherence values in [-COHERENCE_CLAMP, 0) are reported as zero.
const COHERENCE_CLAMP: f64 = 1e-9;

/// State of an ordered qubit register, stored as a statevector while the
/// evolution is unitary and as a density matrix afterwards.
#[derive(Debug, Clone, PartialEq)]
pub enum StateBody {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    qubit_count: usize,
    body: StateBody,
}

impl QuantumState {
    /// Pure state from amplitudes; the norm must be 1 within `1e-9`.
    pub fn pure(qubit_count: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if qubit_count == 0 || amplitudes.len() != 1 << qubit_count {
            return Err(Error::dimension(format!(
                "{} amplitudes do not form a {qubit_count}-qubit state",
                amplitudes.len()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid_state(format!(
                "statevector norm^2 = {norm_sq}, expected 1"
            )));
        }
        Ok(QuantumState {
            qubit_count,
            body: StateBody::Pure(amplitudes),
        })
    }

    /// Mixed state from a density matrix; Hermitian within `1e-10` and unit
    /// trace within `1e-9`. Positivity drift is enforced where spectra are
    /// taken.
    pub fn mixed(qubit_count: usize, rho: ComplexMatrix) -> Result<Self> {
        if qubit_count == 0 || rho.dim() != 1 << qubit_count {
            return Err(Error::dimension(format!(
                "density matrix dim {} does not match {qubit_count} qubits",
                rho.dim()
            )));
        }
        let deviation = rho.hermitian_deviation();
        if deviation > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = rho.trace();
        if (trace.re - 1.0).abs() > NORM_TOL || trace.im.abs() > NORM_TOL {
            return Err(Error::invalid_state(format!(
                "density matrix trace = {trace}, expected 1"
            )));
        }
        Ok(QuantumState {
            qubit_count,
            body: StateBody::Mixed(rho),
        })
    }

    pub(crate) fn mixed_unchecked(qubit_count: usize, rho: ComplexMatrix) -> Self {
        QuantumState {
            qubit_count,
            body: StateBody::Mixed(rho),
        }
    }

    /// Computational basis state `|index>`.
    pub fn basis_state(qubit_count: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << qubit_count];
        amps[index] = Complex64::ONE;
        QuantumState {
            qubit_count,
            body: StateBody::Pure(amps),
        }
    }

    /// `|0...0>` on `qubit_count` qubits.
    pub fn zero_state(qubit_count: usize) -> Self {
        Self::basis_state(qubit_count, 0)
    }

    /// Single-qubit `cos(theta/2)|0> + e^{i gamma} sin(theta/2)|1>`.
    pub fn bloch(theta: f64, gamma: f64) -> Self {
        let amps = vec![
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), gamma),
        ];
        QuantumState {
            qubit_count: 1,
            body: StateBody::Pure(amps),
        }
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dim(&self) -> usize {
        1 << self.qubit_count
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.body, StateBody::Pure(_))
    }

    pub fn body(&self) -> &StateBody {
        &self.body
    }

    pub fn amplitudes(&self) -> Option<&[Complex64]> {
        match &self.body {
            StateBody::Pure(a) => Some(a),
            StateBody::Mixed(_) => None,
        }
    }

    pub(crate) fn body_mut(&mut self) -> &mut StateBody {
        &mut self.body
    }

    /// Density-matrix view (outer product for pure states).
    pub fn to_density(&self) -> ComplexMatrix {
        match &self.body {
            StateBody::Pure(a) => ComplexMatrix::outer(a),
            StateBody::Mixed(rho) => rho.clone(),
        }
    }

    /// Computational-basis probabilities (the diagonal of the density matrix).
    pub fn diagonal_probs(&self) -> Vec<f64> {
        match &self.body {
            StateBody::Pure(a) => a.iter().map(|z| z.norm_sqr()).collect(),
            StateBody::Mixed(rho) => rho.diagonal().iter().map(|z| z.re).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.body {
            StateBody::Pure(a) => a.iter().map(|z| z.norm_sqr()).sum(),
            StateBody::Mixed(rho) => rho.trace().re,
        }
    }

    /// Complete dephasing of the target qubits in the computational basis.
    /// Off-diagonal elements connecting basis states that differ on any
    /// target qubit are zeroed; the result is always a `Mixed` state.
    pub fn dephase(&self, targets: &[usize]) -> Result<QuantumState> {
        if targets.is_empty() {
            return Err(Error::dimension("dephase target set must be nonempty"));
        }
        let mut mask = 0usize;
        for &q in targets {
            if q >= self.qubit_count {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    qubit_count: self.qubit_count,
                });
            }
            mask |= 1 << bit_position(self.qubit_count, q);
        }
        let mut rho = self.to_density();
        let dim = rho.dim();
        let entries = rho.entries_mut();
        for i in 0..dim {
            for j in 0..dim {
                if (i ^ j) & mask != 0 {
                    entries[i * dim + j] = Complex64::ZERO;
                }
            }
        }
        Ok(QuantumState::mixed_unchecked(self.qubit_count, rho))
    }

    /// Full dephasing map: every off-diagonal element removed.
    pub fn dephase_all(&self) -> QuantumState {
        let targets: Vec<usize> = (0..self.qubit_count).collect();
        self.dephase(&targets)
            .expect("full register is always valid")
    }

    /// Von Neumann entropy in bits. Exactly zero for pure states, computed
    /// from the spectrum otherwise.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        match &self.body {
            StateBody::Pure(_) => Ok(0.0),
            StateBody::Mixed(rho) => {
                let eigs = hermitian_eigenvalues(rho)?;
                Ok(ProbVector::from_spectrum(eigs)?.shannon_entropy())
            }
        }
    }

    /// Relative entropy of coherence `S(rho_diag) - S(rho)` in bits.
    pub fn relative_entropy_of_coherence(&self) -> Result<f64> {
        let diag_entropy = {
            let mut probs = self.diagonal_probs();
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(Error::InvalidDistribution {
                    context: format!("diagonal sums to {sum}, expected 1"),
                });
            }
            for p in &mut probs {
                *p = p.max(0.0) / sum;
            }
            linalg::shannon_entropy_raw(&probs)
        };
        let value = diag_entropy - self.von_neumann_entropy()?;
        Ok(clamp_coherence(value))
    }

    /// Reduced state on the kept qubits (strictly increasing indices).
    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<QuantumState> {
        match &self.body {
            StateBody::Mixed(rho) => {
                let reduced = linalg::partial_trace(rho, self.qubit_count, keep)?;
                Ok(QuantumState::mixed_unchecked(keep.len(), reduced))
            }
            StateBody::Pure(amps) => {
                let reduced = reduce_pure(amps, self.qubit_count, keep)?;
                Ok(QuantumState::mixed_unchecked(keep.len(), reduced))
            }
        }
    }

    /// Relative entropy of coherence of every single-qubit reduction.
    pub fn reduced_coherences(&self) -> Result<Vec<f64>> {
        (0..self.qubit_count)
            .map(|q| {
                self.partial_trace_keep(&[q])?
                    .relative_entropy_of_coherence()
            })
            .collect()
    }

    /// Overlap `<target|rho|target>` with a pure reference state.
    pub fn fidelity_with_pure(&self, target: &[Complex64]) -> Result<f64> {
        if target.len() != self.dim() {
            return Err(Error::dimension("fidelity target has wrong dimension"));
        }
        match &self.body {
            StateBody::Pure(a) => {
                let overlap: Complex64 = target.iter().zip(a).map(|(t, a)| t.conj() * a).sum();
                Ok(overlap.norm_sqr())
            }
            StateBody::Mixed(rho) => {
                let mut sum = Complex64::ZERO;
                for i in 0..rho.dim() {
                    for j in 0..rho.dim() {
                        sum += target[i].conj() * rho.get(i, j) * target[j];
                    }
                }
                Ok(sum.re)
            }
        }
    }
}

fn clamp_coherence(value: f64) -> f64 {
    if (-COHERENCE_CLAMP..0.0).contains(&value) {
        0.0
    } else {
        value
    }
}

/// Reduced density matrix of a pure state without materializing the full
/// outer product.
fn reduce_pure(amps: &[Complex64], qubit_count: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    if keep.is_empty() {
        return Err(Error::dimension("keep set must be nonempty"));
    }
    for w in keep.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::dimension("keep set must be strictly increasing"));
        }
    }
    for &q in keep {
        if q >= qubit_count {
            return Err(Error::IndexOutOfRange {
                index: q,
                qubit_count,
            });
        }
    }
    let k = keep.len();
    let traced: Vec<usize> = (0..qubit_count).filter(|q| !keep.contains(q)).collect();
    let expand = |bits: usize, qubits: &[usize]| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in qubits.iter().enumerate() {
            let bit = (bits >> (qubits.len() - 1 - pos)) & 1;
            idx |= bit << bit_position(qubit_count, q);
        }
        idx
    };
    let mut out = ComplexMatrix::zeros(1 << k);
    for r in 0..1usize << k {
        let r_base = expand(r, keep);
        for c in 0..1usize << k {
            let c_base = expand(c, keep);
            let mut sum = Complex64::ZERO;
            for e in 0..1usize << traced.len() {
                let env = expand(e, &traced);
                sum += amps[r_base | env] * amps[c_base | env].conj();
            }
            out.set(r, c, sum);
        }
    }
    Ok(out)
}

/// Compose disjoint register states into one state on `total_qubits`.
/// `parts` assigns each component state to its (strictly increasing) qubit
/// positions; together the positions must cover every qubit exactly once.
pub fn compose(parts: &[(&QuantumState, &[usize])], total_qubits: usize) -> Result<QuantumState> {
    let mut seen = vec![false; total_qubits];
    for (part, positions) in parts {
        if positions.len() != part.qubit_count() {
            return Err(Error::dimension(
                "component position count does not match its qubit count",
            ));
        }
        for &q in *positions {
            if q >= total_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    qubit_count: total_qubits,
                });
            }
            if seen[q] {
                return Err(Error::dimension(format!("qubit {q} assigned twice")));
            }
            seen[q] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::dimension("composition does not cover every qubit"));
    }

    // Sub-index of one component inside a full basis index.
    let sub_index = |full: usize, positions: &[usize]| -> usize {
        let mut sub = 0usize;
        for (pos, &q) in positions.iter().enumerate() {
            let bit = (full >> bit_position(total_qubits, q)) & 1;
            sub |= bit << (positions.len() - 1 - pos);
        }
        sub
    };

    let dim = 1usize << total_qubits;
    if parts.iter().all(|(p, _)| p.is_pure()) {
        let mut amps = vec![Complex64::ZERO; dim];
        for (full, amp) in amps.iter_mut().enumerate() {
            let mut value = Complex64::ONE;
            for (part, positions) in parts {
                value *= part.amplitudes().expect("pure")[sub_index(full, positions)];
                if value == Complex64::ZERO {
                    break;
                }
            }
            *amp = value;
        }
        QuantumState::pure(total_qubits, amps)
    } else {
        let densities: Vec<ComplexMatrix> = parts.iter().map(|(p, _)| p.to_density()).collect();
        let mut rho = ComplexMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                let mut value = Complex64::ONE;
                for ((_, positions), density) in parts.iter().zip(&densities) {
                    value *= density.get(sub_index(i, positions), sub_index(j, positions));
                    if value == Complex64::ZERO {
                        break;
                    }
                }
                rho.set(i, j, value);
            }
        }
        QuantumState::mixed(total_qubits, rho)
    }
}

/// Weighted ensemble of same-size states for Holevo-quantity computations.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, QuantumState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, QuantumState)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid_state(
                "ensemble must have at least one member",
            ));
        }
        let qubit_count = members[0].1.qubit_count();
        for (weight, state) in &members {
            if *weight <= 0.0 || *weight > 1.0 {
                return Err(Error::invalid_state(format!(
                    "ensemble weight {weight} outside (0, 1]"
                )));
            }
            if state.qubit_count() != qubit_count {
                return Err(Error::MixedDimensions {
                    left: qubit_count,
                    right: state.qubit_count(),
                });
            }
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid_state(format!(
                "ensemble weights sum to {total}, expected 1"
            )));
        }
        Ok(Ensemble { members })
    }

    pub fn members(&self) -> &[(f64, QuantumState)] {
        &self.members
    }

    pub fn qubit_count(&self) -> usize {
        self.members[0].1.qubit_count()
    }

    /// Ensemble average as a density matrix.
    pub fn average_state(&self) -> QuantumState {
        let dim = self.members[0].1.dim();
        let mut avg = ComplexMatrix::zeros(dim);
        for (weight, state) in &self.members {
            avg.add_scaled(&state.to_density(), *weight);
        }
        QuantumState::mixed_unchecked(self.qubit_count(), avg)
    }
}

/// Holevo quantity `chi(E) = S(avg) - sum_x p_x S(rho_x)` in bits.
pub fn holevo_chi(ensemble: &Ensemble) -> Result<f64> {
    let avg_entropy = ensemble.average_state().von_neumann_entropy()?;
    let mut member_term = 0.0;
    for (weight, state) in ensemble.members() {
        member_term += weight * state.von_neumann_entropy()?;
    }
    Ok((avg_entropy - member_term).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn plus() -> QuantumState {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::pure(1, vec![c(inv, 0.0), c(inv, 0.0)]).unwrap()
    }

    fn bell_phi_plus() -> QuantumState {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        QuantumState::pure(2, vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)]).unwrap()
    }

    fn w_state(n: usize) -> QuantumState {
        let a = 1.0 / (n as f64).sqrt();
        let mut amps = vec![Complex64::ZERO; 1 << n];
        for k in 0..n {
            amps[1 << bit_position(n, k)] = c(a, 0.0);
        }
        QuantumState::pure(n, amps).unwrap()
    }

    fn ghz_state(n: usize) -> QuantumState {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = c(inv, 0.0);
        amps[(1 << n) - 1] = c(inv, 0.0);
        QuantumState::pure(n, amps).unwrap()
    }

    /// Pre-measurement state of one teleportation gadget on |0>:
    /// (|000> + |011> + |100> + |111>)/2.
    fn pre_measurement_state() -> QuantumState {
        let mut amps = vec![Complex64::ZERO; 8];
        for idx in [0b000, 0b011, 0b100, 0b111] {
            amps[idx] = c(0.5, 0.0);
        }
        QuantumState::pure(3, amps).unwrap()
    }

    #[test]
    fn dephase_plus_gives_maximally_mixed() {
        let dephased = plus().dephase(&[0]).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        assert!(dephased.to_density().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn dephase_fixes_incoherent_states() {
        let zero = QuantumState::zero_state(1);
        let dephased = zero.dephase(&[0]).unwrap();
        assert!(dephased.to_density().max_abs_diff(&zero.to_density()) < 1e-15);
        // Idempotence.
        let twice = dephased.dephase(&[0]).unwrap();
        assert!(twice.to_density().max_abs_diff(&dephased.to_density()) < 1e-15);
    }

    #[test]
    fn dephase_pre_measurement_state_is_uniform_four() {
        let dephased = pre_measurement_state().dephase_all();
        let probs = dephased.diagonal_probs();
        for (idx, p) in probs.iter().enumerate() {
            let expected = match idx {
                0b000 | 0b011 | 0b100 | 0b111 => 0.25,
                _ => 0.0,
            };
            assert!((p - expected).abs() < 1e-12, "index {idx}");
        }
        assert!(dephased.relative_entropy_of_coherence().unwrap().abs() < 1e-12);
    }

    #[test]
    fn entropy_of_pure_states_is_zero() {
        assert_eq!(plus().von_neumann_entropy().unwrap(), 0.0);
        assert_eq!(bell_phi_plus().von_neumann_entropy().unwrap(), 0.0);
    }

    #[test]
    fn entropy_of_maximally_mixed_two_qubits() {
        let rho = ComplexMatrix::from_diagonal(&[0.25; 4]);
        let state = QuantumState::mixed(2, rho).unwrap();
        assert!((state.von_neumann_entropy().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_of_binary_diagonal() {
        let rho = ComplexMatrix::from_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
        let state = QuantumState::mixed(1, rho).unwrap();
        assert!((state.von_neumann_entropy().unwrap() - 0.918295834054).abs() < 1e-12);
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(
            QuantumState::zero_state(4)
                .relative_entropy_of_coherence()
                .unwrap(),
            0.0
        );
        let w3 = w_state(3).relative_entropy_of_coherence().unwrap();
        assert!((w3 - 3.0_f64.log2()).abs() < 1e-12);
        let ghz7 = ghz_state(7).relative_entropy_of_coherence().unwrap();
        assert!((ghz7 - 1.0).abs() < 1e-12);
        let pre = pre_measurement_state()
            .relative_entropy_of_coherence()
            .unwrap();
        assert!((pre - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reduced_coherence_examples() {
        let product = compose(&[(&plus(), &[0]), (&QuantumState::zero_state(1), &[1])], 2).unwrap();
        let coherences = product.reduced_coherences().unwrap();
        assert!((coherences[0] - 1.0).abs() < 1e-12);
        assert!(coherences[1].abs() < 1e-12);

        let bell = bell_phi_plus().reduced_coherences().unwrap();
        assert!(bell[0].abs() < 1e-12);
        assert!(bell[1].abs() < 1e-12);

        let pre = pre_measurement_state().reduced_coherences().unwrap();
        assert!((pre[0] - 1.0).abs() < 1e-12);
        assert!(pre[1].abs() < 1e-12);
        assert!(pre[2].abs() < 1e-12);
    }

    #[test]
    fn holevo_of_four_bell_states() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bells = [
            vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)],
            vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-inv, 0.0)],
            vec![c(0.0, 0.0), c(inv, 0.0), c(inv, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(inv, 0.0), c(-inv, 0.0), c(0.0, 0.0)],
        ];
        let members = bells
            .into_iter()
            .map(|amps| (0.25, QuantumState::pure(2, amps).unwrap()))
            .collect();
        let chi = holevo_chi(&Ensemble::new(members).unwrap()).unwrap();
        assert!((chi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_of_singleton_is_zero() {
        let e = Ensemble::new(vec![(1.0, bell_phi_plus())]).unwrap();
        assert_eq!(holevo_chi(&e).unwrap(), 0.0);
    }

    #[test]
    fn holevo_of_zero_plus_ensemble() {
        // Oracle: the average state has eigenvalues (1 +- 1/sqrt(2))/2.
        let e = Ensemble::new(vec![(0.5, QuantumState::zero_state(1)), (0.5, plus())]).unwrap();
        let chi = holevo_chi(&e).unwrap();
        let lo = 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
        let hi = 0.5 * (1.0 + std::f64::consts::FRAC_1_SQRT_2);
        let oracle = -(lo * lo.log2() + hi * hi.log2());
        assert!((chi - oracle).abs() < 1e-12);
        assert!((chi - 0.600876).abs() < 1e-6);
    }

    #[test]
    fn ensemble_rejects_mixed_sizes() {
        let result = Ensemble::new(vec![
            (0.5, QuantumState::zero_state(1)),
            (0.5, bell_phi_plus()),
        ]);
        assert!(matches!(result, Err(Error::MixedDimensions { .. })));
    }

    #[test]
    fn compose_interleaves_registers() {
        // Bell pair on qubits (0, 2), |1> on qubit 1.
        let one = QuantumState::basis_state(1, 1);
        let state = compose(&[(&bell_phi_plus(), &[0, 2]), (&one, &[1])], 3).unwrap();
        let amps = state.amplitudes().unwrap();
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        assert!((amps[0b010].re - inv).abs() < 1e-12);
        assert!((amps[0b111].re - inv).abs() < 1e-12);
        assert!(amps[0b000].norm() < 1e-12);
    }

    #[test]
    fn pure_state_coherence_matches_density_route() {
        // Both code paths of C_r must agree for pure states.
        let state = QuantumState::bloch(1.1, 0.7);
        let pure_route = state.relative_entropy_of_coherence().unwrap();
        let mixed = QuantumState::mixed(1, state.to_density()).unwrap();
        let density_route = mixed.relative_entropy_of_coherence().unwrap();
        assert!((pure_route - density_route).abs() < 1e-10);
    }
}
