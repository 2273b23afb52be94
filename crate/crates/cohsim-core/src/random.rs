//! Seeded state and unitary generators for the property suites.
//!
//! Pure states are Haar-like (normalized complex Gaussian amplitudes);
//! mixed states are partial traces of larger random pure states, which
//! covers full-rank and rank-deficient spectra.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;
use crate::state::{compose, QuantumState};

/// The deterministic generator used by every randomized suite.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Haar-like pure state on `qubit_count` qubits.
pub fn random_pure_state(qubit_count: usize, rng: &mut impl Rng) -> QuantumState {
    let dim = 1usize << qubit_count;
    let mut amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    QuantumState::pure(qubit_count, amps).expect("normalized by construction")
}

/// Random mixed state obtained by tracing `env_qubits` environment qubits
/// out of a random pure state. Rank is `min(2^n, 2^env_qubits)`.
pub fn random_mixed_state(
    qubit_count: usize,
    env_qubits: usize,
    rng: &mut impl Rng,
) -> QuantumState {
    assert!(env_qubits >= 1, "an environment is required for mixing");
    let joint = random_pure_state(qubit_count + env_qubits, rng);
    let keep: Vec<usize> = (0..qubit_count).collect();
    joint.partial_trace_keep(&keep).expect("valid reduction")
}

/// Uniform Bloch angles `(theta, gamma)`.
pub fn random_bloch_angles(rng: &mut impl Rng) -> (f64, f64) {
    let theta = rng.random::<f64>() * std::f64::consts::PI;
    let gamma = rng.random::<f64>() * std::f64::consts::TAU;
    (theta, gamma)
}

/// Product of independent random single-qubit pure states.
pub fn random_product_state(qubit_count: usize, rng: &mut impl Rng) -> QuantumState {
    let parts: Vec<QuantumState> = (0..qubit_count)
        .map(|_| {
            let (theta, gamma) = random_bloch_angles(rng);
            QuantumState::bloch(theta, gamma)
        })
        .collect();
    let positions: Vec<[usize; 1]> = (0..qubit_count).map(|q| [q]).collect();
    let refs: Vec<(&QuantumState, &[usize])> = parts
        .iter()
        .zip(&positions)
        .map(|(p, pos)| (p, pos.as_slice()))
        .collect();
    compose(&refs, qubit_count).expect("disjoint positions")
}

/// Random computational basis state (zero coherence).
pub fn random_basis_state(qubit_count: usize, rng: &mut impl Rng) -> QuantumState {
    let index = rng.random_range(0..1usize << qubit_count);
    QuantumState::basis_state(qubit_count, index)
}

/// Haar-random single-qubit unitary.
pub fn random_unitary2(rng: &mut impl Rng) -> ComplexMatrix {
    // Gram-Schmidt on a complex Gaussian 2x2.
    let mut col0 = [
        Complex64::new(gaussian(rng), gaussian(rng)),
        Complex64::new(gaussian(rng), gaussian(rng)),
    ];
    let norm0 = (col0[0].norm_sqr() + col0[1].norm_sqr()).sqrt();
    col0[0] /= norm0;
    col0[1] /= norm0;
    let mut col1 = [
        Complex64::new(gaussian(rng), gaussian(rng)),
        Complex64::new(gaussian(rng), gaussian(rng)),
    ];
    let overlap = col0[0].conj() * col1[0] + col0[1].conj() * col1[1];
    col1[0] -= overlap * col0[0];
    col1[1] -= overlap * col0[1];
    let norm1 = (col1[0].norm_sqr() + col1[1].norm_sqr()).sqrt();
    col1[0] /= norm1;
    col1[1] /= norm1;
    ComplexMatrix::from_rows(vec![vec![col0[0], col1[0]], vec![col0[1], col1[1]]])
        .expect("2x2 shape")
}

/// Random probability vector of the given length (Dirichlet-flat via
/// exponential sampling).
pub fn random_probs(len: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..len)
        .map(|_| -rng.random::<f64>().max(1e-12).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    for p in &mut raw {
        *p /= sum;
    }
    raw
}
