//! Dense complex matrix/vector kernel: tensor products, partial trace,
//! Hermitian eigenvalues, and entropy-safe probability handling.
//!
//! Conventions used throughout the crate:
//! * matrices are square, row-major, over `Complex64`;
//! * qubit 0 is the most significant bit of the basis index, so the basis
//!   label of `|q0 q1 ... q_{n-1}>` reads left to right.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance for `hermitian_eigenvalues` inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Entries at or below this magnitude are treated as structural zeros when
/// the eigensolver splits a matrix into connected blocks.
const SPLIT_TOL: f64 = 1e-14;
/// Spectrum entries in [-PSD_TOL, 0) are clamped to zero before entropies.
const PSD_TOL: f64 = 1e-10;

/// Bit position (from the LSB) of qubit `q` in an `n`-qubit basis index.
#[inline]
pub fn bit_position(qubit_count: usize, qubit: usize) -> usize {
    qubit_count - 1 - qubit
}

/// Square complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::ONE;
        }
        m
    }

    /// Build from nested rows; every row must have the same length as the
    /// number of rows.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::dimension("matrix must have at least one row"));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in &rows {
            if row.len() != dim {
                return Err(Error::dimension(format!(
                    "row length {} does not match dimension {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(ComplexMatrix { dim, entries })
    }

    /// Outer product `v v†` of a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.entries[i * dim + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = Complex64::new(d, 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim)
            .map(|i| self.entries[i * self.dim + i])
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[j * self.dim + i] = self.entries[i * self.dim + j].conj();
            }
        }
        out
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != rhs.dim {
            return Err(Error::dimension(format!(
                "cannot multiply {}x{0} by {}x{1}",
                self.dim, rhs.dim
            )));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::ZERO {
                    continue;
                }
                let row = &rhs.entries[k * n..(k + 1) * n];
                let dst = &mut out.entries[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add_scaled(&mut self, rhs: &ComplexMatrix, factor: f64) {
        assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b * factor;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.entries {
            *a *= factor;
        }
    }

    /// Largest deviation from Hermitian symmetry, `max |A[i][j] - conj(A[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Largest deviation of `U†U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let gram = self.adjoint().mul(self).expect("same dim");
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let expected = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                worst = worst.max((gram.get(i, j) - expected).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Kronecker product. Entry `((i*db + k), (j*db + l)) = a[i][j] * b[k][l]`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let da = a.dim();
    let db = b.dim();
    let dim = da * db;
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Partial trace of a `2^qubit_count`-dimensional operator, keeping the
/// qubits listed in `keep` (strictly increasing).
pub fn partial_trace(
    rho: &ComplexMatrix,
    qubit_count: usize,
    keep: &[usize],
) -> Result<ComplexMatrix> {
    if rho.dim() != 1usize << qubit_count {
        return Err(Error::dimension(format!(
            "matrix dimension {} is not 2^{qubit_count}",
            rho.dim()
        )));
    }
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
    let t = traced.len();

    // Scatter the bits of a reduced index onto the kept qubit positions.
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
            for e in 0..1usize << t {
                let env = expand(e, &traced);
                sum += rho.get(r_base | env, c_base | env);
            }
            out.set(r, c, sum);
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
///
/// The matrix is first split into connected blocks of its nonzero pattern;
/// each block is solved by closed form (dims 1 and 2) or by Householder
/// tridiagonalization plus implicit-shift QL on the real symmetric embedding
/// `[[Re A, -Im A], [Im A, Re A]]`, whose doubled spectrum is then halved.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.dim();
    let mut eigs = Vec::with_capacity(n);
    for block in connected_blocks(a) {
        match block.len() {
            1 => eigs.push(a.get(block[0], block[0]).re),
            2 => {
                let (p, q) = (block[0], block[1]);
                let (lo, hi) = herm2_eigenvalues(a.get(p, p).re, a.get(q, q).re, a.get(p, q));
                eigs.push(lo);
                eigs.push(hi);
            }
            _ => eigs.extend(block_eigenvalues(a, &block)?),
        }
    }
    eigs.sort_by(|x, y| y.partial_cmp(x).expect("eigenvalues are finite"));
    Ok(eigs)
}

/// Eigenvalues of `[[a, c], [conj(c), b]]` with real `a`, `b`.
fn herm2_eigenvalues(a: f64, b: f64, c: Complex64) -> (f64, f64) {
    let mid = 0.5 * (a + b);
    let rad = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
    (mid - rad, mid + rad)
}

/// Connected components of the nonzero pattern, as sorted index lists.
fn connected_blocks(a: &ComplexMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if a.get(i, j).norm() > SPLIT_TOL {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Dense eigenvalues of one Hermitian block via the real embedding.
fn block_eigenvalues(a: &ComplexMatrix, block: &[usize]) -> Result<Vec<f64>> {
    let m = block.len();
    let n = 2 * m;
    // M = [[Re, -Im], [Im, Re]] is real symmetric with each eigenvalue of the
    // Hermitian block appearing exactly twice.
    let mut real = vec![0.0_f64; n * n];
    for (bi, &i) in block.iter().enumerate() {
        for (bj, &j) in block.iter().enumerate() {
            let z = a.get(i, j);
            real[bi * n + bj] = z.re;
            real[(bi + m) * n + bj + m] = z.re;
            real[bi * n + bj + m] = -z.im;
            real[(bi + m) * n + bj] = z.im;
        }
    }
    let (d, e) = tridiagonalize_symmetric(&mut real, n);
    let mut doubled = tridiagonal_eigenvalues(d, e)?;
    doubled.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    Ok(doubled.into_iter().step_by(2).collect())
}

/// Householder reduction of a real symmetric matrix (row-major, destroyed)
/// to tridiagonal form. Returns the diagonal and the subdiagonal, with
/// `e[i]` the coupling between rows `i-1` and `i` (`e[0] = 0`).
fn tridiagonalize_symmetric(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut e = vec![0.0_f64; n];
    for i in (1..n).rev() {
        let l = i; // the row segment a[i][0..l] is annihilated except its tail
        if l == 1 {
            e[i] = a[i * n];
            continue;
        }
        let mut scale = 0.0;
        for k in 0..l {
            scale += a[i * n + k].abs();
        }
        if scale == 0.0 {
            e[i] = a[i * n + l - 1];
            continue;
        }
        let mut h = 0.0;
        for k in 0..l {
            a[i * n + k] /= scale;
            h += a[i * n + k] * a[i * n + k];
        }
        let f = a[i * n + l - 1];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g; // H = u.u / 2 for the reflector u stored in a[i][0..l]
        a[i * n + l - 1] = f - g;

        // p = A u / H over the leading l x l block (lower triangle is valid).
        let mut p = vec![0.0_f64; l];
        for j in 0..l {
            let mut s = 0.0;
            for k in 0..l {
                let akj = if k <= j { a[j * n + k] } else { a[k * n + j] };
                s += akj * a[i * n + k];
            }
            p[j] = s / h;
        }
        let mut kk = 0.0;
        for j in 0..l {
            kk += a[i * n + j] * p[j];
        }
        kk /= 2.0 * h;
        for j in 0..l {
            p[j] -= kk * a[i * n + j];
        }
        // A <- A - u q' - q u' on the lower triangle.
        for j in 0..l {
            let uj = a[i * n + j];
            let qj = p[j];
            for k in 0..=j {
                a[j * n + k] -= uj * p[k] + qj * a[i * n + k];
            }
        }
    }
    let d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    (d, e)
}

/// Implicit-shift QL eigenvalues of a symmetric tridiagonal matrix.
/// `e[i]` couples rows `i-1` and `i` on input.
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    // Shift the subdiagonal so that e[i] couples rows i and i+1.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::invalid_state(
                    "tridiagonal QL iteration failed to converge",
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r } else { -r };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c) = (1.0_f64, 1.0_f64);
            let mut p = 0.0_f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                f = (d[i] - g) * s + 2.0 * c * b;
                p = s * f;
                d[i + 1] = g + p;
                g = c * f - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// Probability distribution with clamped, renormalized entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    probs: Vec<f64>,
}

impl ProbVector {
    /// Validates and normalizes raw probabilities. Entries in `[-1e-12, 0)`
    /// are clamped to zero; the sum must already be within `1e-6` of one.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(raw, 1e-12)
    }

    /// As [`ProbVector::new`] but accepting spectra whose negative drift is
    /// within the state-validation tolerance (`1e-10`).
    pub fn from_spectrum(raw: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(raw, PSD_TOL)
    }

    fn with_tolerance(raw: Vec<f64>, negative_tol: f64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidDistribution {
                context: "distribution must have at least one entry".into(),
            });
        }
        let mut probs = Vec::with_capacity(raw.len());
        for &p in &raw {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution {
                    context: format!("non-finite probability {p}"),
                });
            }
            if p < -negative_tol {
                return Err(Error::InvalidDistribution {
                    context: format!("probability {p:e} below -{negative_tol:e}"),
                });
            }
            probs.push(p.max(0.0));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution {
                context: format!("probabilities sum to {sum}, expected 1"),
            });
        }
        for p in &mut probs {
            *p /= sum;
        }
        Ok(ProbVector { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Shannon entropy in bits, with `0 log 0 = 0`.
    pub fn shannon_entropy(&self) -> f64 {
        shannon_entropy_raw(&self.probs)
    }
}

/// Entropy of a slice already known to be a distribution (no validation).
/// Each term is nonnegative, so the result is a clean +0.0 for point masses.
pub fn shannon_entropy_raw(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -(p * p.log2()))
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap()
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = tensor(&i2, &i2);
        assert_eq!(i4.max_abs_diff(&ComplexMatrix::identity(4)), 0.0);
    }

    #[test]
    fn tensor_of_basis_projectors() {
        // |0><0| (x) |1><1| has its only diagonal entry at index 1 (basis 01).
        let p0 = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        let p1 = ComplexMatrix::from_diagonal(&[0.0, 1.0]);
        let prod = tensor(&p0, &p1);
        let expected = ComplexMatrix::from_diagonal(&[0.0, 1.0, 0.0, 0.0]);
        assert!(prod.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn tensor_x_with_z_entries() {
        // Hand expansion of the 4x4 Kronecker product.
        let xz = tensor(&pauli_x(), &pauli_z());
        assert_eq!(xz.get(0, 2), c(1.0, 0.0));
        assert_eq!(xz.get(1, 3), c(-1.0, 0.0));
        assert_eq!(xz.get(0, 0), c(0.0, 0.0));
        assert_eq!(xz.get(3, 1), c(-1.0, 0.0));
    }

    #[test]
    fn partial_trace_of_bell_half() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let bell = vec![c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)];
        let rho = ComplexMatrix::outer(&bell);
        let reduced = partial_trace(&rho, 2, &[0]).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        assert!(reduced.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_state() {
        // |0><0| (x) |+><+|, keep qubit 1 -> |+><+|.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[c(inv, 0.0), c(inv, 0.0)]);
        let zero = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
        let rho = tensor(&zero, &plus);
        let reduced = partial_trace(&rho, 2, &[1]).unwrap();
        assert!(reduced.max_abs_diff(&plus) < 1e-12);
    }

    #[test]
    fn partial_trace_of_w3_single_qubit() {
        // Reduction of |W3><W3| to one qubit is diag(2/3, 1/3):
        // summing |amplitude|^2 over the 8-dim basis by hand.
        let a = 1.0 / 3.0_f64.sqrt();
        let mut w3 = vec![Complex64::ZERO; 8];
        w3[0b100] = c(a, 0.0);
        w3[0b010] = c(a, 0.0);
        w3[0b001] = c(a, 0.0);
        let rho = ComplexMatrix::outer(&w3);
        for q in 0..3 {
            let reduced = partial_trace(&rho, 3, &[q]).unwrap();
            let expected = ComplexMatrix::from_diagonal(&[2.0 / 3.0, 1.0 / 3.0]);
            assert!(reduced.max_abs_diff(&expected) < 1e-12, "qubit {q}");
        }
    }

    #[test]
    fn partial_trace_rejects_bad_inputs() {
        let rho = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&rho, 2, &[5]),
            Err(Error::IndexOutOfRange { .. })
        ));
        let odd = ComplexMatrix::identity(3);
        assert!(matches!(
            partial_trace(&odd, 2, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(partial_trace(&rho, 2, &[]).is_err());
        assert!(partial_trace(&rho, 2, &[1, 0]).is_err());
    }

    #[test]
    fn eigenvalues_of_maximally_mixed() {
        let m = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        let eigs = hermitian_eigenvalues(&m).unwrap();
        assert!((eigs[0] - 0.5).abs() < 1e-12);
        assert!((eigs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_plus_projector() {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let plus = ComplexMatrix::outer(&[c(inv, 0.0), c(inv, 0.0)]);
        let eigs = hermitian_eigenvalues(&plus).unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!(eigs[1].abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_depolarized_plus() {
        // (1-l)|+><+| + l I/2 at l = 0.5 has closed-form spectrum (1 +- (1-l))/2.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = ComplexMatrix::outer(&[c(inv, 0.0), c(inv, 0.0)]);
        m.scale(0.5);
        m.add_scaled(&ComplexMatrix::from_diagonal(&[0.5, 0.5]), 0.5);
        let eigs = hermitian_eigenvalues(&m).unwrap();
        assert!((eigs[0] - 0.75).abs() < 1e-12);
        assert!((eigs[1] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_reject_non_hermitian() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            hermitian_eigenvalues(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigenvalues_match_moments_on_dense_hermitian() {
        // Deterministic dense Hermitian matrix; check eigenvalues against the
        // first three moments tr A, tr A^2 (Frobenius), tr A^3.
        let n = 12;
        let mut m = ComplexMatrix::zeros(n);
        let mut seed = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in i..n {
                if i == j {
                    m.set(i, i, c(next(), 0.0));
                } else {
                    let z = c(next(), next());
                    m.set(i, j, z);
                    m.set(j, i, z.conj());
                }
            }
        }
        let eigs = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(eigs.len(), n);
        let trace: f64 = eigs.iter().sum();
        assert!((trace - m.trace().re).abs() < 1e-9);
        let frob: f64 = eigs.iter().map(|l| l * l).sum::<f64>().sqrt();
        assert!((frob - m.frobenius_norm()).abs() < 1e-9);
        let cube: f64 = eigs.iter().map(|l| l * l * l).sum();
        let m3 = m.mul(&m).unwrap().mul(&m).unwrap();
        assert!((cube - m3.trace().re).abs() < 1e-9);
        for w in eigs.windows(2) {
            assert!(w[0] >= w[1], "descending order");
        }
    }

    #[test]
    fn eigenvalues_match_laplacian_closed_form() {
        // tridiag(-1, 2, -1) of size n has eigenvalues 2 - 2 cos(k pi / (n+1)).
        // A diagonal phase similarity keeps the spectrum while making the
        // entries genuinely complex.
        let n = 64;
        let mut m = ComplexMatrix::zeros(n);
        let phase = |k: usize| Complex64::from_polar(1.0, 0.37 * k as f64);
        for i in 0..n {
            m.set(i, i, c(2.0, 0.0));
            if i + 1 < n {
                let off = phase(i) * (-1.0) * phase(i + 1).conj();
                m.set(i, i + 1, off);
                m.set(i + 1, i, off.conj());
            }
        }
        let eigs = hermitian_eigenvalues(&m).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in eigs.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_handle_clustered_spectra() {
        // c I + eps B keeps every eigenvalue within eps * ||B|| of c.
        let n = 16;
        let eps = 1e-8;
        let mut b = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let z = c(
                    ((i * 7 + j * 3) % 5) as f64 - 2.0,
                    if i == j { 0.0 } else { 1.0 },
                );
                b.set(i, j, z);
                b.set(j, i, z.conj());
            }
        }
        let mut m = ComplexMatrix::identity(n);
        m.scale(0.5);
        m.add_scaled(&b, eps);
        let eigs = hermitian_eigenvalues(&m).unwrap();
        let radius = eps * b.frobenius_norm();
        for lambda in &eigs {
            assert!((lambda - 0.5).abs() <= radius + 1e-12);
        }
        let sum: f64 = eigs.iter().sum();
        assert!((sum - m.trace().re).abs() < 1e-10);
    }

    #[test]
    fn shannon_entropy_cases() {
        let det = ProbVector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(det.shannon_entropy(), 0.0);

        // Appendix-style four equal diagonal elements.
        let uniform = ProbVector::new(vec![0.25; 4]).unwrap();
        assert!((uniform.shannon_entropy() - 2.0).abs() < 1e-12);

        let skew = ProbVector::new(vec![0.75, 0.25]).unwrap();
        assert!((skew.shannon_entropy() - 0.811278124459).abs() < 1e-12);
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::new(vec![]).is_err());
        assert!(ProbVector::new(vec![0.7, 0.4]).is_err());
        assert!(ProbVector::new(vec![0.5, 0.5, -1e-3]).is_err());
        // Tiny negative drift is clamped.
        let p = ProbVector::new(vec![1.0, -1e-13]).unwrap();
        assert_eq!(p.probs()[1], 0.0);
    }
}
