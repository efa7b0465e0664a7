//! Dense qubit-state primitives: Pauli operators, measurement directions,
//! pure and mixed states, and the full-body Pauli correlation tensor.
//!
//! Basis ordering is big-endian: qubit 0 is the leftmost tensor factor and
//! the most significant bit of a basis index.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of qubits handled by dense storage.
pub const DEFAULT_MAX_QUBITS: usize = 8;

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-9;

static MAX_QUBITS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_QUBITS);

/// Current qubit cap for the named state constructors.
pub fn max_qubits() -> usize {
    MAX_QUBITS.load(Ordering::Relaxed)
}

/// Raise or lower the qubit cap. Dense memory grows as 4^N, so values above
/// 10 are rarely useful.
pub fn set_max_qubits(limit: usize) {
    MAX_QUBITS.store(limit.max(1), Ordering::Relaxed);
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("qubit count must be positive".into()));
    }
    let limit = max_qubits();
    if n > limit {
        return Err(Error::TooManyQubits {
            requested: n,
            limit,
        });
    }
    Ok(())
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Square complex matrix in dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix(DMatrix<Complex64>);

impl ComplexSquareMatrix {
    /// Builds a `dim × dim` matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub(crate) fn from_inner(m: DMatrix<Complex64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub(crate) fn matrix2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self(DMatrix::from_row_slice(2, 2, &[a, b, c, d]))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<Complex64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self(self.0.map(|z| z * factor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Largest entrywise deviation of `U†U` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let prod = self.0.adjoint() * &self.0;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((prod[(r, c)] - target).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Single-qubit Pauli matrix.
pub fn pauli(axis: Axis) -> ComplexSquareMatrix {
    match axis {
        Axis::X => ComplexSquareMatrix::matrix2(ZERO, ONE, ONE, ZERO),
        Axis::Y => ComplexSquareMatrix::matrix2(ZERO, -I, I, ZERO),
        Axis::Z => ComplexSquareMatrix::matrix2(ONE, ZERO, ZERO, -ONE),
    }
}

/// Real 3-vector on (or, for intermediate algebra, off) the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const E_X: BlochVector = BlochVector::new(1.0, 0.0, 0.0);
    pub const E_Y: BlochVector = BlochVector::new(0.0, 1.0, 0.0);
    pub const E_Z: BlochVector = BlochVector::new(0.0, 0.0, 1.0);

    /// A measurement direction; rejects vectors whose norm is not 1 within 1e-12.
    pub fn direction(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Self::new(x, y, z);
        v.check_unit()?;
        Ok(v)
    }

    /// Rescales a non-zero vector onto the sphere.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let n = (x * x + y * y + z * z).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        Ok(Self::new(x / n, y / n, z / n))
    }

    /// Point with polar angle `theta` and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        Self::new(s * phi.cos(), s * phi.sin(), theta.cos())
    }

    pub fn components(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn distance(&self, other: &Self) -> f64 {
        let d = [self.x - other.x, self.y - other.y, self.z - other.z];
        (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    pub fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > NORM_TOL || !n.is_finite() {
            return Err(Error::NonUnitDirection(n));
        }
        Ok(())
    }

    /// Bloch vector of a traceless Hermitian 2×2 operator, `tr[M σ_i]/2`.
    pub fn of_operator(m: &ComplexSquareMatrix) -> Result<Self> {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: m.dim(),
            });
        }
        let comp = |axis| m.mul(&pauli(axis)).trace().re / 2.0;
        Ok(Self::new(comp(Axis::X), comp(Axis::Y), comp(Axis::Z)))
    }
}

/// `u·σ` without the unit-norm check; multilinear in `u`.
pub fn sigma_linear(u: &BlochVector) -> ComplexSquareMatrix {
    ComplexSquareMatrix::matrix2(
        Complex64::new(u.z, 0.0),
        Complex64::new(u.x, -u.y),
        Complex64::new(u.x, u.y),
        Complex64::new(-u.z, 0.0),
    )
}

/// Spin observable `σ_u = u·σ` along a unit direction.
pub fn sigma_u(u: &BlochVector) -> Result<ComplexSquareMatrix> {
    u.check_unit()?;
    Ok(sigma_linear(u))
}

/// Pure N-qubit state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "amplitude count {len} is not a power of two ≥ 2"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

impl PureState {
    /// Wraps normalized amplitudes; the squared norm must be 1 within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm2: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm2} differs from 1")));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn from_unnormalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState("zero or non-finite vector".into()));
        }
        Ok(Self {
            num_qubits,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::from_unnormalized(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!("basis index {index} ≥ {dim}")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes: amps,
        })
    }

    /// Single-qubit pure state with the given Bloch vector.
    pub fn qubit(direction: &BlochVector) -> Result<Self> {
        direction.check_unit()?;
        let theta = direction.z.clamp(-1.0, 1.0).acos();
        let phi = direction.y.atan2(direction.x);
        Ok(Self {
            num_qubits: 1,
            amplitudes: vec![
                Complex64::new((theta / 2.0).cos(), 0.0),
                Complex64::from_polar((theta / 2.0).sin(), phi),
            ],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amplitudes.len() * other.amplitudes.len());
        for a in &self.amplitudes {
            for b in &other.amplitudes {
                amps.push(a * b);
            }
        }
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amplitudes: amps,
        }
    }

    /// Applies a 2×2 operator to one qubit (no renormalization).
    pub fn apply_local(&mut self, qubit: usize, op: &ComplexSquareMatrix) -> Result<()> {
        if op.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                actual: op.dim(),
            });
        }
        if qubit >= self.num_qubits {
            return Err(Error::InvalidParameter(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        let (a, b, c, d) = (op.entry(0, 0), op.entry(0, 1), op.entry(1, 0), op.entry(1, 1));
        let bit = 1usize << (self.num_qubits - 1 - qubit);
        for idx in 0..self.amplitudes.len() {
            if idx & bit == 0 {
                let lo = self.amplitudes[idx];
                let hi = self.amplitudes[idx | bit];
                self.amplitudes[idx] = a * lo + b * hi;
                self.amplitudes[idx | bit] = c * lo + d * hi;
            }
        }
        Ok(())
    }

    /// Applies `V_1 ⊗ … ⊗ V_N`.
    pub fn apply_local_unitaries(&mut self, ops: &[ComplexSquareMatrix]) -> Result<()> {
        if ops.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: ops.len(),
            });
        }
        for (q, op) in ops.iter().enumerate() {
            self.apply_local(q, op)?;
        }
        Ok(())
    }

    /// Reorders tensor factors: qubit `k` of `self` becomes qubit `order[k]`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::InvalidParameter("qubit order must be a permutation".into()));
        }
        let mut amps = vec![ZERO; self.amplitudes.len()];
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let mut target = 0usize;
            for (k, &dest) in order.iter().enumerate() {
                let b = (idx >> (n - 1 - k)) & 1;
                target |= b << (n - 1 - dest);
            }
            amps[target] = *amp;
        }
        Ok(Self {
            num_qubits: n,
            amplitudes: amps,
        })
    }

    pub fn inner_product(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// N-qubit density matrix satisfying Hermiticity, unit trace and positivity.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexSquareMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity (1e-10), trace (1e-10) and minimum eigenvalue (≥ −1e-9).
    pub fn new(matrix: ComplexSquareMatrix) -> Result<Self> {
        let num_qubits = qubits_for_len(matrix.dim())?;
        let rho = Self { num_qubits, matrix };
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.matrix.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min_ev = self.min_eigenvalue();
        if min_ev < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self::mixture_unchecked(psi.num_qubits, &[1.0], std::slice::from_ref(psi))
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        check_qubits(num_qubits)?;
        let dim = 1usize << num_qubits;
        Ok(Self {
            num_qubits,
            matrix: ComplexSquareMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)),
        })
    }

    /// Convex combination `Σ w_k |ψ_k⟩⟨ψ_k|`; positive by construction.
    pub fn mixture(weights: &[f64], states: &[PureState]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: states.len(),
                actual: weights.len(),
            });
        }
        let n = states[0].num_qubits;
        if states.iter().any(|s| s.num_qubits != n) {
            return Err(Error::InvalidState("mixture components differ in qubit count".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("mixing weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("mixing weights sum to {total}")));
        }
        Ok(Self::mixture_unchecked(n, weights, states))
    }

    fn mixture_unchecked(num_qubits: usize, weights: &[f64], states: &[PureState]) -> Self {
        let dim = 1usize << num_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for (w, psi) in weights.iter().zip(states) {
            let a = &psi.amplitudes;
            for c in 0..dim {
                let ac = a[c].conj() * *w;
                if ac == ZERO {
                    continue;
                }
                for r in 0..dim {
                    m[(r, c)] += a[r] * ac;
                }
            }
        }
        Self {
            num_qubits,
            matrix: ComplexSquareMatrix(m),
        }
    }

    /// `λ ρ_1 + (1−λ) ρ_2`.
    pub fn convex(lambda: f64, first: &Self, second: &Self) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("mixing weight {lambda} outside [0,1]")));
        }
        if first.num_qubits != second.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: first.num_qubits,
                actual: second.num_qubits,
            });
        }
        let m = first.matrix.inner() * Complex64::new(lambda, 0.0)
            + second.matrix.inner() * Complex64::new(1.0 - lambda, 0.0);
        Ok(Self {
            num_qubits: first.num_qubits,
            matrix: ComplexSquareMatrix(m),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn matrix(&self) -> &ComplexSquareMatrix {
        &self.matrix
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix.hermitian_eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        self.matrix.inner().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `(⊗V_i) ρ (⊗V_i)†`.
    pub fn conjugate_local(&self, ops: &[ComplexSquareMatrix]) -> Result<Self> {
        if ops.len() != self.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.num_qubits,
                actual: ops.len(),
            });
        }
        let mut full = ops[0].clone();
        for op in &ops[1..] {
            full = full.kron(op);
        }
        let m = full.mul(&self.matrix).mul(&full.adjoint());
        Ok(Self {
            num_qubits: self.num_qubits,
            matrix: m,
        })
    }

    /// Partial trace over one qubit.
    pub fn trace_out(&self, qubit: usize) -> Result<Self> {
        let n = self.num_qubits;
        if qubit >= n || n < 2 {
            return Err(Error::InvalidParameter(format!("cannot trace out qubit {qubit} of {n}")));
        }
        let dim_out = 1usize << (n - 1);
        let low_bits = n - 1 - qubit;
        let expand = |idx: usize, b: usize| {
            let high = idx >> low_bits;
            let low = idx & ((1 << low_bits) - 1);
            (high << (low_bits + 1)) | (b << low_bits) | low
        };
        let mut m = DMatrix::<Complex64>::zeros(dim_out, dim_out);
        for r in 0..dim_out {
            for c in 0..dim_out {
                m[(r, c)] = (0..2).map(|b| self.matrix.entry(expand(r, b), expand(c, b))).sum();
            }
        }
        Ok(Self {
            num_qubits: n - 1,
            matrix: ComplexSquareMatrix(m),
        })
    }

    pub fn expectation(&self, observable: &ComplexSquareMatrix) -> Result<Complex64> {
        if observable.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: observable.dim(),
            });
        }
        Ok(self.matrix.mul(observable).trace())
    }
}

/// Correlation `E(u_1,…,u_N) = tr[ρ σ_{u_1} ⊗ … ⊗ σ_{u_N}]`, evaluated by
/// materializing the tensor-product observable.
pub fn correlation(rho: &DensityMatrix, dirs: &[BlochVector]) -> Result<f64> {
    if dirs.len() != rho.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: rho.num_qubits(),
            actual: dirs.len(),
        });
    }
    let mut obs = sigma_u(&dirs[0])?;
    for u in &dirs[1..] {
        obs = obs.kron(&sigma_u(u)?);
    }
    Ok(rho.expectation(&obs)?.re)
}

/// All full-body Pauli correlations `T_{i_1…i_N} = ⟨σ_{i_1} ⊗ … ⊗ σ_{i_N}⟩`,
/// indexed base 3 with qubit 0 as the most significant digit (x=0, y=1, z=2).
///
/// Every correlation function is the multilinear contraction
/// `E(u_1,…,u_N) = Σ T_{i_1…i_N} u_1[i_1] ⋯ u_N[i_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationTensor {
    num_qubits: usize,
    values: Vec<f64>,
}

/// Bit masks of one Pauli string: which qubits flip (x or y), which carry a
/// sign (y or z), and how many y factors.
fn pauli_masks(num_qubits: usize, mut code: usize) -> (usize, usize, u32) {
    let (mut flip, mut sign, mut ny) = (0usize, 0usize, 0u32);
    for q in (0..num_qubits).rev() {
        let bit = 1usize << (num_qubits - 1 - q);
        match code % 3 {
            0 => flip |= bit,
            1 => {
                flip |= bit;
                sign |= bit;
                ny += 1;
            }
            _ => sign |= bit,
        }
        code /= 3;
    }
    (flip, sign, ny)
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

impl CorrelationTensor {
    pub fn from_density(rho: &DensityMatrix) -> Self {
        let n = rho.num_qubits();
        let dim = rho.dim();
        let entries = rho.matrix().to_row_major();
        let values = (0..3usize.pow(n as u32))
            .map(|code| {
                let (flip, sign, ny) = pauli_masks(n, code);
                let mut acc = ZERO;
                for r in 0..dim {
                    let term = entries[r * dim + (r ^ flip)];
                    if (r & sign).count_ones() % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                (i_pow(ny) * acc).re
            })
            .collect();
        Self {
            num_qubits: n,
            values,
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let n = psi.num_qubits();
        let a = psi.amplitudes();
        let values = (0..3usize.pow(n as u32))
            .map(|code| {
                let (flip, sign, ny) = pauli_masks(n, code);
                let mut acc = ZERO;
                for (r, amp) in a.iter().enumerate() {
                    let term = a[r ^ flip].conj() * amp;
                    if (r & sign).count_ones() % 2 == 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
                (i_pow(ny) * acc).re
            })
            .collect();
        Self {
            num_qubits: n,
            values,
        }
    }

    /// Builds a tensor from raw values (length 3^N).
    pub fn from_values(num_qubits: usize, values: Vec<f64>) -> Result<Self> {
        let expected = 3usize.pow(num_qubits as u32);
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { num_qubits, values })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, axes: &[Axis]) -> f64 {
        let idx = axes.iter().fold(0usize, |acc, a| acc * 3 + a.index());
        self.values[idx]
    }

    /// Scales every correlation, e.g. to model white noise `(1−p)`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            num_qubits: self.num_qubits,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Correlation along the given directions (any real 3-vectors).
    pub fn evaluate(&self, dirs: &[[f64; 3]]) -> f64 {
        debug_assert_eq!(dirs.len(), self.num_qubits);
        let mut buf = self.values.clone();
        let mut len = buf.len();
        for u in dirs.iter().rev() {
            len /= 3;
            for a in 0..len {
                buf[a] = buf[3 * a] * u[0] + buf[3 * a + 1] * u[1] + buf[3 * a + 2] * u[2];
            }
        }
        buf[0]
    }

    /// Sum of squared correlations; for a pure single-qubit factor this is 1.
    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// States whose full-body correlation tensor can be computed.
pub trait QuantumState {
    fn num_qubits(&self) -> usize;
    fn correlation_tensor(&self) -> CorrelationTensor;
}

impl QuantumState for PureState {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn correlation_tensor(&self) -> CorrelationTensor {
        CorrelationTensor::from_pure(self)
    }
}

impl QuantumState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn correlation_tensor(&self) -> CorrelationTensor {
        CorrelationTensor::from_density(self)
    }
}

impl QuantumState for CorrelationTensor {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn correlation_tensor(&self) -> CorrelationTensor {
        self.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pauli_matrices() {
        let x = pauli(Axis::X);
        assert_eq!(x.to_row_major(), vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]);
        let z = pauli(Axis::Z);
        assert_eq!(z.to_row_major(), vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]);
        let y = pauli(Axis::Y);
        assert!(y.mul(&y).max_abs_diff(&ComplexSquareMatrix::identity(2)) < 1e-15);
        for a in Axis::ALL {
            let p = pauli(a);
            assert!(p.is_hermitian(0.0));
            assert!(p.is_unitary(1e-15));
            assert_eq!(p.trace(), c(0., 0.));
        }
    }

    #[test]
    fn sigma_u_along_axes() {
        let z = sigma_u(&BlochVector::E_Z).unwrap();
        assert!(z.max_abs_diff(&pauli(Axis::Z)) < 1e-15);
        let x = sigma_u(&BlochVector::E_X).unwrap();
        assert!(x.max_abs_diff(&pauli(Axis::X)) < 1e-15);

        let s = 1.0 / 3f64.sqrt();
        let m = sigma_u(&BlochVector::new(s, s, s)).unwrap();
        let cx = m.mul(&pauli(Axis::X)).trace().re / 2.0;
        assert!((cx - s).abs() < 1e-15);
        let ev = m.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_u_rejects_non_unit() {
        assert!(matches!(
            sigma_u(&BlochVector::new(1.0, 1.0, 0.0)),
            Err(Error::NonUnitDirection(_))
        ));
    }

    #[test]
    fn correlation_examples() {
        let bell = DensityMatrix::from_pure(&states::bell());
        let e = correlation(&bell, &[BlochVector::E_Z, BlochVector::E_Z]).unwrap();
        assert!((e - 1.0).abs() < 1e-14);

        let mixed = DensityMatrix::maximally_mixed(3).unwrap();
        let d = BlochVector::normalized(0.3, -0.2, 0.9).unwrap();
        assert!(correlation(&mixed, &[d, d, BlochVector::E_X]).unwrap().abs() < 1e-15);

        let ghz = DensityMatrix::from_pure(&states::ghz(3).unwrap());
        let x = BlochVector::E_X;
        assert!((correlation(&ghz, &[x, x, x]).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn correlation_dimension_mismatch() {
        let bell = DensityMatrix::from_pure(&states::bell());
        assert!(matches!(
            correlation(&bell, &[BlochVector::E_Z]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_matches_materialized_correlation() {
        let psi = PureState::from_unnormalized(vec![
            c(0.3, 0.1),
            c(-0.2, 0.5),
            c(0.7, -0.4),
            c(0.1, 0.0),
            c(0.0, 0.2),
            c(-0.6, 0.3),
            c(0.25, 0.25),
            c(0.1, -0.9),
        ])
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let t_pure = CorrelationTensor::from_pure(&psi);
        let t_mixed = CorrelationTensor::from_density(&rho);
        let dirs = [
            BlochVector::normalized(0.1, 0.7, -0.3).unwrap(),
            BlochVector::normalized(-0.5, 0.2, 0.4).unwrap(),
            BlochVector::normalized(0.9, -0.1, 0.05).unwrap(),
        ];
        let direct = correlation(&rho, &dirs).unwrap();
        let arr: Vec<[f64; 3]> = dirs.iter().map(|d| d.components()).collect();
        assert!((t_pure.evaluate(&arr) - direct).abs() < 1e-13);
        assert!((t_mixed.evaluate(&arr) - direct).abs() < 1e-13);
    }

    #[test]
    fn trace_out_w_state() {
        let w = DensityMatrix::from_pure(&states::w(3).unwrap());
        let marg = w.trace_out(0).unwrap();
        marg.validate().unwrap();
        let t = CorrelationTensor::from_density(&marg);
        assert!((t.get(&[Axis::Z, Axis::Z]) + 1.0 / 3.0).abs() < 1e-14);
        assert!((t.get(&[Axis::X, Axis::X]) - 2.0 / 3.0).abs() < 1e-14);
        assert!(t.get(&[Axis::X, Axis::Y]).abs() < 1e-14);
    }

    #[test]
    fn permute_qubits_moves_factors() {
        let one = PureState::basis(1, 1).unwrap();
        let zero = PureState::basis(1, 0).unwrap();
        let s = one.kron(&zero).kron(&zero);
        let moved = s.permute_qubits(&[2, 0, 1]).unwrap();
        assert_eq!(moved.amplitudes()[1], ONE);
    }

    #[test]
    fn density_validation_rejects_bad_matrices() {
        let m = ComplexSquareMatrix::from_row_major(2, &[c(1.5, 0.), c(0., 0.), c(0., 0.), c(-0.5, 0.)])
            .unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = ComplexSquareMatrix::from_row_major(2, &[c(0.5, 0.), c(0.1, 0.), c(0.2, 0.), c(0.5, 0.)])
            .unwrap();
        assert!(DensityMatrix::new(m).is_err());
        let m = ComplexSquareMatrix::from_row_major(2, &[c(0.6, 0.), c(0., 0.), c(0., 0.), c(0.6, 0.)])
            .unwrap();
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn qubit_cap_is_enforced() {
        assert!(matches!(
            states::ghz(DEFAULT_MAX_QUBITS + 1),
            Err(Error::TooManyQubits { .. })
        ));
    }
}
