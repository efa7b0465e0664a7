//! Named states used throughout: GHZ, W, Bell, Bell-diagonal, noisy GHZ,
//! Werner and product states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qubit::{check_qubits, BlochVector, ComplexSquareMatrix, DensityMatrix, PureState};

/// Eigenvalue slack for Bell-diagonal parameters.
pub const BELL_DIAGONAL_EIG_TOL: f64 = 1e-12;

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<PureState> {
    check_qubits(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ state needs at least 2 qubits".into()));
    }
    let mut amps = vec![0.0; 1 << n];
    amps[0] = 1.0;
    amps[(1 << n) - 1] = 1.0;
    PureState::from_real(&amps)
}

/// `(|10…0⟩ + |010…0⟩ + … + |0…01⟩)/√N`.
pub fn w(n: usize) -> Result<PureState> {
    check_qubits(n)?;
    if n < 2 {
        return Err(Error::InvalidParameter("W state needs at least 2 qubits".into()));
    }
    let mut amps = vec![0.0; 1 << n];
    for k in 0..n {
        amps[1 << k] = 1.0;
    }
    PureState::from_real(&amps)
}

/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`, correlation diagonal (1, −1, 1).
pub fn bell() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(&[s, 0.0, 0.0, s]).expect("normalized")
}

/// `|Ψ⁻⟩ = (|01⟩ − |10⟩)/√2`.
pub fn singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::from_real(&[0.0, s, -s, 0.0]).expect("normalized")
}

/// `|0⟩^{⊗k} ⊗ |ψ⟩`.
pub fn zeros_then(k: usize, psi: &PureState) -> Result<PureState> {
    check_qubits(k + psi.num_qubits())?;
    if k == 0 {
        return Ok(psi.clone());
    }
    Ok(PureState::basis(k, 0)?.kron(psi))
}

/// W standard form `√x_0|0…0⟩ + Σ_i √x_i |0…1_i…0⟩` with `x_0 = 1 − Σx_i`;
/// qubit `i` (0-based, most significant first) carries weight `x[i]`.
pub fn w_standard_form(x: &[f64]) -> Result<PureState> {
    let n = x.len();
    check_qubits(n)?;
    crate::moments::check_w_weights(x, n)?;
    let mut amps = vec![0.0; 1 << n];
    amps[0] = (1.0 - x.iter().sum::<f64>()).max(0.0).sqrt();
    for (i, &xi) in x.iter().enumerate() {
        amps[1 << (n - 1 - i)] = xi.sqrt();
    }
    PureState::from_unnormalized(amps.into_iter().map(|a| Complex64::new(a, 0.0)).collect())
}

/// Product of single-qubit pure states with the given Bloch vectors.
pub fn product(dirs: &[BlochVector]) -> Result<PureState> {
    check_qubits(dirs.len())?;
    let mut psi = PureState::qubit(&dirs[0])?;
    for d in &dirs[1..] {
        psi = psi.kron(&PureState::qubit(d)?);
    }
    Ok(psi)
}

/// Eigenvalues of the Bell-diagonal state with correlations `c`.
pub fn bell_diagonal_eigenvalues(c: [f64; 3]) -> [f64; 4] {
    let [x, y, z] = c;
    [
        (1.0 - x - y - z) / 4.0,
        (1.0 + x + y - z) / 4.0,
        (1.0 + x - y + z) / 4.0,
        (1.0 - x + y + z) / 4.0,
    ]
}

/// Checks `|c_i| ≤ 1` and non-negative Bell-basis eigenvalues.
pub fn check_bell_diagonal(c: [f64; 3]) -> Result<()> {
    if c.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + BELL_DIAGONAL_EIG_TOL) {
        return Err(Error::InvalidParameter(format!("correlations {c:?} outside [-1,1]")));
    }
    let ev = bell_diagonal_eigenvalues(c);
    if ev.iter().any(|&l| l < -BELL_DIAGONAL_EIG_TOL) {
        return Err(Error::InvalidParameter(format!(
            "Bell-diagonal parameters {c:?} give eigenvalues {ev:?}"
        )));
    }
    Ok(())
}

/// `ρ = [𝟙 + Σ_j c_j σ_j ⊗ σ_j]/4`.
pub fn bell_diagonal(cx: f64, cy: f64, cz: f64) -> Result<DensityMatrix> {
    check_bell_diagonal([cx, cy, cz])?;
    let q = |v: f64| Complex64::new(v / 4.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let entries = [
        q(1.0 + cz), z,            z,            q(cx - cy),
        z,           q(1.0 - cz),  q(cx + cy),   z,
        z,           q(cx + cy),   q(1.0 - cz),  z,
        q(cx - cy),  z,            z,            q(1.0 + cz),
    ];
    DensityMatrix::new(ComplexSquareMatrix::from_row_major(4, &entries)?)
}

/// `p 𝟙/2^N + (1−p)|GHZ_N⟩⟨GHZ_N|`.
pub fn noisy_ghz(p: f64, n: usize) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("noise weight {p} outside [0,1]")));
    }
    let ghz = DensityMatrix::from_pure(&ghz(n)?);
    let mixed = DensityMatrix::maximally_mixed(n)?;
    DensityMatrix::convex(p, &mixed, &ghz)
}

/// `q |Ψ⁻⟩⟨Ψ⁻| + (1−q) 𝟙/4`, valid for `q ∈ [−1/3, 1]`.
pub fn werner(q: f64) -> Result<DensityMatrix> {
    if !(-1.0 / 3.0 - 1e-15..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("Werner weight {q} outside [-1/3,1]")));
    }
    let s = DensityMatrix::from_pure(&singlet());
    let m = s
        .matrix()
        .scale(Complex64::new(q, 0.0))
        .add(&ComplexSquareMatrix::identity(4).scale(Complex64::new((1.0 - q) / 4.0, 0.0)));
    DensityMatrix::new(m)
}

/// Two-qubit marginal of `|W_3⟩`.
pub fn w_marginal() -> DensityMatrix {
    DensityMatrix::from_pure(&w(3).expect("3 qubits"))
        .trace_out(0)
        .expect("three-qubit state")
}
