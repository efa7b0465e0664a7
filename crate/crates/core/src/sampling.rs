//! Seeded random states: Haar unitaries, SLOCC-class standard forms, class
//! mixtures and Hilbert–Schmidt density matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{check_qubits, ComplexSquareMatrix, DensityMatrix, PureState};

/// ChaCha8 generator addressed by `(seed, stream)`.
#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random `d×d` unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<ComplexSquareMatrix> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("unitary dimension {d} < 2")));
    }
    let g = DMatrix::<Complex64>::from_fn(d, d, |_, _| gaussian_c64(rng));
    let (mut q, r) = g.qr().unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(ComplexSquareMatrix::from_inner(q))
}

/// Haar-random pure state on `n` qubits.
pub fn haar_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    check_qubits(n)?;
    PureState::from_unnormalized((0..1usize << n).map(|_| gaussian_c64(rng)).collect())
}

/// Three-qubit standard form
/// `λ₀|000⟩ + λ₁e^{iφ}|100⟩ + λ₂|101⟩ + λ₃|110⟩ + λ₄|111⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcinStandardForm {
    pub lambda: [f64; 5],
    pub phi: f64,
}

impl AcinStandardForm {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        let norm2: f64 = lambda.iter().map(|l| l * l).sum();
        if lambda.iter().any(|&l| !(l >= 0.0)) || (norm2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("λ = {lambda:?} must be non-negative with unit norm")));
        }
        if !(0.0..=std::f64::consts::PI).contains(&phi) {
            return Err(Error::InvalidParameter(format!("φ = {phi} outside [0, π]")));
        }
        Ok(Self { lambda, phi })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let raw: [f64; 5] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal).abs());
        let norm = raw.iter().map(|l| l * l).sum::<f64>().sqrt();
        Self {
            lambda: raw.map(|l| l / norm),
            phi: rng.gen_range(0.0..=std::f64::consts::PI),
        }
    }

    pub fn to_state(&self) -> PureState {
        let l = self.lambda;
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[0b000] = l[0].into();
        amps[0b100] = Complex64::from_polar(l[1], self.phi);
        amps[0b101] = l[2].into();
        amps[0b110] = l[3].into();
        amps[0b111] = l[4].into();
        PureState::from_unnormalized(amps).expect("non-zero amplitudes")
    }
}

/// W-class standard form `√x₀|0…0⟩ + Σ_i √x_i|0…1_i…0⟩`, `Σ_{i≥0} x_i = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WStandardForm {
    /// `x₀, x₁, …, x_N`.
    pub x: Vec<f64>,
}

impl WStandardForm {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::InvalidParameter("need x₀ and at least two excitations".into()));
        }
        let total: f64 = x.iter().sum();
        if x.iter().any(|&v| !(v >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("{x:?} is not a probability vector")));
        }
        Ok(Self { x })
    }

    /// `x` uniform on the simplex, via normalized exponentials.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..=n).map(|_| rng.sample(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        Self {
            x: raw.into_iter().map(|v| v / total).collect(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len() - 1
    }

    /// Excitation weights `x₁..x_N`.
    pub fn excitations(&self) -> &[f64] {
        &self.x[1..]
    }

    pub fn to_state(&self) -> Result<PureState> {
        crate::states::w_standard_form(self.excitations())
    }
}

/// SLOCC classes available to the samplers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    /// Product of pure single-qubit states.
    Separable,
    /// Pure state on the listed qubits times a pure state on the rest.
    Bisep(Vec<usize>),
    /// Bi-separable across a random non-trivial cut, drawn per sample.
    BisepAny,
    WClass,
    /// Acín standard form for three qubits, Haar-random otherwise.
    Generic,
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateClass::Separable => f.write_str("separable"),
            StateClass::Bisep(part) => {
                let labels: Vec<String> = part.iter().map(|q| q.to_string()).collect();
                write!(f, "bisep:{}", labels.join(","))
            }
            StateClass::BisepAny => f.write_str("bisep"),
            StateClass::WClass => f.write_str("w"),
            StateClass::Generic => f.write_str("generic"),
        }
    }
}

impl FromStr for StateClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separable" | "product" => Ok(StateClass::Separable),
            "bisep" => Ok(StateClass::BisepAny),
            "w" | "w-class" | "w_class" => Ok(StateClass::WClass),
            "generic" | "ghz" => Ok(StateClass::Generic),
            _ => {
                let part = s
                    .strip_prefix("bisep:")
                    .ok_or_else(|| Error::UnsupportedClass(s.to_string()))?;
                let qubits = part
                    .split(',')
                    .map(|q| q.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::UnsupportedClass(s.to_string()))?;
                Ok(StateClass::Bisep(qubits))
            }
        }
    }
}

fn check_partition(part: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &q in part {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(Error::UnsupportedClass(format!("partition {part:?} for N={n}")));
        }
    }
    if part.is_empty() || part.len() == n {
        return Err(Error::UnsupportedClass(format!("partition {part:?} is trivial for N={n}")));
    }
    Ok(())
}

fn bisep_state<R: Rng + ?Sized>(part: &[usize], n: usize, rng: &mut R) -> Result<PureState> {
    let rest: Vec<usize> = (0..n).filter(|q| !part.contains(q)).collect();
    let a = haar_pure_state(part.len(), rng)?;
    let b = haar_pure_state(rest.len(), rng)?;
    // Qubit k of a ⊗ b moves to position order[k].
    let order: Vec<usize> = part.iter().chain(&rest).copied().collect();
    a.kron(&b).permute_qubits(&order)
}

fn random_cut<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    loop {
        let mask = rng.gen_range(1..(1u64 << n) - 1);
        // Fix qubit 0 outside the chosen side so each cut has one label.
        if mask & 1 == 0 {
            return (0..n).filter(|q| mask >> q & 1 == 1).collect();
        }
    }
}

/// Pure state from the class, before any local-unitary dressing.
pub fn sample_pure_class<R: Rng + ?Sized>(class: &StateClass, n: usize, rng: &mut R) -> Result<PureState> {
    check_qubits(n)?;
    match class {
        StateClass::Separable => {
            let mut psi = haar_pure_state(1, rng)?;
            for _ in 1..n {
                psi = psi.kron(&haar_pure_state(1, rng)?);
            }
            Ok(psi)
        }
        StateClass::Bisep(part) => {
            check_partition(part, n)?;
            bisep_state(part, n, rng)
        }
        StateClass::BisepAny => {
            if n < 2 {
                return Err(Error::UnsupportedClass("bi-separable needs N ≥ 2".into()));
            }
            let cut = random_cut(n, rng);
            bisep_state(&cut, n, rng)
        }
        StateClass::WClass => {
            if n < 2 {
                return Err(Error::UnsupportedClass("W class needs N ≥ 2".into()));
            }
            WStandardForm::random(n, rng).to_state()
        }
        StateClass::Generic if n == 3 => Ok(AcinStandardForm::random(rng).to_state()),
        StateClass::Generic => haar_pure_state(n, rng),
    }
}

/// Applies independent Haar-random single-qubit unitaries.
pub fn dress_locally<R: Rng + ?Sized>(psi: &mut PureState, rng: &mut R) -> Result<()> {
    let ops = (0..psi.num_qubits())
        .map(|_| haar_unitary(2, rng))
        .collect::<Result<Vec<_>>>()?;
    psi.apply_local_unitaries(&ops)
}

/// Uniform weights on the probability simplex.
pub fn dirichlet_weights<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Mixture of `terms` class members (default `2^N`), each dressed by random
/// local unitaries, with Dirichlet(1,…,1) weights.
pub fn sample_mixed_class<R: Rng + ?Sized>(
    class: &StateClass,
    n: usize,
    terms: Option<usize>,
    rng: &mut R,
) -> Result<DensityMatrix> {
    sample_mixed_class_with(class, n, terms, true, rng)
}

pub fn sample_mixed_class_with<R: Rng + ?Sized>(
    class: &StateClass,
    n: usize,
    terms: Option<usize>,
    dress: bool,
    rng: &mut R,
) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let terms = terms.unwrap_or(1 << n);
    if terms == 0 {
        return Err(Error::InvalidParameter("mixture needs at least one term".into()));
    }
    let mut states = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut psi = sample_pure_class(class, n, rng)?;
        if dress {
            dress_locally(&mut psi, rng)?;
        }
        states.push(psi);
    }
    let weights = if terms == 1 { vec![1.0] } else { dirichlet_weights(terms, rng) };
    DensityMatrix::mixture(&weights, &states)
}

/// Hilbert–Schmidt random state `G G† / tr(G G†)` with square Ginibre `G`,
/// i.e. a Haar pure state on a doubled system with the ancilla traced out.
pub fn random_density_hs<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<DensityMatrix> {
    check_qubits(n)?;
    let d = 1usize << n;
    let g = DMatrix::<Complex64>::from_fn(d, d, |_, _| gaussian_c64(rng));
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    // Enforce exact Hermiticity after rounding.
    let m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(ComplexSquareMatrix::from_inner(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::design_r2_r4;
    use crate::states;

    #[test]
    fn seeded_streams() {
        let a: Vec<u64> = (0..4).map({
            let mut r = SeededRng::new(5, 2);
            move |_| r.next_u64()
        }).collect();
        let b: Vec<u64> = (0..4).map({
            let mut r = SeededRng::new(5, 2);
            move |_| r.next_u64()
        }).collect();
        let c = SeededRng::new(5, 3).next_u64();
        assert_eq!(a, b);
        assert_ne!(a[0], c);
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = SeededRng::new(1, 0);
        for d in [2, 4, 8] {
            let u = haar_unitary(d, &mut rng).unwrap();
            assert!(u.unitarity_error() < 1e-12);
        }
        assert!(haar_unitary(1, &mut rng).is_err());
    }

    #[test]
    fn w_standard_form_edge() {
        let w = WStandardForm::new(vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let psi = w.to_state().unwrap();
        let overlap = psi.inner_product(&states::w(3).unwrap()).norm();
        assert!((overlap - 1.0).abs() < 1e-14);
        assert!(WStandardForm::new(vec![0.5, 0.5, 0.5]).is_err());
    }

    #[test]
    fn acin_validation() {
        assert!(AcinStandardForm::new([1.0, 0.0, 0.0, 0.0, 0.0], 0.0).is_ok());
        assert!(AcinStandardForm::new([1.0, 1.0, 0.0, 0.0, 0.0], 0.0).is_err());
        let s = AcinStandardForm::random(&mut SeededRng::new(3, 0));
        assert!((s.lambda.iter().map(|l| l * l).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separable_second_moment() {
        let mut rng = SeededRng::new(9, 0);
        for n in 1..=4 {
            let psi = sample_pure_class(&StateClass::Separable, n, &mut rng).unwrap();
            let (r2, _) = design_r2_r4(&psi).unwrap();
            assert!((r2 - 3f64.powi(-(n as i32))).abs() < 1e-14);
        }
    }

    #[test]
    fn bisep_partition_is_respected() {
        let mut rng = SeededRng::new(4, 0);
        let psi = sample_pure_class(&StateClass::Bisep(vec![1]), 3, &mut rng).unwrap();
        // Qubit 1 is in a pure state: its reduced purity is 1.
        let rho = DensityMatrix::from_pure(&psi).trace_out(2).unwrap().trace_out(0).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!(sample_pure_class(&StateClass::Bisep(vec![0, 1, 2]), 3, &mut rng).is_err());
        assert!(sample_pure_class(&StateClass::Bisep(vec![3]), 3, &mut rng).is_err());
    }

    #[test]
    fn class_names_round_trip() {
        for c in [
            StateClass::Separable,
            StateClass::Bisep(vec![0, 2]),
            StateClass::BisepAny,
            StateClass::WClass,
            StateClass::Generic,
        ] {
            assert_eq!(c.to_string().parse::<StateClass>().unwrap(), c);
        }
        assert!("cluster".parse::<StateClass>().is_err());
    }

    #[test]
    fn mixed_terms_and_weights() {
        let mut rng = SeededRng::new(2, 0);
        let w = dirichlet_weights(16, &mut rng);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let rho = sample_mixed_class_with(&StateClass::WClass, 3, Some(1), false, &mut rng).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        sample_mixed_class(&StateClass::WClass, 4, None, &mut rng).unwrap().validate().unwrap();
    }

    #[test]
    fn hilbert_schmidt_states() {
        let mut rng = SeededRng::new(8, 0);
        let rho = random_density_hs(2, &mut rng).unwrap();
        rho.validate().unwrap();
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-14);
    }
}
