//! Randomized-measurement moments `R⁽ᵗ⁾ = ∫ E(u_1,…,u_N)^t du_1…du_N` with
//! `E = tr[ρ σ_{u_1} ⊗ … ⊗ σ_{u_N}]` and the uniform measure on each sphere.
//!
//! Exact values come from design sums, which reduce the integral to a finite
//! average over design points. Correlations are evaluated by contracting the
//! Pauli correlation tensor one qubit at a time, so a sum over `L^N` tuples
//! costs `O(L^N)` rather than `O(L^N 4^N)`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::designs::{SphericalDesign, UnitaryDesign};
use crate::error::{Error, Result};
use crate::qubit::{pauli, Axis, BlochVector, CorrelationTensor, QuantumState};
use crate::states::check_bell_diagonal;

/// Default ceiling on the number of direction tuples in one design sum.
pub const DEFAULT_MAX_TERMS: u128 = 1 << 32;
/// Largest qubit count for moments of order ≥ 6 unless overridden.
pub const DEFAULT_HIGH_ORDER_MAX_QUBITS: usize = 4;
/// Monte Carlo draws per independent RNG stream.
pub const MONTE_CARLO_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentMethod {
    DesignSum,
    MonteCarlo,
    ClosedForm,
}

impl fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MomentMethod::DesignSum => "design-sum",
            MomentMethod::MonteCarlo => "monte-carlo",
            MomentMethod::ClosedForm => "closed-form",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MomentDetail {
    Design {
        design: String,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
        standard_error: f64,
    },
    Formula {
        formula: String,
    },
}

/// One evaluated moment together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRecord {
    pub order: usize,
    pub value: f64,
    pub method: MomentMethod,
    pub detail: MomentDetail,
}

impl MomentRecord {
    /// `(t+1)^N R⁽ᵗ⁾`, the normalization under which a product of pure
    /// single-qubit states has moment 1.
    pub fn rescaled(&self, num_qubits: usize) -> f64 {
        rescale(self.value, self.order, num_qubits)
    }

    pub fn standard_error(&self) -> Option<f64> {
        match self.detail {
            MomentDetail::MonteCarlo { standard_error, .. } => Some(standard_error),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

pub fn rescale(value: f64, order: usize, num_qubits: usize) -> f64 {
    value * ((order + 1) as f64).powi(num_qubits as i32)
}

/// Limits applied to design sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentOptions {
    pub max_terms: u128,
    /// Qubit ceiling for orders ≥ 6; `None` lifts it.
    pub high_order_max_qubits: Option<usize>,
    /// Use one point per antipodal pair for even orders.
    pub antipodal_halving: bool,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            max_terms: DEFAULT_MAX_TERMS,
            high_order_max_qubits: Some(DEFAULT_HIGH_ORDER_MAX_QUBITS),
            antipodal_halving: true,
        }
    }
}

/// Exact `R⁽ᵗ⁾` from a spherical design of strength at least `t`.
pub fn moment_design<S: QuantumState + ?Sized>(
    state: &S,
    t: usize,
    design: &SphericalDesign,
) -> Result<MomentRecord> {
    moment_design_with(state, t, design, &MomentOptions::default())
}

pub fn moment_design_with<S: QuantumState + ?Sized>(
    state: &S,
    t: usize,
    design: &SphericalDesign,
    options: &MomentOptions,
) -> Result<MomentRecord> {
    if t == 0 {
        return Err(Error::InvalidParameter("moment order must be positive".into()));
    }
    if design.strength() < t {
        return Err(Error::InsufficientStrength {
            name: design.name().to_string(),
            strength: design.strength(),
            order: t,
        });
    }
    let n = state.num_qubits();
    let record = |value| MomentRecord {
        order: t,
        value,
        method: MomentMethod::DesignSum,
        detail: MomentDetail::Design {
            design: design.name().to_string(),
        },
    };
    let reps = if options.antipodal_halving { design.antipodal_representatives() } else { None };
    // E(−u,…) = −E(u,…), so odd orders cancel pairwise on point-symmetric sets.
    if t % 2 == 1 && reps.is_some() {
        return Ok(record(0.0));
    }
    let points: Vec<[f64; 3]> = match reps {
        Some(r) if t % 2 == 0 => r.iter().map(|p| p.components()).collect(),
        _ => design.points().iter().map(|p| p.components()).collect(),
    };
    check_terms(points.len(), n, t, options)?;
    let tensor = state.correlation_tensor();
    Ok(record(tuple_average(&tensor, &points, t)))
}

fn check_terms(points: usize, n: usize, t: usize, options: &MomentOptions) -> Result<()> {
    let terms = (points as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if terms > options.max_terms {
        return Err(Error::TooManyTerms {
            terms,
            limit: options.max_terms,
        });
    }
    if let Some(cap) = options.high_order_max_qubits {
        if t >= 6 && n > cap {
            let limit = (points as u128).pow(cap as u32);
            return Err(Error::TooManyTerms { terms, limit });
        }
    }
    Ok(())
}

/// `(1/L^N) Σ_{tuples} E^t` by depth-first contraction of the tensor, one
/// qubit per recursion level.
fn tuple_average(tensor: &CorrelationTensor, points: &[[f64; 3]], t: usize) -> f64 {
    let n = tensor.num_qubits();
    let values = tensor.values();
    if n == 0 {
        return values[0].powi(t as i32);
    }
    let stride = values.len() / 3;
    // Parallel over the first direction; partial sums are combined in index order.
    let partial: Vec<f64> = points
        .par_iter()
        .map(|u| {
            let mut levels: Vec<Vec<f64>> = (0..n).map(|k| vec![0.0; 3usize.pow((n - 1 - k) as u32)]).collect();
            contract_into(values, u, stride, &mut levels[0]);
            sum_from(&mut levels, 1, points, t)
        })
        .collect();
    let total: f64 = partial.iter().sum();
    total / (points.len() as f64).powi(n as i32)
}

fn contract_into(src: &[f64], u: &[f64; 3], stride: usize, dst: &mut [f64]) {
    for (b, d) in dst.iter_mut().enumerate() {
        *d = src[b] * u[0] + src[stride + b] * u[1] + src[2 * stride + b] * u[2];
    }
}

fn sum_from(levels: &mut [Vec<f64>], depth: usize, points: &[[f64; 3]], t: usize) -> f64 {
    if depth == levels.len() {
        return levels[depth - 1][0].powi(t as i32);
    }
    let mut acc = 0.0;
    for u in points {
        let (done, rest) = levels.split_at_mut(depth);
        let src = &done[depth - 1];
        contract_into(src, u, src.len() / 3, &mut rest[0]);
        acc += sum_from(levels, depth + 1, points, t);
    }
    acc
}

/// Moment from a single-qubit unitary design: the average of
/// `tr[ρ ⊗_i U_i σ_z U_i†]^t` over all element tuples.
pub fn moment_unitary_design<S: QuantumState + ?Sized>(
    state: &S,
    t: usize,
    design: &UnitaryDesign,
    options: &MomentOptions,
) -> Result<MomentRecord> {
    if t == 0 {
        return Err(Error::InvalidParameter("moment order must be positive".into()));
    }
    if design.strength() < t {
        return Err(Error::InsufficientStrength {
            name: design.name().to_string(),
            strength: design.strength(),
            order: t,
        });
    }
    let n = state.num_qubits();
    check_terms(design.len(), n, t, options)?;
    let z = pauli(Axis::Z);
    let points = design
        .unitaries()
        .iter()
        .map(|u| BlochVector::of_operator(&u.mul(&z).mul(&u.adjoint())).map(|b| b.components()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentRecord {
        order: t,
        value: tuple_average(&state.correlation_tensor(), &points, t),
        method: MomentMethod::DesignSum,
        detail: MomentDetail::Design {
            design: design.name().to_string(),
        },
    })
}

/// Uniform direction on the unit sphere.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Monte Carlo estimates of several orders from one set of sampled directions.
///
/// Samples are drawn in blocks of [`MONTE_CARLO_BLOCK`], block `b` from the
/// ChaCha8 stream `b` of `seed`, so results depend only on `(seed, samples)`.
pub fn monte_carlo_moments<S: QuantumState + ?Sized>(
    state: &S,
    orders: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<MomentRecord>> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!("{samples} samples, at least 100 required")));
    }
    if orders.contains(&0) {
        return Err(Error::InvalidParameter("moment order must be positive".into()));
    }
    let tensor = state.correlation_tensor();
    let n = tensor.num_qubits();
    let blocks = samples.div_ceil(MONTE_CARLO_BLOCK);
    let sums: Vec<Vec<(f64, f64)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MONTE_CARLO_BLOCK.min(samples - b * MONTE_CARLO_BLOCK);
            let mut acc = vec![(0.0, 0.0); orders.len()];
            let mut dirs = vec![[0.0; 3]; n];
            for _ in 0..count {
                for d in dirs.iter_mut() {
                    *d = random_direction(&mut rng);
                }
                let e = tensor.evaluate(&dirs);
                for (slot, &t) in acc.iter_mut().zip(orders) {
                    let v = e.powi(t as i32);
                    slot.0 += v;
                    slot.1 += v * v;
                }
            }
            acc
        })
        .collect();
    let m = samples as f64;
    Ok(orders
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let (s, s2) = sums.iter().fold((0.0, 0.0), |(a, b), blk| (a + blk[k].0, b + blk[k].1));
            let mean = s / m;
            let var = ((s2 - m * mean * mean) / (m - 1.0)).max(0.0);
            MomentRecord {
                order: t,
                value: mean,
                method: MomentMethod::MonteCarlo,
                detail: MomentDetail::MonteCarlo {
                    samples,
                    seed,
                    standard_error: (var / m).sqrt(),
                },
            }
        })
        .collect())
}

pub fn moment_monte_carlo<S: QuantumState + ?Sized>(
    state: &S,
    t: usize,
    samples: usize,
    seed: u64,
) -> Result<MomentRecord> {
    Ok(monte_carlo_moments(state, &[t], samples, seed)?.remove(0))
}

/// `R2 = |c|²/9` and `R4 = (2/75) Σc_i⁴ + (27/25) R2²` for
/// `ρ = [𝟙 + Σ c_i σ_i⊗σ_i]/4`.
pub fn bell_diagonal_moments(c: [f64; 3]) -> Result<(f64, f64)> {
    check_bell_diagonal(c)?;
    let r2 = c.iter().map(|v| v * v).sum::<f64>() / 9.0;
    let r4 = 2.0 / 75.0 * c.iter().map(|v| v.powi(4)).sum::<f64>() + 27.0 / 25.0 * r2 * r2;
    Ok((r2, r4))
}

/// Validates the excitation weights `x_1..x_N` of the W standard form
/// `√x_0|0…0⟩ + Σ_i √x_i |0…1_i…0⟩` with `x_0 = 1 − Σx_i`.
pub fn check_w_weights(x: &[f64], n: usize) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: x.len(),
        });
    }
    if x.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) || x.iter().sum::<f64>() > 1.0 + 1e-12 {
        return Err(Error::InvalidParameter(format!("{x:?} is not in the simplex")));
    }
    Ok(())
}

fn pair_sum(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    let sq: f64 = x.iter().map(|v| v * v).sum();
    (s * s - sq) / 2.0
}

/// `R2 = [1 + 8 Σ_{i<j} x_i x_j] / 3^N` on the W standard form.
pub fn w_standard_form_r2(x: &[f64], n: usize) -> Result<f64> {
    check_w_weights(x, n)?;
    Ok((1.0 + 8.0 * pair_sum(x)) / 3f64.powi(n as i32))
}

/// Same value written with `x_0` explicit:
/// `[Σ_{i≥0} x_i² + 2x_0 Σ_{i≥1} x_i + 10 Σ_{1≤i<j} x_i x_j] / 3^N`.
pub fn w_standard_form_r2_explicit(x0: f64, x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    let sq: f64 = x0 * x0 + x.iter().map(|v| v * v).sum::<f64>();
    (sq + 2.0 * x0 * s + 10.0 * pair_sum(x)) / 3f64.powi(x.len() as i32)
}

/// `R̃4 = 5^N R4` on the W standard form, a quartic in the excitation weights.
pub fn w_standard_form_r4_rescaled(x: &[f64], n: usize) -> Result<f64> {
    check_w_weights(x, n)?;
    let mut e2 = 0.0; // Σ_{i<j} x_i x_j
    let mut q2 = 0.0; // Σ_{i<j} x_i² x_j²
    let mut e3 = 0.0; // Σ_{i<j<k} x_i x_j x_k
    let mut mixed = 0.0; // Σ_{i; j<k; i∉{j,k}} x_i² x_j x_k
    let mut e4 = 0.0; // Σ_{i<j<k<l} x_i x_j x_k x_l
    for i in 0..n {
        for j in i + 1..n {
            e2 += x[i] * x[j];
            q2 += (x[i] * x[j]).powi(2);
            for k in j + 1..n {
                e3 += x[i] * x[j] * x[k];
                for l in k + 1..n {
                    e4 += x[i] * x[j] * x[k] * x[l];
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in j + 1..n {
                if i != j && i != k {
                    mixed += x[i] * x[i] * x[j] * x[k];
                }
            }
        }
    }
    Ok(1.0 + 16.0 / 3.0 * e2 + 128.0 / 3.0 * q2 - 448.0 / 9.0 * e3 + 64.0 * mixed + 1664.0 / 9.0 * e4)
}

pub fn w_standard_form_r4(x: &[f64], n: usize) -> Result<f64> {
    Ok(w_standard_form_r4_rescaled(x, n)? / 5f64.powi(n as i32))
}

/// `(R2, R4)` of `|W_N⟩`.
pub fn w_state_moments(n: usize) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::InvalidParameter("W state needs at least 2 qubits".into()));
    }
    let nf = n as f64;
    let r2 = (5.0 - 4.0 / nf) / 3f64.powi(n as i32);
    let r4 = (83.0 * nf.powi(3) + 216.0 * nf * nf - 176.0 * nf - 96.0) / (27.0 * nf.powi(3) * 5f64.powi(n as i32));
    Ok((r2, r4))
}

/// `R2` of `|GHZ_N⟩`: `2^{N−1}/3^N` for odd N, `(2^{N−1}+1)/3^N` for even N.
pub fn ghz_r2(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ state needs at least 2 qubits".into()));
    }
    let base = 2f64.powi(n as i32 - 1) + if n % 2 == 0 { 1.0 } else { 0.0 };
    Ok(base / 3f64.powi(n as i32))
}

/// `R4` of `|GHZ_N⟩`: `(3/8)(8/15)^N`, plus `3(2/15)^N + (1/5)^N` for even N.
///
/// `E` on GHZ is `Re Π(x_k + i y_k)` (+ `Π z_k` for even N); the sphere
/// averages of `|x+iy|⁴`, `|x+iy|²z²` and `z⁴` give the three terms.
pub fn ghz_r4(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("GHZ state needs at least 2 qubits".into()));
    }
    let ni = n as i32;
    let mut r4 = 3.0 / 8.0 * (8.0f64 / 15.0).powi(ni);
    if n % 2 == 0 {
        r4 += 3.0 * (2.0f64 / 15.0).powi(ni) + 0.2f64.powi(ni);
    }
    Ok(r4)
}

pub fn ghz_moments(n: usize) -> Result<(f64, f64)> {
    Ok((ghz_r2(n)?, ghz_r4(n)?))
}

fn check_noise(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("noise weight {p} outside [0,1]")));
    }
    Ok(())
}

/// White noise shrinks every full correlation by `1−p`, so `R⁽ᵗ⁾ ∝ (1−p)^t`.
pub fn noisy_ghz_r2(p: f64, n: usize) -> Result<f64> {
    check_noise(p)?;
    Ok(ghz_r2(n)? * (1.0 - p).powi(2))
}

pub fn noisy_ghz_moments(p: f64, n: usize) -> Result<(f64, f64)> {
    check_noise(p)?;
    let (r2, r4) = ghz_moments(n)?;
    Ok((r2 * (1.0 - p).powi(2), r4 * (1.0 - p).powi(4)))
}

/// `(R2, R4)` by design sums with octahedron and icosahedron.
pub fn design_r2_r4<S: QuantumState + ?Sized>(state: &S) -> Result<(f64, f64)> {
    use std::sync::OnceLock;
    static DESIGNS: OnceLock<(SphericalDesign, SphericalDesign)> = OnceLock::new();
    let (oct, ico) = DESIGNS.get_or_init(|| (crate::designs::octahedron(), crate::designs::icosahedron()));
    let tensor = state.correlation_tensor();
    Ok((
        moment_design(&tensor, 2, oct)?.value,
        moment_design(&tensor, 4, ico)?.value,
    ))
}
