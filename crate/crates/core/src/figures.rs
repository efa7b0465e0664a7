//! Tabular data behind the plots: design certification tables, correlation
//! histograms, moment scans with labelled landmark states, noise thresholds
//! and boundary curves in the `(R2, R4)` plane.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    bell_separable_beta_min, ghz_noise_thresholds, pure_bisep_curve, three_qubit_bisep_bound, NoiseThresholds,
};
use crate::designs::{
    catalan, resolve_design, verify_spherical, verify_unitary, Design, FRAME_POTENTIAL_TOL, SPHERICAL_RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::moments::{design_r2_r4, ghz_r2, random_direction, MONTE_CARLO_BLOCK};
use crate::qubit::{CorrelationTensor, DensityMatrix, PureState, QuantumState};
use crate::sampling::{random_density_hs, sample_mixed_class, sample_pure_class, SeededRng, StateClass};
use crate::states;

/// One `(design, t)` certification result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReportRow {
    pub design: String,
    pub kind: String,
    pub declared_strength: usize,
    pub t: usize,
    /// Monomial residual (spherical) or frame potential (unitary).
    pub metric: f64,
    /// 0 for residuals, `C_t` for frame potentials.
    pub target: f64,
    pub points: usize,
    pub pass: bool,
}

/// Certification table for each design at `t = 1..=t_max`. A row passes
/// when the design behaves as a t-design at that order.
pub fn designs_report(names: &[String], t_max: usize) -> Result<Vec<DesignReportRow>> {
    let mut rows = Vec::new();
    for name in names {
        let design = resolve_design(name)?;
        for t in 1..=t_max {
            rows.push(match &design {
                Design::Spherical(d) => {
                    let r = verify_spherical(d.points(), t);
                    DesignReportRow {
                        design: d.name().to_string(),
                        kind: "spherical".into(),
                        declared_strength: d.strength(),
                        t,
                        metric: r,
                        target: 0.0,
                        points: d.len(),
                        pass: r < SPHERICAL_RESIDUAL_TOL,
                    }
                }
                Design::Unitary(d) => {
                    let fp = verify_unitary(d.unitaries(), t);
                    DesignReportRow {
                        design: d.name().to_string(),
                        kind: "unitary".into(),
                        declared_strength: d.strength(),
                        t,
                        metric: fp,
                        target: catalan(t),
                        points: d.len(),
                        pass: (fp - catalan(t)).abs() < FRAME_POTENTIAL_TOL,
                    }
                }
            });
        }
    }
    Ok(rows)
}

/// Two-qubit states offered for correlation histograms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwoQubitState {
    Product,
    WMarginal,
    Werner(f64),
    Bell,
    MaximallyMixed,
}

impl TwoQubitState {
    pub fn density(&self) -> Result<DensityMatrix> {
        match *self {
            TwoQubitState::Product => Ok(DensityMatrix::from_pure(&PureState::basis(2, 0)?)),
            TwoQubitState::WMarginal => Ok(states::w_marginal()),
            TwoQubitState::Werner(q) => states::werner(q),
            TwoQubitState::Bell => Ok(DensityMatrix::from_pure(&states::bell())),
            TwoQubitState::MaximallyMixed => DensityMatrix::maximally_mixed(2),
        }
    }
}

impl fmt::Display for TwoQubitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoQubitState::Product => f.write_str("product"),
            TwoQubitState::WMarginal => f.write_str("w-marginal"),
            TwoQubitState::Werner(q) => write!(f, "werner:{q}"),
            TwoQubitState::Bell => f.write_str("bell"),
            TwoQubitState::MaximallyMixed => f.write_str("mixed"),
        }
    }
}

impl FromStr for TwoQubitState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "product" => Ok(TwoQubitState::Product),
            "w-marginal" => Ok(TwoQubitState::WMarginal),
            "werner" => Ok(TwoQubitState::Werner(1.0 / 3f64.sqrt())),
            "bell" => Ok(TwoQubitState::Bell),
            "mixed" => Ok(TwoQubitState::MaximallyMixed),
            _ => {
                let q = s
                    .strip_prefix("werner:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown two-qubit state `{s}`")))?;
                Ok(TwoQubitState::Werner(q))
            }
        }
    }
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub standard_error: f64,
}

impl Estimate {
    pub fn from_values(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / n;
        let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self {
            mean,
            standard_error: (var / n).sqrt(),
        }
    }

    /// Whether `value` lies within `k` standard errors.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.standard_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub state: String,
    pub seed: u64,
    pub values: Vec<f64>,
    pub r2: Estimate,
    pub r4: Estimate,
}

/// Correlation values `E(u_1, …, u_N)` at uniformly random directions,
/// drawn with the same block-stream layout as the Monte Carlo moments.
pub fn sample_correlations<S: QuantumState + ?Sized>(state: &S, samples: usize, seed: u64) -> Vec<f64> {
    let tensor: CorrelationTensor = state.correlation_tensor();
    let n = tensor.num_qubits();
    let blocks = samples.div_ceil(MONTE_CARLO_BLOCK);
    (0..blocks)
        .into_par_iter()
        .flat_map_iter(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = MONTE_CARLO_BLOCK.min(samples - b * MONTE_CARLO_BLOCK);
            let tensor = &tensor;
            (0..count)
                .map(move |_| {
                    let dirs: Vec<[f64; 3]> = (0..n).map(|_| random_direction(&mut rng)).collect();
                    tensor.evaluate(&dirs)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn histogram(state: TwoQubitState, samples: usize, seed: u64) -> Result<Histogram> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!("{samples} samples, at least 100 required")));
    }
    let values = sample_correlations(&state.density()?, samples, seed);
    let r2 = Estimate::from_values(values.iter().map(|e| e * e));
    let r4 = Estimate::from_values(values.iter().map(|e| e.powi(4)));
    Ok(Histogram {
        state: state.to_string(),
        seed,
        values,
        r2,
        r4,
    })
}

/// A labelled reference state in the moment plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub label: char,
    pub description: String,
    pub r2: f64,
    pub r4: f64,
}

fn landmark<S: QuantumState + ?Sized>(label: char, description: &str, state: &S) -> Result<Landmark> {
    let (r2, r4) = design_r2_r4(state)?;
    Ok(Landmark {
        label,
        description: description.to_string(),
        r2,
        r4,
    })
}

/// Labelled states of the Bell-diagonal (N=2), three-qubit and four-qubit
/// moment-plane plots, evaluated by design sums.
pub fn landmarks(n: usize) -> Result<Vec<Landmark>> {
    let zero = |k: usize| PureState::basis(k, 0);
    let mixed = DensityMatrix::maximally_mixed(n)?;
    match n {
        2 => Ok(vec![
            landmark('A', "maximally mixed", &mixed)?,
            landmark('B', "pure product", &zero(2)?)?,
            landmark('C', "Bell state", &states::bell())?,
        ]),
        3 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let d1 = PureState::from_real(&[s, 0.0, 0.0, s, 0.0, 0.0, 0.0, 0.0])?;
            let d2 = PureState::from_real(&[0.0, 0.0, 0.0, 0.0, 0.0, s, s, 0.0])?;
            let d = DensityMatrix::mixture(&[0.5, 0.5], &[d1, d2])?;
            Ok(vec![
                landmark('A', "maximally mixed", &mixed)?,
                landmark('B', "pure product", &zero(3)?)?,
                landmark('C', "|0>|Bell>", &states::zeros_then(1, &states::bell())?)?,
                landmark('D', "mixture of |0>(|00>+|11>) and |1>(|01>+|10>)", &d)?,
                landmark('E', "W state", &states::w(3)?)?,
                landmark('F', "GHZ state", &states::ghz(3)?)?,
            ])
        }
        4 => Ok(vec![
            landmark('A', "maximally mixed", &mixed)?,
            landmark('B', "pure product", &zero(4)?)?,
            landmark('C', "|00>|Bell>", &states::zeros_then(2, &states::bell())?)?,
            landmark('D', "|0>|W3>", &states::zeros_then(1, &states::w(3)?)?)?,
            landmark('E', "|0>|GHZ3>", &states::zeros_then(1, &states::ghz(3)?)?)?,
            landmark('F', "|Bell>|Bell>", &states::bell().kron(&states::bell()))?,
            landmark('G', "W state", &states::w(4)?)?,
            landmark('H', "GHZ state", &states::ghz(4)?)?,
        ]),
        _ => Err(Error::UnsupportedClass(format!("no landmarks for N={n}"))),
    }
}

/// Which states a scan draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ScanSource {
    Pure(StateClass),
    /// Class mixtures with `terms` components (default `2^N`).
    Mixed { class: StateClass, terms: Option<usize> },
    /// Hilbert–Schmidt random density matrices.
    AllStates,
}

impl fmt::Display for ScanSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanSource::Pure(c) => write!(f, "{c}"),
            ScanSource::Mixed { class, .. } => write!(f, "{class}-mixed"),
            ScanSource::AllStates => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub class: String,
    pub n: usize,
    pub index: usize,
    pub r2: f64,
    pub r4: f64,
    pub seed: u64,
}

/// Draws one state per stream `index` of `seed` and records its moments.
pub fn scan(source: &ScanSource, n: usize, samples: usize, seed: u64) -> Result<Vec<ScanRow>> {
    let label = source.to_string();
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = SeededRng::new(seed, index as u64);
            let tensor = match source {
                ScanSource::Pure(class) => sample_pure_class(class, n, &mut rng)?.correlation_tensor(),
                ScanSource::Mixed { class, terms } => {
                    sample_mixed_class(class, n, *terms, &mut rng)?.correlation_tensor()
                }
                ScanSource::AllStates => random_density_hs(n, &mut rng)?.correlation_tensor(),
            };
            let (r2, r4) = design_r2_r4(&tensor)?;
            Ok(ScanRow {
                class: label.clone(),
                n,
                index,
                r2,
                r4,
                seed,
            })
        })
        .collect()
}

/// Largest `R2` over all N-qubit states: GHZ, or a product of Bell pairs
/// (equal at N=4).
pub fn r2_envelope(n: usize) -> Result<f64> {
    let pairs = 3f64.powi(-(n.div_ceil(2) as i32));
    Ok(ghz_r2(n)?.max(pairs))
}

/// Every physical moment pair obeys `0 ≤ R4 ≤ R2 ≤ envelope`.
pub fn inside_envelope(r2: f64, r4: f64, n: usize, tol: f64) -> Result<bool> {
    Ok(r2 >= -tol && r4 >= -tol && r4 <= r2 + tol && r2 <= r2_envelope(n)? + tol)
}

pub fn thresholds_table(n_max: usize) -> Result<Vec<NoiseThresholds>> {
    if n_max < 3 {
        return Err(Error::InvalidParameter("N_max must be at least 3".into()));
    }
    (3..=n_max).map(ghz_noise_thresholds).collect()
}

/// First N at which the `R2` criterion tolerates more noise than the witness.
pub fn threshold_crossover(table: &[NoiseThresholds]) -> Option<usize> {
    table.iter().find(|t| t.p_star > t.p_tilde_star).map(|t| t.n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryFamily {
    BellDiagonal,
    ThreeQubitBisep,
}

impl FromStr for BoundaryFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bell_diagonal" | "bell-diagonal" => Ok(BoundaryFamily::BellDiagonal),
            "three_qubit_bisep" | "three-qubit-bisep" => Ok(BoundaryFamily::ThreeQubitBisep),
            _ => Err(Error::InvalidParameter(format!("unknown boundary family `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub curve: String,
    pub r2: f64,
    pub r4: f64,
}

fn bell_point(curve: &str, alpha: f64, beta: f64) -> BoundaryPoint {
    BoundaryPoint {
        curve: curve.to_string(),
        r2: alpha / 9.0,
        r4: (2.0 * beta + alpha * alpha) / 75.0,
    }
}

/// Boundary curves sampled at `points` abscissae per curve.
pub fn boundary(family: BoundaryFamily, points: usize) -> Result<Vec<BoundaryPoint>> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two points per curve".into()));
    }
    let grid = |lo: f64, hi: f64| (0..points).map(move |i| lo + (hi - lo) * i as f64 / (points - 1) as f64);
    let mut out = Vec::new();
    match family {
        BoundaryFamily::BellDiagonal => {
            // Diagonal correlations minimise Σc⁴ at fixed |c|²: lower edge of all states.
            out.extend(grid(0.0, 3.0).map(|a| bell_point("all-lower", a, a * a / 3.0)));
            // Axis-aligned correlations maximise it; separable up to |c|² = 1.
            out.extend(grid(0.0, 1.0).map(|a| bell_point("separable-upper", a, a * a)));
            out.extend(grid(0.0, 1.0 / 3.0).map(|a| bell_point("separable-lower", a, a * a / 3.0)));
            out.extend(grid(1.0 / 3.0, 1.0).map(|a| bell_point("separable-lower", a, bell_separable_beta_min(a))));
            out.push(bell_point("all-separable-below", 1.0 / 3.0, 1.0 / 27.0));
            for lm in landmarks(2)? {
                out.push(BoundaryPoint {
                    curve: format!("landmark-{}", lm.label),
                    r2: lm.r2,
                    r4: lm.r4,
                });
            }
        }
        BoundaryFamily::ThreeQubitBisep => {
            out.extend(grid(0.0, 4.0 / 27.0).map(|r2| BoundaryPoint {
                curve: "bisep-conjecture".into(),
                r2,
                r4: three_qubit_bisep_bound(r2),
            }));
            out.extend(grid(1.0 / 27.0, 1.0 / 9.0).map(|r2| BoundaryPoint {
                curve: "pure-bisep".into(),
                r2,
                r4: pure_bisep_curve(r2),
            }));
            for lm in landmarks(3)? {
                out.push(BoundaryPoint {
                    curve: format!("landmark-{}", lm.label),
                    r2: lm.r2,
                    r4: lm.r4,
                });
            }
        }
    }
    Ok(out)
}
