//! Entanglement and SLOCC-class criteria phrased on the moments `R2`, `R4`.
//!
//! Every verdict carries a signed margin; a positive margin means the
//! criterion is violated, i.e. the state is detected.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::noisy_ghz_moments;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionId {
    BellDiagonalSeparability,
    ThreeQubitBisepConjecture,
    WClassR2Bound,
    WClassLinear,
    PureBisepFourthMoment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub criterion: CriterionId,
    pub inputs: BTreeMap<String, f64>,
    pub margin: f64,
    pub verdict: bool,
    pub flags: Vec<String>,
}

impl CriterionVerdict {
    fn new(criterion: CriterionId, inputs: &[(&str, f64)], margin: f64, flags: &[&str]) -> Self {
        Self {
            criterion,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            margin,
            verdict: margin > 0.0,
            flags: flags.iter().map(|f| f.to_string()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// `χ⁽ᴺ⁾ = (5 − 4/N)/3^N`, the largest `R2` in the mixed W class.
pub fn chi(n: usize) -> f64 {
    (5.0 - 4.0 / n as f64) / 3f64.powi(n as i32)
}

/// `R2 ≤ χ⁽ᴺ⁾` for every state in the convex hull of the W class.
pub fn w_class_r2_bound(r2: f64, n: usize) -> Result<CriterionVerdict> {
    if n < 2 {
        return Err(Error::InvalidParameter("W class needs at least 2 qubits".into()));
    }
    Ok(CriterionVerdict::new(
        CriterionId::WClassR2Bound,
        &[("R2", r2), ("N", n as f64)],
        r2 - chi(n),
        &[],
    ))
}

/// Slope `m` and intercept `b` of the line `R̃4 = m R̃2 + b` through the
/// rescaled moments of `|W_N⟩` and `|0⟩|W_{N−1}⟩`.
pub fn w_class_line(n: usize) -> (f64, f64) {
    let nf = n as f64;
    let den = 27.0 * nf * nf * (nf - 1.0).powi(2);
    let m = (-54.0 * nf.powi(4) + 196.0 * nf.powi(3) - 114.0 * nf * nf - 28.0 * nf + 24.0) / den;
    let b = (353.0 * nf.powi(4) - 1146.0 * nf.powi(3) + 829.0 * nf * nf + 156.0 * nf - 216.0) / den;
    (m, b)
}

/// Linear criterion `5^N R4 − m 3^N R2 − b ≤ 0` on the mixed W class.
pub fn w_class_linear(r2: f64, r4: f64, n: usize) -> Result<CriterionVerdict> {
    if n < 3 {
        return Err(Error::InvalidParameter("linear W-class criterion needs N ≥ 3".into()));
    }
    Ok(CriterionVerdict::new(
        CriterionId::WClassLinear,
        &[("R2", r2), ("R4", r4), ("N", n as f64)],
        linear_margin(r2, r4, n),
        &[],
    ))
}

fn linear_margin(r2: f64, r4: f64, n: usize) -> f64 {
    let (m, b) = w_class_line(n);
    5f64.powi(n as i32) * r4 - m * 3f64.powi(n as i32) * r2 - b
}

/// Conjectured lower bound `R4 ≥ (972 R2² + 90 R2 − 5)/425` for
/// bi-separable three-qubit states.
pub fn three_qubit_bisep_bound(r2: f64) -> f64 {
    (972.0 * r2 * r2 + 90.0 * r2 - 5.0) / 425.0
}

pub fn three_qubit_bisep_conjecture(r2: f64, r4: f64) -> CriterionVerdict {
    CriterionVerdict::new(
        CriterionId::ThreeQubitBisepConjecture,
        &[("R2", r2), ("R4", r4)],
        three_qubit_bisep_bound(r2) - r4,
        &["conjectured"],
    )
}

/// `R4` of `|φ⟩ ⊗ |Ψ⟩` as a function of `R2`, for `R2 ∈ [1/27, 1/9]`.
///
/// Both moments depend only on the Schmidt angle of the two-qubit factor;
/// eliminating it gives this parabola through the product point
/// `(1/27, 1/125)` and the Bell point `(1/9, 1/25)`.
pub fn pure_bisep_curve(r2: f64) -> f64 {
    (1458.0 * r2 * r2 - 54.0 * r2 + 3.0) / 375.0
}

/// Pure bi-separable three-qubit states satisfy `R4 = pure_bisep_curve(R2)`
/// with `R2 ≤ 1/9`; anything below the curve, or with larger `R2`, is not
/// pure bi-separable.
pub fn pure_bisep_fourth_moment_bound(r2: f64, r4: f64) -> CriterionVerdict {
    let inputs = [("R2", r2), ("R4", r4)];
    if r2 < 1.0 / 27.0 {
        return CriterionVerdict::new(
            CriterionId::PureBisepFourthMoment,
            &inputs,
            r2 - 1.0 / 27.0,
            &["pure-state criterion", "degenerate"],
        );
    }
    let mut margin = pure_bisep_curve(r2) - r4;
    if r2 > 1.0 / 9.0 {
        margin = margin.max(r2 - 1.0 / 9.0);
    }
    CriterionVerdict::new(
        CriterionId::PureBisepFourthMoment,
        &inputs,
        margin,
        &["pure-state criterion", "exact pure-bisep curve"],
    )
}

/// `α = |c|²` and `β = Σc_i⁴` of a Bell-diagonal state from its moments.
pub fn bell_alpha_beta(r2: f64, r4: f64) -> (f64, f64) {
    let alpha = 9.0 * r2;
    (alpha, 225.0 * r4 / 6.0 - alpha * alpha / 2.0)
}

/// Smallest `Σc_i⁴` over separable Bell-diagonal correlations
/// (`|c|₁ ≤ 1`) with `|c|² = α`, for `α ∈ [1/3, 1]`.
///
/// On the sphere `|c|² = α` the quartic decreases towards the diagonals, so
/// the minimum sits on the face `|c|₁ = 1`. Stationary points there have at
/// most two distinct non-zero magnitudes, leaving the families `(a,b,b)` and
/// `(a,b,0)` with `a + 2b = 1` or `a + b = 1`.
pub fn bell_separable_beta_min(alpha: f64) -> f64 {
    let alpha = alpha.clamp(1.0 / 3.0, 1.0);
    let mut best = f64::INFINITY;
    let r = (6.0 * alpha - 2.0).max(0.0).sqrt();
    for b in [(2.0 + r) / 6.0, (2.0 - r) / 6.0] {
        let a = 1.0 - 2.0 * b;
        if a >= -1e-15 && b >= -1e-15 {
            best = best.min(a.powi(4) + 2.0 * b.powi(4));
        }
    }
    if alpha >= 0.5 {
        let r = (2.0 * alpha - 1.0).sqrt();
        let (a, b) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        best = best.min(a.powi(4) + b.powi(4));
    }
    best
}

/// Separable boundary `β_min(α)` tabulated on `s = √(α − 1/3)`, where it is
/// smooth apart from a kink at `α = 1/2`.
pub struct BellBoundaryTable {
    s: Vec<f64>,
    beta: Vec<f64>,
    /// Twice the largest interpolation error seen at cell midpoints.
    error_bound: f64,
}

const BELL_TABLE_NODES: usize = 20_001;

impl BellBoundaryTable {
    fn build() -> Self {
        let s_max = (2.0f64 / 3.0).sqrt();
        let h = s_max / (BELL_TABLE_NODES - 1) as f64;
        let s: Vec<f64> = (0..BELL_TABLE_NODES).map(|i| i as f64 * h).collect();
        let beta: Vec<f64> = s.iter().map(|v| bell_separable_beta_min(1.0 / 3.0 + v * v)).collect();
        let mut error_bound: f64 = 0.0;
        for i in 0..BELL_TABLE_NODES - 1 {
            let mid = (s[i] + s[i + 1]) / 2.0;
            let exact = bell_separable_beta_min(1.0 / 3.0 + mid * mid);
            error_bound = error_bound.max(((beta[i] + beta[i + 1]) / 2.0 - exact).abs());
        }
        // Midpoints see the typical error; double it to cover the kink cell.
        Self {
            s,
            beta,
            error_bound: 2.0 * error_bound,
        }
    }

    pub fn global() -> &'static Self {
        static TABLE: OnceLock<BellBoundaryTable> = OnceLock::new();
        TABLE.get_or_init(Self::build)
    }

    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    pub fn beta_min(&self, alpha: f64) -> f64 {
        let s = (alpha - 1.0 / 3.0).max(0.0).sqrt();
        let h = self.s[1] - self.s[0];
        let pos = (s / h).min((self.s.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.s.len() - 2);
        let w = pos - i as f64;
        self.beta[i] * (1.0 - w) + self.beta[i + 1] * w
    }
}

/// Detects entangled Bell-diagonal states from `(R2, R4)`.
///
/// Inside `α ≤ 1/3` every Bell-diagonal state is separable; above `α = 1`
/// none is. In between, the state is entangled when `β` lies below the
/// separable minimum at the same `α`. The margin subtracts the table's
/// interpolation error so boundary states are never flagged.
pub fn bell_diagonal_separability(r2: f64, r4: f64) -> CriterionVerdict {
    let (alpha, beta) = bell_alpha_beta(r2, r4);
    let inputs = [("R2", r2), ("R4", r4), ("alpha", alpha), ("beta", beta)];
    let id = CriterionId::BellDiagonalSeparability;
    if alpha <= 1.0 / 3.0 {
        return CriterionVerdict::new(id, &inputs, alpha - 1.0 / 3.0, &["all-separable region"]);
    }
    if alpha > 1.0 {
        return CriterionVerdict::new(id, &inputs, alpha - 1.0, &[]);
    }
    let table = BellBoundaryTable::global();
    let margin = table.beta_min(alpha) - beta - table.error_bound() - 1e-12;
    CriterionVerdict::new(id, &inputs, margin, &[])
}

/// Noise thresholds for `ρ = p𝟙/2^N + (1−p)|GHZ_N⟩⟨GHZ_N|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseThresholds {
    pub n: usize,
    /// Largest `p` detected by the `R2` bound.
    pub p_star: f64,
    /// Largest `p` detected by the linear `(R2, R4)` criterion.
    pub p_star_linear: f64,
    /// Largest `p` detected by the fidelity witness `λ𝟙 − |GHZ⟩⟨GHZ|`.
    pub p_tilde_star: f64,
}

pub const BISECTION_TOL: f64 = 1e-9;

pub fn ghz_noise_thresholds(n: usize) -> Result<NoiseThresholds> {
    if n < 3 {
        return Err(Error::InvalidParameter("thresholds need N ≥ 3".into()));
    }
    let nf = n as f64;
    let p_star = if n % 2 == 1 {
        1.0 - 2f64.powf(0.5 - nf / 2.0) * (5.0 - 4.0 / nf).sqrt()
    } else {
        1.0 - (10.0 * nf - 8.0).sqrt() / ((2f64.powi(n as i32) + 2.0) * nf).sqrt()
    };
    let lambda = if n == 3 { 0.75 } else { 0.5 };
    let p_tilde_star = (1.0 - lambda) / (1.0 - 2f64.powi(-(n as i32)));

    let margin = |p: f64| -> Result<f64> {
        let (r2, r4) = noisy_ghz_moments(p, n)?;
        Ok(linear_margin(r2, r4, n))
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    if margin(lo)? <= 0.0 {
        hi = 0.0;
    }
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if margin(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(NoiseThresholds {
        n,
        p_star,
        p_star_linear: 0.5 * (lo + hi),
        p_tilde_star,
    })
}

/// Euclidean projection onto `{x ≥ 0, Σx ≤ 1}`.
fn project_capped_simplex(v: &mut [f64]) {
    let clipped: Vec<f64> = v.iter().map(|x| x.max(0.0)).collect();
    if clipped.iter().sum::<f64>() <= 1.0 {
        v.copy_from_slice(&clipped);
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (k + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Maximizes `R2 = [1 + 8Σ_{i<j} x_i x_j]/3^N` over the W standard form with
/// the last `k` weights pinned to zero, by projected gradient ascent.
pub fn simplex_max_r2(n: usize, k: usize) -> Result<(Vec<f64>, f64)> {
    if n < 2 || k >= n {
        return Err(Error::InvalidParameter(format!("need 0 ≤ k < N, got N={n}, k={k}")));
    }
    let free = n - k;
    let total: f64 = (1..=free).map(|i| i as f64).sum();
    let mut x: Vec<f64> = (1..=free).map(|i| i as f64 / total).collect();
    let step = 0.5;
    for _ in 0..100_000 {
        let s: f64 = x.iter().sum();
        let mut next: Vec<f64> = x.iter().map(|&xi| xi + step * (s - xi)).collect();
        project_capped_simplex(&mut next);
        let change = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if change < 1e-15 {
            break;
        }
    }
    let s: f64 = x.iter().sum();
    let sq: f64 = x.iter().map(|v| v * v).sum();
    let value = (1.0 + 4.0 * (s * s - sq)) / 3f64.powi(n as i32);
    x.resize(n, 0.0);
    Ok((x, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_values() {
        assert!((chi(3) - 11.0 / 81.0).abs() < 1e-16);
        assert!(w_class_r2_bound(11.0 / 81.0, 3).unwrap().margin.abs() < 1e-16);
        assert!(w_class_r2_bound(4.0 / 27.0, 3).unwrap().verdict);
        for n in 4..=8i32 {
            assert!(!w_class_r2_bound(4.0 / 3f64.powi(n), n as usize).unwrap().verdict);
        }
    }

    #[test]
    fn conjecture_examples() {
        let v = three_qubit_bisep_conjecture(1.0 / 9.0, 1.0 / 25.0);
        assert!(v.margin.abs() < 1e-16);
        assert_eq!(v.flags, vec!["conjectured"]);
        let mm = three_qubit_bisep_conjecture(0.0, 0.0);
        assert!((mm.margin + 5.0 / 425.0).abs() < 1e-16);
        let (r2, r4) = crate::moments::ghz_moments(3).unwrap();
        assert!(three_qubit_bisep_conjecture(r2, r4).verdict);
    }

    #[test]
    fn pure_bisep_examples() {
        let bell_end = pure_bisep_fourth_moment_bound(1.0 / 9.0, 1.0 / 25.0);
        assert!(bell_end.margin.abs() < 1e-16 && !bell_end.verdict);
        let product = pure_bisep_fourth_moment_bound(1.0 / 27.0, 1.0 / 125.0);
        assert!(product.margin.abs() < 1e-16 && !product.verdict);
        let zero = pure_bisep_fourth_moment_bound(0.0, 0.0);
        assert!(!zero.verdict && zero.flags.contains(&"degenerate".to_string()));
        assert!(bell_end.flags.contains(&"pure-state criterion".to_string()));
    }

    #[test]
    fn linear_line_through_w_points() {
        for n in 3..=8 {
            let (m, b) = w_class_line(n);
            assert!(m < 0.0 && b > 0.0);
        }
    }

    #[test]
    fn bell_boundary() {
        assert!(bell_diagonal_separability(1.0 / 3.0, 0.2).verdict);
        assert!(!bell_diagonal_separability(0.0, 0.0).verdict);
        assert!(!bell_diagonal_separability(1.0 / 27.0, 1.0 / 375.0).verdict);
        let table = BellBoundaryTable::global();
        assert!(table.error_bound() < 1e-6);
        for i in 0..=200 {
            let alpha = 1.0 / 3.0 + (2.0 / 3.0) * i as f64 / 200.0;
            assert!((table.beta_min(alpha) - bell_separable_beta_min(alpha)).abs() <= table.error_bound() + 1e-15);
        }
        // (1/3,1/3,1/3) and (1,0,0) endpoints
        assert!((bell_separable_beta_min(1.0 / 3.0) - 1.0 / 27.0).abs() < 1e-15);
        assert!((bell_separable_beta_min(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thresholds() {
        let t3 = ghz_noise_thresholds(3).unwrap();
        assert!((t3.p_star - 0.042572).abs() < 1e-6);
        assert!((t3.p_tilde_star - 2.0 / 7.0).abs() < 1e-15);
        let t4 = ghz_noise_thresholds(4).unwrap();
        assert!((t4.p_star - 1.0 / 3.0).abs() < 1e-15);
        assert!((t4.p_tilde_star - 8.0 / 15.0).abs() < 1e-15);
        let t6 = ghz_noise_thresholds(6).unwrap();
        assert!((t6.p_star - 0.63763).abs() < 1e-5 && t6.p_star > t6.p_tilde_star);
    }

    #[test]
    fn simplex_examples() {
        let (x, v) = simplex_max_r2(6, 0).unwrap();
        assert!((v - (13.0 / 3.0) / 729.0).abs() < 1e-12);
        assert!(x.iter().all(|xi| (xi - 1.0 / 6.0).abs() < 1e-9));
        let (x, v) = simplex_max_r2(5, 4).unwrap();
        assert!((v - 1.0 / 243.0).abs() < 1e-15);
        assert_eq!(x, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn verdict_json() {
        let v = w_class_linear(0.1, 0.03, 3).unwrap();
        let json = v.to_json().unwrap();
        assert!(json.contains("\"criterion\":\"w-class-linear\""));
        assert_eq!(serde_json::from_str::<CriterionVerdict>(&json).unwrap(), v);
    }
}
