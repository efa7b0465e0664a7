//! Spherical and single-qubit unitary designs: construction, certification
//! and JSON persistence.
//!
//! A set of Bloch points is certified as a spherical t-design by comparing
//! its average of every monomial `x^a y^b z^c` (with `a+b+c ≤ t`) against the
//! exact sphere average. A unitary set is certified through its frame
//! potential, which equals the Catalan number `C_t` exactly for t-designs on
//! the single-qubit unitary group.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{pauli, Axis, BlochVector, ComplexSquareMatrix};

/// Largest monomial residual accepted for a certified spherical design.
pub const SPHERICAL_RESIDUAL_TOL: f64 = 1e-9;
/// Largest frame-potential deviation accepted for a certified unitary design.
pub const FRAME_POTENTIAL_TOL: f64 = 1e-9;
/// Two unitaries are the same up to phase when `|tr(U†V)|` is 2 within this.
pub const PHASE_DEDUP_TOL: f64 = 1e-9;
/// Euclidean tolerance for identifying Bloch points.
pub const POINT_DEDUP_TOL: f64 = 1e-9;
pub const UNITARITY_TOL: f64 = 1e-10;

const SNUB7_JSON: &str = include_str!("../data/snub7.json");

/// Finite set of unit vectors certified as a spherical t-design.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalDesign {
    name: String,
    strength: usize,
    points: Vec<BlochVector>,
}

impl SphericalDesign {
    /// Certifies the points at the declared strength.
    pub fn new(name: impl Into<String>, strength: usize, points: Vec<BlochVector>) -> Result<Self> {
        let name = name.into();
        if points.is_empty() {
            return Err(Error::InvalidParameter("design has no points".into()));
        }
        for p in &points {
            p.check_unit()?;
        }
        let residual = verify_spherical(&points, strength);
        if residual > SPHERICAL_RESIDUAL_TOL {
            return Err(Error::Certification {
                name,
                t: strength,
                detail: format!("monomial residual {residual:e} exceeds {SPHERICAL_RESIDUAL_TOL:e}"),
            });
        }
        Ok(Self {
            name,
            strength,
            points,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn points(&self) -> &[BlochVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn residual(&self, t: usize) -> f64 {
        verify_spherical(&self.points, t)
    }

    /// One point of each antipodal pair, or `None` if the set is not point
    /// symmetric.
    pub fn antipodal_representatives(&self) -> Option<Vec<BlochVector>> {
        let n = self.points.len();
        if n % 2 != 0 {
            return None;
        }
        let mut used = vec![false; n];
        let mut reps = Vec::with_capacity(n / 2);
        for i in 0..n {
            if used[i] {
                continue;
            }
            let anti = self.points[i].neg();
            let partner = (i + 1..n).find(|&j| !used[j] && self.points[j].distance(&anti) < POINT_DEDUP_TOL)?;
            used[i] = true;
            used[partner] = true;
            reps.push(self.points[i]);
        }
        Some(reps)
    }

    pub fn is_antipodal(&self) -> bool {
        self.antipodal_representatives().is_some()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DesignFile::from(&Design::Spherical(self.clone())))?)
    }
}

/// Finite set of 2×2 unitaries, pairwise distinct up to a global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryDesign {
    name: String,
    strength: usize,
    unitaries: Vec<ComplexSquareMatrix>,
}

impl UnitaryDesign {
    /// Checks unitarity, phase-distinctness and, for `strength ≥ 1`, the
    /// frame potential at every order up to `strength`.
    pub fn new(
        name: impl Into<String>,
        strength: usize,
        unitaries: Vec<ComplexSquareMatrix>,
    ) -> Result<Self> {
        let name = name.into();
        if unitaries.is_empty() {
            return Err(Error::InvalidParameter("design has no elements".into()));
        }
        for u in &unitaries {
            if u.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    actual: u.dim(),
                });
            }
            let err = u.unitarity_error();
            if err > UNITARITY_TOL {
                return Err(Error::InvalidParameter(format!("element not unitary (error {err:e})")));
            }
        }
        if dedup_phase(&unitaries).len() != unitaries.len() {
            return Err(Error::InvalidParameter(
                "elements must be distinct up to a global phase".into(),
            ));
        }
        for t in 1..=strength {
            let fp = verify_unitary(&unitaries, t);
            let target = catalan(t);
            if (fp - target).abs() > FRAME_POTENTIAL_TOL {
                return Err(Error::Certification {
                    name,
                    t,
                    detail: format!("frame potential {fp} differs from Catalan number {target}"),
                });
            }
        }
        Ok(Self {
            name,
            strength,
            unitaries,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn strength(&self) -> usize {
        self.strength
    }

    pub fn unitaries(&self) -> &[ComplexSquareMatrix] {
        &self.unitaries
    }

    pub fn len(&self) -> usize {
        self.unitaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unitaries.is_empty()
    }

    pub fn frame_potential(&self, t: usize) -> f64 {
        verify_unitary(&self.unitaries, t)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DesignFile::from(&Design::Unitary(self.clone())))?)
    }
}

/// Either kind of design, as stored in a design file.
#[derive(Debug, Clone, PartialEq)]
pub enum Design {
    Spherical(SphericalDesign),
    Unitary(UnitaryDesign),
}

impl Design {
    pub fn name(&self) -> &str {
        match self {
            Design::Spherical(d) => d.name(),
            Design::Unitary(d) => d.name(),
        }
    }

    pub fn strength(&self) -> usize {
        match self {
            Design::Spherical(d) => d.strength(),
            Design::Unitary(d) => d.strength(),
        }
    }

    /// Bloch points usable for moment sums.
    pub fn to_spherical(&self) -> SphericalDesign {
        match self {
            Design::Spherical(d) => d.clone(),
            Design::Unitary(d) => spherical_from_unitary(d),
        }
    }
}

/// The four built-in point sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinSpherical {
    Octahedron,
    Icosahedron,
    Icosidodecahedron,
    Snub7,
}

impl BuiltinSpherical {
    pub const ALL: [BuiltinSpherical; 4] = [
        BuiltinSpherical::Octahedron,
        BuiltinSpherical::Icosahedron,
        BuiltinSpherical::Icosidodecahedron,
        BuiltinSpherical::Snub7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinSpherical::Octahedron => "octahedron",
            BuiltinSpherical::Icosahedron => "icosahedron",
            BuiltinSpherical::Icosidodecahedron => "icosidodecahedron",
            BuiltinSpherical::Snub7 => "snub7",
        }
    }

    pub fn strength(self) -> usize {
        match self {
            BuiltinSpherical::Octahedron => 3,
            BuiltinSpherical::Icosahedron | BuiltinSpherical::Icosidodecahedron => 5,
            BuiltinSpherical::Snub7 => 7,
        }
    }

    pub fn build(self) -> Result<SphericalDesign> {
        match self {
            BuiltinSpherical::Octahedron => Ok(octahedron()),
            BuiltinSpherical::Icosahedron => Ok(icosahedron()),
            BuiltinSpherical::Icosidodecahedron => icosidodecahedron(),
            BuiltinSpherical::Snub7 => snub7(),
        }
    }
}

impl fmt::Display for BuiltinSpherical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinSpherical {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinSpherical::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::UnknownDesign(s.to_string()))
    }
}

pub fn builtin_spherical(name: &str) -> Result<SphericalDesign> {
    name.parse::<BuiltinSpherical>()?.build()
}

/// `{±e_x, ±e_y, ±e_z}`, a 3-design.
pub fn octahedron() -> SphericalDesign {
    let mut pts = vec![BlochVector::E_X, BlochVector::E_Y, BlochVector::E_Z];
    pts.extend([BlochVector::E_X, BlochVector::E_Y, BlochVector::E_Z].map(|p| p.neg()));
    SphericalDesign::new("octahedron", 3, pts).expect("octahedron is a 3-design")
}

/// Cyclic permutations of `(0, ±1, ±φ)/√(1+φ²)`, a 5-design.
pub fn icosahedron() -> SphericalDesign {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let norm = (1.0 + phi * phi).sqrt();
    let mut pts = Vec::with_capacity(12);
    for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        let (a, b) = (s1 / norm, s2 * phi / norm);
        pts.push(BlochVector::new(0.0, a, b));
        pts.push(BlochVector::new(a, b, 0.0));
        pts.push(BlochVector::new(b, 0.0, a));
    }
    SphericalDesign::new("icosahedron", 5, pts).expect("icosahedron is a 5-design")
}

/// Bloch directions extracted from the SL(2,F5) unitary 5-design.
pub fn icosidodecahedron() -> Result<SphericalDesign> {
    let sph = spherical_from_unitary(&sl2f5_design()?);
    SphericalDesign::new("icosidodecahedron", 5, sph.points)
}

/// 24-point spherical 7-design with chiral octahedral symmetry (a deformed
/// snub cube), loaded from the frozen coordinate file.
pub fn snub7() -> Result<SphericalDesign> {
    match parse_design(SNUB7_JSON)? {
        Design::Spherical(d) if d.len() == 24 && d.strength() == 7 => Ok(d),
        _ => Err(Error::InvalidParameter("snub7 data file is malformed".into())),
    }
}

/// The 24 proper rotations of the cube, as signed permutation matrices.
pub fn chiral_octahedral_rotations() -> Vec<[[f64; 3]; 3]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        let parity = if matches!(perm, [0, 1, 2] | [1, 2, 0] | [2, 0, 1]) { 1.0 } else { -1.0 };
        for signs in 0..8u8 {
            let s: [f64; 3] = std::array::from_fn(|i| if signs >> i & 1 == 1 { -1.0 } else { 1.0 });
            if parity * s[0] * s[1] * s[2] < 0.0 {
                continue;
            }
            let mut m = [[0.0; 3]; 3];
            for i in 0..3 {
                m[i][perm[i]] = s[i];
            }
            out.push(m);
        }
    }
    out
}

fn orbit(point: [f64; 3]) -> Vec<BlochVector> {
    chiral_octahedral_rotations()
        .iter()
        .map(|m| {
            let r: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| m[i][j] * point[j]).sum());
            BlochVector::new(r[0], r[1], r[2])
        })
        .collect()
}

/// Real root of `x³ − x² − x − 1`.
pub fn tribonacci_constant() -> f64 {
    let r = 3f64 * 33f64.sqrt();
    (1.0 + (19.0 + r).cbrt() + (19.0 - r).cbrt()) / 3.0
}

/// Vertices of the regular snub cube: the rotation orbit of `(1, 1/τ, τ)`.
/// Only a 3-design.
pub fn regular_snub_cube() -> SphericalDesign {
    let tau = tribonacci_constant();
    let v = BlochVector::normalized(1.0, 1.0 / tau, tau).expect("non-zero");
    SphericalDesign::new("regular-snub-cube", 3, orbit(v.components()))
        .expect("snub cube is a 3-design")
}

/// Generator of a 24-point 7-design orbit, found by Newton iteration from
/// the regular snub cube vertex.
///
/// For a rotation orbit of the cube group every harmonic of degree ≤ 7 averages
/// to zero except the invariants of degree 4 and 6, so the orbit is a 7-design
/// iff the generator `u` satisfies `Σu_i⁴ = 3/5` and `u_x²u_y²u_z² = 1/105`.
/// The iteration runs on the squared coordinates `s_i = u_i²`.
pub fn solve_snub7_generator() -> Result<[f64; 3]> {
    let tau = tribonacci_constant();
    let seed = BlochVector::normalized(1.0, 1.0 / tau, tau)?.components();
    let (mut s1, mut s2) = (seed[0] * seed[0], seed[1] * seed[1]);
    for _ in 0..100 {
        let s3 = 1.0 - s1 - s2;
        let f1 = s1 * s1 + s2 * s2 + s3 * s3 - 3.0 / 5.0;
        let f2 = s1 * s2 * s3 - 1.0 / 105.0;
        if f1.abs() < 1e-16 && f2.abs() < 1e-17 {
            break;
        }
        let (j11, j12) = (2.0 * (s1 - s3), 2.0 * (s2 - s3));
        let (j21, j22) = (s2 * s3 - s1 * s2, s1 * s3 - s1 * s2);
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-300 {
            return Err(Error::InvalidParameter("singular Newton step".into()));
        }
        s1 -= (j22 * f1 - j12 * f2) / det;
        s2 -= (-j21 * f1 + j11 * f2) / det;
    }
    let s3 = 1.0 - s1 - s2;
    if [s1, s2, s3].iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter("Newton iteration left the positive octant".into()));
    }
    Ok([s1.sqrt(), s2.sqrt(), s3.sqrt()])
}

/// Recomputes the 24 snub7 points from the Newton solution.
pub fn solve_snub7() -> Result<SphericalDesign> {
    SphericalDesign::new("snub7", 7, orbit(solve_snub7_generator()?))
}

/// Exact average of `x^a y^b z^c` over the unit sphere.
pub fn sphere_monomial_average(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    fn double_factorial(n: i64) -> f64 {
        let mut acc = 1.0;
        let mut k = n;
        while k > 1 {
            acc *= k as f64;
            k -= 2;
        }
        acc
    }
    let (a, b, c) = (a as i64, b as i64, c as i64);
    double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1)
        / double_factorial(a + b + c + 1)
}

/// Largest deviation between point averages and sphere averages over all
/// monomials of degree ≤ t.
pub fn verify_spherical(points: &[BlochVector], t: usize) -> f64 {
    let t = t as u32;
    let inv = 1.0 / points.len() as f64;
    let mut worst: f64 = 0.0;
    for a in 0..=t {
        for b in 0..=(t - a) {
            for c in 0..=(t - a - b) {
                let avg: f64 = points
                    .iter()
                    .map(|p| p.x.powi(a as i32) * p.y.powi(b as i32) * p.z.powi(c as i32))
                    .sum::<f64>()
                    * inv;
                worst = worst.max((avg - sphere_monomial_average(a, b, c)).abs());
            }
        }
    }
    worst
}

/// Catalan number `C_t`, the Haar average of `|tr U|^{2t}` over U(2).
pub fn catalan(t: usize) -> f64 {
    let mut c = 1.0;
    for k in 0..t {
        c = c * 2.0 * (2 * k + 1) as f64 / (k + 2) as f64;
    }
    c
}

/// Frame potential `(1/K²) Σ_{j,k} |tr(U_j† U_k)|^{2t}`.
pub fn verify_unitary(unitaries: &[ComplexSquareMatrix], t: usize) -> f64 {
    let k = unitaries.len() as f64;
    let adj: Vec<ComplexSquareMatrix> = unitaries.iter().map(|u| u.adjoint()).collect();
    let mut total = 0.0;
    for a in &adj {
        for b in unitaries {
            total += overlap(a, b).norm_sqr().powi(t as i32);
        }
    }
    total / (k * k)
}

/// `tr(A B)` for 2×2 matrices without forming the product.
fn overlap(a: &ComplexSquareMatrix, b: &ComplexSquareMatrix) -> Complex64 {
    a.entry(0, 0) * b.entry(0, 0)
        + a.entry(0, 1) * b.entry(1, 0)
        + a.entry(1, 0) * b.entry(0, 1)
        + a.entry(1, 1) * b.entry(1, 1)
}

/// Removes matrices equal to an earlier one up to a global phase.
pub fn dedup_phase(mats: &[ComplexSquareMatrix]) -> Vec<ComplexSquareMatrix> {
    let mut kept: Vec<ComplexSquareMatrix> = Vec::new();
    for m in mats {
        let dup = kept.iter().any(|k| {
            let dim = m.dim() as f64;
            (overlap(&k.adjoint(), m).norm() - dim).abs() < PHASE_DEDUP_TOL
        });
        if !dup {
            kept.push(m.clone());
        }
    }
    kept
}

/// Closes a matrix group under multiplication by the generators. Fails if the
/// closure grows beyond `expected_order` or stops short of it.
pub fn group_closure(
    generators: &[ComplexSquareMatrix],
    expected_order: usize,
) -> Result<Vec<ComplexSquareMatrix>> {
    let dim = generators.first().map(|g| g.dim()).unwrap_or(2);
    let mut elements = vec![ComplexSquareMatrix::identity(dim)];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let prod = a.mul(g);
                if !elements.iter().any(|e| e.max_abs_diff(&prod) < 1e-9) {
                    elements.push(prod.clone());
                    next.push(prod);
                    if elements.len() > expected_order {
                        return Err(Error::ClosureFailed {
                            expected: expected_order,
                            reached: elements.len(),
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    if elements.len() != expected_order {
        return Err(Error::ClosureFailed {
            expected: expected_order,
            reached: elements.len(),
        });
    }
    Ok(elements)
}

/// Closure up to phase: multiplies by the generators and keeps one
/// representative per phase class.
fn projective_closure(generators: &[ComplexSquareMatrix], cap: usize) -> Result<Vec<ComplexSquareMatrix>> {
    let mut elements = vec![ComplexSquareMatrix::identity(2)];
    let mut frontier = elements.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in generators {
                let prod = a.mul(g);
                let known = elements
                    .iter()
                    .any(|e| (overlap(&e.adjoint(), &prod).norm() - 2.0).abs() < PHASE_DEDUP_TOL);
                if !known {
                    elements.push(prod.clone());
                    next.push(prod);
                    if elements.len() > cap {
                        return Err(Error::ClosureFailed {
                            expected: cap,
                            reached: elements.len(),
                        });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(elements)
}

/// Hadamard gate.
pub fn hadamard() -> ComplexSquareMatrix {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    ComplexSquareMatrix::from_row_major(2, &[s, s, s, -s]).expect("2x2")
}

/// Phase gate `S = exp(iπσ_z/4)`.
pub fn phase_gate() -> ComplexSquareMatrix {
    let z = Complex64::new(0.0, 0.0);
    ComplexSquareMatrix::from_row_major(
        2,
        &[Complex64::from_polar(1.0, PI / 4.0), z, z, Complex64::from_polar(1.0, -PI / 4.0)],
    )
    .expect("2x2")
}

/// Single-qubit Clifford group modulo phases (24 elements), a unitary 3-design.
pub fn clifford_1q() -> UnitaryDesign {
    let elems = projective_closure(&[hadamard(), phase_gate()], 24).expect("Clifford group has 24 classes");
    UnitaryDesign::new("clifford", 3, elems).expect("Clifford group is a unitary 3-design")
}

fn omega_poly(exponents: &[(f64, u32)]) -> Complex64 {
    exponents
        .iter()
        .map(|&(coef, k)| coef * Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 15.0))
        .sum()
}

/// Generators of SL(2,F5) in a two-dimensional complex representation,
/// written with `ω = e^{2πi/15}`.
pub fn sl2f5_generators() -> Vec<ComplexSquareMatrix> {
    let z = Complex64::new(0.0, 0.0);
    let mat = |e: [Complex64; 4]| ComplexSquareMatrix::from_row_major(2, &e).expect("2x2");
    vec![
        mat([Complex64::new(-1.0, 0.0), z, z, Complex64::new(-1.0, 0.0)]),
        mat([
            omega_poly(&[(-1.0, 11), (-1.0, 14)]),
            omega_poly(&[(1.0, 6), (1.0, 9)]),
            omega_poly(&[(-1.0, 1), (-1.0, 2), (-1.0, 4), (-1.0, 7), (-1.0, 8), (-1.0, 13)]),
            omega_poly(&[(1.0, 11), (1.0, 14)]),
        ]),
        mat([
            omega_poly(&[(1.0, 10)]),
            omega_poly(&[(1.0, 11), (1.0, 14)]),
            omega_poly(&[(-1.0, 2), (-1.0, 8)]),
            omega_poly(&[(-1.0, 10)]),
        ]),
        // Bottom-right entry −ω³ − ω¹² = −2cos(2π/5) keeps the character real.
        mat([
            z,
            omega_poly(&[(1.0, 5)]),
            omega_poly(&[(-1.0, 10)]),
            omega_poly(&[(-1.0, 3), (-1.0, 12)]),
        ]),
    ]
}

/// The 120 elements of SL(2,F5) generated from [`sl2f5_generators`].
pub fn sl2f5_group() -> Result<Vec<ComplexSquareMatrix>> {
    group_closure(&sl2f5_generators(), 120)
}

/// Square root and inverse square root of a 2×2 positive definite matrix.
fn sqrt_positive_2x2(p: &ComplexSquareMatrix) -> Result<(ComplexSquareMatrix, ComplexSquareMatrix)> {
    let (a, b, d) = (p.entry(0, 0).re, p.entry(0, 1), p.entry(1, 1).re);
    let half_gap = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
    let mean = (a + d) / 2.0;
    let (hi, lo) = (mean + half_gap, mean - half_gap);
    if !(lo > 0.0) {
        return Err(Error::InvalidParameter("matrix is not positive definite".into()));
    }
    // √P = (P + √det 𝟙) / (√λ₊ + √λ₋) by Cayley–Hamilton.
    let sdet = (hi * lo).sqrt();
    let denom = hi.sqrt() + lo.sqrt();
    let root = p
        .add(&ComplexSquareMatrix::identity(2).scale(Complex64::new(sdet, 0.0)))
        .scale(Complex64::new(1.0 / denom, 0.0));
    let (r00, r01, r10, r11) = (root.entry(0, 0), root.entry(0, 1), root.entry(1, 0), root.entry(1, 1));
    let det = r00 * r11 - r01 * r10;
    let inv = ComplexSquareMatrix::from_row_major(2, &[r11 / det, -r01 / det, -r10 / det, r00 / det])?;
    Ok((root, inv))
}

/// Unitary 5-design with 60 elements: SL(2,F5) conjugated by `√P`,
/// `P = Σ_k S_k† S_k`, with global phases removed.
pub fn sl2f5_design() -> Result<UnitaryDesign> {
    let group = sl2f5_group()?;
    let mut p = ComplexSquareMatrix::from_row_major(2, &[Complex64::new(0.0, 0.0); 4])?;
    for s in &group {
        p = p.add(&s.adjoint().mul(s));
    }
    let (root, inv_root) = sqrt_positive_2x2(&p)?;
    let unitaries: Vec<ComplexSquareMatrix> = group.iter().map(|s| root.mul(s).mul(&inv_root)).collect();
    UnitaryDesign::new("sl2f5", 5, dedup_phase(&unitaries))
}

/// Distinct Bloch directions of `U σ_z U†` over the design elements.
pub fn spherical_from_unitary(ud: &UnitaryDesign) -> SphericalDesign {
    let z = pauli(Axis::Z);
    let mut points: Vec<BlochVector> = Vec::new();
    for u in ud.unitaries() {
        let op = u.mul(&z).mul(&u.adjoint());
        let b = BlochVector::of_operator(&op).expect("2x2 operator");
        // Renormalize to remove rounding from the conjugation.
        let b = BlochVector::normalized(b.x, b.y, b.z).expect("unit direction");
        if !points.iter().any(|q| q.distance(&b) < POINT_DEDUP_TOL) {
            points.push(b);
        }
    }
    let residual = verify_spherical(&points, ud.strength());
    debug_assert!(residual < SPHERICAL_RESIDUAL_TOL, "extraction lost strength: {residual}");
    SphericalDesign {
        name: format!("{}-bloch", ud.name()),
        strength: ud.strength(),
        points,
    }
}

/// On-disk representation of a design.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DesignFile {
    Spherical {
        name: String,
        t: usize,
        points: Vec<[f64; 3]>,
    },
    Unitary {
        name: String,
        t: usize,
        /// Row-major entries as `[re, im]` pairs.
        unitaries: Vec<[[f64; 2]; 4]>,
    },
}

impl From<&Design> for DesignFile {
    fn from(d: &Design) -> Self {
        match d {
            Design::Spherical(s) => DesignFile::Spherical {
                name: s.name.clone(),
                t: s.strength,
                points: s.points.iter().map(|p| p.components()).collect(),
            },
            Design::Unitary(u) => DesignFile::Unitary {
                name: u.name.clone(),
                t: u.strength,
                unitaries: u
                    .unitaries
                    .iter()
                    .map(|m| {
                        let e = m.to_row_major();
                        std::array::from_fn(|i| [e[i].re, e[i].im])
                    })
                    .collect(),
            },
        }
    }
}

impl TryFrom<DesignFile> for Design {
    type Error = Error;

    fn try_from(f: DesignFile) -> Result<Self> {
        match f {
            DesignFile::Spherical { name, t, points } => {
                let pts = points.into_iter().map(|[x, y, z]| BlochVector::new(x, y, z)).collect();
                Ok(Design::Spherical(SphericalDesign::new(name, t, pts)?))
            }
            DesignFile::Unitary { name, t, unitaries } => {
                let mats = unitaries
                    .into_iter()
                    .map(|e| {
                        let entries: Vec<Complex64> = e.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                        ComplexSquareMatrix::from_row_major(2, &entries)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Design::Unitary(UnitaryDesign::new(name, t, mats)?))
            }
        }
    }
}

/// Parses and re-certifies a design from JSON.
pub fn parse_design(json: &str) -> Result<Design> {
    let file: DesignFile = serde_json::from_str(json)?;
    Design::try_from(file)
}

pub fn load_design(path: impl AsRef<Path>) -> Result<Design> {
    parse_design(&std::fs::read_to_string(path)?)
}

pub fn save_design(design: &Design, path: impl AsRef<Path>) -> Result<()> {
    let json = serde_json::to_string_pretty(&DesignFile::from(design))?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

/// Resolves a builtin name, `clifford`, `sl2f5`, or a path to a design file.
pub fn resolve_design(spec: &str) -> Result<Design> {
    match spec {
        "clifford" => Ok(Design::Unitary(clifford_1q())),
        "sl2f5" => Ok(Design::Unitary(sl2f5_design()?)),
        "regular-snub-cube" => Ok(Design::Spherical(regular_snub_cube())),
        _ => match spec.parse::<BuiltinSpherical>() {
            Ok(b) => Ok(Design::Spherical(b.build()?)),
            Err(_) if Path::new(spec).exists() => load_design(spec),
            Err(e) => Err(e),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_cardinalities_and_strengths() {
        for (b, len, t) in [
            (BuiltinSpherical::Octahedron, 6, 3),
            (BuiltinSpherical::Icosahedron, 12, 5),
            (BuiltinSpherical::Icosidodecahedron, 30, 5),
            (BuiltinSpherical::Snub7, 24, 7),
        ] {
            let d = b.build().unwrap();
            assert_eq!(d.len(), len, "{b}");
            assert_eq!(d.strength(), t, "{b}");
            assert!(d.residual(t) < SPHERICAL_RESIDUAL_TOL, "{b}");
        }
        assert!(matches!(builtin_spherical("dodecahedron"), Err(Error::UnknownDesign(_))));
    }

    #[test]
    fn octahedron_points() {
        let d = octahedron();
        for axis in [BlochVector::E_X, BlochVector::E_Y, BlochVector::E_Z] {
            assert!(d.points().contains(&axis));
            assert!(d.points().contains(&axis.neg()));
        }
        assert!(d.residual(3) < 1e-12);
        // ⟨x⁴⟩ over ±e_i is 1/3 versus 1/5 on the sphere.
        assert!((d.residual(4) - 2.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn regular_snub_cube_is_only_a_3_design() {
        let d = regular_snub_cube();
        assert_eq!(d.len(), 24);
        assert!(d.residual(3) < 1e-12);
        assert!(d.residual(5) > 1e-3);
    }

    #[test]
    fn icosidodecahedron_fails_at_six() {
        let d = icosidodecahedron().unwrap();
        assert!(d.residual(5) < 1e-9);
        assert!(d.residual(6) > 1e-3);
    }

    #[test]
    fn antipodality() {
        for d in [octahedron(), icosahedron(), icosidodecahedron().unwrap()] {
            assert_eq!(d.antipodal_representatives().unwrap().len(), d.len() / 2, "{}", d.name());
        }
        assert!(!snub7().unwrap().is_antipodal());
    }

    #[test]
    fn clifford_group() {
        let c = clifford_1q();
        assert_eq!(c.len(), 24);
        let id = ComplexSquareMatrix::identity(2);
        assert!(c.unitaries().iter().any(|u| u.max_abs_diff(&id) < 1e-12));
        assert!((c.frame_potential(3) - 5.0).abs() < 1e-9);
        assert!(c.frame_potential(4) > 14.0 + 0.5);
        // closed under multiplication up to phase
        for a in c.unitaries() {
            for b in c.unitaries() {
                let p = a.mul(b);
                assert!(c
                    .unitaries()
                    .iter()
                    .any(|e| (overlap(&e.adjoint(), &p).norm() - 2.0).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn sl2f5_orders() {
        assert_eq!(sl2f5_group().unwrap().len(), 120);
        let d = sl2f5_design().unwrap();
        assert_eq!(d.len(), 60);
        assert!((d.frame_potential(5) - 42.0).abs() < 1e-9);
        assert!(d.frame_potential(6) > catalan(6) + 0.5);
    }

    #[test]
    fn sl2f5_as_printed_does_not_close() {
        // The same generators with ω¹⁷ in the last entry generate an infinite group.
        let mut gens = sl2f5_generators();
        let z = Complex64::new(0.0, 0.0);
        gens[3] = ComplexSquareMatrix::from_row_major(
            2,
            &[z, omega_poly(&[(1.0, 5)]), omega_poly(&[(-1.0, 10)]), omega_poly(&[(-1.0, 3), (-1.0, 17)])],
        )
        .unwrap();
        assert!(matches!(group_closure(&gens, 120), Err(Error::ClosureFailed { .. })));
    }

    #[test]
    fn extraction_from_unitary_designs() {
        let oct = spherical_from_unitary(&clifford_1q());
        assert_eq!(oct.len(), 6);
        for p in octahedron().points() {
            assert!(oct.points().iter().any(|q| q.distance(p) < 1e-12));
        }
        let ico = spherical_from_unitary(&sl2f5_design().unwrap());
        assert_eq!(ico.len(), 30);

        let id = UnitaryDesign::new("identity", 0, vec![ComplexSquareMatrix::identity(2)]).unwrap();
        let single = spherical_from_unitary(&id);
        assert_eq!(single.points(), &[BlochVector::E_Z]);
    }

    #[test]
    fn catalan_numbers() {
        let got: Vec<f64> = (1..=5).map(catalan).collect();
        assert_eq!(got, vec![1.0, 2.0, 5.0, 14.0, 42.0]);
    }

    #[test]
    fn monomial_averages() {
        assert_eq!(sphere_monomial_average(0, 0, 0), 1.0);
        assert!((sphere_monomial_average(2, 0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((sphere_monomial_average(4, 0, 0) - 1.0 / 5.0).abs() < 1e-15);
        assert!((sphere_monomial_average(2, 2, 0) - 1.0 / 15.0).abs() < 1e-15);
        assert!((sphere_monomial_average(2, 2, 2) - 1.0 / 105.0).abs() < 1e-15);
        assert_eq!(sphere_monomial_average(3, 1, 0), 0.0);
    }

    #[test]
    fn frozen_snub7_matches_solver() {
        let frozen = snub7().unwrap();
        let solved = solve_snub7().unwrap();
        for (a, b) in frozen.points().iter().zip(solved.points()) {
            assert!(a.distance(b) < 1e-12);
        }
        assert!(frozen.residual(8) > 1e-3);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let json = icosahedron().to_json().unwrap();
        let back = parse_design(&json).unwrap();
        assert_eq!(back.to_spherical().len(), 12);

        let bad = r#"{"kind":"spherical","name":"oct","t":4,"points":[[1,0,0],[0,1,0],[0,0,1],[-1,0,0],[0,-1,0],[0,0,-1]]}"#;
        assert!(matches!(parse_design(bad), Err(Error::Certification { .. })));

        let uj = clifford_1q().to_json().unwrap();
        match parse_design(&uj).unwrap() {
            Design::Unitary(u) => assert_eq!(u.len(), 24),
            _ => panic!("expected unitary design"),
        }
    }

    #[test]
    fn resolve_names() {
        assert_eq!(resolve_design("octahedron").unwrap().strength(), 3);
        assert_eq!(resolve_design("clifford").unwrap().to_spherical().len(), 6);
        assert!(resolve_design("no-such-design").is_err());
    }
}
