//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qdesign_moments::criteria::{ghz_noise_thresholds, simplex_max_r2, w_class_linear, w_class_r2_bound};
use qdesign_moments::designs::{
    builtin_spherical, clifford_1q, dedup_phase, regular_snub_cube, sl2f5_design, sl2f5_group,
    spherical_from_unitary,
};
use qdesign_moments::figures::{histogram, inside_envelope, landmarks, scan, ScanSource, TwoQubitState};
use qdesign_moments::moments::{bell_diagonal_moments, design_r2_r4, monte_carlo_moments, w_state_moments};
use qdesign_moments::sampling::{random_density_hs, sample_mixed_class, SeededRng, StateClass};
use qdesign_moments::states;

/// Base seed for every stochastic criterion, fixed before the first run.
const BASE_SEED: u64 = 0xC0FFEE;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.detail = format!("{} [{:.2?}]", out.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {:?}", out.detail, limit);
        }
    }
    out
}

fn design_certification() -> Outcome {
    let mut failures = Vec::new();
    for (name, t) in [("octahedron", 3), ("icosahedron", 5), ("icosidodecahedron", 5), ("snub7", 7)] {
        let d = builtin_spherical(name).unwrap();
        let r = d.residual(t);
        if r >= 1e-9 {
            failures.push(format!("{name} residual {r:e} at t={t}"));
        }
    }
    let snub = regular_snub_cube().residual(5);
    if snub < 1e-9 {
        failures.push(format!("regular snub cube passes t=5 ({snub:e})"));
    }
    let ico6 = builtin_spherical("icosidodecahedron").unwrap().residual(6);
    if ico6 < 1e-9 {
        failures.push(format!("icosidodecahedron passes t=6 ({ico6:e})"));
    }
    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("builtins certified; snub-cube residual(5)={snub:.3e}, icosidodecahedron residual(6)={ico6:.3e}")
        } else {
            failures.join("; ")
        },
    )
}

fn unitary_designs() -> Outcome {
    let cl = clifford_1q();
    let fp3 = cl.frame_potential(3);
    let fp4 = cl.frame_potential(4);
    let group = sl2f5_group().unwrap();
    let sl = sl2f5_design().unwrap();
    let fp5 = sl.frame_potential(5);
    let bloch = spherical_from_unitary(&sl).len();
    let classes = dedup_phase(sl.unitaries()).len();
    let pass = cl.len() == 24
        && (fp3 - 5.0).abs() <= 1e-9
        && fp4 > 14.0
        && group.len() == 120
        && sl.len() == 60
        && classes == 60
        && (fp5 - 42.0).abs() <= 1e-9
        && bloch == 30;
    check(
        pass,
        format!(
            "Clifford {} classes FP3={fp3:.12} FP4={fp4:.6}; SL(2,F5) {} elements, {classes} classes, FP5={fp5:.12}, {bloch} Bloch points",
            cl.len(),
            group.len()
        ),
    )
}

fn moment_cross_validation() -> Outcome {
    let mut comparisons = 0;
    let mut misses = Vec::new();
    for n in 2..=4usize {
        for i in 0..100u64 {
            let mut rng = SeededRng::new(BASE_SEED, (n as u64) << 32 | i);
            let rho = random_density_hs(n, &mut rng).unwrap();
            let (r2, r4) = design_r2_r4(&rho).unwrap();
            let mc = monte_carlo_moments(&rho, &[2, 4], 100_000, BASE_SEED ^ ((n as u64) << 32 | i)).unwrap();
            for (exact, rec) in [(r2, &mc[0]), (r4, &mc[1])] {
                comparisons += 1;
                let se = rec.standard_error().unwrap();
                let z = (rec.value - exact) / se;
                if z.abs() > 3.0 {
                    misses.push(format!("N={n} state {i} R{}: z={z:.2}", rec.order));
                }
            }
        }
    }
    let mut worst_bell: f64 = 0.0;
    let mut rng = SeededRng::new(BASE_SEED, 99);
    let mut tested = 0;
    while tested < 100 {
        use rand::Rng;
        let c: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        if states::check_bell_diagonal(c).is_err() {
            continue;
        }
        tested += 1;
        let (a2, a4) = bell_diagonal_moments(c).unwrap();
        let (d2, d4) = design_r2_r4(&states::bell_diagonal(c[0], c[1], c[2]).unwrap()).unwrap();
        worst_bell = worst_bell.max((a2 - d2).abs()).max((a4 - d4).abs());
    }
    let pass = misses.is_empty() && worst_bell <= 1e-12;
    check(
        pass,
        format!(
            "{}/{comparisons} Monte Carlo comparisons outside 3σ{}; Bell-diagonal closed forms max deviation {worst_bell:.2e}",
            misses.len(),
            if misses.is_empty() { String::new() } else { format!(" ({})", misses.join(", ")) }
        ),
    )
}

fn closed_form_goldens() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=5 {
        let (r2, r4) = design_r2_r4(&states::w(n).unwrap()).unwrap();
        let (c2, c4) = w_state_moments(n).unwrap();
        let nf = n as f64;
        // Direct transcription, independent of the library helper.
        let g2 = (5.0 - 4.0 / nf) / 3f64.powi(n as i32);
        let g4 = (83.0 * nf.powi(3) + 216.0 * nf * nf - 176.0 * nf - 96.0) / (27.0 * nf.powi(3) * 5f64.powi(n as i32));
        worst = worst.max((r2 - g2).abs()).max((r4 - g4).abs()).max((c2 - g2).abs()).max((c4 - g4).abs());
    }
    let mut worst_ghz: f64 = 0.0;
    for n in 2..=6 {
        let (r2, _) = design_r2_r4(&states::ghz(n).unwrap()).unwrap();
        let golden = if n % 2 == 1 {
            2f64.powi(n as i32 - 1) / 3f64.powi(n as i32)
        } else {
            (2f64.powi(n as i32 - 1) + 1.0) / 3f64.powi(n as i32)
        };
        worst_ghz = worst_ghz.max((r2 - golden).abs());
    }
    let mut worst_embedded: f64 = 0.0;
    for n in 4..=6 {
        let psi = states::zeros_then(n - 3, &states::ghz(3).unwrap()).unwrap();
        let (r2, _) = design_r2_r4(&psi).unwrap();
        worst_embedded = worst_embedded.max((r2 - 4.0 / 3f64.powi(n as i32)).abs());
    }
    check(
        worst <= 1e-12 && worst_ghz <= 1e-12 && worst_embedded <= 1e-12,
        format!("W max dev {worst:.2e}; GHZ R2 max dev {worst_ghz:.2e}; |0..0>|GHZ3> max dev {worst_embedded:.2e}"),
    )
}

fn criterion_theorems() -> Outcome {
    let mut worst_r2 = f64::NEG_INFINITY;
    let mut worst_lin = f64::NEG_INFINITY;
    let mut sampled = 0;
    for n in 3..=6usize {
        for i in 0..10_000u64 {
            let mut rng = SeededRng::new(BASE_SEED + 5, (n as u64) << 32 | i);
            let rho = sample_mixed_class(&StateClass::WClass, n, None, &mut rng).unwrap();
            let (r2, r4) = design_r2_r4(&rho).unwrap();
            worst_r2 = worst_r2.max(w_class_r2_bound(r2, n).unwrap().margin);
            worst_lin = worst_lin.max(w_class_linear(r2, r4, n).unwrap().margin);
            sampled += 1;
        }
    }
    let mut worst_anchor: f64 = 0.0;
    let mut min_ghz = f64::INFINITY;
    for n in 3..=6 {
        let w = states::w(n).unwrap();
        let w_shift = states::zeros_then(1, &states::w(n - 1).unwrap()).unwrap();
        for psi in [w, w_shift] {
            let (r2, r4) = design_r2_r4(&psi).unwrap();
            worst_anchor = worst_anchor.max(w_class_linear(r2, r4, n).unwrap().margin.abs());
        }
        let g = states::zeros_then(n - 3, &states::ghz(3).unwrap()).unwrap();
        let (r2, r4) = design_r2_r4(&g).unwrap();
        min_ghz = min_ghz.min(w_class_linear(r2, r4, n).unwrap().margin);
    }
    check(
        worst_r2 <= 1e-9 && worst_lin <= 1e-9 && worst_anchor <= 1e-10 && min_ghz > 0.0,
        format!(
            "{sampled} mixed W-class states: max R2 margin {worst_r2:.3e}, max linear margin {worst_lin:.3e}; \
             |W_N>, |0>|W_N-1> |margin| ≤ {worst_anchor:.2e}; min |0..0>|GHZ3> margin {min_ghz:.4}"
        ),
    )
}

fn thresholds() -> Outcome {
    let t3 = ghz_noise_thresholds(3).unwrap();
    let t4 = ghz_noise_thresholds(4).unwrap();
    let crossover = (3..=20).find(|&n| {
        let t = ghz_noise_thresholds(n).unwrap();
        t.p_star > t.p_tilde_star
    });
    // 1/3 and the fractions below are compared to the last ulp or two.
    let pass = (t3.p_star - 0.042572).abs() <= 1e-6
        && (t4.p_star - 1.0 / 3.0).abs() <= 1e-15
        && (t3.p_tilde_star - 2.0 / 7.0).abs() <= 1e-15
        && (t4.p_tilde_star - 8.0 / 15.0).abs() <= 1e-15
        && crossover == Some(6);
    check(
        pass,
        format!(
            "p*(3)={:.7} p*(4)={:.17} p~*(3)={:.15} p~*(4)={:.15}; first N with p*>p~*: {:?}",
            t3.p_star, t4.p_star, t3.p_tilde_star, t4.p_tilde_star, crossover
        ),
    )
}

fn figure_one() -> Outcome {
    let samples = 100_000;
    let product = histogram(TwoQubitState::Product, samples, BASE_SEED).unwrap();
    let wm = histogram(TwoQubitState::WMarginal, samples, BASE_SEED + 1).unwrap();
    let werner = histogram(TwoQubitState::Werner(1.0 / 3f64.sqrt()), samples, BASE_SEED + 2).unwrap();
    let r2_ok = [&product, &wm, &werner].iter().all(|h| h.r2.covers(1.0 / 9.0, 3.0));
    let separated = |a: &qdesign_moments::figures::Histogram, b: &qdesign_moments::figures::Histogram| {
        let se = (a.r4.standard_error.powi(2) + b.r4.standard_error.powi(2)).sqrt();
        (a.r4.mean - b.r4.mean).abs() / se
    };
    let z_wm = separated(&product, &wm);
    let z_werner = separated(&product, &werner);
    check(
        r2_ok && z_wm > 3.0 && z_werner > 3.0,
        format!(
            "R2: product {:.5}±{:.5}, W-marginal {:.5}±{:.5}, Werner {:.5}±{:.5}; R4 separation from product: W-marginal {z_wm:.1}σ, Werner {z_werner:.1}σ",
            product.r2.mean, product.r2.standard_error, wm.r2.mean, wm.r2.standard_error, werner.r2.mean, werner.r2.standard_error
        ),
    )
}

fn simplex_optimum() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 3..=7 {
        for k in 0..n {
            let (_, v) = simplex_max_r2(n, k).unwrap();
            let golden = (5.0 - 4.0 / (n - k) as f64) / 3f64.powi(n as i32);
            worst = worst.max((v - golden).abs());
        }
    }
    check(worst <= 1e-10, format!("max deviation from closed form over N=3..7, all k: {worst:.2e}"))
}

fn figure_scans() -> Outcome {
    let mut outside = 0;
    let mut total = 0;
    let sources = [
        ScanSource::Pure(StateClass::Separable),
        ScanSource::Pure(StateClass::WClass),
        ScanSource::Pure(StateClass::BisepAny),
        ScanSource::Pure(StateClass::Generic),
        ScanSource::Mixed {
            class: StateClass::WClass,
            terms: None,
        },
        ScanSource::AllStates,
    ];
    for n in [3usize, 4] {
        for src in &sources {
            for row in scan(src, n, 2000, BASE_SEED + n as u64).unwrap() {
                total += 1;
                if !inside_envelope(row.r2, row.r4, n, 1e-12).unwrap() {
                    outside += 1;
                }
            }
        }
    }
    // Golden values written out from closed forms.
    let ghz3_r4 = 3.0 / 8.0 * (8.0f64 / 15.0).powi(3);
    let ghz4_r4 = 3.0 / 8.0 * (8.0f64 / 15.0).powi(4) + 3.0 * (2.0f64 / 15.0).powi(4) + 0.2f64.powi(4);
    let w3 = (11.0 / 81.0, 3561.0 / 91125.0);
    let w4 = w_state_moments(4).unwrap();
    let golden3 = [
        (0.0, 0.0),
        (1.0 / 27.0, 1.0 / 125.0),
        (1.0 / 9.0, 1.0 / 25.0),
        (2.0 / 27.0, 8.0 / 375.0),
        w3,
        (4.0 / 27.0, ghz3_r4),
    ];
    let golden4 = [
        (0.0, 0.0),
        (1.0 / 81.0, 1.0 / 625.0),
        (1.0 / 27.0, 1.0 / 125.0),
        (w3.0 / 3.0, w3.1 / 5.0),
        (4.0 / 81.0, ghz3_r4 / 5.0),
        (1.0 / 9.0, 1.0 / 25.0),
        w4,
        (1.0 / 9.0, ghz4_r4),
    ];
    let mut worst: f64 = 0.0;
    for (n, golden) in [(3, &golden3[..]), (4, &golden4[..])] {
        for (lm, g) in landmarks(n).unwrap().iter().zip(golden) {
            worst = worst.max((lm.r2 - g.0).abs()).max((lm.r4 - g.1).abs());
        }
    }
    check(
        outside == 0 && worst <= 1e-10,
        format!("{outside}/{total} scan points outside the envelope; landmark max deviation {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 9] = [
        ("design certification", Some(Duration::from_secs(1)), design_certification),
        ("unitary designs", Some(Duration::from_secs(5)), unitary_designs),
        ("moment cross-validation", None, moment_cross_validation),
        ("closed-form golden values", None, closed_form_goldens),
        ("criterion theorems", Some(Duration::from_secs(300)), criterion_theorems),
        ("noise thresholds", None, thresholds),
        ("two-qubit histogram moments", None, figure_one),
        ("simplex optimization", None, simplex_optimum),
        ("figure scans", None, figure_scans),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let out = timed(*limit, f);
        if !out.pass {
            failed += 1;
        }
        println!("acceptance {}: {} — {name}: {}", i + 1, if out.pass { "PASS" } else { "FAIL" }, out.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
