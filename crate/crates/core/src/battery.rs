//! The self-test battery: oracle equivalence, closed-form identities and
//! structure-reproduction checks, shared between `cargo test` acceptance
//! and the CLI `selftest` command. Every tolerance is pinned here.

use std::time::Instant;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{alpha_curve_intersections, b_ep_of_c_branch, c_branch_profile, c_of_e, critical_energies};
use crate::domain::{c_slice, classify_transition4, lambda_scan4, membership, TransitionKind, Verdict};
use crate::model::{hamiltonian6, is_pt_symmetric, product_representative, CartesianCouplings, ProductCouplings};
use crate::oracle::{charpoly, eig_dense};
use crate::secular::{coefficients, spectrum, Classification};

pub const COEFF_REL_TOL: f64 = 1e-12;
pub const ODD_COEFF_TOL: f64 = 1e-13;
pub const SPECTRUM_ORACLE_TOL: f64 = 1e-8;
pub const FIG_POINT_TOL: f64 = 1e-9;
pub const ENDPOINT_TOL: f64 = 1e-6;
pub const ROUND_TRIP_REL_TOL: f64 = 1e-12;
pub const QUADRUPLE_RESIDUAL_TOL: f64 = 1e-9;
pub const CRITICAL_REL_TOL: f64 = 1e-10;
pub const SCALING_REL_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-9;
pub const REFLECTION_TOL: f64 = 1e-10;

/// The coupling-product box the randomized checks sample from.
pub const SAMPLE_BOX: (f64, f64) = (-2.0, 3.0);

/// Outcome of one battery check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

impl CheckReport {
    fn finish(name: &'static str, started: Instant, passed: bool, detail: String) -> Self {
        CheckReport { name, passed, detail, millis: started.elapsed().as_millis() }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

fn sample_products(rng: &mut ChaCha8Rng) -> ProductCouplings {
    let u = Uniform::new(SAMPLE_BOX.0, SAMPLE_BOX.1);
    ProductCouplings::new(u.sample(rng), u.sample(rng), u.sample(rng))
}

/// Secular coefficients against the trace-recursion characteristic
/// polynomial of the product representative, plus the vanishing of the odd
/// coefficients.
pub fn check_secular_identity(samples: usize, seed: u64) -> CheckReport {
    secular_identity_with_perturbation(samples, seed, 0.0)
}

fn secular_identity_with_perturbation(samples: usize, seed: u64, perturb: f64) -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_rel = 0.0f64;
    let mut worst_odd = 0.0f64;
    for _ in 0..samples {
        let p = sample_products(&mut rng);
        let k = coefficients(&p);
        let m = product_representative(&p, 6).unwrap();
        let poly = charpoly(&m).unwrap();
        worst_rel = worst_rel
            .max(rel_err(k.c4 + perturb, poly[2]))
            .max(rel_err(k.c2, poly[4]))
            .max(rel_err(k.c0, poly[6]));
        for odd in [1, 3, 5] {
            worst_odd = worst_odd.max(poly[odd].abs());
        }
    }
    let passed = worst_rel <= COEFF_REL_TOL && worst_odd <= ODD_COEFF_TOL;
    CheckReport::finish(
        "secular-coefficient identity",
        started,
        passed,
        format!("{samples} samples, worst rel {worst_rel:.2e} (tol {COEFF_REL_TOL:.0e}), worst odd {worst_odd:.2e} (tol {ODD_COEFF_TOL:.0e})"),
    )
}

/// Sorted closed-form spectra against the Aberth oracle, elementwise,
/// complexified regions included.
pub fn check_spectrum_oracle_agreement(samples: usize, seed: u64) -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    let mut failures = 0usize;
    for _ in 0..samples {
        let p = sample_products(&mut rng);
        let r = spectrum(&p, crate::secular::DEFAULT_TOL);
        let m = product_representative(&p, 6).unwrap();
        match eig_dense(&m, 1e-12) {
            Ok(eig) => {
                for (a, b) in r.energies.iter().zip(&eig.eigenvalues) {
                    worst = worst.max((a - b).norm());
                }
            }
            Err(_) => failures += 1,
        }
    }
    let passed = worst <= SPECTRUM_ORACLE_TOL && failures == 0;
    CheckReport::finish(
        "spectrum cross-validation",
        started,
        passed,
        format!("{samples} samples, worst elementwise {worst:.2e} (tol {SPECTRUM_ORACLE_TOL:.0e}), {failures} oracle failures"),
    )
}

/// The sample point `(A, B, C) = (0.09, 0.1, 1)`: six real simple energies,
/// reproduced independently by intersecting the partial-fraction curve with
/// the lines `alpha = +-0.3`.
pub fn check_fig_point_reproduction() -> CheckReport {
    let started = Instant::now();
    let p = ProductCouplings::new(0.09, 0.1, 1.0);
    let r = spectrum(&p, crate::secular::DEFAULT_TOL);
    let mut ok = r.classification == Classification::AllReal && r.n_real == 6;
    let mut detail = String::new();

    let mut intersections = Vec::new();
    for alpha0 in [0.3, -0.3] {
        match alpha_curve_intersections(0.1, 1.0, alpha0) {
            Ok(mut roots) => intersections.append(&mut roots),
            Err(e) => {
                ok = false;
                detail = format!("intersection failure: {e}");
            }
        }
    }
    let mut worst = 0.0f64;
    if ok {
        intersections.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in intersections.iter().zip(&r.energies) {
            worst = worst.max((got - want.re).abs());
        }
        ok = intersections.len() == 6 && worst <= FIG_POINT_TOL;
        detail = format!("six real simple: {}, curve-line agreement {worst:.2e} (tol {FIG_POINT_TOL:.0e})",
            r.classification == Classification::AllReal);
    }
    CheckReport::finish("sample-point reproduction", started, ok, detail)
}

/// Four-site ground truth: a lambda scan recovers the punctured interval
/// `(-A/4, 0) u (0, inf)` and the two crossings classify as second and
/// first kind.
pub fn check_four_site_ground_truth() -> CheckReport {
    let started = Instant::now();
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let lo = -a / 4.0 - 0.1;
        let hi = 0.5;
        match lambda_scan4(a, lo, hi, 1e-4, crate::secular::DEFAULT_TOL) {
            Ok(scan) => {
                if scan.intervals.len() != 2 {
                    ok = false;
                    notes.push(format!("a={a}: {} intervals", scan.intervals.len()));
                    continue;
                }
                let errs = [
                    (scan.intervals[0].0 - (-a / 4.0)).abs(),
                    scan.intervals[0].1.abs(),
                    scan.intervals[1].0.abs(),
                ];
                for e in errs {
                    worst = worst.max(e);
                }
            }
            Err(e) => {
                ok = false;
                notes.push(format!("a={a}: scan failed: {e}"));
            }
        }
        match classify_transition4(0.0, a, 1e-4, crate::secular::DEFAULT_TOL) {
            Ok(r) if r.kind == TransitionKind::SecondKind => {}
            other => {
                ok = false;
                notes.push(format!("a={a}: lambda=0 gave {other:?}"));
            }
        }
        match classify_transition4(-a / 4.0, a, 1e-4, crate::secular::DEFAULT_TOL) {
            Ok(r) if r.kind == TransitionKind::FirstKind => {}
            other => {
                ok = false;
                notes.push(format!("a={a}: lambda=-A/4 gave {other:?}"));
            }
        }
    }
    ok = ok && worst <= ENDPOINT_TOL;
    let detail = if notes.is_empty() {
        format!("worst endpoint error {worst:.2e} (tol {ENDPOINT_TOL:.0e})")
    } else {
        notes.join("; ")
    };
    CheckReport::finish("four-site ground truth", started, ok, detail)
}

/// Gap intervals at sampled `(A, B)` with small negative `B`: two disjoint
/// physical intervals, physical/unphysical/physical midpoints, positive
/// gap width.
pub fn check_gap_phenomenon() -> CheckReport {
    let started = Instant::now();
    let tol = crate::secular::DEFAULT_TOL;
    let mut ok = true;
    let mut notes = Vec::new();
    let points: [(f64, f64); 4] = [(0.09, -0.01), (1.0, -0.1), (0.25, -0.05), (2.25, -0.2)];
    for (a, b) in points {
        // all sampled rows sit inside (b_ep, 0)
        let b_ep = b_ep_of_c_branch(a.sqrt()).unwrap();
        if !(b > b_ep && b < 0.0) {
            ok = false;
            notes.push(format!("({a},{b}): outside (b_ep, 0), b_ep={b_ep}"));
            continue;
        }
        match c_slice(a, b, tol) {
            Ok(s) => {
                let gap_ok = s.gap.map(|(lo, hi)| hi > lo).unwrap_or(false);
                if s.intervals.len() != 2 || !gap_ok {
                    ok = false;
                    notes.push(format!("({a},{b}): {} intervals, gap {:?}", s.intervals.len(), s.gap));
                    continue;
                }
                let (g_lo, g_hi) = s.gap.unwrap();
                let mids = [
                    (0.5 * (s.intervals[0].0 + s.intervals[0].1), Verdict::Physical),
                    (0.5 * (g_lo + g_hi), Verdict::Unphysical),
                    (s.intervals[1].0 + 1.0, Verdict::Physical),
                ];
                for (c, want) in mids {
                    let got = membership(&ProductCouplings::new(a, b, c), tol).verdict;
                    if got != want {
                        ok = false;
                        notes.push(format!("({a},{b}) at C={c}: {got:?} != {want:?}"));
                    }
                }
            }
            Err(e) => {
                ok = false;
                notes.push(format!("({a},{b}): {e}"));
            }
        }
    }
    let detail = if notes.is_empty() {
        format!("{} sampled rows show two intervals with a positive gap", points.len())
    } else {
        notes.join("; ")
    };
    CheckReport::finish("gap phenomenon", started, ok, detail)
}

/// Round trips between the three implicit curves, and the residual of every
/// constructed `(E, A, B, C)` quadruple in the secular polynomial.
pub fn check_round_trips(samples: usize, seed: u64) -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ue = Uniform::new(-3.0f64, 3.0);
    let ub = Uniform::new(-2.0f64, 3.0);
    let ua = Uniform::new(-2.0f64, 2.0);
    let mut worst_rel = 0.0f64;
    let mut worst_res = 0.0f64;
    let mut accepted = 0usize;
    while accepted < samples {
        let e = ue.sample(&mut rng);
        let b = ub.sample(&mut rng);
        let alpha = ua.sample(&mut rng);
        if (e - alpha).abs() < 1e-2 || e.abs() < 1e-2 {
            continue;
        }
        let c = c_of_e(e, b, alpha).unwrap();
        if (e * e - c).abs() < 1e-2 {
            continue;
        }
        accepted += 1;
        let alpha_back = crate::boundary::alpha_of_e(e, b, c).unwrap();
        let b_back = crate::boundary::b_of_e(e, c, alpha).unwrap();
        worst_rel = worst_rel
            .max((alpha_back - alpha).abs() / alpha.abs().max(1.0))
            .max((b_back - b).abs() / b.abs().max(1.0));
        let k = coefficients(&ProductCouplings::new(alpha * alpha, b, c));
        worst_res = worst_res.max(k.eval(e).abs() / k.residual_scale(e.abs()));
    }
    let passed = worst_rel <= ROUND_TRIP_REL_TOL && worst_res <= QUADRUPLE_RESIDUAL_TOL;
    CheckReport::finish(
        "round-trip identities",
        started,
        passed,
        format!("{samples} quadruples, worst rel {worst_rel:.2e} (tol {ROUND_TRIP_REL_TOL:.0e}), worst residual {worst_res:.2e} (tol {QUADRUPLE_RESIDUAL_TOL:.0e})"),
    )
}

/// Critical energies satisfy the implicit form, and the coalescence
/// threshold obeys its quadratic scaling law.
pub fn check_critical_points(seed: u64) -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ua = Uniform::new(0.05f64, 2.0);
    let ub = Uniform::new(-2.0f64, 3.0);
    let mut worst_rel = 0.0f64;
    for _ in 0..500 {
        let alpha = ua.sample(&mut rng) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let b = ub.sample(&mut rng);
        if b == 0.0 {
            continue;
        }
        for e in critical_energies(alpha, b).unwrap() {
            let lhs = alpha * b;
            let rhs = -2.0 * e * (e - alpha) * (e - alpha);
            worst_rel = worst_rel.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-30));
        }
    }
    let b1 = b_ep_of_c_branch(1.0).unwrap();
    let mut worst_scaling = 0.0f64;
    for alpha in [0.3, 0.5, 1.0, 2.0] {
        let b = b_ep_of_c_branch(alpha).unwrap();
        worst_scaling = worst_scaling.max((b - alpha * alpha * b1).abs() / (alpha * alpha * b1).abs());
    }
    let passed = worst_rel <= CRITICAL_REL_TOL && worst_scaling <= SCALING_REL_TOL;
    CheckReport::finish(
        "critical-point consistency",
        started,
        passed,
        format!("implicit-form worst rel {worst_rel:.2e} (tol {CRITICAL_REL_TOL:.0e}), scaling worst {worst_scaling:.2e} (tol {SCALING_REL_TOL:.0e})"),
    )
}

/// PT symmetry of random Hamiltonians, negation/conjugation closure of
/// random spectra, and the mirror symmetry of the branch profiles.
pub fn check_symmetries(samples: usize, seed: u64) -> CheckReport {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uc = Uniform::new(-3.0f64, 3.0);
    let mut ok = true;
    let mut notes = Vec::new();

    for _ in 0..samples {
        let xyz = CartesianCouplings::new(uc.sample(&mut rng), uc.sample(&mut rng), uc.sample(&mut rng));
        if !is_pt_symmetric(&hamiltonian6(&xyz)) {
            ok = false;
            notes.push(format!("PT symmetry failed at {xyz:?}"));
        }
        let r = spectrum(&xyz.to_products(), crate::secular::DEFAULT_TOL);
        for z in &r.energies {
            let scale = 1.0 + z.norm();
            if !r.energies.iter().any(|w| (w + z).norm() <= SYMMETRY_TOL * scale)
                || !r.energies.iter().any(|w| (w - z.conj()).norm() <= SYMMETRY_TOL * scale)
            {
                ok = false;
                notes.push(format!("spectrum symmetry failed at {xyz:?}"));
                break;
            }
        }
    }

    let ua = Uniform::new(0.1f64, 2.0);
    let ub = Uniform::new(-0.3f64, 3.0);
    let mut worst_reflection = 0.0f64;
    for _ in 0..200 {
        let alpha = ua.sample(&mut rng);
        let b = ub.sample(&mut rng);
        if b.abs() < 1e-3 {
            continue;
        }
        if let Ok(p) = c_branch_profile(alpha, b) {
            for e in &p.critical_energies {
                // the mirrored branch attains the same C-level at -E
                let lhs = c_of_e(*e, b, alpha).unwrap();
                let rhs = c_of_e(-*e, b, -alpha).unwrap();
                worst_reflection = worst_reflection.max((lhs - rhs).abs() / lhs.abs().max(1.0));
            }
            for z in &p.zeros {
                if (-z - alpha).abs() > 1e-6 {
                    let v = c_of_e(-*z, b, -alpha).unwrap();
                    worst_reflection = worst_reflection.max(v.abs() / (1.0 + z.abs()));
                }
            }
        }
    }
    if worst_reflection > REFLECTION_TOL {
        ok = false;
        notes.push(format!("reflection symmetry worst {worst_reflection:.2e}"));
    }

    let detail = if notes.is_empty() {
        format!("{samples} Hamiltonians PT-symmetric, spectra closed under negation/conjugation, reflection worst {worst_reflection:.2e} (tol {REFLECTION_TOL:.0e})")
    } else {
        notes.join("; ")
    };
    CheckReport::finish("symmetry battery", started, ok, detail)
}

/// Runs the whole battery. `samples` scales the randomized checks; the
/// documented defaults correspond to `samples = 1000`.
pub fn run_battery(samples: usize, seed: u64) -> Vec<CheckReport> {
    vec![
        check_secular_identity(samples, seed),
        check_spectrum_oracle_agreement(samples, seed.wrapping_add(1)),
        check_fig_point_reproduction(),
        check_four_site_ground_truth(),
        check_gap_phenomenon(),
        check_round_trips((samples * 100).max(1000), seed.wrapping_add(2)),
        check_critical_points(seed.wrapping_add(3)),
        check_symmetries(samples.min(100).max(10), seed.wrapping_add(4)),
    ]
}
