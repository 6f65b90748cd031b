//! Cross-module consistency: the closed-form curve machinery against dense
//! membership scans, and the closed-form spectra against the eigensolver on
//! the actual lattice matrices (not just the product representatives).

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptlattice_core::boundary::{alpha_profile, b_threshold};
use ptlattice_core::domain::{c_slice, membership, trace_boundary, GridSpec, RangeSpec, Verdict};
use ptlattice_core::model::{hamiltonian4, hamiltonian6, product_representative, ProductCouplings};
use ptlattice_core::oracle::{charpoly, charpoly_exact_f64, eig_dense};
use ptlattice_core::secular::{coefficients, spectrum, spectrum4, DEFAULT_TOL};

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn hamiltonian_and_representative_share_the_characteristic_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = Uniform::new(-2.0f64, 1.0);
    for _ in 0..200 {
        let p = ProductCouplings::new(u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng));
        let h = hamiltonian6(&p.to_cartesian().unwrap());
        let m = product_representative(&p, 6).unwrap();
        let ch = charpoly(&h).unwrap();
        let cm = charpoly(&m).unwrap();
        for (a, b) in ch.iter().zip(&cm) {
            assert!(rel_close(*a, *b, 1e-12), "{a} vs {b} at {p:?}");
        }
    }
}

#[test]
fn spectrum_matches_eigensolver_on_the_lattice_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = Uniform::new(-2.0f64, 1.0);
    for _ in 0..100 {
        let p = ProductCouplings::new(u.sample(&mut rng), u.sample(&mut rng), u.sample(&mut rng));
        let h = hamiltonian6(&p.to_cartesian().unwrap());
        let eig = eig_dense(&h, 1e-12).unwrap();
        let r = spectrum(&p, DEFAULT_TOL);
        for (a, b) in r.energies.iter().zip(&eig.eigenvalues) {
            assert!((a - b).norm() <= 1e-8, "{a} vs {b} at {p:?}");
        }
    }
}

#[test]
fn four_site_quartic_matches_the_eigensolver() {
    // the quartic E^4 - (2 lambda + a) E^2 + lambda^2 comes from the pair
    // products (lambda, a, lambda); check it against both matrix routes
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let u = Uniform::new(-2.0f64, 1.0);
    for _ in 0..100 {
        let (lambda, a) = (u.sample(&mut rng), u.sample(&mut rng));
        let r = spectrum4(lambda, a, DEFAULT_TOL);
        let h = hamiltonian4(lambda, a).unwrap();
        let eig = eig_dense(&h, 1e-12).unwrap();
        for (x, y) in r.energies.iter().zip(&eig.eigenvalues) {
            assert!((x - y).norm() <= 1e-8, "lambda={lambda}, a={a}: {x} vs {y}");
        }
    }
    // products above 1 need the representative route
    let wide = Uniform::new(-2.0f64, 3.0);
    for _ in 0..100 {
        let (lambda, a) = (wide.sample(&mut rng), wide.sample(&mut rng));
        let m = product_representative(&ProductCouplings::new(lambda, a, 0.0), 4).unwrap();
        let eig = eig_dense(&m, 1e-12).unwrap();
        let r = spectrum4(lambda, a, DEFAULT_TOL);
        for (x, y) in r.energies.iter().zip(&eig.eigenvalues) {
            assert!((x - y).norm() <= 1e-8, "lambda={lambda}, a={a}: {x} vs {y}");
        }
    }
}

#[test]
fn exact_characteristic_polynomial_agrees_with_the_coefficient_formulas() {
    let p = ProductCouplings::new(0.09, 0.1, 1.0);
    let m = product_representative(&p, 6).unwrap();
    let exact = charpoly_exact_f64(&m).unwrap();
    let k = coefficients(&p);
    assert!(rel_close(exact[2], k.c4, 1e-15));
    assert!(rel_close(exact[4], k.c2, 1e-15));
    assert!(rel_close(exact[6], k.c0, 1e-15));
    assert_eq!(exact[1], 0.0);
    assert_eq!(exact[3], 0.0);
    assert_eq!(exact[5], 0.0);
}

/// Dense membership scans along `C` agree with the slice intervals at every
/// grid point away from the interval endpoints and the `C = 0` crossing
/// plane (a boundary sheet of its own that may fall inside an interval).
#[test]
fn slice_membership_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ua = Uniform::new(0.05f64, 2.5);
    let ub = Uniform::new(-1.0f64, 3.0);
    let mut rows: Vec<(f64, f64)> = vec![(1.0, 2.0), (0.09, -0.01), (1.0, -0.5)];
    while rows.len() < 12 {
        let (a, b) = (ua.sample(&mut rng), ub.sample(&mut rng));
        if b.abs() > 1e-3 {
            rows.push((a, b));
        }
    }
    for (a, b) in rows {
        let slice = c_slice(a, b, DEFAULT_TOL).unwrap();
        let mut endpoints: Vec<f64> = Vec::new();
        for &(lo, hi) in &slice.intervals {
            endpoints.push(lo);
            if hi.is_finite() {
                endpoints.push(hi);
            }
        }
        let mut c = -1.0f64;
        while c <= 6.0 {
            let excluded = endpoints.iter().any(|e| (c - e).abs() < 1e-3) || c.abs() < 1e-4;
            if !excluded {
                let inside = slice.intervals.iter().any(|&(lo, hi)| c > lo && c < hi);
                let verdict = membership(&ProductCouplings::new(a, b, c), DEFAULT_TOL).verdict;
                let expected = if inside { Verdict::Physical } else { Verdict::Unphysical };
                assert_eq!(verdict, expected, "slice ({a}, {b}) at C = {c}: intervals {:?}", slice.intervals);
            }
            c += 1e-3;
        }
    }
}

/// Every emitted curved boundary point classifies as boundary.
#[test]
fn mesh_points_classify_as_boundary() {
    let grid = GridSpec {
        a: RangeSpec::new(0.25, 2.5, 0.25).unwrap(),
        b: RangeSpec::new(-0.75, 2.0, 0.25).unwrap(),
    };
    let mesh = trace_boundary(&grid).unwrap();
    assert!(mesh.curved.len() > 100);
    for p in &mesh.curved {
        let v = membership(&ProductCouplings::new(p.a, p.b, p.c), 1e-8);
        assert_eq!(
            v.verdict,
            Verdict::Boundary,
            "({}, {}, {}) [{}]: sep {:.3e}, |s| {:.3e}",
            p.a,
            p.b,
            p.c,
            p.sheet.as_str(),
            v.min_s_separation,
            v.min_abs_s
        );
    }
}

#[test]
fn trace_output_is_deterministic() {
    let grid = GridSpec {
        a: RangeSpec::new(0.2, 1.4, 0.2).unwrap(),
        b: RangeSpec::new(-0.4, 1.0, 0.2).unwrap(),
    };
    let first = trace_boundary(&grid).unwrap().to_csv();
    let second = trace_boundary(&grid).unwrap().to_csv();
    assert_eq!(first, second);
    // a differently sized worker pool must not change the output
    let pool = rayon::ThreadPoolBuilder::new().num_threads(2).build().unwrap();
    let third = pool.install(|| trace_boundary(&grid).unwrap().to_csv());
    assert_eq!(first, third);
}

/// The admissible-A intervals agree with a membership scan over A.
#[test]
fn alpha_profile_membership_agreement() {
    for (b, c) in [(1.0, 1.0), (0.1, 1.0), (-0.1, 1.0), (2.0, -1.0), (0.5, -1.0)] {
        let profile = alpha_profile(b, c).unwrap();
        let mut a = 0.005f64;
        while a <= 3.0 {
            let near_edge = profile.intervals.iter().any(|&(lo, hi)| {
                (a - lo).abs() < 5e-3 || (hi.is_finite() && (a - hi).abs() < 5e-3)
            });
            if !near_edge {
                let inside = profile.intervals.iter().any(|&(lo, hi)| a > lo && a < hi);
                let verdict = membership(&ProductCouplings::new(a, b, c), DEFAULT_TOL).verdict;
                let expected = if inside { Verdict::Physical } else { Verdict::Unphysical };
                assert_eq!(verdict, expected, "profile ({b}, {c}) at A = {a}: {:?}", profile.intervals);
            }
            a += 0.005;
        }
    }
}

/// The reality threshold in B agrees with a membership scan over B.
#[test]
fn b_threshold_membership_agreement() {
    for (c, alpha) in [(-1.0f64, 0.3f64), (-1.0, 0.6), (-0.5, 0.3), (1.0, 0.3)] {
        let threshold = b_threshold(c, alpha);
        let a = alpha * alpha;
        let mut b = 0.05f64;
        while b <= 4.0 {
            if (b - threshold).abs() > 5e-3 && threshold >= 0.0 {
                let verdict = membership(&ProductCouplings::new(a, b, c), DEFAULT_TOL).verdict;
                let expected = if b > threshold { Verdict::Physical } else { Verdict::Unphysical };
                assert_eq!(verdict, expected, "threshold ({c}, {alpha}) = {threshold} at B = {b}");
            }
            b += 0.05;
        }
    }
}
