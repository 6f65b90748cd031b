//! Closed-form spectra from the secular polynomial.
//!
//! The six-site characteristic polynomial is even in `E`:
//!
//! ```text
//! E^6 + c4 E^4 + c2 E^2 + c0,
//! c4 = -2C - 2B - A,  c2 = 2BC + 2AC + C^2 + B^2,  c0 = -A C^2
//! ```
//!
//! so the energies are the square roots of a cubic in `s = E^2`. The cubic
//! is solved in closed form (trigonometric branch when all roots are real,
//! stable Cardano otherwise) and the six energies are classified by how
//! each `s`-root sits relative to zero and to its neighbours.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::model::ProductCouplings;
use crate::solvers::{monic_cubic, monic_quadratic, sort_spectrum};

/// Default tolerance for degeneracy decisions on the `s`-roots.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Coefficients of the even secular polynomial `E^6 + c4 E^4 + c2 E^2 + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularCoefficients {
    pub c4: f64,
    pub c2: f64,
    pub c0: f64,
}

/// Secular coefficients as polynomial functions of the coupling products.
pub fn coefficients(p: &ProductCouplings) -> SecularCoefficients {
    SecularCoefficients {
        c4: -2.0 * p.c - 2.0 * p.b - p.a,
        c2: 2.0 * p.b * p.c + 2.0 * p.a * p.c + p.c * p.c + p.b * p.b,
        c0: -p.a * p.c * p.c,
    }
}

impl SecularCoefficients {
    /// Horner evaluation in `E^2`.
    pub fn eval(&self, e: f64) -> f64 {
        let s = e * e;
        ((s + self.c4) * s + self.c2) * s + self.c0
    }

    pub fn eval_complex(&self, e: Complex64) -> Complex64 {
        let s = e * e;
        ((s + self.c4) * s + self.c2) * s + self.c0
    }

    /// Natural magnitude of the polynomial's terms at `e`; residuals should
    /// be compared against this.
    pub fn residual_scale(&self, e_abs: f64) -> f64 {
        let s = e_abs * e_abs;
        (((s + self.c4.abs()) * s + self.c2.abs()) * s + self.c0.abs()).max(1.0)
    }
}

/// The three roots of `s^3 + c4 s^2 + c2 s + c0`, i.e. the squared energies.
pub fn solve_s_cubic(k: &SecularCoefficients) -> [Complex64; 3] {
    monic_cubic(k.c4, k.c2, k.c0)
}

/// Reality classification of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// All energies real and simple.
    AllReal,
    /// A level coalescence within tolerance (candidate exceptional point),
    /// with every energy still real.
    Degenerate,
    /// At least one complex-conjugate pair of energies.
    Complexified,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::AllReal => "AllReal",
            Classification::Degenerate => "Degenerate",
            Classification::Complexified => "Complexified",
        }
    }
}

/// Energies of one parameter point together with the evidence used to
/// classify them.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Sorted by descending real part, then descending imaginary part.
    pub energies: Vec<Complex64>,
    pub n_real: usize,
    pub s_roots: Vec<Complex64>,
    pub classification: Classification,
    pub tol_used: f64,
}

impl SpectrumResult {
    /// Smallest pairwise separation of the `s`-roots.
    pub fn min_s_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.s_roots.len() {
            for j in i + 1..self.s_roots.len() {
                min = min.min((self.s_roots[i] - self.s_roots[j]).norm());
            }
        }
        min
    }

    pub fn min_abs_s(&self) -> f64 {
        self.s_roots.iter().map(|s| s.norm()).fold(f64::INFINITY, f64::min)
    }
}

// JSON shape: {"energies":[{"re":..,"im":..},...],"n_real":k,
//              "classification":"AllReal|Degenerate|Complexified","tol":t}
impl Serialize for SpectrumResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Pair {
            re: f64,
            im: f64,
        }
        let energies: Vec<Pair> = self.energies.iter().map(|z| Pair { re: z.re, im: z.im }).collect();
        let mut st = serializer.serialize_struct("SpectrumResult", 4)?;
        st.serialize_field("energies", &energies)?;
        st.serialize_field("n_real", &self.n_real)?;
        st.serialize_field("classification", self.classification.as_str())?;
        st.serialize_field("tol", &self.tol_used)?;
        st.end()
    }
}

fn coalescence_scale(a: Complex64, b: Complex64) -> f64 {
    (a.norm() * b.norm()).max(1.0)
}

fn build_result(mut s_roots: Vec<Complex64>, tol: f64) -> SpectrumResult {
    // A conjugate pair of s-roots inside the coalescence band is a double
    // real root blurred by rounding (root splitting goes like sqrt of the
    // coefficient noise); collapse it to its real midpoint.
    for i in 0..s_roots.len() {
        for j in i + 1..s_roots.len() {
            let (si, sj) = (s_roots[i], s_roots[j]);
            if si.im != 0.0
                && sj.im != 0.0
                && si.im.signum() != sj.im.signum()
                && (si - sj).norm_sqr() <= tol * coalescence_scale(si, sj)
            {
                let mid = Complex64::new(0.5 * (si.re + sj.re), 0.0);
                s_roots[i] = mid;
                s_roots[j] = mid;
            }
        }
    }

    let mut energies = Vec::with_capacity(2 * s_roots.len());
    let mut n_real = 0usize;
    let mut complexified = false;
    let mut degenerate = false;

    for &s in &s_roots {
        let s = if s.im.abs() <= tol { Complex64::new(s.re, 0.0) } else { s };
        if s.im == 0.0 {
            if s.re.abs() <= tol {
                // coalesced pair at the origin
                energies.push(Complex64::new(0.0, 0.0));
                energies.push(Complex64::new(0.0, 0.0));
                degenerate = true;
                n_real += 2;
            } else if s.re > 0.0 {
                let e = s.re.sqrt();
                energies.push(Complex64::new(e, 0.0));
                energies.push(Complex64::new(-e, 0.0));
                n_real += 2;
            } else {
                let e = (-s.re).sqrt();
                energies.push(Complex64::new(0.0, e));
                energies.push(Complex64::new(0.0, -e));
                complexified = true;
            }
        } else {
            let r = s.sqrt();
            energies.push(r);
            energies.push(-r);
            complexified = true;
        }
    }

    // Coalescence is tested quadratically: near an exceptional point the
    // roots split like sqrt of the parameter distance (and like sqrt of
    // coefficient rounding, which floors the computed separation at
    // ~1e-7 in f64), so |si - sj|^2 <= tol * scale flags exactly the
    // points within ~tol of the boundary surface. This matches the
    // quadratic character of the |s| <= tol rule above (s = E^2).
    for i in 0..s_roots.len() {
        for j in i + 1..s_roots.len() {
            if (s_roots[i] - s_roots[j]).norm_sqr() <= tol * coalescence_scale(s_roots[i], s_roots[j]) {
                degenerate = true;
            }
        }
    }

    let classification = if complexified {
        Classification::Complexified
    } else if degenerate {
        Classification::Degenerate
    } else {
        Classification::AllReal
    };
    sort_spectrum(&mut energies);
    SpectrumResult { energies, n_real, s_roots, classification, tol_used: tol }
}

/// Six energies of the six-site model at the given coupling products.
pub fn spectrum(p: &ProductCouplings, tol: f64) -> SpectrumResult {
    let k = coefficients(p);
    build_result(solve_s_cubic(&k).to_vec(), tol)
}

/// Four energies of the four-site predecessor with products
/// `(lambda, a, lambda)`: roots of `E^4 - (2 lambda + a) E^2 + lambda^2`.
pub fn spectrum4(lambda: f64, a: f64, tol: f64) -> SpectrumResult {
    let s_roots = monic_quadratic(-(2.0 * lambda + a), lambda * lambda);
    build_result(s_roots.to_vec(), tol)
}

/// Number of real energies (degenerate zero pairs count as real).
pub fn count_real_energies(p: &ProductCouplings, tol: f64) -> usize {
    spectrum(p, tol).n_real
}

#[cfg(test)]
mod tests {
    use super::*;

    const PATH6: [f64; 3] = [1.8019377358048383, 1.2469796037174671, 0.44504186791262881];
    const S111: [f64; 3] = [3.2469796037174671, 1.5549581320873712, 0.19806226419516175];

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coefficient_values() {
        let k = coefficients(&ProductCouplings::new(1.0, 1.0, 1.0));
        assert_eq!((k.c4, k.c2, k.c0), (-5.0, 6.0, -1.0));

        let k = coefficients(&ProductCouplings::new(0.0, 0.0, 0.0));
        assert_eq!((k.c4, k.c2, k.c0), (0.0, 0.0, 0.0));

        let k = coefficients(&ProductCouplings::new(0.09, 0.1, 1.0));
        assert!(close(k.c4, -2.29, 1e-15));
        assert!(close(k.c2, 1.39, 1e-15));
        assert!(close(k.c0, -0.09, 1e-15));
    }

    #[test]
    fn eval_is_horner_in_e_squared() {
        let k = SecularCoefficients { c4: -5.0, c2: 6.0, c0: -1.0 };
        assert_eq!(k.eval(0.0), -1.0);
        // the free-lattice energies are the actual roots
        for e in PATH6 {
            assert!(k.eval(e).abs() < 1e-12);
            assert!(k.eval(-e).abs() < 1e-12);
        }
        // E = 1 is not a root there
        assert!(close(k.eval(1.0), 1.0, 1e-15));
    }

    #[test]
    fn eval_cross_module_root() {
        // C chosen so that E = 2 solves the secular equation at A = 0.09, B = 0.1
        let c = 3.8823529411764706;
        let k = coefficients(&ProductCouplings::new(0.09, 0.1, c));
        assert!(k.eval(2.0).abs() < 1e-9);
    }

    #[test]
    fn s_cubic_roots() {
        let z = solve_s_cubic(&SecularCoefficients { c4: 0.0, c2: 0.0, c0: 0.0 });
        for r in z {
            assert_eq!(r, Complex64::new(0.0, 0.0));
        }

        let mut roots: Vec<f64> = solve_s_cubic(&SecularCoefficients { c4: -5.0, c2: 6.0, c0: -1.0 })
            .iter()
            .map(|z| z.re)
            .collect();
        roots.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (got, want) in roots.iter().zip(S111) {
            assert!(close(*got, want, 1e-12), "{got} vs {want}");
        }
    }

    #[test]
    fn spectrum_free_point() {
        let r = spectrum(&ProductCouplings::new(1.0, 1.0, 1.0), DEFAULT_TOL);
        assert_eq!(r.classification, Classification::AllReal);
        assert_eq!(r.n_real, 6);
        let expected = [PATH6[0], PATH6[1], PATH6[2], -PATH6[2], -PATH6[1], -PATH6[0]];
        for (got, want) in r.energies.iter().zip(expected) {
            assert!(close(got.re, want, 1e-12));
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn spectrum_sample_point_is_all_real() {
        let r = spectrum(&ProductCouplings::new(0.09, 0.1, 1.0), DEFAULT_TOL);
        assert_eq!(r.classification, Classification::AllReal);
        assert_eq!(r.n_real, 6);
    }

    #[test]
    fn spectrum_negative_inner_coupling_complexifies() {
        // one s-root is negative real, the other two form a conjugate pair,
        // so no energy stays real here
        let r = spectrum(&ProductCouplings::new(-1.0, 1.0, 1.0), DEFAULT_TOL);
        assert_eq!(r.classification, Classification::Complexified);
        assert_eq!(r.n_real, 0);
        let n_neg_real_s = r.s_roots.iter().filter(|s| s.im == 0.0 && s.re < 0.0).count();
        assert_eq!(n_neg_real_s, 1);
    }

    #[test]
    fn degenerate_zero_pair_counts_as_real() {
        let r = spectrum(&ProductCouplings::new(0.0, 1.0, 1.0), DEFAULT_TOL);
        assert_eq!(r.classification, Classification::Degenerate);
        assert_eq!(r.n_real, 6);
        assert!(r.min_abs_s() <= DEFAULT_TOL);
    }

    #[test]
    fn four_site_spectra() {
        let r = spectrum4(1.0, 1.0, DEFAULT_TOL);
        assert_eq!(r.classification, Classification::AllReal);
        let phi = 1.6180339887498948;
        assert!(close(r.energies[0].re, phi, 1e-12));
        assert!(close(r.energies[1].re, phi - 1.0, 1e-12));

        let r = spectrum4(0.0, 1.0, DEFAULT_TOL);
        assert_eq!(r.classification, Classification::Degenerate);
        assert_eq!(r.n_real, 4);

        let r = spectrum4(-0.5, 1.0, DEFAULT_TOL);
        assert_eq!(r.classification, Classification::Complexified);
    }

    #[test]
    fn count_real_variants() {
        assert_eq!(count_real_energies(&ProductCouplings::new(1.0, 1.0, 1.0), DEFAULT_TOL), 6);
        assert_eq!(count_real_energies(&ProductCouplings::new(-1.0, 1.0, 1.0), DEFAULT_TOL), 0);
        assert_eq!(count_real_energies(&ProductCouplings::new(0.0, 1.0, 1.0), DEFAULT_TOL), 6);
    }

    #[test]
    fn json_schema() {
        let r = spectrum4(0.0, 1.0, 1e-10);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["classification"], "Degenerate");
        assert_eq!(json["n_real"], 4);
        assert_eq!(json["tol"], 1e-10);
        assert_eq!(json["energies"].as_array().unwrap().len(), 4);
        assert!(json["energies"][0]["re"].is_number());
        assert!(json["energies"][0]["im"].is_number());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn energies_negation_symmetric_and_conjugation_closed(
                a in -2.0..3.0f64, b in -2.0..3.0f64, c in -2.0..3.0f64,
            ) {
                let r = spectrum(&ProductCouplings::new(a, b, c), DEFAULT_TOL);
                prop_assert_eq!(r.energies.len(), 6);
                prop_assert_eq!(r.n_real % 2, 0);
                for z in &r.energies {
                    let has_neg = r.energies.iter().any(|w| (w + z).norm() <= 1e-9 * (1.0 + z.norm()));
                    let has_conj = r.energies.iter().any(|w| (w - z.conj()).norm() <= 1e-9 * (1.0 + z.norm()));
                    prop_assert!(has_neg, "negation partner of {} missing", z);
                    prop_assert!(has_conj, "conjugate partner of {} missing", z);
                }
            }

            #[test]
            fn root_residuals_are_small(
                a in -2.0..3.0f64, b in -2.0..3.0f64, c in -2.0..3.0f64,
            ) {
                let p = ProductCouplings::new(a, b, c);
                let k = coefficients(&p);
                let r = spectrum(&p, DEFAULT_TOL);
                for e in &r.energies {
                    let res = k.eval_complex(*e).norm();
                    prop_assert!(res <= 1e-8 * e.norm().powi(6).max(1.0),
                        "residual {} at {}", res, e);
                }
            }

            #[test]
            fn vieta_relations_hold(
                a in -2.0..3.0f64, b in -2.0..3.0f64, c in -2.0..3.0f64,
            ) {
                let k = coefficients(&ProductCouplings::new(a, b, c));
                let s = solve_s_cubic(&k);
                let sum = s[0] + s[1] + s[2];
                let prod = s[0] * s[1] * s[2];
                prop_assert!((sum + k.c4).norm() <= 1e-10 * (1.0 + k.c4.abs()),
                    "sum {} vs -c4 {}", sum, -k.c4);
                prop_assert!((prod + k.c0).norm() <= 1e-10 * (1.0 + k.c0.abs()),
                    "prod {} vs -c0 {}", prod, -k.c0);
            }
        }
    }
}
