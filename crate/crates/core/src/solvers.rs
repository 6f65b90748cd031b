//! Small root-finding toolbox: closed-form quadratics/cubics with a Newton
//! polish, plus bracketed scalar solvers used by the curve analysis.

use num_complex::Complex64;

/// Roots of the monic quadratic `t^2 + c1 t + c0` with real coefficients.
///
/// Real roots are computed the cancellation-free way (larger-magnitude root
/// first, companion via the product); a negative discriminant yields an
/// exactly conjugate pair.
pub fn monic_quadratic(c1: f64, c0: f64) -> [Complex64; 2] {
    let disc = c1 * c1 - 4.0 * c0;
    if disc >= 0.0 {
        let r1 = if c1 >= 0.0 {
            -0.5 * (c1 + disc.sqrt())
        } else {
            -0.5 * (c1 - disc.sqrt())
        };
        let r2 = if r1 != 0.0 { c0 / r1 } else { -c1 };
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -0.5 * c1;
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

/// All three roots of the monic cubic `t^3 + c2 t^2 + c1 t + c0`.
///
/// The three-real-root region goes through the trigonometric form so the
/// results carry no spurious imaginary parts; the one-real region uses the
/// numerically stable Cardano cube root. Each root receives up to three
/// Newton steps on the original cubic. Real roots are returned with an
/// exactly zero imaginary part and complex roots as an exact conjugate pair.
pub fn monic_cubic(c2: f64, c1: f64, c0: f64) -> [Complex64; 3] {
    // depressed form t = u - c2/3
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 - c2 * c1 / 3.0 + 2.0 * c2 * c2 * c2 / 27.0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    let scale = (4.0 * p.abs().powi(3)).max(27.0 * q * q).max(f64::MIN_POSITIVE);

    let mut roots = if disc.abs() <= 1e-14 * scale {
        // Multiple roots: double at -3q/(2p), simple at 3q/p (triple when p ~ 0).
        if p.abs() <= 1e-14 * (1.0 + q.abs().cbrt().powi(2)) {
            [0.0, 0.0, 0.0]
        } else {
            let d = -1.5 * q / p;
            [d, d, 3.0 * q / p]
        }
        .map(|u| Complex64::new(u - shift, 0.0))
    } else if disc > 0.0 {
        // Three distinct real roots (Viete).
        let m = 2.0 * (-p / 3.0).sqrt();
        let cosarg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let phi = cosarg.acos() / 3.0;
        [0.0f64, 1.0, 2.0].map(|k| {
            let u = m * (phi - k * 2.0 * std::f64::consts::PI / 3.0).cos();
            Complex64::new(u - shift, 0.0)
        })
    } else {
        // One real root, conjugate pair.
        let sq = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let r = -0.5 * q;
        let s1 = if r >= 0.0 { (r + sq).cbrt() } else { (r - sq).cbrt() };
        let s2 = if s1 != 0.0 { -p / (3.0 * s1) } else { 0.0 };
        let real = s1 + s2;
        let im = 0.5 * 3f64.sqrt() * (s1 - s2);
        [
            Complex64::new(real - shift, 0.0),
            Complex64::new(-0.5 * real - shift, im),
            Complex64::new(-0.5 * real - shift, -im),
        ]
    };

    for r in &mut roots {
        *r = polish_cubic(*r, c2, c1, c0);
    }
    // keep conjugate symmetry exact after polishing
    if roots[1].im != 0.0 {
        let z = 0.5 * (roots[1] + roots[2].conj());
        roots[1] = z;
        roots[2] = z.conj();
    }
    roots
}

fn polish_cubic(mut z: Complex64, c2: f64, c1: f64, c0: f64) -> Complex64 {
    for _ in 0..3 {
        let f = ((z + c2) * z + c1) * z + c0;
        let df = (3.0 * z + 2.0 * c2) * z + c1;
        let fscale = z.norm().powi(3) + c2.abs() * z.norm_sqr() + c1.abs() * z.norm() + c0.abs();
        if df.norm() <= 1e-12 * (1.0 + fscale) {
            break; // near a multiple root; Newton would amplify noise
        }
        let step = f / df;
        if !step.re.is_finite() || !step.im.is_finite() || step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
        z -= step;
    }
    if z.im != 0.0 && z.im.abs() <= 1e-15 * (1.0 + z.re.abs()) {
        z.im = 0.0;
    }
    z
}

/// Real roots of `a3 x^3 + a2 x^2 + a1 x + a0`, ascending. The leading
/// coefficient must be nonzero.
pub fn real_cubic_roots(a3: f64, a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    debug_assert!(a3 != 0.0);
    let mut out: Vec<f64> = monic_cubic(a2 / a3, a1 / a3, a0 / a3)
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| z.re)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Bisection on a bracketed sign change, to absolute width `tol_x`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol_x: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return hi;
    }
    debug_assert!(flo * fhi < 0.0, "bisect requires a sign change");
    while hi - lo > tol_x {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    0.5 * (lo + hi)
}

/// Safeguarded Newton on a bracketed root of `f`: Newton steps that stay in
/// the bracket, bisection otherwise.
pub fn newton_bracketed<F, D>(f: F, df: D, mut lo: f64, mut hi: f64, tol_x: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if flo * fx < 0.0 {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        if hi - lo <= tol_x {
            break;
        }
        let d = df(x);
        let newton = x - fx / d;
        x = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo) <= tol_x {
            break;
        }
    }
    x
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol_x: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol_x {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// Canonical spectrum order: descending real part, then descending
/// imaginary part. Output is reproducible bit-for-bit given identical
/// arithmetic.
pub fn sort_spectrum(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        b.re.partial_cmp(&a.re)
            .unwrap()
            .then(b.im.partial_cmp(&a.im).unwrap())
    });
}

/// Sign-change brackets of `f` on a uniform grid over `[lo, hi]`.
pub fn scan_sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x = lo;
    let mut fx = f(x);
    while x < hi {
        let xn = (x + step).min(hi);
        let fn_ = f(xn);
        if fx == 0.0 {
            out.push((x, x));
        } else if fx * fn_ < 0.0 {
            out.push((x, xn));
        }
        x = xn;
        fx = fn_;
        if x >= hi {
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn quadratic_real_and_complex() {
        let r = monic_quadratic(-3.0, 2.0); // (t-1)(t-2)
        let mut v = [r[0].re, r[1].re];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_close(v[0], 1.0, 1e-14);
        assert_close(v[1], 2.0, 1e-14);

        let r = monic_quadratic(0.0, 0.25); // t^2 + 1/4
        assert_eq!(r[0].re, 0.0);
        assert_close(r[0].im, 0.5, 1e-15);
        assert_eq!(r[1], r[0].conj());
    }

    #[test]
    fn cubic_three_real() {
        // (t-1)(t-2)(t-3) = t^3 - 6t^2 + 11t - 6
        let mut r: Vec<f64> = monic_cubic(-6.0, 11.0, -6.0).iter().map(|z| z.re).collect();
        assert!(monic_cubic(-6.0, 11.0, -6.0).iter().all(|z| z.im == 0.0));
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_close(r[0], 1.0, 1e-12);
        assert_close(r[1], 2.0, 1e-12);
        assert_close(r[2], 3.0, 1e-12);
    }

    #[test]
    fn cubic_one_real() {
        // t^3 - 2t^2 + t + 1 has a single real root near -0.46557
        let r = monic_cubic(-2.0, 1.0, 1.0);
        let real: Vec<&Complex64> = r.iter().filter(|z| z.im == 0.0).collect();
        assert_eq!(real.len(), 1);
        assert_close(real[0].re, -0.46557123187676803, 1e-13);
        assert_eq!(r[1], r[2].conj());
    }

    #[test]
    fn cubic_double_root() {
        // (t-1)^2 (t-3) = t^3 - 5t^2 + 7t - 3
        let mut r: Vec<f64> = monic_cubic(-5.0, 7.0, -3.0).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_close(r[0], 1.0, 1e-7);
        assert_close(r[1], 1.0, 1e-7);
        assert_close(r[2], 3.0, 1e-10);
    }

    #[test]
    fn cubic_triple_root() {
        // (t-2)^3 = t^3 - 6t^2 + 12t - 8
        for z in monic_cubic(-6.0, 12.0, -8.0) {
            assert_close(z.re, 2.0, 1e-4);
            assert!(z.im.abs() < 1e-4);
        }
    }

    #[test]
    fn scalar_solvers() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert_close(root, 2f64.sqrt(), 1e-12);

        let root = newton_bracketed(|x| x * x * x - 2.0, |x| 3.0 * x * x, 0.0, 2.0, 1e-14);
        assert_close(root, 2f64.cbrt(), 1e-12);

        // argmin localization of an offset parabola is sqrt(eps)-limited
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3) + 1.0, -1.0, 2.0, 1e-10);
        assert_close(x, 0.3, 1e-7);
        assert_close(fx, 1.0, 1e-14);

        let brackets = scan_sign_changes(|x| x * x - 1.0, -2.0, 2.0, 0.3);
        assert_eq!(brackets.len(), 2);
    }
}
