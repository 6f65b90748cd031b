//! Independent numerical ground truth.
//!
//! Characteristic polynomials come from the Faddeev-LeVerrier trace
//! recursion (plain f64, plus an exact arbitrary-precision path over the
//! binary values of the entries). Eigenvalues are the polynomial's roots by
//! simultaneous Aberth-Ehrlich iteration on the companion form. Nothing
//! here shares code with the closed-form spectra in [`crate::secular`], so
//! agreement between the two is a real cross-check.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::model::RealMatrix;
use crate::solvers::sort_spectrum;
use crate::{Error, Result};

const MAX_DIM: usize = 16;
const MAX_ITERATIONS: usize = 200;

/// Eigenvalues with per-eigenpair backward-error estimates.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    /// `|p(lambda)|` scaled by the polynomial's term magnitudes at `lambda`.
    pub residual_norms: Vec<f64>,
}

/// Monic characteristic polynomial of `det(E I - M)`, coefficients
/// descending. Faddeev-LeVerrier trace recursion; `dim <= 16`.
pub fn charpoly(m: &RealMatrix) -> Result<Vec<f64>> {
    let n = check_dim(m)?;
    let mut coeffs = vec![0.0; n + 1];
    coeffs[0] = 1.0;
    let mut mk = m.clone();
    for k in 1..=n {
        let ck = -mk.trace() / k as f64;
        coeffs[k] = ck;
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted[(i, i)] += ck;
            }
            mk = m.mul(&shifted);
        }
    }
    Ok(coeffs)
}

/// Exact characteristic polynomial over arbitrary-precision rationals.
///
/// Every f64 entry is a binary rational, so the recursion carries no
/// rounding at all; integer matrices give exact integer coefficients.
pub fn charpoly_exact(m: &RealMatrix) -> Result<Vec<BigRational>> {
    let n = check_dim(m)?;
    let entry = |i: usize, j: usize| BigRational::from_f64(m[(i, j)]).expect("finite entry");
    let mut mk: Vec<BigRational> = (0..n * n).map(|t| entry(t / n, t % n)).collect();
    let base: Vec<BigRational> = mk.clone();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[0] = BigRational::from_i64(1).unwrap();
    for k in 1..=n {
        let tr: BigRational = (0..n).map(|i| mk[i * n + i].clone()).sum();
        let ck = -tr / BigRational::from_i64(k as i64).unwrap();
        coeffs[k] = ck.clone();
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted[i * n + i] += ck.clone();
            }
            let mut next = vec![BigRational::zero(); n * n];
            for i in 0..n {
                for l in 0..n {
                    let b = &base[i * n + l];
                    if b.is_zero() {
                        continue;
                    }
                    for j in 0..n {
                        let t = b * &shifted[l * n + j];
                        next[i * n + j] += t;
                    }
                }
            }
            mk = next;
        }
    }
    Ok(coeffs)
}

/// The companion matrix of a monic polynomial (descending coefficients).
pub fn companion(monic_desc: &[f64]) -> RealMatrix {
    let n = monic_desc.len() - 1;
    let mut m = RealMatrix::zeros(n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -monic_desc[n - i];
    }
    m
}

fn check_dim(m: &RealMatrix) -> Result<usize> {
    let n = m.dim();
    if n == 0 || n > MAX_DIM {
        return Err(Error::InvalidInput(format!("oracle handles dimensions 1..={MAX_DIM}, got {n}")));
    }
    Ok(n)
}

fn eval_poly(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_poly_deriv(coeffs: &[f64], z: Complex64) -> Complex64 {
    let n = coeffs.len() - 1;
    coeffs[..n]
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, &c)| acc * z + c * (n - i) as f64)
}

fn poly_scale_at(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().fold(0.0, |acc, &c| acc * r + c.abs()).max(f64::MIN_POSITIVE)
}

/// All complex roots of a monic real polynomial by Aberth-Ehrlich iteration,
/// to backward-error `tol` (each `|p(z_k)| <= tol * sum_i |c_i| |z_k|^i`).
pub fn aberth_roots(monic_desc: &[f64], tol: f64, max_iterations: usize) -> Result<Vec<Complex64>> {
    let n = monic_desc.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    // initial ring: radius from the geometric mean of the root magnitudes,
    // angular offset breaks the +- symmetry of even polynomials
    let tail = monic_desc[n].abs().max(1e-12);
    let r0 = tail.powf(1.0 / n as f64).clamp(1e-3, 1.0 + monic_desc.iter().fold(0.0f64, |a, c| a.max(c.abs())));
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.7;
            Complex64::from_polar(r0 * (1.0 + 0.05 * k as f64 / n as f64), th)
        })
        .collect();

    let converged = |z: &[Complex64]| {
        z.iter().all(|&zk| eval_poly(monic_desc, zk).norm() <= tol * poly_scale_at(monic_desc, zk))
    };

    let mut iterations = 0;
    for it in 0..max_iterations {
        iterations = it + 1;
        let mut max_step = 0.0f64;
        let snapshot = z.clone();
        for k in 0..n {
            let zk = snapshot[k];
            let p = eval_poly(monic_desc, zk);
            let dp = eval_poly_deriv(monic_desc, zk);
            if dp.norm() == 0.0 {
                z[k] = zk + Complex64::new(1e-8, 1e-8);
                max_step = f64::MAX;
                continue;
            }
            let w = p / dp;
            let repel: Complex64 = snapshot
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, &zj)| {
                    let d = zk - zj;
                    if d.norm() < 1e-300 {
                        Complex64::new(1e12, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - w * repel;
            let correction = if denom.norm() < 1e-300 { w } else { w / denom };
            z[k] = zk - correction;
            max_step = max_step.max(correction.norm() / (1.0 + zk.norm()));
        }
        if converged(&z) || max_step <= f64::EPSILON {
            break;
        }
    }

    if !converged(&z) {
        let worst = z
            .iter()
            .map(|&zk| eval_poly(monic_desc, zk).norm() / poly_scale_at(monic_desc, zk))
            .fold(0.0, f64::max);
        return Err(Error::NonConvergence { iterations, residual: worst });
    }

    // one guarded Newton polish per root
    for zk in &mut z {
        let p = eval_poly(monic_desc, *zk);
        let dp = eval_poly_deriv(monic_desc, *zk);
        if dp.norm() > 1e-10 * poly_scale_at(monic_desc, *zk) {
            *zk -= p / dp;
        }
    }
    // snap near-real and near-imaginary roots and enforce conjugate pairing
    // for real input
    for zk in &mut z {
        if zk.im.abs() <= 1e-12 * (1.0 + zk.re.abs()) {
            zk.im = 0.0;
        }
        if zk.re.abs() <= 1e-12 * (1.0 + zk.im.abs()) {
            zk.re = 0.0;
        }
    }
    symmetrize_conjugates(&mut z);
    Ok(z)
}

// Roots of a real polynomial come in conjugate pairs; average each root
// with its partner's conjugate so the pairing is exact and sort order is
// well defined.
fn symmetrize_conjugates(z: &mut [Complex64]) {
    let n = z.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || z[i].im <= 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if j == i || used[j] || z[j].im >= 0.0 {
                continue;
            }
            let d = (z[j] - z[i].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, d)) = best {
            if d <= 1e-6 * (1.0 + z[i].norm()) {
                let m = 0.5 * (z[i] + z[j].conj());
                z[i] = m;
                z[j] = m.conj();
                used[i] = true;
                used[j] = true;
            }
        }
    }
}

/// Dense eigenvalues of a small real matrix: roots of the characteristic
/// polynomial, deliberately disjoint from the closed-form route.
pub fn eig_dense(m: &RealMatrix, tol: f64) -> Result<EigenResult> {
    eig_impl(m, tol, false)
}

/// Same as [`eig_dense`] but also returns unit eigenvectors obtained by a
/// couple of inverse-iteration steps per eigenvalue.
pub fn eig_dense_with_vectors(m: &RealMatrix, tol: f64) -> Result<EigenResult> {
    eig_impl(m, tol, true)
}

fn eig_impl(m: &RealMatrix, tol: f64, vectors: bool) -> Result<EigenResult> {
    let coeffs = charpoly(m)?;
    let mut eigenvalues = aberth_roots(&coeffs, tol, MAX_ITERATIONS)?;
    sort_spectrum(&mut eigenvalues);
    let residual_norms = eigenvalues
        .iter()
        .map(|&z| eval_poly(&coeffs, z).norm() / poly_scale_at(&coeffs, z))
        .collect();
    let eigenvectors = if vectors {
        Some(eigenvalues.iter().map(|&z| inverse_iteration(m, z)).collect())
    } else {
        None
    };
    Ok(EigenResult { eigenvalues, eigenvectors, residual_norms })
}

fn inverse_iteration(m: &RealMatrix, lambda: Complex64) -> Vec<Complex64> {
    let n = m.dim();
    // (M - (lambda + eps) I) v = b, repeated twice from a fixed start
    let shift = lambda + Complex64::new(1e-10, 1e-10);
    let mut a: Vec<Complex64> = (0..n * n)
        .map(|t| {
            let (i, j) = (t / n, t % n);
            Complex64::new(m[(i, j)], 0.0) - if i == j { shift } else { Complex64::new(0.0, 0.0) }
        })
        .collect();
    // LU with partial pivoting
    let mut piv: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let (pr, _) = (col..n)
            .map(|r| (r, a[r * n + col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if pr != col {
            for j in 0..n {
                a.swap(col * n + j, pr * n + j);
            }
            piv.swap(col, pr);
        }
        let pivot = a[col * n + col];
        let pivot = if pivot.norm() < 1e-300 { Complex64::new(1e-300, 0.0) } else { pivot };
        a[col * n + col] = pivot;
        for r in col + 1..n {
            let f = a[r * n + col] / pivot;
            a[r * n + col] = f;
            for j in col + 1..n {
                let sub = f * a[col * n + j];
                a[r * n + j] -= sub;
            }
        }
    }
    let solve = |b: &[Complex64], a: &[Complex64], piv: &[usize]| -> Vec<Complex64> {
        let mut x: Vec<Complex64> = piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let s = a[i * n + j] * x[j];
                x[i] -= s;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let s = a[i * n + j] * x[j];
                x[i] -= s;
            }
            x[i] /= a[i * n + i];
        }
        x
    };
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.0)).collect();
    for _ in 0..2 {
        v = solve(&v, &a, &piv);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for z in &mut v {
                *z /= norm;
            }
        }
    }
    v
}

/// Convenience: exact coefficients downcast to f64 (lossy only past 2^53).
pub fn charpoly_exact_f64(m: &RealMatrix) -> Result<Vec<f64>> {
    Ok(charpoly_exact(m)?
        .into_iter()
        .map(|r| {
            let num = r.numer().to_f64().unwrap_or(f64::NAN);
            let den = r.denom().to_f64().unwrap_or(f64::NAN);
            num / den
        })
        .collect())
}

/// True when the coefficient is an exact integer equal to `expected`.
pub fn exact_coeff_eq(c: &BigRational, expected: i64) -> bool {
    c.denom() == &BigInt::from(1) && c.numer() == &BigInt::from(expected)
}
