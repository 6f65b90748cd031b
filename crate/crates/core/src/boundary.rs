//! Implicit-curve machinery delimiting the physical domain.
//!
//! Fixing two of the three coupling products turns the secular equation into
//! an explicit curve for the third:
//!
//! ```text
//! C(E) = E^2 - B E / (E - alpha)                  (pole at E = alpha)
//! alpha(E) = (1 - B / (E^2 - C)) E                (poles at E^2 = C)
//! B(E) = (E - alpha)(E^2 - C) / E                 (pole at E = 0)
//! ```
//!
//! with `alpha = +-sqrt(A)`. Intersections of these curves with horizontal
//! lines are energy levels, so the curves' zeros, poles and critical levels
//! carve the parameter axis into physical and unphysical intervals. This
//! module locates those features; [`crate::domain`] assembles them into
//! slices and boundary meshes.

use serde::Serialize;

use crate::solvers::{bisect, newton_bracketed, real_cubic_roots, scan_sign_changes};
use crate::{Error, Result};

/// Evaluations closer than this to a pole are rejected; callers resample.
pub const POLE_MARGIN: f64 = 1e-12;

/// Refinement tolerance for located roots and extrema.
pub const REFINE_TOL: f64 = 1e-12;

/// One of the two real square roots `alpha = +-sqrt(A)` of a nonnegative
/// inner coupling product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaRoot {
    pub value: f64,
    pub sign: i8,
    pub a_source: f64,
}

impl AlphaRoot {
    /// Both square-root branches of `A >= 0`.
    pub fn pair(a: f64) -> Result<(AlphaRoot, AlphaRoot)> {
        if a < 0.0 {
            return Err(Error::InvalidInput(format!("A = {a} has no real square roots")));
        }
        let r = a.sqrt();
        Ok((
            AlphaRoot { value: r, sign: 1, a_source: a },
            AlphaRoot { value: -r, sign: -1, a_source: a },
        ))
    }
}

/// `C(E) = E^2 - B E / (E - alpha)`.
pub fn c_of_e(e: f64, b: f64, alpha: f64) -> Result<f64> {
    if (e - alpha).abs() < POLE_MARGIN {
        return Err(Error::Pole { e, pole: alpha, margin: POLE_MARGIN });
    }
    Ok(e * e - b * e / (e - alpha))
}

/// `alpha(E) = (1 - B / (E^2 - C)) E`.
pub fn alpha_of_e(e: f64, b: f64, c: f64) -> Result<f64> {
    if (e * e - c).abs() < POLE_MARGIN {
        return Err(Error::Pole { e, pole: c.max(0.0).sqrt().copysign(e), margin: POLE_MARGIN });
    }
    Ok((1.0 - b / (e * e - c)) * e)
}

/// Partial-fraction form of [`alpha_of_e`] for positive `C = gamma^2`:
/// `alpha(E) = E - (B/2) (1/(E+gamma) + 1/(E-gamma))`.
pub fn alpha_partial_fractions(e: f64, b: f64, gamma: f64) -> Result<f64> {
    if (e - gamma).abs() < POLE_MARGIN || (e + gamma).abs() < POLE_MARGIN {
        return Err(Error::Pole { e, pole: gamma.copysign(e), margin: POLE_MARGIN });
    }
    Ok(e - 0.5 * b * (1.0 / (e + gamma) + 1.0 / (e - gamma)))
}

/// `B(E) = (E - alpha)(E^2 - C) / E`.
pub fn b_of_e(e: f64, c: f64, alpha: f64) -> Result<f64> {
    if e.abs() < POLE_MARGIN {
        return Err(Error::Pole { e, pole: 0.0, margin: POLE_MARGIN });
    }
    Ok((e - alpha) * (e * e - c) / e)
}

/// The two nonzero zeros of `C(E)`: `(alpha +- sqrt(alpha^2 + 4B)) / 2`.
/// `None` when they are complex.
pub fn zeros_of_c(alpha: f64, b: f64) -> Option<[f64; 2]> {
    let disc = alpha * alpha + 4.0 * b;
    if disc < 0.0 {
        return None;
    }
    let r = disc.sqrt();
    Some([0.5 * (alpha + r), 0.5 * (alpha - r)])
}

/// Real critical energies of `C(E)`: the real roots of
/// `2E^3 - 4 alpha E^2 + 2 alpha^2 E + alpha B = 0`, ascending.
///
/// Each root satisfies the implicit form `alpha B = -2E (E - alpha)^2`.
/// The expanded cubic locates the roots; a final Newton polish runs on the
/// factored form, which stays fully conditioned for small `|B|` where the
/// expanded terms cancel.
pub fn critical_energies(alpha: f64, b: f64) -> Result<Vec<f64>> {
    if alpha == 0.0 {
        return Err(Error::UnphysicalLimit("A"));
    }
    let mut roots = real_cubic_roots(2.0, -4.0 * alpha, 2.0 * alpha * alpha, alpha * b);
    for e in &mut roots {
        for _ in 0..3 {
            let g = 2.0 * *e * (*e - alpha) * (*e - alpha) + alpha * b;
            let dg = 2.0 * (*e - alpha) * (3.0 * *e - alpha);
            if dg.abs() <= 1e-12 * (1.0 + alpha * alpha) {
                break; // coalescing pair; Newton would amplify noise
            }
            let step = g / dg;
            if !step.is_finite() || step.abs() <= f64::EPSILON * (1.0 + e.abs()) {
                break;
            }
            *e -= step;
        }
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(roots)
}

fn cubic_discriminant(a: f64, b: f64, c: f64, d: f64) -> f64 {
    18.0 * a * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * a * c * c * c
        - 27.0 * a * a * d * d
}

/// The negative `B` at which the two left-of-pole critical energies of
/// `C(E)` coalesce, found by bisecting the sign of the critical cubic's
/// discriminant over `B < 0`.
pub fn b_ep_of_c_branch(alpha: f64) -> Result<f64> {
    if alpha == 0.0 {
        return Err(Error::UnphysicalLimit("A"));
    }
    let a2 = alpha * alpha;
    let disc = |b: f64| cubic_discriminant(2.0, -4.0 * alpha, 2.0 * a2, alpha * b);
    // three real roots just below zero, one real far below
    let hi = -1e-14 * a2.max(1e-6);
    let mut lo = -0.5 * a2;
    let mut guard = 0;
    while disc(lo) > 0.0 {
        lo *= 2.0;
        guard += 1;
        if guard > 60 {
            return Err(Error::NonConvergence { iterations: guard, residual: disc(lo) });
        }
    }
    Ok(bisect(disc, lo, hi, 1e-12))
}

/// Per-branch analysis of the curve `C(E)` for `alpha > 0`.
///
/// `c_ep` is the level below which the bulk interval `(c_ep, inf)` loses
/// spectral reality. For `B` between `b_ep` and zero the curve also has a
/// local minimum/maximum pair left of the pole, bounding the anomalous
/// interval `(c_min, c_max)`; the unphysical band `(c_max, c_ep)` is the
/// gap. The `-alpha` branch is the `E -> -E` mirror image.
#[derive(Debug, Clone, Serialize)]
pub struct BranchProfile {
    pub alpha: f64,
    pub b: f64,
    /// first-order pole of the curve (equals `alpha`)
    pub pole: f64,
    /// real zeros of the curve, ascending (always includes `E = 0`)
    pub zeros: Vec<f64>,
    /// real critical energies, ascending
    pub critical_energies: Vec<f64>,
    pub c_ep: f64,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    /// coalescence threshold for the left-of-pole extrema (negative `B` only)
    pub b_ep: Option<f64>,
    pub refine_tol: f64,
}

pub fn c_branch_profile(alpha: f64, b: f64) -> Result<BranchProfile> {
    if alpha < 0.0 {
        return Err(Error::NegativeAlpha);
    }
    if alpha == 0.0 {
        return Err(Error::UnphysicalLimit("A"));
    }
    if b == 0.0 {
        return Err(Error::UnphysicalLimit("B"));
    }

    let crit = critical_energies(alpha, b)?;
    let mut zeros = vec![0.0];
    if let Some(z) = zeros_of_c(alpha, b) {
        zeros.extend_from_slice(&z);
    }
    zeros.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let c_at = |e: f64| c_of_e(e, b, alpha);

    let (c_ep, c_min, c_max) = if b > 0.0 {
        // single negative critical energy; bulk interval only
        let e_min = crit[0];
        (c_at(e_min)?, None, None)
    } else {
        // all critical energies positive; the largest sits right of the pole
        let right = crit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let left: Vec<f64> = crit.iter().copied().filter(|&e| e < alpha).collect();
        let c_ep = c_at(right)?;
        if left.len() == 2 {
            (c_ep, Some(c_at(left[0])?), Some(c_at(left[1])?))
        } else {
            (c_ep, None, None)
        }
    };

    let b_ep = if b < 0.0 { Some(b_ep_of_c_branch(alpha)?) } else { None };

    Ok(BranchProfile {
        alpha,
        b,
        pole: alpha,
        zeros,
        critical_energies: crit,
        c_ep,
        c_min,
        c_max,
        b_ep,
        refine_tol: REFINE_TOL,
    })
}

fn alpha_deriv(e: f64, b: f64, c: f64) -> f64 {
    let d = e * e - c;
    1.0 + b * (e * e + c) / (d * d)
}

fn alpha_deriv2(e: f64, b: f64, c: f64) -> f64 {
    let d = e * e - c;
    -2.0 * b * e * (e * e + 3.0 * c) / (d * d * d)
}

/// Located extremum of the curve `alpha(E)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AlphaExtremum {
    pub e: f64,
    pub alpha: f64,
}

/// Admissible inner-coupling intervals at fixed `(B, C)`.
///
/// Intervals are in `A`, ascending, with `f64::INFINITY` as an open upper
/// endpoint. `extra_extrema` flags curve shapes with more critical points
/// than the catalogued ones, which the interval logic does not cover.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaProfile {
    pub b: f64,
    pub c: f64,
    pub intervals: Vec<(f64, f64)>,
    pub gap: Option<(f64, f64)>,
    pub extrema: Vec<AlphaExtremum>,
    pub extra_extrema: bool,
    pub refine_tol: f64,
}

fn refine_alpha_extrema(b: f64, c: f64, lo: f64, hi: f64, step: f64) -> Vec<AlphaExtremum> {
    scan_sign_changes(|e| alpha_deriv(e, b, c), lo, hi, step)
        .into_iter()
        .map(|(x0, x1)| {
            let e = if x0 == x1 {
                x0
            } else {
                newton_bracketed(|e| alpha_deriv(e, b, c), |e| alpha_deriv2(e, b, c), x0, x1, REFINE_TOL)
            };
            AlphaExtremum { e, alpha: alpha_of_e(e, b, c).unwrap_or(f64::NAN) }
        })
        .collect()
}

/// Interval structure of the admissible `A` at fixed `(B, C)`.
pub fn alpha_profile(b: f64, c: f64) -> Result<AlphaProfile> {
    if b == 0.0 {
        return Err(Error::UnphysicalLimit("B"));
    }
    if c == 0.0 {
        return Err(Error::UnphysicalLimit("C"));
    }

    let mut profile = AlphaProfile {
        b,
        c,
        intervals: Vec::new(),
        gap: None,
        extrema: Vec::new(),
        extra_extrema: false,
        refine_tol: REFINE_TOL,
    };

    if c > 0.0 {
        if b > 0.0 {
            // every branch of alpha(E) rises through the whole axis, so each
            // of the lines +-sqrt(A) gets its three intersections
            profile.intervals.push((0.0, f64::INFINITY));
            return Ok(profile);
        }
        let gamma = c.sqrt();
        // robust minimum on the right outer branch
        let cap = gamma + 1.0 + (2.0 * b.abs()).sqrt();
        let right = refine_alpha_extrema(b, c, gamma + 1e-6, cap, 1e-3);
        if right.len() != 1 {
            profile.extra_extrema = true;
        }
        let alpha_min = right
            .first()
            .map(|x| x.alpha)
            .ok_or_else(|| Error::NonConvergence { iterations: 0, residual: f64::NAN })?;
        // mirror maximum on the left outer branch, located independently
        let left = refine_alpha_extrema(b, c, -cap, -gamma - 1e-6, 1e-3);
        if left.len() != 1 {
            profile.extra_extrema = true;
        }
        profile.extrema.extend(left.iter().copied());
        profile.extrema.extend(right.iter().copied());

        // inner extrema exist only for small |B|
        let inner_step = 1e-3f64.min(gamma / 64.0);
        let margin = (1e-9f64).min(gamma * 1e-6);
        let inner = refine_alpha_extrema(b, c, -gamma + margin, gamma - margin, inner_step);
        if inner.len() > 2 {
            profile.extra_extrema = true;
        }
        profile.extrema.extend(inner.iter().copied());

        let bulk = alpha_min * alpha_min;
        if inner.len() == 2 {
            let alpha_plus = inner.iter().map(|x| x.alpha).fold(f64::NEG_INFINITY, f64::max);
            let anomalous_hi = alpha_plus * alpha_plus;
            profile.intervals.push((0.0, anomalous_hi));
            profile.intervals.push((bulk, f64::INFINITY));
            profile.gap = Some((anomalous_hi, bulk));
        } else {
            profile.intervals.push((bulk, f64::INFINITY));
        }
        return Ok(profile);
    }

    // c < 0: no real poles; a detached piece appears once B exceeds |C|
    let m = -c;
    let em = m.sqrt();
    let step = 1e-3f64.min(em / 64.0);
    let inner = refine_alpha_extrema(b, c, 1e-9, em, step);
    if inner.len() > 1 {
        profile.extra_extrema = true;
    }
    if let Some(x) = inner.first() {
        let mirror = AlphaExtremum { e: -x.e, alpha: -x.alpha };
        profile.extrema.push(mirror);
        profile.extrema.push(*x);
        profile.intervals.push((0.0, x.alpha * x.alpha));
    }
    Ok(profile)
}

/// Spectral-reality threshold in `B` at fixed `(C, alpha)`.
///
/// For `C > 0` the whole half line `B > 0` is admissible, so the threshold
/// is zero. For `C < 0` it is the positive minimum of the U-shaped outer
/// part of `B(E)`, located by a bracketed Newton iteration on `B'(E)`.
/// `alpha = 0` returns the limiting value `-C`.
pub fn b_threshold(c: f64, alpha: f64) -> f64 {
    if c >= 0.0 {
        return 0.0;
    }
    let a = alpha.abs();
    if a == 0.0 {
        return -c;
    }
    // B'(E) = 0  <=>  2E^3 - a E^2 - a C = 0, one root on the U side (E < 0)
    let h = |e: f64| 2.0 * e * e * e - a * e * e - a * c;
    let dh = |e: f64| 6.0 * e * e - 2.0 * a * e;
    let mut lo = -1.0 - a - (a * c.abs()).cbrt();
    let mut guard = 0;
    while h(lo) > 0.0 {
        lo *= 2.0;
        guard += 1;
        if guard > 60 {
            return f64::NAN;
        }
    }
    let e_u = newton_bracketed(h, dh, lo, -1e-300, REFINE_TOL);
    (e_u - a) * (e_u * e_u - c) / e_u
}

/// All solutions of `alpha(E) = alpha0` at fixed `(B, C)` with `C > 0` and
/// `B > 0`, ascending: one root per branch of the curve.
pub fn alpha_curve_intersections(b: f64, c: f64, alpha0: f64) -> Result<Vec<f64>> {
    if b <= 0.0 || c <= 0.0 {
        return Err(Error::InvalidInput(
            "monotone three-branch intersection needs B > 0 and C > 0".into(),
        ));
    }
    let gamma = c.sqrt();
    let g = |e: f64| alpha_of_e(e, b, c).map(|v| v - alpha0);

    // each branch rises from -inf to +inf; walk in from the asymptotes
    // until the signs bracket the root
    let bracket = |lo: f64, hi: f64, lo_open: bool, hi_open: bool| -> Result<(f64, f64)> {
        let mut delta = 1e-3 * gamma.max(1.0);
        for _ in 0..60 {
            let lo_eff = if lo_open { lo + delta } else { lo };
            let hi_eff = if hi_open { hi - delta } else { hi };
            if lo_eff < hi_eff {
                if let (Ok(flo), Ok(fhi)) = (g(lo_eff), g(hi_eff)) {
                    if flo < 0.0 && fhi > 0.0 {
                        return Ok((lo_eff, hi_eff));
                    }
                }
            }
            if !lo_open && !hi_open {
                break;
            }
            delta *= 0.25;
        }
        Err(Error::NonConvergence { iterations: 60, residual: f64::NAN })
    };

    // outer brackets grow outward until the asymptote alpha ~ E dominates
    let reach = gamma + 1.0 + alpha0.abs() + b;
    let (lo, hi) = bracket(gamma, reach, true, false)?;
    let right = bisect(|e| g(e).unwrap_or(f64::NAN), lo, hi, REFINE_TOL);
    let (lo, hi) = bracket(-reach, -gamma, false, true)?;
    let left = bisect(|e| g(e).unwrap_or(f64::NAN), lo, hi, REFINE_TOL);
    let (lo, hi) = bracket(-gamma, gamma, true, true)?;
    let middle = bisect(|e| g(e).unwrap_or(f64::NAN), lo, hi, REFINE_TOL);

    Ok(vec![left, middle, right])
}

/// Samples `(E, C(E))`, skipping pole-adjacent points.
pub fn sample_c_curve(alpha: f64, b: f64, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    sample(lo, hi, step, |e| c_of_e(e, b, alpha))
}

/// Samples `(E, alpha(E))`, skipping pole-adjacent points.
pub fn sample_alpha_curve(b: f64, c: f64, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    sample(lo, hi, step, |e| alpha_of_e(e, b, c))
}

/// Samples `(E, B(E))`, skipping pole-adjacent points.
pub fn sample_b_curve(c: f64, alpha: f64, lo: f64, hi: f64, step: f64) -> Vec<(f64, f64)> {
    sample(lo, hi, step, |e| b_of_e(e, c, alpha))
}

fn sample<F: Fn(f64) -> Result<f64>>(lo: f64, hi: f64, step: f64, f: F) -> Vec<(f64, f64)> {
    assert!(step > 0.0);
    let n = ((hi - lo) / step).round() as usize;
    (0..=n)
        .filter_map(|i| {
            let e = lo + i as f64 * step;
            f(e).ok().map(|v| (e, v))
        })
        .collect()
}
