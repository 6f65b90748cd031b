//! Physical-domain membership, boundary tracing and transition kinds.
//!
//! A parameter point is physical when all six energies are real and simple.
//! The boundary consists of the coupling-zero planes `A = 0`, `B = 0`,
//! `C = 0` (level crossings that stay real) and the curved sheets where the
//! level pairs coalesce and complexify; both carry exceptional points. The
//! curved sheets come from the branch profiles in [`crate::boundary`], the
//! planes are emitted analytically.

use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::boundary::c_branch_profile;
use crate::model::ProductCouplings;
use crate::secular::{coefficients, spectrum, spectrum4, Classification, SpectrumResult};
use crate::solvers::{bisect, golden_min};
use crate::{Error, Result};

/// Default scan range in `C` for slices and plane sheets.
pub const C_SCAN: (f64, f64, f64) = (-1.0, 6.0, 1e-3);

const PLANE_SAMPLES: usize = 41;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Physical,
    Unphysical,
    Boundary,
}

/// Membership verdict with the spectral evidence it was based on.
#[derive(Debug, Clone, Serialize)]
pub struct DomainVerdict {
    pub verdict: Verdict,
    pub n_real: usize,
    pub min_s_separation: f64,
    pub min_abs_s: f64,
    pub tol: f64,
    /// exact coupling-zero planes are boundary sheets regardless of how the
    /// float spectrum resolves their degeneracy
    pub on_coordinate_plane: bool,
}

/// Classifies a point of the coupling-product space.
pub fn membership(p: &ProductCouplings, tol: f64) -> DomainVerdict {
    let r = spectrum(p, tol);
    let on_plane = p.a == 0.0 || p.b == 0.0 || p.c == 0.0;
    let verdict = if on_plane {
        Verdict::Boundary
    } else {
        match r.classification {
            Classification::AllReal => Verdict::Physical,
            Classification::Degenerate => Verdict::Boundary,
            Classification::Complexified => Verdict::Unphysical,
        }
    };
    DomainVerdict {
        verdict,
        n_real: r.n_real,
        min_s_separation: r.min_s_separation(),
        min_abs_s: r.min_abs_s(),
        tol,
        on_coordinate_plane: on_plane,
    }
}

fn verdict4(lambda: f64, a: f64, tol: f64) -> Verdict {
    match spectrum4(lambda, a, tol).classification {
        Classification::AllReal => Verdict::Physical,
        Classification::Degenerate => Verdict::Boundary,
        Classification::Complexified => Verdict::Unphysical,
    }
}

/// Physical set of `C` at fixed `(A, B)`, as disjoint open intervals.
///
/// An infinite upper endpoint is `f64::INFINITY` (serialized as `null`).
/// Note the plane `C = 0` may fall inside an interval; it is a crossing
/// sheet of its own and [`membership`] reports it as boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySlice {
    pub a: f64,
    pub b: f64,
    pub intervals: Vec<(f64, f64)>,
    pub gap: Option<(f64, f64)>,
    pub note: Option<&'static str>,
}

impl Serialize for BoundarySlice {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let n = if self.note.is_some() { 5 } else { 4 };
        let mut st = serializer.serialize_struct("BoundarySlice", n)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("intervals", &self.intervals)?;
        st.serialize_field("gap", &self.gap)?;
        if let Some(note) = self.note {
            st.serialize_field("note", note)?;
        }
        st.end()
    }
}

/// Assembles the physical `C`-intervals at fixed `(A, B)` from the branch
/// profile: the bulk `(c_ep, inf)` always, plus the anomalous
/// `(c_min, c_max)` with its gap when the profile carries one.
pub fn c_slice(a: f64, b: f64, tol: f64) -> Result<BoundarySlice> {
    if a <= 0.0 {
        return Ok(BoundarySlice {
            a,
            b,
            intervals: Vec::new(),
            gap: None,
            note: Some(if a == 0.0 {
                "A = 0 is a boundary plane; no open physical interval in C"
            } else {
                "A < 0 is unphysical for every C"
            }),
        });
    }
    let profile = c_branch_profile(a.sqrt(), b)?;
    let mut intervals = Vec::new();
    let mut gap = None;
    if let (Some(c_min), Some(c_max)) = (profile.c_min, profile.c_max) {
        if c_max - c_min > tol {
            intervals.push((c_min, c_max));
            gap = Some((c_max, profile.c_ep));
        }
    }
    intervals.push((profile.c_ep, f64::INFINITY));
    Ok(BoundarySlice { a, b, intervals, gap, note: None })
}

/// The unphysical `(c_max, c_ep)` band at fixed `(A, B)`, when present.
pub fn detect_gap(a: f64, b: f64) -> Option<(f64, f64)> {
    c_slice(a, b, crate::secular::DEFAULT_TOL).ok()?.gap
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SheetTag {
    CEp,
    CMin,
    CMax,
    PlaneA0,
    PlaneB0,
    PlaneC0,
}

impl SheetTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SheetTag::CEp => "c_ep",
            SheetTag::CMin => "c_min",
            SheetTag::CMax => "c_max",
            SheetTag::PlaneA0 => "plane_a0",
            SheetTag::PlaneB0 => "plane_b0",
            SheetTag::PlaneC0 => "plane_c0",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sheet: SheetTag,
}

/// Uniform closed range with positive step.
#[derive(Debug, Clone, Copy)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl RangeSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || hi < lo {
            return Err(Error::InvalidInput(format!("bad range {lo}:{hi}:{step}")));
        }
        Ok(Self { lo, hi, step })
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub a: RangeSpec,
    pub b: RangeSpec,
}

/// Boundary mesh: curved exceptional-point sheets on the `(A, B)` grid plus
/// the coarsely sampled coupling-zero planes.
#[derive(Debug, Clone)]
pub struct BoundaryMesh {
    pub curved: Vec<MeshPoint>,
    pub planes: Vec<MeshPoint>,
}

impl BoundaryMesh {
    /// CSV with header `A,B,C,sheet_tag`, 17 significant digits, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("A,B,C,sheet_tag\n");
        for p in self.curved.iter().chain(self.planes.iter()) {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{}\n", p.a, p.b, p.c, p.sheet.as_str()));
        }
        out
    }
}

// Squared separation of the closest pair of s-roots, negated on the
// complexified side. Linear in C through an exceptional point, so a secant
// iteration on it pins the coalescence down to the last ulp of C.
fn signed_coalescence_gap(a: f64, b: f64, c: f64) -> f64 {
    let roots = crate::secular::solve_s_cubic(&coefficients(&ProductCouplings::new(a, b, c)));
    let mut best = f64::INFINITY;
    let mut complexified = false;
    for i in 0..3 {
        for j in i + 1..3 {
            let d = (roots[i] - roots[j]).norm_sqr();
            if d < best {
                best = d;
                complexified = roots[i].im != 0.0 || roots[j].im != 0.0;
            }
        }
    }
    if complexified {
        -best
    } else {
        best
    }
}

/// Secant polish of a boundary `C`-value onto the coalescence of the two
/// nearest `s`-roots, so the emitted point is as degenerate as f64 allows.
fn polish_boundary_c(a: f64, b: f64, c_seed: f64) -> f64 {
    let g = |c: f64| signed_coalescence_gap(a, b, c);
    let g_seed = g(c_seed);
    if g_seed == 0.0 {
        return c_seed;
    }
    let mut x0 = c_seed;
    let mut g0 = g_seed;
    let mut x1 = c_seed + 1e-10 * (1.0 + c_seed.abs());
    let mut g1 = g(x1);
    let mut best = (g_seed.abs(), c_seed);
    for _ in 0..60 {
        if g1 == g0 {
            break;
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        if !x2.is_finite() || (x2 - x1).abs() > 0.1 * (1.0 + c_seed.abs()) {
            break;
        }
        x0 = x1;
        g0 = g1;
        x1 = x2;
        g1 = g(x1);
        if g1.abs() < best.0 {
            best = (g1.abs(), x1);
        }
        if g1 == 0.0 || (x1 - x0).abs() <= f64::EPSILON * (1.0 + x1.abs()) {
            break;
        }
    }
    best.1
}

/// Emits the boundary `C`-values over an `(A, B)` grid, tagged by which
/// interval endpoint they are, together with the analytic plane sheets.
/// Grid cells are evaluated in parallel; output order is grid order.
pub fn trace_boundary(grid: &GridSpec) -> Result<BoundaryMesh> {
    if grid.a.lo <= 0.0 {
        return Err(Error::InvalidInput(
            "the A range must stay positive; the A = 0 sheet is emitted analytically".into(),
        ));
    }
    let a_values = grid.a.values();
    let b_values = grid.b.values();

    let curved: Vec<MeshPoint> = a_values
        .par_iter()
        .map(|&a| {
            let mut points = Vec::new();
            for &b in &b_values {
                if b == 0.0 {
                    continue; // plane sheet
                }
                let profile = match c_branch_profile(a.sqrt(), b) {
                    Ok(p) => p,
                    Err(_) => continue,
                };
                points.push(MeshPoint { a, b, c: polish_boundary_c(a, b, profile.c_ep), sheet: SheetTag::CEp });
                if let (Some(lo), Some(hi)) = (profile.c_min, profile.c_max) {
                    points.push(MeshPoint { a, b, c: polish_boundary_c(a, b, lo), sheet: SheetTag::CMin });
                    points.push(MeshPoint { a, b, c: polish_boundary_c(a, b, hi), sheet: SheetTag::CMax });
                }
            }
            points
        })
        .reduce(Vec::new, |mut acc, mut v| {
            acc.append(&mut v);
            acc
        });

    let lin = |lo: f64, hi: f64| -> Vec<f64> {
        (0..PLANE_SAMPLES)
            .map(|i| lo + (hi - lo) * i as f64 / (PLANE_SAMPLES - 1) as f64)
            .collect()
    };
    let mut planes = Vec::new();
    for &b in &lin(grid.b.lo, grid.b.hi) {
        for &c in &lin(C_SCAN.0, C_SCAN.1) {
            planes.push(MeshPoint { a: 0.0, b, c, sheet: SheetTag::PlaneA0 });
        }
    }
    for &a in &lin(grid.a.lo, grid.a.hi) {
        for &c in &lin(C_SCAN.0, C_SCAN.1) {
            planes.push(MeshPoint { a, b: 0.0, c, sheet: SheetTag::PlaneB0 });
        }
    }
    for &a in &lin(grid.a.lo, grid.a.hi) {
        for &b in &lin(grid.b.lo, grid.b.hi) {
            planes.push(MeshPoint { a, b, c: 0.0, sheet: SheetTag::PlaneC0 });
        }
    }

    Ok(BoundaryMesh { curved, planes })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransitionKind {
    /// at least one level pair complexifies across the boundary
    FirstKind,
    /// levels cross but stay real on both sides
    SecondKind,
}

/// Which spectral family a transition report refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    #[serde(rename = "n6")]
    SixSite,
    #[serde(rename = "n4")]
    FourSite,
}

/// Two-sided evidence for a classified boundary crossing.
#[derive(Debug, Clone, Serialize)]
pub struct TransitionReport {
    pub family: Family,
    pub point: Vec<f64>,
    pub direction: Vec<f64>,
    pub kind: TransitionKind,
    pub eps: f64,
    pub tol: f64,
    pub below: SpectrumResult,
    pub above: SpectrumResult,
}

fn decide_kind(below: &SpectrumResult, above: &SpectrumResult) -> Result<TransitionKind> {
    use Classification::*;
    match (below.classification, above.classification) {
        (Complexified, AllReal) | (AllReal, Complexified) => Ok(TransitionKind::FirstKind),
        (AllReal, AllReal) => Ok(TransitionKind::SecondKind),
        (Complexified, Complexified) => Err(Error::InconclusiveCrossing(
            "both sides complexified; step along a direction that leaves the unphysical region or reduce eps".into(),
        )),
        _ => Err(Error::InconclusiveCrossing(
            "a side is still degenerate at this eps; adjust eps so both sides leave the boundary".into(),
        )),
    }
}

/// Classifies a boundary crossing of the six-site model at `p` along a
/// direction in `(A, B, C)`.
///
/// The precondition is that `p` itself sits on the boundary (a coalescence
/// within `tol` or a coupling-zero plane); the two-sided spectra then
/// witness either a complexification (first kind) or a degeneracy that
/// separates into real simple levels on both sides, i.e. an unavoided
/// crossing (second kind).
pub fn classify_transition(
    p: &ProductCouplings,
    direction: [f64; 3],
    eps: f64,
    tol: f64,
) -> Result<TransitionReport> {
    let norm = (direction[0].powi(2) + direction[1].powi(2) + direction[2].powi(2)).sqrt();
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("direction must be a nonzero vector".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let dir = [direction[0] / norm, direction[1] / norm, direction[2] / norm];
    let at = membership(p, tol);
    if at.verdict != Verdict::Boundary {
        return Err(Error::NotOnBoundary(at.verdict));
    }
    let minus = ProductCouplings::new(p.a - eps * dir[0], p.b - eps * dir[1], p.c - eps * dir[2]);
    let plus = ProductCouplings::new(p.a + eps * dir[0], p.b + eps * dir[1], p.c + eps * dir[2]);
    let below = spectrum(&minus, tol);
    let above = spectrum(&plus, tol);
    let kind = decide_kind(&below, &above)?;
    Ok(TransitionReport {
        family: Family::SixSite,
        point: vec![p.a, p.b, p.c],
        direction: dir.to_vec(),
        kind,
        eps,
        tol,
        below,
        above,
    })
}

/// Classifies a crossing of the four-site model in `lambda` at fixed `a`.
pub fn classify_transition4(lambda: f64, a: f64, eps: f64, tol: f64) -> Result<TransitionReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let at = verdict4(lambda, a, tol);
    if at != Verdict::Boundary {
        return Err(Error::NotOnBoundary(at));
    }
    let below = spectrum4(lambda - eps, a, tol);
    let above = spectrum4(lambda + eps, a, tol);
    let kind = decide_kind(&below, &above)?;
    Ok(TransitionReport {
        family: Family::FourSite,
        point: vec![lambda, a],
        direction: vec![1.0],
        kind,
        eps,
        tol,
        below,
        above,
    })
}

/// Detected physical set of a one-dimensional `lambda` scan of the
/// four-site model.
#[derive(Debug, Clone, Serialize)]
pub struct Lambda4Scan {
    pub a: f64,
    pub step: f64,
    /// maximal open physical intervals inside the scanned window, ascending
    pub intervals: Vec<(f64, f64)>,
    /// located boundary points (interval endpoints interior to the window)
    pub boundary_points: Vec<f64>,
}

/// Scans the four-site spectrum over `lambda in [lo, hi]` and refines every
/// interval endpoint: physical/unphysical flips by bisection, interior
/// punctures (crossings with real spectra on both sides) by minimising the
/// smallest `|s|`-root.
pub fn lambda_scan4(a: f64, lo: f64, hi: f64, step: f64, tol: f64) -> Result<Lambda4Scan> {
    if !(step > 0.0) || hi <= lo {
        return Err(Error::InvalidInput(format!("bad lambda range {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect();
    let verdicts: Vec<Verdict> = grid.iter().map(|&l| verdict4(l, a, tol)).collect();
    let min_abs_s: Vec<f64> = grid.iter().map(|&l| spectrum4(l, a, tol).min_abs_s()).collect();

    let mut boundary_points = Vec::new();

    // Complexification edges are sharp (the boundary-verdict band around
    // them is tol^2-thin), so the physicality predicate bisects cleanly
    // across them. A crossing that keeps the spectrum real shows up instead
    // as a boundary-verdict band of half-width ~sqrt(tol) (or as a bare dip
    // of min |s| when the grid steps over the band); those are pinned by
    // minimising min |s|. Walk the maximal non-physical runs and dispatch
    // on what they contain and touch.
    let is_physical = |l: f64| if verdict4(l, a, tol) == Verdict::Physical { 1.0 } else { -1.0 };
    let pin_crossing = |lo: f64, hi: f64, out: &mut Vec<f64>| {
        let (lmin, fmin) = golden_min(|l| spectrum4(l, a, tol).min_abs_s(), lo, hi, 1e-9);
        if fmin <= tol.max(1e-10) {
            out.push(lmin);
        }
    };
    let mut i = 0usize;
    while i <= n {
        if verdicts[i] != Verdict::Physical {
            let start = i;
            while i + 1 <= n && verdicts[i + 1] != Verdict::Physical {
                i += 1;
            }
            let end = i;
            let left_p = start > 0 && verdicts[start - 1] == Verdict::Physical;
            let right_p = end < n && verdicts[end + 1] == Verdict::Physical;
            let first_u = (start..=end).find(|&j| verdicts[j] == Verdict::Unphysical);
            match first_u {
                Some(fu) => {
                    let lu = (start..=end).rev().find(|&j| verdicts[j] == Verdict::Unphysical).unwrap();
                    if left_p {
                        boundary_points.push(bisect(is_physical, grid[start - 1], grid[fu], 1e-8));
                    }
                    if right_p {
                        boundary_points.push(bisect(is_physical, grid[lu], grid[end + 1], 1e-8));
                    }
                }
                None => {
                    if left_p && right_p {
                        pin_crossing(grid[start - 1], grid[end + 1], &mut boundary_points);
                    } else if left_p || right_p {
                        // boundary band abutting the unphysical region: the
                        // physical edge is the crossing
                        let lo = if start > 0 { grid[start - 1] } else { grid[start] };
                        let hi = if end < n { grid[end + 1] } else { grid[end] };
                        boundary_points.push(bisect(is_physical, lo, hi, 1e-8));
                    }
                }
            }
        }
        i += 1;
    }

    // dips that never drop a grid point onto the boundary band
    for i in 1..n {
        if verdicts[i - 1] == Verdict::Physical
            && verdicts[i] == Verdict::Physical
            && verdicts[i + 1] == Verdict::Physical
            && min_abs_s[i] <= min_abs_s[i - 1]
            && min_abs_s[i] <= min_abs_s[i + 1]
        {
            pin_crossing(grid[i - 1], grid[i + 1], &mut boundary_points);
        }
    }

    boundary_points.sort_by(|x, y| x.partial_cmp(y).unwrap());
    boundary_points.dedup_by(|x, y| (*x - *y).abs() < step);

    // assemble maximal physical intervals between consecutive cut points
    let mut cuts = vec![lo];
    cuts.extend(boundary_points.iter().copied());
    cuts.push(hi);
    let mut intervals = Vec::new();
    for w in cuts.windows(2) {
        let (l, r) = (w[0], w[1]);
        if r - l <= 2.0 * step {
            continue;
        }
        if verdict4(0.5 * (l + r), a, tol) == Verdict::Physical {
            intervals.push((l, r));
        }
    }
    Ok(Lambda4Scan { a, step, intervals, boundary_points })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    const TOL: f64 = 1e-10;

    #[test]
    fn membership_basics() {
        assert_eq!(membership(&ProductCouplings::new(1.0, 1.0, 1.0), TOL).verdict, Verdict::Physical);
        assert_eq!(membership(&ProductCouplings::new(-0.5, 1.0, 1.0), TOL).verdict, Verdict::Unphysical);
        assert_eq!(membership(&ProductCouplings::new(0.09, 0.1, 1.0), TOL).verdict, Verdict::Physical);
    }

    #[test]
    fn coordinate_planes_are_boundary() {
        for p in [
            ProductCouplings::new(0.0, 1.0, 1.0),
            ProductCouplings::new(1.0, 0.0, 1.0),
            ProductCouplings::new(1.0, 1.0, 0.0),
            ProductCouplings::new(0.0, 1.0, -5.0),
        ] {
            let v = membership(&p, TOL);
            assert_eq!(v.verdict, Verdict::Boundary, "{p:?}");
            assert!(v.on_coordinate_plane);
        }
    }

    #[test]
    fn slice_bulk_only() {
        let s = c_slice(1.0, 2.0, TOL).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!(close(s.intervals[0].0, -0.41858782039271004, 1e-10));
        assert_eq!(s.intervals[0].1, f64::INFINITY);
        assert!(s.gap.is_none());
    }

    #[test]
    fn slice_with_gap() {
        let s = c_slice(0.09, -0.01, TOL).unwrap();
        assert_eq!(s.intervals.len(), 2);
        let (g_lo, g_hi) = s.gap.unwrap();
        assert!(g_hi - g_lo > 0.0);
        assert!(close(g_lo, 0.020944550418422387, 1e-10));
        assert!(close(g_hi, 0.18937060617764869, 1e-10));

        // midpoints follow the physical / unphysical / physical pattern
        let mid = |i: usize| {
            let (lo, hi) = s.intervals[i];
            if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 }
        };
        let verdict_at = |c: f64| membership(&ProductCouplings::new(0.09, -0.01, c), TOL).verdict;
        assert_eq!(verdict_at(mid(0)), Verdict::Physical);
        assert_eq!(verdict_at(0.5 * (g_lo + g_hi)), Verdict::Unphysical);
        assert_eq!(verdict_at(mid(1)), Verdict::Physical);
    }

    #[test]
    fn slice_below_threshold_single_interval() {
        let s = c_slice(1.0, -0.5, TOL).unwrap();
        assert_eq!(s.intervals.len(), 1);
        assert!(s.gap.is_none());
    }

    #[test]
    fn slice_nonpositive_a() {
        let s = c_slice(0.0, 1.0, TOL).unwrap();
        assert!(s.intervals.is_empty());
        assert!(s.note.is_some());
        let s = c_slice(-1.0, 1.0, TOL).unwrap();
        assert!(s.intervals.is_empty());
    }

    #[test]
    fn slice_json_schema() {
        let s = c_slice(1.0, 2.0, TOL).unwrap();
        let json = serde_json::to_value(&s).unwrap();
        assert_eq!(json["a"], 1.0);
        assert!(json["gap"].is_null());
        // infinite endpoint serializes as null
        assert!(json["intervals"][0][1].is_null());
        assert!(json.get("note").is_none());
    }

    #[test]
    fn gap_detection() {
        assert!(detect_gap(1.0, 2.0).is_none());
        let (lo, hi) = detect_gap(0.09, -0.01).unwrap();
        assert!(hi > lo);
        assert!(detect_gap(1.0, -5.0).is_none());
    }

    #[test]
    fn trace_single_cell() {
        let grid = GridSpec {
            a: RangeSpec::new(1.0, 1.0, 1.0).unwrap(),
            b: RangeSpec::new(2.0, 2.0, 1.0).unwrap(),
        };
        let mesh = trace_boundary(&grid).unwrap();
        assert_eq!(mesh.curved.len(), 1);
        let p = mesh.curved[0];
        assert_eq!(p.sheet, SheetTag::CEp);
        assert!(close(p.c, -0.41858782039271004, 1e-9));
        // the emitted point is on the boundary
        let v = membership(&ProductCouplings::new(p.a, p.b, p.c), 1e-8);
        assert_eq!(v.verdict, Verdict::Boundary, "sep {}", v.min_s_separation);
    }

    #[test]
    fn trace_sheet_counts() {
        // positive-b rows give one sheet per cell
        let grid = GridSpec {
            a: RangeSpec::new(0.5, 1.0, 0.25).unwrap(),
            b: RangeSpec::new(0.5, 2.0, 0.5).unwrap(),
        };
        let mesh = trace_boundary(&grid).unwrap();
        assert_eq!(mesh.curved.len(), 3 * 4);
        assert!(mesh.curved.iter().all(|p| p.sheet == SheetTag::CEp));

        // rows inside (b_ep, 0) add the anomalous pair
        let grid = GridSpec {
            a: RangeSpec::new(1.0, 1.0, 1.0).unwrap(),
            b: RangeSpec::new(-0.1, -0.1, 1.0).unwrap(),
        };
        let mesh = trace_boundary(&grid).unwrap();
        let tags: Vec<SheetTag> = mesh.curved.iter().map(|p| p.sheet).collect();
        assert!(tags.contains(&SheetTag::CEp));
        assert!(tags.contains(&SheetTag::CMin));
        assert!(tags.contains(&SheetTag::CMax));
    }

    #[test]
    fn trace_rejects_nonpositive_a_range() {
        let grid = GridSpec {
            a: RangeSpec::new(0.0, 1.0, 0.5).unwrap(),
            b: RangeSpec::new(1.0, 1.0, 1.0).unwrap(),
        };
        assert!(trace_boundary(&grid).is_err());
    }

    #[test]
    fn mesh_csv_format() {
        let grid = GridSpec {
            a: RangeSpec::new(1.0, 1.0, 1.0).unwrap(),
            b: RangeSpec::new(2.0, 2.0, 1.0).unwrap(),
        };
        let mesh = trace_boundary(&grid).unwrap();
        let csv = mesh.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "A,B,C,sheet_tag");
        let first = lines.next().unwrap();
        assert!(first.ends_with(",c_ep"));
        assert!(!csv.contains('\r'));
        // plane sheets present
        assert!(csv.contains("plane_a0"));
        assert!(csv.contains("plane_b0"));
        assert!(csv.contains("plane_c0"));
    }

    #[test]
    fn transition_first_kind_on_inner_plane() {
        let r = classify_transition(&ProductCouplings::new(0.0, 1.0, 1.0), [1.0, 0.0, 0.0], 1e-4, TOL).unwrap();
        assert_eq!(r.kind, TransitionKind::FirstKind);
        assert_eq!(r.below.classification, Classification::Complexified);
        assert_eq!(r.above.classification, Classification::AllReal);
        // halving eps keeps the verdict
        let r2 = classify_transition(&ProductCouplings::new(0.0, 1.0, 1.0), [1.0, 0.0, 0.0], 5e-5, TOL).unwrap();
        assert_eq!(r2.kind, r.kind);
    }

    #[test]
    fn transition_second_kind_on_outer_plane() {
        // crossing C = 0 inside the anomalous interval keeps the spectrum real
        let r = classify_transition(&ProductCouplings::new(0.09, -0.01, 0.0), [0.0, 0.0, 1.0], 1e-4, TOL).unwrap();
        assert_eq!(r.kind, TransitionKind::SecondKind);
        // crossing B = 0 at positive products is an unavoided double crossing
        let r = classify_transition(&ProductCouplings::new(1.0, 0.0, 4.0), [0.0, 1.0, 0.0], 1e-4, TOL).unwrap();
        assert_eq!(r.kind, TransitionKind::SecondKind);
    }

    #[test]
    fn transition_first_kind_on_curved_sheet() {
        // the bulk edge at (A, B) = (1, 2) complexifies below c_ep
        let c_ep = -0.41858782039271004;
        let r = classify_transition(&ProductCouplings::new(1.0, 2.0, c_ep), [0.0, 0.0, 1.0], 1e-4, 1e-6).unwrap();
        assert_eq!(r.kind, TransitionKind::FirstKind);
    }

    #[test]
    fn transition_preconditions_and_errors() {
        let err = classify_transition(&ProductCouplings::new(1.0, 1.0, 1.0), [1.0, 0.0, 0.0], 1e-4, TOL);
        assert!(matches!(err, Err(Error::NotOnBoundary(Verdict::Physical))));

        let err = classify_transition(&ProductCouplings::new(0.0, 1.0, 1.0), [0.0, 0.0, 0.0], 1e-4, TOL);
        assert!(matches!(err, Err(Error::InvalidInput(_))));

        // stepping along the boundary plane keeps both sides degenerate
        let err = classify_transition(&ProductCouplings::new(0.0, 1.0, 1.0), [0.0, 1.0, 0.0], 1e-4, TOL);
        assert!(matches!(err, Err(Error::InconclusiveCrossing(_))));
    }

    #[test]
    fn four_site_transitions() {
        for a in [0.5, 1.0, 2.0] {
            let r = classify_transition4(0.0, a, 1e-4, TOL).unwrap();
            assert_eq!(r.kind, TransitionKind::SecondKind, "a={a}");
            let r = classify_transition4(-a / 4.0, a, 1e-4, TOL).unwrap();
            assert_eq!(r.kind, TransitionKind::FirstKind, "a={a}");
            // halving eps is stable
            assert_eq!(classify_transition4(0.0, a, 5e-5, TOL).unwrap().kind, TransitionKind::SecondKind);
            assert_eq!(classify_transition4(-a / 4.0, a, 5e-5, TOL).unwrap().kind, TransitionKind::FirstKind);
        }
    }

    #[test]
    fn four_site_scan_recovers_punctured_interval() {
        let a = 1.0;
        let scan = lambda_scan4(a, -0.5, 0.5, 1e-3, TOL).unwrap();
        assert_eq!(scan.intervals.len(), 2, "{:?}", scan.intervals);
        let expected_left = -a / 4.0;
        assert!(close(scan.intervals[0].0, expected_left, 1e-6));
        assert!(close(scan.intervals[0].1, 0.0, 1e-6));
        assert!(close(scan.intervals[1].0, 0.0, 1e-6));
        assert!(close(scan.intervals[1].1, 0.5, 1e-9));
        assert!(scan.boundary_points.iter().any(|&l| close(l, expected_left, 1e-6)));
        assert!(scan.boundary_points.iter().any(|&l| close(l, 0.0, 1e-6)));
    }
}
