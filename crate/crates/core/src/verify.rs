//! Numerical checks of the sign inequalities behind uniqueness: the segment integral
//! `F`, its transformed form, boundary-curve integrals of planar parallel bodies, and
//! the signs of the diagonal second derivatives.

use crate::constants::{a0, f_const, psi};
use crate::error::{Error, Result};
use crate::geometry::{BodySpec, ConvexBody};
use crate::potential::{hessian_diag, Evaluation, Kernel, PotentialParams};
use crate::quadrature::{integrate, low_discrepancy};
use crate::report::{params, sign_case, CaseResult, LemmaId, LemmaReport, Verdict, SIGN_SAFETY};
use crate::real::Real;
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Tolerance of the one-dimensional integrals in this module.
pub const VERIFY_TOL: f64 = 1e-10;
/// Relative agreement required between `F` and its rescaled transformed form.
pub const CHANGE_OF_VARIABLES_TOL: f64 = 1e-8;

/// Integrates with a tolerance relative to the size of the result: a first pass finds
/// the magnitude, the second integrates the rescaled function.
fn integrate_relative<T: Real>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> Result<Evaluation<T>> {
    let rough = integrate(&f, a, b, T::lit(1e-6));
    let scale = rough.value.abs().max(T::min_positive_value().sqrt());
    let r = integrate(|x| f(x) / scale, a, b, tol);
    if !r.converged || !r.value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            value: (r.value * scale).to_f64_lossy(),
            error: (r.error * scale).to_f64_lossy(),
            intervals: r.intervals,
        });
    }
    Ok(Evaluation {
        value: r.value * scale,
        error: r.error * scale,
    })
}

/// Integrand of `F` in the variable `y2 in [0, 1]`.
pub fn f_integrand<T: Real>(n: usize, alpha: T, a: T, xi: T, y2: T) -> T {
    let nf = T::from_count(n);
    let y1 = a * (T::one() - y2);
    let d2 = (y1 - xi) * (y1 - xi) + y2 * y2;
    d2.powf((alpha - nf) / T::lit(2.0) - T::one()) * (xi - y1) * y2.powi(n as i32 - 2)
}

fn check_f_domain<T: Real>(n: usize, alpha: T, a: T, xi: T) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("F needs n >= 2, got {n}")));
    }
    if !(a > T::zero()) || !a.is_finite() {
        return Err(Error::Domain(format!("F needs a > 0, got {a}")));
    }
    if !(xi >= T::zero() && xi < a) {
        return Err(Error::Domain(format!("F needs 0 <= xi < a, got xi = {xi}, a = {a}")));
    }
    if !alpha.is_finite() {
        return Err(Error::Domain("alpha must be finite".into()));
    }
    Ok(())
}

/// `F(n, alpha, a, xi)`: the integral of `|x-y|^{alpha-n-2} (xi - y1) y2^{n-2} dy2` along
/// the segment from `(a, 0)` to `(0, 1)`, with `x = (xi, 0)`.
pub fn f_integral<T: Real>(n: usize, alpha: T, a: T, xi: T) -> Result<Evaluation<T>> {
    check_f_domain(n, alpha, a, xi)?;
    // Integrated in `y1 = a(1 - y2)`: the integrand varies on a unit scale around
    // `y1 = xi`, a layer of width `1/a` in `y2` that `y2` nodes cannot place accurately.
    let mut cuts = vec![T::zero(), a, xi];
    let mut s = T::lit(0.0625);
    while s < a {
        cuts.push(xi + s);
        cuts.push(xi - s);
        s = s + s;
    }
    cuts.retain(|&y| y >= T::zero() && y <= a);
    cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite cuts"));
    cuts.dedup_by(|p, q| *p - *q <= T::epsilon() * p.abs().max(T::one()));
    let nf = T::from_count(n);
    let g = |y1: T| {
        let y2 = (a - y1) / a;
        let d2 = (y1 - xi) * (y1 - xi) + y2 * y2;
        d2.powf((alpha - nf) / T::lit(2.0) - T::one()) * (xi - y1) * y2.powi(n as i32 - 2) / a
    };
    let mut total = Evaluation {
        value: T::zero(),
        error: T::zero(),
    };
    for w in cuts.windows(2) {
        let e = integrate_relative(g, w[0], w[1], T::lit(VERIFY_TOL))?;
        total.value = total.value + e.value;
        total.error = total.error + e.error;
    }
    Ok(total)
}

/// Integrand `(t - 1/a)(t + a)^{n-2} / (t^2 + 1)^{(n+2-alpha)/2}`.
pub fn transformed_integrand<T: Real>(n: usize, alpha: T, a: T, t: T) -> T {
    let e = (T::from_count(n + 2) - alpha) / T::lit(2.0);
    (t - T::one() / a) * (t + a).powi(n as i32 - 2) / (t * t + T::one()).powf(e)
}

/// Integral of [`transformed_integrand`] over `[-a, c]`.
pub fn transformed_integral<T: Real>(n: usize, alpha: T, a: T, c: T) -> Result<Evaluation<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("n must be at least 2, got {n}")));
    }
    if !(a > T::zero()) || !(c > -a) || !c.is_finite() || !alpha.is_finite() {
        return Err(Error::Domain(format!("need a > 0 and c > -a, got a = {a}, c = {c}")));
    }
    let mut cuts = vec![-a, c, T::zero(), T::one() / a];
    let mut s = T::lit(0.0625);
    while s < a.max(c.abs()) {
        cuts.push(s);
        cuts.push(-s);
        s = s + s;
    }
    cuts.retain(|&t| t >= -a && t <= c);
    cuts.sort_by(|p, q| p.partial_cmp(q).expect("finite cuts"));
    cuts.dedup_by(|p, q| *p - *q <= T::epsilon() * p.abs().max(T::one()));
    let mut total = Evaluation {
        value: T::zero(),
        error: T::zero(),
    };
    for w in cuts.windows(2) {
        let e = integrate_relative(|t| transformed_integrand(n, alpha, a, t), w[0], w[1], T::lit(VERIFY_TOL))?;
        total.value = total.value + e.value;
        total.error = total.error + e.error;
    }
    Ok(total)
}

/// Substitution data linking `F` to the transformed integral: `y2 = k (t + a)` with
/// `k = (a - xi)/(1 + a^2)` gives `F = J * T(c)` where
/// `J = a k^{alpha-2} (1 + a^2)^{(alpha-n-2)/2}` and `c = (a xi + 1)/(a - xi)`.
pub fn substitution<T: Real>(n: usize, alpha: T, a: T, xi: T) -> (T, T) {
    let k = (a - xi) / (T::one() + a * a);
    let jac = a * k.powf(alpha - T::lit(2.0))
        * (T::one() + a * a).powf((alpha - T::from_count(n) - T::lit(2.0)) / T::lit(2.0));
    let c = (a * xi + T::one()) / (a - xi);
    (jac, c)
}

/// Compares `F(n, alpha, a, xi)` with the rescaled transformed integral.
pub fn change_of_variables_check<T: Real>(n: usize, alpha: T, a: T, xi: T) -> Result<LemmaReport<T>> {
    check_f_domain(n, alpha, a, xi)?;
    let f = f_integral(n, alpha, a, xi)?;
    let (jac, c) = substitution(n, alpha, a, xi);
    let t = transformed_integral(n, alpha, a, c)?;
    let scaled = Evaluation {
        value: jac * t.value,
        error: jac * t.error,
    };
    let nf = T::from_count(n);
    let base = params(&[("n", nf), ("alpha", alpha), ("a", a), ("xi", xi), ("c", c), ("jacobian", jac)]);
    let sign_of = |v: T| if v > T::zero() { 1 } else { -1 };
    let mut cases = vec![
        sign_case(params(&[("side", T::zero())]), f.value, f.error, sign_of(scaled.value), true),
        sign_case(params(&[("side", T::one())]), scaled.value, scaled.error, sign_of(f.value), true),
    ];
    let diff = (f.value - scaled.value).abs();
    let allowed = T::lit(CHANGE_OF_VARIABLES_TOL) * f.value.abs() + f.error + scaled.error;
    let rel = diff / f.value.abs().max(T::min_positive_value());
    cases.push(CaseResult {
        params: params(&[("side", T::lit(2.0))]),
        value: rel,
        error: (f.error + scaled.error) / f.value.abs().max(T::min_positive_value()),
        verdict: if diff <= allowed { Verdict::Pass } else { Verdict::Fail },
        margin: allowed - diff,
        in_hypothesis: true,
    });
    Ok(LemmaReport::from_cases(LemmaId::ChangeOfVariables, base, cases))
}

/// Parameter grid for the planar segment check.
#[derive(Clone, Debug)]
pub struct PlanarGrid<T> {
    pub alphas: Vec<T>,
    pub a_values: Vec<T>,
    /// Fractions of `a` used as `xi`.
    pub xi_fractions: Vec<T>,
}

impl<T: Real> Default for PlanarGrid<T> {
    fn default() -> Self {
        Self {
            alphas: [1.1, 1.5, 2.0, 2.5, 2.9].map(T::lit).to_vec(),
            a_values: [0.5, 1.0, 2.0, 5.0].map(T::lit).to_vec(),
            xi_fractions: [0.0, 0.25, 0.5].map(T::lit).to_vec(),
        }
    }
}

/// `F(2, alpha, a, xi) < 0` for `1 < alpha < 3`, `0 <= xi <= a/2`.
pub fn verify_lemma32<T: Real>(grid: &PlanarGrid<T>) -> Result<LemmaReport<T>> {
    let mut tuples = Vec::new();
    for &alpha in &grid.alphas {
        for &a in &grid.a_values {
            for &fr in &grid.xi_fractions {
                tuples.push((alpha, a, fr * a, fr));
            }
        }
    }
    let cases: Result<Vec<_>> = tuples
        .par_iter()
        .map(|&(alpha, a, xi, fr)| {
            let v = f_integral(2, alpha, a, xi)?;
            let hyp = alpha > T::one() && alpha < T::lit(3.0) && fr >= T::zero() && fr <= T::lit(0.5);
            Ok(sign_case(params(&[("alpha", alpha), ("a", a), ("xi", xi)]), v.value, v.error, -1, hyp))
        })
        .collect();
    Ok(LemmaReport::from_cases(LemmaId::PlanarSegment, BTreeMap::new(), cases?))
}

/// One instance `(n, alpha, c)` of the transformed-integral check.
#[derive(Clone, Copy, Debug)]
pub struct TransformedCase<T> {
    pub n: usize,
    pub alpha: T,
    pub c: T,
}

/// `n in {3, 4}`, `alpha in {n+0.25, n+0.5, n+0.9, 1.5, 2.5}`, `c in {0.5, 1, 2}`.
pub fn default_transformed_cases<T: Real>() -> Vec<TransformedCase<T>> {
    let mut out = Vec::new();
    for n in [3usize, 4] {
        let nf = n as f64;
        for alpha in [nf + 0.25, nf + 0.5, nf + 0.9, 1.5, 2.5] {
            if alpha >= nf + 1.0 {
                continue;
            }
            for c in [0.5, 1.0, 2.0] {
                out.push(TransformedCase {
                    n,
                    alpha: T::lit(alpha),
                    c: T::lit(c),
                });
            }
        }
    }
    out
}

/// Transformed integral at `a = psi_alpha(c) c` is negative.
pub fn verify_lemma33<T: Real>(cases: &[TransformedCase<T>]) -> Result<LemmaReport<T>> {
    let out: Result<Vec<_>> = cases
        .par_iter()
        .map(|tc| {
            let a = psi(tc.n, tc.alpha, tc.c)? * tc.c;
            let v = transformed_integral(tc.n, tc.alpha, a, tc.c)?;
            let p = params(&[("n", T::from_count(tc.n)), ("alpha", tc.alpha), ("c", tc.c), ("a", a)]);
            Ok(sign_case(p, v.value, v.error, -1, true))
        })
        .collect();
    Ok(LemmaReport::from_cases(LemmaId::TransformedIntegral, BTreeMap::new(), out?))
}

/// One instance of the threshold check: `F(n, alpha, a0(xi0), xi)`.
#[derive(Clone, Copy, Debug)]
pub struct ThresholdCase<T> {
    pub n: usize,
    pub alpha: T,
    pub xi0: T,
    pub xi: T,
}

/// `n in {3, 4}`, `alpha in {1.5, n-0.5, n+0.5}`, `xi0 = 1`, `xi in {0, 0.5, 1}`.
pub fn default_threshold_cases<T: Real>() -> Vec<ThresholdCase<T>> {
    let mut out = Vec::new();
    for n in [3usize, 4] {
        let nf = n as f64;
        for alpha in [1.5, nf - 0.5, nf + 0.5] {
            for xi in [0.0, 0.5, 1.0] {
                out.push(ThresholdCase {
                    n,
                    alpha: T::lit(alpha),
                    xi0: T::one(),
                    xi: T::lit(xi),
                });
            }
        }
    }
    out
}

/// `F(n, alpha, a0(xi0), xi) < 0` for `0 <= xi <= xi0`.
pub fn verify_cor34<T: Real>(cases: &[ThresholdCase<T>]) -> Result<LemmaReport<T>> {
    let out: Result<Vec<_>> = cases
        .par_iter()
        .map(|tc| {
            let a = a0(tc.n, tc.alpha, tc.xi0)?;
            let v = f_integral(tc.n, tc.alpha, a, tc.xi)?;
            let p = params(&[
                ("n", T::from_count(tc.n)),
                ("alpha", tc.alpha),
                ("xi0", tc.xi0),
                ("xi", tc.xi),
                ("a", a),
            ]);
            let hyp = tc.xi >= T::zero() && tc.xi <= tc.xi0;
            Ok(sign_case(p, v.value, v.error, -1, hyp))
        })
        .collect();
    Ok(LemmaReport::from_cases(LemmaId::SegmentThreshold, BTreeMap::new(), out?))
}

/// `int |x-y|^{alpha-m-2} (xi - y1) y2^{m-2} dy2` along the part of the boundary of a
/// planar body above the first axis, for `x = (xi, 0)`, oriented counterclockwise.
pub fn section_curve_integral<T: Real>(
    body: &ConvexBody<T>,
    m: usize,
    alpha: T,
    x: &[T],
    tol: T,
) -> Result<Evaluation<T>> {
    if body.dim() != 2 {
        return Err(Error::Domain("section curves need a planar body".into()));
    }
    if m < 2 {
        return Err(Error::Domain(format!("kernel dimension must be at least 2, got {m}")));
    }
    body.require_interior(x)?;
    let e = [T::one(), T::zero()];
    let g = [T::zero(), T::one()];
    let mf = T::from_count(m);
    let failed = std::cell::Cell::new(false);
    let f = |phi: T| {
        let Some(sp) = body.section_point_unchecked(x, &e, &g, phi) else {
            failed.set(true);
            return T::zero();
        };
        let (s, c) = phi.sin_cos();
        let r = sp.r;
        let y2 = r * s;
        let dy2 = sp.dr * s + r * c;
        r.powf(alpha - mf - T::lit(2.0)) * (-r * c) * y2.powi(m as i32 - 2) * dy2
    };
    let v = integrate_relative(f, T::zero(), T::PI(), tol)?;
    if failed.get() {
        return Err(Error::Domain("ray cast failed".into()));
    }
    Ok(v)
}

/// Closed form of [`section_curve_integral`] for a disk of radius `delta` centered at
/// `x`: `-delta^{alpha-2} I_{m-2} / m` with `I_k = int_0^pi sin^k`.
pub fn semicircle_integral<T: Real>(m: usize, alpha: T, delta: T) -> T {
    -delta.powf(alpha - T::lit(2.0)) * crate::quadrature::sine_power_integral::<T>(m - 2)
        / T::from_count(m)
}

/// Boundary-curve integral of a planar parallel body is negative for `x` on the
/// core's intersection with the first axis, once `delta >= f(alpha) diam(core)`.
/// Instances below the threshold are evaluated and flagged but not asserted.
pub fn verify_keylemma2<T: Real>(
    spec: &BodySpec<T>,
    m: usize,
    alpha: T,
    x: &[T],
) -> Result<LemmaReport<T>> {
    if spec.dimension != 2 {
        return Err(Error::Domain("the section-curve check needs a planar body".into()));
    }
    let body = ConvexBody::new(spec.clone())?;
    if x.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: x.len(),
        });
    }
    let tol_axis = T::lit(1e-12) * body.scale();
    if x[1].abs() > tol_axis {
        return Err(Error::Domain("x must lie on the first axis".into()));
    }
    let mf = T::from_count(m);
    let in_alpha = alpha > T::one() && alpha < mf + T::one();
    let threshold = if in_alpha {
        f_const(m, alpha)? * body.diameter_core()
    } else {
        T::infinity()
    };
    let on_core = body.dist_to_core(x) <= tol_axis;
    let hyp = in_alpha && body.delta() >= threshold && on_core;
    let v = section_curve_integral(&body, m, alpha, x, T::lit(VERIFY_TOL))?;
    let p = params(&[
        ("m", mf),
        ("alpha", alpha),
        ("delta", body.delta()),
        ("diameter", body.diameter_core()),
        ("threshold", threshold),
        ("xi", x[0]),
    ]);
    let case = sign_case(p.clone(), v.value, v.error, -1, hyp);
    Ok(LemmaReport::from_cases(LemmaId::SectionCurve, p, vec![case]))
}

/// Expected sign of every second derivative: negative for `alpha < n` and in log mode,
/// positive for `alpha > n`.
pub fn expected_hessian_sign<T: Real>(n: usize, kernel: Kernel<T>) -> i8 {
    match kernel {
        Kernel::Log => -1,
        Kernel::Riesz(a) if a < T::from_count(n) => -1,
        Kernel::Riesz(_) => 1,
    }
}

/// Up to `count` points of the core hull: the point itself for a single vertex, evenly
/// spaced points on a segment, and otherwise the vertices followed by low-discrepancy
/// convex combinations.
pub fn core_sample_points<T: Real>(vertices: &[Vec<T>], count: usize) -> Vec<Vec<T>> {
    match vertices.len() {
        0 => Vec::new(),
        1 => vec![vertices[0].clone()],
        2 => {
            let k = count.max(2);
            (0..k)
                .map(|i| {
                    let t = T::from_count(i) / T::from_count(k - 1);
                    vertices[0]
                        .iter()
                        .zip(&vertices[1])
                        .map(|(&a, &b)| a + t * (b - a))
                        .collect()
                })
                .collect()
        }
        m => {
            let mut out: Vec<Vec<T>> = vertices.iter().take(count).cloned().collect();
            let extra = count.saturating_sub(out.len());
            for u in low_discrepancy(m, extra, 0.5) {
                let w: Vec<f64> = u.iter().map(|&x| -(1.0 - x).ln()).collect();
                let total: f64 = w.iter().sum();
                let n = vertices[0].len();
                let mut p = vec![T::zero(); n];
                for (wi, v) in w.iter().zip(vertices) {
                    let c = T::lit(wi / total);
                    for (pk, &vk) in p.iter_mut().zip(v) {
                        *pk = *pk + c * vk;
                    }
                }
                out.push(p);
            }
            out
        }
    }
}

/// Signs of `d^2 V / dx_j^2` at each sample point and axis.
pub fn verify_hessian_signs<T: Real>(
    body: &ConvexBody<T>,
    params_in: &PotentialParams<T>,
    points: &[Vec<T>],
) -> Result<LemmaReport<T>> {
    let n = body.dim();
    let nf = T::from_count(n);
    let alpha = params_in.alpha_or(n);
    let in_alpha = alpha > T::one() && alpha < nf + T::one();
    let threshold = if in_alpha {
        f_const(n, alpha)? * body.diameter_core()
    } else {
        T::infinity()
    };
    let sign = expected_hessian_sign(n, params_in.kernel);
    let tol_core = T::lit(1e-9) * body.scale();
    let mut jobs = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for j in 0..n {
            jobs.push((i, j, p));
        }
    }
    let cases: Result<Vec<CaseResult<T>>> = jobs
        .par_iter()
        .map(|&(i, j, p)| {
            let h = hessian_diag(body, p, j, params_in)?;
            let on_core = body.dist_to_core(p) <= tol_core;
            let hyp = in_alpha && body.delta() >= threshold && on_core;
            let mut pm = params(&[("point", T::from_count(i)), ("axis", T::from_count(j))]);
            for (k, &c) in p.iter().enumerate() {
                pm.insert(format!("x{k}"), c);
            }
            Ok(sign_case(pm, h.value, h.error, sign, hyp))
        })
        .collect();
    let mut global = params(&[
        ("n", nf),
        ("alpha", alpha),
        ("delta", body.delta()),
        ("diameter", body.diameter_core()),
        ("threshold", threshold),
    ]);
    global.insert("log_mode".into(), if params_in.is_log() { T::one() } else { T::zero() });
    Ok(LemmaReport::from_cases(LemmaId::HessianSigns, global, cases?))
}

/// Midpoint-rule value of `F` with `nodes` cells, used as an independent reference.
pub fn f_midpoint<T: Real>(n: usize, alpha: T, a: T, xi: T, nodes: usize) -> T {
    let h = T::one() / T::from_count(nodes);
    let mut s = T::zero();
    for i in 0..nodes {
        let y = (T::from_count(i) + T::lit(0.5)) * h;
        s = s + f_integrand(n, alpha, a, xi, y);
    }
    s * h
}

/// Smallest `|value| / error` among asserted cases; useful when tuning tolerances.
pub fn safety_ratio<T: Real>(report: &LemmaReport<T>) -> T {
    report
        .cases
        .iter()
        .filter(|c| c.in_hypothesis && c.error > T::zero())
        .map(|c| c.value.abs() / c.error)
        .fold(T::infinity(), T::min)
        / T::lit(SIGN_SAFETY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_examples() {
        for (n, alpha, a) in [(2usize, 1.5f64, 1.0), (3, 2.0, 4.0), (4, 4.5, 0.3)] {
            assert!(f_integral(n, alpha, a, 0.0).unwrap().value < 0.0);
        }
        let v = f_integral(2, 2.0f64, 2.0, 1.0).unwrap();
        assert!(v.value < 0.0);
        let mid = f_midpoint(2, 2.0, 2.0, 1.0, 1_000_000);
        assert!((v.value - mid).abs() < 1e-6 * mid.abs());
        let a = a0(3, 3.5, 1.0).unwrap();
        assert!(f_integral(3, 3.5, a, 1.0).unwrap().value < 0.0);
        assert!(f_integral(2, 2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn transformed_examples() {
        let a = 3.0;
        assert!(transformed_integral(3, 2.0, a, 0.2).unwrap().value < 0.0);
        let a = psi(3, 2.0, 1.0).unwrap();
        assert!(transformed_integral(3, 2.0, a, 1.0).unwrap().value < 0.0);
        let a = psi(4, 3.0, 2.0).unwrap() * 2.0;
        assert!(transformed_integral(4, 3.0, a, 2.0).unwrap().value < 0.0);
    }

    #[test]
    fn substitution_examples() {
        for (n, alpha, a, xi) in [(2usize, 2.0, 2.0, 0.5), (3, 2.5, 10.0, 1.0), (3, 1.7, 5.0, 0.0)] {
            let r = change_of_variables_check(n, alpha, a, xi).unwrap();
            assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
        }
        let (_, c) = substitution(3, 2.0f64, 4.0, 0.0);
        assert!((c - 0.25).abs() < 1e-15);
    }

    #[test]
    fn planar_sweep_passes() {
        let r = verify_lemma32::<f64>(&PlanarGrid::default()).unwrap();
        assert_eq!(r.cases.len(), 60);
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.worst_margin > 0.0);
    }

    #[test]
    fn semicircle_closed_form_matches_quadrature() {
        for (m, alpha, delta) in [(2usize, 1.5f64, 1.0), (2, 2.9, 3.0), (3, 3.5, 2.0), (4, 1.2, 0.5)] {
            let body = ConvexBody::new(BodySpec::ball(vec![0.0, 0.0], delta)).unwrap();
            let v = section_curve_integral(&body, m, alpha, &[0.0, 0.0], 1e-12).unwrap();
            let exact = semicircle_integral(m, alpha, delta);
            assert!((v.value - exact).abs() < 1e-10 * exact.abs(), "m={m} {} {exact}", v.value);
            assert!(exact < 0.0);
        }
    }

    #[test]
    fn keylemma_examples() {
        let seg = BodySpec::new(vec![vec![-0.5, 0.0], vec![0.5, 0.0]], 2.0);
        let r = verify_keylemma2(&seg, 2, 2.0, &[0.25, 0.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let f3 = f_const(3, 3.5).unwrap();
        let seg3 = BodySpec::new(vec![vec![-0.5, 0.0], vec![0.5, 0.0]], f3);
        let r = verify_keylemma2(&seg3, 3, 3.5, &[0.25, 0.0]).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.cases[0].in_hypothesis);
        // Below the threshold: computed but not asserted.
        let thin = BodySpec::new(vec![vec![-0.5, 0.0], vec![0.5, 0.0]], 0.1);
        let r = verify_keylemma2(&thin, 2, 2.0, &[0.25, 0.0]).unwrap();
        assert!(!r.cases[0].in_hypothesis);
    }

    #[test]
    fn sample_points() {
        let seg = vec![vec![-0.5, 0.0], vec![0.5, 0.0]];
        let p = core_sample_points(&seg, 25);
        assert_eq!(p.len(), 25);
        assert_eq!(p[0], vec![-0.5, 0.0]);
        assert_eq!(p[24], vec![0.5, 0.0]);
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let p = core_sample_points(&tri, 9);
        assert_eq!(p.len(), 9);
        for q in &p {
            assert!(q[0] >= 0.0 && q[1] >= 0.0 && q[0] + q[1] <= 1.0 + 1e-15);
        }
    }
}
