//! Gauss rules, product grids on spheres, and globally adaptive Gauss-Kronrod 7/15
//! integration (scalar and vector valued).

use crate::error::{Error, Result};
use crate::real::Real;
use serde::Serialize;

/// Largest node count a sphere grid may have.
pub const MAX_GRID_NODES: usize = 4_000_000;
/// Maximum bisection depth of an adaptive interval.
pub const MAX_DEPTH: u32 = 60;
/// Interval budget for one adaptive integral.
pub const MAX_INTERVALS: usize = 4000;
/// Uniform panels the adaptive rule starts from.
pub const INITIAL_PANELS: usize = 8;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on `P_m`.
pub fn gauss_legendre<T: Real>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut x = vec![0.0f64; m];
    let mut w = vec![0.0f64; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, z);
            if m == 1 {
                p0 = 1.0;
                p1 = z;
            } else {
                for k in 2..=m {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
            }
            // p1 = P_m(z), p0 = P_{m-1}(z)
            dp = if m == 1 { 1.0 } else { mf * (z * p1 - p0) / (z * z - 1.0) };
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (
        x.into_iter().map(T::lit).collect(),
        w.into_iter().map(T::lit).collect(),
    )
}

/// Surface area of the unit sphere `S^k` in `R^{k+1}`.
pub fn sphere_area<T: Real>(k: usize) -> T {
    // sigma(S^0) = 2, sigma(S^1) = 2 pi, sigma(S^k) = 2 pi sigma(S^{k-2}) / (k - 1).
    let mut s = if k % 2 == 0 { 2.0 } else { std::f64::consts::TAU };
    let mut j = k % 2 + 2;
    while j <= k {
        s *= std::f64::consts::TAU / (j - 1) as f64;
        j += 2;
    }
    T::lit(s)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume<T: Real>(n: usize) -> T {
    sphere_area::<T>(n - 1) / T::from_count(n)
}

/// `int_0^pi sin^k t dt`.
pub fn sine_power_integral<T: Real>(k: usize) -> T {
    let mut v = if k % 2 == 0 { std::f64::consts::PI } else { 2.0 };
    let mut j = k % 2 + 2;
    while j <= k {
        v *= (j - 1) as f64 / j as f64;
        j += 2;
    }
    T::lit(v)
}

/// Quadrature nodes and weights on the unit sphere `S^k`.
#[derive(Clone, Debug, Serialize)]
pub struct SphereGrid<T> {
    pub dim_sphere: usize,
    pub nodes: Vec<Vec<T>>,
    pub weights: Vec<T>,
}

impl<T: Real> SphereGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Sum of `w_i f(node_i)` in node order.
    pub fn integrate(&self, f: impl Fn(&[T]) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(T::zero(), |acc, (p, &w)| acc + w * f(p))
    }
}

fn grid_len(k: usize, res: usize) -> Option<usize> {
    match k {
        0 => Some(2),
        1 => Some(res),
        _ => {
            let mut total = 2 * res;
            for _ in 2..=k {
                total = total.checked_mul(res)?;
            }
            Some(total)
        }
    }
}

/// Product grid on `S^k`.
///
/// `S^1` uses `res` equally spaced angles. For `k >= 2` the polar angle uses `res`
/// Gauss-Legendre nodes with `sin^{k-1}` weights rescaled so the total equals the
/// exact area, over a grid on `S^{k-1}`; the innermost circle gets `2 res` angles.
pub fn sphere_grid<T: Real>(k: usize, res: usize) -> Result<SphereGrid<T>> {
    if k > 9 {
        return Err(Error::Grid(format!("sphere dimension {k} exceeds 9")));
    }
    if k > 0 && res < 4 {
        return Err(Error::Grid(format!("resolution {res} is below 4")));
    }
    match grid_len(k, res) {
        Some(n) if n <= MAX_GRID_NODES => {}
        _ => {
            return Err(Error::Grid(format!(
                "S^{k} at resolution {res} exceeds {MAX_GRID_NODES} nodes"
            )))
        }
    }
    Ok(build_grid(k, res, k))
}

fn build_grid<T: Real>(k: usize, res: usize, top: usize) -> SphereGrid<T> {
    match k {
        0 => SphereGrid {
            dim_sphere: 0,
            nodes: vec![vec![T::one()], vec![-T::one()]],
            weights: vec![T::one(), T::one()],
        },
        1 => {
            let m = if top >= 2 { 2 * res } else { res };
            let w = T::TAU() / T::from_count(m);
            let nodes = (0..m)
                .map(|i| {
                    let t = T::TAU() * T::from_count(i) / T::from_count(m);
                    vec![t.cos(), t.sin()]
                })
                .collect();
            SphereGrid {
                dim_sphere: 1,
                nodes,
                weights: vec![w; m],
            }
        }
        _ => {
            let inner = build_grid::<T>(k - 1, res, top);
            let (gx, gw) = gauss_legendre::<T>(res);
            let half_pi = T::FRAC_PI_2();
            let mut theta = Vec::with_capacity(res);
            let mut tw = Vec::with_capacity(res);
            for (x, w) in gx.iter().zip(&gw) {
                let t = half_pi * (*x + T::one());
                theta.push(t);
                tw.push(half_pi * *w * t.sin().powi((k - 1) as i32));
            }
            // Rescale so the polar weights integrate sin^{k-1} exactly.
            let exact = sine_power_integral::<T>(k - 1);
            let got: T = tw.iter().copied().sum();
            for w in tw.iter_mut() {
                *w = *w * exact / got;
            }
            let mut nodes = Vec::with_capacity(res * inner.len());
            let mut weights = Vec::with_capacity(res * inner.len());
            for (t, w) in theta.iter().zip(&tw) {
                let (s, c) = t.sin_cos();
                for (p, &iw) in inner.nodes.iter().zip(&inner.weights) {
                    let mut node = Vec::with_capacity(k + 1);
                    node.push(c);
                    node.extend(p.iter().map(|&q| s * q));
                    nodes.push(node);
                    weights.push(*w * iw);
                }
            }
            SphereGrid {
                dim_sphere: k,
                nodes,
                weights,
            }
        }
    }
}

/// Roughly `count` well-spread unit vectors in `R^n`: equal angles for `n = 2`, a
/// Fibonacci lattice for `n = 3`, and Gaussian-mapped low-discrepancy points above.
pub fn spread_directions<T: Real>(n: usize, count: usize) -> Vec<Vec<T>> {
    let count = count.max(1);
    match n {
        0 | 1 => vec![vec![T::one(); n.max(1)]],
        2 => (0..count)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / count as f64;
                vec![T::lit(t.cos()), T::lit(t.sin())]
            })
            .collect(),
        3 => fibonacci_sphere(count),
        _ => {
            let seq = low_discrepancy(n + n % 2, count, 0.5);
            seq.into_iter()
                .map(|u| {
                    let mut g = Vec::with_capacity(n + 1);
                    for pair in u.chunks(2) {
                        let r = (-2.0 * (1.0 - pair[0]).ln()).sqrt();
                        let t = std::f64::consts::TAU * pair[1];
                        g.push(r * t.cos());
                        g.push(r * t.sin());
                    }
                    g.truncate(n);
                    let l = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    g.into_iter().map(|x| T::lit(x / l)).collect()
                })
                .collect()
        }
    }
}

/// Fibonacci lattice on `S^2`.
pub fn fibonacci_sphere<T: Real>(count: usize) -> Vec<Vec<T>> {
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let t = std::f64::consts::TAU * (i as f64 / golden).fract();
            vec![T::lit(r * t.cos()), T::lit(r * t.sin()), T::lit(z)]
        })
        .collect()
}

/// Additive recurrence with the generalized golden ratio in `[0,1)^d`.
pub fn low_discrepancy(d: usize, count: usize, offset: f64) -> Vec<Vec<f64>> {
    // phi_d is the unique positive root of x^{d+1} = x + 1.
    let mut g = 2.0f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=d).map(|j| (1.0 / g.powi(j as i32)).fract()).collect();
    (0..count)
        .map(|i| {
            alpha
                .iter()
                .map(|a| (offset + a * (i + 1) as f64).fract())
                .collect()
        })
        .collect()
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
    pub converged: bool,
}

/// Vector-valued counterpart of [`QuadResult`]; `error` holds per-component estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadVecResult<T> {
    pub value: Vec<T>,
    pub error: Vec<T>,
    pub intervals: usize,
    pub converged: bool,
}

impl<T: Real> QuadVecResult<T> {
    pub fn max_error(&self) -> T {
        self.error.iter().copied().fold(T::zero(), T::max)
    }
}

struct Segment<T> {
    a: T,
    b: T,
    depth: u32,
    value: Vec<T>,
    error: Vec<T>,
}

/// A panel is the Kronrod 15-point rule on both halves of `[a, b]`. Its error is the
/// larger of the halves' own estimates and their disagreement with the rule on the
/// whole panel. The radial functions integrated here have curvature jumps where the
/// boundary switches between flat and round pieces, and a single embedded pair can
/// miss such a jump by accident; the whole-versus-halves comparison rarely does.
fn panel<T: Real>(f: &mut impl FnMut(T) -> Vec<T>, a: T, b: T, dim: usize) -> (Vec<T>, Vec<T>) {
    let m = T::lit(0.5) * (a + b);
    let (w, _) = gk15(f, a, b, dim);
    let (l, le) = gk15(f, a, m, dim);
    let (r, re) = gk15(f, m, b, dim);
    let v: Vec<T> = l.iter().zip(&r).map(|(x, y)| *x + *y).collect();
    let e = (0..dim).map(|c| (w[c] - v[c]).abs().max(le[c] + re[c])).collect();
    (v, e)
}

/// One Gauss-Kronrod 7/15 rule on `[a, b]` for `dim` components. The error is the
/// Kronrod-Gauss difference, raised (never lowered) by the QUADPACK scaling, with a
/// roundoff floor.
fn gk15<T: Real>(f: &mut impl FnMut(T) -> Vec<T>, a: T, b: T, dim: usize) -> (Vec<T>, Vec<T>) {
    let half = T::lit(0.5) * (b - a);
    let mid = T::lit(0.5) * (a + b);
    let mut fx: Vec<Vec<T>> = Vec::with_capacity(15);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        fx.push(f(mid - dx));
        fx.push(f(mid + dx));
    }
    let fc = f(mid);
    let mut val = vec![T::zero(); dim];
    let mut err = vec![T::zero(); dim];
    for c in 0..dim {
        let mut rk = T::lit(WGK[7]) * fc[c];
        let mut rg = T::lit(WG[3]) * fc[c];
        let mut rabs = rk.abs();
        for j in 0..7 {
            let s = fx[2 * j][c] + fx[2 * j + 1][c];
            rk = rk + T::lit(WGK[j]) * s;
            rabs = rabs + T::lit(WGK[j]) * (fx[2 * j][c].abs() + fx[2 * j + 1][c].abs());
            if j % 2 == 1 {
                rg = rg + T::lit(WG[j / 2]) * s;
            }
        }
        let mean = rk * T::lit(0.5);
        let mut rasc = T::lit(WGK[7]) * (fc[c] - mean).abs();
        for j in 0..7 {
            rasc = rasc
                + T::lit(WGK[j]) * ((fx[2 * j][c] - mean).abs() + (fx[2 * j + 1][c] - mean).abs());
        }
        let habs = half.abs();
        let resasc = rasc * habs;
        let resabs = rabs * habs;
        let mut e = ((rk - rg) * half).abs();
        if resasc != T::zero() && e != T::zero() {
            let r = (T::lit(200.0) * e / resasc).powf(T::lit(1.5));
            e = e.max(resasc * r.min(T::one()));
        }
        let floor = T::lit(50.0) * T::epsilon() * resabs;
        if resabs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
            e = e.max(floor);
        }
        val[c] = rk * half;
        err[c] = e;
    }
    (val, err)
}

/// Globally adaptive bisection of the worst panel. Panels are summed in position order
/// so the result is deterministic. The returned state is the best one visited (smallest
/// error), which makes the reported error monotone in the tolerance.
fn adaptive_core<T: Real>(
    mut f: impl FnMut(T) -> Vec<T>,
    a: T,
    b: T,
    tol: T,
    dim: usize,
) -> QuadVecResult<T> {
    let parts = INITIAL_PANELS;
    let h = (b - a) / T::from_count(parts);
    let mut segs: Vec<Segment<T>> = (0..parts)
        .map(|k| {
            let lo = a + T::from_count(k) * h;
            let hi = if k + 1 == parts { b } else { lo + h };
            let (value, error) = panel(&mut f, lo, hi, dim);
            Segment {
                a: lo,
                b: hi,
                depth: 0,
                value,
                error,
            }
        })
        .collect();
    let totals = |segs: &[Segment<T>]| {
        let mut val = vec![T::zero(); dim];
        let mut err = vec![T::zero(); dim];
        for s in segs {
            for c in 0..dim {
                val[c] = val[c] + s.value[c];
                err[c] = err[c] + s.error[c];
            }
        }
        (val, err)
    };
    let norm_inf = |x: &[T]| x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let (mut best_val, mut best_err) = totals(&segs);
    loop {
        let be = norm_inf(&best_err);
        let bv = norm_inf(&best_val);
        if be <= tol * bv.max(T::one()) {
            return QuadVecResult {
                value: best_val,
                error: best_err,
                intervals: segs.len(),
                converged: true,
            };
        }
        let worst = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.depth < MAX_DEPTH)
            .map(|(i, s)| (i, norm_inf(&s.error)))
            .fold(None, |acc: Option<(usize, T)>, it| match acc {
                Some(b) if b.1 >= it.1 => Some(b),
                _ => Some(it),
            });
        let Some((wi, _)) = worst.filter(|_| segs.len() < MAX_INTERVALS) else {
            return QuadVecResult {
                value: best_val,
                error: best_err,
                intervals: segs.len(),
                converged: false,
            };
        };
        let s = segs.remove(wi);
        let m = T::lit(0.5) * (s.a + s.b);
        let (lv, le) = panel(&mut f, s.a, m, dim);
        let (rv, re) = panel(&mut f, m, s.b, dim);
        let d = s.depth + 1;
        segs.insert(
            wi,
            Segment {
                a: m,
                b: s.b,
                depth: d,
                value: rv,
                error: re,
            },
        );
        segs.insert(
            wi,
            Segment {
                a: s.a,
                b: m,
                depth: d,
                value: lv,
                error: le,
            },
        );
        let (val, err) = totals(&segs);
        if norm_inf(&err) < norm_inf(&best_err) {
            best_val = val;
            best_err = err;
        }
    }
}

/// Adaptive integral of a scalar function without failing on non-convergence.
pub fn integrate<T: Real>(mut f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> QuadResult<T> {
    let r = adaptive_core(|x| vec![f(x)], a, b, tol, 1);
    QuadResult {
        value: r.value[0],
        error: r.error[0],
        intervals: r.intervals,
        converged: r.converged,
    }
}

/// Adaptive integral of a vector function (`dim` components); the tolerance applies to
/// the largest component error against the largest component magnitude.
pub fn integrate_vec<T: Real>(
    f: impl FnMut(T) -> Vec<T>,
    a: T,
    b: T,
    tol: T,
    dim: usize,
) -> QuadVecResult<T> {
    adaptive_core(f, a, b, tol, dim)
}

/// `(value, error_estimate)` of `int_a^b f`, with `error <= tol * max(1, |value|)`.
pub fn adaptive_quad<T: Real>(f: impl FnMut(T) -> T, a: T, b: T, tol: T) -> Result<(T, T)> {
    if !(a < b) {
        return Err(Error::Domain("integration bounds must satisfy a < b".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let r = integrate(f, a, b, tol);
    if !r.converged || !r.value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            value: r.value.to_f64_lossy(),
            error: r.error.to_f64_lossy(),
            intervals: r.intervals,
        });
    }
    Ok((r.value, r.error))
}

/// Vector version of [`adaptive_quad`].
pub fn adaptive_quad_vec<T: Real>(
    f: impl FnMut(T) -> Vec<T>,
    a: T,
    b: T,
    tol: T,
    dim: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    if !(a < b) {
        return Err(Error::Domain("integration bounds must satisfy a < b".into()));
    }
    let r = integrate_vec(f, a, b, tol, dim);
    if !r.converged || r.value.iter().any(|v| !v.is_finite()) {
        return Err(Error::QuadratureNonConvergence {
            value: r.value.first().map_or(f64::NAN, |v| v.to_f64_lossy()),
            error: r.max_error().to_f64_lossy(),
            intervals: r.intervals,
        });
    }
    Ok((r.value, r.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn legendre_rules_integrate_polynomials() {
        for m in 1..12usize {
            let (x, w) = gauss_legendre::<f64>(m);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13);
            // Exact up to degree 2m - 1.
            let deg = 2 * m - 2;
            let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn areas() {
        assert_eq!(sphere_area::<f64>(0), 2.0);
        assert!((sphere_area::<f64>(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area::<f64>(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area::<f64>(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((ball_volume::<f64>(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((sine_power_integral::<f64>(1) - 2.0).abs() < 1e-15);
        assert!((sine_power_integral::<f64>(2) - PI / 2.0).abs() < 1e-15);
        assert!((sine_power_integral::<f64>(3) - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn grid_examples() {
        let g0 = sphere_grid::<f64>(0, 4).unwrap();
        assert_eq!(g0.nodes, vec![vec![1.0], vec![-1.0]]);
        assert_eq!(g0.weights, vec![1.0, 1.0]);
        let g1 = sphere_grid::<f64>(1, 4).unwrap();
        assert!((g1.total_weight() - 2.0 * PI).abs() < 1e-14);
        let g2 = sphere_grid::<f64>(2, 16).unwrap();
        let m = g2.integrate(|p| p[0] * p[0]);
        assert!((m - 4.0 * PI / 3.0).abs() / (4.0 * PI / 3.0) < 1e-6);
        assert!(sphere_grid::<f64>(2, 3).is_err());
        assert!(sphere_grid::<f64>(10, 4).is_err());
        assert!(sphere_grid::<f64>(9, 64).is_err());
    }

    #[test]
    fn grids_have_exact_totals_and_unit_nodes() {
        for k in 0..=5 {
            let g = sphere_grid::<f64>(k, 6).unwrap();
            let s = sphere_area::<f64>(k);
            assert!((g.total_weight() - s).abs() / s < 1e-12, "k={k}");
            for p in &g.nodes {
                assert_eq!(p.len(), k + 1);
                let l = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((l - 1.0).abs() < 1e-12);
            }
        }
        for k in 0..=4 {
            let g = sphere_grid::<f64>(k, 12).unwrap();
            let s = sphere_area::<f64>(k);
            for j in 0..=k {
                let m = g.integrate(|p| p[j] * p[j]);
                assert!((m - s / (k as f64 + 1.0)).abs() / s < 1e-6, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn quad_examples() {
        let (v, _) = adaptive_quad(|x: f64| x, 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        let (v, e) = adaptive_quad(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-8).unwrap();
        assert!((v - 2.0).abs() < 1e-7, "v={v} e={e}");
        let (v, _) = adaptive_quad(|t: f64| t / (t * t + 1.0), -1.0, 1.0, 1e-12).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn quad_reports_nonconvergence() {
        let r = adaptive_quad(|x: f64| 1.0 / x, 0.0, 1.0, 1e-10);
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
        assert!(adaptive_quad(|x: f64| x, 1.0, 0.0, 1e-8).is_err());
    }

    #[test]
    fn vector_quad_matches_scalar() {
        let (v, e) = adaptive_quad_vec(|x: f64| vec![x.sin(), x.exp(), 1.0], 0.0, 2.0, 1e-12, 3).unwrap();
        assert!((v[0] - (1.0 - 2f64.cos())).abs() < 1e-13);
        assert!((v[1] - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((v[2] - 2.0).abs() < 1e-14);
        assert!(e.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn f32_rules_work() {
        let (v, _) = adaptive_quad(|x: f32| x * x, 0.0, 1.0, 1e-5).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
        let g = sphere_grid::<f32>(2, 8).unwrap();
        assert!((g.total_weight() - 4.0 * std::f32::consts::PI).abs() < 1e-4);
    }

    #[test]
    fn spread_directions_are_unit() {
        for n in 2..=6 {
            let d = spread_directions::<f64>(n, 50);
            assert_eq!(d.len(), 50);
            for v in &d {
                assert_eq!(v.len(), n);
                let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((l - 1.0).abs() < 1e-12);
            }
        }
    }
}
