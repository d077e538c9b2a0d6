//! Explicit thresholds: `psi_alpha(c)`, `a0`, `f(alpha)`, the cone integral `g(alpha,
//! beta)`, `alpha0(b)` and `phi(n)`.

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_quad, sphere_area};
use crate::real::Real;
use serde::Serialize;

/// Number of interior grid points used by [`alpha0`] and [`phi`].
pub const ALPHA_GRID: usize = 1024;
/// `b` used when assembling `phi(n)` for `n >= 3`.
pub const PHI_B: f64 = 10.0;
/// Lower bound `phi(n) >= 10` for `n >= 3`.
pub const PHI_FLOOR: f64 = 10.0;

fn check_psi_domain<T: Real>(n: usize, alpha: T, c: T) -> Result<()> {
    if n < 3 {
        return Err(Error::Domain(format!("psi needs n >= 3, got {n}")));
    }
    let nf = T::from_count(n);
    if !(alpha > T::one() && alpha < nf + T::one()) {
        return Err(Error::Domain(format!("psi needs 1 < alpha < n+1, got {alpha}")));
    }
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Domain(format!("psi needs c > 0, got {c}")));
    }
    Ok(())
}

/// `(4c^2 + 1)^{-(n+2-alpha)/2}`
fn psi_s<T: Real>(n: usize, alpha: T, c: T) -> T {
    let e = (T::from_count(n + 2) - alpha) / T::lit(2.0);
    (-e * (T::lit(4.0) * c * c).ln_1p()).exp()
}

/// `psi_alpha(c) = 2 + 3 / ((1 + s)^{1/(n-2)} - 1)` with `s = (4c^2+1)^{-(n+2-alpha)/2}`.
pub fn psi<T: Real>(n: usize, alpha: T, c: T) -> Result<T> {
    check_psi_domain(n, alpha, c)?;
    let s = psi_s(n, alpha, c);
    let am1 = (s.ln_1p() / T::from_count(n - 2)).exp_m1();
    Ok(T::lit(2.0) + T::lit(3.0) / am1)
}

/// Both written forms of `psi`: `(2A + 1)/(A - 1)` evaluated directly, and the
/// `2 + 3/(A - 1)` form with `A - 1` computed without cancellation.
pub fn psi_forms<T: Real>(n: usize, alpha: T, c: T) -> Result<(T, T)> {
    check_psi_domain(n, alpha, c)?;
    let s = psi_s(n, alpha, c);
    let a = (T::one() + s).powf(T::one() / T::from_count(n - 2));
    let first = (T::lit(2.0) * a + T::one()) / (a - T::one());
    Ok((first, psi(n, alpha, c)?))
}

/// `c0 = (2 xi0^2 + 1) / xi0`
pub fn c0<T: Real>(xi0: T) -> T {
    (T::lit(2.0) * xi0 * xi0 + T::one()) / xi0
}

/// `a0 = psi_alpha(c0) c0`.
pub fn a0<T: Real>(n: usize, alpha: T, xi0: T) -> Result<T> {
    if !(xi0 > T::zero()) || !xi0.is_finite() {
        return Err(Error::Domain(format!("xi0 must be positive, got {xi0}")));
    }
    let c = c0(xi0);
    Ok(psi(n, alpha, c)? * c)
}

/// Parallel-radius factor `f(alpha)`: `delta >= f(alpha) diam(core)` is the sufficient
/// condition for the Hessian sign.
pub fn f_const<T: Real>(n: usize, alpha: T) -> Result<T> {
    let nf = T::from_count(n);
    if n < 2 {
        return Err(Error::Domain(format!("f needs n >= 2, got {n}")));
    }
    if !(alpha > T::one() && alpha < nf + T::one()) {
        return Err(Error::Domain(format!("f needs 1 < alpha < n+1, got {alpha}")));
    }
    f_closed(n, alpha)
}

/// `f` without the open-interval check, so the endpoint `alpha = 1` can be evaluated.
fn f_closed<T: Real>(n: usize, alpha: T) -> Result<T> {
    let nf = T::from_count(n);
    if n == 2 {
        return Ok(T::lit(0.5) * (T::lit(4.0) - alpha).sqrt());
    }
    let p = nf + T::one() - alpha;
    let xi0 = T::lit(2.0) * ((p + T::one()) / p).sqrt();
    let c = c0(xi0);
    let s = psi_s(n, alpha, c);
    let am1 = (s.ln_1p() / T::from_count(n - 2)).exp_m1();
    let psi = T::lit(2.0) + T::lit(3.0) / am1;
    Ok(p.sqrt() / T::lit(2.0) * psi * c - T::one())
}

fn check_g_domain<T: Real>(n: usize, alpha: T, beta: T) -> Result<()> {
    let nf = T::from_count(n);
    if n < 3 {
        return Err(Error::Domain(format!("g needs n >= 3, got {n}")));
    }
    if !(alpha > nf && alpha < nf + T::one()) {
        return Err(Error::Domain(format!("g needs n < alpha < n+1, got {alpha}")));
    }
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::Domain(format!("g needs beta > 0, got {beta}")));
    }
    Ok(())
}

/// Pieces of `g(alpha, beta)` in polar form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GParts<T> {
    /// Integral over the unit ball (equals the ball volume).
    pub ball: T,
    /// Integral over the shell `1 < |y| < 1 + 1/beta` inside the cone (negative).
    pub shell: T,
    pub value: T,
    pub error: T,
}

/// `g(alpha, beta) = int_X (-(n+1-alpha) y1^2 + sum_{i>1} yi^2) |y|^{alpha-n-4} dy`
/// over `X = B^n U (B_{1+1/beta} n C)`, `C` the double cone `tan^2 theta <= n+1-alpha`
/// about the first axis.
///
/// In polar coordinates the integrand is `r^{alpha-3} w(theta)` with
/// `w = -(n+1-alpha) cos^2 + sin^2`, so the radial factors are closed form and only
/// the polar-angle integrals are numerical.
pub fn g_parts<T: Real>(n: usize, alpha: T, beta: T) -> Result<GParts<T>> {
    check_g_domain(n, alpha, beta)?;
    let nf = T::from_count(n);
    let p = nf + T::one() - alpha;
    let k = (n - 2) as i32;
    let w = move |t: T| {
        let (s, c) = t.sin_cos();
        (-p * c * c + s * s) * s.powi(k)
    };
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(100.0));
    let (full, e_full) = adaptive_quad(w, T::zero(), T::PI(), tol)?;
    let theta_c = p.sqrt().atan();
    let (cap, e_cap) = adaptive_quad(w, T::zero(), theta_c, tol)?;
    let sigma = sphere_area::<T>(n - 2);
    let am2 = alpha - T::lit(2.0);
    let r_in = T::one() / am2;
    let r_out = ((T::one() + T::one() / beta).powf(am2) - T::one()) / am2;
    let ball = sigma * r_in * full;
    let shell = sigma * r_out * T::lit(2.0) * cap;
    Ok(GParts {
        ball,
        shell,
        value: ball + shell,
        error: sigma * (r_in * e_full + r_out * T::lit(2.0) * e_cap),
    })
}

pub fn g_integral<T: Real>(n: usize, alpha: T, beta: T) -> Result<T> {
    Ok(g_parts(n, alpha, beta)?.value)
}

/// `alpha_0(b)`: the smallest grid exponent in `(n, n+1)` from which `g(., b)` stays
/// positive at every larger grid exponent.
///
/// The grid is `n + k/(M+1)`, `k = 1..M`. When a failing grid point exists, the gap
/// between it and the next grid point is bisected; a bisection point is only accepted
/// when `g` is positive there.
pub fn alpha0<T: Real>(n: usize, b: T) -> Result<T> {
    if n < 3 {
        return Err(Error::Domain(format!("alpha0 needs n >= 3, got {n}")));
    }
    if !(b > T::zero()) || !b.is_finite() {
        return Err(Error::Domain(format!("alpha0 needs b > 0, got {b}")));
    }
    let nf = T::from_count(n);
    let h = T::one() / T::from_count(ALPHA_GRID + 1);
    let grid: Vec<T> = (1..=ALPHA_GRID).map(|k| nf + T::from_count(k) * h).collect();
    let mut first_ok = ALPHA_GRID;
    for k in (0..ALPHA_GRID).rev() {
        if g_integral(n, grid[k], b)? > T::zero() {
            first_ok = k;
        } else {
            break;
        }
    }
    if first_ok == ALPHA_GRID {
        return Err(Error::Domain(
            "g(alpha, b) is not positive anywhere on the grid".into(),
        ));
    }
    if first_ok == 0 {
        return Ok(grid[0]);
    }
    let (mut lo, mut hi) = (grid[first_ok - 1], grid[first_ok]);
    for _ in 0..60 {
        let mid = T::lit(0.5) * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g_integral(n, mid, b)? > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `phi(n)` together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiReport<T> {
    /// The constant used as the sufficient ratio `delta / diam(core)`.
    pub value: T,
    /// Numerically computed supremum of `f` over the exponent range.
    pub computed_sup: T,
    /// `alpha_0(10)` for `n >= 3`.
    pub alpha0: Option<T>,
    /// Exponent at which the supremum was found.
    pub argmax: T,
    pub grid: usize,
}

/// `phi(2) = sqrt(3)` as a fixed constant (with the computed sup of `f` reported
/// separately); for `n >= 3`, `max(10, max f on [1, alpha_0(10)])`.
pub fn phi<T: Real>(n: usize) -> Result<PhiReport<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("phi needs n >= 2, got {n}")));
    }
    if n == 2 {
        let (sup, arg) = sup_f(2, T::one(), T::lit(3.0))?;
        return Ok(PhiReport {
            value: T::lit(3.0).sqrt(),
            computed_sup: sup,
            alpha0: None,
            argmax: arg,
            grid: ALPHA_GRID,
        });
    }
    let a0 = alpha0(n, T::lit(PHI_B))?;
    let (sup, arg) = sup_f(n, T::one(), a0)?;
    Ok(PhiReport {
        value: sup.max(T::lit(PHI_FLOOR)),
        computed_sup: sup,
        alpha0: Some(a0),
        argmax: arg,
        grid: ALPHA_GRID,
    })
}

/// Max of `f` on `[lo, hi]`: dense grid, then golden-section search around the best
/// grid point.
fn sup_f<T: Real>(n: usize, lo: T, hi: T) -> Result<(T, T)> {
    let m = ALPHA_GRID;
    let step = (hi - lo) / T::from_count(m - 1);
    let mut best = (T::neg_infinity(), lo, 0usize);
    for k in 0..m {
        let a = if k + 1 == m { hi } else { lo + T::from_count(k) * step };
        let v = f_closed(n, a)?;
        if v > best.0 {
            best = (v, a, k);
        }
    }
    let k = best.2;
    let mut a = if k == 0 { lo } else { lo + T::from_count(k - 1) * step };
    let mut b = if k + 1 >= m { hi } else { lo + T::from_count(k + 1) * step };
    let inv_phi = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f_closed(n, x1)?;
    let mut f2 = f_closed(n, x2)?;
    for _ in 0..100 {
        if b - a <= T::epsilon() * T::lit(4.0) * (a.abs() + b.abs()) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f_closed(n, x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f_closed(n, x2)?;
        }
    }
    for (v, x) in [(f1, x1), (f2, x2)] {
        if v > best.0 {
            best = (v, x, k);
        }
    }
    Ok((best.0, best.1))
}
