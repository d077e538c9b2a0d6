//! Riesz and logarithmic potentials of a body at interior points, with gradients and
//! diagonal second derivatives.
//!
//! Every integral over `S^{n-1}` is split into half-great-circles: a direction is
//! `cos(phi) e + sin(phi) g` with `e` a fixed axis, `g` running over a grid on the unit
//! sphere of `e^perp` and `phi` in `(0, pi)` integrated adaptively. Boundary integrals
//! `int K e.n dsigma` use the same sections, written as `int K y2^{n-2} dy2` along each
//! planar boundary curve with `y2` the distance from the axis.

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::quadrature::{integrate_vec, sphere_grid};
use crate::real::{complement_basis, dot, unit_axis, Real};
use rayon::prelude::*;
use serde::Serialize;

/// Kernel exponent: `|x - y|^{alpha - n}` or `ln(1/|x - y|)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel<T> {
    Riesz(T),
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialParams<T> {
    pub kernel: Kernel<T>,
    /// Resolution of the grid on the sphere of the section normals; `None` picks a
    /// default by dimension.
    pub sphere_res: Option<usize>,
    /// Relative tolerance of each adaptive angular integral.
    pub quad_tol: T,
}

impl<T: Real> PotentialParams<T> {
    pub fn riesz(alpha: T) -> Self {
        Self {
            kernel: Kernel::Riesz(alpha),
            sphere_res: None,
            quad_tol: default_quad_tol(),
        }
    }

    pub fn log() -> Self {
        Self {
            kernel: Kernel::Log,
            sphere_res: None,
            quad_tol: default_quad_tol(),
        }
    }

    pub fn with_sphere_res(mut self, res: usize) -> Self {
        self.sphere_res = Some(res);
        self
    }

    pub fn with_quad_tol(mut self, tol: T) -> Self {
        self.quad_tol = tol;
        self
    }

    pub fn is_log(&self) -> bool {
        matches!(self.kernel, Kernel::Log)
    }

    /// The exponent, with log mode standing for `alpha = n`.
    pub fn alpha_or(&self, n: usize) -> T {
        match self.kernel {
            Kernel::Riesz(a) => a,
            Kernel::Log => T::from_count(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Kernel::Riesz(a) = self.kernel {
            if !(a > T::zero()) || !a.is_finite() {
                return Err(Error::Domain(format!("alpha must be positive, got {a}")));
            }
        }
        if !(self.quad_tol > T::zero()) {
            return Err(Error::Domain("quad_tol must be positive".into()));
        }
        if let Some(r) = self.sphere_res {
            if r < 4 {
                return Err(Error::Grid(format!("resolution {r} is below 4")));
            }
        }
        Ok(())
    }
}

pub fn default_quad_tol<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(1000.0))
}

/// Default resolution of the section-normal grid on `S^{n-2}`.
pub fn default_section_res(n: usize) -> usize {
    match n {
        0..=3 => 64,
        4 => 16,
        5 => 8,
        _ => 4,
    }
}

/// A scalar with its error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Evaluation<T> {
    pub value: T,
    pub error: T,
}

/// A vector with per-component error estimates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VectorEvaluation<T> {
    pub value: Vec<T>,
    pub error: Vec<T>,
}

/// Value, gradient and Hessian diagonal at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PotentialReport<T> {
    pub value: Evaluation<T>,
    pub grad: VectorEvaluation<T>,
    pub hessian_diag: VectorEvaluation<T>,
}

/// Geometry of one boundary sample on a section curve.
struct Sample<'a, T> {
    cos: T,
    sin: T,
    u: &'a [T],
    rho: T,
    normal: &'a [T],
    /// d rho / d phi
    drho: T,
}

/// Unit normals `g` of the half-planes through an axis, with quadrature weights.
struct SectionFrame<T> {
    axis: Vec<T>,
    normals: Vec<Vec<T>>,
    weights: Vec<T>,
    /// Uniform circle grid (n = 3): coarse-grid comparison gives an error estimate.
    nested: bool,
}

fn section_frame<T: Real>(axis: Vec<T>, res: usize) -> Result<SectionFrame<T>> {
    let n = axis.len();
    let basis = complement_basis(&axis);
    let k = n - 2;
    let grid = if k == 1 {
        // Uniform circle of exactly `res` nodes.
        let w = T::TAU() / T::from_count(res);
        let nodes = (0..res)
            .map(|i| {
                let t = T::TAU() * T::from_count(i) / T::from_count(res);
                vec![t.cos(), t.sin()]
            })
            .collect();
        crate::quadrature::SphereGrid {
            dim_sphere: 1,
            nodes,
            weights: vec![w; res],
        }
    } else {
        sphere_grid::<T>(k, res)?
    };
    let normals = grid
        .nodes
        .iter()
        .map(|c| {
            let mut g = vec![T::zero(); n];
            for (ci, b) in c.iter().zip(&basis) {
                for (gk, &bk) in g.iter_mut().zip(b) {
                    *gk = *gk + *ci * bk;
                }
            }
            g
        })
        .collect();
    Ok(SectionFrame {
        axis,
        normals,
        weights: grid.weights,
        nested: k == 1 && res % 2 == 0,
    })
}

/// Integrates `f(sample)` (a `dim`-vector) over `phi in (0, pi)` for every section and
/// sums with the section weights. Sections run in parallel; the sum is in grid order.
fn section_sum<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    frame: &SectionFrame<T>,
    tol: T,
    dim: usize,
    f: impl Fn(&Sample<T>) -> Vec<T> + Sync,
) -> Result<VectorEvaluation<T>> {
    let per_section: Vec<Result<(Vec<T>, Vec<T>)>> = frame
        .normals
        .par_iter()
        .map(|g| {
            let e = &frame.axis;
            let mut failed = false;
            let r = integrate_vec(
                |phi: T| {
                    let (s, c) = phi.sin_cos();
                    let u: Vec<T> = e.iter().zip(g).map(|(&a, &b)| c * a + s * b).collect();
                    let Some(h) = body.hit_unchecked(x, &u) else {
                        failed = true;
                        return vec![T::nan(); dim];
                    };
                    let du: Vec<T> = e.iter().zip(g).map(|(&a, &b)| -s * a + c * b).collect();
                    let drho = -h.rho * dot(&h.normal, &du) / dot(&h.normal, &u);
                    f(&Sample {
                        cos: c,
                        sin: s,
                        u: &u,
                        rho: h.rho,
                        normal: &h.normal,
                        drho,
                    })
                },
                T::zero(),
                T::PI(),
                tol,
                dim,
            );
            if failed {
                return Err(Error::Domain("ray cast failed inside the body".into()));
            }
            if !r.converged || r.value.iter().any(|v| !v.is_finite()) {
                return Err(Error::QuadratureNonConvergence {
                    value: r.value.first().map_or(f64::NAN, |v| v.to_f64_lossy()),
                    error: r.max_error().to_f64_lossy(),
                    intervals: r.intervals,
                });
            }
            Ok((r.value, r.error))
        })
        .collect();
    let mut value = vec![T::zero(); dim];
    let mut coarse = vec![T::zero(); dim];
    let mut error = vec![T::zero(); dim];
    for (i, (res, &w)) in per_section.into_iter().zip(&frame.weights).enumerate() {
        let (v, e) = res?;
        for c in 0..dim {
            value[c] = value[c] + w * v[c];
            error[c] = error[c] + w * e[c];
            if i % 2 == 0 {
                coarse[c] = coarse[c] + (w + w) * v[c];
            }
        }
    }
    if frame.nested {
        for c in 0..dim {
            error[c] = error[c] + (value[c] - coarse[c]).abs();
        }
    }
    Ok(VectorEvaluation { value, error })
}

fn prepare<T: Real>(body: &ConvexBody<T>, x: &[T], params: &PotentialParams<T>) -> Result<usize> {
    params.validate()?;
    body.require_interior(x)?;
    Ok(params.sphere_res.unwrap_or_else(|| default_section_res(body.dim())))
}

/// Radial density of the potential along a direction with exit distance `rho`.
fn radial_potential<T: Real>(kernel: Kernel<T>, n: usize, rho: T) -> T {
    match kernel {
        Kernel::Riesz(a) => rho.powf(a) / a,
        Kernel::Log => {
            let nf = T::from_count(n);
            let rn = rho.powi(n as i32);
            rn / (nf * nf) - rn * rho.ln() / nf
        }
    }
}

/// `V(x) = (1/alpha) int rho^alpha dsigma`, or the log potential
/// `int [rho^n / n^2 - rho^n ln(rho) / n] dsigma`.
pub fn potential<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<Evaluation<T>> {
    let res = prepare(body, x, params)?;
    let n = body.dim();
    let frame = section_frame(unit_axis(n, 0), res)?;
    let kernel = params.kernel;
    let r = section_sum(body, x, &frame, params.quad_tol, 1, |s| {
        vec![radial_potential(kernel, n, s.rho) * s.sin.powi(n as i32 - 2)]
    })?;
    Ok(Evaluation {
        value: r.value[0],
        error: r.error[0],
    })
}

/// `d/dphi (rho sin phi) * (rho sin phi)^{n-2}`: the section form of `e.n dsigma`.
fn axial_flux<T: Real>(s: &Sample<T>, n: usize) -> T {
    let y2 = s.rho * s.sin;
    let dy2 = s.drho * s.sin + s.rho * s.cos;
    y2.powi(n as i32 - 2) * dy2
}

/// Partial derivative along axis `j` from the boundary integral
/// `-int |x-y|^{alpha-n} e_j.n dsigma` (log mode: `int ln|x-y| e_j.n dsigma`).
pub fn gradient_component<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    j: usize,
    params: &PotentialParams<T>,
) -> Result<Evaluation<T>> {
    let n = body.dim();
    check_axis(j, n)?;
    let res = prepare(body, x, params)?;
    let frame = section_frame(unit_axis(n, j), res)?;
    let kernel = params.kernel;
    let nf = T::from_count(n);
    let r = section_sum(body, x, &frame, params.quad_tol, 1, |s| {
        let k = match kernel {
            Kernel::Riesz(a) => -s.rho.powf(a - nf),
            Kernel::Log => s.rho.ln(),
        };
        vec![k * axial_flux(s, n)]
    })?;
    Ok(Evaluation {
        value: r.value[0],
        error: r.error[0],
    })
}

pub fn gradient<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<VectorEvaluation<T>> {
    let mut value = Vec::with_capacity(body.dim());
    let mut error = Vec::with_capacity(body.dim());
    for j in 0..body.dim() {
        let e = gradient_component(body, x, j, params)?;
        value.push(e.value);
        error.push(e.error);
    }
    Ok(VectorEvaluation { value, error })
}

/// Second derivative along axis `j`:
/// `-(alpha-n) int |x-y|^{alpha-n-2} (x_j - y_j) e_j.n dsigma`, or in log mode
/// `int |x-y|^{-2} (x_j - y_j) e_j.n dsigma`.
pub fn hessian_diag<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    j: usize,
    params: &PotentialParams<T>,
) -> Result<Evaluation<T>> {
    let n = body.dim();
    check_axis(j, n)?;
    let res = prepare(body, x, params)?;
    let frame = section_frame(unit_axis(n, j), res)?;
    let kernel = params.kernel;
    let nf = T::from_count(n);
    let r = section_sum(body, x, &frame, params.quad_tol, 1, |s| {
        // x_j - y_j = -rho cos(phi) along the section.
        let xj_yj = -s.rho * s.cos;
        let k = match kernel {
            Kernel::Riesz(a) => -(a - nf) * s.rho.powf(a - nf - T::lit(2.0)) * xj_yj,
            Kernel::Log => xj_yj / (s.rho * s.rho),
        };
        vec![k * axial_flux(s, n)]
    })?;
    Ok(Evaluation {
        value: r.value[0],
        error: r.error[0],
    })
}

pub fn hessian_diag_all<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<VectorEvaluation<T>> {
    let mut value = Vec::with_capacity(body.dim());
    let mut error = Vec::with_capacity(body.dim());
    for j in 0..body.dim() {
        let e = hessian_diag(body, x, j, params)?;
        value.push(e.value);
        error.push(e.error);
    }
    Ok(VectorEvaluation { value, error })
}

fn check_axis(j: usize, n: usize) -> Result<()> {
    if j >= n {
        return Err(Error::Domain(format!("axis {j} out of range for dimension {n}")));
    }
    Ok(())
}

/// Which quantities the one-pass polar evaluation should produce.
#[derive(Clone, Copy, Debug)]
struct Want {
    grad: bool,
    hess: bool,
}

/// Below this exponent the radial gradient formula loses too much to cancellation.
const RADIAL_GRADIENT_MIN_ALPHA: f64 = 1.05;

/// One-pass evaluation over directions: boundary integrals are pulled back to the
/// sphere with `n dsigma = rho^{n-1} N / (N.u) du`.
fn polar_bundle<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
    want: Want,
) -> Result<PotentialReport<T>> {
    let res = prepare(body, x, params)?;
    let n = body.dim();
    let frame = section_frame(unit_axis(n, 0), res)?;
    let kernel = params.kernel;
    let nf = T::from_count(n);
    let dim = 1 + if want.grad { n } else { 0 } + if want.hess { n } else { 0 };
    let r = section_sum(body, x, &frame, params.quad_tol, dim, |s| {
        let jac = s.sin.powi(n as i32 - 2);
        let nu = dot(s.normal, s.u);
        let mut out = Vec::with_capacity(dim);
        out.push(radial_potential(kernel, n, s.rho) * jac);
        if want.grad {
            match kernel {
                // Differentiating under the radial integral gives a normal-free form,
                // smoother on the sphere than the boundary pull-back.
                Kernel::Riesz(a) if a >= T::lit(RADIAL_GRADIENT_MIN_ALPHA) => {
                    let k = -(a - nf) / (a - T::one()) * s.rho.powf(a - T::one());
                    out.extend(s.u.iter().map(|&uj| k * uj * jac));
                }
                Kernel::Riesz(a) => {
                    let k = -s.rho.powf(a - T::one());
                    out.extend(s.normal.iter().map(|&nj| k * nj / nu * jac));
                }
                Kernel::Log => {
                    let k = s.rho.powi(n as i32 - 1) / (nf - T::one());
                    out.extend(s.u.iter().map(|&uj| k * uj * jac));
                }
            }
        }
        if want.hess {
            let k = match kernel {
                Kernel::Riesz(a) => (a - nf) * s.rho.powf(a - T::lit(2.0)),
                Kernel::Log => -s.rho.powi(n as i32 - 2),
            };
            for (&uj, &nj) in s.u.iter().zip(s.normal) {
                out.push(k * uj * nj / nu * jac);
            }
        }
        out
    })?;
    let split = |from: usize| VectorEvaluation {
        value: r.value[from..from + n].to_vec(),
        error: r.error[from..from + n].to_vec(),
    };
    let empty = VectorEvaluation {
        value: Vec::new(),
        error: Vec::new(),
    };
    let grad = if want.grad { split(1) } else { empty.clone() };
    let hessian_diag = if want.hess {
        split(if want.grad { 1 + n } else { 1 })
    } else {
        empty
    };
    Ok(PotentialReport {
        value: Evaluation {
            value: r.value[0],
            error: r.error[0],
        },
        grad,
        hessian_diag,
    })
}

/// `int_{S^{n-1}} f(u, rho(u)) du` about an interior `x`, where `rho` is the radial
/// function. `f` returns `dim` components.
pub fn sphere_radial_integral<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    sphere_res: Option<usize>,
    tol: T,
    dim: usize,
    f: impl Fn(&[T], T) -> Vec<T> + Sync,
) -> Result<VectorEvaluation<T>> {
    body.require_interior(x)?;
    let n = body.dim();
    let res = sphere_res.unwrap_or_else(|| default_section_res(n));
    let frame = section_frame(unit_axis(n, 0), res)?;
    section_sum(body, x, &frame, tol, dim, |s| {
        let jac = s.sin.powi(n as i32 - 2);
        f(s.u, s.rho).into_iter().map(|v| v * jac).collect()
    })
}

/// Value and gradient in one pass over directions.
pub fn potential_and_gradient<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<(Evaluation<T>, VectorEvaluation<T>)> {
    let r = polar_bundle(
        body,
        x,
        params,
        Want {
            grad: true,
            hess: false,
        },
    )?;
    Ok((r.value, r.grad))
}

/// Value, gradient and Hessian diagonal in one pass over directions.
pub fn evaluate_all<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<PotentialReport<T>> {
    polar_bundle(
        body,
        x,
        params,
        Want {
            grad: true,
            hess: true,
        },
    )
}

/// Hessian diagonal from the one-pass route (independent of the per-axis sections).
pub fn hessian_diag_polar<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<VectorEvaluation<T>> {
    Ok(polar_bundle(
        body,
        x,
        params,
        Want {
            grad: false,
            hess: true,
        },
    )?
    .hessian_diag)
}

/// Value, gradient and Hessian diagonal by the per-axis section route.
pub fn report<T: Real>(
    body: &ConvexBody<T>,
    x: &[T],
    params: &PotentialParams<T>,
) -> Result<PotentialReport<T>> {
    Ok(PotentialReport {
        value: potential(body, x, params)?,
        grad: gradient(body, x, params)?,
        hessian_diag: hessian_diag_all(body, x, params)?,
    })
}
