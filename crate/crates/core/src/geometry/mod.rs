//! Convex cores and their parallel bodies `conv(core) + delta * B^n`.
//!
//! Bodies are kept implicit: every boundary query goes through the distance to the
//! core hull, so the same code serves balls, stadiums and rounded polytopes in any
//! dimension.

pub mod hull;

use crate::error::{Error, Result};
use crate::real::{dot, norm, ray_point, Real};
use serde::{Deserialize, Serialize};

pub use hull::{HullProjector, Projection};

pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 10;

/// User-facing description of a body: core vertices plus the parallel radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec<T> {
    pub dimension: usize,
    pub core_vertices: Vec<Vec<T>>,
    pub delta: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<T>>,
}

impl<T: Real> BodySpec<T> {
    pub fn new(core_vertices: Vec<Vec<T>>, delta: T) -> Self {
        let dimension = core_vertices.first().map_or(0, |v| v.len());
        Self {
            dimension,
            core_vertices,
            delta,
            base_point: None,
        }
    }

    /// Ball of radius `radius` centered at `center`.
    pub fn ball(center: Vec<T>, radius: T) -> Self {
        Self::new(vec![center], radius)
    }

    pub fn with_base_point(mut self, p: Vec<T>) -> Self {
        self.base_point = Some(p);
        self
    }

    /// Same body moved by `t`.
    pub fn translated(&self, t: &[T]) -> Self {
        let mv = |p: &Vec<T>| p.iter().zip(t).map(|(&a, &b)| a + b).collect::<Vec<T>>();
        Self {
            dimension: self.dimension,
            core_vertices: self.core_vertices.iter().map(mv).collect(),
            delta: self.delta,
            base_point: self.base_point.as_ref().map(mv),
        }
    }
}

/// Validated body with derived quantities.
#[derive(Clone, Debug)]
pub struct ConvexBody<T> {
    spec: BodySpec<T>,
    core: HullProjector<T>,
    diameter_core: T,
    base_point: Vec<T>,
    scale: T,
    radial_tol: T,
}

/// Boundary point reached by a ray: exit distance and outward unit normal there.
#[derive(Clone, Debug)]
pub struct Hit<T> {
    pub rho: T,
    pub normal: Vec<T>,
}

/// Point of a planar section curve in polar form about the section origin.
#[derive(Clone, Copy, Debug)]
pub struct SectionPoint<T> {
    pub r: T,
    /// d r / d phi along the section curve.
    pub dr: T,
}

pub fn build_body<T: Real>(spec: BodySpec<T>) -> Result<ConvexBody<T>> {
    ConvexBody::new(spec)
}

impl<T: Real> ConvexBody<T> {
    pub fn new(spec: BodySpec<T>) -> Result<Self> {
        let n = spec.dimension;
        if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&n) {
            return Err(Error::InvalidSpec(format!(
                "dimension {n} outside {MIN_DIMENSION}..={MAX_DIMENSION}"
            )));
        }
        if spec.core_vertices.is_empty() {
            return Err(Error::InvalidSpec("core_vertices is empty".into()));
        }
        for (i, v) in spec.core_vertices.iter().enumerate() {
            if v.len() != n {
                return Err(Error::InvalidSpec(format!(
                    "vertex {i} has {} coordinates, expected {n}",
                    v.len()
                )));
            }
            if v.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidSpec(format!("vertex {i} is not finite")));
            }
        }
        if !spec.delta.is_finite() || spec.delta < T::zero() {
            return Err(Error::InvalidSpec("delta must be finite and nonnegative".into()));
        }
        let verts = &spec.core_vertices;
        let mut d = T::zero();
        for i in 0..verts.len() {
            for j in i + 1..verts.len() {
                d = d.max(crate::real::dist(&verts[i], &verts[j]));
            }
        }
        if spec.delta == T::zero() && crate::real::affine_rank(verts, T::lit(1e-9)) < n {
            return Err(Error::InvalidSpec(
                "delta = 0 requires a full-dimensional core hull".into(),
            ));
        }
        let scale = spec.delta + d;
        let mut centroid = vec![T::zero(); n];
        for v in verts {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c = *c + x;
            }
        }
        let m = T::from_count(verts.len());
        for c in centroid.iter_mut() {
            *c = *c / m;
        }
        let mut body = Self {
            core: HullProjector::new(verts),
            diameter_core: d,
            base_point: centroid,
            scale,
            radial_tol: T::lit(1e-10) * scale,
            spec,
        };
        if let Some(bp) = body.spec.base_point.clone() {
            if bp.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bp.len(),
                });
            }
            body.require_interior(&bp)?;
            body.base_point = bp;
        }
        Ok(body)
    }

    pub fn spec(&self) -> &BodySpec<T> {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dimension
    }

    pub fn delta(&self) -> T {
        self.spec.delta
    }

    /// Diameter of the core, `d = diam(conv(core))`.
    pub fn diameter_core(&self) -> T {
        self.diameter_core
    }

    /// Diameter of the whole body, `d + 2 delta`.
    pub fn diameter(&self) -> T {
        self.diameter_core + self.spec.delta + self.spec.delta
    }

    /// Length scale `delta + d` used for relative tolerances.
    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn base_point(&self) -> &[T] {
        &self.base_point
    }

    pub fn core(&self) -> &HullProjector<T> {
        &self.core
    }

    pub fn core_vertices(&self) -> &[Vec<T>] {
        &self.spec.core_vertices
    }

    pub fn radial_tol(&self) -> T {
        self.radial_tol
    }

    pub fn set_radial_tol(&mut self, tol: T) {
        self.radial_tol = tol;
    }

    fn check_unit(&self, v: &[T]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        let l = norm(v);
        if (l - T::one()).abs() > T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) {
            return Err(Error::NotUnit {
                norm: l.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Support value `M_v = max_{x in body} x . v`.
    pub fn support(&self, v: &[T]) -> Result<T> {
        self.check_unit(v)?;
        Ok(self.core.support(v) + self.spec.delta)
    }

    /// Support value of the core alone.
    pub fn core_support(&self, v: &[T]) -> T {
        self.core.support(v)
    }

    pub fn dist_to_core(&self, p: &[T]) -> T {
        self.core.distance(p)
    }

    pub fn contains(&self, p: &[T]) -> bool {
        self.contains_with_tol(p, T::lit(1e-12) * self.scale)
    }

    pub fn contains_with_tol(&self, p: &[T], tol: T) -> bool {
        self.core.distance(p) <= self.spec.delta + tol
    }

    /// Distance from `x` to the boundary, or a negative number when `x` is outside.
    ///
    /// Exact when `delta > 0` and `x` lies outside the core. Inside the core of a
    /// `delta = 0` body the value is the smallest supporting-plane distance over a fixed
    /// direction sample, which is exact once every facet is hit by some sample ray.
    pub fn clearance(&self, x: &[T]) -> T {
        let mut dc = self.core.distance(x);
        if dc <= T::lit(16.0) * T::epsilon() * self.scale {
            dc = T::zero();
        }
        let delta = self.spec.delta;
        if dc > T::zero() || delta > T::zero() {
            if dc > T::zero() {
                return delta - dc;
            }
            return delta;
        }
        let n = self.dim();
        let dirs = clearance_directions::<T>(n);
        let mut best = T::infinity();
        for u in &dirs {
            match self.hit_unchecked(x, u) {
                Some(h) => best = best.min(h.rho * dot(&h.normal, u)),
                None => return T::zero(),
            }
        }
        best
    }

    /// Fails unless `x` has clearance at least `1e-6 * (delta + d)`.
    pub fn require_interior(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let required = T::lit(1e-6) * self.scale;
        let c = self.clearance(x);
        if c >= required {
            Ok(())
        } else {
            Err(Error::NotInterior {
                clearance: c.to_f64_lossy(),
                required: required.to_f64_lossy(),
            })
        }
    }

    /// Radial function `rho(v) = sup{a >= 0 : x + a v in body}` about an interior `x`.
    pub fn radial(&self, x: &[T], v: &[T]) -> Result<T> {
        Ok(self.hit(x, v)?.rho)
    }

    /// Ray exit distance plus outward normal.
    pub fn hit(&self, x: &[T], v: &[T]) -> Result<Hit<T>> {
        self.check_unit(v)?;
        self.require_interior(x)?;
        self.hit_unchecked(x, v).ok_or(Error::NotInterior {
            clearance: 0.0,
            required: 0.0,
        })
    }

    /// Ray cast without the interiority check. The ray start must be inside the body.
    ///
    /// The exit distance is the largest root of `a -> dist(x + a v, core) - delta`, a
    /// convex function, so Newton's method started beyond the root decreases
    /// monotonically onto it. A bisection bracket guards against rounding.
    pub fn hit_unchecked(&self, x: &[T], v: &[T]) -> Option<Hit<T>> {
        self.exit_along(x, v, T::zero())
    }

    /// Largest `a >= a_min` with `x + a v` in the body, together with the outward
    /// normal there. Works from boundary points too (for chord lengths).
    pub fn exit_along(&self, x: &[T], v: &[T], a_min: T) -> Option<Hit<T>> {
        let delta = self.spec.delta;
        let mut far = T::zero();
        for i in 0..self.core.len() {
            far = far.max(crate::real::dist(self.core.vertex(i), x));
        }
        let mut hi = far + delta + T::lit(1e-3) * self.scale + T::epsilon();
        let mut lo = a_min;
        let mut a = hi;
        let step_tol = self.radial_tol;
        let h_tol = T::epsilon() * T::lit(64.0) * self.scale;
        let mut last: Option<Projection<T>> = None;
        let mut last_q: Vec<T> = Vec::new();
        for _ in 0..200 {
            let q = ray_point(x, v, a);
            let p = self.core.project(&q);
            let h = p.dist - delta;
            if h.abs() <= h_tol {
                last = Some(p);
                last_q = q;
                break;
            }
            if h < T::zero() {
                lo = a;
                a = T::lit(0.5) * (lo + hi);
                continue;
            }
            hi = a;
            let slope = if p.dist > T::zero() {
                let mut s = T::zero();
                for k in 0..q.len() {
                    s = s + v[k] * (q[k] - p.point[k]);
                }
                s / p.dist
            } else {
                T::zero()
            };
            let mut next = if slope > T::zero() {
                a - h / slope
            } else {
                T::lit(0.5) * (lo + hi)
            };
            if !(next > lo && next < hi) {
                next = T::lit(0.5) * (lo + hi);
            }
            let done = (a - next).abs() <= step_tol * T::lit(1e-3) || hi - lo <= step_tol * T::lit(1e-3);
            a = next;
            last = Some(p);
            last_q = q;
            if done {
                let q = ray_point(x, v, a);
                let p = self.core.project(&q);
                last = Some(p);
                last_q = q;
                break;
            }
        }
        let p = last?;
        if a < a_min {
            return None;
        }
        let normal = self.outward_normal(&last_q, &p, v, a, x);
        Some(Hit { rho: a, normal })
    }

    fn outward_normal(&self, q: &[T], p: &Projection<T>, v: &[T], a: T, x: &[T]) -> Vec<T> {
        let floor = T::lit(1e-7) * self.scale;
        if p.dist > floor {
            return q.iter().zip(&p.point).map(|(&a, &b)| (a - b) / p.dist).collect();
        }
        // Flat (delta = 0) boundary: step slightly outside along the ray; the projection
        // then lands on the supporting face.
        let q2 = ray_point(x, v, a + T::lit(1e-6) * self.scale);
        let p2 = self.core.project(&q2);
        if p2.dist > T::zero() {
            q2.iter()
                .zip(&p2.point)
                .map(|(&a, &b)| (a - b) / p2.dist)
                .collect()
        } else {
            v.to_vec()
        }
    }

    /// Planar-section radial function about `x` in direction `cos(phi) e + sin(phi) g`.
    pub fn section_radial(&self, x: &[T], e: &[T], g: &[T], phi: T) -> Result<T> {
        Ok(self.section_point(x, e, g, phi)?.r)
    }

    /// Section radius and its angular derivative, from the boundary normal:
    /// `r' = -r (N . u') / (N . u)`.
    pub fn section_point(&self, x: &[T], e: &[T], g: &[T], phi: T) -> Result<SectionPoint<T>> {
        self.check_unit(e)?;
        self.check_unit(g)?;
        if dot(e, g).abs() > T::lit(1e-10) {
            return Err(Error::Domain("section directions must be orthogonal".into()));
        }
        self.require_interior(x)?;
        self.section_point_unchecked(x, e, g, phi)
            .ok_or(Error::Domain("ray cast failed".into()))
    }

    pub(crate) fn section_point_unchecked(
        &self,
        x: &[T],
        e: &[T],
        g: &[T],
        phi: T,
    ) -> Option<SectionPoint<T>> {
        let (s, c) = phi.sin_cos();
        let u: Vec<T> = e.iter().zip(g).map(|(&a, &b)| c * a + s * b).collect();
        let h = self.hit_unchecked(x, &u)?;
        let du: Vec<T> = e.iter().zip(g).map(|(&a, &b)| -s * a + c * b).collect();
        let nu = dot(&h.normal, &u);
        let dr = -h.rho * dot(&h.normal, &du) / nu;
        Some(SectionPoint { r: h.rho, dr })
    }
}

/// Reflection in the hyperplane `{y : y . v = b}`.
pub fn reflect<T: Real>(p: &[T], v: &[T], b: T) -> Vec<T> {
    let s = T::lit(2.0) * (dot(p, v) - b);
    p.iter().zip(v).map(|(&x, &w)| x - s * w).collect()
}

fn clearance_directions<T: Real>(n: usize) -> Vec<Vec<T>> {
    let mut dirs = Vec::new();
    for j in 0..n {
        for s in [T::one(), -T::one()] {
            let mut e = vec![T::zero(); n];
            e[j] = s;
            dirs.push(e);
        }
    }
    dirs.extend(crate::quadrature::spread_directions::<T>(n, 64 * n));
    dirs
}
