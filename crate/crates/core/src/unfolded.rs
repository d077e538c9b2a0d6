//! Fold offsets `u_v` and the minimal unfolded region.
//!
//! For a convex body and a line `L` parallel to `v`, reflecting the part of `L` above
//! the plane `x . v = b` lands inside the body exactly when `b` is at least the height of
//! the midpoint of the chord `L ∩ body`. The cap beyond `b` therefore reflects into the
//! body iff `b` is at least every chord midpoint height whose chord reaches above `b`,
//! and `u_v` is the largest chord-midpoint height. The default method samples chords
//! through boundary points and refines the best one; [`FoldMethod::Scan`] runs the
//! literal downward scan over `b` with a reflected-sample containment test instead.

use crate::error::{Error, Result};
use crate::geometry::{reflect, BodySpec, ConvexBody};
use crate::real::{complement_basis, dot, normalized, Real};
use crate::report::{params, CaseResult, LemmaId, LemmaReport, Verdict};
use crate::quadrature::spread_directions;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FoldMethod {
    /// Largest chord-midpoint height over sampled chords, locally refined.
    Chord,
    /// Downward scan over `b` with bisection, testing reflected boundary samples.
    Scan,
}

#[derive(Clone, Copy, Debug)]
pub struct UnfoldedConfig {
    /// Boundary samples; `None` means 2048 in the plane and 8192 otherwise.
    pub samples: Option<usize>,
    pub grid_steps: usize,
    pub bisect_iters: usize,
    pub method: FoldMethod,
    /// Local refinement of the best chord (chord method only).
    pub refine: bool,
    /// Containment slack of the scan, relative to `delta + d`.
    pub containment_rel_tol: f64,
}

impl Default for UnfoldedConfig {
    fn default() -> Self {
        Self {
            samples: None,
            grid_steps: 256,
            bisect_iters: 40,
            method: FoldMethod::Chord,
            refine: true,
            containment_rel_tol: 1e-9,
        }
    }
}

impl UnfoldedConfig {
    pub fn scan() -> Self {
        Self {
            method: FoldMethod::Scan,
            ..Self::default()
        }
    }

    pub fn sample_count(&self, n: usize) -> usize {
        self.samples.unwrap_or(if n == 2 { 2048 } else { 8192 })
    }
}

/// Default number of directions for [`unfolded_region`].
pub fn default_dir_res(n: usize) -> usize {
    if n == 2 {
        720
    } else {
        64 * 128
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FoldOffset<T> {
    pub offset: T,
    /// `M_v` of the body.
    pub support: T,
    pub samples: usize,
}

/// Boundary points hit by rays from the body's base point, with outward normals.
#[derive(Clone, Debug)]
pub struct BoundarySamples<T> {
    pub rays: Vec<Vec<T>>,
    pub points: Vec<Vec<T>>,
    pub normals: Vec<Vec<T>>,
    /// Typical angular gap between neighbouring rays.
    pub spacing: T,
}

impl<T: Real> BoundarySamples<T> {
    pub fn new(body: &ConvexBody<T>, count: usize) -> Result<Self> {
        let n = body.dim();
        let x0 = body.base_point().to_vec();
        body.require_interior(&x0)?;
        let rays: Vec<Vec<T>> = spread_directions(n, count.max(4));
        let hits: Vec<_> = rays.par_iter().map(|w| body.hit_unchecked(&x0, w)).collect();
        let mut points = Vec::with_capacity(rays.len());
        let mut normals = Vec::with_capacity(rays.len());
        for (w, h) in rays.iter().zip(hits) {
            let h = h.ok_or_else(|| Error::Domain("ray cast from the base point failed".into()))?;
            points.push(x0.iter().zip(w).map(|(&a, &b)| a + h.rho * b).collect());
            normals.push(h.normal);
        }
        // Solid angle per sample, as an angle.
        let m = rays.len() as f64;
        let spacing = if n == 2 {
            std::f64::consts::TAU / m
        } else {
            let area = crate::quadrature::sphere_area::<f64>(n - 1);
            (area / m).powf(1.0 / (n as f64 - 1.0))
        };
        Ok(Self {
            rays,
            points,
            normals,
            spacing: T::lit(spacing),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Chords whose estimated midpoint error exceeds this fraction of `delta + d` are
/// skipped: near tangency the endpoints are ill-conditioned.
const CHORD_REL_ERR: f64 = 1e-10;

/// Height of the midpoint of the chord parallel to `v` through boundary point `p`, or
/// `None` when the ray casts fail or the endpoints are too ill-conditioned.
fn chord_mid<T: Real>(body: &ConvexBody<T>, p: &[T], v: &[T], neg_v: &[T]) -> Option<T> {
    let up = body.exit_along(p, v, T::zero())?;
    let down = body.exit_along(p, neg_v, T::zero())?;
    // An endpoint residual of a few ulps moves the endpoint by that much over |N . v|.
    let resid = T::lit(64.0) * T::epsilon() * body.scale();
    let tiny = T::min_positive_value();
    let err = resid / dot(&up.normal, v).abs().max(tiny) + resid / dot(&down.normal, v).abs().max(tiny);
    if err > T::lit(CHORD_REL_ERR) * body.scale() {
        return None;
    }
    Some(dot(p, v) + T::lit(0.5) * (up.rho - down.rho))
}

fn chord_mid_from_ray<T: Real>(body: &ConvexBody<T>, w: &[T], v: &[T], neg_v: &[T]) -> Option<T> {
    let x0 = body.base_point();
    let h = body.hit_unchecked(x0, w)?;
    let p: Vec<T> = x0.iter().zip(w).map(|(&a, &b)| a + h.rho * b).collect();
    chord_mid(body, &p, v, neg_v)
}

fn check_direction<T: Real>(body: &ConvexBody<T>, v: &[T]) -> Result<()> {
    if v.len() != body.dim() {
        return Err(Error::DimensionMismatch {
            expected: body.dim(),
            got: v.len(),
        });
    }
    let l = crate::real::norm(v);
    if (l - T::one()).abs() > T::lit(1e-12) {
        return Err(Error::NotUnit {
            norm: l.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `u_v` of `body` for a unit vector `v`.
pub fn fold_offset<T: Real>(body: &ConvexBody<T>, v: &[T], cfg: &UnfoldedConfig) -> Result<FoldOffset<T>> {
    check_direction(body, v)?;
    let samples = BoundarySamples::new(body, cfg.sample_count(body.dim()))?;
    fold_offset_with(body, &samples, v, cfg)
}

/// [`fold_offset`] with precomputed boundary samples.
pub fn fold_offset_with<T: Real>(
    body: &ConvexBody<T>,
    samples: &BoundarySamples<T>,
    v: &[T],
    cfg: &UnfoldedConfig,
) -> Result<FoldOffset<T>> {
    check_direction(body, v)?;
    let support = body.support(v)?;
    let offset = match cfg.method {
        FoldMethod::Chord => chord_offset(body, samples, v, cfg.refine),
        FoldMethod::Scan => scan_offset(body, samples, v, support, cfg),
    };
    Ok(FoldOffset {
        offset: offset.min(support),
        support,
        samples: samples.len(),
    })
}

fn chord_offset<T: Real>(body: &ConvexBody<T>, s: &BoundarySamples<T>, v: &[T], refine: bool) -> T {
    let neg_v: Vec<T> = v.iter().map(|&c| -c).collect();
    // Each chord is represented by its top endpoint, where the normal has N . v >= 0.
    // A chord's midpoint lies below its top, so samples are visited by decreasing
    // height and the loop stops once no remaining top can beat the best midpoint.
    let mut order: Vec<(T, usize)> = s
        .points
        .iter()
        .zip(&s.normals)
        .enumerate()
        .filter(|(_, (_, nrm))| dot(nrm, v) >= -T::lit(1e-9))
        .map(|(i, (p, _))| (dot(p, v), i))
        .collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut best = T::neg_infinity();
    let mut best_i = None;
    for &(h, i) in &order {
        if h <= best {
            break;
        }
        if let Some(m) = chord_mid(body, &s.points[i], v, &neg_v) {
            if m > best {
                best = m;
                best_i = Some(i);
            }
        }
    }
    let Some(i) = best_i else {
        return best;
    };
    if !refine {
        return best;
    }
    // Compass search over the ray direction around the best sample.
    let mut w = s.rays[i].clone();
    let mut step = s.spacing;
    let floor = s.spacing * T::lit(1e-7);
    while step > floor {
        let basis = complement_basis(&w);
        let mut moved = false;
        for b in &basis {
            for sgn in [T::one(), -T::one()] {
                let trial: Vec<T> = w.iter().zip(b).map(|(&a, &c)| a + sgn * step * c).collect();
                let trial = normalized(&trial);
                if let Some(m) = chord_mid_from_ray(body, &trial, v, &neg_v) {
                    if m > best {
                        best = m;
                        w = trial;
                        moved = true;
                        break;
                    }
                }
            }
            if moved {
                break;
            }
        }
        if !moved {
            step = step * T::lit(0.5);
        }
    }
    best
}

/// Whether every reflected sample of the cap `{x . v > b}` lies in the body.
fn cap_reflects_inside<T: Real>(body: &ConvexBody<T>, s: &BoundarySamples<T>, v: &[T], b: T, tol: T) -> bool {
    s.points
        .iter()
        .filter(|p| dot(p, v) > b)
        .all(|p| body.contains_with_tol(&reflect(p, v, b), tol))
}

fn scan_offset<T: Real>(
    body: &ConvexBody<T>,
    s: &BoundarySamples<T>,
    v: &[T],
    support: T,
    cfg: &UnfoldedConfig,
) -> T {
    let neg_v: Vec<T> = v.iter().map(|&c| -c).collect();
    let lowest = -body.support(&neg_v).unwrap_or(-support);
    let tol = T::lit(cfg.containment_rel_tol) * body.scale();
    let steps = cfg.grid_steps.max(1);
    let h = (support - lowest) / T::from_count(steps);
    let mut pass_b = support;
    for k in 1..=steps {
        let b = support - T::from_count(k) * h;
        if cap_reflects_inside(body, s, v, b, tol) {
            pass_b = b;
            continue;
        }
        let (mut lo, mut hi) = (b, pass_b);
        for _ in 0..cfg.bisect_iters {
            let mid = T::lit(0.5) * (lo + hi);
            if cap_reflects_inside(body, s, v, mid, tol) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        return hi;
    }
    pass_b
}

/// Half-space description `{x : x . v <= u_v}` over sampled directions plus the
/// vertices of their intersection (planar and spatial bodies only).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnfoldedRegion<T> {
    pub directions: Vec<Vec<T>>,
    pub offsets: Vec<T>,
    pub hull_points: Vec<Vec<T>>,
    pub samples: usize,
}

impl<T: Real> UnfoldedRegion<T> {
    /// Largest `x . v - u_v`; nonpositive inside the region.
    pub fn violation(&self, x: &[T]) -> T {
        self.directions
            .iter()
            .zip(&self.offsets)
            .map(|(v, &u)| dot(x, v) - u)
            .fold(T::neg_infinity(), T::max)
    }

    pub fn contains(&self, x: &[T], tol: T) -> bool {
        self.violation(x) <= tol
    }

    /// Largest distance between two hull points.
    pub fn diameter(&self) -> T {
        let mut d = T::zero();
        for (i, a) in self.hull_points.iter().enumerate() {
            for b in &self.hull_points[i + 1..] {
                d = d.max(crate::real::dist(a, b));
            }
        }
        d
    }
}

/// Directions used by [`unfolded_region`]: equal angles in the plane and a Fibonacci
/// lattice in space.
pub fn region_directions<T: Real>(n: usize, dir_res: usize) -> Vec<Vec<T>> {
    spread_directions(n, dir_res)
}

/// Evaluates `u_v` over `dir_res` directions and intersects the half-spaces.
pub fn unfolded_region<T: Real>(
    body: &ConvexBody<T>,
    dir_res: usize,
    cfg: &UnfoldedConfig,
) -> Result<UnfoldedRegion<T>> {
    if dir_res < 8 {
        return Err(Error::InvalidSpec(format!("need at least 8 directions, got {dir_res}")));
    }
    let n = body.dim();
    let samples = BoundarySamples::new(body, cfg.sample_count(n))?;
    let directions = region_directions::<T>(n, dir_res);
    let offsets: Result<Vec<T>> = directions
        .par_iter()
        .map(|v| fold_offset_with(body, &samples, v, cfg).map(|f| f.offset))
        .collect();
    let offsets = offsets?;
    let slack = T::lit(1e-9) * body.scale();
    let bounds: Vec<(T, T)> = (0..n)
        .map(|j| {
            let e = crate::real::unit_axis::<T>(n, j);
            let hi = body.core_support(&e) + body.delta();
            let lo = -body.core_support(&e.iter().map(|&c| -c).collect::<Vec<_>>()) - body.delta();
            (lo - slack, hi + slack)
        })
        .collect();
    let planes: Vec<(&[T], T)> = directions
        .iter()
        .zip(&offsets)
        .map(|(v, &u)| (v.as_slice(), u + slack))
        .collect();
    let eps = T::lit(1e-12) * body.scale();
    let hull_points = match n {
        2 => clip_polygon(&bounds, &planes, eps),
        3 => clip_polyhedron(&bounds, &planes, eps),
        _ => Vec::new(),
    };
    Ok(UnfoldedRegion {
        directions,
        offsets,
        hull_points,
        samples: samples.len(),
    })
}

fn push_unique<T: Real>(pts: &mut Vec<Vec<T>>, p: Vec<T>, eps: T) {
    if !pts.iter().any(|q| crate::real::dist(q, &p) <= eps) {
        pts.push(p);
    }
}

/// Sutherland-Hodgman clipping of a box by half-planes `x . v <= u`.
fn clip_polygon<T: Real>(bounds: &[(T, T)], planes: &[(&[T], T)], eps: T) -> Vec<Vec<T>> {
    let (x0, x1) = bounds[0];
    let (y0, y1) = bounds[1];
    let mut poly = vec![vec![x0, y0], vec![x1, y0], vec![x1, y1], vec![x0, y1]];
    for &(v, u) in planes {
        poly = clip_face(&poly, v, u, eps, &mut Vec::new());
        if poly.is_empty() {
            break;
        }
    }
    let mut out = Vec::new();
    for p in poly {
        push_unique(&mut out, p, eps);
    }
    out
}

/// Clips one convex polygon, appending points lying on the cutting plane to `cut`.
fn clip_face<T: Real>(poly: &[Vec<T>], v: &[T], u: T, eps: T, cut: &mut Vec<Vec<T>>) -> Vec<Vec<T>> {
    let m = poly.len();
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        let a = &poly[i];
        let b = &poly[(i + 1) % m];
        let da = dot(a, v) - u;
        let db = dot(b, v) - u;
        if da <= eps {
            out.push(a.clone());
            if da.abs() <= eps {
                cut.push(a.clone());
            }
        }
        if (da < -eps && db > eps) || (da > eps && db < -eps) {
            let t = da / (da - db);
            let p: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x + t * (y - x)).collect();
            cut.push(p.clone());
            out.push(p);
        }
    }
    out
}

/// Clips a box, stored as convex faces, by half-spaces `x . v <= u`.
fn clip_polyhedron<T: Real>(bounds: &[(T, T)], planes: &[(&[T], T)], eps: T) -> Vec<Vec<T>> {
    let corner = |i: usize, j: usize, k: usize| {
        vec![
            if i == 0 { bounds[0].0 } else { bounds[0].1 },
            if j == 0 { bounds[1].0 } else { bounds[1].1 },
            if k == 0 { bounds[2].0 } else { bounds[2].1 },
        ]
    };
    let mut faces: Vec<Vec<Vec<T>>> = vec![
        vec![corner(0, 0, 0), corner(0, 1, 0), corner(0, 1, 1), corner(0, 0, 1)],
        vec![corner(1, 0, 0), corner(1, 0, 1), corner(1, 1, 1), corner(1, 1, 0)],
        vec![corner(0, 0, 0), corner(0, 0, 1), corner(1, 0, 1), corner(1, 0, 0)],
        vec![corner(0, 1, 0), corner(1, 1, 0), corner(1, 1, 1), corner(0, 1, 1)],
        vec![corner(0, 0, 0), corner(1, 0, 0), corner(1, 1, 0), corner(0, 1, 0)],
        vec![corner(0, 0, 1), corner(0, 1, 1), corner(1, 1, 1), corner(1, 0, 1)],
    ];
    for &(v, u) in planes {
        let above = faces.iter().flatten().any(|p| dot(p, v) - u > eps);
        if !above {
            continue;
        }
        let mut cut = Vec::new();
        let mut next = Vec::with_capacity(faces.len() + 1);
        for f in &faces {
            let g = clip_face(f, v, u, eps, &mut cut);
            if g.len() >= 3 {
                next.push(g);
            }
        }
        let mut cap: Vec<Vec<T>> = Vec::new();
        for p in cut {
            push_unique(&mut cap, p, eps);
        }
        if cap.len() >= 3 {
            let c: Vec<T> = (0..3)
                .map(|k| cap.iter().map(|p| p[k]).sum::<T>() / T::from_count(cap.len()))
                .collect();
            let basis = complement_basis(v);
            let angle = |p: &Vec<T>| {
                let d: Vec<T> = p.iter().zip(&c).map(|(&a, &b)| a - b).collect();
                dot(&d, &basis[1]).atan2(dot(&d, &basis[0]))
            };
            cap.sort_by(|a, b| angle(a).partial_cmp(&angle(b)).unwrap_or(std::cmp::Ordering::Equal));
            next.push(cap);
        }
        faces = next;
        if faces.is_empty() {
            break;
        }
    }
    let mut out = Vec::new();
    for p in faces.into_iter().flatten() {
        push_unique(&mut out, p, eps);
    }
    out
}

/// Checks `u_v(core + delta B) <= M_v(core) + tol` over `dir_res` directions, with
/// `tol = 1e-6 d + 1e-10 (delta + d)`, the second term covering chord-endpoint error. The report's worst margin is the largest excess
/// `u_v - M_v(core)`.
pub fn check_uf_in_hull<T: Real>(
    core_spec: &BodySpec<T>,
    delta: T,
    dir_res: usize,
    cfg: &UnfoldedConfig,
) -> Result<LemmaReport<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidSpec("the hull check needs delta > 0".into()));
    }
    let mut spec = core_spec.clone();
    spec.delta = delta;
    let body = ConvexBody::new(spec)?;
    let n = body.dim();
    let samples = BoundarySamples::new(&body, cfg.sample_count(n))?;
    let directions = region_directions::<T>(n, dir_res.max(1));
    let tol = T::lit(1e-6) * body.diameter_core() + T::lit(CHORD_REL_ERR) * body.scale();
    let cases: Result<Vec<CaseResult<T>>> = directions
        .par_iter()
        .enumerate()
        .map(|(i, v)| {
            let f = fold_offset_with(&body, &samples, v, cfg)?;
            let m_core = body.core_support(v);
            let excess = f.offset - m_core;
            let mut p = params(&[("direction", T::from_count(i)), ("u_v", f.offset), ("core_support", m_core)]);
            for (k, &c) in v.iter().enumerate() {
                p.insert(format!("v{k}"), c);
            }
            Ok(CaseResult {
                params: p,
                value: excess,
                error: tol,
                verdict: if excess <= tol { Verdict::Pass } else { Verdict::Fail },
                margin: tol - excess,
                in_hypothesis: true,
            })
        })
        .collect();
    let cases = cases?;
    let worst = cases.iter().map(|c| c.value).fold(T::neg_infinity(), T::max);
    let global = params(&[
        ("n", T::from_count(n)),
        ("delta", delta),
        ("diameter", body.diameter_core()),
        ("directions", T::from_count(directions.len())),
        ("samples", T::from_count(samples.len())),
        ("tol", tol),
    ]);
    let mut r = LemmaReport::from_cases(LemmaId::UnfoldedInHull, global, cases);
    r.worst_margin = worst;
    Ok(r)
}
