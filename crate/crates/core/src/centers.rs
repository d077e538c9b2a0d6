//! Extremizers of the potential (`r^{alpha-n}`-centers) by projected multistart descent,
//! and the centroid for cross-checks.

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, HullProjector};
use crate::potential::{potential_and_gradient, sphere_radial_integral, Kernel, PotentialParams};
use crate::quadrature::low_discrepancy;
use crate::real::{dist, dot, norm, Real};
use crate::unfolded::{unfolded_region, UnfoldedConfig};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Min,
    Max,
}

/// Maximize for `alpha < n` and in log mode, minimize for `alpha > n`. Riesz `alpha = n`
/// is rewritten to log mode, since the plain potential is then the constant volume.
pub fn mode_for<T: Real>(n: usize, params: &PotentialParams<T>) -> (Mode, PotentialParams<T>) {
    match params.kernel {
        Kernel::Log => (Mode::Max, *params),
        Kernel::Riesz(a) if a == T::from_count(n) => (
            Mode::Max,
            PotentialParams {
                kernel: Kernel::Log,
                ..*params
            },
        ),
        Kernel::Riesz(a) if a < T::from_count(n) => (Mode::Max, *params),
        Kernel::Riesz(_) => (Mode::Min, *params),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CenterConfig {
    pub starts: usize,
    pub max_iter: usize,
    /// Stationarity target, relative to `|V| / (delta + d)`.
    pub grad_rel_tol: f64,
    /// Steps shorter than this fraction of `delta + d` end a run.
    pub step_rel_tol: f64,
    /// Outward inflation of the search hull, relative to `delta + d`.
    pub domain_inflation: f64,
    /// Offset of the low-discrepancy seed sequence.
    pub seed: u64,
    /// Directions of the unfolded region that bounds the search when `delta = 0`.
    pub unfolded_dirs: usize,
    pub unfolded_samples: usize,
}

impl Default for CenterConfig {
    fn default() -> Self {
        Self {
            starts: 20,
            max_iter: 200,
            grad_rel_tol: 1e-9,
            step_rel_tol: 1e-12,
            domain_inflation: 1e-9,
            seed: 0x5EED,
            unfolded_dirs: 360,
            unfolded_samples: 1024,
        }
    }
}

/// Outcome of one start.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartOutcome<T> {
    pub start: Vec<T>,
    pub point: Vec<T>,
    pub value: T,
    pub grad_norm: T,
    pub iterations: usize,
    pub converged: bool,
    pub on_boundary: bool,
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CenterResult<T> {
    pub point: Vec<T>,
    pub value: T,
    /// Norm of the projected gradient at `point`.
    pub grad_norm: T,
    pub starts: usize,
    pub converged_starts: usize,
    /// Largest pairwise distance among converged endpoints.
    pub agreement_radius: T,
    pub mode: Mode,
    /// The search constraint is active at `point`.
    pub on_boundary: bool,
    pub outcomes: Vec<StartOutcome<T>>,
}

/// Convex search domain: the hull of a point set grown by `inflate`.
pub struct SearchDomain<T> {
    hull: HullProjector<T>,
    points: Vec<Vec<T>>,
    inflate: T,
}

impl<T: Real> SearchDomain<T> {
    pub fn new(points: Vec<Vec<T>>, inflate: T) -> Self {
        Self {
            hull: HullProjector::new(&points),
            points,
            inflate,
        }
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn project(&self, q: &[T]) -> Vec<T> {
        let p = self.hull.project(q);
        if p.dist <= self.inflate {
            return q.to_vec();
        }
        let s = self.inflate / p.dist;
        p.point.iter().zip(q).map(|(&a, &b)| a + s * (b - a)).collect()
    }

    /// `count` deterministic starts spread over the hull.
    pub fn seeds(&self, count: usize, seed: u64) -> Vec<Vec<T>> {
        let k = self.points.len();
        if k == 1 {
            return vec![self.points[0].clone(); count];
        }
        let offset = (seed as f64 * 0.618_033_988_749_894_8).fract();
        let dim = if k == 2 { 1 } else { k };
        low_discrepancy(dim, count, offset)
            .into_iter()
            .map(|u| {
                let w: Vec<f64> = if k == 2 {
                    vec![1.0 - u[0], u[0]]
                } else {
                    let e: Vec<f64> = u.iter().map(|&x| -(1.0 - x).ln()).collect();
                    let s: f64 = e.iter().sum();
                    e.into_iter().map(|x| x / s).collect()
                };
                let n = self.points[0].len();
                let mut p = vec![T::zero(); n];
                for (wi, v) in w.iter().zip(&self.points) {
                    for (pk, &vk) in p.iter_mut().zip(v) {
                        *pk = *pk + T::lit(*wi) * vk;
                    }
                }
                p
            })
            .collect()
    }
}

/// Hull of the core when `delta > 0`; otherwise the hull of the computed unfolded region,
/// falling back to the core if that region has no vertex list.
pub fn search_domain<T: Real>(body: &ConvexBody<T>, cfg: &CenterConfig) -> Result<SearchDomain<T>> {
    let inflate = T::lit(cfg.domain_inflation) * body.scale();
    if body.delta() > T::zero() || body.core_vertices().len() == 1 {
        return Ok(SearchDomain::new(body.core_vertices().to_vec(), inflate));
    }
    let ucfg = UnfoldedConfig {
        samples: Some(cfg.unfolded_samples),
        ..UnfoldedConfig::default()
    };
    let region = unfolded_region(body, cfg.unfolded_dirs, &ucfg)?;
    if region.hull_points.is_empty() {
        return Ok(SearchDomain::new(body.core_vertices().to_vec(), inflate));
    }
    Ok(SearchDomain::new(region.hull_points, inflate))
}

struct Objective<'a, T> {
    body: &'a ConvexBody<T>,
    params: PotentialParams<T>,
    sign: T,
}

struct Eval<T> {
    f: T,
    g: Vec<T>,
    /// Error estimates of `f` and of the gradient (max component).
    f_err: T,
    g_err: T,
}

impl<T: Real> Objective<'_, T> {
    /// `f = -V` when maximizing, `V` when minimizing.
    fn eval(&self, x: &[T]) -> Result<Eval<T>> {
        let (v, g) = potential_and_gradient(self.body, x, &self.params)?;
        let g_err = g.error.iter().copied().fold(T::zero(), T::max);
        Ok(Eval {
            f: self.sign * v.value,
            g: g.value.iter().map(|&c| self.sign * c).collect(),
            f_err: v.error,
            g_err,
        })
    }
}

/// Norm of the projected-gradient map at `x` with a short test step.
fn projected_grad_norm<T: Real>(dom: &SearchDomain<T>, x: &[T], g: &[T], scale: T) -> (T, bool) {
    let gn = norm(g);
    if gn == T::zero() {
        return (T::zero(), false);
    }
    let tau = T::lit(1e-4) * scale / gn;
    let trial: Vec<T> = x.iter().zip(g).map(|(&a, &b)| a - tau * b).collect();
    let p = dom.project(&trial);
    let moved = dist(&p, &trial) > T::lit(1e-3) * tau * gn;
    (dist(&p, x) / tau, moved)
}

fn run_start<T: Real>(
    obj: &Objective<T>,
    dom: &SearchDomain<T>,
    start: Vec<T>,
    cfg: &CenterConfig,
) -> StartOutcome<T> {
    let body = obj.body;
    let scale = body.scale();
    let step_tol = T::lit(cfg.step_rel_tol) * scale;
    let mut x = dom.project(&start);
    let fail = |x: Vec<T>, msg: String, it: usize| StartOutcome {
        start: start.clone(),
        point: x,
        value: T::nan(),
        grad_norm: T::nan(),
        iterations: it,
        converged: false,
        on_boundary: false,
        message: Some(msg),
    };
    let mut cur = match obj.eval(&x) {
        Ok(e) => e,
        Err(e) => return fail(x, e.to_string(), 0),
    };
    let gtol = |e: &Eval<T>| T::lit(cfg.grad_rel_tol) * e.f.abs() / scale + T::lit(10.0) * e.g_err;
    let gn0 = norm(&cur.g).max(T::min_positive_value());
    let mut t = T::lit(0.1) * body.diameter().max(scale) / gn0;
    let mut converged = false;
    let mut iterations = 0;
    let mut message = None;
    for it in 0..cfg.max_iter {
        iterations = it;
        let (pg, _) = projected_grad_norm(dom, &x, &cur.g, scale);
        if pg <= gtol(&cur) {
            converged = true;
            break;
        }
        let mut accepted = None;
        let mut stalled = false;
        for _ in 0..50 {
            let trial: Vec<T> = x.iter().zip(&cur.g).map(|(&a, &b)| a - t * b).collect();
            let y = dom.project(&trial);
            let s: Vec<T> = y.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            if norm(&s) <= step_tol {
                stalled = true;
                break;
            }
            match obj.eval(&y) {
                Ok(e) => {
                    let decrease = dot(&cur.g, &s);
                    let armijo = e.f <= cur.f + T::lit(1e-4) * decrease;
                    // Below quadrature resolution the value comparison is noise; accept
                    // if the new gradient still points along the step (no overshoot).
                    let noise = T::lit(10.0) * (cur.f_err + e.f_err) + T::lit(64.0) * T::epsilon() * cur.f.abs();
                    let flat = (e.f - cur.f).abs() <= noise && dot(&e.g, &s) <= T::zero();
                    if armijo || flat {
                        accepted = Some((y, s, e));
                        break;
                    }
                }
                Err(Error::NotInterior { .. }) | Err(Error::QuadratureNonConvergence { .. }) => {}
                Err(e) => {
                    message = Some(e.to_string());
                    break;
                }
            }
            t = t * T::lit(0.5);
        }
        let Some((y, s, e)) = accepted else {
            if stalled {
                let (pg, _) = projected_grad_norm(dom, &x, &cur.g, scale);
                converged = pg <= gtol(&cur) * T::lit(1e3);
                if !converged {
                    message = Some("step collapsed before stationarity".into());
                }
            } else if message.is_none() {
                message = Some("line search failed".into());
            }
            break;
        };
        // Barzilai-Borwein step for the next iteration.
        let yk: Vec<T> = e.g.iter().zip(&cur.g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &yk);
        let ss = dot(&s, &s);
        let gn = norm(&e.g).max(T::min_positive_value());
        t = if sy > T::zero() { ss / sy } else { t * T::lit(2.0) };
        t = t.min(body.diameter().max(scale) / gn);
        x = y;
        cur = e;
        iterations = it + 1;
    }
    if !converged && message.is_none() {
        message = Some("iteration limit reached".into());
    }
    let (pg, on_boundary) = projected_grad_norm(dom, &x, &cur.g, scale);
    StartOutcome {
        start,
        point: x,
        value: obj.sign * cur.f,
        grad_norm: pg,
        iterations,
        converged,
        on_boundary,
        message,
    }
}

/// Locates an extremizer of the potential by projected descent from `cfg.starts`
/// deterministic seeds.
pub fn find_center<T: Real>(
    body: &ConvexBody<T>,
    params: &PotentialParams<T>,
    cfg: &CenterConfig,
) -> Result<CenterResult<T>> {
    params.validate()?;
    if cfg.starts == 0 {
        return Err(Error::InvalidSpec("need at least one start".into()));
    }
    let n = body.dim();
    let (mode, params) = mode_for(n, params);
    let obj = Objective {
        body,
        params,
        sign: if mode == Mode::Max { -T::one() } else { T::one() },
    };
    let dom = search_domain(body, cfg)?;
    let seeds = dom.seeds(cfg.starts, cfg.seed);
    let outcomes: Vec<StartOutcome<T>> = if dom.points().len() == 1 {
        // Every start coincides.
        let one = run_start(&obj, &dom, seeds[0].clone(), cfg);
        vec![one; cfg.starts]
    } else {
        seeds
            .into_par_iter()
            .map(|s| run_start(&obj, &dom, s, cfg))
            .collect()
    };
    let good: Vec<&StartOutcome<T>> = outcomes.iter().filter(|o| o.converged).collect();
    if good.is_empty() {
        let why = outcomes
            .iter()
            .filter_map(|o| o.message.clone())
            .next()
            .unwrap_or_default();
        return Err(Error::NoConvergedStart(why));
    }
    let better = |a: &StartOutcome<T>, b: &StartOutcome<T>| {
        let (fa, fb) = (obj.sign * a.value, obj.sign * b.value);
        if fa != fb {
            return fa < fb;
        }
        a.point
            .iter()
            .zip(&b.point)
            .find(|(x, y)| x != y)
            .is_some_and(|(x, y)| x < y)
    };
    let mut best = good[0];
    for o in &good[1..] {
        if better(o, best) {
            best = o;
        }
    }
    let mut radius = T::zero();
    for (i, a) in good.iter().enumerate() {
        for b in &good[i + 1..] {
            radius = radius.max(dist(&a.point, &b.point));
        }
    }
    Ok(CenterResult {
        point: best.point.clone(),
        value: best.value,
        grad_norm: best.grad_norm,
        starts: cfg.starts,
        converged_starts: good.len(),
        agreement_radius: radius,
        mode,
        on_boundary: best.on_boundary,
        outcomes,
    })
}

/// Centroid from radial integrals about the base point `x0`:
/// `Vol = (1/n) int rho^n du` and `int y = x0 Vol + (1/(n+1)) int rho^{n+1} u du`.
pub fn centroid<T: Real>(body: &ConvexBody<T>) -> Result<Vec<T>> {
    centroid_with(body, None, T::lit(1e-12))
}

pub fn centroid_with<T: Real>(body: &ConvexBody<T>, sphere_res: Option<usize>, tol: T) -> Result<Vec<T>> {
    let n = body.dim();
    let x0 = body.base_point().to_vec();
    let nf = T::from_count(n);
    let r = sphere_radial_integral(body, &x0, sphere_res, tol, n + 1, |u, rho| {
        let rn = rho.powi(n as i32);
        let mut out = Vec::with_capacity(n + 1);
        out.push(rn / nf);
        let k = rn * rho / (nf + T::one());
        out.extend(u.iter().map(|&c| k * c));
        out
    })?;
    let vol = r.value[0];
    Ok(x0.iter().zip(&r.value[1..]).map(|(&a, &m)| a + m / vol).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BodySpec;

    #[test]
    fn centroid_examples() {
        let ball = ConvexBody::new(BodySpec::ball(vec![0.3, -1.0], 2.0)).unwrap();
        let c = centroid(&ball).unwrap();
        assert!(dist(&c, &[0.3, -1.0]) < 1e-12);
        let tri = ConvexBody::new(BodySpec::new(
            vec![vec![0.0, 0.0], vec![3.0, 0.0], vec![0.0, 3.0]],
            0.0,
        ))
        .unwrap();
        let c = centroid(&tri).unwrap();
        assert!(dist(&c, &[1.0, 1.0]) < 1e-9, "{c:?}");
        let st = ConvexBody::new(BodySpec::new(vec![vec![-1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]], 4.0)).unwrap();
        let c = centroid(&st).unwrap();
        assert!(norm(&c) < 1e-9, "{c:?}");
    }

    #[test]
    fn ball_center_is_trivial() {
        let ball = ConvexBody::new(BodySpec::ball(vec![1.0, 2.0], 1.0)).unwrap();
        let r = find_center(&ball, &PotentialParams::riesz(1.5), &CenterConfig::default()).unwrap();
        assert_eq!(r.point, vec![1.0, 2.0]);
        assert_eq!(r.agreement_radius, 0.0);
        assert_eq!(r.mode, Mode::Max);
    }

    #[test]
    fn stadium_center_at_origin() {
        let st = ConvexBody::new(BodySpec::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0]], 4.0)).unwrap();
        let cfg = CenterConfig {
            starts: 6,
            ..CenterConfig::default()
        };
        let r = find_center(&st, &PotentialParams::riesz(1.5), &cfg).unwrap();
        assert!(norm(&r.point) < 1e-6, "{:?}", r.point);
        assert!(r.agreement_radius < 1e-5 * st.diameter());
        let r = find_center(&st, &PotentialParams::riesz(3.0), &cfg).unwrap();
        assert_eq!(r.mode, Mode::Min);
        assert!(norm(&r.point) < 1e-6, "{:?}", r.point);
    }

    #[test]
    fn mode_selection() {
        let p = PotentialParams::<f64>::riesz(2.0);
        let (m, q) = mode_for(2, &p);
        assert_eq!(m, Mode::Max);
        assert!(q.is_log());
        assert_eq!(mode_for(3, &p).0, Mode::Max);
        assert_eq!(mode_for(3, &PotentialParams::<f64>::riesz(4.0)).0, Mode::Min);
    }

    #[test]
    fn seeds_stay_in_hull() {
        let dom = SearchDomain::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], 0.0);
        let s = dom.seeds(20, 7);
        assert_eq!(s.len(), 20);
        for p in &s {
            assert!(p[0] >= 0.0 && p[1] >= 0.0 && p[0] + p[1] <= 1.0 + 1e-15);
        }
        assert_eq!(s, dom.seeds(20, 7));
    }
}
