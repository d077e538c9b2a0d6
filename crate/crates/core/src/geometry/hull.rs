//! Euclidean projection onto the convex hull of a finite point set.
//!
//! Uses Wolfe's minimum-norm-point iteration on the translated vertex set, which
//! terminates finitely in exact arithmetic and works in any dimension without a facet
//! enumeration.

use crate::real::{dot, Real};

/// Projection result: the nearest hull point and its distance to the query.
#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub point: Vec<T>,
    pub dist: T,
}

/// Vertex set stored row-major for repeated projections.
#[derive(Clone, Debug)]
pub struct HullProjector<T> {
    n: usize,
    verts: Vec<T>,
}

impl<T: Real> HullProjector<T> {
    pub fn new(points: &[Vec<T>]) -> Self {
        let n = points.first().map_or(0, |p| p.len());
        let mut verts = Vec::with_capacity(points.len() * n);
        for p in points {
            verts.extend_from_slice(p);
        }
        Self { n, verts }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.verts.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> &[T] {
        &self.verts[i * self.n..(i + 1) * self.n]
    }

    /// Largest value of `v . p` over the vertices.
    pub fn support(&self, v: &[T]) -> T {
        (0..self.len())
            .map(|i| dot(self.vertex(i), v))
            .fold(T::neg_infinity(), T::max)
    }

    pub fn project(&self, q: &[T]) -> Projection<T> {
        match self.len() {
            1 => {
                let p = self.vertex(0).to_vec();
                let d = crate::real::dist(&p, q);
                Projection { point: p, dist: d }
            }
            2 => self.project_segment(q),
            _ => self.project_wolfe(q),
        }
    }

    pub fn distance(&self, q: &[T]) -> T {
        self.project(q).dist
    }

    fn project_segment(&self, q: &[T]) -> Projection<T> {
        let a = self.vertex(0);
        let b = self.vertex(1);
        let mut ab2 = T::zero();
        let mut aq_ab = T::zero();
        for k in 0..self.n {
            let e = b[k] - a[k];
            ab2 = ab2 + e * e;
            aq_ab = aq_ab + (q[k] - a[k]) * e;
        }
        let t = if ab2 > T::zero() {
            (aq_ab / ab2).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        let point: Vec<T> = (0..self.n).map(|k| a[k] + t * (b[k] - a[k])).collect();
        let d = crate::real::dist(&point, q);
        Projection { point, dist: d }
    }

    fn project_wolfe(&self, q: &[T]) -> Projection<T> {
        let n = self.n;
        let m = self.len();
        // Translated vertices y_i = v_i - q, computed on the fly.
        let y = |i: usize, k: usize| self.verts[i * n + k] - q[k];
        let ydot = |i: usize, x: &[T]| (0..n).fold(T::zero(), |acc, k| acc + y(i, k) * x[k]);
        let yy = |i: usize, j: usize| (0..n).fold(T::zero(), |acc, k| acc + y(i, k) * y(j, k));

        let scale2 = (0..m).map(|i| yy(i, i)).fold(T::zero(), T::max);
        let eps = T::epsilon();
        let gap_tol = eps * T::lit(16.0) * scale2;
        let weight_tol = eps * T::lit(64.0);

        // Start from the vertex nearest the query.
        let first = (0..m)
            .min_by(|&a, &b| yy(a, a).partial_cmp(&yy(b, b)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(0);
        let mut set: Vec<usize> = vec![first];
        let mut lambda: Vec<T> = vec![T::one()];
        let mut x: Vec<T> = (0..n).map(|k| y(first, k)).collect();

        let max_major = 8 * (m + n) + 16;
        for _ in 0..max_major {
            let xx = dot(&x, &x);
            if xx <= eps * eps * scale2 {
                break;
            }
            let (j, best) = (0..m)
                .map(|i| (i, ydot(i, &x)))
                .fold((usize::MAX, T::infinity()), |acc, it| if it.1 < acc.1 { it } else { acc });
            if xx - best <= gap_tol || set.contains(&j) {
                break;
            }
            set.push(j);
            lambda.push(T::zero());

            // Minor cycle: move toward the affine minimizer, dropping vertices whose
            // weights hit zero.
            let mut minor_guard = 0;
            loop {
                minor_guard += 1;
                let Some(mu) = affine_min(&set, &yy) else {
                    // Affinely dependent support set: drop the newest vertex and stop.
                    set.pop();
                    lambda.pop();
                    break;
                };
                if mu.iter().all(|&w| w > weight_tol) {
                    lambda = mu;
                    break;
                }
                let mut theta = T::one();
                for (l, w) in lambda.iter().zip(&mu) {
                    if *w <= weight_tol {
                        let denom = *l - *w;
                        if denom > T::zero() {
                            theta = theta.min(*l / denom);
                        }
                    }
                }
                for (l, w) in lambda.iter_mut().zip(&mu) {
                    *l = *l + theta * (*w - *l);
                }
                let mut k = 0;
                while k < set.len() {
                    if lambda[k] <= weight_tol {
                        set.remove(k);
                        lambda.remove(k);
                    } else {
                        k += 1;
                    }
                }
                let total: T = lambda.iter().copied().sum();
                for l in lambda.iter_mut() {
                    *l = *l / total;
                }
                if set.is_empty() || minor_guard > m + n + 4 {
                    break;
                }
            }
            if set.is_empty() {
                set.push(first);
                lambda = vec![T::one()];
            }
            for (k, xk) in x.iter_mut().enumerate() {
                *xk = set
                    .iter()
                    .zip(&lambda)
                    .fold(T::zero(), |acc, (&i, &l)| acc + l * y(i, k));
            }
        }
        let dist = dot(&x, &x).sqrt();
        let point = x.iter().zip(q).map(|(&a, &b)| a + b).collect();
        Projection { point, dist }
    }
}

/// Weights of the minimum-norm point of the affine hull of `set`, from the bordered
/// Gram system.
fn affine_min<T: Real>(set: &[usize], yy: &impl Fn(usize, usize) -> T) -> Option<Vec<T>> {
    let k = set.len();
    if k == 1 {
        return Some(vec![T::one()]);
    }
    let dim = k + 1;
    let mut a = vec![T::zero(); dim * dim];
    let mut b = vec![T::zero(); dim];
    for (r, &i) in set.iter().enumerate() {
        for (c, &j) in set.iter().enumerate() {
            a[r * dim + c] = yy(i, j);
        }
        a[r * dim + k] = T::one();
        a[k * dim + r] = T::one();
    }
    b[k] = T::one();
    crate::real::solve_dense(&mut a, &mut b, dim, T::epsilon() * T::lit(8.0))?;
    b.truncate(k);
    Some(b)
}
