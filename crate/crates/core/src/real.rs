//! Scalar abstraction and the handful of dense-vector helpers the geometry needs.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the numerics are written against (`f32` or `f64`).
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Every literal used in the crate is representable.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal is representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

#[inline]
pub fn sub<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

#[inline]
pub fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

#[inline]
pub fn scale<T: Real>(a: &[T], s: T) -> Vec<T> {
    a.iter().map(|&x| x * s).collect()
}

/// `x + s * d`
#[inline]
pub fn ray_point<T: Real>(x: &[T], d: &[T], s: T) -> Vec<T> {
    x.iter().zip(d).map(|(&a, &b)| a + s * b).collect()
}

pub fn unit_axis<T: Real>(n: usize, j: usize) -> Vec<T> {
    let mut e = vec![T::zero(); n];
    e[j] = T::one();
    e
}

pub fn normalized<T: Real>(a: &[T]) -> Vec<T> {
    let l = norm(a);
    a.iter().map(|&x| x / l).collect()
}

/// Solves a small dense system in place by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `pivot_tol` times the largest matrix entry.
pub fn solve_dense<T: Real>(a: &mut [T], b: &mut [T], n: usize, pivot_tol: T) -> Option<()> {
    let amax = a.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if amax == T::zero() {
        return None;
    }
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() <= pivot_tol * amax {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != T::zero() {
                for c in col..n {
                    let v = a[col * n + c];
                    a[r * n + c] = a[r * n + c] - f * v;
                }
                b[r] = b[r] - f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s = s - a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Affine rank of a point set, judged against `rel_tol` times the set's extent.
pub fn affine_rank<T: Real>(points: &[Vec<T>], rel_tol: T) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let n = points[0].len();
    let mut rows: Vec<Vec<T>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    let extent = rows.iter().fold(T::zero(), |m, r| m.max(norm(r)));
    if extent == T::zero() {
        return 0;
    }
    let tol = rel_tol * extent;
    let mut rank = 0;
    for col in 0..n {
        let mut piv = None;
        let mut best = tol;
        for (i, r) in rows.iter().enumerate().skip(rank) {
            if r[col].abs() > best {
                best = r[col].abs();
                piv = Some(i);
            }
        }
        let Some(pi) = piv else { continue };
        rows.swap(rank, pi);
        let pr = rows[rank].clone();
        for r in rows.iter_mut().skip(rank + 1) {
            let f = r[col] / pr[col];
            for c in col..n {
                r[c] = r[c] - f * pr[c];
            }
        }
        rank += 1;
    }
    rank
}

/// Orthonormal basis of the complement of `axis` (a unit vector), by Gram-Schmidt on
/// the coordinate axes.
pub fn complement_basis<T: Real>(axis: &[T]) -> Vec<Vec<T>> {
    let n = axis.len();
    let mut basis: Vec<Vec<T>> = vec![axis.to_vec()];
    // Start with the coordinate axes least aligned with `axis`.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        axis[a]
            .abs()
            .partial_cmp(&axis[b].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for k in order {
        if basis.len() == n {
            break;
        }
        let mut v = unit_axis::<T>(n, k);
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&v, b);
                for (vi, &bi) in v.iter_mut().zip(b) {
                    *vi = *vi - c * bi;
                }
            }
        }
        let l = norm(&v);
        if l > T::lit(1e-6) {
            basis.push(v.into_iter().map(|x| x / l).collect());
        }
    }
    basis.remove(0);
    basis
}
