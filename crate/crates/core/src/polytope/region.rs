use crate::linalg::{cross, dot, norm, normalized, scaled, sub, unit};
use crate::scalar::Scalar;

/// Axis-aligned box in `R^n` with some coordinates pinned.
///
/// Hypercube faces pin one coordinate, hypercube edges pin two.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBox<T> {
    pub dim: usize,
    pub fixed: Vec<(usize, T)>,
    pub free: Vec<(usize, T, T)>,
}

impl<T: Scalar> AxisBox<T> {
    /// Embeds coordinates along the free axes.
    pub fn point(&self, free_coords: &[T]) -> Vec<T> {
        let mut x = vec![T::zero(); self.dim];
        for &(axis, v) in &self.fixed {
            x[axis] = v;
        }
        for (&(axis, _, _), &c) in self.free.iter().zip(free_coords) {
            x[axis] = c;
        }
        x
    }

    pub fn measure(&self) -> T {
        self.free.iter().map(|&(_, lo, hi)| hi - lo).fold(T::one(), |a, b| a * b)
    }

    fn closest_to_origin(&self) -> Vec<T> {
        let coords: Vec<T> = self
            .free
            .iter()
            .map(|&(_, lo, hi)| T::zero().max(lo).min(hi))
            .collect();
        self.point(&coords)
    }
}

/// Bounded flat piece of a face or an edge.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<T> {
    Box(AxisBox<T>),
    /// Planar vertex loop in `R^3`, counter-clockwise about the outward normal.
    Polygon(Vec<Vec<T>>),
    /// Straight segment in `R^3`.
    Segment([Vec<T>; 2]),
}

impl<T: Scalar> Region<T> {
    pub fn ambient_dim(&self) -> usize {
        match self {
            Region::Box(b) => b.dim,
            Region::Polygon(v) => v[0].len(),
            Region::Segment(s) => s[0].len(),
        }
    }

    /// Intrinsic dimension of the region.
    pub fn intrinsic_dim(&self) -> usize {
        match self {
            Region::Box(b) => b.free.len(),
            Region::Polygon(_) => 2,
            Region::Segment(_) => 1,
        }
    }

    /// Euclidean volume of the region in its own dimension.
    pub fn measure(&self) -> T {
        match self {
            Region::Box(b) => b.measure(),
            Region::Polygon(v) => T::lit(0.5) * norm(&newell(v)),
            Region::Segment([a, b]) => norm(&sub(b, a)),
        }
    }

    /// Orthonormal Euclidean basis of the region's tangent space.
    pub fn tangent_basis(&self) -> Vec<Vec<T>> {
        match self {
            Region::Box(b) => b.free.iter().map(|&(axis, _, _)| unit(b.dim, axis)).collect(),
            Region::Polygon(v) => {
                let nrm = normalized(&newell(v));
                let u = normalized(&sub(&v[1], &v[0]));
                let w = cross(&nrm, &u);
                vec![u, w]
            }
            Region::Segment([a, b]) => vec![normalized(&sub(b, a))],
        }
    }

    pub fn scaled(&self, r: T) -> Self {
        match self {
            Region::Box(b) => Region::Box(AxisBox {
                dim: b.dim,
                fixed: b.fixed.iter().map(|&(a, v)| (a, v * r)).collect(),
                free: b.free.iter().map(|&(a, lo, hi)| (a, lo * r, hi * r)).collect(),
            }),
            Region::Polygon(v) => Region::Polygon(v.iter().map(|p| scaled(p, r)).collect()),
            Region::Segment([a, b]) => Region::Segment([scaled(a, r), scaled(b, r)]),
        }
    }

    /// Euclidean distance from the coordinate origin to the region.
    pub fn distance_to_origin(&self) -> T {
        match self {
            Region::Box(b) => norm(&b.closest_to_origin()),
            Region::Segment([a, b]) => point_segment_distance(&vec![T::zero(); a.len()], a, b),
            Region::Polygon(v) => {
                let nrm = normalized(&newell(v));
                let offset = dot(&nrm, &v[0]);
                let foot = scaled(&nrm, offset);
                if polygon_contains(v, &nrm, &foot) {
                    offset.abs()
                } else {
                    let origin = vec![T::zero(); 3];
                    (0..v.len())
                        .map(|k| point_segment_distance(&origin, &v[k], &v[(k + 1) % v.len()]))
                        .fold(T::infinity(), T::min)
                }
            }
        }
    }
}

/// Newell's area vector: twice the vector area of a planar loop.
pub fn newell<T: Scalar>(v: &[Vec<T>]) -> Vec<T> {
    let mut acc = vec![T::zero(); 3];
    for k in 0..v.len() {
        let c = cross(&v[k], &v[(k + 1) % v.len()]);
        for i in 0..3 {
            acc[i] += c[i];
        }
    }
    acc
}

fn point_segment_distance<T: Scalar>(p: &[T], a: &[T], b: &[T]) -> T {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = dot(&ab, &ab);
    let s = if len2 > T::zero() {
        (dot(&ap, &ab) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let closest: Vec<T> = a.iter().zip(&ab).map(|(&ai, &d)| ai + s * d).collect();
    norm(&sub(p, &closest))
}

/// In-plane coordinates `(u, w)` of a point relative to the loop's first vertex.
pub(crate) fn plane_coords<T: Scalar>(v: &[Vec<T>], nrm: &[T], p: &[T]) -> (T, T) {
    let u = normalized(&sub(&v[1], &v[0]));
    let w = cross(nrm, &u);
    let d = sub(p, &v[0]);
    (dot(&d, &u), dot(&d, &w))
}

/// Crossing-number test of a point lying in the polygon's plane.
pub(crate) fn polygon_contains<T: Scalar>(v: &[Vec<T>], nrm: &[T], p: &[T]) -> bool {
    let pts: Vec<(T, T)> = v.iter().map(|q| plane_coords(v, nrm, q)).collect();
    let (px, py) = plane_coords(v, nrm, p);
    let mut inside = false;
    for k in 0..pts.len() {
        let (x0, y0) = pts[k];
        let (x1, y1) = pts[(k + 1) % pts.len()];
        if (y0 > py) != (y1 > py) {
            let xc = x0 + (py - y0) * (x1 - x0) / (y1 - y0);
            if px < xc {
                inside = !inside;
            }
        }
    }
    inside
}
