//! Dimension reduction: coordinate slices `{x_k = t}` of a large cube, the
//! face/edge quantity of each slice, and the mass recovered by integrating
//! those quantities over `t`.

mod lemma;
mod restrict;

pub use lemma::{face_sum_residual, slice_angle_residual, slice_ladders, SLICE_LADDER_RADII};
pub use restrict::{restrict, RestrictedField};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrinsic::clamped_acos;
use crate::linalg::{sub, unit, SquareMatrix};
use crate::massflux::{polyhedral_integrals, sphere_volume_constant};
use crate::polytope::coordinate_cube;
use crate::quadrature::{interval_rule, nodes_per_axis};
use crate::scalar::Scalar;
use crate::tensorfield::{first_kind_from_derivative, MetricField};

/// Gauss–Legendre nodes per axis for the `t` integral.
pub const DEFAULT_T_NODES: usize = 32;

/// Face and edge integrals over the boundary of the cube `[-L, L]^{n−1}` in `{x_k = t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SliceQuantity<T> {
    /// Dropped axis, zero based.
    pub axis: usize,
    pub t: T,
    pub half_width: T,
    /// `−∫ H̃ dσ` over the slice faces.
    pub face_integral: T,
    /// `∫ (α̃ − π/2) dμ` over the slice edges.
    pub edge_integral: T,
    /// `(face_integral + edge_integral) / ((n−2) ω_{n−2})`.
    pub value: T,
}

impl<T: Scalar> SliceQuantity<T> {
    fn new(n: usize, axis: usize, t: T, half_width: T, face_integral: T, edge_integral: T) -> Self {
        let norm = T::from_usize_lossy(n - 2) * sphere_volume_constant::<T>(n - 2);
        Self {
            axis,
            t,
            half_width,
            face_integral,
            edge_integral,
            value: (face_integral + edge_integral) / norm,
        }
    }

    /// The unnormalized sum; for three-dimensional fields this is `2π − ∫κ ds − β`.
    pub fn gauss_bonnet_value(&self) -> T {
        self.face_integral + self.edge_integral
    }
}

fn check_slice<T: Scalar>(field: &MetricField<T>, k: usize, t: T, half_width: T) -> Result<()> {
    let n = field.dim();
    if k >= n {
        return Err(Error::InvalidParameter(format!("slice axis {k} out of range for dimension {n}")));
    }
    if !(half_width > T::zero()) || !half_width.is_finite() {
        return Err(Error::InvalidParameter(format!("half width must be positive, got {half_width}")));
    }
    if !(t.abs() <= half_width) {
        return Err(Error::InvalidParameter(format!("slice offset {t} outside [-{half_width}, {half_width}]")));
    }
    if !(half_width > field.inner_radius()) {
        return Err(Error::InsideCutoff {
            radius: half_width.as_f64(),
            cutoff: field.inner_radius().as_f64(),
        });
    }
    Ok(())
}

/// Slice quantity from the mean curvature of the slice-cube faces and the
/// angles along its edges, all measured in `g` restricted to `{x_k = t}`.
///
/// For three-dimensional fields the faces are segments and the edges are the
/// four corners, counted with unit weight.
pub fn slice_quantity<T: Scalar>(
    field: &MetricField<T>,
    k: usize,
    t: T,
    half_width: T,
    level: usize,
) -> Result<SliceQuantity<T>> {
    let n = field.dim();
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    check_slice(field, k, t, half_width)?;
    let slice = restrict(field, k, t)?;
    let cube = coordinate_cube(n - 1, half_width)?;
    let (face, edge) = polyhedral_integrals(&slice, &cube, level)?;
    Ok(SliceQuantity::new(n, k, t, half_width, face, edge))
}

/// Slice quantity of a three-dimensional field by Gauss–Bonnet: geodesic
/// curvature of the four sides of the square and turning angles at its corners.
pub fn slice_quantity_3d<T: Scalar>(
    field: &MetricField<T>,
    k: usize,
    t: T,
    half_width: T,
    level: usize,
) -> Result<SliceQuantity<T>> {
    if field.dim() != 3 {
        return Err(Error::InvalidParameter(format!(
            "Gauss-Bonnet slices need a 3-dimensional field, got {}",
            field.dim()
        )));
    }
    check_slice(field, k, t, half_width)?;
    let slice = restrict(field, k, t)?;
    let l = half_width;
    let (nodes, weights) = interval_rule(-l, l, nodes_per_axis(level));
    let mut curvature = T::zero();
    for axis in 0..2 {
        for sign in [T::one(), -T::one()] {
            let along = 1 - axis;
            let tangent = unit::<T>(2, along);
            let outward = {
                let mut v = vec![T::zero(); 2];
                v[axis] = sign;
                v
            };
            for (&s, &w) in nodes.iter().zip(&weights) {
                let mut y = vec![T::zero(); 2];
                y[axis] = sign * l;
                y[along] = s;
                let (kappa, speed) = geodesic_curvature(&slice, &tangent, &outward, &y)?;
                curvature += w * kappa * speed;
            }
        }
    }
    let corners = [[l, l], [-l, l], [-l, -l], [l, -l]];
    let mut turning = T::zero();
    for c in 0..4 {
        let here = &corners[c];
        let prev = &corners[(c + 3) % 4];
        let next = &corners[(c + 1) % 4];
        let g = slice.coeff(here)?;
        let u = sub(prev, here);
        let v = sub(next, here);
        let cos = g.bilinear(&u, &v) / (g.bilinear(&u, &u) * g.bilinear(&v, &v)).sqrt();
        turning += T::PI() - clamped_acos(cos)?;
    }
    let face = -curvature;
    let edge = T::TAU() - turning;
    Ok(SliceQuantity::new(3, k, t, half_width, face, edge))
}

/// `(κ, |T̄|_g)` for the straight line through `y` with direction `T̄`;
/// `κ = −Γ_{l,ij} N^l T^i T^j` with `T` the `g`-unit tangent and `N` its
/// `g`-rotation pointing to the side of `outward`.
fn geodesic_curvature<T: Scalar>(
    slice: &MetricField<T>,
    tangent: &[T],
    outward: &[T],
    y: &[T],
) -> Result<(T, T)> {
    let g: SquareMatrix<T> = slice.coeff(y)?;
    let ginv = g.inverse()?;
    let speed = g.bilinear(tangent, tangent).sqrt();
    let tt: Vec<T> = tangent.iter().map(|&c| c / speed).collect();
    // `ε_{ij} T^j` annihilates `T`.
    let annihilator = [tt[1], -tt[0]];
    let normal = ginv.mul_vec(&annihilator);
    let len = g.bilinear(&normal, &normal).sqrt();
    if !(len > T::zero()) {
        return Err(Error::Singular("slice normal"));
    }
    let side = if normal[0] * outward[0] + normal[1] * outward[1] < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    let normal: Vec<T> = normal.iter().map(|&c| side * c / len).collect();
    let first = first_kind_from_derivative(&slice.dcoeff(y)?);
    let mut kappa = T::zero();
    for l in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                kappa -= first[(l, i, j)] * normal[l] * tt[i] * tt[j];
            }
        }
    }
    Ok((kappa, speed))
}

/// Gauss–Bonnet route for three-dimensional fields, face/edge route otherwise.
pub fn slice_value<T: Scalar>(
    field: &MetricField<T>,
    k: usize,
    t: T,
    half_width: T,
    level: usize,
) -> Result<SliceQuantity<T>> {
    if field.dim() == 3 {
        slice_quantity_3d(field, k, t, half_width, level)
    } else {
        slice_quantity(field, k, t, half_width, level)
    }
}

/// Slice quantities at the Gauss–Legendre nodes of `[-L, L]` for each axis in `axes`,
/// ordered by axis and then by node.
pub fn slice_profile<T: Scalar>(
    field: &MetricField<T>,
    axes: &[usize],
    half_width: T,
    level: usize,
    t_nodes: usize,
) -> Result<Vec<SliceQuantity<T>>> {
    if t_nodes == 0 {
        return Err(Error::InvalidParameter("at least one t node is required".into()));
    }
    let (nodes, _) = interval_rule(-half_width, half_width, t_nodes);
    let jobs: Vec<(usize, T)> = axes
        .iter()
        .flat_map(|&k| nodes.iter().map(move |&t| (k, t)))
        .collect();
    jobs.par_iter()
        .map(|&(k, t)| slice_value(field, k, t, half_width, level))
        .collect()
}

/// `ω_{n−2} / ((n−1) ω_{n−1}) · Σ_k ∫_{−L}^{L} 𝔪_k(t, L) dt` by Gauss–Legendre in `t`.
pub fn slice_mass_integral<T: Scalar>(
    field: &MetricField<T>,
    half_width: T,
    level: usize,
    t_nodes: usize,
) -> Result<T> {
    let n = field.dim();
    let cutoff = field.smallness_radius().max(field.inner_radius());
    if !(half_width > cutoff) {
        return Err(Error::InsideCutoff {
            radius: half_width.as_f64(),
            cutoff: cutoff.as_f64(),
        });
    }
    let axes: Vec<usize> = (0..n).collect();
    let profile = slice_profile(field, &axes, half_width, level, t_nodes)?;
    let (_, weights) = interval_rule(-half_width, half_width, t_nodes);
    let total = profile
        .iter()
        .zip(weights.iter().cycle())
        .fold(T::zero(), |acc, (q, &w)| acc + w * q.value);
    let factor = sphere_volume_constant::<T>(n - 2)
        / (T::from_usize_lossy(n - 1) * sphere_volume_constant::<T>(n - 1));
    Ok(factor * total)
}
