use super::restrict::restrict;
use crate::error::{Error, Result};
use crate::extrinsic::{dihedral_angle, face_sample_point, mean_curvature_at, residual_ladder, ExpansionResidualReport};
use crate::linalg::unit;
use crate::scalar::Scalar;
use crate::tensorfield::{DecayOrder, MetricField};

/// Half widths of the slice-consistency ladders.
pub const SLICE_LADDER_RADII: [f64; 3] = [25.0, 50.0, 100.0];

fn signed_axis<T: Scalar>(n: usize, axis: usize, x: &[T]) -> Vec<T> {
    let mut e = unit::<T>(n, axis);
    if x[axis] < T::zero() {
        e[axis] = -T::one();
    }
    e
}

fn drop_axis<T: Scalar>(v: &[T], k: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &c)| c)
        .collect()
}

/// `|Σ_{k≠i} H̃_i^{(k)} − (n−2) H_i|` at a point `x` of the cube face normal to axis `i`.
pub fn face_sum_residual<T: Scalar>(field: &MetricField<T>, i: usize, x: &[T]) -> Result<T> {
    let n = field.dim();
    if i >= n || x.len() != n {
        return Err(Error::InvalidParameter(format!("face axis {i} out of range for dimension {n}")));
    }
    let nu = signed_axis(n, i, x);
    let full = mean_curvature_at(field, &nu, x)?;
    let mut sum = T::zero();
    for k in (0..n).filter(|&k| k != i) {
        let slice = restrict(field, k, x[k])?;
        sum += mean_curvature_at(&slice, &drop_axis(&nu, k), &drop_axis(x, k))?;
    }
    Ok((sum - T::from_usize_lossy(n - 2) * full).abs())
}

/// `max_k |α̃^{(k)} − α|` at a point `x` of the cube edge between the faces normal to axes `i` and `j`.
pub fn slice_angle_residual<T: Scalar>(field: &MetricField<T>, i: usize, j: usize, x: &[T]) -> Result<T> {
    let n = field.dim();
    if i >= n || j >= n || i == j || x.len() != n {
        return Err(Error::InvalidParameter(format!("edge axes ({i}, {j}) invalid for dimension {n}")));
    }
    let a = signed_axis(n, i, x);
    let b = signed_axis(n, j, x);
    let full = dihedral_angle(field, &a, &b, true, x)?.alpha;
    let mut worst = T::zero();
    for k in (0..n).filter(|&k| k != i && k != j) {
        let slice = restrict(field, k, x[k])?;
        let reduced = dihedral_angle(&slice, &drop_axis(&a, k), &drop_axis(&b, k), true, &drop_axis(x, k))?.alpha;
        worst = worst.max((reduced - full).abs());
    }
    Ok(worst)
}

/// Ladders of the face-sum and slice-angle residuals over [`SLICE_LADDER_RADII`].
pub fn slice_ladders<T: Scalar>(field: &MetricField<T>) -> Result<Vec<ExpansionResidualReport>> {
    let n = field.dim();
    let p = match field.decay_order() {
        DecayOrder::Finite(p) => Some(p.as_f64()),
        DecayOrder::Flat => None,
    };
    let radii = &SLICE_LADDER_RADII[..];
    let edge_point = |r: T| {
        let mut x = face_sample_point(n, r);
        x[1] = r;
        x
    };
    Ok(vec![
        residual_ladder("slice_face_sum", p.map(|p| 2.0 * p + 1.0), 0.5, radii, |r: T| {
            face_sum_residual(field, 0, &face_sample_point(n, r))
        })?,
        residual_ladder("slice_angle", p.map(|p| 2.0 * p), 0.5, radii, |r: T| {
            slice_angle_residual(field, 0, 1, &edge_point(r))
        })?,
    ])
}
