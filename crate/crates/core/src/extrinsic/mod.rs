//! Normals, second fundamental forms, mean curvature, dihedral angles and
//! area densities of flat faces and edges under a metric `g`.

mod residual;

pub use residual::{
    angle_defect, cos_angle_residual, density_defect, face_sample_point, residual_identity_mt,
    residual_ladder, residual_normal_expansion, residual_prop21, standard_ladders,
    ExpansionResidualReport, EXACT_RESIDUAL, LADDER_RADII,
};

use crate::error::{Error, Result};
use crate::linalg::{dot, normalized, scaled, sub, unit, SquareMatrix};
use crate::polytope::{Edge, Face, Region};
use crate::scalar::Scalar;
use crate::tensorfield::{first_kind_from_derivative, MetricField};

/// Slack allowed beyond `[-1, 1]` before an angle quotient is treated as broken data.
pub const ANGLE_CLAMP_SLACK: f64 = 1e-9;

/// Orthonormal basis of `ν̄^⊥` by Gram–Schmidt over the coordinate axes,
/// least aligned with `ν̄` first, ties broken by lower index.
pub fn tangent_basis<T: Scalar>(normal: &[T]) -> Vec<Vec<T>> {
    let n = normal.len();
    let nu = normalized(normal);
    let mut axes: Vec<usize> = (0..n).collect();
    axes.sort_by(|&a, &b| {
        nu[a]
            .abs()
            .partial_cmp(&nu[b].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(n - 1);
    let tiny = T::lit(1e-8);
    for axis in axes {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = unit(n, axis);
        for b in std::iter::once(&nu).chain(basis.iter()) {
            let c = dot(&v, b);
            v = sub(&v, &scaled(b, c));
        }
        let len = crate::linalg::norm(&v);
        if len > tiny {
            basis.push(scaled(&v, T::one() / len));
        }
    }
    basis
}

/// Geometric data of a flat face at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceFrame<T> {
    pub point: Vec<T>,
    pub euclidean_normal: Vec<T>,
    pub tangents: Vec<Vec<T>>,
    /// `g`-unit normal `ν` on the same side as `ν̄`.
    pub normal: Vec<T>,
    /// `γ_{αβ} = g(e_α, e_β)`.
    pub induced: SquareMatrix<T>,
    /// `dσ/dσ̄ = √det γ`.
    pub density: T,
}

impl<T: Scalar> FaceFrame<T> {
    pub fn new(field: &MetricField<T>, euclidean_normal: &[T], x: &[T]) -> Result<Self> {
        Self::with_tangents(field, euclidean_normal, tangent_basis(euclidean_normal), x)
    }

    pub fn with_tangents(
        field: &MetricField<T>,
        euclidean_normal: &[T],
        tangents: Vec<Vec<T>>,
        x: &[T],
    ) -> Result<Self> {
        let g = field.coeff(x)?;
        let ginv = g.inverse()?;
        let normal = unit_normal_from(&ginv, euclidean_normal)?;
        let induced = g.gram(&tangents);
        let det = induced.determinant();
        if !(det > T::zero()) {
            return Err(Error::Singular("induced metric"));
        }
        Ok(Self {
            point: x.to_vec(),
            euclidean_normal: euclidean_normal.to_vec(),
            tangents,
            normal,
            induced,
            density: det.sqrt(),
        })
    }

    /// `A_{αβ} = −g(D_{e_α} e_β, ν) = −ν^l Γ_{l,ij} e_α^i e_β^j`.
    pub fn second_fundamental_form(&self, field: &MetricField<T>) -> Result<SquareMatrix<T>> {
        let first = first_kind_from_derivative(&field.dcoeff(&self.point)?);
        Ok(second_form(&first, &self.normal, &self.tangents))
    }

    pub fn mean_curvature(&self, field: &MetricField<T>) -> Result<T> {
        let a = self.second_fundamental_form(field)?;
        trace_against(&self.induced, &a)
    }

    /// `(g(ν, ν) − 1, max_α |g(ν, e_α)|)`.
    pub fn normalization_defect(&self, field: &MetricField<T>) -> Result<(T, T)> {
        let g = field.coeff(&self.point)?;
        let nn = g.bilinear(&self.normal, &self.normal) - T::one();
        let worst = self
            .tangents
            .iter()
            .map(|e| g.bilinear(&self.normal, e).abs())
            .fold(T::zero(), T::max);
        Ok((nn, worst))
    }
}

pub(crate) fn unit_normal_from<T: Scalar>(ginv: &SquareMatrix<T>, nu_bar: &[T]) -> Result<Vec<T>> {
    let raised = ginv.mul_vec(nu_bar);
    let q = dot(&raised, nu_bar);
    if !(q > T::zero()) {
        return Err(Error::Singular("normal covector has nonpositive length"));
    }
    Ok(scaled(&raised, T::one() / q.sqrt()))
}

fn second_form<T: Scalar>(
    first: &crate::linalg::Tensor3<T>,
    normal: &[T],
    tangents: &[Vec<T>],
) -> SquareMatrix<T> {
    let n = normal.len();
    // Γ_{ν,ij} = ν^l Γ_{l,ij}
    let gnu = SquareMatrix::from_fn(n, |i, j| (0..n).map(|l| normal[l] * first[(l, i, j)]).sum());
    SquareMatrix::from_fn(tangents.len(), |a, b| -gnu.bilinear(&tangents[a], &tangents[b]))
}

/// `γ^{αβ} A_{αβ}`.
fn trace_against<T: Scalar>(induced: &SquareMatrix<T>, a: &SquareMatrix<T>) -> Result<T> {
    if induced.dim() == 0 {
        return Ok(T::zero());
    }
    let inv = induced.inverse()?;
    let k = a.dim();
    Ok((0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .map(|(i, j)| inv[(i, j)] * a[(j, i)])
        .sum())
}

/// `ν^i = g^{ij} ν̄_j / (ν̄_i ν̄_j g^{ij})^{1/2}`.
pub fn g_unit_normal<T: Scalar>(field: &MetricField<T>, face: &Face<T>, x: &[T]) -> Result<Vec<T>> {
    unit_normal_from(&field.inverse(x)?, &face.unit_normal)
}

pub fn second_fundamental_form<T: Scalar>(
    field: &MetricField<T>,
    face: &Face<T>,
    x: &[T],
) -> Result<SquareMatrix<T>> {
    FaceFrame::new(field, &face.unit_normal, x)?.second_fundamental_form(field)
}

pub fn mean_curvature<T: Scalar>(field: &MetricField<T>, face: &Face<T>, x: &[T]) -> Result<T> {
    mean_curvature_at(field, &face.unit_normal, x)
}

/// Mean curvature of the hyperplane through `x` with Euclidean normal `ν̄`.
pub fn mean_curvature_at<T: Scalar>(field: &MetricField<T>, nu_bar: &[T], x: &[T]) -> Result<T> {
    face_point(field, nu_bar, &tangent_basis(nu_bar), x).map(|p| p.0)
}

/// `(H, dσ/dσ̄)` at `x` from one metric and one derivative evaluation.
pub fn face_point<T: Scalar>(
    field: &MetricField<T>,
    nu_bar: &[T],
    tangents: &[Vec<T>],
    x: &[T],
) -> Result<(T, T)> {
    let g = field.coeff(x)?;
    let ginv = g.inverse()?;
    let normal = unit_normal_from(&ginv, nu_bar)?;
    let induced = g.gram(tangents);
    let det = induced.determinant();
    if !(det > T::zero()) {
        return Err(Error::Singular("induced metric"));
    }
    let first = first_kind_from_derivative(&field.dcoeff(x)?);
    let a = second_form(&first, &normal, tangents);
    Ok((trace_against(&induced, &a)?, det.sqrt()))
}

/// `(H, dσ/dσ̄)` at `x` without a tangent frame:
/// `H = −(g^{ij} − ν^i ν^j) ν^l Γ_{l,ij}` and `(dσ/dσ̄)² = det g · g^{ij} ν̄_i ν̄_j`.
pub fn hypersurface_point<T: Scalar>(field: &MetricField<T>, nu_bar: &[T], x: &[T]) -> Result<(T, T)> {
    let n = nu_bar.len();
    let g = field.coeff(x)?;
    let ginv = g.inverse()?;
    let raised = ginv.mul_vec(nu_bar);
    let q = dot(&raised, nu_bar);
    let det = g.determinant() * q;
    if !(q > T::zero() && det > T::zero()) {
        return Err(Error::Singular("induced metric"));
    }
    let normal = scaled(&raised, T::one() / q.sqrt());
    let first = first_kind_from_derivative(&field.dcoeff(x)?);
    let mut h = T::zero();
    for i in 0..n {
        for j in 0..n {
            let proj = ginv[(i, j)] - normal[i] * normal[j];
            if proj == T::zero() {
                continue;
            }
            let w: T = (0..n).map(|l| normal[l] * first[(l, i, j)]).sum();
            h -= proj * w;
        }
    }
    Ok((h, det.sqrt()))
}

/// Dihedral data of an edge under `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralAngle<T> {
    /// Angle between the `g`-unit normals.
    pub theta: T,
    /// Interior dihedral angle: `π − θ` on convex edges, `π + θ` on reflex ones.
    pub alpha: T,
}

pub fn g_dihedral_angle<T: Scalar>(
    field: &MetricField<T>,
    edge: &Edge<T>,
    x: &[T],
) -> Result<DihedralAngle<T>> {
    dihedral_angle(field, &edge.normal_a, &edge.normal_b, edge.convex, x)
}

/// `cos θ = a_i b_j g^{ij} / ((a g⁻¹ a)(b g⁻¹ b))^{1/2}`.
pub fn cos_normal_angle<T: Scalar>(field: &MetricField<T>, a: &[T], b: &[T], x: &[T]) -> Result<T> {
    let ginv = field.inverse(x)?;
    let ab = ginv.bilinear(a, b);
    let aa = ginv.bilinear(a, a);
    let bb = ginv.bilinear(b, b);
    if !(aa > T::zero() && bb > T::zero()) {
        return Err(Error::Singular("inverse metric is not positive"));
    }
    Ok(ab / (aa * bb).sqrt())
}

pub fn dihedral_angle<T: Scalar>(
    field: &MetricField<T>,
    a: &[T],
    b: &[T],
    convex: bool,
    x: &[T],
) -> Result<DihedralAngle<T>> {
    let q = cos_normal_angle(field, a, b, x)?;
    let theta = clamped_acos(q)?;
    let alpha = if convex { T::PI() - theta } else { T::PI() + theta };
    Ok(DihedralAngle { theta, alpha })
}

pub(crate) fn clamped_acos<T: Scalar>(q: T) -> Result<T> {
    let slack = T::one() + T::lit(ANGLE_CLAMP_SLACK);
    if !(q.abs() <= slack) {
        return Err(Error::Conditioning { value: q.as_f64() });
    }
    Ok(q.max(-T::one()).min(T::one()).acos())
}

/// `√det γ` for an orthonormal Euclidean basis of a flat tangent space.
pub fn density_for<T: Scalar>(field: &MetricField<T>, tangents: &[Vec<T>], x: &[T]) -> Result<T> {
    let g = field.coeff(x)?;
    let det = g.gram(tangents).determinant();
    if !(det > T::zero()) {
        return Err(Error::Singular("induced metric"));
    }
    Ok(det.sqrt())
}

/// `dσ/dσ̄` on a face or `dμ/dμ̄` on an edge.
pub fn induced_density<T: Scalar>(field: &MetricField<T>, region: &Region<T>, x: &[T]) -> Result<T> {
    density_for(field, &region.tangent_basis(), x)
}
