//! ADM mass from the flux integral and from the polyhedral face/edge formula.

mod convergence;

pub use convergence::{convergence_study, fit_sequence, ConvergenceFit, ConvergenceRow, ConvergenceTable};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extrinsic::{dihedral_angle, density_for, hypersurface_point};
use crate::polytope::{Polyhedron, DEFAULT_ANGLE_CONSTANT};
use crate::quadrature::{face_rule, edge_rule, sphere_rule, DEFAULT_LEVEL};
use crate::scalar::Scalar;
use crate::tensorfield::MetricField;

/// Volume `ω_k` of the unit `k`-sphere.
pub fn sphere_volume_constant<T: Scalar>(k: usize) -> T {
    let two_pi = T::TAU();
    let mut even = T::lit(2.0);
    let mut odd = two_pi;
    if k == 0 {
        return even;
    }
    // ω_j = 2π/(j − 1) · ω_{j−2}
    for j in 2..=k {
        let next = two_pi / T::from_usize_lossy(j - 1);
        if j % 2 == 0 {
            even *= next;
        } else {
            odd *= next;
        }
    }
    if k.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassMethod {
    FluxSphere,
    FluxPolyhedron,
    Polyhedral,
}

impl fmt::Display for MassMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MassMethod::FluxSphere => "flux_sphere",
            MassMethod::FluxPolyhedron => "flux_polyhedron",
            MassMethod::Polyhedral => "polyhedral",
        })
    }
}

/// One mass evaluation.
///
/// For the polyhedral method `face_integral = −∫ H dσ` and
/// `edge_integral = ∫ (α − ᾱ) dμ`; for flux methods `face_integral` holds the
/// whole flux and `edge_integral` is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport<T> {
    pub method: MassMethod,
    pub geometry: String,
    pub scale: T,
    pub face_integral: T,
    pub edge_integral: T,
    pub mass: T,
    /// Change in `mass` against the next coarser quadrature level.
    pub quad_error: Option<T>,
    pub dim: usize,
    pub omega: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassOptions {
    pub level: usize,
    /// Lower bound on `|sin ᾱ|` required of every edge.
    pub angle_constant: f64,
    /// Also evaluate at `level − 1` to fill `quad_error`.
    pub estimate_error: bool,
}

impl Default for MassOptions {
    fn default() -> Self {
        Self {
            level: DEFAULT_LEVEL,
            angle_constant: DEFAULT_ANGLE_CONSTANT,
            estimate_error: true,
        }
    }
}

impl MassOptions {
    pub fn with_level(level: usize) -> Self {
        Self {
            level,
            ..Self::default()
        }
    }
}

/// Surface carrying the flux integral.
#[derive(Debug, Clone, Copy)]
pub enum FluxSurface<'a, T> {
    Sphere { radius: T },
    Polyhedron(&'a Polyhedron<T>),
}

fn require_outside<T: Scalar>(field: &MetricField<T>, radius: T) -> Result<()> {
    let cutoff = field.smallness_radius().max(field.inner_radius());
    if radius > cutoff {
        Ok(())
    } else {
        Err(Error::InsideCutoff {
            radius: radius.as_f64(),
            cutoff: cutoff.as_f64(),
        })
    }
}

fn require_dim<T: Scalar>(field: &MetricField<T>, dim: usize) -> Result<()> {
    if field.dim() == dim {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "field dimension {} does not match geometry dimension {dim}",
            field.dim()
        )))
    }
}

/// `(∂_i g_ij − ∂_j g_ii) ν̄^j` at `x`.
fn flux_density<T: Scalar>(field: &MetricField<T>, nu: &[T], x: &[T]) -> Result<T> {
    let d = field.dcoeff(x)?;
    let n = nu.len();
    let mut acc = T::zero();
    for j in 0..n {
        let mut s = T::zero();
        for i in 0..n {
            s += d[(i, i, j)] - d[(j, i, i)];
        }
        acc += s * nu[j];
    }
    Ok(acc)
}

fn flux_at_level<T: Scalar>(field: &MetricField<T>, surface: FluxSurface<'_, T>, level: usize) -> Result<T> {
    match surface {
        FluxSurface::Sphere { radius } => {
            let rule = sphere_rule(field.dim(), radius, level)?;
            rule.integrate(|x| {
                let nu: Vec<T> = x.iter().map(|&c| c / radius).collect();
                flux_density(field, &nu, x)
            })
        }
        FluxSurface::Polyhedron(p) => {
            let mut total = T::zero();
            for face in p.faces() {
                total += face_rule(face, level)?.integrate(|x| flux_density(field, &face.unit_normal, x))?;
            }
            Ok(total)
        }
    }
}

/// `(2(n−1)ω_{n−1})^{-1} ∫ (g_ij,i − g_ii,j) ν̄^j dσ̄` over a sphere or a polyhedral boundary.
pub fn adm_flux_mass<T: Scalar>(
    field: &MetricField<T>,
    surface: FluxSurface<'_, T>,
    options: &MassOptions,
) -> Result<MassReport<T>> {
    let n = field.dim();
    let (method, geometry, scale, radius) = match surface {
        FluxSurface::Sphere { radius } => (MassMethod::FluxSphere, format!("sphere:{n}:{radius}"), radius, radius),
        FluxSurface::Polyhedron(p) => {
            require_dim(field, p.dim())?;
            (MassMethod::FluxPolyhedron, p.label().to_string(), p.scale_factor(), p.inner_radius())
        }
    };
    require_outside(field, radius)?;
    let omega = sphere_volume_constant::<T>(n - 1);
    let norm = T::lit(2.0) * T::from_usize_lossy(n - 1) * omega;
    let flux = flux_at_level(field, surface, options.level)?;
    let quad_error = if options.estimate_error && options.level > 0 {
        let coarse = flux_at_level(field, surface, options.level - 1)?;
        Some(((flux - coarse) / norm).abs())
    } else {
        None
    };
    Ok(MassReport {
        method,
        geometry,
        scale,
        face_integral: flux,
        edge_integral: T::zero(),
        mass: flux / norm,
        quad_error,
        dim: n,
        omega,
    })
}

/// `(−∫_F H dσ, ∫_E (α − ᾱ) dμ)` at one quadrature level.
pub fn polyhedral_integrals<T: Scalar>(
    field: &MetricField<T>,
    p: &Polyhedron<T>,
    level: usize,
) -> Result<(T, T)> {
    let mut face_total = T::zero();
    for face in p.faces() {
        let rule = face_rule(face, level)?;
        face_total -= rule.integrate(|x| {
            let (h, density) = hypersurface_point(field, &face.unit_normal, x)?;
            Ok(h * density)
        })?;
    }
    let mut edge_total = T::zero();
    for edge in p.edges() {
        let tangents = edge.region.tangent_basis();
        let rule = edge_rule(edge, level)?;
        edge_total += rule.integrate(|x| {
            let alpha = dihedral_angle(field, &edge.normal_a, &edge.normal_b, edge.convex, x)?.alpha;
            Ok((alpha - edge.euclidean_angle) * density_for(field, &tangents, x)?)
        })?;
    }
    Ok((face_total, edge_total))
}

/// `((n−1)ω_{n−1})^{-1} (−∫_F H dσ + ∫_E (α − ᾱ) dμ)`.
pub fn polyhedral_mass<T: Scalar>(
    field: &MetricField<T>,
    p: &Polyhedron<T>,
    options: &MassOptions,
) -> Result<MassReport<T>> {
    require_dim(field, p.dim())?;
    p.require_angles(T::lit(options.angle_constant))?;
    require_outside(field, p.inner_radius())?;
    let n = p.dim();
    let omega = sphere_volume_constant::<T>(n - 1);
    let norm = T::from_usize_lossy(n - 1) * omega;
    let (face_integral, edge_integral) = polyhedral_integrals(field, p, options.level)?;
    let mass = (face_integral + edge_integral) / norm;
    let quad_error = if options.estimate_error && options.level > 0 {
        let (f, e) = polyhedral_integrals(field, p, options.level - 1)?;
        Some((mass - (f + e) / norm).abs())
    } else {
        None
    };
    Ok(MassReport {
        method: MassMethod::Polyhedral,
        geometry: p.label().to_string(),
        scale: p.scale_factor(),
        face_integral,
        edge_integral,
        mass,
        quad_error,
        dim: n,
        omega,
    })
}

/// `−∫_F H dσ + ∫_E (α − ᾱ) dμ`, unnormalized.
pub fn gromov_quantity<T: Scalar>(field: &MetricField<T>, p: &Polyhedron<T>, level: usize) -> Result<T> {
    require_dim(field, p.dim())?;
    require_outside(field, p.inner_radius())?;
    let (f, e) = polyhedral_integrals(field, p, level)?;
    Ok(f + e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{hypercube, lshaped_prism_3d, octahedron, tetrahedron};
    use crate::tensorfield::{make_euclidean, make_schwarzschild_isotropic};
    use std::f64::consts::PI;

    #[test]
    fn sphere_constants() {
        assert!((sphere_volume_constant::<f64>(1) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_volume_constant::<f64>(2) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_volume_constant::<f64>(3) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_volume_constant::<f64>(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert_eq!(sphere_volume_constant::<f64>(0), 2.0);
    }

    #[test]
    fn euclidean_masses_vanish() {
        let f = make_euclidean::<f64>(3).unwrap();
        let opts = MassOptions::with_level(0);
        for p in [
            hypercube::<f64>(3, 10.0).unwrap(),
            octahedron(10.0).unwrap(),
            tetrahedron(10.0).unwrap(),
            lshaped_prism_3d(10.0, 4.0, 12.0).unwrap(),
        ] {
            let r = polyhedral_mass(&f, &p, &opts).unwrap();
            assert!(r.mass.abs() < 1e-12);
            let r = adm_flux_mass(&f, FluxSurface::Polyhedron(&p), &opts).unwrap();
            assert!(r.mass.abs() < 1e-12);
        }
        let r = adm_flux_mass(&f, FluxSurface::Sphere { radius: 5.0 }, &opts).unwrap();
        assert!(r.mass.abs() < 1e-12);
    }

    #[test]
    fn sphere_flux_matches_closed_form() {
        // The isotropic flux through |x| = r is exactly m u(r)^3 in three dimensions.
        let m = 1.0;
        let f = make_schwarzschild_isotropic::<f64>(3, m).unwrap();
        for r in [50.0, 100.0, 400.0] {
            let rep = adm_flux_mass(&f, FluxSurface::Sphere { radius: r }, &MassOptions::default()).unwrap();
            let u = 1.0 + m / (2.0 * r);
            assert!((rep.mass - m * u.powi(3)).abs() < 1e-12, "{} vs {}", rep.mass, u.powi(3));
            assert_eq!(rep.edge_integral, 0.0);
        }
    }

    #[test]
    fn schwarzschild_cube() {
        let f = make_schwarzschild_isotropic::<f64>(3, 1.0).unwrap();
        let p = hypercube::<f64>(3, 100.0).unwrap();
        let rep = polyhedral_mass(&f, &p, &MassOptions::default()).unwrap();
        assert!((rep.mass - 1.0).abs() < 2e-2, "{rep:?}");
        assert!(rep.edge_integral.abs() < 1e-12);
        let norm = 2.0 * sphere_volume_constant::<f64>(2);
        assert_eq!(rep.mass, (rep.face_integral + rep.edge_integral) / norm);
        assert!(gromov_quantity(&f, &p, 1).unwrap() > 0.0);
    }

    #[test]
    fn scale_consistency() {
        let f = make_schwarzschild_isotropic::<f64>(3, 1.0).unwrap();
        let opts = MassOptions::with_level(0);
        let a = polyhedral_mass(&f, &hypercube::<f64>(3, 1.0).unwrap().scale(50.0).unwrap(), &opts).unwrap();
        let b = polyhedral_mass(&f, &hypercube::<f64>(3, 50.0).unwrap(), &opts).unwrap();
        assert!((a.mass - b.mass).abs() < 1e-12);
    }

    #[test]
    fn rejects_inside_smallness_radius_and_bad_angles() {
        let f = make_schwarzschild_isotropic::<f64>(3, 1.0).unwrap();
        let small = hypercube::<f64>(3, 5.0).unwrap();
        assert!(matches!(
            polyhedral_mass(&f, &small, &MassOptions::default()),
            Err(Error::InsideCutoff { .. })
        ));
        let o = octahedron::<f64>(100.0).unwrap();
        let opts = MassOptions {
            angle_constant: 0.99,
            ..MassOptions::default()
        };
        assert!(matches!(polyhedral_mass(&f, &o, &opts), Err(Error::AngleValidation { .. })));
    }
}
