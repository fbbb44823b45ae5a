//! Euclidean polyhedra with explicit faces, edges and dihedral angles.

mod mesh;
mod region;
mod spec;

pub use mesh::{from_halfspaces_3d, from_polygons};
pub use region::{newell, AxisBox, Region};
pub(crate) use region::plane_coords;
pub use spec::GeometrySpec;

use crate::error::{Error, Result};
use crate::linalg::{dot, scaled, unit};
use crate::scalar::Scalar;

/// Default lower bound on `|sin ᾱ|` along every edge.
pub const DEFAULT_ANGLE_CONSTANT: f64 = 0.5;

/// Flat boundary piece `{<ν̄, x> = offset}` restricted to `region`.
#[derive(Debug, Clone, PartialEq)]
pub struct Face<T> {
    pub unit_normal: Vec<T>,
    pub offset: T,
    pub region: Region<T>,
    pub area: T,
}

/// Codimension-two stratum where faces `face_a` and `face_b` meet.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub face_a: usize,
    pub face_b: usize,
    pub normal_a: Vec<T>,
    pub normal_b: Vec<T>,
    /// Outward unit normal to the edge inside face A.
    pub conormal_a: Vec<T>,
    pub conormal_b: Vec<T>,
    pub region: Region<T>,
    /// Interior dihedral angle, in `(0, π)` for convex edges and `(π, 2π)` for reflex ones.
    pub euclidean_angle: T,
    pub convex: bool,
    pub length: T,
}

impl<T: Scalar> Edge<T> {
    /// Angle `θ̄` between the outward face normals.
    pub fn normal_angle(&self) -> T {
        dot(&self.normal_a, &self.normal_b)
            .max(-T::one())
            .min(T::one())
            .acos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron<T> {
    dim: usize,
    faces: Vec<Face<T>>,
    edges: Vec<Edge<T>>,
    inner_radius: T,
    scale_factor: T,
    label: String,
}

impl<T: Scalar> Polyhedron<T> {
    pub(crate) fn assemble(
        dim: usize,
        faces: Vec<Face<T>>,
        edges: Vec<Edge<T>>,
        label: String,
    ) -> Result<Self> {
        let inner_radius = faces
            .iter()
            .map(|f| f.region.distance_to_origin())
            .fold(T::infinity(), T::min);
        if !(inner_radius > T::zero()) {
            return Err(Error::Geometry("origin lies on the boundary".into()));
        }
        Ok(Self {
            dim,
            faces,
            edges,
            inner_radius,
            scale_factor: T::one(),
            label,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn faces(&self) -> &[Face<T>] {
        &self.faces
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    /// `r_P`, the distance from the origin to the boundary.
    pub fn inner_radius(&self) -> T {
        self.inner_radius
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Product of all factors applied through [`scale`](Self::scale); one for a base solid.
    pub fn scale_factor(&self) -> T {
        self.scale_factor
    }

    pub fn total_area(&self) -> T {
        self.faces.iter().map(|f| f.area).sum()
    }

    pub fn total_edge_length(&self) -> T {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Homothety `x -> r x`.
    pub fn scale(&self, r: T) -> Result<Self> {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {r}")));
        }
        let face_factor = r.powi(self.dim as i32 - 1);
        let edge_factor = r.powi(self.dim as i32 - 2);
        Ok(Self {
            dim: self.dim,
            faces: self
                .faces
                .iter()
                .map(|f| Face {
                    unit_normal: f.unit_normal.clone(),
                    offset: f.offset * r,
                    region: f.region.scaled(r),
                    area: f.area * face_factor,
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    region: e.region.scaled(r),
                    length: e.length * edge_factor,
                    ..e.clone()
                })
                .collect(),
            inner_radius: self.inner_radius * r,
            scale_factor: self.scale_factor * r,
            label: format!("scale:{}:{}", self.label, r),
        })
    }

    /// Checks `|sin ᾱ| >= c` on every edge.
    pub fn validate_angles(&self, c: T) -> AngleReport<T> {
        let mut violations = Vec::new();
        let mut worst = T::one();
        for (k, e) in self.edges.iter().enumerate() {
            let s = e.euclidean_angle.sin().abs();
            worst = worst.min(s);
            if s < c {
                violations.push((k, s));
            }
        }
        AngleReport {
            constant: c,
            worst,
            violations,
        }
    }

    /// Like [`validate_angles`](Self::validate_angles) but turns violations into an error.
    pub fn require_angles(&self, c: T) -> Result<()> {
        if !(c > T::zero() && c <= T::one()) {
            return Err(Error::InvalidParameter(format!("angle constant must lie in (0, 1], got {c}")));
        }
        let report = self.validate_angles(c);
        if report.passed() {
            Ok(())
        } else {
            Err(Error::AngleValidation {
                count: report.violations.len(),
                constant: c.as_f64(),
                worst: report.worst.as_f64(),
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleReport<T> {
    pub constant: T,
    /// Smallest `|sin ᾱ|` over all edges.
    pub worst: T,
    /// `(edge index, |sin ᾱ|)` for every violating edge.
    pub violations: Vec<(usize, T)>,
}

impl<T> AngleReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Coordinate cube `[-L, L]^n` for `n >= 3`.
pub fn hypercube<T: Scalar>(n: usize, half_width: T) -> Result<Polyhedron<T>> {
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    coordinate_cube(n, half_width)
}

/// Coordinate cube in any dimension `n >= 2`; slices of a 3-cube are squares.
///
/// Face `2i` has normal `+e_i`, face `2i + 1` has normal `-e_i`.
pub(crate) fn coordinate_cube<T: Scalar>(n: usize, half_width: T) -> Result<Polyhedron<T>> {
    if n < 2 {
        return Err(Error::Dimension { got: n, min: 2 });
    }
    let l = half_width;
    if !(l > T::zero()) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("half width must be positive, got {l}")));
    }
    let signs = [T::one(), -T::one()];
    let side = l + l;
    let mut faces = Vec::with_capacity(2 * n);
    for axis in 0..n {
        for s in signs {
            faces.push(Face {
                unit_normal: scaled(&unit(n, axis), s),
                offset: l,
                region: Region::Box(AxisBox {
                    dim: n,
                    fixed: vec![(axis, s * l)],
                    free: (0..n).filter(|&a| a != axis).map(|a| (a, -l, l)).collect(),
                }),
                area: side.powi(n as i32 - 1),
            });
        }
    }
    let mut edges = Vec::with_capacity(2 * n * (n - 1));
    for i in 0..n {
        for j in i + 1..n {
            for (si, &s) in signs.iter().enumerate() {
                for (sj, &t) in signs.iter().enumerate() {
                    let nu_a = scaled(&unit(n, i), s);
                    let nu_b = scaled(&unit(n, j), t);
                    edges.push(Edge {
                        face_a: 2 * i + si,
                        face_b: 2 * j + sj,
                        conormal_a: nu_b.clone(),
                        conormal_b: nu_a.clone(),
                        normal_a: nu_a,
                        normal_b: nu_b,
                        region: Region::Box(AxisBox {
                            dim: n,
                            fixed: vec![(i, s * l), (j, t * l)],
                            free: (0..n)
                                .filter(|&a| a != i && a != j)
                                .map(|a| (a, -l, l))
                                .collect(),
                        }),
                        euclidean_angle: T::FRAC_PI_2(),
                        convex: true,
                        length: side.powi(n as i32 - 2),
                    });
                }
            }
        }
    }
    Polyhedron::assemble(n, faces, edges, format!("cube:{n}:{l}"))
}

/// Regular octahedron `|x|_1 <= R`.
pub fn octahedron<T: Scalar>(r: T) -> Result<Polyhedron<T>> {
    positive(r, "octahedron radius")?;
    let mut normals = Vec::with_capacity(8);
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                normals.push([T::lit(sx), T::lit(sy), T::lit(sz)]);
            }
        }
    }
    from_halfspaces_3d(&normals, &[r; 8], format!("octahedron:{r}"))
}

/// Regular tetrahedron with circumradius `R` (inradius `R/3`).
pub fn tetrahedron<T: Scalar>(r: T) -> Result<Polyhedron<T>> {
    positive(r, "tetrahedron radius")?;
    let vertices = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];
    let normals: Vec<[T; 3]> = vertices
        .iter()
        .map(|v| v.map(|c| T::lit(-c)))
        .collect();
    // |(1,1,1)| = √3, so each plane sits at distance R/3.
    let offset = r * T::lit(3f64.sqrt()) / T::lit(3.0);
    from_halfspaces_3d(&normals, &[offset; 4], format!("tetrahedron:{r}"))
}

/// Prism over the L-shaped section `[-a, a]^2 \ [a - s, a]^2`, for `z` in `[-h/2, h/2]`.
///
/// The section has one reflex corner, at `(a - s, a - s)`, giving one reflex
/// vertical edge with `ᾱ = 3π/2`.
pub fn lshaped_prism_3d<T: Scalar>(outer: T, notch: T, height: T) -> Result<Polyhedron<T>> {
    positive(outer, "outer half width")?;
    positive(notch, "notch width")?;
    positive(height, "height")?;
    if notch >= outer {
        return Err(Error::Geometry(format!(
            "origin falls inside the notch (notch {notch} >= outer {outer})"
        )));
    }
    let a = outer;
    let c = outer - notch;
    let section = [(-a, -a), (a, -a), (a, c), (c, c), (c, a), (-a, a)];
    let top = height / T::lit(2.0);
    let bottom = -top;
    let at = |(x, y): (T, T), z: T| vec![x, y, z];
    let mut loops = Vec::with_capacity(8);
    loops.push(section.iter().map(|&p| at(p, top)).collect());
    loops.push(section.iter().rev().map(|&p| at(p, bottom)).collect());
    for k in 0..section.len() {
        let p = section[k];
        let q = section[(k + 1) % section.len()];
        loops.push(vec![at(p, bottom), at(q, bottom), at(q, top), at(p, top)]);
    }
    from_polygons(loops, format!("lprism:{outer}:{notch}:{height}"))
}

fn positive<T: Scalar>(v: T, what: &str) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {v}")))
    }
}
