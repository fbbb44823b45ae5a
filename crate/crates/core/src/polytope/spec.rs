use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{hypercube, lshaped_prism_3d, octahedron, tetrahedron, Polyhedron};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tensorfield::parse_field;

/// Polyhedra addressable by string id: `cube:n:L`, `octahedron:R`,
/// `tetrahedron:R`, `lprism:outer:notch:height` and `scale:<id>:r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeometrySpec {
    Cube {
        dim: usize,
        half_width: f64,
    },
    Octahedron {
        radius: f64,
    },
    Tetrahedron {
        radius: f64,
    },
    LPrism {
        outer: f64,
        notch: f64,
        height: f64,
    },
    Scaled {
        base: Box<GeometrySpec>,
        factor: f64,
    },
}

impl GeometrySpec {
    pub fn dim(&self) -> usize {
        match self {
            GeometrySpec::Cube { dim, .. } => *dim,
            GeometrySpec::Scaled { base, .. } => base.dim(),
            _ => 3,
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<Polyhedron<T>> {
        match self {
            GeometrySpec::Cube { dim, half_width } => hypercube(*dim, T::lit(*half_width)),
            GeometrySpec::Octahedron { radius } => octahedron(T::lit(*radius)),
            GeometrySpec::Tetrahedron { radius } => tetrahedron(T::lit(*radius)),
            GeometrySpec::LPrism {
                outer,
                notch,
                height,
            } => lshaped_prism_3d(T::lit(*outer), T::lit(*notch), T::lit(*height)),
            GeometrySpec::Scaled { base, factor } => base.build::<T>()?.scale(T::lit(*factor)),
        }
    }

    /// The same geometry scaled by `r`.
    pub fn scaled(&self, r: f64) -> Self {
        GeometrySpec::Scaled {
            base: Box::new(self.clone()),
            factor: r,
        }
    }
}

impl fmt::Display for GeometrySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometrySpec::Cube { dim, half_width } => write!(f, "cube:{dim}:{half_width}"),
            GeometrySpec::Octahedron { radius } => write!(f, "octahedron:{radius}"),
            GeometrySpec::Tetrahedron { radius } => write!(f, "tetrahedron:{radius}"),
            GeometrySpec::LPrism {
                outer,
                notch,
                height,
            } => write!(f, "lprism:{outer}:{notch}:{height}"),
            GeometrySpec::Scaled { base, factor } => write!(f, "scale:{base}:{factor}"),
        }
    }
}

impl FromStr for GeometrySpec {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        if let Some(rest) = id.strip_prefix("scale:") {
            let (base, factor) = rest
                .rsplit_once(':')
                .ok_or_else(|| Error::UnknownId(id.to_string()))?;
            return Ok(GeometrySpec::Scaled {
                base: Box::new(base.parse()?),
                factor: parse_field(id, factor)?,
            });
        }
        let parts: Vec<&str> = id.split(':').collect();
        match parts.as_slice() {
            ["cube", n, l] => Ok(GeometrySpec::Cube {
                dim: parse_field(id, n)?,
                half_width: parse_field(id, l)?,
            }),
            ["octahedron", r] => Ok(GeometrySpec::Octahedron {
                radius: parse_field(id, r)?,
            }),
            ["tetrahedron", r] => Ok(GeometrySpec::Tetrahedron {
                radius: parse_field(id, r)?,
            }),
            ["lprism", a, s, h] => Ok(GeometrySpec::LPrism {
                outer: parse_field(id, a)?,
                notch: parse_field(id, s)?,
                height: parse_field(id, h)?,
            }),
            _ => Err(Error::UnknownId(id.to_string())),
        }
    }
}
