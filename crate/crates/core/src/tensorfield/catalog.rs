use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{make_euclidean, make_perturbation, make_schwarzschild_isotropic, MetricField};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Catalog fields addressable by string id:
/// `euclidean:n`, `schwarzschild:n:m`, `perturb:n:p:amp:seed`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogEntry {
    Euclidean {
        dim: usize,
    },
    Schwarzschild {
        dim: usize,
        mass: f64,
    },
    Perturbation {
        dim: usize,
        decay: f64,
        amplitude: f64,
        seed: u64,
    },
}

impl CatalogEntry {
    pub fn dim(&self) -> usize {
        match *self {
            CatalogEntry::Euclidean { dim }
            | CatalogEntry::Schwarzschild { dim, .. }
            | CatalogEntry::Perturbation { dim, .. } => dim,
        }
    }

    /// Known ADM mass, when the entry has one in closed form.
    pub fn analytic_mass(&self) -> Option<f64> {
        match *self {
            CatalogEntry::Euclidean { .. } => Some(0.0),
            CatalogEntry::Schwarzschild { mass, .. } => Some(mass),
            CatalogEntry::Perturbation { amplitude, .. } if amplitude == 0.0 => Some(0.0),
            CatalogEntry::Perturbation { .. } => None,
        }
    }

    pub fn build<T: Scalar>(&self) -> Result<MetricField<T>> {
        match *self {
            CatalogEntry::Euclidean { dim } => make_euclidean(dim),
            CatalogEntry::Schwarzschild { dim, mass } => {
                make_schwarzschild_isotropic(dim, T::lit(mass))
            }
            CatalogEntry::Perturbation {
                dim,
                decay,
                amplitude,
                seed,
            } => make_perturbation(dim, T::lit(decay), T::lit(amplitude), seed),
        }
    }
}

impl fmt::Display for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogEntry::Euclidean { dim } => write!(f, "euclidean:{dim}"),
            CatalogEntry::Schwarzschild { dim, mass } => write!(f, "schwarzschild:{dim}:{mass}"),
            CatalogEntry::Perturbation {
                dim,
                decay,
                amplitude,
                seed,
            } => write!(f, "perturb:{dim}:{decay}:{amplitude}:{seed}"),
        }
    }
}

pub(crate) fn parse_field<F: FromStr>(id: &str, part: &str) -> Result<F> {
    part.parse()
        .map_err(|_| Error::UnknownId(id.to_string()))
}

impl FromStr for CatalogEntry {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        let parts: Vec<&str> = id.split(':').collect();
        let unknown = || Error::UnknownId(id.to_string());
        match parts.as_slice() {
            ["euclidean", n] => Ok(CatalogEntry::Euclidean {
                dim: parse_field(id, n)?,
            }),
            ["schwarzschild", n, m] => Ok(CatalogEntry::Schwarzschild {
                dim: parse_field(id, n)?,
                mass: parse_field(id, m)?,
            }),
            ["perturb", n, p, amp, seed] => Ok(CatalogEntry::Perturbation {
                dim: parse_field(id, n)?,
                decay: parse_field(id, p)?,
                amplitude: parse_field(id, amp)?,
                seed: parse_field(id, seed)?,
            }),
            _ => Err(unknown()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in ["euclidean:4", "schwarzschild:3:1", "perturb:3:1:0.1:7"] {
            let e: CatalogEntry = id.parse().unwrap();
            assert_eq!(e.to_string(), id);
            let f = e.build::<f64>().unwrap();
            assert_eq!(f.dim(), e.dim());
        }
    }

    #[test]
    fn unknown_ids_are_named() {
        assert_eq!(
            "kerr:3:1".parse::<CatalogEntry>(),
            Err(Error::UnknownId("kerr:3:1".into()))
        );
        assert!("schwarzschild:x:1".parse::<CatalogEntry>().is_err());
        assert!("euclidean".parse::<CatalogEntry>().is_err());
    }

    #[test]
    fn analytic_masses() {
        let s: CatalogEntry = "schwarzschild:4:2.5".parse().unwrap();
        assert_eq!(s.analytic_mass(), Some(2.5));
        let p: CatalogEntry = "perturb:3:1:0.1:7".parse().unwrap();
        assert_eq!(p.analytic_mass(), None);
    }
}
