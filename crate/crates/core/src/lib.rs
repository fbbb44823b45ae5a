//! Polyhedral evaluation of the ADM mass of asymptotically flat metrics.
//!
//! The mass is recovered three ways: the classical flux integral of
//! `g_ij,i − g_ii,j`, the total mean curvature of the faces of a large
//! coordinate polyhedron plus the dihedral-angle defect along its edges, and
//! an integral over coordinate slices of lower-dimensional face/edge
//! quantities. Every routine is generic over the scalar type.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extrinsic;
pub mod fit;
pub mod linalg;
pub mod massflux;
pub mod polytope;
pub mod quadrature;
pub mod scalar;
pub mod slicing;
pub mod tensorfield;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type MetricField = tensorfield::MetricField<f64>;
pub type MetricFieldF32 = tensorfield::MetricField<f32>;
pub type Polyhedron = polytope::Polyhedron<f64>;
pub type PolyhedronF32 = polytope::Polyhedron<f32>;
pub type MassReport = massflux::MassReport<f64>;
pub type ConvergenceTable = massflux::ConvergenceTable<f64>;
pub type SliceQuantity = slicing::SliceQuantity<f64>;
pub type SliceQuantityF32 = slicing::SliceQuantity<f32>;
pub type MassReportF32 = massflux::MassReport<f32>;
