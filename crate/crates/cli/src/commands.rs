use std::str::FromStr;

use polymass::extrinsic::{face_sample_point, standard_ladders, ExpansionResidualReport, LADDER_RADII};
use polymass::massflux::{
    adm_flux_mass, convergence_study, polyhedral_mass, FluxSurface, MassOptions, MassReport,
};
use polymass::polytope::{hypercube, GeometrySpec};
use polymass::slicing::{slice_ladders, slice_mass_integral, slice_profile};
use polymass::tensorfield::CatalogEntry;
use polymass::{MetricField, Polyhedron};

use crate::args::{GlobalArgs, Method};
use crate::error::CliError;
use crate::table::{Cell, Table};

/// Largest accepted quadrature level.
pub const MAX_QUAD_LEVEL: usize = 6;

/// Relative tolerance of the analytic-versus-difference derivative check.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub level: usize,
    pub angle_constant: f64,
}

impl RunConfig {
    pub fn from_args(args: &GlobalArgs) -> Result<Self, CliError> {
        if args.quad_level > MAX_QUAD_LEVEL {
            return Err(CliError::Config(format!(
                "--quad-level {} exceeds the maximum {MAX_QUAD_LEVEL}",
                args.quad_level
            )));
        }
        if !(args.angle_constant > 0.0 && args.angle_constant <= 1.0) {
            return Err(CliError::Config(format!(
                "--c must lie in (0, 1], got {}",
                args.angle_constant
            )));
        }
        if args.threads == Some(0) {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        Ok(Self {
            level: args.quad_level,
            angle_constant: args.angle_constant,
        })
    }

    fn mass_options(&self) -> MassOptions {
        MassOptions {
            level: self.level,
            angle_constant: self.angle_constant,
            estimate_error: true,
        }
    }
}

/// Surface named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryId {
    Polyhedron(GeometrySpec),
    Sphere { dim: usize, radius: f64 },
}

impl FromStr for GeometryId {
    type Err = CliError;

    fn from_str(id: &str) -> Result<Self, CliError> {
        if let Some(rest) = id.strip_prefix("sphere:") {
            let bad = || CliError::Core(polymass::Error::UnknownId(id.to_string()));
            let (n, r) = rest.split_once(':').ok_or_else(bad)?;
            let dim: usize = n.parse().map_err(|_| bad())?;
            let radius: f64 = r.parse().map_err(|_| bad())?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(CliError::Config(format!("sphere radius must be positive in `{id}`")));
            }
            return Ok(GeometryId::Sphere { dim, radius });
        }
        Ok(GeometryId::Polyhedron(id.parse()?))
    }
}

fn load_field(id: &str) -> Result<MetricField, CliError> {
    Ok(id.parse::<CatalogEntry>()?.build()?)
}

fn load_polyhedron(spec: &GeometrySpec) -> Result<Polyhedron, CliError> {
    Ok(spec.build()?)
}

fn check_dims(field: &MetricField, dim: usize) -> Result<(), CliError> {
    if field.dim() != dim {
        return Err(CliError::Config(format!(
            "field `{}` has dimension {} but the geometry has dimension {dim}",
            field.label(),
            field.dim()
        )));
    }
    Ok(())
}

const CATALOG_FIELDS: [&str; 8] = [
    "euclidean:3",
    "euclidean:4",
    "euclidean:5",
    "schwarzschild:3:1",
    "schwarzschild:4:1",
    "schwarzschild:5:1",
    "perturb:3:1:0.1:7",
    "perturb:4:2:0.1:7",
];

const CATALOG_GEOMETRIES: [&str; 6] = [
    "cube:3:1",
    "cube:4:1",
    "cube:5:1",
    "octahedron:1",
    "tetrahedron:1",
    "lprism:1:0.5:2",
];

pub fn cmd_catalog(_config: &RunConfig) -> Result<Table, CliError> {
    let mut t = Table::new(vec!["kind", "id", "dim", "analytic_mass", "faces", "edges"]);
    for id in CATALOG_FIELDS {
        let entry: CatalogEntry = id.parse()?;
        t.push(vec![
            "field".into(),
            id.into(),
            entry.dim().into(),
            entry.analytic_mass().into(),
            Cell::Missing,
            Cell::Missing,
        ]);
    }
    for id in CATALOG_GEOMETRIES {
        let spec: GeometrySpec = id.parse()?;
        let p = load_polyhedron(&spec)?;
        t.push(vec![
            "geometry".into(),
            id.into(),
            p.dim().into(),
            Cell::Missing,
            p.faces().len().into(),
            p.edges().len().into(),
        ]);
    }
    t.push(vec![
        "geometry".into(),
        "sphere:<n>:<r>".into(),
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
        Cell::Missing,
    ]);
    Ok(t)
}

fn mass_table() -> Table {
    Table::new(vec![
        "method",
        "field",
        "geometry",
        "dim",
        "scale",
        "face_integral",
        "edge_integral",
        "mass",
        "quad_error",
    ])
}

fn mass_row(field: &MetricField, r: &MassReport<f64>) -> Vec<Cell> {
    vec![
        r.method.to_string().into(),
        field.label().into(),
        r.geometry.clone().into(),
        r.dim.into(),
        r.scale.into(),
        r.face_integral.into(),
        r.edge_integral.into(),
        r.mass.into(),
        r.quad_error.into(),
    ]
}

pub fn cmd_mass(config: &RunConfig, field: &str, geometry: &str, method: Method) -> Result<Table, CliError> {
    let geometry: GeometryId = geometry.parse()?;
    let field = load_field(field)?;
    let options = config.mass_options();
    let mut t = mass_table();
    match geometry {
        GeometryId::Sphere { dim, radius } => {
            check_dims(&field, dim)?;
            if method == Method::Polyhedral {
                return Err(CliError::Config("the polyhedral method needs a polyhedron, not a sphere".into()));
            }
            let r = adm_flux_mass(&field, FluxSurface::Sphere { radius }, &options)?;
            t.push(mass_row(&field, &r));
        }
        GeometryId::Polyhedron(spec) => {
            check_dims(&field, spec.dim())?;
            let p = load_polyhedron(&spec)?;
            if matches!(method, Method::Polyhedral | Method::All) {
                t.push(mass_row(&field, &polyhedral_mass(&field, &p, &options)?));
            }
            if matches!(method, Method::Flux | Method::All) {
                let r = adm_flux_mass(&field, FluxSurface::Polyhedron(&p), &options)?;
                t.push(mass_row(&field, &r));
            }
        }
    }
    Ok(t)
}

pub fn cmd_converge(config: &RunConfig, field: &str, geometry: &str, scales: &[f64]) -> Result<Table, CliError> {
    let spec = match geometry.parse::<GeometryId>()? {
        GeometryId::Polyhedron(spec) => spec,
        GeometryId::Sphere { .. } => {
            return Err(CliError::Config("converge needs a polyhedron as base geometry".into()))
        }
    };
    let field = load_field(field)?;
    check_dims(&field, spec.dim())?;
    let base = load_polyhedron(&spec)?;
    let table = convergence_study(&field, &base, scales, &config.mass_options())?;
    let mut t = Table::new(vec![
        "field",
        "geometry",
        "scale",
        "polyhedral_mass",
        "polyhedral_quad_error",
        "flux_mass",
        "gap",
        "polyhedral_fitted_order",
        "polyhedral_extrapolated",
        "flux_fitted_order",
        "flux_extrapolated",
    ]);
    for (row, gap) in table.rows.iter().zip(table.method_gaps()) {
        t.push(vec![
            table.field.clone().into(),
            table.geometry.clone().into(),
            row.scale.into(),
            row.polyhedral.mass.into(),
            row.polyhedral.quad_error.into(),
            row.flux.mass.into(),
            gap.into(),
            table.polyhedral_fit.fitted_order.into(),
            table.polyhedral_fit.extrapolated.into(),
            table.flux_fit.fitted_order.into(),
            table.flux_fit.extrapolated.into(),
        ]);
    }
    Ok(t)
}

/// Largest relative analytic-versus-difference discrepancy over the ladder points.
pub fn derivative_report(field: &MetricField) -> Result<ExpansionResidualReport, CliError> {
    let n = field.dim();
    let mut residuals = Vec::with_capacity(LADDER_RADII.len());
    for &r in &LADDER_RADII {
        let check = field.derivative_consistency(&face_sample_point(n, r))?;
        residuals.push(check.first.max(check.second));
    }
    let passed = residuals.iter().all(|&v| v <= DERIVATIVE_TOLERANCE);
    Ok(ExpansionResidualReport {
        name: "derivative_consistency".into(),
        radii: LADDER_RADII.to_vec(),
        exact: residuals.iter().all(|&v| v == 0.0),
        residuals,
        predicted_order: None,
        fitted_order: None,
        tolerance: DERIVATIVE_TOLERANCE,
        passed,
    })
}

/// Residual table and the names of failing rows.
pub fn cmd_verify(
    _config: &RunConfig,
    field: &str,
    corrupt_derivative: Option<f64>,
) -> Result<(Table, Vec<String>), CliError> {
    let mut field = load_field(field)?;
    if let Some(factor) = corrupt_derivative {
        field = field.with_scaled_derivative(factor);
    }
    let mut reports = vec![derivative_report(&field)?];
    reports.extend(standard_ladders(&field)?);
    reports.extend(slice_ladders(&field)?);
    let mut t = Table::new(vec![
        "field",
        "name",
        "predicted_order",
        "fitted_order",
        "tolerance",
        "max_residual",
        "exact",
        "passed",
    ]);
    let mut failed = Vec::new();
    for r in &reports {
        if !r.passed {
            failed.push(r.name.clone());
        }
        t.push(vec![
            field.label().into(),
            r.name.clone().into(),
            r.predicted_order.into(),
            r.fitted_order.into(),
            r.tolerance.into(),
            r.largest_residual().into(),
            r.exact.into(),
            r.passed.into(),
        ]);
    }
    Ok((t, failed))
}

/// Zero-based axes from `all` or a 1-based index.
pub fn parse_axes(axis: &str, dim: usize) -> Result<Vec<usize>, CliError> {
    if axis == "all" {
        return Ok((0..dim).collect());
    }
    match axis.parse::<usize>() {
        Ok(k) if (1..=dim).contains(&k) => Ok(vec![k - 1]),
        _ => Err(CliError::Config(format!(
            "--axis must be `all` or an integer in 1..={dim}, got `{axis}`"
        ))),
    }
}

pub fn cmd_slice(
    config: &RunConfig,
    field: &str,
    half_width: f64,
    axis: &str,
    integrate: bool,
    t_nodes: usize,
) -> Result<Table, CliError> {
    let field = load_field(field)?;
    let axes = parse_axes(axis, field.dim())?;
    if t_nodes == 0 {
        return Err(CliError::Config("--t-nodes must be positive".into()));
    }
    if integrate {
        if axes.len() != field.dim() {
            return Err(CliError::Config("--integrate sums over every axis; use --axis all".into()));
        }
        let mass = slice_mass_integral(&field, half_width, config.level, t_nodes)?;
        let cube = hypercube(field.dim(), half_width)?;
        let flux = adm_flux_mass(&field, FluxSurface::Polyhedron(&cube), &config.mass_options())?;
        let mut t = Table::new(vec!["field", "L", "t_nodes", "slice_mass", "flux_mass", "difference"]);
        t.push(vec![
            field.label().into(),
            half_width.into(),
            t_nodes.into(),
            mass.into(),
            flux.mass.into(),
            (mass - flux.mass).into(),
        ]);
        return Ok(t);
    }
    let profile = slice_profile(&field, &axes, half_width, config.level, t_nodes)?;
    let mut t = Table::new(vec!["field", "axis", "t", "face_integral", "edge_integral", "value"]);
    for q in profile {
        t.push(vec![
            field.label().into(),
            (q.axis + 1).into(),
            q.t.into(),
            q.face_integral.into(),
            q.edge_integral.into(),
            q.value.into(),
        ]);
    }
    Ok(t)
}
