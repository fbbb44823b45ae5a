use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::table::Format;

#[derive(Debug, Parser)]
#[command(name = "polymass", version, about = "ADM mass from polyhedra, flux integrals and slices")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Quadrature refinement level; 8·2^level Gauss nodes per axis.
    #[arg(long, global = true, default_value_t = 1)]
    pub quad_level: usize,

    /// Lower bound on |sin| of every Euclidean dihedral angle.
    #[arg(long = "c", global = true, default_value_t = 0.5)]
    pub angle_constant: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; defaults to one per core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List catalog fields and geometries.
    Catalog,

    /// Mass of one field on one geometry.
    Mass {
        #[arg(long)]
        field: String,
        /// Polyhedron id, or `sphere:n:r` for the flux on a sphere.
        #[arg(long)]
        geometry: String,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },

    /// Polyhedral and flux masses over a scaled family.
    Converge {
        #[arg(long)]
        field: String,
        /// Base polyhedron id.
        #[arg(long)]
        geometry: String,
        #[arg(long, value_delimiter = ',', default_values_t = [25.0, 50.0, 100.0, 200.0])]
        scales: Vec<f64>,
    },

    /// Fit the decay of every expansion residual.
    Verify {
        #[arg(long)]
        field: String,
        /// Multiply analytic first derivatives by this factor.
        #[arg(long, hide = true)]
        corrupt_derivative: Option<f64>,
    },

    /// Slice quantities and the slicing mass.
    Slice {
        #[arg(long)]
        field: String,
        /// Half width of the cube.
        #[arg(long = "L")]
        half_width: f64,
        /// Slice axis, 1-based, or `all`.
        #[arg(long, default_value = "all")]
        axis: String,
        /// Emit (t, value) rows.
        #[arg(long, conflicts_with = "integrate")]
        profile: bool,
        /// Emit the integrated mass and the flux mass on the same cube.
        #[arg(long)]
        integrate: bool,
        #[arg(long, default_value_t = polymass::slicing::DEFAULT_T_NODES)]
        t_nodes: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Polyhedral,
    Flux,
    All,
}
