//! Acceptance suite. Prints one PASS/FAIL line per criterion followed by its
//! sub-checks, and exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use polymass::extrinsic::{dihedral_angle, residual_identity_mt, standard_ladders};
use polymass::massflux::{
    adm_flux_mass, convergence_study, gromov_quantity, polyhedral_mass, FluxSurface, MassOptions,
};
use polymass::polytope::{hypercube, lshaped_prism_3d, GeometrySpec};
use polymass::quadrature::{
    edge_rule, face_rule, gauss_legendre, integrate_with_estimate, region_rule, sphere_rule,
};
use polymass::slicing::{slice_ladders, slice_mass_integral, slice_value};
use polymass::tensorfield::CatalogEntry;
use polymass::{MetricField, Polyhedron};
use polymass_cli::{run, ExitCode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEVEL: usize = 1;

const EUCLIDEAN_ZERO: f64 = 1e-12;
const EUCLIDEAN_BUDGET: Duration = Duration::from_secs(10);

const CONVERGENCE_SCALES: [f64; 4] = [25.0, 50.0, 100.0, 200.0];
const CONVERGENCE_ERROR: f64 = 1e-2;
const CONVERGENCE_ORDER: f64 = 1.0;
const CONVERGENCE_ORDER_TOL: f64 = 0.3;
const ORACLE_SPHERE_RADIUS: f64 = 400.0;
const ORACLE_AGREEMENT: f64 = 1e-3;
const CONVERGENCE_BUDGET: Duration = Duration::from_secs(120);

const METHOD_SCALE: f64 = 200.0;
const METHOD_AGREEMENT: f64 = 5e-3;

const ANGLE_INVARIANCE: f64 = 1e-12;

const RESIDUAL_ORDER_TOL: f64 = 0.3;
const RESIDUAL_BUDGET: Duration = Duration::from_secs(60);

const IDENTITY_TOL: f64 = 1e-10;
const IDENTITY_POINTS: usize = 100;

const SLICE_ORDER_TOL: f64 = 0.5;

const SLICE_MASS_TOL_3: f64 = 3e-2;
const SLICE_MASS_TOL_4: f64 = 5e-2;
const SLICE_T_NODES: usize = 32;
const SLICE_BUDGET: Duration = Duration::from_secs(600);

const QUADRATURE_EXACT: f64 = 1e-12;

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

const POLYHEDRA_3D: [&str; 4] = ["cube:3:1", "octahedron:1", "tetrahedron:1", "lprism:1:0.5:2"];

type Criterion = (&'static str, fn() -> Vec<Check>);

struct Check {
    label: String,
    passed: bool,
}

fn check(label: impl Into<String>, passed: bool) -> Check {
    Check {
        label: label.into(),
        passed,
    }
}

fn field(id: &str) -> MetricField {
    id.parse::<CatalogEntry>().unwrap().build().unwrap()
}

fn geometry(id: &str) -> Polyhedron {
    id.parse::<GeometrySpec>().unwrap().build().unwrap()
}

fn scaled(id: &str, r: f64) -> Polyhedron {
    geometry(id).scale(r).unwrap()
}

fn opts() -> MassOptions {
    MassOptions::with_level(LEVEL)
}

fn within_budget(start: Instant, budget: Duration) -> Check {
    let t = start.elapsed();
    check(format!("runtime {:.2?} < {:?}", t, budget), t < budget)
}

fn euclidean_exactness() -> Vec<Check> {
    let start = Instant::now();
    let mut out = Vec::new();
    let cases: Vec<(&str, &str)> = vec![
        ("euclidean:3", "cube:3:1"),
        ("euclidean:4", "cube:4:1"),
        ("euclidean:5", "cube:5:1"),
        ("euclidean:3", "octahedron:1"),
        ("euclidean:3", "tetrahedron:1"),
        ("euclidean:3", "lprism:1:0.5:2"),
    ];
    for (fid, gid) in cases {
        let f = field(fid);
        let p = scaled(gid, 10.0);
        let poly = polyhedral_mass(&f, &p, &opts()).unwrap().mass;
        let flux = adm_flux_mass(&f, FluxSurface::Polyhedron(&p), &opts()).unwrap().mass;
        let gromov = gromov_quantity(&f, &p, LEVEL).unwrap();
        let worst = poly.abs().max(flux.abs()).max(gromov.abs());
        out.push(check(format!("{gid}: polyhedral/flux/gromov max {worst:.1e}"), worst <= EUCLIDEAN_ZERO));
    }
    for n in [3usize, 4, 5] {
        let f = field(&format!("euclidean:{n}"));
        let sphere = adm_flux_mass(&f, FluxSurface::Sphere { radius: 10.0 }, &opts()).unwrap().mass;
        let mut worst: f64 = sphere.abs();
        for k in 0..n {
            for t in [-7.5, 0.0, 3.0] {
                worst = worst.max(slice_value(&f, k, t, 10.0, LEVEL).unwrap().value.abs());
            }
        }
        worst = worst.max(slice_mass_integral(&f, 10.0, 0, 8).unwrap().abs());
        out.push(check(format!("euclidean:{n}: sphere flux and slice quantities max {worst:.1e}"), worst <= EUCLIDEAN_ZERO));
    }
    out.push(within_budget(start, EUCLIDEAN_BUDGET));
    out
}

fn schwarzschild_convergence() -> Vec<Check> {
    let start = Instant::now();
    let f = field("schwarzschild:3:1");
    let table = convergence_study(&f, &geometry("cube:3:1"), &CONVERGENCE_SCALES, &opts()).unwrap();
    let err200 = (table.rows.last().unwrap().polyhedral.mass - 1.0).abs();
    let order = table.polyhedral_fit.fitted_order.unwrap_or(f64::NAN);
    let sphere = adm_flux_mass(&f, FluxSurface::Sphere { radius: ORACLE_SPHERE_RADIUS }, &opts())
        .unwrap()
        .mass;
    vec![
        check(format!("|error(200)| = {err200:.3e} <= {CONVERGENCE_ERROR:e}"), err200 <= CONVERGENCE_ERROR),
        check(
            format!("fitted order {order:.4} within {CONVERGENCE_ORDER} ± {CONVERGENCE_ORDER_TOL}"),
            (order - CONVERGENCE_ORDER).abs() <= CONVERGENCE_ORDER_TOL,
        ),
        check(
            format!(
                "sphere flux at r = {ORACLE_SPHERE_RADIUS} is {sphere:.6}, |flux − 1| = {:.3e} <= {ORACLE_AGREEMENT:e}",
                (sphere - 1.0).abs()
            ),
            (sphere - 1.0).abs() <= ORACLE_AGREEMENT,
        ),
        within_budget(start, CONVERGENCE_BUDGET),
    ]
}

fn method_independence() -> Vec<Check> {
    let f = field("schwarzschild:3:1");
    let cube = scaled("cube:3:1", METHOD_SCALE);
    let poly = polyhedral_mass(&f, &cube, &opts()).unwrap().mass;
    let flux = adm_flux_mass(&f, FluxSurface::Polyhedron(&cube), &opts()).unwrap().mass;
    let mut out = vec![check(
        format!("cube: polyhedral {poly:.6} vs flux {flux:.6}, gap {:.3e}", (poly - flux).abs()),
        (poly - flux).abs() <= METHOD_AGREEMENT,
    )];
    let ids = ["cube:3:1", "octahedron:1", "lprism:1:0.5:2"];
    let masses: Vec<f64> = ids
        .iter()
        .map(|id| polyhedral_mass(&f, &scaled(id, METHOD_SCALE), &opts()).unwrap().mass)
        .collect();
    for a in 0..ids.len() {
        for b in a + 1..ids.len() {
            let gap = (masses[a] - masses[b]).abs();
            out.push(check(
                format!("{} {:.6} vs {} {:.6}, gap {gap:.3e}", ids[a], masses[a], ids[b], masses[b]),
                gap <= METHOD_AGREEMENT,
            ));
        }
    }
    out
}

fn conformal_angle_invariance() -> Vec<Check> {
    let mut cases: Vec<(&str, &str, f64)> = Vec::new();
    for id in POLYHEDRA_3D {
        for r in [50.0, 200.0] {
            cases.push(("schwarzschild:3:1", id, r));
        }
    }
    cases.push(("schwarzschild:4:1", "cube:4:1", 50.0));
    cases.push(("schwarzschild:4:1", "cube:4:1", 200.0));
    let mut out = Vec::new();
    for (fid, gid, r) in cases {
        let f = field(fid);
        let p = scaled(gid, r);
        let mut worst: f64 = 0.0;
        let mut nodes = 0usize;
        for e in p.edges() {
            let rule = edge_rule(e, LEVEL).unwrap();
            for x in &rule.points {
                let alpha = dihedral_angle(&f, &e.normal_a, &e.normal_b, e.convex, x).unwrap().alpha;
                worst = worst.max((alpha - e.euclidean_angle).abs());
                nodes += 1;
            }
        }
        let edge = polyhedral_mass(&f, &p, &opts()).unwrap().edge_integral;
        let bound = ANGLE_INVARIANCE * p.total_edge_length();
        out.push(check(
            format!("{fid} on {gid} × {r}: max |α − ᾱ| {worst:.1e} over {nodes} nodes, |edge integral| {:.1e} <= {bound:.1e}", edge.abs()),
            worst <= ANGLE_INVARIANCE && edge.abs() <= bound,
        ));
    }
    out
}

fn residual_orders() -> Vec<Check> {
    let start = Instant::now();
    let f = field("perturb:3:1:0.1:7");
    let reports = standard_ladders(&f).unwrap();
    let mut out = Vec::new();
    for (name, predicted) in [("prop21", 3.0), ("normal_expansion", 2.0), ("cos_angle", 2.0), ("angle_defect", 1.0)] {
        let r = reports.iter().find(|r| r.name == name).unwrap();
        let fitted = r.fitted_order.unwrap_or(f64::NAN);
        out.push(check(
            format!("{name}: fitted {fitted:.4}, predicted {predicted} ± {RESIDUAL_ORDER_TOL}"),
            (fitted - predicted).abs() <= RESIDUAL_ORDER_TOL,
        ));
    }
    out.push(within_budget(start, RESIDUAL_BUDGET));
    out
}

fn exact_identity() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    for id in CATALOG_FIELDS {
        let f = field(id);
        let n = f.dim();
        let r0 = f.smallness_radius().max(f.inner_radius()) + 1.0;
        let mut worst: f64 = 0.0;
        for _ in 0..IDENTITY_POINTS {
            let r = rng.gen_range(r0..200.0);
            let axis = rng.gen_range(0..n);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..r)).collect();
            x[axis] = sign * r;
            let mut nu = vec![0.0; n];
            nu[axis] = sign;
            worst = worst.max(residual_identity_mt(&f, &nu, &x).unwrap());
        }
        out.push(check(
            format!("{id}: analytic derivatives {}, max residual {worst:.1e}", f.has_analytic_derivatives()),
            f.has_analytic_derivatives() && worst <= IDENTITY_TOL,
        ));
    }
    out
}

fn slice_consistency() -> Vec<Check> {
    let mut out = Vec::new();
    for id in ["schwarzschild:4:1", "perturb:4:2:0.1:7"] {
        let f = field(id);
        for r in slice_ladders(&f).unwrap() {
            let text = match r.fitted_order {
                Some(q) => format!("fitted {q:.4}"),
                None => format!("identically zero (max {:.1e})", r.largest_residual()),
            };
            let predicted = r.predicted_order.unwrap();
            let ok = r.exact || r.fitted_order.is_some_and(|q| (q - predicted).abs() <= SLICE_ORDER_TOL);
            out.push(check(format!("{id} {}: {text}, predicted {predicted} ± {SLICE_ORDER_TOL}", r.name), ok));
        }
    }
    out
}

fn slicing_mass() -> Vec<Check> {
    let start = Instant::now();
    let m3 = slice_mass_integral(&field("schwarzschild:3:1"), 100.0, LEVEL, SLICE_T_NODES).unwrap();
    let m4 = slice_mass_integral(&field("schwarzschild:4:1"), 50.0, LEVEL, SLICE_T_NODES).unwrap();
    vec![
        check(format!("n = 3, L = 100: {m3:.6}, |m − 1| <= {SLICE_MASS_TOL_3:e}"), (m3 - 1.0).abs() <= SLICE_MASS_TOL_3),
        check(format!("n = 4, L = 50: {m4:.6}, |m − 1| <= {SLICE_MASS_TOL_4:e}"), (m4 - 1.0).abs() <= SLICE_MASS_TOL_4),
        within_budget(start, SLICE_BUDGET),
    ]
}

fn gromov_nonnegativity() -> Vec<Check> {
    let mut out = Vec::new();
    let f3 = field("schwarzschild:3:1");
    for id in POLYHEDRA_3D {
        let values: Vec<f64> = [50.0, 100.0, 200.0]
            .iter()
            .map(|&r| gromov_quantity(&f3, &scaled(id, r), LEVEL).unwrap())
            .collect();
        out.push(check(
            format!("schwarzschild:3:1 on {id} at 50/100/200: min {:.4e}", values.iter().copied().fold(f64::INFINITY, f64::min)),
            values.iter().all(|&v| v >= 0.0),
        ));
    }
    for (fid, gid) in [("schwarzschild:4:1", "cube:4:1"), ("schwarzschild:5:1", "cube:5:1")] {
        let f = field(fid);
        let v = gromov_quantity(&f, &scaled(gid, 50.0), 0).unwrap();
        out.push(check(format!("{fid} on {gid} at 50: {v:.4e}"), v >= 0.0));
    }
    out
}

fn cli_bytes(args: &[&str]) -> (ExitCode, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("polymass").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn quadrature_soundness() -> Vec<Check> {
    let mut out = Vec::new();

    let mut worst: f64 = 0.0;
    for m in [8usize, 16, 32] {
        let (x, w) = gauss_legendre::<f64>(m);
        for k in 0..2 * m {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            worst = worst.max((got - want).abs());
        }
    }
    out.push(check(format!("Gauss–Legendre degree 2m−1 exactness, max error {worst:.1e}"), worst <= QUADRATURE_EXACT));

    let cube = hypercube::<f64>(3, 1.0).unwrap();
    let rule = face_rule(&cube.faces()[0], 0).unwrap();
    let mut worst: f64 = 0.0;
    for a in 0..16 {
        for b in 0..16 {
            let got = rule.integrate(|x| Ok(x[1].powi(a) * x[2].powi(b))).unwrap();
            let mono = |k: i32| if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            worst = worst.max((got - mono(a) * mono(b)).abs());
        }
    }
    out.push(check(format!("cube face tensor rule exact through degree 15 per axis, max error {worst:.1e}"), worst <= QUADRATURE_EXACT));

    let prism = lshaped_prism_3d::<f64>(1.0, 0.5, 2.0).unwrap();
    let cap = prism.faces().iter().find(|f| f.unit_normal[2] > 0.5).unwrap();
    let rule = region_rule(&cap.region, 0).unwrap();
    let rect = |p: i32, q: i32, x0: f64, x1: f64, y0: f64, y1: f64| {
        let prim = |k: i32, a: f64, b: f64| (b.powi(k + 1) - a.powi(k + 1)) / (k as f64 + 1.0);
        prim(p, x0, x1) * prim(q, y0, y1)
    };
    let mut worst: f64 = 0.0;
    for p in 0..=8 {
        for q in 0..=(8 - p) {
            let got = rule.integrate(|x| Ok(x[0].powi(p) * x[1].powi(q))).unwrap();
            let want = rect(p, q, -1.0, 1.0, -1.0, 1.0) - rect(p, q, 0.5, 1.0, 0.5, 1.0);
            worst = worst.max((got - want).abs());
        }
    }
    out.push(check(format!("non-convex L cap exact through total degree 8, max error {worst:.1e}"), worst <= QUADRATURE_EXACT));

    let mut worst: f64 = 0.0;
    for n in [3usize, 4, 5] {
        let r = 3.0;
        let rule = sphere_rule::<f64>(n, r, 1).unwrap();
        let area = polymass::massflux::sphere_volume_constant::<f64>(n - 1) * r.powi(n as i32 - 1);
        let second = rule.integrate(|x| Ok(x[0] * x[0])).unwrap();
        let odd = rule.integrate(|x| Ok(x[0] * x[1].powi(3))).unwrap();
        worst = worst
            .max(((rule.total_weight() - area) / area).abs())
            .max(((second - area * r * r / n as f64) / area).abs())
            .max((odd / area).abs());
    }
    out.push(check(format!("sphere rule area and moments, max relative error {worst:.1e}"), worst <= QUADRATURE_EXACT));

    let f = field("schwarzschild:3:1");
    let cube50 = hypercube::<f64>(3, 50.0).unwrap();
    let face = &cube50.faces()[0];
    let integrand = |x: &[f64]| polymass::extrinsic::mean_curvature_at(&f, &face.unit_normal, x);
    let estimates: Vec<f64> = (1..=3)
        .map(|l| integrate_with_estimate(&face.region, l, integrand).unwrap().error_estimate.unwrap())
        .collect();
    out.push(check(
        format!("refinement estimates non-increasing: {:.1e} {:.1e} {:.1e}", estimates[0], estimates[1], estimates[2]),
        estimates.windows(2).all(|w| w[1] <= w[0]),
    ));
    let q: Vec<f64> = (1..=3)
        .map(|l| polyhedral_mass(&f, &scaled("cube:3:1", 100.0), &MassOptions::with_level(l)).unwrap().quad_error.unwrap())
        .collect();
    out.push(check(
        format!("polyhedral mass quad_error non-increasing: {:.1e} {:.1e} {:.1e}", q[0], q[1], q[2]),
        q.windows(2).all(|w| w[1] <= w[0]),
    ));

    let runs: [&[&str]; 4] = [
        &["converge", "--field", "schwarzschild:3:1", "--geometry", "cube:3:1"],
        &["mass", "--field", "perturb:3:1:0.1:7", "--geometry", "scale:lprism:1:0.5:2:100", "--format", "json"],
        &["slice", "--field", "schwarzschild:4:1", "--L", "30", "--t-nodes", "4", "--quad-level", "0"],
        &["verify", "--field", "perturb:4:2:0.1:7"],
    ];
    for args in runs {
        let (c1, a) = cli_bytes(args);
        let (c2, b) = cli_bytes(args);
        let mut single = vec!["--threads", "1"];
        single.extend_from_slice(args);
        let (c3, c) = cli_bytes(&single);
        let ok = c1 == c2 && c1 == c3 && a == b && a == c && !a.is_empty();
        out.push(check(format!("byte-identical reruns of `{}`", args[..3].join(" ")), ok));
    }
    out
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("Euclidean exactness", euclidean_exactness),
        ("Schwarzschild n=3 convergence", schwarzschild_convergence),
        ("method independence", method_independence),
        ("conformal angle invariance", conformal_angle_invariance),
        ("expansion residual orders", residual_orders),
        ("exact identity", exact_identity),
        ("slice consistency", slice_consistency),
        ("slicing mass", slicing_mass),
        ("Gromov nonnegativity", gromov_nonnegativity),
        ("quadrature soundness and determinism", quadrature_soundness),
    ];
    let mut failures = 0;
    for (i, (name, body)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let checks = catch_unwind(AssertUnwindSafe(body))
            .unwrap_or_else(|_| vec![check("criterion panicked", false)]);
        let passed = checks.iter().all(|c| c.passed);
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.2?})",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            start.elapsed()
        );
        for c in &checks {
            println!("    [{}] {}", if c.passed { "ok" } else { "FAIL" }, c.label);
        }
    }
    println!("acceptance: {} of 10 criteria failed", failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
