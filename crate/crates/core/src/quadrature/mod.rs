//! Gauss-type rules over faces, edges, coordinate spheres and intervals.

mod triangle;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polytope::{Edge, Face, Region};
use crate::scalar::Scalar;

/// Default refinement level.
pub const DEFAULT_LEVEL: usize = 1;

/// Gauss–Legendre nodes per axis at level 0.
pub const BASE_NODES: usize = 8;

/// Points and positive weights; the weights sum to the region's volume.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<T> {
    pub points: Vec<Vec<T>>,
    pub weights: Vec<T>,
    pub level: usize,
}

/// Quadrature value with the difference to the next coarser level, when there is one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error_estimate: Option<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// `Σ w_i f(x_i)`; nodes are evaluated in parallel and summed in order.
    pub fn integrate<F>(&self, f: F) -> Result<T>
    where
        F: Fn(&[T]) -> Result<T> + Sync,
    {
        let values: Vec<Result<T>> = self.points.par_iter().map(|x| f(x)).collect();
        let mut acc = T::zero();
        for (node, (v, &w)) in values.into_iter().zip(&self.weights).enumerate() {
            let v = v?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    node,
                    point: self.points[node].iter().map(|c| c.as_f64()).collect(),
                });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre<T: Scalar>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![0.0f64; m];
    let mut weights = vec![0.0f64; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 { 1.0 } else if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = mf * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes.into_iter().map(T::lit).collect(), weights.into_iter().map(T::lit).collect())
}

/// Gauss–Legendre rule on `[a, b]`.
pub fn interval_rule<T: Scalar>(a: T, b: T, m: usize) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(m);
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    (
        x.iter().map(|&t| mid + half * t).collect(),
        w.iter().map(|&v| v * half).collect(),
    )
}

/// Nodes per axis at a given level: `8 · 2^level`.
pub fn nodes_per_axis(level: usize) -> usize {
    BASE_NODES << level
}

/// Rule over any face or edge region.
pub fn region_rule<T: Scalar>(region: &Region<T>, level: usize) -> Result<QuadratureRule<T>> {
    match region {
        Region::Box(b) => {
            let m = nodes_per_axis(level);
            let axes: Vec<(Vec<T>, Vec<T>)> = b
                .free
                .iter()
                .map(|&(_, lo, hi)| {
                    if !(hi > lo) {
                        return Err(Error::Geometry("empty box region".into()));
                    }
                    Ok(interval_rule(lo, hi, m))
                })
                .collect::<Result<_>>()?;
            let total = axes.iter().map(|a| a.0.len()).product::<usize>();
            let mut points = Vec::with_capacity(total);
            let mut weights = Vec::with_capacity(total);
            let mut idx = vec![0usize; axes.len()];
            for _ in 0..total {
                let coords: Vec<T> = idx.iter().zip(&axes).map(|(&i, a)| a.0[i]).collect();
                let w = idx.iter().zip(&axes).map(|(&i, a)| a.1[i]).fold(T::one(), |p, q| p * q);
                points.push(b.point(&coords));
                weights.push(w);
                for (d, i) in idx.iter_mut().enumerate() {
                    *i += 1;
                    if *i < axes[d].0.len() {
                        break;
                    }
                    *i = 0;
                }
            }
            Ok(QuadratureRule {
                points,
                weights,
                level,
            })
        }
        Region::Segment([a, b]) => {
            let len = region.measure();
            if !(len > T::zero()) {
                return Err(Error::Geometry("zero-length segment".into()));
            }
            let (t, w) = interval_rule(T::zero(), T::one(), nodes_per_axis(level));
            Ok(QuadratureRule {
                points: t
                    .iter()
                    .map(|&s| a.iter().zip(b).map(|(&p, &q)| p + s * (q - p)).collect())
                    .collect(),
                weights: w.iter().map(|&v| v * len).collect(),
                level,
            })
        }
        Region::Polygon(v) => {
            let tris = triangle::subdivide(triangle::triangulate(v)?, level);
            let nodes = triangle::dunavant_nodes::<T>();
            let mut points = Vec::with_capacity(tris.len() * nodes.len());
            let mut weights = Vec::with_capacity(tris.len() * nodes.len());
            for tri in &tris {
                let area = triangle::triangle_area(tri);
                for (bary, w) in &nodes {
                    points.push(
                        (0..3)
                            .map(|i| bary[0] * tri[0][i] + bary[1] * tri[1][i] + bary[2] * tri[2][i])
                            .collect(),
                    );
                    weights.push(*w * area);
                }
            }
            Ok(QuadratureRule {
                points,
                weights,
                level,
            })
        }
    }
}

pub fn face_rule<T: Scalar>(face: &Face<T>, level: usize) -> Result<QuadratureRule<T>> {
    region_rule(&face.region, level)
}

pub fn edge_rule<T: Scalar>(edge: &Edge<T>, level: usize) -> Result<QuadratureRule<T>> {
    region_rule(&edge.region, level)
}

/// Integrates over a region at `level`, estimating the error against `level - 1`.
pub fn integrate_with_estimate<T, F>(region: &Region<T>, level: usize, f: F) -> Result<Integral<T>>
where
    T: Scalar,
    F: Fn(&[T]) -> Result<T> + Sync,
{
    let value = region_rule(region, level)?.integrate(&f)?;
    let error_estimate = if level > 0 {
        let coarse = region_rule(region, level - 1)?.integrate(&f)?;
        Some((value - coarse).abs())
    } else {
        None
    };
    Ok(Integral {
        value,
        error_estimate,
    })
}

/// Product rule on the coordinate sphere `|x| = r` in `R^n`.
///
/// Polar angles use Gauss–Legendre with `8 · 2^level` nodes; the azimuth uses
/// the periodic trapezoid rule with twice as many.
pub fn sphere_rule<T: Scalar>(n: usize, radius: T, level: usize) -> Result<QuadratureRule<T>> {
    if n < 2 {
        return Err(Error::Dimension { got: n, min: 2 });
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("sphere radius must be positive, got {radius}")));
    }
    let m = nodes_per_axis(level);
    let (phi, wphi) = interval_rule(T::zero(), T::PI(), m);
    let az = 2 * m;
    let dtheta = T::TAU() / T::from_usize_lossy(az);
    let polar = n - 2;
    let total = m.pow(polar as u32) * az;
    let mut points = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; polar];
    let rn1 = radius.powi(n as i32 - 1);
    for _ in 0..m.pow(polar as u32) {
        let mut w = rn1 * dtheta;
        let mut prefix = T::one();
        let mut head = Vec::with_capacity(n);
        for (k, &i) in idx.iter().enumerate() {
            let (s, c) = phi[i].sin_cos();
            head.push(prefix * c);
            w *= wphi[i] * s.powi((n - 2 - k) as i32);
            prefix *= s;
        }
        for a in 0..az {
            let theta = dtheta * T::from_usize_lossy(a);
            let (s, c) = theta.sin_cos();
            let mut x: Vec<T> = head.iter().map(|&h| radius * h).collect();
            x.push(radius * prefix * c);
            x.push(radius * prefix * s);
            points.push(x);
            weights.push(w);
        }
        for i in idx.iter_mut() {
            *i += 1;
            if *i < m {
                break;
            }
            *i = 0;
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{hypercube, lshaped_prism_3d, octahedron, AxisBox};
    use proptest::prelude::*;

    #[test]
    fn gauss_legendre_exactness() {
        for m in 1..12 {
            let (x, w) = gauss_legendre::<f64>(m);
            for deg in 0..2 * m {
                let q: f64 = x.iter().zip(&w).map(|(&t, &v)| v * t.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn cube_face_monomials() {
        let l = 3.0;
        let c = hypercube::<f64>(3, l).unwrap();
        let face = &c.faces()[0];
        let rule = face_rule(face, 0).unwrap();
        assert!((rule.total_weight() - 4.0 * l * l).abs() < 1e-12);
        let v = rule.integrate(|x| Ok(x[1] * x[1])).unwrap();
        assert!((v - 4.0 / 3.0 * l.powi(4)).abs() < 1e-12 * l.powi(4));
        let odd = rule.integrate(|x| Ok(x[1] * x[2].powi(2))).unwrap();
        assert!(odd.abs() < 1e-13 * l.powi(5));
        assert!(rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cube_edge_monomials() {
        let l = 2.0;
        let c = hypercube::<f64>(3, l).unwrap();
        let vertical = c
            .edges()
            .iter()
            .find(|e| matches!(&e.region, Region::Box(b) if b.free[0].0 == 2))
            .unwrap();
        let rule = edge_rule(vertical, 1).unwrap();
        assert!((rule.total_weight() - 2.0 * l).abs() < 1e-14);
        let v = rule.integrate(|x| Ok(x[2] * x[2])).unwrap();
        assert!((v - 2.0 / 3.0 * l.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn polygon_faces_integrate_constants() {
        for p in [octahedron::<f64>(2.0).unwrap(), lshaped_prism_3d(3.0, 1.0, 2.0).unwrap()] {
            for face in p.faces() {
                for level in 0..3 {
                    let rule = face_rule(face, level).unwrap();
                    assert!((rule.total_weight() - face.area).abs() < 1e-12 * face.area);
                }
            }
        }
    }

    #[test]
    fn polygon_exact_for_low_degree() {
        // L-shaped cap: [-3,3]^2 minus [2,3]^2 at z = 1, ∫ x^2 y^2 dA.
        let p = lshaped_prism_3d::<f64>(3.0, 1.0, 2.0).unwrap();
        let cap = &p.faces()[0];
        let whole = (2.0 * 3f64.powi(3) / 3.0).powi(2);
        let notch = ((27.0 - 8.0) / 3.0f64).powi(2);
        let v = face_rule(cap, 0).unwrap().integrate(|x| Ok(x[0].powi(2) * x[1].powi(2))).unwrap();
        assert!((v - (whole - notch)).abs() < 1e-12 * whole);
    }

    #[test]
    fn zero_dimensional_box_is_a_point() {
        let b = Region::Box(AxisBox {
            dim: 2,
            fixed: vec![(0, 1.0), (1, -1.0)],
            free: vec![],
        });
        let rule = region_rule(&b, 2).unwrap();
        assert_eq!(rule.points, vec![vec![1.0, -1.0]]);
        assert_eq!(rule.weights, vec![1.0]);
    }

    #[test]
    fn sphere_area_and_moments() {
        let areas = [(3, 4.0 * std::f64::consts::PI), (4, 2.0 * std::f64::consts::PI.powi(2))];
        for (n, unit) in areas {
            let r = 7.0;
            let rule = sphere_rule::<f64>(n, r, 1).unwrap();
            assert!((rule.total_weight() - unit * r.powi(n as i32 - 1)).abs() < 1e-11 * r.powi(n as i32 - 1));
            // ∫ x_1^2 = r^2 |S| / n.
            let v = rule.integrate(|x| Ok(x[0] * x[0])).unwrap();
            let exact = r * r * unit * r.powi(n as i32 - 1) / n as f64;
            assert!((v - exact).abs() < 1e-11 * exact);
            assert!(rule.points.iter().all(|x| (crate::linalg::norm(x) - r).abs() < 1e-12));
        }
    }

    #[test]
    fn non_finite_values_name_the_node() {
        let c = hypercube::<f64>(3, 1.0).unwrap();
        let rule = face_rule(&c.faces()[0], 0).unwrap();
        let err = rule.integrate(|x| Ok(if x[1] > 0.9 { f64::NAN } else { 1.0 })).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
    }

    #[test]
    fn refinement_estimate_shrinks() {
        let c = hypercube::<f64>(3, 50.0).unwrap();
        let face = &c.faces()[0];
        let f = |x: &[f64]| Ok(1.0 / crate::linalg::norm(x).powi(3));
        let e1 = integrate_with_estimate(&face.region, 1, f).unwrap();
        let e2 = integrate_with_estimate(&face.region, 2, f).unwrap();
        assert!(e2.error_estimate.unwrap() <= e1.error_estimate.unwrap());
        // The kernel's complex poles sit one half-width from the face, which
        // caps 8-node Gauss–Legendre at about 1e-6 relative.
        let l0 = face_rule(face, 0).unwrap().integrate(f).unwrap();
        let l1 = face_rule(face, 1).unwrap().integrate(f).unwrap();
        let l3 = face_rule(face, 3).unwrap().integrate(f).unwrap();
        assert!(((l0 - l3) / l3).abs() < 1e-5);
        assert!(((l1 - l3) / l3).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn integration_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, k in 0usize..3) {
            let p = octahedron::<f64>(1.5).unwrap();
            let rule = face_rule(&p.faces()[k], 0).unwrap();
            let f = |x: &[f64]| x[0] * x[1] + 1.0;
            let g = |x: &[f64]| (x[2] + 2.0).ln();
            let lhs = rule.integrate(|x| Ok(a * f(x) + b * g(x))).unwrap();
            let rhs = a * rule.integrate(|x| Ok(f(x))).unwrap() + b * rule.integrate(|x| Ok(g(x))).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-13);
        }
    }
}
