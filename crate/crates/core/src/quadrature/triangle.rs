use crate::error::{Error, Result};
use crate::linalg::{cross, norm, sub};
use crate::polytope::newell;
use crate::scalar::Scalar;

use crate::polytope::plane_coords;

/// Dunavant's symmetric 16-point rule, exact through degree 8.
///
/// Rows are `(a, b, c, weight)` orbits in barycentric coordinates; weights sum to one.
const DUNAVANT_8: [(f64, f64, f64, f64); 5] = [
    (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.144_315_607_677_787),
    (0.459_292_588_292_723, 0.459_292_588_292_723, 0.081_414_823_414_554, 0.095_091_634_267_285),
    (0.170_569_307_751_760, 0.170_569_307_751_760, 0.658_861_384_496_480, 0.103_217_370_534_718),
    (0.050_547_228_317_031, 0.050_547_228_317_031, 0.898_905_543_365_938, 0.032_458_497_623_198),
    (0.008_394_777_409_958, 0.263_112_829_634_638, 0.728_492_392_955_404, 0.027_230_314_174_435),
];

/// Barycentric nodes and weights of the degree-8 rule, orbits expanded.
pub(crate) fn dunavant_nodes<T: Scalar>() -> Vec<([T; 3], T)> {
    let mut out = Vec::with_capacity(16);
    for &(a, b, c, w) in &DUNAVANT_8 {
        let mut orbit: Vec<[f64; 3]> = vec![
            [a, b, c],
            [b, c, a],
            [c, a, b],
            [a, c, b],
            [c, b, a],
            [b, a, c],
        ];
        orbit.sort_by(|x, y| x.partial_cmp(y).unwrap());
        orbit.dedup_by(|x, y| x.iter().zip(y.iter()).all(|(p, q)| (p - q).abs() < 1e-14));
        for bary in orbit {
            out.push((bary.map(T::lit), T::lit(w)));
        }
    }
    out
}

pub(crate) type Triangle<T> = [Vec<T>; 3];

/// Splits a planar loop into triangles.
///
/// Convex loops are fanned from their vertex centroid; other loops are ear-clipped.
pub(crate) fn triangulate<T: Scalar>(loop_: &[Vec<T>]) -> Result<Vec<Triangle<T>>> {
    let m = loop_.len();
    let area_vec = newell(loop_);
    let scale = norm(&area_vec);
    if m < 3 || !(scale > T::zero()) {
        return Err(Error::Geometry("degenerate polygon".into()));
    }
    let nrm: Vec<T> = area_vec.iter().map(|&c| c / scale).collect();
    let turn = |a: &[T], b: &[T], c: &[T]| -> T {
        let t = cross(&sub(b, a), &sub(c, b));
        t.iter().zip(&nrm).map(|(&x, &y)| x * y).sum()
    };
    let convex = (0..m).all(|k| turn(&loop_[k], &loop_[(k + 1) % m], &loop_[(k + 2) % m]) > T::zero());
    if convex {
        let count = T::from_usize_lossy(m);
        let centre: Vec<T> = (0..3)
            .map(|i| loop_.iter().map(|v| v[i]).sum::<T>() / count)
            .collect();
        return Ok((0..m)
            .map(|k| [centre.clone(), loop_[k].clone(), loop_[(k + 1) % m].clone()])
            .collect());
    }

    let pts: Vec<(T, T)> = loop_.iter().map(|p| plane_coords(loop_, &nrm, p)).collect();
    let cross2 = |a: (T, T), b: (T, T), c: (T, T)| (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let mut idx: Vec<usize> = (0..m).collect();
    let mut out = Vec::with_capacity(m - 2);
    while idx.len() > 3 {
        let k = idx.len();
        let ear = (0..k).find(|&i| {
            let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
            if !(cross2(pts[a], pts[b], pts[c]) > T::zero()) {
                return false;
            }
            idx.iter().filter(|&&j| j != a && j != b && j != c).all(|&j| {
                let p = pts[j];
                !(cross2(pts[a], pts[b], p) >= T::zero()
                    && cross2(pts[b], pts[c], p) >= T::zero()
                    && cross2(pts[c], pts[a], p) >= T::zero())
            })
        });
        let Some(i) = ear else {
            return Err(Error::Geometry("polygon could not be triangulated".into()));
        };
        let (a, b, c) = (idx[(i + k - 1) % k], idx[i], idx[(i + 1) % k]);
        out.push([loop_[a].clone(), loop_[b].clone(), loop_[c].clone()]);
        idx.remove(i);
    }
    out.push([loop_[idx[0]].clone(), loop_[idx[1]].clone(), loop_[idx[2]].clone()]);
    Ok(out)
}

/// Splits every triangle into four at its edge midpoints, `level` times.
pub(crate) fn subdivide<T: Scalar>(tris: Vec<Triangle<T>>, level: usize) -> Vec<Triangle<T>> {
    let mut tris = tris;
    let half = T::lit(0.5);
    for _ in 0..level {
        let mid = |a: &[T], b: &[T]| -> Vec<T> { a.iter().zip(b).map(|(&x, &y)| half * (x + y)).collect() };
        tris = tris
            .iter()
            .flat_map(|[a, b, c]| {
                let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
                [
                    [a.clone(), ab.clone(), ca.clone()],
                    [ab.clone(), b.clone(), bc.clone()],
                    [ca.clone(), bc.clone(), c.clone()],
                    [ab, bc, ca],
                ]
            })
            .collect();
    }
    tris
}

pub(crate) fn triangle_area<T: Scalar>([a, b, c]: &Triangle<T>) -> T {
    T::lit(0.5) * norm(&cross(&sub(b, a), &sub(c, a)))
}
