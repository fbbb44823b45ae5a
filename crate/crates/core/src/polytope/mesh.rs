use std::collections::HashMap;

use super::{Edge, Face, Polyhedron, Region};
use crate::error::{Error, Result};
use crate::linalg::{cross, dot, norm, normalized, scaled, solve3, sub};
use crate::polytope::region::newell;
use crate::scalar::Scalar;

/// Builds a closed 3-D polyhedron from vertex loops, each counter-clockwise
/// about its outward normal.
pub fn from_polygons<T: Scalar>(loops: Vec<Vec<Vec<T>>>, label: String) -> Result<Polyhedron<T>> {
    if loops.len() < 4 {
        return Err(Error::Geometry(format!(
            "a closed polyhedron needs at least 4 faces, got {}",
            loops.len()
        )));
    }
    let scale = loops
        .iter()
        .flatten()
        .map(|p| norm(p))
        .fold(T::zero(), T::max);
    let tol = T::lit(1e-9) * scale.max(T::one());

    let mut vertices: Vec<Vec<T>> = Vec::new();
    let mut index_of = |p: &Vec<T>| -> usize {
        if let Some(i) = vertices.iter().position(|q| norm(&sub(p, q)) <= tol) {
            return i;
        }
        vertices.push(p.clone());
        vertices.len() - 1
    };
    let indexed: Vec<Vec<usize>> = loops
        .iter()
        .map(|l| l.iter().map(&mut index_of).collect())
        .collect();

    let mut faces = Vec::with_capacity(loops.len());
    for (k, l) in loops.iter().enumerate() {
        if l.len() < 3 || l.iter().any(|p| p.len() != 3) {
            return Err(Error::Geometry(format!("face {k} is not a 3-D polygon")));
        }
        let area_vec = newell(l);
        let twice_area = norm(&area_vec);
        if !(twice_area > tol * tol) {
            return Err(Error::Geometry(format!("face {k} has zero area")));
        }
        let nu = scaled(&area_vec, T::one() / twice_area);
        let offset = dot(&nu, &l[0]);
        if l.iter().any(|p| (dot(&nu, p) - offset).abs() > tol) {
            return Err(Error::Geometry(format!("face {k} is not planar")));
        }
        if !(offset > T::zero()) {
            return Err(Error::Geometry(format!(
                "origin is not strictly inside the plane of face {k}"
            )));
        }
        faces.push(Face {
            unit_normal: nu,
            offset,
            area: twice_area / T::lit(2.0),
            region: Region::Polygon(l.clone()),
        });
    }

    // Directed segment (u, v) -> (face, position in loop).
    let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (f, l) in indexed.iter().enumerate() {
        for k in 0..l.len() {
            let key = (l[k], l[(k + 1) % l.len()]);
            if directed.insert(key, (f, k)).is_some() {
                return Err(Error::Geometry(
                    "inconsistent face orientation or edge shared by more than two faces".into(),
                ));
            }
        }
    }

    let mut edges = Vec::new();
    let mut keys: Vec<_> = directed.keys().copied().filter(|(u, v)| u < v).collect();
    keys.sort_unstable();
    for (u, v) in keys {
        let (fa, _) = directed[&(u, v)];
        let Some(&(fb, _)) = directed.get(&(v, u)) else {
            return Err(Error::Geometry("surface is not closed".into()));
        };
        edges.push(make_edge(&faces, fa, fb, &vertices[u], &vertices[v])?);
    }
    if directed.keys().any(|(u, v)| u > v && !directed.contains_key(&(*v, *u))) {
        return Err(Error::Geometry("surface is not closed".into()));
    }
    let euler = vertices.len() as i64 - edges.len() as i64 + faces.len() as i64;
    if euler != 2 {
        return Err(Error::Geometry(format!("Euler characteristic {euler}, expected 2")));
    }

    Polyhedron::assemble(3, faces, edges, label)
}

/// Edge between faces `a` and `b`, where `a` traverses it from `p` to `q`.
fn make_edge<T: Scalar>(faces: &[Face<T>], a: usize, b: usize, p: &[T], q: &[T]) -> Result<Edge<T>> {
    let nu_a = &faces[a].unit_normal;
    let nu_b = &faces[b].unit_normal;
    let dir = sub(q, p);
    let conormal_a = normalized(&cross(&dir, nu_a));
    let conormal_b = normalized(&cross(nu_b, &dir));
    let cos = dot(nu_a, nu_b).max(-T::one()).min(T::one());
    let theta = cos.acos();
    if !(theta.sin() > T::lit(1e-12)) {
        return Err(Error::Geometry(format!("faces {a} and {b} are coplanar or folded")));
    }
    let convex = dot(&conormal_a, nu_b) > T::zero();
    let angle = if convex { T::PI() - theta } else { T::PI() + theta };
    Ok(Edge {
        face_a: a,
        face_b: b,
        normal_a: nu_a.clone(),
        normal_b: nu_b.clone(),
        conormal_a,
        conormal_b,
        length: norm(&dir),
        region: Region::Segment([p.to_vec(), q.to_vec()]),
        euclidean_angle: angle,
        convex,
    })
}

/// Convex 3-D polyhedron `{x : a_k · x <= b_k}`.
pub fn from_halfspaces_3d<T: Scalar>(
    normals: &[[T; 3]],
    offsets: &[T],
    label: String,
) -> Result<Polyhedron<T>> {
    if normals.len() != offsets.len() {
        return Err(Error::InvalidParameter(
            "normals and offsets differ in length".into(),
        ));
    }
    let mut planes: Vec<(Vec<T>, T)> = Vec::new();
    for (a, &b) in normals.iter().zip(offsets) {
        let len = norm(a);
        if !(len > T::zero()) {
            return Err(Error::InvalidParameter("zero half-space normal".into()));
        }
        let nu = scaled(a, T::one() / len);
        let d = b / len;
        if !(d > T::zero()) {
            return Err(Error::Geometry("origin is not strictly inside the region".into()));
        }
        let dup = planes
            .iter()
            .any(|(m, e)| norm(&sub(m, &nu)) < T::lit(1e-12) && (*e - d).abs() <= T::lit(1e-12) * d);
        if !dup {
            planes.push((nu, d));
        }
    }
    if planes.len() < 4 {
        return Err(Error::Geometry("fewer than 4 distinct half-spaces".into()));
    }
    let scale = planes.iter().map(|p| p.1).fold(T::zero(), T::max);
    let tol = T::lit(1e-9) * scale;

    let m = planes.len();
    let mut vertices: Vec<Vec<T>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [&planes[i].0[..], &planes[j].0[..], &planes[k].0[..]];
                let Some(x) = solve3(rows, [planes[i].1, planes[j].1, planes[k].1]) else {
                    continue;
                };
                if planes.iter().all(|(nu, d)| dot(nu, &x) <= *d + tol)
                    && !vertices.iter().any(|v| norm(&sub(v, &x)) <= tol)
                {
                    vertices.push(x);
                }
            }
        }
    }
    let too_far = T::lit(1e6) * scale;
    if vertices.len() < 4 || vertices.iter().any(|v| norm(v) > too_far) {
        return Err(Error::Geometry("half-spaces do not bound a region".into()));
    }

    let mut loops = Vec::new();
    for (nu, d) in &planes {
        let on: Vec<&Vec<T>> = vertices
            .iter()
            .filter(|v| (dot(nu, v) - *d).abs() <= tol)
            .collect();
        if on.len() < 3 {
            continue;
        }
        let count = T::from_usize_lossy(on.len());
        let centre: Vec<T> = (0..3)
            .map(|i| on.iter().map(|v| v[i]).sum::<T>() / count)
            .collect();
        let u = normalized(&sub(on[0], &centre));
        let w = cross(nu, &u);
        let mut ordered: Vec<(T, Vec<T>)> = on
            .iter()
            .map(|v| {
                let rel = sub(v, &centre);
                (dot(&rel, &w).atan2(dot(&rel, &u)), (*v).clone())
            })
            .collect();
        ordered.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        loops.push(ordered.into_iter().map(|(_, v)| v).collect());
    }
    from_polygons(loops, label).map_err(|e| match e {
        Error::Geometry(msg) if msg.contains("closed") || msg.contains("at least 4") => {
            Error::Geometry("half-spaces do not bound a region".into())
        }
        other => other,
    })
}
