use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{SquareMatrix, Tensor3, Tensor4};
use crate::scalar::Scalar;
use crate::tensorfield::{FieldInfo, MetricField, MetricSource};

/// `g` restricted to the hyperplane `{x_k = t}`, in the coordinates that remain.
#[derive(Debug, Clone)]
pub struct RestrictedField<T: Scalar> {
    parent: MetricField<T>,
    axis: usize,
    t: T,
}

impl<T: Scalar> RestrictedField<T> {
    pub fn parent(&self) -> &MetricField<T> {
        &self.parent
    }

    /// Dropped axis, zero based.
    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn offset(&self) -> T {
        self.t
    }

    /// Point of `R^n` over slice coordinates `y`.
    pub fn embed(&self, y: &[T]) -> Vec<T> {
        let mut x = Vec::with_capacity(y.len() + 1);
        x.extend_from_slice(&y[..self.axis]);
        x.push(self.t);
        x.extend_from_slice(&y[self.axis..]);
        x
    }

    /// Slice coordinates of a point of `R^n`; its `k`-th coordinate is ignored.
    pub fn project(&self, x: &[T]) -> Vec<T> {
        x.iter()
            .enumerate()
            .filter(|&(i, _)| i != self.axis)
            .map(|(_, &v)| v)
            .collect()
    }

    fn lift(&self, a: usize) -> usize {
        if a < self.axis {
            a
        } else {
            a + 1
        }
    }
}

impl<T: Scalar> MetricSource<T> for RestrictedField<T> {
    fn dim(&self) -> usize {
        self.parent.dim() - 1
    }

    fn coeff(&self, y: &[T]) -> SquareMatrix<T> {
        let g = self.parent.source().coeff(&self.embed(y));
        SquareMatrix::from_fn(y.len(), |i, j| g[(self.lift(i), self.lift(j))])
    }

    fn dcoeff(&self, y: &[T]) -> Option<Tensor3<T>> {
        let d = self.parent.source().dcoeff(&self.embed(y))?;
        let m = y.len();
        let mut out = Tensor3::zeros(m);
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    out[(k, i, j)] = d[(self.lift(k), self.lift(i), self.lift(j))];
                }
            }
        }
        Some(out)
    }

    fn d2coeff(&self, y: &[T]) -> Option<Tensor4<T>> {
        let d = self.parent.source().d2coeff(&self.embed(y))?;
        let m = y.len();
        let mut out = Tensor4::zeros(m);
        for l in 0..m {
            for k in 0..m {
                for i in 0..m {
                    for j in 0..m {
                        out[(l, k, i, j)] = d[(self.lift(l), self.lift(k), self.lift(i), self.lift(j))];
                    }
                }
            }
        }
        Some(out)
    }

    fn radius(&self, y: &[T]) -> T {
        self.parent.source().radius(&self.embed(y))
    }
}

/// Induced metric on `{x_k = t}` as a field of dimension `n − 1`. `k` is zero based.
///
/// The cutoff test still measures distance in the full space, so slices
/// through the inner ball are allowed as long as the queried points avoid it.
pub fn restrict<T: Scalar>(field: &MetricField<T>, k: usize, t: T) -> Result<MetricField<T>> {
    let n = field.dim();
    if k >= n {
        return Err(Error::InvalidParameter(format!(
            "slice axis {k} out of range for dimension {n}"
        )));
    }
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("slice offset must be finite, got {t}")));
    }
    let source = RestrictedField {
        parent: field.clone(),
        axis: k,
        t,
    };
    Ok(MetricField::new(
        Arc::new(source),
        FieldInfo {
            decay: field.decay_order(),
            inner_radius: field.inner_radius(),
            smallness_radius: field.smallness_radius(),
            analytic_mass: None,
            conformally_flat: field.is_conformally_flat(),
            label: format!("restrict:{}:{k}:{t}", field.label()),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorfield::{make_euclidean, make_perturbation, make_schwarzschild_isotropic};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_minor_is_flat() {
        let f = restrict(&make_euclidean::<f64>(4).unwrap(), 1, 0.0).unwrap();
        assert_eq!(f.dim(), 3);
        let y = [3.0, -2.0, 5.0];
        assert_eq!(f.coeff(&y).unwrap(), SquareMatrix::identity(3));
        assert_eq!(f.dcoeff(&y).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn schwarzschild_minor_is_conformal() {
        let s = make_schwarzschild_isotropic::<f64>(4, 1.0).unwrap();
        let f = restrict(&s, 3, 0.0).unwrap();
        assert!(f.is_conformally_flat());
        let y = [4.0, -1.0, 2.5];
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let u = 1.0 + 0.5 / r2;
        let g = f.coeff(&y).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { u * u } else { 0.0 };
                assert!((g[(i, j)] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn derivatives_are_tangential_restrictions() {
        let p = make_perturbation::<f64>(4, 2.0, 0.1, 7).unwrap();
        let f = restrict(&p, 2, 7.5).unwrap();
        let y = [30.0, -12.0, 18.0];
        let x = [30.0, -12.0, 7.5, 18.0];
        let d = f.dcoeff(&y).unwrap();
        let full = p.dcoeff(&x).unwrap();
        assert_eq!(d[(2, 0, 1)], full[(3, 0, 1)]);
        assert_eq!(d[(0, 2, 2)], full[(0, 3, 3)]);
        let check = f.derivative_consistency(&y).unwrap();
        assert!(check.first < 1e-6 && check.second < 1e-4, "{check:?}");
    }

    #[test]
    fn minors_are_positive_definite() {
        let p = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let k = rng.gen_range(0..3);
            let t = rng.gen_range(-50.0..50.0);
            let f = restrict(&p, k, t).unwrap();
            let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-50.0..50.0)).collect();
            if f.check_point(&y).is_err() {
                continue;
            }
            assert!(f.coeff(&y).unwrap().is_positive_definite());
        }
    }

    #[test]
    fn axis_out_of_range() {
        let f = make_euclidean::<f64>(3).unwrap();
        assert!(matches!(restrict(&f, 3, 0.0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cutoff_uses_full_radius() {
        let s = make_schwarzschild_isotropic::<f64>(3, 1.0).unwrap();
        let f = restrict(&s, 0, 0.3).unwrap();
        assert!(f.coeff(&[0.1, 0.0]).is_err());
        assert!(restrict(&s, 0, 5.0).unwrap().coeff(&[0.0, 0.0]).is_ok());
    }
}
