use std::sync::Arc;

use super::{smallness_epsilon, DecayOrder, FieldInfo, MetricField, MetricSource, DEFAULT_INNER_RADIUS};
use crate::error::{Error, Result};
use crate::linalg::{norm, SquareMatrix, Tensor3, Tensor4};
use crate::scalar::Scalar;

/// Conformal factor `u = 1 + m / (2 r^{n-2})` raised to `4/(n-2)`.
#[derive(Debug, Clone, Copy)]
pub struct Schwarzschild<T> {
    n: usize,
    mass: T,
}

impl<T: Scalar> Schwarzschild<T> {
    pub fn new(n: usize, mass: T) -> Self {
        Self { n, mass }
    }

    fn exponent(&self) -> T {
        T::lit(4.0) / T::from_usize_lossy(self.n - 2)
    }

    pub fn conformal_factor(&self, x: &[T]) -> T {
        let r = norm(x);
        T::one() + self.mass / (T::lit(2.0) * r.powi(self.n as i32 - 2))
    }

    /// Returns `(u, ∂u, ∂∂u)`.
    fn u_jets(&self, x: &[T]) -> (T, Vec<T>, SquareMatrix<T>) {
        let n = self.n;
        let r = norm(x);
        let rn = r.powi(n as i32);
        let c = self.mass * T::lit(0.5) * (T::lit(2.0) - T::from_usize_lossy(n));
        let u = T::one() + self.mass / (T::lit(2.0) * r.powi(n as i32 - 2));
        let du: Vec<T> = x.iter().map(|&xi| c * xi / rn).collect();
        let nn = T::from_usize_lossy(n);
        let r2 = r * r;
        let ddu = SquareMatrix::from_fn(n, |i, j| {
            let delta = if i == j { T::one() } else { T::zero() };
            c * (delta - nn * x[i] * x[j] / r2) / rn
        });
        (u, du, ddu)
    }
}

impl<T: Scalar> MetricSource<T> for Schwarzschild<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn coeff(&self, x: &[T]) -> SquareMatrix<T> {
        let psi = self.conformal_factor(x).powf(self.exponent());
        let mut g = SquareMatrix::zeros(self.n);
        for i in 0..self.n {
            g[(i, i)] = psi;
        }
        g
    }

    fn dcoeff(&self, x: &[T]) -> Option<Tensor3<T>> {
        let n = self.n;
        let a = self.exponent();
        let (u, du, _) = self.u_jets(x);
        let lead = a * u.powf(a - T::one());
        let mut out = Tensor3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                out[(k, i, i)] = lead * du[k];
            }
        }
        Some(out)
    }

    fn d2coeff(&self, x: &[T]) -> Option<Tensor4<T>> {
        let n = self.n;
        let a = self.exponent();
        let (u, du, ddu) = self.u_jets(x);
        let c1 = a * u.powf(a - T::one());
        let c2 = a * (a - T::one()) * u.powf(a - T::lit(2.0));
        let mut out = Tensor4::zeros(n);
        for l in 0..n {
            for k in 0..n {
                let v = c2 * du[l] * du[k] + c1 * ddu[(l, k)];
                for i in 0..n {
                    out[(l, k, i, i)] = v;
                }
            }
        }
        Some(out)
    }
}

pub(super) fn build<T: Scalar>(n: usize, m: T) -> Result<MetricField<T>> {
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    if !(m >= T::zero()) || !m.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "schwarzschild mass must be finite and nonnegative, got {m}"
        )));
    }
    let source = Schwarzschild::new(n, m);
    let k = T::from_usize_lossy(n - 2);
    let horizon = (m / T::lit(2.0)).powf(T::one() / k);
    // |h| = sqrt(n) (u^a - 1) equals epsilon(n) at this radius.
    let eps: T = smallness_epsilon(n);
    let u_eps = (T::one() + eps / T::from_usize_lossy(n).sqrt()).powf(T::one() / source.exponent());
    let smallness = (m / (T::lit(2.0) * (u_eps - T::one()))).powf(T::one() / k);
    Ok(MetricField::new(
        Arc::new(source),
        FieldInfo {
            decay: DecayOrder::Finite(k),
            inner_radius: horizon.max(T::lit(DEFAULT_INNER_RADIUS)),
            smallness_radius: smallness,
            analytic_mass: Some(m),
            conformally_flat: true,
            label: format!("schwarzschild:{n}:{m}"),
        },
    ))
}
