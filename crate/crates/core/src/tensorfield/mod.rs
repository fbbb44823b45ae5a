//! Asymptotically flat metrics `g = delta + h` on the complement of a ball in `R^n`.
//!
//! A [`MetricField`] wraps a [`MetricSource`] (closed-form coefficient functions)
//! together with the data the rest of the crate needs: declared decay order,
//! inner cutoff radius, the radius beyond which `|h|` is below `epsilon(n)`,
//! and the analytic mass when one is known.

mod catalog;
mod perturbation;
mod schwarzschild;

use std::fmt;
use std::sync::Arc;

pub use catalog::CatalogEntry;
pub(crate) use catalog::parse_field;
pub use perturbation::{PerturbationProfile, PERTURBATION_INNER_RADIUS};
pub use schwarzschild::Schwarzschild;

use crate::error::{Error, Result};
use crate::linalg::{norm, SquareMatrix, Tensor3, Tensor4};
use crate::scalar::Scalar;

/// Smallest inner radius used by fields that are defined everywhere.
pub const DEFAULT_INNER_RADIUS: f64 = 0.1;

/// Relative finite-difference step; the step at `x` is this times `|x|`.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

/// Closed-form metric coefficients in one coordinate chart.
pub trait MetricSource<T: Scalar>: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// `g_ij(x)`.
    fn coeff(&self, x: &[T]) -> SquareMatrix<T>;

    /// `d_k g_ij(x)` as `(k, i, j)`, when available in closed form.
    fn dcoeff(&self, _x: &[T]) -> Option<Tensor3<T>> {
        None
    }

    /// `d_l d_k g_ij(x)` as `(l, k, i, j)`, when available in closed form.
    fn d2coeff(&self, _x: &[T]) -> Option<Tensor4<T>> {
        None
    }

    /// Distance from the origin used for the inner-cutoff test.
    fn radius(&self, x: &[T]) -> T {
        norm(x)
    }
}

/// Declared decay rate of `h`. Flat metrics carry no exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayOrder<T> {
    Finite(T),
    Flat,
}

impl<T: Scalar> DecayOrder<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            DecayOrder::Finite(p) => Some(p),
            DecayOrder::Flat => None,
        }
    }
}

/// Smallness constant `epsilon(n) = 1 / (2 (n - 1))`.
pub fn smallness_epsilon<T: Scalar>(n: usize) -> T {
    T::one() / (T::lit(2.0) * T::from_usize_lossy(n - 1))
}

#[derive(Clone)]
pub struct MetricField<T: Scalar> {
    source: Arc<dyn MetricSource<T>>,
    decay: DecayOrder<T>,
    inner_radius: T,
    smallness_radius: T,
    analytic_mass: Option<T>,
    conformally_flat: bool,
    label: String,
}

impl<T: Scalar> fmt::Debug for MetricField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("decay", &self.decay)
            .field("inner_radius", &self.inner_radius)
            .finish()
    }
}

/// Builder-style constructor arguments for [`MetricField::new`].
#[derive(Debug, Clone)]
pub struct FieldInfo<T> {
    pub decay: DecayOrder<T>,
    pub inner_radius: T,
    pub smallness_radius: T,
    pub analytic_mass: Option<T>,
    pub conformally_flat: bool,
    pub label: String,
}

impl<T: Scalar> MetricField<T> {
    pub fn new(source: Arc<dyn MetricSource<T>>, info: FieldInfo<T>) -> Self {
        Self {
            source,
            decay: info.decay,
            inner_radius: info.inner_radius,
            smallness_radius: info.smallness_radius,
            analytic_mass: info.analytic_mass,
            conformally_flat: info.conformally_flat,
            label: info.label,
        }
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn decay_order(&self) -> DecayOrder<T> {
        self.decay
    }

    pub fn inner_radius(&self) -> T {
        self.inner_radius
    }

    /// Radius beyond which `|h|_ḡ < epsilon(n)` holds.
    pub fn smallness_radius(&self) -> T {
        self.smallness_radius
    }

    pub fn analytic_mass(&self) -> Option<T> {
        self.analytic_mass
    }

    pub fn is_conformally_flat(&self) -> bool {
        self.conformally_flat
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &Arc<dyn MetricSource<T>> {
        &self.source
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        let probe = vec![T::lit(1e3); self.dim()];
        self.source.dcoeff(&probe).is_some() && self.source.d2coeff(&probe).is_some()
    }

    pub fn radius(&self, x: &[T]) -> T {
        self.source.radius(x)
    }

    pub fn check_point(&self, x: &[T]) -> Result<()> {
        let r = self.source.radius(x);
        if r > self.inner_radius {
            Ok(())
        } else {
            Err(Error::InsideCutoff {
                radius: r.as_f64(),
                cutoff: self.inner_radius.as_f64(),
            })
        }
    }

    pub fn coeff(&self, x: &[T]) -> Result<SquareMatrix<T>> {
        self.check_point(x)?;
        Ok(self.source.coeff(x))
    }

    /// The perturbation `h = g - δ`.
    pub fn perturbation(&self, x: &[T]) -> Result<SquareMatrix<T>> {
        Ok(self.coeff(x)?.sub(&SquareMatrix::identity(self.dim())))
    }

    /// `|h|_ḡ`, the Frobenius norm of `h`.
    pub fn perturbation_norm(&self, x: &[T]) -> Result<T> {
        Ok(self.perturbation(x)?.frobenius_norm())
    }

    pub fn inverse(&self, x: &[T]) -> Result<SquareMatrix<T>> {
        self.coeff(x)?.inverse()
    }

    pub fn dcoeff(&self, x: &[T]) -> Result<Tensor3<T>> {
        self.check_point(x)?;
        match self.source.dcoeff(x) {
            Some(d) => Ok(d),
            None => Ok(self.fd_dcoeff_unchecked(x)),
        }
    }

    pub fn d2coeff(&self, x: &[T]) -> Result<Tensor4<T>> {
        self.check_point(x)?;
        match self.source.d2coeff(x) {
            Some(d) => Ok(d),
            None => Ok(self.fd_d2coeff_unchecked(x)),
        }
    }

    fn fd_step(&self, x: &[T]) -> T {
        let rel = T::lit(FD_RELATIVE_STEP).max(T::epsilon().cbrt());
        rel * self.source.radius(x).max(T::one())
    }

    /// Central differences of `coeff`, step `|x| * 1e-4`.
    pub fn fd_dcoeff(&self, x: &[T]) -> Result<Tensor3<T>> {
        self.check_point(x)?;
        Ok(self.fd_dcoeff_unchecked(x))
    }

    /// Central differences of `dcoeff` (itself analytic or finite-difference).
    pub fn fd_d2coeff(&self, x: &[T]) -> Result<Tensor4<T>> {
        self.check_point(x)?;
        Ok(self.fd_d2coeff_unchecked(x))
    }

    fn fd_dcoeff_unchecked(&self, x: &[T]) -> Tensor3<T> {
        let n = self.dim();
        let step = self.fd_step(x);
        let mut out = Tensor3::zeros(n);
        let mut xp = x.to_vec();
        for k in 0..n {
            xp[k] = x[k] + step;
            let gp = self.source.coeff(&xp);
            xp[k] = x[k] - step;
            let gm = self.source.coeff(&xp);
            xp[k] = x[k];
            for i in 0..n {
                for j in 0..n {
                    out[(k, i, j)] = (gp[(i, j)] - gm[(i, j)]) / (step + step);
                }
            }
        }
        out
    }

    fn fd_d2coeff_unchecked(&self, x: &[T]) -> Tensor4<T> {
        let n = self.dim();
        let step = self.fd_step(x);
        let first = |y: &[T]| match self.source.dcoeff(y) {
            Some(d) => d,
            None => self.fd_dcoeff_unchecked(y),
        };
        let mut out = Tensor4::zeros(n);
        let mut xp = x.to_vec();
        for l in 0..n {
            xp[l] = x[l] + step;
            let dp = first(&xp);
            xp[l] = x[l] - step;
            let dm = first(&xp);
            xp[l] = x[l];
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        out[(l, k, i, j)] = (dp[(k, i, j)] - dm[(k, i, j)]) / (step + step);
                    }
                }
            }
        }
        out
    }

    /// Christoffel symbols of the first kind, `Γ_{l,ij}` stored as `(l, i, j)`.
    pub fn christoffel_first_kind(&self, x: &[T]) -> Result<Tensor3<T>> {
        let d = self.dcoeff(x)?;
        Ok(first_kind_from_derivative(&d))
    }

    /// `Γ^k_ij = ½ g^{kl} (∂_i g_lj + ∂_j g_il − ∂_l g_ij)` stored as `(k, i, j)`.
    pub fn christoffel(&self, x: &[T]) -> Result<Tensor3<T>> {
        let ginv = self.inverse(x)?;
        let first = self.christoffel_first_kind(x)?;
        let n = self.dim();
        let mut out = Tensor3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v: T = (0..n).map(|l| ginv[(k, l)] * first[(l, i, j)]).sum();
                    out[(k, i, j)] = v;
                    out[(k, j, i)] = v;
                }
            }
        }
        Ok(out)
    }

    /// Compares closed-form derivatives against central differences at `x`.
    pub fn derivative_consistency(&self, x: &[T]) -> Result<DerivativeCheck<T>> {
        let d1 = self.dcoeff(x)?;
        let fd1 = self.fd_dcoeff(x)?;
        let d2 = self.d2coeff(x)?;
        let fd2 = self.fd_d2coeff(x)?;
        let rel = |a: &[T], b: &[T], scale: T| {
            let diff = a
                .iter()
                .zip(b)
                .fold(T::zero(), |acc, (&p, &q)| acc.max((p - q).abs()));
            if scale > T::zero() {
                diff / scale
            } else {
                diff
            }
        };
        Ok(DerivativeCheck {
            first: rel(d1.as_slice(), fd1.as_slice(), d1.max_abs()),
            second: rel(d2.as_slice(), fd2.as_slice(), d2.max_abs()),
        })
    }

    /// Fault-injection hook: the returned field reports `factor * ∂g` as its first
    /// derivative while keeping `g` and `∂∂g` unchanged.
    pub fn with_scaled_derivative(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.source = Arc::new(ScaledDerivative {
            inner: Arc::clone(&self.source),
            factor,
        });
        out.label = format!("{}+corrupt({})", self.label, factor);
        out
    }
}

/// Relative max-norm discrepancy between analytic and finite-difference derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck<T> {
    pub first: T,
    pub second: T,
}

pub(crate) fn first_kind_from_derivative<T: Scalar>(d: &Tensor3<T>) -> Tensor3<T> {
    let n = d.dim();
    let half = T::lit(0.5);
    let mut out = Tensor3::zeros(n);
    for l in 0..n {
        for i in 0..n {
            for j in i..n {
                let v = half * (d[(i, l, j)] + d[(j, i, l)] - d[(l, i, j)]);
                out[(l, i, j)] = v;
                out[(l, j, i)] = v;
            }
        }
    }
    out
}

#[derive(Debug)]
struct ScaledDerivative<T: Scalar> {
    inner: Arc<dyn MetricSource<T>>,
    factor: T,
}

impl<T: Scalar> MetricSource<T> for ScaledDerivative<T> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn coeff(&self, x: &[T]) -> SquareMatrix<T> {
        self.inner.coeff(x)
    }
    fn dcoeff(&self, x: &[T]) -> Option<Tensor3<T>> {
        let mut d = self.inner.dcoeff(x)?;
        for v in d.as_mut_slice() {
            *v *= self.factor;
        }
        Some(d)
    }
    fn d2coeff(&self, x: &[T]) -> Option<Tensor4<T>> {
        self.inner.d2coeff(x)
    }
    fn radius(&self, x: &[T]) -> T {
        self.inner.radius(x)
    }
}

#[derive(Debug, Clone, Copy)]
struct Euclidean {
    n: usize,
}

impl<T: Scalar> MetricSource<T> for Euclidean {
    fn dim(&self) -> usize {
        self.n
    }
    fn coeff(&self, _x: &[T]) -> SquareMatrix<T> {
        SquareMatrix::identity(self.n)
    }
    fn dcoeff(&self, _x: &[T]) -> Option<Tensor3<T>> {
        Some(Tensor3::zeros(self.n))
    }
    fn d2coeff(&self, _x: &[T]) -> Option<Tensor4<T>> {
        Some(Tensor4::zeros(self.n))
    }
}

/// The flat background `δ_ij` in dimension `n >= 3`.
pub fn make_euclidean<T: Scalar>(n: usize) -> Result<MetricField<T>> {
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    Ok(euclidean_unchecked(n))
}

pub(crate) fn euclidean_unchecked<T: Scalar>(n: usize) -> MetricField<T> {
    MetricField::new(
        Arc::new(Euclidean { n }),
        FieldInfo {
            decay: DecayOrder::Flat,
            inner_radius: T::lit(DEFAULT_INNER_RADIUS),
            smallness_radius: T::zero(),
            analytic_mass: Some(T::zero()),
            conformally_flat: true,
            label: format!("euclidean:{n}"),
        },
    )
}

/// Isotropic Schwarzschild `g = u^{4/(n-2)} δ` with `u = 1 + m / (2 |x|^{n-2})`.
pub fn make_schwarzschild_isotropic<T: Scalar>(n: usize, m: T) -> Result<MetricField<T>> {
    schwarzschild::build(n, m)
}

/// Seeded non-conformal perturbation `h_ij = amplitude · s_ij(x/|x|) · |x|^{-p}`.
pub fn make_perturbation<T: Scalar>(
    n: usize,
    p: T,
    amplitude: T,
    seed: u64,
) -> Result<MetricField<T>> {
    perturbation::build(n, p, amplitude, seed)
}
