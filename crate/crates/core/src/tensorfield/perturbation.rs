use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{smallness_epsilon, DecayOrder, FieldInfo, MetricField, MetricSource};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, SquareMatrix, Tensor3, Tensor4};
use crate::scalar::Scalar;

/// Inner radius of every perturbation field. The amplitude bound is checked here.
pub const PERTURBATION_INNER_RADIUS: f64 = 2.0;

/// Angular profile `s_ij(ω) = A_ij + B_ijk ω_k + C_ijkl ω_k ω_l` on the unit sphere.
///
/// Coefficients for each pair `(i, j)` are drawn in a fixed order from a ChaCha
/// stream keyed by the seed and rescaled so their absolute values sum to one,
/// which bounds `|s_ij| <= 1`.
#[derive(Debug, Clone)]
pub struct PerturbationProfile<T> {
    n: usize,
    // Indexed by the packed upper-triangular pair index.
    constant: Vec<T>,
    linear: Vec<Vec<T>>,
    quadratic: Vec<SquareMatrix<T>>,
}

impl<T: Scalar> PerturbationProfile<T> {
    pub fn from_seed(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut constant = Vec::new();
        let mut linear = Vec::new();
        let mut quadratic = Vec::new();
        for _ in 0..n * (n + 1) / 2 {
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut c = vec![vec![0.0_f64; n]; n];
            for k in 0..n {
                for l in k..n {
                    let v = rng.gen_range(-1.0..1.0);
                    c[k][l] = v;
                    c[l][k] = v;
                }
            }
            let total = a.abs()
                + b.iter().map(|v| v.abs()).sum::<f64>()
                + c.iter().flatten().map(|v| v.abs()).sum::<f64>();
            constant.push(T::lit(a / total));
            linear.push(b.iter().map(|&v| T::lit(v / total)).collect());
            quadratic.push(SquareMatrix::from_fn(n, |k, l| T::lit(c[k][l] / total)));
        }
        Self {
            n,
            constant,
            linear,
            quadratic,
        }
    }

    fn pair(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.n - a * (a + 1) / 2 + b
    }

    pub fn evaluate(&self, i: usize, j: usize, direction: &[T]) -> T {
        let p = self.pair(i, j);
        self.constant[p]
            + dot(&self.linear[p], direction)
            + self.quadratic[p].bilinear(direction, direction)
    }
}

#[derive(Debug, Clone)]
struct Perturbation<T> {
    n: usize,
    decay: T,
    amplitude: T,
    profile: PerturbationProfile<T>,
}

/// Value, gradient and Hessian of `P(x) r^q` for a polynomial `P` of degree <= 2.
struct Jet<T> {
    value: T,
    grad: Vec<T>,
    hess: SquareMatrix<T>,
}

impl<T: Scalar> Perturbation<T> {
    /// Jets of `h_ij` for every packed pair, from `h = amp (A r^-p + (B·x) r^{-p-1} + (x·Cx) r^{-p-2})`.
    fn jets(&self, x: &[T], order: usize) -> Vec<Jet<T>> {
        let n = self.n;
        let r = norm(x);
        let r2 = r * r;
        let two = T::lit(2.0);
        let q0 = -self.decay;
        let q1 = q0 - T::one();
        let q2 = q0 - two;
        let pow = |q: T| r.powf(q);
        let (rq0, rq1, rq2) = (pow(q0), pow(q1), pow(q2));
        let mut out = Vec::with_capacity(n * (n + 1) / 2);
        for p in 0..n * (n + 1) / 2 {
            let a = self.profile.constant[p];
            let b = &self.profile.linear[p];
            let c = &self.profile.quadratic[p];
            let cx = c.mul_vec(x);
            // (P, ∂P, ∂∂P, q, r^q) for the three homogeneous pieces.
            let pieces: [(T, Vec<T>, Option<&SquareMatrix<T>>, T, T); 3] = [
                (a, vec![T::zero(); n], None, q0, rq0),
                (dot(b, x), b.clone(), None, q1, rq1),
                (dot(&cx, x), cx.iter().map(|&v| two * v).collect(), Some(c), q2, rq2),
            ];
            let mut value = T::zero();
            let mut grad = vec![T::zero(); n];
            let mut hess = SquareMatrix::zeros(n);
            for (pv, pg, pc, q, rq) in pieces.iter() {
                value += *pv * *rq;
                if order == 0 {
                    continue;
                }
                let rqm2 = *rq / r2;
                for a_ in 0..n {
                    grad[a_] += pg[a_] * *rq + *q * *pv * x[a_] * rqm2;
                }
                if order == 1 {
                    continue;
                }
                let rqm4 = rqm2 / r2;
                for a_ in 0..n {
                    for b_ in 0..n {
                        let hp = pc.map_or(T::zero(), |m| two * m[(a_, b_)]);
                        let delta = if a_ == b_ { T::one() } else { T::zero() };
                        hess[(a_, b_)] += hp * *rq
                            + *q * (pg[a_] * x[b_] + pg[b_] * x[a_] + *pv * delta) * rqm2
                            + *q * (*q - two) * *pv * x[a_] * x[b_] * rqm4;
                    }
                }
            }
            let amp = self.amplitude;
            out.push(Jet {
                value: amp * value,
                grad: grad.into_iter().map(|v| amp * v).collect(),
                hess: SquareMatrix::from_fn(n, |i, j| amp * hess[(i, j)]),
            });
        }
        out
    }
}

impl<T: Scalar> MetricSource<T> for Perturbation<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn coeff(&self, x: &[T]) -> SquareMatrix<T> {
        let jets = self.jets(x, 0);
        SquareMatrix::from_fn(self.n, |i, j| {
            let delta = if i == j { T::one() } else { T::zero() };
            delta + jets[self.profile.pair(i, j)].value
        })
    }

    fn dcoeff(&self, x: &[T]) -> Option<Tensor3<T>> {
        let n = self.n;
        let jets = self.jets(x, 1);
        let mut out = Tensor3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[(k, i, j)] = jets[self.profile.pair(i, j)].grad[k];
                }
            }
        }
        Some(out)
    }

    fn d2coeff(&self, x: &[T]) -> Option<Tensor4<T>> {
        let n = self.n;
        let jets = self.jets(x, 2);
        let mut out = Tensor4::zeros(n);
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        out[(l, k, i, j)] = jets[self.profile.pair(i, j)].hess[(l, k)];
                    }
                }
            }
        }
        Some(out)
    }
}

pub(super) fn build<T: Scalar>(n: usize, p: T, amplitude: T, seed: u64) -> Result<MetricField<T>> {
    if n < 3 {
        return Err(Error::Dimension { got: n, min: 3 });
    }
    let critical = T::from_usize_lossy(n - 2) / T::lit(2.0);
    if !(p > critical) || !p.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "decay order {p} must exceed (n-2)/2 = {critical}"
        )));
    }
    if !(amplitude >= T::zero()) || !amplitude.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "amplitude must be finite and nonnegative, got {amplitude}"
        )));
    }
    let r0 = T::lit(PERTURBATION_INNER_RADIUS);
    // |h_ij| <= amp r^-p entrywise, so |h|_F <= n amp r^-p.
    let bound = T::from_usize_lossy(n) * amplitude * r0.powf(-p);
    let eps: T = smallness_epsilon(n);
    if !(bound < eps) {
        return Err(Error::Smallness {
            bound: bound.as_f64(),
            epsilon: eps.as_f64(),
        });
    }
    let source = Perturbation {
        n,
        decay: p,
        amplitude,
        profile: PerturbationProfile::from_seed(n, seed),
    };
    Ok(MetricField::new(
        Arc::new(source),
        FieldInfo {
            decay: DecayOrder::Finite(p),
            inner_radius: r0,
            smallness_radius: r0,
            analytic_mass: if amplitude == T::zero() { Some(T::zero()) } else { None },
            conformally_flat: amplitude == T::zero(),
            label: format!("perturb:{n}:{p}:{amplitude}:{seed}"),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorfield::make_perturbation;
    use rand::Rng;

    #[test]
    fn zero_amplitude_is_flat() {
        let f = make_perturbation::<f64>(3, 1.0, 0.0, 9).unwrap();
        let x = [4.0, 5.0, -6.0];
        assert_eq!(f.coeff(&x).unwrap(), SquareMatrix::identity(3));
        assert_eq!(f.dcoeff(&x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn reproducible_for_fixed_seed() {
        let a = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let b = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let c = make_perturbation::<f64>(3, 1.0, 0.1, 8).unwrap();
        let x = [11.0, -3.0, 2.5];
        assert_eq!(a.coeff(&x).unwrap(), b.coeff(&x).unwrap());
        assert_ne!(a.coeff(&x).unwrap(), c.coeff(&x).unwrap());
    }

    #[test]
    fn large_amplitude_rejected() {
        assert!(matches!(
            make_perturbation::<f64>(3, 1.0, 0.5, 7),
            Err(Error::Smallness { .. })
        ));
        assert!(make_perturbation::<f64>(3, 0.4, 0.01, 7).is_err());
    }

    #[test]
    fn positive_definite_on_ten_thousand_samples() {
        let f = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let dir: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let len = norm(&dir);
            if len < 1e-3 {
                continue;
            }
            let r = rng.gen_range(5.0..500.0);
            let x: Vec<f64> = dir.iter().map(|c| c / len * r).collect();
            assert!(f.coeff(&x).unwrap().is_positive_definite());
        }
    }

    #[test]
    fn not_conformally_flat() {
        let f = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let h = f.perturbation(&[20.0, 7.0, -3.0]).unwrap();
        let off = h[(0, 1)].abs() + h[(0, 2)].abs() + h[(1, 2)].abs();
        assert!(off > 1e-6);
        assert!((h[(0, 0)] - h[(1, 1)]).abs() > 1e-8);
    }

    #[test]
    fn derivative_of_gradient_decays_one_order_faster() {
        let f = make_perturbation::<f64>(3, 1.0, 0.1, 7).unwrap();
        let radii = [25.0, 50.0, 100.0, 200.0, 400.0];
        let dir = [0.48, -0.6, 0.64];
        let dh: Vec<f64> = radii
            .iter()
            .map(|&r| {
                let x: Vec<f64> = dir.iter().map(|c| c * r).collect();
                f.dcoeff(&x).unwrap().max_abs()
            })
            .collect();
        assert!((crate::fit::fit_power_law(&radii, &dh) - 2.0).abs() <= 0.1);
    }
}
