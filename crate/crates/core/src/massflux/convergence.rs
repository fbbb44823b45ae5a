use serde::Serialize;

use super::{adm_flux_mass, polyhedral_mass, FluxSurface, MassOptions, MassReport};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, richardson, three_point_order};
use crate::polytope::Polyhedron;
use crate::scalar::Scalar;
use crate::tensorfield::MetricField;

/// Limit and rate of a sequence `f(s) ≈ f_∞ + C s^{-q}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceFit<T> {
    /// Order from the three finest samples, used for the extrapolation.
    pub richardson_order: Option<T>,
    /// Richardson limit from the two finest samples; the finest value when no order is available.
    pub extrapolated: T,
    /// Least-squares log-log order of `|f(s) − f_∞|` over all samples.
    pub fitted_order: Option<T>,
}

pub fn fit_sequence<T: Scalar>(scales: &[T], values: &[T]) -> ConvergenceFit<T> {
    let k = values.len();
    let last = values.last().copied().unwrap_or_else(T::zero);
    if k < 3 {
        return ConvergenceFit {
            richardson_order: None,
            extrapolated: last,
            fitted_order: None,
        };
    }
    let s3 = [scales[k - 3], scales[k - 2], scales[k - 1]];
    let v3 = [values[k - 3], values[k - 2], values[k - 1]];
    let Some(q) = three_point_order(s3, v3) else {
        return ConvergenceFit {
            richardson_order: None,
            extrapolated: last,
            fitted_order: None,
        };
    };
    let limit = richardson((s3[1], v3[1]), (s3[2], v3[2]), q);
    let xs: Vec<f64> = scales.iter().map(|s| s.as_f64()).collect();
    let ys: Vec<f64> = values.iter().map(|v| (*v - limit).abs().as_f64()).collect();
    let fitted = fit_power_law(&xs, &ys);
    ConvergenceFit {
        richardson_order: Some(q),
        extrapolated: limit,
        fitted_order: fitted.is_finite().then(|| T::lit(fitted)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow<T> {
    pub scale: T,
    pub polyhedral: MassReport<T>,
    pub flux: MassReport<T>,
}

/// Polyhedral and boundary-flux masses over a scaled family `P_(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable<T> {
    pub field: String,
    pub geometry: String,
    pub rows: Vec<ConvergenceRow<T>>,
    pub polyhedral_fit: ConvergenceFit<T>,
    pub flux_fit: ConvergenceFit<T>,
}

impl<T: Scalar> ConvergenceTable<T> {
    /// `|polyhedral − flux|` on the same boundary, per scale.
    pub fn method_gaps(&self) -> Vec<T> {
        self.rows
            .iter()
            .map(|r| (r.polyhedral.mass - r.flux.mass).abs())
            .collect()
    }
}

pub fn convergence_study<T: Scalar>(
    field: &MetricField<T>,
    base: &Polyhedron<T>,
    scales: &[T],
    options: &MassOptions,
) -> Result<ConvergenceTable<T>> {
    if scales.is_empty() {
        return Err(Error::InvalidParameter("no scales given".into()));
    }
    if scales.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("scales must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(scales.len());
    for &s in scales {
        let p = base.scale(s)?;
        rows.push(ConvergenceRow {
            scale: s,
            polyhedral: polyhedral_mass(field, &p, options)?,
            flux: adm_flux_mass(field, FluxSurface::Polyhedron(&p), options)?,
        });
    }
    let poly: Vec<T> = rows.iter().map(|r| r.polyhedral.mass).collect();
    let flux: Vec<T> = rows.iter().map(|r| r.flux.mass).collect();
    Ok(ConvergenceTable {
        field: field.label().to_string(),
        geometry: base.label().to_string(),
        polyhedral_fit: fit_sequence(scales, &poly),
        flux_fit: fit_sequence(scales, &flux),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::hypercube;
    use crate::tensorfield::make_euclidean;

    #[test]
    fn fit_recovers_model() {
        let scales = [25.0, 50.0, 100.0, 200.0];
        let values: Vec<f64> = scales.iter().map(|s| 1.0 + 3.0 / s).collect();
        let fit = fit_sequence(&scales, &values);
        assert!((fit.extrapolated - 1.0).abs() < 1e-12);
        assert!((fit.fitted_order.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_sequence_has_no_order() {
        let fit = fit_sequence(&[1.0, 2.0, 4.0], &[0.0, 0.0, 0.0]);
        assert_eq!(fit.fitted_order, None);
        assert_eq!(fit.extrapolated, 0.0);
    }

    #[test]
    fn euclidean_study_is_zero() {
        let f = make_euclidean::<f64>(3).unwrap();
        let base = hypercube::<f64>(3, 1.0).unwrap();
        let t = convergence_study(&f, &base, &[5.0, 10.0, 20.0], &MassOptions::with_level(0)).unwrap();
        assert!(t.rows.iter().all(|r| r.polyhedral.mass.abs() < 1e-12 && r.flux.mass.abs() < 1e-12));
        assert!(convergence_study(&f, &base, &[10.0, 5.0], &MassOptions::with_level(0)).is_err());
    }
}
