//! Numerical Laurent coefficients around `delta = 0`.
//!
//! `f` is sampled on the geometric grid `delta0 * ratio^j` and fitted by
//! `sum_k c_k delta^k` over the requested orders (least squares when there are
//! more samples than orders). The fit is done in `t = delta / delta0` to keep
//! the Vandermonde matrix well scaled.

use std::ops::RangeInclusive;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative residual above which a fit is rejected.
const FIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaurentConfig {
    pub delta0: f64,
    pub ratio: f64,
    pub n_points: usize,
}

impl Default for LaurentConfig {
    fn default() -> Self {
        Self {
            delta0: 1e-3,
            ratio: 2.0,
            n_points: 6,
        }
    }
}

impl LaurentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta0 > 0.0 && self.delta0.is_finite()) {
            return Err(Error::invalid("delta0", format!("must be positive, got {}", self.delta0)));
        }
        if !(self.ratio > 1.0 && self.ratio.is_finite()) {
            return Err(Error::invalid("ratio", format!("must exceed 1, got {}", self.ratio)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentCoefficients {
    pub orders: Vec<i32>,
    pub values: Vec<f64>,
    /// Largest absolute misfit at the sample points.
    pub residual: f64,
}

impl LaurentCoefficients {
    pub fn get(&self, order: i32) -> Option<f64> {
        self.orders.iter().position(|&o| o == order).map(|i| self.values[i])
    }
}

pub fn laurent_extract<F>(f: F, orders: RangeInclusive<i32>, config: &LaurentConfig) -> Result<LaurentCoefficients>
where
    F: Fn(f64) -> Result<f64>,
{
    config.validate()?;
    let orders: Vec<i32> = orders.collect();
    if orders.is_empty() {
        return Err(Error::invalid("orders", "empty range"));
    }
    if config.n_points < orders.len() {
        return Err(Error::invalid(
            "npoints-laurent",
            format!("{} samples cannot fix {} coefficients", config.n_points, orders.len()),
        ));
    }
    let ts: Vec<f64> = (0..config.n_points).map(|j| config.ratio.powi(j as i32)).collect();
    let y = DVector::from_iterator(
        ts.len(),
        ts.iter().map(|t| f(config.delta0 * t)).collect::<Result<Vec<_>>>()?,
    );
    let a = DMatrix::from_fn(ts.len(), orders.len(), |i, k| ts[i].powi(orders[k]));
    let c = if ts.len() == orders.len() {
        a.clone().lu().solve(&y)
    } else {
        a.clone().svd(true, true).solve(&y, f64::EPSILON).ok()
    }
    .ok_or(Error::IllConditioned {
        residual: f64::INFINITY,
        leading: 0.0,
    })?;
    let residual = (&a * &c - &y).amax();
    let values: Vec<f64> = orders
        .iter()
        .zip(c.iter())
        .map(|(&o, v)| v / config.delta0.powi(o))
        .collect();

    // the residual is judged against the most singular requested order
    let leading = values[0];
    if leading == 0.0 || !(residual <= FIT_TOL * leading.abs()) {
        return Err(Error::IllConditioned { residual, leading });
    }
    Ok(LaurentCoefficients {
        orders,
        values,
        residual,
    })
}
