//! Leading small-`delta` coefficients as functions of `phi = atan(eta)`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::appendix::{cost_coefficients, CostCoefficients};
use super::laurent::{laurent_extract, LaurentConfig};
use super::build_n3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    KappaM2,
    KappaM1,
    GammaAM1,
    MuAM1,
    GammaBM1,
    MuBM1,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::KappaM2,
        Quantity::KappaM1,
        Quantity::GammaAM1,
        Quantity::MuAM1,
        Quantity::GammaBM1,
        Quantity::MuBM1,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Quantity::KappaM2 => "kappa_m2",
            Quantity::KappaM1 => "kappa_m1",
            Quantity::GammaAM1 => "gamma_a_m1",
            Quantity::MuAM1 => "mu_a_m1",
            Quantity::GammaBM1 => "gamma_b_m1",
            Quantity::MuBM1 => "mu_b_m1",
        }
    }

    pub fn from_column(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|q| q.column() == name)
    }

    fn is_kappa(self) -> bool {
        matches!(self, Quantity::KappaM2 | Quantity::KappaM1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub eta: f64,
    /// One value per requested quantity, in request order.
    pub values: Vec<f64>,
}

/// `phi_i = (i + 1) / (n + 1) * pi/2`, `i = 0..n`.
pub fn phi_grid(n_points: usize) -> Vec<f64> {
    (0..n_points)
        .map(|i| (i + 1) as f64 / (n_points + 1) as f64 * FRAC_PI_2)
        .collect()
}

fn coefficient_fit(
    eta: f64,
    pick: fn(&CostCoefficients, &crate::lattice::VacuumCorrelators) -> f64,
    orders: std::ops::RangeInclusive<i32>,
    config: &LaurentConfig,
) -> Result<super::laurent::LaurentCoefficients> {
    laurent_extract(
        |delta| {
            let m = build_n3(eta, delta)?;
            Ok(pick(&cost_coefficients(&m), &m.corr))
        },
        orders,
        config,
    )
}

/// One row of the sweep at coupling `eta`.
pub fn sweep_row(phi: f64, quantities: &[Quantity], config: &LaurentConfig) -> Result<SweepRow> {
    let eta = phi.tan();
    let kappa = if quantities.iter().any(|q| q.is_kappa()) {
        Some(coefficient_fit(eta, |c, corr| c.kappa(corr), -2..=3, config)?)
    } else {
        None
    };
    let mut values = Vec::with_capacity(quantities.len());
    for q in quantities {
        let v = match q {
            Quantity::KappaM2 => kappa.as_ref().and_then(|k| k.get(-2)),
            Quantity::KappaM1 => kappa.as_ref().and_then(|k| k.get(-1)),
            Quantity::GammaAM1 => coefficient_fit(eta, |c, _| c.gamma_a, -1..=4, config)?.get(-1),
            Quantity::MuAM1 => coefficient_fit(eta, |c, _| c.mu_a, -1..=4, config)?.get(-1),
            Quantity::GammaBM1 => coefficient_fit(eta, |c, _| c.gamma_b, -1..=4, config)?.get(-1),
            Quantity::MuBM1 => coefficient_fit(eta, |c, _| c.mu_b, -1..=4, config)?.get(-1),
        };
        values.push(v.expect("requested order is inside the fitted range"));
    }
    Ok(SweepRow { phi, eta, values })
}

/// Rows for `n_points` values of `phi` on the open interval `(0, pi/2)`,
/// evaluated in parallel.
pub fn phi_sweep(n_points: usize, quantities: &[Quantity], config: &LaurentConfig) -> Result<Vec<SweepRow>> {
    if n_points < 2 {
        return Err(Error::invalid("points", format!("need at least 2, got {n_points}")));
    }
    if quantities.is_empty() {
        return Err(Error::invalid("quantities", "nothing selected"));
    }
    config.validate()?;
    phi_grid(n_points)
        .into_par_iter()
        .map(|phi| sweep_row(phi, quantities, config))
        .collect()
}
