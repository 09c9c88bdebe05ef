//! Energy cost of the swap protocol for the three-site chain.
//!
//! Mode `A` is `Q_A = C q_1`, `P_A = (p_1 + p_2/delta)/C` and `B` its partner.
//! Swapping both into devices costs
//!
//! ```text
//! dE = kappa + gamma_A' <p_A'^2> + mu_A' <q_A'^2> + gamma_B' <p_B'^2> + mu_B' <q_B'^2> - E_0
//! kappa = alpha_p Dp(0) + beta_p Dp(1) + alpha_q Dq(0) + beta_q Dq(1)
//! ```
//!
//! with `E_0 = sum_k omega_k / 2`. The closed forms in [`appendix`] are
//! checked against [`oracle`], which builds the same quantities from the
//! generic swap maps of [`crate::harvest`].

pub mod appendix;
pub mod laurent;
pub mod oracle;
pub mod sweep;

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;

pub use appendix::{cost_coefficients, printed_coefficients, CostCoefficients};
pub use laurent::{laurent_extract, LaurentCoefficients, LaurentConfig};
pub use oracle::{
    cost_coefficients_oracle, delta_e_swap_oracle, delta_e_swap_oracle_angle, discrepancy_report, Discrepancy,
};
pub use sweep::{phi_sweep, Quantity, SweepRow};

use crate::error::{Error, Result};
use crate::gaussian::SymplecticMap;
use crate::harvest::DeviceState;
use crate::lattice::{correlators, zero_point_energy, LatticeSpec, VacuumCorrelators};
use crate::modes::standard_prefactor;

/// Extended phase-space indices: sites, then `A'`, `B'`.
pub(crate) const QA: usize = 3;
pub(crate) const QB: usize = 4;
pub(crate) const P0: usize = 5;
pub(crate) const PA: usize = 8;
pub(crate) const PB: usize = 9;

/// Three-site model at coupling `eta` and window parameter `delta`.
///
/// Standardized windows (`x_a1`, `w_a`, `x_b`, `w_b`) carry the prefactor
/// `(sqrt(1 + g^2)/2)^(-1/2)`; the swap solution is written in terms of the
/// bare operator coefficients `prefactor * x_b`, `prefactor * w_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct N3Model {
    pub eta: f64,
    pub delta: f64,
    pub spec: LatticeSpec,
    pub corr: VacuumCorrelators,
    pub c: f64,
    pub g: f64,
    pub x_a1: f64,
    pub w_a: [f64; 2],
    pub x_b: [f64; 3],
    pub w_b: [f64; 3],
    pub omega: f64,
    pub d: [f64; 3],
    pub d_b: f64,
    pub s: [f64; 3],
    pub s_b: f64,
}

impl N3Model {
    pub fn prefactor(&self) -> f64 {
        standard_prefactor(self.g)
    }

    /// Operator coefficients of `Q_B` on `q_1..q_3`.
    pub fn bare_x_b(&self) -> [f64; 3] {
        self.x_b.map(|v| v * self.prefactor())
    }

    pub fn bare_w_b(&self) -> [f64; 3] {
        self.w_b.map(|v| v * self.prefactor())
    }

    pub fn zero_point_energy(&self) -> f64 {
        zero_point_energy(&self.spec)
    }
}

pub fn build_n3(eta: f64, delta: f64) -> Result<N3Model> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::invalid("eta", format!("must be positive, got {eta}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid("delta", format!("must be positive, got {delta}")));
    }
    let spec = LatticeSpec::new(3, eta)?;
    let corr = correlators(&spec);
    let dq0 = corr.dq(0);
    let (dp0, dp1) = (corr.dp(0), corr.dp(1));

    let p2 = dp0 * (1.0 + 1.0 / (delta * delta)) + 2.0 * dp1 / delta;
    let radicand = p2 / dq0;
    if !(radicand > 0.0) {
        return Err(Error::DegenerateMode(format!("C^4 = {radicand} is not positive")));
    }
    let c = radicand.powf(0.25);
    let g = (4.0 * dq0 * p2 - 1.0).max(0.0).sqrt();
    if g <= crate::modes::PURE_MODE_G {
        return Err(Error::DegenerateMode(format!("g = {g}: the mode has no partner")));
    }
    let pref = standard_prefactor(g);
    let x_a = [c / pref, 0.0, 0.0];
    let w_a = [1.0 / (c * pref), 1.0 / (delta * c * pref), 0.0];

    let r = (1.0 + g * g).sqrt();
    let dp_w = corr.convolve_p(&w_a);
    let dq_x = corr.convolve_q(&x_a);
    let x_b: [f64; 3] = std::array::from_fn(|j| r / g * x_a[j] - 2.0 / g * dp_w[j]);
    let w_b: [f64; 3] = std::array::from_fn(|j| -r / g * w_a[j] + 2.0 / g * dq_x[j]);

    let bare_x: [f64; 3] = x_b.map(|v| v * pref);
    let bare_w: [f64; 3] = w_b.map(|v| v * pref);
    let omega2: f64 = (0..3).map(|j| bare_x[j] * bare_w[j]).sum();
    if !(omega2 > 0.0) {
        return Err(Error::DegenerateMode(format!("Omega^2 = {omega2} is not positive")));
    }
    let omega = omega2.sqrt();
    let half = FRAC_PI_2 * omega;
    let fac = -(1.0 - half.cos()) / omega2;
    let d_b = half.sin() / omega;

    Ok(N3Model {
        eta,
        delta,
        spec,
        corr,
        c,
        g,
        x_a1: x_a[0],
        w_a: [w_a[0], w_a[1]],
        x_b,
        w_b,
        omega,
        d: bare_x.map(|v| fac * v),
        d_b,
        s: bare_w.map(|v| fac * v),
        s_b: d_b,
    })
}

/// Heisenberg map of the full protocol on `(q_1, q_2, q_3, q_A', q_B', p_1, ...)`
/// assembled from the closed-form solutions of the two swaps at `theta = pi/2`.
pub fn n3_heisenberg_map(model: &N3Model) -> SymplecticMap {
    aa_swap_map(model).compose(&bb_swap_map(model)).expect("both maps are 10 x 10")
}

/// The `A A'` swap alone.
pub fn aa_swap_map(model: &N3Model) -> SymplecticMap {
    let (c, delta) = (model.c, model.delta);
    let mut s = DMatrix::identity(10, 10);
    let mut set_row = |i: usize, entries: &[(usize, f64)]| {
        s.row_mut(i).fill(0.0);
        for &(j, v) in entries {
            s[(i, j)] += v;
        }
    };
    set_row(0, &[(QA, 1.0 / c)]);
    set_row(1, &[(1, 1.0), (0, -1.0 / delta), (QA, 1.0 / (c * delta))]);
    set_row(QA, &[(0, -c)]);
    set_row(P0, &[(P0 + 1, -1.0 / delta), (PA, c)]);
    set_row(PA, &[(P0, -1.0 / c), (P0 + 1, -1.0 / (c * delta))]);
    SymplecticMap::new_unchecked(s)
}

/// The `B B'` swap alone.
pub fn bb_swap_map(model: &N3Model) -> SymplecticMap {
    let (x, w) = (model.bare_x_b(), model.bare_w_b());
    let half = FRAC_PI_2 * model.omega;
    let sinc = half.sin() / model.omega;
    let mut s = DMatrix::identity(10, 10);
    for j in 0..3 {
        s[(j, QB)] += w[j] * model.d_b;
        s[(P0 + j, PB)] += x[j] * model.s_b;
        for k in 0..3 {
            s[(j, k)] += w[j] * model.d[k];
            s[(P0 + j, P0 + k)] += x[j] * model.s[k];
        }
    }
    s[(QB, QB)] = half.cos();
    s[(PB, PB)] = half.cos();
    for k in 0..3 {
        s[(QB, k)] = -sinc * x[k];
        s[(PB, P0 + k)] = -sinc * w[k];
    }
    SymplecticMap::new_unchecked(s)
}

/// Coefficients, device moments and the assembled cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostBreakdown {
    pub coefficients: CostCoefficients,
    pub kappa: f64,
    pub dev_a: DeviceState,
    pub dev_b: DeviceState,
    pub zero_point_energy: f64,
    pub delta_e_swap: f64,
}

pub fn cost_breakdown(model: &N3Model, dev_a: &DeviceState, dev_b: &DeviceState) -> CostBreakdown {
    let coefficients = cost_coefficients(model);
    let kappa = coefficients.kappa(&model.corr);
    let e0 = model.zero_point_energy();
    let delta_e_swap = coefficients.assemble(&model.corr, dev_a, dev_b) - e0;
    CostBreakdown {
        coefficients,
        kappa,
        dev_a: *dev_a,
        dev_b: *dev_b,
        zero_point_energy: e0,
        delta_e_swap,
    }
}

/// `<H>` after the protocol minus the vacuum energy. Both sides use the
/// unordered Hamiltonian, so the ordering constant cancels.
pub fn delta_e_swap(model: &N3Model, dev_a: &DeviceState, dev_b: &DeviceState) -> f64 {
    cost_breakdown(model, dev_a, dev_b).delta_e_swap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harvest::{protocol_map, ExtendedSystem, SwapOrder};
    use crate::modes::{g_factor, standard_form, WindowFunctions};
    use crate::partner::partner_window;

    #[test]
    fn model_at_unit_parameters() {
        let m = build_n3(1.0, 1.0).unwrap();
        assert!((m.c - 2f64.sqrt()).abs() < 1e-14);
        assert!((m.g - 7f64.sqrt() / 3.0).abs() < 1e-12);
        let g = g_factor(&WindowFunctions::two_site_model(3, 1.0).unwrap(), &m.corr).unwrap();
        assert!((m.g - g).abs() < 1e-12);
        assert_eq!(m.s_b, m.d_b);
        assert!((m.omega - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_n3(0.0, 1.0).is_err());
        assert!(build_n3(1.0, -1.0).is_err());
        assert!(build_n3(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn closed_form_maps_match_generic_swaps() {
        for (eta, delta) in [(1.0, 1.0), (0.1, 0.01), (10.0, 0.3)] {
            let m = build_n3(eta, delta).unwrap();
            let corr = &m.corr;
            let mode = standard_form(&WindowFunctions::two_site_model(3, delta).unwrap(), corr).unwrap();
            let pair = partner_window(&mode, corr).unwrap();
            let generic = protocol_map(&pair, &ExtendedSystem::new(m.spec), SwapOrder::AFirst).unwrap();
            let closed = n3_heisenberg_map(&m);
            assert!((closed.matrix() - generic.matrix()).amax() < 1e-10, "eta {eta} delta {delta}");
            assert!(closed.residual() < 1e-10);
            assert!(aa_swap_map(&m).residual() < 1e-10);
            assert!(bb_swap_map(&m).residual() < 1e-10);
        }
    }

    #[test]
    fn aa_swap_rows() {
        let m = build_n3(1.0, 0.5).unwrap();
        let s = aa_swap_map(&m);
        assert!((s.matrix()[(0, QA)] - 1.0 / m.c).abs() < 1e-15);
        assert_eq!(s.matrix().row(P0 + 1).iter().filter(|v| **v != 0.0).count(), 1);
        assert_eq!(s.matrix()[(P0 + 1, P0 + 1)], 1.0);
    }
}
