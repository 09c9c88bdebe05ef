//! Closed-form cost coefficients of the three-site model.
//!
//! `X_j`, `W_j` below are the bare partner coefficients and `d_j`, `s_j`,
//! `d_B'`, `s_B'` the integrated swap amplitudes of [`N3Model`].

use serde::Serialize;

use crate::harvest::DeviceState;
use crate::lattice::VacuumCorrelators;

use super::N3Model;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostCoefficients {
    pub alpha_p: f64,
    pub beta_p: f64,
    pub alpha_q: f64,
    pub beta_q: f64,
    pub gamma_a: f64,
    pub mu_a: f64,
    pub gamma_b: f64,
    pub mu_b: f64,
}

impl CostCoefficients {
    pub const NAMES: [&'static str; 8] = [
        "alpha_p", "beta_p", "alpha_q", "beta_q", "gamma_a", "mu_a", "gamma_b", "mu_b",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.alpha_p,
            self.beta_p,
            self.alpha_q,
            self.beta_q,
            self.gamma_a,
            self.mu_a,
            self.gamma_b,
            self.mu_b,
        ]
    }

    /// Device-independent part of the post-swap energy.
    pub fn kappa(&self, corr: &VacuumCorrelators) -> f64 {
        self.alpha_p * corr.dp(0) + self.beta_p * corr.dp(1) + self.alpha_q * corr.dq(0) + self.beta_q * corr.dq(1)
    }

    /// Post-swap `<H>` for the given device states.
    pub fn assemble(&self, corr: &VacuumCorrelators, dev_a: &DeviceState, dev_b: &DeviceState) -> f64 {
        self.kappa(corr)
            + self.gamma_a * dev_a.p2
            + self.mu_a * dev_a.q2
            + self.gamma_b * dev_b.p2
            + self.mu_b * dev_b.q2
    }
}

fn sum_sq(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `sum_{i != j} a_i b_j`.
fn off_diagonal(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().sum::<f64>() * b.iter().sum::<f64>() - dot(a, b)
}

/// Site-position parts of `q_2 - q_1/delta` and `q_3` after both swaps.
fn position_rows(m: &N3Model) -> ([f64; 3], [f64; 3]) {
    let w = m.bare_w_b();
    let (d, dl) = (m.d, m.delta);
    let unit = |i: usize, k: usize| if i == k { 1.0 } else { 0.0 };
    let v5 = std::array::from_fn(|k| unit(1, k) + w[1] * d[k] - (unit(0, k) + w[0] * d[k]) / dl);
    let v6 = std::array::from_fn(|k| unit(2, k) + w[2] * d[k]);
    (v5, v6)
}

/// The coefficients as printed, including the `alpha_q` expression that does
/// not match its own derivation. Kept for the discrepancy report.
pub fn printed_coefficients(m: &N3Model) -> CostCoefficients {
    let mut c = cost_coefficients(m);
    c.alpha_q = printed_alpha_q(m);
    c
}

/// Closed-form coefficients. `alpha_q` is the direct expansion of the
/// position-dependent terms of the transformed Hamiltonian.
pub fn cost_coefficients(m: &N3Model) -> CostCoefficients {
    let (e, dl) = (m.eta, m.delta);
    let dl2 = dl * dl;
    let x = m.bare_x_b();
    let w = m.bare_w_b();
    let (x2, x3) = (x[1], x[2]);
    let (w1, w2, w3) = (w[0], w[1], w[2]);
    let [s1, s2, s3] = m.s;
    let ss = sum_sq(&m.s);

    let alpha_p = 1.0 / (2.0 * dl2)
        * (x2 * x2 * (dl2 + 1.0) * ss
            + 2.0 * x2 * s2 * (dl2 + 1.0)
            + dl2 * (x3 * (x3 * ss + 2.0 * s3) + 2.0)
            + 1.0);
    let beta_p = 1.0 / dl2
        * (x2 * x2 * (dl2 + 1.0) * (s1 * (s2 + s3) + s2 * s3)
            + x2 * (dl2 + 1.0) * (s1 + s3)
            + x3 * dl2 * (x3 * s3 * (s1 + s2) + x3 * s1 * s2 + s1 + s2));

    let (v5, v6) = position_rows(m);
    let alpha_q = (0.5 + e) * (sum_sq(&v5) + sum_sq(&v6)) - e * dot(&v5, &v6);

    let beta_q = printed_beta_q(m);

    let c2 = m.c * m.c;
    let gamma_a = c2 / 2.0;
    let mu_a = 1.0 / (2.0 * c2 * dl2) * (dl2 + 2.0 * e * ((dl - 1.0) * dl + 1.0) + 1.0);
    let gamma_b = m.s_b * m.s_b / (2.0 * dl2) * (dl2 * (x2 * x2 + x3 * x3) + x2 * x2);
    let mu_b = m.d_b * m.d_b / (2.0 * dl2)
        * (w1 * w1 * (2.0 * e + 1.0) - 2.0 * w1 * dl * (2.0 * w2 * e + w2 - w3 * e)
            + 2.0 * dl2 * e * (w2 * w2 - w2 * w3 + w3 * w3)
            + dl2 * (w2 * w2 + w3 * w3));

    CostCoefficients {
        alpha_p,
        beta_p,
        alpha_q,
        beta_q,
        gamma_a,
        mu_a,
        gamma_b,
        mu_b,
    }
}

/// `beta_q` by direct expansion, the same way `alpha_q` is computed. Used to
/// cross-check the printed form in tests.
pub fn expanded_beta_q(m: &N3Model) -> f64 {
    let e = m.eta;
    let (v5, v6) = position_rows(m);
    (0.5 + e) * (off_diagonal(&v5, &v5) + off_diagonal(&v6, &v6)) - e * off_diagonal(&v5, &v6)
}

fn printed_beta_q(m: &N3Model) -> f64 {
    let (e, dl) = (m.eta, m.delta);
    let w = m.bare_w_b();
    let (w1, w2, w3) = (w[0], w[1], w[2]);
    let [d1, d2, d3] = m.d;
    let pair = d1 * (d2 + d3) + d2 * d3;
    1.0 / (dl * dl)
        * (w1 * w1 * (2.0 * e + 1.0) * pair - w1 * d1 * (e + 1.0) * dl
            - 2.0 * w1 * w2 * d2 * (2.0 * e + 1.0) * dl * (d1 + d3)
            + w1 * d2 * e * (dl * (2.0 * w3 * (d1 + d3) + 1.0) + 2.0)
            + w1 * d2
            - 2.0 * w1 * d3 * e * (2.0 * w2 * d1 * dl - w3 * d1 * dl + dl - 1.0)
            - 2.0 * w1 * d3 * w2 * d1 * dl
            - w1 * d3 * (dl - 1.0)
            + dl * w2 * w2 * (2.0 * e + 1.0) * dl * pair
            - e * w2 * dl * dl * d1 * (2.0 * w3 * (d2 + d3) - 1.0)
            - e * w2 * dl * dl * (2.0 * w3 * d2 * d3 + d2 - 2.0 * d3)
            - 2.0 * e * w2 * dl * (d2 + d3)
            + d1 * w2 * dl * dl
            - w2 * dl * d2
            + w2 * dl * d3 * (dl - 1.0)
            + w3 * w3 * dl * (2.0 * e + 1.0) * dl * (d3 * (d1 + d2) + d1 * d2)
            + w3 * dl * e * (dl * (d1 + 2.0 * d2 - d3) + d2 + d3)
            + w3 * dl * dl * (d1 + d2)
            - e * dl * (dl + 1.0)
            - dl)
}

fn printed_alpha_q(m: &N3Model) -> f64 {
    let (e, dl) = (m.eta, m.delta);
    let w = m.bare_w_b();
    let (w1, w2, w3) = (w[0], w[1], w[2]);
    let [d1, d2, d3] = m.d;
    let dd = d1 * d1 + d2 * d2 + d3 * d3;
    1.0 / (2.0 * dl * dl)
        * (w1 * w1 * (2.0 * e + 1.0) * dd + 2.0 * w1 * d1 * (2.0 * e + 1.0)
            - 2.0 * w1 * dl * (w2 * dd + d2)
            + 2.0 * w1 * e * d1 * d1 * dl * (w3 - 2.0 * w2)
            + 2.0 * w1 * e * dl * d2 * d2 * (w3 - 2.0 * w2)
            + 2.0 * w1 * e * dl * d3 * d3 * (w3 - 2.0 * w2)
            + 2.0 * w1 * e * dl * (-2.0 * d2 + d3)
            + (2.0 * e + 1.0)
            - d2 * dl * w2
            + dl * w2 * w2 * (2.0 * e + 1.0) * dl * dd
            - 2.0 * dl
            + d1 * dl * w2 * dl
            + dl * w2 * e * (dl * (w3 * dd - 2.0 * d2 + d3) + 2.0 * d1)
            + dl * dl * w3 * w3 * (2.0 * e + 1.0) * dd
            + 2.0 * dl * w3 * d1 * e
            + 2.0 * w3 * dl * dl * (-d2 * e + 2.0 * d3 * e + d3)
            + 4.0 * e * dl * dl
            + 2.0 * dl * dl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy_cost::build_n3;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn unit_parameters() {
        let m = build_n3(1.0, 1.0).unwrap();
        let c = cost_coefficients(&m);
        assert!(close(c.gamma_a, 1.0, 1e-14));
        assert!(close(c.mu_a, 1.0, 1e-14));
        assert!(close(c.gamma_b, 1.285714285714, 1e-9));
        assert!(close(c.mu_b, 1.285714285714, 1e-9));
        assert!(close(c.alpha_p, 0.561224489796, 1e-9));
        assert!(close(c.beta_p, 0.448979591837, 1e-9));
        assert!(close(c.alpha_q, 1.234693877551, 1e-9));
        assert!(close(c.beta_q, -0.224489795918, 1e-9));
        assert!(close(c.kappa(&m.corr), 0.785714285714, 1e-9));
    }

    #[test]
    fn printed_beta_q_equals_expansion() {
        for (eta, delta) in [(0.1, 0.01), (1.0, 0.1), (10.0, 1.0), (3.0, 1e-4)] {
            let m = build_n3(eta, delta).unwrap();
            let (a, b) = (printed_beta_q(&m), expanded_beta_q(&m));
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{eta} {delta}: {a} vs {b}");
        }
    }

    #[test]
    fn printed_alpha_q_differs() {
        let m = build_n3(1.0, 0.01).unwrap();
        let printed = printed_coefficients(&m).alpha_q;
        let adopted = cost_coefficients(&m).alpha_q;
        assert!((printed - adopted).abs() > 1.0);
    }
}
