//! Periodic chain of `N` coupled oscillators: the lattice-regularized free
//! scalar field in units where the mass sets the frequency scale.
//!
//! `H = 1/2 sum p_n^2 + (1/2 + eta) sum q_n^2 - eta sum q_{n+1} q_n`, with
//! `q_{N+1} = q_1` and `eta = (m eps)^-2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, QuadraticHamiltonian};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeSpec {
    n_sites: usize,
    eta: f64,
}

impl LatticeSpec {
    pub fn new(n_sites: usize, eta: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid("n", format!("need at least 2 sites, got {n_sites}")));
        }
        if !(eta >= 0.0) || !eta.is_finite() {
            return Err(Error::invalid("eta", format!("must be finite and >= 0, got {eta}")));
        }
        Ok(Self { n_sites, eta })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// `omega_k = sqrt(1 + 2 eta (1 - cos(2 pi k / N)))`.
pub fn dispersion(k: usize, spec: &LatticeSpec) -> f64 {
    assert!(k < spec.n_sites, "momentum index {k} out of range");
    let phase = 2.0 * PI * k as f64 / spec.n_sites as f64;
    (1.0 + 2.0 * spec.eta * (1.0 - phase.cos())).sqrt()
}

/// `sum_k omega_k / 2`: vacuum expectation of the unordered Hamiltonian.
pub fn zero_point_energy(spec: &LatticeSpec) -> f64 {
    (0..spec.n_sites).map(|k| 0.5 * dispersion(k, spec)).sum()
}

/// Vacuum two-point functions `<q_n q_n'> = dq(n - n')` and
/// `<p_n p_n'> = dp(n - n')`.
#[derive(Debug, Clone, PartialEq)]
pub struct VacuumCorrelators {
    dq: Vec<f64>,
    dp: Vec<f64>,
}

impl VacuumCorrelators {
    pub fn n_sites(&self) -> usize {
        self.dq.len()
    }

    /// `Delta_q(d)` for any integer separation; `d` is reduced mod `N`.
    pub fn dq(&self, d: i64) -> f64 {
        self.dq[self.wrap(d)]
    }

    pub fn dp(&self, d: i64) -> f64 {
        self.dp[self.wrap(d)]
    }

    pub fn dq_values(&self) -> &[f64] {
        &self.dq
    }

    pub fn dp_values(&self) -> &[f64] {
        &self.dp
    }

    fn wrap(&self, d: i64) -> usize {
        d.rem_euclid(self.dq.len() as i64) as usize
    }

    /// Circulant `N x N` matrix `Delta_q(n - n')`.
    pub fn q_matrix(&self) -> DMatrix<f64> {
        let n = self.n_sites();
        DMatrix::from_fn(n, n, |i, j| self.dq(i as i64 - j as i64))
    }

    pub fn p_matrix(&self) -> DMatrix<f64> {
        let n = self.n_sites();
        DMatrix::from_fn(n, n, |i, j| self.dp(i as i64 - j as i64))
    }

    /// `sum_n' Delta_q(n - n') v(n')`.
    pub fn convolve_q(&self, v: &[f64]) -> Vec<f64> {
        self.convolve(&self.dq, v)
    }

    pub fn convolve_p(&self, v: &[f64]) -> Vec<f64> {
        self.convolve(&self.dp, v)
    }

    fn convolve(&self, kernel: &[f64], v: &[f64]) -> Vec<f64> {
        let n = kernel.len();
        assert_eq!(v.len(), n, "window length must match the lattice");
        (0..n)
            .map(|i| (0..n).map(|j| kernel[(i + n - j) % n] * v[j]).sum())
            .collect()
    }

    /// Symmetrized vacuum moment `<(u.xi)(v.xi)>` of two linear
    /// combinations over the `2N` lattice phase-space coordinates.
    /// Symmetrized `<q_n p_n'>` vanish in the vacuum.
    pub fn moment(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let n = self.n_sites();
        assert!(u.len() == 2 * n && v.len() == 2 * n);
        let (uq, up) = (u.rows(0, n), u.rows(n, n));
        let (vq, vp) = (v.rows(0, n), v.rows(n, n));
        let cq = self.convolve_q(vq.as_slice());
        let cp = self.convolve_p(vp.as_slice());
        uq.iter().zip(&cq).map(|(a, b)| a * b).sum::<f64>()
            + up.iter().zip(&cp).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Direct `O(N^2)` mode sums.
pub fn correlators(spec: &LatticeSpec) -> VacuumCorrelators {
    let n = spec.n_sites;
    let omegas: Vec<f64> = (0..n).map(|k| dispersion(k, spec)).collect();
    let mut dq = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for d in 0..n {
        for (k, w) in omegas.iter().enumerate() {
            // k d mod N keeps the cosine argument small
            let c = (2.0 * PI * ((k * d) % n) as f64 / n as f64).cos();
            dq[d] += c / (2.0 * w);
            dp[d] += w * c / 2.0;
        }
        dq[d] /= n as f64;
        dp[d] /= n as f64;
    }
    // exact evenness d <-> N - d
    for d in 1..n {
        let e = n - d;
        if e > d {
            let (a, b) = (0.5 * (dq[d] + dq[e]), 0.5 * (dp[d] + dp[e]));
            dq[d] = a;
            dq[e] = a;
            dp[d] = b;
            dp[e] = b;
        }
    }
    VacuumCorrelators { dq, dp }
}

pub fn vacuum_covariance(spec: &LatticeSpec) -> CovarianceMatrix {
    let corr = correlators(spec);
    let n = spec.n_sites;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&corr.q_matrix());
    m.view_mut((n, n), (n, n)).copy_from(&corr.p_matrix());
    CovarianceMatrix::from_rounded(m)
}

pub fn lattice_hamiltonian(spec: &LatticeSpec) -> QuadraticHamiltonian {
    let n = spec.n_sites;
    let eta = spec.eta;
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        h[(i, i)] = 1.0 + 2.0 * eta;
        h[(n + i, n + i)] = 1.0;
        let j = (i + 1) % n;
        h[(i, j)] -= eta;
        h[(j, i)] -= eta;
    }
    QuadraticHamiltonian::new(h).expect("lattice Hamiltonian is symmetric by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{quadratic_expectation, williamson_eigenvalues};

    fn spec(n: usize, eta: f64) -> LatticeSpec {
        LatticeSpec::new(n, eta).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(LatticeSpec::new(1, 1.0).is_err());
        assert!(LatticeSpec::new(3, -0.1).is_err());
        assert!(LatticeSpec::new(3, f64::NAN).is_err());
        assert!(LatticeSpec::new(3, 0.0).is_ok());
    }

    #[test]
    fn dispersion_examples() {
        for (n, eta) in [(3, 1.0), (7, 0.3), (16, 10.0)] {
            assert_eq!(dispersion(0, &spec(n, eta)), 1.0);
        }
        for k in 0..5 {
            assert_eq!(dispersion(k, &spec(5, 0.0)), 1.0);
        }
        assert!((dispersion(1, &spec(3, 1.0)) - 2.0).abs() < 1e-15);
        assert!((dispersion(2, &spec(3, 1.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn decoupled_correlators() {
        let c = correlators(&spec(6, 0.0));
        assert!((c.dq(0) - 0.5).abs() < 1e-15);
        assert!((c.dp(0) - 0.5).abs() < 1e-15);
        for d in 1..6 {
            assert!(c.dq(d).abs() < 1e-15);
            assert!(c.dp(d).abs() < 1e-15);
        }
    }

    #[test]
    fn three_site_correlators() {
        let c = correlators(&spec(3, 1.0));
        assert!((c.dq(0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.dp(0) - 5.0 / 6.0).abs() < 1e-15);
        assert!((c.dq(1) - 1.0 / 12.0).abs() < 1e-15);
        assert!((c.dp(1) + 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(c.dq(1), c.dq(2));
        assert_eq!(c.dp(1), c.dp(2));
        // negative and wrapped separations
        assert_eq!(c.dq(-1), c.dq(2));
        assert_eq!(c.dp(4), c.dp(1));
    }

    #[test]
    fn vacuum_covariance_is_pure() {
        let vac = vacuum_covariance(&spec(4, 0.0));
        assert!((vac.matrix() - DMatrix::identity(8, 8) * 0.5).amax() < 1e-15);

        for nu in williamson_eigenvalues(&vacuum_covariance(&spec(3, 1.0))).unwrap() {
            assert!((nu - 0.5).abs() < 1e-10);
        }
        let nus = williamson_eigenvalues(&vacuum_covariance(&spec(32, 10.0))).unwrap();
        assert_eq!(nus.len(), 32);
        assert!(nus[0] >= 0.5 - 1e-9);
        assert!(nus[31] <= 0.5 + 1e-9);
    }

    #[test]
    fn hamiltonian_blocks() {
        let h = lattice_hamiltonian(&spec(5, 0.0));
        assert_eq!(h.matrix(), &DMatrix::identity(10, 10));

        let h = lattice_hamiltonian(&spec(3, 1.0));
        let q = h.matrix().view((0, 0), (3, 3)).into_owned();
        let expected = DMatrix::from_row_slice(3, 3, &[3.0, -1.0, -1.0, -1.0, 3.0, -1.0, -1.0, -1.0, 3.0]);
        assert_eq!(q, expected);
        assert_eq!(h.matrix().view((3, 3), (3, 3)).into_owned(), DMatrix::identity(3, 3));
        assert_eq!(h.matrix().view((0, 3), (3, 3)).amax(), 0.0);
    }

    #[test]
    fn vacuum_energy_is_zero_point_sum() {
        let s = spec(3, 1.0);
        let e = quadratic_expectation(&lattice_hamiltonian(&s), &vacuum_covariance(&s)).unwrap();
        assert!((e - 2.5).abs() < 1e-14);
        for (n, eta) in [(3, 0.4), (8, 1.0), (16, 10.0), (2, 2.0)] {
            let s = spec(n, eta);
            let e = quadratic_expectation(&lattice_hamiltonian(&s), &vacuum_covariance(&s)).unwrap();
            let z = zero_point_energy(&s);
            assert!(((e - z) / z).abs() < 1e-10, "N={n} eta={eta}: {e} vs {z}");
        }
    }

    #[test]
    fn local_fluctuation_bounds() {
        for n in [2, 3, 5, 12] {
            for eta in [0.0, 0.1, 1.0, 7.5] {
                let c = correlators(&spec(n, eta));
                assert!(c.dp(0) >= 0.5 - 1e-15 && c.dq(0) <= 0.5 + 1e-15);
                assert!(c.dq(0) > 0.0 && c.dp(0) > 0.0);
                for d in 0..n as i64 {
                    assert!((c.dq(d) - c.dq(n as i64 - d)).abs() < 1e-12);
                    assert!((c.dp(d) - c.dp(n as i64 - d)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn moment_matches_dense_covariance() {
        let s = spec(5, 0.8);
        let c = correlators(&s);
        let vac = vacuum_covariance(&s);
        let u = DVector::from_fn(10, |i, _| (i as f64 * 0.37).sin());
        let v = DVector::from_fn(10, |i, _| (i as f64 * 0.91).cos());
        assert!((c.moment(&u, &v) - vac.bilinear(&u, &v)).abs() < 1e-14);
    }
}
