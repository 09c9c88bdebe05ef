//! Local modes built from window functions.
//!
//! A mode is the canonical pair
//! `q_A = sum_n (x(n) q_n + y(n) p_n)`, `p_A = sum_n (z(n) q_n + w(n) p_n)`
//! with `sum_n (x w - z y) = 1`. Its standard form `(Q_A, P_A)` has vacuum
//! covariance `sqrt(1 + g^2)/2 * I`; standardized windows are stored with the
//! prefactor `(sqrt(1 + g^2)/2)^(1/2)` divided out.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::lattice::{dispersion, LatticeSpec, VacuumCorrelators};

const CANONICAL_TOL: f64 = 1e-10;
const RADICAND_FAIL: f64 = 1e-9;
const ROUNDING: f64 = 1e-14;

/// Below this `g` a mode is treated as pure and has no partner.
pub const PURE_MODE_G: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowFunctions {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

impl WindowFunctions {
    pub fn new(x: Vec<f64>, y: Vec<f64>, z: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let n = x.len();
        for (name, v) in [("y", &y), ("z", &z), ("w", &w)] {
            if v.len() != n {
                return Err(Error::invalid(
                    name,
                    format!("length {} differs from the length of x ({n})", v.len()),
                ));
            }
        }
        if n == 0 {
            return Err(Error::invalid("x", "window functions are empty"));
        }
        Ok(Self { x, y, z, w })
    }

    /// `q_A = sum x q`, `p_A = sum w p`.
    pub fn no_mixing(x: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        let n = x.len();
        Self::new(x, vec![0.0; n], vec![0.0; n], w)
    }

    /// `q_A = q_site`, `p_A = p_site` (0-based site).
    pub fn single_site(n_sites: usize, site: usize) -> Self {
        let mut e = vec![0.0; n_sites];
        e[site] = 1.0;
        Self::no_mixing(e.clone(), e).expect("equal lengths")
    }

    /// `q_A = q_1`, `p_A = p_1 + p_2 / delta`.
    pub fn two_site_model(n_sites: usize, delta: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid("n", "the two-site window needs N >= 2"));
        }
        if delta == 0.0 || !delta.is_finite() {
            return Err(Error::invalid("delta", format!("must be finite and nonzero, got {delta}")));
        }
        let mut x = vec![0.0; n_sites];
        let mut w = vec![0.0; n_sites];
        x[0] = 1.0;
        w[0] = 1.0;
        w[1] = 1.0 / delta;
        Self::no_mixing(x, w)
    }

    pub fn n_sites(&self) -> usize {
        self.x.len()
    }

    pub fn has_mixing(&self) -> bool {
        self.y.iter().chain(&self.z).any(|v| *v != 0.0)
    }

    /// Coefficients of `q_A` over `(q_1..q_N, p_1..p_N)`.
    pub fn q_row(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.n_sites(), self.x.iter().chain(&self.y).copied())
    }

    pub fn p_row(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.n_sites(), self.z.iter().chain(&self.w).copied())
    }

    /// `sum (x w - z y)`, i.e. `[q_A, p_A] / i`.
    pub fn commutator(&self) -> f64 {
        let xw: f64 = self.x.iter().zip(&self.w).map(|(a, b)| a * b).sum();
        let zy: f64 = self.z.iter().zip(&self.y).map(|(a, b)| a * b).sum();
        xw - zy
    }
}

pub fn validate_window(win: &WindowFunctions) -> Result<()> {
    let residual = win.commutator() - 1.0;
    if residual.abs() > CANONICAL_TOL {
        return Err(Error::NotCanonical(residual));
    }
    Ok(())
}

fn check_lengths(win: &WindowFunctions, corr: &VacuumCorrelators) -> Result<()> {
    if win.n_sites() != corr.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: corr.n_sites(),
            found: win.n_sites(),
        });
    }
    Ok(())
}

/// Vacuum covariance of `(q_A, p_A)`.
pub fn mode_covariance(win: &WindowFunctions, corr: &VacuumCorrelators) -> Result<CovarianceMatrix> {
    check_lengths(win, corr)?;
    let (q, p) = (win.q_row(), win.p_row());
    Ok(CovarianceMatrix::single_mode(
        corr.moment(&q, &q),
        corr.moment(&p, &p),
        corr.moment(&q, &p),
    ))
}

fn g_from_radicand(radicand: f64) -> Result<f64> {
    if radicand < -RADICAND_FAIL {
        return Err(Error::UncertaintyViolation(radicand));
    }
    if radicand < 0.0 {
        return Ok(0.0);
    }
    Ok(radicand.sqrt())
}

/// `g = sqrt(4 <q_A^2><p_A^2> - 1)` for windows without q-p mixing.
pub fn g_factor(win: &WindowFunctions, corr: &VacuumCorrelators) -> Result<f64> {
    if win.has_mixing() {
        return Err(Error::invalid(
            "window",
            "g_factor needs y = z = 0; use standard_form for mixed windows",
        ));
    }
    let cov = mode_covariance(win, corr)?;
    g_from_radicand(4.0 * cov.get(0, 0) * cov.get(1, 1) - 1.0)
}

/// Angles of `R(theta) S(sigma) R(theta')` taking `(q_A, p_A)` to standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticParams {
    pub theta: f64,
    pub theta_prime: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StandardMode {
    pub big_x: Vec<f64>,
    pub big_y: Vec<f64>,
    pub big_z: Vec<f64>,
    pub big_w: Vec<f64>,
    pub g: f64,
    pub params: SymplecticParams,
}

/// `(sqrt(1 + g^2) / 2)^(1/2)`.
pub fn standard_prefactor(g: f64) -> f64 {
    (0.5 * (1.0 + g * g).sqrt()).sqrt()
}

impl StandardMode {
    pub fn n_sites(&self) -> usize {
        self.big_x.len()
    }

    pub fn prefactor(&self) -> f64 {
        standard_prefactor(self.g)
    }

    pub fn is_pure(&self) -> bool {
        self.g < PURE_MODE_G
    }

    /// Operator coefficients of `Q_A` (prefactor included).
    pub fn q_row(&self) -> DVector<f64> {
        let c = self.prefactor();
        DVector::from_iterator(2 * self.n_sites(), self.big_x.iter().chain(&self.big_y).map(|v| c * v))
    }

    pub fn p_row(&self) -> DVector<f64> {
        let c = self.prefactor();
        DVector::from_iterator(2 * self.n_sites(), self.big_z.iter().chain(&self.big_w).map(|v| c * v))
    }

    /// The standardized pair as an ordinary window (prefactor included).
    pub fn as_window(&self) -> WindowFunctions {
        let c = self.prefactor();
        let scale = |v: &[f64]| v.iter().map(|a| c * a).collect::<Vec<_>>();
        WindowFunctions {
            x: scale(&self.big_x),
            y: scale(&self.big_y),
            z: scale(&self.big_z),
            w: scale(&self.big_w),
        }
    }
}

fn split(row: &DVector<f64>, n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    (
        row.rows(0, n).iter().map(|v| v * scale).collect(),
        row.rows(n, n).iter().map(|v| v * scale).collect(),
    )
}

/// Rotate by `theta'` to diagonalize the mode covariance, then squeeze to
/// equalize the diagonal. `theta` is fixed to zero and `theta'` lies in
/// `(-pi/4, pi/4]`. Without q-p mixing this is the plain rescaling
/// `Q_A = C q_A`, `P_A = p_A / C`, `C = (<p_A^2>/<q_A^2>)^(1/4)`.
pub fn standard_form(win: &WindowFunctions, corr: &VacuumCorrelators) -> Result<StandardMode> {
    validate_window(win)?;
    let cov = mode_covariance(win, corr)?;
    let (a, b, m) = (cov.get(0, 0), cov.get(1, 1), cov.get(0, 1));

    // cross moments at rounding level count as zero so that a window already
    // in standard form is a fixed point
    let scale = a + b;
    let theta_prime = if m.abs() <= ROUNDING * scale {
        0.0
    } else if (a - b).abs() <= ROUNDING * scale {
        PI / 4.0
    } else {
        0.5 * (2.0 * m / (a - b)).atan()
    };
    let (s, c) = theta_prime.sin_cos();
    let (q0, p0) = (win.q_row(), win.p_row());
    let q1 = &q0 * c + &p0 * s;
    let p1 = &p0 * c - &q0 * s;
    let d1 = corr.moment(&q1, &q1);
    let d2 = corr.moment(&p1, &p1);
    if !(d1 > 0.0 && d2 > 0.0) {
        return Err(Error::UncertaintyViolation(4.0 * d1 * d2 - 1.0));
    }
    let sigma = 0.25 * (d2 / d1).ln();
    let g = g_from_radicand(4.0 * d1 * d2 - 1.0)?;

    let inv = 1.0 / standard_prefactor(g);
    let n = win.n_sites();
    let (big_x, big_y) = split(&(q1 * sigma.exp()), n, inv);
    let (big_z, big_w) = split(&(p1 * (-sigma).exp()), n, inv);
    Ok(StandardMode {
        big_x,
        big_y,
        big_z,
        big_w,
        g,
        params: SymplecticParams {
            theta: 0.0,
            theta_prime,
            sigma,
        },
    })
}

/// Plane-wave coefficients of a standardized mode:
/// `Q_A = c sum_k (Q(k)^* a_k + Q(k) a_k^dag)`, same for `P_A`, where `c` is
/// the standard prefactor.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumCoefficients {
    pub q: Vec<Complex64>,
    pub p: Vec<Complex64>,
}

impl MomentumCoefficients {
    pub fn q_norm(&self) -> f64 {
        self.q.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn p_norm(&self) -> f64 {
        self.p.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `sum_k P(k)^* Q(k)`; equals `-i / sqrt(1 + g^2)`.
    pub fn overlap(&self) -> Complex64 {
        self.p.iter().zip(&self.q).map(|(p, q)| p.conj() * q).sum()
    }
}

pub fn momentum_representation(mode: &StandardMode, spec: &LatticeSpec) -> Result<MomentumCoefficients> {
    let n = spec.n_sites();
    if mode.n_sites() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: mode.n_sites(),
        });
    }
    let inv_pref = 1.0 / mode.prefactor();
    let norm = 1.0 / (n as f64).sqrt();
    let project = |xs: &[f64], ys: &[f64]| -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let omega = dispersion(k, spec);
                let (aq, ap) = (1.0 / (2.0 * omega).sqrt(), (omega / 2.0).sqrt());
                // coefficient of a_k: sum_n u_k(n) (x/sqrt(2w) - i y sqrt(w/2))
                let c: Complex64 = (0..n)
                    .map(|site| {
                        let phase = 2.0 * PI * ((k * site) % n) as f64 / n as f64;
                        let u = Complex64::from_polar(norm, phase);
                        u * Complex64::new(xs[site] * aq, -ys[site] * ap)
                    })
                    .sum();
                c.conj() * inv_pref
            })
            .collect()
    };
    let c = mode.prefactor();
    let unscale = |v: &[f64]| v.iter().map(|a| a * c).collect::<Vec<_>>();
    Ok(MomentumCoefficients {
        q: project(&unscale(&mode.big_x), &unscale(&mode.big_y)),
        p: project(&unscale(&mode.big_z), &unscale(&mode.big_w)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::correlators;

    fn chain(n: usize, eta: f64) -> (LatticeSpec, VacuumCorrelators) {
        let s = LatticeSpec::new(n, eta).unwrap();
        (s, correlators(&s))
    }

    #[test]
    fn window_validation() {
        assert!(validate_window(&WindowFunctions::single_site(3, 0)).is_ok());
        for delta in [1.0, 0.01, -3.0] {
            assert!(validate_window(&WindowFunctions::two_site_model(3, delta).unwrap()).is_ok());
        }
        let bad = WindowFunctions::no_mixing(vec![1.0, 0.0, 0.0], vec![2.0, 0.0, 0.0]).unwrap();
        match validate_window(&bad) {
            Err(Error::NotCanonical(r)) => assert_eq!(r, 1.0),
            other => panic!("expected NotCanonical, got {other:?}"),
        }
        assert!(WindowFunctions::new(vec![1.0], vec![0.0, 0.0], vec![0.0], vec![1.0]).is_err());
    }

    #[test]
    fn mode_covariance_examples() {
        let (_, c) = chain(3, 1.0);
        let cov = mode_covariance(&WindowFunctions::single_site(3, 0), &c).unwrap();
        assert!((cov.get(0, 0) - 1.0 / 3.0).abs() < 1e-15);
        assert!((cov.get(1, 1) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(cov.get(0, 1), 0.0);

        let cov = mode_covariance(&WindowFunctions::two_site_model(3, 1.0).unwrap(), &c).unwrap();
        // 2 Delta_p(0) + 2 Delta_p(1) = 5/3 - 1/3
        assert!((cov.get(1, 1) - 4.0 / 3.0).abs() < 1e-15);

        let (_, c0) = chain(3, 0.0);
        let cov = mode_covariance(&WindowFunctions::single_site(3, 1), &c0).unwrap();
        assert!((cov.matrix() - CovarianceMatrix::vacuum(1).matrix()).amax() < 1e-15);
    }

    #[test]
    fn g_examples() {
        let (_, c) = chain(3, 1.0);
        let g = g_factor(&WindowFunctions::single_site(3, 0), &c).unwrap();
        assert!((g - 1.0 / 3.0).abs() < 1e-12);
        let (_, c0) = chain(3, 0.0);
        assert_eq!(g_factor(&WindowFunctions::single_site(3, 0), &c0).unwrap(), 0.0);
        let g = g_factor(&WindowFunctions::two_site_model(3, 1.0).unwrap(), &c).unwrap();
        assert!((g - 7f64.sqrt() / 3.0).abs() < 1e-12);
    }

    #[test]
    fn g_factor_refuses_mixed_windows() {
        let (_, c) = chain(3, 1.0);
        let w = WindowFunctions::new(vec![1.0, 0.0, 0.0], vec![0.0, 0.5, 0.0], vec![0.0; 3], vec![1.0, 0.0, 0.0])
            .unwrap();
        assert!(g_factor(&w, &c).is_err());
    }

    #[test]
    fn uncertainty_violation_detected() {
        // a non-vacuum "correlator" that breaks the uncertainty relation
        assert!(matches!(g_from_radicand(-0.5), Err(Error::UncertaintyViolation(_))));
        assert_eq!(g_from_radicand(-1e-11).unwrap(), 0.0);
    }

    #[test]
    fn standard_form_identity_case() {
        let (_, c0) = chain(4, 0.0);
        let win = WindowFunctions::single_site(4, 2);
        let mode = standard_form(&win, &c0).unwrap();
        assert_eq!(mode.params, SymplecticParams { theta: 0.0, theta_prime: 0.0, sigma: 0.0 });
        assert_eq!(mode.g, 0.0);
        assert_eq!(mode.as_window(), win);
    }

    #[test]
    fn standard_form_two_site_model() {
        let (_, c) = chain(3, 1.0);
        let mode = standard_form(&WindowFunctions::two_site_model(3, 1.0).unwrap(), &c).unwrap();
        let g = 7f64.sqrt() / 3.0;
        assert!((mode.g - g).abs() < 1e-12);
        let expected = standard_prefactor(g).powi(-1) * 2f64.sqrt();
        assert!((mode.big_x[0] - expected).abs() < 1e-12);
        assert!((mode.params.sigma.exp() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(mode.params.theta_prime, 0.0);
    }

    #[test]
    fn standard_form_mixed_window() {
        let (_, c) = chain(8, 1.3);
        let x = vec![0.3, -1.0, 0.4, 0.0, 0.0, 0.2, 0.0, 0.1];
        let y = vec![0.0, 0.7, 0.1, 0.0, -0.3, 0.0, 0.0, 0.0];
        let z = vec![0.5, 0.0, 0.0, 0.2, 0.0, 0.0, -0.6, 0.0];
        let mut w = vec![1.0, 0.3, -0.2, 0.0, 0.9, 0.0, 0.0, 0.4];
        let raw = WindowFunctions::new(x.clone(), y.clone(), z.clone(), w.clone()).unwrap();
        let s = raw.commutator();
        let mut zz = z;
        for (a, b) in zz.iter_mut().zip(w.iter_mut()) {
            *a /= s;
            *b /= s;
        }
        let win = WindowFunctions::new(x, y, zz, w).unwrap();
        let mode = standard_form(&win, &c).unwrap();
        let cov = mode_covariance(&mode.as_window(), &c).unwrap();
        let d = 0.5 * (1.0 + mode.g * mode.g).sqrt();
        assert!((cov.get(0, 0) - d).abs() < 1e-9);
        assert!((cov.get(1, 1) - d).abs() < 1e-9);
        assert!(cov.get(0, 1).abs() < 1e-9);
        assert!((mode.as_window().commutator() - 1.0).abs() < 1e-9);
        assert!(mode.params.theta_prime > -PI / 4.0 && mode.params.theta_prime <= PI / 4.0);
    }

    #[test]
    fn momentum_conditions_single_site() {
        let (s, c) = chain(3, 1.0);
        let mode = standard_form(&WindowFunctions::single_site(3, 0), &c).unwrap();
        let mc = momentum_representation(&mode, &s).unwrap();
        assert!((mc.q_norm() - 1.0).abs() < 1e-10);
        assert!((mc.p_norm() - 1.0).abs() < 1e-10);
        let ov = mc.overlap();
        assert!(ov.re.abs() < 1e-9);
        assert!((ov.im + 3.0 / 10f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn momentum_conditions_decoupled() {
        let (s, c) = chain(5, 0.0);
        let mode = standard_form(&WindowFunctions::single_site(5, 3), &c).unwrap();
        let mc = momentum_representation(&mode, &s).unwrap();
        assert!((mc.q_norm() - 1.0).abs() < 1e-12);
        // every plane wave carries weight 1/N
        for q in &mc.q {
            assert!((q.norm_sqr() - 0.2).abs() < 1e-12);
        }
        assert!((mc.overlap() - Complex64::new(0.0, -1.0)).norm() < 1e-12);
    }
}
