//! The purification partner of a standardized mode.
//!
//! For a mode in standard form with mixedness `g > 0`, the partner windows are
//!
//! ```text
//! X_B =  (r/g) X_A - (2/g) Dp*W_A      Y_B =  (r/g) Y_A + (2/g) Dq*Z_A
//! Z_B = -(r/g) Z_A - (2/g) Dp*Y_A      W_B = -(r/g) W_A + (2/g) Dq*X_A
//! ```
//!
//! with `r = sqrt(1 + g^2)` and `*` the cyclic convolution with the vacuum
//! correlators. The pair `(A, B)` is then a pure two-mode state whose
//! covariance has the form
//!
//! ```text
//!          Q_A   Q_B   P_A   P_B
//! Q_A  [  r/2   g/2    0     0  ]
//! Q_B  [  g/2   r/2    0     0  ]
//! P_A  [   0     0    r/2  -g/2 ]
//! P_B  [   0     0   -g/2   r/2 ]
//! ```

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{symplectic_pairing, CovarianceMatrix};
use crate::lattice::VacuumCorrelators;
use crate::modes::{standard_prefactor, StandardMode, PURE_MODE_G};

pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PartnerPair {
    pub mode_a: StandardMode,
    pub b_x: Vec<f64>,
    pub b_y: Vec<f64>,
    pub b_z: Vec<f64>,
    pub b_w: Vec<f64>,
    pub g: f64,
    /// Ideal two-mode covariance, ordered `(Q_A, Q_B, P_A, P_B)`.
    pub m_ab: CovarianceMatrix,
}

/// Two-mode covariance of a pure pair with mixedness `g`, ordered
/// `(Q_A, Q_B, P_A, P_B)`.
pub fn ideal_pair_covariance(g: f64) -> CovarianceMatrix {
    let d = 0.5 * (1.0 + g * g).sqrt();
    let c = 0.5 * g;
    CovarianceMatrix::new(DMatrix::from_row_slice(
        4,
        4,
        &[d, c, 0.0, 0.0, c, d, 0.0, 0.0, 0.0, 0.0, d, -c, 0.0, 0.0, -c, d],
    ))
    .expect("symmetric by construction")
}

impl PartnerPair {
    /// Assembles a pair from arbitrary B windows, for diagnostics. Nothing is
    /// checked; see [`check_locality`] and [`two_mode_covariance`].
    pub fn from_parts(mode_a: StandardMode, b_x: Vec<f64>, b_y: Vec<f64>, b_z: Vec<f64>, b_w: Vec<f64>) -> Self {
        let g = mode_a.g;
        Self {
            mode_a,
            b_x,
            b_y,
            b_z,
            b_w,
            g,
            m_ab: ideal_pair_covariance(g),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.b_x.len()
    }

    pub fn prefactor(&self) -> f64 {
        standard_prefactor(self.g)
    }

    /// Operator coefficients of `Q_B` (prefactor included).
    pub fn b_q_row(&self) -> DVector<f64> {
        let c = self.prefactor();
        DVector::from_iterator(2 * self.n_sites(), self.b_x.iter().chain(&self.b_y).map(|v| c * v))
    }

    pub fn b_p_row(&self) -> DVector<f64> {
        let c = self.prefactor();
        DVector::from_iterator(2 * self.n_sites(), self.b_z.iter().chain(&self.b_w).map(|v| c * v))
    }

    /// `prefactor^2 * sum (X_B W_B - Z_B Y_B)`; 1 for a canonical partner.
    pub fn b_commutator(&self) -> f64 {
        symplectic_pairing(&self.b_q_row(), &self.b_p_row())
    }
}

pub fn partner_window(mode_a: &StandardMode, corr: &VacuumCorrelators) -> Result<PartnerPair> {
    let g = mode_a.g;
    if g <= PURE_MODE_G {
        return Err(Error::NoPartner(g));
    }
    if mode_a.n_sites() != corr.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: corr.n_sites(),
            found: mode_a.n_sites(),
        });
    }
    let r = (1.0 + g * g).sqrt();
    let (a, b) = (r / g, 2.0 / g);
    let dp_w = corr.convolve_p(&mode_a.big_w);
    let dq_z = corr.convolve_q(&mode_a.big_z);
    let dp_y = corr.convolve_p(&mode_a.big_y);
    let dq_x = corr.convolve_q(&mode_a.big_x);

    let combine = |own: &[f64], s: f64, conv: &[f64], t: f64| -> Vec<f64> {
        own.iter().zip(conv).map(|(o, c)| s * o + t * c).collect()
    };
    Ok(PartnerPair {
        b_x: combine(&mode_a.big_x, a, &dp_w, -b),
        b_y: combine(&mode_a.big_y, a, &dq_z, b),
        b_z: combine(&mode_a.big_z, -a, &dp_y, -b),
        b_w: combine(&mode_a.big_w, -a, &dq_x, b),
        g,
        m_ab: ideal_pair_covariance(g),
        mode_a: mode_a.clone(),
    })
}

/// `|[Q_A, Q_B]|, |[Q_A, P_B]|, |[P_A, Q_B]|, |[P_A, P_B]|`.
pub fn check_locality(pair: &PartnerPair) -> [f64; 4] {
    let (qa, pa) = (pair.mode_a.q_row(), pair.mode_a.p_row());
    let (qb, pb) = (pair.b_q_row(), pair.b_p_row());
    [
        symplectic_pairing(&qa, &qb).abs(),
        symplectic_pairing(&qa, &pb).abs(),
        symplectic_pairing(&pa, &qb).abs(),
        symplectic_pairing(&pa, &pb).abs(),
    ]
}

/// Vacuum covariance of `(Q_A, Q_B, P_A, P_B)` recomputed from the windows.
pub fn two_mode_covariance(pair: &PartnerPair, corr: &VacuumCorrelators) -> Result<CovarianceMatrix> {
    if pair.n_sites() != corr.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: corr.n_sites(),
            found: pair.n_sites(),
        });
    }
    let rows = [
        pair.mode_a.q_row(),
        pair.b_q_row(),
        pair.mode_a.p_row(),
        pair.b_p_row(),
    ];
    let m = DMatrix::from_fn(4, 4, |i, j| corr.moment(&rows[i], &rows[j]));
    Ok(CovarianceMatrix::from_rounded(m))
}

/// Entanglement entropy of a pure pair with mixedness `g`:
/// `r ln((r + 1)/g) + ln(g/2)`, `r = sqrt(1 + g^2)`.
///
/// Evaluated as `r ln(1 + u/2) + u ln(2/g)` with `u = r - 1`, which has no
/// cancellation for small `g`.
pub fn entanglement_entropy(g: f64) -> f64 {
    if g <= 0.0 {
        return 0.0;
    }
    let r = (1.0 + g * g).sqrt();
    let u = g * g / (r + 1.0);
    r * (0.5 * u).ln_1p() + u * (std::f64::consts::LN_2 - g.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartnerClass {
    /// Spatially overlapped partner: the supports of A and B share a site.
    Sop,
    /// Spatially separated partner: disjoint supports.
    Ssp,
}

impl PartnerClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PartnerClass::Sop => "SOP",
            PartnerClass::Ssp => "SSP",
        }
    }
}

fn support(cols: [&[f64]; 4], tol: f64) -> Vec<bool> {
    (0..cols[0].len())
        .map(|n| cols.iter().any(|c| c[n].abs() > tol))
        .collect()
}

pub fn classify_partner(pair: &PartnerPair, support_tol: f64) -> PartnerClass {
    let a = &pair.mode_a;
    let sa = support([&a.big_x, &a.big_y, &a.big_z, &a.big_w], support_tol);
    let sb = support([&pair.b_x, &pair.b_y, &pair.b_z, &pair.b_w], support_tol);
    if sa.iter().zip(&sb).any(|(x, y)| *x && *y) {
        PartnerClass::Sop
    } else {
        PartnerClass::Ssp
    }
}
