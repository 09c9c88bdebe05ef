//! Swapping a mode and its partner onto two external oscillators.
//!
//! The extended phase space holds the `N` lattice sites followed by the
//! devices `A'` and `B'`, ordered `(q_1..q_N, q_A', q_B', p_1..p_N, p_A', p_B')`.
//! A swap of a canonical mode `(Q, P)` with a device `(q_d, p_d)` is generated
//! by `Q p_d - P q_d`; at angle `theta` it rotates the two planes
//! `(Q, q_d)` and `(P, p_d)` and leaves everything that commutes with all
//! four operators untouched. At `theta = pi/2`: `Q -> q_d`, `q_d -> -Q`,
//! `P -> p_d`, `p_d -> -P` in the Heisenberg picture.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{
    gaussian_entropy, symplectic_form, symplectic_pairing, transform_covariance, williamson_eigenvalues,
    CovarianceMatrix, SymplecticMap,
};
use crate::lattice::{vacuum_covariance, LatticeSpec};
use crate::partner::PartnerPair;

const CANONICAL_TOL: f64 = 1e-10;
const UNCERTAINTY_TOL: f64 = 1e-10;

/// Zero-mean single-oscillator Gaussian state of an external device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceState {
    pub q2: f64,
    pub p2: f64,
    pub qp: f64,
}

impl DeviceState {
    pub fn new(q2: f64, p2: f64, qp: f64) -> Result<Self> {
        let det = q2 * p2 - qp * qp;
        if !(q2 > 0.0 && p2 > 0.0) || !det.is_finite() {
            return Err(Error::invalid("device", format!("moments ({q2}, {p2}, {qp}) are not a state")));
        }
        if det < 0.25 - UNCERTAINTY_TOL {
            return Err(Error::UncertaintyViolation(4.0 * det - 1.0));
        }
        Ok(Self { q2, p2, qp })
    }

    pub fn vacuum() -> Self {
        Self {
            q2: 0.5,
            p2: 0.5,
            qp: 0.0,
        }
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix::single_mode(self.q2, self.p2, self.qp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Device {
    APrime,
    BPrime,
}

/// Lattice plus the two devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtendedSystem {
    pub spec: LatticeSpec,
}

impl ExtendedSystem {
    pub fn new(spec: LatticeSpec) -> Self {
        Self { spec }
    }

    pub fn n_field(&self) -> usize {
        self.spec.n_sites()
    }

    pub fn n_modes(&self) -> usize {
        self.n_field() + 2
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes()
    }

    pub fn device_mode(&self, device: Device) -> usize {
        match device {
            Device::APrime => self.n_field(),
            Device::BPrime => self.n_field() + 1,
        }
    }

    pub fn device_q(&self, device: Device) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[self.device_mode(device)] = 1.0;
        v
    }

    pub fn device_p(&self, device: Device) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[self.n_modes() + self.device_mode(device)] = 1.0;
        v
    }

    /// Embeds a lattice row over `(q_1..q_N, p_1..p_N)`; device entries are zero.
    pub fn embed(&self, row: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n_field();
        if row.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: row.len(),
            });
        }
        let mut v = DVector::zeros(self.dim());
        v.rows_mut(0, n).copy_from(&row.rows(0, n));
        v.rows_mut(n + 2, n).copy_from(&row.rows(n, n));
        Ok(v)
    }

    /// Field vacuum times the two device states.
    pub fn initial_covariance(&self, dev_a: &DeviceState, dev_b: &DeviceState) -> CovarianceMatrix {
        vacuum_covariance(&self.spec)
            .direct_sum(&dev_a.covariance())
            .direct_sum(&dev_b.covariance())
    }
}

/// Swap at the full angle `pi/2`.
pub fn swap_symplectic(
    q_row: &DVector<f64>,
    p_row: &DVector<f64>,
    device: Device,
    system: &ExtendedSystem,
) -> Result<SymplecticMap> {
    swap_symplectic_angle(q_row, p_row, device, system, FRAC_PI_2)
}

/// Heisenberg map `exp(theta L)` of the swap generator at angle `theta`.
///
/// `q_row`, `p_row` are the mode's coefficient vectors on the extended space.
/// With `a`, `b` the mode rows and `e_q`, `e_p` the device rows, the
/// coefficient vector `v` of any linear observable maps to
/// `v + (cos - 1) v_par + sin R v_par`, where `v_par` is the symplectic
/// projection of `v` on span(a, b, e_q, e_p) and `R` is the quarter turn
/// `a -> e_q -> -a`, `b -> e_p -> -b`. Row `i` of the result is the image of
/// the `i`-th unit vector.
pub fn swap_symplectic_angle(
    q_row: &DVector<f64>,
    p_row: &DVector<f64>,
    device: Device,
    system: &ExtendedSystem,
    theta: f64,
) -> Result<SymplecticMap> {
    let dim = system.dim();
    for row in [q_row, p_row] {
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
    }
    let (eq, ep) = (system.device_q(device), system.device_p(device));
    let (a, b) = (q_row, p_row);

    // [Q, P] = i, and the mode commutes with the device it is swapped into
    let mut worst = symplectic_pairing(a, b) - 1.0;
    for r in [
        symplectic_pairing(a, &eq),
        symplectic_pairing(a, &ep),
        symplectic_pairing(b, &eq),
        symplectic_pairing(b, &ep),
    ] {
        if r.abs() > worst.abs() {
            worst = r;
        }
    }
    if worst.abs() > CANONICAL_TOL {
        return Err(Error::NotCanonical(worst));
    }

    let j = symplectic_form(system.n_modes());
    // omega(e_i, u) = (J u)_i
    let (ja, jb, jeq, jep) = (&j * a, &j * b, &j * &eq, &j * &ep);
    let (s, c) = theta.sin_cos();

    let outer = |col: &DVector<f64>, row: &DVector<f64>| col * row.transpose();
    let par = outer(&jb, a) - outer(&ja, b) + outer(&jep, &eq) - outer(&jeq, &ep);
    let rot = outer(&jb, &eq) - outer(&ja, &ep) - outer(&jep, a) + outer(&jeq, b);
    let m = DMatrix::identity(dim, dim) + par * (c - 1.0) + rot * s;
    Ok(SymplecticMap::new_unchecked(m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapOrder {
    AFirst,
    BFirst,
}

/// Result of the two swaps.
#[derive(Debug, Clone, PartialEq)]
pub struct HarvestResult {
    /// `(q_A', q_B', p_A', p_B')`.
    pub device_covariance: CovarianceMatrix,
    /// Field modes `(Q_A, Q_B, P_A, P_B)` after the swaps.
    pub field_mode_marginal: CovarianceMatrix,
    pub full_covariance: CovarianceMatrix,
    pub protocol: SymplecticMap,
    /// Largest change of any symplectic eigenvalue of the whole system.
    pub spectrum_residual: f64,
}

impl HarvestResult {
    /// Entropy of device `A'` alone, i.e. the entanglement between the devices.
    pub fn device_entropy(&self) -> Result<f64> {
        gaussian_entropy(&williamson_eigenvalues(&self.device_covariance.marginal(&[0])?)?)
    }
}

/// Extended-space rows of `(Q_A, P_A, Q_B, P_B)`.
pub fn pair_rows(pair: &PartnerPair, system: &ExtendedSystem) -> Result<[DVector<f64>; 4]> {
    Ok([
        system.embed(&pair.mode_a.q_row())?,
        system.embed(&pair.mode_a.p_row())?,
        system.embed(&pair.b_q_row())?,
        system.embed(&pair.b_p_row())?,
    ])
}

/// Composite Heisenberg map of the protocol. Swaps applied in the given order
/// compose as `S_second * S_first`.
pub fn protocol_map(pair: &PartnerPair, system: &ExtendedSystem, order: SwapOrder) -> Result<SymplecticMap> {
    let [qa, pa, qb, pb] = pair_rows(pair, system)?;
    let sa = swap_symplectic(&qa, &pa, Device::APrime, system)?;
    let sb = swap_symplectic(&qb, &pb, Device::BPrime, system)?;
    match order {
        SwapOrder::AFirst => sb.compose(&sa),
        SwapOrder::BFirst => sa.compose(&sb),
    }
}

pub fn harvest(pair: &PartnerPair, dev_a: &DeviceState, dev_b: &DeviceState, spec: &LatticeSpec) -> Result<HarvestResult> {
    harvest_with_order(pair, dev_a, dev_b, spec, SwapOrder::AFirst)
}

pub fn harvest_with_order(
    pair: &PartnerPair,
    dev_a: &DeviceState,
    dev_b: &DeviceState,
    spec: &LatticeSpec,
    order: SwapOrder,
) -> Result<HarvestResult> {
    if pair.n_sites() != spec.n_sites() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_sites(),
            found: pair.n_sites(),
        });
    }
    let system = ExtendedSystem::new(*spec);
    let initial = system.initial_covariance(dev_a, dev_b);
    let protocol = protocol_map(pair, &system, order)?;
    let full = transform_covariance(&protocol, &initial)?;

    let n = spec.n_sites();
    let device_covariance = full.marginal(&[n, n + 1])?;
    let [qa, pa, qb, pb] = pair_rows(pair, &system)?;
    let rows = [qa, qb, pa, pb];
    let field_mode_marginal =
        CovarianceMatrix::from_rounded(DMatrix::from_fn(4, 4, |i, j| full.bilinear(&rows[i], &rows[j])));

    let before = williamson_eigenvalues(&initial)?;
    let after = williamson_eigenvalues(&full)?;
    let spectrum_residual = before
        .iter()
        .zip(&after)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);

    Ok(HarvestResult {
        device_covariance,
        field_mode_marginal,
        full_covariance: full,
        protocol,
        spectrum_residual,
    })
}
