//! Zero-mean Gaussian states at the level of second moments.
//!
//! A state of `n` modes is a real symmetric `2n x 2n` covariance matrix of
//! symmetrized moments `<{xi_i, xi_j}>/2` with `xi = (q_1..q_n, p_1..p_n)`.
//! A Gaussian unitary acts through its Heisenberg matrix `S`
//! (`U^dag xi_i U = sum_j S_ij xi_j`), which sends `cov -> S cov S^T`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;
const SYMPLECTIC_TOL: f64 = 1e-10;
const UNCERTAINTY_TOL: f64 = 1e-10;
const PHYSICAL_NU_TOL: f64 = 1e-6;
const PAIRING_TOL: f64 = 1e-8;

/// `J = [[0, I], [-I, 0]]` for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    assert!(n_modes >= 1, "symplectic_form needs at least one mode");
    let n = n_modes;
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = 1.0;
        j[(n + i, i)] = -1.0;
    }
    j
}

/// `u^T J v`. For linear operators `u.xi` and `v.xi` the commutator is
/// `[u.xi, v.xi] = i * symplectic_pairing(u, v)`.
pub fn symplectic_pairing(u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    let n = u.len() / 2;
    (0..n).map(|i| u[i] * v[n + i] - u[n + i] * v[i]).sum()
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn check_square_even(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.nrows() == 0 || !m.nrows().is_multiple_of(2) {
        return Err(Error::invalid(
            "dimension",
            format!("phase-space dimension must be even and positive, got {}", m.nrows()),
        ));
    }
    Ok(m.nrows() / 2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// Checks shape and symmetry. Physicality is checked by
    /// [`williamson_eigenvalues`], which needs an eigen-decomposition.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        check_square_even(&m)?;
        let asym = max_asymmetry(&m);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { m })
    }

    /// Builds from a matrix that is symmetric up to rounding; the result is
    /// exactly symmetric.
    pub(crate) fn from_rounded(m: DMatrix<f64>) -> Self {
        Self { m: symmetrized(m) }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            m: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        }
    }

    /// Block-diagonal single-mode state from `<q^2>`, `<p^2>`, `<{q,p}>/2`.
    pub fn single_mode(q2: f64, p2: f64, qp: f64) -> Self {
        Self {
            m: DMatrix::from_row_slice(2, 2, &[q2, qp, qp, p2]),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    /// Reduced state of the selected modes, in the order given.
    pub fn marginal(&self, modes: &[usize]) -> Result<Self> {
        let n = self.n_modes();
        if let Some(&bad) = modes.iter().find(|&&k| k >= n) {
            return Err(Error::invalid("modes", format!("mode index {bad} out of range 0..{n}")));
        }
        let k = modes.len();
        let idx: Vec<usize> = modes.iter().copied().chain(modes.iter().map(|&m| m + n)).collect();
        let m = DMatrix::from_fn(2 * k, 2 * k, |i, j| self.m[(idx[i], idx[j])]);
        Ok(Self { m })
    }

    /// Direct sum of independent subsystems, modes of `self` first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.n_modes(), other.n_modes());
        let n = a + b;
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        let place = |m: &mut DMatrix<f64>, src: &DMatrix<f64>, k: usize, off: usize| {
            for i in 0..2 * k {
                for j in 0..2 * k {
                    let ri = if i < k { off + i } else { n + off + i - k };
                    let rj = if j < k { off + j } else { n + off + j - k };
                    m[(ri, rj)] = src[(i, j)];
                }
            }
        };
        place(&mut m, &self.m, a, 0);
        place(&mut m, &other.m, b, a);
        Self { m }
    }

    /// Reorders to per-mode pairs `(q_1, p_1, q_2, p_2, ...)`, the layout
    /// two-mode covariances are usually written in.
    pub fn to_mode_pairs(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let idx: Vec<usize> = (0..n).flat_map(|k| [k, n + k]).collect();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| self.m[(idx[i], idx[j])])
    }

    /// `<(u.xi)(v.xi)>` symmetrized.
    pub fn bilinear(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        (u.transpose() * &self.m * v)[(0, 0)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMap {
    s: DMatrix<f64>,
}

impl SymplecticMap {
    pub fn new(s: DMatrix<f64>) -> Result<Self> {
        check_square_even(&s)?;
        let r = symplectic_residual(&s);
        if r > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(r));
        }
        Ok(Self { s })
    }

    /// Skips the check; callers build `s` from an exact symplectic recipe
    /// whose entries may be large enough that rounding exceeds `1e-10`.
    pub(crate) fn new_unchecked(s: DMatrix<f64>) -> Self {
        Self { s }
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            s: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    /// Phase rotation of one mode: `q -> cos q + sin p`, `p -> -sin q + cos p`.
    pub fn rotation(n_modes: usize, mode: usize, angle: f64) -> Self {
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        let (q, p) = (mode, n_modes + mode);
        let (sn, c) = angle.sin_cos();
        s[(q, q)] = c;
        s[(q, p)] = sn;
        s[(p, q)] = -sn;
        s[(p, p)] = c;
        Self { s }
    }

    /// Single-mode squeeze: `q -> e^sigma q`, `p -> e^-sigma p`.
    pub fn squeeze(n_modes: usize, mode: usize, sigma: f64) -> Self {
        let mut s = DMatrix::identity(2 * n_modes, 2 * n_modes);
        s[(mode, mode)] = sigma.exp();
        s[(n_modes + mode, n_modes + mode)] = (-sigma).exp();
        Self { s }
    }

    pub fn n_modes(&self) -> usize {
        self.s.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.s
    }

    /// `self * other`: apply `other` first in the Schrodinger picture.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.s.nrows() != other.s.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.s.nrows(),
                found: other.s.nrows(),
            });
        }
        Ok(Self {
            s: &self.s * &other.s,
        })
    }

    /// Max-entry deviation of `S J S^T` from `J`.
    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.s)
    }
}

fn symplectic_residual(s: &DMatrix<f64>) -> f64 {
    let j = symplectic_form(s.nrows() / 2);
    (s * &j * s.transpose() - j).amax()
}

/// `H = 1/2 xi^T h xi`, without any normal-ordering constant.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticHamiltonian {
    h: DMatrix<f64>,
}

impl QuadraticHamiltonian {
    pub fn new(h: DMatrix<f64>) -> Result<Self> {
        check_square_even(&h)?;
        let asym = max_asymmetry(&h);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { h })
    }

    pub fn zero(n_modes: usize) -> Self {
        Self {
            h: DMatrix::zeros(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn n_modes(&self) -> usize {
        self.h.nrows() / 2
    }

    /// Direct sum with the modes of `self` first.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let a = CovarianceMatrix { m: self.h.clone() };
        let b = CovarianceMatrix { m: other.h.clone() };
        Self {
            h: a.direct_sum(&b).m,
        }
    }
}

/// Symplectic eigenvalues, ascending, one per mode.
///
/// These are the moduli of the eigenvalues of `iJ cov`. They are computed
/// from the congruent matrix `K = L^T J L` (`cov = L L^T`), which is real
/// antisymmetric with eigenvalues `+-i nu`, so `K^T K` is symmetric with each
/// `nu^2` appearing twice.
pub fn williamson_eigenvalues(cov: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = cov.n_modes();
    let chol = nalgebra::Cholesky::new(cov.m.clone()).ok_or_else(|| {
        Error::NonPositiveDefinite("covariance is not positive definite".to_string())
    })?;
    let l = chol.l();
    let k = l.transpose() * symplectic_form(n) * &l;
    let ktk = symmetrized(k.transpose() * &k);
    let mut sq: Vec<f64> = ktk.symmetric_eigenvalues().iter().copied().collect();
    sq.sort_by(f64::total_cmp);

    let mut nus = Vec::with_capacity(n);
    for pair in sq.chunks(2) {
        let a = pair[0].max(0.0).sqrt();
        let b = pair[1].max(0.0).sqrt();
        if (a - b).abs() > PAIRING_TOL * a.max(1.0) {
            return Err(Error::NonPositiveDefinite(format!(
                "unpaired symplectic spectrum ({a} vs {b})"
            )));
        }
        nus.push(0.5 * (a + b));
    }
    if let Some(&lowest) = nus.first() {
        if lowest < 0.5 - UNCERTAINTY_TOL {
            return Err(Error::NonPositiveDefinite(format!(
                "smallest symplectic eigenvalue {lowest} < 1/2"
            )));
        }
    }
    Ok(nus)
}

/// `(nu + 1/2) ln(nu + 1/2) - (nu - 1/2) ln(nu - 1/2)`, written in terms of
/// `x = nu - 1/2` to stay accurate close to a pure mode.
fn mode_entropy(nu: f64) -> f64 {
    let x = nu - 0.5;
    if x <= 0.0 {
        return 0.0;
    }
    (1.0 + x) * x.ln_1p() - x * x.ln()
}

/// Von Neumann entropy of a Gaussian state with the given symplectic spectrum.
pub fn gaussian_entropy(nu: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &v in nu {
        if !(v >= 0.5 - PHYSICAL_NU_TOL) {
            return Err(Error::NonPhysicalEigenvalue(v));
        }
        total += mode_entropy(v.max(0.5));
    }
    Ok(total)
}

pub fn transform_covariance(s: &SymplecticMap, cov: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    if s.s.nrows() != cov.m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: s.s.nrows(),
            found: cov.m.nrows(),
        });
    }
    Ok(CovarianceMatrix::from_rounded(&s.s * &cov.m * s.s.transpose()))
}

/// `<H> = 1/2 tr(h cov)`: exact for the unordered quadratic form on a
/// zero-mean state.
pub fn quadratic_expectation(h: &QuadraticHamiltonian, cov: &CovarianceMatrix) -> Result<f64> {
    if h.h.nrows() != cov.m.nrows() {
        return Err(Error::DimensionMismatch {
            expected: h.h.nrows(),
            found: cov.m.nrows(),
        });
    }
    Ok(0.5 * h.h.component_mul(&cov.m).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symplectic_form_small_cases() {
        assert_eq!(symplectic_form(1), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        let j2 = symplectic_form(2);
        assert_eq!(j2[(0, 2)], 1.0);
        assert_eq!(j2[(1, 3)], 1.0);
        assert_eq!(j2[(2, 0)], -1.0);
        assert_eq!(j2[(3, 1)], -1.0);
        assert_eq!(j2.iter().filter(|v| **v != 0.0).count(), 4);
        let j3 = symplectic_form(3);
        assert_eq!(&j3 * &j3, -DMatrix::<f64>::identity(6, 6));
    }

    #[test]
    fn williamson_vacuum_and_thermal() {
        let nu = williamson_eigenvalues(&CovarianceMatrix::vacuum(1)).unwrap();
        assert!(close(nu[0], 0.5, 1e-14));
        let thermal = CovarianceMatrix::single_mode(1.7, 1.7, 0.0);
        let nu = williamson_eigenvalues(&thermal).unwrap();
        assert!(close(nu[0], 1.7, 1e-13));
    }

    #[test]
    fn williamson_pure_two_mode_squeezed() {
        let g: f64 = 2.0;
        let d = 0.5 * (1.0 + g * g).sqrt();
        // (q_A, q_B, p_A, p_B)
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                d, g / 2.0, 0.0, 0.0, //
                g / 2.0, d, 0.0, 0.0, //
                0.0, 0.0, d, -g / 2.0, //
                0.0, 0.0, -g / 2.0, d,
            ],
        );
        let nu = williamson_eigenvalues(&CovarianceMatrix::new(m).unwrap()).unwrap();
        assert_eq!(nu.len(), 2);
        for v in nu {
            assert!(close(v, 0.5, 1e-12), "{v}");
        }
    }

    #[test]
    fn williamson_rejects_unphysical() {
        let squeezed_too_far = CovarianceMatrix::single_mode(0.1, 0.1, 0.0);
        assert!(matches!(
            williamson_eigenvalues(&squeezed_too_far),
            Err(Error::NonPositiveDefinite(_))
        ));
        let indefinite = CovarianceMatrix::single_mode(1.0, -1.0, 0.0);
        assert!(williamson_eigenvalues(&indefinite).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(gaussian_entropy(&[0.5]).unwrap(), 0.0);
        assert_eq!(gaussian_entropy(&[0.5, 0.5]).unwrap(), 0.0);
        // nu = sqrt(10)/6, the single-site mode of the three-site chain at eta = 1
        let s = gaussian_entropy(&[10f64.sqrt() / 6.0]).unwrap();
        assert!(close(s, 0.125053, 1e-5), "{s}");
        // slightly below 1/2 within tolerance is clamped
        assert_eq!(gaussian_entropy(&[0.5 - 1e-9]).unwrap(), 0.0);
        assert!(matches!(gaussian_entropy(&[0.49]), Err(Error::NonPhysicalEigenvalue(_))));
    }

    #[test]
    fn entropy_matches_textbook_form() {
        for nu in [0.6_f64, 1.0, 3.5, 40.0] {
            let textbook = (nu + 0.5) * (nu + 0.5).ln() - (nu - 0.5) * (nu - 0.5).ln();
            assert!(close(gaussian_entropy(&[nu]).unwrap(), textbook, 1e-12));
        }
    }

    #[test]
    fn transform_examples() {
        let vac = CovarianceMatrix::vacuum(1);
        let rotated = transform_covariance(&SymplecticMap::rotation(1, 0, 0.7), &vac).unwrap();
        assert!((rotated.matrix() - vac.matrix()).amax() < 1e-15);

        let sq = SymplecticMap::squeeze(1, 0, 2f64.ln());
        let out = transform_covariance(&sq, &vac).unwrap();
        assert!(close(out.get(0, 0), 2.0, 1e-14));
        assert!(close(out.get(1, 1), 0.125, 1e-14));
        assert!(close(out.get(0, 1), 0.0, 1e-15));

        let s1 = SymplecticMap::squeeze(2, 1, 0.3);
        let s2 = SymplecticMap::rotation(2, 0, 1.1);
        let cov = CovarianceMatrix::single_mode(1.0, 0.7, 0.2).direct_sum(&CovarianceMatrix::vacuum(1));
        let stepwise = transform_covariance(&s2, &transform_covariance(&s1, &cov).unwrap()).unwrap();
        let composed = transform_covariance(&s2.compose(&s1).unwrap(), &cov).unwrap();
        assert!((stepwise.matrix() - composed.matrix()).amax() < 1e-14);
    }

    #[test]
    fn transform_dimension_mismatch() {
        let err = transform_covariance(&SymplecticMap::identity(2), &CovarianceMatrix::vacuum(1));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn expectation_examples() {
        let h = QuadraticHamiltonian::new(DMatrix::identity(2, 2)).unwrap();
        assert!(close(quadratic_expectation(&h, &CovarianceMatrix::vacuum(1)).unwrap(), 0.5, 1e-15));
        let sq = CovarianceMatrix::single_mode(2.0, 0.125, 0.0);
        assert!(close(quadratic_expectation(&h, &sq).unwrap(), 17.0 / 16.0, 1e-15));
    }

    #[test]
    fn rejects_non_symplectic_and_asymmetric() {
        let bad = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(SymplecticMap::new(bad), Err(Error::NotSymplectic(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(CovarianceMatrix::new(asym), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn marginal_and_mode_pairs() {
        let a = CovarianceMatrix::single_mode(1.0, 2.0, 0.3);
        let b = CovarianceMatrix::single_mode(3.0, 4.0, -0.1);
        let ab = a.direct_sum(&b);
        assert_eq!(ab.marginal(&[1]).unwrap(), b);
        assert_eq!(ab.marginal(&[0]).unwrap(), a);
        let pairs = ab.to_mode_pairs();
        assert_eq!(pairs[(0, 1)], 0.3);
        assert_eq!(pairs[(2, 2)], 3.0);
        assert_eq!(pairs[(3, 3)], 4.0);
        assert!(ab.marginal(&[2]).is_err());
    }

    #[test]
    fn pairing_is_commutator() {
        // [q_1, p_1] = i on two modes
        let q1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let p1 = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let p2 = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(symplectic_pairing(&q1, &p1), 1.0);
        assert_eq!(symplectic_pairing(&p1, &q1), -1.0);
        assert_eq!(symplectic_pairing(&q1, &p2), 0.0);
    }
}
