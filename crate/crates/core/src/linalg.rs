//! Dense complex linear algebra used throughout: Hermitian eigendecomposition
//! with spectral calculus, PD solves and polynomial roots.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SzegoError};
use crate::hardy::C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;
const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-12;

/// Eigenvalues in descending order with orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// f(M) = V diag(f(λ)) V*.
    pub fn apply_fn<F: Fn(f64) -> C64>(&self, f: F) -> CMat {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = f(lambda);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= fj;
            }
        }
        let out = scaled * self.vectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }

    pub fn residual(&self, m: &CMat) -> f64 {
        let lambda =
            CMat::from_diagonal(&CVec::from_iterator(self.dim(), self.values.iter().map(|&l| C64::new(l, 0.0))));
        (m * &self.vectors - &self.vectors * lambda).norm()
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim();
        (self.vectors.adjoint() * &self.vectors - CMat::identity(n, n)).norm()
    }

    /// Number of eigenvalues above `rel_tol · λ_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let max = self.values.first().copied().unwrap_or(0.0);
        if max <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&l| l > rel_tol * max).count()
    }
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / scale
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn eigh(m: &CMat) -> Result<SpectralData> {
    if !m.is_square() {
        return Err(SzegoError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(SzegoError::NotHermitian { defect });
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(SpectralData { values: Vec::new(), vectors: CMat::zeros(0, 0) });
    }
    // Entries below ε²‖M‖ are invisible at working precision but can drive
    // the QR sweeps through underflow; they are flushed to zero.
    let floor = f64::EPSILON * f64::EPSILON * m.norm();
    let sym = ((m + m.adjoint()) * C64::new(0.5, 0.0)).map(|z| if z.norm() < floor { C64::new(0.0, 0.0) } else { z });
    let eig = nalgebra::SymmetricEigen::try_new(sym, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(SzegoError::EigenConvergence)?;
    if eig.eigenvalues.iter().any(|l| !l.is_finite()) {
        return Err(SzegoError::EigenConvergence);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralData { values, vectors })
}

/// [`eigh`] for a matrix declared positive semidefinite: eigenvalues within
/// 1e−12·‖M‖ below zero are set to zero, anything more negative is an error.
pub fn eigh_psd(m: &CMat) -> Result<SpectralData> {
    let mut spec = eigh(m)?;
    let tol = PSD_TOL * m.norm().max(f64::MIN_POSITIVE);
    for v in spec.values.iter_mut() {
        if *v < 0.0 {
            if *v < -tol {
                return Err(SzegoError::NotPositive { value: *v });
            }
            *v = 0.0;
        }
    }
    Ok(spec)
}

/// Solves (Hermitian positive definite) M x = b by Cholesky.
pub fn solve_hpd(m: &CMat, b: &CVec) -> Result<CVec> {
    let chol = nalgebra::Cholesky::new(m.clone()).ok_or(SzegoError::IllConditioned { condition: f64::INFINITY })?;
    Ok(chol.solve(b))
}

pub fn solve_general(m: &CMat, b: &CVec) -> Result<CVec> {
    m.clone().lu().solve(b).ok_or(SzegoError::IllConditioned { condition: f64::INFINITY })
}

/// Eigenvalues of a general complex square matrix via the Schur form.
pub fn eigenvalues_general(m: &CMat) -> Result<Vec<C64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or(SzegoError::EigenConvergence)?;
    let ev = schur.eigenvalues().ok_or(SzegoError::EigenConvergence)?;
    Ok(ev.iter().copied().collect())
}

pub fn spectral_radius(m: &CMat) -> Result<f64> {
    Ok(eigenvalues_general(m)?.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Roots of Σ p_k z^k (ascending coefficients) from the companion matrix.
/// Trailing zero coefficients are ignored.
pub fn poly_roots(p: &[C64]) -> Result<Vec<C64>> {
    let deg = match p.iter().rposition(|c| *c != C64::new(0.0, 0.0)) {
        Some(d) => d,
        None => return Ok(Vec::new()),
    };
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let mut comp = CMat::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i] / lead;
    }
    eigenvalues_general(&comp)
}

/// Operator 2-norm via the largest singular value.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().copied().fold(0.0, f64::max)
}

/// Elementwise complex conjugate.
pub fn conj(m: &CMat) -> CMat {
    m.map(|z| z.conj())
}

pub fn conj_vec(v: &CVec) -> CVec {
    v.map(|z| z.conj())
}

/// Matrix of S* on the first n modes: (S*x)_k = x_{k+1}.
pub fn shift_adjoint_matrix(n: usize) -> CMat {
    let mut s = CMat::zeros(n, n);
    for k in 0..n.saturating_sub(1) {
        s[(k, k + 1)] = C64::new(1.0, 0.0);
    }
    s
}
