//! Explicit solution formulas evaluated by spectral calculus.
//!
//! For a flow model (H², K², S*, u₀, and the functional (·|1) expressed in an
//! orthonormal basis) the cubic Szegő solution is
//!
//! ```text
//! û(t, n) = (Mⁿ v | 1),   M = e^{−itH²} e^{itK²} S*,   v = e^{−itH²} u₀,
//! ```
//!
//! so the n-th Fourier coefficient is read off by iterating M. The hierarchy
//! flow and the map Φ on the torus over the joint spectrum have the same shape
//! with different scalar functions applied to H² and K².

use nalgebra::DMatrix;

use crate::error::{Result, SzegoError};
use crate::hankel::{build_hankel, cluster_values, reduce, to_vec, Cluster, ReducedModel, CLUSTER_RADIUS, RANK_TOL};
use crate::hardy::{HardyFunction, SobolevIndex, C64};
use crate::linalg::{
    eigh_psd, operator_norm, shift_adjoint_matrix, solve_general, spectral_radius, CMat, CVec, SpectralData,
};

const TAU: f64 = std::f64::consts::TAU;

/// H², K², S*, u₀ and the vector representing (·|1), all in one orthonormal
/// basis: the first N monomials (truncated mode) or a basis of range(H_{u₀})
/// (reduced mode).
#[derive(Debug, Clone)]
pub struct FlowModel {
    pub h2: CMat,
    pub k2: CMat,
    pub sstar: CMat,
    pub u: CVec,
    pub one: CVec,
}

impl FlowModel {
    pub fn truncated(u0: &HardyFunction, n: usize) -> Self {
        let model = build_hankel(u0, n);
        let mut one = CVec::zeros(n);
        if n > 0 {
            one[0] = C64::new(1.0, 0.0);
        }
        Self { h2: model.h2, k2: model.k2, sstar: shift_adjoint_matrix(n), u: to_vec(u0, n), one }
    }

    pub fn from_reduced(r: &ReducedModel) -> Self {
        Self {
            h2: r.h2_r.clone(),
            k2: r.k2_r.clone(),
            sstar: r.sstar_r.clone(),
            u: r.u_r.clone(),
            one: r.one_r.clone(),
        }
    }

    /// Reduces the N-mode truncation of u₀ to range(H_{u₀}).
    pub fn reduced(u0: &HardyFunction, n: usize, rank_tol: f64) -> Result<Self> {
        Ok(Self::from_reduced(&reduce(&build_hankel(u0, n), rank_tol)?))
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }
}

/// A flow model together with the eigendecompositions of H² and K², computed
/// once and reused for every time or angle evaluated.
#[derive(Debug, Clone)]
pub struct SpectralFlow {
    model: FlowModel,
    h_spec: SpectralData,
    k_spec: SpectralData,
    zero_tol: f64,
}

impl SpectralFlow {
    pub fn new(model: FlowModel) -> Result<Self> {
        let h_spec = eigh_psd(&model.h2)?;
        let k_spec = eigh_psd(&model.k2)?;
        let zero_tol = RANK_TOL * h_spec.values.first().copied().unwrap_or(0.0);
        Ok(Self { model, h_spec, k_spec, zero_tol })
    }

    pub fn truncated(u0: &HardyFunction, n: usize) -> Result<Self> {
        Self::new(FlowModel::truncated(u0, n))
    }

    pub fn reduced(u0: &HardyFunction, n: usize) -> Result<Self> {
        Self::new(FlowModel::reduced(u0, n, RANK_TOL)?)
    }

    pub fn model(&self) -> &FlowModel {
        &self.model
    }

    pub fn h2_spectrum(&self) -> &SpectralData {
        &self.h_spec
    }

    pub fn k2_spectrum(&self) -> &SpectralData {
        &self.k_spec
    }

    /// Eigenvalues at or below this are treated as the zero eigenvalue.
    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    /// J^y(u₀) = ((I + yH²)⁻¹ 1 | 1).
    ///
    /// Only the projection of 1 onto the model space feels the resolvent; the
    /// orthogonal part lies in ker H² and contributes 1 − ‖one‖².
    pub fn j_value(&self, y: f64) -> f64 {
        let coords = self.h_spec.vectors.adjoint() * &self.model.one;
        let outside = 1.0 - self.model.one.norm_squared();
        outside + coords.iter().zip(&self.h_spec.values).map(|(c, &l)| c.norm_sqr() / (1.0 + y * l)).sum::<f64>()
    }

    /// The joint spectrum Σ: nonzero eigenvalues of H² and K², clustered.
    pub fn joint_spectrum(&self) -> Vec<Cluster> {
        let vals: Vec<f64> =
            self.h_spec.values.iter().chain(&self.k_spec.values).copied().filter(|&l| l > self.zero_tol).collect();
        cluster_values(&vals, CLUSTER_RADIUS)
    }

    fn build(&self, fh: &[C64], fk: &[C64]) -> Propagator {
        let e_h = apply_values(&self.h_spec, fh);
        let e_k = apply_values(&self.k_spec, fk);
        let m = &e_h * &e_k * &self.model.sstar;
        let v = &e_h * &self.model.u;
        Propagator { e_h, e_k, m, v, one: self.model.one.clone() }
    }

    /// Szegő flow at time t: E_H = e^{−itH²}, E_K = e^{itK²}.
    pub fn propagator(&self, t: f64) -> Propagator {
        let fh: Vec<C64> = self.h_spec.values.iter().map(|&l| C64::from_polar(1.0, -t * l)).collect();
        let fk: Vec<C64> = self.k_spec.values.iter().map(|&l| C64::from_polar(1.0, t * l)).collect();
        self.build(&fh, &fk)
    }

    /// Flow of Σ a_k J^{y_k} at time t: E_H = e^{2itg(H²)}, E_K = e^{−2itg(K²)},
    /// g(s) = Σ a_k y_k J^{y_k}(u₀)/(1 + y_k s).
    pub fn hierarchy_propagator(&self, t: f64, weights: &[f64], ys: &[f64]) -> Result<Propagator> {
        validate_parameters(weights, ys)?;
        let js: Vec<f64> = ys.iter().map(|&y| self.j_value(y)).collect();
        let g = |s: f64| -> f64 { weights.iter().zip(ys).zip(&js).map(|((a, y), j)| a * y * j / (1.0 + y * s)).sum() };
        let fh: Vec<C64> = self.h_spec.values.iter().map(|&l| C64::from_polar(1.0, 2.0 * t * g(l))).collect();
        let fk: Vec<C64> = self.k_spec.values.iter().map(|&l| C64::from_polar(1.0, -2.0 * t * g(l))).collect();
        Ok(self.build(&fh, &fk))
    }

    /// Φ(ω): E_H = e^{−iω}(H²), E_K = e^{iω}(K²). The zero eigenvalue gets
    /// angle 0; it only acts on vectors the formula never sees.
    pub fn phi_propagator(&self, omega: &AngleAssignment) -> Result<Propagator> {
        let angle = |l: f64| -> Result<f64> {
            if l <= self.zero_tol {
                Ok(0.0)
            } else {
                omega.angle_at(l)
            }
        };
        let fh = self
            .h_spec
            .values
            .iter()
            .map(|&l| angle(l).map(|w| C64::from_polar(1.0, -w)))
            .collect::<Result<Vec<_>>>()?;
        let fk = self
            .k_spec
            .values
            .iter()
            .map(|&l| angle(l).map(|w| C64::from_polar(1.0, w)))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.build(&fh, &fk))
    }
}

fn apply_values(spec: &SpectralData, f: &[C64]) -> CMat {
    let mut scaled = spec.vectors.clone();
    for (j, fj) in f.iter().enumerate() {
        for x in scaled.column_mut(j).iter_mut() {
            *x *= fj;
        }
    }
    scaled * spec.vectors.adjoint()
}

fn validate_parameters(weights: &[f64], ys: &[f64]) -> Result<()> {
    if weights.len() != ys.len() {
        return Err(SzegoError::InvalidParameters(format!("{} weights for {} parameters", weights.len(), ys.len())));
    }
    if let Some(y) = ys.iter().find(|&&y| !(y > 0.0) || !y.is_finite()) {
        return Err(SzegoError::InvalidParameters(format!("y = {y} is not positive")));
    }
    if let Some(a) = weights.iter().find(|a| !a.is_finite()) {
        return Err(SzegoError::InvalidParameters(format!("weight {a} is not finite")));
    }
    for (i, yi) in ys.iter().enumerate() {
        for yj in &ys[i + 1..] {
            if (yi - yj).abs() <= 1e-12 * yi.max(*yj) {
                return Err(SzegoError::InvalidParameters(format!("duplicate y = {yi}")));
            }
        }
    }
    Ok(())
}

/// The matrices of one explicit-formula evaluation.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub e_h: CMat,
    pub e_k: CMat,
    pub m: CMat,
    pub v: CVec,
    one: CVec,
}

impl Propagator {
    /// First `n_out` Taylor coefficients: û(n) = (Mⁿv | 1).
    pub fn coefficients(&self, n_out: usize) -> HardyFunction {
        let mut x = self.v.clone();
        let mut out = Vec::with_capacity(n_out.max(1));
        for _ in 0..n_out.max(1) {
            out.push(self.one.dotc(&x));
            x = &self.m * x;
        }
        HardyFunction::from_vec_unchecked(out)
    }

    /// ‖Mⁿ v‖², which equals the L² mass Σ_{k≥n} |û(k)|² of the solution.
    pub fn tail_mass(&self, n: usize) -> f64 {
        let mut x = self.v.clone();
        for _ in 0..n {
            x = &self.m * x;
        }
        x.norm_squared()
    }

    /// Extracts coefficients until the H^s mass of the remaining tail is
    /// below `tol²`, estimated from ‖Mⁿv‖ and the spectral radius of M.
    /// Gives up with [`SzegoError::Truncation`] after `max_modes`.
    pub fn coefficients_to_tolerance(&self, tol: f64, s: SobolevIndex, max_modes: usize) -> Result<HardyFunction> {
        let rho = if self.m.nrows() <= 256 { spectral_radius(&self.m)? } else { operator_norm(&self.m) };
        let rho2 = (rho * rho).min(1.0);
        let mut x = self.v.clone();
        let mut out = Vec::new();
        loop {
            out.push(self.one.dotc(&x));
            x = &self.m * x;
            let n = out.len();
            let tail = x.norm_squared();
            // Σ_j ((1+(n+j)²)/(1+n²))^s ρ^{2j}(1−ρ²) ≤ (1−ρ²)/(1 − ρ² e^{2s/n})
            let growth = rho2 * (2.0 * s.value() / n as f64).exp();
            if growth < 1.0 {
                let factor = s.weight(n) * (1.0 - rho2) / (1.0 - growth);
                if tail * factor.max(s.weight(n)) < tol * tol {
                    return Ok(HardyFunction::from_vec_unchecked(out));
                }
            }
            if tail == 0.0 {
                return Ok(HardyFunction::from_vec_unchecked(out));
            }
            if n >= max_modes {
                return Err(SzegoError::Truncation { tail, modes: n, required: n + 1 });
            }
        }
    }

    /// u(t, z) for |z| ≤ 1 − 1e−6, by solving (I − zM)x = v.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() > 1.0 - 1e-6 {
            return Err(SzegoError::PointTooClose { modulus: z.norm() });
        }
        let n = self.m.nrows();
        let lhs = CMat::identity(n, n) - &self.m * z;
        let x = solve_general(&lhs, &self.v)?;
        Ok(self.one.dotc(&x))
    }

    /// max(‖E_H*E_H − I‖, ‖E_K*E_K − I‖).
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.e_h.nrows();
        let id = CMat::identity(n, n);
        (self.e_h.adjoint() * &self.e_h - &id).norm().max((self.e_k.adjoint() * &self.e_k - &id).norm())
    }

    pub fn m_norm(&self) -> f64 {
        operator_norm(&self.m)
    }

    /// Spectral radius of M; the coefficients decay like its powers.
    pub fn decay_rate(&self) -> Result<f64> {
        spectral_radius(&self.m)
    }
}

/// Szegő solution at time t from the N-mode truncation of u₀.
pub fn evolve_explicit(u0: &HardyFunction, t: f64, n: usize, n_out: usize) -> Result<HardyFunction> {
    Ok(SpectralFlow::truncated(u0, n)?.propagator(t).coefficients(n_out))
}

/// u(t, z) at a point of the open disc.
pub fn eval_explicit(u0: &HardyFunction, t: f64, n: usize, z: C64) -> Result<C64> {
    SpectralFlow::truncated(u0, n)?.propagator(t).eval(z)
}

/// Hierarchy solution at time t; with no parameters this is u₀ itself.
pub fn evolve_hierarchy(
    flow: &SpectralFlow,
    t: f64,
    weights: &[f64],
    ys: &[f64],
    n_out: usize,
) -> Result<HardyFunction> {
    Ok(flow.hierarchy_propagator(t, weights, ys)?.coefficients(n_out))
}

/// A map ω: Σ → T on the clustered joint spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleAssignment {
    clusters: Vec<Cluster>,
    angles: Vec<f64>,
}

impl AngleAssignment {
    pub fn new(clusters: Vec<Cluster>, angles: Vec<f64>) -> Result<Self> {
        if clusters.len() != angles.len() {
            return Err(SzegoError::InvalidAngles(format!("{} points but {} angles", clusters.len(), angles.len())));
        }
        for w in clusters.windows(2) {
            if w[1].lo - w[0].hi <= CLUSTER_RADIUS {
                return Err(SzegoError::InvalidAngles(format!(
                    "points {} and {} are not separated",
                    w[0].point, w[1].point
                )));
            }
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(SzegoError::InvalidAngles("non-finite angle".into()));
        }
        let angles = angles.into_iter().map(|a| a.rem_euclid(TAU)).collect();
        Ok(Self { clusters, angles })
    }

    /// Angles given on bare points (clusters of zero width).
    pub fn from_points(points: &[f64], angles: Vec<f64>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = points.iter().copied().zip(angles.iter().copied()).collect();
        if points.len() != angles.len() {
            return Err(SzegoError::InvalidAngles(format!("{} points but {} angles", points.len(), angles.len())));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let clusters = pairs.iter().map(|&(p, _)| Cluster { point: p, lo: p, hi: p }).collect();
        Self::new(clusters, pairs.into_iter().map(|(_, a)| a).collect())
    }

    /// ω(s) = t·s mod 2π, so that Φ(ω) is the Szegő solution at time t.
    pub fn linear(clusters: &[Cluster], t: f64) -> Self {
        let angles = clusters.iter().map(|c| (t * c.point).rem_euclid(TAU)).collect();
        Self { clusters: clusters.to_vec(), angles }
    }

    pub fn points(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.point).collect()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Angle of the cluster containing `lambda`.
    ///
    /// A per-eigenvalue t·λ would differ from t·(cluster point) by at most
    /// t·radius; the cluster representative is used for both H² and K².
    pub fn angle_at(&self, lambda: f64) -> Result<f64> {
        self.clusters
            .iter()
            .zip(&self.angles)
            .find(|(c, _)| lambda >= c.lo - CLUSTER_RADIUS && lambda <= c.hi + CLUSTER_RADIUS)
            .map(|(_, &a)| a)
            .ok_or(SzegoError::UnmatchedEigenvalue { value: lambda })
    }
}

/// Φ(ω) on the first `n_out` coefficients.
pub fn quasip_phi(flow: &SpectralFlow, omega: &AngleAssignment, n_out: usize) -> Result<HardyFunction> {
    Ok(flow.phi_propagator(omega)?.coefficients(n_out))
}

/// Default hierarchy parameters y_k = k.
pub fn default_ys(n: usize) -> Vec<f64> {
    (1..=n).map(|k| k as f64).collect()
}

const MAX_CONDITION: f64 = 1e12;

/// Solves ω(s) = −2 Σ_k a_k y_k J^{y_k}(u₀)/(1 + y_k s), s ∈ Σ, for the
/// weights a_k. Feeding them to the hierarchy flow at t = 1 gives Φ(ω).
pub fn solve_angle_system(flow: &SpectralFlow, omega: &AngleAssignment, ys: &[f64]) -> Result<Vec<f64>> {
    let n = omega.len();
    if ys.len() != n {
        return Err(SzegoError::InvalidParameters(format!("need {n} parameters y_k, got {}", ys.len())));
    }
    validate_parameters(&vec![0.0; n], ys)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let points = omega.points();
    let js: Vec<f64> = ys.iter().map(|&y| flow.j_value(y)).collect();
    let mat = DMatrix::<f64>::from_fn(n, n, |i, k| -2.0 * ys[k] * js[k] / (1.0 + ys[k] * points[i]));
    let rhs = nalgebra::DVector::from_column_slice(omega.angles());
    let sv = mat.clone().svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(SzegoError::IllConditioned { condition });
    }
    let a = mat.clone().lu().solve(&rhs).ok_or(SzegoError::IllConditioned { condition })?;
    let residual = (&mat * &a - &rhs).norm();
    if residual > 1e-10 * rhs.norm().max(1.0) {
        return Err(SzegoError::IllConditioned { condition });
    }
    Ok(a.iter().copied().collect())
}
