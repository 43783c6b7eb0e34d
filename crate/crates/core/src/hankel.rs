//! Matrix models of the Hankel operators H_u, K_u, Toeplitz operators, and
//! the generators of the Lax pairs.
//!
//! The antilinear operators are never stored as operators. An antilinear map
//! X is represented by the matrix A_X with X(h) = A_X·conj(h); compositions
//! follow from
//!
//! * L∘X ↦ L·A_X, X∘L ↦ A_X·conj(L) for linear L,
//! * X∘Y ↦ A_X·conj(A_Y), which is linear.
//!
//! In particular H_u² has the Hermitian matrix A·conj(A).

use crate::error::{Result, SzegoError};
use crate::hardy::{HardyFunction, TwoSided, C64};
use crate::linalg::{conj, conj_vec, eigh_psd, shift_adjoint_matrix, solve_hpd, CMat, CVec, SpectralData};

/// Default relative cutoff for numerical ranks.
pub const RANK_TOL: f64 = 1e-10;
/// Minimum ratio λ_r/λ_{r+1} accepted when reducing to range(H).
pub const SPECTRAL_GAP: f64 = 1e3;
/// Eigenvalues of H² and K² closer than this are one point of Σ.
pub const CLUSTER_RADIUS: f64 = 1e-8;

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Matrix A[n][p] = û(n+p+offset) on the first `n` modes.
pub fn hankel_matrix(u: &HardyFunction, n: usize, offset: usize) -> CMat {
    CMat::from_fn(n, n, |r, c| u.coeff(r + c + offset))
}

/// Matrix of T_b on the first `n` modes: T[n][m] = b̂(n−m).
pub fn build_toeplitz(b: &TwoSided, n: usize) -> CMat {
    CMat::from_fn(n, n, |r, c| b.coeff(r as i64 - c as i64))
}

pub fn to_vec(u: &HardyFunction, n: usize) -> CVec {
    CVec::from_fn(n, |k, _| u.coeff(k))
}

pub fn to_hardy(v: &CVec) -> HardyFunction {
    HardyFunction::from_vec_unchecked(v.iter().copied().collect())
}

/// Finite section of H_u, K_u and their squares on the first N modes.
#[derive(Debug, Clone)]
pub struct HankelModel {
    pub a: CMat,
    pub a_shift: CMat,
    pub h2: CMat,
    pub k2: CMat,
    pub u_vec: CVec,
}

/// Builds the N×N model. Coefficients of u with index ≥ 2N are not seen.
pub fn build_hankel(u: &HardyFunction, n: usize) -> HankelModel {
    let a = hankel_matrix(u, n, 0);
    let a_shift = hankel_matrix(u, n, 1);
    let h2 = &a * conj(&a);
    let k2 = &a_shift * conj(&a_shift);
    HankelModel { a, a_shift, h2, k2, u_vec: to_vec(u, n) }
}

impl HankelModel {
    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// H_u(h) = A·conj(h).
    pub fn apply_h(&self, h: &CVec) -> CVec {
        &self.a * conj_vec(h)
    }

    pub fn apply_k(&self, h: &CVec) -> CVec {
        &self.a_shift * conj_vec(h)
    }

    /// ‖K² − H² + u u*‖ / ‖H²‖; zero whenever len(u) ≤ N.
    pub fn rank_one_defect(&self) -> f64 {
        let uu = &self.u_vec * self.u_vec.adjoint();
        let scale = self.h2.norm().max(f64::MIN_POSITIVE);
        (&self.k2 - &self.h2 + uu).norm() / scale
    }

    pub fn h2_spectrum(&self) -> Result<SpectralData> {
        eigh_psd(&self.h2)
    }

    pub fn k2_spectrum(&self) -> Result<SpectralData> {
        eigh_psd(&self.k2)
    }
}

/// Numerical ranks (rk H_u, rk K_u) with cutoff `tol·λ_max(H²)`.
pub fn hankel_ranks(u: &HardyFunction, tol: f64) -> Result<(usize, usize)> {
    section_ranks(u, u.len(), tol)
}

/// Ranks of the n×n sections of H_u and K_u, which only read û(0..2n).
///
/// For a symbol of rank r every section with n > r has the full ranks, so a
/// small section classifies a long (or analytically given) sequence without
/// an N×N eigenproblem.
pub fn section_ranks(u: &HardyFunction, n: usize, tol: f64) -> Result<(usize, usize)> {
    let model = build_hankel(u, n);
    let h = model.h2_spectrum()?;
    let k = model.k2_spectrum()?;
    let max = h.values.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return Ok((0, 0));
    }
    let count = |s: &SpectralData| s.values.iter().filter(|&&l| l > tol * max).count();
    Ok((count(&h), count(&k)))
}

fn rank_index(ranks: Result<(usize, usize)>) -> Option<usize> {
    let (rh, rk) = ranks.ok()?;
    if rh >= 1 && (rh == rk || rh == rk + 1) {
        Some(rh + rk)
    } else {
        None
    }
}

/// The d with rk H = [(d+1)/2] and rk K = [d/2], if the ranks are consistent.
pub fn vd_membership(u: &HardyFunction, tol: f64) -> Option<usize> {
    rank_index(hankel_ranks(u, tol))
}

/// [`vd_membership`] from the n×n sections; n must exceed the rank.
pub fn vd_membership_section(u: &HardyFunction, n: usize, tol: f64) -> Option<usize> {
    rank_index(section_ranks(u, n, tol))
}

/// Restriction of the flow operators to range(H_{u₀}).
#[derive(Debug, Clone)]
pub struct ReducedModel {
    /// N×r orthonormal columns spanning range(H).
    pub basis: CMat,
    pub h2_r: CMat,
    pub k2_r: CMat,
    pub sstar_r: CMat,
    pub u_r: CVec,
    /// Coordinates of the orthogonal projection of 1 onto range(H); the
    /// functional (·|1) is x ↦ (x|one_r).
    pub one_r: CVec,
    /// ‖(I − P) S* P‖ for the basis projector P.
    pub invariance_defect: f64,
}

impl ReducedModel {
    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// ‖K2_r − H2_r + u_r u_r*‖.
    pub fn rank_one_defect(&self) -> f64 {
        (&self.k2_r - &self.h2_r + &self.u_r * self.u_r.adjoint()).norm()
    }
}

pub fn reduce(model: &HankelModel, rank_tol: f64) -> Result<ReducedModel> {
    let n = model.dim();
    let spec = model.h2_spectrum()?;
    let r = spec.numerical_rank(rank_tol);
    if r > 0 && r < n {
        let above = spec.values[r - 1];
        let below = spec.values[r];
        if below > 0.0 && above / below <= SPECTRAL_GAP {
            return Err(SzegoError::NoSpectralGap { above, below });
        }
    }
    let basis = spec.vectors.columns(0, r).into_owned();
    let bh = basis.adjoint();
    let sstar = shift_adjoint_matrix(n);
    let s_basis = &sstar * &basis;
    let h2_r = &bh * &model.h2 * &basis;
    let k2_r = &bh * &model.k2 * &basis;
    let sstar_r = &bh * &s_basis;
    let u_r = &bh * &model.u_vec;
    let one_r = CVec::from_fn(r, |j, _| basis[(0, j)].conj());
    let invariance_defect = (&s_basis - &basis * &sstar_r).norm();
    // Hermitian parts only; the off-Hermitian residue is rounding noise
    let herm = |m: CMat| (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(ReducedModel { basis, h2_r: herm(h2_r), k2_r: herm(k2_r), sstar_r, u_r, one_r, invariance_defect })
}

/// Lax generators B_u = (i/2)H² − iT_{|u|²}, C_u = (i/2)K² − iT_{|u|²}.
pub fn lax_generators(model: &HankelModel, u: &HardyFunction) -> (CMat, CMat) {
    let t = build_toeplitz(&TwoSided::abs_sq(u), model.dim());
    let half_i = C64::new(0.0, 0.5);
    let i = C64::new(0.0, 1.0);
    let b = &model.h2 * half_i - &t * i;
    let c = &model.k2 * half_i - &t * i;
    (b, c)
}

/// F^y_u, G^y_u and the vectors w^y, H_u w^y for one hierarchy parameter.
#[derive(Debug, Clone)]
pub struct HierarchyGenerators {
    pub f: CMat,
    pub g: CMat,
    pub w: CVec,
    pub hw: CVec,
}

impl HierarchyGenerators {
    /// J^y(u) = (w^y|1).
    pub fn j_value(&self) -> f64 {
        self.w[0].re
    }

    /// i·X_{J^y}(u) = −2y·w^y·H_u(w^y), truncated to the model size.
    pub fn i_vector_field(&self, y: f64) -> HardyFunction {
        let n = self.w.len();
        let prod = crate::hardy::convolve(self.w.as_slice(), self.hw.as_slice());
        HardyFunction::from_vec_unchecked(prod.into_iter().take(n).map(|z| z * (-2.0 * y)).collect())
    }
}

/// Solves (I + yH²)w = 1 and forms
/// G(h) = −y w Π(w̄h) + y² Hw Π(conj(Hw) h), F = G − y²(·|Hw)Hw.
pub fn hierarchy_generators(model: &HankelModel, y: f64) -> Result<HierarchyGenerators> {
    if !(y > 0.0) {
        return Err(SzegoError::InvalidParameters(format!("y = {y}")));
    }
    let n = model.dim();
    let lhs = CMat::identity(n, n) + &model.h2 * C64::new(y, 0.0);
    let mut e0 = CVec::zeros(n);
    e0[0] = one();
    let w = solve_hpd(&lhs, &e0)?;
    let hw = model.apply_h(&w);
    let analytic = |v: &CVec| build_toeplitz(&TwoSided::new(0, v.iter().copied().collect()), n);
    let tw = analytic(&w);
    let thw = analytic(&hw);
    let g = (&tw * tw.adjoint()) * C64::new(-y, 0.0) + (&thw * thw.adjoint()) * C64::new(y * y, 0.0);
    let f = &g - (&hw * hw.adjoint()) * C64::new(y * y, 0.0);
    Ok(HierarchyGenerators { f, g, w, hw })
}

/// Elementary symmetric functions S₀=1, S₁..S_m of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut s = vec![1.0];
    for &v in values {
        s.push(0.0);
        for k in (1..s.len()).rev() {
            s[k] += v * s[k - 1];
        }
    }
    s
}

/// Coefficients a₀..a_N with (I + H²)⁻¹ = Σ a_k H^{2k}, where N is the number
/// of eigenvalues of H² above `rank_tol·λ_max`.
pub fn cayley_resolvent(spec: &SpectralData, rank_tol: f64) -> Vec<f64> {
    let r = spec.numerical_rank(rank_tol);
    let s = elementary_symmetric(&spec.values[..r]);
    let partial = |m: usize| -> f64 { 1.0 + s[1..=m].iter().sum::<f64>() };
    let denom = partial(r);
    (0..=r)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * partial(r - k) / denom
        })
        .collect()
}

/// One point of the joint spectrum Σ with the extent of its cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cluster {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Merges values into clusters by single linkage at `radius`; ascending.
pub fn cluster_values(values: &[f64], radius: f64) -> Vec<Cluster> {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<Cluster> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    let flush = |members: &mut Vec<f64>, out: &mut Vec<Cluster>| {
        if !members.is_empty() {
            let point = members.iter().sum::<f64>() / members.len() as f64;
            out.push(Cluster { point, lo: members[0], hi: *members.last().unwrap() });
            members.clear();
        }
    };
    for x in v {
        if let Some(&last) = members.last() {
            if x - last > radius {
                flush(&mut members, &mut out);
            }
        }
        members.push(x);
    }
    flush(&mut members, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigh;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn hankel_of_exponential() {
        let u = HardyFunction::monomial(1, c(1.0));
        let m = build_hankel(&u, 3);
        for r in 0..3 {
            for col in 0..3 {
                let expected = if r + col == 1 { c(1.0) } else { c(0.0) };
                assert_eq!(m.a[(r, col)], expected);
            }
        }
        let diag = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(1.0), c(0.0)]));
        assert_eq!(m.h2, diag);
        assert_eq!(m.rank_one_defect(), 0.0);
    }

    #[test]
    fn hankel_of_perturbed_exponential() {
        let eps = 0.3;
        let u = HardyFunction::from_real(&[eps, 1.0]).unwrap();
        let m = build_hankel(&u, 2);
        let h2 = CMat::from_row_slice(2, 2, &[c(1.0 + eps * eps), c(eps), c(eps), c(1.0)]);
        let k2 = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        assert!((&m.h2 - h2).norm() < 1e-15);
        assert!((&m.k2 - k2).norm() < 1e-15);
        let z = build_hankel(&HardyFunction::zero(3), 3);
        assert_eq!(z.h2.norm() + z.k2.norm() + z.a.norm(), 0.0);
    }

    #[test]
    fn toeplitz_examples() {
        let n = 5;
        assert_eq!(build_toeplitz(&TwoSided::new(0, vec![c(1.0)]), n), CMat::identity(n, n));
        let s = build_toeplitz(&TwoSided::new(1, vec![c(1.0)]), n);
        assert_eq!(s, shift_adjoint_matrix(n).transpose());
        let eps = 0.4;
        let u = HardyFunction::from_real(&[eps, 1.0]).unwrap();
        let t = build_toeplitz(&TwoSided::abs_sq(&u), n);
        for r in 0..n {
            for col in 0..n {
                let expected = match r as i64 - col as i64 {
                    0 => 1.0 + eps * eps,
                    1 | -1 => eps,
                    _ => 0.0,
                };
                assert!((t[(r, col)] - c(expected)).norm() < 1e-15);
            }
        }
        let b = TwoSided::new(-2, vec![C64::new(0.1, 0.2), c(0.3), C64::new(-1.0, 0.5), c(0.0), C64::new(0.0, 2.0)]);
        let lhs = build_toeplitz(&b, n).adjoint();
        assert_eq!(lhs, build_toeplitz(&b.conj(), n));
    }

    #[test]
    fn vd_examples() {
        let eps = 0.5;
        assert_eq!(vd_membership(&HardyFunction::from_real(&[eps, 1.0]).unwrap(), RANK_TOL), Some(3));
        assert_eq!(vd_membership(&HardyFunction::from_real(&[0.7]).unwrap(), RANK_TOL), Some(1));
        let p = C64::new(0.3, -0.4);
        let geo = HardyFunction::new((0..80).map(|k| C64::new(1.5, 0.0) * p.powu(k)).collect()).unwrap();
        assert_eq!(hankel_ranks(&geo, RANK_TOL).unwrap(), (1, 1));
        assert_eq!(vd_membership(&geo, RANK_TOL), Some(2));
        assert_eq!(vd_membership(&HardyFunction::zero(4), RANK_TOL), None);
        // a long sequence classified from a 6×6 section
        assert_eq!(vd_membership_section(&geo, 6, 1e-8), Some(2));
        let slow = HardyFunction::new((0..4000).map(|k| C64::new(0.9995f64.powi(k), 0.0)).collect()).unwrap();
        assert_eq!(vd_membership_section(&slow, 6, 1e-8), Some(2));
    }

    #[test]
    fn reduce_examples() {
        let eps = 0.5;
        let u = HardyFunction::from_real(&[eps, 1.0]).unwrap();
        let red = reduce(&build_hankel(&u, 8), RANK_TOL).unwrap();
        assert_eq!(red.rank(), 2);
        let h = eigh(&red.h2_r).unwrap();
        let root = eps * (1.0 + eps * eps / 4.0).sqrt();
        assert!((h.values[0] - (1.0 + eps * eps / 2.0 + root)).abs() < 1e-13);
        assert!((h.values[1] - (1.0 + eps * eps / 2.0 - root)).abs() < 1e-13);
        let k = eigh(&red.k2_r).unwrap();
        assert!((k.values[0] - 1.0).abs() < 1e-13 && k.values[1].abs() < 1e-13);
        assert!(red.invariance_defect < 1e-12);
        assert!(red.rank_one_defect() < 1e-12);

        let e1 = HardyFunction::monomial(1, c(1.0));
        let red = reduce(&build_hankel(&e1, 6), RANK_TOL).unwrap();
        assert_eq!(red.rank(), 2);
        assert!(red.sstar_r.norm() > 0.5);
        assert!((&red.sstar_r * &red.sstar_r).norm() < 1e-14);

        let cst = HardyFunction::from_real(&[2.0]).unwrap();
        let red = reduce(&build_hankel(&cst, 4), RANK_TOL).unwrap();
        assert_eq!(red.rank(), 1);
        assert!(red.sstar_r.norm() < 1e-15 && red.k2_r.norm() < 1e-15);
    }

    #[test]
    fn reduce_reports_missing_gap() {
        // eigenvalues ρ₊² ≈ 1.64 and ρ₋² ≈ 0.61 straddle a cutoff of 0.5·λ_max
        let u = HardyFunction::from_real(&[0.5, 1.0]).unwrap();
        match reduce(&build_hankel(&u, 4), 0.5) {
            Err(SzegoError::NoSpectralGap { above, below }) => assert!(above > below),
            other => panic!("expected gap error, got {other:?}"),
        }
    }

    #[test]
    fn lax_generator_examples() {
        let z = HardyFunction::zero(3);
        let (b, cc) = lax_generators(&build_hankel(&z, 3), &z);
        assert_eq!(b.norm() + cc.norm(), 0.0);
        let e1 = HardyFunction::monomial(1, c(1.0));
        let m = build_hankel(&e1, 4);
        let (b, _) = lax_generators(&m, &e1);
        let i = C64::new(0.0, 1.0);
        let expected = CMat::from_diagonal(&CVec::from_vec(vec![c(1.0), c(1.0), c(0.0), c(0.0)])) * (i * 0.5)
            - CMat::identity(4, 4) * i;
        assert!((b - expected).norm() < 1e-15);
    }

    #[test]
    fn hierarchy_generators_of_zero() {
        let y = 0.7;
        let z = HardyFunction::zero(4);
        let gens = hierarchy_generators(&build_hankel(&z, 4), y).unwrap();
        assert!((gens.w[0] - c(1.0)).norm() < 1e-15);
        // w = 1 turns w·Π(w̄h) into h, so only −y·I survives
        let expected = CMat::identity(4, 4) * c(-y);
        assert!((&gens.f - &expected).norm() < 1e-15);
        assert!((&gens.g - &expected).norm() < 1e-15);
        assert!(hierarchy_generators(&build_hankel(&z, 4), 0.0).is_err());
    }

    #[test]
    fn hierarchy_j_two_ways() {
        let eps: f64 = 0.5;
        let y = 1.3;
        let u = HardyFunction::from_real(&[eps, 1.0]).unwrap();
        let gens = hierarchy_generators(&build_hankel(&u, 2), y).unwrap();
        // (I + y M)^{-1} e0 for M = ((1+ε², ε), (ε, 1)) by the 2×2 inverse formula
        let (p, q, s) = (1.0 + y * (1.0 + eps * eps), y * eps, 1.0 + y);
        let det = p * s - q * q;
        assert!((gens.j_value() - s / det).abs() < 1e-14);
        assert!((gens.w[1].re + q / det).abs() < 1e-14);
    }

    #[test]
    fn cayley_rank_one_and_zero() {
        let rho2 = 2.5;
        let spec = SpectralData { values: vec![rho2, 0.0], vectors: CMat::identity(2, 2) };
        let a = cayley_resolvent(&spec, RANK_TOL);
        assert_eq!(a.len(), 2);
        assert!((a[0] - 1.0).abs() < 1e-15);
        assert!((a[1] + 1.0 / (1.0 + rho2)).abs() < 1e-15);
        let zero = SpectralData { values: vec![0.0; 3], vectors: CMat::identity(3, 3) };
        assert_eq!(cayley_resolvent(&zero, RANK_TOL), vec![1.0]);
        assert_eq!(elementary_symmetric(&[1.0, 2.0, 3.0]), vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn clustering() {
        let cl = cluster_values(&[1.0, 0.5, 1.0 + 5e-9, 2.0], CLUSTER_RADIUS);
        assert_eq!(cl.len(), 3);
        assert!((cl[1].point - (1.0 + 2.5e-9)).abs() < 1e-15);
    }
}
