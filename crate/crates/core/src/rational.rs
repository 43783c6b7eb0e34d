//! Rational symbols u = A(e^{ix})/B(e^{ix}) and the maps to and from
//! Fourier coefficients.

use nalgebra::DMatrix;

use crate::error::{Result, SzegoError};
use crate::hardy::{HardyFunction, SobolevIndex, C64};
use crate::linalg::poly_roots;

/// Tolerance for root-based invariant checks.
pub const ROOT_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct RationalSymbol {
    a: Vec<C64>,
    b: Vec<C64>,
    d: usize,
}

/// Maximal degrees (deg A, deg B) allowed in V(d).
pub fn degree_bounds(d: usize) -> (usize, usize) {
    // d = 2m: deg A ≤ m−1, deg B = m;  d = 2m+1: deg A = m, deg B ≤ m
    ((d - 1) / 2, d / 2)
}

fn degree(p: &[C64]) -> Option<usize> {
    p.iter().rposition(|c| *c != ZERO)
}

fn trimmed(mut p: Vec<C64>) -> Vec<C64> {
    let len = degree(&p).map_or(1, |d| d + 1);
    p.truncate(len);
    if p.is_empty() {
        p.push(ZERO);
    }
    p
}

impl RationalSymbol {
    /// Validates the V(d) invariants: B(0) = 1, no root of B in the closed
    /// disc, A and B coprime, and the degree pattern for d.
    pub fn new(a: Vec<C64>, b: Vec<C64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(SzegoError::ZeroRank);
        }
        for (index, c) in a.iter().chain(&b).enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(SzegoError::NonFinite { index });
            }
        }
        let a = trimmed(a);
        let b = trimmed(b);
        if (b[0] - C64::new(1.0, 0.0)).norm() > 1e-14 {
            return Err(SzegoError::BNotNormalized(format!("{}", b[0])));
        }
        let deg_a = degree(&a);
        let deg_b = degree(&b).unwrap_or(0);
        let (max_a, max_b) = degree_bounds(d);
        let pattern_ok = match deg_a {
            None => false,
            Some(da) if d.is_multiple_of(2) => da <= max_a && deg_b == max_b,
            Some(da) => da == max_a && deg_b <= max_b,
        };
        if !pattern_ok {
            return Err(SzegoError::DegreePattern { d, deg_a: deg_a.unwrap_or(0), deg_b });
        }
        let roots_b = poly_roots(&b)?;
        if let Some(r) = roots_b.iter().find(|r| r.norm() <= 1.0 + ROOT_TOL) {
            return Err(SzegoError::RootInsideDisc { modulus: r.norm(), tol: ROOT_TOL });
        }
        let roots_a = poly_roots(&a)?;
        for ra in &roots_a {
            for rb in &roots_b {
                let distance = (ra - rb).norm();
                if distance <= ROOT_TOL * rb.norm().max(1.0) {
                    return Err(SzegoError::CommonFactor { root: format!("{rb}"), distance });
                }
            }
        }
        Ok(Self { a, b, d })
    }

    pub fn numerator(&self) -> &[C64] {
        &self.a
    }

    pub fn denominator(&self) -> &[C64] {
        &self.b
    }

    pub fn rank_index(&self) -> usize {
        self.d
    }

    /// ρ = max |root(B)|⁻¹ < 1, the geometric decay rate of the coefficients.
    pub fn decay_rate(&self) -> f64 {
        poly_roots(&self.b).map(|roots| roots.iter().map(|r| 1.0 / r.norm()).fold(0.0, f64::max)).unwrap_or(1.0)
    }

    pub fn eval(&self, z: C64) -> C64 {
        let horner = |p: &[C64]| p.iter().rev().fold(ZERO, |acc, c| acc * z + c);
        horner(&self.a) / horner(&self.b)
    }
}

/// First `n` Fourier coefficients from the recurrence Σ_j B_j c_{k−j} = A_k.
pub fn rational_to_coeffs(r: &RationalSymbol, n: usize) -> HardyFunction {
    let mut c = Vec::with_capacity(n.max(1));
    for k in 0..n.max(1) {
        let mut acc = r.a.get(k).copied().unwrap_or(ZERO);
        for (j, bj) in r.b.iter().enumerate().skip(1) {
            if j > k {
                break;
            }
            acc -= bj * c[k - j];
        }
        c.push(acc);
    }
    HardyFunction::from_vec_unchecked(c)
}

/// Smallest N (at least `min_modes`) whose discarded tail satisfies
/// Σ_{k≥N} |c_k|²(1+k²)^s < tol², estimated from the geometric decay of the
/// computed coefficients.
pub fn default_modes(r: &RationalSymbol, s: SobolevIndex, tol: f64, min_modes: usize) -> usize {
    let rho = r.decay_rate();
    if rho == 0.0 {
        return rational_to_coeffs(r, r.a.len()).len().max(min_modes).max(1);
    }
    let window = 8 * r.b.len();
    let mut n = min_modes.max(window).max(16);
    loop {
        let c = rational_to_coeffs(r, n);
        let recent = c.coeffs()[n - window..].iter().map(|z| z.norm()).fold(0.0, f64::max);
        // inflate ρ to absorb polynomial factors from repeated roots and the weight
        let rate = (rho * (1.0 + 4.0 / n as f64)).min(0.5 * (1.0 + rho));
        let tail = recent * recent * s.weight(n) * rate * rate
            / (1.0 - rate * rate)
            / (1.0 - rate * rate).powf(2.0 * s.value());
        if tail < tol * tol || n > 1 << 22 {
            return n;
        }
        n = (n as f64 * 1.25) as usize + 1;
    }
}

/// Recovers (A, B) from coefficients assumed to lie in V(d).
///
/// B = (1, b₁..b_m) solves Σ_j B_j c_{k−j} = 0 for k > deg A in least squares
/// with singular values below `tol·σ_max` discarded; A is read off the
/// low-order rows. A residual above `tol` means the data is not close to
/// V(d) and is reported as [`SzegoError::NotInVd`]; violations of the symbol
/// invariants by the recovered pair come back as the constructor's errors.
pub fn coeffs_to_rational(u: &HardyFunction, d: usize, tol: f64) -> Result<RationalSymbol> {
    if d == 0 {
        return Err(SzegoError::ZeroRank);
    }
    let (na, nb) = degree_bounds(d);
    let c = u.coeffs();
    let n = c.len();
    let scale = u.norm_l2().max(f64::MIN_POSITIVE);
    let at = |k: isize| if k < 0 { ZERO } else { c.get(k as usize).copied().unwrap_or(ZERO) };

    let rows: Vec<usize> = ((na + 1)..n).collect();
    let mut b = vec![C64::new(1.0, 0.0)];
    if nb > 0 && !rows.is_empty() {
        let m = DMatrix::from_fn(rows.len(), nb, |i, j| at(rows[i] as isize - (j as isize + 1)));
        let rhs = DMatrix::from_fn(rows.len(), 1, |i, _| -at(rows[i] as isize));
        let svd = m.clone().svd(true, true);
        let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let sol = svd
            .solve(&rhs, tol * smax.max(f64::MIN_POSITIVE))
            .map_err(|e| SzegoError::InvalidArgument(e.to_string()))?;
        b.extend(sol.iter().copied());
    } else {
        b.extend(std::iter::repeat_n(ZERO, nb));
    }

    let a: Vec<C64> =
        (0..=na).map(|k| b.iter().enumerate().map(|(j, bj)| bj * at(k as isize - j as isize)).sum()).collect();

    let residual = rows
        .iter()
        .map(|&k| b.iter().enumerate().map(|(j, bj)| bj * at(k as isize - j as isize)).sum::<C64>().norm_sqr())
        .sum::<f64>()
        .sqrt()
        / scale;
    if residual > tol {
        return Err(SzegoError::NotInVd { d, tol, residual });
    }

    let clean = |p: Vec<C64>| -> Vec<C64> {
        let pscale = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
        p.into_iter().map(|z| if z.norm() <= tol * pscale { ZERO } else { z }).collect()
    };
    let mut b = clean(b);
    b[0] = C64::new(1.0, 0.0);
    RationalSymbol::new(clean(a), b, d)
}
