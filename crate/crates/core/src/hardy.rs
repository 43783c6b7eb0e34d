//! Truncated elements of the Hardy space L²₊(T).
//!
//! A [`HardyFunction`] stores the Fourier coefficients c₀..c_{N−1} of
//! Σ c_k e^{ikx}; everything at k ≥ N is zero. The Haar measure is normalized
//! so that the monomials are orthonormal, hence all inner products and norms
//! are plain sums over coefficients.

use num_complex::Complex64;

use crate::error::{Result, SzegoError};

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct HardyFunction {
    coeffs: Vec<C64>,
}

impl HardyFunction {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SzegoError::EmptySequence);
        }
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SzegoError::NonFinite { index });
        }
        Ok(Self { coeffs })
    }

    /// Wraps coefficients already known to be finite; an empty input becomes
    /// the zero function of length one.
    pub(crate) fn from_vec_unchecked(mut coeffs: Vec<C64>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zero(len: usize) -> Self {
        Self::from_vec_unchecked(vec![ZERO; len.max(1)])
    }

    /// c·e^{ikx}, stored with length k+1.
    pub fn monomial(k: usize, c: C64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Coefficient of e^{ikx}; zero beyond the stored length.
    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    /// Zero-pads or truncates to exactly `len` coefficients.
    pub fn resized(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len.max(1), ZERO);
        Self { coeffs }
    }

    pub fn scale(&self, lambda: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * lambda).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self { coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect() }
    }

    pub fn norm_l2(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Σ k|c_k|², the trace of K_u².
    pub fn momentum(&self) -> f64 {
        self.coeffs.iter().enumerate().map(|(k, c)| k as f64 * c.norm_sqr()).sum()
    }

    /// E(u) = ¼∫|u|⁴ = ¼‖u²‖², since u² is again holomorphic.
    pub fn energy(&self) -> f64 {
        0.25 * convolve(&self.coeffs, &self.coeffs).iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// Value of the holomorphic extension Σ c_k z^k.
    pub fn eval_disc(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }
}

/// A two-sided trigonometric polynomial Σ_{k=min}^{min+len−1} c_k e^{ikx}.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoSided {
    min_freq: i64,
    coeffs: Vec<C64>,
}

impl TwoSided {
    pub fn new(min_freq: i64, coeffs: Vec<C64>) -> Self {
        Self { min_freq, coeffs }
    }

    pub fn from_hardy(u: &HardyFunction) -> Self {
        Self { min_freq: 0, coeffs: u.coeffs.clone() }
    }

    pub fn min_freq(&self) -> i64 {
        self.min_freq
    }

    pub fn max_freq(&self) -> i64 {
        self.min_freq + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> C64 {
        let j = k - self.min_freq;
        if j < 0 {
            return ZERO;
        }
        self.coeffs.get(j as usize).copied().unwrap_or(ZERO)
    }

    /// The function x ↦ conj(f(x)): ĉ(k) = conj(c(−k)).
    pub fn conj(&self) -> Self {
        let coeffs = self.coeffs.iter().rev().map(|c| c.conj()).collect();
        Self { min_freq: -self.max_freq(), coeffs }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self { min_freq: 0, coeffs: Vec::new() };
        }
        Self { min_freq: self.min_freq + other.min_freq, coeffs: convolve(&self.coeffs, &other.coeffs) }
    }

    /// |u|² for u ∈ L²₊.
    pub fn abs_sq(u: &HardyFunction) -> Self {
        let f = Self::from_hardy(u);
        f.mul(&f.conj())
    }
}

/// Szegő projector: keeps the nonnegative frequencies.
pub fn project_szego(f: &TwoSided) -> HardyFunction {
    let max = f.max_freq();
    if max < 0 {
        return HardyFunction::zero(1);
    }
    HardyFunction::from_vec_unchecked((0..=max).map(|k| f.coeff(k)).collect())
}

/// (u|v) = Σ c_k(u) conj(c_k(v)).
pub fn inner(u: &HardyFunction, v: &HardyFunction) -> C64 {
    u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b.conj()).sum()
}

/// S: multiplication by e^{ix}.
pub fn shift(u: &HardyFunction) -> HardyFunction {
    let mut coeffs = Vec::with_capacity(u.len() + 1);
    coeffs.push(ZERO);
    coeffs.extend_from_slice(&u.coeffs);
    HardyFunction { coeffs }
}

/// S*: drops the constant term.
pub fn shift_adjoint(u: &HardyFunction) -> HardyFunction {
    HardyFunction::from_vec_unchecked(u.coeffs[1..].to_vec())
}

/// Acyclic convolution of two coefficient sequences, O(len_a · len_b).
pub fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == ZERO {
            continue;
        }
        for (o, y) in out[i..].iter_mut().zip(b) {
            *o += x * y;
        }
    }
    out
}

/// First `out_len` coefficients of Π(|u|²u) = Π(u·u·ū).
pub(crate) fn cubic_projection(u: &[C64], out_len: usize) -> Vec<C64> {
    let sq = convolve(u, u);
    (0..out_len)
        .map(|k| {
            // Π(u² ū)(k) = Σ_j (u²)(k+j) conj(u_j)
            let mut acc = ZERO;
            for (j, uj) in u.iter().enumerate() {
                match sq.get(k + j) {
                    Some(s) => acc += s * uj.conj(),
                    None => break,
                }
            }
            acc
        })
        .collect()
}

/// How the output of the cubic nonlinearity is truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retruncate {
    /// Keep all 2N−1 coefficients produced by a length-N input.
    Exact,
    /// Keep the first `n` coefficients.
    To(usize),
}

/// Right-hand side of i u̇ = Π(|u|²u), i.e. −i Π(|u|²u).
pub fn cubic_szego_rhs(u: &HardyFunction, policy: Retruncate) -> HardyFunction {
    let out_len = match policy {
        Retruncate::Exact => 2 * u.len() - 1,
        Retruncate::To(n) => n.max(1),
    };
    let mi = C64::new(0.0, -1.0);
    let coeffs = cubic_projection(&u.coeffs, out_len).into_iter().map(|c| c * mi).collect();
    HardyFunction::from_vec_unchecked(coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SobolevIndex(f64);

impl SobolevIndex {
    pub fn new(s: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(SzegoError::NegativeSobolev(s));
        }
        Ok(Self(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn weight(self, k: usize) -> f64 {
        (1.0 + (k as f64).powi(2)).powf(self.0)
    }
}

/// (Σ |c_k|² (1+k²)^s)^{1/2}.
pub fn norm_sobolev(u: &HardyFunction, s: SobolevIndex) -> f64 {
    u.coeffs.iter().enumerate().map(|(k, c)| c.norm_sqr() * s.weight(k)).sum::<f64>().sqrt()
}

/// Wiener algebra norm Σ |c_k|.
pub fn norm_wiener(u: &HardyFunction) -> f64 {
    u.coeffs.iter().map(|c| c.norm()).sum()
}

/// μ_n = n |c_n|².
pub fn momentum_density(u: &HardyFunction, n: usize) -> f64 {
    n as f64 * u.coeff(n).norm_sqr()
}
