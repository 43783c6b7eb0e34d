//! Fixed-step classical RK4 in Fourier coefficients, used as an independent
//! oracle for the explicit formulas, with conservation monitoring.
//!
//! The state keeps N coefficients. The cubic term is computed exactly at
//! length 3N−2 and truncated back to N; that truncation is the only modeling
//! error and shows up as drift in the monitored invariants.

use crate::error::{Result, SzegoError};
use crate::hankel::{build_hankel, hankel_matrix};
use crate::hardy::{convolve, cubic_projection, HardyFunction, C64};
use crate::linalg::{conj, conj_vec, eigh_psd, solve_hpd, CMat, CVec};

#[derive(Debug, Clone, PartialEq)]
pub struct FlowObservation {
    pub t: f64,
    pub mass: f64,
    /// Σ n|û(n)|² = Tr K².
    pub momentum: f64,
    pub energy: f64,
    pub j_values: Vec<f64>,
    /// Largest deviation of the H² and K² eigenvalues from the reference.
    pub spectrum_drift: f64,
}

/// Sorted eigenvalues of H² and K² at some reference state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSnapshot {
    pub h2: Vec<f64>,
    pub k2: Vec<f64>,
}

impl SpectralSnapshot {
    pub fn of(u: &HardyFunction) -> Result<Self> {
        let model = build_hankel(u, u.len());
        Ok(Self { h2: model.h2_spectrum()?.values, k2: model.k2_spectrum()?.values })
    }

    pub fn max_deviation(&self, other: &Self) -> f64 {
        let dev = |a: &[f64], b: &[f64]| -> f64 {
            let n = a.len().max(b.len());
            (0..n)
                .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
                .fold(0.0, f64::max)
        };
        dev(&self.h2, &other.h2).max(dev(&self.k2, &other.k2))
    }
}

/// J^y(u) = ((I + yH²)⁻¹1 | 1) on the len(u)-mode section.
pub fn j_value(u: &HardyFunction, y: f64) -> Result<f64> {
    let model = build_hankel(u, u.len());
    let n = model.dim();
    let mut e0 = CVec::zeros(n);
    e0[0] = C64::new(1.0, 0.0);
    let w = solve_hpd(&(CMat::identity(n, n) + &model.h2 * C64::new(y, 0.0)), &e0)?;
    Ok(w[0].re)
}

/// All invariants of u computed from scratch; `spectrum_drift` is zero.
pub fn observe(u: &HardyFunction, ys: &[f64]) -> Result<FlowObservation> {
    observe_at(u, ys, 0.0, None)
}

/// Like [`observe`], with the spectrum drift measured against `reference`.
pub fn observe_at(
    u: &HardyFunction,
    ys: &[f64],
    t: f64,
    reference: Option<&SpectralSnapshot>,
) -> Result<FlowObservation> {
    let j_values = ys.iter().map(|&y| j_value(u, y)).collect::<Result<Vec<_>>>()?;
    let spectrum_drift = match reference {
        Some(r) => SpectralSnapshot::of(u)?.max_deviation(r),
        None => 0.0,
    };
    Ok(FlowObservation { t, mass: u.mass(), momentum: u.momentum(), energy: u.energy(), j_values, spectrum_drift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rk4Config {
    pub dt: f64,
    /// Observe every this many steps (0: only at the start and the end).
    pub observe_every: usize,
    /// Parameters y at which J^y is monitored.
    pub monitor_ys: Vec<f64>,
}

impl Rk4Config {
    pub fn new(dt: f64) -> Self {
        Self { dt, observe_every: 0, monitor_ys: Vec::new() }
    }
}

fn axpy(x: &[C64], h: f64, k: &[C64]) -> Vec<C64> {
    x.iter().zip(k).map(|(a, b)| a + b * h).collect()
}

/// Runs RK4 and hands (step, t, state) to `sink` at step 0, every
/// `every`-th step (0: never) and the last step.
fn integrate<F, S>(x0: &[C64], t_end: f64, dt: f64, every: usize, mut rhs: F, mut sink: S) -> Result<Vec<C64>>
where
    F: FnMut(&[C64]) -> Result<Vec<C64>>,
    S: FnMut(usize, f64, &[C64]) -> Result<()>,
{
    if !(dt > 0.0) || !dt.is_finite() || !t_end.is_finite() || t_end < 0.0 {
        return Err(SzegoError::InvalidArgument(format!("dt = {dt}, t_end = {t_end}")));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
    let h = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let mut x = x0.to_vec();
    sink(0, 0.0, &x)?;
    for step in 1..=steps {
        let k1 = rhs(&x)?;
        let k2 = rhs(&axpy(&x, 0.5 * h, &k1))?;
        let k3 = rhs(&axpy(&x, 0.5 * h, &k2))?;
        let k4 = rhs(&axpy(&x, h, &k3))?;
        let next: Vec<C64> = (0..x.len()).map(|i| x[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0)).collect();
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SzegoError::Blowup { last_good_t: (step - 1) as f64 * h });
        }
        x = next;
        if step == steps || (every > 0 && step % every == 0) {
            sink(step, step as f64 * h, &x)?;
        }
    }
    Ok(x)
}

fn observed<F>(u0: &HardyFunction, t_end: f64, cfg: &Rk4Config, rhs: F) -> Result<(HardyFunction, Vec<FlowObservation>)>
where
    F: FnMut(&[C64]) -> Result<Vec<C64>>,
{
    let reference = SpectralSnapshot::of(u0)?;
    let mut obs = Vec::new();
    let last = integrate(u0.coeffs(), t_end, cfg.dt, cfg.observe_every, rhs, |_, t, x| {
        let u = HardyFunction::from_vec_unchecked(x.to_vec());
        obs.push(observe_at(&u, &cfg.monitor_ys, t, Some(&reference))?);
        Ok(())
    })?;
    Ok((HardyFunction::from_vec_unchecked(last), obs))
}

fn szego_rhs(n: usize) -> impl FnMut(&[C64]) -> Result<Vec<C64>> {
    let mi = C64::new(0.0, -1.0);
    move |x| Ok(cubic_projection(x, n).into_iter().map(|z| z * mi).collect())
}

/// Integrates i u̇ = Π(|u|²u) on the len(u₀) modes of the datum.
pub fn rk4_szego(u0: &HardyFunction, t_end: f64, cfg: &Rk4Config) -> Result<(HardyFunction, Vec<FlowObservation>)> {
    observed(u0, t_end, cfg, szego_rhs(u0.len()))
}

/// States (t, u(t)) of the Szegő RK4 run at step 0, every `every` steps and
/// the last step.
pub fn rk4_szego_states(u0: &HardyFunction, t_end: f64, dt: f64, every: usize) -> Result<Vec<(f64, HardyFunction)>> {
    let mut states = Vec::new();
    integrate(u0.coeffs(), t_end, dt, every, szego_rhs(u0.len()), |_, t, x| {
        states.push((t, HardyFunction::from_vec_unchecked(x.to_vec())));
        Ok(())
    })?;
    Ok(states)
}

/// Vector field Σ_k a_k X_{J^{y_k}}(u), X_{J^y}(u) = 2iy w^y·H_u(w^y), on N modes.
pub fn hierarchy_field(x: &[C64], weights: &[f64], ys: &[f64]) -> Result<Vec<C64>> {
    let n = x.len();
    let u = HardyFunction::from_vec_unchecked(x.to_vec());
    let a = hankel_matrix(&u, n, 0);
    let h2 = &a * conj(&a);
    let mut e0 = CVec::zeros(n);
    e0[0] = C64::new(1.0, 0.0);
    let mut field = vec![C64::new(0.0, 0.0); n];
    for (&ak, &y) in weights.iter().zip(ys) {
        let w = solve_hpd(&(CMat::identity(n, n) + &h2 * C64::new(y, 0.0)), &e0)?;
        let hw = &a * conj_vec(&w);
        let prod = convolve(w.as_slice(), hw.as_slice());
        let scale = C64::new(0.0, 2.0 * y * ak);
        for (f, p) in field.iter_mut().zip(prod) {
            *f += p * scale;
        }
    }
    Ok(field)
}

/// Integrates u̇ = Σ_k a_k X_{J^{y_k}}(u) on the len(u₀) modes of the datum.
pub fn rk4_hierarchy(
    u0: &HardyFunction,
    t_end: f64,
    cfg: &Rk4Config,
    weights: &[f64],
    ys: &[f64],
) -> Result<(HardyFunction, Vec<FlowObservation>)> {
    if weights.len() != ys.len() || ys.iter().any(|&y| !(y > 0.0)) {
        return Err(SzegoError::InvalidParameters(format!("weights {weights:?}, ys {ys:?}")));
    }
    observed(u0, t_end, cfg, |x| hierarchy_field(x, weights, ys))
}

/// Eigenvalues of H² of a state, descending (exposed for rank monitoring).
pub fn h2_eigenvalues(u: &HardyFunction) -> Result<Vec<f64>> {
    Ok(eigh_psd(&build_hankel(u, u.len()).h2)?.values)
}
