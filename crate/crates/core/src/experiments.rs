//! Experiment drivers: the H^s instability of the family e^{ix} + ε, the
//! explicit-vs-RK4 comparison harness and the quasiperiodicity probe.
//!
//! Drivers return plain report structs; formatting is left to callers.

use rayon::prelude::*;

use crate::closed_form::{closed_form_v3, frequency, peak_time};
use crate::direct::{observe_at, rk4_szego_states, FlowObservation, SpectralSnapshot};
use crate::error::{Result, SzegoError};
use crate::explicit::{Propagator, SpectralFlow};
use crate::hankel::{vd_membership, vd_membership_section};
use crate::hardy::{norm_sobolev, HardyFunction, SobolevIndex, C64};

/// Rank tolerance used when classifying evolved states.
pub const VD_TOL: f64 = 1e-8;

// ---------------------------------------------------------------------------
// instability

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityConfig {
    pub epsilons: Vec<f64>,
    pub s: SobolevIndex,
    /// Fixed truncation; `None` extracts until the H^s tail is negligible.
    pub modes: Option<usize>,
    /// Largest admissible discarded L² mass at t^ε.
    pub tail_tol: f64,
    pub max_modes: usize,
    /// Samples of p^ε(t) per ε over one period [0, 2π/ω̃].
    pub trajectory_samples: usize,
}

impl InstabilityConfig {
    pub fn new(epsilons: Vec<f64>, s: SobolevIndex) -> Self {
        Self { epsilons, s, modes: None, tail_tol: 1e-8, max_modes: 1 << 23, trajectory_samples: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityPoint {
    pub eps: f64,
    pub t_peak: f64,
    pub modes: usize,
    /// Σ_{n ≥ modes} |û(n)|², exact from the formula.
    pub tail_mass: f64,
    pub norm_hs: f64,
    pub argmax_mu: usize,
    /// Range of n where n q^{n−1} is maximal (two values when tied).
    pub reference_argmax: (usize, usize),
    pub sum_mu: f64,
    pub closed_form_distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstabilityRow {
    Point(InstabilityPoint),
    Refused { eps: f64, modes: usize, tail_mass: f64, required_modes: Option<usize> },
}

impl InstabilityRow {
    pub fn eps(&self) -> f64 {
        match self {
            Self::Point(p) => p.eps,
            Self::Refused { eps, .. } => *eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PSample {
    pub eps: f64,
    pub t: f64,
    /// û(2)/û(1) of the explicit solution.
    pub p_explicit: C64,
    pub p_closed: C64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstabilityReport {
    pub rows: Vec<InstabilityRow>,
    /// Least-squares slope of log ‖u^ε(t^ε)‖_{H^s} against log(1/ε).
    pub slope: Option<f64>,
    pub trajectory: Vec<PSample>,
}

/// Discrete argmax set of f(n) = n q^{n−1}, n ≥ 1, found by brute force.
pub fn reference_argmax(q: f64, limit: usize) -> (usize, usize) {
    let logf = |n: usize| (n as f64).ln() + (n as f64 - 1.0) * q.ln();
    let mut best = (1, logf(1));
    for n in 2..=limit.max(1) {
        let v = logf(n);
        if v > best.1 {
            best = (n, v);
        }
    }
    let near = |n: usize| n >= 1 && n <= limit && logf(n) >= best.1 - 1e-9;
    let (mut lo, mut hi) = (best.0, best.0);
    while near(lo - 1) {
        lo -= 1;
    }
    while near(hi + 1) {
        hi += 1;
    }
    (lo, hi)
}

/// Smallest n with ‖Mⁿv‖² ≤ tol, if below `limit`.
fn required_modes(p: &Propagator, tol: f64, limit: usize) -> Option<usize> {
    let mut x = p.v.clone();
    for n in 0..=limit {
        if x.norm_squared() <= tol {
            return Some(n);
        }
        x = &p.m * x;
    }
    None
}

fn instability_point(eps: f64, cfg: &InstabilityConfig) -> Result<InstabilityRow> {
    if eps == 0.0 || !eps.is_finite() {
        return Err(SzegoError::InvalidArgument(format!("epsilon must be nonzero and finite, got {eps}")));
    }
    let u0 = HardyFunction::from_real(&[eps, 1.0])?;
    // range(H) of a degree-one polynomial lies in span{1, e^{ix}}: the 2×2
    // section is the exact model
    let flow = SpectralFlow::truncated(&u0, 2)?;
    let t = peak_time(eps);
    let prop = flow.propagator(t);
    let u = match cfg.modes {
        Some(n) => {
            let tail = prop.tail_mass(n);
            if tail > cfg.tail_tol {
                return Ok(InstabilityRow::Refused {
                    eps,
                    modes: n,
                    tail_mass: tail,
                    required_modes: required_modes(&prop, cfg.tail_tol, cfg.max_modes),
                });
            }
            prop.coefficients(n)
        }
        None => match prop.coefficients_to_tolerance(1e-10, cfg.s, cfg.max_modes) {
            Ok(u) => u,
            Err(SzegoError::Truncation { tail, modes, .. }) => {
                return Ok(InstabilityRow::Refused { eps, modes, tail_mass: tail, required_modes: None })
            }
            Err(e) => return Err(e),
        },
    };
    let n = u.len();
    let tail_mass = prop.tail_mass(n);
    let mut sum_mu = 0.0;
    let mut argmax = (0, 0.0);
    for (k, c) in u.coeffs().iter().enumerate() {
        let mu = k as f64 * c.norm_sqr();
        sum_mu += mu;
        if mu > argmax.1 {
            argmax = (k, mu);
        }
    }
    let e2 = eps * eps;
    let q = 1.0 - e2 / (4.0 + e2);
    Ok(InstabilityRow::Point(InstabilityPoint {
        eps,
        t_peak: t,
        modes: n,
        tail_mass,
        norm_hs: norm_sobolev(&u, cfg.s),
        argmax_mu: argmax.0,
        reference_argmax: reference_argmax(q, n),
        sum_mu,
        closed_form_distance: u.sub(&closed_form_v3(eps, t).coefficients(n)).norm_l2(),
    }))
}

fn p_trajectory(eps: f64, samples: usize) -> Result<Vec<PSample>> {
    let flow = SpectralFlow::truncated(&HardyFunction::from_real(&[eps, 1.0])?, 2)?;
    let period = std::f64::consts::TAU / frequency(eps);
    let count = samples.max(2);
    Ok((0..count)
        .map(|i| {
            let t = period * i as f64 / (count - 1) as f64;
            let c = flow.propagator(t).coefficients(3);
            PSample { eps, t, p_explicit: c.coeff(2) / c.coeff(1), p_closed: closed_form_v3(eps, t).p }
        })
        .collect())
}

/// Least-squares slope of y against x.
pub fn regression_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.len() != y.len() {
        return None;
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Evolves u₀^ε = e^{ix} + ε to t^ε by the explicit formula for every ε, in
/// parallel; row order follows the configuration.
pub fn run_instability(cfg: &InstabilityConfig) -> Result<InstabilityReport> {
    if cfg.epsilons.is_empty() {
        return Err(SzegoError::InvalidArgument("no epsilon values".into()));
    }
    if let Some(n) = cfg.modes {
        if n < 64 {
            return Err(SzegoError::InvalidArgument(format!("need at least 64 modes, got {n}")));
        }
    }
    let rows = cfg.epsilons.par_iter().map(|&e| instability_point(e, cfg)).collect::<Result<Vec<_>>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter_map(|r| match r {
            InstabilityRow::Point(p) => Some(((1.0 / p.eps.abs()).ln(), p.norm_hs.ln())),
            InstabilityRow::Refused { .. } => None,
        })
        .unzip();
    let trajectory =
        cfg.epsilons.par_iter().map(|&e| p_trajectory(e, cfg.trajectory_samples)).collect::<Result<Vec<_>>>()?.concat();
    Ok(InstabilityReport { rows, slope: regression_slope(&xs, &ys), trajectory })
}

// ---------------------------------------------------------------------------
// comparison

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub t_end: f64,
    pub dt: f64,
    /// RK4 truncation N; the explicit side is reported on the same modes.
    pub modes: usize,
    pub sample_every: f64,
    /// Whether to track invariants (two N×N eigenproblems per sample and flow).
    pub monitor: bool,
    pub monitor_ys: Vec<f64>,
}

impl CompareConfig {
    pub fn new(t_end: f64, dt: f64, modes: usize) -> Self {
        Self { t_end, dt, modes, sample_every: 0.1, monitor: true, monitor_ys: vec![0.5, 1.0, 2.0] }
    }
}

/// Absolute deviations of the monitored invariants from their t = 0 values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Drift {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    /// Largest over the monitored y.
    pub j: f64,
    pub spectrum: f64,
}

impl Drift {
    pub fn between(o0: &FlowObservation, o: &FlowObservation) -> Self {
        Self {
            mass: (o.mass - o0.mass).abs(),
            momentum: (o.momentum - o0.momentum).abs(),
            energy: (o.energy - o0.energy).abs(),
            j: o0.j_values.iter().zip(&o.j_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            spectrum: o.spectrum_drift,
        }
    }

    pub fn max(&self) -> f64 {
        self.mass.max(self.momentum).max(self.energy).max(self.j).max(self.spectrum)
    }

    fn merge(&self, other: &Self) -> Self {
        Self {
            mass: self.mass.max(other.mass),
            momentum: self.momentum.max(other.momentum),
            energy: self.energy.max(other.energy),
            j: self.j.max(other.j),
            spectrum: self.spectrum.max(other.spectrum),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    /// ‖explicit − RK4‖ in L² over the first N modes.
    pub distance: f64,
    pub explicit: Option<Drift>,
    pub rk4: Option<Drift>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub max_distance: f64,
    pub max_explicit_drift: Option<Drift>,
    pub max_rk4_drift: Option<Drift>,
}

/// Model for the explicit side: range(H_{u₀}) when it separates cleanly,
/// else the full section on len(u₀) modes (exact for polynomial data).
pub fn flow_for(u0: &HardyFunction) -> Result<SpectralFlow> {
    match SpectralFlow::reduced(u0, u0.len()) {
        Err(SzegoError::NoSpectralGap { .. }) => SpectralFlow::truncated(u0, u0.len()),
        other => other,
    }
}

/// Smallest N with ρᴺ ≤ `tol`, where ρ is the largest decay rate of the
/// explicit solution's coefficients on a 0.1-grid over [0, t_end]: the
/// truncation an N-mode integrator needs to resolve the orbit.
pub fn modes_for_horizon(flow: &SpectralFlow, t_end: f64, tol: f64) -> Result<usize> {
    if !(t_end >= 0.0) || !t_end.is_finite() || !(tol > 0.0 && tol < 1.0) {
        return Err(SzegoError::InvalidArgument(format!("t_end {t_end}, tol {tol}")));
    }
    let steps = (t_end / 0.1).ceil() as usize;
    let mut rho: f64 = 0.0;
    for k in 0..=steps {
        rho = rho.max(flow.propagator((0.1 * k as f64).min(t_end)).decay_rate()?);
    }
    if rho >= 1.0 {
        return Err(SzegoError::Truncation { tail: 1.0, modes: 0, required: usize::MAX });
    }
    Ok(if rho == 0.0 { 1 } else { (tol.ln() / rho.ln()).ceil() as usize })
}

/// Samples explicit and RK4 solutions every `sample_every` time units.
///
/// `u0` carries the datum to full accuracy; the RK4 run uses its first N
/// coefficients.
pub fn run_compare(u0: &HardyFunction, cfg: &CompareConfig) -> Result<CompareReport> {
    if cfg.modes == 0 || !(cfg.sample_every > 0.0) {
        return Err(SzegoError::InvalidArgument("modes and sampling interval must be positive".into()));
    }
    let steps_per_sample = ((cfg.sample_every / cfg.dt).round() as usize).max(1);
    let states = rk4_szego_states(&u0.resized(cfg.modes), cfg.t_end, cfg.dt, steps_per_sample)?;
    let flow = flow_for(u0)?;
    let explicit: Vec<HardyFunction> =
        states.par_iter().map(|(t, _)| flow.propagator(*t).coefficients(cfg.modes)).collect();

    let drifts: Vec<Option<(Drift, Drift)>> = if cfg.monitor {
        let reference_e = SpectralSnapshot::of(&explicit[0])?;
        let reference_r = SpectralSnapshot::of(&states[0].1)?;
        let obs = |u: &HardyFunction, t: f64, r: &SpectralSnapshot| observe_at(u, &cfg.monitor_ys, t, Some(r));
        let pairs = states
            .par_iter()
            .zip(&explicit)
            .map(|((t, ur), ue)| Ok((obs(ue, *t, &reference_e)?, obs(ur, *t, &reference_r)?)))
            .collect::<Result<Vec<_>>>()?;
        let (e0, r0) = pairs[0].clone();
        pairs.iter().map(|(oe, or)| Some((Drift::between(&e0, oe), Drift::between(&r0, or)))).collect()
    } else {
        vec![None; states.len()]
    };
    let rows: Vec<CompareRow> = states
        .iter()
        .zip(&explicit)
        .zip(&drifts)
        .map(|(((t, ur), ue), d)| CompareRow {
            t: *t,
            distance: ue.sub(ur).norm_l2(),
            explicit: d.map(|d| d.0),
            rk4: d.map(|d| d.1),
        })
        .collect();
    let max_distance = rows.iter().map(|r| r.distance).fold(0.0, f64::max);
    let merge = |pick: fn(&CompareRow) -> Option<Drift>| rows.iter().filter_map(pick).reduce(|a, b| a.merge(&b));
    let max_explicit_drift = merge(|r| r.explicit);
    let max_rk4_drift = merge(|r| r.rk4);
    Ok(CompareReport { rows, max_distance, max_explicit_drift, max_rk4_drift })
}

// ---------------------------------------------------------------------------
// quasiperiodicity

#[derive(Debug, Clone, PartialEq)]
pub struct QuasipConfig {
    pub horizon: f64,
    pub delta: f64,
    pub s: SobolevIndex,
    /// Grid step; default 2π/(64 λ_max) from the largest point of Σ.
    pub step: Option<f64>,
    pub windows: usize,
    /// H^s accuracy of each sampled state.
    pub coeff_tol: f64,
    pub max_modes: usize,
}

impl QuasipConfig {
    pub fn new(horizon: f64, delta: f64, s: SobolevIndex) -> Self {
        Self { horizon, delta, s, step: None, windows: 10, coeff_tol: 1e-10, max_modes: 1 << 20 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasipSample {
    pub t: f64,
    pub norm_hs: f64,
    pub distance_h1: f64,
    pub vd: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasipReport {
    pub samples: Vec<QuasipSample>,
    pub step: f64,
    pub vd0: usize,
    pub vd_constant: bool,
    pub norm0: f64,
    pub sup_norm: f64,
    pub window_maxima: Vec<f64>,
    /// No window after the first exceeds the first window's maximum by
    /// more than a relative 1e−3.
    pub bounded: bool,
    /// Smallest H¹ distance to u₀ once the orbit has turned back towards it
    /// (refined local minima and later grid samples); NaN if it never does.
    pub best_recurrence: (f64, f64),
    /// Earliest refined time with distance below δ.
    pub recurrence: Option<(f64, f64)>,
}

struct QuasipEval<'a> {
    flow: &'a SpectralFlow,
    u0: &'a HardyFunction,
    cfg: &'a QuasipConfig,
    h1: SobolevIndex,
    /// Index controlling the extraction accuracy: the larger of s and 1.
    accuracy: SobolevIndex,
    section: usize,
}

impl QuasipEval<'_> {
    fn state(&self, t: f64) -> Result<HardyFunction> {
        self.flow.propagator(t).coefficients_to_tolerance(self.cfg.coeff_tol, self.accuracy, self.cfg.max_modes)
    }

    fn distance(&self, t: f64) -> Result<f64> {
        Ok(norm_sobolev(&self.state(t)?.sub(self.u0), self.h1))
    }

    fn sample(&self, t: f64) -> Result<QuasipSample> {
        let u = self.state(t)?;
        Ok(QuasipSample {
            t,
            norm_hs: norm_sobolev(&u, self.cfg.s),
            distance_h1: norm_sobolev(&u.sub(self.u0), self.h1),
            vd: vd_membership_section(&u, self.section, VD_TOL),
        })
    }

    /// Golden-section minimization of the distance on [a, b].
    fn refine(&self, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        let (mut fc, mut fd) = (self.distance(c)?, self.distance(d)?);
        for _ in 0..60 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = self.distance(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = self.distance(d)?;
            }
            if b - a < 1e-10 * b.abs().max(1.0) {
                break;
            }
        }
        Ok(if fc < fd { (c, fc) } else { (d, fd) })
    }
}

/// Samples u(t) on a grid over [0, T] by the explicit formula, tracks the H^s
/// norm and the V(d) class, and searches for a near-recurrence
/// ‖u(t*) − u₀‖_{H¹} < δ (grid search, then local refinement of the best
/// grid minima).
pub fn run_quasip(u0: &HardyFunction, cfg: &QuasipConfig) -> Result<QuasipReport> {
    if !(cfg.horizon > 0.0) || !cfg.horizon.is_finite() || !(cfg.delta > 0.0) || cfg.windows == 0 {
        return Err(SzegoError::InvalidArgument("horizon, delta and window count must be positive".into()));
    }
    let vd0 = vd_membership(u0, VD_TOL).ok_or(SzegoError::ZeroRank)?;
    let flow = flow_for(u0)?;
    let lambda_max = flow.joint_spectrum().last().map(|c| c.point).unwrap_or(0.0);
    let step = match cfg.step {
        Some(h) if h > 0.0 => h,
        Some(h) => return Err(SzegoError::InvalidArgument(format!("step {h} is not positive"))),
        None if lambda_max > 0.0 => std::f64::consts::TAU / (64.0 * lambda_max),
        None => cfg.horizon,
    };
    let h1 = SobolevIndex::new(1.0)?;
    let accuracy = if cfg.s.value() > 1.0 { cfg.s } else { h1 };
    let eval = QuasipEval { flow: &flow, u0, cfg, h1, accuracy, section: vd0.div_ceil(2) + 4 };

    let count = (cfg.horizon / step).floor() as usize + 1;
    let samples = (0..count).into_par_iter().map(|i| eval.sample(i as f64 * step)).collect::<Result<Vec<_>>>()?;

    let norm0 = norm_sobolev(u0, cfg.s);
    let sup_norm = samples.iter().map(|s| s.norm_hs).fold(norm0, f64::max);
    let per = count.div_ceil(cfg.windows);
    let window_maxima: Vec<f64> =
        samples.chunks(per).map(|w| w.iter().map(|s| s.norm_hs).fold(0.0, f64::max)).collect();
    let bounded = window_maxima.iter().skip(1).all(|&m| m <= window_maxima[0] * (1.0 + 1e-3));
    let vd_constant = samples.iter().all(|s| s.vd == Some(vd0));

    // interior grid minima, best first; the orbit leaves u₀ at t = 0
    let mut minima: Vec<usize> = (1..count.saturating_sub(1))
        .filter(|&i| {
            samples[i].distance_h1 <= samples[i - 1].distance_h1 && samples[i].distance_h1 <= samples[i + 1].distance_h1
        })
        .collect();
    minima.sort_by(|&a, &b| samples[a].distance_h1.total_cmp(&samples[b].distance_h1));
    minima.truncate(32);
    let refined =
        minima.par_iter().map(|&i| eval.refine(samples[i - 1].t, samples[i + 1].t)).collect::<Result<Vec<_>>>()?;
    // Grid samples count only once the orbit has turned back towards u₀.
    let first_max = (1..count.saturating_sub(1))
        .find(|&i| {
            samples[i].distance_h1 >= samples[i - 1].distance_h1 && samples[i].distance_h1 > samples[i + 1].distance_h1
        })
        .unwrap_or(count);
    let best_recurrence = refined
        .iter()
        .copied()
        .chain(samples.iter().skip(first_max).map(|s| (s.t, s.distance_h1)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((f64::NAN, f64::NAN));
    let recurrence = refined.iter().copied().filter(|r| r.1 < cfg.delta).min_by(|a, b| a.0.total_cmp(&b.0));

    Ok(QuasipReport {
        samples,
        step,
        vd0,
        vd_constant,
        norm0,
        sup_norm,
        window_maxima,
        bounded,
        best_recurrence,
        recurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_reference_detects_ties() {
        // q = 1 − ε²/(4+ε²) with ε = 1/2: f(16) = f(17)
        let q = 1.0 - 0.25 / 4.25;
        assert_eq!(reference_argmax(q, 1000), (16, 17));
        assert_eq!(reference_argmax(0.5, 100), (1, 2));
        assert_eq!(reference_argmax(0.2, 100), (1, 1));
    }

    #[test]
    fn slope_of_a_line() {
        assert!((regression_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(regression_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn instability_single_point() {
        let cfg = InstabilityConfig::new(vec![0.25], SobolevIndex::new(1.0).unwrap());
        let report = run_instability(&cfg).unwrap();
        let InstabilityRow::Point(p) = &report.rows[0] else { panic!("refused") };
        assert!((p.sum_mu - 1.0).abs() < 1e-8);
        assert!(p.argmax_mu >= p.reference_argmax.0 && p.argmax_mu <= p.reference_argmax.1);
        assert!(p.closed_form_distance < 1e-10);
        assert!(report
            .trajectory
            .iter()
            .all(|s| (s.p_explicit - s.p_closed).norm() < 1e-10 || s.p_closed.norm() < 1e-12));
    }

    #[test]
    fn instability_refuses_short_truncation() {
        let mut cfg = InstabilityConfig::new(vec![0.125], SobolevIndex::new(1.0).unwrap());
        cfg.modes = Some(64);
        match &run_instability(&cfg).unwrap().rows[0] {
            InstabilityRow::Refused { required_modes: Some(n), tail_mass, .. } => {
                assert!(*tail_mass > 1e-8);
                assert!(*n > 64);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
        cfg.modes = Some(10);
        assert!(run_instability(&cfg).is_err());
    }

    #[test]
    fn phase_rotation_recurs() {
        let u0 = HardyFunction::monomial(1, C64::new(1.0, 0.0));
        let mut cfg = QuasipConfig::new(7.0, 1e-6, SobolevIndex::new(1.0).unwrap());
        cfg.step = Some(0.1);
        let r = run_quasip(&u0, &cfg).unwrap();
        assert_eq!(r.vd0, 3);
        assert!(r.vd_constant);
        assert!((r.sup_norm - r.norm0).abs() < 1e-12);
        let (t, d) = r.recurrence.unwrap();
        assert!((t - std::f64::consts::TAU).abs() < 1e-6 && d < 1e-6);
    }

    #[test]
    fn horizon_modes_track_the_peak_decay_rate() {
        let rotation = flow_for(&HardyFunction::monomial(1, C64::new(1.0, 0.0))).unwrap();
        assert_eq!(modes_for_horizon(&rotation, 10.0, 1e-12).unwrap(), 1);
        // |p| peaks at 2/√4.25 at t = π/(2ω̃) ≈ 3.05
        let flow = SpectralFlow::truncated(&HardyFunction::from_real(&[0.5, 1.0]).unwrap(), 2).unwrap();
        let n = modes_for_horizon(&flow, 10.0, 1e-12).unwrap();
        let ideal = 1e-12f64.ln() / (2.0 / 4.25f64.sqrt()).ln();
        // the 0.1-grid may straddle the peak
        assert!((n as f64 / ideal - 1.0).abs() < 0.01, "{n} vs {ideal}");
        assert!(modes_for_horizon(&flow, 1.0, 1e-12).unwrap() < n / 2);
        assert!(modes_for_horizon(&flow, 1.0, 2.0).is_err());
    }

    #[test]
    fn compare_phase_rotation_is_exact() {
        let u0 = HardyFunction::monomial(1, C64::new(1.0, 0.0));
        let r = run_compare(&u0, &CompareConfig::new(1.0, 1e-3, 8)).unwrap();
        assert_eq!(r.rows.len(), 11);
        assert!(r.max_distance < 1e-10);
        assert!(r.max_rk4_drift.unwrap().max() < 1e-10);
    }
}
