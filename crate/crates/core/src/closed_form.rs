//! Closed-form solution from the datum u₀ = e^{ix} + ε, which stays in V(3):
//!
//! ```text
//! u(t, x) = (a(t) e^{ix} + b(t)) / (1 − p(t) e^{ix})
//! ```

use crate::hardy::{HardyFunction, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V3ClosedForm {
    pub a: C64,
    pub b: C64,
    pub p: C64,
    pub eps: f64,
    pub t: f64,
}

/// ω = (ε/2)√(4+ε²).
pub fn frequency(eps: f64) -> f64 {
    0.5 * eps * (4.0 + eps * eps).sqrt()
}

/// t^ε = π/(2ω), the first time |p| is maximal.
pub fn peak_time(eps: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 / frequency(eps)
}

pub fn closed_form_v3(eps: f64, t: f64) -> V3ClosedForm {
    if eps == 0.0 {
        return V3ClosedForm { a: C64::from_polar(1.0, -t), b: C64::new(0.0, 0.0), p: C64::new(0.0, 0.0), eps, t };
    }
    let e2 = eps * eps;
    let w = frequency(eps);
    let root = (4.0 + e2).sqrt();
    let (s, c) = (w * t).sin_cos();
    let a = C64::from_polar(1.0, -t * (1.0 + e2));
    let b = C64::from_polar(1.0, -t * (1.0 + e2 / 2.0)) * C64::new(eps * c, -(2.0 + e2) / root * s);
    let p = C64::new(0.0, -2.0 / root * s) * C64::from_polar(1.0, -t * e2 / 2.0);
    V3ClosedForm { a, b, p, eps, t }
}

impl V3ClosedForm {
    /// û(0) = b, û(n) = (a + bp) p^{n−1} for n ≥ 1.
    pub fn coefficients(&self, n: usize) -> HardyFunction {
        let lead = self.a + self.b * self.p;
        let mut out = Vec::with_capacity(n.max(1));
        out.push(self.b);
        let mut pk = C64::new(1.0, 0.0);
        for _ in 1..n {
            out.push(lead * pk);
            pk *= self.p;
        }
        HardyFunction::from_vec_unchecked(out)
    }

    /// μ_n = n |a + bp|² |p|^{2(n−1)}.
    pub fn momentum_density(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        n as f64 * (self.a + self.b * self.p).norm_sqr() * self.p.norm_sqr().powi(n as i32 - 1)
    }

    pub fn is_admissible(&self) -> bool {
        self.a.norm() > 0.0 && (self.a + self.b * self.p).norm() > 0.0 && self.p.norm() < 1.0
    }
}

/// μ_n(t^ε) = n ε⁴/(4+ε²)² (1 − ε²/(4+ε²))^{n−1}.
pub fn peak_momentum_density(eps: f64, n: usize) -> f64 {
    let e2 = eps * eps;
    let q = 1.0 - e2 / (4.0 + e2);
    n as f64 * e2 * e2 / (4.0 + e2).powi(2) * q.powi(n as i32 - 1)
}
