//! Random test data shared by the integration suites.
#![allow(dead_code)]

pub mod identities;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use szego_core::{rational_to_coeffs, HardyFunction, RationalSymbol, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Point of the disc with modulus in [lo, hi].
pub fn in_annulus(rng: &mut impl Rng, lo: f64, hi: f64) -> C64 {
    C64::from_polar(rng.gen_range(lo..=hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

pub fn trig_poly(rng: &mut impl Rng, len: usize) -> HardyFunction {
    HardyFunction::new((0..len).map(|_| complex(rng)).collect()).unwrap()
}

/// ∏ (1 − β_j z), ascending coefficients.
pub fn denominator(inverse_roots: &[C64]) -> Vec<C64> {
    let mut b = vec![C64::new(1.0, 0.0)];
    for beta in inverse_roots {
        let mut next = vec![C64::new(0.0, 0.0); b.len() + 1];
        for (k, c) in b.iter().enumerate() {
            next[k] += c;
            next[k + 1] -= c * beta;
        }
        b = next;
    }
    b
}

/// Random symbol of V(d) whose inverse roots have modulus in [0.1, max_inv_root].
pub fn random_symbol(rng: &mut impl Rng, d: usize, max_inv_root: f64) -> RationalSymbol {
    let m = d / 2;
    let deg_a = if d % 2 == 1 { m } else { m.saturating_sub(1) };
    loop {
        let betas: Vec<C64> = (0..m).map(|_| in_annulus(rng, 0.1, max_inv_root)).collect();
        let mut a: Vec<C64> = (0..=deg_a).map(|_| complex(rng)).collect();
        if a[deg_a].norm() < 0.2 {
            a[deg_a] = C64::new(0.5, 0.0);
        }
        if let Ok(r) = RationalSymbol::new(a, denominator(&betas), d) {
            return r;
        }
    }
}

/// The symbol rescaled to L² norm `norm`, as n coefficients.
pub fn scaled_coeffs(r: &RationalSymbol, n: usize, norm: f64) -> HardyFunction {
    let u = rational_to_coeffs(r, n);
    u.scale(C64::new(norm / u.norm_l2(), 0.0))
}
