//! Operator identities checked on the truncation-exact block.
//!
//! Symbols are polynomials of degree ≤ m and test vectors live on the first
//! L modes. With N ≥ L + 3m + 2 every finite section below acts exactly, so
//! the identities must hold to rounding. Each function returns
//! ‖LHS − RHS‖ / (largest term norm).

use rand::Rng;
use szego_core::hankel::{hankel_matrix, hierarchy_generators};
use szego_core::linalg::{conj_vec, CMat, CVec};
use szego_core::{build_hankel, build_toeplitz, inner, project_szego, HardyFunction, TwoSided, C64};

use super::{complex, trig_poly};

pub const SUPPORT: usize = 6;

pub fn size(m: usize) -> usize {
    SUPPORT + 3 * m + 2
}

fn test_vector(rng: &mut impl Rng, n: usize) -> CVec {
    CVec::from_fn(n, |k, _| if k < SUPPORT { complex(rng) } else { C64::new(0.0, 0.0) })
}

fn ts(u: &HardyFunction) -> TwoSided {
    TwoSided::from_hardy(u)
}

fn relative(lhs: &CVec, terms: &[&CVec]) -> f64 {
    let mut rhs = CVec::zeros(lhs.len());
    let mut scale = lhs.norm();
    for t in terms {
        rhs += *t;
        scale = scale.max(t.norm());
    }
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / scale
    }
}

/// ‖K² − H² + uu*‖/‖H²‖.
pub fn rank_one(rng: &mut impl Rng, m: usize) -> f64 {
    let u = trig_poly(rng, m + 1);
    build_hankel(&u, size(m)).rank_one_defect()
}

/// H_{Π(|u|²u)} = T_{|u|²}H_u + H_u T_{|u|²} − H_u³, or the same with K when
/// `shifted`.
pub fn cubic(rng: &mut impl Rng, m: usize, shifted: bool) -> f64 {
    let n = size(m);
    let u = trig_poly(rng, m + 1);
    let offset = usize::from(shifted);
    let v = project_szego(&TwoSided::abs_sq(&u).mul(&ts(&u)));
    let av = hankel_matrix(&v, n, offset);
    let a = hankel_matrix(&u, n, offset);
    let t = build_toeplitz(&TwoSided::abs_sq(&u), n);
    let h = test_vector(rng, n);
    let ah = &a * conj_vec(&h);
    let lhs = &av * conj_vec(&h);
    let t1 = &t * &ah;
    let t2 = &a * conj_vec(&(&t * &h));
    let t3 = -(&a * conj_vec(&(&a * conj_vec(&ah))));
    relative(&lhs, &[&t1, &t2, &t3])
}

/// H_{Π(a b̄ c)} = T_{ab̄}H_c + H_a T_{bc̄} − H_a H_b H_c.
pub fn triple(rng: &mut impl Rng, m: usize) -> f64 {
    let n = size(m);
    let (a, b, c) = (trig_poly(rng, m + 1), trig_poly(rng, m + 1), trig_poly(rng, m + 1));
    let s = project_szego(&ts(&a).mul(&ts(&b).conj()).mul(&ts(&c)));
    let (ha, hb, hc) = (hankel_matrix(&a, n, 0), hankel_matrix(&b, n, 0), hankel_matrix(&c, n, 0));
    let t_ab = build_toeplitz(&ts(&a).mul(&ts(&b).conj()), n);
    let t_bc = build_toeplitz(&ts(&b).mul(&ts(&c).conj()), n);
    let h = test_vector(rng, n);
    let lhs = hankel_matrix(&s, n, 0) * conj_vec(&h);
    let hch = &hc * conj_vec(&h);
    let t1 = &t_ab * &hch;
    let t2 = &ha * conj_vec(&(&t_bc * &h));
    let t3 = -(&ha * conj_vec(&(&hb * conj_vec(&hch))));
    relative(&lhs, &[&t1, &t2, &t3])
}

fn hankel_apply(u: &HardyFunction, h: &HardyFunction) -> HardyFunction {
    project_szego(&ts(u).mul(&ts(h).conj()))
}

fn as_vec(u: &HardyFunction, n: usize) -> CVec {
    CVec::from_fn(n, |k, _| u.coeff(k))
}

/// H_{aH_u(a)}(h) = H_u(a)·H_a(h) + H_u(aΠ(āh) − (h|a)a), in exact
/// polynomial arithmetic.
pub fn product_rule(rng: &mut impl Rng, m: usize) -> f64 {
    let (a, u, h) = (trig_poly(rng, m + 1), trig_poly(rng, m + 1), trig_poly(rng, SUPPORT));
    let hua = hankel_apply(&u, &a);
    let symbol = project_szego(&ts(&a).mul(&ts(&hua)));
    let n = 4 * (m + SUPPORT);
    let lhs = as_vec(&hankel_apply(&symbol, &h), n);
    let t1 = as_vec(&project_szego(&ts(&hua).mul(&ts(&hankel_apply(&a, &h)))), n);
    let pa = project_szego(&ts(&a).conj().mul(&ts(&h)));
    let inner_term = project_szego(&ts(&a).mul(&ts(&pa))).sub(&a.scale(inner(&h, &a)));
    let t2 = as_vec(&hankel_apply(&u, &inner_term), n);
    relative(&lhs, &[&t1, &t2])
}

/// H_{iX}(h) = (H F + F H)(h) and K_{iX}(h) = (K G + G K)(h) with
/// iX = i·X_{J^y}(u); returns the worse of the two.
pub fn hierarchy(rng: &mut impl Rng, m: usize, y: f64) -> f64 {
    let n = size(m);
    let u = trig_poly(rng, m + 1);
    let model = build_hankel(&u, n);
    let gens = hierarchy_generators(&model, y).unwrap();
    let ix = gens.i_vector_field(y);
    let h = test_vector(rng, n);
    let check = |offset: usize, x: &CMat, op: &CMat| {
        let lhs = hankel_matrix(&ix, n, offset) * conj_vec(&h);
        let t1 = op * conj_vec(&(x * &h));
        let t2 = x * (op * conj_vec(&h));
        relative(&lhs, &[&t1, &t2])
    };
    check(0, &gens.f, &model.a).max(check(1, &gens.g, &model.a_shift))
}

/// |(H_u h₁|h₂) − (H_u h₂|h₁)| relative to ‖u‖‖h₁‖‖h₂‖.
pub fn self_adjoint(rng: &mut impl Rng, len: usize) -> f64 {
    let u = trig_poly(rng, len);
    let n = len;
    let model = build_hankel(&u, n);
    let h1 = CVec::from_fn(n, |_, _| complex(rng));
    let h2 = CVec::from_fn(n, |_, _| complex(rng));
    let lhs = h2.dotc(&model.apply_h(&h1));
    let rhs = h1.dotc(&model.apply_h(&h2));
    (lhs - rhs).norm() / (u.norm_l2() * h1.norm() * h2.norm())
}
