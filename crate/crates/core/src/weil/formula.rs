use num_complex::Complex64;

use crate::bforms::{symmetric_q, BilinearForm};
use crate::error::{Error, Result};
use crate::gauss::{gauss_sum, FourthRoot, SNAP_TOLERANCE};
use crate::modsign::{perm_sign_fast, sign_ratio, DIRECT_LIMIT};
use crate::spgroup::SpElement;
use crate::zmod::AdditiveCharacter;

use super::{isqrt, CharacterValue};

pub(crate) fn require_ring(g: &SpElement, lambda: &AdditiveCharacter) -> Result<()> {
    if g.space().ring() != lambda.ring() {
        return Err(Error::ShapeMismatch("character and module live over different rings".into()));
    }
    Ok(())
}

/// `psi(g) = sqrt|C_V(g)| sign(q/B_g) gamma_lambda(-q)` with the diagonal `q`.
pub fn closed_value(g: &SpElement, lambda: &AdditiveCharacter) -> Result<CharacterValue> {
    let q = symmetric_q(&g.displacement());
    closed_value_with_q(g, lambda, &q)
}

/// The closed value computed from an arbitrary non-degenerate symmetric `q`
/// on `V(1-g)`.
pub fn closed_value_with_q(g: &SpElement, lambda: &AdditiveCharacter, q: &BilinearForm) -> Result<CharacterValue> {
    require_ring(g, lambda)?;
    let c = g.fixed().order();
    let x = g.displacement();
    if !q.domain().same_as(&x) {
        return Err(Error::ShapeMismatch("q must live on V(1-g)".into()));
    }
    if x.order() == 1 {
        return Ok(CharacterValue::new(c, FourthRoot::ONE));
    }
    if !q.is_symmetric() {
        return Err(Error::Precondition("q must be symmetric".into()));
    }
    let bg = g.bg_form();
    let sign = sign_ratio(q, &bg)?;
    let gamma = gauss_sum(&q.neg(), lambda)?;
    Ok(CharacterValue::new(c, FourthRoot::from_sign(sign).mul(gamma)))
}

/// `psi(g) = |V|^{-1/2} sum_v lambda(omega(v, vg)/2)`, valid for `g` of odd order.
pub fn value_odd(g: &SpElement, lambda: &AdditiveCharacter) -> Result<CharacterValue> {
    require_ring(g, lambda)?;
    if g.order() % 2 == 0 {
        return Err(Error::Precondition("g must have odd order".into()));
    }
    let space = g.space();
    let module = space.module();
    if module.order() > DIRECT_LIMIT {
        return Err(Error::TooLarge(format!("|V| = {}", module.order())));
    }
    let ring = space.ring();
    let h = ring.half() as i64;
    let mut hist = vec![0u64; ring.modulus() as usize];
    for v in module.elements()? {
        let w = space.omega_eval(&v, &g.apply(&v));
        hist[ring.mul(h, w) as usize] += 1;
    }
    let sum: Complex64 = hist
        .iter()
        .enumerate()
        .map(|(r, &k)| lambda.eval(r as i64) * k as f64)
        .sum();
    let psi = sum / space.degree() as f64;
    let c = g.fixed().order();
    let eps = FourthRoot::snap(psi / (c as f64).sqrt(), SNAP_TOLERANCE)
        .ok_or(Error::SnapFailure { re: psi.re, im: psi.im, scale: c })?;
    Ok(CharacterValue::new(c, eps))
}

/// `psi(t) = (-1)^{(d-1)/2} sqrt|C_V(t)|` for an involution, `d = sqrt|V(1-t)|`.
pub fn value_involution(t: &SpElement) -> Result<CharacterValue> {
    if !t.pow(2).is_identity() {
        return Err(Error::Precondition("t must satisfy t^2 = 1".into()));
    }
    let c = t.fixed().order();
    let d = isqrt(t.displacement().order())
        .ok_or_else(|| Error::Precondition("|V(1-t)| is not a square".into()))?;
    let eps = if (d - 1) / 2 % 2 == 0 { FourthRoot::ONE } else { FourthRoot::MINUS_ONE };
    Ok(CharacterValue::new(c, eps))
}

/// `psi(g) = sqrt|C_V(g)| (-1)^{(sqrt|U|-1)/2} sign_U(1-g)` when `C_V(g)` meets
/// `U = V(1-g)` trivially.
pub fn value_invertible(g: &SpElement) -> Result<CharacterValue> {
    let u = g.displacement();
    let fixed = g.fixed();
    if u.intersect(&fixed)?.order() != 1 {
        return Err(Error::Precondition("C_V(g) meets V(1-g)".into()));
    }
    let d = isqrt(u.order()).ok_or_else(|| Error::Numeric("|V(1-g)| is not a square".into()))?;
    let sign = perm_sign_fast(&g.hom().one_minus()?, &u)?;
    let parity = if (d - 1) / 2 % 2 == 0 { 1 } else { -1 };
    Ok(CharacterValue::new(fixed.order(), FourthRoot::from_sign(sign * parity)))
}

/// `(psi_+(g), psi_-(g)) = ((psi(g) +- psi(-1) psi(-g)) / 2)`.
pub fn psi_pm(g: &SpElement, lambda: &AdditiveCharacter) -> Result<(Complex64, Complex64)> {
    let a = closed_value(g, lambda)?.to_complex();
    let minus = closed_value(&SpElement::minus_one(g.space()), lambda)?.to_complex();
    let b = closed_value(&g.neg(), lambda)?.to_complex();
    Ok(((a + minus * b) / 2.0, (a - minus * b) / 2.0))
}

/// `c(g, h) = sum_{x in V(1-g) ∩ V(1-h)} lambda((B_g(x,x) + B_h(x,x))/2)`,
/// the coefficient in `P(g) P(h) = c(g, h) P(gh)`.
pub fn conv_coeff(g: &SpElement, h: &SpElement, lambda: &AdditiveCharacter) -> Result<Complex64> {
    require_ring(g, lambda)?;
    if g.space().module() != h.space().module() {
        return Err(Error::ShapeMismatch("elements act on different modules".into()));
    }
    let bg = g.bg_form();
    let bh = h.bg_form();
    let meet = bg.domain().intersect(bh.domain())?;
    let ring = lambda.ring();
    let half = ring.half() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for x in meet.elements()? {
        let r = ring.add(bg.eval(&x, &x)?, bh.eval(&x, &x)?);
        sum += lambda.eval(ring.mul(half, r));
    }
    Ok(sum)
}
