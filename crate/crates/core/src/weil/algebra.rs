use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::finmod::Element;
use crate::spgroup::{SpElement, SymplecticSpace};
use crate::zmod::AdditiveCharacter;

use super::formula::require_ring;

const ZERO_CUTOFF: f64 = 1e-13;

/// An element `sum_v a_v b_v` of the twisted group algebra with
/// `b_v b_w = lambda(omega(v, w)/2) b_{v+w}`.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    space: Arc<SymplecticSpace>,
    lambda: AdditiveCharacter,
    coeffs: BTreeMap<usize, Complex64>,
}

impl AlgebraElement {
    pub fn zero(space: &Arc<SymplecticSpace>, lambda: AdditiveCharacter) -> Self {
        AlgebraElement { space: space.clone(), lambda, coeffs: BTreeMap::new() }
    }

    pub fn one(space: &Arc<SymplecticSpace>, lambda: AdditiveCharacter) -> Self {
        AlgebraElement::basis(space, lambda, &space.module().zero())
    }

    /// The basis element `b_v`.
    pub fn basis(space: &Arc<SymplecticSpace>, lambda: AdditiveCharacter, v: &[i64]) -> Self {
        let mut out = AlgebraElement::zero(space, lambda);
        out.coeffs.insert(space.module().index(v), Complex64::new(1.0, 0.0));
        out
    }

    /// Ward's element `P(g) = sum_{x in V(1-g)} lambda(B_g(x,x)/2) b_x`.
    pub fn p_operator(g: &SpElement, lambda: AdditiveCharacter) -> Result<Self> {
        require_ring(g, &lambda)?;
        let space = g.space();
        let bg = g.bg_form();
        let ring = lambda.ring();
        let half = ring.half() as i64;
        let mut out = AlgebraElement::zero(space, lambda);
        for c in bg.domain().abstract_module().elements()? {
            let x = bg.domain().embed(&c);
            let value = lambda.eval(ring.mul(half, bg.eval_coords(&c, &c)));
            out.coeffs.insert(space.module().index(&x), value);
        }
        Ok(out)
    }

    /// `T = |V|^{-1/2} sum_v b_v`.
    pub fn t_element(space: &Arc<SymplecticSpace>, lambda: AdditiveCharacter) -> Self {
        let scale = 1.0 / space.degree() as f64;
        let coeffs = (0..space.order() as usize).map(|i| (i, Complex64::new(scale, 0.0))).collect();
        AlgebraElement { space: space.clone(), lambda, coeffs }
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn lambda(&self) -> AdditiveCharacter {
        self.lambda
    }

    pub fn coeff(&self, v: &[i64]) -> Complex64 {
        self.coeffs.get(&self.space.module().index(v)).copied().unwrap_or_default()
    }

    /// Nonzero terms `(v, a_v)`.
    pub fn terms(&self) -> Vec<(Element, Complex64)> {
        let module = self.space.module();
        self.coeffs.iter().map(|(&i, &a)| (module.element(i), a)).collect()
    }

    fn compatible(&self, other: &AlgebraElement) -> Result<()> {
        if self.space.module() != other.space.module() || self.space.omega().gram() != other.space.omega().gram() {
            return Err(Error::ShapeMismatch("algebra elements over different spaces".into()));
        }
        if self.lambda != other.lambda {
            return Err(Error::ShapeMismatch("algebra elements with different characters".into()));
        }
        Ok(())
    }

    fn insert_add(coeffs: &mut BTreeMap<usize, Complex64>, idx: usize, a: Complex64) {
        let entry = coeffs.entry(idx).or_default();
        *entry += a;
    }

    fn pruned(mut self) -> Self {
        self.coeffs.retain(|_, a| a.norm() > ZERO_CUTOFF);
        self
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (&i, &a) in &other.coeffs {
            Self::insert_add(&mut out.coeffs, i, a);
        }
        Ok(out.pruned())
    }

    pub fn scale(&self, s: Complex64) -> AlgebraElement {
        let mut out = self.clone();
        for a in out.coeffs.values_mut() {
            *a *= s;
        }
        out.pruned()
    }

    /// Twisted convolution.
    pub fn mul(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.compatible(other)?;
        let module = self.space.module();
        let ring = self.lambda.ring();
        let half = ring.half() as i64;
        let left: Vec<(Element, Complex64)> = self.terms();
        let right: Vec<(Element, Complex64)> = other.terms();
        let mut out = AlgebraElement::zero(&self.space, self.lambda);
        for (v, a) in &left {
            for (w, b) in &right {
                let twist = self.lambda.eval(ring.mul(half, self.space.omega_eval(v, w)));
                Self::insert_add(&mut out.coeffs, module.index(&module.add(v, w)), a * b * twist);
            }
        }
        Ok(out.pruned())
    }

    /// `sum a_v b_{vg}`, the automorphism induced by `g`.
    pub fn act(&self, g: &SpElement) -> AlgebraElement {
        let module = self.space.module();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&i, &a)| (module.index(&g.apply(&module.element(i))), a))
            .collect();
        AlgebraElement { space: self.space.clone(), lambda: self.lambda, coeffs }
    }

    /// Largest coefficient difference.
    pub fn distance(&self, other: &AlgebraElement) -> f64 {
        let mut keys: Vec<usize> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .map(|k| {
                let a = self.coeffs.get(&k).copied().unwrap_or_default();
                let b = other.coeffs.get(&k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Arc<SymplecticSpace>, AdditiveCharacter) {
        let space = Arc::new(SymplecticSpace::hyperbolic(3, &[3]).unwrap());
        let lambda = AdditiveCharacter::standard(space.ring());
        (space, lambda)
    }

    #[test]
    fn basis_relation() {
        let (space, lambda) = setup();
        let v = vec![1, 0];
        let w = vec![0, 1];
        let bv = AlgebraElement::basis(&space, lambda, &v);
        let bw = AlgebraElement::basis(&space, lambda, &w);
        let prod = bv.mul(&bw).unwrap();
        let expected = AlgebraElement::basis(&space, lambda, &[1, 1]).scale(lambda.eval(space.ring().mul(2, 1)));
        assert!(prod.distance(&expected) < 1e-12);
        // b_v b_{-v} = 1
        let inv = AlgebraElement::basis(&space, lambda, &[2, 0]);
        assert!(bv.mul(&inv).unwrap().distance(&AlgebraElement::one(&space, lambda)) < 1e-12);
    }

    #[test]
    fn t_squares_to_one() {
        let (space, lambda) = setup();
        let t = AlgebraElement::t_element(&space, lambda);
        assert!(t.mul(&t).unwrap().distance(&AlgebraElement::one(&space, lambda)) < 1e-12);
    }

    #[test]
    fn ward_element_intertwines() {
        let (space, lambda) = setup();
        let g = SpElement::from_matrix(&space, vec![vec![1, 1], vec![0, 1]]).unwrap();
        let p = AlgebraElement::p_operator(&g, lambda).unwrap();
        for v in space.module().elements().unwrap() {
            let bv = AlgebraElement::basis(&space, lambda, &v);
            // b_v P = P b_{vg}
            let lhs = bv.mul(&p).unwrap();
            let rhs = p.mul(&bv.act(&g)).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }
}
