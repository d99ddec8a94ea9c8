use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::bforms::hyperbolic_basis;
use crate::error::{Error, Result};
use crate::finmod::{Element, Submodule};
use crate::gauss::{FourthRoot, SNAP_TOLERANCE};
use crate::spgroup::{SpElement, SymplecticSpace};
use crate::zmod::{mod_inverse, AdditiveCharacter};

use super::algebra::AlgebraElement;
use super::formula::require_ring;
use super::CharacterValue;

/// Largest `|V|` the oracle accepts.
pub const ORACLE_LIMIT: u64 = 1 << 16;
/// Columns with a smaller residual are treated as dependent.
pub const PIVOT_THRESHOLD: f64 = 1e-8;

type CMat = DMatrix<Complex64>;

/// The twisted group algebra realized as `n x n` matrices on a minimal
/// right ideal `e A`, `e` the averaged Lagrangian idempotent.
#[derive(Debug, Clone)]
pub struct Oracle {
    space: Arc<SymplecticSpace>,
    lambda: AdditiveCharacter,
    es: Vec<Element>,
    fs: Vec<Element>,
    /// `(m / o_i, inverse of d_i / (m / o_i) mod o_i, o_i)` per pair.
    scales: Vec<(i64, i64, u64)>,
    reps: Vec<Element>,
    t_mat: CMat,
    s_mat: CMat,
    s_inv: CMat,
    dplus: usize,
}

impl Oracle {
    pub fn new(space: &Arc<SymplecticSpace>, lambda: AdditiveCharacter) -> Result<Self> {
        if space.ring() != lambda.ring() {
            return Err(Error::ShapeMismatch("character and module live over different rings".into()));
        }
        if space.order() > ORACLE_LIMIT {
            return Err(Error::TooLarge(format!("|V| = {} exceeds {}", space.order(), ORACLE_LIMIT)));
        }
        let module = space.module();
        let m = space.ring().modulus();
        let split = hyperbolic_basis(space.omega())?;
        let mut es = Vec::new();
        let mut fs = Vec::new();
        let mut scales = Vec::new();
        for pair in &split.pairs {
            let o = module.element_order(&pair.u);
            let unit = m / o;
            let d = pair.d.rem_euclid(m as i64) / unit as i64;
            let inv = mod_inverse(d as u64 % o, o).ok_or_else(|| Error::Numeric("pairing is not perfect".into()))?;
            es.push(pair.u.clone());
            fs.push(pair.w.clone());
            scales.push((unit as i64, inv as i64, o));
        }
        let n: u64 = scales.iter().map(|s| s.2).product();
        if n * n != space.order() {
            return Err(Error::Numeric("hyperbolic pairs do not span V".into()));
        }
        let mut reps = Vec::with_capacity(n as usize);
        for idx in 0..n {
            let mut rest = idx;
            let mut t = module.zero();
            for (f, s) in fs.iter().zip(&scales) {
                let b = (rest % s.2) as i64;
                rest /= s.2;
                t = module.add(&t, &module.scale(f, b));
            }
            reps.push(t);
        }
        let mut oracle = Oracle {
            space: space.clone(),
            lambda,
            es,
            fs,
            scales,
            reps,
            t_mat: CMat::zeros(0, 0),
            s_mat: CMat::zeros(0, 0),
            s_inv: CMat::zeros(0, 0),
            dplus: 0,
        };
        oracle.t_mat = oracle.matrixize(&AlgebraElement::t_element(space, lambda))?;
        let id = CMat::identity(n as usize, n as usize);
        let half = Complex64::new(0.5, 0.0);
        let plus = column_basis(&((&id + &oracle.t_mat) * half));
        let minus = column_basis(&((&id - &oracle.t_mat) * half));
        if plus.ncols() + minus.ncols() != n as usize || plus.ncols() != (n as usize + 1) / 2 {
            return Err(Error::Numeric(format!(
                "eigenspaces of T have dimensions {} and {}",
                plus.ncols(),
                minus.ncols()
            )));
        }
        oracle.dplus = plus.ncols();
        let mut s = CMat::zeros(n as usize, n as usize);
        s.columns_mut(0, plus.ncols()).copy_from(&plus);
        s.columns_mut(plus.ncols(), minus.ncols()).copy_from(&minus);
        oracle.s_inv = s.clone().try_inverse().ok_or_else(|| Error::Numeric("eigenbasis is singular".into()))?;
        oracle.s_mat = s;
        Ok(oracle)
    }

    pub fn space(&self) -> &Arc<SymplecticSpace> {
        &self.space
    }

    pub fn lambda(&self) -> AdditiveCharacter {
        self.lambda
    }

    pub fn degree(&self) -> usize {
        self.reps.len()
    }

    /// The Lagrangian `L` spanned by the first vectors of the hyperbolic pairs.
    pub fn lagrangian(&self) -> Submodule {
        Submodule::from_generators(self.space.module(), self.es.clone())
    }

    /// Coset representatives of `V / L`, indexing rows and columns.
    pub fn reps(&self) -> &[Element] {
        &self.reps
    }

    /// `y = x + t` with `x` in `L`, `t` a representative; returns `(x, index of t)`.
    fn decompose(&self, y: &[i64]) -> (Element, usize) {
        let module = self.space.module();
        let mut t = module.zero();
        let mut idx = 0usize;
        let mut radix = 1usize;
        for ((e, f), &(unit, inv, o)) in self.es.iter().zip(&self.fs).zip(&self.scales) {
            let w = self.space.omega_eval(e, y);
            let b = ((w / unit) * inv).rem_euclid(o as i64);
            t = module.add(&t, &module.scale(f, b));
            idx += b as usize * radix;
            radix *= o as usize;
        }
        (module.sub(y, &t), idx)
    }

    fn accumulate(&self, mat: &mut CMat, v: &[i64], coeff: Complex64) {
        let module = self.space.module();
        let ring = self.space.ring();
        let half = ring.half() as i64;
        for (s_idx, s) in self.reps.iter().enumerate() {
            let y = module.add(s, v);
            let (x, t_idx) = self.decompose(&y);
            let t = &self.reps[t_idx];
            let r = ring.add(self.space.omega_eval(s, v), -self.space.omega_eval(&x, t));
            mat[(s_idx, t_idx)] += coeff * self.lambda.eval(ring.mul(half, r));
        }
    }

    /// Matrix of the basis element `b_v`.
    pub fn basis_matrix(&self, v: &[i64]) -> CMat {
        let n = self.degree();
        let mut mat = CMat::zeros(n, n);
        self.accumulate(&mut mat, v, Complex64::new(1.0, 0.0));
        mat
    }

    /// The algebra homomorphism into `n x n` matrices.
    pub fn matrixize(&self, a: &AlgebraElement) -> Result<CMat> {
        if a.space().module() != self.space.module() || a.lambda() != self.lambda {
            return Err(Error::ShapeMismatch("algebra element over a different space".into()));
        }
        let n = self.degree();
        let mut mat = CMat::zeros(n, n);
        for (v, c) in a.terms() {
            self.accumulate(&mut mat, &v, c);
        }
        Ok(mat)
    }

    pub fn t_matrix(&self) -> &CMat {
        &self.t_mat
    }

    /// Dimensions of the `+1` and `-1` eigenspaces of `T`.
    pub fn eigen_dims(&self) -> (usize, usize) {
        (self.dplus, self.degree() - self.dplus)
    }

    /// `det(c | E+) / det(c | E-)` for a matrix commuting with `T`.
    pub fn eta(&self, c: &CMat) -> Result<Complex64> {
        let n = self.degree();
        let d = self.dplus;
        let block = &self.s_inv * c * &self.s_mat;
        let top = block.view((0, 0), (d, d)).into_owned().determinant();
        let bottom = if d < n {
            block.view((d, d), (n - d, n - d)).into_owned().determinant()
        } else {
            Complex64::new(1.0, 0.0)
        };
        if bottom.norm() < PIVOT_THRESHOLD {
            return Err(Error::Numeric("matrix is singular on E-".into()));
        }
        Ok(top / bottom)
    }

    /// `W(g) = P(g) / eta(P(g))`.
    pub fn weil_matrix(&self, g: &SpElement) -> Result<CMat> {
        require_ring(g, &self.lambda)?;
        if g.space().module() != self.space.module() || g.space().omega().gram() != self.space.omega().gram() {
            return Err(Error::ShapeMismatch("element acts on a different space".into()));
        }
        let p = self.matrixize(&AlgebraElement::p_operator(g, self.lambda)?)?;
        let eta = self.eta(&p)?;
        Ok(p / eta)
    }

    /// `psi(g) = tr W(g)`.
    pub fn value(&self, g: &SpElement) -> Result<Complex64> {
        Ok(self.weil_matrix(g)?.trace())
    }

    /// The oracle value snapped to `eps sqrt|C_V(g)|`.
    pub fn value_exact(&self, g: &SpElement) -> Result<CharacterValue> {
        let psi = self.value(g)?;
        let c = g.fixed().order();
        let scale = (c as f64).sqrt();
        let eps = FourthRoot::snap(psi / scale, SNAP_TOLERANCE)
            .ok_or(Error::SnapFailure { re: psi.re, im: psi.im, scale: c })?;
        Ok(CharacterValue::new(c, eps))
    }
}

/// Orthonormal basis of the column space, by Gram-Schmidt with column pivoting.
fn column_basis(a: &CMat) -> CMat {
    let n = a.nrows();
    let mut cols: Vec<nalgebra::DVector<Complex64>> = (0..a.ncols()).map(|j| a.column(j).into_owned()).collect();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    loop {
        let Some((j, norm)) = cols
            .iter()
            .enumerate()
            .map(|(j, c)| (j, c.norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if norm < PIVOT_THRESHOLD {
            break;
        }
        let q = cols.swap_remove(j) / Complex64::new(norm, 0.0);
        for c in cols.iter_mut() {
            let proj = q.dotc(c);
            *c -= &q * proj;
        }
        basis.push(q);
    }
    let mut out = CMat::zeros(n, basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let space = Arc::new(SymplecticSpace::hyperbolic(3, &[3]).unwrap());
        let lambda = AdditiveCharacter::standard(space.ring());
        let oracle = Oracle::new(&space, lambda).unwrap();
        assert_eq!(oracle.eigen_dims(), (2, 1));
        let id = SpElement::identity(&space);
        assert_eq!(oracle.value_exact(&id).unwrap(), CharacterValue::new(9, FourthRoot::ONE));
        let minus = SpElement::minus_one(&space);
        assert_eq!(oracle.value_exact(&minus).unwrap(), CharacterValue::new(1, FourthRoot::MINUS_ONE));
        let u = SpElement::from_matrix(&space, vec![vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(oracle.value_exact(&u).unwrap(), CharacterValue::new(3, FourthRoot::MINUS_I));
    }

    #[test]
    fn basis_matrices_multiply() {
        let space = Arc::new(SymplecticSpace::hyperbolic(9, &[3, 9]).unwrap());
        let lambda = AdditiveCharacter::standard(space.ring());
        let oracle = Oracle::new(&space, lambda).unwrap();
        let module = space.module();
        let v = vec![1, 4, 2, 7];
        let w = vec![2, 1, 0, 5];
        let v = module.reduce(&v.iter().map(|&x| x as i128).collect::<Vec<_>>());
        let w = module.reduce(&w.iter().map(|&x| x as i128).collect::<Vec<_>>());
        let lhs = oracle.basis_matrix(&v) * oracle.basis_matrix(&w);
        let prod = AlgebraElement::basis(&space, lambda, &v)
            .mul(&AlgebraElement::basis(&space, lambda, &w))
            .unwrap();
        let rhs = oracle.matrixize(&prod).unwrap();
        assert!((lhs - rhs).norm() < 1e-9);
    }
}
