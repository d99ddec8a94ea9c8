//! Normalized quadratic Gauss sums and the matrix identities around them.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bforms::{orth_split, BilinearForm};
use crate::error::{Error, Result};
use crate::finmod::{FinModule, Side};
use crate::zmod::{gcd, jacobi, AdditiveCharacter};

pub const SNAP_TOLERANCE: f64 = 1e-6;
pub const SCHUR_TOLERANCE: f64 = 1e-8;
/// Above this many elements the sum is evaluated by reduction instead of directly.
pub const DIRECT_SUM_LIMIT: u64 = 100_000;
pub const SCHUR_LIMIT: u64 = 512;

/// `i^k` for `k` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FourthRoot(u8);

impl FourthRoot {
    pub const ONE: FourthRoot = FourthRoot(0);
    pub const I: FourthRoot = FourthRoot(1);
    pub const MINUS_ONE: FourthRoot = FourthRoot(2);
    pub const MINUS_I: FourthRoot = FourthRoot(3);

    pub fn from_exponent(k: i64) -> Self {
        FourthRoot(k.rem_euclid(4) as u8)
    }

    pub fn from_sign(s: i8) -> Self {
        if s >= 0 {
            FourthRoot::ONE
        } else {
            FourthRoot::MINUS_ONE
        }
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn mul(self, other: FourthRoot) -> FourthRoot {
        FourthRoot((self.0 + other.0) % 4)
    }

    pub fn pow(self, k: u64) -> FourthRoot {
        FourthRoot(((self.0 as u64 * (k % 4)) % 4) as u8)
    }

    pub fn conj(self) -> FourthRoot {
        FourthRoot((4 - self.0) % 4)
    }

    pub fn neg(self) -> FourthRoot {
        self.mul(FourthRoot::MINUS_ONE)
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// The fourth root within `tol` of `z`, if any.
    pub fn snap(z: Complex64, tol: f64) -> Option<FourthRoot> {
        (0..4).map(FourthRoot).find(|r| (r.to_complex() - z).norm() <= tol)
    }

    pub fn parse(s: &str) -> Option<FourthRoot> {
        match s {
            "+1" | "1" => Some(FourthRoot::ONE),
            "+i" | "i" => Some(FourthRoot::I),
            "-1" => Some(FourthRoot::MINUS_ONE),
            "-i" => Some(FourthRoot::MINUS_I),
            _ => None,
        }
    }
}

impl fmt::Display for FourthRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

fn require_symmetric_nondegenerate(q: &BilinearForm) -> Result<()> {
    if !q.is_symmetric() {
        return Err(Error::Precondition("Gauss sums need a symmetric form".into()));
    }
    if !q.is_nondegenerate() {
        return Err(Error::Degenerate("Gauss sums need a non-degenerate form".into()));
    }
    Ok(())
}

/// `gamma(q) = |X|^{-1/2} sum_x lambda(q(x,x)/2)` as an exact fourth root.
pub fn gauss_sum(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<FourthRoot> {
    require_symmetric_nondegenerate(q)?;
    if q.domain().order() <= DIRECT_SUM_LIMIT {
        direct(&q.abstracted(), lambda)
    } else {
        reduced(&q.abstracted(), lambda)
    }
}

/// Direct summation over all elements.
pub fn gauss_sum_direct(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<FourthRoot> {
    require_symmetric_nondegenerate(q)?;
    direct(&q.abstracted(), lambda)
}

/// Isotropic reduction while the exponent is not squarefree, then an
/// orthogonal diagonalization into cyclic sums.
pub fn gauss_sum_reduced(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<FourthRoot> {
    require_symmetric_nondegenerate(q)?;
    reduced(&q.abstracted(), lambda)
}

fn snap(sum: Complex64, order: u64) -> Result<FourthRoot> {
    let z = sum / (order as f64).sqrt();
    FourthRoot::snap(z, SNAP_TOLERANCE).ok_or(Error::SnapFailure { re: z.re, im: z.im, scale: order })
}

/// Histogram of `q(x,x)/2` over the module, then one weighted character sum.
fn direct(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<FourthRoot> {
    let module = q.domain().ambient();
    let n = module.order();
    if n > crate::modsign::DIRECT_LIMIT {
        return Err(Error::TooLarge(format!("Gauss sum over {n} elements")));
    }
    let ring = q.ring();
    let m = ring.modulus() as usize;
    let h = ring.half() as i64;
    let mut counts = vec![0u64; m];
    let mut x = module.zero();
    for _ in 0..n {
        counts[ring.mul(h, q.eval_coords(&x, &x)) as usize] += 1;
        increment(&mut x, module.divisors());
    }
    let table = lambda.table();
    let sum: Complex64 = counts.iter().zip(&table).map(|(&c, &z)| z * c as f64).sum();
    snap(sum, n)
}

fn increment(x: &mut [i64], divisors: &[u64]) {
    for (a, &d) in x.iter_mut().zip(divisors) {
        *a += 1;
        if (*a as u64) < d {
            return;
        }
        *a = 0;
    }
}

fn reduced(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<FourthRoot> {
    let module = q.domain().ambient().clone();
    if module.order() == 1 {
        return Ok(FourthRoot::ONE);
    }
    let e = module.exponent();
    let t = isotropic_step(e);
    if t < e {
        // tX is isotropic with perp X[t]; the sum equals that of X[t]/tX
        let (quotient, gram) = isotropic_quotient(q, &module, t);
        let qbar = BilinearForm::on_module(&quotient, gram)?;
        return reduced(&qbar, lambda);
    }
    let split = orth_split(q)?;
    let mut acc = FourthRoot::ONE;
    for pair in &split.pairs {
        let o = module.element_order(&pair.u);
        let cyclic = FinModule::new(q.ring(), vec![o])?;
        let form = BilinearForm::on_module(&cyclic, vec![vec![pair.d]])?;
        acc = acc.mul(direct(&form, lambda)?);
    }
    Ok(acc)
}

/// The least `t` with `e | t^2`.
fn isotropic_step(e: u64) -> u64 {
    crate::zmod::prime_factors(e)
        .into_iter()
        .map(|(p, a)| p.pow(a.div_ceil(2)))
        .product()
}

/// `X[t] / tX` in coordinates: factor `i` becomes cyclic of order
/// `g_i^2 / e_i` generated by `(e_i / g_i) b_i`, `g_i = gcd(e_i, t)`.
fn isotropic_quotient(q: &BilinearForm, module: &FinModule, t: u64) -> (FinModule, Vec<Vec<i64>>) {
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for (i, &e) in module.divisors().iter().enumerate() {
        let g = gcd(e, t);
        let o = g * g / e;
        if o > 1 {
            let mut v = module.zero();
            v[i] = (e / g) as i64;
            gens.push(v);
            orders.push(o);
        }
    }
    let gram = gens
        .iter()
        .map(|a| gens.iter().map(|b| q.eval_coords(a, b)).collect())
        .collect();
    (FinModule::new(q.ring(), orders).expect("orders divide m"), gram)
}

/// Residuals of the matrix identities for `F = |X|^{-1/2} (lambda(q(x,y)/2))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchurReport {
    pub order: u64,
    pub gamma: String,
    /// `|F^2 - N|`, `N` the permutation matrix of `x -> -x`.
    pub square_residual: f64,
    pub fourth_power_residual: f64,
    pub trace_residual: f64,
    /// `|gamma - (2/|X|) det F|`.
    pub det_residual: f64,
    pub pass: bool,
}

pub fn schur_matrix_checks(q: &BilinearForm, lambda: &AdditiveCharacter) -> Result<SchurReport> {
    require_symmetric_nondegenerate(q)?;
    let q = q.abstracted();
    let module = q.domain().ambient().clone();
    let n = module.order();
    if n > SCHUR_LIMIT {
        return Err(Error::TooLarge(format!("Schur matrix of size {n}")));
    }
    let gamma = gauss_sum(&q, lambda)?;
    let elems = module.elements()?;
    let ring = q.ring();
    let h = ring.half() as i64;
    let scale = 1.0 / (n as f64).sqrt();
    let size = n as usize;
    let f = DMatrix::from_fn(size, size, |i, j| lambda.eval(ring.mul(h, q.eval_coords(&elems[i], &elems[j]))) * scale);
    let neg = DMatrix::from_fn(size, size, |i, j| {
        if module.index(&module.neg(&elems[i])) == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let f2 = &f * &f;
    let f4 = &f2 * &f2;
    let square_residual = (&f2 - &neg).norm();
    let fourth_power_residual = (&f4 - DMatrix::<Complex64>::identity(size, size)).norm();
    let trace_residual = (f.trace() - gamma.to_complex()).norm();
    let det = f.determinant() * jacobi(2, n) as f64;
    let det_residual = (det - gamma.to_complex()).norm();
    let pass = [square_residual, fourth_power_residual, trace_residual, det_residual]
        .iter()
        .all(|&r| r < SCHUR_TOLERANCE);
    Ok(SchurReport {
        order: n,
        gamma: gamma.to_string(),
        square_residual,
        fourth_power_residual,
        trace_residual,
        det_residual,
        pass,
    })
}

/// Whether `q` vanishes on a submodule `L` with `L = L^q`.
pub fn has_lagrangian(q: &BilinearForm, l: &crate::finmod::Submodule) -> Result<bool> {
    let perp = q.perp(l, Side::Right)?;
    let isotropic = l.basis().iter().all(|a| l.basis().iter().all(|b| q.eval(a, b) == Ok(0)));
    Ok(isotropic && perp.same_as(l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::Ring;

    fn diag(m: u64, d: &[u64], vals: &[i64]) -> BilinearForm {
        let module = FinModule::new(Ring::new(m).unwrap(), d.to_vec()).unwrap();
        let n = vals.len();
        let gram = (0..n).map(|i| (0..n).map(|j| if i == j { vals[i] } else { 0 }).collect()).collect();
        BilinearForm::on_module(&module, gram).unwrap()
    }

    #[test]
    fn fourth_root_arithmetic() {
        assert_eq!(FourthRoot::I.mul(FourthRoot::I), FourthRoot::MINUS_ONE);
        assert_eq!(FourthRoot::MINUS_I.conj(), FourthRoot::I);
        assert_eq!(FourthRoot::I.pow(4), FourthRoot::ONE);
        assert_eq!(FourthRoot::MINUS_I.to_string(), "-i");
        assert_eq!(FourthRoot::parse("+i"), Some(FourthRoot::I));
        assert_eq!(FourthRoot::snap(Complex64::new(0.3, 0.3), 1e-6), None);
    }

    #[test]
    fn gauss_examples() {
        let ring = Ring::new(3).unwrap();
        let lambda = AdditiveCharacter::standard(ring);
        let module = FinModule::new(ring, vec![3]).unwrap();
        assert_eq!(gauss_sum(&BilinearForm::empty(&module), &lambda).unwrap(), FourthRoot::ONE);
        assert_eq!(gauss_sum(&diag(3, &[3], &[1]), &lambda).unwrap(), FourthRoot::MINUS_I);
        assert_eq!(gauss_sum(&diag(3, &[3], &[-1]), &lambda).unwrap(), FourthRoot::I);
        assert_eq!(gauss_sum(&diag(3, &[3, 3], &[1, 1]), &lambda).unwrap(), FourthRoot::MINUS_ONE);
    }

    #[test]
    fn degenerate_or_asymmetric_rejected() {
        let lambda = AdditiveCharacter::standard(Ring::new(9).unwrap());
        assert!(gauss_sum(&diag(9, &[9], &[3]), &lambda).is_err());
        let module = FinModule::new(Ring::new(3).unwrap(), vec![3, 3]).unwrap();
        let w = BilinearForm::on_module(&module, vec![vec![0, 1], vec![2, 0]]).unwrap();
        assert!(gauss_sum(&w, &AdditiveCharacter::standard(Ring::new(3).unwrap())).is_err());
    }

    #[test]
    fn reduced_path_agrees_with_direct() {
        for (m, d, vals) in [
            (9u64, vec![9u64], vec![1i64]),
            (9, vec![9, 9], vec![1, 2]),
            (27, vec![27], vec![2]),
            (27, vec![9, 27], vec![3, 1]),
            (45, vec![45, 15], vec![1, 3]),
            (81, vec![81], vec![5]),
        ] {
            let q = diag(m, &d, &vals);
            let ring = Ring::new(m).unwrap();
            for s in ring.units() {
                let lambda = AdditiveCharacter::new(ring, s).unwrap();
                assert_eq!(
                    gauss_sum_direct(&q, &lambda).unwrap(),
                    gauss_sum_reduced(&q, &lambda).unwrap(),
                    "m={m} d={d:?} vals={vals:?} s={s}"
                );
            }
        }
    }

    #[test]
    fn schur_examples() {
        let lambda = AdditiveCharacter::standard(Ring::new(3).unwrap());
        let r = schur_matrix_checks(&diag(3, &[3], &[1]), &lambda).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.gamma, "-i");
        let r = schur_matrix_checks(&diag(3, &[3, 3], &[1, 1]), &lambda).unwrap();
        assert!(r.pass);
        assert_eq!(r.gamma, "-1");
        let module = FinModule::new(Ring::new(3).unwrap(), vec![3]).unwrap();
        let r = schur_matrix_checks(&BilinearForm::empty(&module), &lambda).unwrap();
        assert!(r.pass);
    }
}
