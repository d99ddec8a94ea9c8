//! Parity of the permutation an automorphism induces on a finite module.

use crate::bforms::{relating_automorphism, BilinearForm};
use crate::error::{Error, Result};
use crate::finmod::{FinModule, ModuleHom, Submodule};
use crate::zmod::{jacobi, prime_factors};

/// Largest module whose elements are permuted explicitly.
pub const DIRECT_LIMIT: u64 = 1 << 20;

fn require_automorphism(alpha: &ModuleHom) -> Result<()> {
    if !alpha.is_endomorphism() {
        return Err(Error::ShapeMismatch("sign needs an endomorphism".into()));
    }
    if !alpha.is_invertible() {
        return Err(Error::NotInvertible);
    }
    Ok(())
}

/// Sign by explicit cycle decomposition, for an automorphism of its domain.
pub fn sign_direct(alpha: &ModuleHom) -> Result<i8> {
    require_automorphism(alpha)?;
    let module = alpha.dom();
    let n = module.order();
    if n > DIRECT_LIMIT {
        return Err(Error::TooLarge(format!("module of order {n}")));
    }
    let n = n as usize;
    let mut seen = vec![false; n];
    let mut cycles = 0usize;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut idx = start;
        while !seen[idx] {
            seen[idx] = true;
            idx = module.index(&alpha.apply_unchecked(&module.element(idx)));
        }
    }
    Ok(if (n - cycles) % 2 == 0 { 1 } else { -1 })
}

/// Sign through the chain `X > pX > p^2 X > ...`: each layer is an
/// `F_p`-space on which the sign is the Legendre symbol of the determinant.
pub fn sign_fast(alpha: &ModuleHom) -> Result<i8> {
    require_automorphism(alpha)?;
    let mut alpha = alpha.clone();
    let mut sign = 1i8;
    loop {
        let module = alpha.dom().clone();
        if module.order() == 1 {
            return Ok(sign);
        }
        let p = prime_factors(module.exponent())[0].0;
        let layer: Vec<usize> = (0..module.rank()).filter(|&i| module.divisors()[i] % p == 0).collect();
        let mat: Vec<Vec<i64>> = layer
            .iter()
            .map(|&i| layer.iter().map(|&j| alpha.matrix()[i][j].rem_euclid(p as i64)).collect())
            .collect();
        sign *= jacobi(det_mod_p(mat, p), p);
        let lower = Submodule::full(&module).scaled(p as i64);
        alpha = lower.restrict_endo(&alpha)?;
    }
}

fn det_mod_p(mut a: Vec<Vec<i64>>, p: u64) -> i64 {
    let p = p as i64;
    let n = a.len();
    let mut det = 1i64;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| a[r][c] % p != 0) else {
            return 0;
        };
        if r != c {
            a.swap(r, c);
            det = -det;
        }
        det = (det * a[c][c]).rem_euclid(p);
        let inv = crate::zmod::mod_inverse(a[c][c] as u64, p as u64).expect("nonzero mod p") as i64;
        for r in c + 1..n {
            let f = (a[r][c] * inv).rem_euclid(p);
            for k in c..n {
                a[r][k] = (a[r][k] - f * a[c][k]).rem_euclid(p);
            }
        }
    }
    det.rem_euclid(p)
}

/// Sign of `alpha` restricted to the invariant submodule `X`, cycle counting.
pub fn perm_sign_direct(alpha: &ModuleHom, x: &Submodule) -> Result<i8> {
    sign_direct(&x.restrict_endo(alpha)?)
}

/// Sign of `alpha` restricted to the invariant submodule `X`, layer by layer.
pub fn perm_sign_fast(alpha: &ModuleHom, x: &Submodule) -> Result<i8> {
    sign_fast(&x.restrict_endo(alpha)?)
}

/// Sign by the half-set rule `(-1)^{|P alpha ∩ -P|}`, `P` the nonzero
/// elements whose first nonzero coordinate is below half its divisor.
pub fn sign_half_set(alpha: &ModuleHom) -> Result<i8> {
    require_automorphism(alpha)?;
    let module = alpha.dom();
    if module.order() > DIRECT_LIMIT {
        return Err(Error::TooLarge(format!("module of order {}", module.order())));
    }
    let mut flips = 0usize;
    for x in module.elements()? {
        if in_half_set(module, &x) && !in_half_set(module, &alpha.apply_unchecked(&x)) {
            flips += 1;
        }
    }
    Ok(if flips % 2 == 0 { 1 } else { -1 })
}

fn in_half_set(module: &FinModule, x: &[i64]) -> bool {
    x.iter()
        .zip(module.divisors())
        .find(|(&a, _)| a != 0)
        .is_some_and(|(&a, &d)| 2 * a < d as i64)
}

/// `sign(q/B)`: the sign of the `alpha` with `q(x, y) = B(x alpha, y)`.
pub fn sign_ratio(q: &BilinearForm, b: &BilinearForm) -> Result<i8> {
    sign_fast(&relating_automorphism(q, b)?)
}

/// Sign of multiplication by the unit `s` on `X`.
pub fn scalar_sign(x: &Submodule, s: i64) -> Result<i8> {
    let ring = x.ambient().ring();
    if !ring.is_unit(s) {
        return Err(Error::NotUnit(s, ring.modulus()));
    }
    sign_fast(&ModuleHom::scalar(&x.abstract_module(), s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zmod::Ring;

    fn module(m: u64, d: &[u64]) -> FinModule {
        FinModule::new(Ring::new(m).unwrap(), d.to_vec()).unwrap()
    }

    fn hom(v: &FinModule, rows: Vec<Vec<i64>>) -> ModuleHom {
        ModuleHom::new(v.clone(), v.clone(), rows).unwrap()
    }

    #[test]
    fn direct_examples() {
        let v = module(3, &[3, 3]);
        assert_eq!(sign_direct(&ModuleHom::identity(&v)).unwrap(), 1);
        let z3 = module(3, &[3]);
        assert_eq!(sign_direct(&ModuleHom::scalar(&z3, 2)).unwrap(), -1);
        assert_eq!(sign_direct(&hom(&v, vec![vec![0, 1], vec![-1, 0]])).unwrap(), 1);
        assert!(sign_direct(&ModuleHom::scalar(&z3, 0)).is_err());
    }

    #[test]
    fn fast_examples() {
        let v9 = module(9, &[9, 9]);
        for s in [1, 2, 4, 5, 7, 8] {
            assert_eq!(sign_fast(&ModuleHom::scalar(&v9, s)).unwrap(), jacobi(s * s, 9));
        }
        let v = module(3, &[3, 3]);
        let a = hom(&v, vec![vec![2, 0], vec![0, 1]]);
        assert_eq!(sign_fast(&a).unwrap(), -1);
        assert_eq!(sign_direct(&a).unwrap(), -1);
    }

    #[test]
    fn scalar_sign_examples() {
        let v = module(3, &[3, 3]);
        let z3 = module(3, &[3]);
        assert_eq!(scalar_sign(&Submodule::full(&z3), 1).unwrap(), 1);
        assert_eq!(scalar_sign(&Submodule::full(&z3), 2).unwrap(), -1);
        assert_eq!(scalar_sign(&Submodule::full(&v), 2).unwrap(), 1);
        assert!(scalar_sign(&Submodule::full(&v), 3).is_err());
    }

    #[test]
    fn sign_ratio_examples() {
        let z3 = module(3, &[3]);
        let q = BilinearForm::on_module(&z3, vec![vec![1]]).unwrap();
        let b = BilinearForm::on_module(&z3, vec![vec![2]]).unwrap();
        assert_eq!(sign_ratio(&q, &q).unwrap(), 1);
        assert_eq!(sign_ratio(&q, &b).unwrap(), -1);
    }

    #[test]
    fn half_set_matches_direct_on_mixed_module() {
        let v = module(9, &[3, 9]);
        let a = hom(&v, vec![vec![2, 3], vec![1, 4]]);
        assert!(a.is_invertible());
        assert_eq!(sign_half_set(&a).unwrap(), sign_direct(&a).unwrap());
        assert_eq!(sign_fast(&a).unwrap(), sign_direct(&a).unwrap());
    }

    #[test]
    fn restricted_signs() {
        let v = module(9, &[9, 9]);
        let a = hom(&v, vec![vec![2, 0], vec![0, 1]]);
        let x = Submodule::from_generators(&v, vec![vec![3, 0]]);
        // multiplication by 2 on Z/3
        assert_eq!(perm_sign_direct(&a, &x).unwrap(), -1);
        assert_eq!(perm_sign_fast(&a, &x).unwrap(), -1);
        let y = Submodule::from_generators(&v, vec![vec![1, 1]]);
        assert!(perm_sign_direct(&a, &y).is_err());
    }
}
