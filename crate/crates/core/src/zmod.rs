//! Arithmetic in `Z/m` for odd `m`, additive characters and Jacobi symbols.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// The coefficient ring `Z/m` with `m` odd, so that 2 is a unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ring {
    m: u64,
    half: u64,
}

impl Ring {
    pub fn new(m: u64) -> Result<Self> {
        if m < 3 || m % 2 == 0 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(Ring { m, half: (m + 1) / 2 })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// The inverse of 2.
    #[inline]
    pub fn half(&self) -> u64 {
        self.half
    }

    #[inline]
    pub fn reduce(&self, x: i128) -> i64 {
        x.rem_euclid(self.m as i128) as i64
    }

    #[inline]
    pub fn add(&self, a: i64, b: i64) -> i64 {
        self.reduce(a as i128 + b as i128)
    }

    #[inline]
    pub fn mul(&self, a: i64, b: i64) -> i64 {
        self.reduce(a as i128 * b as i128)
    }

    #[inline]
    pub fn neg(&self, a: i64) -> i64 {
        self.reduce(-(a as i128))
    }

    pub fn is_unit(&self, a: i64) -> bool {
        gcd(a.rem_euclid(self.m as i64) as u64, self.m) == 1
    }

    pub fn inverse(&self, a: i64) -> Result<i64> {
        let a = a.rem_euclid(self.m as i64);
        mod_inverse(a as u64, self.m)
            .map(|x| x as i64)
            .ok_or(Error::NotUnit(a, self.m))
    }

    /// All units of the ring in increasing order.
    pub fn units(&self) -> Vec<i64> {
        (1..self.m as i64).filter(|&a| self.is_unit(a)).collect()
    }

    /// Distinct prime divisors of `m`, ascending.
    pub fn primes(&self) -> Vec<u64> {
        prime_factors(self.m).into_iter().map(|(p, _)| p).collect()
    }

    /// Whether `a` is a square modulo `n`, for `n | m`.
    pub fn is_square_mod(a: i64, n: u64) -> bool {
        let a = a.rem_euclid(n as i64);
        (0..n as i64).any(|x| (x * x - a).rem_euclid(n as i64) == 0)
    }
}

/// A primitive additive character `r -> exp(2 pi i s r / m)` of `Z/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AdditiveCharacter {
    ring: Ring,
    s: u64,
}

impl AdditiveCharacter {
    pub fn new(ring: Ring, s: i64) -> Result<Self> {
        let m = ring.modulus();
        let s = s.rem_euclid(m as i64) as u64;
        if gcd(s, m) != 1 {
            return Err(Error::NotUnit(s as i64, m));
        }
        Ok(AdditiveCharacter { ring, s })
    }

    /// The character with `s = 1`.
    pub fn standard(ring: Ring) -> Self {
        AdditiveCharacter { ring, s: 1 }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn twist(&self) -> u64 {
        self.s
    }

    /// `r -> self(s r)`.
    pub fn scaled(&self, s: i64) -> Result<Self> {
        AdditiveCharacter::new(self.ring, self.ring.mul(self.s as i64, s))
    }

    pub fn eval(&self, r: i64) -> Complex64 {
        let m = self.ring.modulus();
        let k = self.ring.mul(self.s as i64, r) as f64;
        Complex64::from_polar(1.0, 2.0 * PI * k / m as f64)
    }

    /// Values at `0, 1, ..., m-1`.
    pub fn table(&self) -> Vec<Complex64> {
        (0..self.ring.modulus() as i64).map(|r| self.eval(r)).collect()
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}


pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Prime factorisation by trial division, ascending primes.
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Multiplicity of `p` in `n` (with `v_p(0)` reported as `cap`).
pub(crate) fn valuation(n: i64, p: u64, cap: u32) -> u32 {
    if n == 0 {
        return cap;
    }
    let mut n = n.unsigned_abs();
    let mut v = 0;
    while n % p == 0 && v < cap {
        n /= p;
        v += 1;
    }
    v
}

/// The Jacobi symbol `(a/n)` for odd positive `n`; 0 when `gcd(a, n) > 1`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut acc = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                acc = -acc;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            acc = -acc;
        }
        a %= n;
    }
    if n == 1 {
        acc
    } else {
        0
    }
}

/// Sign of the permutation `r -> r a` of `Z/m`.
pub fn ring_sign(ring: &Ring, a: i64) -> Result<i8> {
    if !ring.is_unit(a) {
        return Err(Error::NotUnit(a, ring.modulus()));
    }
    Ok(jacobi(a, ring.modulus()))
}

/// Sign of `r -> r a` on `Z/m` by explicit cycle counting.
pub fn ring_sign_by_cycles(ring: &Ring, a: i64) -> Result<i8> {
    if !ring.is_unit(a) {
        return Err(Error::NotUnit(a, ring.modulus()));
    }
    let m = ring.modulus() as usize;
    let mut seen = vec![false; m];
    let mut cycles = 0usize;
    for start in 0..m {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut r = start;
        while !seen[r] {
            seen[r] = true;
            r = ring.mul(r as i64, a) as usize;
        }
    }
    Ok(if (m - cycles) % 2 == 0 { 1 } else { -1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_construction() {
        let r = Ring::new(3).unwrap();
        assert_eq!((r.modulus(), r.half()), (3, 2));
        let r = Ring::new(9).unwrap();
        assert_eq!(r.half(), 5);
        assert_eq!(Ring::new(4), Err(Error::InvalidModulus(4)));
        assert!(Ring::new(1).is_err());
    }

    #[test]
    fn character_values() {
        let r3 = Ring::new(3).unwrap();
        let chi = AdditiveCharacter::standard(r3);
        assert!((chi.eval(0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((chi.eval(1) - w).norm() < 1e-15);
        let chi9 = AdditiveCharacter::new(Ring::new(9).unwrap(), 2).unwrap();
        let w = Complex64::from_polar(1.0, 4.0 * PI / 3.0);
        assert!((chi9.eval(3) - w).norm() < 1e-12);
        assert!(AdditiveCharacter::new(Ring::new(9).unwrap(), 3).is_err());
    }

    #[test]
    fn character_is_additive_and_primitive() {
        for m in [3u64, 9, 15, 45] {
            let ring = Ring::new(m).unwrap();
            for s in ring.units() {
                let chi = AdditiveCharacter::new(ring, s).unwrap();
                for a in 0..m as i64 {
                    for b in 0..m as i64 {
                        let lhs = chi.eval(ring.add(a, b));
                        assert!((lhs - chi.eval(a) * chi.eval(b)).norm() < 1e-12);
                    }
                }
                for d in 1..m {
                    if m % d == 0 {
                        assert!(
                            (0..m / d).any(|k| (chi.eval((k * d) as i64) - 1.0).norm() > 1e-9),
                            "ideal {d}Z/{m} lies in the kernel"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(1, 15), 1);
        assert_eq!(jacobi(2, 3), -1);
        assert_eq!(jacobi(2, 15), 1);
        assert_eq!(jacobi(3, 9), 0);
        assert_eq!(jacobi(-1, 3), -1);
    }

    #[test]
    fn ring_sign_examples() {
        let r3 = Ring::new(3).unwrap();
        assert_eq!(ring_sign(&r3, 1).unwrap(), 1);
        assert_eq!(ring_sign(&r3, 2).unwrap(), -1);
        let r9 = Ring::new(9).unwrap();
        assert_eq!(ring_sign(&r9, 2).unwrap(), 1);
        assert_eq!(ring_sign_by_cycles(&r9, 2).unwrap(), 1);
        assert!(ring_sign(&r9, 3).is_err());
    }

    #[test]
    fn zolotarev_exhaustive_to_99() {
        for m in (3..=99u64).step_by(2) {
            let ring = Ring::new(m).unwrap();
            for a in ring.units() {
                assert_eq!(
                    ring_sign_by_cycles(&ring, a).unwrap(),
                    jacobi(a, m),
                    "a={a} m={m}"
                );
            }
        }
    }

    #[test]
    fn ring_sign_is_multiplicative() {
        for m in [9u64, 15, 21, 27, 35] {
            let ring = Ring::new(m).unwrap();
            let units = ring.units();
            for &a in &units {
                for &b in &units {
                    assert_eq!(
                        ring_sign(&ring, ring.mul(a, b)).unwrap(),
                        ring_sign(&ring, a).unwrap() * ring_sign(&ring, b).unwrap()
                    );
                }
            }
        }
    }
}
