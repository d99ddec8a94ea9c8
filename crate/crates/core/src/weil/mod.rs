//! Weil characters: the brute-force matrix oracle and the closed formulas.

mod algebra;
mod formula;
mod identities;
mod oracle;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gauss::FourthRoot;

pub use algebra::AlgebraElement;
pub use formula::{
    closed_value, closed_value_with_q, conv_coeff, psi_pm, value_involution, value_invertible,
    value_odd,
};
pub use identities::{verify_identities, CheckResult, VerifyOptions};
pub use oracle::{Oracle, ORACLE_LIMIT, PIVOT_THRESHOLD};

/// `eps * sqrt(c)` with `eps` a fourth root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterValue {
    pub c: u64,
    pub eps: FourthRoot,
}

impl CharacterValue {
    pub fn new(c: u64, eps: FourthRoot) -> Self {
        CharacterValue { c, eps }
    }

    pub fn to_complex(self) -> Complex64 {
        self.eps.to_complex() * (self.c as f64).sqrt()
    }

    /// `(c1 c2, eps1 eps2)`; exact since `sqrt(c1) sqrt(c2) = sqrt(c1 c2)`.
    pub fn mul(self, other: CharacterValue) -> CharacterValue {
        CharacterValue { c: self.c * other.c, eps: self.eps.mul(other.eps) }
    }

    pub fn neg(self) -> CharacterValue {
        CharacterValue { c: self.c, eps: self.eps.neg() }
    }

    pub fn is_rational(self) -> bool {
        self.eps.is_real() && is_square(self.c)
    }
}

impl fmt::Display for CharacterValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_complex(self.to_complex()))
    }
}

pub(crate) fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    r * r == n
}

pub(crate) fn isqrt(n: u64) -> Option<u64> {
    let r = (n as f64).sqrt().round() as u64;
    (r * r == n).then_some(r)
}

fn format_real(x: f64) -> String {
    let digits = 12i32;
    let mag = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

/// `a+bi` with 12 significant digits; zero parts are dropped.
pub fn format_complex(z: Complex64) -> String {
    let tiny = 1e-9 * z.norm().max(1.0);
    let re = if z.re.abs() < tiny { 0.0 } else { z.re };
    let im = if z.im.abs() < tiny { 0.0 } else { z.im };
    match (re == 0.0, im == 0.0) {
        (true, true) => "0".to_string(),
        (false, true) => format_real(re),
        (true, false) => format!("{}i", format_real(im)),
        (false, false) => {
            let i = format_real(im);
            let sign = if i.starts_with('-') { "" } else { "+" };
            format!("{}{}{}i", format_real(re), sign, i)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(format_complex(Complex64::new(3.0, 0.0)), "3");
        assert_eq!(format_complex(Complex64::new(-1.0, 1e-14)), "-1");
        assert_eq!(format_complex(Complex64::new(0.0, -3f64.sqrt())), "-1.73205080757i");
        assert_eq!(format_complex(Complex64::new(0.5, 2.0)), "0.5+2i");
        assert_eq!(format_complex(Complex64::new(0.0, 0.0)), "0");
    }

    #[test]
    fn character_value_arithmetic() {
        let a = CharacterValue::new(3, FourthRoot::MINUS_I);
        let b = CharacterValue::new(3, FourthRoot::I);
        assert_eq!(a.mul(b), CharacterValue::new(9, FourthRoot::ONE));
        assert!((a.to_complex() - Complex64::new(0.0, -3f64.sqrt())).norm() < 1e-12);
        assert!(!a.is_rational());
        assert!(CharacterValue::new(9, FourthRoot::MINUS_ONE).is_rational());
        assert_eq!(a.to_string(), "-1.73205080757i");
    }
}
