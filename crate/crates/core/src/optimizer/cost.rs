//! Monomial cost terms `c · n^α r^β s^γ λ^δ` with exact exponents.

use std::fmt;
use std::ops::Mul;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Index of each symbol in [`CostTerm::exponents`].
pub const N: usize = 0;
pub const R: usize = 1;
pub const S: usize = 2;
pub const LAMBDA: usize = 3;

const SYMBOLS: [&str; 4] = ["n", "r", "s", "λ"];

pub fn ratio(num: i64, den: i64) -> Rational64 {
    Rational64::new(num, den)
}

/// Concrete values of `(n, r, s, λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub n: f64,
    pub r: f64,
    pub s: f64,
    pub lambda: f64,
}

impl Point {
    fn ln(&self) -> [f64; 4] {
        [self.n.ln(), self.r.ln(), self.s.ln(), self.lambda.ln()]
    }
}

/// Exponent of `n` as an affine function `constant + x·X − t·T + y·Λ` of
/// the substitution `r = n^x`, `s = n^{−t}`, `λ = n^y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Affine {
    pub constant: Rational64,
    pub x: Rational64,
    pub t: Rational64,
    pub y: Rational64,
}

impl Affine {
    pub fn at(&self, x: Rational64, t: Rational64, y: Rational64) -> Rational64 {
        self.constant + self.x * x + self.t * t + self.y * y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CostTerm {
    pub coefficient: f64,
    pub exponents: [Rational64; 4],
}

impl Default for CostTerm {
    fn default() -> Self {
        CostTerm::one()
    }
}

impl CostTerm {
    pub fn one() -> Self {
        CostTerm {
            coefficient: 1.0,
            exponents: [Rational64::zero(); 4],
        }
    }

    fn symbol(i: usize, e: Rational64) -> Self {
        let mut t = CostTerm::one();
        t.exponents[i] = e;
        t
    }

    pub fn n(e: Rational64) -> Self {
        Self::symbol(N, e)
    }

    pub fn r(e: Rational64) -> Self {
        Self::symbol(R, e)
    }

    pub fn s(e: Rational64) -> Self {
        Self::symbol(S, e)
    }

    pub fn lambda(e: Rational64) -> Self {
        Self::symbol(LAMBDA, e)
    }

    /// `(n/r)^e`.
    pub fn n_over_r(e: Rational64) -> Self {
        Self::n(e) * Self::r(-e)
    }

    pub fn with_coefficient(mut self, c: f64) -> Self {
        self.coefficient = c;
        self
    }

    pub fn exponent(&self, symbol: usize) -> Rational64 {
        self.exponents[symbol]
    }

    pub fn pow(&self, e: Rational64) -> Self {
        let e_f = e.to_f64().expect("small rational");
        CostTerm {
            coefficient: self.coefficient.powf(e_f),
            exponents: self.exponents.map(|x| x * e),
        }
    }

    pub fn sqrt(&self) -> Self {
        self.pow(ratio(1, 2))
    }

    pub fn depends_on(&self, symbol: usize) -> bool {
        !self.exponents[symbol].is_zero()
    }

    pub fn ln_eval(&self, p: &Point) -> f64 {
        let ln = p.ln();
        self.coefficient.ln()
            + self
                .exponents
                .iter()
                .zip(ln)
                .map(|(e, l)| if e.is_zero() { 0.0 } else { e.to_f64().unwrap() * l })
                .sum::<f64>()
    }

    pub fn eval(&self, p: &Point) -> f64 {
        self.ln_eval(p).exp()
    }

    pub fn affine(&self) -> Affine {
        Affine {
            constant: self.exponents[N],
            x: self.exponents[R],
            t: -self.exponents[S],
            y: self.exponents[LAMBDA],
        }
    }

    /// Exponent of `n` under `r = n^x`, `s = n^{−t}`, `λ = n^y`.
    pub fn exponent_at(&self, x: Rational64, t: Rational64, y: Rational64) -> Rational64 {
        self.affine().at(x, t, y)
    }
}

impl Mul for CostTerm {
    type Output = CostTerm;
    fn mul(self, rhs: CostTerm) -> CostTerm {
        let mut exponents = self.exponents;
        for (a, b) in exponents.iter_mut().zip(rhs.exponents) {
            *a += b;
        }
        CostTerm {
            coefficient: self.coefficient * rhs.coefficient,
            exponents,
        }
    }
}

impl Mul<&CostTerm> for &CostTerm {
    type Output = CostTerm;
    fn mul(self, rhs: &CostTerm) -> CostTerm {
        self.clone() * rhs.clone()
    }
}

pub fn fmt_ratio(e: Rational64) -> String {
    if e.is_integer() {
        e.to_integer().to_string()
    } else {
        format!("{}/{}", e.numer(), e.denom())
    }
}

impl fmt::Display for CostTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.coefficient != 1.0 {
            parts.push(format!("{}", self.coefficient));
        }
        for (sym, e) in SYMBOLS.iter().zip(self.exponents) {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(sym.to_string());
            } else if e.is_integer() && e.is_positive() {
                parts.push(format!("{sym}^{}", e.to_integer()));
            } else {
                parts.push(format!("{sym}^({})", fmt_ratio(e)));
            }
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("·"))
        }
    }
}

impl Serialize for CostTerm {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_and_display() {
        let t = CostTerm::s(ratio(1, 1)) * CostTerm::r(ratio(2, 1));
        assert_eq!(t.to_string(), "r^2·s");
        let u = CostTerm::n_over_r(ratio(3, 2)).sqrt();
        assert_eq!(u.to_string(), "n^(3/4)·r^(-3/4)");
        assert_eq!(CostTerm::one().to_string(), "1");
        assert_eq!(u.exponent_at(ratio(1, 3), ratio(0, 1), ratio(0, 1)), ratio(1, 2));
    }

    #[test]
    fn evaluation_uses_logs() {
        let t = CostTerm::n(ratio(1, 2)) * CostTerm::r(ratio(3, 1)) * CostTerm::s(ratio(-1, 1));
        let p = Point {
            n: 1e6,
            r: 100.0,
            s: 0.5,
            lambda: 1.0,
        };
        assert!((t.eval(&p) - 1e3 * 1e6 * 2.0).abs() < 1e-3);
    }
}
