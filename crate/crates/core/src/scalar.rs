//! Number types used by the complexity computations.
//!
//! Everything in [`crate::learning`] is generic over [`Scalar`], so the same
//! code runs in binary floating point, in exact rationals, and in the
//! multi-quadratic field [`Surd`] (rationals extended by square roots of
//! rationals) that the stage-balancing reweighting needs.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Field operations plus the few extras the complexity code needs.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_u64(v: u64) -> Self {
        Self::from_ratio(v as i64, 1)
    }

    fn to_f64(&self) -> f64;

    /// `true` when comparisons are exact and `approx_eq` ignores its tolerance.
    fn is_exact() -> bool;

    /// Equality up to a relative tolerance; exact types compare exactly.
    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool;

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }

    /// Text form used by the JSON fixtures (`"3/2"`, `"0.25"`).
    fn to_text(&self) -> String;

    fn from_text(text: &str) -> Option<Self>;
}

/// Parses `"p/q"`, an integer, or a finite decimal into a rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.trim_start().starts_with('-');
        let int: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().ok()?;
        let magnitude = BigRational::new(int.abs() * &scale + frac, scale);
        return Some(if negative { -magnitude } else { magnitude });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// Scalars closed under square roots of non-negative values they produce.
pub trait SqrtScalar: Scalar {
    /// `None` for negative inputs or when the root leaves the representable set.
    fn sqrt(&self) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_exact() -> bool {
        false
    }

    fn approx_eq(&self, other: &Self, rel_tol: f64) -> bool {
        let scale = self.abs().max(other.abs()).max(1.0);
        (self - other).abs() <= rel_tol * scale
    }

    fn to_text(&self) -> String {
        format!("{self}")
    }

    fn from_text(text: &str) -> Option<Self> {
        match text.trim().parse::<f64>() {
            Ok(v) => Some(v),
            Err(_) => parse_rational(text).map(|q| Scalar::to_f64(&q)),
        }
    }
}

impl SqrtScalar for f64 {
    fn sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }
}

impl Scalar for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }

    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    fn from_text(text: &str) -> Option<Self> {
        parse_rational(text)
    }
}

/// Rational square root when one exists.
pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// A product of square roots `√q₁·√q₂·…` with distinct positive radicands,
/// stored sorted. The empty product is 1.
type Radical = Vec<BigRational>;

/// Exact element of `ℚ(√q₁, …, √q_j)`: a finite sum `Σ c · √q₁⋯√q_i`.
///
/// The representation is not unique (`√2·√8` and `4` are different terms),
/// but equality and ordering go through an exact sign procedure, so they are
/// semantic. Signs are decided recursively: writing `x = A + B√q` with `A`,
/// `B` free of `q`, the sign follows from `sign A`, `sign B` and
/// `sign(A² − q B²)`. A floating-point filter answers first whenever the
/// approximate value is far from zero relative to the term magnitudes.
#[derive(Clone, Default)]
pub struct Surd {
    terms: BTreeMap<Radical, BigRational>,
}

impl Surd {
    pub fn rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Vec::new(), q);
        }
        Surd { terms }
    }

    /// `√q` for a non-negative rational `q`.
    pub fn sqrt_of(q: &BigRational) -> Option<Self> {
        if q.is_negative() {
            return None;
        }
        if let Some(root) = rational_sqrt(q) {
            return Some(Surd::rational(root));
        }
        // √(a/b) = √(ab)/b, then pull small square factors out of ab so that
        // equal radicals usually get equal keys.
        let mut radicand = q.numer() * q.denom();
        let mut coeff = BigRational::new(BigInt::one(), q.denom().clone());
        for p in 2u32..1000 {
            let sq = BigInt::from(p * p);
            if sq > radicand {
                break;
            }
            while (&radicand % &sq).is_zero() {
                radicand /= &sq;
                coeff *= BigRational::from_integer(BigInt::from(p));
            }
        }
        let mut terms = BTreeMap::new();
        if radicand.is_one() {
            terms.insert(Vec::new(), coeff);
        } else {
            terms.insert(vec![BigRational::from_integer(radicand)], coeff);
        }
        Some(Surd { terms })
    }

    /// The rational value, if no radical survives.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, radical: Radical, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(radical);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn mul_radicals(a: &Radical, b: &Radical) -> (Radical, BigRational) {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut factor = BigRational::one();
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    factor *= &a[i];
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        (out, factor)
    }

    fn largest_radicand(&self) -> Option<BigRational> {
        self.terms
            .keys()
            .filter_map(|r| r.last())
            .max()
            .cloned()
    }

    /// Splits `self = A + B·√q` where neither `A` nor `B` mentions `q`.
    fn split(&self, q: &BigRational) -> (Surd, Surd) {
        let mut a = Surd::default();
        let mut b = Surd::default();
        for (rad, c) in &self.terms {
            if let Some(pos) = rad.iter().position(|x| x == q) {
                let mut rest = rad.clone();
                rest.remove(pos);
                b.add_term(rest, c.clone());
            } else {
                a.add_term(rad.clone(), c.clone());
            }
        }
        (a, b)
    }

    fn float_filter(&self) -> Option<Ordering> {
        let mut value = 0.0f64;
        let mut magnitude = 0.0f64;
        for (rad, c) in &self.terms {
            let mut t = ToPrimitive::to_f64(c)?;
            for q in rad {
                t *= ToPrimitive::to_f64(q)?.sqrt();
            }
            if !t.is_finite() {
                return None;
            }
            value += t;
            magnitude += t.abs();
        }
        // Each term carries a relative error of a few ulps; 1e-9 leaves orders
        // of magnitude of headroom for up to thousands of terms.
        if magnitude.is_finite() && value.abs() > 1e-9 * magnitude {
            Some(if value > 0.0 { Ordering::Greater } else { Ordering::Less })
        } else {
            None
        }
    }

    /// Exact sign of the value.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        if let Some(s) = self.float_filter() {
            return s;
        }
        self.exact_sign()
    }

    fn exact_sign(&self) -> Ordering {
        let Some(q) = self.largest_radicand() else {
            let c = self.terms.get(&Vec::new()).cloned().unwrap_or_default();
            return c.cmp(&BigRational::zero());
        };
        let (a, b) = self.split(&q);
        let sa = a.signum();
        let sb = b.signum();
        if sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal || sa == sb {
            return sb;
        }
        let q_surd = Surd::rational(q);
        let d = a.clone() * a - q_surd * b.clone() * b;
        match d.signum() {
            Ordering::Equal => Ordering::Equal,
            Ordering::Greater => sa,
            Ordering::Less => sb,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(&self) -> Option<Surd> {
        if self.terms.is_empty() {
            return None;
        }
        if self.terms.len() == 1 {
            let (rad, c) = self.terms.iter().next().unwrap();
            let mut denom = c.clone();
            for q in rad {
                denom *= q;
            }
            let mut out = Surd::default();
            out.add_term(rad.clone(), denom.recip());
            return Some(out);
        }
        let q = self.largest_radicand()?;
        let (a, b) = self.split(&q);
        let q_surd = Surd::rational(q.clone());
        let norm = a.clone() * a.clone() - q_surd * b.clone() * b.clone();
        // norm = 0 with self ≠ 0 only happens when √q is already expressible in
        // the other radicals, which no caller in this crate produces.
        let norm_inv = norm.inverse()?;
        let mut conj = a;
        for (rad, c) in b.terms {
            let (r, f) = Surd::mul_radicals(&rad, &vec![q.clone()]);
            conj.add_term(r, -(c * f));
        }
        Some(conj * norm_inv)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (rad, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for q in rad {
                write!(f, "·√({q})")?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).signum() == Ordering::Equal
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).signum())
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(mut self, rhs: Surd) -> Surd {
        for (rad, c) in rhs.terms {
            self.add_term(rad, c);
        }
        self
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, rhs: Surd) -> Surd {
        self + (-rhs)
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(mut self) -> Surd {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, rhs: Surd) -> Surd {
        let mut out = Surd::default();
        for (ra, ca) in &self.terms {
            for (rb, cb) in &rhs.terms {
                let (rad, factor) = Surd::mul_radicals(ra, rb);
                out.add_term(rad, ca * cb * factor);
            }
        }
        out
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, rhs: Surd) -> Surd {
        let inv = rhs.inverse().expect("division by zero surd");
        self * inv
    }
}

impl Zero for Surd {
    fn zero() -> Self {
        Surd::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Surd {
    fn one() -> Self {
        Surd::rational(BigRational::one())
    }
}

impl Scalar for Surd {
    fn from_ratio(num: i64, den: i64) -> Self {
        Surd::rational(BigRational::from_ratio(num, den))
    }

    fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(rad, c)| {
                rad.iter()
                    .fold(Scalar::to_f64(c), |acc, q| acc * Scalar::to_f64(q).sqrt())
            })
            .sum()
    }

    fn is_exact() -> bool {
        true
    }

    fn approx_eq(&self, other: &Self, _rel_tol: f64) -> bool {
        self == other
    }

    fn to_text(&self) -> String {
        self.to_string()
    }

    /// Only rational values can be read back.
    fn from_text(text: &str) -> Option<Self> {
        parse_rational(text).map(Surd::rational)
    }
}

impl SqrtScalar for Surd {
    fn sqrt(&self) -> Option<Self> {
        Surd::sqrt_of(&self.as_rational()?)
    }
}

impl From<BigRational> for Surd {
    fn from(q: BigRational) -> Self {
        Surd::rational(q)
    }
}
