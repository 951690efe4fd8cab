//! Exact arithmetic in the ring Q[pi^(1/2), pi^(-1/2)].
//!
//! Every exact quantity produced by this crate lives here: a finite sum
//! `sum_s q_s * pi^(s/2)` with rational coefficients `q_s` indexed by the
//! integer `s`. Gamma functions at half-integer arguments evaluate exactly
//! into this ring, which is what makes the generating-function determinants
//! exact end to end.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// An element of Q[pi^(1/2), pi^(-1/2)]: map from `s` to the coefficient of
/// `pi^(s/2)`. Zero coefficients are never stored, so equality is map equality.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PiLaurent {
    terms: BTreeMap<i32, Rational>,
}

impl PiLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_rational(q: Rational) -> Self {
        Self::monomial(0, q)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(rat(v, 1))
    }

    /// `q * pi^(s/2)`.
    pub fn monomial(s: i32, q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(s, q);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the support is contained in {s = 0}.
    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&s| s == 0)
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.is_rational() {
            return self.terms.get(&0).cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &Rational)> {
        self.terms.iter().map(|(&s, q)| (s, q))
    }

    fn insert_add(&mut self, s: i32, q: &Rational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(s).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&s, q)| (s, q * c)).collect(),
        }
    }

    /// Exact division. Succeeds when `rhs` is a monomial or when the division
    /// is remainder-free in the Laurent ring; otherwise `InexactDivision`.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        if rhs.terms.len() == 1 {
            let (&s2, q2) = rhs.terms.iter().next().unwrap();
            return Ok(Self {
                terms: self.terms.iter().map(|(&s, q)| (s - s2, q / q2)).collect(),
            });
        }
        // Long division in x = pi^(1/2) after shifting both operands to
        // ordinary polynomials; rhs then has a nonzero constant term, so
        // divisibility in Q[x] is equivalent to divisibility in the Laurent ring.
        let ma = *self.terms.keys().next().unwrap();
        let mb = *rhs.terms.keys().next().unwrap();
        let da = *self.terms.keys().next_back().unwrap() - ma;
        let db = *rhs.terms.keys().next_back().unwrap() - mb;
        if da < db {
            return Err(Error::InexactDivision);
        }
        let mut rem: BTreeMap<i32, Rational> = self
            .terms
            .iter()
            .map(|(&s, q)| (s - ma, q.clone()))
            .collect();
        let div: BTreeMap<i32, Rational> =
            rhs.terms.iter().map(|(&s, q)| (s - mb, q.clone())).collect();
        let lead = div.get(&db).unwrap().clone();
        let mut quo: BTreeMap<i32, Rational> = BTreeMap::new();
        while let Some(&dr) = rem.keys().next_back() {
            if dr < db {
                return Err(Error::InexactDivision);
            }
            let c = rem.get(&dr).unwrap() / &lead;
            for (&s, q) in &div {
                let t = dr - db + s;
                let entry = rem.entry(t).or_insert_with(Rational::zero);
                *entry -= &c * q;
                if entry.is_zero() {
                    rem.remove(&t);
                }
            }
            quo.insert(dr - db, c);
        }
        Ok(Self {
            terms: quo.into_iter().map(|(s, q)| (s + ma - mb, q)).collect(),
        })
    }

    /// Evaluate with pi at double precision. Overflowing coefficients map to
    /// +/- infinity.
    pub fn to_f64(&self) -> f64 {
        let mut acc = 0.0;
        for (&s, q) in &self.terms {
            let c = rational_to_f64(q);
            let half = s.rem_euclid(2) == 1;
            let int_part = if half { (s - 1) / 2 } else { s / 2 };
            let mut p = std::f64::consts::PI.powi(int_part);
            if half {
                p *= std::f64::consts::PI.sqrt();
            }
            acc += c * p;
        }
        acc
    }

    /// Fixed textual grammar, e.g. `1 - 385024/135135*pi^(-1)`. The constant
    /// term prints first, remaining terms follow in descending `s`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<i32> = Vec::new();
        if self.terms.contains_key(&0) {
            keys.push(0);
        }
        let mut rest: Vec<i32> = self.terms.keys().copied().filter(|&s| s != 0).collect();
        rest.sort_unstable_by(|a, b| b.cmp(a));
        keys.extend(rest);

        let mut out = String::new();
        for (i, s) in keys.iter().enumerate() {
            let q = &self.terms[s];
            let neg = q.is_negative();
            let mag = if neg { -q.clone() } else { q.clone() };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if *s == 0 {
                out.push_str(&rational_text(&mag));
            } else {
                out.push_str(&rational_text(&mag));
                out.push_str("*pi^(");
                if s % 2 == 0 {
                    out.push_str(&(s / 2).to_string());
                } else {
                    out.push_str(&format!("{}/2", s));
                }
                out.push(')');
            }
        }
        out
    }

    /// JSON encoding `{"terms": {"<s>": "num/den", ...}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (&s, q) in &self.terms {
            map.insert(s.to_string(), serde_json::Value::String(rational_text(q)));
        }
        serde_json::json!({ "terms": map })
    }
}

fn rational_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Robust BigRational -> f64 conversion: shifts numerator and denominator into
/// range when either exceeds f64 limits.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() || q.numer().bits() > 1020 {
            return v;
        }
    }
    let nb = q.numer().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = (nb.max(db) - 900).max(0) as u64;
    let n = (q.numer() >> shift).to_f64().unwrap_or(f64::INFINITY);
    let d = (q.denom() >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}

impl fmt::Display for PiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for PiLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &PiLaurent {
    type Output = PiLaurent;
    fn add(self, rhs: &PiLaurent) -> PiLaurent {
        let mut out = self.clone();
        for (&s, q) in &rhs.terms {
            out.insert_add(s, q);
        }
        out
    }
}

impl Sub for &PiLaurent {
    type Output = PiLaurent;
    fn sub(self, rhs: &PiLaurent) -> PiLaurent {
        let mut out = self.clone();
        for (&s, q) in &rhs.terms {
            let neg = -q.clone();
            out.insert_add(s, &neg);
        }
        out
    }
}

impl Mul for &PiLaurent {
    type Output = PiLaurent;
    fn mul(self, rhs: &PiLaurent) -> PiLaurent {
        let mut out = PiLaurent::zero();
        for (&s1, q1) in &self.terms {
            for (&s2, q2) in &rhs.terms {
                out.insert_add(s1 + s2, &(q1 * q2));
            }
        }
        out
    }
}

impl Neg for &PiLaurent {
    type Output = PiLaurent;
    fn neg(self) -> PiLaurent {
        PiLaurent {
            terms: self.terms.iter().map(|(&s, q)| (s, -q.clone())).collect(),
        }
    }
}

/// Gamma(two_x / 2), exact. Pure rational for even `two_x`, a rational times
/// pi^(1/2) for odd `two_x`.
pub fn gamma_half(two_x: u32) -> Result<PiLaurent> {
    if two_x == 0 {
        return Err(Error::Domain("gamma_half requires a positive argument".into()));
    }
    let (s, mut q, start) = if two_x % 2 == 1 {
        (1, Rational::one(), 1)
    } else {
        (0, Rational::one(), 2)
    };
    let mut t = start;
    while t < two_x {
        q *= rat(t as i64, 2);
        t += 2;
    }
    Ok(PiLaurent::monomial(s, q))
}

/// Gamma(two_a/2) / Gamma(two_b/2) as a single monomial.
pub fn gamma_half_ratio(two_a: u32, two_b: u32) -> Result<PiLaurent> {
    let a = gamma_half(two_a)?;
    let b = gamma_half(two_b)?;
    a.checked_div(&b)
}

/// Factorial as a big integer.
pub fn factorial_big(n: u32) -> BigInt {
    let mut out = BigInt::one();
    for t in 2..=n {
        out *= t;
    }
    out
}

/// Binomial coefficient as a rational (exact).
pub fn binomial_rat(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - i;
        den *= i + 1;
    }
    Rational::new(num, den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pl(pairs: &[(i32, i64, i64)]) -> PiLaurent {
        let mut out = PiLaurent::zero();
        for &(s, n, d) in pairs {
            out = &out + &PiLaurent::monomial(s, rat(n, d));
        }
        out
    }

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(1).unwrap(), PiLaurent::monomial(1, rat(1, 1)));
        assert_eq!(gamma_half(7).unwrap(), PiLaurent::monomial(1, rat(15, 8)));
        assert_eq!(gamma_half(8).unwrap(), PiLaurent::from_int(6));
        assert!(gamma_half(0).is_err());
    }

    #[test]
    fn gamma_recursion_holds() {
        for two_x in 1..=200u32 {
            let left = gamma_half(two_x + 2).unwrap();
            let right = &gamma_half(two_x).unwrap() * &PiLaurent::from_rational(rat(two_x as i64, 2));
            assert_eq!(left, right, "two_x={two_x}");
        }
    }

    #[test]
    fn legendre_duplication_holds() {
        // Gamma(L/2) Gamma((L+1)/2) = 2^(1-L) sqrt(pi) Gamma(L)
        for l in 1..=100u32 {
            let lhs = &gamma_half(l).unwrap() * &gamma_half(l + 1).unwrap();
            let two_pow = Rational::new(BigInt::from(2), BigInt::one() << (l as usize));
            let rhs = &PiLaurent::monomial(1, two_pow) * &gamma_half(2 * l).unwrap();
            assert_eq!(lhs, rhs, "L={l}");
        }
    }

    #[test]
    fn ring_op_examples() {
        // (1 + 2 pi^(1/2)) * pi^(-1/2) = pi^(-1/2) + 2
        let a = pl(&[(0, 1, 1), (1, 2, 1)]);
        let b = PiLaurent::monomial(-1, rat(1, 1));
        assert_eq!(&a * &b, pl(&[(-1, 1, 1), (0, 2, 1)]));
        // (6 pi^(1/2)) / (2 pi^(1/2)) = 3
        let c = PiLaurent::monomial(1, rat(6, 1));
        let d = PiLaurent::monomial(1, rat(2, 1));
        assert_eq!(c.checked_div(&d).unwrap(), PiLaurent::from_int(3));
    }

    #[test]
    fn exact_polynomial_division() {
        // (1 + pi^(1/2))^2 / (1 + pi^(1/2))
        let b = pl(&[(0, 1, 1), (1, 1, 1)]);
        let a = &b * &b;
        assert_eq!(a.checked_div(&b).unwrap(), b);
        // inexact: (1 + pi) / (1 + pi^(1/2)) has no Laurent quotient
        let p = pl(&[(0, 1, 1), (2, 1, 1)]);
        assert!(matches!(
            p.checked_div(&b),
            Err(Error::InexactDivision)
        ));
    }

    #[test]
    fn to_f64_examples() {
        assert!((PiLaurent::from_rational(rat(11, 35)).to_f64() - 0.3142857142857143).abs() < 1e-15);
        assert!((PiLaurent::monomial(-2, rat(1, 1)).to_f64() - 0.3183098861837907).abs() < 1e-15);
        // float image of the L=5 all-complex probability polynomial
        let v = pl(&[(0, 1, 1), (-2, -385024, 135135), (-4, 16777216, 18729711)]);
        assert!((v.to_f64() - 0.18383656430601154).abs() < 1e-13);
    }

    #[test]
    fn text_grammar() {
        assert_eq!(PiLaurent::zero().to_text(), "0");
        assert_eq!(PiLaurent::from_rational(rat(11, 35)).to_text(), "11/35");
        let v = pl(&[(0, 1, 1), (-2, -385024, 135135), (-4, 16777216, 18729711)]);
        assert_eq!(
            v.to_text(),
            "1 - 385024/135135*pi^(-1) + 16777216/18729711*pi^(-2)"
        );
        let w = pl(&[(1, 1, 2), (0, 2, 1)]);
        assert_eq!(w.to_text(), "2 + 1/2*pi^(1/2)");
    }

    #[test]
    fn json_encoding() {
        let v = pl(&[(0, 1, 1), (-2, -1, 3)]);
        assert_eq!(
            v.to_json().to_string(),
            r#"{"terms":{"-2":"-1/3","0":"1"}}"#
        );
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::new(
            BigInt::from(10).pow(400) + 1,
            BigInt::from(10).pow(402) * 3,
        );
        let v = rational_to_f64(&big);
        assert!((v - 1.0 / 300.0).abs() < 1e-12);
    }

    fn arb_value() -> impl Strategy<Value = PiLaurent> {
        proptest::collection::vec(((-6i32..6), (-40i64..40), (1i64..20)), 0..5)
            .prop_map(|v| pl(&v))
    }

    proptest! {
        #[test]
        fn additive_inverse(a in arb_value()) {
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn ring_axioms(a in arb_value(), b in arb_value(), c in arb_value()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn to_f64_additive(a in arb_value(), b in arb_value()) {
            let lhs = (&a + &b).to_f64();
            let rhs = a.to_f64() + b.to_f64();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn mul_div_roundtrip(a in arb_value(), b in arb_value()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(prod.checked_div(&b).unwrap(), a);
        }
    }
}
