//! Polynomials over the pi-Laurent ring and exact determinants of matrices of
//! such polynomials, via fraction-free (Bareiss) elimination with a cofactor
//! expansion retained as an oracle for small sizes.

use crate::error::{Error, Result};
use crate::ring::PiLaurent;

/// Dense polynomial in one variable with [`PiLaurent`] coefficients;
/// `coeffs[d]` is the coefficient of degree `d`. Trailing zeros are trimmed.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly {
    coeffs: Vec<PiLaurent>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: PiLaurent) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(PiLaurent::one())
    }

    pub fn from_coeffs(coeffs: Vec<PiLaurent>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, d: usize) -> PiLaurent {
        self.coeffs.get(d).cloned().unwrap_or_else(PiLaurent::zero)
    }

    pub fn coeffs(&self) -> &[PiLaurent] {
        &self.coeffs
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for d in 0..n {
            out.push(&self.coeff(d) + &rhs.coeff(d));
        }
        Self::from_coeffs(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for d in 0..n {
            out.push(&self.coeff(d) - &rhs.coeff(d));
        }
        Self::from_coeffs(out)
    }

    pub fn neg(&self) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![PiLaurent::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Self::from_coeffs(out)
    }

    /// Exact polynomial division; errors when the division leaves a remainder.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("polynomial division by zero".into()));
        }
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let db = rhs.degree().unwrap();
        let lead = &rhs.coeffs[db];
        let mut rem = self.clone();
        let mut quo = vec![PiLaurent::zero(); self.coeffs.len()];
        while let Some(dr) = rem.degree() {
            if dr < db {
                return Err(Error::InexactDivision);
            }
            let c = rem.coeffs[dr].checked_div(lead)?;
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let idx = dr - db + j;
                rem.coeffs[idx] = &rem.coeffs[idx] - &(&c * b);
            }
            rem.trim();
            quo[dr - db] = c;
        }
        Ok(Self::from_coeffs(quo))
    }

    /// Sum of all coefficients (the value at 1).
    pub fn eval_one(&self) -> PiLaurent {
        let mut out = PiLaurent::zero();
        for c in &self.coeffs {
            out = &out + c;
        }
        out
    }
}

/// Fraction-free Bareiss determinant. Divisions are guaranteed exact over an
/// integral domain; a failed division therefore indicates a bug.
pub fn det_bareiss(m: &[Vec<Poly>]) -> Result<Poly> {
    let n = m.len();
    if n == 0 {
        return Ok(Poly::one());
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    for row in &a {
        if row.len() != n {
            return Err(Error::Domain("determinant of a non-square matrix".into()));
        }
    }
    let mut sign = false;
    let mut prev = Poly::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !a[r][k].is_zero());
            match swap {
                Some(r) => {
                    a.swap(k, r);
                    sign = !sign;
                }
                None => return Ok(Poly::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.checked_div(&prev)?;
            }
        }
        for i in k + 1..n {
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if sign { det.neg() } else { det })
}

/// Cofactor-expansion determinant, exponential cost; oracle for sizes <= 6.
pub fn det_cofactor(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = Poly::zero();
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = (1..n)
            .map(|r| {
                (0..n)
                    .filter(|&cc| cc != c)
                    .map(|cc| m[r][cc].clone())
                    .collect()
            })
            .collect();
        let term = m[0][c].mul(&det_cofactor(&minor));
        out = if c % 2 == 0 {
            out.add(&term)
        } else {
            out.sub(&term)
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, PiLaurent};

    fn c(n: i64, d: i64) -> Poly {
        Poly::constant(PiLaurent::from_rational(rat(n, d)))
    }

    fn linear(a: i64, b: i64) -> Poly {
        // a + b t
        Poly::from_coeffs(vec![
            PiLaurent::from_rational(rat(a, 1)),
            PiLaurent::from_rational(rat(b, 1)),
        ])
    }

    #[test]
    fn small_determinants() {
        let m = vec![vec![c(1, 1), c(2, 1)], vec![c(3, 1), c(4, 1)]];
        assert_eq!(det_bareiss(&m).unwrap(), c(-2, 1));
        assert_eq!(det_cofactor(&m), c(-2, 1));
    }

    #[test]
    fn bareiss_matches_cofactor_on_random_poly_matrices() {
        // deterministic pseudo-random small integer polynomial matrices
        let mut state = 12345u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        for n in 1..=6 {
            for _ in 0..3 {
                let m: Vec<Vec<Poly>> = (0..n)
                    .map(|_| (0..n).map(|_| linear(next(), next())).collect())
                    .collect();
                assert_eq!(det_bareiss(&m).unwrap(), det_cofactor(&m));
            }
        }
    }

    #[test]
    fn zero_pivot_column_gives_zero() {
        let m = vec![
            vec![Poly::zero(), c(1, 1)],
            vec![Poly::zero(), c(2, 1)],
        ];
        assert!(det_bareiss(&m).unwrap().is_zero());
    }

    #[test]
    fn polynomial_division_exactness() {
        let p = linear(1, 2).mul(&linear(-3, 5));
        assert_eq!(p.checked_div(&linear(-3, 5)).unwrap(), linear(1, 2));
        assert!(linear(1, 1).mul(&linear(1, 1)).add(&Poly::one()).checked_div(&linear(1, 1)).is_err());
    }
}
