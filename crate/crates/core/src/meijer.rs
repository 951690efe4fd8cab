//! Exact evaluation of the Meijer G-functions at unit argument that appear as
//! moment-matrix entries for products of truncated orthogonal matrices.
//!
//! Three routes are implemented and cross-checked against each other:
//!   * a finite gamma-ratio sum for a single factor with even truncation,
//!   * a double sum for two factors with even truncations,
//!   * a three-term-recurrence reduction scheme that works for any number of
//!     factors as long as every truncation is even.
//!
//! A single factor with odd truncation has its own finite sum; the odd
//! truncation L = 1 falls outside that sum and is evaluated from the
//! Chebyshev-type moments of the arcsine weight. No exact route is known for
//! odd truncations with two or more factors.

use std::collections::HashMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::ring::{factorial_big, gamma_half, gamma_half_ratio, rat, PiLaurent, Rational};

/// Indices plus per-factor offset pairs parameterizing the G-function family
/// during reduction. The initial state for truncations `Ls` has
/// `u_i = v_i = L_i / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GReductionState {
    pub j: u32,
    pub k: u32,
    pub offsets: Vec<(u32, u32)>,
}

impl GReductionState {
    pub fn initial(j: u32, k: u32, ls: &[u32]) -> Self {
        Self {
            j,
            k,
            offsets: ls.iter().map(|&l| (l / 2, l / 2)).collect(),
        }
    }
}

/// Exact value of the moment G-function for indices (j, k) and truncations
/// `ls`. All truncations even: recurrence reduction. Single odd truncation:
/// routed to [`meijer_entry_odd_m1`]. Odd truncation with m >= 2: no exact
/// path.
pub fn meijer_entry(j: u32, k: u32, ls: &[u32]) -> Result<PiLaurent> {
    check_indices(j, k)?;
    if ls.is_empty() {
        return Err(Error::Domain("at least one truncation required".into()));
    }
    if ls.iter().all(|&l| l % 2 == 0) {
        let state = GReductionState::initial(j, k, ls);
        let mut eval = Reducer::new(j, k);
        let us: Vec<u32> = state.offsets.iter().map(|p| p.0).collect();
        let vs: Vec<u32> = state.offsets.iter().map(|p| p.1).collect();
        return eval.value(us, vs);
    }
    if ls.len() == 1 {
        return meijer_entry_odd_m1(j, k, ls[0]);
    }
    Err(Error::UnsupportedExact(format!(
        "odd truncation with {} factors; use the numeric quadrature route",
        ls.len()
    )))
}

/// Single factor, even truncation: finite gamma-ratio sum.
pub fn meijer_closed_m1(j: u32, k: u32, l: u32) -> Result<PiLaurent> {
    check_indices(j, k)?;
    if l == 0 || l % 2 != 0 {
        return Err(Error::Domain(format!("truncation {l} must be even and positive")));
    }
    let mut total = PiLaurent::zero();
    for ell in 1..=l / 2 {
        // Gamma(j+k+ell-3/2) Gamma(L-ell) / (Gamma(j+ell-1/2) Gamma(L/2-ell+1))
        let t = gamma_half_ratio(2 * (j + k + ell) - 3, 2 * (j + ell) - 1)?;
        let c = Rational::new(
            factorial_big(l - ell - 1),
            factorial_big(l / 2 - ell),
        );
        total = &total + &t.scale(&c);
    }
    let pre = gamma_half_ratio(2 * j - 1, 2 * (l + j + k) - 3)?
        .scale(&Rational::new(One::one(), factorial_big(l / 2 - 1)));
    Ok(&pre * &total)
}

/// Single factor, odd truncation. For L >= 3 this is the finite double sum
/// whose value is a polynomial in 1/pi; the sum is empty for L = 1, which is
/// instead evaluated from arcsine-weight moments.
pub fn meijer_entry_odd_m1(j: u32, k: u32, l: u32) -> Result<PiLaurent> {
    check_indices(j, k)?;
    if l == 0 || l % 2 == 0 {
        return Err(Error::Domain(format!("truncation {l} must be odd")));
    }
    if l == 1 {
        return meijer_m1_arcsine(j, k);
    }
    let mut total = PiLaurent::zero();
    for p in 1..=(l - 1) / 2 {
        for q in 1..=k {
            let mut num = &gamma_half(2 * k)? * &gamma_half(2 * (p + q))?;
            num = &num * &gamma_half(2 * (l - p - 1))?;
            num = &num * &gamma_half(2 * (j + k - q) - 1)?;
            let mut den = &gamma_half(l - 1)? * &gamma_half(l + 1 - 2 * p)?;
            den = &den * &gamma_half(2 * (k - q + 1))?;
            den = &den * &gamma_half(2 * (j + k + l) - 3)?;
            let coeff = num.checked_div(&den)?;
            let b1 = PiLaurent::one()
                .checked_div(&(&gamma_half(1)? * &gamma_half(2 * (p + q) + 1)?))?;
            let b2 = PiLaurent::one()
                .checked_div(&(&gamma_half(2 * p + 1)? * &gamma_half(2 * q + 1)?))?;
            total = &total + &(&coeff * &(&b1 + &b2));
        }
    }
    Ok(total)
}

/// L = 1: the weight reduces to the arcsine density and the moment integral
/// evaluates termwise,
///   G = (2/pi) sum_{t=0}^{k-1} C(k-1,t) (-1)^t t! / (2t+1) *
///       Gamma(j-1/2)/Gamma(j+t+1/2).
fn meijer_m1_arcsine(j: u32, k: u32) -> Result<PiLaurent> {
    let mut total = PiLaurent::zero();
    let mut binom = Rational::one();
    for t in 0..k {
        if t > 0 {
            binom = binom * rat((k - t) as i64, 1) / rat(t as i64, 1);
        }
        let sign = if t % 2 == 0 { 1 } else { -1 };
        let mut c = binom.clone() * rat(sign, (2 * t + 1) as i64);
        c *= Rational::new(factorial_big(t), One::one());
        let term = gamma_half_ratio(2 * j - 1, 2 * (j + t) + 1)?.scale(&c);
        total = &total + &term;
    }
    Ok(&total * &PiLaurent::monomial(-2, rat(2, 1)))
}

/// Two factors, both truncations even: explicit double sum.
pub fn meijer_closed_m2(j: u32, k: u32, l1: u32, l2: u32) -> Result<PiLaurent> {
    check_indices(j, k)?;
    if l1 == 0 || l2 == 0 || l1 % 2 != 0 || l2 % 2 != 0 {
        return Err(Error::Domain("both truncations must be even and positive".into()));
    }
    let mut total = PiLaurent::zero();
    for p in 1..=l1 / 2 {
        let c1 = factor_coeff(j, k, l1, p)?;
        for q in 1..=l2 / 2 {
            let c2 = factor_coeff(j, k, l2, q)?;
            let mut bracket = &kernel_sum(j, k, p, q)? + &kernel_sum(j, k, q, p)?;
            let g = gamma_half(2 * j - 1)?;
            let den = &gamma_half(2 * (p + j) - 1)? * &gamma_half(2 * (q + j) - 1)?;
            bracket = &bracket + &(&g * &g).checked_div(&den)?;
            total = &total + &(&(&c1 * &c2) * &bracket);
        }
    }
    Ok(total)
}

/// Gamma(L-p) Gamma(j+k+p-3/2) / (Gamma(L/2) Gamma(L/2-p+1) Gamma(L+j+k-3/2))
fn factor_coeff(j: u32, k: u32, l: u32, p: u32) -> Result<PiLaurent> {
    let num = &gamma_half(2 * (l - p))? * &gamma_half(2 * (j + k + p) - 3)?;
    let den = &(&gamma_half(l)? * &gamma_half(2 * (l / 2 - p + 1))?)
        * &gamma_half(2 * (l + j + k) - 3)?;
    num.checked_div(&den)
}

/// The inner kernel of the two-factor sum,
///   K^{p,q}_{j,k} = Gamma(j-1/2)/(Gamma(p) Gamma(p+q+j+k-3/2)) *
///                   sum_l Gamma(j+k+l-3/2) Gamma(p+q-l) /
///                         (Gamma(j+l-1/2) Gamma(q-l+1)).
pub(crate) fn kernel_sum(j: u32, k: u32, p: u32, q: u32) -> Result<PiLaurent> {
    let mut total = PiLaurent::zero();
    for ell in 1..=q {
        let num = &gamma_half(2 * (j + k + ell) - 3)? * &gamma_half(2 * (p + q - ell))?;
        let den = &gamma_half(2 * (j + ell) - 1)? * &gamma_half(2 * (q - ell + 1))?;
        total = &total + &num.checked_div(&den)?;
    }
    let pre = gamma_half(2 * j - 1)?
        .checked_div(&(&gamma_half(2 * p)? * &gamma_half(2 * (p + q + j + k) - 3)?))?;
    Ok(&pre * &total)
}

fn check_indices(j: u32, k: u32) -> Result<()> {
    if j == 0 || k == 0 {
        return Err(Error::Domain("indices j, k must be positive".into()));
    }
    Ok(())
}

/// A step budget large enough for any supported parameter range; exceeding it
/// indicates a bug in the reduction, not a user error.
const REDUCTION_BUDGET: u64 = 50_000_000;

struct Reducer {
    j: u32,
    k: u32,
    memo: HashMap<(Vec<u32>, Vec<u32>), PiLaurent>,
    steps: u64,
}

impl Reducer {
    fn new(j: u32, k: u32) -> Self {
        Self {
            j,
            k,
            memo: HashMap::new(),
            steps: 0,
        }
    }

    /// Value of the family member with upper offsets `us` and lower offsets
    /// `vs` (each offset pair contributes the upper parameter u+k and the
    /// lower parameter 3/2-j-v).
    ///
    /// Terminal evaluations:
    ///   * all v = 0: the value is exactly 0;
    ///   * all u = 0: the value is prod_v Gamma(j-1/2)/Gamma(j-1/2+v).
    /// A vanished offset cancels its parameter against a repeated front
    /// parameter, shrinking the family order, so zero offsets are simply
    /// dropped. Otherwise one three-term recurrence step trades the pair
    /// (u, v) for (u-1, v) and (u, v-1); the denominator u+v+j+k-5/2 is a
    /// half-integer and never vanishes.
    fn value(&mut self, mut us: Vec<u32>, mut vs: Vec<u32>) -> Result<PiLaurent> {
        self.steps += 1;
        if self.steps > REDUCTION_BUDGET {
            panic!("Meijer-G reduction exceeded its step budget");
        }
        if vs.iter().all(|&v| v == 0) {
            return Ok(PiLaurent::zero());
        }
        us.retain(|&u| u > 0);
        vs.retain(|&v| v > 0);
        us.sort_unstable();
        vs.sort_unstable();
        if us.is_empty() {
            let mut out = PiLaurent::one();
            for &v in &vs {
                out = &out * &gamma_half_ratio(2 * self.j - 1, 2 * self.j - 1 + 2 * v)?;
            }
            return Ok(out);
        }
        let key = (us.clone(), vs.clone());
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let (u, v) = (us[0], vs[0]);
        let denom = rat(
            2 * (u as i64 + v as i64 + self.j as i64 + self.k as i64) - 5,
            2,
        );
        let mut us_a = us.clone();
        us_a[0] -= 1;
        let mut vs_b = vs.clone();
        vs_b[0] -= 1;
        let a = self.value(us_a, vs.clone())?;
        let b = self.value(us.clone(), vs_b)?;
        let out = (&a + &b).scale(&(Rational::one() / denom));
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}
