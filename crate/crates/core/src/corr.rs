//! Skew-orthogonal polynomial data, moment-matrix entries, the generating
//! function Z_N(zeta) for the number of real eigenvalues, probabilities,
//! expected counts, and the all-real product formula, all in exact
//! arithmetic over Q[pi^(1/2), pi^(-1/2)].
//!
//! The counting statistics of the real eigenvalues of P = X_1 ... X_m, with
//! each X_i an N x N corner of an (L_i + N) x (L_i + N) Haar orthogonal
//! matrix, reduce to a determinant whose entries mix Meijer-G moments with
//! skew-orthogonal normalisations. Z_N(zeta) = sum_k zeta^k p_{N,k} is that
//! determinant; everything else here is bookkeeping around it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::meijer::meijer_entry;
use crate::polymat::{det_bareiss, Poly};
use crate::ring::{
    binomial_rat, factorial_big, gamma_half, gamma_half_ratio, rat, PiLaurent, Rational,
};
use crate::special::ln_gamma;

/// Largest N accepted by the exact determinant path by default.
pub const DEFAULT_MAX_EXACT_N: usize = 24;

/// Matrix dimension N plus the truncation parameters L_1..L_m.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EnsembleSpec {
    n: usize,
    ls: Vec<u32>,
}

impl EnsembleSpec {
    pub fn new(n: usize, ls: Vec<u32>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("matrix dimension must be positive".into()));
        }
        if ls.is_empty() {
            return Err(Error::Domain("at least one truncation required".into()));
        }
        if ls.iter().any(|&l| l == 0) {
            return Err(Error::Domain("truncations must be positive".into()));
        }
        Ok(Self { n, ls })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ls(&self) -> &[u32] {
        &self.ls
    }

    pub fn m(&self) -> usize {
        self.ls.len()
    }

    /// True when the exact evaluation path covers this spec: all truncations
    /// even, or a single factor.
    pub fn has_exact_path(&self) -> bool {
        self.m() == 1 || self.ls.iter().all(|&l| l % 2 == 0)
    }
}

/// Polynomial in zeta whose coefficient at degree k is the probability of
/// exactly k real eigenvalues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaPolynomial {
    coeffs: BTreeMap<usize, PiLaurent>,
}

impl ZetaPolynomial {
    fn new(coeffs: BTreeMap<usize, PiLaurent>) -> Self {
        Self { coeffs }
    }

    pub fn coeff(&self, k: usize) -> PiLaurent {
        self.coeffs.get(&k).cloned().unwrap_or_else(PiLaurent::zero)
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (usize, &PiLaurent)> {
        self.coeffs.iter().map(|(&k, v)| (k, v))
    }

    pub fn eval_one(&self) -> PiLaurent {
        let mut out = PiLaurent::zero();
        for v in self.coeffs.values() {
            out = &out + v;
        }
        out
    }
}

/// The z^{2n-1} coefficient subtracted in the odd skew-orthogonal polynomial:
/// prod_i 2n / (L_i + 2n). Equals the ensemble average of Tr P^2 at dimension 2n.
pub fn skew_odd_coefficient(n: u32, spec: &EnsembleSpec) -> Rational {
    let mut out = Rational::one();
    for &l in spec.ls() {
        out *= rat(2 * n as i64, (l + 2 * n) as i64);
    }
    out
}

/// Skew-orthogonal normalisation h_l = prod_i L_i! (2l)! / (L_i + 2l)!.
pub fn h_norm(l: u32, spec: &EnsembleSpec) -> Rational {
    let mut out = Rational::one();
    for &li in spec.ls() {
        out *= Rational::new(
            factorial_big(li) * factorial_big(2 * l),
            factorial_big(li + 2 * l),
        );
    }
    out
}

/// Reduced odd moment r_j = prod_i Gamma(j - 1/2) / Gamma(L_i/2 + j - 1/2).
///
/// The true moment mu_{2j-1} equals C * r_j with C = prod_i (L_i!/2^{L_i})^{1/2};
/// C is a square root of a rational and is never materialised. For odd N the
/// half-integer power of the normalisation constant absorbs it exactly, so all
/// stored values stay inside the ring.
pub fn mu_reduced(j: u32, spec: &EnsembleSpec) -> PiLaurent {
    let mut out = PiLaurent::one();
    for &l in spec.ls() {
        out = &out * &gamma_half_ratio(2 * j - 1, l + 2 * j - 1).expect("positive gamma arguments");
    }
    out
}

/// Rational prefactor prod_i L_i! / 2^{L_i} relating the moment a_{2j-1,2k}
/// to its Meijer-G value (Legendre duplication collapses the gamma product).
fn moment_prefactor(spec: &EnsembleSpec) -> Rational {
    let mut out = Rational::one();
    for &l in spec.ls() {
        out *= Rational::new(factorial_big(l), BigInt::one() << (l as usize));
    }
    out
}

/// Exact moment a_{2j-1,2k} of the antisymmetric bilinear form of the real
/// eigenvalue weight.
pub fn a_entry(j: u32, k: u32, spec: &EnsembleSpec) -> Result<PiLaurent> {
    let g = meijer_entry(j, k, spec.ls())?;
    Ok(g.scale(&moment_prefactor(spec)))
}

/// Determinant entry b_{j,k}(zeta) =
///   (zeta^2 - 1)(a_{2j-1,2k} - prod_i ((2k-2)/(L_i+2k-2)) a_{2j-1,2k-2})
///   + h_{j-1} delta_{jk}.
pub fn b_entry(j: u32, k: u32, spec: &EnsembleSpec) -> Result<ZetaPolynomial> {
    let p = b_entry_poly(j, k, spec)?;
    let mut coeffs = BTreeMap::new();
    for (d, c) in p.coeffs().iter().enumerate() {
        if !c.is_zero() {
            coeffs.insert(2 * d, c.clone());
        }
    }
    Ok(ZetaPolynomial::new(coeffs))
}

/// Same entry as a polynomial in t = zeta^2 (the internal determinant
/// variable).
fn b_entry_poly(j: u32, k: u32, spec: &EnsembleSpec) -> Result<Poly> {
    let mut core = a_entry(j, k, spec)?;
    if k >= 2 {
        let gamma = skew_odd_coefficient(k - 1, spec);
        let prev = a_entry(j, k - 1, spec)?;
        core = &core - &prev.scale(&gamma);
    }
    // (t - 1) * core + h_{j-1} delta_{jk}
    let mut c0 = -&core;
    if j == k {
        c0 = &c0 + &PiLaurent::from_rational(h_norm(j - 1, spec));
    }
    Ok(Poly::from_coeffs(vec![c0, core]))
}

/// Generating function Z_N(zeta) with the default size guard.
pub fn generating_function(spec: &EnsembleSpec) -> Result<ZetaPolynomial> {
    generating_function_with_limit(spec, DEFAULT_MAX_EXACT_N)
}

/// Generating function Z_N(zeta) = sum_k zeta^k p_{N,k}, exact.
///
/// N even: pref * det[b_{j,k}] over j,k = 1..N/2. N odd: an extra column of
/// reduced moments r_j borders the matrix and a global factor zeta restores
/// the count parity. Normalised so that Z_N(1) = 1 exactly.
pub fn generating_function_with_limit(spec: &EnsembleSpec, max_n: usize) -> Result<ZetaPolynomial> {
    let n = spec.n();
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    let coeffs = if n % 2 == 0 {
        let half = n / 2;
        let mut m: Vec<Vec<Poly>> = Vec::with_capacity(half);
        for j in 1..=half as u32 {
            let mut row = Vec::with_capacity(half);
            for k in 1..=half as u32 {
                row.push(b_entry_poly(j, k, spec)?);
            }
            m.push(row);
        }
        let det = det_bareiss(&m)?;
        let pre = normalisation_prefactor(spec, n / 2)?;
        let mut coeffs = BTreeMap::new();
        for (d, c) in det.coeffs().iter().enumerate() {
            let v = &pre * c;
            if !v.is_zero() {
                coeffs.insert(2 * d, v);
            }
        }
        coeffs
    } else {
        let rows = (n + 1) / 2;
        let cols = (n - 1) / 2;
        let mut m: Vec<Vec<Poly>> = Vec::with_capacity(rows);
        for j in 1..=rows as u32 {
            let mut row = Vec::with_capacity(rows);
            for k in 1..=cols as u32 {
                row.push(b_entry_poly(j, k, spec)?);
            }
            row.push(Poly::constant(mu_reduced(j, spec)));
            m.push(row);
        }
        let det = det_bareiss(&m)?;
        let pre = normalisation_prefactor(spec, (n - 1) / 2)?;
        let mut coeffs = BTreeMap::new();
        for (d, c) in det.coeffs().iter().enumerate() {
            let v = &pre * c;
            if !v.is_zero() {
                coeffs.insert(2 * d + 1, v);
            }
        }
        coeffs
    };
    let z = ZetaPolynomial::new(coeffs);
    assert!(
        z.eval_one() == PiLaurent::one(),
        "generating function not normalised for N={n}, Ls={:?}",
        spec.ls()
    );
    Ok(z)
}

/// prod_i (2^{L_i}/L_i!)^{pow} * prod_{j=1}^{N} Gamma((L_i+j)/2)/Gamma(j/2).
///
/// `pow` is N/2 for even N; for odd N it is (N-1)/2, the leftover half power
/// having been cancelled against the square-root constant of the moment
/// column.
fn normalisation_prefactor(spec: &EnsembleSpec, pow: usize) -> Result<PiLaurent> {
    let n = spec.n();
    let mut out = PiLaurent::one();
    for &l in spec.ls() {
        let base = Rational::new(BigInt::one() << (l as usize), factorial_big(l));
        let mut c = Rational::one();
        for _ in 0..pow {
            c *= &base;
        }
        out = out.scale(&c);
        for j in 1..=n as u32 {
            out = &out * &gamma_half_ratio(l + j, j)?;
        }
    }
    Ok(out)
}

/// Probability of exactly k real eigenvalues. `k` must have the parity of N
/// and lie in [0, N]; violations are signalled rather than returned as zero.
pub fn prob_k_real(spec: &EnsembleSpec, k: usize) -> Result<PiLaurent> {
    let n = spec.n();
    if k > n || (n - k) % 2 != 0 {
        return Err(Error::Domain(format!(
            "k = {k} must have the parity of N = {n} and lie in [0, N]"
        )));
    }
    Ok(generating_function(spec)?.coeff(k))
}

/// Expected number of real eigenvalues, exact. Evaluates the alternating
/// binomial-moment sum; for odd N the skew-orthogonal kernel carries an extra
/// rank-one term that integrates to exactly 1.
pub fn expected_reals_exact(spec: &EnsembleSpec) -> Result<PiLaurent> {
    let n = spec.n();
    if n == 1 {
        return Ok(PiLaurent::one());
    }
    let mut total = PiLaurent::zero();
    for j in 0..=(n - 2) as u32 {
        let jj = if j % 2 == 0 { j / 2 + 1 } else { (j + 3) / 2 };
        let kk = if j % 2 == 0 { j / 2 + 1 } else { (j + 1) / 2 };
        let mut c = Rational::one();
        for &l in spec.ls() {
            c *= binomial_rat((l + j) as u64, l as u64);
        }
        if j % 2 == 1 {
            c = -c;
        }
        total = &total + &a_entry(jj, kk, spec)?.scale(&c);
    }
    total = total.scale(&rat(2, 1));
    if n % 2 == 1 {
        total = &total + &PiLaurent::one();
    }
    Ok(total)
}

/// Closed-form expected count for a single even truncation.
pub fn expected_reals_m1_closed(n: usize, l: u32) -> Result<PiLaurent> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if l == 0 || l % 2 != 0 {
        return Err(Error::Domain("truncation must be even and positive".into()));
    }
    if n == 1 {
        return Ok(PiLaurent::one());
    }
    let mut total = PiLaurent::zero();
    for j in 0..=(n - 2) as u32 {
        let cj = (j + 1) / 2; // ceil(j/2)
        for ell in 1..=l / 2 {
            let num = &(&gamma_half(2 * (j + l + 1))? * &gamma_half(2 * cj + 1)?)
                * &(&gamma_half(2 * (j + ell) + 1)? * &gamma_half(2 * (l - ell))?);
            let den = &(&gamma_half(2 * (j + 1))? * &gamma_half(2 * (j + l) + 1)?)
                * &(&gamma_half(2 * (ell + cj) + 1)? * &gamma_half(2 * (l / 2 - ell + 1))?);
            let term = num.checked_div(&den)?;
            total = if j % 2 == 0 {
                &total + &term
            } else {
                &total - &term
            };
        }
    }
    let pre = gamma_half(l + 1)?.checked_div(&(&gamma_half(1)? * &gamma_half(2 * l)?))?;
    let mut out = &pre * &total;
    if n % 2 == 1 {
        out = &out + &PiLaurent::one();
    }
    Ok(out)
}

/// Closed-form expected count for two even truncations.
pub fn expected_reals_m2_closed(n: usize, l1: u32, l2: u32) -> Result<PiLaurent> {
    if n == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    if l1 == 0 || l2 == 0 || l1 % 2 != 0 || l2 % 2 != 0 {
        return Err(Error::Domain("truncations must be even and positive".into()));
    }
    if n == 1 {
        return Ok(PiLaurent::one());
    }
    let factor = |l: u32, p: u32, j: u32| -> Result<PiLaurent> {
        let num = &(&gamma_half(2 * (l - p))? * &gamma_half(2 * (j + l + 1))?)
            * &gamma_half(2 * (j + p) + 1)?;
        let den = &(&gamma_half(2 * (j + 1))? * &gamma_half(2 * (j + l) + 1)?)
            * &gamma_half(2 * (l / 2 - p + 1))?;
        num.checked_div(&den)
    };
    let mut total = PiLaurent::zero();
    for j in 0..=(n - 2) as u32 {
        let cj = (j + 1) / 2;
        let jj = cj + 1;
        let kk = j / 2 + 1;
        for p in 1..=l1 / 2 {
            let c1 = factor(l1, p, j)?;
            for q in 1..=l2 / 2 {
                let c2 = factor(l2, q, j)?;
                let mut bracket = &crate::meijer::kernel_sum(jj, kk, p, q)?
                    + &crate::meijer::kernel_sum(jj, kk, q, p)?;
                let g = gamma_half(2 * cj + 1)?;
                let den = &gamma_half(2 * (p + cj) + 1)? * &gamma_half(2 * (q + cj) + 1)?;
                bracket = &bracket + &(&g * &g).checked_div(&den)?;
                let term = &(&c1 * &c2) * &bracket;
                total = if j % 2 == 0 {
                    &total + &term
                } else {
                    &total - &term
                };
            }
        }
    }
    // prefactor Gamma((L1+1)/2) Gamma((L2+1)/2) / (2 pi Gamma(L1) Gamma(L2))
    let pre = (&gamma_half(l1 + 1)? * &gamma_half(l2 + 1)?)
        .checked_div(&(&gamma_half(2 * l1)? * &gamma_half(2 * l2)?))?;
    let pre = &pre * &PiLaurent::monomial(-2, rat(1, 2));
    let mut out = &pre * &total;
    if n % 2 == 1 {
        out = &out + &PiLaurent::one();
    }
    Ok(out)
}

/// Probability that all N eigenvalues are real for a single truncation L, in
/// product form: prod_{j=0}^{N-1} Gamma(L+j) Gamma((L+j)/2) /
/// (Gamma(L+(N+j-1)/2) Gamma(L/2)).
pub fn pnn_product(n: usize, l: u32) -> Result<PiLaurent> {
    if n == 0 || l == 0 {
        return Err(Error::Domain("N and L must be positive".into()));
    }
    let mut out = PiLaurent::one();
    for j in 0..n as u32 {
        let num = &gamma_half(2 * (l + j))? * &gamma_half(l + j)?;
        let den = &gamma_half(2 * l + n as u32 + j - 1)? * &gamma_half(l)?;
        out = &out * &num.checked_div(&den)?;
    }
    Ok(out)
}

/// log p_{N,N} for a single truncation, evaluated in floating point through
/// log-gamma; usable far beyond the exact range.
pub fn pnn_product_ln(n: usize, l: f64) -> f64 {
    let nn = n as f64;
    let mut acc = 0.0;
    for j in 0..n {
        let jf = j as f64;
        acc += ln_gamma(l + jf) + ln_gamma((l + jf) / 2.0)
            - ln_gamma(l + (nn + jf - 1.0) / 2.0)
            - ln_gamma(l / 2.0);
    }
    acc
}

/// The c-dependent constant in log p_{N,N} ~ N^2 * brace(c) for L = cN.
pub fn pnn_asymptotic_brace(c: f64) -> f64 {
    -c / 4.0 - 0.25 * 2f64.ln() - 0.5 * c * c.ln() - 0.75 * c * c * c.ln()
        - 0.25 * (c + 1.0).powi(2) * (c + 1.0).ln()
        + (c + 0.5).powi(2) * (c + 0.5).ln()
}

/// Leading order of log p_{N,N} at L = cN: N^2 times the brace constant.
pub fn pnn_asymptotic(n: usize, c: f64) -> f64 {
    (n as f64).powi(2) * pnn_asymptotic_brace(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, ls: &[u32]) -> EnsembleSpec {
        EnsembleSpec::new(n, ls.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> PiLaurent {
        PiLaurent::from_rational(rat(n, d))
    }

    #[test]
    fn skew_odd_coefficient_examples() {
        assert_eq!(skew_odd_coefficient(0, &spec(2, &[4])), rat(0, 1));
        assert_eq!(skew_odd_coefficient(1, &spec(2, &[2])), rat(1, 2));
        assert_eq!(skew_odd_coefficient(1, &spec(2, &[4, 4])), rat(1, 9));
    }

    #[test]
    fn h_norm_examples() {
        assert_eq!(h_norm(0, &spec(2, &[4])), rat(1, 1));
        assert_eq!(h_norm(1, &spec(2, &[4])), rat(1, 15));
        assert_eq!(h_norm(1, &spec(2, &[2, 2])), rat(1, 36));
    }

    #[test]
    fn mu_reduced_examples() {
        assert_eq!(mu_reduced(1, &spec(2, &[2])), q(2, 1));
        assert_eq!(
            mu_reduced(1, &spec(2, &[1])),
            PiLaurent::monomial(1, rat(1, 1))
        );
        assert_eq!(mu_reduced(2, &spec(2, &[2])), q(2, 3));
    }

    #[test]
    fn a_entry_examples() {
        assert_eq!(a_entry(1, 1, &spec(2, &[2])).unwrap(), q(2, 3));
        assert_eq!(a_entry(1, 1, &spec(2, &[4])).unwrap(), q(24, 35));
    }

    #[test]
    fn b_entry_examples() {
        // j=k=1, L=4: (zeta^2 - 1)(24/35) + 1 = 11/35 + (24/35) zeta^2
        let b = b_entry(1, 1, &spec(2, &[4])).unwrap();
        assert_eq!(b.coeff(0), q(11, 35));
        assert_eq!(b.coeff(2), q(24, 35));
        // off-diagonal entries vanish at zeta = 1
        let b12 = b_entry(1, 2, &spec(4, &[4])).unwrap();
        assert!(b12.eval_one().is_zero());
        let b11_l2 = b_entry(1, 1, &spec(2, &[2])).unwrap();
        assert_eq!(b11_l2.coeff(2), q(2, 3));
        assert_eq!(b11_l2.coeff(0), q(1, 3));
    }

    #[test]
    fn generating_function_examples() {
        let z = generating_function(&spec(2, &[4])).unwrap();
        assert_eq!(z.coeff(0), q(11, 35));
        assert_eq!(z.coeff(2), q(24, 35));

        let z = generating_function(&spec(2, &[2])).unwrap();
        assert_eq!(z.coeff(0), q(1, 3));
        assert_eq!(z.coeff(2), q(2, 3));

        let z = generating_function(&spec(3, &[4])).unwrap();
        assert_eq!(z.coeff(1), q(73, 105));
        assert_eq!(z.coeff(3), q(32, 105));
    }

    #[test]
    fn prob_k_real_examples() {
        assert_eq!(prob_k_real(&spec(4, &[4]), 4).unwrap(), q(2048, 24255));
        let p = prob_k_real(&spec(4, &[4, 4, 4]), 0).unwrap();
        let want = PiLaurent::from_rational(Rational::new(
            "1431169011017974588501".parse().unwrap(),
            "19078916984518815703125".parse().unwrap(),
        ));
        assert_eq!(p, want);
        assert_eq!(prob_k_real(&spec(1, &[7]), 1).unwrap(), PiLaurent::one());
        assert!(prob_k_real(&spec(2, &[4]), 1).is_err());
        assert!(prob_k_real(&spec(2, &[4]), 4).is_err());
    }

    #[test]
    fn expected_reals_examples() {
        assert_eq!(expected_reals_exact(&spec(2, &[4])).unwrap(), q(48, 35));
        assert_eq!(expected_reals_exact(&spec(2, &[2])).unwrap(), q(4, 3));
        let e = expected_reals_exact(&spec(4, &[4, 4, 4])).unwrap();
        let want = PiLaurent::from_rational(Rational::new(
            "14537252216952832".parse().unwrap(),
            "6166392657665625".parse().unwrap(),
        ));
        assert_eq!(e, want);
    }

    #[test]
    fn expectation_matches_genfunc_moment() {
        for (n, ls) in [
            (2usize, vec![2u32]),
            (3, vec![2]),
            (3, vec![5]),
            (4, vec![3]),
            (5, vec![4]),
            (3, vec![2, 4]),
            (4, vec![2, 2]),
            (5, vec![2, 2, 2]),
            (2, vec![1]),
            (3, vec![1]),
        ] {
            let s = spec(n, &ls);
            let e = expected_reals_exact(&s).unwrap();
            let z = generating_function(&s).unwrap();
            let mut moment = PiLaurent::zero();
            for (k, c) in z.coeffs() {
                moment = &moment + &c.scale(&rat(k as i64, 1));
            }
            assert_eq!(e, moment, "N={n} Ls={ls:?}");
        }
    }

    #[test]
    fn closed_form_expectations_match() {
        for n in 2..=8 {
            for l in [2u32, 4, 6, 8] {
                assert_eq!(
                    expected_reals_m1_closed(n, l).unwrap(),
                    expected_reals_exact(&spec(n, &[l])).unwrap(),
                    "N={n} L={l}"
                );
            }
        }
        for n in 2..=6 {
            for (l1, l2) in [(2u32, 2u32), (2, 4), (4, 4), (4, 6)] {
                assert_eq!(
                    expected_reals_m2_closed(n, l1, l2).unwrap(),
                    expected_reals_exact(&spec(n, &[l1, l2])).unwrap(),
                    "N={n} L=({l1},{l2})"
                );
            }
        }
    }

    #[test]
    fn pnn_product_examples() {
        assert_eq!(pnn_product(2, 4).unwrap(), q(24, 35));
        assert_eq!(pnn_product(2, 2).unwrap(), q(2, 3));
        assert_eq!(pnn_product(1, 9).unwrap(), PiLaurent::one());
    }

    #[test]
    fn all_real_probability_matches_product_formula() {
        for n in 1..=8usize {
            for l in 1..=6u32 {
                let z = generating_function(&spec(n, &[l])).unwrap();
                assert_eq!(z.coeff(n), pnn_product(n, l).unwrap(), "N={n} L={l}");
            }
        }
    }

    #[test]
    fn odd_truncation_pi_polynomial() {
        let p = prob_k_real(&spec(4, &[5]), 0).unwrap();
        let want = &(&PiLaurent::one() + &PiLaurent::monomial(-2, rat(-385024, 135135)))
            + &PiLaurent::monomial(-4, rat(16777216, 18729711));
        assert_eq!(p, want);
    }

    #[test]
    fn normalisation_and_parity_sweep() {
        let mut cases: Vec<(usize, Vec<u32>)> = Vec::new();
        for n in 1..=7 {
            for ls in [
                vec![2u32],
                vec![8],
                vec![1],
                vec![7],
                vec![2, 6],
                vec![4, 4],
                vec![2, 4, 8],
            ] {
                cases.push((n, ls));
            }
        }
        for (n, ls) in cases {
            let z = generating_function(&spec(n, &ls)).unwrap();
            assert_eq!(z.eval_one(), PiLaurent::one(), "N={n} Ls={ls:?}");
            for (k, c) in z.coeffs() {
                assert!(k <= n && (n - k) % 2 == 0, "parity N={n} k={k}");
                let f = c.to_f64();
                assert!(f >= -1e-12 && f <= 1.0 + 1e-12, "range N={n} k={k}: {f}");
            }
        }
    }

    #[test]
    fn rationality_for_even_truncations() {
        for (n, ls) in [(4usize, vec![6u32]), (5, vec![2, 8]), (4, vec![4, 4, 4])] {
            let z = generating_function(&spec(n, &ls)).unwrap();
            for (_, c) in z.coeffs() {
                assert!(c.is_rational());
            }
        }
    }

    #[test]
    fn unsupported_exact_path_propagates() {
        assert!(matches!(
            generating_function(&spec(2, &[3, 4])),
            Err(Error::UnsupportedExact(_))
        ));
    }

    #[test]
    fn size_guard() {
        assert!(matches!(
            generating_function(&spec(26, &[2])),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn all_real_probability_increases_with_factor_count() {
        // adding truncated factors pushes mass toward the all-real
        // configuration (the trend visible across the reference table)
        for n in 2..=4usize {
            let probs: Vec<f64> = (1..=3)
                .map(|m| {
                    generating_function(&spec(n, &vec![4; m]))
                        .unwrap()
                        .coeff(n)
                        .to_f64()
                })
                .collect();
            assert!(probs[0] < probs[1] && probs[1] < probs[2], "N={n}: {probs:?}");
        }
    }

    #[test]
    fn determinant_routes_agree_on_entry_matrices() {
        // fraction-free elimination vs cofactor expansion on the real
        // 6 x 6 entry matrix (N = 12)
        use crate::polymat::{det_bareiss, det_cofactor};
        let s = spec(12, &[2]);
        let m: Vec<Vec<crate::polymat::Poly>> = (1..=6u32)
            .map(|j| {
                (1..=6u32)
                    .map(|k| b_entry_poly(j, k, &s).unwrap())
                    .collect()
            })
            .collect();
        assert_eq!(det_bareiss(&m).unwrap(), det_cofactor(&m));
    }

    #[test]
    fn asymptotic_brace_values() {
        // c = 1: -1/4 - (1/4) log 2 - log 2 + (9/4) log(3/2)
        let want = -0.25 - 1.25 * 2f64.ln() + 2.25 * 1.5f64.ln();
        assert!((pnn_asymptotic_brace(1.0) - want).abs() < 1e-14);
        // c -> infinity limit is -(1/4) log 2; large c is limited by the
        // cancellation of the c^2 log c terms, so probe a moderate c
        assert!((pnn_asymptotic_brace(1e3) + 0.25 * 2f64.ln()).abs() < 1e-4);
        assert!((pnn_asymptotic(10, 1.0) - 100.0 * want).abs() < 1e-12);
    }

    #[test]
    fn pnn_ln_tracks_exact_and_brace() {
        // float route agrees with the exact product where both apply
        for (n, l) in [(2usize, 4u32), (5, 3), (8, 6)] {
            let exact = pnn_product(n, l).unwrap().to_f64().ln();
            let ln = pnn_product_ln(n, l as f64);
            assert!((exact - ln).abs() < 1e-9, "N={n} L={l}");
        }
        // (1/N^2) log p_{N,N} approaches the brace constant from above
        let b = pnn_asymptotic_brace(1.0);
        let d20 = (pnn_product_ln(20, 20.0) / 400.0 - b).abs();
        let d40 = (pnn_product_ln(40, 40.0) / 1600.0 - b).abs();
        assert!(d40 < d20);
    }
}
