//! Functional equations, root numbers, inverse roots and multiplicities.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use crate::algebra::scalar::spoly;
use crate::algebra::ScalarExt;
use crate::error::{Error, Result};
use crate::lfunc::LPoly;
use crate::reps::SelfDuality;

/// Relative tolerance for the Weil bound on inverse roots.
pub const WEIL_TOL: f64 = 1e-6;

static FE_CHECKS: AtomicU64 = AtomicU64::new(0);

/// Number of functional-equation checks passed in this process.
pub fn fe_checks_passed() -> u64 {
    FE_CHECKS.load(Ordering::Relaxed)
}

/// Root number `numer / u^half_power` with `u = sqrt(Q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootNumber {
    pub numer: ScalarExt,
    pub half_power: u32,
}

impl RootNumber {
    /// `+1` or `-1` when the root number is a rational sign.
    pub fn sign(&self) -> Option<i64> {
        if self.half_power != 0 {
            return None;
        }
        let v = self.numer.as_integer()?;
        if v.is_one() {
            Some(1)
        } else if v == BigInt::from(-1) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let q = self.numer.ring().q() as f64;
        self.numer.embed() / q.sqrt().powi(self.half_power as i32)
    }
}

impl fmt::Display for RootNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Some(s) => write!(f, "{s:+}"),
            None => write!(f, "({})/u^{}", self.numer, self.half_power),
        }
    }
}

/// Solves for `W` in `L(T) = W Q^{(w+1)N/2} T^N L'(1/(Q^{w+1} T))` and checks
/// every coefficient.
pub fn functional_equation(l: &LPoly, dual: &LPoly) -> Result<RootNumber> {
    let n = l.degree();
    if dual.degree() != n {
        return Err(Error::FunctionalEquationViolation(format!(
            "degrees {n} and {} differ",
            dual.degree()
        )));
    }
    let w1 = l.weight + 1;
    let h = w1 * n;
    let a = &l.coeffs;
    let b = &dual.coeffs;
    if !b[0].is_one() || !a[0].is_one() {
        return Err(Error::FunctionalEquationViolation("constant term is not 1".into()));
    }
    let mut numer = a[n as usize].clone();
    let mut half_power = h;
    while half_power > 0 {
        match numer.div_u_pow(1) {
            Some(x) => {
                numer = x;
                half_power -= 1;
            }
            None => break,
        }
    }
    let ring = l.ring();
    for k in 0..=n {
        let e = w1 as i64 * (2 * k as i64 - n as i64);
        let lhs = &a[k as usize] * &ring.u_pow(half_power + (-e).max(0) as u32);
        let rhs = &(&numer * &ring.u_pow(e.max(0) as u32)) * &b[(n - k) as usize];
        if lhs != rhs {
            return Err(Error::FunctionalEquationViolation(format!(
                "coefficient of T^{k} in {}",
                l.rep_tag
            )));
        }
    }
    let w = RootNumber { numer, half_power };
    if l.duality == SelfDuality::Symplectic && w.sign().is_none() {
        return Err(Error::FunctionalEquationViolation(format!(
            "root number {w} of a symplectic representation is not a sign"
        )));
    }
    FE_CHECKS.fetch_add(1, Ordering::Relaxed);
    Ok(w)
}

/// Root number against the conjugate polynomial.
pub fn root_number(l: &LPoly) -> Result<RootNumber> {
    functional_equation(l, &l.dual())
}

/// Inverse roots scaled by `Q^{-(w+1)/2}`, i.e. points of the unit circle.
pub fn inverse_roots(l: &LPoly) -> Result<Vec<Complex64>> {
    let n = l.degree() as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = (l.q as f64).powf((l.weight + 1) as f64 / 2.0);
    // inverse roots are the roots of x^N + a_1 x^{N-1} + ... + a_N
    let c: Vec<Complex64> = l
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, a)| a.embed() / scale.powi(k as i32))
        .collect();
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        comp[(0, j)] = -c[j + 1];
    }
    for i in 1..n {
        comp[(i, i - 1)] = Complex64::one();
    }
    let roots = match nalgebra::linalg::Schur::try_new(comp, 1e-14, 10_000) {
        Some(schur) => {
            let (_, t) = schur.unpack();
            (0..n).map(|i| t[(i, i)]).collect()
        }
        // equal-modulus spectra can stall the shifted QR iteration
        None => aberth(&c)?,
    };
    if roots.iter().any(|r: &Complex64| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    Ok(roots)
}

/// Roots of the monic `x^N + c[1] x^{N-1} + ... + c[N]` by Aberth-Ehrlich iteration.
fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = c.len() - 1;
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::one();
        let mut dp = Complex64::new(0.0, 0.0);
        for a in &c[1..] {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.1, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulse: Complex64 = (0..n).filter(|&j| j != k).map(|j| (z[k] - z[j]).inv()).sum();
            let step = ratio / (Complex64::one() - ratio * repulse);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                biggest = biggest.max(step.norm());
            }
        }
        if biggest < 1e-15 {
            return Ok(z);
        }
    }
    // clustered roots converge slowly; accept what the iteration reached
    if z.iter().all(|r| r.re.is_finite() && r.im.is_finite()) {
        Ok(z)
    } else {
        Err(Error::NumericalFailure("root iteration did not converge".into()))
    }
}

/// Largest deviation of `|beta| / Q^{(w+1)/2}` from 1; fails above [`WEIL_TOL`].
pub fn weil_check(l: &LPoly) -> Result<f64> {
    let roots = inverse_roots(l)?;
    let dev = roots.iter().map(|r| (r.norm() - 1.0).abs()).fold(0.0, f64::max);
    if dev > WEIL_TOL {
        return Err(Error::NumericalFailure(format!(
            "inverse root off the circle by {dev:e} in {}",
            l.rep_tag
        )));
    }
    Ok(dev)
}

/// Largest `e` with `(1 - alpha T)^e` dividing `L` exactly.
pub fn root_multiplicity(l: &LPoly, alpha: &ScalarExt) -> u32 {
    if alpha.is_zero() {
        return 0;
    }
    let mut p = l.coeffs.clone();
    let mut e = 0;
    while p.len() > 1 {
        match spoly::div_linear(&p, alpha) {
            Some(next) => {
                p = next;
                e += 1;
            }
            None => break,
        }
    }
    e
}

/// Number of unitarized inverse roots within `tol` of `alpha / Q^{(w+1)/2}`.
pub fn root_multiplicity_approx(l: &LPoly, alpha: Complex64, tol: f64) -> Result<u32> {
    let scale = (l.q as f64).powf((l.weight + 1) as f64 / 2.0);
    let target = alpha / scale;
    let roots = inverse_roots(l)?;
    Ok(roots.iter().filter(|r| (**r - target).norm() <= tol * target.norm().max(1.0)).count() as u32)
}

/// Power sum `sum beta_i^k` of the inverse roots.
pub fn power_sum(l: &LPoly, k: usize) -> ScalarExt {
    let ring = l.ring();
    let mut p = vec![ring.zero(); k + 1];
    // Newton: p_k = -k a_k - sum_{j<k} a_j p_{k-j}
    for m in 1..=k {
        let mut s = if m < l.coeffs.len() {
            l.coeffs[m].scale(&BigInt::from(-(m as i64)))
        } else {
            ring.zero()
        };
        for j in 1..m {
            if j < l.coeffs.len() {
                s = &s - &(&l.coeffs[j] * &p[m - j]);
            }
        }
        p[m] = s;
    }
    p[k].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::CycloRing;

    #[test]
    fn one_plus_q_t_squared() {
        let l = LPoly::from_ints(5, 0, SelfDuality::Orthogonal, &[1, 0, 5]);
        let w = root_number(&l).unwrap();
        assert_eq!(w.sign(), Some(1));
        let ring = CycloRing::get(4, 5);
        let l4 = l.lift(&ring).unwrap();
        let alpha = &ring.u() * &ring.zeta_pow(1);
        assert_eq!(root_multiplicity(&l4, &alpha), 1);
        weil_check(&l).unwrap();
    }

    #[test]
    fn constructed_multiplicity_two() {
        // (1-5T)^2 (1+5T) = 1 - 5T - 25T^2 + 125T^3
        let l = LPoly::from_ints(5, 1, SelfDuality::Symplectic, &[1, -5, -25, 125]);
        let ring = l.ring().clone();
        assert_eq!(root_multiplicity(&l, &ring.int(5)), 2);
        assert_eq!(root_multiplicity(&l, &ring.int(-5)), 1);
        assert_eq!(root_multiplicity(&l, &ring.int(7)), 0);
        assert_eq!(root_number(&l).unwrap().sign(), Some(1));
    }

    #[test]
    fn violation_is_reported() {
        let l = LPoly::from_ints(5, 0, SelfDuality::Orthogonal, &[1, 1, 5]);
        let bad = LPoly::from_ints(5, 0, SelfDuality::Orthogonal, &[1, 2, 5]);
        assert!(matches!(
            functional_equation(&l, &bad),
            Err(Error::FunctionalEquationViolation(_))
        ));
    }

    #[test]
    fn power_sums_of_elliptic_polynomial() {
        // 1 - aT + qT^2 has beta_1 + beta_2 = a and beta_1^2 + beta_2^2 = a^2 - 2q
        let l = LPoly::from_ints(7, 1, SelfDuality::Symplectic, &[1, -3, 7]);
        assert_eq!(power_sum(&l, 1).as_integer().unwrap(), BigInt::from(3));
        assert_eq!(power_sum(&l, 2).as_integer().unwrap(), BigInt::from(9 - 14));
    }
}
