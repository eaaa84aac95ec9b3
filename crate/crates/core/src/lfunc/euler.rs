//! Truncated Euler products through power sums and Newton's identities.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::algebra::ff::TABLE_CAP;
use crate::algebra::{CycloRing, ScalarExt};
use crate::error::{Error, Result};
use crate::lfunc::LPoly;
use crate::par;
use crate::places::{place_orbits, Place};
use crate::reps::{CharLocal, LocalFactor, RepDescriptor};

/// Coefficients checked to vanish beyond the expected degree.
pub const MAX_EXTRA: u32 = 3;

/// Field size up to which the extra coefficients are computed.
pub const EXTRA_CAP: u64 = 1 << 20;

fn add_power_sums(acc: &mut [Vec<i128>], lf: LocalFactor, q_v: i128, m: usize) {
    let rmax = acc.len() - 1;
    match lf {
        LocalFactor::One => {}
        LocalFactor::Linear { sign, zeta } => {
            let mut s = 1i128;
            for (r, slot) in acc.iter_mut().enumerate().skip(1) {
                s *= sign as i128;
                slot[(r * zeta as usize) % m] += s;
            }
        }
        LocalFactor::Quadratic { trace, zeta } => {
            let a = trace as i128;
            let (mut prev, mut cur) = (2i128, a);
            for r in 1..=rmax {
                acc[r][(r * zeta as usize) % m] += cur;
                let next = a * cur - q_v * prev;
                prev = cur;
                cur = next;
            }
        }
    }
}

/// The Euler product of `rep` over its own base field, expanded to `T^depth`.
pub fn euler_series(rep: &RepDescriptor, depth: u32) -> Result<Vec<ScalarExt>> {
    let field = rep.field();
    let q = field.q();
    let level = rep.ring_level()?;
    let ring = CycloRing::get(level, q);
    let m = level as usize;
    let depth_us = depth as usize;
    let mode = par::default_mode();
    let mut sums = vec![vec![0i128; m]; depth_us + 1];
    for e in 1..=depth {
        match q.checked_pow(e) {
            Some(x) if x <= TABLE_CAP => {}
            _ => {
                return Err(Error::BudgetExceeded(format!(
                    "places of degree {e} over F_{q} exceed the table limit"
                )))
            }
        }
        let orbits = place_orbits(&field, e)?;
        if orbits.reps.is_empty() {
            continue;
        }
        let table = match rep.curve() {
            Some(c) => Some(c.local_table(e)?),
            None => None,
        };
        let site0 = orbits.site(0);
        let chi = match rep.character() {
            Some(c) => Some(CharLocal::new(c, &site0, level)?),
            None => None,
        };
        let q_v = q.pow(e) as i128;
        let rmax = depth_us / e as usize;
        let parts = par::map_chunks(orbits.reps.len(), 512, mode, |range| {
            let mut acc = vec![vec![0i128; m]; rmax + 1];
            for idx in range {
                let site = orbits.site(idx);
                let ell = table.as_ref().map(|t| t[idx]);
                let (lf, _) = rep.local_at(&site, chi.as_ref(), ell)?;
                add_power_sums(&mut acc, lf, q_v, m);
            }
            Ok::<_, Error>(acc)
        });
        for part in parts {
            let part = part?;
            for (r, row) in part.iter().enumerate().skip(1) {
                for (z, &v) in row.iter().enumerate() {
                    sums[e as usize * r][z] += e as i128 * v;
                }
            }
        }
    }
    let inf = Place::infinity(&field).residue_point()?;
    let site = inf.site();
    let chi = match rep.character() {
        Some(c) => Some(CharLocal::new(c, &site, level)?),
        None => None,
    };
    let (lf, _) = rep.local_at(&site, chi.as_ref(), None)?;
    let mut acc = vec![vec![0i128; m]; depth_us + 1];
    add_power_sums(&mut acc, lf, q as i128, m);
    for r in 1..=depth_us {
        for z in 0..m {
            sums[r][z] += acc[r][z];
        }
    }
    newton(&ring, &sums)
}

/// Coefficients of `exp(sum c_j T^j / j)` from `c_j` given as zeta sums.
fn newton(ring: &Arc<CycloRing>, sums: &[Vec<i128>]) -> Result<Vec<ScalarExt>> {
    let c: Vec<ScalarExt> = sums.iter().map(|s| ring.from_zeta_sums(s)).collect();
    let mut a = vec![ring.one()];
    for k in 1..c.len() {
        let mut s = ring.zero();
        for j in 1..=k {
            if !c[j].is_zero() && !a[k - j].is_zero() {
                s = &s + &(&c[j] * &a[k - j]);
            }
        }
        let ak = s.div_int(&BigInt::from(k)).ok_or_else(|| {
            Error::InternalInconsistency(format!("coefficient {k} is not integral"))
        })?;
        a.push(ak);
    }
    Ok(a)
}

/// Truncation depth beyond `N` that keeps every place degree within the tables.
pub fn extra_depth(q: u64, n_expected: u32) -> Result<u32> {
    (0..=MAX_EXTRA)
        .rev()
        .find(|&e| {
            let cap = if e == 0 { TABLE_CAP } else { EXTRA_CAP };
            q.checked_pow(n_expected + e).is_some_and(|x| x <= cap)
        })
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "degree {n_expected} over F_{q} needs places beyond the table limit"
            ))
        })
}

/// `L(rep, F_{q^n}, T)` from the Euler product.
pub fn l_polynomial(rep: &RepDescriptor, n: u32) -> Result<LPoly> {
    let r = rep.base_change(n)?;
    l_polynomial_here(&r, n)
}

/// `L` of a representation already defined over `F_{q^n}`.
pub(crate) fn l_polynomial_here(r: &RepDescriptor, n: u32) -> Result<LPoly> {
    let big_n = r.expected_degree()?;
    let q = r.field().q();
    let extra = extra_depth(q, big_n)?;
    let series = euler_series(r, big_n + extra)?;
    if let Some(k) = (big_n as usize + 1..series.len()).find(|&k| !series[k].is_zero()) {
        return Err(Error::InternalInconsistency(format!(
            "coefficient of T^{k} is nonzero beyond the expected degree {big_n} for {r}"
        )));
    }
    let coeffs = series[..=big_n as usize].to_vec();
    if coeffs[big_n as usize].is_zero() {
        return Err(Error::InternalInconsistency(format!(
            "degree below the expected {big_n} for {r}"
        )));
    }
    let l = LPoly {
        coeffs,
        q,
        n,
        weight: r.weight(),
        duality: r.self_duality(),
        rep_tag: r.to_string(),
    };
    crate::lfunc::fe::root_number(&l)?;
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FiniteField, FqPoly};
    use crate::reps::PowerCharacter;

    fn ints(p: &[ScalarExt]) -> Vec<i64> {
        p.iter().map(|c| i64::try_from(c.as_integer().unwrap()).unwrap()).collect()
    }

    #[test]
    fn trivial_series_is_p1_zeta() {
        let f = FiniteField::of_order(5).unwrap();
        let s = euler_series(&RepDescriptor::Trivial(f), 5).unwrap();
        // 1/((1-T)(1-5T)) = sum (5^(k+1)-1)/4 T^k
        let expect: Vec<i64> = (0..=5).map(|k| (5i64.pow(k + 1) - 1) / 4).collect();
        assert_eq!(ints(&s), expect);
    }

    #[test]
    fn genus_one_quadratic_character() {
        let f = FiniteField::of_order(5).unwrap();
        let g = FqPoly::parse(&f, "x*(x-1)*(x+2)").unwrap();
        let rep = RepDescriptor::Char(PowerCharacter::from_poly(g.clone(), 2, 1).unwrap());
        let l = l_polynomial(&rep, 1).unwrap();
        // one point over infinity for a cubic
        let mut count = 1i64;
        for x in 0..5 {
            let v = g.eval(x);
            count += if v == 0 { 1 } else if f.is_square(v) { 2 } else { 0 };
        }
        let a = 5 + 1 - count;
        assert_eq!(ints(&l.coeffs), vec![1, -a, 5]);
    }

    #[test]
    fn elliptic_degree_and_conductor_agree() {
        let f = FiniteField::of_order(7).unwrap();
        let rep = RepDescriptor::parse(&f, "rep = elliptic; A = \"t\"; B = \"t^2+1\"").unwrap();
        let l = l_polynomial(&rep, 1).unwrap();
        assert_eq!(l.degree(), rep.expected_degree().unwrap());
    }
}
