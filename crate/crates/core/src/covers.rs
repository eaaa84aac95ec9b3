//! Point counts and zeta numerators of superelliptic covers `y^d = f(x)`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::scalar::spoly;
use crate::algebra::{CycloRing, Embedding, Fe, FiniteField, FqPoly, ScalarExt};
use crate::error::{Error, Result};
use crate::lfunc::{l_orbit, orbits_of_q, LPoly};
use crate::par;
use crate::reps::{PowerCharacter, RepDescriptor, SelfDuality};

/// Default cap on the size of a field that is enumerated.
pub const COUNT_BUDGET: u64 = 10_000_000;

/// The smooth projective model of `y^d = f(x)` over `F_{q^n}`, `f` over `F_q`.
#[derive(Clone, Debug)]
pub struct CoverCurve {
    f: FqPoly,
    d: u32,
    n: u32,
    genus: u32,
    /// `(multiplicity, degree)` for each irreducible factor of `f`.
    branch: Vec<(u32, u32)>,
}

impl CoverCurve {
    pub fn new(f: FqPoly, d: u32, n: u32) -> Result<CoverCurve> {
        let field = f.field().clone();
        if d == 0 || n == 0 {
            return Err(Error::InvalidInput("d and n must be positive".into()));
        }
        if d % field.p() == 0 {
            return Err(Error::TamenessViolation { p: field.p(), d });
        }
        if f.is_zero() {
            return Err(Error::InvalidInput("f must be nonzero".into()));
        }
        let fac = f.factor()?;
        let branch: Vec<(u32, u32)> =
            fac.factors.iter().map(|(p, m)| (*m, p.degree().unwrap_or(0) as u32)).collect();
        let g_all = branch.iter().fold(d, |g, &(m, _)| g.gcd(&m));
        if g_all != 1 {
            return Err(Error::InvalidInput(format!(
                "y^{d} = {f} is not geometrically irreducible"
            )));
        }
        let deg = f.degree().unwrap_or(0) as u32;
        let mut ram: i64 = branch.iter().map(|&(m, e)| (e * (d - d.gcd(&m))) as i64).sum();
        ram += (d - d.gcd(&deg)) as i64;
        let two_g = 2 - 2 * d as i64 + ram;
        if two_g < 0 || two_g % 2 != 0 {
            return Err(Error::InternalInconsistency(format!("Riemann-Hurwitz gives 2g = {two_g}")));
        }
        Ok(CoverCurve { f, d, n, genus: (two_g / 2) as u32, branch })
    }

    pub fn f(&self) -> &FqPoly {
        &self.f
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Size of the field of definition `q^n`.
    pub fn q(&self) -> u64 {
        self.f.field().q().pow(self.n)
    }

    /// Multiplicities and degrees of the finite branch points.
    pub fn branch_data(&self) -> &[(u32, u32)] {
        &self.branch
    }

    /// Points over `F_{q^{nm}}` with the default budget.
    pub fn count_points(&self, m: u32) -> Result<u64> {
        self.count_points_within(m, COUNT_BUDGET)
    }

    /// Points of the smooth model over `F_{q^{nm}}`.
    pub fn count_points_within(&self, m: u32, budget: u64) -> Result<u64> {
        if m == 0 {
            return Err(Error::InvalidInput("m must be positive".into()));
        }
        let base = self.f.field();
        let size = base
            .q()
            .checked_pow(self.n * m)
            .filter(|&s| s <= budget)
            .ok_or_else(|| {
                Error::BudgetExceeded(format!("F_{}^{} exceeds {budget}", base.q(), self.n * m))
            })?;
        let k = base.extension(self.n * m)?;
        let emb = Embedding::new(base, &k)?;
        let fk = self.f.map_coeffs(&k, |c| emb.apply(c));
        let d = self.d as u64;
        let roots_per = d.gcd(&(size - 1));
        let coeffs: Vec<Fe> = fk.coeffs().to_vec();
        let parts = par::map_chunks(size as usize, 1 << 14, par::default_mode(), |range| {
            let mut acc = 0u64;
            let mut zeros = Vec::new();
            for x in range {
                let x = x as Fe;
                let mut v = 0;
                for &c in coeffs.iter().rev() {
                    v = k.add(k.mul(v, x), c);
                }
                if v == 0 {
                    zeros.push(x);
                } else if k.is_power(v, d) {
                    acc += roots_per;
                }
            }
            (acc, zeros)
        });
        let mut total = 0u64;
        for (acc, zeros) in parts {
            total += acc;
            for x in zeros {
                let (mult, unit) = split_root(&fk, x)?;
                total += nth_roots(&k, unit, self.d.gcd(&mult) as u64);
            }
        }
        let deg = fk.degree().unwrap_or(0) as u32;
        total += nth_roots(&k, fk.lc(), self.d.gcd(&deg) as u64);
        Ok(total)
    }

    /// The numerator of the zeta function, a polynomial of degree `2g`.
    pub fn zeta_numerator(&self) -> Result<LPoly> {
        self.zeta_numerator_within(COUNT_BUDGET)
    }

    /// [`CoverCurve::zeta_numerator`] with an explicit field-size budget.
    ///
    /// Two extra counts are used as an overdetermined check when they fit.
    pub fn zeta_numerator_within(&self, budget: u64) -> Result<LPoly> {
        let g = self.genus;
        let qn = self.q();
        let fits = |m: u32| qn.checked_pow(m).is_some_and(|s| s <= budget);
        let top = if fits(2 * g + 2) {
            2 * g + 2
        } else if g == 0 || fits(2 * g) {
            2 * g
        } else {
            return Err(Error::BudgetExceeded(format!(
                "genus {g} over F_{qn} needs fields beyond {budget}"
            )));
        };
        let counts: Vec<u64> = (1..=top).map(|m| self.count_points_within(m, budget)).collect::<Result<_>>()?;
        let qb = BigInt::from(qn);
        let sums: Vec<BigInt> = counts
            .iter()
            .enumerate()
            .map(|(i, &nm)| qb.pow(i as u32 + 1) + 1 - BigInt::from(nm))
            .collect();
        let mut c = vec![BigInt::one()];
        for k in 1..=top as usize {
            let mut s = BigInt::zero();
            for j in 1..=k {
                s -= &sums[j - 1] * &c[k - j];
            }
            let (ck, r) = s.div_rem(&BigInt::from(k));
            if !r.is_zero() {
                return Err(Error::InternalInconsistency(format!(
                    "zeta coefficient {k} of {self:?} is not integral"
                )));
            }
            c.push(ck);
        }
        let two_g = 2 * g as usize;
        if let Some(k) = (two_g + 1..c.len()).find(|&k| !c[k].is_zero()) {
            return Err(Error::InternalInconsistency(format!(
                "zeta numerator has a nonzero coefficient at T^{k} beyond 2g = {two_g}"
            )));
        }
        c.truncate(two_g + 1);
        for k in 0..=g as usize {
            if c[two_g - k] != &c[k] * qb.pow((g as usize - k) as u32) {
                return Err(Error::InternalInconsistency(format!(
                    "zeta numerator fails the functional equation at T^{k}"
                )));
            }
        }
        let ring = CycloRing::get(2, qn);
        let l = LPoly {
            coeffs: c.into_iter().map(|x| ring.big(x)).collect(),
            q: qn,
            n: self.n,
            weight: 0,
            duality: SelfDuality::Symplectic,
            rep_tag: format!("cover y^{} = {}", self.d, self.f),
        };
        if g > 0 {
            crate::lfunc::fe::root_number(&l)?;
        }
        Ok(l)
    }

    /// The product of the orbit L-functions for the nontrivial orbits.
    pub fn orbit_product(&self) -> Result<Vec<ScalarExt>> {
        let base = self.f.field();
        let chi = PowerCharacter::from_poly(self.f.clone(), self.d, 1)?;
        let trivial = RepDescriptor::Trivial(base.clone());
        let orbits = orbits_of_q(self.d, self.n, base.q())?;
        let mut factors = Vec::new();
        for o in orbits.iter().filter(|o| !o.is_trivial()) {
            factors.push(l_orbit(&trivial, &chi, o, self.n)?);
        }
        let level = factors.iter().fold(2u32, |m, l| m.lcm(&l.ring().m()));
        let ring = CycloRing::get(level, self.q());
        let mut prod = vec![ring.one()];
        for l in factors {
            prod = spoly::mul(&prod, &l.lift(&ring)?.coeffs);
        }
        Ok(spoly::trim(prod))
    }

    /// Whether the zeta numerator equals the product over nontrivial orbits.
    pub fn check_orbit_factorization(&self) -> Result<bool> {
        let zeta = self.zeta_numerator()?;
        let prod = self.orbit_product()?;
        let ring = prod[0].ring().clone();
        let lifted = zeta.lift(&ring)?;
        Ok(spoly::trim(lifted.coeffs) == prod)
    }
}

/// Multiplicity of the root `x` and the value at `x` of the cofactor.
fn split_root(f: &FqPoly, x: Fe) -> Result<(u32, Fe)> {
    let k = f.field();
    let mut cur = f.coeffs().to_vec();
    let mut mult = 0;
    loop {
        let mut q = vec![0; cur.len().saturating_sub(1)];
        let mut acc = 0;
        for i in (0..cur.len()).rev() {
            acc = k.add(k.mul(acc, x), cur[i]);
            if i > 0 {
                q[i - 1] = acc;
            }
        }
        if acc != 0 {
            return Ok((mult, acc));
        }
        if q.is_empty() {
            return Err(Error::InvalidInput("zero polynomial".into()));
        }
        mult += 1;
        cur = q;
    }
}

/// Number of `w` in `k` with `w^e = c`, `c` nonzero.
fn nth_roots(k: &Arc<FiniteField>, c: Fe, e: u64) -> u64 {
    if k.is_power(c, e) {
        e.gcd(&(k.q() - 1))
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Arc<FiniteField> {
        FiniteField::of_order(5).unwrap()
    }

    #[test]
    fn genus_by_riemann_hurwitz() {
        let f = f5();
        let quintic = FqPoly::parse(&f, "x^5+x+1").unwrap();
        assert!(quintic.is_squarefree());
        assert_eq!(CoverCurve::new(quintic, 2, 1).unwrap().genus(), 2);
        let quartic = FqPoly::parse(&f, "x^4+2").unwrap();
        assert_eq!(CoverCurve::new(quartic, 3, 1).unwrap().genus(), 3);
        let lin = FqPoly::parse(&f, "x+1").unwrap();
        assert_eq!(CoverCurve::new(lin, 2, 1).unwrap().genus(), 0);
        let sq = FqPoly::parse(&f, "(x+1)^2").unwrap();
        assert!(CoverCurve::new(sq, 2, 1).is_err());
    }

    #[test]
    fn counts_and_numerators() {
        let f = f5();
        let c = CoverCurve::new(FqPoly::parse(&f, "x^3-x").unwrap(), 2, 1).unwrap();
        assert_eq!(c.count_points(1).unwrap(), 8);
        let z = c.zeta_numerator().unwrap();
        assert_eq!(z.integer_coeffs().unwrap(), vec![1.into(), 2.into(), 5.into()]);
        let one = CoverCurve::new(FqPoly::parse(&f, "x^2+x+1").unwrap(), 1, 1).unwrap();
        assert_eq!(one.count_points(2).unwrap(), 26);
        let lin = CoverCurve::new(FqPoly::parse(&f, "x").unwrap(), 2, 1).unwrap();
        assert_eq!(lin.zeta_numerator().unwrap().degree(), 0);
    }

    #[test]
    fn unique_cube_roots() {
        // 5 = 2 mod 3: affine count is q whatever f is
        let f = f5();
        let c = CoverCurve::new(FqPoly::parse(&f, "x^4+x+1").unwrap(), 3, 1).unwrap();
        let inf = 1;
        assert_eq!(c.count_points(1).unwrap(), 5 + inf);
        let z = c.zeta_numerator().unwrap();
        let ring = z.ring().clone();
        let div = spoly::div_exact(&z.coeffs, &[ring.one(), ring.zero(), ring.int(5)]);
        assert!(div.is_some());
    }

    #[test]
    fn orbit_factorization_small() {
        let f = FiniteField::of_order(7).unwrap();
        let c = CoverCurve::new(FqPoly::parse(&f, "x^3+x+3").unwrap(), 3, 1).unwrap();
        assert!(c.check_orbit_factorization().unwrap());
        let h = CoverCurve::new(FqPoly::parse(&f5(), "x^5+2*x+1").unwrap(), 2, 1).unwrap();
        assert!(h.check_orbit_factorization().unwrap());
    }
}
