//! Orbits of multiplication by `q^n` on `Z/d` and the induced L-functions.

use crate::algebra::{CycloRing, ScalarExt};
use crate::error::{Error, Result};
use crate::lfunc::euler::l_polynomial_here;
use crate::lfunc::LPoly;
use crate::reps::{PowerCharacter, RepDescriptor, SelfDuality};

/// An orbit of `i -> Q i` on `Z/d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orbit {
    pub members: Vec<u32>,
    pub d: u32,
    /// Orbit size.
    pub a_o: u32,
    /// `d / gcd(d, i)` for any member.
    pub d_o: u32,
    /// Whether `-o = o`.
    pub symmetric: bool,
}

impl Orbit {
    pub fn is_trivial(&self) -> bool {
        self.members == [0]
    }

    /// Whether this is the orbit `{d/2}`.
    pub fn is_half(&self) -> bool {
        self.d % 2 == 0 && self.members == [self.d / 2]
    }

    pub fn contains(&self, i: u32) -> bool {
        self.members.contains(&(i % self.d))
    }

    /// The orbit of `i` under multiplication by `qn`.
    pub fn of(i: u32, d: u32, qn: u64) -> Orbit {
        let i = i % d;
        let mut members = vec![i];
        let mut cur = i;
        loop {
            cur = ((cur as u64 * qn) % d as u64) as u32;
            if cur == i {
                break;
            }
            members.push(cur);
        }
        members.sort_unstable();
        let d_o = d / num_integer::gcd(d, i);
        let symmetric = members.contains(&((d - i) % d));
        Orbit { a_o: members.len() as u32, members, d, d_o, symmetric }
    }
}

/// Partition of `Z/d` into orbits of multiplication by `q^n`, sorted by least member.
pub fn orbits_of_q(d: u32, n: u32, q: u64) -> Result<Vec<Orbit>> {
    if d == 0 {
        return Err(Error::InvalidInput("d must be positive".into()));
    }
    if num_integer::gcd(q, d as u64) != 1 {
        return Err(Error::DomainMismatch(format!("gcd({q}, {d}) > 1")));
    }
    let mut qn = 1u64;
    for _ in 0..n {
        qn = qn * (q % d as u64) % d as u64;
    }
    let mut seen = vec![false; d as usize];
    let mut out = Vec::new();
    for i in 0..d {
        if seen[i as usize] {
            continue;
        }
        let o = Orbit::of(i, d, qn);
        for &m in &o.members {
            seen[m as usize] = true;
        }
        out.push(o);
    }
    Ok(out)
}

/// Moves an element without `u` part into the ring for `Q`.
fn rering(x: &ScalarExt, ring: &std::sync::Arc<CycloRing>) -> Result<ScalarExt> {
    if x.b().iter().any(|c| !num_traits::Zero::is_zero(c)) {
        return Err(Error::InternalInconsistency("unexpected half power in orbit L".into()));
    }
    let mut out = ring.zero();
    let src = x.ring();
    let step = ring.m() / src.m();
    for (j, c) in x.a().iter().enumerate() {
        if !num_traits::Zero::is_zero(c) {
            out = &out + &ring.zeta_pow((step * j as u32) as i64).scale(c);
        }
    }
    Ok(out)
}

/// `L(rho (x) sigma_{o,f}, F_{q^n}, T)` as `L(rho (x) chi_f^i, F_{q^{n a_o}}, T^{a_o})`.
///
/// `base` is untwisted and `chi` supplies `f` and `d`, both over `F_q`; the
/// exponent of `chi` is ignored. With `a_o > 1` the result is recomputed from
/// a second member and compared.
pub fn l_orbit(base: &RepDescriptor, chi: &PowerCharacter, o: &Orbit, n: u32) -> Result<LPoly> {
    let rep_n = base.base_change(n)?;
    let chi_n = chi.base_change(n)?;
    l_orbit_here(&rep_n, &chi_n, o, n)
}

/// [`l_orbit`] for `rep` and `chi` already defined over `F_{q^n}`.
pub fn l_orbit_here(rep: &RepDescriptor, chi: &PowerCharacter, o: &Orbit, n: u32) -> Result<LPoly> {
    if o.is_trivial() {
        return l_polynomial_here(rep, n);
    }
    let na = n * o.a_o;
    let base_ext = rep.base_change(o.a_o)?;
    let chi_ext = chi.base_change(o.a_o)?;
    let compute = |i: u32| -> Result<LPoly> {
        let twisted = base_ext.twist(chi_ext.with_exponent(i))?;
        l_polynomial_here(&twisted, na)
    };
    let first = compute(o.members[0])?;
    if o.a_o > 1 {
        let second = compute(o.members[1])?;
        if second.coeffs != first.coeffs {
            return Err(Error::InternalInconsistency(format!(
                "orbit members {} and {} give different L-functions",
                o.members[0], o.members[1]
            )));
        }
    }
    let qn = rep.field().q();
    let ring = CycloRing::get(first.ring().m(), qn);
    let a = o.a_o as usize;
    let mut coeffs = vec![ring.zero(); first.degree() as usize * a + 1];
    for (k, c) in first.coeffs.iter().enumerate() {
        coeffs[k * a] = rering(c, &ring)?;
    }
    let duality = if o.symmetric { rep.self_duality() } else { SelfDuality::None };
    let l = LPoly {
        coeffs,
        q: qn,
        n,
        weight: rep.weight(),
        duality,
        rep_tag: format!("{} (x) sigma(o={:?}, f={}, d={})", rep, o.members, chi.g(), chi.d()),
    };
    crate::lfunc::fe::root_number(&l)?;
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orbit_examples() {
        let o = orbits_of_q(4, 1, 7).unwrap();
        let m: Vec<Vec<u32>> = o.iter().map(|x| x.members.clone()).collect();
        assert_eq!(m, vec![vec![0], vec![1, 3], vec![2]]);
        assert!(o[1].symmetric);
        assert_eq!(o[1].a_o, 2);
        let o = orbits_of_q(5, 1, 7).unwrap();
        assert_eq!(o[1].members, vec![1, 2, 3, 4]);
        assert!(o[1].symmetric);
        assert_eq!(orbits_of_q(2, 3, 9).unwrap().len(), 2);
        assert!(matches!(orbits_of_q(6, 1, 9), Err(Error::DomainMismatch(_))));
    }
}
