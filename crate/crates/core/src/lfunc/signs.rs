//! Local conditions, sign predictions, parity hypotheses and forced factors.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CycloRing, FiniteField, FqPoly, ScalarExt};
use crate::error::{Error, Result};
use crate::lfunc::Orbit;
use crate::places::{splitting_class, Place, RatFunc, SplittingClass};
use crate::reps::{PowerCharacter, RepDescriptor, SelfDuality};

/// Local conditions on `f` at places of the base field `F`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConditions {
    pub d: u32,
    /// `S_s`: places required to split.
    pub split: Vec<Place>,
    /// `S_i`: places required to be inert with maximal residue degree.
    pub inert: Vec<Place>,
    /// `S_r`: places required to be totally ramified.
    pub ramified: Vec<Place>,
}

/// Conditions at places of `F_n`, together with the places of `|n|` outside `S_r`.
#[derive(Clone, Debug)]
pub struct ConditionsOver {
    pub d: u32,
    pub field: Arc<FiniteField>,
    pub split: Vec<Place>,
    pub inert: Vec<Place>,
    pub ramified: Vec<Place>,
    /// Places over `|n|` not over `S_r`; `f` must be unramified there.
    pub unramified: Vec<Place>,
}

/// How the leading coefficient of sampled `f` is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leading {
    Monic,
    Any,
}

fn above(places: &[Place], n: u32) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    for v in places {
        out.extend(v.places_above(n)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

impl LocalConditions {
    pub fn none(d: u32) -> Self {
        LocalConditions { d, split: vec![], inert: vec![], ramified: vec![] }
    }

    /// Checks pairwise disjointness.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for v in self.split.iter().chain(&self.inert).chain(&self.ramified) {
            if !seen.insert(v.clone()) {
                return Err(Error::ContextError(format!("place {v} appears in two condition sets")));
            }
        }
        Ok(())
    }

    /// The conditions over `F_n` for a representation over `F`.
    pub fn over(&self, rep: &RepDescriptor, n: u32) -> Result<ConditionsOver> {
        self.validate()?;
        let field = rep.field().extension(n)?;
        let split = above(&self.split, n)?;
        let inert = above(&self.inert, n)?;
        let ramified = above(&self.ramified, n)?;
        let bad = bad_places(rep, n)?;
        let unramified = bad.into_iter().filter(|v| !ramified.contains(v)).collect();
        Ok(ConditionsOver { d: self.d, field, split, inert, ramified, unramified })
    }
}

/// Support of the conductor of the untwisted `rep` over `F_n`.
pub fn bad_places(rep: &RepDescriptor, n: u32) -> Result<Vec<Place>> {
    match rep {
        RepDescriptor::Trivial(_) => Ok(Vec::new()),
        _ => Ok(rep.base_change(n)?.conductor_divisor()?.into_iter().map(|(v, _)| v).collect()),
    }
}

impl ConditionsOver {
    /// Whether `f` meets every local condition.
    pub fn satisfied(&self, f: &FqPoly) -> Result<bool> {
        let rf = RatFunc::from(f.clone());
        let d = self.d;
        for v in &self.split {
            if splitting_class(&rf, v, d)? != SplittingClass::Split {
                return Ok(false);
            }
        }
        for v in &self.inert {
            if !matches!(splitting_class(&rf, v, d)?, SplittingClass::InertMax { .. }) {
                return Ok(false);
            }
        }
        for v in &self.ramified {
            if !splitting_class(&rf, v, d)?.is_totally_ramified(d) {
                return Ok(false);
            }
        }
        for v in &self.unramified {
            if !splitting_class(&rf, v, d)?.is_unramified() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Product of the finite places required to ramify.
    pub fn ramified_prefix(&self) -> FqPoly {
        let mut p = FqPoly::one(&self.field);
        for v in &self.ramified {
            if let Some(pi) = v.poly() {
                p = p.mul(pi);
            }
        }
        p
    }

    /// Draws `c * prefix * g` with `g` monic squarefree of degree `deg_g`
    /// until the conditions hold; `None` after `tries` attempts.
    pub fn sample(&self, deg_g: u32, leading: Leading, tries: u64, rng: &mut ChaCha8Rng) -> Result<Option<FqPoly>> {
        let prefix = self.ramified_prefix();
        let q = self.field.q();
        for _ in 0..tries {
            let mut coeffs: Vec<u32> = (0..deg_g).map(|_| rng.random_range(0..q) as u32).collect();
            coeffs.push(1);
            let g = FqPoly::new(self.field.clone(), coeffs);
            let c = match leading {
                Leading::Monic => 1,
                Leading::Any => rng.random_range(1..q) as u32,
            };
            let f = prefix.mul(&g).scale(c);
            if !f.is_squarefree() {
                continue;
            }
            if self.satisfied(&f)? {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }

    /// Samples over a range of degrees, trying each for `tries_per_degree` draws.
    pub fn sample_any_degree(&self, seed: u64, tries_per_degree: u64) -> Result<FqPoly> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for deg in 1..=12u32 {
            if let Some(f) = self.sample(deg, Leading::Any, tries_per_degree, &mut rng)? {
                return Ok(f);
            }
        }
        Err(Error::SamplingExhausted("no f satisfying the local conditions".into()))
    }
}

/// The two configurations where local signs of quadratic twists are known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignCase {
    /// Representation unramified, quadratic character ramified: the local sign.
    TwistRamified,
    /// Representation ramified, character unramified and nontrivial: the sign ratio.
    TwistUnramified,
}

/// Predicted local sign (first case) or sign ratio (second case) at `v`.
///
/// `rep` and `psi` are over the same field and `psi` is quadratic.
pub fn local_sign_prediction(rep: &RepDescriptor, psi: &PowerCharacter, v: &Place) -> Result<(SignCase, i64)> {
    if rep.self_duality() != SelfDuality::Symplectic {
        return Err(Error::Unsupported("local sign rule needs a symplectic representation".into()));
    }
    if psi.order() != 2 {
        return Err(Error::Unsupported("local sign rule needs a quadratic character".into()));
    }
    let cond = rep.cond_exp(v)?;
    let rf = RatFunc::from(psi.g().clone());
    let class = splitting_class(&rf, v, 2)?;
    match (cond, class) {
        (0, SplittingClass::Ramified { .. }) => {
            let exp = (v.residue_size() - 1) * rep.dim() as u64 / 4;
            Ok((SignCase::TwistRamified, if exp % 2 == 0 { 1 } else { -1 }))
        }
        (c, SplittingClass::InertMax { .. }) if c > 0 => {
            Ok((SignCase::TwistUnramified, if c % 2 == 0 { 1 } else { -1 }))
        }
        _ => Err(Error::Unsupported(format!("configuration at {v} outside the two sign cases"))),
    }
}

/// Hypothesis H1: `cond_v(rho (x) psi_f)` is even at every place over
/// `|n|` outside `S_s` and `S_i`, checked on two sampled `f`.
pub fn hypothesis_h1(rep: &RepDescriptor, conds: &LocalConditions, n: u32, seed: u64) -> Result<bool> {
    if rep.self_duality() != SelfDuality::Symplectic {
        return Err(Error::ContextError("H1 is stated for symplectic representations".into()));
    }
    let d = conds.d;
    if d % 2 != 0 {
        return Err(Error::ContextError("H1 needs an even d".into()));
    }
    let over = conds.over(rep, n)?;
    let rep_n = rep.base_change(n)?;
    let relevant: Vec<Place> = bad_places(rep, n)?
        .into_iter()
        .filter(|v| !over.split.contains(v) && !over.inert.contains(v))
        .collect();
    let mut answers = Vec::new();
    for s in 0..2u64 {
        let f = over.sample_any_degree(seed.wrapping_add(s), 400)?;
        let tau = rep_n.twist(PowerCharacter::from_poly(f, d, d / 2)?)?;
        let mut parities = Vec::new();
        for v in &relevant {
            parities.push(tau.cond_exp(v)? % 2 == 0);
        }
        answers.push(parities);
    }
    if answers[0] != answers[1] {
        return Err(Error::InternalInconsistency(
            "H1 conductor parities differ between two conforming f".into(),
        ));
    }
    Ok(answers[0].iter().all(|&b| b))
}

/// A function whose `d`-th power class is a totally ramified character at `v`
/// with the given valuation and unit twist.
fn local_uniformizer_power(v: &Place, field: &Arc<FiniteField>, a: u32, c: u32) -> FqPoly {
    let base = match v.poly() {
        Some(pi) => pi.clone(),
        None => FqPoly::x(field),
    };
    base.pow(a).scale(c)
}

/// Hypothesis H2 for a symmetric orbit with `a_o > 1`.
///
/// The characters `chi_f^i`, `i` in `o`, live over `F_{n a_o}`, so the
/// parity count runs over places of that field.
///
/// Fails with `HypothesisInapplicable` when the parity at some place
/// depends on the chosen ramified character.
pub fn hypothesis_h2(rep: &RepDescriptor, o: &Orbit, conds: &LocalConditions, n: u32) -> Result<bool> {
    if !o.symmetric || o.a_o <= 1 {
        return Err(Error::ContextError("H2 needs a symmetric orbit with a_o > 1".into()));
    }
    let n = n * o.a_o;
    let over = conds.over(rep, n)?;
    let rep_n = rep.base_change(n)?;
    let field = rep_n.field();
    let d = conds.d;
    let i = o.members[0];
    let d_o = o.d_o;
    let mut total = 0u64;
    for v in bad_places(rep, n)? {
        let deg = v.degree() as u64;
        if over.ramified.contains(&v) {
            let units: Vec<u32> = (1..d_o).filter(|a| num_integer::gcd(*a, d_o) == 1).collect();
            let mut parity = None;
            for (k, &a) in units.iter().enumerate().take(2) {
                let c = if k == 0 { 1 } else { field.generator() };
                let g = local_uniformizer_power(&v, &field, a, c);
                let g = if g.is_zero() { FqPoly::one(&field) } else { g };
                let chi = PowerCharacter::from_poly(g, d, i)?;
                let tw = rep_n.base().twist(chi)?;
                let cv = tw.cond_exp(&v)? as u64;
                let p = cv % 2;
                match parity {
                    None => parity = Some((p, cv)),
                    Some((p0, _)) if p0 != p => {
                        return Err(Error::HypothesisInapplicable(format!(
                            "conductor parity at {v} depends on the ramified character"
                        )))
                    }
                    _ => {}
                }
            }
            total += parity.map(|x| x.1).unwrap_or(0) * deg;
        } else {
            total += rep_n.cond_exp(&v)? as u64 * deg;
        }
    }
    Ok(total % 2 == 1)
}

/// Context for the forced-factor predictor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ForcedContext {
    pub h1: Option<bool>,
    pub h2: Option<bool>,
    /// Parity of `deg cond(rho (x) chi_f^i)` for the `f` at hand: `true` when odd.
    pub cond_odd: Option<bool>,
    /// Root number of `rho (x) psi_f` for `o = {d/2}`.
    pub w_sign: Option<i64>,
}

/// The factor of `L(rho (x) sigma_{o,f}, F_n, T)` forced by sign or induction.
///
/// `ring` must have `q = Q = q^n`; `alpha = u^{w+1}` is the central value.
pub fn forced_factor(
    duality: SelfDuality,
    dim: u32,
    weight: u32,
    o: &Orbit,
    ctx: &ForcedContext,
    ring: &Arc<CycloRing>,
) -> Result<Vec<ScalarExt>> {
    let one = vec![ring.one()];
    if duality == SelfDuality::None || !o.symmetric || o.is_trivial() {
        return Ok(one);
    }
    let alpha = ring.u_pow(weight + 1);
    if o.is_half() {
        if duality != SelfDuality::Symplectic {
            return Ok(one);
        }
        let (w, odd) = match (ctx.w_sign, ctx.cond_odd) {
            (Some(w), Some(odd)) => (w, odd),
            _ => return Err(Error::ContextError("sign and degree parity are required".into())),
        };
        if w != 1 && w != -1 {
            return Err(Error::ContextError(format!("root number {w} is not a sign")));
        }
        return Ok(if odd {
            vec![ring.one(), alpha.scale(&w.into())]
        } else if w == -1 {
            vec![ring.one(), ring.zero(), -&(&alpha * &alpha)]
        } else {
            one
        });
    }
    if o.a_o <= 1 {
        return Ok(one);
    }
    let odd = match (ctx.cond_odd, ctx.h2) {
        (Some(odd), Some(true)) if dim % 2 == 0 && !odd => {
            return Err(Error::ContextError("H2 holds but the conductor degree is even".into()))
        }
        (Some(odd), _) => odd,
        (None, Some(h2)) if dim % 2 == 0 => h2,
        _ => return Err(Error::ContextError("conductor parity is undetermined".into())),
    };
    if !odd {
        return Ok(one);
    }
    let a = o.a_o as usize;
    let top = alpha.pow(o.a_o);
    let mut out = vec![ring.zero(); a + 1];
    out[0] = ring.one();
    out[a] = match duality {
        SelfDuality::Symplectic => -&top,
        _ => top,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lfunc::orbits_of_q;

    #[test]
    fn case_one_signs() {
        let f5 = FiniteField::of_order(5).unwrap();
        let e = RepDescriptor::parse(&f5, "rep = elliptic; A = \"t^3+1\"; B = \"t\"").unwrap();
        let bad = bad_places(&e, 1).unwrap();
        let v = (0..5).map(|a| Place::linear(&f5, a)).find(|v| !bad.contains(v)).unwrap();
        let psi = PowerCharacter::from_poly(v.poly().unwrap().clone(), 2, 1).unwrap();
        assert_eq!(local_sign_prediction(&e, &psi, &v).unwrap(), (SignCase::TwistRamified, 1));
        let f7 = FiniteField::of_order(7).unwrap();
        let e = RepDescriptor::parse(&f7, "rep = elliptic; A = \"t^3+1\"; B = \"t\"").unwrap();
        let bad = bad_places(&e, 1).unwrap();
        let v = (0..7).map(|a| Place::linear(&f7, a)).find(|v| !bad.contains(v)).unwrap();
        let psi = PowerCharacter::from_poly(v.poly().unwrap().clone(), 2, 1).unwrap();
        assert_eq!(local_sign_prediction(&e, &psi, &v).unwrap().1, -1);
    }

    #[test]
    fn forced_factor_shapes() {
        let ring = CycloRing::get(4, 7);
        let orbits = orbits_of_q(4, 1, 7).unwrap();
        let o13 = &orbits[1];
        let ctx = ForcedContext { h2: Some(true), cond_odd: Some(true), ..Default::default() };
        let p = forced_factor(SelfDuality::Symplectic, 2, 1, o13, &ctx, &ring).unwrap();
        assert_eq!(p[2], ring.int(-49));
        let p = forced_factor(SelfDuality::Orthogonal, 2, 0, o13, &ctx, &ring).unwrap();
        assert_eq!(p[2], ring.int(7));
        let half = &orbits[2];
        let p = forced_factor(SelfDuality::Orthogonal, 1, 0, half, &ctx, &ring).unwrap();
        assert_eq!(p.len(), 1);
        let bad = ForcedContext { h2: Some(true), cond_odd: Some(false), ..Default::default() };
        assert!(forced_factor(SelfDuality::Symplectic, 2, 1, o13, &bad, &ring).is_err());
    }
}
