//! The six exceptional configurations for a target inverse root.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{CycloRing, ScalarExt};
use crate::error::{Error, Result};
use crate::lfunc::signs::{hypothesis_h1, hypothesis_h2, LocalConditions};
use crate::lfunc::{root_number, Orbit};
use crate::reps::{PowerCharacter, RepDescriptor, SelfDuality};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExceptionalType {
    None,
    I,
    II,
    III,
    IV,
    V,
    VI,
}

impl fmt::Display for ExceptionalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ExceptionalType::None => "none",
            ExceptionalType::I => "i",
            ExceptionalType::II => "ii",
            ExceptionalType::III => "iii",
            ExceptionalType::IV => "iv",
            ExceptionalType::V => "v",
            ExceptionalType::VI => "vi",
        };
        f.write_str(s)
    }
}

impl FromStr for ExceptionalType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "none" => ExceptionalType::None,
            "i" => ExceptionalType::I,
            "ii" => ExceptionalType::II,
            "iii" => ExceptionalType::III,
            "iv" => ExceptionalType::IV,
            "v" => ExceptionalType::V,
            "vi" => ExceptionalType::VI,
            other => return Err(Error::Parse(format!("unknown exceptional type '{other}'"))),
        })
    }
}

/// Everything the definition looks at, already evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifyContext {
    pub duality: SelfDuality,
    pub dim: u32,
    pub weight: u32,
    pub orbit: Orbit,
    pub h1: Option<bool>,
    pub h2: Option<bool>,
    /// Whether `deg cond(rho (x) chi_f)` is odd, for `o = {d/2}`.
    pub cond_odd: Option<bool>,
    /// `W(rho (x) chi_f)` for `o = {d/2}`.
    pub w_sign: Option<i64>,
}

/// Applies the clauses in order; `alpha` lives in a ring with `q = Q`.
pub fn classify_context(ctx: &ClassifyContext, alpha: &ScalarExt) -> Result<ExceptionalType> {
    let ring = alpha.ring();
    let o = &ctx.orbit;
    let w1 = ctx.weight + 1;
    let central = ring.u_pow(w1);
    let symplectic = ctx.duality == SelfDuality::Symplectic;
    let orthogonal = ctx.duality == SelfDuality::Orthogonal;
    if symplectic && o.is_half() && ctx.h1 == Some(true) {
        let odd = ctx
            .cond_odd
            .ok_or_else(|| Error::ContextError("conductor parity missing".into()))?;
        let w = ctx.w_sign.ok_or_else(|| Error::ContextError("root number missing".into()))?;
        if !odd && w == -1 && (*alpha == central || *alpha == -&central) {
            return Ok(ExceptionalType::I);
        }
        if odd && *alpha == central.scale(&(-w).into()) {
            return Ok(ExceptionalType::II);
        }
    }
    if o.symmetric && o.a_o > 1 {
        let target = ring.u_pow(w1 * o.a_o);
        let power = alpha.pow(o.a_o);
        let plus = power == target;
        let minus = power == -&target;
        if symplectic && ctx.h2 == Some(true) && plus {
            return Ok(ExceptionalType::III);
        }
        if orthogonal && ctx.dim % 2 == 0 && ctx.h2 == Some(true) && minus {
            return Ok(ExceptionalType::IV);
        }
        if symplectic && plus {
            return Ok(ExceptionalType::V);
        }
        if orthogonal && minus {
            return Ok(ExceptionalType::VI);
        }
    }
    Ok(ExceptionalType::None)
}

/// Evaluates the context for `rep`, conditions and orbit, then classifies.
///
/// The root number and conductor parity for `o = {d/2}` come from a sampled
/// conforming `f`; H1 is itself checked on two samples.
pub fn classify_exceptional(
    rep: &RepDescriptor,
    conds: &LocalConditions,
    n: u32,
    o: &Orbit,
    alpha: &ScalarExt,
    seed: u64,
) -> Result<(ExceptionalType, ClassifyContext)> {
    let duality = rep.self_duality();
    let mut ctx = ClassifyContext {
        duality,
        dim: rep.dim(),
        weight: rep.weight(),
        orbit: o.clone(),
        h1: None,
        h2: None,
        cond_odd: None,
        w_sign: None,
    };
    if duality == SelfDuality::Symplectic && o.is_half() {
        ctx.h1 = Some(hypothesis_h1(rep, conds, n, seed)?);
        let over = conds.over(rep, n)?;
        let f = over.sample_any_degree(seed ^ 0x5eed, 400)?;
        let chi = PowerCharacter::from_poly(f, conds.d, conds.d / 2)?;
        let tau = rep.base_change(n)?.twist(chi)?;
        let l = crate::lfunc::euler::l_polynomial_here(&tau, n)?;
        ctx.cond_odd = Some(tau.conductor_degree()? % 2 == 1);
        ctx.w_sign = root_number(&l)?.sign();
    }
    if o.symmetric && o.a_o > 1 {
        ctx.h2 = match hypothesis_h2(rep, o, conds, n) {
            Ok(b) => Some(b),
            Err(Error::HypothesisInapplicable(_)) => Some(false),
            Err(e) => return Err(e),
        };
    }
    Ok((classify_context(&ctx, alpha)?, ctx))
}

/// `zeta_m^j u^k` in the ring of level `m` over `Q`.
pub fn alpha_value(m: u32, qn: u64, j: i64, k: u32) -> ScalarExt {
    let ring = CycloRing::get(m, qn);
    &ring.zeta_pow(j) * &ring.u_pow(k)
}
