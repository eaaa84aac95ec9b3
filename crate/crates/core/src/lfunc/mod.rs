//! L-polynomials, functional equations, orbits and forced zeros.

pub mod classify;
pub mod euler;
pub mod fe;
pub mod orbits;
pub mod signs;

use std::fmt;
use std::sync::Arc;

use crate::algebra::{CycloRing, ScalarExt};
use crate::error::{Error, Result};
use crate::reps::SelfDuality;

pub use classify::{classify_context, classify_exceptional, ClassifyContext, ExceptionalType};
pub use euler::{euler_series, l_polynomial};
pub use fe::{
    fe_checks_passed, functional_equation, inverse_roots, root_multiplicity, root_multiplicity_approx, root_number,
    weil_check, RootNumber,
};
pub use orbits::{l_orbit, l_orbit_here, orbits_of_q, Orbit};
pub use signs::{
    forced_factor, hypothesis_h1, hypothesis_h2, local_sign_prediction, ForcedContext, LocalConditions,
    SignCase,
};

/// An L-polynomial over `F_Q`, `Q = q^n`, with coefficients in `Z[zeta_m][sqrt(Q)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPoly {
    /// `coeffs[k]` is the coefficient of `T^k`; `coeffs[N]` is nonzero.
    pub coeffs: Vec<ScalarExt>,
    /// Size of the field of definition `Q`.
    pub q: u64,
    /// Degree of the constant extension the polynomial was computed over.
    pub n: u32,
    pub weight: u32,
    pub duality: SelfDuality,
    pub rep_tag: String,
}

impl LPoly {
    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn ring(&self) -> &Arc<CycloRing> {
        self.coeffs[0].ring()
    }

    /// Coefficients of the contragredient: complex conjugates.
    pub fn dual(&self) -> LPoly {
        LPoly { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), ..self.clone() }
    }

    /// Integer coefficients, when all coefficients are rational integers.
    pub fn integer_coeffs(&self) -> Option<Vec<num_bigint::BigInt>> {
        self.coeffs.iter().map(|c| c.as_integer()).collect()
    }

    /// Moves the coefficients into a ring of level divisible by the current one.
    pub fn lift(&self, ring: &Arc<CycloRing>) -> Result<LPoly> {
        let coeffs = self.coeffs.iter().map(|c| c.lift(ring)).collect::<Result<Vec<_>>>()?;
        Ok(LPoly { coeffs, ..self.clone() })
    }

    /// Serializes as `q= n= w= N= m= coeffs=[...]`.
    pub fn to_text(&self) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!(
            "q={} n={} w={} N={} m={} coeffs=[{}]",
            self.q,
            self.n,
            self.weight,
            self.degree(),
            self.ring().m(),
            coeffs.join("; ")
        )
    }

    /// Parses [`LPoly::to_text`] output; duality and tag are not stored.
    pub fn from_text(s: &str) -> Result<LPoly> {
        let (head, rest) = s
            .split_once("coeffs=[")
            .ok_or_else(|| Error::Parse("missing coeffs=[".into()))?;
        let body = rest.trim_end().strip_suffix(']').ok_or_else(|| Error::Parse("missing ]".into()))?;
        let mut fields = std::collections::HashMap::new();
        for kv in head.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("bad field {kv}")))?;
            let v: u64 = v.parse().map_err(|_| Error::Parse(format!("bad value in {kv}")))?;
            fields.insert(k.to_string(), v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| Error::Parse(format!("missing {k}")));
        let q = get("q")?;
        let ring = CycloRing::get(get("m")? as u32, q);
        let coeffs = body
            .split(';')
            .map(|c| ScalarExt::parse(&ring, c.trim()))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.len() as u64 != get("N")? + 1 {
            return Err(Error::Parse("coefficient count does not match N".into()));
        }
        Ok(LPoly {
            coeffs,
            q,
            n: get("n")? as u32,
            weight: get("w")? as u32,
            duality: SelfDuality::None,
            rep_tag: String::new(),
        })
    }

    /// Builds an L-polynomial from integer coefficients.
    pub fn from_ints(q: u64, weight: u32, duality: SelfDuality, coeffs: &[i64]) -> LPoly {
        let ring = CycloRing::get(2, q);
        LPoly {
            coeffs: coeffs.iter().map(|&c| ring.int(c)).collect(),
            q,
            n: 1,
            weight,
            duality,
            rep_tag: "constructed".into(),
        }
    }
}

impl fmt::Display for LPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let l = LPoly::from_ints(5, 0, SelfDuality::Symplectic, &[1, -2, 3, -10, 25]);
        let back = LPoly::from_text(&l.to_text()).unwrap();
        assert_eq!(back.coeffs, l.coeffs);
        assert_eq!((back.q, back.n, back.weight), (5, 1, 0));
    }
}
