//! Representation descriptors: characters, elliptic curves and their twists.

pub mod elliptic;

use std::fmt;
use std::sync::Arc;

use crate::algebra::{CycloRing, Embedding, FiniteField, FqPoly, ScalarExt};
use crate::error::{Error, Result};
use crate::places::{mu_generator, symbol_exponent, LocalElem, LocalSite, Place, RatFunc};

pub use elliptic::{
    count_points, count_points_bsgs, count_points_exhaustive, frobenius_trace, tate_local,
    EllipticCurve, Kodaira, LocalReduction, ReductionKind,
};

/// Self-duality type of a representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SelfDuality {
    Orthogonal,
    Symplectic,
    None,
}

/// The character `chi_g^i` attached to `F(g^(1/d))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerCharacter {
    g: FqPoly,
    d: u32,
    i: u32,
}

impl PowerCharacter {
    /// `g` is replaced by `num * den^(d-1)`, which has the same class mod `d`-th powers.
    pub fn new(g: &RatFunc, d: u32, i: u32) -> Result<Self> {
        let poly = g.num.mul(&g.den.pow(d.saturating_sub(1)));
        Self::from_poly(poly, d, i)
    }

    pub fn from_poly(g: FqPoly, d: u32, i: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("character order must be positive".into()));
        }
        let p = g.field().p();
        if d % p == 0 {
            return Err(Error::TamenessViolation { p, d });
        }
        if g.is_zero() {
            return Err(Error::UndefinedValuation);
        }
        Ok(PowerCharacter { g, d, i: i % d })
    }

    pub fn g(&self) -> &FqPoly {
        &self.g
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.g.field()
    }

    /// Order `d / gcd(d, i)` of `chi^i` as a character of the Kummer group.
    pub fn order(&self) -> u32 {
        self.d / num_integer::gcd(self.d, self.i)
    }

    pub fn with_exponent(&self, i: u32) -> PowerCharacter {
        PowerCharacter { g: self.g.clone(), d: self.d, i: i % self.d }
    }

    /// `(d', i')` with `chi^i = chi_{g,d'}^{i'}` and `d' | q - 1`.
    pub fn effective(&self) -> Result<(u32, u32)> {
        let q = self.field().q();
        if (q - 1) % self.d as u64 == 0 {
            return Ok((self.d, self.i));
        }
        let o = self.order();
        if (q - 1) % o as u64 == 0 {
            let g = num_integer::gcd(self.d, self.i);
            return Ok((o, self.i / g));
        }
        Err(Error::SymbolUndefined(format!(
            "character of order {o} needs mu_{o} in F_{q}"
        )))
    }

    pub fn is_ramified(&self, le: LocalElem) -> bool {
        (self.i as i64 * le.val).rem_euclid(self.d as i64) != 0
    }

    pub fn base_change(&self, n: u32) -> Result<PowerCharacter> {
        let f = self.field();
        let ext = f.extension(n)?;
        let emb = Embedding::new(f, &ext)?;
        Ok(PowerCharacter { g: self.g.map_coeffs(&ext, |c| emb.apply(c)), d: self.d, i: self.i })
    }
}

/// Evaluates a character at places with a fixed residue field.
pub struct CharLocal<'c> {
    chi: &'c PowerCharacter,
    d: u32,
    i: u32,
    step: u32,
    gamma: u32,
    c_inv: Option<u64>,
}

impl<'c> CharLocal<'c> {
    /// `level` is the cyclotomic level of the target ring; `d'` must divide it.
    pub fn new(chi: &'c PowerCharacter, site: &LocalSite, level: u32) -> Result<Self> {
        let (d, i) = chi.effective()?;
        if level % d != 0 {
            return Err(Error::DomainMismatch(format!("level {level} not divisible by {d}")));
        }
        let gamma = mu_generator(site, d)?;
        let f = site.residue;
        let c_inv = if f.has_tables() && d > 1 {
            let lg = f.log(gamma).expect("nonzero") / ((f.q() - 1) / d as u64);
            Some(inv_mod(lg, d as u64))
        } else {
            None
        };
        Ok(CharLocal { chi, d, i, step: level / d, gamma, c_inv })
    }

    /// Zeta exponent at the target level, or `None` when ramified.
    pub fn zeta_exponent(&self, site: &LocalSite) -> Result<Option<u32>> {
        let le = site.poly(&self.chi.g).expect("nonzero");
        if self.chi.is_ramified(le) {
            return Ok(None);
        }
        if self.d == 1 || self.i == 0 {
            return Ok(Some(0));
        }
        let j = match self.c_inv {
            Some(ci) => {
                let lu = site.residue.log(le.unit).expect("unit");
                ((lu % self.d as u64) * ci % self.d as u64) as u32
            }
            None => symbol_exponent(site, le.unit, self.d, self.gamma)?,
        };
        Ok(Some((self.step as u64 * self.i as u64 * j as u64 % (self.step * self.d) as u64) as u32))
    }
}

fn inv_mod(a: u64, m: u64) -> u64 {
    (1..m).find(|&x| a * x % m == 1).unwrap_or(0)
}

/// Local factor `P_v(X)` with `X = T^deg(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalFactor {
    One,
    /// `1 - sign * zeta^z * X`.
    Linear { sign: i64, zeta: u32 },
    /// `1 - trace * zeta^z * X + q_v * zeta^(2z) * X^2`.
    Quadratic { trace: i64, zeta: u32 },
}

impl LocalFactor {
    /// Degree in `X`.
    pub fn degree(&self) -> u32 {
        match self {
            LocalFactor::One => 0,
            LocalFactor::Linear { .. } => 1,
            LocalFactor::Quadratic { .. } => 2,
        }
    }

    /// Coefficients of `P_v` in `T`.
    pub fn to_poly(&self, ring: &Arc<CycloRing>, deg_v: u32, q_v: u64) -> Vec<ScalarExt> {
        let e = deg_v as usize;
        let mut out = vec![ring.zero(); e * self.degree() as usize + 1];
        out[0] = ring.one();
        match *self {
            LocalFactor::One => {}
            LocalFactor::Linear { sign, zeta } => {
                out[e] = ring.zeta_pow(zeta as i64).scale(&num_bigint::BigInt::from(-sign));
            }
            LocalFactor::Quadratic { trace, zeta } => {
                out[e] = ring.zeta_pow(zeta as i64).scale(&num_bigint::BigInt::from(-trace));
                out[2 * e] = ring.zeta_pow(2 * zeta as i64).scale(&num_bigint::BigInt::from(q_v));
            }
        }
        out
    }
}

/// A representation descriptor over `F_q(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepDescriptor {
    Trivial(Arc<FiniteField>),
    Char(PowerCharacter),
    Elliptic(Arc<EllipticCurve>),
    /// Twist of a trivial or elliptic base by a character.
    Twist(Box<RepDescriptor>, PowerCharacter),
}

impl fmt::Display for RepDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RepDescriptor::Trivial(_) => write!(f, "trivial"),
            RepDescriptor::Char(c) => write!(f, "char(g={},d={},i={})", c.g, c.d, c.i),
            RepDescriptor::Elliptic(e) => write!(f, "elliptic(A={},B={})", e.a(), e.b()),
            RepDescriptor::Twist(b, c) => write!(f, "{b}*char(g={},d={},i={})", c.g, c.d, c.i),
        }
    }
}

impl RepDescriptor {
    pub fn elliptic(curve: EllipticCurve) -> Self {
        RepDescriptor::Elliptic(Arc::new(curve))
    }

    pub fn field(&self) -> Arc<FiniteField> {
        match self {
            RepDescriptor::Trivial(f) => f.clone(),
            RepDescriptor::Char(c) => c.field().clone(),
            RepDescriptor::Elliptic(e) => e.field().clone(),
            RepDescriptor::Twist(b, _) => b.field(),
        }
    }

    pub fn dim(&self) -> u32 {
        match self {
            RepDescriptor::Trivial(_) | RepDescriptor::Char(_) => 1,
            RepDescriptor::Elliptic(_) => 2,
            RepDescriptor::Twist(b, _) => b.dim(),
        }
    }

    pub fn weight(&self) -> u32 {
        match self {
            RepDescriptor::Trivial(_) | RepDescriptor::Char(_) => 0,
            RepDescriptor::Elliptic(_) => 1,
            RepDescriptor::Twist(b, _) => b.weight(),
        }
    }

    pub fn self_duality(&self) -> SelfDuality {
        match self {
            RepDescriptor::Trivial(_) => SelfDuality::Orthogonal,
            RepDescriptor::Char(c) if c.order() <= 2 => SelfDuality::Orthogonal,
            RepDescriptor::Char(_) => SelfDuality::None,
            RepDescriptor::Elliptic(_) => SelfDuality::Symplectic,
            RepDescriptor::Twist(b, c) if c.order() <= 2 => b.self_duality(),
            RepDescriptor::Twist(..) => SelfDuality::None,
        }
    }

    pub fn curve(&self) -> Option<&Arc<EllipticCurve>> {
        match self {
            RepDescriptor::Elliptic(e) => Some(e),
            RepDescriptor::Twist(b, _) => b.curve(),
            _ => None,
        }
    }

    pub fn character(&self) -> Option<&PowerCharacter> {
        match self {
            RepDescriptor::Char(c) | RepDescriptor::Twist(_, c) => Some(c),
            _ => None,
        }
    }

    /// The untwisted part.
    pub fn base(&self) -> RepDescriptor {
        match self {
            RepDescriptor::Char(c) => RepDescriptor::Trivial(c.field().clone()),
            RepDescriptor::Twist(b, _) => (**b).clone(),
            other => other.clone(),
        }
    }

    /// Tensor product with a character; the base must be untwisted.
    pub fn twist(&self, chi: PowerCharacter) -> Result<RepDescriptor> {
        if !chi.field().same_as(&self.field()) {
            return Err(Error::DomainMismatch("character over a different field".into()));
        }
        match self {
            RepDescriptor::Trivial(_) => Ok(RepDescriptor::Char(chi)),
            RepDescriptor::Elliptic(_) => Ok(RepDescriptor::Twist(Box::new(self.clone()), chi)),
            _ => Err(Error::Unsupported("twist of an already twisted representation".into())),
        }
    }

    /// The same representation over `F_{q^n}(t)`.
    pub fn base_change(&self, n: u32) -> Result<RepDescriptor> {
        if n == 1 {
            return Ok(self.clone());
        }
        Ok(match self {
            RepDescriptor::Trivial(f) => RepDescriptor::Trivial(f.extension(n)?),
            RepDescriptor::Char(c) => RepDescriptor::Char(c.base_change(n)?),
            RepDescriptor::Elliptic(e) => RepDescriptor::Elliptic(Arc::new(e.base_change(n)?)),
            RepDescriptor::Twist(b, c) => {
                RepDescriptor::Twist(Box::new(b.base_change(n)?), c.base_change(n)?)
            }
        })
    }

    /// Cyclotomic level of the coefficient ring of the L-polynomial.
    pub fn ring_level(&self) -> Result<u32> {
        match self.character() {
            Some(c) => {
                let (d, _) = c.effective()?;
                Ok(num_integer::lcm(d, 2))
            }
            None => Ok(2),
        }
    }

    /// Local factor and conductor exponent at a site.
    ///
    /// `ell` may carry precomputed reduction data of the elliptic base.
    pub fn local_at(
        &self,
        site: &LocalSite,
        chi: Option<&CharLocal>,
        ell: Option<(LocalReduction, i64)>,
    ) -> Result<(LocalFactor, u32)> {
        let curve_data = |e: &EllipticCurve| -> Result<(LocalReduction, i64)> {
            match ell {
                Some(x) => Ok(x),
                None => e.local_data(site),
            }
        };
        match self {
            RepDescriptor::Trivial(_) => Ok((LocalFactor::Linear { sign: 1, zeta: 0 }, 0)),
            RepDescriptor::Char(_) => {
                let chi = chi.ok_or_else(|| Error::ContextError("missing character data".into()))?;
                Ok(match chi.zeta_exponent(site)? {
                    None => (LocalFactor::One, 1),
                    Some(z) => (LocalFactor::Linear { sign: 1, zeta: z }, 0),
                })
            }
            RepDescriptor::Elliptic(e) => {
                let (red, trace) = curve_data(e)?;
                Ok(elliptic_factor(&red, trace, 0))
            }
            RepDescriptor::Twist(b, c) => {
                let chi = chi.ok_or_else(|| Error::ContextError("missing character data".into()))?;
                let e = match &**b {
                    RepDescriptor::Trivial(_) => {
                        return RepDescriptor::Char(c.clone()).local_at(site, Some(chi), None)
                    }
                    RepDescriptor::Elliptic(e) => e,
                    _ => return Err(Error::Unsupported("nested twist".into())),
                };
                let (red, trace) = curve_data(e)?;
                match chi.zeta_exponent(site)? {
                    Some(z) => Ok(elliptic_factor(&red, trace, z)),
                    None if red.kind != ReductionKind::Additive => Ok((LocalFactor::One, 2)),
                    None if c.order() == 2 => {
                        let tw = e.twisted_reduction_at(site, c.g())?;
                        let t = elliptic::trace_from_reduction(site.residue, &tw)?;
                        Ok(elliptic_factor(&tw, t, 0))
                    }
                    None => Err(Error::Unsupported(format!(
                        "additive reduction twisted by a ramified character of order {}",
                        c.order()
                    ))),
                }
            }
        }
    }

    /// Local factor polynomial in `T` and conductor exponent at a place.
    pub fn local_factor(&self, v: &Place) -> Result<(Vec<ScalarExt>, u32)> {
        let rp = v.residue_point()?;
        let site = rp.site();
        let level = self.ring_level()?;
        let chi = match self.character() {
            Some(c) => Some(CharLocal::new(c, &site, level)?),
            None => None,
        };
        let (lf, cond) = self.local_at(&site, chi.as_ref(), None)?;
        let ring = CycloRing::get(level, self.field().q());
        Ok((lf.to_poly(&ring, v.degree(), v.residue_size()), cond))
    }

    /// Conductor exponent at a place.
    pub fn cond_exp(&self, v: &Place) -> Result<u32> {
        Ok(self.local_factor(v)?.1)
    }

    /// Places with positive conductor exponent, infinity last.
    pub fn conductor_divisor(&self) -> Result<Vec<(Place, u32)>> {
        let mut candidates: Vec<FqPoly> = Vec::new();
        if let Some(c) = self.character() {
            candidates.extend(c.g().factor()?.factors.into_iter().map(|(p, _)| p));
        }
        if let Some(e) = self.curve() {
            candidates.extend(e.disc().factor()?.factors.into_iter().map(|(p, _)| p));
        }
        candidates.sort();
        candidates.dedup();
        let mut places: Vec<Place> = candidates.into_iter().map(Place::Finite).collect();
        places.push(Place::infinity(&self.field()));
        let mut out = Vec::new();
        for v in places {
            let c = self.cond_exp(&v)?;
            if c > 0 {
                out.push((v, c));
            }
        }
        Ok(out)
    }

    pub fn conductor_degree(&self) -> Result<u32> {
        Ok(self.conductor_divisor()?.iter().map(|(v, c)| v.degree() * c).sum())
    }

    /// `N = -2 dim + deg cond`; fails for geometrically trivial input.
    pub fn expected_degree(&self) -> Result<u32> {
        let cond = self.conductor_degree()?;
        let geometrically_trivial = match self {
            RepDescriptor::Trivial(_) => true,
            RepDescriptor::Char(_) => cond == 0,
            _ => false,
        };
        if geometrically_trivial {
            return Err(Error::DegreeUndefined(format!("{self} is geometrically trivial")));
        }
        let n = cond as i64 - 2 * self.dim() as i64;
        if n < 0 {
            return Err(Error::InternalInconsistency(format!("negative degree {n} for {self}")));
        }
        Ok(n as u32)
    }

    /// Parses `rep = elliptic; A = "t"; B = "t^2+1"` and similar one-line forms.
    pub fn parse(field: &Arc<FiniteField>, text: &str) -> Result<RepDescriptor> {
        let mut kind = None;
        let mut a = None;
        let mut b = None;
        let mut g = None;
        let mut d = None;
        let mut i = None;
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key = value in '{item}'")))?;
            let v = v.trim().trim_matches('"').to_string();
            match k.trim() {
                "rep" => kind = Some(v),
                "A" => a = Some(v),
                "B" => b = Some(v),
                "g" => g = Some(v),
                "d" => d = Some(parse_u32(&v)?),
                "i" => i = Some(parse_u32(&v)?),
                other => return Err(Error::Parse(format!("unknown key '{other}'"))),
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("missing key 'rep'".into()))?;
        let need = |x: Option<String>, name: &str| {
            x.ok_or_else(|| Error::Parse(format!("missing key '{name}'")))
        };
        let character = |g: Option<String>, d: Option<u32>, i: Option<u32>| -> Result<PowerCharacter> {
            let g = FqPoly::parse(field, &need(g, "g")?)?;
            let d = d.ok_or_else(|| Error::Parse("missing key 'd'".into()))?;
            PowerCharacter::from_poly(g, d, i.unwrap_or(1))
        };
        let curve = |a: Option<String>, b: Option<String>| -> Result<RepDescriptor> {
            let a = FqPoly::parse(field, &need(a, "A")?)?;
            let b = FqPoly::parse(field, &need(b, "B")?)?;
            Ok(RepDescriptor::elliptic(EllipticCurve::new(a, b)?))
        };
        match kind.as_str() {
            "trivial" => Ok(RepDescriptor::Trivial(field.clone())),
            "char" => Ok(RepDescriptor::Char(character(g, d, i)?)),
            "elliptic" => curve(a, b),
            "twist" => curve(a, b)?.twist(character(g, d, i)?),
            other => Err(Error::Parse(format!("unknown representation '{other}'"))),
        }
    }
}

fn parse_u32(s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::Parse(format!("expected an integer, got '{s}'")))
}

fn elliptic_factor(red: &LocalReduction, trace: i64, zeta: u32) -> (LocalFactor, u32) {
    match red.kind {
        ReductionKind::Good => (LocalFactor::Quadratic { trace, zeta }, 0),
        ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative => {
            (LocalFactor::Linear { sign: red.mult_sign(), zeta }, 1)
        }
        ReductionKind::Additive => (LocalFactor::One, 2),
    }
}
