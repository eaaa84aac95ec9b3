//! Places of `F_q(t)`, valuations, power-residue symbols and splitting classes.
//!
//! A finite place of degree `e` is identified with a Frobenius orbit of
//! elements of `F_{q^e}` of exact degree `e`; local quantities are computed by
//! evaluating at an orbit representative. The place at infinity uses the
//! uniformizer `1/t`.

use std::cell::Cell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;

use crate::algebra::{CycloRing, Embedding, Fe, FiniteField, FqPoly, ScalarExt};
use crate::error::{Error, Result};

/// A place of `F_q(t)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Place {
    /// The place of a monic irreducible polynomial.
    Finite(FqPoly),
    /// The place at infinity, of degree one.
    Infinity(FieldKey),
}

/// Identifies a field by characteristic and degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldKey {
    pub p: u32,
    pub k: u32,
}

impl FieldKey {
    pub fn of(f: &FiniteField) -> Self {
        FieldKey { p: f.p(), k: f.degree() }
    }

    pub fn field(&self) -> Arc<FiniteField> {
        FiniteField::new(self.p, self.k).expect("valid key")
    }
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "({})", p),
            Place::Infinity(_) => write!(f, "inf"),
        }
    }
}

impl PartialOrd for Place {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite places by degree then coefficients, infinity last.
impl Ord for Place {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Place::Finite(a), Place::Finite(b)) => a.cmp(b),
            (Place::Finite(_), Place::Infinity(_)) => Less,
            (Place::Infinity(_), Place::Finite(_)) => Greater,
            (Place::Infinity(a), Place::Infinity(b)) => a.cmp(b),
        }
    }
}

impl Place {
    /// The place of a monic irreducible polynomial.
    pub fn finite(poly: FqPoly) -> Result<Place> {
        if !poly.is_monic() || !poly.is_irreducible() {
            return Err(Error::InvalidInput(format!("{poly} is not monic irreducible")));
        }
        Ok(Place::Finite(poly))
    }

    /// The place `t = a`.
    pub fn linear(field: &Arc<FiniteField>, a: Fe) -> Place {
        Place::Finite(FqPoly::linear(field, a))
    }

    pub fn infinity(field: &Arc<FiniteField>) -> Place {
        Place::Infinity(FieldKey::of(field))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity(_))
    }

    pub fn degree(&self) -> u32 {
        match self {
            Place::Finite(p) => p.degree().unwrap_or(0) as u32,
            Place::Infinity(_) => 1,
        }
    }

    pub fn poly(&self) -> Option<&FqPoly> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinity(_) => None,
        }
    }

    pub fn base_field(&self) -> Arc<FiniteField> {
        match self {
            Place::Finite(p) => p.field().clone(),
            Place::Infinity(k) => k.field(),
        }
    }

    /// Order of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.base_field().q().pow(self.degree())
    }

    /// Residue field, embedding of the constants, and a root of the place.
    pub fn residue_point(&self) -> Result<ResiduePoint> {
        let base = self.base_field();
        match self {
            Place::Infinity(_) => Ok(ResiduePoint {
                residue: base.clone(),
                emb: Embedding::new(&base, &base)?,
                t: 0,
                degree: 1,
                infinite: true,
            }),
            Place::Finite(poly) => {
                let e = self.degree();
                let residue = base.extension(e)?;
                let emb = Embedding::new(&base, &residue)?;
                let lifted = poly.map_coeffs(&residue, |c| emb.apply(c));
                let t = *lifted.roots().first().ok_or_else(|| {
                    Error::InternalInconsistency(format!("{poly} has no root in F_{}", residue.q()))
                })?;
                Ok(ResiduePoint { residue, emb, t, degree: e, infinite: false })
            }
        }
    }

    /// The places of `F_{q^n}(t)` lying over this place.
    pub fn places_above(&self, n: u32) -> Result<Vec<Place>> {
        let base = self.base_field();
        let ext = base.extension(n)?;
        match self {
            Place::Infinity(_) => Ok(vec![Place::infinity(&ext)]),
            Place::Finite(poly) => {
                let emb = Embedding::new(&base, &ext)?;
                let lifted = poly.map_coeffs(&ext, |c| emb.apply(c));
                let fac = lifted.factor()?;
                Ok(fac.factors.into_iter().map(|(g, _)| Place::Finite(g)).collect())
            }
        }
    }
}

/// Owned local data for evaluating functions at a place.
#[derive(Clone)]
pub struct ResiduePoint {
    pub residue: Arc<FiniteField>,
    pub emb: Arc<Embedding>,
    pub t: Fe,
    pub degree: u32,
    pub infinite: bool,
}

impl ResiduePoint {
    pub fn site(&self) -> LocalSite<'_> {
        LocalSite::new(&self.residue, &self.emb, self.t, self.degree, self.infinite)
    }
}

/// Valuation and residue of the unit part of a function at a place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalElem {
    pub val: i64,
    pub unit: Fe,
}

/// A place seen through a root `t` of its polynomial in the residue field.
pub struct LocalSite<'a> {
    pub residue: &'a FiniteField,
    pub emb: &'a Embedding,
    pub t: Fe,
    pub degree: u32,
    pub infinite: bool,
    pi_prime: Cell<Option<Fe>>,
}

impl<'a> LocalSite<'a> {
    pub fn new(
        residue: &'a FiniteField,
        emb: &'a Embedding,
        t: Fe,
        degree: u32,
        infinite: bool,
    ) -> Self {
        LocalSite { residue, emb, t, degree, infinite, pi_prime: Cell::new(None) }
    }

    /// Size of the base field `q`.
    pub fn base_q(&self) -> u64 {
        self.emb.from().q()
    }

    pub fn residue_size(&self) -> u64 {
        self.residue.q()
    }

    /// Derivative of the place polynomial at `t`, the product of `t - t'`
    /// over the other conjugates.
    fn pi_prime(&self) -> Fe {
        if let Some(v) = self.pi_prime.get() {
            return v;
        }
        let f = self.residue;
        let q = self.base_q();
        let mut acc = 1;
        let mut conj = self.t;
        for _ in 1..self.degree {
            conj = f.pow(conj, q);
            acc = f.mul(acc, f.sub(self.t, conj));
        }
        self.pi_prime.set(Some(acc));
        acc
    }

    /// Valuation and unit residue of a polynomial; `None` for zero.
    pub fn poly(&self, p: &FqPoly) -> Option<LocalElem> {
        if p.is_zero() {
            return None;
        }
        if self.infinite {
            return Some(LocalElem { val: -(p.deg_i64()), unit: p.lc() });
        }
        let f = self.residue;
        let coeffs: Vec<Fe> = p.coeffs().iter().map(|&c| self.emb.apply(c)).collect();
        let mut acc = 0;
        for &c in coeffs.iter().rev() {
            acc = f.add(f.mul(acc, self.t), c);
        }
        if acc != 0 {
            return Some(LocalElem { val: 0, unit: acc });
        }
        let mut cur = coeffs;
        let mut val = 0i64;
        loop {
            let n = cur.len();
            let mut quot = vec![0; n - 1];
            let mut carry = cur[n - 1];
            for i in (0..n - 1).rev() {
                quot[i] = carry;
                carry = f.add(cur[i], f.mul(carry, self.t));
            }
            if carry != 0 {
                let denom = f.pow(self.pi_prime(), val as u64);
                let unit = f.div(carry, denom).expect("separable place");
                return Some(LocalElem { val, unit });
            }
            val += 1;
            cur = quot;
        }
    }

    /// Residue of `pi^-k` times a local element, zero if still divisible.
    pub fn shifted_residue(&self, x: Option<LocalElem>, k: i64) -> Fe {
        match x {
            None => 0,
            Some(le) if le.val == k => le.unit,
            Some(le) if le.val > k => 0,
            Some(_) => panic!("shifted residue of non-integral element"),
        }
    }
}

/// A nonzero rational function `num/den`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: FqPoly,
    pub den: FqPoly,
}

impl RatFunc {
    pub fn new(num: FqPoly, den: FqPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RatFunc { num, den })
    }

    pub fn local(&self, site: &LocalSite) -> Option<LocalElem> {
        let n = site.poly(&self.num)?;
        let d = site.poly(&self.den).expect("nonzero denominator");
        let unit = site.residue.div(n.unit, d.unit).expect("unit");
        Some(LocalElem { val: n.val - d.val, unit })
    }
}

impl From<FqPoly> for RatFunc {
    fn from(p: FqPoly) -> Self {
        let one = FqPoly::one(p.field());
        RatFunc { num: p, den: one }
    }
}

/// Valuation of a rational function at a place.
pub fn valuation(f: &RatFunc, v: &Place) -> Result<i64> {
    if f.num.is_zero() {
        return Err(Error::UndefinedValuation);
    }
    let rp = v.residue_point()?;
    Ok(f.local(&rp.site()).expect("nonzero").val)
}

/// A `d`-th power residue symbol as an exponent of the chosen generator of `mu_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueSymbol {
    pub exponent: u32,
    pub d: u32,
}

impl ResidueSymbol {
    /// The symbol as `zeta_d^exponent` in the ring of level `lcm(d, 2)`.
    pub fn value(&self, q: u64) -> ScalarExt {
        let ring = CycloRing::for_order(self.d, q);
        let step = (ring.m() / self.d) as i64;
        ring.zeta_pow(step * self.exponent as i64)
    }
}

/// Generator of `mu_d` used to identify residue symbols with complex roots of
/// unity: the least element of exact order `d` in the base field when it
/// contains `mu_d`, otherwise the least in the residue field.
pub fn mu_generator(site: &LocalSite, d: u32) -> Result<Fe> {
    let base = site.emb.from();
    if (base.q() - 1) % d as u64 == 0 {
        Ok(site.emb.apply(base.least_root_of_unity(d as u64)?))
    } else {
        site.residue.least_root_of_unity(d as u64)
    }
}

/// Exponent `j` with `u^((q_v-1)/d) = gamma^j`.
pub fn symbol_exponent(site: &LocalSite, unit: Fe, d: u32, gamma: Fe) -> Result<u32> {
    let f = site.residue;
    let s = f.pow_by_squaring(unit, (f.q() - 1) / d as u64);
    let mut acc = 1;
    for j in 0..d {
        if acc == s {
            return Ok(j);
        }
        acc = f.mul(acc, gamma);
    }
    Err(Error::InternalInconsistency("power residue outside mu_d".into()))
}

/// The `d`-th power residue symbol of `f` at a place where `f` is a unit.
pub fn power_residue_symbol(f: &RatFunc, v: &Place, d: u32) -> Result<ResidueSymbol> {
    let base = v.base_field();
    if d % base.p() == 0 {
        return Err(Error::TamenessViolation { p: base.p(), d });
    }
    let rp = v.residue_point()?;
    let site = rp.site();
    if (site.residue_size() - 1) % d as u64 != 0 {
        return Err(Error::SymbolUndefined(format!(
            "{d} does not divide {} - 1",
            site.residue_size()
        )));
    }
    let le = f.local(&site).ok_or(Error::UndefinedValuation)?;
    if le.val != 0 {
        return Err(Error::SymbolUndefined(format!("function has valuation {} at {v}", le.val)));
    }
    let gamma = mu_generator(&site, d)?;
    Ok(ResidueSymbol { exponent: symbol_exponent(&site, le.unit, d, gamma)?, d })
}

/// Behaviour of a place in the extension generated by a `d`-th root of `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplittingClass {
    /// Unramified with residue degree one.
    Split,
    /// Unramified with the largest possible residue degree `gcd(d, q_v - 1)`.
    InertMax { residue_degree: u32 },
    /// Unramified with an intermediate residue degree.
    UnramifiedOther { residue_degree: u32 },
    /// Ramified with the given ramification index.
    Ramified { index: u32 },
}

impl SplittingClass {
    pub fn is_unramified(&self) -> bool {
        !matches!(self, SplittingClass::Ramified { .. })
    }

    pub fn is_totally_ramified(&self, d: u32) -> bool {
        matches!(self, SplittingClass::Ramified { index } if *index == d)
    }

    pub fn residue_degree(&self) -> u32 {
        match *self {
            SplittingClass::Split => 1,
            SplittingClass::InertMax { residue_degree }
            | SplittingClass::UnramifiedOther { residue_degree } => residue_degree,
            SplittingClass::Ramified { .. } => 1,
        }
    }
}

/// Splitting class from local data at a site.
pub fn splitting_class_local(site: &LocalSite, le: LocalElem, d: u32) -> Result<SplittingClass> {
    let a = le.val.rem_euclid(d as i64) as u32;
    if a != 0 {
        let g = num_integer::gcd(a, d);
        return Ok(SplittingClass::Ramified { index: d / g });
    }
    let f = site.residue;
    let g = num_integer::gcd(d as u64, f.q() - 1);
    let r = f.pow_by_squaring(le.unit, (f.q() - 1) / g);
    let order = f.order(r)? as u32;
    Ok(if order == 1 {
        SplittingClass::Split
    } else if order as u64 == g {
        SplittingClass::InertMax { residue_degree: order }
    } else {
        SplittingClass::UnramifiedOther { residue_degree: order }
    })
}

/// Splitting class of `v` in `F(f^(1/d))`.
pub fn splitting_class(f: &RatFunc, v: &Place, d: u32) -> Result<SplittingClass> {
    let base = v.base_field();
    if d % base.p() == 0 {
        return Err(Error::TamenessViolation { p: base.p(), d });
    }
    let rp = v.residue_point()?;
    let site = rp.site();
    let le = f.local(&site).ok_or(Error::UndefinedValuation)?;
    splitting_class_local(&site, le, d)
}

/// Frobenius orbits of elements of exact degree `e` in `F_{Q^e}`.
pub struct PlaceOrbits {
    pub base: Arc<FiniteField>,
    pub residue: Arc<FiniteField>,
    pub emb: Arc<Embedding>,
    pub degree: u32,
    pub reps: Vec<Fe>,
}

impl PlaceOrbits {
    pub fn site(&self, idx: usize) -> LocalSite<'_> {
        LocalSite::new(&self.residue, &self.emb, self.reps[idx], self.degree, false)
    }

    /// Minimal polynomial over the base field of the `idx`-th representative.
    pub fn min_poly(&self, idx: usize) -> FqPoly {
        let f = &self.residue;
        let q = self.base.q();
        let t = self.reps[idx];
        let mut poly = vec![1];
        let mut conj = t;
        for _ in 0..self.degree {
            let neg = f.neg(conj);
            let mut next = vec![0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = f.add(next[i + 1], c);
                next[i] = f.add(next[i], f.mul(c, neg));
            }
            poly = next;
            conj = f.pow(conj, q);
        }
        let coeffs = poly
            .iter()
            .map(|&c| self.emb.pull_back(c).expect("coefficients lie in the base field"))
            .collect();
        FqPoly::new(self.base.clone(), coeffs)
    }
}

static ORBITS: Lazy<Mutex<HashMap<(u32, u32, u32), Arc<PlaceOrbits>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached orbit representatives of the degree-`e` places of `F_Q(t)`.
pub fn place_orbits(base: &Arc<FiniteField>, e: u32) -> Result<Arc<PlaceOrbits>> {
    let key = (base.p(), base.degree(), e);
    if let Some(o) = ORBITS.lock().get(&key) {
        return Ok(o.clone());
    }
    let residue = base.extension(e)?;
    if !residue.has_tables() {
        return Err(Error::BudgetExceeded(format!(
            "residue field of order {} exceeds the table cap",
            residue.q()
        )));
    }
    let emb = Embedding::new(base, &residue)?;
    let q = base.q();
    let size = residue.q() as usize;
    let mut reps = Vec::new();
    if e == 1 {
        reps.extend((0..base.q() as Fe).map(|a| emb.apply(a)));
    } else {
        let mut seen = vec![false; size];
        for x in 0..size as Fe {
            if seen[x as usize] {
                continue;
            }
            let mut len = 0;
            let mut y = x;
            loop {
                seen[y as usize] = true;
                len += 1;
                y = residue.pow(y, q);
                if y == x {
                    break;
                }
            }
            if len == e {
                reps.push(x);
            }
        }
    }
    let orbits = Arc::new(PlaceOrbits { base: base.clone(), residue, emb, degree: e, reps });
    Ok(ORBITS.lock().entry(key).or_insert(orbits).clone())
}

/// Number of monic irreducibles of degree `e` over `F_q`.
pub fn count_irreducible(q: u64, e: u32) -> u64 {
    let mut total: i128 = 0;
    for k in 1..=e {
        if e % k == 0 {
            total += mobius((e / k) as u64) as i128 * (q as i128).pow(k);
        }
    }
    (total / e as i128) as u64
}

pub fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// All places of degree at most `max_degree`, finite ones sorted, infinity last.
pub fn enumerate_places(field: &Arc<FiniteField>, max_degree: u32) -> Result<Vec<Place>> {
    let mut out = Vec::new();
    for e in 1..=max_degree {
        let orbits = place_orbits(field, e)?;
        let mut polys: Vec<FqPoly> = (0..orbits.reps.len()).map(|i| orbits.min_poly(i)).collect();
        polys.sort();
        out.extend(polys.into_iter().map(Place::Finite));
    }
    if max_degree >= 1 {
        out.push(Place::infinity(field));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u64) -> Arc<FiniteField> {
        FiniteField::of_order(q).unwrap()
    }

    #[test]
    fn degree_two_places_over_f3() {
        let f3 = f(3);
        let places = enumerate_places(&f3, 2).unwrap();
        let deg2: Vec<String> = places
            .iter()
            .filter(|p| p.degree() == 2 && !p.is_infinite())
            .map(|p| p.poly().unwrap().to_string())
            .collect();
        assert_eq!(deg2, vec!["t^2+1", "t^2+t+2", "t^2+2*t+2"]);
        assert_eq!(places.len(), 3 + 3 + 1);
    }

    #[test]
    fn place_counts_match_necklace_formula() {
        for &(q, e) in &[(2u64, 5u32), (3, 4), (4, 3), (5, 3), (7, 2)] {
            let orbits = place_orbits(&f(q), e).unwrap();
            assert_eq!(orbits.reps.len() as u64, count_irreducible(q, e));
        }
    }

    #[test]
    fn valuations() {
        let f5 = f(5);
        let x = Place::linear(&f5, 0);
        let g = RatFunc::from(FqPoly::parse(&f5, "t^3*(t+1)").unwrap());
        assert_eq!(valuation(&g, &x).unwrap(), 3);
        assert_eq!(valuation(&g, &Place::infinity(&f5)).unwrap(), -4);
        let z = RatFunc::from(FqPoly::zero(&f5));
        assert_eq!(valuation(&z, &x), Err(Error::UndefinedValuation));
        let r = RatFunc::new(FqPoly::parse(&f5, "t+1").unwrap(), FqPoly::parse(&f5, "t^2").unwrap())
            .unwrap();
        assert_eq!(valuation(&r, &x).unwrap(), -2);
        assert_eq!(valuation(&r, &Place::infinity(&f5)).unwrap(), 1);
    }

    #[test]
    fn cubic_symbol_example() {
        let f7 = f(7);
        let g = RatFunc::from(FqPoly::parse(&f7, "t+2").unwrap());
        let s = power_residue_symbol(&g, &Place::linear(&f7, 0), 3).unwrap();
        assert_eq!(s, ResidueSymbol { exponent: 2, d: 3 });
        let wild = power_residue_symbol(&g, &Place::linear(&f7, 0), 7);
        assert_eq!(wild, Err(Error::TamenessViolation { p: 7, d: 7 }));
        let undefined = power_residue_symbol(&g, &Place::linear(&f7, 5), 3);
        assert!(matches!(undefined, Err(Error::SymbolUndefined(_))));
    }

    #[test]
    fn quadratic_splitting() {
        let f5 = f(5);
        let g = RatFunc::from(FqPoly::parse(&f5, "t^2+1").unwrap());
        assert_eq!(splitting_class(&g, &Place::linear(&f5, 0), 2).unwrap(), SplittingClass::Split);
        assert_eq!(
            splitting_class(&g, &Place::linear(&f5, 1), 2).unwrap(),
            SplittingClass::InertMax { residue_degree: 2 }
        );
        assert_eq!(
            splitting_class(&g, &Place::linear(&f5, 2), 2).unwrap(),
            SplittingClass::Ramified { index: 2 }
        );
    }

    #[test]
    fn unit_residue_matches_division() {
        let f3 = f(3);
        let pi = FqPoly::parse(&f3, "t^2+1").unwrap();
        let v = Place::finite(pi.clone()).unwrap();
        let rp = v.residue_point().unwrap();
        let site = rp.site();
        let h = FqPoly::parse(&f3, "t+2").unwrap();
        let g = pi.pow(2).mul(&h);
        let le = site.poly(&g).unwrap();
        assert_eq!(le.val, 2);
        assert_eq!(le.unit, site.poly(&h).unwrap().unit);
    }

    #[test]
    fn places_above_split_in_extension() {
        let f3 = f(3);
        let v = Place::finite(FqPoly::parse(&f3, "t^2+1").unwrap()).unwrap();
        let above = v.places_above(2).unwrap();
        assert_eq!(above.len(), 2);
        assert!(above.iter().all(|w| w.degree() == 1));
    }
}
