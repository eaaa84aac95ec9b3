//! Elliptic curves `y^2 = x^3 + A x + B` over `F_q(t)`, `p > 3`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::RwLock;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::ff::prime_factors;
use crate::algebra::{Embedding, Fe, FiniteField, FqPoly};
use crate::error::{Error, Result};
use crate::places::{LocalElem, LocalSite, Place, RatFunc};

/// Residue fields up to this size are counted point by point.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000;

/// Reduction behaviour at a place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

/// Kodaira symbol of the special fibre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kodaira {
    I0,
    In(u32),
    II,
    III,
    IV,
    I0Star,
    InStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::In(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::InStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

/// Output of Tate's algorithm at one place.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalReduction {
    pub kind: ReductionKind,
    pub kodaira: Kodaira,
    pub cond_exp: u32,
    pub disc_val: u32,
    /// `12 / gcd(v(disc), 12)`.
    pub m_index: u32,
    /// Residues of the locally minimal model's coefficients.
    pub a_res: Fe,
    pub b_res: Fe,
}

impl LocalReduction {
    pub fn is_multiplicative(&self) -> bool {
        matches!(
            self.kind,
            ReductionKind::SplitMultiplicative | ReductionKind::NonsplitMultiplicative
        )
    }

    /// `+1` split, `-1` nonsplit, `0` otherwise.
    pub fn mult_sign(&self) -> i64 {
        match self.kind {
            ReductionKind::SplitMultiplicative => 1,
            ReductionKind::NonsplitMultiplicative => -1,
            _ => 0,
        }
    }
}

/// Tate's algorithm for `p > 3` from local data of `A`, `B` and the discriminant.
pub fn tate_local(
    site: &LocalSite,
    a: Option<LocalElem>,
    b: Option<LocalElem>,
    disc: LocalElem,
) -> Result<LocalReduction> {
    let big = i64::MAX / 4;
    let va = a.map_or(big, |x| x.val);
    let vb = b.map_or(big, |x| x.val);
    let k = va.div_euclid(4).min(vb.div_euclid(6));
    let va1 = va - 4 * k;
    let vd1 = disc.val - 12 * k;
    if vd1 < 0 {
        return Err(Error::InternalInconsistency("negative discriminant valuation".into()));
    }
    let a_res = site.shifted_residue(a, 4 * k);
    let b_res = site.shifted_residue(b, 6 * k);
    let f = site.residue;
    let m_index = 12 / num_integer::gcd(vd1 as u32, 12);
    if vd1 == 0 {
        return Ok(LocalReduction {
            kind: ReductionKind::Good,
            kodaira: Kodaira::I0,
            cond_exp: 0,
            disc_val: 0,
            m_index,
            a_res,
            b_res,
        });
    }
    if va1 == 0 {
        let six_b = f.mul(f.from_int(6), b_res);
        let kind = if six_b != 0 && f.is_square(six_b) {
            ReductionKind::SplitMultiplicative
        } else {
            ReductionKind::NonsplitMultiplicative
        };
        return Ok(LocalReduction {
            kind,
            kodaira: Kodaira::In(vd1 as u32),
            cond_exp: 1,
            disc_val: vd1 as u32,
            m_index,
            a_res,
            b_res,
        });
    }
    let vj = if a.is_some() { 3 * va1 - vd1 } else { big };
    let kodaira = if vj < 0 {
        let n = (-vj) as u32;
        if vd1 != 6 + n as i64 {
            return Err(Error::InternalInconsistency(format!(
                "I{n}* with discriminant valuation {vd1}"
            )));
        }
        Kodaira::InStar(n)
    } else {
        match vd1 {
            2 => Kodaira::II,
            3 => Kodaira::III,
            4 => Kodaira::IV,
            6 => Kodaira::I0Star,
            8 => Kodaira::IVStar,
            9 => Kodaira::IIIStar,
            10 => Kodaira::IIStar,
            _ => {
                return Err(Error::InternalInconsistency(format!(
                    "additive reduction with discriminant valuation {vd1}"
                )))
            }
        }
    };
    Ok(LocalReduction {
        kind: ReductionKind::Additive,
        kodaira,
        cond_exp: 2,
        disc_val: vd1 as u32,
        m_index,
        a_res,
        b_res,
    })
}

/// `#E(F)` by summing quadratic characters.
pub fn count_points_exhaustive(f: &FiniteField, a: Fe, b: Fe) -> u64 {
    let mut total = 1u64;
    for x in f.elements() {
        let rhs = f.add(f.mul(f.add(f.mul(x, x), a), x), b);
        total += if rhs == 0 {
            1
        } else if f.is_square(rhs) {
            2
        } else {
            0
        };
    }
    total
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pt {
    Inf,
    A(Fe, Fe),
}

struct Curve<'a> {
    f: &'a FiniteField,
    a: Fe,
    b: Fe,
}

impl Curve<'_> {
    fn add(&self, p: Pt, q: Pt) -> Pt {
        let f = self.f;
        match (p, q) {
            (Pt::Inf, _) => q,
            (_, Pt::Inf) => p,
            (Pt::A(x1, y1), Pt::A(x2, y2)) => {
                let lambda = if x1 == x2 {
                    if f.add(y1, y2) == 0 {
                        return Pt::Inf;
                    }
                    let num = f.add(f.mul(f.from_int(3), f.mul(x1, x1)), self.a);
                    f.div(num, f.add(y1, y1)).expect("nonzero")
                } else {
                    f.div(f.sub(y2, y1), f.sub(x2, x1)).expect("nonzero")
                };
                let x3 = f.sub(f.sub(f.mul(lambda, lambda), x1), x2);
                let y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
                Pt::A(x3, y3)
            }
        }
    }

    fn mul(&self, p: Pt, mut n: u64) -> Pt {
        let mut acc = Pt::Inf;
        let mut base = p;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            n >>= 1;
        }
        acc
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Pt {
        let f = self.f;
        loop {
            let x = rng.random_range(0..f.q()) as Fe;
            let rhs = f.add(f.mul(f.add(f.mul(x, x), self.a), x), self.b);
            if let Some(y) = f.sqrt(rhs) {
                let y = if rng.random_bool(0.5) { f.neg(y) } else { y };
                return Pt::A(x, y);
            }
        }
    }

    /// Exact order of `p`, given that some multiple lies in `[lo, hi]`.
    fn order(&self, p: Pt, lo: u64, hi: u64) -> u64 {
        if p == Pt::Inf {
            return 1;
        }
        let width = hi - lo + 1;
        let s = (width as f64).sqrt().ceil() as u64 + 1;
        let mut baby: HashMap<Fe, (u64, Fe)> = HashMap::with_capacity(s as usize);
        let mut cur = Pt::Inf;
        let mut small = None;
        for j in 1..=s {
            cur = self.add(cur, p);
            match cur {
                Pt::Inf => {
                    small = Some(j);
                    break;
                }
                Pt::A(x, y) => {
                    baby.entry(x).or_insert((j, y));
                }
            }
        }
        let multiple = if let Some(j) = small {
            j
        } else {
            let giant = self.mul(p, s);
            let mut r = self.mul(p, lo);
            let mut found = None;
            let mut i = 0u64;
            while i * s <= width + s {
                let base = lo + i * s;
                match r {
                    Pt::Inf => {
                        found = Some(base);
                        break;
                    }
                    Pt::A(x, y) => {
                        if let Some(&(j, yj)) = baby.get(&x) {
                            if self.f.add(y, yj) == 0 {
                                found = Some(base + j);
                            } else {
                                found = Some(base - j);
                            }
                            break;
                        }
                    }
                }
                r = self.add(r, giant);
                i += 1;
            }
            found.expect("a multiple of the order lies in the Hasse interval")
        };
        let mut m = multiple;
        for r in prime_factors(m) {
            while m % r == 0 && self.mul(p, m / r) == Pt::Inf {
                m /= r;
            }
        }
        m
    }
}

/// `#E(F)` via baby-step giant-step on the curve and its quadratic twist.
pub fn count_points_bsgs(f: &FiniteField, a: Fe, b: Fe) -> u64 {
    let q = f.q();
    let sq = (q as f64).sqrt();
    let lo = (q as f64 + 1.0 - 2.0 * sq).ceil().max(1.0) as u64;
    let hi = (q as f64 + 1.0 + 2.0 * sq).floor() as u64;
    let nonsq = (2..q as Fe).find(|&c| !f.is_square(c)).expect("odd field has nonsquares");
    let c2 = f.mul(nonsq, nonsq);
    let twist = Curve { f, a: f.mul(c2, a), b: f.mul(f.mul(c2, nonsq), b) };
    let curve = Curve { f, a, b };
    let mut rng = ChaCha8Rng::seed_from_u64(((a as u64) << 32) ^ b as u64 ^ q.rotate_left(17));
    let mut l1 = 1u64;
    let mut l2 = 1u64;
    for _ in 0..64 {
        let p = curve.random_point(&mut rng);
        l1 = num_integer::lcm(l1, curve.order(p, lo, hi));
        let pt = twist.random_point(&mut rng);
        l2 = num_integer::lcm(l2, twist.order(pt, 2 * q + 2 - hi, 2 * q + 2 - lo));
        let start = lo.div_ceil(l1) * l1;
        let mut cands = (start..=hi).step_by(l1 as usize).filter(|n| (2 * q + 2 - n) % l2 == 0);
        if let (Some(n), None) = (cands.next(), cands.next()) {
            return n;
        }
    }
    count_points_exhaustive(f, a, b)
}

/// `#E(F)` for a nonsingular short Weierstrass model.
pub fn count_points(f: &FiniteField, a: Fe, b: Fe) -> u64 {
    if f.q() <= EXHAUSTIVE_LIMIT {
        count_points_exhaustive(f, a, b)
    } else {
        count_points_bsgs(f, a, b)
    }
}

/// Trace of Frobenius `q + 1 - #E`, checked against the Hasse bound.
pub fn frobenius_trace(f: &FiniteField, a: Fe, b: Fe) -> Result<i64> {
    let n = count_points(f, a, b);
    let t = f.q() as i64 + 1 - n as i64;
    if (t * t) as u64 > 4 * f.q() {
        return Err(Error::InternalInconsistency(format!(
            "trace {t} violates the Hasse bound over F_{}",
            f.q()
        )));
    }
    Ok(t)
}

/// An elliptic curve over `F_q(t)` with polynomial coefficients.
#[derive(Clone)]
pub struct EllipticCurve {
    a: FqPoly,
    b: FqPoly,
    disc: FqPoly,
}

impl fmt::Debug for EllipticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + ({})x + ({})", self.a, self.b)
    }
}

impl PartialEq for EllipticCurve {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b
    }
}

impl Eq for EllipticCurve {}

impl std::hash::Hash for EllipticCurve {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
    }
}

/// Key for caches of per-place data.
pub type CurveKey = (u32, u32, Vec<Fe>, Vec<Fe>);

type LocalTable = Arc<Vec<(LocalReduction, i64)>>;

static LOCAL_CACHE: Lazy<RwLock<HashMap<(CurveKey, u32), LocalTable>>> =
    Lazy::new(|| RwLock::new(HashMap::new()));

impl EllipticCurve {
    /// Builds the curve and replaces it by a global minimal model over `F_q[t]`.
    pub fn new(a: FqPoly, b: FqPoly) -> Result<Self> {
        let field = a.field().clone();
        if field.p() <= 3 {
            return Err(Error::UnsupportedCharacteristic(field.p()));
        }
        let disc = Self::discriminant(&a, &b);
        if disc.is_zero() {
            return Err(Error::BadReduction("singular generic fibre".into()));
        }
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidInput("constant j-invariant".into()));
        }
        let a3 = a.pow(3);
        let b2 = b.pow(2);
        if a3.scale(b2.lc()) == b2.scale(a3.lc()) {
            return Err(Error::InvalidInput("constant j-invariant".into()));
        }
        let (a, b) = Self::minimalize(a, b)?;
        let disc = Self::discriminant(&a, &b);
        Ok(EllipticCurve { a, b, disc })
    }

    /// Clears denominators of rational coefficients with `h^4`, `h^6`.
    pub fn from_rational(a: &RatFunc, b: &RatFunc) -> Result<Self> {
        let h = lcm_poly(&a.den, &b.den);
        let a_poly = a.num.mul(&h.pow(4)).div_exact(&a.den)?;
        let b_poly = b.num.mul(&h.pow(6)).div_exact(&b.den)?;
        Self::new(a_poly, b_poly)
    }

    fn discriminant(a: &FqPoly, b: &FqPoly) -> FqPoly {
        let f = a.field();
        let four = FqPoly::constant(f, f.from_int(4));
        let tw7 = FqPoly::constant(f, f.from_int(27));
        four.mul(&a.pow(3)).add(&tw7.mul(&b.pow(2)))
    }

    fn minimalize(mut a: FqPoly, mut b: FqPoly) -> Result<(FqPoly, FqPoly)> {
        let g = a.gcd(&b);
        if g.degree().unwrap_or(0) == 0 {
            return Ok((a, b));
        }
        for (pi, _) in g.factor()?.factors {
            let p4 = pi.pow(4);
            let p6 = pi.pow(6);
            while p4.divides(&a) && p6.divides(&b) {
                a = a.div_exact(&p4)?;
                b = b.div_exact(&p6)?;
            }
        }
        Ok((a, b))
    }

    pub fn a(&self) -> &FqPoly {
        &self.a
    }

    pub fn b(&self) -> &FqPoly {
        &self.b
    }

    pub fn disc(&self) -> &FqPoly {
        &self.disc
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.a.field()
    }

    pub fn key(&self) -> CurveKey {
        let f = self.field();
        (f.p(), f.degree(), self.a.coeffs().to_vec(), self.b.coeffs().to_vec())
    }

    /// The minimal model at infinity as polynomials in `s = 1/t`.
    pub fn model_at_infinity(&self) -> (FqPoly, FqPoly) {
        let da = self.a.degree().unwrap_or(0);
        let db = self.b.degree().unwrap_or(0);
        let k = da.div_ceil(4).max(db.div_ceil(6));
        (self.a.reversed(4 * k), self.b.reversed(6 * k))
    }

    /// The same curve over `F_{q^n}(t)`.
    pub fn base_change(&self, n: u32) -> Result<EllipticCurve> {
        let f = self.field();
        let ext = f.extension(n)?;
        let emb = Embedding::new(f, &ext)?;
        let a = self.a.map_coeffs(&ext, |c| emb.apply(c));
        let b = self.b.map_coeffs(&ext, |c| emb.apply(c));
        let disc = self.disc.map_coeffs(&ext, |c| emb.apply(c));
        Ok(EllipticCurve { a, b, disc })
    }

    /// Quadratic twist `y^2 = x^3 + f^2 A x + f^3 B`.
    pub fn quadratic_twist(&self, f: &FqPoly) -> Result<EllipticCurve> {
        EllipticCurve::new(self.a.mul(&f.pow(2)), self.b.mul(&f.pow(3)))
    }

    /// Tate's algorithm at a site.
    pub fn reduction_at(&self, site: &LocalSite) -> Result<LocalReduction> {
        let disc = site.poly(&self.disc).expect("nonzero discriminant");
        tate_local(site, site.poly(&self.a), site.poly(&self.b), disc)
    }

    /// Tate's algorithm for the twist by `f`, from local data only.
    pub fn twisted_reduction_at(&self, site: &LocalSite, f: &FqPoly) -> Result<LocalReduction> {
        let fl = site.poly(f).ok_or(Error::UndefinedValuation)?;
        let r = site.residue;
        let scale = |x: Option<LocalElem>, e: i64| {
            x.map(|x| LocalElem {
                val: x.val + e * fl.val,
                unit: r.mul(x.unit, r.pow(fl.unit, e as u64)),
            })
        };
        let a = scale(site.poly(&self.a), 2);
        let b = scale(site.poly(&self.b), 3);
        let d = scale(site.poly(&self.disc), 6).expect("nonzero discriminant");
        tate_local(site, a, b, d)
    }

    /// Reduction data and `q_v + 1 - #E~` at a place.
    pub fn local_data(&self, site: &LocalSite) -> Result<(LocalReduction, i64)> {
        let red = self.reduction_at(site)?;
        let trace = trace_from_reduction(site.residue, &red)?;
        Ok((red, trace))
    }

    /// Per-place data for every place of degree `e`, cached.
    pub fn local_table(&self, e: u32) -> Result<LocalTable> {
        let key = (self.key(), e);
        if let Some(t) = LOCAL_CACHE.read().get(&key) {
            return Ok(t.clone());
        }
        let orbits = crate::places::place_orbits(self.field(), e)?;
        let mode = crate::par::default_mode();
        let chunks = crate::par::map_chunks(orbits.reps.len(), 256, mode, |range| {
            range
                .map(|i| self.local_data(&orbits.site(i)))
                .collect::<Result<Vec<_>>>()
        });
        let mut table = Vec::with_capacity(orbits.reps.len());
        for c in chunks {
            table.extend(c?);
        }
        let table = Arc::new(table);
        LOCAL_CACHE.write().insert(key, table.clone());
        Ok(table)
    }

    /// Reduction data at a place given by a [`Place`].
    pub fn reduction(&self, v: &Place) -> Result<LocalReduction> {
        let rp = v.residue_point()?;
        self.reduction_at(&rp.site())
    }

    /// Places of bad reduction with their local data, infinity last.
    pub fn bad_places(&self) -> Result<Vec<(Place, LocalReduction)>> {
        let mut out = Vec::new();
        for (pi, _) in self.disc.factor()?.factors {
            let v = Place::Finite(pi);
            let red = self.reduction(&v)?;
            if red.kind != ReductionKind::Good {
                out.push((v, red));
            }
        }
        let inf = Place::infinity(self.field());
        let red = self.reduction(&inf)?;
        if red.kind != ReductionKind::Good {
            out.push((inf, red));
        }
        Ok(out)
    }

    /// Degree of the conductor.
    pub fn conductor_degree(&self) -> Result<u32> {
        Ok(self.bad_places()?.iter().map(|(v, r)| v.degree() * r.cond_exp).sum())
    }
}

/// Trace of Frobenius on inertia invariants from reduction data.
pub fn trace_from_reduction(residue: &FiniteField, red: &LocalReduction) -> Result<i64> {
    Ok(match red.kind {
        ReductionKind::Good => frobenius_trace(residue, red.a_res, red.b_res)?,
        ReductionKind::SplitMultiplicative => 1,
        ReductionKind::NonsplitMultiplicative => -1,
        ReductionKind::Additive => 0,
    })
}

fn lcm_poly(a: &FqPoly, b: &FqPoly) -> FqPoly {
    let g = a.gcd(b);
    a.mul(b).div_exact(&g).expect("gcd divides").monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;

    fn f(q: u64) -> Arc<FiniteField> {
        FiniteField::of_order(q).unwrap()
    }

    #[test]
    fn bsgs_matches_exhaustive() {
        for q in [10007u64, 16807, 15625] {
            let fld = f(q);
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            let mut checked = 0;
            while checked < 6 {
                let a = rng.random_range(0..q) as Fe;
                let b = rng.random_range(0..q) as Fe;
                let d = fld.add(
                    fld.mul(fld.from_int(4), fld.pow(a, 3)),
                    fld.mul(fld.from_int(27), fld.mul(b, b)),
                );
                if d == 0 {
                    continue;
                }
                assert_eq!(count_points_bsgs(&fld, a, b), count_points_exhaustive(&fld, a, b));
                checked += 1;
            }
        }
    }

    #[test]
    fn small_curve_count() {
        let f7 = f(7);
        // y^2 = x^3 + x + 1 over F_7 has 5 points.
        assert_eq!(count_points_exhaustive(&f7, 1, 1), 5);
    }

    #[test]
    fn rejects_small_characteristic() {
        let f3 = f(3);
        let a = FqPoly::parse(&f3, "t").unwrap();
        let b = FqPoly::parse(&f3, "t+1").unwrap();
        assert_eq!(EllipticCurve::new(a, b).err(), Some(Error::UnsupportedCharacteristic(3)));
    }

    #[test]
    fn additive_types_from_discriminant_valuation() {
        let f7 = f(7);
        let cases = [
            ("t", "t", Kodaira::II),
            ("t", "t^2", Kodaira::III),
            ("t^2", "t^2", Kodaira::IV),
            ("t^2", "t^3+t^4", Kodaira::I0Star),
            ("t^3", "t^4", Kodaira::IVStar),
            ("t^3", "t^5", Kodaira::IIIStar),
            ("t^4", "t^5", Kodaira::IIStar),
        ];
        for (a, b, k) in cases {
            let e = EllipticCurve::new(
                FqPoly::parse(&f7, &format!("{a}+t^7")).unwrap(),
                FqPoly::parse(&f7, &format!("{b}+t^8+1*t^9")).unwrap(),
            );
            let e = match e {
                Ok(e) => e,
                Err(err) => panic!("{a},{b}: {err}"),
            };
            let red = e.reduction(&Place::linear(&f7, 0)).unwrap();
            assert_eq!(red.kodaira, k, "A={a} B={b}");
            assert_eq!(red.cond_exp, 2);
        }
    }

    #[test]
    fn multiplicative_split_test() {
        let f7 = f(7);
        // A = -3, B = 2 + t: node at x = 1 with tangent slopes sqrt(3).
        let e = EllipticCurve::new(
            FqPoly::parse(&f7, "4+t^2").unwrap(),
            FqPoly::parse(&f7, "2+t").unwrap(),
        )
        .unwrap();
        let red = e.reduction(&Place::linear(&f7, 0)).unwrap();
        assert!(red.is_multiplicative());
        let split = f7.is_square(f7.mul(6, 2));
        assert_eq!(red.kind == ReductionKind::SplitMultiplicative, split);
        assert_eq!(red.cond_exp, 1);
    }

    #[test]
    fn minimal_model_divides_out_powers() {
        let f7 = f(7);
        let a = FqPoly::parse(&f7, "t^4*(t+1)").unwrap();
        let b = FqPoly::parse(&f7, "t^6*(t+2)").unwrap();
        let e = EllipticCurve::new(a, b).unwrap();
        assert_eq!(e.a(), &FqPoly::parse(&f7, "t+1").unwrap());
        assert_eq!(e.b(), &FqPoly::parse(&f7, "t+2").unwrap());
    }

    #[test]
    fn twisting_i0_star_gives_good_reduction() {
        let f7 = f(7);
        let e = EllipticCurve::new(
            FqPoly::parse(&f7, "t^2*(t+1)").unwrap(),
            FqPoly::parse(&f7, "t^3*(t+3)").unwrap(),
        )
        .unwrap();
        let v = Place::linear(&f7, 0);
        assert_eq!(e.reduction(&v).unwrap().kodaira, Kodaira::I0Star);
        let rp = v.residue_point().unwrap();
        let t = FqPoly::parse(&f7, "t").unwrap();
        let tw = e.twisted_reduction_at(&rp.site(), &t).unwrap();
        assert_eq!(tw.kind, ReductionKind::Good);
        let direct = e.quadratic_twist(&t).unwrap().reduction(&v).unwrap();
        assert_eq!(direct.kind, ReductionKind::Good);
    }
}
