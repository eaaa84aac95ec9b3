//! Elliptic-curve applications: analytic ranks, the constant-field invariant,
//! Heegner-type quadratic twists and reduction-type audits.

use std::sync::Arc;

use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::scalar::{cyclotomic_poly, euler_phi, spoly};
use crate::algebra::FqPoly;
use crate::error::{Error, Result};
use crate::lfunc::euler::{l_polynomial, l_polynomial_here};
use crate::lfunc::signs::Leading;
use crate::lfunc::{root_multiplicity, root_number, LPoly, LocalConditions};
use crate::places::{splitting_class, Place, RatFunc, SplittingClass};
use crate::reps::elliptic::{Kodaira, LocalReduction, ReductionKind};
use crate::reps::{EllipticCurve, PowerCharacter, RepDescriptor};

/// Multiplicity of `Q^{(w+1)/2}` as an inverse root: the order at the central point.
pub fn ord_central(l: &LPoly) -> u32 {
    root_multiplicity(l, &l.ring().u_pow(l.weight + 1))
}

/// `ord_{s=1} L(E (x) chi_f / F_n)`, untwisted when `f` is `None`.
pub fn ord_s1(curve: &Arc<EllipticCurve>, n: u32, f: Option<&FqPoly>) -> Result<u32> {
    let rep = RepDescriptor::Elliptic(curve.clone());
    match f {
        None => Ok(ord_central(&l_polynomial(&rep, n)?)),
        Some(f) => {
            let rep_n = rep.base_change(n)?;
            let tau = rep_n.twist(PowerCharacter::from_poly(f.clone(), 2, 1)?)?;
            Ok(ord_central(&l_polynomial_here(&tau, n)?))
        }
    }
}

/// Least common multiple of the orders of roots of unity among `beta_i / Q^{(w+1)/2}`.
pub fn b_invariant(l: &LPoly) -> u32 {
    let big_n = l.degree();
    let ring = l.ring().clone();
    let scale = ring.u_pow(l.weight + 1);
    let mut b = 1u32;
    let mut m = 1u32;
    while m <= 2 * big_n * big_n + 2 {
        if euler_phi(m) <= big_n {
            // prod_{(j, m) = 1} (1 - zeta^j x) with x = scale * T
            let cyc = cyclotomic_poly(m);
            let deg = cyc.len() - 1;
            let mut factor = Vec::with_capacity(deg + 1);
            let mut pw = ring.one();
            for k in 0..=deg {
                factor.push(pw.scale(&cyc[deg - k].into()));
                pw = &pw * &scale;
            }
            if spoly::div_exact(&l.coeffs, &factor).is_some() {
                b = b.lcm(&m);
            }
        }
        m += 1;
    }
    b
}

/// Exponents `n <= max` prime to `b * deg(infinity)`.
pub fn admissible_n(b: u32, max: u32) -> Vec<u32> {
    (1..=max).filter(|n| n.gcd(&b) == 1).collect()
}

/// Which condition the place at infinity gets in `K = F_n(sqrt f)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeegnerMode {
    Ramified,
    Inert,
}

#[derive(Clone, Debug)]
pub struct HeegnerSpec {
    pub curve: Arc<EllipticCurve>,
    pub mode: HeegnerMode,
    pub n: u32,
}

impl HeegnerSpec {
    /// Checks split multiplicative reduction at infinity.
    pub fn new(curve: Arc<EllipticCurve>, mode: HeegnerMode, n: u32) -> Result<HeegnerSpec> {
        let inf = Place::infinity(curve.field());
        if curve.reduction(&inf)?.kind != ReductionKind::SplitMultiplicative {
            return Err(Error::ContextError("reduction at infinity is not split multiplicative".into()));
        }
        Ok(HeegnerSpec { curve, mode, n })
    }

    /// Split at the bad places other than infinity; infinity inert or ramified.
    pub fn conditions(&self) -> Result<LocalConditions> {
        let inf = Place::infinity(self.curve.field());
        let split = self.curve.bad_places()?.into_iter().map(|(v, _)| v).filter(|v| *v != inf).collect();
        let (inert, ramified) = match self.mode {
            HeegnerMode::Inert => (vec![inf], vec![]),
            HeegnerMode::Ramified => (vec![], vec![inf]),
        };
        Ok(LocalConditions { d: 2, split, inert, ramified })
    }
}

/// One quadratic extension found by [`heegner_search`].
#[derive(Clone, Debug)]
pub struct HeegnerRecord {
    pub f: FqPoly,
    pub infinity_class: SplittingClass,
    pub degree_twist: u32,
    pub w_twist: i64,
    pub ord_base: u32,
    pub ord_twist: u32,
    /// `ord_{s=1} L(E/K) = ord_base + ord_twist`.
    pub ord_k: u32,
    /// Product of local signs of `E/K`.
    pub certificate: i64,
}

/// The base-field data shared by every record of a search.
#[derive(Clone, Debug)]
pub struct HeegnerBase {
    pub l: LPoly,
    pub w: i64,
    pub ord: u32,
    pub b: u32,
}

/// Sign of `E/K` at the places of `K` over `v`, from the reduction of `E` at `v`.
pub fn local_sign_over_k(red: &LocalReduction, class: SplittingClass) -> Result<i64> {
    Ok(match (red.kind, class) {
        (_, SplittingClass::Split) => 1,
        (ReductionKind::Good, _) => 1,
        (ReductionKind::SplitMultiplicative, _) => -1,
        (ReductionKind::NonsplitMultiplicative, SplittingClass::InertMax { .. }) => -1,
        (ReductionKind::NonsplitMultiplicative, _) => 1,
        (ReductionKind::Additive, c) => {
            return Err(Error::Unsupported(format!("additive place with class {c:?}")));
        }
    })
}

/// Local-sign certificate for `W(E/K)` with `K = F_n(sqrt f)`; `curve` is over `F_n`.
pub fn parity_certificate(curve: &EllipticCurve, f: &FqPoly) -> Result<i64> {
    let rf = RatFunc::from(f.clone());
    let mut sign = 1;
    for (v, red) in curve.bad_places()? {
        sign *= local_sign_over_k(&red, splitting_class(&rf, &v, 2)?)?;
    }
    Ok(sign)
}

/// Data of `E/F_n` that every record refers to.
pub fn heegner_base(spec: &HeegnerSpec) -> Result<HeegnerBase> {
    let rep = RepDescriptor::Elliptic(spec.curve.clone());
    let l = l_polynomial(&rep, spec.n)?;
    let w = root_number(&l)?
        .sign()
        .ok_or_else(|| Error::InternalInconsistency("elliptic root number is not a sign".into()))?;
    let b = b_invariant(&l_polynomial(&rep, 1)?);
    Ok(HeegnerBase { ord: ord_central(&l), l, w, b })
}

/// Searches quadratic `f` over `F_{q^n}` meeting the conditions, up to `count`
/// distinct ones within `budget` draws per degree, sorted by coefficients.
pub fn heegner_search(
    spec: &HeegnerSpec,
    count: usize,
    budget: u64,
    max_degree: u32,
    seed: u64,
) -> Result<(HeegnerBase, Vec<HeegnerRecord>)> {
    let base = heegner_base(spec)?;
    if spec.n.gcd(&base.b) != 1 {
        return Err(Error::ContextError(format!("n = {} is not prime to b = {}", spec.n, base.b)));
    }
    let rep = RepDescriptor::Elliptic(spec.curve.clone());
    let over = spec.conditions()?.over(&rep, spec.n)?;
    let rep_n = rep.base_change(spec.n)?;
    let curve_n = rep_n.curve().expect("elliptic").clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut found: Vec<FqPoly> = Vec::new();
    let degrees: Vec<u32> = (1..=max_degree)
        .filter(|k| match spec.mode {
            HeegnerMode::Ramified => k % 2 == 1,
            HeegnerMode::Inert => k % 2 == 0,
        })
        .collect();
    'outer: for &k in &degrees {
        for _ in 0..budget {
            if found.len() >= count {
                break 'outer;
            }
            match over.sample(k, Leading::Any, 1, &mut rng)? {
                Some(f) if !found.contains(&f) => found.push(f),
                _ => {}
            }
        }
    }
    if found.is_empty() {
        return Err(Error::SamplingExhausted("no conforming quadratic extension".into()));
    }
    found.sort();
    let inf = Place::infinity(&over.field);
    let mut records = Vec::with_capacity(found.len());
    for f in found {
        let tau = rep_n.twist(PowerCharacter::from_poly(f.clone(), 2, 1)?)?;
        let lt = l_polynomial_here(&tau, spec.n)?;
        let w_twist = root_number(&lt)?
            .sign()
            .ok_or_else(|| Error::InternalInconsistency("twist root number is not a sign".into()))?;
        let certificate = parity_certificate(&curve_n, &f)?;
        if certificate != base.w * w_twist {
            return Err(Error::InternalInconsistency(format!(
                "certificate {certificate} disagrees with W(E/K) = {} for f = {f}",
                base.w * w_twist
            )));
        }
        let ord_twist = ord_central(&lt);
        let ord_k = base.ord + ord_twist;
        if certificate == -1 && ord_k % 2 == 0 {
            return Err(Error::InternalInconsistency(format!("even order {ord_k} with sign -1 for f = {f}")));
        }
        records.push(HeegnerRecord {
            infinity_class: splitting_class(&RatFunc::from(f.clone()), &inf, 2)?,
            f,
            degree_twist: lt.degree(),
            w_twist,
            ord_base: base.ord,
            ord_twist,
            ord_k,
            certificate,
        });
    }
    Ok((base, records))
}

/// The extension step whose effect on reduction types is audited.
#[derive(Clone, Debug)]
pub enum AuditStep {
    /// Constant field extension of the given degree.
    Constant(u32),
    /// Quadratic twist by `f`, equivalently base change to `F(sqrt f)` up to the twist.
    QuadraticTwist(FqPoly),
    /// Totally ramified cubic Kummer step; not modelled.
    Cubic(FqPoly),
}

/// One bad place before and after a step.
#[derive(Clone, Debug)]
pub struct AuditRow {
    pub place: Place,
    pub before: LocalReduction,
    /// `None` when the step is out of scope for this place.
    pub after: Vec<LocalReduction>,
    pub class: Option<SplittingClass>,
    /// Whether the expected transition rule held.
    pub rule_holds: bool,
    pub note: &'static str,
}

/// Expected Kodaira type after a ramified quadratic twist.
pub fn ramified_twist_type(k: Kodaira) -> Kodaira {
    match k {
        Kodaira::I0 => Kodaira::I0Star,
        Kodaira::I0Star => Kodaira::I0,
        Kodaira::In(m) => Kodaira::InStar(m),
        Kodaira::InStar(m) => Kodaira::In(m),
        Kodaira::II => Kodaira::IVStar,
        Kodaira::IVStar => Kodaira::II,
        Kodaira::III => Kodaira::IIIStar,
        Kodaira::IIIStar => Kodaira::III,
        Kodaira::IV => Kodaira::IIStar,
        Kodaira::IIStar => Kodaira::IV,
    }
}

/// Reduction types at the bad places before and after `step`.
pub fn semistable_audit(curve: &EllipticCurve, step: &AuditStep) -> Result<Vec<AuditRow>> {
    let p = curve.field().p();
    if p <= 3 {
        return Err(Error::UnsupportedCharacteristic(p));
    }
    let mut rows = Vec::new();
    match step {
        AuditStep::Constant(n) => {
            let ext = curve.base_change(*n)?;
            for (v, before) in curve.bad_places()? {
                let mut after = Vec::new();
                let mut holds = true;
                for w in v.places_above(*n)? {
                    let r = ext.reduction(&w)?;
                    let inert_degree = w.degree() / v.degree();
                    holds &= r.kodaira == before.kodaira;
                    if before.kind == ReductionKind::NonsplitMultiplicative {
                        let expect = if inert_degree % 2 == 0 {
                            ReductionKind::SplitMultiplicative
                        } else {
                            ReductionKind::NonsplitMultiplicative
                        };
                        holds &= r.kind == expect;
                    } else {
                        holds &= r.kind == before.kind;
                    }
                    after.push(r);
                }
                rows.push(AuditRow { place: v, before, after, class: None, rule_holds: holds, note: "constant" });
            }
        }
        AuditStep::QuadraticTwist(f) => {
            let rf = RatFunc::from(f.clone());
            let mut places: Vec<(Place, LocalReduction)> = curve.bad_places()?;
            for (pi, _) in f.factor()?.factors {
                let v = Place::Finite(pi);
                if !places.iter().any(|(w, _)| *w == v) {
                    let r = curve.reduction(&v)?;
                    places.push((v, r));
                }
            }
            let inf = Place::infinity(curve.field());
            if !places.iter().any(|(w, _)| *w == inf) {
                places.push((inf.clone(), curve.reduction(&inf)?));
            }
            for (v, before) in places {
                let class = splitting_class(&rf, &v, 2)?;
                let rp = v.residue_point()?;
                let r = curve.twisted_reduction_at(&rp.site(), f)?;
                let (holds, note) = match class {
                    SplittingClass::Ramified { .. } => {
                        (r.kodaira == ramified_twist_type(before.kodaira), "ramified")
                    }
                    SplittingClass::Split => (r.kodaira == before.kodaira && r.kind == before.kind, "split"),
                    _ => {
                        let kind_ok = match before.kind {
                            ReductionKind::SplitMultiplicative => r.kind == ReductionKind::NonsplitMultiplicative,
                            ReductionKind::NonsplitMultiplicative => r.kind == ReductionKind::SplitMultiplicative,
                            k => r.kind == k,
                        };
                        (kind_ok && r.kodaira == before.kodaira, "inert")
                    }
                };
                if before.kind == ReductionKind::Good && r.kind == ReductionKind::Good {
                    continue;
                }
                rows.push(AuditRow { place: v, before, after: vec![r], class: Some(class), rule_holds: holds, note });
            }
        }
        AuditStep::Cubic(_) => {
            for (v, before) in curve.bad_places()? {
                rows.push(AuditRow {
                    place: v,
                    before,
                    after: Vec::new(),
                    class: None,
                    rule_holds: true,
                    note: "out of scope",
                });
            }
        }
    }
    Ok(rows)
}
