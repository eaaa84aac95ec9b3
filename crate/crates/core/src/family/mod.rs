//! Twist families: enumeration, local conditions, densities and Frobenius statistics.

pub mod haar;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Fe, FqPoly};
use crate::error::{Error, Result};
use crate::lfunc::fe::power_sum;
use crate::lfunc::signs::ConditionsOver;
use crate::lfunc::{inverse_roots, l_orbit_here, root_multiplicity, root_number, LPoly, LocalConditions, Orbit};
use crate::par;
use crate::places::Place;
use crate::reps::{PowerCharacter, RepDescriptor, SelfDuality};

pub use haar::{haar_baseline, moments_of, Estimate, HaarGroup, MomentTable, TraceStats};

/// Default number of family members examined.
pub const DEFAULT_BUDGET: u64 = 1_000_000;
/// Allowed deviation of an isolated unitarized root from the unit circle.
pub const ANGLE_TOL: f64 = 1e-9;
/// Allowed deviation for roots in a cluster, where eigenvalues lose half their digits.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Monic `f = prefix * g` of fixed degree over `F_{q^n}` with distinct roots
/// avoiding the places that carry conditions or bad reduction.
#[derive(Clone, Debug)]
pub struct TwistFamily {
    pub rep: RepDescriptor,
    pub d: u32,
    pub n: u32,
    pub degree: u32,
    pub conds: LocalConditions,
    over: ConditionsOver,
    prefix: FqPoly,
    excluded: Vec<FqPoly>,
}

/// Members produced by [`TwistFamily::enumerate`].
#[derive(Clone, Debug)]
pub struct FamilyMembers {
    pub members: Vec<FqPoly>,
    pub exhaustive: bool,
    /// Candidates examined: all monic `g` when exhaustive, else draws.
    pub candidates: u64,
}

impl TwistFamily {
    pub fn new(rep: RepDescriptor, d: u32, n: u32, degree: u32, conds: LocalConditions) -> Result<TwistFamily> {
        if conds.d != d {
            return Err(Error::ContextError(format!("conditions are for d = {}, family has d = {d}", conds.d)));
        }
        let p = rep.field().p();
        if d < 2 || d % p == 0 {
            return Err(Error::InvalidInput(format!("d = {d} must be at least 2 and prime to {p}")));
        }
        let over = conds.over(&rep, n)?;
        let prefix = over.ramified_prefix();
        let deg_prefix = prefix.degree().unwrap_or(0) as u32;
        if degree == 0 || degree < deg_prefix {
            return Err(Error::ContextError(format!(
                "degree {degree} cannot hold the ramified prefix of degree {deg_prefix}"
            )));
        }
        let inf = Place::infinity(&over.field);
        if over.ramified.contains(&inf) && degree.gcd(&d) != 1 {
            return Err(Error::ContextError(format!("infinity cannot ramify totally with degree {degree}")));
        }
        let inf_unit = over.split.contains(&inf) || over.inert.contains(&inf) || over.unramified.contains(&inf);
        if inf_unit && degree % d != 0 {
            return Err(Error::ContextError(format!("infinity needs d | degree, got degree {degree}")));
        }
        let excluded = over
            .split
            .iter()
            .chain(&over.inert)
            .chain(&over.unramified)
            .filter_map(|v| v.poly().cloned())
            .collect();
        Ok(TwistFamily { rep, d, n, degree, conds, over, prefix, excluded })
    }

    /// The conditions as places of `F_{q^n}`.
    pub fn conditions(&self) -> &ConditionsOver {
        &self.over
    }

    /// Size of `F_{q^n}`.
    pub fn q(&self) -> u64 {
        self.over.field.q()
    }

    fn free_degree(&self) -> u32 {
        self.degree - self.prefix.degree().unwrap_or(0) as u32
    }

    /// Number of monic `g`, or `None` on overflow.
    pub fn candidate_count(&self) -> Option<u64> {
        self.q().checked_pow(self.free_degree())
    }

    fn member_from_digits(&self, digits: impl Iterator<Item = Fe>) -> FqPoly {
        let mut coeffs: Vec<Fe> = digits.collect();
        coeffs.push(1);
        self.prefix.mul(&FqPoly::new(self.over.field.clone(), coeffs))
    }

    /// Whether `f` lies in the carrier set: squarefree, right degree, and
    /// prime to every excluded place.
    pub fn in_carrier(&self, f: &FqPoly) -> bool {
        f.degree() == Some(self.degree as usize)
            && f.is_monic()
            && f.is_squarefree()
            && self.prefix.divides(f)
            && self.excluded.iter().all(|pi| f.gcd(pi).is_one())
    }

    /// Every local condition, assuming carrier membership.
    pub fn satisfies_conditions(&self, f: &FqPoly) -> Result<bool> {
        Ok(self.in_carrier(f) && self.over.satisfied(f)?)
    }

    /// Exhaustive when the candidates number at most `budget`, otherwise
    /// `budget` uniform draws with one RNG stream per draw.
    pub fn enumerate(&self, budget: u64, seed: u64) -> Result<FamilyMembers> {
        if budget == 0 {
            return Err(Error::InvalidInput("budget must be positive".into()));
        }
        let k = self.free_degree() as usize;
        let q = self.q();
        let (members, exhaustive, candidates) = match self.candidate_count() {
            Some(total) if total <= budget => {
                let found = par::map_chunks(total as usize, 4096, par::default_mode(), |range| {
                    range
                        .filter_map(|idx| {
                            let mut x = idx as u64;
                            let f = self.member_from_digits((0..k).map(|_| {
                                let c = (x % q) as Fe;
                                x /= q;
                                c
                            }));
                            self.in_carrier(&f).then_some(f)
                        })
                        .collect::<Vec<_>>()
                });
                (found.into_iter().flatten().collect::<Vec<_>>(), true, total)
            }
            _ => {
                let found = par::map_range(budget as usize, par::default_mode(), |i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(i as u64);
                    let f = self.member_from_digits((0..k).map(|_| rng.random_range(0..q) as Fe));
                    self.in_carrier(&f).then_some(f)
                });
                (found.into_iter().flatten().collect(), false, budget)
            }
        };
        if members.is_empty() {
            return Err(Error::SamplingExhausted(format!(
                "no member of degree {} found among {candidates} candidates",
                self.degree
            )));
        }
        Ok(FamilyMembers { members, exhaustive, candidates })
    }

    /// Members that satisfy the local conditions.
    pub fn conforming(&self, budget: u64, seed: u64) -> Result<Vec<FqPoly>> {
        let all = self.enumerate(budget, seed)?;
        let flags = par::map_slice(&all.members, par::default_mode(), |f| self.over.satisfied(f));
        let mut out = Vec::new();
        for (f, ok) in all.members.into_iter().zip(flags) {
            if ok? {
                out.push(f);
            }
        }
        Ok(out)
    }

    /// `sum deg w` over the places carrying conditions.
    pub fn conditions_degree(&self) -> u32 {
        self.condition_places().map(|v| v.degree()).sum()
    }

    fn condition_places(&self) -> impl Iterator<Item = &Place> {
        let o = &self.over;
        o.split.iter().chain(&o.inert).chain(&o.ramified).chain(&o.unramified)
    }
}

/// Outcome of a density run.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport {
    /// `#X` (or carrier members among the draws).
    pub carrier: u64,
    /// `#Y`: carrier members satisfying every condition.
    pub good: u64,
    pub empirical: Ratio<u64>,
    /// `prod (q_w - 1) / (d q_w)` over the condition places.
    pub lower_bound: Ratio<u64>,
    /// Fraction of candidates outside the carrier set, reported separately.
    pub excluded_fraction: Ratio<u64>,
    pub exhaustive: bool,
}

impl DensityReport {
    pub fn margin(&self) -> f64 {
        ratio_f64(&self.empirical) - ratio_f64(&self.lower_bound)
    }
}

pub fn ratio_f64(r: &Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `#Y_n / #X(F_{q^n})` against the product lower bound.
pub fn density_experiment(fam: &TwistFamily, budget: u64, seed: u64) -> Result<DensityReport> {
    let all = fam.enumerate(budget, seed)?;
    let flags = par::map_slice(&all.members, par::default_mode(), |f| fam.over.satisfied(f));
    let mut good = 0u64;
    for ok in flags {
        good += ok? as u64;
    }
    let carrier = all.members.len() as u64;
    let d = fam.d as u64;
    let mut bound = Ratio::from_integer(1u64);
    for v in fam.condition_places() {
        let qw = v.residue_size();
        bound *= Ratio::new(qw - 1, d * qw);
    }
    let report = DensityReport {
        carrier,
        good,
        empirical: Ratio::new(good, carrier),
        lower_bound: bound,
        excluded_fraction: Ratio::new(all.candidates - carrier, all.candidates),
        exhaustive: all.exhaustive,
    };
    if all.exhaustive && fam.degree as i64 > fam.conditions_degree() as i64 - 2 && good == 0 {
        return Err(Error::InternalInconsistency(format!(
            "no conforming member although degree {} exceeds deg S_n - 2",
            fam.degree
        )));
    }
    Ok(report)
}

/// Unitarized Frobenius data of one twist.
#[derive(Clone, Debug)]
pub struct FrobeniusClassData {
    pub f: FqPoly,
    /// Unitarized inverse roots.
    pub roots: Vec<Complex64>,
    /// `|arg|` of each root, sorted, in `[0, pi]`.
    pub unitarized_angles: Vec<f64>,
    /// Unitarized power sums `k = 1..4`.
    pub traces: [Complex64; 4],
    pub l: LPoly,
}

fn unitary_scale(l: &LPoly) -> f64 {
    (l.q as f64).powf((l.weight + 1) as f64 / 2.0)
}

/// Frobenius data from an already computed L-polynomial.
pub fn frobenius_data(f: FqPoly, l: LPoly) -> Result<FrobeniusClassData> {
    let raw = inverse_roots(&l)?;
    let mut roots = Vec::with_capacity(raw.len());
    for (i, r) in raw.iter().enumerate() {
        let clustered = raw.iter().enumerate().any(|(j, s)| j != i && (r - s).norm() < 1e-4);
        let tol = if clustered { CLUSTER_TOL } else { ANGLE_TOL };
        let dev = (r.norm() - 1.0).abs();
        if dev > tol {
            return Err(Error::NumericalFailure(format!(
                "unitarized root {r} is {dev:e} off the circle for {f}"
            )));
        }
        roots.push(r / r.norm());
    }
    let mut unitarized_angles: Vec<f64> = roots.iter().map(|r| r.arg().abs()).collect();
    unitarized_angles.sort_by(|a, b| a.total_cmp(b));
    let scale = unitary_scale(&l);
    let traces = [1usize, 2, 3, 4].map(|k| power_sum(&l, k).embed() / scale.powi(k as i32));
    Ok(FrobeniusClassData { f, roots, unitarized_angles, traces, l })
}

/// Frobenius data of `rho (x) sigma_{o,f}` for `f` over `F_{q^n}`.
pub fn frobenius_class(rep: &RepDescriptor, f: &FqPoly, d: u32, o: &Orbit, n: u32) -> Result<FrobeniusClassData> {
    let l = twist_l(rep, f, d, o, n)?;
    frobenius_data(f.clone(), l)
}

/// `L(rho (x) sigma_{o,f}, F_{q^n}, T)` for untwisted `rep` over `F_q` and `f` over `F_{q^n}`.
pub fn twist_l(rep: &RepDescriptor, f: &FqPoly, d: u32, o: &Orbit, n: u32) -> Result<LPoly> {
    let rep_n = rep.base_change(n)?;
    let chi = PowerCharacter::from_poly(f.clone(), d, 1)?;
    l_orbit_here(&rep_n, &chi, o, n)
}

/// The group whose Haar measure the Frobenius classes should follow.
pub fn predicted_group(rep: &RepDescriptor, o: &Orbit) -> HaarGroup {
    if !o.symmetric {
        return HaarGroup::Unitary;
    }
    match rep.self_duality() {
        SelfDuality::Orthogonal if o.is_half() => HaarGroup::Symplectic,
        SelfDuality::Symplectic => HaarGroup::OrthogonalFull,
        _ => HaarGroup::Unitary,
    }
}

/// One family member in an equidistribution run.
#[derive(Clone, Debug)]
pub struct EquidistRow {
    pub f: FqPoly,
    pub conforming: bool,
    pub degree: u32,
    pub root_number: String,
    /// Multiplicity of `q^{n(w+1)/2}` as an inverse root.
    pub mult_central: u32,
    pub trace1: Complex64,
    pub stats: TraceStats,
}

/// One compared moment.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentComparison {
    pub name: &'static str,
    pub empirical: Estimate,
    pub baseline: Estimate,
    pub z: f64,
}

#[derive(Clone, Debug)]
pub struct EquidistReport {
    pub group: HaarGroup,
    pub size: usize,
    pub rows: Vec<EquidistRow>,
    pub empirical: MomentTable,
    pub baseline: MomentTable,
    pub comparisons: Vec<MomentComparison>,
    pub vanishing_fraction: f64,
    pub exhaustive: bool,
}

impl EquidistReport {
    pub fn max_abs_z(&self) -> f64 {
        self.comparisons.iter().map(|c| c.z.abs()).fold(0.0, f64::max)
    }
}

/// Parameters of an equidistribution run.
#[derive(Clone, Copy, Debug)]
pub struct EquidistParams {
    /// Family members examined.
    pub budget: u64,
    pub haar_samples: usize,
    pub seed: u64,
}

/// Trace moments over conforming members against the predicted Haar baseline.
pub fn equidist_experiment(fam: &TwistFamily, o: &Orbit, params: EquidistParams) -> Result<EquidistReport> {
    let all = fam.enumerate(params.budget, params.seed)?;
    let rows = par::map_slice(&all.members, par::default_mode(), |f| -> Result<Option<EquidistRow>> {
        if !fam.over.satisfied(f)? {
            return Ok(None);
        }
        let l = twist_l(&fam.rep, f, fam.d, o, fam.n)?;
        let w = root_number(&l)?;
        let central = l.ring().u_pow(l.weight + 1);
        let mult_central = root_multiplicity(&l, &central);
        let data = frobenius_data(f.clone(), l)?;
        let stats = TraceStats { tr: data.traces[0], tr_sq: data.traces[1] };
        Ok(Some(EquidistRow {
            f: f.clone(),
            conforming: true,
            degree: data.l.degree(),
            root_number: w.to_string(),
            mult_central,
            trace1: data.traces[0],
            stats,
        }))
    });
    let mut kept = Vec::new();
    for r in rows {
        if let Some(row) = r? {
            kept.push(row);
        }
    }
    if kept.is_empty() {
        return Err(Error::SamplingExhausted("no conforming member for the equidistribution run".into()));
    }
    let size = kept[0].degree as usize;
    if kept.iter().any(|r| r.degree as usize != size) {
        return Err(Error::InternalInconsistency("L-degree varies across the family".into()));
    }
    let group = predicted_group(&fam.rep, o);
    let stats: Vec<TraceStats> = kept.iter().map(|r| r.stats).collect();
    let empirical = moments_of(group, size, &stats);
    let baseline = haar_baseline(group, size, params.haar_samples, params.seed ^ 0x4a61_6172)?;
    let cmp = |name, e: Estimate, b: Estimate| MomentComparison { name, empirical: e, baseline: b, z: e.z_against(&b) };
    let comparisons = vec![
        cmp("tr_re", empirical.tr_re, baseline.tr_re),
        cmp("tr_abs2", empirical.tr_abs2, baseline.tr_abs2),
        cmp("tr_sq_re", empirical.tr_sq_re, baseline.tr_sq_re),
    ];
    let vanishing = kept.iter().filter(|r| r.mult_central > 0).count() as f64 / kept.len() as f64;
    Ok(EquidistReport {
        group,
        size,
        rows: kept,
        empirical,
        baseline,
        comparisons,
        vanishing_fraction: vanishing,
        exhaustive: all.exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteField;
    use crate::lfunc::orbits_of_q;

    fn trivial(q: u64) -> RepDescriptor {
        RepDescriptor::Trivial(FiniteField::of_order(q).unwrap())
    }

    #[test]
    fn squarefree_cubic_count() {
        let fam = TwistFamily::new(trivial(5), 2, 1, 3, LocalConditions::none(2)).unwrap();
        let m = fam.enumerate(1000, 0).unwrap();
        assert!(m.exhaustive);
        assert_eq!(m.members.len(), 100);
    }

    #[test]
    fn excluding_all_rational_places() {
        let f = FiniteField::of_order(5).unwrap();
        let mut conds = LocalConditions::none(2);
        conds.split = (0..5).map(|a| Place::linear(&f, a)).collect();
        let fam = TwistFamily::new(trivial(5), 2, 1, 3, conds).unwrap();
        for g in fam.enumerate(1000, 0).unwrap().members {
            assert!(g.roots().is_empty());
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let fam = TwistFamily::new(trivial(5), 2, 1, 9, LocalConditions::none(2)).unwrap();
        let a = fam.enumerate(50, 9).unwrap();
        let b = fam.enumerate(50, 9).unwrap();
        assert!(!a.exhaustive);
        assert_eq!(a.members, b.members);
    }

    #[test]
    fn condition_examples() {
        let f = FiniteField::of_order(5).unwrap();
        let x = Place::linear(&f, 0);
        let mut split = LocalConditions::none(2);
        split.split = vec![x.clone()];
        let fam = TwistFamily::new(trivial(5), 2, 1, 1, split).unwrap();
        assert!(fam.satisfies_conditions(&FqPoly::parse(&f, "x+1").unwrap()).unwrap());
        let mut inert = LocalConditions::none(2);
        inert.inert = vec![x.clone()];
        let fam = TwistFamily::new(trivial(5), 2, 1, 1, inert).unwrap();
        assert!(!fam.satisfies_conditions(&FqPoly::parse(&f, "x+1").unwrap()).unwrap());
        let mut ram = LocalConditions::none(2);
        ram.ramified = vec![x];
        let fam = TwistFamily::new(trivial(5), 2, 1, 2, ram).unwrap();
        assert!(fam.satisfies_conditions(&FqPoly::parse(&f, "x*(x+1)").unwrap()).unwrap());
    }

    #[test]
    fn vacuous_density_is_one() {
        let fam = TwistFamily::new(trivial(5), 2, 1, 3, LocalConditions::none(2)).unwrap();
        let r = density_experiment(&fam, 1000, 0).unwrap();
        assert_eq!(r.empirical, Ratio::from_integer(1));
    }

    #[test]
    fn one_split_condition_density() {
        let f = FiniteField::of_order(5).unwrap();
        let mut c = LocalConditions::none(2);
        c.split = vec![Place::linear(&f, 0)];
        let fam = TwistFamily::new(trivial(5), 2, 1, 4, c).unwrap();
        let r = density_experiment(&fam, 10_000, 0).unwrap();
        assert_eq!(r.lower_bound, Ratio::new(2, 5));
        assert!(r.empirical > r.lower_bound);
    }

    #[test]
    fn genus_one_angles() {
        let f = FiniteField::of_order(5).unwrap();
        let g = FqPoly::parse(&f, "x^3+x+1").unwrap();
        let o = orbits_of_q(2, 1, 5).unwrap()[1].clone();
        let data = frobenius_class(&trivial(5), &g, 2, &o, 1).unwrap();
        let a = -data.l.integer_coeffs().unwrap()[1].clone();
        let a = i64::try_from(a).unwrap() as f64;
        let theta = data.unitarized_angles[0];
        assert!((2.0 * theta.cos() - a / 5f64.sqrt()).abs() < 1e-9);
        assert!((data.unitarized_angles[0] - data.unitarized_angles[1]).abs() < 1e-9);
        assert!((data.traces[0].re - a / 5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn forced_pair_angles() {
        let l = LPoly::from_ints(5, 0, SelfDuality::Symplectic, &[1, 0, 5]);
        let x = FqPoly::x(&FiniteField::of_order(5).unwrap());
        let data = frobenius_data(x, l).unwrap();
        for a in data.unitarized_angles {
            assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        }
    }
}
