//! The subcommands.

use std::sync::Arc;

use num_integer::Integer;
use twistlab::algebra::scalar::spoly;
use twistlab::algebra::{FiniteField, FqPoly, ScalarExt};
use twistlab::applications::{heegner_search, HeegnerSpec};
use twistlab::covers::CoverCurve;
use twistlab::family::{density_experiment, equidist_experiment, ratio_f64, twist_l, EquidistParams, TwistFamily};
use twistlab::lfunc::classify::alpha_value;
use twistlab::lfunc::{
    classify_context, classify_exceptional, forced_factor, hypothesis_h1, hypothesis_h2, l_polynomial,
    orbits_of_q, root_number, ForcedContext, LPoly, Orbit,
};
use twistlab::par;
use twistlab::reps::{PowerCharacter, RepDescriptor, SelfDuality};
use twistlab::Error;

use crate::config::{Config, Overrides};
use crate::error::CliError;
use crate::output::{Report, Table};

/// Space-separated integers when every coefficient is one, else `; `-separated.
fn coeff_text(coeffs: &[ScalarExt]) -> String {
    match coeffs.iter().map(|c| c.as_integer()).collect::<Option<Vec<_>>>() {
        Some(c) => c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
        None => coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "),
    }
}

fn lpoly_text(l: &LPoly) -> String {
    coeff_text(&l.coeffs)
}

fn multiplicity(poly: &[ScalarExt], factor: &[ScalarExt]) -> u32 {
    if factor.len() < 2 {
        return 0;
    }
    let mut rest = poly.to_vec();
    let mut m = 0;
    while let Some(next) = spoly::div_exact(&rest, factor) {
        rest = next;
        m += 1;
    }
    m
}

fn sign_text(s: Option<i64>) -> String {
    s.map_or("-".into(), |w| format!("{w:+}"))
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or("-".into(), |v| v.to_string())
}

/// Cover equations from `family.f`, or all monic squarefree ones of `family.degree`.
fn cover_polys(cfg: &Config, field: &Arc<FiniteField>, ov: Overrides) -> Result<Vec<FqPoly>, CliError> {
    if let Some(fs) = cfg.fs_in(field)? {
        return Ok(fs);
    }
    let deg = cfg.degree()? as usize;
    let budget = cfg.budget(ov)?;
    Ok(FqPoly::monic_squarefree(field, deg).into_iter().take(budget as usize).collect())
}

pub fn lpoly(cfg: &Config, _ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let n = cfg.n()?;
    let field_n = cfg.field_n()?;
    let mut report = Report::default();
    let (l, expected, label) = match cfg.f_in(&field_n)? {
        Some(f) => {
            let d = cfg.d()?;
            let o = Orbit::of(cfg.orbit()?, d, field_n.q());
            let l = twist_l(&rep, &f, d, &o, n)?;
            let expected = if o.a_o == 1 {
                let chi = PowerCharacter::from_poly(f.clone(), d, o.members[0])?;
                Some(rep.base_change(n)?.twist(chi)?.expected_degree()?)
            } else {
                None
            };
            (l, expected, format!("{rep} x sigma(o={:?}, f={f})", o.members))
        }
        None => (l_polynomial(&rep, n)?, Some(rep.base_change(n)?.expected_degree()?), rep.to_string()),
    };
    let w = root_number(&l)?;
    let mut t = Table::new("lpoly", &["rep", "n", "Q", "degree", "expected_degree", "root_number", "coefficients"]);
    t.push(vec![
        label.clone(),
        n.to_string(),
        l.q.to_string(),
        l.degree().to_string(),
        opt(expected),
        w.to_string(),
        lpoly_text(&l),
    ]);
    let mut c = Table::new("coefficients", &["k", "coefficient"]);
    for (k, a) in l.coeffs.iter().enumerate() {
        c.push(vec![k.to_string(), a.to_string()]);
    }
    report.tables = vec![t, c];
    report.line(format!("L({label}, F_{}, T)", l.q));
    report.line(format!("degree {}", l.degree()));
    report.line(format!("W={w}"));
    report.line("functional equation: exact coefficientwise check passed");
    if let Some(e) = expected {
        report.check(e == l.degree(), format!("degree formula: computed {} but expected {e}", l.degree()));
    }
    Ok(report)
}

pub fn factorize(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let field = cfg.field()?;
    let (d, n) = (cfg.d()?, cfg.n()?);
    let polys = cover_polys(cfg, &field, ov)?;
    let rows = par::map_slice(&polys, par::default_mode(), |f| -> Result<(Vec<String>, bool), Error> {
        let cover = CoverCurve::new(f.clone(), d, n)?;
        let z = cover.zeta_numerator()?;
        let prod = cover.orbit_product()?;
        let ring = prod[0].ring().clone();
        let ok = spoly::trim(z.lift(&ring)?.coeffs) == prod;
        let row = vec![f.to_string(), cover.genus().to_string(), lpoly_text(&z), coeff_text(&prod), ok.to_string()];
        Ok((row, ok))
    });
    let orbits = orbits_of_q(d, n, field.q())?;
    let mut t = Table::new("factorize", &["f", "genus", "zeta_numerator", "orbit_product", "agrees"]);
    let mut report = Report::default();
    let mut bad = 0;
    for r in rows {
        let (row, ok) = r?;
        if !ok {
            bad += 1;
            report.failures.push(format!("orbit factorization fails for f = {}", row[0]));
        }
        t.push(row);
    }
    let names: Vec<String> = orbits.iter().map(|o| format!("{:?}", o.members)).collect();
    report.line(format!("covers y^{d} = f over F_{}: {} checked, {bad} mismatches", field.q().pow(n), t.rows.len()));
    report.line(format!("orbits of multiplication by q^n on Z/{d}: {}", names.join(" ")));
    report.tables.push(t);
    Ok(report)
}

pub fn zeta_cover(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let field = cfg.field()?;
    let (d, n) = (cfg.d()?, cfg.n()?);
    let qn = field.q().pow(n);
    let polys = cover_polys(cfg, &field, ov)?;
    let rows = par::map_slice(&polys, par::default_mode(), |f| -> Result<(Vec<String>, u32, u32), Error> {
        let cover = CoverCurve::new(f.clone(), d, n)?;
        let z = cover.zeta_numerator()?;
        let ring = z.ring().clone();
        let factor = vec![ring.one(), ring.zero(), ring.int(qn as i64)];
        let m = multiplicity(&z.coeffs, &factor);
        let w = if z.degree() > 0 { root_number(&z)?.to_string() } else { "+1".into() };
        let row = vec![
            f.to_string(),
            cover.genus().to_string(),
            z.degree().to_string(),
            w,
            m.to_string(),
            lpoly_text(&z),
        ];
        Ok((row, cover.genus(), m))
    });
    let forced = d == 3 && qn % 3 == 2;
    let factor_name = format!("1+{qn}T^2");
    let mut t = Table::new("zeta_cover", &["f", "genus", "degree", "root_number", "mult_1_plus_QT2", "numerator"]);
    let mut report = Report::default();
    let mut divisible = 0;
    for r in rows {
        let (row, g, m) = r?;
        if m > 0 {
            divisible += 1;
        }
        if forced && g % 2 == 1 && m == 0 {
            report.failures.push(format!("{factor_name} does not divide the numerator for f = {} of odd genus {g}", row[0]));
        }
        t.push(row);
    }
    report.line(format!("covers y^{d} = f over F_{qn}: {}", t.rows.len()));
    report.line(format!("{divisible} numerators divisible by {factor_name}"));
    if forced {
        report.line(format!("{factor_name} is forced for odd genus since q^n = 2 mod 3"));
    }
    report.tables.push(t);
    Ok(report)
}

/// H1, H2 and the per-`f` sign data of the forced-factor predictor.
struct Hypotheses {
    h1: Option<bool>,
    h2: Option<bool>,
}

fn hypotheses(rep: &RepDescriptor, cfg: &Config, o: &Orbit, n: u32, seed: u64) -> Result<Hypotheses, CliError> {
    let conds = cfg.conditions()?;
    let h1 = if rep.self_duality() == SelfDuality::Symplectic && o.is_half() {
        Some(hypothesis_h1(rep, &conds, n, seed)?)
    } else {
        None
    };
    let h2 = if o.symmetric && o.a_o > 1 {
        match hypothesis_h2(rep, o, &conds, n) {
            Ok(b) => Some(b),
            Err(Error::HypothesisInapplicable(_)) => Some(false),
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    Ok(Hypotheses { h1, h2 })
}

pub fn forced_zeros(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let (d, n, degree) = (cfg.d()?, cfg.n()?, cfg.degree()?);
    let seed = cfg.seed(ov)?;
    let fam = TwistFamily::new(rep.clone(), d, n, degree, cfg.conditions()?)?;
    let o = Orbit::of(cfg.orbit()?, d, fam.q());
    let hyp = hypotheses(&rep, cfg, &o, n, seed)?;
    let members = match cfg.fs_in(&cfg.field_n()?)? {
        Some(fs) => {
            for f in &fs {
                if f.degree() != Some(degree as usize) || !fam.conditions().satisfied(f)? {
                    return Err(CliError::Config(format!("family.f: {f} is not a conforming twist of degree {degree}")));
                }
            }
            fs
        }
        None => fam.conforming(cfg.budget(ov)?, seed)?,
    };
    let rep_n = rep.base_change(n)?;
    let rows = par::map_slice(&members, par::default_mode(), |f| -> Result<(Vec<String>, bool), Error> {
        let l = twist_l(&rep, f, d, &o, n)?;
        let mut ctx = ForcedContext { h1: hyp.h1, h2: hyp.h2, ..Default::default() };
        if o.is_half() && rep.self_duality() == SelfDuality::Symplectic {
            let tau = rep_n.twist(PowerCharacter::from_poly(f.clone(), d, d / 2)?)?;
            ctx.cond_odd = Some(tau.conductor_degree()? % 2 == 1);
            ctx.w_sign = root_number(&l)?.sign();
        }
        let factor = forced_factor(rep.self_duality(), rep.dim(), rep.weight(), &o, &ctx, l.ring())?;
        let divides = spoly::div_exact(&l.coeffs, &factor).is_some();
        let row = vec![
            f.to_string(),
            l.degree().to_string(),
            root_number(&l)?.to_string(),
            coeff_text(&factor),
            (factor.len() - 1).to_string(),
            divides.to_string(),
            multiplicity(&l.coeffs, &factor).to_string(),
        ];
        Ok((row, divides))
    });
    let mut t = Table::new(
        "forced_zeros",
        &["f", "degree", "root_number", "predicted_factor", "factor_degree", "divides", "multiplicity"],
    );
    let mut report = Report::default();
    let mut forced = 0;
    for r in rows {
        let (row, ok) = r?;
        if !ok {
            report.failures.push(format!("predicted factor does not divide L for f = {}", row[0]));
        }
        if row[4] != "0" {
            forced += 1;
        }
        t.push(row);
    }
    report.line(format!("{rep} twisted by sigma(o={:?}, f), d = {d}, n = {n}, deg f = {degree}", o.members));
    report.line(format!("H1 = {}, H2 = {}", opt(hyp.h1), opt(hyp.h2)));
    report.line(format!("{} conforming f, {forced} with a nontrivial predicted factor", t.rows.len()));
    report.tables.push(t);
    Ok(report)
}

pub fn classify(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let conds = cfg.conditions()?;
    let d = conds.d;
    let seed = cfg.seed(ov)?;
    let q = rep.field().q();
    let level = cfg.alpha_level().unwrap_or_else(|| d.lcm(&2));
    let w1 = rep.weight() + 1;
    let alphas = cfg.alphas().unwrap_or_else(|| (0..level).map(|j| [j, w1]).collect());
    let mut t = Table::new(
        "classify",
        &["n", "orbit", "a_o", "alpha", "h1", "h2", "cond_odd", "w_sign", "type"],
    );
    let mut report = Report::default();
    let mut counts = std::collections::BTreeMap::new();
    for n in cfg.ns()? {
        let qn = q.pow(n);
        for o in orbits_of_q(d, n, q)?.into_iter().filter(|o| !o.is_trivial()) {
            let first = alpha_value(level, qn, alphas[0][0] as i64, alphas[0][1]);
            let (_, ctx) = classify_exceptional(&rep, &conds, n, &o, &first, seed)?;
            for &[j, k] in &alphas {
                let alpha = alpha_value(level, qn, j as i64, k);
                let ty = classify_context(&ctx, &alpha)?;
                *counts.entry(ty).or_insert(0) += 1;
                t.push(vec![
                    n.to_string(),
                    format!("{:?}", o.members),
                    o.a_o.to_string(),
                    format!("zeta_{level}^{j} u^{k}"),
                    opt(ctx.h1),
                    opt(ctx.h2),
                    opt(ctx.cond_odd),
                    sign_text(ctx.w_sign),
                    ty.to_string(),
                ]);
            }
        }
    }
    report.line(format!("{rep}, d = {d}, {} rows", t.rows.len()));
    for (ty, c) in counts {
        report.line(format!("type {ty}: {c}"));
    }
    report.tables.push(t);
    Ok(report)
}

pub fn density(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let (d, degree) = (cfg.d()?, cfg.degree()?);
    let conds = cfg.conditions()?;
    let (budget, seed) = (cfg.budget(ov)?, cfg.seed(ov)?);
    let mut t = Table::new(
        "density",
        &["n", "carrier", "good", "empirical", "lower_bound", "margin", "excluded_fraction", "exhaustive"],
    );
    let mut report = Report::default();
    for n in cfg.ns()? {
        let fam = TwistFamily::new(rep.clone(), d, n, degree, conds.clone())?;
        let r = density_experiment(&fam, budget, seed)?;
        report.check(r.good <= r.carrier, format!("n = {n}: good count exceeds the carrier"));
        report.line(format!(
            "n = {n}: density {:.4} vs bound {:.4}, margin {:+.4} ({} of {}{})",
            ratio_f64(&r.empirical),
            ratio_f64(&r.lower_bound),
            r.margin(),
            r.good,
            r.carrier,
            if r.exhaustive { ", exhaustive" } else { ", sampled" }
        ));
        t.push(vec![
            n.to_string(),
            r.carrier.to_string(),
            r.good.to_string(),
            format!("{:.6}", ratio_f64(&r.empirical)),
            format!("{:.6}", ratio_f64(&r.lower_bound)),
            format!("{:.6}", r.margin()),
            format!("{:.6}", ratio_f64(&r.excluded_fraction)),
            r.exhaustive.to_string(),
        ]);
    }
    report.tables.push(t);
    Ok(report)
}

pub fn equidist(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let (d, n, degree) = (cfg.d()?, cfg.n()?, cfg.degree()?);
    let fam = TwistFamily::new(rep.clone(), d, n, degree, cfg.conditions()?)?;
    let o = Orbit::of(cfg.orbit()?, d, fam.q());
    let params =
        EquidistParams { budget: cfg.budget(ov)?, haar_samples: cfg.haar_samples()?, seed: cfg.seed(ov)? };
    let r = equidist_experiment(&fam, &o, params)?;
    let mut members = Table::new(
        "equidist_members",
        &["f", "conforming", "degree", "root_number", "mult_central", "trace_re", "trace_im", "trace_sq_re", "trace_sq_im"],
    );
    for row in &r.rows {
        members.push(vec![
            row.f.to_string(),
            row.conforming.to_string(),
            row.degree.to_string(),
            row.root_number.clone(),
            row.mult_central.to_string(),
            format!("{:.9}", row.stats.tr.re),
            format!("{:.9}", row.stats.tr.im),
            format!("{:.9}", row.stats.tr_sq.re),
            format!("{:.9}", row.stats.tr_sq.im),
        ]);
    }
    let mut moments = Table::new(
        "equidist_moments",
        &["moment", "empirical_mean", "empirical_se", "baseline_mean", "baseline_se", "z"],
    );
    for c in &r.comparisons {
        moments.push(vec![
            c.name.to_string(),
            format!("{:.6}", c.empirical.mean),
            format!("{:.6}", c.empirical.se),
            format!("{:.6}", c.baseline.mean),
            format!("{:.6}", c.baseline.se),
            format!("{:.4}", c.z),
        ]);
    }
    let mut report = Report::default();
    report.check(
        (0.0..=1.0).contains(&r.vanishing_fraction),
        format!("vanishing fraction {} outside [0, 1]", r.vanishing_fraction),
    );
    report.line(format!("{rep}, d = {d}, n = {n}, deg f = {degree}, orbit {:?}", o.members));
    report.line(format!("{} members ({}), predicted group {} of size {}", r.rows.len(), if r.exhaustive { "exhaustive" } else { "sampled" }, r.group, r.size));
    for c in &r.comparisons {
        report.line(format!("{}: empirical {:.4}, baseline {:.4}, z = {:+.2}", c.name, c.empirical.mean, c.baseline.mean, c.z));
    }
    report.line(format!("vanishing fraction at the central point: {:.4}", r.vanishing_fraction));
    report.tables = vec![members, moments];
    Ok(report)
}

pub fn heegner(cfg: &Config, ov: Overrides) -> Result<Report, CliError> {
    let rep = cfg.rep()?;
    let curve = rep
        .curve()
        .cloned()
        .ok_or_else(|| CliError::Config("heegner needs rep.kind = \"elliptic\"".into()))?;
    let n = cfg.n()?;
    let spec = HeegnerSpec::new(curve, cfg.mode()?, n)?;
    let (base, records) =
        heegner_search(&spec, cfg.count()?, cfg.budget(ov)?, cfg.max_degree()?, cfg.seed(ov)?)?;
    let mut t = Table::new(
        "heegner",
        &["f", "infinity_class", "degree_twist", "w_twist", "ord_base", "ord_twist", "ord_k", "certificate"],
    );
    let mut report = Report::default();
    for r in &records {
        report.check(r.ord_k % 2 == 1, format!("ord L(E/K) = {} is even for f = {}", r.ord_k, r.f));
        if base.ord == 0 {
            report.check(r.ord_k == 1, format!("ord L(E/K) = {} but ord L(E) = 0 for f = {}", r.ord_k, r.f));
        }
        t.push(vec![
            r.f.to_string(),
            format!("{:?}", r.infinity_class),
            r.degree_twist.to_string(),
            format!("{:+}", r.w_twist),
            r.ord_base.to_string(),
            r.ord_twist.to_string(),
            r.ord_k.to_string(),
            format!("{:+}", r.certificate),
        ]);
    }
    report.line(format!("{rep} over F_{}, mode {:?}", base.l.q, spec.mode));
    report.line(format!("base: W = {:+}, ord = {}, b = {}", base.w, base.ord, base.b));
    let odd = records.iter().filter(|r| r.ord_k % 2 == 1).count();
    report.line(format!("{} quadratic extensions, {odd} with odd ord L(E/K)", records.len()));
    report.tables.push(t);
    Ok(report)
}
