use std::collections::BTreeMap;

use orbifold_core::cochain::cocycle_check;
use orbifold_core::poisson::{
    bracket_evaluator, cohomology_bracket, poisson_check, poisson_cohomology_h2, BracketResult, Route,
};
use orbifold_core::quasi_iso::roundtrip_check;
use orbifold_core::section::invariant_model_basis;
use orbifold_core::sra::{commutator_check, confluence_check, verify_c1, StarProduct};
use orbifold_core::{Cochain, CrossedElement, Error, MultivectorSection, Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::Report;
use crate::scenario::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Cohomology,
    Bracket,
    PoissonCheck,
    StarProduct,
    PoissonCohomology,
    VerifyRoundtrip,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Cohomology => "cohomology",
            Command::Bracket => "bracket",
            Command::PoissonCheck => "poisson-check",
            Command::StarProduct => "star-product",
            Command::PoissonCohomology => "poisson-cohomology",
            Command::VerifyRoundtrip => "verify-roundtrip",
            Command::VerifyAll => "verify-all",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub degree: Option<u32>,
    pub order: Option<usize>,
    pub route: Option<Route>,
    pub seed: Option<u64>,
}

/// Input problems found while running a command (exit status 2).
#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{0}")]
    Input(String),
}

type CResult<T> = Result<T, CommandError>;

pub fn run_command(cmd: Command, sc: &Scenario, opts: &Options) -> CResult<Report> {
    let mut r = Report::default();
    r.entry("scenario", &sc.name);
    r.entry("command", cmd.name());
    r.entry("group.order", sc.ctx.size());
    r.entry("group.dim", sc.dim());
    r.line(format!(
        "scenario {}: group of order {} on a space of dimension {}",
        sc.name,
        sc.ctx.size(),
        sc.dim()
    ));
    let body = match cmd {
        Command::Cohomology => cohomology(sc, opts)?,
        Command::Bracket => bracket(sc, opts)?,
        Command::PoissonCheck => poisson(sc, opts)?,
        Command::StarProduct => star(sc, opts)?,
        Command::PoissonCohomology => poisson_cohomology(sc, opts)?,
        Command::VerifyRoundtrip => roundtrip(sc, opts)?,
        Command::VerifyAll => verify_all(sc, opts)?,
    };
    r.merge(body);
    Ok(r)
}

fn degree(sc: &Scenario, opts: &Options) -> u32 {
    opts.degree.unwrap_or(sc.checks.degree)
}

fn verify_all(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let mut r = roundtrip(sc, opts)?;
    r.merge(cohomology(sc, opts)?);
    if !sc.sections.is_empty() {
        r.merge(bracket(sc, opts)?);
    }
    if !sc.poisson.is_empty() || sc.sra.is_some() {
        r.merge(poisson(sc, opts)?);
    }
    if sc.sra.is_some() {
        r.merge(star(sc, opts)?);
        r.merge(poisson_cohomology(sc, opts)?);
    }
    Ok(r)
}

const SWEEP_BUDGET: usize = 1_000_000;

fn cohomology(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let ctx = &sc.ctx;
    let d = degree(sc, opts);
    let mut r = Report::default();
    r.line(format!("conjugacy classes ({}):", ctx.classes().len()));
    for class in ctx.classes() {
        let g = class[0];
        let key = format!("element.{}", sc.label(g));
        r.entry(format!("{}.class_size", key), class.len());
        r.entry(format!("{}.codim", key), ctx.codim(g));
        r.line(format!("  {} (class of size {}): codim V^g = {}", sc.label(g), class.len(), ctx.codim(g)));
    }
    r.line(format!("sector model dimensions before taking invariants, coefficient degree <= {}:", d));
    for class in ctx.classes() {
        let g = class[0];
        let (l, f) = (ctx.codim(g), sc.dim() - ctx.codim(g));
        let dims: Vec<String> = (0..=sc.dim())
            .map(|k| {
                let dim = if k < l || k - l > f { 0 } else { binomial(f, k - l) * binomial(f + d as usize, f) };
                r.entry(format!("sector.{}.hh{}.dim", sc.label(g), k), dim);
                format!("HH^{} {}", k, dim)
            })
            .collect();
        r.line(format!("  {}: {}", sc.label(g), dims.join(", ")));
    }
    r.line(format!("invariant model dimensions, coefficient degree <= {}:", d));
    r.entry("cohomology.degree", d);
    for k in 0..=sc.dim() {
        let dim = invariant_model_basis(ctx, k, d)?.len();
        r.entry(format!("cohomology.hh{}.dim", k), dim);
        r.line(format!("  HH^{}: {}", k, dim));
    }
    // the twisted cocycles behind T, swept on monomial tuples; the degree is
    // capped so that tuples times 4^arity (a rough cost per tuple) stays
    // under SWEEP_BUDGET
    for class in ctx.classes() {
        let g = class[0];
        if g == ctx.identity() {
            continue;
        }
        let arity = ctx.codim(g) as u32 + 1;
        let sweep = (0..=d.min(6))
            .rev()
            .find(|&s| binomial(sc.dim() + s as usize, s as usize).saturating_pow(arity).saturating_mul(4usize.pow(arity)) <= SWEEP_BUDGET)
            .unwrap_or(0);
        let rep = cocycle_check(&Cochain::twisted(ctx, g), sweep)?;
        let key = format!("cocycle.{}", sc.label(g));
        r.entry(format!("{}.tuples", key), rep.tuples_checked);
        r.verdict(key, rep.passed());
        match &rep.witness {
            None => r.line(format!("  Omega_{} is closed on {} tuples of degree <= {}", sc.label(g), rep.tuples_checked, sweep)),
            Some((args, v)) => r.line(format!(
                "  Omega_{} is not closed: d Omega({}) = {}",
                sc.label(g),
                args.iter().map(|a| sc.format_crossed(a)).collect::<Vec<_>>().join(", "),
                sc.format_crossed(v)
            )),
        }
    }
    for (name, s) in sc.sections.iter().chain(&sc.poisson) {
        let key = format!("section.{}", name);
        r.entry(format!("{}.degree", key), s.degree().map(|k| k.to_string()).unwrap_or_else(|| "mixed".into()));
        let defect = s.invariance_defect(ctx);
        r.verdict(format!("{}.invariant", key), defect.is_none());
        match defect {
            None => r.line(format!("  {} = {}", name, sc.format_section(s))),
            Some((h, g)) => {
                r.line(format!("  {} is not invariant: {} moves its component at {}", name, sc.label(h), sc.label(g)))
            }
        }
    }
    Ok(r)
}

fn bracket(sc: &Scenario, opts: &Options) -> CResult<Report> {
    if sc.sections.is_empty() {
        return Err(CommandError::Input("bracket needs at least one entry in [sections]".into()));
    }
    let ctx = &sc.ctx;
    for (name, s) in &sc.sections {
        if let Some((h, g)) = s.invariance_defect(ctx) {
            return Err(CommandError::Input(format!(
                "section {} is not invariant: {} moves its component at {}",
                name,
                sc.label(h),
                sc.label(g)
            )));
        }
    }
    let route = opts.route.or(sc.checks.route);
    let mut r = Report::default();
    for (i, (a, xi)) in sc.sections.iter().enumerate() {
        for (b, eta) in &sc.sections[i..] {
            let key = format!("bracket.{}.{}", a, b);
            let result = match route {
                Some(rt) => cohomology_bracket(ctx, xi, eta, rt)?,
                None => {
                    let ev = bracket_evaluator(ctx, xi, eta)?;
                    match cohomology_bracket(ctx, xi, eta, Route::ClosedForm) {
                        Ok(cl) => {
                            let agree = cl.projected == ev.projected;
                            r.verdict(format!("{}.routes_agree", key), agree);
                            if !agree {
                                r.line(format!(
                                    "[{}, {}]: routes disagree; evaluator {} vs closed form {}",
                                    a,
                                    b,
                                    sc.format_section(&ev.projected),
                                    sc.format_section(&cl.projected)
                                ));
                            }
                        }
                        Err(Error::RouteUnavailable(why)) => {
                            r.entry(format!("{}.routes_agree", key), "n/a");
                            r.line(format!("[{}, {}]: closed form unavailable ({})", a, b, why));
                        }
                        Err(e) => return Err(e.into()),
                    }
                    ev
                }
            };
            let BracketResult { projected, .. } = result;
            r.entry(format!("{}.value", key), sc.format_section(&projected));
            r.line(format!("[{}, {}] = {}", a, b, sc.format_section(&projected)));
        }
    }
    Ok(r)
}

fn poisson(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let ctx = &sc.ctx;
    let mut cands: Vec<(String, MultivectorSection)> = sc.poisson.clone();
    if let Some(sra) = &sc.sra {
        cands.push(("kappa".into(), sra.kappa_section()));
    }
    if cands.is_empty() {
        return Err(CommandError::Input("poisson-check needs a [poisson] entry or an [sra] section".into()));
    }
    let confirm = opts.route.or(sc.checks.route) != Some(Route::ClosedForm);
    let mut r = Report::default();
    for (name, cand) in &cands {
        let key = format!("poisson.{}", name);
        let v = poisson_check(ctx, cand, confirm)?;
        r.line(format!("{} = {}", name, sc.format_section(cand)));
        r.entry(format!("{}.pi_pi", key), sc.format_mv(&v.pi_bracket));
        r.line(format!("  [pi_e, pi_e] = {}", sc.format_mv(&v.pi_bracket)));
        for diag in &v.codim_two {
            let g = sc.label(diag.element);
            let k = format!("{}.codim2.{}", key, g);
            r.entry(format!("{}.raw", k), sc.format_mv(&diag.raw));
            r.entry(format!("{}.restricted", k), sc.format_mv(&diag.restricted));
            r.entry(format!("{}.projected", k), sc.format_mv(&diag.projected));
            r.line(format!("  [pi_e, Lambda_{}] = {}", g, sc.format_mv(&diag.raw)));
            if diag.projected.is_zero() && !diag.raw.is_zero() {
                r.line(format!("    nonzero globally, but its projection on V^{} vanishes", g));
            } else if !diag.projected.is_zero() {
                r.line(format!("    projection on V^{} = {}", g, sc.format_mv(&diag.projected)));
            }
        }
        r.entry(format!("{}.trivial_pairs", key), v.cohomologically_trivial.len());
        for (a, b, _) in &v.cohomologically_trivial {
            r.line(format!("  [Lambda_{}, Lambda_{}] lands in codimension 4 and is trivial in cohomology", sc.label(*a), sc.label(*b)));
        }
        match v.evaluator_confirms {
            Some(ok) => {
                r.verdict(format!("{}.evaluator", key), ok);
                r.line(format!("  evaluator route: [pi, pi] {}", if ok { "vanishes" } else { "does not vanish" }));
            }
            None => r.entry(format!("{}.evaluator", key), "skipped"),
        }
        r.verdict(format!("{}.verdict", key), v.passed());
        if !v.pi_bracket.is_zero() {
            r.line("  FAIL: [pi_e, pi_e] != 0");
        }
        if let Some(g) = v.failing_element() {
            r.line(format!("  FAIL: witness element {}", sc.label(g)));
        }
    }
    Ok(r)
}

fn star(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let sra = sc.sra.as_ref().ok_or_else(|| CommandError::Input("star-product needs an [sra] section".into()))?;
    let ctx = &sc.ctx;
    let n = sc.dim();
    let order = opts.order.unwrap_or(sc.checks.order);
    let mut r = Report::default();
    let mut letters: Vec<(String, CrossedElement)> =
        (0..n).map(|i| (sc.vars[i].clone(), CrossedElement::from_poly(ctx, Poly::var(n, i)))).collect();
    for (gi, &g) in ctx.generators().iter().enumerate() {
        letters.push((format!("U[{}]", sc.generator_names[gi]), CrossedElement::group(ctx, g)));
    }
    let sp = StarProduct::new(sra, sc.checks.exponent);
    r.entry("star.order", order);
    r.line(format!("star product coefficients up to hbar^{}:", order));
    for (a, xa) in &letters {
        for (b, xb) in &letters {
            let cs = sp.product(xa, xb, order);
            let row: Vec<String> = cs.iter().enumerate().map(|(k, c)| format!("C{} = {}", k, sc.format_crossed(c))).collect();
            r.line(format!("  {} * {}: {}", a, b, row.join(", ")));
            for (k, c) in cs.iter().enumerate() {
                r.entry(format!("star.C{}.{}.{}", k, a, b), sc.format_crossed(c));
            }
        }
    }
    let conf = confluence_check(sra);
    r.entry("star.overlaps", conf.overlaps_checked);
    r.verdict("star.confluence", conf.passed());
    r.line(format!("confluence: {} overlaps, {} mismatches", conf.overlaps_checked, conf.mismatches.len()));
    if let Some(m) = conf.mismatches.first() {
        r.line(format!("  witness: {:?} reduces to {} and {}", m.overlap, m.first.format(ctx), m.second.format(ctx)));
    }
    let comm = commutator_check(sra);
    r.verdict("star.commutator", comm.is_none());
    match comm {
        None => r.line("commutator: x^i * x^j - x^j * x^i = hbar kappa(x^i, x^j) for all pairs"),
        Some((i, j)) => r.line(format!("commutator fails at ({}, {})", sc.vars[i], sc.vars[j])),
    }
    let c1 = verify_c1(sra)?;
    r.verdict("star.c1_half_kappa", c1.passed());
    r.line(format!("L(C1) = {}", sc.format_section(&c1.computed)));
    if !c1.passed() {
        r.line(format!("  expected kappa/2 = {}", sc.format_section(&c1.expected)));
    }
    Ok(r)
}

fn poisson_cohomology(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let ctx = &sc.ctx;
    let (name, kappa) = match (&sc.sra, sc.poisson.first()) {
        (Some(sra), _) => ("kappa".to_string(), sra.kappa_section()),
        (None, Some((n, s))) => (n.clone(), s.clone()),
        _ => return Err(CommandError::Input("poisson-cohomology needs an [sra] section or a [poisson] entry".into())),
    };
    let d = degree(sc, opts);
    let h = match opts.route.or(sc.checks.route) {
        Some(rt) => poisson_cohomology_h2(ctx, &kappa, d, rt)?,
        None => match poisson_cohomology_h2(ctx, &kappa, d, Route::ClosedForm) {
            Err(Error::RouteUnavailable(_)) => poisson_cohomology_h2(ctx, &kappa, d, Route::Evaluator)?,
            other => other?,
        },
    };
    let mut r = Report::default();
    r.line(format!("H^2 of d^{} in coefficient degree <= {}", name, d));
    r.entry("h2.degree", d);
    r.entry("h2.cocycles", h.dim_cocycles);
    r.entry("h2.coboundaries", h.dim_coboundaries);
    r.entry("h2.dimension", h.dimension);
    r.line(format!("  cocycles {}, coboundaries {}, dimension {}", h.dim_cocycles, h.dim_coboundaries, h.dimension));
    for (i, b) in h.basis.iter().enumerate() {
        r.entry(format!("h2.basis.{}", i), sc.format_section(b));
        r.line(format!("  basis {}: {}", i, sc.format_section(b)));
    }
    r.entry("h2.constant_basis", h.basis.iter().all(|b| b.coeff_degree() <= 0));
    if let Some(want) = sc.checks.expect_h2 {
        r.entry("h2.expected", want);
        r.verdict("h2.matches_expected", want == h.dimension);
        if want != h.dimension {
            r.line(format!("  FAIL: expected dimension {}", want));
        }
    }
    Ok(r)
}

fn roundtrip(sc: &Scenario, opts: &Options) -> CResult<Report> {
    let ctx = &sc.ctx;
    let d = degree(sc, opts);
    let seed = opts.seed.unwrap_or(sc.checks.seed);
    let samples = random_samples(sc, sc.checks.samples, d, seed);
    let mut names: BTreeMap<usize, String> = BTreeMap::new();
    let mut all = samples;
    for (name, s) in sc.sections.iter().chain(&sc.poisson) {
        if s.is_invariant(ctx) && !s.is_zero() && s.degree().is_some() {
            names.insert(all.len(), name.clone());
            all.push(s.clone());
        }
    }
    let rep = roundtrip_check(ctx, &all)?;
    let mut r = Report::default();
    r.entry("roundtrip.degree", d);
    r.entry("roundtrip.seed", seed);
    r.entry("roundtrip.checked", rep.checked);
    r.entry("roundtrip.discrepancies", rep.discrepancies.len());
    r.verdict("roundtrip.verdict", rep.passed());
    r.line(format!(
        "L(T(xi)) = xi on {} sections ({} random, coefficient degree <= {}, seed {})",
        rep.checked,
        rep.checked - names.len(),
        d,
        seed
    ));
    if let Some(w) = rep.discrepancies.first() {
        let what = names.get(&w.sample).cloned().unwrap_or_else(|| format!("random sample {}", w.sample));
        r.line(format!(
            "  FAIL: {} at component {}: expected {}, got {}",
            what,
            sc.label(w.element),
            sc.format_mv(&w.expected),
            sc.format_mv(&w.got)
        ));
    }
    Ok(r)
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Nonzero random invariant sections cycling through the tangent degrees.
pub fn random_samples(sc: &Scenario, count: usize, d: u32, seed: u64) -> Vec<MultivectorSection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sc.dim();
    let mut out = Vec::new();
    let mut k = 0;
    let mut misses = 0;
    while out.len() < count {
        let s = MultivectorSection::random_invariant(&sc.ctx, k, d, &mut rng);
        if s.is_zero() {
            misses += 1;
            // some degrees have an empty model; move on after a few draws
            if misses < 8 {
                continue;
            }
        } else {
            out.push(s);
        }
        misses = 0;
        k = (k + 1) % (n + 1);
    }
    out
}
