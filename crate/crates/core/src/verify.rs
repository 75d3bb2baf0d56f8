//! End-to-end checks of the worked families, reported as pass, fail or
//! documented discrepancy.

use std::fmt;
use std::time::{Duration, Instant};

use crate::cdga::{pure_check, FreeCdga, Morphism, Violation};
use crate::cohomology::{betti_with, is_quasi_iso_with, quotient_ring_dims_with, CohomologyOptions, CohomologyReport};
use crate::constructors::{projectivize, PontryaginData};
use crate::dsl::{parse_document, parse_model, Document};
use crate::error::{Error, Result};
use crate::gradedalg::{scalar, Generator, Polynomial, Scalar};
use crate::presets::{self, Case};
use crate::reduction::{compact_betti, reduce_with, ReductionLog, DEFAULT_CHECK_DEGREE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    /// The computation disagrees with a stated formula or claim, and the
    /// disagreement is the expected, documented outcome.
    Discrepancy,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Discrepancy => "DISCREPANCY",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub status: Status,
    pub name: String,
    pub detail: String,
}

impl Check {
    fn new(status: Status, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            status,
            name: name.into(),
            detail: detail.into(),
        }
    }

    fn expect(ok: bool, name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check::new(if ok { Status::Pass } else { Status::Fail }, name, detail)
    }
}

#[derive(Clone, Debug)]
pub struct CaseReport {
    pub id: String,
    pub description: String,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {}: {}", self.id, self.description)?;
        for c in &self.checks {
            writeln!(f, "  {:<11} {}", c.status.to_string(), c.name)?;
            for line in c.detail.lines() {
                writeln!(f, "              {line}")?;
            }
        }
        write!(
            f,
            "  {} pass, {} discrepancy, {} fail ({:.2} s)",
            self.count(Status::Pass),
            self.count(Status::Discrepancy),
            self.count(Status::Fail),
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub n: Option<u32>,
    /// Overrides the free coefficients: `β` for prop32, `c_k` for thm33.
    pub coefficients: Option<Vec<Scalar>>,
    pub check_degree: u32,
    pub cohomology: CohomologyOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n: None,
            coefficients: None,
            check_degree: DEFAULT_CHECK_DEGREE,
            cohomology: CohomologyOptions::default(),
        }
    }
}

struct Ctx<'a> {
    opts: &'a VerifyOptions,
    checks: Vec<Check>,
}

impl Ctx<'_> {
    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    /// Records a failed check for math errors; resource limits propagate.
    fn attempt<T>(&mut self, name: &str, r: Result<T>) -> Result<Option<T>> {
        match r {
            Ok(v) => Ok(Some(v)),
            Err(e @ Error::ResourceLimit { .. }) => Err(e),
            Err(e) => {
                self.push(Check::new(Status::Fail, name, e.to_string()));
                Ok(None)
            }
        }
    }

    fn betti(&self, m: &FreeCdga, max: u32) -> Result<CohomologyReport> {
        betti_with(m, max, &self.opts.cohomology)
    }

    fn reduce(&mut self, name: &str, m: &FreeCdga) -> Result<Option<(FreeCdga, ReductionLog)>> {
        let r = reduce_with(m, self.opts.check_degree, &self.opts.cohomology);
        self.attempt(name, r)
    }

    fn quasi_iso(&mut self, name: &str, m: &Morphism, max: u32) -> Result<()> {
        if let Some(rep) = self.attempt(name, is_quasi_iso_with(m, max, self.opts.cohomology.max_basis))? {
            let detail = if rep.is_quasi_iso() {
                format!("{} induces isomorphisms on H^k for k <= {max}", describe_morphism(m))
            } else {
                let bad: Vec<String> = rep
                    .failures()
                    .map(|d| format!("degree {}: {}", d.degree, d.verdict))
                    .collect();
                format!("{}: {}", describe_morphism(m), bad.join(", "))
            };
            self.push(Check::expect(rep.is_quasi_iso(), name, detail));
        }
        Ok(())
    }

    /// Reduces `m` and compares with `expected` up to generator names.
    fn reduces_to(&mut self, name: &str, m: &FreeCdga, expected: &FreeCdga) -> Result<Option<FreeCdga>> {
        let Some((out, log)) = self.reduce(name, m)? else {
            return Ok(None);
        };
        let exact = out == *expected;
        let renamed = !exact && out.renaming_onto(expected).is_some();
        let mut detail = format!("result {out}\n{}", log_summary(&log));
        if renamed {
            detail.push_str("\nequal to the expected model after renaming generators");
        }
        if !exact && !renamed {
            detail.push_str(&format!("\nexpected {expected}"));
        }
        self.push(Check::expect(exact || renamed, name, detail));
        Ok(Some(out))
    }

    /// Checks every stated formula of the document's discrepancy entries
    /// against the degree validator and against the constructed model.
    fn formula_discrepancies(&mut self, doc: &Document, built: Option<&FreeCdga>) {
        for d in &doc.discrepancies {
            let (Some((g, stated)), Some((_, corrected))) = (&d.stated, &d.corrected) else {
                continue;
            };
            let name = format!("stated d{g} = {stated}");
            let mut detail = match d.stated_violation() {
                Some(v) => format!("rejected: {v}"),
                None => "degree-consistent".to_string(),
            };
            detail.push_str(&format!("\ncorrected: d{g} = {corrected}"));
            let actual = built.and_then(|m| m.generator(g.name()).and_then(|h| m.d(h)));
            let agrees = match actual {
                Some(actual) => {
                    if actual == corrected {
                        detail.push_str("\nthe constructed model has the corrected differential");
                        true
                    } else {
                        detail.push_str(&format!("\nthe constructed model has d{g} = {actual}"));
                        false
                    }
                }
                None => true,
            };
            if let Some(note) = &d.note {
                detail.push_str(&format!("\nnote: {note}"));
            }
            let stated_matches = actual.is_some_and(|a| a == stated);
            let status = if !agrees {
                Status::Fail
            } else if stated_matches {
                Status::Pass
            } else {
                Status::Discrepancy
            };
            self.push(Check::new(status, name, detail));
        }
    }
}

fn describe_morphism(m: &Morphism) -> String {
    let images: Vec<String> = m.images().map(|(g, img)| format!("{g} -> {img}")).collect();
    format!("{}: {}", m.name(), images.join(", "))
}

fn log_summary(log: &ReductionLog) -> String {
    if log.is_empty() {
        return "no reduction steps".to_string();
    }
    let steps: Vec<String> = log.steps.iter().map(|s| s.step.to_string()).collect();
    let mut out = steps.join("; ");
    if let Some(b) = &log.initial_betti {
        out.push_str(&format!(
            "\nbetti up to degree {} unchanged at every step: {}",
            log.check_degree,
            compact_betti(b)
        ));
    }
    out
}

fn nonzero_text(r: &CohomologyReport) -> String {
    compact_betti(&r.betti_numbers())
}

fn model<'d>(doc: &'d Document, name: &str) -> Result<&'d FreeCdga> {
    doc.model(name)
        .ok_or_else(|| Error::InvalidInput(format!("preset has no model {name}")))
}

fn morphism<'d>(doc: &'d Document, name: &str) -> Result<&'d Morphism> {
    doc.morphism(name)
        .ok_or_else(|| Error::InvalidInput(format!("preset has no morphism {name}")))
}

fn note(doc: &Document, id: &str) -> String {
    doc.discrepancy(id).and_then(|d| d.note.clone()).unwrap_or_default()
}

/// Runs one family. `n` defaults to 2; thm34 has no parameter.
pub fn verify_case(case: Case, opts: &VerifyOptions) -> Result<CaseReport> {
    let start = Instant::now();
    let n = opts.n.unwrap_or(case.default_n());
    let source = match (&opts.coefficients, case) {
        (Some(c), Case::Prop32) => presets::prop32_source(n, c)?,
        (Some(c), Case::Thm33) => presets::thm33_source(n, c)?,
        (Some(_), _) => {
            return Err(Error::InvalidInput(format!("{case} has no free coefficients")));
        }
        (None, _) => case.source(n)?,
    };
    let doc = parse_document(&source)?;
    let mut ctx = Ctx {
        opts,
        checks: Vec::new(),
    };
    match case {
        Case::Thm34 => thm34(&mut ctx, &doc)?,
        Case::Thm33 => thm33(&mut ctx, &doc, n)?,
        Case::Prop31 => prop31(&mut ctx, &doc, n)?,
        Case::Prop32 => prop32(&mut ctx, &doc, n, opts.coefficients.is_none())?,
    }
    Ok(CaseReport {
        id: case.id().to_string(),
        description: case.description(n),
        checks: ctx.checks,
        elapsed: start.elapsed(),
    })
}

fn thm34(ctx: &mut Ctx, doc: &Document) -> Result<()> {
    const MAX: u32 = 16;
    let pe = model(doc, "PE")?;
    let pe_betti = ctx.betti(pe, MAX)?;
    let expected = vec![(0, 1), (4, 2), (8, 2), (12, 1)];
    ctx.push(Check::expect(
        pe_betti.nonzero() == expected,
        "P(E) betti up to degree 16 is (1, 2, 2, 1) in degrees 0, 4, 8, 12",
        format!("model {pe}\nbetti {}", nonzero_text(&pe_betti)),
    ));
    ctx.push(Check::expect(pure_check(pe), "P(E) model is pure", ""));

    let ring = doc
        .presentation("PEring")
        .ok_or_else(|| Error::InvalidInput("preset has no presentation PEring".into()))?;
    let dims = quotient_ring_dims_with(ring, MAX, ctx.opts.cohomology.max_basis)?;
    let dims: Vec<usize> = (0..=MAX).map(|k| dims.get(&k).copied().unwrap_or(0)).collect();
    let rels: Vec<String> = ring.relations().iter().map(ToString::to_string).collect();
    ctx.push(Check::expect(
        dims == pe_betti.betti_numbers(),
        "Q[x4, y4]/(x4^2 + x4*y4 + y4^2, y4^3) matches H*(P(E)) degree by degree",
        format!("relations {}\nquotient dims {}", rels.join(", "), compact_betti(&dims)),
    ));

    let b = model(doc, "B")?;
    let reduced = model(doc, "Breduced")?;
    ctx.reduces_to("biquotient reduces to Λ(a4, b4, v7, v11)", b, reduced)?;
    let b_betti = ctx.betti(b, MAX)?;
    ctx.push(Check::expect(
        b_betti.betti_numbers() == pe_betti.betti_numbers(),
        "biquotient betti equals P(E) betti",
        format!("betti {}", nonzero_text(&b_betti)),
    ));

    ctx.quasi_iso(
        "change of variables xb4 = a4 - b4, yb4 = -b4 is a quasi-isomorphism",
        morphism(doc, "g")?,
        MAX,
    )?;

    let stated = morphism(doc, "f_stated")?;
    match stated.compose_and_check() {
        Ok(()) => ctx.push(Check::new(
            Status::Pass,
            "stated f is a chain map",
            describe_morphism(stated),
        )),
        Err(vs) => {
            let msgs: Vec<String> = vs.iter().map(ToString::to_string).collect();
            ctx.push(Check::new(
                Status::Discrepancy,
                "stated f (identity on names) is not a chain map",
                format!(
                    "{}\n{}\nnote: {}",
                    describe_morphism(stated),
                    msgs.join("\n"),
                    note(doc, "f")
                ),
            ));
        }
    }
    ctx.quasi_iso(
        "sign-corrected f is a quasi-isomorphism up to degree 16",
        morphism(doc, "f_corrected")?,
        MAX,
    )?;
    ctx.quasi_iso(
        "f from the reduced biquotient model to P(E) is a quasi-isomorphism",
        morphism(doc, "f")?,
        MAX,
    )?;
    ctx.formula_discrepancies(doc, None);
    Ok(())
}

fn thm33(ctx: &mut Ctx, doc: &Document, n: u32) -> Result<()> {
    let max = 8 * n;
    let top = 8 * n - 1;
    let expected: Vec<(u32, usize)> = (0..2 * n).map(|k| (4 * k, 1)).collect();
    let degrees: Vec<String> = expected.iter().map(|(d, _)| d.to_string()).collect();

    let pe = model(doc, "PE")?;
    let pe_reduced = model(doc, "PEreduced")?;
    ctx.reduces_to(
        &format!("P(E) reduces to Λ(x4, a{top}) with da{top} = x4^{}", 2 * n),
        pe,
        pe_reduced,
    )?;
    let b = model(doc, "B")?;
    let b_reduced = model(doc, "Breduced")?;
    ctx.reduces_to(
        &format!("biquotient reduces to Λ(b4, v{top}) with dv{top} = -b4^{}", 2 * n),
        b,
        b_reduced,
    )?;

    for (label, m) in [("P(E)", pe), ("biquotient", b)] {
        let r = ctx.betti(m, max)?;
        ctx.push(Check::expect(
            r.nonzero() == expected,
            format!("{label} betti is 1 exactly in degrees {}", degrees.join(", ")),
            format!("betti up to degree {max}: {}", nonzero_text(&r)),
        ));
    }

    let eta = morphism(doc, "eta")?;
    ctx.quasi_iso(&format!("eta is a quasi-isomorphism up to degree {max}"), eta, max)?;
    ctx.push(Check::new(
        Status::Discrepancy,
        format!("stated eta(v{top}) = -b{top}"),
        note(doc, "eta"),
    ));
    ctx.formula_discrepancies(doc, Some(b));
    Ok(())
}

fn prop31(ctx: &mut Ctx, doc: &Document, n: u32) -> Result<()> {
    let b = model(doc, "B")?;
    let (b3, z3, v4, a4) = (b.gen("b3")?, b.gen("z3")?, b.gen("v4")?, b.gen("a4")?);
    let expected = &Polynomial::generator(v4) - &Polynomial::generator(a4);
    ctx.push(Check::expect(
        b.d(b3) == Some(&expected) && b.d(z3) == Some(&expected),
        "db3 = dz3 = v4 - a4",
        format!("model {b}"),
    ));
    let max = (4 * n).max(8);
    let r = ctx.betti(b, max)?;
    ctx.push(Check::expect(
        r.betti(0) == 1 && r.betti(3) == 1 && r.betti(4) == 1,
        "betti(0) = betti(3) = betti(4) = 1",
        format!("betti up to degree {max}: {}", nonzero_text(&r)),
    ));
    let contractible = r.total_dimension() == 1;
    ctx.push(Check::new(
        if contractible { Status::Pass } else { Status::Discrepancy },
        "claim: the model is contractible",
        if contractible {
            "cohomology is Q in degree 0".to_string()
        } else {
            format!(
                "not contractible: nonzero cohomology {} up to degree {max}; H^3 is spanned by the class of b3 - z3\nnote: {}",
                nonzero_text(&r),
                note(doc, "contractible")
            )
        },
    ));
    let target = FreeCdga::new("", [a4.clone(), z3.clone()], [])?;
    if let Some(out) = ctx.reduces_to("reduction ends at Λ(a4, z3) with zero differential", b, &target)? {
        let _ = out;
    }
    ctx.formula_discrepancies(doc, Some(b));
    Ok(())
}

fn prop32(ctx: &mut Ctx, doc: &Document, n: u32, default_betas: bool) -> Result<()> {
    let b = model(doc, "B")?;
    let closed = model(doc, "Breduced")?;
    let reduced = ctx.reduces_to(
        &format!(
            "reduction ends at the closed form Λ(b4, c4, a{}, a{})",
            4 * n - 1,
            4 * n + 3
        ),
        b,
        closed,
    )?;
    if let Some(out) = &reduced {
        let r = ctx.betti(out, 4 * n + 8)?;
        ctx.push(Check::new(
            Status::Pass,
            "cohomology of the reduced model",
            format!("betti up to degree {}: {}", 4 * n + 8, nonzero_text(&r)),
        ));
    }
    if n == 2 && default_betas {
        if let Some(out) = &reduced {
            let thm34 = presets::load("thm34")?;
            let other = model(&thm34, "Breduced")?;
            let map = out.renaming_onto(other);
            let detail = match &map {
                Some(m) => {
                    let pairs: Vec<String> = m.iter().map(|(a, b)| format!("{a} -> {b}")).collect();
                    format!("renaming {}", pairs.join(", "))
                }
                None => format!("{out}\nversus {other}"),
            };
            ctx.push(Check::expect(
                map.is_some(),
                "beta = (3, 3, 1) reproduces the reduced Sp(1)\\Sp(3)/(Sp(1)×Sp(1)) model",
                detail,
            ));
        }
    }
    ctx.formula_discrepancies(doc, Some(b));
    Ok(())
}

/// Total Betti dimension of the projectivization against `n ×` that of the base.
pub fn leray_hirsch_check(
    base: &FreeCdga,
    rank: u32,
    classes: Vec<Polynomial>,
    opts: &CohomologyOptions,
) -> Result<Check> {
    let base_report = betti_with(base, crate::cohomology::default_max_degree(base), opts)?;
    let top = base_report.nonzero().last().map_or(0, |(d, _)| *d);
    let total = projectivize(&PontryaginData {
        base: base.clone(),
        classes: classes.clone(),
        rank,
    })?;
    let max = top + 4 * (rank - 1) + 8;
    let r = betti_with(&total, max, opts)?;
    let lhs = r.total_dimension();
    let rhs = rank as usize * base_report.total_dimension();
    let cls: Vec<String> = classes
        .iter()
        .enumerate()
        .map(|(i, p)| format!("p{} = {p}", i + 1))
        .collect();
    Ok(Check::expect(
        lhs == rhs,
        format!(
            "{}, rank {rank}: total betti {lhs} = {rank} × {}",
            base.name(),
            base_report.total_dimension()
        ),
        format!("{}; betti up to degree {max}: {}", cls.join(", "), nonzero_text(&r)),
    ))
}

/// Cocycle classes `p_i = c_i · e^{4i/|e|}` on the even generator `e` of a
/// one-even-generator base, or zero when the degree does not fit.
pub fn monomial_classes(base: &FreeCdga, rank: u32, coefficients: &[Scalar]) -> Vec<Polynomial> {
    let even = base.even_generators();
    (1..=rank)
        .map(|i| {
            let c = coefficients.get((i - 1) as usize).cloned().unwrap_or_else(|| scalar(1));
            match even.first() {
                Some(e) if (4 * i) % e.degree() == 0 => Polynomial::generator(e).pow(4 * i / e.degree()).scale(&c),
                _ => Polynomial::zero(),
            }
        })
        .collect()
}

pub fn leray_hirsch_report(opts: &CohomologyOptions) -> Result<CaseReport> {
    let start = Instant::now();
    let coefficient_sets = [
        vec![scalar(1), scalar(1), scalar(1)],
        vec![scalar(-2), Scalar::new(3.into(), 2.into()), scalar(5)],
    ];
    let mut checks = Vec::new();
    for file in ["hp1", "hp2", "s4", "s8"] {
        let doc = presets::load(file)?;
        let base = &doc.models[0];
        for rank in [2, 3] {
            for c in &coefficient_sets {
                checks.push(leray_hirsch_check(base, rank, monomial_classes(base, rank, c), opts)?);
            }
        }
    }
    Ok(CaseReport {
        id: "leray-hirsch".into(),
        description: "total Betti dimension of projectivizations over HP1, HP2, S4, S8".into(),
        checks,
        elapsed: start.elapsed(),
    })
}

/// Offending terms named by a degree violation.
pub fn offending_terms(v: &Violation) -> Vec<String> {
    match v {
        Violation::Inhomogeneous { offending, .. } => offending.iter().map(|(t, _)| t.clone()).collect(),
        Violation::WrongDegree { differential, .. } => vec![differential.clone()],
        Violation::NotClosed { .. } => Vec::new(),
    }
}

pub fn validator_report() -> Result<CaseReport> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let bad = "model Bad { gen v7 : 7; gen z8 : 8; gen b4 : 4; d v7 = z8 - 3*b4^4; }";
    checks.push(match parse_model(bad) {
        Ok(_) => Check::new(Status::Fail, "dv7 = z8 - 3*b4^4 is rejected", "accepted"),
        Err(e) => Check::expect(
            e.first().message.contains("-3*b4^4"),
            "dv7 = z8 - 3*b4^4 is rejected",
            e.to_string(),
        ),
    });
    for (case, n) in [(Case::Thm33, 2), (Case::Thm33, 3), (Case::Prop32, 2), (Case::Prop32, 3)] {
        let doc = parse_document(&case.source(n)?)?;
        for d in &doc.discrepancies {
            let Some((g, stated)) = &d.stated else { continue };
            let name = format!("{case} n={n}: d{g} = {stated} is rejected");
            checks.push(match d.stated_violation() {
                Some(v) => {
                    let terms = offending_terms(&v);
                    Check::expect(!terms.is_empty(), name, format!("{v}\noffending: {}", terms.join(", ")))
                }
                None => Check::new(Status::Fail, name, "accepted"),
            });
        }
    }
    Ok(CaseReport {
        id: "validator".into(),
        description: "degree-inconsistent stated differentials are rejected".into(),
        checks,
        elapsed: start.elapsed(),
    })
}

/// All four families at `n` (or their defaults), then the Leray–Hirsch
/// matrix and the validator regression.
pub fn verify_all(opts: &VerifyOptions) -> Result<Vec<CaseReport>> {
    let mut out = Vec::new();
    for case in Case::ALL {
        let mut o = opts.clone();
        if case == Case::Thm34 {
            o.n = None;
        }
        out.push(verify_case(case, &o)?);
    }
    out.push(leray_hirsch_report(&opts.cohomology)?);
    out.push(validator_report()?);
    Ok(out)
}

/// Generator lookup that reports unknown names as errors.
pub fn generator(model: &FreeCdga, name: &str) -> Result<Generator> {
    model.gen(name).cloned()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(case: Case, n: Option<u32>) -> CaseReport {
        let opts = VerifyOptions {
            n,
            ..VerifyOptions::default()
        };
        let r = verify_case(case, &opts).unwrap();
        assert!(r.passed(), "{r}");
        r
    }

    #[test]
    fn thm34_passes_with_documented_sign() {
        let r = run(Case::Thm34, None);
        assert_eq!(r.count(Status::Discrepancy), 1, "{r}");
    }

    #[test]
    fn thm33_n2() {
        let r = run(Case::Thm33, Some(2));
        assert_eq!(r.count(Status::Discrepancy), 3, "{r}");
    }

    #[test]
    fn prop31_reports_non_contractible() {
        let r = run(Case::Prop31, Some(2));
        assert!(
            r.checks
                .iter()
                .any(|c| c.status == Status::Discrepancy && c.name.contains("contractible")),
            "{r}"
        );
        let r = run(Case::Prop31, Some(3));
        assert_eq!(r.count(Status::Discrepancy), 2, "{r}");
    }

    #[test]
    fn prop32_specializes() {
        let r = run(Case::Prop32, Some(2));
        assert!(r.checks.iter().any(|c| c.name.contains("reproduces")), "{r}");
        run(Case::Prop32, Some(3));
    }

    #[test]
    fn validator_regression() {
        let r = validator_report().unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.checks.len() >= 5);
    }
}
