//! Automated simplification of a model by repeated change of variable and
//! removal of contractible pairs, with an optional Betti-number check after
//! every step.

use std::fmt;

use num_traits::One;

use crate::cdga::{cancel_acyclic_pair, change_of_variable, FreeCdga};
use crate::cohomology::{betti_with, CohomologyOptions};
use crate::error::{Error, Result};
use crate::gradedalg::{Generator, Monomial, Polynomial, Scalar};

/// Default degree up to which Betti numbers are compared after each step.
pub const DEFAULT_CHECK_DEGREE: u32 = 20;

/// A candidate for one reduction round: `dv = scalar · even + residue`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reducible {
    pub odd: Generator,
    pub even: Generator,
    pub scalar: Scalar,
    pub residue: Polynomial,
}

/// First odd generator (in generator order) whose differential has a
/// linear term that can be solved for and cancelled. Among several linear
/// terms of one differential the largest generator is eliminated.
pub fn find_reducible(model: &FreeCdga) -> Option<Reducible> {
    for v in model.odd_generators() {
        let dv = model.d(&v).expect("generator of the model");
        if model.differentials().any(|(w, dw)| *w != v && dw.mentions(&v)) {
            continue;
        }
        let mut linear: Vec<(Generator, Scalar)> = dv
            .terms()
            .filter_map(|(m, c)| m.as_generator().map(|g| (g.clone(), c.clone())))
            .filter(|(g, _)| g.is_even())
            .collect();
        linear.sort_by(|a, b| b.0.cmp(&a.0));
        for (x, lambda) in linear {
            let residue = dv - &Polynomial::term(Monomial::generator(&x), lambda.clone());
            if residue.mentions(&x) || residue.mentions(&v) {
                continue;
            }
            return Some(Reducible {
                odd: v,
                even: x,
                scalar: lambda,
                residue,
            });
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReductionStep {
    /// `fresh = relation`, eliminating `old`.
    ChangeOfVariable {
        old: Generator,
        fresh: Generator,
        relation: Polynomial,
    },
    /// Removal of `(odd, even)` where `d odd = scalar · even`.
    Cancellation {
        odd: Generator,
        even: Generator,
        scalar: Scalar,
    },
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionStep::ChangeOfVariable { old, fresh, relation } => {
                write!(f, "introduce {fresh} = {relation} (eliminating {old})")
            }
            ReductionStep::Cancellation { odd, even, scalar } => {
                if scalar.is_one() {
                    write!(f, "cancel ({odd}, {even}) with d{odd} = {even}")
                } else {
                    write!(f, "cancel ({odd}, {even}) with d{odd} = {scalar}*{even}")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoggedStep {
    pub step: ReductionStep,
    /// Betti numbers in degrees `0..=check_degree` after the step, when checked.
    pub betti: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionLog {
    pub check_degree: u32,
    pub initial_betti: Option<Vec<usize>>,
    pub steps: Vec<LoggedStep>,
}

impl ReductionLog {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Re-applies the logged steps to `initial`.
    pub fn replay(&self, initial: &FreeCdga) -> Result<FreeCdga> {
        let mut model = initial.clone();
        for logged in &self.steps {
            model = match &logged.step {
                ReductionStep::ChangeOfVariable { old, fresh, relation } => {
                    change_of_variable(&model, old, fresh, relation)?
                }
                ReductionStep::Cancellation { odd, even, scalar } => {
                    let (next, cert) = cancel_acyclic_pair(&model, odd)?;
                    if &cert.even != even || &cert.scalar != scalar {
                        return Err(Error::InvalidInput(format!(
                            "replay mismatch: cancelling {odd} removed {} with scalar {}",
                            cert.even, cert.scalar
                        )));
                    }
                    next
                }
            };
        }
        Ok(model)
    }
}

impl fmt::Display for ReductionLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.steps.is_empty() {
            return writeln!(f, "no reducible pairs");
        }
        for (i, s) in self.steps.iter().enumerate() {
            write!(f, "{:>3}. {}", i + 1, s.step)?;
            if let Some(b) = &s.betti {
                write!(f, "  [betti ≤ {}: {}]", self.check_degree, compact_betti(b))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Nonzero Betti numbers as `deg:dim` pairs.
pub fn compact_betti(b: &[usize]) -> String {
    let parts: Vec<String> = b
        .iter()
        .enumerate()
        .filter(|(_, d)| **d > 0)
        .map(|(n, d)| format!("{n}:{d}"))
        .collect();
    parts.join(" ")
}

fn fresh_generator(model: &FreeCdga, degree: u32) -> Generator {
    let mut name = format!("t{degree}");
    while model.generator(&name).is_some() {
        name.push('\'');
    }
    Generator::new(name, degree)
}

/// Reduces with default cohomology options; `check_degree = 0` skips
/// the Betti checks.
pub fn reduce(model: &FreeCdga, check_degree: u32) -> Result<(FreeCdga, ReductionLog)> {
    reduce_with(model, check_degree, &CohomologyOptions::default())
}

pub fn reduce_with(model: &FreeCdga, check_degree: u32, opts: &CohomologyOptions) -> Result<(FreeCdga, ReductionLog)> {
    model.validate().map_err(Error::InvalidModel)?;
    let opts = CohomologyOptions {
        representatives: false,
        ..opts.clone()
    };
    let snapshot = |m: &FreeCdga| -> Result<Option<Vec<usize>>> {
        if check_degree == 0 {
            Ok(None)
        } else {
            Ok(Some(betti_with(m, check_degree, &opts)?.betti_numbers()))
        }
    };
    let initial_betti = snapshot(model)?;
    let mut log = ReductionLog {
        check_degree,
        initial_betti: initial_betti.clone(),
        steps: Vec::new(),
    };
    let mut current = model.clone();
    let record = |log: &mut ReductionLog, step: ReductionStep, m: &FreeCdga| -> Result<()> {
        let after = snapshot(m)?;
        if after != initial_betti {
            return Err(Error::VerificationFailed {
                step: log.steps.len() + 1,
                description: step.to_string(),
                before: initial_betti.clone().unwrap_or_default(),
                after: after.unwrap_or_default(),
            });
        }
        log.steps.push(LoggedStep { step, betti: after });
        Ok(())
    };
    while let Some(r) = find_reducible(&current) {
        let fresh = fresh_generator(&current, r.even.degree());
        let relation = current.d(&r.odd).expect("odd generator of the model").clone();
        let changed = change_of_variable(&current, &r.even, &fresh, &relation)?;
        record(
            &mut log,
            ReductionStep::ChangeOfVariable {
                old: r.even.clone(),
                fresh: fresh.clone(),
                relation,
            },
            &changed,
        )?;
        let (cancelled, cert) = cancel_acyclic_pair(&changed, &r.odd)?;
        record(
            &mut log,
            ReductionStep::Cancellation {
                odd: cert.odd,
                even: cert.even,
                scalar: cert.scalar,
            },
            &cancelled,
        )?;
        current = cancelled;
    }
    Ok((current, log))
}
